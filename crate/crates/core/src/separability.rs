//! Global separability of a feature subset.
//!
//! Samples get fuzzy memberships to the decision-class centroids. Cohesion
//! (DIC) averages each class's membership to itself; separation (DIS) is one
//! minus the entropy-weighted overlap between class pairs. GS is their
//! product.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::dataset::FuzzyDecisionSystem;
use crate::error::{FcsscError, Result};
use crate::membership::{memberships_from_distances, ZERO_DISTANCE};

/// Fuzzifier for sample-to-class memberships.
pub const CLASS_FUZZIFIER: f64 = 2.0;

/// Per-class feature means, `c x |B|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassCentroids {
    pub means: Array2<f64>,
}

/// `N x c` fuzzy memberships of samples to decision classes.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassMembershipMatrix {
    pub values: Array2<f64>,
}

impl ClassMembershipMatrix {
    pub fn n_samples(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_classes(&self) -> usize {
        self.values.ncols()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlobalSeparability {
    pub dic: f64,
    pub dis: f64,
    pub gs: f64,
    /// Set when there is a single decision class and DIS defaults to 1.
    pub degenerate: bool,
}

pub fn class_centroids(fds: &FuzzyDecisionSystem, subset: &[usize]) -> Result<ClassCentroids> {
    if subset.is_empty() {
        return Err(FcsscError::EmptySubset);
    }
    fds.check_subset(subset)?;
    let samples = fds.samples();
    let mut means = Array2::zeros((fds.n_classes(), subset.len()));
    for (i, class) in fds.classes().iter().enumerate() {
        for (col, &a) in subset.iter().enumerate() {
            let sum: f64 = class.iter().map(|&k| samples[[k, a]]).sum();
            means[[i, col]] = sum / class.len() as f64;
        }
    }
    Ok(ClassCentroids { means })
}

/// Euclidean distance of sample `k` to the centroid of class `i` over `subset`.
pub fn class_distance(
    fds: &FuzzyDecisionSystem,
    subset: &[usize],
    k: usize,
    i: usize,
    centroids: &ClassCentroids,
) -> f64 {
    let samples = fds.samples();
    subset
        .iter()
        .enumerate()
        .map(|(col, &a)| {
            let d = samples[[k, a]] - centroids.means[[i, col]];
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

pub fn fuzzy_class_memberships(
    fds: &FuzzyDecisionSystem,
    subset: &[usize],
) -> Result<ClassMembershipMatrix> {
    let centroids = class_centroids(fds, subset)?;
    let (n, c) = (fds.n_samples(), fds.n_classes());
    let mut values = Array2::zeros((n, c));
    let mut dists = vec![0.0; c];
    let mut row = vec![0.0; c];
    for k in 0..n {
        for (i, d) in dists.iter_mut().enumerate() {
            *d = class_distance(fds, subset, k, i, &centroids);
        }
        memberships_from_distances(&dists, CLASS_FUZZIFIER, &mut row);
        for (i, &u) in row.iter().enumerate() {
            values[[k, i]] = u;
        }
    }
    Ok(ClassMembershipMatrix { values })
}

/// Mean membership of the members of class `i` to class `i`.
pub fn dic_class(memberships: &ClassMembershipMatrix, members: &[usize], i: usize) -> f64 {
    if members.is_empty() {
        return 0.0;
    }
    members
        .iter()
        .map(|&k| memberships.values[[k, i]])
        .sum::<f64>()
        / members.len() as f64
}

pub fn dic(memberships: &ClassMembershipMatrix, classes: &[Vec<usize>]) -> f64 {
    let c = classes.len();
    classes
        .iter()
        .enumerate()
        .map(|(i, members)| dic_class(memberships, members, i))
        .sum::<f64>()
        / c as f64
}

/// Overlap of classes `i` and `j` at sample `k`.
pub fn pointwise_similarity(
    memberships: &ClassMembershipMatrix,
    i: usize,
    j: usize,
    k: usize,
) -> f64 {
    memberships.values[[k, i]].min(memberships.values[[k, j]])
}

/// Membership entropy of every sample scaled by the largest one. All zero
/// when every sample is crisp.
pub fn entropy_weights(memberships: &ClassMembershipMatrix) -> Vec<f64> {
    let entropy: Vec<f64> = memberships
        .values
        .rows()
        .into_iter()
        .map(|row| {
            -row.iter()
                .filter(|&&u| u > 0.0)
                .map(|&u| u * u.ln())
                .sum::<f64>()
        })
        .collect();
    let max = entropy.iter().copied().fold(0.0, f64::max);
    if max < ZERO_DISTANCE {
        return vec![0.0; entropy.len()];
    }
    entropy.into_iter().map(|h| h / max).collect()
}

/// `S(D_i, D_j) = (c / N) * sum_k w(x_k) * min(u_ki, u_kj)`.
pub fn class_similarity(
    memberships: &ClassMembershipMatrix,
    weights: &[f64],
    i: usize,
    j: usize,
) -> f64 {
    let (n, c) = memberships.values.dim();
    let total: f64 = weights
        .iter()
        .enumerate()
        .map(|(k, &w)| w * pointwise_similarity(memberships, i, j, k))
        .sum();
    c as f64 / n as f64 * total
}

/// One minus the mean similarity over unordered class pairs, clamped to
/// [0, 1]. A single class has nothing to confuse and yields 1.
pub fn dis(memberships: &ClassMembershipMatrix) -> f64 {
    let c = memberships.n_classes();
    if c < 2 {
        return 1.0;
    }
    let weights = entropy_weights(memberships);
    let mut total = 0.0;
    for i in 0..c {
        for j in i + 1..c {
            total += class_similarity(memberships, &weights, i, j);
        }
    }
    let pairs = (c * (c - 1) / 2) as f64;
    (1.0 - total / pairs).clamp(0.0, 1.0)
}

pub fn global_separability(
    fds: &FuzzyDecisionSystem,
    subset: &[usize],
) -> Result<GlobalSeparability> {
    let u = fuzzy_class_memberships(fds, subset)?;
    let dic = dic(&u, fds.classes());
    let dis = dis(&u);
    Ok(GlobalSeparability {
        dic,
        dis,
        gs: dic * dis,
        degenerate: fds.n_classes() < 2,
    })
}
