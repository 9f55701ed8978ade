//! Fuzzy neighborhood relations and local consistency.
//!
//! Each feature induces a similarity relation whose neighborhood radius
//! adapts to the spread of that feature. A subset relation is the pointwise
//! minimum over its features. Local consistency is the average share of a
//! sample's neighbor mass that carries its own label. The lambda-cut granule,
//! fuzzy decision, approximations and positive region are provided as
//! standalone rough-set primitives.

use std::sync::OnceLock;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::dataset::FuzzyDecisionSystem;
use crate::error::{FcsscError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyConfig {
    /// Neighborhood size control; the radius of feature `a` is `std(a) / pi`.
    pub pi: f64,
    /// Cut level for the lambda-granule primitives.
    pub lambda: f64,
}

impl Default for ConsistencyConfig {
    fn default() -> Self {
        ConsistencyConfig {
            pi: 1.0,
            lambda: 0.2,
        }
    }
}

impl ConsistencyConfig {
    pub fn validate(&self) -> Result<()> {
        validate_pi(self.pi)?;
        validate_lambda(self.lambda)
    }
}

pub(crate) fn validate_pi(pi: f64) -> Result<()> {
    if pi > 0.0 && pi.is_finite() {
        Ok(())
    } else {
        Err(FcsscError::InvalidConfig(format!(
            "pi = {pi} must be positive"
        )))
    }
}

fn validate_lambda(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(FcsscError::InvalidConfig(format!(
            "lambda = {lambda} outside [0, 1]"
        )))
    }
}

/// Square matrix of pairwise similarity degrees in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyRelation(Array2<f64>);

impl FuzzyRelation {
    pub fn new(matrix: Array2<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(FcsscError::InvalidConfig(format!(
                "relation must be square, got {:?}",
                matrix.dim()
            )));
        }
        if matrix.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(FcsscError::InvalidConfig(
                "relation entries must lie in [0, 1]".into(),
            ));
        }
        Ok(FuzzyRelation(matrix))
    }

    pub fn identity(n: usize) -> Self {
        FuzzyRelation(Array2::eye(n))
    }

    pub fn ones(n: usize) -> Self {
        FuzzyRelation(Array2::ones((n, n)))
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.0[[x, y]]
    }

    pub fn is_reflexive(&self) -> bool {
        self.0.diag().iter().all(|&v| v == 1.0)
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| (i + 1..n).all(|j| self.0[[i, j]] == self.0[[j, i]]))
    }

    /// Pointwise minimum with another relation of the same size.
    pub fn intersect(&self, other: &FuzzyRelation) -> FuzzyRelation {
        let mut out = self.0.clone();
        out.zip_mut_with(&other.0, |a, &b| *a = a.min(b));
        FuzzyRelation(out)
    }

    /// Sigma-count of the granule (row) of sample `x`.
    pub fn granule_cardinality(&self, x: usize) -> f64 {
        self.0.row(x).sum()
    }
}

fn population_std(values: impl ExactSizeIterator<Item = f64> + Clone) -> f64 {
    let n = values.len() as f64;
    let first = values.clone().next().unwrap_or(0.0);
    if values.clone().all(|v| v == first) {
        return 0.0;
    }
    let mean = values.clone().sum::<f64>() / n;
    (values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
}

/// `std(a) / pi` with the population standard deviation.
pub fn adaptive_radius(fds: &FuzzyDecisionSystem, feature: usize, pi: f64) -> f64 {
    population_std(fds.column(feature).iter().copied()) / pi
}

#[inline]
fn similarity_degree(x: f64, y: f64, radius: f64) -> f64 {
    let d = (x - y).abs();
    if d <= radius {
        1.0 - d
    } else {
        0.0
    }
}

/// Single-feature relation: `1 - |f(x) - f(y)|` inside the adaptive radius,
/// zero outside.
pub fn fuzzy_similarity(fds: &FuzzyDecisionSystem, feature: usize, pi: f64) -> FuzzyRelation {
    let radius = adaptive_radius(fds, feature, pi);
    similarity_from_column(fds, feature, radius)
}

fn similarity_from_column(fds: &FuzzyDecisionSystem, feature: usize, radius: f64) -> FuzzyRelation {
    let col = fds.column(feature);
    let n = col.len();
    let mut m = Array2::zeros((n, n));
    for i in 0..n {
        m[[i, i]] = 1.0;
        for j in i + 1..n {
            let r = similarity_degree(col[i], col[j], radius);
            m[[i, j]] = r;
            m[[j, i]] = r;
        }
    }
    FuzzyRelation(m)
}

/// Pointwise minimum of a nonempty collection of relations.
pub fn subset_relation<'r>(
    relations: impl IntoIterator<Item = &'r FuzzyRelation>,
) -> Result<FuzzyRelation> {
    let mut iter = relations.into_iter();
    let first = iter.next().ok_or(FcsscError::EmptySubset)?;
    let mut out = first.0.clone();
    for r in iter {
        out.zip_mut_with(&r.0, |a, &b| *a = a.min(b));
    }
    Ok(FuzzyRelation(out))
}

/// Per-feature radii plus lazily built single-feature relations for one
/// decision system. Relations are built on first use and shared afterwards.
#[derive(Debug)]
pub struct SimilarityStructure<'a> {
    fds: &'a FuzzyDecisionSystem,
    pi: f64,
    radii: Vec<f64>,
    relations: Vec<OnceLock<FuzzyRelation>>,
}

impl<'a> SimilarityStructure<'a> {
    pub fn new(fds: &'a FuzzyDecisionSystem, pi: f64) -> Result<Self> {
        validate_pi(pi)?;
        let m = fds.n_features();
        let radii = (0..m).map(|a| adaptive_radius(fds, a, pi)).collect();
        Ok(SimilarityStructure {
            fds,
            pi,
            radii,
            relations: (0..m).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn fds(&self) -> &'a FuzzyDecisionSystem {
        self.fds
    }

    pub fn pi(&self) -> f64 {
        self.pi
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn relation(&self, feature: usize) -> &FuzzyRelation {
        self.relations[feature]
            .get_or_init(|| similarity_from_column(self.fds, feature, self.radii[feature]))
    }

    pub fn subset_relation(&self, subset: &[usize]) -> Result<FuzzyRelation> {
        self.fds.check_subset(subset)?;
        subset_relation(subset.iter().map(|&a| self.relation(a)))
    }

    /// Local consistency of `base ∪ {feature}` without materializing the
    /// combined relation; `base = None` stands for the empty subset.
    /// Produces the same value, bit for bit, as building the relation with
    /// [`subset_relation`] and calling [`local_consistency`].
    pub fn local_consistency_with(&self, base: Option<&FuzzyRelation>, feature: usize) -> f64 {
        let col = self.fds.column(feature);
        let radius = self.radii[feature];
        let labels = self.fds.labels();
        let n = col.len();
        let mut acc = 0.0;
        for i in 0..n {
            let (mut same, mut total) = (0.0, 0.0);
            for j in 0..n {
                let mut r = similarity_degree(col[i], col[j], radius);
                if let Some(b) = base {
                    r = b.0[[i, j]].min(r);
                }
                total += r;
                if labels[j] == labels[i] {
                    same += r;
                }
            }
            acc += same / total;
        }
        acc / n as f64
    }
}

fn labels_of(classes: &[Vec<usize>], n: usize) -> Vec<usize> {
    let mut labels = vec![usize::MAX; n];
    for (c, members) in classes.iter().enumerate() {
        for &x in members {
            labels[x] = c;
        }
    }
    labels
}

/// Mean over samples of `|[x] ∩ L(x)| / |[x]|` with sigma-count cardinality,
/// where `L(x)` is the decision class of `x`.
pub fn local_consistency(relation: &FuzzyRelation, classes: &[Vec<usize>]) -> f64 {
    let n = relation.len();
    let labels = labels_of(classes, n);
    let m = &relation.0;
    let mut acc = 0.0;
    for i in 0..n {
        let (mut same, mut total) = (0.0, 0.0);
        for j in 0..n {
            let r = m[[i, j]];
            total += r;
            if labels[j] == labels[i] {
                same += r;
            }
        }
        acc += same / total;
    }
    acc / n as f64
}

/// Row of `x` with every degree below `1 - lambda` zeroed.
pub fn lambda_granule(relation: &FuzzyRelation, lambda: f64, x: usize) -> Vec<f64> {
    let cut = 1.0 - lambda;
    relation
        .0
        .row(x)
        .iter()
        .map(|&r| if r >= cut { r } else { 0.0 })
        .collect()
}

/// Share of the granule's sigma-count that falls inside `class`.
pub fn fuzzy_decision(granule: &[f64], class: &[usize]) -> Result<f64> {
    let total: f64 = granule.iter().sum();
    if total <= 0.0 {
        return Err(FcsscError::ZeroCardinalityGranule);
    }
    let inside: f64 = class.iter().map(|&y| granule[y]).sum();
    Ok(inside / total)
}

fn outside_mask(class: &[usize], n: usize) -> Vec<bool> {
    let mut outside = vec![true; n];
    for &x in class {
        outside[x] = false;
    }
    outside
}

/// Members of `class` whose lambda-granule places no mass outside `class`.
pub fn lower_approximation(relation: &FuzzyRelation, lambda: f64, class: &[usize]) -> Vec<usize> {
    let outside = outside_mask(class, relation.len());
    let mut out: Vec<usize> = class
        .iter()
        .copied()
        .filter(|&x| {
            lambda_granule(relation, lambda, x)
                .iter()
                .zip(&outside)
                .all(|(&g, &o)| !o || g == 0.0)
        })
        .collect();
    out.sort_unstable();
    out
}

/// Members of `class` whose lambda-granule meets `class`. Ranges over the
/// class itself rather than the whole universe.
pub fn upper_approximation(relation: &FuzzyRelation, lambda: f64, class: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = class
        .iter()
        .copied()
        .filter(|&x| {
            let g = lambda_granule(relation, lambda, x);
            class.iter().any(|&y| g[y] > 0.0)
        })
        .collect();
    out.sort_unstable();
    out
}

/// Union of the lower approximations of every class, sorted.
pub fn positive_region(
    relation: &FuzzyRelation,
    lambda: f64,
    classes: &[Vec<usize>],
) -> Vec<usize> {
    let mut out: Vec<usize> = classes
        .iter()
        .flat_map(|c| lower_approximation(relation, lambda, c))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}
