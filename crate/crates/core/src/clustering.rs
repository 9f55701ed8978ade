//! Stage one: fuzzy C-means over feature columns.
//!
//! Every feature is treated as an object in sample space (one coordinate per
//! sample). Centroids are seeded with k-means++, memberships and centroids
//! are alternated until the objective stalls, and the fuzzy result is
//! hardened into disjoint feature groups by membership argmax.

use ndarray::{Array2, ArrayView1, ArrayView2, Axis, Zip};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::FuzzyDecisionSystem;
use crate::error::{FcsscError, Result};
use crate::membership::{memberships_from_distances, ZERO_DISTANCE};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FcmConfig {
    pub k: usize,
    /// Fuzzifier, strictly greater than 1.
    pub m: f64,
    pub epsilon: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl FcmConfig {
    pub const DEFAULT_M: f64 = 2.0;
    pub const DEFAULT_EPSILON: f64 = 1e-6;
    pub const DEFAULT_MAX_ITERS: usize = 300;

    pub fn new(k: usize, seed: u64) -> Self {
        FcmConfig {
            k,
            m: Self::DEFAULT_M,
            epsilon: Self::DEFAULT_EPSILON,
            max_iters: Self::DEFAULT_MAX_ITERS,
            seed,
        }
    }

    pub fn validate(&self, n_objects: usize) -> Result<()> {
        if !self.m.is_finite() || self.m <= 1.0 {
            return Err(FcsscError::InvalidConfig(format!(
                "fuzzifier m = {} must exceed 1",
                self.m
            )));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(FcsscError::InvalidConfig(format!(
                "epsilon = {} must be positive",
                self.epsilon
            )));
        }
        if self.max_iters == 0 {
            return Err(FcsscError::InvalidConfig(
                "max_iters must be positive".into(),
            ));
        }
        if self.k == 0 || self.k > n_objects {
            return Err(FcsscError::InvalidConfig(format!(
                "cluster count {} outside [1, {n_objects}]",
                self.k
            )));
        }
        Ok(())
    }
}

/// Result of a fuzzy C-means run.
#[derive(Debug, Clone, PartialEq)]
pub struct FcmState {
    /// K x N.
    pub centroids: Array2<f64>,
    /// K x M; each column sums to one.
    pub memberships: Array2<f64>,
    pub objective: f64,
    pub iterations: usize,
    /// Objective after every membership update, in iteration order.
    pub history: Vec<f64>,
    pub converged: bool,
}

/// Disjoint, exhaustive partition of feature indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureGroups {
    pub groups: Vec<Vec<usize>>,
}

impl FeatureGroups {
    /// Every feature in its own group.
    pub fn singletons(n_features: usize) -> Self {
        FeatureGroups {
            groups: (0..n_features).map(|a| vec![a]).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.groups.iter().map(Vec::len).collect()
    }

    pub fn n_features(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn group_of(&self, feature: usize) -> Option<usize> {
        self.groups.iter().position(|g| g.contains(&feature))
    }
}

/// `max(1, ceil(sqrt(M) * ln M))`, capped at `M`.
pub fn cluster_count(m_features: usize) -> usize {
    if m_features <= 1 {
        return 1;
    }
    let m = m_features as f64;
    let k = (m.sqrt() * m.ln()).ceil() as usize;
    k.clamp(1, m_features)
}

fn sq_dist(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    Zip::from(a)
        .and(b)
        .fold(0.0, |acc, &x, &y| acc + (x - y) * (x - y))
}

/// k-means++ seeding: the first centroid uniformly at random, every further
/// one with probability proportional to the squared distance to the nearest
/// centroid chosen so far. Rows of `objects` are the candidates.
pub fn kmeanspp_init(objects: ArrayView2<f64>, k: usize, seed: u64) -> Result<Array2<f64>> {
    let n_objects = objects.nrows();
    if k == 0 || k > n_objects {
        return Err(FcsscError::InvalidConfig(format!(
            "cannot seed {k} centroids from {n_objects} objects"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    chosen.push(rng.random_range(0..n_objects));

    let mut nearest: Vec<f64> = objects
        .rows()
        .into_iter()
        .map(|row| sq_dist(row, objects.row(chosen[0])))
        .collect();

    while chosen.len() < k {
        let total: f64 = nearest.iter().sum();
        let next = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &w) in nearest.iter().enumerate() {
                if w <= 0.0 {
                    continue;
                }
                acc += w;
                pick = Some(i);
                if acc > target {
                    break;
                }
            }
            pick.expect("positive total implies a positive weight")
        } else {
            // every remaining object duplicates a centroid
            (0..n_objects)
                .find(|i| !chosen.contains(i))
                .expect("k <= number of objects")
        };
        chosen.push(next);
        let row = objects.row(next);
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(sq_dist(objects.row(i), row));
        }
    }

    Ok(objects.select(Axis(0), &chosen))
}

/// Membership update. Returns a K x M matrix for K centroids and M objects.
pub fn update_memberships(
    objects: ArrayView2<f64>,
    centroids: ArrayView2<f64>,
    m: f64,
) -> Array2<f64> {
    let k = centroids.nrows();
    let columns: Vec<Vec<f64>> = (0..objects.nrows())
        .into_par_iter()
        .map(|j| {
            let obj = objects.row(j);
            let dists: Vec<f64> = centroids
                .rows()
                .into_iter()
                .map(|c| sq_dist(obj, c).sqrt())
                .collect();
            let mut u = vec![0.0; k];
            memberships_from_distances(&dists, m, &mut u);
            u
        })
        .collect();
    let mut out = Array2::zeros((k, objects.nrows()));
    for (j, col) in columns.into_iter().enumerate() {
        for (i, u) in col.into_iter().enumerate() {
            out[[i, j]] = u;
        }
    }
    out
}

/// Centroid update `v_i = sum_k u_ik^m x_k / sum_k u_ik^m`. A cluster with
/// (numerically) no membership mass is reseeded at the object farthest from
/// its nearest live centroid.
pub fn update_centroids(
    objects: ArrayView2<f64>,
    memberships: ArrayView2<f64>,
    m: f64,
) -> Array2<f64> {
    let (k, n_objects) = memberships.dim();
    let dim = objects.ncols();
    let mut centroids = Array2::zeros((k, dim));
    let mut empty = Vec::new();

    for i in 0..k {
        let weights: Vec<f64> = memberships.row(i).iter().map(|u| u.powf(m)).collect();
        let mass: f64 = weights.iter().sum();
        if mass < ZERO_DISTANCE {
            empty.push(i);
            continue;
        }
        let mut c = centroids.row_mut(i);
        for (obj, &w) in objects.rows().into_iter().zip(&weights) {
            if w != 0.0 {
                c.scaled_add(w, &obj);
            }
        }
        c.mapv_inplace(|v| v / mass);
    }

    if !empty.is_empty() {
        let mut live: Vec<usize> = (0..k).filter(|i| !empty.contains(i)).collect();
        for &i in &empty {
            let mut best = (0usize, f64::NEG_INFINITY);
            for j in 0..n_objects {
                let d = live
                    .iter()
                    .map(|&c| sq_dist(objects.row(j), centroids.row(c)))
                    .fold(f64::INFINITY, f64::min);
                if d > best.1 {
                    best = (j, d);
                }
            }
            centroids.row_mut(i).assign(&objects.row(best.0));
            live.push(i);
        }
    }
    centroids
}

/// `J = sum_i sum_k u_ik^m ||x_k - v_i||^2`.
pub fn fcm_objective(
    objects: ArrayView2<f64>,
    centroids: ArrayView2<f64>,
    memberships: ArrayView2<f64>,
    m: f64,
) -> f64 {
    let mut j = 0.0;
    for (i, c) in centroids.rows().into_iter().enumerate() {
        for (k, obj) in objects.rows().into_iter().enumerate() {
            let u = memberships[[i, k]];
            if u != 0.0 {
                j += u.powf(m) * sq_dist(obj, c);
            }
        }
    }
    j
}

/// Alternates membership and centroid updates from a k-means++ start until
/// `|J(t-1) - J(t)| < epsilon` or `max_iters` rounds have run.
pub fn run_fcm(objects: ArrayView2<f64>, config: &FcmConfig) -> Result<FcmState> {
    config.validate(objects.nrows())?;
    let mut centroids = kmeanspp_init(objects, config.k, config.seed)?;
    let mut history = Vec::new();
    let mut memberships;
    let mut converged = false;

    loop {
        memberships = update_memberships(objects, centroids.view(), config.m);
        let j = fcm_objective(objects, centroids.view(), memberships.view(), config.m);
        let prev = history.last().copied();
        history.push(j);
        if prev.is_some_and(|p: f64| (p - j).abs() < config.epsilon) {
            converged = true;
            break;
        }
        if history.len() >= config.max_iters {
            break;
        }
        centroids = update_centroids(objects, memberships.view(), config.m);
    }

    Ok(FcmState {
        objective: *history.last().expect("at least one iteration"),
        iterations: history.len(),
        centroids,
        memberships,
        history,
        converged,
    })
}

/// Assigns each object to its highest-membership cluster (lowest cluster
/// index on ties) and drops clusters that receive nothing.
pub fn harden_groups(state: &FcmState) -> FeatureGroups {
    let (k, n_objects) = state.memberships.dim();
    let mut groups = vec![Vec::new(); k];
    for j in 0..n_objects {
        let col = state.memberships.column(j);
        let mut best = 0;
        for i in 1..k {
            if col[i] > col[best] {
                best = i;
            }
        }
        groups[best].push(j);
    }
    groups.retain(|g| !g.is_empty());
    FeatureGroups { groups }
}

/// Clusters the feature columns of `fds` into disjoint groups.
pub fn cluster_features(
    fds: &FuzzyDecisionSystem,
    config: &FcmConfig,
) -> Result<(FcmState, FeatureGroups)> {
    let objects = fds.samples().t();
    let state = run_fcm(objects, config)?;
    let groups = harden_groups(&state);
    Ok((state, groups))
}
