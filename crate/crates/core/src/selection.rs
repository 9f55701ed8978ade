//! Stage two: greedy forward selection over feature groups.
//!
//! A subset is scored by `gamma = beta * GS + (1 - beta) * LC`. At each step
//! every feature of every remaining group is tried against the current
//! reduct; the best one is kept and its whole group is discarded.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{cluster_count, cluster_features, FcmConfig, FeatureGroups};
use crate::consistency::{validate_pi, FuzzyRelation, SimilarityStructure};
use crate::dataset::FuzzyDecisionSystem;
use crate::error::{FcsscError, Result};
use crate::separability::{global_separability, GlobalSeparability};

/// Candidates whose significance is within this of the best are tied.
pub const SIG_TIE_TOLERANCE: f64 = 1e-12;

/// Feature count above which `ClusteringMode::Auto` turns clustering on.
pub const AUTO_CLUSTERING_THRESHOLD: usize = 100;

/// Termination threshold used for high-dimensional data.
pub const HIGH_DIM_DELTA: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusteringMode {
    #[default]
    Auto,
    On,
    Off,
}

impl ClusteringMode {
    pub fn enabled_for(self, n_features: usize) -> bool {
        match self {
            ClusteringMode::On => true,
            ClusteringMode::Off => false,
            ClusteringMode::Auto => n_features > AUTO_CLUSTERING_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectorConfig {
    pub beta: f64,
    /// Maximum reduct size; `None` picks `M` for up to 100 features and 50
    /// beyond that.
    pub delta: Option<usize>,
    pub clustering: ClusteringMode,
    /// Cluster count; defaults to `ceil(sqrt(M) ln M)`.
    pub k_override: Option<usize>,
    pub pi: f64,
    pub seed: u64,
    pub fuzzifier: f64,
    pub fcm_epsilon: f64,
    pub fcm_max_iters: usize,
}

impl Default for SelectorConfig {
    fn default() -> Self {
        SelectorConfig {
            beta: 0.5,
            delta: None,
            clustering: ClusteringMode::Auto,
            k_override: None,
            pi: 1.0,
            seed: 0,
            fuzzifier: FcmConfig::DEFAULT_M,
            fcm_epsilon: FcmConfig::DEFAULT_EPSILON,
            fcm_max_iters: FcmConfig::DEFAULT_MAX_ITERS,
        }
    }
}

impl SelectorConfig {
    pub fn resolve_delta(&self, n_features: usize) -> usize {
        self.delta
            .unwrap_or(if n_features <= AUTO_CLUSTERING_THRESHOLD {
                n_features
            } else {
                HIGH_DIM_DELTA
            })
    }

    pub fn fcm_config(&self, n_features: usize) -> FcmConfig {
        FcmConfig {
            k: self.k_override.unwrap_or_else(|| cluster_count(n_features)),
            m: self.fuzzifier,
            epsilon: self.fcm_epsilon,
            max_iters: self.fcm_max_iters,
            seed: self.seed,
        }
    }

    pub fn validate(&self, n_features: usize) -> Result<()> {
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(FcsscError::InvalidConfig(format!(
                "beta = {} outside [0, 1]",
                self.beta
            )));
        }
        if self.delta == Some(0) {
            return Err(FcsscError::InvalidConfig("delta must be at least 1".into()));
        }
        validate_pi(self.pi)?;
        if self.clustering.enabled_for(n_features) {
            self.fcm_config(n_features).validate(n_features)?;
        }
        Ok(())
    }
}

/// Discrimination degree of a subset with its components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaValue {
    pub separability: GlobalSeparability,
    pub lc: f64,
    pub gamma: f64,
}

impl GammaValue {
    /// Value assigned to the empty subset.
    pub const EMPTY: GammaValue = GammaValue {
        separability: GlobalSeparability {
            dic: 0.0,
            dis: 0.0,
            gs: 0.0,
            degenerate: false,
        },
        lc: 0.0,
        gamma: 0.0,
    };

    fn combine(separability: GlobalSeparability, lc: f64, beta: f64) -> Self {
        GammaValue {
            separability,
            lc,
            gamma: beta * separability.gs + (1.0 - beta) * lc,
        }
    }
}

/// `gamma_B = beta * GS_B + (1 - beta) * LC_B`; zero for the empty subset.
pub fn gamma(
    fds: &FuzzyDecisionSystem,
    subset: &[usize],
    beta: f64,
    pi: f64,
) -> Result<GammaValue> {
    if subset.is_empty() {
        return Ok(GammaValue::EMPTY);
    }
    let structure = SimilarityStructure::new(fds, pi)?;
    gamma_with(&structure, subset, beta)
}

fn gamma_with(
    structure: &SimilarityStructure<'_>,
    subset: &[usize],
    beta: f64,
) -> Result<GammaValue> {
    let fds = structure.fds();
    let gs = global_separability(fds, subset)?;
    let relation = structure.subset_relation(subset)?;
    let lc = crate::consistency::local_consistency(&relation, fds.classes());
    Ok(GammaValue::combine(gs, lc, beta))
}

/// Gain in gamma from adding `feature` to `reduct`. May be negative.
pub fn significance(
    fds: &FuzzyDecisionSystem,
    feature: usize,
    reduct: &[usize],
    beta: f64,
    pi: f64,
) -> Result<f64> {
    if reduct.contains(&feature) {
        return Err(FcsscError::FeatureInReduct(feature));
    }
    fds.check_subset(&[feature])?;
    let structure = SimilarityStructure::new(fds, pi)?;
    let base = if reduct.is_empty() {
        GammaValue::EMPTY
    } else {
        gamma_with(&structure, reduct, beta)?
    };
    let mut extended = reduct.to_vec();
    extended.push(feature);
    Ok(gamma_with(&structure, &extended, beta)?.gamma - base.gamma)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateScore {
    pub feature: usize,
    pub gamma: f64,
    pub sig: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub candidates_evaluated: usize,
    pub chosen_feature: usize,
    pub chosen_name: String,
    pub group: usize,
    pub dic: f64,
    pub dis: f64,
    pub gs: f64,
    pub lc: f64,
    pub gamma: f64,
    pub sig: f64,
    pub candidates: Vec<CandidateScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionTrace {
    pub selected: Vec<usize>,
    pub selected_names: Vec<String>,
    pub steps: Vec<StepRecord>,
    /// Partition searched over; singletons when clustering is off.
    pub groups: FeatureGroups,
    pub clustering_used: bool,
    pub groups_consumed: Vec<usize>,
    pub total_evaluations: usize,
    pub beta: f64,
    pub delta: usize,
}

/// Runs both stages on `fds`.
pub fn fcssc(fds: &FuzzyDecisionSystem, config: &SelectorConfig) -> Result<SelectionTrace> {
    let m = fds.n_features();
    config.validate(m)?;
    let clustering_used = config.clustering.enabled_for(m);
    let groups = if clustering_used {
        cluster_features(fds, &config.fcm_config(m))?.1
    } else {
        FeatureGroups::singletons(m)
    };
    select_from_groups(fds, groups, clustering_used, config)
}

/// Greedy search over a given partition of the features.
pub fn select_from_groups(
    fds: &FuzzyDecisionSystem,
    groups: FeatureGroups,
    clustering_used: bool,
    config: &SelectorConfig,
) -> Result<SelectionTrace> {
    let m = fds.n_features();
    let mut covered: Vec<usize> = groups.groups.iter().flatten().copied().collect();
    covered.sort_unstable();
    if covered != (0..m).collect::<Vec<_>>() {
        return Err(FcsscError::InvalidConfig(
            "feature groups must partition the features".into(),
        ));
    }
    let delta = config.resolve_delta(m);
    let beta = config.beta;
    let structure = SimilarityStructure::new(fds, config.pi)?;

    let mut remaining: Vec<usize> = (0..groups.len()).collect();
    let mut reduct: Vec<usize> = Vec::new();
    let mut reduct_relation: Option<FuzzyRelation> = None;
    let mut current = GammaValue::EMPTY;
    let mut steps = Vec::new();
    let mut consumed = Vec::new();
    let mut total_evaluations = 0;

    while !remaining.is_empty() {
        if reduct.len() >= delta {
            break;
        }
        let mut candidates: Vec<usize> = remaining
            .iter()
            .flat_map(|&g| groups.groups[g].iter().copied())
            .collect();
        candidates.sort_unstable();

        let scored: Vec<(usize, GammaValue)> = candidates
            .par_iter()
            .map(|&a| {
                let mut subset = reduct.clone();
                subset.push(a);
                let gs = global_separability(fds, &subset)?;
                let lc = structure.local_consistency_with(reduct_relation.as_ref(), a);
                Ok((a, GammaValue::combine(gs, lc, beta)))
            })
            .collect::<Result<_>>()?;
        total_evaluations += scored.len();

        let sigs: Vec<CandidateScore> = scored
            .iter()
            .map(|(a, g)| CandidateScore {
                feature: *a,
                gamma: g.gamma,
                sig: g.gamma - current.gamma,
            })
            .collect();
        let best_sig = sigs.iter().map(|c| c.sig).fold(f64::NEG_INFINITY, f64::max);
        let pos = sigs
            .iter()
            .position(|c| c.sig >= best_sig - SIG_TIE_TOLERANCE)
            .expect("at least one candidate");
        let (chosen, value) = scored[pos];
        let group = groups
            .group_of(chosen)
            .expect("candidate belongs to a group");

        reduct.push(chosen);
        reduct_relation = Some(match reduct_relation {
            None => structure.relation(chosen).clone(),
            Some(r) => r.intersect(structure.relation(chosen)),
        });
        remaining.retain(|&g| g != group);
        consumed.push(group);

        steps.push(StepRecord {
            step: steps.len(),
            candidates_evaluated: scored.len(),
            chosen_feature: chosen,
            chosen_name: fds.feature_names()[chosen].clone(),
            group,
            dic: value.separability.dic,
            dis: value.separability.dis,
            gs: value.separability.gs,
            lc: value.lc,
            gamma: value.gamma,
            sig: sigs[pos].sig,
            candidates: sigs,
        });
        current = value;
    }

    Ok(SelectionTrace {
        selected_names: reduct
            .iter()
            .map(|&a| fds.feature_names()[a].clone())
            .collect(),
        selected: reduct,
        steps,
        groups,
        clustering_used,
        groups_consumed: consumed,
        total_evaluations,
        beta,
        delta,
    })
}

/// Worst-case number of subset evaluations: `M + (M - l_1) + (M - l_1 - l_2)
/// + ...` over `min(K, delta)` steps with group sizes in ascending order.
pub fn evaluation_budget(group_sizes: &[usize], delta: usize) -> usize {
    let mut sizes = group_sizes.to_vec();
    sizes.sort_unstable();
    let mut left: usize = sizes.iter().sum();
    let mut total = 0;
    for &l in sizes.iter().take(delta) {
        total += left;
        left -= l;
    }
    total
}
