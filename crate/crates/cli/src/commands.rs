use fcssc_core::clustering::cluster_features;
use fcssc_core::dataset::{impute_missing, load_csv, normalize_min_max};
use fcssc_core::evaluation::{cross_validate, EvalReport, FoldPlan, Knn, SubsetStrategy};
use fcssc_core::{fcssc, FuzzyDecisionSystem, SelectionTrace, SelectorConfig};
use serde::Serialize;

use crate::args::RunConfig;
use crate::report::{Failure, ReportEnvelope};

fn load(config: &RunConfig) -> Result<FuzzyDecisionSystem, Failure> {
    let raw = load_csv(&config.input, &config.label_column(), config.header)?;
    if raw.missing_count() > 0 {
        log::info!("imputing {} missing cells", raw.missing_count());
    }
    Ok(normalize_min_max(&impute_missing(&raw)?)?)
}

fn selector(config: &RunConfig) -> SelectorConfig {
    SelectorConfig {
        beta: config.beta,
        delta: config.delta,
        clustering: config.clustering.into(),
        k_override: config.k_override,
        pi: config.pi,
        seed: config.seed,
        ..Default::default()
    }
}

#[derive(Debug, Serialize)]
pub struct ClusterPayload {
    pub n_features: usize,
    pub k: usize,
    pub groups: Vec<Vec<usize>>,
    pub group_names: Vec<Vec<String>>,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub fn cluster(config: RunConfig) -> Result<(), Failure> {
    let fds = load(&config)?;
    let fcm = selector(&config).fcm_config(fds.n_features());
    let (state, groups) = cluster_features(&fds, &fcm)?;
    let names = fds.feature_names();
    let payload = ClusterPayload {
        n_features: fds.n_features(),
        k: fcm.k,
        group_names: groups
            .groups
            .iter()
            .map(|g| g.iter().map(|&a| names[a].clone()).collect())
            .collect(),
        groups: groups.groups,
        objective: state.objective,
        iterations: state.iterations,
        converged: state.converged,
    };
    ReportEnvelope::new("cluster", &config, payload).write(config.output.as_deref())
}

pub fn select(config: RunConfig) -> Result<(), Failure> {
    let fds = load(&config)?;
    let trace: SelectionTrace = fcssc(&fds, &selector(&config))?;
    ReportEnvelope::new("select", &config, trace).write(config.output.as_deref())
}

#[derive(Debug, Serialize)]
pub struct EvaluatePayload {
    pub n_samples: usize,
    pub n_features: usize,
    pub n_classes: usize,
    /// `per_fold` or `select_once`.
    pub selection_mode: &'static str,
    pub baseline: EvalReport,
    pub selected: EvalReport,
}

pub fn evaluate(config: RunConfig) -> Result<(), Failure> {
    if config.knn_k == 0 {
        return Err(Failure::usage(
            "invalid_config",
            "--knn-k must be at least 1",
        ));
    }
    let fds = load(&config)?;
    let plan = FoldPlan::new(fds.labels(), config.folds, config.seed, true)?;
    let knn = Knn { k: config.knn_k };
    let (mode, strategy) = if config.select_once {
        ("select_once", SubsetStrategy::SelectOnce(selector(&config)))
    } else {
        ("per_fold", SubsetStrategy::PerFold(selector(&config)))
    };
    let selected = cross_validate(&fds, &strategy, &plan, &knn)?;
    let baseline = cross_validate(&fds, &SubsetStrategy::AllFeatures, &plan, &knn)?;
    let payload = EvaluatePayload {
        n_samples: fds.n_samples(),
        n_features: fds.n_features(),
        n_classes: fds.n_classes(),
        selection_mode: mode,
        baseline,
        selected,
    };
    ReportEnvelope::new("evaluate", &config, payload).write(config.output.as_deref())
}
