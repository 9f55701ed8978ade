//! Evaluation harness: KNN classification, k-fold cross-validation,
//! classification metrics and Friedman / critical-difference statistics.

use std::time::Instant;

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::FuzzyDecisionSystem;
use crate::error::{FcsscError, Result};
use crate::selection::{fcssc, SelectorConfig};

pub const DEFAULT_FOLDS: usize = 10;
pub const DEFAULT_KNN_K: usize = 5;

/// Assignment of samples to cross-validation folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub assignments: Vec<usize>,
    pub seed: u64,
    pub stratified: bool,
}

impl FoldPlan {
    /// Shuffles samples with `seed` and deals them round-robin into `k`
    /// folds. When stratified, each class is shuffled and dealt in turn so
    /// every fold receives `floor` or `ceil` of its share of each class.
    pub fn new(labels: &[usize], k: usize, seed: u64, stratified: bool) -> Result<Self> {
        let n = labels.len();
        if k < 2 || k > n {
            return Err(FcsscError::InvalidConfig(format!(
                "fold count {k} must lie in [2, {n}]"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let order: Vec<usize> = if stratified {
            let n_classes = labels.iter().max().map_or(0, |&c| c + 1);
            let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
            for (i, &l) in labels.iter().enumerate() {
                by_class[l].push(i);
            }
            by_class
                .into_iter()
                .flat_map(|mut members| {
                    members.shuffle(&mut rng);
                    members
                })
                .collect()
        } else {
            let mut all: Vec<usize> = (0..n).collect();
            all.shuffle(&mut rng);
            all
        };
        let mut assignments = vec![0; n];
        for (pos, &i) in order.iter().enumerate() {
            assignments[i] = pos % k;
        }
        Ok(FoldPlan {
            k,
            assignments,
            seed,
            stratified,
        })
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] != fold)
            .collect()
    }
}

/// Majority label among the `k` nearest training rows (Euclidean). Distance
/// ties go to the lower sample index, vote ties to the smaller class id.
pub fn knn_predict(
    train: ArrayView2<f64>,
    labels: &[usize],
    query: ArrayView1<f64>,
    k: usize,
) -> usize {
    assert!(train.nrows() > 0, "empty training set");
    let mut dists: Vec<(f64, usize)> = train
        .rows()
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            let d: f64 = row
                .iter()
                .zip(query.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            (d, i)
        })
        .collect();
    dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let k = k.clamp(1, dists.len());
    let n_classes = labels.iter().max().map_or(0, |&c| c + 1);
    let mut votes = vec![0usize; n_classes];
    for &(_, i) in &dists[..k] {
        votes[labels[i]] += 1;
    }
    let mut best = 0;
    for c in 1..n_classes {
        if votes[c] > votes[best] {
            best = c;
        }
    }
    best
}

/// Supervised classifier used by [`cross_validate`].
pub trait Classifier: Sync {
    fn name(&self) -> String;

    fn predict(
        &self,
        train: ArrayView2<f64>,
        labels: &[usize],
        test: ArrayView2<f64>,
    ) -> Vec<usize>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Knn {
    pub k: usize,
}

impl Default for Knn {
    fn default() -> Self {
        Knn { k: DEFAULT_KNN_K }
    }
}

impl Classifier for Knn {
    fn name(&self) -> String {
        format!("knn(k={})", self.k)
    }

    fn predict(
        &self,
        train: ArrayView2<f64>,
        labels: &[usize],
        test: ArrayView2<f64>,
    ) -> Vec<usize> {
        test.rows()
            .into_iter()
            .map(|q| knn_predict(train, labels, q, self.k))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub f1: f64,
}

/// Accuracy plus macro-averaged precision and F1 over every class seen in
/// either vector. A class never predicted has precision 0.
pub fn metrics(predictions: &[usize], truths: &[usize]) -> Metrics {
    assert_eq!(predictions.len(), truths.len());
    assert!(!truths.is_empty());
    let n = truths.len();
    let correct = predictions
        .iter()
        .zip(truths)
        .filter(|(p, t)| p == t)
        .count();

    let mut classes: Vec<usize> = predictions.iter().chain(truths).copied().collect();
    classes.sort_unstable();
    classes.dedup();

    let (mut precision, mut f1) = (0.0, 0.0);
    for &c in &classes {
        let tp = predictions
            .iter()
            .zip(truths)
            .filter(|&(&p, &t)| p == c && t == c)
            .count() as f64;
        let predicted = predictions.iter().filter(|&&p| p == c).count() as f64;
        let actual = truths.iter().filter(|&&t| t == c).count() as f64;
        let p = if predicted > 0.0 { tp / predicted } else { 0.0 };
        let r = if actual > 0.0 { tp / actual } else { 0.0 };
        precision += p;
        f1 += if p + r > 0.0 {
            2.0 * p * r / (p + r)
        } else {
            0.0
        };
    }
    let c = classes.len() as f64;
    Metrics {
        accuracy: correct as f64 / n as f64,
        precision: precision / c,
        f1: f1 / c,
    }
}

/// Where each fold's feature subset comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "config")]
pub enum SubsetStrategy {
    AllFeatures,
    Fixed(Vec<usize>),
    /// Select on each training portion separately.
    PerFold(SelectorConfig),
    /// Select once on the full data, then cross-validate that subset.
    SelectOnce(SelectorConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        MeanStd {
            mean,
            std: var.sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub n_test: usize,
    pub selected: Vec<usize>,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub classifier: String,
    pub folds: Vec<FoldResult>,
    pub accuracy: MeanStd,
    pub precision: MeanStd,
    pub f1: MeanStd,
    pub n_selected: MeanStd,
    pub runtime_ms: f64,
    pub warnings: Vec<String>,
}

fn missing_class_folds(plan: &FoldPlan, labels: &[usize], n_classes: usize) -> Vec<usize> {
    (0..plan.k)
        .filter(|&f| {
            let mut seen = vec![false; n_classes];
            for i in plan.train_indices(f) {
                seen[labels[i]] = true;
            }
            seen.iter().any(|s| !s)
        })
        .collect()
}

/// k-fold cross-validation of a feature subset strategy.
///
/// With [`SubsetStrategy::PerFold`] the selector only ever sees the training
/// rows of the fold being evaluated. If an unstratified plan leaves a class
/// out of some training portion, the plan is rebuilt stratified.
pub fn cross_validate(
    fds: &FuzzyDecisionSystem,
    strategy: &SubsetStrategy,
    plan: &FoldPlan,
    classifier: &dyn Classifier,
) -> Result<EvalReport> {
    let start = Instant::now();
    let n = fds.n_samples();
    if plan.assignments.len() != n {
        return Err(FcsscError::InvalidConfig(format!(
            "fold plan covers {} samples, data has {n}",
            plan.assignments.len()
        )));
    }
    if plan.k > n {
        return Err(FcsscError::InvalidConfig(format!(
            "{} folds for {n} samples",
            plan.k
        )));
    }
    let labels = fds.labels();
    let mut warnings = Vec::new();
    let mut plan = plan.clone();

    let missing = missing_class_folds(&plan, labels, fds.n_classes());
    if !missing.is_empty() && !plan.stratified {
        let msg = format!(
            "class absent from training folds {missing:?}; falling back to stratified folds"
        );
        log::warn!("{msg}");
        warnings.push(msg);
        plan = FoldPlan::new(labels, plan.k, plan.seed, true)?;
    }
    let missing = missing_class_folds(&plan, labels, fds.n_classes());
    if !missing.is_empty() {
        let msg = format!("class absent from training folds {missing:?} even after stratification");
        log::warn!("{msg}");
        warnings.push(msg);
    }

    let global_subset: Option<Vec<usize>> = match strategy {
        SubsetStrategy::AllFeatures => Some((0..fds.n_features()).collect()),
        SubsetStrategy::Fixed(s) => {
            if s.is_empty() {
                return Err(FcsscError::EmptySubset);
            }
            fds.check_subset(s)?;
            Some(s.clone())
        }
        SubsetStrategy::SelectOnce(cfg) => Some(fcssc(fds, cfg)?.selected),
        SubsetStrategy::PerFold(cfg) => {
            cfg.validate(fds.n_features())?;
            None
        }
    };

    let folds: Vec<FoldResult> = (0..plan.k)
        .into_par_iter()
        .map(|fold| {
            let train = plan.train_indices(fold);
            let test = plan.test_indices(fold);
            let subset = match (&global_subset, strategy) {
                (Some(s), _) => s.clone(),
                (None, SubsetStrategy::PerFold(cfg)) => {
                    fcssc(&fds.select_rows(&train)?, cfg)?.selected
                }
                (None, _) => unreachable!("only per-fold selection defers the subset"),
            };
            let cols = fds.samples().select(Axis(1), &subset);
            let train_x: Array2<f64> = cols.select(Axis(0), &train);
            let test_x: Array2<f64> = cols.select(Axis(0), &test);
            let train_y: Vec<usize> = train.iter().map(|&i| labels[i]).collect();
            let truth: Vec<usize> = test.iter().map(|&i| labels[i]).collect();
            let pred = classifier.predict(train_x.view(), &train_y, test_x.view());
            Ok(FoldResult {
                fold,
                n_test: test.len(),
                selected: subset,
                metrics: metrics(&pred, &truth),
            })
        })
        .collect::<Result<_>>()?;

    let collect = |f: fn(&FoldResult) -> f64| MeanStd::of(&folds.iter().map(f).collect::<Vec<_>>());
    Ok(EvalReport {
        classifier: classifier.name(),
        accuracy: collect(|r| r.metrics.accuracy),
        precision: collect(|r| r.metrics.precision),
        f1: collect(|r| r.metrics.f1),
        n_selected: collect(|r| r.selected.len() as f64),
        folds,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        warnings,
    })
}

/// Per-dataset ranks of each method (rows: datasets, columns: methods).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTable {
    pub ranks: Vec<Vec<f64>>,
}

impl RankTable {
    pub fn n_datasets(&self) -> usize {
        self.ranks.len()
    }

    pub fn n_methods(&self) -> usize {
        self.ranks.first().map_or(0, Vec::len)
    }

    /// Mean rank of every method across datasets.
    pub fn average_ranks(&self) -> Vec<f64> {
        let n = self.n_datasets() as f64;
        (0..self.n_methods())
            .map(|j| self.ranks.iter().map(|row| row[j]).sum::<f64>() / n)
            .collect()
    }
}

/// Ranks methods within each dataset: highest score gets rank 1, ties share
/// the mean of the positions they occupy.
pub fn rank_methods(scores: &[Vec<f64>]) -> RankTable {
    let ranks = scores
        .iter()
        .map(|row| {
            let mut order: Vec<usize> = (0..row.len()).collect();
            order.sort_by(|&a, &b| row[b].total_cmp(&row[a]));
            let mut out = vec![0.0; row.len()];
            let mut pos = 0;
            while pos < order.len() {
                let mut end = pos + 1;
                while end < order.len() && row[order[end]] == row[order[pos]] {
                    end += 1;
                }
                // positions pos+1 ..= end share their average
                let mid = (pos + 1 + end) as f64 / 2.0;
                for &j in &order[pos..end] {
                    out[j] = mid;
                }
                pos = end;
            }
            out
        })
        .collect();
    RankTable { ranks }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FriedmanResult {
    pub n_datasets: usize,
    pub n_methods: usize,
    pub average_ranks: Vec<f64>,
    pub chi2: f64,
    pub f: f64,
}

/// Friedman chi-square statistic and its F-distributed refinement.
pub fn friedman(table: &RankTable) -> Result<FriedmanResult> {
    let (n, m) = (table.n_datasets(), table.n_methods());
    if n < 2 || m < 2 {
        return Err(FcsscError::InvalidConfig(format!(
            "Friedman test needs at least 2 datasets and 2 methods, got {n} x {m}"
        )));
    }
    if table.ranks.iter().any(|r| r.len() != m) {
        return Err(FcsscError::InvalidConfig(
            "rank table rows differ in length".into(),
        ));
    }
    let r = table.average_ranks();
    let (nf, mf) = (n as f64, m as f64);
    let sum_sq: f64 = r.iter().map(|x| x * x).sum();
    let chi2 = 12.0 * nf / (mf * (mf + 1.0)) * (sum_sq - mf * (mf + 1.0) * (mf + 1.0) / 4.0);
    let denom = nf * (mf - 1.0) - chi2;
    if denom.abs() < 1e-12 {
        return Err(FcsscError::DegenerateFriedman(denom));
    }
    Ok(FriedmanResult {
        n_datasets: n,
        n_methods: m,
        average_ranks: r,
        chi2,
        f: (nf - 1.0) * chi2 / denom,
    })
}

/// `CD = q_alpha * sqrt(m (m + 1) / (6 n))` for `m` methods on `n` datasets.
pub fn critical_difference(q_alpha: f64, n_methods: usize, n_datasets: usize) -> f64 {
    let (m, n) = (n_methods as f64, n_datasets as f64);
    q_alpha * (m * (m + 1.0) / (6.0 * n)).sqrt()
}
