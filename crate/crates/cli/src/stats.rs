use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use fcssc_core::evaluation::{critical_difference, friedman, rank_methods};
use serde::{Deserialize, Serialize};

use crate::args::StatsConfig;
use crate::report::{Failure, ReportEnvelope};

#[derive(Debug, Deserialize)]
struct Row {
    dataset: String,
    accuracy: f64,
}

#[derive(Debug, Serialize)]
pub struct StatsPayload {
    pub methods: Vec<String>,
    pub datasets: Vec<String>,
    /// `accuracies[d][j]`: method `j` on dataset `d`.
    pub accuracies: Vec<Vec<f64>>,
    pub ranks: Vec<Vec<f64>>,
    pub average_ranks: Vec<f64>,
    pub chi2: f64,
    pub chi2_df: usize,
    pub f: f64,
    pub f_df: (usize, usize),
    pub q_alpha: Option<f64>,
    pub critical_difference: Option<f64>,
}

fn read_method(path: &Path) -> Result<HashMap<String, f64>, Failure> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Failure::usage(
                "unreadable_file",
                format!("cannot read {}: {e}", path.display()),
            ),
            _ => Failure::data("malformed_csv", format!("{}: {e}", path.display())),
        })?;
    let mut out = HashMap::new();
    for row in reader.deserialize::<Row>() {
        let row =
            row.map_err(|e| Failure::data("malformed_csv", format!("{}: {e}", path.display())))?;
        if !row.accuracy.is_finite() {
            return Err(Failure::data(
                "malformed_csv",
                format!("{}: non-finite accuracy", path.display()),
            ));
        }
        if out.insert(row.dataset.clone(), row.accuracy).is_some() {
            return Err(Failure::data(
                "duplicate_dataset",
                format!("{}: dataset `{}` listed twice", path.display(), row.dataset),
            ));
        }
    }
    Ok(out)
}

pub fn build(config: &StatsConfig) -> Result<StatsPayload, Failure> {
    let mut methods = Vec::new();
    let mut tables = Vec::new();
    for path in &config.files {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .ok_or_else(|| {
                Failure::usage(
                    "invalid_config",
                    format!("no file name in {}", path.display()),
                )
            })?;
        if methods.contains(&name) {
            return Err(Failure::usage(
                "invalid_config",
                format!("method `{name}` given twice"),
            ));
        }
        methods.push(name);
        tables.push(read_method(path)?);
    }
    if methods.len() < 2 {
        return Err(Failure::usage(
            "invalid_config",
            "at least two methods are required",
        ));
    }

    let datasets: BTreeSet<&String> = tables[0].keys().collect();
    for (name, table) in methods.iter().zip(&tables).skip(1) {
        let other: BTreeSet<&String> = table.keys().collect();
        if other != datasets {
            let missing: Vec<_> = datasets.symmetric_difference(&other).collect();
            return Err(Failure::data(
                "inconsistent_datasets",
                format!(
                    "`{name}` and `{}` disagree on datasets {missing:?}",
                    methods[0]
                ),
            ));
        }
    }
    if datasets.len() < 2 {
        return Err(Failure::usage(
            "invalid_config",
            "at least two datasets are required",
        ));
    }

    let datasets: Vec<String> = datasets.into_iter().cloned().collect();
    let accuracies: Vec<Vec<f64>> = datasets
        .iter()
        .map(|d| tables.iter().map(|t| t[d]).collect())
        .collect();
    let table = rank_methods(&accuracies);
    let result = friedman(&table)?;
    let (n, m) = (datasets.len(), methods.len());
    if let Some(q) = config.q_alpha {
        if !(q.is_finite() && q > 0.0) {
            return Err(Failure::usage(
                "invalid_config",
                format!("--q-alpha must be positive, got {q}"),
            ));
        }
    }
    Ok(StatsPayload {
        critical_difference: config.q_alpha.map(|q| critical_difference(q, m, n)),
        q_alpha: config.q_alpha,
        methods,
        datasets,
        accuracies,
        average_ranks: result.average_ranks,
        ranks: table.ranks,
        chi2: result.chi2,
        chi2_df: m - 1,
        f: result.f,
        f_df: (m - 1, (m - 1) * (n - 1)),
    })
}

pub fn run(config: StatsConfig) -> Result<(), Failure> {
    let payload = build(&config)?;
    ReportEnvelope::new("stats", &config, payload).write(config.output.as_deref())
}
