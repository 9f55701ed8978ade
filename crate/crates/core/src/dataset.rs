//! Tabular ingestion: CSV loading, mode imputation, min-max normalization
//! and the decision-class partition.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::hash::Hash;
use std::io::Read;
use std::path::Path;

use ndarray::{Array2, ArrayView1, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{FcsscError, Result};

/// A single parsed cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Number(f64),
    Token(String),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Number(v) => write!(f, "{v}"),
            Cell::Token(s) => f.write_str(s),
        }
    }
}

impl Cell {
    fn parse(raw: &str) -> Option<Cell> {
        let raw = raw.trim();
        if raw.is_empty() {
            return None;
        }
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => Some(Cell::Number(v)),
            _ => Some(Cell::Token(raw.to_string())),
        }
    }
}

/// How the label column is identified.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LabelColumn {
    Index(usize),
    Name(String),
    /// The rightmost column.
    Last,
}

impl LabelColumn {
    /// Interprets a command-line token: a header name when one matches,
    /// otherwise a zero-based index.
    pub fn parse(token: &str) -> LabelColumn {
        match token.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(token.to_string()),
        }
    }

    fn resolve(&self, names: &[String]) -> Result<usize> {
        match self {
            LabelColumn::Name(name) => names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| FcsscError::MissingLabelColumn(name.clone())),
            LabelColumn::Last => names.len().checked_sub(1).ok_or(FcsscError::NoRows),
            LabelColumn::Index(i) => {
                // a numeric token may also be a literal header name
                if let Some(pos) = names.iter().position(|n| *n == i.to_string()) {
                    return Ok(pos);
                }
                if *i < names.len() {
                    Ok(*i)
                } else {
                    Err(FcsscError::MissingLabelColumn(i.to_string()))
                }
            }
        }
    }
}

/// Pre-imputation container. `None` marks a missing cell.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub rows: Vec<Vec<Option<Cell>>>,
    pub column_names: Vec<String>,
    pub label_column: usize,
}

impl RawTable {
    pub fn new(
        rows: Vec<Vec<Option<Cell>>>,
        column_names: Vec<String>,
        label_column: usize,
    ) -> Result<Self> {
        let width = column_names.len();
        if label_column >= width {
            return Err(FcsscError::MissingLabelColumn(label_column.to_string()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(FcsscError::RaggedRows {
                    line: i + 1,
                    expected: width,
                    found: row.len(),
                });
            }
        }
        Ok(RawTable {
            rows,
            column_names,
            label_column,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_columns(&self) -> usize {
        self.column_names.len()
    }

    pub fn missing_count(&self) -> usize {
        self.rows.iter().flatten().filter(|c| c.is_none()).count()
    }

    fn feature_columns(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_columns()).filter(move |&c| c != self.label_column)
    }

    fn is_numeric_column(&self, col: usize) -> bool {
        self.rows
            .iter()
            .all(|r| !matches!(r[col], Some(Cell::Token(_))))
    }
}

/// Loads a comma-delimited file. Empty fields are recorded as missing.
pub fn load_csv(path: impl AsRef<Path>, label: &LabelColumn, has_header: bool) -> Result<RawTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| FcsscError::Unreadable {
        path: path.to_path_buf(),
        source,
    })?;
    load_csv_from_reader(file, label, has_header)
}

pub fn load_csv_from_reader<R: Read>(
    reader: R,
    label: &LabelColumn,
    has_header: bool,
) -> Result<RawTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);

    let mut records = rdr.records();
    let mut header: Option<Vec<String>> = None;
    let mut rows: Vec<Vec<Option<Cell>>> = Vec::new();
    let mut width: Option<usize> = None;
    let mut line = 0usize;

    if has_header {
        if let Some(rec) = records.next() {
            let rec = rec?;
            line += 1;
            let names: Vec<String> = rec.iter().map(|s| s.trim().to_string()).collect();
            width = Some(names.len());
            header = Some(names);
        }
    }

    for rec in records {
        let rec = rec?;
        line += 1;
        // skip fully blank lines
        if rec.len() == 1 && rec[0].trim().is_empty() {
            continue;
        }
        let expected = *width.get_or_insert(rec.len());
        if rec.len() != expected {
            return Err(FcsscError::RaggedRows {
                line,
                expected,
                found: rec.len(),
            });
        }
        rows.push(rec.iter().map(Cell::parse).collect());
    }

    let width = width.unwrap_or(0);
    let names = header.unwrap_or_else(|| (0..width).map(|i| format!("col{i}")).collect());
    let label_column = label.resolve(&names)?;
    RawTable::new(rows, names, label_column)
}

/// Replaces each missing feature cell by its column mode. Numeric ties go to
/// the smallest value, categorical ties to the earliest-seen token. The label
/// column is left untouched.
pub fn impute_missing(table: &RawTable) -> Result<RawTable> {
    let mut out = table.clone();
    for col in table.feature_columns() {
        if table.rows.iter().all(|r| r[col].is_some()) {
            continue;
        }
        let fill = column_mode(table, col)
            .ok_or_else(|| FcsscError::EmptyColumn(table.column_names[col].clone()))?;
        for row in &mut out.rows {
            if row[col].is_none() {
                row[col] = Some(fill.clone());
            }
        }
    }
    Ok(out)
}

fn column_mode(table: &RawTable, col: usize) -> Option<Cell> {
    if table.is_numeric_column(col) {
        let mut values: Vec<f64> = table
            .rows
            .iter()
            .filter_map(|r| match r[col] {
                Some(Cell::Number(v)) => Some(v),
                _ => None,
            })
            .collect();
        values.sort_by(f64::total_cmp);
        let mut best: Option<(f64, usize)> = None;
        for run in values.chunk_by(|a, b| a == b) {
            // ascending order means strict `>` keeps the smallest tied value
            if best.is_none_or(|(_, n)| run.len() > n) {
                best = Some((run[0], run.len()));
            }
        }
        best.map(|(v, _)| Cell::Number(v))
    } else {
        let mut counts: HashMap<String, (usize, usize)> = HashMap::new();
        for (i, cell) in table
            .rows
            .iter()
            .filter_map(|r| r[col].as_ref())
            .enumerate()
        {
            counts.entry(cell.to_string()).or_insert((0, i)).0 += 1;
        }
        counts
            .into_iter()
            .max_by(|a, b| a.1 .0.cmp(&b.1 .0).then(b.1 .1.cmp(&a.1 .1)))
            .map(|(tok, _)| Cell::Token(tok))
    }
}

/// Groups sample indices by label, one group per distinct label in order of
/// first occurrence.
pub fn class_partition<L: Eq + Hash + Clone>(labels: &[L]) -> Vec<Vec<usize>> {
    let mut index: HashMap<L, usize> = HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, l) in labels.iter().enumerate() {
        let g = *index.entry(l.clone()).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }
    groups
}

/// Normalized samples with their decision-class partition.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyDecisionSystem {
    samples: Array2<f64>,
    feature_names: Vec<String>,
    labels: Vec<usize>,
    class_names: Vec<String>,
    classes: Vec<Vec<usize>>,
}

impl FuzzyDecisionSystem {
    /// Builds a system from an already-normalized matrix. Class ids are
    /// assigned by first occurrence of each label.
    pub fn new<L: Eq + Hash + Clone + ToString>(
        samples: Array2<f64>,
        feature_names: Vec<String>,
        labels: &[L],
    ) -> Result<Self> {
        let (n, m) = samples.dim();
        if n == 0 {
            return Err(FcsscError::NoRows);
        }
        if m == 0 {
            return Err(FcsscError::InvalidConfig(
                "at least one feature is required".into(),
            ));
        }
        if labels.len() != n {
            return Err(FcsscError::InvalidConfig(format!(
                "{} labels for {n} samples",
                labels.len()
            )));
        }
        if feature_names.len() != m {
            return Err(FcsscError::InvalidConfig(format!(
                "{} feature names for {m} features",
                feature_names.len()
            )));
        }
        if let Some(v) = samples.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(FcsscError::InvalidConfig(format!(
                "sample value {v} outside [0, 1]"
            )));
        }
        let classes = class_partition(labels);
        let mut ids = vec![0usize; n];
        let mut class_names = Vec::with_capacity(classes.len());
        for (c, group) in classes.iter().enumerate() {
            class_names.push(labels[group[0]].to_string());
            for &i in group {
                ids[i] = c;
            }
        }
        Ok(FuzzyDecisionSystem {
            samples,
            feature_names,
            labels: ids,
            class_names,
            classes,
        })
    }

    pub fn samples(&self) -> &Array2<f64> {
        &self.samples
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Class id of each sample (index into [`classes`](Self::classes)).
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn n_samples(&self) -> usize {
        self.samples.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.samples.ncols()
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn column(&self, feature: usize) -> ArrayView1<'_, f64> {
        self.samples.column(feature)
    }

    pub fn check_subset(&self, subset: &[usize]) -> Result<()> {
        let m = self.n_features();
        match subset.iter().find(|&&a| a >= m) {
            Some(&index) => Err(FcsscError::FeatureOutOfRange { index, features: m }),
            None => Ok(()),
        }
    }

    /// Restriction to the given rows; the class partition is rebuilt over the
    /// retained samples.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        let samples = self.samples.select(Axis(0), rows);
        let labels: Vec<&str> = rows
            .iter()
            .map(|&r| self.class_names[self.labels[r]].as_str())
            .collect();
        FuzzyDecisionSystem::new(samples, self.feature_names.clone(), &labels)
    }
}

/// Min-max scales every feature column into [0, 1] and partitions samples by
/// the label column. Constant columns map to zero; categorical columns are
/// integer-coded by first occurrence before scaling.
pub fn normalize_min_max(table: &RawTable) -> Result<FuzzyDecisionSystem> {
    let n = table.n_rows();
    if n == 0 {
        return Err(FcsscError::NoRows);
    }
    let features: Vec<usize> = table.feature_columns().collect();
    let mut samples = Array2::<f64>::zeros((n, features.len()));

    for (j, &col) in features.iter().enumerate() {
        let raw = column_values(table, col)?;
        let (lo, hi) = raw
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        let span = hi - lo;
        for (i, v) in raw.into_iter().enumerate() {
            samples[[i, j]] = if span > 0.0 { (v - lo) / span } else { 0.0 };
        }
    }

    let mut labels = Vec::with_capacity(n);
    for (row, r) in table.rows.iter().enumerate() {
        match &r[table.label_column] {
            Some(cell) => labels.push(cell.to_string()),
            None => {
                return Err(FcsscError::MissingValue {
                    row,
                    column: table.column_names[table.label_column].clone(),
                })
            }
        }
    }
    let names = features
        .iter()
        .map(|&c| table.column_names[c].clone())
        .collect();
    FuzzyDecisionSystem::new(samples, names, &labels)
}

fn column_values(table: &RawTable, col: usize) -> Result<Vec<f64>> {
    let numeric = table.is_numeric_column(col);
    let mut codes: HashMap<String, usize> = HashMap::new();
    let mut out = Vec::with_capacity(table.n_rows());
    for (row, r) in table.rows.iter().enumerate() {
        let cell = r[col].as_ref().ok_or_else(|| FcsscError::MissingValue {
            row,
            column: table.column_names[col].clone(),
        })?;
        let v = match (numeric, cell) {
            (true, Cell::Number(v)) => *v,
            _ => {
                let next = codes.len();
                *codes.entry(cell.to_string()).or_insert(next) as f64
            }
        };
        out.push(v);
    }
    Ok(out)
}
