//! Labeled tabular data: CSV ingestion, min-max normalization, server/client
//! partitioning, stratified train/test splitting and t-statistic feature
//! selection.
//!
//! All sampling goes through [`crate::seed`], so every function here is a
//! pure function of its inputs and seed.

use std::fmt;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seed;

/// Binary class label. `Positive` is the class counted as a true positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Class {
    Negative,
    Positive,
}

impl Class {
    pub const ALL: [Class; 2] = [Class::Negative, Class::Positive];

    pub fn index(self) -> usize {
        match self {
            Class::Negative => 0,
            Class::Positive => 1,
        }
    }

    pub fn from_index(i: usize) -> Option<Class> {
        match i {
            0 => Some(Class::Negative),
            1 => Some(Class::Positive),
            _ => None,
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed csv at row {row}: {source}")]
    Csv {
        row: usize,
        #[source]
        source: csv::Error,
    },
    #[error("empty file: no header row")]
    EmptyFile,
    #[error("no data rows after the header")]
    NoRows,
    #[error("at least one feature column is required")]
    NoFeatures,
    #[error("row {row} has {found} columns, expected {expected}")]
    RaggedRow { row: usize, expected: usize, found: usize },
    #[error("non-numeric value {value:?} at row {row}, column {column:?}")]
    NonNumeric { row: usize, column: String, value: String },
    #[error("non-finite value at row {row}, column {column:?}")]
    NonFinite { row: usize, column: String },
    #[error("label outside {{0,1}} at row {row}: {value:?}")]
    LabelOutOfRange { row: usize, value: String },
    #[error("label column {0:?} not found in header")]
    UnknownLabelColumn(String),
    #[error("dimension mismatch: expected {expected} features, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("labels ({labels}) and feature rows ({rows}) disagree")]
    LengthMismatch { rows: usize, labels: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("class {class} has {rows} rows, need at least {required}")]
    ClassTooSmall { class: Class, rows: usize, required: usize },
    #[error("both classes must be present")]
    SingleClass,
    #[error("malformed partition manifest at line {line}: {reason}")]
    Manifest { line: usize, reason: String },
}

pub type Result<T, E = DatasetError> = std::result::Result<T, E>;

/// An `n × d` matrix of finite reals with one binary label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    values: Vec<f64>,
    dim: usize,
    labels: Vec<Class>,
    feature_names: Vec<String>,
}

impl LabeledDataset {
    /// Builds a dataset from row vectors, checking shape and finiteness.
    pub fn new(feature_names: Vec<String>, rows: Vec<Vec<f64>>, labels: Vec<Class>) -> Result<Self> {
        let dim = feature_names.len();
        if dim == 0 {
            return Err(DatasetError::NoFeatures);
        }
        if rows.is_empty() {
            return Err(DatasetError::NoRows);
        }
        if rows.len() != labels.len() {
            return Err(DatasetError::LengthMismatch { rows: rows.len(), labels: labels.len() });
        }
        let mut values = Vec::with_capacity(rows.len() * dim);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(DatasetError::RaggedRow { row: r + 1, expected: dim, found: row.len() });
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(DatasetError::NonFinite { row: r + 1, column: feature_names[j].clone() });
            }
            values.extend_from_slice(row);
        }
        Ok(Self { values, dim, labels, feature_names })
    }

    /// Convenience constructor with generated column names `x0, x1, ...`.
    pub fn from_rows(rows: Vec<Vec<f64>>, labels: Vec<Class>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        let names = (0..dim).map(|j| format!("x{j}")).collect();
        Self::new(names, rows, labels)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn labels(&self) -> &[Class] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> Class {
        self.labels[i]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.dim)
    }

    /// Rows paired with their labels, in storage order.
    pub fn samples(&self) -> impl ExactSizeIterator<Item = (&[f64], Class)> + '_ {
        self.rows().zip(self.labels.iter().copied())
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let mut counts = [0; 2];
        for l in &self.labels {
            counts[l.index()] += 1;
        }
        counts
    }

    /// Row indices of `class`, ascending.
    pub fn class_rows(&self, class: Class) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.labels[i] == class).collect()
    }

    /// Copies the given rows, in the given order. The result may be empty.
    ///
    /// Panics if an index is out of range.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut values = Vec::with_capacity(indices.len() * self.dim);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            values.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Self { values, dim: self.dim, labels, feature_names: self.feature_names.clone() }
    }

    /// Keeps the given feature columns, in the given order.
    pub fn select_columns(&self, columns: &[usize]) -> Self {
        let mut values = Vec::with_capacity(self.len() * columns.len());
        for row in self.rows() {
            values.extend(columns.iter().map(|&j| row[j]));
        }
        Self {
            values,
            dim: columns.len(),
            labels: self.labels.clone(),
            feature_names: columns.iter().map(|&j| self.feature_names[j].clone()).collect(),
        }
    }

    fn map_values(&self, mut f: impl FnMut(usize, f64) -> f64) -> Self {
        let dim = self.dim;
        let values = self.values.iter().enumerate().map(|(k, &v)| f(k % dim, v)).collect();
        Self { values, dim, labels: self.labels.clone(), feature_names: self.feature_names.clone() }
    }
}

/// Which CSV column holds the class label.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum LabelColumn {
    #[default]
    Last,
    Index(usize),
    Name(String),
}

impl FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    /// `last`, a zero-based column index, or a header name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(if s.eq_ignore_ascii_case("last") {
            LabelColumn::Last
        } else if let Ok(i) = s.parse() {
            LabelColumn::Index(i)
        } else {
            LabelColumn::Name(s.to_string())
        })
    }
}

/// Loads a headered numeric CSV file.
pub fn load_csv(path: impl AsRef<Path>, label: &LabelColumn) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| DatasetError::Io { path: path.to_path_buf(), source })?;
    read_csv(file, label)
}

/// Parses a headered numeric CSV stream. Rows are numbered from 1, not
/// counting the header.
pub fn read_csv<R: Read>(reader: R, label: &LabelColumn) -> Result<LabeledDataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(reader);
    let mut records = rdr.records();
    let header = match records.next() {
        None => return Err(DatasetError::EmptyFile),
        Some(rec) => rec.map_err(|source| DatasetError::Csv { row: 0, source })?,
    };
    let header: Vec<String> = header.iter().map(|h| h.trim().to_string()).collect();
    if header.len() < 2 {
        return Err(DatasetError::NoFeatures);
    }
    let label_idx = match label {
        LabelColumn::Last => header.len() - 1,
        LabelColumn::Index(i) if *i < header.len() => *i,
        LabelColumn::Index(i) => return Err(DatasetError::UnknownLabelColumn(i.to_string())),
        LabelColumn::Name(name) => header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DatasetError::UnknownLabelColumn(name.clone()))?,
    };
    let names: Vec<String> =
        header.iter().enumerate().filter(|&(j, _)| j != label_idx).map(|(_, h)| h.clone()).collect();

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (r, rec) in records.enumerate() {
        let row_no = r + 1;
        let rec = rec.map_err(|source| DatasetError::Csv { row: row_no, source })?;
        if rec.len() == 1 && rec.get(0).is_some_and(|s| s.trim().is_empty()) {
            continue;
        }
        if rec.len() != header.len() {
            return Err(DatasetError::RaggedRow { row: row_no, expected: header.len(), found: rec.len() });
        }
        let mut row = Vec::with_capacity(names.len());
        for (j, cell) in rec.iter().enumerate() {
            let cell = cell.trim();
            let value: f64 = cell.parse().map_err(|_| DatasetError::NonNumeric {
                row: row_no,
                column: header[j].clone(),
                value: cell.to_string(),
            })?;
            if !value.is_finite() {
                return Err(DatasetError::NonFinite { row: row_no, column: header[j].clone() });
            }
            if j == label_idx {
                let class = if value == 0.0 {
                    Class::Negative
                } else if value == 1.0 {
                    Class::Positive
                } else {
                    return Err(DatasetError::LabelOutOfRange { row: row_no, value: cell.to_string() });
                };
                labels.push(class);
            } else {
                row.push(value);
            }
        }
        rows.push(row);
    }
    LabeledDataset::new(names, rows, labels)
}

/// Writes `ds` as CSV with the label as the last column. Values use the
/// shortest representation that parses back to the same `f64`.
pub fn write_csv(ds: &LabeledDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let werr = |source| DatasetError::Write { path: path.to_path_buf(), source };
    let mut w = csv::Writer::from_path(path).map_err(|e| werr(e.into()))?;
    let mut header = ds.feature_names().to_vec();
    header.push("class".to_string());
    w.write_record(&header).map_err(|e| werr(e.into()))?;
    for (row, label) in ds.samples() {
        let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        rec.push(label.to_string());
        w.write_record(&rec).map_err(|e| werr(e.into()))?;
    }
    w.flush().map_err(werr)
}

/// Column-wise minimum and maximum of a training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationParams {
    min: Vec<f64>,
    max: Vec<f64>,
}

impl NormalizationParams {
    pub fn new(min: Vec<f64>, max: Vec<f64>) -> Result<Self> {
        if min.len() != max.len() {
            return Err(DatasetError::DimensionMismatch { expected: min.len(), found: max.len() });
        }
        if min.iter().zip(&max).any(|(lo, hi)| !(lo <= hi)) {
            return Err(DatasetError::InvalidParameter("min must not exceed max".into()));
        }
        Ok(Self { min, max })
    }

    pub fn fit(train: &LabeledDataset) -> Self {
        let mut min = train.row(0).to_vec();
        let mut max = min.clone();
        for row in train.rows().skip(1) {
            for (j, &v) in row.iter().enumerate() {
                min[j] = min[j].min(v);
                max[j] = max[j].max(v);
            }
        }
        Self { min, max }
    }

    pub fn min(&self) -> &[f64] {
        &self.min
    }

    pub fn max(&self) -> &[f64] {
        &self.max
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    fn scale(&self, j: usize, v: f64) -> f64 {
        let range = self.max[j] - self.min[j];
        if range > 0.0 {
            ((v - self.min[j]) / range).clamp(0.0, 1.0)
        } else {
            0.0
        }
    }

    /// Maps each value to `(x - min) / (max - min)` clamped to `[0, 1]`.
    /// Constant columns map to `0.0`.
    pub fn apply(&self, data: &LabeledDataset) -> Result<LabeledDataset> {
        if data.dim() != self.dim() {
            return Err(DatasetError::DimensionMismatch { expected: self.dim(), found: data.dim() });
        }
        Ok(data.map_values(|j, v| self.scale(j, v)))
    }

    pub fn apply_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(DatasetError::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        Ok(x.iter().enumerate().map(|(j, &v)| self.scale(j, v)).collect())
    }
}

/// How non-server rows are dealt to clients.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShardingMode {
    /// One shuffle of the pooled rows, cut into near-equal shards.
    #[default]
    SimpleRandom,
    /// Per-class shuffles dealt round-robin, so every client gets the
    /// global class ratio within one row.
    Stratified,
}

impl fmt::Display for ShardingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShardingMode::SimpleRandom => "simple-random",
            ShardingMode::Stratified => "stratified",
        })
    }
}

impl FromStr for ShardingMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "simple-random" => Ok(ShardingMode::SimpleRandom),
            "stratified" => Ok(ShardingMode::Stratified),
            other => Err(format!("unknown sharding mode {other:?} (expected simple-random or stratified)")),
        }
    }
}

/// Assignment of dataset rows to the server reserve and `K` clients.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionPlan {
    pub seed: u64,
    pub b_percent: f64,
    pub sharding: ShardingMode,
    pub server_rows: Vec<usize>,
    pub client_rows: Vec<Vec<usize>>,
}

impl PartitionPlan {
    pub fn num_clients(&self) -> usize {
        self.client_rows.len()
    }

    /// Text manifest: `key=value` header lines, then one shard per line
    /// with comma-separated row indices.
    pub fn to_manifest(&self) -> String {
        let join = |rows: &[usize]| rows.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        let mut out = String::from("# fedpnn partition manifest v1\n");
        out.push_str(&format!("seed={}\n", self.seed));
        out.push_str(&format!("b_percent={}\n", self.b_percent));
        out.push_str(&format!("sharding={}\n", self.sharding));
        out.push_str(&format!("server={}\n", join(&self.server_rows)));
        for (k, rows) in self.client_rows.iter().enumerate() {
            out.push_str(&format!("client_{k}={}\n", join(rows)));
        }
        out
    }

    pub fn from_manifest(text: &str) -> Result<Self> {
        let mut seed = None;
        let mut b_percent = None;
        let mut sharding = ShardingMode::default();
        let mut server_rows = None;
        let mut client_rows: Vec<Vec<usize>> = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            let bad = |reason: String| DatasetError::Manifest { line: line_no, reason };
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key=value".into()))?;
            let indices = |v: &str| -> Result<Vec<usize>> {
                if v.is_empty() {
                    return Ok(Vec::new());
                }
                v.split(',').map(|s| s.trim().parse().map_err(|_| bad(format!("bad row index {s:?}")))).collect()
            };
            match key {
                "seed" => seed = Some(value.parse().map_err(|_| bad("bad seed".into()))?),
                "b_percent" => b_percent = Some(value.parse().map_err(|_| bad("bad b_percent".into()))?),
                "sharding" => sharding = value.parse().map_err(bad)?,
                "server" => server_rows = Some(indices(value)?),
                k if k.starts_with("client_") => {
                    let id: usize = k["client_".len()..].parse().map_err(|_| bad(format!("bad shard key {k:?}")))?;
                    if id != client_rows.len() {
                        return Err(bad(format!("expected client_{}, found {k}", client_rows.len())));
                    }
                    client_rows.push(indices(value)?);
                }
                other => return Err(bad(format!("unknown key {other:?}"))),
            }
        }
        let missing = |what: &str| DatasetError::Manifest { line: 0, reason: format!("missing {what}") };
        Ok(Self {
            seed: seed.ok_or_else(|| missing("seed"))?,
            b_percent: b_percent.ok_or_else(|| missing("b_percent"))?,
            sharding,
            server_rows: server_rows.ok_or_else(|| missing("server"))?,
            client_rows,
        })
    }
}

/// Splits `total` into per-class quotas proportional to `counts` using the
/// largest-remainder rule. Ties go to the lower class index.
fn proportional_quotas(counts: [usize; 2], fraction: f64, total: usize) -> [usize; 2] {
    let exact = counts.map(|c| c as f64 * fraction);
    let mut quota = exact.map(|e| e.floor() as usize);
    let mut order = [0usize, 1];
    order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())).then(a.cmp(&b)));
    let mut left = total.saturating_sub(quota[0] + quota[1]);
    for &c in order.iter().cycle().take(4) {
        if left == 0 {
            break;
        }
        if quota[c] < counts[c] {
            quota[c] += 1;
            left -= 1;
        }
    }
    quota
}

/// Reserves a stratified `b_percent` sample for the server and deals the
/// remaining rows to `num_clients` shards whose sizes differ by at most one.
pub fn partition(
    ds: &LabeledDataset,
    num_clients: usize,
    b_percent: f64,
    seed: u64,
    sharding: ShardingMode,
) -> Result<PartitionPlan> {
    if num_clients == 0 {
        return Err(DatasetError::InvalidParameter("client count must be at least 1".into()));
    }
    if !(b_percent > 0.0 && b_percent < 100.0) {
        return Err(DatasetError::InvalidParameter(format!("b_percent must lie in (0, 100), got {b_percent}")));
    }
    let counts = ds.class_counts();
    for class in Class::ALL {
        if counts[class.index()] < num_clients + 1 {
            return Err(DatasetError::ClassTooSmall { class, rows: counts[class.index()], required: num_clients + 1 });
        }
    }
    let fraction = b_percent / 100.0;
    let server_total = (ds.len() as f64 * fraction).round() as usize;
    let quota = proportional_quotas(counts, fraction, server_total);

    let mut rng = seed::rng(seed::derive(seed, seed::stream::PARTITION, 0));
    let mut server_rows = Vec::with_capacity(server_total);
    let mut remaining: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for class in Class::ALL {
        let mut rows = ds.class_rows(class);
        rows.shuffle(&mut rng);
        let rest = rows.split_off(quota[class.index()]);
        server_rows.extend(rows);
        remaining[class.index()] = rest;
    }
    server_rows.sort_unstable();

    let mut client_rows = vec![Vec::new(); num_clients];
    match sharding {
        ShardingMode::SimpleRandom => {
            let mut pool: Vec<usize> = remaining.concat();
            pool.sort_unstable();
            pool.shuffle(&mut rng);
            let base = pool.len() / num_clients;
            let extra = pool.len() % num_clients;
            let mut it = pool.into_iter();
            for (k, shard) in client_rows.iter_mut().enumerate() {
                let size = base + usize::from(k < extra);
                shard.extend(it.by_ref().take(size));
            }
        }
        ShardingMode::Stratified => {
            for (i, row) in remaining.concat().into_iter().enumerate() {
                client_rows[i % num_clients].push(row);
            }
        }
    }
    for shard in &mut client_rows {
        shard.sort_unstable();
    }
    Ok(PartitionPlan { seed, b_percent, sharding, server_rows, client_rows })
}

/// Stratified train/test split returning row indices. Both index lists are
/// in shuffled order.
pub fn stratified_split_indices(ds: &LabeledDataset, train_frac: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_frac > 0.0 && train_frac < 1.0) {
        return Err(DatasetError::InvalidParameter(format!("train fraction must lie in (0, 1), got {train_frac}")));
    }
    let mut rng = seed::rng(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in Class::ALL {
        let mut rows = ds.class_rows(class);
        if rows.len() < 2 {
            return Err(DatasetError::ClassTooSmall { class, rows: rows.len(), required: 2 });
        }
        let n_train = ((rows.len() as f64 * train_frac).round() as usize).clamp(1, rows.len() - 1);
        rows.shuffle(&mut rng);
        test.extend(rows.split_off(n_train));
        train.extend(rows);
    }
    train.shuffle(&mut rng);
    test.shuffle(&mut rng);
    Ok((train, test))
}

/// Stratified train/test split: per-class proportions match the input
/// within one row, and the two halves partition the input.
pub fn stratified_split(ds: &LabeledDataset, train_frac: f64, seed: u64) -> Result<(LabeledDataset, LabeledDataset)> {
    let (train, test) = stratified_split_indices(ds, train_frac, seed)?;
    Ok((ds.select_rows(&train), ds.select_rows(&test)))
}

fn mean_and_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
    (mean, ss / (n - 1.0))
}

/// Welch two-sample t-statistic (positive minus negative class) for every
/// feature. A feature with zero variance in both classes scores 0.
pub fn t_statistics(ds: &LabeledDataset) -> Result<Vec<f64>> {
    let counts = ds.class_counts();
    if counts.contains(&0) {
        return Err(DatasetError::SingleClass);
    }
    let neg = ds.class_rows(Class::Negative);
    let pos = ds.class_rows(Class::Positive);
    let stats = (0..ds.dim())
        .map(|j| {
            let a: Vec<f64> = pos.iter().map(|&i| ds.row(i)[j]).collect();
            let b: Vec<f64> = neg.iter().map(|&i| ds.row(i)[j]).collect();
            let (ma, va) = mean_and_var(&a);
            let (mb, vb) = mean_and_var(&b);
            let se = (va / a.len() as f64 + vb / b.len() as f64).sqrt();
            if se > 0.0 {
                (ma - mb) / se
            } else {
                0.0
            }
        })
        .collect();
    Ok(stats)
}

/// Keeps the `k` features with the largest absolute t-statistic, in their
/// original column order. Ties favour the lower column index.
pub fn select_features_tstat(ds: &LabeledDataset, k: usize) -> Result<LabeledDataset> {
    if k == 0 || k > ds.dim() {
        return Err(DatasetError::InvalidParameter(format!("k must lie in 1..={}, got {k}", ds.dim())));
    }
    let stats = t_statistics(ds)?;
    let mut ranked: Vec<usize> = (0..ds.dim()).collect();
    ranked.sort_by(|&a, &b| stats[b].abs().total_cmp(&stats[a].abs()).then(a.cmp(&b)));
    let mut keep = ranked[..k].to_vec();
    keep.sort_unstable();
    Ok(ds.select_columns(&keep))
}
