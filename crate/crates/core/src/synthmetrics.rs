//! Quality scores for synthetic tables and the confusion-count "AUC".
//!
//! * KSComplement: `1 - sup_x |F_real(x) - F_synth(x)|` per column, computed
//!   exactly over the merged support of the two empirical CDFs.
//! * CStest: for every unordered feature pair, `1 - |S - R| / 2` where `S`
//!   and `R` are the Pearson correlations on the synthetic and real tables,
//!   averaged over all pairs.
//! * [`auc_from_counts`]: balanced accuracy, `(sensitivity + specificity) / 2`
//!   over hard predictions. It is called AUC throughout the crate but it is
//!   not the area under a ROC curve.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::dataset::{Class, LabeledDataset};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("empty column")]
    EmptyColumn,
    #[error("non-finite value in column")]
    NonFinite,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("correlation needs at least two observations")]
    TooShort,
    #[error("correlation is undefined for a constant column")]
    ConstantColumn,
    #[error("column {0:?} missing from the synthetic table")]
    MissingColumn(String),
    #[error("column {0:?} present only in the synthetic table")]
    ExtraColumn(String),
    #[error("correlation similarity needs at least two feature columns, found {0}")]
    TooFewColumns(usize),
    #[error("no feature pair has a defined correlation in both tables")]
    NoComparablePairs,
    #[error("{0} is zero; sensitivity or specificity is undefined")]
    ZeroDenominator(&'static str),
}

fn check_column(xs: &[f64]) -> Result<(), MetricsError> {
    if xs.is_empty() {
        return Err(MetricsError::EmptyColumn);
    }
    if xs.iter().any(|v| !v.is_finite()) {
        return Err(MetricsError::NonFinite);
    }
    Ok(())
}

/// Two-sample Kolmogorov–Smirnov statistic `sup_x |F_a(x) - F_b(x)|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> Result<f64, MetricsError> {
    check_column(a)?;
    check_column(b)?;
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut sup: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        // step both CDFs past every copy of x before comparing
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        sup = sup.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(sup)
}

pub fn ks_complement(real: &[f64], synth: &[f64]) -> Result<f64, MetricsError> {
    Ok(1.0 - ks_statistic(real, synth)?)
}

/// Sample Pearson correlation.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64, MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(MetricsError::TooShort);
    }
    check_column(a)?;
    check_column(b)?;
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(MetricsError::ConstantColumn);
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// `1 - |synth_corr - real_corr| / 2`.
pub fn correlation_similarity(real_corr: f64, synth_corr: f64) -> f64 {
    1.0 - (synth_corr - real_corr).abs() / 2.0
}

/// Balanced accuracy with class 1 as the positive class.
pub fn auc_from_counts(tp: u64, fn_: u64, tn: u64, fp: u64) -> Result<f64, MetricsError> {
    if tp + fn_ == 0 {
        return Err(MetricsError::ZeroDenominator("TP + FN"));
    }
    if tn + fp == 0 {
        return Err(MetricsError::ZeroDenominator("TN + FP"));
    }
    // one rounding: (tp/(tp+fn) + tn/(tn+fp)) / 2 as a single integer ratio
    let (pos, neg) = (u128::from(tp + fn_), u128::from(tn + fp));
    let num = u128::from(tp) * neg + u128::from(tn) * pos;
    Ok(num as f64 / (2 * pos * neg) as f64)
}

/// Confusion counts for binary predictions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Confusion {
    pub tp: u64,
    pub fn_: u64,
    pub tn: u64,
    pub fp: u64,
}

impl Confusion {
    pub fn record(&mut self, actual: Class, predicted: Class) {
        match (actual, predicted) {
            (Class::Positive, Class::Positive) => self.tp += 1,
            (Class::Positive, Class::Negative) => self.fn_ += 1,
            (Class::Negative, Class::Negative) => self.tn += 1,
            (Class::Negative, Class::Positive) => self.fp += 1,
        }
    }

    pub fn auc(&self) -> Result<f64, MetricsError> {
        auc_from_counts(self.tp, self.fn_, self.tn, self.fp)
    }
}

/// Maps each real feature to its column index in `synth`, failing on any
/// name present in only one table.
fn align_columns(real: &LabeledDataset, synth: &LabeledDataset) -> Result<Vec<usize>, MetricsError> {
    let mapping = real
        .feature_names()
        .iter()
        .map(|name| {
            synth.feature_names().iter().position(|s| s == name).ok_or_else(|| MetricsError::MissingColumn(name.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(extra) = synth.feature_names().iter().find(|s| !real.feature_names().contains(s)) {
        return Err(MetricsError::ExtraColumn(extra.clone()));
    }
    Ok(mapping)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnScore {
    pub column: String,
    pub ks_complement: f64,
}

/// Per-column KSComplement scores (label excluded) and their mean.
pub fn column_ks_scores(real: &LabeledDataset, synth: &LabeledDataset) -> Result<Vec<ColumnScore>, MetricsError> {
    let mapping = align_columns(real, synth)?;
    mapping
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            Ok(ColumnScore {
                column: real.feature_names()[j].clone(),
                ks_complement: ks_complement(&real.column(j), &synth.column(k))?,
            })
        })
        .collect()
}

pub fn mean_ks_complement(real: &LabeledDataset, synth: &LabeledDataset) -> Result<f64, MetricsError> {
    let scores = column_ks_scores(real, synth)?;
    Ok(scores.iter().map(|s| s.ks_complement).sum::<f64>() / scores.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairScore {
    pub a: String,
    pub b: String,
    pub real_corr: f64,
    pub synth_corr: f64,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsTest {
    pub pairs: Vec<PairScore>,
    /// Pairs touching a column that is constant in exactly one table.
    pub skipped: Vec<(String, String)>,
    pub mean: f64,
}

/// Correlation similarity over all unordered feature pairs.
///
/// A pair involving a column that is constant in both tables counts as
/// correlation 0 on both sides. A pair involving a column that is constant
/// in only one table is skipped and listed in [`CsTest::skipped`].
pub fn cs_test(real: &LabeledDataset, synth: &LabeledDataset) -> Result<CsTest, MetricsError> {
    if real.dim() < 2 {
        return Err(MetricsError::TooFewColumns(real.dim()));
    }
    let mapping = align_columns(real, synth)?;
    let real_cols: Vec<Vec<f64>> = (0..real.dim()).map(|j| real.column(j)).collect();
    let synth_cols: Vec<Vec<f64>> = mapping.iter().map(|&k| synth.column(k)).collect();
    let constant = |col: &[f64]| col.iter().all(|v| *v == col[0]);
    let real_const: Vec<bool> = real_cols.iter().map(|c| constant(c)).collect();
    let synth_const: Vec<bool> = synth_cols.iter().map(|c| constant(c)).collect();
    let mut pairs = Vec::new();
    let mut skipped = Vec::new();
    for i in 0..real.dim() {
        for j in i + 1..real.dim() {
            let names = (real.feature_names()[i].clone(), real.feature_names()[j].clone());
            if real_const[i] != synth_const[i] || real_const[j] != synth_const[j] {
                skipped.push(names);
                continue;
            }
            let (r, s) = if real_const[i] || real_const[j] {
                (0.0, 0.0)
            } else {
                (pearson(&real_cols[i], &real_cols[j])?, pearson(&synth_cols[i], &synth_cols[j])?)
            };
            pairs.push(PairScore { a: names.0, b: names.1, real_corr: r, synth_corr: s, score: correlation_similarity(r, s) });
        }
    }
    if pairs.is_empty() {
        return Err(MetricsError::NoComparablePairs);
    }
    let mean = pairs.iter().map(|p| p.score).sum::<f64>() / pairs.len() as f64;
    Ok(CsTest { pairs, skipped, mean })
}

/// Everything the `eval-synth` command reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QualityReport {
    pub columns: Vec<ColumnScore>,
    pub mean_ks_complement: f64,
    pub correlation: CsTest,
}

impl QualityReport {
    pub fn compute(real: &LabeledDataset, synth: &LabeledDataset) -> Result<Self, MetricsError> {
        let columns = column_ks_scores(real, synth)?;
        let mean_ks_complement = columns.iter().map(|c| c.ks_complement).sum::<f64>() / columns.len() as f64;
        let correlation = cs_test(real, synth)?;
        Ok(Self { columns, mean_ks_complement, correlation })
    }

    pub fn mean_cs_test(&self) -> f64 {
        self.correlation.mean
    }

    pub fn to_text(&self) -> String {
        let width = self.columns.iter().map(|c| c.column.len()).max().unwrap_or(0).max(6);
        let mut out = String::new();
        let _ = writeln!(out, "# synthetic data quality");
        let _ = writeln!(out, "mean_ks_complement = {:.6}", self.mean_ks_complement);
        let _ = writeln!(out, "mean_cs_test       = {:.6}", self.correlation.mean);
        let _ = writeln!(out);
        let _ = writeln!(out, "[ks_complement]");
        let _ = writeln!(out, "{:<width$}  score", "column");
        for c in &self.columns {
            let _ = writeln!(out, "{:<width$}  {:.6}", c.column, c.ks_complement);
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "[cs_test]");
        let _ = writeln!(out, "{:<width$}  {:<width$}  real_corr  synth_corr  score", "a", "b");
        for p in &self.correlation.pairs {
            let _ = writeln!(
                out,
                "{:<width$}  {:<width$}  {:>9.6}  {:>10.6}  {:.6}",
                p.a, p.b, p.real_corr, p.synth_corr, p.score
            );
        }
        for (a, b) in &self.correlation.skipped {
            let _ = writeln!(out, "{a:<width$}  {b:<width$}  skipped: constant in one table");
        }
        out
    }
}
