//! Parzen-kernel probabilistic neural network over cluster centers.
//!
//! The pattern layer holds one Gaussian neuron per center, grouped by the
//! center's majority class. For a query `x` the class density is
//!
//! ```text
//! f_A(x) = 1 / (n_A (2π)^{d/2} σ^d) · Σ_i exp(-dist(x, c_i)² / (2σ²))
//! ```
//!
//! where `dist` is the `√d`-normalized Euclidean distance used by the
//! clustering pass, so `σ` lives in normalized-distance units.
//!
//! Prediction compares the per-class kernel means only. The leading
//! `(2π)^{d/2} σ^d` factor is shared by both classes and would overflow for
//! wide tables, so dropping it leaves the argmax unchanged and keeps the
//! comparison finite.

use std::f64::consts::PI;

use thiserror::Error;

use crate::dataset::{Class, LabeledDataset};
use crate::ecm::{distance_unchecked, Cluster, EcmError};
use crate::synthmetrics::{Confusion, MetricsError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PnnError {
    #[error("no clusters to build a pattern layer from")]
    NoClusters,
    #[error("smoothing parameter must be finite and positive, got {0}")]
    InvalidSigma(f64),
    #[error("class {0} has no centers in the pattern layer")]
    EmptyClassGroup(Class),
    #[error("dimension mismatch: model has {expected} features, input has {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Cluster(#[from] EcmError),
    #[error("cannot score test set: {0}")]
    Metrics(#[from] MetricsError),
}

pub const DEFAULT_SIGMA: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct PnnModel {
    groups: [Vec<Vec<f64>>; 2],
    sigma: f64,
    dim: usize,
}

impl PnnModel {
    /// Places each cluster center in the group of its majority class.
    pub fn from_clusters(clusters: &[Cluster], sigma: f64) -> Result<Self, PnnError> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(PnnError::InvalidSigma(sigma));
        }
        let dim = clusters.first().ok_or(PnnError::NoClusters)?.center.len();
        let mut groups: [Vec<Vec<f64>>; 2] = [Vec::new(), Vec::new()];
        for c in clusters {
            if c.center.len() != dim {
                return Err(PnnError::DimensionMismatch { expected: dim, found: c.center.len() });
            }
            groups[c.label()?.index()].push(c.center.clone());
        }
        Ok(Self { groups, sigma, dim })
    }

    /// Uses every row of `ds` as its own pattern neuron.
    pub fn from_points(ds: &LabeledDataset, sigma: f64) -> Result<Self, PnnError> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(PnnError::InvalidSigma(sigma));
        }
        let mut groups: [Vec<Vec<f64>>; 2] = [Vec::new(), Vec::new()];
        for (x, label) in ds.samples() {
            groups[label.index()].push(x.to_vec());
        }
        Ok(Self { groups, sigma, dim: ds.dim() })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn group(&self, class: Class) -> &[Vec<f64>] {
        &self.groups[class.index()]
    }

    /// Number of centers per class, `[negative, positive]`.
    pub fn group_sizes(&self) -> [usize; 2] {
        [self.groups[0].len(), self.groups[1].len()]
    }

    fn check(&self, x: &[f64]) -> Result<(), PnnError> {
        if x.len() != self.dim {
            return Err(PnnError::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        for class in Class::ALL {
            if self.groups[class.index()].is_empty() {
                return Err(PnnError::EmptyClassGroup(class));
            }
        }
        Ok(())
    }

    fn kernel_mean(&self, class: Class, x: &[f64]) -> f64 {
        let two_var = 2.0 * self.sigma * self.sigma;
        let group = &self.groups[class.index()];
        let sum: f64 = group
            .iter()
            .map(|c| {
                let t = distance_unchecked(x, c);
                (-(t * t) / two_var).exp()
            })
            .sum();
        sum / group.len() as f64
    }

    /// `1 / ((2π)^{d/2} σ^d)`. Overflows to infinity for very wide inputs.
    pub fn normalizer(&self) -> f64 {
        let d = self.dim as f64;
        1.0 / ((2.0 * PI).powf(d / 2.0) * self.sigma.powf(d))
    }

    /// Per-class densities `[f_negative(x), f_positive(x)]`.
    pub fn score(&self, x: &[f64]) -> Result<[f64; 2], PnnError> {
        self.check(x)?;
        let k = self.normalizer();
        Ok(Class::ALL.map(|c| k * self.kernel_mean(c, x)))
    }

    /// Class with the larger density; exact ties go to the negative class.
    /// When both kernel sums underflow to zero the class of the nearest
    /// center wins instead.
    pub fn predict(&self, x: &[f64]) -> Result<Class, PnnError> {
        self.check(x)?;
        let [neg, pos] = Class::ALL.map(|c| self.kernel_mean(c, x));
        if neg == 0.0 && pos == 0.0 {
            return Ok(self.nearest_center_class(x));
        }
        Ok(if pos > neg { Class::Positive } else { Class::Negative })
    }

    fn nearest_center_class(&self, x: &[f64]) -> Class {
        let nearest = |class: Class| {
            self.groups[class.index()].iter().map(|c| distance_unchecked(x, c)).fold(f64::INFINITY, f64::min)
        };
        if nearest(Class::Positive) < nearest(Class::Negative) {
            Class::Positive
        } else {
            Class::Negative
        }
    }

    pub fn confusion(&self, test: &LabeledDataset) -> Result<Confusion, PnnError> {
        let mut conf = Confusion::default();
        for (x, actual) in test.samples() {
            conf.record(actual, self.predict(x)?);
        }
        Ok(conf)
    }

    /// Balanced accuracy of hard predictions over `test` (see
    /// [`crate::synthmetrics::auc_from_counts`]).
    pub fn evaluate(&self, test: &LabeledDataset) -> Result<f64, PnnError> {
        Ok(self.confusion(test)?.auc()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const N: Class = Class::Negative;
    const P: Class = Class::Positive;

    fn two_centers(neg: Vec<f64>, pos: Vec<f64>, sigma: f64) -> PnnModel {
        PnnModel::from_clusters(&[Cluster::new(neg, 0.0, [5, 0]), Cluster::new(pos, 0.0, [0, 5])], sigma).unwrap()
    }

    #[test]
    fn groups_follow_majority_label() {
        let m = two_centers(vec![0.1], vec![0.9], 0.1);
        assert_eq!(m.group_sizes(), [1, 1]);
        let lopsided =
            PnnModel::from_clusters(&[Cluster::new(vec![0.1], 0.0, [3, 1]), Cluster::new(vec![0.2], 0.0, [2, 2])], 0.1)
                .unwrap();
        assert_eq!(lopsided.group_sizes(), [2, 0]);
        assert_eq!(lopsided.predict(&[0.1]), Err(PnnError::EmptyClassGroup(P)));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(PnnModel::from_clusters(&[], 0.1), Err(PnnError::NoClusters));
        let c = [Cluster::new(vec![0.1], 0.0, [1, 0])];
        assert_eq!(PnnModel::from_clusters(&c, 0.0), Err(PnnError::InvalidSigma(0.0)));
        let zero = [Cluster::new(vec![0.1], 0.0, [0, 0])];
        assert_eq!(PnnModel::from_clusters(&zero, 0.1), Err(PnnError::Cluster(EcmError::EmptyFrequency)));
        let ragged = [Cluster::new(vec![0.1], 0.0, [1, 0]), Cluster::new(vec![0.1, 0.2], 0.0, [1, 0])];
        assert!(matches!(PnnModel::from_clusters(&ragged, 0.1), Err(PnnError::DimensionMismatch { .. })));
    }

    #[test]
    fn density_at_center_is_gaussian_peak() {
        let m = two_centers(vec![0.5], vec![0.0], 1.0);
        let [neg, _] = m.score(&[0.5]).unwrap();
        assert!((neg - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
        assert!((neg - 0.39894).abs() < 1e-5);

        let doubled = PnnModel::from_clusters(
            &[
                Cluster::new(vec![0.5], 0.0, [1, 0]),
                Cluster::new(vec![0.5], 0.0, [1, 0]),
                Cluster::new(vec![0.0], 0.0, [0, 1]),
            ],
            1.0,
        )
        .unwrap();
        assert!((doubled.score(&[0.5]).unwrap()[0] - neg).abs() < 1e-15);
    }

    #[test]
    fn distant_center_density_vanishes() {
        let m = two_centers(vec![0.0; 4], vec![1.0; 4], 0.01);
        let [neg, pos] = m.score(&[0.0; 4]).unwrap();
        assert!(pos < 1e-300);
        assert!(neg > 0.0);
    }

    #[test]
    fn predictions() {
        let m = two_centers(vec![0.2, 0.2], vec![0.9, 0.9], 0.1);
        assert_eq!(m.predict(&[0.2, 0.2]).unwrap(), N);
        assert_eq!(m.predict(&[0.85, 0.95]).unwrap(), P);
        let sym = two_centers(vec![0.0], vec![1.0], 0.2);
        assert_eq!(sym.predict(&[0.5]).unwrap(), N);
        assert!(matches!(m.predict(&[0.1]), Err(PnnError::DimensionMismatch { .. })));
    }

    #[test]
    fn underflow_falls_back_to_nearest_center() {
        let m = two_centers(vec![0.0], vec![1.0], 1e-4);
        let [neg, pos] = m.score(&[0.7]).unwrap();
        assert_eq!((neg, pos), (0.0, 0.0));
        assert_eq!(m.predict(&[0.7]).unwrap(), P);
        assert_eq!(m.predict(&[0.3]).unwrap(), N);
    }

    #[test]
    fn evaluate_extremes() {
        let m = two_centers(vec![0.1], vec![0.9], 0.1);
        let test = LabeledDataset::from_rows(vec![vec![0.0], vec![0.2], vec![0.8], vec![1.0]], vec![N, N, P, P]).unwrap();
        assert_eq!(m.evaluate(&test).unwrap(), 1.0);

        let all_neg = PnnModel::from_clusters(
            &[Cluster::new(vec![0.5], 0.0, [1, 0]), Cluster::new(vec![100.0], 0.0, [0, 1])],
            0.1,
        )
        .unwrap();
        assert_eq!(all_neg.evaluate(&test).unwrap(), 0.5);

        let one_class = LabeledDataset::from_rows(vec![vec![0.0]], vec![N]).unwrap();
        assert!(matches!(m.evaluate(&one_class), Err(PnnError::Metrics(_))));
    }

    #[test]
    fn dropping_shared_constant_keeps_argmax() {
        let m = PnnModel::from_clusters(
            &[
                Cluster::new(vec![0.1, 0.3], 0.0, [2, 0]),
                Cluster::new(vec![0.4, 0.4], 0.0, [2, 1]),
                Cluster::new(vec![0.7, 0.6], 0.0, [0, 3]),
            ],
            0.15,
        )
        .unwrap();
        for i in 0..=20 {
            let x = [i as f64 / 20.0, 1.0 - i as f64 / 20.0];
            let [neg, pos] = m.score(&x).unwrap();
            let by_density = if pos > neg { P } else { N };
            assert_eq!(m.predict(&x).unwrap(), by_density);
        }
    }
}
