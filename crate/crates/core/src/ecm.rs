//! Modified evolving clustering method.
//!
//! A single ordered pass over points in `[0, 1]^d`. Each incoming point
//! either falls inside the nearest cluster's radius, grows the cluster that
//! minimizes `distance + radius`, or starts a new cluster when that sum
//! exceeds `multiplier * dthr`. Every cluster also counts how many points of
//! each class it absorbed, which later decides its label.
//!
//! The same pass drives server-side meta-clustering: there the inputs are
//! client centers and each one carries its whole frequency vector as weight
//! (see [`EcmModel::absorb`]).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{Class, LabeledDataset};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EcmError {
    #[error("dimension mismatch: model has {expected} features, point has {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("points must have at least one coordinate")]
    ZeroDimension,
    #[error("no input rows")]
    EmptyInput,
    #[error("cluster has an all-zero frequency vector")]
    EmptyFrequency,
    #[error("threshold radius must be finite and non-negative, got {0}")]
    InvalidThreshold(f64),
    #[error("multiplier must be finite and positive, got {0}")]
    InvalidMultiplier(f64),
    #[error("non-finite coordinate in input point")]
    NonFinite,
}

/// `||x - y||_2 / sqrt(d)`, which stays within `[0, 1]` on the unit hypercube.
pub fn normalized_distance(x: &[f64], y: &[f64]) -> Result<f64, EcmError> {
    if x.len() != y.len() {
        return Err(EcmError::DimensionMismatch { expected: x.len(), found: y.len() });
    }
    if x.is_empty() {
        return Err(EcmError::ZeroDimension);
    }
    Ok(distance_unchecked(x, y))
}

#[inline]
pub(crate) fn distance_unchecked(x: &[f64], y: &[f64]) -> f64 {
    let ss: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    (ss / x.len() as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub center: Vec<f64>,
    pub radius: f64,
    /// Absorbed points per class, indexed by [`Class::index`].
    pub freq: [u64; 2],
}

impl Cluster {
    pub fn new(center: Vec<f64>, radius: f64, freq: [u64; 2]) -> Self {
        Self { center, radius, freq }
    }

    pub fn total(&self) -> u64 {
        self.freq[0] + self.freq[1]
    }

    /// Majority class. Equal counts resolve to [`Class::Negative`].
    pub fn label(&self) -> Result<Class, EcmError> {
        match self.freq {
            [0, 0] => Err(EcmError::EmptyFrequency),
            [neg, pos] if pos > neg => Ok(Class::Positive),
            _ => Ok(Class::Negative),
        }
    }
}

/// Free-function form of [`Cluster::label`].
pub fn cluster_label(c: &Cluster) -> Result<Class, EcmError> {
    c.label()
}

/// Which branch an update took.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Created(usize),
    /// The point fell inside cluster `m`'s radius; only counts changed.
    Inside(usize),
    /// Cluster `a` grew its radius and moved toward the point.
    Updated(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EcmModel {
    clusters: Vec<Cluster>,
    dthr: f64,
    multiplier: f64,
    dim: Option<usize>,
    points_seen: u64,
}

pub const DEFAULT_MULTIPLIER: f64 = 2.0;

fn first_min(values: impl Iterator<Item = f64>) -> Option<(usize, f64)> {
    values.enumerate().fold(None, |best, (i, v)| match best {
        Some((_, b)) if b <= v => best,
        _ => Some((i, v)),
    })
}

impl EcmModel {
    pub fn new(dthr: f64, multiplier: f64) -> Result<Self, EcmError> {
        if !(dthr.is_finite() && dthr >= 0.0) {
            return Err(EcmError::InvalidThreshold(dthr));
        }
        if !(multiplier.is_finite() && multiplier > 0.0) {
            return Err(EcmError::InvalidMultiplier(multiplier));
        }
        Ok(Self { clusters: Vec::new(), dthr, multiplier, dim: None, points_seen: 0 })
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn into_clusters(self) -> Vec<Cluster> {
        self.clusters
    }

    pub fn dthr(&self) -> f64 {
        self.dthr
    }

    pub fn multiplier(&self) -> f64 {
        self.multiplier
    }

    pub fn dim(&self) -> Option<usize> {
        self.dim
    }

    /// Number of inputs absorbed so far (rows, or centers when meta-clustering).
    pub fn points_seen(&self) -> u64 {
        self.points_seen
    }

    /// Sum of all cluster frequencies.
    pub fn total_frequency(&self) -> u64 {
        self.clusters.iter().map(Cluster::total).sum()
    }

    /// Feeds one labeled point.
    pub fn update(&mut self, x: &[f64], label: Class) -> Result<Outcome, EcmError> {
        let mut freq = [0; 2];
        freq[label.index()] = 1;
        self.absorb(x, freq)
    }

    /// Feeds one point carrying `weight` class counts. Whichever cluster
    /// receives the point adds `weight` to its frequency vector.
    pub fn absorb(&mut self, x: &[f64], weight: [u64; 2]) -> Result<Outcome, EcmError> {
        match self.dim {
            Some(d) if d != x.len() => return Err(EcmError::DimensionMismatch { expected: d, found: x.len() }),
            _ if x.is_empty() => return Err(EcmError::ZeroDimension),
            _ => {}
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(EcmError::NonFinite);
        }
        if weight == [0, 0] {
            return Err(EcmError::EmptyFrequency);
        }
        self.dim = Some(x.len());
        self.points_seen += 1;

        if self.clusters.is_empty() {
            self.clusters.push(Cluster::new(x.to_vec(), 0.0, weight));
            return Ok(Outcome::Created(0));
        }

        let dists: Vec<f64> = self.clusters.iter().map(|c| distance_unchecked(x, &c.center)).collect();
        let (m, d_min) = first_min(dists.iter().copied()).expect("non-empty");
        if d_min <= self.clusters[m].radius {
            add(&mut self.clusters[m].freq, weight);
            return Ok(Outcome::Inside(m));
        }

        let (a, s_min) =
            first_min(dists.iter().zip(&self.clusters).map(|(d, c)| d + c.radius)).expect("non-empty");
        if s_min > self.multiplier * self.dthr {
            self.clusters.push(Cluster::new(x.to_vec(), 0.0, weight));
            return Ok(Outcome::Created(self.clusters.len() - 1));
        }

        let cluster = &mut self.clusters[a];
        cluster.radius = s_min / 2.0;
        let to_center = dists[a];
        if to_center > 0.0 {
            let ratio = ((to_center - cluster.radius).abs() / to_center).clamp(0.0, 1.0);
            for (c, &xi) in cluster.center.iter_mut().zip(x) {
                let moved = *c + (xi - *c) * ratio;
                // keep the rounded result on the segment between old center and x
                *c = moved.clamp(c.min(xi), c.max(xi));
            }
        }
        add(&mut cluster.freq, weight);
        Ok(Outcome::Updated(a))
    }
}

fn add(freq: &mut [u64; 2], weight: [u64; 2]) {
    freq[0] += weight[0];
    freq[1] += weight[1];
}

/// Runs one clustering pass over `rows` in the given order.
pub fn ecm_fit<'a, I>(rows: I, dthr: f64, multiplier: f64) -> Result<EcmModel, EcmError>
where
    I: IntoIterator<Item = (&'a [f64], Class)>,
{
    let mut model = EcmModel::new(dthr, multiplier)?;
    for (x, label) in rows {
        model.update(x, label)?;
    }
    if model.points_seen == 0 {
        return Err(EcmError::EmptyInput);
    }
    Ok(model)
}

/// Clusters every row of a (normalized) dataset in storage order.
pub fn fit_dataset(ds: &LabeledDataset, dthr: f64, multiplier: f64) -> Result<EcmModel, EcmError> {
    ecm_fit(ds.samples(), dthr, multiplier)
}
