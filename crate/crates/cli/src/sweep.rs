//! One-parameter grids over the federation settings.

use std::fmt::Write as _;

use fedpnn_core::dataset::LabeledDataset;
use fedpnn_core::federation::{self, FederationConfig, FederationReport};

use crate::args::Axis;
use crate::plot::{LineChart, Series};
use crate::CliError;

pub const CSV_HEADER: &str = "axis_value,node,local_auc,global_auc,neg_centers,pos_centers";

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::ClientDthr => "client_dthr",
            Axis::ServerDthr => "server_dthr",
            Axis::Sigma => "sigma",
        }
    }

    fn apply(self, cfg: &mut FederationConfig, value: f64) {
        match self {
            Axis::ClientDthr => {
                cfg.client_dthr = value;
                cfg.client_dthrs.clear();
            }
            Axis::ServerDthr => cfg.server_dthr = value,
            Axis::Sigma => cfg.sigma = value,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    /// Settings held fixed while the axis moves.
    pub base: FederationConfig,
}

/// Grid value with float noise from `start + i * step` rounded away.
fn grid_value(start: f64, step: f64, i: usize) -> f64 {
    let v = start + i as f64 * step;
    (v * 1e12).round() / 1e12
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.step.is_finite()) {
            return Err(CliError::Validation("sweep bounds must be finite".into()));
        }
        if self.step <= 0.0 {
            return Err(CliError::Validation(format!("sweep step must be positive, got {}", self.step)));
        }
        if self.start >= self.stop {
            return Err(CliError::Validation(format!(
                "sweep start {} must be below stop {}",
                self.start, self.stop
            )));
        }
        for cfg in self.configs() {
            cfg.validate()
                .map_err(|e| CliError::Validation(format!("{} grid point: {e}", self.axis.name())))?;
        }
        Ok(())
    }

    /// `floor((stop - start) / step) + 1` points, tolerant of values such as
    /// `0.2 / 0.02` landing just under an integer.
    pub fn len(&self) -> usize {
        ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len()).map(|i| grid_value(self.start, self.step, i)).collect()
    }

    pub fn configs(&self) -> Vec<FederationConfig> {
        self.values()
            .into_iter()
            .map(|v| {
                let mut cfg = self.base.clone();
                self.axis.apply(&mut cfg, v);
                cfg
            })
            .collect()
    }

    pub fn run(&self, ds: &LabeledDataset) -> Result<Vec<SweepPoint>, CliError> {
        self.validate()?;
        self.values()
            .into_iter()
            .zip(self.configs())
            .map(|(value, cfg)| {
                let report = federation::run_one_shot(ds, &cfg).map_err(|e| {
                    CliError::from(e).with_context(&format!("{} = {value}", self.axis.name()))
                })?;
                Ok(SweepPoint { value, report })
            })
            .collect()
    }
}

impl CliError {
    fn with_context(self, ctx: &str) -> Self {
        match self {
            CliError::Validation(m) => CliError::Validation(format!("{ctx}: {m}")),
            CliError::Runtime(m) => CliError::Runtime(format!("{ctx}: {m}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub report: FederationReport,
}

impl SweepPoint {
    /// Centers held by all clients before aggregation.
    pub fn client_centers(&self) -> usize {
        self.report.clients.iter().map(|c| c.local_centers.total()).sum()
    }
}

/// Long format: per grid point one row per client, then one `server` row
/// whose `global_auc` is the reserve AUC and whose counts are meta centers.
pub fn to_csv(points: &[SweepPoint]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{CSV_HEADER}");
    for p in points {
        for c in &p.report.clients {
            let _ = writeln!(
                out,
                "{},client_{},{},{},{},{}",
                p.value, c.client_id, c.local_auc, c.global_auc, c.local_centers.negative, c.local_centers.positive
            );
        }
        let s = &p.report.server;
        let _ = writeln!(
            out,
            "{},server,,{},{},{}",
            p.value, s.auc, s.meta_centers.negative, s.meta_centers.positive
        );
    }
    out
}

/// AUC and center-count charts against the swept value.
pub fn charts(axis: Axis, points: &[SweepPoint]) -> (LineChart, LineChart) {
    let clients = points.first().map_or(0, |p| p.report.clients.len());
    let mut auc = Vec::new();
    let mut centers = Vec::new();
    for k in 0..clients {
        let pick = |f: &dyn Fn(&fedpnn_core::federation::ClientReport) -> f64| {
            points.iter().map(|p| (p.value, f(&p.report.clients[k]))).collect::<Vec<_>>()
        };
        auc.push(Series::new(format!("client_{k} local"), pick(&|c| c.local_auc)));
        auc.push(Series::new(format!("client_{k} global"), pick(&|c| c.global_auc)));
        centers.push(Series::new(format!("client_{k}"), pick(&|c| c.local_centers.total() as f64)));
    }
    auc.push(Series::new("server", points.iter().map(|p| (p.value, p.report.server.auc)).collect()));
    centers.push(Series::new(
        "meta",
        points.iter().map(|p| (p.value, p.report.server.meta_centers.total() as f64)).collect(),
    ));
    (
        LineChart { title: format!("AUC vs {}", axis.name()), x_label: axis.name().into(), y_label: "AUC".into(), series: auc },
        LineChart {
            title: format!("Centers vs {}", axis.name()),
            x_label: axis.name().into(),
            y_label: "centers".into(),
            series: centers,
        },
    )
}
