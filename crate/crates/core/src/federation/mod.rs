//! One-shot federation: local clustering and evaluation on every client,
//! meta-clustering of the uploaded centers at the server, evaluation on the
//! server's reserved shard, one broadcast, and re-evaluation on every client.
//!
//! The federation is simulated in-process. Each client runs on its own
//! thread and talks to the server only through serialized [`ClientUpdate`]
//! messages, so raw rows never leave a client. Exactly `2·K` messages are
//! exchanged per run.

mod message;

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use message::{deserialize_update, serialize_update, ClientUpdate, MessageError, MESSAGE_VERSION};

use crate::dataset::{self, Class, DatasetError, LabeledDataset, NormalizationParams, ShardingMode};
use crate::ecm::{self, Cluster, EcmError, EcmModel};
use crate::pnn::{PnnError, PnnModel, DEFAULT_SIGMA};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FederationConfig {
    pub num_clients: usize,
    /// Share of rows reserved at the server, in percent.
    pub b_percent: f64,
    pub client_dthr: f64,
    /// Optional per-client thresholds; when non-empty it must hold one value
    /// per client and replaces `client_dthr`.
    pub client_dthrs: Vec<f64>,
    pub server_dthr: f64,
    pub multiplier: f64,
    pub sigma: f64,
    pub train_frac: f64,
    pub seed: u64,
    pub client_sharding: ShardingMode,
}

impl Default for FederationConfig {
    fn default() -> Self {
        Self {
            num_clients: 2,
            b_percent: 10.0,
            client_dthr: 0.19,
            client_dthrs: Vec::new(),
            server_dthr: 0.17,
            multiplier: ecm::DEFAULT_MULTIPLIER,
            sigma: DEFAULT_SIGMA,
            train_frac: 0.8,
            seed: 0,
            client_sharding: ShardingMode::SimpleRandom,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid configuration: {0}")]
pub struct ConfigError(pub String);

impl FederationConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if self.num_clients == 0 {
            return Err(ConfigError("num_clients must be at least 1".into()));
        }
        if !(self.b_percent > 0.0 && self.b_percent < 100.0) {
            return Err(ConfigError(format!("b_percent must lie in (0, 100), got {}", self.b_percent)));
        }
        if !open_unit(self.client_dthr) {
            return Err(ConfigError(format!("client_dthr must lie in (0, 1), got {}", self.client_dthr)));
        }
        if !self.client_dthrs.is_empty() {
            if self.client_dthrs.len() != self.num_clients {
                return Err(ConfigError(format!(
                    "client_dthrs has {} values for {} clients",
                    self.client_dthrs.len(),
                    self.num_clients
                )));
            }
            if let Some(v) = self.client_dthrs.iter().find(|v| !open_unit(**v)) {
                return Err(ConfigError(format!("client_dthrs values must lie in (0, 1), got {v}")));
            }
        }
        if !open_unit(self.server_dthr) {
            return Err(ConfigError(format!("server_dthr must lie in (0, 1), got {}", self.server_dthr)));
        }
        if !(self.multiplier.is_finite() && self.multiplier > 0.0) {
            return Err(ConfigError(format!("multiplier must be positive, got {}", self.multiplier)));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(ConfigError(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !open_unit(self.train_frac) {
            return Err(ConfigError(format!("train_frac must lie in (0, 1), got {}", self.train_frac)));
        }
        Ok(())
    }

    pub fn client_dthr_for(&self, client: usize) -> f64 {
        self.client_dthrs.get(client).copied().unwrap_or(self.client_dthr)
    }
}

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("local shard is empty")]
    EmptyShard,
    #[error("local shard holds only class {0}")]
    SingleClass(Class),
    #[error(transparent)]
    Data(#[from] DatasetError),
    #[error(transparent)]
    Clustering(#[from] EcmError),
    #[error(transparent)]
    Model(#[from] PnnError),
    #[error(transparent)]
    Message(#[from] MessageError),
}

/// Everything a client keeps after local training.
#[derive(Debug, Clone)]
pub struct ClientOutcome {
    pub update: ClientUpdate,
    pub local_auc: f64,
    pub train_rows: usize,
    /// Held-out split, already normalized with the client's own parameters.
    pub test: LabeledDataset,
}

/// Local phase of one client: stratified split, normalization fit on the
/// training half, clustering, and PNN evaluation on the held-out half.
pub fn client_update(
    client_id: u32,
    local: &LabeledDataset,
    cfg: &FederationConfig,
    client_seed: u64,
) -> Result<ClientOutcome, ClientError> {
    if local.is_empty() {
        return Err(ClientError::EmptyShard);
    }
    match local.class_counts() {
        [0, _] => return Err(ClientError::SingleClass(Class::Positive)),
        [_, 0] => return Err(ClientError::SingleClass(Class::Negative)),
        _ => {}
    }
    let (train, test) = dataset::stratified_split(local, cfg.train_frac, client_seed)?;
    let params = NormalizationParams::fit(&train);
    let train = params.apply(&train)?;
    let test = params.apply(&test)?;
    let model = ecm::fit_dataset(&train, cfg.client_dthr_for(client_id as usize), cfg.multiplier)?;
    let update = ClientUpdate::new(client_id, model.into_clusters())?;
    let local_auc = PnnModel::from_clusters(&update.centers, cfg.sigma)?.evaluate(&test)?;
    Ok(ClientOutcome { update, local_auc, train_rows: train.len(), test })
}

/// Runs the clustering pass over every uploaded center. Updates are taken in
/// client-id order and centers in emission order; each center adds its whole
/// frequency vector to the meta-cluster that receives it.
pub fn meta_cluster(updates: &[ClientUpdate], server_dthr: f64, multiplier: f64) -> Result<Vec<Cluster>, EcmError> {
    let mut ordered: Vec<&ClientUpdate> = updates.iter().collect();
    ordered.sort_by_key(|u| u.client_id);
    let mut model = EcmModel::new(server_dthr, multiplier)?;
    for c in ordered.iter().flat_map(|u| &u.centers) {
        model.absorb(&c.center, c.freq)?;
    }
    if model.points_seen() == 0 {
        return Err(EcmError::EmptyInput);
    }
    Ok(model.into_clusters())
}

/// Scores the meta model on the server's reserve, used entirely as test data.
/// `server_data` must already be normalized.
pub fn server_evaluate(meta: &[Cluster], server_data: &LabeledDataset, sigma: f64) -> Result<f64, PnnError> {
    PnnModel::from_clusters(meta, sigma)?.evaluate(server_data)
}

/// Rebuilds every client's pattern layer from the meta centers and
/// re-scores its held-out split.
pub fn broadcast_and_reevaluate(
    meta: &[Cluster],
    client_tests: &[LabeledDataset],
    sigma: f64,
) -> Result<Vec<f64>, FederationError> {
    client_tests
        .iter()
        .enumerate()
        .map(|(k, test)| {
            PnnModel::from_clusters(meta, sigma)
                .and_then(|m| m.evaluate(test))
                .map_err(|e| FederationError::Broadcast { client: k as u32, source: e.into() })
        })
        .collect()
}

#[derive(Debug, Error)]
pub enum FederationError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("partition stage: {0}")]
    Partition(#[source] DatasetError),
    #[error("server reserve: {0}")]
    ServerData(#[source] DatasetError),
    #[error("client {client} local stage: {source}")]
    Client {
        client: u32,
        #[source]
        source: ClientError,
    },
    #[error("server failed to decode upload: {0}")]
    Upload(#[source] MessageError),
    #[error("meta-clustering stage: {0}")]
    MetaClustering(#[source] EcmError),
    #[error("server evaluation stage: {0}")]
    ServerEvaluation(#[source] PnnError),
    #[error("client {client} broadcast stage: {source}")]
    Broadcast {
        client: u32,
        #[source]
        source: ClientError,
    },
}

/// Centers per class, rendered as `(neg; pos)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CenterCounts {
    pub negative: usize,
    pub positive: usize,
}

impl CenterCounts {
    pub fn of(clusters: &[Cluster]) -> Result<Self, EcmError> {
        let mut counts = Self::default();
        for c in clusters {
            match c.label()? {
                Class::Negative => counts.negative += 1,
                Class::Positive => counts.positive += 1,
            }
        }
        Ok(counts)
    }

    pub fn total(&self) -> usize {
        self.negative + self.positive
    }
}

impl fmt::Display for CenterCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}; {})", self.negative, self.positive)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClientReport {
    pub client_id: u32,
    pub shard_rows: usize,
    pub train_rows: usize,
    pub test_rows: usize,
    pub local_auc: f64,
    pub local_centers: CenterCounts,
    pub global_auc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ServerReport {
    pub reserve_rows: usize,
    pub auc: f64,
    pub meta_centers: CenterCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FederationReport {
    pub config: FederationConfig,
    pub rows: usize,
    pub features: usize,
    pub clients: Vec<ClientReport>,
    pub server: ServerReport,
    /// Uploads plus broadcasts.
    pub messages: usize,
}

impl FederationReport {
    pub fn to_text(&self) -> String {
        let c = &self.config;
        let mut out = String::new();
        let _ = writeln!(out, "# fedpnn one-shot federation report");
        let _ = writeln!(out, "[config]");
        let _ = writeln!(out, "num_clients = {}", c.num_clients);
        let _ = writeln!(out, "b_percent = {}", c.b_percent);
        if c.client_dthrs.is_empty() {
            let _ = writeln!(out, "client_dthr = {}", c.client_dthr);
        } else {
            let list: Vec<String> = c.client_dthrs.iter().map(f64::to_string).collect();
            let _ = writeln!(out, "client_dthrs = [{}]", list.join(", "));
        }
        let _ = writeln!(out, "server_dthr = {}", c.server_dthr);
        let _ = writeln!(out, "multiplier = {}", c.multiplier);
        let _ = writeln!(out, "sigma = {}", c.sigma);
        let _ = writeln!(out, "train_frac = {}", c.train_frac);
        let _ = writeln!(out, "seed = {}", c.seed);
        let _ = writeln!(out, "client_sharding = {}", c.client_sharding);
        let _ = writeln!(out);
        let _ = writeln!(out, "[data]");
        let _ = writeln!(out, "rows = {}", self.rows);
        let _ = writeln!(out, "features = {}", self.features);
        let _ = writeln!(out, "messages = {}", self.messages);
        let _ = writeln!(out);
        let _ = writeln!(out, "[results]");
        let _ = writeln!(
            out,
            "{:<10} {:>6} {:>10} {:>14} {:>10} {:>14}",
            "node", "rows", "local_auc", "local_centers", "global_auc", "meta_centers"
        );
        for r in &self.clients {
            let _ = writeln!(
                out,
                "{:<10} {:>6} {:>10.6} {:>14} {:>10.6} {:>14}",
                format!("client_{}", r.client_id),
                r.shard_rows,
                r.local_auc,
                r.local_centers.to_string(),
                r.global_auc,
                "-"
            );
        }
        let s = &self.server;
        let _ = writeln!(
            out,
            "{:<10} {:>6} {:>10} {:>14} {:>10.6} {:>14}",
            "server",
            s.reserve_rows,
            "-",
            "-",
            s.auc,
            s.meta_centers.to_string()
        );
        out
    }
}

/// A finished run plus the model artifacts behind the report.
#[derive(Debug, Clone)]
pub struct FederationRun {
    pub report: FederationReport,
    /// Uploads as decoded by the server, in client-id order.
    pub client_updates: Vec<ClientUpdate>,
    pub meta_clusters: Vec<Cluster>,
}

struct ClientState {
    shard_rows: usize,
    local_auc: f64,
    train_rows: usize,
    local_centers: CenterCounts,
    test: LabeledDataset,
}

/// Executes the full one-shot protocol.
pub fn run_one_shot(ds: &LabeledDataset, cfg: &FederationConfig) -> Result<FederationReport, FederationError> {
    simulate(ds, cfg).map(|run| run.report)
}

pub fn simulate(ds: &LabeledDataset, cfg: &FederationConfig) -> Result<FederationRun, FederationError> {
    cfg.validate()?;
    let plan = dataset::partition(ds, cfg.num_clients, cfg.b_percent, cfg.seed, cfg.client_sharding)
        .map_err(FederationError::Partition)?;

    // the server normalizes its reserve with its own statistics
    let reserve = ds.select_rows(&plan.server_rows);
    if reserve.is_empty() {
        return Err(FederationError::ServerData(DatasetError::NoRows));
    }
    let reserve = NormalizationParams::fit(&reserve).apply(&reserve).map_err(FederationError::ServerData)?;

    // local phase: each client trains in isolation and hands back only bytes
    let uploads: Vec<Result<(Vec<u8>, ClientState), FederationError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = plan
            .client_rows
            .iter()
            .enumerate()
            .map(|(k, rows)| {
                let shard = ds.select_rows(rows);
                scope.spawn(move || {
                    let id = k as u32;
                    let wrap = |source: ClientError| FederationError::Client { client: id, source };
                    let client_seed = seed::derive(cfg.seed, seed::stream::CLIENT, k as u64);
                    let outcome = client_update(id, &shard, cfg, client_seed).map_err(wrap)?;
                    let local_centers = CenterCounts::of(&outcome.update.centers).map_err(|e| wrap(e.into()))?;
                    let bytes = serialize_update(&outcome.update).map_err(|e| wrap(e.into()))?;
                    Ok((
                        bytes,
                        ClientState {
                            shard_rows: shard.len(),
                            local_auc: outcome.local_auc,
                            train_rows: outcome.train_rows,
                            local_centers,
                            test: outcome.test,
                        },
                    ))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("client thread panicked")).collect()
    });

    // barrier: the server starts only once every upload has arrived
    let mut messages = 0;
    let mut updates = Vec::with_capacity(uploads.len());
    let mut states = Vec::with_capacity(uploads.len());
    for upload in uploads {
        let (bytes, state) = upload?;
        updates.push(deserialize_update(&bytes).map_err(FederationError::Upload)?);
        messages += 1;
        states.push(state);
    }

    let meta = meta_cluster(&updates, cfg.server_dthr, cfg.multiplier).map_err(FederationError::MetaClustering)?;
    let meta_centers = CenterCounts::of(&meta).map_err(FederationError::MetaClustering)?;
    let server_auc = server_evaluate(&meta, &reserve, cfg.sigma).map_err(FederationError::ServerEvaluation)?;

    let mut clients = Vec::with_capacity(states.len());
    for (k, state) in states.into_iter().enumerate() {
        let id = k as u32;
        let wrap = |source: ClientError| FederationError::Broadcast { client: id, source };
        let payload = serialize_update(&ClientUpdate { client_id: id, centers: meta.clone() })
            .map_err(|e| wrap(e.into()))?;
        messages += 1;
        let received = deserialize_update(&payload).map_err(|e| wrap(e.into()))?;
        let global_auc = broadcast_and_reevaluate(&received.centers, std::slice::from_ref(&state.test), cfg.sigma)
            .map_err(|e| match e {
                FederationError::Broadcast { source, .. } => wrap(source),
                other => other,
            })?[0];
        clients.push(ClientReport {
            client_id: id,
            shard_rows: state.shard_rows,
            train_rows: state.train_rows,
            test_rows: state.test.len(),
            local_auc: state.local_auc,
            local_centers: state.local_centers,
            global_auc,
        });
    }

    let report = FederationReport {
        config: cfg.clone(),
        rows: ds.len(),
        features: ds.dim(),
        clients,
        server: ServerReport { reserve_rows: reserve.len(), auc: server_auc, meta_centers },
        messages,
    };
    Ok(FederationRun { report, client_updates: updates, meta_clusters: meta })
}
