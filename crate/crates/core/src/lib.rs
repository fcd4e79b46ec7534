//! One-shot federated classification built from two one-pass learners.
//!
//! Clients compress their local training rows into cluster centers with a
//! modified evolving clustering method ([`ecm`]), score a Parzen-kernel
//! probabilistic network over those centers ([`pnn`]) and upload the centers
//! exactly once. The server runs the same clustering pass over every
//! uploaded center (meta-clustering), evaluates the merged model on its
//! reserved shard and broadcasts the meta centers back ([`federation`]).
//!
//! [`dataset`] handles CSV ingestion, normalization and partitioning, and
//! [`synthmetrics`] scores synthetic tables against real ones.

pub mod dataset;
pub mod ecm;
pub mod federation;
pub mod pnn;
pub mod seed;
pub mod synthmetrics;

pub use dataset::{Class, LabeledDataset, NormalizationParams, PartitionPlan, ShardingMode};
pub use ecm::{Cluster, EcmModel};
pub use federation::{ClientUpdate, FederationConfig, FederationReport};
pub use pnn::PnnModel;
