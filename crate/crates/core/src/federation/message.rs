//! Wire format for the only data that crosses the client/server boundary.
//!
//! A message is a UTF-8 JSON object:
//!
//! ```json
//! {"version":1,"client_id":0,"dim":2,
//!  "centers":[{"center":[0.25,0.5],"radius":0.125,"freq":[3,0]}]}
//! ```
//!
//! Reals are written in the shortest decimal form that parses back to the
//! same 64-bit float, so a round trip is bit-exact. The same record carries
//! the server's broadcast, with `client_id` naming the recipient.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ecm::Cluster;

pub const MESSAGE_VERSION: u32 = 1;

/// Cluster centers uploaded by one client (or broadcast to it).
#[derive(Debug, Clone, PartialEq)]
pub struct ClientUpdate {
    pub client_id: u32,
    pub centers: Vec<Cluster>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MessageError {
    #[error("malformed message at byte {offset} (line {line}, column {column}): {reason}")]
    Malformed { offset: usize, line: usize, column: usize, reason: String },
    #[error("unsupported message version {found} (expected {MESSAGE_VERSION})")]
    Version { found: u64 },
    #[error("update carries no centers")]
    EmptyCenters,
    #[error("center {index} has {found} coordinates, message dim is {expected}")]
    Dimension { index: usize, expected: usize, found: usize },
    #[error("center {index} has an all-zero frequency vector")]
    ZeroFrequency { index: usize },
    #[error("center {index} holds a non-finite or negative value")]
    BadValue { index: usize },
}

impl ClientUpdate {
    pub fn new(client_id: u32, centers: Vec<Cluster>) -> Result<Self, MessageError> {
        let update = Self { client_id, centers };
        update.validate()?;
        Ok(update)
    }

    pub fn dim(&self) -> usize {
        self.centers.first().map_or(0, |c| c.center.len())
    }

    /// Total class counts over all centers, `[negative, positive]`.
    pub fn total_frequency(&self) -> [u64; 2] {
        self.centers.iter().fold([0, 0], |acc, c| [acc[0] + c.freq[0], acc[1] + c.freq[1]])
    }

    pub fn validate(&self) -> Result<(), MessageError> {
        let dim = match self.centers.first() {
            None => return Err(MessageError::EmptyCenters),
            Some(c) => c.center.len(),
        };
        for (index, c) in self.centers.iter().enumerate() {
            if c.center.len() != dim || dim == 0 {
                return Err(MessageError::Dimension { index, expected: dim, found: c.center.len() });
            }
            if c.total() == 0 {
                return Err(MessageError::ZeroFrequency { index });
            }
            if !(c.radius.is_finite() && c.radius >= 0.0) || c.center.iter().any(|v| !v.is_finite()) {
                return Err(MessageError::BadValue { index });
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireCenter {
    center: Vec<f64>,
    radius: f64,
    freq: [u64; 2],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireUpdate {
    version: u32,
    client_id: u32,
    dim: usize,
    centers: Vec<WireCenter>,
}

pub fn serialize_update(update: &ClientUpdate) -> Result<Vec<u8>, MessageError> {
    update.validate()?;
    let wire = WireUpdate {
        version: MESSAGE_VERSION,
        client_id: update.client_id,
        dim: update.dim(),
        centers: update
            .centers
            .iter()
            .map(|c| WireCenter { center: c.center.clone(), radius: c.radius, freq: c.freq })
            .collect(),
    };
    Ok(serde_json::to_vec(&wire).expect("finite values always serialize"))
}

fn byte_offset(bytes: &[u8], line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let line_start: usize = bytes.split(|&b| b == b'\n').take(line - 1).map(|l| l.len() + 1).sum();
    (line_start + column.saturating_sub(1)).min(bytes.len())
}

fn malformed(bytes: &[u8], err: serde_json::Error) -> MessageError {
    let offset = if err.is_eof() { bytes.len() } else { byte_offset(bytes, err.line(), err.column()) };
    MessageError::Malformed {
        offset,
        line: err.line(),
        column: err.column(),
        reason: err.to_string(),
    }
}

pub fn deserialize_update(bytes: &[u8]) -> Result<ClientUpdate, MessageError> {
    let value: serde_json::Value = serde_json::from_slice(bytes).map_err(|e| malformed(bytes, e))?;
    match value.get("version").and_then(serde_json::Value::as_u64) {
        Some(v) if v == u64::from(MESSAGE_VERSION) => {}
        Some(found) => return Err(MessageError::Version { found }),
        None => {
            return Err(MessageError::Malformed {
                offset: 0,
                line: 1,
                column: 1,
                reason: "missing integer field `version`".into(),
            })
        }
    }
    let wire: WireUpdate = serde_json::from_value(value).map_err(|e| malformed(bytes, e))?;
    let update = ClientUpdate {
        client_id: wire.client_id,
        centers: wire.centers.into_iter().map(|c| Cluster::new(c.center, c.radius, c.freq)).collect(),
    };
    update.validate()?;
    if update.dim() != wire.dim {
        return Err(MessageError::Dimension { index: 0, expected: wire.dim, found: update.dim() });
    }
    Ok(update)
}
