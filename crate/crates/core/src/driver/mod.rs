//! Scan orchestration, checkpointing, verification and graph6 utilities
//! behind the `gatescan` command line.

mod g6;
mod scan;
mod verify;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::gatekit::Tolerances;
use crate::graphset::Graph6Error;
use crate::scatter::Momentum;

pub use g6::{count_graph6, decode_line, encode_line, write_levels, G6Counts};
pub use scan::{process_graph, scan, Checkpoint, Diagnostic, ScanOutcome, WorkUnit};
pub use verify::{extended_angle, verify, verify_catalog, EntryCheck, VerifyReport};

/// Largest vertex count the configuration accepts.
pub const N_LIMIT: usize = 12;

#[derive(Debug, Error)]
pub enum DriverError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Graph6(#[from] Graph6Error),
    #[error("malformed data: {0}")]
    Json(#[from] serde_json::Error),
    #[error("checkpoint was written for a different configuration ({found} != {expected})")]
    HashMismatch { found: String, expected: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "path")]
pub enum InputMode {
    Enumerate,
    Graph6(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub momenta: Vec<Momentum>,
    pub tol: Tolerances,
    /// Threads; `None` uses the rayon default.
    pub workers: Option<usize>,
    /// Graphs per checkpoint; 0 disables checkpoints.
    pub checkpoint_every: u64,
    pub out: PathBuf,
    pub input: InputMode,
    /// Continue from an existing checkpoint in `out`.
    pub resume: bool,
    /// Stop after this many graphs in this run, leaving a checkpoint.
    pub stop_after: Option<u64>,
}

impl ScanConfig {
    pub fn new(n_max: usize, out: impl AsRef<Path>) -> Self {
        ScanConfig {
            n_min: 1,
            n_max,
            momenta: Momentum::default_set(),
            tol: Tolerances::default(),
            workers: None,
            checkpoint_every: 0,
            out: out.as_ref().to_path_buf(),
            input: InputMode::Enumerate,
            resume: false,
            stop_after: None,
        }
    }

    pub fn validate(&self) -> Result<(), DriverError> {
        let bad = |m: String| Err(DriverError::Config(m));
        if self.n_min < 1 || self.n_min > self.n_max || self.n_max > N_LIMIT {
            return bad(format!("need 1 <= n_min <= n_max <= {N_LIMIT}, got {}..{}", self.n_min, self.n_max));
        }
        if self.momenta.is_empty() {
            return bad("no momenta".into());
        }
        let mut sorted = self.momenta.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != self.momenta.len() {
            return bad("repeated momentum".into());
        }
        let t = &self.tol;
        let positive = [t.flux, t.gate, t.axis, t.len, t.rational, t.surd, t.stencil_h];
        if positive.iter().any(|&x| !(x > 0.0) || !x.is_finite()) || t.q_max < 1 || t.coeff_bound < 1 {
            return bad("tolerances must be positive".into());
        }
        if self.workers == Some(0) {
            return bad("workers must be positive".into());
        }
        if self.n_max > 9 {
            log::warn!("n_max = {} is far beyond the graph universe scanned so far", self.n_max);
        }
        Ok(())
    }

    /// Hash of everything that affects the catalog. Workers, output paths
    /// and checkpoint cadence are excluded.
    pub fn hash(&self) -> Result<String, DriverError> {
        let mut h = Sha256::new();
        let key = serde_json::json!({
            "n_min": self.n_min,
            "n_max": self.n_max,
            "momenta": self.momenta,
            "tol": self.tol,
            "input": self.input,
        });
        h.update(key.to_string().as_bytes());
        if let InputMode::Graph6(path) = &self.input {
            h.update(std::fs::read(path)?);
        }
        Ok(format!("{:x}", h.finalize()))
    }
}

/// Parses a comma-separated momentum list such as `pi/4,2pi/3,1/5`.
pub fn parse_momenta(s: &str) -> Result<Vec<Momentum>, DriverError> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.parse().map_err(|e| DriverError::Config(format!("{e}"))))
        .collect()
}
