//! Machine-readable reports with a stable digest.
//!
//! A report is byte-stable for fixed input, seed and tolerances except for
//! the `timing_ms` field; `report_digest` is the SHA-256 of the canonical
//! serialization with timing excluded, so two runs of the same analysis
//! carry the same digest.

use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::linalg::{Subspace, Tolerance};

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub input: String,
    /// SHA-256 of the raw input file bytes.
    pub input_digest: String,
    pub tolerances: Tolerance,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rng: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signal: Option<String>,
    pub result: Value,
    pub timing_ms: f64,
    /// SHA-256 of everything above except `timing_ms`.
    pub report_digest: String,
}

#[derive(Serialize)]
struct DigestView<'a> {
    command: &'a str,
    input: &'a str,
    input_digest: &'a str,
    tolerances: &'a Tolerance,
    seed: &'a Option<u64>,
    rng: &'a Option<String>,
    signal: &'a Option<String>,
    result: &'a Value,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

impl Report {
    pub fn new(command: &str, input: &str, input_bytes: &[u8], tolerances: Tolerance) -> Self {
        Report {
            command: command.to_string(),
            input: input.to_string(),
            input_digest: sha256_hex(input_bytes),
            tolerances,
            seed: None,
            rng: None,
            signal: None,
            result: Value::Null,
            timing_ms: 0.0,
            report_digest: String::new(),
        }
    }

    /// Fill in the digest; call after `result` is final.
    pub fn finalize(mut self, started: std::time::Instant) -> Self {
        let view = DigestView {
            command: &self.command,
            input: &self.input,
            input_digest: &self.input_digest,
            tolerances: &self.tolerances,
            seed: &self.seed,
            rng: &self.rng,
            signal: &self.signal,
            result: &self.result,
        };
        let canonical = serde_json::to_string(&view).expect("report serialization");
        self.report_digest = sha256_hex(canonical.as_bytes());
        self.timing_ms = started.elapsed().as_secs_f64() * 1e3;
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

/// Matrix as a row-array JSON value.
pub fn matrix_value(m: &DMatrix<f64>) -> Value {
    let rows: Vec<Vec<f64>> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect();
    serde_json::json!(rows)
}

/// Subspace as dimension + basis columns.
pub fn subspace_value(s: &Subspace) -> Value {
    let basis: Vec<Vec<f64>> = (0..s.dim())
        .map(|j| s.basis().column(j).iter().copied().collect())
        .collect();
    serde_json::json!({
        "dim": s.dim(),
        "basis_columns": basis,
    })
}
