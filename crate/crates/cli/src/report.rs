use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use sgia_core::{canonical_json, SgiaError};
use std::path::Path;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID_INPUT: u8 = 2;
pub const EXIT_PROPERTY_FAILED: u8 = 3;
pub const EXIT_NO_CONVERGENCE: u8 = 4;

/// Provenance block embedded in every report. Everything except the wall
/// clock is a pure function of the invocation, so two runs that agree on
/// the rest of the manifest produce identical report bytes.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub input: String,
    pub input_sha256: String,
    pub config: Value,
    pub tool_version: String,
    pub seed: Option<u64>,
    pub wall_clock_seconds: f64,
}

/// A diagnosed failure: the stderr message plus the process exit code.
#[derive(Debug)]
pub struct Failure {
    pub message: String,
    pub code: u8,
}

impl Failure {
    pub fn invalid(message: impl Into<String>) -> Self {
        Failure {
            message: message.into(),
            code: EXIT_INVALID_INPUT,
        }
    }
}

impl From<SgiaError> for Failure {
    fn from(e: SgiaError) -> Self {
        let code = match &e {
            // The input was structurally fine; the computation itself
            // reports that the requested quantity does not exist.
            SgiaError::SingularSystem { .. } | SgiaError::ZeroProbabilityType { .. } => {
                EXIT_PROPERTY_FAILED
            }
            _ => EXIT_INVALID_INPUT,
        };
        Failure {
            message: e.to_string(),
            code,
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

/// Wrap the payload with its manifest and write canonical JSON plus a
/// trailing newline to `out` or stdout.
pub fn write_report(out: Option<&Path>, manifest: &RunManifest, report: &Value) -> Result<(), Failure> {
    let envelope = serde_json::json!({ "manifest": manifest, "report": report });
    let mut text = canonical_json(&envelope)?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| {
            Failure::invalid(format!("cannot write {}: {e}", path.display()))
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
