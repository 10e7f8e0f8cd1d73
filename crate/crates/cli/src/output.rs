//! File emission and the machine-readable error protocol.

use std::path::{Path, PathBuf};

use bohrstrip_core::certificate::digest_bytes;
use bohrstrip_core::io::series_to_string;
use bohrstrip_core::{Certificate, ComponentRef, Error as CoreError, SparseSeries};

/// CLI failure categories mapped onto exit codes:
/// 0 pass, 1 fail, 2 invalid input, 3 budget.
#[derive(Debug)]
pub enum CliError {
    CertificateFailed(String),
    Invalid(String),
    Budget(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::CertificateFailed(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Io(_) => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::CertificateFailed(_) => "certificate_failed",
            CliError::Invalid(_) => "invalid_input",
            CliError::Budget(_) => "budget",
            CliError::Io(_) => "io",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::CertificateFailed(m)
            | CliError::Invalid(m)
            | CliError::Budget(m)
            | CliError::Io(m) => m,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": { "kind": self.kind(), "message": self.message() }
        })
        .to_string()
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::BudgetExceeded { .. } | CoreError::ResourceLimit(_) => {
                CliError::Budget(e.to_string())
            }
            CoreError::CertificateMismatch(m) => CliError::CertificateFailed(m),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Wall-clock budget, checked between pipeline stages.
pub struct Deadline {
    start: std::time::Instant,
    max_seconds: f64,
}

impl Deadline {
    pub fn new(max_seconds: f64) -> Deadline {
        Deadline {
            start: std::time::Instant::now(),
            max_seconds,
        }
    }

    pub fn check(&self) -> CliResult<()> {
        let elapsed = self.start.elapsed().as_secs_f64();
        if elapsed > self.max_seconds {
            return Err(CliError::Budget(format!(
                "wall-clock budget exceeded: {elapsed:.1}s > {}s",
                self.max_seconds
            )));
        }
        Ok(())
    }
}

pub fn write_text(path: &Path, content: &str) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, content)?;
    Ok(())
}

pub fn write_series(path: &Path, series: &SparseSeries) -> CliResult<String> {
    let text = series_to_string(series);
    write_text(path, &text)?;
    Ok(digest_bytes(text.as_bytes()))
}

pub fn write_certificate(path: &Path, cert: &Certificate) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(cert)
        .map_err(|e| CliError::Io(format!("certificate serialization: {e}")))?;
    text.push('\n');
    write_text(path, &text)
}

/// Write a component series under out/components and return its reference.
pub fn write_component(out_dir: &Path, name: &str, series: &SparseSeries) -> CliResult<ComponentRef> {
    let rel = PathBuf::from("components").join(format!("{name}.json"));
    let sha256 = write_series(&out_dir.join(&rel), series)?;
    Ok(ComponentRef {
        role: name.to_string(),
        path: rel.to_string_lossy().into_owned(),
        sha256,
    })
}
