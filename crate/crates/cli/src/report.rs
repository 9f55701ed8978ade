use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;

use fcssc_core::FcsscError;
use serde::Serialize;
use serde_json::json;

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DATA: u8 = 3;
pub const EXIT_INTERNAL: u8 = 4;

#[derive(Debug, Serialize)]
pub struct ReportEnvelope<'a, C: Serialize, P: Serialize> {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub command: &'static str,
    pub timestamp: String,
    pub config: &'a C,
    pub payload: P,
}

impl<'a, C: Serialize, P: Serialize> ReportEnvelope<'a, C, P> {
    pub fn new(command: &'static str, config: &'a C, payload: P) -> Self {
        ReportEnvelope {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION"),
            command,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
            config,
            payload,
        }
    }

    /// Pretty JSON to `output`, or stdout when absent.
    pub fn write(&self, output: Option<&Path>) -> Result<(), Failure> {
        let mut text =
            serde_json::to_string_pretty(self).map_err(|e| Failure::internal(e.to_string()))?;
        text.push('\n');
        match output {
            Some(path) => fs::write(path, text).map_err(|e| {
                Failure::usage(
                    "unwritable_output",
                    format!("cannot write {}: {e}", path.display()),
                )
            }),
            None => io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| Failure::internal(e.to_string())),
        }
    }
}

/// A failed run: exit status plus the error object printed to stderr.
#[derive(Debug)]
pub struct Failure {
    pub exit: u8,
    pub code: String,
    pub message: String,
}

impl Failure {
    pub fn usage(code: &str, message: impl Into<String>) -> Self {
        Failure {
            exit: EXIT_USAGE,
            code: code.into(),
            message: message.into(),
        }
    }

    pub fn data(code: &str, message: impl Into<String>) -> Self {
        Failure {
            exit: EXIT_DATA,
            code: code.into(),
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Failure {
            exit: EXIT_INTERNAL,
            code: "internal".into(),
            message: message.into(),
        }
    }

    fn kind(&self) -> &'static str {
        match self.exit {
            EXIT_USAGE => "usage",
            EXIT_DATA => "data",
            _ => "internal",
        }
    }

    pub fn emit(self) -> ExitCode {
        let body = json!({
            "schema_version": SCHEMA_VERSION,
            "error": {
                "kind": self.kind(),
                "code": self.code,
                "message": self.message,
                "exit_code": self.exit,
            }
        });
        eprintln!("{body}");
        ExitCode::from(self.exit)
    }
}

impl From<FcsscError> for Failure {
    fn from(e: FcsscError) -> Self {
        let exit = match &e {
            _ if e.is_validation() => EXIT_USAGE,
            FcsscError::Unreadable { .. } => EXIT_USAGE,
            FcsscError::ZeroCardinalityGranule => EXIT_INTERNAL,
            _ => EXIT_DATA,
        };
        Failure {
            exit,
            code: e.code().into(),
            message: e.to_string(),
        }
    }
}
