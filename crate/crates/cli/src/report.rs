//! Exit codes and JSON error reports.

use grd_core::GrdError;
use serde_json::{json, Value};

pub const EXIT_OK: u8 = 0;
/// Parameters or arguments outside the mathematical domain.
pub const EXIT_DOMAIN: u8 = 1;
/// Unparseable input, unreadable files, bad flags.
pub const EXIT_MALFORMED: u8 = 2;
/// Valid parameters but the wrong case for the request.
pub const EXIT_CASE_MISMATCH: u8 = 3;
/// Numerical failure: caps, non-convergence, degenerate tables.
pub const EXIT_NUMERICAL: u8 = 4;
/// `grd check` found a disagreement.
pub const EXIT_CHECK_FAILED: u8 = 5;

#[derive(Debug)]
pub enum CliError {
    Grd(GrdError),
    Malformed(String),
    Io(std::io::Error),
}

impl From<GrdError> for CliError {
    fn from(e: GrdError) -> Self {
        CliError::Grd(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    pub fn malformed(msg: impl Into<String>) -> Self {
        CliError::Malformed(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Malformed(_) | CliError::Io(_) => EXIT_MALFORMED,
            CliError::Grd(e) => match e {
                GrdError::MethodCaseMismatch { .. }
                | GrdError::NotZeroSum { .. }
                | GrdError::NotNegativeIntegerSum { .. } => EXIT_CASE_MISMATCH,
                GrdError::CapExceeded { .. }
                | GrdError::NonConverged { .. }
                | GrdError::NegativeTruncatedWeight { .. }
                | GrdError::DegenerateWeights { .. }
                | GrdError::ToleranceNotReached { .. } => EXIT_NUMERICAL,
                _ => EXIT_DOMAIN,
            },
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            CliError::Malformed(m) => json!({ "code": "MalformedInput", "message": m }),
            CliError::Io(e) => json!({ "code": "Io", "message": e.to_string() }),
            CliError::Grd(e) => {
                let mut v = json!({ "code": e.code(), "message": e.to_string() });
                let extra = match e {
                    GrdError::TailSumViolation { k, tail } => json!({ "k": k, "tail": tail }),
                    GrdError::NonFiniteInput { k } => json!({ "k": k }),
                    GrdError::MgfDomainViolation { k, t, rate } => json!({ "k": k, "t": t, "rate": rate }),
                    GrdError::TiedOrZeroWeights { k } => json!({ "k": k }),
                    GrdError::NonConverged {
                        partial,
                        terms,
                        last_increment,
                    } => json!({ "partial": partial, "terms": terms, "last_increment": last_increment }),
                    _ => json!({}),
                };
                if let (Some(obj), Value::Object(more)) = (v.as_object_mut(), extra) {
                    obj.extend(more);
                }
                v
            }
        }
    }
}
