// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use setflow_core::certificates::CertificateError;
use setflow_core::comparison::ComparisonError;
use setflow_core::convex::GeometryError;
use setflow_core::semiflow::SemiflowError;
use thiserror::Error;

pub const EXIT_FAILED_CHECK: i32 = 1;
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_BLOWUP: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("schema: {0}")]
    Schema(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Semiflow(#[from] SemiflowError),
    #[error(transparent)]
    Comparison(#[from] ComparisonError),
    #[error(transparent)]
    Certificate(#[from] CertificateError),
    #[error("{0}")]
    Body(String),
}

impl CliError {
    pub fn schema(msg: impl Into<String>) -> Self {
        Self::Schema(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn is_blowup(&self) -> bool {
        matches!(
            self,
            Self::Semiflow(SemiflowError::BlowUp { .. })
                | Self::Comparison(ComparisonError::BlowUp { .. })
                | Self::Certificate(CertificateError::Semiflow(SemiflowError::BlowUp { .. }))
                | Self::Certificate(CertificateError::Comparison(ComparisonError::BlowUp { .. }))
        )
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Schema(_) | Self::Body(_) => EXIT_SCHEMA,
            e if e.is_blowup() => EXIT_BLOWUP,
            _ => EXIT_FAILED_CHECK,
        }
    }
}
