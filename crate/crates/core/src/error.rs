//! Crate-wide error type.

use thiserror::Error;

use crate::jet::DiffPoly;

pub type Result<T> = std::result::Result<T, Error>;

fn fmt_tuple(polys: &[DiffPoly]) -> String {
    match polys {
        [single] => single.to_string(),
        _ => {
            let parts: Vec<String> = polys.iter().map(|p| p.to_string()).collect();
            format!("({})", parts.join(", "))
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("truncation order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("component count mismatch: {left} vs {right}")]
    ComponentMismatch { left: usize, right: usize },

    /// The expression is not a total x-derivative; `obstruction` is its
    /// variational derivative (or the offending remainder).
    #[error("not a total x-derivative; obstruction {}", fmt_tuple(.obstruction))]
    NotExact { obstruction: Vec<DiffPoly> },

    #[error("not variational: {reason}")]
    NotVariational { reason: String },

    #[error("characteristic is not in the image of the operator: {reason}")]
    NotInImage {
        reason: String,
        obstruction: Option<Vec<DiffPoly>>,
    },

    #[error("composition leaves the representable operator class: {0}")]
    Closure(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("integration diverged at step {step}")]
    Diverged { step: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

impl Error {
    pub fn not_exact(obstruction: Vec<DiffPoly>) -> Self {
        Error::NotExact { obstruction }
    }

    /// Obstruction carried by exactness failures, if any.
    pub fn obstruction(&self) -> Option<&[DiffPoly]> {
        match self {
            Error::NotExact { obstruction } => Some(obstruction),
            Error::NotInImage {
                obstruction: Some(o),
                ..
            } => Some(o),
            _ => None,
        }
    }
}
