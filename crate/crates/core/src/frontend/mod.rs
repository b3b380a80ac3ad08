//! Model files, command-line dispatch and report emitters.

pub mod cli;
pub mod lexer;
pub mod model;
pub mod parser;
pub mod report;

use thiserror::Error;

pub use lexer::Pos;
pub use model::Model;
pub use parser::parse_model;

/// Source of the built-in Gardner model.
pub const GARDNER: &str = include_str!("../../fixtures/gardner.jf");
/// Source of the built-in potential Burgers model.
pub const POTENTIAL_BURGERS: &str = include_str!("../../fixtures/potential_burgers.jf");

/// Source text of a built-in model, looked up by name.
pub fn builtin(name: &str) -> Option<&'static str> {
    match name {
        "gardner" => Some(GARDNER),
        "potential_burgers" => Some(POTENTIAL_BURGERS),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrontendError {
    #[error("{pos}: expected {}, found {found}", .expected.join(" or "))]
    Parse {
        pos: Pos,
        expected: Vec<String>,
        found: String,
    },

    #[error("{pos}: undeclared name `{name}`")]
    Name { pos: Pos, name: String },

    #[error("{pos}: {message}")]
    Semantic { pos: Pos, message: String },
}

#[cfg(test)]
mod tests;
