//! Differential polynomials on the jet space of one spatial variable and
//! their calculus.
//!
//! Jet variables are pure x-derivatives `u_k`; t-derivatives are always
//! eliminated through the right-hand side of an [`EvolutionSystem`].
//! Explicit `x` and `t` enter as ordinary polynomial variables.

mod calculus;
mod monomial;
mod poly;
mod system;

pub use calculus::{
    dt_total, dx_total, dx_total_n, euler, frechet, frechet_row, helmholtz_selfadjoint,
    integrate_x, is_exact, prolong_apply, reconstruct_density,
};
pub use monomial::{JetVar, Monomial};
pub use poly::{default_names, jet_latex, jet_name, DiffPoly, DisplayPoly, Space};
pub use system::{EvolutionSystem, Functional};

#[cfg(test)]
mod tests;
