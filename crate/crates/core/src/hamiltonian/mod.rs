//! Hamiltonian operators, Poisson brackets of functionals and the
//! compatibility test for Hamiltonian pairs.

mod multivector;

pub use multivector::{prolonged_bivector, MultiVector};

use crate::error::{Error, Result};
use crate::jet::{frechet, DiffPoly, EvolutionSystem, Functional};
use crate::operator::PseudoDiffOp;

fn scalar_gradient(f: &Functional) -> Result<DiffPoly> {
    let mut g = f.gradient();
    if g.len() != 1 {
        return Err(Error::Unsupported(
            "Hamiltonian operators act on a single dependent variable".into(),
        ));
    }
    Ok(g.remove(0))
}

pub fn is_skew_adjoint(d: &PseudoDiffOp) -> bool {
    d.is_skew_adjoint()
}

/// Characteristic `D . delta H` of the Hamiltonian vector field.
pub fn ham_vector_field(d: &PseudoDiffOp, h: &Functional) -> Result<DiffPoly> {
    d.apply(&scalar_gradient(h)?)
}

/// `{P, L}_D = int delta P . D delta L dx`.
pub fn poisson_bracket(p: &Functional, l: &Functional, d: &PseudoDiffOp) -> Result<Functional> {
    let flow = ham_vector_field(d, l)?;
    Ok(Functional::new(scalar_gradient(p)? * flow))
}

/// True when the bracket of `p` and `l` vanishes as a functional.
pub fn in_involution(p: &Functional, l: &Functional, d: &PseudoDiffOp) -> Result<bool> {
    Ok(poisson_bracket(p, l, d)?.is_trivial())
}

/// `D . delta G == 0`: the functional generates the trivial flow.
pub fn is_distinguished(g: &Functional, d: &PseudoDiffOp) -> Result<bool> {
    Ok(ham_vector_field(d, g)?.is_zero())
}

/// Compatibility of two skew-adjoint local operators:
/// `pr v_{D theta}(Theta_E) + pr v_{E theta}(Theta_D)` must vanish.
///
/// With `e == d` this is the Jacobi identity for `d` alone.
pub fn pair_check(d: &PseudoDiffOp, e: &PseudoDiffOp) -> Result<bool> {
    if !d.is_local() || !e.is_local() {
        return Err(Error::Unsupported(
            "pair check is implemented for local operators only".into(),
        ));
    }
    if !d.is_skew_adjoint() || !e.is_skew_adjoint() {
        return Ok(false);
    }
    Ok(pair_residual(d, e)?.is_zero())
}

/// Graded Euler derivative of the cross term in [`pair_check`]; zero
/// exactly when the trivector integral vanishes. Skew-adjointness is not
/// checked here.
pub fn pair_residual(d: &PseudoDiffOp, e: &PseudoDiffOp) -> Result<MultiVector> {
    let mut cross = prolonged_bivector(d, e)?;
    for (k, c) in prolonged_bivector(e, d)?.terms() {
        cross.add_term(k, c.clone());
    }
    Ok(cross.theta_euler())
}

/// Jacobi identity for a single local operator.
pub fn is_hamiltonian(d: &PseudoDiffOp) -> Result<bool> {
    pair_check(d, d)
}

/// Checks `pr v_K(D) == D_K . D + D . D_K*` where `K = D delta H` must be
/// the right-hand side of `sys`. Returns false when it is not.
pub fn flow_derivative_identity(
    d: &PseudoDiffOp,
    sys: &EvolutionSystem,
    h: &Functional,
) -> Result<bool> {
    if sys.rhs().len() != 1 {
        return Err(Error::Unsupported(
            "flow derivative identity for scalar systems only".into(),
        ));
    }
    let k = ham_vector_field(d, h)?;
    if k != sys.rhs()[0] {
        return Ok(false);
    }
    let dk = frechet(&k);
    let lhs = d.prolonged_action(sys.rhs())?;
    let rhs = dk.compose(d)?.try_add(&d.compose(&dk.adjoint())?)?;
    Ok(lhs == rhs)
}
