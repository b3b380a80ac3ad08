//! Total derivatives, the variational derivative and their inverses.

use super::monomial::{JetVar, Monomial};
use super::poly::DiffPoly;
use super::system::{EvolutionSystem, Functional};
use crate::error::{Error, Result};
use crate::operator::PseudoDiffOp;
use crate::ring::{rat, ratio};

/// Total x-derivative: explicit x-dependence plus `u_k -> u_{k+1}`.
pub fn dx_total(p: &DiffPoly) -> DiffPoly {
    let mut out = p.partial_x();
    for (m, c) in p.terms() {
        for &(v, e) in m.jets() {
            let lowered = m.with_jet_exp(v, e - 1);
            let next = v.next();
            let raised = lowered.with_jet_exp(next, lowered.exponent(next) + 1);
            out.add_term(raised, c.scale(&rat(e as i64)));
        }
    }
    out
}

pub fn dx_total_n(p: &DiffPoly, n: usize) -> DiffPoly {
    let mut out = p.clone();
    for _ in 0..n {
        if out.is_zero() {
            break;
        }
        out = dx_total(&out);
    }
    out
}

/// Highest order of component `alpha` appearing in `p`.
fn component_order(p: &DiffPoly, alpha: usize) -> Option<usize> {
    p.jet_vars()
        .into_iter()
        .filter(|v| v.component as usize == alpha)
        .map(|v| v.order as usize)
        .max()
}

/// Action of the prolonged evolutionary field with characteristic `q` on
/// `p`, i.e. the Frechet derivative of `p` applied to `q`.
pub fn prolong_apply(q: &[DiffPoly], p: &DiffPoly) -> Result<DiffPoly> {
    if q.len() != p.components() {
        return Err(Error::ComponentMismatch {
            left: q.len(),
            right: p.components(),
        });
    }
    let mut out = p.space().zero();
    for (alpha, qa) in q.iter().enumerate() {
        qa.check_space(p)?;
        let Some(top) = component_order(p, alpha) else {
            continue;
        };
        let mut dq = qa.clone();
        for k in 0..=top {
            let partial = p.partial_jet(JetVar::new(alpha, k));
            if !partial.is_zero() {
                out = out + partial * &dq;
            }
            if k < top {
                dq = dx_total(&dq);
            }
        }
    }
    Ok(out)
}

/// Total t-derivative on solutions of `sys`.
pub fn dt_total(p: &DiffPoly, sys: &EvolutionSystem) -> Result<DiffPoly> {
    let flow = prolong_apply(sys.rhs(), p)?;
    Ok(p.partial_t() + flow)
}

/// Variational derivative, one entry per dependent variable.
pub fn euler(p: &DiffPoly) -> Vec<DiffPoly> {
    (0..p.components())
        .map(|alpha| {
            let mut acc = p.space().zero();
            if let Some(top) = component_order(p, alpha) {
                for k in 0..=top {
                    let partial = p.partial_jet(JetVar::new(alpha, k));
                    if partial.is_zero() {
                        continue;
                    }
                    let term = dx_total_n(&partial, k);
                    acc = if k % 2 == 0 { acc + term } else { acc - term };
                }
            }
            acc
        })
        .collect()
}

/// True when `p` lies in the image of the total x-derivative.
pub fn is_exact(p: &DiffPoly) -> bool {
    euler(p).iter().all(DiffPoly::is_zero)
}

/// Row of the Frechet derivative: one local operator per component,
/// `sum_k dP/du^alpha_k D_x^k`.
pub fn frechet_row(p: &DiffPoly) -> Vec<PseudoDiffOp> {
    (0..p.components())
        .map(|alpha| {
            let mut op = PseudoDiffOp::zero(p.space());
            if let Some(top) = component_order(p, alpha) {
                for k in 0..=top {
                    op.add_local(k as u32, p.partial_jet(JetVar::new(alpha, k)));
                }
            }
            op
        })
        .collect()
}

/// Frechet derivative of a scalar differential polynomial.
///
/// Panics when `p` has more than one dependent variable; use
/// [`frechet_row`] there.
pub fn frechet(p: &DiffPoly) -> PseudoDiffOp {
    assert_eq!(p.components(), 1, "frechet on a multi-component space");
    frechet_row(p).remove(0)
}

/// Finds `R` with `dx_total(R) == p`, dropping the constant of integration.
///
/// Peels off the top jet order one step at a time: at order `k` the
/// polynomial must be linear in the order-`k` jets, and the coefficient is
/// integrated along the order-`k-1` jets. The u-free remainder is then
/// integrated in x directly.
pub fn integrate_x(p: &DiffPoly) -> Result<DiffPoly> {
    let obstruction = euler(p);
    if obstruction.iter().any(|e| !e.is_zero()) {
        return Err(Error::not_exact(obstruction));
    }
    let mut rem = p.clone();
    let mut acc = p.space().zero();
    while let Some(k) = rem.jet_order() {
        if k == 0 {
            return Err(Error::not_exact(euler(&rem)));
        }
        let mut top = p.space().zero();
        for (m, c) in rem.terms() {
            let top_vars: Vec<(JetVar, u32)> = m
                .jets()
                .iter()
                .copied()
                .filter(|(v, _)| v.order as usize == k)
                .collect();
            match top_vars.as_slice() {
                [] => {}
                [(v, 1)] => {
                    let rest = m.with_jet_exp(*v, 0);
                    let below = JetVar::new(v.component as usize, k - 1);
                    let d: u32 = rest
                        .jets()
                        .iter()
                        .filter(|(w, _)| w.order as usize == k - 1)
                        .map(|&(_, e)| e)
                        .sum();
                    let lifted = rest.with_jet_exp(below, rest.exponent(below) + 1);
                    top.add_term(lifted, c.scale(&ratio(1, d as i64 + 1)));
                }
                _ => return Err(Error::not_exact(vec![rem.clone()])),
            }
        }
        rem = rem - dx_total(&top);
        acc = acc + top;
        if rem.jet_order().is_some_and(|o| o >= k) {
            return Err(Error::not_exact(euler(&rem)));
        }
    }
    let mut tail = p.space().zero();
    for (m, c) in rem.terms() {
        let a = m.x_exp() as i64;
        tail.add_term(m.with_x(m.x_exp() + 1), c.scale(&ratio(1, a + 1)));
    }
    Ok(acc + tail)
}

/// Helmholtz test: the Frechet matrix of `g` is self-adjoint, so that `g`
/// is the variational derivative of some density.
pub fn helmholtz_selfadjoint(g: &[DiffPoly]) -> bool {
    let rows: Vec<Vec<PseudoDiffOp>> = g.iter().map(frechet_row).collect();
    for (alpha, row) in rows.iter().enumerate() {
        for (beta, entry) in row.iter().enumerate() {
            let Some(mirror) = rows.get(beta).and_then(|r| r.get(alpha)) else {
                return false;
            };
            if *entry != mirror.adjoint() {
                return false;
            }
        }
    }
    true
}

/// Inverts the variational derivative with the homotopy formula
/// `T = int_0^1 u . g[lambda u] d lambda`.
pub fn reconstruct_density(g: &[DiffPoly]) -> Result<Functional> {
    let Some(first) = g.first() else {
        return Err(Error::NotVariational {
            reason: "empty tuple".into(),
        });
    };
    let space = first.space();
    if g.len() != space.components {
        return Err(Error::ComponentMismatch {
            left: g.len(),
            right: space.components,
        });
    }
    if !helmholtz_selfadjoint(g) {
        return Err(Error::NotVariational {
            reason: "Frechet derivative is not self-adjoint".into(),
        });
    }
    let mut density = space.zero();
    for (alpha, ga) in g.iter().enumerate() {
        let u = Monomial::jet(JetVar::new(alpha, 0), 1);
        for (m, c) in ga.terms() {
            let weight = ratio(1, m.degree() as i64 + 1);
            density.add_term(m.mul(&u), c.scale(&weight));
        }
    }
    if euler(&density) != g {
        return Err(Error::NotVariational {
            reason: "homotopy density does not reproduce the gradient".into(),
        });
    }
    Ok(Functional::new(density))
}
