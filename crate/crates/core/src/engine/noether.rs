//! From a characteristic back to a conserved functional: solve
//! `D g == Q`, check that `g` is a variational derivative, integrate.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::jet::{
    frechet, helmholtz_selfadjoint, integrate_x, reconstruct_density, DiffPoly, Functional, JetVar,
    Monomial,
};
use crate::operator::PseudoDiffOp;
use crate::ring::{rat, EpsPoly};

use super::linsolve::{solve, Equation};

/// Search space for preimages under operators other than `D_x`. Unset
/// bounds default to the corresponding bound of the characteristic.
#[derive(Clone, Debug)]
pub struct AnsatzBounds {
    pub max_order: Option<usize>,
    /// Allowed excess of the jet degree of `g` over that of `Q`.
    pub degree_slack: u32,
    pub max_x_degree: Option<u32>,
    pub max_t_degree: Option<u32>,
    pub max_unknowns: usize,
}

impl Default for AnsatzBounds {
    fn default() -> Self {
        AnsatzBounds {
            max_order: None,
            degree_slack: 1,
            max_x_degree: None,
            max_t_degree: None,
            max_unknowns: 50_000,
        }
    }
}

/// Finds a functional `P` with `D delta P == Q` modulo eps^(p+1).
pub fn noether_inverse(q: &DiffPoly, d: &PseudoDiffOp) -> Result<Functional> {
    noether_inverse_with(q, d, &AnsatzBounds::default())
}

pub fn noether_inverse_with(
    q: &DiffPoly,
    d: &PseudoDiffOp,
    bounds: &AnsatzBounds,
) -> Result<Functional> {
    q.check_space(&d.space().one())?;
    if q.components() != 1 {
        return Err(Error::Unsupported(
            "Noether inversion for scalar characteristics only".into(),
        ));
    }
    let g = if *d == PseudoDiffOp::dx(d.space()) {
        integrate_x(q).map_err(|e| match e {
            Error::NotExact { obstruction } => Error::NotInImage {
                reason: "not a total x-derivative".into(),
                obstruction: Some(obstruction),
            },
            other => other,
        })?
    } else if d.is_local() {
        ansatz_preimage(q, d, bounds)?
    } else {
        return Err(Error::Unsupported(
            "Noether inversion for nonlocal operators".into(),
        ));
    };
    if !helmholtz_selfadjoint(std::slice::from_ref(&g)) {
        return Err(Error::NotVariational {
            reason: format!("preimage {g} has a non-self-adjoint Frechet derivative"),
        });
    }
    reconstruct_density(&[g])
}

/// All monomials in `u_0..u_order` of jet degree at most `degree`.
fn jet_monomials(order: usize, degree: u32) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    let mut frontier = vec![(Monomial::one(), 0usize)];
    for _ in 0..degree {
        let mut next = Vec::new();
        for (m, lowest) in &frontier {
            for k in *lowest..=order {
                let v = JetVar::new(0, k);
                let grown = m.with_jet_exp(v, m.exponent(v) + 1);
                out.push(grown.clone());
                next.push((grown, k));
            }
        }
        frontier = next;
    }
    out
}

#[derive(PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Image(Monomial, usize),
    Helmholtz(u32, Monomial, usize),
}

/// Bounded linear search for `g` with `D g == Q` and self-adjoint Frechet
/// derivative.
fn ansatz_preimage(q: &DiffPoly, d: &PseudoDiffOp, bounds: &AnsatzBounds) -> Result<DiffPoly> {
    let space = q.space();
    let p = space.eps_order;
    let order = bounds.max_order.unwrap_or(q.jet_order().unwrap_or(0));
    let degree = q.degree() + bounds.degree_slack;
    let xmax = bounds.max_x_degree.unwrap_or(q.x_degree());
    let tmax = bounds.max_t_degree.unwrap_or(q.t_degree());

    let mut unknowns: Vec<DiffPoly> = Vec::new();
    for m in jet_monomials(order, degree) {
        for a in 0..=xmax {
            for b in 0..=tmax {
                let mono = m.with_x(a).with_t(b);
                for j in 0..=p {
                    let c = EpsPoly::monomial(rat(1), j, p);
                    unknowns.push(DiffPoly::monomial(space, mono.clone(), c));
                }
            }
        }
    }
    if unknowns.len() > bounds.max_unknowns {
        return Err(Error::ResourceCap(format!(
            "ansatz needs {} unknowns (cap {})",
            unknowns.len(),
            bounds.max_unknowns
        )));
    }

    let mut rows: BTreeMap<Key, Equation> = BTreeMap::new();
    for (i, g) in unknowns.iter().enumerate() {
        for (m, c) in d.apply(g)?.terms() {
            for (e, v) in c.coeffs().iter().enumerate() {
                if !v.is_zero() {
                    rows.entry(Key::Image(m.clone(), e)).or_default().add(i, v);
                }
            }
        }
        let fr = frechet(g);
        let skew = fr.try_sub(&fr.adjoint())?;
        for (k, coeff) in skew.local_terms() {
            for (m, c) in coeff.terms() {
                for (e, v) in c.coeffs().iter().enumerate() {
                    if !v.is_zero() {
                        rows.entry(Key::Helmholtz(k, m.clone(), e))
                            .or_default()
                            .add(i, v);
                    }
                }
            }
        }
    }
    for (m, c) in q.terms() {
        for (e, v) in c.coeffs().iter().enumerate() {
            if !v.is_zero() {
                rows.entry(Key::Image(m.clone(), e)).or_default().rhs += v;
            }
        }
    }

    let not_found = || {
        Error::NotInImage {
        reason: format!(
            "no variational preimage with order <= {order}, degree <= {degree}, x-degree <= {xmax}, t-degree <= {tmax}"
        ),
        obstruction: None,
    }
    };
    let x = solve(rows.into_values().collect(), unknowns.len()).ok_or_else(not_found)?;
    let mut g = space.zero();
    for (coeff, basis) in x.iter().zip(&unknowns) {
        if !coeff.is_zero() {
            g = g + basis.scale(coeff);
        }
    }
    debug_assert_eq!(d.apply(&g)?, *q);
    Ok(g)
}
