//! Shared random generators for the integration tests.
#![allow(dead_code)]

use jetsym::jet::{DiffPoly, JetVar, Monomial, Space};
use jetsym::operator::PseudoDiffOp;
use jetsym::ring::{rat, EpsPoly};
use proptest::prelude::*;

pub fn space() -> Space {
    Space::scalar(1)
}

pub fn arb_eps() -> impl Strategy<Value = EpsPoly> {
    (-3i64..=3, -3i64..=3).prop_map(|(a, b)| EpsPoly::from_coeffs(vec![rat(a), rat(b)], 1))
}

/// Jet monomial with factors up to `max_order`, optionally times `x^a t^b`.
pub fn arb_monomial(max_order: usize, with_xt: bool) -> impl Strategy<Value = Monomial> {
    let xt = if with_xt { 1u32 } else { 0 };
    (
        0..=xt,
        0..=xt,
        prop::collection::vec((0..=max_order, 1u32..=2), 0..=3),
    )
        .prop_map(|(x, t, jets)| {
            jets.into_iter()
                .fold(Monomial::one(), |m, (k, e)| {
                    m.mul(&Monomial::jet(JetVar::new(0, k), e))
                })
                .with_x(x)
                .with_t(t)
        })
}

pub fn arb_poly(
    max_order: usize,
    max_terms: usize,
    with_xt: bool,
) -> impl Strategy<Value = DiffPoly> {
    prop::collection::vec((arb_monomial(max_order, with_xt), arb_eps()), 0..=max_terms).prop_map(
        |terms| {
            terms.into_iter().fold(space().zero(), |acc, (m, c)| {
                acc + DiffPoly::monomial(space(), m, c)
            })
        },
    )
}

/// `sum_j c_j D_x^j` with `j <= max_power`.
pub fn arb_local_op(max_power: u32) -> impl Strategy<Value = PseudoDiffOp> {
    prop::collection::vec((0..=max_power, arb_poly(2, 2, true)), 0..=3).prop_map(|terms| {
        let mut op = PseudoDiffOp::zero(space());
        for (j, c) in terms {
            op.add_local(j, c);
        }
        op
    })
}

/// A local operator plus up to two terms `a D_x^{-1} b`.
pub fn arb_pseudo_op() -> impl Strategy<Value = PseudoDiffOp> {
    (
        arb_local_op(2),
        prop::collection::vec((arb_poly(2, 2, true), arb_poly(2, 2, false)), 0..=2),
    )
        .prop_map(|(mut op, nonlocal)| {
            for (a, b) in nonlocal {
                op.add_nonlocal(&a, &b);
            }
            op
        })
}
