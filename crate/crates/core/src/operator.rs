//! Scalar (pseudo-)differential operators `sum a_j D_x^j + sum a D_x^{-1} b`.
//!
//! Nonlocal terms are kept in a canonical tensor form: the right factor of
//! every `a D_x^{-1} b` is expanded into eps-free monomials `n` and all eps
//! and rational weight is pushed into the left factor. Two operators are
//! equal iff their local coefficients and these left factors agree.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::One;

use crate::error::{Error, Result};
use crate::jet::{
    default_names, dt_total, dx_total, dx_total_n, integrate_x, prolong_apply, DiffPoly,
    EvolutionSystem, Monomial, Space,
};
use crate::ring::{rat, EpsPoly, Rational};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PseudoDiffOp {
    space: Space,
    local: BTreeMap<u32, DiffPoly>,
    nonlocal: BTreeMap<Monomial, DiffPoly>,
}

fn binomial(n: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

fn monomial_poly(space: Space, n: &Monomial) -> DiffPoly {
    DiffPoly::monomial(space, n.clone(), EpsPoly::one(space.eps_order))
}

impl PseudoDiffOp {
    pub fn zero(space: Space) -> Self {
        PseudoDiffOp {
            space,
            local: BTreeMap::new(),
            nonlocal: BTreeMap::new(),
        }
    }

    pub fn identity(space: Space) -> Self {
        Self::mult(space.one())
    }

    /// `D_x^k`.
    pub fn dx_pow(space: Space, k: u32) -> Self {
        let mut op = Self::zero(space);
        op.add_local(k, space.one());
        op
    }

    pub fn dx(space: Space) -> Self {
        Self::dx_pow(space, 1)
    }

    /// `D_x^{-1}`, i.e. `1 . D_x^{-1} . 1`.
    pub fn dxi(space: Space) -> Self {
        Self::nonlocal_term(&space.one(), &space.one())
    }

    /// Multiplication operator.
    pub fn mult(p: DiffPoly) -> Self {
        let mut op = Self::zero(p.space());
        op.add_local(0, p);
        op
    }

    /// `a . D_x^{-1} . b`.
    pub fn nonlocal_term(a: &DiffPoly, b: &DiffPoly) -> Self {
        let mut op = Self::zero(a.space());
        op.add_nonlocal(a, b);
        op
    }

    pub fn space(&self) -> Space {
        self.space
    }

    /// Adds `c D_x^j`.
    pub fn add_local(&mut self, j: u32, c: DiffPoly) {
        if c.is_zero() {
            return;
        }
        let sum = match self.local.remove(&j) {
            Some(prev) => prev + c,
            None => c,
        };
        if !sum.is_zero() {
            self.local.insert(j, sum);
        }
    }

    /// Adds `a D_x^{-1} b`.
    pub fn add_nonlocal(&mut self, a: &DiffPoly, b: &DiffPoly) {
        if a.is_zero() {
            return;
        }
        for (n, c) in b.terms() {
            let left = a.scale_eps(c);
            if left.is_zero() {
                continue;
            }
            let sum = match self.nonlocal.remove(n) {
                Some(prev) => prev + left,
                None => left,
            };
            if !sum.is_zero() {
                self.nonlocal.insert(n.clone(), sum);
            }
        }
    }

    pub fn local_terms(&self) -> impl Iterator<Item = (u32, &DiffPoly)> {
        self.local.iter().map(|(&j, c)| (j, c))
    }

    /// Nonlocal terms as `(left, right)` pairs in canonical form.
    pub fn nonlocal_terms(&self) -> impl Iterator<Item = (&DiffPoly, DiffPoly)> + '_ {
        self.nonlocal
            .iter()
            .map(|(n, a)| (a, monomial_poly(self.space, n)))
    }

    pub fn local_coefficient(&self, j: u32) -> Option<&DiffPoly> {
        self.local.get(&j)
    }

    pub fn is_zero(&self) -> bool {
        self.local.is_empty() && self.nonlocal.is_empty()
    }

    pub fn is_local(&self) -> bool {
        self.nonlocal.is_empty()
    }

    /// Highest power of `D_x` among local terms.
    pub fn order(&self) -> Option<u32> {
        self.local.keys().next_back().copied()
    }

    fn check(&self, other: &Self) -> Result<()> {
        self.space.one().check_space(&other.space.one())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (&j, c) in &other.local {
            out.add_local(j, c.clone());
        }
        for (n, a) in &other.nonlocal {
            out.add_nonlocal(a, &monomial_poly(self.space, n));
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    /// `p . A`, multiplying every coefficient on the left.
    pub fn left_mul(&self, p: &DiffPoly) -> Self {
        let mut out = Self::zero(self.space);
        for (&j, c) in &self.local {
            out.add_local(j, p * c);
        }
        for (n, a) in &self.nonlocal {
            out.add_nonlocal(&(p * a), &monomial_poly(self.space, n));
        }
        out
    }

    pub fn scale(&self, k: &Rational) -> Self {
        self.left_mul(&self.space.rational(k.clone()))
    }

    pub fn scale_eps(&self, k: &EpsPoly) -> Self {
        self.left_mul(&DiffPoly::from_eps(self.space, k.clone()))
    }

    /// Applies the coefficient map `f` to every local coefficient and to
    /// both factors of every nonlocal term, via the product rule for the
    /// latter: `(a D^-1 b)' = a' D^-1 b + a D^-1 b'`.
    fn derive_coefficients<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&DiffPoly) -> Result<DiffPoly>,
    {
        let mut out = Self::zero(self.space);
        for (&j, c) in &self.local {
            out.add_local(j, f(c)?);
        }
        for (n, a) in &self.nonlocal {
            let b = monomial_poly(self.space, n);
            out.add_nonlocal(&f(a)?, &b);
            out.add_nonlocal(a, &f(&b)?);
        }
        Ok(out)
    }

    /// Applies the operator to a differential function. Each nonlocal term
    /// requires `b . q` to be exactly integrable (modulo the eps powers that
    /// its left factor kills).
    pub fn apply(&self, q: &DiffPoly) -> Result<DiffPoly> {
        self.space.one().check_space(q)?;
        let p = self.space.eps_order;
        let mut out = self.space.zero();
        for (&j, c) in &self.local {
            out = out + c * dx_total_n(q, j as usize);
        }
        // Group nonlocal terms whose left factors are rational multiples of
        // each other, so that only the combined right factor must integrate.
        let mut groups: Vec<(DiffPoly, DiffPoly)> = Vec::new();
        for (n, a) in &self.nonlocal {
            let lc = a.leading_rational().expect("nonzero left factor");
            let normalized = a.scale(&(Rational::one() / &lc));
            let right = monomial_poly(self.space, n).scale(&lc);
            match groups.iter_mut().find(|(l, _)| *l == normalized) {
                Some((_, r)) => *r = &*r + &right,
                None => groups.push((normalized, right)),
            }
        }
        for (left, right) in groups {
            let v = left.eps_valuation().unwrap_or(0);
            let reduced = (right * q).truncate_eps(p - v)?;
            let integral = integrate_x(&reduced).map_err(|e| match e {
                Error::NotExact { obstruction } => {
                    Error::not_exact(obstruction.iter().map(|o| o.lift_eps(p)).collect())
                }
                other => other,
            })?;
            out = out + left * integral.lift_eps(p);
        }
        Ok(out)
    }

    /// Operator composition `A . B`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let space = self.space;
        let mut out = Self::zero(space);
        for (&j, a) in &self.local {
            for (&k, b) in &other.local {
                for (pow, coeff) in leibniz(j, b) {
                    out.add_local(pow + k, a * coeff);
                }
            }
            for (n, c) in &other.nonlocal {
                // D^j (c D^-1 n) = D^j(c) D^-1 n + sum_i D^(j-1-i) . (D^i(c) n)
                let npoly = monomial_poly(space, n);
                out.add_nonlocal(&(a * dx_total_n(c, j as usize)), &npoly);
                let mut ci = c.clone();
                for i in 0..j {
                    for (pow, coeff) in leibniz(j - 1 - i, &(&ci * &npoly)) {
                        out.add_local(pow, a * coeff);
                    }
                    ci = dx_total(&ci);
                }
            }
        }
        for (n, a) in &self.nonlocal {
            if let Some((m, c)) = other.nonlocal.iter().next() {
                return Err(Error::Closure(format!(
                    "({})*Dxi*({}) composed with ({})*Dxi*({})",
                    a,
                    monomial_poly(space, n),
                    c,
                    monomial_poly(space, m)
                )));
            }
            let npoly = monomial_poly(space, n);
            for (&k, b) in &other.local {
                // a D^-1 f D^k = sum_i (-1)^i a f^(i) D^(k-1-i) + (-1)^k a D^-1 f^(k)
                let mut fi = &npoly * b;
                for i in 0..k {
                    let term = a * &fi;
                    out.add_local(k - 1 - i, if i % 2 == 0 { term } else { -term });
                    fi = dx_total(&fi);
                }
                let left = if k % 2 == 0 { a.clone() } else { -a };
                out.add_nonlocal(&left, &fi);
            }
        }
        Ok(out)
    }

    /// Formal adjoint: `(a D^j)* = (-D)^j . a`, `(a D^-1 b)* = -b D^-1 a`.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.space);
        for (&j, a) in &self.local {
            for (pow, coeff) in leibniz(j, a) {
                out.add_local(pow, if j % 2 == 0 { coeff } else { -coeff });
            }
        }
        for (n, a) in &self.nonlocal {
            out.add_nonlocal(&-monomial_poly(self.space, n), a);
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.compose(other)?.try_sub(&other.compose(self)?)
    }

    /// Time derivative of the operator along the flow of `sys`: every
    /// coefficient is replaced by its total t-derivative.
    pub fn time_derivative(&self, sys: &EvolutionSystem) -> Result<Self> {
        self.derive_coefficients(|c| dt_total(c, sys))
    }

    /// Action of the prolonged evolutionary field with characteristic `q`
    /// on the coefficients.
    pub fn prolonged_action(&self, q: &[DiffPoly]) -> Result<Self> {
        self.derive_coefficients(|c| prolong_apply(q, c))
    }

    pub fn is_skew_adjoint(&self) -> bool {
        self.adjoint() == -self
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> DisplayOp<'a> {
        DisplayOp { op: self, names }
    }

    pub fn to_latex(&self) -> String {
        let names = default_names(self.space.components);
        self.to_latex_with(&names)
    }

    pub fn to_latex_with(&self, names: &[String]) -> String {
        let mut parts = Vec::new();
        for (&j, c) in &self.local {
            let d = match j {
                0 => String::new(),
                1 => "D_x".into(),
                _ => format!("D_x^{{{j}}}"),
            };
            parts.push(latex_scaled(c, &d, names));
        }
        for (left, right) in self.grouped_nonlocal() {
            let r = if right == self.space.one() {
                String::new()
            } else {
                latex_factor(&right, names)
            };
            parts.push(latex_scaled(&left, &format!("D_x^{{-1}}{r}"), names));
        }
        join_signed(parts)
    }

    /// Nonlocal terms regrouped by identical left factor, for printing.
    fn grouped_nonlocal(&self) -> Vec<(DiffPoly, DiffPoly)> {
        let mut groups: Vec<(DiffPoly, DiffPoly)> = Vec::new();
        for (a, b) in self.nonlocal_terms() {
            match groups.iter_mut().find(|(l, _)| l == a) {
                Some((_, r)) => *r = &*r + &b,
                None => groups.push((a.clone(), b)),
            }
        }
        groups
    }
}

/// `D_x^i . f` expanded by Leibniz: pairs `(power, coefficient)`.
fn leibniz(i: u32, f: &DiffPoly) -> Vec<(u32, DiffPoly)> {
    let mut out = Vec::with_capacity(i as usize + 1);
    let mut fl = f.clone();
    for l in 0..=i {
        if fl.is_zero() {
            break;
        }
        out.push((i - l, fl.scale(&rat(binomial(i, l)))));
        if l < i {
            fl = dx_total(&fl);
        }
    }
    out
}

fn latex_scaled(c: &DiffPoly, op: &str, names: &[String]) -> String {
    if op.is_empty() {
        return c.to_latex_with(names);
    }
    let s = latex_factor(c, names);
    match s.as_str() {
        "1" => op.to_string(),
        "-1" => format!("-{op}"),
        _ => format!("{s}{op}"),
    }
}

fn latex_factor(p: &DiffPoly, names: &[String]) -> String {
    let s = p.to_latex_with(names);
    if is_sum(&s) {
        format!("\\left({s}\\right)")
    } else {
        s
    }
}

fn join_signed(parts: Vec<String>) -> String {
    if parts.is_empty() {
        return "0".into();
    }
    let mut s = parts[0].clone();
    for part in &parts[1..] {
        match part.strip_prefix('-') {
            Some(rest) => {
                s.push_str(" - ");
                s.push_str(rest);
            }
            None => {
                s.push_str(" + ");
                s.push_str(part);
            }
        }
    }
    s
}

impl Add<&PseudoDiffOp> for &PseudoDiffOp {
    type Output = PseudoDiffOp;
    fn add(self, rhs: &PseudoDiffOp) -> PseudoDiffOp {
        self.try_add(rhs).expect("operator space mismatch")
    }
}

impl Sub<&PseudoDiffOp> for &PseudoDiffOp {
    type Output = PseudoDiffOp;
    fn sub(self, rhs: &PseudoDiffOp) -> PseudoDiffOp {
        self.try_sub(rhs).expect("operator space mismatch")
    }
}

impl Add for PseudoDiffOp {
    type Output = PseudoDiffOp;
    fn add(self, rhs: PseudoDiffOp) -> PseudoDiffOp {
        &self + &rhs
    }
}

impl Sub for PseudoDiffOp {
    type Output = PseudoDiffOp;
    fn sub(self, rhs: PseudoDiffOp) -> PseudoDiffOp {
        &self - &rhs
    }
}

impl Neg for &PseudoDiffOp {
    type Output = PseudoDiffOp;
    fn neg(self) -> PseudoDiffOp {
        self.scale(&rat(-1))
    }
}

impl Neg for PseudoDiffOp {
    type Output = PseudoDiffOp;
    fn neg(self) -> PseudoDiffOp {
        -&self
    }
}

pub struct DisplayOp<'a> {
    op: &'a PseudoDiffOp,
    names: &'a [String],
}

/// A monomial can still carry a two-term eps coefficient, so look at the text.
fn is_sum(s: &str) -> bool {
    s.contains(" + ") || s.contains(" - ")
}

fn text_factor(p: &DiffPoly, names: &[String]) -> String {
    let s = p.display_with(names).to_string();
    if is_sum(&s) {
        format!("({s})")
    } else {
        s
    }
}

fn text_scaled(c: &DiffPoly, op: &str, names: &[String]) -> String {
    let s = text_factor(c, names);
    match s.as_str() {
        "1" => op.to_string(),
        "-1" => format!("-{op}"),
        _ => format!("{s}*{op}"),
    }
}

impl fmt::Display for DisplayOp<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (&j, c) in &self.op.local {
            match j {
                0 => parts.push(c.display_with(self.names).to_string()),
                1 => parts.push(text_scaled(c, "Dx", self.names)),
                _ => parts.push(text_scaled(c, &format!("Dx^{j}"), self.names)),
            }
        }
        for (left, right) in self.op.grouped_nonlocal() {
            let op = if right == self.op.space.one() {
                "Dxi".to_string()
            } else {
                format!("Dxi*{}", text_factor(&right, self.names))
            };
            parts.push(text_scaled(&left, &op, self.names));
        }
        // Only the D_x^0 coefficient prints as a bare sum, and it comes first.
        write!(f, "{}", join_signed(parts))
    }
}

impl fmt::Display for PseudoDiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names(self.space.components);
        write!(f, "{}", self.display_with(&names))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{dx_total, EvolutionSystem};
    use crate::ring::ratio;

    fn s() -> Space {
        Space::scalar(1)
    }

    /// Second Hamiltonian operator of the Gardner equation.
    fn gardner_e() -> PseudoDiffOp {
        let s = s();
        let (u, u1, eps) = (s.u(0), s.u(1), s.eps());
        let mut e = PseudoDiffOp::zero(s);
        e.add_local(0, s.int(2) * &u1 + s.int(3) * &eps * &u * &u1);
        e.add_local(1, s.int(4) * &u + s.int(3) * &eps * u.pow(2));
        e.add_local(3, s.int(-1));
        e
    }

    fn gardner_r() -> PseudoDiffOp {
        let s = s();
        let (u, u1, eps) = (s.u(0), s.u(1), s.eps());
        let mut r = PseudoDiffOp::mult(s.int(4) * &u + s.int(3) * &eps * u.pow(2));
        r.add_local(2, s.int(-1));
        r.add_nonlocal(&((s.int(2) + s.int(3) * &eps * &u) * &u1), &s.one());
        r
    }

    #[test]
    fn apply_examples() {
        let s = s();
        let kbar1 = s.eps() * (s.int(6) * s.u(0) * s.u(1) - s.u(3));
        assert_eq!(gardner_r().apply(&(s.eps() * s.u(1))).unwrap(), kbar1);

        let r1 = PseudoDiffOp::dx(s) + PseudoDiffOp::mult(s.eps() * s.u(1));
        assert_eq!(r1.apply(&(s.eps() * s.u(1))).unwrap(), s.eps() * s.u(2));

        assert!(PseudoDiffOp::dx(s).apply(&s.one()).unwrap().is_zero());
    }

    #[test]
    fn apply_reports_obstruction() {
        let s = s();
        let err = PseudoDiffOp::dxi(s).apply(&s.u(1).pow(2)).unwrap_err();
        assert_eq!(err.obstruction().unwrap(), &[s.int(-2) * s.u(2)]);
    }

    #[test]
    fn eps_left_factor_relaxes_exactness() {
        // eps . D^-1 applied to u + eps*u_x^2: only the eps^0 part must integrate,
        // and u alone is not exact, so this fails; eps*u_x^2 alone is fine.
        let s = s();
        let op = PseudoDiffOp::nonlocal_term(&s.eps(), &s.one());
        assert!(op.apply(&(s.u(0) + s.eps() * s.u(1).pow(2))).is_err());
        assert!(op.apply(&(s.eps() * s.u(1).pow(2))).unwrap().is_zero());
    }

    #[test]
    fn compose_examples() {
        let s = s();
        let d = PseudoDiffOp::dx(s);
        assert_eq!(d.compose(&d).unwrap(), PseudoDiffOp::dx_pow(s, 2));

        let mut dk = PseudoDiffOp::dx_pow(s, 2);
        dk.add_local(1, s.int(2) * s.eps() * s.u(1));
        let half_x = PseudoDiffOp::mult(s.x().scale(&ratio(1, 2)));
        let mut expected = PseudoDiffOp::zero(s);
        expected.add_local(2, s.x().scale(&ratio(1, 2)));
        expected.add_local(1, s.one() + s.eps() * s.x() * s.u(1));
        expected.add_local(0, s.eps() * s.u(1));
        assert_eq!(dk.compose(&half_x).unwrap(), expected);

        let a = PseudoDiffOp::nonlocal_term(&s.u(0), &s.one());
        let b = PseudoDiffOp::nonlocal_term(&s.u(1), &s.one());
        assert!(matches!(a.compose(&b), Err(Error::Closure(_))));
    }

    #[test]
    fn e_times_dxi_is_r() {
        let s = s();
        assert_eq!(
            gardner_e().compose(&PseudoDiffOp::dxi(s)).unwrap(),
            gardner_r()
        );
        assert_eq!(
            gardner_r().compose(&PseudoDiffOp::dx(s)).unwrap(),
            gardner_e()
        );
    }

    #[test]
    fn adjoint_examples() {
        let s = s();
        assert_eq!(PseudoDiffOp::dx(s).adjoint(), -PseudoDiffOp::dx(s));
        let er = gardner_r().scale_eps(&EpsPoly::eps(1));
        let mut expected = PseudoDiffOp::mult(s.int(4) * s.eps() * s.u(0));
        expected.add_local(2, -s.eps());
        expected.add_nonlocal(&(s.int(-2) * s.eps()), &s.u(1));
        assert_eq!(er.adjoint(), expected);
        assert_eq!(gardner_e().adjoint(), -gardner_e());
    }

    #[test]
    fn commutator_examples() {
        let s = s();
        let mut dk = PseudoDiffOp::dx_pow(s, 2);
        dk.add_local(1, s.int(2) * s.eps() * s.u(1));
        let r1 = PseudoDiffOp::dx(s) + PseudoDiffOp::mult(s.eps() * s.u(1));
        assert_eq!(
            dk.commutator(&r1).unwrap(),
            PseudoDiffOp::mult(s.eps() * s.u(3))
        );
        assert!(PseudoDiffOp::dx(s)
            .commutator(&PseudoDiffOp::dx_pow(s, 3))
            .unwrap()
            .is_zero());
        let half_x = PseudoDiffOp::mult(s.x().scale(&ratio(1, 2)));
        assert_eq!(dk.commutator(&half_x).unwrap(), r1);
    }

    #[test]
    fn time_derivative_examples() {
        let s = s();
        let burgers = EvolutionSystem::scalar(s.u(2) + s.eps() * s.u(1).pow(2)).unwrap();
        let r1 = PseudoDiffOp::dx(s) + PseudoDiffOp::mult(s.eps() * s.u(1));
        assert_eq!(
            r1.time_derivative(&burgers).unwrap(),
            PseudoDiffOp::mult(s.eps() * s.u(3))
        );
        assert!(PseudoDiffOp::dx(s)
            .time_derivative(&burgers)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn gardner_r_time_derivative_matches_expansion() {
        let s = s();
        let (u, u1, u2, u3, u4, eps) = (s.u(0), s.u(1), s.u(2), s.u(3), s.u(4), s.eps());
        let k = s.int(6) * (&u + &eps * u.pow(2)) * &u1 - &u3;
        let gardner = EvolutionSystem::scalar(k).unwrap();
        let rt = gardner_r().time_derivative(&gardner).unwrap();
        let mut expected = PseudoDiffOp::mult(
            s.int(12) * &u * &u1 * (s.int(2) + s.int(5) * &eps * &u)
                - (s.int(4) + s.int(6) * &eps * &u) * &u3,
        );
        let nonlocal = s.int(6) * &u * &u2 * (s.int(2) + s.int(5) * &eps * &u)
            + s.int(12) * u1.pow(2) * (s.one() + s.int(5) * &eps * &u)
            - &u4 * (s.int(2) + s.int(3) * &eps * &u)
            - s.int(3) * &eps * &u1 * &u3;
        expected.add_nonlocal(&nonlocal, &s.one());
        assert_eq!(rt, expected);
        let _ = dx_total(&u);
    }

    #[test]
    fn text_form_is_readable() {
        assert_eq!(
            gardner_e().to_string(),
            "2*u_x + 3*eps*u*u_x + (4*u + 3*eps*u^2)*Dx - Dx^3"
        );
        assert_eq!(
            gardner_r().to_string(),
            "4*u + 3*eps*u^2 - Dx^2 + (2*u_x + 3*eps*u*u_x)*Dxi"
        );
        assert_eq!(PseudoDiffOp::dxi(s()).to_latex(), "D_x^{-1}");
    }
}
