//! Functional multi-vectors `int f theta_{k1} ^ ... ^ theta_{kn} dx` for a
//! scalar dependent variable.
//!
//! `theta_k` stands for the k-th x-derivative of the anticommuting
//! direction `theta`. Vanishing modulo total derivatives is decided with the
//! graded Euler operator in `theta`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::jet::{dx_total, is_exact, DiffPoly, Space};
use crate::operator::PseudoDiffOp;
use crate::ring::ratio;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiVector {
    space: Space,
    grade: usize,
    terms: BTreeMap<Vec<u32>, DiffPoly>,
}

/// Sorts wedge factors, returning the Koszul sign, or `None` when a factor
/// repeats.
fn normalize(orders: &[u32]) -> Option<(bool, Vec<u32>)> {
    let mut v = orders.to_vec();
    let mut odd = false;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((odd, v))
}

impl MultiVector {
    pub fn zero(space: Space, grade: usize) -> Self {
        MultiVector {
            space,
            grade,
            terms: BTreeMap::new(),
        }
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sorted factor orders with their coefficients.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &DiffPoly)> {
        self.terms.iter().map(|(k, c)| (k.as_slice(), c))
    }

    /// Adds `c theta_{orders[0]} ^ theta_{orders[1]} ^ ...`.
    pub fn add_term(&mut self, orders: &[u32], c: DiffPoly) {
        assert_eq!(orders.len(), self.grade, "wedge factor count");
        if c.is_zero() {
            return;
        }
        let Some((odd, key)) = normalize(orders) else {
            return;
        };
        let c = if odd { -c } else { c };
        let sum = match self.terms.remove(&key) {
            Some(prev) => prev + c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(key, sum);
        }
    }

    fn add(&mut self, other: &MultiVector) {
        for (k, c) in &other.terms {
            self.add_term(k, c.clone());
        }
    }

    /// `op(theta)` for a local operator, as a one-vector.
    pub fn from_operator(op: &PseudoDiffOp) -> Result<Self> {
        if !op.is_local() {
            return Err(Error::Unsupported(
                "multi-vectors require a local operator".into(),
            ));
        }
        let mut out = Self::zero(op.space(), 1);
        for (j, a) in op.local_terms() {
            out.add_term(&[j], a.clone());
        }
        Ok(out)
    }

    /// `1/2 int theta ^ op(theta) dx`.
    pub fn bivector(op: &PseudoDiffOp) -> Result<Self> {
        let theta_op = Self::from_operator(op)?;
        let half = ratio(1, 2);
        let mut out = Self::zero(op.space(), 2);
        for (k, c) in &theta_op.terms {
            out.add_term(&[0, k[0]], c.scale(&half));
        }
        Ok(out)
    }

    pub fn wedge(&self, other: &MultiVector) -> Self {
        let mut out = Self::zero(self.space, self.grade + other.grade);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let orders: Vec<u32> = a.iter().chain(b).copied().collect();
                out.add_term(&orders, ca * cb);
            }
        }
        out
    }

    /// Total x-derivative, acting on coefficients and on every factor.
    pub fn total_derivative(&self) -> Self {
        let mut out = Self::zero(self.space, self.grade);
        for (k, c) in &self.terms {
            out.add_term(k, dx_total(c));
            for i in 0..k.len() {
                let mut raised = k.clone();
                raised[i] += 1;
                out.add_term(&raised, c.clone());
            }
        }
        out
    }

    fn total_derivative_n(&self, n: u32) -> Self {
        (0..n).fold(self.clone(), |acc, _| acc.total_derivative())
    }

    /// Graded Euler operator `sum_m (-D_x)^m d/dtheta_m`, with the left
    /// derivative picking up `(-1)^position`.
    pub fn theta_euler(&self) -> Self {
        assert!(self.grade > 0, "theta-Euler of a zero-vector");
        let mut out = Self::zero(self.space, self.grade - 1);
        for (k, c) in &self.terms {
            for (i, &m) in k.iter().enumerate() {
                let mut rest = k.clone();
                rest.remove(i);
                let negate = (i + m as usize) % 2 == 1;
                let mut single = Self::zero(self.space, self.grade - 1);
                single.add_term(&rest, if negate { -c } else { c.clone() });
                out.add(&single.total_derivative_n(m));
            }
        }
        out
    }

    /// True when the integral vanishes, i.e. the integrand is a total
    /// derivative.
    pub fn vanishes(&self) -> bool {
        if self.grade == 0 {
            return self.terms.values().all(is_exact);
        }
        self.theta_euler().is_zero()
    }

    /// Text form `(c)*th_0^th_2 + ...`, with `th_k` for `theta_k`.
    pub fn display_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| {
                let wedge: Vec<String> = k.iter().map(|m| format!("th_{m}")).collect();
                format!("({})*{}", c.display_with(names), wedge.join("^"))
            })
            .collect();
        parts.join(" + ")
    }

    pub fn to_latex_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| {
                let wedge: Vec<String> = k.iter().map(|m| format!("\\theta_{{{m}}}")).collect();
                format!("({})\\,{}", c.to_latex_with(names), wedge.join("\\wedge "))
            })
            .collect();
        parts.join(" + ")
    }
}

/// `pr v_{P theta}(Theta_D)` where `Theta_D = 1/2 int theta ^ D theta`: each
/// coefficient derivative `da_j/du_k` contributes `theta ^ D_x^k(P theta) ^ theta_j`.
pub fn prolonged_bivector(p: &PseudoDiffOp, d: &PseudoDiffOp) -> Result<MultiVector> {
    let p_theta = MultiVector::from_operator(p)?;
    if !d.is_local() {
        return Err(Error::Unsupported(
            "multi-vectors require a local operator".into(),
        ));
    }
    let half = ratio(1, 2);
    let mut out = MultiVector::zero(d.space(), 3);
    for (j, a) in d.local_terms() {
        for v in a.jet_vars() {
            let partial = a.partial_jet(v).scale(&half);
            let direction = p_theta.total_derivative_n(v.order as u32);
            for (m, b) in &direction.terms {
                out.add_term(&[0, m[0], j], &partial * b);
            }
        }
    }
    Ok(out)
}
