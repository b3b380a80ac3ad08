use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::monomial::{JetVar, Monomial};
use crate::error::{Error, Result};
use crate::ring::{fmt_rational, rat, EpsPoly, Rational};

/// Shape shared by every value in a computation: number of dependent
/// variables and the eps truncation order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Space {
    pub components: usize,
    pub eps_order: usize,
}

impl Space {
    pub fn new(components: usize, eps_order: usize) -> Self {
        assert!(components >= 1, "at least one dependent variable");
        Space {
            components,
            eps_order,
        }
    }

    pub fn scalar(eps_order: usize) -> Self {
        Self::new(1, eps_order)
    }

    pub fn zero(self) -> DiffPoly {
        DiffPoly::zero(self)
    }

    pub fn one(self) -> DiffPoly {
        self.int(1)
    }

    pub fn int(self, n: i64) -> DiffPoly {
        self.rational(rat(n))
    }

    pub fn rational(self, c: Rational) -> DiffPoly {
        DiffPoly::monomial(self, Monomial::one(), EpsPoly::constant(c, self.eps_order))
    }

    pub fn eps(self) -> DiffPoly {
        DiffPoly::monomial(self, Monomial::one(), EpsPoly::eps(self.eps_order))
    }

    pub fn x(self) -> DiffPoly {
        DiffPoly::monomial(self, Monomial::x_pow(1), EpsPoly::one(self.eps_order))
    }

    pub fn t(self) -> DiffPoly {
        DiffPoly::monomial(self, Monomial::t_pow(1), EpsPoly::one(self.eps_order))
    }

    /// The `order`-th x-derivative of the first dependent variable.
    pub fn u(self, order: usize) -> DiffPoly {
        self.jet(0, order)
    }

    pub fn jet(self, component: usize, order: usize) -> DiffPoly {
        assert!(component < self.components, "component out of range");
        DiffPoly::monomial(
            self,
            Monomial::jet(JetVar::new(component, order), 1),
            EpsPoly::one(self.eps_order),
        )
    }
}

/// Differential polynomial in x, t and the jet variables with truncated
/// eps-polynomial coefficients. Zero coefficients are never stored, so
/// structural equality is mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DiffPoly {
    space: Space,
    terms: BTreeMap<Monomial, EpsPoly>,
}

impl DiffPoly {
    pub fn zero(space: Space) -> Self {
        DiffPoly {
            space,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(space: Space, m: Monomial, c: EpsPoly) -> Self {
        let mut p = Self::zero(space);
        p.add_term(m, c);
        p
    }

    pub fn from_eps(space: Space, c: EpsPoly) -> Self {
        Self::monomial(space, Monomial::one(), c)
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn eps_order(&self) -> usize {
        self.space.eps_order
    }

    pub fn components(&self) -> usize {
        self.space.components
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &EpsPoly)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> Option<&EpsPoly> {
        self.terms.get(m)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c * m` in place.
    pub fn add_term(&mut self, m: Monomial, c: EpsPoly) {
        assert_eq!(c.order(), self.space.eps_order, "coefficient order");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    fn add_scaled_rational(&mut self, m: Monomial, c: &EpsPoly, k: &Rational) {
        if k.is_one() {
            self.add_term(m, c.clone());
        } else {
            self.add_term(m, c.scale(k));
        }
    }

    pub(crate) fn check_space(&self, other: &Self) -> Result<()> {
        if self.space.eps_order != other.space.eps_order {
            return Err(Error::OrderMismatch {
                left: self.space.eps_order,
                right: other.space.eps_order,
            });
        }
        if self.space.components != other.space.components {
            return Err(Error::ComponentMismatch {
                left: self.space.components,
                right: other.space.components,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        let mut out = Self::zero(self.space);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let c = c1 * c2;
                if !c.is_zero() {
                    out.add_term(m1.mul(m2), c);
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        let mut out = Self::zero(self.space);
        if k.is_zero() {
            return out;
        }
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c.scale(k));
        }
        out
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&rat(k))
    }

    pub fn scale_eps(&self, k: &EpsPoly) -> Self {
        let mut out = Self::zero(self.space);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * k);
        }
        out
    }

    /// Multiplies by a monomial with coefficient one.
    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        let mut out = Self::zero(self.space);
        for (n, c) in &self.terms {
            out.terms.insert(n.mul(m), c.clone());
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = self.space.one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Highest jet order present, `None` when the polynomial is u-free.
    pub fn jet_order(&self) -> Option<usize> {
        self.terms
            .keys()
            .filter_map(|m| m.max_order())
            .max()
            .map(|o| o as usize)
    }

    /// Highest jet degree over all terms.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn x_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.x_exp()).max().unwrap_or(0)
    }

    pub fn t_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.t_exp()).max().unwrap_or(0)
    }

    pub fn is_u_free(&self) -> bool {
        self.terms.keys().all(|m| m.is_u_free())
    }

    pub fn depends_on_x(&self) -> bool {
        self.x_degree() > 0
    }

    /// Lowest eps degree appearing in any coefficient.
    pub fn eps_valuation(&self) -> Option<usize> {
        self.terms.values().filter_map(|c| c.valuation()).min()
    }

    /// The same polynomial with all jet variables set to zero.
    pub fn at_zero(&self) -> Self {
        let mut out = Self::zero(self.space);
        for (m, c) in &self.terms {
            if m.is_u_free() {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        out
    }

    /// Reinterprets with a lower truncation order.
    pub fn truncate_eps(&self, q: usize) -> Result<Self> {
        let space = Space::new(self.space.components, q);
        let mut out = Self::zero(space);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.truncate(q)?);
        }
        Ok(out)
    }

    /// Embeds into a higher truncation order.
    pub fn lift_eps(&self, q: usize) -> Self {
        let space = Space::new(self.space.components, q);
        let mut out = Self::zero(space);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c.lift(q));
        }
        out
    }

    /// The coefficient of `eps^d` as an eps-free polynomial of the same space.
    pub fn eps_part(&self, d: usize) -> Self {
        let mut out = Self::zero(self.space);
        for (m, c) in &self.terms {
            if d <= c.order() && !c.coeff(d).is_zero() {
                out.terms.insert(
                    m.clone(),
                    EpsPoly::constant(c.coeff(d).clone(), self.space.eps_order),
                );
            }
        }
        out
    }

    pub fn partial_jet(&self, v: JetVar) -> Self {
        let mut out = Self::zero(self.space);
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e > 0 {
                out.add_scaled_rational(m.with_jet_exp(v, e - 1), c, &rat(e as i64));
            }
        }
        out
    }

    pub fn partial_x(&self) -> Self {
        let mut out = Self::zero(self.space);
        for (m, c) in &self.terms {
            if m.x_exp() > 0 {
                out.add_scaled_rational(m.with_x(m.x_exp() - 1), c, &rat(m.x_exp() as i64));
            }
        }
        out
    }

    pub fn partial_t(&self) -> Self {
        let mut out = Self::zero(self.space);
        for (m, c) in &self.terms {
            if m.t_exp() > 0 {
                out.add_scaled_rational(m.with_t(m.t_exp() - 1), c, &rat(m.t_exp() as i64));
            }
        }
        out
    }

    /// Jet variables that occur, in canonical order.
    pub fn jet_vars(&self) -> Vec<JetVar> {
        let mut vars: Vec<JetVar> = self
            .terms
            .keys()
            .flat_map(|m| m.jets().iter().map(|&(v, _)| v))
            .collect();
        vars.sort();
        vars.dedup();
        vars
    }

    /// Leading rational coefficient (first stored term, lowest eps degree).
    pub fn leading_rational(&self) -> Option<Rational> {
        self.terms
            .values()
            .next()
            .and_then(|c| c.valuation().map(|d| c.coeff(d).clone()))
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> DisplayPoly<'a> {
        DisplayPoly { poly: self, names }
    }

    pub fn to_latex(&self) -> String {
        let names = default_names(self.space.components);
        latex_poly(self, &names)
    }

    pub fn to_latex_with(&self, names: &[String]) -> String {
        latex_poly(self, names)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&DiffPoly> for &DiffPoly {
            type Output = DiffPoly;
            fn $method(self, rhs: &DiffPoly) -> DiffPoly {
                self.$checked(rhs).expect("DiffPoly space mismatch")
            }
        }
        impl $trait<DiffPoly> for DiffPoly {
            type Output = DiffPoly;
            fn $method(self, rhs: DiffPoly) -> DiffPoly {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&DiffPoly> for DiffPoly {
            type Output = DiffPoly;
            fn $method(self, rhs: &DiffPoly) -> DiffPoly {
                (&self).$method(rhs)
            }
        }
        impl $trait<DiffPoly> for &DiffPoly {
            type Output = DiffPoly;
            fn $method(self, rhs: DiffPoly) -> DiffPoly {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        let mut out = DiffPoly::zero(self.space);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), -c);
        }
        out
    }
}

impl Neg for DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        -&self
    }
}

// ---------------------------------------------------------------------------
// printing

pub fn default_names(components: usize) -> Vec<String> {
    const NAMES: [&str; 4] = ["u", "v", "w", "z"];
    if components <= NAMES.len() {
        NAMES[..components].iter().map(|s| s.to_string()).collect()
    } else {
        (0..components).map(|i| format!("u{i}_")).collect()
    }
}

/// Text name of a jet: `u`, `u_x` .. `u_xxxx`, then `u{5}`.
pub fn jet_name(v: JetVar, names: &[String]) -> String {
    let base = &names[v.component as usize];
    match v.order {
        0 => base.clone(),
        k @ 1..=4 => format!("{base}_{}", "x".repeat(k as usize)),
        k => format!("{base}{{{k}}}"),
    }
}

pub fn jet_latex(v: JetVar, names: &[String]) -> String {
    let base = &names[v.component as usize];
    match v.order {
        0 => base.clone(),
        1 => format!("{base}_x"),
        k @ 2..=4 => format!("{base}_{{{}}}", "x".repeat(k as usize)),
        k => format!("{base}_{{({k})}}"),
    }
}

fn monomial_factors(m: &Monomial, names: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let pw = |base: String, e: u32| {
        if e == 1 {
            base
        } else {
            format!("{base}^{e}")
        }
    };
    if m.x_exp() > 0 {
        out.push(pw("x".into(), m.x_exp()));
    }
    if m.t_exp() > 0 {
        out.push(pw("t".into(), m.t_exp()));
    }
    for &(v, e) in m.jets() {
        out.push(pw(jet_name(v, names), e));
    }
    out
}

/// Terms grouped by eps degree, each as (rational coefficient, monomial).
fn eps_groups(p: &DiffPoly) -> Vec<(usize, Vec<(Rational, &Monomial)>)> {
    let mut groups = Vec::new();
    for d in 0..=p.space.eps_order {
        let terms: Vec<(Rational, &Monomial)> = p
            .terms
            .iter()
            .filter(|(_, c)| !c.coeff(d).is_zero())
            .map(|(m, c)| (c.coeff(d).clone(), m))
            .collect();
        if !terms.is_empty() {
            groups.push((d, terms));
        }
    }
    groups
}

pub struct DisplayPoly<'a> {
    poly: &'a DiffPoly,
    names: &'a [String],
}

impl fmt::Display for DisplayPoly<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let groups = eps_groups(self.poly);
        if groups.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, terms) in groups {
            for (c, m) in terms {
                if first {
                    if c.is_negative() {
                        write!(f, "-")?;
                    }
                } else if c.is_negative() {
                    write!(f, " - ")?;
                } else {
                    write!(f, " + ")?;
                }
                first = false;
                let mut factors = Vec::new();
                let mag = c.abs();
                if !mag.is_one() {
                    factors.push(fmt_rational(&mag));
                }
                match d {
                    0 => {}
                    1 => factors.push("eps".into()),
                    _ => factors.push(format!("eps^{d}")),
                }
                factors.extend(monomial_factors(m, self.names));
                if factors.is_empty() {
                    factors.push("1".into());
                }
                write!(f, "{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names(self.space.components);
        write!(f, "{}", self.display_with(&names))
    }
}

fn latex_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", c.numer(), c.denom())
    }
}

fn latex_monomial(m: &Monomial, names: &[String]) -> String {
    let pw = |base: String, e: u32| {
        if e == 1 {
            base
        } else {
            format!("{base}^{{{e}}}")
        }
    };
    let mut s = String::new();
    if m.x_exp() > 0 {
        s.push_str(&pw("x".into(), m.x_exp()));
    }
    if m.t_exp() > 0 {
        s.push_str(&pw("t".into(), m.t_exp()));
    }
    for &(v, e) in m.jets() {
        s.push_str(&pw(jet_latex(v, names), e));
    }
    s
}

fn latex_terms(terms: &[(Rational, &Monomial)], names: &[String]) -> String {
    let mut s = String::new();
    for (i, (c, m)) in terms.iter().enumerate() {
        if i == 0 {
            if c.is_negative() {
                s.push('-');
            }
        } else if c.is_negative() {
            s.push_str(" - ");
        } else {
            s.push_str(" + ");
        }
        let mag = c.abs();
        let mono = latex_monomial(m, names);
        if !mag.is_one() || mono.is_empty() {
            s.push_str(&latex_rational(&mag));
        }
        s.push_str(&mono);
    }
    s
}

fn latex_poly(p: &DiffPoly, names: &[String]) -> String {
    let groups = eps_groups(p);
    if groups.is_empty() {
        return "0".into();
    }
    let mut parts: Vec<String> = Vec::new();
    for (d, terms) in groups {
        let eps = match d {
            0 => String::new(),
            1 => "\\varepsilon".into(),
            _ => format!("\\varepsilon^{{{d}}}"),
        };
        let body = latex_terms(&terms, names);
        let part = if d == 0 {
            body
        } else if terms.len() == 1 {
            let (c, m) = &terms[0];
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "" };
            let coef = if mag.is_one() {
                String::new()
            } else {
                latex_rational(&mag)
            };
            let mono = latex_monomial(m, names);
            if mono.is_empty() {
                format!("{sign}{coef}{eps}")
            } else {
                format!("{sign}{coef}{eps} {mono}")
            }
        } else {
            format!("{eps}({body})")
        };
        parts.push(part);
    }
    let mut s = parts[0].clone();
    for part in &parts[1..] {
        if let Some(rest) = part.strip_prefix('-') {
            s.push_str(" - ");
            s.push_str(rest);
        } else {
            s.push_str(" + ");
            s.push_str(part);
        }
    }
    s
}
