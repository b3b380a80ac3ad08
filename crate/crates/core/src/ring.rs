//! Truncated polynomials in the perturbation parameter over exact rationals.
//!
//! Every coefficient in the engine lives in `Q[eps] / (eps^(p+1))`. The order
//! `p` travels with each value; combining values of different orders is an
//! error rather than a silent promotion.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Element of `Q[eps] / (eps^(order+1))`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct EpsPoly {
    coeffs: Vec<Rational>,
}

impl EpsPoly {
    pub fn zero(order: usize) -> Self {
        EpsPoly {
            coeffs: vec![Rational::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Rational::one(), order)
    }

    pub fn constant(c: Rational, order: usize) -> Self {
        let mut p = Self::zero(order);
        p.coeffs[0] = c;
        p
    }

    /// `c * eps^degree`, which is zero when `degree > order`.
    pub fn monomial(c: Rational, degree: usize, order: usize) -> Self {
        let mut p = Self::zero(order);
        if degree <= order {
            p.coeffs[degree] = c;
        }
        p
    }

    pub fn eps(order: usize) -> Self {
        Self::monomial(Rational::one(), 1, order)
    }

    /// Builds from a coefficient list, padding with zeros and dropping
    /// anything above `order`.
    pub fn from_coeffs(mut coeffs: Vec<Rational>, order: usize) -> Self {
        coeffs.resize(order + 1, Rational::zero());
        EpsPoly { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, degree: usize) -> &Rational {
        &self.coeffs[degree]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// Lowest degree with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// The value when only the constant coefficient is nonzero.
    pub fn as_constant(&self) -> Option<&Rational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(EpsPoly {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(EpsPoly {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let p = self.order();
        let mut out = Self::zero(p);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=p - i].iter().enumerate() {
                if !b.is_zero() {
                    out.coeffs[i + j] += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn try_eq(&self, other: &Self) -> Result<bool> {
        self.check(other)?;
        Ok(self == other)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        EpsPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Drops all degrees above `q`; the result has order `q`.
    pub fn truncate(&self, q: usize) -> Result<Self> {
        if q > self.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: q,
            });
        }
        Ok(EpsPoly {
            coeffs: self.coeffs[..=q].to_vec(),
        })
    }

    /// Embeds into a higher order by padding with zeros.
    pub fn lift(&self, q: usize) -> Self {
        assert!(q >= self.order(), "lift must not lower the order");
        Self::from_coeffs(self.coeffs.clone(), q)
    }

    /// Multiplies by `eps^k`.
    pub fn shift(&self, k: usize) -> Self {
        let p = self.order();
        let mut out = Self::zero(p);
        for d in 0..=p {
            if d + k <= p {
                out.coeffs[d + k] = self.coeffs[d].clone();
            }
        }
        out
    }

    pub fn evaluate(&self, eps: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * eps + c.to_f64().unwrap_or(f64::NAN))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&EpsPoly> for &EpsPoly {
            type Output = EpsPoly;
            fn $method(self, rhs: &EpsPoly) -> EpsPoly {
                self.$checked(rhs).expect("EpsPoly order mismatch")
            }
        }
        impl $trait<EpsPoly> for EpsPoly {
            type Output = EpsPoly;
            fn $method(self, rhs: EpsPoly) -> EpsPoly {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &EpsPoly {
    type Output = EpsPoly;
    fn neg(self) -> EpsPoly {
        EpsPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for EpsPoly {
    type Output = EpsPoly;
    fn neg(self) -> EpsPoly {
        -&self
    }
}

pub(crate) fn fmt_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for EpsPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            match d {
                0 => write!(f, "{}", fmt_rational(&mag))?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{}*", fmt_rational(&mag))?;
                    }
                    if d == 1 {
                        write!(f, "eps")?;
                    } else {
                        write!(f, "eps^{d}")?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ep(c: &[i64], p: usize) -> EpsPoly {
        EpsPoly::from_coeffs(c.iter().map(|&n| rat(n)).collect(), p)
    }

    #[test]
    fn product_examples() {
        assert_eq!(ep(&[1, 1], 1) * ep(&[1, -1], 1), EpsPoly::one(1));
        assert!((EpsPoly::eps(1) * EpsPoly::eps(1)).is_zero());
        assert_eq!(ep(&[2, 3], 1) * ep(&[4, 5], 1), ep(&[8, 22], 1));
    }

    #[test]
    fn truncate_examples() {
        assert_eq!(ep(&[8, 22], 1).truncate(0).unwrap(), ep(&[8], 0));
        assert_eq!(EpsPoly::eps(1).truncate(1).unwrap(), EpsPoly::eps(1));
        assert_eq!(ep(&[3, 0], 1).truncate(0).unwrap(), ep(&[3], 0));
        assert!(matches!(
            ep(&[3], 0).truncate(1),
            Err(Error::OrderMismatch { .. })
        ));
    }

    #[test]
    fn mixed_orders_rejected() {
        assert!(ep(&[1], 0).try_add(&ep(&[1, 1], 1)).is_err());
        assert!(ep(&[1], 0).try_mul(&ep(&[1, 1], 1)).is_err());
        assert!(ep(&[1], 0).try_eq(&ep(&[1, 0], 1)).is_err());
    }

    #[test]
    fn display() {
        assert_eq!(ep(&[0, 0], 1).to_string(), "0");
        assert_eq!(ep(&[2, -1], 1).to_string(), "2 - eps");
        assert_eq!(
            EpsPoly::from_coeffs(vec![ratio(1, 2), rat(0), rat(3)], 2).to_string(),
            "1/2 + 3*eps^2"
        );
    }

    fn arb_eps(order: usize) -> impl Strategy<Value = EpsPoly> {
        prop::collection::vec((-6i64..6, 1i64..4), order + 1).prop_map(move |v| {
            EpsPoly::from_coeffs(v.into_iter().map(|(n, d)| ratio(n, d)).collect(), order)
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_eps(2), b in arb_eps(2), c in arb_eps(2)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
        }

        #[test]
        fn truncation_is_homomorphism(a in arb_eps(2), b in arb_eps(2)) {
            let lhs = (&a * &b).truncate(0).unwrap();
            let rhs = a.truncate(0).unwrap() * b.truncate(0).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn eps_is_nilpotent(a in arb_eps(3)) {
            let mut x = a.clone();
            for _ in 0..4 {
                x = &x * &EpsPoly::eps(3);
            }
            prop_assert!(x.is_zero());
        }
    }
}
