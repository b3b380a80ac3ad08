use super::calculus::euler;
use super::poly::{DiffPoly, Space};
use crate::error::{Error, Result};

/// `u_t = K[u, eps]`, one right-hand side per dependent variable.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EvolutionSystem {
    rhs: Vec<DiffPoly>,
}

impl EvolutionSystem {
    pub fn new(rhs: Vec<DiffPoly>) -> Result<Self> {
        let Some(first) = rhs.first() else {
            return Err(Error::ComponentMismatch { left: 0, right: 1 });
        };
        let space = first.space();
        if rhs.len() != space.components {
            return Err(Error::ComponentMismatch {
                left: rhs.len(),
                right: space.components,
            });
        }
        for k in &rhs[1..] {
            first.check_space(k)?;
        }
        Ok(EvolutionSystem { rhs })
    }

    /// Scalar equation `u_t = k`.
    pub fn scalar(k: DiffPoly) -> Result<Self> {
        Self::new(vec![k])
    }

    pub fn rhs(&self) -> &[DiffPoly] {
        &self.rhs
    }

    pub fn space(&self) -> Space {
        self.rhs[0].space()
    }

    pub fn eps_order(&self) -> usize {
        self.space().eps_order
    }

    pub fn jet_order(&self) -> Option<usize> {
        self.rhs.iter().filter_map(DiffPoly::jet_order).max()
    }
}

/// `int T dx`, compared modulo total x-derivatives.
#[derive(Clone, Debug)]
pub struct Functional {
    pub density: DiffPoly,
    pub name: Option<String>,
}

impl Functional {
    pub fn new(density: DiffPoly) -> Self {
        Functional {
            density,
            name: None,
        }
    }

    pub fn named(density: DiffPoly, name: impl Into<String>) -> Self {
        Functional {
            density,
            name: Some(name.into()),
        }
    }

    pub fn space(&self) -> Space {
        self.density.space()
    }

    /// Variational derivative of the density.
    pub fn gradient(&self) -> Vec<DiffPoly> {
        euler(&self.density)
    }

    /// Equality modulo the image of the total x-derivative.
    pub fn equivalent(&self, other: &Functional) -> bool {
        match self.density.try_sub(&other.density) {
            Ok(diff) => euler(&diff).iter().all(DiffPoly::is_zero),
            Err(_) => false,
        }
    }

    pub fn is_trivial(&self) -> bool {
        euler(&self.density).iter().all(DiffPoly::is_zero)
    }
}
