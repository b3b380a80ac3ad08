//! Sparse linear systems over the rationals.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;

use crate::ring::Rational;

/// One equation `sum_j row[j] x_j = rhs`.
#[derive(Clone, Debug, Default)]
pub struct Equation {
    pub row: BTreeMap<usize, Rational>,
    pub rhs: Rational,
}

impl Equation {
    pub fn add(&mut self, col: usize, c: &Rational) {
        let entry = self.row.entry(col).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.row.remove(&col);
        }
    }
}

fn axpy(target: &mut Equation, k: &Rational, source: &Equation) {
    for (&j, c) in &source.row {
        target.add(j, &(k * c));
    }
    target.rhs += k * &source.rhs;
}

/// Solves the system by sparse Gaussian elimination, setting free
/// variables to zero. Returns `None` when the system is inconsistent.
pub fn solve(equations: Vec<Equation>, unknowns: usize) -> Option<Vec<Rational>> {
    let mut pivots: Vec<(usize, Equation)> = Vec::new();
    let mut pivot_of: HashMap<usize, usize> = HashMap::new();
    for mut eq in equations {
        loop {
            let hit = eq
                .row
                .keys()
                .find_map(|j| pivot_of.get(j).map(|&p| (*j, p)));
            let Some((col, p)) = hit else { break };
            let k = -eq.row[&col].clone();
            axpy(&mut eq, &k, &pivots[p].1);
        }
        match eq.row.keys().next().copied() {
            Some(col) => {
                let lead = eq.row[&col].clone();
                let inv = lead.recip();
                let mut normalized = Equation::default();
                axpy(&mut normalized, &inv, &eq);
                pivot_of.insert(col, pivots.len());
                pivots.push((col, normalized));
            }
            None if !eq.rhs.is_zero() => return None,
            None => {}
        }
    }
    let mut x = vec![Rational::zero(); unknowns];
    for (col, eq) in pivots.iter().rev() {
        let mut value = eq.rhs.clone();
        for (&j, c) in &eq.row {
            if j != *col {
                value -= c * &x[j];
            }
        }
        x[*col] = value;
    }
    Some(x)
}
