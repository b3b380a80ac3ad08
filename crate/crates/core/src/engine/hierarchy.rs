//! Hierarchies `K_{i+1} = R K_i` together with their conserved functionals.

use crate::error::{Error, Result};
use crate::hamiltonian::poisson_bracket;
use crate::jet::{DiffPoly, EvolutionSystem, Functional};
use crate::operator::PseudoDiffOp;

use super::{
    check_conservation, check_symmetry, noether_inverse_with, AnsatzBounds, CheckReport, Residual,
};

#[derive(Clone, Debug)]
pub struct HierarchyOptions {
    /// Abort once a flow exceeds this jet order.
    pub max_jet_order: usize,
    /// Second Hamiltonian operator for the involution checks; defaults to
    /// `R . D` when that composition closes.
    pub second_operator: Option<PseudoDiffOp>,
    pub ansatz: AnsatzBounds,
}

impl Default for HierarchyOptions {
    fn default() -> Self {
        HierarchyOptions {
            max_jet_order: 12,
            second_operator: None,
            ansatz: AnsatzBounds::default(),
        }
    }
}

/// Why generation ended early.
#[derive(Clone, Debug)]
pub struct Stop {
    /// Index of the flow that could not be produced.
    pub step: usize,
    pub reason: String,
    pub obstruction: Vec<DiffPoly>,
}

#[derive(Clone, Debug)]
pub struct HierarchyResult {
    /// `flows[0]` is the seed.
    pub flows: Vec<DiffPoly>,
    /// Functional with `D delta H_i == K_i`, when one was found.
    pub functionals: Vec<Option<Functional>>,
    /// Named checks: `symmetry K{i}`, `conservation H{i}`,
    /// `involution H{i} H{j} first|second`, `commutation K{i} K{j}`.
    pub checks: Vec<CheckReport>,
    pub stopped_at: Option<Stop>,
    pub notes: Vec<String>,
}

impl HierarchyResult {
    /// Every check that was run passed; an early stop is not a failure.
    pub fn checks_passed(&self) -> bool {
        self.checks.iter().all(CheckReport::passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub fn generate_hierarchy(
    r: &PseudoDiffOp,
    seed: &DiffPoly,
    n: usize,
    d: &PseudoDiffOp,
    sys: &EvolutionSystem,
) -> Result<HierarchyResult> {
    generate_hierarchy_with(r, seed, n, d, sys, &HierarchyOptions::default())
}

fn check_cap(k: &DiffPoly, step: usize, cap: usize) -> Result<()> {
    match k.jet_order() {
        Some(order) if order > cap => Err(Error::ResourceCap(format!(
            "flow {step} has jet order {order}, above the cap {cap}"
        ))),
        _ => Ok(()),
    }
}

/// Applies `R` up to `n` times starting from `seed`, inverting each flow
/// through `D` and checking symmetry, conservation, involution and mutual
/// commutation.
pub fn generate_hierarchy_with(
    r: &PseudoDiffOp,
    seed: &DiffPoly,
    n: usize,
    d: &PseudoDiffOp,
    sys: &EvolutionSystem,
    opts: &HierarchyOptions,
) -> Result<HierarchyResult> {
    check_cap(seed, 0, opts.max_jet_order)?;
    let mut notes = vec!["assumes the first operator is nondegenerate (not checked)".to_string()];
    let mut flows = vec![seed.clone()];
    let mut stopped_at = None;
    for step in 1..=n {
        match r.apply(&flows[step - 1]) {
            Ok(k) => {
                check_cap(&k, step, opts.max_jet_order)?;
                flows.push(k);
            }
            Err(e @ Error::NotExact { .. }) => {
                stopped_at = Some(Stop {
                    step,
                    reason: format!("applying the recursion operator to flow {}: {e}", step - 1),
                    obstruction: e.obstruction().map(<[_]>::to_vec).unwrap_or_default(),
                });
                break;
            }
            Err(e) => return Err(e),
        }
    }

    let mut functionals = Vec::with_capacity(flows.len());
    for (i, k) in flows.iter().enumerate() {
        match noether_inverse_with(k, d, &opts.ansatz) {
            Ok(f) => functionals.push(Some(f)),
            Err(e @ (Error::NotInImage { .. } | Error::NotVariational { .. })) => {
                notes.push(format!("flow {i} has no Hamiltonian functional: {e}"));
                functionals.push(None);
            }
            Err(e) => return Err(e),
        }
    }

    let mut checks = Vec::new();
    for (i, k) in flows.iter().enumerate() {
        checks.push(check_symmetry(k, sys)?.named(format!("symmetry K{i}")));
    }
    for (i, f) in functionals.iter().enumerate() {
        if let Some(f) = f {
            checks.push(check_conservation(f, sys)?.named(format!("conservation H{i}")));
        }
    }

    let second = match &opts.second_operator {
        Some(e) => Some(e.clone()),
        None => match r.compose(d) {
            Ok(e) => Some(e),
            Err(Error::Closure(msg)) => {
                notes.push(format!("second operator unavailable: {msg}"));
                None
            }
            Err(e) => return Err(e),
        },
    };
    let mut brackets = vec![("first", d.clone())];
    brackets.extend(second.map(|e| ("second", e)));
    for i in 0..functionals.len() {
        for j in i + 1..functionals.len() {
            let (Some(a), Some(b)) = (&functionals[i], &functionals[j]) else {
                continue;
            };
            for (label, op) in &brackets {
                let bracket = poisson_bracket(a, b, op)?;
                checks.push(CheckReport::from_residual(
                    format!("involution H{i} H{j} {label}"),
                    Residual::Tuple(bracket.gradient()),
                ));
            }
        }
    }

    for i in 0..flows.len() {
        let flow = EvolutionSystem::scalar(flows[i].clone())?;
        for (j, kj) in flows.iter().enumerate().skip(i + 1) {
            checks.push(check_symmetry(kj, &flow)?.named(format!("commutation K{i} K{j}")));
        }
    }

    Ok(HierarchyResult {
        flows,
        functionals,
        checks,
        stopped_at,
        notes,
    })
}
