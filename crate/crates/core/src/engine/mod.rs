//! Top-level analyses: symmetries, conservation laws, the Noether
//! correspondence, recursion operators and bi-Hamiltonian hierarchies.

mod hierarchy;
mod linsolve;
mod noether;

pub use hierarchy::{
    generate_hierarchy, generate_hierarchy_with, HierarchyOptions, HierarchyResult, Stop,
};
pub use noether::{noether_inverse, noether_inverse_with, AnsatzBounds};

use crate::error::{Error, Result};
use crate::hamiltonian::MultiVector;
use crate::jet::{
    dt_total, euler, frechet, integrate_x, prolong_apply, DiffPoly, EvolutionSystem, Functional,
};
use crate::operator::PseudoDiffOp;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        }
    }
}

/// What a check leaves behind; the check passes iff this is zero.
#[derive(Clone, PartialEq, Debug)]
pub enum Residual {
    Poly(DiffPoly),
    Tuple(Vec<DiffPoly>),
    Operator(PseudoDiffOp),
    MultiVector(MultiVector),
}

impl Residual {
    pub fn is_zero(&self) -> bool {
        match self {
            Residual::Poly(p) => p.is_zero(),
            Residual::Tuple(ps) => ps.iter().all(DiffPoly::is_zero),
            Residual::Operator(op) => op.is_zero(),
            Residual::MultiVector(m) => m.is_zero(),
        }
    }
}

/// Optional artifacts produced alongside a verdict.
#[derive(Clone, Debug, Default)]
pub struct Certificates {
    pub flux: Option<DiffPoly>,
    pub density: Option<DiffPoly>,
    /// Characteristics produced by a recursion operator.
    pub characteristics: Vec<DiffPoly>,
    pub hierarchy: Option<Box<HierarchyResult>>,
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub name: String,
    pub verdict: Verdict,
    pub residual: Residual,
    pub certificates: Certificates,
    pub obstruction: Option<Vec<DiffPoly>>,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn from_residual(name: impl Into<String>, residual: Residual) -> Self {
        let verdict = if residual.is_zero() {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        CheckReport {
            name: name.into(),
            verdict,
            residual,
            certificates: Certificates::default(),
            obstruction: None,
            notes: Vec::new(),
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Symmetry residual `d_t Q_a + pr v_K(Q_a) - pr v_Q(K_a)` per component.
pub fn symmetry_residual(q: &[DiffPoly], sys: &EvolutionSystem) -> Result<Vec<DiffPoly>> {
    if q.len() != sys.rhs().len() {
        return Err(Error::ComponentMismatch {
            left: q.len(),
            right: sys.rhs().len(),
        });
    }
    q.iter()
        .zip(sys.rhs())
        .map(|(qa, ka)| {
            let forward = prolong_apply(sys.rhs(), qa)?;
            let back = prolong_apply(q, ka)?;
            Ok(qa.partial_t() + forward - back)
        })
        .collect()
}

/// Checks that the evolutionary field with characteristic `q` is a
/// symmetry of `sys` modulo eps^(p+1).
pub fn check_symmetry(q: &DiffPoly, sys: &EvolutionSystem) -> Result<CheckReport> {
    check_symmetry_tuple(std::slice::from_ref(q), sys)
}

pub fn check_symmetry_tuple(q: &[DiffPoly], sys: &EvolutionSystem) -> Result<CheckReport> {
    let mut residual = symmetry_residual(q, sys)?;
    let residual = if residual.len() == 1 {
        Residual::Poly(residual.remove(0))
    } else {
        Residual::Tuple(residual)
    };
    Ok(CheckReport::from_residual("symmetry", residual))
}

/// Checks `D_t T` is a total x-derivative on solutions; on success the
/// flux `X` with `D_t T + D_x X = 0` is attached.
pub fn check_conservation(t: &Functional, sys: &EvolutionSystem) -> Result<CheckReport> {
    let dt = dt_total(&t.density, sys)?;
    let obstruction = euler(&dt);
    let mut report =
        CheckReport::from_residual("conservation", Residual::Tuple(obstruction.clone()));
    if report.passed() {
        report.certificates.flux = Some(-integrate_x(&dt)?);
    } else {
        report.obstruction = Some(obstruction);
    }
    report.certificates.density = Some(t.density.clone());
    Ok(report)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RecursionMode {
    /// `R_t == [D_K, R]` as operators.
    Operator,
    /// `R` maps each seed symmetry to a symmetry.
    Action,
}

fn scalar_rhs(sys: &EvolutionSystem) -> Result<&DiffPoly> {
    match sys.rhs() {
        [k] => Ok(k),
        _ => Err(Error::Unsupported("recursion operators are scalar".into())),
    }
}

pub fn check_recursion_operator(
    r: &PseudoDiffOp,
    sys: &EvolutionSystem,
    mode: RecursionMode,
    seeds: &[DiffPoly],
) -> Result<CheckReport> {
    let k = scalar_rhs(sys)?;
    match mode {
        RecursionMode::Operator => {
            let closure = |e: Error| match e {
                Error::Closure(msg) => Error::Closure(format!("{msg}; try action mode")),
                other => other,
            };
            let rt = r.time_derivative(sys)?;
            let comm = frechet(k).commutator(r).map_err(closure)?;
            let residual = rt.try_sub(&comm)?;
            Ok(CheckReport::from_residual(
                "recursion",
                Residual::Operator(residual),
            ))
        }
        RecursionMode::Action => {
            if seeds.is_empty() {
                return Err(Error::Unsupported(
                    "action mode needs at least one seed characteristic".into(),
                ));
            }
            let mut images = Vec::with_capacity(seeds.len());
            let mut residuals = Vec::with_capacity(seeds.len());
            for seed in seeds {
                let image = r.apply(seed)?;
                residuals.extend(symmetry_residual(std::slice::from_ref(&image), sys)?);
                images.push(image);
            }
            let mut report = CheckReport::from_residual("recursion", Residual::Tuple(residuals));
            report.certificates.characteristics = images;
            report
                .notes
                .push("action mode: evidence on the given seeds only".into());
            Ok(report)
        }
    }
}
