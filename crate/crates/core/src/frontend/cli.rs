//! Command-line dispatch. Exit codes: 0 all checks pass, 1 a check failed,
//! 2 usage, parse or model errors, 3 a resource cap was hit.

use std::ffi::OsString;

use clap::{Args, Parser, Subcommand, ValueEnum};

use super::report::{Format, NumericSeries, Report};
use super::{builtin, parse_model, Model};
use crate::engine::{
    check_conservation, check_recursion_operator, check_symmetry_tuple, generate_hierarchy_with,
    noether_inverse_with, AnsatzBounds, CheckReport, HierarchyOptions, RecursionMode, Residual,
    Verdict,
};
use crate::error::Error;
use crate::hamiltonian::pair_residual;
use crate::jet::{DiffPoly, EvolutionSystem, Functional};
use crate::numeric::{drift_report, soliton, GridSpec};
use crate::operator::PseudoDiffOp;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "jetsym",
    version,
    about = "Exact checks for perturbed evolution equations"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ModelArg {
    /// Path to a `.jf` model file, or `@gardner` / `@potential_burgers`.
    model: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Operator,
    Action,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that characteristics generate symmetries of a system.
    CheckSymmetry {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long = "char", required = true, value_delimiter = ',')]
        chars: Vec<String>,
        #[arg(long)]
        system: String,
    },
    /// Check that densities give conservation laws of a system.
    CheckClaw {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long = "density", required = true, value_delimiter = ',')]
        densities: Vec<String>,
        #[arg(long)]
        system: String,
    },
    /// Recover the functional whose gradient maps to a characteristic.
    Noether {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long = "char")]
        char_name: String,
        #[arg(long)]
        op: String,
        /// Density the result should be equivalent to.
        #[arg(long)]
        expect: Option<String>,
        /// Jet order bound for the preimage search.
        #[arg(long)]
        max_order: Option<usize>,
    },
    /// Check a recursion operator for a system.
    CheckRecursion {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        op: String,
        #[arg(long)]
        system: String,
        #[arg(long, value_enum, default_value_t = Mode::Operator)]
        mode: Mode,
        /// Characteristics for action mode.
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<String>,
    },
    /// Check that two operators form a Hamiltonian pair.
    CheckPair {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        op1: String,
        #[arg(long)]
        op2: String,
        /// Also require each operator to satisfy the Jacobi identity alone.
        #[arg(long)]
        strict: bool,
    },
    /// Generate flows and functionals by repeated recursion.
    Hierarchy {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        op: String,
        #[arg(long)]
        seed: String,
        #[arg(long)]
        steps: usize,
        /// Hamiltonian operator used to invert the flows.
        #[arg(long)]
        dop: String,
        /// Second Hamiltonian operator; defaults to the recursion operator
        /// composed with `--dop`.
        #[arg(long)]
        eop: Option<String>,
        /// System the flows must be symmetries of; defaults to the only one.
        #[arg(long)]
        system: Option<String>,
    },
    /// Integrate a system numerically and monitor a functional.
    ValidateNumeric {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        system: String,
        #[arg(long)]
        density: String,
        /// Values of eps; two or more also check the drift scaling.
        #[arg(long = "eps", value_delimiter = ',', default_values_t = vec![1e-2, 1e-3])]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 40.0)]
        length: f64,
        #[arg(long, default_value_t = 256)]
        points: usize,
        #[arg(long, default_value_t = 1e-4)]
        dt: f64,
        #[arg(long, default_value_t = 1.0)]
        t_end: f64,
        #[arg(long, default_value_t = 100)]
        sample_every: usize,
        /// Speed of the soliton initial profile.
        #[arg(long, default_value_t = 4.0)]
        speed: f64,
        /// Initial centre of the soliton.
        #[arg(long, default_value_t = 0.0)]
        x0: f64,
    },
}

/// Exit status plus what goes to stdout and stderr.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn error(code: i32, message: impl Into<String>) -> Self {
        let mut stderr = message.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        Outcome {
            code,
            stdout: String::new(),
            stderr,
        }
    }
}

/// Failure before any report could be produced.
struct Abort {
    code: i32,
    message: String,
}

impl From<Error> for Abort {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ResourceCap(_) => EXIT_RESOURCE,
            _ => EXIT_USAGE,
        };
        Abort {
            code,
            message: format!("error: {e}"),
        }
    }
}

fn usage(message: impl Into<String>) -> Abort {
    Abort {
        code: EXIT_USAGE,
        message: format!("error: {}", message.into()),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_command<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome::error(EXIT_USAGE, text)
            } else {
                Outcome {
                    code: EXIT_PASS,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let command_line = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join(" ");
    match execute(cli.command, command_line) {
        Ok(report) => Outcome {
            code: if report.passed() {
                EXIT_PASS
            } else {
                EXIT_FAIL
            },
            stdout: report.emit(cli.format),
            stderr: String::new(),
        },
        Err(abort) => Outcome::error(abort.code, abort.message),
    }
}

fn load_model(arg: &str) -> Result<Model, Abort> {
    let src = match arg.strip_prefix('@') {
        Some(name) => builtin(name)
            .ok_or_else(|| usage(format!("unknown built-in model `{name}`")))?
            .to_string(),
        None => std::fs::read_to_string(arg)
            .map_err(|e| usage(format!("cannot read `{arg}`: {e}")))?,
    };
    parse_model(&src).map_err(|e| usage(format!("{arg}:{e}")))
}

fn lookup<'a, V>(
    map: &'a indexmap::IndexMap<String, V>,
    kind: &str,
    name: &str,
) -> Result<&'a V, Abort> {
    map.get(name)
        .ok_or_else(|| usage(format!("no {kind} named `{name}`")))
}

fn system<'a>(m: &'a Model, name: &str) -> Result<&'a EvolutionSystem, Abort> {
    lookup(&m.systems, "system", name)
}

fn operator<'a>(m: &'a Model, name: &str) -> Result<&'a PseudoDiffOp, Abort> {
    lookup(&m.operators, "operator", name)
}

fn characteristic<'a>(m: &'a Model, name: &str) -> Result<&'a [DiffPoly], Abort> {
    lookup(&m.characteristics, "characteristic", name).map(Vec::as_slice)
}

fn scalar_characteristic<'a>(m: &'a Model, name: &str) -> Result<&'a DiffPoly, Abort> {
    match characteristic(m, name)? {
        [q] => Ok(q),
        _ => Err(usage(format!("characteristic `{name}` must be scalar"))),
    }
}

fn functional(m: &Model, name: &str) -> Result<Functional, Abort> {
    m.functional(name)
        .ok_or_else(|| usage(format!("no density named `{name}`")))
}

fn execute(command: Command, command_line: String) -> Result<Report, Abort> {
    let model_spec = match &command {
        Command::CheckSymmetry { model, .. }
        | Command::CheckClaw { model, .. }
        | Command::Noether { model, .. }
        | Command::CheckRecursion { model, .. }
        | Command::CheckPair { model, .. }
        | Command::Hierarchy { model, .. }
        | Command::ValidateNumeric { model, .. } => model.model.clone(),
    };
    let m = load_model(&model_spec)?;
    let mut report = Report::for_model(command_line, &m);
    match command {
        Command::CheckSymmetry {
            chars, system: s, ..
        } => {
            let sys = system(&m, &s)?;
            for name in &chars {
                let q = characteristic(&m, name)?;
                report
                    .checks
                    .push(check_symmetry_tuple(q, sys)?.named(format!("symmetry {name}")));
            }
        }
        Command::CheckClaw {
            densities,
            system: s,
            ..
        } => {
            let sys = system(&m, &s)?;
            for name in &densities {
                let f = functional(&m, name)?;
                report
                    .checks
                    .push(check_conservation(&f, sys)?.named(format!("conservation {name}")));
            }
        }
        Command::Noether {
            char_name,
            op,
            expect,
            max_order,
            ..
        } => {
            let q = scalar_characteristic(&m, &char_name)?;
            let d = operator(&m, &op)?;
            let expected = expect.as_deref().map(|e| functional(&m, e)).transpose()?;
            let bounds = AnsatzBounds {
                max_order,
                ..AnsatzBounds::default()
            };
            report
                .checks
                .push(noether_check(q, d, &bounds, expected.as_ref(), &char_name)?);
        }
        Command::CheckRecursion {
            op,
            system: s,
            mode,
            seeds,
            ..
        } => {
            let r = operator(&m, &op)?;
            let sys = system(&m, &s)?;
            let seeds = seeds
                .iter()
                .map(|n| scalar_characteristic(&m, n).cloned())
                .collect::<Result<Vec<_>, _>>()?;
            let mode = match mode {
                Mode::Operator => RecursionMode::Operator,
                Mode::Action => RecursionMode::Action,
            };
            report.checks.push(
                check_recursion_operator(r, sys, mode, &seeds)?.named(format!("recursion {op}")),
            );
        }
        Command::CheckPair {
            op1, op2, strict, ..
        } => {
            let d = operator(&m, &op1)?;
            let e = operator(&m, &op2)?;
            report
                .checks
                .extend(pair_checks(d, e, &op1, &op2, strict, &m.depvars)?);
        }
        Command::Hierarchy {
            op,
            seed,
            steps,
            dop,
            eop,
            system: s,
            ..
        } => {
            let r = operator(&m, &op)?;
            let d = operator(&m, &dop)?;
            let seed_q = scalar_characteristic(&m, &seed)?;
            let sys = match s {
                Some(s) => system(&m, &s)?,
                None => match m.systems.values().collect::<Vec<_>>().as_slice() {
                    [only] => only,
                    _ => return Err(usage("several systems declared; pass --system")),
                },
            };
            let opts = HierarchyOptions {
                max_jet_order: m.max_jet_order,
                second_operator: eop.map(|e| operator(&m, &e).cloned()).transpose()?,
                ..HierarchyOptions::default()
            };
            let h = generate_hierarchy_with(r, seed_q, steps, d, sys, &opts)?;
            let obstruction = h
                .stopped_at
                .as_ref()
                .map(|s| s.obstruction.clone())
                .unwrap_or_default();
            let mut summary = CheckReport::from_residual(
                format!("hierarchy {seed}"),
                Residual::Tuple(obstruction),
            );
            if let Some(stop) = &h.stopped_at {
                summary.verdict = Verdict::Fail;
                summary.obstruction = Some(stop.obstruction.clone());
            }
            summary.notes.extend(h.notes.iter().cloned());
            let named = h.checks.clone();
            summary.certificates.hierarchy = Some(Box::new(h));
            report.checks.push(summary);
            report.checks.extend(named);
        }
        Command::ValidateNumeric {
            system: s,
            density,
            eps,
            length,
            points,
            dt,
            t_end,
            sample_every,
            speed,
            x0,
            ..
        } => {
            let sys = system(&m, &s)?;
            let f = functional(&m, &density)?;
            let base = GridSpec {
                length,
                points,
                dt,
                t_end,
                epsilon: 0.0,
                sample_every,
            };
            base.validate()?;
            if eps.is_empty() {
                return Err(usage("at least one --eps value is needed"));
            }
            let ic = soliton(&base, speed, x0);
            numeric_checks(&mut report, sys, &f, &base, &ic, &eps, &density)?;
        }
    }
    Ok(report)
}

fn noether_check(
    q: &DiffPoly,
    d: &PseudoDiffOp,
    bounds: &AnsatzBounds,
    expected: Option<&Functional>,
    name: &str,
) -> Result<CheckReport, Abort> {
    let label = format!("noether {name}");
    match noether_inverse_with(q, d, bounds) {
        Ok(f) => {
            let residual = match expected {
                Some(e) => {
                    Residual::Tuple(crate::jet::euler(&(f.density.clone() - e.density.clone())))
                }
                None => Residual::Tuple(Vec::new()),
            };
            let mut report = CheckReport::from_residual(label, residual);
            report.certificates.density = Some(f.density);
            Ok(report)
        }
        Err(e @ (Error::NotInImage { .. } | Error::NotVariational { .. })) => {
            let mut report = CheckReport::from_residual(label, Residual::Poly(q.clone()));
            report.verdict = Verdict::Fail;
            report.obstruction = e.obstruction().map(<[_]>::to_vec);
            report.notes.push(e.to_string());
            Ok(report)
        }
        Err(e) => Err(e.into()),
    }
}

/// Skew-adjointness of both operators, then the compatibility test; with
/// `strict`, the Jacobi identity of each operator as well.
pub fn pair_checks(
    d: &PseudoDiffOp,
    e: &PseudoDiffOp,
    n1: &str,
    n2: &str,
    strict: bool,
    names: &[String],
) -> crate::Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for (op, name) in [(d, n1), (e, n2)] {
        out.push(CheckReport::from_residual(
            format!("skew-adjoint {name}"),
            Residual::Operator(op.try_add(&op.adjoint())?),
        ));
    }
    if !out.iter().all(CheckReport::passed) {
        return Ok(out);
    }
    let mut compat = CheckReport::from_residual(
        format!("compatible {n1} {n2}"),
        Residual::MultiVector(pair_residual(d, e)?),
    );
    let mut jacobi = Vec::new();
    for (op, name) in [(d, n1), (e, n2)] {
        let check = CheckReport::from_residual(
            format!("jacobi {name}"),
            Residual::MultiVector(pair_residual(op, op)?),
        );
        if !strict && !check.passed() {
            compat.notes.push(format!(
                "{name} alone fails the Jacobi identity; residual {}",
                match &check.residual {
                    Residual::MultiVector(m) => m.display_with(names),
                    _ => unreachable!(),
                }
            ));
        }
        jacobi.push(check);
    }
    if strict {
        out.extend(jacobi);
    }
    out.push(compat);
    Ok(out)
}

fn numeric_checks(
    report: &mut Report,
    sys: &EvolutionSystem,
    f: &Functional,
    base: &GridSpec,
    ic: &[f64],
    eps: &[f64],
    density: &str,
) -> Result<(), Abort> {
    let mut drifts = Vec::new();
    for &e in eps {
        let grid = GridSpec {
            epsilon: e,
            ..base.clone()
        };
        let label = format!("drift {density} eps={e}");
        match drift_report(sys, f, &grid, ic) {
            Ok(d) => {
                let mut check = CheckReport::from_residual(label, Residual::Tuple(Vec::new()));
                check.notes.push(format!(
                    "max drift {:.3e}, noise floor {:.3e}",
                    d.max_drift, d.noise_floor
                ));
                drifts.push((e, d.max_drift, d.noise_floor));
                report.checks.push(check);
                report.numeric.push(NumericSeries {
                    epsilon: e,
                    max_drift: d.max_drift,
                    noise_floor: d.noise_floor,
                    rows: d.rows,
                });
            }
            Err(err @ Error::Diverged { .. }) => {
                let mut check = CheckReport::from_residual(label, Residual::Tuple(Vec::new()));
                check.verdict = Verdict::Fail;
                check.notes.push(err.to_string());
                report.checks.push(check);
            }
            Err(err) => return Err(err.into()),
        }
    }
    drifts.sort_by(|a, b| b.0.abs().total_cmp(&a.0.abs()));
    for pair in drifts.windows(2) {
        let ((e1, d1, f1), (e2, d2, f2)) = (pair[0], pair[1]);
        let mut check = CheckReport::from_residual(
            format!("drift scaling {density} eps={e1} vs eps={e2}"),
            Residual::Tuple(Vec::new()),
        );
        if d1 > f1 && d2 > f2 {
            if d2 >= d1 {
                check.verdict = Verdict::Fail;
            }
            check.notes.push(format!("ratio {:.3e}", d1 / d2));
        } else {
            check
                .notes
                .push("drift at the noise floor; scaling not tested".into());
        }
        report.checks.push(check);
    }
    Ok(())
}
