//! Numerical cross-check of approximate conservation: integrate the PDE on
//! a periodic grid with pseudo-spectral derivatives and classical RK4, and
//! watch how much a functional drifts.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::{integrate_x, DiffPoly, EvolutionSystem, Functional};

/// Periodic grid on `[-L/2, L/2)` plus time stepping parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub length: f64,
    pub points: usize,
    pub dt: f64,
    pub t_end: f64,
    /// Numerical value substituted for `eps`.
    pub epsilon: f64,
    /// Store every this many steps (the final state is always stored).
    pub sample_every: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            length: 40.0,
            points: 256,
            dt: 1e-4,
            t_end: 1.0,
            epsilon: 0.0,
            sample_every: 100,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.points < 16 || !self.points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "N = {} must be a power of two and at least 16",
                self.points
            )));
        }
        let finite = [self.length, self.dt, self.t_end, self.epsilon]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.dt <= 0.0 || self.length <= 0.0 || self.t_end < 0.0 {
            return Err(Error::InvalidGrid(
                "need L > 0, dt > 0, T_end >= 0 and finite values".into(),
            ));
        }
        if self.sample_every == 0 {
            return Err(Error::InvalidGrid("sample_every must be positive".into()));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        self.length / self.points as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points)
            .map(|i| -self.length / 2.0 + i as f64 * self.dx())
            .collect()
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    /// Same domain and horizon with twice the points and half the step.
    pub fn refined(&self) -> Self {
        GridSpec {
            points: self.points * 2,
            dt: self.dt / 2.0,
            sample_every: self.sample_every * 2,
            ..self.clone()
        }
    }
}

/// `-(c/2) sech^2(sqrt(c)/2 (x - x0))`, the travelling wave of
/// `u_t = 6 u u_x - u_xxx` moving right with speed `c`.
pub fn soliton(grid: &GridSpec, speed: f64, x0: f64) -> Vec<f64> {
    let k = speed.sqrt() / 2.0;
    grid.nodes()
        .iter()
        .map(|&x| {
            let s = 1.0 / (k * (x - x0)).cosh();
            -speed / 2.0 * s * s
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub profiles: Vec<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DriftRow {
    pub t: f64,
    pub value: f64,
    pub drift: f64,
}

/// Coefficient, power of t, and (jet order, exponent) factors.
type Term = (f64, u32, Vec<(usize, i32)>);

/// A differential polynomial with `eps` replaced by a number.
struct Compiled {
    terms: Vec<Term>,
    order: usize,
}

impl Compiled {
    fn new(p: &DiffPoly, eps: f64, what: &str) -> Result<Self> {
        if p.components() != 1 {
            return Err(Error::Unsupported(format!(
                "numeric {what} for scalar equations only"
            )));
        }
        if p.depends_on_x() {
            return Err(Error::Unsupported(format!(
                "numeric {what} cannot depend on x explicitly on a periodic domain"
            )));
        }
        let mut terms = Vec::new();
        for (m, c) in p.terms() {
            let coeff = c.evaluate(eps);
            if coeff == 0.0 {
                continue;
            }
            let jets = m
                .jets()
                .iter()
                .map(|&(v, e)| (v.order as usize, e as i32))
                .collect();
            terms.push((coeff, m.t_exp(), jets));
        }
        Ok(Compiled {
            terms,
            order: p.jet_order().unwrap_or(0),
        })
    }

    fn eval(&self, derivs: &[Vec<f64>], t: f64, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (coeff, texp, jets) in &self.terms {
            let c = coeff * t.powi(*texp as i32);
            for (i, slot) in out.iter_mut().enumerate() {
                let mut v = c;
                for &(k, e) in jets {
                    v *= derivs[k][i].powi(e);
                }
                *slot += v;
            }
        }
    }
}

struct Spectral {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    wavenumbers: Vec<f64>,
    /// Modes kept by the 2/3 dealiasing rule.
    kept: Vec<bool>,
    buf: Vec<Complex<f64>>,
    work: Vec<Complex<f64>>,
}

impl Spectral {
    fn new(grid: &GridSpec) -> Self {
        let n = grid.points;
        let mut planner = FftPlanner::new();
        let wavenumbers = (0..n)
            .map(|j| {
                let m = if j <= n / 2 {
                    j as f64
                } else {
                    j as f64 - n as f64
                };
                2.0 * PI * m / grid.length
            })
            .collect();
        let kept = (0..n)
            .map(|j| {
                let m = if j <= n / 2 { j } else { n - j };
                3 * m < n
            })
            .collect();
        Spectral {
            kept,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            wavenumbers,
            buf: vec![Complex::default(); n],
            work: vec![Complex::default(); n],
        }
    }

    /// Fills `out[k]` with the k-th derivative of `u` for `k <= order`.
    /// Derivatives drop the top third of the spectrum, which removes
    /// aliasing in quadratic terms and keeps the u_xxx stiffness bounded.
    fn derivatives(&mut self, u: &[f64], order: usize, out: &mut [Vec<f64>]) {
        let n = u.len();
        out[0].copy_from_slice(u);
        if order == 0 {
            return;
        }
        for (b, &v) in self.buf.iter_mut().zip(u) {
            *b = Complex::new(v, 0.0);
        }
        self.forward.process(&mut self.buf);
        let scale = 1.0 / n as f64;
        for (k, slot) in out.iter_mut().enumerate().take(order + 1).skip(1) {
            for j in 0..n {
                let ik = Complex::new(0.0, self.wavenumbers[j]).powu(k as u32);
                self.work[j] = if self.kept[j] {
                    self.buf[j] * ik
                } else {
                    Complex::default()
                };
            }
            self.inverse.process(&mut self.work);
            for (o, w) in slot.iter_mut().zip(&self.work) {
                *o = w.re * scale;
            }
        }
    }
}

/// Right-hand side `K`, or its flux `F` with `K = D_x F` when one exists.
/// The flux form conserves the mean of `u` to rounding error.
impl Spectral {
    fn first_derivative(&mut self, f: &[f64], out: &mut [f64]) {
        let n = f.len();
        for (b, &v) in self.buf.iter_mut().zip(f) {
            *b = Complex::new(v, 0.0);
        }
        self.forward.process(&mut self.buf);
        for j in 0..n {
            self.work[j] = if self.kept[j] {
                self.buf[j] * Complex::new(0.0, self.wavenumbers[j])
            } else {
                Complex::default()
            };
        }
        self.inverse.process(&mut self.work);
        let scale = 1.0 / n as f64;
        for (o, w) in out.iter_mut().zip(&self.work) {
            *o = w.re * scale;
        }
    }
}

struct Rhs {
    poly: Compiled,
    flux_form: bool,
    spectral: Spectral,
    derivs: Vec<Vec<f64>>,
    flux: Vec<f64>,
}

impl Rhs {
    fn eval(&mut self, u: &[f64], t: f64, out: &mut [f64]) {
        self.spectral
            .derivatives(u, self.poly.order, &mut self.derivs);
        if self.flux_form {
            self.poly.eval(&self.derivs, t, &mut self.flux);
            self.spectral.first_derivative(&self.flux, out);
        } else {
            self.poly.eval(&self.derivs, t, out);
        }
    }
}

/// Integrates `u_t = K` from `ic` with RK4, storing every
/// `grid.sample_every` steps.
pub fn integrate_pde(sys: &EvolutionSystem, grid: &GridSpec, ic: &[f64]) -> Result<Trajectory> {
    grid.validate()?;
    let [k] = sys.rhs() else {
        return Err(Error::Unsupported(
            "numeric integration for scalar equations only".into(),
        ));
    };
    if ic.len() != grid.points {
        return Err(Error::InvalidGrid(format!(
            "initial profile has {} samples for N = {}",
            ic.len(),
            grid.points
        )));
    }
    if k.jet_order().unwrap_or(0) > 6 {
        return Err(Error::Unsupported("jet order above 6".into()));
    }
    let flux = integrate_x(k).ok().filter(|f| !f.depends_on_x());
    let flux_form = flux.is_some();
    let poly = Compiled::new(flux.as_ref().unwrap_or(k), grid.epsilon, "right-hand side")?;
    let n = grid.points;
    let mut rhs = Rhs {
        derivs: vec![vec![0.0; n]; poly.order + 1],
        poly,
        flux_form,
        spectral: Spectral::new(grid),
        flux: vec![0.0; n],
    };

    let mut u = ic.to_vec();
    let mut traj = Trajectory {
        times: vec![0.0],
        profiles: vec![u.clone()],
    };
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut stage = vec![0.0; n];
    let h = grid.dt;
    let steps = grid.steps();
    for step in 1..=steps {
        let t = (step - 1) as f64 * h;
        rhs.eval(&u, t, &mut k1);
        for i in 0..n {
            stage[i] = u[i] + 0.5 * h * k1[i];
        }
        rhs.eval(&stage, t + 0.5 * h, &mut k2);
        for i in 0..n {
            stage[i] = u[i] + 0.5 * h * k2[i];
        }
        rhs.eval(&stage, t + 0.5 * h, &mut k3);
        for i in 0..n {
            stage[i] = u[i] + h * k3[i];
        }
        rhs.eval(&stage, t + h, &mut k4);
        for i in 0..n {
            u[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::Diverged { step });
        }
        if step % grid.sample_every == 0 || step == steps {
            traj.times.push(step as f64 * h);
            traj.profiles.push(u.clone());
        }
    }
    Ok(traj)
}

/// Value of `int T dx` and its relative drift `|T(t)-T(0)| / max(1, |T(0)|)`
/// at every stored time.
pub fn monitor_functional(
    traj: &Trajectory,
    functional: &Functional,
    grid: &GridSpec,
) -> Result<Vec<DriftRow>> {
    grid.validate()?;
    if functional.density.jet_order().unwrap_or(0) > 4 {
        return Err(Error::Unsupported("density jet order above 4".into()));
    }
    let poly = Compiled::new(&functional.density, grid.epsilon, "density")?;
    let n = grid.points;
    let mut spectral = Spectral::new(grid);
    let mut derivs = vec![vec![0.0; n]; poly.order + 1];
    let mut dens = vec![0.0; n];
    let mut values = Vec::with_capacity(traj.times.len());
    for (t, u) in traj.times.iter().zip(&traj.profiles) {
        if u.len() != n {
            return Err(Error::InvalidGrid("profile length differs from N".into()));
        }
        spectral.derivatives(u, poly.order, &mut derivs);
        poly.eval(&derivs, *t, &mut dens);
        values.push(dens.iter().sum::<f64>() * grid.dx());
    }
    let v0 = values.first().copied().unwrap_or(0.0);
    let norm = v0.abs().max(1.0);
    Ok(traj
        .times
        .iter()
        .zip(values)
        .map(|(&t, value)| DriftRow {
            t,
            value,
            drift: (value - v0).abs() / norm,
        })
        .collect())
}

/// Drift series at the grid's `eps` plus the noise floor: the drift of the
/// same functional along the `eps = 0` trajectory.
#[derive(Clone, Debug)]
pub struct DriftReport {
    pub rows: Vec<DriftRow>,
    pub max_drift: f64,
    pub noise_floor: f64,
}

pub fn drift_report(
    sys: &EvolutionSystem,
    functional: &Functional,
    grid: &GridSpec,
    ic: &[f64],
) -> Result<DriftReport> {
    let traj = integrate_pde(sys, grid, ic)?;
    let rows = monitor_functional(&traj, functional, grid)?;
    let unperturbed = GridSpec {
        epsilon: 0.0,
        ..grid.clone()
    };
    let base = integrate_pde(sys, &unperturbed, ic)?;
    // The density keeps the requested eps; only the flow is unperturbed.
    let floor_rows = monitor_functional(&base, functional, grid)?;
    let max = |rows: &[DriftRow]| rows.iter().map(|r| r.drift).fold(0.0, f64::max);
    Ok(DriftReport {
        max_drift: max(&rows),
        noise_floor: max(&floor_rows),
        rows,
    })
}
