//! Classical radiation-damped electron motion.
//!
//! The Abraham–Lorentz equation is integrated in its runaway-free
//! future-integral form
//!
//! ```text
//! m_R r̈(t) = ∫₀^∞ ds e^{−s} F(t + τ₀s)
//! ```
//!
//! which is a second-order ODE once the force is smoothed over the next few
//! τ₀. The future state inside the memory integral is Taylor-extrapolated
//! from the current one; forces are sampled up to 40τ₀ ahead
//! (pre-acceleration). One-dimensional, SI units.

use std::cell::Cell;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{check, Error, Result};
use crate::numerics::{integrate_halfline_decaying, relative_residual, solve_cubic, QuadratureSpec, HALFLINE_CUTOFF};
use crate::units::PhysicalConfig;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostics {
    pub steps: usize,
    /// Largest Richardson estimate of the local error (relative).
    pub max_local_error: f64,
    pub force_evaluations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryResult {
    pub times: Vec<f64>,
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub acceleration: Vec<f64>,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Bound on the relative local error per step.
    pub tolerance: f64,
    /// Shortest time over which the force changes appreciably, in seconds.
    /// Sets the panel width of the memory integral.
    pub force_timescale: Option<f64>,
    /// Store every n-th step (the last step is always stored).
    pub record_every: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tolerance: 1e-6, force_timescale: None, record_every: 1 }
    }
}

#[derive(Clone, Copy, Debug)]
struct State {
    t: f64,
    x: f64,
    v: f64,
    a: f64,
}

struct Smoother<'a, F> {
    force: &'a F,
    mass: f64,
    tau0: f64,
    scale: f64,
    spec: QuadratureSpec,
    evaluations: usize,
}

impl<F: Fn(f64, f64, f64) -> f64> Smoother<'_, F> {
    /// Memory-smoothed acceleration at (t, x, v), with `a` used to
    /// extrapolate the path into the future.
    fn acceleration(&mut self, t: f64, x: f64, v: f64, a: f64) -> Result<f64> {
        let tau0 = self.tau0;
        if tau0 == 0.0 {
            self.evaluations += 1;
            return self.checked(t, (self.force)(t, x, v)).map(|f| f / self.mass);
        }
        let bad = Cell::new(None);
        let force = self.force;
        let r = integrate_halfline_decaying(
            |s| {
                let dt = tau0 * s;
                let f = force(t + dt, x + v * dt + 0.5 * a * dt * dt, v + a * dt);
                if !f.is_finite() && bad.get().is_none() {
                    bad.set(Some(t + dt));
                }
                f
            },
            self.scale,
            &self.spec,
        );
        self.evaluations += 1;
        if let Some(tb) = bad.get() {
            return Err(Error::Force { t: tb, reason: "force is not finite".to_owned() });
        }
        let f = r.map_err(|e| Error::Force { t, reason: e.to_string() })?;
        Ok(f / self.mass)
    }

    fn checked(&self, t: f64, f: f64) -> Result<f64> {
        if f.is_finite() {
            Ok(f)
        } else {
            Err(Error::Force { t, reason: "force is not finite".to_owned() })
        }
    }

    /// One velocity-Verlet step. The velocity entering the end-of-step
    /// force is predicted explicitly.
    fn step(&mut self, s: State, h: f64) -> Result<State> {
        let v_half = s.v + 0.5 * h * s.a;
        let x = s.x + h * v_half;
        let t = s.t + h;
        let v_pred = s.v + h * s.a;
        let a = self.acceleration(t, x, v_pred, s.a)?;
        Ok(State { t, x, v: v_half + 0.5 * h * a, a })
    }
}

/// Integrates `m_R r̈ = ∫₀^∞ e^{−s} F(t + τ₀s, r(t + τ₀s), ṙ(t + τ₀s)) ds`.
///
/// `force(t, x, v)` is in newtons. Each step is compared against two half
/// steps; the half-step result is kept, and a step whose difference exceeds
/// `options.tolerance` aborts the run.
pub fn abraham_lorentz_solve<F>(
    force: F,
    r0: f64,
    v0: f64,
    t_span: (f64, f64),
    step: f64,
    cfg: &PhysicalConfig,
    options: &SolverOptions,
) -> Result<TrajectoryResult>
where
    F: Fn(f64, f64, f64) -> f64,
{
    let (t0, t1) = t_span;
    check("step", step, step > 0.0, "positive")?;
    check("t0", t0, true, "finite")?;
    check("t1", t1, t1 > t0, "after t0")?;
    check("r0", r0, true, "finite")?;
    check("v0", v0, true, "finite")?;
    check("tolerance", options.tolerance, options.tolerance > 0.0, "positive")?;
    let n_steps = ((t1 - t0) / step).round().max(1.0) as usize;
    let h = (t1 - t0) / n_steps as f64;

    let tau0 = cfg.radiation_time;
    let scale = match options.force_timescale {
        Some(ts) => {
            check("force_timescale", ts, ts > 0.0, "positive")?;
            (ts / tau0).min(HALFLINE_CUTOFF)
        }
        None => HALFLINE_CUTOFF,
    };
    let mut sm = Smoother {
        force: &force,
        mass: cfg.renormalized_mass_kg(),
        tau0,
        scale,
        spec: QuadratureSpec::default(),
        evaluations: 0,
    };

    let a0 = sm.acceleration(t0, r0, v0, 0.0)?;
    // Refine the extrapolation with the acceleration it produces.
    let a0 = sm.acceleration(t0, r0, v0, a0)?;
    let mut s = State { t: t0, x: r0, v: v0, a: a0 };
    let every = options.record_every.max(1);
    let cap = n_steps / every + 2;
    let mut out = TrajectoryResult {
        times: Vec::with_capacity(cap),
        position: Vec::with_capacity(cap),
        velocity: Vec::with_capacity(cap),
        acceleration: Vec::with_capacity(cap),
        diagnostics: Diagnostics { steps: 0, max_local_error: 0.0, force_evaluations: 0 },
    };
    let push = |out: &mut TrajectoryResult, s: &State| {
        out.times.push(s.t);
        out.position.push(s.x);
        out.velocity.push(s.v);
        out.acceleration.push(s.a);
    };
    push(&mut out, &s);
    let (mut x_ref, mut v_ref) = (r0.abs(), v0.abs());

    for k in 1..=n_steps {
        let full = sm.step(s, h)?;
        let half = sm.step(s, 0.5 * h)?;
        let mut fine = sm.step(half, 0.5 * h)?;
        // Pin the grid so round-off does not accumulate in t.
        fine.t = t0 + h * k as f64;

        // Errors are measured against the largest excursion so far, so zero
        // crossings of x or v do not inflate them.
        x_ref = x_ref.max(fine.x.abs());
        v_ref = v_ref.max(fine.v.abs());
        let scale_x = x_ref.max(s.v.abs() * h);
        let scale_v = v_ref.max(s.a.abs() * h);
        let err_x = if scale_x > 0.0 { (fine.x - full.x).abs() / scale_x } else { 0.0 };
        let err_v = if scale_v > 0.0 { (fine.v - full.v).abs() / scale_v } else { 0.0 };
        let err = err_x.max(err_v) / 3.0;
        if !(err <= options.tolerance) {
            return Err(Error::StepRejected { step: k, error: err, tolerance: options.tolerance });
        }
        out.diagnostics.max_local_error = out.diagnostics.max_local_error.max(err);
        s = fine;
        if k % every == 0 || k == n_steps {
            push(&mut out, &s);
        }
    }
    out.diagnostics.steps = n_steps;
    out.diagnostics.force_evaluations = sm.evaluations;
    Ok(out)
}

/// Decay rate of the amplitude envelope, from a log-linear least-squares fit
/// through the interpolated maxima of `x(t)`. Returns the rate in the
/// convention `A(t) ∝ e^{−rate·t/2}`, i.e. the energy damping constant.
pub fn fitted_damping_rate(times: &[f64], x: &[f64]) -> Result<f64> {
    let mut pts = Vec::new();
    for i in 1..x.len().saturating_sub(1) {
        let (y0, y1, y2) = (x[i - 1], x[i], x[i + 1]);
        if y1 > y0 && y1 >= y2 && y1 > 0.0 {
            // Parabola through three equally spaced samples.
            let h = times[i + 1] - times[i];
            let denom = y0 - 2.0 * y1 + y2;
            let off = if denom != 0.0 { 0.5 * (y0 - y2) / denom } else { 0.0 };
            let peak = y1 - 0.25 * (y0 - y2) * off;
            pts.push((times[i] + off * h, peak.ln()));
        }
    }
    if pts.len() < 3 {
        return Err(Error::RootSearch(format!("only {} maxima found; need at least 3", pts.len())));
    }
    let n = pts.len() as f64;
    let (mt, my) = pts.iter().fold((0.0, 0.0), |(a, b), (t, y)| (a + t / n, b + y / n));
    let (sxy, sxx) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (t, y)| (a + (t - mt) * (y - my), b + (t - mt) * (t - mt)));
    Ok(-2.0 * sxy / sxx)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarmonicRootReport {
    pub omega_0: f64,
    pub tau0: f64,
    /// z₊ (Im > 0) and z₋ = z₊*, in 1/s.
    pub physical_pair: [Complex64; 2],
    /// Real root ≈ 1/τ₀ of the runaway solution; `None` for τ₀ = 0.
    pub runaway_root: Option<f64>,
    /// ±iω₀ − τ₀ω₀²/2.
    pub perturbative_pair: [Complex64; 2],
    /// γ = τ₀ω₀².
    pub damping_gamma: f64,
    /// Largest relative residual of the three exact roots.
    pub max_residual: f64,
    pub warnings: Vec<String>,
}

/// Roots of `z² − τ₀z³ + ω₀² = 0` for the radiation-damped oscillator.
pub fn harmonic_roots(omega_0: f64, cfg: &PhysicalConfig) -> Result<HarmonicRootReport> {
    harmonic_roots_with_tau0(omega_0, cfg.radiation_time)
}

pub fn harmonic_roots_with_tau0(omega_0: f64, tau0: f64) -> Result<HarmonicRootReport> {
    check("omega_0", omega_0, omega_0 > 0.0, "positive")?;
    check("tau0", tau0, tau0 >= 0.0, "non-negative")?;
    let w2 = omega_0 * omega_0;
    let gamma = tau0 * w2;
    let perturbative = [Complex64::new(-0.5 * gamma, omega_0), Complex64::new(-0.5 * gamma, -omega_0)];
    let mut warnings = Vec::new();
    if omega_0 * tau0 >= 0.1 {
        warnings.push(format!("ω₀τ₀ = {:.3e} ≥ 0.1; the perturbative pair is unreliable", omega_0 * tau0));
    }
    if tau0 == 0.0 {
        let pair = [Complex64::new(0.0, omega_0), Complex64::new(0.0, -omega_0)];
        return Ok(HarmonicRootReport {
            omega_0,
            tau0,
            physical_pair: pair,
            runaway_root: None,
            perturbative_pair: perturbative,
            damping_gamma: 0.0,
            max_residual: 0.0,
            warnings,
        });
    }
    let coeffs = [w2, 0.0, 1.0, -tau0];
    let roots = solve_cubic(-tau0, 1.0, 0.0, w2)?;
    let max_residual = roots
        .iter()
        .map(|z| relative_residual(&coeffs, *z))
        .fold(0.0, f64::max);
    // The polynomial is positive at 0 and negative at +∞: the largest real
    // root is the positive runaway root.
    let runaway_idx = (0..3)
        .filter(|&i| roots[i].im == 0.0)
        .max_by(|&i, &j| roots[i].re.total_cmp(&roots[j].re))
        .expect("a real cubic has a real root");
    let mut rest = (0..3).filter(|&i| i != runaway_idx).map(|i| roots[i]);
    let (p, q) = (rest.next().unwrap(), rest.next().unwrap());
    let (upper, lower) = if p.im >= q.im { (p, q) } else { (q, p) };
    if upper.im == 0.0 {
        warnings.push("no oscillating pair: the physical roots are real".to_owned());
    }
    Ok(HarmonicRootReport {
        omega_0,
        tau0,
        physical_pair: [upper, lower],
        runaway_root: Some(roots[runaway_idx].re),
        perturbative_pair: perturbative,
        damping_gamma: gamma,
        max_residual,
        warnings,
    })
}
