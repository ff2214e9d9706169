//! The decoherence function Γ of the radiation field.
//!
//! Γ = −¼ ∫₀^Ω J(ω) coth(βω/2) |Q(ω)|² dω, with Q(ω) the Fourier transform
//! of the relative velocity q̇(t) between the two density-matrix arguments.
//! Production values use the closed-form asymptotics of the free electron;
//! the quadrature routes are kept for moderate Ωt_f and serve as oracles.
//!
//! Lengths at the API are metres, times seconds, velocities m/s.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{check, Error, Result};
use crate::kernels::{KernelContext, THERMAL_X_MAX};
use crate::numerics::{coth_half, coth_half_minus_one, integrate_adaptive, ln_sinhc, one_minus_cos_over_sq, sinc, QuadratureSpec};
use crate::units::{PhysicalConfig, EULER_GAMMA, LOW_TEMPERATURE_RATIO, SECONDS_PER_YEAR};

pub type Vec3 = [f64; 3];
pub type CVec3 = [Complex64; 3];

/// Largest Ωt_f accepted by the quadrature routes.
pub const MAX_QUADRATURE_PHASE: f64 = 1e6;

/// `t_f/τ_p` below which the asymptotic forms are flagged as unreliable.
const ASYMPTOTIC_MARGIN: f64 = 100.0;

/// Off-diagonal path q(t) = x(t) − x'(t) on `[0, t_f]`.
#[derive(Clone, Debug, PartialEq)]
pub enum RelativePath {
    /// q(t) = q_i + (q_f − q_i) t/t_f.
    FreeLinear { q_i: Vec3, q_f: Vec3, t_f: f64 },
    /// q(t) = 2a cos ω₀t along x: packets starting at ±a that meet after a
    /// quarter period when `t_f = π/(2ω₀)`.
    HarmonicQuarterPeriod { a: f64, omega_0: f64, t_f: f64 },
    /// Piecewise-linear interpolation of samples starting at t = 0.
    Sampled { times: Vec<f64>, q: Vec<Vec3> },
}

impl RelativePath {
    pub fn free_linear(q_i: Vec3, q_f: Vec3, t_f: f64) -> Result<Self> {
        check("t_f", t_f, t_f > 0.0, "positive")?;
        for x in q_i.iter().chain(q_f.iter()) {
            check("q", *x, true, "finite")?;
        }
        Ok(Self::FreeLinear { q_i, q_f, t_f })
    }

    /// Harmonic path with the collision time `t_f = π/(2ω₀)`.
    pub fn harmonic_quarter_period(a: f64, omega_0: f64) -> Result<Self> {
        check("omega_0", omega_0, omega_0 > 0.0, "positive")?;
        Self::harmonic(a, omega_0, PI / (2.0 * omega_0))
    }

    pub fn harmonic(a: f64, omega_0: f64, t_f: f64) -> Result<Self> {
        check("a", a, true, "finite")?;
        check("omega_0", omega_0, omega_0 > 0.0, "positive")?;
        check("t_f", t_f, t_f > 0.0, "positive")?;
        Ok(Self::HarmonicQuarterPeriod { a, omega_0, t_f })
    }

    pub fn sampled(times: Vec<f64>, q: Vec<Vec3>) -> Result<Self> {
        if times.len() < 2 || times.len() != q.len() {
            return Err(Error::domain(
                "times",
                format!("need at least two samples matching q ({} times, {} positions)", times.len(), q.len()),
            ));
        }
        if times[0] != 0.0 {
            return Err(Error::domain("times", "must start at 0"));
        }
        if !times.windows(2).all(|w| w[1] > w[0]) || !times.iter().all(|t| t.is_finite()) {
            return Err(Error::domain("times", "must be finite and strictly increasing"));
        }
        if !q.iter().flatten().all(|x| x.is_finite()) {
            return Err(Error::domain("q", "must be finite"));
        }
        Ok(Self::Sampled { times, q })
    }

    pub fn t_f(&self) -> f64 {
        match self {
            Self::FreeLinear { t_f, .. } | Self::HarmonicQuarterPeriod { t_f, .. } => *t_f,
            Self::Sampled { times, .. } => *times.last().expect("validated non-empty"),
        }
    }

    /// q(t_f) − q(0).
    pub fn displacement(&self) -> Vec3 {
        match self {
            Self::FreeLinear { q_i, q_f, .. } => sub(q_f, q_i),
            Self::HarmonicQuarterPeriod { a, omega_0, t_f } => {
                [2.0 * a * ((omega_0 * t_f).cos() - 1.0), 0.0, 0.0]
            }
            Self::Sampled { q, .. } => sub(&q[q.len() - 1], &q[0]),
        }
    }
}

fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn norm_sq(v: &Vec3) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// `∫₀^t e^{iyt'} dt' = t e^{iyt/2} sinc(yt/2)`, stable at `y = 0`.
fn phase_integral(y: f64, t: f64) -> Complex64 {
    let half = 0.5 * y * t;
    Complex64::from_polar(t * sinc(half), half)
}

/// Q(ω) = ∫₀^{t_f} e^{iωt} q̇(t) dt, in metres.
pub fn velocity_fourier(path: &RelativePath, omega: f64) -> Result<CVec3> {
    if !(omega >= 0.0) {
        return Err(Error::domain("omega", format!("must be non-negative, got {omega}")));
    }
    let zero = Complex64::new(0.0, 0.0);
    Ok(match path {
        RelativePath::FreeLinear { q_i, q_f, t_f } => {
            let e = phase_integral(omega, *t_f) / *t_f;
            let d = sub(q_f, q_i);
            [e * d[0], e * d[1], e * d[2]]
        }
        RelativePath::HarmonicQuarterPeriod { a, omega_0, t_f } => {
            // q̇ = −2aω₀ sin ω₀t  ⇒  Q = i a ω₀ [E(ω + ω₀) − E(ω − ω₀)]
            let e = phase_integral(omega + omega_0, *t_f) - phase_integral(omega - omega_0, *t_f);
            [Complex64::i() * (a * omega_0) * e, zero, zero]
        }
        RelativePath::Sampled { times, q } => {
            let mut acc = [zero; 3];
            for k in 0..times.len() - 1 {
                let dt = times[k + 1] - times[k];
                let e = Complex64::from_polar(1.0, omega * times[k]) * phase_integral(omega, dt) / dt;
                for (i, slot) in acc.iter_mut().enumerate() {
                    *slot += e * (q[k + 1][i] - q[k][i]);
                }
            }
            acc
        }
    })
}

/// How a [`DecoherenceResult`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Asymptotic,
    Quadrature,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecoherenceResult {
    pub gamma_vac: f64,
    pub gamma_th: f64,
    pub gamma_total: f64,
    /// Coherence length in metres; `None` when Γ vanishes (L = ∞).
    pub coherence_length_m: Option<f64>,
    /// D = exp(Γ_total) for the path's separation.
    pub decoherence_factor: f64,
    pub method: Method,
    pub warnings: Vec<String>,
}

impl DecoherenceResult {
    fn new(gamma_vac: f64, gamma_th: f64, coherence_length_m: Option<f64>, method: Method, warnings: Vec<String>) -> Self {
        let gamma_total = gamma_vac + gamma_th;
        Self {
            gamma_vac,
            gamma_th,
            gamma_total,
            coherence_length_m,
            decoherence_factor: gamma_total.exp(),
            method,
            warnings,
        }
    }
}

/// `J(ω)|Q(ω)|²` in the variable `x = ωt_f`, without the coupling factor
/// and the `1/t_f²` Jacobian. Natural units.
fn weighted_spectrum(path: &RelativePath, x: f64, c: f64) -> f64 {
    let t = path.t_f();
    match path {
        // Closed form avoids the complex arithmetic on the hot path.
        RelativePath::FreeLinear { q_i, q_f, .. } => {
            let w_sq = norm_sq(&sub(q_f, q_i)) / (c * c * t * t);
            x * w_sq * one_minus_cos_over_sq(x) * 2.0
        }
        _ => {
            let q = velocity_fourier(path, x / t).expect("x ≥ 0");
            x * q.iter().map(|z| z.norm_sqr()).sum::<f64>() / (c * c * t * t)
        }
    }
}

fn check_phase(omega_t: f64) -> Result<()> {
    if omega_t > MAX_QUADRATURE_PHASE {
        return Err(Error::domain(
            "uv_cutoff_omega",
            format!("Ωt_f = {omega_t:e} exceeds the quadrature limit {MAX_QUADRATURE_PHASE:e}; use the asymptotic form"),
        ));
    }
    Ok(())
}

/// Vacuum part −¼ ∫₀^Ω J |Q|² dω by quadrature.
pub fn gamma_vacuum_numeric(path: &RelativePath, ctx: &KernelContext, spec: &QuadratureSpec) -> Result<f64> {
    let t = path.t_f();
    let x_max = ctx.omega() * t;
    check_phase(x_max)?;
    let c = ctx.cfg.speed_of_light;
    let spec = spec.with_period(2.0 * PI);
    let r = integrate_adaptive(|x| weighted_spectrum(path, x, c), 0.0, x_max, &spec)?;
    Ok(-0.25 * ctx.coupling() * r.value)
}

/// Thermal part −¼ ∫ J (coth(βω/2) − 1) |Q|² dω by quadrature.
///
/// Returns the value and whether the upper limit had to stay at Ω
/// (k_B T not small against m c²), which reduces accuracy.
pub fn gamma_thermal_numeric(path: &RelativePath, ctx: &KernelContext, spec: &QuadratureSpec) -> Result<(f64, bool)> {
    let Some(beta) = ctx.beta else {
        return Ok((0.0, false));
    };
    let t = path.t_f();
    let beta_omega = beta * ctx.omega();
    let (x_max, reduced) = if beta_omega > LOW_TEMPERATURE_RATIO {
        (THERMAL_X_MAX * t / beta, false)
    } else {
        (ctx.omega() * t, true)
    };
    check_phase(x_max)?;
    let c = ctx.cfg.speed_of_light;
    let ratio = beta / t;
    let spec = spec.with_period(2.0 * PI);
    let r = integrate_adaptive(
        |x| weighted_spectrum(path, x, c) * coth_half_minus_one(ratio * x),
        0.0,
        x_max,
        &spec,
    )?;
    Ok((-0.25 * ctx.coupling() * r.value, reduced))
}

/// Γ from the frequency integral, split into vacuum and thermal parts.
pub fn gamma_numeric(path: &RelativePath, ctx: &KernelContext, spec: &QuadratureSpec) -> Result<DecoherenceResult> {
    let vac = gamma_vacuum_numeric(path, ctx, spec)?;
    let (th, reduced) = gamma_thermal_numeric(path, ctx, spec)?;
    let mut warnings = Vec::new();
    if reduced {
        warnings.push("k_B T is not small against m c²; thermal integral truncated at the cutoff".to_owned());
    }
    let total = vac + th;
    let sep_sq = norm_sq(&path.displacement());
    let l = (total < 0.0 && sep_sq > 0.0).then(|| (sep_sq / (-2.0 * total)).sqrt());
    Ok(DecoherenceResult::new(vac, th, l, Method::Quadrature, warnings))
}

/// Same integrand with `coth` kept whole, for the split-consistency checks.
pub fn gamma_numeric_unsplit(path: &RelativePath, ctx: &KernelContext, spec: &QuadratureSpec) -> Result<f64> {
    let t = path.t_f();
    let x_max = ctx.omega() * t;
    check_phase(x_max)?;
    let c = ctx.cfg.speed_of_light;
    let spec = spec.with_period(2.0 * PI);
    let r = match ctx.beta {
        None => integrate_adaptive(|x| weighted_spectrum(path, x, c), 0.0, x_max, &spec)?,
        Some(beta) => {
            let ratio = beta / t;
            integrate_adaptive(|x| weighted_spectrum(path, x, c) * coth_half(ratio * x), 0.0, x_max, &spec)?
        }
    };
    Ok(-0.25 * ctx.coupling() * r.value)
}

/// Preparation time equivalent to a sharp frequency cutoff Ω:
/// `∫₀^{Ωt}(1 − cos x)/x dx → ln(Ωt) + γ_E = ln(t/τ_p)` for `τ_p = e^{−γ_E}/Ω`.
pub fn sharp_cutoff_preparation_time(omega: f64) -> f64 {
    (-EULER_GAMMA).exp() / omega
}

fn vacuum_log(t_f: f64, cfg: &PhysicalConfig) -> Result<f64> {
    check("t_f", t_f, t_f > cfg.preparation_time_tau_p, "larger than the preparation time τ_p")?;
    Ok((t_f / cfg.preparation_time_tau_p).ln())
}

fn thermal_log(t_f: f64, cfg: &PhysicalConfig) -> f64 {
    cfg.thermal_correlation_time.map_or(0.0, |tau_b| ln_sinhc(t_f / tau_b))
}

fn asymptotic_warnings(t_f: f64, cfg: &PhysicalConfig) -> Vec<String> {
    let mut w = Vec::new();
    if t_f < ASYMPTOTIC_MARGIN * cfg.preparation_time_tau_p {
        w.push(format!("t_f/τ_p = {:.3e} is not large; asymptotic form is rough", t_f / cfg.preparation_time_tau_p));
    }
    if !cfg.low_temperature_valid {
        w.push("k_B T is not small against m c²; thermal closed form unreliable".to_owned());
    }
    w
}

/// Closed-form Γ of the free electron with the cutoff set by the
/// preparation time, `Ωt_f = t_f/τ_p`.
pub fn gamma_free_asymptotic(q_i: Vec3, q_f: Vec3, t_f: f64, ctx: &KernelContext) -> Result<DecoherenceResult> {
    let cfg = &ctx.cfg;
    let vac_log = vacuum_log(t_f, cfg)?;
    let sep_sq = norm_sq(&sub(&q_f, &q_i));
    let scale = -2.0 * cfg.fine_structure_alpha / (3.0 * PI) * sep_sq / (cfg.speed_of_light * t_f).powi(2);
    let l = coherence_length(t_f, ctx)?;
    Ok(DecoherenceResult::new(
        scale * vac_log,
        scale * thermal_log(t_f, cfg),
        Some(l),
        Method::Asymptotic,
        asymptotic_warnings(t_f, cfg),
    ))
}

/// Coherence length L(t_f) in metres.
pub fn coherence_length(t_f: f64, ctx: &KernelContext) -> Result<f64> {
    let cfg = &ctx.cfg;
    let logs = vacuum_log(t_f, cfg)? + thermal_log(t_f, cfg);
    let l_sq = 3.0 * PI / (4.0 * cfg.fine_structure_alpha) / logs * (cfg.speed_of_light * t_f).powi(2);
    Ok(l_sq.sqrt())
}

/// D = exp(−(2a)²/(2L²)).
pub fn decoherence_factor(separation: f64, coherence_length: f64) -> Result<f64> {
    check("coherence_length", coherence_length, coherence_length > 0.0, "positive")?;
    check("separation", separation, separation >= 0.0, "non-negative")?;
    Ok((-(separation * separation) / (2.0 * coherence_length * coherence_length)).exp())
}

/// Vacuum exponent −(8α/3π) ln(t_f/τ_p) (v/c)² for packets of speed `v`.
pub fn vacuum_gamma_from_velocity(v: f64, t_f: f64, ctx: &KernelContext) -> Result<f64> {
    let cfg = &ctx.cfg;
    let c = cfg.speed_of_light;
    check("v", v, (0.0..c).contains(&v), "in [0, c)")?;
    let log = vacuum_log(t_f, cfg)?;
    Ok(-8.0 * cfg.fine_structure_alpha / (3.0 * PI) * log * (v / c).powi(2))
}

/// D_vac = exp(−(8α/3π) ln(t_f/τ_p) (v/c)²).
pub fn vacuum_factor_from_velocity(v: f64, t_f: f64, ctx: &KernelContext) -> Result<f64> {
    Ok(vacuum_gamma_from_velocity(v, t_f, ctx)?.exp())
}

/// Γ for an N-particle superposition: Γ_N = N²Γ.
pub fn n_particle_gamma(gamma_single: f64, n: u128) -> Result<f64> {
    check("gamma_single", gamma_single, gamma_single <= 0.0, "non-positive")?;
    if n == 0 {
        return Err(Error::domain("n", "must be at least 1"));
    }
    let n = n as f64;
    Ok(gamma_single * (n * n))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NParticleBound {
    pub n: f64,
    pub target_factor: f64,
    pub distance_m: f64,
    /// Largest packet speed keeping D_vac^N ≥ target.
    pub max_velocity: f64,
    /// Time to cover the distance at that speed.
    pub travel_time_s: f64,
    pub travel_time_years: f64,
    /// Single-particle exponent at the bound.
    pub gamma_single: f64,
}

/// Solves `N²·(8α/3π)·ln(t_f/τ_p)·(v/c)² = −ln D` with `t_f = distance/v`.
pub fn n_particle_velocity_bound(n: u128, target_factor: f64, distance: f64, ctx: &KernelContext) -> Result<NParticleBound> {
    check("target_factor", target_factor, target_factor > 0.0 && target_factor < 1.0, "in (0, 1)")?;
    check("distance", distance, distance > 0.0, "positive")?;
    if n == 0 {
        return Err(Error::domain("n", "must be at least 1"));
    }
    let cfg = &ctx.cfg;
    let c = cfg.speed_of_light;
    let target = -target_factor.ln();
    let nf = n as f64;
    let k = 8.0 * cfg.fine_structure_alpha / (3.0 * PI) * nf * nf;
    // exponent(v) is increasing while ln(t_f/τ_p) > 1/2; search in ln v.
    let exponent = |ln_v: f64| {
        let v = ln_v.exp();
        k * (distance / (v * cfg.preparation_time_tau_p)).ln() * (v / c).powi(2)
    };
    let mut lo = (1e-300f64).ln();
    let mut hi = (distance / cfg.preparation_time_tau_p * (-0.5f64).exp()).min(c * (1.0 - 1e-12)).ln();
    if exponent(hi) < target {
        return Err(Error::RootSearch(format!(
            "even v = {:.3e} m/s keeps D above {target_factor}",
            hi.exp()
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if exponent(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    let v = (0.5 * (lo + hi)).exp();
    let t = distance / v;
    Ok(NParticleBound {
        n: nf,
        target_factor,
        distance_m: distance,
        max_velocity: v,
        travel_time_s: t,
        travel_time_years: t / SECONDS_PER_YEAR,
        gamma_single: vacuum_gamma_from_velocity(v, t, ctx)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarmonicDecoherence {
    pub a_m: f64,
    pub omega_0: f64,
    /// Collision time π/(2ω₀).
    pub t_f: f64,
    /// Dimensionless two-resonance integral; `None` when Ωt_f is beyond
    /// the quadrature limit.
    pub frequency_integral: Option<f64>,
    /// Γ from the frequency integral.
    pub gamma: Option<f64>,
    /// ⟨(v/c)²⟩ over `[0, t_f]` with `v = q̇/2`.
    pub mean_square_velocity_over_c2: f64,
    /// −(8α/3π) ln(t_f/τ_p) ⟨(v/c)²⟩.
    pub gamma_vac_asymptotic: f64,
    pub d_vac: f64,
    pub warnings: Vec<String>,
}

/// The two-resonance integrand `x[(1 − cos(x+x₀))/(x+x₀)² + (1 − cos(x−x₀))/(x−x₀)²]`
/// in `x = ωt_f`, with `x₀ = ω₀t_f`.
pub fn harmonic_integrand(x: f64, x0: f64) -> f64 {
    // one_minus_cos_over_sq carries the series branch at resonance.
    x * (one_minus_cos_over_sq(x + x0) + one_minus_cos_over_sq(x - x0))
}

/// Decoherence of two packets in a harmonic well at the collision time.
pub fn gamma_harmonic(a: f64, omega_0: f64, ctx: &KernelContext, spec: &QuadratureSpec) -> Result<HarmonicDecoherence> {
    check("omega_0", omega_0, omega_0 > 0.0, "positive")?;
    check("a", a, true, "finite")?;
    let cfg = &ctx.cfg;
    let c = cfg.speed_of_light;
    let t_f = PI / (2.0 * omega_0);
    let x0 = omega_0 * t_f;
    let mut warnings = Vec::new();
    if omega_0 * cfg.radiation_time > 0.1 {
        warnings.push(format!("ω₀τ₀ = {:.3e} is not small; damping is not negligible", omega_0 * cfg.radiation_time));
    }

    let x_max = ctx.omega() * t_f;
    let (integral, gamma) = if a == 0.0 {
        (Some(0.0), Some(0.0))
    } else if x_max > MAX_QUADRATURE_PHASE {
        warnings.push(format!("Ωt_f = {x_max:.3e} beyond the quadrature limit; only the asymptotic value is reported"));
        (None, None)
    } else {
        let spec = spec.with_period(2.0 * PI);
        let r = match ctx.beta {
            None => integrate_adaptive(|x| harmonic_integrand(x, x0), 0.0, x_max, &spec)?,
            Some(beta) => {
                let ratio = beta / t_f;
                integrate_adaptive(|x| harmonic_integrand(x, x0) * coth_half(ratio * x), 0.0, x_max, &spec)?
            }
        };
        let speed = a * omega_0 / c;
        let gamma = -cfg.squared_charge * speed * speed / (6.0 * PI * PI) * r.value;
        (Some(r.value), Some(gamma))
    };

    // ⟨(q̇/2)²⟩ over [0, t_f] with q̇ = −2aω₀ sin ω₀t.
    let msq = integrate_adaptive(
        |t| {
            let v = a * omega_0 * (omega_0 * t).sin() / c;
            v * v
        },
        0.0,
        t_f,
        &QuadratureSpec::default(),
    )?
    .value
        / t_f;
    let log = vacuum_log(t_f, cfg)?;
    let gamma_vac = -8.0 * cfg.fine_structure_alpha / (3.0 * PI) * log * msq;
    Ok(HarmonicDecoherence {
        a_m: a,
        omega_0,
        t_f,
        frequency_integral: integral,
        gamma,
        mean_square_velocity_over_c2: msq,
        gamma_vac_asymptotic: gamma_vac,
        d_vac: gamma_vac.exp(),
        warnings,
    })
}

/// Caldeira–Leggett coherence length `L_CL² = λ̄_th²/(2γt_f)` in metres.
pub fn caldeira_leggett_length(t_f: f64, temperature: f64, gamma_relax: f64, mass_kg: f64, cfg: &PhysicalConfig) -> Result<f64> {
    check("t_f", t_f, t_f > 0.0, "positive")?;
    check("temperature", temperature, temperature > 0.0, "positive")?;
    check("gamma_relax", gamma_relax, gamma_relax > 0.0, "positive")?;
    check("mass", mass_kg, mass_kg > 0.0, "positive")?;
    let lambda_th_sq = cfg.planck_hbar.powi(2) / (2.0 * mass_kg * cfg.boltzmann_k * temperature);
    Ok((lambda_th_sq / (2.0 * gamma_relax * t_f)).sqrt())
}

/// One row of the vacuum/thermal crossover curve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossoverPoint {
    pub t_f_over_tau_b: f64,
    pub gamma_vac: f64,
    pub gamma_th: f64,
    pub coherence_length_m: f64,
    pub decoherence_factor: f64,
}

/// Γ_vac and Γ_th for a fixed separation `dq_over_c_tau_b · cτ_B` over a
/// list of `t_f/τ_B` values.
pub fn crossover_curve(dq_over_c_tau_b: f64, ratios: &[f64], ctx: &KernelContext) -> Result<Vec<CrossoverPoint>> {
    let tau_b = ctx
        .cfg
        .thermal_correlation_time
        .ok_or_else(|| Error::domain("temperature", "crossover curve needs T > 0"))?;
    let dq = dq_over_c_tau_b * ctx.cfg.speed_of_light * tau_b;
    ratios
        .iter()
        .map(|&r| {
            let t_f = r * tau_b;
            let res = gamma_free_asymptotic([0.0; 3], [dq, 0.0, 0.0], t_f, ctx)?;
            Ok(CrossoverPoint {
                t_f_over_tau_b: r,
                gamma_vac: res.gamma_vac,
                gamma_th: res.gamma_th,
                coherence_length_m: res.coherence_length_m.expect("asymptotic L is finite"),
                decoherence_factor: res.decoherence_factor,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{build_config, Overrides, ALPHA, C};
    use proptest::prelude::*;

    fn ctx(temperature: f64) -> KernelContext {
        KernelContext::new(build_config(ALPHA, temperature, &Overrides::default()).unwrap())
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    /// Context whose cutoff puts Ωt_f at `phase` and whose τ_p matches the
    /// sharp cutoff.
    fn ctx_with_phase(temperature: f64, t_f: f64, phase: f64) -> KernelContext {
        let cfg = build_config(ALPHA, temperature, &Overrides::default()).unwrap();
        let omega = phase / t_f;
        KernelContext::new(cfg.with_cutoff(omega, sharp_cutoff_preparation_time(omega)).unwrap())
    }

    #[test]
    fn velocity_fourier_free_cases() {
        let t = 2.0;
        let still = RelativePath::free_linear([1.0, 2.0, 3.0], [1.0, 2.0, 3.0], t).unwrap();
        for w in [0.0, 0.3, 10.0] {
            assert!(velocity_fourier(&still, w).unwrap().iter().all(|z| z.norm() == 0.0));
        }
        let path = RelativePath::free_linear([0.0; 3], [3.0, 0.0, 4.0], t).unwrap();
        let q = velocity_fourier(&path, 2.0 * PI / t).unwrap();
        assert!(q.iter().all(|z| z.norm() < 1e-15));
        let q0 = velocity_fourier(&path, 0.0).unwrap();
        assert!((q0[0].re - 3.0).abs() < 1e-15 && (q0[2].re - 4.0).abs() < 1e-15);
        // |Q(π/t)| = 2|w|t/π with |w| = 5/t
        let q = velocity_fourier(&path, PI / t).unwrap();
        let mag = q.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(rel(mag, 2.0 * 5.0 / PI) < 1e-14);
        assert!(velocity_fourier(&path, -1.0).is_err());
    }

    // Direct quadrature of ∫ e^{iωt} q̇(t) dt as the oracle.
    fn fourier_oracle(qdot: impl Fn(f64) -> f64, omega: f64, t_f: f64) -> Complex64 {
        let spec = QuadratureSpec::default().with_rel_tol(1e-12).with_abs_tol(1e-12);
        let re = integrate_adaptive(|t| (omega * t).cos() * qdot(t), 0.0, t_f, &spec).unwrap().value;
        let im = integrate_adaptive(|t| (omega * t).sin() * qdot(t), 0.0, t_f, &spec).unwrap().value;
        Complex64::new(re, im)
    }

    #[test]
    fn velocity_fourier_matches_direct_quadrature() {
        let t_f = 1.7;
        let path = RelativePath::free_linear([0.0; 3], [2.0, 0.0, 0.0], t_f).unwrap();
        let q = velocity_fourier(&path, PI / t_f).unwrap()[0];
        let o = fourier_oracle(|_| 2.0 / t_f, PI / t_f, t_f);
        assert!((q - o).norm() < 1e-11);

        let (a, w0) = (0.3, 2.0);
        let path = RelativePath::harmonic_quarter_period(a, w0).unwrap();
        for omega in [0.0, 1.0, w0, 2.0 + 1e-9, 7.3] {
            let q = velocity_fourier(&path, omega).unwrap()[0];
            let o = fourier_oracle(|t| -2.0 * a * w0 * (w0 * t).sin(), omega, path.t_f());
            assert!((q - o).norm() < 1e-11, "ω = {omega}: {q} vs {o}");
        }

        let times = vec![0.0, 0.4, 1.1, 1.5];
        let xs = [0.0, 0.2, -0.1, 0.5];
        let path = RelativePath::sampled(times.clone(), xs.iter().map(|&x| [x, 0.0, 0.0]).collect()).unwrap();
        let piecewise = |t: f64| {
            let k = times.windows(2).position(|w| t < w[1]).unwrap_or(2);
            (xs[k + 1] - xs[k]) / (times[k + 1] - times[k])
        };
        for omega in [0.0, 0.9, 5.0] {
            let q = velocity_fourier(&path, omega).unwrap()[0];
            let mut o = Complex64::new(0.0, 0.0);
            for k in 0..3 {
                let spec = QuadratureSpec::default().with_rel_tol(1e-12).with_abs_tol(1e-12);
                let (lo, hi) = (times[k], times[k + 1]);
                let re = integrate_adaptive(|t| (omega * t).cos() * piecewise(t.min(hi - 1e-15).max(lo)), lo, hi, &spec).unwrap().value;
                let im = integrate_adaptive(|t| (omega * t).sin() * piecewise(t.min(hi - 1e-15).max(lo)), lo, hi, &spec).unwrap().value;
                o += Complex64::new(re, im);
            }
            assert!((q - o).norm() < 1e-11, "ω = {omega}");
        }
    }

    #[test]
    fn path_validation() {
        assert!(RelativePath::free_linear([0.0; 3], [1.0; 3], 0.0).is_err());
        assert!(RelativePath::sampled(vec![0.1, 0.2], vec![[0.0; 3]; 2]).is_err());
        assert!(RelativePath::sampled(vec![0.0, 0.0], vec![[0.0; 3]; 2]).is_err());
        assert!(RelativePath::sampled(vec![0.0, 1.0], vec![[0.0; 3]; 3]).is_err());
        assert!(RelativePath::harmonic_quarter_period(1.0, 0.0).is_err());
    }

    #[test]
    fn zero_velocity_gives_zero_gamma() {
        let c = ctx_with_phase(1.0, 1e-12, 1e4);
        let path = RelativePath::free_linear([1.0; 3], [1.0; 3], 1e-12).unwrap();
        let r = gamma_numeric(&path, &c, &QuadratureSpec::default()).unwrap();
        assert_eq!(r.gamma_total, 0.0);
        assert_eq!(r.decoherence_factor, 1.0);
        assert!(r.coherence_length_m.is_none());
    }

    #[test]
    fn vacuum_gamma_matches_euler_asymptote() {
        let t_f = 1e-12;
        let c = ctx_with_phase(0.0, t_f, 1e4);
        let dq = 1e-5;
        let path = RelativePath::free_linear([0.0; 3], [dq, 0.0, 0.0], t_f).unwrap();
        let r = gamma_numeric(&path, &c, &QuadratureSpec::default()).unwrap();
        let w = dq / C / t_f;
        let expect = -c.cfg.squared_charge * w * w / (6.0 * PI * PI) * (1e4f64.ln() + EULER_GAMMA);
        assert!(rel(r.gamma_total, expect) < 0.01);
        assert!(rel(r.gamma_total, expect) < 1e-4);
        assert_eq!(r.gamma_th, 0.0);
    }

    #[test]
    fn numeric_and_asymptotic_agree_at_finite_temperature() {
        let tau_b = ctx(1.0).cfg.thermal_correlation_time.unwrap();
        let t_f = 5.0 * tau_b;
        let c = ctx_with_phase(1.0, t_f, 1e4);
        let dq = 0.1 * C * tau_b;
        let path = RelativePath::free_linear([0.0; 3], [dq, 0.0, 0.0], t_f).unwrap();
        let num = gamma_numeric(&path, &c, &QuadratureSpec::default()).unwrap();
        let asy = gamma_free_asymptotic([0.0; 3], [dq, 0.0, 0.0], t_f, &c).unwrap();
        assert!(rel(num.gamma_th, asy.gamma_th) < 0.01);
        assert!(rel(num.gamma_vac, asy.gamma_vac) < 0.01);
        assert!(rel(num.gamma_total, asy.gamma_total) < 0.01);
    }

    #[test]
    fn split_matches_unsplit_integral() {
        let tau_b = ctx(1.0).cfg.thermal_correlation_time.unwrap();
        let t_f = 2.0 * tau_b;
        // βΩ ≈ 6000 keeps the whole thermal tail inside the cutoff.
        let c = ctx_with_phase(1.0, t_f, 1e4);
        let path = RelativePath::free_linear([0.0; 3], [1e-4, 2e-4, 0.0], t_f).unwrap();
        let spec = QuadratureSpec::default();
        let split = gamma_numeric(&path, &c, &spec).unwrap();
        let whole = gamma_numeric_unsplit(&path, &c, &spec).unwrap();
        assert!(rel(split.gamma_total, whole) < 1e-8);
    }

    #[test]
    fn general_route_matches_free_closed_form() {
        // Sampled straight line through the generic |Q|² path.
        let t_f = 3e-13;
        let c = ctx_with_phase(2.0, t_f, 300.0);
        let free = RelativePath::free_linear([0.0; 3], [1e-4, 0.0, 0.0], t_f).unwrap();
        let sampled = RelativePath::sampled(vec![0.0, t_f / 3.0, t_f], vec![[0.0; 3], [1e-4 / 3.0, 0.0, 0.0], [1e-4, 0.0, 0.0]]).unwrap();
        let spec = QuadratureSpec::default();
        let a = gamma_numeric(&free, &c, &spec).unwrap();
        let b = gamma_numeric(&sampled, &c, &spec).unwrap();
        assert!(rel(a.gamma_total, b.gamma_total) < 1e-8);
    }

    #[test]
    fn quadrature_refuses_huge_phase() {
        let c = ctx(0.0);
        let path = RelativePath::free_linear([0.0; 3], [1.0, 0.0, 0.0], 1.0).unwrap();
        assert!(gamma_numeric(&path, &c, &QuadratureSpec::default()).is_err());
    }

    #[test]
    fn asymptotic_limits() {
        let c = ctx(0.0);
        let r = gamma_free_asymptotic([0.0; 3], [1.0, 0.0, 0.0], 1.0, &c).unwrap();
        assert_eq!(r.gamma_th, 0.0);
        assert_eq!(r.method, Method::Asymptotic);
        assert!(gamma_free_asymptotic([0.0; 3], [1.0, 0.0, 0.0], 1e-22, &c).is_err());

        let c = ctx(1.0);
        let tau_b = c.cfg.thermal_correlation_time.unwrap();
        let t_f = 1e4 * tau_b;
        let dq = C * tau_b;
        let r = gamma_free_asymptotic([0.0; 3], [dq, 0.0, 0.0], t_f, &c).unwrap();
        let large_t = -2.0 * ALPHA / (3.0 * PI) * (t_f / tau_b) * (dq / (C * t_f)).powi(2);
        assert!(rel(r.gamma_th, large_t) < 2e-3);
        assert!(rel(r.decoherence_factor, r.gamma_total.exp()) < 1e-15);
    }

    #[test]
    fn coherence_length_estimates() {
        let c = ctx(0.0);
        let l = coherence_length(1.0, &c).unwrap();
        let estimate = (3.0 * PI / (4.0 * ALPHA) / 1e21f64.ln()).sqrt() * C;
        assert!(rel(l, estimate) < 1e-12);
        assert!(rel(3.0 * PI / (4.0 * ALPHA), 322.0) < 0.01);
        assert!((1e21f64.ln() - 48.0).abs() < 1.0);
        assert!(l > C && l < 10.0 * C);
        assert!((1e38f64.ln() - 87.0).abs() < 1.0);
        assert!(coherence_length(1e-21, &c).is_err());
    }

    #[test]
    fn coherence_length_shrinks_with_temperature() {
        let t_f = 1e-9;
        let mut last = coherence_length(t_f, &ctx(0.0)).unwrap();
        for temp in [0.01, 0.1, 1.0, 10.0, 100.0, 1e3] {
            let l = coherence_length(t_f, &ctx(temp)).unwrap();
            assert!(l < last, "T = {temp}");
            last = l;
        }
    }

    #[test]
    fn decoherence_factor_values() {
        assert_eq!(decoherence_factor(0.0, 1.0).unwrap(), 1.0);
        assert!(rel(decoherence_factor(2.0, 2.0).unwrap(), (-0.5f64).exp()) < 1e-15);
        assert!(decoherence_factor(1.0, 0.0).is_err());
        assert!(decoherence_factor(-1.0, 1.0).is_err());

        let c = ctx(1.0);
        let tau_b = c.cfg.thermal_correlation_time.unwrap();
        let sep = 0.1 * C * tau_b;
        let r = gamma_free_asymptotic([0.0; 3], [sep, 0.0, 0.0], 7.0 * tau_b, &c).unwrap();
        let d = decoherence_factor(sep, r.coherence_length_m.unwrap()).unwrap();
        assert!(rel(d, r.gamma_total.exp()) < 1e-12);
    }

    #[test]
    fn velocity_form() {
        let c = ctx(0.0);
        assert_eq!(vacuum_factor_from_velocity(0.0, 1.0, &c).unwrap(), 1.0);
        assert!(vacuum_factor_from_velocity(C, 1.0, &c).is_err());
        let g1 = vacuum_gamma_from_velocity(0.01 * C, 1.0, &c).unwrap();
        let g2 = vacuum_gamma_from_velocity(0.02 * C, 1.0, &c).unwrap();
        assert!(rel(g2 / g1, 4.0) < 1e-14);
        // Same number as D with a = v t_f and separation 2a.
        let v = 0.1 * C;
        let l = coherence_length(1.0, &c).unwrap();
        let d = decoherence_factor(2.0 * v, l).unwrap();
        assert!(rel(d, vacuum_factor_from_velocity(v, 1.0, &c).unwrap()) < 1e-12);
    }

    #[test]
    fn n_particle_scaling() {
        assert_eq!(n_particle_gamma(-0.3, 1).unwrap(), -0.3);
        assert_eq!(n_particle_gamma(-0.3, 2).unwrap(), -1.2);
        assert!(n_particle_gamma(0.1, 2).is_err());
        assert!(n_particle_gamma(-0.1, 0).is_err());
    }

    #[test]
    fn mole_velocity_bound() {
        let b = n_particle_velocity_bound(600_000_000_000_000_000_000_000, 0.99, 1.0, &ctx(0.0)).unwrap();
        assert!(b.max_velocity > 1e-16 / 3.0 && b.max_velocity < 3e-16, "{}", b.max_velocity);
        let d = n_particle_gamma(b.gamma_single, 600_000_000_000_000_000_000_000).unwrap().exp();
        assert!((d - 0.99).abs() < 1e-10);
        assert!(b.travel_time_years > 1e8 && b.travel_time_years < 1e9);
    }

    #[test]
    fn harmonic_integral_grows_as_twice_the_log() {
        // Each resonance contributes ln Ωt_f + const at large Ωt_f.
        let w0 = 1e15;
        let t_f = PI / (2.0 * w0);
        let spec = QuadratureSpec::default();
        let at = |phase: f64| {
            let c = ctx_with_phase(0.0, t_f, phase);
            gamma_harmonic(1e-9, w0, &c, &spec).unwrap().frequency_integral.unwrap()
        };
        let (i4, i5) = (at(1e4), at(1e5));
        assert!((i5 - i4 - 2.0 * 10f64.ln()).abs() < 1e-3, "{i4} {i5}");
        let c = ctx_with_phase(0.0, t_f, 1e4);
        assert_eq!(gamma_harmonic(0.0, w0, &c, &spec).unwrap().gamma, Some(0.0));
    }

    #[test]
    fn harmonic_integral_constant_offset() {
        // Large-X limit of the two-resonance integral:
        // 2(ln X + γ_E − Cin x₀) + 2x₀∫₀^{x₀}(1 − cos y)/y² dy.
        let w0 = 1e15;
        let t_f = PI / (2.0 * w0);
        let x0 = PI / 2.0;
        let spec = QuadratureSpec::default().with_rel_tol(1e-12);
        let cin = integrate_adaptive(|y| y * one_minus_cos_over_sq(y), 0.0, x0, &spec).unwrap().value;
        let inner = integrate_adaptive(one_minus_cos_over_sq, 0.0, x0, &spec).unwrap().value;
        let offset = 2.0 * (EULER_GAMMA - cin) + 2.0 * x0 * inner;
        for phase in [1e4, 1e5] {
            let c = ctx_with_phase(0.0, t_f, phase);
            let i = gamma_harmonic(1e-9, w0, &c, &QuadratureSpec::default()).unwrap().frequency_integral.unwrap();
            assert!((i - 2.0 * phase.ln() - offset).abs() < 10.0 / phase, "X = {phase}: {i}");
        }
        assert!((offset - 2.0 * EULER_GAMMA - 1.19).abs() < 0.01);
    }

    #[test]
    fn harmonic_approaches_free_with_mean_square_velocity() {
        let w0 = 1e15;
        let t_f = PI / (2.0 * w0);
        let mut last = f64::INFINITY;
        for phase in [1e3, 1e4, 1e5, 1e6] {
            let c = ctx_with_phase(0.0, t_f, phase);
            let h = gamma_harmonic(1e-9, w0, &c, &QuadratureSpec::default()).unwrap();
            let ratio = h.gamma.unwrap() / h.gamma_vac_asymptotic;
            assert!(ratio > 1.0 && ratio < last);
            last = ratio;
        }
        assert!(last < 1.05);
    }

    #[test]
    fn harmonic_integrand_continuous_at_resonance() {
        let x0 = PI / 2.0;
        for edge in [1e-3, -1e-3] {
            let a = harmonic_integrand(x0 + edge * (1.0 - 1e-9), x0);
            let b = harmonic_integrand(x0 + edge * (1.0 + 1e-9), x0);
            assert!(rel(a, b) < 1e-9);
        }
        assert!(rel(harmonic_integrand(x0, x0), x0 * (0.5 + one_minus_cos_over_sq(2.0 * x0))) < 1e-15);
    }

    #[test]
    fn harmonic_mean_square_velocity() {
        let (a, w0) = (1e-9, 1e15);
        let h = gamma_harmonic(a, w0, &ctx(0.0), &QuadratureSpec::default()).unwrap();
        assert!(rel(h.mean_square_velocity_over_c2, 0.5 * (a * w0 / C).powi(2)) < 1e-12);
    }

    #[test]
    fn harmonic_resonances_do_not_interfere_at_quarter_period() {
        // At ω₀t_f = π/2 the cross term of |Q|² is purely imaginary, so the
        // two-resonance integral equals the full spectrum.
        let w0 = 1.0e15;
        let t_f = PI / (2.0 * w0);
        let a = 1e-9;
        let spec = QuadratureSpec::default();
        for phase in [1e3, 1e4] {
            let c = ctx_with_phase(0.0, t_f, phase);
            let h = gamma_harmonic(a, w0, &c, &spec).unwrap();
            let path = RelativePath::harmonic_quarter_period(a, w0).unwrap();
            let full = gamma_numeric(&path, &c, &spec).unwrap();
            assert!(rel(full.gamma_total, h.gamma.unwrap()) < 1e-8);
        }
        // Away from the quarter period the cross term survives.
        let c = ctx_with_phase(0.0, t_f, 1e3);
        let spec = QuadratureSpec::default();
        let off = RelativePath::harmonic(a, w0, 0.7 * t_f).unwrap();
        let full = gamma_numeric(&off, &c, &spec).unwrap().gamma_total;
        let x0 = 0.7 * PI / 2.0;
        let tf = 0.7 * t_f;
        let x_max = c.omega() * tf;
        let diag = integrate_adaptive(|x| harmonic_integrand(x, x0), 0.0, x_max, &spec.with_period(2.0 * PI)).unwrap().value;
        let diag = -c.cfg.squared_charge * (a * w0 / C).powi(2) / (6.0 * PI * PI) * diag;
        assert!(rel(full, diag) > 1e-4);
    }

    #[test]
    fn caldeira_leggett_scalings() {
        let cfg = ctx(0.0).cfg;
        let m = 9.109e-31;
        let l = caldeira_leggett_length(1.0, 1.0, 1e3, m, &cfg).unwrap();
        assert!(rel(caldeira_leggett_length(4.0, 1.0, 1e3, m, &cfg).unwrap(), l / 2.0) < 1e-14);
        assert!(rel(caldeira_leggett_length(1.0, 4.0, 1e3, m, &cfg).unwrap(), l / 2.0) < 1e-14);
        assert!(caldeira_leggett_length(1.0, 0.0, 1e3, m, &cfg).is_err());

        let c = ctx(1.0);
        let l_short = coherence_length(1e-9, &c).unwrap();
        let l_long = coherence_length(1e3, &c).unwrap();
        assert!(l_long > l_short);
        let cl_short = caldeira_leggett_length(1e-9, 1.0, 1e3, m, &cfg).unwrap();
        let cl_long = caldeira_leggett_length(1e3, 1.0, 1e3, m, &cfg).unwrap();
        assert!(cl_long < cl_short);
    }

    #[test]
    fn crossover_curve_needs_temperature() {
        assert!(crossover_curve(0.1, &[1.0], &ctx(0.0)).is_err());
        let pts = crossover_curve(0.1, &[1.0, 10.0], &ctx(1.0)).unwrap();
        assert_eq!(pts.len(), 2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn gamma_is_non_positive_for_sampled_paths(
            xs in proptest::collection::vec(-1e-4..1e-4f64, 2..6),
            temperature in 0.0..100.0f64,
        ) {
            let t_f = 1e-12;
            let n = xs.len();
            let times: Vec<f64> = (0..n).map(|k| t_f * k as f64 / (n - 1) as f64).collect();
            let q: Vec<Vec3> = xs.iter().map(|&x| [x, 0.5 * x, 0.0]).collect();
            let path = RelativePath::sampled(times, q).unwrap();
            let c = ctx_with_phase(temperature, t_f, 50.0);
            let r = gamma_numeric(&path, &c, &QuadratureSpec::default().with_rel_tol(1e-7)).unwrap();
            prop_assert!(r.gamma_total <= 0.0);
            prop_assert!(r.decoherence_factor > 0.0 && r.decoherence_factor <= 1.0);
        }

        #[test]
        fn gamma_monotone_in_separation(dq in 1e-6..1e-3f64, k in 1.01..5.0f64) {
            let c = ctx(1.0);
            let a = gamma_free_asymptotic([0.0; 3], [dq, 0.0, 0.0], 1e-9, &c).unwrap();
            let b = gamma_free_asymptotic([0.0; 3], [k * dq, 0.0, 0.0], 1e-9, &c).unwrap();
            prop_assert!(b.gamma_total.abs() >= a.gamma_total.abs());
        }

        #[test]
        fn n_squared_scaling_exact(g in -10.0..0.0f64, n in 1u128..1_000_000) {
            let gn = n_particle_gamma(g, n).unwrap();
            prop_assert_eq!(gn, g * ((n * n) as f64));
            let gn1 = n_particle_gamma(g, n + 1).unwrap();
            prop_assert!(gn1.abs() >= gn.abs());
        }
    }
}
