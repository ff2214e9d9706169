//! Correlation functions of the radiation field in dipole approximation.
//!
//! The spectral density grows linearly in ω up to the cutoff Ω (velocity
//! coupling). The charge factor e² is folded into every kernel. Times are
//! in seconds, frequencies in rad/s, kernels in s⁻².

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{coth_half_minus_one, integrate_adaptive, QuadratureSpec};
use crate::units::PhysicalConfig;

/// Where the thermal factor `coth(x/2) − 1` is below 1e-25.
pub const THERMAL_X_MAX: f64 = 60.0;

#[derive(Clone, Debug)]
pub struct KernelContext {
    pub cfg: PhysicalConfig,
    /// ħ/(k_B T) in seconds; `None` at T = 0.
    pub beta: Option<f64>,
}

impl KernelContext {
    pub fn new(cfg: PhysicalConfig) -> Self {
        let beta = cfg.beta();
        Self { cfg, beta }
    }

    pub fn omega(&self) -> f64 {
        self.cfg.uv_cutoff_omega
    }

    /// Prefactor e²/(3π²) of the spectral density.
    pub fn coupling(&self) -> f64 {
        self.cfg.squared_charge / (3.0 * PI * PI)
    }
}

/// J(ω) = e²ω/(3π²) below the cutoff, zero above.
pub fn spectral_density(omega: f64, ctx: &KernelContext) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::domain("omega", format!("must be non-negative, got {omega}")));
    }
    Ok(if omega < ctx.omega() { ctx.coupling() * omega } else { 0.0 })
}

/// Dissipation kernel D(t) = ∫₀^Ω J(ω) sin(ωt) dω.
pub fn dissipation_kernel(t: f64, ctx: &KernelContext) -> f64 {
    let w = ctx.omega();
    let u = w * t;
    let shape = if u.abs() < 1e-4 {
        // (sin u − u cos u)/u² = u/3 − u³/30 + u⁵/840
        let u2 = u * u;
        u * (1.0 / 3.0 - u2 / 30.0 + u2 * u2 / 840.0)
    } else {
        (u.sin() - u * u.cos()) / (u * u)
    };
    ctx.coupling() * w * w * shape
}

/// Noise kernel at zero temperature, ∫₀^Ω J(ω) cos(ωt) dω.
pub fn noise_kernel_vacuum(t: f64, ctx: &KernelContext) -> f64 {
    let w = ctx.omega();
    let u = w * t;
    let shape = if u.abs() < 1e-4 {
        // (cos u − 1 + u sin u)/u² = 1/2 − u²/8 + u⁴/144
        let u2 = u * u;
        0.5 - u2 / 8.0 + u2 * u2 / 144.0
    } else {
        (u.cos() - 1.0 + u * u.sin()) / (u * u)
    };
    ctx.coupling() * w * w * shape
}

/// Noise kernel D₁(t) = ∫₀^Ω J(ω) coth(βω/2) cos(ωt) dω.
///
/// The vacuum part is the closed form; the thermal excess
/// `∫ J (coth − 1) cos ωt` is integrated in `x = βω`, where the factor
/// decays like `2e^{−x}`.
pub fn noise_kernel(t: f64, ctx: &KernelContext) -> Result<f64> {
    Ok(noise_kernel_vacuum(t, ctx) + noise_kernel_thermal_excess(t, ctx)?)
}

/// Thermal part `∫₀^Ω J(ω) [coth(βω/2) − 1] cos(ωt) dω`; zero at T = 0.
pub fn noise_kernel_thermal_excess(t: f64, ctx: &KernelContext) -> Result<f64> {
    let Some(beta) = ctx.beta else {
        return Ok(0.0);
    };
    let x_max = (beta * ctx.omega()).min(THERMAL_X_MAX);
    let ratio = t / beta;
    // The excess at t = 0 is π²/3 in these units; for large t/β the result
    // cancels far below that, so accuracy is measured against the t = 0 scale.
    let mut spec = QuadratureSpec::default().with_rel_tol(1e-12).with_abs_tol(1e-13);
    if ratio.abs() > 0.0 {
        spec = spec.with_period(2.0 * PI / ratio.abs());
    }
    let excess = integrate_adaptive(
        |x| x * coth_half_minus_one(x) * (ratio * x).cos(),
        0.0,
        x_max,
        &spec,
    )?;
    Ok(ctx.coupling() * excess.value / (beta * beta))
}

/// f(t) = sin(Ωt)/t, with f(0) = Ω.
pub fn f_function(t: f64, ctx: &KernelContext) -> f64 {
    let w = ctx.omega();
    w * crate::numerics::sinc(w * t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::coth_half;
    use crate::units::{build_config, Overrides, ALPHA};
    use proptest::prelude::*;

    fn ctx(temperature: f64) -> KernelContext {
        KernelContext::new(build_config(ALPHA, temperature, &Overrides::default()).unwrap())
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    // ∫₀^Ω J(ω) g(ω) dω by quadrature in u = ω/Ω.
    fn quad_oracle(ctx: &KernelContext, t: f64, g: impl Fn(f64) -> f64) -> f64 {
        let w = ctx.omega();
        let spec = QuadratureSpec::default()
            .with_rel_tol(1e-13)
            .with_abs_tol(1e-14 * ctx.coupling() * w * w);
        let spec = if t != 0.0 { spec.with_period(2.0 * PI / (w * t).abs()) } else { spec };
        let r = integrate_adaptive(|u| ctx.coupling() * w * u * g(u * w) * w, 0.0, 1.0, &spec).unwrap();
        r.value
    }

    #[test]
    fn spectral_density_shape() {
        let c = ctx(0.0);
        let w = c.omega();
        assert_eq!(spectral_density(2.0 * w, &c).unwrap(), 0.0);
        assert!(rel(spectral_density(w / 2.0, &c).unwrap(), c.cfg.squared_charge / (3.0 * PI * PI) * w / 2.0) < 1e-15);
        let r = spectral_density(0.2 * w, &c).unwrap() / spectral_density(0.1 * w, &c).unwrap();
        assert!((r - 2.0).abs() < 1e-14);
        assert!(spectral_density(-1.0, &c).is_err());
    }

    #[test]
    fn dissipation_kernel_values() {
        let c = ctx(0.0);
        let w = c.omega();
        assert_eq!(dissipation_kernel(0.0, &c), 0.0);
        let t = 3.0 / w;
        assert_eq!(dissipation_kernel(-t, &c), -dissipation_kernel(t, &c));
        let t = 10.0 / w;
        let oracle = quad_oracle(&c, t, |om| (om * t).sin());
        assert!(rel(dissipation_kernel(t, &c), oracle) < 1e-9);
    }

    #[test]
    fn dissipation_kernel_independent_of_temperature() {
        let t = 2.0 / ctx(0.0).omega();
        assert_eq!(dissipation_kernel(t, &ctx(0.0)), dissipation_kernel(t, &ctx(300.0)));
    }

    #[test]
    fn vacuum_noise_kernel_matches_quadrature() {
        let c = ctx(0.0);
        let w = c.omega();
        let t = 5.0 / w;
        let oracle = quad_oracle(&c, t, |om| (om * t).cos());
        assert!(rel(noise_kernel(t, &c).unwrap(), oracle) < 1e-9);
        let t = 2.0 / w;
        assert_eq!(noise_kernel(-t, &c).unwrap(), noise_kernel(t, &c).unwrap());
    }

    #[test]
    fn closed_forms_agree_with_quadrature_across_range() {
        let c = ctx(0.0);
        let w = c.omega();
        for ut in [1e-3, 1e-2, 0.3, 1.0, 7.5, 42.0, 300.0, 1e3] {
            let t = ut / w;
            let d = quad_oracle(&c, t, |om| (om * t).sin());
            let d1 = quad_oracle(&c, t, |om| (om * t).cos());
            let scale = c.coupling() * w * w;
            assert!((dissipation_kernel(t, &c) - d).abs() < 1e-9 * d.abs().max(1e-6 * scale), "D at Ωt = {ut}");
            assert!((noise_kernel_vacuum(t, &c) - d1).abs() < 1e-9 * d1.abs().max(1e-6 * scale), "D1 at Ωt = {ut}");
        }
    }

    #[test]
    fn small_time_branches_are_continuous() {
        let c = ctx(0.0);
        let w = c.omega();
        let (lo, hi) = (0.999_999e-4 / w, 1.000_001e-4 / w);
        assert!(rel(dissipation_kernel(lo, &c), dissipation_kernel(hi, &c)) < 1e-5);
        assert!(rel(noise_kernel_vacuum(lo, &c), noise_kernel_vacuum(hi, &c)) < 1e-5);
    }

    #[test]
    fn thermal_noise_kernel_matches_full_quadrature() {
        // A hot bath with βΩ ≈ 30 so both parts matter at the cutoff scale.
        let cfg = build_config(ALPHA, 1.0, &Overrides::default()).unwrap();
        let beta = cfg.beta().unwrap();
        let cfg = cfg.with_cutoff(30.0 / beta, 1e-21).unwrap();
        let c = KernelContext::new(cfg);
        let t = 0.4 * beta;
        let b = beta;
        let oracle = quad_oracle(&c, t, |om| coth_half(b * om) * (om * t).cos());
        assert!(rel(noise_kernel(t, &c).unwrap(), oracle) < 1e-9);
    }

    #[test]
    fn noise_kernel_increases_with_temperature() {
        let w = ctx(0.0).omega();
        let t = 3.0 / w;
        let mut last_total = noise_kernel(t, &ctx(0.0)).unwrap();
        let mut last_excess = 0.0;
        let mut temp: f64 = 1e-3;
        while temp < 3e9 {
            let c = ctx(temp);
            let excess = noise_kernel_thermal_excess(t, &c).unwrap();
            let total = noise_kernel(t, &c).unwrap();
            assert!(excess > last_excess, "T = {temp}");
            assert!(total >= last_total, "T = {temp}");
            last_excess = excess;
            last_total = total;
            temp *= 3.0;
        }
    }

    #[test]
    fn zero_temperature_limit() {
        let w = ctx(0.0).omega();
        for ut in [0.5, 3.0, 20.0] {
            let t = ut / w;
            let cold = noise_kernel(t, &ctx(1e-6)).unwrap();
            let vac = noise_kernel(t, &ctx(0.0)).unwrap();
            assert!(rel(cold, vac) < 1e-6);
        }
    }

    #[test]
    fn f_function_values() {
        let c = ctx(0.0);
        let w = c.omega();
        assert_eq!(f_function(0.0, &c), w);
        assert!(f_function(PI / w, &c).abs() < 1e-15 * w);
        assert!(rel(f_function(PI / (2.0 * w), &c), 2.0 * w / PI) < 1e-14);
    }

    proptest! {
        #[test]
        fn kernel_symmetries(ut in 1e-6..1e4f64) {
            let c = ctx(0.0);
            let t = ut / c.omega();
            prop_assert_eq!(dissipation_kernel(-t, &c), -dissipation_kernel(t, &c));
            prop_assert_eq!(noise_kernel(-t, &c).unwrap(), noise_kernel(t, &c).unwrap());
        }

        #[test]
        fn thermal_kernel_symmetric(ut in 1e-3..1e3f64) {
            let c = ctx(2.0);
            let t = ut / c.omega();
            let a = noise_kernel(t, &c).unwrap();
            let b = noise_kernel(-t, &c).unwrap();
            prop_assert!((a - b).abs() <= 1e-14 * a.abs());
        }
    }
}
