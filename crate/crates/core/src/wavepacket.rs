//! Gaussian wave packets under the free propagator with decoherence.
//!
//! A packet is `ψ(x) = A (2πσ₀²)^{−3/4} exp[−(x − a)²/(4σ₀²) − i k₀·(x − a)]`,
//! so its centre moves with velocity `−ħk₀/m_R`. The decoherence function
//! of the free electron enters as `Γ = −|q|²/(2L²)` on the relative
//! coordinate. SI units throughout.

use std::cell::Cell;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::decoherence::{coherence_length, Vec3};
use crate::error::{check, Error, Result};
use crate::kernels::KernelContext;
use crate::numerics::{integrate_adaptive, QuadratureSpec};
use crate::units::PhysicalConfig;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaussianPacket {
    pub center_a: Vec3,
    pub width_sigma0: f64,
    pub wavevector_k0: Vec3,
    pub amplitude: Complex64,
}

impl GaussianPacket {
    pub fn new(center_a: Vec3, width_sigma0: f64, wavevector_k0: Vec3, amplitude: Complex64) -> Result<Self> {
        check("width_sigma0", width_sigma0, width_sigma0 > 0.0, "positive")?;
        for x in center_a.iter().chain(wavevector_k0.iter()) {
            check("packet", *x, true, "finite")?;
        }
        check("amplitude", amplitude.norm(), true, "finite")?;
        Ok(Self { center_a, width_sigma0, wavevector_k0, amplitude })
    }

    /// One-dimensional factor of the wave function along `axis`, without
    /// the amplitude.
    fn axial(&self, axis: usize, x: f64) -> Complex64 {
        let s = self.width_sigma0;
        let d = x - self.center_a[axis];
        let norm = (2.0 * PI * s * s).powf(-0.25);
        Complex64::from_polar(norm * (-d * d / (4.0 * s * s)).exp(), -self.wavevector_k0[axis] * d)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuperpositionState {
    pub packets: Vec<GaussianPacket>,
    pub normalized: bool,
}

impl SuperpositionState {
    /// One or two packets; two packets must share σ₀.
    pub fn new(packets: Vec<GaussianPacket>) -> Result<Self> {
        match packets.len() {
            1 => {}
            2 if packets[0].width_sigma0 == packets[1].width_sigma0 => {}
            2 => return Err(Error::domain("packets", "the two packets must have equal widths")),
            n => return Err(Error::domain("packets", format!("need one or two packets, got {n}"))),
        }
        if packets.iter().all(|p| p.amplitude.norm() == 0.0) {
            return Err(Error::domain("amplitude", "all amplitudes vanish"));
        }
        let mut st = Self { packets, normalized: false };
        st.normalized = (st.norm() - 1.0).abs() < 1e-12;
        Ok(st)
    }

    /// ⟨ψ|ψ⟩ including the overlap of the two packets.
    pub fn norm(&self) -> f64 {
        let mut total = 0.0;
        for pj in &self.packets {
            for pk in &self.packets {
                total += (pj.amplitude * pk.amplitude.conj() * overlap(pj, pk)).re;
            }
        }
        total
    }

    /// Rescales the amplitudes to unit norm.
    pub fn normalize(mut self) -> Self {
        let n = self.norm().sqrt();
        for p in &mut self.packets {
            p.amplitude /= n;
        }
        self.normalized = true;
        self
    }
}

/// ⟨ψ_k|ψ_j⟩ for unit-amplitude packets of equal width.
pub fn overlap(pj: &GaussianPacket, pk: &GaussianPacket) -> Complex64 {
    let s = pj.width_sigma0;
    let mut d_sq = 0.0;
    let mut dk_sq = 0.0;
    let mut phase = 0.0;
    for i in 0..3 {
        let d = pj.center_a[i] - pk.center_a[i];
        let dk = pj.wavevector_k0[i] - pk.wavevector_k0[i];
        let mid = 0.5 * (pj.center_a[i] + pk.center_a[i]);
        d_sq += d * d;
        dk_sq += dk * dk;
        phase += pj.wavevector_k0[i] * pj.center_a[i] - pk.wavevector_k0[i] * pk.center_a[i] - dk * mid;
    }
    Complex64::from_polar((-d_sq / (8.0 * s * s) - 0.5 * s * s * dk_sq).exp(), phase)
}

/// Density-matrix propagator of the free particle,
/// `(m_R/2πħt)³ exp[i m_R Δr·Δq/(ħt)]`.
pub fn free_propagator_kernel(delta_r: Vec3, delta_q: Vec3, t_f: f64, cfg: &PhysicalConfig) -> Result<Complex64> {
    check("t_f", t_f, t_f > 0.0, "positive")?;
    let k = cfg.renormalized_mass_kg() / (cfg.planck_hbar * t_f);
    let dot: f64 = (0..3).map(|i| delta_r[i] * delta_q[i]).sum();
    Ok(Complex64::from_polar((k / (2.0 * PI)).powi(3), k * dot))
}

fn hbar_over_m(cfg: &PhysicalConfig) -> f64 {
    cfg.planck_hbar / cfg.renormalized_mass_kg()
}

fn check_length(l: Option<f64>) -> Result<()> {
    if let Some(l) = l {
        check("coherence_length", l, l > 0.0, "positive")?;
    }
    Ok(())
}

/// Centre `b = a − ħk₀t/m_R` and width σ(t) of an evolved packet;
/// `coherence_length = None` is L = ∞ (free Schrödinger spreading).
pub fn evolve_gaussian(packet: &GaussianPacket, t_f: f64, coherence_length: Option<f64>, cfg: &PhysicalConfig) -> Result<(Vec3, f64)> {
    check("t_f", t_f, t_f >= 0.0, "non-negative")?;
    check_length(coherence_length)?;
    let hm = hbar_over_m(cfg);
    let b = [0, 1, 2].map(|i| packet.center_a[i] - hm * packet.wavevector_k0[i] * t_f);
    Ok((b, width_at(packet.width_sigma0, t_f, coherence_length, hm)))
}

fn width_at(s0: f64, t: f64, l: Option<f64>, hm: f64) -> f64 {
    let ht = hm * t;
    let decoh = l.map_or(0.0, |l| (ht / l).powi(2));
    (s0 * s0 + ht * ht / (4.0 * s0 * s0) + decoh).sqrt()
}

/// Closed-form density of one evolved packet at `r`.
pub fn single_packet_density(packet: &GaussianPacket, t_f: f64, coherence_length: Option<f64>, r: Vec3, cfg: &PhysicalConfig) -> Result<f64> {
    let (b, s) = evolve_gaussian(packet, t_f, coherence_length, cfg)?;
    let d_sq: f64 = (0..3).map(|i| (r[i] - b[i]).powi(2)).sum();
    Ok(packet.amplitude.norm_sqr() * (2.0 * PI * s * s).powf(-1.5) * (-d_sq / (2.0 * s * s)).exp())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseForm {
    /// φ with the (1 − ε) factors.
    #[default]
    Exact,
    /// The ε ≪ 1 reduction.
    SmallEpsilon,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterferenceReport {
    pub collision_time_s: f64,
    pub velocity_m_s: f64,
    /// `None` for L = ∞.
    pub coherence_length_m: Option<f64>,
    pub envelope_width_sigma_tf: f64,
    pub envelope_center_b: Vec3,
    pub fringe_wavevector: f64,
    pub epsilon: f64,
    pub decoherence_factor_d: f64,
    /// (ρ_max − ρ_min)/(ρ_max + ρ_min) over the central fringe.
    pub visibility: f64,
    /// 2|A₁A₂|D/(|A₁|² + |A₂|²).
    pub visibility_formula: f64,
    pub phase_form: PhaseForm,
    #[serde(skip)]
    amplitudes: [Complex64; 2],
    #[serde(skip)]
    k0: f64,
}

impl InterferenceReport {
    /// Complex phase φ(x) multiplying A₁A₂* in the interference term.
    pub fn phase(&self, x: f64) -> Complex64 {
        Complex64::new(self.decoherence_factor_d.ln(), -self.fringe_wavevector * x)
    }

    /// Density on the collision axis, `r = (x, 0, 0)`, at the collision time.
    pub fn density_on_axis(&self, x: f64) -> f64 {
        self.density([x, 0.0, 0.0])
    }

    pub fn density(&self, r: Vec3) -> f64 {
        let s = self.envelope_width_sigma_tf;
        let r_sq: f64 = r.iter().map(|x| x * x).sum();
        let env = (2.0 * PI * s * s).powf(-1.5) * (-r_sq / (2.0 * s * s)).exp();
        let [a1, a2] = self.amplitudes;
        let cross = a1 * a2.conj() * self.phase(r[0]).exp();
        env * (a1.norm_sqr() + a2.norm_sqr() + 2.0 * cross.re)
    }
}

/// Two packets at ±a (along x) with wavevectors ±k₀, observed at the
/// collision time `t_f = a m_R/(ħk₀)`. L is taken from the free-electron
/// asymptotics at `t_f`.
pub fn interference_collision(a: f64, sigma0: f64, k0: f64, amplitudes: [Complex64; 2], ctx: &KernelContext, form: PhaseForm) -> Result<InterferenceReport> {
    check("k0", k0, k0 > 0.0, "positive (the packets must approach each other)")?;
    check("a", a, a > 0.0, "positive")?;
    let t_f = a / (hbar_over_m(&ctx.cfg) * k0);
    let l = coherence_length(t_f, ctx)?;
    interference_with_length(a, sigma0, k0, amplitudes, Some(l), &ctx.cfg, form)
}

/// As [`interference_collision`] with an explicit coherence length
/// (`None` for L = ∞).
pub fn interference_with_length(
    a: f64,
    sigma0: f64,
    k0: f64,
    amplitudes: [Complex64; 2],
    coherence_length: Option<f64>,
    cfg: &PhysicalConfig,
    form: PhaseForm,
) -> Result<InterferenceReport> {
    check("k0", k0, k0 > 0.0, "positive (the packets must approach each other)")?;
    check("a", a, a > 0.0, "positive")?;
    check("sigma0", sigma0, sigma0 > 0.0, "positive")?;
    check_length(coherence_length)?;
    let [a1, a2] = amplitudes;
    if !(a1.norm() > 0.0 && a2.norm() > 0.0) || !(a1.norm().is_finite() && a2.norm().is_finite()) {
        return Err(Error::domain("amplitudes", "both amplitudes must be finite and non-zero"));
    }
    let hm = hbar_over_m(cfg);
    let velocity = hm * k0;
    let t_f = a / velocity;
    let sigma = width_at(sigma0, t_f, coherence_length, hm);
    // ε = (1 + L²/(4σ₀²) + m²σ₀²L²/(ħt)²)⁻¹, written to avoid cancellation.
    let epsilon = coherence_length.map_or(0.0, |l| {
        let ht = hm * t_f;
        1.0 / (1.0 + (l / (2.0 * sigma0)).powi(2) + (sigma0 * l / ht).powi(2))
    });
    let decoh = coherence_length.map_or(0.0, |l| 2.0 * a * a / (l * l));
    let (fringe, log_d) = match form {
        PhaseForm::Exact => (2.0 * k0 * (1.0 - epsilon), -decoh * (1.0 - epsilon)),
        PhaseForm::SmallEpsilon => (2.0 * k0, -decoh),
    };
    let d = log_d.exp();
    let weight = a1.norm_sqr() + a2.norm_sqr();
    let mut rep = InterferenceReport {
        collision_time_s: t_f,
        velocity_m_s: velocity,
        coherence_length_m: coherence_length,
        envelope_width_sigma_tf: sigma,
        envelope_center_b: [0.0; 3],
        fringe_wavevector: fringe,
        epsilon,
        decoherence_factor_d: d,
        visibility: 0.0,
        visibility_formula: 2.0 * (a1 * a2).norm() * d / weight,
        phase_form: form,
        amplitudes,
        k0,
    };
    rep.visibility = central_fringe_visibility(&rep);
    Ok(rep)
}

/// Samples one fringe period around x = 0 and refines the extrema.
fn central_fringe_visibility(rep: &InterferenceReport) -> f64 {
    let period = 2.0 * PI / rep.fringe_wavevector;
    let n = 4000;
    let xs: Vec<f64> = (0..=n).map(|i| period * (i as f64 / n as f64 - 0.5)).collect();
    let rho: Vec<f64> = xs.iter().map(|&x| rep.density_on_axis(x)).collect();
    let refine = |i: usize| {
        if i == 0 || i == n {
            return rho[i];
        }
        let (y0, y1, y2) = (rho[i - 1], rho[i], rho[i + 1]);
        let denom = y0 - 2.0 * y1 + y2;
        if denom == 0.0 {
            return y1;
        }
        let off = 0.5 * (y0 - y2) / denom;
        rep.density_on_axis(xs[i] + off * (xs[1] - xs[0]))
    };
    let imax = (0..=n).max_by(|&i, &j| rho[i].total_cmp(&rho[j])).unwrap();
    let imin = (0..=n).min_by(|&i, &j| rho[i].total_cmp(&rho[j])).unwrap();
    let (hi, lo) = (refine(imax).max(rho[imax]), refine(imin).min(rho[imin]));
    (hi - lo) / (hi + lo)
}

/// Two packets in the collision geometry as a [`SuperpositionState`].
pub fn collision_state(a: f64, sigma0: f64, k0: f64, amplitudes: [Complex64; 2]) -> Result<SuperpositionState> {
    SuperpositionState::new(vec![
        GaussianPacket::new([a, 0.0, 0.0], sigma0, [k0, 0.0, 0.0], amplitudes[0])?,
        GaussianPacket::new([-a, 0.0, 0.0], sigma0, [-k0, 0.0, 0.0], amplitudes[1])?,
    ])
}

/// Half-widths (in units of σ₀) beyond which the Gaussian weights
/// e^{−u²/2} and e^{−p²/8} are below 1e-17.
const OUTER_RANGE: f64 = 9.0;
const INNER_RANGE: f64 = 18.0;

/// One axis of the density-matrix integral for the pair (j, k):
///
/// `(m/2πħt) ∫dR ∫dq e^{−i m (r−R) q/(ħt) − q²/(2L²)} φ_j(R + q/2) φ_k*(R − q/2)`,
///
/// by nested adaptive quadrature directly on the wave functions.
#[allow(clippy::too_many_arguments)]
fn axial_pair_integral(
    pj: &GaussianPacket,
    pk: &GaussianPacket,
    axis: usize,
    r: f64,
    t_f: f64,
    coherence_length: Option<f64>,
    hm: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    // Dimensionless variables u = R/σ₀, p = q/σ₀; √σ₀·φ is O(1).
    let s0 = pj.width_sigma0;
    let kappa = s0 * s0 / (hm * t_f);
    let rr = r / s0;
    let mid = 0.5 * (pj.center_a[axis] + pk.center_a[axis]) / s0;
    let sep = (pj.center_a[axis] - pk.center_a[axis]) / s0;
    let inv_l2 = coherence_length.map_or(0.0, |l| (s0 / l).powi(2));
    let root = s0.sqrt();
    // Oscillation in p comes from the propagator and the packet momenta.
    let k_max = (pj.wavevector_k0[axis].abs().max(pk.wavevector_k0[axis].abs())) * s0
        + kappa * (OUTER_RANGE + (rr - mid).abs());
    let inner_spec = spec.with_rel_tol(0.1 * spec.rel_tol).with_period(2.0 * PI / k_max.max(1e-300));
    let failure: Cell<Option<Error>> = Cell::new(None);

    let inner = |u: f64, part: fn(Complex64) -> f64| {
        let f = |p: f64| {
            let w = Complex64::from_polar((-0.5 * p * p * inv_l2).exp(), -kappa * (rr - u) * p);
            let x1 = (u + 0.5 * p) * s0;
            let x2 = (u - 0.5 * p) * s0;
            part(w * (root * pj.axial(axis, x1)) * (root * pk.axial(axis, x2)).conj())
        };
        match integrate_adaptive(f, sep - INNER_RANGE, sep + INNER_RANGE, &inner_spec) {
            Ok(v) => v.value,
            Err(e) => {
                failure.set(Some(e.into()));
                0.0
            }
        }
    };
    let outer = |part: fn(Complex64) -> f64| integrate_adaptive(|u| inner(u, part), mid - OUTER_RANGE, mid + OUTER_RANGE, spec);
    let re = outer(|z| z.re)?;
    let im = outer(|z| z.im)?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    // dR dq = σ₀² du dp; the two √σ₀ factors and the prefactor κ/(2πσ₀²) leave 1/σ₀.
    Ok(Complex64::new(re.value, im.value) * (kappa / (2.0 * PI * s0)))
}

/// Density at points `r` by direct numerical integration of the
/// density-matrix propagator over the initial state. Each Cartesian axis is
/// integrated separately (the Gaussian state and the decoherence factor
/// both factorise); the pair sum is taken after the product over axes.
pub fn evolve_density_numeric(
    state: &SuperpositionState,
    t_f: f64,
    coherence_length: Option<f64>,
    points: &[Vec3],
    cfg: &PhysicalConfig,
    spec: &QuadratureSpec,
) -> Result<Vec<f64>> {
    check("t_f", t_f, t_f > 0.0, "positive")?;
    check_length(coherence_length)?;
    let hm = hbar_over_m(cfg);
    let n = state.packets.len();
    let mut out = Vec::with_capacity(points.len());
    // Transverse factors only change with the transverse coordinates.
    let mut cache: Vec<((usize, usize, usize), f64, Complex64)> = Vec::new();
    for r in points {
        let mut rho = Complex64::new(0.0, 0.0);
        for j in 0..n {
            for k in 0..n {
                let (pj, pk) = (&state.packets[j], &state.packets[k]);
                let mut term = pj.amplitude * pk.amplitude.conj();
                for axis in 0..3 {
                    let key = (j, k, axis);
                    let cached = (axis > 0)
                        .then(|| cache.iter().find(|(kk, x, _)| *kk == key && *x == r[axis]).map(|c| c.2))
                        .flatten();
                    let v = match cached {
                        Some(v) => v,
                        None => {
                            let v = axial_pair_integral(pj, pk, axis, r[axis], t_f, coherence_length, hm, spec)?;
                            if axis > 0 {
                                cache.push((key, r[axis], v));
                            }
                            v
                        }
                    };
                    term *= v;
                }
                rho += term;
            }
        }
        out.push(rho.re);
    }
    Ok(out)
}
