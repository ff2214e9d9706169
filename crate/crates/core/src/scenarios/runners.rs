use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{logspace, loglog_slope, ParamDef, ParamKind, ScenarioData, ScenarioError, ScenarioName, ScenarioSpec, Summary, Table};
use crate::decoherence::{
    caldeira_leggett_length, coherence_length, crossover_curve, gamma_harmonic, n_particle_gamma, n_particle_velocity_bound,
    sharp_cutoff_preparation_time, vacuum_factor_from_velocity, vacuum_gamma_from_velocity,
};
use crate::dynamics::{abraham_lorentz_solve, fitted_damping_rate, harmonic_roots, SolverOptions};
use crate::error::Error;
use crate::kernels::{dissipation_kernel, f_function, noise_kernel, noise_kernel_vacuum, KernelContext};
use crate::numerics::QuadratureSpec;
use crate::units::{build_config, mass_renormalization, Overrides, PREPARATION_TIME};
use crate::wavepacket::{evolve_gaussian, interference_collision, single_packet_density, GaussianPacket, PhaseForm};
use crate::PhysicalConfig;

type Run = Result<ScenarioData, ScenarioError>;

const fn num(key: &'static str, default: &'static str, unit: &'static str, help: &'static str) -> ParamDef {
    ParamDef { key, default, unit, help, kind: ParamKind::Number }
}

const ALPHA: ParamDef = num("alpha", "0.007297352573756914", "1", "fine structure constant");
const TAU_P: ParamDef = num("tau_p", "1e-21", "s", "preparation time τ_p (sets the UV cutoff of the vacuum logarithm)");

const FIG1: &[ParamDef] = &[
    ALPHA,
    TAU_P,
    num("temperature", "1", "K", "bath temperature (must be positive)"),
    num("dq_over_c_tau_b", "0.1", "1", "path separation |Δq| in units of cτ_B"),
    num("ratio_min", "0.1", "1", "smallest t_f/τ_B"),
    num("ratio_max", "1000", "1", "largest t_f/τ_B"),
    num("points", "121", "1", "log-spaced grid points"),
];

const FREE_PACKET: &[ParamDef] = &[
    ALPHA,
    TAU_P,
    num("temperature", "0", "K", "bath temperature"),
    num("sigma0", "1e-9", "m", "initial width σ₀"),
    num("k0", "1e9", "1/m", "wavevector along x"),
    num("tf", "1e-13", "s", "evolution time"),
    num("coherence_length", "0", "m", "coherence length L; 0 takes the free-electron value at tf"),
    num("points", "101", "1", "samples along x through the packet centre"),
    num("span", "5", "1", "half-width of the sampled window in units of σ(tf)"),
];

const INTERFERENCE: &[ParamDef] = &[
    ALPHA,
    TAU_P,
    num("temperature", "0", "K", "bath temperature"),
    num("v_over_c", "0.1", "1", "packet speed v/c"),
    num("tf", "1", "s", "collision time"),
    num("sigma0", "1e-6", "m", "initial packet width σ₀"),
    num("amplitude_ratio", "1", "1", "|A₂/A₁|"),
    num("relative_phase", "0", "rad", "arg(A₂/A₁)"),
    ParamDef {
        key: "phase_form",
        default: "exact",
        unit: "-",
        help: "interference phase with the (1 − ε) factors or its ε ≪ 1 reduction",
        kind: ParamKind::Choice(&["exact", "small_epsilon"]),
    },
    num("fringes", "2", "1", "fringe periods sampled around x = 0"),
    num("points", "401", "1", "samples along x"),
];

const HARMONIC: &[ParamDef] = &[
    ALPHA,
    num("temperature", "0", "K", "bath temperature"),
    num("omega0", "1e15", "rad/s", "trap frequency ω₀"),
    num("a", "1e-9", "m", "initial half-separation"),
    num("cutoff_phase", "1e5", "1", "Ωt_f of the frequency integral (with τ_p matched to the sharp cutoff)"),
    num("points", "201", "1", "samples of the relative path over [0, t_f]"),
];

const NPARTICLE: &[ParamDef] = &[
    ALPHA,
    TAU_P,
    num("n", "6e23", "1", "number of particles in each branch (integer)"),
    num("d_target", "0.99", "1", "smallest acceptable decoherence factor"),
    num("distance", "1", "m", "distance travelled by the packets"),
    num("points", "81", "1", "speeds sampled over [0.01, 100]·v_max"),
];

const CL_COMPARE: &[ParamDef] = &[
    ALPHA,
    TAU_P,
    num("temperature", "1", "K", "bath temperature (must be positive)"),
    num("gamma_relax", "1e6", "1/s", "Caldeira–Leggett relaxation rate γ"),
    num("t_min", "1e-9", "s", "shortest time"),
    num("t_max", "1e3", "s", "longest time"),
    num("points", "61", "1", "log-spaced grid points"),
];

const KERNELS_DUMP: &[ParamDef] = &[
    ALPHA,
    num("temperature", "300", "K", "bath temperature"),
    num("omega_t_max", "50", "1", "largest Ωt"),
    num("points", "501", "1", "grid points over [0, omega_t_max]"),
];

const ABRAHAM_LORENTZ: &[ParamDef] = &[
    ALPHA,
    num("omega0_tau0", "1e-3", "1", "ω₀τ₀ of the oscillator"),
    num("periods", "10", "1", "integration time in periods"),
    num("steps_per_period", "2000", "1", "time steps per period"),
    num("x0", "1e-10", "m", "initial displacement"),
    num("v0", "0", "m/s", "initial velocity"),
    num("tolerance", "1e-6", "1", "largest accepted relative local error per step"),
];

pub(super) fn params(name: ScenarioName) -> &'static [ParamDef] {
    match name {
        ScenarioName::Fig1Crossover => FIG1,
        ScenarioName::FreePacket => FREE_PACKET,
        ScenarioName::Interference => INTERFERENCE,
        ScenarioName::Harmonic => HARMONIC,
        ScenarioName::Nparticle => NPARTICLE,
        ScenarioName::ClCompare => CL_COMPARE,
        ScenarioName::KernelsDump => KERNELS_DUMP,
        ScenarioName::AbrahamLorentz => ABRAHAM_LORENTZ,
    }
}

pub(super) fn run(spec: &ScenarioSpec) -> Run {
    match spec.name {
        ScenarioName::Fig1Crossover => fig1_crossover(spec),
        ScenarioName::FreePacket => free_packet(spec),
        ScenarioName::Interference => interference(spec),
        ScenarioName::Harmonic => harmonic(spec),
        ScenarioName::Nparticle => nparticle(spec),
        ScenarioName::ClCompare => cl_compare(spec),
        ScenarioName::KernelsDump => kernels_dump(spec),
        ScenarioName::AbrahamLorentz => abraham_lorentz(spec),
    }
}

fn domain(field: &'static str, reason: impl Into<String>) -> ScenarioError {
    ScenarioError::Domain(Error::Domain { field, reason: reason.into() })
}

fn count(spec: &ScenarioSpec, key: &'static str, min: usize) -> Result<usize, ScenarioError> {
    let v = spec.num(key);
    if v.fract() != 0.0 || v < min as f64 || v > 1e7 {
        return Err(domain(key, format!("must be an integer in [{min}, 1e7], got {v}")));
    }
    Ok(v as usize)
}

fn positive(spec: &ScenarioSpec, key: &'static str) -> Result<f64, ScenarioError> {
    let v = spec.num(key);
    if v > 0.0 {
        Ok(v)
    } else {
        Err(domain(key, format!("must be positive, got {v}")))
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Configuration from `alpha`, `temperature` and `tau_p` where present.
fn config(spec: &ScenarioSpec) -> Result<PhysicalConfig, ScenarioError> {
    let get = |k| spec.parameters.contains_key(k).then(|| spec.num(k));
    let overrides = Overrides { preparation_time: get("tau_p"), ..Default::default() };
    Ok(build_config(spec.num("alpha"), get("temperature").unwrap_or(0.0), &overrides)?)
}

fn config_warnings(cfg: &PhysicalConfig) -> Vec<String> {
    let mut w = Vec::new();
    if !cfg.low_temperature_valid {
        w.push(format!("k_B T is not small against m c² at T = {} K", cfg.temperature));
    }
    if cfg.preparation_time_tau_p != PREPARATION_TIME {
        w.push(format!("preparation time τ_p = {:e} s differs from the default", cfg.preparation_time_tau_p));
    }
    w
}

/// Indices where `a − b` changes sign, and the log-interpolated abscissae.
fn crossings(x: &[f64], a: &[f64], b: &[f64]) -> Vec<f64> {
    let d: Vec<f64> = a.iter().zip(b).map(|(a, b)| a - b).collect();
    let mut out = Vec::new();
    for i in 1..d.len() {
        if d[i] == 0.0 {
            out.push(x[i]);
        } else if d[i - 1] != 0.0 && (d[i - 1] < 0.0) != (d[i] < 0.0) {
            let s = d[i - 1] / (d[i - 1] - d[i]);
            out.push((x[i - 1].ln() + s * (x[i].ln() - x[i - 1].ln())).exp());
        }
    }
    out
}

/// Rows whose abscissa lies in `[lo, hi]` (with a relative slack for grid round-off).
fn window(x: &[f64], lo: f64, hi: f64) -> Vec<usize> {
    let eps = 1e-9;
    (0..x.len()).filter(|&i| x[i] >= lo * (1.0 - eps) && x[i] <= hi * (1.0 + eps)).collect()
}

fn pick(v: &[f64], idx: &[usize]) -> Vec<f64> {
    idx.iter().map(|&i| v[i]).collect()
}

fn fig1_crossover(spec: &ScenarioSpec) -> Run {
    let cfg = config(spec)?;
    if cfg.temperature <= 0.0 {
        return Err(domain("temperature", "the crossover needs T > 0"));
    }
    let n = count(spec, "points", 2)?;
    let (lo, hi) = (positive(spec, "ratio_min")?, positive(spec, "ratio_max")?);
    if hi <= lo {
        return Err(domain("ratio_max", "must exceed ratio_min"));
    }
    let dq = positive(spec, "dq_over_c_tau_b")?;
    let ctx = KernelContext::new(cfg.clone());
    let tau_b = cfg.thermal_correlation_time.expect("T > 0");
    let ratios = logspace(lo, hi, n);
    let points: Vec<_> = ratios
        .par_iter()
        .map(|r| crossover_curve(dq, std::slice::from_ref(r), &ctx).map(|mut p| p.remove(0)))
        .collect::<Result<_, _>>()?;

    let mut table = Table::new(&[
        ("t_f_over_tau_b", "1"),
        ("t_f", "s"),
        ("gamma_vac", "1"),
        ("gamma_th", "1"),
        ("coherence_length", "m"),
        ("decoherence_factor", "1"),
    ]);
    for p in &points {
        table.push(vec![
            p.t_f_over_tau_b,
            p.t_f_over_tau_b * tau_b,
            p.gamma_vac,
            p.gamma_th,
            p.coherence_length_m,
            p.decoherence_factor,
        ]);
    }
    let vac: Vec<f64> = points.iter().map(|p| p.gamma_vac.abs()).collect();
    let th: Vec<f64> = points.iter().map(|p| p.gamma_th.abs()).collect();
    let cross = crossings(&ratios, &vac, &th);
    let tail = window(&ratios, 10.0, 1000.0);

    let mut s = Summary::default();
    s.put("tau_b_s", tau_b);
    s.put("separation_m", dq * cfg.speed_of_light * tau_b);
    s.put("crossings", cross.len());
    s.put_opt("crossover_t_f_over_tau_b", cross.first().copied());
    s.put("tail_points", tail.len());
    s.put_opt("slope_gamma_th_tail", loglog_slope(&pick(&ratios, &tail), &pick(&th, &tail)));
    s.put_opt("slope_gamma_vac_tail", loglog_slope(&pick(&ratios, &tail), &pick(&vac, &tail)));
    let mut warnings = config_warnings(&cfg);
    if tail.len() < 2 {
        warnings.push("fewer than two grid points in t_f/τ_B ∈ [10, 1000]; tail slopes not reported".into());
    }
    Ok(ScenarioData { table, summary: s, warnings })
}

fn free_packet(spec: &ScenarioSpec) -> Run {
    let cfg = config(spec)?;
    let ctx = KernelContext::new(cfg.clone());
    let t_f = positive(spec, "tf")?;
    let n = count(spec, "points", 2)?;
    let span = positive(spec, "span")?;
    let given = spec.num("coherence_length");
    let l = if given == 0.0 {
        coherence_length(t_f, &ctx)?
    } else if given > 0.0 {
        given
    } else {
        return Err(domain("coherence_length", "must be non-negative"));
    };
    let packet = GaussianPacket::new([0.0; 3], spec.num("sigma0"), [spec.num("k0"), 0.0, 0.0], Complex64::new(1.0, 0.0))?;
    let (centre, sigma) = evolve_gaussian(&packet, t_f, Some(l), &cfg)?;
    let (_, sigma_free) = evolve_gaussian(&packet, t_f, None, &cfg)?;
    let xs = linspace(centre[0] - span * sigma, centre[0] + span * sigma, n);
    let rows: Vec<Vec<f64>> = xs
        .par_iter()
        .map(|&x| {
            let r = [x, centre[1], centre[2]];
            Ok(vec![
                x,
                single_packet_density(&packet, t_f, Some(l), r, &cfg)?,
                single_packet_density(&packet, t_f, None, r, &cfg)?,
            ])
        })
        .collect::<Result<_, Error>>()?;
    let table = Table { columns: vec![("x", "m"), ("rho", "1/m^3"), ("rho_no_decoherence", "1/m^3")], rows };

    let mut s = Summary::default();
    s.put("coherence_length_m", l);
    s.put("center_x_m", centre[0]);
    s.put("sigma_tf_m", sigma);
    s.put("sigma_tf_no_decoherence_m", sigma_free);
    s.put("width_ratio", sigma / sigma_free);
    s.put("peak_rho", (2.0 * PI * sigma * sigma).powf(-1.5));
    Ok(ScenarioData { table, summary: s, warnings: config_warnings(&cfg) })
}

fn interference(spec: &ScenarioSpec) -> Run {
    let cfg = config(spec)?;
    let ctx = KernelContext::new(cfg.clone());
    let c = cfg.speed_of_light;
    let beta = spec.num("v_over_c");
    if !(0.0..1.0).contains(&beta) {
        return Err(domain("v_over_c", format!("must be in [0, 1), got {beta}")));
    }
    let t_f = positive(spec, "tf")?;
    let sigma0 = positive(spec, "sigma0")?;
    let ratio = spec.num("amplitude_ratio");
    if ratio <= 0.0 {
        return Err(domain("amplitude_ratio", "must be positive"));
    }
    let amps = [Complex64::new(1.0, 0.0), Complex64::from_polar(ratio, spec.num("relative_phase"))];
    let n = count(spec, "points", 2)?;
    let form = match spec.choice("phase_form") {
        "small_epsilon" => PhaseForm::SmallEpsilon,
        _ => PhaseForm::Exact,
    };
    let weight = amps[0].norm_sqr() + amps[1].norm_sqr();
    let mut s = Summary::default();
    let mut warnings = config_warnings(&cfg);
    let v = beta * c;

    if v == 0.0 {
        // Both branches coincide: nothing radiates, nothing decoheres.
        let sum = amps[0] + amps[1];
        let packet = GaussianPacket::new([0.0; 3], sigma0, [0.0; 3], sum)?;
        let (_, sigma) = evolve_gaussian(&packet, t_f, None, &cfg)?;
        let xs = linspace(-3.0 * sigma, 3.0 * sigma, n);
        let rows = xs
            .iter()
            .map(|&x| Ok(vec![x, single_packet_density(&packet, t_f, None, [x, 0.0, 0.0], &cfg)?]))
            .collect::<Result<_, Error>>()?;
        s.put("velocity_m_s", 0.0);
        s.put("collision_time_s", t_f);
        s.put_opt("coherence_length_m", None);
        s.put("epsilon", 0.0);
        s.put("decoherence_factor_d", 1.0);
        s.put("d_velocity_form", 1.0);
        s.put("gamma_vac_velocity_form", 0.0);
        s.put("visibility_formula", 2.0 * ratio / weight);
        s.put("envelope_width_m", sigma);
        warnings.push("v = 0: the branches coincide and no fringes form".into());
        return Ok(ScenarioData { table: Table { columns: vec![("x", "m"), ("rho", "1/m^3")], rows }, summary: s, warnings });
    }

    let k0 = cfg.renormalized_mass_kg() * v / cfg.planck_hbar;
    let a = v * t_f;
    let rep = interference_collision(a, sigma0, k0, amps, &ctx, form)?;
    let period = 2.0 * PI / rep.fringe_wavevector;
    let half = 0.5 * positive(spec, "fringes")? * period;
    let xs = linspace(-half, half, n);
    let rows = xs.par_iter().map(|&x| vec![x, rep.density_on_axis(x)]).collect();
    let table = Table { columns: vec![("x", "m"), ("rho", "1/m^3")], rows };

    s.put("velocity_m_s", rep.velocity_m_s);
    s.put("k0_per_m", k0);
    s.put("half_separation_m", a);
    s.put("collision_time_s", rep.collision_time_s);
    s.put_opt("coherence_length_m", rep.coherence_length_m);
    s.put("envelope_width_m", rep.envelope_width_sigma_tf);
    s.put("fringe_wavevector_per_m", rep.fringe_wavevector);
    s.put("epsilon", rep.epsilon);
    s.put("decoherence_factor_d", rep.decoherence_factor_d);
    s.put("d_velocity_form", vacuum_factor_from_velocity(v, t_f, &ctx)?);
    s.put("gamma_vac_velocity_form", vacuum_gamma_from_velocity(v, t_f, &ctx)?);
    s.put("visibility", rep.visibility);
    s.put("visibility_formula", rep.visibility_formula);
    Ok(ScenarioData { table, summary: s, warnings })
}

fn harmonic(spec: &ScenarioSpec) -> Run {
    let cfg = config(spec)?;
    let omega_0 = positive(spec, "omega0")?;
    let a = spec.num("a");
    let phase = positive(spec, "cutoff_phase")?;
    let n = count(spec, "points", 2)?;
    let roots = harmonic_roots(omega_0, &cfg)?;

    let t_f = PI / (2.0 * omega_0);
    let omega = phase / t_f;
    let ctx = KernelContext::new(cfg.with_cutoff(omega, sharp_cutoff_preparation_time(omega))?);
    let h = gamma_harmonic(a, omega_0, &ctx, &QuadratureSpec::default())?;

    let c = cfg.speed_of_light;
    let rows = linspace(0.0, t_f, n)
        .into_iter()
        .map(|t| vec![t, 2.0 * a * (omega_0 * t).cos(), -a * omega_0 * (omega_0 * t).sin() / c])
        .collect();
    let table = Table { columns: vec![("t", "s"), ("q", "m"), ("v_over_c", "1")], rows };

    let mut s = Summary::default();
    s.put("omega0_tau0", omega_0 * cfg.radiation_time);
    s.put("tau0_s", cfg.radiation_time);
    s.put("root_re", roots.physical_pair[0].re);
    s.put("root_im", roots.physical_pair[0].im);
    s.put("perturbative_root_re", roots.perturbative_pair[0].re);
    s.put_opt("runaway_root", roots.runaway_root);
    s.put("root_residual", roots.max_residual);
    s.put("damping_gamma_per_s", roots.damping_gamma);
    s.put("collision_time_s", t_f);
    s.put("gamma_t_f", roots.damping_gamma * t_f);
    s.put("cutoff_omega", omega);
    s.put("matched_tau_p_s", ctx.cfg.preparation_time_tau_p);
    s.put_opt("frequency_integral", h.frequency_integral);
    s.put_opt("gamma", h.gamma);
    s.put("mean_square_velocity_over_c2", h.mean_square_velocity_over_c2);
    s.put("gamma_vac_asymptotic", h.gamma_vac_asymptotic);
    s.put("d_vac", h.d_vac);
    s.put_opt("gamma_over_asymptotic", h.gamma.map(|g| g / h.gamma_vac_asymptotic));
    let mut warnings = config_warnings(&cfg);
    warnings.extend(roots.warnings);
    warnings.extend(h.warnings);
    Ok(ScenarioData { table, summary: s, warnings })
}

fn nparticle(spec: &ScenarioSpec) -> Run {
    let cfg = config(spec)?;
    let ctx = KernelContext::new(cfg.clone());
    let nf = spec.num("n");
    if nf < 1.0 || nf.fract() != 0.0 || nf >= u128::MAX as f64 {
        return Err(domain("n", format!("must be a positive integer, got {nf}")));
    }
    let n = nf as u128;
    let points = count(spec, "points", 1)?;
    let bound = n_particle_velocity_bound(n, spec.num("d_target"), spec.num("distance"), &ctx)?;
    let distance = bound.distance_m;
    let rows = logspace(1e-2 * bound.max_velocity, 1e2 * bound.max_velocity, points)
        .into_iter()
        .map(|v| {
            let t = distance / v;
            let g1 = vacuum_gamma_from_velocity(v, t, &ctx)?;
            let gn = n_particle_gamma(g1, n)?;
            Ok(vec![v, t, g1, gn, gn.exp()])
        })
        .collect::<Result<_, Error>>()?;
    let table = Table {
        columns: vec![("v", "m/s"), ("t_f", "s"), ("gamma_single", "1"), ("gamma_n", "1"), ("decoherence_factor_n", "1")],
        rows,
    };
    let mut s = Summary::default();
    s.put("n", bound.n);
    s.put("target_factor", bound.target_factor);
    s.put("distance_m", distance);
    s.put("max_velocity_m_s", bound.max_velocity);
    s.put("travel_time_s", bound.travel_time_s);
    s.put("travel_time_years", bound.travel_time_years);
    s.put("gamma_single", bound.gamma_single);
    s.put("gamma_n", n_particle_gamma(bound.gamma_single, n)?);
    Ok(ScenarioData { table, summary: s, warnings: config_warnings(&cfg) })
}

fn cl_compare(spec: &ScenarioSpec) -> Run {
    let cfg = config(spec)?;
    if cfg.temperature <= 0.0 {
        return Err(domain("temperature", "the Caldeira–Leggett length needs T > 0"));
    }
    let ctx = KernelContext::new(cfg.clone());
    let gamma = positive(spec, "gamma_relax")?;
    let (lo, hi) = (positive(spec, "t_min")?, positive(spec, "t_max")?);
    if hi <= lo {
        return Err(domain("t_max", "must exceed t_min"));
    }
    let n = count(spec, "points", 2)?;
    let mass = cfg.renormalized_mass_kg();
    let ts = logspace(lo, hi, n);
    let rows: Vec<Vec<f64>> = ts
        .par_iter()
        .map(|&t| {
            let lb = coherence_length(t, &ctx)?;
            let lc = caldeira_leggett_length(t, cfg.temperature, gamma, mass, &cfg)?;
            Ok(vec![t, lb, lc, lb / lc])
        })
        .collect::<Result<_, Error>>()?;
    let col = |i: usize| rows.iter().map(|r| r[i]).collect::<Vec<f64>>();
    let (lb, lc) = (col(1), col(2));
    let tail = window(&ts, hi / 10.0, hi);
    let mut s = Summary::default();
    s.put("tau_b_s", cfg.thermal_correlation_time.expect("T > 0"));
    s.put("mass_kg", mass);
    s.put_opt("slope_l_brems_last_decade", loglog_slope(&pick(&ts, &tail), &pick(&lb, &tail)));
    s.put_opt("slope_l_cl_last_decade", loglog_slope(&pick(&ts, &tail), &pick(&lc, &tail)));
    s.put("ratio_at_t_max", lb[n - 1] / lc[n - 1]);
    let table = Table {
        columns: vec![("t", "s"), ("l_brems", "m"), ("l_cl", "m"), ("ratio", "1")],
        rows,
    };
    Ok(ScenarioData { table, summary: s, warnings: config_warnings(&cfg) })
}

fn kernels_dump(spec: &ScenarioSpec) -> Run {
    let cfg = config(spec)?;
    let ctx = KernelContext::new(cfg.clone());
    let n = count(spec, "points", 2)?;
    let max = positive(spec, "omega_t_max")?;
    let omega = ctx.omega();
    let rows: Vec<Vec<f64>> = linspace(0.0, max, n)
        .par_iter()
        .map(|&u| {
            let t = u / omega;
            Ok(vec![
                t,
                u,
                dissipation_kernel(t, &ctx),
                noise_kernel(t, &ctx)?,
                noise_kernel_vacuum(t, &ctx),
                f_function(t, &ctx),
            ])
        })
        .collect::<Result<_, Error>>()?;
    let mut s = Summary::default();
    s.put("cutoff_omega", omega);
    s.put("delta_m_over_m", mass_renormalization(&cfg).delta_m_over_m);
    s.put("noise_kernel_at_zero", rows[0][3]);
    s.put("noise_kernel_vacuum_at_zero", rows[0][4]);
    s.put_opt("beta_s", cfg.beta());
    let table = Table {
        columns: vec![
            ("t", "s"),
            ("omega_t", "1"),
            ("dissipation_kernel", "1/s^2"),
            ("noise_kernel", "1/s^2"),
            ("noise_kernel_vacuum", "1/s^2"),
            ("f", "1/s"),
        ],
        rows,
    };
    Ok(ScenarioData { table, summary: s, warnings: config_warnings(&cfg) })
}

fn abraham_lorentz(spec: &ScenarioSpec) -> Run {
    let cfg = config(spec)?;
    let wt = positive(spec, "omega0_tau0")?;
    let periods = positive(spec, "periods")?;
    let per = count(spec, "steps_per_period", 8)?;
    let tau0 = cfg.radiation_time;
    let omega_0 = wt / tau0;
    let period = 2.0 * PI / omega_0;
    let k = cfg.renormalized_mass_kg() * omega_0 * omega_0;
    let opts = SolverOptions {
        tolerance: positive(spec, "tolerance")?,
        force_timescale: Some(period),
        record_every: 1,
    };
    let r = abraham_lorentz_solve(
        move |_, x, _| -k * x,
        spec.num("x0"),
        spec.num("v0"),
        (0.0, periods * period),
        period / per as f64,
        &cfg,
        &opts,
    )?;
    let expected = tau0 * omega_0 * omega_0;
    let fitted = fitted_damping_rate(&r.times, &r.position)?;
    let mut s = Summary::default();
    s.put("omega0_per_s", omega_0);
    s.put("tau0_s", tau0);
    s.put("expected_gamma_per_s", expected);
    s.put("fitted_gamma_per_s", fitted);
    s.put("relative_error", (fitted - expected).abs() / expected);
    s.put("steps", r.diagnostics.steps);
    s.put("max_local_error", r.diagnostics.max_local_error);
    s.put("force_evaluations", r.diagnostics.force_evaluations);
    let rows = (0..r.times.len())
        .map(|i| vec![r.times[i], r.position[i], r.velocity[i], r.acceleration[i]])
        .collect();
    let table = Table { columns: vec![("t", "s"), ("x", "m"), ("v", "m/s"), ("a", "m/s^2")], rows };
    let mut warnings = config_warnings(&cfg);
    if wt >= 0.1 {
        warnings.push(format!("ω₀τ₀ = {wt:e} is not small"));
    }
    Ok(ScenarioData { table, summary: s, warnings })
}
