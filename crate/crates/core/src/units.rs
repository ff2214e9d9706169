//! Physical constants, unit conversions and the derived scales of the
//! electron–radiation-field problem.
//!
//! Internally everything runs in natural units with `ħ = c = 1`: times are
//! seconds, lengths are light-seconds, masses and energies are angular
//! frequencies (s⁻¹). SI values only appear at the API boundary, through
//! the conversion helpers on [`PhysicalConfig`].

use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{check, Result};

/// Fine structure constant.
pub const ALPHA: f64 = 1.0 / 137.035_999;
/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light (m/s).
pub const C: f64 = 299_792_458.0;
/// Boltzmann constant (J/K).
pub const KB: f64 = 1.380_649e-23;
/// Electron rest energy m c² (J).
pub const ELECTRON_REST_ENERGY: f64 = 8.187_105_776_9e-14;
/// Default preparation time τ_p (s).
pub const PREPARATION_TIME: f64 = 1e-21;
/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// Seconds per Julian year.
pub const SECONDS_PER_YEAR: f64 = 365.25 * 86_400.0;

/// `m c² / k_B T` above which the thermal frequency integrals may be
/// extended to infinity.
pub const LOW_TEMPERATURE_RATIO: f64 = 50.0;

/// Optional replacements for the base inputs of [`PhysicalConfig`].
///
/// `None` keeps the default. Derived quantities are never overridden.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub electron_rest_energy: Option<f64>,
    pub uv_cutoff_omega: Option<f64>,
    pub preparation_time: Option<f64>,
    pub speed_of_light: Option<f64>,
    pub planck_hbar: Option<f64>,
    pub boltzmann_k: Option<f64>,
}

/// Immutable set of constants and derived scales.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhysicalConfig {
    pub fine_structure_alpha: f64,
    /// m c² (J).
    pub electron_rest_energy: f64,
    /// Ω (rad/s).
    pub uv_cutoff_omega: f64,
    /// τ_p (s).
    pub preparation_time_tau_p: f64,
    /// T (K).
    pub temperature: f64,
    pub speed_of_light: f64,
    pub planck_hbar: f64,
    pub boltzmann_k: f64,

    /// λ̄_C = ħ/(m c) (m).
    pub compton_wavelength: f64,
    /// r_e = α λ̄_C (m).
    pub classical_electron_radius: f64,
    /// τ₀ = (2/3) r_e / c (s).
    pub radiation_time: f64,
    /// τ_B = ħ/(π k_B T) (s); `None` at T = 0.
    pub thermal_correlation_time: Option<f64>,
    /// λ̄_th = ħ/√(2 m k_B T) (m); `None` at T = 0.
    pub thermal_wavelength: Option<f64>,
    /// e² = 4πα (Heaviside–Lorentz, ħ = c = 1).
    pub squared_charge: f64,
    /// Whether k_B T ≪ m c² holds (ratio above [`LOW_TEMPERATURE_RATIO`]).
    pub low_temperature_valid: bool,
}

impl Default for PhysicalConfig {
    fn default() -> Self {
        build_config(ALPHA, 0.0, &Overrides::default()).expect("default constants are valid")
    }
}

/// Builds a configuration and populates every derived scale.
pub fn build_config(alpha: f64, temperature_k: f64, overrides: &Overrides) -> Result<PhysicalConfig> {
    check("alpha", alpha, alpha > 0.0, "positive")?;
    check("temperature", temperature_k, temperature_k >= 0.0, "non-negative")?;

    let hbar = overrides.planck_hbar.unwrap_or(HBAR);
    let c = overrides.speed_of_light.unwrap_or(C);
    let kb = overrides.boltzmann_k.unwrap_or(KB);
    let rest = overrides.electron_rest_energy.unwrap_or(ELECTRON_REST_ENERGY);
    check("planck_hbar", hbar, hbar > 0.0, "positive")?;
    check("speed_of_light", c, c > 0.0, "positive")?;
    check("boltzmann_k", kb, kb > 0.0, "positive")?;
    check("electron_rest_energy", rest, rest > 0.0, "positive")?;

    let omega = overrides.uv_cutoff_omega.unwrap_or(rest / hbar);
    check("uv_cutoff_omega", omega, omega > 0.0, "positive")?;
    let tau_p = overrides.preparation_time.unwrap_or(PREPARATION_TIME);
    check("preparation_time_tau_p", tau_p, tau_p > 0.0, "positive")?;

    let compton = hbar * c / rest;
    let r_e = alpha * compton;
    let tau0 = 2.0 / 3.0 * r_e / c;

    let (tau_b, lambda_th) = if temperature_k > 0.0 {
        let kt = kb * temperature_k;
        let mass_kg = rest / (c * c);
        (
            Some(hbar / (PI * kt)),
            Some(hbar / (2.0 * mass_kg * kt).sqrt()),
        )
    } else {
        (None, None)
    };
    let low_temperature_valid =
        temperature_k == 0.0 || rest / (kb * temperature_k) > LOW_TEMPERATURE_RATIO;

    Ok(PhysicalConfig {
        fine_structure_alpha: alpha,
        electron_rest_energy: rest,
        uv_cutoff_omega: omega,
        preparation_time_tau_p: tau_p,
        temperature: temperature_k,
        speed_of_light: c,
        planck_hbar: hbar,
        boltzmann_k: kb,
        compton_wavelength: compton,
        classical_electron_radius: r_e,
        radiation_time: tau0,
        thermal_correlation_time: tau_b,
        thermal_wavelength: lambda_th,
        squared_charge: 4.0 * PI * alpha,
        low_temperature_valid,
    })
}

/// Result of [`mass_renormalization`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MassRenormalization {
    /// Δm / m.
    pub delta_m_over_m: f64,
    /// m_R = m + Δm as a rest frequency m_R c²/ħ (s⁻¹).
    pub renormalized_mass: f64,
}

/// Electromagnetic mass Δm = e²Ω/(3π²), linear in the cutoff.
pub fn mass_renormalization(cfg: &PhysicalConfig) -> MassRenormalization {
    let bare = cfg.rest_frequency();
    let delta = electromagnetic_mass(cfg.squared_charge, cfg.uv_cutoff_omega);
    MassRenormalization {
        delta_m_over_m: delta / bare,
        renormalized_mass: bare + delta,
    }
}

/// Δm = e²Ω/(3π²) in natural units (s⁻¹). Zero for a vanishing cutoff.
pub fn electromagnetic_mass(squared_charge: f64, cutoff_omega: f64) -> f64 {
    squared_charge * cutoff_omega / (3.0 * PI * PI)
}

impl PhysicalConfig {
    /// Rebuilds the configuration at another temperature.
    pub fn with_temperature(&self, temperature_k: f64) -> Result<Self> {
        build_config(self.fine_structure_alpha, temperature_k, &self.overrides())
    }

    /// Rebuilds the configuration with another cutoff and preparation time.
    pub fn with_cutoff(&self, omega: f64, tau_p: f64) -> Result<Self> {
        let mut o = self.overrides();
        o.uv_cutoff_omega = Some(omega);
        o.preparation_time = Some(tau_p);
        build_config(self.fine_structure_alpha, self.temperature, &o)
    }

    pub fn overrides(&self) -> Overrides {
        Overrides {
            electron_rest_energy: Some(self.electron_rest_energy),
            uv_cutoff_omega: Some(self.uv_cutoff_omega),
            preparation_time: Some(self.preparation_time_tau_p),
            speed_of_light: Some(self.speed_of_light),
            planck_hbar: Some(self.planck_hbar),
            boltzmann_k: Some(self.boltzmann_k),
        }
    }

    /// m c²/ħ (s⁻¹), the bare mass in natural units.
    pub fn rest_frequency(&self) -> f64 {
        self.electron_rest_energy / self.planck_hbar
    }

    /// m_R in natural units (s⁻¹).
    pub fn renormalized_mass(&self) -> f64 {
        mass_renormalization(self).renormalized_mass
    }

    /// m_R in kilograms.
    pub fn renormalized_mass_kg(&self) -> f64 {
        self.renormalized_mass() * self.planck_hbar / (self.speed_of_light * self.speed_of_light)
    }

    /// β = ħ/(k_B T) (s); `None` at T = 0.
    pub fn beta(&self) -> Option<f64> {
        (self.temperature > 0.0)
            .then(|| self.planck_hbar / (self.boltzmann_k * self.temperature))
    }

    /// Metres to light-seconds.
    pub fn length_to_natural(&self, metres: f64) -> f64 {
        metres / self.speed_of_light
    }

    /// Light-seconds to metres.
    pub fn length_from_natural(&self, light_seconds: f64) -> f64 {
        light_seconds * self.speed_of_light
    }

    /// Wavenumber (1/m) to natural units (1/light-second).
    pub fn wavenumber_to_natural(&self, per_metre: f64) -> f64 {
        per_metre * self.speed_of_light
    }

    pub fn wavenumber_from_natural(&self, per_light_second: f64) -> f64 {
        per_light_second / self.speed_of_light
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn default_scales() {
        let cfg = PhysicalConfig::default();
        assert!(rel(cfg.compton_wavelength, 3.8e-13) < 0.03);
        assert!(rel(cfg.uv_cutoff_omega, 0.78e21) < 0.01);
        assert!(rel(cfg.radiation_time, 0.6e-23) < 0.05);
        assert!(rel(cfg.classical_electron_radius, 2.8e-15) < 0.01);
        assert!(cfg.thermal_correlation_time.is_none());
        assert!(cfg.thermal_wavelength.is_none());
        assert!(cfg.low_temperature_valid);
    }

    #[test]
    fn derived_relations_hold() {
        let cfg = build_config(ALPHA, 3.5, &Overrides::default()).unwrap();
        let c = cfg.speed_of_light;
        assert!(rel(cfg.compton_wavelength, HBAR * c / cfg.electron_rest_energy) < 1e-12);
        assert!(rel(cfg.classical_electron_radius, ALPHA * cfg.compton_wavelength) < 1e-12);
        assert!(rel(cfg.radiation_time, 2.0 / 3.0 * cfg.classical_electron_radius / c) < 1e-12);
        assert!(rel(cfg.thermal_correlation_time.unwrap(), HBAR / (PI * KB * 3.5)) < 1e-12);
        assert!(rel(cfg.squared_charge, 4.0 * PI * ALPHA) < 1e-12);
        // ħΩ = m c² with the default cutoff
        assert!(rel(HBAR * cfg.uv_cutoff_omega, cfg.electron_rest_energy) < 1e-12);
        // τ₀ = e²/(6π m) with the bare rest frequency
        assert!(rel(cfg.radiation_time, cfg.squared_charge / (6.0 * PI * cfg.rest_frequency())) < 1e-12);
    }

    #[test]
    fn thermal_time_at_one_kelvin() {
        let cfg = build_config(ALPHA, 1.0, &Overrides::default()).unwrap();
        assert!(rel(cfg.thermal_correlation_time.unwrap(), 2.4e-12) < 0.02);
    }

    #[test]
    fn thermal_time_times_temperature_is_constant() {
        let base = build_config(ALPHA, 1.0, &Overrides::default()).unwrap();
        let k = base.thermal_correlation_time.unwrap();
        for t in [1e-6, 0.01, 3.0, 300.0, 1e6] {
            let cfg = base.with_temperature(t).unwrap();
            assert!(rel(cfg.thermal_correlation_time.unwrap() * t, k) < 1e-12);
        }
    }

    #[test]
    fn low_temperature_flag() {
        let cold = build_config(ALPHA, 300.0, &Overrides::default()).unwrap();
        assert!(cold.low_temperature_valid);
        assert!(cold.thermal_wavelength.unwrap() > cold.compton_wavelength);
        let hot = build_config(ALPHA, 1e10, &Overrides::default()).unwrap();
        assert!(!hot.low_temperature_valid);
    }

    #[test]
    fn rejects_bad_inputs() {
        let err = build_config(ALPHA, -1.0, &Overrides::default()).unwrap_err();
        assert!(err.to_string().contains("temperature"));
        let err = build_config(0.0, 1.0, &Overrides::default()).unwrap_err();
        assert!(err.to_string().contains("alpha"));
        let o = Overrides {
            uv_cutoff_omega: Some(0.0),
            ..Default::default()
        };
        let err = build_config(ALPHA, 1.0, &o).unwrap_err();
        assert!(err.to_string().contains("uv_cutoff_omega"));
        assert!(build_config(f64::NAN, 1.0, &Overrides::default()).is_err());
    }

    #[test]
    fn mass_shift() {
        let cfg = PhysicalConfig::default();
        let m = mass_renormalization(&cfg);
        assert!(rel(m.delta_m_over_m, 4.0 * ALPHA / (3.0 * PI)) < 1e-12);
        assert!((m.delta_m_over_m - 0.0031).abs() < 5e-5);

        let doubled = cfg.with_cutoff(2.0 * cfg.uv_cutoff_omega, 1e-21).unwrap();
        let m2 = mass_renormalization(&doubled);
        assert!(rel(m2.delta_m_over_m, 2.0 * m.delta_m_over_m) < 1e-12);
    }

    #[test]
    fn vanishing_cutoff_has_no_mass_shift() {
        assert_eq!(electromagnetic_mass(4.0 * PI * ALPHA, 0.0), 0.0);
    }

    #[test]
    fn length_round_trip() {
        let cfg = PhysicalConfig::default();
        for x in [1e-15, 3.7e-9, 1.0, 2.2e7, 9.9e25] {
            let back = cfg.length_from_natural(cfg.length_to_natural(x));
            assert!(rel(back, x) < 1e-14);
            let k = cfg.wavenumber_from_natural(cfg.wavenumber_to_natural(x));
            assert!(rel(k, x) < 1e-14);
        }
    }
}
