//! Quadrature and root-finding engine shared by the physics modules.

mod cubic;
mod quadrature;

pub use cubic::{relative_residual, solve_cubic, CubicError};
pub use quadrature::{
    integrate_adaptive, integrate_halfline_decaying, Integral, QuadratureError, QuadratureSpec,
    HALFLINE_CUTOFF,
};

/// `(1 − cos x)/x²`, accurate near `x = 0`.
pub fn one_minus_cos_over_sq(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        0.5 - x2 / 24.0 + x2 * x2 / 720.0
    } else {
        let s = (0.5 * x).sin();
        2.0 * s * s / (x * x)
    }
}

/// `sin(x)/x` with the removable point at zero.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `coth(x/2)`, switching to the Laurent series `2/x + x/6` below `1e-4`.
pub fn coth_half(x: f64) -> f64 {
    if x < 1e-4 {
        2.0 / x + x / 6.0
    } else {
        1.0 / (0.5 * x).tanh()
    }
}

/// `coth(x/2) − 1 = 2/(eˣ − 1)`.
pub fn coth_half_minus_one(x: f64) -> f64 {
    if x < 1e-4 {
        2.0 / x - 1.0 + x / 6.0
    } else {
        2.0 / x.exp_m1()
    }
}

/// `ln(sinh(x)/x)` for `x ≥ 0`, stable for small and large arguments.
pub fn ln_sinhc(x: f64) -> f64 {
    let x = x.abs();
    if x < 1e-3 {
        let x2 = x * x;
        x2 / 6.0 - x2 * x2 / 180.0
    } else if x < 20.0 {
        (x.sinh() / x).ln()
    } else {
        x - std::f64::consts::LN_2 - x.ln() + (-(-2.0 * x).exp()).ln_1p()
    }
}
