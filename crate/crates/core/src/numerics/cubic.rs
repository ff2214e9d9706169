use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CubicError {
    #[error("leading coefficient is zero; not a cubic")]
    Degree,
    #[error("coefficients must be finite")]
    NonFinite,
}

/// Roots of `c3·z³ + c2·z² + c1·z + c0 = 0`.
///
/// The cubic is made monic and rescaled so that its coefficients are
/// bounded by one, solved in closed form, and every root is polished by
/// Newton steps on the unscaled polynomial. Complex roots come out as an
/// exact conjugate pair. Roots are sorted by real part, then imaginary part.
pub fn solve_cubic(c3: f64, c2: f64, c1: f64, c0: f64) -> Result<[Complex64; 3], CubicError> {
    if ![c3, c2, c1, c0].iter().all(|c| c.is_finite()) {
        return Err(CubicError::NonFinite);
    }
    if c3 == 0.0 {
        return Err(CubicError::Degree);
    }
    let (a, b, c) = (c2 / c3, c1 / c3, c0 / c3);

    // z = s·y turns the monic cubic into y³ + A y² + B y + C with |A|,|B|,|C| ≤ 1.
    let s = a.abs().max(b.abs().sqrt()).max(c.abs().cbrt());
    if s == 0.0 {
        return Ok([Complex64::new(0.0, 0.0); 3]);
    }
    let (sa, sb, sc) = (a / s, b / (s * s), c / (s * s * s));

    let mut roots = scaled_roots(sa, sb, sc).map(|y| y * s);
    let coeffs = [c0, c1, c2, c3];
    for r in roots.iter_mut() {
        *r = polish(&coeffs, *r);
    }

    // Restore exact structure: one real root or three real roots.
    let complex: Vec<usize> = (0..3).filter(|&i| roots[i].im != 0.0).collect();
    if complex.len() == 2 {
        let (i, j) = (complex[0], complex[1]);
        let upper = if roots[i].im > 0.0 { roots[i] } else { roots[j] };
        roots[i] = upper;
        roots[j] = upper.conj();
    }

    roots.sort_by(|p, q| p.re.total_cmp(&q.re).then(p.im.total_cmp(&q.im)));
    Ok(roots)
}

/// Closed-form roots of the scaled monic cubic `y³ + a y² + b y + c`.
fn scaled_roots(a: f64, b: f64, c: f64) -> [Complex64; 3] {
    // Depressed cubic y = x − a/3: x³ + p x + q = 0.
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let shift = -a / 3.0;
    // (q/2)² + (p/3)³ cancels when one root dominates; the discriminant
    // written in the original coefficients does not.
    let delta = 18.0 * a * b * c - 4.0 * a * a * a * c + a * a * b * b - 4.0 * b * b * b - 27.0 * c * c;
    let disc = -delta / 108.0;

    if disc > 0.0 {
        // One real root and a complex pair. Pick the cube-root branch that
        // avoids cancellation.
        let sq = disc.sqrt();
        let u = (-q / 2.0 - sq.copysign(q)).cbrt();
        let v = if u != 0.0 { -p / (3.0 * u) } else { 0.0 };
        let real = u + v + shift;
        let re = -(u + v) / 2.0 + shift;
        let im = (u - v).abs() * 3f64.sqrt() / 2.0;
        // The real root of largest magnitude is accurate; recover the pair
        // from Vieta (sum and product) to avoid cancellation in `re`.
        let (re, im) = refine_pair(a, c, real).unwrap_or((re, im));
        [
            Complex64::new(real, 0.0),
            Complex64::new(re, im),
            Complex64::new(re, -im),
        ]
    } else {
        // Three real roots (trigonometric form).
        let m = if p < 0.0 { 2.0 * (-p / 3.0).sqrt() } else { 0.0 };
        if m == 0.0 {
            let r = (-q).cbrt() + shift;
            return [Complex64::new(r, 0.0); 3];
        }
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        let two_pi_3 = 2.0 * std::f64::consts::PI / 3.0;
        [0.0, 1.0, 2.0].map(|k| Complex64::new(m * (theta - k * two_pi_3).cos() + shift, 0.0))
    }
}

/// Complex pair from the real root `r` via `r + 2·re = −a`, `r·|z|² = −c`.
fn refine_pair(a: f64, c: f64, r: f64) -> Option<(f64, f64)> {
    if r == 0.0 {
        return None;
    }
    let re = (-a - r) / 2.0;
    let modulus_sq = -c / r;
    let im_sq = modulus_sq - re * re;
    (im_sq > 0.0).then(|| (re, im_sq.sqrt()))
}

fn eval(coeffs: &[f64; 4], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(coeffs[3], 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs[..3].iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn polish(coeffs: &[f64; 4], mut z: Complex64) -> Complex64 {
    let is_real = z.im == 0.0;
    for _ in 0..8 {
        let (p, dp) = eval(coeffs, z);
        if dp.norm() == 0.0 {
            break;
        }
        let mut next = z - p / dp;
        if is_real {
            next.im = 0.0;
        }
        let (p_next, _) = eval(coeffs, next);
        if !(p_next.norm() < p.norm()) {
            break;
        }
        z = next;
    }
    z
}

/// `|p(z)| / Σ|c_k||z|^k`, the residual relative to the size of the terms.
pub fn relative_residual(coeffs: &[f64; 4], z: Complex64) -> f64 {
    let (p, _) = eval(coeffs, z);
    let r = z.norm();
    let scale: f64 = coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c.abs() * r.powi(k as i32))
        .sum();
    if scale == 0.0 {
        0.0
    } else {
        p.norm() / scale
    }
}
