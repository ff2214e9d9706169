use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

/// Tolerances and panelling hints for [`integrate_adaptive`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Bisections allowed on top of the initial panels.
    pub max_subdivisions: usize,
    /// Period of the integrand's oscillation in the integration variable.
    /// Initial panels are made no wider than half of it.
    pub oscillation_period_hint: Option<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-14,
            max_subdivisions: 2000,
            oscillation_period_hint: None,
        }
    }
}

impl QuadratureSpec {
    pub fn with_period(mut self, period: f64) -> Self {
        self.oscillation_period_hint = Some(period);
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    fn validate(&self) -> Result<(), QuadratureError> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.max_subdivisions >= 1) {
            return Err(QuadratureError::InvalidSpec(format!("{self:?}")));
        }
        if let Some(p) = self.oscillation_period_hint {
            if !(p > 0.0 && p.is_finite()) {
                return Err(QuadratureError::InvalidSpec(format!(
                    "oscillation period hint {p}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    /// Number of panels in the final partition.
    pub panels: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("no convergence after {subdivisions} subdivisions: best estimate {value:e} ± {error:e}")]
    NoConvergence {
        value: f64,
        error: f64,
        subdivisions: usize,
    },
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("integrand not finite at x = {x:e}")]
    NonFinite { x: f64 },
    #[error("integrand grows too fast for the e^-s weight (tail contribution {tail:e})")]
    Divergent { tail: f64 },
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
    #[error("too many initial panels ({0}); the oscillation hint is too fine for the interval")]
    TooManyPanels(usize),
}

/// Upper limit of the fixed rule in [`integrate_halfline_decaying`].
pub const HALFLINE_CUTOFF: f64 = 40.0;

const MAX_INITIAL_PANELS: usize = 50_000_000;

// 21-point Kronrod abscissae with the embedded 10-point Gauss rule
// (odd indices are the Gauss nodes).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Clone, Copy, Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    // Largest error first; ties broken by position so the bisection order
    // never depends on heap internals.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// One application of the 21-point Gauss–Kronrod rule, returning
/// `(kronrod, error)` with the QUADPACK error scaling.
fn gauss_kronrod_21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64), QuadratureError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    if !fc.is_finite() {
        return Err(QuadratureError::NonFinite { x: center });
    }

    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    let mut res_abs = kronrod.abs();

    for j in 0..10 {
        let dx = half * XGK[j];
        let (x1, x2) = (center - dx, center + dx);
        let (f1, f2) = (f(x1), f(x2));
        if !f1.is_finite() {
            return Err(QuadratureError::NonFinite { x: x1 });
        }
        if !f2.is_finite() {
            return Err(QuadratureError::NonFinite { x: x2 });
        }
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let h = half.abs();
    let value = kronrod * half;
    let res_abs = res_abs * h;
    let res_asc = res_asc * h;
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok((value, err))
}

/// Globally adaptive Gauss–Kronrod quadrature of `f` over `[a, b]`.
///
/// The interval is first cut into equal panels no wider than half the
/// oscillation period (when a hint is given); the panel with the largest
/// error estimate is then bisected until the summed error drops below
/// `max(rel_tol·|value|, abs_tol)`.
pub fn integrate_adaptive<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Integral, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    spec.validate()?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(QuadratureError::InvalidInterval { a, b });
    }

    let initial = match spec.oscillation_period_hint {
        Some(period) => {
            let n = ((b - a) / (0.5 * period)).ceil();
            if n > MAX_INITIAL_PANELS as f64 {
                return Err(QuadratureError::TooManyPanels(n as usize));
            }
            (n as usize).max(1)
        }
        None => 1,
    };

    let width = (b - a) / initial as f64;
    let mut heap = BinaryHeap::with_capacity(initial + spec.max_subdivisions + 1);
    let mut running_value = 0.0;
    let mut running_error = 0.0;
    for i in 0..initial {
        let lo = a + width * i as f64;
        let hi = if i + 1 == initial { b } else { a + width * (i + 1) as f64 };
        let (value, error) = gauss_kronrod_21(&f, lo, hi)?;
        running_value += value;
        running_error += error;
        heap.push(Panel { a: lo, b: hi, value, error });
    }

    let mut subdivisions = 0;
    loop {
        let target = spec.abs_tol.max(spec.rel_tol * running_value.abs());
        if running_error <= target {
            // Confirm on exact totals; the running sums accumulate rounding.
            let (value, error) = totals(&heap);
            running_value = value;
            running_error = error;
            if error <= spec.abs_tol.max(spec.rel_tol * value.abs()) {
                return Ok(Integral { value, error, panels: heap.len() });
            }
        }
        if subdivisions >= spec.max_subdivisions {
            let (value, error) = totals(&heap);
            return Err(QuadratureError::NoConvergence { value, error, subdivisions });
        }
        let worst = heap.pop().expect("partition is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Panel at floating-point resolution; cannot refine further.
            heap.push(worst);
            let (value, error) = totals(&heap);
            return Err(QuadratureError::NoConvergence { value, error, subdivisions });
        }
        let (v1, e1) = gauss_kronrod_21(&f, worst.a, mid)?;
        let (v2, e2) = gauss_kronrod_21(&f, mid, worst.b)?;
        running_value += v1 + v2 - worst.value;
        running_error += e1 + e2 - worst.error;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
        subdivisions += 1;
    }
}

// Sums in position order so the result is independent of heap layout.
fn totals(heap: &BinaryHeap<Panel>) -> (f64, f64) {
    let mut panels: Vec<&Panel> = heap.iter().collect();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut value = 0.0;
    let mut comp = 0.0;
    let mut error = 0.0;
    for p in panels {
        // Kahan summation; partitions can hold millions of panels.
        let y = p.value - comp;
        let t = value + y;
        comp = (t - value) - y;
        value = t;
        error += p.error;
    }
    (value, error)
}

// Panel edges for the e^-s weight: narrow where the weight is large.
const HALFLINE_EDGES: [f64; 15] = [
    0.0, 0.5, 1.0, 1.75, 2.75, 4.0, 5.5, 7.5, 10.0, 13.0, 16.5, 20.5, 25.0, 32.0, HALFLINE_CUTOFF,
];

/// `∫₀^∞ e^{−s} f(s) ds` by a fixed composite 21-point rule on `[0, 40]`.
///
/// `variation_scale` is the scale (in `s`) over which `f` changes; panels
/// wider than half of it are split further. The neglected tail is bounded
/// by `e^{−40}·sup|f|`. An integrand whose weighted values in the last
/// panel are not negligible is reported as divergent.
pub fn integrate_halfline_decaying<F>(f: F, variation_scale: f64, spec: &QuadratureSpec) -> Result<f64, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    if !(variation_scale > 0.0) {
        return Err(QuadratureError::InvalidSpec(format!(
            "variation scale {variation_scale}"
        )));
    }
    let weighted = |s: f64| (-s).exp() * f(s);
    let mut total = 0.0;
    let mut peak: f64 = 0.0;
    for w in HALFLINE_EDGES.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let pieces = ((hi - lo) / (0.5 * variation_scale)).ceil().max(1.0) as usize;
        let step = (hi - lo) / pieces as f64;
        for k in 0..pieces {
            let a = lo + step * k as f64;
            let b = if k + 1 == pieces { hi } else { a + step };
            let (v, _) = gauss_kronrod_21(&weighted, a, b)?;
            total += v;
        }
        peak = peak.max(weighted(0.5 * (lo + hi)).abs());
    }
    // The weighted integrand must have died out by the cutoff.
    let last_width = HALFLINE_CUTOFF - HALFLINE_EDGES[HALFLINE_EDGES.len() - 2];
    let tail = weighted(HALFLINE_CUTOFF).abs() * last_width;
    if !tail.is_finite() || tail > spec.rel_tol * peak.max(total.abs()) {
        return Err(QuadratureError::Divergent { tail });
    }
    Ok(total)
}
