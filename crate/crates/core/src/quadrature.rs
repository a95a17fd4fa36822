//! Globally adaptive 21-point Gauss–Kronrod quadrature with helpers for
//! semi-infinite and oscillatory tails.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};

// Published 21-point Gauss-Kronrod abscissae and weights.
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

// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], ..., XGK[9].
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Absolute/relative error target: accept when `error <= max(abs, rel·|I|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: 1e-12, rel: 1e-8 }
    }
}

impl Tolerance {
    /// Tolerance used by reference computations that check other routines.
    pub fn tight() -> Self {
        Tolerance {
            abs: 1e-300,
            rel: 1e-11,
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

/// Result of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

impl Estimate {
    pub const ZERO: Estimate = Estimate {
        value: 0.0,
        abs_error: 0.0,
        evaluations: 0,
    };

    pub fn combine(self, other: Estimate, weight: f64) -> Estimate {
        Estimate {
            value: self.value + weight * other.value,
            abs_error: self.abs_error + weight.abs() * other.abs_error,
            evaluations: self.evaluations + other.evaluations,
        }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    floor: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    let mut resabs = fc.abs() * WGK[10];
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    resabs *= half.abs();
    resasc *= half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(floor);
    }
    Segment {
        a,
        b,
        value,
        error,
        floor,
    }
}

/// Globally adaptive integrator; the interval with the largest error
/// estimate is bisected first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrator {
    pub tolerance: Tolerance,
    pub max_intervals: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator::new(Tolerance::default())
    }
}

impl Integrator {
    pub fn new(tolerance: Tolerance) -> Self {
        Integrator {
            tolerance,
            max_intervals: 20_000,
        }
    }

    /// ∫_a^b f.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<Estimate> {
        self.integrate_breakpoints(f, &[a, b])
    }

    /// ∫ f over `[points[0], points[last]]`, starting from the given partition.
    /// `points` must be sorted ascending.
    pub fn integrate_breakpoints<F: Fn(f64) -> f64>(&self, f: F, points: &[f64]) -> Result<Estimate> {
        if points.len() < 2 {
            return Err(domain("at least two integration limits are required"));
        }
        if points.iter().any(|p| !p.is_finite()) || points.windows(2).any(|w| w[1] < w[0]) {
            return Err(domain("integration limits must be finite and ascending"));
        }
        let mut heap = BinaryHeap::new();
        let mut settled_value = 0.0;
        let mut settled_error = 0.0;
        let mut evaluations = 0;
        for w in points.windows(2) {
            if w[1] > w[0] {
                heap.push(gk21(&f, w[0], w[1]));
                evaluations += 21;
            }
        }
        let mut intervals = heap.len();
        let mut total: f64 = heap.iter().map(|s| s.value).sum();
        let mut error: f64 = heap.iter().map(|s| s.error).sum();
        loop {
            if !total.is_finite() || !error.is_finite() {
                return Err(Error::Numerical(format!(
                    "non-finite integrand encountered (estimate {total})"
                )));
            }
            if error <= self.tolerance.target(total) || heap.is_empty() {
                // Re-sum exactly; the running totals drift by cancellation.
                let value = settled_value + heap.iter().map(|s| s.value).sum::<f64>();
                let abs_error = settled_error + heap.iter().map(|s| s.error).sum::<f64>();
                if abs_error <= self.tolerance.target(value) || heap.is_empty() {
                    return Ok(Estimate {
                        value,
                        abs_error,
                        evaluations,
                    });
                }
                total = value;
                error = abs_error;
            }
            if intervals >= self.max_intervals {
                return Err(Error::Quadrature {
                    estimate: total,
                    abs_error: error,
                    intervals,
                });
            }
            let worst = heap.pop().expect("non-empty heap");
            let mid = 0.5 * (worst.a + worst.b);
            // Roundoff-limited or unsplittable: keep it as is.
            if worst.error <= 2.0 * worst.floor || !(mid > worst.a && mid < worst.b) {
                settled_value += worst.value;
                settled_error += worst.error;
                continue;
            }
            let left = gk21(&f, worst.a, mid);
            let right = gk21(&f, mid, worst.b);
            total += left.value + right.value - worst.value;
            error += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
            evaluations += 42;
            intervals += 1;
        }
    }

    /// ∫_a^∞ f for a > 0, through the substitution Ω = a/u.
    pub fn integrate_upper_tail<F: Fn(f64) -> f64>(&self, f: F, a: f64) -> Result<Estimate> {
        if !(a.is_finite() && a > 0.0) {
            return Err(domain(format!("tail start must be positive, got {a}")));
        }
        let g = |u: f64| {
            if u <= 0.0 {
                0.0
            } else {
                let x = a / u;
                f(x) * a / (u * u)
            }
        };
        let breaks = [0.0, 1e-3, 1e-2, 0.1, 0.5, 1.0];
        self.integrate_breakpoints(g, &breaks)
    }
}

/// Asymptotic value of ∫_b^∞ w(Ω) e^{iΩs} dΩ from repeated integration by
/// parts, valid when b·s is large and w is smooth on the scale of b.
/// Derivatives of w are taken by central differences.
pub fn fourier_tail<F: Fn(f64) -> f64>(w: F, b: f64, s: f64) -> Complex64 {
    let h = 0.02 * b;
    let f0 = w(b);
    let (fm1, fp1, fm2, fp2) = (w(b - h), w(b + h), w(b - 2.0 * h), w(b + 2.0 * h));
    let d1 = (fp1 - fm1) / (2.0 * h);
    let d2 = (fp1 - 2.0 * f0 + fm1) / (h * h);
    let d3 = (fp2 - 2.0 * fp1 + 2.0 * fm1 - fm2) / (2.0 * h * h * h);
    let is = Complex64::new(0.0, s);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut denom = is;
    for (m, d) in [f0, d1, d2, d3].into_iter().enumerate() {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * d / denom;
        denom *= is;
    }
    -Complex64::from_polar(1.0, b * s) * sum
}
