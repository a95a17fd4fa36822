//! Decay exponents: the classical kernel h(τ), its three-time combinations,
//! the quantum lineshape g(τ) and long-time stability.
//!
//! Every exponent is defined so that the corresponding decay factor is e^{−value}.
//! Times are passed in ps and converted with [`scaled_time`] before they meet
//! a wavenumber.

use num_complex::Complex64;

use crate::error::{domain, ensure_nonnegative_time, Error, Result};
use crate::quadrature::{fourier_tail, Estimate, Integrator, Tolerance};
use crate::spectral_density::SpectralDensity;
use crate::units::{scaled_time, Beta};

/// Third-order signal pathway.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pathway {
    NonRephasing,
    Rephasing,
}

impl Pathway {
    pub const ALL: [Pathway; 2] = [Pathway::NonRephasing, Pathway::Rephasing];

    /// Coefficients of h at the times of [`Delays::arguments`].
    pub fn kernel_coefficients(self) -> [f64; 6] {
        match self {
            Pathway::NonRephasing => [1.0, 1.0, 1.0, -1.0, -1.0, 1.0],
            Pathway::Rephasing => [1.0, -1.0, 1.0, 1.0, 1.0, -1.0],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Pathway::NonRephasing => "nonrephasing",
            Pathway::Rephasing => "rephasing",
        }
    }
}

/// Quantum ladder contribution: ground-state bleach plus stimulated emission,
/// or excited-state absorption.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ladder {
    GroundBleachStimulatedEmission,
    ExcitedStateAbsorption,
}

/// Coherence, population and detection delays (ps).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Delays {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
}

impl Delays {
    pub fn new(t1: f64, t2: f64, t3: f64) -> Result<Self> {
        ensure_nonnegative_time("t1", t1)?;
        ensure_nonnegative_time("t2", t2)?;
        ensure_nonnegative_time("t3", t3)?;
        Ok(Delays { t1, t2, t3 })
    }

    /// [t1, t2, t3, t1+t2, t2+t3, t1+t2+t3].
    pub fn arguments(&self) -> [f64; 6] {
        let Delays { t1, t2, t3 } = *self;
        [t1, t2, t3, t1 + t2, t2 + t3, t1 + t2 + t3]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMethod {
    ClosedForm,
    Quadrature,
}

/// A kernel value with the way it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelEval<T> {
    pub value: T,
    pub method: KernelMethod,
    pub est_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityClass {
    Stable,
    DivergesLinearly,
}

/// Long-time behaviour of h: finite `h_infinity` means the anharmonic
/// growth of the response is not suppressed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityVerdict {
    pub classification: StabilityClass,
    pub h_infinity: f64,
}

// Numerically stable pieces.

#[inline]
pub(crate) fn one_minus_cos(x: f64) -> f64 {
    let s = (0.5 * x).sin();
    2.0 * s * s
}

#[inline]
pub(crate) fn x_minus_sin(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let x2 = x * x;
        x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0 * (1.0 - x2 / 110.0))))
    } else {
        x - x.sin()
    }
}

/// x·coth(x) for x ≥ 0.
#[inline]
pub(crate) fn x_coth(x: f64) -> f64 {
    if x < 1e-4 {
        1.0 + x * x / 3.0
    } else {
        x / x.tanh()
    }
}

/// coth(x) with the small-argument series.
pub fn coth(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 / x + x / 3.0
    } else {
        1.0 / x.tanh()
    }
}

// x − 1 + e^{−x}
fn dl_shape(x: f64) -> f64 {
    if x < 0.1 {
        // Σ_{k≥2} (−x)^k / k!
        let mut term = x * x / 2.0;
        let mut sum = term;
        for k in 3..=14 {
            term *= -x / f64::from(k);
            sum += term;
        }
        sum
    } else {
        x + (-x).exp_m1()
    }
}

// y·atan(y) − ln(1+y²)/2
fn ohmic_shape(y: f64) -> f64 {
    if y < 0.1 {
        let y2 = y * y;
        let mut p = y2;
        let mut sum = 0.0;
        for k in 1..=8 {
            let k2 = 2.0 * f64::from(k);
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            sum += sign * p / (k2 * (k2 - 1.0));
            p *= y2;
        }
        sum
    } else {
        y * y.atan() - 0.5 * (y * y).ln_1p()
    }
}

/// Closed-form h at scaled time `s` (cm), if the model has one.
fn h_closed_scaled(model: &SpectralDensity, s: f64, kt: f64) -> Option<f64> {
    match *model {
        SpectralDensity::DrudeLorentz { lambda0, gamma } => {
            Some(2.0 * lambda0 * kt / (gamma * gamma) * dl_shape(gamma * s))
        }
        SpectralDensity::PowerExpCutoff {
            order,
            amplitude,
            cutoff,
        } => {
            let y = cutoff * s;
            match order {
                1 => Some(2.0 * amplitude * kt / cutoff * ohmic_shape(y)),
                2 => Some(amplitude * kt / (2.0 * cutoff) * (y * y).ln_1p()),
                3 => Some(amplitude * kt / (3.0 * cutoff) * y * y / (1.0 + y * y)),
                _ => None,
            }
        }
    }
}

/// Whether [`h_kernel`] uses a closed form for this model.
pub fn has_closed_form(model: &SpectralDensity) -> bool {
    h_closed_scaled(model, 1.0, 1.0).is_some()
}

const SPLIT: f64 = 1000.0;

#[derive(Clone, Copy)]
enum Trig {
    Cos,
    Sin,
}

/// ∫₀^∞ of an integrand that equals `tail_plain(Ω) + w(Ω)·Σ c·trig(Ω·s)`
/// beyond the split point and is evaluated as `near(Ω)` before it.
/// Times `s` are scaled (cm).
fn split_integral(
    model: &SpectralDensity,
    q: &Integrator,
    near: &dyn Fn(f64) -> f64,
    tail_plain: &dyn Fn(f64) -> f64,
    w: &dyn Fn(f64) -> f64,
    terms: &[(f64, f64, Trig)],
) -> Result<Estimate> {
    let s_max = terms.iter().map(|t| t.1).fold(0.0, f64::max);
    if s_max <= 0.0 {
        return Err(domain("at least one positive time is required"));
    }
    let split = SPLIT / s_max;
    let top = model.hard_cutoff();
    let near_end = top.map_or(split, |t| t.min(split));
    let head = q.integrate_breakpoints(near, &partition(model.frequency_scale(), near_end, s_max))?;
    if top.is_some_and(|t| t <= split) {
        return Ok(head);
    }
    let mut total = head;
    let plain = match top {
        Some(t) => q.integrate_breakpoints(tail_plain, &linear_partition(split, t, s_max))?,
        None => q.integrate_upper_tail(tail_plain, split)?,
    };
    total = total.combine(plain, 1.0);
    for &(coef, s, trig) in terms {
        if coef == 0.0 {
            continue;
        }
        if s == 0.0 {
            if let Trig::Cos = trig {
                let e = match top {
                    Some(t) => q.integrate(w, split, t)?,
                    None => q.integrate_upper_tail(w, split)?,
                };
                total = total.combine(e, coef);
            }
            continue;
        }
        let f = |x: f64| {
            w(x) * match trig {
                Trig::Cos => (x * s).cos(),
                Trig::Sin => (x * s).sin(),
            }
        };
        let start = split.max(SPLIT / s);
        let end = top.map_or(start, |t| t.min(start));
        if end > split {
            total = total.combine(q.integrate_breakpoints(f, &linear_partition(split, end, s))?, coef);
        }
        if top.is_none_or(|t| start < t) {
            let z = fourier_tail(w, start, s);
            let v = match trig {
                Trig::Cos => z.re,
                Trig::Sin => z.im,
            };
            total = total.combine(
                Estimate {
                    value: v,
                    abs_error: 1e-9 * v.abs(),
                    evaluations: 5,
                },
                coef,
            );
        }
    }
    Ok(total)
}

fn linear_partition(a: f64, b: f64, s: f64) -> Vec<f64> {
    let period = 2.0 * std::f64::consts::PI / s;
    let chunks = (((b - a) / (4.0 * period)).ceil() as usize).clamp(1, 4000);
    (0..=chunks).map(|j| a + (b - a) * j as f64 / chunks as f64).collect()
}

fn partition(scale: f64, end: f64, s_max: f64) -> Vec<f64> {
    let mut pts = linear_partition(0.0, end, s_max);
    let mut g = scale * 2f64.powi(-40);
    while g < end {
        pts.push(g);
        g *= 2.0;
    }
    let mut g = (1.0 / s_max) * 2f64.powi(-20);
    while g < end {
        pts.push(g);
        g *= 2.0;
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    pts
}

fn check_model(model: &SpectralDensity) -> Result<()> {
    model.validate()
}

/// h(τ) by quadrature of ∫ 2Λ(Ω)(1 − cos Ωτ)/(βΩ³) dΩ.
pub fn h_kernel_quadrature(
    model: &SpectralDensity,
    tau: f64,
    beta: Beta,
    tolerance: Tolerance,
) -> Result<KernelEval<f64>> {
    ensure_nonnegative_time("tau", tau)?;
    check_model(model)?;
    let s = scaled_time(tau);
    if s == 0.0 || model.is_uncoupled() {
        return Ok(KernelEval {
            value: 0.0,
            method: KernelMethod::Quadrature,
            est_error: 0.0,
        });
    }
    let c = 2.0 / beta.value();
    let near = |x: f64| c * model.value_over_omega(x) * one_minus_cos(x * s) / (x * x);
    let w = |x: f64| c * model.value_over_omega(x) / (x * x);
    let q = Integrator::new(tolerance);
    let e = split_integral(model, &q, &near, &w, &w, &[(-1.0, s, Trig::Cos)])?;
    Ok(KernelEval {
        value: e.value.max(0.0),
        method: KernelMethod::Quadrature,
        est_error: e.abs_error,
    })
}

/// h(τ) with the way it was computed; closed forms for Drude–Lorentz and
/// orders 1–3, quadrature otherwise.
pub fn h_kernel_eval(model: &SpectralDensity, tau: f64, beta: Beta) -> Result<KernelEval<f64>> {
    ensure_nonnegative_time("tau", tau)?;
    check_model(model)?;
    match h_closed_scaled(model, scaled_time(tau), beta.thermal_energy()) {
        Some(value) => Ok(KernelEval {
            value,
            method: KernelMethod::ClosedForm,
            est_error: 0.0,
        }),
        None => h_kernel_quadrature(model, tau, beta, Tolerance::default()),
    }
}

/// h(τ), the exponent of the linear decay factor e^{−h}.
pub fn h_kernel(model: &SpectralDensity, tau: f64, beta: Beta) -> Result<f64> {
    h_kernel_eval(model, tau, beta).map(|e| e.value)
}

/// Σ cₖ·h(sₖ) over the six delay combinations.
pub fn exponent_third_order(model: &SpectralDensity, pathway: Pathway, delays: Delays, beta: Beta) -> Result<f64> {
    let d = Delays::new(delays.t1, delays.t2, delays.t3)?;
    let coefs = pathway.kernel_coefficients();
    let mut total = 0.0;
    for (c, t) in coefs.iter().zip(d.arguments()) {
        total += c * h_kernel(model, t, beta)?;
    }
    Ok(total)
}

/// h(t1)+h(t2)+h(t3)−h(t1+t2)−h(t2+t3)+h(t1+t2+t3).
pub fn exponent_nonrephasing(model: &SpectralDensity, t1: f64, t2: f64, t3: f64, beta: Beta) -> Result<f64> {
    exponent_third_order(model, Pathway::NonRephasing, Delays::new(t1, t2, t3)?, beta)
}

/// h(t1)−h(t2)+h(t3)+h(t1+t2)+h(t2+t3)−h(t1+t2+t3).
pub fn exponent_rephasing(model: &SpectralDensity, t1: f64, t2: f64, t3: f64, beta: Beta) -> Result<f64> {
    exponent_third_order(model, Pathway::Rephasing, Delays::new(t1, t2, t3)?, beta)
}

/// Third-order exponent from quadrature of the un-regrouped bracket
/// Σcₖ − Σcₖ cos(Ω sₖ), which is expanded in a series when Ω·max(s) < 1e−2.
pub fn exponent_bracket_quadrature(
    model: &SpectralDensity,
    pathway: Pathway,
    delays: Delays,
    beta: Beta,
    tolerance: Tolerance,
) -> Result<KernelEval<f64>> {
    let d = Delays::new(delays.t1, delays.t2, delays.t3)?;
    check_model(model)?;
    let coefs = pathway.kernel_coefficients();
    let s: Vec<f64> = d.arguments().iter().map(|&t| scaled_time(t)).collect();
    let s_max = s.iter().copied().fold(0.0, f64::max);
    if s_max == 0.0 || model.is_uncoupled() {
        return Ok(KernelEval {
            value: 0.0,
            method: KernelMethod::Quadrature,
            est_error: 0.0,
        });
    }
    let constant: f64 = coefs.iter().sum();
    // Moments Σ c·s^{2m} for the series branch.
    let moments: Vec<f64> = (1..=6)
        .map(|m| coefs.iter().zip(&s).map(|(c, x)| c * x.powi(2 * m)).sum())
        .collect();
    let c = 2.0 / beta.value();
    let bracket_over_sq = |x: f64| {
        if x * s_max < 1e-2 {
            let mut fact = 2.0;
            let mut xp = 1.0;
            let mut sum = 0.0;
            for (i, mom) in moments.iter().enumerate() {
                let m = i + 1;
                let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
                sum += sign * xp * mom / fact;
                xp *= x * x;
                fact *= ((2 * m + 1) * (2 * m + 2)) as f64;
            }
            sum
        } else {
            let mut b = constant;
            for (ck, sk) in coefs.iter().zip(&s) {
                b -= ck * (x * sk).cos();
            }
            b / (x * x)
        }
    };
    let near = |x: f64| c * model.value_over_omega(x) * bracket_over_sq(x);
    let w = |x: f64| c * model.value_over_omega(x) / (x * x);
    let plain = |x: f64| constant * w(x);
    let terms: Vec<(f64, f64, Trig)> = coefs.iter().zip(&s).map(|(&ck, &sk)| (-ck, sk, Trig::Cos)).collect();
    let q = Integrator::new(tolerance);
    let e = split_integral(model, &q, &near, &plain, &w, &terms)?;
    Ok(KernelEval {
        value: e.value,
        method: KernelMethod::Quadrature,
        est_error: e.abs_error,
    })
}

/// Third-order exponent of the power-law models in product form:
/// arctan sums with a logarithm of the six-factor ratio (order 1),
/// the logarithm of that ratio alone (order 2), or a sum of rational
/// terms (order 3). Drude–Lorentz uses its exponential form.
pub fn exponent_product_form(model: &SpectralDensity, pathway: Pathway, delays: Delays, beta: Beta) -> Result<f64> {
    let d = Delays::new(delays.t1, delays.t2, delays.t3)?;
    check_model(model)?;
    let kt = beta.thermal_energy();
    let coefs = pathway.kernel_coefficients();
    let s: Vec<f64> = d.arguments().iter().map(|&t| scaled_time(t)).collect();
    let ratio = |wc: f64| {
        let mut num = 1.0;
        let mut den = 1.0;
        for (c, x) in coefs.iter().zip(&s) {
            let f = 1.0 + wc * wc * x * x;
            if *c > 0.0 {
                num *= f;
            } else {
                den *= f;
            }
        }
        num / den
    };
    match *model {
        SpectralDensity::DrudeLorentz { lambda0, gamma } => {
            let mut sum = 0.0;
            for (c, x) in coefs.iter().zip(&s) {
                sum += c * (x - (1.0 - (-gamma * x).exp()) / gamma);
            }
            Ok(2.0 * lambda0 * kt / gamma * sum)
        }
        SpectralDensity::PowerExpCutoff {
            order: 1,
            amplitude,
            cutoff,
        } => {
            let a = 2.0 * amplitude * kt;
            let atan_sum: f64 = coefs.iter().zip(&s).map(|(c, x)| c * x * (cutoff * x).atan()).sum();
            Ok(a * atan_sum - a / (2.0 * cutoff) * ratio(cutoff).ln())
        }
        SpectralDensity::PowerExpCutoff {
            order: 2,
            amplitude,
            cutoff,
        } => Ok(amplitude * kt / (2.0 * cutoff) * ratio(cutoff).ln()),
        SpectralDensity::PowerExpCutoff {
            order: 3,
            amplitude,
            cutoff,
        } => {
            let c3 = cutoff.powi(3);
            let sum: f64 = coefs
                .iter()
                .zip(&s)
                .map(|(c, x)| c * c3 * x * x / (1.0 + cutoff * cutoff * x * x))
                .sum();
            Ok(amplitude * kt / (3.0 * cutoff * cutoff) * sum)
        }
        SpectralDensity::PowerExpCutoff { order, .. } => {
            Err(domain(format!("no product form for power-law order {order}")))
        }
    }
}

fn check_hbar(hbar: f64) -> Result<()> {
    if hbar.is_finite() && hbar > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("hbar must be positive, got {hbar}")))
    }
}

/// Quantum lineshape g(τ) = ∫ ħΛ/Ω² [(1−cos Ωτ)·coth(βħΩ/2) + i(sin Ωτ − Ωτ)] dΩ,
/// with decay factor e^{−g}.
pub fn g_quantum(
    model: &SpectralDensity,
    tau: f64,
    beta: Beta,
    hbar: f64,
    tolerance: Tolerance,
) -> Result<KernelEval<Complex64>> {
    ensure_nonnegative_time("tau", tau)?;
    check_hbar(hbar)?;
    check_model(model)?;
    let s = scaled_time(tau);
    if s == 0.0 || model.is_uncoupled() {
        return Ok(KernelEval {
            value: Complex64::new(0.0, 0.0),
            method: KernelMethod::Quadrature,
            est_error: 0.0,
        });
    }
    let b = beta.value();
    let q = Integrator::new(tolerance);

    // ħΩ·coth(βħΩ/2) = (2/β)·x·coth(x), x = βħΩ/2
    let thermal = |x: f64| 2.0 / b * x_coth(0.5 * b * hbar * x);
    let near_re = |x: f64| model.value_over_omega(x) * thermal(x) * one_minus_cos(x * s) / (x * x);
    let w_re = |x: f64| model.value_over_omega(x) * thermal(x) / (x * x);
    let re = split_integral(model, &q, &near_re, &w_re, &w_re, &[(-1.0, s, Trig::Cos)])?;

    let near_im = |x: f64| -hbar * model.value_over_omega(x) * x_minus_sin(x * s) / x;
    let plain_im = |x: f64| -hbar * s * model.value_over_omega(x);
    let w_im = |x: f64| hbar * model.value_over_omega(x) / x;
    let im = split_integral(model, &q, &near_im, &plain_im, &w_im, &[(1.0, s, Trig::Sin)])?;

    Ok(KernelEval {
        value: Complex64::new(re.value, im.value),
        method: KernelMethod::Quadrature,
        est_error: re.abs_error.hypot(im.abs_error),
    })
}

impl Ladder {
    /// Coefficients σₖ of Im g(sₖ); the exponent carries −i·Σσₖ Im g(sₖ).
    pub fn sine_coefficients(self, pathway: Pathway) -> [f64; 6] {
        match (pathway, self) {
            (Pathway::NonRephasing, Ladder::GroundBleachStimulatedEmission) => [-1.0, -1.0, -1.0, 1.0, 1.0, -1.0],
            (Pathway::NonRephasing, Ladder::ExcitedStateAbsorption) => [-1.0, 1.0, -3.0, -1.0, -1.0, 1.0],
            (Pathway::Rephasing, Ladder::GroundBleachStimulatedEmission) => [-1.0, -1.0, -1.0, 1.0, -1.0, 1.0],
            (Pathway::Rephasing, Ladder::ExcitedStateAbsorption) => [-1.0, -1.0, -3.0, 1.0, -1.0, 1.0],
        }
    }
}

/// Complex exponent G of one quantum third-order term, with factor e^{−G}.
/// Re G is the coth-weighted cosine combination; Im G is the ladder-specific
/// sine and linear combination.
pub fn quantum_exponent_third_order(
    model: &SpectralDensity,
    pathway: Pathway,
    ladder: Ladder,
    delays: Delays,
    beta: Beta,
    hbar: f64,
    tolerance: Tolerance,
) -> Result<KernelEval<Complex64>> {
    let d = Delays::new(delays.t1, delays.t2, delays.t3)?;
    let g = quantum_kernel_table(model, d, beta, hbar, tolerance)?;
    Ok(combine_quantum(&g, pathway, ladder))
}

/// g at the six delay combinations, shared between pathways and ladders.
pub(crate) fn quantum_kernel_table(
    model: &SpectralDensity,
    delays: Delays,
    beta: Beta,
    hbar: f64,
    tolerance: Tolerance,
) -> Result<[KernelEval<Complex64>; 6]> {
    let args = delays.arguments();
    let mut out = [KernelEval {
        value: Complex64::new(0.0, 0.0),
        method: KernelMethod::Quadrature,
        est_error: 0.0,
    }; 6];
    for (slot, t) in out.iter_mut().zip(args) {
        *slot = g_quantum(model, t, beta, hbar, tolerance)?;
    }
    Ok(out)
}

pub(crate) fn combine_quantum(
    g: &[KernelEval<Complex64>; 6],
    pathway: Pathway,
    ladder: Ladder,
) -> KernelEval<Complex64> {
    let c = pathway.kernel_coefficients();
    let sigma = ladder.sine_coefficients(pathway);
    let mut re = 0.0;
    let mut im = 0.0;
    let mut err = 0.0;
    for k in 0..6 {
        re += c[k] * g[k].value.re;
        im -= sigma[k] * g[k].value.im;
        err += (c[k].abs() + sigma[k].abs()) * g[k].est_error;
    }
    KernelEval {
        value: Complex64::new(re, im),
        method: KernelMethod::Quadrature,
        est_error: err,
    }
}

/// Long-time classification of h. Named models use their closed-form limits;
/// other orders are decided by [`classify_stability_sampled`].
pub fn classify_stability(model: &SpectralDensity, beta: Beta) -> Result<StabilityVerdict> {
    check_model(model)?;
    let kt = beta.thermal_energy();
    if model.is_uncoupled() {
        return Ok(StabilityVerdict {
            classification: StabilityClass::DivergesLinearly,
            h_infinity: 0.0,
        });
    }
    match *model {
        SpectralDensity::DrudeLorentz { .. } | SpectralDensity::PowerExpCutoff { order: 1 | 2, .. } => {
            Ok(StabilityVerdict {
                classification: StabilityClass::Stable,
                h_infinity: f64::INFINITY,
            })
        }
        SpectralDensity::PowerExpCutoff {
            order: 3,
            amplitude,
            cutoff,
        } => Ok(StabilityVerdict {
            classification: StabilityClass::DivergesLinearly,
            h_infinity: amplitude * kt / (3.0 * cutoff),
        }),
        _ => classify_stability_sampled(model, beta),
    }
}

/// Samples h at τ = 2ᵏ·τ₀ (k = 0..20, τ₀ = 1/Ω_scale) and decides whether it
/// levels off (relative increment below 1e−6) or keeps growing.
pub fn classify_stability_sampled(model: &SpectralDensity, beta: Beta) -> Result<StabilityVerdict> {
    check_model(model)?;
    if model.is_uncoupled() {
        return Ok(StabilityVerdict {
            classification: StabilityClass::DivergesLinearly,
            h_infinity: 0.0,
        });
    }
    let tau0 = 1.0 / scaled_time(model.frequency_scale());
    let mut values = Vec::with_capacity(21);
    for k in 0..=20 {
        let tau = tau0 * 2f64.powi(k);
        values.push(h_kernel_quadrature(model, tau, beta, Tolerance::tight())?.value);
    }
    let n = values.len();
    let last = values[n - 1];
    let d_last = last - values[n - 2];
    let d_prev = values[n - 2] - values[n - 3];
    if d_last.abs() < 1e-6 * last.abs() {
        Ok(StabilityVerdict {
            classification: StabilityClass::DivergesLinearly,
            h_infinity: last,
        })
    } else if d_last >= 0.9 * d_prev && d_last > 0.0 {
        Ok(StabilityVerdict {
            classification: StabilityClass::Stable,
            h_infinity: f64::INFINITY,
        })
    } else {
        Err(Error::Inconclusive(format!(
            "h({:.3e} ps) = {last:.6e} still changes by {d_last:.3e}",
            tau0 * 2f64.powi(20)
        )))
    }
}
