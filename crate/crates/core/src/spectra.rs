//! One-sided Fourier transforms of sampled responses into absorption and
//! 2D spectra, plus scalar metrics on the results.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{domain, Error, Result};
use crate::lineshape::{h_kernel, Delays, Pathway};
use crate::response::{linear_resonant_from_exponent, third_order_from_exponent, Oscillator};
use crate::spectral_density::SpectralDensity;
use crate::units::{angular_to_wavenumber, wavenumber_to_angular};

/// Uniform time axis starting at τ = 0, in a frame rotating at `frame_shift` cm⁻¹.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub dt: f64,
    pub n: usize,
    pub frame_shift: f64,
}

impl TimeGrid {
    pub fn new(dt: f64, n: usize, frame_shift: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(domain(format!("time step must be positive, got {dt}")));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(domain(format!("sample count must be a power of two >= 16, got {n}")));
        }
        if !frame_shift.is_finite() {
            return Err(domain("frame shift must be finite"));
        }
        Ok(TimeGrid { dt, n, frame_shift })
    }

    pub fn time(&self, j: usize) -> f64 {
        self.dt * j as f64
    }

    /// Half-width of the representable band around the frame, in cm⁻¹.
    pub fn nyquist_half_width(&self) -> f64 {
        angular_to_wavenumber(PI / self.dt)
    }

    fn check(&self) -> Result<()> {
        TimeGrid::new(self.dt, self.n, self.frame_shift).map(|_| ())
    }
}

/// Closed frequency interval in absolute cm⁻¹.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyWindow {
    pub lo: f64,
    pub hi: f64,
}

impl FrequencyWindow {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(domain(format!("invalid frequency window [{lo}, {hi}]")));
        }
        Ok(FrequencyWindow { lo, hi })
    }

    pub fn around(center: f64, half_width: f64) -> Result<Self> {
        Self::new(center - half_width, center + half_width)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

/// Optional taper of the last 10 % of each time axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Apodization {
    #[default]
    None,
    CosineSquaredTail,
}

impl Apodization {
    fn factor(self, j: usize, n: usize) -> f64 {
        match self {
            Apodization::None => 1.0,
            Apodization::CosineSquaredTail => {
                let start = n - n / 10;
                if j < start {
                    1.0
                } else {
                    let x = (j - start) as f64 / (n - 1 - start).max(1) as f64;
                    (0.5 * PI * x).cos().powi(2)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformOptions {
    /// Zero-padding factor (total length = pad·n), at least 4.
    pub pad: usize,
    pub apodization: Apodization,
}

impl Default for TransformOptions {
    fn default() -> Self {
        TransformOptions {
            pad: 4,
            apodization: Apodization::None,
        }
    }
}

impl TransformOptions {
    fn check(&self) -> Result<()> {
        if self.pad < 4 || !self.pad.is_power_of_two() {
            return Err(domain(format!(
                "zero-padding factor must be a power of two >= 4, got {}",
                self.pad
            )));
        }
        Ok(())
    }
}

fn trapezoid_weight(j: usize, n: usize) -> f64 {
    if j == 0 || j + 1 == n {
        0.5
    } else {
        1.0
    }
}

/// Absolute frequency (cm⁻¹) of FFT bin m for a transform of length `len`.
fn bin_frequency(m: usize, len: usize, grid: &TimeGrid) -> f64 {
    let signed = if m < len / 2 { m as f64 } else { m as f64 - len as f64 };
    grid.frame_shift + angular_to_wavenumber(2.0 * PI * signed / (len as f64 * grid.dt))
}

/// Bin indices inside `window`, in ascending frequency order.
fn window_bins(len: usize, grid: &TimeGrid, window: FrequencyWindow) -> Result<Vec<usize>> {
    let half = grid.nyquist_half_width();
    if window.lo < grid.frame_shift - half || window.hi >= grid.frame_shift + half {
        return Err(domain(format!(
            "window [{}, {}] cm⁻¹ exceeds the Nyquist band {:.2} ± {:.2} cm⁻¹",
            window.lo, window.hi, grid.frame_shift, half
        )));
    }
    let bins: Vec<usize> = (len / 2..len)
        .chain(0..len / 2)
        .filter(|&m| window.contains(bin_frequency(m, len, grid)))
        .collect();
    if bins.is_empty() {
        return Err(domain("frequency window contains no grid points"));
    }
    Ok(bins)
}

/// A 1D spectrum on an ascending absolute frequency axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum1D {
    pub omega: Vec<f64>,
    pub intensity: Vec<f64>,
}

/// I(ω) = Im Σⱼ wⱼ e^{iωτⱼ} R(τⱼ) dt over `window`. `samples` are the
/// response in the grid's rotating frame.
pub fn absorption_spectrum(
    samples: &[Complex64],
    grid: &TimeGrid,
    options: TransformOptions,
    window: FrequencyWindow,
) -> Result<Spectrum1D> {
    grid.check()?;
    options.check()?;
    if samples.len() != grid.n {
        return Err(domain(format!("expected {} samples, got {}", grid.n, samples.len())));
    }
    let len = grid.n * options.pad;
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for (j, (slot, r)) in buf.iter_mut().zip(samples).enumerate() {
        *slot = r * (trapezoid_weight(j, grid.n) * options.apodization.factor(j, grid.n) * grid.dt);
    }
    FftPlanner::new().plan_fft_inverse(len).process(&mut buf);
    let bins = window_bins(len, grid, window)?;
    Ok(Spectrum1D {
        omega: bins.iter().map(|&m| bin_frequency(m, len, grid)).collect(),
        intensity: bins.iter().map(|&m| buf[m].im).collect(),
    })
}

/// Samples the resonant branch of the classical linear response on `grid`.
pub fn sample_linear_response(osc: &Oscillator, model: &SpectralDensity, grid: &TimeGrid) -> Result<Vec<Complex64>> {
    grid.check()?;
    let beta = osc.beta();
    (0..grid.n)
        .into_par_iter()
        .map(|j| {
            let tau = grid.time(j);
            let h = h_kernel(model, tau, beta)?;
            Ok(linear_resonant_from_exponent(osc, tau, grid.frame_shift, h))
        })
        .collect()
}

/// Peak position and full width at half maximum of a 1D spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakMetrics {
    pub position: f64,
    pub fwhm: f64,
    pub height: f64,
}

pub fn peak_metrics(spec: &Spectrum1D) -> Result<PeakMetrics> {
    let y = &spec.intensity;
    let x = &spec.omega;
    if y.len() < 3 || y.len() != x.len() {
        return Err(domain("spectrum too short for peak analysis"));
    }
    let (i, &ymax) = y
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    if ymax <= 0.0 || !ymax.is_finite() {
        return Err(domain("spectrum has no positive peak"));
    }
    if i == 0 || i + 1 == y.len() {
        return Err(domain("peak lies on the window edge"));
    }
    let (ym, y0, yp) = (y[i - 1], y[i], y[i + 1]);
    let denom = ym - 2.0 * y0 + yp;
    let shift = if denom != 0.0 { 0.5 * (ym - yp) / denom } else { 0.0 };
    let step = x[i + 1] - x[i];
    let position = x[i] + shift * step;
    let height = y0 - 0.25 * (ym - yp) * shift;
    let half = 0.5 * height;
    let crossing = |range: &mut dyn Iterator<Item = usize>, dir: isize| -> Option<f64> {
        for k in range {
            let j = (k as isize + dir) as usize;
            if y[j] < half {
                let t = (y[k] - half) / (y[k] - y[j]);
                return Some(x[k] + t * (x[j] - x[k]));
            }
        }
        None
    };
    let left = crossing(&mut (1..=i).rev(), -1);
    let right = crossing(&mut (i..y.len() - 1), 1);
    match (left, right) {
        (Some(l), Some(r)) => Ok(PeakMetrics {
            position,
            fwhm: r - l,
            height,
        }),
        _ => Err(domain("half-maximum crossings not found inside the window")),
    }
}

/// Complex third-order response on a τ₁ × τ₃ grid, row-major in τ₁.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal2D {
    pub values: Vec<Complex64>,
    pub t2: f64,
    pub grid1: TimeGrid,
    pub grid3: TimeGrid,
    pub pathway: Pathway,
}

impl Signal2D {
    pub fn new(values: Vec<Complex64>, t2: f64, grid1: TimeGrid, grid3: TimeGrid, pathway: Pathway) -> Result<Self> {
        grid1.check()?;
        grid3.check()?;
        if values.len() != grid1.n * grid3.n {
            return Err(domain(format!(
                "signal has {} values for a {}x{} grid",
                values.len(),
                grid1.n,
                grid3.n
            )));
        }
        if !(t2.is_finite() && t2 >= 0.0) {
            return Err(domain(format!("t2 must be >= 0, got {t2}")));
        }
        Ok(Signal2D {
            values,
            t2,
            grid1,
            grid3,
            pathway,
        })
    }

    pub fn at(&self, i1: usize, i3: usize) -> Complex64 {
        self.values[i1 * self.grid3.n + i3]
    }
}

/// h at m·dt and at m·dt + t2, m = 0..=len.
struct KernelTable {
    plain: Vec<f64>,
    shifted: Vec<f64>,
}

impl KernelTable {
    fn build(model: &SpectralDensity, osc: &Oscillator, dt: f64, len: usize, t2: f64) -> Result<Self> {
        let beta = osc.beta();
        let eval = |shift: f64| -> Result<Vec<f64>> {
            (0..=len)
                .into_par_iter()
                .map(|m| h_kernel(model, dt * m as f64 + shift, beta))
                .collect()
        };
        Ok(KernelTable {
            plain: eval(0.0)?,
            shifted: eval(t2)?,
        })
    }

    fn exponent(&self, pathway: Pathway, j: usize, k: usize) -> f64 {
        let (p, s) = (&self.plain, &self.shifted);
        match pathway {
            Pathway::NonRephasing => p[j] + s[0] + p[k] - s[j] - s[k] + s[j + k],
            Pathway::Rephasing => p[j] - s[0] + p[k] + s[j] + s[k] - s[j + k],
        }
    }
}

/// Samples the classical third-order response (no complex conjugate) of one
/// pathway on a square grid in the grid's rotating frame.
pub fn sample_third_order(
    osc: &Oscillator,
    model: &SpectralDensity,
    pathway: Pathway,
    t2: f64,
    grid: &TimeGrid,
) -> Result<Signal2D> {
    grid.check()?;
    if !(t2.is_finite() && t2 >= 0.0) {
        return Err(domain(format!("t2 must be >= 0, got {t2}")));
    }
    let n = grid.n;
    let table = KernelTable::build(model, osc, grid.dt, 2 * n, t2)?;
    let values: Vec<Complex64> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (j, k) = (idx / n, idx % n);
            let d = Delays {
                t1: grid.time(j),
                t2,
                t3: grid.time(k),
            };
            third_order_from_exponent(osc, pathway, d, table.exponent(pathway, j, k), grid.frame_shift)
        })
        .collect();
    Signal2D::new(values, t2, *grid, *grid, pathway)
}

/// Complex 2D spectrum, row-major in ω₁.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrum2D {
    pub omega1: Vec<f64>,
    pub omega3: Vec<f64>,
    pub values: Vec<Complex64>,
    pub t2: f64,
    pub pathway: Pathway,
}

impl ComplexSpectrum2D {
    pub fn at(&self, i1: usize, i3: usize) -> Complex64 {
        self.values[i1 * self.omega3.len() + i3]
    }

    pub fn max_magnitude(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// The imaginary part as a real surface.
    pub fn imaginary(&self) -> Spectrum2D {
        Spectrum2D {
            omega1: self.omega1.clone(),
            omega3: self.omega3.clone(),
            values: self.values.iter().map(|z| z.im).collect(),
            t2: self.t2,
            kind: match self.pathway {
                Pathway::NonRephasing => SpectrumKind::NonRephasing,
                Pathway::Rephasing => SpectrumKind::Rephasing,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    NonRephasing,
    Rephasing,
    Correlation,
}

/// Real 2D surface, row-major in ω₁, with absolute frequency axes.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum2D {
    pub omega1: Vec<f64>,
    pub omega3: Vec<f64>,
    pub values: Vec<f64>,
    pub t2: f64,
    pub kind: SpectrumKind,
}

impl Spectrum2D {
    pub fn at(&self, i1: usize, i3: usize) -> f64 {
        self.values[i1 * self.omega3.len() + i3]
    }
}

fn column_fft(plan: &Arc<dyn Fft<f64>>, column: &mut [Complex64]) {
    let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
    plan.process_with_scratch(column, &mut scratch);
}

/// S(ω₁, ω₃) = ΣΣ wⱼwₖ e^{±iω₁τ₁} e^{iω₃τ₃} R dτ₁dτ₃ with e^{+iω₁τ₁} for the
/// non-rephasing and e^{−iω₁τ₁} for the rephasing pathway, so that both
/// resonances appear at (+ω₀, +ω₀).
pub fn spectrum_2d(
    signal: &Signal2D,
    options: TransformOptions,
    window1: FrequencyWindow,
    window3: FrequencyWindow,
) -> Result<ComplexSpectrum2D> {
    options.check()?;
    let s = Signal2D::new(
        signal.values.clone(),
        signal.t2,
        signal.grid1,
        signal.grid3,
        signal.pathway,
    )?;
    let (g1, g3) = (s.grid1, s.grid3);
    let (len1, len3) = (g1.n * options.pad, g3.n * options.pad);
    let bins1 = window_bins(len1, &g1, window1)?;
    let bins3 = window_bins(len3, &g3, window3)?;
    let mut planner = FftPlanner::new();
    let plan3 = planner.plan_fft_inverse(len3);
    let plan1 = match s.pathway {
        Pathway::NonRephasing => planner.plan_fft_inverse(len1),
        Pathway::Rephasing => planner.plan_fft_forward(len1),
    };
    let area = g1.dt * g3.dt;

    // Transform along τ₃ for each τ₁ row, keeping only windowed ω₃ bins.
    let rows: Vec<Vec<Complex64>> = (0..g1.n)
        .into_par_iter()
        .map(|j| {
            let wj = trapezoid_weight(j, g1.n) * options.apodization.factor(j, g1.n);
            let mut row = vec![Complex64::new(0.0, 0.0); len3];
            for (k, slot) in row.iter_mut().take(g3.n).enumerate() {
                let wk = trapezoid_weight(k, g3.n) * options.apodization.factor(k, g3.n);
                *slot = s.at(j, k) * (wj * wk * area);
            }
            column_fft(&plan3, &mut row);
            bins3.iter().map(|&m| row[m]).collect()
        })
        .collect();

    // Transform along τ₁ for each kept ω₃ column.
    let columns: Vec<Vec<Complex64>> = (0..bins3.len())
        .into_par_iter()
        .map(|c| {
            let mut col = vec![Complex64::new(0.0, 0.0); len1];
            for (j, row) in rows.iter().enumerate() {
                col[j] = row[c];
            }
            column_fft(&plan1, &mut col);
            bins1.iter().map(|&m| col[m]).collect()
        })
        .collect();

    let mut values = Vec::with_capacity(bins1.len() * bins3.len());
    for i1 in 0..bins1.len() {
        for col in &columns {
            values.push(col[i1]);
        }
    }
    Ok(ComplexSpectrum2D {
        omega1: bins1.iter().map(|&m| bin_frequency(m, len1, &g1)).collect(),
        omega3: bins3.iter().map(|&m| bin_frequency(m, len3, &g3)).collect(),
        values,
        t2: s.t2,
        pathway: s.pathway,
    })
}

/// Im[S_NR + S_R].
pub fn correlation_spectrum(nr: &ComplexSpectrum2D, r: &ComplexSpectrum2D) -> Result<Spectrum2D> {
    if nr.omega1 != r.omega1 || nr.omega3 != r.omega3 {
        return Err(domain("rephasing and non-rephasing axes differ"));
    }
    if nr.t2 != r.t2 {
        return Err(domain(format!("population times differ: {} vs {}", nr.t2, r.t2)));
    }
    Ok(Spectrum2D {
        omega1: nr.omega1.clone(),
        omega3: nr.omega3.clone(),
        values: nr.values.iter().zip(&r.values).map(|(a, b)| (a + b).im).collect(),
        t2: nr.t2,
        kind: SpectrumKind::Correlation,
    })
}

/// Non-rephasing and rephasing spectra of the classical response at one t2.
pub fn third_order_spectra(
    osc: &Oscillator,
    model: &SpectralDensity,
    t2: f64,
    grid: &TimeGrid,
    options: TransformOptions,
    window: FrequencyWindow,
) -> Result<(ComplexSpectrum2D, ComplexSpectrum2D)> {
    let nr = sample_third_order(osc, model, Pathway::NonRephasing, t2, grid)?;
    let r = sample_third_order(osc, model, Pathway::Rephasing, t2, grid)?;
    Ok((
        spectrum_2d(&nr, options, window, window)?,
        spectrum_2d(&r, options, window, window)?,
    ))
}

/// Which lobe a ridge or width measurement follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lobe {
    Negative,
    Positive,
}

impl Lobe {
    fn signed(self, v: f64) -> f64 {
        match self {
            Lobe::Negative => -v,
            Lobe::Positive => v,
        }
    }
}

/// Region used by [`center_line_slope`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClsWindow {
    pub omega1: FrequencyWindow,
    pub omega3: FrequencyWindow,
    pub lobe: Lobe,
}

impl ClsWindow {
    /// ω₁ within `half_width` of the lobe's extremum, ω₃ over the whole surface.
    pub fn around_extremum(spec: &Spectrum2D, lobe: Lobe, half_width: f64) -> Result<Self> {
        let m = lobe_metrics(spec, lobe)?;
        Ok(ClsWindow {
            omega1: FrequencyWindow::around(m.omega1, half_width)?,
            omega3: FrequencyWindow::new(spec.omega3[0], spec.omega3[spec.omega3.len() - 1])?,
            lobe,
        })
    }
}

/// Slope dω₃/dω₁ of the line through the lobe extremum of each ω₁ column.
pub fn center_line_slope(spec: &Spectrum2D, window: ClsWindow) -> Result<f64> {
    let n3 = spec.omega3.len();
    let cols: Vec<usize> = (0..n3).filter(|&k| window.omega3.contains(spec.omega3[k])).collect();
    let mut points = Vec::new();
    for (i1, &w1) in spec.omega1.iter().enumerate() {
        if !window.omega1.contains(w1) || cols.len() < 3 {
            continue;
        }
        let (best, _) = cols
            .iter()
            .map(|&k| (k, window.lobe.signed(spec.at(i1, k))))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty");
        if best == cols[0] || best == cols[cols.len() - 1] {
            continue;
        }
        let (ym, y0, yp) = (
            window.lobe.signed(spec.at(i1, best - 1)),
            window.lobe.signed(spec.at(i1, best)),
            window.lobe.signed(spec.at(i1, best + 1)),
        );
        if y0 <= 0.0 {
            continue;
        }
        let denom = ym - 2.0 * y0 + yp;
        let shift = if denom != 0.0 { 0.5 * (ym - yp) / denom } else { 0.0 };
        let step = spec.omega3[best + 1] - spec.omega3[best];
        points.push((w1, spec.omega3[best] + shift * step));
    }
    if points.len() < 3 {
        return Err(domain(format!(
            "only {} usable columns for the center line",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Numerical("degenerate center-line abscissae".into()));
    }
    Ok(sxy / sxx)
}

/// Position, value and half-height widths of one lobe of a 2D surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LobeMetrics {
    pub omega1: f64,
    pub omega3: f64,
    pub value: f64,
    pub width_omega1: f64,
    pub width_omega3: f64,
}

fn half_width_along(values: &[f64], axis: &[f64], peak: usize) -> f64 {
    let half = 0.5 * values[peak];
    let edge = |range: &mut dyn Iterator<Item = usize>, dir: isize| -> f64 {
        let mut last = peak;
        for k in range {
            let j = (k as isize + dir) as usize;
            if values[j] < half {
                let t = (values[k] - half) / (values[k] - values[j]);
                return axis[k] + t * (axis[j] - axis[k]);
            }
            last = j;
        }
        axis[last]
    };
    let left = edge(&mut (1..=peak).rev(), -1);
    let right = edge(&mut (peak..values.len() - 1), 1);
    right - left
}

pub fn lobe_metrics(spec: &Spectrum2D, lobe: Lobe) -> Result<LobeMetrics> {
    let (n1, n3) = (spec.omega1.len(), spec.omega3.len());
    if n1 < 3 || n3 < 3 {
        return Err(domain("surface too small for lobe analysis"));
    }
    let (idx, best) = spec
        .values
        .iter()
        .map(|&v| lobe.signed(v))
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty");
    if best <= 0.0 {
        return Err(domain("surface has no lobe of the requested sign"));
    }
    let (i1, i3) = (idx / n3, idx % n3);
    let row: Vec<f64> = (0..n3).map(|k| lobe.signed(spec.at(i1, k))).collect();
    let col: Vec<f64> = (0..n1).map(|j| lobe.signed(spec.at(j, i3))).collect();
    Ok(LobeMetrics {
        omega1: spec.omega1[i1],
        omega3: spec.omega3[i3],
        value: spec.values[idx],
        width_omega1: half_width_along(&col, &spec.omega1, i1),
        width_omega3: half_width_along(&row, &spec.omega3, i3),
    })
}

/// Default detection band: ω₀ ± 60 cm⁻¹.
pub fn default_window(osc: &Oscillator) -> FrequencyWindow {
    FrequencyWindow {
        lo: osc.omega0 - 60.0,
        hi: osc.omega0 + 60.0,
    }
}

/// Converts a wavenumber offset to a rotating-frame angular frequency (rad/ps).
pub fn frame_angular(grid: &TimeGrid, nu: f64) -> f64 {
    wavenumber_to_angular(nu - grid.frame_shift)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(0.01, 8, 0.0).is_err());
        assert!(TimeGrid::new(0.01, 100, 0.0).is_err());
        assert!(TimeGrid::new(0.0, 64, 0.0).is_err());
        assert!(TimeGrid::new(0.01, 64, 1650.0).is_ok());
    }

    #[test]
    fn lorentzian_from_damped_oscillation() {
        let w0 = 1650.0;
        let t2 = 1.0;
        let grid = TimeGrid::new(0.004, 4096, w0 - 20.0).unwrap();
        let samples: Vec<Complex64> = (0..grid.n)
            .map(|j| {
                let t = grid.time(j);
                Complex64::new(0.0, 1.0) * Complex64::from_polar((-t / t2).exp(), -frame_angular(&grid, w0) * t)
            })
            .collect();
        let window = FrequencyWindow::around(w0, 40.0).unwrap();
        let spec = absorption_spectrum(&samples, &grid, TransformOptions::default(), window).unwrap();
        let m = peak_metrics(&spec).unwrap();
        let bin = spec.omega[1] - spec.omega[0];
        assert!((m.position - w0).abs() < 0.5 * bin);
        let hwhm = angular_to_wavenumber(1.0 / t2);
        assert!((0.5 * m.fwhm / hwhm - 1.0).abs() < 0.01, "{} vs {hwhm}", 0.5 * m.fwhm);
    }

    #[test]
    fn zero_input_and_nyquist() {
        let grid = TimeGrid::new(0.02, 64, 1650.0).unwrap();
        let zeros = vec![Complex64::new(0.0, 0.0); 64];
        let w = FrequencyWindow::around(1650.0, 60.0).unwrap();
        let s = absorption_spectrum(&zeros, &grid, TransformOptions::default(), w).unwrap();
        assert!(s.intensity.iter().all(|&v| v == 0.0));
        let wide = FrequencyWindow::around(1650.0, 2000.0).unwrap();
        assert!(absorption_spectrum(&zeros, &grid, TransformOptions::default(), wide).is_err());
        let bad = TransformOptions {
            pad: 2,
            ..Default::default()
        };
        assert!(absorption_spectrum(&zeros, &grid, bad, w).is_err());
        assert!(absorption_spectrum(&zeros[..10], &grid, TransformOptions::default(), w).is_err());
    }

    fn synthetic(pathway: Pathway, grid: &TimeGrid, w0: f64, t2: f64) -> Signal2D {
        let n = grid.n;
        let w = frame_angular(grid, w0);
        let values = (0..n * n)
            .map(|idx| {
                let (t1, t3) = (grid.time(idx / n), grid.time(idx % n));
                let phase = match pathway {
                    Pathway::NonRephasing => t1 + t3,
                    Pathway::Rephasing => t3 - t1,
                };
                Complex64::from_polar((-(t1 + t3) / t2).exp(), -w * phase)
            })
            .collect();
        Signal2D::new(values, 0.0, *grid, *grid, pathway).unwrap()
    }

    #[test]
    fn both_pathways_peak_on_the_positive_diagonal() {
        let w0 = 1650.0;
        let grid = TimeGrid::new(0.02, 128, w0 - 5.0).unwrap();
        let win = FrequencyWindow::around(w0, 50.0).unwrap();
        for p in Pathway::ALL {
            let s = spectrum_2d(&synthetic(p, &grid, w0, 0.8), TransformOptions::default(), win, win).unwrap();
            let (idx, _) = s
                .values
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
                .unwrap();
            let n3 = s.omega3.len();
            let bin = s.omega1[1] - s.omega1[0];
            assert!((s.omega1[idx / n3] - w0).abs() <= bin, "{p:?}");
            assert!((s.omega3[idx % n3] - w0).abs() <= bin, "{p:?}");
            // Separable input gives a product of two 1D transforms.
            let i1 = idx / n3;
            let ratio = s.at(i1, 3) / s.at(i1, 7);
            let ratio2 = s.at(i1 + 2, 3) / s.at(i1 + 2, 7);
            assert!((ratio - ratio2).norm() < 1e-9 * ratio.norm());
        }
    }

    #[test]
    fn correlation_checks_axes() {
        let grid = TimeGrid::new(0.02, 32, 1650.0).unwrap();
        let w = FrequencyWindow::around(1650.0, 40.0).unwrap();
        let zero = Signal2D::new(
            vec![Complex64::new(0.0, 0.0); 32 * 32],
            0.0,
            grid,
            grid,
            Pathway::Rephasing,
        )
        .unwrap();
        let r = spectrum_2d(&zero, TransformOptions::default(), w, w).unwrap();
        let nr = ComplexSpectrum2D {
            pathway: Pathway::NonRephasing,
            ..r.clone()
        };
        let c = correlation_spectrum(&nr, &r).unwrap();
        assert!(c.values.iter().all(|&v| v == 0.0));
        let mut other = nr.clone();
        other.t2 = 1.0;
        assert!(correlation_spectrum(&other, &r).is_err());
        other.t2 = 0.0;
        other.omega1.pop();
        assert!(correlation_spectrum(&other, &r).is_err());
    }

    fn ridge(slope: f64) -> Spectrum2D {
        let axis: Vec<f64> = (0..81).map(|i| 1600.0 + i as f64).collect();
        let mut values = Vec::new();
        for &a in &axis {
            for &b in &axis {
                let centre = 1640.0 + slope * (a - 1640.0);
                values.push(-(-(b - centre).powi(2) / 50.0).exp() * (-(a - 1640.0).powi(2) / 400.0).exp());
            }
        }
        Spectrum2D {
            omega1: axis.clone(),
            omega3: axis,
            values,
            t2: 0.0,
            kind: SpectrumKind::Correlation,
        }
    }

    #[test]
    fn cls_on_synthetic_ridges() {
        for slope in [0.0, 0.4, 1.0] {
            let s = ridge(slope);
            let w = ClsWindow::around_extremum(&s, Lobe::Negative, 15.0).unwrap();
            let got = center_line_slope(&s, w).unwrap();
            assert!((got - slope).abs() < 1e-3, "{slope}: {got}");
        }
        let s = ridge(0.7);
        let mut scaled = s.clone();
        scaled.values.iter_mut().for_each(|v| *v *= 37.0);
        let w = ClsWindow::around_extremum(&s, Lobe::Negative, 15.0).unwrap();
        assert_eq!(
            center_line_slope(&s, w).unwrap(),
            center_line_slope(&scaled, w).unwrap()
        );
        let narrow = ClsWindow {
            omega1: FrequencyWindow::new(1639.5, 1641.5).unwrap(),
            ..w
        };
        assert!(center_line_slope(&s, narrow).is_err());
    }

    #[test]
    fn peak_metrics_on_lorentzian() {
        let omega: Vec<f64> = (0..401).map(|i| 1600.0 + 0.25 * i as f64).collect();
        let (c, g) = (1650.1, 4.0);
        let intensity = omega.iter().map(|w| g * g / ((w - c) * (w - c) + g * g)).collect();
        let m = peak_metrics(&Spectrum1D { omega, intensity }).unwrap();
        assert!((m.position - c).abs() < 0.125);
        assert!((m.fwhm / (2.0 * g) - 1.0).abs() < 0.02);
    }
}
