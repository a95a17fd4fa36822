//! The four pipelines. Each returns its report and rendered files without
//! touching the filesystem; [`crate::write_job`] persists them.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use respkit_core::lineshape::{
    classify_stability, exponent_bracket_quadrature, exponent_product_form, exponent_third_order, g_quantum, h_kernel,
    h_kernel_quadrature, has_closed_form, quantum_exponent_third_order,
};
use respkit_core::quadrature::Tolerance;
use respkit_core::response::{
    classical_linear_resonant, classical_third_order, dl_limit_response, linear_bracket, peak_shift_estimate,
    quantum_linear_bracket, quantum_third_order, quantum_third_order_classical_limit,
};
use respkit_core::spectra::{
    absorption_spectrum, center_line_slope, correlation_spectrum, lobe_metrics, peak_metrics, sample_linear_response,
    third_order_spectra, ClsWindow, Lobe, LobeMetrics, Spectrum2D,
};
use respkit_core::units::{scaled_time, wavenumber_to_angular};
use respkit_core::{BathLimit, Delays, Ladder, Oscillator, Pathway, SpectralDensity, StabilityClass, StabilityVerdict};

use crate::config::{JobKind, RunConfig};
use crate::error::{CliError, ConfigError};
use crate::output::{
    envelope_csv, heatmap_svg, lines_svg, normalize, number, spectrum_1d_csv, spectrum_2d_csv, Metadata, OutputFile,
};
use crate::report::{
    AbsorbResult, BathInfo, JobResults, LobeReport, RunReport, StabilityResult, SuiteResult, TwodirResult,
};

/// ω₁ half-width of the center-line window around the negative lobe.
pub const CLS_HALF_WIDTH_CM: f64 = 15.0;

#[derive(Debug, Clone, PartialEq)]
pub struct JobOutput {
    /// Report without a manifest; the writer fills it in.
    pub report: RunReport,
    pub files: Vec<OutputFile>,
}

pub fn run(cfg: &RunConfig) -> Result<JobOutput, CliError> {
    let job = cfg.job.job.ok_or_else(|| ConfigError::Missing("[job] job".into()))?;
    let cfg = cfg.clone().for_job(job)?;
    let (results, files) = match job {
        JobKind::Absorb => run_absorb(&cfg)?,
        JobKind::Twodir => run_twodir(&cfg)?,
        JobKind::Validate => run_validate(&cfg)?,
        JobKind::Stability => run_stability(&cfg)?,
    };
    Ok(JobOutput {
        report: RunReport {
            job: job.to_string(),
            config: cfg.echo(),
            results,
            files: Vec::new(),
        },
        files,
    })
}

type Outcome = Result<(JobResults, Vec<OutputFile>), CliError>;

pub fn bath_info(model: &SpectralDensity) -> BathInfo {
    let mut parameters = BTreeMap::new();
    match *model {
        SpectralDensity::DrudeLorentz { lambda0, gamma } => {
            parameters.insert("lambda0_cm".to_string(), lambda0);
            parameters.insert("gamma_cm".to_string(), gamma);
        }
        SpectralDensity::PowerExpCutoff {
            order,
            amplitude,
            cutoff,
        } => {
            parameters.insert("n".to_string(), f64::from(order));
            parameters.insert("a_n".to_string(), amplitude);
            parameters.insert("omega_c_cm".to_string(), cutoff);
        }
    }
    BathInfo {
        label: model.label(),
        parameters,
        reorganization_energy_cm: model.reorganization_energy(),
    }
}

fn base_metadata(cfg: &RunConfig, model: &SpectralDensity) -> Metadata {
    let mut meta: Metadata = cfg
        .echo()
        .into_iter()
        .map(|(k, v)| (format!("config.{k}"), v))
        .collect();
    meta.push(("bath".into(), model.label()));
    for (k, v) in bath_info(model).parameters {
        meta.push((format!("bath.{k}"), v.to_string()));
    }
    meta
}

fn verdict_name(v: &StabilityVerdict) -> &'static str {
    match v.classification {
        StabilityClass::Stable => "stable",
        StabilityClass::DivergesLinearly => "diverges_linearly",
    }
}

/// Refuses baths whose anharmonic growth is not damped unless the user accepts truncation.
fn check_divergence(cfg: &RunConfig, baths: &[SpectralDensity], horizon_ps: f64) -> Result<(), CliError> {
    if cfg.job.allow_divergent {
        return Ok(());
    }
    for m in baths {
        let v = classify_stability(m, cfg.oscillator.beta())?;
        if v.classification == StabilityClass::DivergesLinearly {
            return Err(CliError::DivergentRefusal(format!(
                "bath {} is not stable: h(τ) levels off at {:.4} so the anharmonic factor grows linearly \
                 in time and never decays. Results would depend on the {horizon_ps} ps truncation; \
                 pass --allow-divergent to accept that.",
                m.label(),
                v.h_infinity
            )));
        }
    }
    Ok(())
}

pub fn run_absorb(cfg: &RunConfig) -> Outcome {
    let baths = cfg.baths()?;
    let grid = cfg.time_grid()?;
    check_divergence(cfg, &baths, grid.time(grid.n - 1))?;
    let window = cfg.window()?;
    let osc = &cfg.oscillator;
    let mut spectra = Vec::new();
    let mut files = Vec::new();
    let mut series = Vec::new();
    for model in &baths {
        let samples = sample_linear_response(osc, model, &grid)?;
        let spec = absorption_spectrum(&samples, &grid, cfg.transform_options(), window)?;
        let peak = peak_metrics(&spec)?;
        let (normalized, scale) = normalize(&spec.intensity);
        let name = format!("absorption_{}.csv", model.label());
        let mut meta = base_metadata(cfg, model);
        meta.push(("normalization".into(), number(scale)));
        files.push(OutputFile::new(&name, spectrum_1d_csv(&meta, &spec.omega, &normalized)));
        spectra.push(AbsorbResult {
            bath: bath_info(model),
            peak_cm: peak.position,
            peak_shift_cm: peak.position - osc.omega0,
            peak_shift_estimate_cm: peak_shift_estimate(osc),
            fwhm_cm: peak.fwhm,
            bin_width_cm: spec.omega[1] - spec.omega[0],
            normalization: scale,
            file: name,
        });
        series.push((model.label(), spec.omega.clone(), normalized));
    }
    if cfg.job.emit_svg {
        files.push(OutputFile::new(
            "absorption.svg",
            lines_svg("Absorption", "ω (cm⁻¹)", &series),
        ));
    }
    Ok((JobResults::Absorb { spectra }, files))
}

fn lobe_report(m: &LobeMetrics) -> LobeReport {
    LobeReport {
        omega1_cm: m.omega1,
        omega3_cm: m.omega3,
        width_omega1_cm: m.width_omega1,
        width_omega3_cm: m.width_omega3,
    }
}

fn t2_tag(t2: f64) -> String {
    format!("{t2}").replace('.', "p")
}

pub fn run_twodir(cfg: &RunConfig) -> Outcome {
    let baths = cfg.baths()?;
    let grid = cfg.time_grid()?;
    check_divergence(cfg, &baths, grid.time(grid.n - 1))?;
    let window = cfg.window()?;
    let osc = &cfg.oscillator;
    let mut surfaces = Vec::new();
    let mut files = Vec::new();
    for model in &baths {
        for &t2 in &cfg.job.t2_list_ps {
            let (nr, r) = third_order_spectra(osc, model, t2, &grid, cfg.transform_options(), window)?;
            let corr = correlation_spectrum(&nr, &r)?;
            let cls = center_line_slope(
                &corr,
                ClsWindow::around_extremum(&corr, Lobe::Negative, CLS_HALF_WIDTH_CM)?,
            )?;
            let negative = lobe_metrics(&corr, Lobe::Negative)?;
            let positive = lobe_metrics(&corr, Lobe::Positive)?;
            let mut names = Vec::new();
            for (kind, surface) in [
                ("nonrephasing", nr.imaginary()),
                ("rephasing", r.imaginary()),
                ("correlation", corr),
            ] {
                let stem = format!("twodir_{}_t2_{}ps_{kind}", model.label(), t2_tag(t2));
                let (values, scale) = normalize(&surface.values);
                let mut meta = base_metadata(cfg, model);
                meta.push(("t2_ps".into(), t2.to_string()));
                meta.push(("surface".into(), format!("Im {kind}")));
                meta.push(("normalization".into(), number(scale)));
                files.push(OutputFile::new(
                    format!("{stem}.csv"),
                    spectrum_2d_csv(&meta, &surface.omega1, &surface.omega3, &values),
                ));
                names.push(format!("{stem}.csv"));
                if cfg.job.emit_svg {
                    let title = format!("{} {kind}, t2 = {t2} ps", model.label());
                    files.push(OutputFile::new(
                        format!("{stem}.svg"),
                        heatmap_svg(&title, &surface.omega1, &surface.omega3, &values),
                    ));
                    names.push(format!("{stem}.svg"));
                }
            }
            surfaces.push(TwodirResult {
                bath: bath_info(model),
                t2_ps: t2,
                center_line_slope: cls,
                nonrephasing_peak_magnitude: nr.max_magnitude(),
                rephasing_peak_magnitude: r.max_magnitude(),
                negative_lobe: lobe_report(&negative),
                positive_lobe: lobe_report(&positive),
                files: names,
            });
        }
    }
    Ok((JobResults::Twodir { surfaces }, files))
}

/// Center-line slope of a correlation surface about its negative lobe.
pub fn correlation_cls(corr: &Spectrum2D) -> respkit_core::Result<f64> {
    center_line_slope(
        corr,
        ClsWindow::around_extremum(corr, Lobe::Negative, CLS_HALF_WIDTH_CM)?,
    )
}

// Validation suites.

struct Suite {
    name: &'static str,
    metric: &'static str,
    tolerance: f64,
    /// Errors must stay below the tolerance; orders must reach it.
    at_least: bool,
    cases: Vec<(String, f64)>,
}

impl Suite {
    fn errors(name: &'static str, tolerance: f64) -> Self {
        Suite {
            name,
            metric: "max_relative_error",
            tolerance,
            at_least: false,
            cases: Vec::new(),
        }
    }

    fn orders(name: &'static str, tolerance: f64) -> Self {
        Suite {
            name,
            metric: "min_convergence_order",
            tolerance,
            at_least: true,
            cases: Vec::new(),
        }
    }

    fn finish(self) -> SuiteResult {
        let ok = |v: f64| {
            if self.at_least {
                v >= self.tolerance
            } else {
                v <= self.tolerance
            }
        };
        let worst = if self.at_least {
            self.cases.iter().map(|c| c.1).fold(f64::INFINITY, f64::min)
        } else {
            self.cases.iter().map(|c| c.1).fold(0.0, f64::max)
        };
        let failures: Vec<String> = self
            .cases
            .iter()
            .filter(|c| !ok(c.1))
            .map(|(case, v)| format!("{case}: {v:.3e}"))
            .collect();
        SuiteResult {
            name: self.name.to_string(),
            cases: self.cases.len(),
            worst: if self.cases.is_empty() { f64::NAN } else { worst },
            tolerance: self.tolerance,
            metric: self.metric.to_string(),
            passed: failures.is_empty(),
            failures,
        }
    }
}

fn relative(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Least-squares slope of ln(error) against ln(ħ). `None` when the errors vanish.
pub fn fitted_order(hbars: &[f64], errors: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = hbars
        .iter()
        .zip(errors)
        .filter(|(_, e)| **e > 0.0)
        .map(|(h, e)| (h.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(sxy / sxx)
}

const KERNEL_TIMES_PS: [f64; 9] = [1e-3, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0];

fn delay_lattice() -> Vec<Delays> {
    let mut out = Vec::new();
    for t1 in [0.1, 0.7, 2.3] {
        for t2 in [0.0, 1.5, 10.0] {
            for t3 in [0.2, 1.1, 3.7] {
                out.push(Delays { t1, t2, t3 });
            }
        }
    }
    out
}

/// Largest pointwise relative deviation of the full response from a Drude-Lorentz
/// limit on a 32×32 (t1, t3) grid spanning that limit's dephasing time.
pub fn dl_limit_deviation(
    osc: &Oscillator,
    lambda0: f64,
    gamma: f64,
    limit: BathLimit,
    t2: f64,
) -> respkit_core::Result<f64> {
    let model = SpectralDensity::drude_lorentz(lambda0, gamma)?;
    let kt = osc.thermal_energy();
    let span_scaled = match limit {
        BathLimit::FastBath => gamma / (2.0 * lambda0 * kt),
        BathLimit::SlowBath => 1.0 / (lambda0 * kt).sqrt(),
    };
    let span = span_scaled / scaled_time(1.0);
    let mut worst = 0.0f64;
    for pathway in Pathway::ALL {
        for j in 0..32 {
            for k in 0..32 {
                let d = Delays::new(span * j as f64 / 31.0, t2, span * k as f64 / 31.0)?;
                let full = classical_third_order(osc, &model, pathway, d, false)?;
                let lim = dl_limit_response(osc, pathway, limit, lambda0, gamma, d)?;
                let err = if lim.norm() == 0.0 {
                    full.norm()
                } else {
                    (full - lim).norm() / lim.norm()
                };
                worst = worst.max(err);
            }
        }
    }
    Ok(worst)
}

pub fn run_validate(cfg: &RunConfig) -> Outcome {
    let baths = cfg.baths()?;
    let osc = &cfg.oscillator;
    let beta = osc.beta();
    let tight = Tolerance::tight();
    let hbars = &cfg.job.hbar_scan_list;

    let mut kernel = Suite::errors("kernel_closed_form_vs_quadrature", 1e-8);
    let mut product = Suite::errors("exponent_product_forms", 1e-8);
    let mut bracket = Suite::errors("exponent_bracket_quadrature", 1e-8);
    let mut re_order = Suite::orders("hbar_real_exponent_order", 1.9);
    let mut im_order = Suite::orders("hbar_imaginary_exponent_order", 0.9);
    let mut response_order = Suite::orders("hbar_third_order_response_order", 0.9);
    let mut prefactor = Suite::errors("linear_prefactor_at_correspondence", 1e-12);
    let mut limits = Suite::errors("drude_lorentz_bath_limits", 1e-2);

    for model in &baths {
        let label = model.label();
        if has_closed_form(model) {
            let rows: Vec<(String, f64)> = KERNEL_TIMES_PS
                .par_iter()
                .map(|&tau| -> respkit_core::Result<(String, f64)> {
                    let c = h_kernel(model, tau, beta)?;
                    let q = h_kernel_quadrature(model, tau, beta, tight)?.value;
                    Ok((format!("{label} tau={tau}"), relative(c, q)))
                })
                .collect::<respkit_core::Result<_>>()?;
            kernel.cases.extend(rows);
            for d in delay_lattice() {
                for p in Pathway::ALL {
                    let a = exponent_third_order(model, p, d, beta)?;
                    let b = exponent_product_form(model, p, d, beta)?;
                    product
                        .cases
                        .push((format!("{label} {} {d:?}", p.label()), relative(a, b)));
                }
            }
        }
        for d in [
            Delays {
                t1: 0.3,
                t2: 0.0,
                t3: 0.5,
            },
            Delays {
                t1: 1.0,
                t2: 2.0,
                t3: 1.0,
            },
            Delays {
                t1: 2.5,
                t2: 10.0,
                t3: 0.7,
            },
        ] {
            for p in Pathway::ALL {
                let a = exponent_third_order(model, p, d, beta)?;
                let b = exponent_bracket_quadrature(model, p, d, beta, tight)?.value;
                bracket
                    .cases
                    .push((format!("{label} {} {d:?}", p.label()), relative(a, b)));
            }
        }

        let record = |suite: &mut Suite, case: String, errs: &[f64]| {
            if let Some(order) = fitted_order(hbars, errs) {
                suite.cases.push((case, order));
            }
        };
        for tau in [0.5, 1.0] {
            let h = h_kernel(model, tau, beta)?;
            let g: Vec<Complex64> = hbars
                .iter()
                .map(|&hb| g_quantum(model, tau, beta, hb, tight).map(|e| e.value))
                .collect::<respkit_core::Result<_>>()?;
            record(
                &mut re_order,
                format!("{label} g tau={tau}"),
                &g.iter().map(|z| (z.re - h).abs()).collect::<Vec<_>>(),
            );
            record(
                &mut im_order,
                format!("{label} g tau={tau}"),
                &g.iter().map(|z| z.im.abs()).collect::<Vec<_>>(),
            );
        }
        let d = Delays {
            t1: 0.4,
            t2: 1.0,
            t3: 0.7,
        };
        for p in Pathway::ALL {
            let classical = exponent_third_order(model, p, d, beta)?;
            for ladder in [Ladder::GroundBleachStimulatedEmission, Ladder::ExcitedStateAbsorption] {
                let g: Vec<Complex64> = hbars
                    .iter()
                    .map(|&hb| quantum_exponent_third_order(model, p, ladder, d, beta, hb, tight).map(|e| e.value))
                    .collect::<respkit_core::Result<_>>()?;
                let case = format!("{label} {} {ladder:?}", p.label());
                record(
                    &mut re_order,
                    case.clone(),
                    &g.iter().map(|z| (z.re - classical).abs()).collect::<Vec<_>>(),
                );
                let im: Vec<f64> = g.iter().map(|z| z.im.abs()).collect();
                record(&mut im_order, case, &im);
            }
            let limit = quantum_third_order_classical_limit(osc, model, p, d, tight)?;
            let errs: Vec<f64> = hbars
                .iter()
                .map(|&hb| quantum_third_order(osc, model, p, d, hb, tight).map(|q| (q - limit).norm()))
                .collect::<respkit_core::Result<_>>()?;
            record(&mut response_order, format!("{label} {}", p.label()), &errs);
        }

        if let SpectralDensity::DrudeLorentz { lambda0, gamma } = *model {
            if lambda0 > 0.0 {
                for (limit, g) in [(BathLimit::FastBath, gamma * 1e4), (BathLimit::SlowBath, gamma * 1e-4)] {
                    for t2 in [0.0, 10.0] {
                        let dev = dl_limit_deviation(osc, lambda0, g, limit, t2)?;
                        limits.cases.push((format!("{label} {limit:?} gamma={g} t2={t2}"), dev));
                    }
                }
            }
        }
    }

    let hbar_star = 2.0 * osc.thermal_energy() / osc.omega0;
    let w0 = wavenumber_to_angular(osc.omega0);
    for k in 0..=20 {
        let tau = 0.05 * f64::from(k);
        let q = quantum_linear_bracket(osc, tau, hbar_star) / w0;
        let c = linear_bracket(osc, tau);
        let scale = (1.0 / w0).max(c.abs());
        prefactor.cases.push((format!("tau={tau}"), (q - c).abs() / scale));
    }

    let suites: Vec<SuiteResult> = [
        kernel,
        product,
        bracket,
        re_order,
        im_order,
        response_order,
        prefactor,
        limits,
    ]
    .into_iter()
    .map(Suite::finish)
    .collect();
    let passed = suites.iter().all(|s| s.passed);
    if !passed {
        let failing: Vec<&SuiteResult> = suites.iter().filter(|s| !s.passed).collect();
        let detail = serde_json::to_string_pretty(&failing).unwrap_or_default();
        return Err(CliError::ValidationFailed(detail));
    }
    let mut csv = String::from("suite,metric,cases,worst,tolerance,passed\n");
    for s in &suites {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            s.name,
            s.metric,
            s.cases,
            number(s.worst),
            number(s.tolerance),
            s.passed
        ));
    }
    Ok((
        JobResults::Validate { passed, suites },
        vec![OutputFile::new("validation.csv", csv)],
    ))
}

pub const ENVELOPE_SAMPLES: usize = 1000;

/// |R¹(τ)| and |R^NR(1 ps, 1 ps, τ)| on [0, horizon].
pub fn envelopes(
    osc: &Oscillator,
    model: &SpectralDensity,
    horizon_ps: f64,
) -> respkit_core::Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let tau: Vec<f64> = (0..=ENVELOPE_SAMPLES)
        .map(|i| horizon_ps * i as f64 / ENVELOPE_SAMPLES as f64)
        .collect();
    let rows: Vec<(f64, f64)> = tau
        .par_iter()
        .map(|&t| -> respkit_core::Result<(f64, f64)> {
            let lin = classical_linear_resonant(osc, model, t, 0.0)?.norm();
            let nr = classical_third_order(osc, model, Pathway::NonRephasing, Delays::new(1.0, 1.0, t)?, false)?.norm();
            Ok((lin, nr))
        })
        .collect::<respkit_core::Result<_>>()?;
    let (lin, nr) = rows.into_iter().unzip();
    Ok((tau, lin, nr))
}

fn peak_and_tail(values: &[f64]) -> (f64, f64) {
    let peak = values.iter().fold(0.0f64, |m, v| m.max(*v));
    let last = *values.last().unwrap_or(&0.0);
    (peak, if peak > 0.0 { last / peak } else { 0.0 })
}

pub fn run_stability(cfg: &RunConfig) -> Outcome {
    let baths = cfg.baths()?;
    let osc = &cfg.oscillator;
    let horizon = cfg.job.horizon_ps;
    let mut results = Vec::new();
    let mut files = Vec::new();
    for model in &baths {
        let verdict = classify_stability(model, osc.beta())?;
        let (tau, lin, nr) = envelopes(osc, model, horizon)?;
        let (lin_peak, lin_tail) = peak_and_tail(&lin);
        let (nr_peak, nr_tail) = peak_and_tail(&nr);
        let name = format!("stability_{}.csv", model.label());
        let mut meta = base_metadata(cfg, model);
        meta.push(("verdict".into(), verdict_name(&verdict).into()));
        meta.push(("nonrephasing_t1_t2_ps".into(), "1,1".into()));
        files.push(OutputFile::new(&name, envelope_csv(&meta, &tau, &lin, &nr)));
        results.push(StabilityResult {
            bath: bath_info(model),
            verdict: verdict_name(&verdict).into(),
            h_infinity: verdict.h_infinity.is_finite().then_some(verdict.h_infinity),
            horizon_ps: horizon,
            linear_peak: lin_peak,
            linear_final_over_peak: lin_tail,
            nonrephasing_peak: nr_peak,
            nonrephasing_final_over_peak: nr_tail,
            file: name,
        });
    }
    Ok((JobResults::Stability { baths: results }, files))
}
