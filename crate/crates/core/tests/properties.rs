use num_complex::Complex64;
use proptest::prelude::*;
use respkit_core::lineshape::{exponent_third_order, h_kernel, Delays, Pathway};
use respkit_core::response::{classical_third_order, third_order_from_exponent, Oscillator};
use respkit_core::spectra::{
    absorption_spectrum, center_line_slope, peak_metrics, sample_linear_response, spectrum_2d, ClsWindow,
    FrequencyWindow, Lobe, Signal2D, Spectrum2D, SpectrumKind, TimeGrid, TransformOptions,
};
use respkit_core::units::{angular_to_wavenumber, wavenumber_to_angular};
use respkit_core::{calibrate_coupling, BathShape, Beta, ReorgSpec, SpectralDensity};

fn model() -> impl Strategy<Value = SpectralDensity> {
    (0u32..5, 0.1f64..30.0, 0.5f64..100.0).prop_map(|(n, e_r, scale)| {
        let shape = if n == 0 {
            BathShape::DrudeLorentz { gamma: scale }
        } else {
            BathShape::PowerExpCutoff {
                order: n,
                cutoff: scale,
            }
        };
        calibrate_coupling(ReorgSpec { e_r, shape }).unwrap()
    })
}

fn oscillator() -> impl Strategy<Value = Oscillator> {
    (1000.0f64..3000.0, -20.0f64..20.0, 0.2f64..3.0, 50.0f64..400.0)
        .prop_map(|(w, d, mu, t)| Oscillator::new(w, d, mu, t).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unit_conversion_is_linear(a in -1e4f64..1e4, b in -1e4f64..1e4, k in -10.0f64..10.0) {
        let lhs = wavenumber_to_angular(k * a + b);
        let rhs = k * wavenumber_to_angular(a) + wavenumber_to_angular(b);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (lhs.abs() + rhs.abs() + 1.0));
        prop_assert!((angular_to_wavenumber(wavenumber_to_angular(a)) - a).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn spectral_density_is_nonnegative(m in model(), w in 0.0f64..5000.0) {
        prop_assert!(m.eval(w).unwrap() >= 0.0);
    }

    #[test]
    fn power_law_peaks_at_n_cutoff(n in 1u32..6, a in 0.01f64..5.0, c in 0.5f64..100.0) {
        let m = SpectralDensity::power_exp_cutoff(n, a, c).unwrap();
        let peak = f64::from(n) * c;
        prop_assert!((m.peak_frequency() - peak).abs() < 1e-12 * peak);
        let top = m.eval(peak).unwrap();
        for f in [0.9, 0.99, 1.01, 1.1] {
            prop_assert!(m.eval(f * peak).unwrap() <= top);
        }
    }

    #[test]
    fn calibration_round_trip(m in model()) {
        let e_r = m.reorganization_energy();
        let back = calibrate_coupling(ReorgSpec { e_r, shape: m.shape() }).unwrap();
        prop_assert!((back.reorganization_energy() / e_r - 1.0).abs() < 1e-13);
        let (x, y) = (back.eval(7.0).unwrap(), m.eval(7.0).unwrap());
        prop_assert!((x - y).abs() <= 1e-13 * y.max(1e-300));
    }

    #[test]
    fn h_is_nondecreasing(m in model().prop_filter("order <= 3", |m| {
        !matches!(m, SpectralDensity::PowerExpCutoff { order, .. } if *order > 3)
    }), t in 50.0f64..400.0, step in 0.001f64..0.5) {
        let beta = Beta::from_temperature(t).unwrap();
        let mut prev = 0.0;
        for k in 0..40 {
            let h = h_kernel(&m, step * f64::from(k), beta).unwrap();
            prop_assert!(h >= prev - 1e-12 * h.abs().max(1e-12), "k={} h={} prev={}", k, h, prev);
            prev = h;
        }
    }

    #[test]
    fn third_order_magnitude_factorizes(
        osc in oscillator(), m in model(),
        t1 in 0.0f64..3.0, t2 in 0.0f64..10.0, t3 in 0.0f64..3.0,
    ) {
        let d = Delays::new(t1, t2, t3).unwrap();
        for p in Pathway::ALL {
            let r = classical_third_order(&osc, &m, p, d, false).unwrap();
            let g = exponent_third_order(&m, p, d, osc.beta()).unwrap();
            let w0 = wavenumber_to_angular(osc.omega0);
            let expect = osc.mu.powi(4) * wavenumber_to_angular(osc.delta).abs() * t3 / (w0 * w0) * (-g).exp();
            prop_assert!((r.norm() - expect).abs() <= 1e-12 * expect.max(1e-300));
        }
    }

    #[test]
    fn conjugate_reverses_the_phase(
        osc in oscillator(), m in model(),
        t1 in 0.0f64..3.0, t2 in 0.0f64..10.0, t3 in 0.0f64..3.0,
    ) {
        let d = Delays::new(t1, t2, t3).unwrap();
        for p in Pathway::ALL {
            let r = classical_third_order(&osc, &m, p, d, false).unwrap();
            let g = exponent_third_order(&m, p, d, osc.beta()).unwrap();
            // A frame at 2ω₀ turns e^{−iω₀φ} into e^{+iω₀φ}.
            let flipped = third_order_from_exponent(&osc, p, d, g, 2.0 * osc.omega0);
            prop_assert!((r.conj() - flipped).norm() <= 1e-12 * r.norm().max(1e-300));
            let both = classical_third_order(&osc, &m, p, d, true).unwrap();
            prop_assert!(both.im.abs() <= 1e-12 * both.norm().max(1e-300));
        }
    }
}

fn grid() -> TimeGrid {
    TimeGrid::new(0.02, 256, 1650.0).unwrap()
}

fn noisy(seed: u64, n: usize) -> Vec<Complex64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn absorption_transform_is_linear(sa in any::<u64>(), sb in any::<u64>(), k in -5.0f64..5.0) {
        let g = grid();
        let w = FrequencyWindow::around(1650.0, 100.0).unwrap();
        let (a, b) = (noisy(sa, g.n), noisy(sb, g.n));
        let mix: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| k * x + y).collect();
        let opts = TransformOptions::default();
        let fa = absorption_spectrum(&a, &g, opts, w).unwrap();
        let fb = absorption_spectrum(&b, &g, opts, w).unwrap();
        let fm = absorption_spectrum(&mix, &g, opts, w).unwrap();
        for i in 0..fm.intensity.len() {
            let expect = k * fa.intensity[i] + fb.intensity[i];
            prop_assert!((fm.intensity[i] - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn two_dimensional_transform_is_linear(sa in any::<u64>(), sb in any::<u64>(), k in -5.0f64..5.0) {
        let g = TimeGrid::new(0.02, 16, 1650.0).unwrap();
        let w = FrequencyWindow::around(1650.0, 200.0).unwrap();
        let opts = TransformOptions::default();
        for p in Pathway::ALL {
            let (a, b) = (noisy(sa, 256), noisy(sb, 256));
            let mix: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| k * x + y).collect();
            let sig = |v: Vec<Complex64>| Signal2D::new(v, 0.0, g, g, p).unwrap();
            let fa = spectrum_2d(&sig(a), opts, w, w).unwrap();
            let fb = spectrum_2d(&sig(b), opts, w, w).unwrap();
            let fm = spectrum_2d(&sig(mix), opts, w, w).unwrap();
            for i in 0..fm.values.len() {
                prop_assert!((fm.values[i] - (k * fa.values[i] + fb.values[i])).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn cls_ignores_amplitude(k in 0.01f64..100.0, slope in 0.0f64..1.0) {
        let axis: Vec<f64> = (0..81).map(|i| 1610.0 + i as f64).collect();
        let mut values = Vec::new();
        for &w1 in &axis {
            for &w3 in &axis {
                let ridge = w3 - 1650.0 - slope * (w1 - 1650.0);
                let across = (w1 - 1650.0) / 20.0;
                values.push(-(-(ridge * ridge) / 18.0 - across * across).exp());
            }
        }
        let spec = Spectrum2D { omega1: axis.clone(), omega3: axis.clone(), values, t2: 0.0, kind: SpectrumKind::Correlation };
        let scaled = Spectrum2D { values: spec.values.iter().map(|v| k * v).collect(), ..spec.clone() };
        let win = ClsWindow::around_extremum(&spec, Lobe::Negative, 15.0).unwrap();
        let a = center_line_slope(&spec, win).unwrap();
        let b = center_line_slope(&scaled, win).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
        prop_assert!((a - slope).abs() < 0.02, "slope {} vs {}", a, slope);
    }
}

#[test]
fn zero_padding_keeps_peak() {
    let osc = Oscillator::new(1650.0, 16.0, 1.0, 300.0).unwrap();
    let m = SpectralDensity::drude_lorentz(2.0, 10.0).unwrap();
    let g = TimeGrid::new(0.01, 1024, 1650.0).unwrap();
    let samples = sample_linear_response(&osc, &m, &g).unwrap();
    let w = FrequencyWindow::around(1650.0, 60.0).unwrap();
    let base = peak_metrics(&absorption_spectrum(&samples, &g, TransformOptions::default(), w).unwrap()).unwrap();
    for pad in [8, 16] {
        let opts = TransformOptions {
            pad,
            ..TransformOptions::default()
        };
        let p = peak_metrics(&absorption_spectrum(&samples, &g, opts, w).unwrap()).unwrap();
        assert!(
            (p.position - base.position).abs() < 0.05,
            "pad {pad}: {} vs {}",
            p.position,
            base.position
        );
        assert!((p.fwhm / base.fwhm - 1.0).abs() < 0.01);
    }
}

#[test]
fn higher_power_laws_overshoot() {
    // For n >= 4 the cosine transform of the weight changes sign, so h rises
    // past its limit and relaxes back from above.
    let beta = Beta::from_temperature(300.0).unwrap();
    let m = SpectralDensity::power_exp_cutoff(4, 0.1, 10.0).unwrap();
    let near = h_kernel(&m, 1.0, beta).unwrap();
    let far = h_kernel(&m, 100.0, beta).unwrap();
    assert!(near > far, "{near} vs {far}");
}
