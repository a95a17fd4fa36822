use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use respkit_core::lineshape::{
    exponent_bracket_quadrature, exponent_product_form, exponent_third_order, g_quantum, h_kernel, h_kernel_quadrature,
    quantum_exponent_third_order, Delays, Ladder, Pathway,
};
use respkit_core::quadrature::Tolerance;
use respkit_core::response::{
    classical_third_order, quantum_third_order, quantum_third_order_classical_limit, Oscillator,
};
use respkit_core::{Beta, SpectralDensity};

fn random_model(rng: &mut ChaCha8Rng) -> SpectralDensity {
    let scale = rng.gen_range(1.0..60.0);
    let e_r = rng.gen_range(0.2..20.0);
    match rng.gen_range(0..4) {
        0 => SpectralDensity::drude_lorentz(e_r, scale).unwrap(),
        n => SpectralDensity::power_exp_cutoff(n, f64::from(n) * e_r / scale, scale).unwrap(),
    }
}

#[test]
fn regrouped_exponents_match_bracket_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let beta = Beta::from_temperature(300.0).unwrap();
    for _ in 0..40 {
        let m = random_model(&mut rng);
        let d = Delays::new(
            rng.gen_range(0.0..3.0),
            rng.gen_range(0.0..10.0),
            rng.gen_range(0.01..3.0),
        )
        .unwrap();
        for p in Pathway::ALL {
            let regrouped = exponent_third_order(&m, p, d, beta).unwrap();
            let direct = exponent_bracket_quadrature(&m, p, d, beta, Tolerance::tight())
                .unwrap()
                .value;
            let scale = regrouped.abs().max(1e-12);
            assert!(
                (direct - regrouped).abs() <= 1e-8 * scale,
                "{m:?} {d:?} {p:?}: {direct} vs {regrouped}"
            );
        }
    }
}

#[test]
fn product_forms_at_random_delays() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let beta = Beta::from_temperature(300.0).unwrap();
    for _ in 0..100 {
        let m = random_model(&mut rng);
        let d = Delays::new(
            rng.gen_range(0.01..5.0),
            rng.gen_range(0.01..5.0),
            rng.gen_range(0.01..5.0),
        )
        .unwrap();
        for p in Pathway::ALL {
            let a = exponent_third_order(&m, p, d, beta).unwrap();
            let b = exponent_product_form(&m, p, d, beta).unwrap();
            assert!((a - b).abs() <= 1e-8 * a.abs().max(1e-10), "{m:?} {d:?} {p:?}");
        }
    }
}

#[test]
fn closed_forms_at_extreme_times() {
    let beta = Beta::from_temperature(77.0).unwrap();
    let models = [
        SpectralDensity::drude_lorentz(5.0, 0.5).unwrap(),
        SpectralDensity::drude_lorentz(5.0, 300.0).unwrap(),
        SpectralDensity::power_exp_cutoff(1, 0.7, 200.0).unwrap(),
        SpectralDensity::power_exp_cutoff(3, 0.05, 1.0).unwrap(),
    ];
    for m in models {
        for tau in [1e-5, 1e-3, 30.0, 300.0] {
            let c = h_kernel(&m, tau, beta).unwrap();
            let q = h_kernel_quadrature(&m, tau, beta, Tolerance::tight()).unwrap();
            assert!((c / q.value - 1.0).abs() < 1e-8, "{m:?} τ={tau}: {c} vs {}", q.value);
            assert!(q.est_error <= 1e-8 * q.value);
        }
    }
}

fn order(errors: &[f64]) -> f64 {
    // least-squares slope of log2(error) against halving index
    let n = errors.len() as f64;
    let xs: Vec<f64> = (0..errors.len()).map(|k| k as f64).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.log2()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    -sxy / sxx
}

#[test]
fn quantum_kernel_converges_to_classical() {
    let beta = Beta::from_temperature(300.0).unwrap();
    let m = SpectralDensity::power_exp_cutoff(1, 0.2, 10.0).unwrap();
    let tau = 0.8;
    let h = h_kernel(&m, tau, beta).unwrap();
    let mut re_err = Vec::new();
    let mut im = Vec::new();
    for k in 0..4 {
        let hbar = 0.4 / 2f64.powi(k);
        let g = g_quantum(&m, tau, beta, hbar, Tolerance::tight()).unwrap().value;
        re_err.push((g.re - h).abs());
        im.push(g.im.abs());
    }
    assert!(order(&re_err) > 1.9, "{re_err:?}");
    assert!((order(&im) - 1.0).abs() < 1e-6, "{im:?}");
}

#[test]
fn quantum_third_order_exponents_converge() {
    let beta = Beta::from_temperature(300.0).unwrap();
    let m = SpectralDensity::drude_lorentz(2.0, 10.0).unwrap();
    let d = Delays::new(0.4, 1.0, 0.7).unwrap();
    for p in Pathway::ALL {
        let classical = exponent_third_order(&m, p, d, beta).unwrap();
        for ladder in [Ladder::GroundBleachStimulatedEmission, Ladder::ExcitedStateAbsorption] {
            let errs: Vec<f64> = (0..4)
                .map(|k| {
                    let hbar = 0.4 / 2f64.powi(k);
                    let g = quantum_exponent_third_order(&m, p, ladder, d, beta, hbar, Tolerance::tight()).unwrap();
                    (g.value.re - classical).abs()
                })
                .collect();
            assert!(order(&errs) > 1.9, "{p:?} {ladder:?} {errs:?}");
        }
    }
}

#[test]
fn quantum_third_order_approaches_its_classical_limit() {
    let osc = Oscillator::new(1650.0, 16.0, 1.0, 300.0).unwrap();
    let m = SpectralDensity::power_exp_cutoff(2, 0.4, 10.0).unwrap();
    let d = Delays::new(0.3, 0.5, 0.6).unwrap();
    let tol = Tolerance::tight();
    for p in Pathway::ALL {
        let limit = quantum_third_order_classical_limit(&osc, &m, p, d, tol).unwrap();
        let errs: Vec<f64> = (0..4)
            .map(|k| (quantum_third_order(&osc, &m, p, d, 0.1 / 2f64.powi(k), tol).unwrap() - limit).norm())
            .collect();
        assert!(order(&errs) > 0.95, "{p:?} {errs:?}");
        // The limit differs from the classical response only by the bath term.
        let free = SpectralDensity::power_exp_cutoff(2, 0.0, 10.0).unwrap();
        let a = quantum_third_order_classical_limit(&osc, &free, p, d, tol).unwrap();
        let b = classical_third_order(&osc, &free, p, d, false).unwrap();
        assert!((a - b).norm() <= 1e-14 * b.norm());
    }
}

#[test]
fn quantum_third_order_vanishes_without_detection_time() {
    let osc = Oscillator::new(1650.0, 16.0, 1.0, 300.0).unwrap();
    let m = SpectralDensity::drude_lorentz(2.0, 10.0).unwrap();
    let d = Delays::new(0.0, 0.4, 0.0).unwrap();
    for p in Pathway::ALL {
        let q = quantum_third_order(&osc, &m, p, d, 0.5, Tolerance::default()).unwrap();
        assert_eq!(q, Complex64::new(0.0, 0.0));
    }
}
