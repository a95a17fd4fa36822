//! Time-domain response functions assembled from oscillator parameters,
//! phases and decay exponents.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, ensure_finite, ensure_nonnegative_time, Error, Result};
use crate::lineshape::{
    combine_quantum, exponent_third_order, g_quantum, h_kernel, quantum_kernel_table, Delays, Ladder,
};
use crate::quadrature::Tolerance;
use crate::spectral_density::SpectralDensity;
use crate::units::{scaled_time, thermal_energy, wavenumber_to_angular, Beta};

pub use crate::lineshape::Pathway;

/// System parameters: fundamental ω₀ and anharmonicity Δ in cm⁻¹, transition
/// dipole μ and temperature in K.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillator {
    pub omega0: f64,
    pub delta: f64,
    pub mu: f64,
    pub temperature: f64,
}

impl Oscillator {
    pub fn new(omega0: f64, delta: f64, mu: f64, temperature: f64) -> Result<Self> {
        let osc = Oscillator {
            omega0,
            delta,
            mu,
            temperature,
        };
        osc.validate()?;
        let kt = thermal_energy(temperature)?;
        let ratio = delta.abs() * kt / (omega0 * omega0);
        if ratio > 0.1 {
            log::warn!("|delta|·kT/omega0² = {ratio:.3} exceeds 0.1; the first-order anharmonic expansion is doubtful");
        }
        Ok(osc)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return Err(domain(format!("omega0 must be positive, got {}", self.omega0)));
        }
        ensure_finite("delta", self.delta)?;
        if !(self.mu.is_finite() && self.mu >= 0.0) {
            return Err(domain(format!("mu must be >= 0, got {}", self.mu)));
        }
        thermal_energy(self.temperature).map(|_| ())
    }

    pub fn beta(&self) -> Beta {
        Beta::from_temperature(self.temperature).expect("validated temperature")
    }

    /// k_B·T in cm⁻¹.
    pub fn thermal_energy(&self) -> f64 {
        self.beta().thermal_energy()
    }

    fn omega0_angular(&self) -> f64 {
        wavenumber_to_angular(self.omega0)
    }

    fn delta_angular(&self) -> f64 {
        wavenumber_to_angular(self.delta)
    }
}

/// A response value with the delays it was evaluated at (ps).
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseSample<T> {
    pub times: Vec<f64>,
    pub value: T,
}

/// The oscillating prefactor sin(ω₀τ)/ω₀ + 4Δτ·k_BT·cos(ω₀τ)/ω₀² (angular units, ps).
pub fn linear_bracket(osc: &Oscillator, tau: f64) -> f64 {
    let w0 = osc.omega0_angular();
    let kt_over_w0 = osc.thermal_energy() / osc.omega0;
    (w0 * tau).sin() / w0 + 4.0 * osc.delta_angular() * tau * kt_over_w0 * (w0 * tau).cos() / w0
}

/// Classical linear response μ²·bracket·e^{−h(τ)}.
pub fn classical_linear(osc: &Oscillator, model: &SpectralDensity, tau: f64) -> Result<f64> {
    ensure_nonnegative_time("tau", tau)?;
    let h = h_kernel(model, tau, osc.beta())?;
    Ok(osc.mu * osc.mu * linear_bracket(osc, tau) * (-h).exp())
}

/// The e^{−iω₀τ} branch of the classical linear response, written in a
/// frame rotating at `frame` cm⁻¹ (phase e^{−i(ω₀−frame)τ}).
pub fn classical_linear_resonant(osc: &Oscillator, model: &SpectralDensity, tau: f64, frame: f64) -> Result<Complex64> {
    ensure_nonnegative_time("tau", tau)?;
    let h = h_kernel(model, tau, osc.beta())?;
    Ok(linear_resonant_from_exponent(osc, tau, frame, h))
}

pub(crate) fn linear_resonant_from_exponent(osc: &Oscillator, tau: f64, frame: f64, h: f64) -> Complex64 {
    let w0 = osc.omega0_angular();
    let kt_over_w0 = osc.thermal_energy() / osc.omega0;
    let amplitude = Complex64::new(2.0 * osc.delta_angular() * tau * kt_over_w0, 0.5) / w0;
    let phase = Complex64::from_polar(1.0, -wavenumber_to_angular(osc.omega0 - frame) * tau);
    osc.mu * osc.mu * amplitude * phase * (-h).exp()
}

/// Phase argument of a pathway, in units of ω₀: t1+t3 or t3−t1.
fn phase_time(pathway: Pathway, d: Delays) -> f64 {
    match pathway {
        Pathway::NonRephasing => d.t1 + d.t3,
        Pathway::Rephasing => d.t3 - d.t1,
    }
}

/// μ⁴Δ·t3/ω₀²·e^{−i(ω₀−frame)·phase_time}·e^{−exponent}.
pub fn third_order_from_exponent(
    osc: &Oscillator,
    pathway: Pathway,
    delays: Delays,
    exponent: f64,
    frame: f64,
) -> Complex64 {
    let w0 = osc.omega0_angular();
    let amplitude = osc.mu.powi(4) * osc.delta_angular() * delays.t3 / (w0 * w0);
    let phase = Complex64::from_polar(
        1.0,
        -wavenumber_to_angular(osc.omega0 - frame) * phase_time(pathway, delays),
    );
    amplitude * phase * (-exponent).exp()
}

/// Classical third-order response of one pathway, optionally with its complex conjugate added.
pub fn classical_third_order(
    osc: &Oscillator,
    model: &SpectralDensity,
    pathway: Pathway,
    delays: Delays,
    include_cc: bool,
) -> Result<Complex64> {
    let r = classical_third_order_in_frame(osc, model, pathway, delays, 0.0)?;
    Ok(if include_cc { r + r.conj() } else { r })
}

/// Classical third-order response in a frame rotating at `frame` cm⁻¹.
pub fn classical_third_order_in_frame(
    osc: &Oscillator,
    model: &SpectralDensity,
    pathway: Pathway,
    delays: Delays,
    frame: f64,
) -> Result<Complex64> {
    let d = Delays::new(delays.t1, delays.t2, delays.t3)?;
    let g = exponent_third_order(model, pathway, d, osc.beta())?;
    Ok(third_order_from_exponent(osc, pathway, d, g, frame))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BathLimit {
    /// γ → ∞: exponential decay in t1 + t3.
    FastBath,
    /// γ → 0: Gaussian decay in t1 + t3 (non-rephasing) or t3 − t1 (rephasing).
    SlowBath,
}

/// Limiting forms of the Drude–Lorentz third-order response (no complex conjugate).
pub fn dl_limit_response(
    osc: &Oscillator,
    pathway: Pathway,
    limit: BathLimit,
    lambda0: f64,
    gamma: f64,
    delays: Delays,
) -> Result<Complex64> {
    let d = Delays::new(delays.t1, delays.t2, delays.t3)?;
    if !(lambda0.is_finite() && lambda0 >= 0.0) {
        return Err(domain(format!("lambda0 must be >= 0, got {lambda0}")));
    }
    let kt = osc.thermal_energy();
    let exponent = match limit {
        BathLimit::FastBath => {
            if !(gamma.is_finite() && gamma > 0.0) {
                return Err(domain(format!("gamma must be positive, got {gamma}")));
            }
            2.0 * lambda0 * kt / gamma * scaled_time(d.t1 + d.t3)
        }
        BathLimit::SlowBath => {
            let s = scaled_time(match pathway {
                Pathway::NonRephasing => d.t1 + d.t3,
                Pathway::Rephasing => d.t3 - d.t1,
            });
            lambda0 * kt * s * s
        }
    };
    Ok(third_order_from_exponent(osc, pathway, d, exponent, 0.0))
}

fn check_hbar(hbar: f64) -> Result<()> {
    if hbar.is_finite() && hbar > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("hbar must be positive, got {hbar}")))
    }
}

/// sin(ω₀τ) + 2ħΔτ·cos(ω₀τ).
pub fn quantum_linear_bracket(osc: &Oscillator, tau: f64, hbar: f64) -> f64 {
    let w0 = osc.omega0_angular();
    (w0 * tau).sin() + 2.0 * hbar * osc.delta_angular() * tau * (w0 * tau).cos()
}

/// Quantum linear response (μ²/ω₀)·[sin(ω₀τ) + 2ħΔτ·cos(ω₀τ)]·e^{−g(τ)}.
pub fn quantum_linear(
    osc: &Oscillator,
    model: &SpectralDensity,
    tau: f64,
    hbar: f64,
    tolerance: Tolerance,
) -> Result<Complex64> {
    check_hbar(hbar)?;
    ensure_nonnegative_time("tau", tau)?;
    let g = g_quantum(model, tau, osc.beta(), hbar, tolerance)?.value;
    Ok(osc.mu * osc.mu / osc.omega0_angular() * quantum_linear_bracket(osc, tau, hbar) * (-g).exp())
}

/// Quantum third-order response of one pathway: the ground-bleach/stimulated-emission
/// term minus the excited-state-absorption term, times −i/(2ħω₀²).
pub fn quantum_third_order(
    osc: &Oscillator,
    model: &SpectralDensity,
    pathway: Pathway,
    delays: Delays,
    hbar: f64,
    tolerance: Tolerance,
) -> Result<Complex64> {
    check_hbar(hbar)?;
    let d = Delays::new(delays.t1, delays.t2, delays.t3)?;
    let table = quantum_kernel_table(model, d, osc.beta(), hbar, tolerance)?;
    let gb = combine_quantum(&table, pathway, Ladder::GroundBleachStimulatedEmission).value;
    let esa = combine_quantum(&table, pathway, Ladder::ExcitedStateAbsorption).value;
    let w0 = osc.omega0_angular();
    let dl = osc.delta_angular();
    let (lead_gb, lead_esa) = match pathway {
        Pathway::NonRephasing => (d.t3 + d.t1, d.t1 + 2.0 * d.t3),
        Pathway::Rephasing => (d.t3 - d.t1, 2.0 * d.t3 - d.t1),
    };
    let i = Complex64::i();
    let p_gb = 1.0 - 2.0 * i * hbar * dl * lead_gb;
    let p_esa = 1.0 - 2.0 * i * hbar * dl * lead_esa;
    let phase = Complex64::from_polar(1.0, -w0 * phase_time(pathway, d));
    let bracket = p_gb * (-gb).exp() - p_esa * (-esa).exp();
    Ok(-i / (2.0 * hbar * w0 * w0) * osc.mu.powi(4) * phase * bracket)
}

/// The ħ → 0 limit of [`quantum_third_order`]: the classical response plus the
/// bath term that survives from the difference of the two ladders' sine parts.
pub fn quantum_third_order_classical_limit(
    osc: &Oscillator,
    model: &SpectralDensity,
    pathway: Pathway,
    delays: Delays,
    tolerance: Tolerance,
) -> Result<Complex64> {
    let d = Delays::new(delays.t1, delays.t2, delays.t3)?;
    let beta = osc.beta();
    let classical = classical_third_order(osc, model, pathway, d, false)?;
    // Im g(s)/ħ does not depend on ħ.
    let unit = 1.0;
    let table = quantum_kernel_table(model, d, beta, unit, tolerance)?;
    let s_gb = Ladder::GroundBleachStimulatedEmission.sine_coefficients(pathway);
    let s_esa = Ladder::ExcitedStateAbsorption.sine_coefficients(pathway);
    let mut diff = 0.0;
    for k in 0..6 {
        diff += (s_gb[k] - s_esa[k]) * table[k].value.im;
    }
    let w0 = osc.omega0_angular();
    let g = exponent_third_order(model, pathway, d, beta)?;
    let phase = Complex64::from_polar(1.0, -w0 * phase_time(pathway, d));
    Ok(classical + osc.mu.powi(4) * phase * (-g).exp() * diff / (2.0 * w0 * w0))
}

/// First-order estimate of the peak shift, 4Δ·k_BT/ω₀ in cm⁻¹.
pub fn peak_shift_estimate(osc: &Oscillator) -> f64 {
    4.0 * osc.delta * osc.thermal_energy() / osc.omega0
}

/// Smallest τ > 0 at which the linear bracket changes sign, searched on (0, 2π/ω₀].
/// The bath factor is positive and cannot move the zero.
pub fn zero_crossing_time(osc: &Oscillator) -> Result<f64> {
    osc.validate()?;
    let period = 2.0 * PI / osc.omega0_angular();
    let f = |t: f64| linear_bracket(osc, t);
    let steps = 4096;
    let mut lo = period / steps as f64;
    let mut f_lo = f(lo);
    for k in 2..=steps {
        let hi = period * k as f64 / steps as f64;
        let f_hi = f(hi);
        if f_lo == 0.0 {
            return Ok(lo);
        }
        if f_lo.signum() != f_hi.signum() {
            let mut a = lo;
            let mut b = hi;
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                if f(m).signum() == f_lo.signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            return Ok(0.5 * (a + b));
        }
        lo = hi;
        f_lo = f_hi;
    }
    Err(Error::Numerical(
        "the linear bracket has no sign change within one period".into(),
    ))
}
