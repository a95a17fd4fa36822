//! Bath spectral densities Λ(Ω), reorganization energies and calibration.

use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::quadrature::{Estimate, Integrator, Tolerance};

/// A bath spectral density. Frequencies and couplings are in cm⁻¹
/// (power-law amplitudes are dimensionless).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralDensity {
    /// 2λ₀Ωγ / (π(Ω² + γ²)).
    DrudeLorentz { lambda0: f64, gamma: f64 },
    /// (A/n!)·Ωⁿ/Ω_cⁿ⁻¹·e^{−Ω/Ω_c}.
    PowerExpCutoff { order: u32, amplitude: f64, cutoff: f64 },
}

/// Discriminant of [`SpectralDensity`] with its shape parameters, used for calibration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BathShape {
    DrudeLorentz { gamma: f64 },
    PowerExpCutoff { order: u32, cutoff: f64 },
}

/// Target reorganization energy with a bath shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReorgSpec {
    pub e_r: f64,
    pub shape: BathShape,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} must be positive and finite, got {v}")))
    }
}

fn nonnegative(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} must be non-negative and finite, got {v}")))
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

impl SpectralDensity {
    pub fn drude_lorentz(lambda0: f64, gamma: f64) -> Result<Self> {
        nonnegative("lambda0", lambda0)?;
        positive("gamma", gamma)?;
        Ok(SpectralDensity::DrudeLorentz { lambda0, gamma })
    }

    pub fn power_exp_cutoff(order: u32, amplitude: f64, cutoff: f64) -> Result<Self> {
        if order == 0 {
            return Err(domain("power-law order must be at least 1"));
        }
        nonnegative("amplitude", amplitude)?;
        positive("cutoff", cutoff)?;
        Ok(SpectralDensity::PowerExpCutoff {
            order,
            amplitude,
            cutoff,
        })
    }

    /// Re-checks the invariants (useful for values built by struct literal).
    pub fn validate(&self) -> Result<()> {
        match *self {
            SpectralDensity::DrudeLorentz { lambda0, gamma } => Self::drude_lorentz(lambda0, gamma).map(|_| ()),
            SpectralDensity::PowerExpCutoff {
                order,
                amplitude,
                cutoff,
            } => Self::power_exp_cutoff(order, amplitude, cutoff).map(|_| ()),
        }
    }

    /// γ or Ω_c.
    pub fn frequency_scale(&self) -> f64 {
        match *self {
            SpectralDensity::DrudeLorentz { gamma, .. } => gamma,
            SpectralDensity::PowerExpCutoff { cutoff, .. } => cutoff,
        }
    }

    pub fn shape(&self) -> BathShape {
        match *self {
            SpectralDensity::DrudeLorentz { gamma, .. } => BathShape::DrudeLorentz { gamma },
            SpectralDensity::PowerExpCutoff { order, cutoff, .. } => BathShape::PowerExpCutoff { order, cutoff },
        }
    }

    pub fn is_uncoupled(&self) -> bool {
        match *self {
            SpectralDensity::DrudeLorentz { lambda0, .. } => lambda0 == 0.0,
            SpectralDensity::PowerExpCutoff { amplitude, .. } => amplitude == 0.0,
        }
    }

    /// Short label such as `drude_lorentz` or `power_exp_n2`.
    pub fn label(&self) -> String {
        match *self {
            SpectralDensity::DrudeLorentz { .. } => "drude_lorentz".to_string(),
            SpectralDensity::PowerExpCutoff { order, .. } => format!("power_exp_n{order}"),
        }
    }

    /// Frequency above which Λ is negligible, if it decays exponentially.
    pub(crate) fn hard_cutoff(&self) -> Option<f64> {
        match *self {
            SpectralDensity::DrudeLorentz { .. } => None,
            SpectralDensity::PowerExpCutoff { order, cutoff, .. } => Some((60.0 + 2.0 * f64::from(order)) * cutoff),
        }
    }

    /// Λ(Ω) without domain checks.
    pub(crate) fn value(&self, omega: f64) -> f64 {
        match *self {
            SpectralDensity::DrudeLorentz { lambda0, gamma } => {
                2.0 * lambda0 * omega * gamma / (PI * (omega * omega + gamma * gamma))
            }
            SpectralDensity::PowerExpCutoff {
                order,
                amplitude,
                cutoff,
            } => {
                let x = omega / cutoff;
                amplitude / factorial(order) * cutoff * x.powi(order as i32) * (-x).exp()
            }
        }
    }

    /// Λ(Ω)/Ω, finite at Ω = 0.
    pub(crate) fn value_over_omega(&self, omega: f64) -> f64 {
        match *self {
            SpectralDensity::DrudeLorentz { lambda0, gamma } => {
                2.0 * lambda0 * gamma / (PI * (omega * omega + gamma * gamma))
            }
            SpectralDensity::PowerExpCutoff {
                order,
                amplitude,
                cutoff,
            } => {
                let x = omega / cutoff;
                amplitude / factorial(order) * x.powi(order as i32 - 1) * (-x).exp()
            }
        }
    }

    /// Λ(Ω) for Ω ≥ 0.
    pub fn eval(&self, omega: f64) -> Result<f64> {
        if !(omega.is_finite() && omega >= 0.0) {
            return Err(domain(format!("frequency must be >= 0, got {omega}")));
        }
        Ok(self.value(omega))
    }

    /// The quantum spectral density C''(Ω) = ħ·Λ(Ω) for an explicit ħ.
    pub fn quantum(&self, omega: f64, hbar: f64) -> Result<f64> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(domain(format!("hbar must be positive, got {hbar}")));
        }
        Ok(hbar * self.eval(omega)?)
    }

    /// ∫₀^∞ Λ(Ω)/Ω dΩ in closed form.
    pub fn reorganization_energy(&self) -> f64 {
        match *self {
            SpectralDensity::DrudeLorentz { lambda0, .. } => lambda0,
            SpectralDensity::PowerExpCutoff {
                order,
                amplitude,
                cutoff,
            } => amplitude * cutoff / f64::from(order),
        }
    }

    /// ∫₀^∞ Λ(Ω)/Ω dΩ by adaptive quadrature.
    pub fn reorganization_energy_quadrature(&self, tolerance: Tolerance) -> Result<Estimate> {
        let q = Integrator::new(tolerance);
        let scale = self.frequency_scale();
        let f = |w: f64| self.value_over_omega(w);
        match self.hard_cutoff() {
            Some(top) => {
                let pts: Vec<f64> = (0..=16).map(|k| top * f64::from(k) / 16.0).collect();
                q.integrate_breakpoints(f, &pts)
            }
            None => {
                let head = q.integrate_breakpoints(f, &[0.0, 0.5 * scale, scale, 4.0 * scale])?;
                let tail = q.integrate_upper_tail(f, 4.0 * scale)?;
                Ok(head.combine(tail, 1.0))
            }
        }
    }

    /// Location of the maximum of Λ.
    pub fn peak_frequency(&self) -> f64 {
        match *self {
            SpectralDensity::DrudeLorentz { gamma, .. } => gamma,
            SpectralDensity::PowerExpCutoff { order, cutoff, .. } => f64::from(order) * cutoff,
        }
    }
}

/// Builds the model of the given shape whose reorganization energy is `spec.e_r`.
///
/// The reorganization energy is linear in the coupling amplitude, so the
/// inversion is exact for every order.
pub fn calibrate_coupling(spec: ReorgSpec) -> Result<SpectralDensity> {
    positive("reorganization energy", spec.e_r)?;
    match spec.shape {
        BathShape::DrudeLorentz { gamma } => SpectralDensity::drude_lorentz(spec.e_r, gamma),
        BathShape::PowerExpCutoff { order, cutoff } => {
            positive("cutoff", cutoff)?;
            SpectralDensity::power_exp_cutoff(order, f64::from(order) * spec.e_r / cutoff, cutoff)
        }
    }
}
