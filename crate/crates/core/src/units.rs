//! Internal unit system.
//!
//! Energies and frequencies are wavenumbers (cm⁻¹) with ħ = 1, times are
//! picoseconds. Phases need angular frequencies in rad/ps; that conversion
//! happens through [`wavenumber_to_angular`] and [`scaled_time`] only.

use std::f64::consts::PI;

use crate::error::{domain, Result};

/// Speed of light in cm/ps.
pub const SPEED_OF_LIGHT_CM_PER_PS: f64 = 0.029_979_245_8;

/// Boltzmann constant in cm⁻¹/K.
pub const BOLTZMANN_WAVENUMBER_PER_K: f64 = 0.695_034_800_4;

/// The fixed constants of the internal unit system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    pub hbar_internal: f64,
    pub c_cm_per_ps: f64,
    pub kb_wavenumber_per_k: f64,
}

impl UnitSystem {
    pub const STANDARD: UnitSystem = UnitSystem {
        hbar_internal: 1.0,
        c_cm_per_ps: SPEED_OF_LIGHT_CM_PER_PS,
        kb_wavenumber_per_k: BOLTZMANN_WAVENUMBER_PER_K,
    };

    /// rad/ps per cm⁻¹.
    pub fn angular_per_wavenumber(&self) -> f64 {
        2.0 * PI * self.c_cm_per_ps
    }
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self::STANDARD
    }
}

const ANGULAR_PER_WAVENUMBER: f64 = 2.0 * PI * SPEED_OF_LIGHT_CM_PER_PS;

/// cm⁻¹ to rad/ps.
pub fn wavenumber_to_angular(nu: f64) -> f64 {
    ANGULAR_PER_WAVENUMBER * nu
}

/// rad/ps to cm⁻¹.
pub fn angular_to_wavenumber(omega: f64) -> f64 {
    omega / ANGULAR_PER_WAVENUMBER
}

/// Converts a time in ps to the conjugate variable of a wavenumber, so that
/// `nu * scaled_time(t)` is a phase in radians. The result is in cm.
pub fn scaled_time(tau_ps: f64) -> f64 {
    ANGULAR_PER_WAVENUMBER * tau_ps
}

/// k_B·T in cm⁻¹.
pub fn thermal_energy(temperature_k: f64) -> Result<f64> {
    if !(temperature_k.is_finite() && temperature_k > 0.0) {
        return Err(domain(format!(
            "temperature must be positive and finite, got {temperature_k} K"
        )));
    }
    Ok(BOLTZMANN_WAVENUMBER_PER_K * temperature_k)
}

/// Inverse thermal energy 1/(k_B·T), in cm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Beta(f64);

impl Beta {
    pub fn from_temperature(temperature_k: f64) -> Result<Self> {
        Ok(Beta(1.0 / thermal_energy(temperature_k)?))
    }

    pub fn from_thermal_energy(kt: f64) -> Result<Self> {
        if !(kt.is_finite() && kt > 0.0) {
            return Err(domain(format!("thermal energy must be positive, got {kt}")));
        }
        Ok(Beta(1.0 / kt))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// k_B·T in cm⁻¹.
    pub fn thermal_energy(self) -> f64 {
        1.0 / self.0
    }
}
