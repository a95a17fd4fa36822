//! Shared fixtures for the benchmarks under `benches/`.

use respkit_core::response::Oscillator;
use respkit_core::spectra::TimeGrid;
use respkit_core::SpectralDensity;

pub fn reference_oscillator() -> Oscillator {
    Oscillator::new(1650.0, 16.0, 1.0, 300.0).expect("valid oscillator")
}

/// The four reference baths, all with a reorganization energy of 2 cm⁻¹.
pub fn reference_baths() -> [SpectralDensity; 4] {
    [
        SpectralDensity::drude_lorentz(2.0, 10.0).expect("valid bath"),
        SpectralDensity::power_exp_cutoff(1, 0.2, 10.0).expect("valid bath"),
        SpectralDensity::power_exp_cutoff(2, 0.4, 10.0).expect("valid bath"),
        SpectralDensity::power_exp_cutoff(3, 0.6, 10.0).expect("valid bath"),
    ]
}

pub fn grid(n: usize) -> TimeGrid {
    TimeGrid::new(0.02, n, 1650.0).expect("valid grid")
}
