//! Classical and quantum response functions of a weakly anharmonic
//! vibration coupled to a harmonic bath, with 1D absorption and 2D IR
//! spectra built on top of them.

pub mod error;
pub mod lineshape;
pub mod quadrature;
pub mod response;
pub mod spectra;
pub mod spectral_density;
pub mod units;

pub use error::{Error, Result};
pub use lineshape::{Delays, Ladder, Pathway, StabilityClass, StabilityVerdict};
pub use response::{BathLimit, Oscillator};
pub use spectra::{ComplexSpectrum2D, FrequencyWindow, Signal2D, Spectrum1D, Spectrum2D, SpectrumKind, TimeGrid};
pub use spectral_density::{calibrate_coupling, BathShape, ReorgSpec, SpectralDensity};
pub use units::Beta;
