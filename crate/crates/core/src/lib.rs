//! Numerical toolkit for quantum thermal machines.
//!
//! Units: ħ = k_B = 1. Energies and temperatures share one unit, times are in
//! its inverse.

pub mod battery;
pub mod cycles;
pub mod error;
pub mod floquet;
pub mod lindblad;
pub mod metrology;
pub mod numeric;
pub mod ops;
pub mod oscillator;
pub mod qcore;
pub mod sta;

pub use error::{Error, Result};
pub use qcore::{CMat, CVec, CompositeSpace, DensityMatrix, Hermitian, C64};
