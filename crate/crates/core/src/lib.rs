//! Collective dynamics of a sub-wavelength chain of two-level atoms coupled
//! through the free-space electromagnetic field.
//!
//! Units: `Γ₀ = 1`, lengths in resonant wavelengths (`k₀ = 2π`).

// `!(x > 0.0)` is how parameter checks reject NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod fock_space;
pub mod lattice_green;
pub mod linalg;
pub mod modes;
pub mod radiation;
pub mod rate_model;

pub use error::{Error, Result};

pub type C64 = num_complex::Complex64;

/// Resonant wavenumber in units of `1/λ`.
pub const K0: f64 = std::f64::consts::TAU;
