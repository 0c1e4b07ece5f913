//! Physical constants and unit conversions (CODATA 2018).
//!
//! Energies are frequencies E/h in GHz unless a name says otherwise, lengths
//! entering matrix elements are bohr, and C6 is reported in GHz·μm⁶.

use std::f64::consts::PI;

/// Hartree energy in GHz.
pub const HARTREE_GHZ: f64 = 6.579_683_920_502e6;

/// Rydberg energy (infinite nuclear mass) in GHz.
pub const RYDBERG_GHZ: f64 = HARTREE_GHZ / 2.0;

pub const FINE_STRUCTURE: f64 = 7.297_352_569_3e-3;

/// Bohr radius in μm.
pub const BOHR_UM: f64 = 5.291_772_109_03e-5;

pub const MHZ_PER_GHZ: f64 = 1.0e3;

pub const TWO_PI: f64 = 2.0 * PI;

/// One atomic unit of C6 (E_h a0⁶) in GHz·μm⁶.
pub fn c6_atomic_unit() -> f64 {
    HARTREE_GHZ * BOHR_UM.powi(6)
}

/// Cyclic frequency in MHz (ν = ω/2π) to angular frequency in rad/μs.
pub fn mhz_to_angular(nu_mhz: f64) -> f64 {
    TWO_PI * nu_mhz
}

pub fn angular_to_mhz(omega: f64) -> f64 {
    omega / TWO_PI
}
