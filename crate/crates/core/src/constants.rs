//! Fixed physical constants (6 significant digits) and unit helpers.

use std::f64::consts::PI;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.05457e-34;

/// Mass of a ⁸⁷Rb atom, kg.
pub const RB87_MASS: f64 = 1.44316e-25;

pub const TWO_PI: f64 = 2.0 * PI;

/// Ordinary frequency (Hz) to angular frequency (rad/s).
#[inline]
pub fn hz_to_rad(f: f64) -> f64 {
    TWO_PI * f
}

/// Angular frequency (rad/s) to ordinary frequency (Hz).
#[inline]
pub fn rad_to_hz(w: f64) -> f64 {
    w / TWO_PI
}

/// Wavelength (m) to wavenumber (rad/m).
#[inline]
pub fn wavenumber(lambda: f64) -> f64 {
    TWO_PI / lambda
}
