//! Closed-form dispersive atom-cavity coupling.
//!
//! Each atom at probe phase θ shifts the cavity by (g0²/Δ_ca)·sin²θ. Averaging
//! sin² over a Gaussian of rms width σ centred at θ = φ + k_p·z gives
//!
//! ```text
//! Δ_N = N·g0²/(2Δ_ca)·(1 − e^{−2k_p²σ²}·cos 2(φ + k_p z))
//! ```
//!
//! Expanding to second order in k_p·z and k_p·σ yields the static shift Δ_N0,
//! a linear term (F/ħ)·sin2φ·z and a quadratic term k_p(F/ħ)·cos2φ·(z² + σ²),
//! all with positive sign. The ensemble is pushed toward lower ħΔ_N.

use crate::constants::HBAR;
use crate::error::Result;
use crate::params::{EnsembleConfig, PhysicalParams, ProbeDrive, System};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingCoefficients {
    /// Static dispersive shift Δ_N0 = N(g0²/Δ_ca)sin²φ0, rad/s.
    pub delta_n0: f64,
    /// Per-photon force scale F = Nħk_p g0²/Δ_ca, N.
    pub force_per_photon: f64,
    /// F·sin2φ0, N.
    pub linear_coeff: f64,
    /// 2k_p·F·cos2φ0, N/m.
    pub quad_coeff: f64,
}

pub fn coupling_coefficients(
    p: &PhysicalParams,
    e: &EnsembleConfig,
    d: &ProbeDrive,
) -> Result<CouplingCoefficients> {
    d.check_dispersive(p)?;
    let f = force_per_photon(p, e.n_atoms, d.delta_ca);
    let s = e.phi0.sin();
    let (sin2, cos2) = double_angle(e.phi0);
    Ok(CouplingCoefficients {
        delta_n0: e.n_atoms * p.g0 * p.g0 / d.delta_ca * s * s,
        force_per_photon: f,
        linear_coeff: f * sin2,
        quad_coeff: 2.0 * p.k_p * f * cos2,
    })
}

/// F = Nħk_p g0²/Δ_ca.
pub fn force_per_photon(p: &PhysicalParams, n_atoms: f64, delta_ca: f64) -> f64 {
    n_atoms * HBAR * p.k_p * p.g0 * p.g0 / delta_ca
}

/// Cavity shift from the ensemble's central well, width `sigma`, displaced by
/// `z_cm` from the well centre.
pub fn dispersive_shift(sys: &System, sigma: f64, z_cm: f64) -> f64 {
    site_shift(
        &sys.params,
        sys.ensemble.n_atoms,
        sys.drive.delta_ca,
        sys.ensemble.phi0,
        sigma,
        z_cm,
    )
}

/// Shift from `n_atoms` atoms in a Gaussian of width `sigma` centred at
/// probe phase `phi + k_p·z_cm`.
pub fn site_shift(
    p: &PhysicalParams,
    n_atoms: f64,
    delta_ca: f64,
    phi: f64,
    sigma: f64,
    z_cm: f64,
) -> f64 {
    debug_assert!(sigma >= 0.0);
    let envelope = (-2.0 * p.k_p * p.k_p * sigma * sigma).exp();
    let theta = phi + p.k_p * z_cm;
    n_atoms * p.g0 * p.g0 / (2.0 * delta_ca) * (1.0 - envelope * (2.0 * theta).cos())
}

/// (sin 2φ, cos 2φ), with exact zeros at multiples of π/4 that the
/// floating-point evaluation of `PI/4` would otherwise miss.
pub(crate) fn double_angle(phi: f64) -> (f64, f64) {
    let x = 2.0 * phi;
    let quarter_turns = x / std::f64::consts::FRAC_PI_2;
    let k = quarter_turns.round();
    if (quarter_turns - k).abs() < 4.0 * f64::EPSILON * quarter_turns.abs().max(1.0) {
        match (k as i64).rem_euclid(4) {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        }
    } else {
        x.sin_cos()
    }
}
