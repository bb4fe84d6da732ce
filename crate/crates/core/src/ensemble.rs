//! Distribution of atoms over neighbouring lattice wells.
//!
//! Wells sit at z0 + j·π/k_t. Because the probe and trap wavelengths differ
//! slightly, the probe phase advances by k_p·π/k_t (mod π) from one well to
//! the next, about 0.26 rad for 780 nm / 845 nm. Spreading atoms over several
//! wells therefore washes out the position dependence of the cavity shift.

use std::f64::consts::PI;

use crate::coupling::site_shift;
use crate::error::{Error, Result};
use crate::params::{EnsembleConfig, PhysicalParams, System};

/// Weight below which the outermost site is considered negligible.
pub const TAIL_WEIGHT_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SitePopulation {
    /// Signed offset from the central well.
    pub site_index: i64,
    /// Fraction of the atoms in this well.
    pub weight: f64,
    /// Probe phase at the well minimum, reduced to [0, π).
    pub phi_j: f64,
}

/// Width and displacement of the atoms within one well.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteMotion {
    pub sigma: f64,
    pub z_cm: f64,
}

/// Gaussian occupation of `n_sites` wells centred on the ensemble position.
pub fn site_populations(p: &PhysicalParams, e: &EnsembleConfig) -> Result<Vec<SitePopulation>> {
    if e.n_sites == 0 || e.n_sites.is_multiple_of(2) {
        return Err(Error::invariant(
            "n_sites",
            e.n_sites as f64,
            "must be odd and >= 1",
        ));
    }
    if !(e.sigma_spread >= 0.0) {
        return Err(Error::invariant(
            "sigma_spread",
            e.sigma_spread,
            "must be >= 0",
        ));
    }
    let half = (e.n_sites as i64 - 1) / 2;
    let spacing = p.lattice_spacing();
    let step = p.site_phase_step();

    let raw: Vec<f64> = (-half..=half)
        .map(|j| {
            if e.sigma_spread == 0.0 {
                if j == 0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                let z = j as f64 * spacing;
                (-z * z / (2.0 * e.sigma_spread * e.sigma_spread)).exp()
            }
        })
        .collect();
    let total: f64 = raw.iter().sum();

    let sites: Vec<SitePopulation> = (-half..=half)
        .zip(raw)
        .map(|(j, w)| SitePopulation {
            site_index: j,
            weight: w / total,
            phi_j: (e.phi0 + j as f64 * step).rem_euclid(PI),
        })
        .collect();

    if let Some(edge) = sites.last() {
        if e.n_sites > 1 && edge.weight > TAIL_WEIGHT_THRESHOLD {
            log::warn!(
                "outermost lattice site carries weight {:.2e}; increase n_sites (currently {})",
                edge.weight,
                e.n_sites
            );
        }
    }
    Ok(sites)
}

/// Cavity shift summed over sites, each with its own width and displacement.
/// `motion` is indexed like `sites`.
pub fn ensemble_shift(sys: &System, sites: &[SitePopulation], motion: &[SiteMotion]) -> f64 {
    debug_assert_eq!(sites.len(), motion.len());
    debug_assert!(!sites.is_empty());
    sites
        .iter()
        .zip(motion)
        .map(|(s, m)| {
            site_shift(
                &sys.params,
                sys.ensemble.n_atoms * s.weight,
                sys.drive.delta_ca,
                s.phi_j,
                m.sigma,
                m.z_cm,
            )
        })
        .sum()
}

/// Shift with every well at the configured width and no probe-induced motion.
pub fn static_ensemble_shift(sys: &System) -> Result<f64> {
    let sites = site_populations(&sys.params, &sys.ensemble)?;
    let motion = vec![
        SiteMotion {
            sigma: sys.ensemble.sigma_site,
            z_cm: 0.0,
        };
        sites.len()
    ];
    Ok(ensemble_shift(sys, &sites, &motion))
}

/// Analytic contrast of the shift-versus-position sinusoid:
/// e^{−2k_p²σ²}·e^{−2(k_p−k_t)²Σ²}.
pub fn contrast(p: &PhysicalParams, sigma: f64, sigma_spread: f64) -> f64 {
    let dk = p.k_p - p.k_t;
    (-2.0 * (p.k_p * sigma).powi(2)).exp() * (-2.0 * (dk * sigma_spread).powi(2)).exp()
}

/// Central-well probe phase for an ensemble displaced by `z0` from the
/// reference position with phase `phi_ref`. Moving the ensemble by one
/// lattice spacing advances the phase by the per-site step, so the phase
/// follows (k_p − k_t)·z0.
pub fn phase_at_position(p: &PhysicalParams, phi_ref: f64, z0: f64) -> f64 {
    phi_ref + (p.k_p - p.k_t) * z0
}
