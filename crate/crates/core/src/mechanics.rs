//! Mechanics of the gaseous cantilever under the probe potential.
//!
//! Per atom, n̄ probe photons add the potential ħn̄(g0²/Δ_ca)·sin²(φ + k_p z)
//! to the harmonic lattice well. Near the well centre this
//!
//! * pushes the atoms by the force −n̄·(F/N)·sin2φ,
//! * changes the curvature by n̄·2k_p(F/N)·cos2φ, i.e. ω_z² → ω_z²(1 + η cos2φ)
//!   with η = 4n̄g0²ω_r/(Δ_ca ω_z²).
//!
//! For Δ_ca < 0 the probe softens the trap at a probe node (φ = 0) and loses
//! confinement entirely at η = −1; at the antinode it stiffens it.
//!
//! The dynamic optical spring is derived from the same force law:
//! K_d = 2(F sin2φ)²·n̄·Δ/(ħ(Δ² + κ²)). The commonly quoted
//! `[2F²n̄Δ/(Δ²+κ²)]·sin 2φ` drops the 1/ħ needed for units of N/m and the
//! second power of sin 2φ; at φ = π/4 the two agree up to the ħ.

use crate::constants::HBAR;
use crate::coupling::{double_angle, force_per_photon};
use crate::error::{Error, Result};
use crate::params::System;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpringConstants {
    /// Static spring K_s = 2k_p F n̄ cos2φ0 (collective, N/m).
    pub k_static: f64,
    /// Dynamic optical spring K_d (collective, N/m).
    pub k_dynamic: f64,
    /// Signed curvature ratio η.
    pub eta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanicalEquilibrium {
    /// Displacement of the atoms from the bare well centre, m. `None` when unconfined.
    pub z_cm: Option<f64>,
    /// Ground-state rms width in the effective well, m. `None` when unconfined.
    pub sigma_eff: Option<f64>,
    /// Effective curvature over mass, (rad/s)², signed.
    pub omega_eff_sq: f64,
    pub confined: bool,
}

/// η = 4n̄g0²ω_r/(Δ_ca ω_z²). Carries the sign of Δ_ca.
pub fn curvature_ratio(sys: &System, n_bar: f64) -> f64 {
    let p = &sys.params;
    let wz = sys.ensemble.omega_z;
    4.0 * n_bar * p.g0 * p.g0 * p.omega_r / (sys.drive.delta_ca * wz * wz)
}

/// Static and dynamic spring constants at the ensemble phase φ0.
pub fn spring_constants(sys: &System, n_bar: f64, delta_eff: f64) -> SpringConstants {
    let p = &sys.params;
    let f = force_per_photon(p, sys.ensemble.n_atoms, sys.drive.delta_ca);
    let (sin2, cos2) = double_angle(sys.ensemble.phi0);
    let lin = f * sin2;
    SpringConstants {
        k_static: 2.0 * p.k_p * f * n_bar * cos2,
        k_dynamic: dynamic_spring(lin, n_bar, delta_eff, p.kappa),
        eta: curvature_ratio(sys, n_bar),
    }
}

fn dynamic_spring(linear_force: f64, n_bar: f64, delta_eff: f64, kappa: f64) -> f64 {
    2.0 * linear_force * linear_force * n_bar * delta_eff
        / (HBAR * (delta_eff * delta_eff + kappa * kappa))
}

/// Equilibrium of one well at probe phase `phi_site` with `n_bar` photons.
pub fn equilibrium_state(sys: &System, n_bar: f64, phi_site: f64) -> MechanicalEquilibrium {
    let p = &sys.params;
    let wz2 = sys.ensemble.omega_z * sys.ensemble.omega_z;
    let (sin2, cos2) = double_angle(phi_site);
    let eta = curvature_ratio(sys, n_bar);
    let omega_eff_sq = wz2 * (1.0 + eta * cos2);
    if omega_eff_sq > 0.0 {
        let force_per_atom = force_per_photon(p, 1.0, sys.drive.delta_ca);
        let z_cm = -force_per_atom * n_bar * sin2 / (p.mass * omega_eff_sq);
        MechanicalEquilibrium {
            z_cm: Some(z_cm),
            sigma_eff: Some(p.ground_state_width(omega_eff_sq.sqrt())),
            omega_eff_sq,
            confined: true,
        }
    } else {
        MechanicalEquilibrium {
            z_cm: None,
            sigma_eff: None,
            omega_eff_sq,
            confined: false,
        }
    }
}

/// Collective-mode frequencies (rad/s): `f_static` = √(ω_z² + K_s/(Nm)) and
/// `f_linear` = √(ω_z² + (K_s + K_d)/(Nm)). The parametric-heating
/// resonance sits at twice `f_static`.
pub fn mode_frequencies(sys: &System, n_bar: f64, delta_eff: f64) -> Result<(f64, f64)> {
    let p = &sys.params;
    let wz2 = sys.ensemble.omega_z * sys.ensemble.omega_z;
    let (sin2, cos2) = double_angle(sys.ensemble.phi0);
    // Per-atom forms so that N = 0 stays finite.
    let ks_per_nm = wz2 * curvature_ratio(sys, n_bar) * cos2;
    let f_atom = force_per_photon(p, 1.0, sys.drive.delta_ca);
    let kd_per_nm =
        sys.ensemble.n_atoms * dynamic_spring(f_atom * sin2, n_bar, delta_eff, p.kappa) / p.mass;
    let stat = wz2 + ks_per_nm;
    let lin = wz2 + ks_per_nm + kd_per_nm;
    if stat < 0.0 {
        return Err(Error::Unconfined { omega_eff_sq: stat });
    }
    if lin < 0.0 {
        return Err(Error::Unconfined { omega_eff_sq: lin });
    }
    Ok((stat.sqrt(), lin.sqrt()))
}

/// Resolution of the full-potential oracle grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleGrid {
    /// Grid points across the central well; at least 1000.
    pub points: usize,
}

impl Default for OracleGrid {
    fn default() -> Self {
        OracleGrid { points: 4001 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    /// Stationary point of the full potential nearest the bare well centre, m.
    pub z_min: f64,
    /// Second derivative of the per-atom potential there, N/m.
    pub curvature: f64,
    /// Whether that stationary point is a minimum.
    pub confined: bool,
}

/// Per-atom potential without the Lamb-Dicke expansion:
/// V(z) = U·sin²(k_t z) + ħn̄g0²·sin²(k_p z + φ)/Δ_ca, bare minimum at z = 0.
pub fn full_potential(sys: &System, n_bar: f64, phi_site: f64, trap_depth: f64, z: f64) -> f64 {
    let p = &sys.params;
    let trap = (p.k_t * z).sin();
    let probe = (p.k_p * z + phi_site).sin();
    trap_depth * trap * trap + HBAR * n_bar * p.g0 * p.g0 * probe * probe / sys.drive.delta_ca
}

/// Locates the stationary point of [`full_potential`] continuously connected
/// to the bare minimum and measures its curvature by central differences.
pub fn full_potential_oracle(
    sys: &System,
    n_bar: f64,
    phi_site: f64,
    trap_depth: f64,
    grid: OracleGrid,
) -> Result<OracleResult> {
    if !(trap_depth > 0.0) {
        return Err(Error::invariant("trap_depth", trap_depth, "must be > 0"));
    }
    if grid.points < 1000 {
        return Err(Error::invariant(
            "points",
            grid.points as f64,
            "oracle grid needs at least 1000 points",
        ));
    }
    let half_points = (grid.points / 2) as i64;
    // Stay just inside the well edges at ±π/(2k_t).
    let half_width = 0.5 * sys.params.lattice_spacing() * (1.0 - 1e-6);
    let h = half_width / half_points as f64;
    let v = |z: f64| full_potential(sys, n_bar, phi_site, trap_depth, z);
    let slope = |z: f64| (v(z + h) - v(z - h)) / (2.0 * h);

    let zs: Vec<f64> = (-half_points..=half_points).map(|i| i as f64 * h).collect();
    let ds: Vec<f64> = zs.iter().map(|&z| slope(z)).collect();

    let mut best: Option<f64> = None;
    let mut consider = |z: f64| {
        if best.is_none_or(|b| z.abs() < b.abs()) {
            best = Some(z);
        }
    };
    for i in 0..zs.len() {
        if ds[i] == 0.0 {
            consider(zs[i]);
        } else if i + 1 < zs.len() && ds[i] * ds[i + 1] < 0.0 {
            consider(bisect_slope(&slope, zs[i], zs[i + 1], ds[i], h * 1e-9));
        }
    }
    let z_min = best.ok_or(Error::NoInteriorMinimum)?;
    let curvature = (v(z_min + h) - 2.0 * v(z_min) + v(z_min - h)) / (h * h);
    Ok(OracleResult {
        z_min,
        curvature,
        confined: curvature > 0.0,
    })
}

fn bisect_slope(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64, tol: f64) -> f64 {
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::hz_to_rad;
    use crate::params::{default_rb87_params, EnsembleConfig, ProbeDrive};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn sys(delta_ca_hz: f64, omega_z_hz: f64, phi0: f64) -> System {
        let p = default_rb87_params();
        let e = EnsembleConfig::new(&p, 5400.0, phi0, hz_to_rad(omega_z_hz)).unwrap();
        let d = ProbeDrive::new(hz_to_rad(delta_ca_hz), 0.0, 1.0).unwrap();
        System::new(p, e, d).unwrap()
    }

    #[test]
    fn eta_example() {
        let s = sys(-14e9, 32e3, 0.0);
        assert_eq!(curvature_ratio(&s, 0.0), 0.0);
        let eta = curvature_ratio(&s, 1.0);
        // 4·(13.1 MHz)²·3.773 kHz / (−14 GHz · (32 kHz)²)
        assert!((eta + 0.1807).abs() < 0.001, "{eta}");
    }

    #[test]
    fn spring_zeros() {
        let s = sys(-14e9, 32e3, FRAC_PI_4);
        let k = spring_constants(&s, 2.0, -s.params.kappa);
        assert_eq!(k.k_static, 0.0);
        assert!(k.k_dynamic < 0.0);
        for phi in [0.0, FRAC_PI_2] {
            let k = spring_constants(&s.with_phi0(phi), 2.0, 0.7 * s.params.kappa);
            assert_eq!(k.k_dynamic, 0.0);
        }
        assert_eq!(spring_constants(&s, 2.0, 0.0).k_dynamic, 0.0);
    }

    #[test]
    fn dynamic_spring_extremal_at_kappa() {
        let s = sys(40e9, 58.5e3, FRAC_PI_4);
        let kappa = s.params.kappa;
        let at = |d: f64| spring_constants(&s, 3.5, d).k_dynamic;
        for i in 0..=400 {
            let d = -3.0 * kappa + i as f64 * 6.0 * kappa / 400.0;
            assert!(at(d).abs() <= at(kappa).abs() * (1.0 + 1e-12));
        }
        assert_eq!(at(-kappa), -at(kappa));
    }

    #[test]
    fn eta_sign_follows_detuning() {
        assert!(curvature_ratio(&sys(-8e9, 32e3, 0.0), 0.5) < 0.0);
        assert!(curvature_ratio(&sys(8e9, 32e3, 0.0), 0.5) > 0.0);
    }

    #[test]
    fn bare_equilibrium() {
        let s = sys(-14e9, 32e3, 0.3);
        let m = equilibrium_state(&s, 0.0, 0.3);
        assert_eq!(m.z_cm, Some(0.0));
        assert_eq!(m.sigma_eff, Some(s.bare_width()));
        assert_eq!(m.omega_eff_sq, s.ensemble.omega_z.powi(2));
        assert!(m.confined);
    }

    #[test]
    fn confinement_lost_at_node() {
        let s = sys(-14e9, 32e3, 0.0);
        let n_crit = -1.0 / curvature_ratio(&s, 1.0);
        let just_below = equilibrium_state(&s, n_crit * (1.0 - 1e-9), 0.0);
        assert!(just_below.confined);
        let beyond = equilibrium_state(&s, n_crit * (1.0 + 1e-9), 0.0);
        assert!(!beyond.confined);
        assert!(beyond.z_cm.is_none() && beyond.sigma_eff.is_none());
    }

    #[test]
    fn antinode_stiffens_for_red_detuning() {
        let s = sys(-14e9, 32e3, FRAC_PI_2);
        let m = equilibrium_state(&s, 0.3, FRAC_PI_2);
        assert!(m.omega_eff_sq > s.ensemble.omega_z.powi(2));
        assert!(m.sigma_eff.unwrap() < s.bare_width());
    }

    #[test]
    fn displacement_points_down_the_potential() {
        // Δ_ca < 0 attracts atoms to higher intensity: at φ = π/4 that is +z.
        let s = sys(-14e9, 32e3, FRAC_PI_4);
        let m = equilibrium_state(&s, 0.5, FRAC_PI_4);
        assert!(m.z_cm.unwrap() > 0.0);
        let s = sys(14e9, 32e3, FRAC_PI_4);
        assert!(equilibrium_state(&s, 0.5, FRAC_PI_4).z_cm.unwrap() < 0.0);
    }

    #[test]
    fn mode_frequencies_bare_and_quarter() {
        let s = sys(40e9, 58.5e3, FRAC_PI_4);
        let wz = s.ensemble.omega_z;
        let (a, b) = mode_frequencies(&s, 0.0, -s.params.kappa).unwrap();
        assert_eq!((a, b), (wz, wz));
        let (a, b) = mode_frequencies(&s, 3.5, -s.params.kappa).unwrap();
        assert_eq!(a, wz);
        assert!(b < wz);
    }

    #[test]
    fn mode_frequencies_unconfined() {
        let s = sys(-14e9, 32e3, 0.0);
        let n_crit = -1.0 / curvature_ratio(&s, 1.0);
        assert!(matches!(
            mode_frequencies(&s, 1.5 * n_crit, 0.0),
            Err(Error::Unconfined { .. })
        ));
    }

    #[test]
    fn oracle_bare_lattice() {
        let s = sys(-14e9, 32e3, 0.4);
        let u = s.params.trap_depth_for(s.ensemble.omega_z);
        let r = full_potential_oracle(&s, 0.0, 0.4, u, OracleGrid::default()).unwrap();
        assert!(r.z_min.abs() < 1e-15);
        let expected = s.params.mass * s.ensemble.omega_z.powi(2);
        assert!((r.curvature / expected - 1.0).abs() < 1e-5);
        assert!(r.confined);
    }

    #[test]
    fn oracle_rejects_bad_inputs() {
        let s = sys(-14e9, 32e3, 0.4);
        assert!(full_potential_oracle(&s, 0.0, 0.4, 0.0, OracleGrid::default()).is_err());
        assert!(full_potential_oracle(&s, 0.0, 0.4, 1e-29, OracleGrid { points: 10 }).is_err());
    }
}
