//! Flat key-value configuration (TOML syntax).
//!
//! Frequencies are given in Hz (keys ending in `_hz`) and converted to rad/s
//! on load; lengths are in metres. Unknown keys are rejected. Every optional
//! key falls back to the ⁸⁷Rb defaults or the documented run defaults, and the
//! resolved configuration serialises back to a document that reloads to the
//! same values.

use serde::{Deserialize, Serialize};

use crate::constants::{hz_to_rad, RB87_MASS};
use crate::error::{Error, Result};
use crate::params::{
    EnsembleConfig, PhysicalParams, ProbeDrive, System, DEFAULT_DISPERSIVE_GUARD, DEFAULT_N_SITES,
    PROBE_WAVELENGTH, RB87_G0_HZ, RB87_GAMMA_HZ, RB87_KAPPA_HZ, TRAP_WAVELENGTH,
};
use crate::steady_state::{default_sigma_cap, SolverOptions};

/// The on-disk schema. All values are boundary units (Hz, m, J).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g0_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_p_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_t_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass_kg: Option<f64>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_atoms: Option<f64>,
    #[serde(alias = "phi0", skip_serializing_if = "Option::is_none")]
    pub phi0_rad: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_z_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_site_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_spread_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_sites: Option<usize>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_ca_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_pc_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dispersive_guard: Option<f64>,

    /// Fixed intracavity photon number for stabilised-n̄ commands.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_bar: Option<f64>,
    /// Fixed probe detuning from the shifted cavity for spring/spectrum commands.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_eff_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub damping_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loss_width_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub peak_loss: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trap_depth_j: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_cap_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atom_loss_per_sweep: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fp_grid_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region_scan_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_abs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_rel: Option<f64>,
}

pub const DEFAULT_DELTA_CA_HZ: f64 = -14e9;
pub const DEFAULT_DAMPING_HZ: f64 = 1e3;
pub const DEFAULT_LOSS_WIDTH_HZ: f64 = 2e3;
pub const DEFAULT_PEAK_LOSS: f64 = 0.5;

/// Settings that are not part of the physical model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub n_bar: f64,
    /// rad/s
    pub delta_eff: f64,
    /// rad/s
    pub damping: f64,
    /// rad/s
    pub loss_width: f64,
    pub peak_loss: f64,
    /// J
    pub trap_depth: f64,
    pub atom_loss_per_sweep: f64,
    pub solver: SolverOptions,
}

/// A loaded, validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    /// Every key filled in; serialising this reproduces the configuration.
    pub resolved: ConfigFile,
    pub system: System,
    pub run: RunOptions,
}

impl Config {
    pub fn params(&self) -> &PhysicalParams {
        &self.system.params
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.resolved).expect("flat config always serialises")
    }
}

fn positive(key: &'static str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::invariant(key, v, "must be finite and > 0"))
    }
}

fn non_negative(key: &'static str, v: f64) -> Result<f64> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::invariant(key, v, "must be finite and >= 0"))
    }
}

fn finite(key: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::invariant(key, v, "must be finite"))
    }
}

fn required<T>(key: &'static str, v: Option<T>) -> Result<T> {
    v.ok_or_else(|| Error::Parse(format!("missing required key `{key}`")))
}

pub fn load_config(text: &str) -> Result<Config> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    resolve(file)
}

pub fn load_config_file(path: &std::path::Path) -> Result<Config> {
    load_config(&std::fs::read_to_string(path)?)
}

/// Validates `file` and fills every missing key with its default.
pub fn resolve(file: ConfigFile) -> Result<Config> {
    let g0_hz = positive("g0_hz", file.g0_hz.unwrap_or(RB87_G0_HZ))?;
    let kappa_hz = positive("kappa_hz", file.kappa_hz.unwrap_or(RB87_KAPPA_HZ))?;
    let gamma_hz = positive("gamma_hz", file.gamma_hz.unwrap_or(RB87_GAMMA_HZ))?;
    let lambda_p_m = positive("lambda_p_m", file.lambda_p_m.unwrap_or(PROBE_WAVELENGTH))?;
    let lambda_t_m = positive("lambda_t_m", file.lambda_t_m.unwrap_or(TRAP_WAVELENGTH))?;
    let mass_kg = positive("mass_kg", file.mass_kg.unwrap_or(RB87_MASS))?;
    if lambda_p_m >= lambda_t_m {
        return Err(Error::invariant(
            "lambda_p_m",
            lambda_p_m,
            "probe wavelength must be shorter than lambda_t_m",
        ));
    }
    let params = PhysicalParams::from_boundary_units(
        g0_hz, kappa_hz, gamma_hz, lambda_p_m, lambda_t_m, mass_kg,
    )?;

    let n_atoms = non_negative("n_atoms", required("n_atoms", file.n_atoms)?)?;
    let phi0_rad = finite("phi0_rad", file.phi0_rad.unwrap_or(0.0))?;
    let omega_z_hz = positive("omega_z_hz", required("omega_z_hz", file.omega_z_hz)?)?;
    let omega_z = hz_to_rad(omega_z_hz);
    let sigma_site_m = non_negative(
        "sigma_site_m",
        file.sigma_site_m
            .unwrap_or_else(|| params.ground_state_width(omega_z)),
    )?;
    let sigma_spread_m = non_negative("sigma_spread_m", file.sigma_spread_m.unwrap_or(0.0))?;
    let n_sites = file.n_sites.unwrap_or(DEFAULT_N_SITES);
    if n_sites == 0 || n_sites.is_multiple_of(2) {
        return Err(Error::invariant(
            "n_sites",
            n_sites as f64,
            "must be odd and >= 1",
        ));
    }
    let ensemble = EnsembleConfig::new(&params, n_atoms, phi0_rad, omega_z)?
        .with_sigma_site(sigma_site_m)?
        .with_sigma_spread(sigma_spread_m)?
        .with_n_sites(n_sites)?;

    let delta_ca_hz = finite(
        "delta_ca_hz",
        file.delta_ca_hz.unwrap_or(DEFAULT_DELTA_CA_HZ),
    )?;
    let delta_pc_hz = finite("delta_pc_hz", file.delta_pc_hz.unwrap_or(0.0))?;
    let n_max = non_negative("n_max", file.n_max.unwrap_or(0.0))?;
    let dispersive_guard = non_negative(
        "dispersive_guard",
        file.dispersive_guard.unwrap_or(DEFAULT_DISPERSIVE_GUARD),
    )?;
    let drive = ProbeDrive::new(hz_to_rad(delta_ca_hz), hz_to_rad(delta_pc_hz), n_max)?
        .with_guard(dispersive_guard)?;
    let system = System::new(params, ensemble, drive)?;

    let n_bar = non_negative("n_bar", file.n_bar.unwrap_or(0.0))?;
    let delta_eff_hz = finite("delta_eff_hz", file.delta_eff_hz.unwrap_or(-kappa_hz))?;
    let damping_hz = positive("damping_hz", file.damping_hz.unwrap_or(DEFAULT_DAMPING_HZ))?;
    let loss_width_hz = positive(
        "loss_width_hz",
        file.loss_width_hz.unwrap_or(DEFAULT_LOSS_WIDTH_HZ),
    )?;
    let peak_loss = file.peak_loss.unwrap_or(DEFAULT_PEAK_LOSS);
    if !(peak_loss > 0.0 && peak_loss <= 1.0) {
        return Err(Error::invariant(
            "peak_loss",
            peak_loss,
            "must be in (0, 1]",
        ));
    }
    let trap_depth_j = positive(
        "trap_depth_j",
        file.trap_depth_j
            .unwrap_or_else(|| params.trap_depth_for(omega_z)),
    )?;
    let sigma_cap_m = positive(
        "sigma_cap_m",
        file.sigma_cap_m
            .unwrap_or_else(|| default_sigma_cap(&system)),
    )?;
    let atom_loss_per_sweep = file.atom_loss_per_sweep.unwrap_or(0.0);
    if !(0.0..1.0).contains(&atom_loss_per_sweep) {
        return Err(Error::invariant(
            "atom_loss_per_sweep",
            atom_loss_per_sweep,
            "must be in [0, 1)",
        ));
    }
    let defaults = SolverOptions::default();
    let fp_grid_points = file.fp_grid_points.unwrap_or(defaults.grid_points);
    if fp_grid_points < 2 {
        return Err(Error::invariant(
            "fp_grid_points",
            fp_grid_points as f64,
            "must be >= 2",
        ));
    }
    let region_scan_points = file
        .region_scan_points
        .unwrap_or(defaults.region_scan_points);
    if region_scan_points < 2 {
        return Err(Error::invariant(
            "region_scan_points",
            region_scan_points as f64,
            "must be >= 2",
        ));
    }
    let tol_abs = positive("tol_abs", file.tol_abs.unwrap_or(defaults.tol_abs))?;
    let tol_rel = positive("tol_rel", file.tol_rel.unwrap_or(defaults.tol_rel))?;

    let run = RunOptions {
        n_bar,
        delta_eff: hz_to_rad(delta_eff_hz),
        damping: hz_to_rad(damping_hz),
        loss_width: hz_to_rad(loss_width_hz),
        peak_loss,
        trap_depth: trap_depth_j,
        atom_loss_per_sweep,
        solver: SolverOptions {
            grid_points: fp_grid_points,
            tol_abs,
            tol_rel,
            sigma_cap: Some(sigma_cap_m),
            region_scan_points,
            ..defaults
        },
    };

    let resolved = ConfigFile {
        g0_hz: Some(g0_hz),
        kappa_hz: Some(kappa_hz),
        gamma_hz: Some(gamma_hz),
        lambda_p_m: Some(lambda_p_m),
        lambda_t_m: Some(lambda_t_m),
        mass_kg: Some(mass_kg),
        n_atoms: Some(n_atoms),
        phi0_rad: Some(phi0_rad),
        omega_z_hz: Some(omega_z_hz),
        sigma_site_m: Some(sigma_site_m),
        sigma_spread_m: Some(sigma_spread_m),
        n_sites: Some(n_sites),
        delta_ca_hz: Some(delta_ca_hz),
        delta_pc_hz: Some(delta_pc_hz),
        n_max: Some(n_max),
        dispersive_guard: Some(dispersive_guard),
        n_bar: Some(n_bar),
        delta_eff_hz: Some(delta_eff_hz),
        damping_hz: Some(damping_hz),
        loss_width_hz: Some(loss_width_hz),
        peak_loss: Some(peak_loss),
        trap_depth_j: Some(trap_depth_j),
        sigma_cap_m: Some(sigma_cap_m),
        atom_loss_per_sweep: Some(atom_loss_per_sweep),
        fp_grid_points: Some(fp_grid_points),
        region_scan_points: Some(region_scan_points),
        tol_abs: Some(tol_abs),
        tol_rel: Some(tol_rel),
    };

    Ok(Config {
        resolved,
        system,
        run,
    })
}
