//! Physical parameters, ensemble configuration and probe drive.

use std::f64::consts::PI;

use crate::constants::{hz_to_rad, wavenumber, HBAR, RB87_MASS};
use crate::error::{Error, Result};

/// Default dispersive-regime guard: |Δ_ca| must be at least this multiple of Γ.
pub const DEFAULT_DISPERSIVE_GUARD: f64 = 100.0;

/// Default number of lattice sites kept in the site sum.
pub const DEFAULT_N_SITES: usize = 11;

/// Cavity, atom and lattice constants. Angular frequencies in rad/s,
/// wavenumbers in rad/m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Atom-cavity coupling at a probe antinode.
    pub g0: f64,
    /// Cavity half-linewidth.
    pub kappa: f64,
    /// Atomic half-linewidth.
    pub gamma: f64,
    /// Probe wavenumber.
    pub k_p: f64,
    /// Trap (lattice) wavenumber.
    pub k_t: f64,
    /// Atomic mass, kg.
    pub mass: f64,
    /// Recoil frequency ħk_p²/2m. Always derived from `k_p` and `mass`.
    pub omega_r: f64,
}

impl PhysicalParams {
    pub fn new(g0: f64, kappa: f64, gamma: f64, k_p: f64, k_t: f64, mass: f64) -> Result<Self> {
        positive("g0", g0)?;
        positive("kappa", kappa)?;
        positive("gamma", gamma)?;
        positive("k_p", k_p)?;
        positive("k_t", k_t)?;
        positive("mass", mass)?;
        if k_p <= k_t {
            return Err(Error::invariant(
                "k_p",
                k_p,
                "probe wavenumber must exceed trap wavenumber",
            ));
        }
        Ok(PhysicalParams {
            g0,
            kappa,
            gamma,
            k_p,
            k_t,
            mass,
            omega_r: recoil_frequency(k_p, mass),
        })
    }

    /// Frequencies in Hz, wavelengths in metres.
    pub fn from_boundary_units(
        g0_hz: f64,
        kappa_hz: f64,
        gamma_hz: f64,
        lambda_p: f64,
        lambda_t: f64,
        mass: f64,
    ) -> Result<Self> {
        PhysicalParams::new(
            hz_to_rad(g0_hz),
            hz_to_rad(kappa_hz),
            hz_to_rad(gamma_hz),
            wavenumber(lambda_p),
            wavenumber(lambda_t),
            mass,
        )
    }

    /// Single-atom cooperativity g0²/(2κΓ).
    pub fn cooperativity(&self) -> f64 {
        self.g0 * self.g0 / (2.0 * self.kappa * self.gamma)
    }

    /// Distance between neighbouring lattice wells, π/k_t.
    pub fn lattice_spacing(&self) -> f64 {
        PI / self.k_t
    }

    /// Probe phase advance between neighbouring wells, k_p·π/k_t reduced mod π.
    pub fn site_phase_step(&self) -> f64 {
        (self.k_p * self.lattice_spacing()).rem_euclid(PI)
    }

    /// Spatial period of the cavity shift versus ensemble position, π/(k_p − k_t).
    pub fn position_period(&self) -> f64 {
        PI / (self.k_p - self.k_t)
    }

    /// Depth of a sin² lattice whose well curvature gives trap frequency `omega_z`.
    pub fn trap_depth_for(&self, omega_z: f64) -> f64 {
        self.mass * omega_z * omega_z / (2.0 * self.k_t * self.k_t)
    }

    /// Ground-state rms width √(ħ/2mω) of a harmonic well with frequency `omega`.
    pub fn ground_state_width(&self, omega: f64) -> f64 {
        (HBAR / (2.0 * self.mass * omega)).sqrt()
    }
}

pub fn recoil_frequency(k_p: f64, mass: f64) -> f64 {
    HBAR * k_p * k_p / (2.0 * mass)
}

pub const RB87_G0_HZ: f64 = 13.1e6;
pub const RB87_KAPPA_HZ: f64 = 1.8e6;
pub const RB87_GAMMA_HZ: f64 = 3.0e6;
pub const PROBE_WAVELENGTH: f64 = 780e-9;
pub const TRAP_WAVELENGTH: f64 = 845e-9;

/// ⁸⁷Rb on the D2 line in a high-finesse cavity with an 845 nm lattice.
pub fn default_rb87_params() -> PhysicalParams {
    PhysicalParams::from_boundary_units(
        RB87_G0_HZ,
        RB87_KAPPA_HZ,
        RB87_GAMMA_HZ,
        PROBE_WAVELENGTH,
        TRAP_WAVELENGTH,
        RB87_MASS,
    )
    .expect("built-in parameters are valid")
}

/// The trapped ensemble: atom number, position along the probe standing
/// wave, trap frequency and spatial spread.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleConfig {
    /// Mean atom number N. Kept as a float so that fractional atom loss
    /// between sweeps can be applied.
    pub n_atoms: f64,
    /// Probe phase φ0 = k_p·z0 at the central well, rad.
    pub phi0: f64,
    /// Axial trap frequency ω_z, rad/s.
    pub omega_z: f64,
    /// Intra-site rms width σ, m.
    pub sigma_site: f64,
    /// Inter-site rms spread Σ, m.
    pub sigma_spread: f64,
    /// Number of wells kept in the site sum (odd).
    pub n_sites: usize,
}

impl EnsembleConfig {
    /// Single-well ensemble with ground-state width.
    pub fn new(params: &PhysicalParams, n_atoms: f64, phi0: f64, omega_z: f64) -> Result<Self> {
        positive("omega_z", omega_z)?;
        let e = EnsembleConfig {
            n_atoms,
            phi0,
            omega_z,
            sigma_site: params.ground_state_width(omega_z),
            sigma_spread: 0.0,
            n_sites: DEFAULT_N_SITES,
        };
        e.validate()?;
        Ok(e)
    }

    pub fn with_sigma_spread(mut self, sigma_spread: f64) -> Result<Self> {
        self.sigma_spread = sigma_spread;
        self.validate()?;
        Ok(self)
    }

    pub fn with_sigma_site(mut self, sigma_site: f64) -> Result<Self> {
        self.sigma_site = sigma_site;
        self.validate()?;
        Ok(self)
    }

    pub fn with_n_sites(mut self, n_sites: usize) -> Result<Self> {
        self.n_sites = n_sites;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        non_negative("n_atoms", self.n_atoms)?;
        positive("omega_z", self.omega_z)?;
        non_negative("sigma_site", self.sigma_site)?;
        non_negative("sigma_spread", self.sigma_spread)?;
        if !self.phi0.is_finite() {
            return Err(Error::invariant("phi0", self.phi0, "must be finite"));
        }
        if self.n_sites == 0 || self.n_sites.is_multiple_of(2) {
            return Err(Error::invariant(
                "n_sites",
                self.n_sites as f64,
                "must be odd and >= 1",
            ));
        }
        Ok(())
    }
}

/// Probe laser drive. `delta_ca` and `delta_pc` are signed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeDrive {
    /// Cavity-atom detuning Δ_ca = ω_c − ω_a, rad/s.
    pub delta_ca: f64,
    /// Probe detuning from the empty cavity resonance, rad/s.
    pub delta_pc: f64,
    /// Peak intracavity photon number on resonance.
    pub n_max: f64,
    /// Required ratio |Δ_ca|/Γ.
    pub dispersive_guard: f64,
}

impl ProbeDrive {
    pub fn new(delta_ca: f64, delta_pc: f64, n_max: f64) -> Result<Self> {
        let d = ProbeDrive {
            delta_ca,
            delta_pc,
            n_max,
            dispersive_guard: DEFAULT_DISPERSIVE_GUARD,
        };
        if !delta_pc.is_finite() {
            return Err(Error::invariant("delta_pc", delta_pc, "must be finite"));
        }
        non_negative("n_max", n_max)?;
        Ok(d)
    }

    pub fn with_guard(mut self, guard: f64) -> Result<Self> {
        non_negative("dispersive_guard", guard)?;
        self.dispersive_guard = guard;
        Ok(self)
    }

    /// Checks |Δ_ca| ≥ guard·Γ.
    pub fn check_dispersive(&self, params: &PhysicalParams) -> Result<()> {
        let limit = self.dispersive_guard * params.gamma;
        if !(self.delta_ca.abs() >= limit) || self.delta_ca == 0.0 {
            return Err(Error::DispersiveGuard {
                delta_ca: self.delta_ca,
                guard: self.dispersive_guard,
                limit,
            });
        }
        Ok(())
    }
}

/// A validated (params, ensemble, drive) triple. Every model operation takes
/// one of these; construction enforces the dispersive-regime guard.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct System {
    pub params: PhysicalParams,
    pub ensemble: EnsembleConfig,
    pub drive: ProbeDrive,
}

impl System {
    pub fn new(
        params: PhysicalParams,
        ensemble: EnsembleConfig,
        drive: ProbeDrive,
    ) -> Result<Self> {
        ensemble.validate()?;
        drive.check_dispersive(&params)?;
        non_negative("n_max", drive.n_max)?;
        Ok(System {
            params,
            ensemble,
            drive,
        })
    }

    pub fn with_phi0(mut self, phi0: f64) -> Self {
        self.ensemble.phi0 = phi0;
        self
    }

    pub fn with_delta_pc(mut self, delta_pc: f64) -> Self {
        self.drive.delta_pc = delta_pc;
        self
    }

    pub fn with_n_max(mut self, n_max: f64) -> Self {
        assert!(n_max >= 0.0, "n_max must be non-negative");
        self.drive.n_max = n_max;
        self
    }

    pub fn with_n_atoms(mut self, n_atoms: f64) -> Self {
        assert!(n_atoms >= 0.0, "n_atoms must be non-negative");
        self.ensemble.n_atoms = n_atoms;
        self
    }

    pub fn with_delta_ca(mut self, delta_ca: f64) -> Result<Self> {
        self.drive.delta_ca = delta_ca;
        self.drive.check_dispersive(&self.params)?;
        Ok(self)
    }

    /// Ground-state width in the bare trap.
    pub fn bare_width(&self) -> f64 {
        self.params.ground_state_width(self.ensemble.omega_z)
    }
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invariant(field, v, "must be finite and > 0"))
    }
}

fn non_negative(field: &'static str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invariant(field, v, "must be finite and >= 0"))
    }
}
