//! Self-consistent cavity/cantilever steady states.
//!
//! The intracavity photon number obeys n̄ = G(n̄) with
//!
//! ```text
//! G(n̄) = n_max / (1 + (Δ_pc − Δ_N(n̄))² / κ²)
//! ```
//!
//! where Δ_N(n̄) is the ensemble shift after the atoms in every well have
//! relaxed to their equilibrium under n̄ photons. Δ_N does not depend on the
//! probe detuning, so it is tabulated once on an n̄ grid and reused for every
//! detuning of a sweep. All roots of n̄ − G(n̄) on [0, n_max] are bracketed on
//! that grid and refined by bisection. A root is stable when n̄ − G(n̄)
//! crosses zero upward.

use std::sync::OnceLock;

use crate::coupling::double_angle;
use crate::ensemble::{ensemble_shift, site_populations, SiteMotion, SitePopulation};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::mechanics::{equilibrium_state, MechanicalEquilibrium};
use crate::params::System;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Base grid size for bracketing roots of n̄ − G(n̄).
    pub grid_points: usize,
    pub tol_abs: f64,
    pub tol_rel: f64,
    /// Width assigned to atoms in a well that has lost confinement, and the
    /// upper bound on any well's width. `None` uses [`default_sigma_cap`].
    pub sigma_cap: Option<f64>,
    /// Detuning samples used by [`bistability_region`] before endpoint bisection.
    pub region_scan_points: usize,
    pub exec: Exec,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            grid_points: 2000,
            tol_abs: 1e-10,
            tol_rel: 1e-8,
            sigma_cap: None,
            region_scan_points: 401,
            exec: Exec::default(),
        }
    }
}

/// rms width of atoms spread uniformly over one lattice well, (π/k_t)/√12.
pub fn default_sigma_cap(sys: &System) -> f64 {
    sys.params.lattice_spacing() / 12f64.sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub n_bar: f64,
    /// Probe detuning from the atom-shifted cavity, Δ = Δ_pc − Δ_N(n̄).
    pub delta_eff: f64,
    /// Δ_N(n̄).
    pub shift: f64,
    /// Equilibrium of each well, in site order.
    pub per_site: Vec<MechanicalEquilibrium>,
    pub stable: bool,
}

/// G(n̄) with the site sum and caps resolved once.
#[derive(Debug, Clone)]
pub struct ResponseMap {
    sys: System,
    sites: Vec<SitePopulation>,
    sigma_cap: f64,
    z_cap: f64,
}

impl ResponseMap {
    pub fn new(sys: &System, opts: &SolverOptions) -> Result<Self> {
        let sites: Vec<SitePopulation> = site_populations(&sys.params, &sys.ensemble)?
            .into_iter()
            .filter(|s| s.weight > 0.0)
            .collect();
        let sigma_cap = opts.sigma_cap.unwrap_or_else(|| default_sigma_cap(sys));
        if !(sigma_cap > 0.0) {
            return Err(Error::invariant("sigma_cap", sigma_cap, "must be > 0"));
        }
        Ok(ResponseMap {
            sys: *sys,
            sites,
            sigma_cap,
            z_cap: 0.5 * sys.params.lattice_spacing(),
        })
    }

    pub fn system(&self) -> &System {
        &self.sys
    }

    pub fn sites(&self) -> &[SitePopulation] {
        &self.sites
    }

    pub fn equilibria(&self, n_bar: f64) -> Vec<MechanicalEquilibrium> {
        self.sites
            .iter()
            .map(|s| equilibrium_state(&self.sys, n_bar, s.phi_j))
            .collect()
    }

    /// Width and displacement actually used in the shift. Unconfined wells
    /// take the capped width and sit at the well edge on the side the force
    /// pushes them.
    fn motion(&self, eq: &MechanicalEquilibrium, site: &SitePopulation) -> SiteMotion {
        match (eq.sigma_eff, eq.z_cm) {
            (Some(sigma), Some(z)) => SiteMotion {
                sigma: sigma.min(self.sigma_cap),
                z_cm: z.clamp(-self.z_cap, self.z_cap),
            },
            _ => {
                // direction of −F·sin2φ
                let push = -(self.sys.drive.delta_ca.signum()) * double_angle(site.phi_j).0;
                SiteMotion {
                    sigma: self.sigma_cap,
                    z_cm: if push == 0.0 {
                        0.0
                    } else {
                        push.signum() * self.z_cap
                    },
                }
            }
        }
    }

    /// Δ_N(n̄).
    pub fn shift(&self, n_bar: f64) -> f64 {
        let motion: Vec<SiteMotion> = self
            .sites
            .iter()
            .map(|s| {
                let eq = equilibrium_state(&self.sys, n_bar, s.phi_j);
                self.motion(&eq, s)
            })
            .collect();
        ensemble_shift(&self.sys, &self.sites, &motion)
    }

    /// Lorentzian cavity response at probe detuning `delta_pc` for a cavity
    /// shifted by `shift`.
    pub fn lorentzian(&self, delta_pc: f64, shift: f64) -> f64 {
        let x = (delta_pc - shift) / self.sys.params.kappa;
        self.sys.drive.n_max / (1.0 + x * x)
    }

    /// G(n̄) at the system's own probe detuning.
    pub fn eval(&self, n_bar: f64) -> f64 {
        self.lorentzian(self.sys.drive.delta_pc, self.shift(n_bar))
    }

    fn state(&self, delta_pc: f64, n_bar: f64, stable: bool) -> SteadyState {
        let shift = self.shift(n_bar);
        SteadyState {
            n_bar,
            delta_eff: delta_pc - shift,
            shift,
            per_site: self.equilibria(n_bar),
            stable,
        }
    }
}

/// One iteration of the self-consistency map, G(n̄_guess).
pub fn response_map(sys: &System, n_bar_guess: f64) -> Result<f64> {
    if !(n_bar_guess >= 0.0) {
        return Err(Error::invariant("n_bar", n_bar_guess, "must be >= 0"));
    }
    Ok(ResponseMap::new(sys, &SolverOptions::default())?.eval(n_bar_guess))
}

/// Δ_N sampled on a uniform n̄ grid of `base` points over [0, n_max],
/// interleaved with the midpoints (2·base − 1 samples). Even indices form
/// the base grid.
#[derive(Debug, Clone)]
struct ShiftTable {
    n_bar: Vec<f64>,
    shift: Vec<f64>,
}

impl ShiftTable {
    fn build(map: &ResponseMap, base: usize, exec: Exec) -> Self {
        let n_max = map.sys.drive.n_max;
        let fine = 2 * base - 1;
        let n_bar: Vec<f64> = (0..fine)
            .map(|i| n_max * i as f64 / (fine - 1) as f64)
            .collect();
        let shift = exec.map(&n_bar, |&x| map.shift(x));
        ShiftTable { n_bar, shift }
    }
}

enum Solve {
    Roots(Vec<SteadyState>),
    Unresolved { coarse: usize, fine: usize },
}

fn count_crossings(h: &[f64]) -> usize {
    let mut n = 0;
    for i in 0..h.len() {
        if h[i] == 0.0 || (i + 1 < h.len() && h[i] * h[i + 1] < 0.0) {
            n += 1;
        }
    }
    n
}

fn solve_on_table(map: &ResponseMap, table: &ShiftTable, delta_pc: f64) -> Solve {
    let n_max = map.sys.drive.n_max;
    if n_max == 0.0 {
        return Solve::Roots(vec![map.state(delta_pc, 0.0, true)]);
    }
    let h: Vec<f64> = table
        .n_bar
        .iter()
        .zip(&table.shift)
        .map(|(&x, &s)| x - map.lorentzian(delta_pc, s))
        .collect();
    let coarse: Vec<f64> = h.iter().step_by(2).copied().collect();
    let (nc, nf) = (count_crossings(&coarse), count_crossings(&h));
    if nf != nc {
        return Solve::Unresolved {
            coarse: nc,
            fine: nf,
        };
    }

    let residual = |x: f64| x - map.lorentzian(delta_pc, map.shift(x));
    let mut roots = Vec::new();
    for i in 0..h.len() {
        if h[i] == 0.0 {
            roots.push(table.n_bar[i]);
        } else if i + 1 < h.len() && h[i] * h[i + 1] < 0.0 {
            roots.push(bisect(&residual, table.n_bar[i], table.n_bar[i + 1], h[i]));
        }
    }

    let step = 1e-4 * n_max;
    let states = roots
        .into_iter()
        .map(|r| {
            let lo = (r - step).max(0.0);
            let hi = (r + step).min(n_max);
            let slope = (residual(hi) - residual(lo)) / (hi - lo);
            map.state(delta_pc, r, slope > 0.0)
        })
        .collect();
    Solve::Roots(states)
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    let tol = 4.0 * f64::EPSILON * b.abs().max(a.abs());
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fa < 0.0) == (fm < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Fixed-point solver bound to one system, reusable across probe detunings.
pub struct FixedPointSolver {
    map: ResponseMap,
    opts: SolverOptions,
    base: ShiftTable,
    refined: OnceLock<ShiftTable>,
}

impl FixedPointSolver {
    pub fn new(sys: &System, opts: &SolverOptions) -> Result<Self> {
        if opts.grid_points < 2 {
            return Err(Error::invariant(
                "grid_points",
                opts.grid_points as f64,
                "must be >= 2",
            ));
        }
        let map = ResponseMap::new(sys, opts)?;
        let base = ShiftTable::build(&map, opts.grid_points, opts.exec);
        Ok(FixedPointSolver {
            map,
            opts: *opts,
            base,
            refined: OnceLock::new(),
        })
    }

    pub fn map(&self) -> &ResponseMap {
        &self.map
    }

    /// All fixed points at probe detuning `delta_pc`, ordered by n̄.
    pub fn solve(&self, delta_pc: f64) -> Result<Vec<SteadyState>> {
        match solve_on_table(&self.map, &self.base, delta_pc) {
            Solve::Roots(r) => Ok(r),
            Solve::Unresolved { .. } => {
                let table = self.refined.get_or_init(|| {
                    ShiftTable::build(
                        &self.map,
                        10 * self.opts.grid_points,
                        self.opts.exec.inner(),
                    )
                });
                match solve_on_table(&self.map, table, delta_pc) {
                    Solve::Roots(r) => Ok(r),
                    Solve::Unresolved { coarse, fine } => {
                        Err(Error::GridTooCoarse { coarse, fine })
                    }
                }
            }
        }
    }

    /// Stable fixed points only, ordered by n̄.
    pub fn stable(&self, delta_pc: f64) -> Result<Vec<f64>> {
        Ok(self
            .solve(delta_pc)?
            .into_iter()
            .filter(|s| s.stable)
            .map(|s| s.n_bar)
            .collect())
    }
}

/// All solutions of n̄ = G(n̄) on [0, n_max] at the system's probe detuning.
pub fn fixed_points(sys: &System, opts: &SolverOptions) -> Result<Vec<SteadyState>> {
    FixedPointSolver::new(sys, opts)?.solve(sys.drive.delta_pc)
}

/// |n̄ − n_max/(1 + Δ²/κ²)|, recomputing Δ from n̄ rather than trusting
/// the stored `delta_eff`.
pub fn residual(sys: &System, opts: &SolverOptions, state: &SteadyState) -> Result<f64> {
    let map = ResponseMap::new(sys, opts)?;
    Ok((state.n_bar - map.eval(state.n_bar)).abs())
}

pub fn residual_tolerance(sys: &System, opts: &SolverOptions) -> f64 {
    opts.tol_abs + opts.tol_rel * sys.drive.n_max
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chirp {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSample {
    pub delta_pc: f64,
    pub n_bar: f64,
    pub branch_id: u32,
    pub jumped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTrace {
    pub samples: Vec<SweepSample>,
    pub direction: Chirp,
}

impl SweepTrace {
    /// Detunings at which the trace jumped between branches.
    pub fn jumps(&self) -> Vec<f64> {
        self.samples
            .iter()
            .filter(|s| s.jumped)
            .map(|s| s.delta_pc)
            .collect()
    }
}

/// `steps` evenly spaced detunings from `lo` to `hi`, ordered for `direction`.
pub fn detuning_grid(lo: f64, hi: f64, steps: usize, direction: Chirp) -> Vec<f64> {
    let n = steps.max(2);
    let mut g: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();
    if direction == Chirp::Negative {
        g.reverse();
    }
    g
}

/// Roots at one detuning, split by stability.
struct Snapshot {
    stable: Vec<f64>,
    unstable: Vec<f64>,
}

impl Snapshot {
    fn take(solver: &FixedPointSolver, delta_pc: f64) -> Result<Self> {
        let roots = solver.solve(delta_pc)?;
        let (s, u): (Vec<_>, Vec<_>) = roots.into_iter().partition(|r| r.stable);
        Ok(Snapshot {
            stable: s.into_iter().map(|r| r.n_bar).collect(),
            unstable: u.into_iter().map(|r| r.n_bar).collect(),
        })
    }
}

fn nearest(candidates: &[f64], target: f64) -> f64 {
    // Ties resolve toward lower n̄: candidates are sorted ascending and only
    // a strictly closer one replaces the incumbent.
    let mut best = candidates[0];
    for &c in &candidates[1..] {
        if (c - target).abs() < (best - target).abs() {
            best = c;
        }
    }
    best
}

/// Advances the branch-following state from `prev` to `next`. Returns the new
/// n̄ and whether the previous branch ceased to exist.
fn follow(prev: &Snapshot, state: f64, next: &Snapshot) -> (f64, bool) {
    let lost = prev.stable.len().saturating_sub(next.stable.len());
    if lost > 0 {
        // A stable branch disappears by merging with an unstable one, so
        // the vanished branches are those closest to an unstable root.
        let mut gaps: Vec<(f64, f64)> = prev
            .stable
            .iter()
            .map(|&s| {
                let gap = prev
                    .unstable
                    .iter()
                    .map(|&u| (u - s).abs())
                    .fold(f64::INFINITY, f64::min);
                (gap, s)
            })
            .collect();
        gaps.sort_by(|a, b| a.0.total_cmp(&b.0));
        let vanished = gaps.iter().take(lost).any(|&(_, s)| s == state);
        return (nearest(&next.stable, state), vanished);
    }
    if prev.stable.len() == next.stable.len() {
        // Roots of a scalar map never cross; rank identifies the branch.
        let rank = prev.stable.iter().position(|&s| s == state).unwrap_or(0);
        return (next.stable[rank], false);
    }
    (nearest(&next.stable, state), false)
}

const SUBSTEPS: usize = 16;

/// Quasi-static swept-probe lineshape: follow the stable branch connected
/// to the previous sample, jumping only when that branch ends at a fold.
pub fn sweep_lineshape(
    sys: &System,
    detunings: &[f64],
    direction: Chirp,
    opts: &SolverOptions,
) -> Result<SweepTrace> {
    if detunings.is_empty() {
        return Ok(SweepTrace {
            samples: Vec::new(),
            direction,
        });
    }
    for w in detunings.windows(2) {
        let ok = match direction {
            Chirp::Positive => w[1] > w[0],
            Chirp::Negative => w[1] < w[0],
        };
        if !ok {
            return Err(Error::invariant(
                "detunings",
                w[1],
                "grid must be strictly monotone in the chirp direction",
            ));
        }
    }
    let solver = FixedPointSolver::new(sys, opts)?;
    let snaps: Vec<Snapshot> = opts
        .exec
        .map(detunings, |&d| Snapshot::take(&solver, d))
        .into_iter()
        .collect::<Result<_>>()?;

    let mut state = snaps[0].stable[0];
    let mut branch = 0u32;
    let mut samples = Vec::with_capacity(detunings.len());
    samples.push(SweepSample {
        delta_pc: detunings[0],
        n_bar: state,
        branch_id: branch,
        jumped: false,
    });

    for i in 1..detunings.len() {
        let (prev, next) = (&snaps[i - 1], &snaps[i]);
        let (n_bar, jumped) = if prev.stable.len() == next.stable.len()
            && prev.unstable.len() == next.unstable.len()
        {
            follow(prev, state, next)
        } else {
            // A fold lies between the samples; walk through it in substeps.
            let (a, b) = (detunings[i - 1], detunings[i]);
            let mut s = state;
            let mut any = false;
            let mut last = Snapshot {
                stable: prev.stable.clone(),
                unstable: prev.unstable.clone(),
            };
            for k in 1..=SUBSTEPS {
                let cur = if k == SUBSTEPS {
                    Snapshot {
                        stable: next.stable.clone(),
                        unstable: next.unstable.clone(),
                    }
                } else {
                    Snapshot::take(&solver, a + (b - a) * k as f64 / SUBSTEPS as f64)?
                };
                let (ns, j) = follow(&last, s, &cur);
                s = ns;
                any |= j;
                last = cur;
            }
            (s, any)
        };
        if jumped {
            branch += 1;
        }
        state = n_bar;
        samples.push(SweepSample {
            delta_pc: detunings[i],
            n_bar,
            branch_id: branch,
            jumped,
        });
    }
    Ok(SweepTrace { samples, direction })
}

/// Largest deviation of a trace from the low-power Lorentzian centred on
/// the unperturbed atom-shifted resonance Δ_N(0).
pub fn lineshape_departure(sys: &System, trace: &SweepTrace, opts: &SolverOptions) -> Result<f64> {
    let map = ResponseMap::new(sys, opts)?;
    let s0 = map.shift(0.0);
    Ok(trace
        .samples
        .iter()
        .map(|s| (s.n_bar - map.lorentzian(s.delta_pc, s0)).abs())
        .fold(0.0, f64::max))
}

/// Maximal detuning intervals (lo, hi) inside `range` with at least two
/// stable fixed points. Endpoints are bisected to 10⁻³·κ.
pub fn bistability_region(
    sys: &System,
    range: (f64, f64),
    opts: &SolverOptions,
) -> Result<Vec<(f64, f64)>> {
    let (lo, hi) = if range.0 <= range.1 {
        range
    } else {
        (range.1, range.0)
    };
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::invariant("range", lo, "must be finite"));
    }
    let solver = FixedPointSolver::new(sys, opts)?;
    let grid = detuning_grid(lo, hi, opts.region_scan_points, Chirp::Positive);
    let bistable = |d: f64| -> Result<bool> { Ok(solver.stable(d)?.len() >= 2) };
    let flags: Vec<bool> = opts
        .exec
        .map(&grid, |&d| bistable(d))
        .into_iter()
        .collect::<Result<_>>()?;

    let resolution = 1e-3 * sys.params.kappa;
    // Returns the boundary between a point with flag `fa` and one without.
    let edge = |mut a: f64, mut b: f64, fa: bool| -> Result<f64> {
        while (b - a).abs() > resolution {
            let m = 0.5 * (a + b);
            if bistable(m)? == fa {
                a = m;
            } else {
                b = m;
            }
        }
        Ok(0.5 * (a + b))
    };

    let mut out = Vec::new();
    let mut i = 0;
    while i < grid.len() {
        if !flags[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < grid.len() && flags[i + 1] {
            i += 1;
        }
        let a = if start == 0 {
            grid[0]
        } else {
            edge(grid[start], grid[start - 1], true)?
        };
        let b = if i + 1 == grid.len() {
            grid[i]
        } else {
            edge(grid[i], grid[i + 1], true)?
        };
        out.push((a, b));
        i += 1;
    }
    Ok(out)
}

/// The system with `fraction` of its atoms removed, for modelling loss
/// between successive sweeps.
pub fn with_atom_loss(sys: &System, fraction: f64) -> Result<System> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::invariant("atom_loss", fraction, "must be in [0, 1)"));
    }
    Ok(sys.with_n_atoms(sys.ensemble.n_atoms * (1.0 - fraction)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::hz_to_rad;
    use crate::params::{default_rb87_params, EnsembleConfig, ProbeDrive};
    use std::f64::consts::{FRAC_PI_4, PI};

    fn hysteresis_setup(phi0: f64, n_max: f64) -> System {
        let p = default_rb87_params();
        let e = EnsembleConfig::new(&p, 5400.0, phi0, hz_to_rad(32e3)).unwrap();
        let d = ProbeDrive::new(hz_to_rad(-14e9), 0.0, n_max).unwrap();
        System::new(p, e, d).unwrap()
    }

    #[test]
    fn empty_cavity_single_lorentzian_root() {
        let s = hysteresis_setup(FRAC_PI_4, 2.0)
            .with_n_atoms(0.0)
            .with_delta_pc(1.3 * 2.0 * PI * 1.8e6);
        let g = response_map(&s, 0.0).unwrap();
        assert_eq!(g, response_map(&s, 1.7).unwrap());
        let roots = fixed_points(&s, &SolverOptions::default()).unwrap();
        assert_eq!(roots.len(), 1);
        assert!(roots[0].stable);
        assert!((roots[0].n_bar - 2.0 / (1.0 + 1.3f64.powi(2))).abs() < 1e-12);
    }

    #[test]
    fn zero_drive() {
        let s = hysteresis_setup(FRAC_PI_4, 0.0);
        let roots = fixed_points(&s, &SolverOptions::default()).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].n_bar, 0.0);
    }

    #[test]
    fn response_map_bounded() {
        let s = hysteresis_setup(0.6, 3.0);
        for i in 0..50 {
            let g = response_map(&s, i as f64 * 0.06).unwrap();
            assert!((0.0..=3.0).contains(&g));
        }
        assert!(response_map(&s, -1.0).is_err());
    }

    #[test]
    fn roots_satisfy_residual() {
        let opts = SolverOptions::default();
        let base = hysteresis_setup(FRAC_PI_4, 1.5);
        let s0 = ResponseMap::new(&base, &opts).unwrap().shift(0.0);
        for k in -10..=10 {
            let s = base.with_delta_pc(s0 + k as f64 * 0.5 * base.params.kappa);
            let roots = fixed_points(&s, &opts).unwrap();
            assert_eq!(roots.len() % 2, 1);
            for r in &roots {
                assert!(residual(&s, &opts, r).unwrap() <= residual_tolerance(&s, &opts));
                assert!(r.n_bar >= 0.0 && r.n_bar <= 1.5);
            }
        }
    }

    #[test]
    fn monotone_grid_required() {
        let s = hysteresis_setup(FRAC_PI_4, 0.1);
        let g = detuning_grid(-1e7, 1e7, 10, Chirp::Positive);
        assert!(sweep_lineshape(&s, &g, Chirp::Negative, &SolverOptions::default()).is_err());
    }

    #[test]
    fn follow_rules() {
        let snap = |s: &[f64], u: &[f64]| Snapshot {
            stable: s.to_vec(),
            unstable: u.to_vec(),
        };
        // lower branch merges with the unstable root
        let prev = snap(&[0.30, 0.9], &[0.32]);
        let next = snap(&[0.85], &[]);
        assert_eq!(follow(&prev, 0.30, &next), (0.85, true));
        assert_eq!(follow(&prev, 0.9, &next), (0.85, false));
        // same count keeps rank even if the other branch is closer
        let prev = snap(&[0.1, 0.9], &[0.5]);
        let next = snap(&[0.12, 0.45], &[0.3]);
        assert_eq!(follow(&prev, 0.9, &next), (0.45, false));
    }

    #[test]
    fn atom_loss_bounds() {
        let s = hysteresis_setup(0.0, 1.0);
        assert!(with_atom_loss(&s, 1.0).is_err());
        let l = with_atom_loss(&s, 0.02).unwrap();
        assert!((l.ensemble.n_atoms - 5292.0).abs() < 1e-9);
    }
}
