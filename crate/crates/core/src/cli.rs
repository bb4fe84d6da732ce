//! Command-line driver: one subcommand per observable.
//!
//! Each run writes its CSV tables next to two sidecars: the resolved
//! configuration (`<command>.config.toml`) and a manifest
//! (`<command>.manifest.json`). Only the manifest records wall-clock time,
//! so identical inputs give byte-identical CSVs.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::config::{load_config_file, Config};
use crate::constants::{hz_to_rad, rad_to_hz};
use crate::ensemble::{contrast, phase_at_position, static_ensemble_shift};
use crate::error::{Error, Result};
use crate::fit::{fit_sinusoid, SinusoidFit};
use crate::mechanics::{curvature_ratio, mode_frequencies};
use crate::spectra::{gain_spectrum, linear_grid, parametric_loss_curve, SpectrumTrace};
use crate::steady_state::{
    bistability_region, detuning_grid, sweep_lineshape, with_atom_loss, Chirp, ResponseMap,
    SweepTrace,
};

#[derive(Debug, Parser)]
#[command(
    name = "optomech",
    version,
    about = "Cavity optomechanics with a trapped atomic ensemble"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Configuration file (flat TOML key-value document)
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Number of grid points
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChirpArg {
    Both,
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpectrumMode {
    Psd,
    Parametric,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Static cavity shift versus ensemble position
    ShiftVsPosition {
        #[command(flatten)]
        common: Common,
        /// Ensemble displacement range LO:HI in metres
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        range: Option<(f64, f64)>,
    },
    /// Swept-probe lineshapes for positive and negative chirps
    Lineshape {
        #[command(flatten)]
        common: Common,
        /// Probe detuning range LO:HI in Hz
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        range: Option<(f64, f64)>,
        #[arg(long, value_enum, default_value = "both")]
        chirp: ChirpArg,
    },
    /// Probe-induced cavity shift versus curvature ratio at fixed n̄
    ShiftVsEta {
        #[command(flatten)]
        common: Common,
        /// Intracavity photon number range LO:HI
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        range: Option<(f64, f64)>,
        /// Comma-separated ensemble phases in radians
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        phi0: Option<Vec<f64>>,
    },
    /// Static and linear-mode frequencies versus ensemble phase
    FrequencyShifts {
        #[command(flatten)]
        common: Common,
        /// Comma-separated ensemble phases in radians
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        phi0: Option<Vec<f64>>,
        /// Optional Δ sweep LO:HI in Hz at φ0 = π/4
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        range: Option<(f64, f64)>,
    },
    /// Gain spectrum or parametric-loss curve
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Frequency range LO:HI in Hz
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        range: Option<(f64, f64)>,
        #[arg(long, value_enum, default_value = "psd")]
        mode: SpectrumMode,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::ShiftVsPosition { .. } => "shift-vs-position",
            Command::Lineshape { .. } => "lineshape",
            Command::ShiftVsEta { .. } => "shift-vs-eta",
            Command::FrequencyShifts { .. } => "frequency-shifts",
            Command::Spectrum { .. } => "spectrum",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::ShiftVsPosition { common, .. }
            | Command::Lineshape { common, .. }
            | Command::ShiftVsEta { common, .. }
            | Command::FrequencyShifts { common, .. }
            | Command::Spectrum { common, .. } => common,
        }
    }
}

pub fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected LO:HI, got `{s}`"))?;
    let lo: f64 = lo
        .trim()
        .parse()
        .map_err(|e| format!("bad LO `{lo}`: {e}"))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .map_err(|e| format!("bad HI `{hi}`: {e}"))?;
    if !(lo.is_finite() && hi.is_finite()) || lo == hi {
        return Err(format!("range `{s}` must be finite with LO != HI"));
    }
    Ok((lo, hi))
}

fn steps(common: &Common, default: usize) -> Result<usize> {
    match common.steps {
        Some(n) if n < 2 => Err(Error::Usage(format!("--steps must be >= 2, got {n}"))),
        Some(n) => Ok(n),
        None => Ok(default),
    }
}

/// One emitted data file.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub csv: String,
}

#[derive(Debug, Clone)]
pub struct Output {
    pub tables: Vec<Table>,
    pub extra: serde_json::Value,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: String,
    pub outputs: Vec<String>,
    pub solver: SolverSnapshot,
    pub wall_clock_seconds: f64,
    pub summary: serde_json::Value,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SolverSnapshot {
    pub fp_grid_points: usize,
    pub region_scan_points: usize,
    pub tol_abs: f64,
    pub tol_rel: f64,
    pub sigma_cap_m: Option<f64>,
}

fn csv_header(cols: &[&str]) -> String {
    let mut s = cols.join(",");
    s.push('\n');
    s
}

fn row(out: &mut String, vals: &[String]) {
    out.push_str(&vals.join(","));
    out.push('\n');
}

fn num(x: f64) -> String {
    format!("{x}")
}

#[derive(Debug, Clone, Copy)]
pub struct PositionScan {
    pub fit: SinusoidFit,
    pub analytic_period: f64,
    pub analytic_contrast: f64,
}

/// Low-power cavity shift versus ensemble displacement z0, with a sinusoid fit.
pub fn shift_vs_position(
    cfg: &Config,
    range: Option<(f64, f64)>,
    steps: usize,
) -> Result<(Output, PositionScan)> {
    let sys = cfg.system;
    let p = sys.params;
    let (lo, hi) = range.unwrap_or((0.0, 2.0 * p.position_period()));
    let zs = linear_grid(lo, hi, steps);
    let shifts: Vec<f64> = cfg
        .run
        .solver
        .exec
        .map(&zs, |&z| {
            static_ensemble_shift(&sys.with_phi0(phase_at_position(&p, sys.ensemble.phi0, z)))
        })
        .into_iter()
        .collect::<Result<_>>()?;

    let mut csv = csv_header(&["z0_m", "shift_hz"]);
    for (z, s) in zs.iter().zip(&shifts) {
        row(&mut csv, &[num(*z), num(rad_to_hz(*s))]);
    }

    let span = (hi - lo).abs();
    let dz = span / (steps - 1) as f64;
    let shifts_hz: Vec<f64> = shifts.iter().map(|&s| rad_to_hz(s)).collect();
    let fit = fit_sinusoid(&zs, &shifts_hz, 4.0 * dz, 4.0 * span)
        .ok_or_else(|| Error::Usage("not enough points to fit a sinusoid".into()))?;
    let scan = PositionScan {
        fit,
        analytic_period: p.position_period(),
        analytic_contrast: contrast(&p, sys.ensemble.sigma_site, sys.ensemble.sigma_spread),
    };
    let mut summary = csv_header(&[
        "period_m",
        "contrast",
        "offset_hz",
        "amplitude_hz",
        "analytic_period_m",
        "analytic_contrast",
    ]);
    row(
        &mut summary,
        &[
            num(fit.period),
            num(fit.contrast),
            num(fit.offset),
            num(fit.amplitude),
            num(scan.analytic_period),
            num(scan.analytic_contrast),
        ],
    );
    let extra = serde_json::json!({
        "fitted_period_m": fit.period,
        "fitted_contrast": finite_or_null(fit.contrast),
        "analytic_period_m": scan.analytic_period,
        "analytic_contrast": scan.analytic_contrast,
    });
    Ok((
        Output {
            tables: vec![
                Table {
                    name: "shift-vs-position".into(),
                    csv,
                },
                Table {
                    name: "shift-vs-position-fit".into(),
                    csv: summary,
                },
            ],
            extra,
        },
        scan,
    ))
}

fn finite_or_null(x: f64) -> serde_json::Value {
    if x.is_finite() {
        serde_json::json!(x)
    } else {
        serde_json::Value::Null
    }
}

#[derive(Debug, Clone)]
pub struct LineshapeRun {
    pub up: Option<SweepTrace>,
    pub down: Option<SweepTrace>,
    /// Bistable intervals, rad/s.
    pub bistable: Vec<(f64, f64)>,
}

/// Default probe range: the unperturbed atom-shifted resonance ± 10κ.
pub fn default_lineshape_range(cfg: &Config) -> Result<(f64, f64)> {
    let s0 = static_ensemble_shift(&cfg.system)?;
    let k = cfg.system.params.kappa;
    Ok((rad_to_hz(s0 - 10.0 * k), rad_to_hz(s0 + 10.0 * k)))
}

pub fn lineshape(
    cfg: &Config,
    range_hz: Option<(f64, f64)>,
    steps: usize,
    chirp: ChirpArg,
) -> Result<(Output, LineshapeRun)> {
    let (lo_hz, hi_hz) = match range_hz {
        Some((a, b)) => (a.min(b), a.max(b)),
        None => default_lineshape_range(cfg)?,
    };
    let (lo, hi) = (hz_to_rad(lo_hz), hz_to_rad(hi_hz));
    let opts = &cfg.run.solver;
    let sys = cfg.system;

    let up = if chirp != ChirpArg::Down {
        Some(sweep_lineshape(
            &sys,
            &detuning_grid(lo, hi, steps, Chirp::Positive),
            Chirp::Positive,
            opts,
        )?)
    } else {
        None
    };
    let down = if chirp != ChirpArg::Up {
        let lossy = if up.is_some() {
            with_atom_loss(&sys, cfg.run.atom_loss_per_sweep)?
        } else {
            sys
        };
        let mut t = sweep_lineshape(
            &lossy,
            &detuning_grid(lo, hi, steps, Chirp::Negative),
            Chirp::Negative,
            opts,
        )?;
        t.samples.reverse();
        Some(t)
    } else {
        None
    };
    let bistable = bistability_region(&sys, (lo, hi), opts)?;

    let mut cols = vec!["delta_pc_hz"];
    if up.is_some() {
        cols.extend(["n_bar_up", "branch_up", "jump_up"]);
    }
    if down.is_some() {
        cols.extend(["n_bar_down", "branch_down", "jump_down"]);
    }
    let mut csv = csv_header(&cols);
    for i in 0..steps.max(2) {
        let mut vals = Vec::new();
        let d = up
            .as_ref()
            .or(down.as_ref())
            .map(|t| t.samples[i].delta_pc)
            .unwrap_or_default();
        vals.push(num(rad_to_hz(d)));
        for t in [&up, &down].into_iter().flatten() {
            let s = t.samples[i];
            vals.push(num(s.n_bar));
            vals.push(s.branch_id.to_string());
            vals.push((s.jumped as u8).to_string());
        }
        row(&mut csv, &vals);
    }
    let jumps_hz = |t: &Option<SweepTrace>| -> Vec<f64> {
        t.as_ref()
            .map(|t| t.jumps().into_iter().map(rad_to_hz).collect())
            .unwrap_or_default()
    };
    let extra = serde_json::json!({
        "bistable_intervals_hz": bistable
            .iter()
            .map(|&(a, b)| [rad_to_hz(a), rad_to_hz(b)])
            .collect::<Vec<_>>(),
        "jumps_up_hz": jumps_hz(&up),
        "jumps_down_hz": jumps_hz(&down),
    });
    Ok((
        Output {
            tables: vec![Table {
                name: "lineshape".into(),
                csv,
            }],
            extra,
        },
        LineshapeRun { up, down, bistable },
    ))
}

/// One row of the shift-versus-η table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaPoint {
    pub phi0: f64,
    pub n_bar: f64,
    pub eta: f64,
    /// Probe-induced shift Δ_N(n̄) − Δ_N(0), rad/s.
    pub shift: f64,
}

pub const DEFAULT_PHASES: [f64; 3] = [0.0, FRAC_PI_4, FRAC_PI_2];

/// Probe-induced shift at fixed n̄ (the probe locked to the shifted
/// resonance), for each phase in `phases`.
pub fn shift_vs_eta_points(
    cfg: &Config,
    n_range: Option<(f64, f64)>,
    steps: usize,
    phases: &[f64],
) -> Result<Vec<EtaPoint>> {
    let sys = cfg.system;
    let eta1 = curvature_ratio(&sys, 1.0).abs();
    let (lo, hi) = n_range.unwrap_or((0.0, 1.0 / eta1));
    if lo < 0.0 || hi < 0.0 {
        return Err(Error::Usage(
            "photon-number range must be non-negative".into(),
        ));
    }
    let n_bars = linear_grid(lo, hi, steps);
    let mut out = Vec::with_capacity(phases.len() * n_bars.len());
    for &phi in phases {
        let s = sys.with_phi0(phi);
        let map = ResponseMap::new(&s, &cfg.run.solver)?;
        let s0 = map.shift(0.0);
        let shifts = cfg.run.solver.exec.map(&n_bars, |&n| map.shift(n) - s0);
        out.extend(n_bars.iter().zip(shifts).map(|(&n, sh)| EtaPoint {
            phi0: phi,
            n_bar: n,
            eta: curvature_ratio(&s, n),
            shift: sh,
        }));
    }
    Ok(out)
}

pub fn shift_vs_eta(
    cfg: &Config,
    n_range: Option<(f64, f64)>,
    steps: usize,
    phases: &[f64],
) -> Result<Output> {
    let pts = shift_vs_eta_points(cfg, n_range, steps, phases)?;
    let mut csv = csv_header(&["phi0_rad", "n_bar", "eta", "eta_abs", "shift_hz"]);
    for p in &pts {
        row(
            &mut csv,
            &[
                num(p.phi0),
                num(p.n_bar),
                num(p.eta),
                num(p.eta.abs()),
                num(rad_to_hz(p.shift)),
            ],
        );
    }
    Ok(Output {
        tables: vec![Table {
            name: "shift-vs-eta".into(),
            csv,
        }],
        extra: serde_json::json!({ "phases_rad": phases }),
    })
}

pub fn frequency_shifts(
    cfg: &Config,
    phases: &[f64],
    delta_range_hz: Option<(f64, f64)>,
    steps: usize,
) -> Result<Output> {
    let sys = cfg.system;
    let (n_bar, delta_eff) = (cfg.run.n_bar, cfg.run.delta_eff);
    let rows = cfg.run.solver.exec.map(phases, |&phi| {
        mode_frequencies(&sys.with_phi0(phi), n_bar, delta_eff).unwrap_or((f64::NAN, f64::NAN))
    });
    let mut csv = csv_header(&[
        "phi0_rad",
        "f_static_hz",
        "f_parametric_peak_hz",
        "f_linear_hz",
    ]);
    for (&phi, &(fs, fl)) in phases.iter().zip(&rows) {
        row(
            &mut csv,
            &[
                num(phi),
                num(rad_to_hz(fs)),
                num(rad_to_hz(2.0 * fs)),
                num(rad_to_hz(fl)),
            ],
        );
    }
    let mut tables = vec![Table {
        name: "frequency-shifts".into(),
        csv,
    }];
    if let Some((lo, hi)) = delta_range_hz {
        let deltas = linear_grid(hz_to_rad(lo), hz_to_rad(hi), steps);
        let quarter = sys.with_phi0(FRAC_PI_4);
        let mut csv = csv_header(&["delta_hz", "f_linear_hz"]);
        for &d in &deltas {
            let fl = mode_frequencies(&quarter, n_bar, d).map_or(f64::NAN, |f| f.1);
            row(&mut csv, &[num(rad_to_hz(d)), num(rad_to_hz(fl))]);
        }
        tables.push(Table {
            name: "frequency-shifts-delta".into(),
            csv,
        });
    }
    Ok(Output {
        tables,
        extra: serde_json::json!({
            "n_bar": n_bar,
            "delta_eff_hz": rad_to_hz(delta_eff),
        }),
    })
}

pub fn spectrum(
    cfg: &Config,
    range_hz: Option<(f64, f64)>,
    steps: usize,
    mode: SpectrumMode,
) -> Result<(Output, SpectrumTrace)> {
    let sys = cfg.system;
    let wz_hz = rad_to_hz(sys.ensemble.omega_z);
    let (centre, cols) = match mode {
        SpectrumMode::Psd => (wz_hz, ["freq_hz", "psd_rel"]),
        SpectrumMode::Parametric => (2.0 * wz_hz, ["mod_freq_hz", "loss_fraction"]),
    };
    let (lo, hi) = range_hz.unwrap_or((0.5 * centre, 1.5 * centre));
    let grid = linear_grid(hz_to_rad(lo), hz_to_rad(hi), steps);
    let trace = match mode {
        SpectrumMode::Psd => gain_spectrum(
            &sys,
            cfg.run.n_bar,
            cfg.run.delta_eff,
            &grid,
            cfg.run.damping,
        )?,
        SpectrumMode::Parametric => parametric_loss_curve(
            &sys,
            cfg.run.n_bar,
            &grid,
            cfg.run.loss_width,
            cfg.run.peak_loss,
        )?,
    };
    let mut csv = csv_header(&cols);
    for (&w, &r) in trace.frequency.iter().zip(&trace.response) {
        row(&mut csv, &[num(rad_to_hz(w)), num(r)]);
    }
    let extra = serde_json::json!({
        "peak_frequency_hz": rad_to_hz(trace.peak_frequency),
        "linewidth_hz": rad_to_hz(trace.linewidth),
    });
    Ok((
        Output {
            tables: vec![Table {
                name: "spectrum".into(),
                csv,
            }],
            extra,
        },
        trace,
    ))
}

/// Executes a parsed command against its config, without touching disk.
pub fn execute(command: &Command, cfg: &Config) -> Result<Output> {
    match command {
        Command::ShiftVsPosition { common, range } => {
            Ok(shift_vs_position(cfg, *range, steps(common, 201)?)?.0)
        }
        Command::Lineshape {
            common,
            range,
            chirp,
        } => Ok(lineshape(cfg, *range, steps(common, 401)?, *chirp)?.0),
        Command::ShiftVsEta {
            common,
            range,
            phi0,
        } => shift_vs_eta(
            cfg,
            *range,
            steps(common, 101)?,
            phi0.as_deref().unwrap_or(&DEFAULT_PHASES),
        ),
        Command::FrequencyShifts {
            common,
            phi0,
            range,
        } => {
            let n = steps(common, 91)?;
            let phases = match phi0 {
                Some(p) => p.clone(),
                None => linear_grid(0.0, PI, n),
            };
            frequency_shifts(cfg, &phases, *range, n)
        }
        Command::Spectrum {
            common,
            range,
            mode,
        } => Ok(spectrum(cfg, *range, steps(common, 2001)?, *mode)?.0),
    }
}

/// Runs a command and writes its CSVs, resolved config and manifest into
/// the output directory. Returns the manifest.
pub fn run(cli: &Cli) -> Result<RunManifest> {
    let start = Instant::now();
    let common = cli.command.common();
    let cfg = load_config_file(&common.config)?;
    let output = execute(&cli.command, &cfg)?;
    write_outputs(cli.command.name(), &common.out, &cfg, output, start)
}

fn write_outputs(
    name: &str,
    dir: &Path,
    cfg: &Config,
    output: Output,
    start: Instant,
) -> Result<RunManifest> {
    std::fs::create_dir_all(dir)?;
    let mut outputs = Vec::new();
    for t in &output.tables {
        let file = format!("{}.csv", t.name);
        std::fs::write(dir.join(&file), &t.csv)?;
        outputs.push(file);
    }
    let config_text = cfg.to_toml();
    let config_file = format!("{name}.config.toml");
    std::fs::write(dir.join(&config_file), &config_text)?;
    outputs.push(config_file);

    let solver = &cfg.run.solver;
    let manifest = RunManifest {
        command: name.to_string(),
        config: config_text,
        outputs,
        solver: SolverSnapshot {
            fp_grid_points: solver.grid_points,
            region_scan_points: solver.region_scan_points,
            tol_abs: solver.tol_abs,
            tol_rel: solver.tol_rel,
            sigma_cap_m: solver.sigma_cap,
        },
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        summary: output.extra,
    };
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
    let _ = writeln!(json);
    std::fs::write(dir.join(format!("{name}.manifest.json")), json)?;
    Ok(manifest)
}

/// Process exit code for an error: 2 for usage problems, 1 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Usage(_) => 2,
        _ => 1,
    }
}
