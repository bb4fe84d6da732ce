//! Test-only oracles and fixtures, independent of the solver code paths
//! they check.

#![allow(dead_code)]

use optomech::constants::hz_to_rad;
use optomech::params::{default_rb87_params, EnsembleConfig, ProbeDrive, System};
use optomech::steady_state::ResponseMap;

/// Bistable reference system: N = 5400, Δ_ca/2π = −14 GHz, ω_z/2π = 32 kHz.
pub fn hysteresis_setup(phi0: f64, n_max: f64, sigma_spread: f64) -> System {
    let p = default_rb87_params();
    let e = EnsembleConfig::new(&p, 5400.0, phi0, hz_to_rad(32e3))
        .unwrap()
        .with_sigma_spread(sigma_spread)
        .unwrap();
    let d = ProbeDrive::new(hz_to_rad(-14e9), 0.0, n_max).unwrap();
    System::new(p, e, d).unwrap()
}

pub fn system(n_atoms: f64, phi0: f64, omega_z_hz: f64, delta_ca_hz: f64, n_max: f64) -> System {
    let p = default_rb87_params();
    let e = EnsembleConfig::new(&p, n_atoms, phi0, hz_to_rad(omega_z_hz)).unwrap();
    let d = ProbeDrive::new(hz_to_rad(delta_ca_hz), 0.0, n_max).unwrap();
    System::new(p, e, d).unwrap()
}

#[derive(Debug, Clone, Copy)]
pub struct ScanRoot {
    pub n_bar: f64,
    /// n̄ − G(n̄) crosses upward.
    pub stable: bool,
}

/// Brute-force root scan of n̄ − G(n̄) on `points` uniform samples, each
/// bracket refined by Illinois regula falsi. Stability is read off the
/// direction of the sign change.
pub fn scan_roots(map: &ResponseMap, points: usize) -> Vec<ScanRoot> {
    let n_max = map.system().drive.n_max;
    let h = |x: f64| x - map.eval(x);
    let xs: Vec<f64> = (0..points)
        .map(|i| n_max * i as f64 / (points - 1) as f64)
        .collect();
    let hs: Vec<f64> = xs.iter().map(|&x| h(x)).collect();
    let mut out = Vec::new();
    for i in 0..points - 1 {
        if hs[i] == 0.0 {
            out.push(ScanRoot {
                n_bar: xs[i],
                stable: hs.get(i + 1).is_some_and(|&v| v > 0.0),
            });
        } else if hs[i] * hs[i + 1] < 0.0 {
            out.push(ScanRoot {
                n_bar: illinois(&h, xs[i], xs[i + 1], hs[i], hs[i + 1]),
                stable: hs[i] < 0.0,
            });
        }
    }
    if hs[points - 1] == 0.0 {
        out.push(ScanRoot {
            n_bar: xs[points - 1],
            stable: hs[points - 2] < 0.0,
        });
    }
    out
}

fn illinois(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64) -> f64 {
    let mut side = 0;
    for _ in 0..100 {
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = f(c);
        if fc == 0.0 || (b - a).abs() < 1e-15 * b.abs().max(1e-300) {
            return c;
        }
        if fc * fb < 0.0 {
            a = b;
            fa = fb;
            side = 0;
        } else {
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
        b = c;
        fb = fc;
    }
    b
}

/// Prints one acceptance line and returns the verdict.
pub fn report(id: u32, name: &str, pass: bool, detail: &str) -> bool {
    println!(
        "[{}] criterion {id}: {name} :: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}
