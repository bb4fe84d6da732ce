//! Frequency-shift observables: parametric-heating loss and the gain
//! spectrum of the linearly coupled mode.
//!
//! Only the resonance positions come from the optomechanical model. The
//! lineshapes are the minimal standard choices (Lorentzian loss, damped
//! oscillator susceptibility) with width and damping supplied by the caller.
//! Cavity filtering of the transmitted light is ignored since the mechanical
//! frequencies are far below κ.

use crate::error::{Error, Result};
use crate::mechanics::mode_frequencies;
use crate::params::System;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTrace {
    /// Frequency axis, rad/s.
    pub frequency: Vec<f64>,
    /// Loss fraction or relative PSD, ≥ 0.
    pub response: Vec<f64>,
    /// Grid point of maximum response, rad/s.
    pub peak_frequency: f64,
    /// Full width at half maximum, rad/s.
    pub linewidth: f64,
}

fn check_axis(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::invariant(
            "frequency grid",
            grid.len() as f64,
            "needs at least two points",
        ));
    }
    Ok(())
}

fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// FWHM from linear interpolation of the half-maximum crossings around the
/// peak; `None` if either side never drops below half maximum.
fn fwhm(axis: &[f64], response: &[f64]) -> Option<f64> {
    let i = argmax(response);
    let half = 0.5 * response[i];
    let cross = |j: usize, k: usize| {
        let (x0, x1, y0, y1) = (axis[j], axis[k], response[j], response[k]);
        x0 + (half - y0) * (x1 - x0) / (y1 - y0)
    };
    let left = (1..=i)
        .rev()
        .find(|&j| response[j - 1] < half)
        .map(|j| cross(j - 1, j))?;
    let right = (i..axis.len() - 1)
        .find(|&j| response[j + 1] < half)
        .map(|j| cross(j, j + 1))?;
    Some((right - left).abs())
}

/// Atom-loss fraction versus trap-modulation frequency: a Lorentzian of
/// FWHM `width` and height `peak_loss` centred on twice the static-spring
/// mode frequency. The dynamic spring plays no role here.
pub fn parametric_loss_curve(
    sys: &System,
    n_bar: f64,
    mod_grid: &[f64],
    width: f64,
    peak_loss: f64,
) -> Result<SpectrumTrace> {
    check_axis(mod_grid)?;
    if !(width > 0.0) {
        return Err(Error::invariant("loss_width", width, "must be > 0"));
    }
    if !(peak_loss > 0.0 && peak_loss <= 1.0) {
        return Err(Error::invariant(
            "peak_loss",
            peak_loss,
            "must be in (0, 1]",
        ));
    }
    let (f_static, _) = mode_frequencies(sys, n_bar, 0.0)?;
    let centre = 2.0 * f_static;
    let hwhm = 0.5 * width;
    let response: Vec<f64> = mod_grid
        .iter()
        .map(|&w| {
            let x = (w - centre) / hwhm;
            peak_loss / (1.0 + x * x)
        })
        .collect();
    Ok(SpectrumTrace {
        peak_frequency: mod_grid[argmax(&response)],
        linewidth: width,
        frequency: mod_grid.to_vec(),
        response,
    })
}

/// Relative PSD of transmitted-light intensity noise, ∝ |χ(ω)|² with
/// χ(ω) = 1/(f_linear² − ω² − i·damping·ω), normalised to 1 at its largest
/// grid value.
pub fn gain_spectrum(
    sys: &System,
    n_bar: f64,
    delta_eff: f64,
    grid: &[f64],
    damping: f64,
) -> Result<SpectrumTrace> {
    check_axis(grid)?;
    if !(damping > 0.0) {
        return Err(Error::invariant("damping", damping, "must be > 0"));
    }
    let (_, f_linear) = mode_frequencies(sys, n_bar, delta_eff)?;
    let f2 = f_linear * f_linear;
    let raw: Vec<f64> = grid
        .iter()
        .map(|&w| {
            let re = f2 - w * w;
            let im = damping * w;
            1.0 / (re * re + im * im)
        })
        .collect();
    let peak = raw[argmax(&raw)];
    let response: Vec<f64> = raw.iter().map(|r| r / peak).collect();
    let linewidth = fwhm(grid, &response).unwrap_or(damping);
    Ok(SpectrumTrace {
        peak_frequency: grid[argmax(&response)],
        linewidth,
        frequency: grid.to_vec(),
        response,
    })
}

/// `n` evenly spaced points from `lo` to `hi`.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::hz_to_rad;
    use crate::params::{default_rb87_params, EnsembleConfig, ProbeDrive};
    use std::f64::consts::FRAC_PI_4;

    fn spring_setup(delta_ca_hz: f64, phi0: f64) -> System {
        let p = default_rb87_params();
        let e = EnsembleConfig::new(&p, 3750.0, phi0, hz_to_rad(58.5e3)).unwrap();
        let d = ProbeDrive::new(hz_to_rad(delta_ca_hz), 0.0, 0.0).unwrap();
        System::new(p, e, d).unwrap()
    }

    #[test]
    fn bare_parametric_peak_at_twice_trap() {
        let s = spring_setup(20.1e9, 0.0);
        let wz = s.ensemble.omega_z;
        let grid = linear_grid(1.5 * wz, 2.5 * wz, 1001);
        let t = parametric_loss_curve(&s, 0.0, &grid, hz_to_rad(2e3), 0.6).unwrap();
        assert!((t.peak_frequency - 2.0 * wz).abs() < 1e-6 * wz);
        assert!(t.response.iter().all(|&r| (0.0..=0.6).contains(&r)));
    }

    #[test]
    fn bare_gain_peak_at_trap() {
        let s = spring_setup(40e9, FRAC_PI_4);
        let wz = s.ensemble.omega_z;
        let grid = linear_grid(0.8 * wz, 1.2 * wz, 4001);
        let t = gain_spectrum(&s, 0.0, -s.params.kappa, &grid, hz_to_rad(500.0)).unwrap();
        assert!((t.peak_frequency - wz).abs() <= 1e-4 * wz);
        // FWHM of a lightly damped oscillator ≈ damping
        assert!((t.linewidth / hz_to_rad(500.0) - 1.0).abs() < 0.02);
    }

    #[test]
    fn bad_inputs() {
        let s = spring_setup(40e9, FRAC_PI_4);
        let g = linear_grid(1.0, 2.0, 10);
        assert!(parametric_loss_curve(&s, 0.0, &g, 0.0, 0.5).is_err());
        assert!(parametric_loss_curve(&s, 0.0, &g, 1.0, 1.5).is_err());
        assert!(gain_spectrum(&s, 0.0, 0.0, &g, 0.0).is_err());
        assert!(gain_spectrum(&s, 0.0, 0.0, &g[..1], 1.0).is_err());
    }
}
