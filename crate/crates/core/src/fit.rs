//! Least-squares fit of y = A + B·cos(2πx/period + c) with free period.

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinusoidFit {
    pub offset: f64,
    /// Non-negative amplitude B.
    pub amplitude: f64,
    pub phase: f64,
    pub period: f64,
    /// B/|A|; NaN for a zero offset.
    pub contrast: f64,
    pub rms_residual: f64,
}

/// Linear part for a fixed angular wavenumber: returns (A, P, Q, sse) for
/// y ≈ A + P cos(qx) + Q sin(qx).
fn linear_fit(xs: &[f64], ys: &[f64], q: f64) -> Option<(f64, f64, f64, f64)> {
    let mut m = [[0.0f64; 3]; 3];
    let mut v = [0.0f64; 3];
    for (&x, &y) in xs.iter().zip(ys) {
        let b = [1.0, (q * x).cos(), (q * x).sin()];
        for i in 0..3 {
            v[i] += b[i] * y;
            for j in 0..3 {
                m[i][j] += b[i] * b[j];
            }
        }
    }
    let c = solve3(m, v)?;
    let sse = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = y - c[0] - c[1] * (q * x).cos() - c[2] * (q * x).sin();
            r * r
        })
        .sum();
    Some((c[0], c[1], c[2], sse))
}

fn solve3(mut m: [[f64; 3]; 3], mut v: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        v.swap(col, piv);
        for r in 0..3 {
            if r != col {
                let f = m[r][col] / m[col][col];
                let pivot = m[col];
                for (x, p) in m[r].iter_mut().zip(pivot).skip(col) {
                    *x -= f * p;
                }
                v[r] -= f * v[col];
            }
        }
    }
    Some([v[0] / m[0][0], v[1] / m[1][1], v[2] / m[2][2]])
}

/// Fits a sinusoid of unknown period. The period is searched over
/// [`min_period`, `max_period`] by a log-spaced scan followed by
/// golden-section refinement of the residual.
pub fn fit_sinusoid(
    xs: &[f64],
    ys: &[f64],
    min_period: f64,
    max_period: f64,
) -> Option<SinusoidFit> {
    if xs.len() < 4 || xs.len() != ys.len() || !(min_period > 0.0 && max_period > min_period) {
        return None;
    }
    let sse_at = |period: f64| linear_fit(xs, ys, 2.0 * PI / period).map_or(f64::INFINITY, |f| f.3);

    let n_scan = 400;
    let ratio = (max_period / min_period).ln();
    let periods: Vec<f64> = (0..n_scan)
        .map(|i| min_period * (ratio * i as f64 / (n_scan - 1) as f64).exp())
        .collect();
    let sses: Vec<f64> = periods.iter().map(|&p| sse_at(p)).collect();
    let best = (0..n_scan).min_by(|&a, &b| sses[a].total_cmp(&sses[b]))?;
    let mut a = periods[best.saturating_sub(1)];
    let mut b = periods[(best + 1).min(n_scan - 1)];

    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (sse_at(c), sse_at(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-13 * b.abs() {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = sse_at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = sse_at(d);
        }
    }
    let period = 0.5 * (a + b);
    let (offset, p, q, sse) = linear_fit(xs, ys, 2.0 * PI / period)?;
    let amplitude = p.hypot(q);
    Some(SinusoidFit {
        offset,
        amplitude,
        phase: (-q).atan2(p),
        period,
        contrast: if offset == 0.0 {
            f64::NAN
        } else {
            amplitude / offset.abs()
        },
        rms_residual: (sse / xs.len() as f64).sqrt(),
    })
}
