//! Peak detection, widths and per-peak powers.

use serde::{Deserialize, Serialize};

use super::{incoherent_power, trapezoid, SpectralDensity, SpectrumResult};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PeakOptions {
    /// Minimum prominence, relative to the highest sample.
    pub min_prominence: f64,
}

impl Default for PeakOptions {
    fn default() -> Self {
        PeakOptions {
            min_prominence: 1e-3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub location: f64,
    pub height: f64,
    /// `None` when the half-maximum is not reached inside the peak's basin.
    pub fwhm: Option<f64>,
    /// Integral between the flanking minima.
    pub power: f64,
    pub prominence: f64,
    /// Grid index of the sampled maximum.
    pub index: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PeakTable {
    pub peaks: Vec<Peak>,
    pub incoherent_power: f64,
    pub coherent_weight: f64,
    pub total_power: f64,
}

impl PeakTable {
    /// The detected peak closest to `omega`, if within `tolerance`.
    pub fn nearest(&self, omega: f64, tolerance: f64) -> Option<&Peak> {
        self.peaks
            .iter()
            .filter(|p| (p.location - omega).abs() <= tolerance)
            .min_by(|a, b| (a.location - omega).abs().total_cmp(&(b.location - omega).abs()))
    }
}

/// Peaks from the samples alone: parabolic vertices and interpolated widths.
pub fn peak_analysis(result: &SpectrumResult, options: &PeakOptions) -> Result<PeakTable> {
    analyse(result, options, None)
}

/// Like [`peak_analysis`], refining location, height and half-maximum
/// crossings on the underlying density.
pub fn peak_analysis_with<D: SpectralDensity + ?Sized>(
    result: &SpectrumResult,
    density: &D,
    options: &PeakOptions,
) -> Result<PeakTable> {
    let f = |w: f64| density.incoherent(w).value.max(0.0);
    analyse(result, options, Some(&f))
}

type Eval<'a> = Option<&'a dyn Fn(f64) -> f64>;

fn local_maxima(y: &[f64]) -> Vec<usize> {
    let n = y.len();
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if y[i] > y[i - 1] {
            let mut j = i;
            while j + 1 < n && y[j + 1] == y[i] {
                j += 1;
            }
            if j + 1 < n && y[j + 1] < y[i] {
                out.push((i + j) / 2);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

fn prominence(y: &[f64], i: usize) -> f64 {
    let h = y[i];
    let mut left = h;
    for &v in y[..i].iter().rev() {
        if v > h {
            break;
        }
        left = left.min(v);
    }
    let mut right = h;
    for &v in &y[i + 1..] {
        if v > h {
            break;
        }
        right = right.min(v);
    }
    h - left.max(right)
}

fn argmin(y: &[f64], lo: usize, hi: usize) -> usize {
    (lo..=hi).min_by(|&a, &b| y[a].total_cmp(&y[b])).unwrap_or(lo)
}

fn parabola_vertex(x: &[f64], y: &[f64], i: usize) -> (f64, f64) {
    let (x0, x1, x2) = (x[i - 1], x[i], x[i + 1]);
    let (y0, y1, y2) = (y[i - 1], y[i], y[i + 1]);
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let a = (d12 - d01) / (x2 - x0);
    if !(a < 0.0) {
        return (x1, y1);
    }
    let b = d01 - a * (x0 + x1);
    let xv = (-b / (2.0 * a)).clamp(x0, x2);
    let yv = y1 + (xv - x1) * (d01 + a * (xv - x0));
    (xv, yv.max(y1))
}

fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-14 * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Crossing of `level` between `a` (value `ya`) and `b` (value `yb`).
fn crossing(a: f64, ya: f64, b: f64, yb: f64, level: f64, eval: Eval) -> f64 {
    match eval {
        None => a + (level - ya) * (b - a) / (yb - ya),
        Some(f) => {
            let (mut lo, mut hi) = (a, b);
            let below_at_lo = ya < level;
            for _ in 0..200 {
                let m = 0.5 * (lo + hi);
                if m <= lo || m >= hi {
                    break;
                }
                if (f(m) < level) == below_at_lo {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            0.5 * (lo + hi)
        }
    }
}

fn analyse(result: &SpectrumResult, options: &PeakOptions, eval: Eval) -> Result<PeakTable> {
    let x = result.omegas();
    let y = result.values();
    let incoherent = incoherent_power(result)?;
    let mut table = PeakTable {
        peaks: Vec::new(),
        incoherent_power: incoherent,
        coherent_weight: result.coherent_weight,
        total_power: result.coherent_weight + incoherent,
    };
    let ymax = y.iter().copied().fold(0.0, f64::max);
    if ymax <= 0.0 {
        return Ok(table);
    }
    let threshold = options.min_prominence * ymax;
    let idx: Vec<(usize, f64)> = local_maxima(&y)
        .into_iter()
        .map(|i| (i, prominence(&y, i)))
        .filter(|&(_, p)| p >= threshold)
        .collect();
    let n = y.len();
    for (k, &(i, prom)) in idx.iter().enumerate() {
        let lb = if k == 0 { 0 } else { argmin(&y, idx[k - 1].0, i) };
        let rb = if k + 1 == idx.len() {
            n - 1
        } else {
            argmin(&y, i, idx[k + 1].0)
        };
        let (location, height) = match eval {
            Some(f) => {
                let (loc, h) = golden_max(f, x[i - 1], x[i + 1]);
                if h >= y[i] {
                    (loc, h)
                } else {
                    (x[i], y[i])
                }
            }
            None => parabola_vertex(&x, &y, i),
        };
        let half = 0.5 * height;
        let left = (lb..i)
            .rev()
            .find(|&j| y[j] < half)
            .map(|j| crossing(x[j], y[j], x[j + 1], y[j + 1], half, eval));
        let right = (i + 1..=rb)
            .find(|&j| y[j] < half)
            .map(|j| crossing(x[j - 1], y[j - 1], x[j], y[j], half, eval));
        let fwhm = match (left, right) {
            (Some(l), Some(r)) => Some(r - l),
            _ => None,
        };
        table.peaks.push(Peak {
            location,
            height,
            fwhm,
            power: trapezoid(&x[lb..=rb], &y[lb..=rb]),
            prominence: prom,
            index: i,
        });
    }
    Ok(table)
}
