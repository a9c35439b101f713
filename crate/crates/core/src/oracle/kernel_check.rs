//! Kernel spectra rebuilt from the density of states, and a causality test
//! of the closed form.
//!
//! With coupling |g|² ∝ 1/ω' and DOS √(ω' − ω_c), the memory function is
//! G(τ) = C ∫ ρ(ω') e^{i(ω_a − ω')τ} dω' Θ(τ), ρ(ω') = √(ω' − ω_c)/ω',
//! C = β^{3/2}/π. Its one-sided transform is
//! G̃(ω) = −iC ∫ ρ(ω') / (ω' − ω − ω_a − i0) dω', evaluated here by
//! quadrature after the substitution ω' = ω_c + u² (which removes the
//! square-root endpoint) with the principal value done by subtraction.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quad::{adaptive, adaptive_complex};
use crate::error::{Error, Result};
use crate::kernels::g_tilde;
use crate::params::{PhysicalParams, Reservoir};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelCheckOptions {
    /// Frequencies checked on [−half_width, half_width].
    pub points: usize,
    /// Defaults to 10 ω_c.
    pub half_width: Option<f64>,
    /// Absolute quadrature tolerance, relative to β^{3/2}/√ω_c.
    pub quad_tol: f64,
    /// Gaussian window width for the inverse transform; defaults to 20 ω_c.
    pub window: Option<f64>,
}

impl Default for KernelCheckOptions {
    fn default() -> Self {
        KernelCheckOptions {
            points: 401,
            half_width: None,
            quad_tol: 1e-12,
            window: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelCheckReport {
    pub points: usize,
    /// max |G_quad − G̃| / |G̃|
    pub max_relative_residual: f64,
    pub worst_omega: f64,
    pub in_gap_points: usize,
    /// max |Re G_quad| / |G_quad| over frequencies inside the gap.
    pub in_gap_max_real_ratio: f64,
    /// max_{t ≤ −t0} |G_W(t)| / max_{t ≥ t0} |G_W(t)|
    pub causality_ratio: f64,
    pub window: f64,
    pub t0: f64,
    pub evaluations: u64,
}

/// −iC ∫ ρ/(ω' − z − i0) dω' for the band-edge density, by quadrature.
pub fn kernel_from_dos(omega: f64, params: &PhysicalParams, tol: f64) -> Result<(Complex64, u64)> {
    let Reservoir::BandEdge { beta, omega_c } = params.reservoir() else {
        return Err(Error::Unsupported {
            operation: "kernel_from_dos",
            model: "free-space",
        });
    };
    // ρ(ω')dω' = h(u) du, h(u) = 2u²/(ω_c + u²); written in r = u⁻² for the tail
    let h = |u: f64| 2.0 * u * u / (omega_c + u * u);
    let h_inv = |r: f64| 2.0 / (1.0 + omega_c * r);
    let c = beta.powf(1.5) / PI;
    let z = omega + params.omega_a();
    let a2 = omega_c - z;
    let scale = omega_c.sqrt();
    let (integral, residue, evals) = if a2 >= 0.0 {
        let f = |u: f64| h(u) / (u * u + a2);
        let big = 2.0 * scale.max(a2.sqrt());
        // u = big/t on [big, ∞)
        let g = |t: f64| {
            let r = (t / big) * (t / big);
            h_inv(r) * big / (big * big + a2 * t * t)
        };
        let q1 = adaptive(&f, 0.0, big, tol / 2.0, 30)?;
        let q2 = adaptive(&g, 0.0, 1.0, tol / 2.0, 30)?;
        (q1.value + q2.value, 0.0, q1.evaluations + q2.evaluations)
    } else {
        let u0 = (-a2).sqrt();
        // PV ∫₀^∞ du/(u² − u0²) = 0, so subtracting h(u0) leaves a regular integrand
        let h0 = h(u0);
        let d = 1e-4 * u0;
        let slope = (h(u0 + d) - h(u0 - d)) / (2.0 * d) / (2.0 * u0);
        let f = |u: f64| (h(u) - h0) / (u * u - u0 * u0);
        let big = 2.0 * u0.max(scale);
        let g = |t: f64| {
            let r = (t / big) * (t / big);
            (h_inv(r) - h0) * big / (big * big - u0 * u0 * t * t)
        };
        // across [u0 − d, u0 + d] the integrand is its limit h'(u0)/(2u0)
        let q1 = adaptive(&f, 0.0, u0 - d, tol / 3.0, 30)?;
        let q2 = adaptive(&f, u0 + d, big, tol / 3.0, 30)?;
        let q3 = adaptive(&g, 0.0, 1.0, tol / 3.0, 30)?;
        (
            q1.value + 2.0 * d * slope + q2.value + q3.value,
            PI * h0 / (2.0 * u0),
            q1.evaluations + q2.evaluations + q3.evaluations,
        )
    };
    Ok((-Complex64::i() * c * Complex64::new(integral, residue), evals))
}

/// (1/2π) ∫ G̃(ω) exp(−(ω − e)²/2σ²) e^{−iωt} dω
fn windowed_inverse(params: &PhysicalParams, edge: f64, sigma: f64, t: f64, tol: f64) -> Result<(Complex64, u64)> {
    let f = |w: f64| {
        let x = (w - edge) / sigma;
        g_tilde(w, params) * (-0.5 * x * x).exp() * Complex64::from_polar(1.0, -w * t)
    };
    let lo = edge - 12.0 * sigma;
    let hi = edge + 12.0 * sigma;
    let period = 2.0 * PI / t.abs().max(1e-300);
    let mut knots = vec![lo];
    for (a, b) in [(lo, edge), (edge, hi)] {
        let n = ((b - a) / (8.0 * period)).ceil().max(1.0) as usize;
        for k in 1..=n {
            knots.push(if k == n { b } else { a + (b - a) * k as f64 / n as f64 });
        }
    }
    let pieces = (knots.len() - 1) as f64;
    let mut total = Complex64::new(0.0, 0.0);
    let mut evals = 0;
    for p in knots.windows(2) {
        let (v, n) = adaptive_complex(&f, p[0], p[1], tol / pieces, 20)?;
        total += v;
        evals += n;
    }
    Ok((total / (2.0 * PI), evals))
}

pub fn kernel_transform_check(params: &PhysicalParams, opts: &KernelCheckOptions) -> Result<KernelCheckReport> {
    let Reservoir::BandEdge { beta, omega_c } = params.reservoir() else {
        return Err(Error::Unsupported {
            operation: "kernel_transform_check",
            model: "free-space",
        });
    };
    if opts.points < 2 {
        return Err(Error::param("points", "need at least 2 check frequencies"));
    }
    let unit = beta.powf(1.5) / omega_c.sqrt();
    let tol = opts.quad_tol * unit;
    let half = opts.half_width.unwrap_or(10.0 * omega_c);
    let edge = omega_c - params.omega_a();
    let mut omegas: Vec<f64> = (0..opts.points)
        .map(|k| -half + 2.0 * half * k as f64 / (opts.points - 1) as f64)
        .collect();
    if edge.abs() <= half {
        omegas.extend([edge, edge - 1e-3, edge + 1e-3]);
    }
    let rows: Vec<Result<(f64, Complex64, u64)>> = omegas
        .par_iter()
        .map(|&w| kernel_from_dos(w, params, tol).map(|(g, n)| (w, g, n)))
        .collect();
    let mut report = KernelCheckReport {
        points: omegas.len(),
        max_relative_residual: 0.0,
        worst_omega: f64::NAN,
        in_gap_points: 0,
        in_gap_max_real_ratio: 0.0,
        causality_ratio: f64::NAN,
        window: opts.window.unwrap_or(20.0 * omega_c),
        t0: 0.0,
        evaluations: 0,
    };
    for row in rows {
        let (w, g, n) = row?;
        report.evaluations += n;
        let exact = g_tilde(w, params);
        let r = (g - exact).norm() / exact.norm();
        if !(r <= report.max_relative_residual) {
            report.max_relative_residual = r;
            report.worst_omega = w;
        }
        if w + params.omega_a() < omega_c {
            report.in_gap_points += 1;
            report.in_gap_max_real_ratio = report.in_gap_max_real_ratio.max(g.re.abs() / g.norm());
        }
    }

    let sigma = report.window;
    report.t0 = 8.0 / sigma;
    let factors = [1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0];
    let times: Vec<f64> = factors
        .iter()
        .flat_map(|f| [f * report.t0, -f * report.t0])
        .collect();
    let inv_tol = 1e-10 * unit * sigma;
    let values: Vec<Result<(f64, Complex64, u64)>> = times
        .par_iter()
        .map(|&t| windowed_inverse(params, edge, sigma, t, inv_tol).map(|(g, n)| (t, g, n)))
        .collect();
    let (mut causal, mut acausal) = (0.0f64, 0.0f64);
    for v in values {
        let (t, g, n) = v?;
        report.evaluations += n;
        if t > 0.0 {
            causal = causal.max(g.norm());
        } else {
            acausal = acausal.max(g.norm());
        }
    }
    report.causality_ratio = acausal / causal;
    Ok(report)
}
