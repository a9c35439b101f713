//! Free-space spectrum from the quantum regression theorem.
//!
//! The correlation vector u(τ) = (⟨σ_-(τ)σ_-⟩, ⟨σ_+(τ)σ_-⟩, ⟨σ_z(τ)σ_-⟩)
//! obeys the mean-value equations with source b⟨σ_-⟩. Its limit |⟨σ_-⟩|² is
//! subtracted analytically; the decaying remainder is Fourier transformed by
//! carrying one accumulator per frequency through the same ODE solve.

use std::f64::consts::PI;

use nalgebra::{DVector, Matrix3, Vector3};
use num_complex::Complex64;
use ode_solvers::dop853::Dop853;
use ode_solvers::dop_shared::{OutputType, System};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bloch_ode::{pack, solver_error, unpack3, write3, MarkovianGenerator};
use crate::bloch::SteadyState;
use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::spectrum::{finish_samples, grid::check_grid, Incoherent, SpectrumResult};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RegressionOptions {
    /// Defaults to 2 ln(1e13) / Γ (slowest decay rate is Γ/2).
    pub tau_max: Option<f64>,
    pub rtol: f64,
    pub atol: f64,
    /// Largest allowed |u(τ_max) − u(∞)| / |u(0) − u(∞)|.
    pub tail_tol: f64,
    /// Frequencies per ODE solve.
    pub chunk: usize,
}

impl Default for RegressionOptions {
    fn default() -> Self {
        RegressionOptions {
            tau_max: None,
            rtol: 1e-12,
            atol: 1e-15,
            tail_tol: 1e-10,
            chunk: 48,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionSpectrum {
    pub result: SpectrumResult,
    /// g1(0) = ⟨σ_+σ_-⟩ = (1 + ⟨σ_z⟩)/2
    pub g1_zero: f64,
    pub tau_max: f64,
    /// Relative size of the correlation remainder at tau_max.
    pub envelope: f64,
    pub evaluations: u64,
}

struct Augmented {
    l: Matrix3<Complex64>,
    /// ω_k + Δ
    freqs: Vec<f64>,
    uniform: Option<(f64, f64)>,
}

impl System<f64, DVector<f64>> for Augmented {
    fn system(&self, _t: f64, y: &DVector<f64>, dy: &mut DVector<f64>) {
        // τ is carried as the last state: the solver passes a wrong time to
        // its final stage, which only matters for non-autonomous systems
        let last = y.len() - 1;
        let t = y[last];
        dy[last] = 1.0;
        let v = unpack3(y);
        write3(dy, &(self.l * v));
        let c = v[1];
        match self.uniform {
            Some((first, step)) => {
                let mut phase = Complex64::from_polar(1.0, first * t);
                let rot = Complex64::from_polar(1.0, step * t);
                for k in 0..self.freqs.len() {
                    let d = c * phase;
                    dy[6 + 2 * k] = d.re;
                    dy[7 + 2 * k] = d.im;
                    phase *= rot;
                }
            }
            None => {
                for (k, w) in self.freqs.iter().enumerate() {
                    let d = c * Complex64::from_polar(1.0, w * t);
                    dy[6 + 2 * k] = d.re;
                    dy[7 + 2 * k] = d.im;
                }
            }
        }
    }
}

fn uniform_spacing(x: &[f64]) -> Option<(f64, f64)> {
    if x.len() < 3 {
        return None;
    }
    let step = (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64;
    let scale = x[0].abs().max(x[x.len() - 1].abs());
    x.iter()
        .enumerate()
        .all(|(k, v)| (v - (x[0] + step * k as f64)).abs() <= 1e-13 * scale)
        .then_some((x[0], step))
}

struct ChunkOut {
    transforms: Vec<Complex64>,
    envelope: f64,
    evaluations: u64,
}

fn solve_chunk(
    l: Matrix3<Complex64>,
    y0: Vector3<Complex64>,
    freqs: &[f64],
    tau_max: f64,
    max_step: f64,
    opts: &RegressionOptions,
) -> Result<ChunkOut> {
    let mut init = vec![y0[0], y0[1], y0[2]];
    init.extend(std::iter::repeat(Complex64::new(0.0, 0.0)).take(freqs.len()));
    let sys = Augmented {
        l,
        freqs: freqs.to_vec(),
        uniform: uniform_spacing(freqs),
    };
    let mut y = pack(&init).as_slice().to_vec();
    y.push(0.0);
    let mut solver = Dop853::from_param(
        sys,
        0.0,
        tau_max,
        tau_max,
        DVector::from_vec(y),
        opts.rtol,
        opts.atol,
        0.9,
        0.0,
        0.333,
        6.0,
        max_step.min(tau_max),
        0.0,
        50_000_000,
        u32::MAX,
        OutputType::Sparse,
    );
    let stats = solver.integrate().map_err(solver_error)?;
    let end = solver
        .y_out()
        .last()
        .ok_or_else(|| Error::Integration("solver produced no output".into()))?;
    let y_end = unpack3(end);
    let norm0 = y0.norm();
    let envelope = if norm0 == 0.0 { 0.0 } else { y_end.norm() / norm0 };
    let transforms = (0..freqs.len())
        .map(|k| Complex64::new(end[6 + 2 * k], end[7 + 2 * k]))
        .collect();
    Ok(ChunkOut {
        transforms,
        envelope,
        evaluations: u64::from(stats.num_eval),
    })
}

/// Incoherent spectrum 2π · 2 Re ∫₀^∞ (g1(τ) − |⟨σ_-⟩|²) e^{i(ω+Δ)τ} dτ on
/// the given frequencies (measured from the atomic transition).
pub fn regression_spectrum(
    params: &PhysicalParams,
    omegas: &[f64],
    opts: &RegressionOptions,
) -> Result<RegressionSpectrum> {
    check_grid(omegas)?;
    let gen = MarkovianGenerator::new(params)?;
    let tau_max = opts
        .tau_max
        .unwrap_or(2.0 * (1e13f64).ln() / gen.gamma);
    if !(tau_max > 0.0 && tau_max.is_finite()) {
        return Err(Error::param("tau_max", format!("must be positive, got {tau_max}")));
    }
    let ss = gen.fixed_point()?;
    let (sm, sz) = (ss[0], ss[2]);
    let u0 = Vector3::new(
        Complex64::new(0.0, 0.0),
        (1.0 + sz) / 2.0,
        -sm,
    );
    let y0 = u0 - ss * sm;
    let shifted: Vec<f64> = omegas.iter().map(|w| w + params.delta()).collect();
    let chunks: Vec<Result<ChunkOut>> = shifted
        .par_chunks(opts.chunk.max(1))
        .map(|c| solve_chunk(gen.l, y0, c, tau_max, gen.max_step(), opts))
        .collect();
    let mut transforms = Vec::with_capacity(omegas.len());
    let mut envelope: f64 = 0.0;
    let mut evaluations = 0;
    for c in chunks {
        let c = c?;
        transforms.extend(c.transforms);
        envelope = envelope.max(c.envelope);
        evaluations += c.evaluations;
    }
    if envelope > opts.tail_tol {
        return Err(Error::InsufficientTau {
            tau_max,
            envelope,
            tolerance: opts.tail_tol,
        });
    }
    let raw: Vec<Incoherent> = transforms
        .iter()
        .map(|f| Incoherent {
            value: 2.0 * PI * 2.0 * f.re,
            imaginary: 0.0,
            ill_conditioned: false,
        })
        .collect();
    let (samples, diagnostics) = finish_samples(omegas, &raw);
    let steady = SteadyState {
        sigma_z: sz.re,
        sigma_minus: sm,
        sigma_plus: ss[1],
    };
    Ok(RegressionSpectrum {
        result: SpectrumResult {
            params: *params,
            unit: params.unit(),
            coherent_weight: 4.0 * PI * PI * sm.norm_sqr(),
            coherent_position: -params.delta(),
            steady_state: Some(steady),
            samples,
            diagnostics,
            nested: false,
        },
        g1_zero: ((1.0 + sz) / 2.0).re,
        tau_max,
        envelope,
        evaluations,
    })
}
