//! Fluorescence spectra: free-space closed form, strong-drive limit and the
//! band-edge formula, sampled on adaptive grids.
//!
//! Normalization: the spectrum is `2π ∫ ⟨σ_+(t+τ) σ_-(t)⟩ e^{iωτ} dτ` with ω
//! measured from the atomic transition. The elastic line is a separate weight
//! at `coherent_position`, never painted onto the grid.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::{is_ill_conditioned, shorthand, steady_state, SteadyState};
use crate::error::{Error, Result};
use crate::kernels::{edge_frequency, g_tilde, noise_envelope};
use crate::params::{FrequencyUnit, PhysicalParams, Reservoir};

pub mod correlations;
pub mod grid;
pub mod peaks;
pub mod scan;

pub use correlations::{
    free_space_noise_correlations, pbg_noise_correlations, spectrum_from_transfer, Correlation,
    CorrelationTerm, NoiseCorrelations, Source,
};
pub use grid::{build_grid, trapezoid, Features, GridSpec, Knot, KnotKind};
pub use peaks::{peak_analysis, peak_analysis_with, Peak, PeakOptions, PeakTable};
pub use scan::{offset_scan, ScanPoint, ScanReport, ScanRow};

/// Relative size of negative samples that are clamped silently.
pub const NEGATIVE_TOL: f64 = 1e-10;

/// Spectrum at one frequency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralValue {
    /// Weight of the δ line (independent of the sampled frequency).
    pub coherent_weight: f64,
    pub s_inc: f64,
    pub ill_conditioned: bool,
}

/// Raw incoherent value before clamping.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Incoherent {
    pub value: f64,
    /// Imaginary part left over by the formula; zero for exact expressions.
    pub imaginary: f64,
    pub ill_conditioned: bool,
}

/// A spectrum that can be sampled pointwise.
pub trait SpectralDensity: Sync {
    fn params(&self) -> &PhysicalParams;
    fn coherent_weight(&self) -> f64;
    /// Frequency of the δ line.
    fn coherent_position(&self) -> f64;
    fn steady_state(&self) -> Option<SteadyState>;
    fn incoherent(&self, omega: f64) -> Incoherent;
    fn features(&self) -> Features;

    fn value(&self, omega: f64) -> SpectralValue {
        let v = self.incoherent(omega);
        SpectralValue {
            coherent_weight: self.coherent_weight(),
            s_inc: v.value,
            ill_conditioned: v.ill_conditioned,
        }
    }
}

fn require_resonant(operation: &'static str, params: &PhysicalParams) -> Result<()> {
    if params.delta() != 0.0 {
        return Err(Error::RequiresResonance {
            operation,
            delta: params.delta(),
        });
    }
    Ok(())
}

fn peak_knots(center: f64, split: f64, width: f64) -> Vec<Knot> {
    let kind = KnotKind::Peak { width };
    let mut v = vec![Knot { at: center, kind }];
    if split > 0.0 {
        v.push(Knot { at: center - split, kind });
        v.push(Knot { at: center + split, kind });
    }
    v
}

/// Free-space closed form.
#[derive(Clone, Copy, Debug)]
pub struct FreeSpaceSpectrum {
    params: PhysicalParams,
    gamma: f64,
    a: f64,
    steady: SteadyState,
}

impl FreeSpaceSpectrum {
    pub fn new(params: &PhysicalParams) -> Result<Self> {
        let Reservoir::FreeSpace { gamma } = params.reservoir() else {
            return Err(Error::Unsupported {
                operation: "free_space_spectrum",
                model: "band-edge",
            });
        };
        let (r, d) = (params.rabi(), params.delta());
        Ok(FreeSpaceSpectrum {
            params: *params,
            gamma,
            a: 0.5 * r * r + d * d + 0.25 * gamma * gamma,
            steady: steady_state(params)?,
        })
    }
}

impl SpectralDensity for FreeSpaceSpectrum {
    fn params(&self) -> &PhysicalParams {
        &self.params
    }

    fn coherent_weight(&self) -> f64 {
        let (r, d, g) = (self.params.rabi(), self.params.delta(), self.gamma);
        PI * PI * r * r * (0.25 * g * g + d * d) / (self.a * self.a)
    }

    fn coherent_position(&self) -> f64 {
        -self.params.delta()
    }

    fn steady_state(&self) -> Option<SteadyState> {
        Some(self.steady)
    }

    fn incoherent(&self, omega: f64) -> Incoherent {
        let (r, d, g, a) = (self.params.rabi(), self.params.delta(), self.gamma, self.a);
        let x = omega + d;
        let x2 = x * x;
        let r2 = r * r;
        let num = PI * g * r2 * r2 * (0.5 * r2 + g * g + x2);
        let u = a - 2.0 * x2;
        let v = r2 + d * d + 1.25 * g * g - x2;
        let den = 2.0 * a * (g * g * u * u + x2 * v * v);
        Incoherent {
            value: num / den,
            imaginary: 0.0,
            ill_conditioned: false,
        }
    }

    fn features(&self) -> Features {
        let (r, d, g) = (self.params.rabi(), self.params.delta(), self.gamma);
        let split = (r * r + d * d).sqrt();
        let split = if r > 0.0 { split } else { 0.0 };
        Features {
            knots: peak_knots(-d, split, g),
            center: -d,
            scale: split.max(g),
            unit: g,
            support_start: None,
        }
    }
}

/// Strong-drive limit: three Lorentzians with widths 3Γ/2, Γ, 3Γ/2.
#[derive(Clone, Copy, Debug)]
pub struct MollowLimit {
    params: PhysicalParams,
    gamma: f64,
}

impl MollowLimit {
    pub fn new(params: &PhysicalParams) -> Result<Self> {
        let Reservoir::FreeSpace { gamma } = params.reservoir() else {
            return Err(Error::Unsupported {
                operation: "mollow_limit_spectrum",
                model: "band-edge",
            });
        };
        require_resonant("mollow_limit_spectrum", params)?;
        if !(params.rabi() > 0.0) {
            return Err(Error::InvalidParameter {
                name: "rabi",
                reason: "the strong-drive limit needs rabi > 0".into(),
            });
        }
        Ok(MollowLimit {
            params: *params,
            gamma,
        })
    }
}

impl SpectralDensity for MollowLimit {
    fn params(&self) -> &PhysicalParams {
        &self.params
    }

    fn coherent_weight(&self) -> f64 {
        let (g, r) = (self.gamma, self.params.rabi());
        4.0 * PI * PI * g * g / (4.0 * r * r)
    }

    fn coherent_position(&self) -> f64 {
        0.0
    }

    fn steady_state(&self) -> Option<SteadyState> {
        None
    }

    fn incoherent(&self, omega: f64) -> Incoherent {
        let (g, r) = (self.gamma, self.params.rabi());
        let side = |x: f64| 0.1875 * g / (x * x + 0.5625 * g * g);
        let center = 0.25 * g / (omega * omega + 0.25 * g * g);
        Incoherent {
            value: 2.0 * PI * (side(omega + r) + center + side(omega - r)),
            imaginary: 0.0,
            ill_conditioned: false,
        }
    }

    fn features(&self) -> Features {
        let (g, r) = (self.gamma, self.params.rabi());
        Features {
            knots: peak_knots(0.0, r, g),
            center: 0.0,
            scale: r.max(g),
            unit: g,
            support_start: None,
        }
    }
}

/// Band-edge spectrum under resonant driving.
#[derive(Clone, Copy, Debug)]
pub struct PbgSpectrum {
    params: PhysicalParams,
    steady: SteadyState,
    edge: f64,
    coherent: f64,
    /// 2π × means
    s_minus: Complex64,
    s_plus: Complex64,
    s_z: f64,
}

impl PbgSpectrum {
    pub fn new(params: &PhysicalParams) -> Result<Self> {
        let Some(edge) = edge_frequency(params) else {
            return Err(Error::Unsupported {
                operation: "pbg_spectrum",
                model: "free-space",
            });
        };
        require_resonant("pbg_spectrum", params)?;
        let steady = steady_state(params)?;
        let s0 = shorthand(0.0, params);
        let r = params.rabi();
        let gp = s0.h; // at ω = 0, h = G̃ + G̃_c
        let d0 = s0.denominator(r);
        let coherent = (4.0 * PI * PI * r * r * s0.f * s0.g * gp * gp / (d0 * d0)).re;
        Ok(PbgSpectrum {
            params: *params,
            steady,
            edge,
            coherent,
            s_minus: 2.0 * PI * steady.sigma_minus,
            s_plus: 2.0 * PI * steady.sigma_plus,
            s_z: 2.0 * PI * steady.sigma_z,
        })
    }

    pub fn edge(&self) -> f64 {
        self.edge
    }
}

/// 2 Re G̃(0), the decay rate the atom would see in a flat continuum.
pub fn effective_gamma(params: &PhysicalParams) -> f64 {
    2.0 * g_tilde(0.0, params).re
}

impl SpectralDensity for PbgSpectrum {
    fn params(&self) -> &PhysicalParams {
        &self.params
    }

    fn coherent_weight(&self) -> f64 {
        self.coherent
    }

    fn coherent_position(&self) -> f64 {
        0.0
    }

    fn steady_state(&self) -> Option<SteadyState> {
        Some(self.steady)
    }

    fn incoherent(&self, omega: f64) -> Incoherent {
        if !(omega > self.edge) {
            return Incoherent::default();
        }
        let p = &self.params;
        let n = noise_envelope(omega, p).expect("above the edge the envelope is defined");
        let r = p.rabi();
        let (r2, r3) = (r * r, r * r * r);
        let a = shorthand(omega, p);
        let b = shorthand(-omega, p);
        let (da, db) = (a.denominator(r), b.denominator(r));
        let i = Complex64::i();
        let num = PI * r2 * r2 + i * r3 * b.g * self.s_minus - i * r3 * a.f * self.s_plus
            + r2 * a.f * b.g * (2.0 * PI + self.s_z);
        let v = n * num / (da * db);
        Incoherent {
            value: v.re,
            imaginary: v.im,
            ill_conditioned: is_ill_conditioned(da, omega, p) || is_ill_conditioned(db, -omega, p),
        }
    }

    fn features(&self) -> Features {
        let p = &self.params;
        let width = effective_gamma(p).max(1e-6 * p.reservoir().scale());
        let mut knots = peak_knots(0.0, p.rabi(), width);
        knots.push(Knot {
            at: self.edge,
            kind: KnotKind::Singular,
        });
        if self.edge != 0.0 {
            knots.push(Knot {
                at: -self.edge,
                kind: KnotKind::Singular,
            });
        }
        Features {
            knots,
            center: 0.0,
            scale: p.rabi().max(width),
            unit: p.reservoir().scale(),
            support_start: Some(self.edge),
        }
    }
}

/// The zero-order spectrum appropriate for the reservoir.
pub fn zero_order_density(params: &PhysicalParams) -> Result<Box<dyn SpectralDensity>> {
    Ok(match params.reservoir() {
        Reservoir::FreeSpace { .. } => Box::new(FreeSpaceSpectrum::new(params)?),
        Reservoir::BandEdge { .. } => Box::new(PbgSpectrum::new(params)?),
    })
}

pub fn free_space_spectrum(omega: f64, params: &PhysicalParams) -> Result<SpectralValue> {
    Ok(FreeSpaceSpectrum::new(params)?.value(omega))
}

pub fn mollow_limit_spectrum(omega: f64, params: &PhysicalParams) -> Result<SpectralValue> {
    Ok(MollowLimit::new(params)?.value(omega))
}

pub fn pbg_spectrum(omega: f64, params: &PhysicalParams) -> Result<SpectralValue> {
    Ok(PbgSpectrum::new(params)?.value(omega))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSample {
    pub omega: f64,
    pub s_inc: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDiagnostics {
    /// Refinement level of the returned grid.
    pub level: u32,
    pub converged: bool,
    /// Last relative change of the extrapolated integral.
    pub relative_change: f64,
    /// Samples in [-tol, 0) set to zero.
    pub clamped: usize,
    /// Samples below -tol (also set to zero, but a real violation).
    pub negative_violations: usize,
    pub min_raw: f64,
    pub max_raw: f64,
    pub ill_conditioned: usize,
    pub max_imaginary_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub params: PhysicalParams,
    pub unit: FrequencyUnit,
    pub coherent_weight: f64,
    pub coherent_position: f64,
    pub steady_state: Option<SteadyState>,
    pub samples: Vec<SpectrumSample>,
    pub diagnostics: SpectrumDiagnostics,
    /// Even-indexed samples form the previous refinement level.
    pub nested: bool,
}

impl SpectrumResult {
    pub fn omegas(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.omega).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.s_inc).collect()
    }

    pub fn max_s_inc(&self) -> f64 {
        self.samples.iter().map(|s| s.s_inc).fold(0.0, f64::max)
    }
}

fn richardson(fine: f64, coarse: f64) -> f64 {
    fine + (fine - coarse) / 3.0
}

/// Samples `density` on the given grid, clamping tiny negatives.
pub fn sample_on<D: SpectralDensity + ?Sized>(
    density: &D,
    omegas: &[f64],
) -> Result<(Vec<SpectrumSample>, SpectrumDiagnostics)> {
    grid::check_grid(omegas)?;
    let raw: Vec<Incoherent> = omegas.par_iter().map(|&w| density.incoherent(w)).collect();
    Ok(finish_samples(omegas, &raw))
}

pub(crate) fn finish_samples(omegas: &[f64], raw: &[Incoherent]) -> (Vec<SpectrumSample>, SpectrumDiagnostics) {
    let max_raw = raw.iter().map(|v| v.value).fold(0.0, f64::max);
    let min_raw = raw.iter().map(|v| v.value).fold(0.0, f64::min);
    let tol = NEGATIVE_TOL * max_raw;
    let mut diag = SpectrumDiagnostics {
        min_raw,
        max_raw,
        ..Default::default()
    };
    let samples = omegas
        .iter()
        .zip(raw)
        .map(|(&omega, v)| {
            if v.ill_conditioned {
                diag.ill_conditioned += 1;
            }
            if v.value.abs() > 0.0 {
                diag.max_imaginary_ratio = diag.max_imaginary_ratio.max(v.imaginary.abs() / max_raw);
            }
            let s_inc = if v.value >= 0.0 {
                v.value
            } else {
                if v.value >= -tol {
                    diag.clamped += 1;
                } else {
                    diag.negative_violations += 1;
                }
                0.0
            };
            SpectrumSample { omega, s_inc }
        })
        .collect();
    (samples, diag)
}

/// Samples the density on nested grids until the integrated power settles.
pub fn compute_spectrum_with<D: SpectralDensity + ?Sized>(
    density: &D,
    spec: &GridSpec,
) -> Result<SpectrumResult> {
    spec.validate()?;
    let features = density.features();
    let (first, last) = match spec.level {
        Some(l) => (l, l),
        None => (0, spec.max_refinements),
    };
    let mut prev: Option<(Vec<Incoherent>, f64, Option<f64>)> = None;
    let mut level = first;
    loop {
        let omegas = build_grid(&features, spec, level)?;
        let raw: Vec<Incoherent> = match &prev {
            Some((old, _, _)) if old.len() * 2 - 1 == omegas.len() => omegas
                .par_iter()
                .enumerate()
                .map(|(i, &w)| if i % 2 == 0 { old[i / 2] } else { density.incoherent(w) })
                .collect(),
            _ => omegas.par_iter().map(|&w| density.incoherent(w)).collect(),
        };
        let (samples, mut diag) = finish_samples(&omegas, &raw);
        let values: Vec<f64> = samples.iter().map(|s| s.s_inc).collect();
        let t = trapezoid(&omegas, &values);
        let (r, change) = match &prev {
            Some((_, t_old, r_old)) => {
                let r = richardson(t, *t_old);
                let reference = r_old.unwrap_or(*t_old);
                let scale = r.abs().max(f64::MIN_POSITIVE);
                (Some(r), (r - reference).abs() / scale)
            }
            None => (None, f64::INFINITY),
        };
        let settled = r.is_some() && (change <= spec.rtol || t == 0.0);
        if settled || level >= last {
            diag.level = level;
            diag.converged = settled;
            diag.relative_change = change;
            return Ok(SpectrumResult {
                params: *density.params(),
                unit: density.params().unit(),
                coherent_weight: density.coherent_weight(),
                coherent_position: density.coherent_position(),
                steady_state: density.steady_state(),
                samples,
                diagnostics: diag,
                nested: level > 0 && omegas.len() % 2 == 1,
            });
        }
        prev = Some((raw, t, r));
        level += 1;
    }
}

/// Zero-order spectrum of `params` on an adaptive grid.
pub fn compute_spectrum(params: &PhysicalParams, spec: &GridSpec) -> Result<SpectrumResult> {
    let density = zero_order_density(params)?;
    compute_spectrum_with(density.as_ref(), spec)
}

/// Wraps samples on a user grid into a result (no refinement).
pub fn spectrum_on_grid<D: SpectralDensity + ?Sized>(
    density: &D,
    omegas: &[f64],
) -> Result<SpectrumResult> {
    let (samples, diagnostics) = sample_on(density, omegas)?;
    Ok(SpectrumResult {
        params: *density.params(),
        unit: density.params().unit(),
        coherent_weight: density.coherent_weight(),
        coherent_position: density.coherent_position(),
        steady_state: density.steady_state(),
        samples,
        diagnostics,
        nested: false,
    })
}

/// Incoherent integral, Richardson-corrected on nested grids.
pub fn incoherent_power(result: &SpectrumResult) -> Result<f64> {
    let x = result.omegas();
    grid::check_grid(&x)?;
    let y = result.values();
    let fine = trapezoid(&x, &y);
    if result.nested && x.len() >= 3 && x.len() % 2 == 1 {
        let xc: Vec<f64> = x.iter().step_by(2).copied().collect();
        let yc: Vec<f64> = y.iter().step_by(2).copied().collect();
        Ok(richardson(fine, trapezoid(&xc, &yc)))
    } else {
        Ok(fine)
    }
}

/// Coherent weight plus the integrated incoherent spectrum.
pub fn total_power(result: &SpectrumResult) -> Result<f64> {
    Ok(result.coherent_weight + incoherent_power(result)?)
}
