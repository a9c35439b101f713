//! First-order correction in the short-memory expansion: kernels modulated
//! by cos/sin of the Rabi frequency, i.e. half-sums and half-differences of
//! Rabi-shifted kernels.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::{assemble, is_ill_conditioned, SteadyState, SystemMatrix};
use crate::error::{Error, Result};
use crate::kernels::{edge_frequency, gc_tilde, g_tilde, noise_envelope, noise_envelopes_shifted};
use crate::params::{PhysicalParams, Reservoir};
use crate::spectrum::correlations::{spectrum_from_transfer, Correlation, NoiseCorrelations, Source};
use crate::spectrum::{
    compute_spectrum_with, effective_gamma, sample_on, trapezoid, zero_order_density, Features,
    GridSpec, Incoherent, Knot, KnotKind, SpectralDensity,
};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Kernels at ω ± Ω.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftedKernels {
    pub omega: f64,
    pub gp: Complex64,
    pub gm: Complex64,
    pub gcp: Complex64,
    pub gcm: Complex64,
}

impl ShiftedKernels {
    /// Transform of G(τ) cos Ωτ.
    pub fn g_cos(&self) -> Complex64 {
        (self.gp + self.gm) / 2.0
    }
    /// Transform of G(τ) sin Ωτ.
    pub fn g_sin(&self) -> Complex64 {
        (self.gp - self.gm) / (2.0 * I)
    }
    pub fn gc_cos(&self) -> Complex64 {
        (self.gcp + self.gcm) / 2.0
    }
    pub fn gc_sin(&self) -> Complex64 {
        (self.gcp - self.gcm) / (2.0 * I)
    }
}

pub fn shifted_kernels(omega: f64, params: &PhysicalParams) -> ShiftedKernels {
    let r = params.rabi();
    ShiftedKernels {
        omega,
        gp: g_tilde(omega + r, params),
        gm: g_tilde(omega - r, params),
        gcp: gc_tilde(omega + r, params),
        gcm: gc_tilde(omega - r, params),
    }
}

/// The first-order frequency-domain system. Reduces to the zero-order
/// matrix entry by entry when Ω = 0 or the kernels are flat.
pub fn first_order_system(omega: f64, params: &PhysicalParams) -> SystemMatrix {
    let r = params.rabi();
    let k = shifted_kernels(omega, params);
    let gt = g_tilde(omega, params);
    let gc = gc_tilde(omega, params);
    let w = Complex64::new(0.0, omega);
    let d = Complex64::new(0.0, params.delta());
    let shorthand = crate::bloch::Shorthand {
        omega,
        f: -w - d + k.g_cos(),
        g: -w + d + k.gc_cos(),
        h: -w + ((gt + gc) / 2.0 + (k.g_cos() + k.gc_cos()) / 2.0),
    };
    let mut m = assemble(&shorthand, r, Complex64::new(0.0, 0.0));
    m.matrix[(0, 2)] += I / 2.0 * k.g_sin();
    m.matrix[(1, 2)] -= I / 2.0 * k.gc_sin();
    m.matrix[(2, 0)] += I * k.g_sin();
    m.matrix[(2, 1)] -= I * k.gc_sin();

    let k0 = shifted_kernels(0.0, params);
    let g0 = g_tilde(0.0, params) + gc_tilde(0.0, params);
    let two_pi = 2.0 * PI;
    m.delta_source = Vector3::new(
        -two_pi * I / 2.0 * k0.g_sin(),
        two_pi * I / 2.0 * k0.gc_sin(),
        -two_pi * ((g0 + (k0.g_cos() + k0.gc_cos())) / 2.0),
    );
    m
}

fn transfer(omega: f64, params: &PhysicalParams) -> (Matrix3<Complex64>, bool) {
    let m = first_order_system(omega, params);
    let det = m.determinant();
    // det is D/2 at zero order
    let ill = is_ill_conditioned(2.0 * det, omega, params);
    match m.inverse() {
        Some(c) => (c, ill),
        None => (Matrix3::zeros(), true),
    }
}

pub fn first_order_steady_state(params: &PhysicalParams) -> Result<SteadyState> {
    let m = first_order_system(0.0, params);
    let (c, ill) = transfer(0.0, params);
    if ill {
        return Err(Error::IllConditioned {
            omega: 0.0,
            value: 2.0 * m.determinant(),
        });
    }
    let v = (c * m.delta_source).map(|x| x / (2.0 * PI));
    Ok(SteadyState {
        sigma_z: v[2].re,
        sigma_minus: v[0],
        sigma_plus: v[1],
    })
}

/// Heaviside arguments of the printed ⟨ñ_z ñ_+⟩ correlation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaConvention {
    /// Cutoffs in ω₁, mirroring ⟨ñ_- ñ_z⟩.
    #[default]
    Symmetric,
    /// Cutoffs in ω₂ as printed.
    AsPrinted,
}

pub fn first_order_noise_correlations(
    omega1: f64,
    omega2: f64,
    params: &PhysicalParams,
    convention: ThetaConvention,
) -> Result<NoiseCorrelations> {
    let Reservoir::BandEdge { omega_c, .. } = params.reservoir() else {
        return Err(Error::Unsupported {
            operation: "first_order_noise_correlations",
            model: "free-space",
        });
    };
    let (r, wa, d) = (params.rabi(), params.omega_a(), params.delta());
    let (n1, n2) = if omega1 + wa + r > omega_c {
        noise_envelopes_shifted(omega1, params)?
    } else {
        (0.0, 0.0)
    };
    let n0 = if omega1 + wa > omega_c {
        noise_envelope(omega1, params)? / 4.0
    } else {
        0.0
    };
    let (t1, t2) = match convention {
        ThetaConvention::Symmetric => (1.0, 1.0),
        ThetaConvention::AsPrinted => (
            f64::from(u8::from(omega2 + wa + r > omega_c)),
            f64::from(u8::from(omega2 + wa - r > omega_c)),
        ),
    };
    let (p1, p2) = (t1 * n1, t2 * n2);
    let two_pi = 2.0 * PI;
    Ok(NoiseCorrelations {
        omega1,
        omega2,
        minus_plus: Correlation::zero()
            .term(Source::Delta, 0.0, two_pi * (n1 + n2))
            .term(Source::SigmaMinus, -d, n1 - n2)
            .term(Source::SigmaPlus, d, n1 - n2),
        z_z: Correlation::zero()
            .term(Source::Delta, 0.0, two_pi * (n1 + n2) + 2.0 * two_pi * n0)
            .term(Source::SigmaMinus, -d, 2.0 * (n1 - n2))
            .term(Source::SigmaZ, 0.0, n1 + n2 + 2.0 * n0),
        z_minus: Correlation::zero(),
        minus_z: Correlation::zero()
            .term(Source::Delta, d, two_pi * (n1 - n2))
            .term(Source::SigmaMinus, 0.0, 2.0 * (n1 + n2))
            .term(Source::SigmaZ, d, n1 - n2),
        z_plus: Correlation::zero()
            .term(Source::Delta, -d, two_pi * (p1 - p2))
            .term(Source::SigmaPlus, 0.0, 2.0 * (p1 + p2))
            .term(Source::SigmaZ, d, p1 - p2),
        plus_z: Correlation::zero(),
    })
}

/// First-order band-edge spectrum under resonant driving.
#[derive(Clone, Copy, Debug)]
pub struct FirstOrderSpectrum {
    params: PhysicalParams,
    steady: SteadyState,
    convention: ThetaConvention,
    edge: f64,
}

impl FirstOrderSpectrum {
    pub fn new(params: &PhysicalParams, convention: ThetaConvention) -> Result<Self> {
        let Some(edge) = edge_frequency(params) else {
            return Err(Error::Unsupported {
                operation: "first_order_spectrum",
                model: "free-space",
            });
        };
        if params.delta() != 0.0 {
            return Err(Error::RequiresResonance {
                operation: "first_order_spectrum",
                delta: params.delta(),
            });
        }
        Ok(FirstOrderSpectrum {
            params: *params,
            steady: first_order_steady_state(params)?,
            convention,
            edge,
        })
    }
}

impl SpectralDensity for FirstOrderSpectrum {
    fn params(&self) -> &PhysicalParams {
        &self.params
    }

    fn coherent_weight(&self) -> f64 {
        4.0 * PI * PI * self.steady.sigma_minus.norm_sqr()
    }

    fn coherent_position(&self) -> f64 {
        0.0
    }

    fn steady_state(&self) -> Option<SteadyState> {
        Some(self.steady)
    }

    fn incoherent(&self, omega: f64) -> Incoherent {
        let p = &self.params;
        if !(omega > self.edge - p.rabi()) {
            return Incoherent::default();
        }
        let corr = match first_order_noise_correlations(omega, omega, p, self.convention) {
            Ok(c) => c,
            Err(_) => {
                return Incoherent {
                    ill_conditioned: true,
                    ..Incoherent::default()
                }
            }
        };
        let (ca, ill_a) = transfer(omega, p);
        let (cb, ill_b) = transfer(-omega, p);
        let s = spectrum_from_transfer(&ca, &cb, &corr.weight_matrix(&self.steady));
        Incoherent {
            value: s.re,
            imaginary: s.im,
            ill_conditioned: ill_a || ill_b,
        }
    }

    fn features(&self) -> Features {
        let p = &self.params;
        let r = p.rabi();
        let width = effective_gamma(p).max(1e-6 * p.reservoir().scale());
        let kind = KnotKind::Peak { width };
        let mut knots = vec![Knot { at: 0.0, kind }];
        if r > 0.0 {
            knots.push(Knot { at: -r, kind });
            knots.push(Knot { at: r, kind });
        }
        for e in [self.edge, -self.edge] {
            for s in [0.0, r, -r] {
                knots.push(Knot {
                    at: e + s,
                    kind: KnotKind::Singular,
                });
            }
        }
        Features {
            knots,
            center: 0.0,
            scale: r.max(width),
            unit: p.reservoir().scale(),
            support_start: Some(self.edge - r),
        }
    }
}

/// Zero- and first-order spectra compared on a common grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderComparison {
    pub rabi: f64,
    /// max |S1 − S0| / max S0
    pub max_relative: f64,
    /// max |S1 − S0| / S0 over points where S0 exceeds 1e-3 max S0
    pub max_pointwise_relative: f64,
    /// ∫|S1 − S0| / ∫S0
    pub integrated_relative: f64,
    pub power_zero: f64,
    pub power_first: f64,
    pub coherent_zero: f64,
    pub coherent_first: f64,
    /// Largest |Im S1| relative to max S1.
    pub max_imaginary_ratio: f64,
    pub points: usize,
    /// (omega, S0, S1) on the comparison grid.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub curve: Vec<(f64, f64, f64)>,
}

pub fn order_comparison(params: &PhysicalParams, spec: &GridSpec) -> Result<OrderComparison> {
    if !params.reservoir().is_band_edge() {
        return Err(Error::Unsupported {
            operation: "order_comparison",
            model: "free-space",
        });
    }
    let first = FirstOrderSpectrum::new(params, ThetaConvention::default())?;
    let zero = zero_order_density(params)?;
    let r1 = compute_spectrum_with(&first, spec)?;
    let omegas = r1.omegas();
    let (s0, _) = sample_on(zero.as_ref(), &omegas)?;
    let y0: Vec<f64> = s0.iter().map(|s| s.s_inc).collect();
    let y1 = r1.values();
    let max0 = y0.iter().copied().fold(0.0, f64::max);
    let diff: Vec<f64> = y0.iter().zip(&y1).map(|(a, b)| (a - b).abs()).collect();
    let max_diff = diff.iter().copied().fold(0.0, f64::max);
    let ratio = |num: f64, den: f64| if num == 0.0 { 0.0 } else { num / den };
    let pointwise = y0
        .iter()
        .zip(&diff)
        .filter(|(a, _)| **a > 1e-3 * max0)
        .map(|(a, d)| d / a)
        .fold(0.0, f64::max);
    let int0 = trapezoid(&omegas, &y0);
    let int1 = trapezoid(&omegas, &y1);
    Ok(OrderComparison {
        rabi: params.rabi(),
        max_relative: ratio(max_diff, max0),
        max_pointwise_relative: pointwise,
        integrated_relative: ratio(trapezoid(&omegas, &diff), int0),
        power_zero: zero.coherent_weight() + int0,
        power_first: first.coherent_weight() + int1,
        coherent_zero: zero.coherent_weight(),
        coherent_first: first.coherent_weight(),
        max_imaginary_ratio: r1.diagnostics.max_imaginary_ratio,
        points: omegas.len(),
        curve: Vec::new(),
    })
}

/// Comparison per Rabi frequency, one entry per value.
pub fn order_sweep(
    params: &PhysicalParams,
    rabis: &[f64],
    spec: &GridSpec,
) -> Vec<Result<OrderComparison>> {
    rabis
        .par_iter()
        .map(|&r| order_comparison(&params.with_rabi(r)?, spec))
        .collect()
}
