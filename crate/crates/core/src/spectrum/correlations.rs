//! Zero-temperature noise correlations as symbolic δ-function records.

use std::f64::consts::PI;

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bloch::SteadyState;
use crate::error::{Error, Result};
use crate::kernels::noise_envelope;
use crate::params::{PhysicalParams, Reservoir};

/// What multiplies a correlation term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// δ(ω₁ − ω₂ − shift)
    Delta,
    /// ⟨σ̃_-(ω₁ − ω₂ − shift)⟩
    SigmaMinus,
    /// ⟨σ̃_+(ω₁ − ω₂ − shift)⟩
    SigmaPlus,
    /// ⟨σ̃_z(ω₁ − ω₂ − shift)⟩
    SigmaZ,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTerm {
    pub source: Source,
    /// Frequency offset of the argument; a multiple of the detuning.
    pub shift: f64,
    pub weight: f64,
}

/// ⟨ñ_a(ω₁) ñ_b(ω₂)⟩ as a sum of terms.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub terms: Vec<CorrelationTerm>,
}

impl Correlation {
    pub fn zero() -> Self {
        Correlation::default()
    }

    pub(crate) fn term(mut self, source: Source, shift: f64, weight: f64) -> Self {
        self.terms.push(CorrelationTerm {
            source,
            shift,
            weight,
        });
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.weight == 0.0)
    }

    /// Total coefficient of the bare δ-functions.
    pub fn stationary_weight(&self) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.source == Source::Delta)
            .map(|t| t.weight)
            .sum()
    }

    /// Coefficient of δ(ω₁ − ω₂) on the diagonal, with each mean taken as
    /// `2π ⟨σ⟩ δ`. Shifts vanish under resonant driving.
    pub fn resolve(&self, ss: &SteadyState) -> Complex64 {
        self.terms
            .iter()
            .map(|t| {
                let factor = match t.source {
                    Source::Delta => Complex64::new(1.0, 0.0),
                    Source::SigmaMinus => 2.0 * PI * ss.sigma_minus,
                    Source::SigmaPlus => 2.0 * PI * ss.sigma_plus,
                    Source::SigmaZ => Complex64::new(2.0 * PI * ss.sigma_z, 0.0),
                };
                t.weight * factor
            })
            .sum()
    }
}

/// The six nonzero-candidate correlations, channels ordered (−, +, z).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseCorrelations {
    pub omega1: f64,
    pub omega2: f64,
    pub minus_plus: Correlation,
    pub z_z: Correlation,
    pub z_minus: Correlation,
    pub minus_z: Correlation,
    pub z_plus: Correlation,
    pub plus_z: Correlation,
}

impl NoiseCorrelations {
    /// W[a][b] = resolved ⟨ñ_a ñ_b⟩ with a, b in (−, +, z).
    pub fn weight_matrix(&self, ss: &SteadyState) -> Matrix3<Complex64> {
        let z = Complex64::new(0.0, 0.0);
        Matrix3::new(
            z,
            self.minus_plus.resolve(ss),
            self.minus_z.resolve(ss),
            z,
            z,
            self.plus_z.resolve(ss),
            self.z_minus.resolve(ss),
            self.z_plus.resolve(ss),
            self.z_z.resolve(ss),
        )
    }
}

/// ⟨σ̃_+(ω) σ̃_-(−ω)⟩ from transfer matrices at ±ω and noise weights.
pub fn spectrum_from_transfer(
    at_omega: &Matrix3<Complex64>,
    at_minus_omega: &Matrix3<Complex64>,
    weights: &Matrix3<Complex64>,
) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for a in 0..3 {
        for b in 0..3 {
            if weights[(a, b)] != Complex64::new(0.0, 0.0) {
                s += at_omega[(1, a)] * at_minus_omega[(0, b)] * weights[(a, b)];
            }
        }
    }
    s
}

/// Zero-order correlations for the band-edge reservoir.
pub fn pbg_noise_correlations(
    omega1: f64,
    omega2: f64,
    params: &PhysicalParams,
) -> Result<NoiseCorrelations> {
    let Reservoir::BandEdge { omega_c, .. } = params.reservoir() else {
        return Err(Error::Unsupported {
            operation: "pbg_noise_correlations",
            model: "free-space",
        });
    };
    let open = omega1 + params.omega_a() > omega_c;
    let n = if open { noise_envelope(omega1, params)? } else { 0.0 };
    let d = params.delta();
    Ok(NoiseCorrelations {
        omega1,
        omega2,
        minus_plus: Correlation::zero().term(Source::Delta, 0.0, PI * n),
        z_z: Correlation::zero()
            .term(Source::Delta, 0.0, 2.0 * PI * n)
            .term(Source::SigmaZ, 0.0, n),
        z_minus: Correlation::zero(),
        minus_z: Correlation::zero().term(Source::SigmaMinus, -d, n),
        z_plus: Correlation::zero().term(Source::SigmaPlus, d, n),
        plus_z: Correlation::zero(),
    })
}

/// White-noise correlations of the free-space reservoir (N = 2Γ).
pub fn free_space_noise_correlations(
    omega1: f64,
    omega2: f64,
    params: &PhysicalParams,
) -> Result<NoiseCorrelations> {
    let Reservoir::FreeSpace { .. } = params.reservoir() else {
        return Err(Error::Unsupported {
            operation: "free_space_noise_correlations",
            model: "band-edge",
        });
    };
    let n = noise_envelope(omega1, params)?;
    let d = params.delta();
    Ok(NoiseCorrelations {
        omega1,
        omega2,
        minus_plus: Correlation::zero().term(Source::Delta, 0.0, PI * n),
        z_z: Correlation::zero()
            .term(Source::Delta, 0.0, 2.0 * PI * n)
            .term(Source::SigmaZ, 0.0, n),
        z_minus: Correlation::zero(),
        minus_z: Correlation::zero().term(Source::SigmaMinus, -d, n),
        z_plus: Correlation::zero().term(Source::SigmaPlus, d, n),
        plus_z: Correlation::zero(),
    })
}
