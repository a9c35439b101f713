//! Frequency-domain linearized Bloch system: shorthand, denominator, transfer
//! coefficients and steady state.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{gc_tilde, g_tilde};
use crate::params::PhysicalParams;

/// |D| below this fraction of `rabi^3 + |omega|^3 + scale^3` is flagged.
pub const CONDITIONING_TOL: f64 = 1e-10;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// f, g, h at one frequency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Shorthand {
    pub omega: f64,
    pub f: Complex64,
    pub g: Complex64,
    pub h: Complex64,
}

pub fn shorthand(omega: f64, params: &PhysicalParams) -> Shorthand {
    let gt = g_tilde(omega, params);
    let gc = gc_tilde(omega, params);
    let w = Complex64::new(0.0, omega);
    let d = Complex64::new(0.0, params.delta());
    Shorthand {
        omega,
        f: -w - d + gt,
        g: -w + d + gc,
        h: -w + (gt + gc),
    }
}

impl Shorthand {
    /// D = Ω²(f+g) + 2fgh.
    pub fn denominator(&self, rabi: f64) -> Complex64 {
        rabi * rabi * (self.f + self.g) + 2.0 * self.f * self.g * self.h
    }
}

/// Scale against which |D| is judged.
pub(crate) fn conditioning_scale(omega: f64, params: &PhysicalParams) -> f64 {
    params.rabi().powi(3) + omega.abs().powi(3) + params.reservoir().scale().powi(3)
}

pub(crate) fn is_ill_conditioned(d: Complex64, omega: f64, params: &PhysicalParams) -> bool {
    !(d.norm() >= CONDITIONING_TOL * conditioning_scale(omega, params))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Denominator {
    pub omega: f64,
    pub value: Complex64,
    pub ill_conditioned: bool,
}

pub fn denominator(omega: f64, params: &PhysicalParams) -> Denominator {
    let value = shorthand(omega, params).denominator(params.rabi());
    Denominator {
        omega,
        value,
        ill_conditioned: is_ill_conditioned(value, omega, params),
    }
}

/// M(ω) X(ω) = ñ(ω) + source·δ(ω), with X = (σ̃_-, σ̃_+, σ̃_z).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemMatrix {
    pub omega: f64,
    pub matrix: Matrix3<Complex64>,
    /// Coefficient of δ(ω) on the right-hand side.
    pub delta_source: Vector3<Complex64>,
}

impl SystemMatrix {
    pub fn determinant(&self) -> Complex64 {
        self.matrix.determinant()
    }

    /// Generic LU inverse, kept as a cross-check of the closed forms.
    pub fn inverse(&self) -> Option<Matrix3<Complex64>> {
        self.matrix.try_inverse()
    }
}

pub(crate) fn assemble(s: &Shorthand, rabi: f64, source: Complex64) -> SystemMatrix {
    let z = Complex64::new(0.0, 0.0);
    let half = 0.5 * rabi;
    SystemMatrix {
        omega: s.omega,
        matrix: Matrix3::new(
            s.f, z, -I * half,
            z, s.g, I * half,
            -I * rabi, I * rabi, s.h,
        ),
        delta_source: Vector3::new(z, z, source),
    }
}

pub fn system_matrix(omega: f64, params: &PhysicalParams) -> SystemMatrix {
    let s = shorthand(omega, params);
    let g0 = g_tilde(0.0, params) + gc_tilde(0.0, params);
    assemble(&s, params.rabi(), -2.0 * PI * g0)
}

/// Closed-form inverse of the system matrix acting on (ñ'_-, ñ'_+, ñ_z).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransferMatrix {
    pub omega: f64,
    pub coefficients: Matrix3<Complex64>,
    pub denominator: Complex64,
    pub ill_conditioned: bool,
}

pub(crate) fn closed_form_inverse(s: &Shorthand, rabi: f64) -> (Matrix3<Complex64>, Complex64) {
    let (f, g, h) = (s.f, s.g, s.h);
    let r2 = Complex64::new(rabi * rabi, 0.0);
    let d = s.denominator(rabi);
    let c = Matrix3::new(
        2.0 * g * h + r2, r2, I * rabi * g,
        r2, 2.0 * f * h + r2, -I * rabi * f,
        2.0 * I * rabi * g, -2.0 * I * rabi * f, 2.0 * f * g,
    ) / d;
    (c, d)
}

pub fn solution_coefficients(omega: f64, params: &PhysicalParams) -> TransferMatrix {
    let s = shorthand(omega, params);
    let (coefficients, d) = closed_form_inverse(&s, params.rabi());
    TransferMatrix {
        omega,
        coefficients,
        denominator: d,
        ill_conditioned: is_ill_conditioned(d, omega, params),
    }
}

/// Mean values ⟨σ_z⟩, ⟨σ_-⟩, ⟨σ_+⟩ at steady state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    pub sigma_z: f64,
    pub sigma_minus: Complex64,
    pub sigma_plus: Complex64,
}

/// Unprojected means, (σ_-, σ_+, σ_z), from the δ(ω) part of the solution.
pub(crate) fn steady_state_raw(params: &PhysicalParams) -> Result<Vector3<Complex64>> {
    let sys = system_matrix(0.0, params);
    let t = solution_coefficients(0.0, params);
    if t.ill_conditioned {
        return Err(Error::IllConditioned {
            omega: 0.0,
            value: t.denominator,
        });
    }
    Ok((t.coefficients * sys.delta_source).map(|c| c / (2.0 * PI)))
}

pub fn steady_state(params: &PhysicalParams) -> Result<SteadyState> {
    let v = steady_state_raw(params)?;
    Ok(SteadyState {
        sigma_z: v[2].re,
        sigma_minus: v[0],
        sigma_plus: v[1],
    })
}
