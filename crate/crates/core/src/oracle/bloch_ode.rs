//! Markovian optical Bloch equations in the drive frame, integrated with an
//! adaptive 8th-order Runge–Kutta method.

use nalgebra::{DVector, Matrix3, Vector3};
use num_complex::Complex64;
use ode_solvers::dop853::Dop853;
use ode_solvers::dop_shared::{OutputType, System};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{PhysicalParams, Reservoir};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Generator L and source b of dv/dt = L v + b, v = (⟨σ_-⟩, ⟨σ_+⟩, ⟨σ_z⟩).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MarkovianGenerator {
    pub l: Matrix3<Complex64>,
    pub b: Vector3<Complex64>,
    pub gamma: f64,
}

impl MarkovianGenerator {
    pub fn new(params: &PhysicalParams) -> Result<Self> {
        let Reservoir::FreeSpace { gamma } = params.reservoir() else {
            return Err(Error::Unsupported {
                operation: "markovian bloch oracle",
                model: "band-edge",
            });
        };
        let (r, d) = (params.rabi(), params.delta());
        let z = Complex64::new(0.0, 0.0);
        let l = Matrix3::new(
            I * d - 0.5 * gamma, z, I * (0.5 * r),
            z, -I * d - 0.5 * gamma, -I * (0.5 * r),
            I * r, -I * r, Complex64::new(-gamma, 0.0),
        );
        Ok(MarkovianGenerator {
            l,
            b: Vector3::new(z, z, Complex64::new(-gamma, 0.0)),
            gamma,
        })
    }

    /// Largest step that keeps the explicit integrator inside its stability
    /// region once the solution has relaxed (the error estimate alone lets
    /// the step grow until the fixed point goes unstable).
    pub fn max_step(&self) -> f64 {
        let rate = (0..3)
            .map(|r| (0..3).map(|c| self.l[(r, c)].norm()).sum::<f64>())
            .fold(0.0, f64::max);
        1.0 / rate
    }

    /// Fixed point −L⁻¹b by LU.
    pub fn fixed_point(&self) -> Result<Vector3<Complex64>> {
        let lu = self.l.lu();
        lu.solve(&(-self.b))
            .ok_or_else(|| Error::Integration("singular Bloch generator".into()))
    }
}

/// Packs complex 3-vectors (and extra complex slots) as interleaved reals.
pub(crate) fn pack(v: &[Complex64]) -> DVector<f64> {
    DVector::from_iterator(v.len() * 2, v.iter().flat_map(|c| [c.re, c.im]))
}

pub(crate) fn unpack3(y: &DVector<f64>) -> Vector3<Complex64> {
    Vector3::new(
        Complex64::new(y[0], y[1]),
        Complex64::new(y[2], y[3]),
        Complex64::new(y[4], y[5]),
    )
}

pub(crate) fn write3(dy: &mut DVector<f64>, v: &Vector3<Complex64>) {
    for k in 0..3 {
        dy[2 * k] = v[k].re;
        dy[2 * k + 1] = v[k].im;
    }
}

struct Affine {
    l: Matrix3<Complex64>,
    b: Vector3<Complex64>,
}

impl System<f64, DVector<f64>> for Affine {
    fn system(&self, _t: f64, y: &DVector<f64>, dy: &mut DVector<f64>) {
        let v = unpack3(y);
        write3(dy, &(self.l * v + self.b));
    }
}

/// Components of the Bloch vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub sigma_minus: Complex64,
    pub sigma_plus: Complex64,
    pub sigma_z: Complex64,
}

impl BlochVector {
    pub fn ground() -> Self {
        BlochVector {
            sigma_minus: Complex64::new(0.0, 0.0),
            sigma_plus: Complex64::new(0.0, 0.0),
            sigma_z: Complex64::new(-1.0, 0.0),
        }
    }

    pub fn excited() -> Self {
        BlochVector {
            sigma_z: Complex64::new(1.0, 0.0),
            ..BlochVector::ground()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegrationStats {
    pub evaluations: u32,
    pub accepted_steps: u32,
    pub rejected_steps: u32,
    pub rtol: f64,
    pub atol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochTrajectory {
    pub times: Vec<f64>,
    pub sigma_minus: Vec<Complex64>,
    pub sigma_plus: Vec<Complex64>,
    pub sigma_z: Vec<f64>,
    pub stats: IntegrationStats,
}

impl BlochTrajectory {
    pub fn last(&self) -> Option<BlochVector> {
        let n = self.times.len().checked_sub(1)?;
        Some(BlochVector {
            sigma_minus: self.sigma_minus[n],
            sigma_plus: self.sigma_plus[n],
            sigma_z: Complex64::new(self.sigma_z[n], 0.0),
        })
    }
}

pub(crate) fn solver_error(e: ode_solvers::dop_shared::IntegrationError) -> Error {
    Error::Integration(e.to_string())
}

/// Integrates the mean-value equations from `initial` to `t_end` with local
/// relative tolerance `tol`, returning `samples + 1` equally spaced points.
pub fn integrate_markovian_bloch(
    params: &PhysicalParams,
    initial: BlochVector,
    t_end: f64,
    tol: f64,
    samples: usize,
) -> Result<BlochTrajectory> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::param("t_end", format!("must be positive, got {t_end}")));
    }
    if !(tol > 0.0) {
        return Err(Error::param("tol", format!("must be positive, got {tol}")));
    }
    let gen = MarkovianGenerator::new(params)?;
    let n = samples.max(1);
    let atol = 1e-3 * tol;
    let mut y = pack(&[initial.sigma_minus, initial.sigma_plus, initial.sigma_z]);
    let mut out = BlochTrajectory {
        times: Vec::with_capacity(n + 1),
        sigma_minus: Vec::with_capacity(n + 1),
        sigma_plus: Vec::with_capacity(n + 1),
        sigma_z: Vec::with_capacity(n + 1),
        stats: IntegrationStats {
            evaluations: 0,
            accepted_steps: 0,
            rejected_steps: 0,
            rtol: tol,
            atol,
        },
    };
    let push = |out: &mut BlochTrajectory, t: f64, y: &DVector<f64>| {
        let v = unpack3(y);
        out.times.push(t);
        out.sigma_minus.push(v[0]);
        out.sigma_plus.push(v[1]);
        out.sigma_z.push(v[2].re);
    };
    push(&mut out, 0.0, &y);
    // one solve per output interval: the solver's interpolated endpoint is
    // not reliable, its final step is
    for k in 0..n {
        let (t0, t1) = (t_end * k as f64 / n as f64, t_end * (k + 1) as f64 / n as f64);
        let mut solver = Dop853::from_param(
            Affine { l: gen.l, b: gen.b },
            t0,
            t1,
            t1 - t0,
            y,
            tol,
            atol,
            0.9,
            0.0,
            0.333,
            6.0,
            gen.max_step().min(t1 - t0),
            0.0,
            10_000_000,
            u32::MAX,
            OutputType::Sparse,
        );
        let stats = solver.integrate().map_err(solver_error)?;
        out.stats.evaluations += stats.num_eval;
        out.stats.accepted_steps += stats.accepted_steps;
        out.stats.rejected_steps += stats.rejected_steps;
        y = solver
            .y_out()
            .last()
            .cloned()
            .ok_or_else(|| Error::Integration("solver produced no output".into()))?;
        push(&mut out, t1, &y);
    }
    Ok(out)
}
