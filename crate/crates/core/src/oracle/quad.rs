//! Tanh-sinh quadrature with recursive bisection.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evaluations: u64,
}

/// ∫_a^b f with absolute tolerance `tol`, bisecting up to `max_depth` times.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<Quadrature> {
    let out = quadrature::integrate(f, a, b, tol);
    let mut q = Quadrature {
        value: out.integral,
        error: out.error_estimate,
        evaluations: u64::from(out.num_function_evaluations),
    };
    if q.error <= tol {
        return Ok(q);
    }
    if max_depth == 0 {
        return Err(Error::Quadrature {
            a,
            b,
            estimate: q.error,
            depth: 0,
        });
    }
    let m = 0.5 * (a + b);
    let left = adaptive(f, a, m, 0.5 * tol, max_depth - 1).map_err(|e| deepen(e))?;
    let right = adaptive(f, m, b, 0.5 * tol, max_depth - 1).map_err(|e| deepen(e))?;
    q.evaluations += left.evaluations + right.evaluations;
    q.value = left.value + right.value;
    q.error = left.error + right.error;
    Ok(q)
}

fn deepen(e: Error) -> Error {
    match e {
        Error::Quadrature {
            a,
            b,
            estimate,
            depth,
        } => Error::Quadrature {
            a,
            b,
            estimate,
            depth: depth + 1,
        },
        other => other,
    }
}

/// Complex integrand, real and imaginary parts integrated separately.
pub fn adaptive_complex<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<(Complex64, u64)> {
    let re = adaptive(&|x| f(x).re, a, b, tol, max_depth)?;
    let im = adaptive(&|x| f(x).im, a, b, tol, max_depth)?;
    Ok((
        Complex64::new(re.value, im.value),
        re.evaluations + im.evaluations,
    ))
}
