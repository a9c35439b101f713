//! Reservoir memory-function spectra, density of states and noise envelopes.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{PhysicalParams, Reservoir};

/// Photon density of states at one frequency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DosValue {
    pub omega: f64,
    pub density: f64,
}

/// `sqrt(omega - omega_c)` above the edge, zero below (unit curvature).
pub fn dos(omega: f64, reservoir: &Reservoir) -> Result<DosValue> {
    match *reservoir {
        Reservoir::FreeSpace { .. } => Err(Error::Unsupported {
            operation: "dos",
            model: "free-space",
        }),
        Reservoir::BandEdge { omega_c, .. } => Ok(DosValue {
            omega,
            density: if omega > omega_c {
                (omega - omega_c).sqrt()
            } else {
                0.0
            },
        }),
    }
}

/// Square root continued below zero as `below * sqrt(|x|)`.
#[inline]
fn branch_sqrt(x: f64, below: Complex64) -> Complex64 {
    if x >= 0.0 {
        Complex64::new(x.sqrt(), 0.0)
    } else {
        below * (-x).sqrt()
    }
}

/// G̃(ω), the emission-side memory spectrum.
pub fn g_tilde(omega: f64, params: &PhysicalParams) -> Complex64 {
    match params.reservoir() {
        Reservoir::FreeSpace { gamma } => Complex64::new(0.5 * gamma, 0.0),
        Reservoir::BandEdge { beta, omega_c } => {
            let x = omega_c - params.omega_a() - omega;
            let den = omega_c.sqrt() + branch_sqrt(x, -Complex64::i());
            -Complex64::i() * beta.powf(1.5) / den
        }
    }
}

/// G̃_c(ω), the conjugate memory spectrum.
pub fn gc_tilde(omega: f64, params: &PhysicalParams) -> Complex64 {
    match params.reservoir() {
        Reservoir::FreeSpace { gamma } => Complex64::new(0.5 * gamma, 0.0),
        Reservoir::BandEdge { beta, omega_c } => {
            let x = omega_c - params.omega_a() + omega;
            let den = omega_c.sqrt() + branch_sqrt(x, Complex64::i());
            Complex64::i() * beta.powf(1.5) / den
        }
    }
}

fn envelope(beta: f64, omega_c: f64, arg: f64, omega: f64) -> Result<f64> {
    if arg <= 0.0 {
        return Err(Error::Domain {
            function: "noise envelope",
            omega,
            reason: "omega_a + omega (+ shift) must be positive",
        });
    }
    Ok(if arg > omega_c {
        beta.powf(1.5) * (arg - omega_c).sqrt() / arg
    } else {
        0.0
    })
}

/// N(ω) = 4 β^{3/2} sqrt(ω_a+ω−ω_c)/(ω_a+ω), zero in the gap.
///
/// In free space the white-noise strength `2 gamma` is returned, which keeps
/// `N = 4 Re G̃` for both reservoirs.
pub fn noise_envelope(omega: f64, params: &PhysicalParams) -> Result<f64> {
    match params.reservoir() {
        Reservoir::FreeSpace { gamma } => Ok(2.0 * gamma),
        Reservoir::BandEdge { beta, omega_c } => {
            Ok(4.0 * envelope(beta, omega_c, params.omega_a() + omega, omega)?)
        }
    }
}

/// (N1, N2): the unscaled envelope at `omega + rabi` and `omega - rabi`.
pub fn noise_envelopes_shifted(omega: f64, params: &PhysicalParams) -> Result<(f64, f64)> {
    match params.reservoir() {
        Reservoir::FreeSpace { gamma } => Ok((0.5 * gamma, 0.5 * gamma)),
        Reservoir::BandEdge { beta, omega_c } => {
            let base = params.omega_a() + omega;
            Ok((
                envelope(beta, omega_c, base + params.rabi(), omega)?,
                envelope(beta, omega_c, base - params.rabi(), omega)?,
            ))
        }
    }
}

/// Frequency at which the band-edge G̃ has its branch point, `omega_c - omega_a`.
pub fn edge_frequency(params: &PhysicalParams) -> Option<f64> {
    match params.reservoir() {
        Reservoir::FreeSpace { .. } => None,
        Reservoir::BandEdge { omega_c, .. } => Some(omega_c - params.omega_a()),
    }
}

/// One row of a kernel dump.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSample {
    pub omega: f64,
    pub g: Complex64,
    pub gc: Complex64,
    /// `None` where the envelope is outside its domain.
    pub n: Option<f64>,
}

pub fn kernel_sample(omega: f64, params: &PhysicalParams) -> KernelSample {
    KernelSample {
        omega,
        g: g_tilde(omega, params),
        gc: gc_tilde(omega, params),
        n: noise_envelope(omega, params).ok(),
    }
}

pub fn kernel_spectra(params: &PhysicalParams, omegas: &[f64]) -> Vec<KernelSample> {
    omegas.par_iter().map(|&w| kernel_sample(w, params)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn band(omega_a: f64, omega_c: f64) -> PhysicalParams {
        PhysicalParams::resonant(omega_a, 0.0, Reservoir::band_edge(1.0, omega_c).unwrap())
            .unwrap()
    }

    #[test]
    fn dos_values() {
        let r = Reservoir::band_edge(1.0, 100.0).unwrap();
        assert_eq!(dos(100.0, &r).unwrap().density, 0.0);
        assert_eq!(dos(50.0, &r).unwrap().density, 0.0);
        assert_eq!(dos(104.0, &r).unwrap().density, 2.0);
        assert!(dos(1.0, &Reservoir::free_space(1.0).unwrap()).is_err());
    }

    #[test]
    fn g_at_edge_zero_argument() {
        let p = band(100.0, 100.0);
        let g = g_tilde(0.0, &p);
        assert!((g - Complex64::new(0.0, -0.1)).norm() < 1e-15);
    }

    #[test]
    fn pure_imaginary_in_gap() {
        let p = band(90.0, 100.0);
        for w in [-50.0, 0.0, 5.0, 9.999] {
            assert_eq!(g_tilde(w, &p).re, 0.0);
            assert_eq!(gc_tilde(-w, &p).re, 0.0);
        }
        assert!(g_tilde(10.5, &p).re > 0.0);
    }

    #[test]
    fn free_space_constant() {
        let p = PhysicalParams::resonant(0.0, 1.0, Reservoir::free_space(3.0).unwrap()).unwrap();
        for w in [-1e3, 0.0, 7.5] {
            assert_eq!(g_tilde(w, &p), Complex64::new(1.5, 0.0));
            assert_eq!(gc_tilde(w, &p), Complex64::new(1.5, 0.0));
            assert_eq!(noise_envelope(w, &p).unwrap(), 6.0);
        }
    }

    #[test]
    fn envelope_values() {
        let p = band(104.0, 100.0);
        assert!((noise_envelope(0.0, &p).unwrap() - 1.0 / 13.0).abs() < 1e-15);
        assert_eq!(noise_envelope(-4.0, &p).unwrap(), 0.0);
        assert!(noise_envelope(-104.0, &p).is_err());
        let p3 = p.with_rabi(3.0).unwrap();
        let (n1, n2) = noise_envelopes_shifted(0.0, &p3).unwrap();
        assert!((n1 - 7f64.sqrt() / 107.0).abs() < 1e-15);
        assert!((n2 - 1.0 / 101.0).abs() < 1e-15);
        let (n1, n2) = noise_envelopes_shifted(-5.0, &p3).unwrap();
        assert!(n1 > 0.0 && n2 == 0.0);
    }

    #[test]
    fn shifted_envelopes_collapse_at_zero_rabi() {
        let p = band(104.0, 100.0);
        for w in [-3.0, 0.0, 2.0, 50.0] {
            let n = noise_envelope(w, &p).unwrap();
            let (n1, n2) = noise_envelopes_shifted(w, &p).unwrap();
            assert_eq!(n1, n2);
            assert!((n1 - n / 4.0).abs() <= 1e-16 * n.max(1.0));
        }
    }

    #[test]
    fn magnitude_peak_at_edge() {
        let p = band(130.0, 100.0);
        let e = edge_frequency(&p).unwrap();
        let peak = g_tilde(e, &p).norm();
        assert!((peak - 0.1).abs() < 1e-15);
        for d in [1e-3, 0.1, 5.0] {
            assert!(g_tilde(e + d, &p).norm() < peak);
            assert!(g_tilde(e - d, &p).norm() < peak);
        }
    }
}
