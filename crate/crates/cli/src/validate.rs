//! Oracle suite behind the `validate` subcommand.

use std::f64::consts::PI;

use pbg_fluorescence::bloch::steady_state;
use pbg_fluorescence::oracle::{
    integrate_markovian_bloch, kernel_transform_check, regression_spectrum, BlochVector, KernelCheckOptions,
    RegressionOptions,
};
use pbg_fluorescence::spectrum::{compute_spectrum, spectrum_on_grid, total_power, FreeSpaceSpectrum, GridSpec};
use pbg_fluorescence::{PhysicalParams, Reservoir, Result};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// None when the check could not be evaluated.
    pub value: Option<f64>,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub free_space: PhysicalParams,
    pub band_edge: PhysicalParams,
    pub checks: Vec<Check>,
}

fn check(name: &'static str, tolerance: f64, run: impl FnOnce() -> Result<(f64, String)>) -> Check {
    match run() {
        Ok((value, detail)) => Check {
            name,
            passed: value <= tolerance,
            value: Some(value),
            tolerance,
            detail,
        },
        Err(e) => Check {
            name,
            passed: false,
            value: None,
            tolerance,
            detail: e.to_string(),
        },
    }
}

/// The configured parameters are validated in their own model; the other
/// model gets a fixed reference point.
pub fn suite(params: &PhysicalParams) -> Result<ValidationReport> {
    let free = match params.reservoir() {
        Reservoir::FreeSpace { .. } => *params,
        _ => PhysicalParams::detuned(1000.0, 0.5, 2.0, Reservoir::free_space(1.0)?)?,
    };
    let band = match params.reservoir() {
        Reservoir::BandEdge { .. } => *params,
        _ => PhysicalParams::resonant(100.27, 0.25, Reservoir::band_edge(1.0, 100.0)?)?,
    };
    let Reservoir::FreeSpace { gamma } = free.reservoir() else {
        unreachable!()
    };
    let span = 3.0 * free.rabi().max(gamma) + free.delta().abs();

    let mut checks = Vec::new();
    checks.push(check("bloch-relaxation", 1e-8, || {
        let t = 60.0 / gamma;
        let traj = integrate_markovian_bloch(&free, BlochVector::ground(), t, 1e-12, 20)?;
        let end = traj.last().expect("trajectory has samples");
        let ss = steady_state(&free)?;
        let err = (end.sigma_z.re - ss.sigma_z)
            .abs()
            .max((end.sigma_minus - ss.sigma_minus).norm());
        Ok((err, format!("t = {t}, sigma_z = {}", end.sigma_z.re)))
    }));
    checks.push(check("regression-vs-closed-form", 1e-6, || {
        let omegas: Vec<f64> = (0..41).map(|k| -span + 2.0 * span * k as f64 / 40.0).collect();
        let oracle = regression_spectrum(&free, &omegas, &RegressionOptions::default())?;
        let exact = spectrum_on_grid(&FreeSpaceSpectrum::new(&free)?, &omegas)?;
        let scale = exact.max_s_inc();
        let err = oracle
            .result
            .samples
            .iter()
            .zip(&exact.samples)
            .map(|(a, b)| (a.s_inc - b.s_inc).abs() / b.s_inc.max(1e-12 * scale))
            .fold(0.0, f64::max);
        Ok((err, format!("{} points on [{}, {}]", omegas.len(), -span, span)))
    }));
    checks.push(check("total-power-vs-g1", 1e-6, || {
        let r = compute_spectrum(&free, &GridSpec::default())?;
        let ss = steady_state(&free)?;
        let g1 = 4.0 * PI * PI * (1.0 + ss.sigma_z) / 2.0;
        let p = total_power(&r)?;
        Ok(((p - g1).abs() / g1, format!("power {p}, 4 pi^2 g1(0) {g1}")))
    }));
    let kernel = kernel_transform_check(&band, &KernelCheckOptions::default());
    checks.push(check("kernel-transform", 1e-4, || {
        let k = kernel.clone()?;
        Ok((
            k.max_relative_residual,
            format!("{} points, worst at omega = {}", k.points, k.worst_omega),
        ))
    }));
    checks.push(check("kernel-causality", 1e-4, || {
        let k = kernel.clone()?;
        Ok((k.causality_ratio, format!("t0 = {}", k.t0)))
    }));
    checks.push(check("kernel-in-gap-imaginary", 1e-10, || {
        let k = kernel?;
        Ok((k.in_gap_max_real_ratio, format!("{} points inside the gap", k.in_gap_points)))
    }));

    Ok(ValidationReport {
        passed: checks.iter().all(|c| c.passed),
        free_space: free,
        band_edge: band,
        checks,
    })
}
