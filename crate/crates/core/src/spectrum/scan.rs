//! Spectra over a list of transition frequencies near the band edge.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::peaks::{peak_analysis_with, Peak, PeakOptions, PeakTable};
use super::{compute_spectrum_with, GridSpec, PbgSpectrum, SpectrumDiagnostics};
use crate::error::{Error, Result};
use crate::params::{PhysicalParams, Reservoir};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub omega_a: f64,
    /// omega_a - omega_c
    pub offset: f64,
    pub total_power: f64,
    pub coherent_weight: f64,
    pub incoherent_power: f64,
    pub peak_count: usize,
    /// Strongest peak below -rabi/2, within ±rabi/2, above +rabi/2.
    pub lower: Option<Peak>,
    pub center: Option<Peak>,
    pub higher: Option<Peak>,
    pub table: PeakTable,
    pub diagnostics: SpectrumDiagnostics,
}

impl ScanPoint {
    pub fn lower_power(&self) -> f64 {
        self.lower.map_or(0.0, |p| p.power)
    }
    pub fn center_power(&self) -> f64 {
        self.center.map_or(0.0, |p| p.power)
    }
    pub fn higher_power(&self) -> f64 {
        self.higher.map_or(0.0, |p| p.power)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub omega_a: f64,
    pub point: Option<ScanPoint>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
}

impl ScanReport {
    /// Successful points in input order.
    pub fn points(&self) -> Vec<&ScanPoint> {
        self.rows.iter().filter_map(|r| r.point.as_ref()).collect()
    }
}

fn strongest(peaks: &[Peak], keep: impl Fn(f64) -> bool) -> Option<Peak> {
    peaks
        .iter()
        .filter(|p| keep(p.location))
        .max_by(|a, b| a.height.total_cmp(&b.height))
        .copied()
}

fn scan_one(params: &PhysicalParams, omega_a: f64, spec: &GridSpec, options: &PeakOptions) -> Result<ScanPoint> {
    let p = params.with_omega_a(omega_a)?;
    let Reservoir::BandEdge { omega_c, .. } = p.reservoir() else {
        unreachable!("checked by the caller");
    };
    let density = PbgSpectrum::new(&p)?;
    let result = compute_spectrum_with(&density, spec)?;
    let table = peak_analysis_with(&result, &density, options)?;
    let half = 0.5 * p.rabi();
    Ok(ScanPoint {
        omega_a,
        offset: omega_a - omega_c,
        total_power: table.total_power,
        coherent_weight: table.coherent_weight,
        incoherent_power: table.incoherent_power,
        peak_count: table.peaks.len(),
        lower: strongest(&table.peaks, |w| w < -half),
        center: strongest(&table.peaks, |w| w.abs() <= half),
        higher: strongest(&table.peaks, |w| w > half),
        table,
        diagnostics: result.diagnostics,
    })
}

/// Runs the band-edge spectrum for each transition frequency. Failures are
/// recorded per row; the scan itself fails only on invalid input.
pub fn offset_scan(
    params: &PhysicalParams,
    omega_as: &[f64],
    spec: &GridSpec,
    options: &PeakOptions,
) -> Result<ScanReport> {
    if !params.reservoir().is_band_edge() {
        return Err(Error::Unsupported {
            operation: "offset_scan",
            model: "free-space",
        });
    }
    if omega_as.is_empty() {
        return Err(Error::InvalidParameter {
            name: "offsets",
            reason: "offset list is empty".into(),
        });
    }
    spec.validate()?;
    let rows = omega_as
        .par_iter()
        .map(|&w| match scan_one(params, w, spec, options) {
            Ok(point) => ScanRow {
                omega_a: w,
                point: Some(point),
                error: None,
            },
            Err(e) => ScanRow {
                omega_a: w,
                point: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    Ok(ScanReport { rows })
}
