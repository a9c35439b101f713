use pbg_fluorescence::first_order::{order_sweep, FirstOrderSpectrum, OrderComparison};
use pbg_fluorescence::kernels::kernel_spectra;
use pbg_fluorescence::spectrum::{
    compute_spectrum_with, offset_scan, peak_analysis_with, zero_order_density, MollowLimit, SpectralDensity,
};
use pbg_fluorescence::Reservoir;
use serde::Serialize;
use serde_json::json;

use crate::config::{check_range, Format, Model, RunConfig};
use crate::error::CliError;
use crate::output::{num, Csv, Out};

pub fn kernel(cfg: &RunConfig, format: Format, out: &mut Out) -> Result<(), CliError> {
    let (lo, hi) = cfg.kernel_range();
    let n = cfg.kernel.points;
    let omegas: Vec<f64> = (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect();
    let rows = kernel_spectra(&cfg.params, &omegas);
    match format {
        Format::Csv => {
            let mut csv = Csv::new(&["omega", "re_G", "im_G", "re_Gc", "im_Gc", "N"]);
            for r in &rows {
                csv.row(&[
                    num(r.omega),
                    num(r.g.re),
                    num(r.g.im),
                    num(r.gc.re),
                    num(r.gc.im),
                    r.n.map_or_else(|| "nan".into(), num),
                ]);
            }
            out.csv("kernel.csv", csv)
        }
        Format::Json => out.json("kernel.json", "kernel", cfg, json!({ "unit": cfg.params.unit(), "samples": rows })),
    }
}

fn density(cfg: &RunConfig) -> Result<Box<dyn SpectralDensity>, CliError> {
    Ok(match cfg.model {
        Model::Auto => zero_order_density(&cfg.params)?,
        Model::MollowLimit => Box::new(MollowLimit::new(&cfg.params)?),
        Model::FirstOrder => Box::new(FirstOrderSpectrum::new(&cfg.params, cfg.theta)?),
    })
}

pub fn spectrum(cfg: &RunConfig, format: Format, out: &mut Out) -> Result<(), CliError> {
    let d = density(cfg)?;
    check_range(&cfg.grid, d.as_ref())?;
    let result = compute_spectrum_with(d.as_ref(), &cfg.grid)?;
    let table = peak_analysis_with(&result, d.as_ref(), &cfg.peaks)?;
    let summary = json!({
        "unit": result.unit,
        "coherent_weight": result.coherent_weight,
        "coherent_position": result.coherent_position,
        "steady_state": result.steady_state,
        "incoherent_power": table.incoherent_power,
        "total_power": table.total_power,
        "peaks": table.peaks,
        "diagnostics": result.diagnostics,
    });
    match format {
        Format::Csv => {
            let mut csv = Csv::new(&["omega", "s_inc"]);
            for s in &result.samples {
                csv.row(&[num(s.omega), num(s.s_inc)]);
            }
            out.csv("spectrum.csv", csv)?;
            out.json("spectrum.summary.json", "spectrum", cfg, summary)
        }
        Format::Json => {
            let mut body = summary;
            body["samples"] = json!(result.samples);
            out.json("spectrum.json", "spectrum", cfg, body)
        }
    }
}

pub fn scan(cfg: &RunConfig, format: Format, out: &mut Out) -> Result<(), CliError> {
    let Reservoir::BandEdge { omega_c, .. } = cfg.params.reservoir() else {
        return Err(CliError::Config("scan needs a band-edge reservoir".into()));
    };
    if cfg.offsets.is_empty() {
        return Err(CliError::Config("scan needs at least one offset".into()));
    }
    let omega_as: Vec<f64> = cfg.offsets.iter().map(|o| omega_c + o).collect();
    let report = offset_scan(&cfg.params, &omega_as, &cfg.grid, &cfg.peaks)?;
    match format {
        Format::Csv => {
            let mut csv = Csv::new(&[
                "omega_a",
                "offset",
                "total_power",
                "coherent_weight",
                "incoherent_power",
                "peak_count",
                "lower_power",
                "center_power",
                "higher_power",
                "error",
            ]);
            for row in &report.rows {
                match (&row.point, &row.error) {
                    (Some(p), _) => csv.row(&[
                        num(p.omega_a),
                        num(p.offset),
                        num(p.total_power),
                        num(p.coherent_weight),
                        num(p.incoherent_power),
                        p.peak_count.to_string(),
                        num(p.lower_power()),
                        num(p.center_power()),
                        num(p.higher_power()),
                        String::new(),
                    ]),
                    (None, e) => {
                        let mut cells = vec![num(row.omega_a), num(row.omega_a - omega_c)];
                        cells.extend(vec![String::new(); 7]);
                        cells.push(csv_text(e.as_deref().unwrap_or("unknown")));
                        csv.row(&cells);
                    }
                }
            }
            out.csv("scan.csv", csv)
        }
        Format::Json => out.json("scan.json", "scan", cfg, &report),
    }
}

#[derive(Serialize)]
struct OrderRow {
    rabi: f64,
    #[serde(flatten)]
    comparison: Option<OrderComparison>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

pub fn order_check(cfg: &RunConfig, format: Format, out: &mut Out) -> Result<(), CliError> {
    if !cfg.params.reservoir().is_band_edge() {
        return Err(CliError::Config("order-check needs a band-edge reservoir".into()));
    }
    let rabis = if cfg.rabis.is_empty() {
        vec![cfg.params.rabi()]
    } else {
        cfg.rabis.clone()
    };
    let rows: Vec<OrderRow> = order_sweep(&cfg.params, &rabis, &cfg.grid)
        .into_iter()
        .zip(&rabis)
        .map(|(r, &rabi)| match r {
            Ok(c) => OrderRow {
                rabi,
                comparison: Some(c),
                error: None,
            },
            Err(e) => OrderRow {
                rabi,
                comparison: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    match format {
        Format::Json => out.json("order_check.json", "order-check", cfg, json!({ "comparisons": rows })),
        Format::Csv => {
            let mut csv = Csv::new(&[
                "rabi",
                "max_relative",
                "max_pointwise_relative",
                "integrated_relative",
                "power_zero",
                "power_first",
                "coherent_zero",
                "coherent_first",
                "max_imaginary_ratio",
                "error",
            ]);
            for r in &rows {
                let mut cells = vec![num(r.rabi)];
                match &r.comparison {
                    Some(c) => {
                        cells.extend(
                            [
                                c.max_relative,
                                c.max_pointwise_relative,
                                c.integrated_relative,
                                c.power_zero,
                                c.power_first,
                                c.coherent_zero,
                                c.coherent_first,
                                c.max_imaginary_ratio,
                            ]
                            .map(num),
                        );
                        cells.push(String::new());
                    }
                    None => {
                        cells.extend(vec![String::new(); 8]);
                        cells.push(csv_text(r.error.as_deref().unwrap_or("unknown")));
                    }
                }
                csv.row(&cells);
            }
            out.csv("order_check.csv", csv)
        }
    }
}

fn csv_text(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}
