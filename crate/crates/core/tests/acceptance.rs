//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Tolerances are pinned here.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

use pbg_fluorescence::bloch::{steady_state, system_matrix};
use pbg_fluorescence::first_order::{first_order_system, order_comparison};
use pbg_fluorescence::kernels::{g_tilde, gc_tilde, noise_envelope};
use pbg_fluorescence::oracle::{
    integrate_markovian_bloch, kernel_transform_check, regression_spectrum, BlochVector, KernelCheckOptions,
    MarkovianGenerator, RegressionOptions,
};
use pbg_fluorescence::spectrum::{
    compute_spectrum, compute_spectrum_with, offset_scan, peak_analysis_with, FreeSpaceSpectrum, GridSpec,
    PbgSpectrum, PeakOptions, ScanPoint, SpectralDensity,
};
use pbg_fluorescence::{PhysicalParams, Reservoir};

const SEED: u64 = 20_240_611;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn free(gamma: f64, rabi: f64, delta: f64) -> PhysicalParams {
    PhysicalParams::detuned(1000.0, delta, rabi, Reservoir::free_space(gamma).unwrap()).unwrap()
}

fn band(omega_a: f64, rabi: f64) -> PhysicalParams {
    PhysicalParams::resonant(omega_a, rabi, Reservoir::band_edge(1.0, 100.0).unwrap()).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Geometric sequence from `hi` down to `lo`.
fn geometric(hi: f64, lo: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| hi * (lo / hi).powf(k as f64 / (n - 1) as f64))
        .collect()
}

fn mollow_triplet() -> Outcome {
    let p = free(1.0, 20.0, 0.0);
    let density = FreeSpaceSpectrum::new(&p).unwrap();
    let result = compute_spectrum_with(&density, &GridSpec::default()).unwrap();
    let table = peak_analysis_with(&result, &density, &PeakOptions::default()).unwrap();
    let find = |w: f64| table.nearest(w, 1.0).copied();
    let (Some(lo), Some(c), Some(hi)) = (find(-20.0), find(0.0), find(20.0)) else {
        return outcome(false, format!("expected peaks at -Ω, 0, Ω; found {}", table.peaks.len()));
    };
    let r_lo = c.height / lo.height / 3.0;
    let r_hi = c.height / hi.height / 3.0;
    let widths = [lo.fwhm, c.fwhm, hi.fwhm];
    let expect = [1.5, 1.0, 1.5];
    let werr = widths
        .iter()
        .zip(expect)
        .map(|(w, e)| w.map_or(f64::INFINITY, |w| rel(w, e)))
        .fold(0.0, f64::max);
    let herr = (r_lo - 1.0).abs().max((r_hi - 1.0).abs());
    outcome(
        herr < 0.03 && werr < 0.03 && table.peaks.len() == 3,
        format!(
            "heights 1:{:.4}:{:.4} (max ratio error {:.2e}, tol 3e-2); FWHM {:.4}/{:.4}/{:.4} Γ (max error {:.2e}, tol 3e-2)",
            c.height / lo.height,
            hi.height / lo.height,
            herr,
            widths[0].unwrap_or(f64::NAN),
            widths[1].unwrap_or(f64::NAN),
            widths[2].unwrap_or(f64::NAN),
            werr
        ),
    )
}

fn closed_form_vs_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..20 {
        let gamma = rng.random_range(0.5..2.0);
        let rabi = gamma * rng.random_range(0.5..8.0);
        let delta = gamma * rng.random_range(-3.0..3.0);
        let p = free(gamma, rabi, delta);
        let omegas: Vec<f64> = (0..61).map(|k| -3.0 * rabi + rabi * k as f64 / 10.0).collect();
        let density = FreeSpaceSpectrum::new(&p).unwrap();
        match regression_spectrum(&p, &omegas, &RegressionOptions::default()) {
            Ok(r) => {
                for s in &r.result.samples {
                    worst = worst.max(rel(s.s_inc, density.incoherent(s.omega).value));
                }
                worst = worst.max(rel(r.result.coherent_weight, density.coherent_weight()));
            }
            Err(_) => failures += 1,
        }
    }
    outcome(
        failures == 0 && worst < 1e-6,
        format!("20 random (Γ, Ω, Δ), 61 points each: max relative deviation {worst:.2e} (tol 1e-6), oracle failures {failures}"),
    )
}

fn kernel_identities() -> Outcome {
    let p = band(100.27, 0.25);
    let omega_c = 100.0;
    let n = 10_000;
    let (mut n_err, mut c_err): (f64, f64) = (0.0, 0.0);
    for k in 0..n {
        let w = -10.0 * omega_c + 20.0 * omega_c * k as f64 / (n - 1) as f64;
        let g = g_tilde(w, &p);
        let expect = 4.0 * g.re;
        let got = noise_envelope(w, &p).unwrap_or(0.0);
        n_err = n_err.max((got - expect).abs() / g.norm());
        c_err = c_err.max((gc_tilde(w, &p) - g_tilde(-w, &p).conj()).norm() / g.norm());
    }
    // |G̃| peaks at the edge; bisect the half-maximum on both sides
    let edge = omega_c - p.omega_a();
    let half = 0.5 * g_tilde(edge, &p).norm();
    let cross = |mut inside: f64, mut outside: f64| {
        for _ in 0..200 {
            let m = 0.5 * (inside + outside);
            if g_tilde(m, &p).norm() > half {
                inside = m;
            } else {
                outside = m;
            }
        }
        0.5 * (inside + outside)
    };
    let fwhm = cross(edge, edge + 100.0 * omega_c) - cross(edge, edge - 100.0 * omega_c);
    let check = kernel_transform_check(&p, &KernelCheckOptions::default());
    let (resid, causal) = match &check {
        Ok(r) => (r.max_relative_residual, r.causality_ratio),
        Err(_) => (f64::INFINITY, f64::INFINITY),
    };
    outcome(
        n_err < 1e-12 && c_err < 1e-12 && rel(fwhm, 4.0 * omega_c) < 1e-3 && causal < 1e-4 && resid < 1e-4,
        format!(
            "|N − 4ReG̃| {n_err:.1e}, |G̃_c − G̃*(−ω)| {c_err:.1e} (tol 1e-12, 1e4 points); FWHM {:.6} ω_c (tol 1e-3); causality {causal:.1e} (tol 1e-4); transform residual {resid:.1e} (tol 1e-4)",
            fwhm / omega_c
        ),
    )
}

fn band_gap_edge() -> Outcome {
    let p = band(100.27, 0.25);
    let density = PbgSpectrum::new(&p).unwrap();
    let edge = density.edge();
    let result = compute_spectrum_with(&density, &GridSpec::default()).unwrap();
    let min_support = result
        .samples
        .iter()
        .find(|s| s.s_inc > 0.0)
        .map_or(f64::NAN, |s| s.omega);
    // exact zeros below the edge, on the grid and on a dense probe
    let below_grid = result.samples.iter().filter(|s| s.omega < edge).all(|s| s.s_inc == 0.0);
    let below_probe = (1..=2000)
        .map(|k| edge - 1e-9 * 1.01f64.powi(k))
        .all(|w| density.incoherent(w).value == 0.0);
    let h = 1e-7;
    let s = |w: f64| density.incoherent(w).value;
    let right = (s(edge + 2.0 * h) - s(edge + h)) / h;
    let left = (s(edge - h) - s(edge - 2.0 * h)) / h;
    let ratio = if left == 0.0 { f64::INFINITY } else { (right / left).abs() };
    // square-root onset: S(e + 4h)/S(e + h) → 2
    let onset = s(edge + 4e-8) / s(edge + 1e-8);
    outcome(
        below_grid && below_probe && ratio > 10.0 && (edge + 0.27).abs() < 1e-12,
        format!(
            "edge at {edge:.6} β, first nonzero sample at {min_support:.9} β, zero below edge (grid {below_grid}, probe {below_probe}); slope right/left {ratio:.3e} (tol > 10); S(e+4h)/S(e+h) = {onset:.4}"
        ),
    )
}

fn regime_recovery() -> Outcome {
    let p = band(1000.0, 0.25);
    let density = PbgSpectrum::new(&p).unwrap();
    let result = compute_spectrum_with(&density, &GridSpec::default()).unwrap();
    let table = peak_analysis_with(&result, &density, &PeakOptions::default()).unwrap();
    let find = |w: f64| table.nearest(w, 0.1).copied();
    let triplet = match (find(-0.25), find(0.0), find(0.25)) {
        (Some(a), Some(b), Some(c)) if table.peaks.len() == 3 => Some((b.height / a.height, c.height / a.height)),
        _ => None,
    };
    let dev = triplet.map_or(f64::INFINITY, |(c, h)| rel(c, 3.0).max(rel(h, 1.0)));

    let offsets = geometric(10.0, 0.1, 10);
    let omegas: Vec<f64> = offsets.iter().map(|o| 100.0 + o).collect();
    let scan = offset_scan(&p, &omegas, &GridSpec::default(), &PeakOptions::default()).unwrap();
    let pts = scan.points();
    let complete = pts.len() == offsets.len();
    let higher: Vec<f64> = pts.iter().map(|q| q.higher_power()).collect();
    let monotone = higher.windows(2).all(|w| w[1] > w[0]);
    let counts: Vec<usize> = pts.iter().map(|q| q.peak_count).collect();
    let drops = counts.first() == Some(&3)
        && counts.last() == Some(&2)
        && counts.windows(2).all(|w| w[1] <= w[0]);
    let transition = pts.iter().find(|q| q.peak_count == 2).map_or(f64::NAN, |q| q.offset);
    outcome(
        dev < 0.1 && complete && monotone && drops,
        format!(
            "ω_a = 1000β heights 1:{:.4}:{:.4} (deviation {dev:.2e}, tol 0.1); 10-point scan 10β→0.1β: higher-peak power {:.3}→{:.3} monotone {monotone}; peak counts {counts:?}, two peaks from offset {transition:.3} β",
            triplet.map_or(f64::NAN, |t| t.0),
            triplet.map_or(f64::NAN, |t| t.1),
            higher.first().copied().unwrap_or(f64::NAN),
            higher.last().copied().unwrap_or(f64::NAN),
        ),
    )
}

/// Power change per unit decrease of ln(offset), between two scan points.
fn log_slope(a: &ScanPoint, b: &ScanPoint) -> f64 {
    (b.total_power - a.total_power) / (a.offset.ln() - b.offset.ln())
}

fn three_regions() -> Outcome {
    let rabi = 0.25;
    let p = band(1000.0, rabi);
    let offsets = geometric(10.0, 0.02, 20);
    let omegas: Vec<f64> = offsets.iter().map(|o| 100.0 + o).collect();
    let scan = offset_scan(&p, &omegas, &GridSpec::default(), &PeakOptions::default()).unwrap();
    let pts = scan.points();
    if pts.len() != offsets.len() {
        return outcome(false, format!("{} of {} scan points failed", offsets.len() - pts.len(), offsets.len()));
    }
    let r1: Vec<&ScanPoint> = pts.iter().copied().filter(|q| q.offset >= 4.0 * rabi).collect();
    let r3: Vec<&ScanPoint> = pts.iter().copied().filter(|q| q.peak_count < 3).collect();
    let r2: Vec<&ScanPoint> = pts
        .iter()
        .copied()
        .filter(|q| q.offset < 4.0 * rabi && q.peak_count == 3)
        .collect();
    if r1.len() < 2 || r2.is_empty() || r3.len() < 2 {
        return outcome(false, format!("regions too small: {} / {} / {}", r1.len(), r2.len(), r3.len()));
    }
    let p1: Vec<f64> = r1.iter().map(|q| q.total_power).collect();
    let mean1 = p1.iter().sum::<f64>() / p1.len() as f64;
    let spread1 = (p1.iter().copied().fold(f64::MIN, f64::max) - p1.iter().copied().fold(f64::MAX, f64::min)) / mean1;
    // region 2 runs from the last flat point to the first two-peak point
    let mut chain = vec![*r1.last().unwrap()];
    chain.extend(r2.iter().copied());
    chain.push(r3[0]);
    let rising = chain.windows(2).all(|w| w[1].total_power > w[0].total_power);
    let slope2 = log_slope(chain[0], chain[chain.len() - 1]);
    let slope3 = log_slope(r3[0], r3[r3.len() - 1]).abs();
    let ratio = slope3 / slope2;
    outcome(
        spread1 < 0.05 && rising && slope2 > 0.0 && ratio < 0.1,
        format!(
            "20-point scan 10β→0.02β: region 1 ({} pts, offset ≥ 4Ω) variation {spread1:.2e} (tol 5e-2); region 2 ({} pts) strictly increasing {rising}, slope {slope2:.3}/ln-step; region 3 ({} pts, two peaks) slope {slope3:.2e} = {ratio:.3} of region 2 (tol 0.1)",
            r1.len(),
            r2.len(),
            r3.len()
        ),
    )
}

fn steady_state_identities() -> Outcome {
    let mut sz_err: f64 = 0.0;
    let mut coh_err: f64 = 0.0;
    for (gamma, rabi) in [(1.0, 0.3), (1.0, 1.0), (0.5, 3.0), (2.0, 10.0)] {
        let p = free(gamma, rabi, 0.0);
        let expect = -gamma * gamma / (gamma * gamma + 2.0 * rabi * rabi);
        let ss = steady_state(&p).unwrap();
        let fixed = MarkovianGenerator::new(&p).unwrap().fixed_point().unwrap();
        let traj = integrate_markovian_bloch(&p, BlochVector::ground(), 80.0 / gamma, 1e-12, 1).unwrap();
        let end = traj.last().unwrap();
        for v in [ss.sigma_z, fixed[2].re, end.sigma_z.re] {
            sz_err = sz_err.max((v - expect).abs());
        }
        sz_err = sz_err.max((end.sigma_minus - ss.sigma_minus).norm());
        let d = FreeSpaceSpectrum::new(&p).unwrap();
        coh_err = coh_err.max(rel(d.coherent_weight(), 4.0 * PI * PI * ss.sigma_minus.norm_sqr()));
    }
    for omega_a in [100.27, 101.0, 1000.0] {
        let p = band(omega_a, 0.25);
        let d = PbgSpectrum::new(&p).unwrap();
        let ss = steady_state(&p).unwrap();
        coh_err = coh_err.max(rel(d.coherent_weight(), 4.0 * PI * PI * ss.sigma_minus.norm_sqr()));
    }
    let mut zero = true;
    for p in [free(1.0, 0.0, 0.0), free(1.0, 0.0, 0.5), band(100.27, 0.0), band(1000.0, 0.0)] {
        let r = compute_spectrum(&p, &GridSpec::default()).unwrap();
        zero &= r.coherent_weight == 0.0 && r.samples.iter().all(|s| s.s_inc == 0.0);
    }
    outcome(
        sz_err < 1e-8 && coh_err < 1e-10 && zero,
        format!("⟨σ_z⟩ vs −Γ²/(Γ²+2Ω²), fixed point and trajectory: {sz_err:.1e} (tol 1e-8); coherent weight vs 4π²|⟨σ_-⟩|²: {coh_err:.1e} (tol 1e-10); Ω = 0 spectra zero: {zero}"),
    )
}

fn max_entry_diff(a: &nalgebra::Matrix3<Complex64>, b: &nalgebra::Matrix3<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn first_order_reduction() -> Outcome {
    let mut exact: f64 = 0.0;
    let grid: Vec<f64> = (0..401).map(|k| -50.0 + 0.25 * k as f64).collect();
    for &w in &grid {
        let p = band(100.27, 0.0);
        let (a, b) = (first_order_system(w, &p), system_matrix(w, &p));
        exact = exact.max(max_entry_diff(&a.matrix, &b.matrix));
        exact = exact.max((a.delta_source - b.delta_source).norm());
        for (rabi, delta) in [(0.7, 0.0), (5.0, 1.5), (40.0, -2.0)] {
            let p = free(1.0, rabi, delta);
            let (a, b) = (first_order_system(w, &p), system_matrix(w, &p));
            exact = exact.max(max_entry_diff(&a.matrix, &b.matrix));
            exact = exact.max((a.delta_source - b.delta_source).norm());
        }
    }
    let mut dev: f64 = 0.0;
    let mut parts = Vec::new();
    for omega_a in [1000.0, 300.0] {
        let p = band(omega_a, 0.1);
        match order_comparison(&p, &GridSpec::default()) {
            Ok(c) => {
                dev = dev.max(c.max_relative);
                parts.push(format!("ω_a = {omega_a}β: {:.2e}", c.max_relative));
            }
            Err(e) => {
                dev = f64::INFINITY;
                parts.push(format!("ω_a = {omega_a}β: {e}"));
            }
        }
    }
    outcome(
        exact == 0.0 && dev < 0.01,
        format!(
            "Ω = 0 and free-space systems identical (max entry difference {exact:.1e}); Ω/ω_c = 1e-3 max deviation |S1 − S0|/max S0: {} (tol 1e-2)",
            parts.join(", ")
        ),
    )
}

fn nonnegativity_sweep() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED + 9);
    let mut configs = Vec::new();
    for k in 0..50 {
        if k % 2 == 0 {
            let gamma = rng.random_range(0.1..3.0);
            let rabi = gamma * rng.random_range(0.05..30.0);
            let delta = gamma * rng.random_range(-5.0..5.0);
            configs.push(free(gamma, rabi, delta));
        } else {
            let beta = rng.random_range(0.5..2.0);
            let omega_c = rng.random_range(20.0..200.0);
            let offset = beta * 10f64.powf(rng.random_range(-1.5..3.0));
            let rabi = beta * 10f64.powf(rng.random_range(-2.0..0.0));
            let r = Reservoir::band_edge(beta, omega_c).unwrap();
            configs.push(PhysicalParams::resonant(omega_c + offset, rabi, r).unwrap());
        }
    }
    let mut worst: f64 = 0.0;
    let mut failed = 0;
    for p in &configs {
        match compute_spectrum(p, &GridSpec::default()) {
            Ok(r) if r.diagnostics.max_raw > 0.0 => {
                worst = worst.min(r.diagnostics.min_raw / r.diagnostics.max_raw);
            }
            Ok(_) => {}
            Err(_) => failed += 1,
        }
    }
    outcome(
        worst >= -1e-10 && failed == 0,
        format!("50 configurations (25 free-space, 25 band-edge): min s_inc / max s_inc = {worst:.2e} (tol −1e-10), failures {failed}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 9] = [
        ("Mollow triplet ratios", mollow_triplet, Duration::from_secs(1)),
        ("closed form vs regression oracle", closed_form_vs_oracle, Duration::from_secs(30)),
        ("kernel identities", kernel_identities, Duration::from_secs(10)),
        ("band-gap support and edge", band_gap_edge, Duration::from_secs(5)),
        ("regime recovery", regime_recovery, Duration::from_secs(60)),
        ("three-region total power", three_regions, Duration::from_secs(60)),
        ("steady-state identities", steady_state_identities, Duration::from_secs(5)),
        ("first-order reduction", first_order_reduction, Duration::from_secs(30)),
        ("nonnegativity sweep", nonnegativity_sweep, Duration::from_secs(120)),
    ];
    let mut all = true;
    for (k, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let pass = o.pass && elapsed <= *budget;
        all &= pass;
        println!(
            "acceptance {} {}: {name}: {} [{:.2} s, budget {} s]",
            k + 1,
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
