//! Python bindings: parameters, steady state, kernels, spectra and scans.

use pbg_fluorescence::bloch::steady_state as solve_steady_state;
use pbg_fluorescence::first_order::{FirstOrderSpectrum, ThetaConvention};
use pbg_fluorescence::kernels::kernel_spectra;
use pbg_fluorescence::spectrum::{
    compute_spectrum_with, offset_scan, peak_analysis_with, zero_order_density, GridSpec, MollowLimit, PeakOptions,
    SpectralDensity,
};
use pbg_fluorescence::{Error, PhysicalParams, Reservoir};
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn py_err(e: Error) -> PyErr {
    if e.is_conditioning() {
        PyArithmeticError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

/// Validated atom, drive and reservoir frequencies.
#[pyclass(frozen, name = "Params", from_py_object)]
#[derive(Clone, Copy)]
struct PyParams(PhysicalParams);

#[pymethods]
impl PyParams {
    #[staticmethod]
    #[pyo3(signature = (gamma, rabi, delta = 0.0, omega_a = 1000.0))]
    fn free_space(gamma: f64, rabi: f64, delta: f64, omega_a: f64) -> PyResult<Self> {
        let r = Reservoir::free_space(gamma).map_err(py_err)?;
        PhysicalParams::detuned(omega_a, delta, rabi, r).map(PyParams).map_err(py_err)
    }

    #[staticmethod]
    #[pyo3(signature = (beta, omega_c, omega_a, rabi, delta = 0.0))]
    fn band_edge(beta: f64, omega_c: f64, omega_a: f64, rabi: f64, delta: f64) -> PyResult<Self> {
        let r = Reservoir::band_edge(beta, omega_c).map_err(py_err)?;
        PhysicalParams::detuned(omega_a, delta, rabi, r).map(PyParams).map_err(py_err)
    }

    #[getter]
    fn omega_a(&self) -> f64 {
        self.0.omega_a()
    }

    #[getter]
    fn rabi(&self) -> f64 {
        self.0.rabi()
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.0.delta()
    }

    #[getter]
    fn unit(&self) -> String {
        self.0.unit().to_string()
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

/// (sigma_z, sigma_minus) at steady state.
#[pyfunction]
fn steady_state(params: PyParams) -> PyResult<(f64, num_complex::Complex64)> {
    let ss = solve_steady_state(&params.0).map_err(py_err)?;
    Ok((ss.sigma_z, ss.sigma_minus))
}

/// Rows (omega, G, Gc, N); N is None outside its domain.
#[pyfunction]
fn kernel(
    params: PyParams,
    omegas: Vec<f64>,
) -> Vec<(f64, num_complex::Complex64, num_complex::Complex64, Option<f64>)> {
    kernel_spectra(&params.0, &omegas)
        .into_iter()
        .map(|k| (k.omega, k.g, k.gc, k.n))
        .collect()
}

fn density(params: &PhysicalParams, model: &str) -> PyResult<Box<dyn SpectralDensity>> {
    match model {
        "auto" => zero_order_density(params).map_err(py_err),
        "mollow-limit" => Ok(Box::new(MollowLimit::new(params).map_err(py_err)?)),
        "first-order" => Ok(Box::new(
            FirstOrderSpectrum::new(params, ThetaConvention::Symmetric).map_err(py_err)?,
        )),
        other => Err(PyValueError::new_err(format!(
            "unknown model `{other}`, expected auto, mollow-limit or first-order"
        ))),
    }
}

/// Incoherent spectrum on an adaptive grid, with its peak table.
#[pyfunction]
#[pyo3(signature = (params, model = "auto"))]
fn spectrum<'py>(py: Python<'py>, params: PyParams, model: &str) -> PyResult<Bound<'py, PyDict>> {
    let d = density(&params.0, model)?;
    let r = compute_spectrum_with(d.as_ref(), &GridSpec::default()).map_err(py_err)?;
    let t = peak_analysis_with(&r, d.as_ref(), &PeakOptions::default()).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("omega", r.omegas())?;
    out.set_item("s_inc", r.values())?;
    out.set_item("coherent_weight", r.coherent_weight)?;
    out.set_item("incoherent_power", t.incoherent_power)?;
    out.set_item("total_power", t.total_power)?;
    let peaks: Vec<(f64, f64, Option<f64>, f64)> =
        t.peaks.iter().map(|p| (p.location, p.height, p.fwhm, p.power)).collect();
    out.set_item("peaks", peaks)?;
    out.set_item("unit", r.unit.to_string())?;
    Ok(out)
}

/// Rows (offset, total_power, peak_count) for omega_a = omega_c + offset;
/// failed points come back as (offset, None, None).
#[pyfunction]
fn scan(params: PyParams, offsets: Vec<f64>) -> PyResult<Vec<(f64, Option<f64>, Option<usize>)>> {
    let Reservoir::BandEdge { omega_c, .. } = params.0.reservoir() else {
        return Err(PyValueError::new_err("scan needs a band-edge reservoir"));
    };
    let omega_as: Vec<f64> = offsets.iter().map(|o| omega_c + o).collect();
    let report = offset_scan(&params.0, &omega_as, &GridSpec::default(), &PeakOptions::default()).map_err(py_err)?;
    Ok(report
        .rows
        .iter()
        .zip(&offsets)
        .map(|(row, &o)| match &row.point {
            Some(p) => (o, Some(p.total_power), Some(p.peak_count)),
            None => (o, None, None),
        })
        .collect())
}

#[pymodule]
fn pbgfluor(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParams>()?;
    m.add_function(wrap_pyfunction!(steady_state, m)?)?;
    m.add_function(wrap_pyfunction!(kernel, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
