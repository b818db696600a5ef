//! Python bindings: parameter set, amplitude solvers, correlation
//! functions, the optimal-drive condition and config-driven sweeps.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use magnon_blockade as mb;
use magnon_blockade::sweep;

fn err(e: mb::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_mode(s: &str) -> PyResult<mb::Mode> {
    mb::Mode::parse(s).map_err(err)
}

/// Physical parameters in units of the magnon linewidth `kappa_m`.
#[pyclass(name = "SystemParams")]
#[derive(Clone)]
struct PySystemParams {
    inner: mb::SystemParams,
}

#[pymethods]
impl PySystemParams {
    #[new]
    #[pyo3(signature = (**kwargs))]
    fn new(kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut p = mb::SystemParams::default();
        if let Some(kwargs) = kwargs {
            for (key, value) in kwargs.iter() {
                let key: String = key.extract()?;
                let v: f64 = value.extract()?;
                match key.as_str() {
                    "delta_c" => p.delta_c = v,
                    "delta_m" => p.delta_m = v,
                    "j" => p.j = v,
                    "g_a" => p.g_a = v,
                    "g_b" => p.g_b = v,
                    "e" => {
                        p.e_l = v;
                        p.e_r = v;
                    }
                    "e_l" => p.e_l = v,
                    "e_r" => p.e_r = v,
                    "phi" => p.phi = v,
                    "o_drive" => p.o_drive = v,
                    "kappa_a" => p.kappa_a = v,
                    "kappa_b" => p.kappa_b = v,
                    "kappa_c" => {
                        p.kappa_a = v;
                        p.kappa_b = v;
                    }
                    "kappa_m" => p.kappa_m = v,
                    "unit_scale_mhz" => p.unit_scale_mhz = Some(v),
                    other => {
                        return Err(PyValueError::new_err(format!(
                            "unknown parameter `{other}`"
                        )))
                    }
                }
            }
        }
        p.validate().map_err(err)?;
        Ok(Self { inner: p })
    }

    /// Rescale all rates by kappa_m so that kappa_m = 1.
    fn normalized(&self) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.normalized().map_err(err)?,
        })
    }

    /// The a<->b relabel (reversed bias field).
    fn swapped(&self) -> Self {
        Self {
            inner: self.inner.swapped(),
        }
    }

    fn as_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        let p = &self.inner;
        d.set_item("delta_c", p.delta_c)?;
        d.set_item("delta_m", p.delta_m)?;
        d.set_item("j", p.j)?;
        d.set_item("g_a", p.g_a)?;
        d.set_item("g_b", p.g_b)?;
        d.set_item("e_l", p.e_l)?;
        d.set_item("e_r", p.e_r)?;
        d.set_item("phi", p.phi)?;
        d.set_item("o_drive", p.o_drive)?;
        d.set_item("kappa_a", p.kappa_a)?;
        d.set_item("kappa_b", p.kappa_b)?;
        d.set_item("kappa_m", p.kappa_m)?;
        d.set_item("unit_scale_mhz", p.unit_scale_mhz)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }

    #[setter]
    fn set_phi(&mut self, v: f64) {
        self.inner.phi = v;
    }

    #[getter]
    fn get_phi(&self) -> f64 {
        self.inner.phi
    }

    #[setter]
    fn set_e(&mut self, v: f64) {
        self.inner.e_l = v;
        self.inner.e_r = v;
    }

    #[getter]
    fn get_e(&self) -> PyResult<f64> {
        self.inner.drive_amplitude().map_err(err)
    }
}

/// Complex detunings `(delta_c - i kappa_c / 2, delta_m - i kappa_m / 2)`.
#[pyfunction]
fn complex_detunings(params: &PySystemParams) -> PyResult<(Complex64, Complex64)> {
    let d = mb::complex_detunings(&params.inner).map_err(err)?;
    Ok((d.dt_c, d.dt_m))
}

fn amplitudes_to_dict<'py>(py: Python<'py>, amps: &mb::Amplitudes) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for (label, value) in amps.entries() {
        d.set_item(format!("c{label}"), value)?;
    }
    Ok(d)
}

/// Ten closed-form amplitudes keyed `c000` ... `c002`.
#[pyfunction]
fn closed_form_amplitudes<'py>(
    py: Python<'py>,
    params: &PySystemParams,
) -> PyResult<Bound<'py, PyDict>> {
    let amps = mb::closed_form_amplitudes(&params.inner).map_err(err)?;
    amplitudes_to_dict(py, &amps)
}

/// Ten amplitudes from the independent block solve of the effective
/// Hamiltonian (the oracle route).
#[pyfunction]
fn truncated_solve<'py>(py: Python<'py>, params: &PySystemParams) -> PyResult<Bound<'py, PyDict>> {
    let amps = mb::truncated_solve(&params.inner).map_err(err)?;
    amplitudes_to_dict(py, &amps)
}

/// Weak-drive correlation `2 |C2|^2 / |C1|^4` for mode "a" or "b".
#[pyfunction]
fn g2_analytic(params: &PySystemParams, mode: &str) -> PyResult<f64> {
    let amps = mb::closed_form_amplitudes(&params.inner).map_err(err)?;
    mb::g2_analytic(&amps, parse_mode(mode)?).map_err(err)
}

/// `(e_opt, phi_opt, phase_degenerate)` nulling the pair amplitude c200.
#[pyfunction]
fn optimal_drive(params: &PySystemParams) -> PyResult<(f64, f64, bool)> {
    let d = mb::optimal_drive(&params.inner).map_err(err)?;
    Ok((d.e_opt, d.phi_opt, d.phase_degenerate))
}

/// Master-equation steady-state observables at truncation `n_max`:
/// dict with g2_a, g2_b, n_a, n_m, n_b (g2 entries are None for an
/// empty mode).
#[pyfunction]
#[pyo3(signature = (params, n_max = 2))]
fn steady_state_observables<'py>(
    py: Python<'py>,
    params: &PySystemParams,
    n_max: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let rho = mb::steady_state_for(&params.inner, n_max).map_err(err)?;
    let d = PyDict::new(py);
    for (name, mode) in [("a", mb::Mode::A), ("b", mb::Mode::B)] {
        let g2 = match mb::g2_zero(&rho, mode) {
            Ok(v) => Some(v),
            Err(mb::Error::EmptyMode { .. }) => None,
            Err(e) => return Err(err(e)),
        };
        d.set_item(format!("g2_{name}"), g2)?;
    }
    for (name, mode) in [("a", mb::Mode::A), ("m", mb::Mode::M), ("b", mb::Mode::B)] {
        d.set_item(format!("n_{name}"), rho.occupation(mode).map_err(err)?)?;
    }
    Ok(d)
}

type SweepRows = Vec<Vec<Option<f64>>>;

/// Run a sweep from config text; returns `(columns, rows)` where sentinel
/// cells are None.
#[pyfunction]
fn run_sweep(config_text: &str) -> PyResult<(Vec<String>, SweepRows)> {
    let spec = sweep::parse_config(config_text).map_err(err)?;
    let table = sweep::run_sweep(&spec).map_err(err)?;
    Ok((table.columns, table.rows))
}

/// Run a sweep from config text and write the CSV to `path`.
#[pyfunction]
fn sweep_to_csv(config_text: &str, path: &str) -> PyResult<()> {
    let spec = sweep::parse_config(config_text).map_err(err)?;
    let table = sweep::run_sweep(&spec).map_err(err)?;
    sweep::write_csv(&table, std::path::Path::new(path)).map_err(err)
}

#[pyfunction]
fn version() -> &'static str {
    mb::VERSION
}

#[pymodule]
fn magnon_blockade_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystemParams>()?;
    m.add_function(wrap_pyfunction!(complex_detunings, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_amplitudes, m)?)?;
    m.add_function(wrap_pyfunction!(truncated_solve, m)?)?;
    m.add_function(wrap_pyfunction!(g2_analytic, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_drive, m)?)?;
    m.add_function(wrap_pyfunction!(steady_state_observables, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_to_csv, m)?)?;
    m.add_function(wrap_pyfunction!(version, m)?)?;
    Ok(())
}
