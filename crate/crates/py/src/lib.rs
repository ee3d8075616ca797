//! Python bindings: profiles, stretched kernels, the leapfrog solver and the
//! convergence lab.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use upml::config::Config;
use upml::kernels::{CMat3, CVec3};
use upml::lab::{self, ErrorReport};
use upml::yee::DEFAULT_CFL;
use upml::{Component, Error, GridSpec, LaplaceFrequency, Medium, ScattererSpec, SourceSpec};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Config(_) | Error::Abscissa { .. } | Error::StorageBudget { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Layer geometry, absorption profile and material constants.
#[pyclass(name = "PmlParams", module = "pyupml", from_py_object)]
#[derive(Clone)]
struct PyPmlParams {
    inner: upml::PmlParams,
}

#[pymethods]
impl PyPmlParams {
    #[new]
    #[pyo3(signature = (l, d, sigma0, t_final, eps=1.0, mu=1.0, m=1, s1=None))]
    #[allow(clippy::too_many_arguments)]
    fn new(l: [f64; 3], d: f64, sigma0: f64, t_final: f64, eps: f64, mu: f64, m: u32, s1: Option<f64>) -> PyResult<Self> {
        let mut p = upml::PmlParams::new(eps, mu, l, d, sigma0, t_final).with_order(m);
        if let Some(s1) = s1 {
            p = p.with_s1(s1);
        }
        p.validate().map_err(to_py)?;
        Ok(Self { inner: p })
    }

    #[getter]
    fn sigma0(&self) -> f64 {
        self.inner.sigma0
    }

    #[getter]
    fn d(&self) -> f64 {
        self.inner.d
    }

    #[getter]
    fn s1(&self) -> f64 {
        self.inner.s1
    }

    #[getter]
    fn m(&self) -> u32 {
        self.inner.m
    }

    fn sigma(&self, axis: usize, x: f64) -> f64 {
        self.inner.sigma(axis, x)
    }

    fn alpha(&self, axis: usize, x: f64) -> f64 {
        self.inner.alpha(axis, x)
    }

    fn stretched_coordinate(&self, axis: usize, x: f64) -> f64 {
        self.inner.stretched_coordinate(axis, x)
    }

    fn sigma_integral(&self) -> f64 {
        self.inner.sigma_integral(0)
    }

    fn alpha_max(&self) -> f64 {
        self.inner.alpha_max()
    }

    /// `(A, B, BA, (BA)^-1)` diagonals at `x`.
    fn stretch_tensors(&self, x: [f64; 3]) -> ([f64; 3], [f64; 3], [f64; 3], [f64; 3]) {
        let t = self.inner.stretch_tensors(x);
        (t.a, t.b, t.ba, t.ba_inv)
    }

    fn ba_bounds(&self) -> (f64, f64) {
        self.inner.ba_bounds()
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!("PmlParams(l={:?}, d={}, sigma0={}, m={}, s1={}, T={})", p.l, p.d, p.sigma0, p.m, p.s1, p.t_final)
    }
}

/// Stretched kernels at a fixed Laplace abscissa `s1`.
#[pyclass(name = "StretchedKernels", module = "pyupml")]
struct PyKernels {
    inner: upml::StretchedKernels,
}

#[pymethods]
impl PyKernels {
    #[new]
    fn new(params: &PyPmlParams) -> Self {
        Self { inner: upml::StretchedKernels::new(params.inner) }
    }

    fn phi(&self, x: [f64; 3], y: [f64; 3], s2: f64) -> PyResult<num_complex::Complex64> {
        let s = LaplaceFrequency::new(self.inner.params().s1, s2);
        self.inner.stretched_phi(x, y, s).map_err(to_py)
    }

    fn grad_phi(&self, x: [f64; 3], y: [f64; 3], s2: f64) -> PyResult<CVec3> {
        let s = LaplaceFrequency::new(self.inner.params().s1, s2);
        self.inner.grad_phi(x, y, s).map_err(to_py)
    }

    fn hessian_phi(&self, x: [f64; 3], y: [f64; 3], s2: f64) -> PyResult<CMat3> {
        let s = LaplaceFrequency::new(self.inner.params().s1, s2);
        self.inner.hessian_phi(x, y, s).map_err(to_py)
    }

    fn dyadic_green(&self, x: [f64; 3], y: [f64; 3], s2: f64) -> PyResult<CMat3> {
        let s = LaplaceFrequency::new(self.inner.params().s1, s2);
        self.inner.dyadic_green(x, y, s).map_err(to_py)
    }

    fn phi_bound(&self) -> f64 {
        self.inner.phi_bound()
    }

    /// Returns `(min Re rho, min |rho/s|, max |Phi|, violations)`.
    #[pyo3(signature = (n_samples, seed=0))]
    fn decay_bound_check(&self, py: Python<'_>, n_samples: usize, seed: u64) -> PyResult<(f64, f64, f64, usize)> {
        let report = py
            .detach(|| {
                let mut rng = ChaCha20Rng::seed_from_u64(seed);
                self.inner.decay_bound_check(n_samples, &mut rng)
            })
            .map_err(to_py)?;
        Ok((report.min_re_rho, report.min_abs_rho_over_s, report.max_phi_abs, report.violations.len()))
    }
}

/// Leapfrog solver on `B2` with an optional point dipole.
#[pyclass(name = "Simulation", module = "pyupml")]
struct PySimulation {
    inner: upml::Simulation,
}

#[pymethods]
impl PySimulation {
    #[new]
    #[pyo3(signature = (params, h, source=None, vacuum=false, cfl=DEFAULT_CFL, scatterer=None))]
    fn new(
        params: &PyPmlParams,
        h: f64,
        source: Option<(usize, f64, f64, f64, [f64; 3])>,
        vacuum: bool,
        cfl: f64,
        scatterer: Option<([f64; 3], [f64; 3])>,
    ) -> PyResult<Self> {
        let p = &params.inner;
        let grid = GridSpec::for_params(p, h).map_err(to_py)?;
        let source = source.map(|(polarization, amplitude, t0, tau, location)| SourceSpec {
            location,
            polarization,
            amplitude,
            t0,
            tau,
        });
        let scatterer = scatterer.map(|(lo, hi)| ScattererSpec { lo, hi });
        let dt = upml::yee::cfl_timestep(&grid, p, cfl).map_err(to_py)?;
        let medium = if vacuum { Medium::vacuum(p.eps, p.mu) } else { Medium::pml(p) };
        let inner = upml::Simulation::new(grid, medium, dt, p, source, scatterer).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn dt(&self) -> f64 {
        self.inner.dt()
    }

    #[getter]
    fn time(&self) -> f64 {
        self.inner.time()
    }

    #[getter]
    fn cells(&self) -> [usize; 3] {
        self.inner.grid().n
    }

    fn run(&mut self, py: Python<'_>, steps: u64) -> PyResult<()> {
        let sim = &mut self.inner;
        py.detach(|| sim.run(steps)).map_err(to_py)
    }

    fn energy(&self) -> f64 {
        self.inner.energy()
    }

    fn probe(&self, x: [f64; 3]) -> [f64; 6] {
        self.inner.probe(x)
    }

    /// Flat row-major values of one component (`"Ex"` .. `"Hz"`) and its shape.
    fn field(&self, name: &str) -> PyResult<(Vec<f64>, [usize; 3])> {
        let c = Component::ALL
            .into_iter()
            .find(|c| c.name() == name)
            .ok_or_else(|| PyValueError::new_err(format!("unknown component {name}")))?;
        let f = self.inner.state().field(c);
        Ok((f.data.clone(), f.dims))
    }
}

/// Parses TOML, validates it and returns `(canonical_echo, sha256_digest)`.
#[pyfunction]
fn parse_config(text: &str) -> PyResult<(String, String)> {
    let cfg = Config::from_toml(text).map_err(to_py)?;
    cfg.clone().validate().map_err(to_py)?;
    Ok((cfg.canonical().map_err(to_py)?, cfg.digest().map_err(to_py)?))
}

fn report_dict<'py>(py: Python<'py>, r: &ErrorReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("sigma0", r.sigma0)?;
    d.set_item("d", r.d)?;
    d.set_item("theory_exponent", r.theory_exponent)?;
    d.set_item("l2_hcurl_E", r.l2_hcurl_e)?;
    d.set_item("l2_hcurl_H", r.l2_hcurl_h)?;
    d.set_item("linf_hcurl_E", r.linf_hcurl_e)?;
    d.set_item("linf_hcurl_H", r.linf_hcurl_h)?;
    d.set_item("floor_estimate", r.floor_estimate)?;
    Ok(d)
}

/// Runs the sweep described by a TOML configuration; returns one dict per run.
#[pyfunction]
fn sweep<'py>(py: Python<'py>, config_toml: &str) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let cfg = Config::from_toml(config_toml).map_err(to_py)?.with_defaults();
    cfg.clone().validate().map_err(to_py)?;
    let sc = cfg.sweep_config().map_err(to_py)?;
    let outcome = py.detach(|| lab::sweep(&sc)).map_err(to_py)?;
    outcome.reports.iter().map(|r| report_dict(py, r)).collect()
}

/// Fits `log(err) = intercept - rate x`; returns `(rate, intercept, r_squared, n_used)`.
#[pyfunction]
#[pyo3(signature = (theory_exponent, errors, floor=0.0))]
fn fit_decay(theory_exponent: Vec<f64>, errors: Vec<f64>, floor: f64) -> PyResult<(f64, f64, f64, usize)> {
    if theory_exponent.len() != errors.len() {
        return Err(PyValueError::new_err("theory_exponent and errors differ in length"));
    }
    let reports: Vec<ErrorReport> = theory_exponent
        .iter()
        .zip(&errors)
        .map(|(&x, &e)| ErrorReport {
            sigma0: x,
            d: 1.0,
            l2_hcurl_e: e,
            l2_hcurl_h: 0.0,
            linf_hcurl_e: e,
            linf_hcurl_h: 0.0,
            theory_exponent: x,
            floor_estimate: floor,
            floor_estimate_linf: floor,
        })
        .collect();
    let f = lab::fit_decay(&reports).map_err(to_py)?;
    Ok((f.rate, f.intercept, f.r_squared, f.n_points_used))
}

/// Returns `(max_norm_sum, bound_factor, source_h1_norm, ratio)`.
#[pyfunction]
#[pyo3(signature = (params, h, source=None, cfl=DEFAULT_CFL))]
fn stability_probe(
    py: Python<'_>,
    params: &PyPmlParams,
    h: f64,
    source: Option<(usize, f64, f64, f64, [f64; 3])>,
    cfl: f64,
) -> PyResult<(f64, f64, f64, f64)> {
    let source = source.map(|(polarization, amplitude, t0, tau, location)| SourceSpec {
        location,
        polarization,
        amplitude,
        t0,
        tau,
    });
    let p = params.inner;
    let r = py.detach(|| lab::stability_probe(&p, h, source, None, cfl)).map_err(to_py)?;
    Ok((r.max_norm_sum, r.bound_factor, r.source_h1_norm, r.ratio))
}

#[pymodule]
fn pyupml(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPmlParams>()?;
    m.add_class::<PyKernels>()?;
    m.add_class::<PySimulation>()?;
    m.add_function(wrap_pyfunction!(parse_config, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(fit_decay, m)?)?;
    m.add_function(wrap_pyfunction!(stability_probe, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
