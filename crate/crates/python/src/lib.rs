//! Python bindings: model parameters, single-point correlators, the
//! density-matrix measures and sweeps.

use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use scramblon::correlators::{self, EvalOptions};
use scramblon::density::{self, CLAMP_TOL};
use scramblon::emit;
use scramblon::model::{self, SystemSize};
use scramblon::sweep::{self, Format};
use scramblon::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(_) => PyIOError::new_err(e.to_string()),
        Error::NoConvergence(_) | Error::Representation(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn system_size(n: &Bound<'_, PyAny>) -> PyResult<SystemSize> {
    if let Ok(k) = n.extract::<u64>() {
        return k.to_string().parse().map_err(to_py);
    }
    if let Ok(x) = n.extract::<f64>() {
        if x.is_infinite() && x > 0.0 {
            return Ok(SystemSize::Infinite);
        }
    }
    n.extract::<String>()?.parse().map_err(to_py)
}

/// q, v, β and N of the SYK model. `n` is a positive integer, `"inf"` or
/// `math.inf`.
#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct ModelParams {
    inner: model::ModelParams,
}

#[pymethods]
impl ModelParams {
    #[new]
    #[pyo3(signature = (v, n, q = 4, beta = 1.0))]
    fn new(v: f64, n: &Bound<'_, PyAny>, q: u32, beta: f64) -> PyResult<Self> {
        let inner = model::ModelParams::new(q, v, beta, system_size(n)?).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn q(&self) -> u32 {
        self.inner.q()
    }

    #[getter]
    fn v(&self) -> f64 {
        self.inner.v()
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta()
    }

    /// N, or None in the probe limit.
    #[getter]
    fn n(&self) -> Option<f64> {
        self.inner.n_majorana().finite()
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta()
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.inner.kappa()
    }

    /// C = 4Δ²N cos(πv/2), or None in the probe limit.
    #[getter]
    fn c_prefactor(&self) -> Option<f64> {
        self.inner.c_prefactor()
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!("ModelParams(q={}, v={}, beta={}, n={})", p.q(), p.v(), p.beta(), p.n_majorana())
    }
}

#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct ProtocolPoint {
    inner: correlators::ProtocolPoint,
}

#[pymethods]
impl ProtocolPoint {
    #[new]
    #[pyo3(signature = (t_l, t_r, mu, encode_len = 1))]
    fn new(t_l: f64, t_r: f64, mu: f64, encode_len: u32) -> PyResult<Self> {
        let inner = correlators::ProtocolPoint::new(t_l, t_r, mu, encode_len).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn t_l(&self) -> f64 {
        self.inner.t_l
    }

    #[getter]
    fn t_r(&self) -> f64 {
        self.inner.t_r
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.inner.mu
    }

    #[getter]
    fn encode_len(&self) -> u32 {
        self.inner.encode_len
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!("ProtocolPoint(t_l={}, t_r={}, mu={}, encode_len={})", p.t_l, p.t_r, p.mu, p.encode_len)
    }
}

/// The four correlators with their error estimates.
#[pyclass(frozen, get_all)]
struct CorrelatorSet {
    i1: Complex64,
    i2: Complex64,
    i3: Complex64,
    i4: Complex64,
    err1: f64,
    err2: f64,
    err3: f64,
    err4: f64,
    mode: String,
}

#[pymethods]
impl CorrelatorSet {
    /// (ρ⁽²⁾, ρ⁽⁴⁾) of the reduced density matrix.
    fn coefficients(&self) -> (f64, f64) {
        density::coefficients_from_correlators(&self.to_core())
    }

    fn __repr__(&self) -> String {
        format!("CorrelatorSet(i1={}, i2={}, i3={}, i4={}, mode={})", self.i1, self.i2, self.i3, self.i4, self.mode)
    }
}

impl CorrelatorSet {
    fn to_core(&self) -> correlators::CorrelatorSet {
        correlators::CorrelatorSet {
            i1: self.i1,
            i2: self.i2,
            i3: self.i3,
            i4: self.i4,
            err1: self.err1,
            err2: self.err2,
            err3: self.err3,
            err4: self.err4,
            mode: correlators::Mode::FiniteN,
        }
    }
}

impl From<correlators::CorrelatorSet> for CorrelatorSet {
    fn from(cs: correlators::CorrelatorSet) -> Self {
        let mode = match cs.mode {
            correlators::Mode::FiniteN => "finite_n",
            correlators::Mode::ProbeLimit => "probe_limit",
            correlators::Mode::LongTime => "long_time",
        };
        Self {
            i1: cs.i1,
            i2: cs.i2,
            i3: cs.i3,
            i4: cs.i4,
            err1: cs.err1,
            err2: cs.err2,
            err3: cs.err3,
            err4: cs.err4,
            mode: mode.to_owned(),
        }
    }
}

/// Entropies in nats.
#[pyclass(frozen, get_all)]
struct InfoMeasures {
    mutual_info: f64,
    negativity: f64,
    entropy_joint: f64,
    entropy_p: f64,
    entropy_r1: f64,
    spectrum: [f64; 4],
}

#[pymethods]
impl InfoMeasures {
    fn __repr__(&self) -> String {
        format!("InfoMeasures(mutual_info={}, negativity={})", self.mutual_info, self.negativity)
    }
}

/// Correlators at one point: the probe-limit closed form for N = ∞ and
/// quadrature otherwise.
#[pyfunction]
#[pyo3(signature = (params, point, long_time_fast_path = false))]
fn evaluate(py: Python<'_>, params: &ModelParams, point: &ProtocolPoint, long_time_fast_path: bool) -> PyResult<CorrelatorSet> {
    let opts = EvalOptions { long_time_fast_path, ..EvalOptions::default() };
    let (p, pt) = (params.inner, point.inner);
    let cs = py.detach(|| correlators::evaluate(&p, &pt, &opts)).map_err(to_py)?;
    Ok(cs.into())
}

/// ρ_{PR₁} as a 4×4 nested list of complex numbers.
#[pyfunction]
fn density_matrix(rho2: f64, rho4: f64) -> PyResult<Vec<Vec<Complex64>>> {
    let dm = density::assemble(rho2, rho4).map_err(to_py)?;
    Ok((0..4).map(|r| (0..4).map(|c| dm.matrix[(r, c)]).collect()).collect())
}

#[pyfunction]
#[pyo3(signature = (rho2, rho4, clamp_tol = CLAMP_TOL))]
fn info_measures(rho2: f64, rho4: f64, clamp_tol: f64) -> PyResult<InfoMeasures> {
    let dm = density::assemble(rho2, rho4).map_err(to_py)?;
    let spec = density::spectrum(&dm, clamp_tol).map_err(to_py)?;
    let m = density::info_measures(&dm, clamp_tol).map_err(to_py)?;
    Ok(InfoMeasures {
        mutual_info: m.mutual_info,
        negativity: m.negativity,
        entropy_joint: m.entropy_joint,
        entropy_p: m.entropy_p,
        entropy_r1: m.entropy_r1,
        spectrum: spec.values,
    })
}

/// A built-in sweep configuration as TOML.
#[pyfunction]
fn preset(name: &str) -> PyResult<String> {
    Ok(sweep::preset(name.parse().map_err(to_py)?).to_toml())
}

/// Runs a sweep from TOML text and returns the table as CSV or JSON text.
#[pyfunction]
#[pyo3(signature = (config, threads = None, format = "csv"))]
fn run_sweep(py: Python<'_>, config: &str, threads: Option<usize>, format: &str) -> PyResult<String> {
    let cfg = sweep::SweepConfig::from_toml(config).map_err(to_py)?;
    let format: Format = format.parse().map_err(to_py)?;
    let threads = threads.unwrap_or_else(|| cfg.threads.resolve());
    let result = py.detach(|| sweep::run_sweep_with_threads(&cfg, threads)).map_err(to_py)?;
    Ok(emit::render(&result, format))
}

#[pymodule]
fn pyscramblon(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<ModelParams>()?;
    m.add_class::<ProtocolPoint>()?;
    m.add_class::<CorrelatorSet>()?;
    m.add_class::<InfoMeasures>()?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(density_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(info_measures, m)?)?;
    m.add_function(wrap_pyfunction!(preset, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
