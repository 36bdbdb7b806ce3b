//! Python bindings.
//!
//! Exposes the simulation config, a steppable `Simulation`, whole runs and
//! sweeps, plus the scalar model formulas for use in notebooks.
//!
//! ```python
//! import coopsim_py as cs
//! cfg = cs.SimConfig(alpha=1.0, beta=0.5, consumption=4.0, seed=7)
//! report = cs.run_simulation(cfg)
//! print(report.final_winner, report.terms)
//! ```

use coopsim::engine::TermReport;
use coopsim::{formation, model, sweep, StrategyClass};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py_err(e: coopsim::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_strategy(name: &str) -> PyResult<StrategyClass> {
    match name {
        "similar" | "similar_preferring" => Ok(StrategyClass::SimilarPreferring),
        "complement" | "complement_preferring" => Ok(StrategyClass::ComplementPreferring),
        _ => Err(PyValueError::new_err(format!(
            "unknown strategy {name:?}, expected \"similar\" or \"complement\""
        ))),
    }
}

fn strategy_name(s: StrategyClass) -> &'static str {
    match s {
        StrategyClass::SimilarPreferring => "similar",
        StrategyClass::ComplementPreferring => "complement",
    }
}

fn behavior(b: (f64, f64)) -> PyResult<model::BehaviorVector> {
    model::BehaviorVector::new(b.0, b.1).map_err(to_py_err)
}

fn preference(p: (f64, f64)) -> PyResult<model::PreferenceVector> {
    model::PreferenceVector::new(p.0, p.1).map_err(to_py_err)
}

/// Model constants. Keyword arguments default to the reference values.
#[pyclass(name = "SimConfig", get_all, set_all, from_py_object)]
#[derive(Clone)]
struct PySimConfig {
    n: usize,
    k: usize,
    ticks: usize,
    gamma0: f64,
    c0: f64,
    s0: f64,
    consumption: f64,
    alpha: f64,
    beta: f64,
    max_term: usize,
    d0: f64,
    seed: u64,
}

impl From<coopsim::SimConfig> for PySimConfig {
    fn from(c: coopsim::SimConfig) -> Self {
        PySimConfig {
            n: c.n,
            k: c.k,
            ticks: c.ticks,
            gamma0: c.gamma0,
            c0: c.c0,
            s0: c.s0,
            consumption: c.consumption,
            alpha: c.alpha,
            beta: c.beta,
            max_term: c.max_term,
            d0: c.d0,
            seed: c.seed,
        }
    }
}

impl From<&PySimConfig> for coopsim::SimConfig {
    fn from(c: &PySimConfig) -> Self {
        coopsim::SimConfig {
            n: c.n,
            k: c.k,
            ticks: c.ticks,
            gamma0: c.gamma0,
            c0: c.c0,
            s0: c.s0,
            consumption: c.consumption,
            alpha: c.alpha,
            beta: c.beta,
            max_term: c.max_term,
            d0: c.d0,
            seed: c.seed,
        }
    }
}

#[pymethods]
impl PySimConfig {
    #[new]
    #[pyo3(signature = (**kwargs))]
    fn new(kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut cfg = PySimConfig::from(coopsim::SimConfig::default());
        for (key, value) in kwargs.into_iter().flatten() {
            let key: String = key.extract()?;
            match key.as_str() {
                "n" => cfg.n = value.extract()?,
                "k" => cfg.k = value.extract()?,
                "ticks" | "T" => cfg.ticks = value.extract()?,
                "gamma0" => cfg.gamma0 = value.extract()?,
                "c0" => cfg.c0 = value.extract()?,
                "s0" => cfg.s0 = value.extract()?,
                "consumption" => cfg.consumption = value.extract()?,
                "alpha" => cfg.alpha = value.extract()?,
                "beta" => cfg.beta = value.extract()?,
                "max_term" => cfg.max_term = value.extract()?,
                "d0" => cfg.d0 = value.extract()?,
                "seed" => cfg.seed = value.extract()?,
                other => return Err(PyValueError::new_err(format!("unknown config field {other:?}"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses the flat JSON config format (missing keys take defaults).
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let cfg = coopsim::SimConfig::from_json_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        cfg.validate().map_err(to_py_err)?;
        Ok(cfg.into())
    }

    fn to_json(&self) -> String {
        coopsim::SimConfig::from(self).to_json_pretty()
    }

    fn validate(&self) -> PyResult<()> {
        coopsim::SimConfig::from(self).validate().map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "SimConfig(n={}, k={}, T={}, alpha={}, beta={}, consumption={}, max_term={}, seed={})",
            self.n, self.k, self.ticks, self.alpha, self.beta, self.consumption, self.max_term, self.seed
        )
    }
}

fn term_dict<'py>(py: Python<'py>, t: &TermReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("term", t.term)?;
    d.set_item("mean_complement", t.mean_savings_complement)?;
    d.set_item("mean_similar", t.mean_savings_similar)?;
    d.set_item("alive_complement", t.alive_complement)?;
    d.set_item("alive_similar", t.alive_similar)?;
    d.set_item("group_size_histogram", t.group_size_histogram.clone())?;
    d.set_item("edges_added", t.edges_added)?;
    d.set_item("deaths", t.deaths)?;
    Ok(d)
}

#[pyclass(name = "RunReport", frozen)]
struct PyRunReport {
    inner: coopsim::RunReport,
}

#[pymethods]
impl PyRunReport {
    /// Number of terms that ran.
    #[getter]
    fn terms(&self) -> usize {
        self.inner.terms.len()
    }

    /// "complement", "similar", "tie" or "neither".
    #[getter]
    fn final_winner(&self) -> &'static str {
        match self.inner.final_winner {
            coopsim::Winner::Complement => "complement",
            coopsim::Winner::Similar => "similar",
            coopsim::Winner::Tie => "tie",
            coopsim::Winner::Neither => "neither",
        }
    }

    #[getter]
    fn complement_wins(&self) -> bool {
        self.inner.complement_wins()
    }

    #[getter]
    fn is_degenerate(&self) -> bool {
        self.inner.is_degenerate()
    }

    /// Per-term metrics, term 0 first.
    fn term_reports<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        std::iter::once(&self.inner.initial)
            .chain(&self.inner.terms)
            .map(|t| term_dict(py, t))
            .collect()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn timeseries_csv(&self) -> String {
        self.inner.timeseries_csv()
    }

    fn write(&self, directory: &str) -> PyResult<Vec<String>> {
        let files = coopsim::output::write_run_outputs(&self.inner, directory.as_ref()).map_err(to_py_err)?;
        Ok(files.into_iter().map(|p| p.display().to_string()).collect())
    }
}

/// A simulation that can be advanced one term at a time.
#[pyclass(name = "Simulation")]
struct PySimulation {
    inner: coopsim::Simulation,
}

#[pymethods]
impl PySimulation {
    #[new]
    fn new(config: &PySimConfig) -> PyResult<Self> {
        let inner = coopsim::Simulation::new(config.into()).map_err(to_py_err)?;
        Ok(PySimulation { inner })
    }

    #[getter]
    fn term(&self) -> usize {
        self.inner.term()
    }

    #[getter]
    fn alive_count(&self) -> usize {
        self.inner.population().alive_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.population().network.edge_count()
    }

    /// Why the run should stop now, or None.
    fn stop_reason(&self) -> Option<String> {
        self.inner.stop_reason().map(|r| format!("{r:?}"))
    }

    /// Runs one term and returns its metrics plus the formed groups.
    fn run_term<'py>(&mut self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let detail = self.inner.run_term().map_err(to_py_err)?;
        let d = term_dict(py, &detail.report)?;
        let groups: Vec<Vec<usize>> = detail
            .groups
            .iter()
            .map(|g| g.members.iter().map(|m| m.index()).collect())
            .collect();
        d.set_item("groups", groups)?;
        Ok(d)
    }

    /// One dict per agent: id, strategy, behavior, preference, savings, alive.
    fn agents<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.inner
            .population()
            .agents
            .iter()
            .map(|a| {
                let d = PyDict::new(py);
                d.set_item("id", a.id.index())?;
                d.set_item("strategy", strategy_name(a.strategy))?;
                d.set_item("behavior", (a.behavior.r, a.behavior.e))?;
                d.set_item("preference", (a.preference.r, a.preference.e))?;
                d.set_item("savings", a.savings)?;
                d.set_item("alive", a.alive)?;
                d.set_item("friends", self.inner.population().network.degree(a.id))?;
                Ok(d)
            })
            .collect()
    }
}

#[pyfunction]
fn run_simulation(py: Python<'_>, config: &PySimConfig) -> PyResult<PyRunReport> {
    let cfg: coopsim::SimConfig = config.into();
    let inner = py.detach(|| coopsim::run_simulation(cfg)).map_err(to_py_err)?;
    Ok(PyRunReport { inner })
}

/// Runs the (alpha, beta) grid and returns one dict per cell.
#[pyfunction]
#[pyo3(signature = (alphas, betas, replications, base=None, master_seed=0, jobs=0, out=None))]
#[allow(clippy::too_many_arguments)]
fn run_sweep<'py>(
    py: Python<'py>,
    alphas: Vec<f64>,
    betas: Vec<f64>,
    replications: usize,
    base: Option<PySimConfig>,
    master_seed: u64,
    jobs: usize,
    out: Option<String>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let spec = sweep::SweepSpec {
        alphas,
        betas,
        replications,
        base: base.as_ref().map(Into::into).unwrap_or_default(),
        master_seed,
        jobs,
    };
    let report = py.detach(|| sweep::run_sweep(&spec)).map_err(to_py_err)?;
    if let Some(dir) = out {
        coopsim::output::write_sweep_outputs(&report, dir.as_ref()).map_err(to_py_err)?;
    }
    report
        .cells
        .iter()
        .map(|c| {
            let d = PyDict::new(py);
            d.set_item("alpha", c.alpha)?;
            d.set_item("beta", c.beta)?;
            d.set_item("replications", c.replications)?;
            d.set_item("win_rate", c.win_rate)?;
            d.set_item("degenerate_runs", c.degenerate_runs)?;
            Ok(d)
        })
        .collect()
}

#[pyfunction]
fn behavior_value(p: (f64, f64), b: (f64, f64)) -> PyResult<f64> {
    Ok(model::behavior_value(preference(p)?, behavior(b)?))
}

#[pyfunction]
fn build_preference_vector(b: (f64, f64), strategy: &str, alpha: f64) -> PyResult<(f64, f64)> {
    let p = model::build_preference_vector(behavior(b)?, parse_strategy(strategy)?, alpha).map_err(to_py_err)?;
    Ok((p.r, p.e))
}

#[pyfunction]
fn choosiness_gamma(t: usize, ticks: usize, group_size: usize, gamma0: f64) -> f64 {
    formation::choosiness_gamma(t, ticks, group_size, gamma0)
}

#[pyfunction]
fn selection_weights(values: Vec<f64>, gamma: f64) -> PyResult<Vec<f64>> {
    if values.is_empty() {
        return Err(PyValueError::new_err("values must be nonempty"));
    }
    Ok(formation::selection_weights(&values, gamma))
}

#[pyfunction]
fn adjusted_offer_value(p: (f64, f64), group_mean: (f64, f64), t: usize, ticks: usize, gamma0: f64) -> PyResult<f64> {
    Ok(formation::adjusted_offer_value(preference(p)?, behavior(group_mean)?, t, ticks, gamma0))
}

#[pyfunction]
fn derive_seed(master_seed: u64, alpha_idx: usize, beta_idx: usize, rep: usize) -> u64 {
    sweep::derive_seed(master_seed, alpha_idx, beta_idx, rep)
}

#[pymodule]
fn coopsim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySimConfig>()?;
    m.add_class::<PySimulation>()?;
    m.add_class::<PyRunReport>()?;
    m.add_function(wrap_pyfunction!(run_simulation, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(behavior_value, m)?)?;
    m.add_function(wrap_pyfunction!(build_preference_vector, m)?)?;
    m.add_function(wrap_pyfunction!(choosiness_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(selection_weights, m)?)?;
    m.add_function(wrap_pyfunction!(adjusted_offer_value, m)?)?;
    m.add_function(wrap_pyfunction!(derive_seed, m)?)?;
    Ok(())
}
