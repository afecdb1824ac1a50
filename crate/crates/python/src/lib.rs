//! Python bindings for the `cvirus` simulator.
//!
//! Scenario settings are passed as keyword arguments using the CLI keys with
//! `_` in place of `-` (`society_size=50`, `zombie_range="0.8,1"`), so the
//! Python side goes through the same validation as config files.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;

use cvirus::io::Settings;
use cvirus::rng::SimRng;
use cvirus::{Algorithm, Chromosome, Cure, EpidemicParams, LastHumanDay, TreatmentPlan};

fn to_py(e: cvirus::Error) -> PyErr {
    if e.is_config() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn settings_from(kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<Settings> {
    let mut settings = Settings::default();
    if let Some(kw) = kwargs {
        for (k, v) in kw.iter() {
            let key = k.extract::<String>()?.replace('_', "-");
            let value = match v.extract::<bool>() {
                Ok(b) if v.is_instance_of::<pyo3::types::PyBool>() => b.to_string(),
                _ => v.str()?.to_string(),
            };
            settings.set(&key, &value).map_err(to_py)?;
        }
    }
    settings.validate().map_err(to_py)?;
    Ok(settings)
}

/// A society of agents with continuous infection levels.
#[pyclass(name = "Society", skip_from_py_object)]
#[derive(Clone)]
struct PySociety {
    inner: cvirus::Society,
}

#[pymethods]
impl PySociety {
    #[new]
    #[pyo3(signature = (levels, threshold=0.75))]
    fn new(levels: Vec<f64>, threshold: f64) -> PyResult<Self> {
        cvirus::Society::from_levels(&levels, threshold)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    /// Draw a random society; keyword arguments as for `run_scenario`.
    #[staticmethod]
    #[pyo3(signature = (seed, **kwargs))]
    fn random(seed: u64, kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let settings = settings_from(kwargs)?;
        let mut rng = SimRng::seed_from_u64(seed);
        cvirus::Society::random(&settings.scenario.society, &mut rng)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    fn levels(&self) -> Vec<f64> {
        self.inner.levels()
    }

    fn mean_infection_rate(&self) -> f64 {
        self.inner.mean_infection_rate()
    }

    /// (humans, zombies)
    fn census(&self) -> (usize, usize) {
        let c = self.inner.census();
        (c.humans, c.zombies)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[pyo3(signature = (seed, virulence=None, contacts=None, increment=None))]
    fn advance_day(
        &mut self,
        seed: u64,
        virulence: Option<f64>,
        contacts: Option<u32>,
        increment: Option<f64>,
    ) -> PyResult<()> {
        let d = EpidemicParams::default();
        let params = EpidemicParams {
            virulence: virulence.unwrap_or(d.virulence),
            contacts_per_zombie: contacts.unwrap_or(d.contacts_per_zombie),
            increment: increment.unwrap_or(d.increment),
        };
        params.validate().map_err(to_py)?;
        self.inner
            .advance_day(&params, &mut SimRng::seed_from_u64(seed));
        Ok(())
    }

    /// Apply a cure; returns (applied_counts, effective_counts).
    #[pyo3(signature = (doses, seed, effect=None, window=0.1))]
    fn apply_cure(
        &mut self,
        doses: Vec<f64>,
        seed: u64,
        effect: Option<f64>,
        window: f64,
    ) -> PyResult<(Vec<u32>, Vec<u32>)> {
        let plan = TreatmentPlan {
            count: doses.len(),
            halfwidth: window,
            effect: effect.unwrap_or(TreatmentPlan::default().effect),
        };
        plan.validate().map_err(to_py)?;
        let cure = Cure::new(doses).map_err(to_py)?;
        let out = cvirus::apply_cure(&mut self.inner, &cure, &plan, &mut SimRng::seed_from_u64(seed))
            .map_err(to_py)?;
        Ok((out.applied, out.effective))
    }

    fn __repr__(&self) -> String {
        let c = self.inner.census();
        format!(
            "Society(n={}, humans={}, zombies={}, mir={:.4})",
            self.inner.len(),
            c.humans,
            c.zombies,
            self.inner.mean_infection_rate()
        )
    }
}

/// One replication of a scenario.
#[pyclass(name = "RunResult", from_py_object)]
#[derive(Clone)]
struct PyRunResult {
    inner: cvirus::RunResult,
}

#[pymethods]
impl PyRunResult {
    #[getter]
    fn replication(&self) -> u32 {
        self.inner.replication
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[getter]
    fn mir(&self) -> Vec<f64> {
        self.inner.mirs()
    }

    #[getter]
    fn humans(&self) -> Vec<usize> {
        self.inner.days.iter().map(|d| d.humans).collect()
    }

    #[getter]
    fn zombies(&self) -> Vec<usize> {
        self.inner.days.iter().map(|d| d.zombies).collect()
    }

    #[getter]
    fn lowest_mir(&self) -> f64 {
        self.inner.lowest_mir
    }

    /// Last day that ended with a human; None if humans survived the horizon.
    #[getter]
    fn last_human_day(&self) -> Option<i64> {
        match self.inner.last_human_day {
            LastHumanDay::Day(d) => Some(d as i64),
            LastHumanDay::NoHumans => Some(-1),
            LastHumanDay::Censored => None,
        }
    }

    /// Committed doses per day (None for baseline days).
    #[getter]
    fn doses(&self) -> Vec<Option<Vec<f64>>> {
        self.inner
            .days
            .iter()
            .map(|d| d.committed_doses.clone())
            .collect()
    }

    #[getter]
    fn effective_counts(&self) -> Vec<Vec<u32>> {
        self.inner
            .days
            .iter()
            .map(|d| d.effective_counts.clone())
            .collect()
    }

    fn __len__(&self) -> usize {
        self.inner.days.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "RunResult(replication={}, days={}, lowest_mir={:.4})",
            self.inner.replication,
            self.inner.days.len(),
            self.inner.lowest_mir
        )
    }
}

/// Window (lo, hi) of treatment `index` (1-based) of `count`.
#[pyfunction]
#[pyo3(signature = (index, count=10, window=0.1))]
fn treatment_window(index: usize, count: usize, window: f64) -> PyResult<(f64, f64)> {
    TreatmentPlan {
        count,
        halfwidth: window,
        ..Default::default()
    }
    .window(index)
    .map_err(to_py)
}

#[pyfunction]
fn crossover(a: Vec<f64>, b: Vec<f64>) -> PyResult<Vec<f64>> {
    let a = Chromosome::new(a).map_err(to_py)?;
    let b = Chromosome::new(b).map_err(to_py)?;
    cvirus::crossover(&a, &b)
        .map(|c| c.genes().to_vec())
        .map_err(to_py)
}

#[pyfunction]
fn mutate(genes: Vec<f64>, p: f64, seed: u64) -> PyResult<Vec<f64>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(PyValueError::new_err(format!("p={p} is outside [0, 1]")));
    }
    let c = Chromosome::new(genes).map_err(to_py)?;
    Ok(cvirus::mutate(c, p, &mut SimRng::seed_from_u64(seed))
        .genes()
        .to_vec())
}

/// Run one replication; keyword arguments are CLI keys.
#[pyfunction]
#[pyo3(signature = (replication=0, **kwargs))]
fn run_scenario(
    py: Python<'_>,
    replication: u32,
    kwargs: Option<&Bound<'_, PyDict>>,
) -> PyResult<PyRunResult> {
    let settings = settings_from(kwargs)?;
    py.detach(|| cvirus::run_scenario(&settings.scenario, replication))
        .map(|inner| PyRunResult { inner })
        .map_err(to_py)
}

/// Run every replication of a scenario.
#[pyfunction]
#[pyo3(signature = (**kwargs))]
fn run_replications(
    py: Python<'_>,
    kwargs: Option<&Bound<'_, PyDict>>,
) -> PyResult<Vec<PyRunResult>> {
    let settings = settings_from(kwargs)?;
    let jobs = settings.jobs;
    py.detach(|| cvirus::run_replications(&settings.scenario, jobs))
        .map(|rs| rs.into_iter().map(|inner| PyRunResult { inner }).collect())
        .map_err(to_py)
}

/// Cross-replication statistics as a dict.
#[pyfunction]
fn aggregate<'py>(py: Python<'py>, results: Vec<PyRunResult>) -> PyResult<Bound<'py, PyDict>> {
    let runs: Vec<_> = results.into_iter().map(|r| r.inner).collect();
    let a = cvirus::aggregate(&runs).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("replications", a.replications)?;
    d.set_item("mir_mean_by_day", a.mir_mean_by_day)?;
    d.set_item("mir_sd_by_day", a.mir_sd_by_day)?;
    d.set_item("lowest_mir_mean", a.lowest_mir_mean)?;
    d.set_item("lowest_mir_sd", a.lowest_mir_sd)?;
    d.set_item("last_human_day_mean", a.last_human_day_mean)?;
    d.set_item("last_human_day_sd", a.last_human_day_sd)?;
    d.set_item("stability", a.stability)?;
    d.set_item("first_neighborhood_day", a.first_neighborhood_day)?;
    d.set_item("mean_mir_mean", a.mean_mir_mean)?;
    d.set_item("mean_mir_sd", a.mean_mir_sd)?;
    Ok(d)
}

/// Names accepted for the `algorithm` keyword.
#[pyfunction]
fn algorithms() -> Vec<&'static str> {
    [Algorithm::Genetic, Algorithm::Cultural, Algorithm::None]
        .iter()
        .map(|a| a.as_str())
        .collect()
}

#[pymodule]
fn cvirus_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySociety>()?;
    m.add_class::<PyRunResult>()?;
    m.add_function(wrap_pyfunction!(treatment_window, m)?)?;
    m.add_function(wrap_pyfunction!(crossover, m)?)?;
    m.add_function(wrap_pyfunction!(mutate, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(run_replications, m)?)?;
    m.add_function(wrap_pyfunction!(aggregate, m)?)?;
    m.add_function(wrap_pyfunction!(algorithms, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
