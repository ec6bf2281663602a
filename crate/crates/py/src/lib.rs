//! Python bindings: dataset loading, scenario splits, the paired
//! experiment harness, equilibrium cutoffs and hierarchy searches.

use std::collections::HashMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ddsbench::cutoff::{equilibrium_sampling, ModelKind};
use ddsbench::dataset::{self, ColumnMap, Sex};
use ddsbench::harness::{self, Algorithm, ExperimentSpec, SexFilter};
use ddsbench::hierarchy::{self, Metric, SearchConfig};
use ddsbench::metrics::MeanPerformance;
use ddsbench::rng::{stream, Purpose};
use ddsbench::splitter::{make_split, Scenario};
use ddsbench::synth;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn parse_scenario(s: &str) -> PyResult<Scenario> {
    s.parse().map_err(value_err)
}

fn parse_algorithms(names: Vec<String>) -> PyResult<Vec<Algorithm>> {
    if names.len() == 1 && names[0].eq_ignore_ascii_case("all") {
        return Ok(Algorithm::ALL.to_vec());
    }
    names.iter().map(|n| n.parse().map_err(value_err)).collect()
}

/// Complete-case dataset over the seven study variables.
#[pyclass(name = "Dataset", module = "ddsbench_py")]
struct PyDataset {
    inner: dataset::Dataset,
}

#[pymethods]
impl PyDataset {
    /// Load a CSV with complete-case filtering. `columns` overrides the
    /// default Kaggle-style header mapping, keyed by canonical name.
    #[staticmethod]
    #[pyo3(signature = (path, columns=None))]
    fn from_csv(path: &str, columns: Option<HashMap<String, String>>) -> PyResult<Self> {
        let map = match columns {
            Some(overrides) => ColumnMap::default()
                .with_overrides(&overrides)
                .map_err(value_err)?,
            None => ColumnMap::default(),
        };
        let inner = dataset::ingest_csv(path, &map).map_err(value_err)?;
        Ok(PyDataset { inner })
    }

    /// Synthetic two-group Gaussian dataset for experimentation.
    #[staticmethod]
    #[pyo3(signature = (n_positive, n_negative, shift=1.5, informative=3, seed=0))]
    fn synthetic(
        n_positive: usize,
        n_negative: usize,
        shift: f64,
        informative: usize,
        seed: u64,
    ) -> Self {
        PyDataset {
            inner: synth::two_group_gaussian(n_positive, n_negative, shift, informative, seed),
        }
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn n1(&self) -> usize {
        self.inner.n1()
    }

    #[getter]
    fn n2(&self) -> usize {
        self.inner.n2()
    }

    #[getter]
    fn p(&self) -> usize {
        self.inner.p()
    }

    fn prevalence(&self) -> PyResult<f64> {
        self.inner.prevalence().map_err(value_err)
    }

    fn filter_by_sex(&self, sex: &str) -> PyResult<Self> {
        let sex: Sex = sex.parse().map_err(value_err)?;
        Ok(PyDataset {
            inner: self.inner.filter_by_sex(sex),
        })
    }

    /// Restrict to the given 1-based variable indices.
    fn project(&self, vars: Vec<usize>) -> PyResult<Self> {
        Ok(PyDataset {
            inner: self.inner.project(&vars).map_err(value_err)?,
        })
    }

    fn feature_names(&self) -> Vec<String> {
        self.inner
            .feature_names()
            .into_iter()
            .map(str::to_string)
            .collect()
    }

    fn fingerprint(&self) -> String {
        self.inner.fingerprint()
    }

    fn __repr__(&self) -> String {
        format!(
            "Dataset(n={}, n1={}, n2={}, p={})",
            self.inner.n(),
            self.inner.n1(),
            self.inner.n2(),
            self.inner.p()
        )
    }
}

fn mean_to_dict<'py>(py: Python<'py>, mp: &MeanPerformance) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    let c = mp.mean.counts;
    d.set_item("tp", c.true_pos)?;
    d.set_item("fp", c.false_pos)?;
    d.set_item("fn", c.false_neg)?;
    d.set_item("tn", c.true_neg)?;
    for name in ddsbench::metrics::METRIC_NAMES {
        d.set_item(name, mp.mean.metric(name))?;
    }
    d.set_item("sims", mp.n)?;
    Ok(d)
}

/// Split sizes (n1, n2, n3) for one scenario draw.
#[pyfunction]
#[pyo3(signature = (data, scenario, tau, seed=0))]
fn split_sizes(data: &PyDataset, scenario: &str, tau: f64, seed: u64) -> PyResult<(usize, usize, usize)> {
    let scenario = parse_scenario(scenario)?;
    let mut rng = stream(seed, Purpose::Split, 0);
    let split = make_split(&data.inner, scenario, tau, &mut rng).map_err(value_err)?;
    Ok((split.n1(), split.n2(), split.n3()))
}

/// Paired comparison of algorithms on one scenario. Returns
/// {algorithm: {metric: value}}.
#[pyfunction]
#[pyo3(signature = (data, scenario, tau, algorithms, n_sims=100, seed=0, vars=None, sex="all"))]
#[allow(clippy::too_many_arguments)]
fn run_experiment<'py>(
    py: Python<'py>,
    data: &PyDataset,
    scenario: &str,
    tau: f64,
    algorithms: Vec<String>,
    n_sims: usize,
    seed: u64,
    vars: Option<Vec<usize>>,
    sex: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let spec = ExperimentSpec {
        sex: sex.parse().map_err(value_err)?,
        scenario: parse_scenario(scenario)?,
        tau,
        algorithms: parse_algorithms(algorithms)?,
        vars,
        n_sims,
        master_seed: seed,
    };
    let result = harness::run(&data.inner, &spec).map_err(runtime_err)?;
    let out = PyDict::new(py);
    for (algo, mean) in &result.means {
        out.set_item(algo.name(), mean_to_dict(py, mean)?)?;
    }
    Ok(out)
}

/// Equilibrium classifier cutoff for a probability model.
#[pyfunction]
#[pyo3(signature = (data, scenario, tau, model, n_sims=100, seed=0))]
fn equilibrium_cutoff<'py>(
    py: Python<'py>,
    data: &PyDataset,
    scenario: &str,
    tau: f64,
    model: &str,
    n_sims: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let kind: ModelKind = model.parse().map_err(value_err)?;
    let (sampling, _) = equilibrium_sampling(
        &data.inner,
        parse_scenario(scenario)?,
        tau,
        kind,
        n_sims,
        seed,
        false,
    )
    .map_err(runtime_err)?;
    let out = PyDict::new(py);
    out.set_item("equilibrium_cutoff", sampling.equilibrium_cutoff)?;
    out.set_item("centroid", sampling.centroid)?;
    out.set_item("pair_points", sampling.mean_pair_points.to_vec())?;
    out.set_item("failed_sims", sampling.failures.len())?;
    Ok(out)
}

/// Greedy variable-hierarchy search.
#[pyfunction]
#[pyo3(signature = (data, scenario, tau, algorithm="dds1", metric="tpr", n_sims=200, seed=0, sex="all"))]
#[allow(clippy::too_many_arguments)]
fn greedy_hierarchy<'py>(
    py: Python<'py>,
    data: &PyDataset,
    scenario: &str,
    tau: f64,
    algorithm: &str,
    metric: &str,
    n_sims: usize,
    seed: u64,
    sex: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let config = SearchConfig {
        sex: sex.parse::<SexFilter>().map_err(value_err)?,
        scenario: parse_scenario(scenario)?,
        tau,
        algorithm: algorithm.parse().map_err(value_err)?,
        metric: metric.parse::<Metric>().map_err(value_err)?,
        n_sims,
        master_seed: seed,
    };
    let trace = hierarchy::greedy_search(&data.inner, &config).map_err(runtime_err)?;
    let out = PyDict::new(py);
    out.set_item("order", trace.order.clone())?;
    out.set_item("prefix_scores", trace.prefix_scores.clone())?;
    out.set_item("evaluations", trace.evaluations)?;
    out.set_item("final_set", trace.final_set())?;
    out.set_item(
        "stopped_because",
        match trace.stopped_because {
            hierarchy::StopReason::NoImprovement => "no-improvement",
            hierarchy::StopReason::AllVariables => "all-variables",
        },
    )?;
    Ok(out)
}

/// Exhaustive subset ranking; returns [(vars, mean_metric), ...] best first.
#[pyfunction]
#[pyo3(signature = (data, scenario, tau, algorithm="dds1", metric="tpr", n_sims=200, seed=0, sex="all"))]
#[allow(clippy::too_many_arguments)]
fn exhaustive_hierarchy(
    data: &PyDataset,
    scenario: &str,
    tau: f64,
    algorithm: &str,
    metric: &str,
    n_sims: usize,
    seed: u64,
    sex: &str,
) -> PyResult<Vec<(Vec<usize>, f64)>> {
    let config = SearchConfig {
        sex: sex.parse::<SexFilter>().map_err(value_err)?,
        scenario: parse_scenario(scenario)?,
        tau,
        algorithm: algorithm.parse().map_err(value_err)?,
        metric: metric.parse::<Metric>().map_err(value_err)?,
        n_sims,
        master_seed: seed,
    };
    let ranked = hierarchy::exhaustive_search(&data.inner, &config).map_err(runtime_err)?;
    Ok(ranked.into_iter().map(|s| (s.vars, s.mean_metric)).collect())
}

#[pymodule]
fn ddsbench_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyDataset>()?;
    m.add_function(wrap_pyfunction!(split_sizes, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(equilibrium_cutoff, m)?)?;
    m.add_function(wrap_pyfunction!(greedy_hierarchy, m)?)?;
    m.add_function(wrap_pyfunction!(exhaustive_hierarchy, m)?)?;
    Ok(())
}
