//! Python bindings for `rule30_lab`, importable as `rule30`.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyBytes;

use rule30_lab::metrics::{branch_tally, metrics_report, MetricsReport};
use rule30_lab::render::write_report_csv;
use rule30_lab::{
    algebra, central_column as core_central_column, pearson as core_pearson,
    period_scan as core_period_scan, prefix_ratio as core_prefix_ratio,
    randomness_count_series as core_randomness, ratio_series as core_ratio, single_seed,
    step as core_step, write_pbm, BoolOp, Evolution, MetricSeries, PbmFormat, RatioScope,
    RuleTable, Tape as CoreTape, WindowPolicy,
};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rule_arg(n: i64) -> PyResult<RuleTable> {
    RuleTable::from_number(n).map_err(value_err)
}

fn policy_arg(s: &str) -> PyResult<WindowPolicy> {
    s.parse().map_err(value_err)
}

fn series_out(s: &MetricSeries) -> Vec<(usize, f64)> {
    s.entries().to_vec()
}

/// An elementary rule given by its Wolfram number.
#[pyclass(
    name = "Rule",
    module = "rule30",
    frozen,
    eq,
    hash,
    skip_from_py_object
)]
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct PyRule {
    inner: RuleTable,
}

#[pymethods]
impl PyRule {
    #[new]
    fn new(number: i64) -> PyResult<Self> {
        Ok(PyRule {
            inner: rule_arg(number)?,
        })
    }

    #[getter]
    fn number(&self) -> u8 {
        self.inner.number()
    }

    fn apply(&self, l: bool, c: bool, r: bool) -> bool {
        self.inner.apply(l, c, r)
    }

    /// Outputs for neighborhoods 111, 110, ..., 000.
    fn outputs(&self) -> Vec<bool> {
        self.inner.outputs().to_vec()
    }

    fn mirror(&self) -> Self {
        PyRule {
            inner: algebra::mirror(self.inner),
        }
    }

    fn complement(&self) -> Self {
        PyRule {
            inner: algebra::complement(self.inner),
        }
    }

    fn combine(&self, other: PyRef<'_, PyRule>, op: &str) -> PyResult<Self> {
        let op: BoolOp = op.parse().map_err(value_err)?;
        Ok(PyRule {
            inner: algebra::combine(self.inner, other.inner, op),
        })
    }

    fn __int__(&self) -> u8 {
        self.inner.number()
    }

    fn __repr__(&self) -> String {
        format!("Rule({})", self.inner)
    }
}

/// A row of cells; `origin` is the index of absolute position 0.
#[pyclass(name = "Tape", module = "rule30", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTape {
    inner: CoreTape,
}

#[pymethods]
impl PyTape {
    #[new]
    #[pyo3(signature = (cells, origin = 0))]
    fn new(cells: &str, origin: isize) -> PyResult<Self> {
        Ok(PyTape {
            inner: CoreTape::parse(cells, origin).map_err(value_err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (policy = "lightcone"))]
    fn seed(policy: &str) -> PyResult<Self> {
        Ok(PyTape {
            inner: single_seed(policy_arg(policy)?).map_err(value_err)?,
        })
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    #[getter]
    fn origin(&self) -> isize {
        self.inner.origin()
    }

    fn bits(&self) -> Vec<bool> {
        self.inner.to_bits()
    }

    /// Cell at an absolute position; positions outside the tape read 0.
    fn at(&self, pos: isize) -> bool {
        self.inner.get_abs(pos)
    }

    fn count_ones(&self) -> u64 {
        self.inner.count_ones()
    }

    fn __len__(&self) -> usize {
        self.inner.width()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }

    fn __eq__(&self, other: PyRef<'_, PyTape>) -> bool {
        self.inner == other.inner
    }
}

/// Advances `tape` by one generation.
#[pyfunction]
#[pyo3(signature = (tape, rule, policy = "lightcone"))]
fn step(tape: PyRef<'_, PyTape>, rule: i64, policy: &str) -> PyResult<PyTape> {
    Ok(PyTape {
        inner: core_step(&tape.inner, rule_arg(rule)?, policy_arg(policy)?),
    })
}

/// Rows `0..=steps` evolved from a single seed.
#[pyfunction]
#[pyo3(signature = (rule, steps, policy = "lightcone"))]
fn evolve(py: Python<'_>, rule: i64, steps: usize, policy: &str) -> PyResult<Vec<PyTape>> {
    let (rule, policy) = (rule_arg(rule)?, policy_arg(policy)?);
    let diagram = py
        .detach(|| {
            let seed = single_seed(policy).map_err(|e| e.to_string())?;
            Evolution::new(rule, policy)
                .run(seed, steps, &mut [])
                .map_err(|e| e.to_string())
        })
        .map_err(value_err)?;
    Ok(diagram
        .into_rows()
        .into_iter()
        .map(|inner| PyTape { inner })
        .collect())
}

/// Cells at absolute position 0 for rows `0..=steps`.
#[pyfunction]
#[pyo3(signature = (rule, steps, policy = "lightcone"))]
fn central_column(py: Python<'_>, rule: i64, steps: usize, policy: &str) -> PyResult<Vec<bool>> {
    let (rule, policy) = (rule_arg(rule)?, policy_arg(policy)?);
    py.detach(|| core_central_column(rule, policy, steps))
        .map_err(value_err)
}

#[pyfunction]
fn combine(a: i64, b: i64, op: &str) -> PyResult<u8> {
    let op: BoolOp = op.parse().map_err(value_err)?;
    Ok(algebra::combine(rule_arg(a)?, rule_arg(b)?, op).number())
}

#[pyfunction]
fn mirror(a: i64) -> PyResult<u8> {
    Ok(algebra::mirror(rule_arg(a)?).number())
}

#[pyfunction]
fn complement(a: i64) -> PyResult<u8> {
    Ok(algebra::complement(rule_arg(a)?).number())
}

/// Neighborhoods, as `"lcr"` strings, on which the two rules differ.
#[pyfunction]
fn divergence_mask(a: i64, b: i64) -> PyResult<Vec<String>> {
    let mask = algebra::divergence_mask(rule_arg(a)?, rule_arg(b)?);
    Ok(mask
        .members()
        .map(|(l, c, r)| format!("{}{}{}", l as u8, c as u8, r as u8))
        .collect())
}

/// `(iteration, hits / total)` for iterations `1..=steps`.
#[pyfunction]
#[pyo3(signature = (rule, steps, policy = "lightcone"))]
fn randomness_count_series(
    py: Python<'_>,
    rule: i64,
    steps: usize,
    policy: &str,
) -> PyResult<Vec<(usize, f64)>> {
    let (rule, policy) = (rule_arg(rule)?, policy_arg(policy)?);
    let s = py
        .detach(|| core_randomness(rule, policy, steps))
        .map_err(value_err)?;
    Ok(series_out(&s))
}

/// `(hits, total)` after `steps` steps.
#[pyfunction]
#[pyo3(signature = (rule, steps, policy = "lightcone"))]
fn randomness_tally(py: Python<'_>, rule: i64, steps: usize, policy: &str) -> PyResult<(u64, u64)> {
    let (rule, policy) = (rule_arg(rule)?, policy_arg(policy)?);
    let t = py
        .detach(|| branch_tally(rule, policy, steps))
        .map_err(value_err)?;
    Ok((t.hits, t.total))
}

/// `(iteration, zeros / ones)` for iterations `1..=steps`.
#[pyfunction]
#[pyo3(signature = (rule, steps, policy = "lightcone", scope = "central-column"))]
fn ratio_series(
    py: Python<'_>,
    rule: i64,
    steps: usize,
    policy: &str,
    scope: &str,
) -> PyResult<Vec<(usize, f64)>> {
    let (rule, policy) = (rule_arg(rule)?, policy_arg(policy)?);
    let scope: RatioScope = scope.parse().map_err(value_err)?;
    let s = py
        .detach(|| core_ratio(rule, policy, steps, scope))
        .map_err(value_err)?;
    Ok(series_out(&s))
}

/// Pearson correlation of two equal-length value sequences.
#[pyfunction]
fn pearson(x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    let series = |v: Vec<f64>| {
        MetricSeries::new(v.into_iter().enumerate().map(|(i, x)| (i + 1, x)).collect())
            .map_err(value_err)
    };
    core_pearson(&series(x)?, &series(y)?).map_err(value_err)
}

/// `(period, onset)` of the smallest eventual period, or `None`.
#[pyfunction]
#[pyo3(signature = (bits, max_period = 2048, max_onset = 2048))]
fn period_scan(
    py: Python<'_>,
    bits: Vec<bool>,
    max_period: usize,
    max_onset: usize,
) -> PyResult<Option<(usize, usize)>> {
    let report = py
        .detach(|| core_period_scan(&bits, max_period, max_onset))
        .map_err(value_err)?;
    Ok(report.period().zip(report.onset()))
}

#[pyfunction]
fn prefix_ratio(bits: Vec<bool>, n: usize) -> PyResult<f64> {
    core_prefix_ratio(&bits, n).map_err(value_err)
}

/// PBM image of the spacetime diagram from a single seed.
#[pyfunction]
#[pyo3(signature = (rule, steps, policy = "lightcone", format = "p4"))]
fn render_pbm<'py>(
    py: Python<'py>,
    rule: i64,
    steps: usize,
    policy: &str,
    format: &str,
) -> PyResult<Bound<'py, PyBytes>> {
    let (rule, policy) = (rule_arg(rule)?, policy_arg(policy)?);
    let format: PbmFormat = format.parse().map_err(value_err)?;
    let seed = single_seed(policy).map_err(value_err)?;
    let diagram = Evolution::new(rule, policy)
        .run(seed, steps, &mut [])
        .map_err(value_err)?;
    let mut buf = Vec::new();
    write_pbm(&diagram, format, &mut buf).map_err(|e| PyIOError::new_err(e.to_string()))?;
    Ok(PyBytes::new(py, &buf))
}

/// Metrics CSV: randomness count and zeros/ones ratio per iteration.
#[pyfunction]
#[pyo3(signature = (rule, steps, policy = "lightcone", scope = "central-column"))]
fn metrics_csv(
    py: Python<'_>,
    rule: i64,
    steps: usize,
    policy: &str,
    scope: &str,
) -> PyResult<String> {
    let (rule, policy) = (rule_arg(rule)?, policy_arg(policy)?);
    let scope: RatioScope = scope.parse().map_err(value_err)?;
    let report: MetricsReport = py
        .detach(|| metrics_report(rule, policy, steps, scope))
        .map_err(value_err)?;
    let mut buf = Vec::new();
    write_report_csv(&report, &mut buf).map_err(|e| PyIOError::new_err(e.to_string()))?;
    String::from_utf8(buf).map_err(value_err)
}

#[pymodule]
fn rule30(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRule>()?;
    m.add_class::<PyTape>()?;
    m.add_function(wrap_pyfunction!(step, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(central_column, m)?)?;
    m.add_function(wrap_pyfunction!(combine, m)?)?;
    m.add_function(wrap_pyfunction!(mirror, m)?)?;
    m.add_function(wrap_pyfunction!(complement, m)?)?;
    m.add_function(wrap_pyfunction!(divergence_mask, m)?)?;
    m.add_function(wrap_pyfunction!(randomness_count_series, m)?)?;
    m.add_function(wrap_pyfunction!(randomness_tally, m)?)?;
    m.add_function(wrap_pyfunction!(ratio_series, m)?)?;
    m.add_function(wrap_pyfunction!(pearson, m)?)?;
    m.add_function(wrap_pyfunction!(period_scan, m)?)?;
    m.add_function(wrap_pyfunction!(prefix_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(render_pbm, m)?)?;
    m.add_function(wrap_pyfunction!(metrics_csv, m)?)?;
    Ok(())
}
