use std::path::PathBuf;

use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use gatescan::catalog::{Catalog, CatalogEntry};
use gatescan::driver::{self, ScanConfig};
use gatescan::efflen::measure_lengths;
use gatescan::gatekit::{classify, find_gates as search, GateKind, Tolerances};
use gatescan::graphset::{self, enumerate_levels, parse_graph6, write_graph6};
use gatescan::ports::TailMultiset;
use gatescan::scatter::{build_system, Momentum};

fn value_err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn momentum(p: i64, q: i64) -> PyResult<Momentum> {
    Momentum::new(p, q).map_err(value_err)
}

/// A simple undirected graph on at most 12 vertices.
#[pyclass(module = "pygatescan")]
#[derive(Clone)]
struct Graph {
    inner: graphset::Graph,
}

#[pymethods]
impl Graph {
    #[new]
    #[pyo3(signature = (n, edges=Vec::new()))]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        let inner = graphset::Graph::from_edges(n, &edges).map_err(value_err)?;
        Ok(Graph { inner })
    }

    #[staticmethod]
    fn from_graph6(s: &str) -> PyResult<Self> {
        let inner = parse_graph6(s.trim()).map_err(value_err)?;
        Ok(Graph { inner })
    }

    fn graph6(&self) -> String {
        write_graph6(&self.inner)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().collect()
    }

    fn __repr__(&self) -> String {
        format!("Graph({}, {:?})", self.inner.n(), self.edges())
    }

    fn __eq__(&self, other: &Graph) -> bool {
        self.inner == other.inner
    }
}

/// One role assignment of a configuration that acts as a gate.
#[pyclass(module = "pygatescan", get_all)]
#[derive(Clone)]
struct Gate {
    /// Tail vertices as (in0, in1, out0, out1).
    vertices: (u8, u8, u8, u8),
    /// Operator rows, `op[j][i] = t(j_out <- i_in)`.
    op: [[Complex64; 2]; 2],
    kind: String,
    theta: f64,
    phi: f64,
    alpha: f64,
    length: Option<f64>,
}

#[pymethods]
impl Gate {
    fn __repr__(&self) -> String {
        format!(
            "Gate(vertices={:?}, kind={}, theta={:.6}, phi={:.6}, alpha={:.6}, length={:?})",
            self.vertices, self.kind, self.theta, self.phi, self.alpha, self.length
        )
    }
}

fn kind_name(k: GateKind) -> String {
    match k {
        GateKind::Identity => "identity",
        GateKind::Rotation => "rotation",
    }
    .into()
}

/// Every gate of a graph with tails on `tails` at momentum `p pi / q`.
#[pyfunction]
fn find_gates(graph: &Graph, tails: [u8; 4], p: i64, q: i64) -> PyResult<Vec<Gate>> {
    let n = graph.inner.n();
    if tails.iter().any(|&v| v as usize >= n) {
        return Err(PyValueError::new_err("tail vertex out of range"));
    }
    let tol = Tolerances::default();
    let m = TailMultiset::from_vertices(n, tails);
    let sys = build_system(&graph.inner, &m, momentum(p, q)?).map_err(value_err)?;
    let found = search(&sys, &tol).map_err(value_err)?;
    let mut out = Vec::new();
    for c in found.gates {
        let class = classify(&c, &tol).map_err(value_err)?;
        let length = measure_lengths(&sys, &c, &tol, false).ok().and_then(|r| r.consensus);
        let [a, b, x, y] = c.assignment.vertices();
        out.push(Gate {
            vertices: (a, b, x, y),
            op: c.op.0,
            kind: kind_name(class.kind),
            theta: class.theta,
            phi: class.phi,
            alpha: class.alpha,
            length,
        });
    }
    Ok(out)
}

/// Graphs on `n` vertices, one per isomorphism class.
#[pyfunction]
fn enumerate_graphs(n: usize) -> PyResult<Vec<Graph>> {
    let graphs = graphset::enumerate_graphs(n).map_err(value_err)?;
    Ok(graphs.into_iter().map(|inner| Graph { inner }).collect())
}

/// Number of isomorphism classes for each vertex count up to `n_max`.
#[pyfunction]
fn class_counts(n_max: usize) -> PyResult<Vec<usize>> {
    Ok(enumerate_levels(n_max).map_err(value_err)?.iter().map(Vec::len).collect())
}

#[pyclass(module = "pygatescan", get_all)]
#[derive(Clone)]
struct Entry {
    id: usize,
    /// Momentum as (p, q) for `p pi / q`.
    momentum: (u32, u32),
    kind: String,
    theta: f64,
    phi: f64,
    alpha: f64,
    angle_form: String,
    length: f64,
    length_form: Option<String>,
    usable: bool,
    multiplicity: u64,
    n: u8,
    graph6: String,
    vertices: (u8, u8, u8, u8),
}

#[pymethods]
impl Entry {
    fn __repr__(&self) -> String {
        format!(
            "Entry(id={}, k={}pi/{}, kind={}, alpha={}, length={:.6}, n={})",
            self.id, self.momentum.0, self.momentum.1, self.kind, self.angle_form, self.length, self.n
        )
    }
}

impl From<&CatalogEntry> for Entry {
    fn from(e: &CatalogEntry) -> Self {
        let [a, b, x, y] = e.witness.vertices;
        Entry {
            id: e.id,
            momentum: (e.momentum.p(), e.momentum.q()),
            kind: kind_name(e.kind),
            theta: e.theta,
            phi: e.phi,
            alpha: e.alpha,
            angle_form: e.angle_form.clone(),
            length: e.length,
            length_form: e.length_form.clone(),
            usable: e.usable,
            multiplicity: e.multiplicity,
            n: e.n,
            graph6: e.witness.graph6.clone(),
            vertices: (a, b, x, y),
        }
    }
}

/// A finished scan: distinct (momentum, length, operator) entries.
#[pyclass(name = "Catalog", module = "pygatescan")]
struct PyCatalog {
    inner: Catalog,
}

#[pymethods]
impl PyCatalog {
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let inner = Catalog::load(&path).map_err(|e| PyIOError::new_err(e.to_string()))?;
        Ok(PyCatalog { inner })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn entries(&self) -> Vec<Entry> {
        self.inner.entries.iter().map(Entry::from).collect()
    }

    /// Totals of the scan as a JSON object string.
    fn totals_json(&self) -> PyResult<String> {
        Ok(serde_json_string(&self.inner.report().totals))
    }

    /// Usable operations at momentum `p pi / q` as (theta, phi, alpha).
    fn operations(&self, p: i64, q: i64) -> PyResult<Vec<(f64, f64, f64)>> {
        let k = momentum(p, q)?;
        let ops = self.inner.distinct_operations(k, &Tolerances::default());
        Ok(ops.iter().map(|c| (c.theta, c.phi, c.alpha)).collect())
    }
}

fn serde_json_string<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).unwrap_or_default()
}

/// Scans every graph on `n_min..=n_max` vertices and writes the catalog
/// files into `out`.
#[pyfunction]
#[pyo3(signature = (n_max, out, n_min=1, workers=None, momenta=None))]
fn scan(
    py: Python<'_>,
    n_max: usize,
    out: PathBuf,
    n_min: usize,
    workers: Option<usize>,
    momenta: Option<&str>,
) -> PyResult<PyCatalog> {
    let mut cfg = ScanConfig::new(n_max, &out);
    cfg.n_min = n_min;
    cfg.workers = workers;
    if let Some(m) = momenta {
        cfg.momenta = driver::parse_momenta(m).map_err(value_err)?;
    }
    let outcome = py.allow_threads(|| driver::scan(&cfg)).map_err(value_err)?;
    let inner = outcome.catalog.ok_or_else(|| PyValueError::new_err("scan stopped early"))?;
    Ok(PyCatalog { inner })
}

/// Re-solves every entry of a catalog; returns (entries, failures).
#[pyfunction]
#[pyo3(signature = (path, extended=false))]
fn verify(py: Python<'_>, path: PathBuf, extended: bool) -> PyResult<(usize, usize)> {
    let report = py
        .allow_threads(|| driver::verify(&path, extended, &Tolerances::default()))
        .map_err(value_err)?;
    Ok((report.checks.len(), report.failed))
}

#[pymodule]
fn pygatescan(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Graph>()?;
    m.add_class::<Gate>()?;
    m.add_class::<Entry>()?;
    m.add_class::<PyCatalog>()?;
    m.add_function(wrap_pyfunction!(find_gates, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_graphs, m)?)?;
    m.add_function(wrap_pyfunction!(class_counts, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
