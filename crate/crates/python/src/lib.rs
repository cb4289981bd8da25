//! Python bindings for the grid scan.
//!
//! Points cross the boundary as lists of float lists; cell indices as lists
//! of ints. Library errors surface as `ValueError`, or `OSError` for file
//! access.

use std::path::PathBuf;

use gridscan_core as core;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: core::Error) -> PyErr {
    match e {
        core::Error::Io { .. } => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn resolution(a: u32, dim: usize) -> PyResult<core::GridResolution> {
    core::GridResolution::new(a, dim).map_err(py_err)
}

/// Points inside the unit cube.
#[pyclass(frozen, name = "Dataset")]
struct PyDataset(core::Dataset);

#[pymethods]
impl PyDataset {
    #[new]
    fn new(points: Vec<Vec<f64>>) -> PyResult<Self> {
        core::Dataset::new(points).map(PyDataset).map_err(py_err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn points(&self) -> Vec<Vec<f64>> {
        self.0.to_vecs()
    }

    fn __repr__(&self) -> String {
        format!("Dataset(len={}, dim={})", self.0.len(), self.0.dim())
    }
}

#[pyclass(frozen, name = "ScanConfig")]
struct PyScanConfig(core::ScanConfig);

#[pymethods]
impl PyScanConfig {
    /// Give at most one of `density_fraction` and `density_abs`; the default
    /// density is a fraction of 0.005.
    #[new]
    #[pyo3(signature = (volume_limit=0.4, coverage=0.9, density_fraction=None, density_abs=None, a_cap="full", parallel=false))]
    fn new(
        volume_limit: f64,
        coverage: f64,
        density_fraction: Option<f64>,
        density_abs: Option<usize>,
        a_cap: &str,
        parallel: bool,
    ) -> PyResult<Self> {
        let density = match (density_fraction, density_abs) {
            (Some(_), Some(_)) => {
                return Err(PyValueError::new_err(
                    "density_fraction and density_abs are exclusive",
                ))
            }
            (Some(f), None) => core::Density::Fraction(f),
            (None, Some(p)) => core::Density::Absolute(p),
            (None, None) => core::ScanConfig::default().density,
        };
        let a_cap = match a_cap {
            "full" => core::CapPolicy::Full,
            "half" => core::CapPolicy::Half,
            other => return Err(PyValueError::new_err(format!("unknown cap policy '{other}'"))),
        };
        let cfg = core::ScanConfig {
            volume_limit,
            coverage_fraction: coverage,
            density,
            a_cap,
            parallel,
            ..core::ScanConfig::default()
        };
        cfg.validate().map_err(py_err)?;
        Ok(PyScanConfig(cfg))
    }

    #[getter]
    fn volume_limit(&self) -> f64 {
        self.0.volume_limit
    }

    #[getter]
    fn coverage(&self) -> f64 {
        self.0.coverage_fraction
    }

    fn effective_p(&self, j: usize) -> usize {
        core::effective_p(&self.0, j)
    }

    fn required_coverage(&self, j: usize) -> usize {
        core::required_coverage(&self.0, j)
    }

    fn resolution_cap(&self, j: usize, dim: usize) -> u32 {
        core::resolution_cap(&self.0, j, dim)
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

/// Outcome of a scan: either kept cells at the final resolution or the
/// reason nothing was found.
#[pyclass(frozen, name = "ScanResult")]
struct PyScanResult(core::ScanOutcome);

impl PyScanResult {
    fn kept_or_err(&self) -> PyResult<&core::KeptCells> {
        self.0
            .kept()
            .ok_or_else(|| PyValueError::new_err("scan found no manifold"))
    }
}

#[pymethods]
impl PyScanResult {
    #[getter]
    fn found(&self) -> bool {
        self.0.is_found()
    }

    /// `None` when found, else one of `empty_after_filter`,
    /// `resolution_cap_exceeded`, `coverage_too_low`.
    #[getter]
    fn reason(&self) -> Option<&'static str> {
        match &self.0 {
            core::ScanOutcome::Found { .. } => None,
            core::ScanOutcome::NotFound { reason, .. } => Some(match reason {
                core::NotFoundReason::EmptyAfterFilter => "empty_after_filter",
                core::NotFoundReason::ResolutionCapExceeded => "resolution_cap_exceeded",
                core::NotFoundReason::CoverageTooLow => "coverage_too_low",
            }),
        }
    }

    #[getter]
    fn resolution(&self) -> Option<u32> {
        self.0.kept().map(|k| k.resolution().a())
    }

    #[getter]
    fn total_volume(&self) -> Option<f64> {
        self.0.kept().map(core::KeptCells::total_volume)
    }

    #[getter]
    fn covered(&self) -> Option<usize> {
        self.0.kept().map(core::KeptCells::covered)
    }

    /// `(a, occupied, kept, total_volume, covered)` per pass.
    fn trace(&self) -> Vec<(u32, usize, usize, f64, usize)> {
        self.0
            .trace()
            .iter()
            .map(|t| (t.a, t.occupied, t.kept, t.total_volume, t.covered))
            .collect()
    }

    /// `(index, center, count)` per kept cell; empty when not found.
    fn kept_cells(&self) -> Vec<(Vec<u32>, Vec<f64>, usize)> {
        self.0.kept().map_or_else(Vec::new, |k| {
            k.cells()
                .iter()
                .map(|c| (c.index.coords().to_vec(), c.center.clone(), c.count))
                .collect()
        })
    }

    /// Kept-cell centers in greedy nearest-neighbor order.
    fn chain(&self) -> PyResult<Vec<Vec<f64>>> {
        let chain = core::build_chain(self.kept_or_err()?).map_err(py_err)?;
        Ok(chain.vertices().to_vec())
    }

    /// Simplices of intrinsic dimension `s`, as lists of chain positions.
    #[pyo3(signature = (s=1))]
    fn manifold(&self, s: usize) -> PyResult<Vec<Vec<usize>>> {
        let chain = core::build_chain(self.kept_or_err()?).map_err(py_err)?;
        Ok(core::build_manifold(&chain, s).map_err(py_err)?.simplices)
    }

    fn __repr__(&self) -> String {
        match (self.resolution(), self.reason()) {
            (Some(a), _) => format!("ScanResult(found, a={a}, kept={})", self.kept_cells().len()),
            (None, reason) => format!("ScanResult(not found: {})", reason.unwrap_or("?")),
        }
    }
}

#[pyclass(frozen, name = "PrincipalAxes")]
struct PyPrincipalAxes(core::PrincipalAxes);

#[pymethods]
impl PyPrincipalAxes {
    #[getter]
    fn mean(&self) -> Vec<f64> {
        self.0.mean.clone()
    }

    #[getter]
    fn axes(&self) -> Vec<Vec<f64>> {
        self.0.axes.clone()
    }

    #[getter]
    fn variances(&self) -> Vec<f64> {
        self.0.variances.clone()
    }

    fn project(&self, point: Vec<f64>) -> Vec<f64> {
        self.0.project(&point)
    }

    fn reconstruct(&self, coords: Vec<f64>) -> Vec<f64> {
        self.0.reconstruct(&coords)
    }
}

/// Rescales raw points into the unit cube. Returns the dataset with the
/// per-axis `offset` and `scale` so that `unit = (raw - offset) * scale`.
#[pyfunction]
fn normalize(points: Vec<Vec<f64>>) -> PyResult<(PyDataset, Vec<f64>, Vec<f64>)> {
    let (ds, t) = core::normalize_to_unit_cube(&points).map_err(py_err)?;
    Ok((PyDataset(ds), t.offset, t.scale))
}

/// Seeded synthetic data: `diagonal`, `sine-curve`, `uniform` or `two-clusters`.
#[pyfunction]
#[pyo3(signature = (kind, count, dim=2, outliers=0.0, seed=0))]
fn generate(kind: &str, count: usize, dim: usize, outliers: f64, seed: u64) -> PyResult<PyDataset> {
    let kind: core::SyntheticKind = kind.parse().map_err(py_err)?;
    let spec = core::SyntheticSpec::new(kind, count, dim).outliers(outliers).seed(seed);
    core::generate(&spec).map(PyDataset).map_err(py_err)
}

/// Raw points from a CSV or JSON file; the format follows the extension
/// unless given.
#[pyfunction]
#[pyo3(signature = (path, format=None, header=true))]
fn load_points(path: PathBuf, format: Option<&str>, header: bool) -> PyResult<Vec<Vec<f64>>> {
    let format = match format {
        Some(f) => f.parse().map_err(py_err)?,
        None => core::PointFormat::from_path(&path),
    };
    let header = if header {
        core::Header::Auto
    } else {
        core::Header::Absent
    };
    core::load_points(&path, format, header).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (dataset, config=None))]
fn scan(dataset: &PyDataset, config: Option<&PyScanConfig>) -> PyResult<PyScanResult> {
    let cfg = config.map_or_else(core::ScanConfig::default, |c| c.0.clone());
    core::scan(&dataset.0, &cfg).map(PyScanResult).map_err(py_err)
}

#[pyfunction]
fn pca_fit(dataset: &PyDataset, s: usize) -> PyResult<PyPrincipalAxes> {
    core::pca_fit(&dataset.0, s).map(PyPrincipalAxes).map_err(py_err)
}

#[pyfunction]
fn cell_of(point: Vec<f64>, a: u32) -> PyResult<Vec<u32>> {
    let res = resolution(a, point.len())?;
    Ok(core::cell_of(&point, res).map_err(py_err)?.coords().to_vec())
}

#[pyfunction]
fn cell_center(index: Vec<u32>, a: u32) -> PyResult<Vec<f64>> {
    let res = resolution(a, index.len())?;
    core::cell_center(&core::CellIndex::new(index), res).map_err(py_err)
}

#[pymodule]
fn gridscan(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDataset>()?;
    m.add_class::<PyScanConfig>()?;
    m.add_class::<PyScanResult>()?;
    m.add_class::<PyPrincipalAxes>()?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(load_points, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    m.add_function(wrap_pyfunction!(pca_fit, m)?)?;
    m.add_function(wrap_pyfunction!(cell_of, m)?)?;
    m.add_function(wrap_pyfunction!(cell_center, m)?)?;
    Ok(())
}
