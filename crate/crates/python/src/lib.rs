//! Python bindings for the PF-SDM pipeline.

use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use pfsdm_core::analysis::{self, PipelineConfig};
use pfsdm_core::eikonal::{self, SolverConfig};
use pfsdm_core::moments::{self, MomentConfig};
use pfsdm_core::pushforward::{self, DeformationConfig};
use pfsdm_core::shapes::{self, ShapeKind};
use pfsdm_core::{PfsdmError as CoreError, Point};

create_exception!(pfsdm, PfsdmError, PyException, "Error raised by the PF-SDM core.");

fn err(e: CoreError) -> PyErr {
    PfsdmError::new_err(format!("{}: {e}", e.name()))
}

fn json_err(e: serde_json::Error) -> PyErr {
    err(CoreError::Json(e))
}

fn to_contour(points: Vec<(f64, f64)>) -> PyResult<shapes::Contour> {
    shapes::Contour::from_xy(&points).map_err(err)
}

fn from_contour(c: &shapes::Contour) -> Vec<(f64, f64)> {
    c.points().iter().map(|p| (p.x, p.y)).collect()
}

fn kind(name: &str) -> PyResult<ShapeKind> {
    name.parse().map_err(err)
}

/// Pipeline configuration, built from keyword overrides of the defaults.
#[pyclass(name = "Config", from_py_object)]
#[derive(Clone)]
struct PyConfig {
    inner: PipelineConfig,
}

#[pymethods]
impl PyConfig {
    #[new]
    #[pyo3(signature = (degree=None, viscosity=None, grid=None, boundary_weight=None, def_degree=None, k_order=None, theta_samples=None, r_samples=None))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        degree: Option<usize>,
        viscosity: Option<f64>,
        grid: Option<usize>,
        boundary_weight: Option<f64>,
        def_degree: Option<usize>,
        k_order: Option<usize>,
        theta_samples: Option<usize>,
        r_samples: Option<usize>,
    ) -> PyResult<Self> {
        let mut c = PipelineConfig::default();
        let s: &mut SolverConfig = &mut c.solver;
        s.degree = degree.unwrap_or(s.degree);
        s.viscosity = viscosity.unwrap_or(s.viscosity);
        s.q_per_axis = grid.unwrap_or(s.q_per_axis);
        s.boundary_weight = boundary_weight.unwrap_or(s.boundary_weight);
        let d: &mut DeformationConfig = &mut c.deformation;
        d.degree = def_degree.unwrap_or(d.degree);
        let m: &mut MomentConfig = &mut c.moments;
        m.k_order = k_order.unwrap_or(m.k_order);
        m.theta_samples = theta_samples.unwrap_or(m.theta_samples);
        m.r_samples = r_samples.unwrap_or(m.r_samples);
        c.validate().map_err(err)?;
        Ok(Self { inner: c })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(json_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Config(degree={}, viscosity={}, grid={}, k_order={})",
            self.inner.solver.degree, self.inner.solver.viscosity, self.inner.solver.q_per_axis, self.inner.moments.k_order
        )
    }
}

fn config_or_default(cfg: Option<PyConfig>) -> PipelineConfig {
    cfg.map(|c| c.inner).unwrap_or_default()
}

#[pyclass(name = "SdfModel", frozen, skip_from_py_object)]
struct PySdfModel {
    inner: eikonal::SdfModel,
}

#[pymethods]
impl PySdfModel {
    fn eval(&self, x: f64, y: f64) -> f64 {
        self.inner.eval(Point::new(x, y))
    }

    fn grad(&self, x: f64, y: f64) -> (f64, f64) {
        self.inner.grad(Point::new(x, y))
    }

    fn laplacian(&self, x: f64, y: f64) -> f64 {
        self.inner.laplacian(Point::new(x, y))
    }

    #[getter]
    fn pde_rms(&self) -> f64 {
        self.inner.pde_rms
    }

    #[getter]
    fn boundary_rms(&self) -> f64 {
        self.inner.boundary_rms
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.poly.degree()
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(json_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "SdfModel(degree={}, pde_rms={:.3e}, boundary_rms={:.3e})",
            self.inner.poly.degree(),
            self.inner.pde_rms,
            self.inner.boundary_rms
        )
    }
}

#[pyclass(name = "PfSdfField", frozen, skip_from_py_object)]
struct PyPfSdfField {
    inner: pushforward::PfSdfField,
}

#[pymethods]
impl PyPfSdfField {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: serde_json::from_str(text).map_err(json_err)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(json_err)
    }

    fn eval(&self, theta: f64, r: f64) -> PyResult<f64> {
        self.inner.eval(theta, r).map_err(err)
    }

    /// Angular derivative of order 1 or 2.
    fn dtheta(&self, theta: f64, r: f64, order: u8) -> PyResult<f64> {
        self.inner.dtheta(theta, r, order).map_err(err)
    }

    fn curvature(&self, theta: f64, r: f64) -> PyResult<f64> {
        moments::curvature(&self.inner, theta, r).map_err(err)
    }

    #[getter]
    fn zero_residual(&self) -> f64 {
        self.inner.map.zero_residual
    }

    #[getter]
    fn sdf(&self) -> PySdfModel {
        PySdfModel {
            inner: self.inner.sdf.clone(),
        }
    }

    #[pyo3(signature = (config=None))]
    fn moments(&self, py: Python<'_>, config: Option<PyConfig>) -> PyResult<PyMomentCurves> {
        let cfg = config_or_default(config).moments;
        let id = self.inner.contour_id().to_string();
        let inner = py
            .detach(|| moments::angular_moments(&self.inner, &id, &cfg))
            .map_err(err)?;
        Ok(PyMomentCurves { inner })
    }
}

#[pyclass(name = "MomentCurves", frozen, from_py_object)]
#[derive(Clone)]
struct PyMomentCurves {
    inner: moments::MomentCurves,
}

#[pymethods]
impl PyMomentCurves {
    #[getter]
    fn shape_id(&self) -> String {
        self.inner.shape_id.clone()
    }

    #[getter]
    fn r_grid(&self) -> Vec<f64> {
        self.inner.r_grid.clone()
    }

    /// `values[k - 1]` is the k-th moment curve.
    #[getter]
    fn values(&self) -> Vec<Vec<f64>> {
        self.inner.values.clone()
    }

    fn to_csv(&self) -> String {
        pfsdm_core::io::moments_to_csv(&self.inner)
    }

    #[staticmethod]
    fn from_csv(text: &str, shape_id: &str) -> PyResult<Self> {
        Ok(Self {
            inner: pfsdm_core::io::moments_from_csv(text, shape_id).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "MomentCurves(shape_id={:?}, K={}, R={})",
            self.inner.shape_id,
            self.inner.k_order(),
            self.inner.r_grid.len()
        )
    }
}

/// Samples a canonical shape, normalized into the unit disk.
#[pyfunction]
#[pyo3(signature = (kind_name, points=256, seed=0))]
fn generate_shape(kind_name: &str, points: usize, seed: u64) -> PyResult<Vec<(f64, f64)>> {
    let c = shapes::generate_shape(kind(kind_name)?, points, seed).map_err(err)?;
    Ok(from_contour(&c))
}

#[pyfunction]
fn shape_kinds() -> Vec<&'static str> {
    ShapeKind::ALL.iter().map(|k| k.name()).collect()
}

#[pyfunction]
fn normalize_contour(points: Vec<(f64, f64)>) -> PyResult<Vec<(f64, f64)>> {
    Ok(from_contour(&shapes::normalize_contour(&to_contour(points)?).map_err(err)?))
}

#[pyfunction]
fn resample_contour(points: Vec<(f64, f64)>, m: usize) -> PyResult<Vec<(f64, f64)>> {
    Ok(from_contour(&shapes::resample_contour(&to_contour(points)?, m).map_err(err)?))
}

#[pyfunction]
fn signed_distance(points: Vec<(f64, f64)>, x: f64, y: f64) -> PyResult<f64> {
    Ok(shapes::signed_distance_oracle(Point::new(x, y), &to_contour(points)?))
}

/// Solves the viscous Eikonal equation on a contour as given.
#[pyfunction]
#[pyo3(signature = (points, config=None, contour_id="shape"))]
fn solve_eikonal(
    py: Python<'_>,
    points: Vec<(f64, f64)>,
    config: Option<PyConfig>,
    contour_id: &str,
) -> PyResult<PySdfModel> {
    let c = to_contour(points)?;
    let cfg = config_or_default(config).solver;
    let (inner, _) = py
        .detach(|| eikonal::solve_eikonal_traced(&c, &cfg, contour_id))
        .map_err(err)?;
    Ok(PySdfModel { inner })
}

/// Resamples, normalizes, solves and fits the push-forward map.
#[pyfunction]
#[pyo3(signature = (points, config=None, contour_id="shape"))]
fn build_field(
    py: Python<'_>,
    points: Vec<(f64, f64)>,
    config: Option<PyConfig>,
    contour_id: &str,
) -> PyResult<PyPfSdfField> {
    let c = to_contour(points)?;
    let cfg = config_or_default(config);
    let inner = py
        .detach(|| analysis::build_field(&c, contour_id, &cfg))
        .map_err(err)?;
    Ok(PyPfSdfField { inner })
}

#[pyfunction]
#[pyo3(signature = (points, config=None, contour_id="shape"))]
fn shape_moments(
    py: Python<'_>,
    points: Vec<(f64, f64)>,
    config: Option<PyConfig>,
    contour_id: &str,
) -> PyResult<PyMomentCurves> {
    let c = to_contour(points)?;
    let cfg = config_or_default(config);
    let inner = py
        .detach(|| analysis::shape_moments(&c, contour_id, &cfg))
        .map_err(err)?;
    Ok(PyMomentCurves { inner })
}

/// Cohort-normalized distance matrix; returns `(shape_ids, rows)`.
#[pyfunction]
#[pyo3(signature = (curves, k_order=3))]
fn distance_matrix(curves: Vec<PyMomentCurves>, k_order: usize) -> PyResult<(Vec<String>, Vec<Vec<f64>>)> {
    let curves: Vec<moments::MomentCurves> = curves.into_iter().map(|c| c.inner).collect();
    let m = moments::normalizing_constants(&curves).map_err(err)?;
    let d = moments::distance_matrix(&curves, &m, k_order).map_err(err)?;
    Ok((d.shape_ids, d.values))
}

/// Principal-component coordinates and explained-variance fractions.
#[pyfunction]
#[pyo3(signature = (rows, components=2))]
fn pca(rows: Vec<Vec<f64>>, components: usize) -> PyResult<(Vec<Vec<f64>>, Vec<f64>)> {
    let e = analysis::pca(&rows, components).map_err(err)?;
    Ok((e.coords, e.explained))
}

/// Leave-one-out nearest-medoid accuracy and mean silhouette.
#[pyfunction]
fn clustering_score(rows: Vec<Vec<f64>>, labels: Vec<String>) -> PyResult<(f64, f64)> {
    let s = analysis::clustering_score(&rows, &labels).map_err(err)?;
    Ok((s.accuracy, s.silhouette))
}

/// Runs experiment 1 into `out_dir`; returns the list of written files.
#[pyfunction]
#[pyo3(signature = (out_dir, config=None))]
fn run_experiment1(py: Python<'_>, out_dir: PathBuf, config: Option<PyConfig>) -> PyResult<Vec<PathBuf>> {
    let cfg = config_or_default(config);
    let r = py.detach(|| analysis::run_experiment1(&out_dir, &cfg)).map_err(err)?;
    Ok(r.files)
}

/// Runs experiment 2 into `out_dir`; returns `(accuracy, silhouette)`.
#[pyfunction]
#[pyo3(signature = (seed, out_dir, config=None))]
fn run_experiment2(py: Python<'_>, seed: u64, out_dir: PathBuf, config: Option<PyConfig>) -> PyResult<(f64, f64)> {
    let cfg = config_or_default(config);
    let r = py
        .detach(|| analysis::run_experiment2(seed, &out_dir, &cfg))
        .map_err(err)?;
    Ok((r.scores.accuracy, r.scores.silhouette))
}

#[pymodule]
fn pfsdm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("PfsdmError", m.py().get_type::<PfsdmError>())?;
    m.add_class::<PyConfig>()?;
    m.add_class::<PySdfModel>()?;
    m.add_class::<PyPfSdfField>()?;
    m.add_class::<PyMomentCurves>()?;
    m.add_function(wrap_pyfunction!(generate_shape, m)?)?;
    m.add_function(wrap_pyfunction!(shape_kinds, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_contour, m)?)?;
    m.add_function(wrap_pyfunction!(resample_contour, m)?)?;
    m.add_function(wrap_pyfunction!(signed_distance, m)?)?;
    m.add_function(wrap_pyfunction!(solve_eikonal, m)?)?;
    m.add_function(wrap_pyfunction!(build_field, m)?)?;
    m.add_function(wrap_pyfunction!(shape_moments, m)?)?;
    m.add_function(wrap_pyfunction!(distance_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(pca, m)?)?;
    m.add_function(wrap_pyfunction!(clustering_score, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment1, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment2, m)?)?;
    Ok(())
}
