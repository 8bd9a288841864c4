//! Python bindings: thin wrappers over the grid, growth, Luxembourg,
//! kernel, seminorm, level-set and Carleson machinery. Norm caches are
//! created per call; one call covers a whole menu, which is where the
//! caching matters.

use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use bmolab::bmo;
use bmolab::carleson;
use bmolab::corpus;
use bmolab::grid::{ball_measure, mean_on_ball, standard_radii};
use bmolab::jn;
use bmolab::luxembourg;
use bmolab::semigroup;
use bmolab::{Ball, BallMenu, Error, Grid, GridFunction, GrowthFunction, KernelOp, NormCache};

fn err(e: Error) -> PyErr {
    match &e {
        Error::Numerical { .. } | Error::BracketFailure { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

#[pyclass(name = "Grid", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGrid {
    inner: Arc<Grid>,
}

#[pymethods]
impl PyGrid {
    #[new]
    fn new(dim: usize, side_length: f64, points_per_side: usize) -> PyResult<Self> {
        Ok(PyGrid {
            inner: Grid::new(dim, side_length, points_per_side).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn side_length(&self) -> f64 {
        self.inner.side_length()
    }

    #[getter]
    fn points_per_side(&self) -> usize {
        self.inner.points_per_side()
    }

    #[getter]
    fn spacing(&self) -> f64 {
        self.inner.spacing()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn coords(&self, idx: usize) -> (f64, f64) {
        let c = self.inner.coords(idx);
        (c[0], c[1])
    }

    fn nearest_index(&self, x: f64, y: f64) -> usize {
        self.inner.nearest_index([x, y])
    }

    fn standard_radii(&self) -> Vec<f64> {
        standard_radii(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "Grid(dim={}, side_length={}, points_per_side={})",
            self.inner.dim(),
            self.inner.side_length(),
            self.inner.points_per_side()
        )
    }
}

#[pyclass(name = "GridFunction", skip_from_py_object)]
#[derive(Clone)]
struct PyGridFunction {
    inner: GridFunction,
}

#[pymethods]
impl PyGridFunction {
    #[new]
    fn new(grid: &PyGrid, values: Vec<f64>) -> PyResult<Self> {
        Ok(PyGridFunction {
            inner: GridFunction::new(grid.inner.clone(), values).map_err(err)?,
        })
    }

    /// Deterministic corpus member by name (constant, sawtooth,
    /// log_profile, mollified_indicator, random_fourier, single_mode).
    #[staticmethod]
    #[pyo3(signature = (grid, name, seed = 7))]
    fn corpus_member(grid: &PyGrid, name: &str, seed: u64) -> PyResult<Self> {
        Ok(PyGridFunction {
            inner: corpus::member(&grid.inner, name, seed).map_err(err)?,
        })
    }

    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    fn integral(&self) -> f64 {
        self.inner.integral()
    }

    fn sup_abs(&self) -> f64 {
        self.inner.sup_abs()
    }

    fn l2_norm(&self) -> f64 {
        self.inner.l2_norm()
    }

    fn scaled(&self, c: f64) -> Self {
        PyGridFunction {
            inner: self.inner.map(|v| c * v),
        }
    }

    fn __len__(&self) -> usize {
        self.inner.values().len()
    }
}

#[pyclass(name = "Ball", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyBall {
    inner: Ball,
}

#[pymethods]
impl PyBall {
    #[new]
    fn new(grid: &PyGrid, center_index: usize, radius: f64) -> PyResult<Self> {
        Ok(PyBall {
            inner: Ball::new(&grid.inner, center_index, radius).map_err(err)?,
        })
    }

    #[getter]
    fn center_index(&self) -> usize {
        self.inner.center_index
    }

    #[getter]
    fn radius(&self) -> f64 {
        self.inner.radius
    }

    fn measure(&self, grid: &PyGrid) -> PyResult<f64> {
        ball_measure(&grid.inner, &self.inner).map_err(err)
    }
}

#[pyclass(name = "BallMenu", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyBallMenu {
    inner: BallMenu,
}

#[pymethods]
impl PyBallMenu {
    #[new]
    fn new(grid: &PyGrid, center_stride: usize, radii: Vec<f64>) -> PyResult<Self> {
        Ok(PyBallMenu {
            inner: BallMenu::new(&grid.inner, center_stride, &radii).map_err(err)?,
        })
    }

    #[staticmethod]
    fn standard(grid: &PyGrid, max_centers: usize) -> PyResult<Self> {
        Ok(PyBallMenu {
            inner: BallMenu::standard(&grid.inner, max_centers).map_err(err)?,
        })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn radii(&self) -> Vec<f64> {
        self.inner.radii().to_vec()
    }

    fn ball(&self, idx: usize) -> PyResult<PyBall> {
        self.inner
            .balls()
            .get(idx)
            .map(|b| PyBall { inner: b.clone() })
            .ok_or_else(|| PyValueError::new_err(format!("ball index {idx} out of range")))
    }
}

#[pyclass(name = "GrowthFunction", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGrowthFunction {
    inner: GrowthFunction,
}

#[pymethods]
impl PyGrowthFunction {
    /// `phi(x, t) = t^p`, `p` in (0, 1].
    #[staticmethod]
    fn power(p: f64) -> PyResult<Self> {
        Ok(PyGrowthFunction {
            inner: GrowthFunction::power(p).map_err(err)?,
        })
    }

    /// `phi(x, t) = |x|^a t^p` with the half-cell clamp on the weight.
    #[staticmethod]
    #[pyo3(signature = (grid, weight_exponent, p, ap_exponent = 2.0))]
    fn weighted_power(grid: &PyGrid, weight_exponent: f64, p: f64, ap_exponent: f64) -> PyResult<Self> {
        let w = corpus::abs_power_weight(&grid.inner, weight_exponent).map_err(err)?;
        Ok(PyGrowthFunction {
            inner: GrowthFunction::weighted_power(w, p, ap_exponent).map_err(err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (s, beta, gamma))]
    fn log_type(s: f64, beta: f64, gamma: f64) -> PyResult<Self> {
        Ok(PyGrowthFunction {
            inner: GrowthFunction::log_type(s, beta, gamma, [0.0, 0.0]).map_err(err)?,
        })
    }

    #[staticmethod]
    fn ky_log() -> PyResult<Self> {
        Ok(PyGrowthFunction {
            inner: GrowthFunction::ky_log([0.0, 0.0]).map_err(err)?,
        })
    }

    fn eval(&self, grid: &PyGrid, idx: usize, t: f64) -> PyResult<f64> {
        if t < 0.0 {
            return Err(PyValueError::new_err("t must be >= 0"));
        }
        Ok(self.inner.eval(&grid.inner, idx, t))
    }

    #[getter]
    fn family(&self) -> &'static str {
        self.inner.family_name()
    }
}

#[pyclass(name = "KernelOp", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyKernelOp {
    inner: KernelOp,
}

#[pymethods]
impl PyKernelOp {
    #[staticmethod]
    fn poisson() -> Self {
        PyKernelOp { inner: KernelOp::poisson() }
    }

    #[staticmethod]
    fn heat() -> Self {
        PyKernelOp { inner: KernelOp::heat() }
    }

    #[staticmethod]
    #[pyo3(signature = (m = 1.0))]
    fn box_kernel(m: f64) -> PyResult<Self> {
        Ok(PyKernelOp {
            inner: KernelOp::box_kernel(m).map_err(err)?,
        })
    }

    fn apply(&self, f: &PyGridFunction, t: f64) -> PyResult<PyGridFunction> {
        Ok(PyGridFunction {
            inner: self.inner.apply(&f.inner, t).map_err(err)?,
        })
    }

    fn time_for_radius(&self, r: f64) -> f64 {
        self.inner.time_for_radius(r)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind_name()
    }
}

#[pyfunction]
fn modular(phi: &PyGrowthFunction, f: &PyGridFunction, lam: f64) -> PyResult<f64> {
    luxembourg::modular(&phi.inner, &f.inner, lam).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (phi, f, tol = 1e-4))]
fn luxembourg_norm(phi: &PyGrowthFunction, f: &PyGridFunction, tol: f64) -> PyResult<f64> {
    Ok(luxembourg::luxembourg_norm(&phi.inner, &f.inner, tol)
        .map_err(err)?
        .value)
}

#[pyfunction]
fn indicator_norm(phi: &PyGrowthFunction, grid: &PyGrid, ball: &PyBall) -> PyResult<f64> {
    let cache = NormCache::new();
    luxembourg::indicator_norm(&phi.inner, &grid.inner, &ball.inner, &cache).map_err(err)
}

#[pyfunction]
fn ball_mean(f: &PyGridFunction, ball: &PyBall) -> PyResult<f64> {
    mean_on_ball(&f.inner, &ball.inner).map_err(err)
}

#[pyfunction]
fn bmo_phi(f: &PyGridFunction, phi: &PyGrowthFunction, menu: &PyBallMenu) -> PyResult<f64> {
    let cache = NormCache::new();
    Ok(bmo::bmo_phi(&f.inner, &phi.inner, &menu.inner, &cache)
        .map_err(err)?
        .value)
}

#[pyfunction]
fn bmo_phi_a(
    f: &PyGridFunction,
    phi: &PyGrowthFunction,
    op: &PyKernelOp,
    menu: &PyBallMenu,
) -> PyResult<f64> {
    let cache = NormCache::new();
    Ok(
        bmo::bmo_phi_a(&f.inner, &phi.inner, &op.inner, &menu.inner, &cache)
            .map_err(err)?
            .value,
    )
}

#[pyfunction]
fn bmo_phi_a_p(
    f: &PyGridFunction,
    phi: &PyGrowthFunction,
    op: &PyKernelOp,
    menu: &PyBallMenu,
    p_tilde: f64,
) -> PyResult<f64> {
    let cache = NormCache::new();
    Ok(
        bmo::bmo_phi_a_p(&f.inner, &phi.inner, &op.inner, &menu.inner, p_tilde, &cache)
            .map_err(err)?
            .value,
    )
}

#[pyfunction]
fn bmo_tilde_p(
    f: &PyGridFunction,
    phi: &PyGrowthFunction,
    op: &PyKernelOp,
    menu: &PyBallMenu,
    p_tilde: f64,
) -> PyResult<f64> {
    let cache = NormCache::new();
    Ok(
        bmo::bmo_tilde_p(&f.inner, &phi.inner, &op.inner, &menu.inner, p_tilde, &cache)
            .map_err(err)?
            .value,
    )
}

#[pyfunction]
#[pyo3(signature = (f, phi, op, t_samples, x_stride = 32))]
fn bmo_phi_a_max(
    f: &PyGridFunction,
    phi: &PyGrowthFunction,
    op: &PyKernelOp,
    t_samples: Vec<f64>,
    x_stride: usize,
) -> PyResult<f64> {
    let cache = NormCache::new();
    Ok(
        bmo::bmo_phi_a_max(&f.inner, &phi.inner, &op.inner, &t_samples, x_stride, &cache)
            .map_err(err)?
            .value,
    )
}

#[pyfunction]
fn semigroup_check(
    op: &PyKernelOp,
    f: &PyGridFunction,
    t: f64,
    s: f64,
) -> PyResult<(f64, f64)> {
    let c = semigroup::semigroup_check(&op.inner, &f.inner, t, s).map_err(err)?;
    Ok((c.composition_error, c.mass_error))
}

#[pyfunction]
fn jn_distribution(
    f: &PyGridFunction,
    phi: &PyGrowthFunction,
    op: &PyKernelOp,
    ball: &PyBall,
    lambdas: Vec<f64>,
    kernel_seminorm: f64,
) -> PyResult<Vec<f64>> {
    let cache = NormCache::new();
    Ok(jn::jn_distribution(
        &f.inner,
        &phi.inner,
        &op.inner,
        &ball.inner,
        &lambdas,
        kernel_seminorm,
        &cache,
    )
    .map_err(err)?
    .measures)
}

#[pyfunction]
fn phi_carleson_norm(
    f: &PyGridFunction,
    phi: &PyGrowthFunction,
    op: &PyKernelOp,
    menu: &PyBallMenu,
    t_grid: Vec<f64>,
) -> PyResult<f64> {
    let cache = NormCache::new();
    Ok(carleson::phi_carleson_norm(
        &f.inner,
        &phi.inner,
        &op.inner,
        &menu.inner,
        &t_grid,
        &cache,
    )
    .map_err(err)?
    .value)
}

#[pyfunction]
fn default_t_grid(grid: &PyGrid) -> Vec<f64> {
    carleson::default_t_grid(&grid.inner)
}

#[pymodule]
fn bmolab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyGridFunction>()?;
    m.add_class::<PyBall>()?;
    m.add_class::<PyBallMenu>()?;
    m.add_class::<PyGrowthFunction>()?;
    m.add_class::<PyKernelOp>()?;
    m.add_function(wrap_pyfunction!(modular, m)?)?;
    m.add_function(wrap_pyfunction!(luxembourg_norm, m)?)?;
    m.add_function(wrap_pyfunction!(indicator_norm, m)?)?;
    m.add_function(wrap_pyfunction!(ball_mean, m)?)?;
    m.add_function(wrap_pyfunction!(bmo_phi, m)?)?;
    m.add_function(wrap_pyfunction!(bmo_phi_a, m)?)?;
    m.add_function(wrap_pyfunction!(bmo_phi_a_p, m)?)?;
    m.add_function(wrap_pyfunction!(bmo_tilde_p, m)?)?;
    m.add_function(wrap_pyfunction!(bmo_phi_a_max, m)?)?;
    m.add_function(wrap_pyfunction!(semigroup_check, m)?)?;
    m.add_function(wrap_pyfunction!(jn_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(phi_carleson_norm, m)?)?;
    m.add_function(wrap_pyfunction!(default_t_grid, m)?)?;
    Ok(())
}
