//! Python bindings. States, directions and inputs cross the boundary as lists
//! of floats; reports arrive as plain dicts.

use reach::boundary::{boundary_point, BoundaryParams, Sheet};
use reach::harness::{mc_volume, random_cloud, simulate_endpoint, InputSchedule};
use reach::implicit::{
    hankel_residual, implicit_poly, line_intersections, membership, MembershipOptions,
};
use reach::support::{support, supporting_point};
use reach::{BlockSpec, ReachError, SystemSpec};
use pyo3::exceptions::{PyIndexError, PyValueError};
use pyo3::prelude::*;
use pythonize::pythonize;

fn err(e: ReachError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<T: serde::Serialize>(py: Python<'_>, v: &T) -> PyResult<PyObject> {
    Ok(pythonize(py, v)?.unbind())
}

/// A system of parallel integrator chains with its horizon.
#[pyclass(name = "System", frozen)]
struct PySystem {
    inner: SystemSpec,
}

impl PySystem {
    fn block(&self, j: usize) -> PyResult<&BlockSpec> {
        self.inner
            .blocks
            .get(j)
            .ok_or_else(|| PyIndexError::new_err(format!("no block {j}")))
    }
}

#[pymethods]
impl PySystem {
    /// Parses the JSON spec format accepted by the command-line tool.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        SystemSpec::from_json(text).map(|inner| PySystem { inner }).map_err(err)
    }

    /// Blocks as `(r, x0, alpha, beta)` with a common horizon `t`.
    #[staticmethod]
    fn from_blocks(blocks: Vec<(usize, Vec<f64>, f64, f64)>, t: f64) -> PyResult<Self> {
        let blocks = blocks
            .into_iter()
            .map(|(r, x0, a, b)| BlockSpec::new(r, x0, a, b))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        SystemSpec::from_blocks(blocks, t).map(|inner| PySystem { inner }).map_err(err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn t(&self) -> f64 {
        self.inner.t
    }

    /// State dimension.
    #[getter]
    fn d(&self) -> usize {
        self.inner.d()
    }

    #[getter]
    fn orders(&self) -> Vec<usize> {
        self.inner.blocks.iter().map(|b| b.r).collect()
    }

    fn at_time(&self, t: f64) -> PyResult<Self> {
        self.inner.at_time(t).map(|inner| PySystem { inner }).map_err(err)
    }

    fn support(&self, y: Vec<f64>) -> PyResult<f64> {
        support(&self.inner, &y).map_err(err)
    }

    fn supporting_point(&self, y: Vec<f64>) -> PyResult<Vec<f64>> {
        supporting_point(&self.inner, &y).map_err(err)
    }

    /// Point of block `block` on sheet `sheet` (+1 or -1) with switching
    /// times `s` in `[0, t]`.
    fn boundary_point(&self, block: usize, sheet: i64, s: Vec<f64>) -> PyResult<Vec<f64>> {
        let b = self.block(block)?;
        let params = BoundaryParams::new(Sheet::from_int(sheet).map_err(err)?, s);
        boundary_point(b, &params, self.inner.t)
            .map(|p| p.x)
            .map_err(err)
    }

    #[pyo3(signature = (x, tol = None))]
    fn membership(&self, py: Python<'_>, x: Vec<f64>, tol: Option<f64>) -> PyResult<PyObject> {
        let opts = MembershipOptions {
            tol,
            ..MembershipOptions::default()
        };
        let rep = membership(&self.inner, &x, &opts).map_err(err)?;
        to_py(py, &rep)
    }

    fn hankel_residual(&self, block: usize, x: Vec<f64>, sheet: i64) -> PyResult<f64> {
        let b = self.block(block)?;
        hankel_residual(b, &x, Sheet::from_int(sheet).map_err(err)?, self.inner.t).map_err(err)
    }

    /// Intersection counts of the line `p0 + tau v` with both sheets of a
    /// block's bounding hypersurface.
    fn line_intersections(
        &self,
        py: Python<'_>,
        block: usize,
        p0: Vec<f64>,
        v: Vec<f64>,
    ) -> PyResult<PyObject> {
        let b = self.block(block)?;
        if p0.len() != b.r || v.len() != b.r {
            return Err(PyValueError::new_err(format!("block {block} has order {}", b.r)));
        }
        let li = line_intersections(b, &p0, &v, self.inner.t).map_err(err)?;
        to_py(py, &li)
    }

    /// Endpoint under a piecewise-constant input: `values[i]` holds on
    /// `[breakpoints[i], breakpoints[i + 1])`.
    fn simulate(&self, breakpoints: Vec<f64>, values: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
        simulate_endpoint(&self.inner, &InputSchedule { breakpoints, values }).map_err(err)
    }

    /// Endpoints of random inputs drawn from the spec's input set.
    #[pyo3(signature = (samples, segments = 4, seed = 0))]
    fn cloud(&self, py: Python<'_>, samples: usize, segments: usize, seed: u64) -> PyResult<Vec<Vec<f64>>> {
        let u = self
            .inner
            .input_set
            .clone()
            .ok_or_else(|| PyValueError::new_err("spec has no input set"))?;
        py.allow_threads(|| random_cloud(&self.inner, &u, segments, samples, seed))
            .map_err(err)
    }

    #[pyo3(signature = (samples, seed = 0))]
    fn volume(&self, py: Python<'_>, samples: usize, seed: u64) -> PyResult<PyObject> {
        let rep = py.allow_threads(|| mc_volume(&self.inner, samples, seed));
        to_py(py, &rep)
    }

    fn __repr__(&self) -> String {
        format!("System({})", self.inner.to_json())
    }
}

/// Normalized bounding polynomial of an order-`r` block in rho coordinates.
#[pyfunction]
fn implicit_polynomial(r: usize) -> PyResult<String> {
    implicit_poly(r).map(|s| s.poly.to_string()).map_err(err)
}

#[pymodule]
#[pyo3(name = "integrator_reach")]
fn integrator_reach_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystem>()?;
    m.add_function(wrap_pyfunction!(implicit_polynomial, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
