//! Python bindings for `reactive_squeeze`.
//!
//! ```python
//! import reactive_squeeze_py as rs
//! p = rs.PhysicalParams.reference()
//! p.pump_power = 12e-6
//! print(rs.momentum_variance(p)["total"])
//! ```

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use reactive_squeeze as core;
use reactive_squeeze::sweep::{Axis, Quantity, SweepRow, SweepSpec};

fn value_error<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Experimental parameters in SI units (angular frequencies in rad/s,
/// wavelength in nm, reactive slope in rad/s per nm).
#[pyclass(name = "PhysicalParams", from_py_object)]
#[derive(Clone)]
struct PyPhysicalParams {
    inner: core::PhysicalParams,
}

macro_rules! field_accessors {
    ($($get:ident / $set:ident => $field:ident),* ; $($rest:tt)*) => {
        #[pymethods]
        impl PyPhysicalParams {
            $($rest)*
            $(
                #[getter]
                fn $get(&self) -> f64 {
                    self.inner.$field
                }
                #[setter]
                fn $set(&mut self, value: f64) {
                    self.inner.$field = value;
                }
            )*
        }
    };
}

field_accessors! {
    wavelength_laser / set_wavelength_laser => wavelength_laser,
    pump_power / set_pump_power => pump_power,
    mass / set_mass => mass,
    mech_freq / set_mech_freq => mech_freq,
    quality_factor / set_quality_factor => quality_factor,
    kappa_e_ratio / set_kappa_e_ratio => kappa_e_ratio,
    kappa_om_slope / set_kappa_om_slope => kappa_om_slope,
    detuning / set_detuning => detuning,
    squeeze_r / set_squeeze_r => squeeze_r,
    squeeze_phi / set_squeeze_phi => squeeze_phi,
    bandwidth_ratio / set_bandwidth_ratio => bandwidth_ratio,
    temperature / set_temperature => temperature,
    dispersive_g / set_dispersive_g => dispersive_g;

    /// Reference device; keyword arguments override individual fields.
    #[new]
    #[pyo3(signature = (**kwargs))]
    fn new(kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut p = Self {
            inner: core::PhysicalParams::reference(),
        };
        if let Some(kw) = kwargs {
            let me = Bound::new(kw.py(), p.clone())?;
            for (k, v) in kw.iter() {
                me.setattr(k.extract::<String>()?.as_str(), v)?;
            }
            p = me.borrow().clone();
        }
        Ok(p)
    }

    #[staticmethod]
    fn reference() -> Self {
        Self {
            inner: core::PhysicalParams::reference(),
        }
    }

    fn validate(&self) -> PyResult<()> {
        self.inner.validate().map_err(value_error)
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

fn quadrature(cutoff: f64, rel_tol: f64) -> PyResult<core::QuadratureConfig> {
    let cfg = core::QuadratureConfig {
        cutoff_factor: cutoff,
        rel_tol,
        ..core::QuadratureConfig::default()
    };
    cfg.validate().map_err(value_error)?;
    Ok(cfg)
}

fn prepare(p: &PyPhysicalParams) -> PyResult<(core::DerivedParams, core::SteadyState)> {
    let d = core::derive_params(&p.inner).map_err(value_error)?;
    let ss = core::solve_steady_state(&d, p.inner.detuning).map_err(value_error)?;
    Ok((d, ss))
}

/// Internal rad/s quantities as a dict.
#[pyfunction]
fn derive_params<'py>(py: Python<'py>, params: &PyPhysicalParams) -> PyResult<Bound<'py, PyDict>> {
    let d = core::derive_params(&params.inner).map_err(value_error)?;
    let out = PyDict::new(py);
    out.set_item("omega_l", d.omega_l)?;
    out.set_item("omega_m", d.omega_m)?;
    out.set_item("gamma_m", d.gamma_m)?;
    out.set_item("kappa_e", d.kappa_e)?;
    out.set_item("kappa_om", d.kappa_om)?;
    out.set_item("eta", d.eta)?;
    out.set_item("eps_l", d.eps_l)?;
    out.set_item("eps_tilde", d.eps_tilde)?;
    out.set_item("big_gamma", d.big_gamma)?;
    out.set_item("n_sq", d.n_sq)?;
    out.set_item("m_sq", (d.m_sq.re, d.m_sq.im))?;
    Ok(out)
}

#[pyfunction]
fn steady_state<'py>(py: Python<'py>, params: &PyPhysicalParams) -> PyResult<Bound<'py, PyDict>> {
    let (d, ss) = prepare(params)?;
    let out = PyDict::new(py);
    out.set_item("q_s", ss.q_s)?;
    out.set_item("p_s", ss.p_s)?;
    out.set_item("c_s", (ss.c_s.re, ss.c_s.im))?;
    out.set_item("all_real_roots", ss.all_real_roots.clone())?;
    out.set_item("multistable", ss.multistable)?;
    out.set_item("linearization_valid", ss.linearization_valid)?;
    out.set_item(
        "stable",
        core::is_stable(&core::build_drift_matrix(&d, &ss, params.inner.detuning)),
    )?;
    Ok(out)
}

fn breakdown_dict<'py>(py: Python<'py>, v: &core::VarianceBreakdown) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    out.set_item("total", v.total)?;
    out.set_item("thermal_term", v.thermal_term)?;
    out.set_item("m_term", v.m_term)?;
    out.set_item("n_term", v.n_term)?;
    out.set_item("vacuum_term", v.vacuum_term)?;
    out.set_item("squeezing_percent", v.squeezing_percent)?;
    out.set_item("estimated_quadrature_error", v.estimated_quadrature_error)?;
    out.set_item("tolerance_met", v.tolerance_met)?;
    Ok(out)
}

fn variance<'py>(
    py: Python<'py>,
    params: &PyPhysicalParams,
    cutoff: f64,
    rel_tol: f64,
    position: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = quadrature(cutoff, rel_tol)?;
    let (d, ss) = prepare(params)?;
    let baths = (core::ThermalBath::from_params(&d), core::SqueezedBath::from_params(&d));
    let delta = params.inner.detuning;
    let v = py
        .detach(|| {
            if position {
                core::position_variance(&d, &ss, delta, (&baths.0, &baths.1), &cfg)
            } else {
                core::momentum_variance(&d, &ss, delta, (&baths.0, &baths.1), &cfg)
            }
        })
        .map_err(value_error)?;
    breakdown_dict(py, &v)
}

#[pyfunction]
#[pyo3(signature = (params, cutoff = 20.0, rel_tol = 1e-6))]
fn momentum_variance<'py>(
    py: Python<'py>,
    params: &PyPhysicalParams,
    cutoff: f64,
    rel_tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    variance(py, params, cutoff, rel_tol, false)
}

#[pyfunction]
#[pyo3(signature = (params, cutoff = 20.0, rel_tol = 1e-6))]
fn position_variance<'py>(
    py: Python<'py>,
    params: &PyPhysicalParams,
    cutoff: f64,
    rel_tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    variance(py, params, cutoff, rel_tol, true)
}

fn parse_axis(name: &str) -> PyResult<Axis> {
    match name {
        "detuning" => Ok(Axis::Detuning),
        "power" => Ok(Axis::Power),
        "temperature" => Ok(Axis::Temperature),
        "squeeze_r" => Ok(Axis::SqueezeR),
        other => Err(PyValueError::new_err(format!(
            "unknown axis {other:?} (detuning, power, temperature, squeeze_r)"
        ))),
    }
}

fn parse_quantity(name: &str) -> PyResult<Quantity> {
    match name {
        "momentum_variance" => Ok(Quantity::MomentumVariance),
        "position_variance" => Ok(Quantity::PositionVariance),
        "steady_state" => Ok(Quantity::SteadyState),
        "output_check" => Ok(Quantity::OutputCheck),
        other => Err(PyValueError::new_err(format!("unknown quantity {other:?}"))),
    }
}

fn row_dict<'py>(py: Python<'py>, r: &SweepRow) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    out.set_item("axis_value", r.axis_value)?;
    out.set_item("total", r.total)?;
    out.set_item("thermal_term", r.thermal_term)?;
    out.set_item("m_term", r.m_term)?;
    out.set_item("n_term", r.n_term)?;
    out.set_item("vacuum_term", r.vacuum_term)?;
    out.set_item("squeezing_percent", r.squeezing_percent)?;
    out.set_item("q_s", r.q_s)?;
    out.set_item("abs_c_s", r.abs_c_s)?;
    out.set_item("multistable", r.multistable)?;
    out.set_item("stable", r.stable)?;
    out.set_item("linearization_valid", r.linearization_valid)?;
    out.set_item("quad_error", r.quad_error)?;
    out.set_item("tolerance_met", r.tolerance_met)?;
    out.set_item("check_residual", r.check_residual)?;
    Ok(out)
}

fn spec(
    params: &PyPhysicalParams,
    axis: &str,
    start: f64,
    stop: f64,
    points: usize,
    quantity: &str,
) -> PyResult<SweepSpec> {
    let s = SweepSpec {
        axis: parse_axis(axis)?,
        start,
        stop,
        points,
        fixed: params.inner,
        quantity: parse_quantity(quantity)?,
    };
    s.validate().map_err(value_error)?;
    Ok(s)
}

/// Sweep one axis (figure units: 2π·MHz, μW, mK, bare r); returns a list of
/// row dicts. Unstable points carry `stable = False` and `total = None`.
#[pyfunction]
#[pyo3(signature = (params, axis, start, stop, points, quantity = "momentum_variance", cutoff = 20.0, rel_tol = 1e-6))]
#[allow(clippy::too_many_arguments)]
fn run_sweep<'py>(
    py: Python<'py>,
    params: &PyPhysicalParams,
    axis: &str,
    start: f64,
    stop: f64,
    points: usize,
    quantity: &str,
    cutoff: f64,
    rel_tol: f64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let s = spec(params, axis, start, stop, points, quantity)?;
    let cfg = quadrature(cutoff, rel_tol)?;
    let rows = py.detach(|| core::sweep::run_sweep(&s, &cfg)).map_err(value_error)?;
    rows.iter().map(|r| row_dict(py, r)).collect()
}

/// Refined minimum of the momentum variance along one axis:
/// `(axis_value, breakdown)`.
#[pyfunction]
#[pyo3(signature = (params, axis, start, stop, points, cutoff = 20.0, rel_tol = 1e-6))]
#[allow(clippy::too_many_arguments)]
fn find_minimum<'py>(
    py: Python<'py>,
    params: &PyPhysicalParams,
    axis: &str,
    start: f64,
    stop: f64,
    points: usize,
    cutoff: f64,
    rel_tol: f64,
) -> PyResult<(f64, Bound<'py, PyDict>)> {
    let s = spec(params, axis, start, stop, points, "momentum_variance")?;
    let cfg = quadrature(cutoff, rel_tol)?;
    let m = py.detach(|| core::sweep::find_minimum(&s, &cfg)).map_err(value_error)?;
    Ok((m.axis_value, breakdown_dict(py, &m.breakdown)?))
}

#[pymodule]
fn reactive_squeeze_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPhysicalParams>()?;
    m.add_function(wrap_pyfunction!(derive_params, m)?)?;
    m.add_function(wrap_pyfunction!(steady_state, m)?)?;
    m.add_function(wrap_pyfunction!(momentum_variance, m)?)?;
    m.add_function(wrap_pyfunction!(position_variance, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(find_minimum, m)?)?;
    Ok(())
}
