//! Parameter sweeps (one axis, or one axis nested in a second) and minimum
//! search.
//!
//! Axis values at this boundary use the figure units: detuning in
//! 2π × MHz, pump power in μW, temperature in mK, squeezing r bare.

pub mod config;
pub mod output;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::RAD_PER_S_PER_MHZ;
use crate::linear_response::{build_drift_matrix, is_stable, response_at};
use crate::noise_spectra::{SqueezedBath, ThermalBath};
use crate::output_field::{output_transfer_at, reconstruct_momentum};
use crate::params::{derive_params, ParamError, PhysicalParams};
use crate::steady_state::{solve_steady_state, SteadyStateError};
use crate::variance::{momentum_variance, position_variance, QuadratureConfig, VarianceBreakdown, VarianceError};

/// Golden-section stops once the bracket is this fraction of the sweep range.
pub const MINIMIZER_REL_TOL: f64 = 1.0e-3;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Quadrature(#[from] VarianceError),
    #[error("no interior minimum: the coarse scan is monotone (best at {at})")]
    NoInteriorMinimum { at: f64 },
    #[error("no evaluable point in the sweep")]
    NothingEvaluated,
    #[error("find_minimum needs quantity = momentum_variance")]
    WrongQuantity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Detuning,
    Power,
    Temperature,
    SqueezeR,
}

impl Axis {
    /// Writes an interface-unit axis value into the parameter set.
    pub fn apply(self, p: &mut PhysicalParams, value: f64) {
        match self {
            Axis::Detuning => p.detuning = value * RAD_PER_S_PER_MHZ,
            Axis::Power => p.pump_power = value * 1.0e-6,
            Axis::Temperature => p.temperature = value * 1.0e-3,
            Axis::SqueezeR => p.squeeze_r = value,
        }
    }

    pub fn read(self, p: &PhysicalParams) -> f64 {
        match self {
            Axis::Detuning => p.detuning / RAD_PER_S_PER_MHZ,
            Axis::Power => p.pump_power * 1.0e6,
            Axis::Temperature => p.temperature * 1.0e3,
            Axis::SqueezeR => p.squeeze_r,
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Axis::Detuning => "2pi_MHz",
            Axis::Power => "uW",
            Axis::Temperature => "mK",
            Axis::SqueezeR => "1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    MomentumVariance,
    PositionVariance,
    SteadyState,
    OutputCheck,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub fixed: PhysicalParams,
    pub quantity: Quantity,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SweepError> {
        if !(self.start.is_finite() && self.stop.is_finite()) || self.start >= self.stop {
            return Err(SweepError::InvalidSpec(format!(
                "need start < stop (got {} .. {})",
                self.start, self.stop
            )));
        }
        if self.points < 2 {
            return Err(SweepError::InvalidSpec(format!(
                "need points >= 2 (got {})",
                self.points
            )));
        }
        self.fixed.validate()?;
        // every grid point must also be a valid parameter set
        for v in [self.start, self.stop] {
            self.params_at(v).validate()?;
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let n = self.points;
        let step = (self.stop - self.start) / (n - 1) as f64;
        (0..n)
            .map(|k| {
                if k + 1 == n {
                    self.stop
                } else {
                    self.start + k as f64 * step
                }
            })
            .collect()
    }

    pub fn params_at(&self, value: f64) -> PhysicalParams {
        let mut p = self.fixed;
        self.axis.apply(&mut p, value);
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub total: Option<f64>,
    pub thermal_term: Option<f64>,
    pub m_term: Option<f64>,
    pub n_term: Option<f64>,
    pub vacuum_term: Option<f64>,
    pub squeezing_percent: Option<f64>,
    pub q_s: Option<f64>,
    pub abs_c_s: Option<f64>,
    pub multistable: bool,
    pub stable: bool,
    pub linearization_valid: bool,
    pub quad_error: Option<f64>,
    pub tolerance_met: bool,
    /// Largest relative output-reconstruction mismatch (output_check only).
    pub check_residual: Option<f64>,
}

impl SweepRow {
    fn empty(axis_value: f64) -> Self {
        Self {
            axis_value,
            total: None,
            thermal_term: None,
            m_term: None,
            n_term: None,
            vacuum_term: None,
            squeezing_percent: None,
            q_s: None,
            abs_c_s: None,
            multistable: false,
            stable: false,
            linearization_valid: false,
            quad_error: None,
            tolerance_met: true,
            check_residual: None,
        }
    }

    fn with_breakdown(mut self, v: &VarianceBreakdown) -> Self {
        self.total = Some(v.total);
        self.thermal_term = Some(v.thermal_term);
        self.m_term = Some(v.m_term);
        self.n_term = Some(v.n_term);
        self.vacuum_term = Some(v.vacuum_term);
        self.squeezing_percent = Some(v.squeezing_percent);
        self.quad_error = Some(v.estimated_quadrature_error);
        self.tolerance_met = v.tolerance_met;
        self
    }

    /// Row-level problems that make the exit status nonzero.
    pub fn failed(&self) -> bool {
        !self.stable || !self.tolerance_met
    }
}

/// Evaluates one parameter set. Never fails: problems become row flags.
pub fn evaluate_point(p: &PhysicalParams, axis_value: f64, quantity: Quantity, cfg: &QuadratureConfig) -> SweepRow {
    let mut row = SweepRow::empty(axis_value);
    let Ok(d) = derive_params(p) else {
        return row;
    };
    let delta = p.detuning;
    let ss = match solve_steady_state(&d, delta) {
        Ok(ss) => ss,
        Err(SteadyStateError::NoStableRoot { roots }) => {
            row.multistable = roots.len() > 1;
            row.q_s = roots.iter().copied().min_by(|a, b| a.abs().total_cmp(&b.abs()));
            return row;
        }
        Err(_) => return row,
    };
    row.q_s = Some(ss.q_s);
    row.abs_c_s = Some(ss.c_s.norm());
    row.multistable = ss.multistable;
    row.linearization_valid = ss.linearization_valid;
    row.stable = is_stable(&build_drift_matrix(&d, &ss, delta));
    if !row.stable {
        return row;
    }

    let baths = (ThermalBath::from_params(&d), SqueezedBath::from_params(&d));
    let result = match quantity {
        Quantity::SteadyState => return row,
        Quantity::OutputCheck => {
            row.check_residual = Some(output_round_trip_residual(&d, &ss, delta));
            return row;
        }
        Quantity::MomentumVariance => momentum_variance(&d, &ss, delta, (&baths.0, &baths.1), cfg),
        Quantity::PositionVariance => position_variance(&d, &ss, delta, (&baths.0, &baths.1), cfg),
    };
    match result {
        Ok(v) => row.with_breakdown(&v),
        Err(_) => {
            row.tolerance_met = false;
            row
        }
    }
}

/// Pushes a fixed set of (δP, c_in, c_in†) triples through the output map and
/// back; returns the largest relative mismatch. `NaN` when reconstruction is
/// undefined (no reactive coupling).
fn output_round_trip_residual(
    d: &crate::params::DerivedParams,
    ss: &crate::steady_state::SteadyState,
    delta: f64,
) -> f64 {
    let mut worst = 0.0f64;
    for k in 1..=16 {
        let omega = d.omega_m * (0.125 * k as f64);
        let Ok(t) = output_transfer_at(d, ss, delta, omega) else {
            return f64::NAN;
        };
        let Ok(tp) = response_at(d, ss, delta, omega) else {
            return f64::NAN;
        };
        let cin = Complex64::new(0.5, -0.25 * k as f64);
        let cin_dag = Complex64::new(-0.3, 0.1);
        let dp = tp.p_t + tp.p_s * cin;
        let y = t.y_out(dp, cin, cin_dag);
        match reconstruct_momentum(&t, y, cin, cin_dag) {
            Ok(back) => worst = worst.max((back - dp).norm() / dp.norm().max(f64::MIN_POSITIVE)),
            Err(_) => return f64::NAN,
        }
    }
    worst
}

pub fn run_sweep(spec: &SweepSpec, cfg: &QuadratureConfig) -> Result<Vec<SweepRow>, SweepError> {
    spec.validate()?;
    cfg.validate()?;
    Ok(spec
        .grid()
        .into_par_iter()
        .map(|v| evaluate_point(&spec.params_at(v), v, spec.quantity, cfg))
        .collect())
}

/// Outer axis of a two-dimensional sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuterAxis {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

/// One inner sweep per outer grid value, in outer-axis order.
pub fn run_sweep_2d(
    outer: &OuterAxis,
    inner: &SweepSpec,
    cfg: &QuadratureConfig,
) -> Result<Vec<(f64, Vec<SweepRow>)>, SweepError> {
    if outer.axis == inner.axis {
        return Err(SweepError::InvalidSpec("outer and inner axes must differ".into()));
    }
    let as_spec = SweepSpec {
        axis: outer.axis,
        start: outer.start,
        stop: outer.stop,
        points: outer.points,
        fixed: inner.fixed,
        quantity: inner.quantity,
    };
    as_spec.validate()?;
    cfg.validate()?;
    let specs: Vec<(f64, SweepSpec)> = as_spec
        .grid()
        .into_iter()
        .map(|v| {
            (
                v,
                SweepSpec {
                    fixed: as_spec.params_at(v),
                    ..inner.clone()
                },
            )
        })
        .collect();
    for (_, s) in &specs {
        s.validate()?;
    }
    specs.iter().map(|(v, s)| Ok((*v, run_sweep(s, cfg)?))).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub axis_value: f64,
    pub breakdown: VarianceBreakdown,
}

/// Coarse scan of `objective` on `points` equally spaced values in
/// `[start, stop]`, then golden-section search inside the bracket around the
/// best grid point. `None` marks points where the objective is undefined.
pub fn minimize_scan<F>(start: f64, stop: f64, points: usize, objective: F) -> Result<(f64, f64), SweepError>
where
    F: Fn(f64) -> Option<f64> + Sync,
{
    if points < 3 || !start.is_finite() || !stop.is_finite() || start >= stop {
        return Err(SweepError::InvalidSpec(
            "minimum search needs start < stop and >= 3 points".into(),
        ));
    }
    let step = (stop - start) / (points - 1) as f64;
    let grid: Vec<f64> = (0..points).map(|k| start + k as f64 * step).collect();
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&x| objective(x).filter(|v| v.is_finite()).unwrap_or(f64::INFINITY))
        .collect();

    let (best, &best_val) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is nonempty");
    if !best_val.is_finite() {
        return Err(SweepError::NothingEvaluated);
    }
    if best == 0 || best + 1 == points {
        return Err(SweepError::NoInteriorMinimum { at: grid[best] });
    }

    let f = |x: f64| objective(x).filter(|v| v.is_finite()).unwrap_or(f64::INFINITY);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (grid[best - 1], grid[best + 1]);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut best_x = grid[best];
    let mut best_f = best_val;
    let target = MINIMIZER_REL_TOL * (stop - start);
    while (b - a) > target {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        for (x, v) in [(c, fc), (d, fd)] {
            if v < best_f {
                best_f = v;
                best_x = x;
            }
        }
    }
    Ok((best_x, best_f))
}

pub fn find_minimum(spec: &SweepSpec, cfg: &QuadratureConfig) -> Result<Minimum, SweepError> {
    spec.validate()?;
    cfg.validate()?;
    if spec.quantity != Quantity::MomentumVariance {
        return Err(SweepError::WrongQuantity);
    }
    let objective = |v: f64| evaluate_point(&spec.params_at(v), v, spec.quantity, cfg).total;
    let (x, _) = minimize_scan(spec.start, spec.stop, spec.points, objective)?;

    let p = spec.params_at(x);
    let d = derive_params(&p)?;
    let ss = solve_steady_state(&d, p.detuning).map_err(|_| VarianceError::UnstableOperatingPoint)?;
    let breakdown = momentum_variance(
        &d,
        &ss,
        p.detuning,
        (&ThermalBath::from_params(&d), &SqueezedBath::from_params(&d)),
        cfg,
    )?;
    Ok(Minimum {
        axis_value: x,
        breakdown,
    })
}

/// Detuning sweep over [0, 2ω_m] at 20 μW, r = 1, one curve per temperature
/// (1, 10, 50, 100 mK).
pub fn figure1_specs(base: &PhysicalParams, points: usize) -> Vec<(String, SweepSpec)> {
    let fixed = PhysicalParams {
        pump_power: 20.0e-6,
        squeeze_r: 1.0,
        ..*base
    };
    [1.0, 10.0, 50.0, 100.0]
        .into_iter()
        .map(|t_mk| {
            let mut p = fixed;
            Axis::Temperature.apply(&mut p, t_mk);
            (
                format!("figure1_T{t_mk}mK"),
                SweepSpec {
                    axis: Axis::Detuning,
                    start: 0.0,
                    stop: 2.0 * base.mech_freq / RAD_PER_S_PER_MHZ,
                    points,
                    fixed: p,
                    quantity: Quantity::MomentumVariance,
                },
            )
        })
        .collect()
}

/// Pump-power sweep over [0, 300] μW at Δ = ω_m, r = 1, for 1 and 20 mK.
pub fn figure2_specs(base: &PhysicalParams, points: usize) -> Vec<(String, SweepSpec)> {
    let fixed = PhysicalParams {
        detuning: base.mech_freq,
        squeeze_r: 1.0,
        ..*base
    };
    [1.0, 20.0]
        .into_iter()
        .map(|t_mk| {
            let mut p = fixed;
            Axis::Temperature.apply(&mut p, t_mk);
            (
                format!("figure2_T{t_mk}mK"),
                SweepSpec {
                    axis: Axis::Power,
                    start: 0.0,
                    stop: 300.0,
                    points,
                    fixed: p,
                    quantity: Quantity::MomentumVariance,
                },
            )
        })
        .collect()
}
