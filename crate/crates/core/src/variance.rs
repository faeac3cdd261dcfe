//! Stationary momentum and position variances.
//!
//! The variance is the sum of four spectral integrals:
//!
//! ```text
//! thermal = (1/2π) ∫ P_T(ω) P_T(−ω) S_ξ(ω) dω
//! m_term  = 2 Re (1/2π) ∫ P_S(ω_m + ν) P_S(ω_m − ν) M L(ν) dν
//! n_term  = 2 (1/2π) ∫ |P_S(ω_m + ν)|² N L(ν) dν
//! vacuum  = (1/2π) ∫ |P_S(ω)|² dω
//! ```
//!
//! with L(ν) = Γ²/(Γ² + ν²). The fast 2ω_m rotation of the squeezing term is
//! dropped (interaction picture at ω_m). The infinite ranges are truncated to
//! ±`cutoff_factor`·ω_m and ±`nu_cutoff_factor`·Γ; the thermal integrand
//! decays only like 1/ω, so the cutoff matters at the 10⁻⁴ level.
//!
//! Position variances use the same template with Q_{T,S} = (iω_m/ω) P_{T,S}.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linear_response::{build_drift_matrix, is_stable, response_at};
use crate::noise_spectra::{SqueezedBath, ThermalBath};
use crate::params::DerivedParams;
use crate::quadrature::{self, integrate_adaptive, QuadratureError, Tolerance};
use crate::steady_state::SteadyState;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VarianceError {
    #[error("unstable operating point: the drift matrix has an eigenvalue with Re >= 0")]
    UnstableOperatingPoint,
    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// ω-integrals run over ±cutoff_factor·ω_m.
    pub cutoff_factor: f64,
    /// ν-integrals run over ±nu_cutoff_factor·Γ.
    pub nu_cutoff_factor: f64,
    /// Extra panel boundaries (rad/s) for the ω-integrals.
    pub forced_breakpoints: Vec<f64>,
    pub max_panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1.0e-6,
            abs_tol: 1.0e-10,
            cutoff_factor: 20.0,
            nu_cutoff_factor: 40.0,
            forced_breakpoints: Vec::new(),
            max_panels: quadrature::DEFAULT_MAX_PANELS,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<(), VarianceError> {
        let bad = |msg: String| Err(VarianceError::InvalidConfig(msg));
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return bad(format!(
                "tolerances must be > 0 (rel_tol = {}, abs_tol = {})",
                self.rel_tol, self.abs_tol
            ));
        }
        if !self.cutoff_factor.is_finite() || self.cutoff_factor < 5.0 {
            return bad(format!("cutoff_factor must be >= 5 (got {})", self.cutoff_factor));
        }
        if !self.nu_cutoff_factor.is_finite() || self.nu_cutoff_factor <= 0.0 {
            return bad(format!("nu_cutoff_factor must be > 0 (got {})", self.nu_cutoff_factor));
        }
        if !self.forced_breakpoints.windows(2).all(|w| w[0] <= w[1]) {
            return bad("forced_breakpoints must be sorted".into());
        }
        if self.max_panels == 0 {
            return bad("max_panels must be >= 1".into());
        }
        Ok(())
    }

    fn tolerance(&self) -> Tolerance {
        Tolerance {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_panels: self.max_panels,
            ..Tolerance::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceBreakdown {
    pub thermal_term: f64,
    pub m_term: f64,
    pub n_term: f64,
    pub vacuum_term: f64,
    pub total: f64,
    /// max(0, 1 − total) × 100.
    pub squeezing_percent: f64,
    /// Sum of the quadrature error estimates, in variance units.
    pub estimated_quadrature_error: f64,
    /// False when any integral ran out of panels before meeting tolerance.
    pub tolerance_met: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Quadrature {
    Momentum,
    Position,
}

pub fn momentum_variance(
    d: &DerivedParams,
    ss: &SteadyState,
    delta: f64,
    baths: (&ThermalBath, &SqueezedBath),
    cfg: &QuadratureConfig,
) -> Result<VarianceBreakdown, VarianceError> {
    variance(d, ss, delta, baths, cfg, Quadrature::Momentum)
}

pub fn position_variance(
    d: &DerivedParams,
    ss: &SteadyState,
    delta: f64,
    baths: (&ThermalBath, &SqueezedBath),
    cfg: &QuadratureConfig,
) -> Result<VarianceBreakdown, VarianceError> {
    variance(d, ss, delta, baths, cfg, Quadrature::Position)
}

struct Accumulated {
    value: f64,
    error: f64,
    converged: bool,
}

fn run<F: Fn(f64) -> f64>(
    f: F,
    half_width: f64,
    breakpoints: &[f64],
    tol: &Tolerance,
) -> Result<Accumulated, VarianceError> {
    match integrate_adaptive(f, -half_width, half_width, breakpoints, tol) {
        Ok(r) => Ok(Accumulated {
            value: r.value,
            error: r.error,
            converged: true,
        }),
        Err(QuadratureError::BudgetExhausted { value, error, .. }) => Ok(Accumulated {
            value,
            error,
            converged: false,
        }),
        Err(e) => Err(e.into()),
    }
}

fn variance(
    d: &DerivedParams,
    ss: &SteadyState,
    delta: f64,
    (thermal, squeezed): (&ThermalBath, &SqueezedBath),
    cfg: &QuadratureConfig,
    which: Quadrature,
) -> Result<VarianceBreakdown, VarianceError> {
    cfg.validate()?;
    let drift = build_drift_matrix(d, ss, delta);
    if !is_stable(&drift) {
        return Err(VarianceError::UnstableOperatingPoint);
    }

    let nan = Complex64::new(f64::NAN, f64::NAN);
    let transfers = |omega: f64| -> (Complex64, Complex64) {
        let Ok(tp) = response_at(d, ss, delta, omega) else {
            return (nan, nan);
        };
        match which {
            Quadrature::Momentum => (tp.p_t, tp.p_s),
            Quadrature::Position => (tp.q_t.unwrap_or(nan), tp.q_s_tf.unwrap_or(nan)),
        }
    };

    // Frequencies where the integrands have structure: the response poles,
    // the cavity sidebands ±Δ, the mechanical frequency, and ω = 0.
    let omega_m = d.omega_m;
    let mut features = vec![0.0, omega_m, -omega_m, delta, -delta];
    for w in drift.resonance_frequencies() {
        features.push(w);
        features.push(-w);
    }
    let mut omega_breaks: Vec<f64> = features.clone();
    omega_breaks.extend_from_slice(&cfg.forced_breakpoints);
    sort_unique(&mut omega_breaks);
    // ω_m ± ν lands on a feature f at ν = ±(f − ω_m).
    let mut nu_breaks: Vec<f64> = features
        .iter()
        .flat_map(|&f| [f - omega_m, omega_m - f])
        .chain(std::iter::once(0.0))
        .collect();
    sort_unique(&mut nu_breaks);

    let tol = cfg.tolerance();
    let omega_cut = cfg.cutoff_factor * omega_m;
    let nu_cut = cfg.nu_cutoff_factor * squeezed.big_gamma;

    let thermal_int = run(
        |w| {
            let (pt_plus, _) = transfers(w);
            let (pt_minus, _) = transfers(-w);
            (pt_plus * pt_minus).re * thermal.thermal_density(w)
        },
        omega_cut,
        &omega_breaks,
        &tol,
    )?;

    let vacuum_int = run(|w| transfers(w).1.norm_sqr(), omega_cut, &omega_breaks, &tol)?;

    let zero = Accumulated {
        value: 0.0,
        error: 0.0,
        converged: true,
    };
    let m_int = if squeezed.m_sq == Complex64::new(0.0, 0.0) {
        zero
    } else {
        run(
            |nu| {
                let (_, ps_up) = transfers(omega_m + nu);
                let (_, ps_down) = transfers(omega_m - nu);
                (ps_up * ps_down * squeezed.m_sq).re * squeezed.lorentz_weight(nu)
            },
            nu_cut,
            &nu_breaks,
            &tol,
        )?
    };
    let n_int = if squeezed.n_sq == 0.0 {
        Accumulated {
            value: 0.0,
            error: 0.0,
            converged: true,
        }
    } else {
        run(
            |nu| transfers(omega_m + nu).1.norm_sqr() * squeezed.occupation(nu),
            nu_cut,
            &nu_breaks,
            &tol,
        )?
    };

    let thermal_term = thermal_int.value / TWO_PI;
    let m_term = 2.0 * m_int.value / TWO_PI;
    let n_term = 2.0 * n_int.value / TWO_PI;
    let vacuum_term = vacuum_int.value / TWO_PI;
    let total = thermal_term + m_term + n_term + vacuum_term;
    Ok(VarianceBreakdown {
        thermal_term,
        m_term,
        n_term,
        vacuum_term,
        total,
        squeezing_percent: (1.0 - total).max(0.0) * 100.0,
        estimated_quadrature_error: (thermal_int.error + 2.0 * m_int.error + 2.0 * n_int.error + vacuum_int.error)
            / TWO_PI,
        tolerance_met: thermal_int.converged && m_int.converged && n_int.converged && vacuum_int.converged,
    })
}

fn sort_unique(v: &mut Vec<f64>) {
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs().max(1.0));
}
