//! Mean-field steady state of the waveguide/resonator system.
//!
//! With `P_s = 0`, eliminating `c_s` leaves one real equation for the
//! displacement. In the scaled variable `x = ηQ_s`, δ = Δ/κ_e and
//! σ = 2η²ε̃²Δ/(ω_m κ_e²) it is the monic cubic
//!
//! ```text
//! x³ + 2x² + (1 + δ² − σ/2) x − σ = 0
//! ```
//!
//! which is solved in closed form and polished with Newton steps.

use num_complex::Complex64;
use thiserror::Error;

use crate::linear_response::{drift_matrix_at, is_stable};
use crate::params::DerivedParams;

/// Linearisation is flagged valid once the intracavity amplitude reaches this.
pub const LINEARIZATION_THRESHOLD: f64 = 10.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SteadyStateError {
    #[error("no real root of the steady-state equation")]
    NoRealRoot,
    #[error("no stable root: every steady state {roots:?} has a drift eigenvalue with Re >= 0")]
    NoStableRoot { roots: Vec<f64> },
    #[error("detuning must be finite (got {0})")]
    NonFiniteDetuning(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    /// Mean dimensionless displacement.
    pub q_s: f64,
    /// Mean dimensionless momentum (identically zero).
    pub p_s: f64,
    /// Mean intracavity amplitude.
    pub c_s: Complex64,
    /// Every physical real root, ascending.
    pub all_real_roots: Vec<f64>,
    pub multistable: bool,
    pub linearization_valid: bool,
}

impl SteadyState {
    /// Residuals of the three steady-state equations at `(q_s, c_s)`:
    /// `(P_s, Q_s + (2η/ω_m) ε̃ Im c_s, (κ_e + κ_om Q_s + iΔ) c_s − (1 + ηQ_s/2) ε̃)`.
    pub fn residuals(&self, d: &DerivedParams, delta: f64) -> (f64, f64, f64) {
        let mean_force = self.q_s + 2.0 * d.eta / d.omega_m * d.eps_tilde * self.c_s.im;
        let cavity = Complex64::new(d.kappa_e + d.kappa_om * self.q_s, delta) * self.c_s
            - (1.0 + 0.5 * d.eta * self.q_s) * d.eps_tilde;
        (self.p_s, mean_force, cavity.norm())
    }
}

/// Intracavity amplitude for a given displacement.
pub fn cavity_amplitude(d: &DerivedParams, q: f64, delta: f64) -> Complex64 {
    let x = d.eta * q;
    (1.0 + 0.5 * x) * d.eps_tilde / Complex64::new(d.kappa_e * (1.0 + x), delta)
}

pub fn solve_steady_state(d: &DerivedParams, delta: f64) -> Result<SteadyState, SteadyStateError> {
    if !delta.is_finite() {
        return Err(SteadyStateError::NonFiniteDetuning(delta));
    }
    let roots = displacement_roots(d, delta);
    if roots.is_empty() {
        return Err(SteadyStateError::NoRealRoot);
    }

    let mut by_magnitude = roots.clone();
    by_magnitude.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let q_s = by_magnitude
        .into_iter()
        .find(|&q| is_stable(&drift_matrix_at(d, q, cavity_amplitude(d, q, delta), delta)))
        .ok_or_else(|| SteadyStateError::NoStableRoot { roots: roots.clone() })?;

    let c_s = cavity_amplitude(d, q_s, delta);
    Ok(SteadyState {
        q_s,
        p_s: 0.0,
        c_s,
        multistable: roots.len() > 1,
        all_real_roots: roots,
        linearization_valid: c_s.norm() >= LINEARIZATION_THRESHOLD,
    })
}

/// All physical real roots Q_s, ascending.
pub fn displacement_roots(d: &DerivedParams, delta: f64) -> Vec<f64> {
    if d.eta == 0.0 || d.eps_tilde == 0.0 {
        // Q_s = -(2η/ω_m) ε̃ Im c_s vanishes identically.
        return vec![0.0];
    }
    let dd = delta / d.kappa_e;
    let sigma = 2.0 * d.eta * d.eta * d.eps_tilde * d.eps_tilde * delta / (d.omega_m * d.kappa_e * d.kappa_e);
    let (b, c, e) = (2.0, 1.0 + dd * dd - 0.5 * sigma, -sigma);

    let mut xs: Vec<f64> = real_cubic_roots(b, c, e)
        .into_iter()
        .map(|x| newton_polish(x, b, c, e))
        // (1 + x)² + δ² = 0 roots were introduced by clearing the denominator.
        .filter(|&x| (1.0 + x) * (1.0 + x) + dd * dd > 1e-12)
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-10 * b.abs().max(1e-300));
    let mut qs: Vec<f64> = xs.into_iter().map(|x| x / d.eta).collect();
    qs.sort_by(f64::total_cmp);
    qs
}

/// Real roots of x³ + b x² + c x + e.
fn real_cubic_roots(b: f64, c: f64, e: f64) -> Vec<f64> {
    // x = t − b/3 gives t³ + p t + q = 0.
    let shift = b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + e;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);

    if p == 0.0 && q == 0.0 {
        return vec![-shift];
    }
    if disc > 0.0 {
        let s = disc.sqrt();
        let t = (-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt();
        vec![t - shift]
    } else {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|k| m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() - shift)
            .collect()
    }
}

fn newton_polish(mut x: f64, b: f64, c: f64, e: f64) -> f64 {
    for _ in 0..8 {
        let f = ((x + b) * x + c) * x + e;
        let df = (3.0 * x + 2.0 * b) * x + c;
        if df == 0.0 {
            break;
        }
        let step = f / df;
        x -= step;
        if step.abs() <= 1e-15 * x.abs().max(1e-300) {
            break;
        }
    }
    x
}
