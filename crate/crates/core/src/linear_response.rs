//! Linearised fluctuation dynamics around the steady state.
//!
//! The fluctuation vector is ordered `(δQ, δP, δc, δc†)` and obeys
//! `ḟ = Z f + F`. In the frequency domain `f(ω) = (−iω − Z)⁻¹ F(ω)`, and the
//! momentum row of that solution is available both in closed form
//! ([`response_at`]) and by direct numeric inversion ([`response_oracle`]).

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{self, Matrix4c, Vector4c};
use crate::params::DerivedParams;
use crate::steady_state::SteadyState;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResponseError {
    #[error("response pole at omega = {omega}: the linear system is singular")]
    ResponsePole { omega: f64 },
}

/// How each noise input enters the four fluctuation equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseCoefficients {
    /// Thermal force ξ (momentum row only).
    pub xi: Vector4c,
    /// Squeezed input c_in(ω).
    pub c_in: Vector4c,
    /// Conjugate input c_in†(−ω).
    pub c_in_dag: Vector4c,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftMatrix {
    pub z: Matrix4c,
    pub noise_coefficients: NoiseCoefficients,
}

impl DriftMatrix {
    pub fn eigenvalues(&self) -> Option<Vec<Complex64>> {
        linalg::eigenvalues(&self.z).map(|v| v.iter().copied().collect())
    }

    /// Distinct nonnegative |Im λ| of the drift eigenvalues, i.e. the
    /// frequencies at which the response functions peak.
    pub fn resonance_frequencies(&self) -> Vec<f64> {
        let mut freqs: Vec<f64> = self
            .eigenvalues()
            .unwrap_or_default()
            .iter()
            .map(|z| z.im.abs())
            .collect();
        freqs.sort_by(f64::total_cmp);
        freqs.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
        freqs
    }
}

/// All frequency-domain response quantities at one ω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferPoint {
    pub omega: f64,
    /// A(ω) = κ_e + κ_om Q_s − i(Δ + ω).
    pub a_plus: Complex64,
    /// A*(−ω) = κ_e + κ_om Q_s + i(Δ − ω).
    pub a_minus_conj: Complex64,
    /// Mechanical denominator ω_m² − ω² − iγ_m ω.
    pub r_mech: Complex64,
    pub d_det: Complex64,
    /// J = √(2κ_e)(1 + ηQ_s/2).
    pub j_coef: f64,
    /// U = −κ_om c_s + (η/2) ε̃_l.
    pub u_coef: Complex64,
    /// Thermal-force → momentum transfer.
    pub p_t: Complex64,
    /// Squeezed-input → momentum transfer.
    pub p_s: Complex64,
    /// Position transfers (iω_m/ω) P_T and (iω_m/ω) P_S; `None` at ω = 0.
    pub q_t: Option<Complex64>,
    pub q_s_tf: Option<Complex64>,
}

/// Drift matrix at an arbitrary operating point `(q_s, c_s)`.
pub fn drift_matrix_at(d: &DerivedParams, q_s: f64, c_s: Complex64, delta: f64) -> DriftMatrix {
    let zero = Complex64::new(0.0, 0.0);
    let re = |x: f64| Complex64::new(x, 0.0);

    let cav = re(d.kappa_e + d.kappa_om * q_s) + I * delta;
    let u = -d.kappa_om * c_s + re(0.5 * d.eta * d.eps_tilde);
    let drive = I * d.eta * d.eps_tilde;

    #[rustfmt::skip]
    let z = Matrix4c::new(
        zero,            re(d.omega_m),    zero,     zero,
        re(-d.omega_m),  re(-d.gamma_m),   drive,    -drive,
        u,               zero,             -cav,     zero,
        u.conj(),        zero,             zero,     -cav.conj(),
    );

    let j = re(d.sqrt_2kappa_e() * (1.0 + 0.5 * d.eta * q_s));
    let back_action = d.eta * d.sqrt_2kappa_e();
    let noise_coefficients = NoiseCoefficients {
        xi: Vector4c::new(zero, re(1.0), zero, zero),
        c_in: Vector4c::new(zero, -I * back_action * c_s.conj(), j, zero),
        c_in_dag: Vector4c::new(zero, I * back_action * c_s, zero, j),
    };
    DriftMatrix { z, noise_coefficients }
}

pub fn build_drift_matrix(d: &DerivedParams, ss: &SteadyState, delta: f64) -> DriftMatrix {
    drift_matrix_at(d, ss.q_s, ss.c_s, delta)
}

/// True iff every eigenvalue of Z lies strictly in the open left half-plane.
///
/// Real parts within 10⁻¹² of the spectral scale are treated as marginal.
pub fn is_stable(z: &DriftMatrix) -> bool {
    let Some(eig) = z.eigenvalues() else {
        return false;
    };
    let scale = eig.iter().map(|l| l.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    eig.iter().all(|l| l.re < -1.0e-12 * scale)
}

pub fn response_at(
    d: &DerivedParams,
    ss: &SteadyState,
    delta: f64,
    omega: f64,
) -> Result<TransferPoint, ResponseError> {
    let kappa = d.kappa_e + d.kappa_om * ss.q_s;
    let a_plus = Complex64::new(kappa, -(delta + omega));
    let a_minus_conj = Complex64::new(kappa, delta - omega);
    let r_mech = Complex64::new(d.omega_m * d.omega_m - omega * omega, -d.gamma_m * omega);
    let u_coef = -d.kappa_om * ss.c_s + 0.5 * d.eta * d.eps_tilde;
    let j_coef = d.sqrt_2kappa_e() * (1.0 + 0.5 * d.eta * ss.q_s);

    let aa = a_plus * a_minus_conj;
    let d_det = aa * r_mech - I * d.eta * d.eps_tilde * d.omega_m * (a_plus * u_coef - a_minus_conj * u_coef.conj());
    if d_det == Complex64::new(0.0, 0.0) || !d_det.is_finite() {
        return Err(ResponseError::ResponsePole { omega });
    }

    let p_t = -I * omega * aa / d_det;
    let p_s = d.eta * (omega * d.eps_tilde * a_plus * j_coef / d_det - I * d.sqrt_2kappa_e() * ss.c_s.conj() * p_t);

    let to_position = (omega != 0.0).then(|| I * d.omega_m / omega);
    Ok(TransferPoint {
        omega,
        a_plus,
        a_minus_conj,
        r_mech,
        d_det,
        j_coef,
        u_coef,
        p_t,
        p_s,
        q_t: to_position.map(|k| k * p_t),
        q_s_tf: to_position.map(|k| k * p_s),
    })
}

/// Momentum-row transfers by numeric inversion of `−iω − Z`.
///
/// Returns `(P_T(ω), P_S(ω), coefficient of c_in†(−ω))`.
pub fn response_oracle(z: &DriftMatrix, omega: f64) -> Result<(Complex64, Complex64, Complex64), ResponseError> {
    let v = momentum_row(z, omega)?;
    let nc = &z.noise_coefficients;
    Ok((v.dot(&nc.xi), v.dot(&nc.c_in), v.dot(&nc.c_in_dag)))
}

/// Full resolvent V = (−iω − Z)⁻¹.
pub fn resolvent(z: &DriftMatrix, omega: f64) -> Result<Matrix4c, ResponseError> {
    let m = Matrix4c::from_diagonal_element(-I * omega) - z.z;
    linalg::invert(&m)
        .filter(|v| v.iter().all(|x| x.is_finite()))
        .ok_or(ResponseError::ResponsePole { omega })
}

fn momentum_row(z: &DriftMatrix, omega: f64) -> Result<Vector4c, ResponseError> {
    let v = resolvent(z, omega)?;
    Ok(v.row(1).transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{derive_params, PhysicalParams};
    use crate::steady_state::solve_steady_state;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn uncoupled() -> DerivedParams {
        let mut d = derive_params(&PhysicalParams::reference()).unwrap();
        d.kappa_om = 0.0;
        d.eta = 0.0;
        d
    }

    fn rel_err(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(a.norm()).max(f64::MIN_POSITIVE)
    }

    fn reference_point() -> (DerivedParams, SteadyState, f64) {
        let p = PhysicalParams::reference();
        let d = derive_params(&p).unwrap();
        let ss = solve_steady_state(&d, p.detuning).unwrap();
        (d, ss, p.detuning)
    }

    #[test]
    fn undriven_uncoupled_matrix_is_block_diagonal() {
        let mut d = uncoupled();
        d.eps_tilde = 0.0;
        let ss = solve_steady_state(&d, d.omega_m).unwrap();
        let z = build_drift_matrix(&d, &ss, d.omega_m).z;
        assert_eq!(z[(0, 1)], c(d.omega_m, 0.0));
        assert_eq!(z[(1, 0)], c(-d.omega_m, 0.0));
        assert_eq!(z[(1, 1)], c(-d.gamma_m, 0.0));
        assert_eq!(z[(2, 2)], c(-d.kappa_e, -d.omega_m));
        assert_eq!(z[(3, 3)], c(-d.kappa_e, d.omega_m));
        for (i, j) in [
            (0, 2),
            (0, 3),
            (1, 2),
            (1, 3),
            (2, 0),
            (2, 1),
            (3, 0),
            (3, 1),
            (2, 3),
            (3, 2),
        ] {
            assert_eq!(z[(i, j)], c(0.0, 0.0), "entry ({i},{j})");
        }
        assert!(is_stable(&build_drift_matrix(&d, &ss, d.omega_m)));
    }

    #[test]
    fn position_row_is_pure_rotation() {
        let (d, ss, delta) = reference_point();
        let z = build_drift_matrix(&d, &ss, delta).z;
        assert_eq!(z[(0, 0)], c(0.0, 0.0));
        assert_eq!(z[(0, 1)], c(d.omega_m, 0.0));
        assert_eq!(z[(0, 2)], c(0.0, 0.0));
        assert_eq!(z[(0, 3)], c(0.0, 0.0));
    }

    #[test]
    fn field_rows_are_conjugate_mirrors() {
        let (d, ss, delta) = reference_point();
        let m = build_drift_matrix(&d, &ss, delta);
        let z = m.z;
        assert_eq!(z[(3, 0)], z[(2, 0)].conj());
        assert_eq!(z[(3, 3)], z[(2, 2)].conj());
        assert_eq!(z[(1, 3)], -z[(1, 2)]);
        assert_eq!(z[(1, 2)], z[(1, 3)].conj());
        let nc = m.noise_coefficients;
        assert_eq!(nc.c_in_dag[1], nc.c_in[1].conj());
        assert_eq!(nc.c_in_dag[3], nc.c_in[2]);
    }

    #[test]
    fn marginal_undamped_system_is_not_stable() {
        let mut d = uncoupled();
        d.gamma_m = 0.0;
        d.kappa_e = 0.0;
        d.eps_tilde = 0.0;
        let z = drift_matrix_at(&d, 0.0, c(0.0, 0.0), d.omega_m);
        assert!(!is_stable(&z));
    }

    #[test]
    fn reference_operating_point_is_stable() {
        let (d, ss, delta) = reference_point();
        let m = build_drift_matrix(&d, &ss, delta);
        let eig = m.eigenvalues().unwrap();
        assert!(eig.iter().all(|l| l.re < 0.0), "{eig:?}");
        assert!(is_stable(&m));
    }

    #[test]
    fn uncoupled_transfer_is_bare_susceptibility() {
        let d = uncoupled();
        let ss = solve_steady_state(&d, d.omega_m).unwrap();
        for &w in &[0.0, 0.3, 1.0, 1.7, -2.5] {
            let omega = w * d.omega_m;
            let tp = response_at(&d, &ss, d.omega_m, omega).unwrap();
            assert_eq!(tp.p_s, c(0.0, 0.0));
            let bare = -I * omega / tp.r_mech;
            assert!(rel_err(tp.p_t, bare) < 1e-14 || tp.p_t == bare);
        }
        let at_zero = response_at(&d, &ss, d.omega_m, 0.0).unwrap();
        assert_eq!(at_zero.p_t, c(0.0, 0.0));
        assert!(at_zero.q_t.is_none());
        assert!(at_zero.q_s_tf.is_none());
    }

    #[test]
    fn determinant_and_transfer_identities() {
        let (d, ss, delta) = reference_point();
        let tp = response_at(&d, &ss, delta, 0.8 * d.omega_m).unwrap();
        let recomputed = tp.a_plus * tp.a_minus_conj * tp.r_mech
            - I * d.eta * d.eps_tilde * d.omega_m * (tp.a_plus * tp.u_coef - tp.a_minus_conj * tp.u_coef.conj());
        assert!(rel_err(recomputed, tp.d_det) < 1e-14);
        assert!(rel_err(tp.p_t, -I * tp.omega * tp.a_plus * tp.a_minus_conj / tp.d_det) < 1e-14);
    }

    #[test]
    fn oracle_matches_closed_form_at_mechanical_frequency() {
        let (d, ss, delta) = reference_point();
        let m = build_drift_matrix(&d, &ss, delta);
        let tp = response_at(&d, &ss, delta, d.omega_m).unwrap();
        let (pt, ps, _) = response_oracle(&m, d.omega_m).unwrap();
        assert!(rel_err(tp.p_t, pt) < 1e-9, "{} vs {}", tp.p_t, pt);
        assert!(rel_err(tp.p_s, ps) < 1e-9, "{} vs {}", tp.p_s, ps);
    }

    #[test]
    fn oracle_without_coupling_has_no_squeezed_path() {
        let d = uncoupled();
        let ss = solve_steady_state(&d, d.omega_m).unwrap();
        let m = build_drift_matrix(&d, &ss, d.omega_m);
        let (_, ps, pdag) = response_oracle(&m, 0.9 * d.omega_m).unwrap();
        assert_eq!(ps, c(0.0, 0.0));
        assert_eq!(pdag, c(0.0, 0.0));
    }

    #[test]
    fn conjugate_input_coefficient_is_mirrored_transfer() {
        let (d, ss, delta) = reference_point();
        let m = build_drift_matrix(&d, &ss, delta);
        // Fixed LCG so the 100 sample frequencies are reproducible.
        let mut state: u64 = 0x2545_f491_4f6c_dd1d;
        for _ in 0..100 {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let u = (state >> 11) as f64 / (1u64 << 53) as f64;
            let omega = (u * 2.0 - 1.0) * 5.0 * d.omega_m;
            let (_, _, pdag) = response_oracle(&m, omega).unwrap();
            let mirrored = response_at(&d, &ss, delta, -omega).unwrap().p_s.conj();
            assert!(rel_err(pdag, mirrored) < 1e-9, "omega = {omega}");
        }
    }

    #[test]
    fn thermal_transfer_decays_as_inverse_frequency() {
        let (d, ss, delta) = reference_point();
        let m = build_drift_matrix(&d, &ss, delta);
        for &w in &[60.0, 100.0, 300.0, -80.0, -500.0] {
            let omega = w * d.omega_m;
            let (pt, _, _) = response_oracle(&m, omega).unwrap();
            let slope = pt.norm() * omega.abs();
            assert!((slope - 1.0).abs() < 0.05, "|P_T| |w| = {slope} at {w} w_m");
        }
    }

    #[test]
    fn thermal_product_is_real_and_nonnegative() {
        let (d, ss, delta) = reference_point();
        for k in 0..400 {
            let omega = (-20.0 + 40.0 * k as f64 / 399.0) * d.omega_m;
            let a = response_at(&d, &ss, delta, omega).unwrap().p_t;
            let b = response_at(&d, &ss, delta, -omega).unwrap().p_t;
            let prod = a * b;
            assert!(prod.re >= 0.0);
            assert!(prod.im.abs() <= 1e-9 * prod.norm().max(1e-300), "{prod}");
        }
    }
}
