//! Transduction of the waveguide momentum into the field leaving the
//! resonator, and its inversion.
//!
//! With `c_out = √(2κ_e(Q)) c` linearised about the steady state,
//!
//! ```text
//! δc_out(ω)     = J δc(ω) + (η/2)√(2κ_e) c_s δQ(ω)
//! δc(ω)         = [U δQ(ω) + J c_in(ω)] / A*(−ω)
//! δQ(ω)         = (iω_m/ω) δP(ω)
//! δy_out(ω)     = i[δc_out†(−ω) − δc_out(ω)]
//! ```
//!
//! so `δy_out` is linear in `(δP, c_in(ω), c_in†(−ω))`, and
//! [`reconstruct_momentum`] recovers δP from a measured `δy_out`.

use num_complex::Complex64;
use thiserror::Error;

use crate::linear_response::response_at;
use crate::params::DerivedParams;
use crate::steady_state::SteadyState;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OutputError {
    #[error("output transfer undefined at omega = 0")]
    ZeroFrequency,
    #[error("reconstruction undefined (eta = 0 or degenerate operating point)")]
    ReconstructionUndefined,
    #[error("cavity denominator vanished at omega = {0}")]
    CavityPole(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputTransfer {
    pub omega: f64,
    /// Coefficient of δP(ω) in δc_out(ω).
    pub c_out_on_p: Complex64,
    /// Coefficient of c_in(ω) in δc_out(ω): J²/A*(−ω).
    pub c_out_on_cin: Complex64,
    /// Coefficient of δP(ω) in δc_out†(−ω).
    pub c_out_dag_on_p: Complex64,
    /// Coefficient of c_in†(−ω) in δc_out†(−ω): J²/A(ω).
    pub c_out_dag_on_cin_dag: Complex64,
    pub recon_denominator: Complex64,
    pub a_plus: Complex64,
    pub a_minus_conj: Complex64,
    pub j_coef: f64,
    pub omega_m: f64,
}

impl OutputTransfer {
    /// Forward map: δy_out(ω) for given momentum and input amplitudes.
    pub fn y_out(&self, dp: Complex64, cin: Complex64, cin_dag: Complex64) -> Complex64 {
        let c_out = self.c_out_on_p * dp + self.c_out_on_cin * cin;
        let c_out_dag = self.c_out_dag_on_p * dp + self.c_out_dag_on_cin_dag * cin_dag;
        I * (c_out_dag - c_out)
    }
}

pub fn output_transfer_at(
    d: &DerivedParams,
    ss: &SteadyState,
    delta: f64,
    omega: f64,
) -> Result<OutputTransfer, OutputError> {
    if omega == 0.0 {
        return Err(OutputError::ZeroFrequency);
    }
    let tp = response_at(d, ss, delta, omega).map_err(|_| OutputError::CavityPole(omega))?;
    let (a, am, u, j) = (tp.a_plus, tp.a_minus_conj, tp.u_coef, tp.j_coef);
    if a.norm() == 0.0 || am.norm() == 0.0 {
        return Err(OutputError::CavityPole(omega));
    }

    let to_q = I * d.omega_m / omega;
    // (η/2)√(2κ_e) c_s: the output coupling modulated by the displacement
    let modulation = 0.5 * d.eta * d.sqrt_2kappa_e() * ss.c_s;

    Ok(OutputTransfer {
        omega,
        c_out_on_p: j * to_q * u / am + modulation * to_q,
        c_out_on_cin: Complex64::new(j * j, 0.0) / am,
        c_out_dag_on_p: j * to_q * u.conj() / a + modulation.conj() * to_q,
        c_out_dag_on_cin_dag: Complex64::new(j * j, 0.0) / a,
        recon_denominator: 0.5 * d.eta * d.sqrt_2kappa_e() * (ss.c_s.conj() - ss.c_s) * a * am
            + j * (am * u.conj() - a * u),
        a_plus: a,
        a_minus_conj: am,
        j_coef: j,
        omega_m: d.omega_m,
    })
}

/// δP(ω) = −(ω/ω_m)[A A*(−ω) δy_out − iJ²(A*(−ω) c_in†(−ω) − A c_in)] / denominator.
pub fn reconstruct_momentum(
    t: &OutputTransfer,
    y_out: Complex64,
    cin: Complex64,
    cin_dag: Complex64,
) -> Result<Complex64, OutputError> {
    let scale = (t.j_coef * (t.a_plus * t.a_minus_conj).norm()).max(f64::MIN_POSITIVE);
    if t.recon_denominator.norm() <= 1e-12 * scale {
        return Err(OutputError::ReconstructionUndefined);
    }
    let (a, am) = (t.a_plus, t.a_minus_conj);
    let j2 = t.j_coef * t.j_coef;
    let numerator = a * am * y_out - I * j2 * (am * cin_dag - a * cin);
    Ok(-(t.omega / t.omega_m) * numerator / t.recon_denominator)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear_response::{build_drift_matrix, resolvent};
    use crate::params::{derive_params, PhysicalParams};
    use crate::steady_state::solve_steady_state;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel_err(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
    }

    fn reference() -> (DerivedParams, SteadyState, f64) {
        let p = PhysicalParams::reference();
        let d = derive_params(&p).unwrap();
        let ss = solve_steady_state(&d, p.detuning).unwrap();
        (d, ss, p.detuning)
    }

    fn uncoupled() -> (DerivedParams, SteadyState, f64) {
        let p = PhysicalParams {
            kappa_om_slope: 0.0,
            ..PhysicalParams::reference()
        };
        let d = derive_params(&p).unwrap();
        let ss = solve_steady_state(&d, p.detuning).unwrap();
        (d, ss, p.detuning)
    }

    #[test]
    fn no_transduction_without_reactive_coupling() {
        let (d, ss, delta) = uncoupled();
        let t = output_transfer_at(&d, &ss, delta, 0.7 * d.omega_m).unwrap();
        assert_eq!(t.recon_denominator, c(0.0, 0.0));
        let expected = c(2.0 * d.kappa_e, 0.0) / t.a_minus_conj;
        assert!(rel_err(t.c_out_on_cin, expected) < 1e-15);
        assert_eq!(
            reconstruct_momentum(&t, c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)),
            Err(OutputError::ReconstructionUndefined)
        );
    }

    #[test]
    fn zero_frequency_is_undefined() {
        let (d, ss, delta) = reference();
        assert_eq!(output_transfer_at(&d, &ss, delta, 0.0), Err(OutputError::ZeroFrequency));
    }

    #[test]
    fn zero_signals_reconstruct_zero() {
        let (d, ss, delta) = reference();
        let t = output_transfer_at(&d, &ss, delta, d.omega_m).unwrap();
        let zero = c(0.0, 0.0);
        assert_eq!(reconstruct_momentum(&t, zero, zero, zero).unwrap(), zero);
    }

    #[test]
    fn coefficients_match_resolvent_composition() {
        // Compose V = (−iω − Z)⁻¹ with the output map and compare the total
        // response of δc_out to ξ and to c_in against the factored form.
        let (d, ss, delta) = reference();
        let omega = d.omega_m;
        let drift = build_drift_matrix(&d, &ss, delta);
        let v = resolvent(&drift, omega).unwrap();
        let nc = drift.noise_coefficients;
        let j = d.sqrt_2kappa_e() * (1.0 + 0.5 * d.eta * ss.q_s);
        let modulation = 0.5 * d.eta * d.sqrt_2kappa_e() * ss.c_s;
        let out_row = |input: &crate::linalg::Vector4c| {
            let dq = v.row(0).transpose().dot(input);
            let dc = v.row(2).transpose().dot(input);
            j * dc + modulation * dq
        };
        let oracle_xi = out_row(&nc.xi);
        let oracle_cin = out_row(&nc.c_in);

        let t = output_transfer_at(&d, &ss, delta, omega).unwrap();
        let tp = response_at(&d, &ss, delta, omega).unwrap();
        let factored_xi = t.c_out_on_p * tp.p_t;
        let factored_cin = t.c_out_on_p * tp.p_s + t.c_out_on_cin;
        assert!(rel_err(factored_xi, oracle_xi) < 1e-9, "{factored_xi} vs {oracle_xi}");
        assert!(
            rel_err(factored_cin, oracle_cin) < 1e-9,
            "{factored_cin} vs {oracle_cin}"
        );
    }

    #[test]
    fn reconstruction_is_linear() {
        let (d, ss, delta) = reference();
        let t = output_transfer_at(&d, &ss, delta, 1.3 * d.omega_m).unwrap();
        let s1 = (c(0.3, -1.0), c(2.0, 0.5), c(-0.1, 0.2));
        let s2 = (c(-1.5, 0.25), c(0.0, 1.0), c(3.0, -2.0));
        let k = c(0.7, -0.4);
        let r = |s: (Complex64, Complex64, Complex64)| reconstruct_momentum(&t, s.0, s.1, s.2).unwrap();
        let sum = r((s1.0 + s2.0, s1.1 + s2.1, s1.2 + s2.2));
        assert!(rel_err(sum, r(s1) + r(s2)) < 1e-12);
        let scaled = r((k * s1.0, k * s1.1, k * s1.2));
        assert!(rel_err(scaled, k * r(s1)) < 1e-12);
    }
}
