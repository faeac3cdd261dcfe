//! Experimental parameters and their conversion to the angular-frequency
//! quantities used by every other module.
//!
//! Everything downstream of [`derive_params`] is in rad/s (frequencies),
//! √(photons/s) (drive amplitudes), or dimensionless quadratures normalised so
//! that `[Q, P] = 2i`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::{C_LIGHT, HBAR, RAD_PER_S_PER_MHZ, TWO_PI};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("invalid parameter `{field}`: must be > 0 (got {value})")]
    NonPositive { field: &'static str, value: f64 },
    #[error("invalid parameter `{field}`: must be >= 0 (got {value})")]
    Negative { field: &'static str, value: f64 },
    #[error("invalid parameter `{field}`: must be finite (got {value})")]
    NotFinite { field: &'static str, value: f64 },
    #[error("dispersive coupling unsupported (dispersive_g = {0}, must be 0)")]
    DispersiveCouplingUnsupported(f64),
}

/// User-facing device and drive parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Laser wavelength λ in nm.
    pub wavelength_laser: f64,
    /// Pump power ℘_l in W.
    pub pump_power: f64,
    /// Effective mass of the waveguide in kg.
    pub mass: f64,
    /// Mechanical angular frequency ω_m in rad/s.
    pub mech_freq: f64,
    /// Mechanical quality factor ω_m/γ_m.
    pub quality_factor: f64,
    /// κ_e/ω_m.
    pub kappa_e_ratio: f64,
    /// Slope of the external decay rate with physical displacement, rad/s per nm.
    pub kappa_om_slope: f64,
    /// Detuning Δ = ω_c − ω_l in rad/s.
    pub detuning: f64,
    /// Squeezing parameter r of the injected vacuum.
    pub squeeze_r: f64,
    /// Squeezing phase φ in radians.
    pub squeeze_phi: f64,
    /// Squeezing bandwidth Γ in units of κ_e.
    pub bandwidth_ratio: f64,
    /// Bath temperature in K.
    pub temperature: f64,
    /// Dispersive coupling g in rad/s. Only 0 is supported.
    pub dispersive_g: f64,
}

impl PhysicalParams {
    /// Silicon nano-waveguide (10 μm × 300 nm × 300 nm, 2 pg) beside a
    /// microdisk, pumped at 1564.25 nm with 20 μW, Δ = ω_m, r = 1, T = 1 mK.
    pub fn reference() -> Self {
        let mech_freq = TWO_PI * 25.45e6;
        Self {
            wavelength_laser: 1564.25,
            pump_power: 20.0e-6,
            mass: 2.0e-15,
            mech_freq,
            quality_factor: 5000.0,
            kappa_e_ratio: 0.05,
            kappa_om_slope: -26.6 * RAD_PER_S_PER_MHZ,
            detuning: mech_freq,
            squeeze_r: 1.0,
            squeeze_phi: 0.0,
            bandwidth_ratio: 5.0,
            temperature: 1.0e-3,
            dispersive_g: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        let all = [
            ("wavelength_laser", self.wavelength_laser),
            ("pump_power", self.pump_power),
            ("mass", self.mass),
            ("mech_freq", self.mech_freq),
            ("quality_factor", self.quality_factor),
            ("kappa_e_ratio", self.kappa_e_ratio),
            ("kappa_om_slope", self.kappa_om_slope),
            ("detuning", self.detuning),
            ("squeeze_r", self.squeeze_r),
            ("squeeze_phi", self.squeeze_phi),
            ("bandwidth_ratio", self.bandwidth_ratio),
            ("temperature", self.temperature),
            ("dispersive_g", self.dispersive_g),
        ];
        for (field, value) in all {
            if !value.is_finite() {
                return Err(ParamError::NotFinite { field, value });
            }
        }
        let positive = [
            ("mass", self.mass),
            ("mech_freq", self.mech_freq),
            ("quality_factor", self.quality_factor),
            ("wavelength_laser", self.wavelength_laser),
            ("kappa_e_ratio", self.kappa_e_ratio),
            ("bandwidth_ratio", self.bandwidth_ratio),
        ];
        for (field, value) in positive {
            if value <= 0.0 {
                return Err(ParamError::NonPositive { field, value });
            }
        }
        let non_negative = [
            ("pump_power", self.pump_power),
            ("temperature", self.temperature),
            ("squeeze_r", self.squeeze_r),
        ];
        for (field, value) in non_negative {
            if value < 0.0 {
                return Err(ParamError::Negative { field, value });
            }
        }
        if self.dispersive_g != 0.0 {
            return Err(ParamError::DispersiveCouplingUnsupported(self.dispersive_g));
        }
        Ok(())
    }
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self::reference()
    }
}

/// Angular-frequency quantities consumed by the dynamics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    /// Laser angular frequency ω_l = 2πc/λ.
    pub omega_l: f64,
    pub omega_m: f64,
    /// Mechanical damping γ_m = ω_m / Q_mech.
    pub gamma_m: f64,
    pub kappa_e: f64,
    /// Reactive coupling per unit dimensionless displacement Q.
    pub kappa_om: f64,
    /// κ_om / κ_e; carries the sign of the slope.
    pub eta: f64,
    /// Drive amplitude √(℘_l / ħω_l).
    pub eps_l: f64,
    /// √(2κ_e) ε_l.
    pub eps_tilde: f64,
    /// Squeezing bandwidth Γ.
    pub big_gamma: f64,
    /// N = sinh² r.
    pub n_sq: f64,
    /// M = sinh r cosh r e^{iφ}.
    pub m_sq: Complex64,
    pub temperature: f64,
}

impl DerivedParams {
    /// √(2κ_e), the input coupling at zero displacement.
    pub fn sqrt_2kappa_e(&self) -> f64 {
        (2.0 * self.kappa_e).sqrt()
    }
}

/// Zero-point displacement √(ħ/(2mω_m)) in nm.
pub fn zero_point_length_nm(mass: f64, mech_freq: f64) -> f64 {
    (HBAR / (2.0 * mass * mech_freq)).sqrt() * 1.0e9
}

pub fn derive_params(p: &PhysicalParams) -> Result<DerivedParams, ParamError> {
    p.validate()?;

    let omega_l = TWO_PI * C_LIGHT / (p.wavelength_laser * 1.0e-9);
    let omega_m = p.mech_freq;
    let gamma_m = omega_m / p.quality_factor;
    let kappa_e = p.kappa_e_ratio * omega_m;
    let kappa_om = p.kappa_om_slope * zero_point_length_nm(p.mass, p.mech_freq);
    let eps_l = (p.pump_power / (HBAR * omega_l)).sqrt();
    let eps_tilde = (2.0 * kappa_e).sqrt() * eps_l;

    let (sinh_r, cosh_r) = (p.squeeze_r.sinh(), p.squeeze_r.cosh());
    Ok(DerivedParams {
        omega_l,
        omega_m,
        gamma_m,
        kappa_e,
        kappa_om,
        eta: kappa_om / kappa_e,
        eps_l,
        eps_tilde,
        big_gamma: p.bandwidth_ratio * kappa_e,
        n_sq: sinh_r * sinh_r,
        m_sq: Complex64::from_polar(sinh_r * cosh_r, p.squeeze_phi),
        temperature: p.temperature,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn zero_drive_gives_zero_amplitudes() {
        let p = PhysicalParams {
            pump_power: 0.0,
            ..PhysicalParams::reference()
        };
        let d = derive_params(&p).unwrap();
        assert_eq!(d.eps_l, 0.0);
        assert_eq!(d.eps_tilde, 0.0);
    }

    #[test]
    fn laser_frequency_from_wavelength() {
        let d = derive_params(&PhysicalParams::reference()).unwrap();
        // 2π · 299792458 / 1564.25e-9
        assert_relative_eq!(d.omega_l, 1.204_188_312_168e15, max_relative = 1e-11);
        assert_relative_eq!(d.omega_l, 1.2042e15, max_relative = 1e-4);
    }

    #[test]
    fn reactive_coupling_scaled_by_zero_point_length() {
        let d = derive_params(&PhysicalParams::reference()).unwrap();
        // x_zp = sqrt(1.054571817e-34 / (2 · 2e-15 · 2π · 25.45e6)) = 1.2841e-14 m
        assert_relative_eq!(d.kappa_om, -2.146_03e3, max_relative = 1e-5);
        assert_relative_eq!(d.eta, -2.684_10e-4, max_relative = 1e-5);
        assert!(d.eta < 0.0);
    }

    #[test]
    fn squeezing_moments_for_unit_r() {
        let d = derive_params(&PhysicalParams::reference()).unwrap();
        assert_relative_eq!(d.n_sq, 1.381_097_845_541_815_7, max_relative = 1e-12);
        assert_relative_eq!(d.m_sq.re, 1.813_430_203_923_509_4, max_relative = 1e-12);
        assert_eq!(d.m_sq.im, 0.0);
    }

    #[test]
    fn rejects_dispersive_coupling() {
        let p = PhysicalParams {
            dispersive_g: 1.0,
            ..PhysicalParams::reference()
        };
        let err = derive_params(&p).unwrap_err();
        assert!(err.to_string().contains("dispersive coupling unsupported"));
    }

    #[test]
    fn rejects_nonpositive_mass_and_frequency() {
        let p = PhysicalParams {
            mass: 0.0,
            ..PhysicalParams::reference()
        };
        assert_eq!(
            derive_params(&p).unwrap_err(),
            ParamError::NonPositive {
                field: "mass",
                value: 0.0
            }
        );
        let p = PhysicalParams {
            mech_freq: -1.0,
            ..PhysicalParams::reference()
        };
        assert!(derive_params(&p).unwrap_err().to_string().contains("mech_freq"));
    }

    #[test]
    fn rejects_negative_power() {
        let p = PhysicalParams {
            pump_power: -1e-6,
            ..PhysicalParams::reference()
        };
        assert!(matches!(
            derive_params(&p),
            Err(ParamError::Negative {
                field: "pump_power",
                ..
            })
        ));
    }

    proptest! {
        #[test]
        fn minimum_uncertainty_squeezed_vacuum(r in 0.0f64..3.0, phi in -6.3f64..6.3) {
            let p = PhysicalParams { squeeze_r: r, squeeze_phi: phi, ..PhysicalParams::reference() };
            let d = derive_params(&p).unwrap();
            let lhs = d.m_sq.norm_sqr();
            let rhs = d.n_sq * (d.n_sq + 1.0);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
        }

        #[test]
        fn drive_amplitude_identity(power in 0.0f64..1e-3, lambda in 500.0f64..2000.0) {
            let p = PhysicalParams { pump_power: power, wavelength_laser: lambda, ..PhysicalParams::reference() };
            let d = derive_params(&p).unwrap();
            let expected = 2.0 * d.kappa_e * power / (HBAR * d.omega_l);
            prop_assert!((d.eps_tilde.powi(2) - expected).abs() <= 1e-12 * expected.max(f64::MIN_POSITIVE));
        }

        #[test]
        fn derivation_is_pure(power in 0.0f64..1e-3, r in 0.0f64..2.0) {
            let p = PhysicalParams { pump_power: power, squeeze_r: r, ..PhysicalParams::reference() };
            prop_assert_eq!(derive_params(&p).unwrap(), derive_params(&p).unwrap());
        }
    }
}
