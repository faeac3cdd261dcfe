//! Stationary noise densities, written exactly as they appear inside the
//! frequency integrals of the variance (the 2π/δ-function bookkeeping lives
//! in [`crate::variance`]).

use num_complex::Complex64;

use crate::constants::{HBAR, K_B};
use crate::params::DerivedParams;

/// Beyond this |ħω/2k_BT|, coth is ±1 to double precision.
pub const COTH_SATURATION: f64 = 30.0;

/// Squeezed vacuum with a Lorentzian spectrum centred one mechanical
/// frequency above the laser.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedBath {
    pub n_sq: f64,
    pub m_sq: Complex64,
    pub big_gamma: f64,
    pub center: f64,
}

impl SqueezedBath {
    pub fn from_params(d: &DerivedParams) -> Self {
        Self {
            n_sq: d.n_sq,
            m_sq: d.m_sq,
            big_gamma: d.big_gamma,
            center: d.omega_m,
        }
    }

    /// Γ²/(Γ² + ν²), with ν measured from the centre.
    pub fn lorentz_weight(&self, nu: f64) -> f64 {
        let g2 = self.big_gamma * self.big_gamma;
        g2 / (g2 + nu * nu)
    }

    /// ⟨c_in c_in⟩ density: M Γ²/(Γ² + ν²).
    pub fn squeezed_correlator_mm(&self, nu: f64) -> Complex64 {
        self.m_sq * self.lorentz_weight(nu)
    }

    /// Normally ordered ⟨c_in† c_in⟩ density: N Γ²/(Γ² + ν²).
    pub fn occupation(&self, nu: f64) -> f64 {
        self.n_sq * self.lorentz_weight(nu)
    }
}

/// Quantum Brownian bath of the mechanical mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalBath {
    pub gamma_m: f64,
    pub omega_m: f64,
    pub temperature: f64,
}

impl ThermalBath {
    pub fn from_params(d: &DerivedParams) -> Self {
        Self {
            gamma_m: d.gamma_m,
            omega_m: d.omega_m,
            temperature: d.temperature,
        }
    }

    /// S_ξ(ω) = 2γ_m (ω/ω_m) [1 + coth(ħω/2k_BT)].
    pub fn thermal_density(&self, omega: f64) -> f64 {
        let scale = 2.0 * self.gamma_m / self.omega_m;
        if self.temperature <= 0.0 {
            return if omega > 0.0 { 2.0 * scale * omega } else { 0.0 };
        }
        if omega == 0.0 {
            // lim ω coth(ħω/2k_BT) = 2k_BT/ħ
            return scale * 2.0 * K_B * self.temperature / HBAR;
        }
        let x = HBAR * omega / (2.0 * K_B * self.temperature);
        let coth = if x.abs() > COTH_SATURATION {
            x.signum()
        } else {
            1.0 / x.tanh()
        };
        scale * omega * (1.0 + coth)
    }
}

pub fn lorentz_weight(b: &SqueezedBath, nu: f64) -> f64 {
    b.lorentz_weight(nu)
}

pub fn thermal_density(b: &ThermalBath, omega: f64) -> f64 {
    b.thermal_density(omega)
}

pub fn squeezed_correlator_mm(b: &SqueezedBath, nu: f64) -> Complex64 {
    b.squeezed_correlator_mm(nu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::TWO_PI;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn bath(r: f64, phi: f64) -> SqueezedBath {
        SqueezedBath {
            n_sq: r.sinh().powi(2),
            m_sq: Complex64::from_polar(r.sinh() * r.cosh(), phi),
            big_gamma: 2.0e7,
            center: TWO_PI * 25.45e6,
        }
    }

    fn thermal(t: f64) -> ThermalBath {
        let omega_m = TWO_PI * 25.45e6;
        ThermalBath {
            gamma_m: omega_m / 5000.0,
            omega_m,
            temperature: t,
        }
    }

    #[test]
    fn lorentzian_weights() {
        let b = bath(1.0, 0.0);
        assert_eq!(lorentz_weight(&b, 0.0), 1.0);
        assert_relative_eq!(lorentz_weight(&b, b.big_gamma), 0.5, max_relative = 1e-15);
        assert_relative_eq!(lorentz_weight(&b, 3.0 * b.big_gamma), 0.1, max_relative = 1e-15);
    }

    #[test]
    fn squeezed_correlator_values() {
        assert_eq!(squeezed_correlator_mm(&bath(0.0, 0.0), 1e6), Complex64::new(0.0, 0.0));
        let v = squeezed_correlator_mm(&bath(1.0, 0.0), 0.0);
        assert_relative_eq!(v.re, 1.813_430_203_923_509_4, max_relative = 1e-14);
        assert_eq!(v.im, 0.0);
        let v = squeezed_correlator_mm(&bath(1.0, std::f64::consts::PI), 0.0);
        assert_relative_eq!(v.re, -1.813_430_203_923_509_4, max_relative = 1e-14);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn zero_temperature_absorbs_nothing() {
        let b = thermal(0.0);
        assert_eq!(thermal_density(&b, -b.omega_m), 0.0);
        assert_relative_eq!(thermal_density(&b, b.omega_m), 4.0 * b.gamma_m, max_relative = 1e-15);
    }

    #[test]
    fn zero_frequency_limit() {
        let b = thermal(1e-3);
        let expected = 4.0 * b.gamma_m * K_B * 1e-3 / (HBAR * b.omega_m);
        assert_relative_eq!(thermal_density(&b, 0.0), expected, max_relative = 1e-15);
        // approaches the same limit continuously
        assert_relative_eq!(thermal_density(&b, 1e-3), expected, max_relative = 1e-6);
    }

    #[test]
    fn one_millikelvin_at_resonance() {
        let b = thermal(1e-3);
        let x = HBAR * b.omega_m / (2.0 * K_B * 1e-3);
        assert_relative_eq!(x, 0.610_703_680_711_661_8, max_relative = 1e-12);
        let got = thermal_density(&b, b.omega_m) / (2.0 * b.gamma_m);
        assert_relative_eq!(got, 1.0 + 1.0 / x.tanh(), max_relative = 1e-15);
        assert_relative_eq!(got, 1.0 + COTH_AT_X, max_relative = 1e-9);
    }

    // coth(ħω_m / 2k_B·1 mK) evaluated with 40-digit arithmetic.
    const COTH_AT_X: f64 = 1.836_135_052_231_292;

    #[test]
    fn saturates_without_overflow() {
        let b = thermal(1e-9);
        let v = thermal_density(&b, 50.0 * b.omega_m);
        assert!(v.is_finite());
        assert_relative_eq!(v, 4.0 * b.gamma_m * 50.0, max_relative = 1e-15);
        assert_eq!(thermal_density(&b, -50.0 * b.omega_m), 0.0);
    }

    proptest! {
        #[test]
        fn antisymmetric_part_is_temperature_independent(w in -20.0f64..20.0, t in 0.0f64..0.2) {
            let b = thermal(t);
            let omega = w * b.omega_m;
            let diff = thermal_density(&b, omega) - thermal_density(&b, -omega);
            let expected = 4.0 * b.gamma_m * omega / b.omega_m;
            prop_assert!((diff - expected).abs() <= 1e-9 * (thermal_density(&b, omega).abs() + expected.abs() + 1e-300));
        }

        #[test]
        fn monotone_in_temperature(w in -20.0f64..20.0, t1 in 0.0f64..0.2, dt in 0.0f64..0.2) {
            let omega = w * thermal(0.0).omega_m;
            prop_assert!(thermal_density(&thermal(t1), omega) <= thermal_density(&thermal(t1 + dt), omega) * (1.0 + 1e-14));
        }
    }
}
