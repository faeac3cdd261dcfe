//! CODATA 2018 exact/recommended values, SI units.

/// Reduced Planck constant ħ in J·s (h = 6.626 070 15 × 10⁻³⁴ J·s exactly, divided by 2π).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant in J/K (exact).
pub const K_B: f64 = 1.380_649e-23;

/// Speed of light in vacuum in m/s (exact).
pub const C_LIGHT: f64 = 299_792_458.0;

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// One "2π × MHz" unit expressed in rad/s.
pub const RAD_PER_S_PER_MHZ: f64 = TWO_PI * 1.0e6;
