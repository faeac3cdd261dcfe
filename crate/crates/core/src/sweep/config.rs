//! Run configuration file: TOML with `[physical]`, `[quadrature]` and
//! `[sweep]` sections. Unknown keys are rejected. Physical values use the
//! figure units (nm, μW, pg, 2π × MHz, mK).
//!
//! ```toml
//! [physical]
//! pump_power_uw = 20.0
//! detuning_mhz = 25.45
//! temperature_mk = 1.0
//!
//! [quadrature]
//! cutoff_factor = 20.0
//!
//! [sweep]
//! axis = "detuning"
//! start = 0.0
//! stop = 50.9
//! points = 400
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Axis, Quantity, SweepSpec};
use crate::constants::RAD_PER_S_PER_MHZ;
use crate::params::PhysicalParams;
use crate::variance::QuadratureConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid configuration: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("configuration has no [sweep] section and no axis was given")]
    MissingSweep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicalSection {
    pub wavelength_nm: f64,
    pub pump_power_uw: f64,
    pub mass_pg: f64,
    pub mech_freq_mhz: f64,
    pub quality_factor: f64,
    pub kappa_e_ratio: f64,
    pub kappa_om_slope_mhz_per_nm: f64,
    /// Defaults to the mechanical frequency.
    pub detuning_mhz: Option<f64>,
    pub squeeze_r: f64,
    pub squeeze_phi: f64,
    pub bandwidth_ratio: f64,
    pub temperature_mk: f64,
    pub dispersive_g: f64,
}

impl Default for PhysicalSection {
    fn default() -> Self {
        Self::from_params(&PhysicalParams::reference())
    }
}

impl PhysicalSection {
    pub fn from_params(p: &PhysicalParams) -> Self {
        Self {
            wavelength_nm: p.wavelength_laser,
            pump_power_uw: p.pump_power * 1.0e6,
            mass_pg: p.mass * 1.0e15,
            mech_freq_mhz: p.mech_freq / RAD_PER_S_PER_MHZ,
            quality_factor: p.quality_factor,
            kappa_e_ratio: p.kappa_e_ratio,
            kappa_om_slope_mhz_per_nm: p.kappa_om_slope / RAD_PER_S_PER_MHZ,
            detuning_mhz: Some(p.detuning / RAD_PER_S_PER_MHZ),
            squeeze_r: p.squeeze_r,
            squeeze_phi: p.squeeze_phi,
            bandwidth_ratio: p.bandwidth_ratio,
            temperature_mk: p.temperature * 1.0e3,
            dispersive_g: p.dispersive_g,
        }
    }

    pub fn to_params(&self) -> PhysicalParams {
        let mech_freq = self.mech_freq_mhz * RAD_PER_S_PER_MHZ;
        PhysicalParams {
            wavelength_laser: self.wavelength_nm,
            pump_power: self.pump_power_uw * 1.0e-6,
            mass: self.mass_pg * 1.0e-15,
            mech_freq,
            quality_factor: self.quality_factor,
            kappa_e_ratio: self.kappa_e_ratio,
            kappa_om_slope: self.kappa_om_slope_mhz_per_nm * RAD_PER_S_PER_MHZ,
            detuning: self.detuning_mhz.map_or(mech_freq, |v| v * RAD_PER_S_PER_MHZ),
            squeeze_r: self.squeeze_r,
            squeeze_phi: self.squeeze_phi,
            bandwidth_ratio: self.bandwidth_ratio,
            temperature: self.temperature_mk * 1.0e-3,
            dispersive_g: self.dispersive_g,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default = "default_quantity")]
    pub quantity: Quantity,
}

fn default_quantity() -> Quantity {
    Quantity::MomentumVariance
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub physical: PhysicalSection,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    pub sweep: Option<SweepSection>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec, ConfigError> {
        let s = self.sweep.as_ref().ok_or(ConfigError::MissingSweep)?;
        Ok(SweepSpec {
            axis: s.axis,
            start: s.start,
            stop: s.stop,
            points: s.points,
            fixed: self.physical.to_params(),
            quantity: s.quantity,
        })
    }
}
