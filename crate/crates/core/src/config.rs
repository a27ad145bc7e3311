// SPDX-License-Identifier: Apache-2.0

//! Scenario description and its flat `key = value` configuration format.
//!
//! ```text
//! # comment
//! left.length_m = 0.022
//! left.detuning = 6.5      # multiples of the mechanical frequency
//! drive.mode = both
//! ```
//!
//! Sweeps may also address `both.<field>` to set a cavity field on both sides.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::{default_dt, TrajectoryConfig};
use crate::entanglement::TransferCriteria;
use crate::error::{Error, Result};
use crate::params::{
    CavityParams, DerivedParams, FrequencyConvention, MechanicalParams, PhysicalParams,
};
use crate::state::{CovMatrix, MeanState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriveMode {
    Both,
    LeftOnly,
    RightOnly,
}

impl DriveMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DriveMode::Both => "both",
            DriveMode::LeftOnly => "left_only",
            DriveMode::RightOnly => "right_only",
        }
    }
}

impl FromStr for DriveMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "both" => Ok(DriveMode::Both),
            "left_only" => Ok(DriveMode::LeftOnly),
            "right_only" => Ok(DriveMode::RightOnly),
            _ => Err(format!("expected both, left_only or right_only, got `{s}`")),
        }
    }
}

/// One optical cavity as written in a configuration file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavitySpec {
    pub length_m: f64,
    pub finesse: f64,
    pub wavelength_m: f64,
    pub power_w: f64,
    /// Static detuning in multiples of the mechanical frequency.
    pub detuning: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimSettings {
    pub t_end_s: f64,
    /// Integrator step, s; 0 selects the default step.
    pub dt_s: f64,
    pub sample_every: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSettings {
    pub eps_on: f64,
    /// Hold window in mechanical periods.
    pub hold_periods: f64,
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        AnalysisSettings {
            eps_on: TransferCriteria::DEFAULT_EPS_ON,
            hold_periods: TransferCriteria::DEFAULT_HOLD_PERIODS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub left: CavitySpec,
    pub right: CavitySpec,
    pub mechanical: MechanicalParams,
    pub convention: FrequencyConvention,
    pub sim: SimSettings,
    pub drive_mode: DriveMode,
    pub analysis: AnalysisSettings,
}

/// Keys every configuration must define.
pub const REQUIRED_KEYS: &[&str] = &[
    "left.length_m",
    "left.finesse",
    "left.wavelength_m",
    "left.power_W",
    "left.detuning",
    "right.length_m",
    "right.finesse",
    "right.wavelength_m",
    "right.power_W",
    "right.detuning",
    "mech.mass_kg",
    "mech.freq",
    "mech.Q",
    "mech.temperature_K",
    "sim.t_end_s",
    "sim.dt_s",
    "sim.sample_every",
    "convention.frequency",
    "drive.mode",
];

/// Keys that may be omitted.
pub const OPTIONAL_KEYS: &[&str] = &["name", "analysis.eps_on", "analysis.hold_periods"];

const CAVITY_FIELDS: &[&str] = &["length_m", "finesse", "wavelength_m", "power_W", "detuning"];

fn parse_f64(raw: &str) -> std::result::Result<f64, String> {
    let v: f64 = raw
        .parse()
        .map_err(|_| format!("`{raw}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{raw}` is not finite"))
    }
}

fn positive(raw: &str) -> std::result::Result<f64, String> {
    let v = parse_f64(raw)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be > 0, got {v}"))
    }
}

fn non_negative(raw: &str) -> std::result::Result<f64, String> {
    let v = parse_f64(raw)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("must be >= 0, got {v}"))
    }
}

fn set_cavity(c: &mut CavitySpec, field: &str, raw: &str) -> std::result::Result<(), String> {
    match field {
        "length_m" => c.length_m = positive(raw)?,
        "finesse" => c.finesse = positive(raw)?,
        "wavelength_m" => c.wavelength_m = positive(raw)?,
        "power_W" => c.power_w = non_negative(raw)?,
        "detuning" => c.detuning = parse_f64(raw)?,
        _ => return Err("unknown key".into()),
    }
    Ok(())
}

fn placeholder_cavity() -> CavitySpec {
    CavitySpec {
        length_m: f64::NAN,
        finesse: f64::NAN,
        wavelength_m: f64::NAN,
        power_w: f64::NAN,
        detuning: f64::NAN,
    }
}

impl Scenario {
    fn placeholder(name: &str) -> Self {
        Scenario {
            name: name.to_string(),
            left: placeholder_cavity(),
            right: placeholder_cavity(),
            mechanical: MechanicalParams {
                mass: f64::NAN,
                frequency: f64::NAN,
                quality_factor: f64::NAN,
                bath_temperature: f64::NAN,
            },
            convention: FrequencyConvention::default(),
            sim: SimSettings {
                t_end_s: f64::NAN,
                dt_s: f64::NAN,
                sample_every: 0,
            },
            drive_mode: DriveMode::Both,
            analysis: AnalysisSettings::default(),
        }
    }

    /// Whether `key` names a setting (including `both.*` aliases).
    pub fn is_known_key(key: &str) -> bool {
        REQUIRED_KEYS.contains(&key)
            || OPTIONAL_KEYS.contains(&key)
            || key
                .strip_prefix("both.")
                .is_some_and(|f| CAVITY_FIELDS.contains(&f))
    }

    /// Whether `key` takes a real number (and so can be swept).
    pub fn is_numeric_key(key: &str) -> bool {
        Self::is_known_key(key)
            && !matches!(
                key,
                "name" | "convention.frequency" | "drive.mode" | "sim.sample_every"
            )
    }

    /// Sets one configuration key from its textual value. The error string
    /// explains what was wrong with the value.
    pub fn set(&mut self, key: &str, raw: &str) -> std::result::Result<(), String> {
        let raw = raw.trim();
        if let Some(field) = key.strip_prefix("left.") {
            return set_cavity(&mut self.left, field, raw);
        }
        if let Some(field) = key.strip_prefix("right.") {
            return set_cavity(&mut self.right, field, raw);
        }
        if let Some(field) = key.strip_prefix("both.") {
            set_cavity(&mut self.left, field, raw)?;
            return set_cavity(&mut self.right, field, raw);
        }
        match key {
            "name" => {
                if raw.is_empty() {
                    return Err("name must not be empty".into());
                }
                self.name = raw.to_string();
            }
            "mech.mass_kg" => self.mechanical.mass = positive(raw)?,
            "mech.freq" => self.mechanical.frequency = positive(raw)?,
            "mech.Q" => self.mechanical.quality_factor = positive(raw)?,
            "mech.temperature_K" => self.mechanical.bath_temperature = non_negative(raw)?,
            "sim.t_end_s" => self.sim.t_end_s = positive(raw)?,
            "sim.dt_s" => self.sim.dt_s = non_negative(raw)?,
            "sim.sample_every" => {
                let n: usize = raw
                    .parse()
                    .map_err(|_| format!("`{raw}` is not a positive integer"))?;
                if n == 0 {
                    return Err("must be >= 1".into());
                }
                self.sim.sample_every = n;
            }
            "convention.frequency" => {
                self.convention = match raw {
                    "ordinary" => FrequencyConvention::Ordinary,
                    "angular" => FrequencyConvention::Angular,
                    _ => return Err(format!("expected ordinary or angular, got `{raw}`")),
                }
            }
            "drive.mode" => self.drive_mode = raw.parse()?,
            "analysis.eps_on" => self.analysis.eps_on = positive(raw)?,
            "analysis.hold_periods" => self.analysis.hold_periods = positive(raw)?,
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    /// Physical parameters with the drive mode applied (the undriven side
    /// gets zero power) and detunings converted to the frequency convention.
    pub fn physical_params(&self) -> PhysicalParams {
        let cavity = |c: &CavitySpec, driven: bool| CavityParams {
            length: c.length_m,
            finesse: c.finesse,
            wavelength: c.wavelength_m,
            drive_power: if driven { c.power_w } else { 0.0 },
            drive_detuning: c.detuning * self.mechanical.frequency,
        };
        PhysicalParams {
            left: cavity(&self.left, self.drive_mode != DriveMode::RightOnly),
            right: cavity(&self.right, self.drive_mode != DriveMode::LeftOnly),
            mechanical: self.mechanical,
            frequency_convention: self.convention,
        }
    }

    /// Trajectory from rest, with the default step when `sim.dt_s = 0`.
    pub fn trajectory_config(&self, d: &DerivedParams) -> TrajectoryConfig {
        TrajectoryConfig {
            t_end: self.sim.t_end_s,
            dt: if self.sim.dt_s == 0.0 {
                default_dt(d)
            } else {
                self.sim.dt_s
            },
            sample_every: self.sim.sample_every,
            initial_mean: MeanState::default(),
            initial_cov: CovMatrix::thermal_vacuum(d.nbar),
        }
    }

    pub fn transfer_criteria(&self, d: &DerivedParams) -> TransferCriteria {
        let period = d.mechanical_period();
        TransferCriteria {
            eps_on: self.analysis.eps_on,
            hold_window: self.analysis.hold_periods * period,
            envelope_period: period,
        }
    }

    /// The configuration as `key = value` lines, readable by [`parse_config`].
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
        line("name", self.name.clone());
        for (side, c) in [("left", &self.left), ("right", &self.right)] {
            line(&format!("{side}.length_m"), format!("{:e}", c.length_m));
            line(&format!("{side}.finesse"), format!("{:e}", c.finesse));
            line(
                &format!("{side}.wavelength_m"),
                format!("{:e}", c.wavelength_m),
            );
            line(&format!("{side}.power_W"), format!("{:e}", c.power_w));
            line(&format!("{side}.detuning"), format!("{:e}", c.detuning));
        }
        line("mech.mass_kg", format!("{:e}", self.mechanical.mass));
        line("mech.freq", format!("{:e}", self.mechanical.frequency));
        line("mech.Q", format!("{:e}", self.mechanical.quality_factor));
        line(
            "mech.temperature_K",
            format!("{:e}", self.mechanical.bath_temperature),
        );
        line("sim.t_end_s", format!("{:e}", self.sim.t_end_s));
        line("sim.dt_s", format!("{:e}", self.sim.dt_s));
        line("sim.sample_every", self.sim.sample_every.to_string());
        line("convention.frequency", self.convention.as_str().to_string());
        line("drive.mode", self.drive_mode.as_str().to_string());
        line("analysis.eps_on", format!("{:e}", self.analysis.eps_on));
        line(
            "analysis.hold_periods",
            format!("{:e}", self.analysis.hold_periods),
        );
        out
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_config_string())
    }
}

/// Parses configuration text. `default_name` is used when the text has no
/// `name` key.
pub fn parse_config(text: &str, default_name: &str) -> Result<Scenario> {
    let mut s = Scenario::placeholder(default_name);
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config {
                key: line.to_string(),
                line: line_no,
                reason: "expected `key = value`".into(),
            });
        };
        let key = key.trim();
        if !Scenario::is_known_key(key) || key.starts_with("both.") {
            return Err(Error::Config {
                key: key.to_string(),
                line: line_no,
                reason: "unknown key".into(),
            });
        }
        if let Some(prev) = seen.insert(key.to_string(), line_no) {
            return Err(Error::Config {
                key: key.to_string(),
                line: line_no,
                reason: format!("duplicate key (first set on line {prev})"),
            });
        }
        s.set(key, value).map_err(|reason| Error::Config {
            key: key.to_string(),
            line: line_no,
            reason,
        })?;
    }
    if let Some(missing) = REQUIRED_KEYS.iter().find(|k| !seen.contains_key(**k)) {
        return Err(Error::MissingKey(missing.to_string()));
    }
    Ok(s)
}

pub fn load_config(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("scenario");
    parse_config(&text, stem)
}

/// Shipped scenario presets: `(cli name, file contents)`.
pub const PRESETS: &[(&str, &str)] = &[
    ("fig2-sym", include_str!("../presets/fig2_sym.cfg")),
    ("fig2-asym", include_str!("../presets/fig2_asym.cfg")),
    (
        "fig2-left-only",
        include_str!("../presets/fig2_left_only.cfg"),
    ),
    ("fig3", include_str!("../presets/fig3.cfg")),
];

pub fn preset(name: &str) -> Result<Scenario> {
    let (_, text) = PRESETS.iter().find(|(n, _)| *n == name).ok_or_else(|| {
        let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
        Error::Usage(format!(
            "unknown scenario `{name}` (available: {})",
            names.join(", ")
        ))
    })?;
    parse_config(text, name)
}
