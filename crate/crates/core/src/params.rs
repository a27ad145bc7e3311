// SPDX-License-Identifier: Apache-2.0

//! Laboratory parameters and the rates derived from them.
//!
//! Everything downstream works with [`DerivedParams`], whose entries are all
//! angular rates (rad/s) except the thermal occupation. Mechanical
//! quadratures are dimensionless (`q = x / sqrt(hbar / m Omega_M)`), so the
//! radiation-pressure coupling appears as the single-photon rate `g0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;
/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// How numeric frequency inputs (mechanical frequency, detunings) are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrequencyConvention {
    /// Inputs are in Hz and get multiplied by 2 pi.
    #[default]
    Ordinary,
    /// Inputs are already angular (rad/s).
    Angular,
}

impl FrequencyConvention {
    pub fn to_angular(self, value: f64) -> f64 {
        match self {
            FrequencyConvention::Ordinary => 2.0 * std::f64::consts::PI * value,
            FrequencyConvention::Angular => value,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FrequencyConvention::Ordinary => "ordinary",
            FrequencyConvention::Angular => "angular",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    /// Cavity length, m.
    pub length: f64,
    pub finesse: f64,
    /// Cavity-mode wavelength, m.
    pub wavelength: f64,
    /// Drive power, W.
    pub drive_power: f64,
    /// Static detuning `omega_cavity - omega_drive`, in the frequency
    /// convention of the enclosing [`PhysicalParams`].
    pub drive_detuning: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechanicalParams {
    /// Effective mass, kg.
    pub mass: f64,
    /// Mechanical frequency, in the frequency convention of the enclosing
    /// [`PhysicalParams`].
    pub frequency: f64,
    pub quality_factor: f64,
    /// Bath temperature, K.
    pub bath_temperature: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub left: CavityParams,
    pub right: CavityParams,
    pub mechanical: MechanicalParams,
    pub frequency_convention: FrequencyConvention,
}

/// Simulation-facing rates. All rates are angular (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub kappa_l: f64,
    pub kappa_r: f64,
    pub eps_l: f64,
    pub eps_r: f64,
    pub g0_l: f64,
    pub g0_r: f64,
    pub omega_m: f64,
    pub gamma_m: f64,
    pub nbar: f64,
    pub delta0_l: f64,
    pub delta0_r: f64,
}

impl CavityParams {
    fn validate(&self, side: &'static str) -> Result<()> {
        positive(side, "length", self.length)?;
        positive(side, "finesse", self.finesse)?;
        positive(side, "wavelength", self.wavelength)?;
        if !(self.drive_power.is_finite() && self.drive_power >= 0.0) {
            return Err(Error::invalid(
                side,
                format!(
                    "drive power must be finite and >= 0, got {}",
                    self.drive_power
                ),
            ));
        }
        if !self.drive_detuning.is_finite() {
            return Err(Error::invalid(side, "drive detuning must be finite"));
        }
        Ok(())
    }

    /// Amplitude decay rate `pi c / (2 F l)`.
    pub fn kappa(&self) -> f64 {
        std::f64::consts::PI * SPEED_OF_LIGHT / (2.0 * self.finesse * self.length)
    }

    /// Angular frequency of the cavity mode, `2 pi c / lambda`.
    pub fn mode_frequency(&self) -> f64 {
        2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / self.wavelength
    }
}

fn positive(side: &'static str, what: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            side,
            format!("{what} must be finite and > 0, got {v}"),
        ))
    }
}

impl MechanicalParams {
    fn validate(&self) -> Result<()> {
        positive("mechanical", "mass", self.mass)?;
        positive("mechanical", "frequency", self.frequency)?;
        positive("mechanical", "quality factor", self.quality_factor)?;
        if !(self.bath_temperature.is_finite() && self.bath_temperature >= 0.0) {
            return Err(Error::invalid(
                "mechanical",
                format!(
                    "bath temperature must be >= 0, got {}",
                    self.bath_temperature
                ),
            ));
        }
        Ok(())
    }
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        self.left.validate("left")?;
        self.right.validate("right")?;
        self.mechanical.validate()
    }
}

/// Bose occupation of a mode at angular frequency `omega` and temperature `t`.
/// Exactly zero at `t == 0`.
pub fn thermal_occupation(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    let x = HBAR * omega / (BOLTZMANN * temperature);
    1.0 / x.exp_m1()
}

pub fn derive_params(p: &PhysicalParams) -> Result<DerivedParams> {
    p.validate()?;
    let conv = p.frequency_convention;
    let mech = &p.mechanical;
    let omega_m = conv.to_angular(mech.frequency);
    let x_zpf = (HBAR / (2.0 * mech.mass * omega_m)).sqrt();

    let side = |c: &CavityParams| {
        let kappa = c.kappa();
        let omega_c = c.mode_frequency();
        let delta0 = conv.to_angular(c.drive_detuning);
        let omega_drive = omega_c - delta0;
        let eps = (2.0 * kappa * c.drive_power / (HBAR * omega_drive)).sqrt();
        let g0 = omega_c / c.length * x_zpf;
        (kappa, eps, g0, delta0)
    };
    let (kappa_l, eps_l, g0_l, delta0_l) = side(&p.left);
    let (kappa_r, eps_r, g0_r, delta0_r) = side(&p.right);

    Ok(DerivedParams {
        kappa_l,
        kappa_r,
        eps_l,
        eps_r,
        g0_l,
        g0_r,
        omega_m,
        gamma_m: omega_m / mech.quality_factor,
        nbar: thermal_occupation(omega_m, mech.bath_temperature),
        delta0_l,
        delta0_r,
    })
}

impl DerivedParams {
    /// Checks the invariants for directly constructed (e.g. nondimensional)
    /// parameter sets.
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.kappa_l,
            self.kappa_r,
            self.eps_l,
            self.eps_r,
            self.g0_l,
            self.g0_r,
            self.omega_m,
            self.gamma_m,
            self.nbar,
            self.delta0_l,
            self.delta0_r,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("derived", "all rates must be finite"));
        }
        if self.kappa_l <= 0.0 || self.kappa_r <= 0.0 {
            return Err(Error::invalid("derived", "cavity decay rates must be > 0"));
        }
        if self.omega_m <= 0.0 {
            return Err(Error::invalid(
                "derived",
                "mechanical frequency must be > 0",
            ));
        }
        if self.gamma_m < 0.0 || self.nbar < 0.0 {
            return Err(Error::invalid(
                "derived",
                "damping and occupation must be >= 0",
            ));
        }
        Ok(())
    }

    /// The same system seen from the other side: L and R exchange roles.
    pub fn mirrored(&self) -> Self {
        DerivedParams {
            kappa_l: self.kappa_r,
            kappa_r: self.kappa_l,
            eps_l: self.eps_r,
            eps_r: self.eps_l,
            g0_l: self.g0_r,
            g0_r: self.g0_l,
            delta0_l: self.delta0_r,
            delta0_r: self.delta0_l,
            ..*self
        }
    }

    /// Multiplies every rate by `s`; the thermal occupation is unchanged.
    pub fn rescaled(&self, s: f64) -> Self {
        DerivedParams {
            kappa_l: s * self.kappa_l,
            kappa_r: s * self.kappa_r,
            eps_l: s * self.eps_l,
            eps_r: s * self.eps_r,
            g0_l: s * self.g0_l,
            g0_r: s * self.g0_r,
            omega_m: s * self.omega_m,
            gamma_m: s * self.gamma_m,
            nbar: self.nbar,
            delta0_l: s * self.delta0_l,
            delta0_r: s * self.delta0_r,
        }
    }

    /// Fastest linear rate in the problem; used for step-size selection.
    pub fn fastest_rate(&self) -> f64 {
        self.kappa_l
            .max(self.kappa_r)
            .max(self.omega_m)
            .max(self.delta0_l.abs())
            .max(self.delta0_r.abs())
    }

    /// Mechanical period `2 pi / Omega_M`, s.
    pub fn mechanical_period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega_m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cavity(length: f64, finesse: f64) -> CavityParams {
        CavityParams {
            length,
            finesse,
            wavelength: 1064e-9,
            drive_power: 70e-6,
            drive_detuning: 6.5e6,
        }
    }

    fn physical(temperature: f64) -> PhysicalParams {
        PhysicalParams {
            left: cavity(22e-3, 2.6e5),
            right: cavity(22e-3, 2.6e5),
            mechanical: MechanicalParams {
                mass: 10e-12,
                frequency: 1e6,
                quality_factor: 2e4,
                bath_temperature: temperature,
            },
            frequency_convention: FrequencyConvention::Ordinary,
        }
    }

    #[test]
    fn kappa_from_finesse_and_length() {
        let k = cavity(22e-3, 2.6e5).kappa();
        // pi * 2.99792458e8 / (2 * 2.6e5 * 0.022)
        let expected = std::f64::consts::PI * 2.997_924_58e8 / 11_440.0;
        assert!((k - expected).abs() < 1e-9 * expected);
        assert!((k - 8.24e4).abs() / 8.24e4 < 2e-3);
    }

    #[test]
    fn zero_temperature_has_no_phonons() {
        let d = derive_params(&physical(0.0)).unwrap();
        assert_eq!(d.nbar, 0.0);
    }

    #[test]
    fn single_photon_coupling_magnitude() {
        let d = derive_params(&physical(0.0)).unwrap();
        // (2 pi c / 1064 nm) / 22 mm * sqrt(hbar / (2 * 10 ng * 2 pi MHz))
        assert!((d.g0_l - 74.0).abs() < 1.0, "g0 = {}", d.g0_l);
        assert_eq!(d.g0_l, d.g0_r);
    }

    #[test]
    fn drive_strength_matches_power_relation() {
        let p = physical(0.0);
        let d = derive_params(&p).unwrap();
        let omega_d = p.left.mode_frequency() - d.delta0_l;
        let lhs = d.eps_l * d.eps_l;
        let rhs = 2.0 * d.kappa_l * p.left.drive_power / (HBAR * omega_d);
        assert!((lhs - rhs).abs() < 1e-12 * rhs);
    }

    #[test]
    fn frequency_convention_scales_by_two_pi() {
        let mut p = physical(0.0);
        let ord = derive_params(&p).unwrap();
        p.frequency_convention = FrequencyConvention::Angular;
        let ang = derive_params(&p).unwrap();
        assert!((ord.omega_m / ang.omega_m - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!((ord.delta0_l / ang.delta0_l - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        assert_eq!(ang.gamma_m, 1e6 / 2e4);
    }

    #[test]
    fn rejects_invalid_inputs() {
        let mut p = physical(0.0);
        p.left.length = 0.0;
        assert!(derive_params(&p).is_err());
        let mut p = physical(-1.0);
        assert!(derive_params(&p).is_err());
        p = physical(0.0);
        p.right.drive_power = -1e-6;
        assert!(derive_params(&p).is_err());
        p = physical(0.0);
        p.mechanical.mass = -1.0;
        assert!(derive_params(&p).is_err());
        p = physical(0.0);
        p.left.finesse = 0.0;
        assert!(derive_params(&p).is_err());
    }

    #[test]
    fn occupation_increases_with_temperature() {
        let omega = 1e6;
        let mut prev = thermal_occupation(omega, 1e-7);
        for i in 1..200 {
            let t = 1e-7 * 1.1f64.powi(i);
            let n = thermal_occupation(omega, t);
            assert!(n > prev, "not increasing at T = {t}");
            prev = n;
        }
    }
}
