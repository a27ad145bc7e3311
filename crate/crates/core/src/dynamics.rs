// SPDX-License-Identifier: Apache-2.0

//! Mean-field equations and the Lyapunov equation for the covariance,
//! co-integrated with classical fixed-step RK4.

use nalgebra::Matrix6;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{diffusion_matrix, drift_matrix, dynamic_detunings};
use crate::params::DerivedParams;
use crate::state::{CovMatrix, MeanState, PACKED_LEN};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Largest admissible `dt` in units of the fastest linear timescale.
pub const DT_GUARD: f64 = 0.05;
/// Default `dt` in units of the fastest linear timescale.
pub const DT_DEFAULT: f64 = 0.02;
/// Any state component beyond this magnitude aborts the integration.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryConfig {
    pub t_end: f64,
    pub dt: f64,
    pub sample_every: usize,
    pub initial_mean: MeanState,
    pub initial_cov: CovMatrix,
}

impl TrajectoryConfig {
    /// Empty cavities, resonator at rest, thermal mechanics and cavity vacua,
    /// default step.
    pub fn from_rest(d: &DerivedParams, t_end: f64, sample_every: usize) -> Self {
        TrajectoryConfig {
            t_end,
            dt: default_dt(d),
            sample_every,
            initial_mean: MeanState::default(),
            initial_cov: CovMatrix::thermal_vacuum(d.nbar),
        }
    }

    pub fn validate(&self, d: &DerivedParams) -> Result<()> {
        if !(self.dt > 0.0 && self.dt < self.t_end && self.t_end.is_finite()) {
            return Err(Error::invalid(
                "trajectory",
                format!(
                    "need 0 < dt < t_end, got dt = {} and t_end = {}",
                    self.dt, self.t_end
                ),
            ));
        }
        if self.sample_every == 0 {
            return Err(Error::invalid("trajectory", "sample_every must be >= 1"));
        }
        let max_dt = max_dt(d);
        if self.dt > max_dt {
            return Err(Error::invalid(
                "trajectory",
                format!(
                    "dt = {:e} exceeds the resolution guard {:e}",
                    self.dt, max_dt
                ),
            ));
        }
        if !self.initial_mean.is_finite() || !self.initial_cov.is_finite() {
            return Err(Error::invalid("trajectory", "initial state must be finite"));
        }
        Ok(())
    }
}

pub fn default_dt(d: &DerivedParams) -> f64 {
    DT_DEFAULT / d.fastest_rate()
}

pub fn max_dt(d: &DerivedParams) -> f64 {
    DT_GUARD / d.fastest_rate()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub mean: MeanState,
    pub cov: CovMatrix,
}

/// Noise-free mean-field vector field. The result is packed as a
/// `MeanState` holding `(dq/dt, dp/dt, da_L/dt, da_R/dt)`.
pub fn mean_field_rhs(d: &DerivedParams, s: &MeanState) -> MeanState {
    let (delta_l, delta_r) = dynamic_detunings(d, s);
    let dq = d.omega_m * s.p;
    let dp = -d.omega_m * s.q - d.gamma_m * s.p - SQRT_2 * d.g0_l * s.alpha_l.norm_sqr()
        + SQRT_2 * d.g0_r * s.alpha_r.norm_sqr();
    let dal = -Complex64::new(d.kappa_l, delta_l) * s.alpha_l + d.eps_l;
    let dar = -Complex64::new(d.kappa_r, delta_r) * s.alpha_r + d.eps_r;
    MeanState {
        q: dq,
        p: dp,
        alpha_l: dal,
        alpha_r: dar,
    }
}

/// `A V + V A^T + D`, symmetrized.
pub fn covariance_rhs(a: &Matrix6<f64>, v: &Matrix6<f64>, diff: &Matrix6<f64>) -> Matrix6<f64> {
    let m = a * v + v * a.transpose() + diff;
    (m + m.transpose()) * 0.5
}

const STATE_LEN: usize = 6 + PACKED_LEN;
type State = [f64; STATE_LEN];

fn pack(mean: &MeanState, cov: &CovMatrix) -> State {
    let mut s = [0.0; STATE_LEN];
    s[..6].copy_from_slice(&mean.to_array());
    s[6..].copy_from_slice(&cov.pack());
    s
}

fn unpack(s: &State) -> (MeanState, CovMatrix) {
    let mut m = [0.0; 6];
    m.copy_from_slice(&s[..6]);
    (MeanState::from_array(&m), CovMatrix::unpack(&s[6..]))
}

fn stacked_rhs(d: &DerivedParams, diff: &Matrix6<f64>, s: &State) -> State {
    let (mean, cov) = unpack(s);
    let dm = mean_field_rhs(d, &mean);
    let a = drift_matrix(d, &mean);
    // V is exactly symmetric here, so V A^T = (A V)^T.
    let av = a * cov.0;
    let mut out = [0.0; STATE_LEN];
    out[..6].copy_from_slice(&dm.to_array());
    let mut k = 6;
    for i in 0..6 {
        for j in i..6 {
            out[k] = av[(i, j)] + av[(j, i)] + diff[(i, j)];
            k += 1;
        }
    }
    out
}

fn axpy(y: &State, h: f64, k: &State) -> State {
    let mut out = *y;
    for (o, kk) in out.iter_mut().zip(k.iter()) {
        *o += h * kk;
    }
    out
}

fn rk4_step(d: &DerivedParams, diff: &Matrix6<f64>, y: &State, h: f64) -> State {
    let k1 = stacked_rhs(d, diff, y);
    let k2 = stacked_rhs(d, diff, &axpy(y, 0.5 * h, &k1));
    let k3 = stacked_rhs(d, diff, &axpy(y, 0.5 * h, &k2));
    let k4 = stacked_rhs(d, diff, &axpy(y, h, &k3));
    let mut out = *y;
    for i in 0..STATE_LEN {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Number of RK4 steps needed to reach `t_end`.
pub fn step_count(cfg: &TrajectoryConfig) -> usize {
    ((cfg.t_end / cfg.dt) * (1.0 - 1e-12)).ceil() as usize
}

/// Integrates from `cfg.initial_*`, recording `t = 0`, every
/// `sample_every`-th step, and the final step.
pub fn integrate(d: &DerivedParams, cfg: &TrajectoryConfig) -> Result<Vec<TrajectorySample>> {
    d.validate()?;
    cfg.validate(d)?;
    let diff = diffusion_matrix(d);
    let n = step_count(cfg);
    let mut out = Vec::with_capacity(n / cfg.sample_every + 2);
    let mut y = pack(
        &cfg.initial_mean,
        &CovMatrix::symmetrized(&cfg.initial_cov.0),
    );
    let record = |y: &State, t: f64, out: &mut Vec<TrajectorySample>| {
        let (mean, cov) = unpack(y);
        out.push(TrajectorySample { t, mean, cov });
    };
    record(&y, 0.0, &mut out);
    for step in 1..=n {
        y = rk4_step(d, &diff, &y, cfg.dt);
        let t = step as f64 * cfg.dt;
        if let Some(bad) = y
            .iter()
            .position(|v| !v.is_finite() || v.abs() > DIVERGENCE_LIMIT)
        {
            let reason = if y[bad].is_finite() {
                format!("state component {bad} reached {:e}", y[bad])
            } else {
                format!("state component {bad} is not finite")
            };
            return Err(Error::Divergence { t, reason });
        }
        if step % cfg.sample_every == 0 || step == n {
            record(&y, t, &mut out);
        }
    }
    Ok(out)
}
