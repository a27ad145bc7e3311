// SPDX-License-Identifier: Apache-2.0

//! Monte Carlo estimate of the fluctuation covariance from sampled noise
//! realizations of the linearized Langevin equations.

use nalgebra::Matrix6;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::dense::{self, Dense};
use super::{fd_jacobian, mean_field_quadrature, RngSeed};
use crate::dynamics::TrajectoryConfig;
use crate::error::{Error, Result};
use crate::params::DerivedParams;
use crate::state::CovMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloEstimate {
    /// Time at which the fluctuations were sampled, s.
    pub t: f64,
    pub cov: CovMatrix,
    /// Standard error of each covariance entry.
    pub std_err: Matrix6<f64>,
    pub n_traj: usize,
}

fn rk4_quadrature(d: &DerivedParams, x: &[f64; 6], h: f64) -> [f64; 6] {
    let f = |y: &[f64; 6]| mean_field_quadrature(d, y);
    let shift = |y: &[f64; 6], k: &[f64; 6], s: f64| {
        let mut o = *y;
        for i in 0..6 {
            o[i] += s * k[i];
        }
        o
    };
    let k1 = f(x);
    let k2 = f(&shift(x, &k1, 0.5 * h));
    let k3 = f(&shift(x, &k2, 0.5 * h));
    let k4 = f(&shift(x, &k3, h));
    let mut o = *x;
    for i in 0..6 {
        o[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    o
}

#[derive(Default, Clone, Copy)]
struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Samples `n_traj` realizations of `du = A(t) u dt + dW`, `Cov(dW) = D dt`,
/// around the noise-free mean trajectory and returns the sample covariance
/// of `u` after the same number of steps that `integrate` would take.
///
/// Each step applies the exact propagator `exp(A dt)` of the drift frozen at
/// the mid-step mean, with half of the noise injected before and half after
/// it. Trajectory `k` draws from the sub-stream `(seed, k)`.
pub fn stochastic_covariance_estimate(
    d: &DerivedParams,
    cfg: &TrajectoryConfig,
    n_traj: usize,
    seed: RngSeed,
) -> Result<MonteCarloEstimate> {
    d.validate()?;
    cfg.validate(d)?;
    if n_traj < 1000 {
        return Err(Error::invalid(
            "n_traj",
            "Monte Carlo estimate needs at least 1000 trajectories",
        ));
    }
    let dt = cfg.dt;
    let steps = ((cfg.t_end / dt) * (1.0 - 1e-12)).ceil() as usize;

    let noise_sd = [
        0.0,
        (d.gamma_m * (2.0 * d.nbar + 1.0) * 0.5 * dt).sqrt(),
        (d.kappa_l * 0.5 * dt).sqrt(),
        (d.kappa_l * 0.5 * dt).sqrt(),
        (d.kappa_r * 0.5 * dt).sqrt(),
        (d.kappa_r * 0.5 * dt).sqrt(),
    ];

    let m = &cfg.initial_mean;
    let r2 = std::f64::consts::SQRT_2;
    let mut x = [
        m.q,
        m.p,
        r2 * m.alpha_l.re,
        r2 * m.alpha_l.im,
        r2 * m.alpha_r.re,
        r2 * m.alpha_r.im,
    ];
    let mut props: Vec<[f64; 36]> = Vec::with_capacity(steps);
    for _ in 0..steps {
        x = rk4_quadrature(d, &x, 0.5 * dt);
        let a = fd_jacobian(|y| mean_field_quadrature(d, y), &x, 1e-6);
        let phi = dense::expm(&a.scale(dt));
        let mut arr = [0.0; 36];
        arr.copy_from_slice(&phi.a);
        props.push(arr);
        x = rk4_quadrature(d, &x, 0.5 * dt);
    }

    let v0 = Dense::from_fn(6, |i, j| {
        0.5 * (cfg.initial_cov.0[(i, j)] + cfg.initial_cov.0[(j, i)])
    });
    let l0 = dense::cholesky(&v0);

    let finals: Vec<[f64; 6]> = (0..n_traj)
        .into_par_iter()
        .map(|k| {
            let mut rng = seed.stream(k as u64);
            let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
            let xi: Vec<f64> = (0..6).map(|_| draw()).collect();
            let u0 = l0.mul_vec(&xi);
            let mut u = [0.0; 6];
            u.copy_from_slice(&u0);
            for phi in &props {
                for i in 1..6 {
                    u[i] += noise_sd[i] * draw();
                }
                let mut next = [0.0; 6];
                for i in 0..6 {
                    let row = &phi[i * 6..i * 6 + 6];
                    next[i] = row.iter().zip(&u).map(|(a, b)| a * b).sum();
                }
                for i in 1..6 {
                    next[i] += noise_sd[i] * draw();
                }
                u = next;
            }
            u
        })
        .collect();

    let mut mean = [Kahan::default(); 6];
    for u in &finals {
        for i in 0..6 {
            mean[i].add(u[i]);
        }
    }
    let n = n_traj as f64;
    let mu: Vec<f64> = mean.iter().map(|k| k.sum / n).collect();
    let mut acc = [[Kahan::default(); 6]; 6];
    for u in &finals {
        for i in 0..6 {
            for j in i..6 {
                acc[i][j].add((u[i] - mu[i]) * (u[j] - mu[j]));
            }
        }
    }
    let mut cov = Matrix6::zeros();
    for i in 0..6 {
        for j in i..6 {
            let v = acc[i][j].sum / (n - 1.0);
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    let std_err = Matrix6::from_fn(|i, j| {
        ((cov[(i, i)] * cov[(j, j)] + cov[(i, j)] * cov[(i, j)]) / (n - 1.0)).sqrt()
    });
    Ok(MonteCarloEstimate {
        t: steps as f64 * dt,
        cov: CovMatrix(cov),
        std_err,
        n_traj,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quiet() -> DerivedParams {
        DerivedParams {
            kappa_l: 1.0,
            kappa_r: 0.5,
            eps_l: 0.0,
            eps_r: 0.0,
            g0_l: 0.0,
            g0_r: 0.0,
            omega_m: 1.0,
            gamma_m: 0.3,
            nbar: 2.0,
            delta0_l: 1.0,
            delta0_r: -0.7,
        }
    }

    #[test]
    fn needs_enough_trajectories() {
        let d = quiet();
        let cfg = TrajectoryConfig::from_rest(&d, 1.0, 1);
        assert!(stochastic_covariance_estimate(&d, &cfg, 999, RngSeed(1)).is_err());
    }

    #[test]
    fn seeded_and_reproducible() {
        let d = quiet();
        let cfg = TrajectoryConfig::from_rest(&d, 0.5, 1);
        let a = stochastic_covariance_estimate(&d, &cfg, 1000, RngSeed(3)).unwrap();
        let b = stochastic_covariance_estimate(&d, &cfg, 1000, RngSeed(3)).unwrap();
        let c = stochastic_covariance_estimate(&d, &cfg, 1000, RngSeed(4)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.cov, c.cov);
    }

    #[test]
    fn thermal_equilibrium_is_preserved() {
        let d = quiet();
        let cfg = TrajectoryConfig::from_rest(&d, 3.0, 1);
        let est = stochastic_covariance_estimate(&d, &cfg, 4000, RngSeed(11)).unwrap();
        let want = CovMatrix::thermal_vacuum(d.nbar).0;
        for i in 0..6 {
            for j in i..6 {
                let z = (est.cov.0[(i, j)] - want[(i, j)]).abs() / est.std_err[(i, j)];
                assert!(z < 4.5, "entry ({i},{j}): {z:.2} standard errors");
            }
        }
    }
}
