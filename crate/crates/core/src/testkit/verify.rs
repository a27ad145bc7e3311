// SPDX-License-Identifier: Apache-2.0

//! A quick self-check of the simulator against the reference implementations.

use nalgebra::{Matrix4, Matrix6};
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use super::*;
use crate::dynamics::{covariance_rhs, integrate, TrajectoryConfig};
use crate::entanglement::{log_negativity, symplectic_eigenvalue_pt};
use crate::model::{diffusion_matrix, drift_matrix};
use crate::state::MeanState;
use crate::steady::{fixed_points, stability, steady_state_polynomial};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, worst: f64, tol: f64) -> CheckOutcome {
    CheckOutcome {
        name,
        passed: worst <= tol,
        detail: format!("worst {worst:.3e} (tolerance {tol:.0e})"),
    }
}

/// Small, dimensionless parameter set with all couplings active.
pub(crate) fn sample_params() -> DerivedParams {
    DerivedParams {
        kappa_l: 0.3,
        kappa_r: 0.4,
        eps_l: 1.2,
        eps_r: 0.9,
        g0_l: 0.05,
        g0_r: 0.04,
        omega_m: 1.0,
        gamma_m: 0.02,
        nbar: 1.5,
        delta0_l: 1.1,
        delta0_r: 0.9,
    }
}

fn check_symplectic(seed: RngSeed) -> CheckOutcome {
    let mut rng = seed.stream(1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let vs = from_dense4(&random_physical_covariance(&mut rng, 2, 0.5));
        let (a, b) = match symplectic_eigenvalue_pt(&vs) {
            Ok(x) => x,
            Err(_) => {
                return outcome(
                    "symplectic eigenvalues vs spectral oracle",
                    f64::INFINITY,
                    1e-10,
                )
            }
        };
        let (oa, ob) = symplectic_eigenvalues_spectral(&vs);
        worst = worst.max(rel_err(a, oa, 0.0)).max(rel_err(b, ob, 0.0));
    }
    outcome("symplectic eigenvalues vs spectral oracle", worst, 1e-10)
}

fn check_squeezed() -> CheckOutcome {
    let r: f64 = 0.5;
    let (c, s) = ((2.0 * r).cosh() / 2.0, (2.0 * r).sinh() / 2.0);
    #[rustfmt::skip]
    let vs = Matrix4::new(
        c, 0.0, s, 0.0,
        0.0, c, 0.0, -s,
        s, 0.0, c, 0.0,
        0.0, -s, 0.0, c,
    );
    let vac = symplectic_eigenvalue_pt(&(Matrix4::identity() * 0.5))
        .and_then(|(v, _)| log_negativity(v))
        .unwrap_or(f64::NAN);
    let sq = symplectic_eigenvalue_pt(&vs)
        .and_then(|(v, _)| log_negativity(v))
        .unwrap_or(f64::NAN);
    let worst = if vac == 0.0 {
        (sq - 2.0 * r).abs()
    } else {
        f64::INFINITY
    };
    outcome("vacuum and two-mode squeezed negativity", worst, 1e-9)
}

fn check_jacobian(seed: RngSeed) -> CheckOutcome {
    let d = sample_params();
    let mut rng = seed.stream(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let x: [f64; 6] = std::array::from_fn(|_| rng.random_range(-5.0..5.0));
        let s = MeanState::from_array(&[
            x[0],
            x[1],
            x[2] / std::f64::consts::SQRT_2,
            x[3] / std::f64::consts::SQRT_2,
            x[4] / std::f64::consts::SQRT_2,
            x[5] / std::f64::consts::SQRT_2,
        ]);
        let a = drift_matrix(&d, &s);
        let fd = drift_matrix_fd(&d, &x);
        let scale = a.amax();
        worst = worst.max((a - fd).amax() / scale);
    }
    outcome("drift matrix vs finite-difference Jacobian", worst, 1e-5)
}

fn check_covariance_rhs(seed: RngSeed) -> CheckOutcome {
    let mut rng = seed.stream(3);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let a = Matrix6::from_fn(|_, _| rng.random_range(-1.0..1.0));
        let v = from_dense6(&random_physical_covariance(&mut rng, 3, 0.5));
        let dd = Matrix6::from_diagonal(&nalgebra::Vector6::from_fn(|_, _| {
            rng.random_range(0.0..1.0)
        }));
        let got = covariance_rhs(&a, &v, &dd);
        let want = naive_covariance_rhs(&a, &v, &dd);
        worst = worst.max((got - want).amax() / want.amax().max(1.0));
    }
    outcome("covariance derivative vs elementwise sum", worst, 1e-13)
}

fn check_steady_states() -> CheckOutcome {
    let d = sample_params();
    let poly = steady_state_polynomial(&d);
    let fps = match fixed_points(&d) {
        Ok(f) => f,
        Err(e) => {
            return CheckOutcome {
                name: "steady states vs root scan and spectral stability",
                passed: false,
                detail: e.to_string(),
            }
        }
    };
    let w = crate::steady::displacement_bracket(&d);
    let scanned = poly_real_roots_scan(&poly.0, -w, w, 200_000).unwrap_or_default();
    let mut worst = if scanned.len() == fps.len() {
        0.0f64
    } else {
        f64::INFINITY
    };
    for (fp, q) in fps.iter().zip(&scanned) {
        worst = worst.max(rel_err(fp.q, *q, 1.0));
        let a = drift_matrix(&d, &fp.mean_state());
        let growth = max_real_part(&a);
        if stability(&a).ok() != Some(growth < 0.0) {
            worst = f64::INFINITY;
        }
    }
    outcome(
        "steady states vs root scan and spectral stability",
        worst,
        1e-8,
    )
}

fn check_lyapunov() -> CheckOutcome {
    // Undriven system: constant drift, relaxes to the algebraic solution.
    let mut d = sample_params();
    d.eps_l = 0.0;
    d.eps_r = 0.0;
    d.gamma_m = 0.5;
    let mean = MeanState::default();
    let a = drift_matrix(&d, &mean);
    let diff = diffusion_matrix(&d);
    let Ok(target) = lyapunov_solve_algebraic(&a, &diff) else {
        return outcome(
            "long-time covariance vs algebraic Lyapunov",
            f64::INFINITY,
            1e-6,
        );
    };
    let t_end = 20.0 / 0.25;
    let mut cfg = TrajectoryConfig::from_rest(&d, t_end, 1_000_000);
    cfg.initial_mean = mean;
    match integrate(&d, &cfg) {
        Ok(s) => {
            let v = s.last().unwrap().cov.0;
            outcome(
                "long-time covariance vs algebraic Lyapunov",
                (v - target.0).amax(),
                1e-6,
            )
        }
        Err(_) => outcome(
            "long-time covariance vs algebraic Lyapunov",
            f64::INFINITY,
            1e-6,
        ),
    }
}

fn check_monte_carlo(seed: RngSeed) -> CheckOutcome {
    // Single undriven damped cavity started far from vacuum.
    let d = DerivedParams {
        kappa_l: 1.0,
        kappa_r: 1.0,
        eps_l: 0.0,
        eps_r: 0.0,
        g0_l: 0.0,
        g0_r: 0.0,
        omega_m: 1.0,
        gamma_m: 1.0,
        nbar: 0.0,
        delta0_l: 1.0,
        delta0_r: 1.0,
    };
    let mut cfg = TrajectoryConfig::from_rest(&d, 10.0, 1);
    cfg.initial_cov = CovMatrix(Matrix6::identity() * 3.0);
    let name = "Monte Carlo vacuum relaxation (standard errors)";
    match stochastic_covariance_estimate(&d, &cfg, 10_000, seed) {
        Ok(est) => {
            let z = (est.cov.0[(2, 2)] - 0.5).abs() / est.std_err[(2, 2)];
            CheckOutcome {
                name,
                passed: z < 3.0,
                detail: format!(
                    "V_XX = {:.5}, {z:.2} standard errors from 1/2",
                    est.cov.0[(2, 2)]
                ),
            }
        }
        Err(e) => CheckOutcome {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

fn check_closed_form_cavity() -> CheckOutcome {
    let mut d = sample_params();
    d.g0_l = 0.0;
    d.g0_r = 0.0;
    let t_end = 7.0;
    let cfg = TrajectoryConfig::from_rest(&d, t_end, 1);
    let name = "uncoupled cavity vs closed form";
    let Ok(samples) = integrate(&d, &cfg) else {
        return outcome(name, f64::INFINITY, 1e-8);
    };
    let mut worst = 0.0f64;
    for s in samples.iter().skip(1) {
        let z = Complex64::new(d.kappa_l, d.delta0_l);
        let want = d.eps_l / z * (1.0 - (-z * s.t).exp());
        worst = worst.max((s.mean.alpha_l - want).norm() / want.norm());
    }
    outcome(name, worst, 1e-8)
}

/// Runs every check. Deterministic for a given seed.
pub fn run_verification(seed: RngSeed) -> Vec<CheckOutcome> {
    vec![
        check_symplectic(seed),
        check_squeezed(),
        check_jacobian(seed),
        check_covariance_rhs(seed),
        check_steady_states(),
        check_lyapunov(),
        check_closed_form_cavity(),
        check_monte_carlo(seed),
    ]
}
