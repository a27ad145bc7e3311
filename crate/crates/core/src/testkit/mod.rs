// SPDX-License-Identifier: Apache-2.0

//! Independent reference implementations for validating the simulator.
//!
//! Nothing here calls the simulator's numerical kernels: matrices are plain
//! row-major vectors, eigenvalues come from characteristic polynomials or
//! matrix exponentials, and the mean-field equations are re-derived in
//! complex form. Agreement with the main path is therefore evidence rather
//! than a tautology.

pub mod dense;
mod montecarlo;
mod verify;

use nalgebra::{Matrix4, Matrix6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::DerivedParams;
use crate::state::CovMatrix;

pub use dense::Dense;
pub use montecarlo::{stochastic_covariance_estimate, MonteCarloEstimate};
pub use verify::{run_verification, CheckOutcome};

/// Seed of a deterministic random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Independent sub-stream `index` of this seed.
    pub fn stream(self, index: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.0);
        r.set_stream(index);
        r
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Real roots of the polynomial with ascending `coeffs` on `[lo, hi]`,
/// found by sampling `n + 1` uniform points and bisecting each sign change
/// to a bracket of width `1e-12 * max(1, |root|)`. Tangential roots between
/// samples are missed.
pub fn poly_real_roots_scan(coeffs: &[f64], lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 1000 || lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::invalid("scan", "need n >= 1000 and lo < hi"));
    }
    let x = |k: usize| lo + (hi - lo) * k as f64 / n as f64;
    let mut roots = Vec::new();
    let mut x0 = x(0);
    let mut f0 = horner(coeffs, x0);
    for k in 1..=n {
        let x1 = x(k);
        let f1 = horner(coeffs, x1);
        if f0 == 0.0 {
            roots.push(x0);
        } else if f0 * f1 < 0.0 {
            let (mut a, mut b, mut fa) = (x0, x1, f0);
            while b - a > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                let m = 0.5 * (a + b);
                let fm = horner(coeffs, m);
                if fm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if (fm < 0.0) == (fa < 0.0) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            roots.push(0.5 * (a + b));
        }
        x0 = x1;
        f0 = f1;
    }
    if f0 == 0.0 {
        roots.push(x0);
    }
    Ok(roots)
}

/// Solves `A V + V A^T + D = 0` as the 36x36 system
/// `(A (x) I + I (x) A) vec V = -vec D`.
pub fn lyapunov_solve_algebraic(a: &Matrix6<f64>, d: &Matrix6<f64>) -> Result<CovMatrix> {
    let ad = to_dense6(a);
    let scale = ad.max_abs().max(f64::MIN_POSITIVE);
    let growth = dense::max_real_part(&ad);
    if growth.is_nan() || growth >= -1e-12 * scale {
        return Err(Error::Oracle(format!(
            "drift matrix is not stable (largest real part {growth:e})"
        )));
    }
    let n = 6;
    let mut sys = Dense::zeros(n * n);
    let mut rhs = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            rhs[row] = -d[(i, j)];
            for k in 0..n {
                let c = sys.get(row, k * n + j) + ad.get(i, k);
                sys.set(row, k * n + j, c);
                let c = sys.get(row, i * n + k) + ad.get(j, k);
                sys.set(row, i * n + k, c);
            }
        }
    }
    let v = dense::gauss_solve(&sys, &rhs, 1e-13)
        .ok_or_else(|| Error::Oracle("Lyapunov system is singular".into()))?;
    let m = Matrix6::from_fn(|i, j| 0.5 * (v[i * n + j] + v[j * n + i]));
    Ok(CovMatrix(m))
}

/// `(v_-, v_+)` from the spectrum of `Omega V^PT`, whose eigenvalues are
/// `+-i v_k`. The characteristic polynomial is even, so `v^2` solves a
/// quadratic.
pub fn symplectic_eigenvalues_spectral(vs: &Matrix4<f64>) -> (f64, f64) {
    let sign = [1.0, 1.0, 1.0, -1.0];
    let vpt = Dense::from_fn(4, |i, j| sign[i] * sign[j] * vs[(i, j)]);
    let omega = Dense::from_fn(4, |i, j| match (i, j) {
        (0, 1) | (2, 3) => 1.0,
        (1, 0) | (3, 2) => -1.0,
        _ => 0.0,
    });
    let c = dense::char_poly(&omega.mul(&vpt));
    // v^4 - c2 v^2 + c0 = 0.
    let (c2, c0) = (c[2], c[0]);
    let root = (c2 * c2 - 4.0 * c0).max(0.0).sqrt();
    let big = 0.5 * (c2 + root);
    let small = c0 / big;
    (small.sqrt(), big.sqrt())
}

/// Random `2n x 2n` covariance of a physical Gaussian state (vacuum
/// variance 1/2): a thermal state `diag(nu_k)` with `nu_k >= 1/2`, dressed
/// by a random product of rotations, squeezers, beam splitters and two-mode
/// squeezers.
pub fn random_physical_covariance<R: Rng>(rng: &mut R, modes: usize, max_squeeze: f64) -> Dense {
    let dim = 2 * modes;
    let mut s = Dense::identity(dim);
    for _ in 0..4 * modes {
        let mut e = Dense::identity(dim);
        let j = rng.random_range(0..modes);
        let k = (j + rng.random_range(1..modes.max(2))) % modes;
        match rng.random_range(0..4) {
            0 => {
                let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                let (c, sn) = (th.cos(), th.sin());
                e.set(2 * j, 2 * j, c);
                e.set(2 * j, 2 * j + 1, -sn);
                e.set(2 * j + 1, 2 * j, sn);
                e.set(2 * j + 1, 2 * j + 1, c);
            }
            1 => {
                let r: f64 = rng.random_range(-max_squeeze..max_squeeze);
                e.set(2 * j, 2 * j, r.exp());
                e.set(2 * j + 1, 2 * j + 1, (-r).exp());
            }
            2 if modes > 1 => {
                let ph: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                let (c, sn) = (ph.cos(), ph.sin());
                for q in 0..2 {
                    e.set(2 * j + q, 2 * j + q, c);
                    e.set(2 * j + q, 2 * k + q, sn);
                    e.set(2 * k + q, 2 * j + q, -sn);
                    e.set(2 * k + q, 2 * k + q, c);
                }
            }
            _ if modes > 1 => {
                let r: f64 = rng.random_range(-max_squeeze..max_squeeze);
                let (ch, sh) = (r.cosh(), r.sinh());
                for q in 0..2 {
                    let z = if q == 0 { 1.0 } else { -1.0 };
                    e.set(2 * j + q, 2 * j + q, ch);
                    e.set(2 * k + q, 2 * k + q, ch);
                    e.set(2 * j + q, 2 * k + q, z * sh);
                    e.set(2 * k + q, 2 * j + q, z * sh);
                }
            }
            _ => {}
        }
        s = e.mul(&s);
    }
    let mut thermal = Dense::zeros(dim);
    for m in 0..modes {
        let nu = 0.5 + rng.random_range(0.0..2.0);
        thermal.set(2 * m, 2 * m, nu);
        thermal.set(2 * m + 1, 2 * m + 1, nu);
    }
    let v = s.mul(&thermal).mul(&s.transpose());
    Dense::from_fn(dim, |i, j| 0.5 * (v.get(i, j) + v.get(j, i)))
}

/// Mean-field vector field in quadrature coordinates `(q, p, X_L, Y_L, X_R, Y_R)`,
/// written in complex form with `a = (X + iY)/sqrt(2)`.
pub fn mean_field_quadrature(d: &DerivedParams, x: &[f64; 6]) -> [f64; 6] {
    let r2 = std::f64::consts::SQRT_2;
    let (q, p) = (x[0], x[1]);
    let (al_re, al_im) = (x[2] / r2, x[3] / r2);
    let (ar_re, ar_im) = (x[4] / r2, x[5] / r2);
    let n_l = al_re * al_re + al_im * al_im;
    let n_r = ar_re * ar_re + ar_im * ar_im;
    // da/dt = -(kappa + i Delta) a + eps
    let dl = d.delta0_l + r2 * d.g0_l * q;
    let dr = d.delta0_r - r2 * d.g0_r * q;
    let dal = (
        -d.kappa_l * al_re + dl * al_im + d.eps_l,
        -d.kappa_l * al_im - dl * al_re,
    );
    let dar = (
        -d.kappa_r * ar_re + dr * ar_im + d.eps_r,
        -d.kappa_r * ar_im - dr * ar_re,
    );
    [
        d.omega_m * p,
        -d.omega_m * q - d.gamma_m * p - r2 * d.g0_l * n_l + r2 * d.g0_r * n_r,
        r2 * dal.0,
        r2 * dal.1,
        r2 * dar.0,
        r2 * dar.1,
    ]
}

/// Central-difference Jacobian of `f` at `x`, step `rel_step * max(|x_i|, 1)`.
pub fn fd_jacobian(f: impl Fn(&[f64; 6]) -> [f64; 6], x: &[f64; 6], rel_step: f64) -> Dense {
    let mut jac = Dense::zeros(6);
    for j in 0..6 {
        let h = rel_step * x[j].abs().max(1.0);
        let mut xp = *x;
        let mut xm = *x;
        xp[j] += h;
        xm[j] -= h;
        let (fp, fm) = (f(&xp), f(&xm));
        for i in 0..6 {
            jac.set(i, j, (fp[i] - fm[i]) / (2.0 * h));
        }
    }
    jac
}

/// Drift matrix by finite differences of [`mean_field_quadrature`].
pub fn drift_matrix_fd(d: &DerivedParams, x: &[f64; 6]) -> Matrix6<f64> {
    from_dense6(&fd_jacobian(|y| mean_field_quadrature(d, y), x, 1e-6))
}

/// `sum_k (A_ik V_kj + V_ik A_jk) + D_ij`, elementwise.
pub fn naive_covariance_rhs(a: &Matrix6<f64>, v: &Matrix6<f64>, d: &Matrix6<f64>) -> Matrix6<f64> {
    let mut out = Matrix6::zeros();
    for i in 0..6 {
        for j in 0..6 {
            let mut s = d[(i, j)];
            for k in 0..6 {
                s += a[(i, k)] * v[(k, j)] + v[(i, k)] * a[(j, k)];
            }
            out[(i, j)] = s;
        }
    }
    out
}

/// Largest eigenvalue real part of `a`, from [`dense::max_real_part`].
pub fn max_real_part(a: &Matrix6<f64>) -> f64 {
    dense::max_real_part(&to_dense6(a))
}

pub fn to_dense6(m: &Matrix6<f64>) -> Dense {
    Dense::from_fn(6, |i, j| m[(i, j)])
}

pub fn from_dense6(m: &Dense) -> Matrix6<f64> {
    Matrix6::from_fn(|i, j| m.get(i, j))
}

pub fn from_dense4(m: &Dense) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| m.get(i, j))
}

/// Relative distance `|a - b| / max(|a|, |b|, floor)`.
pub fn rel_err(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}
