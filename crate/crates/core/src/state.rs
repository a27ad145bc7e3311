// SPDX-License-Identifier: Apache-2.0

use nalgebra::{Matrix6, Vector6};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Classical means: dimensionless mechanical quadratures and complex cavity
/// amplitudes `<a_L>`, `<a_R>`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MeanState {
    pub q: f64,
    pub p: f64,
    pub alpha_l: Complex64,
    pub alpha_r: Complex64,
}

impl MeanState {
    /// Real packing `(q, p, Re a_L, Im a_L, Re a_R, Im a_R)`.
    pub fn to_array(&self) -> [f64; 6] {
        [
            self.q,
            self.p,
            self.alpha_l.re,
            self.alpha_l.im,
            self.alpha_r.re,
            self.alpha_r.im,
        ]
    }

    pub fn from_array(a: &[f64; 6]) -> Self {
        MeanState {
            q: a[0],
            p: a[1],
            alpha_l: Complex64::new(a[2], a[3]),
            alpha_r: Complex64::new(a[4], a[5]),
        }
    }

    /// Quadrature means `(q, p, X_L, Y_L, X_R, Y_R)` with `X = sqrt(2) Re a`.
    pub fn quadratures(&self) -> Vector6<f64> {
        let s = std::f64::consts::SQRT_2;
        Vector6::new(
            self.q,
            self.p,
            s * self.alpha_l.re,
            s * self.alpha_l.im,
            s * self.alpha_r.re,
            s * self.alpha_r.im,
        )
    }

    pub fn from_quadratures(v: &Vector6<f64>) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        MeanState {
            q: v[0],
            p: v[1],
            alpha_l: Complex64::new(s * v[2], s * v[3]),
            alpha_r: Complex64::new(s * v[4], s * v[5]),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

/// Number of independent entries of a symmetric 6x6 matrix.
pub const PACKED_LEN: usize = 21;

/// Symmetric covariance of the quadrature fluctuations in the order
/// `(q, p, X_L, Y_L, X_R, Y_R)`. Vacuum variance is 1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovMatrix(pub Matrix6<f64>);

impl CovMatrix {
    pub fn new(m: Matrix6<f64>) -> Self {
        CovMatrix(m)
    }

    /// Mechanical thermal state with cavity vacua.
    pub fn thermal_vacuum(nbar: f64) -> Self {
        let m = (2.0 * nbar + 1.0) / 2.0;
        CovMatrix(Matrix6::from_diagonal(&Vector6::new(
            m, m, 0.5, 0.5, 0.5, 0.5,
        )))
    }

    pub fn matrix(&self) -> &Matrix6<f64> {
        &self.0
    }

    pub fn symmetrized(m: &Matrix6<f64>) -> Self {
        CovMatrix((m + m.transpose()) * 0.5)
    }

    /// Upper triangle, row-major.
    pub fn pack(&self) -> [f64; PACKED_LEN] {
        let mut out = [0.0; PACKED_LEN];
        let mut k = 0;
        for i in 0..6 {
            for j in i..6 {
                out[k] = self.0[(i, j)];
                k += 1;
            }
        }
        out
    }

    pub fn unpack(packed: &[f64]) -> Self {
        debug_assert_eq!(packed.len(), PACKED_LEN);
        let mut m = Matrix6::zeros();
        let mut k = 0;
        for i in 0..6 {
            for j in i..6 {
                m[(i, j)] = packed[k];
                m[(j, i)] = packed[k];
                k += 1;
            }
        }
        CovMatrix(m)
    }

    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        let scale = self.0.amax().max(f64::MIN_POSITIVE);
        (self.0 - self.0.transpose()).amax() <= rel_tol * scale
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl Default for CovMatrix {
    fn default() -> Self {
        CovMatrix::thermal_vacuum(0.0)
    }
}
