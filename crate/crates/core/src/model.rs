// SPDX-License-Identifier: Apache-2.0

//! Drift and diffusion matrices of the linearized fluctuation dynamics.

use nalgebra::{Matrix6, Vector6};

use crate::params::DerivedParams;
use crate::state::MeanState;

/// Dynamic detunings `(Delta_L, Delta_R)`: the static detunings shifted by the
/// mechanical displacement with opposite signs on the two sides.
pub fn dynamic_detunings(d: &DerivedParams, s: &MeanState) -> (f64, f64) {
    let shift = std::f64::consts::SQRT_2 * s.q;
    (d.delta0_l + d.g0_l * shift, d.delta0_r - d.g0_r * shift)
}

/// Linearized couplings `(G_x, G_y)` of one cavity: `sqrt(2) g0` times the
/// quadrature means `(X, Y)`, i.e. `2 g0 (Re a, Im a)`.
fn couplings(g0: f64, alpha: num_complex::Complex64) -> (f64, f64) {
    (2.0 * g0 * alpha.re, 2.0 * g0 * alpha.im)
}

/// Drift matrix `A(t)` in the quadrature basis `(q, p, X_L, Y_L, X_R, Y_R)`.
///
/// This is the Jacobian of the mean-field vector field written in quadrature
/// coordinates, evaluated at `s`.
pub fn drift_matrix(d: &DerivedParams, s: &MeanState) -> Matrix6<f64> {
    let (delta_l, delta_r) = dynamic_detunings(d, s);
    let (gxl, gyl) = couplings(d.g0_l, s.alpha_l);
    let (gxr, gyr) = couplings(d.g0_r, s.alpha_r);
    let om = d.omega_m;
    let (kl, kr) = (d.kappa_l, d.kappa_r);

    #[rustfmt::skip]
    let a = Matrix6::new(
        0.0,  om,        0.0,      0.0,      0.0,      0.0,
        -om,  -d.gamma_m, -gxl,    -gyl,     gxr,      gyr,
        gyl,  0.0,       -kl,      delta_l,  0.0,      0.0,
        -gxl, 0.0,       -delta_l, -kl,      0.0,      0.0,
        -gyr, 0.0,       0.0,      0.0,      -kr,      delta_r,
        gxr,  0.0,       0.0,      0.0,      -delta_r, -kr,
    );
    a
}

/// Diagonal diffusion matrix `diag(0, Gamma_M (2 nbar + 1), k_L, k_L, k_R, k_R)`.
pub fn diffusion_matrix(d: &DerivedParams) -> Matrix6<f64> {
    Matrix6::from_diagonal(&Vector6::new(
        0.0,
        d.gamma_m * (2.0 * d.nbar + 1.0),
        d.kappa_l,
        d.kappa_l,
        d.kappa_r,
        d.kappa_r,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn params() -> DerivedParams {
        DerivedParams {
            kappa_l: 2.0,
            kappa_r: 3.0,
            eps_l: 5.0,
            eps_r: 4.0,
            g0_l: 0.3,
            g0_r: 0.2,
            omega_m: 1.0,
            gamma_m: 0.01,
            nbar: 1.0,
            delta0_l: 6.5,
            delta0_r: 6.0,
        }
    }

    #[test]
    fn empty_cavities_give_block_diagonal_drift() {
        let d = params();
        let a = drift_matrix(&d, &MeanState::default());
        for (i, j) in [
            (1, 2),
            (1, 3),
            (1, 4),
            (1, 5),
            (2, 0),
            (3, 0),
            (4, 0),
            (5, 0),
        ] {
            assert_eq!(a[(i, j)], 0.0);
        }
        for i in 0..2 {
            for j in 2..6 {
                assert_eq!(a[(i, j)], 0.0);
                assert_eq!(a[(j, i)], 0.0);
            }
        }
        assert_eq!(a[(2, 3)], 6.5);
        assert_eq!(a[(4, 5)], 6.0);
        assert_eq!(a[(0, 1)], 1.0);
        assert_eq!(a[(1, 1)], -0.01);
    }

    #[test]
    fn real_left_amplitude_has_no_y_coupling() {
        let d = params();
        let s = MeanState {
            alpha_l: Complex64::new(10.0, 0.0),
            ..Default::default()
        };
        let a = drift_matrix(&d, &s);
        assert_eq!(a[(1, 3)], 0.0);
        assert_eq!(a[(2, 0)], 0.0);
        assert!(a[(3, 0)] < 0.0);
        assert!(-a[(1, 2)] > 0.0);
        for j in 4..6 {
            assert_eq!(a[(1, j)], 0.0);
            assert_eq!(a[(j, 0)], 0.0);
        }
    }

    #[test]
    fn diffusion_entries() {
        let mut d = params();
        d.nbar = 1.0;
        d.gamma_m = 50.0;
        let m = diffusion_matrix(&d);
        assert_eq!(m[(1, 1)], 150.0);
        assert_eq!(m[(0, 0)], 0.0);
        assert_eq!(m[(2, 2)], 2.0);
        assert_eq!(m[(5, 5)], 3.0);
        d.gamma_m = 0.0;
        assert_eq!(diffusion_matrix(&d)[(1, 1)], 0.0);
        d.nbar = 0.0;
        d.gamma_m = 7.0;
        d.kappa_r = 2.0;
        let m = diffusion_matrix(&d);
        assert_eq!(m.diagonal(), Vector6::new(0.0, 7.0, 2.0, 2.0, 2.0, 2.0));
    }

    #[test]
    fn detunings_shift_oppositely() {
        let d = params();
        let s = MeanState {
            q: 1.0,
            ..Default::default()
        };
        let (l, r) = dynamic_detunings(&d, &s);
        assert!(l > d.delta0_l);
        assert!(r < d.delta0_r);
    }
}
