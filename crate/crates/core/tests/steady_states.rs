// SPDX-License-Identifier: Apache-2.0

use proptest::prelude::*;
use std::f64::consts::SQRT_2;
use twincav::model::drift_matrix;
use twincav::params::DerivedParams;
use twincav::steady::{
    fixed_point_residual, fixed_points, stability, symmetric_quartic_roots, threshold_report,
    Regime, RESIDUAL_TOL,
};
use twincav::testkit::{max_real_part, poly_real_roots_scan};

fn symmetric(kappa: f64, delta0: f64, eta_eps: f64) -> DerivedParams {
    DerivedParams {
        kappa_l: kappa,
        kappa_r: kappa,
        eps_l: eta_eps,
        eps_r: eta_eps,
        g0_l: 1.0 / SQRT_2,
        g0_r: 1.0 / SQRT_2,
        omega_m: 1.0,
        gamma_m: 0.01,
        nbar: 0.0,
        delta0_l: delta0,
        delta0_r: delta0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn fixed_points_satisfy_the_mean_field_equations(
        kl in 0.1f64..1.0, kr in 0.1f64..1.0, el in 0.0f64..2.0, er in 0.0f64..2.0,
        gl in 0.01f64..0.5, gr in 0.01f64..0.5, dl in -2.0f64..2.0, dr in -2.0f64..2.0,
    ) {
        let d = DerivedParams {
            kappa_l: kl, kappa_r: kr, eps_l: el, eps_r: er, g0_l: gl, g0_r: gr,
            omega_m: 1.0, gamma_m: 0.05, nbar: 0.0, delta0_l: dl, delta0_r: dr,
        };
        let fps = fixed_points(&d).unwrap();
        prop_assert!(!fps.is_empty());
        for w in fps.windows(2) {
            prop_assert!(w[0].q < w[1].q);
        }
        for fp in &fps {
            prop_assert!(fixed_point_residual(&d, fp.q, fp.alpha_l, fp.alpha_r) <= RESIDUAL_TOL);
            let a = drift_matrix(&d, &fp.mean_state());
            if !fp.marginal {
                prop_assert_eq!(fp.stable, max_real_part(&a) < 0.0);
                prop_assert_eq!(stability(&a).unwrap(), fp.stable);
            }
        }
    }

    #[test]
    fn symmetric_quartic_gives_the_nontrivial_fixed_points(
        kappa in 0.05f64..2.0, delta0 in 0.05f64..2.0, drive in 0.05f64..3.0,
    ) {
        let d = symmetric(kappa, delta0, drive);
        let quartic = symmetric_quartic_roots(&d).unwrap();
        let fps = fixed_points(&d).unwrap();
        prop_assume!(fps.iter().all(|f| f.multiplicity == 1));
        let nontrivial: Vec<f64> = fps.iter().map(|f| f.q).filter(|q| q.abs() > 1e-9).collect();
        prop_assert!(fps.iter().any(|f| f.q.abs() <= 1e-9));
        prop_assert_eq!(nontrivial.len(), quartic.iter().filter(|q| q.abs() > 1e-9).count());
        for (a, b) in nontrivial.iter().zip(quartic.iter().filter(|q| q.abs() > 1e-9)) {
            prop_assert!((a - b).abs() <= 1e-7 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn regime_label_predicts_real_roots(
        kappa in 0.05f64..2.0, delta0 in 0.05f64..2.0, drive in 0.05f64..3.0,
    ) {
        let d = symmetric(kappa, delta0, drive);
        let r = threshold_report(&d).unwrap();
        let (k2, d2) = (kappa * kappa, delta0 * delta0);
        let c = (k2 + d2).powi(2) - 4.0 * delta0 * drive * drive;
        // Stay away from tangencies and the threshold itself.
        let disc = (k2 - d2).powi(2) - c;
        prop_assume!(disc.abs() > 1e-6 && c.abs() > 1e-6);
        let coeffs = [c, 0.0, 2.0 * (k2 - d2), 0.0, 1.0];
        let bound = 1.0 + coeffs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let roots = poly_real_roots_scan(&coeffs, -bound, bound, 20_000).unwrap();
        prop_assert_eq!(r.regime_label != Regime::NoRealRoots, !roots.is_empty());
        if r.reduced_inequality {
            prop_assert_eq!(r.regime_label, Regime::Inclusive);
            prop_assert!(r.condition_i && r.condition_ii_positive_branch);
        }
        prop_assert_eq!(symmetric_quartic_roots(&d).unwrap().len(), roots.len());
    }
}

#[test]
fn asymmetric_parameters_have_no_symmetric_quartic() {
    let mut d = symmetric(0.5, 1.0, 1.0);
    d.kappa_r = 0.6;
    assert!(symmetric_quartic_roots(&d).is_err());
    assert!(threshold_report(&d).is_err());
}

#[test]
fn stringent_window_exists_below_the_reduced_threshold() {
    // kappa < Delta0, drive between the two bounds.
    let d = symmetric(0.1, 0.5, 0.15);
    let r = threshold_report(&d).unwrap();
    assert!(!r.reduced_inequality);
    assert_eq!(r.regime_label, Regime::StringentWindow);
    assert_eq!(symmetric_quartic_roots(&d).unwrap().len(), 4);
}
