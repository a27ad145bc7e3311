// SPDX-License-Identifier: Apache-2.0

//! Steady states of the mean-field equations, their stability, and the
//! closed-form existence conditions for the symmetric configuration.

use nalgebra::Matrix6;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::drift_matrix;
use crate::params::DerivedParams;
use crate::poly::{characteristic_polynomial, Poly};
use crate::state::MeanState;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Accepted residual of a polished root.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Relative Routh-Hurwitz pivot below which stability is indeterminate.
pub const ROUTH_PIVOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    pub q: f64,
    pub alpha_l: Complex64,
    pub alpha_r: Complex64,
    pub stable: bool,
    /// Routh-Hurwitz could not decide (a pivot vanished); `stable` is false.
    pub marginal: bool,
    /// Max-abs relative residual of the fixed-point equations.
    pub residual: f64,
    pub multiplicity: u32,
}

impl SteadyState {
    pub fn mean_state(&self) -> MeanState {
        MeanState {
            q: self.q,
            p: 0.0,
            alpha_l: self.alpha_l,
            alpha_r: self.alpha_r,
        }
    }
}

/// Cavity amplitudes slaved to a mechanical displacement `q`.
pub fn slaved_amplitudes(d: &DerivedParams, q: f64) -> (Complex64, Complex64) {
    let al =
        Complex64::new(d.eps_l, 0.0) / Complex64::new(d.kappa_l, d.delta0_l + SQRT_2 * d.g0_l * q);
    let ar =
        Complex64::new(d.eps_r, 0.0) / Complex64::new(d.kappa_r, d.delta0_r - SQRT_2 * d.g0_r * q);
    (al, ar)
}

/// Force balance on the resonator with the cavities slaved to `q`:
/// `Omega_M q + sqrt2 g0_L |a_L|^2 - sqrt2 g0_R |a_R|^2`. Returns the value
/// and the sum of magnitudes of its terms.
fn force_balance(d: &DerivedParams, q: f64) -> (f64, f64) {
    let (al, ar) = slaved_amplitudes(d, q);
    let t0 = d.omega_m * q;
    let tl = SQRT_2 * d.g0_l * al.norm_sqr();
    let tr = SQRT_2 * d.g0_r * ar.norm_sqr();
    (t0 + tl - tr, t0.abs() + tl + tr)
}

/// Relative residual of the stationary equations at `(q, a_L, a_R)`.
pub fn fixed_point_residual(d: &DerivedParams, q: f64, al: Complex64, ar: Complex64) -> f64 {
    let t0 = d.omega_m * q;
    let tl = SQRT_2 * d.g0_l * al.norm_sqr();
    let tr = SQRT_2 * d.g0_r * ar.norm_sqr();
    let scale = t0.abs() + tl + tr;
    let r_q = if scale > 0.0 {
        (t0 + tl - tr).abs() / scale
    } else {
        (t0 + tl - tr).abs()
    };
    let cav = |kappa: f64, delta: f64, eps: f64, a: Complex64| {
        let lhs = Complex64::new(kappa, delta) * a;
        let scale = lhs.norm() + eps.abs();
        let r = (lhs - eps).norm();
        if scale > 0.0 {
            r / scale
        } else {
            r
        }
    };
    let r_l = cav(d.kappa_l, d.delta0_l + SQRT_2 * d.g0_l * q, d.eps_l, al);
    let r_r = cav(d.kappa_r, d.delta0_r - SQRT_2 * d.g0_r * q, d.eps_r, ar);
    r_q.max(r_l).max(r_r)
}

/// The stationary condition as a polynomial in `q` after clearing the
/// Lorentzian denominators. Degree 5 in general, 3 with one side undriven.
pub fn steady_state_polynomial(d: &DerivedParams) -> Poly {
    let al = SQRT_2 * d.g0_l;
    let ar = SQRT_2 * d.g0_r;
    // kappa^2 + (Delta + a q)^2
    let p_l = Poly::new(vec![
        d.kappa_l * d.kappa_l + d.delta0_l * d.delta0_l,
        2.0 * d.delta0_l * al,
        al * al,
    ]);
    let p_r = Poly::new(vec![
        d.kappa_r * d.kappa_r + d.delta0_r * d.delta0_r,
        -2.0 * d.delta0_r * ar,
        ar * ar,
    ]);
    let stiff_q = Poly::new(vec![0.0, d.omega_m]);
    let fl = al * d.eps_l * d.eps_l;
    let fr = ar * d.eps_r * d.eps_r;
    match (fl == 0.0, fr == 0.0) {
        (true, true) => stiff_q,
        (false, true) => stiff_q.mul(&p_l).add(&Poly::new(vec![fl])),
        (true, false) => stiff_q.mul(&p_r).add(&Poly::new(vec![-fr])),
        (false, false) => stiff_q
            .mul(&p_l)
            .mul(&p_r)
            .add(&p_r.scale(fl))
            .add(&p_l.scale(-fr)),
    }
}

/// Half-width of the search interval for steady displacements: ten times the
/// largest single-cavity displacement `sqrt2 g0 eps^2 / (Omega_M kappa^2)`.
pub fn displacement_bracket(d: &DerivedParams) -> f64 {
    let one = |g0: f64, eps: f64, kappa: f64| SQRT_2 * g0 * eps * eps / (d.omega_m * kappa * kappa);
    let w = one(d.g0_l, d.eps_l, d.kappa_l).max(one(d.g0_r, d.eps_r, d.kappa_r));
    10.0 * w.max(f64::MIN_POSITIVE.sqrt())
}

/// Damped Newton on the force balance; keeps the best iterate.
fn polish(d: &DerivedParams, q0: f64) -> f64 {
    let mut q = q0;
    let (mut f, mut s) = force_balance(d, q);
    for _ in 0..100 {
        if s == 0.0 || f.abs() <= 1e-15 * s {
            break;
        }
        let h = 1e-7 * q.abs().max(1e-7 * displacement_bracket(d));
        let fp = (force_balance(d, q + h).0 - force_balance(d, q - h).0) / (2.0 * h);
        if fp == 0.0 || !fp.is_finite() {
            break;
        }
        let step = f / fp;
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let cand = q - lambda * step;
            let (fc, sc) = force_balance(d, cand);
            if fc.abs() < f.abs() {
                q = cand;
                f = fc;
                s = sc;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    q
}

/// Every real steady state, ascending in `q`. `p` is zero at all of them.
pub fn fixed_points(d: &DerivedParams) -> Result<Vec<SteadyState>> {
    d.validate()?;
    let w = displacement_bracket(d);
    let poly = steady_state_polynomial(d).compose_scale(w);
    let poly = poly.scale(1.0 / poly.max_abs_coeff().max(f64::MIN_POSITIVE));
    let roots = poly.real_roots(-1.0, 1.0, 1e-12);

    let mut out: Vec<SteadyState> = Vec::with_capacity(roots.len());
    for r in roots {
        let q = polish(d, r.value * w);
        let (al, ar) = slaved_amplitudes(d, q);
        let residual = fixed_point_residual(d, q, al, ar);
        if residual.is_nan() || residual >= RESIDUAL_TOL {
            return Err(Error::RootPolish { q, residual });
        }
        if let Some(last) = out.last_mut() {
            if (q - last.q).abs() <= 1e-10 * w {
                last.multiplicity += r.multiplicity;
                continue;
            }
        }
        let a = drift_matrix(
            d,
            &MeanState {
                q,
                p: 0.0,
                alpha_l: al,
                alpha_r: ar,
            },
        );
        let (stable, marginal) = match stability(&a) {
            Ok(s) => (s, false),
            Err(Error::MarginalStability { .. }) => (false, true),
            Err(e) => return Err(e),
        };
        out.push(SteadyState {
            q,
            alpha_l: al,
            alpha_r: ar,
            stable,
            marginal,
            residual,
            multiplicity: r.multiplicity,
        });
    }
    Ok(out)
}

/// Routh-Hurwitz test on the characteristic polynomial of `a`.
///
/// `Ok(true)` iff every eigenvalue has a strictly negative real part. A pivot
/// of relative size below [`ROUTH_PIVOT_TOL`] yields
/// [`Error::MarginalStability`].
pub fn stability(a: &Matrix6<f64>) -> Result<bool> {
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("drift", "matrix has non-finite entries"));
    }
    let norm = a.amax();
    if norm == 0.0 {
        return Err(Error::MarginalStability { pivot: 0.0 });
    }
    let cp = characteristic_polynomial(&(a / norm));
    // Descending coefficients: c[0] lambda^6 + ... + c[6].
    let c: Vec<f64> = cp.0.iter().rev().copied().collect();
    let tol = ROUTH_PIVOT_TOL * cp.max_abs_coeff();

    let mut prev: Vec<f64> = c.iter().step_by(2).copied().collect();
    let mut cur: Vec<f64> = c.iter().skip(1).step_by(2).copied().collect();
    cur.resize(prev.len(), 0.0);
    // c[0] = 1 is the first pivot.
    for _ in 1..c.len() {
        let pivot = cur[0];
        if pivot <= -tol {
            return Ok(false);
        }
        if pivot.abs() < tol {
            return Err(Error::MarginalStability { pivot });
        }
        let mut next = vec![0.0; prev.len()];
        for (j, slot) in next.iter_mut().enumerate().take(prev.len() - 1) {
            let p1 = prev.get(j + 1).copied().unwrap_or(0.0);
            let c1 = cur.get(j + 1).copied().unwrap_or(0.0);
            *slot = (pivot * p1 - prev[0] * c1) / pivot;
        }
        prev = cur;
        cur = next;
    }
    Ok(true)
}

/// Scalar view of a symmetric configuration in the notation of the
/// closed-form analysis: coupling `eta = sqrt2 g0`, stiffness `Omega_M`.
#[derive(Debug, Clone, Copy)]
struct Symmetric {
    kappa: f64,
    delta0: f64,
    eta: f64,
    eps: f64,
    stiffness: f64,
}

fn symmetric_view(d: &DerivedParams) -> Result<Symmetric> {
    d.validate()?;
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
    let checks = [
        ("kappa", d.kappa_l, d.kappa_r),
        ("delta0", d.delta0_l, d.delta0_r),
        ("eps", d.eps_l, d.eps_r),
        ("g0", d.g0_l, d.g0_r),
    ];
    for (name, l, r) in checks {
        if !close(l, r) {
            return Err(Error::Asymmetric(format!("{name}: left {l} vs right {r}")));
        }
    }
    Ok(Symmetric {
        kappa: d.kappa_l,
        delta0: d.delta0_l,
        eta: SQRT_2 * d.g0_l,
        eps: d.eps_l.abs(),
        stiffness: d.omega_m,
    })
}

/// Roots in `u = q^2` of the symmetric biquadratic, with multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct QuarticSolution {
    pub q_squared: Vec<(f64, u32)>,
}

impl QuarticSolution {
    /// Distinct real `q`, ascending.
    pub fn real_q(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for &(u, _) in &self.q_squared {
            if u > 0.0 {
                let r = u.sqrt();
                out.push(-r);
                out.push(r);
            } else if u == 0.0 {
                out.push(0.0);
            }
        }
        out.sort_by(|a, b| a.total_cmp(b));
        out.dedup();
        out
    }
}

/// Solves the nontrivial-branch quartic of the symmetric system,
/// `q^4 + 2 (k^2 - D^2)/eta^2 q^2 + ((k^2 + D^2)/eta^2)^2 - 4 D eps^2 / (Omega eta^2) = 0`,
/// by the quadratic formula in `q^2`.
pub fn symmetric_quartic(d: &DerivedParams) -> Result<QuarticSolution> {
    let s = symmetric_view(d)?;
    if s.eta == 0.0 {
        return Ok(QuarticSolution { q_squared: vec![] });
    }
    // Work in w = (eta q)^2: w^2 + 2 (k^2 - D^2) w + C = 0.
    let k2 = s.kappa * s.kappa;
    let d2 = s.delta0 * s.delta0;
    let drive2 = (s.eta * s.eps).powi(2) / s.stiffness;
    let c = (k2 + d2).powi(2) - 4.0 * s.delta0 * drive2;
    // Quarter discriminant (k^2 - D^2)^2 - C, written without cancellation.
    let disc = 4.0 * s.delta0 * (drive2 - k2 * s.delta0);
    let half_b = k2 - d2;
    let eta2 = s.eta * s.eta;
    let disc_scale = 4.0 * s.delta0.abs() * (drive2.abs() + k2 * s.delta0.abs());
    let mut w = Vec::new();
    if disc.abs() <= 1e-13 * disc_scale {
        w.push((-half_b, 2));
    } else if disc > 0.0 {
        let sq = disc.sqrt();
        // Stable pair: the larger-magnitude root directly, the other via w1 w2 = C.
        let big = if half_b <= 0.0 {
            -half_b + sq
        } else {
            -half_b - sq
        };
        let small = if big != 0.0 { c / big } else { 0.0 };
        let (lo, hi) = if big < small {
            (big, small)
        } else {
            (small, big)
        };
        w.push((lo, 1));
        w.push((hi, 1));
    }
    Ok(QuarticSolution {
        q_squared: w.into_iter().map(|(v, m)| (v / eta2, m)).collect(),
    })
}

/// Distinct real nontrivial roots of the symmetric quartic (0, 2 or 4).
pub fn symmetric_quartic_roots(d: &DerivedParams) -> Result<Vec<f64>> {
    Ok(symmetric_quartic(d)?.real_q())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    NoRealRoots,
    /// Both `q^2` branches non-negative: a narrow band of drive strengths
    /// below the reduced threshold that still admits real roots.
    StringentWindow,
    Inclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdReport {
    /// Non-negative discriminant, `(eta eps)^2 > Omega kappa^2 Delta0`.
    pub condition_i: bool,
    /// `kappa < Delta0` and `0 < (eta eps)^2 < Omega (kappa^2 + Delta0^2)^2 / (4 Delta0)`.
    pub condition_ii_negative_branch: bool,
    /// `(eta eps)^2 >= Omega (kappa^2 + Delta0^2)^2 / (4 Delta0)`.
    pub condition_ii_positive_branch: bool,
    /// `eta eps >= sqrt(Omega / (4 Delta0)) (kappa^2 + Delta0^2)`.
    pub reduced_inequality: bool,
    pub regime_label: Regime,
}

pub fn threshold_report(d: &DerivedParams) -> Result<ThresholdReport> {
    let s = symmetric_view(d)?;
    if s.delta0 <= 0.0 {
        return Err(Error::invalid(
            "delta0",
            "threshold analysis needs Delta0 > 0",
        ));
    }
    let k2 = s.kappa * s.kappa;
    let d2 = s.delta0 * s.delta0;
    let prod = s.eta * s.eps;
    let prod2 = prod * prod;
    let bound = s.stiffness * (k2 + d2).powi(2) / (4.0 * s.delta0);

    let condition_i = prod2 > s.stiffness * k2 * s.delta0;
    let condition_ii_negative_branch = k2 < d2 && prod2 > 0.0 && prod2 < bound;
    let condition_ii_positive_branch = prod2 >= bound;
    let reduced_inequality = prod >= (s.stiffness / (4.0 * s.delta0)).sqrt() * (k2 + d2);

    let regime_label = if reduced_inequality {
        Regime::Inclusive
    } else if condition_i && condition_ii_negative_branch {
        Regime::StringentWindow
    } else {
        Regime::NoRealRoots
    };
    Ok(ThresholdReport {
        condition_i,
        condition_ii_negative_branch,
        condition_ii_positive_branch,
        reduced_inequality,
        regime_label,
    })
}
