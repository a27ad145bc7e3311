// SPDX-License-Identifier: Apache-2.0

//! Pairwise Gaussian entanglement: two-mode submatrices, partially transposed
//! symplectic eigenvalues, logarithmic negativity, and onset / pattern
//! analysis of negativity time series.
//!
//! Covariances use vacuum variance 1/2, so a pair is entangled iff the
//! smaller partially-transposed symplectic eigenvalue is below 1/2 and
//! `E_N = max(0, -ln(2 v_-))`.

use std::collections::VecDeque;
use std::fmt;

use nalgebra::{Matrix2, Matrix4};
use serde::{Deserialize, Serialize};

use crate::dynamics::TrajectorySample;
use crate::error::{Error, Result};
use crate::state::CovMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PairId {
    ML,
    MR,
    LR,
}

impl PairId {
    pub const ALL: [PairId; 3] = [PairId::ML, PairId::MR, PairId::LR];

    /// Zero-based quadrature indices of the pair, in the order (q, p, X_L, Y_L, X_R, Y_R).
    pub fn indices(self) -> [usize; 4] {
        match self {
            PairId::ML => [0, 1, 2, 3],
            PairId::MR => [0, 1, 4, 5],
            PairId::LR => [2, 3, 4, 5],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PairId::ML => "ML",
            PairId::MR => "MR",
            PairId::LR => "LR",
        }
    }

    /// The pair seen with left and right exchanged.
    pub fn mirrored(self) -> PairId {
        match self {
            PairId::ML => PairId::MR,
            PairId::MR => PairId::ML,
            PairId::LR => PairId::LR,
        }
    }
}

impl fmt::Display for PairId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn submatrix(v: &CovMatrix, pair: PairId) -> Matrix4<f64> {
    let idx = pair.indices();
    Matrix4::from_fn(|i, j| v.0[(idx[i], idx[j])])
}

/// `det V_a + det V_b - 2 det V_ab` for the 2x2 blocks of a two-mode covariance.
pub fn sigma_pt(vs: &Matrix4<f64>) -> f64 {
    let a: Matrix2<f64> = vs.fixed_view::<2, 2>(0, 0).into_owned();
    let b: Matrix2<f64> = vs.fixed_view::<2, 2>(2, 2).into_owned();
    let c: Matrix2<f64> = vs.fixed_view::<2, 2>(0, 2).into_owned();
    a.determinant() + b.determinant() - 2.0 * c.determinant()
}

/// Symplectic eigenvalues `(v_-, v_+)` of the partial transpose.
pub fn symplectic_eigenvalue_pt(vs: &Matrix4<f64>) -> Result<(f64, f64)> {
    let sigma = sigma_pt(vs);
    let det = vs.determinant();
    let mut disc = sigma * sigma - 4.0 * det;
    if disc < 0.0 {
        if disc < -1e-10 * (sigma * sigma).max(f64::MIN_POSITIVE) {
            return Err(Error::NonPhysical(format!(
                "Sigma^2 - 4 det = {disc:e} is negative"
            )));
        }
        disc = 0.0;
    }
    let root = disc.sqrt();
    let upper = 0.5 * (sigma + root);
    // (Sigma - root) / 2 written as det / upper to avoid cancellation.
    let lower = if upper > 0.0 {
        det / upper
    } else {
        0.5 * (sigma - root)
    };
    if lower.is_nan() || lower <= 0.0 || !lower.is_finite() || !upper.is_finite() {
        return Err(Error::NonPhysical(format!(
            "symplectic bracket (Sigma - sqrt(disc)) / 2 = {lower:e} is not positive"
        )));
    }
    Ok((lower.sqrt(), upper.sqrt()))
}

pub fn log_negativity(v_minus: f64) -> Result<f64> {
    if v_minus.is_nan() || v_minus <= 0.0 {
        return Err(Error::NonPhysical(format!(
            "symplectic eigenvalue must be > 0, got {v_minus}"
        )));
    }
    let x = 2.0 * v_minus;
    Ok(if x >= 1.0 { 0.0 } else { -x.ln() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegativitySeries {
    pub pair: PairId,
    pub times: Vec<f64>,
    pub v_minus: Vec<f64>,
    pub en: Vec<f64>,
    /// Samples whose covariance was not a physical state; they carry
    /// `v_minus = 1/2` and `E_N = 0`.
    pub nonphysical: Vec<bool>,
}

impl NegativitySeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

pub fn negativity_series(samples: &[TrajectorySample], pair: PairId) -> Result<NegativitySeries> {
    if samples.is_empty() {
        return Err(Error::invalid(
            "samples",
            "negativity series needs at least one sample",
        ));
    }
    let n = samples.len();
    let mut out = NegativitySeries {
        pair,
        times: Vec::with_capacity(n),
        v_minus: Vec::with_capacity(n),
        en: Vec::with_capacity(n),
        nonphysical: Vec::with_capacity(n),
    };
    for s in samples {
        let vs = submatrix(&s.cov, pair);
        let (v, en, bad) =
            match symplectic_eigenvalue_pt(&vs).and_then(|(v, _)| Ok((v, log_negativity(v)?))) {
                Ok((v, en)) => (v, en, false),
                Err(_) => (0.5, 0.0, true),
            };
        out.times.push(s.t);
        out.v_minus.push(v);
        out.en.push(en);
        out.nonphysical.push(bad);
    }
    if out.nonphysical.iter().all(|&b| b) {
        return Err(Error::NonPhysical(format!(
            "every sample of pair {pair} is non-physical"
        )));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pattern {
    NeverEntangled,
    Saturating,
    DeathRevival,
    /// Entangled after onset, then lost for the rest of the horizon.
    Decayed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferCriteria {
    /// E_N level that counts as entangled.
    pub eps_on: f64,
    /// How long the envelope must stay above `eps_on` after onset, s.
    pub hold_window: f64,
    /// Width of the running-maximum envelope, s (one mechanical period).
    pub envelope_period: f64,
}

impl TransferCriteria {
    pub const DEFAULT_EPS_ON: f64 = 1e-4;
    pub const DEFAULT_HOLD_PERIODS: f64 = 10.0;

    pub fn for_mechanical_period(period: f64) -> Self {
        TransferCriteria {
            eps_on: Self::DEFAULT_EPS_ON,
            hold_window: Self::DEFAULT_HOLD_PERIODS * period,
            envelope_period: period,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps_on > 0.0 && self.hold_window > 0.0 && self.envelope_period > 0.0) {
            return Err(Error::invalid(
                "transfer criteria",
                "eps_on, hold_window and envelope_period must be > 0",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    pub pair: PairId,
    /// Entanglement delay `T_D`, s.
    pub onset_time: Option<f64>,
    pub saturation_value: Option<f64>,
    pub pattern: Pattern,
    /// Returns of the envelope to `<= eps_on` after onset.
    pub zero_interval_count: usize,
    /// A candidate onset existed but the series ended before its hold window.
    pub insufficient_horizon: bool,
}

/// Forward running maximum: `env[i] = max{ x[j] : t[i] <= t[j] < t[i] + width }`.
pub fn forward_envelope(times: &[f64], values: &[f64], width: f64) -> Vec<f64> {
    let n = times.len();
    let mut env = vec![0.0; n];
    let mut dq: VecDeque<usize> = VecDeque::new();
    let mut hi = 0;
    for i in 0..n {
        while hi < n && times[hi] < times[i] + width {
            while let Some(&back) = dq.back() {
                if values[back] <= values[hi] {
                    dq.pop_back();
                } else {
                    break;
                }
            }
            dq.push_back(hi);
            hi += 1;
        }
        while let Some(&front) = dq.front() {
            if front < i {
                dq.pop_front();
            } else {
                break;
            }
        }
        env[i] = dq.front().map(|&k| values[k]).unwrap_or(values[i]);
    }
    env
}

/// Maximum of `values` over consecutive non-overlapping blocks of `width`
/// starting at `from`: `(block start time, block max)`. Trailing partial
/// blocks are dropped.
pub fn block_envelope(times: &[f64], values: &[f64], from: f64, width: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let Some(&t_last) = times.last() else {
        return out;
    };
    let mut start = from;
    let mut i = times.partition_point(|&t| t < from);
    while start + width <= t_last {
        let mut m = f64::NEG_INFINITY;
        while i < times.len() && times[i] < start + width {
            m = m.max(values[i]);
            i += 1;
        }
        if m.is_finite() {
            out.push((start, m));
        }
        start += width;
    }
    out
}

pub fn transfer_report(
    series: &NegativitySeries,
    criteria: &TransferCriteria,
) -> Result<TransferReport> {
    criteria.validate()?;
    if series.is_empty() {
        return Err(Error::invalid("series", "empty negativity series"));
    }
    let t = &series.times;
    let en = &series.en;
    let eps = criteria.eps_on;
    let width = criteria.envelope_period;
    let t_last = *t.last().unwrap();
    let env = forward_envelope(t, en, width);
    let n = t.len();

    // next_low[j]: first index >= j whose full envelope window stays <= eps.
    let full_window = |j: usize| t[j] + width <= t_last;
    let mut next_low = vec![usize::MAX; n + 1];
    for j in (0..n).rev() {
        next_low[j] = if full_window(j) && env[j] <= eps {
            j
        } else {
            next_low[j + 1]
        };
    }

    let mut onset = None;
    let mut insufficient = false;
    for i in 0..n {
        if en[i] <= eps {
            continue;
        }
        let hold_end = t[i] + criteria.hold_window;
        if hold_end > t_last {
            insufficient = true;
            break;
        }
        let low = next_low[i];
        if low == usize::MAX || t[low] + width > hold_end {
            onset = Some(i);
            break;
        }
    }

    let Some(i0) = onset else {
        return Ok(TransferReport {
            pair: series.pair,
            onset_time: None,
            saturation_value: None,
            pattern: Pattern::NeverEntangled,
            zero_interval_count: 0,
            insufficient_horizon: insufficient,
        });
    };

    let mut returns = 0;
    let mut revivals = 0;
    let mut below = false;
    for j in i0..n {
        if below {
            if en[j] > eps {
                below = false;
                revivals += 1;
            }
        } else if full_window(j) && env[j] <= eps {
            below = true;
            returns += 1;
        }
    }
    let pattern = if returns == 0 {
        Pattern::Saturating
    } else if revivals > 0 {
        Pattern::DeathRevival
    } else {
        Pattern::Decayed
    };
    let saturation_value = (pattern == Pattern::Saturating).then(|| {
        let tail = (n / 10).max(1);
        env[n - tail..].iter().sum::<f64>() / tail as f64
    });

    Ok(TransferReport {
        pair: series.pair,
        onset_time: Some(t[i0]),
        saturation_value,
        pattern,
        zero_interval_count: returns,
        insufficient_horizon: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix6;

    fn two_mode_squeezed(r: f64) -> Matrix4<f64> {
        let c = (2.0 * r).cosh() / 2.0;
        let s = (2.0 * r).sinh() / 2.0;
        #[rustfmt::skip]
        let m = Matrix4::new(
            c, 0.0, s, 0.0,
            0.0, c, 0.0, -s,
            s, 0.0, c, 0.0,
            0.0, -s, 0.0, c,
        );
        m
    }

    #[test]
    fn identity_submatrices() {
        let v = CovMatrix(Matrix6::identity());
        for p in PairId::ALL {
            assert_eq!(submatrix(&v, p), Matrix4::identity());
        }
    }

    #[test]
    fn lr_block_only_appears_in_lr() {
        let mut m = Matrix6::identity();
        for (i, j) in [(2, 4), (2, 5), (3, 4), (3, 5)] {
            m[(i, j)] = 0.1;
            m[(j, i)] = 0.1;
        }
        let v = CovMatrix(m);
        for p in [PairId::ML, PairId::MR] {
            let s = submatrix(&v, p);
            assert_eq!(s.fixed_view::<2, 2>(0, 2).amax(), 0.0);
        }
        assert_eq!(
            submatrix(&v, PairId::LR).fixed_view::<2, 2>(0, 2).amax(),
            0.1
        );
    }

    #[test]
    fn submatrix_selects_entries() {
        let v = CovMatrix(Matrix6::from_fn(|i, j| (i * 6 + j) as f64));
        for p in PairId::ALL {
            let idx = p.indices();
            let s = submatrix(&v, p);
            for a in 0..4 {
                for b in 0..4 {
                    assert_eq!(s[(a, b)], v.0[(idx[a], idx[b])]);
                }
            }
        }
    }

    #[test]
    fn vacuum_is_separable() {
        let vs = Matrix4::identity() * 0.5;
        assert_eq!(sigma_pt(&vs), 0.5);
        let (vm, vp) = symplectic_eigenvalue_pt(&vs).unwrap();
        assert!((vm - 0.5).abs() < 1e-15 && (vp - 0.5).abs() < 1e-15);
        assert_eq!(log_negativity(vm).unwrap(), 0.0);
    }

    #[test]
    fn squeezed_state_negativity() {
        let (vm, _) = symplectic_eigenvalue_pt(&two_mode_squeezed(0.5)).unwrap();
        assert!((vm - (-1.0f64).exp() / 2.0).abs() < 1e-12);
        assert!((vm - 0.18394).abs() < 1e-5);
        assert!((log_negativity(vm).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn log_negativity_values() {
        assert_eq!(log_negativity(0.5).unwrap(), 0.0);
        assert_eq!(log_negativity(3.0).unwrap(), 0.0);
        assert!((log_negativity(1.0 / (2.0 * std::f64::consts::E)).unwrap() - 1.0).abs() < 1e-15);
        assert!((log_negativity(0.18394).unwrap() - 1.0).abs() < 1e-4);
        assert!(log_negativity(0.0).is_err());
        assert!(log_negativity(-0.1).is_err());
    }

    #[test]
    fn nonphysical_input_rejected() {
        // Cross-correlations stronger than the local variances.
        let mut vs = Matrix4::identity();
        vs[(0, 2)] = 2.0;
        vs[(2, 0)] = 2.0;
        vs[(1, 3)] = 2.0;
        vs[(3, 1)] = 2.0;
        assert!(symplectic_eigenvalue_pt(&vs).is_err());
    }

    fn series(times: Vec<f64>, en: Vec<f64>) -> NegativitySeries {
        let n = times.len();
        NegativitySeries {
            pair: PairId::ML,
            times,
            v_minus: en.iter().map(|e| 0.5 * (-e).exp()).collect(),
            en,
            nonphysical: vec![false; n],
        }
    }

    fn criteria() -> TransferCriteria {
        TransferCriteria {
            eps_on: 1e-4,
            hold_window: 10.0,
            envelope_period: 1.0,
        }
    }

    #[test]
    fn zero_series_never_entangled() {
        let t: Vec<f64> = (0..1000).map(|i| i as f64 * 0.1).collect();
        let s = series(t, vec![0.0; 1000]);
        let r = transfer_report(&s, &criteria()).unwrap();
        assert_eq!(r.pattern, Pattern::NeverEntangled);
        assert_eq!(r.onset_time, None);
        assert!(!r.insufficient_horizon);
    }

    #[test]
    fn delayed_rise_to_plateau() {
        // Times in microseconds scaled to seconds; onset at 89 us.
        let dt = 0.1e-6;
        let t: Vec<f64> = (0..5000).map(|i| i as f64 * dt).collect();
        let en: Vec<f64> = t
            .iter()
            .map(|&x| {
                if x <= 89e-6 {
                    0.0
                } else {
                    0.02 * (1.0 - (-(x - 89e-6) / 20e-6).exp())
                }
            })
            .collect();
        let s = series(t, en);
        let c = TransferCriteria {
            eps_on: 1e-4,
            hold_window: 60e-6,
            envelope_period: 6e-6,
        };
        let r = transfer_report(&s, &c).unwrap();
        assert_eq!(r.pattern, Pattern::Saturating);
        let onset = r.onset_time.unwrap();
        assert!((onset - 89e-6).abs() < 0.5e-6, "onset {onset}");
        let sat = r.saturation_value.unwrap();
        assert!((sat - 0.02).abs() < 1e-3);
    }

    #[test]
    fn death_and_revival() {
        let t: Vec<f64> = (0..6000).map(|i| i as f64 * 0.01).collect();
        let en: Vec<f64> = t
            .iter()
            .map(|&x| {
                if (5.0..20.0).contains(&x) || x >= 30.0 {
                    0.01
                } else {
                    0.0
                }
            })
            .collect();
        let s = series(t, en);
        let r = transfer_report(&s, &criteria()).unwrap();
        assert_eq!(r.pattern, Pattern::DeathRevival);
        assert_eq!(r.zero_interval_count, 1);
        assert!((r.onset_time.unwrap() - 5.0).abs() < 0.02);
        assert_eq!(r.saturation_value, None);
    }

    #[test]
    fn transient_then_gone_is_decayed() {
        let t: Vec<f64> = (0..6000).map(|i| i as f64 * 0.01).collect();
        let en: Vec<f64> = t
            .iter()
            .map(|&x| if (5.0..20.0).contains(&x) { 0.01 } else { 0.0 })
            .collect();
        let r = transfer_report(&series(t, en), &criteria()).unwrap();
        assert_eq!(r.pattern, Pattern::Decayed);
        assert_eq!(r.zero_interval_count, 1);
    }

    #[test]
    fn oscillation_within_a_period_does_not_break_hold() {
        let t: Vec<f64> = (0..4000).map(|i| i as f64 * 0.01).collect();
        let en: Vec<f64> = t
            .iter()
            .map(|&x| {
                if x < 2.0 {
                    0.0
                } else {
                    (0.01 * (6.0 * x).sin()).max(0.0)
                }
            })
            .collect();
        let r = transfer_report(&series(t, en), &criteria()).unwrap();
        assert_eq!(r.pattern, Pattern::Saturating);
        // sin(6t) first turns positive at t = 2 pi / 3.
        assert!((r.onset_time.unwrap() - 2.0 * std::f64::consts::PI / 3.0).abs() < 0.02);
    }

    #[test]
    fn short_horizon_flagged() {
        let t: Vec<f64> = (0..100).map(|i| i as f64 * 0.1).collect();
        let en: Vec<f64> = t.iter().map(|&x| if x > 5.0 { 0.1 } else { 0.0 }).collect();
        let r = transfer_report(&series(t, en), &criteria()).unwrap();
        assert_eq!(r.onset_time, None);
        assert!(r.insufficient_horizon);
    }

    #[test]
    fn envelope_matches_brute_force() {
        let t: Vec<f64> = (0..500).map(|i| i as f64 * 0.037).collect();
        let v: Vec<f64> = t
            .iter()
            .map(|x| (x * 3.1).sin() * (x * 0.7).cos())
            .collect();
        let env = forward_envelope(&t, &v, 0.5);
        for i in 0..t.len() {
            let brute = (i..t.len())
                .take_while(|&j| t[j] < t[i] + 0.5)
                .map(|j| v[j])
                .fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(env[i], brute);
        }
    }
}
