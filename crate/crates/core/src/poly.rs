// SPDX-License-Identifier: Apache-2.0

//! Small dense real polynomials (coefficients in ascending powers).

use nalgebra::Matrix6;

#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<f64>);

/// A real root with the multiplicity detected at it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealRoot {
    pub value: f64,
    pub multiplicity: u32,
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Poly(coeffs)
    }

    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Sum of `|c_k| |x|^k`; the magnitude against which `eval(x)` is judged.
    pub fn eval_scale(&self, x: f64) -> f64 {
        let ax = x.abs();
        self.0.iter().rev().fold(0.0, |acc, &c| acc * ax + c.abs())
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly(vec![0.0]);
        }
        Poly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            for (j, &b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let get = |p: &Poly, i: usize| p.0.get(i).copied().unwrap_or(0.0);
        Poly::new((0..n).map(|i| get(self, i) + get(other, i)).collect())
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::new(self.0.iter().map(|c| c * s).collect())
    }

    /// Substitutes `x -> w x`.
    pub fn compose_scale(&self, w: f64) -> Poly {
        let mut f = 1.0;
        Poly::new(
            self.0
                .iter()
                .map(|&c| {
                    let v = c * f;
                    f *= w;
                    v
                })
                .collect(),
        )
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.0.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }

    /// All real roots in `[lo, hi]`, ascending, each reported once.
    ///
    /// Critical points (roots of the derivative, found recursively) split the
    /// interval into pieces on which the polynomial is monotone; each piece
    /// with a sign change is bisected to machine precision. Tangential roots
    /// are caught at the critical points themselves.
    pub fn real_roots(&self, lo: f64, hi: f64, tangency_tol: f64) -> Vec<RealRoot> {
        if self.is_zero() || self.degree() == 0 {
            return Vec::new();
        }
        let crit: Vec<f64> = if self.degree() >= 2 {
            self.derivative()
                .real_roots(lo, hi, tangency_tol)
                .into_iter()
                .map(|r| r.value)
                .collect()
        } else {
            Vec::new()
        };
        let mut knots = Vec::with_capacity(crit.len() + 2);
        knots.push(lo);
        knots.extend(crit.iter().copied().filter(|&c| c > lo && c < hi));
        knots.push(hi);

        let mut roots: Vec<f64> = Vec::new();
        for w in knots.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (self.eval(a), self.eval(b));
            if fa == 0.0 {
                roots.push(a);
            }
            if fb == 0.0 {
                roots.push(b);
            }
            if fa.signum() * fb.signum() < 0.0 {
                roots.push(bisect(|x| self.eval(x), a, b, fa));
            }
        }
        // Tangential roots: a critical point where the value is round-off small.
        for &c in &crit {
            if c >= lo && c <= hi && self.eval(c).abs() <= tangency_tol * self.eval_scale(c) {
                roots.push(c);
            }
        }
        roots.sort_by(|a, b| a.total_cmp(b));
        let span = (hi - lo).abs().max(f64::MIN_POSITIVE);
        let mut merged: Vec<f64> = Vec::new();
        for r in roots {
            match merged.last() {
                Some(&last) if (r - last).abs() <= 1e-10 * span => {}
                _ => merged.push(r),
            }
        }
        merged
            .into_iter()
            .map(|value| RealRoot {
                value,
                multiplicity: self.multiplicity_at(value, tangency_tol),
            })
            .collect()
    }

    /// Number of leading derivatives that vanish (to `tol`) at `x`.
    pub fn multiplicity_at(&self, x: f64, tol: f64) -> u32 {
        let mut m = 1;
        let mut d = self.derivative();
        while d.degree() > 0 {
            if d.eval(x).abs() > tol.sqrt() * d.eval_scale(x).max(f64::MIN_POSITIVE) {
                break;
            }
            m += 1;
            d = d.derivative();
        }
        m
    }
}

/// Bisection on a bracket with a sign change, to the last representable bit.
pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..2000 {
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Characteristic polynomial `det(lambda I - A)` by Faddeev-LeVerrier,
/// ascending coefficients, monic.
pub fn characteristic_polynomial(a: &Matrix6<f64>) -> Poly {
    let n = 6;
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    let mut m = Matrix6::<f64>::zeros();
    for k in 1..=n {
        m = a * m + Matrix6::identity() * c[n - k + 1];
        c[n - k] = -(a * m).trace() / k as f64;
    }
    Poly(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factored_quartic_roots() {
        // (x^2 - 1)(x^2 - 4) = x^4 - 5x^2 + 4
        let p = Poly::new(vec![4.0, 0.0, -5.0, 0.0, 1.0]);
        let r: Vec<f64> = p
            .real_roots(-10.0, 10.0, 1e-12)
            .iter()
            .map(|r| r.value)
            .collect();
        assert_eq!(r.len(), 4);
        for (got, want) in r.iter().zip([-2.0, -1.0, 1.0, 2.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn double_root_found_and_counted() {
        // (x - 1)^2 (x + 3)
        let p = Poly::new(vec![1.0, -2.0, 1.0]).mul(&Poly::new(vec![3.0, 1.0]));
        let r = p.real_roots(-10.0, 10.0, 1e-12);
        assert_eq!(r.len(), 2);
        assert!((r[0].value + 3.0).abs() < 1e-12);
        assert_eq!(r[0].multiplicity, 1);
        assert!((r[1].value - 1.0).abs() < 1e-7);
        assert_eq!(r[1].multiplicity, 2);
    }

    #[test]
    fn no_roots_for_positive_polynomial() {
        let p = Poly::new(vec![1.0, 0.0, 1.0, 0.0, 1.0]);
        assert!(p.real_roots(-100.0, 100.0, 1e-12).is_empty());
    }

    #[test]
    fn char_poly_of_diagonal() {
        let a = Matrix6::from_diagonal(&nalgebra::Vector6::new(-1.0, -2.0, -3.0, -4.0, -5.0, -6.0));
        let p = characteristic_polynomial(&a);
        for k in 1..=6 {
            assert!(p.eval(-(k as f64)).abs() < 1e-9);
        }
        assert_eq!(p.0[6], 1.0);
        assert!((p.0[0] - 720.0).abs() < 1e-9);
    }

    #[test]
    fn compose_scale_substitutes() {
        let p = Poly::new(vec![1.0, 2.0, 3.0]);
        let q = p.compose_scale(2.0);
        assert_eq!(q.eval(1.5), p.eval(3.0));
    }
}
