// SPDX-License-Identifier: Apache-2.0

//! Hand-rolled square-matrix arithmetic on row-major `Vec<f64>`, kept apart
//! from the linear algebra used by the simulator.

#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub n: usize,
    pub a: Vec<f64>,
}

impl Dense {
    pub fn zeros(n: usize) -> Self {
        Dense {
            n,
            a: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Dense::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Dense::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.a[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
    }

    pub fn mul(&self, o: &Dense) -> Dense {
        let n = self.n;
        let mut out = Dense::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let x = self.a[i * n + k];
                if x == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.a[i * n + j] += x * o.a[k * n + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|k| self.a[i * self.n + k] * v[k]).sum())
            .collect()
    }

    pub fn transpose(&self) -> Dense {
        Dense::from_fn(self.n, |i, j| self.get(j, i))
    }

    pub fn add(&self, o: &Dense) -> Dense {
        Dense {
            n: self.n,
            a: self.a.iter().zip(&o.a).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Dense {
        Dense {
            n: self.n,
            a: self.a.iter().map(|x| x * s).collect(),
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// Infinity norm (max row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Solves `m x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` when a pivot falls below `tol * max|m|`.
pub fn gauss_solve(m: &Dense, b: &[f64], tol: f64) -> Option<Vec<f64>> {
    let n = m.n;
    let mut a = m.a.clone();
    let mut x = b.to_vec();
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    for col in 0..n {
        let (piv, pmax) = (col..n)
            .map(|r| (r, a[r * n + col].abs()))
            .fold((col, -1.0), |best, c| if c.1 > best.1 { c } else { best });
        if pmax <= tol * scale {
            return None;
        }
        if piv != col {
            for j in 0..n {
                a.swap(piv * n + j, col * n + j);
            }
            x.swap(piv, col);
        }
        let p = a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] / p;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                a[r * n + j] -= f * a[col * n + j];
            }
            x[r] -= f * x[col];
        }
    }
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|j| a[r * n + j] * x[j]).sum();
        x[r] = (x[r] - s) / a[r * n + r];
    }
    Some(x)
}

/// Lower Cholesky factor of a symmetric positive semidefinite matrix.
/// Zero (or round-off negative) pivots give a zero column.
pub fn cholesky(m: &Dense) -> Dense {
    let n = m.n;
    let mut l = Dense::zeros(n);
    let scale = m.max_abs();
    for j in 0..n {
        let s: f64 = (0..j).map(|k| l.get(j, k) * l.get(j, k)).sum();
        let d = m.get(j, j) - s;
        if d <= 1e-14 * scale {
            continue;
        }
        let djj = d.sqrt();
        l.set(j, j, djj);
        for i in j + 1..n {
            let s: f64 = (0..j).map(|k| l.get(i, k) * l.get(j, k)).sum();
            l.set(i, j, (m.get(i, j) - s) / djj);
        }
    }
    l
}

/// `exp(m)` by truncated Taylor series after scaling to norm <= 1/2, then
/// repeated squaring.
pub fn expm(m: &Dense) -> Dense {
    let norm = m.norm_inf();
    let mut squarings = 0;
    let mut s = 1.0;
    while norm * s > 0.5 {
        s *= 0.5;
        squarings += 1;
    }
    let x = m.scale(s);
    let mut term = Dense::identity(m.n);
    let mut sum = Dense::identity(m.n);
    for k in 1..=20 {
        term = term.mul(&x).scale(1.0 / k as f64);
        sum = sum.add(&term);
    }
    for _ in 0..squarings {
        sum = sum.mul(&sum);
    }
    sum
}

/// Largest real part among the eigenvalues of `m`.
///
/// Uses the spectral radius of `exp(m tau)` estimated by Gelfand's formula,
/// `rho(B) = lim |B^(2^k)|^(1/2^k)`, with renormalisation at every squaring.
pub fn max_real_part(m: &Dense) -> f64 {
    let norm = m.norm_inf().max(f64::MIN_POSITIVE);
    let tau = 1.0 / norm;
    let mut b = expm(&m.scale(tau));
    let mut log_scale = 0.0;
    let mut power = 1.0;
    let mut estimate = f64::NAN;
    for _ in 0..60 {
        let nb = b.norm_inf();
        if nb == 0.0 {
            return f64::NEG_INFINITY;
        }
        b = b.scale(1.0 / nb);
        log_scale += nb.ln() / power;
        estimate = log_scale / tau;
        b = b.mul(&b);
        power *= 2.0;
    }
    estimate
}

/// Characteristic polynomial `det(x I - m)` by Faddeev-LeVerrier, ascending
/// coefficients, monic.
pub fn char_poly(m: &Dense) -> Vec<f64> {
    let n = m.n;
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    let mut mk = Dense::zeros(n);
    for k in 1..=n {
        mk = m.mul(&mk);
        for i in 0..n {
            mk.a[i * n + i] += c[n - k + 1];
        }
        c[n - k] = -m.mul(&mk).trace() / k as f64;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_small_system() {
        let m = Dense {
            n: 3,
            a: vec![0.0, 2.0, 1.0, 1.0, 1.0, 1.0, 2.0, 0.0, 3.0],
        };
        let x = gauss_solve(&m, &[5.0, 5.0, 11.0], 1e-14).unwrap();
        for (g, w) in x.iter().zip([1.0, 1.0, 3.0]) {
            assert!((g - w).abs() < 1e-12);
        }
        assert!(gauss_solve(&Dense::zeros(2), &[1.0, 1.0], 1e-14).is_none());
    }

    #[test]
    fn cholesky_reconstructs() {
        let m = Dense {
            n: 3,
            a: vec![4.0, 2.0, 0.4, 2.0, 5.0, 1.0, 0.4, 1.0, 3.0],
        };
        let l = cholesky(&m);
        let back = l.mul(&l.transpose());
        for (x, y) in back.a.iter().zip(&m.a) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn expm_of_rotation() {
        let t = 2.0;
        let m = Dense {
            n: 2,
            a: vec![0.0, -t, t, 0.0],
        };
        let e = expm(&m);
        assert!((e.get(0, 0) - t.cos()).abs() < 1e-13);
        assert!((e.get(1, 0) - t.sin()).abs() < 1e-13);
    }

    #[test]
    fn max_real_part_of_damped_rotation() {
        // Eigenvalues -0.3 +- 5i and -2.
        let m = Dense {
            n: 3,
            a: vec![-0.3, 5.0, 0.0, -5.0, -0.3, 0.0, 0.0, 0.0, -2.0],
        };
        assert!((max_real_part(&m) + 0.3).abs() < 1e-9);
    }

    #[test]
    fn char_poly_of_triangular() {
        let m = Dense {
            n: 3,
            a: vec![1.0, 7.0, 3.0, 0.0, 2.0, 5.0, 0.0, 0.0, 3.0],
        };
        let c = char_poly(&m);
        let want = [-6.0, 11.0, -6.0, 1.0];
        for (g, w) in c.iter().zip(want) {
            assert!((g - w).abs() < 1e-12);
        }
    }
}
