//! Small direct solvers for the banded systems that show up in this crate.
//!
//! Every tridiagonal row `i` reads `lower[i] * x[i-1] + diag[i] * x[i] + upper[i] * x[i+1]`.
//! For the cyclic variant `lower[0]` couples to `x[n-1]` and `upper[n-1]` to `x[0]`.

use crate::error::{Error, Result};

/// LU factors of a (non-cyclic) tridiagonal matrix, reusable across right-hand sides.
#[derive(Debug, Clone)]
pub struct TridiagonalLu {
    lower: Vec<f64>,
    /// Modified super-diagonal `c'_i`.
    upper: Vec<f64>,
    /// Reciprocal pivots.
    inv_pivot: Vec<f64>,
}

impl TridiagonalLu {
    pub fn factor(lower: &[f64], diag: &[f64], upper: &[f64]) -> Result<Self> {
        let n = diag.len();
        assert!(lower.len() == n && upper.len() == n, "band length mismatch");
        let mut c = vec![0.0; n];
        let mut inv = vec![0.0; n];
        for i in 0..n {
            let pivot = if i == 0 {
                diag[0]
            } else {
                diag[i] - lower[i] * c[i - 1]
            };
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::Singular { row: i, pivot });
            }
            inv[i] = 1.0 / pivot;
            c[i] = upper[i] * inv[i];
        }
        Ok(Self {
            lower: lower.to_vec(),
            upper: c,
            inv_pivot: inv,
        })
    }

    pub fn len(&self) -> usize {
        self.inv_pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_pivot.is_empty()
    }

    /// Solves in place: `rhs` holds the right-hand side on entry and the solution on exit.
    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = self.len();
        debug_assert_eq!(rhs.len(), n);
        if n == 0 {
            return;
        }
        rhs[0] *= self.inv_pivot[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.lower[i] * rhs[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.upper[i] * rhs[i + 1];
        }
    }
}

/// Solves a cyclic tridiagonal system by Sherman-Morrison on top of the Thomas algorithm.
pub fn solve_cyclic(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    assert!(n >= 3, "cyclic system needs at least three unknowns");
    // corner entries: beta at (0, n-1), alpha at (n-1, 0)
    let beta = lower[0];
    let alpha = upper[n - 1];
    let gamma = -diag[0];
    let mut d = diag.to_vec();
    d[0] -= gamma;
    d[n - 1] -= alpha * beta / gamma;

    let mut lo = lower.to_vec();
    let mut up = upper.to_vec();
    lo[0] = 0.0;
    up[n - 1] = 0.0;
    let lu = TridiagonalLu::factor(&lo, &d, &up)?;

    let mut x = rhs.to_vec();
    lu.solve_in_place(&mut x);
    let mut z = vec![0.0; n];
    z[0] = gamma;
    z[n - 1] = alpha;
    lu.solve_in_place(&mut z);

    let denom = 1.0 + z[0] + beta * z[n - 1] / gamma;
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::Singular {
            row: n - 1,
            pivot: denom,
        });
    }
    let factor = (x[0] + beta * x[n - 1] / gamma) / denom;
    for (xi, zi) in x.iter_mut().zip(&z) {
        *xi -= factor * zi;
    }
    Ok(x)
}

/// General band matrix with `kl` sub- and `ku` super-diagonals, solved by
/// Gaussian elimination with partial pivoting.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    /// Row-major; row `i` stores columns `i - kl ..= i + ku + kl` (extra room for pivoting fill).
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            data: vec![0.0; n * width],
        }
    }

    fn width(&self) -> usize {
        2 * self.kl + self.ku + 1
    }

    fn slot(&self, row: usize, col: usize) -> usize {
        debug_assert!(col + self.kl >= row && col <= row + self.ku + self.kl);
        row * self.width() + (col + self.kl - row)
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        assert!(
            col + self.kl >= row && col <= row + self.ku,
            "entry ({row}, {col}) outside the band"
        );
        let s = self.slot(row, col);
        self.data[s] = value;
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        if col + self.kl < row || col > row + self.ku + self.kl {
            return 0.0;
        }
        self.data[self.slot(row, col)]
    }

    /// Consumes the matrix and solves `A x = rhs`.
    pub fn solve(mut self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        let (kl, ku) = (self.kl, self.ku);
        let mut b = rhs.to_vec();
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = self.get(k, k).abs();
            for r in k + 1..=last {
                let v = self.get(r, k).abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Singular {
                    row: k,
                    pivot: best,
                });
            }
            let col_end = (k + ku + kl).min(n - 1);
            if p != k {
                for c in k..=col_end {
                    let (sk, sp) = (self.slot(k, c), self.slot(p, c));
                    self.data.swap(sk, sp);
                }
                b.swap(k, p);
            }
            let pivot = self.get(k, k);
            for r in k + 1..=last {
                let m = self.get(r, k) / pivot;
                if m == 0.0 {
                    continue;
                }
                for c in k..=col_end {
                    let v = self.get(k, c);
                    let s = self.slot(r, c);
                    self.data[s] -= m * v;
                }
                b[r] -= m * b[k];
            }
        }
        for k in (0..n).rev() {
            let col_end = (k + ku + kl).min(n - 1);
            let mut acc = b[k];
            for c in k + 1..=col_end {
                acc -= self.get(k, c) * b[c];
            }
            b[k] = acc / self.get(k, k);
        }
        Ok(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic_matvec(lower: &[f64], diag: &[f64], upper: &[f64], x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|i| lower[i] * x[(i + n - 1) % n] + diag[i] * x[i] + upper[i] * x[(i + 1) % n])
            .collect()
    }

    #[test]
    fn thomas_matches_matvec() {
        let n = 12;
        let lower: Vec<f64> = (0..n).map(|i| -1.0 - 0.1 * i as f64).collect();
        let upper: Vec<f64> = (0..n).map(|i| -0.5 + 0.01 * i as f64).collect();
        let diag: Vec<f64> = (0..n).map(|i| 4.0 + (i as f64).sin()).collect();
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).cos()).collect();
        let mut b: Vec<f64> = (0..n)
            .map(|i| {
                let l = if i > 0 { lower[i] * x[i - 1] } else { 0.0 };
                let u = if i + 1 < n { upper[i] * x[i + 1] } else { 0.0 };
                l + diag[i] * x[i] + u
            })
            .collect();
        TridiagonalLu::factor(&lower, &diag, &upper)
            .unwrap()
            .solve_in_place(&mut b);
        for (a, e) in b.iter().zip(&x) {
            assert!((a - e).abs() < 1e-13);
        }
    }

    #[test]
    fn cyclic_solver_recovers_solution() {
        let n = 17;
        let lower: Vec<f64> = (0..n).map(|i| -1.0 - 0.05 * i as f64).collect();
        let upper: Vec<f64> = (0..n).map(|i| -1.2 + 0.02 * i as f64).collect();
        let diag: Vec<f64> = (0..n).map(|i| 2.5 + 0.3 * (i as f64).cos()).collect();
        let x: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64 * 0.3).sin()).collect();
        let b = cyclic_matvec(&lower, &diag, &upper, &x);
        let sol = solve_cyclic(&lower, &diag, &upper, &b).unwrap();
        for (a, e) in sol.iter().zip(&x) {
            assert!((a - e).abs() < 1e-12, "{a} vs {e}");
        }
    }

    #[test]
    fn band_solver_needs_pivoting() {
        // zero leading pivot forces a row swap
        let n = 6;
        let mut m = BandMatrix::zeros(n, 1, 2);
        let mut dense = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i.saturating_sub(1)..=(i + 2).min(n - 1) {
                let v = if i == j && i == 0 {
                    0.0
                } else {
                    1.0 + 0.3 * i as f64 - 0.7 * j as f64 + if i == j { 3.0 } else { 0.0 }
                };
                m.set(i, j, v);
                dense[i][j] = v;
            }
        }
        let x: Vec<f64> = (0..n).map(|i| i as f64 - 2.5).collect();
        let b: Vec<f64> = dense
            .iter()
            .map(|row| row.iter().zip(&x).map(|(a, b)| a * b).sum())
            .collect();
        let sol = m.solve(&b).unwrap();
        for (a, e) in sol.iter().zip(&x) {
            assert!((a - e).abs() < 1e-12, "{a} vs {e}");
        }
    }
}
