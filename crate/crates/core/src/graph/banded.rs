//! Banded LU factorization with partial pivoting.
//!
//! Row-interchange pivoting widens the upper band by `kl`, so each stored
//! row covers columns `[i - kl, i + kl + ku]`.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandedLu {
    /// Factor the square matrix given as sparse rows of `(column, value)`.
    pub fn factor(rows: &[Vec<(usize, f64)>]) -> Result<Self> {
        let n = rows.len();
        let (mut kl, mut ku) = (0usize, 0usize);
        for (i, row) in rows.iter().enumerate() {
            for &(j, _) in row {
                if j >= n {
                    return Err(Error::LinearSolveFailure(format!(
                        "column {j} out of range for {n} unknowns"
                    )));
                }
                if j < i {
                    kl = kl.max(i - j);
                } else {
                    ku = ku.max(j - i);
                }
            }
        }
        let width = 2 * kl + ku + 1;
        let mut lu = BandedLu {
            n,
            kl,
            ku,
            width,
            data: vec![0.0; n * width],
            pivots: vec![0; n],
        };
        for (i, row) in rows.iter().enumerate() {
            for &(j, v) in row {
                let k = lu.index(i, j);
                lu.data[k] += v;
            }
        }
        lu.eliminate()?;
        Ok(lu)
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    fn eliminate(&mut self) -> Result<()> {
        let (n, kl, ku, w) = (self.n, self.kl, self.ku, self.width);
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + kl + ku).min(n - 1);
            let mut p = k;
            let mut best = self.data[self.index(k, k)].abs();
            for i in k + 1..=last_row {
                let v = self.data[self.index(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > 0.0) || !best.is_finite() {
                return Err(Error::LinearSolveFailure(format!(
                    "zero or non-finite pivot in column {k}"
                )));
            }
            self.pivots[k] = p;
            if p != k {
                for j in k..=last_col {
                    let a = self.index(k, j);
                    let b = self.index(p, j);
                    self.data.swap(a, b);
                }
            }
            let diag = self.data[self.index(k, k)];
            let span = last_col - k;
            for i in k + 1..=last_row {
                let ik = self.index(i, k);
                let l = self.data[ik] / diag;
                self.data[ik] = l;
                if l == 0.0 {
                    continue;
                }
                let (head, tail) = self.data.split_at_mut(i * w);
                let src_start = k * w + (k + 1 + kl - k);
                let src = &head[src_start..src_start + span];
                let dst_start = k + 1 + kl - i;
                let dst = &mut tail[dst_start..dst_start + span];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d -= l * s;
                }
            }
        }
        Ok(())
    }

    /// Solve `A x = b` in place.
    pub fn solve(&self, b: &mut [f64]) {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        assert_eq!(b.len(), n);
        for k in 0..n {
            b.swap(k, self.pivots[k]);
            let bk = b[k];
            if bk != 0.0 {
                for i in k + 1..=(k + kl).min(n - 1) {
                    b[i] -= self.data[self.index(i, k)] * bk;
                }
            }
        }
        for k in (0..n).rev() {
            let mut s = b[k];
            for j in k + 1..=(k + kl + ku).min(n - 1) {
                s -= self.data[self.index(k, j)] * b[j];
            }
            b[k] = s / self.data[self.index(k, k)];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn lcg(state: &mut u64) -> f64 {
        *state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((*state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
    }

    #[test]
    fn matches_dense_solve() {
        let (n, kl, ku) = (40, 5, 3);
        let mut seed = 7u64;
        let mut rows = vec![Vec::new(); n];
        let mut dense = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                // Small diagonal forces real pivoting.
                let v = if i == j { 0.01 * lcg(&mut seed) } else { lcg(&mut seed) };
                rows[i].push((j, v));
                dense[(i, j)] = v;
            }
        }
        let rhs: Vec<f64> = (0..n).map(|_| lcg(&mut seed)).collect();
        let lu = BandedLu::factor(&rows).unwrap();
        assert_eq!(lu.bandwidths(), (kl, ku));
        let mut x = rhs.clone();
        lu.solve(&mut x);
        let expect = dense.lu().solve(&DVector::from_vec(rhs)).unwrap();
        for i in 0..n {
            assert!((x[i] - expect[i]).abs() < 1e-9 * (1.0 + expect[i].abs()));
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let rows = vec![vec![(0, 1.0), (1, 2.0)], vec![(0, 2.0), (1, 4.0)]];
        assert!(matches!(BandedLu::factor(&rows), Err(Error::LinearSolveFailure(_))));
    }
}
