//! Dense linear algebra over `F_p` for word-size primes.

use crate::error::{Error, Result};

#[inline]
pub fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub fn addmod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (if s >= p as u128 { s - p as u128 } else { s }) as u64
}

#[inline]
pub fn submod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

pub fn powmod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    acc
}

/// Inverse of a nonzero residue (Fermat).
pub fn invmod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    powmod(a, p - 2, p)
}

#[inline]
pub fn from_i64(x: i64, p: u64) -> u64 {
    x.rem_euclid(p as i64) as u64
}

/// Row-major matrix over `F_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatP {
    p: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl MatP {
    pub fn zeros(p: u64, rows: usize, cols: usize) -> Self {
        MatP { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: u64, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.set(i, i, 1 % p);
        }
        m
    }

    pub fn from_fn(p: u64, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> u64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j) % p);
            }
        }
        MatP { p, rows, cols, data }
    }

    pub fn from_rows(p: u64, rows: &[Vec<u64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self::from_fn(p, rows.len(), cols, |i, j| rows[i][j])
    }

    pub fn from_signed(p: u64, rows: usize, cols: usize, values: &[i64]) -> Self {
        assert_eq!(values.len(), rows * cols);
        Self::from_fn(p, rows, cols, |i, j| from_i64(values[i * cols + j], p))
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: u64) {
        self.data[i * self.cols + j] = x % self.p;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> MatP {
        MatP::from_fn(self.p, self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn mul(&self, other: &MatP) -> MatP {
        assert_eq!(self.cols, other.rows);
        let p = self.p;
        MatP::from_fn(p, self.rows, other.cols, |i, j| {
            (0..self.cols).fold(0, |acc, k| addmod(acc, mulmod(self.get(i, k), other.get(k, j), p), p))
        })
    }

    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(self.cols, v.len());
        let p = self.p;
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(0, |acc, (&a, &b)| addmod(acc, mulmod(a, b, p), p)))
            .collect()
    }

    /// Deletes row `r` and column `c`.
    pub fn minor(&self, r: usize, c: usize) -> MatP {
        let mut data = Vec::with_capacity((self.rows - 1) * (self.cols - 1));
        for i in (0..self.rows).filter(|&i| i != r) {
            for j in (0..self.cols).filter(|&j| j != c) {
                data.push(self.get(i, j));
            }
        }
        MatP { p: self.p, rows: self.rows - 1, cols: self.cols - 1, data }
    }

    /// Row echelon form in place; returns pivot columns and the number of
    /// row swaps performed.
    fn echelon(&mut self) -> (Vec<usize>, usize) {
        let p = self.p;
        let mut pivots = Vec::new();
        let mut swaps = 0;
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(piv) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if piv != r {
                for j in 0..self.cols {
                    self.data.swap(piv * self.cols + j, r * self.cols + j);
                }
                swaps += 1;
            }
            let inv = invmod(self.get(r, c), p);
            for i in (r + 1)..self.rows {
                let f = mulmod(self.get(i, c), inv, p);
                if f == 0 {
                    continue;
                }
                for j in c..self.cols {
                    let x = submod(self.get(i, j), mulmod(f, self.get(r, j), p), p);
                    self.data[i * self.cols + j] = x;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (pivots, swaps)
    }

    pub fn rank(&self) -> usize {
        self.clone().echelon().0.len()
    }

    pub fn det(&self) -> u64 {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let mut m = self.clone();
        let (pivots, swaps) = m.echelon();
        if pivots.len() < self.rows {
            return 0;
        }
        let d = (0..self.rows).fold(1 % self.p, |acc, i| mulmod(acc, m.get(i, i), self.p));
        if swaps % 2 == 1 {
            submod(0, d, self.p)
        } else {
            d
        }
    }

    /// Reduced row echelon form by Gauss-Jordan, with its pivot columns.
    pub fn rref(&self) -> (MatP, Vec<usize>) {
        let p = self.p;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(piv) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            for j in 0..m.cols {
                m.data.swap(piv * m.cols + j, r * m.cols + j);
            }
            let inv = invmod(m.get(r, c), p);
            for j in 0..m.cols {
                let x = mulmod(m.get(r, j), inv, p);
                m.set(r, j, x);
            }
            for i in (0..m.rows).filter(|&i| i != r) {
                let f = m.get(i, c);
                if f != 0 {
                    for j in 0..m.cols {
                        let x = submod(m.get(i, j), mulmod(f, m.get(r, j), p), p);
                        m.set(i, j, x);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn inverse(&self) -> Result<MatP> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let aug = MatP::from_fn(self.p, n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j)
            } else if j - n == i {
                1
            } else {
                0
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::SingularMatrix);
        }
        Ok(MatP::from_fn(self.p, n, n, |i, j| r.get(i, j + n)))
    }

    /// Transposed cofactor matrix, by `(n-1) x (n-1)` determinants.
    pub fn adjugate(&self) -> MatP {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let p = self.p;
        if n == 1 {
            return MatP::identity(p, 1);
        }
        MatP::from_fn(p, n, n, |i, j| {
            let d = self.minor(j, i).det();
            if (i + j) % 2 == 1 {
                submod(0, d, p)
            } else {
                d
            }
        })
    }
}

/// `rank` of a list of row vectors.
pub fn rank_mod_p(rows: &[Vec<u64>], p: u64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    MatP::from_rows(p, rows).rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;
    use rand::Rng;

    #[test]
    fn small_examples() {
        let p = 7;
        let ones = MatP::from_fn(p, 4, 4, |_, _| 1);
        assert_eq!(ones.rank(), 1);
        assert_eq!(ones.det(), 0);
        let m = MatP::from_signed(p, 2, 2, &[1, 1, 1, -1]);
        assert_eq!(m.det(), 5);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), MatP::identity(p, 2));
        assert!(matches!(ones.inverse(), Err(Error::SingularMatrix)));
        assert_eq!(rank_mod_p(&[], 5), 0);
    }

    #[test]
    fn rank_agrees_with_reduced_echelon() {
        let mut rng = Stream::new(21).rng();
        for _ in 0..500 {
            let p = [5u64, 7, 11, 13][rng.gen_range(0..4)];
            let (r, c) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
            // low-rank-ish entries to exercise degeneracy
            let m = MatP::from_fn(p, r, c, |_, _| if rng.gen_bool(0.5) { 0 } else { rng.gen_range(0..p) });
            let (red, pivots) = m.rref();
            let nonzero_rows = (0..r).filter(|&i| red.row(i).iter().any(|&x| x != 0)).count();
            assert_eq!(m.rank(), nonzero_rows);
            assert_eq!(pivots.len(), nonzero_rows);
            if r == c {
                assert_eq!(m.det() == 0, m.rank() < r);
            }
        }
    }

    #[test]
    fn adjugate_identity() {
        let mut rng = Stream::new(22).rng();
        for _ in 0..100 {
            let p = 13;
            let n = rng.gen_range(1..=5);
            let m = MatP::from_fn(p, n, n, |_, _| rng.gen_range(0..p));
            let adj = m.adjugate();
            let d = m.det();
            let mut scaled = MatP::identity(p, n);
            for i in 0..n {
                scaled.set(i, i, d);
            }
            assert_eq!(m.mul(&adj), scaled);
        }
    }
}
