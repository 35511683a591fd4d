use rand::Rng;

use super::modp::MatP;

/// Symmetric matrix with entries in `{-1, +1}`, upper triangle packed
/// row by row.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymMatrix {
    n: usize,
    upper: Vec<i8>,
}

#[inline]
fn packed(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

impl SymMatrix {
    /// Number of free entries, `n(n+1)/2`.
    pub fn free_entries(n: usize) -> usize {
        n * (n + 1) / 2
    }

    pub fn from_upper(n: usize, upper: Vec<i8>) -> Self {
        assert_eq!(upper.len(), Self::free_entries(n));
        assert!(upper.iter().all(|&x| x == 1 || x == -1), "entries must be +-1");
        SymMatrix { n, upper }
    }

    /// Bit `b` of `mask` set means the `b`-th packed entry is `+1`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        let upper = (0..Self::free_entries(n)).map(|b| if b < 64 && mask >> b & 1 == 1 { 1 } else { -1 }).collect();
        SymMatrix { n, upper }
    }

    pub fn sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let k = Self::free_entries(n);
        let mut upper = Vec::with_capacity(k);
        while upper.len() < k {
            let bits: u64 = rng.gen();
            for b in 0..64.min(k - upper.len()) {
                upper.push(if bits >> b & 1 == 1 { 1 } else { -1 });
            }
        }
        SymMatrix { n, upper }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.upper[packed(self.n, i, j)]
    }

    pub fn upper(&self) -> &[i8] {
        &self.upper
    }

    pub fn to_i64(&self) -> Vec<i64> {
        let n = self.n;
        (0..n * n).map(|k| self.get(k / n, k % n) as i64).collect()
    }

    pub fn to_modp(&self, p: u64) -> MatP {
        MatP::from_fn(p, self.n, self.n, |i, j| if self.get(i, j) == 1 { 1 } else { p - 1 })
    }

    /// `M_{n-1}`: the first row and column removed.
    pub fn minor_first(&self) -> SymMatrix {
        let n = self.n;
        let mut upper = Vec::with_capacity(Self::free_entries(n.saturating_sub(1)));
        for i in 1..n {
            for j in i..n {
                upper.push(self.get(i, j));
            }
        }
        SymMatrix { n: n - 1, upper }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    #[test]
    fn packing_is_symmetric_and_complete() {
        for n in 1..8 {
            let mut seen = vec![false; SymMatrix::free_entries(n)];
            for i in 0..n {
                for j in i..n {
                    let k = packed(n, i, j);
                    assert!(!seen[k]);
                    seen[k] = true;
                    assert_eq!(k, packed(n, j, i));
                }
            }
            assert!(seen.iter().all(|&x| x));
        }
    }

    #[test]
    fn minor_and_sampling() {
        let m = SymMatrix::from_mask(3, 0b000001);
        assert_eq!(m.get(0, 0), 1);
        assert_eq!(m.get(1, 0), -1);
        let minor = m.minor_first();
        assert_eq!(minor.n(), 2);
        assert_eq!(minor.upper(), &[-1, -1, -1]);
        let s = Stream::new(1);
        assert_eq!(SymMatrix::sample(5, &mut s.rng()), SymMatrix::sample(5, &mut s.rng()));
        let one = SymMatrix::sample(1, &mut s.rng());
        assert!(one.get(0, 0).abs() == 1);
    }

    #[test]
    fn entry_mean_is_centred() {
        let s = Stream::new(2);
        let draws = 100_000;
        let sum: i64 = (0..draws).map(|i| SymMatrix::sample(1, &mut s.index(i).rng()).get(0, 0) as i64).sum();
        // 4 sigma with sigma = sqrt(draws)
        assert!((sum as f64).abs() <= 4.0 * (draws as f64).sqrt(), "sum {sum}");
    }
}
