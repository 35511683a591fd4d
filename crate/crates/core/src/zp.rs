//! Prime moduli, vectors over `Z_p`, and the integer form of the squared
//! distance-to-nearest-integer weight `||r/p||^2`.
//!
//! Every weight is kept as an integer numerator over the implicit
//! denominator `p^2`, so level-set and container membership reduce to
//! integer comparisons.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact nonnegative rational threshold (`t`, `ell`, frozen `log p`, ...).
pub type Threshold = Ratio<u64>;

/// A prime `p > 3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self> {
        if p <= 3 {
            return Err(Error::InvalidModulus(p, "must exceed 3"));
        }
        if p >= 1 << 63 {
            return Err(Error::InvalidModulus(p, "must fit in 63 bits"));
        }
        if !is_prime(p) {
            return Err(Error::InvalidModulus(p, "not prime"));
        }
        Ok(PrimeModulus(p))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn as_usize(self) -> usize {
        self.0 as usize
    }

    /// `p^2`, the denominator of every weight numerator.
    #[inline]
    pub fn square(self) -> u128 {
        (self.0 as u128) * (self.0 as u128)
    }

    /// `floor(p/2)^2`, the largest single-term weight.
    #[inline]
    pub fn max_term_weight(self) -> u128 {
        let h = (self.0 / 2) as u128;
        h * h
    }

    #[inline]
    pub fn reduce(self, x: i64) -> u64 {
        x.rem_euclid(self.0 as i64) as u64
    }

    #[inline]
    pub fn neg(self, r: u64) -> u64 {
        if r == 0 {
            0
        } else {
            self.0 - r
        }
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a as u128 + b as u128;
        (s % self.0 as u128) as u64
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        canonical_product(a, b, self)
    }

    pub fn pow(self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.0;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self, a: u64) -> Option<u64> {
        if a % self.0 == 0 {
            None
        } else {
            Some(self.pow(a, self.0 - 2))
        }
    }

    /// Signed representative in `(-p/2, p/2]`.
    #[inline]
    pub fn signed(self, r: u64) -> i64 {
        if r > self.0 / 2 {
            r as i64 - self.0 as i64
        } else {
            r as i64
        }
    }

    /// The residue of a sign `+1`/`-1`.
    #[inline]
    pub fn sign(self, positive: bool) -> u64 {
        if positive {
            1
        } else {
            self.0 - 1
        }
    }

    /// Natural logarithm frozen once as a double and then read back as the
    /// exact dyadic rational it represents.
    pub fn frozen_log(self) -> Threshold {
        dyadic((self.0 as f64).ln())
    }

    pub fn ln(self) -> f64 {
        (self.0 as f64).ln()
    }
}

impl TryFrom<u64> for PrimeModulus {
    type Error = Error;

    fn try_from(p: u64) -> Result<Self> {
        PrimeModulus::new(p)
    }
}

impl From<PrimeModulus> for u64 {
    fn from(p: PrimeModulus) -> u64 {
        p.0
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `(k * x) mod p` for canonical residues.
#[inline]
pub fn canonical_product(k: u64, x: u64, p: PrimeModulus) -> u64 {
    ((k as u128 * x as u128) % p.get() as u128) as u64
}

/// Numerator of `||r/p||^2` over `p^2`, i.e. `min(r, p - r)^2`.
#[inline]
pub fn term_weight(r: u64, p: PrimeModulus) -> u128 {
    let r = r % p.get();
    let d = r.min(p.get() - r) as u128;
    d * d
}

/// `W <= t * p^2` decided exactly, for a weight numerator `W` over `p^2`.
#[inline]
pub fn weight_at_most(weight: u128, t: Threshold, p: PrimeModulus) -> bool {
    weight * (*t.denom() as u128) <= (*t.numer() as u128) * p.square()
}

/// The exact dyadic rational equal to a finite nonnegative double.
///
/// Panics on negative, non-finite, or out-of-range inputs; thresholds in
/// this crate are always small positive numbers.
pub fn dyadic(x: f64) -> Threshold {
    assert!(x.is_finite() && x >= 0.0, "threshold must be finite and nonnegative");
    if x == 0.0 {
        return Threshold::from_integer(0);
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let (mut mant, mut e) = if exp == 0 {
        (bits & ((1 << 52) - 1), -1074)
    } else {
        ((bits & ((1 << 52) - 1)) | (1 << 52), exp - 1075)
    };
    while mant & 1 == 0 && e < 0 {
        mant >>= 1;
        e += 1;
    }
    if e >= 0 {
        assert!(e < 11, "threshold too large");
        Threshold::from_integer(mant << e)
    } else {
        assert!(-e < 64, "threshold too fine to represent over u64");
        Threshold::new(mant, 1u64 << (-e))
    }
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n % q == 0 {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    'witness: for &a in &SMALL {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime `>= x`, for `3 < x < 2^63`.
pub fn next_prime(x: u64) -> Result<PrimeModulus> {
    if x <= 3 || x >= 1 << 63 {
        return Err(Error::PreconditionViolated(format!(
            "next_prime needs 3 < x < 2^63, got {x}"
        )));
    }
    let mut c = x;
    loop {
        if is_prime(c) {
            return PrimeModulus::new(c);
        }
        c = c.checked_add(1).ok_or(Error::Overflow("no 63-bit prime above input"))?;
        if c >= 1 << 63 {
            return Err(Error::Overflow("no 63-bit prime above input"));
        }
    }
}

/// A vector over `Z_p` with canonical entries and a cached support size.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ZpVector {
    p: PrimeModulus,
    entries: Vec<u64>,
    support: usize,
}

impl ZpVector {
    /// Builds a vector from canonical residues; rejects entries `>= p`.
    pub fn new(p: PrimeModulus, entries: Vec<u64>) -> Result<Self> {
        if let Some((i, &r)) = entries.iter().enumerate().find(|(_, &r)| r >= p.get()) {
            return Err(Error::ResidueOutOfRange { index: i, value: r, p: p.get() });
        }
        let support = entries.iter().filter(|&&r| r != 0).count();
        Ok(ZpVector { p, entries, support })
    }

    /// Reduces arbitrary integers into canonical residues.
    pub fn from_signed(p: PrimeModulus, values: &[i64]) -> Self {
        let entries: Vec<u64> = values.iter().map(|&x| p.reduce(x)).collect();
        let support = entries.iter().filter(|&&r| r != 0).count();
        ZpVector { p, entries, support }
    }

    pub fn zero(p: PrimeModulus, n: usize) -> Self {
        ZpVector { p, entries: vec![0; n], support: 0 }
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `|v|`, the number of nonzero coordinates.
    #[inline]
    pub fn support(&self) -> usize {
        self.support
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.support == 0
    }

    #[inline]
    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        self.entries[i]
    }

    pub fn support_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().enumerate().filter(|(_, &r)| r != 0).map(|(i, _)| i)
    }

    /// `v_Y`: the coordinates listed in `indices`, in that order.
    pub fn restrict(&self, indices: &[usize]) -> ZpVector {
        let entries: Vec<u64> = indices.iter().map(|&i| self.entries[i]).collect();
        let support = entries.iter().filter(|&&r| r != 0).count();
        ZpVector { p: self.p, entries, support }
    }

    /// `v (+) w`, concatenation.
    pub fn concat(&self, other: &ZpVector) -> ZpVector {
        assert_eq!(self.p, other.p, "concatenating vectors over different moduli");
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        ZpVector { p: self.p, entries, support: self.support + other.support }
    }

    pub fn scale(&self, k: u64) -> ZpVector {
        let entries: Vec<u64> = self.entries.iter().map(|&r| self.p.mul(k, r)).collect();
        let support = entries.iter().filter(|&&r| r != 0).count();
        ZpVector { p: self.p, entries, support }
    }

    /// `sum_i ||k v_i / p||^2` as a numerator over `p^2`.
    pub fn weight_at(&self, k: u64) -> u128 {
        self.entries.iter().map(|&r| term_weight(canonical_product(k, r, self.p), self.p)).sum()
    }
}

impl fmt::Display for ZpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={};", self.p)?;
        for r in &self.entries {
            write!(f, " {r}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pm(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    fn sieve(limit: usize) -> Vec<bool> {
        let mut is = vec![true; limit + 1];
        is[0] = false;
        is[1] = false;
        let mut i = 2;
        while i * i <= limit {
            if is[i] {
                let mut j = i * i;
                while j <= limit {
                    is[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        is
    }

    #[test]
    fn canonical_product_examples() {
        let p = pm(7);
        assert_eq!(canonical_product(0, 5, p), 0);
        assert_eq!(canonical_product(1, 5, p), 5);
        assert_eq!(canonical_product(3, 4, p), 5);
    }

    #[test]
    fn term_weight_examples() {
        assert_eq!(term_weight(0, pm(5)), 0);
        assert_eq!(term_weight(1, pm(5)), 1);
        assert_eq!(term_weight(6, pm(7)), 1);
        assert_eq!(term_weight(3, pm(7)), 9);
        assert_eq!(pm(7).max_term_weight(), 9);
    }

    #[test]
    fn next_prime_examples() {
        assert_eq!(next_prime(4).unwrap().get(), 5);
        assert_eq!(next_prime(90).unwrap().get(), 97);
        assert_eq!(next_prime(7).unwrap().get(), 7);
        assert!(next_prime(3).is_err());
        assert!(next_prime(1 << 63).is_err());
    }

    #[test]
    fn next_prime_matches_sieve() {
        let is = sieve(20_000);
        for x in 4..19_000u64 {
            let expect = (x as usize..).find(|&c| is[c]).unwrap() as u64;
            assert_eq!(next_prime(x).unwrap().get(), expect, "x = {x}");
        }
    }

    #[test]
    fn primality_on_large_known_values() {
        assert!(is_prime(2_305_843_009_213_693_951)); // 2^61 - 1
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to 2, 3, 5, 7
        assert!(!is_prime(341_550_071_728_321));
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn modulus_validation() {
        assert!(PrimeModulus::new(3).is_err());
        assert!(PrimeModulus::new(9).is_err());
        assert!(PrimeModulus::new(11).is_ok());
    }

    #[test]
    fn vector_support_and_range() {
        let p = pm(7);
        let v = ZpVector::new(p, vec![0, 3, 0, 6]).unwrap();
        assert_eq!(v.support(), 2);
        assert!(ZpVector::new(p, vec![1, 7]).is_err());
        let w = ZpVector::from_signed(p, &[-1, 8, 0]);
        assert_eq!(w.entries(), &[6, 1, 0]);
        assert_eq!(v.restrict(&[1, 2]).entries(), &[3, 0]);
        assert_eq!(v.concat(&w).support(), 4);
    }

    #[test]
    fn dyadic_is_exact() {
        let t = dyadic(0.375);
        assert_eq!(t, Threshold::new(3, 8));
        let l = pm(101).frozen_log();
        let back = *l.numer() as f64 / *l.denom() as f64;
        assert_eq!(back, 101f64.ln());
    }

    #[test]
    fn weight_comparison_is_exact() {
        let p = pm(5);
        // weight 2 over 25 against t = 2/25: equal, so included
        assert!(weight_at_most(2, Threshold::new(2, 25), p));
        assert!(!weight_at_most(3, Threshold::new(2, 25), p));
    }

    // Inequalities used when bounding characteristic functions and the
    // container sizes, scanned on a dense grid.
    #[test]
    fn scalar_inequality_scans() {
        let dist = |x: f64| (x - x.round()).abs();
        for i in 0..=1000 {
            let x = i as f64 / 1000.0;
            let d = dist(x);
            let pi = std::f64::consts::PI;
            assert!((pi * x).cos().abs() <= (-d * d).exp() + 1e-15, "x={x}");
            assert!(1.0 - 2.0 * pi * pi * d * d <= (2.0 * pi * x).cos() + 1e-15, "x={x}");
            // With 16 in place of 2 pi^2 the bound only holds away from 0:
            // near 0 the cosine falls off at rate 2 pi^2 > 16.
            let sixteen = 1.0 - 16.0 * d * d <= (2.0 * pi * x).cos() + 1e-15;
            assert_eq!(sixteen, d == 0.0 || d >= 0.25, "x={x}");
        }
    }

    proptest! {
        #[test]
        fn term_weight_symmetric_and_bounded(p in prop::sample::select(vec![5u64, 7, 11, 13, 101, 1009]), r in 1u64..1009, k in 0u64..1009) {
            let p = pm(p);
            let r = r % p.get();
            prop_assume!(r != 0);
            prop_assert_eq!(term_weight(r, p), term_weight(p.get() - r, p));
            prop_assert!(term_weight(canonical_product(k % p.get(), r, p), p) <= p.max_term_weight());
        }

        #[test]
        fn inverse_round_trips(a in 1u64..1009) {
            let p = pm(1009);
            let inv = p.inv(a).unwrap();
            prop_assert_eq!(p.mul(a, inv), 1);
        }
    }
}
