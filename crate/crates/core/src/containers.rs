//! Level sets `T_t(v)`, frequency sets `F(w)`, container sets `C(S)`, and the
//! deterministic lemmas relating them.
//!
//! All membership tests are exact: the weight `sum_i ||k v_i / p||^2` is an
//! integer numerator over `p^2`, compared against rational thresholds by
//! cross-multiplication.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets::ResidueSet;
use crate::zp::{canonical_product, term_weight, weight_at_most, PrimeModulus, Threshold, ZpVector};

/// Container membership divisor: `a` is kept when the mean weight over `S`
/// is at most `1/32`.
pub const CONTAINER_DIVISOR: u128 = 32;

/// `W(k) = sum_i term_weight(k v_i)` for every `k` in `Z_p`.
#[derive(Clone, Debug)]
pub struct WeightProfile {
    p: PrimeModulus,
    weights: Vec<u128>,
}

impl WeightProfile {
    pub fn of(v: &ZpVector) -> Self {
        let p = v.modulus();
        let pu = p.as_usize();
        // Histogram of residues; W only depends on it.
        let mut hist: Vec<(u64, u128)> = Vec::new();
        if v.support() > 0 {
            let mut counts = std::collections::BTreeMap::<u64, u128>::new();
            for &r in v.entries() {
                if r != 0 {
                    *counts.entry(r).or_default() += 1;
                }
            }
            hist.extend(counts);
        }
        let mut weights = vec![0u128; pu];
        for k in 1..=(pu / 2) {
            let w: u128 = hist
                .iter()
                .map(|&(r, c)| c * term_weight(canonical_product(k as u64, r, p), p))
                .sum();
            weights[k] = w;
            weights[pu - k] = w;
        }
        WeightProfile { p, weights }
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    #[inline]
    pub fn weight(&self, k: u64) -> u128 {
        self.weights[k as usize]
    }

    pub fn weights(&self) -> &[u128] {
        &self.weights
    }

    pub fn level(&self, t: Threshold) -> ResidueSet {
        let mut s = ResidueSet::empty(self.p);
        for (k, &w) in self.weights.iter().enumerate() {
            if weight_at_most(w, t, self.p) {
                s.insert(k as u64);
            }
        }
        s
    }

    pub fn level_size(&self, t: Threshold) -> usize {
        self.weights.iter().filter(|&&w| weight_at_most(w, t, self.p)).count()
    }
}

/// `T_t(v)` together with the threshold that produced it.
#[derive(Clone, Debug)]
pub struct LevelSet {
    pub t: Threshold,
    pub members: ResidueSet,
}

impl LevelSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, k: u64) -> bool {
        self.members.contains(k)
    }
}

/// `T_t(v) = { k : sum_i ||k v_i / p||^2 <= t }`.
pub fn level_set(v: &ZpVector, t: Threshold) -> LevelSet {
    LevelSet { t, members: WeightProfile::of(v).level(t) }
}

/// `F(w) = T_{log p}(w)`, with `log p` frozen as a double.
pub fn frequency_set(w: &ZpVector) -> ResidueSet {
    level_set(w, w.modulus().frozen_log()).members
}

/// `C(S)` together with the frequency set it was built from.
#[derive(Clone, Debug)]
pub struct ContainerSet {
    pub frequencies: ResidueSet,
    pub members: ResidueSet,
}

impl ContainerSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, a: u64) -> bool {
        self.members.contains(a)
    }

    /// `|C(S)| <= 4p/|S|`, exactly: `|S| * |C(S)| <= 4p`. Vacuous for empty `S`.
    pub fn size_bound_holds(&self) -> bool {
        let s = self.frequencies.len() as u128;
        s == 0 || s * self.len() as u128 <= 4 * self.frequencies.modulus().get() as u128
    }
}

/// Whether `a` belongs to `C(S)`: `32 * sum_{k in S} ||a k / p||^2 <= |S|`.
pub fn container_contains(frequencies: &ResidueSet, a: u64) -> bool {
    let p = frequencies.modulus();
    let total: u128 = frequencies.iter().map(|k| term_weight(canonical_product(a, k, p), p)).sum();
    CONTAINER_DIVISOR * total <= frequencies.len() as u128 * p.square()
}

/// `C(S) = { a : sum_{k in S} ||a k / p||^2 <= |S| / 32 }`; `C(empty) = Z_p`.
pub fn container(frequencies: &ResidueSet) -> ContainerSet {
    let p = frequencies.modulus();
    let mut members = ResidueSet::empty(p);
    for a in 0..p.get() {
        if container_contains(frequencies, a) {
            members.insert(a);
        }
    }
    ContainerSet { frequencies: frequencies.clone(), members }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContainmentCheck {
    /// `|{ i : v_i not in C(S) }|`
    pub outside: usize,
    /// `outside <= n/4`
    pub holds: bool,
}

/// Counts coordinates of `v` outside `C(S)`, for `S` inside `T_t(v)` with
/// `t <= n/128`; the count can never exceed `n/4` under those conditions.
pub fn lemma_contain_check(v: &ZpVector, frequencies: &ResidueSet, t: Threshold) -> Result<ContainmentCheck> {
    let n = v.len() as u128;
    if 128 * (*t.numer() as u128) > n * (*t.denom() as u128) {
        return Err(Error::PreconditionViolated(format!("t = {t} exceeds n/128 for n = {n}")));
    }
    let level = level_set(v, t);
    if !frequencies.is_subset(&level.members) {
        return Err(Error::PreconditionViolated("S is not contained in T_t(v)".into()));
    }
    let c = container(frequencies);
    let outside = v.entries().iter().filter(|&&r| !c.contains(r)).count();
    Ok(ContainmentCheck { outside, holds: 4 * outside as u128 <= n })
}

/// The progression `{ a + j_1 l_1 + ... + j_d l_d : 1 <= j_i <= k_i }` as a set.
pub fn gap_elements(a: u64, steps: &[u64], sizes: &[u64], p: PrimeModulus) -> Result<ResidueSet> {
    if steps.is_empty() || steps.len() != sizes.len() {
        return Err(Error::PreconditionViolated("need d >= 1 steps with matching sizes".into()));
    }
    if sizes.contains(&0) {
        return Err(Error::PreconditionViolated("every size k_i must be at least 1".into()));
    }
    let volume = sizes.iter().try_fold(1u64, |acc, &k| acc.checked_mul(k));
    if volume.map_or(true, |v| v > 1 << 24) {
        return Err(Error::GuardExceeded("progression index box larger than 2^24".into()));
    }
    let mut current = ResidueSet::from_iter(p, [a % p.get()]);
    for (&l, &k) in steps.iter().zip(sizes) {
        let mut next = ResidueSet::empty(p);
        for x in current.iter() {
            for j in 1..=k {
                next.insert(p.add(x, canonical_product(j % p.get(), l % p.get(), p)));
            }
        }
        current = next;
    }
    Ok(current)
}

/// `n` entries drawn independently and uniformly from a generalised
/// arithmetic progression.
pub fn gen_gap_vector<R: Rng + ?Sized>(
    a: u64,
    steps: &[u64],
    sizes: &[u64],
    n: usize,
    p: PrimeModulus,
    rng: &mut R,
) -> Result<ZpVector> {
    let q = gap_elements(a, steps, sizes, p)?.to_vec();
    let entries = (0..n).map(|_| q[rng.gen_range(0..q.len())]).collect();
    ZpVector::new(p, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;
    use proptest::prelude::*;
    use rand::Rng;

    fn pm(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    fn t(n: u64, d: u64) -> Threshold {
        Threshold::new(n, d)
    }

    // Independent oracle: floating weights with a margin, only used where
    // no weight sits near the threshold.
    fn float_level(v: &ZpVector, t: f64) -> Vec<u64> {
        let p = v.modulus().get();
        (0..p)
            .filter(|&k| {
                let s: f64 = v
                    .entries()
                    .iter()
                    .map(|&r| {
                        let x = (k * r) as f64 / p as f64;
                        let d = x - x.round();
                        d * d
                    })
                    .sum();
                s <= t
            })
            .collect()
    }

    #[test]
    fn level_set_at_zero_is_origin() {
        let v = ZpVector::new(pm(11), vec![1, 0, 4]).unwrap();
        assert_eq!(level_set(&v, t(0, 1)).members.to_vec(), vec![0]);
    }

    #[test]
    fn level_set_of_zero_vector_is_everything() {
        let v = ZpVector::zero(pm(7), 5);
        for th in [t(0, 1), t(1, 3), t(5, 1)] {
            assert!(level_set(&v, th).members.is_full());
        }
    }

    #[test]
    fn level_set_small_example() {
        // v = (1,1) over Z_5: weights 2*min(k,5-k)^2 / 25 = 0, 2/25, 8/25, 8/25, 2/25
        let v = ZpVector::new(pm(5), vec![1, 1]).unwrap();
        assert_eq!(level_set(&v, t(1, 10)).members.to_vec(), vec![0, 1, 4]);
        assert_eq!(level_set(&v, t(2, 25)).members.to_vec(), vec![0, 1, 4]);
        assert_eq!(level_set(&v, t(1, 25)).members.to_vec(), vec![0]);
        assert_eq!(level_set(&v, t(8, 25)).members.len(), 5);
    }

    #[test]
    fn frequency_set_all_ones() {
        // 20 * min(k, 7-k)^2 <= ln(7) * 49 = 95.35..  => k in {0, 1, 2, 5, 6}
        let w = ZpVector::new(pm(7), vec![1; 20]).unwrap();
        let f = frequency_set(&w);
        let expect: Vec<u64> = (0..7u64)
            .filter(|&k| 20.0 * (k.min(7 - k) as f64).powi(2) <= 7f64.ln() * 49.0)
            .collect();
        assert_eq!(f.to_vec(), expect);
        assert_eq!(f.to_vec(), vec![0, 1, 2, 5, 6]);
        assert!(frequency_set(&ZpVector::zero(pm(7), 3)).is_full());
    }

    #[test]
    fn container_edge_cases() {
        let p = pm(13);
        assert!(container(&ResidueSet::empty(p)).members.is_full());
        let c0 = container(&ResidueSet::from_iter(p, [0]));
        assert!(c0.members.is_full());
        assert!(c0.size_bound_holds());
    }

    #[test]
    fn container_size_bound_random() {
        let p = pm(61);
        let mut rng = Stream::new(7).rng();
        for _ in 0..50 {
            let mut s = ResidueSet::empty(p);
            while s.len() < 8 {
                s.insert(rng.gen_range(0..61));
            }
            let c = container(&s);
            assert!(8 * c.len() <= 4 * 61, "|C(S)| = {}", c.len());
        }
    }

    #[test]
    fn containment_with_origin_only() {
        let p = pm(31);
        let v = ZpVector::new(p, (0..64).map(|i| (i * 7) % 31).collect()).unwrap();
        let chk = lemma_contain_check(&v, &ResidueSet::from_iter(p, [0]), t(0, 1)).unwrap();
        assert_eq!(chk.outside, 0);
        assert!(chk.holds);
    }

    #[test]
    fn containment_preconditions() {
        let p = pm(31);
        let v = ZpVector::new(p, vec![1; 64]).unwrap();
        // t = 1 > 64/128
        assert!(lemma_contain_check(&v, &ResidueSet::from_iter(p, [0]), t(1, 1)).is_err());
        // S = {5} not in T_{1/2}(v)
        assert!(lemma_contain_check(&v, &ResidueSet::from_iter(p, [5]), t(1, 2)).is_err());
    }

    #[test]
    fn containment_on_gap_vector() {
        let p = pm(101);
        let mut rng = Stream::new(11).rng();
        let v = gen_gap_vector(0, &[1], &[8], 256, p, &mut rng).unwrap();
        let s = level_set(&v, t(2, 1)).members;
        let chk = lemma_contain_check(&v, &s, t(2, 1)).unwrap();
        assert!(chk.holds, "outside = {}", chk.outside);
    }

    #[test]
    fn gap_generator_examples() {
        let p = pm(101);
        let mut rng = Stream::new(3).rng();
        let c = gen_gap_vector(9, &[0], &[1], 10, p, &mut rng).unwrap();
        assert!(c.entries().iter().all(|&r| r == 9));
        let v = gen_gap_vector(0, &[1], &[3], 200, p, &mut rng).unwrap();
        assert!(v.entries().iter().all(|&r| (1..=3).contains(&r)));
        let q = gap_elements(5, &[3, 17], &[4, 2], p).unwrap();
        let mut expect = ResidueSet::empty(p);
        for j1 in 1..=4 {
            for j2 in 1..=2 {
                expect.insert((5 + 3 * j1 + 17 * j2) % 101);
            }
        }
        assert_eq!(q, expect);
        let w = gen_gap_vector(5, &[3, 17], &[4, 2], 300, p, &mut rng).unwrap();
        assert!(w.entries().iter().all(|&r| expect.contains(r)));
        assert!(gap_elements(0, &[], &[], p).is_err());
        assert!(gap_elements(0, &[1], &[0], p).is_err());
    }

    #[test]
    fn level_set_agrees_with_float_oracle_away_from_ties() {
        let p = pm(101);
        let mut rng = Stream::new(5).rng();
        for _ in 0..20 {
            let v = ZpVector::new(p, (0..40).map(|_| rng.gen_range(0..101)).collect()).unwrap();
            // t = 7/2 is not hit exactly: weights are k/10201 and 3.5*10201 is not an integer
            let exact = level_set(&v, t(7, 2)).members.to_vec();
            assert_eq!(exact, float_level(&v, 3.5));
        }
    }

    proptest! {
        #[test]
        fn level_sets_are_monotone(entries in prop::collection::vec(0u64..31, 1..40), a in 0u64..200, b in 0u64..200) {
            let v = ZpVector::new(pm(31), entries).unwrap();
            let (lo, hi) = (a.min(b), a.max(b));
            let small = level_set(&v, t(lo, 10)).members;
            let large = level_set(&v, t(hi, 10)).members;
            prop_assert!(small.is_subset(&large));
            prop_assert!(small.contains(0));
        }

        #[test]
        fn container_bound_holds(p in prop::sample::select(vec![5u64, 13, 31, 61, 101]), ks in prop::collection::vec(0u64..101, 1..30)) {
            let p = pm(p);
            let s = ResidueSet::from_iter(p, ks);
            let c = container(&s);
            prop_assert!(c.size_bound_holds());
            prop_assert!(c.contains(0));
        }
    }
}
