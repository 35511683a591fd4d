//! Full enumeration over every symmetric sign matrix of a tiny dimension.

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::det::det_small;
use super::sym::SymMatrix;
use crate::anticoncentration::{rho, RhoResult};
use crate::error::{Error, Result};
use crate::inverse_lo::ratio_str;
use crate::sets::IndexSet;
use crate::zp::{Threshold, ZpVector};

pub const SINGULARITY_EXACT_MAX_N: usize = 6;
pub const MATCH_EXACT_MAX_N: usize = 4;
pub const Q_EXACT_LIMIT: u128 = 100_000_000;

fn matrix_count(n: usize) -> u64 {
    1u64 << SymMatrix::free_entries(n)
}

fn guard(n: usize, max: usize) -> Result<()> {
    if n > max {
        return Err(Error::GuardExceeded(format!("n = {n} exceeds {max} for enumeration")));
    }
    Ok(())
}

/// Number of singular matrices among all `2^{n(n+1)/2}`.
pub fn singular_count_exact(n: usize) -> Result<(u64, u64)> {
    guard(n, SINGULARITY_EXACT_MAX_N)?;
    let total = matrix_count(n);
    let singular = (0..total)
        .into_par_iter()
        .filter(|&mask| det_small(&SymMatrix::from_mask(n, mask).to_i64(), n) == 0)
        .count() as u64;
    Ok((singular, total))
}

/// `Pr(det M_n = 0)` over `Z`.
pub fn singularity_exact(n: usize) -> Result<Threshold> {
    let (s, t) = singular_count_exact(n)?;
    Ok(Threshold::new(s, t))
}

fn check_dims(v: &ZpVector, w: &ZpVector) -> Result<usize> {
    if v.len() != w.len() || v.modulus() != w.modulus() {
        return Err(Error::PreconditionViolated("v and w must share length and modulus".into()));
    }
    guard(v.len(), MATCH_EXACT_MAX_N)?;
    Ok(v.len())
}

/// Does row `i` of `m` map `v` to `w_i`?
fn row_matches(m: &SymMatrix, i: usize, v: &ZpVector, w: &ZpVector) -> bool {
    let p = v.modulus();
    let mut acc = 0u64;
    for j in 0..v.len() {
        let x = v.get(j);
        acc = if m.get(i, j) == 1 { p.add(acc, x) } else { p.sub(acc, x) };
    }
    acc == w.get(i)
}

/// `Pr(M_n v = w)` over `F_p`.
pub fn match_probability_exact(v: &ZpVector, w: &ZpVector) -> Result<Threshold> {
    let n = check_dims(v, w)?;
    let total = matrix_count(n);
    let hits = (0..total)
        .filter(|&mask| {
            let m = SymMatrix::from_mask(n, mask);
            (0..n).all(|i| row_matches(&m, i, v, w))
        })
        .count() as u64;
    Ok(Threshold::new(hits, total))
}

/// Exact `Pr(M_{X x [n]} v = w_X)` next to `rho(v_Y)^{|X|}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockCheck {
    #[serde(with = "ratio_str")]
    pub probability: Threshold,
    pub rho_y: RhoResult,
    pub rows: usize,
    pub holds: bool,
}

pub fn block_probability_exact(v: &ZpVector, w: &ZpVector, x: &IndexSet, y: &IndexSet) -> Result<BlockCheck> {
    let n = check_dims(v, w)?;
    if !x.is_disjoint(y) {
        return Err(Error::PreconditionViolated("X and Y must be disjoint".into()));
    }
    if x.iter().chain(y.iter()).any(|i| i >= n) {
        return Err(Error::PreconditionViolated("X and Y must lie in [n]".into()));
    }
    let total = matrix_count(n);
    let hits = (0..total)
        .filter(|&mask| {
            let m = SymMatrix::from_mask(n, mask);
            x.iter().all(|i| row_matches(&m, i, v, w))
        })
        .count() as u64;
    let rho_y = rho(&v.restrict(y.as_slice()));
    let k = x.len() as u32;
    // hits / total <= (c / 2^L)^k
    let lhs = BigUint::from(hits) << (rho_y.log2_denominator * k as u64);
    let rhs = rho_y.count.pow(k) * total;
    Ok(BlockCheck { probability: Threshold::new(hits, total), rho_y, rows: x.len(), holds: lhs <= rhs })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QExact {
    #[serde(with = "ratio_str")]
    pub q: Threshold,
    /// The target `w` used for `q`.
    pub w: Vec<u64>,
    /// Number of nonzero `v` with `rho(v) >= beta`.
    pub qualifying: usize,
}

/// `Pr(exists v != 0 : M_n v = w, rho(v) >= beta)` by joint enumeration of
/// `v` and `M_n`. With `w = None` the maximum over all `w` is returned.
pub fn q_exact(n: usize, p: crate::zp::PrimeModulus, beta: Threshold, w: Option<&[u64]>, strict: bool) -> Result<QExact> {
    let pp = p.get();
    let work = (pp as u128).checked_pow(n as u32).and_then(|x| x.checked_mul(1u128 << SymMatrix::free_entries(n).min(100)));
    if n == 0 || work.map_or(true, |x| x > Q_EXACT_LIMIT) {
        return Err(Error::GuardExceeded(format!("p^n 2^(n(n+1)/2) exceeds {Q_EXACT_LIMIT}")));
    }
    if strict && beta < Threshold::new(4, pp) {
        return Err(Error::PreconditionViolated(format!("beta must be at least 4/{pp}")));
    }
    if let Some(w) = w {
        if w.len() != n || w.iter().any(|&x| x >= pp) {
            return Err(Error::PreconditionViolated("w must be a residue vector of length n".into()));
        }
    }
    let (bn, bd) = (BigUint::from(*beta.numer()), BigUint::from(*beta.denom()));
    let total_v = pp.pow(n as u32);
    let decode = |mut code: u64| -> Vec<u64> {
        (0..n)
            .map(|_| {
                let d = code % pp;
                code /= pp;
                d
            })
            .collect()
    };
    let encode = |x: &[u64]| x.iter().rev().fold(0u64, |acc, &d| acc * pp + d);
    let good: Vec<Vec<u64>> = (1..total_v)
        .map(decode)
        .filter(|v| rho(&ZpVector::new(p, v.clone()).expect("residues")).at_least(&bn, &bd))
        .collect();

    let total_m = matrix_count(n);
    let mut hits = vec![0u64; total_v as usize];
    let mut image = vec![false; total_v as usize];
    for mask in 0..total_m {
        let m = SymMatrix::from_mask(n, mask);
        image.iter_mut().for_each(|b| *b = false);
        for v in &good {
            let mv: Vec<u64> = (0..n)
                .map(|i| (0..n).fold(0u64, |acc, j| if m.get(i, j) == 1 { p.add(acc, v[j]) } else { p.sub(acc, v[j]) }))
                .collect();
            image[encode(&mv) as usize] = true;
        }
        for (h, &b) in hits.iter_mut().zip(&image) {
            *h += b as u64;
        }
    }
    let best = match w {
        Some(w) => encode(w),
        // ties go to the smallest code
        None => (0..total_v).max_by_key(|&c| (hits[c as usize], std::cmp::Reverse(c))).unwrap_or(0),
    };
    Ok(QExact { q: Threshold::new(hits[best as usize], total_m), w: decode(best), qualifying: good.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;
    use crate::zp::PrimeModulus;
    use rand::Rng;

    fn pm(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn singularity_fixtures() {
        assert_eq!(singularity_exact(1).unwrap(), Threshold::from_integer(0));
        assert_eq!(singularity_exact(2).unwrap(), Threshold::new(1, 2));
        assert_eq!(singular_count_exact(3).unwrap(), (32, 64));
        assert_eq!(singular_count_exact(4).unwrap(), (512, 1024));
        assert_eq!(singular_count_exact(5).unwrap(), (15872, 32768));
        assert_eq!(singularity_exact(5).unwrap(), Threshold::new(31, 64));
        assert!(matches!(singularity_exact(7), Err(Error::GuardExceeded(_))));
    }

    #[test]
    fn singularity_fixture_six() {
        assert_eq!(singular_count_exact(6).unwrap(), (907008, 2097152));
    }

    #[test]
    fn n_two_by_hand() {
        // det = m11 m22 - 1 vanishes iff m11 = m22
        let hand = (0..8u64).filter(|&mask| {
            let m = SymMatrix::from_mask(2, mask);
            m.get(0, 0) == m.get(1, 1)
        });
        assert_eq!(hand.count(), 4);
    }

    #[test]
    fn match_probability() {
        let p = pm(5);
        let z = ZpVector::zero(p, 3);
        assert_eq!(match_probability_exact(&z, &z).unwrap(), Threshold::from_integer(1));
        let e1 = ZpVector::new(p, vec![1, 0, 0]).unwrap();
        assert!(match_probability_exact(&e1, &z).unwrap() <= Threshold::new(1, 8));
        let s = Stream::new(11);
        let mut rng = s.rng();
        for _ in 0..50 {
            let v = loop {
                let v = ZpVector::new(p, (0..4).map(|_| rng.gen_range(0..5)).collect()).unwrap();
                if !v.is_zero() {
                    break v;
                }
            };
            let w = ZpVector::new(p, (0..4).map(|_| rng.gen_range(0..5)).collect()).unwrap();
            assert!(match_probability_exact(&v, &w).unwrap() <= Threshold::new(1, 16));
        }
    }

    #[test]
    fn block_probability() {
        let p = pm(5);
        let v = ZpVector::new(p, vec![0, 1, 2, 3]).unwrap();
        let w = ZpVector::zero(p, 4);
        let empty = block_probability_exact(&v, &w, &IndexSet::new(vec![]), &IndexSet::range(4)).unwrap();
        assert_eq!(empty.probability, Threshold::from_integer(1));
        assert!(empty.holds);
        let single = block_probability_exact(&v, &w, &IndexSet::new(vec![0]), &IndexSet::new(vec![1, 2, 3])).unwrap();
        assert_eq!(single.rows, 1);
        assert_eq!(single.rho_y, rho(&v.restrict(&[1, 2, 3])));
        assert!(single.holds);
        assert!(matches!(
            block_probability_exact(&v, &w, &IndexSet::new(vec![0, 1]), &IndexSet::new(vec![1])),
            Err(Error::PreconditionViolated(_))
        ));

        let mut rng = Stream::new(12).rng();
        for _ in 0..50 {
            let v = ZpVector::new(p, (0..4).map(|_| rng.gen_range(0..5)).collect()).unwrap();
            let w = ZpVector::new(p, (0..4).map(|_| rng.gen_range(0..5)).collect()).unwrap();
            let labels: Vec<u8> = (0..4).map(|_| rng.gen_range(0..3)).collect();
            let x: IndexSet = (0..4).filter(|&i| labels[i] == 0).collect();
            let y: IndexSet = (0..4).filter(|&i| labels[i] == 1).collect();
            assert!(block_probability_exact(&v, &w, &x, &y).unwrap().holds);
        }
    }

    #[test]
    fn q_exact_brute() {
        let p = pm(5);
        for beta in [Threshold::new(4, 5), Threshold::new(1, 2), Threshold::new(1, 4)] {
            let q = q_exact(2, p, beta, Some(&[0, 1]), false).unwrap();
            // independent oracle: loop over matrices, then vectors
            let target = num_rational::BigRational::new((*beta.numer()).into(), (*beta.denom()).into());
            let mut hits = 0;
            for mask in 0..8u64 {
                let m = SymMatrix::from_mask(2, mask);
                let sign = |i, j| if m.get(i, j) == 1 { 1i64 } else { -1 };
                let found = (1..25u64).any(|c| {
                    let v = [c % 5, c / 5];
                    let r = rho(&ZpVector::new(p, v.to_vec()).unwrap());
                    let mv0 = (sign(0, 0) * v[0] as i64 + sign(0, 1) * v[1] as i64).rem_euclid(5);
                    let mv1 = (sign(1, 0) * v[0] as i64 + sign(1, 1) * v[1] as i64).rem_euclid(5);
                    r.to_ratio() >= target && mv0 == 0 && mv1 == 1
                });
                hits += found as u64;
            }
            assert_eq!(q.q, Threshold::new(hits, 8), "beta {beta}");
            let best = q_exact(2, p, beta, None, false).unwrap();
            assert!(best.q >= q.q);
        }
        // above 1/2 no nonzero vector of length 2 qualifies
        assert_eq!(q_exact(2, p, Threshold::new(4, 5), None, false).unwrap().qualifying, 0);
        assert!(matches!(q_exact(2, p, Threshold::new(1, 5), None, true), Err(Error::PreconditionViolated(_))));
        assert!(matches!(q_exact(4, pm(31), Threshold::new(1, 2), None, false), Err(Error::GuardExceeded(_))));
    }
}
