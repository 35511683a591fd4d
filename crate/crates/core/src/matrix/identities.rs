//! Algebraic facts behind the rank reduction: sign vectors in a subspace,
//! the rank-one adjugate of a corank-one minor, and the decoupling step.

use num_bigint::BigUint;
use num_rational::BigRational;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::modp::{addmod, from_i64, invmod, mulmod, submod, MatP};
use crate::error::{Error, Result};
use crate::inverse_lo::CheckReport;
use crate::sets::IndexSet;

pub const ODLYZKO_MAX_N: usize = 14;
pub const DECOUPLING_MAX_SUPPORT: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OdlyzkoReport {
    pub n: usize,
    pub dim: usize,
    /// `|V ∩ {-1,1}^n|`
    pub count: u64,
    pub holds: bool,
}

/// Counts sign vectors in the span of `basis` over `F_p`.
pub fn odlyzko_check(basis: &[Vec<u64>], n: usize, p: u64) -> Result<OdlyzkoReport> {
    if n > ODLYZKO_MAX_N {
        return Err(Error::GuardExceeded(format!("n = {n} exceeds {ODLYZKO_MAX_N}")));
    }
    if basis.iter().any(|b| b.len() != n) {
        return Err(Error::PreconditionViolated("basis vectors must have length n".into()));
    }
    let k = basis.len();
    if k == 0 {
        return Ok(OdlyzkoReport { n, dim: 0, count: 0, holds: true });
    }
    let (r, pivots) = MatP::from_rows(p, basis).rref();
    if pivots.len() < k {
        return Err(Error::DependentBasis);
    }
    let count = (0..1u64 << n)
        .filter(|&mask| {
            let mut x: Vec<u64> = (0..n).map(|i| if mask >> i & 1 == 1 { 1 } else { p - 1 }).collect();
            for (row, &c) in pivots.iter().enumerate() {
                let f = x[c];
                if f != 0 {
                    for (xj, &rj) in x.iter_mut().zip(r.row(row)) {
                        *xj = submod(*xj, mulmod(f, rj, p), p);
                    }
                }
            }
            x.iter().all(|&e| e == 0)
        })
        .count() as u64;
    Ok(OdlyzkoReport { n, dim: k, count, holds: count <= 1 << k })
}

/// Checks the adjugate lemma on `m = M_n`, whose first row and column are
/// removed to form `M_{n-1}`; requires `rk(M_{n-1}) = n - 2`.
pub fn adjugate_rank1_check(m: &MatP) -> Result<CheckReport> {
    let n = m.rows();
    if n != m.cols() || n < 2 || !m.is_symmetric() {
        return Err(Error::PreconditionViolated("expected a symmetric matrix of size at least 2".into()));
    }
    let p = m.modulus();
    let minor = m.minor(0, 0);
    if minor.rank() + 2 != n {
        return Err(Error::PreconditionViolated(format!("rank of M_(n-1) is {}, expected {}", minor.rank(), n - 2)));
    }
    let d = n - 1;
    let adj = minor.adjugate();
    let mut r = CheckReport::default();
    r.push("annihilates", minor.mul(&adj).is_zero());
    r.push("rank_one", adj.rank() == 1);
    r.push("symmetric", adj.is_symmetric());

    let j0 = (0..d).find(|&j| adj.get(j, j) != 0);
    r.push("nonzero_diagonal", j0.is_some());
    let Some(j0) = j0 else {
        return Ok(r);
    };
    let a: Vec<u64> = (0..d).map(|i| adj.get(i, j0)).collect();
    let lambda = invmod(adj.get(j0, j0), p);
    let factors = (0..d).all(|i| (0..d).all(|j| adj.get(i, j) == mulmod(lambda, mulmod(a[i], a[j], p), p)));
    r.push("factorization", factors);
    r.push("kernel", minor.mul_vec(&a).iter().all(|&x| x == 0));

    // bordered expansion along the first row
    let x: Vec<u64> = (0..n).map(|j| m.get(0, j)).collect();
    let quad = (0..d).fold(0, |acc, i| {
        (0..d).fold(acc, |acc, j| addmod(acc, mulmod(adj.get(i, j), mulmod(x[i + 1], x[j + 1], p), p), p))
    });
    let det_n = m.det();
    r.push("expansion", det_n == submod(mulmod(x[0], minor.det(), p), quad, p));
    let ax = (0..d).fold(0, |acc, i| addmod(acc, mulmod(a[i], x[i + 1], p), p));
    r.push("orthogonal_when_singular", det_n != 0 || ax == 0);
    Ok(r)
}

/// Symmetric matrix over `F_p` with uniform entries, redrawn until
/// `rk(M_{n-1}) = n - 2`.
pub fn sample_corank_one<R: Rng + ?Sized>(n: usize, p: u64, rng: &mut R, max_attempts: u32) -> Result<MatP> {
    for _ in 0..max_attempts {
        let mut m = MatP::zeros(p, n, n);
        for i in 0..n {
            for j in i..n {
                let x = rng.gen_range(0..p);
                m.set(i, j, x);
                m.set(j, i, x);
            }
        }
        if m.minor(0, 0).rank() + 2 == n {
            return Ok(m);
        }
    }
    Err(Error::RetryExhausted { stage: "corank-one sample".into(), attempts: max_attempts })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecouplingIdentity {
    pub lhs: u64,
    pub rhs: u64,
    pub holds: bool,
}

/// With `A = M^{-1}` and `f(u) = u^T A u`, compares
/// `f(X,Y) - f(X',Y) - f(X,Y') + f(X',Y')` against `2 z_I . w_I`, where
/// `X = u_I`, `Y = u_J`, `w = u - u'` and `z = A w*_J`.
pub fn decoupling_identity_check(m: &MatP, u: &[i64], u_prime: &[i64], i_set: &IndexSet) -> Result<DecouplingIdentity> {
    let d = m.rows();
    if d == 0 || m.cols() != d || u.len() != d || u_prime.len() != d || i_set.iter().any(|i| i >= d) {
        return Err(Error::PreconditionViolated("dimension mismatch".into()));
    }
    let p = m.modulus();
    let a = m.inverse()?;
    let f = |x: &[i64]| -> u64 {
        let x: Vec<u64> = x.iter().map(|&e| from_i64(e, p)).collect();
        let ax = a.mul_vec(&x);
        x.iter().zip(&ax).fold(0, |acc, (&s, &t)| addmod(acc, mulmod(s, t, p), p))
    };
    let mix = |on_i: &[i64], on_j: &[i64]| -> Vec<i64> {
        (0..d).map(|k| if i_set.contains(k) { on_i[k] } else { on_j[k] }).collect()
    };
    let lhs = submod(
        addmod(f(u), f(u_prime), p),
        addmod(f(&mix(u_prime, u)), f(&mix(u, u_prime)), p),
        p,
    );
    let w: Vec<i64> = u.iter().zip(u_prime).map(|(a, b)| a - b).collect();
    let w_j: Vec<u64> = (0..d).map(|k| if i_set.contains(k) { 0 } else { from_i64(w[k], p) }).collect();
    let z = a.mul_vec(&w_j);
    let zw = i_set.iter().fold(0, |acc, i| addmod(acc, mulmod(z[i], from_i64(w[i], p), p), p));
    let rhs = addmod(zw, zw, p);
    Ok(DecouplingIdentity { lhs, rhs, holds: lhs == rhs })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecouplingProbability {
    /// `Pr(E)`, reduced, as `a/b`.
    pub event: String,
    /// `Pr(E(X,Y) ∩ E(X',Y) ∩ E(X,Y') ∩ E(X',Y'))`
    pub four_fold: String,
    pub holds: bool,
}

/// `Pr(E)^4 <= Pr(four-fold intersection)` for independent `X`, `Y` with
/// integer weights; `event[a][b]` is the indicator of `E(a, b)`.
pub fn decoupling_probability_check(weights_x: &[u64], weights_y: &[u64], event: &[Vec<bool>]) -> Result<DecouplingProbability> {
    let (sx, sy) = (weights_x.len(), weights_y.len());
    if sx > DECOUPLING_MAX_SUPPORT || sy > DECOUPLING_MAX_SUPPORT {
        return Err(Error::GuardExceeded(format!("supports are limited to {DECOUPLING_MAX_SUPPORT}")));
    }
    let (wx, wy): (u64, u64) = (weights_x.iter().sum(), weights_y.iter().sum());
    if wx == 0 || wy == 0 || event.len() != sx || event.iter().any(|row| row.len() != sy) {
        return Err(Error::PreconditionViolated("weights must be positive and the event table sx by sy".into()));
    }
    let mut single = BigUint::default();
    for a in 0..sx {
        for b in 0..sy {
            if event[a][b] {
                single += BigUint::from(weights_x[a]) * weights_y[b];
            }
        }
    }
    let mut four = BigUint::default();
    for a in 0..sx {
        for a2 in 0..sx {
            for b in 0..sy {
                for b2 in 0..sy {
                    if event[a][b] && event[a2][b] && event[a][b2] && event[a2][b2] {
                        four += BigUint::from(weights_x[a]) * weights_x[a2] * weights_y[b] * weights_y[b2];
                    }
                }
            }
        }
    }
    let total = BigUint::from(wx) * wy;
    let den4 = &total * &total;
    let holds = single.pow(4) <= &four * &den4;
    let event = BigRational::new(single.into(), total.into());
    let four_fold = BigRational::new(four.into(), den4.into());
    Ok(DecouplingProbability { event: event.to_string(), four_fold: four_fold.to_string(), holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    #[test]
    fn odlyzko_examples() {
        let r = odlyzko_check(&[vec![1, 1]], 2, 5).unwrap();
        assert_eq!((r.count, r.holds), (2, true));
        let empty = odlyzko_check(&[], 4, 5).unwrap();
        assert_eq!((empty.count, empty.holds), (0, true));
        assert!(matches!(odlyzko_check(&[vec![1, 2], vec![2, 4]], 2, 5), Err(Error::DependentBasis)));
        assert!(matches!(odlyzko_check(&[], 15, 5), Err(Error::GuardExceeded(_))));
        // e_1..e_k: sign vectors need every coordinate nonzero, so only k = n counts
        for k in 1..=10 {
            let basis: Vec<Vec<u64>> = (0..k).map(|i| (0..10).map(|j| (i == j) as u64).collect()).collect();
            let r = odlyzko_check(&basis, 10, 7).unwrap();
            assert!(r.holds);
            assert_eq!(r.count, if k == 10 { 1024 } else { 0 });
        }
    }

    #[test]
    fn odlyzko_against_rank_oracle() {
        let mut rng = Stream::new(21).rng();
        for _ in 0..30 {
            let n = rng.gen_range(1..=8);
            let k = rng.gen_range(1..=n);
            let p = [3u64, 5, 7][rng.gen_range(0..3)];
            let basis: Vec<Vec<u64>> = (0..k).map(|_| (0..n).map(|_| rng.gen_range(0..p)).collect()).collect();
            let Ok(r) = odlyzko_check(&basis, n, p) else { continue };
            let slow = (0..1u64 << n)
                .filter(|&mask| {
                    let x: Vec<u64> = (0..n).map(|i| if mask >> i & 1 == 1 { 1 } else { p - 1 }).collect();
                    let mut rows = basis.clone();
                    rows.push(x);
                    super::super::modp::rank_mod_p(&rows, p) == k
                })
                .count() as u64;
            assert_eq!(r.count, slow);
            assert!(r.holds);
        }
    }

    #[test]
    fn adjugate_examples() {
        // M_2 = [[1,1],[1,1]] has rank 1
        let m = MatP::from_rows(7, &[vec![1, 1, 6], vec![1, 1, 1], vec![6, 1, 1]]);
        let r = adjugate_rank1_check(&m).unwrap();
        assert!(r.passed(), "{:?}", r.failures());
        let full = MatP::identity(7, 3);
        assert!(matches!(adjugate_rank1_check(&full), Err(Error::PreconditionViolated(_))));
        let mut rng = Stream::new(22).rng();
        for _ in 0..50 {
            let n = rng.gen_range(2..=6);
            let m = sample_corank_one(n, 7, &mut rng, 10_000).unwrap();
            let r = adjugate_rank1_check(&m).unwrap();
            assert!(r.passed(), "{:?}", r.failures());
        }
    }

    fn random_invertible<R: Rng>(d: usize, p: u64, rng: &mut R) -> MatP {
        loop {
            let mut m = MatP::zeros(p, d, d);
            for i in 0..d {
                for j in i..d {
                    let x = if rng.gen() { 1 } else { p - 1 };
                    m.set(i, j, x);
                    m.set(j, i, x);
                }
            }
            if m.det() != 0 {
                return m;
            }
        }
    }

    fn signs<R: Rng>(d: usize, rng: &mut R) -> Vec<i64> {
        (0..d).map(|_| if rng.gen() { 1 } else { -1 }).collect()
    }

    #[test]
    fn decoupling_identity() {
        let mut rng = Stream::new(23).rng();
        for _ in 0..200 {
            let d = rng.gen_range(1..=8);
            let p = [5u64, 7, 13][rng.gen_range(0..3)];
            let m = random_invertible(d, p, &mut rng);
            let (u, u2) = (signs(d, &mut rng), signs(d, &mut rng));
            let i_set: IndexSet = (0..d).filter(|_| rng.gen()).collect();
            let r = decoupling_identity_check(&m, &u, &u2, &i_set).unwrap();
            assert!(r.holds, "{r:?}");
            // direct expansion: 2 sum_{i in I, j in J} A_ij w_i w_j
            let a = m.inverse().unwrap();
            let mut direct = 0u64;
            for i in i_set.iter() {
                for j in (0..d).filter(|j| !i_set.contains(*j)) {
                    let wiwj = from_i64((u[i] - u2[i]) * (u[j] - u2[j]), p);
                    direct = addmod(direct, mulmod(2, mulmod(a.get(i, j), wiwj, p), p), p);
                }
            }
            assert_eq!(direct, r.lhs);
            let same = decoupling_identity_check(&m, &u, &u, &i_set).unwrap();
            assert_eq!((same.lhs, same.rhs), (0, 0));
            let no_j = decoupling_identity_check(&m, &u, &u2, &IndexSet::range(d)).unwrap();
            assert_eq!((no_j.lhs, no_j.rhs), (0, 0));
        }
        let singular = MatP::from_rows(5, &[vec![1, 1], vec![1, 1]]);
        assert!(matches!(decoupling_identity_check(&singular, &[1, 1], &[1, -1], &IndexSet::new(vec![0])), Err(Error::SingularMatrix)));
    }

    #[test]
    fn decoupling_probability() {
        let all = vec![vec![true; 3]; 2];
        let r = decoupling_probability_check(&[1, 2], &[1, 1, 1], &all).unwrap();
        assert!(r.holds);
        assert_eq!(r.event, "1");
        let none = vec![vec![false; 3]; 2];
        let r = decoupling_probability_check(&[1, 2], &[1, 1, 1], &none).unwrap();
        assert!(r.holds);
        assert_eq!((r.event.as_str(), r.four_fold.as_str()), ("0", "0"));
        let mut rng = Stream::new(24).rng();
        for _ in 0..100 {
            let wx: Vec<u64> = (0..4).map(|_| rng.gen_range(1..10)).collect();
            let wy: Vec<u64> = (0..4).map(|_| rng.gen_range(1..10)).collect();
            let e: Vec<Vec<bool>> = (0..4).map(|_| (0..4).map(|_| rng.gen()).collect()).collect();
            assert!(decoupling_probability_check(&wx, &wy, &e).unwrap().holds);
        }
        let big = vec![1u64; 17];
        assert!(matches!(decoupling_probability_check(&big, &[1], &vec![vec![true]; 17]), Err(Error::GuardExceeded(_))));
    }
}
