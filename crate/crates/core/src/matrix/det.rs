//! Exact integer determinants: residues modulo word-size primes recombined
//! by CRT past the Hadamard bound, with fraction-free elimination as an
//! independent oracle.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::modp::{invmod, mulmod};
use super::sym::SymMatrix;
use crate::error::{Error, Result};
use crate::zp::is_prime;

/// Largest dimension accepted by the exact determinant.
pub const DET_MAX_N: usize = 64;

/// Primes just below `2^62`, descending.
fn crt_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut out = Vec::new();
        let mut x = (1u64 << 62) - 1;
        while out.len() < 8 {
            if is_prime(x) {
                out.push(x);
            }
            x -= 2;
        }
        out
    })
}

/// Number of CRT primes whose product exceeds `2 n^{n/2}`.
pub fn primes_needed(n: usize) -> usize {
    // 2 n^{n/2} < 2^{1 + n log2(n) / 2}; each prime exceeds 2^61
    let bits = 1.0 + n as f64 * (n.max(1) as f64).log2() / 2.0;
    ((bits + 1.0) / 61.0).ceil().max(1.0) as usize
}

fn check_guard(n: usize) -> Result<()> {
    if n > DET_MAX_N {
        Err(Error::GuardExceeded(format!("n = {n} exceeds {DET_MAX_N}")))
    } else {
        Ok(())
    }
}

/// `det(M)` over `Z`.
pub fn det_exact(m: &SymMatrix) -> Result<BigInt> {
    check_guard(m.n())?;
    let primes = &crt_primes()[..primes_needed(m.n())];
    // Garner-style incremental CRT
    let mut acc = BigUint::zero();
    let mut modulus = BigUint::one();
    for &q in primes {
        let r = m.to_modp(q).det();
        let acc_mod = (&acc % q).iter_u64_digits().next().unwrap_or(0);
        let m_mod = (&modulus % q).iter_u64_digits().next().unwrap_or(0);
        let diff = if r >= acc_mod { r - acc_mod } else { q - (acc_mod - r) };
        let t = mulmod(diff, invmod(m_mod, q), q);
        acc += &modulus * t;
        modulus *= q;
    }
    let half = &modulus >> 1u32;
    Ok(if acc > half { BigInt::from(acc) - BigInt::from(modulus) } else { BigInt::from(acc) })
}

/// `det(M) = 0` over `Z`, stopping at the first prime with a nonzero residue.
pub fn is_singular(m: &SymMatrix) -> Result<bool> {
    check_guard(m.n())?;
    let primes = &crt_primes()[..primes_needed(m.n())];
    Ok(primes.iter().all(|&q| m.to_modp(q).det() == 0))
}

/// Fraction-free (Bareiss) elimination over `Z`.
pub fn det_bareiss(values: &[i64], n: usize) -> BigInt {
    assert_eq!(values.len(), n * n);
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<BigInt> = values.iter().map(|&x| BigInt::from(x)).collect();
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !a[i * n + k].is_zero()) else {
                return BigInt::zero();
            };
            for j in 0..n {
                a.swap(k * n + j, swap * n + j);
            }
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let x = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                a[i * n + j] = x.div_floor(&prev);
            }
        }
        prev = a[k * n + k].clone();
    }
    let d = a[n * n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// `det` of a small integer matrix in machine arithmetic (Bareiss with
/// exact divisions); entries must keep every minor within `i64`.
pub fn det_small(values: &[i64], n: usize) -> i64 {
    let mut a = values.to_vec();
    if n == 0 {
        return 1;
    }
    let mut sign = 1;
    let mut prev = 1i64;
    for k in 0..n - 1 {
        if a[k * n + k] == 0 {
            let Some(swap) = (k + 1..n).find(|&i| a[i * n + k] != 0) else {
                return 0;
            };
            for j in 0..n {
                a.swap(k * n + j, swap * n + j);
            }
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i * n + j] = (a[i * n + j] * a[k * n + k] - a[i * n + k] * a[k * n + j]) / prev;
            }
        }
        prev = a[k * n + k];
    }
    sign * a[n * n - 1]
}

/// `|det| <= n^{n/2}` for a `+-1` matrix.
pub fn within_hadamard(det: &BigInt, n: usize) -> bool {
    // det^2 <= n^n
    let sq = det.abs().pow(2);
    sq <= BigInt::from(n).pow(n as u32)
}
