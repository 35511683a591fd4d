//! Exact concentration probabilities `rho(v)`, `rho_{1/2}(v)` and the
//! integer-lattice `rho`, plus evaluation of the Halasz bound chain.
//!
//! Probabilities are integer atom counts over an implicit power-of-two
//! denominator, so every comparison between concentration values is an exact
//! big-integer cross-multiplication. Floating point appears only on the
//! bound side.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::containers::WeightProfile;
use crate::error::{Error, Result};
use crate::sets::ResidueSet;
use crate::zp::{PrimeModulus, Threshold, ZpVector};

/// Exact law of a signed sum, as atom counts over `2^log2_denominator`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactDistribution {
    /// Atom value of `counts[0]`: `0` for `Z_p`, `-sum |v_i|` for `Z`.
    pub offset: i64,
    pub counts: Vec<BigUint>,
    pub log2_denominator: u64,
}

impl ExactDistribution {
    pub fn count(&self, atom: i64) -> BigUint {
        let idx = atom - self.offset;
        if idx < 0 || idx as usize >= self.counts.len() {
            BigUint::zero()
        } else {
            self.counts[idx as usize].clone()
        }
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    /// `(atom, count)` for every atom with nonzero count.
    pub fn atoms(&self) -> impl Iterator<Item = (i64, &BigUint)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (i as i64 + self.offset, c))
    }

    /// Largest atom; ties go to the smallest atom value.
    pub fn max_atom(&self) -> RhoResult {
        let mut best = 0usize;
        for (i, c) in self.counts.iter().enumerate() {
            if *c > self.counts[best] {
                best = i;
            }
        }
        RhoResult {
            atom: best as i64 + self.offset,
            count: self.counts[best].clone(),
            log2_denominator: self.log2_denominator,
        }
    }
}

/// `rho = count / 2^log2_denominator`, attained at `atom`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RhoResult {
    pub atom: i64,
    #[serde(with = "decimal")]
    pub count: BigUint,
    pub log2_denominator: u64,
}

impl RhoResult {
    pub fn one() -> Self {
        RhoResult { atom: 0, count: BigUint::one(), log2_denominator: 0 }
    }

    /// Exact comparison of two concentration values.
    pub fn cmp_value(&self, other: &RhoResult) -> Ordering {
        let lhs = &self.count << other.log2_denominator;
        let rhs = &other.count << self.log2_denominator;
        lhs.cmp(&rhs)
    }

    /// `rho >= num / den`, exactly.
    pub fn at_least(&self, num: &BigUint, den: &BigUint) -> bool {
        &self.count * den >= num << self.log2_denominator
    }

    /// `rho * 2^shift`, i.e. scaling by a power of two, as a new value.
    pub fn times_pow2(&self, shift: u64) -> RhoResult {
        if shift <= self.log2_denominator {
            RhoResult {
                atom: self.atom,
                count: self.count.clone(),
                log2_denominator: self.log2_denominator - shift,
            }
        } else {
            RhoResult {
                atom: self.atom,
                count: &self.count << (shift - self.log2_denominator),
                log2_denominator: 0,
            }
        }
    }

    pub fn to_ratio(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.count.clone()),
            BigInt::from(BigUint::one() << self.log2_denominator),
        )
    }

    /// Nearest double, without overflowing for huge denominators.
    pub fn to_f64(&self) -> f64 {
        let bits = self.count.bits();
        let shift = bits.saturating_sub(64);
        let top = (&self.count >> shift).to_u64().unwrap_or(u64::MAX) as f64;
        let exp = shift as i64 - self.log2_denominator as i64;
        top * 2f64.powi(exp as i32)
    }
}

impl std::fmt::Display for RhoResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/2^{}", self.count, self.log2_denominator)
    }
}

// Big counts travel as decimal strings.
mod decimal {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        BigUint::parse_bytes(s.as_bytes(), 10).ok_or_else(|| D::Error::custom("bad decimal"))
    }
}

// Walk over Z_p with machine counters while they cannot overflow.
fn walk_u128(p: usize, steps: &[u64], lazy: bool) -> Vec<u128> {
    let mut cur = vec![0u128; p];
    cur[0] = 1;
    let mut next = vec![0u128; p];
    for &r in steps {
        let r = r as usize;
        for a in 0..p {
            let minus = cur[(a + p - r) % p];
            let plus = cur[(a + r) % p];
            next[a] = if lazy { 2 * cur[a] + minus + plus } else { minus + plus };
        }
        std::mem::swap(&mut cur, &mut next);
    }
    cur
}

fn walk_big(p: usize, steps: &[u64], lazy: bool) -> Vec<BigUint> {
    let mut cur = vec![BigUint::zero(); p];
    cur[0] = BigUint::one();
    let mut next = vec![BigUint::zero(); p];
    for &r in steps {
        let r = r as usize;
        for a in 0..p {
            let mut x = &cur[(a + p - r) % p] + &cur[(a + r) % p];
            if lazy {
                x += &cur[a] << 1u32;
            }
            next[a] = x;
        }
        std::mem::swap(&mut cur, &mut next);
    }
    cur
}

fn walk(p: PrimeModulus, steps: &[u64], lazy: bool) -> ExactDistribution {
    let n = steps.len() as u64;
    let log2_denominator = if lazy { 2 * n } else { n };
    let counts = if log2_denominator < 127 {
        walk_u128(p.as_usize(), steps, lazy).into_iter().map(BigUint::from).collect()
    } else {
        walk_big(p.as_usize(), steps, lazy)
    };
    ExactDistribution { offset: 0, counts, log2_denominator }
}

/// Exact law of `sum_i u_i v_i` over `Z_p` for uniform `u in {-1,1}^n`,
/// by `n` successive two-point convolutions.
pub fn distribution_zp(v: &ZpVector) -> ExactDistribution {
    walk(v.modulus(), v.entries(), false)
}

/// `rho(v) = max_a Pr(u . v = a)`.
pub fn rho(v: &ZpVector) -> RhoResult {
    distribution_zp(v).max_atom()
}

/// Lazy-walk concentration: steps are `0` w.p. 1/2 and `+-1` w.p. 1/4 each.
pub fn rho_half(v: &ZpVector) -> RhoResult {
    walk(v.modulus(), v.entries(), true).max_atom()
}

/// Guard on `sum |v_i|` for the integer-lattice walk.
pub const RHO_INT_RANGE_LIMIT: u64 = 1_000_000;

/// Exact law of `sum_i u_i v_i` over `Z`.
pub fn distribution_int(values: &[i64]) -> Result<ExactDistribution> {
    let total = values.iter().try_fold(0u64, |acc, &x| acc.checked_add(x.unsigned_abs()));
    let total = match total {
        Some(s) if s <= RHO_INT_RANGE_LIMIT => s as usize,
        _ => {
            return Err(Error::RangeTooLarge(format!(
                "sum of |v_i| exceeds {RHO_INT_RANGE_LIMIT}"
            )))
        }
    };
    let width = 2 * total + 1;
    let mut cur = vec![BigUint::zero(); width];
    cur[total] = BigUint::one();
    // Current reachable window is [total - reach, total + reach].
    let mut reach = 0usize;
    for &x in values {
        let s = x.unsigned_abs() as usize;
        let new_reach = reach + s;
        let mut next = vec![BigUint::zero(); width];
        for idx in (total - reach)..=(total + reach) {
            if cur[idx].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut cur[idx]);
            next[idx - s] += &c;
            next[idx + s] += c;
        }
        cur = next;
        reach = new_reach;
    }
    Ok(ExactDistribution { offset: -(total as i64), counts: cur, log2_denominator: values.len() as u64 })
}

/// `rho` over the integers.
pub fn rho_int(values: &[i64]) -> Result<RhoResult> {
    Ok(distribution_int(values)?.max_atom())
}

fn require_nonzero(v: &ZpVector) -> Result<()> {
    if v.is_zero() {
        Err(Error::PreconditionViolated("bound requires v != 0".into()))
    } else {
        Ok(())
    }
}

fn ratio_f64(t: Threshold) -> f64 {
    *t.numer() as f64 / *t.denom() as f64
}

/// `3/p + 4|T_ell(v)| / (p sqrt(ell)) + e^{-ell}` for `1 <= ell <= |v|/64`.
pub fn halasz_bound(v: &ZpVector, ell: Threshold) -> Result<f64> {
    require_nonzero(v)?;
    let (num, den) = (*ell.numer() as u128, *ell.denom() as u128);
    if num < den || 64 * num > v.support() as u128 * den {
        return Err(Error::PreconditionViolated(format!(
            "ell = {ell} outside [1, |v|/64] with |v| = {}",
            v.support()
        )));
    }
    let profile = WeightProfile::of(v);
    Ok(halasz_bound_from(&profile, ell))
}

pub(crate) fn halasz_bound_from(profile: &WeightProfile, ell: Threshold) -> f64 {
    let p = profile.modulus().get() as f64;
    let l = ratio_f64(ell);
    let level = profile.level_size(ell) as f64;
    3.0 / p + 4.0 * level / (p * l.sqrt()) + (-l).exp()
}

/// `(1/p) sum_k exp(-W(k)/p^2)`, with exact integer weights `W(k)`.
pub fn halasz_first_bound(v: &ZpVector) -> f64 {
    halasz_first_bound_from(&WeightProfile::of(v))
}

pub(crate) fn halasz_first_bound_from(profile: &WeightProfile) -> f64 {
    let p = profile.modulus();
    let p2 = p.square() as f64;
    let sum: f64 = profile.weights().iter().map(|&w| (-(w as f64) / p2).exp()).sum();
    sum / p.get() as f64
}

/// `1/p + (e/p) sum_{t=1}^{ceil(ell)} e^{-t} |T_t(v)| + e^{-ell}` for `v != 0`,
/// `ell >= 1`.
pub fn halasz_second_bound(v: &ZpVector, ell: Threshold) -> Result<f64> {
    require_nonzero(v)?;
    if ell.numer() < ell.denom() {
        return Err(Error::PreconditionViolated(format!("ell = {ell} is below 1")));
    }
    Ok(halasz_second_bound_from(&WeightProfile::of(v), ell))
}

pub(crate) fn halasz_second_bound_from(profile: &WeightProfile, ell: Threshold) -> f64 {
    let p = profile.modulus().get() as f64;
    let top = ell.ceil().to_integer();
    let e = std::f64::consts::E;
    let sum: f64 = (1..=top)
        .map(|t| (-(t as f64)).exp() * profile.level_size(Threshold::from_integer(t)) as f64)
        .sum();
    1.0 / p + e / p * sum + (-ratio_f64(ell)).exp()
}

/// Every bound of the chain for one vector, at one `ell`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HalaszAudit {
    pub rho: f64,
    pub first: f64,
    pub second: Option<f64>,
    pub lemma: Option<f64>,
}

impl HalaszAudit {
    pub fn holds(&self, slack: f64) -> bool {
        self.rho <= self.first + slack
            && self.second.map_or(true, |b| self.rho <= b + slack)
            && self.lemma.map_or(true, |b| self.rho <= b + slack)
    }
}

/// Evaluates every applicable bound against an exact `rho(v)`.
pub fn halasz_audit(v: &ZpVector, rho_value: &RhoResult, ell: Threshold) -> HalaszAudit {
    let profile = WeightProfile::of(v);
    let (num, den) = (*ell.numer() as u128, *ell.denom() as u128);
    let nonzero = !v.is_zero();
    let second = (nonzero && num >= den).then(|| halasz_second_bound_from(&profile, ell));
    let lemma = (nonzero && num >= den && 64 * num <= v.support() as u128 * den)
        .then(|| halasz_bound_from(&profile, ell));
    HalaszAudit { rho: rho_value.to_f64(), first: halasz_first_bound_from(&profile), second, lemma }
}

/// Largest sumset size admitted by the exhaustive checks.
pub const SUMSET_P_LIMIT: u64 = 10_000;

/// `m . T_t(v) subset T_{m^2 t}(v)`.
pub fn sumset_level_check(v: &ZpVector, m: u32, t: Threshold) -> Result<bool> {
    let p = v.modulus();
    if p.get() > SUMSET_P_LIMIT {
        return Err(Error::GuardExceeded(format!("p = {p} exceeds {SUMSET_P_LIMIT}")));
    }
    if m == 0 {
        return Err(Error::PreconditionViolated("m must be positive".into()));
    }
    let scaled = t
        .numer()
        .checked_mul(m as u64 * m as u64)
        .ok_or(Error::Overflow("m^2 t does not fit"))?;
    let profile = WeightProfile::of(v);
    let base = profile.level(t);
    let wide = profile.level(Threshold::new(scaled, *t.denom()));
    Ok(base.iterated_sumset(m).is_subset(&wide))
}

/// `m . A = Z_p` or `|m . A| >= m|A| - m + 1`.
pub fn cauchy_davenport_check(a: &ResidueSet, m: u32) -> Result<bool> {
    if a.is_empty() {
        return Err(Error::PreconditionViolated("A must be nonempty".into()));
    }
    if m == 0 {
        return Err(Error::PreconditionViolated("m must be positive".into()));
    }
    if a.modulus().get() > SUMSET_P_LIMIT {
        return Err(Error::GuardExceeded(format!("p exceeds {SUMSET_P_LIMIT}")));
    }
    let sum = a.iterated_sumset(m);
    let m = m as usize;
    Ok(sum.is_full() || sum.len() + m > m * a.len())
}
