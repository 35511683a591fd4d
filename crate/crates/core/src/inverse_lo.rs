//! The randomised container construction: rejection-sampled coordinate sets
//! `Y` and `U`, the container `B = C(F(v_U))`, and certificates that record
//! every measured quantity so they can be re-checked from scratch.

use std::path::Path;

use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::anticoncentration::{rho, RhoResult};
use crate::containers::{container, frequency_set, WeightProfile};
use crate::error::{Error, Result};
use crate::rng::Stream;
use crate::sets::{IndexSet, ResidueSet};
use crate::zp::{PrimeModulus, Threshold, ZpVector};

/// Rationals travel as `"a/b"` (or `"a"`) strings.
pub mod ratio_str {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    use crate::zp::Threshold;

    pub fn serialize<S: Serializer>(x: &Threshold, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Threshold, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}")))
    }

    pub fn parse(s: &str) -> Option<Threshold> {
        let s = s.trim();
        match s.split_once('/') {
            Some((a, b)) => {
                let (a, b) = (a.trim().parse().ok()?, b.trim().parse::<u64>().ok()?);
                (b != 0).then(|| Threshold::new(a, b))
            }
            None => s.parse().ok().map(Threshold::from_integer),
        }
    }
}

/// Every numeric constant of the construction and of the fibre iteration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsProfile {
    pub name: String,
    /// `|v| >= support_floor_coeff * log p`
    #[serde(with = "ratio_str")]
    pub support_floor_coeff: Threshold,
    /// `m = floor(m_coeff * log p)`
    #[serde(with = "ratio_str")]
    pub m_coeff: Threshold,
    /// `ell = ell_coeff * |v|`
    #[serde(with = "ratio_str")]
    pub ell_coeff: Threshold,
    /// `t = t_coeff * n`
    #[serde(with = "ratio_str")]
    pub t_coeff: Threshold,
    /// `|B| rho(v_Y) sqrt|v| <= size_const`
    #[serde(with = "ratio_str")]
    pub size_const: Threshold,
    #[serde(with = "ratio_str")]
    pub y_density: Threshold,
    /// `U` has density `u_density_coeff * m / n`.
    #[serde(with = "ratio_str")]
    pub u_density_coeff: Threshold,
    /// `rho(v) >= rho_floor_coeff / p`
    #[serde(with = "ratio_str")]
    pub rho_floor_coeff: Threshold,
    /// Fibre iteration continues while `|v_Z| >= fibre_support_coeff * sqrt(n)`.
    #[serde(with = "ratio_str")]
    pub fibre_support_coeff: Threshold,
    pub max_attempts: u32,
}

impl ConstantsProfile {
    pub fn paper() -> Self {
        ConstantsProfile {
            name: "paper".into(),
            support_floor_coeff: Threshold::from_integer(1 << 18),
            m_coeff: Threshold::from_integer(1 << 12),
            ell_coeff: Threshold::new(1, 1 << 16),
            t_coeff: Threshold::new(1, 1 << 7),
            size_const: Threshold::from_integer(1 << 16),
            y_density: Threshold::new(3, 8),
            u_density_coeff: Threshold::new(1, 2),
            rho_floor_coeff: Threshold::from_integer(4),
            fibre_support_coeff: Threshold::from_integer(1 << 8),
            max_attempts: 1000,
        }
    }

    /// Constants sized for `n` in the hundreds to low thousands and `p <= 101`.
    pub fn desk() -> Self {
        ConstantsProfile {
            name: "desk".into(),
            support_floor_coeff: Threshold::from_integer(32),
            m_coeff: Threshold::from_integer(128),
            ell_coeff: Threshold::new(1, 1024),
            t_coeff: Threshold::new(1, 32),
            size_const: Threshold::from_integer(1 << 7),
            y_density: Threshold::new(3, 8),
            u_density_coeff: Threshold::new(1, 2),
            rho_floor_coeff: Threshold::from_integer(1),
            fibre_support_coeff: Threshold::from_integer(12),
            max_attempts: 1000,
        }
    }

    /// `paper`, `desk`, or `file:<path>` pointing at a JSON profile.
    pub fn resolve(name: &str) -> Result<Self> {
        match name {
            "paper" => Ok(Self::paper()),
            "desk" => Ok(Self::desk()),
            _ => match name.strip_prefix("file:") {
                Some(path) => Self::load(Path::new(path)),
                None => Err(Error::PreconditionViolated(format!(
                    "unknown profile {name:?} (expected paper, desk or file:<path>)"
                ))),
            },
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let profile: ConstantsProfile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("support_floor_coeff", self.support_floor_coeff),
            ("m_coeff", self.m_coeff),
            ("ell_coeff", self.ell_coeff),
            ("t_coeff", self.t_coeff),
            ("size_const", self.size_const),
            ("y_density", self.y_density),
            ("u_density_coeff", self.u_density_coeff),
            ("rho_floor_coeff", self.rho_floor_coeff),
            ("fibre_support_coeff", self.fibre_support_coeff),
        ];
        for (name, x) in positive {
            if *x.numer() == 0 {
                return Err(Error::PreconditionViolated(format!("{name} must be positive")));
            }
        }
        if self.y_density > Threshold::from_integer(1) {
            return Err(Error::PreconditionViolated("y_density must be at most 1".into()));
        }
        if self.max_attempts == 0 {
            return Err(Error::PreconditionViolated("max_attempts must be positive".into()));
        }
        Ok(())
    }

    /// `m = floor(m_coeff * log p)`, with `log p` frozen.
    pub fn m(&self, p: PrimeModulus) -> usize {
        let l = p.frozen_log();
        let num = *self.m_coeff.numer() as u128 * *l.numer() as u128;
        let den = *self.m_coeff.denom() as u128 * *l.denom() as u128;
        (num / den) as usize
    }

    /// `|v| >= support_floor_coeff * log p`.
    pub fn meets_support_floor(&self, support: usize, p: PrimeModulus) -> bool {
        let l = p.frozen_log();
        let c = self.support_floor_coeff;
        support as u128 * *c.denom() as u128 * *l.denom() as u128 >= *c.numer() as u128 * *l.numer() as u128
    }

    /// `rho >= rho_floor_coeff / p`.
    pub fn meets_rho_floor(&self, r: &RhoResult, p: PrimeModulus) -> bool {
        let c = self.rho_floor_coeff;
        r.at_least(&BigUint::from(*c.numer()), &(BigUint::from(*c.denom()) * p.get()))
    }

    /// `|v_Z| >= fibre_support_coeff * sqrt(n)`, squared to stay in integers.
    pub fn meets_fibre_threshold(&self, support: usize, n: usize) -> bool {
        let c = self.fibre_support_coeff;
        let lhs = support as u128 * *c.denom() as u128;
        lhs * lhs >= (*c.numer() as u128).pow(2) * n as u128
    }

    pub fn params(&self, v: &ZpVector) -> Result<Params> {
        let p = v.modulus();
        let n = v.len() as u64;
        let support = v.support() as u64;
        let scale = |c: Threshold, x: u64| -> Result<Threshold> {
            let num = c.numer().checked_mul(x).ok_or(Error::Overflow("threshold numerator"))?;
            Ok(Threshold::new(num, *c.denom()))
        };
        let ell = scale(self.ell_coeff, support)?;
        Ok(Params {
            m: self.m(p),
            ell,
            ell8: scale(ell, 8)?,
            t: scale(self.t_coeff, n)?,
        })
    }
}

/// Thresholds derived from a profile for one vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub m: usize,
    #[serde(with = "ratio_str")]
    pub ell: Threshold,
    #[serde(with = "ratio_str")]
    pub ell8: Threshold,
    #[serde(with = "ratio_str")]
    pub t: Threshold,
}

fn bernoulli_subset<R: Rng>(n: usize, num: u64, den: u64, rng: &mut R) -> IndexSet {
    IndexSet::new((0..n).filter(|_| rng.gen_range(0..den) < num).collect())
}

/// Outcome of a rejection-sampling loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sampled {
    pub set: IndexSet,
    pub attempts: u32,
}

fn y_accepts(v: &ZpVector, y: &IndexSet, params: &Params, level_8ell: &ResidueSet) -> bool {
    let n = v.len();
    let vy = v.restrict(y.as_slice());
    4 * y.len() >= n
        && 2 * y.len() <= n
        && 4 * vy.support() >= v.support()
        && WeightProfile::of(&vy).level(params.ell).is_subset(level_8ell)
}

/// Draws `Y` with density `y_density` until `n/4 <= |Y| <= n/2`,
/// `|v_Y| >= |v|/4` and `T_ell(v_Y) subset T_{8 ell}(v)`.
pub fn sample_y(v: &ZpVector, profile: &ConstantsProfile, stream: Stream) -> Result<Sampled> {
    let params = profile.params(v)?;
    let level_8ell = WeightProfile::of(v).level(params.ell8);
    let (num, den) = (*profile.y_density.numer(), *profile.y_density.denom());
    for attempt in 0..profile.max_attempts {
        let y = bernoulli_subset(v.len(), num, den, &mut stream.index(attempt as u64).rng());
        if y_accepts(v, &y, &params, &level_8ell) {
            return Ok(Sampled { set: y, attempts: attempt + 1 });
        }
    }
    Err(Error::RetryExhausted { stage: "Y".into(), attempts: profile.max_attempts })
}

fn u_accepts(v: &ZpVector, u: &IndexSet, params: &Params, level_8ell: usize, level_t: &ResidueSet) -> bool {
    if u.len() > params.m {
        return false;
    }
    let f = frequency_set(&v.restrict(u.as_slice()));
    level_8ell <= 2 * f.len() && f.is_subset(level_t)
}

/// Draws `U` with density `u_density_coeff * m / n` until `|U| <= m`,
/// `|T_{8 ell}(v)| <= 2 |F(v_U)|` and `F(v_U) subset T_t(v)`.
pub fn sample_u(v: &ZpVector, profile: &ConstantsProfile, stream: Stream) -> Result<Sampled> {
    let params = profile.params(v)?;
    let profile_v = WeightProfile::of(v);
    let level_8ell = profile_v.level_size(params.ell8);
    let level_t = profile_v.level(params.t);
    let num = *profile.u_density_coeff.numer() as u128 * params.m as u128;
    let den = *profile.u_density_coeff.denom() as u128 * v.len().max(1) as u128;
    let (num, den) = if num >= den { (1, 1) } else { (num as u64, den as u64) };
    for attempt in 0..profile.max_attempts {
        let u = bernoulli_subset(v.len(), num, den, &mut stream.index(attempt as u64).rng());
        if u_accepts(v, &u, &params, level_8ell, &level_t) {
            return Ok(Sampled { set: u, attempts: attempt + 1 });
        }
    }
    Err(Error::RetryExhausted { stage: "U".into(), attempts: profile.max_attempts })
}

/// Quantities measured while building a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measured {
    pub n: usize,
    pub support_v: usize,
    pub size_y: usize,
    pub support_v_y: usize,
    pub size_u: usize,
    pub outside_count: usize,
    pub size_b: usize,
    pub size_f: usize,
    pub level_ell_v_y: usize,
    pub level_8ell_v: usize,
    pub rho_v_y: RhoResult,
}

/// Output of the construction: `(Y, U, B)` plus everything needed to re-check it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContainerCertificate {
    pub p: u64,
    pub profile: String,
    pub params: Params,
    pub y: IndexSet,
    pub u: IndexSet,
    /// `v_U` padded with zeros to length `m`: the index of `B` in the family.
    pub family_index: Vec<u64>,
    pub frequencies: Vec<u64>,
    pub container: Vec<u64>,
    pub measured: Measured,
    pub rounds: u32,
    pub y_attempts: u32,
    pub u_attempts: u32,
}

impl ContainerCertificate {
    pub fn container_set(&self) -> Result<ResidueSet> {
        Ok(ResidueSet::from_iter(PrimeModulus::new(self.p)?, self.container.iter().copied()))
    }
}

/// Named pass/fail outcomes of a re-verification.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub checks: Vec<(String, bool)>,
}

impl CheckReport {
    pub fn push(&mut self, name: &str, ok: bool) {
        self.checks.push((name.to_string(), ok));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.as_str()).collect()
    }
}

/// `size_b * rho * sqrt(support) <= c`, squared into integers.
pub fn size_bound_holds(size_b: usize, r: &RhoResult, support: usize, c: Threshold) -> bool {
    // size_b * count * den_c * sqrt(s) <= num_c * 2^L
    let lhs = BigUint::from(size_b) * &r.count * *c.denom();
    let rhs = BigUint::from(*c.numer()) << r.log2_denominator;
    &lhs * &lhs * support <= &rhs * &rhs
}

fn assemble(v: &ZpVector, profile: &ConstantsProfile, params: &Params, y: &Sampled, u: &Sampled, round: u32) -> ContainerCertificate {
    let vy = v.restrict(y.set.as_slice());
    let vu = v.restrict(u.set.as_slice());
    let f = frequency_set(&vu);
    let b = container(&f);
    let mut family_index = vu.entries().to_vec();
    family_index.resize(params.m.max(family_index.len()), 0);
    let measured = Measured {
        n: v.len(),
        support_v: v.support(),
        size_y: y.set.len(),
        support_v_y: vy.support(),
        size_u: u.set.len(),
        outside_count: v.entries().iter().filter(|&&r| !b.contains(r)).count(),
        size_b: b.len(),
        size_f: f.len(),
        level_ell_v_y: WeightProfile::of(&vy).level_size(params.ell),
        level_8ell_v: WeightProfile::of(v).level_size(params.ell8),
        rho_v_y: rho(&vy),
    };
    ContainerCertificate {
        p: v.modulus().get(),
        profile: profile.name.clone(),
        params: *params,
        y: y.set.clone(),
        u: u.set.clone(),
        family_index,
        frequencies: f.to_vec(),
        container: b.members.to_vec(),
        measured,
        rounds: round + 1,
        y_attempts: y.attempts,
        u_attempts: u.attempts,
    }
}

/// Builds `B(v) = C(F(v_U))` with its certificate. If a drawn `(Y, U)` pair
/// passes both acceptance tests but the certificate does not verify, the
/// whole round is redrawn from a fresh substream.
pub fn build_container(v: &ZpVector, profile: &ConstantsProfile, stream: Stream) -> Result<ContainerCertificate> {
    let p = v.modulus();
    if !profile.meets_support_floor(v.support(), p) {
        return Err(Error::PreconditionViolated(format!(
            "|v| = {} is below {} log p",
            v.support(),
            profile.support_floor_coeff
        )));
    }
    if !profile.meets_rho_floor(&rho(v), p) {
        return Err(Error::PreconditionViolated(format!(
            "rho(v) is below {}/p",
            profile.rho_floor_coeff
        )));
    }
    let params = profile.params(v)?;
    for round in 0..profile.max_attempts {
        let rs = stream.index(round as u64);
        let y = sample_y(v, profile, rs.split("Y"))?;
        let u = sample_u(v, profile, rs.split("U"))?;
        let cert = assemble(v, profile, &params, &y, &u, round);
        if verify_certificate(v, profile, &cert).passed() {
            return Ok(cert);
        }
    }
    Err(Error::RetryExhausted { stage: "certificate".into(), attempts: profile.max_attempts })
}

/// Recomputes every certificate quantity from `(v, Y, U, B)` alone.
pub fn verify_certificate(v: &ZpVector, profile: &ConstantsProfile, cert: &ContainerCertificate) -> CheckReport {
    let mut r = CheckReport::default();
    let p = v.modulus();
    let n = v.len();
    let m = &cert.measured;
    r.push("modulus", cert.p == p.get());
    let params = match profile.params(v) {
        Ok(x) => x,
        Err(_) => {
            r.push("params", false);
            return r;
        }
    };
    r.push("params", params == cert.params);
    let in_range = |s: &IndexSet| s.iter().all(|i| i < n);
    r.push("index_range", in_range(&cert.y) && in_range(&cert.u));
    if !in_range(&cert.y) || !in_range(&cert.u) {
        return r;
    }

    let vy = v.restrict(cert.y.as_slice());
    let vu = v.restrict(cert.u.as_slice());
    let f = frequency_set(&vu);
    let b = container(&f);
    let profile_v = WeightProfile::of(v);
    let level_8ell = profile_v.level(params.ell8);
    let level_ell_vy = WeightProfile::of(&vy).level(params.ell);
    let outside = v.entries().iter().filter(|&&x| !b.contains(x)).count();
    let rho_vy = rho(&vy);

    // recorded values match recomputation
    r.push("frequencies", f.to_vec() == cert.frequencies);
    r.push("container", b.members.to_vec() == cert.container);
    let padded_ok = cert.family_index.len() == params.m.max(vu.len())
        && cert.family_index[..vu.len()] == *vu.entries()
        && cert.family_index[vu.len()..].iter().all(|&x| x == 0);
    r.push("family_index", padded_ok);
    if padded_ok {
        let w = ZpVector::new(p, cert.family_index.clone());
        r.push("family_member", w.map(|w| frequency_set(&w) == f).unwrap_or(false));
    }
    r.push(
        "measured",
        m.n == n
            && m.support_v == v.support()
            && m.size_y == cert.y.len()
            && m.support_v_y == vy.support()
            && m.size_u == cert.u.len()
            && m.outside_count == outside
            && m.size_b == b.len()
            && m.size_f == f.len()
            && m.level_ell_v_y == level_ell_vy.len()
            && m.level_8ell_v == level_8ell.len()
            && m.rho_v_y == rho_vy,
    );

    // the properties themselves
    r.push("y_size", 4 * cert.y.len() >= n && 2 * cert.y.len() <= n);
    r.push("y_support", 4 * vy.support() >= v.support());
    r.push("y_levels", level_ell_vy.is_subset(&level_8ell));
    r.push("u_size", cert.u.len() <= params.m);
    r.push("u_levels", level_8ell.len() <= 2 * f.len());
    r.push("u_frequencies", f.is_subset(&profile_v.level(params.t)));
    r.push("outside", 4 * outside <= n);
    r.push("container_size", b.size_bound_holds());
    r.push("size_bound", size_bound_holds(b.len(), &rho_vy, v.support(), profile.size_const));
    r
}

/// `rho(v_Y) <= (32 / sqrt(ell_coeff)) |T_ell(v_Y)| / (p sqrt|v|)`, evaluated
/// only where it is implied by the bound chain: `rho(v_Y) >= 4/p`,
/// `ell >= 4 log p` and `ell <= |v_Y| / 64`. `None` when not applicable.
pub fn halasz_application_check(v: &ZpVector, profile: &ConstantsProfile, cert: &ContainerCertificate) -> Option<bool> {
    let p = v.modulus();
    let ell = cert.params.ell;
    let m = &cert.measured;
    let four_log_p = p.frozen_log() * Threshold::from_integer(4);
    let applies = m.rho_v_y.at_least(&BigUint::from(4u32), &BigUint::from(p.get()))
        && ell >= four_log_p
        && Threshold::from_integer(64) * ell <= Threshold::from_integer(m.support_v_y as u64);
    if !applies {
        return None;
    }
    let c = profile.ell_coeff;
    let coeff = 32.0 / (*c.numer() as f64 / *c.denom() as f64).sqrt();
    let bound = coeff * m.level_ell_v_y as f64 / (p.get() as f64 * (m.support_v as f64).sqrt());
    Some(m.rho_v_y.to_f64() <= bound + 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::containers::gen_gap_vector;

    fn pm(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    fn gap(n: usize, p: u64, seed: u64) -> ZpVector {
        gen_gap_vector(0, &[1], &[8], n, pm(p), &mut Stream::new(seed).rng()).unwrap()
    }

    #[test]
    fn profile_round_trip_and_resolution() {
        let desk = ConstantsProfile::desk();
        let json = serde_json::to_string(&desk).unwrap();
        assert!(json.contains("\"ell_coeff\":\"1/1024\""));
        let back: ConstantsProfile = serde_json::from_str(&json).unwrap();
        assert_eq!(back, desk);
        assert_eq!(ConstantsProfile::resolve("paper").unwrap(), ConstantsProfile::paper());
        assert!(ConstantsProfile::resolve("bogus").is_err());
        assert_eq!(ratio_str::parse("3/8"), Some(Threshold::new(3, 8)));
        assert_eq!(ratio_str::parse("7"), Some(Threshold::from_integer(7)));
        assert_eq!(ratio_str::parse("1/0"), None);
    }

    #[test]
    fn paper_profile_derived_constants() {
        let paper = ConstantsProfile::paper();
        // floor(4096 ln 101) = 18903
        assert_eq!(paper.m(pm(101)), 18903);
        assert_eq!(paper.m(pm(5)), 6592);
        assert!(!paper.meets_support_floor(421_904, pm(5)));
        assert!(paper.meets_support_floor(421_905, pm(5)));
        assert!(paper.meets_fibre_threshold(256 * 32, 1024));
        assert!(!paper.meets_fibre_threshold(256 * 32 - 1, 1024));
    }

    #[test]
    fn size_bound_is_exact() {
        // 2 * (1/4) * sqrt(16) = 2
        let r = RhoResult { atom: 0, count: BigUint::from(1u32), log2_denominator: 2 };
        assert!(size_bound_holds(2, &r, 16, Threshold::from_integer(2)));
        assert!(!size_bound_holds(2, &r, 17, Threshold::from_integer(2)));
    }

    #[test]
    fn sample_y_desk_constant_vector() {
        let v = ZpVector::new(pm(101), vec![3; 512]).unwrap();
        let y = sample_y(&v, &ConstantsProfile::desk(), Stream::new(1)).unwrap();
        assert!((128..=256).contains(&y.set.len()));
    }

    #[test]
    fn sample_y_paper_profile_accepts_quickly() {
        let paper = ConstantsProfile::paper();
        let s = Stream::new(7);
        let total: u32 = (0..100)
            .map(|i| {
                let v = gap(512, 5, i);
                sample_y(&v, &paper, s.index(i)).unwrap().attempts
            })
            .sum();
        assert!(total <= 400, "mean attempts {}", total as f64 / 100.0);
    }

    #[test]
    fn desk_certificate_for_gap_vector() {
        let v = gap(512, 101, 3);
        let profile = ConstantsProfile::desk();
        let cert = build_container(&v, &profile, Stream::new(11)).unwrap();
        let report = verify_certificate(&v, &profile, &cert);
        assert!(report.passed(), "{:?}", report.failures());
        let again = build_container(&v, &profile, Stream::new(11)).unwrap();
        assert_eq!(cert, again);
        let f = frequency_set(&v.restrict(cert.u.as_slice()));
        assert_eq!(container(&f).members.to_vec(), cert.container);
        assert!(cert.measured.size_b * cert.measured.size_f <= 4 * 101);
        assert!(cert.measured.level_ell_v_y <= cert.measured.level_8ell_v);
    }

    #[test]
    fn tampering_is_detected() {
        let v = gap(512, 101, 4);
        let profile = ConstantsProfile::desk();
        let cert = build_container(&v, &profile, Stream::new(2)).unwrap();
        let mut bad = cert.clone();
        bad.measured.outside_count += 1;
        assert!(!verify_certificate(&v, &profile, &bad).passed());
        let mut bad = cert.clone();
        bad.container.pop();
        assert!(!verify_certificate(&v, &profile, &bad).passed());
        let mut bad = cert;
        bad.y = IndexSet::range(512);
        assert!(!verify_certificate(&v, &profile, &bad).passed());
    }

    #[test]
    fn preconditions_are_enforced() {
        let desk = ConstantsProfile::desk();
        let short = ZpVector::new(pm(101), vec![1; 8]).unwrap();
        assert!(matches!(build_container(&short, &desk, Stream::new(0)), Err(Error::PreconditionViolated(_))));
        let mut strict = desk.clone();
        strict.rho_floor_coeff = Threshold::from_integer(4);
        let spread = gap(512, 101, 5);
        assert!(matches!(build_container(&spread, &strict, Stream::new(0)), Err(Error::PreconditionViolated(_))));
    }
}
