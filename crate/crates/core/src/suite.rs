//! The acceptance suite: each criterion draws its instances from its own
//! substream, checks them exactly, and reports counts and a verdict.

use std::cmp::Ordering;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::anticoncentration::{cauchy_davenport_check, distribution_zp, halasz_audit, rho, rho_half, sumset_level_check};
use crate::containers::{container, gen_gap_vector, lemma_contain_check, level_set};
use crate::error::{Error, Result};
use crate::fibres::{audit_trace, run_fibre, FibreTrace};
use crate::inverse_lo::{build_container, verify_certificate, ConstantsProfile};
use crate::matrix::exhaustive::singular_count_exact;
use crate::matrix::identities::{
    adjugate_rank1_check, decoupling_identity_check, decoupling_probability_check, odlyzko_check, sample_corank_one,
};
use crate::matrix::{block_probability_exact, match_probability_exact, singularity_mc, MatP};
use crate::rng::{Stream, StreamRng};
use crate::sets::{IndexSet, ResidueSet};
use crate::zp::{PrimeModulus, Threshold, ZpVector};

pub const PRIMES_TO_101: [u64; 24] =
    [5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101];

pub const HALASZ_SLACK: f64 = 1e-12;
pub const CRITERIA: std::ops::RangeInclusive<u32> = 1..=9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u32,
    pub name: String,
    pub cases: u64,
    pub violations: u64,
    pub passed: bool,
    pub details: Value,
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub profile: ConstantsProfile,
    /// Trials per dimension for the interval checks.
    pub mc_trials: u64,
    /// Trials per dimension for the decay trend.
    pub trend_trials: u64,
}

impl SuiteConfig {
    pub fn new(seed: u64, profile: ConstantsProfile) -> Self {
        SuiteConfig { seed, profile, mc_trials: 1_000_000, trend_trials: 100_000 }
    }

    fn stream(&self, id: u32) -> Stream {
        Stream::new(self.seed).split(&format!("criterion-{id}"))
    }
}

#[derive(Default)]
struct Tally {
    cases: u64,
    violations: u64,
}

impl Tally {
    fn record(&mut self, ok: bool) {
        self.cases += 1;
        self.violations += !ok as u64;
    }
}

fn report(id: u32, name: &str, cases: u64, violations: u64, passed: bool, details: Value) -> CriterionReport {
    CriterionReport { id, name: name.to_string(), cases, violations, passed, details }
}

fn random_prime(rng: &mut StreamRng) -> PrimeModulus {
    PrimeModulus::new(*PRIMES_TO_101.choose(rng).expect("nonempty")).expect("prime")
}

fn random_vector(p: PrimeModulus, n: usize, rng: &mut StreamRng) -> ZpVector {
    ZpVector::new(p, (0..n).map(|_| rng.gen_range(0..p.get())).collect()).expect("residues")
}

/// A structured or unstructured vector, each with probability 1/2.
fn mixed_vector(p: PrimeModulus, n: usize, rng: &mut StreamRng) -> ZpVector {
    if rng.gen() {
        let d = rng.gen_range(1..=2);
        let steps: Vec<u64> = (0..d).map(|_| rng.gen_range(1..p.get())).collect();
        let sizes: Vec<u64> = (0..d).map(|_| rng.gen_range(1..=4)).collect();
        let a = rng.gen_range(0..p.get());
        gen_gap_vector(a, &steps, &sizes, n, p, rng).expect("small box")
    } else {
        random_vector(p, n, rng)
    }
}

fn random_subset(n: usize, rng: &mut StreamRng) -> IndexSet {
    (0..n).filter(|_| rng.gen()).collect()
}

fn random_threshold(max_num: u64, den: u64, rng: &mut StreamRng) -> Threshold {
    Threshold::new(rng.gen_range(1..=max_num.max(1)), den)
}

/// Signed-sum law by walking all `2^n` sign patterns.
pub fn brute_distribution(v: &ZpVector) -> Vec<u64> {
    let p = v.modulus();
    let n = v.len();
    let mut counts = vec![0u64; p.as_usize()];
    for mask in 0..1u64 << n {
        let s = (0..n).fold(0, |acc, i| if mask >> i & 1 == 1 { p.add(acc, v.get(i)) } else { p.sub(acc, v.get(i)) });
        counts[s as usize] += 1;
    }
    counts
}

pub fn criterion_1(cfg: &SuiteConfig) -> Result<CriterionReport> {
    let s = cfg.stream(1);
    let mut t = Tally::default();
    for i in 0..500u64 {
        let mut rng = s.index(i).rng();
        let p = random_prime(&mut rng);
        let n = rng.gen_range(1..=12);
        let v = mixed_vector(p, n, &mut rng);
        let exact = distribution_zp(&v);
        let brute = brute_distribution(&v);
        let same = exact.log2_denominator == n as u64
            && exact.offset == 0
            && (0..p.get()).all(|a| exact.count(a as i64) == BigUint::from(brute[a as usize]));
        t.record(same);
    }
    Ok(report(1, "rho oracle equivalence", t.cases, t.violations, t.violations == 0, json!({})))
}

pub fn criterion_2(cfg: &SuiteConfig) -> Result<CriterionReport> {
    let s = cfg.stream(2);
    let mut size = Tally::default();
    for i in 0..200u64 {
        let mut rng = s.split("size").index(i).rng();
        let p = random_prime(&mut rng);
        let k = rng.gen_range(1..=p.get());
        let mut all: Vec<u64> = (0..p.get()).collect();
        all.shuffle(&mut rng);
        let set = ResidueSet::from_iter(p, all.into_iter().take(k as usize));
        size.record(container(&set).size_bound_holds());
    }

    let mut contain = Tally::default();
    for i in 0..200u64 {
        let mut rng = s.split("contain").index(i).rng();
        let p = random_prime(&mut rng);
        let n = rng.gen_range(128..=1024);
        let v = mixed_vector(p, n, &mut rng);
        // t <= n/128 with denominator 128
        let t = random_threshold(n as u64, 128, &mut rng);
        let level = level_set(&v, t).members;
        let mut pick: Vec<u64> = level.iter().filter(|_| rng.gen()).collect();
        if pick.is_empty() {
            pick.push(0);
        }
        let set = ResidueSet::from_iter(p, pick);
        contain.record(lemma_contain_check(&v, &set, t)?.holds);
    }

    let mut sumset = Tally::default();
    for i in 0..100u64 {
        let mut rng = s.split("sumset").index(i).rng();
        let p = random_prime(&mut rng);
        let n = rng.gen_range(4..=64);
        let v = mixed_vector(p, n, &mut rng);
        let m = rng.gen_range(1..=4);
        let t = random_threshold(4 * n as u64, 16, &mut rng);
        sumset.record(sumset_level_check(&v, m, t)?);
    }

    let mut cd = Tally::default();
    for i in 0..100u64 {
        let mut rng = s.split("cauchy-davenport").index(i).rng();
        let p = random_prime(&mut rng);
        let k = rng.gen_range(1..=p.get() / 2 + 1);
        let mut all: Vec<u64> = (0..p.get()).collect();
        all.shuffle(&mut rng);
        let a = ResidueSet::from_iter(p, all.into_iter().take(k as usize));
        cd.record(cauchy_davenport_check(&a, rng.gen_range(1..=4))?);
    }
    let parts = [("container_size", &size), ("containment", &contain), ("sumset", &sumset), ("cauchy_davenport", &cd)];
    let cases = parts.iter().map(|(_, t)| t.cases).sum();
    let violations = parts.iter().map(|(_, t)| t.violations).sum();
    let details: serde_json::Map<String, Value> =
        parts.iter().map(|(k, t)| (k.to_string(), json!({"cases": t.cases, "violations": t.violations}))).collect();
    Ok(report(2, "deterministic lemma suite", cases, violations, violations == 0, Value::Object(details)))
}

pub fn criterion_3(cfg: &SuiteConfig) -> Result<CriterionReport> {
    let s = cfg.stream(3);
    let mut t = Tally::default();
    let mut worst_margin = f64::INFINITY;
    for i in 0..200u64 {
        let mut rng = s.index(i).rng();
        let p = random_prime(&mut rng);
        let support = rng.gen_range(64..=320);
        let zeros = rng.gen_range(0..=16);
        let mut v = mixed_vector(p, support, &mut rng).entries().to_vec();
        for x in v.iter_mut().filter(|x| **x == 0) {
            *x = 1;
        }
        v.extend(std::iter::repeat(0).take(zeros));
        v.shuffle(&mut rng);
        let v = ZpVector::new(p, v)?;
        let r = rho(&v);
        for ell in 1..=(v.support() / 64) as u64 {
            let audit = halasz_audit(&v, &r, Threshold::from_integer(ell));
            let lemma = audit.lemma.ok_or(Error::PreconditionViolated("ell out of range".into()))?;
            worst_margin = worst_margin.min(lemma - audit.rho);
            t.record(audit.second.is_some() && audit.holds(HALASZ_SLACK));
        }
    }
    let details = json!({ "slack": HALASZ_SLACK, "min_lemma_margin": worst_margin });
    Ok(report(3, "halasz chain", t.cases, t.violations, t.violations == 0, details))
}

fn gap_instance(rng: &mut StreamRng, n: usize, primes: &[u64]) -> ZpVector {
    let p = PrimeModulus::new(*primes.choose(rng).expect("nonempty")).expect("prime");
    let d = rng.gen_range(1..=2);
    let a = rng.gen_range(0..p.get());
    let steps: Vec<u64> = (0..d).map(|_| rng.gen_range(1..p.get())).collect();
    let sizes: Vec<u64> = (0..d).map(|_| rng.gen_range(2..=8)).collect();
    gen_gap_vector(a, &steps, &sizes, n, p, rng).expect("small box")
}

pub fn criterion_4(cfg: &SuiteConfig) -> Result<CriterionReport> {
    let s = cfg.stream(4);
    let primes = &PRIMES_TO_101[13..];
    let (mut built, mut verified, mut rounds) = (0u64, 0u64, 0u64);
    let mut failures = Vec::new();
    for i in 0..100u64 {
        let mut rng = s.index(i).rng();
        let v = gap_instance(&mut rng, 512, primes);
        match build_container(&v, &cfg.profile, s.index(i).split("build")) {
            Ok(cert) => {
                built += 1;
                rounds += cert.rounds as u64;
                let r = verify_certificate(&v, &cfg.profile, &cert);
                if r.passed() {
                    verified += 1;
                } else {
                    failures.push(json!({"instance": i, "failed": r.failures()}));
                }
            }
            Err(e) => failures.push(json!({"instance": i, "error": e.to_string()})),
        }
    }
    let passed = built >= 99 && verified == built;
    let details = json!({"built": built, "verified": verified, "rounds": rounds, "failures": failures, "profile": cfg.profile.name});
    Ok(report(4, "container construction", 100, 100 - verified, passed, details))
}

/// Corrupted copies of a trace, each of which the audit must reject.
pub fn trace_mutations(t: &FibreTrace) -> Vec<(&'static str, FibreTrace)> {
    let mut out = Vec::new();
    let mut m = t.clone();
    m.k_star += 1;
    out.push(("k_star", m));
    let mut m = t.clone();
    m.terminal_support += 1;
    out.push(("terminal_support", m));
    if let Some(step) = t.steps.first() {
        if let Some(&i) = step.x.as_slice().first() {
            let mut m = t.clone();
            let one = IndexSet::new(vec![i]);
            m.steps[0].x = step.x.difference(&one);
            m.steps[0].y = step.y.union(&one);
            out.push(("x_to_y", m));
            let mut m = t.clone();
            m.steps[0].x = step.x.difference(&one);
            out.push(("drop_x", m));
        }
        if let Some(&b) = step.container.first() {
            let mut m = t.clone();
            m.steps[0].container.retain(|&c| c != b);
            out.push(("shrink_container", m));
        }
        let mut m = t.clone();
        m.steps.pop();
        m.k_star -= 1;
        out.push(("truncate", m));
    }
    out
}

pub fn criterion_5(cfg: &SuiteConfig) -> Result<CriterionReport> {
    let s = cfg.stream(5);
    let mut primes: Vec<u64> = PRIMES_TO_101[13..].to_vec();
    primes.extend([5, 7, 11, 13, 31]);
    let (mut audited, mut k_max, mut mutations, mut caught) = (0u64, 0usize, 0u64, 0u64);
    let mut failures = Vec::new();
    for i in 0..100u64 {
        let mut rng = s.index(i).rng();
        let v = gap_instance(&mut rng, 1024, &primes);
        match run_fibre(&v, &cfg.profile, s.index(i).split("fibre")) {
            Ok(trace) => {
                let r = audit_trace(&v, &cfg.profile, &trace);
                if r.passed() {
                    audited += 1;
                } else {
                    failures.push(json!({"instance": i, "failed": r.failures()}));
                }
                k_max = k_max.max(trace.k_star);
                for (name, bad) in trace_mutations(&trace) {
                    mutations += 1;
                    if audit_trace(&v, &cfg.profile, &bad).passed() {
                        failures.push(json!({"instance": i, "uncaught_mutation": name}));
                    } else {
                        caught += 1;
                    }
                }
            }
            Err(e) => failures.push(json!({"instance": i, "error": e.to_string()})),
        }
    }
    let passed = audited == 100 && caught == mutations;
    let details = json!({"audited": audited, "max_k_star": k_max, "mutations": mutations, "caught": caught, "failures": failures});
    Ok(report(5, "fibre iteration audit", 100 + mutations, (100 - audited) + (mutations - caught), passed, details))
}

fn nonzero_vector(p: PrimeModulus, n: usize, rng: &mut StreamRng) -> ZpVector {
    loop {
        let v = random_vector(p, n, rng);
        if !v.is_zero() {
            return v;
        }
    }
}

pub fn criterion_6(cfg: &SuiteConfig) -> Result<CriterionReport> {
    let s = cfg.stream(6);
    let p = PrimeModulus::new(5)?;
    let (singular, total) = singular_count_exact(2)?;
    let exact_ok = Threshold::new(singular, total) == Threshold::new(1, 2);

    let mut matching = Tally::default();
    for i in 0..50u64 {
        let mut rng = s.split("match").index(i).rng();
        let v = nonzero_vector(p, 4, &mut rng);
        let w = random_vector(p, 4, &mut rng);
        matching.record(match_probability_exact(&v, &w)? <= Threshold::new(1, 16));
    }
    let mut block = Tally::default();
    for i in 0..50u64 {
        let mut rng = s.split("block").index(i).rng();
        let v = random_vector(p, 4, &mut rng);
        let w = random_vector(p, 4, &mut rng);
        let labels: Vec<u8> = (0..4).map(|_| rng.gen_range(0..3)).collect();
        let x: IndexSet = (0..4).filter(|&j| labels[j] == 0).collect();
        let y: IndexSet = (0..4).filter(|&j| labels[j] == 1).collect();
        block.record(block_probability_exact(&v, &w, &x, &y)?.holds);
    }
    let cases = 1 + matching.cases + block.cases;
    let violations = !exact_ok as u64 + matching.violations + block.violations;
    let details = json!({
        "singularity_2": format!("{singular}/{total}"),
        "match": {"cases": matching.cases, "violations": matching.violations},
        "block": {"cases": block.cases, "violations": block.violations},
    });
    Ok(report(6, "exhaustive matrix checks", cases, violations, violations == 0, details))
}

fn random_invertible_sign(d: usize, p: u64, rng: &mut StreamRng) -> MatP {
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

fn signs(d: usize, rng: &mut StreamRng) -> Vec<i64> {
    (0..d).map(|_| if rng.gen() { 1 } else { -1 }).collect()
}

pub fn criterion_7(cfg: &SuiteConfig) -> Result<CriterionReport> {
    let s = cfg.stream(7);
    let mut ident = Tally::default();
    for i in 0..200u64 {
        let mut rng = s.split("decoupling-identity").index(i).rng();
        let d = rng.gen_range(1..=8);
        let p = [5u64, 7, 13][rng.gen_range(0..3)];
        let m = random_invertible_sign(d, p, &mut rng);
        let (u, u2) = (signs(d, &mut rng), signs(d, &mut rng));
        let i_set = random_subset(d, &mut rng);
        ident.record(decoupling_identity_check(&m, &u, &u2, &i_set)?.holds);
    }
    let mut prob = Tally::default();
    for i in 0..100u64 {
        let mut rng = s.split("decoupling-probability").index(i).rng();
        let wx: Vec<u64> = (0..4).map(|_| rng.gen_range(1..=8)).collect();
        let wy: Vec<u64> = (0..4).map(|_| rng.gen_range(1..=8)).collect();
        let e: Vec<Vec<bool>> = (0..4).map(|_| (0..4).map(|_| rng.gen()).collect()).collect();
        prob.record(decoupling_probability_check(&wx, &wy, &e)?.holds);
    }
    let mut odl = Tally::default();
    let mut i = 0u64;
    while odl.cases < 100 {
        let mut rng = s.split("odlyzko").index(i).rng();
        i += 1;
        let n = rng.gen_range(1..=12);
        let k = rng.gen_range(0..=n);
        let p = *PRIMES_TO_101[..6].choose(&mut rng).expect("nonempty");
        let basis: Vec<Vec<u64>> = (0..k)
            .map(|_| {
                // half of the time plant a sign vector so the count is nontrivial
                if rng.gen() {
                    (0..n).map(|_| if rng.gen() { 1 } else { p - 1 }).collect()
                } else {
                    (0..n).map(|_| rng.gen_range(0..p)).collect()
                }
            })
            .collect();
        match odlyzko_check(&basis, n, p) {
            Ok(r) => odl.record(r.holds),
            Err(Error::DependentBasis) => continue,
            Err(e) => return Err(e),
        }
    }
    let mut adj = Tally::default();
    for i in 0..50u64 {
        let mut rng = s.split("adjugate").index(i).rng();
        let n = rng.gen_range(2..=6);
        let m = sample_corank_one(n, 7, &mut rng, 100_000)?;
        adj.record(adjugate_rank1_check(&m)?.passed());
    }
    let parts = [("decoupling_identity", &ident), ("decoupling_probability", &prob), ("odlyzko", &odl), ("adjugate", &adj)];
    let cases = parts.iter().map(|(_, t)| t.cases).sum();
    let violations = parts.iter().map(|(_, t)| t.violations).sum();
    let details: serde_json::Map<String, Value> =
        parts.iter().map(|(k, t)| (k.to_string(), json!({"cases": t.cases, "violations": t.violations}))).collect();
    Ok(report(7, "rank reduction identities", cases, violations, violations == 0, Value::Object(details)))
}

pub fn criterion_8(cfg: &SuiteConfig) -> Result<CriterionReport> {
    let s = cfg.stream(8);
    let mut t = Tally::default();
    for i in 0..500u64 {
        let mut rng = s.index(i).rng();
        let p = random_prime(&mut rng);
        let n = rng.gen_range(1..=16);
        let v = mixed_vector(p, n, &mut rng);
        let r = rho(&v);

        let y = random_subset(n, &mut rng);
        let restrict_ok = rho(&v.restrict(y.as_slice())).cmp_value(&r) != Ordering::Less;

        let part = random_subset(n, &mut rng);
        let r_i = rho(&v.restrict(part.as_slice()));
        let j = (n - part.len()) as u64;
        let sandwich = r.cmp_value(&r_i) != Ordering::Greater && r_i.cmp_value(&r.times_pow2(j)) != Ordering::Greater;

        let half = rho_half(&v);
        let doubled = rho(&v.concat(&v));
        let lazy = half.cmp_value(&doubled) == Ordering::Equal && half.cmp_value(&r) != Ordering::Greater;
        t.record(restrict_ok && sandwich && lazy);
    }
    Ok(report(8, "rho inequalities", t.cases, t.violations, t.violations == 0, json!({})))
}

pub fn criterion_9(cfg: &SuiteConfig) -> Result<CriterionReport> {
    let s = cfg.stream(9);
    let mut intervals = Vec::new();
    let mut misses = 0u64;
    for n in 2..=5usize {
        let (singular, total) = singular_count_exact(n)?;
        let exact = singular as f64 / total as f64;
        let e = singularity_mc(n, cfg.mc_trials, 5, s.split("interval").index(n as u64))?;
        let hit = e.wilson_lo <= exact && exact <= e.wilson_hi;
        misses += !hit as u64;
        intervals.push(json!({
            "n": n, "exact": format!("{singular}/{total}"), "singular": e.singular_count,
            "trials": e.trials, "lo": e.wilson_lo, "hi": e.wilson_hi, "contains": hit,
        }));
    }
    let mut trend = Vec::new();
    let mut estimates = Vec::new();
    for n in 4..=16usize {
        let e = singularity_mc(n, cfg.trend_trials, 5, s.split("trend").index(n as u64))?;
        estimates.push(e.point_estimate);
        trend.push(json!({
            "n": n, "singular": e.singular_count, "fp_singular": e.fp_singular_count,
            "p_hat": e.point_estimate, "conjecture": e.conjecture,
        }));
    }
    let breaks = estimates.windows(2).filter(|w| w[1] >= w[0]).count() as u64;
    let passed = misses <= 1 && breaks == 0;
    let details = json!({"intervals": intervals, "misses": misses, "trend": trend, "trend_breaks": breaks});
    Ok(report(9, "monte carlo consistency", 4 + 12, misses + breaks, passed, details))
}

pub fn run_criterion(id: u32, cfg: &SuiteConfig) -> Result<CriterionReport> {
    match id {
        1 => criterion_1(cfg),
        2 => criterion_2(cfg),
        3 => criterion_3(cfg),
        4 => criterion_4(cfg),
        5 => criterion_5(cfg),
        6 => criterion_6(cfg),
        7 => criterion_7(cfg),
        8 => criterion_8(cfg),
        9 => criterion_9(cfg),
        _ => Err(Error::PreconditionViolated(format!("no criterion {id}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SuiteConfig {
        SuiteConfig::new(7, ConstantsProfile::desk())
    }

    #[test]
    fn brute_distribution_small() {
        let v = ZpVector::new(PrimeModulus::new(5).unwrap(), vec![1, 1]).unwrap();
        assert_eq!(brute_distribution(&v), vec![2, 0, 1, 1, 0]);
    }

    #[test]
    fn cheap_criteria_pass() {
        for id in [1, 2, 6, 8] {
            let r = run_criterion(id, &cfg()).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn mutations_are_distinct_from_the_trace() {
        let p = PrimeModulus::new(101).unwrap();
        let v = ZpVector::new(p, vec![5; 1024]).unwrap();
        let desk = ConstantsProfile::desk();
        let t = run_fibre(&v, &desk, Stream::new(3)).unwrap();
        let muts = trace_mutations(&t);
        assert!(muts.len() >= 5);
        for (name, m) in muts {
            assert!(!audit_trace(&v, &desk, &m).passed(), "{name}");
        }
    }
}
