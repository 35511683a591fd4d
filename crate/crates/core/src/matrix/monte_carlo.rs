//! Sampling estimates. Trial `i` always draws from `stream.index(i)`, so the
//! counts do not depend on how trials are spread over threads.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::det::{is_singular, DET_MAX_N};
use super::sym::SymMatrix;
use crate::error::{Error, Result};
use crate::rng::Stream;

const Z95: f64 = 1.959963984540054;
/// Constant in the `exp(-c sqrt n)` upper bound shape.
pub const BOUND_SHAPE_C: f64 = 1.0 / 32768.0;

/// Wilson score interval at 95%.
pub fn wilson95(successes: u64, trials: u64) -> (f64, f64) {
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).clamp(0.0, phat), (centre + half).clamp(phat, 1.0))
}

fn check(n: usize, trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::DegenerateInput("trials must be positive"));
    }
    if n == 0 || n > DET_MAX_N {
        return Err(Error::GuardExceeded(format!("n = {n} outside 1..={DET_MAX_N}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularityEstimate {
    pub n: usize,
    pub trials: u64,
    /// `det M_n = 0` over `Z`
    pub singular_count: u64,
    pub point_estimate: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    /// `n^2 2^{1-n}`
    pub conjecture: f64,
    /// `exp(-c sqrt n)` with `c = 2^-15`
    pub bound_shape: f64,
    pub p: u64,
    /// `det M_n = 0` over `F_p`
    pub fp_singular_count: u64,
}

pub fn singularity_mc(n: usize, trials: u64, p: u64, stream: Stream) -> Result<SingularityEstimate> {
    check(n, trials)?;
    let (singular, fp_singular) = (0..trials)
        .into_par_iter()
        .map(|i| {
            let m = SymMatrix::sample(n, &mut stream.index(i).rng());
            let z = is_singular(&m).expect("dimension checked");
            let f = z || m.to_modp(p).det() == 0;
            (z as u64, f as u64)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let (wilson_lo, wilson_hi) = wilson95(singular, trials);
    Ok(SingularityEstimate {
        n,
        trials,
        singular_count: singular,
        point_estimate: singular as f64 / trials as f64,
        wilson_lo,
        wilson_hi,
        conjecture: (n * n) as f64 * 2f64.powi(1 - n as i32),
        bound_shape: (-BOUND_SHAPE_C * (n as f64).sqrt()).exp(),
        p,
        fp_singular_count: fp_singular,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointRank {
    pub rank_n: usize,
    pub rank_minor: usize,
    pub count: u64,
}

/// `Pr(rk M_n = k) <= 2 Pr(rk M_m = m - 1)` with `m = 2n - k - 1`, both sides
/// estimated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthCheck {
    pub k: usize,
    pub m: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs - 2 rhs` in standard errors
    pub z_score: f64,
    pub violated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankProfile {
    pub n: usize,
    pub p: u64,
    pub trials: u64,
    pub joint: Vec<JointRank>,
    /// `rk(M_{n-1}) >= rk(M_n) - 2` on every trial.
    pub interlacing: bool,
    pub growth: Vec<GrowthCheck>,
}

impl RankProfile {
    pub fn rank_frequency(&self, k: usize) -> f64 {
        self.joint.iter().filter(|j| j.rank_n == k).map(|j| j.count).sum::<u64>() as f64 / self.trials as f64
    }

    pub fn violations(&self) -> usize {
        self.growth.iter().filter(|g| g.violated).count()
    }
}

fn rank_counts(n: usize, trials: u64, p: u64, stream: Stream) -> BTreeMap<(usize, usize), u64> {
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let m = SymMatrix::sample(n, &mut stream.index(i).rng());
            let full = m.to_modp(p);
            let minor = if n > 1 { full.minor(0, 0).rank() } else { 0 };
            let mut out = BTreeMap::new();
            out.insert((full.rank(), minor), 1u64);
            out
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, c) in b {
                *a.entry(k).or_default() += c;
            }
            a
        })
}

pub fn rank_profile_mc(n: usize, trials: u64, p: u64, stream: Stream) -> Result<RankProfile> {
    check(n, trials)?;
    let counts = rank_counts(n, trials, p, stream.split("profile"));
    let interlacing = counts.keys().all(|&(full, minor)| minor + 2 >= full);
    let joint: Vec<JointRank> =
        counts.iter().map(|(&(rank_n, rank_minor), &count)| JointRank { rank_n, rank_minor, count }).collect();
    let freq = |k: usize| counts.iter().filter(|((r, _), _)| *r == k).map(|(_, c)| c).sum::<u64>() as f64 / trials as f64;

    let mut growth = Vec::new();
    for k in 1..n {
        let m = 2 * n - k - 1;
        if m > DET_MAX_N {
            continue;
        }
        let side = rank_counts(m, trials, p, stream.split("growth").index(m as u64));
        let rhs = side.iter().filter(|((r, _), _)| *r + 1 == m).map(|(_, c)| c).sum::<u64>() as f64 / trials as f64;
        let lhs = freq(k);
        let n_f = trials as f64;
        let sigma = ((lhs * (1.0 - lhs) + 4.0 * rhs * (1.0 - rhs)) / n_f).sqrt();
        let excess = lhs - 2.0 * rhs;
        let z_score = if sigma > 0.0 { excess / sigma } else if excess > 0.0 { f64::INFINITY } else { 0.0 };
        growth.push(GrowthCheck { k, m, lhs, rhs, z_score, violated: z_score > 4.0 });
    }
    Ok(RankProfile { n, p, trials, joint, interlacing, growth })
}
