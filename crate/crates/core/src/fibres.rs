//! The iterative fibre map: repeatedly build a container for the not yet
//! covered coordinates, peel off the coordinates it captures, and stop once
//! the remaining support is small.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::anticoncentration::rho;
use crate::error::{Error, Result};
use crate::inverse_lo::{build_container, verify_certificate, CheckReport, ConstantsProfile, ContainerCertificate};
use crate::rng::Stream;
use crate::sets::IndexSet;
use crate::zp::{PrimeModulus, ZpVector};

/// One iteration: `Z_k`, then `(X_k, Y_k, B_k)` chosen from it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibreStep {
    pub z: IndexSet,
    pub x: IndexSet,
    pub y: IndexSet,
    pub container: Vec<u64>,
    /// Certificate for `v_{Z_k}`, in coordinates local to `Z_k`.
    pub certificate: ContainerCertificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibreTrace {
    pub p: u64,
    pub n: usize,
    pub profile: String,
    pub steps: Vec<FibreStep>,
    pub k_star: usize,
    /// `|v_{Z_{k*+1}}|`
    pub terminal_support: usize,
}

impl FibreTrace {
    /// `Z_{k*+1}`: what is left once the iteration stops.
    pub fn final_z(&self) -> IndexSet {
        match self.steps.last() {
            Some(s) => s.z.difference(&s.x),
            None => IndexSet::range(self.n),
        }
    }

    /// Digest of the fibre label `(X_i, Y_i, B_i)_i`; vectors in the same
    /// fibre share it.
    pub fn signature(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.p.to_le_bytes());
        h.update((self.n as u64).to_le_bytes());
        for s in &self.steps {
            for part in [s.x.as_slice(), s.y.as_slice()] {
                h.update((part.len() as u64).to_le_bytes());
                for &i in part {
                    h.update((i as u64).to_le_bytes());
                }
            }
            h.update((s.container.len() as u64).to_le_bytes());
            for &b in &s.container {
                h.update(b.to_le_bytes());
            }
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Runs the iteration on `v`. Step `k` draws from `stream.index(k)`.
pub fn run_fibre(v: &ZpVector, profile: &ConstantsProfile, stream: Stream) -> Result<FibreTrace> {
    let p = v.modulus();
    let n = v.len();
    if !profile.meets_rho_floor(&rho(v), p) {
        return Err(Error::PreconditionViolated(format!("rho(v) is below {}/p", profile.rho_floor_coeff)));
    }
    let mut z = IndexSet::range(n);
    let mut steps = Vec::new();
    loop {
        let vz = v.restrict(z.as_slice());
        if !profile.meets_fibre_threshold(vz.support(), n) {
            return Ok(FibreTrace {
                p: p.get(),
                n,
                profile: profile.name.clone(),
                k_star: steps.len(),
                terminal_support: vz.support(),
                steps,
            });
        }
        let k = steps.len() + 1;
        let cert = build_container(&vz, profile, stream.index(k as u64))
            .map_err(|e| Error::FibreStep { step: k, source: Box::new(e) })?;
        let y = z.lift(&cert.y);
        let b = cert.container_set()?;
        let x: IndexSet = z.iter().filter(|&i| !y.contains(i) && b.contains(v.get(i))).collect();
        let next = z.difference(&x);
        steps.push(FibreStep { z, x, y, container: cert.container.clone(), certificate: cert });
        z = next;
    }
}

/// Smallest `K` with `(4/3)^K >= n`.
pub fn ceil_log_four_thirds(n: usize) -> usize {
    let (mut lhs, mut rhs, mut k) = (1u128, n as u128, 0usize);
    while lhs < rhs {
        lhs *= 4;
        rhs *= 3;
        k += 1;
    }
    k
}

/// Independent re-check of every trace invariant.
pub fn audit_trace(v: &ZpVector, profile: &ConstantsProfile, trace: &FibreTrace) -> CheckReport {
    let mut r = CheckReport::default();
    let n = v.len();
    r.push("shape", trace.n == n && trace.p == v.modulus().get() && trace.k_star == trace.steps.len());

    let mut expected_z = IndexSet::range(n);
    let mut chain = true;
    let mut reconstruct = true;
    let mut y_in_z = true;
    let mut y_half = true;
    let mut leftover = true;
    let mut shrink = true;
    let mut geometric = true;
    let mut certs = true;
    let mut disjoint = true;
    let mut earlier_x: Vec<&IndexSet> = Vec::new();
    let mut pow4 = 1u128;
    let mut pow3 = 1u128;
    for s in &trace.steps {
        chain &= s.z == expected_z;
        y_in_z &= s.y.is_subset(&s.z);
        y_half &= 2 * s.y.len() <= s.z.len();
        let b: std::collections::BTreeSet<u64> = s.container.iter().copied().collect();
        let rebuilt: IndexSet = s.z.iter().filter(|&i| !s.y.contains(i) && i < n && b.contains(&v.get(i))).collect();
        reconstruct &= rebuilt == s.x;
        let covered = s.x.union(&s.y);
        leftover &= 4 * s.z.difference(&covered).len() <= s.z.len();
        shrink &= 4 * s.x.len() >= s.z.len();
        // 4^{k-1} |Z_k| <= 3^{k-1} n
        geometric &= pow4 * s.z.len() as u128 <= pow3 * n as u128;
        pow4 = pow4.saturating_mul(4);
        pow3 = pow3.saturating_mul(3);
        for xj in &earlier_x {
            disjoint &= s.x.is_disjoint(xj) && s.y.is_disjoint(xj);
        }
        disjoint &= s.x.is_disjoint(&s.y);
        earlier_x.push(&s.x);

        let vz = v.restrict(s.z.as_slice());
        let cert = &s.certificate;
        let local_ok = cert.y.iter().all(|i| i < s.z.len());
        certs &= local_ok
            && s.z.lift(&cert.y) == s.y
            && cert.container == s.container
            && verify_certificate(&vz, profile, cert).passed()
            && profile.meets_fibre_threshold(vz.support(), n);
        expected_z = s.z.difference(&s.x);
    }
    r.push("z_chain", chain);
    r.push("x_reconstruction", reconstruct);
    r.push("y_subset_z", y_in_z);
    r.push("y_half", y_half);
    r.push("disjoint", disjoint);
    r.push("leftover_quarter", leftover);
    r.push("x_quarter", shrink);
    r.push("z_geometric", geometric);
    r.push("certificates", certs);

    let final_support = v.restrict(expected_z.as_slice()).support();
    r.push(
        "termination",
        final_support == trace.terminal_support && !profile.meets_fibre_threshold(final_support, n),
    );
    r.push("k_star_bound", trace.k_star <= ceil_log_four_thirds(n) + 1);
    r
}

/// Log-domain count of possible fibre labels: `2^{|Z_k|}` choices for each
/// of `X_k`, `Y_k` and `p^m` containers per step, with `|Z_k|` following the
/// geometric bound over `K = ceil(log_{4/3} n) + 1` steps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FibreCountBound {
    pub steps: usize,
    pub m: usize,
    pub xy_log: f64,
    pub container_log: f64,
    pub total_log: f64,
    /// `(n/64) log n`
    pub target_log: f64,
    pub within_target: bool,
}

pub fn fibre_count_bound(n: usize, p: PrimeModulus, profile: &ConstantsProfile) -> FibreCountBound {
    let steps = ceil_log_four_thirds(n) + 1;
    let m = profile.m(p);
    let geometric: f64 = (0..steps).map(|k| 0.75f64.powi(k as i32) * n as f64).sum();
    let xy_log = 2.0 * std::f64::consts::LN_2 * geometric;
    let container_log = steps as f64 * m as f64 * p.ln();
    let total_log = xy_log + container_log;
    let target_log = n as f64 / 64.0 * (n as f64).ln();
    FibreCountBound { steps, m, xy_log, container_log, total_log, target_log, within_target: total_log <= target_log }
}
