use std::path::Path;
use std::process::ExitCode;

use ilo_core::anticoncentration::{halasz_audit, rho, rho_half};
use ilo_core::fibres::{audit_trace, run_fibre};
use ilo_core::inverse_lo::{build_container, ratio_str, verify_certificate};
use ilo_core::matrix::exhaustive::singular_count_exact;
use ilo_core::matrix::{q_exact, rank_profile_mc, singularity_mc};
use ilo_core::suite::{run_criterion, SuiteConfig, CRITERIA, HALASZ_SLACK};
use ilo_core::{canon, ConstantsProfile, PrimeModulus, Stream, Threshold, ZpVector};
use serde_json::{json, Value};

use crate::record::{finish, sha256_hex, usage_error, Outcome};
use crate::{Cli, Command};

type Run = std::result::Result<Outcome, String>;

pub fn dispatch(cli: &Cli) -> ExitCode {
    let profile = match ConstantsProfile::resolve(&cli.global.profile) {
        Ok(p) => p,
        Err(e) => return usage_error(&e.to_string()),
    };
    let master = Stream::new(cli.global.seed);
    let result = match &cli.command {
        Command::Rho { file } => cmd_rho(file),
        Command::Halasz { file, ell } => cmd_halasz(file, ell.as_deref()),
        Command::Container { file } => cmd_container(file, &profile, master.split("container")),
        Command::Fibre { file, trace_out } => cmd_fibre(file, &profile, master.split("fibre"), trace_out.as_deref()),
        Command::Singularity { exact, mc, q, n, trials, p, beta } => {
            if *exact {
                cmd_singularity_exact(*n)
            } else if *mc {
                cmd_singularity_mc(*n, *trials, *p, cli.global.seed, master.split("singularity"))
            } else if *q {
                cmd_q(*n, *p, beta)
            } else {
                Err("choose one of --exact, --mc or --q".into())
            }
        }
        Command::Identities { n, p, trials } => cmd_identities(*n, *p, *trials, cli.global.seed, &profile, master),
        Command::VerifyAll { trials, trend_trials, only } => {
            cmd_verify_all(cli.global.seed, &profile, *trials, *trend_trials, only)
        }
    };
    match result {
        Ok(outcome) => finish(&cli.global, outcome),
        Err(msg) => usage_error(&msg),
    }
}

fn load(file: &Path) -> std::result::Result<(Vec<ZpVector>, String), String> {
    let bytes = std::fs::read(file).map_err(|e| format!("{}: {e}", file.display()))?;
    let text = String::from_utf8(bytes).map_err(|_| format!("{}: not UTF-8", file.display()))?;
    let vectors = ilo_core::io::parse_vectors(&text).map_err(|e| format!("{}: {e}", file.display()))?;
    Ok((vectors, sha256_hex(text.as_bytes())))
}

fn s<T: ToString>(x: T) -> String {
    x.to_string()
}

fn cmd_rho(file: &Path) -> Run {
    let (vectors, digest) = load(file)?;
    let mut o = Outcome::new("rho", json!({ "file": file }), vec!["index", "p", "n", "support", "rho", "rho_half", "rho_float"]);
    o.inputs_digest = Some(digest);
    let mut outputs = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        let r = rho(v);
        let h = rho_half(v);
        o.rows.push(vec![s(i), s(v.modulus()), s(v.len()), s(v.support()), s(&r), s(&h), s(r.to_f64())]);
        outputs.push(json!({"index": i, "p": v.modulus(), "n": v.len(), "support": v.support(), "rho": r, "rho_half": h}));
    }
    o.outputs = Value::Array(outputs);
    Ok(o)
}

fn cmd_halasz(file: &Path, ell: Option<&str>) -> Run {
    let (vectors, digest) = load(file)?;
    let fixed = match ell {
        Some(text) => Some(ratio_str::parse(text).ok_or_else(|| format!("bad --ell {text:?}"))?),
        None => None,
    };
    let mut o = Outcome::new(
        "halasz",
        json!({ "file": file, "ell": ell }),
        vec!["index", "ell", "rho", "first", "second", "lemma", "holds"],
    );
    o.inputs_digest = Some(digest);
    let mut outputs = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        let r = rho(v);
        let ells: Vec<Threshold> = match fixed {
            Some(t) => vec![t],
            None => (1..=(v.support() / 64) as u64).map(Threshold::from_integer).collect(),
        };
        for t in ells {
            let a = halasz_audit(v, &r, t);
            let holds = a.holds(HALASZ_SLACK);
            let opt = |x: Option<f64>| x.map(s).unwrap_or_default();
            o.rows.push(vec![s(i), s(t), s(a.rho), s(a.first), opt(a.second), opt(a.lemma), s(holds)]);
            if !holds {
                o.failures.push(json!({"index": i, "ell": t.to_string()}));
            }
            outputs.push(json!({"index": i, "ell": t.to_string(), "audit": a, "holds": holds}));
        }
    }
    o.outputs = Value::Array(outputs);
    Ok(o)
}

fn cmd_container(file: &Path, profile: &ConstantsProfile, stream: Stream) -> Run {
    let (vectors, digest) = load(file)?;
    let mut o = Outcome::new(
        "container",
        json!({ "file": file }),
        vec!["index", "p", "n", "rounds", "container_size", "outside", "verified"],
    );
    o.inputs_digest = Some(digest);
    let mut outputs = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        match build_container(v, profile, stream.index(i as u64)) {
            Ok(cert) => {
                let report = verify_certificate(v, profile, &cert);
                let m = &cert.measured;
                o.rows.push(vec![
                    s(i),
                    s(v.modulus()),
                    s(v.len()),
                    s(cert.rounds),
                    s(m.size_b),
                    s(m.outside_count),
                    s(report.passed()),
                ]);
                if !report.passed() {
                    o.failures.push(json!({"index": i, "failed": report.failures()}));
                }
                outputs.push(json!({"index": i, "certificate": cert, "verification": report}));
            }
            Err(e) => {
                o.rows.push(vec![s(i), s(v.modulus()), s(v.len()), String::new(), String::new(), String::new(), s(false)]);
                o.failures.push(json!({"index": i, "error": e.to_string()}));
                outputs.push(json!({"index": i, "error": e.to_string()}));
            }
        }
    }
    o.outputs = Value::Array(outputs);
    Ok(o)
}

fn cmd_fibre(file: &Path, profile: &ConstantsProfile, stream: Stream, trace_out: Option<&Path>) -> Run {
    let (vectors, digest) = load(file)?;
    let mut o = Outcome::new(
        "fibre",
        json!({ "file": file }),
        vec!["index", "p", "n", "k_star", "terminal_support", "signature", "audit"],
    );
    o.inputs_digest = Some(digest);
    let mut outputs = Vec::new();
    let mut traces = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        match run_fibre(v, profile, stream.index(i as u64)) {
            Ok(trace) => {
                let report = audit_trace(v, profile, &trace);
                let sig = trace.signature();
                o.rows.push(vec![
                    s(i),
                    s(v.modulus()),
                    s(v.len()),
                    s(trace.k_star),
                    s(trace.terminal_support),
                    sig.clone(),
                    s(report.passed()),
                ]);
                if !report.passed() {
                    o.failures.push(json!({"index": i, "failed": report.failures()}));
                }
                outputs.push(json!({
                    "index": i, "k_star": trace.k_star, "terminal_support": trace.terminal_support,
                    "signature": sig, "audit": report,
                }));
                traces.push(trace);
            }
            Err(e) => {
                o.failures.push(json!({"index": i, "error": e.to_string()}));
                outputs.push(json!({"index": i, "error": e.to_string()}));
            }
        }
    }
    if let Some(path) = trace_out {
        let text = canon::to_string(&traces).map_err(|e| e.to_string())?;
        std::fs::write(path, text + "\n").map_err(|e| format!("{}: {e}", path.display()))?;
    }
    o.outputs = Value::Array(outputs);
    Ok(o)
}

fn cmd_singularity_exact(n: usize) -> Run {
    let (singular, total) = singular_count_exact(n).map_err(|e| e.to_string())?;
    let prob = Threshold::new(singular, total);
    let mut o = Outcome::new("singularity", json!({"mode": "exact", "n": n}), vec!["n", "singular", "total", "probability"]);
    o.rows.push(vec![s(n), s(singular), s(total), s(prob)]);
    o.outputs = json!({"n": n, "singular": singular, "total": total, "probability": prob.to_string()});
    Ok(o)
}

fn cmd_singularity_mc(n: usize, trials: u64, p: u64, seed: u64, stream: Stream) -> Run {
    PrimeModulus::new(p).map_err(|e| e.to_string())?;
    let e = singularity_mc(n, trials, p, stream).map_err(|e| e.to_string())?;
    let mut o = Outcome::new(
        "singularity",
        json!({"mode": "mc", "n": n, "trials": trials, "p": p}),
        vec!["n", "trials", "singular_count", "p_hat", "wilson_lo", "wilson_hi", "conjecture", "seed"],
    );
    o.rows.push(vec![
        s(n),
        s(trials),
        s(e.singular_count),
        s(e.point_estimate),
        s(e.wilson_lo),
        s(e.wilson_hi),
        s(e.conjecture),
        s(seed),
    ]);
    if e.singular_count > e.fp_singular_count {
        o.failures.push(json!({"check": "integer singular implies F_p singular"}));
    }
    if !(e.wilson_lo <= e.point_estimate && e.point_estimate <= e.wilson_hi) {
        o.failures.push(json!({"check": "interval contains estimate"}));
    }
    o.outputs = serde_json::to_value(&e).map_err(|e| e.to_string())?;
    Ok(o)
}

fn cmd_q(n: usize, p: u64, beta: &str) -> Run {
    let b = ratio_str::parse(beta).ok_or_else(|| format!("bad --beta {beta:?}"))?;
    let pm = PrimeModulus::new(p).map_err(|e| e.to_string())?;
    let q = q_exact(n, pm, b, None, true).map_err(|e| e.to_string())?;
    let mut o = Outcome::new(
        "singularity",
        json!({"mode": "q", "n": n, "p": p, "beta": beta}),
        vec!["n", "p", "beta", "q", "w", "qualifying"],
    );
    let w: Vec<String> = q.w.iter().map(s).collect();
    o.rows.push(vec![s(n), s(p), s(b), s(q.q), w.join(" "), s(q.qualifying)]);
    o.outputs = serde_json::to_value(&q).map_err(|e| e.to_string())?;
    Ok(o)
}

fn criteria_rows(o: &mut Outcome, reports: &[ilo_core::CriterionReport]) {
    for r in reports {
        o.rows.push(vec![s(r.id), r.name.clone(), s(r.cases), s(r.violations), s(r.passed)]);
        if !r.passed {
            o.failures.push(json!({"criterion": r.id, "name": r.name, "details": r.details}));
        }
    }
}

fn cmd_identities(n: usize, p: u64, trials: u64, seed: u64, profile: &ConstantsProfile, master: Stream) -> Run {
    PrimeModulus::new(p).map_err(|e| e.to_string())?;
    let cfg = SuiteConfig::new(seed, profile.clone());
    let mut reports = Vec::new();
    for id in [6, 7, 8] {
        reports.push(run_criterion(id, &cfg).map_err(|e| e.to_string())?);
    }
    let profile_mc = rank_profile_mc(n, trials, p, master.split("rank-profile")).map_err(|e| e.to_string())?;
    let mut o = Outcome::new(
        "identities",
        json!({"n": n, "p": p, "trials": trials}),
        vec!["id", "name", "cases", "violations", "passed"],
    );
    criteria_rows(&mut o, &reports);
    let rank_ok = profile_mc.interlacing && profile_mc.violations() == 0;
    o.rows.push(vec![
        "rank".into(),
        "rank profile".into(),
        s(profile_mc.growth.len() + 1),
        s(profile_mc.violations() + !profile_mc.interlacing as usize),
        s(rank_ok),
    ]);
    if !rank_ok {
        o.failures.push(json!({"check": "rank profile", "growth": profile_mc.growth, "interlacing": profile_mc.interlacing}));
    }
    o.outputs = json!({"criteria": reports, "rank_profile": profile_mc});
    Ok(o)
}

fn cmd_verify_all(seed: u64, profile: &ConstantsProfile, trials: u64, trend_trials: u64, only: &[u32]) -> Run {
    let mut cfg = SuiteConfig::new(seed, profile.clone());
    cfg.mc_trials = trials;
    cfg.trend_trials = trend_trials;
    let ids: Vec<u32> = if only.is_empty() { CRITERIA.collect() } else { only.to_vec() };
    let mut reports = Vec::new();
    for id in ids.iter().copied() {
        reports.push(run_criterion(id, &cfg).map_err(|e| e.to_string())?);
    }
    let mut o = Outcome::new(
        "verify-all",
        json!({"trials": trials, "trend_trials": trend_trials, "criteria": ids}),
        vec!["id", "name", "cases", "violations", "passed"],
    );
    criteria_rows(&mut o, &reports);
    o.outputs = json!({ "criteria": reports });
    Ok(o)
}
