//! Artifacts: a self-describing record (canonical JSON) or a CSV table, and
//! the exit-code convention shared by every subcommand.

use std::io::Write;
use std::process::ExitCode;

use ilo_core::canon;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::{Format, Global};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub struct Outcome {
    pub command: &'static str,
    /// Command-specific parameters; seed and profile are added on output.
    pub config: Value,
    pub inputs_digest: Option<String>,
    pub outputs: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub failures: Vec<Value>,
}

impl Outcome {
    pub fn new(command: &'static str, config: Value, header: Vec<&'static str>) -> Self {
        Outcome { command, config, inputs_digest: None, outputs: Value::Null, header, rows: Vec::new(), failures: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn full_config(g: &Global, o: &Outcome) -> Value {
    let mut c = o.config.clone();
    if let Value::Object(m) = &mut c {
        m.insert("seed".into(), json!(g.seed));
        m.insert("profile".into(), json!(g.profile));
    }
    c
}

pub fn render(g: &Global, o: &Outcome) -> ilo_core::Result<Vec<u8>> {
    match g.format {
        Format::Json => {
            let config = full_config(g, o);
            let hash = sha256_hex(canon::to_string(&config)?.as_bytes());
            let doc = json!({
                "command": o.command,
                "config": config,
                "config_hash": hash,
                "inputs_digest": o.inputs_digest,
                "outputs": o.outputs,
                "passed": o.passed(),
                "failures": o.failures,
            });
            let mut s = canon::to_string(&doc)?;
            s.push('\n');
            Ok(s.into_bytes())
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| ilo_core::Error::Io(std::io::Error::other(e));
            w.write_record(&o.header).map_err(io)?;
            for r in &o.rows {
                w.write_record(r).map_err(io)?;
            }
            w.into_inner().map_err(|e| ilo_core::Error::Io(e.into_error()))
        }
    }
}

pub fn finish(g: &Global, o: Outcome) -> ExitCode {
    let bytes = match render(g, &o) {
        Ok(b) => b,
        Err(e) => return runtime_error(&e.to_string()),
    };
    let written = match &g.out {
        Some(path) => std::fs::write(path, &bytes),
        None => std::io::stdout().write_all(&bytes),
    };
    if let Err(e) = written {
        return runtime_error(&e.to_string());
    }
    if o.passed() {
        ExitCode::SUCCESS
    } else {
        let report = json!({"command": o.command, "failures": o.failures});
        eprintln!("{}", canon::to_string(&report).unwrap_or_default());
        ExitCode::from(1)
    }
}

fn error_json(kind: &str, msg: &str) -> String {
    canon::to_string(&json!({"error": kind, "message": msg})).unwrap_or_default()
}

pub fn usage_error(msg: &str) -> ExitCode {
    eprintln!("{}", error_json("usage", msg));
    ExitCode::from(2)
}

pub fn runtime_error(msg: &str) -> ExitCode {
    eprintln!("{}", error_json("runtime", msg));
    ExitCode::from(1)
}
