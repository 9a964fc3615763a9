use crate::args::{Format, Mode};
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::io::Write;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Serialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    /// An independent checker rejected the result.
    InvariantBreach,
    CertificateFailure,
    ResourceLimit,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::InvariantBreach | Status::CertificateFailure => 1,
            Status::ResourceLimit => 3,
        }
    }
}

#[derive(Serialize, Debug)]
pub struct RunConfig {
    pub command: &'static str,
    pub parameters: Value,
    pub master_seed: u64,
    pub arithmetic_mode: Mode,
    /// The guard actually used, or null where the command has none.
    pub guard: Option<u64>,
    pub format: Format,
    pub prng: &'static str,
}

/// What a command hands back: its result, independent verdicts, and an
/// optional table for CSV output.
#[derive(Default)]
pub struct Outcome {
    pub result: Value,
    pub verified: BTreeMap<&'static str, bool>,
    pub diagnostics: Vec<String>,
    pub rows: Option<Vec<Value>>,
}

impl Outcome {
    pub fn new(result: Value) -> Self {
        Outcome { result, ..Default::default() }
    }

    pub fn check(&mut self, name: &'static str, ok: bool) -> &mut Self {
        self.verified.insert(name, ok);
        if !ok {
            self.diagnostics.push(format!("independent check `{name}` failed"));
        }
        self
    }
}

#[derive(Serialize, Debug)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub schema_version: &'static str,
    pub config: RunConfig,
    pub status: Status,
    pub verified: BTreeMap<&'static str, bool>,
    pub result: Value,
    pub diagnostics: Vec<String>,
    #[serde(skip)]
    pub rows: Option<Vec<Value>>,
}

impl Report {
    pub fn emit(&self, format: Format, out: &mut impl Write) -> std::io::Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, self)?;
                writeln!(out)
            }
            Format::Text => self.text(out),
            Format::Csv => self.csv(out),
        }
    }

    fn text(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "{} [{}]: {}", self.config.command, mode_name(self.config.arithmetic_mode), status_name(self.status))?;
        if let Value::Object(m) = &self.result {
            for (k, v) in m {
                writeln!(out, "  {k}: {}", short(v))?;
            }
        } else if !self.result.is_null() {
            writeln!(out, "  {}", short(&self.result))?;
        }
        for (k, v) in &self.verified {
            writeln!(out, "  verified {k}: {v}")?;
        }
        for d in &self.diagnostics {
            writeln!(out, "  note: {d}")?;
        }
        Ok(())
    }

    /// Tables come out as one row per record; anything else as key,value
    /// pairs of the flattened result.
    fn csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        if let Some(rows) = &self.rows {
            let cols: Vec<String> = match rows.first() {
                Some(Value::Object(m)) => m.keys().cloned().collect(),
                _ => Vec::new(),
            };
            writeln!(out, "{}", cols.join(","))?;
            for r in rows {
                let cells: Vec<String> = cols.iter().map(|c| csv_cell(r.get(c).unwrap_or(&Value::Null))).collect();
                writeln!(out, "{}", cells.join(","))?;
            }
            return Ok(());
        }
        writeln!(out, "key,value")?;
        let mut flat = Vec::new();
        flatten("", &self.result, &mut flat);
        flat.push(("status".into(), json!(status_name(self.status))));
        for (k, v) in &self.verified {
            flat.push((format!("verified.{k}"), json!(v)));
        }
        for (k, v) in flat {
            writeln!(out, "{},{}", csv_cell(&json!(k)), csv_cell(&v))?;
        }
        Ok(())
    }
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Rational => "rational",
        Mode::Float => "float",
    }
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Ok => "ok",
        Status::InvariantBreach => "invariant_breach",
        Status::CertificateFailure => "certificate_failure",
        Status::ResourceLimit => "resource_limit",
    }
}

fn short(v: &Value) -> String {
    let s = v.to_string();
    if s.chars().count() <= 120 {
        return s;
    }
    match v {
        Value::Array(a) => format!("[{} items]", a.len()),
        Value::Object(m) => format!("{{{} fields}}", m.len()),
        _ => format!("{}…", s.chars().take(117).collect::<String>()),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| flatten(&key(k), x, out)),
        _ => out.push((prefix.to_string(), v.clone())),
    }
}

fn csv_cell(v: &Value) -> String {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    };
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}
