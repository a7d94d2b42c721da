//! Reports, exit codes and rendering.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rkhs_core::Error;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_ERROR: u8 = 2;

/// An error that ends a command with a nonzero exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub message: String,
    pub exit_code: u8,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            exit_code: EXIT_ERROR,
        }
    }
}

/// A refuted CNP sample is a verdict; every other library error is an input
/// or hypothesis error.
impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let exit_code = match e {
            Error::NotCnp { .. } => EXIT_FAIL,
            _ => EXIT_ERROR,
        };
        Self {
            message: e.to_string(),
            exit_code,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs_digest: String,
    pub tolerances: Value,
    pub verdicts: Value,
    pub exit_code: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => self.to_text(),
        }
    }

    fn to_text(&self) -> String {
        let mut out = format!(
            "command: {}\ninputs_digest: {}\n",
            self.command, self.inputs_digest
        );
        flatten("tolerances", &self.tolerances, &mut out);
        flatten("", &self.verdicts, &mut out);
        out.push_str(&format!("exit_code: {}\n", self.exit_code));
        out
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) if !is_rational(v) => {
            for (k, x) in m {
                flatten(&join(k), x, out);
            }
        }
        _ => out.push_str(&format!("{prefix}: {}\n", scalar_text(v))),
    }
}

fn is_rational(v: &Value) -> bool {
    v.as_object()
        .is_some_and(|m| m.len() == 2 && m.contains_key("num") && m.contains_key("den"))
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Object(m) if is_rational(v) => format!(
            "{}/{}",
            m["num"].as_str().unwrap_or("?"),
            m["den"].as_str().unwrap_or("?")
        ),
        Value::Array(xs) => {
            let parts: Vec<String> = xs.iter().map(scalar_text).collect();
            format!("[{}]", parts.join(", "))
        }
        other => other.to_string(),
    }
}

pub fn rational(r: &BigRational) -> Value {
    json!({ "num": r.numer().to_string(), "den": r.denom().to_string() })
}

pub fn parse_rational(v: &Value) -> Option<BigRational> {
    let m = v.as_object()?;
    let num: BigInt = m.get("num")?.as_str()?.parse().ok()?;
    let den: BigInt = m.get("den")?.as_str()?.parse().ok()?;
    Some(BigRational::new(num, den))
}

pub fn complex(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn complex_vec(v: &[Complex64]) -> Value {
    Value::Array(v.iter().copied().map(complex).collect())
}

pub fn points(v: &[Vec<Complex64>]) -> Value {
    Value::Array(v.iter().map(|p| complex_vec(p)).collect())
}

/// SHA-256 over the command, its flags and the input contents, each
/// length-prefixed.
#[derive(Default)]
pub struct InputDigest(Sha256);

impl InputDigest {
    pub fn add(&mut self, bytes: &[u8]) {
        self.0.update((bytes.len() as u64).to_le_bytes());
        self.0.update(bytes);
    }

    pub fn finish(self) -> String {
        hex::encode(self.0.finalize())
    }
}
