use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::io::{MatrixJson, Num, RealizationJson, SymbolJson};

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
pub struct ResidualRow {
    pub label: String,
    pub value: Num,
    pub limit: Num,
    pub ok: bool,
}

impl ResidualRow {
    pub fn new(label: impl Into<String>, value: f64, limit: f64) -> Self {
        ResidualRow {
            label: label.into(),
            value: Num(value),
            limit: Num(limit),
            ok: value <= limit,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct Certificate {
    pub value: Num,
    pub previous: Num,
    pub degree: usize,
    pub gap: Num,
    pub stable: bool,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct EntropyCheck {
    pub degree: usize,
    pub value: Num,
    pub gap: Num,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct Radius {
    pub estimate: Num,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
pub struct RunReport {
    pub command: String,
    pub variant: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub route: Option<String>,
    pub input_digest: String,
    pub seed: u64,
    pub degree: usize,
    pub tolerance: Num,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub feasible: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strict: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_min: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_inf: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entropy: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<MatrixJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entropy_check: Option<EntropyCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monotonicity_gap: Option<Num>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub residuals: Vec<ResidualRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm_certificate: Option<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<Radius>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<Num>,
}

/// Contents of a `--out` file.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct ResultFile {
    pub format: String,
    pub report: RunReport,
    pub interpolant: SymbolJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub realization: Option<RealizationJson>,
}

pub const RESULT_FORMAT: &str = "ncpick-result/1";

pub fn to_json(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

/// `key: value` lines, nested keys joined with dots.
pub fn to_text(report: &RunReport) -> String {
    let value: Value = serde_json::from_str(&to_json(report)).expect("report round-trips");
    let mut out = String::new();
    flatten("", &value, &mut out);
    out
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, x, out);
            }
        }
        Value::Array(items) if items.iter().all(|x| x.is_object()) && !items.is_empty() => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::String(s) => out.push_str(&format!("{prefix}: {s}\n")),
        other => out.push_str(&format!("{prefix}: {other}\n")),
    }
}
