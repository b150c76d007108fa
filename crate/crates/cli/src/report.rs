//! The report document and its JSON, CSV and Markdown renderings.

use serde::Serialize;
use serde_json::{Map, Value};

pub const SCHEMA: &str = "jordan-geom/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Md,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub command: String,
    pub seed: Option<u64>,
    pub model: Option<ModelEcho>,
    pub results: Vec<Entry>,
    pub summary: Summary,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelEcho {
    pub name: String,
    pub params: Vec<Param>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Param {
    pub name: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Angle {
    pub radians: f64,
    pub degrees: f64,
    pub multiplicity: usize,
}

impl Angle {
    pub fn new(radians: f64, multiplicity: usize) -> Self {
        Self {
            radians: sig15(radians),
            degrees: sig15(radians.to_degrees()),
            multiplicity,
        }
    }

    pub fn list(signature: &[(f64, usize)]) -> Vec<Angle> {
        signature.iter().map(|&(a, m)| Angle::new(a, m)).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CjaSampleEntry {
    pub sample: usize,
    pub param: Vec<f64>,
    pub normal: Vec<Angle>,
    pub tangent: Vec<Angle>,
    pub v: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Entry {
    Spectrum {
        class: usize,
        #[serde(flatten)]
        angle: Angle,
    },
    Cja {
        is_cja: bool,
        reference_normal: Vec<Angle>,
        reference_tangent: Vec<Angle>,
        g_n: usize,
        g_t: usize,
        r: usize,
        /// `None` when the class structure changes between samples.
        max_deviation: Option<f64>,
        angle_tol: f64,
        samples: Vec<CjaSampleEntry>,
    },
    Identity {
        identity_id: String,
        sample: usize,
        param: Vec<f64>,
        residual: Option<f64>,
        tolerance: f64,
        pass: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        error: Option<String>,
    },
    Skipped {
        identity_id: String,
        sample: usize,
        param: Vec<f64>,
        reason: String,
    },
}

impl Entry {
    /// `Some(pass)` for graded entries, `None` for skipped ones.
    fn outcome(&self) -> Option<bool> {
        match self {
            Entry::Spectrum { .. } => Some(true),
            Entry::Cja { is_cja, .. } => Some(*is_cja),
            Entry::Identity { pass, .. } => Some(*pass),
            Entry::Skipped { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Summary {
    pub fn tally(results: &[Entry]) -> Self {
        let mut s = Summary::default();
        for e in results {
            match e.outcome() {
                Some(true) => s.passed += 1,
                Some(false) => s.failed += 1,
                None => s.skipped += 1,
            }
        }
        s
    }
}

/// Rounds to 15 significant digits.
pub fn sig15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.render_csv(),
            Format::Md => self.render_md(),
        }
    }

    /// Each result as a flat row: nested values are rendered compactly so
    /// that CSV and Markdown carry the same content as the JSON.
    fn rows(&self) -> (Vec<String>, Vec<Vec<String>>) {
        let value = serde_json::to_value(&self.results).expect("results serialize");
        let mut header: Vec<String> = Vec::new();
        let mut flat: Vec<Map<String, Value>> = Vec::new();
        let mut push = |obj: Map<String, Value>| {
            for k in obj.keys() {
                if !header.contains(k) {
                    header.push(k.clone());
                }
            }
            flat.push(obj);
        };
        for item in value.as_array().into_iter().flatten() {
            let mut obj = item.as_object().cloned().unwrap_or_default();
            // per-sample records become rows of their own
            let children = match obj.remove("samples") {
                Some(Value::Array(items)) => items,
                Some(other) => {
                    obj.insert("samples".into(), other);
                    Vec::new()
                }
                None => Vec::new(),
            };
            let kind = obj.get("kind").and_then(Value::as_str).unwrap_or("entry").to_string();
            push(obj);
            for child in children {
                let mut c = child.as_object().cloned().unwrap_or_default();
                c.insert("kind".into(), Value::String(format!("{kind}_sample")));
                push(c);
            }
        }
        // serde_json maps are sorted; keep "kind" first
        if let Some(i) = header.iter().position(|k| k == "kind") {
            let k = header.remove(i);
            header.insert(0, k);
        }
        let rows = flat
            .iter()
            .map(|obj| header.iter().map(|k| obj.get(k).map(cell).unwrap_or_default()).collect())
            .collect();
        (header, rows)
    }

    fn render_csv(&self) -> String {
        let (header, rows) = self.rows();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&header).expect("in-memory write");
        for r in &rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    fn render_md(&self) -> String {
        let (header, rows) = self.rows();
        let esc = |s: &str| s.replace('|', "\\|");
        let mut out = format!("# {}\n\n", esc(&self.command));
        out.push_str(&format!("- schema: {}\n- tool_version: {}\n", self.schema, self.tool_version));
        if let Some(seed) = self.seed {
            out.push_str(&format!("- seed: {seed}\n"));
        }
        if let Some(m) = &self.model {
            let params: Vec<String> = m.params.iter().map(|p| format!("{}={}", p.name, p.value)).collect();
            let line = format!("- model: {} {}", m.name, params.join(" "));
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out.push('\n');
        if !header.is_empty() {
            out.push_str(&format!("| {} |\n", header.join(" | ")));
            out.push_str(&format!("|{}\n", " --- |".repeat(header.len())));
            for r in &rows {
                let cells: Vec<String> = r.iter().map(|c| esc(c)).collect();
                out.push_str(&format!("| {} |\n", cells.join(" | ")));
            }
            out.push('\n');
        }
        let s = &self.summary;
        out.push_str(&format!(
            "passed: {}, failed: {}, skipped: {}\n",
            s.passed, s.failed, s.skipped
        ));
        for n in &s.notes {
            out.push_str(&format!("\n{n}\n"));
        }
        out
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(inline).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::Object(m) => m
            .iter()
            .map(|(k, x)| format!("{k}={}", inline(x)))
            .collect::<Vec<_>>()
            .join(" "),
        Value::Array(items) => format!("[{}]", items.iter().map(inline).collect::<Vec<_>>().join(",")),
        Value::Null => "null".into(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
