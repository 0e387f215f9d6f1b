//! Run reports and their text / machine renderings.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tulczyjew_core::report::{Check, Report};

use crate::problem::TaskName;

pub const REPORT_SCHEMA: &str = "tulczyjew-report/1";

/// Sign and normalization choices the engine is built on. Their hash goes into every
/// machine report so that reports from incompatible builds are told apart.
pub const CONVENTIONS: &[&str] = &[
    "left derivatives: move the variable to the front, then delete it",
    "canonical brackets normalized by {p, q} = 1 on every conjugate pair",
    "epsilon = 0 on T*(PiE*) and T*(PiE), epsilon = 1 on PiT*(E*) and PiT*(PiE)",
    "section bracket [s_a, s_b] = (-1)^b Q_ab^c s_c",
    "structure functions completed by Q_ab = (-1)^{(a+1)(b+1)} Q_ba",
    "jacobiator shuffles signed by Lie parity (parity + epsilon), empty and full blocks included",
    "Q_S = {S, .} on (x, e); Q_P = -[[P, .]] on (x, eta)",
    "interior product i_X = X(x, d/dxi) without parity prefactor",
    "L_X = [d, i_X]; Delta_P = L_P",
    "hbar deformation eta -> hbar*eta, hbar even central weight 0",
    "total symbol: principal part of L_X per eta-degree component",
    "operator equality on monomials with base degree <= K and xi degree <= max(fiber dim, order)",
];

pub fn convention_hash() -> String {
    let mut h = Sha256::new();
    for c in CONVENTIONS {
        h.update(c.as_bytes());
        h.update(b"\n");
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub holds: bool,
    pub residual: Option<String>,
    pub residual_terms: usize,
    pub detail: Option<String>,
}

impl From<&Check> for CheckRecord {
    fn from(c: &Check) -> Self {
        CheckRecord {
            name: c.name.clone(),
            holds: c.holds,
            residual: c.residual.clone(),
            residual_terms: c.residual_terms,
            detail: c.detail.clone().filter(|d| !d.is_empty()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueRecord {
    pub label: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolvedParams {
    pub samples: usize,
    pub degree: u32,
    pub arity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub task: TaskName,
    pub line: usize,
    pub params: ResolvedParams,
    pub passed: bool,
    pub checks: Vec<CheckRecord>,
    pub values: Vec<ValueRecord>,
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl TaskRecord {
    pub fn new(task: TaskName, line: usize, params: ResolvedParams) -> Self {
        TaskRecord {
            task,
            line,
            params,
            passed: true,
            checks: Vec::new(),
            values: Vec::new(),
            notes: Vec::new(),
            elapsed_ms: None,
        }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push((&c).into());
    }

    pub fn absorb(&mut self, prefix: &str, r: &Report) {
        for c in &r.checks {
            let mut rec = CheckRecord::from(c);
            if !prefix.is_empty() {
                rec.name = format!("{prefix}: {}", rec.name);
            }
            self.checks.push(rec);
        }
        for n in &r.notes {
            if !self.notes.contains(n) {
                self.notes.push(n.clone());
            }
        }
    }

    pub fn value(&mut self, label: impl Into<String>, value: impl ToString) {
        self.values.push(ValueRecord {
            label: label.into(),
            value: value.to_string(),
        });
    }

    pub fn finish(&mut self) {
        self.passed = self.checks.iter().all(|c| c.holds);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: String,
    pub convention_hash: String,
    pub problem_sha256: String,
    pub seed: u64,
    pub passed: bool,
    pub tasks: Vec<TaskRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Machine,
}

pub fn render(r: &RunReport, format: Format) -> String {
    match format {
        Format::Machine => {
            let mut s = serde_json::to_string_pretty(r).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => render_text(r),
    }
}

pub fn parse_machine(text: &str) -> Result<RunReport, serde_json::Error> {
    serde_json::from_str(text)
}

fn render_text(r: &RunReport) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "seed {}  conventions {}",
        r.seed,
        &r.convention_hash[..12]
    );
    for t in &r.tasks {
        let mark = if t.passed { '✓' } else { '✗' };
        let _ = write!(out, "{mark} {} (line {})", t.task, t.line);
        if let Some(ms) = t.elapsed_ms {
            let _ = write!(out, "  {ms} ms");
        }
        out.push('\n');
        for c in &t.checks {
            let mark = if c.holds { '✓' } else { '✗' };
            let _ = write!(out, "    {mark} {}", c.name);
            if !c.holds {
                let _ = write!(out, "  [{} residual terms]", c.residual_terms);
                if let Some(res) = &c.residual {
                    let _ = write!(out, "  {res}");
                }
            }
            if let Some(d) = &c.detail {
                let _ = write!(out, "  ({d})");
            }
            out.push('\n');
        }
        for v in &t.values {
            let _ = writeln!(out, "    {} = {}", v.label, v.value);
        }
        for n in &t.notes {
            let _ = writeln!(out, "    note: {n}");
        }
    }
    let _ = writeln!(out, "{}", if r.passed { "PASS" } else { "FAIL" });
    out
}
