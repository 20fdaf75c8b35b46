//! Structured experiment reports: configuration echo, per-trial rows,
//! aggregate statistics, bound values with their formula identifiers, and
//! verdicts derived from the recorded data.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundLine {
    /// Identifier of the formula this bound was computed from.
    pub id: String,
    pub formula: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerdictLine {
    pub criterion: String,
    pub verdict: Verdict,
    pub details: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub config: Value,
    pub seed: Option<u64>,
    pub trials: Vec<Map<String, Value>>,
    pub stats: Map<String, Value>,
    pub bounds: Vec<BoundLine>,
    pub verdicts: Vec<VerdictLine>,
}

impl ExperimentReport {
    pub fn new(name: impl Into<String>, config: Value, seed: Option<u64>) -> Self {
        ExperimentReport {
            name: name.into(),
            config,
            seed,
            trials: Vec::new(),
            stats: Map::new(),
            bounds: Vec::new(),
            verdicts: Vec::new(),
        }
    }

    pub fn push_bound(&mut self, id: &str, formula: &str, value: f64) {
        self.bounds.push(BoundLine {
            id: id.to_string(),
            formula: formula.to_string(),
            value,
        });
    }

    pub fn push_verdict(&mut self, criterion: &str, verdict: Verdict, details: impl Into<String>) {
        self.verdicts.push(VerdictLine {
            criterion: criterion.to_string(),
            verdict,
            details: details.into(),
        });
    }

    pub fn stat(&mut self, key: &str, value: Value) {
        self.stats.insert(key.to_string(), value);
    }

    pub fn any_fail(&self) -> bool {
        self.verdicts.iter().any(|v| v.verdict == Verdict::Fail)
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.verdict == Verdict::Pass)
    }

    /// Flatten the trial rows to CSV. Columns are the union of keys in
    /// sorted order, preceded by the schema version and the trial index, so
    /// the layout is stable across runs.
    pub fn trials_csv(&self) -> String {
        let mut columns: Vec<String> = Vec::new();
        for t in &self.trials {
            for k in t.keys() {
                if !columns.iter().any(|c| c == k) {
                    columns.push(k.clone());
                }
            }
        }
        columns.sort();
        let mut out = String::new();
        out.push_str("schema_version,trial");
        for c in &columns {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (i, t) in self.trials.iter().enumerate() {
            out.push_str(&format!("1,{i}"));
            for c in &columns {
                out.push(',');
                match t.get(c) {
                    Some(Value::String(s)) => out.push_str(&s.replace(',', ";")),
                    Some(v) => out.push_str(&v.to_string()),
                    None => {}
                }
            }
            out.push('\n');
        }
        out
    }
}
