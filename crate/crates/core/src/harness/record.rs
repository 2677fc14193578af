use std::io::BufRead;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use super::{ExperimentConfig, HarnessError, Suite};

pub const CODE_VERSION: &str = concat!("bunkbed-core ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Violated,
    Inconclusive,
}

/// Everything needed to re-run one check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    /// Canonical graph-file text, weights included.
    pub graph: String,
    /// Source `x` (flow and resistance suites) or `u` (walk suites).
    pub x: usize,
    /// Sink `y` or `v`.
    pub y: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultRecord {
    pub id: usize,
    pub suite: Suite,
    pub trial: usize,
    /// SHA-256 of `instance.graph`.
    pub digest: String,
    pub instance: Instance,
    pub quantities: Map<String, Value>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub code_version: String,
    pub config: ExperimentConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Summary {
    pub trials: usize,
    pub records: usize,
    pub holds: usize,
    pub violated: usize,
    pub inconclusive: usize,
    /// Ids of violated records; in question searches these are candidate counterexamples.
    pub flagged: Vec<usize>,
    pub budget_exceeded: bool,
}

impl Summary {
    pub fn add(&mut self, r: &ResultRecord) {
        self.records += 1;
        match r.verdict {
            Verdict::Holds => self.holds += 1,
            Verdict::Violated => {
                self.violated += 1;
                self.flagged.push(r.id);
            }
            Verdict::Inconclusive => self.inconclusive += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Line {
    Manifest(Manifest),
    Record(ResultRecord),
    Summary(Summary),
}

impl Line {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("record types always serialize")
    }
}

pub fn digest(graph_text: &str) -> String {
    hex::encode(Sha256::digest(graph_text.as_bytes()))
}

/// A parsed run file. The summary is absent when a run was interrupted.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFile {
    pub manifest: Option<Manifest>,
    pub records: Vec<ResultRecord>,
    pub summary: Option<Summary>,
}

pub fn read_run(reader: impl BufRead) -> Result<RunFile, HarnessError> {
    let mut out = RunFile { manifest: None, records: Vec::new(), summary: None };
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Line = serde_json::from_str(&line).map_err(|e| HarnessError::Parse { line: i + 1, message: e.to_string() })?;
        match parsed {
            Line::Manifest(m) => out.manifest = Some(m),
            Line::Record(r) => out.records.push(r),
            Line::Summary(s) => out.summary = Some(s),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_sha256_hex() {
        assert_eq!(digest(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    #[test]
    fn lines_round_trip() {
        let rec = ResultRecord {
            id: 3,
            suite: Suite::Theorem1,
            trial: 1,
            digest: digest("2 1\n0 1 1\n"),
            instance: Instance { graph: "2 1\n0 1 1\n".into(), x: 0, y: 1, p: None },
            quantities: Map::from_iter([("mf_same".to_string(), Value::from("2"))]),
            verdict: Verdict::Holds,
            runtime_ms: None,
        };
        let text = Line::Record(rec.clone()).to_json();
        assert!(text.starts_with(r#"{"type":"record","id":3"#), "{text}");
        let run = read_run(text.as_bytes()).unwrap();
        assert_eq!(run.records, vec![rec]);
        assert!(matches!(read_run("{\"type\":\"nope\"}".as_bytes()), Err(HarnessError::Parse { line: 1, .. })));
    }
}
