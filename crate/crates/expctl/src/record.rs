use crate::error::CliResult;
use extamen::stats::Estimate;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use std::path::Path;

/// One line of `records.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub experiment: String,
    pub kind: String,
    pub config_hash: String,
    /// Git blob hash (SHA-256 flavour) of the config file bytes.
    pub input_hash: String,
    pub seed: u64,
    pub trajectories: u64,
    /// ChaCha8 streams `0..rng_streams` of `seed` were consumed.
    pub rng_streams: u64,
    pub n: u64,
    pub estimator: String,
    /// `None` when the value is not finite.
    pub estimate: Option<f64>,
    pub stderr: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
}

/// Fills the shared fields of every record of a run.
#[derive(Debug, Clone)]
pub struct RecordSink {
    pub experiment: String,
    pub kind: String,
    pub config_hash: String,
    pub input_hash: String,
    pub seed: u64,
    /// Streams consumed by the Monte Carlo parts of the run.
    pub streams: u64,
    pub records: Vec<ResultRecord>,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl RecordSink {
    pub fn estimate(&mut self, estimator: impl Into<String>, n: usize, trajectories: u64, e: Estimate) {
        self.push(estimator.into(), n, trajectories, self.streams, finite(e.value), e.stderr, None);
    }

    pub fn exact(&mut self, estimator: impl Into<String>, n: usize, value: f64, exact: impl Into<String>) {
        self.push(estimator.into(), n, 0, 0, finite(value), 0.0, Some(exact.into()));
    }

    pub fn value(&mut self, estimator: impl Into<String>, n: usize, trajectories: u64, value: f64, stderr: f64) {
        self.push(
            estimator.into(),
            n,
            trajectories,
            self.streams,
            finite(value),
            if stderr.is_finite() { stderr } else { 0.0 },
            None,
        );
    }

    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        estimator: String,
        n: usize,
        trajectories: u64,
        rng_streams: u64,
        estimate: Option<f64>,
        stderr: f64,
        exact: Option<String>,
    ) {
        self.records.push(ResultRecord {
            experiment: self.experiment.clone(),
            kind: self.kind.clone(),
            config_hash: self.config_hash.clone(),
            input_hash: self.input_hash.clone(),
            seed: self.seed,
            trajectories,
            rng_streams,
            n: n as u64,
            estimator,
            estimate,
            stderr,
            exact,
        });
    }
}

pub fn blob_hash(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    hex::encode(h.finalize())
}

pub fn to_jsonl(records: &[ResultRecord]) -> CliResult<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn append_jsonl(path: &Path, records: &[ResultRecord]) -> CliResult<()> {
    let mut f = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
    f.write_all(to_jsonl(records)?.as_bytes())?;
    Ok(())
}

pub fn read_jsonl(path: &Path) -> CliResult<Vec<ResultRecord>> {
    let f = std::fs::File::open(path)?;
    let mut out = Vec::new();
    for (i, line) in std::io::BufReader::new(f).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line)
                .map_err(|e| crate::error::CliError::Runtime(format!("{}:{}: {e}", path.display(), i + 1)))?,
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blob_hash_of_empty_input() {
        // `git hash-object --object-format=sha256 /dev/null`
        assert_eq!(blob_hash(b""), "473a0f4c3be8a93681a267e3b1e9a7dcda1185436fe141f7749120a303721813");
    }

    #[test]
    fn non_finite_values_become_null() {
        let mut s = RecordSink {
            experiment: "e".into(),
            kind: "k".into(),
            config_hash: "c".into(),
            input_hash: "i".into(),
            seed: 1,
            streams: 10,
            records: Vec::new(),
        };
        s.value("rate", 3, 10, f64::INFINITY, f64::NAN);
        let text = to_jsonl(&s.records).unwrap();
        assert!(text.contains("\"estimate\":null"));
        let back: ResultRecord = serde_json::from_str(text.trim()).unwrap();
        assert_eq!(back, s.records[0]);
    }
}
