//! Summaries and plot data from a records file.

use crate::error::{CliError, CliResult};
use crate::record::{read_jsonl, ResultRecord};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub text: String,
    /// `(file name, x,y,yerr CSV)` per experiment and estimator.
    pub csvs: Vec<(String, String)>,
}

fn fmt_est(r: &ResultRecord) -> String {
    let v = r.estimate.map_or_else(|| "inf".to_string(), |v| format!("{v:.6}"));
    match &r.exact {
        Some(e) => format!("{v} (exact {e})"),
        None if r.stderr > 0.0 => format!("{v} ± {:.6}", r.stderr),
        None => v,
    }
}

/// Groups records by experiment; one experiment id must carry one config hash.
pub fn summarize(records: &[ResultRecord]) -> CliResult<Summary> {
    let mut groups: BTreeMap<&str, Vec<&ResultRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(&r.experiment).or_default().push(r);
    }
    let mut out = Summary::default();
    for (id, recs) in &groups {
        let first = recs[0];
        if let Some(bad) = recs.iter().find(|r| r.config_hash != first.config_hash || r.kind != first.kind) {
            return Err(CliError::config(format!(
                "experiment {id:?} mixes incompatible records (config {} vs {})",
                &first.config_hash[..12.min(first.config_hash.len())],
                &bad.config_hash[..12.min(bad.config_hash.len())]
            )));
        }
        // later duplicates of the same (estimator, n) replace earlier ones
        let mut table: BTreeMap<(&str, u64), &ResultRecord> = BTreeMap::new();
        for r in recs {
            table.insert((&r.estimator, r.n), r);
        }
        let _ = writeln!(
            out.text,
            "== {id} [{}] seed {} config {}",
            first.kind,
            first.seed,
            &first.config_hash[..12.min(first.config_hash.len())]
        );
        match first.kind.as_str() {
            "recurrence" => recurrence_table(&mut out.text, &table),
            "complexity" => complexity_table(&mut out.text, &table),
            _ => {}
        }
        for ((est, n), r) in &table {
            let _ = writeln!(out.text, "  {est:<34} n={n:<8} {}  [trajectories {}]", fmt_est(r), r.trajectories);
        }
        let mut by_est: BTreeMap<&str, String> = BTreeMap::new();
        for ((est, n), r) in &table {
            let csv = by_est.entry(est).or_insert_with(|| "x,y,yerr\n".to_string());
            let y = r.estimate.map_or_else(|| "inf".to_string(), |v| v.to_string());
            let _ = writeln!(csv, "{n},{y},{}", r.stderr);
        }
        for (est, csv) in by_est {
            out.csvs.push((format!("{id}__{est}.csv"), csv));
        }
    }
    Ok(out)
}

fn recurrence_table(out: &mut String, table: &BTreeMap<(&str, u64), &ResultRecord>) {
    let _ = writeln!(out, "  {:<10} {:<28} {:<28} {:<28}", "n", "E|O_n|/n", "late slope", "no return by n");
    let ns: Vec<u64> = table.keys().filter(|k| k.0 == "size_over_n").map(|k| k.1).collect();
    for n in ns {
        let cell = |e: &str| table.get(&(e, n)).map_or_else(|| "-".to_string(), |r| fmt_est(r));
        let _ = writeln!(out, "  {n:<10} {:<28} {:<28} {:<28}", cell("size_over_n"), cell("slope"), cell("censored"));
    }
}

fn complexity_table(out: &mut String, table: &BTreeMap<(&str, u64), &ResultRecord>) {
    let get = |e: &str| table.iter().find(|(k, _)| k.0 == e).map(|(_, r)| *r);
    if let (Some(b), Some(lo), Some(hi)) = (get("exponent"), get("exponent_band_lo"), get("exponent_band_hi")) {
        let _ = writeln!(
            out,
            "  fitted exponent {}  95% band [{:.4}, {:.4}]",
            fmt_est(b),
            lo.estimate.unwrap_or(f64::NAN),
            hi.estimate.unwrap_or(f64::NAN)
        );
    }
}

/// Reads `dir/records.jsonl`, writes `dir/report/*.csv` and returns the summary.
pub fn report_dir(dir: &Path) -> CliResult<Summary> {
    let path = dir.join("records.jsonl");
    if !path.exists() {
        return Err(CliError::Runtime(format!("no records at {}", path.display())));
    }
    let records = read_jsonl(&path)?;
    let summary = summarize(&records)?;
    if !summary.csvs.is_empty() {
        let rdir = dir.join("report");
        std::fs::create_dir_all(&rdir)?;
        for (name, csv) in &summary.csvs {
            std::fs::write(rdir.join(name), csv)?;
        }
    }
    Ok(summary)
}
