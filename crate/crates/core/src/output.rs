//! Result files: per-run metrics, per-round traces and the batch summary.
//!
//! Numbers are written with Rust's shortest round-trip formatting, which is
//! locale-independent and always uses `.` as the decimal separator. Every
//! row ends with `\n`.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::{AggregateStats, BatchResult, RoundRecord, RunMetrics, Summary};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "jsonl" | "json-lines" => Ok(Format::Jsonl),
            other => Err(format!("unknown format `{other}` (expected csv or jsonl)")),
        }
    }
}

pub const RUNS_HEADER: [&str; 8] = [
    "seed",
    "convergence_round",
    "audits_to_convergence",
    "incorrect_before",
    "incorrect_after",
    "empty_after",
    "violated",
    "not_converged",
];

/// On-disk shape of one [`RunMetrics`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
struct RunRow {
    seed: u64,
    convergence_round: Option<u64>,
    audits_to_convergence: u64,
    incorrect_before: u64,
    incorrect_after: u64,
    empty_after: u64,
    violated: bool,
    not_converged: bool,
}

impl From<&RunMetrics> for RunRow {
    fn from(m: &RunMetrics) -> Self {
        Self {
            seed: m.seed,
            convergence_round: m.convergence_round,
            audits_to_convergence: m.audits_to_convergence,
            incorrect_before: m.incorrect_before_convergence,
            incorrect_after: m.incorrect_after_convergence,
            empty_after: m.empty_rounds_after_convergence,
            violated: m.eventual_correctness_violated,
            not_converged: m.not_converged(),
        }
    }
}

impl TryFrom<RunRow> for RunMetrics {
    type Error = Error;

    fn try_from(r: RunRow) -> Result<Self> {
        if r.not_converged != r.convergence_round.is_none() {
            return Err(Error::Malformed(format!(
                "seed {}: not_converged disagrees with convergence_round",
                r.seed
            )));
        }
        Ok(RunMetrics {
            seed: r.seed,
            convergence_round: r.convergence_round,
            audits_to_convergence: r.audits_to_convergence,
            incorrect_before_convergence: r.incorrect_before,
            incorrect_after_convergence: r.incorrect_after,
            empty_rounds_after_convergence: r.empty_after,
            eventual_correctness_violated: r.violated,
        })
    }
}

pub fn write_runs<W: Write>(out: W, runs: &[RunMetrics], format: Format) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(out);
            for m in runs {
                w.serialize(RunRow::from(m))?;
            }
            if runs.is_empty() {
                w.write_record(RUNS_HEADER)?;
            }
            w.flush()?;
        }
        Format::Jsonl => {
            let mut w = BufWriter::new(out);
            for m in runs {
                serde_json::to_writer(&mut w, &RunRow::from(m))?;
                w.write_all(b"\n")?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

pub fn read_runs<R: Read>(input: R, format: Format) -> Result<Vec<RunMetrics>> {
    match format {
        Format::Csv => {
            let mut rdr = csv::Reader::from_reader(input);
            let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
            if header != RUNS_HEADER {
                return Err(Error::Malformed(format!("unexpected header {header:?}")));
            }
            rdr.deserialize::<RunRow>()
                .map(|row| RunMetrics::try_from(row?))
                .collect()
        }
        Format::Jsonl => BufReader::new(input)
            .lines()
            .filter(|l| l.as_ref().map_or(true, |s| !s.trim().is_empty()))
            .map(|line| {
                let row: RunRow = serde_json::from_str(&line?)?;
                RunMetrics::try_from(row)
            })
            .collect(),
    }
}

/// Trace header for `select_n` selected workers per round.
pub fn trace_header(select_n: usize) -> Vec<String> {
    let mut h: Vec<String> = [
        "round_index",
        "audit_prob",
        "audited",
        "accepted_value",
        "num_replies",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for k in 0..select_n {
        for col in ["id", "type", "cheat_prob", "rho_rs", "rho_tr"] {
            h.push(format!("w{k}_{col}"));
        }
    }
    h
}

/// CSV traces have one column group per selected slot, so `select_n` fixes
/// the header. `audit_prob` is the value after the round's update.
pub fn write_trace<W: Write>(
    out: W,
    records: &[RoundRecord],
    select_n: usize,
    format: Format,
) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(out);
            w.write_record(trace_header(select_n))?;
            for r in records {
                let mut row = vec![
                    r.round_index.to_string(),
                    r.audit_prob_after().to_string(),
                    r.outcome.audited.to_string(),
                    r.outcome.accepted.as_str().to_string(),
                    r.outcome.replies.len().to_string(),
                ];
                for s in &r.snapshots {
                    row.push(s.worker_id.to_string());
                    row.push(s.worker_type.to_string());
                    row.push(s.cheat_prob.to_string());
                    row.push(s.rho_rs.to_string());
                    row.push(s.rho_tr.to_string());
                }
                w.write_record(&row)?;
            }
            w.flush()?;
        }
        Format::Jsonl => {
            let mut w = BufWriter::new(out);
            for r in records {
                serde_json::to_writer(&mut w, r)?;
                w.write_all(b"\n")?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

pub fn runs_file_name(format: Format) -> String {
    format!("runs.{}", format.extension())
}

pub fn trace_file_name(seed: u64, format: Format) -> String {
    format!("trace-{seed}.{}", format.extension())
}

/// Writes `runs.<ext>`, `summary.json` and, when the batch kept traces,
/// one `trace-<seed>.<ext>` per run into `dir` (created if missing).
pub fn emit_results(
    dir: &Path,
    batch: &BatchResult,
    select_n: usize,
    format: Format,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let runs_path = dir.join(runs_file_name(format));
    write_runs(File::create(&runs_path)?, &batch.runs, format)?;
    written.push(runs_path);

    let summary_path = dir.join("summary.json");
    let mut f = BufWriter::new(File::create(&summary_path)?);
    serde_json::to_writer_pretty(&mut f, &batch.stats)?;
    f.write_all(b"\n")?;
    f.flush()?;
    written.push(summary_path);

    for (m, trace) in batch.runs.iter().zip(&batch.traces) {
        let p = dir.join(trace_file_name(m.seed, format));
        write_trace(File::create(&p)?, trace, select_n, format)?;
        written.push(p);
    }
    Ok(written)
}

fn cell(s: Option<Summary>, f: fn(&Summary) -> f64) -> String {
    s.map_or_else(|| "-".to_string(), |s| format!("{}", f(&s)))
}

/// Plain-text table of median and IQR per metric.
pub fn format_summary(stats: &AggregateStats) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "runs: {}  converged: {}  not converged: {}  violating after convergence: {}",
        stats.instantiations, stats.converged, stats.not_converged, stats.violating_runs
    );
    let _ = writeln!(
        out,
        "{:<24} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "metric", "median", "q1", "q3", "iqr", "mean"
    );
    for (name, s) in [
        ("rounds", stats.rounds),
        ("audits", stats.audits),
        ("incorrect_before", stats.incorrect_before),
        ("incorrect_after", stats.incorrect_after),
        ("empty_after", stats.empty_after),
    ] {
        let _ = writeln!(
            out,
            "{:<24} {:>10} {:>10} {:>10} {:>10} {:>10}",
            name,
            cell(s, |s| s.median),
            cell(s, |s| s.q1),
            cell(s, |s| s.q3),
            cell(s, Summary::iqr),
            cell(s, |s| (s.mean * 1000.0).round() / 1000.0),
        );
    }
    out
}
