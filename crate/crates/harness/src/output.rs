//! Deterministic JSONL and CSV writers.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use tfactor::{Error, Result};

use crate::robustness::RobustnessResult;
use crate::sweep::SweepResult;

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// One compact JSON object per line, in the given order.
pub fn write_jsonl<T: Serialize, W: Write>(rows: &[T], mut out: W) -> Result<()> {
    for r in rows {
        serde_json::to_writer(&mut out, r).map_err(|e| Error::Io(std::io::Error::other(e)))?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    s
}

/// Curve summary: one row per `(n, p)`.
pub fn write_sweep_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "n",
        "p",
        "reference_p",
        "successes",
        "trials",
        "frequency",
        "ci_low",
        "ci_high",
        "p_half",
    ])
    .map_err(csv_err)?;
    for s in &result.curve.sizes {
        for pt in &s.points {
            w.write_record([
                s.n.to_string(),
                pt.p.to_string(),
                s.reference_p.to_string(),
                pt.successes.to_string(),
                pt.trials.to_string(),
                pt.frequency.to_string(),
                pt.interval.low.to_string(),
                pt.interval.high.to_string(),
                s.p_half.map(|x| x.to_string()).unwrap_or_default(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_robustness_csv<W: Write>(result: &RobustnessResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "n",
        "p",
        "successes",
        "trials",
        "success_rate",
        "ci_low",
        "ci_high",
        "mean_cluster_attempts",
        "worst_spread_ratio",
    ])
    .map_err(csv_err)?;
    for pt in &result.points {
        w.write_record([
            pt.n.to_string(),
            pt.p.to_string(),
            pt.successes.to_string(),
            pt.trials.to_string(),
            pt.success_rate.to_string(),
            pt.interval.low.to_string(),
            pt.interval.high.to_string(),
            pt.mean_cluster_attempts.to_string(),
            pt.vertex_spread
                .as_ref()
                .map(|v| v.worst_ratio.to_string())
                .unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `trials.jsonl`, `summary.csv` and `curve.json` under `dir`.
pub fn save_sweep(result: &SweepResult, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_jsonl(
        &result.trials,
        std::io::BufWriter::new(std::fs::File::create(dir.join("trials.jsonl"))?),
    )?;
    write_sweep_csv(result, std::fs::File::create(dir.join("summary.csv"))?)?;
    std::fs::write(dir.join("curve.json"), to_pretty_json(&result.curve))?;
    Ok(())
}

/// Writes `trials.jsonl`, `summary.csv` and `points.json` under `dir`.
pub fn save_robustness(result: &RobustnessResult, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_jsonl(
        &result.records,
        std::io::BufWriter::new(std::fs::File::create(dir.join("trials.jsonl"))?),
    )?;
    write_robustness_csv(result, std::fs::File::create(dir.join("summary.csv"))?)?;
    std::fs::write(dir.join("points.json"), to_pretty_json(&result.points))?;
    Ok(())
}
