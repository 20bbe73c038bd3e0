//! Trace CSV and report JSON writers.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use fixlab_core::IterationTrace;

use crate::runner::{Outcome, RunReport};

/// `n,x0,...,x{d-1},p_gap` with `p_gap = p(x_n, x_(n+1))`, empty on the last row.
pub fn trace_csv(trace: &IterationTrace) -> String {
    let dim = trace.space().dimension();
    let mut out = String::from("n");
    for i in 0..dim {
        let _ = write!(out, ",x{}", i);
    }
    out.push_str(",p_gap\n");
    let gaps = trace.consecutive_gaps();
    for n in 0..trace.len() {
        let _ = write!(out, "{}", n);
        for c in trace.coords(n) {
            let _ = write!(out, ",{}", c);
        }
        match gaps.get(n) {
            Some(g) => {
                let _ = writeln!(out, ",{}", g);
            }
            None => out.push_str(",\n"),
        }
    }
    out
}

/// Pretty JSON with a trailing newline; field order is fixed by the types.
pub fn report_json(report: &RunReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report).context("serializing report")?;
    s.push('\n');
    Ok(s)
}

/// Writes `report.json` and `trace_<name>.csv` files into `dir/<scenario>/`.
pub fn write_outcome(outcome: &Outcome, dir: &Path) -> Result<PathBuf> {
    let target = dir.join(&outcome.report.scenario);
    fs::create_dir_all(&target).with_context(|| format!("creating {}", target.display()))?;
    for (name, trace) in &outcome.traces {
        let path = target.join(format!("trace_{}.csv", name));
        fs::write(&path, trace_csv(trace)).with_context(|| format!("writing {}", path.display()))?;
    }
    let path = target.join("report.json");
    fs::write(&path, report_json(&outcome.report)?).with_context(|| format!("writing {}", path.display()))?;
    Ok(target)
}
