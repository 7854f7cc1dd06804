//! `results.json`, `results.csv` and `plot_data.tsv`. No timestamps or host
//! details, so identical runs give identical files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde_json::json;

use crate::config::Experiment;
use crate::pipeline::{Outcome, Row};
use crate::CliError;

fn io(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn write_all(dir: &Path, exp: &Experiment, outcome: &Outcome) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let spec = exp.circuit.spec()?;
    let doc = json!({
        "pipeline": exp.pipeline,
        "config": exp,
        "circuit_spec": spec,
        "results": outcome.results,
    });
    let path = dir.join("results.json");
    let text = serde_json::to_string_pretty(&doc).map_err(|e| io(&path, e))?;
    fs::write(&path, text + "\n").map_err(|e| io(&path, e))?;

    let path = dir.join("results.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| io(&path, e))?;
    if outcome.rows.is_empty() {
        w.write_record(["series", "temperature_ghz", "m", "coupling_ff", "estimate", "std_error", "exact_reference"])
            .map_err(|e| io(&path, e))?;
    }
    for row in &outcome.rows {
        w.serialize(row).map_err(|e| io(&path, e))?;
    }
    w.flush().map_err(|e| io(&path, e))?;

    if !outcome.rows.is_empty() {
        let path = dir.join("plot_data.tsv");
        fs::write(&path, plot_data(&outcome.rows)).map_err(|e| io(&path, e))?;
    }
    Ok(())
}

/// One block per series, separated by two blank lines (gnuplot `index`).
/// Columns: x (Trotter number or coupling capacitance), estimate, error,
/// reference.
pub fn plot_data(rows: &[Row]) -> String {
    let mut blocks: BTreeMap<&str, Vec<&Row>> = BTreeMap::new();
    for r in rows {
        blocks.entry(&r.series).or_default().push(r);
    }
    let opt = |v: Option<f64>| v.map_or("nan".to_string(), |v| format!("{v}"));
    let mut out = String::new();
    for (i, (series, rows)) in blocks.into_iter().enumerate() {
        if i > 0 {
            out.push_str("\n\n");
        }
        let x_name = if rows[0].m.is_some() { "m" } else { "coupling_ff" };
        let _ = writeln!(out, "# {series}");
        let _ = writeln!(out, "# {x_name}\testimate\tstd_error\texact_reference");
        for r in rows {
            let x = r.m.map(|m| m as f64).or(r.coupling_ff).unwrap_or(f64::NAN);
            let _ = writeln!(out, "{x}\t{}\t{}\t{}", r.estimate, opt(r.std_error), opt(r.exact_reference));
        }
    }
    out
}
