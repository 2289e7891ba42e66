//! Rendering artifacts as JSON or CSV with a provenance block.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::experiments::Artifact;
use crate::spec::Format;
use crate::units::time_to_us;

pub fn provenance(artifact: &Artifact, wall_time_s: Option<f64>) -> Value {
    let mut p = json!({
        "tool": "nvholo",
        "version": env!("CARGO_PKG_VERSION"),
        "experiment": artifact.experiment.as_str(),
        "seed": artifact.seed,
        "params": artifact.params,
        "units": {
            "energy": "D = 2.87 GHz",
            "time": format!("1/D = {:.6} ns", 1e3 * time_to_us(1.0)),
        },
    });
    if let Some(t) = wall_time_s {
        p["wall_time_s"] = json!(t);
    }
    p
}

pub fn render(artifact: &Artifact, format: Format, wall_time_s: Option<f64>) -> CliResult<String> {
    let prov = provenance(artifact, wall_time_s);
    match format {
        Format::Json => {
            let mut doc = json!({ "provenance": prov, "result": artifact.result });
            if let Some(t) = &artifact.table {
                doc["table"] = serde_json::to_value(t).expect("table serializes");
            }
            let mut s = serde_json::to_string_pretty(&doc).expect("json serializes");
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let table = artifact.table.as_ref().ok_or_else(|| {
                CliError::config(format!(
                    "experiment {} has no tabular output; use json",
                    artifact.experiment
                ))
            })?;
            let mut out = String::new();
            out.push_str(&format!("# provenance: {prov}\n"));
            out.push_str(&format!("# result: {}\n", artifact.result));
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| CliError::Io(format!("csv: {e}"));
            w.write_record(&table.columns).map_err(io)?;
            for row in &table.rows {
                w.serialize(row).map_err(io)?;
            }
            let bytes = w
                .into_inner()
                .map_err(|e| CliError::Io(format!("csv: {e}")))?;
            out.push_str(std::str::from_utf8(&bytes).expect("csv output is utf-8"));
            Ok(out)
        }
    }
}

/// Writes to `target`, or to standard output when it is `-`.
pub fn write_output(target: &str, content: &str) -> CliResult<()> {
    if target == "-" {
        let mut stdout = std::io::stdout().lock();
        stdout
            .write_all(content.as_bytes())
            .and_then(|_| stdout.flush())
            .map_err(|e| CliError::io("stdout", e))
    } else {
        std::fs::write(Path::new(target), content).map_err(|e| CliError::io(target, e))
    }
}

/// Explicit choice, then the output's extension, then the experiment default.
pub fn choose_format(explicit: Option<Format>, target: &str, artifact: &Artifact) -> Format {
    explicit
        .or_else(|| Format::from_path(target))
        .unwrap_or_else(|| artifact.experiment.default_format())
}
