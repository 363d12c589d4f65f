//! Report emission: RFC-4180 CSV on standard output, and an optional JSON
//! report file carrying the resolved config, version, and timing.
//!
//! Result payloads are deterministic for a fixed seed; wall-clock timing
//! lives only in the JSON wrapper's `timing_ms` field, outside the payload.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde_json::{json, Value};

use crate::errors::CliResult;

/// Schema version for CSV headers and JSON keys.
pub const SCHEMA_VERSION: &str = env!("CARGO_PKG_VERSION");

fn csv_field(raw: &str) -> String {
    if raw.contains(',') || raw.contains('"') || raw.contains('\n') || raw.contains('\r') {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_string()
    }
}

pub fn csv_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(
        &headers
            .iter()
            .map(|h| csv_field(h))
            .collect::<Vec<_>>()
            .join(","),
    );
    out.push_str("\r\n");
    for row in rows {
        debug_assert_eq!(row.len(), headers.len());
        out.push_str(
            &row.iter()
                .map(|f| csv_field(f))
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push_str("\r\n");
    }
    out
}

/// Shortest-round-trip float formatting (stable across runs and platforms).
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

pub fn print_stdout(text: &str) -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

/// Write the JSON report file: version, command path, resolved config echo,
/// wall-clock milliseconds, and the result payload.
pub fn write_report(
    path: &Path,
    command: &str,
    config: Value,
    result: Value,
    started: Instant,
) -> CliResult<()> {
    let report = json!({
        "version": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "timing_ms": started.elapsed().as_millis() as u64,
        "result": result,
    });
    let mut text =
        serde_json::to_string_pretty(&report).expect("reports are built from serializable values");
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
