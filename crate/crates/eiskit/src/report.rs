//! Run manifests and deterministic report emission.
//!
//! Every command of the driver embeds a [`RunManifest`] in its output;
//! re-running a manifest reproduces the mathematical payload byte for byte
//! (timings excluded). Reports serialize to JSON, CSV, or markdown.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::time::Duration;

/// Description of one reproducible run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    /// Command name plus flags, in invocation order.
    pub command: Vec<String>,
    /// Canonical JSON of the mathematical inputs.
    pub inputs: serde_json::Value,
    /// Output file paths written by the run.
    pub outputs: Vec<String>,
    /// Per-stage wall-clock timings in milliseconds (not reproducible).
    pub timings_ms: Vec<(String, u64)>,
    /// Crate version.
    pub version: String,
    /// SHA-256 of the canonical input serialization.
    pub config_hash: String,
}

impl RunManifest {
    pub fn new(command: Vec<String>, inputs: serde_json::Value) -> RunManifest {
        let canonical = serde_json::to_string(&inputs).unwrap_or_default();
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        let config_hash = format!("{:x}", hasher.finalize());
        RunManifest {
            command,
            inputs,
            outputs: Vec::new(),
            timings_ms: Vec::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash,
        }
    }

    pub fn record_timing(&mut self, stage: &str, d: Duration) {
        self.timings_ms.push((stage.to_string(), d.as_millis() as u64));
    }
}

/// One verified identity instance inside a battery.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IdentityRecord {
    pub name: String,
    pub pass: bool,
    /// Exact residual, serialized; empty for a clean pass.
    pub residual: String,
}

/// Result of one acceptance criterion.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u32,
    pub name: String,
    pub pass: bool,
    pub instances: usize,
    pub failures: Vec<IdentityRecord>,
    pub elapsed_ms: u64,
    pub detail: String,
}

impl CriterionReport {
    pub fn summary_line(&self) -> String {
        format!(
            "[{}] criterion {:2}: {} ({} instances, {} ms){}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.instances,
            self.elapsed_ms,
            if self.detail.is_empty() { String::new() } else { format!(" - {}", self.detail) }
        )
    }
}

/// A full report: manifest plus criterion results.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub manifest: RunManifest,
    pub criteria: Vec<CriterionReport>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.criteria.iter().all(|c| c.pass)
    }
}

/// Output format for [`emit_table`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
    Markdown,
}

impl std::str::FromStr for TableFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            "markdown" | "md" => Ok(TableFormat::Markdown),
            other => Err(format!("unknown format {other}")),
        }
    }
}

/// Render a rectangular table deterministically.
pub fn emit_table(headers: &[&str], rows: &[Vec<String>], format: TableFormat) -> String {
    match format {
        TableFormat::Csv => {
            let mut out = String::new();
            let _ = writeln!(out, "{}", headers.join(","));
            for row in rows {
                let quoted: Vec<String> = row
                    .iter()
                    .map(|c| {
                        if c.contains(',') || c.contains('"') {
                            format!("\"{}\"", c.replace('"', "\"\""))
                        } else {
                            c.clone()
                        }
                    })
                    .collect();
                let _ = writeln!(out, "{}", quoted.join(","));
            }
            out
        }
        TableFormat::Json => {
            let objs: Vec<serde_json::Value> = rows
                .iter()
                .map(|row| {
                    let mut map = serde_json::Map::new();
                    for (h, c) in headers.iter().zip(row) {
                        map.insert(h.to_string(), serde_json::Value::String(c.clone()));
                    }
                    serde_json::Value::Object(map)
                })
                .collect();
            serde_json::to_string_pretty(&objs).unwrap()
        }
        TableFormat::Markdown => {
            let mut out = String::new();
            let _ = writeln!(out, "| {} |", headers.join(" | "));
            let _ = writeln!(
                out,
                "|{}|",
                headers.iter().map(|_| " --- ").collect::<Vec<_>>().join("|")
            );
            for row in rows {
                let _ = writeln!(out, "| {} |", row.join(" | "));
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_hash_deterministic() {
        let a = RunManifest::new(vec!["x".into()], serde_json::json!({"p": 5, "m": 6}));
        let b = RunManifest::new(vec!["y".into()], serde_json::json!({"p": 5, "m": 6}));
        assert_eq!(a.config_hash, b.config_hash);
        let c = RunManifest::new(vec!["x".into()], serde_json::json!({"p": 7, "m": 6}));
        assert_ne!(a.config_hash, c.config_hash);
    }

    #[test]
    fn table_formats() {
        let rows = vec![vec!["oo".to_string(), "1/2".to_string(), "yes".to_string()]];
        let csv = emit_table(&["cusp", "value", "equal"], &rows, TableFormat::Csv);
        assert!(csv.starts_with("cusp,value,equal\noo,1/2,yes"));
        let md = emit_table(&["cusp", "value", "equal"], &rows, TableFormat::Markdown);
        assert!(md.contains("| oo | 1/2 | yes |"));
        let json = emit_table(&["cusp", "value", "equal"], &rows, TableFormat::Json);
        assert!(json.contains("\"cusp\": \"oo\""));
    }
}
