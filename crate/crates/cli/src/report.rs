//! JSON artifact envelope: `config`, `results`, `diagnostics`.

use std::path::Path;

use semsec_core::{FeasibilityReport, LogBase};
use serde::Serialize;

use crate::CliError;

#[derive(Serialize)]
pub struct Envelope<C: Serialize, R: Serialize, D: Serialize> {
    pub config: C,
    pub results: R,
    pub diagnostics: D,
}

pub fn render<C: Serialize, R: Serialize, D: Serialize>(
    e: &Envelope<C, R, D>,
) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(e)
        .map_err(|err| CliError::Io(format!("encoding report: {err}")))?;
    text.push('\n');
    Ok(text)
}

/// Writes to `out`, or stdout when no path was given.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// One constraint margin with information quantities converted out of nats.
#[derive(Serialize, Clone)]
pub struct SlackOut {
    pub name: &'static str,
    pub value: f64,
    pub units: &'static str,
}

pub fn convert_slacks(report: &FeasibilityReport, base: LogBase) -> Vec<SlackOut> {
    report
        .slacks
        .iter()
        .map(|s| {
            if s.units == "nats" {
                SlackOut { name: s.name, value: base.from_nats(s.value), units: base.label() }
            } else {
                SlackOut { name: s.name, value: s.value, units: s.units }
            }
        })
        .collect()
}
