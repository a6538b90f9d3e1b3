//! `pqslab criteria`: deterministic criterion rows over a coupling sweep.

use std::path::Path;

use super::AppError;
use crate::config::{parse_setup, Config};
use crate::output;
use crate::Format;

pub fn run(cfg: &Config, out: Option<&Path>, format: Format) -> Result<(), AppError> {
    let setup = parse_setup(cfg)?;
    let rows = pqslab::run_sweep(&setup.spec)?;
    match format {
        Format::Csv => {
            let mut text = String::new();
            text.push_str(&output::csv_header(&setup.spec.offsets));
            text.push('\n');
            for row in &rows {
                text.push_str(&output::csv_row(row));
                text.push('\n');
            }
            output::emit(out, "criteria.csv", &text)?;
        }
        Format::Json => {
            let json_rows: Vec<output::JsonRow> = rows.iter().map(Into::into).collect();
            let mut text = serde_json::to_string_pretty(&json_rows)?;
            text.push('\n');
            output::emit(out, "criteria.json", &text)?;
        }
    }
    Ok(())
}
