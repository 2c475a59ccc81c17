use std::fs;
use std::io::Write;

use serde::Serialize;

use crate::input::CliError;
use crate::{Format, OutputArgs};

/// Prints the report in the chosen format and writes its JSON to `--output`.
pub fn emit<T: Serialize>(
    out: &OutputArgs,
    report: &T,
    text: impl FnOnce() -> String,
) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(report).expect("reports serialize");
    if let Some(path) = &out.output {
        fs::write(path, format!("{json}\n")).map_err(|source| CliError::Write {
            path: path.display().to_string(),
            source,
        })?;
    }
    let body = match out.format {
        Format::Json => json,
        Format::Text => text(),
    };
    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(stdout, "{}", body.trim_end());
    Ok(())
}
