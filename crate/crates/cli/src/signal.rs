//! Plain-text signal files: one finite float per line, LF endings.

use std::fmt::Write as _;

/// Parses a signal; errors name the 1-based offending line.
pub fn parse_signal(text: &str) -> Result<Vec<f64>, String> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    if body.is_empty() {
        return Err("signal file is empty".to_string());
    }
    body.split('\n')
        .enumerate()
        .map(|(i, line)| {
            let line_no = i + 1;
            let field = line.strip_suffix('\r').unwrap_or(line).trim();
            let value: f64 = field
                .parse()
                .map_err(|_| format!("line {line_no}: '{field}' is not a number"))?;
            if value.is_finite() {
                Ok(value)
            } else {
                Err(format!("line {line_no}: non-finite value '{field}'"))
            }
        })
        .collect()
}

/// One value per line in shortest round-trip form.
pub fn format_signal(values: &[f64]) -> String {
    let mut out = String::with_capacity(24 * values.len());
    for v in values {
        let _ = writeln!(out, "{v:?}");
    }
    out
}
