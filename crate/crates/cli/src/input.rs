//! CSV ingestion.

use std::io::Read;
use std::path::Path;

use ecfnorm::SampleMatrix;

use crate::CliError;

/// Reads a numeric matrix. A first row containing any non-numeric field is
/// taken as a header. `-` reads standard input.
pub fn read_matrix(
    path: &Path,
    delim: u8,
) -> Result<(SampleMatrix, Option<Vec<String>>), CliError> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text)
    } else {
        std::fs::File::open(path).and_then(|mut f| f.read_to_string(&mut text))
    }
    .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
    parse_matrix(&text, delim)
}

pub fn parse_matrix(
    text: &str,
    delim: u8,
) -> Result<(SampleMatrix, Option<Vec<String>>), CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delim)
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut header = None;
    let mut values = Vec::new();
    let mut n_cols = 0;
    let mut n_rows = 0;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::data(format!("CSV error: {e}")))?;
        let line = record.position().map_or(i as u64 + 1, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: Vec<Result<f64, _>> = record.iter().map(str::parse::<f64>).collect();
        if n_rows == 0 && header.is_none() && parsed.iter().any(Result::is_err) {
            header = Some(record.iter().map(str::to_owned).collect::<Vec<_>>());
            n_cols = record.len();
            continue;
        }
        if n_cols == 0 {
            n_cols = record.len();
        }
        if record.len() != n_cols {
            return Err(CliError::data(format!(
                "line {line}: expected {n_cols} fields, found {}",
                record.len()
            )));
        }
        for (j, (field, v)) in record.iter().zip(parsed).enumerate() {
            match v {
                Ok(x) if x.is_finite() => values.push(x),
                _ => {
                    return Err(CliError::data(format!(
                        "line {line}, column {}: `{field}` is not a finite number",
                        j + 1
                    )))
                }
            }
        }
        n_rows += 1;
    }
    if n_rows == 0 {
        return Err(CliError::data("input contains no data rows".into()));
    }
    let x = SampleMatrix::new(n_rows, n_cols, values).map_err(CliError::from)?;
    Ok((x, header))
}
