//! CSV ingestion: one observation per row, row order preserved (block
//! schemes are order-sensitive, so shuffling on load would be a bug).

use std::path::Path;

use crate::error::{Error, Result};
use crate::sample::Sample;

/// Reads a numeric CSV into a [`Sample`]. Column count of the first data
/// row fixes the dimension; every cell must parse as a finite number.
/// Errors carry the 1-based file line and column of the offending cell.
pub fn ingest_csv(path: &Path, has_header: bool) -> Result<Sample> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(map_csv_error)?;

    let mut data: Vec<f64> = Vec::new();
    let mut dim: Option<usize> = None;
    for record in reader.records() {
        let record = record.map_err(map_csv_error)?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let d = *dim.get_or_insert(record.len());
        debug_assert_eq!(record.len(), d); // ragged rows already rejected above
        for (j, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| Error::CsvParse {
                row: line,
                column: j + 1,
                message: format!("'{field}' is not a number"),
            })?;
            if !value.is_finite() {
                return Err(Error::CsvParse {
                    row: line,
                    column: j + 1,
                    message: format!("non-finite value {value}"),
                });
            }
            data.push(value);
        }
    }
    match dim {
        None => Err(Error::InvalidInput(format!(
            "{} contains no data rows",
            path.display()
        ))),
        Some(d) => Sample::from_rows(data, d),
    }
}

fn map_csv_error(e: csv::Error) -> Error {
    let row = e
        .position()
        .map(|p| p.line() as usize)
        .unwrap_or_default();
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::CsvParse {
            row,
            column: 0,
            message: format!("{other:?}"),
        },
    }
}
