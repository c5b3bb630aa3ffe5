//! The score CSV dialect.
//!
//! ```text
//! i1,i2,i3          <- item ids (an empty leading cell is allowed)
//! #max,5,1,1        <- optional per-item maxima, default 1
//! s1,2,0,1
//! s2,5,1,1
//! ```
//!
//! Rows and columns in error messages are 1-based positions in the file;
//! the examinee-id column is column 1.

use std::collections::HashSet;

use itemfair_core::{MatrixError, ScoreMatrix};
use thiserror::Error;

pub const MAX_ROW_TAG: &str = "#max";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CsvError {
    #[error("row {row}: {message}")]
    Syntax { row: u64, message: String },
    #[error("input has no header row")]
    MissingHeader,
    #[error("need at least 2 item columns, found {0}")]
    TooFewColumns(usize),
    #[error("need at least 2 examinee rows, found {0}")]
    TooFewRows(usize),
    #[error("row {row}: expected {expected} cells, found {found}")]
    Ragged {
        row: u64,
        expected: usize,
        found: usize,
    },
    #[error("row {row}, column {column}: missing score")]
    MissingScore { row: u64, column: usize },
    #[error("row {row}, column {column}: `{value}` is not a number")]
    NotNumeric {
        row: u64,
        column: usize,
        value: String,
    },
    #[error("row {row}, column {column}: score {value} is negative")]
    Negative { row: u64, column: usize, value: f64 },
    #[error("row {row}, column {column}: score {value} exceeds item maximum {max}")]
    AboveMax {
        row: u64,
        column: usize,
        value: f64,
        max: f64,
    },
    #[error("row {row}, column {column}: item maximum {value} must be positive")]
    InvalidMax { row: u64, column: usize, value: f64 },
    #[error("row 1, column {column}: duplicate item id `{id}`")]
    DuplicateItem { column: usize, id: String },
    #[error("row {row}: duplicate examinee id `{id}`")]
    DuplicateExaminee { row: u64, id: String },
    #[error("row {row}: empty examinee id")]
    EmptyExaminee { row: u64 },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

fn parse_number(cell: &str, row: u64, column: usize) -> Result<f64, CsvError> {
    if cell.is_empty() {
        return Err(CsvError::MissingScore { row, column });
    }
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(CsvError::NotNumeric {
            row,
            column,
            value: cell.to_string(),
        }),
    }
}

/// Parses and validates a score matrix.
pub fn parse_score_csv(text: &str) -> Result<ScoreMatrix, CsvError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records().map(|r| {
        r.map_err(|e| CsvError::Syntax {
            row: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })
    });

    let header = records.next().ok_or(CsvError::MissingHeader)??;
    let mut cells: Vec<&str> = header.iter().collect();
    if cells.first() == Some(&"") {
        cells.remove(0);
    }
    let item_ids: Vec<String> = cells.iter().map(|s| s.to_string()).collect();
    if item_ids.len() < 2 {
        return Err(CsvError::TooFewColumns(item_ids.len()));
    }
    let mut seen = HashSet::new();
    for (i, id) in item_ids.iter().enumerate() {
        if !seen.insert(id.as_str()) {
            return Err(CsvError::DuplicateItem {
                column: i + 2,
                id: id.clone(),
            });
        }
    }
    let n = item_ids.len();

    let mut max_scores = vec![1.0; n];
    let mut examinee_ids = Vec::new();
    let mut scores = Vec::new();
    let mut seen_examinees = HashSet::new();
    let mut first_data_row = true;
    for record in records {
        let record = record?;
        let row = record.position().map_or(0, |p| p.line());
        if record.len() != n + 1 {
            return Err(CsvError::Ragged {
                row,
                expected: n + 1,
                found: record.len(),
            });
        }
        let label = &record[0];
        if first_data_row && label == MAX_ROW_TAG {
            first_data_row = false;
            for (i, cell) in record.iter().skip(1).enumerate() {
                let value = parse_number(cell, row, i + 2)?;
                if value <= 0.0 {
                    return Err(CsvError::InvalidMax {
                        row,
                        column: i + 2,
                        value,
                    });
                }
                max_scores[i] = value;
            }
            continue;
        }
        first_data_row = false;
        if label.is_empty() {
            return Err(CsvError::EmptyExaminee { row });
        }
        if !seen_examinees.insert(label.to_string()) {
            return Err(CsvError::DuplicateExaminee {
                row,
                id: label.to_string(),
            });
        }
        for (i, cell) in record.iter().skip(1).enumerate() {
            let column = i + 2;
            let value = parse_number(cell, row, column)?;
            if value < 0.0 {
                return Err(CsvError::Negative { row, column, value });
            }
            if value > max_scores[i] {
                return Err(CsvError::AboveMax {
                    row,
                    column,
                    value,
                    max: max_scores[i],
                });
            }
            scores.push(value);
        }
        examinee_ids.push(label.to_string());
    }
    if examinee_ids.len() < 2 {
        return Err(CsvError::TooFewRows(examinee_ids.len()));
    }
    Ok(ScoreMatrix::new(
        examinee_ids,
        item_ids,
        scores,
        max_scores,
    )?)
}

/// Writes a matrix in the dialect [`parse_score_csv`] reads. The `#max`
/// row is emitted only when some item maximum differs from 1.
pub fn write_score_csv(m: &ScoreMatrix) -> String {
    let mut w = csv::WriterBuilder::new()
        .flexible(true)
        .from_writer(Vec::new());
    let write = |w: &mut csv::Writer<Vec<u8>>, cells: Vec<String>| {
        w.write_record(cells).expect("writing to memory");
    };
    write(&mut w, m.item_ids().to_vec());
    if m.max_scores().iter().any(|&x| x != 1.0) {
        let mut row = vec![MAX_ROW_TAG.to_string()];
        row.extend(m.max_scores().iter().map(|x| x.to_string()));
        write(&mut w, row);
    }
    for k in 0..m.n_examinees() {
        let mut row = vec![m.examinee_ids()[k].clone()];
        row.extend(m.row(k).iter().map(|x| x.to_string()));
        write(&mut w, row);
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv output is UTF-8")
}
