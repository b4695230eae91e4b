//! Labelled CSV files.
//!
//! The first row is a header. One column, named `label`, holds the class
//! (`1` or `2`); every other column is a numeric feature. Numbers are written
//! in shortest round-trip form so that re-reading a written file reproduces
//! the values exactly.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::sample::{Label, LabeledRows, TwoClassSample};

pub const LABEL_COLUMN: &str = "label";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(e: csv::Error) -> Error {
    let (line, column) = e.position().map_or((0, 0), |p| (p.line(), 0));
    match e.into_kind() {
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => Error::Parse {
            line,
            column: len as usize + 1,
            message: format!("expected {expected_len} fields, found {len}"),
        },
        csv::ErrorKind::Utf8 { err, .. } => Error::Parse {
            line,
            column: err.field() + 1,
            message: "invalid UTF-8".into(),
        },
        csv::ErrorKind::Io(e) => Error::Parse {
            line,
            column,
            message: e.to_string(),
        },
        other => Error::Parse {
            line,
            column,
            message: format!("{other:?}"),
        },
    }
}

/// Parses labelled rows from any reader.
pub fn parse_labeled_csv(reader: impl Read) -> Result<LabeledRows> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let label_positions: Vec<usize> = headers
        .iter()
        .enumerate()
        .filter(|(_, h)| h.eq_ignore_ascii_case(LABEL_COLUMN))
        .map(|(i, _)| i)
        .collect();
    let label_col = match label_positions.as_slice() {
        [one] => *one,
        [] => {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: format!("header has no '{LABEL_COLUMN}' column"),
            })
        }
        _ => {
            return Err(Error::Parse {
                line: 1,
                column: label_positions[1] + 1,
                message: format!("header has more than one '{LABEL_COLUMN}' column"),
            })
        }
    };
    let names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != label_col)
        .map(|(_, h)| h.to_string())
        .collect();
    if names.is_empty() {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "header has no feature columns".into(),
        });
    }

    let d = names.len();
    let mut values = Vec::new();
    let mut labels = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line());
        for (i, field) in record.iter().enumerate() {
            if i == label_col {
                let label = match field {
                    "1" => Label::One,
                    "2" => Label::Two,
                    other => {
                        return Err(Error::Parse {
                            line,
                            column: i + 1,
                            message: format!("label must be 1 or 2, found '{other}'"),
                        })
                    }
                };
                labels.push(label);
            } else {
                let v: f64 = field.parse().map_err(|_| Error::Parse {
                    line,
                    column: i + 1,
                    message: format!("'{field}' is not a number"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        line,
                        column: i + 1,
                        message: format!("'{field}' is not finite"),
                    });
                }
                values.push(v);
            }
        }
    }
    let rows = Array2::from_shape_vec((labels.len(), d), values).expect("row lengths checked by the csv reader");
    Ok(LabeledRows {
        rows,
        labels,
        feature_names: Some(names),
    })
}

/// Reads labelled rows from a file.
pub fn read_labeled_csv(path: &Path) -> Result<LabeledRows> {
    let file = File::open(path).map_err(io_err(path))?;
    parse_labeled_csv(std::io::BufReader::new(file)).map_err(|e| match e {
        Error::Parse { line, column, message } => Error::Parse {
            line,
            column,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}

/// Reads a file and splits it into the two classes. Both labels must occur
/// at least twice.
pub fn read_sample(path: &Path) -> Result<TwoClassSample> {
    read_labeled_csv(path)?.to_sample().map_err(|e| match e {
        Error::Precondition(m) | Error::Data(m) => Error::Data(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Writes labelled rows (label first) to any writer.
pub fn write_labeled_csv_to(writer: impl Write, rows: &LabeledRows) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let d = rows.dim();
    let mut header = vec![LABEL_COLUMN.to_string()];
    header.extend((0..d).map(|k| match &rows.feature_names {
        Some(n) => n[k].clone(),
        None => format!("X{}", k + 1),
    }));
    w.write_record(&header).map_err(csv_err)?;
    let mut record = Vec::with_capacity(d + 1);
    for (r, label) in rows.labels.iter().enumerate() {
        record.clear();
        record.push(label.as_u8().to_string());
        record.extend(rows.rows.row(r).iter().map(|v| v.to_string()));
        w.write_record(&record).map_err(csv_err)?;
    }
    w.flush().map_err(io_err(Path::new("<output>")))
}

/// Writes a sample (class 1 rows first) to a file.
pub fn write_sample(path: &Path, sample: &TwoClassSample) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut buf = std::io::BufWriter::new(file);
    write_labeled_csv_to(&mut buf, &sample.to_labeled())?;
    buf.flush().map_err(io_err(path))
}
