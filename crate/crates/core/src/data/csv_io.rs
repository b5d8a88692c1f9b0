//! Feature CSV: `id,corpus,session,speaker,label,f0000,…`, one utterance per row.

use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::{Emotion, FeatureDataset};
use crate::nn::Matrix;

const META_COLUMNS: [&str; 5] = ["id", "corpus", "session", "speaker", "label"];

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("bad header: {0}")]
    Header(String),
    #[error("{count} malformed row(s); first at line {first_line}: expected {expected} fields, found {found}")]
    MalformedRows {
        count: usize,
        first_line: u64,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: unknown label {label:?}")]
    UnknownLabel { line: u64, label: String },
    #[error("line {line}, column {column}: {value:?} is not a finite number")]
    NonNumeric {
        line: u64,
        column: String,
        value: String,
    },
    #[error("csv syntax: {0}")]
    Syntax(#[from] csv::Error),
}

pub fn feature_column_name(i: usize) -> String {
    format!("f{i:04}")
}

pub fn load_feature_csv(path: impl AsRef<Path>) -> Result<FeatureDataset, CsvError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| CsvError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_feature_csv(file)
}

pub fn read_feature_csv<R: Read>(reader: R) -> Result<FeatureDataset, CsvError> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .has_headers(true)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.len() <= META_COLUMNS.len() {
        return Err(CsvError::Header(format!(
            "expected {} metadata columns followed by feature columns",
            META_COLUMNS.len()
        )));
    }
    for (i, expected) in META_COLUMNS.iter().enumerate() {
        if &header[i] != *expected {
            return Err(CsvError::Header(format!(
                "column {i} is {:?}, expected {expected:?}",
                &header[i]
            )));
        }
    }
    let dim = header.len() - META_COLUMNS.len();
    for j in 0..dim {
        let name = &header[META_COLUMNS.len() + j];
        if name != feature_column_name(j) {
            return Err(CsvError::Header(format!(
                "feature column {j} is {name:?}, expected {:?}",
                feature_column_name(j)
            )));
        }
    }

    let expected = header.len();
    let mut ids = Vec::new();
    let mut corpus = None;
    let mut sessions = Vec::new();
    let mut speakers = Vec::new();
    let mut labels = Vec::new();
    let mut values = Vec::new();
    let mut malformed: Option<(usize, u64, usize)> = None;

    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != expected {
            let m = malformed.get_or_insert((0, line, record.len()));
            m.0 += 1;
            continue;
        }
        if malformed.is_some() {
            continue;
        }
        let label = record[4]
            .parse::<Emotion>()
            .map_err(|label| CsvError::UnknownLabel { line, label })?;
        for j in 0..dim {
            let raw = record[META_COLUMNS.len() + j].trim();
            match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => {
                    return Err(CsvError::NonNumeric {
                        line,
                        column: feature_column_name(j),
                        value: raw.to_string(),
                    })
                }
            }
        }
        ids.push(record[0].to_string());
        corpus.get_or_insert_with(|| record[1].to_string());
        sessions.push(record[2].to_string());
        speakers.push(record[3].to_string());
        labels.push(label);
    }
    if let Some((count, first_line, found)) = malformed {
        return Err(CsvError::MalformedRows {
            count,
            first_line,
            expected,
            found,
        });
    }

    let features = Matrix::from_vec(labels.len(), dim, values).expect("row-wise fill");
    Ok(FeatureDataset::new(
        corpus.unwrap_or_default(),
        ids,
        features,
        labels,
        sessions,
        speakers,
    )
    .expect("parsed columns are consistent"))
}

/// Writes `data` in the feature CSV schema. Values use Rust's shortest
/// round-trip float formatting, so reading the file back is lossless.
pub fn write_feature_csv<W: Write>(data: &FeatureDataset, writer: W) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = META_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend((0..data.dim()).map(feature_column_name));
    w.write_record(&header)?;
    let mut row: Vec<String> = Vec::with_capacity(header.len());
    for i in 0..data.len() {
        row.clear();
        row.push(data.ids()[i].clone());
        row.push(data.corpus().to_string());
        row.push(data.sessions()[i].clone());
        row.push(data.speakers()[i].clone());
        row.push(data.labels()[i].name().to_string());
        row.extend(data.features().row(i).iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush().map_err(|source| CsvError::Io {
        path: PathBuf::from("<writer>"),
        source,
    })?;
    Ok(())
}
