//! Headerless CSV interchange: `label,f1,...,fD` per line.

use std::fs;
use std::path::Path;

use super::{EmbeddingDataset, EmbeddingRecord, GenderLabel};
use crate::error::{Error, Result};

pub fn parse_csv(text: &str, dimension: usize, source_tag: &str) -> Result<EmbeddingDataset> {
    let mut dataset = EmbeddingDataset::new(dimension, source_tag)?;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != dimension + 1 {
            return Err(Error::Parse {
                line: line_no,
                column: None,
                message: format!("expected {} fields, found {}", dimension + 1, fields.len()),
            });
        }
        let label = GenderLabel::parse(fields[0]).ok_or_else(|| Error::Parse {
            line: line_no,
            column: Some(1),
            message: format!("unknown label {:?}", fields[0]),
        })?;
        let mut features = Vec::with_capacity(dimension);
        for (col, field) in fields[1..].iter().enumerate() {
            let value: f32 = field.trim().parse().map_err(|_| Error::Parse {
                line: line_no,
                column: Some(col + 2),
                message: format!("not a number: {field:?}"),
            })?;
            features.push(value);
        }
        dataset.push(EmbeddingRecord::new(features, label))?;
    }
    Ok(dataset)
}

pub fn load_csv(path: impl AsRef<Path>, dimension: usize) -> Result<EmbeddingDataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::storage(path, e))?;
    let tag = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_csv(&text, dimension, &tag)
}
