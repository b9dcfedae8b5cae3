//! AEF binary container.
//!
//! Little-endian layout: `"AEF1"` | count: u32 | dimension: u32 | 4 zero bytes,
//! then per record one label byte (0 = female, 1 = male) followed by
//! `dimension` IEEE-754 binary32 values.

use std::fs;
use std::path::Path;

use super::{EmbeddingDataset, EmbeddingRecord, GenderLabel};
use crate::error::{Error, Result};

pub const AEF_MAGIC: &[u8; 4] = b"AEF1";
pub const AEF_HEADER_LEN: usize = 16;

fn record_len(dimension: usize) -> usize {
    1 + 4 * dimension
}

pub fn encode_aef(dataset: &EmbeddingDataset) -> Result<Vec<u8>> {
    dataset.validate()?;
    let count = u32::try_from(dataset.len()).map_err(|_| {
        Error::Format(format!(
            "{} records exceed the u32 count field",
            dataset.len()
        ))
    })?;
    let dimension = u32::try_from(dataset.dimension())
        .map_err(|_| Error::Format("dimension exceeds the u32 field".into()))?;
    let mut out =
        Vec::with_capacity(AEF_HEADER_LEN + dataset.len() * record_len(dataset.dimension()));
    out.extend_from_slice(AEF_MAGIC);
    out.extend_from_slice(&count.to_le_bytes());
    out.extend_from_slice(&dimension.to_le_bytes());
    out.extend_from_slice(&[0u8; 4]);
    for r in dataset.records() {
        out.push(r.label.code());
        for v in &r.features {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

pub fn decode_aef(bytes: &[u8], source_tag: &str) -> Result<EmbeddingDataset> {
    if bytes.len() < AEF_HEADER_LEN {
        return Err(Error::Format(format!(
            "{} bytes is shorter than the {AEF_HEADER_LEN}-byte header",
            bytes.len()
        )));
    }
    if &bytes[..4] != AEF_MAGIC {
        return Err(Error::Format(format!("bad magic {:?}", &bytes[..4])));
    }
    let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap());
    let count = word(4) as usize;
    let dimension = word(8) as usize;
    if dimension == 0 {
        return Err(Error::Format("dimension field is zero".into()));
    }
    let expected = AEF_HEADER_LEN as u64 + count as u64 * record_len(dimension) as u64;
    if expected != bytes.len() as u64 {
        return Err(Error::Truncated {
            expected,
            actual: bytes.len() as u64,
        });
    }
    let mut records = Vec::with_capacity(count);
    for (index, chunk) in bytes[AEF_HEADER_LEN..]
        .chunks_exact(record_len(dimension))
        .enumerate()
    {
        let label = GenderLabel::from_code(chunk[0]).ok_or(Error::Label {
            index,
            value: chunk[0],
        })?;
        let features = chunk[1..]
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
            .collect();
        records.push(EmbeddingRecord { features, label });
    }
    EmbeddingDataset::from_records(dimension, records, source_tag)
}

pub fn save_aef(dataset: &EmbeddingDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_aef(dataset)?;
    fs::write(path, bytes).map_err(|e| Error::storage(path, e))
}

/// Loads an AEF file; the dataset's source tag is the file stem.
pub fn load_aef(path: impl AsRef<Path>) -> Result<EmbeddingDataset> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::storage(path, e))?;
    let tag = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    decode_aef(&bytes, &tag)
}
