//! FTM1 model files.
//!
//! Layout (integers little-endian):
//!
//! | bytes | content |
//! |---|---|
//! | 4 | magic `FTM1` |
//! | 4 | format version (u32) |
//! | 1 | family tag |
//! | 8 | creation time, seconds since the Unix epoch (u64) |
//! | 32 | SHA-256 of the training dataset's AEF encoding |
//! | 4 + n | configuration block: length (u32) then JSON |
//! | 8 + m | payload block: length (u64) then bincode model parameters |
//! | 4 | CRC-32 of every preceding byte |
//!
//! The checksum is verified before anything else is interpreted, so any
//! damaged file is reported as corruption.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};

use crate::classifier::{Classifier, Family, ModelConfig};
use crate::embedding::{encode_aef, EmbeddingDataset};
use crate::error::{Error, Result};

pub const FTM_MAGIC: &[u8; 4] = b"FTM1";
pub const FTM_VERSION: u32 = 1;
const FIXED_PREFIX: usize = 4 + 4 + 1 + 8 + 32;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelArtifact {
    pub version: u32,
    pub created_unix_s: u64,
    pub dataset_fingerprint: [u8; 32],
    pub config: ModelConfig,
    pub model: Classifier,
}

/// SHA-256 of the dataset's AEF bytes.
pub fn dataset_fingerprint(data: &EmbeddingDataset) -> Result<[u8; 32]> {
    Ok(Sha256::digest(encode_aef(data)?).into())
}

impl ModelArtifact {
    /// Wraps a freshly trained model, stamping the current time.
    pub fn new(
        config: ModelConfig,
        model: Classifier,
        training: &EmbeddingDataset,
    ) -> Result<Self> {
        if config.family() != model.family() {
            return Err(Error::Contract(format!(
                "configuration is for {} but the model is {}",
                config.family(),
                model.family()
            )));
        }
        let created_unix_s = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Ok(Self {
            version: FTM_VERSION,
            created_unix_s,
            dataset_fingerprint: dataset_fingerprint(training)?,
            config,
            model,
        })
    }

    pub fn family(&self) -> Family {
        self.model.family()
    }

    pub fn fingerprint_hex(&self) -> String {
        self.dataset_fingerprint
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

pub fn serialize_model(artifact: &ModelArtifact) -> Result<Vec<u8>> {
    let config = serde_json::to_vec(&artifact.config).map_err(|e| Error::Format(e.to_string()))?;
    let payload = bincode::serialize(&artifact.model).map_err(|e| Error::Format(e.to_string()))?;
    let config_len = u32::try_from(config.len())
        .map_err(|_| Error::Format("configuration block too large".into()))?;

    let mut out = Vec::with_capacity(FIXED_PREFIX + 16 + config.len() + payload.len());
    out.extend_from_slice(FTM_MAGIC);
    out.extend_from_slice(&artifact.version.to_le_bytes());
    out.push(artifact.family().code());
    out.extend_from_slice(&artifact.created_unix_s.to_le_bytes());
    out.extend_from_slice(&artifact.dataset_fingerprint);
    out.extend_from_slice(&config_len.to_le_bytes());
    out.extend_from_slice(&config);
    out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    out.extend_from_slice(&payload);
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .at
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or(Error::Truncated {
                expected: (self.at as u64).saturating_add(n as u64),
                actual: self.bytes.len() as u64,
            })?;
        let slice = &self.bytes[self.at..end];
        self.at = end;
        Ok(slice)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut out = [0u8; N];
        out.copy_from_slice(self.take(N)?);
        Ok(out)
    }
}

pub fn deserialize_model(bytes: &[u8]) -> Result<ModelArtifact> {
    if bytes.len() < FIXED_PREFIX + 4 + 8 + 4 {
        return Err(Error::Truncated {
            expected: (FIXED_PREFIX + 16) as u64,
            actual: bytes.len() as u64,
        });
    }
    let (body, tail) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(tail.try_into().expect("4-byte tail"));
    let computed = crc32fast::hash(body);
    if stored != computed {
        return Err(Error::Corruption { stored, computed });
    }

    let mut r = Reader { bytes: body, at: 0 };
    if r.take(4)? != FTM_MAGIC {
        return Err(Error::Format("not an FTM1 model file".into()));
    }
    let version = u32::from_le_bytes(r.array()?);
    if version != FTM_VERSION {
        return Err(Error::Format(format!(
            "model format version {version} is not supported (expected {FTM_VERSION})"
        )));
    }
    let code = r.array::<1>()?[0];
    let family = Family::from_code(code)
        .ok_or_else(|| Error::Format(format!("unknown model family tag {code}")))?;
    let created_unix_s = u64::from_le_bytes(r.array()?);
    let dataset_fingerprint = r.array::<32>()?;
    let config_len = u32::from_le_bytes(r.array()?) as usize;
    let config: ModelConfig = serde_json::from_slice(r.take(config_len)?)
        .map_err(|e| Error::Format(format!("configuration block: {e}")))?;
    let payload_len = u64::from_le_bytes(r.array()?);
    let payload_len = usize::try_from(payload_len)
        .map_err(|_| Error::Format("payload length overflows".into()))?;
    let model: Classifier = bincode::deserialize(r.take(payload_len)?)
        .map_err(|e| Error::Format(format!("payload block: {e}")))?;
    if r.at != body.len() {
        return Err(Error::Format(format!(
            "{} unexpected trailing byte(s)",
            body.len() - r.at
        )));
    }
    if model.family() != family || config.family() != family {
        return Err(Error::Format(format!(
            "family tag {family} disagrees with the stored configuration or payload"
        )));
    }
    Ok(ModelArtifact {
        version,
        created_unix_s,
        dataset_fingerprint,
        config,
        model,
    })
}

pub fn save_model(path: &Path, artifact: &ModelArtifact) -> Result<()> {
    std::fs::write(path, serialize_model(artifact)?).map_err(|e| Error::storage(path, e))
}

pub fn load_model(path: &Path) -> Result<ModelArtifact> {
    let bytes = std::fs::read(path).map_err(|e| Error::storage(path, e))?;
    deserialize_model(&bytes)
}
