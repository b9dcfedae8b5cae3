//! Labeled embedding datasets: the unit of all training and evaluation.

mod aef;
mod csv;

use std::fmt;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

pub use aef::{decode_aef, encode_aef, load_aef, save_aef, AEF_HEADER_LEN, AEF_MAGIC};
pub use csv::{load_csv, parse_csv};

/// Dimension of ArcFace embeddings.
pub const ARCFACE_DIM: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GenderLabel {
    Female = 0,
    Male = 1,
}

impl GenderLabel {
    pub const ALL: [GenderLabel; 2] = [GenderLabel::Female, GenderLabel::Male];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(GenderLabel::Female),
            1 => Some(GenderLabel::Male),
            _ => None,
        }
    }

    /// Signed encoding used by margin classifiers: Female -> -1, Male -> +1.
    pub fn sign(self) -> f64 {
        match self {
            GenderLabel::Female => -1.0,
            GenderLabel::Male => 1.0,
        }
    }

    pub fn other(self) -> Self {
        match self {
            GenderLabel::Female => GenderLabel::Male,
            GenderLabel::Male => GenderLabel::Female,
        }
    }

    /// Accepts `0`/`1` and `female`/`male` in any case.
    pub fn parse(text: &str) -> Option<Self> {
        let text = text.trim();
        match text {
            "0" => Some(GenderLabel::Female),
            "1" => Some(GenderLabel::Male),
            _ if text.eq_ignore_ascii_case("female") => Some(GenderLabel::Female),
            _ if text.eq_ignore_ascii_case("male") => Some(GenderLabel::Male),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GenderLabel::Female => "female",
            GenderLabel::Male => "male",
        }
    }
}

impl fmt::Display for GenderLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingRecord {
    pub features: Vec<f32>,
    pub label: GenderLabel,
}

impl EmbeddingRecord {
    pub fn new(features: Vec<f32>, label: GenderLabel) -> Self {
        Self { features, label }
    }

    pub fn features_f64(&self) -> Vec<f64> {
        self.features.iter().map(|&v| f64::from(v)).collect()
    }
}

/// An ordered collection of records sharing one feature dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingDataset {
    dimension: usize,
    records: Vec<EmbeddingRecord>,
    pub source_tag: String,
}

impl EmbeddingDataset {
    pub fn new(dimension: usize, source_tag: impl Into<String>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Contract("dataset dimension must be positive".into()));
        }
        Ok(Self {
            dimension,
            records: Vec::new(),
            source_tag: source_tag.into(),
        })
    }

    pub fn from_records(
        dimension: usize,
        records: Vec<EmbeddingRecord>,
        source_tag: impl Into<String>,
    ) -> Result<Self> {
        let mut ds = Self::new(dimension, source_tag)?;
        ds.records.reserve(records.len());
        for record in records {
            ds.push(record)?;
        }
        Ok(ds)
    }

    pub fn push(&mut self, record: EmbeddingRecord) -> Result<()> {
        Error::check_dim(self.dimension, record.features.len())?;
        self.records.push(record);
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn records(&self) -> &[EmbeddingRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn labels(&self) -> Vec<GenderLabel> {
        self.records.iter().map(|r| r.label).collect()
    }

    /// `[female, male]` record counts.
    pub fn class_counts(&self) -> [usize; 2] {
        let mut counts = [0usize; 2];
        for r in &self.records {
            counts[r.label as usize] += 1;
        }
        counts
    }

    /// Row-major 64-bit copy of the feature matrix.
    pub fn feature_matrix(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len() * self.dimension);
        for r in &self.records {
            out.extend(r.features.iter().map(|&v| f64::from(v)));
        }
        out
    }

    /// Checks that every component is finite.
    pub fn validate(&self) -> Result<()> {
        for (index, r) in self.records.iter().enumerate() {
            if let Some(pos) = r.features.iter().position(|v| !v.is_finite()) {
                return Err(Error::Validation {
                    index,
                    reason: format!("non-finite feature at component {pos}"),
                });
            }
        }
        Ok(())
    }

    pub(crate) fn require_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::Training("dataset is empty".into()))
        } else {
            Ok(())
        }
    }

    pub(crate) fn require_both_classes(&self, per_class: usize) -> Result<()> {
        self.require_nonempty()?;
        let counts = self.class_counts();
        for label in GenderLabel::ALL {
            if counts[label as usize] < per_class {
                return Err(Error::Training(format!(
                    "class {label} has {} record(s), at least {per_class} required",
                    counts[label as usize]
                )));
            }
        }
        Ok(())
    }

    /// Dataset restricted to `indices`, in the given order.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            dimension: self.dimension,
            records: indices.iter().map(|&i| self.records[i].clone()).collect(),
            source_tag: self.source_tag.clone(),
        }
    }

    /// Uniform sample of `n` records without replacement; input order is kept.
    /// Returns a clone when `n >= len`.
    pub fn subsample(&self, n: usize, seed: u64) -> Self {
        if n >= self.len() {
            return self.clone();
        }
        let mut indices: Vec<usize> = (0..self.len()).collect();
        indices.shuffle(&mut rng::stream(seed));
        indices.truncate(n);
        indices.sort_unstable();
        self.select(&indices)
    }
}

/// Scales every record to unit Euclidean norm.
pub fn l2_normalize(dataset: &EmbeddingDataset) -> Result<EmbeddingDataset> {
    let mut records = Vec::with_capacity(dataset.len());
    for (index, r) in dataset.records.iter().enumerate() {
        let norm = r
            .features
            .iter()
            .map(|&v| f64::from(v) * f64::from(v))
            .sum::<f64>()
            .sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Degenerate {
                index,
                reason: format!("cannot normalize a vector of norm {norm}"),
            });
        }
        let features = r
            .features
            .iter()
            .map(|&v| (f64::from(v) / norm) as f32)
            .collect();
        records.push(EmbeddingRecord::new(features, r.label));
    }
    Ok(EmbeddingDataset {
        dimension: dataset.dimension,
        records,
        source_tag: dataset.source_tag.clone(),
    })
}

/// Splits each class so that the first part holds `round(fraction * class_count)`
/// of its records. Records keep their relative input order inside each part.
pub fn stratified_split(
    dataset: &EmbeddingDataset,
    fraction: f64,
    seed: u64,
) -> Result<(EmbeddingDataset, EmbeddingDataset)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Split(format!(
            "fraction {fraction} is not in (0, 1)"
        )));
    }
    let mut rng = rng::stream(seed);
    let mut first = Vec::new();
    for label in GenderLabel::ALL {
        let mut members: Vec<usize> = dataset
            .records
            .iter()
            .enumerate()
            .filter(|(_, r)| r.label == label)
            .map(|(i, _)| i)
            .collect();
        if members.len() < 2 {
            return Err(Error::Split(format!(
                "class {label} has {} record(s), at least 2 required",
                members.len()
            )));
        }
        let take = (fraction * members.len() as f64).round() as usize;
        members.shuffle(&mut rng);
        first.extend_from_slice(&members[..take]);
    }
    first.sort_unstable();
    let mut in_first = vec![false; dataset.len()];
    for &i in &first {
        in_first[i] = true;
    }
    let second: Vec<usize> = (0..dataset.len()).filter(|&i| !in_first[i]).collect();
    Ok((dataset.select(&first), dataset.select(&second)))
}
