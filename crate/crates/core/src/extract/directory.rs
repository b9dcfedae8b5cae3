use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::adapter::{extract_embedding, InferenceAdapter};
use super::preprocess::{load_image, PreprocessManifest};
use crate::embedding::{EmbeddingDataset, EmbeddingRecord, GenderLabel};
use crate::error::{Error, Result};

pub const DEFAULT_BATCH: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExtractionSummary {
    pub extracted: [usize; 2],
    pub skipped: usize,
    pub skipped_paths: Vec<PathBuf>,
}

impl fmt::Display for ExtractionSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "extracted {} female, {} male; skipped {}",
            self.extracted[0], self.extracted[1], self.skipped
        )
    }
}

fn is_image(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| matches!(e.to_ascii_lowercase().as_str(), "jpg" | "jpeg" | "png"))
        .unwrap_or(false)
}

/// Lists `(path, label)` for every JPEG/PNG under `root/female` and
/// `root/male` (directory names matched case-insensitively), sorted by path.
pub fn list_class_images(root: &Path) -> Result<Vec<(PathBuf, GenderLabel)>> {
    if !root.is_dir() {
        return Err(Error::Layout(format!(
            "{} is not a directory",
            root.display()
        )));
    }
    let mut files = Vec::new();
    let mut class_dirs = 0;
    for entry in std::fs::read_dir(root).map_err(|e| Error::storage(root, e))? {
        let entry = entry.map_err(|e| Error::storage(root, e))?;
        let path = entry.path();
        if !path.is_dir() {
            continue;
        }
        let label = match entry
            .file_name()
            .to_str()
            .map(str::to_ascii_lowercase)
            .as_deref()
        {
            Some("female") => GenderLabel::Female,
            Some("male") => GenderLabel::Male,
            _ => continue,
        };
        class_dirs += 1;
        for file in std::fs::read_dir(&path).map_err(|e| Error::storage(&path, e))? {
            let file = file.map_err(|e| Error::storage(&path, e))?.path();
            if file.is_file() && is_image(&file) {
                files.push((file, label));
            }
        }
    }
    if class_dirs == 0 {
        return Err(Error::Layout(format!(
            "{} has no female/ or male/ subdirectory",
            root.display()
        )));
    }
    files.sort();
    Ok(files)
}

/// Embeds every readable image of a folder-per-class tree. Images are
/// decoded in parallel within each batch; inference runs serially.
pub fn extract_directory(
    adapter: &dyn InferenceAdapter,
    root: &Path,
    manifest: &PreprocessManifest,
    batch: usize,
) -> Result<(EmbeddingDataset, ExtractionSummary)> {
    if batch == 0 {
        return Err(Error::Contract("batch size must be positive".into()));
    }
    manifest.validate()?;
    let files = list_class_images(root)?;
    let tag = root
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut dataset = EmbeddingDataset::new(adapter.output_dim(), tag)?;
    let mut summary = ExtractionSummary::default();

    for chunk in files.chunks(batch) {
        let tensors: Vec<_> = chunk
            .par_iter()
            .map(|(path, _)| load_image(path, manifest))
            .collect();
        for ((path, label), tensor) in chunk.iter().zip(tensors) {
            match tensor {
                Ok(tensor) => {
                    let features = extract_embedding(adapter, &tensor)?;
                    dataset.push(EmbeddingRecord::new(features, *label))?;
                    summary.extracted[label.code() as usize] += 1;
                }
                Err(e) => {
                    log::warn!("skipping {}: {e}", path.display());
                    summary.skipped += 1;
                    summary.skipped_paths.push(path.clone());
                }
            }
        }
    }
    eprintln!("{}: {summary}", root.display());
    if dataset.is_empty() {
        return Err(Error::EmptyResult(root.to_path_buf()));
    }
    Ok((dataset, summary))
}
