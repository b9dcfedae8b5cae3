use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::preprocess::{ImageTensor, INPUT_SIDE};
use crate::embedding::ARCFACE_DIM;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Device {
    Cpu,
    Gpu,
}

/// Contract between the extractor and an inference engine. Implementations
/// are called serially; they need not be reentrant.
pub trait InferenceAdapter {
    /// Input shape for one image, batch dimension included.
    fn input_shape(&self) -> [usize; 4];
    fn output_dim(&self) -> usize;
    /// Runs the network on one tensor whose shape was already checked.
    fn infer(&self, tensor: &ImageTensor) -> Result<Vec<f32>>;
    fn describe(&self) -> String;
}

/// Returns the raw model output for one image.
pub fn extract_embedding(adapter: &dyn InferenceAdapter, tensor: &ImageTensor) -> Result<Vec<f32>> {
    let expected = adapter.input_shape();
    let volume: usize = expected.iter().product();
    if tensor.shape != expected || tensor.data.len() != volume {
        return Err(Error::Contract(format!(
            "tensor shape {:?} ({} values) does not match model input {:?}",
            tensor.shape,
            tensor.data.len(),
            expected
        )));
    }
    let out = adapter.infer(tensor)?;
    if out.len() != adapter.output_dim() {
        return Err(Error::Extraction(format!(
            "engine returned {} values, expected {}",
            out.len(),
            adapter.output_dim()
        )));
    }
    if let Some(i) = out.iter().position(|v| !v.is_finite()) {
        return Err(Error::Extraction(format!(
            "engine output component {i} is not finite"
        )));
    }
    Ok(out)
}

/// Deterministic pseudo-embedding: the SHA-256 of the tensor bytes seeds a
/// standard-normal stream. No model file needed.
#[derive(Debug, Clone)]
pub struct StubAdapter {
    shape: [usize; 4],
    dimension: usize,
}

impl StubAdapter {
    pub fn new() -> Self {
        Self::with_shape(
            [1, 3, INPUT_SIDE as usize, INPUT_SIDE as usize],
            ARCFACE_DIM,
        )
    }

    pub fn with_shape(shape: [usize; 4], dimension: usize) -> Self {
        Self { shape, dimension }
    }
}

impl Default for StubAdapter {
    fn default() -> Self {
        Self::new()
    }
}

impl InferenceAdapter for StubAdapter {
    fn input_shape(&self) -> [usize; 4] {
        self.shape
    }

    fn output_dim(&self) -> usize {
        self.dimension
    }

    fn infer(&self, tensor: &ImageTensor) -> Result<Vec<f32>> {
        let mut hasher = Sha256::new();
        for v in &tensor.data {
            hasher.update(v.to_le_bytes());
        }
        let digest = hasher.finalize();
        let mut seed = [0u8; 32];
        seed.copy_from_slice(&digest);
        let mut rng = ChaCha8Rng::from_seed(seed);
        Ok((0..self.dimension)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                z as f32
            })
            .collect())
    }

    fn describe(&self) -> String {
        format!("stub(hash, dim {})", self.dimension)
    }
}

#[cfg(feature = "onnx")]
pub use onnx::OnnxAdapter;

#[cfg(feature = "onnx")]
mod onnx {
    use std::path::{Path, PathBuf};

    use tract_onnx::prelude::*;

    use super::{Device, InferenceAdapter};
    use crate::embedding::ARCFACE_DIM;
    use crate::error::{Error, Result};
    use crate::extract::preprocess::{ImageTensor, INPUT_SIDE};

    /// ONNX graph executed on the CPU through tract.
    pub struct OnnxAdapter {
        plan: std::sync::Arc<TypedRunnableModel>,
        model_path: PathBuf,
        input_name: String,
        output_name: String,
        device: Device,
    }

    impl std::fmt::Debug for OnnxAdapter {
        fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
            f.debug_struct("OnnxAdapter")
                .field("model_path", &self.model_path)
                .field("input_name", &self.input_name)
                .field("output_name", &self.output_name)
                .field("device", &self.device)
                .finish()
        }
    }

    fn engine(e: impl std::fmt::Display) -> Error {
        Error::Extraction(format!("{e:#}"))
    }

    impl OnnxAdapter {
        /// Loads and validates the graph: one input accepting
        /// `(1, 3, 112, 112)` and one output of shape `(1, 512)`.
        pub fn load(model_path: &Path, device: Device) -> Result<Self> {
            if device == Device::Gpu {
                return Err(Error::Extraction(
                    "the built-in engine runs on the CPU only; use device cpu".into(),
                ));
            }
            let side = INPUT_SIDE as usize;
            let model = tract_onnx::onnx()
                .model_for_path(model_path)
                .map_err(|e| Error::Extraction(format!("{}: {e:#}", model_path.display())))?;
            let inputs = model.input_outlets().map_err(engine)?.len();
            let outputs = model.output_outlets().map_err(engine)?.len();
            if inputs != 1 || outputs != 1 {
                return Err(Error::Contract(format!(
                    "model must have one input and one output, found {inputs} and {outputs}"
                )));
            }
            let input_name = model
                .node(model.input_outlets().map_err(engine)?[0].node)
                .name
                .clone();
            let output_name = model
                .node(model.output_outlets().map_err(engine)?[0].node)
                .name
                .clone();
            let typed = model
                .with_input_fact(0, f32::fact([1, 3, side, side]).into())
                .map_err(|e| {
                    Error::Contract(format!(
                        "input does not accept (1, 3, {side}, {side}): {e:#}"
                    ))
                })?
                .into_optimized()
                .map_err(|e| Error::Contract(format!("graph analysis failed: {e:#}")))?;
            let out_fact = typed.output_fact(0).map_err(engine)?;
            let out_shape = out_fact.shape.as_concrete().map(|s| s.to_vec());
            if out_shape.as_deref() != Some(&[1, ARCFACE_DIM][..]) {
                return Err(Error::Contract(format!(
                    "model output must have shape (1, {ARCFACE_DIM}), found {:?}",
                    out_fact.shape
                )));
            }
            let plan = typed.into_runnable().map_err(engine)?;
            Ok(Self {
                plan,
                model_path: model_path.to_path_buf(),
                input_name,
                output_name,
                device,
            })
        }

        pub fn input_name(&self) -> &str {
            &self.input_name
        }

        pub fn output_name(&self) -> &str {
            &self.output_name
        }
    }

    impl InferenceAdapter for OnnxAdapter {
        fn input_shape(&self) -> [usize; 4] {
            [1, 3, INPUT_SIDE as usize, INPUT_SIDE as usize]
        }

        fn output_dim(&self) -> usize {
            ARCFACE_DIM
        }

        fn infer(&self, tensor: &ImageTensor) -> Result<Vec<f32>> {
            let input = Tensor::from_shape(&tensor.shape, &tensor.data).map_err(engine)?;
            let outputs = self.plan.run(tvec!(input.into())).map_err(engine)?;
            let view = outputs[0].to_plain_array_view::<f32>().map_err(engine)?;
            Ok(view.iter().copied().collect())
        }

        fn describe(&self) -> String {
            format!(
                "onnx({}, {} -> {}, {:?})",
                self.model_path.display(),
                self.input_name,
                self.output_name,
                self.device
            )
        }
    }
}
