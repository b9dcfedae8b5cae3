//! Face image to embedding conversion.

mod adapter;
mod directory;
mod preprocess;

#[cfg(feature = "onnx")]
pub use adapter::OnnxAdapter;
pub use adapter::{extract_embedding, Device, InferenceAdapter, StubAdapter};
pub use directory::{extract_directory, list_class_images, ExtractionSummary, DEFAULT_BATCH};
pub use preprocess::{
    load_image, preprocess_image, ChannelOrder, ImageTensor, PreprocessManifest, ResizeFilter,
    TensorLayout, INPUT_SIDE,
};
