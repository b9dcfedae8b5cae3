use std::path::Path;

use image::imageops::{self, FilterType};
use image::DynamicImage;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const INPUT_SIDE: u32 = 112;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelOrder {
    Rgb,
    Bgr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TensorLayout {
    ChannelsFirst,
    ChannelsLast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResizeFilter {
    Bilinear,
    Nearest,
}

/// How a decoded image becomes network input. Recorded next to every
/// extracted dataset, since the pretrained asset does not ship it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreprocessManifest {
    pub target_height: u32,
    pub target_width: u32,
    pub channel_order: ChannelOrder,
    pub layout: TensorLayout,
    pub scale_offset: f32,
    pub scale_divisor: f32,
    pub resize_filter: ResizeFilter,
}

impl Default for PreprocessManifest {
    fn default() -> Self {
        Self {
            target_height: INPUT_SIDE,
            target_width: INPUT_SIDE,
            channel_order: ChannelOrder::Rgb,
            layout: TensorLayout::ChannelsFirst,
            scale_offset: 127.5,
            scale_divisor: 127.5,
            resize_filter: ResizeFilter::Bilinear,
        }
    }
}

impl PreprocessManifest {
    pub fn validate(&self) -> Result<()> {
        if self.target_height != INPUT_SIDE || self.target_width != INPUT_SIDE {
            return Err(Error::Contract(format!(
                "target size must be {INPUT_SIDE}x{INPUT_SIDE}, got {}x{}",
                self.target_width, self.target_height
            )));
        }
        if self.scale_divisor == 0.0 || !self.scale_divisor.is_finite() {
            return Err(Error::Contract(
                "scale_divisor must be finite and nonzero".into(),
            ));
        }
        Ok(())
    }

    /// Tensor shape `[1, 3, H, W]` or `[1, H, W, 3]`.
    pub fn tensor_shape(&self) -> [usize; 4] {
        let (h, w) = (self.target_height as usize, self.target_width as usize);
        match self.layout {
            TensorLayout::ChannelsFirst => [1, 3, h, w],
            TensorLayout::ChannelsLast => [1, h, w, 3],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImageTensor {
    pub data: Vec<f32>,
    pub shape: [usize; 4],
    pub manifest: PreprocessManifest,
}

/// Converts to three channels (gray replicated, alpha dropped), resizes to
/// 112x112 unless already that size, and maps each value `v` to
/// `(v - scale_offset) / scale_divisor`.
pub fn preprocess_image(raw: &DynamicImage, manifest: &PreprocessManifest) -> Result<ImageTensor> {
    manifest.validate()?;
    if raw.width() == 0 || raw.height() == 0 {
        return Err(Error::Contract("image has no pixels".into()));
    }
    let rgb = raw.to_rgb8();
    let (w, h) = (manifest.target_width, manifest.target_height);
    let resized = if rgb.dimensions() == (w, h) {
        rgb
    } else {
        let filter = match manifest.resize_filter {
            ResizeFilter::Bilinear => FilterType::Triangle,
            ResizeFilter::Nearest => FilterType::Nearest,
        };
        imageops::resize(&rgb, w, h, filter)
    };

    let (w, h) = (w as usize, h as usize);
    let channel_src = match manifest.channel_order {
        ChannelOrder::Rgb => [0, 1, 2],
        ChannelOrder::Bgr => [2, 1, 0],
    };
    let mut data = vec![0.0f32; 3 * h * w];
    for (x, y, pixel) in resized.enumerate_pixels() {
        let (x, y) = (x as usize, y as usize);
        for (c, &src) in channel_src.iter().enumerate() {
            let v = (f32::from(pixel.0[src]) - manifest.scale_offset) / manifest.scale_divisor;
            let at = match manifest.layout {
                TensorLayout::ChannelsFirst => c * h * w + y * w + x,
                TensorLayout::ChannelsLast => (y * w + x) * 3 + c,
            };
            data[at] = v;
        }
    }
    Ok(ImageTensor {
        data,
        shape: manifest.tensor_shape(),
        manifest: *manifest,
    })
}

/// Decodes a JPEG/PNG file and preprocesses it.
pub fn load_image(path: &Path, manifest: &PreprocessManifest) -> Result<ImageTensor> {
    let decode = |message: String| Error::Decode {
        path: path.to_path_buf(),
        message,
    };
    let img = image::ImageReader::open(path)
        .map_err(|e| decode(e.to_string()))?
        .with_guessed_format()
        .map_err(|e| decode(e.to_string()))?
        .decode()
        .map_err(|e| decode(e.to_string()))?;
    preprocess_image(&img, manifest).map_err(|e| decode(e.to_string()))
}
