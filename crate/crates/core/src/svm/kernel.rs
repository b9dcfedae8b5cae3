use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    Linear,
    Polynomial { degree: u32 },
    Gaussian,
}

/// A kernel with a single length scale `sigma`:
///
/// * linear: `x.y / sigma^2`
/// * polynomial: `(1 + x.y / sigma^2)^degree`
/// * gaussian: `exp(-|x - y|^2 / sigma^2)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub scale: f64,
    pub dimension: usize,
}

impl KernelSpec {
    /// Kernel with the default scale `sqrt(dimension)`.
    pub fn new(kind: KernelKind, dimension: usize) -> Result<Self> {
        Self::with_scale(kind, dimension, (dimension as f64).sqrt())
    }

    pub fn with_scale(kind: KernelKind, dimension: usize, scale: f64) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Contract("kernel dimension must be positive".into()));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Contract(format!(
                "kernel scale {scale} must be positive"
            )));
        }
        if let KernelKind::Polynomial { degree } = kind {
            if !(2..=3).contains(&degree) {
                return Err(Error::Contract(format!(
                    "polynomial degree {degree} not supported (2 or 3)"
                )));
            }
        }
        Ok(Self {
            kind,
            scale,
            dimension,
        })
    }

    pub fn linear(dimension: usize) -> Self {
        Self::new(KernelKind::Linear, dimension).expect("valid kernel")
    }

    pub fn quadratic(dimension: usize) -> Self {
        Self::new(KernelKind::Polynomial { degree: 2 }, dimension).expect("valid kernel")
    }

    pub fn cubic(dimension: usize) -> Self {
        Self::new(KernelKind::Polynomial { degree: 3 }, dimension).expect("valid kernel")
    }

    pub fn gaussian(dimension: usize) -> Self {
        Self::new(KernelKind::Gaussian, dimension).expect("valid kernel")
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        Error::check_dim(self.dimension, x.len())?;
        Error::check_dim(self.dimension, y.len())?;
        Ok(self.eval_unchecked(x, y))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        let inv_s2 = 1.0 / (self.scale * self.scale);
        match self.kind {
            KernelKind::Linear => dot(x, y) * inv_s2,
            KernelKind::Polynomial { degree } => (1.0 + dot(x, y) * inv_s2).powi(degree as i32),
            KernelKind::Gaussian => {
                let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                (-d2 * inv_s2).exp()
            }
        }
    }

    pub fn describe(&self) -> String {
        let name = match self.kind {
            KernelKind::Linear => "linear".to_string(),
            KernelKind::Polynomial { degree: 2 } => "quadratic".to_string(),
            KernelKind::Polynomial { degree: 3 } => "cubic".to_string(),
            KernelKind::Polynomial { degree } => format!("polynomial{degree}"),
            KernelKind::Gaussian => "gaussian".to_string(),
        };
        format!("{name}(sigma={})", self.scale)
    }
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}
