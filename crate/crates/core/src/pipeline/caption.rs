use crate::error::CaptionError;
use crate::sampler::Clip;

/// Allowed deviation of an attention row's sum from 1.
pub const ATTENTION_TOLERANCE: f64 = 1e-4;

/// Spatial attention for one frame: non-negative weights over the grid
/// locations, summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionMap {
    pub weights: Vec<f64>,
}

impl AttentionMap {
    pub fn new(weights: Vec<f64>) -> Result<Self, String> {
        if weights.is_empty() {
            return Err("empty attention row".into());
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(format!("weight {w} is negative or not finite"));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > ATTENTION_TOLERANCE {
            return Err(format!("weights sum to {sum}, expected 1"));
        }
        Ok(AttentionMap { weights })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CaptionResult {
    pub tokens: Vec<String>,
    /// One map per clip frame when the captioner provides attention.
    pub attention: Option<Vec<AttentionMap>>,
}

/// Anything that turns a clip into command tokens.
pub trait Captioner {
    fn caption(&mut self, clip: &Clip) -> Result<CaptionResult, CaptionError>;
}

impl<C: Captioner + ?Sized> Captioner for Box<C> {
    fn caption(&mut self, clip: &Clip) -> Result<CaptionResult, CaptionError> {
        (**self).caption(clip)
    }
}

/// Checks attention rows against `clip`: one row per frame, each a valid
/// [`AttentionMap`].
pub fn validate_attention(
    rows: Vec<Vec<f64>>,
    clip: &Clip,
) -> Result<Vec<AttentionMap>, CaptionError> {
    if rows.len() != clip.len() {
        return Err(CaptionError::Malformed(format!(
            "{} attention rows for a {}-frame clip",
            rows.len(),
            clip.len()
        )));
    }
    rows.into_iter()
        .zip(clip.frames())
        .map(|(row, frame)| {
            AttentionMap::new(row).map_err(|message| CaptionError::Attention {
                frame: frame.index,
                message,
            })
        })
        .collect()
}
