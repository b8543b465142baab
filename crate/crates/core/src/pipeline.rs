//! Frame-to-features composition of the imaging and geometry stages.
//!
//! Order: background subtraction on RGB, grayscale, Otsu binarization,
//! AND of both masks, Sobel edges, hull of the edge points, then area
//! features measured against the pre-edge foreground mask.

use serde::{Deserialize, Serialize};

use crate::geometry::{self, Hull, HullFeatures};
use crate::imaging::{self, BinaryImage, Frame, GrayImage, ImagingError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Summed RGB difference at which a pixel leaves the background.
    pub subtraction_k: u16,
    pub edge_level: u8,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            subtraction_k: imaging::DEFAULT_SUBTRACTION_K,
            edge_level: imaging::DEFAULT_EDGE_LEVEL,
        }
    }
}

/// Intermediate images and the measured hull for one frame.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub gray: GrayImage,
    pub otsu_level: u8,
    pub binarized: BinaryImage,
    pub subtraction: BinaryImage,
    pub foreground: BinaryImage,
    pub edges: BinaryImage,
    /// `None` when no edge pixel was found.
    pub hull: Option<Hull>,
    pub features: HullFeatures,
}

/// Hull and features of an edge map measured over a foreground mask.
pub fn measure(edges: &BinaryImage, foreground: &BinaryImage) -> (Option<Hull>, HullFeatures) {
    let points = geometry::extract_points(edges);
    match geometry::jarvis_hull(&points) {
        Ok(hull) => {
            let features = geometry::hull_features(&hull, foreground);
            (Some(hull), features)
        }
        Err(_) => (None, HullFeatures::default()),
    }
}

pub fn process_frame(
    background: &Frame,
    current: &Frame,
    cfg: &PipelineConfig,
) -> Result<PipelineOutput, ImagingError> {
    let subtraction = imaging::background_subtract(background, current, cfg.subtraction_k)?;
    let gray = imaging::to_grayscale(current);
    let otsu_level = imaging::otsu_level_or_fallback(&gray)?;
    let binarized = imaging::binarize(&gray, otsu_level);
    let foreground = subtraction.and(&binarized)?;
    let edges = imaging::sobel(&foreground, cfg.edge_level)?;
    let (hull, features) = measure(&edges, &foreground);
    Ok(PipelineOutput {
        gray,
        otsu_level,
        binarized,
        subtraction,
        foreground,
        edges,
        hull,
        features,
    })
}
