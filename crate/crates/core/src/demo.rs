//! The bundled 60-frame demo: a manipulator grasps a plastic bottle, holds
//! it while pouring into a glass cup, then releases it.

use crate::pipeline::AnnotationTrack;
use crate::sampler::{parse_manifest, Frame, DEFAULT_FPS};

pub const MANIFEST: &str = include_str!("../data/demo/manifest.txt");
pub const ANNOTATIONS: &str = include_str!("../data/demo/annotations.txt");

pub fn frames() -> Vec<Frame> {
    parse_manifest(MANIFEST, DEFAULT_FPS).expect("bundled manifest is valid")
}

pub fn track() -> AnnotationTrack {
    AnnotationTrack::parse(ANNOTATIONS).expect("bundled annotations are valid")
}
