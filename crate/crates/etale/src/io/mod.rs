//! File formats: JSON instance schemas and DOT graph export.

pub mod dot;
pub mod json;
