pub mod geometry;
pub mod raster;
pub mod captions;
pub mod evaluator;
pub mod dataset;
pub mod scoring;
pub mod proactive;
pub mod cli;
