pub mod assemble;
pub mod chart;
pub mod cli;
pub mod data;
pub mod diag;
pub mod expr;
pub mod geom;
pub mod pipeline;
pub mod placement;
pub mod render;
pub mod resolve;
pub mod scene;
pub mod spec;
pub mod svgpath;
