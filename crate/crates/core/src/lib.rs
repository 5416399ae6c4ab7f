pub mod model;
pub mod xcsp;
pub mod generators;
pub mod engine;
pub mod harness;
pub mod cli;
