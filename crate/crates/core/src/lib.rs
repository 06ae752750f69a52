pub mod calculus;
pub mod csv;
pub mod error;
pub mod experiment;
pub mod lab;
pub mod ladder;
pub mod ladder_measure;
pub mod ladder_sim;
pub mod measure;
pub mod numerics;
pub mod parallel;
pub mod path;
pub mod presets;
pub mod rng;
pub mod stats;
pub mod subordinator;
pub mod walk;
