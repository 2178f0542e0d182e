//! Exact elimination in classical groups, spinor norms and z-class counting.

pub mod field;
pub mod forms;
pub mod gauss;
pub mod generators;
pub mod linalg;
pub mod sample;
pub mod spinor;
pub mod polyclass;
pub mod zcount;
pub mod zbrute;
