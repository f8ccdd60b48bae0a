pub mod channel;
pub mod entropy;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod guard;
pub mod linalg;
pub mod parallel;
pub mod random;
