//! HTTP service and review log around the coding engine.

pub mod review;
pub mod server;
