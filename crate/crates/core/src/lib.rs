pub mod collision_lab;
pub mod commands;
pub mod error;
pub mod geodesic_flow;
pub mod jm_metric;
pub mod numerics;
pub mod ode;
pub mod output;
pub mod realizer;
pub mod shape_geometry;
pub mod syzygy;
pub mod vec3;

pub use error::{Error, Result};
