//! Momentum-space two-body scattering with complex scaling: poles,
//! residues, wave functions and compositeness.

pub mod error;
pub mod kinematics;
pub mod numerics;
pub mod potential;
pub mod presets;
pub mod scattering;
pub mod spectrum;
pub mod structure;
pub mod unstable;
pub mod verify;

pub use error::{Error, Result};
pub use kinematics::{Channel, KinematicsMode, Sheet, HBARC};
pub use numerics::{tangent_mapped_mesh, tangent_mapped_mesh_to, MomentumMesh, RadialGrid};
