//! Quadrature, meshes, special functions, root finders and dense linear
//! algebra shared by every solver.

mod bessel;
mod legendre;
pub mod linalg;
mod mesh;
mod quadrature;
mod roots;

pub use bessel::sph_bessel_j;
pub use legendre::{legendre_p, MAX_LEGENDRE_L};
pub use mesh::{tangent_mapped_mesh, tangent_mapped_mesh_to, MomentumMesh, RadialGrid};
pub use quadrature::{composite_gauss_legendre, gauss_legendre};
pub use roots::{brent, muller, MullerOptions};
