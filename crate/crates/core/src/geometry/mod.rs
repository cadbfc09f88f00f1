//! Perturbed half-plane geometry and its triangulation.

mod generate;
mod io;
mod locate;
mod mesh;
mod profile;

pub use generate::{generate_mesh, generate_mesh_with, MeshOptions};
pub use io::{format_mesh, parse_mesh, read_mesh, write_mesh};
pub use locate::{barycentric, interpolate, locate, Location, Locator};
pub use mesh::{norm, signed_area, BoundaryEdge, BoundaryTag, Mesh, MeshStats, Point, Region};
pub use profile::{build_surface_profile, HeightFn, ProfilePiece, ProfileSpec, SurfaceProfile};
