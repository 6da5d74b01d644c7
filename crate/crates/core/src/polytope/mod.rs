//! Newton polyhedra at infinity and local Newton polyhedra.

mod global;
mod gtransform;
pub mod hull;
mod local;

pub use global::{face_support, FaceData, FaceVariant, GlobalNewtonPolytope};
pub(crate) use global::{check_index_set, exponent_point, point_exponent};
pub use gtransform::{g_m, g_transform_data, w_of, GTransform};
pub use hull::{Face, Facet, Hull};
pub use local::{LocalFacet, LocalNewtonPolytope};
