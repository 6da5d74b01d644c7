//! Principal parts, non-degeneracy conditions and compactness certificates.

mod compact;
mod principal;
mod torus;
mod verdict;

pub use compact::{auto_polyhedron, compactness_certificate, CompactnessCertificate, Conclusion, Route, RouteReport};
pub use principal::{coordinate_restriction, euler_component, principal_part_global, principal_part_local};
pub use torus::{check_witness, fast_path, torus_zero, SearchConfig, TorusOutcome};
pub use verdict::{
    khovanskii_nondegenerate, nondegenerate_at_infinity, strongly_g_adapted, FaceCheck, NondegeneracyVerdict,
    SearchReport, Status, MAX_NVARS, MAX_NVARS_G_ADAPTED,
};
