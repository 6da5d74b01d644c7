use serde::Serialize;

use super::torus::SearchConfig;
use super::verdict::{nondegenerate_at_infinity, strongly_g_adapted, NondegeneracyVerdict, Status};
use crate::polyring::PolynomialSystem;
use crate::polytope::GlobalNewtonPolytope;
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Convenient components, non-degenerate at infinity.
    ConvenientNondegenerate,
    /// Strongly g-adapted to a convenient polyhedron.
    StronglyGAdapted,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Conclusion {
    CertifiedCompact,
    LikelyCompact,
    Unknown,
    WitnessNoncompactHint,
}

#[derive(Clone, Debug, Serialize)]
pub struct RouteReport {
    pub applicable: bool,
    pub reason: Option<String>,
    /// The polyhedron used by the g-adapted route.
    pub polyhedron: Option<GlobalNewtonPolytope>,
    pub verdict: Option<NondegeneracyVerdict>,
}

impl RouteReport {
    fn skipped(reason: String) -> Self {
        RouteReport {
            applicable: false,
            reason: Some(reason),
            polyhedron: None,
            verdict: None,
        }
    }

    fn status(&self) -> Option<Status> {
        self.verdict.as_ref().map(|v| v.status)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CompactnessCertificate {
    pub route: Route,
    pub conclusion: Conclusion,
    pub convenient_nondegenerate: RouteReport,
    pub strongly_g_adapted: RouteReport,
}

/// Polyhedron for the g-adapted route: `Γ̃(F)` when it is convenient,
/// otherwise the simplex `conv{0, d e_1, .., d e_n}` with `d = deg F`.
pub fn auto_polyhedron(f: &PolynomialSystem) -> Result<GlobalNewtonPolytope> {
    let gamma = GlobalNewtonPolytope::from_system(f)?;
    let d = f.degree().unwrap_or(0);
    if gamma.is_convenient() && gamma.max_degree() >= d {
        return Ok(gamma);
    }
    GlobalNewtonPolytope::simplex(f.nvars(), d.max(1))
}

/// Tries both compactness routes and combines their verdicts.
pub fn compactness_certificate(
    f: &PolynomialSystem,
    gamma: Option<&GlobalNewtonPolytope>,
    cfg: &SearchConfig,
) -> Result<CompactnessCertificate> {
    let non_convenient: Vec<usize> = f
        .components()
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .filter_map(|(i, p)| match GlobalNewtonPolytope::from_polynomial(p) {
            Ok(g) if g.is_convenient() => None,
            _ => Some(i + 1),
        })
        .collect();
    let route1 = if non_convenient.is_empty() {
        RouteReport {
            applicable: true,
            reason: None,
            polyhedron: None,
            verdict: Some(nondegenerate_at_infinity(f, cfg)?),
        }
    } else {
        RouteReport::skipped(format!("components {non_convenient:?} are not convenient"))
    };

    let chosen = match gamma {
        Some(g) => g.clone(),
        None => auto_polyhedron(f)?,
    };
    let route2 = if !chosen.is_convenient() {
        RouteReport::skipped("polyhedron is not convenient".to_string())
    } else if f.degree().unwrap_or(0) > chosen.max_degree() {
        RouteReport::skipped(format!(
            "degree {} exceeds M = {}",
            f.degree().unwrap_or(0),
            chosen.max_degree()
        ))
    } else {
        let verdict = strongly_g_adapted(f, &chosen, cfg)?;
        RouteReport {
            applicable: true,
            reason: None,
            polyhedron: Some(chosen),
            verdict: Some(verdict),
        }
    };

    let s1 = route1.status();
    let s2 = route2.status();
    let certified = Some(Status::CertifiedNondegenerate);
    let (route, conclusion) = if s1 == certified {
        (Route::ConvenientNondegenerate, Conclusion::CertifiedCompact)
    } else if s2 == certified {
        (Route::StronglyGAdapted, Conclusion::CertifiedCompact)
    } else if s1 == Some(Status::LikelyNondegenerate) {
        (Route::ConvenientNondegenerate, Conclusion::LikelyCompact)
    } else if s2 == Some(Status::LikelyNondegenerate) {
        (Route::StronglyGAdapted, Conclusion::LikelyCompact)
    } else if s1 == Some(Status::Degenerate) || s2 == Some(Status::Degenerate) {
        (Route::None, Conclusion::WitnessNoncompactHint)
    } else {
        (Route::None, Conclusion::Unknown)
    };
    Ok(CompactnessCertificate {
        route,
        conclusion,
        convenient_nondegenerate: route1,
        strongly_g_adapted: route2,
    })
}
