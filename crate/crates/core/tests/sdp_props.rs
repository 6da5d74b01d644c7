mod common;

use common::*;
use polyopt::linalg::Mat;
use polyopt::sdp::{parse_sdpa, solve_lmi, write_sdpa, Block, LmiProblem, SdpConfig, SdpStatus};
use proptest::prelude::*;

fn symmetric() -> impl Strategy<Value = Mat> {
    (2usize..=3).prop_flat_map(|n| {
        proptest::collection::vec(-6i32..=6, n * n).prop_map(move |v| {
            let mut m = Mat::from_fn(n, n, |i, j| f64::from(v[i * n + j]) / 2.0);
            m.symmetrize();
            m
        })
    })
}

/// `maximize t  s.t.  A − t I ⪰ 0` (value `λ_min`) or
/// `maximize −t  s.t.  t I − A ⪰ 0` (value `−λ_max`).
fn eigenvalue_sdp(a: &Mat, upper: bool) -> (LmiProblem, f64) {
    let n = a.rows();
    let (lo, hi) = extreme_eigenvalues(a);
    let mut p = LmiProblem::new(1);
    if upper {
        p.blocks.push(Block::from_dense(&a.scaled(-1.0), &[Mat::identity(n)]).unwrap());
        p.objective = vec![-1.0];
        (p, -hi)
    } else {
        p.blocks.push(Block::from_dense(a, &[Mat::identity(n).scaled(-1.0)]).unwrap());
        p.objective = vec![1.0];
        (p, lo)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn analytic_eigenvalue_sdps(a in symmetric(), upper in any::<bool>()) {
        let (p, expected) = eigenvalue_sdp(&a, upper);
        let sol = solve_lmi(&p, &SdpConfig::default()).unwrap();
        prop_assert_eq!(sol.status, SdpStatus::Optimal);
        prop_assert!((sol.objective - expected).abs() <= 1e-7, "{} vs {}", sol.objective, expected);
        // Maximization: the primal value never exceeds the dual one beyond the gap.
        prop_assert!(sol.objective <= sol.dual_objective + 1e-7);
        prop_assert!(sol.gap <= 1e-7);
        prop_assert!(min_eig(&p.blocks[0].evaluate(&sol.z)) >= -1e-8);
    }

    #[test]
    fn two_variable_sdps_with_closed_form_optima(a in 0.5f64..3.0, c in -2.0f64..2.0) {
        // maximize −y₂ − c y₁  s.t.  [[a, y₁], [y₁, y₂]] ⪰ 0: y₂ ≥ y₁²/a, optimum c² a / 4.
        let mut p = LmiProblem::new(2);
        let mut e01 = Mat::zeros(2, 2);
        e01[(0, 1)] = 1.0;
        e01[(1, 0)] = 1.0;
        let mut e11 = Mat::zeros(2, 2);
        e11[(1, 1)] = 1.0;
        p.blocks.push(Block::from_dense(&Mat::diag(&[a, 0.0]), &[e01, e11]).unwrap());
        p.objective = vec![-c, -1.0];
        let sol = solve_lmi(&p, &SdpConfig::default()).unwrap();
        prop_assert_eq!(sol.status, SdpStatus::Optimal);
        prop_assert!((sol.objective - c * c * a / 4.0).abs() <= 1e-7);
        prop_assert!(sol.objective <= sol.dual_objective + 1e-7);
        prop_assert!(min_eig(&p.blocks[0].evaluate(&sol.z)) >= -1e-8);
    }

    #[test]
    fn solves_are_deterministic(a in symmetric(), upper in any::<bool>()) {
        let (p, _) = eigenvalue_sdp(&a, upper);
        let first = solve_lmi(&p, &SdpConfig::default()).unwrap();
        let second = solve_lmi(&p, &SdpConfig::default()).unwrap();
        prop_assert_eq!(first.status, second.status);
        prop_assert_eq!(first.objective.to_bits(), second.objective.to_bits());
        prop_assert_eq!(first.z, second.z);
    }

    #[test]
    fn sdpa_round_trip_resolves_to_the_same_value(a in symmetric(), upper in any::<bool>()) {
        let (p, _) = eigenvalue_sdp(&a, upper);
        let text = write_sdpa(&p).unwrap();
        let q = parse_sdpa(&text).unwrap();
        prop_assert_eq!(write_sdpa(&q).unwrap(), text);
        let (x, y) = (solve_lmi(&p, &SdpConfig::default()).unwrap(), solve_lmi(&q, &SdpConfig::default()).unwrap());
        prop_assert!((x.objective - y.objective).abs() <= 1e-9);
    }
}

/// Once the iterate nears the boundary, the embedding's Schur complement used to cancel to exactly zero.
#[test]
fn eigenvalue_sdp_near_the_boundary() {
    let d = [-2.5, -1.0, 1.5, -1.0, -2.0, -0.75, 1.5, -0.75, 2.0];
    let a = Mat::from_fn(3, 3, |i, j| d[i * 3 + j]);
    let (p, expected) = eigenvalue_sdp(&a, false);
    let sol = solve_lmi(&p, &SdpConfig::default()).unwrap();
    assert_eq!(sol.status, SdpStatus::Optimal);
    assert!((sol.objective - expected).abs() <= 1e-7);
}
