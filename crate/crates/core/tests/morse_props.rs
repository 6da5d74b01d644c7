mod common;

use common::*;
use num_traits::ToPrimitive;
use polyopt::morse::{critical_points, morse_report, Classification, MorseConfig, SearchBox};
use polyopt::polyring::{rat, Exponent, Polynomial, Rational};
use proptest::prelude::*;

/// `f` with `f' = Π (x − r_i)`, integrated exactly.
fn with_critical_points(roots: &[Rational]) -> Polynomial {
    let x = Polynomial::variable(1, 0);
    let mut d = Polynomial::one(1);
    for r in roots {
        d = &d * &(&x - &Polynomial::constant(1, r.clone()));
    }
    let mut f = Polynomial::zero(1);
    for (e, c) in d.terms() {
        let k = e.entries()[0] + 1;
        f.add_term(Exponent::new(vec![k]), c / rat(i64::from(k)));
    }
    f
}

fn distinct_roots() -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::btree_set(-12i64..=12, 1..=4).prop_map(|s| s.into_iter().map(|v| ratio(v, 4)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn univariate_critical_points_match_the_constructed_roots(roots in distinct_roots()) {
        let f = with_critical_points(&roots);
        let cfg = MorseConfig::default();
        let pts = critical_points(&f, &SearchBox::cube(1, 10.0).unwrap(), &cfg).unwrap();
        prop_assert_eq!(pts.len(), roots.len());
        for (p, r) in pts.iter().zip(&roots) {
            prop_assert!((p.location[0] - r.to_f64().unwrap()).abs() <= 1e-9);
            prop_assert!(p.gradient_norm <= 10.0 * cfg.gradient_tolerance);
            // Simple roots of f' are nondegenerate; the sign of f'' alternates.
            prop_assert!(p.classification != Classification::Degenerate);
        }
    }

    #[test]
    fn hessian_spectra_and_minima_are_consistent(
        f in (1usize..=2).prop_flat_map(|n| nonzero_polynomial_in(n, 5, 4)).prop_filter("nonconstant", |f| !f.is_constant()),
        seed in proptest::collection::vec(-1.0f64..1.0, 2),
    ) {
        let n = f.nvars();
        let cfg = MorseConfig { starts: 48, ..MorseConfig::default() };
        let bx = SearchBox::cube(n, 3.0).unwrap();
        let report = morse_report(&f, &bx, &cfg).unwrap();
        let hess = f.hessian();
        for p in &report.points {
            let g: f64 = f.gradient().iter().map(|d| d.evaluate(&p.location).unwrap().powi(2)).sum::<f64>().sqrt();
            prop_assert!(g <= 10.0 * cfg.gradient_tolerance * (1.0 + f.compile().abs_scale(&p.location)));
            let trace: f64 = (0..n).map(|i| hess[i][i].evaluate(&p.location).unwrap()).sum();
            let sum: f64 = p.hessian_eigenvalues.iter().sum();
            prop_assert!((trace - sum).abs() <= 1e-8 * (1.0 + trace.abs()));
            for i in 0..n {
                for j in 0..n {
                    prop_assert_eq!(&hess[i][j], &hess[j][i]);
                }
            }
            if p.classification == Classification::NondegenerateMin {
                let norm = seed[..n].iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-3);
                let eps = 1e-4;
                let q: Vec<f64> = p.location.iter().zip(&seed).map(|(x, u)| x + eps * u / norm).collect();
                prop_assert!(f.evaluate(&q).unwrap() >= p.value - 1e-12 * (1.0 + p.value.abs()));
            }
        }
    }
}
