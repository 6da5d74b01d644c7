mod common;

use common::*;
use num_traits::{ToPrimitive, Zero};
use polyopt::nondegen::{coordinate_restriction, euler_component, principal_part_global};
use polyopt::polyring::{rat, Polynomial, Rational};
use polyopt::polytope::{face_support, FaceVariant};
use proptest::prelude::*;

fn integer_weights(n: usize) -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::vec(-3i64..=4, n).prop_filter("some positive entry", |w| w.iter().any(|&v| v > 0))
}

fn instance() -> impl Strategy<Value = (Polynomial, Vec<i64>)> {
    (1usize..=3).prop_flat_map(|n| (nonzero_polynomial_in(n, 6, 4), integer_weights(n)))
}

fn rationals(w: &[i64]) -> Vec<Rational> {
    w.iter().map(|&v| rat(v)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn weighted_euler_identity((f, w) in instance()) {
        let wr = rationals(&w);
        let fw = principal_part_global(&f, &[wr.clone()]).unwrap();
        let m = face_support(&f, &wr, FaceVariant::Support).unwrap().value;
        let mut lhs = Polynomial::zero(f.nvars());
        for (i, wi) in wr.iter().enumerate() {
            lhs = &lhs + &euler_component(&fw, i).scale(wi);
        }
        prop_assert_eq!(lhs, fw.scale(&m));
    }

    #[test]
    fn principal_parts_are_quasi_homogeneous((f, w) in instance(), t in 0.5f64..2.0, x in point(3, 1.5)) {
        let wr = rationals(&w);
        let fw = principal_part_global(&f, &[wr.clone()]).unwrap();
        let m = face_support(&f, &wr, FaceVariant::Support).unwrap().value.to_f64().unwrap();
        let x = &x[..f.nvars()];
        let scaled: Vec<f64> = x.iter().zip(&w).map(|(xi, &wi)| t.powi(wi as i32) * xi).collect();
        let lhs = fw.evaluate(&scaled).unwrap();
        let rhs = t.powf(m) * fw.evaluate(x).unwrap();
        let scale = 1.0 + fw.compile().abs_scale(&scaled) + t.powf(m) * fw.compile().abs_scale(x);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale, "{} vs {}", lhs, rhs);
    }

    /// Pushing the removed coordinates far down selects the same terms as
    /// restricting first: `(f_I)_{w'} = (f_{W(w')})_I`.
    #[test]
    fn restriction_commutes_with_principal_parts(
        (f, removed, w) in (2usize..=3).prop_flat_map(|n| (
            nonzero_polynomial_in(n, 6, 3),
            proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 1..n),
            integer_weights(n),
        ))
    ) {
        let restricted = coordinate_restriction(&f, &removed).unwrap();
        prop_assume!(!restricted.is_zero());
        let kept: Vec<usize> = (0..f.nvars()).filter(|i| !removed.contains(i)).collect();
        let w_kept: Vec<Rational> = kept.iter().map(|&i| rat(w[i])).collect();
        prop_assume!(w_kept.iter().any(|v| *v > Rational::zero()));
        let lhs = principal_part_global(&restricted, &[w_kept.clone()]).unwrap();

        let mut big_w = vec![Rational::zero(); f.nvars()];
        for (k, &i) in kept.iter().enumerate() {
            big_w[i] = w_kept[k].clone();
        }
        let values: Vec<Rational> = f.support().iter().map(|e| e.pairing(&big_w)).collect();
        let spread = values.iter().max().unwrap() - values.iter().min().unwrap();
        let push = -(spread + rat(1));
        for &i in &removed {
            big_w[i] = push.clone();
        }
        let rhs = coordinate_restriction(&principal_part_global(&f, &[big_w]).unwrap(), &removed).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
