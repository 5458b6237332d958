use std::collections::BTreeSet;

use num_complex::Complex;
use num_traits::{One, Zero};
use proptest::prelude::*;
use ricalc_core::coefficients::{
    big_c, d_coeff, lagrange_identity_check, little_c, rho, two_block_unity,
};
use ricalc_core::{Exact, ExactMultiset};

fn rational() -> impl Strategy<Value = Exact> {
    (1i64..=60, 1i64..=12).prop_map(|(p, q)| Exact::new(p.into(), q.into()))
}

fn distinct_rationals(max: usize) -> impl Strategy<Value = Vec<Exact>> {
    prop::collection::btree_set(rational(), 1..=max)
        .prop_map(|s: BTreeSet<Exact>| s.into_iter().collect())
}

fn to_f64(v: &[Exact]) -> Vec<f64> {
    v.iter()
        .map(|r| ricalc_core::Scalar::to_f64_lossy(r))
        .collect()
}

proptest! {
    #[test]
    fn partition_of_unity(betas in distinct_rationals(12)) {
        prop_assert!(big_c(&betas).unwrap().sum().is_one());
        let c = big_c(&to_f64(&betas)).unwrap();
        prop_assert!((c.sum() - 1.0).abs() <= 1e-8 * c.max_abs());
    }

    #[test]
    fn rho_equals_big_c_on_distinct_sets(betas in distinct_rationals(8)) {
        let ms = ExactMultiset::from_values(betas.clone()).unwrap();
        let c = big_c(&ms.distinct_values()).unwrap();
        let r = rho(&ms);
        prop_assert_eq!(r.len(), c.len());
        for ((b, rb), (e, cv)) in r.iter().zip(c.exponents.iter().zip(&c.values)) {
            prop_assert_eq!(b, e);
            prop_assert_eq!(rb, cv);
        }
    }

    #[test]
    fn d_with_zero_power_is_big_c(betas in distinct_rationals(8), alpha in rational()) {
        prop_assume!(!betas.contains(&alpha));
        prop_assert_eq!(d_coeff(&betas, &alpha, 0).unwrap().values, big_c(&betas).unwrap().values);
    }

    #[test]
    fn two_block_bracket_is_one(alpha in rational(), gamma in rational(), k in 1u32..=8, l in 1u32..=8) {
        prop_assume!(alpha != gamma);
        prop_assert!(two_block_unity(&alpha, &gamma, k, l).unwrap().is_one());
    }

    #[test]
    fn little_c_recursions(betas in distinct_rationals(9)) {
        prop_assume!(betas.len() >= 2);
        let (last, head) = betas.split_last().unwrap();
        let short = little_c(head).unwrap();
        let long = little_c(&betas).unwrap();
        for (j, cj) in short.values.iter().enumerate() {
            prop_assert_eq!(cj.clone() / (last.clone() - head[j].clone()), long.values[j].clone());
        }
        let mut sum = Exact::zero();
        for (aj, cj) in head.iter().zip(&short.values) {
            sum += cj.clone() / (aj.clone() - last.clone());
        }
        prop_assert_eq!(&sum, long.values.last().unwrap());
    }

    #[test]
    fn lagrange_identity(
        nodes in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..=8)
            .prop_filter("pairwise gap 0.1", |v| {
                v.iter().enumerate().all(|(i, a)| v[i + 1..].iter().all(|b| (a.0 - b.0).hypot(a.1 - b.1) >= 0.1))
            }),
        z in (-3.0f64..3.0, -3.0f64..3.0),
    ) {
        let zs: Vec<Complex<f64>> = nodes.iter().map(|&(re, im)| Complex::new(re, im)).collect();
        let check = lagrange_identity_check(&zs, Complex::new(z.0, z.1)).unwrap();
        prop_assert!(check.relative() <= 1e-10, "{:?}", check);
    }
}
