use num_traits::One;
use proptest::prelude::*;
use ricalc_core::product_law::{
    build_law_ordered, case_law, pdf_cdf_product_expansion, repeated_cdf_gamma, sample, CaseSpec,
};
use ricalc_core::quadrature::AdaptiveQuadrature;
use ricalc_core::{build_law, BetaMultiset, ClosedFormLaw, Exact, ExactMultiset, Multiset64};

/// Multisets of quarter-integer exponents in `[0.5, 10]` with at most `max` elements.
fn multiset(max: usize) -> impl Strategy<Value = Vec<(i64, u32)>> {
    prop::collection::vec((2i64..=40, 1u32..=3), 1..=max)
        .prop_map(move |mut v| {
            let mut total = 0;
            v.retain(|&(_, m)| {
                total += m as usize;
                total <= max
            });
            v
        })
        .prop_filter("non-empty", |v| !v.is_empty())
}

fn float_multiset(entries: &[(i64, u32)]) -> Multiset64 {
    BetaMultiset::new(entries.iter().map(|&(i, m)| (i as f64 / 4.0, m))).unwrap()
}

/// Rounding scale of float evaluations: `eps` times the summed absolute term mass.
fn noise(law: &ClosedFormLaw<f64>) -> f64 {
    f64::EPSILON * law.absolute_mass().unwrap()
}

fn exact_multiset(entries: &[(i64, u32)]) -> ExactMultiset {
    BetaMultiset::new(
        entries
            .iter()
            .map(|&(i, m)| (Exact::new(i.into(), 4.into()), m)),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn density_integrates_to_one(entries in multiset(8)) {
        let law = build_law(&float_multiset(&entries));
        let floor = 64.0 * noise(&law);
        let est = law.integrate_against(|_| 1.0, &AdaptiveQuadrature::new(1e-11 + floor)).unwrap();
        prop_assert!((est.value - 1.0).abs() <= 1e-9 + floor, "{}", est.value);
    }

    #[test]
    fn exact_mass_is_one(entries in multiset(8)) {
        prop_assert!(build_law(&exact_multiset(&entries)).total_mass().unwrap().is_one());
    }

    #[test]
    fn cdf_is_monotone(entries in multiset(8)) {
        let law = build_law(&float_multiset(&entries));
        let slack = 1e-15 + 8.0 * noise(&law);
        let mut prev = 0.0;
        for i in 0..=10_000 {
            let f = law.cdf(i as f64 / 10_000.0);
            prop_assert!(f >= prev - slack, "cdf drops at {} by {:e}", i, prev - f);
            prev = f;
        }
        prop_assert_eq!(law.cdf(1.0), 1.0);
    }

    #[test]
    fn cdf_derivative_matches_pdf(entries in multiset(5), t in 0.01f64..0.99) {
        let law = build_law(&float_multiset(&entries));
        let h = 1e-6;
        let fd = (law.cdf(t + h) - law.cdf(t - h)) / (2.0 * h);
        let pdf = law.pdf(t).unwrap();
        let tol = 1e-6 * pdf.abs().max(1.0) + 8.0 * noise(&law) / h;
        prop_assert!((fd - pdf).abs() <= tol, "fd {} pdf {} tolerance {:e}", fd, pdf, tol);
    }

    #[test]
    fn insertion_order_is_irrelevant(values in prop::collection::vec(2i64..=40, 1..=6).prop_shuffle()) {
        let exact: Vec<Exact> = values.iter().map(|&i| Exact::new(i.into(), 4.into())).collect();
        let mut sorted = exact.clone();
        sorted.sort();
        let a = build_law_ordered(&exact).unwrap();
        let b = build_law_ordered(&sorted).unwrap();
        prop_assert_eq!(a.terms(), b.terms());
    }

    #[test]
    fn block_formulas_equal_builder(
        idx in prop::sample::subsequence((2i64..=40).collect::<Vec<_>>(), 5).prop_shuffle(),
        m in 1u32..=4,
        l in 1u32..=4,
        n in 1usize..=3,
    ) {
        let q = |i: i64| Exact::new(i.into(), 4.into());
        let betas: Vec<Exact> = idx[..n].iter().map(|&i| q(i)).collect();
        let specs = [
            CaseSpec::DistinctPlusBlock { betas: betas.clone(), alpha: q(idx[3]), m },
            CaseSpec::TwoBlocks { alpha: q(idx[3]), k: m, gamma: q(idx[4]), l },
            CaseSpec::DistinctPlusTwoBlocks { betas, alpha: q(idx[3]), m, gamma: q(idx[4]), l },
        ];
        for spec in specs {
            let built = build_law(&spec.multiset().unwrap());
            let case = case_law(&spec).unwrap();
            prop_assert_eq!(case.terms(), built.terms());
        }
    }

    #[test]
    fn product_expansion_matches_pointwise_product(
        a in (-20i64..=20).prop_filter("nonzero", |v| *v != 0),
        b in (-20i64..=20).prop_filter("nonzero", |v| *v != 0),
        p in 1u32..=4,
        q in 1u32..=4,
    ) {
        prop_assume!(a + b != 0);
        let (a, b) = (a as f64 / 4.0, b as f64 / 4.0);
        let expansion = pdf_cdf_product_expansion(&a, p, &b, q).unwrap();
        let f = ClosedFormLaw::repeated_density(a, p).unwrap();
        let g = ClosedFormLaw::repeated_density(b, q).unwrap();
        for i in 1..=100 {
            let x = 0.05 + 0.95 * i as f64 / 100.0;
            let direct = f.pdf(x).unwrap() * g.primitive(x);
            let expanded = expansion.pdf(x).unwrap();
            prop_assert!((direct - expanded).abs() <= 1e-10 * direct.abs().max(1.0), "x {}: {} vs {}", x, direct, expanded);
        }
    }
}

#[test]
fn repeated_blocks_match_incomplete_gamma() {
    for alpha in [0.5, 1.0, 3.0] {
        for m in 1..=10 {
            let law = build_law(&Multiset64::repeated(alpha, m).unwrap());
            for i in 1..=50 {
                let t = i as f64 / 50.0;
                let diff = (law.cdf(t) - repeated_cdf_gamma(m, alpha, t).unwrap()).abs();
                assert!(diff <= 1e-12, "{alpha}x{m} at {t}: {diff:e}");
            }
        }
    }
}

#[test]
fn sampler_meets_dkw_bound() {
    for (stream, text) in ["0.5,2", "1x2,3", "0.7,1.3x2,4"].iter().enumerate() {
        let ms: Multiset64 = text.parse().unwrap();
        let law = build_law(&ms);
        let batch = sample(&ms, 1_000_000, 2024, stream as u64).unwrap();
        let d = batch.ks_distance(|t| law.cdf(t));
        assert!(d <= 0.002, "{text}: {d}");
    }
}
