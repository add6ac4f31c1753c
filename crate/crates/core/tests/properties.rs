//! Property tests of the similarity layer, checked against the brute-force
//! oracles on small inputs and as invariants on larger random ones.

mod common;

use common::{
    dtw_path_oracle, hetero_schema, lcss_chain_oracle, lcss_memo_oracle, random_hetero_series,
};
use motifminer_core::schema::{ParameterSchema, Series, Stage, Value};
use motifminer_core::{
    build_symbol_tables, dtw_distance, lcss_count, lcss_distance, mindist, point_distance,
    LcssParams,
};
use proptest::prelude::*;

fn series_1d(values: Vec<f64>) -> Series {
    let schema = vec![ParameterSchema::quantitative("x", 0.0, 1.0)];
    let rows = values.iter().map(|&v| vec![Value::Real(v)]).collect();
    Series::new(
        schema,
        (0..values.len()).map(|i| i as f64).collect(),
        rows,
        Stage::Normalized,
    )
}

fn hetero_params(quant_epsilon: f64, delta: usize) -> LcssParams {
    LcssParams::for_schema(&hetero_schema(), quant_epsilon, delta).unwrap()
}

fn arb_rows(max_len: usize) -> impl Strategy<Value = Vec<(u32, u32, f64)>> {
    prop::collection::vec(
        (1u32..=4, 1u32..=3, (0u32..=100).prop_map(|x| x as f64 / 100.0)),
        1..=max_len,
    )
}

fn build(rows: &[(u32, u32, f64)]) -> Series {
    Series::new(
        hetero_schema(),
        (0..rows.len()).map(|i| i as f64 * 60.0).collect(),
        rows.iter()
            .map(|&(m, p, x)| vec![Value::Code(m), Value::Code(p), Value::Real(x)])
            .collect(),
        Stage::Normalized,
    )
}

proptest! {
    #[test]
    fn point_distance_is_bounded_symmetric_and_reflexive(
        a in 1u32..=4, b in 1u32..=4,
        oa in 1u32..=3, ob in 1u32..=3,
        xa in 0.0f64..=1.0, xb in 0.0f64..=1.0,
    ) {
        for (va, vb, schema) in [
            (Value::Code(a), Value::Code(b), ParameterSchema::unordered("m", 4)),
            (Value::Code(oa), Value::Code(ob), ParameterSchema::ordered("p", 3)),
            (Value::Real(xa), Value::Real(xb), ParameterSchema::quantitative("x", 0.0, 1.0)),
        ] {
            let d = point_distance(va, vb, &schema);
            let back = point_distance(vb, va, &schema);
            prop_assert!((0.0..=1.0).contains(&d));
            prop_assert_eq!(d, back);
            prop_assert_eq!(point_distance(va, va, &schema), 0.0);
        }
    }

    #[test]
    fn lcss_is_symmetric_and_bounded(
        a in arb_rows(10), b in arb_rows(10),
        delta in 0usize..4, eps in 1u32..9,
    ) {
        let (sa, sb) = (build(&a), build(&b));
        let p = hetero_params(eps as f64 / 10.0, delta);
        let ab = lcss_count(&sa, &sb, &p).unwrap();
        let ba = lcss_count(&sb, &sa, &p).unwrap();
        prop_assert_eq!(ab, ba);
        prop_assert!(ab <= sa.len().min(sb.len()));
        let d = lcss_distance(&sa, &sb, &p).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(lcss_distance(&sa, &sa, &p).unwrap(), 0.0);
    }

    #[test]
    fn lcss_monotone_in_delta_and_epsilon(
        a in arb_rows(8), b in arb_rows(8),
        delta in 1usize..4, eps in 2u32..8,
    ) {
        let (sa, sb) = (build(&a), build(&b));
        let wide = hetero_params(eps as f64 / 10.0, delta);
        let narrow_delta = hetero_params(eps as f64 / 10.0, delta - 1);
        let narrow_eps = hetero_params((eps - 1) as f64 / 10.0, delta);
        let base = lcss_count(&sa, &sb, &wide).unwrap();
        prop_assert!(lcss_count(&sa, &sb, &narrow_delta).unwrap() <= base);
        prop_assert!(lcss_count(&sa, &sb, &narrow_eps).unwrap() <= base);
    }

    #[test]
    fn lcss_matches_both_oracles_on_small_inputs(
        a in arb_rows(6), b in arb_rows(6),
        delta in 0usize..3, eps in 1u32..9,
    ) {
        let (sa, sb) = (build(&a), build(&b));
        let p = hetero_params(eps as f64 / 10.0, delta);
        let dp = lcss_count(&sa, &sb, &p).unwrap();
        prop_assert_eq!(dp, lcss_chain_oracle(&sa, &sb, &p));
        prop_assert_eq!(dp, lcss_memo_oracle(&sa, &sb, &p));
    }

    #[test]
    fn dtw_matches_path_enumeration_on_small_inputs(
        a in arb_rows(5), b in arb_rows(5),
    ) {
        let (sa, sb) = (build(&a), build(&b));
        let dp = dtw_distance(&sa, &sb).unwrap();
        let oracle = dtw_path_oracle(&sa, &sb);
        prop_assert!((dp - oracle).abs() < 1e-9, "dp {} oracle {}", dp, oracle);
    }

    #[test]
    fn mindist_lower_bounds_the_one_dimensional_distance(
        values in prop::collection::vec((0u32..=100).prop_map(|x| x as f64 / 100.0), 2..12),
        other in prop::collection::vec((0u32..=100).prop_map(|x| x as f64 / 100.0), 2..12),
    ) {
        let n = values.len().min(other.len());
        let q = series_1d(values[..n].to_vec());
        let c = series_1d(other[..n].to_vec());
        let schema = vec![
            ParameterSchema::quantitative("x", 0.0, 1.0).with_breakpoints(vec![0.25, 0.5, 0.75]),
        ];
        let tables = build_symbol_tables(&schema).unwrap();
        let code = |v: f64| 1 + [0.25, 0.5, 0.75].iter().filter(|&&b| b <= v).count() as u32;
        let qw: Vec<Vec<u32>> = q.rows.iter().map(|r| vec![code(r[0].as_f64())]).collect();
        let cw: Vec<Vec<u32>> = c.rows.iter().map(|r| vec![code(r[0].as_f64())]).collect();
        let md = mindist(&qw, &cw, n, &tables).unwrap();
        let true_dist: f64 = q
            .rows
            .iter()
            .zip(&c.rows)
            .map(|(a, b)| {
                let d = a[0].as_f64() - b[0].as_f64();
                d * d
            })
            .sum::<f64>()
            .sqrt();
        prop_assert!(md <= true_dist + 1e-12, "mindist {} exceeds true {}", md, true_dist);
    }

    #[test]
    fn outlier_substitution_changes_count_by_at_most_k(
        rows in arb_rows(12),
        k_seed in 0usize..100,
    ) {
        // Base quantitative values stay in [0, 0.5] so a substituted 0.99
        // breaks the epsilon test against every possible partner.
        let mut base = rows.clone();
        for r in &mut base {
            r.2 /= 2.0;
        }
        let sa = build(&base);
        let k = (k_seed % base.len()).min(3);
        let mut noisy = base.clone();
        for t in 0..k {
            let idx = (k_seed * 7 + t * 13) % base.len();
            noisy[idx].2 = 0.99;
        }
        let sb = build(&noisy);
        let p = hetero_params(0.4, 3);
        let full = lcss_count(&sa, &sa, &p).unwrap();
        let perturbed = lcss_count(&sa, &sb, &p).unwrap();
        prop_assert!(full - perturbed <= k, "lost {} > k = {}", full - perturbed, k);
    }
}

#[test]
fn dp_equals_memo_recursion_exhaustively_to_length_8() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..400 {
        use rand::Rng;
        let la = rng.random_range(1..=8);
        let lb = rng.random_range(1..=8);
        let a = random_hetero_series(&mut rng, la);
        let b = random_hetero_series(&mut rng, lb);
        let delta = rng.random_range(0..=4);
        let eps = rng.random_range(1..=9) as f64 / 10.0;
        let p = hetero_params(eps, delta);
        assert_eq!(
            lcss_count(&a, &b, &p).unwrap(),
            lcss_memo_oracle(&a, &b, &p)
        );
    }
}
