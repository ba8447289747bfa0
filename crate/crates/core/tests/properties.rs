//! Randomized checks of the gap identities against the list oracle and each other.

use friendship_paradox::correlation::{check_sign_consistency, pearson, sign_rule_report};
use friendship_paradox::generators::{generate_gnp, GnpSpec};
use friendship_paradox::metrics::{
    full_report_with, gap_lefp, gap_lefp_friend_form, gap_lfp, gap_lwfp, gap_scales, gap_sefp,
    gap_sefp_seed_form, gap_sfp, gap_swfp,
};
use friendship_paradox::oracle::{oracle_all, relative_error};
use friendship_paradox::{Correlation, Graph, Paradox};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random graph on up to `max_n` nodes with integer weights in 1..=10 and
/// attributes in [-10, 10]; isolates are dropped afterwards.
fn small_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n)
        .prop_flat_map(|n| {
            let pairs = n * (n - 1) / 2;
            (
                Just(n),
                prop::collection::vec(prop::option::weighted(0.35, 1u32..=10), pairs),
                prop::collection::vec(-10.0f64..10.0, n),
            )
        })
        .prop_filter_map("needs an edge", |(n, slots, attrs)| {
            let mut edges = Vec::new();
            let mut k = 0;
            for i in 0..n {
                for j in (i + 1)..n {
                    if let Some(w) = slots[k] {
                        edges.push((i, j, w as f64));
                    }
                    k += 1;
                }
            }
            let g = Graph::build(n, &edges, Some(attrs)).ok()?;
            let g = g.drop_isolates().ok()?.graph;
            (g.node_count() >= 2).then_some(g)
        })
}

/// G(n, p) up to n = 200 with real weights in (0.1, 5].
fn larger_graph() -> impl Strategy<Value = (Graph, Vec<f64>)> {
    (2usize..=200, 0.02f64..0.3, any::<u64>()).prop_filter_map("needs an edge", |(n, p, seed)| {
        let g = generate_gnp(&GnpSpec { n, p, max_weight: 10, seed }).ok()?;
        let g = g.drop_isolates().ok()?.graph;
        if g.node_count() < 2 {
            return None;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = g.reweighted(|_, _, _| rng.random_range(0.1..=5.0)).ok()?;
        let a = (0..g.node_count()).map(|_| rng.random_range(-10.0..10.0)).collect();
        Some((g, a))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn closed_forms_match_list_oracle(g in small_graph(30)) {
        let q = g.node_quantities().unwrap();
        let a = g.attributes().unwrap();
        let gaps = full_report_with(&g, &q, Some(a)).unwrap();
        let scales = gap_scales(&q, Some(a)).unwrap();
        let oracle = oracle_all(&g).unwrap();
        for (k, p) in Paradox::ALL.into_iter().enumerate() {
            let err = relative_error(gaps.get(p).value, oracle[k], scales[k]);
            prop_assert!(err <= 1e-12, "{p}: {} vs {} ({err:e})", gaps.get(p).value, oracle[k]);
        }
    }

    #[test]
    fn structural_gaps_are_non_negative(g in small_graph(30)) {
        let q = g.node_quantities().unwrap();
        let class = g.classify();
        let gaps = [gap_lfp(&q), gap_sfp(&g, &q), gap_lwfp(&q), gap_swfp(&g, &q)];
        for v in gaps {
            prop_assert!(v >= -1e-9, "negative structural gap {v}");
        }
        // strict only when connected: components can each be regular on their own
        if class.connected && !class.regular {
            prop_assert!(gaps[0] > 0.0 && gaps[1] > 0.0);
        }
        if class.connected && !class.weighted_regular {
            prop_assert!(gaps[2] > 0.0 && gaps[3] > 0.0);
        }
    }

    #[test]
    fn gaps_follow_their_correlations(g in small_graph(30)) {
        let q = g.node_quantities().unwrap();
        let a = g.attributes().unwrap();
        let gaps = full_report_with(&g, &q, Some(a)).unwrap();
        let corrs = sign_rule_report(&q, Some(a)).unwrap();
        let c = check_sign_consistency(&gaps, &corrs);
        prop_assert!(c.ok, "{:?}", c.details);
    }

    #[test]
    fn delta_and_gamma_sum_to_n(g in small_graph(30)) {
        let q = g.node_quantities().unwrap();
        let n = q.len() as f64;
        prop_assert!((q.delta.iter().sum::<f64>() - n).abs() <= 1e-9 * n);
        prop_assert!((q.gamma.iter().sum::<f64>() - n).abs() <= 1e-9 * n);
        let corrs = sign_rule_report(&q, None).unwrap();
        if let Correlation::Defined(r) = corrs.r_d_delta {
            prop_assert!(r > 0.0, "r(d,δ) = {r}");
        }
        if let Correlation::Defined(r) = corrs.r_w_gamma {
            prop_assert!(r > 0.0, "r(w,γ) = {r}");
        }
    }

    #[test]
    fn shifting_attributes_keeps_gaps(g in small_graph(30), c in -100.0f64..100.0) {
        let q = g.node_quantities().unwrap();
        let a = g.attributes().unwrap();
        let shifted: Vec<f64> = a.iter().map(|x| x + c).collect();
        let scale = gap_scales(&q, Some(a)).unwrap()[4].max(c.abs());
        for quantities in [q.unweighted(), q.clone()] {
            let (l0, l1) = (gap_lefp(&quantities, a).unwrap(), gap_lefp(&quantities, &shifted).unwrap());
            let (s0, s1) = (gap_sefp(&quantities, a).unwrap(), gap_sefp(&quantities, &shifted).unwrap());
            prop_assert!(relative_error(l1, l0, scale) <= 1e-9, "{l0} vs {l1}");
            prop_assert!(relative_error(s1, s0, scale) <= 1e-9, "{s0} vs {s1}");
        }
    }

    #[test]
    fn negating_attributes_negates_gaps(g in small_graph(30)) {
        let q = g.node_quantities().unwrap();
        let a = g.attributes().unwrap();
        let negated: Vec<f64> = a.iter().map(|x| -x).collect();
        let scale = gap_scales(&q, Some(a)).unwrap()[4];
        for quantities in [q.unweighted(), q.clone()] {
            let l = gap_lefp(&quantities, a).unwrap();
            let s = gap_sefp(&quantities, a).unwrap();
            prop_assert!(relative_error(-gap_lefp(&quantities, &negated).unwrap(), l, scale) <= 1e-12);
            prop_assert!(relative_error(-gap_sefp(&quantities, &negated).unwrap(), s, scale) <= 1e-12);
        }
    }

    #[test]
    fn pearson_symmetry_scaling_and_negation(
        xs in prop::collection::vec(-50.0f64..50.0, 3..40),
        k in 0.01f64..100.0,
    ) {
        let ys: Vec<f64> = xs.iter().enumerate().map(|(i, x)| x * x - i as f64).collect();
        let r = pearson(&xs, &ys).unwrap();
        let Some(r) = r.value() else { return Ok(()) };
        let swapped = pearson(&ys, &xs).unwrap().value().unwrap();
        prop_assert!((r - swapped).abs() <= 1e-12);
        let scaled: Vec<f64> = xs.iter().map(|x| x * k).collect();
        prop_assert!((pearson(&scaled, &ys).unwrap().value().unwrap() - r).abs() <= 1e-9);
        let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
        prop_assert!((pearson(&neg, &ys).unwrap().value().unwrap() + r).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reformulations_agree_up_to_200_nodes((g, a) in larger_graph()) {
        let q = g.node_quantities().unwrap();
        let scale = gap_scales(&q, Some(&a)).unwrap()[4];
        for (graph, quantities) in [(g.unit_weights(), q.unweighted()), (g.clone(), q.clone())] {
            let closed = gap_lefp(&quantities, &a).unwrap();
            let friend = gap_lefp_friend_form(&graph, &quantities, &a).unwrap();
            prop_assert!(relative_error(closed, friend, scale) <= 1e-12, "list {closed} vs {friend}");
            let closed = gap_sefp(&quantities, &a).unwrap();
            let seed = gap_sefp_seed_form(&graph, &quantities, &a).unwrap();
            prop_assert!(relative_error(closed, seed, scale) <= 1e-12, "singular {closed} vs {seed}");
        }
        // structural gaps: closed forms against a = d and a = w through the attribute forms
        let d = q.degree_f64();
        let unit = q.unweighted();
        let d_scale = gap_scales(&q, None).unwrap()[0];
        let w_scale = gap_scales(&q, None).unwrap()[2];
        prop_assert!(relative_error(gap_lfp(&q), gap_lefp(&unit, &d).unwrap(), d_scale) <= 1e-12);
        prop_assert!(relative_error(gap_sfp(&g, &q), gap_sefp(&unit, &d).unwrap(), d_scale) <= 1e-12);
        prop_assert!(relative_error(gap_lwfp(&q), gap_lefp(&q, &q.weighted_degree).unwrap(), w_scale) <= 1e-12);
        prop_assert!(relative_error(gap_swfp(&g, &q), gap_sefp(&q, &q.weighted_degree).unwrap(), w_scale) <= 1e-12);
    }
}
