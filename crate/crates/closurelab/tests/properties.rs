//! Property suites for the class algebra, the dimension relations, the
//! online learners, and the mechanism algebra.

use closurelab::audit::exact_dp_delta;
use closurelab::bits::Bits;
use closurelab::dims::{
    dim_report, floor_log2, littlestone_dimension, sauer_bound, threshold_dimension, vc_dimension,
    verify_shattered_tree, verify_threshold_witness,
};
use closurelab::dp::{exp_mech_weights, relabel, ErrorCountScore, Pattern, PointPredicate};
use closurelab::hclass::{
    compose, dnf_majority_decompose, make_threshold_chain, Aggregator, Domain, Hypothesis,
    HypothesisClass, LabeledSample,
};
use closurelab::online::{run_realizable_game, union_learner, wm_mistake_bound, SoaLearner};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn arb_class(max_domain: usize, max_members: usize) -> impl Strategy<Value = HypothesisClass> {
    (1..=max_domain).prop_flat_map(move |n| {
        proptest::collection::vec(proptest::collection::vec(any::<bool>(), n), 1..=max_members)
            .prop_map(move |rows| {
                let domain = Domain::new(n).unwrap();
                let hyps = rows
                    .into_iter()
                    .map(|r| Hypothesis::new(Bits::from_bools(&r)))
                    .collect();
                HypothesisClass::from_rows(domain, hyps).unwrap()
            })
    })
}

fn arb_class_pair(
    max_domain: usize,
    max_members: usize,
) -> impl Strategy<Value = (HypothesisClass, HypothesisClass)> {
    (1..=max_domain).prop_flat_map(move |n| {
        let one = move || {
            proptest::collection::vec(proptest::collection::vec(any::<bool>(), n), 1..=max_members)
                .prop_map(move |rows| {
                    let domain = Domain::new(n).unwrap();
                    let hyps = rows
                        .into_iter()
                        .map(|r| Hypothesis::new(Bits::from_bools(&r)))
                        .collect();
                    HypothesisClass::from_rows(domain, hyps).unwrap()
                })
        };
        (one(), one())
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn union_is_commutative_associative_idempotent(
        (h1, h2) in arb_class_pair(5, 10),
    ) {
        prop_assert_eq!(h1.union(&h2).unwrap(), h2.union(&h1).unwrap());
        prop_assert_eq!(h1.union(&h1).unwrap(), h1.clone());
        let h3 = h1.negated();
        let left = h1.union(&h2).unwrap().union(&h3).unwrap();
        let right = h1.union(&h2.union(&h3).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn projection_on_all_points_is_identity(h in arb_class(5, 12)) {
        let all: Vec<usize> = (0..h.domain().size()).collect();
        prop_assert_eq!(h.project(&all).unwrap(), h);
    }

    #[test]
    fn compose_respects_restriction(
        (h1, h2) in arb_class_pair(4, 5),
        g_code in 0u8..16,
    ) {
        let mut table = Bits::zeros(4);
        for i in 0..4 {
            table.set(i, g_code >> i & 1 == 1);
        }
        let g = Aggregator::new(2, table).unwrap();
        let composed = compose(&g, &[&h1, &h2]).unwrap();
        let n = h1.domain().size();
        let p: Vec<usize> = (0..n).step_by(2).collect();
        let lhs = composed.project(&p).unwrap();
        let rhs = compose(&g, &[&h1.project(&p).unwrap(), &h2.project(&p).unwrap()]).unwrap();
        prop_assert!(lhs.is_subclass_of(&rhs));
    }

    #[test]
    fn dimension_ladder_and_certificates(h in arb_class(5, 12)) {
        let rep = dim_report(&h).unwrap();
        // vc <= ldim <= log2 |H|
        prop_assert!(rep.vc <= rep.ldim);
        prop_assert!(rep.ldim <= floor_log2(h.len()));
        // both Shelah inequalities
        prop_assert!(rep.tdim >= floor_log2(rep.ldim));
        prop_assert!(rep.ldim >= floor_log2(rep.tdim));
        prop_assert!(verify_shattered_tree(&h, &rep.mistake_tree));
        prop_assert!(verify_threshold_witness(&h, &rep.threshold_witness));
    }

    #[test]
    fn union_dimension_bounds((h1, h2) in arb_class_pair(5, 8)) {
        let u = h1.union(&h2).unwrap();
        let (d1, _) = littlestone_dimension(&h1).unwrap();
        let (d2, _) = littlestone_dimension(&h2).unwrap();
        let (du, _) = littlestone_dimension(&u).unwrap();
        prop_assert!(du <= d1 + d2 + 1);
        let (t1, _) = threshold_dimension(&h1).unwrap();
        let (t2, _) = threshold_dimension(&h2).unwrap();
        let (tu, _) = threshold_dimension(&u).unwrap();
        prop_assert!(tu <= t1 + t2);
    }

    #[test]
    fn dimensions_are_monotone_under_subclass(h in arb_class(5, 12), keep in any::<u16>()) {
        let members: Vec<Hypothesis> = h
            .members()
            .iter()
            .enumerate()
            .filter(|(i, _)| keep >> (i % 16) & 1 == 1)
            .map(|(_, m)| m.clone())
            .collect();
        prop_assume!(!members.is_empty());
        let sub = HypothesisClass::from_rows(h.domain(), members).unwrap();
        let big = dim_report(&h).unwrap();
        let small = dim_report(&sub).unwrap();
        prop_assert!(small.vc <= big.vc);
        prop_assert!(small.ldim <= big.ldim);
        prop_assert!(small.tdim <= big.tdim);
    }

    #[test]
    fn sauer_bound_dominates_projection_counts(h in arb_class(6, 14)) {
        let (vc, _) = vc_dimension(&h).unwrap();
        prop_assume!(vc >= 1);
        let n = h.domain().size();
        for size in vc..=n {
            let p: Vec<usize> = (0..size).collect();
            let patterns = h.project(&p).unwrap().len() as f64;
            prop_assert!(patterns <= sauer_bound(vc, size) + 1e-9);
        }
    }

    #[test]
    fn chain_has_t_members_and_threshold_dimension_t(t in 1usize..=6) {
        let c = make_threshold_chain(t);
        prop_assert_eq!(c.len(), t);
        let (tdim, w) = threshold_dimension(&c).unwrap();
        prop_assert_eq!(tdim, t);
        prop_assert!(verify_threshold_witness(&c, &w));
    }

    #[test]
    fn decomposition_matches_aggregator_at_arity_4(code in any::<u16>()) {
        let mut table = Bits::zeros(16);
        for i in 0..16 {
            table.set(i, code >> i & 1 == 1);
        }
        let g = Aggregator::new(4, table).unwrap();
        let f = dnf_majority_decompose(&g);
        prop_assert!(f.well_formed());
        for idx in 0..16usize {
            let input = [
                (idx >> 3 & 1) as u8,
                (idx >> 2 & 1) as u8,
                (idx >> 1 & 1) as u8,
                (idx & 1) as u8,
            ];
            prop_assert_eq!(f.eval(&input), g.eval(&input));
        }
    }

    #[test]
    fn exp_mech_weights_are_shift_invariant(
        scores in proptest::collection::vec(0u32..64, 1..20),
        shift in 0u32..1000,
    ) {
        let base: Vec<f64> = scores.iter().map(|&q| q as f64).collect();
        let shifted: Vec<f64> = scores.iter().map(|&q| (q + shift) as f64).collect();
        // integer-valued scores subtract exactly, so the weight vectors are
        // bit-identical
        prop_assert_eq!(exp_mech_weights(1.0, &base), exp_mech_weights(1.0, &shifted));
    }

    #[test]
    fn exact_dp_delta_zero_iff_ratio_bounded(
        raw1 in proptest::collection::vec(1u32..100, 4),
        raw2 in proptest::collection::vec(1u32..100, 4),
    ) {
        let norm = |raw: &[u32]| {
            let s: u32 = raw.iter().sum();
            raw.iter().map(|&x| x as f64 / s as f64).collect::<Vec<f64>>()
        };
        let p1 = norm(&raw1);
        let p2 = norm(&raw2);
        let max_ratio = p1
            .iter()
            .zip(&p2)
            .map(|(&a, &b)| (a / b).ln())
            .fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(exact_dp_delta(&p1, &p2, max_ratio + 1e-9) <= 1e-12);
        if max_ratio > 1e-6 {
            prop_assert!(exact_dp_delta(&p1, &p2, max_ratio / 2.0) > 0.0);
        }
        // monotone non-increasing in eps
        let d_lo = exact_dp_delta(&p1, &p2, 0.1);
        let d_hi = exact_dp_delta(&p1, &p2, 0.5);
        prop_assert!(d_hi <= d_lo + 1e-15);
    }

    #[test]
    fn relabeled_labels_always_extend_to_a_member(
        h in arb_class(5, 10),
        raw_items in proptest::collection::vec((0usize..5, 0u8..2), 1..12),
        seed in any::<u64>(),
    ) {
        let n = h.domain().size();
        let items: Vec<(usize, u8)> = raw_items.iter().map(|&(x, y)| (x % n, y)).collect();
        let mid = items.len() / 2;
        let d = LabeledSample::from_items_unchecked(items[..mid].to_vec());
        let t = LabeledSample::from_items_unchecked(items[mid..].to_vec());
        prop_assume!(!d.is_empty() || !t.is_empty());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let out = relabel(&d, &t, &h, &ErrorCountScore, &mut rng).unwrap();
        let witness = h.members().iter().find(|m| out.pattern.agrees_with(m));
        prop_assert!(witness.is_some());
        // relabeled samples carry exactly the pattern's values
        for &(x, y) in out.d_relabeled.items().iter().chain(out.t_relabeled.items()) {
            prop_assert_eq!(out.pattern.label_point(x), y);
        }
    }

    #[test]
    fn wm_respects_its_bound_on_random_realizable_runs(
        (h1, h2) in arb_class_pair(4, 6),
        seq_raw in proptest::collection::vec((0usize..4, any::<bool>()), 1..24),
        pick_first in any::<bool>(),
    ) {
        let classes = [h1, h2];
        let target_class = &classes[!pick_first as usize];
        let target = target_class.member(target_class.len() / 2);
        let n = classes[0].domain().size();
        let seq: Vec<(usize, u8)> = seq_raw
            .iter()
            .map(|&(x, _)| (x % n, target.value(x % n)))
            .collect();
        let union = classes[0].union(&classes[1]).unwrap();
        let mut learner = union_learner(&classes).unwrap();
        let log = run_realizable_game(&union, &mut learner, &seq, None).unwrap();
        let best = *learner.mistake_counts().iter().min().unwrap() as usize;
        let bound = wm_mistake_bound(2, best, 0.5);
        prop_assert!(
            log.mistake_count as f64 <= bound,
            "mistakes {} > bound {}", log.mistake_count, bound
        );
    }

    #[test]
    fn soa_stays_within_ldim_on_random_realizable_runs(
        h in arb_class(4, 10),
        seq_raw in proptest::collection::vec(0usize..4, 0..20),
        member_pick in any::<u8>(),
    ) {
        let n = h.domain().size();
        let target = h.member(member_pick as usize % h.len());
        let seq: Vec<(usize, u8)> = seq_raw.iter().map(|&x| (x % n, target.value(x % n))).collect();
        let (d, _) = littlestone_dimension(&h).unwrap();
        let mut learner = SoaLearner::new(&h).unwrap();
        let log = run_realizable_game(&h, &mut learner, &seq, None).unwrap();
        prop_assert!(log.mistake_count <= d);
    }

    #[test]
    fn union_ldim_never_exceeds_the_wm_bound_ceiling(
        (h1, h2) in arb_class_pair(4, 6),
    ) {
        let (d1, _) = littlestone_dimension(&h1).unwrap();
        let (d2, _) = littlestone_dimension(&h2).unwrap();
        let u = h1.union(&h2).unwrap();
        let (du, _) = littlestone_dimension(&u).unwrap();
        let bound = wm_mistake_bound(2, d1.max(d2), 0.5).ceil() as usize;
        prop_assert!(du <= bound, "Ldim(union) {du} > ceil(bound) {bound}");
    }

    #[test]
    fn pattern_lookup_agrees_with_projection(
        h in arb_class(5, 8),
        point_mask in 1u8..32,
    ) {
        let n = h.domain().size();
        let points: Vec<usize> = (0..n).filter(|&x| point_mask >> x & 1 == 1).collect();
        prop_assume!(!points.is_empty());
        let projected = h.project(&points).unwrap();
        for m in projected.members() {
            let pat = Pattern::new(points.clone(), m.bits().clone()).unwrap();
            for (j, &x) in points.iter().enumerate() {
                prop_assert_eq!(pat.label_point(x), m.value(j));
            }
        }
    }
}
