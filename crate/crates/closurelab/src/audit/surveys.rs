//! Dimension surveys: composition bounds, the Shelah relation, and the
//! all-ones-submatrix certificate for the OR-blowup class.

use crate::dims::{floor_log2, littlestone_dimension, threshold_dimension};
use crate::error::{Error, Result};
use crate::hclass::{compose_capped, make_random_or_blowup, Aggregator, HypothesisClass};
use crate::report::{ExperimentReport, Verdict};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

pub const BICLIQUE_NODE_BUDGET: usize = 50_000_000;

/// Exact dimensions of each class and of the composition, checked against
/// the composition bounds: `oconst * 2^{2k} k^2 d` for the Littlestone side
/// and `2^{4k 4^k t}` (reported in log2) for the threshold side.
pub fn closure_dim_survey(
    g: &Aggregator,
    classes: &[&HypothesisClass],
    oconst: f64,
    cap: usize,
) -> Result<ExperimentReport> {
    let k = g.arity();
    let composed = compose_capped(g, classes, cap)?;
    let mut report = ExperimentReport::new(
        "closure-dim-survey",
        json!({"arity": k, "class_sizes": classes.iter().map(|c| c.len()).collect::<Vec<_>>(), "oconst": oconst}),
        None,
    );

    let mut d_max = 0usize;
    let mut t_max = 0usize;
    for (i, c) in classes.iter().enumerate() {
        let (d, _) = littlestone_dimension(c)?;
        let (t, _) = threshold_dimension(c)?;
        d_max = d_max.max(d);
        t_max = t_max.max(t);
        let mut row = serde_json::Map::new();
        row.insert("class".into(), json!(i));
        row.insert("ldim".into(), json!(d));
        row.insert("tdim".into(), json!(t));
        report.trials.push(row);
    }
    let (d_comp, _) = littlestone_dimension(&composed)?;
    let (t_comp, _) = threshold_dimension(&composed)?;
    report.stat("composed_ldim", json!(d_comp));
    report.stat("composed_tdim", json!(t_comp));
    report.stat("composed_size", json!(composed.len()));

    let ldim_bound = oconst * (1u64 << (2 * k)) as f64 * (k * k) as f64 * d_max as f64;
    report.push_bound("composition-ldim", "C*2^(2k)*k^2*d", ldim_bound);
    report.push_verdict(
        "ldim-within-bound",
        if (d_comp as f64) <= ldim_bound {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        format!("ldim(composed) = {d_comp}, bound = {ldim_bound}"),
    );

    // strict hypothesis T(H_i) < t, so t = max + 1; astronomically large, so
    // compared in log2 space
    let t_hyp = (t_max + 1) as f64;
    let log2_bound = 4.0 * k as f64 * 4f64.powi(k as i32) * t_hyp;
    report.push_bound("composition-tdim-log2", "4k*4^k*t", log2_bound);
    let t_comp_log2 = if t_comp <= 1 {
        0.0
    } else {
        (t_comp as f64).log2()
    };
    report.push_verdict(
        "tdim-within-bound",
        if t_comp_log2 < log2_bound {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        format!("log2 tdim(composed) = {t_comp_log2:.3}, log2 bound = {log2_bound:.1}"),
    );
    Ok(report)
}

/// Build the OR-blowup class for the given `t`, OR-compose it with itself,
/// and record that the composed threshold dimension reaches `2^floor(t/5)`.
pub fn or_blowup_survey(t: usize, seed: u64, cap: usize) -> Result<ExperimentReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blow = make_random_or_blowup(t, &mut rng)?;
    let base = blow.class();
    let or2 = Aggregator::or(2);
    let composed = compose_capped(&or2, &[&base, &base], cap)?;
    let (t_base, _) = threshold_dimension(&base)?;
    let (t_comp, _) = threshold_dimension(&composed)?;
    let target = 1usize << (t / 5);

    let mut report = ExperimentReport::new(
        "or-blowup-survey",
        json!({"t": t, "m": blow.m, "base_size": base.len(), "composed_size": composed.len()}),
        Some(seed),
    );
    report.stat("tdim_base", json!(t_base));
    report.stat("tdim_composed", json!(t_comp));
    report.push_bound("blowup-target", "2^floor(t/5)", target as f64);
    report.push_verdict(
        "composed-tdim-reaches-target",
        if t_comp >= target {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        format!("T(or-composition) = {t_comp}, target {target}"),
    );
    Ok(report)
}

/// Both directions of the exponential relation between the Littlestone and
/// threshold dimensions.
pub fn shelah_check(class: &HypothesisClass) -> Result<ExperimentReport> {
    let (d, _) = littlestone_dimension(class)?;
    let (t, _) = threshold_dimension(class)?;
    let mut report = ExperimentReport::new(
        "shelah-check",
        json!({"members": class.len(), "domain": class.domain().size()}),
        None,
    );
    report.stat("ldim", json!(d));
    report.stat("tdim", json!(t));
    let ok1 = t >= floor_log2(d);
    let ok2 = d >= floor_log2(t);
    report.push_verdict(
        "tdim-ge-floor-log-ldim",
        if ok1 { Verdict::Pass } else { Verdict::Fail },
        format!("T = {t}, floor(log2 Ldim) = {}", floor_log2(d)),
    );
    report.push_verdict(
        "ldim-ge-floor-log-tdim",
        if ok2 { Verdict::Pass } else { Verdict::Fail },
        format!("Ldim = {d}, floor(log2 T) = {}", floor_log2(t)),
    );
    Ok(report)
}

/// True iff no `k` members and `k` points form an all-ones submatrix.
/// Branch and bound over members ordered by descending popcount; exceeding
/// the node budget is an inconclusive resource error.
pub fn no_biclique_check(class: &HypothesisClass, k: usize, budget: usize) -> Result<bool> {
    if k == 0 {
        return Ok(false);
    }
    let n = class.domain().size();
    if n < k || class.len() < k {
        return Ok(true);
    }
    let mut order: Vec<usize> = (0..class.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(class.member(i).bits().count_ones()));

    struct Search<'a> {
        class: &'a HypothesisClass,
        order: Vec<usize>,
        k: usize,
        nodes: usize,
        budget: usize,
    }
    impl Search<'_> {
        /// Returns true if a biclique completes from this state.
        fn dfs(&mut self, next: usize, chosen: usize, cols: &crate::bits::Bits) -> Result<bool> {
            if chosen == self.k {
                return Ok(true);
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::ResourceLimit(format!(
                    "biclique search exceeded {} nodes",
                    self.budget
                )));
            }
            if cols.count_ones() < self.k {
                return Ok(false);
            }
            let remaining = self.order.len() - next;
            if chosen + remaining < self.k {
                return Ok(false);
            }
            for pos in next..self.order.len() {
                let row = self.class.member(self.order[pos]).bits();
                let inter = cols.and(row);
                if inter.count_ones() < self.k {
                    continue;
                }
                if self.dfs(pos + 1, chosen + 1, &inter)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }
    let mut search = Search {
        class,
        order,
        k,
        nodes: 0,
        budget,
    };
    let all_cols = crate::bits::Bits::ones(n);
    Ok(!search.dfs(0, 0, &all_cols)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hclass::make_threshold_chain;

    #[test]
    fn survey_identity_keeps_dims() {
        let g = Aggregator::projection(1, 0);
        let chain = make_threshold_chain(4);
        let rep = closure_dim_survey(&g, &[&chain], 1.0, 1 << 20).unwrap();
        assert_eq!(rep.stats["composed_ldim"], json!(2));
        assert_eq!(rep.stats["composed_tdim"], json!(4));
        assert!(rep.all_pass());
    }

    #[test]
    fn survey_majority_of_ldim1_classes() {
        let g = Aggregator::majority(3);
        let chain = make_threshold_chain(3);
        let rep = closure_dim_survey(&g, &[&chain, &chain, &chain], 1.0, 1 << 20).unwrap();
        assert!(rep.all_pass());
        let bound = rep
            .bounds
            .iter()
            .find(|b| b.id == "composition-ldim")
            .unwrap();
        let got = rep.stats["composed_ldim"].as_u64().unwrap() as f64;
        assert!(got <= bound.value);
    }

    #[test]
    fn or_blowup_t10_reaches_4() {
        let rep = or_blowup_survey(10, 123, 1 << 20).unwrap();
        assert!(rep.all_pass());
        assert!(rep.stats["tdim_composed"].as_u64().unwrap() >= 4);
    }

    #[test]
    fn shelah_on_simple_classes() {
        let singleton = HypothesisClass::from_strs(&["0101"]).unwrap();
        assert!(shelah_check(&singleton).unwrap().all_pass());
        let chain = make_threshold_chain(8);
        let rep = shelah_check(&chain).unwrap();
        assert!(rep.all_pass());
        assert!(rep.stats["ldim"].as_u64().unwrap() >= 3);
    }

    #[test]
    fn biclique_trivial_cases() {
        let zeros = HypothesisClass::from_strs(&["000", "000"]).unwrap();
        for k in 1..=3 {
            assert!(no_biclique_check(&zeros, k, 10_000).unwrap());
        }
        // distinct members and points: the 3-cube has four members that are
        // all-ones on the pair {1, 2} but only one member all-ones on all
        // three points
        let cube = HypothesisClass::full_cube(3).unwrap();
        assert!(!no_biclique_check(&cube, 1, 10_000).unwrap());
        assert!(!no_biclique_check(&cube, 2, 10_000).unwrap());
        assert!(no_biclique_check(&cube, 3, 10_000).unwrap());
        let cube4 = HypothesisClass::full_cube(4).unwrap();
        assert!(!no_biclique_check(&cube4, 2, 100_000).unwrap());
    }

    #[test]
    fn biclique_budget_errors_out() {
        let cube = HypothesisClass::full_cube(4).unwrap();
        let err = no_biclique_check(&cube, 4, 1).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit(_)));
    }
}
