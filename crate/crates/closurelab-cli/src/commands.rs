use crate::artifacts::{config_hash, ArtifactWriter};
use crate::expconfig::{named_aggregator, ExperimentConfig};
use crate::{
    AuditArgs, AuditKind, ComposeArgs, ConstructArgs, ConstructKind, DimsArgs, DpLearnArgs,
    ExperimentArgs, OnlineArgs, OnlineMode,
};
use anyhow::{Context, Result};
use closurelab::audit::{
    closure_dim_survey, exact_dp_delta, exp_mech_utility_check, no_biclique_check,
    or_blowup_survey, relabel_pipeline_audit, shelah_check, BICLIQUE_NODE_BUDGET,
};
use closurelab::dims::dim_report;
use closurelab::dp::{exp_mech_output_distribution, ErrorCountScore};
use closurelab::hclass::{
    compose_capped, make_multiunion_lower, make_random_or_blowup, make_threshold_chain,
    make_union_tight, HypothesisClass, LabeledSample,
};
use closurelab::online::{run_realizable_game, worst_case_adversary, SoaLearner};
use closurelab::report::ExperimentReport;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

fn read_class(path: &Path) -> Result<HypothesisClass> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading class file {}", path.display()))?;
    let parsed = closurelab::io::parse_class_text(&text)?;
    if parsed.had_duplicates {
        eprintln!("warning: duplicate rows in {} were merged", path.display());
    }
    Ok(parsed.class)
}

fn load_aggregator_arg(spec: &str, arity: usize) -> Result<closurelab::hclass::Aggregator> {
    if Path::new(spec).exists() {
        let text = std::fs::read_to_string(spec)?;
        Ok(closurelab::io::parse_aggregator_text(&text)?)
    } else {
        named_aggregator(spec, arity)
    }
}

fn report_json(report: &ExperimentReport, extra: Value) -> Value {
    json!({
        "report": report,
        "config_hash": config_hash(&report.config),
        "extra": extra,
    })
}

fn write_report(
    writer: &mut ArtifactWriter,
    stem: &str,
    report: &ExperimentReport,
    extra: Value,
) -> Result<()> {
    writer.json(&format!("{stem}.json"), &report_json(report, extra))?;
    writer.text(&format!("{stem}.csv"), &report.trials_csv())?;
    writer.finish_meta(&format!("{stem}.meta.json"), json!({}))?;
    for v in &report.verdicts {
        println!("{:<14} {:?}  {}", v.criterion, v.verdict, v.details);
    }
    Ok(())
}

pub fn dims(args: &DimsArgs, out: &Path) -> Result<bool> {
    let class = read_class(&args.class)?;
    let fingerprint = format!("{:016x}", class.fingerprint());

    let cached: Option<Value> = std::env::var_os("CLOSURELAB_CACHE").and_then(|dir| {
        let path = PathBuf::from(dir).join(format!("{fingerprint}.json"));
        std::fs::read_to_string(path)
            .ok()
            .and_then(|t| serde_json::from_str(&t).ok())
    });

    let payload = match cached {
        Some(v) => {
            eprintln!("dims: cache hit for {fingerprint}");
            v
        }
        None => {
            let rep = dim_report(&class)?;
            let v = json!({
                "class_fingerprint": fingerprint,
                "members": class.len(),
                "domain_size": class.domain().size(),
                "vc": rep.vc,
                "ldim": rep.ldim,
                "tdim": rep.tdim,
                "certificates": {
                    "vc_witness": rep.vc_witness,
                    "mistake_tree": rep.mistake_tree,
                    "threshold_witness": rep.threshold_witness,
                },
            });
            if let Some(dir) = std::env::var_os("CLOSURELAB_CACHE") {
                let dir = PathBuf::from(dir);
                if std::fs::create_dir_all(&dir).is_ok() {
                    let _ = std::fs::write(
                        dir.join(format!("{fingerprint}.json")),
                        serde_json::to_string_pretty(&v).expect("serializable"),
                    );
                }
            }
            v
        }
    };

    let mut writer = ArtifactWriter::new(out)?;
    writer.json("dims.json", &payload)?;
    writer.finish_meta("dims.meta.json", json!({}))?;
    println!(
        "vc={} ldim={} tdim={}  ({} members on {} points)",
        payload["vc"], payload["ldim"], payload["tdim"], payload["members"], payload["domain_size"]
    );
    Ok(true)
}

pub fn compose(args: &ComposeArgs, out: &Path) -> Result<bool> {
    let classes: Vec<HypothesisClass> = args
        .classes
        .iter()
        .map(|p| read_class(p))
        .collect::<Result<_>>()?;
    let refs: Vec<&HypothesisClass> = classes.iter().collect();
    let g = load_aggregator_arg(&args.aggregator, classes.len())?;
    let composed = compose_capped(&g, &refs, args.cap)?;
    let mut writer = ArtifactWriter::new(out)?;
    writer.text("composed.txt", &closurelab::io::class_to_text(&composed))?;
    writer.json(
        "composed.json",
        &json!({
            "aggregator": args.aggregator,
            "input_sizes": classes.iter().map(|c| c.len()).collect::<Vec<_>>(),
            "composed_size": composed.len(),
            "fingerprint": format!("{:016x}", composed.fingerprint()),
        }),
    )?;
    writer.finish_meta("composed.meta.json", json!({}))?;
    println!("composed class: {} members", composed.len());
    Ok(true)
}

pub fn construct(args: &ConstructArgs, out: &Path) -> Result<bool> {
    let mut writer = ArtifactWriter::new(out)?;
    match &args.kind {
        ConstructKind::Chain { t } => {
            let c = make_threshold_chain(*t);
            writer.text("chain.txt", &closurelab::io::class_to_text(&c))?;
            writer.json(
                "provenance.json",
                &json!({"construction": "chain", "t": t, "members": c.len()}),
            )?;
            println!("chain t={t}: {} members", c.len());
        }
        ConstructKind::UnionTight { d1, d2, n } => {
            let (h1, h2) = make_union_tight(*d1, *d2, *n)?;
            writer.text("h1.txt", &closurelab::io::class_to_text(&h1))?;
            writer.text("h2.txt", &closurelab::io::class_to_text(&h2))?;
            writer.json(
                "provenance.json",
                &json!({"construction": "union-tight", "d1": d1, "d2": d2, "n": n,
                        "h1_members": h1.len(), "h2_members": h2.len()}),
            )?;
            println!("union-tight: |H1|={} |H2|={}", h1.len(), h2.len());
        }
        ConstructKind::Multiunion { class, k } => {
            let base = read_class(class)?;
            let c = make_multiunion_lower(&base, *k);
            writer.text("multiunion.txt", &closurelab::io::class_to_text(&c))?;
            writer.json(
                "provenance.json",
                &json!({"construction": "multiunion", "k": k, "base_members": base.len(),
                        "members": c.len()}),
            )?;
            println!("multiunion k={k}: {} members", c.len());
        }
        ConstructKind::OrBlowup { t, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let blow = make_random_or_blowup(*t, &mut rng)?;
            writer.text(
                "or-blowup.txt",
                &closurelab::io::rows_to_text(blow.m, &blow.rows()),
            )?;
            let prov = json!({
                "construction": "or-blowup", "t": t, "m": blow.m, "seed": seed,
                "config_hash": config_hash(&json!({"t": t, "seed": seed})),
                "rows": 2 * blow.m,
                "distinct_members": blow.class().len(),
            });
            writer.json("provenance.json", &prov)?;
            println!("or-blowup t={t}: m={} ({} rows)", blow.m, 2 * blow.m);
        }
    }
    writer.finish_meta("construct.meta.json", json!({}))?;
    Ok(true)
}

pub fn online(args: &OnlineArgs, out: &Path) -> Result<bool> {
    let mut writer = ArtifactWriter::new(out)?;
    match &args.mode {
        OnlineMode::Adversary {
            class,
            horizon,
            budget,
        } => {
            let c = read_class(class)?;
            let learner = SoaLearner::new(&c)?;
            let outcome = worst_case_adversary(&c, &learner, *horizon, *budget)?;
            writer.json(
                "adversary.json",
                &json!({
                    "horizon": horizon,
                    "forced_mistakes": outcome.forced_mistakes,
                    "sequence": outcome.sequence,
                    "nodes_expanded": outcome.nodes_expanded,
                }),
            )?;
            writer.finish_meta("adversary.meta.json", json!({}))?;
            println!(
                "adversary forces {} mistakes within horizon {horizon}",
                outcome.forced_mistakes
            );
        }
        OnlineMode::Replay {
            class,
            target_member,
            rounds,
            seed,
        } => {
            let c = read_class(class)?;
            let target = c
                .members()
                .get(*target_member)
                .context("target member index out of range")?
                .clone();
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let seq: Vec<(usize, u8)> = (0..*rounds)
                .map(|_| {
                    let x = rng.gen_range(0..c.domain().size());
                    (x, target.value(x))
                })
                .collect();
            let mut learner = SoaLearner::new(&c)?;
            let log = run_realizable_game(&c, &mut learner, &seq, None)?;
            writer.json(
                "replay.json",
                &json!({
                    "seed": seed,
                    "config_hash": config_hash(&json!({"seed": seed, "rounds": rounds,
                        "target_member": target_member})),
                    "log": log,
                }),
            )?;
            writer.finish_meta("replay.meta.json", json!({}))?;
            println!(
                "replay: {} mistakes over {rounds} rounds",
                log.mistake_count
            );
        }
    }
    Ok(true)
}

pub fn dp_learn(args: &DpLearnArgs, out: &Path) -> Result<bool> {
    use closurelab::audit::GenAlgorithm;
    use closurelab::dp::{closure_learn, private_agnostic, DpRngs, DEFAULT_COMPLETION_CAP};

    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("reading config {}", args.config.display()))?;
    let config: ExperimentConfig = serde_json::from_str(&text).context("parsing config")?;
    let base = args.config.parent().unwrap_or(Path::new("."));
    let resolved = config.resolve(base)?;

    let mut data_rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n = resolved.resolved_sample_size + resolved.resolved_sample_size % 2;
    let sample = resolved.gen.dist.sample(n, &mut data_rng);
    let mut rngs = DpRngs::from_seed(config.seed ^ 0x9e37_79b9);
    let hypothesis = match &resolved.gen.algorithm {
        GenAlgorithm::PrivateAgnostic { class, learner } => {
            private_agnostic(&sample, class, learner, &mut rngs)?
        }
        GenAlgorithm::ClosureLearn {
            g,
            classes,
            learners,
        } => {
            closure_learn(
                &sample,
                g,
                classes,
                learners,
                DEFAULT_COMPLETION_CAP,
                &mut rngs,
            )?
            .composed
        }
    };
    let true_error = resolved.gen.dist.true_error(&hypothesis);
    let empirical = sample.error_count(&hypothesis) as f64 / sample.len() as f64;
    let raw_config: Value = serde_json::from_str(&text)?;

    let mut writer = ArtifactWriter::new(out)?;
    writer.json(
        "dp-learn.json",
        &json!({
            "name": config.name,
            "seed": config.seed,
            "config_hash": config_hash(&raw_config),
            "sample_size": n,
            "auto_sized": resolved.auto_sized,
            "hypothesis": hypothesis.string01(),
            "true_error": true_error,
            "empirical_error": empirical,
        }),
    )?;
    writer.finish_meta("dp-learn.meta.json", json!({}))?;
    println!(
        "dp-learn {}: true_error={true_error:.4} empirical={empirical:.4} hypothesis={}",
        config.name,
        hypothesis.string01()
    );
    Ok(true)
}

pub fn experiment(args: &ExperimentArgs, out: &Path) -> Result<bool> {
    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("reading config {}", args.config.display()))?;
    let config: ExperimentConfig = serde_json::from_str(&text).context("parsing config")?;
    let base = args.config.parent().unwrap_or(Path::new("."));
    let resolved = config.resolve(base)?;
    let report = closurelab::audit::generalization_experiment(&resolved.gen)?;
    let raw_config: Value = serde_json::from_str(&text)?;

    let mut writer = ArtifactWriter::new(out)?;
    write_report(
        &mut writer,
        &config.name,
        &report,
        json!({
            "file_config_hash": config_hash(&raw_config),
            "seed": config.seed,
            "sample_size": resolved.resolved_sample_size,
            "auto_sized": resolved.auto_sized,
        }),
    )?;
    Ok(!report.any_fail())
}

/// Enumerate all ordered neighboring sample pairs up to the length cap over
/// a domain, and return the largest exact DP slack of the mechanism that
/// selects a class member through the error-count score.
fn exp_mech_exhaustive_delta(class: &HypothesisClass, eps: f64, max_len: usize) -> Result<f64> {
    let n = class.domain().size();
    let items: Vec<(usize, u8)> = (0..n).flat_map(|x| [(x, 0u8), (x, 1u8)]).collect();
    let mut worst = 0.0f64;
    for len in 1..=max_len {
        let mut idx = vec![0usize; len];
        loop {
            let s1: Vec<(usize, u8)> = idx.iter().map(|&i| items[i]).collect();
            for pos in 0..len {
                for &alt in items.iter() {
                    if alt == s1[pos] {
                        continue;
                    }
                    let mut s2 = s1.clone();
                    s2[pos] = alt;
                    let d1 = LabeledSample::from_items_unchecked(s1.clone());
                    let d2 = LabeledSample::from_items_unchecked(s2);
                    let p1 =
                        exp_mech_output_distribution(eps, class.members(), &d1, &ErrorCountScore)?;
                    let p2 =
                        exp_mech_output_distribution(eps, class.members(), &d2, &ErrorCountScore)?;
                    worst = worst.max(exact_dp_delta(&p1, &p2, eps));
                    worst = worst.max(exact_dp_delta(&p2, &p1, eps));
                }
            }
            // odometer over sample item indices
            let mut pos = len;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < items.len() {
                    break;
                }
                idx[pos] = 0;
            }
            if idx.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    Ok(worst)
}

pub fn audit(args: &AuditArgs, out: &Path) -> Result<bool> {
    let mut writer = ArtifactWriter::new(out)?;
    match &args.kind {
        AuditKind::ExpMech {
            class,
            eps,
            max_sample_len,
            tolerance,
        } => {
            let c = read_class(class)?;
            let worst = exp_mech_exhaustive_delta(&c, *eps, *max_sample_len)?;
            let pass = worst <= *tolerance;
            writer.json(
                "exp-mech-audit.json",
                &json!({
                    "eps": eps, "max_sample_len": max_sample_len,
                    "worst_exact_delta": worst, "tolerance": tolerance,
                    "verdict": if pass { "PASS" } else { "FAIL" },
                }),
            )?;
            writer.finish_meta("exp-mech-audit.meta.json", json!({}))?;
            println!("exp-mech exact audit: worst delta {worst:.3e} (tolerance {tolerance:.1e})");
            Ok(pass)
        }
        AuditKind::Utility {
            eps,
            m,
            delta,
            trials,
            seed,
        } => {
            // a spread of score profiles at the given sample size
            let scores: Vec<f64> = (0..16).map(|i| (i * m / 16) as f64).collect();
            let report = exp_mech_utility_check(*eps, &scores, *m, *delta, *trials, *seed)?;
            write_report(&mut writer, "utility", &report, json!({"seed": seed}))?;
            Ok(!report.any_fail())
        }
        AuditKind::RelabelMc {
            class,
            trials,
            seed,
            eps,
            delta,
        } => {
            let c = read_class(class)?;
            let report = relabel_pipeline_audit(&c, *trials, *seed, *eps, *delta)?;
            write_report(&mut writer, "relabel-mc", &report, json!({"seed": seed}))?;
            Ok(!report.any_fail())
        }
        AuditKind::Shelah { class } => {
            let c = read_class(class)?;
            let report = shelah_check(&c)?;
            write_report(&mut writer, "shelah", &report, json!({}))?;
            Ok(!report.any_fail())
        }
        AuditKind::Survey {
            aggregator,
            classes,
            oconst,
        } => {
            let cs: Vec<HypothesisClass> = classes
                .iter()
                .map(|p| read_class(p))
                .collect::<Result<_>>()?;
            let refs: Vec<&HypothesisClass> = cs.iter().collect();
            let g = load_aggregator_arg(aggregator, cs.len())?;
            let report = closure_dim_survey(&g, &refs, *oconst, 1 << 24)?;
            write_report(&mut writer, "survey", &report, json!({}))?;
            Ok(!report.any_fail())
        }
        AuditKind::OrBlowup { t, seeds, seed } => {
            let mut all_pass = true;
            let mut rows = Vec::new();
            let mut certified = 0u64;
            for s in 0..*seeds {
                let rep = or_blowup_survey(*t, seed + s, 1 << 24)?;
                all_pass &= !rep.any_fail();
                let m = 1usize << (t / 5);
                let k = 2 * (t / 5) + 1;
                let cert = if m >= 16 {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed + s);
                    let blow = make_random_or_blowup(*t, &mut rng)?;
                    let ok = no_biclique_check(&blow.class(), k, BICLIQUE_NODE_BUDGET)?;
                    certified += ok as u64;
                    Some(ok)
                } else {
                    None
                };
                rows.push(json!({
                    "seed": seed + s,
                    "tdim_composed": rep.stats["tdim_composed"],
                    "biclique_certified": cert,
                }));
            }
            writer.json(
                "or-blowup-audit.json",
                &json!({
                    "t": t, "seeds": seeds, "base_seed": seed,
                    "config_hash": config_hash(&json!({"t": t, "seeds": seeds, "seed": seed})),
                    "rows": rows,
                    "certified_count": certified,
                }),
            )?;
            writer.finish_meta("or-blowup-audit.meta.json", json!({}))?;
            if 1usize << (t / 5) >= 16 {
                println!("or-blowup t={t}: {certified}/{seeds} seeds certified");
            } else {
                println!("or-blowup t={t}: lower bound checked (biclique certificate needs m >= 16)");
            }
            Ok(all_pass)
        }
        AuditKind::Biclique { class, k } => {
            let c = read_class(class)?;
            let none = no_biclique_check(&c, *k, BICLIQUE_NODE_BUDGET)?;
            writer.json(
                "biclique.json",
                &json!({"k": k, "no_biclique": none, "tdim_le": 2 * k}),
            )?;
            writer.finish_meta("biclique.meta.json", json!({}))?;
            println!(
                "biclique k={k}: {}",
                if none {
                    "no all-ones submatrix (certifies T <= 2k)"
                } else {
                    "found an all-ones submatrix"
                }
            );
            Ok(true)
        }
    }
}
