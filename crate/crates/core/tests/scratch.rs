// Temporary calibration harness; removed before delivery.

use motifminer_core::distances::{lcss_distance, LcssParams};
use motifminer_core::pipeline::LcssConfig;
use motifminer_core::schema::Stage;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
#[ignore]
fn distance_distributions() {
    let sim = SimConfig::default();
    let rep = RepresentationConfig::default();
    for eps in [0.30, 0.25, 0.20, 0.15] {
        let mut instance_pairs: Vec<f64> = Vec::new();
        let mut noisy_pairs: Vec<f64> = Vec::new();
        let mut background_pairs: Vec<f64> = Vec::new();
        for seed in 1..=5u64 {
            let base = generate_nonpattern(&sim, derive_seed(seed, "base")).unwrap();
            let habit = generate_habit(&sim, derive_seed(seed, "habit")).unwrap();
            let motif =
                pick_motif(&habit, &rep, (1800.0, 7200.0), 4, derive_seed(seed, "motif")).unwrap();
            let (inj, gt) =
                inject(&base, &motif, 5, &NoiseSpec::none(), &sim, derive_seed(seed, "i")).unwrap();
            let (inj_noisy, gt_noisy) = inject(
                &base,
                &motif,
                5,
                &NoiseSpec::moderate(),
                &sim,
                derive_seed(seed, "in"),
            )
            .unwrap();
            let lc = LcssConfig {
                quant_epsilon: eps,
                ..Default::default()
            };
            for (series, truth, out) in [
                (&inj, &gt, &mut instance_pairs),
                (&inj_noisy, &gt_noisy, &mut noisy_pairs),
            ] {
                let mut raw = series.clone();
                raw.stage = Stage::Raw;
                let pre = motifminer_core::representation::preprocess(&raw, &rep).unwrap();
                let params: LcssParams = lc.params(&pre.schema).unwrap();
                let spans = &truth.motifs[0].instances;
                for i in 0..spans.len() {
                    for j in i + 1..spans.len() {
                        let a = pre.slice(&spans[i]).unwrap();
                        let b = pre.slice(&spans[j]).unwrap();
                        out.push(lcss_distance(&a, &b, &params).unwrap());
                    }
                }
            }
            // Random background pairs of instance-like lengths.
            let mut raw = base.clone();
            raw.stage = Stage::Raw;
            let pre = motifminer_core::representation::preprocess(&raw, &rep).unwrap();
            let params: LcssParams = lc.params(&pre.schema).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..10 {
                let len = rng.random_range(60..=120);
                let a0 = rng.random_range(0..pre.len() - len);
                let b0 = rng.random_range(0..pre.len() - len);
                if a0.abs_diff(b0) < len {
                    continue;
                }
                let a = pre.slice_indices(a0, a0 + len - 1).unwrap();
                let b = pre.slice_indices(b0, b0 + len - 1).unwrap();
                background_pairs.push(lcss_distance(&a, &b, &params).unwrap());
            }
        }
        let stats = |v: &mut Vec<f64>| {
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            if v.is_empty() {
                return (0.0, 0.0, 0.0);
            }
            (v[0], v[v.len() / 2], v[v.len() - 1])
        };
        let (i_min, i_med, i_max) = stats(&mut instance_pairs);
        let (n_min, n_med, n_max) = stats(&mut noisy_pairs);
        let (b_min, b_med, b_max) = stats(&mut background_pairs);
        println!("eps={eps:.2}");
        println!("  exact instances: min {i_min:.3} med {i_med:.3} max {i_max:.3}");
        println!("  noisy instances: min {n_min:.3} med {n_med:.3} max {n_max:.3}");
        println!("  background:      min {b_min:.3} med {b_med:.3} max {b_max:.3}");
    }
}

use std::time::Instant;

use motifminer_core::derive_seed;
use motifminer_core::evaluation::evaluate;
use motifminer_core::pipeline::{run_extraction, PipelineConfig};
use motifminer_core::representation::RepresentationConfig;
use motifminer_core::simulator::{
    generate_habit, generate_nonpattern, inject, pick_motif, NoiseSpec, SimConfig,
};

#[test]
#[ignore]
fn time_one_zero_noise_run() {
    let seed = 1u64;
    let t0 = Instant::now();
    let sim = SimConfig::default();
    let base = generate_nonpattern(&sim, derive_seed(seed, "base")).unwrap();
    let habit = generate_habit(&sim, derive_seed(seed, "habit")).unwrap();
    let rep = RepresentationConfig::default();
    let motif = pick_motif(&habit, &rep, (1800.0, 7200.0), 6, derive_seed(seed, "motif")).unwrap();
    let (injected, gt) =
        inject(&base, &motif, 5, &NoiseSpec::none(), &sim, derive_seed(seed, "inject")).unwrap();
    println!("simulate: {:?}", t0.elapsed());

    let t1 = Instant::now();
    let out = run_extraction(&injected, &PipelineConfig::default(), seed).unwrap();
    println!(
        "extract: {:?} | symbols={} windows~{} nonzero-cells={} max-count={} pairs={} tentative={} classes={}",
        t1.elapsed(),
        out.symbolic.len(),
        out.symbolic.len().saturating_sub(3),
        out.collisions.nonzero(),
        out.collisions.max_count(),
        out.grown_pairs.len(),
        out.tentative.len(),
        out.classes.len()
    );

    for (k, inst) in gt.motifs[0].instances.iter().enumerate() {
        println!(
            "gt[{k}]: [{}, {}] dur {:.0} min",
            inst.start_index,
            inst.end_index,
            inst.duration() / 60.0
        );
    }
    for (i, t) in out.tentative.iter().enumerate() {
        let sup: Vec<String> = t
            .support
            .iter()
            .map(|s| {
                format!(
                    "sym[{},{}]=pre[{},{}]",
                    s.symbol_start, s.symbol_end, s.span.start_index, s.span.end_index
                )
            })
            .collect();
        println!(
            "tentative[{i}]: [{}, {}] dur {:.0} min support {}",
            t.span.start_index,
            t.span.end_index,
            t.duration() / 60.0,
            sup.join(" ")
        );
    }
    // Symbols straddling each ground-truth boundary.
    for inst in &gt.motifs[0].instances {
        for (s, span) in out.symbolic.source_spans.iter().enumerate() {
            if span.start_index <= inst.start_index && inst.start_index <= span.end_index {
                println!(
                    "  gt@{} left-straddle: symbol {s} covers pre[{},{}]",
                    inst.start_index, span.start_index, span.end_index
                );
            }
            if span.start_index <= inst.end_index && inst.end_index <= span.end_index {
                println!(
                    "  gt@{} right-straddle: symbol {s} covers pre[{},{}]",
                    inst.end_index, span.start_index, span.end_index
                );
            }
        }
    }
    for (j, c) in out.classes.iter().enumerate() {
        let spans: Vec<String> = c
            .members
            .iter()
            .map(|m| format!("[{},{}]", m.span.start_index, m.span.end_index))
            .collect();
        println!("class[{j}]: linkage {:.3} members {}", c.linkage, spans.join(" "));
    }

    // Pairwise LCSS distances between tentative motifs, as clustering sees
    // them.
    {
        let lcss = PipelineConfig::default()
            .lcss
            .params(&out.fitted_schema)
            .unwrap();
        for i in 0..out.tentative.len() {
            let row: Vec<String> = (0..out.tentative.len())
                .map(|j| {
                    let a = out.preprocessed.slice(&out.tentative[i].span).unwrap();
                    let b = out.preprocessed.slice(&out.tentative[j].span).unwrap();
                    format!("{:.2}", lcss_distance(&a, &b, &lcss).unwrap())
                })
                .collect();
            println!("dist[{i}]: {}", row.join(" "));
        }
    }

    let t2 = Instant::now();
    let report = evaluate(&gt, &out.tentative, &out.classes).unwrap();
    println!(
        "evaluate: {:?} | ext_se={:.3} ext_sp={:.3} mean_se={:.3} mean_sp={:.3} lambda={:.3} classes={} motif_instances={}",
        t2.elapsed(),
        report.extraction_se,
        report.extraction_sp,
        report.classification.mean_se,
        report.classification.mean_sp,
        report.lambda,
        report.n_classes,
        gt.motifs[0].instances.len(),
    );
    println!("total: {:?}", t0.elapsed());
}
