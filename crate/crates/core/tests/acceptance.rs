//! Acceptance suite: every test checks one release criterion end to end
//! and prints a PASS line with the measured numbers. Run with
//! `cargo test --test acceptance -- --nocapture` to see them.

use std::time::Instant;

use rand::Rng;

use foa_scene::acoustics::{
    estimate_rir_t60, max_order_for_decay, peak_index, room_acoustics, sabine_rt60,
    SPEED_OF_SOUND,
};
use foa_scene::benchgen::{
    assemble_benchmark, gen_l1, read_benchmark_jsonl, validate_item, write_benchmark_jsonl,
    AnswerKey, GenContext, Level, LevelTargets, QuestionItem, RuleTable, TaskKind,
};
use foa_scene::config::PipelineConfig;
use foa_scene::geometry::{angular_separation_deg, unit_from_angles, Vec3};
use foa_scene::pipeline::{render_scene, run_bench, run_simulate};
use foa_scene::render::pseudo_intensity_doa;
use foa_scene::rng::seeded_rng;
use foa_scene::rtsd::{build_scene_graph, render_rtsd, RtsdConfig, RtsdDoc, SceneGraph, Sector};
use foa_scene::sampler::{
    sample_listener, sample_room, sample_scene_from_master, Domain, ListenerSpec, RangePreset,
    ReverbCategory, RoomSpec, SamplerConfig, SceneSpec, SizeCategory, SourcePalette, SourceSpec,
};
use foa_scene::scorer::{
    expand_per_option, localization_metrics, parse_response, reward_for_key, score_run,
    PredictedSource, Protocol, ResponseRecord, RewardConfig, ScenePrediction, W_COR, W_EVD,
    W_FMT, W_LEN, W_REF, W_VAL,
};

fn pass(name: &str, details: String) {
    println!("acceptance {name}: PASS ({details})");
}

/// Direction recovery and direct-path timing on anechoic single-source
/// scenes, with a wall-clock budget.
#[test]
fn doa_round_trip() {
    let started = Instant::now();
    let cfg = PipelineConfig {
        seed: 0xA11CE,
        duration_s: 1.0,
        rir_max_order: Some(0),
        ..PipelineConfig::default()
    };
    let sampler_cfg = SamplerConfig { k_max: 1, duration_s: 1.0, ..SamplerConfig::default() };
    let palette = SourcePalette::synthetic();
    let mut errors = Vec::new();
    let mut worst_peak_off = 0i64;
    for i in 0..200 {
        let mut scene = sample_scene_from_master(cfg.seed, i, &sampler_cfg, &palette).unwrap();
        scene.room.absorption = 0.99;
        scene.room.reverb_category = ReverbCategory::Low;
        let (clip, rirs) = render_scene(&scene, &cfg).unwrap();
        let source = &scene.sources[0];

        let doa = pseudo_intensity_doa(&clip.channels).unwrap();
        let truth = unit_from_angles(source.azimuth, source.elevation);
        errors.push(angular_separation_deg(&truth, &doa.direction));

        let expected_peak =
            (source.distance / SPEED_OF_SOUND * scene.sample_rate as f64).round() as i64;
        let peak = peak_index(rirs[0].w()) as i64;
        worst_peak_off = worst_peak_off.max((peak - expected_peak).abs());
        assert!(
            (peak - expected_peak).abs() <= 1,
            "scene {i}: peak {peak} vs expected {expected_peak}"
        );
    }
    errors.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = errors[errors.len() / 2];
    let max = errors[errors.len() - 1];
    assert!(median < 3.0, "median doa error {median}");
    assert!(max < 10.0, "max doa error {max}");
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "took {elapsed:.1} s");
    pass(
        "doa_round_trip",
        format!(
            "200 scenes, median {median:.4} deg, max {max:.4} deg, peak within {worst_peak_off} sample(s), {elapsed:.1} s"
        ),
    );
}

fn place_source(rng: &mut impl Rng, room: &RoomSpec, listener: &ListenerSpec) -> SourceSpec {
    let pos = Vec3::new(
        rng.random_range(0.5..room.dims.x - 0.5),
        rng.random_range(0.5..room.dims.y - 0.5),
        rng.random_range(0.5..room.dims.z - 0.5),
    );
    let rel = pos.sub(&listener.position);
    let (az, el) = foa_scene::geometry::angles_from_vec(&rel);
    SourceSpec {
        source_id: 0,
        class_label: "tone".into(),
        domain: Domain::Music,
        azimuth: az,
        elevation: el,
        distance: rel.norm(),
        cartesian: pos,
        gain_db: 0.0,
        dry_ref: "synth:tone".into(),
    }
}

/// Simulated decay versus the Sabine prediction across the moderate
/// absorption bracket, in the near-cubic rooms where the diffuse-field
/// assumption behind Sabine applies.
#[test]
fn reverb_sanity() {
    // Hand-verified Sabine reference: V = 60 m^3, S = 94 m^2, alpha 0.2.
    let reference = RoomSpec {
        dims: Vec3::new(5.0, 4.0, 3.0),
        size_category: SizeCategory::Small,
        absorption: 0.2,
        reverb_category: ReverbCategory::Medium,
    };
    let rt = sabine_rt60(&reference).unwrap();
    assert!((rt - 0.5138) < 1e-4 && (0.5138 - rt) < 1e-4, "sabine reference {rt}");

    let mut rng = seeded_rng(0xBEEF);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let mut room = sample_room(&mut rng, RangePreset::PerAxis, Some(SizeCategory::Small));
        room.absorption = 0.25 + 0.25 * (i as f64 / 49.0);
        room.reverb_category = ReverbCategory::Medium;
        let listener = sample_listener(&mut rng, &room, 1.7).unwrap();
        let source = place_source(&mut rng, &room, &listener);
        let per_bounce = -10.0 * (1.0f64 - room.absorption).log10();
        let depth = -10.0 - (8.0 * per_bounce).max(8.0);
        let params = foa_scene::acoustics::RirParams {
            max_order: Some(max_order_for_decay(&room, depth)),
            ..Default::default()
        };
        let rir =
            foa_scene::acoustics::compute_foa_rir(&room, &source, &listener, &params).unwrap();
        let estimated = estimate_rir_t60(&rir, &room, source.distance).unwrap();
        let sabine = sabine_rt60(&room).unwrap();
        let rel = (estimated - sabine).abs() / sabine;
        assert!(
            rel < 0.25,
            "room {i} (alpha {:.3}): schroeder {estimated:.3} vs sabine {sabine:.3} ({:+.1}%)",
            room.absorption,
            100.0 * (estimated - sabine) / sabine
        );
        worst = worst.max(rel);
    }
    pass("reverb_sanity", format!("50 rooms, worst |error| {:.1}% (tolerance 25%)", worst * 100.0));
}

/// Room-category and source-domain distributions plus hard clearance
/// checks over ten thousand draws.
#[test]
fn sampling_conformance() {
    let mut rng = seeded_rng(0x5EED);
    let mut cat_counts = [0usize; 3];
    for _ in 0..10_000 {
        let room = sample_room(&mut rng, RangePreset::PerAxis, None);
        cat_counts[match room.size_category {
            SizeCategory::Small => 0,
            SizeCategory::Medium => 1,
            SizeCategory::Large => 2,
        }] += 1;
    }
    for (count, expect) in cat_counts.iter().zip([0.6, 0.3, 0.1]) {
        let freq = *count as f64 / 10_000.0;
        assert!((freq - expect).abs() < 0.02, "category freq {freq} vs {expect}");
    }

    let cfg = SamplerConfig::default();
    let palette = SourcePalette::synthetic();
    let mut domain_counts = [0usize; 3];
    let mut n_sources = 0usize;
    let mut violations = 0usize;
    let mut scene_idx = 0u64;
    while n_sources < 10_000 {
        let scene = sample_scene_from_master(0xD04, scene_idx, &cfg, &palette).unwrap();
        scene_idx += 1;
        if !foa_scene::geometry::inside_with_clearance(
            &scene.listener.position,
            &scene.room.dims,
            0.5,
        ) {
            violations += 1;
        }
        for s in &scene.sources {
            domain_counts[match s.domain {
                Domain::Environmental => 0,
                Domain::Speech => 1,
                Domain::Music => 2,
            }] += 1;
            n_sources += 1;
            if !foa_scene::geometry::inside_with_clearance(
                &s.cartesian,
                &scene.room.dims,
                0.5 - 1e-9,
            ) {
                violations += 1;
            }
        }
    }
    assert_eq!(violations, 0, "clearance violations");
    let mut domain_freqs = [0.0f64; 3];
    for (f, c) in domain_freqs.iter_mut().zip(domain_counts) {
        *f = c as f64 / n_sources as f64;
    }
    for (freq, expect) in domain_freqs.iter().zip([0.5, 0.3, 0.2]) {
        assert!((freq - expect).abs() < 0.02, "domain freq {freq} vs {expect}");
    }
    pass(
        "sampling_conformance",
        format!(
            "10k rooms at {:.3}/{:.3}/{:.3}, {n_sources} sources at {:.3}/{:.3}/{:.3}, 0 clearance violations",
            cat_counts[0] as f64 / 10_000.0,
            cat_counts[1] as f64 / 10_000.0,
            cat_counts[2] as f64 / 10_000.0,
            domain_freqs[0],
            domain_freqs[1],
            domain_freqs[2]
        ),
    );
}

fn build_graphs(master: u64, n: usize) -> Vec<SceneGraph> {
    let cfg = SamplerConfig::default();
    let palette = SourcePalette::synthetic();
    (0..n as u64)
        .map(|i| {
            let scene = sample_scene_from_master(master, i, &cfg, &palette).unwrap();
            let acoustics = room_acoustics(&scene.room).unwrap();
            build_scene_graph(&scene, &acoustics, &RtsdConfig::default(), None)
        })
        .collect()
}

fn thousand_item_benchmark() -> (Vec<SceneGraph>, Vec<QuestionItem>) {
    let graphs = build_graphs(0xBE7C, 240);
    let rules = RuleTable::builtin();
    let ctx = GenContext::new(rules);
    let mut rng = seeded_rng(0xBE7C);
    let set =
        assemble_benchmark(&graphs, &mut rng, 1000, &LevelTargets::default(), &ctx, 0xBE7C).unwrap();
    (graphs, set.items)
}

/// Level mix, oracle soundness over the serialized files, and answer-key
/// uniformity of a thousand-item benchmark.
#[test]
fn benchmark_soundness() {
    let (graphs, items) = thousand_item_benchmark();
    assert_eq!(items.len(), 1000);
    let count = |l: Level| items.iter().filter(|i| i.level == l).count() as f64 / 1000.0;
    let (l1, l2, l3) = (count(Level::L1), count(Level::L2), count(Level::L3));
    assert!((l1 - 0.321).abs() < 0.05, "L1 mix {l1}");
    assert!((l2 - 0.285).abs() < 0.05, "L2 mix {l2}");
    assert!((l3 - 0.394).abs() < 0.05, "L3 mix {l3}");

    // Independent pass over serialized artifacts: benchmark JSONL on disk,
    // graphs re-parsed from their RTSD JSON rendering.
    let dir = tempfile::tempdir().unwrap();
    let bench_path = dir.path().join("benchmark.jsonl");
    let set = foa_scene::benchgen::BenchmarkSet {
        schema_version: 1,
        seed: 0,
        level_mix: [l1, l2, l3],
        items: items.clone(),
    };
    write_benchmark_jsonl(&set, &bench_path).unwrap();
    let reread = read_benchmark_jsonl(&bench_path).unwrap();
    let rules = RuleTable::builtin();
    let ctx = GenContext::new(rules);
    let mut validated = 0usize;
    for item in &reread {
        let graph = graphs.iter().find(|g| g.scene_id == item.scene_id).unwrap();
        let doc: RtsdDoc = serde_json::from_str(&render_rtsd(graph).json).unwrap();
        assert!(validate_item(item, &doc.graph, &ctx), "item {} failed", item.item_id);
        assert!(foa_scene::benchgen::lint_leakage(item, &doc.graph), "lint {}", item.item_id);
        validated += 1;
    }
    assert_eq!(validated, 1000);

    let mut key_counts = [0usize; 4];
    for item in &items {
        key_counts[item.answer.index()] += 1;
    }
    let mut chi2 = 0.0;
    for count in key_counts {
        let freq = count as f64 / 1000.0;
        assert!((freq - 0.25).abs() < 0.04, "answer key freq {freq}");
        chi2 += (count as f64 - 250.0).powi(2) / 250.0;
    }
    // 3 dof at alpha = 0.01.
    assert!(chi2 < 11.34, "answer-position chi2 {chi2}");
    pass(
        "benchmark_soundness",
        format!(
            "1000 items, mix {:.1}/{:.1}/{:.1}%, 100% oracle-valid, keys {:?}, chi2 {chi2:.2}",
            l1 * 100.0,
            l2 * 100.0,
            l3 * 100.0,
            key_counts
        ),
    );
}

/// Chance levels of the two protocols under a uniform random responder.
#[test]
fn protocol_baselines() {
    let (_, items) = thousand_item_benchmark();
    let mut rng = seeded_rng(0xCAFE);
    let cfg = RewardConfig::default();

    let mut mcqa_correct = 0usize;
    let mut mcqa_trials = 0usize;
    for _ in 0..10 {
        let responses: Vec<ResponseRecord> = items
            .iter()
            .map(|i| ResponseRecord {
                item_id: i.item_id.clone(),
                text: format!("<answer>{}</answer>", ['A', 'B', 'C', 'D'][rng.random_range(0..4)]),
            })
            .collect();
        let report = score_run(&responses, &items, Protocol::Mcqa, &cfg).unwrap();
        mcqa_correct += (report.overall_acc * report.n_items as f64).round() as usize;
        mcqa_trials += report.n_items;
    }
    let mcqa_acc = mcqa_correct as f64 / mcqa_trials as f64;
    assert_eq!(mcqa_trials, 10_000);
    assert!((mcqa_acc - 0.25).abs() < 0.02, "mcqa chance {mcqa_acc}");

    let subs = expand_per_option(&items);
    let mut bin_correct = 0usize;
    let mut bin_trials = 0usize;
    for _ in 0..3 {
        let responses: Vec<ResponseRecord> = subs
            .iter()
            .map(|s| ResponseRecord {
                item_id: s.sub_id.clone(),
                text: format!("<answer>{}</answer>", ['A', 'B'][rng.random_range(0..2)]),
            })
            .collect();
        let report = score_run(&responses, &items, Protocol::PerOptionBinary, &cfg).unwrap();
        bin_correct += (report.overall_acc * report.n_items as f64).round() as usize;
        bin_trials += report.n_items;
    }
    let bin_acc = bin_correct as f64 / bin_trials as f64;
    assert!(bin_trials >= 10_000);
    assert!((bin_acc - 0.50).abs() < 0.02, "binary chance {bin_acc}");
    pass(
        "protocol_baselines",
        format!("mcqa {mcqa_acc:.4} over {mcqa_trials} trials, per-option {bin_acc:.4} over {bin_trials} trials"),
    );
}

/// The weight vector and three hand-computed reward totals, exactly.
#[test]
fn reward_exactness() {
    assert_eq!((W_FMT, W_VAL, W_COR, W_LEN, W_EVD, W_REF), (2.0, 1.0, 3.0, 0.5, 0.5, 0.2));
    let cfg = RewardConfig::default();

    let think = "I can hear one isolated source on the right side, quite far away from me here.";
    assert!((40..=400).contains(&think.chars().count()));
    let full = parse_response(&format!("<think>{think}</think><answer>B</answer>"));
    let r1 = reward_for_key(&full, AnswerKey::B, &cfg);
    assert_eq!(r1.total, 7.0);

    let bare = parse_response("B");
    let r2 = reward_for_key(&bare, AnswerKey::B, &cfg);
    assert_eq!(r2.total, 0.0);

    let leaky = parse_response("<think>scene description</think><answer>C</answer>");
    let r3 = reward_for_key(&leaky, AnswerKey::B, &cfg);
    assert_eq!(r3.total, 2.8);
    pass(
        "reward_exactness",
        format!("totals {} / {} / {} with weights (2, 1, 3, 0.5, 0.5, 0.2)", r1.total, r2.total, r3.total),
    );
}

/// The single-source far-field reference scene: exact numbers in the scene
/// description and correctly keyed distance/azimuth questions.
#[test]
fn golden_scene_description() {
    let room = RoomSpec {
        dims: Vec3::new(30.0, 35.0, 15.0),
        size_category: SizeCategory::Large,
        absorption: 0.99,
        reverb_category: ReverbCategory::Low,
    };
    let listener = ListenerSpec { position: Vec3::new(10.0, 20.0, 5.0), orientation: 0.0 };
    let (az, el, dist) = (317.0, -13.0, 17.4);
    let source = SourceSpec {
        source_id: 0,
        class_label: "breathing".into(),
        domain: Domain::Environmental,
        azimuth: az,
        elevation: el,
        distance: dist,
        cartesian: SourceSpec::cartesian_from_spherical(&listener, az, el, dist),
        gain_db: 0.0,
        dry_ref: "synth:noise_burst".into(),
    };
    let scene = SceneSpec {
        schema_version: 1,
        scene_id: "golden".into(),
        seed: 0,
        room: room.clone(),
        listener,
        sources: vec![source],
        duration_s: 10.0,
        sample_rate: 16_000,
    };
    scene.validate(3, None).unwrap();
    let acoustics = room_acoustics(&room).unwrap();
    assert_eq!(acoustics.rt60_s, 0.0);
    let graph = build_scene_graph(&scene, &acoustics, &RtsdConfig::default(), None);
    let rtsd = render_rtsd(&graph);
    let v: serde_json::Value = serde_json::from_str(&rtsd.json).unwrap();
    assert_eq!(v["nodes"][0]["azimuth_deg"], serde_json::json!(317.0));
    assert_eq!(v["nodes"][0]["elevation_deg"], serde_json::json!(-13.0));
    assert_eq!(v["nodes"][0]["distance_m"], serde_json::json!(17.4));
    assert_eq!(v["nodes"][0]["class_label"], serde_json::json!("breathing"));
    assert_eq!(v["room"]["acoustics"]["rt60_s"], serde_json::json!(0.0));
    assert_eq!(v["room"]["acoustics"]["mean_absorption"], serde_json::json!(0.99));
    assert!(rtsd.text.contains("anechoic"));
    assert_eq!(graph.nodes[0].sector, Sector::FrontRight);

    let rules = RuleTable::builtin();
    let ctx = GenContext::new(rules);
    let mut rng = seeded_rng(0x601D);
    let items = gen_l1(&graph, &ctx, &mut rng);
    let dist_q = items.iter().find(|i| i.task == TaskKind::EstimateDistance).unwrap();
    assert_eq!(dist_q.options[dist_q.answer.index()], "about 17.4 m away");
    let az_q = items.iter().find(|i| i.task == TaskKind::LocalizeAzimuth).unwrap();
    assert_eq!(az_q.options[az_q.answer.index()], "front-right");
    pass(
        "golden_scene_description",
        "azimuth 317, elevation -13, distance 17.4, rt60 0.0 reproduced; distance/azimuth keys correct".into(),
    );
}

/// Byte-identical WAV, scene-description and benchmark files across two
/// runs with the same seed and config.
#[test]
fn pipeline_determinism() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut outputs = Vec::new();
    for dir in &dirs {
        let cfg = PipelineConfig {
            seed: 0xD37,
            n_scenes: 8,
            duration_s: 0.5,
            out_dir: dir.path().display().to_string(),
            workers: Some(4),
            ..PipelineConfig::default()
        };
        let (manifest, manifest_path) = run_simulate(&cfg).unwrap();
        run_bench(&manifest_path, 24, 0xD37).unwrap();
        outputs.push((manifest, manifest_path.parent().unwrap().to_path_buf()));
    }
    let (ma, dir_a) = &outputs[0];
    let (mb, dir_b) = &outputs[1];
    assert_eq!(ma.scenes.len(), mb.scenes.len());
    let mut checked = 0;
    for (ra, rb) in ma.scenes.iter().zip(mb.scenes.iter()) {
        assert_eq!(ra.scene_id, rb.scene_id);
        for name in [&ra.wav, &ra.rtsd_json, &ra.rtsd_txt, &ra.scene_json] {
            let a = std::fs::read(dir_a.join(name)).unwrap();
            let b = std::fs::read(dir_b.join(name)).unwrap();
            assert_eq!(a, b, "file {name} differs between runs");
            checked += 1;
        }
    }
    let bench_a = std::fs::read(dir_a.join("benchmark.jsonl")).unwrap();
    let bench_b = std::fs::read(dir_b.join("benchmark.jsonl")).unwrap();
    assert_eq!(bench_a, bench_b, "benchmark files differ");
    pass(
        "pipeline_determinism",
        format!("8 scenes, {checked} artifact files plus benchmark byte-identical"),
    );
}

// Independent exhaustive matcher: permutations of the larger side's index
// list (Heap's algorithm), prefix-assigned to the smaller side.
fn oracle_min_cost(pred: &[(f64, f64)], truth: &[(f64, f64)]) -> f64 {
    fn permutations(n: usize) -> Vec<Vec<usize>> {
        let mut a: Vec<usize> = (0..n).collect();
        let mut out = vec![a.clone()];
        let mut c = vec![0usize; n];
        let mut i = 0;
        while i < n {
            if c[i] < i {
                if i % 2 == 0 {
                    a.swap(0, i);
                } else {
                    a.swap(c[i], i);
                }
                out.push(a.clone());
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        out
    }
    let pv: Vec<Vec3> = pred.iter().map(|(a, e)| unit_from_angles(*a, *e)).collect();
    let tv: Vec<Vec3> = truth.iter().map(|(a, e)| unit_from_angles(*a, *e)).collect();
    let pred_small = pv.len() <= tv.len();
    let (small, large) = if pred_small { (&pv, &tv) } else { (&tv, &pv) };
    let mut best = f64::INFINITY;
    for perm in permutations(large.len()) {
        let cost: f64 = (0..small.len())
            .map(|i| angular_separation_deg(&small[i], &large[perm[i]]))
            .sum();
        if cost < best {
            best = cost;
        }
    }
    best
}

/// The permutation matcher agrees exactly with an exhaustive oracle on a
/// thousand random instances, and the reported aggregates recompute from
/// the reported matchings.
#[test]
fn localization_matching() {
    let mut rng = seeded_rng(0x10CA);
    let room = RoomSpec {
        dims: Vec3::new(30.0, 35.0, 15.0),
        size_category: SizeCategory::Large,
        absorption: 0.5,
        reverb_category: ReverbCategory::Low,
    };
    let listener = ListenerSpec { position: Vec3::new(10.0, 20.0, 5.0), orientation: 0.0 };
    let mut preds = Vec::new();
    let mut truths = Vec::new();
    for i in 0..1000 {
        let k_true = rng.random_range(1..=3);
        let k_pred = rng.random_range(1..=3);
        let mk_angles = |rng: &mut foa_scene::rng::ChaCha8Rng| {
            (rng.random_range(0.0..360.0), rng.random_range(-90.0..90.0), rng.random_range(0.5..12.0))
        };
        let sources: Vec<SourceSpec> = (0..k_true)
            .map(|j| {
                let (az, el, d) = mk_angles(&mut rng);
                SourceSpec {
                    source_id: j,
                    class_label: format!("class{j}"),
                    domain: Domain::Environmental,
                    azimuth: az,
                    elevation: el,
                    distance: d,
                    cartesian: SourceSpec::cartesian_from_spherical(&listener, az, el, d),
                    gain_db: 0.0,
                    dry_ref: "synth:tone".into(),
                }
            })
            .collect();
        let scene = SceneSpec {
            schema_version: 1,
            scene_id: format!("inst{i}"),
            seed: 0,
            room: room.clone(),
            listener: listener.clone(),
            sources,
            duration_s: 1.0,
            sample_rate: 16_000,
        };
        let graph =
            build_scene_graph(&scene, &room_acoustics(&room).unwrap(), &RtsdConfig::default(), None);
        truths.push(graph);
        preds.push(ScenePrediction {
            scene_id: format!("inst{i}"),
            sources: (0..k_pred)
                .map(|_| {
                    let (az, el, d) = mk_angles(&mut rng);
                    PredictedSource {
                        azimuth_deg: az,
                        elevation_deg: el,
                        distance_m: d,
                        class: None,
                    }
                })
                .collect(),
        });
    }
    let eval = localization_metrics(&preds, &truths).unwrap();

    // Per-instance: the matcher's cost equals the oracle minimum exactly.
    let mut ang_sum = 0.0;
    let mut dist_sum = 0.0;
    let mut pairs = 0usize;
    let mut exact = 0usize;
    for (i, (pred, graph)) in preds.iter().zip(&truths).enumerate() {
        let impl_cost: f64 = eval.matching[i]
            .iter()
            .map(|(pi, ti)| {
                angular_separation_deg(
                    &unit_from_angles(pred.sources[*pi].azimuth_deg, pred.sources[*pi].elevation_deg),
                    &unit_from_angles(graph.nodes[*ti].azimuth_deg, graph.nodes[*ti].elevation_deg),
                )
            })
            .sum();
        let p: Vec<(f64, f64)> =
            pred.sources.iter().map(|s| (s.azimuth_deg, s.elevation_deg)).collect();
        let t: Vec<(f64, f64)> =
            graph.nodes.iter().map(|n| (n.azimuth_deg, n.elevation_deg)).collect();
        let oracle = oracle_min_cost(&p, &t);
        assert_eq!(impl_cost, oracle, "instance {i}");
        for (pi, ti) in &eval.matching[i] {
            ang_sum += angular_separation_deg(
                &unit_from_angles(pred.sources[*pi].azimuth_deg, pred.sources[*pi].elevation_deg),
                &unit_from_angles(graph.nodes[*ti].azimuth_deg, graph.nodes[*ti].elevation_deg),
            );
            dist_sum += (pred.sources[*pi].distance_m - graph.nodes[*ti].distance_m).abs();
            pairs += 1;
        }
        if pred.sources.len() == graph.nodes.len() {
            exact += 1;
        }
    }
    assert_eq!(eval.mean_angular_error_deg, ang_sum / pairs as f64);
    assert_eq!(eval.mean_distance_error_m, dist_sum / pairs as f64);
    assert_eq!(eval.count_accuracy, exact as f64 / 1000.0);
    pass(
        "localization_matching",
        format!(
            "1000 instances match the exhaustive oracle exactly; count acc {:.3}, mean angular {:.2} deg",
            eval.count_accuracy, eval.mean_angular_error_deg
        ),
    );
}
