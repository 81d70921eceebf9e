use super::*;
use crate::acoustics::room_acoustics;
use crate::geometry::Vec3;
use crate::rng::seeded_rng;
use crate::rtsd::{build_scene_graph, DistanceBand, ElevationBand, SceneGraph};
use crate::sampler::{
    sample_scene_from_master, Domain, ListenerSpec, ReverbCategory, RoomSpec, SamplerConfig,
    SceneSpec, SizeCategory, SourcePalette, SourceSpec,
};

fn graph_from_seed(master: u64, idx: u64) -> SceneGraph {
    let cfg = SamplerConfig::default();
    let palette = SourcePalette::synthetic();
    let scene = sample_scene_from_master(master, idx, &cfg, &palette).unwrap();
    let acoustics = room_acoustics(&scene.room).unwrap();
    build_scene_graph(&scene, &acoustics, &RtsdConfig::default(), None)
}

/// Hand-built scene: sources at prescribed spherical coordinates in a
/// large anechoic-ish room so every placement stays valid.
fn scripted_graph(specs: &[(&str, Domain, f64, f64, f64)], absorption: f64) -> SceneGraph {
    let room = RoomSpec {
        dims: Vec3::new(30.0, 35.0, 15.0),
        size_category: SizeCategory::Large,
        absorption,
        reverb_category: ReverbCategory::Low,
    };
    let listener = ListenerSpec { position: Vec3::new(10.0, 20.0, 5.0), orientation: 0.0 };
    let sources = specs
        .iter()
        .enumerate()
        .map(|(i, (class, domain, az, el, d))| SourceSpec {
            source_id: i,
            class_label: class.to_string(),
            domain: *domain,
            azimuth: *az,
            elevation: *el,
            distance: *d,
            cartesian: SourceSpec::cartesian_from_spherical(&listener, *az, *el, *d),
            gain_db: 0.0,
            dry_ref: format!("synth:{class}"),
        })
        .collect();
    let scene = SceneSpec {
        schema_version: 1,
        scene_id: "scripted".into(),
        seed: 0,
        room: room.clone(),
        listener,
        sources,
        duration_s: 2.0,
        sample_rate: 16_000,
    };
    let acoustics = room_acoustics(&room).unwrap();
    build_scene_graph(&scene, &acoustics, &RtsdConfig::default(), None)
}

#[test]
fn count_question_reads_off_the_ground_truth() {
    let graph = scripted_graph(
        &[
            ("tone", Domain::Music, 10.0, 0.0, 2.0),
            ("chirp", Domain::Speech, 200.0, 10.0, 5.0),
        ],
        0.3,
    );
    let rules = RuleTable::builtin();
    let ctx = GenContext::new(rules);
    let mut rng = seeded_rng(1);
    let items = gen_l1(&graph, &ctx, &mut rng);
    let count = items.iter().find(|i| i.task == TaskKind::CountObjects).unwrap();
    assert_eq!(count.options[count.answer.index()], "2");
    assert_eq!(count.options.len(), 4);
}

#[test]
fn azimuth_question_keys_to_the_left_sector() {
    let graph = scripted_graph(&[("tone", Domain::Music, 90.0, 0.0, 3.0)], 0.3);
    let rules = RuleTable::builtin();
    let ctx = GenContext::new(rules);
    let mut rng = seeded_rng(2);
    let items = gen_l1(&graph, &ctx, &mut rng);
    let az = items.iter().find(|i| i.task == TaskKind::LocalizeAzimuth).unwrap();
    assert_eq!(az.options[az.answer.index()], "left");
    for (i, opt) in az.options.iter().enumerate() {
        if i != az.answer.index() {
            assert_ne!(opt, "left");
        }
    }
}

#[test]
fn distance_options_bracket_the_truth_exactly_once() {
    // Golden numbers: 17.4 m is far-band; exactly one window contains it.
    let graph = scripted_graph(&[("breathing", Domain::Environmental, 317.0, -13.0, 17.4)], 0.99);
    assert_eq!(graph.nodes[0].distance_band, DistanceBand::Far);
    assert_eq!(graph.nodes[0].elevation_band, ElevationBand::EyeLevel);
    let rules = RuleTable::builtin();
    let ctx = GenContext::new(rules);
    let mut rng = seeded_rng(3);
    let items = gen_l1(&graph, &ctx, &mut rng);
    let dist = items.iter().find(|i| i.task == TaskKind::EstimateDistance).unwrap();
    let containing = dist
        .meta
        .claims
        .iter()
        .filter(|c| matches!(c, Claim::DistanceWithin { lo_m, hi_m, .. } if *lo_m <= 17.4 && 17.4 <= *hi_m))
        .count();
    assert_eq!(containing, 1);
    assert!(dist.options[dist.answer.index()].contains("17.4"));
}

#[test]
fn closer_question_prefers_the_nearer_source() {
    let graph = scripted_graph(
        &[
            ("tone", Domain::Music, 30.0, 0.0, 2.0),
            ("chirp", Domain::Speech, 200.0, 5.0, 5.0),
        ],
        0.3,
    );
    let rules = RuleTable::builtin();
    let ctx = GenContext::new(rules);
    let mut rng = seeded_rng(4);
    let items = gen_l2(&graph, &ctx, &mut rng);
    let rel = items.iter().find(|i| i.task == TaskKind::RelativeDistance).unwrap();
    assert_eq!(rel.options[rel.answer.index()], "The tone");
}

#[test]
fn left_right_question_follows_the_sign_convention() {
    // az 45 has y > 0 (left); az 315 has y < 0 (right).
    let graph = scripted_graph(
        &[
            ("tone", Domain::Music, 45.0, 0.0, 3.0),
            ("chirp", Domain::Speech, 315.0, 0.0, 3.0),
        ],
        0.3,
    );
    let rules = RuleTable::builtin();
    let ctx = GenContext::new(rules);
    let mut rng = seeded_rng(5);
    let items = gen_l2(&graph, &ctx, &mut rng);
    let rel = items.iter().find(|i| i.task == TaskKind::RelativeDirection).unwrap();
    // The question names the pair in node order (tone first), so the key
    // must be "To the left".
    assert!(rel.question.contains("the tone"));
    assert_eq!(rel.options[rel.answer.index()], "To the left");
}

#[test]
fn binding_distractors_are_rejected_as_answers() {
    let graph = graph_from_seed(11, 4);
    let rules = RuleTable::builtin();
    let ctx = GenContext::new(rules);
    let mut rng = seeded_rng(6);
    let items = gen_l2(&graph, &ctx, &mut rng);
    for item in items {
        assert!(validate_item(&item, &graph, &ctx));
        // Re-keying the item to any distractor must fail validation.
        for k in AnswerKey::ALL {
            if k != item.answer {
                let mut flipped = item.clone();
                flipped.answer = k;
                assert!(!validate_item(&flipped, &graph, &ctx), "{:?}", item.task);
            }
        }
    }
}

#[test]
fn corrupted_option_text_fails_validation() {
    let graph = graph_from_seed(12, 1);
    let rules = RuleTable::builtin();
    let ctx = GenContext::new(rules);
    let mut rng = seeded_rng(7);
    let items = gen_scene_items(&graph, &ctx, &mut rng);
    assert!(!items.is_empty());
    let mut item = items[0].clone();
    item.options[0] = format!("{} (edited)", item.options[0]);
    assert!(!validate_item(&item, &graph, &ctx));
    // A distractor textually equal to the truth must also fail.
    let mut dup = items[0].clone();
    let ans = dup.answer.index();
    let other = (ans + 1) % 4;
    dup.options[other] = dup.options[ans].clone();
    dup.meta.claims[other] = dup.meta.claims[ans].clone();
    assert!(!validate_item(&dup, &graph, &ctx));
}

#[test]
fn rotation_by_180_moves_az_30_to_rear_right() {
    let graph = scripted_graph(&[("tone", Domain::Music, 30.0, 0.0, 3.0)], 0.3);
    let rotated = rotate_observer(&graph, 180.0);
    assert!((rotated.nodes[0].azimuth_deg - 210.0).abs() < 1e-9);
    assert_eq!(rotated.nodes[0].sector, crate::rtsd::Sector::RearRight);
}

#[test]
fn rotation_is_periodic_and_involutive() {
    let graph = graph_from_seed(13, 2);
    let full = rotate_observer(&graph, 360.0);
    for (a, b) in graph.nodes.iter().zip(full.nodes.iter()) {
        assert!((a.azimuth_deg - b.azimuth_deg).abs() < 1e-9);
        assert_eq!(a.sector, b.sector);
    }
    let twice = rotate_observer(&rotate_observer(&graph, 180.0), 180.0);
    for (a, b) in graph.nodes.iter().zip(twice.nodes.iter()) {
        assert!((a.azimuth_deg - b.azimuth_deg).abs() < 1e-9);
        assert_eq!(a.sector, b.sector);
        assert_eq!(a.distance_m, b.distance_m);
    }
}

#[test]
fn removal_shrinks_the_graph_and_reorders_distances() {
    let graph = scripted_graph(
        &[
            ("tone", Domain::Music, 30.0, 0.0, 2.0),
            ("chirp", Domain::Speech, 100.0, 10.0, 4.0),
            ("noise_burst", Domain::Environmental, 250.0, -20.0, 6.5),
        ],
        0.3,
    );
    let reduced = remove_source(&graph, 0).unwrap();
    assert_eq!(reduced.nodes.len(), 2);
    for e in &reduced.edges {
        assert_ne!(e.subject_id, 0);
        assert_ne!(e.object_id, 0);
    }
    // Closest was removed; brute-force new minimum is the old runner-up.
    let min = reduced
        .nodes
        .iter()
        .min_by(|a, b| a.distance_m.partial_cmp(&b.distance_m).unwrap())
        .unwrap();
    assert_eq!(min.class_label, "chirp");
    assert!(matches!(remove_source(&graph, 99), Err(BenchError::UnknownObject(99))));
}

#[test]
fn multi_hop_names_the_farthest_class_and_sector() {
    let graph = scripted_graph(
        &[
            ("tone", Domain::Music, 10.0, 0.0, 2.0),
            ("chirp", Domain::Speech, 90.0, 0.0, 5.0),
            ("noise_burst", Domain::Environmental, 180.0, 0.0, 3.0),
        ],
        0.3,
    );
    let rules = RuleTable::builtin();
    let ctx = GenContext::new(rules);
    let mut rng = seeded_rng(8);
    let items = gen_l3(&graph, &ctx, &mut rng);
    let hop = items.iter().find(|i| i.task == TaskKind::MultiHopQuery).unwrap();
    assert_eq!(hop.options[hop.answer.index()], "The chirp, to the left");
}

#[test]
fn physically_impossible_distance_exceeds_the_room() {
    let graph = scripted_graph(&[("tone", Domain::Music, 10.0, 0.0, 2.0)], 0.3);
    let rules = RuleTable::builtin();
    let ctx = GenContext::new(rules);
    let mut rng = seeded_rng(9);
    let items = gen_l3(&graph, &ctx, &mut rng);
    let phys = items.iter().find(|i| i.task == TaskKind::PhysicalConsistency).unwrap();
    let max_ray = crate::geometry::max_ray_in_box(&graph.listener.position, &graph.room.spec.dims);
    let truth = &phys.meta.claims[phys.answer.index()];
    match truth {
        Claim::ImpossibleDistance { distance_m } => assert!(*distance_m > max_ray),
        other => panic!("unexpected claim {other:?}"),
    }
}

#[test]
fn rotation_answers_recheck_against_the_rotated_graph() {
    let rules = RuleTable::builtin();
    let ctx = GenContext::new(rules);
    let mut rng = seeded_rng(10);
    for idx in 0..20 {
        let graph = graph_from_seed(14, idx);
        for item in gen_l3(&graph, &ctx, &mut rng) {
            if item.task != TaskKind::RotateObserver {
                continue;
            }
            let rotated = rotate_observer(&graph, 180.0);
            let Claim::SectorAfterRotation { class, sector, .. } =
                &item.meta.claims[item.answer.index()]
            else {
                panic!("wrong claim kind")
            };
            let node = rotated.nodes.iter().find(|n| n.class_label == *class).unwrap();
            assert_eq!(node.sector, *sector);
        }
    }
}

#[test]
fn transcript_task_appears_only_with_transcripts() {
    let rules = RuleTable::builtin();
    let mut ctx = GenContext::new(rules);
    let mut graph = scripted_graph(
        &[
            ("speech", Domain::Speech, 20.0, 0.0, 3.0),
            ("tone", Domain::Music, 200.0, 0.0, 5.0),
        ],
        0.3,
    );
    let mut rng = seeded_rng(11);
    let without = gen_l1(&graph, &ctx, &mut rng);
    assert!(!without.iter().any(|i| i.task == TaskKind::IdentifySpeechTranscript));

    graph.nodes[0].transcript = Some("open the window".to_string());
    ctx.transcript_pool = vec![
        "open the window".into(),
        "close the door".into(),
        "turn on the light".into(),
        "bring me the keys".into(),
    ];
    let with = gen_l1(&graph, &ctx, &mut rng);
    let t = with.iter().find(|i| i.task == TaskKind::IdentifySpeechTranscript).unwrap();
    assert_eq!(t.options[t.answer.index()], "\u{201c}open the window\u{201d}");
}

#[test]
fn every_generated_item_validates_and_passes_the_lint() {
    let rules = RuleTable::builtin();
    let ctx = GenContext::new(rules);
    let mut rng = seeded_rng(12);
    let mut n = 0;
    for idx in 0..40 {
        let graph = graph_from_seed(15, idx);
        for item in gen_scene_items(&graph, &ctx, &mut rng) {
            assert!(validate_item(&item, &graph, &ctx), "{:?}", item.task);
            assert!(lint_leakage(&item, &graph), "{:?}", item.task);
            n += 1;
        }
    }
    assert!(n > 200, "only {n} items generated");
}

#[test]
fn assembled_benchmark_hits_level_targets_and_round_trips() {
    let cfg = SamplerConfig::default();
    let palette = SourcePalette::synthetic();
    let rules = RuleTable::builtin();
    let ctx = GenContext::new(rules);
    let graphs: Vec<SceneGraph> = (0..60)
        .map(|i| {
            let scene = sample_scene_from_master(21, i, &cfg, &palette).unwrap();
            let acoustics = room_acoustics(&scene.room).unwrap();
            build_scene_graph(&scene, &acoustics, &RtsdConfig::default(), None)
        })
        .collect();
    let mut rng = seeded_rng(22);
    let set = assemble_benchmark(&graphs, &mut rng, 200, &LevelTargets::default(), &ctx, 22).unwrap();
    assert_eq!(set.items.len(), 200);
    assert!((set.level_mix[0] - 0.321).abs() < 0.05, "{:?}", set.level_mix);
    assert!((set.level_mix[1] - 0.285).abs() < 0.05);
    assert!((set.level_mix[2] - 0.394).abs() < 0.05);
    // Item ids unique.
    let mut ids: Vec<_> = set.items.iter().map(|i| i.item_id.clone()).collect();
    ids.sort();
    ids.dedup();
    assert_eq!(ids.len(), 200);

    let dir = std::env::temp_dir().join("foa_scene_bench_tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bench.jsonl");
    write_benchmark_jsonl(&set, &path).unwrap();
    let back = read_benchmark_jsonl(&path).unwrap();
    assert_eq!(back, set.items);
}

#[test]
fn assembly_is_deterministic_per_seed() {
    let cfg = SamplerConfig::default();
    let palette = SourcePalette::synthetic();
    let rules = RuleTable::builtin();
    let ctx = GenContext::new(rules);
    let graphs: Vec<SceneGraph> = (0..30)
        .map(|i| {
            let scene = sample_scene_from_master(31, i, &cfg, &palette).unwrap();
            let acoustics = room_acoustics(&scene.room).unwrap();
            build_scene_graph(&scene, &acoustics, &RtsdConfig::default(), None)
        })
        .collect();
    let mk = || {
        let mut rng = seeded_rng(77);
        assemble_benchmark(&graphs, &mut rng, 100, &LevelTargets::default(), &ctx, 77).unwrap()
    };
    let a = mk();
    let b = mk();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn insufficient_scenes_error_carries_the_shortfall() {
    let graph = graph_from_seed(41, 0);
    let rules = RuleTable::builtin();
    let ctx = GenContext::new(rules);
    let mut rng = seeded_rng(1);
    let err = assemble_benchmark(&[graph], &mut rng, 500, &LevelTargets::default(), &ctx, 1)
        .unwrap_err();
    assert!(matches!(err, BenchError::InsufficientScenes { .. }));
}

#[test]
fn lint_catches_a_full_coordinate_tuple() {
    let graph = scripted_graph(&[("tone", Domain::Music, 317.0, -13.0, 17.4)], 0.3);
    let rules = RuleTable::builtin();
    let ctx = GenContext::new(rules);
    let mut rng = seeded_rng(2);
    let mut item = gen_l1(&graph, &ctx, &mut rng)
        .into_iter()
        .find(|i| i.task == TaskKind::CountObjects)
        .unwrap();
    assert!(lint_leakage(&item, &graph));
    item.question =
        "A source at azimuth 317, elevation -13, distance 17.4 m: how many sources?".into();
    assert!(!lint_leakage(&item, &graph));
}

#[test]
fn prompt_template_asset_is_bundled() {
    let t = open_ended_prompt_template();
    assert!(t.contains("<scene_description>"));
    assert!(t.contains("open-ended"));
}
