//! Per-task question generators. Each generator returns `None` when the
//! scene cannot support the task (too few sources, ambiguous class labels,
//! ties); otherwise it produces an item that already passed the oracle.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::geometry::{max_ray_in_box, wrap_deg};
use crate::rtsd::{AudioObject, DistanceBand, ReverbDescriptor, SceneGraph, Sector};
use crate::sampler::SizeCategory;

use super::claims::{Claim, ElevRange};
use super::{validate_item, AnswerKey, GenContext, ItemMeta, QuestionItem, TaskKind};

const GEN_ATTEMPTS: usize = 8;
/// Minimum distance gap for comparison questions, meters.
const MIN_DISTANCE_GAP: f64 = 0.05;
/// Minimum left/right offset for direction comparisons, meters.
const MIN_LATERAL_GAP: f64 = 0.1;

struct Draft {
    task: TaskKind,
    question: String,
    truth: Claim,
    distractors: Vec<Claim>,
}

fn display_class(class: &str) -> String {
    class.replace('_', " ")
}

/// Nodes whose class label is unique within the scene; questions that name
/// "the X" are only well-posed for these.
fn unique_class_nodes(graph: &SceneGraph) -> Vec<&AudioObject> {
    graph
        .nodes
        .iter()
        .filter(|n| graph.nodes.iter().filter(|m| m.class_label == n.class_label).count() == 1)
        .collect()
}

fn scene_classes(graph: &SceneGraph) -> Vec<String> {
    let mut v: Vec<String> = graph.nodes.iter().map(|n| n.class_label.clone()).collect();
    v.sort();
    v.dedup();
    v
}

/// Vocabulary classes absent from the scene, shuffled.
fn absent_classes<R: Rng + ?Sized>(graph: &SceneGraph, ctx: &GenContext, rng: &mut R) -> Vec<String> {
    let present = scene_classes(graph);
    let mut pool: Vec<String> = ctx
        .class_vocab
        .iter()
        .filter(|c| !present.contains(c))
        .cloned()
        .collect();
    pool.shuffle(rng);
    pool
}

fn other_sectors<R: Rng + ?Sized>(truth: Sector, rng: &mut R, n: usize) -> Vec<Sector> {
    let mut pool: Vec<Sector> = Sector::ALL.into_iter().filter(|s| *s != truth).collect();
    pool.shuffle(rng);
    pool.truncate(n);
    pool
}

/// Turns a draft into a shuffled, validated item. `None` when option texts
/// collide or the oracle rejects the composition.
fn finalize<R: Rng + ?Sized>(
    draft: Draft,
    graph: &SceneGraph,
    ctx: &GenContext,
    rng: &mut R,
) -> Option<QuestionItem> {
    if draft.distractors.len() != 3 {
        return None;
    }
    let mut claims = vec![draft.truth];
    claims.extend(draft.distractors);
    let mut order = [0usize, 1, 2, 3];
    order.shuffle(rng);
    let answer_idx = order.iter().position(|&i| i == 0)?;
    let shuffled: Vec<Claim> = order.iter().map(|&i| claims[i].clone()).collect();
    let options: Vec<String> = shuffled.iter().map(|c| c.option_text()).collect();
    let item = QuestionItem {
        schema_version: super::BENCHMARK_SCHEMA_VERSION,
        item_id: String::new(),
        scene_id: graph.scene_id.clone(),
        level: draft.task.level(),
        task_family: draft.task.family().to_string(),
        task: draft.task,
        question: draft.question,
        options,
        answer: AnswerKey::from_index(answer_idx)?,
        meta: ItemMeta { claims: shuffled },
    };
    if validate_item(&item, graph, ctx) && super::lint_leakage(&item, graph) {
        Some(item)
    } else {
        None
    }
}

fn retry<R: Rng + ?Sized, F>(graph: &SceneGraph, ctx: &GenContext, rng: &mut R, mut f: F) -> Option<QuestionItem>
where
    F: FnMut(&mut R) -> Option<Draft>,
{
    for _ in 0..GEN_ATTEMPTS {
        if let Some(draft) = f(rng) {
            if let Some(item) = finalize(draft, graph, ctx, rng) {
                return Some(item);
            }
        }
    }
    None
}

// ---------------------------------------------------------------------
// Level 1: atomic perception
// ---------------------------------------------------------------------

fn count_objects<R: Rng + ?Sized>(graph: &SceneGraph, rng: &mut R) -> Option<Draft> {
    let n = graph.nodes.len();
    let mut pool: Vec<usize> = (1..=5).filter(|k| *k != n).collect();
    pool.shuffle(rng);
    Some(Draft {
        task: TaskKind::CountObjects,
        question: "How many independent sound sources are audible in the clip?".into(),
        truth: Claim::CountIs { n },
        distractors: pool.into_iter().take(3).map(|n| Claim::CountIs { n }).collect(),
    })
}

fn identify_event_class<R: Rng + ?Sized>(
    graph: &SceneGraph,
    ctx: &GenContext,
    rng: &mut R,
) -> Option<Draft> {
    let present = scene_classes(graph);
    let truth = present.choose(rng)?.clone();
    let pool = absent_classes(graph, ctx, rng);
    if pool.len() < 3 {
        return None;
    }
    Some(Draft {
        task: TaskKind::IdentifyEventClass,
        question: "Which of the following sounds is present in the audio?".into(),
        truth: Claim::ClassPresent { class: truth },
        distractors: pool.into_iter().take(3).map(|class| Claim::ClassPresent { class }).collect(),
    })
}

fn identify_speech_transcript<R: Rng + ?Sized>(
    graph: &SceneGraph,
    ctx: &GenContext,
    rng: &mut R,
) -> Option<Draft> {
    let with: Vec<&AudioObject> = graph.nodes.iter().filter(|n| n.transcript.is_some()).collect();
    let [node] = with.as_slice() else { return None };
    let truth = node.transcript.clone()?;
    let mut pool: Vec<String> =
        ctx.transcript_pool.iter().filter(|t| **t != truth).cloned().collect();
    if pool.len() < 3 {
        return None;
    }
    pool.shuffle(rng);
    Some(Draft {
        task: TaskKind::IdentifySpeechTranscript,
        question: "What specific phrase was spoken in the audio?".into(),
        truth: Claim::TranscriptIs { text: truth },
        distractors: pool.into_iter().take(3).map(|text| Claim::TranscriptIs { text }).collect(),
    })
}

fn localize_azimuth<R: Rng + ?Sized>(graph: &SceneGraph, rng: &mut R) -> Option<Draft> {
    let node = *unique_class_nodes(graph).choose(rng)?;
    Some(Draft {
        task: TaskKind::LocalizeAzimuth,
        question: format!(
            "What is the horizontal direction (azimuth) of the {}?",
            display_class(&node.class_label)
        ),
        truth: Claim::ClassInSector { class: node.class_label.clone(), sector: node.sector },
        distractors: other_sectors(node.sector, rng, 3)
            .into_iter()
            .map(|sector| Claim::ClassInSector { class: node.class_label.clone(), sector })
            .collect(),
    })
}

fn localize_elevation<R: Rng + ?Sized>(graph: &SceneGraph, rng: &mut R) -> Option<Draft> {
    let node = *unique_class_nodes(graph).choose(rng)?;
    let truth = ElevRange::of(node.elevation_deg);
    Some(Draft {
        task: TaskKind::LocalizeElevation,
        question: format!(
            "Where is the {} relative to your ear level?",
            display_class(&node.class_label)
        ),
        truth: Claim::ElevationIs { class: node.class_label.clone(), range: truth },
        distractors: ElevRange::ALL
            .into_iter()
            .filter(|r| *r != truth)
            .map(|range| Claim::ElevationIs { class: node.class_label.clone(), range })
            .collect(),
    })
}

fn distance_claim(class: &str, center: f64) -> Claim {
    Claim::DistanceWithin { class: class.to_string(), lo_m: 0.75 * center, hi_m: 1.25 * center }
}

fn estimate_distance<R: Rng + ?Sized>(graph: &SceneGraph, rng: &mut R) -> Option<Draft> {
    let node = *unique_class_nodes(graph).choose(rng)?;
    let d = node.distance_m;
    let max_ray = max_ray_in_box(&graph.listener.position, &graph.room.spec.dims);
    let far = if 4.0 * d > 1.2 * max_ray { 0.25 } else { 4.0 };
    let centers = [d, 0.5 * d, 2.0 * d, far * d];
    // Multiplicative spacing keeps the ±25% windows disjoint; reject the
    // rare case where rounding makes two option texts collide.
    let mut texts: Vec<String> =
        centers.iter().map(|c| format!("{:.1}", c)).collect();
    texts.dedup();
    if texts.len() < 4 {
        return None;
    }
    Some(Draft {
        task: TaskKind::EstimateDistance,
        question: format!(
            "Approximately how many meters away is the {}?",
            display_class(&node.class_label)
        ),
        truth: distance_claim(&node.class_label, centers[0]),
        distractors: centers[1..]
            .iter()
            .map(|c| distance_claim(&node.class_label, *c))
            .collect(),
    })
}

fn environment_acoustics<R: Rng + ?Sized>(graph: &SceneGraph, rng: &mut R) -> Option<Draft> {
    let size = graph.room.spec.size_category;
    let reverb = ReverbDescriptor::from_absorption(graph.room.acoustics.mean_absorption);
    let mut pool: Vec<(SizeCategory, ReverbDescriptor)> = Vec::new();
    for s in SizeCategory::ALL {
        for r in [
            ReverbDescriptor::Anechoic,
            ReverbDescriptor::HighReverb,
            ReverbDescriptor::ModerateReverb,
            ReverbDescriptor::Dry,
        ] {
            if (s, r) != (size, reverb) {
                pool.push((s, r));
            }
        }
    }
    pool.shuffle(rng);
    Some(Draft {
        task: TaskKind::EnvironmentAcoustics,
        question: "Which description best matches the room size and reverberation?".into(),
        truth: Claim::RoomIs { size, reverb },
        distractors: pool
            .into_iter()
            .take(3)
            .map(|(size, reverb)| Claim::RoomIs { size, reverb })
            .collect(),
    })
}

/// All Level-1 items this scene supports.
pub fn gen_l1<R: Rng + ?Sized>(
    graph: &SceneGraph,
    ctx: &GenContext,
    rng: &mut R,
) -> Vec<QuestionItem> {
    let mut out = Vec::new();
    let mut push = |item: Option<QuestionItem>| out.extend(item);
    push(retry(graph, ctx, rng, |r| count_objects(graph, r)));
    push(retry(graph, ctx, rng, |r| identify_event_class(graph, ctx, r)));
    push(retry(graph, ctx, rng, |r| identify_speech_transcript(graph, ctx, r)));
    push(retry(graph, ctx, rng, |r| localize_azimuth(graph, r)));
    push(retry(graph, ctx, rng, |r| localize_elevation(graph, r)));
    push(retry(graph, ctx, rng, |r| estimate_distance(graph, r)));
    push(retry(graph, ctx, rng, |r| environment_acoustics(graph, r)));
    out
}

// ---------------------------------------------------------------------
// Level 2: relational integration
// ---------------------------------------------------------------------

fn attribute_verification<R: Rng + ?Sized>(
    graph: &SceneGraph,
    ctx: &GenContext,
    rng: &mut R,
) -> Option<Draft> {
    let node = *unique_class_nodes(graph).choose(rng)?;
    let class = node.class_label.clone();
    let wrong_sector = *other_sectors(node.sector, rng, 1).first()?;
    let wrong_band = *[DistanceBand::Near, DistanceBand::Mid, DistanceBand::Far]
        .iter()
        .filter(|b| **b != node.distance_band)
        .collect::<Vec<_>>()
        .choose(rng)?;
    let wrong_class = absent_classes(graph, ctx, rng).into_iter().next()?;
    Some(Draft {
        task: TaskKind::AttributeVerification,
        question:
            "Which statement accurately describes the content, location, and distance of a source in the scene?"
                .into(),
        truth: Claim::Binding { class: class.clone(), sector: node.sector, band: node.distance_band },
        distractors: vec![
            Claim::Binding { class: class.clone(), sector: wrong_sector, band: node.distance_band },
            Claim::Binding { class: class.clone(), sector: node.sector, band: *wrong_band },
            Claim::Binding { class: wrong_class, sector: node.sector, band: node.distance_band },
        ],
    })
}

fn query_location_given_id<R: Rng + ?Sized>(graph: &SceneGraph, rng: &mut R) -> Option<Draft> {
    let node = *unique_class_nodes(graph).choose(rng)?;
    let class = node.class_label.clone();
    let truth = (node.sector, node.distance_band);
    let mut pool: Vec<(Sector, DistanceBand)> = Vec::new();
    for s in Sector::ALL {
        for b in [DistanceBand::Near, DistanceBand::Mid, DistanceBand::Far] {
            if (s, b) != truth {
                pool.push((s, b));
            }
        }
    }
    pool.shuffle(rng);
    Some(Draft {
        task: TaskKind::QueryLocationGivenId,
        question: format!("Where is the {} located?", display_class(&class)),
        truth: Claim::LocatedAt { class: class.clone(), sector: truth.0, band: truth.1 },
        distractors: pool
            .into_iter()
            .take(3)
            .map(|(sector, band)| Claim::LocatedAt { class: class.clone(), sector, band })
            .collect(),
    })
}

fn query_id_given_location<R: Rng + ?Sized>(
    graph: &SceneGraph,
    ctx: &GenContext,
    rng: &mut R,
) -> Option<Draft> {
    let node = *unique_class_nodes(graph).choose(rng)?;
    let (lo, hi) = (0.75 * node.distance_m, 1.25 * node.distance_m);
    // The place description must pick out exactly this source.
    let occupants = graph
        .nodes
        .iter()
        .filter(|n| n.sector == node.sector && n.distance_m >= lo && n.distance_m <= hi)
        .count();
    if occupants != 1 {
        return None;
    }
    let mut pool: Vec<String> = scene_classes(graph)
        .into_iter()
        .filter(|c| *c != node.class_label)
        .collect();
    pool.extend(absent_classes(graph, ctx, rng));
    if pool.len() < 3 {
        return None;
    }
    Some(Draft {
        task: TaskKind::QueryIdGivenLocation,
        question: format!(
            "What sound is coming from the {}, approximately {:.1} m away?",
            node.sector.label(),
            node.distance_m
        ),
        truth: Claim::ClassAtPlace {
            class: node.class_label.clone(),
            sector: node.sector,
            lo_m: lo,
            hi_m: hi,
        },
        distractors: pool
            .into_iter()
            .take(3)
            .map(|class| Claim::ClassAtPlace { class, sector: node.sector, lo_m: lo, hi_m: hi })
            .collect(),
    })
}

/// Pairs of unique-class nodes, shuffled.
fn unique_pairs<'a, R: Rng + ?Sized>(
    graph: &'a SceneGraph,
    rng: &mut R,
) -> Vec<(&'a AudioObject, &'a AudioObject)> {
    let nodes = unique_class_nodes(graph);
    let mut pairs = Vec::new();
    for i in 0..nodes.len() {
        for j in (i + 1)..nodes.len() {
            pairs.push((nodes[i], nodes[j]));
        }
    }
    pairs.shuffle(rng);
    pairs
}

fn relative_distance<R: Rng + ?Sized>(graph: &SceneGraph, rng: &mut R) -> Option<Draft> {
    let (a, b) = unique_pairs(graph, rng)
        .into_iter()
        .find(|(a, b)| (a.distance_m - b.distance_m).abs() > MIN_DISTANCE_GAP)?;
    let (closer, farther) = if a.distance_m < b.distance_m { (a, b) } else { (b, a) };
    Some(Draft {
        task: TaskKind::RelativeDistance,
        question: format!(
            "Which sound is closer to the listener, the {} or the {}?",
            display_class(&a.class_label),
            display_class(&b.class_label)
        ),
        truth: Claim::CloserThan {
            closer: closer.class_label.clone(),
            farther: farther.class_label.clone(),
        },
        distractors: vec![
            Claim::CloserThan {
                closer: farther.class_label.clone(),
                farther: closer.class_label.clone(),
            },
            Claim::EqualDistance { a: a.class_label.clone(), b: b.class_label.clone() },
            Claim::BothAbsent { a: a.class_label.clone(), b: b.class_label.clone() },
        ],
    })
}

fn relative_direction<R: Rng + ?Sized>(graph: &SceneGraph, rng: &mut R) -> Option<Draft> {
    let (a, b) = unique_pairs(graph, rng).into_iter().find(|(a, b)| {
        let dy = (a.listener_frame().y - b.listener_frame().y).abs();
        let sep = crate::rtsd::angular_separation(a, b);
        dy > MIN_LATERAL_GAP && (2.0..178.0).contains(&sep)
    })?;
    let a_left = a.listener_frame().y > b.listener_frame().y;
    let (ca, cb) = (a.class_label.clone(), b.class_label.clone());
    let truth = if a_left {
        Claim::IsLeftOf { a: ca.clone(), b: cb.clone() }
    } else {
        Claim::IsRightOf { a: ca.clone(), b: cb.clone() }
    };
    let flipped = if a_left {
        Claim::IsRightOf { a: ca.clone(), b: cb.clone() }
    } else {
        Claim::IsLeftOf { a: ca.clone(), b: cb.clone() }
    };
    Some(Draft {
        task: TaskKind::RelativeDirection,
        question: format!(
            "Is the {} positioned to the left or to the right of the {}?",
            display_class(&a.class_label),
            display_class(&b.class_label)
        ),
        truth,
        distractors: vec![
            flipped,
            Claim::SameDirection { a: ca.clone(), b: cb.clone() },
            Claim::OppositeDirection { a: ca, b: cb },
        ],
    })
}

/// All Level-2 items this scene supports (needs at least two sources for
/// the comparison/retrieval tasks; under-constrained scenes skip).
pub fn gen_l2<R: Rng + ?Sized>(
    graph: &SceneGraph,
    ctx: &GenContext,
    rng: &mut R,
) -> Vec<QuestionItem> {
    let mut out = Vec::new();
    let mut push = |item: Option<QuestionItem>| out.extend(item);
    push(retry(graph, ctx, rng, |r| attribute_verification(graph, ctx, r)));
    push(retry(graph, ctx, rng, |r| query_location_given_id(graph, r)));
    if graph.nodes.len() >= 2 {
        push(retry(graph, ctx, rng, |r| query_id_given_location(graph, ctx, r)));
        push(retry(graph, ctx, rng, |r| relative_distance(graph, r)));
        push(retry(graph, ctx, rng, |r| relative_direction(graph, r)));
    }
    out
}

// ---------------------------------------------------------------------
// Level 3: cognitive reasoning
// ---------------------------------------------------------------------

fn scene_abduction<R: Rng + ?Sized>(
    graph: &SceneGraph,
    ctx: &GenContext,
    rng: &mut R,
) -> Option<Draft> {
    let truth = ctx.rules.scene_label(graph)?;
    let mut pool: Vec<String> = ctx
        .rules
        .scene_label_pool()
        .into_iter()
        .filter(|l| *l != truth)
        .collect();
    if pool.len() < 3 {
        return None;
    }
    pool.shuffle(rng);
    Some(Draft {
        task: TaskKind::SceneAbduction,
        question: "Based on the sounds and the acoustics, what is the most likely scene?".into(),
        truth: Claim::SceneLabelIs { label: truth },
        distractors: pool.into_iter().take(3).map(|label| Claim::SceneLabelIs { label }).collect(),
    })
}

fn causal_intent<R: Rng + ?Sized>(
    graph: &SceneGraph,
    ctx: &GenContext,
    rng: &mut R,
) -> Option<Draft> {
    let truth = ctx.rules.activity_label(graph)?;
    let mut pool: Vec<String> = ctx
        .rules
        .activity_label_pool()
        .into_iter()
        .filter(|l| *l != truth)
        .collect();
    if pool.len() < 3 {
        return None;
    }
    pool.shuffle(rng);
    Some(Draft {
        task: TaskKind::CausalIntent,
        question: "What activity or intent is best implied by the sounds?".into(),
        truth: Claim::ActivityLabelIs { label: truth },
        distractors: pool
            .into_iter()
            .take(3)
            .map(|label| Claim::ActivityLabelIs { label })
            .collect(),
    })
}

fn rotate_observer_task<R: Rng + ?Sized>(graph: &SceneGraph, rng: &mut R) -> Option<Draft> {
    let node = *unique_class_nodes(graph).choose(rng)?;
    let rotated = wrap_deg(node.azimuth_deg - 180.0);
    let truth = Sector::from_azimuth(rotated);
    Some(Draft {
        task: TaskKind::RotateObserver,
        question: format!(
            "If you turn around 180°, where would the {} be located now?",
            display_class(&node.class_label)
        ),
        truth: Claim::SectorAfterRotation {
            class: node.class_label.clone(),
            rotation_deg: 180.0,
            sector: truth,
        },
        distractors: other_sectors(truth, rng, 3)
            .into_iter()
            .map(|sector| Claim::SectorAfterRotation {
                class: node.class_label.clone(),
                rotation_deg: 180.0,
                sector,
            })
            .collect(),
    })
}

fn source_removal<R: Rng + ?Sized>(
    graph: &SceneGraph,
    ctx: &GenContext,
    rng: &mut R,
) -> Option<Draft> {
    if graph.nodes.len() < 2 {
        return None;
    }
    let removed = *unique_class_nodes(graph).choose(rng)?;
    let removed_class = removed.class_label.clone();
    let remaining: Vec<&AudioObject> =
        graph.nodes.iter().filter(|n| n.object_id != removed.object_id).collect();
    let n_remaining = remaining.len();

    let mut truths: Vec<Claim> = vec![Claim::RemainingCount {
        removed: removed_class.clone(),
        n: n_remaining,
    }];
    let mut nearest = remaining.clone();
    nearest.sort_by(|a, b| a.distance_m.partial_cmp(&b.distance_m).unwrap());
    let strict_min = nearest.len() == 1
        || (nearest[1].distance_m - nearest[0].distance_m).abs() > MIN_DISTANCE_GAP;
    if strict_min {
        truths.push(Claim::RemainingClosest {
            removed: removed_class.clone(),
            class: nearest[0].class_label.clone(),
        });
    }
    if let Some(other) = remaining.iter().find(|n| n.class_label != removed_class) {
        truths.push(Claim::StillAudible {
            removed: removed_class.clone(),
            class: other.class_label.clone(),
        });
    }
    let truth = truths.choose(rng)?.clone();

    let mut falses: Vec<Claim> = vec![
        Claim::RemainingCount { removed: removed_class.clone(), n: n_remaining + 1 },
        Claim::StillAudible { removed: removed_class.clone(), class: removed_class.clone() },
    ];
    if n_remaining >= 2 {
        falses.push(Claim::RemainingCount { removed: removed_class.clone(), n: n_remaining - 1 });
    } else {
        falses.push(Claim::RemainingCount { removed: removed_class.clone(), n: n_remaining + 2 });
    }
    if strict_min {
        if let Some(wrong) = absent_classes(graph, ctx, rng).into_iter().next() {
            falses.push(Claim::RemainingClosest { removed: removed_class.clone(), class: wrong });
        }
    }
    falses.shuffle(rng);
    falses.truncate(3);
    Some(Draft {
        task: TaskKind::SourceRemoval,
        question: format!(
            "If the sound of the {} is removed, which statement remains true?",
            display_class(&removed_class)
        ),
        truth,
        distractors: falses,
    })
}

fn multi_hop_query<R: Rng + ?Sized>(
    graph: &SceneGraph,
    ctx: &GenContext,
    rng: &mut R,
) -> Option<Draft> {
    if graph.nodes.len() < 2 {
        return None;
    }
    let mut by_distance: Vec<&AudioObject> = graph.nodes.iter().collect();
    by_distance.sort_by(|a, b| b.distance_m.partial_cmp(&a.distance_m).unwrap());
    let farthest = by_distance[0];
    if (farthest.distance_m - by_distance[1].distance_m).abs() < MIN_DISTANCE_GAP {
        return None;
    }
    let truth =
        Claim::FarthestIs { class: farthest.class_label.clone(), sector: farthest.sector };
    let other_class = by_distance
        .iter()
        .skip(1)
        .map(|n| n.class_label.clone())
        .find(|c| *c != farthest.class_label)
        .or_else(|| absent_classes(graph, ctx, rng).into_iter().next())?;
    let wrong_sector = *other_sectors(farthest.sector, rng, 2).first()?;
    let wrong_sector2 = *other_sectors(farthest.sector, rng, 2).last()?;
    Some(Draft {
        task: TaskKind::MultiHopQuery,
        question: "Identify the farthest sound source and state its direction.".into(),
        truth,
        distractors: vec![
            Claim::FarthestIs { class: farthest.class_label.clone(), sector: wrong_sector },
            Claim::FarthestIs { class: other_class.clone(), sector: wrong_sector2 },
            Claim::FarthestIs { class: other_class, sector: farthest.sector },
        ],
    })
}

fn physical_consistency<R: Rng + ?Sized>(graph: &SceneGraph, rng: &mut R) -> Option<Draft> {
    let max_ray = max_ray_in_box(&graph.listener.position, &graph.room.spec.dims);
    let impossible = (max_ray * rng.random_range(1.35..2.2) * 10.0).round() / 10.0;
    let mut possible = Vec::new();
    for _ in 0..16 {
        let d = (max_ray * rng.random_range(0.15..0.9) * 10.0).round() / 10.0;
        if d >= 0.5 && !possible.contains(&d) {
            possible.push(d);
        }
        if possible.len() == 3 {
            break;
        }
    }
    if possible.len() < 3 {
        return None;
    }
    Some(Draft {
        task: TaskKind::PhysicalConsistency,
        question: "Given the room dimensions, which of these is physically impossible?".into(),
        truth: Claim::ImpossibleDistance { distance_m: impossible },
        distractors: possible
            .into_iter()
            .map(|distance_m| Claim::ImpossibleDistance { distance_m })
            .collect(),
    })
}

/// All Level-3 items this scene supports.
pub fn gen_l3<R: Rng + ?Sized>(
    graph: &SceneGraph,
    ctx: &GenContext,
    rng: &mut R,
) -> Vec<QuestionItem> {
    let mut out = Vec::new();
    let mut push = |item: Option<QuestionItem>| out.extend(item);
    push(retry(graph, ctx, rng, |r| scene_abduction(graph, ctx, r)));
    push(retry(graph, ctx, rng, |r| causal_intent(graph, ctx, r)));
    push(retry(graph, ctx, rng, |r| rotate_observer_task(graph, r)));
    push(retry(graph, ctx, rng, |r| source_removal(graph, ctx, r)));
    push(retry(graph, ctx, rng, |r| multi_hop_query(graph, ctx, r)));
    push(retry(graph, ctx, rng, |r| physical_consistency(graph, r)));
    out
}
