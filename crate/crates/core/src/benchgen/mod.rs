//! Three-level multiple-choice benchmark generation with oracle-verified
//! answer keys.
//!
//! Every option is backed by a typed [`Claim`]; generation never emits an
//! item that [`validate_item`] would reject, and validation can be re-run
//! later against nothing but the serialized benchmark and scene files.

mod claims;
mod rules;
mod tasks;

pub use claims::{Claim, ElevRange};
pub use rules::{ActivityRule, RuleTable, SceneRule};

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::LazyLock;

use rand::seq::SliceRandom;
use rand::Rng;
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::wrap_deg;
use crate::rtsd::{edges_for, RtsdConfig, SceneGraph, Sector};

/// Current benchmark JSON-lines schema version.
pub const BENCHMARK_SCHEMA_VERSION: u32 = 1;

/// Built-in distractor vocabulary for class questions, merged with
/// whatever classes the scenes actually use.
pub const CLASS_VOCAB: [&str; 16] = [
    "dog_bark",
    "car_horn",
    "footsteps",
    "rain",
    "doorbell",
    "piano",
    "guitar",
    "drums",
    "laughter",
    "siren",
    "bird_song",
    "keyboard_typing",
    "breathing",
    "applause",
    "phone_ringing",
    "engine_hum",
];

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("unknown object id {0}")]
    UnknownObject(usize),
    #[error("not enough candidate items for level {level}: need {need}, have {have}")]
    InsufficientScenes { level: &'static str, need: usize, have: usize },
    #[error("benchmark i/o failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("benchmark line is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Cognitive level of a task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level {
    L1,
    L2,
    L3,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::L1, Level::L2, Level::L3];

    pub fn name(&self) -> &'static str {
        match self {
            Level::L1 => "L1",
            Level::L2 => "L2",
            Level::L3 => "L3",
        }
    }
}

/// Concrete task identity within the taxonomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    CountObjects,
    IdentifyEventClass,
    IdentifySpeechTranscript,
    LocalizeAzimuth,
    LocalizeElevation,
    EstimateDistance,
    EnvironmentAcoustics,
    AttributeVerification,
    QueryLocationGivenId,
    QueryIdGivenLocation,
    RelativeDistance,
    RelativeDirection,
    SceneAbduction,
    CausalIntent,
    RotateObserver,
    SourceRemoval,
    MultiHopQuery,
    PhysicalConsistency,
}

impl TaskKind {
    pub fn level(&self) -> Level {
        use TaskKind::*;
        match self {
            CountObjects | IdentifyEventClass | IdentifySpeechTranscript | LocalizeAzimuth
            | LocalizeElevation | EstimateDistance | EnvironmentAcoustics => Level::L1,
            AttributeVerification | QueryLocationGivenId | QueryIdGivenLocation
            | RelativeDistance | RelativeDirection => Level::L2,
            SceneAbduction | CausalIntent | RotateObserver | SourceRemoval | MultiHopQuery
            | PhysicalConsistency => Level::L3,
        }
    }

    pub fn family(&self) -> &'static str {
        use TaskKind::*;
        match self {
            CountObjects => "numeracy",
            IdentifyEventClass | IdentifySpeechTranscript => "semantics",
            LocalizeAzimuth | LocalizeElevation | EstimateDistance | EnvironmentAcoustics => {
                "spatial_physics"
            }
            AttributeVerification => "binding",
            QueryLocationGivenId | QueryIdGivenLocation => "retrieval",
            RelativeDistance | RelativeDirection => "comparison",
            SceneAbduction | CausalIntent => "abduction",
            RotateObserver | SourceRemoval => "counterfactual",
            MultiHopQuery | PhysicalConsistency => "logic_physics",
        }
    }

    pub fn name(&self) -> &'static str {
        use TaskKind::*;
        match self {
            CountObjects => "count_objects",
            IdentifyEventClass => "identify_event_class",
            IdentifySpeechTranscript => "identify_speech_transcript",
            LocalizeAzimuth => "localize_azimuth",
            LocalizeElevation => "localize_elevation",
            EstimateDistance => "estimate_distance",
            EnvironmentAcoustics => "environment_acoustics",
            AttributeVerification => "attribute_verification",
            QueryLocationGivenId => "query_location_given_id",
            QueryIdGivenLocation => "query_id_given_location",
            RelativeDistance => "relative_distance",
            RelativeDirection => "relative_direction",
            SceneAbduction => "scene_abduction",
            CausalIntent => "causal_intent",
            RotateObserver => "rotate_observer",
            SourceRemoval => "source_removal",
            MultiHopQuery => "multi_hop_query",
            PhysicalConsistency => "physical_consistency",
        }
    }
}

/// Answer key letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AnswerKey {
    A,
    B,
    C,
    D,
}

impl AnswerKey {
    pub const ALL: [AnswerKey; 4] = [AnswerKey::A, AnswerKey::B, AnswerKey::C, AnswerKey::D];

    pub fn index(&self) -> usize {
        AnswerKey::ALL.iter().position(|k| k == self).unwrap()
    }

    pub fn from_index(i: usize) -> Option<AnswerKey> {
        AnswerKey::ALL.get(i).copied()
    }

    pub fn from_letter(c: char) -> Option<AnswerKey> {
        match c.to_ascii_uppercase() {
            'A' => Some(AnswerKey::A),
            'B' => Some(AnswerKey::B),
            'C' => Some(AnswerKey::C),
            'D' => Some(AnswerKey::D),
            _ => None,
        }
    }

    pub fn letter(&self) -> char {
        ['A', 'B', 'C', 'D'][self.index()]
    }
}

/// Per-item generation record: the claims behind the four options, aligned
/// by index with `options`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemMeta {
    pub claims: Vec<Claim>,
}

/// One multiple-choice question. `options[0..4]` map to keys A..D.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionItem {
    pub schema_version: u32,
    pub item_id: String,
    pub scene_id: String,
    pub level: Level,
    pub task_family: String,
    pub task: TaskKind,
    pub question: String,
    pub options: Vec<String>,
    pub answer: AnswerKey,
    pub meta: ItemMeta,
}

/// A generated benchmark plus its realized level mix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkSet {
    pub schema_version: u32,
    pub seed: u64,
    /// Realized proportions for L1/L2/L3.
    pub level_mix: [f64; 3],
    pub items: Vec<QuestionItem>,
}

/// Target level proportions.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LevelTargets {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
}

impl Default for LevelTargets {
    fn default() -> Self {
        LevelTargets { l1: 0.321, l2: 0.285, l3: 0.394 }
    }
}

/// Everything generation and validation need besides the graph itself.
#[derive(Debug, Clone)]
pub struct GenContext<'a> {
    pub rtsd: RtsdConfig,
    pub rules: &'a RuleTable,
    pub class_vocab: Vec<String>,
    pub transcript_pool: Vec<String>,
}

impl<'a> GenContext<'a> {
    pub fn new(rules: &'a RuleTable) -> Self {
        GenContext {
            rtsd: RtsdConfig::default(),
            rules,
            class_vocab: CLASS_VOCAB.iter().map(|s| s.to_string()).collect(),
            transcript_pool: Vec::new(),
        }
    }
}

/// Shifts every azimuth by `-degrees` (the listener turned by `degrees`),
/// re-deriving sectors and relations. Distances and elevations are
/// untouched.
pub fn rotate_observer(graph: &SceneGraph, degrees: f64) -> SceneGraph {
    let mut nodes = graph.nodes.clone();
    for n in nodes.iter_mut() {
        n.azimuth_deg = wrap_deg(n.azimuth_deg - degrees);
        n.sector = Sector::from_azimuth(n.azimuth_deg);
    }
    let edges = edges_for(&nodes);
    let mut listener = graph.listener.clone();
    listener.orientation += degrees.to_radians();
    SceneGraph {
        scene_id: graph.scene_id.clone(),
        nodes,
        edges,
        room: graph.room.clone(),
        listener,
    }
}

/// Deletes one node and its incident edges, recomputing the rest.
pub fn remove_source(graph: &SceneGraph, object_id: usize) -> Result<SceneGraph, BenchError> {
    if !graph.nodes.iter().any(|n| n.object_id == object_id) {
        return Err(BenchError::UnknownObject(object_id));
    }
    let nodes: Vec<_> = graph.nodes.iter().filter(|n| n.object_id != object_id).cloned().collect();
    let edges = edges_for(&nodes);
    Ok(SceneGraph {
        scene_id: graph.scene_id.clone(),
        nodes,
        edges,
        room: graph.room.clone(),
        listener: graph.listener.clone(),
    })
}

/// Answer-key oracle: re-evaluates all four claims from raw graph data and
/// accepts the item only when options are distinct, each option is its
/// claim's rendering, and exactly the keyed option is true.
pub fn validate_item(item: &QuestionItem, graph: &SceneGraph, ctx: &GenContext) -> bool {
    if item.scene_id != graph.scene_id {
        return false;
    }
    if item.options.len() != 4 || item.meta.claims.len() != 4 {
        return false;
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            if item.options[i] == item.options[j] {
                return false;
            }
        }
    }
    let mut true_at = None;
    for (i, claim) in item.meta.claims.iter().enumerate() {
        if claim.option_text() != item.options[i] {
            return false;
        }
        match claim.holds(graph, ctx) {
            Some(true) => {
                if true_at.is_some() {
                    return false;
                }
                true_at = Some(i);
            }
            Some(false) => {}
            None => return false,
        }
    }
    true_at == Some(item.answer.index())
}

static NUMBER_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"-?\d+(?:\.\d+)?").expect("number regex"));

/// Leakage lint: the visible text of an item must never spell out the full
/// exact (azimuth, elevation, distance) tuple of any source. Returns `true`
/// when the item is clean.
pub fn lint_leakage(item: &QuestionItem, graph: &SceneGraph) -> bool {
    let mut text = item.question.clone();
    for o in &item.options {
        text.push('\n');
        text.push_str(o);
    }
    let numbers: Vec<f64> = NUMBER_RE
        .find_iter(&text)
        .filter_map(|m| m.as_str().parse::<f64>().ok())
        .collect();
    let close = |target: f64, tol: f64| numbers.iter().any(|n| (n - target).abs() <= tol);
    for node in &graph.nodes {
        if close(node.azimuth_deg, 0.5)
            && close(node.elevation_deg, 0.5)
            && close(node.distance_m, 0.05)
        {
            return false;
        }
    }
    true
}

/// All candidate items one scene can contribute, validated.
pub fn gen_scene_items<R: Rng + ?Sized>(
    graph: &SceneGraph,
    ctx: &GenContext,
    rng: &mut R,
) -> Vec<QuestionItem> {
    let mut items = tasks::gen_l1(graph, ctx, rng);
    items.extend(tasks::gen_l2(graph, ctx, rng));
    items.extend(tasks::gen_l3(graph, ctx, rng));
    items
}

pub use tasks::{gen_l1, gen_l2, gen_l3};

fn select_level<R: Rng + ?Sized>(
    level: Level,
    mut candidates: Vec<QuestionItem>,
    count: usize,
    rng: &mut R,
) -> Result<Vec<QuestionItem>, BenchError> {
    if candidates.len() < count {
        return Err(BenchError::InsufficientScenes {
            level: level.name(),
            need: count,
            have: candidates.len(),
        });
    }
    // Uniform task weighting within the level: round-robin over task
    // buckets in a seeded order.
    candidates.shuffle(rng);
    let mut buckets: BTreeMap<&'static str, Vec<QuestionItem>> = BTreeMap::new();
    for item in candidates {
        buckets.entry(item.task.name()).or_default().push(item);
    }
    let mut order: Vec<&'static str> = buckets.keys().copied().collect();
    order.shuffle(rng);
    let mut selected = Vec::with_capacity(count);
    while selected.len() < count {
        let mut advanced = false;
        for task in &order {
            if selected.len() >= count {
                break;
            }
            if let Some(item) = buckets.get_mut(task).and_then(|b| b.pop()) {
                selected.push(item);
                advanced = true;
            }
        }
        if !advanced {
            return Err(BenchError::InsufficientScenes {
                level: level.name(),
                need: count,
                have: selected.len(),
            });
        }
    }
    Ok(selected)
}

/// Builds a benchmark of `n_items` questions over the given scene graphs,
/// hitting the level targets exactly (up to rounding) and validating every
/// emitted item.
pub fn assemble_benchmark<R: Rng + ?Sized>(
    graphs: &[SceneGraph],
    rng: &mut R,
    n_items: usize,
    targets: &LevelTargets,
    ctx: &GenContext,
    seed: u64,
) -> Result<BenchmarkSet, BenchError> {
    let mut by_level: BTreeMap<Level, Vec<QuestionItem>> = BTreeMap::new();
    for graph in graphs {
        for item in gen_scene_items(graph, ctx, rng) {
            by_level.entry(item.level).or_default().push(item);
        }
    }
    let n1 = (n_items as f64 * targets.l1).round() as usize;
    let n2 = (n_items as f64 * targets.l2).round() as usize;
    let n3 = n_items.saturating_sub(n1 + n2);
    let mut items = Vec::with_capacity(n_items);
    for (level, count) in [(Level::L1, n1), (Level::L2, n2), (Level::L3, n3)] {
        let cands = by_level.remove(&level).unwrap_or_default();
        items.extend(select_level(level, cands, count, rng)?);
    }
    items.shuffle(rng);
    for (i, item) in items.iter_mut().enumerate() {
        item.item_id = format!("item{i:05}");
    }
    let counts = |l: Level| items.iter().filter(|i| i.level == l).count() as f64;
    let total = items.len() as f64;
    Ok(BenchmarkSet {
        schema_version: BENCHMARK_SCHEMA_VERSION,
        seed,
        level_mix: [counts(Level::L1) / total, counts(Level::L2) / total, counts(Level::L3) / total],
        items,
    })
}

/// Writes one `QuestionItem` JSON object per line.
pub fn write_benchmark_jsonl(set: &BenchmarkSet, path: &Path) -> Result<(), BenchError> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for item in &set.items {
        serde_json::to_writer(&mut out, item)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a JSON-lines benchmark back.
pub fn read_benchmark_jsonl(path: &Path) -> Result<Vec<QuestionItem>, BenchError> {
    let rd = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut items = Vec::new();
    for line in rd.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        items.push(serde_json::from_str(&line)?);
    }
    Ok(items)
}

/// The bundled prompt template for generating open-ended QA with an
/// external teacher model. Shipped as data; no client is included.
pub fn open_ended_prompt_template() -> &'static str {
    include_str!("../../assets/open_ended_prompt.txt")
}

#[cfg(test)]
mod tests;
