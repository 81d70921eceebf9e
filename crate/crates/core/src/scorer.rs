//! Response parsing, the weighted reward, accuracy protocols and the
//! structured localization metrics.
//!
//! Parsing is strict: an answer counts only when it arrives inside
//! `<answer>` tags, and the format component additionally requires a
//! preceding `<think>` block. The reward is the fixed weighted sum
//! `2.0 r_fmt + 1.0 r_val + 3.0 r_cor + 0.5 r_len + 0.5 r_evd + 0.2 r_ref`
//! with every component in {0,1} except the leak penalty `r_ref` in {-1,0}.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::benchgen::{AnswerKey, Level, QuestionItem};
use crate::geometry::{angular_separation_deg, unit_from_angles, Vec3};
use crate::rtsd::SceneGraph;

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error("responses do not align with the benchmark: {missing} missing, {extra} unexpected (missing ids: {missing_ids:?})")]
    Alignment { missing: usize, extra: usize, missing_ids: Vec<String> },
    #[error("nothing to evaluate")]
    EmptyEval,
    #[error("score i/o failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed response line: {0}")]
    Json(#[from] serde_json::Error),
}

static THINK_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?s)<think>(.*?)</think>").expect("think regex"));
static ANSWER_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?s)<answer>(.*?)</answer>").expect("answer regex"));

/// A model response decomposed into its structured parts.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedResponse {
    pub raw: String,
    pub think: Option<String>,
    pub answer_key: Option<AnswerKey>,
    /// Both tags present, in order, non-overlapping.
    pub format_ok: bool,
}

/// Strict extraction: no fallback to free text. A lone `<answer>` still
/// yields a key, but `format_ok` stays false without the leading think
/// block.
pub fn parse_response(text: &str) -> ParsedResponse {
    let think = THINK_RE.find(text);
    let answer = ANSWER_RE.find(text);
    let format_ok = match (&think, &answer) {
        (Some(t), Some(a)) => t.end() <= a.start(),
        _ => false,
    };
    let think_body = THINK_RE.captures(text).map(|c| c[1].to_string());
    let answer_key = ANSWER_RE.captures(text).and_then(|c| {
        let body = c[1].trim();
        let mut chars = body.chars();
        match (chars.next(), chars.next()) {
            (Some(ch), None) => AnswerKey::from_letter(ch),
            _ => None,
        }
    });
    ParsedResponse { raw: text.to_string(), think: think_body, answer_key, format_ok }
}

/// Reward knobs; the weights themselves are fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RewardConfig {
    /// Think must mention at least one of these for the evidence component.
    pub evidence_keywords: Vec<String>,
    /// Any of these in the think marks a prompt-leak (r_ref = -1).
    pub leak_patterns: Vec<String>,
    /// Inclusive character bounds for the length component.
    pub think_len_min: usize,
    pub think_len_max: usize,
}

impl Default for RewardConfig {
    fn default() -> Self {
        RewardConfig {
            evidence_keywords: ["sound", "hear", "audio", "noise"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            leak_patterns: ["scene description", "the description says", "according to the text"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            think_len_min: 40,
            think_len_max: 400,
        }
    }
}

/// Reward component weights.
pub const W_FMT: f64 = 2.0;
pub const W_VAL: f64 = 1.0;
pub const W_COR: f64 = 3.0;
pub const W_LEN: f64 = 0.5;
pub const W_EVD: f64 = 0.5;
pub const W_REF: f64 = 0.2;

/// Per-response reward components and their weighted total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub r_fmt: i8,
    pub r_val: i8,
    pub r_cor: i8,
    pub r_len: i8,
    pub r_evd: i8,
    pub r_ref: i8,
    pub total: f64,
}

/// Scores one parsed response against the true key.
pub fn reward_for_key(parsed: &ParsedResponse, truth: AnswerKey, cfg: &RewardConfig) -> RewardBreakdown {
    let r_fmt = parsed.format_ok as i8;
    let r_val = parsed.answer_key.is_some() as i8;
    let r_cor = (parsed.answer_key == Some(truth)) as i8;
    let (r_len, r_evd, r_ref) = match &parsed.think {
        Some(think) => {
            let chars = think.chars().count();
            let lower = think.to_lowercase();
            let r_len = (chars >= cfg.think_len_min && chars <= cfg.think_len_max) as i8;
            let r_evd = cfg.evidence_keywords.iter().any(|k| lower.contains(&k.to_lowercase())) as i8;
            let r_ref =
                if cfg.leak_patterns.iter().any(|p| lower.contains(&p.to_lowercase())) { -1 } else { 0 };
            (r_len, r_evd, r_ref)
        }
        None => (0, 0, 0),
    };
    let total = W_FMT * r_fmt as f64
        + W_VAL * r_val as f64
        + W_COR * r_cor as f64
        + W_LEN * r_len as f64
        + W_EVD * r_evd as f64
        + W_REF * r_ref as f64;
    RewardBreakdown { r_fmt, r_val, r_cor, r_len, r_evd, r_ref, total }
}

/// Scores one parsed response against a benchmark item.
pub fn reward(parsed: &ParsedResponse, item: &QuestionItem, cfg: &RewardConfig) -> RewardBreakdown {
    reward_for_key(parsed, item.answer, cfg)
}

/// Evaluation protocols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    /// One letter per 4-option question; chance level 25%.
    Mcqa,
    /// Each question expands to four true/false sub-items (A = true,
    /// B = false); chance level 50%.
    PerOptionBinary,
}

/// One response line: `{"item_id": ..., "text": ...}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResponseRecord {
    pub item_id: String,
    pub text: String,
}

pub fn read_responses_jsonl(path: &Path) -> Result<Vec<ResponseRecord>, ScoreError> {
    let rd = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut out = Vec::new();
    for line in rd.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}

pub fn write_responses_jsonl(records: &[ResponseRecord], path: &Path) -> Result<(), ScoreError> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// One true/false sub-item of the per-option protocol.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BinarySubItem {
    pub sub_id: String,
    pub parent_id: String,
    pub level: Level,
    pub task: String,
    /// The prompt a responder sees; option A asserts "true".
    pub statement: String,
    /// Whether the asserted option is the keyed one.
    pub truth: bool,
}

impl BinarySubItem {
    /// Key a correct responder should answer: A for a true statement,
    /// B otherwise.
    pub fn truth_key(&self) -> AnswerKey {
        if self.truth {
            AnswerKey::A
        } else {
            AnswerKey::B
        }
    }
}

/// Expands each MCQ into four boolean judgments, asserting the option
/// text verbatim. Sub-item ids are `{item_id}/{letter}`.
pub fn expand_per_option(items: &[QuestionItem]) -> Vec<BinarySubItem> {
    let mut out = Vec::with_capacity(items.len() * 4);
    for item in items {
        for (i, option) in item.options.iter().enumerate() {
            let key = AnswerKey::from_index(i).unwrap();
            out.push(BinarySubItem {
                sub_id: format!("{}/{}", item.item_id, key.letter()),
                parent_id: item.item_id.clone(),
                level: item.level,
                task: item.task.name().to_string(),
                statement: format!(
                    "{} Consider this candidate answer: \u{201c}{}\u{201d}. Is it the correct answer? Reply A for true or B for false.",
                    item.question, option
                ),
                truth: i == item.answer.index(),
            });
        }
    }
    out
}

/// Aggregate accuracies and mean reward for one scored run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub protocol: Protocol,
    pub n_items: usize,
    pub overall_acc: f64,
    pub per_level_acc: BTreeMap<String, f64>,
    pub per_task_acc: BTreeMap<String, f64>,
    pub mean_reward: f64,
    /// Echo of the reward knobs the run was scored with.
    pub reward_config: RewardConfig,
}

fn check_alignment(
    expected: impl Iterator<Item = String>,
    responses: &[ResponseRecord],
) -> Result<HashMap<String, usize>, ScoreError> {
    let mut index: HashMap<String, usize> = HashMap::new();
    for (i, r) in responses.iter().enumerate() {
        index.insert(r.item_id.clone(), i);
    }
    let expected: Vec<String> = expected.collect();
    let missing: Vec<&String> = expected.iter().filter(|id| !index.contains_key(*id)).collect();
    let expected_set: std::collections::HashSet<&String> = expected.iter().collect();
    let extra = responses.iter().filter(|r| !expected_set.contains(&r.item_id)).count();
    if !missing.is_empty() || extra > 0 || responses.is_empty() {
        return Err(ScoreError::Alignment {
            missing: missing.len(),
            extra,
            missing_ids: missing.iter().take(8).map(|s| (*s).to_string()).collect(),
        });
    }
    Ok(index)
}

struct Tally {
    correct: usize,
    total: usize,
}

fn accuracy_maps(rows: &[(Level, String, bool)]) -> (BTreeMap<String, f64>, BTreeMap<String, f64>) {
    let mut by_level: BTreeMap<String, Tally> = BTreeMap::new();
    let mut by_task: BTreeMap<String, Tally> = BTreeMap::new();
    for (level, task, ok) in rows {
        let l = by_level
            .entry(level.name().to_string())
            .or_insert(Tally { correct: 0, total: 0 });
        l.total += 1;
        l.correct += *ok as usize;
        let t = by_task.entry(task.clone()).or_insert(Tally { correct: 0, total: 0 });
        t.total += 1;
        t.correct += *ok as usize;
    }
    let fold = |m: BTreeMap<String, Tally>| {
        m.into_iter()
            .map(|(k, t)| (k, t.correct as f64 / t.total as f64))
            .collect()
    };
    (fold(by_level), fold(by_task))
}

/// Scores a full run. Every benchmark item (or expanded sub-item) must
/// have exactly one response, aligned by id.
pub fn score_run(
    responses: &[ResponseRecord],
    items: &[QuestionItem],
    protocol: Protocol,
    cfg: &RewardConfig,
) -> Result<EvalReport, ScoreError> {
    if items.is_empty() {
        return Err(ScoreError::EmptyEval);
    }
    let mut rows: Vec<(Level, String, bool)> = Vec::new();
    let mut reward_sum = 0.0;
    let n;
    match protocol {
        Protocol::Mcqa => {
            let index = check_alignment(items.iter().map(|i| i.item_id.clone()), responses)?;
            n = items.len();
            for item in items {
                let parsed = parse_response(&responses[index[&item.item_id]].text);
                let rb = reward_for_key(&parsed, item.answer, cfg);
                reward_sum += rb.total;
                rows.push((item.level, item.task.name().to_string(), rb.r_cor == 1));
            }
        }
        Protocol::PerOptionBinary => {
            let subs = expand_per_option(items);
            let index = check_alignment(subs.iter().map(|s| s.sub_id.clone()), responses)?;
            n = subs.len();
            for sub in &subs {
                let parsed = parse_response(&responses[index[&sub.sub_id]].text);
                let rb = reward_for_key(&parsed, sub.truth_key(), cfg);
                reward_sum += rb.total;
                rows.push((sub.level, sub.task.clone(), rb.r_cor == 1));
            }
        }
    }
    let correct = rows.iter().filter(|(_, _, ok)| *ok).count();
    let (per_level_acc, per_task_acc) = accuracy_maps(&rows);
    Ok(EvalReport {
        protocol,
        n_items: n,
        overall_acc: correct as f64 / n as f64,
        per_level_acc,
        per_task_acc,
        mean_reward: reward_sum / n as f64,
        reward_config: cfg.clone(),
    })
}

/// One predicted source for the structured localization protocol.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredictedSource {
    pub azimuth_deg: f64,
    pub elevation_deg: f64,
    pub distance_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
}

/// Per-scene predictions, aligned with the truth list by position.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenePrediction {
    pub scene_id: String,
    pub sources: Vec<PredictedSource>,
}

/// Aggregate localization metrics with the per-scene matchings used.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocalizationEval {
    /// Fraction of scenes where the predicted source count is exact.
    pub count_accuracy: f64,
    pub mean_angular_error_deg: f64,
    pub mean_distance_error_m: f64,
    /// Per scene: (prediction index, truth index) pairs of the min-cost
    /// bijection over angular error.
    pub matching: Vec<Vec<(usize, usize)>>,
}

// All injective assignments of the k smaller-side elements onto the larger
// side; k <= 3 keeps this tiny.
fn assignments(small: usize, large: usize) -> Vec<Vec<usize>> {
    fn rec(depth: usize, small: usize, large: usize, used: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if depth == small {
            out.push(used.clone());
            return;
        }
        for cand in 0..large {
            if !used.contains(&cand) {
                used.push(cand);
                rec(depth + 1, small, large, used, out);
                used.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(0, small, large, &mut Vec::new(), &mut out);
    out
}

fn angular_cost(pred: &[Vec3], truth: &[Vec3], map: &[usize], pred_small: bool) -> f64 {
    map.iter()
        .enumerate()
        .map(|(i, &j)| {
            let (p, t) = if pred_small { (&pred[i], &truth[j]) } else { (&pred[j], &truth[i]) };
            angular_separation_deg(p, t)
        })
        .sum()
}

/// Brute-force min-angular-cost matching between predictions and graph
/// truths; count accuracy, mean angular error (degrees) and mean absolute
/// distance error (meters) over the matched pairs of all scenes.
pub fn localization_metrics(
    preds: &[ScenePrediction],
    truths: &[SceneGraph],
) -> Result<LocalizationEval, ScoreError> {
    if preds.is_empty() || preds.len() != truths.len() {
        return Err(ScoreError::EmptyEval);
    }
    let mut exact_counts = 0usize;
    let mut ang_sum = 0.0;
    let mut dist_sum = 0.0;
    let mut pairs = 0usize;
    let mut matching = Vec::with_capacity(preds.len());
    for (pred, graph) in preds.iter().zip(truths) {
        if pred.sources.len() == graph.nodes.len() {
            exact_counts += 1;
        }
        let pv: Vec<Vec3> = pred
            .sources
            .iter()
            .map(|s| unit_from_angles(s.azimuth_deg, s.elevation_deg))
            .collect();
        let tv: Vec<Vec3> = graph
            .nodes
            .iter()
            .map(|n| unit_from_angles(n.azimuth_deg, n.elevation_deg))
            .collect();
        let pred_small = pv.len() <= tv.len();
        let (small, large) = if pred_small { (pv.len(), tv.len()) } else { (tv.len(), pv.len()) };
        if small == 0 {
            matching.push(Vec::new());
            continue;
        }
        let best = assignments(small, large)
            .into_iter()
            .min_by(|a, b| {
                angular_cost(&pv, &tv, a, pred_small)
                    .partial_cmp(&angular_cost(&pv, &tv, b, pred_small))
                    .unwrap()
            })
            .unwrap();
        let mut scene_pairs = Vec::with_capacity(small);
        for (i, &j) in best.iter().enumerate() {
            let (pi, ti) = if pred_small { (i, j) } else { (j, i) };
            ang_sum += angular_separation_deg(&pv[pi], &tv[ti]);
            dist_sum += (pred.sources[pi].distance_m - graph.nodes[ti].distance_m).abs();
            pairs += 1;
            scene_pairs.push((pi, ti));
        }
        matching.push(scene_pairs);
    }
    Ok(LocalizationEval {
        count_accuracy: exact_counts as f64 / preds.len() as f64,
        mean_angular_error_deg: if pairs > 0 { ang_sum / pairs as f64 } else { 0.0 },
        mean_distance_error_m: if pairs > 0 { dist_sum / pairs as f64 } else { 0.0 },
        matching,
    })
}
