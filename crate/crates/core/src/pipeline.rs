//! End-to-end runs on disk: simulate scenes to WAV + scene descriptions,
//! generate the benchmark, score responses, re-validate serialized runs
//! and inspect single scenes.
//!
//! A run directory is flat: `{out}/{run_id}/{scene_id}.*` plus
//! `benchmark.jsonl` and `manifest.json`. The manifest is written last via
//! an atomic rename, so a directory with a manifest is a complete run.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::acoustics::{
    compute_foa_rir, estimate_rir_t60, max_order_for_decay, room_acoustics, AcousticsError,
    RirParams,
};
use crate::benchgen::{
    assemble_benchmark, lint_leakage, read_benchmark_jsonl, validate_item, write_benchmark_jsonl,
    BenchError, GenContext, LevelTargets, RuleTable,
};
use crate::config::{ConfigError, PipelineConfig};
use crate::render::{
    fit_length, mix_scene, pseudo_intensity_doa, render_source, synth_from_ref, DryClip,
    RenderError,
};
use crate::rng::stream_rng;
use crate::rtsd::{build_scene_graph, render_rtsd, RtsdDoc, SceneGraph};
use crate::sampler::{
    sample_scene_from_master, Domain, PaletteEntry, SampleError, SceneSpec, SourcePalette,
    SourceSpec,
};
use crate::scorer::{
    read_responses_jsonl, score_run, EvalReport, Protocol, ResponseRecord, RewardConfig,
    ScoreError,
};
use crate::wav::{read_mono_wav, write_foa_channels, write_foa_wav, WavConvention, WavError};

/// Manifest schema version.
pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("i/o failed at {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("scene {scene}: {source}")]
    Sample { scene: u64, source: SampleError },
    #[error("scene {scene}: {source}")]
    Acoustics { scene: String, source: AcousticsError },
    #[error("scene {scene}: {source}")]
    Render { scene: String, source: RenderError },
    #[error(transparent)]
    Wav(#[from] WavError),
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error("json (de)serialization failed: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown scene id: {0}")]
    UnknownScene(String),
    #[error("run has no benchmark yet; generate one first")]
    MissingBenchmark,
    #[error("dry reference {0:?} cannot be resolved")]
    UnknownDryRef(String),
    #[error("worker pool: {0}")]
    Pool(String),
}

impl PipelineError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        PipelineError::Io { path: path.display().to_string(), source }
    }

    /// Process exit code bucket: 2 for data/validation problems, 3 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Io { .. } | PipelineError::Wav(WavError::Io(_)) => 3,
            _ => 2,
        }
    }
}

/// Per-scene artifact paths, relative to the run directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneRecord {
    pub scene_id: String,
    pub seed: u64,
    pub wav: String,
    pub scene_json: String,
    pub rtsd_json: String,
    pub rtsd_txt: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rir_wavs: Vec<String>,
}

/// Everything needed to re-verify or re-score a finished run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub run_id: String,
    pub seed: u64,
    pub config: PipelineConfig,
    pub scenes: Vec<SceneRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub benchmark: Option<String>,
    pub created_unix: u64,
    pub finished_unix: u64,
}

impl RunManifest {
    pub fn scene(&self, scene_id: &str) -> Option<&SceneRecord> {
        self.scenes.iter().find(|s| s.scene_id == scene_id)
    }
}

// Stable 64-bit FNV-1a over the canonical config JSON; part of the run id
// so one seed with two configs cannot collide in the same out dir.
fn config_fingerprint(config: &PipelineConfig) -> u64 {
    let bytes = serde_json::to_vec(config).expect("config serializes");
    let mut h: u64 = 0xcbf29ce484222325;
    for b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn now_unix() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Loads the dry-source manifest and merges it over the synthetic palette.
/// Paths inside the manifest resolve relative to the manifest file.
pub fn load_palette(config: &PipelineConfig) -> Result<SourcePalette, PipelineError> {
    let mut palette = SourcePalette::synthetic();
    if let Some(manifest_path) = &config.dry_manifest {
        let path = Path::new(manifest_path);
        let text =
            std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
        #[derive(Deserialize)]
        struct DryEntry {
            path: String,
            class_label: String,
            domain: Domain,
            #[serde(default)]
            transcript: Option<String>,
        }
        let entries: Vec<DryEntry> = serde_json::from_str(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for e in entries {
            let resolved = base.join(&e.path);
            palette.entries.push(PaletteEntry {
                class_label: e.class_label,
                domain: e.domain,
                dry_ref: format!("file:{}", resolved.display()),
                transcript: e.transcript,
            });
        }
    }
    Ok(palette)
}

/// Resolves a source's dry clip: deterministic synthesis for `synth:` refs,
/// mono WAV loading for `file:` refs.
fn resolve_dry(
    source: &SourceSpec,
    scene_seed: u64,
    duration_s: f64,
    sample_rate: u32,
) -> Result<DryClip, PipelineError> {
    // Stream keyed by source id so per-source material is stable no matter
    // how many sources precede it.
    let mut rng = stream_rng(scene_seed, 1000 + source.source_id as u64);
    if let Some(clip) = synth_from_ref(&source.dry_ref, &mut rng, duration_s, sample_rate) {
        return Ok(clip);
    }
    if let Some(path) = source.dry_ref.strip_prefix("file:") {
        let (samples, fs) = read_mono_wav(Path::new(path))?;
        return Ok(DryClip {
            samples,
            sample_rate: fs,
            class_label: source.class_label.clone(),
            domain: source.domain,
            provenance: source.dry_ref.clone(),
        });
    }
    Err(PipelineError::UnknownDryRef(source.dry_ref.clone()))
}

/// Renders one scene to its 4-channel clip (and per-source RIRs).
pub fn render_scene(
    scene: &SceneSpec,
    config: &PipelineConfig,
) -> Result<(crate::render::FoaClip, Vec<crate::acoustics::FoaRir>), PipelineError> {
    let params = RirParams {
        max_order: config.rir_max_order,
        sample_rate: scene.sample_rate,
        truncation_db: config.truncation_db,
    };
    let target_len = (scene.duration_s * scene.sample_rate as f64).round() as usize;
    let mut rendered = Vec::with_capacity(scene.sources.len());
    let mut gains = Vec::with_capacity(scene.sources.len());
    let mut rirs = Vec::with_capacity(scene.sources.len());
    for source in &scene.sources {
        let rir = compute_foa_rir(&scene.room, source, &scene.listener, &params)
            .map_err(|e| PipelineError::Acoustics { scene: scene.scene_id.clone(), source: e })?;
        let dry = resolve_dry(source, scene.seed, scene.duration_s, scene.sample_rate)?;
        let sig = render_source(&dry, &rir)
            .map_err(|e| PipelineError::Render { scene: scene.scene_id.clone(), source: e })?;
        rendered.push(fit_length(sig, target_len));
        gains.push(source.gain_db);
        rirs.push(rir);
    }
    let clip = mix_scene(&rendered, &gains, scene.sample_rate)
        .map_err(|e| PipelineError::Render { scene: scene.scene_id.clone(), source: e })?;
    Ok((clip, rirs))
}

fn build_one_scene(
    index: u64,
    config: &PipelineConfig,
    palette: &SourcePalette,
    run_dir: &Path,
) -> Result<SceneRecord, PipelineError> {
    let scene = sample_scene_from_master(config.seed, index, &config.sampler_config(), palette)
        .map_err(|e| PipelineError::Sample { scene: index, source: e })?;
    let acoustics = room_acoustics(&scene.room)
        .map_err(|e| PipelineError::Acoustics { scene: scene.scene_id.clone(), source: e })?;
    let (clip, rirs) = render_scene(&scene, config)?;

    let convention =
        if config.fuma_output { WavConvention::FuMa } else { WavConvention::AmbixSn3d };
    let wav = format!("{}.wav", scene.scene_id);
    write_foa_wav(&clip, &run_dir.join(&wav), convention)?;

    let mut rir_wavs = Vec::new();
    if config.dump_rirs {
        for rir in &rirs {
            let name = format!("{}_src{}_rir.wav", scene.scene_id, rir.source_id);
            write_foa_channels(&rir.channels, rir.sample_rate, &run_dir.join(&name), convention)?;
            rir_wavs.push(name);
        }
    }

    let graph = build_scene_graph(&scene, &acoustics, &config.rtsd, Some(palette));
    let rtsd = render_rtsd(&graph);
    let rtsd_json = format!("{}.rtsd.json", scene.scene_id);
    let rtsd_txt = format!("{}.rtsd.txt", scene.scene_id);
    let scene_json = format!("{}.scene.json", scene.scene_id);
    let write = |name: &str, bytes: &[u8]| {
        let p = run_dir.join(name);
        std::fs::write(&p, bytes).map_err(|e| PipelineError::io(&p, e))
    };
    write(&rtsd_json, rtsd.json.as_bytes())?;
    write(&rtsd_txt, rtsd.text.as_bytes())?;
    write(&scene_json, serde_json::to_string_pretty(&scene)?.as_bytes())?;

    Ok(SceneRecord {
        scene_id: scene.scene_id.clone(),
        seed: scene.seed,
        wav,
        scene_json,
        rtsd_json,
        rtsd_txt,
        rir_wavs,
    })
}

fn write_manifest(manifest: &RunManifest, run_dir: &Path) -> Result<PathBuf, PipelineError> {
    let tmp = run_dir.join("manifest.json.tmp");
    let fin = run_dir.join("manifest.json");
    std::fs::write(&tmp, serde_json::to_string_pretty(manifest)?)
        .map_err(|e| PipelineError::io(&tmp, e))?;
    std::fs::rename(&tmp, &fin).map_err(|e| PipelineError::io(&fin, e))?;
    Ok(fin)
}

/// Samples, renders and describes `n_scenes` scenes, then persists the
/// manifest. Idempotent per (seed, config): the run id and every artifact
/// byte are functions of them.
pub fn run_simulate(config: &PipelineConfig) -> Result<(RunManifest, PathBuf), PipelineError> {
    config.validate()?;
    let created_unix = now_unix();
    let palette = load_palette(config)?;
    let run_id = format!("run_{:016x}_{:08x}", config.seed, config_fingerprint(config) as u32);
    let run_dir = Path::new(&config.out_dir).join(&run_id);
    std::fs::create_dir_all(&run_dir).map_err(|e| PipelineError::io(&run_dir, e))?;

    let indices: Vec<u64> = (0..config.n_scenes as u64).collect();
    let build = |i: &u64| build_one_scene(*i, config, &palette, &run_dir);
    let mut scenes: Vec<SceneRecord> = match config.workers {
        Some(1) => indices.iter().map(build).collect::<Result<_, _>>()?,
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| PipelineError::Pool(e.to_string()))?
            .install(|| indices.par_iter().map(build).collect::<Result<Vec<_>, _>>())?,
        None => indices.par_iter().map(build).collect::<Result<Vec<_>, _>>()?,
    };
    scenes.sort_by(|a, b| a.scene_id.cmp(&b.scene_id));

    let manifest = RunManifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        run_id,
        seed: config.seed,
        config: config.clone(),
        scenes,
        benchmark: None,
        created_unix,
        finished_unix: now_unix(),
    };
    let path = write_manifest(&manifest, &run_dir)?;
    Ok((manifest, path))
}

pub fn load_manifest(path: &Path) -> Result<RunManifest, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn load_scene(run_dir: &Path, record: &SceneRecord) -> Result<SceneSpec, PipelineError> {
    let p = run_dir.join(&record.scene_json);
    let text = std::fs::read_to_string(&p).map_err(|e| PipelineError::io(&p, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn graphs_for_run(
    manifest: &RunManifest,
    run_dir: &Path,
    palette: &SourcePalette,
) -> Result<Vec<SceneGraph>, PipelineError> {
    manifest
        .scenes
        .iter()
        .map(|record| {
            let scene = load_scene(run_dir, record)?;
            let acoustics = room_acoustics(&scene.room).map_err(|e| PipelineError::Acoustics {
                scene: scene.scene_id.clone(),
                source: e,
            })?;
            Ok(build_scene_graph(&scene, &acoustics, &manifest.config.rtsd, Some(palette)))
        })
        .collect()
}

/// Summary returned by benchmark generation.
#[derive(Debug, Clone, Serialize)]
pub struct BenchSummary {
    pub benchmark_path: String,
    pub n_items: usize,
    pub level_mix: [f64; 3],
    pub per_task_counts: BTreeMap<String, usize>,
}

/// Generates the benchmark for a finished run and links item ids to scene
/// WAVs in a companion file.
pub fn run_bench(
    manifest_path: &Path,
    n_items: usize,
    seed: u64,
) -> Result<BenchSummary, PipelineError> {
    let mut manifest = load_manifest(manifest_path)?;
    let run_dir = manifest_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let palette = load_palette(&manifest.config)?;
    let graphs = graphs_for_run(&manifest, &run_dir, &palette)?;
    let rules = RuleTable::builtin();
    let mut ctx = GenContext::new(rules);
    ctx.rtsd = manifest.config.rtsd.clone();
    ctx.transcript_pool = palette.entries.iter().filter_map(|e| e.transcript.clone()).collect();
    for class in graphs.iter().flat_map(|g| g.nodes.iter().map(|n| n.class_label.clone())) {
        if !ctx.class_vocab.contains(&class) {
            ctx.class_vocab.push(class);
        }
    }
    let mut rng = crate::rng::seeded_rng(seed);
    let set = assemble_benchmark(&graphs, &mut rng, n_items, &LevelTargets::default(), &ctx, seed)?;

    let bench_name = "benchmark.jsonl".to_string();
    write_benchmark_jsonl(&set, &run_dir.join(&bench_name))?;
    let wav_by_scene: BTreeMap<String, String> =
        manifest.scenes.iter().map(|s| (s.scene_id.clone(), s.wav.clone())).collect();
    let item_map: BTreeMap<String, String> = set
        .items
        .iter()
        .map(|i| (i.item_id.clone(), wav_by_scene.get(&i.scene_id).cloned().unwrap_or_default()))
        .collect();
    let map_path = run_dir.join("benchmark_items.json");
    std::fs::write(&map_path, serde_json::to_string_pretty(&item_map)?)
        .map_err(|e| PipelineError::io(&map_path, e))?;

    manifest.benchmark = Some(bench_name.clone());
    write_manifest(&manifest, &run_dir)?;

    let mut per_task_counts: BTreeMap<String, usize> = BTreeMap::new();
    for item in &set.items {
        *per_task_counts.entry(item.task.name().to_string()).or_default() += 1;
    }
    Ok(BenchSummary {
        benchmark_path: run_dir.join(&bench_name).display().to_string(),
        n_items: set.items.len(),
        level_mix: set.level_mix,
        per_task_counts,
    })
}

/// Scores a response file against a benchmark file and optionally writes
/// the report JSON.
pub fn run_score(
    benchmark_path: &Path,
    responses_path: &Path,
    protocol: Protocol,
    reward_cfg: &RewardConfig,
    report_path: Option<&Path>,
) -> Result<EvalReport, PipelineError> {
    let items = read_benchmark_jsonl(benchmark_path)?;
    let responses: Vec<ResponseRecord> = read_responses_jsonl(responses_path)?;
    let report = score_run(&responses, &items, protocol, reward_cfg)?;
    if let Some(path) = report_path {
        std::fs::write(path, serde_json::to_string_pretty(&report)?)
            .map_err(|e| PipelineError::io(path, e))?;
    }
    Ok(report)
}

/// Independent re-validation of a serialized run: every benchmark item is
/// re-checked against the scene graph parsed back from its RTSD JSON, plus
/// the leakage lint.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub checked: usize,
    pub oracle_failures: Vec<String>,
    pub lint_failures: Vec<String>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.oracle_failures.is_empty() && self.lint_failures.is_empty()
    }
}

pub fn run_validate(manifest_path: &Path) -> Result<ValidationReport, PipelineError> {
    let manifest = load_manifest(manifest_path)?;
    let run_dir = manifest_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let bench_name = manifest.benchmark.clone().ok_or(PipelineError::MissingBenchmark)?;
    let items = read_benchmark_jsonl(&run_dir.join(bench_name))?;

    // Graphs come from the serialized RTSD files, not from regeneration.
    let mut graphs: BTreeMap<String, SceneGraph> = BTreeMap::new();
    for record in &manifest.scenes {
        let p = run_dir.join(&record.rtsd_json);
        let text = std::fs::read_to_string(&p).map_err(|e| PipelineError::io(&p, e))?;
        let doc: RtsdDoc = serde_json::from_str(&text)?;
        graphs.insert(record.scene_id.clone(), doc.graph);
    }
    let rules = RuleTable::builtin();
    let mut ctx = GenContext::new(rules);
    ctx.rtsd = manifest.config.rtsd.clone();

    let mut oracle_failures = Vec::new();
    let mut lint_failures = Vec::new();
    for item in &items {
        match graphs.get(&item.scene_id) {
            Some(graph) => {
                if !validate_item(item, graph, &ctx) {
                    oracle_failures.push(item.item_id.clone());
                }
                if !lint_leakage(item, graph) {
                    lint_failures.push(item.item_id.clone());
                }
            }
            None => oracle_failures.push(item.item_id.clone()),
        }
    }
    Ok(ValidationReport { checked: items.len(), oracle_failures, lint_failures })
}

/// Per-source direction check of one scene.
#[derive(Debug, Clone, Serialize)]
pub struct DoaCheck {
    pub source_id: usize,
    pub true_azimuth_deg: f64,
    pub true_elevation_deg: f64,
    pub estimated_azimuth_deg: f64,
    pub estimated_elevation_deg: f64,
    pub angular_error_deg: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InspectReport {
    pub scene_id: String,
    pub rtsd_text: String,
    pub relations: Vec<String>,
    pub sabine_rt60_s: f64,
    pub rtsd_rt60_s: f64,
    /// Schroeder estimate from the first source's simulated RIR, when the
    /// decay is deep enough to fit.
    pub measured_t60_s: Option<f64>,
    pub doa_checks: Vec<DoaCheck>,
}

/// Recomputes ground-truth checks for one scene of a run: the RTSD prose,
/// the relation list, RT60 agreement, and a pseudo-intensity DOA check of
/// every source's RIR against the sampled direction.
pub fn run_inspect(manifest_path: &Path, scene_id: &str) -> Result<InspectReport, PipelineError> {
    let manifest = load_manifest(manifest_path)?;
    let run_dir = manifest_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let record = manifest
        .scene(scene_id)
        .ok_or_else(|| PipelineError::UnknownScene(scene_id.to_string()))?;
    let scene = load_scene(&run_dir, record)?;
    let acoustics = room_acoustics(&scene.room)
        .map_err(|e| PipelineError::Acoustics { scene: scene_id.to_string(), source: e })?;
    let palette = load_palette(&manifest.config)?;
    let graph = build_scene_graph(&scene, &acoustics, &manifest.config.rtsd, Some(&palette));
    let rtsd = render_rtsd(&graph);

    let rtsd_rt60 = {
        let p = run_dir.join(&record.rtsd_json);
        let text = std::fs::read_to_string(&p).map_err(|e| PipelineError::io(&p, e))?;
        let doc: RtsdDoc = serde_json::from_str(&text)?;
        doc.graph.room.acoustics.rt60_s
    };

    let params = RirParams {
        max_order: manifest.config.rir_max_order,
        sample_rate: scene.sample_rate,
        truncation_db: manifest.config.truncation_db,
    };
    let mut doa_checks = Vec::new();
    let mut measured_t60 = None;
    for source in &scene.sources {
        let rir = compute_foa_rir(&scene.room, source, &scene.listener, &params)
            .map_err(|e| PipelineError::Acoustics { scene: scene_id.to_string(), source: e })?;
        if measured_t60.is_none() {
            // The decay check needs a deeper order budget than rendering.
            let deep = RirParams {
                max_order: Some(max_order_for_decay(&scene.room, -35.0)),
                ..params.clone()
            };
            measured_t60 = compute_foa_rir(&scene.room, source, &scene.listener, &deep)
                .ok()
                .and_then(|r| estimate_rir_t60(&r, &scene.room, source.distance).ok());
        }
        if let Ok(doa) = pseudo_intensity_doa(&rir.channels) {
            let truth = crate::geometry::unit_from_angles(source.azimuth, source.elevation);
            doa_checks.push(DoaCheck {
                source_id: source.source_id,
                true_azimuth_deg: source.azimuth,
                true_elevation_deg: source.elevation,
                estimated_azimuth_deg: doa.azimuth_deg,
                estimated_elevation_deg: doa.elevation_deg,
                angular_error_deg: crate::geometry::angular_separation_deg(&truth, &doa.direction),
            });
        }
    }
    let relations = graph
        .edges
        .iter()
        .map(|e| match e.value {
            Some(v) => format!("{:?} {} -> {} ({v:.1})", e.kind, e.subject_id, e.object_id),
            None => format!("{:?} {} -> {}", e.kind, e.subject_id, e.object_id),
        })
        .collect();
    Ok(InspectReport {
        scene_id: scene_id.to_string(),
        rtsd_text: rtsd.text,
        relations,
        sabine_rt60_s: acoustics.rt60_s,
        rtsd_rt60_s: rtsd_rt60,
        measured_t60_s: measured_t60,
        doa_checks,
    })
}
