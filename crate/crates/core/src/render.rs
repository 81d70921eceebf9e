//! First-order B-format rendering: direction encoding (ACN order, SN3D
//! normalization, so the W gain is exactly 1), convolution of dry audio
//! with FOA RIRs, scene mixing, deterministic synthetic dry material, and
//! the pseudo-intensity DOA estimate used to cross-check renders.

use rand::Rng;
use rustfft::{num_complex::Complex64, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::acoustics::FoaRir;
use crate::geometry::{angles_from_vec, Vec3};
use crate::sampler::Domain;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("sample rate mismatch: {0} Hz vs {1} Hz")]
    SampleRateMismatch(u32, u32),
    #[error("cannot mix an empty scene")]
    EmptyScene,
    #[error("rendered source lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("no directional intensity in the signal")]
    Silence,
}

/// First-order spherical-harmonic gains for one direction, ACN/SN3D.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoaGains {
    pub w: f64,
    pub y: f64,
    pub z: f64,
    pub x: f64,
}

/// Encodes a direction into B-format gains: `w = 1`,
/// `x = cos(az)cos(el)`, `y = sin(az)cos(el)`, `z = sin(el)`.
/// Angles are degrees and may be any real value (wrapped internally).
pub fn encode_direction(azimuth_deg: f64, elevation_deg: f64) -> FoaGains {
    let az = azimuth_deg.to_radians();
    let el = elevation_deg.to_radians();
    FoaGains {
        w: 1.0,
        y: az.sin() * el.cos(),
        z: el.sin(),
        x: az.cos() * el.cos(),
    }
}

/// Recovers (azimuth, elevation) degrees from first-order gains.
pub fn decode_direction(g: &FoaGains) -> (f64, f64) {
    angles_from_vec(&Vec3::new(g.x, g.y, g.z))
}

/// A rendered or mixed 4-channel clip, ACN order `[W, Y, Z, X]`.
#[derive(Debug, Clone)]
pub struct FoaClip {
    pub channels: [Vec<f32>; 4],
    pub sample_rate: u32,
    /// Absolute peak after any normalization.
    pub peak: f32,
    /// Linear factor applied during mixing; 1.0 when the mix fit as-is.
    pub normalization: f64,
}

impl FoaClip {
    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn duration_s(&self) -> f64 {
        self.len() as f64 / self.sample_rate as f64
    }

    pub fn from_channels(channels: [Vec<f32>; 4], sample_rate: u32) -> Self {
        let peak = channels
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0f32, |m, &v| m.max(v.abs()));
        FoaClip { channels, sample_rate, peak, normalization: 1.0 }
    }
}

/// Mono dry source material.
#[derive(Debug, Clone)]
pub struct DryClip {
    pub samples: Vec<f32>,
    pub sample_rate: u32,
    pub class_label: String,
    pub domain: Domain,
    /// Where the clip came from, e.g. `synth:tone:f=440` or a file path.
    pub provenance: String,
}

// Direct convolution for short kernels, FFT overlap otherwise. Accumulation
// is f64 with a single rounding to f32 per output sample.
fn convolve(a: &[f32], b: &[f32]) -> Vec<f32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let out_len = a.len() + b.len() - 1;
    if a.len().min(b.len()) <= 64 {
        let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
        let mut out = vec![0.0f32; out_len];
        for (i, &s) in short.iter().enumerate() {
            if s == 0.0 {
                continue;
            }
            let s = s as f64;
            for (j, &l) in long.iter().enumerate() {
                let acc = out[i + j] as f64 + s * l as f64;
                out[i + j] = acc as f32;
            }
        }
        return out;
    }
    let n = out_len.next_power_of_two();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let ifft = planner.plan_fft_inverse(n);
    let mut fa: Vec<Complex64> = a
        .iter()
        .map(|&v| Complex64::new(v as f64, 0.0))
        .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
        .take(n)
        .collect();
    let mut fb: Vec<Complex64> = b
        .iter()
        .map(|&v| Complex64::new(v as f64, 0.0))
        .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
        .take(n)
        .collect();
    fft.process(&mut fa);
    fft.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(fb.iter()) {
        *x *= *y;
    }
    ifft.process(&mut fa);
    let scale = 1.0 / n as f64;
    fa[..out_len].iter().map(|c| (c.re * scale) as f32).collect()
}

/// Convolves a dry clip with each RIR channel. The output keeps the full
/// `len(dry) + len(rir) - 1` length; use [`fit_length`] to match the scene
/// duration.
pub fn render_source(dry: &DryClip, rir: &FoaRir) -> Result<[Vec<f32>; 4], RenderError> {
    if dry.sample_rate != rir.sample_rate {
        return Err(RenderError::SampleRateMismatch(dry.sample_rate, rir.sample_rate));
    }
    Ok([
        convolve(&dry.samples, &rir.channels[0]),
        convolve(&dry.samples, &rir.channels[1]),
        convolve(&dry.samples, &rir.channels[2]),
        convolve(&dry.samples, &rir.channels[3]),
    ])
}

/// Trims or zero-pads every channel to exactly `len` samples.
pub fn fit_length(mut channels: [Vec<f32>; 4], len: usize) -> [Vec<f32>; 4] {
    for c in channels.iter_mut() {
        c.resize(len, 0.0);
    }
    channels
}

/// Peak target used when a mix overflows: -1 dBFS.
pub const NORMALIZE_TARGET: f64 = 0.8912509381337456;

/// Applies per-source gains, sums, and peak-normalizes to -1 dBFS only if
/// the sum would clip. The applied factor is recorded on the clip.
pub fn mix_scene(
    rendered: &[[Vec<f32>; 4]],
    gains_db: &[f64],
    sample_rate: u32,
) -> Result<FoaClip, RenderError> {
    if rendered.is_empty() || gains_db.len() != rendered.len() {
        return Err(RenderError::EmptyScene);
    }
    let len = rendered[0][0].len();
    for r in rendered {
        if r[0].len() != len {
            return Err(RenderError::LengthMismatch(len, r[0].len()));
        }
    }
    let mut acc = [vec![0.0f64; len], vec![0.0f64; len], vec![0.0f64; len], vec![0.0f64; len]];
    for (src, db) in rendered.iter().zip(gains_db) {
        let g = 10f64.powf(db / 20.0);
        for ch in 0..4 {
            for (o, &v) in acc[ch].iter_mut().zip(src[ch].iter()) {
                *o += g * v as f64;
            }
        }
    }
    let peak = acc
        .iter()
        .flat_map(|c| c.iter())
        .fold(0.0f64, |m, &v| m.max(v.abs()));
    let normalization = if peak > 1.0 { NORMALIZE_TARGET / peak } else { 1.0 };
    let channels = acc.map(|c| c.into_iter().map(|v| (v * normalization) as f32).collect::<Vec<f32>>());
    let peak = channels
        .iter()
        .flat_map(|c| c.iter())
        .fold(0.0f32, |m, &v| m.max(v.abs()));
    Ok(FoaClip { channels, sample_rate, peak, normalization })
}

/// Families of deterministic synthetic dry material.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthKind {
    Tone,
    NoiseBurst,
    Chirp,
    ClickTrain,
}

impl SynthKind {
    pub fn label(&self) -> &'static str {
        match self {
            SynthKind::Tone => "tone",
            SynthKind::NoiseBurst => "noise_burst",
            SynthKind::Chirp => "chirp",
            SynthKind::ClickTrain => "click_train",
        }
    }

    pub fn from_label(label: &str) -> Option<SynthKind> {
        match label {
            "tone" => Some(SynthKind::Tone),
            "noise_burst" => Some(SynthKind::NoiseBurst),
            "chirp" => Some(SynthKind::Chirp),
            "click_train" => Some(SynthKind::ClickTrain),
            _ => None,
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            SynthKind::Tone => Domain::Music,
            SynthKind::Chirp => Domain::Speech,
            SynthKind::NoiseBurst | SynthKind::ClickTrain => Domain::Environmental,
        }
    }
}

fn fade_edges(samples: &mut [f32], sample_rate: u32) {
    let n = ((sample_rate as f64 * 0.005) as usize).min(samples.len() / 2);
    for i in 0..n {
        let g = i as f32 / n as f32;
        samples[i] *= g;
        let last = samples.len() - 1 - i;
        samples[last] *= g;
    }
}

/// Pure sine at `freq_hz`, amplitude 0.7, 5 ms edge fades.
pub fn synth_tone(freq_hz: f64, duration_s: f64, sample_rate: u32) -> DryClip {
    let n = ((duration_s * sample_rate as f64).round() as usize).max(1);
    let mut samples: Vec<f32> = (0..n)
        .map(|i| {
            let t = i as f64 / sample_rate as f64;
            (0.7 * (2.0 * std::f64::consts::PI * freq_hz * t).sin()) as f32
        })
        .collect();
    fade_edges(&mut samples, sample_rate);
    DryClip {
        samples,
        sample_rate,
        class_label: "tone".into(),
        domain: Domain::Music,
        provenance: format!("synth:tone:f={freq_hz}"),
    }
}

/// Linear chirp from `f0_hz` to `f1_hz`.
pub fn synth_chirp(f0_hz: f64, f1_hz: f64, duration_s: f64, sample_rate: u32) -> DryClip {
    let n = ((duration_s * sample_rate as f64).round() as usize).max(1);
    let dur = n as f64 / sample_rate as f64;
    let mut samples: Vec<f32> = (0..n)
        .map(|i| {
            let t = i as f64 / sample_rate as f64;
            let phase = 2.0 * std::f64::consts::PI * (f0_hz * t + 0.5 * (f1_hz - f0_hz) / dur * t * t);
            (0.7 * phase.sin()) as f32
        })
        .collect();
    fade_edges(&mut samples, sample_rate);
    DryClip {
        samples,
        sample_rate,
        class_label: "chirp".into(),
        domain: Domain::Speech,
        provenance: format!("synth:chirp:f0={f0_hz},f1={f1_hz}"),
    }
}

/// White-noise bursts separated by silence; burst/gap layout drawn from
/// the RNG.
pub fn synth_noise_burst<R: Rng + ?Sized>(rng: &mut R, duration_s: f64, sample_rate: u32) -> DryClip {
    let n = ((duration_s * sample_rate as f64).round() as usize).max(1);
    let mut samples = vec![0.0f32; n];
    let mut pos = 0usize;
    while pos < n {
        let burst = (rng.random_range(0.05..0.20) * sample_rate as f64) as usize;
        let gap = (rng.random_range(0.10..0.40) * sample_rate as f64) as usize;
        let amp = rng.random_range(0.4..0.8) as f32;
        let end = (pos + burst).min(n);
        for s in samples[pos..end].iter_mut() {
            *s = amp * (rng.random_range(-1.0f64..1.0) as f32);
        }
        pos += burst + gap.max(1);
    }
    fade_edges(&mut samples, sample_rate);
    DryClip {
        samples,
        sample_rate,
        class_label: "noise_burst".into(),
        domain: Domain::Environmental,
        provenance: "synth:noise_burst".into(),
    }
}

/// Unit clicks at an exact integer-sample period of `round(period_s * fs)`.
pub fn synth_click_train(period_s: f64, duration_s: f64, sample_rate: u32) -> DryClip {
    let n = ((duration_s * sample_rate as f64).round() as usize).max(1);
    let period = ((period_s * sample_rate as f64).round() as usize).max(1);
    let mut samples = vec![0.0f32; n];
    let mut i = 0;
    while i < n {
        samples[i] = 0.9;
        i += period;
    }
    DryClip {
        samples,
        sample_rate,
        class_label: "click_train".into(),
        domain: Domain::Environmental,
        provenance: format!("synth:click_train:p={period_s}"),
    }
}

/// Draws one dry clip of the given family with per-seed parameters.
pub fn synth_dry<R: Rng + ?Sized>(
    kind: SynthKind,
    rng: &mut R,
    duration_s: f64,
    sample_rate: u32,
) -> DryClip {
    match kind {
        SynthKind::Tone => synth_tone(rng.random_range(180.0..1500.0), duration_s, sample_rate),
        SynthKind::Chirp => {
            let f0 = rng.random_range(250.0..800.0);
            let ratio = rng.random_range(1.5..3.5);
            synth_chirp(f0, f0 * ratio, duration_s, sample_rate)
        }
        SynthKind::NoiseBurst => synth_noise_burst(rng, duration_s, sample_rate),
        SynthKind::ClickTrain => {
            synth_click_train(rng.random_range(0.08..0.35), duration_s, sample_rate)
        }
    }
}

/// Resolves a `synth:<kind>` dry reference; other schemes (file paths) are
/// handled by the pipeline's manifest loader.
pub fn synth_from_ref<R: Rng + ?Sized>(
    dry_ref: &str,
    rng: &mut R,
    duration_s: f64,
    sample_rate: u32,
) -> Option<DryClip> {
    let kind = SynthKind::from_label(dry_ref.strip_prefix("synth:")?)?;
    Some(synth_dry(kind, rng, duration_s, sample_rate))
}

/// A pseudo-intensity direction-of-arrival estimate.
#[derive(Debug, Clone, Copy)]
pub struct Doa {
    pub direction: Vec3,
    pub azimuth_deg: f64,
    pub elevation_deg: f64,
}

/// Dominant arrival direction of a 4-channel signal (clip or RIR):
/// the normalized time sum of `W * (X, Y, Z)`.
pub fn pseudo_intensity_doa(channels: &[Vec<f32>; 4]) -> Result<Doa, RenderError> {
    let (w, y, z, x) = (&channels[0], &channels[1], &channels[2], &channels[3]);
    let mut v = Vec3::ZERO;
    for i in 0..w.len() {
        let wi = w[i] as f64;
        v.x += wi * x[i] as f64;
        v.y += wi * y[i] as f64;
        v.z += wi * z[i] as f64;
    }
    let direction = match v.normalized() {
        Some(d) if v.norm() >= 1e-9 => d,
        _ => return Err(RenderError::Silence),
    };
    let (azimuth_deg, elevation_deg) = angles_from_vec(&direction);
    Ok(Doa { direction, azimuth_deg, elevation_deg })
}
