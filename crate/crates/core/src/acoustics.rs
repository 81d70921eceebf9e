//! Shoebox room acoustics: image-source enumeration, FOA room impulse
//! responses with fractional-delay pulses, and reverberation statistics
//! (Sabine RT60, Schroeder decay estimation).
//!
//! Absorption is a single scalar per room applied to all six walls; the
//! per-bounce amplitude factor is `sqrt(1 - alpha)`, so an order-n image
//! carries `(1 - alpha)^(n/2) / r`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{angles_from_vec, Vec3};
use crate::render::encode_direction;
use crate::sampler::{ListenerSpec, RoomSpec, SizeCategory, SourceSpec};

/// Speed of sound, m/s.
pub const SPEED_OF_SOUND: f64 = 343.0;

/// Rooms with mean absorption at or above this are treated as anechoic:
/// reported RT60 is 0.0 s.
pub const ANECHOIC_ALPHA: f64 = 0.99;

/// Half-width of the Hann-windowed sinc used for fractional delays
/// (16 taps total).
const SINC_HALF_WIDTH: i64 = 8;

#[derive(Debug, Error)]
pub enum AcousticsError {
    #[error("degenerate room: all dimensions must be positive, got ({0}, {1}, {2})")]
    DegenerateRoom(f64, f64, f64),
    #[error("sample rate {0} Hz below the 8000 Hz minimum")]
    SampleRate(u32),
    #[error("mean absorption must be in (0, 1], got {0}")]
    Absorption(f64),
    #[error("decay range too short to fit a slope ({0:.1} dB available)")]
    DecayRange(f64),
}

/// One mirrored source of the image-source lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageSource {
    pub position: Vec3,
    pub reflection_order: u32,
    /// `(1 - alpha)^(order/2) / r`, with r the image-listener distance.
    pub amplitude: f64,
    pub delay_s: f64,
}

/// 4-channel FOA impulse response in ACN order `[W, Y, Z, X]`.
#[derive(Debug, Clone)]
pub struct FoaRir {
    pub channels: [Vec<f32>; 4],
    pub sample_rate: u32,
    pub source_id: usize,
    pub truncation_db: f64,
    /// Reflection-order bound the response was simulated with.
    pub max_order: u32,
}

impl FoaRir {
    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn w(&self) -> &[f32] {
        &self.channels[0]
    }
}

/// Analytic per-room statistics used as scene-description ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoomAcoustics {
    pub surface_area_m2: f64,
    pub mean_absorption: f64,
    pub volume_m3: f64,
    pub rt60_s: f64,
}

/// RIR computation knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RirParams {
    /// Maximum reflection order; `None` picks the per-category default
    /// (Small 10, Medium 8, Large 6).
    pub max_order: Option<u32>,
    pub sample_rate: u32,
    /// Tail cut: the RIR ends where the remaining Schroeder energy of the
    /// W channel drops below this many dB of the total.
    pub truncation_db: f64,
}

impl Default for RirParams {
    fn default() -> Self {
        RirParams { max_order: None, sample_rate: 16_000, truncation_db: -60.0 }
    }
}

impl RirParams {
    /// Direct path only; pair with an `ANECHOIC_ALPHA` room.
    pub fn anechoic(sample_rate: u32) -> Self {
        RirParams { max_order: Some(0), sample_rate, truncation_db: -60.0 }
    }
}

/// Default reflection-order budget per room size.
pub fn default_max_order(cat: SizeCategory) -> u32 {
    match cat {
        SizeCategory::Small => 10,
        SizeCategory::Medium => 8,
        SizeCategory::Large => 6,
    }
}

fn check_room(room: &RoomSpec) -> Result<(), AcousticsError> {
    let d = &room.dims;
    if d.x <= 0.0 || d.y <= 0.0 || d.z <= 0.0 {
        return Err(AcousticsError::DegenerateRoom(d.x, d.y, d.z));
    }
    Ok(())
}

// Per-axis image coordinates: even images 2mL + s carry 2|m| reflections,
// odd images 2mL - s carry |2m - 1|.
fn axis_images(s: f64, l: f64, max_order: u32) -> Vec<(f64, u32)> {
    let n = max_order as i64;
    let mut out = Vec::new();
    for m in -(n / 2 + 1)..=(n / 2 + 1) {
        let even_count = 2 * m.abs();
        if even_count <= n {
            out.push((2.0 * m as f64 * l + s, even_count as u32));
        }
        let odd_count = (2 * m - 1).abs();
        if odd_count <= n {
            out.push((2.0 * m as f64 * l - s, odd_count as u32));
        }
    }
    out
}

/// Enumerates all image sources up to `max_order`, including the order-0
/// direct path. Amplitudes and delays are relative to `listener`.
pub fn enumerate_images(
    room: &RoomSpec,
    source: &SourceSpec,
    listener: &ListenerSpec,
    max_order: u32,
) -> Result<Vec<ImageSource>, AcousticsError> {
    check_room(room)?;
    let beta = (1.0 - room.absorption).max(0.0).sqrt();
    let xs = axis_images(source.cartesian.x, room.dims.x, max_order);
    let ys = axis_images(source.cartesian.y, room.dims.y, max_order);
    let zs = axis_images(source.cartesian.z, room.dims.z, max_order);
    let mut images = Vec::new();
    for &(px, cx) in &xs {
        for &(py, cy) in &ys {
            if cx + cy > max_order {
                continue;
            }
            for &(pz, cz) in &zs {
                let order = cx + cy + cz;
                if order > max_order {
                    continue;
                }
                let position = Vec3::new(px, py, pz);
                let r = position.sub(&listener.position).norm().max(1e-3);
                images.push(ImageSource {
                    position,
                    reflection_order: order,
                    amplitude: beta.powi(order as i32) / r,
                    delay_s: r / SPEED_OF_SOUND,
                });
            }
        }
    }
    Ok(images)
}

// sinc(x) = sin(pi x) / (pi x)
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

// Hann-windowed sinc pulse of amplitude `amp` centered at fractional
// sample `center`, accumulated into `buf`.
fn add_pulse(buf: &mut [f64], center: f64, amp: f64) {
    let lo = (center.ceil() as i64 - SINC_HALF_WIDTH).max(0);
    let hi = ((center.floor() as i64) + SINC_HALF_WIDTH).min(buf.len() as i64 - 1);
    for k in lo..=hi {
        let t = k as f64 - center;
        let window = 0.5 * (1.0 + (std::f64::consts::PI * t / SINC_HALF_WIDTH as f64).cos());
        buf[k as usize] += amp * sinc(t) * window;
    }
}

/// Simulates the FOA room impulse response for one source: every image
/// contributes a windowed-sinc pulse at its arrival delay, encoded into
/// W/Y/Z/X by the direction of arrival in listener coordinates.
pub fn compute_foa_rir(
    room: &RoomSpec,
    source: &SourceSpec,
    listener: &ListenerSpec,
    params: &RirParams,
) -> Result<FoaRir, AcousticsError> {
    check_room(room)?;
    if params.sample_rate < 8000 {
        return Err(AcousticsError::SampleRate(params.sample_rate));
    }
    let max_order = params.max_order.unwrap_or_else(|| default_max_order(room.size_category));
    let images = enumerate_images(room, source, listener, max_order)?;
    let fs = params.sample_rate as f64;
    let max_delay = images.iter().map(|i| i.delay_s).fold(0.0, f64::max);
    let len = (max_delay * fs).ceil() as usize + SINC_HALF_WIDTH as usize + 1;
    let mut acc = [vec![0.0f64; len], vec![0.0f64; len], vec![0.0f64; len], vec![0.0f64; len]];
    for img in &images {
        let v = img.position.sub(&listener.position).rotate_z(-listener.orientation);
        let (az, el) = angles_from_vec(&v);
        let g = encode_direction(az, el);
        let center = img.delay_s * fs;
        for (ch, gain) in [g.w, g.y, g.z, g.x].into_iter().enumerate() {
            if gain.abs() > 0.0 {
                add_pulse(&mut acc[ch], center, img.amplitude * gain);
            }
        }
    }
    // Cut where the remaining W-channel energy falls below truncation_db.
    let cut = truncation_index(&acc[0], params.truncation_db);
    let channels = acc.map(|c| c[..cut].iter().map(|&v| v as f32).collect::<Vec<f32>>());
    Ok(FoaRir {
        channels,
        sample_rate: params.sample_rate,
        source_id: source.source_id,
        truncation_db: params.truncation_db,
        max_order,
    })
}

fn truncation_index(w: &[f64], truncation_db: f64) -> usize {
    let total: f64 = w.iter().map(|v| v * v).sum();
    if total <= 0.0 {
        return w.len();
    }
    let threshold = total * 10f64.powf(truncation_db / 10.0);
    let mut tail = 0.0;
    for i in (0..w.len()).rev() {
        tail += w[i] * w[i];
        if tail > threshold {
            return (i + 2).min(w.len());
        }
    }
    w.len()
}

/// Sabine reverberation time `0.161 V / (alpha S)`; rooms at or above
/// [`ANECHOIC_ALPHA`] report 0.0 s.
pub fn sabine_rt60(room: &RoomSpec) -> Result<f64, AcousticsError> {
    let alpha = room.absorption;
    if alpha <= 0.0 || alpha > 1.0 {
        return Err(AcousticsError::Absorption(alpha));
    }
    if alpha >= ANECHOIC_ALPHA {
        return Ok(0.0);
    }
    let d = &room.dims;
    let volume = d.x * d.y * d.z;
    let surface = 2.0 * (d.x * d.y + d.x * d.z + d.y * d.z);
    Ok(0.161 * volume / (alpha * surface))
}

/// Bundles surface area, volume, mean absorption and RT60 for the scene
/// ground truth.
pub fn room_acoustics(room: &RoomSpec) -> Result<RoomAcoustics, AcousticsError> {
    check_room(room)?;
    let d = &room.dims;
    Ok(RoomAcoustics {
        surface_area_m2: 2.0 * (d.x * d.y + d.x * d.z + d.y * d.z),
        mean_absorption: room.absorption,
        volume_m3: d.x * d.y * d.z,
        rt60_s: sabine_rt60(room)?,
    })
}

/// Backward-integrated (Schroeder) energy decay of `ir`, in dB relative to
/// the total energy. One value per sample.
pub fn schroeder_curve_db(ir: &[f32]) -> Vec<f64> {
    let mut tail = vec![0.0f64; ir.len()];
    let mut acc = 0.0f64;
    for i in (0..ir.len()).rev() {
        acc += (ir[i] as f64) * (ir[i] as f64);
        tail[i] = acc;
    }
    let total = if acc > 0.0 { acc } else { 1.0 };
    tail.into_iter().map(|e| 10.0 * ((e / total).max(1e-300)).log10()).collect()
}

/// Time up to which a `max_order`-truncated image set is complete: the
/// first missing image (order `max_order + 1`) cannot arrive earlier than
/// `max_order * min_dim / c`. Decay fitted beyond this point is biased fast
/// because late images are under-populated.
pub fn ism_valid_time(room: &RoomSpec, max_order: u32) -> f64 {
    let min_dim = room.dims.x.min(room.dims.y).min(room.dims.z);
    max_order as f64 * min_dim / SPEED_OF_SOUND
}

/// Reflection-order budget that makes a Schroeder fit down to `depth_db`
/// trustworthy for this room. Two constraints: the energy removed by the
/// order bound must sit well below the fit floor (15 dB of headroom covers
/// the growing image count per order), and the complete-image window
/// [`ism_valid_time`] must extend past the time the decay needs to reach
/// the floor.
pub fn max_order_for_decay(room: &RoomSpec, depth_db: f64) -> u32 {
    let alpha = room.absorption.clamp(0.05, 0.98);
    let per_bounce = -10.0 * (1.0 - alpha).log10();
    let order_energy = (depth_db.abs() + 15.0) / per_bounce;
    let d = &room.dims;
    let volume = d.x * d.y * d.z;
    let surface = 2.0 * (d.x * d.y + d.x * d.z + d.y * d.z);
    let rt60 = 0.161 * volume / (alpha * surface);
    let t_floor = (depth_db.abs() + 5.0) / 60.0 * rt60;
    let min_dim = d.x.min(d.y).min(d.z);
    let order_time = t_floor * SPEED_OF_SOUND / min_dim + 2.0;
    order_energy.max(order_time).ceil().clamp(6.0, 64.0) as u32
}

/// Estimates T60 from the Schroeder curve by a least-squares line over the
/// `[hi_db, lo_db]` section (-5..-25 dB is the usual choice), extrapolated
/// to 60 dB. The fit never reaches past `t_limit_s` (simulation validity
/// cap) nor below 5 dB above the curve floor; under 8 dB of usable range it
/// is an error.
pub fn schroeder_t60(
    ir: &[f32],
    sample_rate: u32,
    hi_db: f64,
    lo_db: f64,
    t_limit_s: Option<f64>,
) -> Result<f64, AcousticsError> {
    let curve = schroeder_curve_db(ir);
    let i_limit = t_limit_s
        .map(|t| ((t * sample_rate as f64) as usize).min(curve.len()))
        .unwrap_or(curve.len());
    let floor = curve[..i_limit.max(1)].iter().cloned().fold(0.0, f64::min);
    let lo_eff = lo_db.max(floor + 5.0);
    if lo_eff > hi_db - 8.0 {
        return Err(AcousticsError::DecayRange(hi_db - floor));
    }
    let pts: Vec<(f64, f64)> = curve[..i_limit]
        .iter()
        .enumerate()
        .filter(|(_, &l)| l <= hi_db && l >= lo_eff)
        .map(|(i, &l)| (i as f64 / sample_rate as f64, l))
        .collect();
    if pts.len() < 6 {
        return Err(AcousticsError::DecayRange(hi_db - floor));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-18 {
        return Err(AcousticsError::DecayRange(hi_db - floor));
    }
    let slope = (n * sxy - sx * sy) / denom; // dB per second, negative
    if slope >= -1e-9 {
        return Err(AcousticsError::DecayRange(hi_db - floor));
    }
    Ok(-60.0 / slope)
}

/// Estimates the reverberation time of a simulated RIR for comparison with
/// [`sabine_rt60`]. The direct pulse is stripped (its level step would skew
/// shallow fits), the fit starts at -10 dB and spans 8 reflections' worth
/// of level (at least 8 dB), and never reads past the complete-image
/// window. The comparison is only meaningful for rooms close to the
/// diffuse-field assumption; strongly flattened rooms genuinely decay
/// slower than Sabine predicts.
pub fn estimate_rir_t60(
    rir: &FoaRir,
    room: &RoomSpec,
    source_distance_m: f64,
) -> Result<f64, AcousticsError> {
    let fs = rir.sample_rate as f64;
    let direct_end =
        ((source_distance_m / SPEED_OF_SOUND * fs) as usize + 2 * SINC_HALF_WIDTH as usize).min(rir.len());
    let mut w = rir.w().to_vec();
    for s in w.iter_mut().take(direct_end) {
        *s = 0.0;
    }
    let per_bounce = -10.0 * (1.0 - room.absorption.clamp(0.05, 0.98)).log10();
    let hi = -10.0;
    let lo = hi - (8.0 * per_bounce).max(8.0);
    let cap = ism_valid_time(room, rir.max_order);
    schroeder_t60(&w, rir.sample_rate, hi, lo, Some(cap))
}

/// Index of the absolute peak of one channel.
pub fn peak_index(ch: &[f32]) -> usize {
    ch.iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
        .map(|(i, _)| i)
        .unwrap_or(0)
}
