//! 4-channel 32-bit-float WAV, ACN channel order `[W, Y, Z, X]`.
//!
//! The default normalization on disk is SN3D (AmbiX-style); an optional
//! FuMa export scales W by 1/sqrt(2) at write time for interoperability
//! and is not meant to round-trip.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::render::FoaClip;

#[derive(Debug, Error)]
pub enum WavError {
    #[error("wav i/o failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("unsupported wav layout: {0}")]
    Format(String),
}

/// On-disk channel normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WavConvention {
    /// SN3D gains as produced by the encoder; W unscaled.
    #[default]
    AmbixSn3d,
    /// W scaled by 1/sqrt(2) on export.
    FuMa,
}

const FLOAT_FORMAT: u16 = 3;
const PCM_FORMAT: u16 = 1;

fn wav_header(num_channels: u16, sample_rate: u32, num_frames: u32) -> [u8; 44] {
    let bits_per_sample = 32u16;
    let block_align = num_channels * (bits_per_sample / 8);
    let byte_rate = sample_rate * block_align as u32;
    let data_size = num_frames * block_align as u32;
    let mut h = [0u8; 44];
    h[0..4].copy_from_slice(b"RIFF");
    h[4..8].copy_from_slice(&(36 + data_size).to_le_bytes());
    h[8..12].copy_from_slice(b"WAVE");
    h[12..16].copy_from_slice(b"fmt ");
    h[16..20].copy_from_slice(&16u32.to_le_bytes());
    h[20..22].copy_from_slice(&FLOAT_FORMAT.to_le_bytes());
    h[22..24].copy_from_slice(&num_channels.to_le_bytes());
    h[24..28].copy_from_slice(&sample_rate.to_le_bytes());
    h[28..32].copy_from_slice(&byte_rate.to_le_bytes());
    h[32..34].copy_from_slice(&block_align.to_le_bytes());
    h[34..36].copy_from_slice(&bits_per_sample.to_le_bytes());
    h[36..40].copy_from_slice(b"data");
    h[40..44].copy_from_slice(&data_size.to_le_bytes());
    h
}

/// Writes 4 equal-length channels as interleaved float32 WAV.
pub fn write_foa_channels(
    channels: &[Vec<f32>; 4],
    sample_rate: u32,
    path: &Path,
    convention: WavConvention,
) -> Result<(), WavError> {
    let frames = channels[0].len();
    for c in channels.iter() {
        if c.len() != frames {
            return Err(WavError::Format("channel lengths differ".into()));
        }
    }
    let w_scale = match convention {
        WavConvention::AmbixSn3d => 1.0f32,
        WavConvention::FuMa => std::f32::consts::FRAC_1_SQRT_2,
    };
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(&wav_header(4, sample_rate, frames as u32))?;
    let mut buf = Vec::with_capacity(frames * 16);
    let frames_iter = channels[0]
        .iter()
        .zip(&channels[1])
        .zip(&channels[2])
        .zip(&channels[3]);
    for (((w, y), z), x) in frames_iter {
        buf.extend_from_slice(&(w * w_scale).to_le_bytes());
        buf.extend_from_slice(&y.to_le_bytes());
        buf.extend_from_slice(&z.to_le_bytes());
        buf.extend_from_slice(&x.to_le_bytes());
    }
    out.write_all(&buf)?;
    out.flush()?;
    Ok(())
}

/// Writes a rendered clip; see [`write_foa_channels`].
pub fn write_foa_wav(clip: &FoaClip, path: &Path, convention: WavConvention) -> Result<(), WavError> {
    write_foa_channels(&clip.channels, clip.sample_rate, path, convention)
}

struct RawWav {
    format: u16,
    channels: u16,
    sample_rate: u32,
    bits: u16,
    data: Vec<u8>,
}

fn read_raw(path: &Path) -> Result<RawWav, WavError> {
    let mut rd = BufReader::new(File::open(path)?);
    let mut bytes = Vec::new();
    rd.read_to_end(&mut bytes)?;
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(WavError::Format("not a RIFF/WAVE file".into()));
    }
    let mut fmt: Option<(u16, u16, u32, u16)> = None;
    let mut data: Option<Vec<u8>> = None;
    let mut pos = 12usize;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32::from_le_bytes(bytes[pos + 4..pos + 8].try_into().unwrap()) as usize;
        let body = pos + 8;
        if body + size > bytes.len() {
            return Err(WavError::Format("truncated chunk".into()));
        }
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(WavError::Format("fmt chunk too short".into()));
                }
                let f = &bytes[body..body + 16];
                fmt = Some((
                    u16::from_le_bytes([f[0], f[1]]),
                    u16::from_le_bytes([f[2], f[3]]),
                    u32::from_le_bytes([f[4], f[5], f[6], f[7]]),
                    u16::from_le_bytes([f[14], f[15]]),
                ));
            }
            b"data" => data = Some(bytes[body..body + size].to_vec()),
            _ => {}
        }
        pos = body + size + (size & 1);
    }
    let (format, channels, sample_rate, bits) =
        fmt.ok_or_else(|| WavError::Format("missing fmt chunk".into()))?;
    let data = data.ok_or_else(|| WavError::Format("missing data chunk".into()))?;
    Ok(RawWav { format, channels, sample_rate, bits, data })
}

/// Reads a 4-channel float32 WAV into a clip. Any other channel count or
/// encoding is a `Format` error.
pub fn read_foa_wav(path: &Path) -> Result<FoaClip, WavError> {
    let raw = read_raw(path)?;
    if raw.channels != 4 {
        return Err(WavError::Format(format!("expected 4 channels, got {}", raw.channels)));
    }
    if raw.format != FLOAT_FORMAT || raw.bits != 32 {
        return Err(WavError::Format(format!(
            "expected 32-bit float samples, got format {} / {} bits",
            raw.format, raw.bits
        )));
    }
    let frame_bytes = 16;
    let frames = raw.data.len() / frame_bytes;
    let mut channels = [
        Vec::with_capacity(frames),
        Vec::with_capacity(frames),
        Vec::with_capacity(frames),
        Vec::with_capacity(frames),
    ];
    for frame in raw.data.chunks_exact(frame_bytes) {
        for (ch, c) in channels.iter_mut().enumerate() {
            let o = ch * 4;
            c.push(f32::from_le_bytes(frame[o..o + 4].try_into().unwrap()));
        }
    }
    Ok(FoaClip::from_channels(channels, raw.sample_rate))
}

/// Reads a mono WAV (float32 or 16-bit PCM) for dry source material.
pub fn read_mono_wav(path: &Path) -> Result<(Vec<f32>, u32), WavError> {
    let raw = read_raw(path)?;
    if raw.channels != 1 {
        return Err(WavError::Format(format!("expected mono, got {} channels", raw.channels)));
    }
    let samples = match (raw.format, raw.bits) {
        (FLOAT_FORMAT, 32) => raw
            .data
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
            .collect(),
        (PCM_FORMAT, 16) => raw
            .data
            .chunks_exact(2)
            .map(|b| i16::from_le_bytes(b.try_into().unwrap()) as f32 / 32768.0)
            .collect(),
        (f, b) => return Err(WavError::Format(format!("unsupported mono encoding {f}/{b}-bit"))),
    };
    Ok((samples, raw.sample_rate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;
    use rand::Rng;

    fn temp_path(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("foa_scene_wav_tests");
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let mut rng = seeded_rng(1);
        let channels: [Vec<f32>; 4] = std::array::from_fn(|_| {
            (0..5000).map(|_| rng.random_range(-1.0f64..1.0) as f32).collect()
        });
        let clip = FoaClip::from_channels(channels, 16_000);
        let path = temp_path("roundtrip.wav");
        write_foa_wav(&clip, &path, WavConvention::AmbixSn3d).unwrap();
        let back = read_foa_wav(&path).unwrap();
        assert_eq!(back.sample_rate, 16_000);
        for ch in 0..4 {
            assert_eq!(back.channels[ch], clip.channels[ch]);
        }
    }

    #[test]
    fn data_chunk_size_matches_duration() {
        let channels: [Vec<f32>; 4] = std::array::from_fn(|_| vec![0.0f32; 160_000]);
        let clip = FoaClip::from_channels(channels, 16_000);
        let path = temp_path("tensec.wav");
        write_foa_wav(&clip, &path, WavConvention::AmbixSn3d).unwrap();
        // 10 s * 16000 frames * 4 channels * 4 bytes, plus the 44-byte header.
        let expect = 10 * 16_000 * 4 * 4;
        assert_eq!(std::fs::metadata(&path).unwrap().len(), 44 + expect);
    }

    #[test]
    fn wrong_channel_count_is_a_format_error() {
        // Hand-roll a 2-channel float wav.
        let path = temp_path("stereo.wav");
        let mut bytes = super::wav_header(2, 16_000, 4).to_vec();
        bytes.extend(std::iter::repeat_n(0u8, 4 * 2 * 4));
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(read_foa_wav(&path), Err(WavError::Format(_))));
    }

    #[test]
    fn fuma_export_scales_w_only() {
        let channels: [Vec<f32>; 4] =
            [vec![1.0f32; 8], vec![0.25; 8], vec![0.5; 8], vec![0.75; 8]];
        let clip = FoaClip::from_channels(channels, 16_000);
        let path = temp_path("fuma.wav");
        write_foa_wav(&clip, &path, WavConvention::FuMa).unwrap();
        let back = read_foa_wav(&path).unwrap();
        assert!((back.channels[0][0] - std::f32::consts::FRAC_1_SQRT_2).abs() < 1e-7);
        assert_eq!(back.channels[1][0], 0.25);
        assert_eq!(back.channels[3][0], 0.75);
    }

    #[test]
    fn mono_pcm16_reads_and_rescales() {
        let path = temp_path("mono16.wav");
        let mut bytes = Vec::new();
        bytes.extend_from_slice(b"RIFF");
        bytes.extend_from_slice(&(36u32 + 4).to_le_bytes());
        bytes.extend_from_slice(b"WAVE");
        bytes.extend_from_slice(b"fmt ");
        bytes.extend_from_slice(&16u32.to_le_bytes());
        bytes.extend_from_slice(&1u16.to_le_bytes()); // pcm
        bytes.extend_from_slice(&1u16.to_le_bytes()); // mono
        bytes.extend_from_slice(&16000u32.to_le_bytes());
        bytes.extend_from_slice(&32000u32.to_le_bytes());
        bytes.extend_from_slice(&2u16.to_le_bytes());
        bytes.extend_from_slice(&16u16.to_le_bytes());
        bytes.extend_from_slice(b"data");
        bytes.extend_from_slice(&4u32.to_le_bytes());
        bytes.extend_from_slice(&16384i16.to_le_bytes());
        bytes.extend_from_slice(&(-16384i16).to_le_bytes());
        std::fs::write(&path, &bytes).unwrap();
        let (samples, fs) = read_mono_wav(&path).unwrap();
        assert_eq!(fs, 16_000);
        assert_eq!(samples, vec![0.5, -0.5]);
    }
}
