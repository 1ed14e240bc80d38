use realfft::RealFftPlanner;

use super::to_f64;
use crate::dsp::{resample, Waveform};
use crate::error::{Error, Result};
use crate::scalar::Real;

const FS: u32 = 10_000;
const FRAME: usize = 256;
const HOP: usize = FRAME / 2;
const NFFT: usize = 512;
const BANDS: usize = 15;
const MIN_FREQ: f64 = 150.0;
/// Frames per intermediate-intelligibility segment (384 ms).
const SEGMENT: usize = 30;
/// Lower signal-to-distortion bound of the clipping step, in dB.
const BETA_DB: f64 = -15.0;
/// Frames more than this far below the loudest reference frame are dropped.
const DYN_RANGE_DB: f64 = 40.0;
const EPS: f64 = f64::EPSILON;

/// Hann window without its zero end points.
fn window() -> Vec<f64> {
    (1..=FRAME).map(|n| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * n as f64 / (FRAME + 1) as f64).cos()).collect()
}

/// Drops frames of both signals where the reference is more than 40 dB below its peak
/// frame, then overlap-adds the kept windowed frames.
fn remove_silent_frames(x: &[f64], y: &[f64], w: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let starts: Vec<usize> = if x.len() >= FRAME { (0..=x.len() - FRAME).step_by(HOP).collect() } else { Vec::new() };
    let energy: Vec<f64> = starts
        .iter()
        .map(|&s| 20.0 * ((0..FRAME).map(|n| (w[n] * x[s + n]).powi(2)).sum::<f64>().sqrt() + EPS).log10())
        .collect();
    let peak = energy.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let kept: Vec<usize> = starts.iter().zip(&energy).filter(|(_, &e)| e > peak - DYN_RANGE_DB).map(|(&s, _)| s).collect();
    let len = if kept.is_empty() { 0 } else { (kept.len() - 1) * HOP + FRAME };
    let (mut xs, mut ys) = (vec![0.0; len], vec![0.0; len]);
    for (i, &s) in kept.iter().enumerate() {
        for n in 0..FRAME {
            xs[i * HOP + n] += w[n] * x[s + n];
            ys[i * HOP + n] += w[n] * y[s + n];
        }
    }
    (xs, ys)
}

/// One-third octave band magnitudes, `BANDS` rows by frames.
fn third_octave_envelopes(x: &[f64], w: &[f64], bands: &[(usize, usize)]) -> Vec<Vec<f64>> {
    let mut planner = RealFftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(NFFT);
    let mut buf = vec![0.0; NFFT];
    let mut spec = fft.make_output_vec();
    let mut out = vec![Vec::new(); BANDS];
    let mut start = 0;
    while start + FRAME < x.len() {
        buf.iter_mut().for_each(|v| *v = 0.0);
        for n in 0..FRAME {
            buf[n] = w[n] * x[start + n];
        }
        fft.process(&mut buf, &mut spec).expect("fft length");
        for (b, &(lo, hi)) in bands.iter().enumerate() {
            out[b].push(spec[lo..hi].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt());
        }
        start += HOP;
    }
    out
}

/// FFT bin ranges `[lo, hi)` of the one-third octave bands.
fn band_bins() -> Vec<(usize, usize)> {
    let nearest = |f: f64| {
        (0..=NFFT / 2)
            .min_by(|&a, &b| {
                let fa = a as f64 * f64::from(FS) / NFFT as f64;
                let fb = b as f64 * f64::from(FS) / NFFT as f64;
                (fa - f).abs().total_cmp(&(fb - f).abs())
            })
            .expect("non-empty")
    };
    (0..BANDS)
        .map(|k| {
            let k = k as f64;
            (nearest(MIN_FREQ * 2f64.powf((2.0 * k - 1.0) / 6.0)), nearest(MIN_FREQ * 2f64.powf((2.0 * k + 1.0) / 6.0)))
        })
        .collect()
}

/// Short-time objective intelligibility of `estimate` given the clean `reference`; raw score in [-1, 1].
pub fn stoi<T: Real>(reference: &Waveform<T>, estimate: &Waveform<T>) -> Result<f64> {
    reference.ensure_same_rate(estimate)?;
    if reference.len() != estimate.len() {
        return Err(Error::ShapeMismatch(format!("reference {} vs estimate {} samples", reference.len(), estimate.len())));
    }
    let (x, y) = if reference.sample_rate_hz() == FS {
        (to_f64(reference), to_f64(estimate))
    } else {
        (to_f64(&resample(reference, FS)?), to_f64(&resample(estimate, FS)?))
    };
    let w = window();
    let (x, y) = remove_silent_frames(&x, &y, &w);
    let bands = band_bins();
    let (xb, yb) = (third_octave_envelopes(&x, &w, &bands), third_octave_envelopes(&y, &w, &bands));
    let frames = xb[0].len();
    if frames < SEGMENT {
        return Err(Error::TooShort(format!(
            "{frames} active frames after silence removal; intelligibility needs {SEGMENT} (384 ms)"
        )));
    }

    let clip = 1.0 + 10f64.powf(-BETA_DB / 20.0);
    let mut total = 0.0;
    let mut count = 0usize;
    for end in SEGMENT..=frames {
        for b in 0..BANDS {
            let xs = &xb[b][end - SEGMENT..end];
            let ys = &yb[b][end - SEGMENT..end];
            let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
            let alpha = norm(xs) / (norm(ys) + EPS);
            let yc: Vec<f64> = ys.iter().zip(xs).map(|(&yv, &xv)| (alpha * yv).min(clip * xv)).collect();
            let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
            let (mx, my) = (mean(xs), mean(&yc));
            let xc: Vec<f64> = xs.iter().map(|v| v - mx).collect();
            let yc: Vec<f64> = yc.iter().map(|v| v - my).collect();
            let dot: f64 = xc.iter().zip(&yc).map(|(a, b)| a * b).sum();
            total += dot / (norm(&xc) * norm(&yc) + EPS);
            count += 1;
        }
    }
    Ok(total / count as f64)
}
