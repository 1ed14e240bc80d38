//! Deterministic pseudo-speech for self-contained experiments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dsp::Waveform;
use crate::error::{Error, Result};

/// 1.05 s at 16 kHz.
pub const DEFAULT_SYNTH_LEN: usize = 16_800;

/// Two-pole resonator with unit gain at its centre frequency.
struct Resonator {
    y1: f64,
    y2: f64,
}

impl Resonator {
    fn new() -> Self {
        Self { y1: 0.0, y2: 0.0 }
    }

    fn step(&mut self, x: f64, freq: f64, bandwidth: f64, fs: f64) -> f64 {
        let r = (-std::f64::consts::PI * bandwidth / fs).exp();
        let theta = 2.0 * std::f64::consts::PI * freq / fs;
        let gain = (1.0 - r) * (1.0 - 2.0 * r * (2.0 * theta).cos() + r * r).sqrt();
        let y = gain * x + 2.0 * r * theta.cos() * self.y1 - r * r * self.y2;
        self.y2 = self.y1;
        self.y1 = y;
        y
    }
}

struct Syllable {
    start: usize,
    len: usize,
    voiced: bool,
    amplitude: f64,
    f0: (f64, f64),
    formants: [(f64, f64); 3],
    fricative_hz: f64,
}

fn plan_syllables(rng: &mut ChaCha8Rng, len: usize, fs: f64) -> Vec<Syllable> {
    let ms = |v: f64| (v * fs / 1000.0) as usize;
    let mut out = Vec::new();
    let mut t = ms(rng.gen_range(10.0..60.0));
    while t < len {
        let dur = ms(rng.gen_range(110.0..280.0)).min(len - t);
        let base_f0 = rng.gen_range(100.0..220.0);
        out.push(Syllable {
            start: t,
            len: dur,
            voiced: rng.gen_bool(0.8),
            amplitude: rng.gen_range(0.5..1.0),
            f0: (base_f0, base_f0 * rng.gen_range(0.8..1.2)),
            formants: [
                (rng.gen_range(300.0..850.0), rng.gen_range(300.0..850.0)),
                (rng.gen_range(900.0..2300.0), rng.gen_range(900.0..2300.0)),
                (rng.gen_range(2300.0..3300.0), rng.gen_range(2300.0..3300.0)),
            ],
            fricative_hz: rng.gen_range(3000.0..6000.0),
        });
        let gap = if rng.gen_bool(0.3) { rng.gen_range(40.0..140.0) } else { rng.gen_range(0.0..25.0) };
        t += dur + ms(gap);
    }
    out
}

/// Syllabic pseudo-speech: harmonic glottal source with drifting pitch shaped by moving
/// formants, interleaved with fricative noise bursts and pauses. Peak normalized to 0.5.
pub fn synth_utterance(seed: u64, len: usize, sample_rate_hz: u32) -> Result<Waveform<f64>> {
    if len == 0 || sample_rate_hz < 8000 {
        return Err(Error::InvalidConfig(format!("synthetic utterance of {len} samples at {sample_rate_hz} Hz")));
    }
    let fs = f64::from(sample_rate_hz);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let syllables = plan_syllables(&mut rng, len, fs);
    let mut out = vec![0.0; len];
    let bandwidths = [90.0, 110.0, 170.0];
    for syl in &syllables {
        let mut phase = 0.0;
        let mut res = [Resonator::new(), Resonator::new(), Resonator::new()];
        let mut fric = Resonator::new();
        let attack = (0.02 * fs) as usize;
        let release = (0.04 * fs) as usize;
        for i in 0..syl.len {
            let u = i as f64 / syl.len as f64;
            let env = {
                let a = if i < attack { (std::f64::consts::FRAC_PI_2 * i as f64 / attack as f64).sin().powi(2) } else { 1.0 };
                let left = syl.len - i;
                let r = if left < release { (std::f64::consts::FRAC_PI_2 * left as f64 / release as f64).sin().powi(2) } else { 1.0 };
                a * r * syl.amplitude
            };
            let sample = if syl.voiced {
                let f0 = syl.f0.0 + (syl.f0.1 - syl.f0.0) * u + 3.0 * (2.0 * std::f64::consts::PI * 5.0 * i as f64 / fs).sin();
                phase += 2.0 * std::f64::consts::PI * f0 / fs;
                let harmonics = ((0.45 * fs) / f0) as usize;
                let mut src: f64 = (1..=harmonics).map(|h| (h as f64 * phase).sin() / h as f64).sum();
                src += 0.02 * rng.gen_range(-1.0..1.0);
                // Parallel formant branches, higher formants weaker.
                let mut acc = 0.0;
                for (k, r) in res.iter_mut().enumerate() {
                    let (a, b) = syl.formants[k];
                    acc += r.step(src, a + (b - a) * u, bandwidths[k], fs) / (k + 1) as f64;
                }
                acc
            } else {
                let noise = rng.gen_range(-1.0..1.0);
                0.6 * fric.step(noise, syl.fricative_hz, 1800.0, fs)
            };
            out[syl.start + i] += env * sample;
        }
    }
    let peak = out.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak > 0.0 {
        out.iter_mut().for_each(|v| *v *= 0.5 / peak);
    }
    Waveform::new(out, sample_rate_hz)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_seed_dependent() {
        let a = synth_utterance(1, DEFAULT_SYNTH_LEN, 16000).unwrap();
        let b = synth_utterance(1, DEFAULT_SYNTH_LEN, 16000).unwrap();
        let c = synth_utterance(2, DEFAULT_SYNTH_LEN, 16000).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 16800);
        assert!((a.peak() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn has_pauses_and_activity() {
        let a = synth_utterance(3, DEFAULT_SYNTH_LEN, 16000).unwrap();
        let frames: Vec<f64> = a.samples().chunks(320).map(|c| c.iter().map(|v| v * v).sum::<f64>()).collect();
        let peak = frames.iter().cloned().fold(0.0, f64::max);
        assert!(frames.iter().any(|&e| e < peak * 1e-3));
        assert!(frames.iter().filter(|&&e| e > peak * 0.1).count() > 10);
    }
}
