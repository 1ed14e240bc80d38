use super::to_f64;
use crate::dsp::Waveform;
use crate::error::{Error, Result};
use crate::scalar::{Complex, Real};

const CHANNELS: usize = 23;
const LOWEST_CENTER_HZ: f64 = 125.0;
const MOD_BANDS: usize = 8;
const MOD_LOW_HZ: f64 = 4.0;
const MOD_HIGH_HZ: f64 = 128.0;
const MOD_Q: f64 = 2.0;

fn erb_number(f: f64) -> f64 {
    21.4 * (4.37 * f / 1000.0 + 1.0).log10()
}

fn erb_number_inverse(e: f64) -> f64 {
    (10f64.powf(e / 21.4) - 1.0) * 1000.0 / 4.37
}

fn erb_bandwidth(f: f64) -> f64 {
    24.7 * (4.37 * f / 1000.0 + 1.0)
}

/// Gammatone centre frequencies, equally spaced on the ERB-number scale.
fn center_frequencies(highest: f64) -> Vec<f64> {
    let (lo, hi) = (erb_number(LOWEST_CENTER_HZ), erb_number(highest));
    (0..CHANNELS).map(|i| erb_number_inverse(lo + (hi - lo) * i as f64 / (CHANNELS - 1) as f64)).collect()
}

/// Envelope of a fourth-order gammatone channel: four complex one-pole sections on the
/// signal shifted to baseband, magnitude taken at the output.
fn gammatone_envelope(x: &[f64], fc: f64, fs: f64) -> Vec<f64> {
    let a = (-2.0 * std::f64::consts::PI * 1.019 * erb_bandwidth(fc) / fs).exp();
    let mut state = [Complex::new(0.0, 0.0); 4];
    let step = Complex::from_polar(1.0, -2.0 * std::f64::consts::PI * fc / fs);
    let mut rot = Complex::new(1.0, 0.0);
    x.iter()
        .enumerate()
        .map(|(n, &v)| {
            let mut u = rot * v;
            for s in state.iter_mut() {
                *s = *s * a + u * (1.0 - a);
                u = *s;
            }
            rot *= step;
            if n % 1024 == 1023 {
                rot /= rot.norm();
            }
            u.norm()
        })
        .collect()
}

/// Energy at the output of a constant-peak-gain biquad band-pass.
fn bandpass_energy(x: &[f64], fc: f64, fs: f64) -> f64 {
    let w0 = 2.0 * std::f64::consts::PI * fc / fs;
    let alpha = w0.sin() / (2.0 * MOD_Q);
    let a0 = 1.0 + alpha;
    let (b0, b2) = (alpha / a0, -alpha / a0);
    let (a1, a2) = (-2.0 * w0.cos() / a0, (1.0 - alpha) / a0);
    let (mut x1, mut x2, mut y1, mut y2) = (0.0, 0.0, 0.0, 0.0);
    let mut energy = 0.0;
    for &v in x {
        let y = b0 * v + b2 * x2 - a1 * y1 - a2 * y2;
        (x2, x1, y2, y1) = (x1, v, y1, y);
        energy += y * y;
    }
    energy
}

/// Reference-free speech-to-reverberation modulation energy ratio in dB.
///
/// Signal is split by 23 gammatone channels (125 Hz up to a quarter of the sample
/// rate); each full-rate envelope feeds 8 modulation band-passes log-spaced 4-128 Hz. Result is the energy of the four lowest modulation bands over
/// the four highest, summed across channels.
pub fn srmr<T: Real>(estimate: &Waveform<T>) -> Result<f64> {
    let fs = f64::from(estimate.sample_rate_hz());
    let x = to_f64(estimate);
    let energy: f64 = x.iter().map(|v| v * v).sum();
    if energy == 0.0 {
        return Err(Error::SilentSignal);
    }
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let ac: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    if ac <= 1e-12 * energy {
        return Err(Error::Degenerate("constant signal has no modulation energy".into()));
    }
    if fs / 4.0 <= LOWEST_CENTER_HZ * 2.0 {
        return Err(Error::InvalidConfig(format!("sample rate {fs} Hz too low for modulation analysis")));
    }
    if x.len() < (fs / MOD_LOW_HZ) as usize {
        return Err(Error::TooShort(format!("{} samples; modulation analysis needs at least 250 ms", x.len())));
    }
    let mod_centers: Vec<f64> = (0..MOD_BANDS)
        .map(|i| MOD_LOW_HZ * (MOD_HIGH_HZ / MOD_LOW_HZ).powf(i as f64 / (MOD_BANDS - 1) as f64))
        .collect();

    let mut band_energy = [0.0; MOD_BANDS];
    for fc in center_frequencies(fs / 4.0) {
        let env = gammatone_envelope(&x, fc, fs);
        for (e, &mc) in band_energy.iter_mut().zip(&mod_centers) {
            *e += bandpass_energy(&env, mc, fs);
        }
    }
    let low: f64 = band_energy[..MOD_BANDS / 2].iter().sum();
    let high: f64 = band_energy[MOD_BANDS / 2..].iter().sum();
    if !(high > 0.0 && low > 0.0) {
        return Err(Error::Degenerate("no modulation energy".into()));
    }
    Ok(10.0 * (low / high).log10())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::linear_convolve;
    use rand::{Rng, SeedableRng};

    const FS: u32 = 16000;

    fn am_tone(n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| {
                let t = i as f64 / f64::from(FS);
                (0.5 + 0.5 * (2.0 * std::f64::consts::PI * 4.0 * t).cos()) * (2.0 * std::f64::consts::PI * 1000.0 * t).sin() * 0.5
            })
            .collect()
    }

    /// Same noise sequence for every decay time, so only the decay differs.
    fn exponential_tail(rt60: f64, seed: u64) -> Vec<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = (rt60 * f64::from(FS)) as usize;
        let mut h: Vec<f64> =
            (0..n).map(|i| rng.gen_range(-1.0..1.0) * (-6.91 * i as f64 / (rt60 * f64::from(FS))).exp()).collect();
        h[0] = 1.0;
        h
    }

    fn score(x: &[f64]) -> f64 {
        srmr(&Waveform::new(x.to_vec(), FS).unwrap()).unwrap()
    }

    #[test]
    fn centre_frequencies_span_range() {
        let cf = center_frequencies(4000.0);
        assert_eq!(cf.len(), 23);
        assert!((cf[0] - 125.0).abs() < 1e-9 && (cf[22] - 4000.0).abs() < 1e-6);
        assert!(cf.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn reverberant_tail_lowers_ratio() {
        let x = am_tone(32000);
        let clean = score(&x);
        let wet = score(&linear_convolve(&x, &exponential_tail(0.9, 1))[..x.len()]);
        assert!(clean > wet, "clean {clean} wet {wet}");
    }

    #[test]
    fn longer_tails_lower_ratio_on_pseudo_speech() {
        for seed in 0..6 {
            let x = crate::harness::synth_utterance(seed, 16800, FS).unwrap();
            let scores: Vec<f64> = [0.2, 0.5, 0.9]
                .iter()
                .map(|&t| score(&linear_convolve(x.samples(), &exponential_tail(t, seed + 100))[..x.len()]))
                .collect();
            assert!(scores.windows(2).all(|w| w[0] > w[1]), "utterance {seed}: {scores:?}");
        }
    }

    #[test]
    fn degenerate_inputs() {
        let dc = Waveform::new(vec![0.3; 16000], FS).unwrap();
        assert!(matches!(srmr(&dc), Err(Error::Degenerate(_))));
        let silent = Waveform::<f64>::zeros(16000, FS).unwrap();
        assert!(matches!(srmr(&silent), Err(Error::SilentSignal)));
        let short = Waveform::new(am_tone(1000), FS).unwrap();
        assert!(matches!(srmr(&short), Err(Error::TooShort(_))));
    }
}
