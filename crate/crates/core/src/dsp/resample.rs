use super::Waveform;
use crate::error::Result;
use crate::scalar::Real;

/// Zero crossings of the interpolation kernel on each side of the centre.
const HALF_ZEROS: f64 = 16.0;
/// Passband edge as a fraction of the lower Nyquist rate.
const CUTOFF: f64 = 0.9;

fn blackman(t: f64) -> f64 {
    // t in [-1, 1]
    let x = std::f64::consts::PI * (t + 1.0);
    0.42 - 0.5 * x.cos() + 0.08 * (2.0 * x).cos()
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

/// Band-limited sample-rate conversion by Blackman-windowed sinc interpolation.
///
/// Kernel weights are normalized per output sample so constant signals pass unchanged.
pub fn resample<T: Real>(wave: &Waveform<T>, target_rate_hz: u32) -> Result<Waveform<T>> {
    let source_rate = wave.sample_rate_hz();
    if target_rate_hz == 0 {
        return Err(crate::Error::InvalidConfig("target rate must be positive".into()));
    }
    if target_rate_hz == source_rate {
        return Ok(wave.clone());
    }
    let input: Vec<f64> = wave.samples().iter().map(|s| s.to_f64_lossy()).collect();
    let ratio = f64::from(target_rate_hz) / f64::from(source_rate);
    // cutoff in cycles per input sample
    let fc = 0.5 * CUTOFF * ratio.min(1.0);
    let half_width = HALF_ZEROS / (2.0 * fc);
    let out_len = (input.len() as u64 * u64::from(target_rate_hz)).div_ceil(u64::from(source_rate)) as usize;
    let mut out = Vec::with_capacity(out_len);
    for n in 0..out_len {
        let t = n as f64 / ratio;
        let lo = ((t - half_width).ceil().max(0.0)) as usize;
        let hi = ((t + half_width).floor() as usize).min(input.len().saturating_sub(1));
        let (mut acc, mut wsum) = (0.0, 0.0);
        for (i, &x) in input.iter().enumerate().take(hi + 1).skip(lo) {
            let d = i as f64 - t;
            let w = 2.0 * fc * sinc(2.0 * fc * d) * blackman(d / half_width);
            acc += w * x;
            wsum += w;
        }
        out.push(if wsum.abs() > 1e-12 { T::lit(acc / wsum) } else { T::zero() });
    }
    Waveform::new(out, target_rate_hz)
}
