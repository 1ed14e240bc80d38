use realfft::RealFftPlanner;

use super::to_f64;
use crate::dsp::Waveform;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest lag, in samples, searched in either direction.
pub const MAX_LAG: usize = 4096;

/// Lag `L` maximizing `|sum_n reference[n] * estimate[n + L]|` over `|L| <= MAX_LAG`.
/// Positive means the estimate arrives later.
pub fn estimate_lag(reference: &[f64], estimate: &[f64]) -> Result<i64> {
    if reference.iter().all(|&v| v == 0.0) || estimate.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroEnergy);
    }
    let n = (reference.len() + estimate.len()).next_power_of_two();
    let mut planner = RealFftPlanner::<f64>::new();
    let (fwd, inv) = (planner.plan_fft_forward(n), planner.plan_fft_inverse(n));
    let spectrum = |x: &[f64]| {
        let mut buf = vec![0.0; n];
        buf[..x.len()].copy_from_slice(x);
        let mut out = fwd.make_output_vec();
        fwd.process(&mut buf, &mut out).expect("fft length");
        out
    };
    let (r, e) = (spectrum(reference), spectrum(estimate));
    let mut cross: Vec<_> = r.iter().zip(&e).map(|(a, b)| a.conj() * b).collect();
    let mut corr = inv.make_output_vec();
    inv.process(&mut cross, &mut corr).expect("fft length");
    // corr[L mod n] = sum_n r[n] e[n + L]
    let max_pos = MAX_LAG.min(estimate.len() - 1) as i64;
    let max_neg = MAX_LAG.min(reference.len() - 1) as i64;
    let mut best = (0i64, f64::NEG_INFINITY);
    for lag in -max_neg..=max_pos {
        let idx = lag.rem_euclid(n as i64) as usize;
        let v = corr[idx].abs();
        if v > best.1 || (v == best.1 && lag.abs() < best.0.abs()) {
            best = (lag, v);
        }
    }
    Ok(best.0)
}

/// Shifts the estimate by the correlation-peak lag and trims both to their overlap.
pub fn align_and_trim<T: Real>(reference: &Waveform<T>, estimate: &Waveform<T>) -> Result<(Waveform<T>, Waveform<T>)> {
    reference.ensure_same_rate(estimate)?;
    let lag = estimate_lag(&to_f64(reference), &to_f64(estimate))?;
    let (r, e) = (reference.samples(), estimate.samples());
    let (r, e) = if lag >= 0 { (r, &e[lag as usize..]) } else { (&r[(-lag) as usize..], e) };
    let len = r.len().min(e.len());
    Ok((reference.with_samples(r[..len].to_vec())?, estimate.with_samples(e[..len].to_vec())?))
}
