use super::Rir;
use crate::error::{Error, Result};
use crate::scalar::Real;

const FIT_START_DB: f64 = -5.0;
const FIT_END_DB: f64 = -25.0;
const REQUIRED_RANGE_DB: f64 = 35.0;
const MIN_FIT_POINTS: usize = 8;

/// Backward-integrated energy decay curve in dB relative to the total energy.
pub fn energy_decay_curve_db<T: Real>(rir: &Rir<T>) -> Vec<f64> {
    let mut edc = vec![0.0; rir.len()];
    let mut acc = 0.0;
    for (i, t) in rir.taps().iter().enumerate().rev() {
        let v = t.to_f64_lossy();
        acc += v * v;
        edc[i] = acc;
    }
    let total = edc.first().copied().unwrap_or(0.0);
    edc.iter()
        .map(|&e| if total > 0.0 && e > 0.0 { 10.0 * (e / total).log10() } else { f64::NEG_INFINITY })
        .collect()
}

/// RT60 from the Schroeder curve: least-squares line over the -5..-25 dB span, times three.
pub fn schroeder_rt60<T: Real>(rir: &Rir<T>) -> Result<f64> {
    let edc = energy_decay_curve_db(rir);
    let range = edc.iter().rev().find(|v| v.is_finite()).map_or(0.0, |v| -v);
    let fit: Vec<(f64, f64)> = edc
        .iter()
        .enumerate()
        .filter(|(_, &db)| db <= FIT_START_DB && db >= FIT_END_DB)
        .map(|(n, &db)| (n as f64 / f64::from(rir.sample_rate_hz()), db))
        .collect();
    if range < REQUIRED_RANGE_DB || fit.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientDecay(range));
    }
    let n = fit.len() as f64;
    let mean_t = fit.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_d = fit.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = fit.iter().map(|(t, d)| (t - mean_t) * (d - mean_d)).sum();
    let sxx: f64 = fit.iter().map(|(t, _)| (t - mean_t).powi(2)).sum();
    let slope = sxy / sxx;
    if !(slope < 0.0) {
        return Err(Error::InsufficientDecay(range));
    }
    // 20 dB of decay over T20, extrapolated to 60 dB
    Ok(3.0 * (-20.0 / slope))
}
