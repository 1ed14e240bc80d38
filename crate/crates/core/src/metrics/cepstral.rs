use realfft::RealFftPlanner;

use super::to_f64;
use crate::dsp::{hamming, Waveform, DEFAULT_FRAME_LEN, DEFAULT_HOP};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Cepstral coefficients compared, excluding c0.
pub const CEPSTRAL_ORDER: usize = 24;
/// Frames more than this far below a signal's loudest frame are ignored.
const GATE_DB: f64 = 40.0;
/// Log-magnitude floor relative to each frame's peak magnitude.
const LOG_FLOOR: f64 = 1e-10;

struct Frames {
    cepstra: Vec<[f64; CEPSTRAL_ORDER]>,
    energy_db: Vec<f64>,
}

fn analyse(x: &[f64]) -> Frames {
    let n = DEFAULT_FRAME_LEN;
    let window: Vec<f64> = hamming(n);
    let mut planner = RealFftPlanner::<f64>::new();
    let (fwd, inv) = (planner.plan_fft_forward(n), planner.plan_fft_inverse(n));
    let mut buf = vec![0.0; n];
    let mut spec = fwd.make_output_vec();
    let mut cep = vec![0.0; n];
    let mut out = Frames { cepstra: Vec::new(), energy_db: Vec::new() };
    let mut start = 0;
    while start + n <= x.len() {
        for (i, b) in buf.iter_mut().enumerate() {
            *b = window[i] * x[start + i];
        }
        let e: f64 = buf.iter().map(|v| v * v).sum();
        out.energy_db.push(10.0 * e.max(f64::MIN_POSITIVE).log10());
        fwd.process(&mut buf, &mut spec).expect("fft length");
        let peak = spec.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let floor = (peak * LOG_FLOOR).max(f64::MIN_POSITIVE);
        let mut logmag: Vec<_> = spec.iter().map(|c| realfft::num_complex::Complex::new(c.norm().max(floor).ln(), 0.0)).collect();
        inv.process(&mut logmag, &mut cep).expect("fft length");
        let mut c = [0.0; CEPSTRAL_ORDER];
        for (k, v) in c.iter_mut().enumerate() {
            *v = cep[k + 1] / n as f64;
        }
        out.cepstra.push(c);
        start += DEFAULT_HOP;
    }
    out
}

/// Mean cepstral distance in dB over frames where both signals are within 40 dB of their own peak frame.
pub fn cepstral_distance<T: Real>(reference: &Waveform<T>, estimate: &Waveform<T>) -> Result<f64> {
    if reference.len() != estimate.len() {
        return Err(Error::ShapeMismatch(format!("reference {} vs estimate {} samples", reference.len(), estimate.len())));
    }
    let (r, e) = (analyse(&to_f64(reference)), analyse(&to_f64(estimate)));
    let peak = |f: &Frames| f.energy_db.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (pr, pe) = (peak(&r), peak(&e));
    if r.energy_db.is_empty() || pr <= f64::MIN_POSITIVE.log10() * 10.0 || pe <= f64::MIN_POSITIVE.log10() * 10.0 {
        return Err(Error::Degenerate("cepstral distance needs a non-silent frame in both signals".into()));
    }
    let scale = 10.0 / std::f64::consts::LN_10;
    let mut total = 0.0;
    let mut count = 0usize;
    for m in 0..r.cepstra.len() {
        if r.energy_db[m] < pr - GATE_DB || e.energy_db[m] < pe - GATE_DB {
            continue;
        }
        let sq: f64 = r.cepstra[m].iter().zip(&e.cepstra[m]).map(|(a, b)| (a - b).powi(2)).sum();
        total += scale * (2.0 * sq).sqrt();
        count += 1;
    }
    if count == 0 {
        return Err(Error::Degenerate("no frames pass the cepstral-distance energy gate".into()));
    }
    Ok(total / count as f64)
}
