use rayon::prelude::*;

use crate::dsp::{istft, stft, Spectrogram, StftConfig, TfGrid, Waveform};
use crate::error::{Error, Result};
use crate::scalar::{Complex, Real};

type C64 = Complex<f64>;

/// Weighted prediction error settings.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WpeConfig {
    pub prediction_delay_frames: usize,
    pub filter_order_taps: usize,
    pub iterations: usize,
    pub psd_floor: f64,
    /// PSD floor relative to the bin's mean input power; bounds the weight dynamic range.
    pub relative_psd_floor: f64,
}

impl Default for WpeConfig {
    fn default() -> Self {
        Self { prediction_delay_frames: 3, filter_order_taps: 10, iterations: 3, psd_floor: 1e-10, relative_psd_floor: 1e-4 }
    }
}

impl WpeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.prediction_delay_frames == 0 || self.filter_order_taps == 0 || self.iterations == 0 {
            return Err(Error::InvalidConfig(format!("WPE delay, order and iterations must be >= 1: {self:?}")));
        }
        if !(self.psd_floor > 0.0 && self.psd_floor.is_finite()) {
            return Err(Error::InvalidConfig("WPE psd_floor must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.relative_psd_floor) {
            return Err(Error::InvalidConfig("WPE relative_psd_floor must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

/// Dereverberated spectrograms, one per input channel.
pub fn wpe<T: Real>(channels: &[Spectrogram<T>], cfg: &WpeConfig) -> Result<Vec<Spectrogram<T>>> {
    wpe_with_cost(channels, cfg).map(|(out, _)| out)
}

/// As [`wpe`], also returning per bin the weighted cost
/// `sum_m (sum_c |d_c(m)|^2 / lambda(m) + C ln lambda(m))` after each iteration.
/// Each iteration minimizes this cost over the floored PSD and then over the
/// filters, so the sequence is non-increasing up to the diagonal loading.
pub fn wpe_with_cost<T: Real>(channels: &[Spectrogram<T>], cfg: &WpeConfig) -> Result<(Vec<Spectrogram<T>>, Vec<Vec<f64>>)> {
    cfg.validate()?;
    let first = channels.first().ok_or_else(|| Error::InvalidConfig("WPE needs at least one channel".into()))?;
    for ch in &channels[1..] {
        first.ensure_compatible(ch)?;
    }
    let (bins, frames) = first.shape();
    if frames <= cfg.prediction_delay_frames + cfg.filter_order_taps {
        return Err(Error::TooShort(format!(
            "{frames} frames; WPE needs more than delay + order = {}",
            cfg.prediction_delay_frames + cfg.filter_order_taps
        )));
    }

    let per_bin: Vec<(Vec<Vec<C64>>, Vec<f64>)> = (0..bins)
        .into_par_iter()
        .map(|k| {
            let x: Vec<Vec<C64>> = channels
                .iter()
                .map(|ch| ch.data().bin_series(k).iter().map(|c| C64::new(c.re.to_f64_lossy(), c.im.to_f64_lossy())).collect())
                .collect();
            dereverb_bin(&x, cfg).map_err(|e| match e {
                Error::Singular(_) => Error::Singular(k),
                other => other,
            })
        })
        .collect::<Result<_>>()?;

    let mut outputs = Vec::with_capacity(channels.len());
    for (c, ch) in channels.iter().enumerate() {
        let mut grid = TfGrid::filled(bins, frames, Complex::new(T::zero(), T::zero()));
        for (k, (d, _)) in per_bin.iter().enumerate() {
            let series: Vec<Complex<T>> = d[c].iter().map(|v| Complex::new(T::lit(v.re), T::lit(v.im))).collect();
            grid.set_bin_series(k, &series);
        }
        outputs.push(ch.with_data(grid)?);
    }
    Ok((outputs, per_bin.into_iter().map(|(_, cost)| cost).collect()))
}

/// Time-domain wrapper: STFT, WPE over all channels, inverse STFT.
pub fn wpe_waveforms<T: Real>(channels: &[Waveform<T>], cfg: &WpeConfig, stft_cfg: &StftConfig<T>) -> Result<Vec<Waveform<T>>> {
    let specs = channels.iter().map(|w| stft(w, stft_cfg)).collect::<Result<Vec<_>>>()?;
    wpe(&specs, cfg)?.iter().map(istft).collect()
}

fn dereverb_bin(x: &[Vec<C64>], cfg: &WpeConfig) -> Result<(Vec<Vec<C64>>, Vec<f64>)> {
    let channels = x.len();
    let frames = x[0].len();
    let (delay, order) = (cfg.prediction_delay_frames, cfg.filter_order_taps);
    let dim = channels * order;
    // Stacked delayed observation for frame m; entries before the signal start are zero.
    let stacked = |m: usize, out: &mut [C64]| {
        for tau in 0..order {
            for c in 0..channels {
                out[tau * channels + c] = match m.checked_sub(delay + tau) {
                    Some(i) => x[c][i],
                    None => C64::new(0.0, 0.0),
                };
            }
        }
    };

    let mean_power = x.iter().flatten().map(|v| v.norm_sqr()).sum::<f64>() / (channels * frames) as f64;
    let floor = cfg.psd_floor.max(cfg.relative_psd_floor * mean_power);
    let mut d: Vec<Vec<C64>> = x.to_vec();
    let mut costs = Vec::with_capacity(cfg.iterations);
    let mut lambda = vec![0.0; frames];
    let mut v = vec![C64::new(0.0, 0.0); dim];
    for _ in 0..cfg.iterations {
        for (m, l) in lambda.iter_mut().enumerate() {
            *l = (d.iter().map(|dc| dc[m].norm_sqr()).sum::<f64>() / channels as f64).max(floor);
        }
        let mut r = vec![C64::new(0.0, 0.0); dim * dim];
        let mut p = vec![C64::new(0.0, 0.0); dim * channels];
        for m in 0..frames {
            stacked(m, &mut v);
            let w = 1.0 / lambda[m];
            for i in 0..dim {
                let vi = v[i] * w;
                for j in 0..dim {
                    r[i * dim + j] += vi * v[j].conj();
                }
                for c in 0..channels {
                    p[i * channels + c] += vi * x[c][m].conj();
                }
            }
        }
        let g = solve_hermitian(&mut r, &p, dim, channels)?;
        let mut cost = 0.0;
        for m in 0..frames {
            stacked(m, &mut v);
            let mut e = 0.0;
            for c in 0..channels {
                let pred: C64 = (0..dim).map(|i| g[i * channels + c].conj() * v[i]).sum();
                d[c][m] = x[c][m] - pred;
                e += d[c][m].norm_sqr();
            }
            cost += e / lambda[m] + channels as f64 * lambda[m].ln();
        }
        costs.push(cost);
    }
    Ok((d, costs))
}

/// Solves `R G = P` for Hermitian positive semi-definite `R` (row-major, `dim x dim`)
/// after loading its diagonal with `1e-10 * trace`. A zero matrix yields `G = 0`.
fn solve_hermitian(r: &mut [C64], p: &[C64], dim: usize, rhs: usize) -> Result<Vec<C64>> {
    let trace: f64 = (0..dim).map(|i| r[i * dim + i].re).sum();
    if trace <= 0.0 {
        return Ok(vec![C64::new(0.0, 0.0); dim * rhs]);
    }
    let load = 1e-10 * trace;
    for i in 0..dim {
        r[i * dim + i] += load;
    }
    // In-place Cholesky: lower triangle holds L with R = L L^H.
    for j in 0..dim {
        let mut diag = r[j * dim + j].re;
        for k in 0..j {
            diag -= r[j * dim + k].norm_sqr();
        }
        if !(diag > 0.0) {
            return Err(Error::Singular(0));
        }
        let ljj = diag.sqrt();
        r[j * dim + j] = C64::new(ljj, 0.0);
        for i in j + 1..dim {
            let mut s = r[i * dim + j];
            for k in 0..j {
                s -= r[i * dim + k] * r[j * dim + k].conj();
            }
            r[i * dim + j] = s / ljj;
        }
    }
    let mut g = p.to_vec();
    for c in 0..rhs {
        // Forward: L y = p.
        for i in 0..dim {
            let mut s = g[i * rhs + c];
            for k in 0..i {
                s -= r[i * dim + k] * g[k * rhs + c];
            }
            g[i * rhs + c] = s / r[i * dim + i].re;
        }
        // Backward: L^H g = y.
        for i in (0..dim).rev() {
            let mut s = g[i * rhs + c];
            for k in i + 1..dim {
                s -= r[k * dim + i].conj() * g[k * rhs + c];
            }
            g[i * rhs + c] = s / r[i * dim + i].re;
        }
    }
    Ok(g)
}
