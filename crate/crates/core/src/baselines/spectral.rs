use crate::dsp::{istft, stft, Spectrogram, StftConfig, TfGrid, Waveform};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Late-reverberation spectral subtraction settings.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SpecSubConfig {
    pub rt60_s: f64,
    pub late_boundary_ms: f64,
    pub gain_floor: f64,
    /// Recursive-averaging constant for the observed PSD.
    pub smoothing: f64,
}

impl SpecSubConfig {
    pub fn new(rt60_s: f64) -> Self {
        Self { rt60_s, late_boundary_ms: 50.0, gain_floor: 0.1, smoothing: 0.9 }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidConfig(format!("spectral subtraction: {what}")));
        if !(self.rt60_s > 0.0) {
            return bad("rt60_s must be positive");
        }
        if !(self.late_boundary_ms > 0.0 && self.late_boundary_ms.is_finite()) {
            return bad("late_boundary_ms must be positive");
        }
        if !(self.gain_floor > 0.0 && self.gain_floor < 1.0) {
            return bad("gain_floor must lie in (0, 1)");
        }
        if !(0.0..1.0).contains(&self.smoothing) {
            return bad("smoothing must lie in [0, 1)");
        }
        Ok(())
    }

    /// Late-reverberation delay in frames for a given hop.
    pub fn delay_frames(&self, sample_rate_hz: u32, hop: usize) -> usize {
        (self.late_boundary_ms / 1000.0 * f64::from(sample_rate_hz) / hop as f64).round().max(1.0) as usize
    }
}

/// Applies the subtraction gains in the STFT domain; returns the processed spectrogram and the gain grid.
///
/// The late PSD is the observed smoothed PSD `N_l` frames earlier, attenuated by
/// `exp(-2 rho T_l)` with `rho = 3 ln 10 / rt60`. Gains lie in `[gain_floor, 1]`;
/// frames before `N_l` pass through unchanged.
pub fn subtract_late_reverb<T: Real>(x: &Spectrogram<T>, cfg: &SpecSubConfig) -> Result<(Spectrogram<T>, TfGrid<T>)> {
    cfg.validate()?;
    let n_late = cfg.delay_frames(x.sample_rate_hz(), x.config().hop());
    let rho = 3.0 * std::f64::consts::LN_10 / cfg.rt60_s;
    let decay = (-2.0 * rho * cfg.late_boundary_ms / 1000.0).exp();
    let (bins, frames) = x.shape();
    let data = x.data();

    let mut psd = vec![vec![0.0f64; bins]; frames];
    for m in 0..frames {
        for (k, c) in data.frame(m).iter().enumerate() {
            let p = c.norm_sqr().to_f64_lossy();
            psd[m][k] = if m == 0 { p } else { cfg.smoothing * psd[m - 1][k] + (1.0 - cfg.smoothing) * p };
        }
    }

    let floor = T::lit(cfg.gain_floor);
    let gains = TfGrid::from_fn(bins, frames, |k, m| {
        if m < n_late || psd[m][k] <= 0.0 {
            return T::one();
        }
        let late = decay * psd[m - n_late][k];
        let g = T::lit(1.0 - (late / psd[m][k]).sqrt());
        g.max(floor).min(T::one())
    });
    let out = data.zip_map(&gains, |c, &g| c * g)?;
    Ok((x.with_data(out)?, gains))
}

/// Time-domain spectral subtraction.
pub fn spectral_subtraction<T: Real>(x: &Waveform<T>, cfg: &SpecSubConfig, stft_cfg: &StftConfig<T>) -> Result<Waveform<T>> {
    let (y, _) = subtract_late_reverb(&stft(x, stft_cfg)?, cfg)?;
    istft(&y)
}
