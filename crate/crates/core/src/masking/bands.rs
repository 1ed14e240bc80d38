use std::ops::RangeInclusive;

use super::SoftMask;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Band {
    /// Phase cues only.
    Low,
    /// Product of phase and level cues.
    Mid,
    /// Level cues only.
    High,
}

impl Band {
    pub const ALL: [Band; 3] = [Band::Low, Band::Mid, Band::High];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Partition of the one-sided bins `0..=frame_len/2` into three fusion bands.
///
/// Bin `b` sits at `b * fs / frame_len`. DC belongs to the low band and the
/// Nyquist bin is the last bin of the high band.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandPlan {
    low: RangeInclusive<usize>,
    mid: RangeInclusive<usize>,
    high: RangeInclusive<usize>,
    frame_len: usize,
    sample_rate_hz: u32,
}

impl BandPlan {
    /// Bands split at `low_edge_hz` and `mid_edge_hz`; each edge bin belongs to the band below it.
    pub fn new(frame_len: usize, sample_rate_hz: u32, low_edge_hz: f64, mid_edge_hz: f64) -> Result<Self> {
        if frame_len < 2 || frame_len % 2 != 0 || sample_rate_hz == 0 {
            return Err(Error::InvalidConfig(format!("band plan for frame {frame_len} at {sample_rate_hz} Hz")));
        }
        let nyquist_bin = frame_len / 2;
        let to_bin = |hz: f64| (hz * frame_len as f64 / f64::from(sample_rate_hz)).round() as usize;
        let (a, b) = (to_bin(low_edge_hz), to_bin(mid_edge_hz));
        if !(1 <= a && a < b && b < nyquist_bin) {
            return Err(Error::InvalidConfig(format!(
                "band edges {low_edge_hz} Hz / {mid_edge_hz} Hz do not split 0..={nyquist_bin}"
            )));
        }
        let plan = Self { low: 1..=a, mid: a + 1..=b, high: b + 1..=nyquist_bin, frame_len, sample_rate_hz };
        plan.check_partition()?;
        Ok(plan)
    }

    /// 1.5 kHz and 4 kHz split.
    pub fn standard(frame_len: usize, sample_rate_hz: u32) -> Result<Self> {
        Self::new(frame_len, sample_rate_hz, 1500.0, 4000.0)
    }

    /// Positive-frequency range of the low band; DC is added to it by [`BandPlan::band_of`].
    pub fn low_band(&self) -> &RangeInclusive<usize> {
        &self.low
    }

    pub fn mid_band(&self) -> &RangeInclusive<usize> {
        &self.mid
    }

    pub fn high_band(&self) -> &RangeInclusive<usize> {
        &self.high
    }

    pub fn frame_len(&self) -> usize {
        self.frame_len
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn bins(&self) -> usize {
        self.frame_len / 2 + 1
    }

    pub fn bin_frequency_hz(&self, bin: usize) -> f64 {
        bin as f64 * f64::from(self.sample_rate_hz) / self.frame_len as f64
    }

    pub fn band_of(&self, bin: usize) -> Option<Band> {
        if bin == 0 || self.low.contains(&bin) {
            Some(Band::Low)
        } else if self.mid.contains(&bin) {
            Some(Band::Mid)
        } else if self.high.contains(&bin) {
            Some(Band::High)
        } else {
            None
        }
    }

    /// Every one-sided bin must be claimed by exactly one rule.
    pub fn check_partition(&self) -> Result<()> {
        for bin in 0..self.bins() {
            let claims = usize::from(bin == 0)
                + usize::from(self.low.contains(&bin))
                + usize::from(self.mid.contains(&bin))
                + usize::from(self.high.contains(&bin));
            if claims != 1 {
                return Err(Error::InvalidConfig(format!("bin {bin} claimed by {claims} bands")));
            }
        }
        Ok(())
    }
}

/// Phase mask below the low edge, phase x level in the middle band, level mask above.
pub fn fuse_subband<T: Real>(ipd_direct: &SoftMask<T>, ild_direct: &SoftMask<T>, plan: &BandPlan) -> Result<SoftMask<T>> {
    let ipd = ipd_direct.grid();
    let ild = ild_direct.grid();
    ipd.check_shape(ild.shape())?;
    if ipd.bins() != plan.bins() {
        return Err(Error::ShapeMismatch(format!("mask has {} bins, band plan {}", ipd.bins(), plan.bins())));
    }
    let bands: Vec<Band> = (0..plan.bins()).map(|b| plan.band_of(b).expect("partition checked")).collect();
    let mut out = ipd.clone();
    for m in 0..out.frames() {
        let (p, l) = (ipd.frame(m), ild.frame(m));
        for (k, v) in out.frame_mut(m).iter_mut().enumerate() {
            *v = match bands[k] {
                Band::Low => p[k],
                Band::Mid => p[k] * l[k],
                Band::High => l[k],
            };
        }
    }
    SoftMask::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::TfGrid;

    #[test]
    fn standard_plan_edges() {
        let plan = BandPlan::standard(1024, 16000).unwrap();
        assert_eq!(plan.low_band(), &(1..=96));
        assert_eq!(plan.mid_band(), &(97..=256));
        assert_eq!(plan.high_band(), &(257..=512));
        assert_eq!(plan.bin_frequency_hz(96), 1500.0);
        assert_eq!(plan.bin_frequency_hz(256), 4000.0);
        assert_eq!(plan.bin_frequency_hz(512), 8000.0);
        assert_eq!(plan.band_of(0), Some(Band::Low));
        assert_eq!(plan.band_of(96), Some(Band::Low));
        assert_eq!(plan.band_of(97), Some(Band::Mid));
        assert_eq!(plan.band_of(512), Some(Band::High));
        assert_eq!(plan.band_of(513), None);
        plan.check_partition().unwrap();
    }

    #[test]
    fn rejects_degenerate_edges() {
        assert!(BandPlan::new(1024, 16000, 4000.0, 1500.0).is_err());
        assert!(BandPlan::new(1024, 16000, 1500.0, 8000.0).is_err());
        assert!(BandPlan::new(1023, 16000, 1500.0, 4000.0).is_err());
    }

    #[test]
    fn fusion_of_constant_masks() {
        let plan = BandPlan::standard(1024, 16000).unwrap();
        let ipd = SoftMask::filled(513, 4, 0.8).unwrap();
        let ild = SoftMask::filled(513, 4, 0.5).unwrap();
        let fused = fuse_subband(&ipd, &ild, &plan).unwrap();
        for m in 0..4 {
            for k in 0..513 {
                let expected: f64 = match k {
                    0..=96 => 0.8,
                    97..=256 => 0.4,
                    _ => 0.5,
                };
                assert!((fused.grid().get(k, m) - expected).abs() < 1e-15, "bin {k}");
            }
        }
        let ones = SoftMask::filled(513, 4, 1.0).unwrap();
        assert!(fuse_subband(&ones, &ones, &plan).unwrap().grid().as_slice().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn fusion_shape_mismatch() {
        let plan = BandPlan::standard(1024, 16000).unwrap();
        let a = SoftMask::filled(513, 4, 0.5).unwrap();
        let b = SoftMask::filled(513, 5, 0.5).unwrap();
        assert!(matches!(fuse_subband(&a, &b, &plan), Err(Error::ShapeMismatch(_))));
        let c = SoftMask::filled(257, 4, 0.5).unwrap();
        assert!(fuse_subband(&c, &c, &plan).is_err());
    }

    proptest::proptest! {
        #[test]
        fn fused_values_are_bounded(vals in proptest::collection::vec((0.0f64..=1.0, 0.0f64..=1.0), 513 * 2)) {
            let plan = BandPlan::standard(1024, 16000).unwrap();
            let ipd = SoftMask::new(TfGrid::from_vec(513, 2, vals.iter().map(|v| v.0).collect()).unwrap()).unwrap();
            let ild = SoftMask::new(TfGrid::from_vec(513, 2, vals.iter().map(|v| v.1).collect()).unwrap()).unwrap();
            let fused = fuse_subband(&ipd, &ild, &plan).unwrap();
            for m in 0..2 {
                for k in 0..513 {
                    let (p, l, f) = (*ipd.grid().get(k, m), *ild.grid().get(k, m), *fused.grid().get(k, m));
                    proptest::prop_assert!(f >= 0.0 && f <= p.max(l));
                    if plan.band_of(k) == Some(Band::Mid) {
                        proptest::prop_assert!(f <= p.min(l));
                    }
                }
            }
        }
    }
}
