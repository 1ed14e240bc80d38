use super::{MaskPair, SoftMask};
use crate::dsp::Spectrogram;
use crate::error::Result;
use crate::scalar::Real;

/// Ideal ratio mask from the known direct-path spectrograms.
///
/// Magnitudes are averaged over the two microphones: with `D = (|D1| + |D2|) / 2`
/// and `R = (|X1 - D1| + |X2 - D2|) / 2`, the direct mask is `D / (D + R + epsilon)`.
/// Averaging complex values instead would carve the interaural comb filter of the
/// summed direct paths into the mask. The same pair is returned for both cue types.
pub fn oracle_irm_backend<T: Real>(
    mix_left: &Spectrogram<T>,
    mix_right: &Spectrogram<T>,
    direct_left: &Spectrogram<T>,
    direct_right: &Spectrogram<T>,
    epsilon: T,
) -> Result<(MaskPair<T>, MaskPair<T>)> {
    mix_left.ensure_compatible(mix_right)?;
    mix_left.ensure_compatible(direct_left)?;
    mix_left.ensure_compatible(direct_right)?;
    let half = T::lit(0.5);
    let residual_left = mix_left.data().zip_map(direct_left.data(), |x, d| (x - d).norm())?;
    let residual_right = mix_right.data().zip_map(direct_right.data(), |x, d| (x - d).norm())?;
    let residual = residual_left.zip_map(&residual_right, |&a, &b| (a + b) * half)?;
    let direct = direct_left.data().zip_map(direct_right.data(), |a, b| (a.norm() + b.norm()) * half)?;
    let grid = direct.zip_map(&residual, |&d, &r| d / (d + r + epsilon))?;
    let pair = MaskPair::from_direct(SoftMask::clamped(grid));
    Ok((pair.clone(), pair))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::{stft, StftConfig, Waveform};

    fn spec(samples: Vec<f64>) -> Spectrogram<f64> {
        stft(&Waveform::new(samples, 16000).unwrap(), &StftConfig::default()).unwrap()
    }

    fn noise(seed: u64, n: usize) -> Vec<f64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect()
    }

    #[test]
    fn anechoic_mixture_gives_unit_mask() {
        let s = spec(noise(1, 4000));
        let (ipd, ild) = oracle_irm_backend(&s, &s, &s, &s, 1e-12).unwrap();
        assert_eq!(ipd, ild);
        for (&v, x) in ipd.direct.grid().as_slice().iter().zip(s.data().as_slice()) {
            if x.norm() > 1e-6 {
                assert!(v > 1.0 - 1e-5, "{v}");
            }
        }
    }

    #[test]
    fn silent_direct_path_gives_zero_mask() {
        let s = spec(noise(2, 4000));
        let z = spec(vec![0.0; 4000]);
        let (pair, _) = oracle_irm_backend(&s, &s, &z, &z, 1e-12).unwrap();
        assert!(pair.direct.grid().as_slice().iter().all(|&v| v == 0.0));
        assert!(pair.reverb.grid().as_slice().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn equal_direct_and_residual_gives_half() {
        // Mixture = 2 x direct, so |D| == |X - D|.
        let d = noise(3, 4000);
        let x: Vec<f64> = d.iter().map(|v| 2.0 * v).collect();
        let (sd, sx) = (spec(d), spec(x));
        let (pair, _) = oracle_irm_backend(&sx, &sx, &sd, &sd, 1e-12).unwrap();
        for (&v, c) in pair.direct.grid().as_slice().iter().zip(sd.data().as_slice()) {
            if c.norm() > 1e-6 {
                assert!((v - 0.5).abs() < 1e-6);
            }
        }
        for (a, b) in pair.direct.grid().as_slice().iter().zip(pair.reverb.grid().as_slice()) {
            assert!((a + b - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn opposite_direct_paths_do_not_cancel() {
        // D2 = -D1: a complex average would vanish, the magnitude average does not.
        let d = noise(6, 4000);
        let neg: Vec<f64> = d.iter().map(|v| -v).collect();
        let (sd, sn) = (spec(d), spec(neg));
        let (pair, _) = oracle_irm_backend(&sd, &sn, &sd, &sn, 1e-12).unwrap();
        for (&v, c) in pair.direct.grid().as_slice().iter().zip(sd.data().as_slice()) {
            if c.norm() > 1e-6 {
                assert!(v > 1.0 - 1e-5, "{v}");
            }
        }
    }

    #[test]
    fn shape_mismatch() {
        let a = spec(noise(4, 4000));
        let b = spec(noise(5, 5000));
        assert!(oracle_irm_backend(&a, &a, &a, &b, 1e-12).is_err());
    }
}
