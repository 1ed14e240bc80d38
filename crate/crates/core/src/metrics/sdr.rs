use super::to_f64;
use crate::dsp::Waveform;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// SI-SDR is clamped to `[-SDR_CAP_DB, SDR_CAP_DB]`.
pub const SDR_CAP_DB: f64 = 100.0;

/// Scale-invariant SDR of an aligned, equal-length estimate.
pub fn si_sdr<T: Real>(reference: &Waveform<T>, estimate: &Waveform<T>) -> Result<f64> {
    if reference.len() != estimate.len() {
        return Err(Error::ShapeMismatch(format!("reference {} vs estimate {} samples", reference.len(), estimate.len())));
    }
    let (s, e) = (to_f64(reference), to_f64(estimate));
    let ref_energy: f64 = s.iter().map(|v| v * v).sum();
    if ref_energy == 0.0 {
        return Err(Error::ZeroEnergy);
    }
    let alpha = s.iter().zip(&e).map(|(a, b)| a * b).sum::<f64>() / ref_energy;
    let target = alpha * alpha * ref_energy;
    let residual: f64 = s.iter().zip(&e).map(|(a, b)| (b - alpha * a).powi(2)).sum();
    let db = if residual == 0.0 {
        if target > 0.0 { SDR_CAP_DB } else { -SDR_CAP_DB }
    } else {
        10.0 * (target / residual).log10()
    };
    Ok(db.clamp(-SDR_CAP_DB, SDR_CAP_DB))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn noise(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    fn wave(v: Vec<f64>) -> Waveform<f64> {
        Waveform::new(v, 16000).unwrap()
    }

    #[test]
    fn identity_and_scaling_hit_the_cap() {
        let s = noise(4000, 1);
        assert_eq!(si_sdr(&wave(s.clone()), &wave(s.clone())).unwrap(), SDR_CAP_DB);
        let scaled = s.iter().map(|v| 3.0 * v).collect();
        assert_eq!(si_sdr(&wave(s), &wave(scaled)).unwrap(), SDR_CAP_DB);
    }

    #[test]
    fn orthogonal_noise_at_minus_twenty_db() {
        let s = noise(4000, 2);
        let mut n = noise(4000, 3);
        // Gram-Schmidt against s, then scale to 1% of its energy.
        let (ss, sn): (f64, f64) = (s.iter().map(|v| v * v).sum(), s.iter().zip(&n).map(|(a, b)| a * b).sum());
        n.iter_mut().zip(&s).for_each(|(v, a)| *v -= sn / ss * a);
        let nn: f64 = n.iter().map(|v| v * v).sum();
        let g = (0.01 * ss / nn).sqrt();
        let est = s.iter().zip(&n).map(|(a, b)| a + g * b).collect();
        let sdr = si_sdr(&wave(s), &wave(est)).unwrap();
        assert!((sdr - 20.0).abs() < 0.01, "{sdr}");
    }

    #[test]
    fn errors_and_floor() {
        let s = noise(100, 4);
        assert!(matches!(si_sdr(&wave(vec![0.0; 100]), &wave(s.clone())), Err(Error::ZeroEnergy)));
        assert!(si_sdr(&wave(s.clone()), &wave(s[..50].to_vec())).is_err());
        assert_eq!(si_sdr(&wave(s), &wave(vec![0.0; 100])).unwrap(), -SDR_CAP_DB);
    }

    proptest::proptest! {
        #[test]
        fn positive_scale_invariance(seed in 0u64..500, gain in 0.01f64..100.0) {
            let s = noise(512, seed);
            let e: Vec<f64> = noise(512, seed + 1000).iter().zip(&s).map(|(n, a)| a + 0.3 * n).collect();
            let scaled: Vec<f64> = e.iter().map(|v| v * gain).collect();
            let a = si_sdr(&wave(s.clone()), &wave(e)).unwrap();
            let b = si_sdr(&wave(s), &wave(scaled)).unwrap();
            proptest::prop_assert!((a - b).abs() < 1e-9);
        }
    }
}
