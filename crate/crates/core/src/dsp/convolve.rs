use realfft::RealFftPlanner;

use super::Waveform;
use crate::error::Result;
use crate::roomsim::Rir;
use crate::scalar::{Complex, Real};

/// Below this product of lengths the direct sum is cheaper than FFTs.
const DIRECT_LIMIT: usize = 4096;

/// Full linear convolution of two sequences, length `a.len() + b.len() - 1`.
pub fn linear_convolve<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let out_len = a.len() + b.len() - 1;
    if a.len().min(b.len()) <= 32 || a.len() * b.len() <= DIRECT_LIMIT {
        let mut out = vec![T::zero(); out_len];
        for (i, &x) in a.iter().enumerate() {
            if x == T::zero() {
                continue;
            }
            for (j, &h) in b.iter().enumerate() {
                out[i + j] += x * h;
            }
        }
        return out;
    }
    let n = out_len.next_power_of_two();
    let mut planner = RealFftPlanner::<T>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let spectrum = |x: &[T]| {
        let mut buf = vec![T::zero(); n];
        buf[..x.len()].copy_from_slice(x);
        let mut out = fwd.make_output_vec();
        fwd.process(&mut buf, &mut out).expect("forward fft length");
        out
    };
    let sa = spectrum(a);
    let sb = spectrum(b);
    let mut prod: Vec<Complex<T>> = sa.iter().zip(&sb).map(|(x, y)| x * y).collect();
    prod[0].im = T::zero();
    prod[n / 2].im = T::zero();
    let mut time = inv.make_output_vec();
    inv.process(&mut prod, &mut time).expect("inverse fft length");
    let scale = T::one() / T::from_usize_lossy(n);
    time.truncate(out_len);
    time.iter_mut().for_each(|v| *v *= scale);
    time
}

/// Convolve a source with a room impulse response (full length, nothing clipped).
pub fn convolve<T: Real>(source: &Waveform<T>, rir: &Rir<T>) -> Result<Waveform<T>> {
    if source.sample_rate_hz() != rir.sample_rate_hz() {
        return Err(crate::Error::RateMismatch {
            left: source.sample_rate_hz(),
            right: rir.sample_rate_hz(),
        });
    }
    source.with_samples(linear_convolve(source.samples(), rir.taps()))
}
