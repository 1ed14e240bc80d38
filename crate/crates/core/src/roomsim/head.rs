use crate::scalar::Real;

/// Optional head-shadow filtering applied to every arrival at each ear.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeadModel {
    #[default]
    None,
    Spherical,
}

impl HeadModel {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Spherical => "spherical",
        }
    }
}

impl std::str::FromStr for HeadModel {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> crate::error::Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "spherical" => Ok(Self::Spherical),
            other => Err(crate::error::Error::InvalidConfig(format!("unknown head model {other:?} (expected none or spherical)"))),
        }
    }
}

/// Taps kept from the head-shadow impulse response.
pub(crate) const HEAD_TAPS: usize = 32;
const ALPHA_MIN: f64 = 0.1;
const THETA_MIN_DEG: f64 = 150.0;

/// One-pole/one-zero spherical-head shadow filter (Brown & Duda).
///
/// Analog prototype `H(s) = (2 w0 + a(theta) s) / (2 w0 + s)` with `w0 = c / r`,
/// `a(theta) = (1 + amin/2) + (1 - amin/2) cos(theta / theta_min * 180 deg)`,
/// `amin = 0.1`, `theta_min = 150 deg`, `theta` the angle between the ear's outward
/// axis and the arrival direction. Unit gain at DC; high frequencies gain `a(theta)`:
/// about +6 dB facing the ear, about -20 dB at `theta_min`. Discretized by the
/// bilinear transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeadShadow {
    pub b0: f64,
    pub b1: f64,
    pub a1: f64,
}

impl HeadShadow {
    pub fn new(incidence_rad: f64, head_radius_m: f64, speed_of_sound: f64, sample_rate_hz: f64) -> Self {
        let alpha = Self::high_frequency_gain(incidence_rad);
        let w0 = speed_of_sound / head_radius_m;
        let fs = sample_rate_hz;
        let norm = w0 + fs;
        Self { b0: (w0 + alpha * fs) / norm, b1: (w0 - alpha * fs) / norm, a1: (w0 - fs) / norm }
    }

    pub fn high_frequency_gain(incidence_rad: f64) -> f64 {
        let theta = incidence_rad.to_degrees();
        (1.0 + ALPHA_MIN / 2.0) + (1.0 - ALPHA_MIN / 2.0) * (theta / THETA_MIN_DEG * std::f64::consts::PI).cos()
    }

    /// Truncated impulse response.
    pub fn impulse_response<T: Real>(&self) -> [T; HEAD_TAPS] {
        let mut h = [T::zero(); HEAD_TAPS];
        let mut prev = self.b0;
        h[0] = T::lit(prev);
        let mut v = self.b1 - self.a1 * self.b0;
        for tap in h.iter_mut().skip(1) {
            *tap = T::lit(v);
            prev = v;
            v = -self.a1 * prev;
        }
        h
    }

    /// Magnitude response at `freq_hz`.
    pub fn magnitude(&self, freq_hz: f64, sample_rate_hz: f64) -> f64 {
        let w = 2.0 * std::f64::consts::PI * freq_hz / sample_rate_hz;
        let (c, s) = (w.cos(), -w.sin());
        let num = ((self.b0 + self.b1 * c).powi(2) + (self.b1 * s).powi(2)).sqrt();
        let den = ((1.0 + self.a1 * c).powi(2) + (self.a1 * s).powi(2)).sqrt();
        num / den
    }
}
