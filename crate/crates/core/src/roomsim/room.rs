use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest reflection order the image enumerator accepts.
pub const MAX_ORDER_CAP: usize = 40;
/// Sabine/Eyring constant in s/m.
const SABINE: f64 = 0.161;
/// Default order stops once beta^order drops below this.
const ORDER_AMPLITUDE_FLOOR: f64 = 1e-3;

/// Shoebox room with uniform wall absorption.
#[derive(Debug, Clone, PartialEq)]
pub struct RoomSpec<T> {
    dims: [T; 3],
    rt60_s: T,
    sample_rate_hz: u32,
    max_order: usize,
    speed_of_sound: T,
    reflection: T,
}

impl<T: Real> RoomSpec<T> {
    /// Room with the default reflection order for its RT60 (0 when `rt60_s == 0`).
    pub fn new(dims: [T; 3], rt60_s: T, sample_rate_hz: u32) -> Result<Self> {
        let mut room = Self {
            dims,
            rt60_s,
            sample_rate_hz,
            max_order: 0,
            speed_of_sound: T::lit(343.0),
            reflection: T::zero(),
        };
        room.validate()?;
        if rt60_s > T::zero() {
            room.reflection = reflection_coeff_from_rt60(&room)?;
        }
        room.max_order = default_max_order(room.reflection.to_f64_lossy());
        Ok(room)
    }

    /// Override the wall reflection magnitude; the reflection order resets to its default.
    pub fn with_wall_reflection(mut self, beta: T) -> Result<Self> {
        if !(beta >= T::zero() && beta < T::one()) {
            return Err(Error::InvalidConfig(format!("wall reflection {beta} outside [0, 1)")));
        }
        self.reflection = beta;
        self.max_order = default_max_order(beta.to_f64_lossy());
        Ok(self)
    }

    pub fn with_max_order(mut self, max_order: usize) -> Result<Self> {
        if max_order > MAX_ORDER_CAP {
            return Err(Error::InvalidConfig(format!("max_order {max_order} exceeds {MAX_ORDER_CAP}")));
        }
        self.max_order = max_order;
        Ok(self)
    }

    pub fn with_speed_of_sound(mut self, c: T) -> Result<Self> {
        if !(c > T::zero()) {
            return Err(Error::InvalidConfig("speed of sound must be positive".into()));
        }
        self.speed_of_sound = c;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if self.dims.iter().any(|&d| !(d > T::zero()) || !d.is_finite()) {
            return Err(Error::InvalidConfig("room dimensions must be positive".into()));
        }
        if !(self.rt60_s >= T::zero()) {
            return Err(Error::InvalidConfig("rt60 must be non-negative".into()));
        }
        if self.sample_rate_hz == 0 {
            return Err(Error::InvalidConfig("sample rate must be positive".into()));
        }
        Ok(())
    }

    pub fn dims(&self) -> [T; 3] {
        self.dims
    }

    pub fn rt60_s(&self) -> T {
        self.rt60_s
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn speed_of_sound(&self) -> T {
        self.speed_of_sound
    }

    pub fn volume(&self) -> T {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn surface_area(&self) -> T {
        let [l, w, h] = self.dims;
        (l * w + l * h + w * h) * T::lit(2.0)
    }

    /// Wall reflection magnitude used by the image model; zero for an anechoic room.
    pub fn wall_reflection(&self) -> T {
        self.reflection
    }

    pub fn contains(&self, p: [T; 3]) -> bool {
        p.iter().zip(&self.dims).all(|(&x, &d)| x > T::zero() && x < d)
    }
}

pub(crate) fn default_max_order(beta: f64) -> usize {
    if beta <= 0.0 {
        0
    } else if beta >= 1.0 {
        MAX_ORDER_CAP
    } else {
        let n = (ORDER_AMPLITUDE_FLOOR.ln() / beta.ln()).ceil();
        (n.max(1.0) as usize).min(MAX_ORDER_CAP)
    }
}

/// Uniform wall reflection `beta = sqrt(1 - alpha)` with `alpha` from Eyring's formula
/// `T = 0.161 V / (-S ln(1 - alpha))`.
///
/// A target is rejected as infeasible once the Sabine-equivalent absorption
/// `0.161 V / (S T)` reaches 1: no surface can absorb more than all incident energy.
pub fn reflection_coeff_from_rt60<T: Real>(room: &RoomSpec<T>) -> Result<T> {
    let rt60 = room.rt60_s().to_f64_lossy();
    if !(rt60 > 0.0) {
        return Err(Error::InvalidConfig("rt60 must be positive".into()));
    }
    let v = room.volume().to_f64_lossy();
    let s = room.surface_area().to_f64_lossy();
    let sabine_alpha = SABINE * v / (s * rt60);
    if sabine_alpha >= 1.0 {
        return Err(Error::InfeasibleAbsorption { rt60_s: rt60 });
    }
    // 1 - alpha = exp(-sabine_alpha), so beta = exp(-sabine_alpha / 2)
    Ok(T::lit((-0.5 * sabine_alpha).exp()))
}

/// Eyring reverberation time for uniform absorption `alpha`.
pub fn eyring_rt60<T: Real>(dims: [T; 3], alpha: f64) -> f64 {
    let [l, w, h] = dims.map(|d| d.to_f64_lossy());
    let v = l * w * h;
    let s = 2.0 * (l * w + l * h + w * h);
    SABINE * v / (-s * (1.0 - alpha).ln())
}
