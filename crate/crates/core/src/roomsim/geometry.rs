use super::RoomSpec;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub type Vec3<T> = [T; 3];

/// Microphone spacing of the binaural pair in metres.
pub const MIC_SPACING_M: f64 = 0.145;

/// Two-microphone array facing +x, left microphone towards +y.
///
/// Azimuth 0 places the source straight ahead; positive azimuths rotate it
/// towards the right microphone (-y).
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry<T> {
    array_center: Vec3<T>,
    source_azimuth_deg: T,
    source_distance_m: T,
}

impl<T: Real> ArrayGeometry<T> {
    pub fn new(array_center: Vec3<T>, source_azimuth_deg: T, source_distance_m: T) -> Result<Self> {
        if !(source_azimuth_deg >= T::zero() && source_azimuth_deg <= T::lit(90.0)) {
            return Err(Error::InvalidConfig(format!("azimuth {source_azimuth_deg} outside [0, 90]")));
        }
        if !(source_distance_m > T::zero()) {
            return Err(Error::InvalidConfig("source distance must be positive".into()));
        }
        Ok(Self { array_center, source_azimuth_deg, source_distance_m })
    }

    /// Default placement: the array-source pair centred lengthwise, array on the
    /// room's width midline (so 0 degrees is mirror symmetric), at ear height.
    pub fn centered_in(room: &RoomSpec<T>, source_azimuth_deg: T, source_distance_m: T) -> Result<Self> {
        let [l, w, h] = room.dims();
        let half = T::lit(0.5);
        let center = [
            l * half - source_distance_m * half,
            w * half,
            (h * half).min(T::lit(1.2)),
        ];
        let geom = Self::new(center, source_azimuth_deg, source_distance_m)?;
        geom.validate(room)?;
        Ok(geom)
    }

    pub fn array_center(&self) -> Vec3<T> {
        self.array_center
    }

    pub fn source_azimuth_deg(&self) -> T {
        self.source_azimuth_deg
    }

    pub fn source_distance_m(&self) -> T {
        self.source_distance_m
    }

    pub fn head_radius(&self) -> T {
        T::lit(MIC_SPACING_M / 2.0)
    }

    pub fn mic_left(&self) -> Vec3<T> {
        let [x, y, z] = self.array_center;
        [x, y + self.head_radius(), z]
    }

    pub fn mic_right(&self) -> Vec3<T> {
        let [x, y, z] = self.array_center;
        [x, y - self.head_radius(), z]
    }

    pub fn source_position(&self) -> Vec3<T> {
        let az = self.source_azimuth_deg.to_radians();
        let [x, y, z] = self.array_center;
        [
            x + self.source_distance_m * az.cos(),
            y - self.source_distance_m * az.sin(),
            z,
        ]
    }

    /// Checks the spacing invariant and that source and microphones lie inside the room.
    pub fn validate(&self, room: &RoomSpec<T>) -> Result<()> {
        let spacing = distance(self.mic_left(), self.mic_right()).to_f64_lossy();
        if (spacing - MIC_SPACING_M).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!("mic spacing {spacing}")));
        }
        for (name, p) in [
            ("source", self.source_position()),
            ("left mic", self.mic_left()),
            ("right mic", self.mic_right()),
        ] {
            if !room.contains(p) {
                return Err(Error::OutsideRoom(format!("{name} at {p:?}")));
            }
        }
        Ok(())
    }
}

pub(crate) fn distance<T: Real>(a: Vec3<T>, b: Vec3<T>) -> T {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}
