use super::geometry::distance;
use super::head::HEAD_TAPS;
use super::{ArrayGeometry, Channel, HeadModel, HeadShadow, Rir, RoomSpec, Vec3};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Length of the windowed-sinc fractional-delay interpolator.
pub const FRACTIONAL_DELAY_TAPS: usize = 16;
/// Tail energy below this fraction of the total is trimmed.
const RESIDUAL_ENERGY_FLOOR: f64 = 1e-6;

/// Mirror image of the source and the number of wall reflections it represents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageSource<T> {
    pub position: Vec3<T>,
    pub reflections: usize,
}

/// Number of lattice images with `|i| + |j| + |k| <= order`.
pub fn image_count(order: usize) -> usize {
    let q = order;
    (2 * q + 1) * (2 * q * q + 2 * q + 3) / 3
}

fn image_coordinate<T: Real>(index: i64, source: T, room_len: T) -> T {
    if index % 2 == 0 {
        T::lit(index as f64) * room_len + source
    } else {
        T::lit((index + 1) as f64) * room_len - source
    }
}

/// All image sources up to the room's reflection order, in a fixed enumeration order.
pub fn image_sources<T: Real>(room: &RoomSpec<T>, source: Vec3<T>) -> Vec<ImageSource<T>> {
    let q = room.max_order() as i64;
    let dims = room.dims();
    let mut out = Vec::with_capacity(image_count(room.max_order()));
    for i in -q..=q {
        let x = image_coordinate(i, source[0], dims[0]);
        let rest_i = q - i.abs();
        for j in -rest_i..=rest_i {
            let y = image_coordinate(j, source[1], dims[1]);
            let rest_j = rest_i - j.abs();
            for k in -rest_j..=rest_j {
                let z = image_coordinate(k, source[2], dims[2]);
                out.push(ImageSource {
                    position: [x, y, z],
                    reflections: (i.abs() + j.abs() + k.abs()) as usize,
                });
            }
        }
    }
    out
}

/// Hann-windowed sinc taps for a delay of `delay` samples; returns the index of the first tap.
fn fractional_delay<T: Real>(delay: f64, taps: &mut [T; FRACTIONAL_DELAY_TAPS]) -> i64 {
    let half = (FRACTIONAL_DELAY_TAPS / 2) as f64;
    let first = delay.floor() as i64 - (FRACTIONAL_DELAY_TAPS as i64 / 2 - 1);
    for (n, tap) in taps.iter_mut().enumerate() {
        let t = (first + n as i64) as f64 - delay;
        let sinc = if t == 0.0 {
            1.0
        } else {
            let pt = std::f64::consts::PI * t;
            pt.sin() / pt
        };
        let window = if t.abs() >= half { 0.0 } else { 0.5 * (1.0 + (std::f64::consts::PI * t / half).cos()) };
        *tap = T::lit(sinc * window);
    }
    first
}

struct EarFilter {
    center: [f64; 3],
    axis: [f64; 3],
    head_radius: f64,
}

fn render<T: Real>(room: &RoomSpec<T>, source: Vec3<T>, mic: Vec3<T>, ear: Option<&EarFilter>, channel: Channel) -> Result<Rir<T>> {
    if !room.contains(source) {
        return Err(Error::OutsideRoom(format!("source at {source:?}")));
    }
    if !room.contains(mic) {
        return Err(Error::OutsideRoom(format!("microphone at {mic:?}")));
    }
    if distance(source, mic) == T::zero() {
        return Err(Error::CoincidentSourceMic);
    }
    let beta = room.wall_reflection().to_f64_lossy();
    let fs = f64::from(room.sample_rate_hz());
    let c = room.speed_of_sound().to_f64_lossy();
    let images = image_sources(room, source);
    let gains: Vec<f64> = (0..=room.max_order()).map(|n| beta.powi(n as i32)).collect();

    let max_delay = images
        .iter()
        .filter(|im| gains[im.reflections] != 0.0)
        .map(|im| distance(im.position, mic).to_f64_lossy() / c * fs)
        .fold(0.0, f64::max);
    let extra = if ear.is_some() { HEAD_TAPS } else { 0 };
    let len = max_delay.ceil() as usize + FRACTIONAL_DELAY_TAPS + extra + 1;
    let mut taps = vec![T::zero(); len];
    let mut kernel = [T::zero(); FRACTIONAL_DELAY_TAPS];
    let mut filtered = vec![T::zero(); FRACTIONAL_DELAY_TAPS + HEAD_TAPS - 1];

    for im in &images {
        let gain = gains[im.reflections];
        if gain == 0.0 {
            continue;
        }
        let r = distance(im.position, mic).to_f64_lossy();
        let amp = T::lit(gain / r);
        let first = fractional_delay(r / c * fs, &mut kernel);
        match ear {
            None => {
                for (n, &k) in kernel.iter().enumerate() {
                    let idx = first + n as i64;
                    if idx >= 0 {
                        taps[idx as usize] += amp * k;
                    }
                }
            }
            Some(ear) => {
                let p = im.position.map(|v| v.to_f64_lossy());
                let d = [p[0] - ear.center[0], p[1] - ear.center[1], p[2] - ear.center[2]];
                let norm = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
                let cos = (d[0] * ear.axis[0] + d[1] * ear.axis[1] + d[2] * ear.axis[2]) / norm;
                let shadow = HeadShadow::new(cos.clamp(-1.0, 1.0).acos(), ear.head_radius, c, fs);
                let h = shadow.impulse_response::<T>();
                filtered.iter_mut().for_each(|v| *v = T::zero());
                for (a, &k) in kernel.iter().enumerate() {
                    for (b, &hv) in h.iter().enumerate() {
                        filtered[a + b] += k * hv;
                    }
                }
                for (n, &v) in filtered.iter().enumerate() {
                    let idx = first + n as i64;
                    if idx >= 0 {
                        taps[idx as usize] += amp * v;
                    }
                }
            }
        }
    }
    truncate_residual(&mut taps);
    Rir::new(taps, room.sample_rate_hz(), channel)
}

/// Drop the tail once the energy remaining after a tap falls below the floor.
fn truncate_residual<T: Real>(taps: &mut Vec<T>) {
    let total = crate::scalar::energy(taps);
    if total == 0.0 {
        taps.truncate(1);
        return;
    }
    let mut residual = 0.0;
    let mut keep = taps.len();
    for (i, t) in taps.iter().enumerate().rev() {
        let v = t.to_f64_lossy();
        residual += v * v;
        if residual >= RESIDUAL_ENERGY_FLOOR * total {
            keep = i + 1;
            break;
        }
    }
    taps.truncate(keep.max(1));
}

/// Impulse response from `source` to an omnidirectional microphone at `mic`.
pub fn image_source_rir<T: Real>(room: &RoomSpec<T>, source: Vec3<T>, mic: Vec3<T>) -> Result<Rir<T>> {
    render(room, source, mic, None, Channel::Left)
}

/// Left/right impulse responses for the array geometry, padded to equal length.
pub fn binaural_rir_pair<T: Real>(
    room: &RoomSpec<T>,
    geom: &ArrayGeometry<T>,
    head_model: HeadModel,
) -> Result<(Rir<T>, Rir<T>)> {
    geom.validate(room)?;
    let source = geom.source_position();
    let center = geom.array_center().map(|v| v.to_f64_lossy());
    let radius = geom.head_radius().to_f64_lossy();
    let (left_ear, right_ear) = match head_model {
        HeadModel::None => (None, None),
        HeadModel::Spherical => (
            Some(EarFilter { center, axis: [0.0, 1.0, 0.0], head_radius: radius }),
            Some(EarFilter { center, axis: [0.0, -1.0, 0.0], head_radius: radius }),
        ),
    };
    let left = render(room, source, geom.mic_left(), left_ear.as_ref(), Channel::Left)?;
    let right = render(room, source, geom.mic_right(), right_ear.as_ref(), Channel::Right)?;
    let len = left.len().max(right.len());
    Ok((left.padded(len), right.padded(len)))
}
