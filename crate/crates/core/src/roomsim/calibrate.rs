use super::{image_source_rir, schroeder_rt60, RoomSpec};
use crate::error::Result;
use crate::scalar::Real;

/// Relative RT60 error at which refinement stops.
const TOLERANCE: f64 = 0.03;
const MAX_ITERATIONS: usize = 12;
/// Reference source and microphone positions as fractions of the room dimensions.
const SOURCE_FRACTION: [f64; 3] = [0.35, 0.42, 0.47];
const MIC_FRACTION: [f64; 3] = [0.61, 0.56, 0.52];

/// Refine the wall reflection so the simulated Schroeder RT60 matches the room's target.
///
/// Eyring's formula assumes a diffuse field; a shoebox image model is not diffuse
/// (paths grazing the largest surfaces meet few walls) and decays more slowly than
/// predicted. Starting from the Eyring value, the per-reflection log attenuation
/// `a = -ln(beta)` is rescaled by `measured / target` (RT60 is roughly inversely
/// proportional to `a`) until the measured RT60 of a reference source/microphone
/// pair is within 3 % of the target. The closest iterate is kept.
pub fn calibrate_reflection<T: Real>(room: &RoomSpec<T>) -> Result<RoomSpec<T>> {
    let target = room.rt60_s().to_f64_lossy();
    if target == 0.0 {
        return Ok(room.clone());
    }
    let dims = room.dims();
    let at = |frac: [f64; 3]| [0, 1, 2].map(|i| dims[i] * T::lit(frac[i]));
    let (source, mic) = (at(SOURCE_FRACTION), at(MIC_FRACTION));

    let mut attenuation = -room.wall_reflection().to_f64_lossy().ln();
    let mut best: Option<(f64, RoomSpec<T>)> = None;
    for _ in 0..MAX_ITERATIONS {
        let candidate = room.clone().with_wall_reflection(T::lit((-attenuation).exp()))?;
        let measured = match schroeder_rt60(&image_source_rir(&candidate, source, mic)?) {
            Ok(v) => v,
            Err(_) => break,
        };
        let err = (measured / target - 1.0).abs();
        if best.as_ref().map_or(true, |(e, _)| err < *e) {
            best = Some((err, candidate));
        }
        if err < TOLERANCE {
            break;
        }
        attenuation *= measured / target;
    }
    Ok(best.map_or_else(|| room.clone(), |(_, r)| r))
}
