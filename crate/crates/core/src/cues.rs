//! Interaural spectrogram and per-bin level/phase differences.

use std::io::Write;
use std::path::Path;

use crate::dsp::{Spectrogram, TfGrid};
use crate::error::{Error, Result};
use crate::scalar::{Complex, Real};

/// Default magnitude floor applied before forming ratios.
pub const DEFAULT_EPSILON: f64 = 1e-12;

/// Per-bin interaural level difference (dB) and phase difference (radians, in (-pi, pi]).
#[derive(Debug, Clone, PartialEq)]
pub struct CueGrid<T> {
    pub ild_db: TfGrid<T>,
    pub ipd_rad: TfGrid<T>,
}

impl<T: Real> CueGrid<T> {
    pub fn bins(&self) -> usize {
        self.ild_db.bins()
    }

    pub fn frames(&self) -> usize {
        self.ild_db.frames()
    }

    /// Debug dump with header `bin,frame,ild_db,ipd_rad`, one row per bin, frames outermost.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = std::io::BufWriter::new(file);
        let io = |e| Error::io(path, e);
        writeln!(out, "bin,frame,ild_db,ipd_rad").map_err(io)?;
        for m in 0..self.frames() {
            for k in 0..self.bins() {
                writeln!(out, "{k},{m},{},{}", self.ild_db.get(k, m), self.ipd_rad.get(k, m)).map_err(io)?;
            }
        }
        out.flush().map_err(io)
    }
}

fn floored<T: Real>(c: Complex<T>, eps: T) -> Complex<T> {
    let mag = c.norm();
    if mag >= eps {
        c
    } else if mag == T::zero() {
        Complex::new(eps, T::zero())
    } else {
        c * (eps / mag)
    }
}

/// `X1 / X2` per bin with `|X2|` floored at `epsilon`.
pub fn interaural_ratio<T: Real>(x1: &Spectrogram<T>, x2: &Spectrogram<T>, epsilon: T) -> Result<TfGrid<Complex<T>>> {
    x1.ensure_compatible(x2)?;
    x1.data().zip_map(x2.data(), |&a, &b| a / floored(b, epsilon))
}

/// ILD `20 log10(max(|X1|, eps) / max(|X2|, eps))` and IPD `arg(X1 conj(X2))`.
pub fn extract_cues<T: Real>(x1: &Spectrogram<T>, x2: &Spectrogram<T>, epsilon: T) -> Result<CueGrid<T>> {
    if !(epsilon > T::zero()) {
        return Err(Error::InvalidConfig(format!("epsilon must be positive, got {epsilon}")));
    }
    x1.ensure_compatible(x2)?;
    let twenty = T::lit(20.0);
    let ild_db = x1
        .data()
        .zip_map(x2.data(), |a, b| twenty * (a.norm().max(epsilon) / b.norm().max(epsilon)).log10())?;
    let ipd_rad = x1.data().zip_map(x2.data(), |a, b| {
        let p = (a * b.conj()).arg();
        // atan2 yields [-pi, pi]; fold -pi onto pi
        if p <= -T::PI() { T::PI() } else { p }
    })?;
    Ok(CueGrid { ild_db, ipd_rad })
}
