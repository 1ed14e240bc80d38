use crate::error::{Error, Result};

/// Dense bins x frames grid stored frame-major (all bins of frame 0, then frame 1, ...).
#[derive(Debug, Clone, PartialEq)]
pub struct TfGrid<V> {
    bins: usize,
    frames: usize,
    data: Vec<V>,
}

impl<V: Clone> TfGrid<V> {
    pub fn filled(bins: usize, frames: usize, value: V) -> Self {
        Self { bins, frames, data: vec![value; bins * frames] }
    }

    pub fn from_fn(bins: usize, frames: usize, mut f: impl FnMut(usize, usize) -> V) -> Self {
        let mut data = Vec::with_capacity(bins * frames);
        for m in 0..frames {
            for k in 0..bins {
                data.push(f(k, m));
            }
        }
        Self { bins, frames, data }
    }

    pub fn from_vec(bins: usize, frames: usize, data: Vec<V>) -> Result<Self> {
        if data.len() != bins * frames {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a {bins}x{frames} grid",
                data.len()
            )));
        }
        Ok(Self { bins, frames, data })
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.bins, self.frames)
    }

    #[inline]
    pub fn get(&self, bin: usize, frame: usize) -> &V {
        &self.data[frame * self.bins + bin]
    }

    #[inline]
    pub fn get_mut(&mut self, bin: usize, frame: usize) -> &mut V {
        &mut self.data[frame * self.bins + bin]
    }

    pub fn frame(&self, frame: usize) -> &[V] {
        &self.data[frame * self.bins..(frame + 1) * self.bins]
    }

    pub fn frame_mut(&mut self, frame: usize) -> &mut [V] {
        &mut self.data[frame * self.bins..(frame + 1) * self.bins]
    }

    /// Time series of one frequency bin.
    pub fn bin_series(&self, bin: usize) -> Vec<V> {
        (0..self.frames).map(|m| self.get(bin, m).clone()).collect()
    }

    pub fn set_bin_series(&mut self, bin: usize, series: &[V]) {
        for (m, v) in series.iter().enumerate() {
            *self.get_mut(bin, m) = v.clone();
        }
    }

    pub fn as_slice(&self) -> &[V] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [V] {
        &mut self.data
    }

    pub fn map<W: Clone>(&self, f: impl FnMut(&V) -> W) -> TfGrid<W> {
        TfGrid { bins: self.bins, frames: self.frames, data: self.data.iter().map(f).collect() }
    }

    pub fn zip_map<U: Clone, W: Clone>(
        &self,
        other: &TfGrid<U>,
        mut f: impl FnMut(&V, &U) -> W,
    ) -> Result<TfGrid<W>> {
        self.check_shape(other.shape())?;
        Ok(TfGrid {
            bins: self.bins,
            frames: self.frames,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn check_shape(&self, other: (usize, usize)) -> Result<()> {
        if self.shape() != other {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.bins, self.frames, other.0, other.1
            )));
        }
        Ok(())
    }
}
