//! Truncated tensor Haar expansions and the forward/inverse transforms.
//!
//! Along each axis the basis is `{1} ∪ {h_I : level(I) < J}`, which is
//! orthonormal and complete on the `2^J`-cell grid. Coefficient slot 0 of an
//! axis is the constant (mean) direction; slot `2^j + k` is the interval
//! `(j, k)`. A coefficient index whose axes are all intervals is called
//! *pure*; sums "over all dyadic rectangles" range over pure indices only.

use crate::error::{Error, Result};
use crate::geometry::{DyadicInterval, DyadicRectangle, Shape};
use crate::signal::GridSignal;
use serde::{Deserialize, Serialize};

/// Basis direction along one axis: the constant function or a Haar wavelet.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum AxisIndex {
    Mean,
    Interval(DyadicInterval),
}

impl AxisIndex {
    pub fn to_flat(&self) -> usize {
        match self {
            AxisIndex::Mean => 0,
            AxisIndex::Interval(iv) => (1usize << iv.level()) + iv.offset(),
        }
    }

    pub fn from_flat(flat: usize) -> Self {
        if flat == 0 {
            AxisIndex::Mean
        } else {
            let level = usize::BITS as usize - 1 - flat.leading_zeros() as usize;
            let offset = flat - (1usize << level);
            AxisIndex::Interval(DyadicInterval::new(level, offset).expect("valid flat index"))
        }
    }

    /// Level with `Mean` mapped to `None` (below every level).
    pub fn level(&self) -> Option<usize> {
        match self {
            AxisIndex::Mean => None,
            AxisIndex::Interval(iv) => Some(iv.level()),
        }
    }
}

/// Coefficients of a function on the truncated tensor Haar basis.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct HaarExpansion {
    shape: Shape,
    coeffs: Vec<f64>,
}

impl HaarExpansion {
    pub fn zeros(shape: Shape) -> Self {
        let n = shape.cells();
        Self { shape, coeffs: vec![0.0; n] }
    }

    pub fn from_coeffs(shape: Shape, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != shape.cells() {
            return Err(Error::ShapeMismatch(format!(
                "{} coefficients for {} slots",
                coeffs.len(),
                shape.cells()
            )));
        }
        Ok(Self { shape, coeffs })
    }

    /// Expansion with a single unit coefficient.
    pub fn unit(shape: Shape, index: &[AxisIndex]) -> Result<Self> {
        let mut e = Self::zeros(shape);
        let flat = e.flat_of(index)?;
        e.coeffs[flat] = 1.0;
        Ok(e)
    }

    /// Unit coefficient at a pure rectangle.
    pub fn unit_rectangle(shape: Shape, rect: &DyadicRectangle) -> Result<Self> {
        let idx: Vec<AxisIndex> =
            rect.intervals().iter().map(|iv| AxisIndex::Interval(*iv)).collect();
        Self::unit(shape, &idx)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn flat_of(&self, index: &[AxisIndex]) -> Result<usize> {
        if index.len() != self.shape.n_params() {
            return Err(Error::ShapeMismatch("index arity mismatch".into()));
        }
        for (l, ix) in index.iter().enumerate() {
            if ix.to_flat() >= self.shape.axis_dim(l) {
                return Err(Error::LevelOutOfRange {
                    level: ix.level().unwrap_or(0),
                    depth: self.shape.depth(l),
                });
            }
        }
        let flat: Vec<usize> = index.iter().map(|ix| ix.to_flat()).collect();
        Ok(self.shape.flat_index(&flat))
    }

    pub fn get(&self, index: &[AxisIndex]) -> Result<f64> {
        Ok(self.coeffs[self.flat_of(index)?])
    }

    pub fn set(&mut self, index: &[AxisIndex], value: f64) -> Result<()> {
        let flat = self.flat_of(index)?;
        self.coeffs[flat] = value;
        Ok(())
    }

    /// Multi-index (one `AxisIndex` per axis) of a flat coefficient slot.
    pub fn axis_indices(&self, flat: usize) -> Vec<AxisIndex> {
        self.shape
            .unflatten(flat)
            .into_iter()
            .map(AxisIndex::from_flat)
            .collect()
    }

    /// True when every axis of the slot is an interval.
    pub fn is_pure(&self, flat: usize) -> bool {
        self.shape.unflatten(flat).iter().all(|&i| i != 0)
    }

    /// The rectangle of a pure slot.
    pub fn rectangle_of(&self, flat: usize) -> Option<DyadicRectangle> {
        let idx = self.shape.unflatten(flat);
        if idx.contains(&0) {
            return None;
        }
        let ivs = idx
            .iter()
            .map(|&i| match AxisIndex::from_flat(i) {
                AxisIndex::Interval(iv) => iv,
                AxisIndex::Mean => unreachable!(),
            })
            .collect();
        Some(DyadicRectangle::new(ivs))
    }

    /// Flat slots of all pure-rectangle coefficients, ascending.
    pub fn pure_slots(&self) -> Vec<usize> {
        (0..self.coeffs.len()).filter(|&f| self.is_pure(f)).collect()
    }

    /// Squared L2 norm: sum of squared coefficients (Parseval).
    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    pub fn inner(&self, other: &HaarExpansion) -> Result<f64> {
        self.shape.check_same(&other.shape)?;
        Ok(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b).sum())
    }

    pub fn scale(&self, c: f64) -> HaarExpansion {
        Self { shape: self.shape.clone(), coeffs: self.coeffs.iter().map(|x| c * x).collect() }
    }

    pub fn add(&self, other: &HaarExpansion) -> Result<HaarExpansion> {
        self.shape.check_same(&other.shape)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self { shape: self.shape.clone(), coeffs })
    }

    pub fn sub(&self, other: &HaarExpansion) -> Result<HaarExpansion> {
        self.shape.check_same(&other.shape)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Self { shape: self.shape.clone(), coeffs })
    }

    pub fn max_abs_diff(&self, other: &HaarExpansion) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Apply `f` to every line of `data` along `axis` (gather/scatter through a
/// scratch buffer; lines are generally strided).
pub(crate) fn for_each_line(
    data: &mut [f64],
    shape: &Shape,
    axis: usize,
    mut f: impl FnMut(&mut [f64]),
) {
    let dim = shape.axis_dim(axis);
    let stride = shape.strides()[axis];
    let mut buf = vec![0.0; dim];
    let total = data.len();
    let block = dim * stride;
    let mut base = 0;
    while base < total {
        for lane in 0..stride {
            let start = base + lane;
            for k in 0..dim {
                buf[k] = data[start + k * stride];
            }
            f(&mut buf);
            for k in 0..dim {
                data[start + k * stride] = buf[k];
            }
        }
        base += block;
    }
}

/// One-dimensional analysis pyramid, cells to coefficients, in place.
fn analyze_line(line: &mut [f64]) {
    let dim = line.len();
    let depth = dim.trailing_zeros() as usize;
    let mut avg = line.to_vec();
    for j in (0..depth).rev() {
        let scale = 0.5 * 0.5f64.powi(j as i32).sqrt(); // 2^{-j/2 - 1}
        for k in 0..(1usize << j) {
            let left = avg[2 * k];
            let right = avg[2 * k + 1];
            line[(1usize << j) + k] = scale * (right - left);
            avg[k] = 0.5 * (left + right);
        }
    }
    line[0] = avg[0];
}

/// One-dimensional synthesis pyramid, coefficients to cells, in place.
fn synthesize_line(line: &mut [f64]) {
    let dim = line.len();
    let depth = dim.trailing_zeros() as usize;
    let mut avg = vec![line[0]];
    for j in 0..depth {
        let scale = 2f64.powi(j as i32).sqrt();
        let mut next = vec![0.0; 2 * avg.len()];
        for k in 0..(1usize << j) {
            let d = line[(1usize << j) + k] * scale;
            next[2 * k] = avg[k] - d;
            next[2 * k + 1] = avg[k] + d;
        }
        avg = next;
    }
    line.copy_from_slice(&avg);
}

/// Forward Haar transform: exact coefficients of a grid signal.
pub fn haar_forward(sig: &GridSignal) -> HaarExpansion {
    let shape = sig.shape().clone();
    let mut data = sig.values().to_vec();
    for axis in 0..shape.n_params() {
        for_each_line(&mut data, &shape, axis, analyze_line);
    }
    HaarExpansion { shape, coeffs: data }
}

/// Inverse Haar transform: synthesize the signal of an expansion.
pub fn haar_inverse(exp: &HaarExpansion) -> GridSignal {
    let shape = exp.shape().clone();
    let mut data = exp.coeffs().to_vec();
    for axis in 0..shape.n_params() {
        for_each_line(&mut data, &shape, axis, synthesize_line);
    }
    GridSignal::from_values(shape, data).expect("same length")
}

/// Replace each axis line of coefficients by interval means: slot `(j, k)`
/// of the output holds the mean of the (line's) function over that interval.
/// Slot 0 is set to the mean over the whole circle.
pub(crate) fn means_line(line: &mut [f64]) {
    let dim = line.len();
    let depth = dim.trailing_zeros() as usize;
    let mut out = vec![0.0; dim];
    out[0] = line[0];
    if depth > 0 {
        out[1] = line[0]; // mean over [0,1) is the mean coefficient
        for j in 0..depth - 1 {
            // Children of level-j intervals: slot 2^j + k splits into
            // 2^{j+1} + 2k (left) and 2^{j+1} + 2k + 1 (right).
            let scale = 2f64.powi(j as i32).sqrt();
            for k in 0..(1usize << j) {
                let parent_mean = out[(1usize << j) + k];
                let d = line[(1usize << j) + k] * scale;
                out[(1usize << (j + 1)) + 2 * k] = parent_mean - d;
                out[(1usize << (j + 1)) + 2 * k + 1] = parent_mean + d;
            }
        }
    }
    line.copy_from_slice(&out);
}

/// Adjoint of `means_line`: spread weights sitting on interval slots into
/// Haar coefficients of `sum_I w_I χ_I / |I|`. Slot 0 of the input is
/// ignored (weights live on intervals only).
pub(crate) fn spread_line(line: &mut [f64]) {
    let dim = line.len();
    let depth = dim.trailing_zeros() as usize;
    // Subtree sums S(j,k) = sum of weights on intervals inside (j,k).
    let mut subtree = vec![0.0; dim];
    if depth > 0 {
        for k in 0..(1usize << (depth - 1)) {
            subtree[(1usize << (depth - 1)) + k] = line[(1usize << (depth - 1)) + k];
        }
        for j in (0..depth - 1).rev() {
            for k in 0..(1usize << j) {
                subtree[(1usize << j) + k] = line[(1usize << j) + k]
                    + subtree[(1usize << (j + 1)) + 2 * k]
                    + subtree[(1usize << (j + 1)) + 2 * k + 1];
            }
        }
    }
    let mut out = vec![0.0; dim];
    out[0] = if depth > 0 { subtree[1] } else { 0.0 };
    for j in 0..depth {
        let scale = 2f64.powi(j as i32).sqrt();
        for k in 0..(1usize << j) {
            // χ_I/|I| has Haar coefficient h_{I'}(I) at strict ancestors I'
            // and mean coefficient 1; the slot (j,k) collects those
            // contributions from the weights strictly inside it.
            let (left, right) = if j + 1 < depth {
                (
                    subtree[(1usize << (j + 1)) + 2 * k],
                    subtree[(1usize << (j + 1)) + 2 * k + 1],
                )
            } else {
                (0.0, 0.0)
            };
            out[(1usize << j) + k] = scale * (right - left);
        }
    }
    line.copy_from_slice(&out);
}
