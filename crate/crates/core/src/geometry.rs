//! Dyadic geometry on the torus: intervals, rectangles, grid shapes and
//! open sets (unions of finest cells).
//!
//! The circle is identified with `[0, 1)`. A dyadic interval of level `j`
//! has length `2^-j`; its right half carries the `+` sign of the Haar
//! function, the left half the `-` sign.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::ops::Range;

/// A dyadic interval `[k 2^-j, (k+1) 2^-j)` identified by `(level, offset)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct DyadicInterval {
    level: usize,
    offset: usize,
}

impl DyadicInterval {
    pub fn new(level: usize, offset: usize) -> Result<Self> {
        if level >= usize::BITS as usize - 1 || offset >= (1usize << level) {
            return Err(Error::InvalidInterval { level, offset });
        }
        Ok(Self { level, offset })
    }

    /// The whole circle `[0, 1)`.
    pub fn whole() -> Self {
        Self { level: 0, offset: 0 }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn len(&self) -> f64 {
        0.5f64.powi(self.level as i32)
    }

    pub fn left_end(&self) -> f64 {
        self.offset as f64 * self.len()
    }

    pub fn center(&self) -> f64 {
        (self.offset as f64 + 0.5) * self.len()
    }

    /// Left half (the `-` half of the Haar function).
    pub fn left_half(&self) -> Self {
        Self { level: self.level + 1, offset: 2 * self.offset }
    }

    /// Right half (the `+` half of the Haar function).
    pub fn right_half(&self) -> Self {
        Self { level: self.level + 1, offset: 2 * self.offset + 1 }
    }

    pub fn parent(&self) -> Option<Self> {
        if self.level == 0 {
            None
        } else {
            Some(Self { level: self.level - 1, offset: self.offset / 2 })
        }
    }

    /// True if `self` is contained in `other` (dyadic nesting).
    pub fn contained_in(&self, other: &Self) -> bool {
        self.level >= other.level && (self.offset >> (self.level - other.level)) == other.offset
    }

    /// Range of finest cells covered at depth `depth`.
    pub fn cell_range(&self, depth: usize) -> Result<Range<usize>> {
        if self.level > depth {
            return Err(Error::RectangleTooFine { level: self.level, depth });
        }
        let width = 1usize << (depth - self.level);
        Ok(self.offset * width..(self.offset + 1) * width)
    }

    /// Value of the Haar function `h` of this interval on the finest cell
    /// `cell` at depth `depth` (0 outside the interval).
    pub fn haar_value_on_cell(&self, cell: usize, depth: usize) -> f64 {
        debug_assert!(self.level < depth);
        let width = 1usize << (depth - self.level);
        if cell / width != self.offset {
            return 0.0;
        }
        let scale = 2f64.powi(self.level as i32).sqrt();
        // Right half positive per the sign convention.
        if cell % width >= width / 2 {
            scale
        } else {
            -scale
        }
    }

    /// All dyadic intervals with level in `0..=max_level`, in lexicographic
    /// `(level, offset)` order.
    pub fn enumerate(max_level: usize) -> Vec<Self> {
        let mut out = Vec::new();
        for level in 0..=max_level {
            for offset in 0..(1usize << level) {
                out.push(Self { level, offset });
            }
        }
        out
    }
}

/// A dyadic rectangle: one interval per parameter.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct DyadicRectangle {
    intervals: Vec<DyadicInterval>,
}

impl DyadicRectangle {
    pub fn new(intervals: Vec<DyadicInterval>) -> Self {
        Self { intervals }
    }

    /// The full torus `T^n`.
    pub fn whole(n_params: usize) -> Self {
        Self { intervals: vec![DyadicInterval::whole(); n_params] }
    }

    pub fn n_params(&self) -> usize {
        self.intervals.len()
    }

    pub fn interval(&self, axis: usize) -> &DyadicInterval {
        &self.intervals[axis]
    }

    pub fn intervals(&self) -> &[DyadicInterval] {
        &self.intervals
    }

    pub fn area(&self) -> f64 {
        self.intervals.iter().map(|i| i.len()).product()
    }

    pub fn contained_in(&self, other: &Self) -> bool {
        self.intervals
            .iter()
            .zip(&other.intervals)
            .all(|(a, b)| a.contained_in(b))
    }

    /// Lexicographic enumeration of all dyadic rectangles with per-axis
    /// levels in `0..=max_level[l]`.
    pub fn enumerate(max_levels: &[usize]) -> Vec<Self> {
        let per_axis: Vec<Vec<DyadicInterval>> =
            max_levels.iter().map(|&m| DyadicInterval::enumerate(m)).collect();
        let mut out = vec![Self { intervals: Vec::new() }];
        for axis_list in &per_axis {
            let mut next = Vec::with_capacity(out.len() * axis_list.len());
            for partial in &out {
                for iv in axis_list {
                    let mut ivs = partial.intervals.clone();
                    ivs.push(*iv);
                    next.push(Self { intervals: ivs });
                }
            }
            out = next;
        }
        out
    }
}

/// Grid shape: number of parameters and dyadic depth per axis.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Shape {
    depths: Vec<usize>,
}

impl Shape {
    pub fn new(depths: Vec<usize>) -> Result<Self> {
        if depths.is_empty() {
            return Err(Error::InvalidArgument("shape needs at least one axis".into()));
        }
        if depths.iter().any(|&d| d == 0 || d > 24) {
            return Err(Error::InvalidArgument("axis depth must be in 1..=24".into()));
        }
        Ok(Self { depths })
    }

    pub fn uniform(n_params: usize, depth: usize) -> Result<Self> {
        Self::new(vec![depth; n_params])
    }

    pub fn n_params(&self) -> usize {
        self.depths.len()
    }

    pub fn depth(&self, axis: usize) -> usize {
        self.depths[axis]
    }

    pub fn depths(&self) -> &[usize] {
        &self.depths
    }

    /// Number of cells (and coefficient slots) along `axis`.
    pub fn axis_dim(&self, axis: usize) -> usize {
        1usize << self.depths[axis]
    }

    /// Total number of finest cells.
    pub fn cells(&self) -> usize {
        self.depths.iter().map(|&d| 1usize << d).product()
    }

    /// Measure of one finest cell.
    pub fn cell_area(&self) -> f64 {
        1.0 / self.cells() as f64
    }

    /// Row-major strides (last axis fastest).
    pub fn strides(&self) -> Vec<usize> {
        let n = self.n_params();
        let mut strides = vec![1usize; n];
        for l in (0..n.saturating_sub(1)).rev() {
            strides[l] = strides[l + 1] * self.axis_dim(l + 1);
        }
        strides
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        let strides = self.strides();
        idx.iter().zip(&strides).map(|(i, s)| i * s).sum()
    }

    pub fn check_axis(&self, axis: usize) -> Result<()> {
        if axis >= self.n_params() {
            Err(Error::AxisOutOfRange { axis, n_params: self.n_params() })
        } else {
            Ok(())
        }
    }

    pub fn check_same(&self, other: &Shape) -> Result<()> {
        if self != other {
            Err(Error::ShapeMismatch(format!("{:?} vs {:?}", self.depths, other.depths)))
        } else {
            Ok(())
        }
    }

    /// Multi-index of a flat cell index.
    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let strides = self.strides();
        let mut idx = vec![0usize; self.n_params()];
        for (l, s) in strides.iter().enumerate() {
            idx[l] = flat / s;
            flat %= s;
        }
        idx
    }
}

/// An open set: a union of finest-depth cells, stored as a bit set.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct OpenSet {
    shape: Shape,
    bits: Vec<u64>,
}

impl OpenSet {
    pub fn empty(shape: Shape) -> Self {
        let words = shape.cells().div_ceil(64);
        Self { shape, bits: vec![0; words] }
    }

    pub fn full(shape: Shape) -> Self {
        let mut s = Self::empty(shape);
        for c in 0..s.shape.cells() {
            s.insert(c);
        }
        s
    }

    pub fn from_cells(shape: Shape, cells: &[usize]) -> Self {
        let mut s = Self::empty(shape);
        for &c in cells {
            s.insert(c);
        }
        s
    }

    /// All cells covered by a dyadic rectangle.
    pub fn from_rectangle(shape: Shape, rect: &DyadicRectangle) -> Result<Self> {
        let cells = rect_cells(&shape, rect)?;
        Ok(Self::from_cells(shape, &cells))
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn insert(&mut self, cell: usize) {
        self.bits[cell / 64] |= 1 << (cell % 64);
    }

    pub fn contains_cell(&self, cell: usize) -> bool {
        self.bits[cell / 64] >> (cell % 64) & 1 == 1
    }

    pub fn cell_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Lebesgue measure.
    pub fn measure(&self) -> f64 {
        self.cell_count() as f64 * self.shape.cell_area()
    }

    /// True when every cell of the rectangle lies in the set.
    pub fn contains_rectangle(&self, rect: &DyadicRectangle) -> Result<bool> {
        let cells = rect_cells(&self.shape, rect)?;
        Ok(cells.iter().all(|&c| self.contains_cell(c)))
    }

    pub fn cells(&self) -> Vec<usize> {
        (0..self.shape.cells()).filter(|&c| self.contains_cell(c)).collect()
    }

    /// Smallest dyadic rectangle containing the set (the full torus for the
    /// empty set).
    pub fn enclosing_rectangle(&self) -> DyadicRectangle {
        let n = self.shape.n_params();
        let cells = self.cells();
        if cells.is_empty() {
            return DyadicRectangle::whole(n);
        }
        let mut intervals = Vec::with_capacity(n);
        for axis in 0..n {
            let depth = self.shape.depth(axis);
            let coords: Vec<usize> =
                cells.iter().map(|&c| self.shape.unflatten(c)[axis]).collect();
            // Walk up from finest level until one interval covers every cell.
            let mut level = depth;
            let mut offset = coords[0];
            while coords.iter().any(|&k| k >> (depth - level) != offset) {
                level -= 1;
                offset = coords[0] >> (depth - level);
            }
            intervals.push(DyadicInterval::new(level, offset).expect("valid by construction"));
        }
        DyadicRectangle::new(intervals)
    }
}

/// Flat indices of all finest cells covered by `rect`.
pub fn rect_cells(shape: &Shape, rect: &DyadicRectangle) -> Result<Vec<usize>> {
    if rect.n_params() != shape.n_params() {
        return Err(Error::ShapeMismatch(format!(
            "rectangle has {} axes, grid has {}",
            rect.n_params(),
            shape.n_params()
        )));
    }
    let ranges: Vec<Range<usize>> = rect
        .intervals()
        .iter()
        .enumerate()
        .map(|(l, iv)| iv.cell_range(shape.depth(l)))
        .collect::<Result<_>>()?;
    let strides = shape.strides();
    let mut cells = vec![0usize];
    for (l, range) in ranges.iter().enumerate() {
        let mut next = Vec::with_capacity(cells.len() * range.len());
        for &base in &cells {
            for k in range.clone() {
                next.push(base + k * strides[l]);
            }
        }
        cells = next;
    }
    Ok(cells)
}
