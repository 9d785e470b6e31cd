//! Piecewise-constant signals on the dyadic cell grid of the torus.

use crate::error::{Error, Result};
use crate::geometry::{rect_cells, DyadicInterval, DyadicRectangle, Shape};
use serde::{Deserialize, Serialize};

/// A function on `T^n`, constant on each finest cell, stored row-major.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct GridSignal {
    shape: Shape,
    values: Vec<f64>,
}

impl GridSignal {
    pub fn zeros(shape: Shape) -> Self {
        let n = shape.cells();
        Self { shape, values: vec![0.0; n] }
    }

    pub fn constant(shape: Shape, value: f64) -> Self {
        let n = shape.cells();
        Self { shape, values: vec![value; n] }
    }

    pub fn from_values(shape: Shape, values: Vec<f64>) -> Result<Self> {
        if values.len() != shape.cells() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a grid of {} cells",
                values.len(),
                shape.cells()
            )));
        }
        Ok(Self { shape, values })
    }

    /// Sample a function of the cell-center coordinates.
    pub fn sample(shape: Shape, f: impl Fn(&[f64]) -> f64) -> Self {
        let cells = shape.cells();
        let mut values = Vec::with_capacity(cells);
        for c in 0..cells {
            let idx = shape.unflatten(c);
            let coords: Vec<f64> = idx
                .iter()
                .enumerate()
                .map(|(l, &k)| (k as f64 + 0.5) / shape.axis_dim(l) as f64)
                .collect();
            values.push(f(&coords));
        }
        Self { shape, values }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Integral over the torus (each cell has equal measure).
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.shape.cell_area()
    }

    /// Squared L2 norm by quadrature.
    pub fn l2_norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() * self.shape.cell_area()
    }

    /// L2 inner product by quadrature.
    pub fn inner(&self, other: &GridSignal) -> Result<f64> {
        self.shape.check_same(&other.shape)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * self.shape.cell_area())
    }

    pub fn scale(&self, c: f64) -> GridSignal {
        let values = self.values.iter().map(|v| c * v).collect();
        Self { shape: self.shape.clone(), values }
    }

    pub fn add(&self, other: &GridSignal) -> Result<GridSignal> {
        self.shape.check_same(&other.shape)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Self { shape: self.shape.clone(), values })
    }

    pub fn sub(&self, other: &GridSignal) -> Result<GridSignal> {
        self.shape.check_same(&other.shape)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Self { shape: self.shape.clone(), values })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Cellwise product of two signals of the same shape.
pub fn pointwise_product(a: &GridSignal, b: &GridSignal) -> Result<GridSignal> {
    a.shape().check_same(b.shape())?;
    let values = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| x * y)
        .collect();
    GridSignal::from_values(a.shape().clone(), values)
}

/// Mean of `sig` over the dyadic rectangle `R`: `(1/|R|) ∫_R f`.
pub fn rect_mean(sig: &GridSignal, rect: &DyadicRectangle) -> Result<f64> {
    let cells = rect_cells(sig.shape(), rect)?;
    let sum: f64 = cells.iter().map(|&c| sig.values()[c]).sum();
    Ok(sum / cells.len() as f64)
}

/// Average `sig` over a rectangle `Q` living on a proper, nonempty subset of
/// axes. The result is a signal on the remaining axes (kept in their
/// original order).
pub fn partial_mean(
    sig: &GridSignal,
    axes: &[usize],
    intervals: &[DyadicInterval],
) -> Result<GridSignal> {
    let n = sig.shape().n_params();
    if axes.is_empty() || axes.len() >= n {
        return Err(Error::InvalidAxisSubset(format!(
            "subset of size {} for {} axes must be nonempty and proper",
            axes.len(),
            n
        )));
    }
    if axes.len() != intervals.len() {
        return Err(Error::InvalidAxisSubset("one interval per averaged axis".into()));
    }
    let mut seen = vec![false; n];
    for &a in axes {
        sig.shape().check_axis(a)?;
        if seen[a] {
            return Err(Error::RepeatedAxis(a));
        }
        seen[a] = true;
    }
    let ranges: Vec<std::ops::Range<usize>> = axes
        .iter()
        .zip(intervals)
        .map(|(&a, iv)| iv.cell_range(sig.shape().depth(a)))
        .collect::<Result<_>>()?;

    let kept: Vec<usize> = (0..n).filter(|l| !seen[*l]).collect();
    let out_shape = Shape::new(kept.iter().map(|&l| sig.shape().depth(l)).collect())?;
    let mut out = GridSignal::zeros(out_shape.clone());
    let count: usize = ranges.iter().map(|r| r.len()).product();

    let in_strides = sig.shape().strides();
    let out_cells = out_shape.cells();
    for oc in 0..out_cells {
        let oidx = out_shape.unflatten(oc);
        // Base flat index with averaged axes at zero.
        let base: usize = kept
            .iter()
            .zip(&oidx)
            .map(|(&l, &k)| k * in_strides[l])
            .sum();
        // Sum over the averaged block.
        let mut offsets = vec![0usize]; // flat offsets of the averaged axes
        for (&a, range) in axes.iter().zip(&ranges) {
            let mut next = Vec::with_capacity(offsets.len() * range.len());
            for &o in &offsets {
                for k in range.clone() {
                    next.push(o + k * in_strides[a]);
                }
            }
            offsets = next;
        }
        let sum: f64 = offsets.iter().map(|&o| sig.values()[base + o]).sum();
        out.values_mut()[oc] = sum / count as f64;
    }
    Ok(out)
}

/// Embed a signal living on a subset of axes back into the full shape by
/// broadcasting along the remaining axes.
pub fn broadcast(
    sub: &GridSignal,
    full: &Shape,
    kept_axes: &[usize],
) -> Result<GridSignal> {
    if kept_axes.len() != sub.shape().n_params() {
        return Err(Error::InvalidAxisSubset("kept axis list must match sub-signal".into()));
    }
    let mut out = GridSignal::zeros(full.clone());
    for c in 0..full.cells() {
        let idx = full.unflatten(c);
        let sub_idx: Vec<usize> = kept_axes.iter().map(|&l| idx[l]).collect();
        out.values_mut()[c] = sub.values()[sub.shape().flat_index(&sub_idx)];
    }
    Ok(out)
}
