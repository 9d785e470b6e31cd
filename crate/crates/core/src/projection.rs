//! Martingale projection operators acting coefficientwise on expansions.
//!
//! All of these are index filters: a coefficient survives when its per-axis
//! levels satisfy the filter, with the mean direction counted strictly below
//! level 0.

use crate::error::{Error, Result};
use crate::expansion::{AxisIndex, HaarExpansion};
use crate::geometry::{DyadicInterval, OpenSet};
use crate::signal::GridSignal;

fn check_generations(exp: &HaarExpansion, gens: &[usize]) -> Result<()> {
    if gens.len() != exp.shape().n_params() {
        return Err(Error::ShapeMismatch("one generation index per axis".into()));
    }
    for (l, &j) in gens.iter().enumerate() {
        if j > exp.shape().depth(l) {
            return Err(Error::LevelOutOfRange { level: j, depth: exp.shape().depth(l) });
        }
    }
    Ok(())
}

fn filter(exp: &HaarExpansion, keep: impl Fn(&[AxisIndex]) -> bool) -> HaarExpansion {
    let mut out = HaarExpansion::zeros(exp.shape().clone());
    for (flat, &c) in exp.coeffs().iter().enumerate() {
        if c != 0.0 && keep(&exp.axis_indices(flat)) {
            out.coeffs_mut()[flat] = c;
        }
    }
    out
}

impl HaarExpansion {
    /// Keep exactly the pure coefficients whose axis levels equal `gens`.
    pub fn generation_block(&self, gens: &[usize]) -> Result<HaarExpansion> {
        check_generations(self, gens)?;
        Ok(filter(self, |idx| {
            idx.iter().zip(gens).all(|(ix, &j)| ix.level() == Some(j))
        }))
    }

    /// Conditional expectation onto generations strictly below `gens` on
    /// every axis; the mean direction counts as below every level.
    pub fn expectation(&self, gens: &[usize]) -> Result<HaarExpansion> {
        check_generations(self, gens)?;
        Ok(filter(self, |idx| {
            idx.iter()
                .zip(gens)
                .all(|(ix, &j)| ix.level().is_none_or(|lvl| lvl < j))
        }))
    }

    /// Tail projection: keep pure coefficients with level at least `gens[l]`
    /// on every axis (mean directions are dropped).
    pub fn tail(&self, gens: &[usize]) -> Result<HaarExpansion> {
        check_generations(self, gens)?;
        Ok(filter(self, |idx| {
            idx.iter()
                .zip(gens)
                .all(|(ix, &j)| ix.level().is_some_and(|lvl| lvl >= j))
        }))
    }

    /// Expectation filtering only on `axis`: keep coefficients whose level
    /// on that axis is below `k` (mean counts as below).
    pub fn axis_expectation(&self, axis: usize, k: usize) -> Result<HaarExpansion> {
        self.shape().check_axis(axis)?;
        if k > self.shape().depth(axis) {
            return Err(Error::LevelOutOfRange { level: k, depth: self.shape().depth(axis) });
        }
        Ok(filter(self, |idx| idx[axis].level().is_none_or(|lvl| lvl < k)))
    }

    /// Tail filtering only on `axis`: keep coefficients whose level on that
    /// axis is an interval of level at least `k`.
    pub fn axis_tail(&self, axis: usize, k: usize) -> Result<HaarExpansion> {
        self.shape().check_axis(axis)?;
        if k > self.shape().depth(axis) {
            return Err(Error::LevelOutOfRange { level: k, depth: self.shape().depth(axis) });
        }
        Ok(filter(self, |idx| idx[axis].level().is_some_and(|lvl| lvl >= k)))
    }

    /// Keep coefficients whose level on `axis` lies in `lo..=hi` (empty
    /// band gives the zero expansion).
    pub fn axis_band(&self, axis: usize, lo: usize, hi: usize) -> Result<HaarExpansion> {
        self.shape().check_axis(axis)?;
        Ok(filter(self, |idx| {
            idx[axis].level().is_some_and(|lvl| lvl >= lo && lvl <= hi)
        }))
    }

    /// Orthogonal projection onto Haar functions of rectangles contained in
    /// the open set; every mean-bearing coefficient is dropped.
    pub fn project_open_set(&self, omega: &OpenSet) -> Result<HaarExpansion> {
        self.shape().check_same(omega.shape())?;
        let mut out = HaarExpansion::zeros(self.shape().clone());
        for (flat, &c) in self.coeffs().iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            if let Some(rect) = self.rectangle_of(flat) {
                if omega.contains_rectangle(&rect)? {
                    out.coeffs_mut()[flat] = c;
                }
            }
        }
        Ok(out)
    }

    /// Partial projection: on each listed axis keep only interval indices
    /// contained in the given interval (mean directions on those axes are
    /// dropped); other axes pass through untouched.
    pub fn project_rect_axes(
        &self,
        axes: &[usize],
        intervals: &[DyadicInterval],
    ) -> Result<HaarExpansion> {
        if axes.len() != intervals.len() {
            return Err(Error::InvalidAxisSubset("one interval per projected axis".into()));
        }
        for &a in axes {
            self.shape().check_axis(a)?;
        }
        Ok(filter(self, |idx| {
            axes.iter().zip(intervals).all(|(&a, iv)| match idx[a] {
                AxisIndex::Mean => false,
                AxisIndex::Interval(own) => own.contained_in(iv),
            })
        }))
    }

    /// The dyadic square function `(Σ_R (χ_R/|R|) |f_R|^2)^{1/2}` over pure
    /// rectangle coefficients, as a grid signal.
    pub fn square_function(&self) -> GridSignal {
        let shape = self.shape().clone();
        let mut acc = vec![0.0f64; shape.cells()];
        for flat in self.pure_slots() {
            let c = self.coeffs()[flat];
            if c == 0.0 {
                continue;
            }
            let rect = self.rectangle_of(flat).expect("pure slot");
            let weight = c * c / rect.area();
            for cell in crate::geometry::rect_cells(&shape, &rect).expect("representable") {
                acc[cell] += weight;
            }
        }
        for v in &mut acc {
            *v = v.sqrt();
        }
        GridSignal::from_values(shape, acc).expect("same length")
    }

    /// Projection onto pure-rectangle coefficients (drops every
    /// mean-bearing slot). Equals `tail(&[0; n])`.
    pub fn pure_part(&self) -> HaarExpansion {
        filter(self, |idx| idx.iter().all(|ix| ix.level().is_some()))
    }
}
