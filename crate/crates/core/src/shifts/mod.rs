//! Dyadic shift operators and iterated commutators with multiplication.

mod closed_form;
mod grid;
mod logtest;

pub use closed_form::{
    closed_form_reading_errors, commutator_closed_form_error, ClosedFormReadings,
};
pub use grid::{
    monte_carlo_shift_average, sample_axis_spec, AxisGridSpec, ShiftAverageOutput, ShiftedGrid,
};
pub use logtest::{log_test_1d, log_test_rect};

use crate::error::{Error, Result};
use crate::expansion::{for_each_line, haar_forward, haar_inverse, HaarExpansion};
use crate::signal::pointwise_product;

/// Output of a shift or commutator together with the truncation marker:
/// `true` when a finest-level coefficient was annihilated.
#[derive(Clone, Debug)]
pub struct CommutatorResult {
    pub output: HaarExpansion,
    pub truncated: bool,
}

/// The dyadic shift along one axis: the wavelet of `I` maps to the wavelet
/// of the right half minus the wavelet of the left half. Constant
/// directions map to zero; content at the finest representable level is
/// annihilated and flagged.
pub fn shift(exp: &HaarExpansion, axis: usize) -> Result<CommutatorResult> {
    exp.shape().check_axis(axis)?;
    let shape = exp.shape().clone();
    let mut data = exp.coeffs().to_vec();
    let mut truncated = false;
    for_each_line(&mut data, &shape, axis, |line| {
        let depth = line.len().trailing_zeros() as usize;
        let mut out = vec![0.0; line.len()];
        for j in 0..depth {
            for k in 0..(1usize << j) {
                let c = line[(1 << j) + k];
                if c == 0.0 {
                    continue;
                }
                if j + 1 < depth {
                    out[(1 << (j + 1)) + 2 * k + 1] += c; // right half, positive
                    out[(1 << (j + 1)) + 2 * k] -= c; // left half, negative
                } else {
                    truncated = true;
                }
            }
        }
        line.copy_from_slice(&out);
    });
    Ok(CommutatorResult { output: HaarExpansion::from_coeffs(shape, data)?, truncated })
}

/// A linear operator on expansions that can report truncation.
pub trait ExpansionOp {
    fn apply_op(&self, x: &HaarExpansion) -> Result<CommutatorResult>;
}

/// Multiplication by a fixed symbol, computed exactly on the grid.
pub struct Multiplier {
    symbol_signal: crate::signal::GridSignal,
}

impl Multiplier {
    pub fn new(symbol: &HaarExpansion) -> Self {
        Self { symbol_signal: haar_inverse(symbol) }
    }
}

impl ExpansionOp for Multiplier {
    fn apply_op(&self, x: &HaarExpansion) -> Result<CommutatorResult> {
        let prod = pointwise_product(&self.symbol_signal, &haar_inverse(x))?;
        Ok(CommutatorResult { output: haar_forward(&prod), truncated: false })
    }
}

/// `[S_axis, inner]`: the commutator of the shift with another operator.
pub struct ShiftCommutator<'a> {
    inner: &'a dyn ExpansionOp,
    axis: usize,
}

impl<'a> ShiftCommutator<'a> {
    pub fn new(inner: &'a dyn ExpansionOp, axis: usize) -> Self {
        Self { inner, axis }
    }
}

impl ExpansionOp for ShiftCommutator<'_> {
    fn apply_op(&self, x: &HaarExpansion) -> Result<CommutatorResult> {
        let tx = self.inner.apply_op(x)?;
        let s_tx = shift(&tx.output, self.axis)?;
        let sx = shift(x, self.axis)?;
        let t_sx = self.inner.apply_op(&sx.output)?;
        let output = s_tx.output.sub(&t_sx.output)?;
        Ok(CommutatorResult {
            output,
            truncated: tx.truncated || s_tx.truncated || sx.truncated || t_sx.truncated,
        })
    }
}

/// Nest shift commutators around an operator: axes `[a1, a2, …, am]` give
/// `[S_{a1}, [S_{a2}, [… [S_{am}, op] …]]]` applied to `input`.
pub fn nested_commutator(
    op: &dyn ExpansionOp,
    axes: &[usize],
    input: &HaarExpansion,
) -> Result<CommutatorResult> {
    let mut seen = std::collections::BTreeSet::new();
    for &a in axes {
        input.shape().check_axis(a)?;
        if !seen.insert(a) {
            return Err(Error::RepeatedAxis(a));
        }
    }
    fn recurse(
        op: &dyn ExpansionOp,
        axes: &[usize],
        input: &HaarExpansion,
    ) -> Result<CommutatorResult> {
        match axes.split_first() {
            None => op.apply_op(input),
            Some((&first, rest)) => {
                // [S_first, C] x = S(C x) - C(S x), with C the nested rest.
                let cx = recurse(op, rest, input)?;
                let s_cx = shift(&cx.output, first)?;
                let sx = shift(input, first)?;
                let c_sx = recurse(op, rest, &sx.output)?;
                Ok(CommutatorResult {
                    output: s_cx.output.sub(&c_sx.output)?,
                    truncated: cx.truncated || s_cx.truncated || sx.truncated || c_sx.truncated,
                })
            }
        }
    }
    recurse(op, axes, input)
}

/// The literal iterated commutator of the shifts with multiplication by
/// `symbol`, applied to `input`.
pub fn iterated_commutator(
    symbol: &HaarExpansion,
    input: &HaarExpansion,
    axes: &[usize],
) -> Result<CommutatorResult> {
    symbol.shape().check_same(input.shape())?;
    let mult = Multiplier::new(symbol);
    nested_commutator(&mult, axes, input)
}
