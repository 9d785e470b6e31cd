//! The bilinear Haar-pairing family and all paraproducts derived from it.
//!
//! A sign pattern `(ε, δ, β)` selects, per axis, how the symbol is paired
//! (`ε = 0` Haar detail, `ε = 1` normalized-indicator mean), how the input
//! is paired (`δ`), and which factor the output carries (`β = 0` the Haar
//! wavelet, `β = 1` the normalized indicator `χ_I/|I|`). Summing the
//! product of pairings over all pure rectangles gives every operator in
//! this family: the main paraproduct, its diagonal adjoint, the mixed
//! paraproducts and the averaged terms of the product decomposition.

mod cotlar;
mod nine;
mod partition;
mod sigma;

pub use cotlar::{cotlar_band, cotlar_band_count, cotlar_block_apply};
pub use nine::{mean_channel_correction, nine_terms, product_reconstruction, NineTerm};
pub use partition::{partition_paraproduct, PartitionSpec};
pub use sigma::level_compress;

use crate::error::{Error, Result};
use crate::expansion::{for_each_line, HaarExpansion};
use serde::{Deserialize, Serialize};

/// Per-axis pairing pattern of a trilinear Haar form.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SignSpec {
    pub eps: Vec<bool>,
    pub delta: Vec<bool>,
    pub beta: Vec<bool>,
}

impl SignSpec {
    pub fn new(eps: Vec<bool>, delta: Vec<bool>, beta: Vec<bool>) -> Result<Self> {
        if eps.len() != delta.len() || delta.len() != beta.len() {
            return Err(Error::ShapeMismatch("sign vectors must share length".into()));
        }
        Ok(Self { eps, delta, beta })
    }

    pub fn n_params(&self) -> usize {
        self.eps.len()
    }

    /// The admissible paraproduct family: symbol paired by detail on every
    /// axis and `δ = 1 - β`.
    pub fn is_admissible_paraproduct(&self) -> bool {
        self.eps.iter().all(|&e| !e)
            && self.delta.iter().zip(&self.beta).all(|(&d, &b)| d != b)
    }

    /// Adjoint pattern: the input and output pairings swap.
    pub fn adjoint(&self) -> SignSpec {
        SignSpec { eps: self.eps.clone(), delta: self.beta.clone(), beta: self.delta.clone() }
    }

    /// The admissible pattern `Π^β` with `δ = 1 - β` and `ε = 0`.
    pub fn for_beta(beta: &[bool]) -> SignSpec {
        SignSpec {
            eps: vec![false; beta.len()],
            delta: beta.iter().map(|&b| !b).collect(),
            beta: beta.to_vec(),
        }
    }
}

/// Replace coefficients by interval means along every axis with `flag[l]`
/// set (mean-pairing transform of the bilinear family).
fn means_along(exp: &HaarExpansion, flags: &[bool]) -> Vec<f64> {
    let shape = exp.shape();
    let mut data = exp.coeffs().to_vec();
    for (axis, &on) in flags.iter().enumerate() {
        if on {
            for_each_line(&mut data, shape, axis, crate::expansion::means_line);
        }
    }
    data
}

/// Apply `B_{ε,δ,β}(symbol, input)`: pair the symbol with `h^ε`, the input
/// with `h^δ`, and emit `h^β` over every pure rectangle.
pub fn bilinear_apply(
    spec: &SignSpec,
    symbol: &HaarExpansion,
    input: &HaarExpansion,
) -> Result<HaarExpansion> {
    symbol.shape().check_same(input.shape())?;
    if spec.n_params() != symbol.shape().n_params() {
        return Err(Error::ShapeMismatch(format!(
            "sign vectors of length {} for {} parameters",
            spec.n_params(),
            symbol.shape().n_params()
        )));
    }
    let shape = symbol.shape().clone();
    let t_sym = means_along(symbol, &spec.eps);
    let t_in = means_along(input, &spec.delta);

    // Pointwise product over pure slots only; mean-bearing slots carry no
    // rectangle term.
    let mut prod = vec![0.0f64; shape.cells()];
    for flat in 0..prod.len() {
        if symbol.is_pure(flat) {
            prod[flat] = t_sym[flat] * t_in[flat];
        }
    }

    // Spread the β-axes into indicator expansions.
    for (axis, &on) in spec.beta.iter().enumerate() {
        if on {
            for_each_line(&mut prod, &shape, axis, crate::expansion::spread_line);
        }
    }
    HaarExpansion::from_coeffs(shape, prod)
}

/// The main paraproduct: coefficient at `R` is `symbol_R · m_R(input)`.
pub fn paraproduct(symbol: &HaarExpansion, input: &HaarExpansion) -> Result<HaarExpansion> {
    let n = symbol.shape().n_params();
    bilinear_apply(&SignSpec::for_beta(&vec![false; n]), symbol, input)
}

/// The diagonal paraproduct `Σ_R (χ_R/|R|) symbol_R input_R`, the adjoint
/// of the main paraproduct.
pub fn diagonal_paraproduct(
    symbol: &HaarExpansion,
    input: &HaarExpansion,
) -> Result<HaarExpansion> {
    let n = symbol.shape().n_params();
    bilinear_apply(&SignSpec::for_beta(&vec![true; n]), symbol, input)
}

/// The mixed paraproduct `Π^β` for an arbitrary 0/1 output pattern.
pub fn mixed_paraproduct(
    symbol: &HaarExpansion,
    input: &HaarExpansion,
    beta: &[bool],
) -> Result<HaarExpansion> {
    if beta.len() != symbol.shape().n_params() {
        return Err(Error::ShapeMismatch("one output flag per axis".into()));
    }
    bilinear_apply(&SignSpec::for_beta(beta), symbol, input)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::{haar_forward, haar_inverse, AxisIndex};
    use crate::geometry::{rect_cells, DyadicInterval, DyadicRectangle, Shape};
    use crate::rng::{derive_rng, random_expansion};
    use crate::signal::GridSignal;

    /// Quadrature oracle: evaluate `B_{ε,δ,β}` by sampling every factor on
    /// the grid and summing over rectangles directly.
    fn bilinear_oracle(
        spec: &SignSpec,
        symbol: &HaarExpansion,
        input: &HaarExpansion,
    ) -> GridSignal {
        let shape = symbol.shape().clone();
        let sym_sig = haar_inverse(symbol);
        let in_sig = haar_inverse(input);
        let mut out = GridSignal::zeros(shape.clone());
        let sub_levels: Vec<usize> = shape.depths().iter().map(|&d| d - 1).collect();
        for rect in DyadicRectangle::enumerate(&sub_levels) {
            let pair = |sig: &GridSignal, flags: &[bool]| -> f64 {
                // <f, h^pattern_R> by direct quadrature.
                let mut acc = 0.0;
                for c in 0..shape.cells() {
                    let idx = shape.unflatten(c);
                    let mut w = 1.0;
                    for (l, iv) in rect.intervals().iter().enumerate() {
                        let cell = idx[l];
                        w *= if flags[l] {
                            // χ_I/|I| factor.
                            let range = iv.cell_range(shape.depth(l)).unwrap();
                            if range.contains(&cell) {
                                1.0 / iv.len()
                            } else {
                                0.0
                            }
                        } else {
                            iv.haar_value_on_cell(cell, shape.depth(l))
                        };
                    }
                    acc += w * sig.values()[c];
                }
                acc * shape.cell_area()
            };
            let a = pair(&sym_sig, &spec.eps);
            let b = pair(&in_sig, &spec.delta);
            if a == 0.0 || b == 0.0 {
                continue;
            }
            // Accumulate a · b · h^β_R on the grid.
            for c in 0..shape.cells() {
                let idx = shape.unflatten(c);
                let mut w = 1.0;
                for (l, iv) in rect.intervals().iter().enumerate() {
                    let cell = idx[l];
                    w *= if spec.beta[l] {
                        let range = iv.cell_range(shape.depth(l)).unwrap();
                        if range.contains(&cell) {
                            1.0 / iv.len()
                        } else {
                            0.0
                        }
                    } else {
                        iv.haar_value_on_cell(cell, shape.depth(l))
                    };
                }
                out.values_mut()[c] += a * b * w;
            }
        }
        out
    }

    #[test]
    fn main_paraproduct_of_constant_is_pure_part() {
        let shape = Shape::uniform(2, 2).unwrap();
        let mut rng = derive_rng(1, "para-const", 0);
        let phi = random_expansion(&shape, &mut rng, false);
        let one = haar_forward(&GridSignal::constant(shape, 1.0));
        let out = paraproduct(&phi, &one).unwrap();
        assert!(out.max_abs_diff(&phi.pure_part()) < 1e-13);
    }

    #[test]
    fn diagonal_case_single_wavelet_gives_indicator() {
        let shape = Shape::uniform(2, 2).unwrap();
        let r = DyadicRectangle::new(vec![
            DyadicInterval::new(1, 0).unwrap(),
            DyadicInterval::new(1, 1).unwrap(),
        ]);
        let h = HaarExpansion::unit_rectangle(shape.clone(), &r).unwrap();
        let out = haar_inverse(&diagonal_paraproduct(&h, &h).unwrap());
        let inside = rect_cells(&shape, &r).unwrap();
        for c in 0..shape.cells() {
            let expect = if inside.contains(&c) { 1.0 / r.area() } else { 0.0 };
            assert!((out.values()[c] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn bilinear_matches_quadrature_oracle_across_patterns() {
        let shape = Shape::uniform(2, 2).unwrap();
        let mut rng = derive_rng(2, "para-oracle", 0);
        let phi = random_expansion(&shape, &mut rng, false);
        let f = random_expansion(&shape, &mut rng, false);
        let mut specs = Vec::new();
        // The nine per-axis combinations of (symbol-detail, input-mean),
        // (both-detail, indicator out) and (symbol-mean, input-detail).
        let per_axis = [(false, true, false), (false, false, true), (true, false, false)];
        for a in per_axis {
            for b in per_axis {
                specs.push(SignSpec::new(vec![a.0, b.0], vec![a.1, b.1], vec![a.2, b.2]).unwrap());
            }
        }
        for beta in [[false, false], [false, true], [true, false], [true, true]] {
            specs.push(SignSpec::for_beta(&beta));
        }
        for spec in specs {
            let fast = haar_inverse(&bilinear_apply(&spec, &phi, &f).unwrap());
            let slow = bilinear_oracle(&spec, &phi, &f);
            assert!(
                fast.sub(&slow).unwrap().max_abs() < 1e-10,
                "pattern {:?} disagrees with quadrature oracle",
                spec
            );
        }
    }

    #[test]
    fn adjoint_pattern_is_true_adjoint() {
        let shape = Shape::uniform(2, 2).unwrap();
        let mut rng = derive_rng(3, "para-adjoint", 0);
        let phi = random_expansion(&shape, &mut rng, false);
        let f = random_expansion(&shape, &mut rng, false);
        let g = random_expansion(&shape, &mut rng, false);
        let spec = SignSpec::new(vec![false, true], vec![true, false], vec![false, false]).unwrap();
        let lhs = bilinear_apply(&spec, &phi, &f).unwrap().inner(&g).unwrap();
        let rhs = f.inner(&bilinear_apply(&spec.adjoint(), &phi, &g).unwrap()).unwrap();
        assert!((lhs - rhs).abs() < 1e-11);
    }

    #[test]
    fn main_and_diagonal_are_adjoint() {
        let shape = Shape::uniform(2, 3).unwrap();
        let mut rng = derive_rng(4, "para-main-adjoint", 0);
        let phi = random_expansion(&shape, &mut rng, false);
        let f = random_expansion(&shape, &mut rng, false);
        let g = random_expansion(&shape, &mut rng, false);
        let lhs = paraproduct(&phi, &f).unwrap().inner(&g).unwrap();
        let rhs = f.inner(&diagonal_paraproduct(&phi, &g).unwrap()).unwrap();
        assert!((lhs - rhs).abs() < 1e-11);
    }

    #[test]
    fn single_symbol_coefficient_paraproduct() {
        // Π with symbol h_R applied to f gives the single coefficient
        // h_R · m_R(f).
        let shape = Shape::uniform(2, 2).unwrap();
        let r = DyadicRectangle::new(vec![
            DyadicInterval::new(0, 0).unwrap(),
            DyadicInterval::new(1, 1).unwrap(),
        ]);
        let h = HaarExpansion::unit_rectangle(shape.clone(), &r).unwrap();
        let mut rng = derive_rng(5, "para-single", 0);
        let f = random_expansion(&shape, &mut rng, false);
        let out = paraproduct(&h, &f).unwrap();
        let mean = crate::signal::rect_mean(&haar_inverse(&f), &r).unwrap();
        let mut expect = HaarExpansion::zeros(shape);
        let flat = out
            .flat_of(&[
                AxisIndex::Interval(*r.interval(0)),
                AxisIndex::Interval(*r.interval(1)),
            ])
            .unwrap();
        expect.coeffs_mut()[flat] = mean;
        assert!(out.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn mixed_paraproduct_ignores_input_without_axis_detail() {
        // β = (1,0): the input pairs by detail on axis 0; a function of the
        // second variable alone has none.
        let shape = Shape::uniform(2, 2).unwrap();
        let mut rng = derive_rng(6, "para-mixed", 0);
        let phi = random_expansion(&shape, &mut rng, false);
        let f_sig = GridSignal::sample(shape.clone(), |x| (3.0 * x[1]).cos());
        let f = haar_forward(&f_sig);
        let out = mixed_paraproduct(&phi, &f, &[true, false]).unwrap();
        assert!(out.l2_norm_sq() < 1e-24);
    }

    #[test]
    fn mixed_matches_display_form() {
        // Independent evaluation of Σ (χ_Q/|Q|)(s) h_S(t) φ_R m_S(f_Q) for
        // β = (1,0) via explicit loops.
        let shape = Shape::uniform(2, 2).unwrap();
        let mut rng = derive_rng(7, "para-display", 0);
        let phi = random_expansion(&shape, &mut rng, false);
        let f = random_expansion(&shape, &mut rng, false);
        let fast = haar_inverse(&mixed_paraproduct(&phi, &f, &[true, false]).unwrap());

        let f_sig = haar_inverse(&f);
        let mut slow = GridSignal::zeros(shape.clone());
        for q in DyadicInterval::enumerate(1) {
            for s in DyadicInterval::enumerate(1) {
                let phi_c = phi
                    .get(&[AxisIndex::Interval(q), AxisIndex::Interval(s)])
                    .unwrap();
                if phi_c == 0.0 {
                    continue;
                }
                // f_Q as a function of t: Haar coefficient in axis 0.
                // m_S of it: mean over S in axis 1.
                let mut m_s_f_q = 0.0;
                for c in 0..shape.cells() {
                    let idx = shape.unflatten(c);
                    let hq = q.haar_value_on_cell(idx[0], 2);
                    let srange = s.cell_range(2).unwrap();
                    if srange.contains(&idx[1]) {
                        m_s_f_q += hq * f_sig.values()[c] / srange.len() as f64;
                    }
                }
                m_s_f_q *= 0.25; // cell measure along axis 0
                for c in 0..shape.cells() {
                    let idx = shape.unflatten(c);
                    let qrange = q.cell_range(2).unwrap();
                    let chi = if qrange.contains(&idx[0]) { 1.0 / q.len() } else { 0.0 };
                    let hs = s.haar_value_on_cell(idx[1], 2);
                    slow.values_mut()[c] += chi * hs * phi_c * m_s_f_q;
                }
            }
        }
        assert!(fast.sub(&slow).unwrap().max_abs() < 1e-11);
    }
}
