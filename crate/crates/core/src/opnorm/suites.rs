//! Numerical verification suites: the level-compression equality, the
//! bounded-ratio scans behind the composed-paraproduct estimates, the
//! almost-orthogonality decay of the block operators, and the mean-growth
//! inequalities.

use super::{
    cotlar_block_operator, l2_opnorm, paraproduct_expectation_operator, paraproduct_operator, PureBasis,
};
use crate::error::Result;
use crate::expansion::{haar_forward, haar_inverse};
use crate::geometry::{DyadicInterval, DyadicRectangle, Shape};
use crate::norms::{bmo_norm, lmo_axis_norm, lmo_norm, product_bmo_norm};
use crate::para::{cotlar_band_count, level_compress, mixed_paraproduct, paraproduct};
use crate::rng::{derive_rng, random_expansion, random_signal};
use crate::shifts::log_test_rect;
use crate::signal::{broadcast, partial_mean, rect_mean, GridSignal};
use serde::Serialize;

/// Zero the global-mean coefficient of a random signal so that the
/// oscillation seminorm controls every local mean.
fn mean_free_signal(shape: &Shape, seed: u64, index: u64) -> GridSignal {
    let mut rng = derive_rng(seed, "suite-signal", index);
    let sig = random_signal(shape, &mut rng);
    let mut exp = haar_forward(&sig);
    exp.coeffs_mut()[0] = 0.0;
    haar_inverse(&exp)
}

#[derive(Clone, Debug, Serialize)]
pub struct CoreLemmaRow {
    pub depth: usize,
    pub case: usize,
    pub axis: usize,
    pub level: usize,
    /// Relative deviation in the compression equality.
    pub sigma_rel_dev: f64,
    /// `‖Π(Π(φ,b), E_k·)‖ / ((k+1)·sqrt(pBMO(φ))·bmo(b))`.
    pub core_ratio: f64,
    /// Max over tail levels `j` of the same norm with the tail-projected
    /// symbol and the compensating factor `(k+1)/(j+1)`.
    pub tail_ratio: f64,
    /// Mixed-paraproduct variant of the core ratio.
    pub mixed_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoreLemmaReport {
    pub rows: Vec<CoreLemmaRow>,
    pub sigma_max_rel_dev: f64,
    pub core_fitted: f64,
    pub tail_fitted: f64,
    pub mixed_fitted: f64,
}

/// The compression equality and the bounded-ratio scans over random data.
pub fn core_lemma_suite(depth: usize, cases: usize, seed: u64) -> Result<CoreLemmaReport> {
    let shape = Shape::uniform(2, depth)?;
    let basis = PureBasis::new(&shape);
    let mut rows = Vec::new();
    for case in 0..cases {
        let mut rng = derive_rng(seed, "core-b", case as u64);
        let b = random_expansion(&shape, &mut rng, false);
        let mut rng = derive_rng(seed, "core-phi", case as u64);
        let phi = random_expansion(&shape, &mut rng, true);
        let b_sig = haar_inverse(&b);
        let bmo_b = bmo_norm(&b_sig).value + b_sig.integral().abs();
        let pbmo_phi = product_bmo_norm(&phi).value.sqrt();
        let g = paraproduct(&phi, &b)?;
        for axis in 0..2 {
            for k in 0..depth {
                // Equality: ‖Π_b E_k‖ = ‖Π_{σ_k b}‖ via exact matrix norms.
                let lhs_op = paraproduct_expectation_operator(&basis, &b, axis, k);
                let lhs = l2_opnorm(&lhs_op)?;
                let compressed = level_compress(&b, axis, k)?;
                let rhs_op = paraproduct_operator(&basis, &compressed);
                let rhs = l2_opnorm(&rhs_op)?;
                let sigma_rel_dev = (lhs - rhs).abs() / lhs.max(rhs).max(1e-12);

                // Bounded-ratio scans.
                let comp_op = paraproduct_expectation_operator(&basis, &g, axis, k);
                let comp_norm = l2_opnorm(&comp_op)?;
                let denom = (k + 1) as f64 * pbmo_phi * bmo_b;
                let core_ratio = if denom > 0.0 { comp_norm / denom } else { 0.0 };

                // Tail-projected symbols with the compensating factor,
                // scanned over every tail level.
                let lmo_phi = lmo_norm(&phi).value.sqrt();
                let mut tail_ratio = 0.0f64;
                for j in 0..depth {
                    let tail_phi = phi.axis_tail(axis, j)?;
                    let tail_g = paraproduct(&tail_phi, &b)?;
                    let tail_op = paraproduct_expectation_operator(&basis, &tail_g, axis, k);
                    let tail_norm = l2_opnorm(&tail_op)?;
                    let tail_denom = (k + 1) as f64 / (j + 1) as f64 * lmo_phi * bmo_b;
                    if tail_denom > 0.0 {
                        tail_ratio = tail_ratio.max(tail_norm / tail_denom);
                    }
                }

                // Mixed paraproduct inside the composition.
                let mixed_g = mixed_paraproduct(&phi, &b, &[axis == 0, axis == 1])?;
                let mixed_op = paraproduct_expectation_operator(&basis, &mixed_g, axis, k);
                let mixed_norm = l2_opnorm(&mixed_op)?;
                let mixed_ratio = if denom > 0.0 { mixed_norm / denom } else { 0.0 };

                rows.push(CoreLemmaRow {
                    depth,
                    case,
                    axis,
                    level: k,
                    sigma_rel_dev,
                    core_ratio,
                    tail_ratio,
                    mixed_ratio,
                });
            }
        }
    }
    let fold = |f: fn(&CoreLemmaRow) -> f64| rows.iter().map(f).fold(0.0f64, f64::max);
    Ok(CoreLemmaReport {
        sigma_max_rel_dev: fold(|r| r.sigma_rel_dev),
        core_fitted: fold(|r| r.core_ratio),
        tail_fitted: fold(|r| r.tail_ratio),
        mixed_fitted: fold(|r| r.mixed_ratio),
        rows,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CotlarDecayRow {
    pub depth: usize,
    pub case: usize,
    pub block_a: usize,
    pub block_b: usize,
    pub cross_norm: f64,
    /// `‖T_a* T_b‖ · 2^{|a-b|} / (lmo_axis(φ) · bmo(b)^2)`.
    pub envelope_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CotlarDecayReport {
    pub rows: Vec<CotlarDecayRow>,
    /// Fitted envelope constant per depth.
    pub fitted: Vec<(usize, f64)>,
    /// Max `‖T_a T_b*‖` over distinct blocks (exact orthogonality check).
    pub max_range_cross: f64,
}

/// Fit the almost-orthogonality envelope of the block operators.
pub fn cotlar_decay_suite(depths: &[usize], cases: usize, seed: u64) -> Result<CotlarDecayReport> {
    let mut rows = Vec::new();
    let mut fitted = Vec::new();
    let mut max_range_cross = 0.0f64;
    for &depth in depths {
        let shape = Shape::uniform(2, depth)?;
        let basis = PureBasis::new(&shape);
        let bands = cotlar_band_count(depth);
        let mut depth_fit = 0.0f64;
        for case in 0..cases {
            let mut rng = derive_rng(seed, "cotlar-phi", (depth * 1000 + case) as u64);
            let phi = random_expansion(&shape, &mut rng, true);
            let mut rng = derive_rng(seed, "cotlar-b", (depth * 1000 + case) as u64);
            let b = random_expansion(&shape, &mut rng, false);
            let b_sig = haar_inverse(&b);
            let bmo_b = bmo_norm(&b_sig).value + b_sig.integral().abs();
            let lmo_phi = lmo_axis_norm(&phi, 0)?.value;
            let scale = lmo_phi * bmo_b * bmo_b;
            if scale == 0.0 {
                continue;
            }
            let g = paraproduct(&phi, &b)?;
            let dim = basis.dim();
            let blocks: Vec<_> =
                (0..bands).map(|m| cotlar_block_operator(&basis, &g, m, 0).to_dense()).collect();
            for a in 0..bands {
                for bi in 0..bands {
                    if a != bi {
                        // Exact range orthogonality.
                        let prod = &blocks[a] * blocks[bi].transpose();
                        let cross = prod.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                        max_range_cross = max_range_cross.max(cross);
                    }
                    let prod = blocks[a].transpose() * &blocks[bi];
                    let op_norm = prod.svd(false, false).singular_values.max();
                    let gap = a.abs_diff(bi) as u32;
                    let ratio = op_norm * 2f64.powi(gap as i32) / scale;
                    depth_fit = depth_fit.max(ratio);
                    rows.push(CotlarDecayRow {
                        depth,
                        case,
                        block_a: a,
                        block_b: bi,
                        cross_norm: op_norm,
                        envelope_ratio: ratio,
                    });
                }
            }
            let _ = dim;
        }
        fitted.push((depth, depth_fit));
    }
    Ok(CotlarDecayReport { rows, fitted, max_range_cross })
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthRow {
    pub depth: usize,
    pub family: String,
    /// `|m_{I×R} b| / ((k+1)·bmo(b))` maximized over the scan.
    pub mean_ratio: f64,
    /// `‖χ_{I×R} b‖_2^2 / ((k+1)^2 |I×R| bmo(b)^2)`.
    pub restricted_l2_ratio: f64,
    /// `‖χ_R P_T b‖_2^2 / (|R||T| bmo(b)^2)`.
    pub partial_projection_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub rows: Vec<GrowthRow>,
    /// Per-depth fitted constants for the three inequalities.
    pub fitted: Vec<(usize, f64, f64, f64)>,
}

/// Scan the three mean-growth inequalities over random oscillation-
/// normalized signals and the log test family.
pub fn growth_suite(depths: &[usize], cases: usize, seed: u64) -> Result<GrowthReport> {
    let mut rows = Vec::new();
    let mut fitted = Vec::new();
    for &depth in depths {
        let shape = Shape::uniform(2, depth)?;
        let mut family: Vec<(String, GridSignal)> = Vec::new();
        for case in 0..cases {
            family.push((format!("random#{case}"), mean_free_signal(&shape, seed, case as u64)));
        }
        for rect in DyadicRectangle::enumerate(&[depth - 1, depth - 1]) {
            if rect.intervals().iter().all(|iv| iv.level() == 0) {
                continue; // constant test function, no oscillation
            }
            let desc = format!(
                "logRect{:?}",
                rect.intervals().iter().map(|iv| (iv.level(), iv.offset())).collect::<Vec<_>>()
            );
            family.push((desc, log_test_rect(&rect, &shape)?));
        }

        let (mut f1, mut f2, mut f3) = (0.0f64, 0.0f64, 0.0f64);
        for (desc, b) in &family {
            let bmo = bmo_norm(b).value;
            if bmo < 1e-12 {
                continue;
            }
            let exp = haar_forward(b);
            let mut mean_ratio = 0.0f64;
            let mut restricted = 0.0f64;
            let mut partial = 0.0f64;
            for axis in 0..2 {
                let other = 1 - axis;
                // Strip interval at level k on `axis` against every
                // interval on the other axis.
                for iv in DyadicInterval::enumerate(depth) {
                    let k = iv.level();
                    for jv in DyadicInterval::enumerate(depth) {
                        let mut ivs = vec![DyadicInterval::whole(); 2];
                        ivs[axis] = iv;
                        ivs[other] = jv;
                        let rect = DyadicRectangle::new(ivs);
                        let m = rect_mean(b, &rect)?;
                        mean_ratio = mean_ratio.max(m.abs() / ((k + 1) as f64 * bmo));
                        // Restricted L2 mass over the rectangle.
                        let cells = crate::geometry::rect_cells(&shape, &rect)?;
                        let mass: f64 = cells
                            .iter()
                            .map(|&c| b.values()[c] * b.values()[c])
                            .sum::<f64>()
                            * shape.cell_area();
                        restricted = restricted.max(
                            mass / (((k + 1) * (k + 1)) as f64 * rect.area() * bmo * bmo),
                        );
                    }
                }
                // Partial projection bound: project inside an interval of
                // the other variable once, then scan strips.
                for jv in DyadicInterval::enumerate(depth - 1) {
                    let projected = exp.project_rect_axes(&[other], &[jv])?;
                    let proj_sig = haar_inverse(&projected);
                    for iv in DyadicInterval::enumerate(depth) {
                        let mut ivs = vec![DyadicInterval::whole(); 2];
                        ivs[axis] = iv;
                        let strip = DyadicRectangle::new(ivs);
                        let cells = crate::geometry::rect_cells(&shape, &strip)?;
                        let mass: f64 = cells
                            .iter()
                            .map(|&c| proj_sig.values()[c] * proj_sig.values()[c])
                            .sum::<f64>()
                            * shape.cell_area();
                        partial = partial.max(mass / (iv.len() * jv.len() * bmo * bmo));
                    }
                }
            }
            f1 = f1.max(mean_ratio);
            f2 = f2.max(restricted);
            f3 = f3.max(partial);
            rows.push(GrowthRow {
                depth,
                family: desc.clone(),
                mean_ratio,
                restricted_l2_ratio: restricted,
                partial_projection_ratio: partial,
            });
        }
        fitted.push((depth, f1, f2, f3));
    }
    Ok(GrowthReport { rows, fitted })
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutatorBoundRow {
    pub depth: usize,
    pub case: usize,
    /// Product-BMO density of the commutator output for normalized inputs.
    pub output_density: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutatorBoundReport {
    pub rows: Vec<CommutatorBoundRow>,
    /// Per-depth maxima.
    pub fitted: Vec<(usize, f64)>,
}

/// Scan the two-parameter iterated shift commutator over normalized random
/// ensembles: symbols scaled to unit generation-scan norm, arguments to
/// unit oscillation-plus-mean norm, content kept below the finest level so
/// no truncation pollutes the output. The mean term in the argument's
/// normalization matters: the commutator maps constants to shifted copies
/// of the symbol, so the bare seminorm has a pole there.
pub fn commutator_bound_suite(
    depths: &[usize],
    cases: usize,
    seed: u64,
) -> Result<CommutatorBoundReport> {
    let mut rows = Vec::new();
    let mut fitted = Vec::new();
    for &depth in depths {
        let shape = Shape::uniform(2, depth)?;
        let mut depth_fit = 0.0f64;
        for case in 0..cases {
            let mut rng = derive_rng(seed, "comm-bound", (depth * 1000 + case) as u64);
            let mut phi = random_expansion(&shape, &mut rng, true);
            let mut b = random_expansion(&shape, &mut rng, false);
            for e in [&mut phi, &mut b] {
                for flat in 0..e.coeffs().len() {
                    let idx = e.axis_indices(flat);
                    if idx
                        .iter()
                        .any(|ix| matches!(ix.level(), Some(l) if l + 1 >= depth))
                    {
                        e.coeffs_mut()[flat] = 0.0;
                    }
                }
            }
            let lmo = lmo_norm(&phi).value;
            if lmo == 0.0 {
                continue;
            }
            let phi = phi.scale(1.0 / lmo.sqrt());
            let b_sig = haar_inverse(&b);
            let scale = bmo_norm(&b_sig).value + b_sig.integral().abs();
            if scale < 1e-9 {
                continue;
            }
            let b = b.scale(1.0 / scale);
            let out = crate::shifts::iterated_commutator(&phi, &b, &[0, 1])?;
            debug_assert!(!out.truncated);
            let density = product_bmo_norm(&out.output).value;
            depth_fit = depth_fit.max(density);
            rows.push(CommutatorBoundRow { depth, case, output_density: density });
        }
        fitted.push((depth, depth_fit));
    }
    Ok(CommutatorBoundReport { rows, fitted })
}

/// Decomposition identity behind the growth bounds: restricting to a
/// rectangle splits into the inside-projection plus signed partial-mean
/// corrections (inclusion-exclusion over axis subsets).
pub fn restriction_identity_error(b: &GridSignal, rect: &DyadicRectangle) -> Result<f64> {
    let shape = b.shape().clone();
    let n = shape.n_params();
    let cells = crate::geometry::rect_cells(&shape, rect)?;
    let exp = haar_forward(b);
    let omega = crate::geometry::OpenSet::from_rectangle(shape.clone(), rect)?;
    let inside = haar_inverse(&exp.project_open_set(&omega)?);
    let mut rhs = inside;
    // Signed partial means over every nonempty axis subset.
    for mask in 1usize..(1 << n) {
        let axes: Vec<usize> = (0..n).filter(|l| mask >> l & 1 == 1).collect();
        let sign = if axes.len() % 2 == 1 { 1.0 } else { -1.0 };
        let averaged: GridSignal = if axes.len() == n {
            GridSignal::constant(shape.clone(), rect_mean(b, rect)?)
        } else {
            let ivs: Vec<DyadicInterval> =
                axes.iter().map(|&a| *rect.interval(a)).collect();
            let sub = partial_mean(b, &axes, &ivs)?;
            let kept: Vec<usize> = (0..n).filter(|l| !axes.contains(l)).collect();
            broadcast(&sub, &shape, &kept)?
        };
        rhs = rhs.add(&averaged.scale(sign))?;
    }
    // Compare χ_R b with χ_R · rhs.
    let mut err = 0.0f64;
    for &c in &cells {
        err = err.max((b.values()[c] - rhs.values()[c]).abs());
    }
    Ok(err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_equality_holds_small() {
        let report = core_lemma_suite(2, 3, 7).unwrap();
        assert!(
            report.sigma_max_rel_dev < 1e-10,
            "compression equality deviation {:e}",
            report.sigma_max_rel_dev
        );
        assert!(report.core_fitted.is_finite());
    }

    #[test]
    fn cotlar_blocks_are_exactly_range_orthogonal() {
        let report = cotlar_decay_suite(&[2, 3], 2, 11).unwrap();
        assert_eq!(report.max_range_cross, 0.0);
        for (_, c) in &report.fitted {
            assert!(c.is_finite());
        }
    }

    #[test]
    fn growth_suite_produces_finite_constants() {
        let report = growth_suite(&[2], 3, 13).unwrap();
        assert!(!report.rows.is_empty());
        let (_, f1, f2, f3) = report.fitted[0];
        assert!(f1 > 0.0 && f1.is_finite());
        assert!(f2 > 0.0 && f2.is_finite());
        assert!(f3 > 0.0 && f3.is_finite());
    }

    #[test]
    fn restriction_identity_exact() {
        let shape = Shape::uniform(2, 2).unwrap();
        let b = mean_free_signal(&shape, 17, 0);
        for rect in DyadicRectangle::enumerate(&[2, 2]) {
            let err = restriction_identity_error(&b, &rect).unwrap();
            assert!(err < 1e-12, "rectangle {rect:?} identity error {err:e}");
        }
        // Three parameters as well.
        let shape3 = Shape::uniform(3, 1).unwrap();
        let b3 = mean_free_signal(&shape3, 18, 0);
        for rect in DyadicRectangle::enumerate(&[1, 1, 1]) {
            let err = restriction_identity_error(&b3, &rect).unwrap();
            assert!(err < 1e-12);
        }
    }
}
