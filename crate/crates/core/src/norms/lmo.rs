//! Logarithmic mean oscillation quantities.
//!
//! `lmo_norm` scans tail projections against the additive generation weight
//! `(j_1 + … + j_N + N)`; the directional and suppressed-axis variants scan
//! one axis or weight rectangles by `log(4/|R_j|)` with suppressed axes
//! pinned at `log 4`. All of these inherit the squared-density convention
//! of `product_bmo_norm`.

use super::product_bmo::{density_at, restricted_product_bmo};
use super::{containment_mass_tensor, Method, NormReport, Witness};
use crate::error::Result;
use crate::expansion::HaarExpansion;
use crate::geometry::{DyadicRectangle, OpenSet};

const LOG4: f64 = 1.3862943611198906; // ln 4

/// Weight `Σ_j log(4/|R_j|)` with suppressed axes contributing `log 4`.
fn rect_log_weight(rect: &DyadicRectangle, delta: &[bool]) -> f64 {
    rect.intervals()
        .iter()
        .zip(delta)
        .map(|(iv, &suppressed)| {
            if suppressed {
                LOG4
            } else {
                LOG4 + iv.level() as f64 * std::f64::consts::LN_2
            }
        })
        .sum()
}

/// `max over j⃗ of (j_1 + … + j_N + N) · product_bmo(tail(j⃗))`.
pub fn lmo_norm(exp: &HaarExpansion) -> NormReport {
    let shape = exp.shape();
    let n = shape.n_params();
    let dims: Vec<usize> = shape.depths().iter().map(|&d| d + 1).collect();
    let total: usize = dims.iter().product();
    let mut best = 0.0f64;
    let mut witness = vec![0usize; n];
    for flat in 0..total {
        // Lexicographic generation tuples, first axis most significant.
        let mut rem = flat;
        let mut gens = vec![0usize; n];
        for l in (0..n).rev() {
            gens[l] = rem % dims[l];
            rem /= dims[l];
        }
        let tail = exp.tail(&gens).expect("in range");
        if tail.l2_norm_sq() == 0.0 {
            continue;
        }
        let weight = gens.iter().sum::<usize>() as f64 + n as f64;
        let (density, _) = restricted_product_bmo(&tail, None);
        let value = weight * density;
        if value > best {
            best = value;
            witness = gens;
        }
    }
    NormReport {
        value: best,
        method: Method::GenerationScan,
        witness: Witness::Generation(witness),
    }
}

/// Directional variant: `max over i of (i + 1) · product_bmo(axis_tail)`.
pub fn lmo_axis_norm(exp: &HaarExpansion, axis: usize) -> Result<NormReport> {
    exp.shape().check_axis(axis)?;
    let mut best = 0.0f64;
    let mut witness = 0usize;
    for i in 0..=exp.shape().depth(axis) {
        let tail = exp.axis_tail(axis, i)?;
        if tail.l2_norm_sq() == 0.0 {
            continue;
        }
        let (density, _) = restricted_product_bmo(&tail, None);
        let value = (i + 1) as f64 * density;
        if value > best {
            best = value;
            witness = i;
        }
    }
    Ok(NormReport {
        value: best,
        method: Method::GenerationScan,
        witness: Witness::Generation(vec![witness]),
    })
}

/// Suppressed-axis logarithmic oscillation: scan dyadic rectangles `R`,
/// maximize `weight(R)^2 · Σ_{Q ⊆ Ω} |f_Q|^2 / |Ω|` over open `Ω ⊆ R`.
pub fn lmo_beta_norm(exp: &HaarExpansion, delta: &[bool]) -> Result<NormReport> {
    let shape = exp.shape();
    if delta.len() != shape.n_params() {
        return Err(crate::error::Error::ShapeMismatch(
            "one suppression flag per axis".into(),
        ));
    }
    let mass = containment_mass_tensor(exp);
    let (global_density, global_omega) = restricted_product_bmo(exp, None);
    let cell_area = shape.cell_area();
    // Smallest area among nonzero pure coefficients: a lower bound on any
    // useful |Ω|, used only to prune.
    let min_area = exp
        .pure_slots()
        .iter()
        .filter(|&&f| exp.coeffs()[f] != 0.0)
        .map(|&f| exp.rectangle_of(f).expect("pure").area())
        .fold(f64::INFINITY, f64::min)
        .max(cell_area);

    let mut best = 0.0f64;
    let mut witness: Option<OpenSet> = None;
    // Rectangles with any axis at the finest level hold no coefficients.
    let sub_levels: Vec<usize> = shape.depths().iter().map(|&d| d - 1).collect();
    for rect in DyadicRectangle::enumerate(&sub_levels) {
        let idx: Vec<usize> = rect
            .intervals()
            .iter()
            .map(|iv| crate::expansion::AxisIndex::Interval(*iv).to_flat())
            .collect();
        let rect_mass = mass[shape.flat_index(&idx)];
        if rect_mass == 0.0 {
            continue;
        }
        let w2 = rect_log_weight(&rect, delta).powi(2);
        let bound = w2 * global_density.min(rect_mass / min_area);
        if bound <= best {
            continue;
        }
        let (density, omega) = restricted_product_bmo(exp, Some(&rect));
        let value = w2 * density;
        if value > best {
            best = value;
            witness = Some(omega);
        }
    }
    let witness = witness.unwrap_or(global_omega);
    Ok(NormReport {
        value: best,
        method: Method::MaxFlow,
        witness: Witness::OpenSet(witness.cells()),
    })
}

/// The rectangle/open-set characterization quantity: all axes weighted,
/// i.e. `lmo_beta_norm` with no suppressed axis.
pub fn lmo_equiv_quantity(exp: &HaarExpansion) -> NormReport {
    let delta = vec![false; exp.shape().n_params()];
    lmo_beta_norm(exp, &delta).expect("delta arity matches")
}

/// Re-evaluate a weighted open-set witness: the optimal enclosing rectangle
/// is the smallest one containing the set, because the weight shrinks as
/// the rectangle grows.
pub fn reevaluate_weighted_open_set(
    exp: &HaarExpansion,
    cells: &[usize],
    delta: &[bool],
) -> Result<f64> {
    let omega = OpenSet::from_cells(exp.shape().clone(), cells);
    if omega.is_empty() {
        return Ok(0.0);
    }
    let rect = omega.enclosing_rectangle();
    let w2 = rect_log_weight(&rect, delta).powi(2);
    Ok(w2 * density_at(exp, &omega)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DyadicInterval, Shape};
    use crate::norms::product_bmo::product_bmo_norm;
    use crate::rng::{derive_rng, random_expansion};

    #[test]
    fn lmo_of_top_wavelet_is_n() {
        // Single unit coefficient at T^2: only the zero generation survives,
        // product BMO 1, weight N = 2.
        let shape = Shape::uniform(2, 2).unwrap();
        let exp = HaarExpansion::unit_rectangle(shape, &DyadicRectangle::whole(2)).unwrap();
        let rep = lmo_norm(&exp);
        assert!((rep.value - 2.0).abs() < 1e-12);
        assert_eq!(rep.witness, Witness::Generation(vec![0, 0]));
        // Oracle: exhaustive generation scan with the exhaustive product-BMO.
        let mut oracle = 0.0f64;
        for j0 in 0..=2 {
            for j1 in 0..=2 {
                let tail = exp.tail(&[j0, j1]).unwrap();
                let d = crate::norms::product_bmo_exact(&tail).unwrap().value;
                oracle = oracle.max((j0 + j1 + 2) as f64 * d);
            }
        }
        assert!((rep.value - oracle).abs() < 1e-12);
    }

    #[test]
    fn lmo_zero_and_quadratic_scaling() {
        let shape = Shape::uniform(2, 2).unwrap();
        assert_eq!(lmo_norm(&HaarExpansion::zeros(shape.clone())).value, 0.0);
        let mut rng = derive_rng(3, "lmo-scale", 0);
        let exp = random_expansion(&shape, &mut rng, true);
        let base = lmo_norm(&exp).value;
        // Density-convention quantities scale with the square of the data.
        let scaled = lmo_norm(&exp.scale(3.0)).value;
        assert!((scaled - 9.0 * base).abs() < 1e-9 * base.max(1.0));
    }

    #[test]
    fn lmo_dominates_zero_generation_term() {
        let shape = Shape::uniform(2, 2).unwrap();
        let mut rng = derive_rng(8, "lmo-dominate", 0);
        let exp = random_expansion(&shape, &mut rng, false);
        let rep = lmo_norm(&exp);
        let zero_term = 2.0 * product_bmo_norm(&exp.tail(&[0, 0]).unwrap()).value;
        assert!(rep.value + 1e-12 >= zero_term);
    }

    #[test]
    fn lmo_witness_reevaluates() {
        let shape = Shape::uniform(2, 2).unwrap();
        let mut rng = derive_rng(12, "lmo-witness", 0);
        let exp = random_expansion(&shape, &mut rng, true);
        let rep = lmo_norm(&exp);
        if let Witness::Generation(j) = &rep.witness {
            let tail = exp.tail(j).unwrap();
            let weight = j.iter().sum::<usize>() as f64 + 2.0;
            let again = weight * product_bmo_norm(&tail).value;
            assert!((again - rep.value).abs() < 1e-9 * rep.value.max(1.0));
        } else {
            panic!("generation witness expected");
        }
    }

    #[test]
    fn axis_variant_single_coefficient() {
        // h_R with axis-0 level k: the scan peaks at i = k.
        let shape = Shape::uniform(2, 3).unwrap();
        let r = DyadicRectangle::new(vec![
            DyadicInterval::new(2, 1).unwrap(),
            DyadicInterval::new(0, 0).unwrap(),
        ]);
        let exp = HaarExpansion::unit_rectangle(shape, &r).unwrap();
        let rep = lmo_axis_norm(&exp, 0).unwrap();
        let density = 1.0 / r.area();
        assert!((rep.value - 3.0 * density).abs() < 1e-10);
        assert_eq!(rep.witness, Witness::Generation(vec![2]));
        assert_eq!(lmo_axis_norm(&HaarExpansion::zeros(Shape::uniform(2, 2).unwrap()), 1)
            .unwrap()
            .value, 0.0);
    }

    #[test]
    fn axis_variant_rejects_bad_axis() {
        let shape = Shape::uniform(2, 2).unwrap();
        assert!(lmo_axis_norm(&HaarExpansion::zeros(shape), 2).is_err());
    }

    #[test]
    fn full_scan_bounded_by_axis_scans() {
        // Any tail is contained in the directional tail of its largest
        // component, and adding coefficients never lowers the density
        // supremum, so the full scan is at most N times the best
        // directional scan.
        let shape = Shape::uniform(2, 3).unwrap();
        for i in 0..8u64 {
            let mut rng = derive_rng(33, "lmo-vs-axis", i);
            let exp = random_expansion(&shape, &mut rng, true);
            let full = lmo_norm(&exp).value;
            let per_axis = (0..2)
                .map(|a| lmo_axis_norm(&exp, a).unwrap().value)
                .fold(0.0f64, f64::max);
            assert!(
                full <= 2.0 * per_axis + 1e-9,
                "full {full} vs axis bound {per_axis}"
            );
        }
    }

    #[test]
    fn fully_suppressed_weight_reduces_to_product_bmo() {
        let shape = Shape::uniform(2, 2).unwrap();
        let mut rng = derive_rng(15, "beta-all", 0);
        let exp = random_expansion(&shape, &mut rng, true);
        let rep = lmo_beta_norm(&exp, &[true, true]).unwrap();
        let pb = product_bmo_norm(&exp).value;
        let expect = (2.0 * LOG4).powi(2) * pb;
        assert!((rep.value - expect).abs() < 1e-9 * expect.max(1.0));
    }

    #[test]
    fn beta_zero_expansion_is_zero() {
        let shape = Shape::uniform(2, 2).unwrap();
        let rep = lmo_beta_norm(&HaarExpansion::zeros(shape), &[true, false]).unwrap();
        assert_eq!(rep.value, 0.0);
    }

    #[test]
    fn beta_scan_matches_exhaustive_oracle() {
        // N=2, δ=(1,0): exhaustive enumeration over rectangles and subsets.
        let shape = Shape::uniform(2, 2).unwrap();
        let i = DyadicInterval::new(1, 0).unwrap();
        let j = DyadicInterval::new(1, 1).unwrap();
        let mut exp = HaarExpansion::unit_rectangle(
            shape.clone(),
            &DyadicRectangle::new(vec![i, j]),
        )
        .unwrap();
        // Add a second coefficient so the scan is not trivial.
        let top = exp
            .flat_of(&[
                crate::expansion::AxisIndex::Interval(DyadicInterval::whole()),
                crate::expansion::AxisIndex::Interval(DyadicInterval::whole()),
            ])
            .unwrap();
        exp.coeffs_mut()[top] = 0.6;
        let delta = [true, false];
        let rep = lmo_beta_norm(&exp, &delta).unwrap();

        let mut oracle = 0.0f64;
        for rect in DyadicRectangle::enumerate(&[1, 1]) {
            let region = OpenSet::from_rectangle(shape.clone(), &rect).unwrap();
            let cells = region.cells();
            let w2 = rect_log_weight(&rect, &delta).powi(2);
            for mask in 1usize..(1 << cells.len()) {
                let subset: Vec<usize> = cells
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| mask >> b & 1 == 1)
                    .map(|(_, &c)| c)
                    .collect();
                let om = OpenSet::from_cells(shape.clone(), &subset);
                oracle = oracle.max(w2 * density_at(&exp, &om).unwrap());
            }
        }
        assert!((rep.value - oracle).abs() < 1e-9 * oracle.max(1.0));
        // Witness re-evaluation reproduces the value.
        if let Witness::OpenSet(cells) = &rep.witness {
            let again = reevaluate_weighted_open_set(&exp, cells, &delta).unwrap();
            assert!((again - rep.value).abs() < 1e-9 * rep.value.max(1.0));
        }
    }

    #[test]
    fn equiv_quantity_is_unsuppressed_beta() {
        let shape = Shape::uniform(2, 2).unwrap();
        let mut rng = derive_rng(21, "equiv", 0);
        let exp = random_expansion(&shape, &mut rng, true);
        let a = lmo_equiv_quantity(&exp).value;
        let b = lmo_beta_norm(&exp, &[false, false]).unwrap().value;
        assert_eq!(a, b);
    }
}
