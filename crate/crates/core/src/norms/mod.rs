//! Oscillation norms: little bmo, product BMO (exact and optimized),
//! rectangular BMO, and the logarithmic-mean-oscillation family.
//!
//! Conventions. `bmo_norm` is the L1 oscillation exactly as defined
//! (supremum over dyadic rectangles of the mean deviation from the local
//! mean). `product_bmo_*`, `rect_bmo_norm` and the `lmo_*` quantities are
//! *squared-density* suprema: they maximize `Σ |f_R|^2 / |Ω|`-type ratios,
//! so they scale quadratically in the input. The two families are not
//! normalized against each other.

mod closure;
mod lmo;
mod product_bmo;

pub use closure::{max_weight_closure, ClosureInstance, ClosureSolution};
pub use lmo::{
    lmo_axis_norm, lmo_beta_norm, lmo_equiv_quantity, lmo_norm, reevaluate_weighted_open_set,
};
pub use product_bmo::{density_at, product_bmo_exact, product_bmo_norm, restricted_product_bmo};

use crate::error::{Error, Result};
use crate::expansion::HaarExpansion;
use crate::geometry::{rect_cells, DyadicRectangle, OpenSet};
use crate::signal::GridSignal;
use serde::{Deserialize, Serialize};

/// How a norm value was obtained.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Method {
    Exhaustive,
    MaxFlow,
    GenerationScan,
}

/// The object achieving a reported norm value.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "camelCase")]
pub enum Witness {
    Rectangle(DyadicRectangle),
    /// Sorted flat indices of the cells of the open set.
    OpenSet(Vec<usize>),
    Generation(Vec<usize>),
}

/// A computed norm value together with its witness.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct NormReport {
    pub value: f64,
    pub method: Method,
    pub witness: Witness,
}

impl NormReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Mean oscillation of `sig` over one rectangle: `(1/|R|) ∫_R |f - m_R f|`.
pub fn oscillation_at(sig: &GridSignal, rect: &DyadicRectangle) -> Result<f64> {
    let cells = rect_cells(sig.shape(), rect)?;
    let mean: f64 = cells.iter().map(|&c| sig.values()[c]).sum::<f64>() / cells.len() as f64;
    let dev: f64 = cells.iter().map(|&c| (sig.values()[c] - mean).abs()).sum::<f64>();
    Ok(dev / cells.len() as f64)
}

/// Little bmo: supremum of the L1 mean oscillation over all dyadic
/// rectangles representable on the grid (including whole-circle factors).
/// Exact at grid resolution; the witness is the first maximizer in
/// lexicographic rectangle order.
pub fn bmo_norm(sig: &GridSignal) -> NormReport {
    let shape = sig.shape();
    let mut best = 0.0f64;
    let mut witness = DyadicRectangle::whole(shape.n_params());
    for rect in DyadicRectangle::enumerate(shape.depths()) {
        let osc = oscillation_at(sig, &rect).expect("representable by construction");
        if osc > best {
            best = osc;
            witness = rect;
        }
    }
    NormReport { value: best, method: Method::Exhaustive, witness: Witness::Rectangle(witness) }
}

/// The bmo seminorm plus the absolute global mean. This is the Banach-norm
/// flavor needed when paraproducts are measured against bmo data: the
/// seminorm alone vanishes on constants, which the main paraproduct maps to
/// nonzero output.
pub fn bmo_norm_with_mean(sig: &GridSignal) -> f64 {
    bmo_norm(sig).value + sig.integral().abs()
}

/// Squared coefficient mass `Σ_{Q ⊆ R} |f_Q|^2` for every dyadic rectangle,
/// returned as a tensor indexed like the expansion (mean slots unused).
pub(crate) fn containment_mass_tensor(exp: &HaarExpansion) -> Vec<f64> {
    let shape = exp.shape();
    let mut mass: Vec<f64> = exp.coeffs().iter().map(|c| c * c).collect();
    // Zero out mean-bearing slots so only pure rectangles contribute.
    for (flat, m) in mass.iter_mut().enumerate() {
        if !exp.is_pure(flat) {
            *m = 0.0;
        }
    }
    for axis in 0..shape.n_params() {
        crate::expansion::for_each_line(&mut mass, shape, axis, |line| {
            let depth = line.len().trailing_zeros() as usize;
            for j in (0..depth.saturating_sub(1)).rev() {
                for k in 0..(1usize << j) {
                    let add = line[(1 << (j + 1)) + 2 * k] + line[(1 << (j + 1)) + 2 * k + 1];
                    line[(1 << j) + k] += add;
                }
            }
        });
    }
    mass
}

/// `Σ_{Q ⊆ R} |f_Q|^2` for a single rectangle.
pub fn rect_mass(exp: &HaarExpansion, rect: &DyadicRectangle) -> Result<f64> {
    for (l, iv) in rect.intervals().iter().enumerate() {
        if iv.level() >= exp.shape().depth(l) {
            // No pure coefficient fits inside an interval at the finest
            // level or beyond.
            return Ok(0.0);
        }
    }
    let idx: Vec<usize> = rect
        .intervals()
        .iter()
        .map(|iv| crate::expansion::AxisIndex::Interval(*iv).to_flat())
        .collect();
    let mass = containment_mass_tensor(exp);
    Ok(mass[exp.shape().flat_index(&idx)])
}

/// Rectangular BMO: `sup_R (1/|R|) Σ_{Q ⊆ R} |f_Q|^2` over dyadic
/// rectangles, by exact scan.
pub fn rect_bmo_norm(exp: &HaarExpansion) -> NormReport {
    let shape = exp.shape();
    let mass = containment_mass_tensor(exp);
    let mut best = 0.0f64;
    let mut witness = DyadicRectangle::whole(shape.n_params());
    let sub_levels: Vec<usize> = shape.depths().iter().map(|&d| d - 1).collect();
    for rect in DyadicRectangle::enumerate(&sub_levels) {
        let idx: Vec<usize> = rect
            .intervals()
            .iter()
            .map(|iv| crate::expansion::AxisIndex::Interval(*iv).to_flat())
            .collect();
        let density = mass[shape.flat_index(&idx)] / rect.area();
        if density > best {
            best = density;
            witness = rect;
        }
    }
    NormReport { value: best, method: Method::Exhaustive, witness: Witness::Rectangle(witness) }
}

/// The local mean-growth weight: `log(1/len) + 1` for `len ≤ 1`, else 1.
pub fn log_weight(len: f64) -> Result<f64> {
    if len <= 0.0 || !len.is_finite() {
        return Err(Error::NonPositiveLength(len));
    }
    Ok(if len <= 1.0 { (1.0 / len).ln() + 1.0 } else { 1.0 })
}

/// Re-evaluate a report's objective at its witness for the given norm.
pub fn reevaluate_density(exp: &HaarExpansion, witness: &Witness) -> Result<f64> {
    match witness {
        Witness::OpenSet(cells) => {
            let omega = OpenSet::from_cells(exp.shape().clone(), cells);
            density_at(exp, &omega)
        }
        Witness::Rectangle(rect) => {
            let omega = OpenSet::from_rectangle(exp.shape().clone(), rect)?;
            density_at(exp, &omega)
        }
        Witness::Generation(_) => {
            Err(Error::InvalidArgument("density witness must be a set or rectangle".into()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::haar_forward;
    use crate::geometry::{DyadicInterval, Shape};
    use crate::rng::{derive_rng, random_expansion};

    #[test]
    fn bmo_of_constant_is_zero_with_whole_witness() {
        let shape = Shape::uniform(2, 2).unwrap();
        let rep = bmo_norm(&GridSignal::constant(shape, 3.25));
        assert_eq!(rep.value, 0.0);
        assert_eq!(rep.witness, Witness::Rectangle(DyadicRectangle::whole(2)));
    }

    #[test]
    fn bmo_of_top_haar_is_one_at_whole_square() {
        // h over [0,1) in the first variable: oscillation 1, witness T^2.
        let shape = Shape::uniform(2, 2).unwrap();
        let whole = DyadicInterval::whole();
        let sig = GridSignal::sample(shape, |x| {
            whole.haar_value_on_cell((x[0] * 4.0) as usize, 2)
        });
        let rep = bmo_norm(&sig);
        assert!((rep.value - 1.0).abs() < 1e-13);
        assert_eq!(rep.witness, Witness::Rectangle(DyadicRectangle::whole(2)));
    }

    #[test]
    fn bmo_of_one_variable_function_matches_1d() {
        let shape1 = Shape::new(vec![3]).unwrap();
        let shape2 = Shape::new(vec![3, 2]).unwrap();
        let mut rng = derive_rng(5, "bmo1d", 0);
        let sig1 = crate::rng::random_signal(&shape1, &mut rng);
        let sig2 = GridSignal::sample(shape2, |x| {
            sig1.values()[(x[0] * 8.0) as usize]
        });
        let n1 = bmo_norm(&sig1).value;
        let n2 = bmo_norm(&sig2).value;
        assert!((n1 - n2).abs() < 1e-13);
    }

    #[test]
    fn bmo_witness_reevaluates() {
        let shape = Shape::uniform(2, 3).unwrap();
        let mut rng = derive_rng(6, "bmo-witness", 0);
        let sig = crate::rng::random_signal(&shape, &mut rng);
        let rep = bmo_norm(&sig);
        if let Witness::Rectangle(r) = &rep.witness {
            assert!((oscillation_at(&sig, r).unwrap() - rep.value).abs() < 1e-12);
        } else {
            panic!("bmo witness must be a rectangle");
        }
    }

    #[test]
    fn rect_bmo_zero_and_single_coefficient() {
        let shape = Shape::uniform(2, 2).unwrap();
        assert_eq!(rect_bmo_norm(&HaarExpansion::zeros(shape.clone())).value, 0.0);
        let r = DyadicRectangle::new(vec![
            DyadicInterval::new(1, 0).unwrap(),
            DyadicInterval::new(1, 1).unwrap(),
        ]);
        let exp = HaarExpansion::unit_rectangle(shape, &r).unwrap().scale(0.5);
        let rep = rect_bmo_norm(&exp);
        // |f_R|^2/|R| = 0.25/0.25 = 1.
        assert!((rep.value - 1.0).abs() < 1e-13);
        assert_eq!(rep.witness, Witness::Rectangle(r));
    }

    #[test]
    fn containment_mass_matches_direct_enumeration() {
        let shape = Shape::uniform(2, 3).unwrap();
        let mut rng = derive_rng(7, "mass", 0);
        let exp = random_expansion(&shape, &mut rng, false);
        let r = DyadicRectangle::new(vec![
            DyadicInterval::new(1, 1).unwrap(),
            DyadicInterval::new(0, 0).unwrap(),
        ]);
        let direct: f64 = exp
            .pure_slots()
            .iter()
            .filter_map(|&f| {
                let q = exp.rectangle_of(f).unwrap();
                if q.contained_in(&r) {
                    Some(exp.coeffs()[f] * exp.coeffs()[f])
                } else {
                    None
                }
            })
            .sum();
        assert!((rect_mass(&exp, &r).unwrap() - direct).abs() < 1e-13);
    }

    #[test]
    fn log_weight_values() {
        assert!((log_weight(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((log_weight(0.5).unwrap() - (2f64.ln() + 1.0)).abs() < 1e-15);
        assert!((log_weight(4.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(log_weight(0.0).is_err());
        assert!(log_weight(-1.0).is_err());
    }

    #[test]
    fn density_reevaluation_matches_reported_values() {
        let shape = Shape::uniform(2, 2).unwrap();
        let mut rng = derive_rng(31, "reeval", 0);
        let exp = random_expansion(&shape, &mut rng, false);
        let pb = crate::norms::product_bmo_norm(&exp);
        let again = reevaluate_density(&exp, &pb.witness).unwrap();
        assert!((again - pb.value).abs() <= 1e-9 * pb.value.max(1.0));
        let rb = rect_bmo_norm(&exp);
        let again = reevaluate_density(&exp, &rb.witness).unwrap();
        assert!((again - rb.value).abs() <= 1e-9 * rb.value.max(1.0));
    }

    #[test]
    fn report_json_shape() {
        let rep = NormReport {
            value: 1.5,
            method: Method::MaxFlow,
            witness: Witness::OpenSet(vec![0, 3]),
        };
        let json: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(json["value"], 1.5);
        assert_eq!(json["method"], "maxFlow");
        assert_eq!(json["witness"]["kind"], "openSet");
        assert_eq!(json["witness"]["payload"][1], 3);
    }

    #[test]
    fn degenerate_one_axis_expansion_mass() {
        let shape = Shape::new(vec![2]).unwrap();
        let exp = haar_forward(&GridSignal::sample(shape, |x| x[0]));
        let whole = DyadicRectangle::whole(1);
        let total: f64 = exp.pure_slots().iter().map(|&f| exp.coeffs()[f].powi(2)).sum();
        assert!((rect_mass(&exp, &whole).unwrap() - total).abs() < 1e-14);
    }
}
