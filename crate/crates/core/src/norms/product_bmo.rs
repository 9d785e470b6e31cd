//! Product BMO as a fractional program: maximize `Σ_{R ⊆ Ω} |f_R|^2 / |Ω|`
//! over nonempty unions of finest cells.
//!
//! The optimizer runs Dinkelbach's ratio iteration; for a fixed λ the inner
//! problem "select rectangles with gain |f_R|^2, paying λ·(cell area) per
//! selected cell" is a maximum-weight closure, solved exactly by min-cut.
//! The exhaustive enumerator stays available as an independent oracle on
//! tiny instances.

use super::closure::{max_weight_closure, ClosureInstance};
use super::{Method, NormReport, Witness};
use crate::error::{Error, Result};
use crate::expansion::HaarExpansion;
use crate::geometry::{rect_cells, DyadicRectangle, OpenSet};

const EXHAUSTION_CELL_LIMIT: usize = 20;

/// One pure-rectangle coefficient of the instance.
struct Project {
    gain: f64,
    cells: Vec<usize>,
}

fn collect_projects(exp: &HaarExpansion, region: Option<&DyadicRectangle>) -> Vec<Project> {
    let shape = exp.shape();
    let mut projects = Vec::new();
    for flat in exp.pure_slots() {
        let c = exp.coeffs()[flat];
        if c == 0.0 {
            continue;
        }
        let rect = exp.rectangle_of(flat).expect("pure slot");
        if let Some(region) = region {
            if !rect.contained_in(region) {
                continue;
            }
        }
        let cells = rect_cells(shape, &rect).expect("representable");
        projects.push(Project { gain: c * c, cells });
    }
    projects
}

/// `Σ_{R ⊆ Ω} |f_R|^2 / |Ω|` for a concrete open set (0 for the empty set).
pub fn density_at(exp: &HaarExpansion, omega: &OpenSet) -> Result<f64> {
    exp.shape().check_same(omega.shape())?;
    if omega.is_empty() {
        return Ok(0.0);
    }
    let mut gain = 0.0;
    for flat in exp.pure_slots() {
        let c = exp.coeffs()[flat];
        if c == 0.0 {
            continue;
        }
        let rect = exp.rectangle_of(flat).expect("pure slot");
        if omega.contains_rectangle(&rect)? {
            gain += c * c;
        }
    }
    Ok(gain / omega.measure())
}

/// Exhaustive product-BMO supremum over all nonempty cell subsets.
/// Refuses instances with more than 20 cells.
pub fn product_bmo_exact(exp: &HaarExpansion) -> Result<NormReport> {
    let shape = exp.shape();
    let cells = shape.cells();
    if cells > EXHAUSTION_CELL_LIMIT {
        return Err(Error::InstanceTooLarge { cells, limit: EXHAUSTION_CELL_LIMIT });
    }
    let projects = collect_projects(exp, None);
    let masks: Vec<(f64, u32)> = projects
        .iter()
        .map(|p| {
            let mut m = 0u32;
            for &c in &p.cells {
                m |= 1 << c;
            }
            (p.gain, m)
        })
        .collect();
    let cell_area = shape.cell_area();
    let mut best = 0.0f64;
    let mut best_mask: u32 = (1u32 << cells) - 1;
    for mask in 1u32..(1u32 << cells) {
        let gain: f64 = masks
            .iter()
            .filter(|(_, m)| mask & m == *m)
            .map(|(g, _)| g)
            .sum();
        let ratio = gain / (mask.count_ones() as f64 * cell_area);
        if ratio > best {
            best = ratio;
            best_mask = mask;
        }
    }
    let witness_cells: Vec<usize> = (0..cells).filter(|&c| best_mask >> c & 1 == 1).collect();
    Ok(NormReport {
        value: best,
        method: Method::Exhaustive,
        witness: Witness::OpenSet(witness_cells),
    })
}

/// Dinkelbach iteration over max-weight closures, optionally restricted to
/// open sets inside `region`. Returns the optimal ratio and a minimal
/// optimal witness.
pub fn restricted_product_bmo(
    exp: &HaarExpansion,
    region: Option<&DyadicRectangle>,
) -> (f64, OpenSet) {
    let shape = exp.shape().clone();
    let cell_area = shape.cell_area();
    let projects = collect_projects(exp, region);
    let default_witness = || match region {
        Some(r) => OpenSet::from_rectangle(shape.clone(), r).expect("representable"),
        None => OpenSet::full(shape.clone()),
    };
    if projects.is_empty() {
        return (0.0, default_witness());
    }

    // Compact resource ids for the cells that occur at all.
    let mut cell_ids: Vec<usize> = projects.iter().flat_map(|p| p.cells.iter().copied()).collect();
    cell_ids.sort_unstable();
    cell_ids.dedup();
    let id_of = |cell: usize| cell_ids.binary_search(&cell).expect("registered cell");
    let requirements: Vec<Vec<usize>> = projects
        .iter()
        .map(|p| p.cells.iter().map(|&c| id_of(c)).collect())
        .collect();
    let gains: Vec<f64> = projects.iter().map(|p| p.gain).collect();

    // Feasible start: the densest single rectangle.
    let mut lambda = projects
        .iter()
        .map(|p| p.gain / (p.cells.len() as f64 * cell_area))
        .fold(0.0f64, f64::max);
    let mut witness: Option<OpenSet> = None;
    let scale = gains.iter().fold(0.0f64, |m, &g| m.max(g)).max(lambda);
    let tol = scale * 1e-13;

    for _ in 0..200 {
        let costs: Vec<f64> = cell_ids.iter().map(|_| lambda * cell_area).collect();
        let inst = ClosureInstance { gains: gains.clone(), costs, requirements: requirements.clone() };
        let sol = max_weight_closure(&inst);
        let selected: Vec<usize> = cell_ids
            .iter()
            .enumerate()
            .filter(|(i, _)| sol.selected_resources[*i])
            .map(|(_, &c)| c)
            .collect();
        if sol.value <= tol || selected.is_empty() {
            break;
        }
        let omega = OpenSet::from_cells(shape.clone(), &selected);
        // Certify the ratio directly from the selection.
        let ratio = density_at(exp, &omega).expect("same shape");
        if ratio <= lambda + tol {
            if witness.is_none() {
                witness = Some(omega);
            }
            break;
        }
        lambda = ratio;
        witness = Some(omega);
    }

    match witness {
        Some(w) => (lambda, w),
        None => {
            // The densest single rectangle already achieves the optimum.
            let best = projects
                .iter()
                .enumerate()
                .max_by(|(i, a), (j, b)| {
                    let ra = a.gain / a.cells.len() as f64;
                    let rb = b.gain / b.cells.len() as f64;
                    ra.partial_cmp(&rb).unwrap().then(j.cmp(i))
                })
                .expect("nonempty");
            let omega = OpenSet::from_cells(shape.clone(), &best.1.cells);
            let ratio = density_at(exp, &omega).expect("same shape");
            (ratio.max(lambda), omega)
        }
    }
}

/// Product BMO by Dinkelbach ratio iteration with min-cut inner steps.
pub fn product_bmo_norm(exp: &HaarExpansion) -> NormReport {
    let (value, omega) = restricted_product_bmo(exp, None);
    NormReport { value, method: Method::MaxFlow, witness: Witness::OpenSet(omega.cells()) }
}
