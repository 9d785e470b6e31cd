//! Operator norms on the pure-rectangle coefficient subspace: dense
//! singular-value computation for small dimensions, seeded power iteration
//! beyond, plus handles for the operators the experiments measure.

mod search;
mod suites;

pub use search::{
    equivalence_experiment, lower_bound, symbol_ensemble, EquivalenceRecord, LowerBound,
};
pub use suites::{
    commutator_bound_suite, core_lemma_suite, cotlar_decay_suite, growth_suite,
    restriction_identity_error, CommutatorBoundReport, CoreLemmaReport, CotlarDecayReport,
    GrowthReport,
};

use crate::error::{Error, Result};
use crate::expansion::HaarExpansion;
use crate::geometry::Shape;
use crate::para::{
    bilinear_apply, cotlar_band, diagonal_paraproduct, paraproduct, SignSpec,
};
use crate::rng::derive_rng;
use nalgebra::DMatrix;
use rand::Rng;

const DENSE_LIMIT: usize = 4096;
const POWER_TOL: f64 = 1e-10;
const POWER_CAP: usize = 20_000;

/// Enumeration of the pure-rectangle coefficient slots of a shape: the
/// coordinate space all operator norms are computed on.
#[derive(Clone, Debug)]
pub struct PureBasis {
    shape: Shape,
    slots: Vec<usize>,
}

impl PureBasis {
    pub fn new(shape: &Shape) -> Self {
        let probe = HaarExpansion::zeros(shape.clone());
        Self { shape: shape.clone(), slots: probe.pure_slots() }
    }

    pub fn dim(&self) -> usize {
        self.slots.len()
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn to_expansion(&self, x: &[f64]) -> HaarExpansion {
        let mut exp = HaarExpansion::zeros(self.shape.clone());
        for (i, &slot) in self.slots.iter().enumerate() {
            exp.coeffs_mut()[slot] = x[i];
        }
        exp
    }

    pub fn from_expansion(&self, exp: &HaarExpansion) -> Vec<f64> {
        self.slots.iter().map(|&s| exp.coeffs()[s]).collect()
    }
}

/// A coordinate-vector action.
pub type VectorMap<'a> = Box<dyn Fn(&[f64]) -> Vec<f64> + 'a>;

/// A linear operator given by its action and adjoint action on coordinate
/// vectors.
pub struct OperatorHandle<'a> {
    pub dim_in: usize,
    pub dim_out: usize,
    apply: VectorMap<'a>,
    adjoint: VectorMap<'a>,
}

impl<'a> OperatorHandle<'a> {
    pub fn new(
        dim_in: usize,
        dim_out: usize,
        apply: impl Fn(&[f64]) -> Vec<f64> + 'a,
        adjoint: impl Fn(&[f64]) -> Vec<f64> + 'a,
    ) -> Self {
        Self { dim_in, dim_out, apply: Box::new(apply), adjoint: Box::new(adjoint) }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (self.apply)(x)
    }

    pub fn adjoint_apply(&self, y: &[f64]) -> Vec<f64> {
        (self.adjoint)(y)
    }

    /// Column-by-column dense assembly.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim_out, self.dim_in);
        let mut e = vec![0.0; self.dim_in];
        for j in 0..self.dim_in {
            e[j] = 1.0;
            let col = self.apply(&e);
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = *v;
            }
            e[j] = 0.0;
        }
        m
    }

    /// Adjoint consistency defect `max |<Tx, y> - <x, T*y>|` over seeded
    /// random pairs, for self-checks.
    pub fn adjoint_defect(&self, seed: u64, pairs: usize) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..pairs {
            let mut rng = derive_rng(seed, "adjoint-defect", i as u64);
            let x: Vec<f64> = (0..self.dim_in).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let y: Vec<f64> = (0..self.dim_out).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let lhs: f64 = self.apply(&x).iter().zip(&y).map(|(a, b)| a * b).sum();
            let rhs: f64 = x.iter().zip(self.adjoint_apply(&y)).map(|(a, b)| a * b).sum();
            worst = worst.max((lhs - rhs).abs());
        }
        worst
    }
}

/// Largest singular value: exact dense decomposition up to dimension 4096,
/// seeded power iteration on `T*T` beyond (relative tolerance 1e-10, hard
/// iteration cap).
pub fn l2_opnorm(op: &OperatorHandle) -> Result<f64> {
    if op.dim_in == 0 || op.dim_out == 0 {
        return Ok(0.0);
    }
    if op.dim_in.max(op.dim_out) <= DENSE_LIMIT {
        let m = op.to_dense();
        Ok(m.svd(false, false).singular_values.max())
    } else {
        power_iteration_norm(op, 0)
    }
}

/// Power iteration on `T*T` with a fixed seed. Stops on the Rayleigh
/// residual, which bounds the eigenvalue error quadratically.
pub fn power_iteration_norm(op: &OperatorHandle, seed: u64) -> Result<f64> {
    let mut rng = derive_rng(seed, "power-iteration", 0);
    let mut x: Vec<f64> = (0..op.dim_in).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let n0 = norm(&x);
    if n0 == 0.0 {
        return Ok(0.0);
    }
    x.iter_mut().for_each(|v| *v /= n0);
    let mut residual = f64::INFINITY;
    for _ in 0..POWER_CAP {
        let y = op.adjoint_apply(&op.apply(&x));
        let lambda: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        if lambda <= 0.0 {
            return Ok(0.0);
        }
        residual = y
            .iter()
            .zip(&x)
            .map(|(yi, xi)| (yi - lambda * xi) * (yi - lambda * xi))
            .sum::<f64>()
            .sqrt();
        let ny = norm(&y);
        x = y.iter().map(|v| v / ny).collect();
        if residual <= POWER_TOL * lambda {
            return Ok(lambda.sqrt());
        }
    }
    Err(Error::NonConvergence { iterations: POWER_CAP, residual })
}

/// `f ↦ B(symbol, shaped(f))` as an operator on pure coordinates, with the
/// adjoint given by the swapped pairing pattern.
pub fn bilinear_operator<'a>(
    basis: &'a PureBasis,
    spec: &'a SignSpec,
    symbol: &'a HaarExpansion,
) -> OperatorHandle<'a> {
    let adj = spec.adjoint();
    OperatorHandle::new(
        basis.dim(),
        basis.dim(),
        move |x| {
            let out = bilinear_apply(spec, symbol, &basis.to_expansion(x)).expect("shapes match");
            basis.from_expansion(&out)
        },
        move |y| {
            let out = bilinear_apply(&adj, symbol, &basis.to_expansion(y)).expect("shapes match");
            basis.from_expansion(&out)
        },
    )
}

/// The main paraproduct with a fixed symbol on pure coordinates.
pub fn paraproduct_operator<'a>(
    basis: &'a PureBasis,
    symbol: &'a HaarExpansion,
) -> OperatorHandle<'a> {
    OperatorHandle::new(
        basis.dim(),
        basis.dim(),
        move |x| {
            let out = paraproduct(symbol, &basis.to_expansion(x)).expect("shapes match");
            basis.from_expansion(&out)
        },
        move |y| {
            let out =
                diagonal_paraproduct(symbol, &basis.to_expansion(y)).expect("shapes match");
            basis.from_expansion(&out)
        },
    )
}

/// `f ↦ Π(b, E_k^{(axis)} f)` on pure coordinates.
pub fn paraproduct_expectation_operator<'a>(
    basis: &'a PureBasis,
    symbol: &'a HaarExpansion,
    axis: usize,
    k: usize,
) -> OperatorHandle<'a> {
    OperatorHandle::new(
        basis.dim(),
        basis.dim(),
        move |x| {
            let filtered = basis
                .to_expansion(x)
                .axis_expectation(axis, k)
                .expect("axis and level checked by caller");
            basis.from_expansion(&paraproduct(symbol, &filtered).expect("shapes match"))
        },
        move |y| {
            let back = diagonal_paraproduct(symbol, &basis.to_expansion(y))
                .expect("shapes match")
                .axis_expectation(axis, k)
                .expect("axis and level checked by caller");
            basis.from_expansion(&back)
        },
    )
}

/// The almost-orthogonal block `T_m f = Π(g, band_m f)` for a precomposed
/// symbol `g = Π(φ, b)`.
pub fn cotlar_block_operator<'a>(
    basis: &'a PureBasis,
    g: &'a HaarExpansion,
    m: usize,
    axis: usize,
) -> OperatorHandle<'a> {
    let (lo, hi) = cotlar_band(m);
    OperatorHandle::new(
        basis.dim(),
        basis.dim(),
        move |x| {
            let banded = basis.to_expansion(x).axis_band(axis, lo, hi).expect("axis checked");
            basis.from_expansion(&paraproduct(g, &banded).expect("shapes match"))
        },
        move |y| {
            let back = diagonal_paraproduct(g, &basis.to_expansion(y))
                .expect("shapes match")
                .axis_band(axis, lo, hi)
                .expect("axis checked");
            basis.from_expansion(&back)
        },
    )
}
