//! Cross-module invariants: orthonormality of the synthesized basis,
//! Parseval under random shapes, projection algebra, shift mass doubling
//! and the scaling laws of the density norms.

use proptest::prelude::*;
use torushaar::expansion::{haar_forward, haar_inverse, HaarExpansion};
use torushaar::geometry::Shape;
use torushaar::norms::{product_bmo_norm, rect_bmo_norm};
use torushaar::rng::{derive_rng, random_expansion};
use torushaar::shifts::shift;
use torushaar::signal::GridSignal;

/// Explicit Gram matrices on the small combinations; the transform-based
/// equivalent (forward of each synthesized basis vector is the unit
/// coefficient vector) covers the large ones at the same 1e-12 tolerance.
#[test]
fn basis_is_orthonormal_up_to_three_parameters_depth_four() {
    for (n, depth) in [(1, 4), (2, 2), (2, 3), (3, 2)] {
        let shape = Shape::uniform(n, depth).unwrap();
        let dim = shape.cells();
        let mut vectors = Vec::with_capacity(dim);
        for f in 0..dim {
            let mut e = HaarExpansion::zeros(shape.clone());
            e.coeffs_mut()[f] = 1.0;
            vectors.push(haar_inverse(&e));
        }
        for i in 0..dim {
            for j in 0..dim {
                let g = vectors[i].inner(&vectors[j]).unwrap();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (g - expect).abs() < 1e-12,
                    "Gram defect at ({i},{j}) for N={n}, J={depth}"
                );
            }
        }
    }
    for (n, depth) in [(2, 4), (3, 3), (3, 4)] {
        let shape = Shape::uniform(n, depth).unwrap();
        let dim = shape.cells();
        for f in 0..dim {
            let mut e = HaarExpansion::zeros(shape.clone());
            e.coeffs_mut()[f] = 1.0;
            let back = haar_forward(&haar_inverse(&e));
            assert!(
                back.max_abs_diff(&e) < 1e-12,
                "transform orthonormality defect at slot {f} for N={n}, J={depth}"
            );
        }
    }
}

fn arb_shape() -> impl Strategy<Value = Shape> {
    (1usize..=3, 1usize..=4).prop_map(|(n, j)| Shape::uniform(n, j).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parseval_and_round_trip(shape in arb_shape(), seed in 0u64..1u64 << 48) {
        let mut rng = derive_rng(seed, "prop-parseval", 0);
        let sig = torushaar::rng::random_signal(&shape, &mut rng);
        let exp = haar_forward(&sig);
        prop_assert!((exp.l2_norm_sq() - sig.l2_norm_sq()).abs() < 1e-12);
        let back = haar_inverse(&exp);
        prop_assert!(sig.sub(&back).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn generation_blocks_partition_identity(seed in 0u64..1u64 << 48) {
        let shape = Shape::uniform(2, 2).unwrap();
        let mut rng = derive_rng(seed, "prop-partition", 0);
        let exp = random_expansion(&shape, &mut rng, false);
        let mut sum = exp.sub(&exp.pure_part()).unwrap();
        for j0 in 0..2 {
            for j1 in 0..2 {
                sum = sum.add(&exp.generation_block(&[j0, j1]).unwrap()).unwrap();
            }
        }
        prop_assert!(sum.max_abs_diff(&exp) < 1e-14);
    }

    #[test]
    fn axis_expectation_tail_complement(
        shape in arb_shape(),
        seed in 0u64..1u64 << 48,
        axis_pick in 0usize..3,
        level_pick in 0usize..5,
    ) {
        let axis = axis_pick % shape.n_params();
        let k = level_pick % (shape.depth(axis) + 1);
        let mut rng = derive_rng(seed, "prop-complement", 0);
        let exp = random_expansion(&shape, &mut rng, false);
        let e = exp.axis_expectation(axis, k).unwrap();
        let q = exp.axis_tail(axis, k).unwrap();
        prop_assert!(e.add(&q).unwrap().max_abs_diff(&exp) == 0.0);
        prop_assert!(q.axis_expectation(axis, k).unwrap().l2_norm_sq() == 0.0);
    }

    #[test]
    fn shift_doubles_surviving_mass(seed in 0u64..1u64 << 48) {
        let shape = Shape::new(vec![3, 2]).unwrap();
        let mut rng = derive_rng(seed, "prop-shift", 0);
        let exp = random_expansion(&shape, &mut rng, false);
        for axis in 0..2 {
            let out = shift(&exp, axis).unwrap();
            let surviving: f64 = (0..exp.coeffs().len())
                .filter(|&f| matches!(
                    exp.axis_indices(f)[axis].level(),
                    Some(l) if l + 1 < shape.depth(axis)
                ))
                .map(|f| exp.coeffs()[f] * exp.coeffs()[f])
                .sum();
            prop_assert!((out.output.l2_norm_sq() - 2.0 * surviving).abs() < 1e-12);
        }
    }

    #[test]
    fn density_norms_scale_quadratically(seed in 0u64..1u64 << 48, c in 0.1f64..4.0) {
        let shape = Shape::uniform(2, 2).unwrap();
        let mut rng = derive_rng(seed, "prop-scale", 0);
        let exp = random_expansion(&shape, &mut rng, true);
        let base = product_bmo_norm(&exp).value;
        let scaled = product_bmo_norm(&exp.scale(c)).value;
        prop_assert!((scaled - c * c * base).abs() < 1e-9 * (1.0 + c * c * base));
        let rb = rect_bmo_norm(&exp).value;
        let rbs = rect_bmo_norm(&exp.scale(c)).value;
        prop_assert!((rbs - c * c * rb).abs() < 1e-9 * (1.0 + c * c * rb));
        // Rectangles are open sets, so the rectangular density never
        // exceeds the open-set supremum.
        prop_assert!(rb <= base + 1e-12);
    }

    #[test]
    fn bmo_vanishes_on_constants(level in 0.0f64..10.0) {
        // Up to summation rounding of non-dyadic constants.
        let shape = Shape::uniform(2, 2).unwrap();
        let sig = GridSignal::constant(shape, level - 5.0);
        prop_assert!(torushaar::norms::bmo_norm(&sig).value < 1e-13);
    }
}
