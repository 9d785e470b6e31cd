//! Logarithmic test functions: constant `log(4/|I|)` on the interval,
//! decaying logarithmically away from it, with dyadic BMO norm bounded
//! uniformly over intervals and depths.

use crate::error::{Error, Result};
use crate::geometry::{DyadicInterval, DyadicRectangle, Shape};
use crate::signal::{broadcast, GridSignal};

/// Circle distance between two points of `[0,1)`.
fn circle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(1.0 - d)
}

/// One-parameter test function `t ↦ log(4 / max(|I|, dist(t, center)))`
/// sampled at cell centers.
pub fn log_test_1d(interval: &DyadicInterval, depth: usize) -> Result<GridSignal> {
    if interval.level() > depth {
        return Err(Error::RectangleTooFine { level: interval.level(), depth });
    }
    let shape = Shape::new(vec![depth])?;
    let len = interval.len();
    let center = interval.center();
    Ok(GridSignal::sample(shape, |x| {
        (4.0 / len.max(circle_dist(x[0], center))).ln()
    }))
}

/// Sum of per-axis log tests for a dyadic rectangle: constant
/// `Σ_j log(4/|R_j|)` on the rectangle.
pub fn log_test_rect(rect: &DyadicRectangle, shape: &Shape) -> Result<GridSignal> {
    if rect.n_params() != shape.n_params() {
        return Err(Error::ShapeMismatch("rectangle arity must match shape".into()));
    }
    let mut acc = GridSignal::zeros(shape.clone());
    for (axis, iv) in rect.intervals().iter().enumerate() {
        let one_d = log_test_1d(iv, shape.depth(axis))?;
        acc = acc.add(&broadcast(&one_d, shape, &[axis])?)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::rect_cells;
    use crate::norms::bmo_norm;
    use crate::signal::rect_mean;

    const LOG4: f64 = 1.3862943611198906;

    #[test]
    fn whole_circle_gives_constant_log4() {
        let sig = log_test_1d(&DyadicInterval::whole(), 4).unwrap();
        for &v in sig.values() {
            assert!((v - LOG4).abs() < 1e-14);
        }
    }

    #[test]
    fn value_on_interval_is_exact() {
        for level in 0..5 {
            let iv = DyadicInterval::new(level, (1 << level) - 1).unwrap();
            let sig = log_test_1d(&iv, 6).unwrap();
            let expect = (4.0 / iv.len()).ln();
            for cell in iv.cell_range(6).unwrap() {
                assert!(
                    (sig.values()[cell] - expect).abs() < 1e-13,
                    "level {level} cell {cell}"
                );
            }
        }
    }

    #[test]
    fn bmo_norm_uniform_over_levels() {
        // The 1D dyadic BMO norms stay in a fixed band over all levels at
        // depth 6 (exhaustive oracle scan inside bmo_norm).
        let depth = 6;
        let mut norms = Vec::new();
        for level in 0..depth {
            for offset in [0, (1usize << level) / 2, (1 << level) - 1] {
                let iv = DyadicInterval::new(level, offset.min((1 << level) - 1)).unwrap();
                norms.push(bmo_norm(&log_test_1d(&iv, depth).unwrap()).value);
            }
        }
        let max = norms.iter().cloned().fold(0.0f64, f64::max);
        assert!(max < 2.0, "log test family BMO norm grew to {max}");
    }

    #[test]
    fn rect_version_constant_on_rectangle_and_means_exact() {
        let shape = Shape::uniform(2, 3).unwrap();
        let rect = DyadicRectangle::new(vec![
            DyadicInterval::new(1, 0).unwrap(),
            DyadicInterval::new(2, 3).unwrap(),
        ]);
        let sig = log_test_rect(&rect, &shape).unwrap();
        let expect: f64 = rect.intervals().iter().map(|iv| (4.0 / iv.len()).ln()).sum();
        for &c in rect_cells(&shape, &rect).unwrap().iter() {
            assert!((sig.values()[c] - expect).abs() < 1e-12);
        }
        // Mean over any dyadic sub-rectangle equals the same constant.
        let sub = DyadicRectangle::new(vec![
            DyadicInterval::new(2, 1).unwrap(),
            DyadicInterval::new(3, 6).unwrap(),
        ]);
        assert!(sub.contained_in(&rect));
        assert!((rect_mean(&sig, &sub).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn whole_torus_rect_is_constant_n_log4() {
        let shape = Shape::uniform(3, 2).unwrap();
        let sig = log_test_rect(&DyadicRectangle::whole(3), &shape).unwrap();
        for &v in sig.values() {
            assert!((v - 3.0 * LOG4).abs() < 1e-13);
        }
    }

    #[test]
    fn bmo_of_sum_bounded_by_sum_of_1d_norms() {
        let shape = Shape::uniform(2, 3).unwrap();
        let rect = DyadicRectangle::new(vec![
            DyadicInterval::new(2, 1).unwrap(),
            DyadicInterval::new(1, 1).unwrap(),
        ]);
        let sig = log_test_rect(&rect, &shape).unwrap();
        let sum_1d: f64 = rect
            .intervals()
            .iter()
            .enumerate()
            .map(|(axis, iv)| bmo_norm(&log_test_1d(iv, shape.depth(axis)).unwrap()).value)
            .sum();
        assert!(bmo_norm(&sig).value <= sum_1d + 1e-12);
    }

    #[test]
    fn rejects_interval_finer_than_grid() {
        assert!(log_test_1d(&DyadicInterval::new(4, 0).unwrap(), 3).is_err());
    }
}
