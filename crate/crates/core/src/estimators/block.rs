use crate::lindley::BlockedTrace;

/// Block-MLE sCGF `(1/B) log( (1/K) sum_i exp(theta Y(i)) )`, evaluated by
/// log-sum-exp so that `theta * Y` far beyond the `exp` overflow threshold is
/// fine. Exactly zero at `theta = 0`.
pub fn block_scgf(blocked: &BlockedTrace, theta: f64) -> f64 {
    let blocks = blocked.blocks();
    let peak = blocks
        .iter()
        .map(|y| theta * y)
        .fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = blocks.iter().map(|y| (theta * y - peak).exp()).sum();
    let mean = sum / blocks.len() as f64;
    (peak + mean.ln()) / blocked.block_size() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn blocks(y: &[f64], b: usize) -> BlockedTrace {
        BlockedTrace::from_blocks(y.to_vec(), b).unwrap()
    }

    #[test]
    fn single_sample() {
        assert_eq!(block_scgf(&blocks(&[0.5], 1), 2.0), 1.0);
    }

    #[test]
    fn log_cosh() {
        let b = blocks(&[-1.0, 1.0], 1);
        // mpmath: log cosh 1 = 0.43378083048302718703
        assert!((block_scgf(&b, 1.0) - 0.433_780_830_483_027_2).abs() < 1e-15);
        for theta in [-3.0f64, -0.2, 0.7, 5.0] {
            let oracle = ((-theta).exp() + theta.exp()).ln() - 2f64.ln();
            assert!((block_scgf(&b, theta) - oracle).abs() < 1e-14);
        }
    }

    #[test]
    fn no_overflow_for_large_arguments() {
        let b = blocks(&[-2.0, 3.0, 1.0], 1);
        let v = block_scgf(&b, 1000.0);
        // dominated by 3000 - log 3
        assert!((v - (3000.0 - 3f64.ln())).abs() < 1e-9);
        let v = block_scgf(&b, -1000.0);
        assert!((v - (2000.0 - 3f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn block_size_divides() {
        let b = blocks(&[2.0, -4.0], 2);
        let oracle = ((2.0f64).exp() + (-4.0f64).exp()).ln() - 2f64.ln();
        assert!((block_scgf(&b, 1.0) - oracle / 2.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn zero_at_origin(y in proptest::collection::vec(-50.0f64..50.0, 1..40), b in 1usize..5) {
            prop_assert_eq!(block_scgf(&blocks(&y, b), 0.0), 0.0);
        }

        #[test]
        fn midpoint_convex(
            y in proptest::collection::vec(-10.0f64..10.0, 1..40),
            t1 in -20.0f64..20.0,
            t2 in -20.0f64..20.0,
        ) {
            let b = blocks(&y, 1);
            let mid = block_scgf(&b, 0.5 * (t1 + t2));
            let chord = 0.5 * (block_scgf(&b, t1) + block_scgf(&b, t2));
            prop_assert!(mid <= chord + 1e-12 * (1.0 + chord.abs()));
        }
    }
}
