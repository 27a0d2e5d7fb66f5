//! Finite-difference oracles and grids shared by unit tests.

/// Central difference of order `order` (1..=4), fourth-order accurate in `h`.
pub fn central_diff<F: Fn(f64) -> f64>(f: F, x: f64, order: u32, h: f64) -> f64 {
    let (offsets, weights, denom): (&[i32], &[f64], f64) = match order {
        1 => (&[-2, -1, 1, 2], &[1.0, -8.0, 8.0, -1.0], 12.0 * h),
        2 => (&[-2, -1, 0, 1, 2], &[-1.0, 16.0, -30.0, 16.0, -1.0], 12.0 * h * h),
        3 => (
            &[-3, -2, -1, 1, 2, 3],
            &[1.0, -8.0, 13.0, -13.0, 8.0, -1.0],
            8.0 * h.powi(3),
        ),
        4 => (
            &[-3, -2, -1, 0, 1, 2, 3],
            &[-1.0, 12.0, -39.0, 56.0, -39.0, 12.0, -1.0],
            6.0 * h.powi(4),
        ),
        _ => panic!("unsupported difference order {order}"),
    };
    offsets
        .iter()
        .zip(weights)
        .map(|(&o, &w)| w * f(x + o as f64 * h))
        .sum::<f64>()
        / denom
}

/// One Richardson step on [`central_diff`]: `(16 D(h/2) - D(h))/15`.
pub fn richardson_diff<F: Fn(f64) -> f64>(f: F, x: f64, order: u32, h: f64) -> f64 {
    let coarse = central_diff(&f, x, order, h);
    let fine = central_diff(&f, x, order, h / 2.0);
    (16.0 * fine - coarse) / 15.0
}

pub fn log_grid(min: f64, max: f64, points: usize) -> Vec<f64> {
    let ratio = max / min;
    (0..points)
        .map(|i| min * ratio.powf(i as f64 / (points - 1) as f64))
        .collect()
}

#[test]
fn stencils_differentiate_exp() {
    for order in 1..=4 {
        let d = central_diff(f64::exp, 0.3, order, 1e-2);
        assert!((d - 0.3f64.exp()).abs() < 1e-6, "order {order}: {d}");
    }
}
