/// Central-difference gradient `(f(θ+h) − f(θ−h)) / 2h` for every coordinate of `params`.
pub fn finite_diff_gradient<F>(mut loss_fn: F, params: &[f64], step: f64) -> Vec<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    assert!(step > 0.0, "finite-difference step must be positive");
    let mut theta = params.to_vec();
    (0..theta.len())
        .map(|i| {
            let orig = theta[i];
            theta[i] = orig + step;
            let up = loss_fn(&theta);
            theta[i] = orig - step;
            let down = loss_fn(&theta);
            theta[i] = orig;
            (up - down) / (2.0 * step)
        })
        .collect()
}

/// `‖a − b‖ / max(‖a‖, ‖b‖)`, or 0 when both are zero.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let scale = norm(a).max(norm(b));
    if scale == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic() {
        let g = finite_diff_gradient(|t| t[0] * t[0], &[3.0], 1e-4);
        assert!((g[0] - 6.0).abs() < 1e-6);
    }

    #[test]
    fn constant_and_linear() {
        let g = finite_diff_gradient(|_| 4.2, &[1.0, -2.0], 1e-4);
        assert_eq!(g, vec![0.0, 0.0]);
        let g = finite_diff_gradient(|t| 2.5 * t[0], &[1.0], 1e-4);
        assert!((g[0] - 2.5).abs() < 1e-9);
    }
}
