use rand::Rng;
use rand_distr::{Distribution, Uniform};

use super::Matrix;

/// He-uniform initialisation: entries drawn from `U(-b, b)` with `b = sqrt(6 / in_dim)`.
///
/// Panics if either dimension is zero.
pub fn init_weights<R: Rng + ?Sized>(in_dim: usize, out_dim: usize, rng: &mut R) -> Matrix {
    assert!(in_dim > 0 && out_dim > 0, "layer dims must be positive");
    let bound = he_bound(in_dim);
    let dist = Uniform::new_inclusive(-bound, bound).expect("finite bound");
    let data = (0..in_dim * out_dim).map(|_| dist.sample(rng)).collect();
    Matrix::from_vec(in_dim, out_dim, data).expect("length matches")
}

pub fn he_bound(in_dim: usize) -> f64 {
    (6.0 / in_dim as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn entries_within_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w = init_weights(12, 7, &mut rng);
        let b = he_bound(12);
        assert!(w.as_slice().iter().all(|v| v.abs() <= b));
    }

    #[test]
    fn same_seed_same_weights() {
        let a = init_weights(5, 5, &mut ChaCha8Rng::seed_from_u64(9));
        let b = init_weights(5, 5, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn mean_near_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let w = init_weights(4, 2500, &mut rng);
        let mean = w.as_slice().iter().sum::<f64>() / w.as_slice().len() as f64;
        assert!(mean.abs() < 0.05, "mean {mean}");
    }
}
