//! Compares backprop gradients with central finite differences for a small
//! network under each hidden activation.
//!
//! cargo run --example gradient_check

use mixgan::nn::{finite_diff_gradient, mse_loss, relative_error, Activation, Matrix, Mlp};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> mixgan::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let x = Matrix::from_vec(5, 4, (0..20).map(|_| rng.random_range(-1.0..1.0)).collect())?;
    let t = Matrix::from_vec(5, 3, (0..15).map(|_| rng.random_range(-1.0..1.0)).collect())?;
    for hidden in [
        Activation::LeakyRelu { slope: 0.01 },
        Activation::Relu,
        Activation::Sigmoid,
        Activation::Linear,
    ] {
        let net = Mlp::with_dims(&[4, 6, 6, 3], hidden, Activation::Linear, 0.0, vec![], &mut rng)?;
        let cache = net.forward(&x, None)?;
        let (loss, grad_out) = mse_loss(cache.output(), &t)?;
        let analytic = net.backward(&cache, &grad_out)?.flatten();
        let numeric = finite_diff_gradient(
            |p| {
                let mut m = net.clone();
                m.set_flat_params(p).expect("same length");
                mse_loss(m.forward(&x, None).expect("shape").output(), &t).expect("shape").0
            },
            &net.flat_params(),
            1e-6,
        );
        println!(
            "{:<28} loss {loss:.5}  params {:>3}  rel err {:.2e}",
            format!("{hidden:?}"),
            analytic.len(),
            relative_error(&analytic, &numeric)
        );
    }
    Ok(())
}
