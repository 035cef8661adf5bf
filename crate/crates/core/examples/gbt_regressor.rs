//! The single-target booster on its own: fit a noisy step-plus-slope
//! function, watch the training loss, and let early stopping pick the size.
//!
//!     cargo run --release --example gbt_regressor

use engagement::gbt::{fit, GbtParams};
use engagement::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 2000;
    let rows: Vec<[f64; 2]> = (0..n).map(|_| [rng.random_range(0.0..10.0), rng.random_range(0.0..1.0)]).collect();
    let y: Vec<f64> = rows
        .iter()
        .map(|r| if r[0] > 5.0 { 2.0 } else { 0.0 } + 0.3 * r[1] + rng.random_range(-0.1..0.1))
        .collect();
    let x = Matrix::from_rows(&rows);

    let params = GbtParams {
        max_iter: 500,
        ..Default::default()
    };
    let model = fit(&x, &y, &params)?;
    println!(
        "{} trees kept (stopped at iteration {:?}), baseline {:.4}",
        model.trees.len(),
        model.stopped_early_at,
        model.baseline
    );
    for (i, loss) in model.train_loss_curve.iter().enumerate().step_by(10) {
        println!("iteration {i:>3}: train mse {loss:.6}");
    }
    let probe = Matrix::from_rows(&[[2.0, 0.5], [8.0, 0.5]]);
    let p = model.predict(&probe)?;
    println!("f(2, 0.5) = {:.3} (true 0.15), f(8, 0.5) = {:.3} (true 2.15)", p[0], p[1]);
    Ok(())
}
