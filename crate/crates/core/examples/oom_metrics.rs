//! The order-of-magnitude metric and the regression metrics on counts.
//!
//!     cargo run --example oom_metrics

use engagement::metrics::{mae, mae_orders, oom_accuracy, order_of, r2, rmse, MetricsReport, TargetMetrics};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for x in [0.0, 0.5, 9.0, 10.0, 999.0, 1000.0, 1e15] {
        println!("order_of({x}) = {}", order_of(x)?);
    }
    let truth = [12.0, 480.0, 3100.0, 75_000.0, 9.0];
    let pred = [15.0, 520.0, 2700.0, 120_000.0, 11.0];
    println!("oom_accuracy = {:.2}", oom_accuracy(&pred, &truth)?);
    println!("mae_orders   = {:.4}", mae_orders(&pred, &truth)?);
    println!("mae          = {:.2}", mae(&pred, &truth)?);
    println!("rmse         = {:.2}", rmse(&pred, &truth)?);
    println!("r2           = {:.4}", r2(&pred, &truth)?);

    let m = TargetMetrics::compute(&pred, &truth)?;
    print!("{}", MetricsReport { comments: m, likes: m }.to_table());
    Ok(())
}
