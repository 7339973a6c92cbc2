//! The analytic mining race: sample the exponential model directly and
//! compare empirical win shares and timing against the closed forms.
//!
//! ```bash
//! cargo run --example race_analytic
//! ```

use r2s::sim::{expected_win_share, model_cdf, run_pow_race_analytic, NodeProfile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rates = [3.0, 1.0, 2.0, 6.0];
    let nodes: Vec<NodeProfile> = rates
        .iter()
        .enumerate()
        .map(|(i, &r)| NodeProfile::new(format!("node-{i}"), r))
        .collect();
    let difficulty = 32.0;
    let blocks = 50_000;

    let report = run_pow_race_analytic(&nodes, difficulty, blocks, 7)?;
    let expected = expected_win_share(&rates)?;

    println!("{blocks} blocks, difficulty {difficulty}, rates {rates:?}\n");
    println!("node    | rate | expected share | empirical share");
    for (i, node) in nodes.iter().enumerate() {
        println!(
            "{} | {:>4} | {:>14.4} | {:>15.4}",
            node.node_id, node.hash_rate, expected[i], report.win_shares[i]
        );
    }

    println!(
        "\nKS statistic of winning times vs the exponential model: {:.5}",
        report.ks_statistic.unwrap()
    );

    // Spot-check the model itself: the median of Exp(rate) is ln2/rate.
    let total_rate: f64 = rates.iter().sum();
    let median = std::f64::consts::LN_2 * difficulty / total_rate;
    println!(
        "model CDF at the predicted median ({median:.3} s): {:.4}",
        model_cdf(median, total_rate, difficulty)?
    );
    Ok(())
}
