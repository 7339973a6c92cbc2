//! The real mining race: actual hashing with the classic nonce miner, then
//! the same race run on the certificate lottery, and a two-sample test that
//! the two lotteries draw from the same distribution.
//!
//! ```bash
//! cargo run --release --example race_real
//! ```

use r2s::sim::stats::ks_statistic_two_sample;
use r2s::sim::{run_pow_race_real, LotteryKind, NodeProfile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let nodes = [
        NodeProfile::new("node-0", 3.0),
        NodeProfile::new("node-1", 1.0),
    ];
    let difficulty = 64;
    let blocks = 600;

    let nonce = run_pow_race_real(&nodes, difficulty, blocks, 1, LotteryKind::Nonce)?;
    println!(
        "nonce miner:        shares={:?} ks_vs_model={:.4}",
        nonce.win_shares,
        nonce.ks_statistic.unwrap()
    );

    let certs = run_pow_race_real(&nodes, difficulty, blocks, 2, LotteryKind::Certificate)?;
    println!(
        "certificate lottery: shares={:?} ks_vs_model={:.4}",
        certs.win_shares,
        certs.ks_statistic.unwrap()
    );

    // Regenerating a key pair per draw is statistically the same lottery as
    // incrementing a nonce: compare the two empirical time distributions.
    let ks = ks_statistic_two_sample(&nonce.samples, &certs.samples);
    println!("two-sample KS between the lotteries: {ks:.4}");
    Ok(())
}
