//! Sealing is expensive, verification is not: the lottery runs ~d draws,
//! while checking the result costs exactly two hashes and two signature
//! verifications at any difficulty.
//!
//! ```bash
//! cargo run --example verification_cost
//! ```

use num_bigint::BigUint;
use r2s::block::genesis_previous_hash;
use r2s::consensus::{seal_block_pow, PowOptions};
use r2s::sim::verification_cost_probe;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("difficulty | lottery draws | verify hashes | verify sig checks");
    for difficulty in [4u64, 64, 1024, 4096] {
        let outcome = seal_block_pow(
            "miner",
            &BigUint::from(difficulty),
            0,
            &genesis_previous_hash(),
            b"cost probe",
            &PowOptions::default(),
        )?;
        let counts = verification_cost_probe(&outcome.block, &genesis_previous_hash(), 0)?;
        println!(
            "{difficulty:>10} | {:>13} | {:>13} | {:>17}",
            outcome.iterations, counts.hashes, counts.signature_verifies
        );
    }
    println!("\nverification cost never depends on the difficulty");
    Ok(())
}
