//! A pure proof-of-work chain: every block is won by the certificate
//! lottery and attested by the winning self-signed certificate.
//!
//! ```bash
//! cargo run --example pow_chain
//! ```

use num_bigint::BigUint;
use r2s::chain::Chain;
use r2s::consensus::{seal_block_pow, ConsensusMode, PowOptions, TrustConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let difficulty = BigUint::from(64u32);
    let mode = ConsensusMode::ProofOfWork {
        difficulty: difficulty.clone(),
        subject: "example-miner".into(),
    };

    // The genesis block is mined and verified like any other block.
    let mut chain = Chain::init(TrustConfig::pow_only(), b"genesis payload", &mode)?;
    println!("genesis sealed at difficulty {difficulty}");

    for i in 1u64..=5 {
        let (tip_hash, number) = chain.expected_next();
        let payload = format!("block payload {i}");
        let outcome = seal_block_pow(
            "example-miner",
            &difficulty,
            number,
            &tip_hash,
            payload.as_bytes(),
            &PowOptions::default(),
        )?;
        println!(
            "block {number}: {} lottery draws, {:?}, hash {}",
            outcome.iterations,
            outcome.elapsed,
            outcome.block.header.block_hash()
        );
        chain.append(outcome.block)?;
    }

    chain.verify()?;
    println!("chain of {} blocks verifies", chain.len());

    // Attestation: achieved difficulty is recomputable from the block hash
    // and always reaches the declared difficulty.
    for index in 0..chain.len() {
        let report = chain.attest_report(index)?;
        println!(
            "attest block {index}: self_signed={} declared={} achieved={}",
            report.self_signed, report.declared_difficulty, report.achieved_difficulty
        );
    }
    Ok(())
}
