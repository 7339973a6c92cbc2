//! The allowlist defense: blocks signed with unknown certificates are
//! rejected, and the membership check stays flat no matter how long the
//! list grows.
//!
//! ```bash
//! cargo run --example sybil_allowlist
//! ```

use std::time::Instant;

use num_bigint::BigUint;
use r2s::block::genesis_previous_hash;
use r2s::chain::Allowlist;
use r2s::consensus::{seal_block_pow, verify_block, PowOptions, RejectReason, TrustConfig};
use r2s::crypto::hash;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // A perfectly valid proof-of-work block from a node nobody registered.
    let rogue = seal_block_pow(
        "rogue-node",
        &BigUint::from(16u32),
        0,
        &genesis_previous_hash(),
        b"sybil attempt",
        &PowOptions::default(),
    )?;
    let fingerprint = rogue.block.header.certificate.fingerprint();

    for size in [100usize, 1_000, 10_000] {
        let allowlist = Allowlist::from_fingerprints(
            (0..size as u64).map(|i| hash(format!("registered-node-{i}").as_bytes())),
        );
        let trust = TrustConfig {
            trust_anchors: Vec::new(),
            allowlist: Some(allowlist.clone()),
        };

        let verdict = verify_block(&rogue.block, &genesis_previous_hash(), 0, &trust);
        assert_eq!(verdict, Err(RejectReason::UnknownCertificate));

        // Median cost of the membership lookup itself.
        let mut timings: Vec<f64> = (0..31)
            .map(|_| {
                let started = Instant::now();
                for _ in 0..2000 {
                    std::hint::black_box(allowlist.contains(std::hint::black_box(&fingerprint)));
                }
                started.elapsed().as_nanos() as f64 / 2000.0
            })
            .collect();
        timings.sort_by(|a, b| a.partial_cmp(b).unwrap());
        println!(
            "allowlist size {size:>6}: verdict=unknown-certificate, median lookup {:.0} ns",
            timings[15]
        );
    }

    // With the fingerprint registered, the same block is accepted.
    let trust = TrustConfig {
        trust_anchors: Vec::new(),
        allowlist: Some(Allowlist::from_fingerprints([fingerprint])),
    };
    verify_block(&rogue.block, &genesis_previous_hash(), 0, &trust)
        .expect("registered certificate verifies");
    println!("after registering the fingerprint: accepted");
    Ok(())
}
