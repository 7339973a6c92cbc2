//! One chain, three consensus regimes: proof of work at two difficulties
//! and CA-attested external blocks, interleaved. Switching the method never
//! changes the block format, so the whole file verifies with one pass.
//!
//! ```bash
//! cargo run --example mixed_consensus
//! ```

use num_bigint::BigUint;
use r2s::chain::Chain;
use r2s::consensus::{
    seal_block_external, seal_block_pow, ConsensusMode, ExternalIdentity, PowOptions, TrustConfig,
};
use r2s::crypto::{generate_keypair, issue_certificate, make_self_signed_certificate};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ca_keys = generate_keypair(None)?;
    let ca_cert = make_self_signed_certificate(&ca_keys, "root");
    let keys = generate_keypair(None)?;
    let cert = issue_certificate(&ca_keys, "root", &keys.public_key(), "writer")?;
    let identity = ExternalIdentity {
        keys,
        certificate: cert,
    };

    let mut chain = Chain::init(
        TrustConfig::with_anchors(vec![ca_cert]),
        b"genesis",
        &ConsensusMode::ProofOfWork {
            difficulty: BigUint::from(16u32),
            subject: "miner".into(),
        },
    )?;

    // Interleave: low-difficulty PoW, external, high-difficulty PoW, ...
    for i in 1u64..=6 {
        let (tip_hash, number) = chain.expected_next();
        let payload = format!("payload {i}").into_bytes();
        let block = match i % 3 {
            0 => {
                seal_block_pow(
                    "miner",
                    &BigUint::from(256u32),
                    number,
                    &tip_hash,
                    &payload,
                    &PowOptions::default(),
                )?
                .block
            }
            1 => {
                seal_block_pow(
                    "miner",
                    &BigUint::from(16u32),
                    number,
                    &tip_hash,
                    &payload,
                    &PowOptions::default(),
                )?
                .block
            }
            _ => seal_block_external(&identity, number, &tip_hash, &payload)?,
        };
        chain.append(block)?;
    }
    chain.verify()?;

    println!("block | difficulty | mode     | issuer");
    for block in chain.blocks() {
        let h = &block.header;
        let report = chain.attest_report(h.block_number as usize)?;
        println!(
            "{:>5} | {:>10} | {:<8} | {}",
            h.block_number,
            h.difficulty.to_str_radix(10),
            report.mode,
            report.issuer
        );
    }

    // Every line of the serialized chain has the same schema.
    let first_keys = schema_of(&chain.blocks()[0].to_wire_json());
    for block in chain.blocks() {
        assert_eq!(schema_of(&block.to_wire_json()), first_keys);
    }
    println!(
        "\nall {} blocks share one schema: {first_keys:?}",
        chain.len()
    );
    Ok(())
}

fn schema_of(line: &str) -> Vec<String> {
    // Values in the wire form are strings, so every quoted token followed by
    // a colon is a key.
    let mut keys = Vec::new();
    let bytes = line.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'"' {
            let end = i + 1 + line[i + 1..].find('"').unwrap();
            if bytes.get(end + 1) == Some(&b':') {
                keys.push(line[i + 1..end].to_string());
                // skip the value
            }
            i = end + 1;
        } else {
            i += 1;
        }
    }
    keys
}
