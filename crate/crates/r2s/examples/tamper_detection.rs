//! What tampering looks like from the verifier's side: flip a byte, rewrite
//! history, reorder the file -- each attempt is caught with an index and a
//! reason.
//!
//! ```bash
//! cargo run --example tamper_detection
//! ```

use num_bigint::BigUint;
use r2s::chain::{parse_chain_bytes, write_chain_file, Chain};
use r2s::consensus::{seal_block_pow, ConsensusMode, PowOptions, TrustConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let difficulty = BigUint::from(8u32);
    let mut chain = Chain::init(
        TrustConfig::pow_only(),
        b"genesis",
        &ConsensusMode::ProofOfWork {
            difficulty: difficulty.clone(),
            subject: "miner".into(),
        },
    )?;
    for i in 1u64..=4 {
        let (tip_hash, number) = chain.expected_next();
        let outcome = seal_block_pow(
            "miner",
            &difficulty,
            number,
            &tip_hash,
            format!("entry {i}").as_bytes(),
            &PowOptions::default(),
        )?;
        chain.append(outcome.block)?;
    }

    let dir = std::env::temp_dir().join("r2s-example-tamper");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("chain.ndjson");
    write_chain_file(&path, &chain)?;
    let original = std::fs::read(&path)?;
    let trust = TrustConfig::pow_only();

    // 1. Flip one byte inside a payload.
    let mut flipped = original.clone();
    let marker = b"\"payload\":\"";
    let pos = find(&flipped, marker).unwrap() + marker.len();
    flipped[pos] = if flipped[pos] == b'B' { b'C' } else { b'B' };
    report("single flipped payload byte", &flipped, &trust);

    // 2. Rewrite a middle block with a freshly mined replacement. The block
    //    itself is internally valid, but its successor still names the old
    //    hash.
    let mut blocks = chain.blocks().to_vec();
    let replacement = seal_block_pow(
        "miner",
        &difficulty,
        2,
        &blocks[1].header.block_hash(),
        b"rewritten history",
        &PowOptions::default(),
    )?;
    blocks[2] = replacement.block;
    match Chain::from_blocks(blocks, trust.clone()) {
        Err(rejection) => println!("rewritten middle block     -> rejected: {rejection}"),
        Ok(_) => unreachable!("rewriting history must not verify"),
    }

    // 3. Swap two lines of the file.
    let text = String::from_utf8(original)?;
    let mut lines: Vec<&str> = text.lines().collect();
    lines.swap(1, 3);
    let swapped = format!("{}\n", lines.join("\n"));
    report("reordered block lines", swapped.as_bytes(), &trust);

    Ok(())
}

fn report(what: &str, bytes: &[u8], trust: &TrustConfig) {
    match parse_chain_bytes(bytes) {
        Err(e) => println!("{what:<26} -> malformed: {e}"),
        Ok(blocks) => match Chain::from_blocks(blocks, trust.clone()) {
            Err(rejection) => println!("{what:<26} -> rejected: {rejection}"),
            Ok(_) => unreachable!("tampered file must not verify"),
        },
    }
}

fn find(haystack: &[u8], needle: &[u8]) -> Option<usize> {
    haystack.windows(needle.len()).position(|w| w == needle)
}
