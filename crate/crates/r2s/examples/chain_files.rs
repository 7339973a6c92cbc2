//! The on-disk formats: a newline-delimited JSON chain file and its sidecar
//! manifest, written, reloaded and fully re-verified.
//!
//! ```bash
//! cargo run --example chain_files
//! ```

use num_bigint::BigUint;
use r2s::chain::{load_chain, write_chain_file, Chain, Manifest};
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

    // A short mixed chain.
    let mut chain = Chain::init(
        TrustConfig::with_anchors(vec![ca_cert.clone()]),
        b"genesis",
        &ConsensusMode::External(identity.clone()),
    )?;
    let (tip_hash, number) = chain.expected_next();
    let mined = seal_block_pow(
        "miner",
        &BigUint::from(32u32),
        number,
        &tip_hash,
        b"mined entry",
        &PowOptions::default(),
    )?;
    chain.append(mined.block)?;
    let (tip_hash, number) = chain.expected_next();
    chain.append(seal_block_external(
        &identity,
        number,
        &tip_hash,
        b"signed entry",
    )?)?;

    // Write both files.
    let dir = std::env::temp_dir().join("r2s-example-files");
    std::fs::create_dir_all(&dir)?;
    let chain_path = dir.join("chain.ndjson");
    let manifest_path = dir.join("manifest.json");
    write_chain_file(&chain_path, &chain)?;
    Manifest::new(vec![ca_cert], None).write_file(&manifest_path)?;

    println!("chain file ({}):", chain_path.display());
    for line in std::fs::read_to_string(&chain_path)?.lines() {
        let shown = if line.len() > 100 {
            format!("{}...", &line[..100])
        } else {
            line.to_string()
        };
        println!("  {shown}");
    }
    println!("\nmanifest ({}):", manifest_path.display());
    println!("{}", std::fs::read_to_string(&manifest_path)?);

    // Loading re-verifies every block against the manifest's trust context.
    let reloaded = load_chain(&chain_path, &manifest_path)?;
    println!("reloaded and verified {} blocks", reloaded.len());
    Ok(())
}
