//! An external-consensus chain: difficulty zero, consensus decided outside
//! the chain (here: trivially, by a single writer), every block attested by
//! a CA-signed identity.
//!
//! ```bash
//! cargo run --example external_chain
//! ```

use r2s::chain::Chain;
use r2s::consensus::{seal_block_external, ConsensusMode, ExternalIdentity, TrustConfig};
use r2s::crypto::{generate_keypair, issue_certificate, make_self_signed_certificate};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // One CA, one writer identity certified by it.
    let ca_keys = generate_keypair(None)?;
    let ca_cert = make_self_signed_certificate(&ca_keys, "example-root");
    let writer_keys = generate_keypair(None)?;
    let writer_cert = issue_certificate(
        &ca_keys,
        "example-root",
        &writer_keys.public_key(),
        "writer-1",
    )?;
    let identity = ExternalIdentity {
        keys: writer_keys,
        certificate: writer_cert,
    };

    // The chain trusts the CA; blocks chain to it through their certificates.
    let trust = TrustConfig::with_anchors(vec![ca_cert]);
    let mut chain = Chain::init(
        trust,
        b"genesis",
        &ConsensusMode::External(identity.clone()),
    )?;

    for i in 1u64..=5 {
        let (tip_hash, number) = chain.expected_next();
        let payload = format!("entry {i}");
        let block = seal_block_external(&identity, number, &tip_hash, payload.as_bytes())?;
        chain.append(block)?;
    }
    chain.verify()?;
    println!("external chain of {} blocks verifies", chain.len());

    let report = chain.attest_report(3)?;
    println!(
        "attest block 3: mode={} subject={} issuer={} signature_valid={}",
        report.mode, report.subject, report.issuer, report.signature_valid
    );

    // A self-signed certificate cannot seal external blocks.
    let rogue_keys = generate_keypair(None)?;
    let rogue = ExternalIdentity {
        certificate: make_self_signed_certificate(&rogue_keys, "rogue"),
        keys: rogue_keys,
    };
    let (tip_hash, number) = chain.expected_next();
    let err = seal_block_external(&rogue, number, &tip_hash, b"nope").unwrap_err();
    println!("self-signed identity rejected at sealing: {err}");
    Ok(())
}
