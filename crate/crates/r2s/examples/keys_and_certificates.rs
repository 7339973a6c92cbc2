//! Key pairs, self-signed and CA-signed certificates, and the on-disk
//! envelope formats.
//!
//! ```bash
//! cargo run --example keys_and_certificates
//! ```

use r2s::crypto::{
    generate_keypair, issue_certificate, make_self_signed_certificate, read_certificate_file,
    read_key_file, sign, verify, write_certificate_file, write_key_file,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Seeded generation is reproducible; omit the seed for OS entropy.
    let ca_keys = generate_keypair(Some(&[7u8; 32]))?;
    let node_keys = generate_keypair(None)?;

    // Sign and verify a message.
    let signature = sign(&node_keys, b"hello");
    assert!(verify(&node_keys.public_key(), b"hello", &signature));
    assert!(!verify(&node_keys.public_key(), b"hello!", &signature));
    println!("signature round trip: ok");

    // A CA is just a self-signed certificate whose key issues others.
    let ca_cert = make_self_signed_certificate(&ca_keys, "example-root");
    assert!(ca_cert.verify_self_signed());
    println!(
        "CA certificate: subject={} fingerprint={}",
        ca_cert.subject(),
        ca_cert.fingerprint()
    );

    let node_cert = issue_certificate(&ca_keys, "example-root", &node_keys.public_key(), "node-1")?;
    assert!(node_cert.verify_signature_under(ca_cert.public_key()));
    assert!(!node_cert.verify_self_signed());
    println!(
        "issued certificate: subject={} issuer={} fingerprint={}",
        node_cert.subject(),
        node_cert.issuer(),
        node_cert.fingerprint()
    );

    // Envelope files: a two-line header + base64 format.
    let dir = std::env::temp_dir().join("r2s-example-keys");
    std::fs::create_dir_all(&dir)?;
    let key_path = dir.join("node.key");
    let cert_path = dir.join("node.cert");
    write_key_file(&key_path, &node_keys)?;
    write_certificate_file(&cert_path, &node_cert)?;

    let reloaded_keys = read_key_file(&key_path)?;
    let reloaded_cert = read_certificate_file(&cert_path)?;
    assert_eq!(reloaded_keys.public_key(), node_keys.public_key());
    assert_eq!(reloaded_cert, node_cert);
    println!("envelope files round trip: {}", dir.display());

    Ok(())
}
