//! Hashing, key pairs, signatures and the simplified certificate format.
//!
//! Certificates here are deliberately minimal: a subject, an issuer, a random
//! serial, a public key, a scheme identifier and the issuer's signature over
//! the preceding fields. The canonical encoding is byte-stable (fixed field
//! order, each field length-prefixed), so the same certificate always hashes
//! to the same fingerprint and signs to the same bytes.

use std::cell::Cell;
use std::fmt;
use std::fs;
use std::path::Path;

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use ed25519_dalek::{Signer, SigningKey, VerifyingKey};
use rand::rngs::OsRng;
use rand::RngCore;
use sha2::{Digest as _, Sha256};
use thiserror::Error;

/// Identifier of the only signature scheme currently implemented.
pub const SCHEME_ED25519: &str = "ed25519";

/// Header line of a private key file.
pub const KEY_FILE_HEADER: &str = "R2S-PRIVATE-KEY v1";

/// Header line of a certificate file.
pub const CERT_FILE_HEADER: &str = "R2S-CERT v1";

/// Length of a certificate serial in bytes.
pub const SERIAL_LEN: usize = 16;

#[derive(Debug, Error)]
pub enum CryptoError {
    #[error("seed must be 32 bytes, got {0}")]
    SeedLength(usize),
    #[error("certificate subject may not equal the issuing CA name")]
    SubjectIsIssuer,
    #[error("malformed {what}: {detail}")]
    Malformed { what: &'static str, detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn malformed(what: &'static str, detail: impl Into<String>) -> CryptoError {
    CryptoError::Malformed {
        what,
        detail: detail.into(),
    }
}

thread_local! {
    static HASH_CALLS: Cell<u64> = const { Cell::new(0) };
    static VERIFY_CALLS: Cell<u64> = const { Cell::new(0) };
}

/// Running totals of hash and signature-verification invocations on this
/// thread. Used by the verification cost probe; the counters themselves cost
/// one thread-local increment per operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OperationCounts {
    pub hashes: u64,
    pub signature_verifies: u64,
}

impl OperationCounts {
    /// Snapshot of the current thread's counters.
    pub fn snapshot() -> Self {
        Self {
            hashes: HASH_CALLS.with(Cell::get),
            signature_verifies: VERIFY_CALLS.with(Cell::get),
        }
    }

    /// Counts accumulated since an earlier snapshot.
    pub fn since(&self, earlier: &OperationCounts) -> OperationCounts {
        OperationCounts {
            hashes: self.hashes - earlier.hashes,
            signature_verifies: self.signature_verifies - earlier.signature_verifies,
        }
    }
}

/// A SHA-256 digest.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Digest([u8; 32]);

impl Digest {
    pub const LEN: usize = 32;

    pub const fn from_bytes(bytes: [u8; 32]) -> Self {
        Self(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    /// Lowercase 64-character hexadecimal rendering.
    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    /// Parses the wire form: exactly 64 lowercase hex characters.
    /// Uppercase digits are rejected so that every digest has a single
    /// serialized representation.
    pub fn from_hex(s: &str) -> Result<Self, CryptoError> {
        if s.len() != 64 || !s.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f')) {
            return Err(malformed(
                "digest",
                format!("expected 64 lowercase hex chars, got {s:?}"),
            ));
        }
        let raw = hex::decode(s).map_err(|e| malformed("digest", e.to_string()))?;
        let mut bytes = [0u8; 32];
        bytes.copy_from_slice(&raw);
        Ok(Self(bytes))
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", self.to_hex())
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// SHA-256 of `data`.
pub fn hash(data: &[u8]) -> Digest {
    HASH_CALLS.with(|c| c.set(c.get() + 1));
    let out = Sha256::digest(data);
    Digest(out.into())
}

/// An Ed25519 signing key plus its derived verification key.
///
/// The private side is the 32-byte seed; the public key is always derivable
/// from it, so seeded generation is reproducible byte for byte.
#[derive(Clone)]
pub struct KeyPair {
    signing: SigningKey,
    scheme_id: String,
}

impl KeyPair {
    pub fn public_key(&self) -> [u8; 32] {
        self.signing.verifying_key().to_bytes()
    }

    pub fn private_seed(&self) -> [u8; 32] {
        self.signing.to_bytes()
    }

    pub fn scheme_id(&self) -> &str {
        &self.scheme_id
    }
}

impl fmt::Debug for KeyPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Never print the private seed.
        f.debug_struct("KeyPair")
            .field("public_key", &hex::encode(self.public_key()))
            .field("scheme_id", &self.scheme_id)
            .finish()
    }
}

/// Generates a key pair, deterministically when a 32-byte seed is given.
pub fn generate_keypair(seed: Option<&[u8]>) -> Result<KeyPair, CryptoError> {
    let seed_bytes: [u8; 32] = match seed {
        Some(s) => s.try_into().map_err(|_| CryptoError::SeedLength(s.len()))?,
        None => {
            let mut buf = [0u8; 32];
            OsRng.fill_bytes(&mut buf);
            buf
        }
    };
    Ok(keypair_from_seed(seed_bytes))
}

/// Deterministic key pair from exactly 32 seed bytes.
pub fn keypair_from_seed(seed: [u8; 32]) -> KeyPair {
    KeyPair {
        signing: SigningKey::from_bytes(&seed),
        scheme_id: SCHEME_ED25519.to_string(),
    }
}

/// A detached signature tagged with its scheme.
#[derive(Clone, PartialEq, Eq)]
pub struct Signature {
    bytes: Vec<u8>,
    scheme_id: String,
}

impl Signature {
    pub fn new(bytes: Vec<u8>, scheme_id: impl Into<String>) -> Self {
        Self {
            bytes,
            scheme_id: scheme_id.into(),
        }
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn scheme_id(&self) -> &str {
        &self.scheme_id
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Signature({}, {})",
            self.scheme_id,
            hex::encode(&self.bytes)
        )
    }
}

/// Signs `message` with the private key.
pub fn sign(keys: &KeyPair, message: &[u8]) -> Signature {
    let sig = keys.signing.sign(message);
    Signature {
        bytes: sig.to_bytes().to_vec(),
        scheme_id: keys.scheme_id.clone(),
    }
}

/// Checks `sig` against `message` under `public_key`.
///
/// Malformed keys, unknown schemes and wrong-length signatures all return
/// `false`; this function never panics on attacker-controlled input.
pub fn verify(public_key: &[u8], message: &[u8], sig: &Signature) -> bool {
    VERIFY_CALLS.with(|c| c.set(c.get() + 1));
    if sig.scheme_id != SCHEME_ED25519 {
        return false;
    }
    let Ok(pk_bytes) = <[u8; 32]>::try_from(public_key) else {
        return false;
    };
    let Ok(vk) = VerifyingKey::from_bytes(&pk_bytes) else {
        return false;
    };
    let Ok(sig_bytes) = <[u8; 64]>::try_from(sig.bytes.as_slice()) else {
        return false;
    };
    let dalek_sig = ed25519_dalek::Signature::from_bytes(&sig_bytes);
    vk.verify_strict(message, &dalek_sig).is_ok()
}

/// Appends one length-prefixed field to a canonical encoding buffer.
pub(crate) fn encode_field(buf: &mut Vec<u8>, bytes: &[u8]) {
    buf.extend_from_slice(&(bytes.len() as u32).to_be_bytes());
    buf.extend_from_slice(bytes);
}

fn take_field<'a>(input: &mut &'a [u8], what: &'static str) -> Result<&'a [u8], CryptoError> {
    if input.len() < 4 {
        return Err(malformed(what, "truncated length prefix"));
    }
    let len = u32::from_be_bytes(input[..4].try_into().unwrap()) as usize;
    let rest = &input[4..];
    if rest.len() < len {
        return Err(malformed(what, "field length exceeds input"));
    }
    let (field, rest) = rest.split_at(len);
    *input = rest;
    Ok(field)
}

/// A simplified identity certificate.
///
/// Self-signed when `subject == issuer` and the signature verifies under the
/// certificate's own public key; CA-signed when it verifies under the
/// issuer's key.
#[derive(Clone, PartialEq, Eq)]
pub struct Certificate {
    subject: String,
    issuer: String,
    serial: [u8; SERIAL_LEN],
    public_key: Vec<u8>,
    scheme_id: String,
    issuer_signature: Vec<u8>,
}

impl Certificate {
    pub fn subject(&self) -> &str {
        &self.subject
    }

    pub fn issuer(&self) -> &str {
        &self.issuer
    }

    pub fn serial(&self) -> &[u8; SERIAL_LEN] {
        &self.serial
    }

    pub fn public_key(&self) -> &[u8] {
        &self.public_key
    }

    pub fn scheme_id(&self) -> &str {
        &self.scheme_id
    }

    pub fn issuer_signature(&self) -> &[u8] {
        &self.issuer_signature
    }

    /// Canonical bytes of the signed region: every field before the
    /// issuer signature, in declaration order.
    pub fn signed_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(128);
        encode_field(&mut buf, self.subject.as_bytes());
        encode_field(&mut buf, self.issuer.as_bytes());
        encode_field(&mut buf, &self.serial);
        encode_field(&mut buf, &self.public_key);
        encode_field(&mut buf, self.scheme_id.as_bytes());
        buf
    }

    /// Full canonical encoding, issuer signature included. Identical field
    /// tuples always produce identical bytes.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut buf = self.signed_bytes();
        encode_field(&mut buf, &self.issuer_signature);
        buf
    }

    /// Decodes a full canonical encoding. Trailing bytes are rejected.
    pub fn from_canonical_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        let mut rest = bytes;
        let subject = take_field(&mut rest, "certificate")?;
        let issuer = take_field(&mut rest, "certificate")?;
        let serial = take_field(&mut rest, "certificate")?;
        let public_key = take_field(&mut rest, "certificate")?;
        let scheme_id = take_field(&mut rest, "certificate")?;
        let issuer_signature = take_field(&mut rest, "certificate")?;
        if !rest.is_empty() {
            return Err(malformed("certificate", "trailing bytes after final field"));
        }
        let serial: [u8; SERIAL_LEN] = serial
            .try_into()
            .map_err(|_| malformed("certificate", format!("serial must be {SERIAL_LEN} bytes")))?;
        Ok(Self {
            subject: String::from_utf8(subject.to_vec())
                .map_err(|_| malformed("certificate", "subject is not UTF-8"))?,
            issuer: String::from_utf8(issuer.to_vec())
                .map_err(|_| malformed("certificate", "issuer is not UTF-8"))?,
            serial,
            public_key: public_key.to_vec(),
            scheme_id: String::from_utf8(scheme_id.to_vec())
                .map_err(|_| malformed("certificate", "scheme_id is not UTF-8"))?,
            issuer_signature: issuer_signature.to_vec(),
        })
    }

    /// SHA-256 of the full canonical encoding. This is the allowlist key.
    pub fn fingerprint(&self) -> Digest {
        hash(&self.canonical_bytes())
    }

    /// Structural check only: subject equals issuer.
    pub fn is_self_signed_shape(&self) -> bool {
        self.subject == self.issuer
    }

    /// True iff subject == issuer and the signature verifies under the
    /// certificate's own key.
    pub fn verify_self_signed(&self) -> bool {
        self.is_self_signed_shape() && self.verify_signature_under(&self.public_key)
    }

    /// True iff the issuer signature verifies under `issuer_public_key`.
    pub fn verify_signature_under(&self, issuer_public_key: &[u8]) -> bool {
        let sig = Signature::new(self.issuer_signature.clone(), self.scheme_id.clone());
        verify(issuer_public_key, &self.signed_bytes(), &sig)
    }
}

impl fmt::Debug for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Certificate")
            .field("subject", &self.subject)
            .field("issuer", &self.issuer)
            .field("serial", &hex::encode(self.serial))
            .field("public_key", &hex::encode(&self.public_key))
            .field("scheme_id", &self.scheme_id)
            .finish()
    }
}

fn build_certificate(
    signer: &KeyPair,
    subject: String,
    issuer: String,
    public_key: Vec<u8>,
    serial: [u8; SERIAL_LEN],
) -> Certificate {
    let mut cert = Certificate {
        subject,
        issuer,
        serial,
        public_key,
        scheme_id: signer.scheme_id.clone(),
        issuer_signature: Vec::new(),
    };
    cert.issuer_signature = sign(signer, &cert.signed_bytes()).bytes;
    cert
}

fn random_serial(rng: &mut dyn RngCore) -> [u8; SERIAL_LEN] {
    let mut serial = [0u8; SERIAL_LEN];
    rng.fill_bytes(&mut serial);
    serial
}

/// Self-signed certificate for `subject`, with a fresh random serial.
pub fn make_self_signed_certificate(keys: &KeyPair, subject: &str) -> Certificate {
    make_self_signed_certificate_with_rng(keys, subject, &mut OsRng)
}

/// Seeded variant of [`make_self_signed_certificate`]; the proof-of-work
/// lottery uses this so that mining is reproducible under a fixed seed.
pub fn make_self_signed_certificate_with_rng(
    keys: &KeyPair,
    subject: &str,
    rng: &mut dyn RngCore,
) -> Certificate {
    build_certificate(
        keys,
        subject.to_string(),
        subject.to_string(),
        keys.public_key().to_vec(),
        random_serial(rng),
    )
}

/// CA-signed certificate binding `subject` to `subject_public_key`.
pub fn issue_certificate(
    ca_keys: &KeyPair,
    ca_name: &str,
    subject_public_key: &[u8],
    subject: &str,
) -> Result<Certificate, CryptoError> {
    issue_certificate_with_rng(ca_keys, ca_name, subject_public_key, subject, &mut OsRng)
}

/// Seeded variant of [`issue_certificate`].
pub fn issue_certificate_with_rng(
    ca_keys: &KeyPair,
    ca_name: &str,
    subject_public_key: &[u8],
    subject: &str,
    rng: &mut dyn RngCore,
) -> Result<Certificate, CryptoError> {
    if subject == ca_name {
        // The self-signed constructor is the only path to subject == issuer.
        return Err(CryptoError::SubjectIsIssuer);
    }
    Ok(build_certificate(
        ca_keys,
        subject.to_string(),
        ca_name.to_string(),
        subject_public_key.to_vec(),
        random_serial(rng),
    ))
}

/// Writes the two-line private key envelope: header, then the base64 seed.
pub fn write_key_file(path: &Path, keys: &KeyPair) -> Result<(), CryptoError> {
    let body = BASE64.encode(keys.private_seed());
    fs::write(path, format!("{KEY_FILE_HEADER}\n{body}\n"))?;
    Ok(())
}

/// Reads a private key envelope written by [`write_key_file`].
pub fn read_key_file(path: &Path) -> Result<KeyPair, CryptoError> {
    let text = fs::read_to_string(path)?;
    let body = read_envelope(&text, KEY_FILE_HEADER, "key file")?;
    let seed = BASE64
        .decode(body)
        .map_err(|e| malformed("key file", e.to_string()))?;
    generate_keypair(Some(&seed))
}

/// Writes the two-line certificate envelope: header, then base64 of the
/// canonical encoding.
pub fn write_certificate_file(path: &Path, cert: &Certificate) -> Result<(), CryptoError> {
    let body = BASE64.encode(cert.canonical_bytes());
    fs::write(path, format!("{CERT_FILE_HEADER}\n{body}\n"))?;
    Ok(())
}

/// Reads a certificate envelope written by [`write_certificate_file`].
pub fn read_certificate_file(path: &Path) -> Result<Certificate, CryptoError> {
    let text = fs::read_to_string(path)?;
    let body = read_envelope(&text, CERT_FILE_HEADER, "certificate file")?;
    let raw = BASE64
        .decode(body)
        .map_err(|e| malformed("certificate file", e.to_string()))?;
    Certificate::from_canonical_bytes(&raw)
}

fn read_envelope<'a>(
    text: &'a str,
    header: &str,
    what: &'static str,
) -> Result<&'a str, CryptoError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == header => {}
        other => return Err(malformed(what, format!("bad header line {other:?}"))),
    }
    let body = lines
        .next()
        .ok_or_else(|| malformed(what, "missing body line"))?;
    if lines.any(|l| !l.is_empty()) {
        return Err(malformed(what, "unexpected extra content"));
    }
    Ok(body)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seeded(byte: u8) -> KeyPair {
        keypair_from_seed([byte; 32])
    }

    #[test]
    fn sha256_known_vectors() {
        assert_eq!(
            hash(b"").to_hex(),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
        assert_eq!(
            hash(b"abc").to_hex(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn hash_is_deterministic_and_input_sensitive() {
        assert_eq!(hash(b"block"), hash(b"block"));
        assert_ne!(hash(b"block"), hash(b"clock"));
    }

    #[test]
    fn digest_hex_round_trip_is_strict() {
        let d = hash(b"x");
        assert_eq!(Digest::from_hex(&d.to_hex()).unwrap(), d);
        // Uppercase and wrong lengths are not alternate spellings.
        assert!(Digest::from_hex(&d.to_hex().to_uppercase()).is_err());
        assert!(Digest::from_hex("abc").is_err());
    }

    #[test]
    fn seeded_keypairs_are_reproducible() {
        let a = generate_keypair(Some(&[7u8; 32])).unwrap();
        let b = generate_keypair(Some(&[7u8; 32])).unwrap();
        assert_eq!(a.public_key(), b.public_key());
        assert_eq!(a.private_seed(), b.private_seed());

        let c = generate_keypair(Some(&[8u8; 32])).unwrap();
        assert_ne!(a.public_key(), c.public_key());
    }

    #[test]
    fn unseeded_keypairs_differ() {
        let a = generate_keypair(None).unwrap();
        let b = generate_keypair(None).unwrap();
        assert_ne!(a.public_key(), b.public_key());
    }

    #[test]
    fn seed_length_is_checked() {
        assert!(matches!(
            generate_keypair(Some(&[0u8; 31])),
            Err(CryptoError::SeedLength(31))
        ));
    }

    #[test]
    fn sign_verify_round_trip() {
        let keys = seeded(1);
        let sig = sign(&keys, b"message");
        assert!(verify(&keys.public_key(), b"message", &sig));
        assert!(verify(&keys.public_key(), b"", &sign(&keys, b"")));

        // Wrong key, wrong message, mutated signature: all false.
        let other = seeded(2);
        assert!(!verify(&other.public_key(), b"message", &sig));
        assert!(!verify(&keys.public_key(), b"messagf", &sig));
        let mut bad = sig.bytes().to_vec();
        bad[0] ^= 1;
        assert!(!verify(
            &keys.public_key(),
            b"message",
            &Signature::new(bad, SCHEME_ED25519)
        ));
    }

    #[test]
    fn verify_tolerates_garbage_inputs() {
        let keys = seeded(3);
        let sig = sign(&keys, b"m");
        assert!(!verify(b"short", b"m", &sig));
        assert!(!verify(&[0xffu8; 32], b"m", &sig));
        assert!(!verify(
            &keys.public_key(),
            b"m",
            &Signature::new(vec![1, 2, 3], SCHEME_ED25519)
        ));
        assert!(!verify(
            &keys.public_key(),
            b"m",
            &Signature::new(sig.bytes().to_vec(), "rsa-pss")
        ));
    }

    #[test]
    fn self_signed_certificate_verifies() {
        let keys = seeded(4);
        let cert = make_self_signed_certificate(&keys, "node-1");
        assert_eq!(cert.subject(), "node-1");
        assert_eq!(cert.issuer(), "node-1");
        assert!(cert.verify_self_signed());
    }

    #[test]
    fn self_signed_certificates_differ_only_in_serial_and_signature() {
        let keys = seeded(5);
        let a = make_self_signed_certificate(&keys, "node-1");
        let b = make_self_signed_certificate(&keys, "node-1");
        assert_eq!(a.subject(), b.subject());
        assert_eq!(a.issuer(), b.issuer());
        assert_eq!(a.public_key(), b.public_key());
        assert_eq!(a.scheme_id(), b.scheme_id());
        assert_ne!(a.serial(), b.serial());
        assert_ne!(a.issuer_signature(), b.issuer_signature());
        assert_ne!(a.fingerprint(), b.fingerprint());
    }

    #[test]
    fn issued_certificate_verifies_under_ca_only() {
        let ca = seeded(6);
        let node = seeded(7);
        let cert = issue_certificate(&ca, "root", &node.public_key(), "node-1").unwrap();
        assert_eq!(cert.issuer(), "root");
        assert_eq!(cert.subject(), "node-1");
        assert!(cert.verify_signature_under(&ca.public_key()));
        assert!(!cert.verify_signature_under(&seeded(8).public_key()));
        assert!(!cert.verify_self_signed());
    }

    #[test]
    fn issue_rejects_subject_equal_to_ca_name() {
        let ca = seeded(9);
        assert!(matches!(
            issue_certificate(&ca, "root", &ca.public_key(), "root"),
            Err(CryptoError::SubjectIsIssuer)
        ));
    }

    #[test]
    fn tampered_certificate_fails_verification() {
        let ca = seeded(10);
        let node = seeded(11);
        let cert = issue_certificate(&ca, "root", &node.public_key(), "node-1").unwrap();
        let mut raw = cert.canonical_bytes();
        // Flip one byte inside the subject field. Structural damage would
        // also count as a rejection, but a subject flip decodes fine.
        raw[5] ^= 0x01;
        if let Ok(tampered) = Certificate::from_canonical_bytes(&raw) {
            assert!(!tampered.verify_signature_under(&ca.public_key()));
        }
    }

    #[test]
    fn canonical_encoding_round_trips() {
        let keys = seeded(12);
        let cert = make_self_signed_certificate(&keys, "node-9");
        let decoded = Certificate::from_canonical_bytes(&cert.canonical_bytes()).unwrap();
        assert_eq!(decoded, cert);
        assert_eq!(decoded.canonical_bytes(), cert.canonical_bytes());
        assert_eq!(decoded.fingerprint(), cert.fingerprint());
    }

    #[test]
    fn fingerprint_is_hash_of_canonical_encoding() {
        let keys = seeded(13);
        let cert = make_self_signed_certificate(&keys, "node-1");
        assert_eq!(cert.fingerprint(), hash(&cert.canonical_bytes()));
        assert_eq!(cert.fingerprint(), cert.fingerprint());
    }

    #[test]
    fn malformed_certificate_bytes_are_rejected() {
        assert!(Certificate::from_canonical_bytes(&[]).is_err());
        assert!(Certificate::from_canonical_bytes(&[0, 0, 0, 200, 1]).is_err());
        let keys = seeded(14);
        let mut raw = make_self_signed_certificate(&keys, "n").canonical_bytes();
        raw.push(0); // trailing byte
        assert!(Certificate::from_canonical_bytes(&raw).is_err());
    }

    #[test]
    fn key_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("node.key");
        let keys = seeded(15);
        write_key_file(&path, &keys).unwrap();
        let loaded = read_key_file(&path).unwrap();
        assert_eq!(loaded.private_seed(), keys.private_seed());
        assert_eq!(loaded.public_key(), keys.public_key());

        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("R2S-PRIVATE-KEY v1\n"));
    }

    #[test]
    fn certificate_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("node.cert");
        let cert = make_self_signed_certificate(&seeded(16), "node-1");
        write_certificate_file(&path, &cert).unwrap();
        assert_eq!(read_certificate_file(&path).unwrap(), cert);

        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("R2S-CERT v1\n"));
    }

    #[test]
    fn envelope_header_is_enforced() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.key");
        std::fs::write(&path, "R2S-PRIVATE-KEY v2\nAAAA\n").unwrap();
        assert!(read_key_file(&path).is_err());
    }

    #[test]
    fn base64_decoding_is_canonical() {
        // The chain wire format depends on base64 having a single spelling
        // per byte string.
        assert!(BASE64.decode("aGk=").is_ok());
        assert!(BASE64.decode("aGl=").is_err()); // nonzero trailing bits
        assert!(BASE64.decode("aGk").is_err()); // missing padding
    }
}
