//! The hybrid block structure, block-hash computation and the difficulty
//! metric that turns hashes into lottery outcomes.
//!
//! A block hash covers exactly five header fields (number, difficulty,
//! certificate, previous hash, payload digest) in canonical binary form; the
//! signature is excluded because it signs this very value. The difficulty of
//! a hash `h` is `floor(2^256 / (int(h) + 1))`, so a uniformly random hash
//! reaches difficulty `d` with probability ~`1/d` and the expected number of
//! lottery draws to reach `d` is ~`d`.

use std::fmt;

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crypto::{self, encode_field, Certificate, Digest, Signature};

#[derive(Debug, Error)]
pub enum WireError {
    #[error("invalid block JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid block field {field}: {detail}")]
    Field { field: &'static str, detail: String },
    #[error("block line is not in canonical form")]
    NonCanonical,
}

fn field_err(field: &'static str, detail: impl Into<String>) -> WireError {
    WireError::Field {
        field,
        detail: detail.into(),
    }
}

/// Hybrid block header: one layout for every consensus mode.
#[derive(Clone, PartialEq, Debug)]
pub struct BlockHeader {
    pub block_number: u64,
    /// Global difficulty in force when the block was sealed; zero means
    /// consensus came from an external method.
    pub difficulty: BigUint,
    pub certificate: Certificate,
    pub previous_block_hash: Digest,
    pub payload_digest: Digest,
    pub signature: Signature,
}

impl BlockHeader {
    /// Hash of the header's signed region (everything but the signature).
    pub fn block_hash(&self) -> Digest {
        block_hash(
            self.block_number,
            &self.difficulty,
            &self.certificate,
            &self.previous_block_hash,
            &self.payload_digest,
        )
    }
}

/// A block: header plus opaque payload bytes.
#[derive(Clone, PartialEq, Debug)]
pub struct Block {
    pub header: BlockHeader,
    pub payload: Vec<u8>,
}

/// Canonical bytes hashed into a block hash. Numbers are encoded as ASCII
/// decimal, certificates as their canonical encoding, digests as raw bytes;
/// every field is length-prefixed.
pub fn block_hash(
    block_number: u64,
    difficulty: &BigUint,
    certificate: &Certificate,
    previous_block_hash: &Digest,
    payload_digest: &Digest,
) -> Digest {
    let mut buf = Vec::with_capacity(256);
    encode_field(&mut buf, block_number.to_string().as_bytes());
    encode_field(&mut buf, difficulty.to_str_radix(10).as_bytes());
    encode_field(&mut buf, &certificate.canonical_bytes());
    encode_field(&mut buf, previous_block_hash.as_bytes());
    encode_field(&mut buf, payload_digest.as_bytes());
    crypto::hash(&buf)
}

/// Difficulty achieved by a hash: `floor(2^256 / (int(h) + 1))` with the
/// digest read as a big-endian integer. Every hash achieves at least 1; the
/// all-zero digest achieves 2^256.
pub fn block_difficulty(h: &Digest) -> BigUint {
    let value = BigUint::from_bytes_be(h.as_bytes());
    (BigUint::one() << 256u32) / (value + BigUint::one())
}

/// True iff `h` satisfies global difficulty `d`, i.e.
/// `block_difficulty(h) >= d`. Equivalent to `int(h) < floor(2^256 / d)`,
/// which is what the hot mining loops test; `difficulty_target` precomputes
/// that bound.
pub fn meets_difficulty(h: &Digest, difficulty: &BigUint) -> bool {
    block_difficulty(h) >= *difficulty
}

/// `floor(2^256 / d)` for `d >= 1`. A hash `h` satisfies `d` iff
/// `int(h) < difficulty_target(d)`.
pub fn difficulty_target(difficulty: &BigUint) -> BigUint {
    (BigUint::one() << 256u32) / difficulty
}

/// The fixed previous-hash value of the genesis block: 32 zero bytes.
pub fn genesis_previous_hash() -> Digest {
    Digest::from_bytes([0u8; 32])
}

/// Classic nonce-based header. Kept as a documented read format; only the
/// simulator's reference miner produces these.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ClassicPowHeader {
    pub block_number: u64,
    pub difficulty: u64,
    pub nonce: u64,
    pub previous_block_hash: Digest,
}

impl ClassicPowHeader {
    /// Canonical bytes, same field conventions as the hybrid header.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(96);
        self.canonical_bytes_into(&mut buf);
        buf
    }

    /// Re-encodes into an existing buffer so the mining loop can reuse one
    /// allocation per candidate.
    pub fn canonical_bytes_into(&self, buf: &mut Vec<u8>) {
        buf.clear();
        encode_field(buf, self.block_number.to_string().as_bytes());
        encode_field(buf, self.difficulty.to_string().as_bytes());
        encode_field(buf, self.nonce.to_string().as_bytes());
        encode_field(buf, self.previous_block_hash.as_bytes());
    }

    pub fn hash(&self) -> Digest {
        crypto::hash(&self.canonical_bytes())
    }
}

/// Strict decimal parser for wire numbers: digits only, no sign, no leading
/// zeros (except "0" itself), so every value has exactly one spelling.
fn parse_decimal(field: &'static str, s: &str) -> Result<BigUint, WireError> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(field_err(field, format!("not a decimal number: {s:?}")));
    }
    if s.len() > 1 && s.starts_with('0') {
        return Err(field_err(field, format!("leading zeros: {s:?}")));
    }
    BigUint::parse_bytes(s.as_bytes(), 10)
        .ok_or_else(|| field_err(field, format!("unparseable: {s:?}")))
}

fn parse_decimal_u64(field: &'static str, s: &str) -> Result<u64, WireError> {
    let big = parse_decimal(field, s)?;
    u64::try_from(&big).map_err(|_| field_err(field, format!("exceeds u64: {s}")))
}

/// On-disk / wire form of a block: one JSON object, keys in this exact
/// order. Numbers are decimal strings (difficulty is unbounded), digests are
/// lowercase hex, certificate / signature / payload are base64.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireBlock {
    block_number: String,
    difficulty: String,
    certificate: String,
    previous_block_hash: String,
    payload_digest: String,
    signature: String,
    payload: String,
}

impl Block {
    /// Serializes to the canonical single-line JSON wire form (no trailing
    /// newline).
    pub fn to_wire_json(&self) -> String {
        let wire = WireBlock {
            block_number: self.header.block_number.to_string(),
            difficulty: self.header.difficulty.to_str_radix(10),
            certificate: BASE64.encode(self.header.certificate.canonical_bytes()),
            previous_block_hash: self.header.previous_block_hash.to_hex(),
            payload_digest: self.header.payload_digest.to_hex(),
            signature: BASE64.encode(self.header.signature.bytes()),
            payload: BASE64.encode(&self.payload),
        };
        serde_json::to_string(&wire).expect("block serialization cannot fail")
    }

    /// Parses one wire line and enforces canonical form: re-serializing the
    /// parsed block must reproduce `line` byte for byte. Anything else -- an
    /// uppercase hex digit, non-canonical base64, reordered keys, stray
    /// whitespace -- is rejected rather than silently normalized.
    pub fn from_wire_json(line: &[u8]) -> Result<Block, WireError> {
        let wire: WireBlock = serde_json::from_slice(line)?;
        let block_number = parse_decimal_u64("block_number", &wire.block_number)?;
        let difficulty = parse_decimal("difficulty", &wire.difficulty)?;
        let cert_raw = BASE64
            .decode(&wire.certificate)
            .map_err(|e| field_err("certificate", e.to_string()))?;
        let certificate = Certificate::from_canonical_bytes(&cert_raw)
            .map_err(|e| field_err("certificate", e.to_string()))?;
        let previous_block_hash = Digest::from_hex(&wire.previous_block_hash)
            .map_err(|e| field_err("previous_block_hash", e.to_string()))?;
        let payload_digest = Digest::from_hex(&wire.payload_digest)
            .map_err(|e| field_err("payload_digest", e.to_string()))?;
        let signature_bytes = BASE64
            .decode(&wire.signature)
            .map_err(|e| field_err("signature", e.to_string()))?;
        let payload = BASE64
            .decode(&wire.payload)
            .map_err(|e| field_err("payload", e.to_string()))?;

        let scheme_id = certificate.scheme_id().to_string();
        let block = Block {
            header: BlockHeader {
                block_number,
                difficulty,
                certificate,
                previous_block_hash,
                payload_digest,
                signature: Signature::new(signature_bytes, scheme_id),
            },
            payload,
        };
        if block.to_wire_json().as_bytes() != line {
            return Err(WireError::NonCanonical);
        }
        Ok(block)
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_wire_json())
    }
}
