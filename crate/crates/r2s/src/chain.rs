//! Append-only chain store, whole-chain verification and the certificate
//! allowlist.
//!
//! A chain is a genesis block plus successors, each linking to its
//! predecessor's block hash with block numbers increasing by exactly one.
//! The store exposes no mutating operation besides `append`; there is no
//! update and no delete. Readers take `&Chain` snapshots that a writer can
//! never tear.

use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::block::{block_difficulty, genesis_previous_hash, Block};
use crate::consensus::{
    seal_block_external, seal_block_pow, verify_block, ConsensusMode, PowOptions, RejectReason,
    SealError, TrustConfig,
};
use crate::crypto::{self, Certificate, Digest};

/// Set of certificate fingerprints allowed to sign blocks. Membership is a
/// hash lookup, constant time on average regardless of list size.
#[derive(Clone, Debug, Default)]
pub struct Allowlist {
    fingerprints: HashSet<Digest>,
}

impl Allowlist {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_fingerprints(fingerprints: impl IntoIterator<Item = Digest>) -> Self {
        Self {
            fingerprints: fingerprints.into_iter().collect(),
        }
    }

    pub fn insert(&mut self, fingerprint: Digest) {
        self.fingerprints.insert(fingerprint);
    }

    pub fn contains(&self, fingerprint: &Digest) -> bool {
        self.fingerprints.contains(fingerprint)
    }

    pub fn len(&self) -> usize {
        self.fingerprints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fingerprints.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Digest> {
        self.fingerprints.iter()
    }
}

/// Where and why chain verification failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainRejection {
    pub index: u64,
    pub reason: RejectReason,
}

impl std::fmt::Display for ChainRejection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "block {} rejected: {}", self.index, self.reason)
    }
}

impl std::error::Error for ChainRejection {}

#[derive(Debug, Error)]
pub enum ChainError {
    #[error(transparent)]
    Seal(#[from] SealError),
    #[error("{0}")]
    Rejected(ChainRejection),
}

/// Errors from reading chain and manifest files. `Malformed` and `Io` mean
/// the input could not even be interpreted; `Rejected` means it parsed but
/// failed verification.
#[derive(Debug, Error)]
pub enum LoadError {
    #[error("malformed chain data: {0}")]
    Malformed(String),
    #[error("{0}")]
    Rejected(ChainRejection),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// The append-only block store.
#[derive(Debug)]
pub struct Chain {
    blocks: Vec<Block>,
    trust: TrustConfig,
}

fn verify_blocks(blocks: &[Block], trust: &TrustConfig) -> Result<(), ChainRejection> {
    let mut expected_prev = genesis_previous_hash();
    for (index, block) in blocks.iter().enumerate() {
        verify_block(block, &expected_prev, index as u64, trust).map_err(|reason| {
            ChainRejection {
                index: index as u64,
                reason,
            }
        })?;
        expected_prev = block.header.block_hash();
    }
    Ok(())
}

impl Chain {
    /// Creates a length-1 chain whose genesis block is sealed under `mode`
    /// and verified like any other block.
    pub fn init(
        trust: TrustConfig,
        genesis_payload: &[u8],
        mode: &ConsensusMode,
    ) -> Result<Self, ChainError> {
        Self::init_with_pow_options(trust, genesis_payload, mode, &PowOptions::default())
    }

    /// [`Chain::init`] with explicit mining options for the proof-of-work
    /// genesis path.
    pub fn init_with_pow_options(
        trust: TrustConfig,
        genesis_payload: &[u8],
        mode: &ConsensusMode,
        pow_options: &PowOptions,
    ) -> Result<Self, ChainError> {
        let genesis = match mode {
            ConsensusMode::External(identity) => {
                seal_block_external(identity, 0, &genesis_previous_hash(), genesis_payload)?
            }
            ConsensusMode::ProofOfWork {
                difficulty,
                subject,
            } => {
                seal_block_pow(
                    subject,
                    difficulty,
                    0,
                    &genesis_previous_hash(),
                    genesis_payload,
                    pow_options,
                )?
                .block
            }
        };
        Self::from_blocks(vec![genesis], trust).map_err(ChainError::Rejected)
    }

    /// Builds a chain from existing blocks, verifying every one of them.
    ///
    /// # Panics
    /// Panics if `blocks` is empty; a chain always has a genesis block.
    pub fn from_blocks(blocks: Vec<Block>, trust: TrustConfig) -> Result<Self, ChainRejection> {
        assert!(!blocks.is_empty(), "a chain requires a genesis block");
        verify_blocks(&blocks, &trust)?;
        Ok(Self { blocks, trust })
    }

    /// Appends `block` iff it verifies as the successor of the current tip.
    /// On rejection the chain is unchanged.
    pub fn append(&mut self, block: Block) -> Result<(), RejectReason> {
        let (tip_hash, next_number) = self.expected_next();
        verify_block(&block, &tip_hash, next_number, &self.trust)?;
        self.blocks.push(block);
        Ok(())
    }

    /// Re-verifies the whole chain from genesis, reporting the first failing
    /// index. A chain built through this API always passes.
    pub fn verify(&self) -> Result<(), ChainRejection> {
        verify_blocks(&self.blocks, &self.trust)
    }

    /// Read-only attestation record for the block at `index`.
    pub fn attest_report(&self, index: usize) -> Result<AttestationRecord, ChainRejection> {
        let block = self.blocks.get(index).ok_or(ChainRejection {
            index: index as u64,
            reason: RejectReason::BadNumber,
        })?;
        Ok(AttestationRecord::for_block(block))
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn tip(&self) -> &Block {
        self.blocks.last().expect("chain is never empty")
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a chain always holds at least the genesis block
    }

    pub fn trust(&self) -> &TrustConfig {
        &self.trust
    }

    /// Hash of the tip and the block number the next append must use.
    pub fn expected_next(&self) -> (Digest, u64) {
        let tip = self.tip();
        (tip.header.block_hash(), tip.header.block_number + 1)
    }
}

/// Evidence that consensus existed when a block was appended: the
/// certificate it was signed under, whether the signature still verifies,
/// and the difficulty the block hash actually achieves.
#[derive(Debug, Clone, Serialize)]
pub struct AttestationRecord {
    pub index: u64,
    /// "pow" when the block's difficulty is nonzero, otherwise "external".
    pub mode: &'static str,
    pub subject: String,
    pub issuer: String,
    pub self_signed: bool,
    pub certificate_fingerprint: String,
    pub signature_valid: bool,
    pub declared_difficulty: String,
    pub achieved_difficulty: String,
}

impl AttestationRecord {
    fn for_block(block: &Block) -> Self {
        use num_traits::Zero;
        let header = &block.header;
        let h = header.block_hash();
        Self {
            index: header.block_number,
            mode: if header.difficulty.is_zero() {
                "external"
            } else {
                "pow"
            },
            subject: header.certificate.subject().to_string(),
            issuer: header.certificate.issuer().to_string(),
            self_signed: header.certificate.verify_self_signed(),
            certificate_fingerprint: header.certificate.fingerprint().to_hex(),
            signature_valid: crypto::verify(
                header.certificate.public_key(),
                h.as_bytes(),
                &header.signature,
            ),
            declared_difficulty: header.difficulty.to_str_radix(10),
            achieved_difficulty: block_difficulty(&h).to_str_radix(10),
        }
    }
}

/// Sidecar manifest describing the trust context of a chain file.
#[derive(Clone, Debug, PartialEq)]
pub struct Manifest {
    pub trust_anchors: Vec<Certificate>,
    pub allowlist: Option<Vec<Digest>>,
    pub scheme_id: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireManifest {
    trust_anchors: Vec<String>,
    allowlist: Option<Vec<String>>,
    scheme_id: String,
}

impl Manifest {
    pub fn new(trust_anchors: Vec<Certificate>, allowlist: Option<Vec<Digest>>) -> Self {
        Self {
            trust_anchors,
            allowlist,
            scheme_id: crypto::SCHEME_ED25519.to_string(),
        }
    }

    /// The trust context this manifest configures.
    pub fn trust_config(&self) -> TrustConfig {
        TrustConfig {
            trust_anchors: self.trust_anchors.clone(),
            allowlist: self
                .allowlist
                .as_ref()
                .map(|fps| Allowlist::from_fingerprints(fps.iter().copied())),
        }
    }

    pub fn to_json(&self) -> String {
        let wire = WireManifest {
            trust_anchors: self
                .trust_anchors
                .iter()
                .map(|c| BASE64.encode(c.canonical_bytes()))
                .collect(),
            allowlist: self
                .allowlist
                .as_ref()
                .map(|fps| fps.iter().map(Digest::to_hex).collect()),
            scheme_id: self.scheme_id.clone(),
        };
        serde_json::to_string_pretty(&wire).expect("manifest serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, LoadError> {
        let wire: WireManifest =
            serde_json::from_str(text).map_err(|e| LoadError::Malformed(e.to_string()))?;
        let trust_anchors = wire
            .trust_anchors
            .iter()
            .map(|b64| {
                let raw = BASE64
                    .decode(b64)
                    .map_err(|e| LoadError::Malformed(format!("trust anchor: {e}")))?;
                Certificate::from_canonical_bytes(&raw)
                    .map_err(|e| LoadError::Malformed(format!("trust anchor: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let allowlist = wire
            .allowlist
            .map(|fps| {
                fps.iter()
                    .map(|hex| {
                        Digest::from_hex(hex)
                            .map_err(|e| LoadError::Malformed(format!("allowlist entry: {e}")))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()?;
        Ok(Self {
            trust_anchors,
            allowlist,
            scheme_id: wire.scheme_id,
        })
    }

    pub fn write_file(&self, path: &Path) -> Result<(), LoadError> {
        fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn read_file(path: &Path) -> Result<Self, LoadError> {
        let text = fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}

/// Writes the chain file: one canonical JSON block per line, genesis first.
pub fn write_chain_file(path: &Path, chain: &Chain) -> Result<(), LoadError> {
    let mut out = fs::File::create(path)?;
    for block in chain.blocks() {
        out.write_all(block.to_wire_json().as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Appends a single block line to an existing chain file.
pub fn append_block_line(path: &Path, block: &Block) -> Result<(), LoadError> {
    let mut out = fs::OpenOptions::new().append(true).open(path)?;
    out.write_all(block.to_wire_json().as_bytes())?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

/// Parses chain file bytes into blocks without verifying them. Every line
/// must be in canonical form; the file may end with one trailing newline.
pub fn parse_chain_bytes(bytes: &[u8]) -> Result<Vec<Block>, LoadError> {
    let mut segments: Vec<&[u8]> = bytes.split(|&b| b == b'\n').collect();
    if segments.last().is_some_and(|s| s.is_empty()) {
        segments.pop();
    }
    if segments.is_empty() {
        return Err(LoadError::Malformed("empty chain file".into()));
    }
    segments
        .iter()
        .enumerate()
        .map(|(i, line)| {
            if line.is_empty() {
                return Err(LoadError::Malformed(format!("line {}: empty line", i + 1)));
            }
            Block::from_wire_json(line)
                .map_err(|e| LoadError::Malformed(format!("line {}: {e}", i + 1)))
        })
        .collect()
}

/// Reads and parses a chain file without verification.
pub fn read_chain_file(path: &Path) -> Result<Vec<Block>, LoadError> {
    parse_chain_bytes(&fs::read(path)?)
}

/// Loads and fully verifies a chain from its file and manifest.
pub fn load_chain(chain_path: &Path, manifest_path: &Path) -> Result<Chain, LoadError> {
    let manifest = Manifest::read_file(manifest_path)?;
    let blocks = read_chain_file(chain_path)?;
    Chain::from_blocks(blocks, manifest.trust_config()).map_err(LoadError::Rejected)
}
