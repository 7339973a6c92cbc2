//! Append-only block chain with signature attestation and pluggable
//! consensus.
//!
//! Every block carries the same header regardless of how consensus was
//! found: a block number, the global difficulty in force, a certificate, the
//! previous block hash, a payload digest and a signature over the block
//! hash. With difficulty zero, consensus comes from an external method and
//! blocks are signed by CA-certified identities. With difficulty above zero,
//! consensus is a lottery: the sealer regenerates a key pair and self-signed
//! certificate until the block hash reaches the difficulty, then signs with
//! the winning key. Switching methods never changes the data format.
//!
//! Modules:
//!
//! * [`crypto`] -- hashing, key pairs, signatures, simplified certificates.
//! * [`block`] -- the hybrid header, block hashing, the difficulty metric.
//! * [`consensus`] -- sealing and verifying blocks in both modes, schedulers.
//! * [`chain`] -- the append-only store, chain files, allowlist, manifest.
//! * [`sim`] -- multi-node races and timing statistics.
//! * [`cli`] -- the `r2s` command-line front end.
//!
//! Start with the runnable examples (`cargo run --example <name>`): each one
//! exercises a single capability end to end.

pub mod block;
pub mod chain;
pub mod cli;
pub mod consensus;
pub mod crypto;
pub mod sim;

pub use block::{block_difficulty, block_hash, genesis_previous_hash, Block, BlockHeader};
pub use chain::{load_chain, Allowlist, Chain, ChainRejection, Manifest};
pub use consensus::{
    seal_block_external, seal_block_pow, verify_block, ConsensusMode, ExternalIdentity,
    ExternalScheduler, MiningOutcome, PowOptions, RejectReason, TrustConfig,
};
pub use crypto::{
    generate_keypair, hash, issue_certificate, make_self_signed_certificate, sign, verify,
    Certificate, Digest, KeyPair, Signature,
};
pub use sim::{
    expected_win_share, model_cdf, run_pow_race_analytic, run_pow_race_real, run_schedule,
    verification_cost_probe, LotteryKind, NodeProfile, SimReport,
};
