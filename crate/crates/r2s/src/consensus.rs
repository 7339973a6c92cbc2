//! Sealing and verifying blocks under either consensus mode.
//!
//! Attestation is always a signature over the block hash. What changes with
//! the global difficulty is where the signing key comes from:
//!
//! * difficulty == 0: consensus was found externally (a scheduler, an
//!   election, a single writer). The block carries a CA-signed certificate
//!   and is signed with that identity's key.
//! * difficulty > 0: consensus is a lottery. The sealer repeatedly generates
//!   a fresh key pair and self-signed certificate until the resulting block
//!   hash reaches the global difficulty, then signs with the winning key.
//!
//! Verification never iterates: one payload hash, one block hash, one
//! certificate check and one signature check decide a block's fate.

use std::num::NonZeroUsize;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use thiserror::Error;

use crate::block::{block_hash, meets_difficulty, Block, BlockHeader};
use crate::chain::Allowlist;
use crate::crypto::{self, Certificate, Digest, KeyPair};

/// Why a block was refused. Tokens are stable and appear verbatim in CLI
/// output and error messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectReason {
    BadLink,
    BadNumber,
    BadPayload,
    BadSignature,
    BadProof,
    UntrustedCertificate,
    UnknownCertificate,
}

impl RejectReason {
    pub fn token(&self) -> &'static str {
        match self {
            RejectReason::BadLink => "bad-link",
            RejectReason::BadNumber => "bad-number",
            RejectReason::BadPayload => "bad-payload",
            RejectReason::BadSignature => "bad-signature",
            RejectReason::BadProof => "bad-proof",
            RejectReason::UntrustedCertificate => "untrusted-certificate",
            RejectReason::UnknownCertificate => "unknown-certificate",
        }
    }
}

impl std::fmt::Display for RejectReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.token())
    }
}

impl std::error::Error for RejectReason {}

#[derive(Debug, Error)]
pub enum SealError {
    #[error("proof-of-work sealing requires difficulty >= 1")]
    InvalidDifficulty,
    #[error("certificate public key does not match the signing key")]
    CertificateKeyMismatch,
    #[error("external consensus requires a CA-signed certificate, got a self-signed one")]
    SelfSignedCertificate,
    #[error("iteration cap of {cap} exceeded before difficulty was met")]
    IterationCapExceeded { cap: u64 },
}

/// Trust context for verification: the CA certificates external-mode blocks
/// must chain to, plus an optional certificate allowlist applied to every
/// block regardless of mode.
#[derive(Clone, Debug, Default)]
pub struct TrustConfig {
    pub trust_anchors: Vec<Certificate>,
    pub allowlist: Option<Allowlist>,
}

impl TrustConfig {
    /// No anchors, no allowlist: enough to verify pure proof-of-work chains.
    pub fn pow_only() -> Self {
        Self::default()
    }

    pub fn with_anchors(trust_anchors: Vec<Certificate>) -> Self {
        Self {
            trust_anchors,
            allowlist: None,
        }
    }
}

/// A keypair together with its CA-signed certificate, used to seal
/// external-consensus blocks.
#[derive(Clone)]
pub struct ExternalIdentity {
    pub keys: KeyPair,
    pub certificate: Certificate,
}

/// How new blocks for a chain are sealed.
#[allow(clippy::large_enum_variant)]
pub enum ConsensusMode {
    /// Global difficulty zero; consensus is found by an external method and
    /// blocks are signed with this identity.
    External(ExternalIdentity),
    /// Global difficulty above zero; blocks are won by the certificate
    /// lottery, self-signed under `subject`.
    ProofOfWork {
        difficulty: BigUint,
        subject: String,
    },
}

impl ConsensusMode {
    pub fn global_difficulty(&self) -> BigUint {
        match self {
            ConsensusMode::External(_) => BigUint::zero(),
            ConsensusMode::ProofOfWork { difficulty, .. } => difficulty.clone(),
        }
    }
}

/// A proof-of-work sealed block plus how much the lottery cost.
pub struct MiningOutcome {
    pub block: Block,
    /// Lottery draws performed (fresh certificate per draw).
    pub iterations: u64,
    pub elapsed: Duration,
}

/// Tuning knobs for the proof-of-work sealer. The defaults are an unbounded,
/// single-threaded, entropy-seeded search.
#[derive(Clone, Default)]
pub struct PowOptions {
    /// Abort with an error after this many draws. Meant for bounded tests;
    /// production mining has no natural termination bound.
    pub iteration_cap: Option<u64>,
    /// Seed for the key/serial generator. With one worker this makes the
    /// outcome fully reproducible.
    pub seed: Option<u64>,
    /// Parallel lottery workers. The first to satisfy the difficulty wins
    /// and the others stop.
    pub workers: Option<NonZeroUsize>,
}

fn assemble_block(
    keys: &KeyPair,
    certificate: Certificate,
    block_number: u64,
    difficulty: BigUint,
    previous_block_hash: Digest,
    payload: &[u8],
) -> Block {
    let payload_digest = crypto::hash(payload);
    let h = block_hash(
        block_number,
        &difficulty,
        &certificate,
        &previous_block_hash,
        &payload_digest,
    );
    Block {
        header: BlockHeader {
            block_number,
            difficulty,
            certificate,
            previous_block_hash,
            payload_digest,
            signature: crypto::sign(keys, h.as_bytes()),
        },
        payload: payload.to_vec(),
    }
}

/// Seals a block under external consensus. The caller must already hold the
/// right to append; this only attests it.
pub fn seal_block_external(
    identity: &ExternalIdentity,
    block_number: u64,
    previous_block_hash: &Digest,
    payload: &[u8],
) -> Result<Block, SealError> {
    if identity.certificate.is_self_signed_shape() {
        return Err(SealError::SelfSignedCertificate);
    }
    if identity.certificate.public_key() != identity.keys.public_key() {
        return Err(SealError::CertificateKeyMismatch);
    }
    Ok(assemble_block(
        &identity.keys,
        identity.certificate.clone(),
        block_number,
        BigUint::zero(),
        *previous_block_hash,
        payload,
    ))
}

struct LotteryWin {
    keys: KeyPair,
    certificate: Certificate,
}

/// What one lottery worker did: how many draws it performed, and the win if
/// it found one before being stopped.
struct WorkerOutcome {
    draws: u64,
    win: Option<LotteryWin>,
}

/// The fixed header fields a lottery worker draws candidates against.
struct LotteryTask<'a> {
    subject: &'a str,
    difficulty: &'a BigUint,
    block_number: u64,
    previous_block_hash: &'a Digest,
    payload_digest: &'a Digest,
    iteration_cap: Option<u64>,
}

impl LotteryTask<'_> {
    /// One worker's lottery loop: fresh key pair and self-signed certificate
    /// per draw until the block hash reaches the difficulty, another worker
    /// wins, or the cap runs out. Draws are reported either way.
    fn run(&self, rng: &mut ChaCha20Rng, stop: &AtomicBool) -> Result<WorkerOutcome, SealError> {
        let mut draws = 0u64;
        loop {
            if stop.load(Ordering::Relaxed) {
                return Ok(WorkerOutcome { draws, win: None });
            }
            if let Some(cap) = self.iteration_cap {
                if draws >= cap {
                    return Err(SealError::IterationCapExceeded { cap });
                }
            }
            draws += 1;

            let mut seed = [0u8; 32];
            rng.fill_bytes(&mut seed);
            let keys = crypto::keypair_from_seed(seed);
            let certificate =
                crypto::make_self_signed_certificate_with_rng(&keys, self.subject, rng);
            let h = block_hash(
                self.block_number,
                self.difficulty,
                &certificate,
                self.previous_block_hash,
                self.payload_digest,
            );
            if meets_difficulty(&h, self.difficulty) {
                return Ok(WorkerOutcome {
                    draws,
                    win: Some(LotteryWin { keys, certificate }),
                });
            }
        }
    }
}

/// Seals a block by the certificate lottery at `global_difficulty >= 1`.
///
/// `iterations` in the outcome counts total draws across all workers. With a
/// single worker and a fixed seed the outcome is byte-for-byte reproducible.
pub fn seal_block_pow(
    subject: &str,
    global_difficulty: &BigUint,
    block_number: u64,
    previous_block_hash: &Digest,
    payload: &[u8],
    options: &PowOptions,
) -> Result<MiningOutcome, SealError> {
    if global_difficulty.is_zero() {
        return Err(SealError::InvalidDifficulty);
    }
    let started = Instant::now();
    let payload_digest = crypto::hash(payload);
    let workers = options.workers.map(NonZeroUsize::get).unwrap_or(1);
    let stop = AtomicBool::new(false);
    let task = LotteryTask {
        subject,
        difficulty: global_difficulty,
        block_number,
        previous_block_hash,
        payload_digest: &payload_digest,
        iteration_cap: options.iteration_cap,
    };

    let worker_rng = |index: u64| -> ChaCha20Rng {
        match options.seed {
            Some(seed) => {
                // Distinct, deterministic stream per worker.
                ChaCha20Rng::seed_from_u64(
                    seed.wrapping_add(index.wrapping_mul(0x9e37_79b9_7f4a_7c15)),
                )
            }
            None => ChaCha20Rng::from_entropy(),
        }
    };

    let (win, iterations) = if workers == 1 {
        let outcome = task.run(&mut worker_rng(0), &stop)?;
        let win = outcome
            .win
            .expect("single worker never observes a stop signal");
        (win, outcome.draws)
    } else {
        let total_draws = AtomicU64::new(0);
        let winner: Mutex<Option<LotteryWin>> = Mutex::new(None);
        let first_error: Mutex<Option<SealError>> = Mutex::new(None);
        std::thread::scope(|scope| {
            for index in 0..workers {
                let mut rng = worker_rng(index as u64);
                let stop = &stop;
                let total_draws = &total_draws;
                let winner = &winner;
                let first_error = &first_error;
                let task = &task;
                scope.spawn(move || match task.run(&mut rng, stop) {
                    Ok(outcome) => {
                        total_draws.fetch_add(outcome.draws, Ordering::Relaxed);
                        if let Some(win) = outcome.win {
                            let mut slot = winner.lock().unwrap();
                            if slot.is_none() {
                                *slot = Some(win);
                            }
                            stop.store(true, Ordering::Relaxed);
                        }
                    }
                    Err(e) => {
                        let mut slot = first_error.lock().unwrap();
                        if slot.is_none() {
                            *slot = Some(e);
                        }
                        stop.store(true, Ordering::Relaxed);
                    }
                });
            }
        });
        if let Some(e) = first_error.lock().unwrap().take() {
            if winner.lock().unwrap().is_none() {
                return Err(e);
            }
        }
        let win = winner
            .lock()
            .unwrap()
            .take()
            .expect("a worker either wins or errors");
        (win, total_draws.load(Ordering::Relaxed))
    };

    let block = assemble_block(
        &win.keys,
        win.certificate,
        block_number,
        global_difficulty.clone(),
        *previous_block_hash,
        payload,
    );
    Ok(MiningOutcome {
        block,
        iterations,
        elapsed: started.elapsed(),
    })
}

/// Verifies one block against its expected position and the trust context.
///
/// Checks run in a fixed order and the first failure is reported: link,
/// number, payload digest, signature over the block hash, then the
/// mode-specific certificate and proof rules, then the allowlist.
pub fn verify_block(
    block: &Block,
    expected_previous_hash: &Digest,
    expected_number: u64,
    trust: &TrustConfig,
) -> Result<(), RejectReason> {
    let header = &block.header;
    if header.previous_block_hash != *expected_previous_hash {
        return Err(RejectReason::BadLink);
    }
    if header.block_number != expected_number {
        return Err(RejectReason::BadNumber);
    }
    if crypto::hash(&block.payload) != header.payload_digest {
        return Err(RejectReason::BadPayload);
    }

    let h = header.block_hash();
    if !crypto::verify(
        header.certificate.public_key(),
        h.as_bytes(),
        &header.signature,
    ) {
        return Err(RejectReason::BadSignature);
    }

    if header.difficulty.is_zero() {
        // External consensus: the certificate must chain to a trust anchor.
        if header.certificate.is_self_signed_shape() {
            return Err(RejectReason::UntrustedCertificate);
        }
        let anchored = trust.trust_anchors.iter().any(|anchor| {
            anchor.subject() == header.certificate.issuer()
                && header
                    .certificate
                    .verify_signature_under(anchor.public_key())
        });
        if !anchored {
            return Err(RejectReason::UntrustedCertificate);
        }
    } else {
        // Proof of work: self-attesting via certificate and hash.
        if !header.certificate.verify_self_signed() {
            return Err(RejectReason::UntrustedCertificate);
        }
        if !meets_difficulty(&h, &header.difficulty) {
            return Err(RejectReason::BadProof);
        }
    }

    if let Some(allowlist) = &trust.allowlist {
        if !allowlist.contains(&header.certificate.fingerprint()) {
            return Err(RejectReason::UnknownCertificate);
        }
    }
    Ok(())
}

/// Chooses which node seals the next external-consensus block.
pub trait ExternalScheduler {
    /// Index of the leader for `block_number`, in `0..node_count()`.
    fn next_leader(&mut self, block_number: u64) -> usize;

    fn node_count(&self) -> usize;
}

/// The degenerate single-writer schedule: consensus by lack of alternatives.
pub struct SingleNode;

impl ExternalScheduler for SingleNode {
    fn next_leader(&mut self, _block_number: u64) -> usize {
        0
    }

    fn node_count(&self) -> usize {
        1
    }
}

/// Deterministic rotation: leader of block `b` is `b mod n`.
pub struct RoundRobin {
    nodes: usize,
}

impl RoundRobin {
    pub fn new(nodes: usize) -> Self {
        assert!(nodes > 0, "round robin needs at least one node");
        Self { nodes }
    }
}

impl ExternalScheduler for RoundRobin {
    fn next_leader(&mut self, block_number: u64) -> usize {
        (block_number % self.nodes as u64) as usize
    }

    fn node_count(&self) -> usize {
        self.nodes
    }
}

/// Toy election model: every candidate draws a timeout uniform over the
/// election window plus an exponential network delay; the smallest total
/// wins. This is a documented model of a randomized election, not a claim
/// about any specific protocol.
pub struct RandomLeader {
    nodes: usize,
    election_window: (f64, f64),
    network_mean: f64,
    rng: ChaCha20Rng,
}

impl RandomLeader {
    /// Folklore magnitudes: election window 150-300 ms, mean network delay
    /// 10 ms.
    pub const DEFAULT_ELECTION_WINDOW: (f64, f64) = (0.150, 0.300);
    pub const DEFAULT_NETWORK_MEAN: f64 = 0.010;

    pub fn new(nodes: usize, seed: u64) -> Self {
        Self::with_timing(
            nodes,
            Self::DEFAULT_ELECTION_WINDOW,
            Self::DEFAULT_NETWORK_MEAN,
            seed,
        )
    }

    pub fn with_timing(
        nodes: usize,
        election_window: (f64, f64),
        network_mean: f64,
        seed: u64,
    ) -> Self {
        assert!(nodes > 0, "random leader needs at least one node");
        assert!(
            election_window.0 < election_window.1 && election_window.0 >= 0.0,
            "election window must be a nonempty nonnegative interval"
        );
        assert!(network_mean > 0.0, "network mean must be positive");
        Self {
            nodes,
            election_window,
            network_mean,
            rng: ChaCha20Rng::seed_from_u64(seed),
        }
    }
}

impl ExternalScheduler for RandomLeader {
    fn next_leader(&mut self, _block_number: u64) -> usize {
        let mut best = 0usize;
        let mut best_time = f64::INFINITY;
        for node in 0..self.nodes {
            let timeout = self
                .rng
                .gen_range(self.election_window.0..self.election_window.1);
            let delay = -self.network_mean * (1.0 - self.rng.gen::<f64>()).ln();
            let total = timeout + delay;
            if total < best_time {
                best_time = total;
                best = node;
            }
        }
        best
    }

    fn node_count(&self) -> usize {
        self.nodes
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::{block_difficulty, genesis_previous_hash};
    use crate::crypto::{issue_certificate, keypair_from_seed, make_self_signed_certificate};
    use num_traits::One;

    fn ca() -> (KeyPair, Certificate) {
        let keys = keypair_from_seed([40u8; 32]);
        let cert = make_self_signed_certificate(&keys, "root");
        (keys, cert)
    }

    fn ca_identity(seed_byte: u8, name: &str) -> (ExternalIdentity, Certificate) {
        let (ca_keys, ca_cert) = ca();
        let keys = keypair_from_seed([seed_byte; 32]);
        let cert = issue_certificate(&ca_keys, "root", &keys.public_key(), name).unwrap();
        (
            ExternalIdentity {
                keys,
                certificate: cert,
            },
            ca_cert,
        )
    }

    fn pow_opts(seed: u64) -> PowOptions {
        PowOptions {
            seed: Some(seed),
            ..PowOptions::default()
        }
    }

    #[test]
    fn external_seal_verifies_under_its_ca() {
        let (identity, ca_cert) = ca_identity(41, "node-1");
        let block =
            seal_block_external(&identity, 1, &genesis_previous_hash(), b"payload").unwrap();
        assert!(block.header.difficulty.is_zero());
        let trust = TrustConfig::with_anchors(vec![ca_cert]);
        verify_block(&block, &genesis_previous_hash(), 1, &trust).unwrap();
    }

    #[test]
    fn external_seal_rejects_self_signed_identity() {
        let keys = keypair_from_seed([42u8; 32]);
        let identity = ExternalIdentity {
            certificate: make_self_signed_certificate(&keys, "node-1"),
            keys,
        };
        assert!(matches!(
            seal_block_external(&identity, 1, &genesis_previous_hash(), b""),
            Err(SealError::SelfSignedCertificate)
        ));
    }

    #[test]
    fn external_seal_rejects_mismatched_key() {
        let (ca_keys, _) = ca();
        let keys = keypair_from_seed([43u8; 32]);
        let other = keypair_from_seed([44u8; 32]);
        let cert = issue_certificate(&ca_keys, "root", &other.public_key(), "node-1").unwrap();
        let identity = ExternalIdentity {
            keys,
            certificate: cert,
        };
        assert!(matches!(
            seal_block_external(&identity, 1, &genesis_previous_hash(), b""),
            Err(SealError::CertificateKeyMismatch)
        ));
    }

    #[test]
    fn tampered_payload_fails_verification() {
        let (identity, ca_cert) = ca_identity(45, "node-1");
        let mut block =
            seal_block_external(&identity, 0, &genesis_previous_hash(), b"payload").unwrap();
        block.payload[0] ^= 1;
        let trust = TrustConfig::with_anchors(vec![ca_cert]);
        assert_eq!(
            verify_block(&block, &genesis_previous_hash(), 0, &trust),
            Err(RejectReason::BadPayload)
        );
    }

    #[test]
    fn difficulty_one_wins_on_first_draw() {
        let outcome = seal_block_pow(
            "miner",
            &BigUint::from(1u32),
            0,
            &genesis_previous_hash(),
            b"",
            &pow_opts(1),
        )
        .unwrap();
        assert_eq!(outcome.iterations, 1);
    }

    #[test]
    fn pow_block_verifies_and_is_self_signed() {
        let d = BigUint::from(8u32);
        let outcome = seal_block_pow(
            "miner",
            &d,
            0,
            &genesis_previous_hash(),
            b"data",
            &pow_opts(2),
        )
        .unwrap();
        let block = &outcome.block;
        assert_eq!(block.header.difficulty, d);
        assert!(block.header.certificate.verify_self_signed());
        assert_eq!(block.header.certificate.subject(), "miner");
        verify_block(block, &genesis_previous_hash(), 0, &TrustConfig::pow_only()).unwrap();
        // The achieved difficulty is recomputable and meets the declared one.
        assert!(block_difficulty(&block.header.block_hash()) >= d);
    }

    #[test]
    fn pow_is_reproducible_with_one_worker_and_a_seed() {
        let d = BigUint::from(16u32);
        let a = seal_block_pow("m", &d, 3, &genesis_previous_hash(), b"x", &pow_opts(9)).unwrap();
        let b = seal_block_pow("m", &d, 3, &genesis_previous_hash(), b"x", &pow_opts(9)).unwrap();
        assert_eq!(a.iterations, b.iterations);
        assert_eq!(a.block.to_wire_json(), b.block.to_wire_json());
    }

    #[test]
    fn pow_rejects_difficulty_zero() {
        assert!(matches!(
            seal_block_pow(
                "m",
                &BigUint::zero(),
                0,
                &genesis_previous_hash(),
                b"",
                &PowOptions::default()
            ),
            Err(SealError::InvalidDifficulty)
        ));
    }

    #[test]
    fn iteration_cap_aborts_the_search() {
        // A hash is 256 bits; difficulty 2^128 is unreachable in two draws.
        let d = BigUint::one() << 128u32;
        let options = PowOptions {
            iteration_cap: Some(2),
            seed: Some(3),
            ..PowOptions::default()
        };
        assert!(matches!(
            seal_block_pow("m", &d, 0, &genesis_previous_hash(), b"", &options),
            Err(SealError::IterationCapExceeded { cap: 2 })
        ));
    }

    #[test]
    fn parallel_workers_produce_a_valid_block() {
        let d = BigUint::from(32u32);
        let options = PowOptions {
            seed: Some(5),
            workers: NonZeroUsize::new(4),
            ..PowOptions::default()
        };
        let outcome =
            seal_block_pow("m", &d, 0, &genesis_previous_hash(), b"par", &options).unwrap();
        assert!(outcome.iterations >= 1);
        verify_block(
            &outcome.block,
            &genesis_previous_hash(),
            0,
            &TrustConfig::pow_only(),
        )
        .unwrap();
    }

    #[test]
    fn lottery_iterations_average_near_difficulty() {
        let d = BigUint::from(16u32);
        let runs = 400;
        let mut total = 0u64;
        for seed in 0..runs {
            let outcome =
                seal_block_pow("m", &d, 0, &genesis_previous_hash(), b"", &pow_opts(seed)).unwrap();
            total += outcome.iterations;
        }
        let mean = total as f64 / runs as f64;
        assert!((mean - 16.0).abs() < 16.0 * 0.2, "mean={mean}");
    }

    #[test]
    fn lottery_iterations_look_geometric() {
        // Geometric(p = 1/d): mean d, variance d^2 (1 - 1/d). Checked at
        // d = 8 and d = 32 with seeded draws and wide bands.
        for (d, runs) in [(8u64, 1200u64), (32u64, 500u64)] {
            let big_d = BigUint::from(d);
            let samples: Vec<f64> = (0..runs)
                .map(|seed| {
                    seal_block_pow(
                        "m",
                        &big_d,
                        0,
                        &genesis_previous_hash(),
                        b"",
                        &pow_opts(1_000 + seed),
                    )
                    .unwrap()
                    .iterations as f64
                })
                .collect();
            let n = samples.len() as f64;
            let mean = samples.iter().sum::<f64>() / n;
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            let d = d as f64;
            assert!((mean - d).abs() < 0.2 * d, "d={d} mean={mean}");
            assert!(
                var > 0.5 * d * d && var < 1.7 * d * d,
                "d={d} var={var} (expected ~{})",
                d * d
            );
        }
    }

    #[test]
    fn verification_never_iterates_the_lottery() {
        use crate::crypto::OperationCounts;
        let d = BigUint::from(64u32);
        let outcome = seal_block_pow(
            "m",
            &d,
            0,
            &genesis_previous_hash(),
            b"probe",
            &pow_opts(11),
        )
        .unwrap();
        let before = OperationCounts::snapshot();
        verify_block(
            &outcome.block,
            &genesis_previous_hash(),
            0,
            &TrustConfig::pow_only(),
        )
        .unwrap();
        let cost = OperationCounts::snapshot().since(&before);
        assert_eq!(cost.hashes, 2);
        assert_eq!(cost.signature_verifies, 2);
    }

    #[test]
    fn raising_declared_difficulty_post_hoc_is_bad_proof() {
        // Mine by hand so the private key is still around to re-sign after
        // inflating the declared difficulty.
        let keys = keypair_from_seed([50u8; 32]);
        let cert = make_self_signed_certificate(&keys, "cheat");
        let payload = b"forged";
        let payload_digest = crypto::hash(payload);
        let prev = genesis_previous_hash();

        // Find the achieved difficulty and declare something higher.
        let probe = block_hash(0, &BigUint::from(1u32), &cert, &prev, &payload_digest);
        let achieved = block_difficulty(&probe);
        let declared = achieved.clone() + BigUint::from(1000u32);
        let h = block_hash(0, &declared, &cert, &prev, &payload_digest);
        // It is overwhelmingly unlikely that the re-hash accidentally meets
        // the inflated declaration; skip the assertion if it ever does.
        if meets_difficulty(&h, &declared) {
            return;
        }
        let block = Block {
            header: BlockHeader {
                block_number: 0,
                difficulty: declared,
                certificate: cert,
                previous_block_hash: prev,
                payload_digest,
                signature: crypto::sign(&keys, h.as_bytes()),
            },
            payload: payload.to_vec(),
        };
        assert_eq!(
            verify_block(&block, &prev, 0, &TrustConfig::pow_only()),
            Err(RejectReason::BadProof)
        );
    }

    #[test]
    fn pow_block_with_ca_certificate_is_untrusted() {
        let (ca_keys, _) = ca();
        let keys = keypair_from_seed([51u8; 32]);
        let cert = issue_certificate(&ca_keys, "root", &keys.public_key(), "node-1").unwrap();
        let payload_digest = crypto::hash(b"");
        let prev = genesis_previous_hash();
        let d = BigUint::one();
        let h = block_hash(0, &d, &cert, &prev, &payload_digest);
        let block = Block {
            header: BlockHeader {
                block_number: 0,
                difficulty: d,
                certificate: cert,
                previous_block_hash: prev,
                payload_digest,
                signature: crypto::sign(&keys, h.as_bytes()),
            },
            payload: Vec::new(),
        };
        assert_eq!(
            verify_block(&block, &prev, 0, &TrustConfig::pow_only()),
            Err(RejectReason::UntrustedCertificate)
        );
    }

    #[test]
    fn verify_rejects_wrong_link_and_number_first() {
        let (identity, ca_cert) = ca_identity(52, "node-1");
        let block = seal_block_external(&identity, 5, &crypto::hash(b"tip"), b"x").unwrap();
        let trust = TrustConfig::with_anchors(vec![ca_cert]);
        assert_eq!(
            verify_block(&block, &crypto::hash(b"other"), 5, &trust),
            Err(RejectReason::BadLink)
        );
        assert_eq!(
            verify_block(&block, &crypto::hash(b"tip"), 6, &trust),
            Err(RejectReason::BadNumber)
        );
    }

    #[test]
    fn external_block_without_matching_anchor_is_untrusted() {
        let (identity, _) = ca_identity(53, "node-1");
        let block = seal_block_external(&identity, 0, &genesis_previous_hash(), b"x").unwrap();
        // Anchor set contains an unrelated CA.
        let other_ca = make_self_signed_certificate(&keypair_from_seed([54u8; 32]), "other-root");
        let trust = TrustConfig::with_anchors(vec![other_ca]);
        assert_eq!(
            verify_block(&block, &genesis_previous_hash(), 0, &trust),
            Err(RejectReason::UntrustedCertificate)
        );
    }

    #[test]
    fn allowlist_applies_to_both_modes() {
        // External block whose CA-signed certificate is not on the list.
        let (identity, ca_cert) = ca_identity(55, "node-1");
        let block = seal_block_external(&identity, 0, &genesis_previous_hash(), b"x").unwrap();
        let mut trust = TrustConfig::with_anchors(vec![ca_cert]);
        trust.allowlist = Some(Allowlist::from_fingerprints([crypto::hash(
            b"someone else",
        )]));
        assert_eq!(
            verify_block(&block, &genesis_previous_hash(), 0, &trust),
            Err(RejectReason::UnknownCertificate)
        );

        // Same trust but with the right fingerprint listed: accepted.
        trust.allowlist = Some(Allowlist::from_fingerprints([identity
            .certificate
            .fingerprint()]));
        verify_block(&block, &genesis_previous_hash(), 0, &trust).unwrap();

        // Proof-of-work block against an allowlist that ignores it.
        let outcome = seal_block_pow(
            "m",
            &BigUint::from(4u32),
            0,
            &genesis_previous_hash(),
            b"",
            &pow_opts(60),
        )
        .unwrap();
        let trust = TrustConfig {
            trust_anchors: Vec::new(),
            allowlist: Some(Allowlist::from_fingerprints([crypto::hash(b"nobody")])),
        };
        assert_eq!(
            verify_block(&outcome.block, &genesis_previous_hash(), 0, &trust),
            Err(RejectReason::UnknownCertificate)
        );
    }

    #[test]
    fn verification_is_idempotent() {
        let d = BigUint::from(4u32);
        let outcome = seal_block_pow(
            "m",
            &d,
            0,
            &genesis_previous_hash(),
            b"twice",
            &pow_opts(61),
        )
        .unwrap();
        let trust = TrustConfig::pow_only();
        for _ in 0..3 {
            verify_block(&outcome.block, &genesis_previous_hash(), 0, &trust).unwrap();
        }
    }

    #[test]
    fn round_robin_cycles_in_order() {
        let mut rr = RoundRobin::new(4);
        let leaders: Vec<usize> = (0..8).map(|b| rr.next_leader(b)).collect();
        assert_eq!(leaders, vec![0, 1, 2, 3, 0, 1, 2, 3]);
    }

    #[test]
    fn single_node_always_leads() {
        let mut s = SingleNode;
        assert!((0..10).all(|b| s.next_leader(b) == 0));
        assert_eq!(s.node_count(), 1);
    }

    #[test]
    fn random_leader_is_seeded_and_in_range() {
        let mut a = RandomLeader::new(5, 77);
        let mut b = RandomLeader::new(5, 77);
        let la: Vec<usize> = (0..100).map(|i| a.next_leader(i)).collect();
        let lb: Vec<usize> = (0..100).map(|i| b.next_leader(i)).collect();
        assert_eq!(la, lb);
        assert!(la.iter().all(|&l| l < 5));
    }
}
