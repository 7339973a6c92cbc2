//! Multi-node races and timing statistics.
//!
//! The harness answers two questions at desk scale: do mining times follow
//! the exponential law `P(T(r) <= t) = 1 - exp(-(r/d) t)`, and do long-run
//! win shares match each node's share of the total hash rate? It runs in two
//! modes. Analytic mode samples the exponential model directly and is cheap
//! enough for six-digit block counts. Real mode actually hashes: each node
//! runs the classic nonce miner (or the certificate lottery) and the winner
//! is the node with the smallest iteration count scaled by its declared hash
//! rate. Using iterations instead of wall clock removes machine noise; the
//! model is per-hash anyway.

pub mod stats;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use thiserror::Error;

use crate::block::{difficulty_target, Block, ClassicPowHeader};
use crate::chain::Chain;
use crate::consensus::{
    seal_block_external, seal_block_pow, verify_block, ConsensusMode, ExternalIdentity,
    ExternalScheduler, PowOptions, RejectReason, SealError, TrustConfig,
};
use crate::crypto::{self, Digest, OperationCounts};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("simulation requires at least one node")]
    NoNodes,
    #[error("hash rate must be positive and finite, got {0}")]
    BadRate(f64),
    #[error("difficulty must be at least 1, got {0}")]
    BadDifficulty(f64),
    #[error("time must be nonnegative and finite, got {0}")]
    BadTime(f64),
    #[error("at least one block must be simulated")]
    NoBlocks,
    #[error("scheduler chose leader {leader} but only {nodes} nodes are profiled")]
    LeaderOutOfRange { leader: usize, nodes: usize },
    #[error("cost probe requires a proof-of-work block (difficulty > 0)")]
    NotProofOfWork,
    #[error("cost probe block failed verification: {0}")]
    ProbeRejected(RejectReason),
    #[error(transparent)]
    Seal(#[from] SealError),
}

/// A simulated node: a name and a declared hash rate in hashes per second.
#[derive(Clone, Debug)]
pub struct NodeProfile {
    pub node_id: String,
    pub hash_rate: f64,
}

impl NodeProfile {
    pub fn new(node_id: impl Into<String>, hash_rate: f64) -> Self {
        Self {
            node_id: node_id.into(),
            hash_rate,
        }
    }
}

/// Which lottery the real-mode race runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LotteryKind {
    /// Classic header, incrementing nonce.
    Nonce,
    /// Fresh key pair and self-signed certificate per draw.
    Certificate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SimMode {
    Analytic,
    Real,
    Schedule,
}

/// Outcome of a simulation run. Reports are plain data and serialize to
/// byte-identical JSON for identical inputs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimReport {
    pub mode: SimMode,
    pub total_blocks: u64,
    pub node_ids: Vec<String>,
    pub win_counts: Vec<u64>,
    /// `win_counts / total_blocks`; sums to 1 up to rounding.
    pub win_shares: Vec<f64>,
    /// Winning node index per block.
    pub winners: Vec<u32>,
    /// Winning time per block, in seconds.
    pub samples: Vec<f64>,
    /// One-sample KS statistic of `samples` against the exponential race
    /// model; absent for schedule runs, which the model does not cover.
    pub ks_statistic: Option<f64>,
}

impl SimReport {
    fn from_race(
        mode: SimMode,
        node_ids: Vec<String>,
        winners: Vec<u32>,
        samples: Vec<f64>,
        ks_statistic: Option<f64>,
    ) -> Self {
        let total_blocks = winners.len() as u64;
        let mut win_counts = vec![0u64; node_ids.len()];
        for &w in &winners {
            win_counts[w as usize] += 1;
        }
        let win_shares = win_counts
            .iter()
            .map(|&c| c as f64 / total_blocks as f64)
            .collect();
        Self {
            mode,
            total_blocks,
            node_ids,
            win_counts,
            win_shares,
            winners,
            samples,
            ks_statistic,
        }
    }

    pub fn winner_id(&self, block_index: usize) -> &str {
        &self.node_ids[self.winners[block_index] as usize]
    }

    /// Compact single-object JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }

    /// CSV of `(block_index, winner, t_sample)` rows.
    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(["block_index", "winner", "t_sample"])
            .expect("csv header");
        for (i, (&w, &t)) in self.winners.iter().zip(&self.samples).enumerate() {
            writer
                .write_record([
                    i.to_string(),
                    self.node_ids[w as usize].clone(),
                    t.to_string(),
                ])
                .expect("csv row");
        }
        String::from_utf8(writer.into_inner().expect("csv flush")).expect("csv is UTF-8")
    }
}

fn validate_rate(rate: f64) -> Result<(), SimError> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(SimError::BadRate(rate));
    }
    Ok(())
}

fn validate_nodes(nodes: &[NodeProfile]) -> Result<(), SimError> {
    if nodes.is_empty() {
        return Err(SimError::NoNodes);
    }
    nodes.iter().try_for_each(|n| validate_rate(n.hash_rate))
}

/// `P(T(r) <= t) = 1 - exp(-(r/d) t)`: the probability that a node hashing
/// at rate `r` finds a block satisfying difficulty `d` within `t` seconds.
pub fn model_cdf(t: f64, hash_rate: f64, difficulty: f64) -> Result<f64, SimError> {
    validate_rate(hash_rate)?;
    if !(difficulty.is_finite() && difficulty >= 1.0) {
        return Err(SimError::BadDifficulty(difficulty));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(SimError::BadTime(t));
    }
    Ok(1.0 - (-(hash_rate / difficulty) * t).exp())
}

/// `p_i = r_i / sum(r_j)`: each node's win probability is its share of the
/// total hash rate.
pub fn expected_win_share(rates: &[f64]) -> Result<Vec<f64>, SimError> {
    if rates.is_empty() {
        return Err(SimError::NoNodes);
    }
    rates.iter().try_for_each(|&r| validate_rate(r))?;
    let total: f64 = rates.iter().sum();
    Ok(rates.iter().map(|r| r / total).collect())
}

/// Samples the race directly from the exponential model: per block, every
/// node draws `T_i ~ Exp(r_i / d)` and the minimum wins. Zero network
/// latency, deterministic under `seed`.
pub fn run_pow_race_analytic(
    nodes: &[NodeProfile],
    difficulty: f64,
    num_blocks: u64,
    seed: u64,
) -> Result<SimReport, SimError> {
    validate_nodes(nodes)?;
    if !(difficulty.is_finite() && difficulty >= 1.0) {
        return Err(SimError::BadDifficulty(difficulty));
    }
    if num_blocks == 0 {
        return Err(SimError::NoBlocks);
    }

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut winners = Vec::with_capacity(num_blocks as usize);
    let mut samples = Vec::with_capacity(num_blocks as usize);
    for _ in 0..num_blocks {
        let mut best = 0u32;
        let mut best_time = f64::INFINITY;
        for (i, node) in nodes.iter().enumerate() {
            let rate = node.hash_rate / difficulty;
            let t = -(1.0 - rng.gen::<f64>()).ln() / rate;
            if t < best_time {
                best_time = t;
                best = i as u32;
            }
        }
        winners.push(best);
        samples.push(best_time);
    }

    let total_rate: f64 = nodes.iter().map(|n| n.hash_rate).sum();
    let ks = stats::ks_statistic(&samples, |t| {
        model_cdf(t.max(0.0), total_rate, difficulty).expect("validated parameters")
    });
    Ok(SimReport::from_race(
        SimMode::Analytic,
        nodes.iter().map(|n| n.node_id.clone()).collect(),
        winners,
        samples,
        Some(ks),
    ))
}

/// Iterations the classic nonce miner needs from a random starting nonce.
fn nonce_mine(block_number: u64, difficulty: u64, prev: Digest, start: u64) -> u64 {
    let target = difficulty_target(&BigUint::from(difficulty));
    let mut header = ClassicPowHeader {
        block_number,
        difficulty,
        nonce: start,
        previous_block_hash: prev,
    };
    let mut buf = Vec::with_capacity(96);
    let mut iterations = 0u64;
    loop {
        iterations += 1;
        header.canonical_bytes_into(&mut buf);
        let h = crypto::hash(&buf);
        if BigUint::from_bytes_be(h.as_bytes()) < target {
            return iterations;
        }
        header.nonce = header.nonce.wrapping_add(1);
    }
}

/// Runs the race with actual hashing. Every node searches independently;
/// the winner is the node whose iteration count divided by its declared hash
/// rate is smallest, ties going to the earliest-declared node. Timing is
/// `iterations / hash_rate`, so results are machine-independent.
pub fn run_pow_race_real(
    nodes: &[NodeProfile],
    difficulty: u64,
    num_blocks: u64,
    seed: u64,
    lottery: LotteryKind,
) -> Result<SimReport, SimError> {
    validate_nodes(nodes)?;
    if difficulty == 0 {
        return Err(SimError::BadDifficulty(0.0));
    }
    if num_blocks == 0 {
        return Err(SimError::NoBlocks);
    }

    let big_difficulty = BigUint::from(difficulty);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut winners = Vec::with_capacity(num_blocks as usize);
    let mut samples = Vec::with_capacity(num_blocks as usize);
    for block_number in 0..num_blocks {
        let mut prev_bytes = [0u8; 32];
        rng.fill_bytes(&mut prev_bytes);
        let prev = Digest::from_bytes(prev_bytes);

        let mut best = 0u32;
        let mut best_time = f64::INFINITY;
        for (i, node) in nodes.iter().enumerate() {
            let iterations = match lottery {
                LotteryKind::Nonce => nonce_mine(block_number, difficulty, prev, rng.gen::<u64>()),
                LotteryKind::Certificate => {
                    let options = PowOptions {
                        seed: Some(rng.gen::<u64>()),
                        ..PowOptions::default()
                    };
                    seal_block_pow(
                        &node.node_id,
                        &big_difficulty,
                        block_number,
                        &prev,
                        &[],
                        &options,
                    )?
                    .iterations
                }
            };
            let t = iterations as f64 / node.hash_rate;
            if t < best_time {
                best_time = t;
                best = i as u32;
            }
        }
        winners.push(best);
        samples.push(best_time);
    }

    let total_rate: f64 = nodes.iter().map(|n| n.hash_rate).sum();
    let ks = stats::ks_statistic(&samples, |t| {
        model_cdf(t.max(0.0), total_rate, difficulty as f64).expect("validated parameters")
    });
    Ok(SimReport::from_race(
        SimMode::Real,
        nodes.iter().map(|n| n.node_id.clone()).collect(),
        winners,
        samples,
        Some(ks),
    ))
}

const SCHEDULE_CA_NAME: &str = "sim-schedule-ca";

/// Plays out an external-consensus schedule: the scheduler names a leader
/// per block, the leader seals an external block with its CA-signed identity
/// and the block is appended to a real chain. Win shares fall out of the
/// schedule; no timing model applies.
pub fn run_schedule(
    scheduler: &mut dyn ExternalScheduler,
    num_blocks: u64,
    nodes: &[NodeProfile],
    seed: u64,
) -> Result<SimReport, SimError> {
    validate_nodes(nodes)?;
    if num_blocks == 0 {
        return Err(SimError::NoBlocks);
    }

    // Self-contained PKI for the run, derived from the seed.
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut seed_bytes = [0u8; 32];
    rng.fill_bytes(&mut seed_bytes);
    let ca_keys = crypto::keypair_from_seed(seed_bytes);
    let ca_cert =
        crypto::make_self_signed_certificate_with_rng(&ca_keys, SCHEDULE_CA_NAME, &mut rng);
    let identities: Vec<ExternalIdentity> = nodes
        .iter()
        .map(|node| {
            rng.fill_bytes(&mut seed_bytes);
            let keys = crypto::keypair_from_seed(seed_bytes);
            let certificate = crypto::issue_certificate_with_rng(
                &ca_keys,
                SCHEDULE_CA_NAME,
                &keys.public_key(),
                &node.node_id,
                &mut rng,
            )
            .expect("node ids never equal the internal CA name");
            ExternalIdentity { keys, certificate }
        })
        .collect();

    let trust = TrustConfig::with_anchors(vec![ca_cert]);
    let mut winners = Vec::with_capacity(num_blocks as usize);
    let mut chain: Option<Chain> = None;
    for block_number in 0..num_blocks {
        let leader = scheduler.next_leader(block_number);
        if leader >= nodes.len() {
            return Err(SimError::LeaderOutOfRange {
                leader,
                nodes: nodes.len(),
            });
        }
        let payload = block_number.to_string().into_bytes();
        match chain.as_mut() {
            None => {
                let mode = ConsensusMode::External(identities[leader].clone());
                chain = Some(
                    Chain::init(trust.clone(), &payload, &mode)
                        .expect("schedule genesis always verifies"),
                );
            }
            Some(chain) => {
                let (tip_hash, number) = chain.expected_next();
                let block = seal_block_external(&identities[leader], number, &tip_hash, &payload)?;
                chain.append(block).expect("schedule blocks always verify");
            }
        }
        winners.push(leader as u32);
    }

    let samples = vec![0.0; winners.len()];
    Ok(SimReport::from_race(
        SimMode::Schedule,
        nodes.iter().map(|n| n.node_id.clone()).collect(),
        winners,
        samples,
        None,
    ))
}

/// Counts the hash computations and signature verifications one
/// verification of a proof-of-work block performs. The count never depends
/// on the difficulty: verification does no lottery iteration.
pub fn verification_cost_probe(
    block: &Block,
    expected_previous_hash: &Digest,
    expected_number: u64,
) -> Result<OperationCounts, SimError> {
    if block.header.difficulty.is_zero() {
        return Err(SimError::NotProofOfWork);
    }
    let trust = TrustConfig::pow_only();
    let before = OperationCounts::snapshot();
    verify_block(block, expected_previous_hash, expected_number, &trust)
        .map_err(SimError::ProbeRejected)?;
    Ok(OperationCounts::snapshot().since(&before))
}
