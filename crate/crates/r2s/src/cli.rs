//! The `r2s` command-line front end.
//!
//! Exit codes are part of the interface:
//!
//! * 0 -- success
//! * 1 -- usage or identity errors: bad flags, bad identities, unwritable
//!   output destinations
//! * 2 -- verification rejection; stderr carries the reason token
//!   (`bad-link`, `bad-number`, `bad-payload`, `bad-signature`, `bad-proof`,
//!   `untrusted-certificate`, `unknown-certificate`)
//! * 3 -- unreadable or malformed input files
//!
//! stdout carries only machine-readable output; diagnostics go to stderr.

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use fs2::FileExt;
use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::block::{genesis_previous_hash, Block};
use crate::chain::{parse_chain_bytes, Chain, ChainRejection, LoadError, Manifest};
use crate::consensus::{
    seal_block_external, seal_block_pow, verify_block, ExternalIdentity, PowOptions, RandomLeader,
    RejectReason, RoundRobin, SealError, SingleNode, TrustConfig,
};
use crate::crypto::{self, CryptoError, Digest};
use crate::sim::{
    run_pow_race_analytic, run_pow_race_real, run_schedule, LotteryKind, NodeProfile, SimReport,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_REJECTED: u8 = 2;
pub const EXIT_MALFORMED: u8 = 3;

#[derive(Debug)]
enum CliError {
    /// Bad flags, bad identities, unwritable destinations.
    Usage(String),
    /// A block or chain failed verification.
    Rejected {
        index: Option<u64>,
        reason: RejectReason,
    },
    /// An input file could not be read or parsed.
    Malformed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Rejected { .. } => EXIT_REJECTED,
            CliError::Malformed(_) => EXIT_MALFORMED,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(msg) => msg.clone(),
            CliError::Rejected {
                index: Some(i),
                reason,
            } => format!("rejected at block {i}: {reason}"),
            CliError::Rejected {
                index: None,
                reason,
            } => format!("rejected: {reason}"),
            CliError::Malformed(msg) => format!("malformed input: {msg}"),
        }
    }
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Rejected(r) => r.into(),
            LoadError::Malformed(m) => CliError::Malformed(m),
            LoadError::Io(io) => CliError::Malformed(io.to_string()),
        }
    }
}

impl From<ChainRejection> for CliError {
    fn from(r: ChainRejection) -> Self {
        CliError::Rejected {
            index: Some(r.index),
            reason: r.reason,
        }
    }
}

impl From<SealError> for CliError {
    fn from(e: SealError) -> Self {
        match &e {
            SealError::SelfSignedCertificate | SealError::CertificateKeyMismatch => {
                CliError::Usage(format!("identity error (untrusted-certificate): {e}"))
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

/// Read-side failures are malformed input (exit 3).
fn read_err(e: impl std::fmt::Display) -> CliError {
    CliError::Malformed(e.to_string())
}

/// Write-side failures are bad destinations (exit 1).
fn write_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("cannot write {}: {e}", path.display()))
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Parser)]
#[command(
    name = "r2s",
    version,
    about = "Append-only block chain with signature attestation and pluggable consensus"
)]
struct Cli {
    /// Chain file (newline-delimited JSON, one block per line)
    #[arg(long, global = true, default_value = "chain.ndjson")]
    chain: PathBuf,

    /// Manifest file (trust anchors, allowlist, scheme)
    #[arg(long, global = true, default_value = "manifest.json")]
    manifest: PathBuf,

    /// Deterministic seed: 64 hex chars for keygen, a decimal integer
    /// elsewhere
    #[arg(long, global = true)]
    seed: Option<String>,

    /// Output format on stdout
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key pair and write the private key file
    Keygen {
        /// Destination for the private key envelope
        #[arg(long)]
        out: PathBuf,
    },
    /// Create a self-signed CA certificate from a key file
    CaInit {
        #[arg(long)]
        key: PathBuf,
        /// CA name (certificate subject and issuer)
        #[arg(long)]
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Issue a CA-signed certificate binding a subject to its public key
    CertIssue {
        #[arg(long)]
        ca_key: PathBuf,
        #[arg(long)]
        ca_name: String,
        /// Key file whose public half goes into the certificate
        #[arg(long)]
        subject_key: PathBuf,
        #[arg(long)]
        subject: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Create a chain file and manifest with a sealed genesis block
    ChainInit {
        #[command(flatten)]
        mode: ModeArgs,
        /// CA certificate file to record as a trust anchor (repeatable)
        #[arg(long)]
        trust_anchor: Vec<PathBuf>,
        /// Allowlisted certificate fingerprint, lowercase hex (repeatable)
        #[arg(long)]
        allow: Vec<String>,
        /// Add the genesis certificate's fingerprint to the allowlist
        #[arg(long)]
        allow_genesis: bool,
        #[command(flatten)]
        payload: PayloadArgs,
    },
    /// Seal one block and append it to the chain file
    Append {
        #[command(flatten)]
        mode: ModeArgs,
        #[command(flatten)]
        payload: PayloadArgs,
    },
    /// Verify the whole chain against its manifest
    Verify,
    /// Print the attestation record of one block
    Attest {
        #[arg(long)]
        index: usize,
    },
    /// Run the simulation harness
    Simulate {
        #[command(subcommand)]
        kind: SimulateCommand,
        /// Write the report here instead of stdout
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ModeArgs {
    /// Seal by proof of work at this global difficulty (d >= 1)
    #[arg(long, conflicts_with_all = ["external", "key", "cert"])]
    difficulty: Option<String>,

    /// Seal under external consensus with the --key/--cert identity
    #[arg(long, requires = "key", requires = "cert")]
    external: bool,

    /// Private key file of the external identity
    #[arg(long)]
    key: Option<PathBuf>,

    /// CA-signed certificate file of the external identity
    #[arg(long)]
    cert: Option<PathBuf>,

    /// Subject name for self-signed proof-of-work certificates
    #[arg(long, default_value = "miner")]
    subject: String,
}

#[allow(clippy::large_enum_variant)]
enum SealPlan {
    Pow {
        difficulty: BigUint,
        subject: String,
    },
    External(ExternalIdentity),
}

impl ModeArgs {
    fn plan(&self) -> Result<SealPlan, CliError> {
        match (&self.difficulty, self.external) {
            (Some(d), false) => {
                let difficulty = parse_biguint(d)?;
                if difficulty.is_zero() {
                    return Err(CliError::Usage(
                        "--difficulty 0 means external consensus; use --external with an identity"
                            .into(),
                    ));
                }
                Ok(SealPlan::Pow {
                    difficulty,
                    subject: self.subject.clone(),
                })
            }
            (None, true) => {
                let key_path = self.key.as_ref().expect("clap requires --key");
                let cert_path = self.cert.as_ref().expect("clap requires --cert");
                let keys = crypto::read_key_file(key_path).map_err(read_err)?;
                let certificate = crypto::read_certificate_file(cert_path).map_err(read_err)?;
                Ok(SealPlan::External(ExternalIdentity { keys, certificate }))
            }
            _ => Err(CliError::Usage(
                "choose exactly one sealing mode: --difficulty N or --external --key K --cert C"
                    .into(),
            )),
        }
    }
}

#[derive(Args)]
struct PayloadArgs {
    /// Literal payload string; omit to read raw bytes from --payload-file or
    /// stdin
    #[arg(value_name = "PAYLOAD")]
    payload: Option<String>,

    /// Read the payload from this file
    #[arg(long, conflicts_with = "payload")]
    payload_file: Option<PathBuf>,
}

impl PayloadArgs {
    fn read(&self) -> Result<Vec<u8>, CliError> {
        if let Some(literal) = &self.payload {
            return Ok(literal.clone().into_bytes());
        }
        if let Some(path) = &self.payload_file {
            return fs::read(path).map_err(read_err);
        }
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf).map_err(read_err)?;
        Ok(buf)
    }
}

#[derive(Subcommand)]
enum SimulateCommand {
    /// Race sampled from the exponential model (no hashing)
    PowAnalytic {
        /// Comma-separated hash rates, one per node
        #[arg(long, value_delimiter = ',', required = true)]
        rates: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        difficulty: f64,
        #[arg(long)]
        blocks: u64,
    },
    /// Race with actual hashing via the reference nonce miner
    PowReal {
        #[arg(long, value_delimiter = ',', required = true)]
        rates: Vec<f64>,
        #[arg(long)]
        difficulty: u64,
        #[arg(long)]
        blocks: u64,
        /// Mine with the certificate lottery instead of the nonce miner
        #[arg(long)]
        cert_lottery: bool,
    },
    /// External-consensus leader schedule
    Schedule {
        /// Rotate leadership over N nodes
        #[arg(long, conflicts_with_all = ["single", "random_leader"])]
        round_robin: Option<usize>,
        /// Single-writer schedule
        #[arg(long, conflicts_with_all = ["round_robin", "random_leader"])]
        single: bool,
        /// Randomized election over N nodes
        #[arg(long)]
        random_leader: Option<usize>,
        /// Election window in seconds (random leader)
        #[arg(long, default_value_t = RandomLeader::DEFAULT_ELECTION_WINDOW.0)]
        t_election_min: f64,
        #[arg(long, default_value_t = RandomLeader::DEFAULT_ELECTION_WINDOW.1)]
        t_election_max: f64,
        /// Mean network delay in seconds (random leader)
        #[arg(long, default_value_t = RandomLeader::DEFAULT_NETWORK_MEAN)]
        t_network: f64,
        #[arg(long)]
        blocks: u64,
    },
}

fn parse_biguint(s: &str) -> Result<BigUint, CliError> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(CliError::Usage(format!(
            "difficulty must be a nonnegative decimal integer, got {s:?}"
        )));
    }
    BigUint::parse_bytes(s.as_bytes(), 10)
        .ok_or_else(|| CliError::Usage(format!("unparseable difficulty {s:?}")))
}

fn parse_seed_u64(seed: &Option<String>) -> Result<Option<u64>, CliError> {
    seed.as_deref()
        .map(|s| {
            s.parse::<u64>()
                .map_err(|_| CliError::Usage(format!("--seed must be a decimal u64, got {s:?}")))
        })
        .transpose()
}

fn parse_seed_hex32(seed: &Option<String>) -> Result<Option<[u8; 32]>, CliError> {
    seed.as_deref()
        .map(|s| {
            let raw = hex::decode(s)
                .map_err(|e| CliError::Usage(format!("--seed must be hex for keygen: {e}")))?;
            <[u8; 32]>::try_from(raw.as_slice()).map_err(|_| {
                CliError::Usage("--seed for keygen must be exactly 64 hex chars (32 bytes)".into())
            })
        })
        .transpose()
}

/// Parses argv, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    EXIT_OK
                }
                _ => {
                    eprint!("{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("r2s: {}", e.message());
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    if cli.format == Format::Csv && !matches!(cli.command, Command::Simulate { .. }) {
        return Err(CliError::Usage(
            "--format csv is only available for simulate".into(),
        ));
    }
    match cli.command {
        Command::Keygen { out } => cmd_keygen(&out, &cli.seed, cli.format),
        Command::CaInit { key, name, out } => cmd_ca_init(&key, &name, &out, cli.format),
        Command::CertIssue {
            ca_key,
            ca_name,
            subject_key,
            subject,
            out,
        } => cmd_cert_issue(&ca_key, &ca_name, &subject_key, &subject, &out, cli.format),
        Command::ChainInit {
            mode,
            trust_anchor,
            allow,
            allow_genesis,
            payload,
        } => cmd_chain_init(
            &cli.chain,
            &cli.manifest,
            &mode,
            &trust_anchor,
            &allow,
            allow_genesis,
            &payload,
            &cli.seed,
            cli.format,
        ),
        Command::Append { mode, payload } => cmd_append(
            &cli.chain,
            &cli.manifest,
            &mode,
            &payload,
            &cli.seed,
            cli.format,
        ),
        Command::Verify => cmd_verify(&cli.chain, &cli.manifest, cli.format),
        Command::Attest { index } => cmd_attest(&cli.chain, &cli.manifest, index, cli.format),
        Command::Simulate { kind, out } => {
            cmd_simulate(kind, &cli.seed, cli.format, out.as_deref())
        }
    }
}

#[derive(Serialize)]
struct KeygenOutput {
    public_key: String,
}

fn cmd_keygen(out: &Path, seed: &Option<String>, format: Format) -> Result<(), CliError> {
    let seed_bytes = parse_seed_hex32(seed)?;
    let keys = crypto::generate_keypair(seed_bytes.as_ref().map(|s| s.as_slice()))
        .map_err(|e| CliError::Usage(e.to_string()))?;
    crypto::write_key_file(out, &keys).map_err(|e| write_err(out, e))?;
    let public_key = base64_encode(&keys.public_key());
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string(&KeygenOutput { public_key }).unwrap()
        ),
        _ => println!("{public_key}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct CertOutput {
    subject: String,
    issuer: String,
    fingerprint: String,
}

fn print_cert_output(cert: &crypto::Certificate, format: Format) {
    let out = CertOutput {
        subject: cert.subject().to_string(),
        issuer: cert.issuer().to_string(),
        fingerprint: cert.fingerprint().to_hex(),
    };
    match format {
        Format::Json => println!("{}", serde_json::to_string(&out).unwrap()),
        _ => println!("{}", out.fingerprint),
    }
}

fn cmd_ca_init(key: &Path, name: &str, out: &Path, format: Format) -> Result<(), CliError> {
    let keys = crypto::read_key_file(key).map_err(read_err)?;
    let cert = crypto::make_self_signed_certificate(&keys, name);
    crypto::write_certificate_file(out, &cert).map_err(|e| write_err(out, e))?;
    print_cert_output(&cert, format);
    Ok(())
}

fn cmd_cert_issue(
    ca_key: &Path,
    ca_name: &str,
    subject_key: &Path,
    subject: &str,
    out: &Path,
    format: Format,
) -> Result<(), CliError> {
    let ca_keys = crypto::read_key_file(ca_key).map_err(read_err)?;
    let subject_keys = crypto::read_key_file(subject_key).map_err(read_err)?;
    let cert = crypto::issue_certificate(&ca_keys, ca_name, &subject_keys.public_key(), subject)
        .map_err(|e| match e {
            CryptoError::SubjectIsIssuer => CliError::Usage(e.to_string()),
            other => CliError::Usage(other.to_string()),
        })?;
    crypto::write_certificate_file(out, &cert).map_err(|e| write_err(out, e))?;
    print_cert_output(&cert, format);
    Ok(())
}

#[derive(Serialize)]
struct SealOutput {
    block_number: u64,
    block_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    iterations: Option<u64>,
}

fn print_seal_output(block: &Block, iterations: Option<u64>, format: Format) {
    let out = SealOutput {
        block_number: block.header.block_number,
        block_hash: block.header.block_hash().to_hex(),
        iterations,
    };
    match format {
        Format::Json => println!("{}", serde_json::to_string(&out).unwrap()),
        _ => match out.iterations {
            Some(n) => println!(
                "block={} hash={} iterations={n}",
                out.block_number, out.block_hash
            ),
            None => println!("block={} hash={}", out.block_number, out.block_hash),
        },
    }
}

fn seal_with_plan(
    plan: &SealPlan,
    block_number: u64,
    previous_hash: &Digest,
    payload: &[u8],
    seed: Option<u64>,
) -> Result<(Block, Option<u64>), CliError> {
    match plan {
        SealPlan::Pow {
            difficulty,
            subject,
        } => {
            let options = PowOptions {
                seed,
                ..PowOptions::default()
            };
            let outcome = seal_block_pow(
                subject,
                difficulty,
                block_number,
                previous_hash,
                payload,
                &options,
            )?;
            Ok((outcome.block, Some(outcome.iterations)))
        }
        SealPlan::External(identity) => {
            let block = seal_block_external(identity, block_number, previous_hash, payload)?;
            Ok((block, None))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_chain_init(
    chain_path: &Path,
    manifest_path: &Path,
    mode: &ModeArgs,
    trust_anchor_paths: &[PathBuf],
    allow: &[String],
    allow_genesis: bool,
    payload: &PayloadArgs,
    seed: &Option<String>,
    format: Format,
) -> Result<(), CliError> {
    if chain_path.exists() {
        return Err(CliError::Usage(format!(
            "refusing to overwrite existing chain file {}",
            chain_path.display()
        )));
    }
    let plan = mode.plan()?;
    let payload = payload.read()?;
    let seed = parse_seed_u64(seed)?;

    let trust_anchors = trust_anchor_paths
        .iter()
        .map(|p| crypto::read_certificate_file(p).map_err(read_err))
        .collect::<Result<Vec<_>, _>>()?;

    let (genesis, iterations) = seal_with_plan(&plan, 0, &genesis_previous_hash(), &payload, seed)?;

    let mut fingerprints = allow
        .iter()
        .map(|hexfp| {
            Digest::from_hex(hexfp).map_err(|e| CliError::Usage(format!("--allow entry: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if allow_genesis {
        fingerprints.push(genesis.header.certificate.fingerprint());
    }
    let allowlist = if fingerprints.is_empty() && !allow_genesis {
        None
    } else {
        Some(fingerprints)
    };

    let manifest = Manifest::new(trust_anchors, allowlist);
    let chain = Chain::from_blocks(vec![genesis], manifest.trust_config())?;

    manifest
        .write_file(manifest_path)
        .map_err(|e| write_err(manifest_path, e))?;
    crate::chain::write_chain_file(chain_path, &chain).map_err(|e| write_err(chain_path, e))?;
    print_seal_output(&chain.blocks()[0], iterations, format);
    Ok(())
}

fn cmd_append(
    chain_path: &Path,
    manifest_path: &Path,
    mode: &ModeArgs,
    payload: &PayloadArgs,
    seed: &Option<String>,
    format: Format,
) -> Result<(), CliError> {
    let plan = mode.plan()?;
    let payload = payload.read()?;
    let seed = parse_seed_u64(seed)?;
    let manifest = Manifest::read_file(manifest_path)?;
    let trust = manifest.trust_config();

    // Read the tip, seal against it (mining can take a while), then
    // re-validate under the file lock. A tip moved by a concurrent writer
    // surfaces as bad-link and leaves the file unchanged.
    let blocks = crate::chain::read_chain_file(chain_path)?;
    let chain = Chain::from_blocks(blocks, trust.clone())?;
    let (tip_hash, next_number) = chain.expected_next();
    drop(chain);

    let (block, iterations) = seal_with_plan(&plan, next_number, &tip_hash, &payload, seed)?;
    guarded_append(chain_path, &trust, &block)?;
    print_seal_output(&block, iterations, format);
    Ok(())
}

/// Appends `block` to the chain file while holding an exclusive advisory
/// lock: re-reads the file, verifies the block against the current tip and
/// writes one line. Serializes writers; never tears the file.
fn guarded_append(chain_path: &Path, trust: &TrustConfig, block: &Block) -> Result<(), CliError> {
    let file = fs::OpenOptions::new()
        .read(true)
        .append(true)
        .open(chain_path)
        .map_err(read_err)?;
    file.lock_exclusive().map_err(read_err)?;
    let result = (|| -> Result<(), CliError> {
        let bytes = fs::read(chain_path).map_err(read_err)?;
        let blocks = parse_chain_bytes(&bytes)?;
        let chain = Chain::from_blocks(blocks, trust.clone())?;
        let (tip_hash, next_number) = chain.expected_next();
        verify_block(block, &tip_hash, next_number, trust).map_err(|reason| {
            CliError::Rejected {
                index: Some(next_number),
                reason,
            }
        })?;
        let mut line = block.to_wire_json().into_bytes();
        line.push(b'\n');
        (&file)
            .write_all(&line)
            .map_err(|e| write_err(chain_path, e))?;
        (&file).flush().map_err(|e| write_err(chain_path, e))?;
        Ok(())
    })();
    let _ = fs2::FileExt::unlock(&file);
    result
}

#[derive(Serialize)]
struct VerifyOutput {
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    blocks: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    index: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<&'static str>,
}

fn cmd_verify(chain_path: &Path, manifest_path: &Path, format: Format) -> Result<(), CliError> {
    let manifest = Manifest::read_file(manifest_path)?;
    let blocks = crate::chain::read_chain_file(chain_path)?;
    let total = blocks.len() as u64;
    match Chain::from_blocks(blocks, manifest.trust_config()) {
        Ok(_) => {
            let out = VerifyOutput {
                verdict: "accept",
                blocks: Some(total),
                index: None,
                reason: None,
            };
            match format {
                Format::Json => println!("{}", serde_json::to_string(&out).unwrap()),
                _ => println!("ok blocks={total}"),
            }
            Ok(())
        }
        Err(rejection) => {
            let out = VerifyOutput {
                verdict: "reject",
                blocks: None,
                index: Some(rejection.index),
                reason: Some(rejection.reason.token()),
            };
            match format {
                Format::Json => println!("{}", serde_json::to_string(&out).unwrap()),
                _ => println!(
                    "reject index={} reason={}",
                    rejection.index, rejection.reason
                ),
            }
            Err(rejection.into())
        }
    }
}

fn cmd_attest(
    chain_path: &Path,
    manifest_path: &Path,
    index: usize,
    format: Format,
) -> Result<(), CliError> {
    let chain = crate::chain::load_chain(chain_path, manifest_path)?;
    let record = chain.attest_report(index).map_err(|_| {
        CliError::Usage(format!(
            "index {index} out of range (chain has {} blocks)",
            chain.len()
        ))
    })?;
    match format {
        Format::Json => println!("{}", serde_json::to_string(&record).unwrap()),
        _ => println!(
            "index={} mode={} subject={} issuer={} self_signed={} fingerprint={} signature_valid={} declared_difficulty={} achieved_difficulty={}",
            record.index,
            record.mode,
            record.subject,
            record.issuer,
            record.self_signed,
            record.certificate_fingerprint,
            record.signature_valid,
            record.declared_difficulty,
            record.achieved_difficulty,
        ),
    }
    Ok(())
}

fn cmd_simulate(
    kind: SimulateCommand,
    seed: &Option<String>,
    format: Format,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let seed = parse_seed_u64(seed)?.unwrap_or(0);
    let report = match kind {
        SimulateCommand::PowAnalytic {
            rates,
            difficulty,
            blocks,
        } => run_pow_race_analytic(&rate_nodes(&rates), difficulty, blocks, seed)
            .map_err(|e| CliError::Usage(e.to_string()))?,
        SimulateCommand::PowReal {
            rates,
            difficulty,
            blocks,
            cert_lottery,
        } => {
            let lottery = if cert_lottery {
                LotteryKind::Certificate
            } else {
                LotteryKind::Nonce
            };
            run_pow_race_real(&rate_nodes(&rates), difficulty, blocks, seed, lottery)
                .map_err(|e| CliError::Usage(e.to_string()))?
        }
        SimulateCommand::Schedule {
            round_robin,
            single,
            random_leader,
            t_election_min,
            t_election_max,
            t_network,
            blocks,
        } => {
            let report = match (round_robin, single, random_leader) {
                (Some(n), false, None) => run_schedule(
                    &mut RoundRobin::new(n),
                    blocks,
                    &rate_nodes(&vec![1.0; n]),
                    seed,
                ),
                (None, true, None) => {
                    run_schedule(&mut SingleNode, blocks, &rate_nodes(&[1.0]), seed)
                }
                (None, false, Some(n)) => {
                    if !(t_election_min >= 0.0
                        && t_election_min < t_election_max
                        && t_network > 0.0)
                    {
                        return Err(CliError::Usage(
                            "election window must be nonempty and nonnegative, network mean positive"
                                .into(),
                        ));
                    }
                    let mut scheduler = RandomLeader::with_timing(
                        n,
                        (t_election_min, t_election_max),
                        t_network,
                        seed,
                    );
                    run_schedule(&mut scheduler, blocks, &rate_nodes(&vec![1.0; n]), seed)
                }
                _ => return Err(CliError::Usage(
                    "choose exactly one schedule: --round-robin N, --single or --random-leader N"
                        .into(),
                )),
            };
            report.map_err(|e| CliError::Usage(e.to_string()))?
        }
    };

    let rendered = render_report(&report, format);
    match out {
        Some(path) => fs::write(path, rendered).map_err(|e| write_err(path, e))?,
        None => print!("{rendered}"),
    }
    Ok(())
}

fn rate_nodes(rates: &[f64]) -> Vec<NodeProfile> {
    rates
        .iter()
        .enumerate()
        .map(|(i, &r)| NodeProfile::new(format!("node-{i}"), r))
        .collect()
}

fn render_report(report: &SimReport, format: Format) -> String {
    match format {
        Format::Json => format!("{}\n", report.to_json()),
        Format::Csv => report.to_csv(),
        Format::Text => {
            let mut text = format!(
                "mode={:?} blocks={}{}\n",
                report.mode,
                report.total_blocks,
                report
                    .ks_statistic
                    .map(|ks| format!(" ks={ks:.5}"))
                    .unwrap_or_default()
            )
            .to_lowercase();
            for (i, id) in report.node_ids.iter().enumerate() {
                text.push_str(&format!(
                    "{id} wins={} share={:.4}\n",
                    report.win_counts[i], report.win_shares[i]
                ));
            }
            text
        }
    }
}

fn base64_encode(bytes: &[u8]) -> String {
    use base64::Engine;
    base64::engine::general_purpose::STANDARD.encode(bytes)
}
