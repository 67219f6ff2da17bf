//! The `storage-audit` command line.
//!
//! Artifacts are the library's wire encodings written verbatim, plus a
//! small JSON sidecar describing the encoded file. Exit status is 0 on
//! success, 1 when `verify` rejects a well-formed proof and 2 for any
//! malformed input or configuration.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ark_ff::UniformRand;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{Scalar, WireFormat};
use crate::attack::{attack_private_transcripts, LedgerView};
use crate::challenge::{draw_challenge, Challenge, SeededBeacon, DEFAULT_K};
use crate::contract::{ledger_from_jsonl, ledger_to_jsonl, replay_ledger, ProofMode};
use crate::costs::{cost_table, FeeParams};
use crate::encoding::{decode_file, encode_file, EncodingParams, FileEncoding, DEFAULT_BLOCK_BYTES};
use crate::error::Error;
use crate::keys::{generate_tags, keygen, keys_from_secret, PublicKey, SecretKey, TagSet};
use crate::prover::{combine_chunks, prove_private, AuditProof};
use crate::simulate::{detection_probability, detection_probability_exact, Corruption, Deployment, RunConfig};
use crate::verifier::{verify_private, VerificationContext};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: Error },
    #[error("{path}: {reason}")]
    Json { path: PathBuf, reason: String },
    #[error(transparent)]
    Lib(#[from] Error),
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "storage-audit", version, about = "Privacy-preserving storage audits on a simulated contract")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a key pair supporting chunks of `s` blocks.
    Keygen {
        #[arg(long)]
        s: usize,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Encode a file and write its tags and metadata.
    Tag {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        sk: PathBuf,
        #[arg(long)]
        pk: PathBuf,
        /// Expected chunk width; must match the key.
        #[arg(long)]
        s: Option<usize>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Draw the challenge for one round from a seeded beacon.
    Challenge {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        round: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Answer a challenge with a 288-byte private proof.
    Prove {
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        tags: PathBuf,
        #[arg(long)]
        meta: PathBuf,
        #[arg(long)]
        challenge: PathBuf,
        #[arg(long, default_value_t = DEFAULT_K)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check a proof; exits 0 on pass, 1 on fail, 2 on malformed input.
    Verify {
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        meta: PathBuf,
        #[arg(long)]
        challenge: PathBuf,
        #[arg(long)]
        proof: PathBuf,
        #[arg(long, default_value_t = DEFAULT_K)]
        k: usize,
    },
    /// Run a full contract lifecycle and write its ledger.
    Simulate(SimulateArgs),
    /// Try to recover stored data from a ledger's audit trail.
    AttackDemo {
        #[arg(long)]
        ledger: PathBuf,
        /// Original file, to judge the recovery.
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_BLOCK_BYTES)]
        block_bytes: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the fiat cost of auditing.
    EstimateCost(CostArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Private,
    InsecureNonPrivate,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub num: Option<u64>,
    #[arg(long)]
    pub audit_interval: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub owner_deposit: Option<u64>,
    #[arg(long)]
    pub provider_deposit: Option<u64>,
    /// Fraction of chunks the provider tampers with.
    #[arg(long)]
    pub corrupt: Option<f64>,
    #[arg(long)]
    pub corrupt_from: Option<u64>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub seed_reuse: Option<u64>,
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long)]
    pub file_size: Option<usize>,
    #[arg(long)]
    pub ledger: Option<PathBuf>,
    /// Also write the stored data, useful when it was generated.
    #[arg(long)]
    pub data_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CostArgs {
    #[arg(long, default_value_t = 589_000.0)]
    pub gas_per_audit: f64,
    #[arg(long, default_value_t = 5.0)]
    pub gas_price_gwei: f64,
    #[arg(long, default_value_t = 143.0)]
    pub token_price: f64,
    #[arg(long, default_value_t = 0.0)]
    pub onetime_storage_gas: f64,
    #[arg(long, default_value_t = 0.0)]
    pub beacon_cost: f64,
    #[arg(long, default_value_t = 365.0)]
    pub audits_per_year: f64,
    #[arg(long, default_value_t = 1.0)]
    pub redundancy: f64,
    #[arg(long, default_value_t = 1.0)]
    pub years: f64,
}

/// Sidecar describing how a file was encoded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileMeta {
    pub name: String,
    pub s: usize,
    pub block_bytes: usize,
    pub d: u64,
    pub n: u64,
    pub original_length: u64,
}

impl FileMeta {
    pub fn of(enc: &FileEncoding) -> Self {
        Self {
            name: hex::encode(enc.name.to_wire()),
            s: enc.s(),
            block_bytes: enc.params.block_bytes,
            d: enc.d() as u64,
            n: enc.n,
            original_length: enc.original_length,
        }
    }

    pub fn name(&self) -> Result<Scalar, Error> {
        let bytes = hex::decode(&self.name).map_err(|_| Error::InvalidEncoding { offset: 0, reason: "name is not hex" })?;
        Scalar::read_wire(&bytes)
    }
}

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|source| CliError::Io { path: path.into(), source })
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> CliResult<()> {
    fs::write(path, bytes).map_err(|source| CliError::Io { path: path.into(), source })
}

fn parse<T>(path: &Path, f: impl FnOnce(&[u8]) -> Result<T, Error>) -> CliResult<T> {
    let bytes = read(path)?;
    f(&bytes).map_err(|source| CliError::Parse { path: path.into(), source })
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let bytes = read(path)?;
    serde_json::from_slice(&bytes).map_err(|e| CliError::Json { path: path.into(), reason: e.to_string() })
}

fn rng_for(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    }
}

fn load_context(pk: &Path, meta: &Path, k: usize) -> CliResult<(VerificationContext, FileMeta)> {
    let pk = parse(pk, PublicKey::from_bytes)?;
    let meta_file: FileMeta = read_json(meta)?;
    let name = meta_file.name().map_err(|source| CliError::Parse { path: meta.into(), source })?;
    if meta_file.s != pk.s {
        return Err(Error::ParamMismatch(format!("metadata says s = {}, key has s = {}", meta_file.s, pk.s)).into());
    }
    Ok((VerificationContext { pk, name, d: meta_file.d, k }, meta_file))
}

fn cmd_keygen(s: usize, out_dir: &Path, seed: Option<u64>) -> CliResult<()> {
    let (sk, pk) = keygen(s, &mut rng_for(seed))?;
    write(&out_dir.join("sk.bin"), sk.to_bytes())?;
    write(&out_dir.join("pk.bin"), pk.to_bytes())?;
    println!("wrote {} and {}", out_dir.join("sk.bin").display(), out_dir.join("pk.bin").display());
    Ok(())
}

fn cmd_tag(file: &Path, sk: &Path, pk: &Path, s: Option<usize>, out_dir: &Path, seed: Option<u64>) -> CliResult<()> {
    let pk = parse(pk, PublicKey::from_bytes)?;
    if let Some(s) = s {
        if s != pk.s {
            return Err(Error::ParamMismatch(format!("requested s = {s}, key supports s = {}", pk.s)).into());
        }
    }
    let sk = parse(sk, SecretKey::from_bytes)?;
    if keys_from_secret(sk.clone(), pk.s).1 != pk {
        return Err(Error::ParamMismatch("secret key does not match public key".into()).into());
    }
    let data = read(file)?;
    let enc = encode_file(&data, EncodingParams::new(pk.s)?, Scalar::rand(&mut rng_for(seed)))?;
    let tags = generate_tags(&sk, &pk, &enc)?;
    write(&out_dir.join("tags.bin"), tags.to_bytes())?;
    let meta = serde_json::to_string_pretty(&FileMeta::of(&enc)).expect("metadata serializes");
    write(&out_dir.join("meta.json"), meta + "\n")?;
    println!("tagged {} chunks", enc.d());
    Ok(())
}

fn cmd_challenge(seed: u64, round: u64, out: &Path) -> CliResult<()> {
    let ch = draw_challenge(&mut SeededBeacon::from_u64(seed), round)?;
    write(out, ch.to_bytes())
}

#[allow(clippy::too_many_arguments)]
fn cmd_prove(
    pk: &Path,
    file: &Path,
    tags: &Path,
    meta: &Path,
    challenge: &Path,
    k: usize,
    out: &Path,
    seed: Option<u64>,
) -> CliResult<()> {
    let (ctx, meta_file) = load_context(pk, meta, k)?;
    let tags = parse(tags, TagSet::from_bytes)?;
    let ch = parse(challenge, Challenge::from_bytes)?;
    let params = EncodingParams::with_block_bytes(meta_file.s, meta_file.block_bytes)?;
    let enc = encode_file(&read(file)?, params, ctx.name)?;
    let cs = ctx.expand(&ch);
    let prf = prove_private(&ctx.pk, &enc, &tags, &ch, &cs, &mut rng_for(seed))?;
    write(out, prf.to_wire())
}

/// Returns whether the proof passed.
fn cmd_verify(pk: &Path, meta: &Path, challenge: &Path, proof: &Path, k: usize) -> CliResult<bool> {
    let (ctx, _) = load_context(pk, meta, k)?;
    let ch = parse(challenge, Challenge::from_bytes)?;
    let prf = parse(proof, AuditProof::read_wire)?;
    Ok(verify_private(&ctx, &ch, &ctx.expand(&ch), &prf))
}

pub fn build_run_config(args: &SimulateArgs) -> CliResult<RunConfig> {
    let mut cfg: RunConfig = match &args.config {
        Some(path) => read_json(path)?,
        None => RunConfig::default(),
    };
    macro_rules! set {
        ($($field:ident <- $arg:ident),*) => { $(if let Some(v) = args.$arg.clone() { cfg.$field = v; })* };
    }
    set!(s <- s, k <- k, num <- num, audit_interval <- audit_interval, seed <- seed,
         owner_deposit <- owner_deposit, provider_deposit <- provider_deposit, file_size <- file_size);
    if let Some(f) = args.corrupt {
        cfg.corruption = Some(Corruption { fraction: f, from_audit: args.corrupt_from.unwrap_or(0) });
    } else if let (Some(from), Some(c)) = (args.corrupt_from, cfg.corruption.as_mut()) {
        c.from_audit = from;
    }
    if let Some(m) = args.mode {
        cfg.mode = match m {
            ModeArg::Private => ProofMode::Private,
            ModeArg::InsecureNonPrivate => ProofMode::InsecureNonPrivate,
        };
    }
    if args.seed_reuse.is_some() {
        cfg.seed_reuse_period = args.seed_reuse;
    }
    if args.file.is_some() {
        cfg.file = args.file.clone();
    }
    if args.ledger.is_some() {
        cfg.ledger = args.ledger.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_simulate(args: &SimulateArgs) -> CliResult<()> {
    let cfg = build_run_config(args)?;
    let data = cfg.file.as_deref().map(read).transpose()?;
    let deployment = Deployment::prepare(&cfg, data)?;
    if let Some(path) = &args.data_out {
        write(path, &deployment.data)?;
    }
    let out = deployment.run_contract(&cfg, cfg.seed)?;
    if let Some(path) = &cfg.ledger {
        write(path, ledger_to_jsonl(&out.ledger))?;
    }
    let d = deployment.enc.d() as u64;
    println!("chunks: {d}  s: {}  k: {}  audits: {}  mode: {:?}", cfg.s, cfg.k, cfg.num, cfg.mode);
    if let Some(c) = cfg.corruption {
        let bad = deployment.corrupted_chunks.len() as u64;
        println!(
            "corrupted chunks: {bad} ({:.2}%), per-audit detection {:.4} (exact {:.4})",
            c.fraction * 100.0,
            detection_probability(c.fraction, cfg.k as u64),
            detection_probability_exact(bad, d, cfg.k as u64)
        );
    }
    println!("passed: {}  failed: {}", out.passes, out.fails);
    let acc = out.accounts;
    println!("paid to owner: {}  paid to provider: {}", acc.paid_to_owner, acc.paid_to_provider);
    Ok(())
}

fn cmd_attack_demo(ledger: &Path, file: Option<&Path>, block_bytes: usize, out: Option<&Path>) -> CliResult<()> {
    let text = String::from_utf8_lossy(&read(ledger)?).into_owned();
    let parsed = ledger_from_jsonl(&text).and_then(|e| LedgerView::from_entries(&e).map(|v| (e, v)));
    let (entries, view) = parsed.map_err(|source| CliError::Parse { path: ledger.into(), source })?;
    let (ctx, s) = (&view.ctx, view.ctx.pk.s);
    let usable = view.usable_transcripts();
    println!(
        "mode: {:?}  answered audits: {}  seed groups: {}  with >= {s} points: {}",
        view.mode,
        view.observations.len(),
        view.transcripts().len(),
        usable.len()
    );

    let truth = file.map(read).transpose()?;
    let params = EncodingParams::with_block_bytes(s, block_bytes)?;
    if let Some(data) = &truth {
        let enc = encode_file(data, params, ctx.name)?;
        for ts in &usable {
            let report = attack_private_transcripts(ts, &combine_chunks(&enc, &ts.challenge_set(ctx.d, ctx.k))?);
            println!("  combined polynomial: {}/{} coefficients wrong", report.mismatched, report.total);
        }
    }

    match view.recover_chunks() {
        Ok(chunks) => {
            let n = ctx.d * s as u64;
            let capacity = n * block_bytes as u64;
            let len = truth.as_ref().map_or(capacity, |t| (t.len() as u64).min(capacity));
            let rebuilt = FileEncoding::from_chunks(ctx.name, params, n, len, &chunks)?;
            match decode_file(&rebuilt, params) {
                Ok(bytes) => {
                    if let Some(data) = &truth {
                        println!("recovered file matches original: {}", &bytes == data);
                    }
                    println!("recovered {} bytes", bytes.len());
                    if let Some(path) = out {
                        write(path, &bytes)?;
                    }
                }
                Err(e) => println!("recovered blocks are not file data: {e}"),
            }
        }
        Err(e) => println!("no recovery: {e}"),
    }
    for r in replay_ledger(&entries)? {
        if r.recorded != r.recomputed {
            println!("audit {} verdict does not replay", r.audit);
        }
    }
    Ok(())
}

fn cmd_estimate_cost(a: &CostArgs) -> CliResult<()> {
    let fp = FeeParams {
        gas_per_audit: a.gas_per_audit,
        gas_price_gwei: a.gas_price_gwei,
        token_price: a.token_price,
        onetime_storage_gas: a.onetime_storage_gas,
        beacon_cost_per_round: a.beacon_cost,
        audits_per_year: a.audits_per_year,
        redundancy_factor: a.redundancy,
        duration_years: a.years,
    };
    if !fp.is_valid() {
        return Err(Error::InvalidParams("fee parameters must be finite and non-negative".into()).into());
    }
    print!("{}", cost_table(&fp));
    Ok(())
}

/// Runs a parsed command and maps the outcome to an exit status.
pub fn run(cli: Cli) -> ExitCode {
    let result = match &cli.command {
        Command::Keygen { s, out_dir, seed } => cmd_keygen(*s, out_dir, *seed),
        Command::Tag { file, sk, pk, s, out_dir, seed } => cmd_tag(file, sk, pk, *s, out_dir, *seed),
        Command::Challenge { seed, round, out } => cmd_challenge(*seed, *round, out),
        Command::Prove { pk, file, tags, meta, challenge, k, out, seed } => {
            cmd_prove(pk, file, tags, meta, challenge, *k, out, *seed)
        }
        Command::Verify { pk, meta, challenge, proof, k } => match cmd_verify(pk, meta, challenge, proof, *k) {
            Ok(true) => {
                println!("pass");
                Ok(())
            }
            Ok(false) => {
                println!("fail");
                return ExitCode::from(1);
            }
            Err(e) => Err(e),
        },
        Command::Simulate(args) => cmd_simulate(args),
        Command::AttackDemo { ledger, file, block_bytes, out } => {
            cmd_attack_demo(ledger, file.as_deref(), *block_bytes, out.as_deref())
        }
        Command::EstimateCost(args) => cmd_estimate_cost(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Parses `args` (program name first) and runs. Usage errors exit 2.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_subcommand_parses() {
        for args in [
            vec!["x", "keygen", "--s", "4"],
            vec!["x", "tag", "--file", "f", "--sk", "a", "--pk", "b"],
            vec!["x", "challenge", "--out", "c"],
            vec!["x", "prove", "--pk", "a", "--file", "f", "--tags", "t", "--meta", "m", "--challenge", "c", "--out", "o"],
            vec!["x", "verify", "--pk", "a", "--meta", "m", "--challenge", "c", "--proof", "p"],
            vec!["x", "simulate", "--num", "3", "--mode", "insecure-non-private"],
            vec!["x", "attack-demo", "--ledger", "l"],
            vec!["x", "estimate-cost", "--redundancy", "10"],
        ] {
            assert!(Cli::try_parse_from(&args).is_ok(), "{args:?}");
        }
    }

    #[test]
    fn flags_override_config() {
        let cli = Cli::try_parse_from(["x", "simulate", "--s", "3", "--corrupt", "0.5", "--seed-reuse", "3"]).unwrap();
        let Command::Simulate(args) = cli.command else { panic!() };
        let cfg = build_run_config(&args).unwrap();
        assert_eq!(cfg.s, 3);
        assert_eq!(cfg.corruption, Some(Corruption { fraction: 0.5, from_audit: 0 }));
        assert_eq!(cfg.seed_reuse_period, Some(3));
        assert_eq!(cfg.k, DEFAULT_K);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let cli = Cli::try_parse_from(["x", "simulate", "--num", "0"]).unwrap();
        let Command::Simulate(args) = cli.command else { panic!() };
        assert!(build_run_config(&args).is_err());
    }

    #[test]
    fn meta_round_trip() {
        let enc = encode_file(b"hello", EncodingParams::new(2).unwrap(), Scalar::from(7u64)).unwrap();
        let meta = FileMeta::of(&enc);
        let back: FileMeta = serde_json::from_str(&serde_json::to_string(&meta).unwrap()).unwrap();
        assert_eq!(back, meta);
        assert_eq!(back.name().unwrap(), enc.name);
    }
}
