//! End-to-end contract runs against an in-process provider.

use std::path::PathBuf;

use ark_ff::UniformRand;
use rand::seq::index::sample;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{Scalar, Suite, WireFormat};
use crate::challenge::{expand_challenge, Challenge, RandomnessBeacon, SeedReuseBeacon, SeededBeacon, DEFAULT_K};
use crate::contract::{Accounts, Agreements, Contract, LedgerEntry, Metadata, ProofMode, Verdict};
use crate::encoding::{encode_file, EncodingParams, FileEncoding};
use crate::error::{Error, Result};
use crate::keys::{generate_tags, keygen, PublicKey, TagSet};
use crate::prover::{prove_nonprivate, prove_private};

/// Tampering applied by a dishonest provider.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Corruption {
    /// Fraction of chunks overwritten with fresh random blocks.
    pub fraction: f64,
    /// First audit (0-based) answered from the tampered copy.
    #[serde(default)]
    pub from_audit: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub suite: u8,
    pub s: usize,
    pub k: usize,
    pub num: u64,
    pub audit_interval: u64,
    /// Drives keys, file contents, blinding and the beacon.
    pub seed: u64,
    pub owner_deposit: u64,
    pub provider_deposit: u64,
    pub storage_fee: u64,
    pub corruption: Option<Corruption>,
    pub mode: ProofMode,
    /// Make the beacon repeat its index and coefficient seeds for this many audits.
    pub seed_reuse_period: Option<u64>,
    /// Data to store; random bytes of `file_size` when absent.
    pub file: Option<PathBuf>,
    pub file_size: usize,
    pub ledger: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            suite: 0x01,
            s: 10,
            k: DEFAULT_K,
            num: 10,
            audit_interval: 1,
            seed: 0,
            owner_deposit: 1000,
            provider_deposit: 1000,
            storage_fee: 0,
            corruption: None,
            mode: ProofMode::Private,
            seed_reuse_period: None,
            file: None,
            file_size: 64 * 1024,
            ledger: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        Suite::from_id(self.suite)?;
        EncodingParams::new(self.s)?;
        self.agreements().validate()?;
        if self.owner_deposit == 0 || self.provider_deposit == 0 {
            return Err(Error::InsufficientDeposit);
        }
        if self.file.is_none() && self.file_size == 0 {
            return Err(Error::EmptyFile);
        }
        if let Some(c) = self.corruption {
            if !(0.0..=1.0).contains(&c.fraction) {
                return Err(Error::InvalidParams(format!("corruption fraction {} is outside [0, 1]", c.fraction)));
            }
        }
        if self.seed_reuse_period == Some(0) {
            return Err(Error::InvalidParams("seed reuse period must be positive".into()));
        }
        Ok(())
    }

    pub fn agreements(&self) -> Agreements {
        Agreements {
            duration: self.num.saturating_mul(self.audit_interval),
            num: self.num,
            k: self.k,
            audit_interval: self.audit_interval,
            storage_fee: self.storage_fee,
            mode: self.mode,
        }
    }
}

/// Keys, tags and data for one stored file, plus the provider's tampered copy.
#[derive(Debug, Clone)]
pub struct Deployment {
    pub pk: PublicKey,
    pub enc: FileEncoding,
    pub tags: TagSet,
    pub data: Vec<u8>,
    pub tampered: Option<FileEncoding>,
    pub corrupted_chunks: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulationOutcome {
    pub ledger: Vec<LedgerEntry>,
    pub passes: u64,
    pub fails: u64,
    pub accounts: Accounts,
}

fn corrupt(enc: &FileEncoding, fraction: f64, rng: &mut ChaCha20Rng) -> (FileEncoding, Vec<u64>) {
    let d = enc.d();
    let count = ((fraction * d as f64).round() as usize).min(d);
    let mut chosen: Vec<u64> = sample(rng, d, count).into_iter().map(|i| i as u64).collect();
    chosen.sort_unstable();
    let mut tampered = enc.clone();
    for &i in &chosen {
        for b in tampered.chunk_mut(i as usize) {
            *b = Scalar::rand(rng);
        }
    }
    (tampered, chosen)
}

impl Deployment {
    /// Generates keys and tags from `cfg.seed`. Without `data` the file is
    /// `cfg.file_size` random bytes; callers that honour `cfg.file` load it
    /// and pass it in.
    pub fn prepare(cfg: &RunConfig, data: Option<Vec<u8>>) -> Result<Self> {
        cfg.validate()?;
        let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
        let data = match data {
            Some(d) => d,
            None => {
                let mut d = vec![0u8; cfg.file_size];
                rng.fill_bytes(&mut d);
                d
            }
        };
        let (sk, pk) = keygen(cfg.s, &mut rng)?;
        let enc = encode_file(&data, EncodingParams::new(cfg.s)?, Scalar::rand(&mut rng))?;
        let tags = generate_tags(&sk, &pk, &enc)?;
        let (tampered, corrupted_chunks) = match cfg.corruption {
            Some(c) => {
                let (t, chosen) = corrupt(&enc, c.fraction, &mut rng);
                (Some(t), chosen)
            }
            None => (None, Vec::new()),
        };
        Ok(Self { pk, enc, tags, data, tampered, corrupted_chunks })
    }

    /// Runs one full contract lifecycle with the beacon seeded by `beacon_seed`.
    pub fn run_contract(&self, cfg: &RunConfig, beacon_seed: u64) -> Result<SimulationOutcome> {
        let mut contract = Contract::new();
        let d = self.enc.d() as u64;
        contract.negotiate(cfg.agreements(), self.pk.clone(), Metadata { name: self.enc.name, d })?;
        contract.acknowledge()?;
        contract.freeze_deposits(cfg.owner_deposit, cfg.provider_deposit)?;

        let seeded = SeededBeacon::from_u64(beacon_seed);
        let mut beacon: Box<dyn RandomnessBeacon> = match cfg.seed_reuse_period {
            Some(period) => Box::new(SeedReuseBeacon::new(seeded, period)),
            None => Box::new(seeded),
        };
        let mut blinding = ChaCha20Rng::seed_from_u64(beacon_seed ^ 0x5eed_b11d);
        let from_audit = cfg.corruption.map_or(u64::MAX, |c| c.from_audit);
        let mut audit = 0u64;
        let provider = |ch: &Challenge| {
            let enc = match &self.tampered {
                Some(t) if audit >= from_audit => t,
                _ => &self.enc,
            };
            audit += 1;
            let cs = expand_challenge(ch, d, cfg.k);
            let proof = match cfg.mode {
                ProofMode::Private => prove_private(&self.pk, enc, &self.tags, ch, &cs, &mut blinding).map(|p| p.to_wire()),
                ProofMode::InsecureNonPrivate => prove_nonprivate(&self.pk, enc, &self.tags, ch, &cs).map(|p| p.to_wire()),
            };
            Some(proof.expect("provider inputs are consistent"))
        };
        contract.run_to_close(&mut beacon, provider)?;

        let passes = contract.audit_records().filter(|r| r.verdict == Verdict::Pass).count() as u64;
        let fails = contract.audit_records().count() as u64 - passes;
        Ok(SimulationOutcome { ledger: contract.ledger().to_vec(), passes, fails, accounts: contract.accounts() })
    }
}

/// Prepares a deployment from `cfg` and runs one contract with the beacon seeded by `cfg.seed`.
pub fn run_simulation(cfg: &RunConfig, data: Option<Vec<u8>>) -> Result<SimulationOutcome> {
    Deployment::prepare(cfg, data)?.run_contract(cfg, cfg.seed)
}

/// `1 − (1 − f)^k`: chance that `k` uniform picks hit at least one bad chunk.
pub fn detection_probability(f: f64, k: u64) -> f64 {
    1.0 - (1.0 - f).powf(k as f64)
}

/// Exact chance that `k` distinct chunks out of `d` include one of `corrupted`.
pub fn detection_probability_exact(corrupted: u64, d: u64, k: u64) -> f64 {
    if corrupted == 0 {
        return 0.0;
    }
    let k = k.min(d);
    if k + corrupted > d {
        return 1.0;
    }
    let miss: f64 = (0..k).map(|i| (d - corrupted - i) as f64 / (d - i) as f64).product();
    1.0 - miss
}
