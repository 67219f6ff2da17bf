//! Beacon randomness and its expansion into challenged chunks.
//!
//! Each round consumes one 48-byte beacon word split as
//! `c1_seed (16) ‖ c2_seed (16) ‖ r_bytes (16)`. `c1_seed` keys a
//! Fisher–Yates shuffle of the chunk indices, `c2_seed` keys the
//! per-position coefficients, and `r_bytes` is hashed to the evaluation
//! point `r`.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256, Sha512};

use crate::algebra::{hash_to_scalar, Scalar};
use crate::error::{Error, Result};

pub const BEACON_WORD_BYTES: usize = 48;
pub type BeaconWord = [u8; BEACON_WORD_BYTES];

/// Default number of challenged chunks per audit.
pub const DEFAULT_K: usize = 300;

/// Source of per-round public randomness.
pub trait RandomnessBeacon {
    fn next(&mut self, round: u64) -> Result<BeaconWord>;
}

impl<B: RandomnessBeacon + ?Sized> RandomnessBeacon for &mut B {
    fn next(&mut self, round: u64) -> Result<BeaconWord> {
        (**self).next(round)
    }
}

impl<B: RandomnessBeacon + ?Sized> RandomnessBeacon for Box<B> {
    fn next(&mut self, round: u64) -> Result<BeaconWord> {
        (**self).next(round)
    }
}

/// Deterministic beacon: word(round) = SHA-512("beacon" ‖ seed ‖ round)[..48].
#[derive(Debug, Clone)]
pub struct SeededBeacon {
    seed: [u8; 32],
}

impl SeededBeacon {
    pub fn new(seed: [u8; 32]) -> Self {
        Self { seed }
    }

    pub fn from_u64(seed: u64) -> Self {
        let mut s = [0u8; 32];
        s[24..].copy_from_slice(&seed.to_be_bytes());
        Self::new(s)
    }
}

impl RandomnessBeacon for SeededBeacon {
    fn next(&mut self, round: u64) -> Result<BeaconWord> {
        let digest = Sha512::new()
            .chain_update(b"beacon")
            .chain_update(self.seed)
            .chain_update(round.to_be_bytes())
            .finalize();
        let mut word = [0u8; BEACON_WORD_BYTES];
        word.copy_from_slice(&digest[..BEACON_WORD_BYTES]);
        Ok(word)
    }
}

/// Replays a fixed list of words; round `t` yields `words[t]`.
#[derive(Debug, Clone)]
pub struct ScriptedBeacon {
    pub words: Vec<BeaconWord>,
}

impl RandomnessBeacon for ScriptedBeacon {
    fn next(&mut self, round: u64) -> Result<BeaconWord> {
        self.words.get(round as usize).copied().ok_or(Error::BeaconUnavailable(round))
    }
}

/// A compromised beacon that repeats `c1_seed ‖ c2_seed` for `period`
/// consecutive draws while `r` stays fresh, as an adversary controlling
/// a victim's view of the chain could arrange.
#[derive(Debug, Clone)]
pub struct SeedReuseBeacon<B> {
    pub inner: B,
    pub period: u64,
    draws: u64,
    anchor: u64,
}

impl<B> SeedReuseBeacon<B> {
    pub fn new(inner: B, period: u64) -> Self {
        Self { inner, period: period.max(1), draws: 0, anchor: 0 }
    }
}

impl<B: RandomnessBeacon> RandomnessBeacon for SeedReuseBeacon<B> {
    fn next(&mut self, round: u64) -> Result<BeaconWord> {
        if self.draws.is_multiple_of(self.period.max(1)) {
            self.anchor = round;
        }
        self.draws += 1;
        let seeds = self.inner.next(self.anchor)?;
        let mut word = self.inner.next(round)?;
        word[..32].copy_from_slice(&seeds[..32]);
        Ok(word)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Challenge {
    pub round: u64,
    pub c1_seed: [u8; 16],
    pub c2_seed: [u8; 16],
    pub r_bytes: [u8; 16],
    /// Evaluation point derived from `r_bytes`.
    pub r: Scalar,
}

impl Challenge {
    pub fn from_word(round: u64, word: &BeaconWord) -> Self {
        let mut c1_seed = [0u8; 16];
        let mut c2_seed = [0u8; 16];
        let mut r_bytes = [0u8; 16];
        c1_seed.copy_from_slice(&word[..16]);
        c2_seed.copy_from_slice(&word[16..32]);
        r_bytes.copy_from_slice(&word[32..]);
        let r = hash_to_scalar(b"chal-r", &r_bytes);
        Self { round, c1_seed, c2_seed, r_bytes, r }
    }

    pub fn to_word(&self) -> BeaconWord {
        let mut word = [0u8; BEACON_WORD_BYTES];
        word[..16].copy_from_slice(&self.c1_seed);
        word[16..32].copy_from_slice(&self.c2_seed);
        word[32..].copy_from_slice(&self.r_bytes);
        word
    }

    /// `round (8 BE) ‖ word (48)`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.round.to_be_bytes().to_vec();
        out.extend_from_slice(&self.to_word());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != 8 + BEACON_WORD_BYTES {
            return Err(Error::WrongLength { expected: 8 + BEACON_WORD_BYTES, got: bytes.len() });
        }
        let round = u64::from_be_bytes(bytes[..8].try_into().unwrap());
        Ok(Self::from_word(round, bytes[8..].try_into().unwrap()))
    }
}

pub fn draw_challenge<B: RandomnessBeacon + ?Sized>(beacon: &mut B, round: u64) -> Result<Challenge> {
    let word = beacon.next(round)?;
    Ok(Challenge::from_word(round, &word))
}

/// The expanded challenge: positions `j` pair chunk `indices[j]` with `coefficients[j]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChallengeSet {
    pub indices: Vec<u64>,
    pub coefficients: Vec<Scalar>,
}

impl ChallengeSet {
    pub fn k(&self) -> usize {
        self.indices.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &Scalar)> + '_ {
        self.indices.iter().copied().zip(&self.coefficients)
    }
}

pub(crate) fn shuffle_rng(c1_seed: &[u8; 16]) -> ChaCha20Rng {
    let key: [u8; 32] = Sha256::new().chain_update(b"chal-prp").chain_update(c1_seed).finalize().into();
    ChaCha20Rng::from_seed(key)
}

pub(crate) fn coefficient(c2_seed: &[u8; 16], position: u64) -> Scalar {
    let mut msg = c2_seed.to_vec();
    msg.extend_from_slice(&position.to_be_bytes());
    hash_to_scalar(b"chal-coef", &msg)
}

/// First `min(k, d)` entries of a `c1_seed`-keyed forward Fisher–Yates
/// shuffle of `0..d`, with `c2_seed`-derived coefficients. Only the touched
/// positions are materialized, so cost is O(k) regardless of `d`.
pub fn expand_challenge(ch: &Challenge, d: u64, k: usize) -> ChallengeSet {
    let m = (k as u64).min(d);
    let mut rng = shuffle_rng(&ch.c1_seed);
    let mut moved: HashMap<u64, u64> = HashMap::with_capacity(2 * m as usize);
    let mut indices = Vec::with_capacity(m as usize);
    for j in 0..m {
        let t = j + rng.gen_range(0..d - j);
        let at_j = moved.get(&j).copied().unwrap_or(j);
        let at_t = moved.get(&t).copied().unwrap_or(t);
        moved.insert(t, at_j);
        indices.push(at_t);
    }
    let coefficients = (0..m).map(|j| coefficient(&ch.c2_seed, j)).collect();
    ChallengeSet { indices, coefficients }
}
