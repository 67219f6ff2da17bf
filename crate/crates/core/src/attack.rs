//! What an observer learns from unblinded audit trails.
//!
//! When the beacon repeats `c1_seed ‖ c2_seed`, every round challenges the
//! same chunks with the same coefficients, so each unblinded proof leaks one
//! evaluation `y_j = P_k(r_j)` of a fixed polynomial. `s` such points pin
//! `P_k` down by interpolation; `u` independent `P_k` over the same `u`
//! chunks pin the chunks down by linear algebra. Against blinded proofs the
//! same pipeline returns garbage.

use std::collections::BTreeMap;

use crate::algebra::{Scalar, WireFormat};
use crate::challenge::{expand_challenge, Challenge, ChallengeSet};
use crate::contract::{ledger_context, LedgerEntry, ProofMode};
use crate::error::{Error, Result};
use crate::poly;
use crate::prover::{AuditProof, CombinedPolynomial, NonPrivateProof};
use crate::verifier::VerificationContext;

/// Evaluations `(r_j, y_j)` collected from rounds that shared one seed pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptSet {
    pub c1_seed: [u8; 16],
    pub c2_seed: [u8; 16],
    pub points: Vec<(Scalar, Scalar)>,
}

impl TranscriptSet {
    /// The challenge set these rounds shared; it does not depend on `r`.
    pub fn challenge_set(&self, d: u64, k: usize) -> ChallengeSet {
        let ch = Challenge { round: 0, c1_seed: self.c1_seed, c2_seed: self.c2_seed, r_bytes: [0; 16], r: Scalar::from(0u64) };
        expand_challenge(&ch, d, k)
    }
}

/// Buckets `(challenge, y)` observations by seed pair, preserving first-seen order.
pub fn group_transcripts<'a>(observations: impl IntoIterator<Item = (&'a Challenge, Scalar)>) -> Vec<TranscriptSet> {
    type Seeds = ([u8; 16], [u8; 16]);
    let mut order: Vec<Seeds> = Vec::new();
    let mut groups: BTreeMap<Seeds, Vec<(Scalar, Scalar)>> = BTreeMap::new();
    for (ch, y) in observations {
        let key = (ch.c1_seed, ch.c2_seed);
        let entry = groups.entry(key).or_default();
        if entry.is_empty() {
            order.push(key);
        }
        entry.push((ch.r, y));
    }
    order
        .into_iter()
        .map(|key| TranscriptSet { c1_seed: key.0, c2_seed: key.1, points: groups.remove(&key).unwrap() })
        .collect()
}

/// Everything a chain observer can extract from a ledger.
#[derive(Debug, Clone)]
pub struct LedgerView {
    pub ctx: VerificationContext,
    pub mode: ProofMode,
    /// `(challenge, y)` per answered audit; `y` is `y′` for blinded proofs.
    pub observations: Vec<(Challenge, Scalar)>,
}

impl LedgerView {
    pub fn from_entries(entries: &[LedgerEntry]) -> Result<Self> {
        let (ctx, mode) = ledger_context(entries)?;
        let mut observations = Vec::new();
        for entry in entries {
            let LedgerEntry::Audited(r) = entry else { continue };
            if r.proof.is_empty() {
                continue;
            }
            let y = match mode {
                ProofMode::InsecureNonPrivate => NonPrivateProof::read_wire(&r.proof)?.y,
                ProofMode::Private => AuditProof::read_wire(&r.proof)?.y_prime,
            };
            observations.push((r.challenge()?, y));
        }
        Ok(Self { ctx, mode, observations })
    }

    pub fn transcripts(&self) -> Vec<TranscriptSet> {
        group_transcripts(self.observations.iter().map(|(c, y)| (c, *y)))
    }

    /// Transcript sets with enough points to interpolate.
    pub fn usable_transcripts(&self) -> Vec<TranscriptSet> {
        self.transcripts().into_iter().filter(|t| t.points.len() >= self.ctx.pk.s).collect()
    }

    /// Attempts to rebuild every chunk of the stored file.
    pub fn recover_chunks(&self) -> Result<Vec<Vec<Scalar>>> {
        recover_chunks(&self.usable_transcripts(), self.ctx.d, self.ctx.k, self.ctx.pk.s)
    }
}

/// Interpolates the first `s` points; all points must have distinct `r`.
pub fn interpolate_combined(ts: &TranscriptSet, s: usize) -> Result<CombinedPolynomial> {
    if ts.points.len() < s {
        return Err(Error::InsufficientPoints { needed: s, got: ts.points.len() });
    }
    for (i, (a, _)) in ts.points.iter().enumerate() {
        if ts.points[i + 1..].iter().any(|(b, _)| a == b) {
            return Err(Error::DuplicatePoint);
        }
    }
    Ok(CombinedPolynomial { coefficients: poly::interpolate(&ts.points[..s])? })
}

/// Dense length-`d` coefficient vector: entry `i` is chunk `i`'s weight in `P_k`.
pub fn coefficient_vector(cs: &ChallengeSet, d: u64) -> Vec<Scalar> {
    let mut v = vec![Scalar::from(0u64); d as usize];
    for (i, c) in cs.iter() {
        v[i as usize] += c;
    }
    v
}

/// Solves for the chunk matrix from `u` pairs `(a_j, P_j)` with `P_j = Σ_i a_{j,i}·M_i`.
pub fn recover_blocks(systems: &[(Vec<Scalar>, CombinedPolynomial)]) -> Result<Vec<Vec<Scalar>>> {
    let a: Vec<Vec<Scalar>> = systems.iter().map(|(v, _)| v.clone()).collect();
    let b: Vec<Vec<Scalar>> = systems.iter().map(|(_, p)| p.coefficients.clone()).collect();
    poly::solve_linear_system(&a, &b)
}

/// Full pipeline: interpolate each transcript set, then solve for all `d` chunks
/// using the first `d` sets.
pub fn recover_chunks(sets: &[TranscriptSet], d: u64, k: usize, s: usize) -> Result<Vec<Vec<Scalar>>> {
    if (sets.len() as u64) < d {
        return Err(Error::InsufficientPoints { needed: d as usize, got: sets.len() });
    }
    let systems = sets[..d as usize]
        .iter()
        .map(|ts| Ok((coefficient_vector(&ts.challenge_set(d, k), d), interpolate_combined(ts, s)?)))
        .collect::<Result<Vec<_>>>()?;
    recover_blocks(&systems)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrivacyReport {
    /// Coefficient positions where the interpolant differs from the true `P_k`.
    pub mismatched: usize,
    pub total: usize,
}

impl PrivacyReport {
    pub fn leaked(&self) -> bool {
        self.mismatched == 0
    }
}

/// Runs the interpolation on blinded points `(r_j, y′_j)` and compares with `truth`.
pub fn attack_private_transcripts(ts: &TranscriptSet, truth: &CombinedPolynomial) -> PrivacyReport {
    let s = truth.coefficients.len();
    let total = s;
    match interpolate_combined(ts, s) {
        Ok(guess) => PrivacyReport {
            mismatched: guess.coefficients.iter().zip(&truth.coefficients).filter(|(g, t)| g != t).count(),
            total,
        },
        Err(_) => PrivacyReport { mismatched: total, total },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::hash_gt_to_scalar;
    use crate::challenge::{draw_challenge, SeedReuseBeacon, SeededBeacon};
    use crate::encoding::{decode_file, encode_file, EncodingParams, FileEncoding};
    use crate::keys::{generate_tags, keygen, PublicKey, TagSet};
    use crate::prover::{combine_chunks, prove_nonprivate, prove_private, prove_private_with_blinding};
    use ark_ff::{Field, UniformRand, Zero};
    use rand::{RngCore, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    struct Setup {
        pk: PublicKey,
        enc: FileEncoding,
        tags: TagSet,
        data: Vec<u8>,
        rng: ChaCha20Rng,
    }

    fn setup(s: usize, d: usize, seed: u64) -> Setup {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let (sk, pk) = keygen(s, &mut rng).unwrap();
        let mut data = vec![0u8; d * s * 31];
        rng.fill_bytes(&mut data);
        let enc = encode_file(&data, EncodingParams::new(s).unwrap(), Scalar::rand(&mut rng)).unwrap();
        assert_eq!(enc.d(), d);
        let tags = generate_tags(&sk, &pk, &enc).unwrap();
        Setup { pk, enc, tags, data, rng }
    }

    fn shared_seed_challenges(seed: u64, period: u64, rounds: u64) -> Vec<Challenge> {
        let mut beacon = SeedReuseBeacon::new(SeededBeacon::from_u64(seed), period);
        (0..rounds).map(|t| draw_challenge(&mut beacon, t).unwrap()).collect()
    }

    #[test]
    fn constant_polynomial_from_one_point() {
        let ts = TranscriptSet { c1_seed: [0; 16], c2_seed: [0; 16], points: vec![(Scalar::from(5u64), Scalar::from(9u64))] };
        assert_eq!(interpolate_combined(&ts, 1).unwrap().coefficients, vec![Scalar::from(9u64)]);
        assert_eq!(interpolate_combined(&ts, 2), Err(Error::InsufficientPoints { needed: 2, got: 1 }));
    }

    #[test]
    fn duplicate_r_rejected() {
        let p = (Scalar::from(1u64), Scalar::from(2u64));
        let ts = TranscriptSet { c1_seed: [0; 16], c2_seed: [0; 16], points: vec![p, p] };
        assert_eq!(interpolate_combined(&ts, 2), Err(Error::DuplicatePoint));
    }

    #[test]
    fn identity_system() {
        let p = CombinedPolynomial { coefficients: vec![Scalar::from(3u64), Scalar::from(4u64)] };
        let chunks = recover_blocks(&[(vec![Scalar::from(1u64)], p.clone())]).unwrap();
        assert_eq!(chunks, vec![p.coefficients]);
    }

    #[test]
    fn identical_rows_are_singular() {
        let row = vec![Scalar::from(1u64), Scalar::from(2u64)];
        let p = CombinedPolynomial { coefficients: vec![Scalar::from(1u64)] };
        assert_eq!(recover_blocks(&[(row.clone(), p.clone()), (row, p)]), Err(Error::SingularSystem));
    }

    #[test]
    fn nonprivate_interpolation_recovers_combination() {
        let st = setup(3, 6, 1);
        let chs = shared_seed_challenges(5, 3, 3);
        let cs = expand_challenge(&chs[0], 6, 4);
        let obs: Vec<_> = chs
            .iter()
            .map(|ch| {
                assert_eq!(expand_challenge(ch, 6, 4), cs);
                (ch, prove_nonprivate(&st.pk, &st.enc, &st.tags, ch, &cs).unwrap().y)
            })
            .collect();
        let sets = group_transcripts(obs);
        assert_eq!(sets.len(), 1);
        assert_eq!(interpolate_combined(&sets[0], 3).unwrap(), combine_chunks(&st.enc, &cs).unwrap());
    }

    #[test]
    fn end_to_end_file_recovery() {
        let (s, d) = (2usize, 4u64);
        let st = setup(s, d as usize, 2);
        let chs = shared_seed_challenges(6, s as u64, d * s as u64);
        let obs: Vec<_> = chs
            .iter()
            .map(|ch| {
                let cs = expand_challenge(ch, d, d as usize);
                (ch, prove_nonprivate(&st.pk, &st.enc, &st.tags, ch, &cs).unwrap().y)
            })
            .collect();
        let sets = group_transcripts(obs);
        assert_eq!(sets.len(), d as usize);
        let chunks = recover_chunks(&sets, d, d as usize, s).unwrap();
        let rebuilt = FileEncoding::from_chunks(st.enc.name, st.enc.params, st.enc.n, st.enc.original_length, &chunks).unwrap();
        assert_eq!(decode_file(&rebuilt, st.enc.params).unwrap(), st.data);
    }

    #[test]
    fn private_transcripts_leak_nothing() {
        let mut st = setup(3, 5, 3);
        let chs = shared_seed_challenges(7, 3, 3);
        let cs = expand_challenge(&chs[0], 5, 5);
        let truth = combine_chunks(&st.enc, &cs).unwrap();
        let obs: Vec<_> = chs
            .iter()
            .map(|ch| (ch, prove_private(&st.pk, &st.enc, &st.tags, ch, &cs, &mut st.rng).unwrap().y_prime))
            .collect();
        let report = attack_private_transcripts(&group_transcripts(obs)[0], &truth);
        assert_eq!(report, PrivacyReport { mismatched: 3, total: 3 });
        assert!(!report.leaked());
    }

    #[test]
    fn zero_blinding_reopens_the_leak() {
        let st = setup(3, 5, 4);
        let chs = shared_seed_challenges(8, 3, 3);
        let cs = expand_challenge(&chs[0], 5, 5);
        let truth = combine_chunks(&st.enc, &cs).unwrap();
        let obs: Vec<_> = chs
            .iter()
            .map(|ch| {
                let prf = prove_private_with_blinding(&st.pk, &st.enc, &st.tags, ch, &cs, Scalar::zero()).unwrap();
                // with z = 0, y′ = ζ·y and ζ is public
                (ch, prf.y_prime * hash_gt_to_scalar(&prf.commitment).inverse().unwrap())
            })
            .collect();
        assert!(attack_private_transcripts(&group_transcripts(obs)[0], &truth).leaked());
    }

    #[test]
    fn mixed_points_mismatch() {
        let mut st = setup(3, 5, 5);
        let chs = shared_seed_challenges(9, 3, 3);
        let cs = expand_challenge(&chs[0], 5, 5);
        let truth = combine_chunks(&st.enc, &cs).unwrap();
        let mut obs = Vec::new();
        for (j, ch) in chs.iter().enumerate() {
            let y = if j == 0 {
                prove_private(&st.pk, &st.enc, &st.tags, ch, &cs, &mut st.rng).unwrap().y_prime
            } else {
                prove_nonprivate(&st.pk, &st.enc, &st.tags, ch, &cs).unwrap().y
            };
            obs.push((ch, y));
        }
        assert!(!attack_private_transcripts(&group_transcripts(obs)[0], &truth).leaked());
    }
}
