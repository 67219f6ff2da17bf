//! Storage-provider proof generation.
//!
//! For a challenge set `{(i_j, c_j)}` the provider folds the challenged
//! chunks into `P_k(x) = Σ_j c_j·M_{i_j}(x)`, aggregates the tags into
//! `σ = Π σ_{i_j}^{c_j}`, divides `P_k` by `(x - r)` and commits to the
//! quotient with the public powers of α to get `ψ = g1^{Q_k(α)}`.
//!
//! The private proof never reveals `y = P_k(r)`. It samples `z`, commits
//! `R = e(g1, ε)^z`, derives `ζ = H′(R)` and publishes `y′ = ζ·y + z`.

use ark_ec::CurveGroup;
use ark_ff::{UniformRand, Zero};
use rand::Rng;

use crate::algebra::{g1_msm, gt_pow, hash_gt_to_scalar, G1Point, GtElement, Scalar, WireFormat, WireReader};
use crate::challenge::{Challenge, ChallengeSet};
use crate::encoding::FileEncoding;
use crate::error::{Error, Result};
use crate::keys::{commit_with_powers, PublicKey, TagSet};
use crate::poly;

/// `P_k` in coefficient form; coefficient `j` is `Σ c_i·m_{i,j}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinedPolynomial {
    pub coefficients: Vec<Scalar>,
}

impl CombinedPolynomial {
    pub fn evaluate(&self, x: &Scalar) -> Scalar {
        poly::evaluate(&self.coefficients, x)
    }
}

/// Proof without blinding: `(σ, y = P_k(r), ψ)`. Leaks `P_k(r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NonPrivateProof {
    pub sigma: G1Point,
    pub y: Scalar,
    pub psi: G1Point,
}

impl WireFormat for NonPrivateProof {
    const WIRE_LEN: usize = 96;

    fn write_wire(&self, out: &mut Vec<u8>) {
        self.sigma.write_wire(out);
        self.y.write_wire(out);
        self.psi.write_wire(out);
    }

    fn read_wire(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != Self::WIRE_LEN {
            return Err(Error::WrongLength { expected: Self::WIRE_LEN, got: bytes.len() });
        }
        let mut r = WireReader::new(bytes);
        Ok(Self { sigma: r.read()?, y: r.read()?, psi: r.read()? })
    }
}

/// The on-chain audit trail `(σ, y′, ψ, R)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuditProof {
    pub sigma: G1Point,
    pub y_prime: Scalar,
    pub psi: G1Point,
    /// `R = e(g1, ε)^z`
    pub commitment: GtElement,
}

/// `sigma (32) ‖ y′ (32) ‖ psi (32) ‖ R (192)`.
impl WireFormat for AuditProof {
    const WIRE_LEN: usize = 288;

    fn write_wire(&self, out: &mut Vec<u8>) {
        self.sigma.write_wire(out);
        self.y_prime.write_wire(out);
        self.psi.write_wire(out);
        self.commitment.write_wire(out);
    }

    fn read_wire(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != Self::WIRE_LEN {
            return Err(Error::WrongLength { expected: Self::WIRE_LEN, got: bytes.len() });
        }
        let mut r = WireReader::new(bytes);
        Ok(Self { sigma: r.read()?, y_prime: r.read()?, psi: r.read()?, commitment: r.read()? })
    }
}

fn check_indices(cs: &ChallengeSet, d: usize) -> Result<()> {
    match cs.indices.iter().find(|&&i| i >= d as u64) {
        Some(&index) => Err(Error::IndexOutOfRange { index, d: d as u64 }),
        None => Ok(()),
    }
}

pub fn combine_chunks(enc: &FileEncoding, cs: &ChallengeSet) -> Result<CombinedPolynomial> {
    check_indices(cs, enc.d())?;
    let mut coefficients = vec![Scalar::zero(); enc.s()];
    for (i, c) in cs.iter() {
        for (acc, m) in coefficients.iter_mut().zip(enc.chunk(i as usize)) {
            *acc += *c * m;
        }
    }
    Ok(CombinedPolynomial { coefficients })
}

/// Divides by `(x - r)`; the quotient has `s - 1` coefficients and the remainder is `P(r)`.
pub fn poly_quotient(p: &CombinedPolynomial, r: &Scalar) -> (Vec<Scalar>, Scalar) {
    poly::divide_by_linear(&p.coefficients, r)
}

fn check_inputs(pk: &PublicKey, enc: &FileEncoding, tags: &TagSet, cs: &ChallengeSet) -> Result<()> {
    if enc.s() != pk.s {
        return Err(Error::ParamMismatch(format!("file chunks hold {} blocks, key has s = {}", enc.s(), pk.s)));
    }
    if tags.sigmas.len() != enc.d() {
        return Err(Error::ParamMismatch(format!("{} tags for {} chunks", tags.sigmas.len(), enc.d())));
    }
    check_indices(cs, enc.d())
}

fn aggregate_sigma(tags: &TagSet, cs: &ChallengeSet) -> G1Point {
    let bases: Vec<G1Point> = cs.indices.iter().map(|&i| tags.sigmas[i as usize]).collect();
    g1_msm(&bases, &cs.coefficients).into_affine()
}

/// `(σ, P_k(r), ψ)`, the pieces shared by both proof variants.
fn core_proof(
    pk: &PublicKey,
    enc: &FileEncoding,
    tags: &TagSet,
    ch: &Challenge,
    cs: &ChallengeSet,
) -> Result<NonPrivateProof> {
    check_inputs(pk, enc, tags, cs)?;
    let combined = combine_chunks(enc, cs)?;
    let (quotient, y) = poly_quotient(&combined, &ch.r);
    let psi = commit_with_powers(pk, &quotient).into_affine();
    Ok(NonPrivateProof { sigma: aggregate_sigma(tags, cs), y, psi })
}

/// Unblinded proof; only for demonstrating what the blinding protects against.
pub fn prove_nonprivate(
    pk: &PublicKey,
    enc: &FileEncoding,
    tags: &TagSet,
    ch: &Challenge,
    cs: &ChallengeSet,
) -> Result<NonPrivateProof> {
    core_proof(pk, enc, tags, ch, cs)
}

pub fn prove_private<R: Rng + ?Sized>(
    pk: &PublicKey,
    enc: &FileEncoding,
    tags: &TagSet,
    ch: &Challenge,
    cs: &ChallengeSet,
    rng: &mut R,
) -> Result<AuditProof> {
    let z = Scalar::rand(rng);
    prove_private_with_blinding(pk, enc, tags, ch, cs, z)
}

/// [`prove_private`] with a caller-chosen blinding exponent `z`.
pub fn prove_private_with_blinding(
    pk: &PublicKey,
    enc: &FileEncoding,
    tags: &TagSet,
    ch: &Challenge,
    cs: &ChallengeSet,
    z: Scalar,
) -> Result<AuditProof> {
    let core = core_proof(pk, enc, tags, ch, cs)?;
    let commitment = gt_pow(&pk.pairing_base, &z);
    let zeta = hash_gt_to_scalar(&commitment);
    Ok(AuditProof { sigma: core.sigma, y_prime: zeta * core.y + z, psi: core.psi, commitment })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::REFERENCE_SUITE;
    use crate::challenge::{draw_challenge, expand_challenge, SeededBeacon};
    use crate::encoding::{chunk_polynomial_eval, encode_file, EncodingParams};
    use crate::keys::{generate_tags, keygen};
    use ark_ec::AffineRepr;
    use ark_ff::One;
    use rand::{RngCore, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn f(v: u64) -> Scalar {
        Scalar::from(v)
    }

    #[test]
    fn identity_weight_returns_the_chunk() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let mut data = vec![0u8; 500];
        rng.fill_bytes(&mut data);
        let enc = encode_file(&data, EncodingParams::new(4).unwrap(), f(1)).unwrap();
        let cs = ChallengeSet { indices: vec![2], coefficients: vec![Scalar::one()] };
        assert_eq!(combine_chunks(&enc, &cs).unwrap().coefficients, enc.chunk(2));
    }

    #[test]
    fn hand_combination() {
        let chunks = vec![vec![f(1), f(0)], vec![f(0), f(1)]];
        let enc = FileEncoding::from_chunks(f(1), EncodingParams::new(2).unwrap(), 4, 124, &chunks).unwrap();
        let cs = ChallengeSet { indices: vec![0, 1], coefficients: vec![f(2), f(3)] };
        assert_eq!(combine_chunks(&enc, &cs).unwrap().coefficients, vec![f(2), f(3)]);
    }

    #[test]
    fn evaluation_commutes_with_combination() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let mut data = vec![0u8; 3000];
        rng.fill_bytes(&mut data);
        let enc = encode_file(&data, EncodingParams::new(5).unwrap(), f(1)).unwrap();
        let ch = draw_challenge(&mut SeededBeacon::from_u64(1), 0).unwrap();
        let cs = expand_challenge(&ch, enc.d() as u64, 7);
        let p = combine_chunks(&enc, &cs).unwrap();
        for _ in 0..10 {
            let x = Scalar::rand(&mut rng);
            let direct: Scalar = cs.iter().map(|(i, c)| *c * chunk_polynomial_eval(enc.chunk(i as usize), &x)).sum();
            assert_eq!(p.evaluate(&x), direct);
        }
    }

    #[test]
    fn out_of_range_index() {
        let enc = encode_file(&[1u8; 40], EncodingParams::new(1).unwrap(), f(1)).unwrap();
        let cs = ChallengeSet { indices: vec![5], coefficients: vec![f(1)] };
        assert_eq!(combine_chunks(&enc, &cs), Err(Error::IndexOutOfRange { index: 5, d: 2 }));
    }

    #[test]
    fn s1_proof_has_identity_psi() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let (sk, pk) = keygen(1, &mut rng).unwrap();
        let enc = encode_file(&[9u8; 100], EncodingParams::new(1).unwrap(), f(5)).unwrap();
        let tags = generate_tags(&sk, &pk, &enc).unwrap();
        let ch = draw_challenge(&mut SeededBeacon::from_u64(2), 0).unwrap();
        let cs = expand_challenge(&ch, enc.d() as u64, 3);
        let prf = prove_nonprivate(&pk, &enc, &tags, &ch, &cs).unwrap();
        assert!(prf.psi.is_zero());
        let y: Scalar = cs.iter().map(|(i, c)| *c * enc.chunk(i as usize)[0]).sum();
        assert_eq!(prf.y, y);
    }

    #[test]
    fn blinding_relation_and_wire_size() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let (sk, pk) = keygen(3, &mut rng).unwrap();
        let enc = encode_file(&[3u8; 400], EncodingParams::new(3).unwrap(), f(6)).unwrap();
        let tags = generate_tags(&sk, &pk, &enc).unwrap();
        let ch = draw_challenge(&mut SeededBeacon::from_u64(3), 0).unwrap();
        let cs = expand_challenge(&ch, enc.d() as u64, 4);
        let z = Scalar::rand(&mut rng);
        let prf = prove_private_with_blinding(&pk, &enc, &tags, &ch, &cs, z).unwrap();
        let y = combine_chunks(&enc, &cs).unwrap().evaluate(&ch.r);
        let zeta = hash_gt_to_scalar(&prf.commitment);
        assert_eq!(prf.y_prime - zeta * y, z);
        assert_eq!(gt_pow(&pk.pairing_base, &z), prf.commitment);
        let bytes = prf.to_wire();
        assert_eq!(bytes.len(), 288);
        assert_eq!(AuditProof::read_wire(&bytes).unwrap(), prf);
        assert_eq!(REFERENCE_SUITE.g1_bytes * 3 + REFERENCE_SUITE.gt_bytes, 288);
    }

    #[test]
    fn mismatched_tags_rejected() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let (sk, pk) = keygen(2, &mut rng).unwrap();
        let enc = encode_file(&[3u8; 400], EncodingParams::new(2).unwrap(), f(6)).unwrap();
        let mut tags = generate_tags(&sk, &pk, &enc).unwrap();
        tags.sigmas.pop();
        let ch = draw_challenge(&mut SeededBeacon::from_u64(3), 0).unwrap();
        let cs = expand_challenge(&ch, enc.d() as u64, 2);
        assert!(matches!(prove_private(&pk, &enc, &tags, &ch, &cs, &mut rng), Err(Error::ParamMismatch(_))));
    }
}
