//! Owner key generation and per-chunk homomorphic authenticators.
//!
//! The secret key is `(α, x)`. The public key carries `ε = g2^x`,
//! `δ = g2^{αx}`, the powers `g1^{α^j}` for `j = 0..s-1`, and the pairing
//! base `e(g1, ε)`. Chunk `i` is authenticated by
//! `σ_i = (g1^{M_i(α)} · H(name‖i))^x`.

use std::fmt;

use ark_ec::CurveGroup;
use ark_ff::{One, UniformRand, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::algebra::{
    self, g1_generator_batch_mul, g1_msm, hash_to_g1, pairing, G1Point, G2Point, GtElement, Scalar, Suite,
    WireFormat, WireReader, G1, REFERENCE_SUITE,
};
use crate::encoding::{chunk_polynomial_eval, FileEncoding};
use crate::error::{Error, Result};

const TAG_INDEX_DOMAIN: &[u8] = b"tag-index";

/// `H(name‖i)`: 32-byte big-endian name followed by the 8-byte big-endian index.
pub fn chunk_index_point(name: &Scalar, index: u64) -> G1Point {
    let mut msg = Vec::with_capacity(40);
    name.write_wire(&mut msg);
    msg.extend_from_slice(&index.to_be_bytes());
    hash_to_g1(TAG_INDEX_DOMAIN, &msg)
}

#[derive(Clone, PartialEq, Eq)]
pub struct SecretKey {
    pub alpha: Scalar,
    pub x: Scalar,
}

impl fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SecretKey(..)")
    }
}

impl SecretKey {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![REFERENCE_SUITE.id];
        self.alpha.write_wire(&mut out);
        self.x.write_wire(&mut out);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = WireReader::new(bytes);
        r.read_suite()?;
        let alpha = r.read::<Scalar>()?;
        let x = r.read::<Scalar>()?;
        r.finish()?;
        if alpha.is_zero() || x.is_zero() {
            return Err(Error::InvalidEncoding { offset: 1, reason: "secret key components must be nonzero" });
        }
        Ok(Self { alpha, x })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicKey {
    pub suite: &'static Suite,
    pub s: usize,
    pub g1: G1Point,
    pub g2: G2Point,
    /// `g2^x`
    pub epsilon: G2Point,
    /// `g2^{αx}`
    pub delta: G2Point,
    /// `g1^{α^j}` for `j = 0..s`.
    pub alpha_powers: Vec<G1Point>,
    /// `e(g1, ε)`
    pub pairing_base: GtElement,
}

impl PublicKey {
    /// `suite ‖ s (4 BE) ‖ ε ‖ δ ‖ alpha_powers ‖ pairing_base`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![self.suite.id];
        out.extend_from_slice(&(self.s as u32).to_be_bytes());
        self.epsilon.write_wire(&mut out);
        self.delta.write_wire(&mut out);
        for p in &self.alpha_powers {
            p.write_wire(&mut out);
        }
        self.pairing_base.write_wire(&mut out);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = WireReader::new(bytes);
        let suite = r.read_suite()?;
        let s = r.read_u32()? as usize;
        if s == 0 {
            return Err(Error::InvalidEncoding { offset: 1, reason: "s must be at least 1" });
        }
        let epsilon = r.read::<G2Point>()?;
        let delta = r.read::<G2Point>()?;
        let expected = s * G1Point::WIRE_LEN + GtElement::WIRE_LEN;
        if r.remaining() != expected {
            return Err(Error::WrongLength { expected: r.position() + expected, got: bytes.len() });
        }
        let alpha_powers = (0..s).map(|_| r.read::<G1Point>()).collect::<Result<Vec<_>>>()?;
        let pairing_base = r.read::<GtElement>()?;
        r.finish()?;
        Ok(Self { suite, s, g1: suite.g1(), g2: suite.g2(), epsilon, delta, alpha_powers, pairing_base })
    }

    /// Checks `e(alpha_powers[j+1], ε) = e(alpha_powers[j], δ)` for every `j`,
    /// plus `alpha_powers[0] = g1` and `pairing_base = e(g1, ε)`.
    pub fn is_well_formed(&self) -> bool {
        self.alpha_powers.len() == self.s
            && self.alpha_powers[0] == self.g1
            && self.pairing_base == pairing(&self.g1, &self.epsilon)
            && self
                .alpha_powers
                .windows(2)
                .all(|w| pairing(&w[1], &self.epsilon) == pairing(&w[0], &self.delta))
    }
}

/// Samples `(α, x)` and derives the public key with `s` powers of α.
pub fn keygen<R: Rng + ?Sized>(s: usize, rng: &mut R) -> Result<(SecretKey, PublicKey)> {
    if s == 0 {
        return Err(Error::InvalidParams("s must be at least 1".into()));
    }
    let nonzero = |rng: &mut R| loop {
        let v = Scalar::rand(rng);
        if !v.is_zero() {
            break v;
        }
    };
    let alpha = nonzero(rng);
    let x = nonzero(rng);
    Ok(keys_from_secret(SecretKey { alpha, x }, s))
}

/// Deterministically derives the public key for a given secret.
pub fn keys_from_secret(sk: SecretKey, s: usize) -> (SecretKey, PublicKey) {
    let suite = &REFERENCE_SUITE;
    let (g1, g2) = (suite.g1(), suite.g2());
    let mut powers = Vec::with_capacity(s);
    let mut acc = Scalar::one();
    for _ in 0..s {
        powers.push(acc);
        acc *= sk.alpha;
    }
    let alpha_powers = g1_generator_batch_mul(&powers);
    let epsilon = algebra::affine_g2(algebra::g2_mul(&g2, &sk.x));
    let delta = algebra::affine_g2(algebra::g2_mul(&g2, &(sk.alpha * sk.x)));
    let pairing_base = pairing(&g1, &epsilon);
    let pk = PublicKey { suite, s, g1, g2, epsilon, delta, alpha_powers, pairing_base };
    (sk, pk)
}

/// The authenticators `σ_0 .. σ_{d-1}` for one file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagSet {
    pub name: Scalar,
    pub sigmas: Vec<G1Point>,
}

impl TagSet {
    /// `suite ‖ name ‖ d (8 BE) ‖ σ_0 ‖ … ‖ σ_{d-1}`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(41 + 32 * self.sigmas.len());
        out.push(REFERENCE_SUITE.id);
        self.name.write_wire(&mut out);
        out.extend_from_slice(&(self.sigmas.len() as u64).to_be_bytes());
        for s in &self.sigmas {
            s.write_wire(&mut out);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = WireReader::new(bytes);
        r.read_suite()?;
        let name = r.read::<Scalar>()?;
        let d = r.read_u64()? as usize;
        if r.remaining() != d * G1Point::WIRE_LEN {
            return Err(Error::WrongLength { expected: r.position() + d * G1Point::WIRE_LEN, got: bytes.len() });
        }
        let sigmas = (0..d).map(|_| r.read::<G1Point>()).collect::<Result<Vec<_>>>()?;
        r.finish()?;
        Ok(Self { name, sigmas })
    }
}

fn check_width(pk: &PublicKey, enc: &FileEncoding) -> Result<()> {
    if enc.s() != pk.s {
        return Err(Error::ParamMismatch(format!("file chunks hold {} blocks but the key supports s = {}", enc.s(), pk.s)));
    }
    Ok(())
}

/// Owner-side tag generation using α directly.
pub fn generate_tags(sk: &SecretKey, pk: &PublicKey, enc: &FileEncoding) -> Result<TagSet> {
    check_width(pk, enc)?;
    let exps: Vec<Scalar> = enc.par_chunks().map(|c| sk.x * chunk_polynomial_eval(c, &sk.alpha)).collect();
    let data_parts = g1_generator_batch_mul(&exps);
    let sigmas: Vec<G1> = data_parts
        .par_iter()
        .enumerate()
        .map(|(i, g)| *g + chunk_index_point(&enc.name, i as u64) * sk.x)
        .collect();
    Ok(TagSet { name: enc.name, sigmas: G1::normalize_batch(&sigmas) })
}

fn check_tag_shape(pk: &PublicKey, enc: &FileEncoding, tags: &TagSet) -> Result<()> {
    check_width(pk, enc)?;
    if tags.sigmas.len() != enc.d() {
        return Err(Error::ParamMismatch(format!("{} tags for {} chunks", tags.sigmas.len(), enc.d())));
    }
    if tags.name != enc.name {
        return Err(Error::ParamMismatch("tag set belongs to a different file name".into()));
    }
    Ok(())
}

/// Exact check of one chunk: `e(σ_i, g2) = e(Π_j g1^{α^j·m_{i,j}} · H(name‖i), ε)`.
pub fn verify_tag(pk: &PublicKey, enc: &FileEncoding, tags: &TagSet, i: usize) -> Result<bool> {
    check_tag_shape(pk, enc, tags)?;
    if i >= enc.d() {
        return Err(Error::IndexOutOfRange { index: i as u64, d: enc.d() as u64 });
    }
    let commit = g1_msm(&pk.alpha_powers, enc.chunk(i)) + chunk_index_point(&enc.name, i as u64);
    Ok(pairing(&tags.sigmas[i], &pk.g2) == pairing(&commit.into_affine(), &pk.epsilon))
}

/// Provider-side acceptance check of a whole tag set.
///
/// All per-chunk equations are folded into one with weights ρ_i drawn from
/// a hash of the full statement, so a single pair of pairings decides; a
/// set containing any bad tag passes with probability at most 1/p.
pub fn verify_tags(pk: &PublicKey, enc: &FileEncoding, tags: &TagSet) -> Result<bool> {
    check_tag_shape(pk, enc, tags)?;
    let mut transcript = Sha256::new();
    transcript.update(b"verify-tags");
    transcript.update(pk.to_bytes());
    transcript.update(tags.to_bytes());
    for b in enc.blocks() {
        transcript.update(b.to_wire());
    }
    let mut rng = ChaCha20Rng::from_seed(transcript.finalize().into());
    let weights: Vec<Scalar> = (0..enc.d()).map(|_| Scalar::rand(&mut rng)).collect();

    let mut folded = vec![Scalar::zero(); pk.s];
    for (chunk, w) in enc.chunks().zip(&weights) {
        for (acc, m) in folded.iter_mut().zip(chunk) {
            *acc += *w * m;
        }
    }
    let index_points: Vec<G1Point> =
        (0..enc.d() as u64).into_par_iter().map(|i| chunk_index_point(&enc.name, i)).collect();
    let lhs = g1_msm(&tags.sigmas, &weights);
    let rhs = g1_msm(&pk.alpha_powers, &folded) + g1_msm(&index_points, &weights);
    Ok(pairing(&lhs.into_affine(), &pk.g2) == pairing(&rhs.into_affine(), &pk.epsilon))
}

/// `g1^{M(α)}` from the public powers, for any polynomial of degree < s.
pub(crate) fn commit_with_powers(pk: &PublicKey, coefficients: &[Scalar]) -> G1 {
    debug_assert!(coefficients.len() <= pk.alpha_powers.len());
    g1_msm(&pk.alpha_powers[..coefficients.len()], coefficients)
}
