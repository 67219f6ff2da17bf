//! Pairing-group arithmetic, hash oracles and canonical byte encodings.
//!
//! Everything is instantiated on BN254 (the reference suite): 32-byte
//! scalars and compressed G1 points, 64-byte compressed G2 points and
//! 192-byte torus-compressed GT elements. Group operations are written
//! additively in arkworks; the protocol's multiplicative notation maps
//! `a·b` to `a + b` and `a^k` to `a * k`.
//!
//! Exponentiations and pairings routed through the helpers in this module
//! are tallied in thread-local counters (see [`count_ops`]) so that callers
//! can check operation counts without timing anything.

use std::cell::Cell;
use std::sync::OnceLock;

use ark_bn254::{Bn254, Fq, Fq12, Fq6, Fr, G1Affine, G1Projective, G2Affine};
use ark_ec::pairing::{Pairing, PairingOutput};
use ark_ec::short_weierstrass::Affine;
use ark_ec::{AffineRepr, CurveGroup, PrimeGroup, ScalarMul, VariableBaseMSM};
use ark_ff::{BigInteger, Field, One, PrimeField, Zero};
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub type Scalar = Fr;
pub type G1Point = G1Affine;
pub type G2Point = G2Affine;
pub type GtElement = PairingOutput<Bn254>;
pub use ark_bn254::{G1Projective as G1, G2Projective as G2};

/// Describes a pairing suite: identifiers and encoding widths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Suite {
    pub id: u8,
    pub name: &'static str,
    pub scalar_bytes: usize,
    pub g1_bytes: usize,
    pub g2_bytes: usize,
    pub gt_bytes: usize,
    /// Width in bits of each challenge seed.
    pub security_lambda: usize,
}

/// BN254 with compressed points and torus-compressed GT.
pub const REFERENCE_SUITE: Suite = Suite {
    id: 0x01,
    name: "bn254",
    scalar_bytes: 32,
    g1_bytes: 32,
    g2_bytes: 64,
    gt_bytes: 192,
    security_lambda: 128,
};

impl Suite {
    pub fn from_id(id: u8) -> Result<&'static Suite> {
        if id == REFERENCE_SUITE.id {
            Ok(&REFERENCE_SUITE)
        } else {
            Err(Error::UnknownSuite(id))
        }
    }

    pub fn group_order_bits(&self) -> u32 {
        Fr::MODULUS_BIT_SIZE
    }

    pub fn g1(&self) -> G1Point {
        G1Affine::generator()
    }

    pub fn g2(&self) -> G2Point {
        G2Affine::generator()
    }

    /// `e(g1, g2)`.
    pub fn gt_generator(&self) -> GtElement {
        GtElement::generator()
    }
}

// ---------------------------------------------------------------------------
// Operation counting

thread_local! {
    static PAIRINGS: Cell<u64> = const { Cell::new(0) };
    static EXPONENTIATIONS: Cell<u64> = const { Cell::new(0) };
}

/// Pairings and group exponentiations performed on the current thread.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub pairings: u64,
    pub exponentiations: u64,
}

pub fn op_counts() -> OpCounts {
    OpCounts {
        pairings: PAIRINGS.with(Cell::get),
        exponentiations: EXPONENTIATIONS.with(Cell::get),
    }
}

/// Runs `f` and returns the operations it performed on this thread.
pub fn count_ops<T>(f: impl FnOnce() -> T) -> (T, OpCounts) {
    let before = op_counts();
    let out = f();
    let after = op_counts();
    (
        out,
        OpCounts {
            pairings: after.pairings - before.pairings,
            exponentiations: after.exponentiations - before.exponentiations,
        },
    )
}

fn bump_exp(n: u64) {
    EXPONENTIATIONS.with(|c| c.set(c.get() + n));
}

pub fn pairing(p: &G1Point, q: &G2Point) -> GtElement {
    PAIRINGS.with(|c| c.set(c.get() + 1));
    Bn254::pairing(*p, *q)
}

pub fn g1_mul(p: &G1Point, k: &Scalar) -> G1 {
    bump_exp(1);
    *p * k
}

pub fn g2_mul(p: &G2Point, k: &Scalar) -> G2 {
    bump_exp(1);
    *p * k
}

pub fn gt_pow(x: &GtElement, k: &Scalar) -> GtElement {
    bump_exp(1);
    *x * k
}

/// `Σ scalars[i]·bases[i]`; counted as one exponentiation per term.
pub fn g1_msm(bases: &[G1Point], scalars: &[Scalar]) -> G1 {
    assert_eq!(bases.len(), scalars.len(), "msm length mismatch");
    bump_exp(bases.len() as u64);
    G1Projective::msm_unchecked(bases, scalars)
}

/// Fixed-base multiplication of the G1 generator by many scalars.
pub(crate) fn g1_generator_batch_mul(scalars: &[Scalar]) -> Vec<G1Point> {
    bump_exp(scalars.len() as u64);
    G1Projective::generator().batch_mul(scalars)
}

// ---------------------------------------------------------------------------
// Hash oracles

const SCALAR_DST_PREFIX: &[u8] = b"STORAGE-AUDIT-V01-BN254-SCALAR_XMD:SHA-256_";
const G1_DST_PREFIX: &[u8] = b"STORAGE-AUDIT-V01-BN254G1_XMD:SHA-256_SVDW_RO_";

fn dst(prefix: &[u8], tag: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(prefix.len() + tag.len());
    out.extend_from_slice(prefix);
    out.extend_from_slice(tag);
    out
}

/// `expand_message_xmd` with SHA-256 (RFC 9380, section 5.3.1).
pub fn expand_message_xmd(message: &[u8], dst: &[u8], len_in_bytes: usize) -> Vec<u8> {
    const B_IN_BYTES: usize = 32;
    const S_IN_BYTES: usize = 64;
    let ell = len_in_bytes.div_ceil(B_IN_BYTES);
    assert!(ell <= 255 && len_in_bytes <= u16::MAX as usize && dst.len() <= 255);

    let mut dst_prime = dst.to_vec();
    dst_prime.push(dst.len() as u8);

    let b0 = Sha256::new()
        .chain_update([0u8; S_IN_BYTES])
        .chain_update(message)
        .chain_update((len_in_bytes as u16).to_be_bytes())
        .chain_update([0u8])
        .chain_update(&dst_prime)
        .finalize();
    let mut bi = Sha256::new().chain_update(b0).chain_update([1u8]).chain_update(&dst_prime).finalize();
    let mut out = Vec::with_capacity(ell * B_IN_BYTES);
    out.extend_from_slice(&bi);
    for i in 2..=ell {
        let mixed: Vec<u8> = b0.iter().zip(bi.iter()).map(|(a, b)| a ^ b).collect();
        bi = Sha256::new().chain_update(mixed).chain_update([i as u8]).chain_update(&dst_prime).finalize();
        out.extend_from_slice(&bi);
    }
    out.truncate(len_in_bytes);
    out
}

fn hash_to_field_elems<F: PrimeField>(dst: &[u8], message: &[u8], count: usize, len_per_elem: usize) -> Vec<F> {
    let uniform = expand_message_xmd(message, dst, count * len_per_elem);
    uniform.chunks_exact(len_per_elem).map(F::from_be_bytes_mod_order).collect()
}

/// Hashes to Z_p by expanding to 64 bytes and reducing mod p.
pub fn hash_to_scalar(domain_tag: &[u8], message: &[u8]) -> Scalar {
    hash_to_field_elems::<Fr>(&dst(SCALAR_DST_PREFIX, domain_tag), message, 1, 64)[0]
}

/// The H′ oracle: GT → Z_p over the canonical 192-byte encoding.
pub fn hash_gt_to_scalar(x: &GtElement) -> Scalar {
    hash_to_scalar(b"gt-to-scalar", &x.to_wire())
}

struct SvdwConstants {
    z: Fq,
    c1: Fq,
    c2: Fq,
    c3: Fq,
    c4: Fq,
}

// y^2 = x^3 + 3
fn curve_rhs(x: &Fq) -> Fq {
    x.square() * x + Fq::from(3u64)
}

fn sgn0(x: &Fq) -> bool {
    x.into_bigint().is_odd()
}

fn svdw_constants() -> &'static SvdwConstants {
    static CONSTS: OnceLock<SvdwConstants> = OnceLock::new();
    CONSTS.get_or_init(|| {
        // Z = 1: g(1) = 4 is square and -3/16 is a nonzero square since p ≡ 1 mod 3.
        let z = Fq::one();
        let gz = curve_rhs(&z);
        let three_z2 = z.square() * Fq::from(3u64);
        let c1 = gz;
        let c2 = -z * Fq::from(2u64).inverse().unwrap();
        let mut c3 = (-gz * three_z2).sqrt().expect("SvdW constant must be a square");
        if sgn0(&c3) {
            c3 = -c3;
        }
        let c4 = -(gz * Fq::from(4u64)) * three_z2.inverse().unwrap();
        SvdwConstants { z, c1, c2, c3, c4 }
    })
}

/// Shallue–van de Woestijne map for `y^2 = x^3 + 3` (A = 0).
fn map_to_curve_svdw(u: Fq) -> G1Affine {
    let k = svdw_constants();
    let tv1 = u.square() * k.c1;
    let tv2 = Fq::one() + tv1;
    let tv1 = Fq::one() - tv1;
    let tv3 = (tv1 * tv2).inverse().unwrap_or(Fq::zero());
    let tv4 = u * tv1 * tv3 * k.c3;
    let x1 = k.c2 - tv4;
    let x2 = k.c2 + tv4;
    // sqrt doubles as the square test, so each candidate costs one exponentiation
    let (x, mut y) = match curve_rhs(&x1).sqrt() {
        Some(y) => (x1, y),
        None => match curve_rhs(&x2).sqrt() {
            Some(y) => (x2, y),
            None => {
                let x3 = (tv2.square() * tv3).square() * k.c4 + k.z;
                (x3, curve_rhs(&x3).sqrt().expect("SvdW always lands on a square"))
            }
        },
    };
    if sgn0(&u) != sgn0(&y) {
        y = -y;
    }
    G1Affine::new_unchecked(x, y)
}

/// Hash-to-G1 (random-oracle variant): two field elements via
/// `expand_message_xmd`, each mapped with SvdW, summed. G1 has cofactor 1.
pub fn hash_to_g1(domain_tag: &[u8], message: &[u8]) -> G1Point {
    hash_to_g1_with_dst(&dst(G1_DST_PREFIX, domain_tag), message)
}

fn hash_to_g1_with_dst(dst: &[u8], message: &[u8]) -> G1Point {
    // L = ceil((254 + 128) / 8) = 48 bytes per field element
    let u = hash_to_field_elems::<Fq>(dst, message, 2, 48);
    let (u0, u1) = (u[0], u[1]);
    (map_to_curve_svdw(u0) + map_to_curve_svdw(u1)).into_affine()
}

// ---------------------------------------------------------------------------
// Encodings

/// Fixed-width canonical byte encoding.
pub trait WireFormat: Sized {
    const WIRE_LEN: usize;

    fn write_wire(&self, out: &mut Vec<u8>);

    /// Decodes from a buffer of exactly `WIRE_LEN` bytes.
    fn read_wire(bytes: &[u8]) -> Result<Self>;

    fn to_wire(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(Self::WIRE_LEN);
        self.write_wire(&mut out);
        out
    }
}

fn check_len(bytes: &[u8], expected: usize) -> Result<()> {
    if bytes.len() != expected {
        return Err(Error::WrongLength { expected, got: bytes.len() });
    }
    Ok(())
}

impl WireFormat for Scalar {
    const WIRE_LEN: usize = 32;

    fn write_wire(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.into_bigint().to_bytes_be());
    }

    fn read_wire(bytes: &[u8]) -> Result<Self> {
        check_len(bytes, Self::WIRE_LEN)?;
        let mut le = bytes.to_vec();
        le.reverse();
        Fr::deserialize_uncompressed(&le[..]).map_err(|_| Error::InvalidEncoding {
            offset: 0,
            reason: "scalar is not below the group order",
        })
    }
}

impl WireFormat for Affine<ark_bn254::g1::Config> {
    const WIRE_LEN: usize = 32;

    fn write_wire(&self, out: &mut Vec<u8>) {
        self.serialize_compressed(&mut *out).expect("vec write");
    }

    fn read_wire(bytes: &[u8]) -> Result<Self> {
        check_len(bytes, Self::WIRE_LEN)?;
        G1Affine::deserialize_compressed(bytes).map_err(|_| Error::InvalidEncoding {
            offset: 0,
            reason: "not a valid compressed G1 point",
        })
    }
}

impl WireFormat for Affine<ark_bn254::g2::Config> {
    const WIRE_LEN: usize = 64;

    fn write_wire(&self, out: &mut Vec<u8>) {
        self.serialize_compressed(&mut *out).expect("vec write");
    }

    fn read_wire(bytes: &[u8]) -> Result<Self> {
        check_len(bytes, Self::WIRE_LEN)?;
        G2Affine::deserialize_compressed(bytes).map_err(|_| Error::InvalidEncoding {
            offset: 0,
            reason: "not a valid compressed G2 point",
        })
    }
}

// GT lives in the cyclotomic subgroup of Fq12 = Fq6[w]/(w^2 - v), where every
// element g = g0 + g1·w has norm g0^2 - v·g1^2 = 1. Such g ≠ 1 is determined
// by c = (1 + g0)/g1 ∈ Fq6 through g = (c + w)/(c - w). The identity is
// written as c = 0, which would otherwise decode to -1 (not in GT).
impl WireFormat for GtElement {
    const WIRE_LEN: usize = 192;

    fn write_wire(&self, out: &mut Vec<u8>) {
        let g = self.0;
        let c = if g.is_one() {
            Fq6::zero()
        } else {
            (Fq6::one() + g.c0) * g.c1.inverse().expect("GT element other than 1 has g1 != 0")
        };
        c.serialize_uncompressed(&mut *out).expect("vec write");
    }

    fn read_wire(bytes: &[u8]) -> Result<Self> {
        check_len(bytes, Self::WIRE_LEN)?;
        let c = Fq6::deserialize_uncompressed(bytes).map_err(|_| Error::InvalidEncoding {
            offset: 0,
            reason: "GT coefficient is not a canonical field element",
        })?;
        if c.is_zero() {
            return Ok(GtElement::zero());
        }
        let num = Fq12::new(c, Fq6::one());
        let den = Fq12::new(c, -Fq6::one());
        // c^2 - v never vanishes because v is a non-square in Fq6.
        let g = num * den.inverse().expect("c - w is invertible");
        if !g.pow(Fr::MODULUS).is_one() {
            return Err(Error::InvalidEncoding { offset: 0, reason: "GT element outside the order-p subgroup" });
        }
        Ok(PairingOutput(g))
    }
}

/// Sequential reader over a byte buffer that reports absolute offsets.
pub struct WireReader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> WireReader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.remaining() < n {
            return Err(Error::WrongLength { expected: self.pos + n, got: self.buf.len() });
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    pub fn read<T: WireFormat>(&mut self) -> Result<T> {
        let start = self.pos;
        let bytes = self.take(T::WIRE_LEN)?;
        T::read_wire(bytes).map_err(|e| match e {
            Error::InvalidEncoding { offset, reason } => Error::InvalidEncoding { offset: start + offset, reason },
            other => other,
        })
    }

    pub fn read_u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn read_u32(&mut self) -> Result<u32> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn read_u64(&mut self) -> Result<u64> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn read_suite(&mut self) -> Result<&'static Suite> {
        let start = self.pos;
        let id = self.read_u8()?;
        Suite::from_id(id).map_err(|_| Error::InvalidEncoding { offset: start, reason: "unknown suite identifier" })
    }

    /// Fails unless the whole buffer was consumed.
    pub fn finish(self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(Error::WrongLength { expected: self.pos, got: self.buf.len() });
        }
        Ok(())
    }
}

pub(crate) fn affine_g1(p: G1) -> G1Point {
    p.into_affine()
}

pub(crate) fn affine_g2(p: G2) -> G2Point {
    p.into_affine()
}
