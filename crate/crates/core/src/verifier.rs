//! Contract-side proof checks.
//!
//! Private proofs are accepted iff
//!
//! ```text
//! R · e(σ^ζ, g2) · e(g1^{-y′}, ε) = e(χ^ζ, ε) · e(ψ^ζ, δ·ε^{-r}),   ζ = H′(R)
//! ```
//!
//! and unblinded proofs iff `e(σ, g2) · e(g1^{-y}, ε) = e(χ, ε) · e(ψ, δ·ε^{-r})`,
//! where `χ = Π H(name‖i)^{c_i}` is rebuilt from public data. Each check
//! costs four pairings and `k + 5` exponentiations; neither the file nor the
//! tags are read.

use ark_ec::CurveGroup;
use rayon::prelude::*;

use crate::algebra::{
    affine_g1, affine_g2, g1_msm, g1_mul, g2_mul, hash_gt_to_scalar, pairing, G1Point, GtElement, Scalar, WireFormat,
};
use crate::challenge::{expand_challenge, Challenge, ChallengeSet};
use crate::error::{Error, Result};
use crate::keys::{chunk_index_point, PublicKey};
use crate::prover::{AuditProof, NonPrivateProof};

/// Everything the contract records about one storage agreement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationContext {
    pub pk: PublicKey,
    pub name: Scalar,
    /// Chunk count of the stored file.
    pub d: u64,
    /// Chunks challenged per audit.
    pub k: usize,
}

impl VerificationContext {
    pub fn expand(&self, ch: &Challenge) -> ChallengeSet {
        expand_challenge(ch, self.d, self.k)
    }
}

/// `χ = Π_{(i, c_i)} H(name‖i)^{c_i}`.
pub fn compute_chi(ctx: &VerificationContext, cs: &ChallengeSet) -> Result<G1Point> {
    if let Some(&index) = cs.indices.iter().find(|&&i| i >= ctx.d) {
        return Err(Error::IndexOutOfRange { index, d: ctx.d });
    }
    let points: Vec<G1Point> = cs.indices.par_iter().map(|&i| chunk_index_point(&ctx.name, i)).collect();
    Ok(g1_msm(&points, &cs.coefficients).into_affine())
}

/// `δ · ε^{-r}`
fn shifted_delta(pk: &PublicKey, r: &Scalar) -> crate::algebra::G2Point {
    affine_g2(g2_mul(&pk.epsilon, &-*r) + pk.delta)
}

pub fn verify_nonprivate(ctx: &VerificationContext, ch: &Challenge, cs: &ChallengeSet, prf: &NonPrivateProof) -> bool {
    let Ok(chi) = compute_chi(ctx, cs) else {
        return false;
    };
    let pk = &ctx.pk;
    let lhs = pairing(&prf.sigma, &pk.g2) + pairing(&affine_g1(g1_mul(&pk.g1, &-prf.y)), &pk.epsilon);
    let rhs = pairing(&chi, &pk.epsilon) + pairing(&prf.psi, &shifted_delta(pk, &ch.r));
    lhs == rhs
}

/// Both sides of the private verification equation, in that order.
pub fn private_equation_sides(
    ctx: &VerificationContext,
    ch: &Challenge,
    cs: &ChallengeSet,
    prf: &AuditProof,
) -> Result<(GtElement, GtElement)> {
    let chi = compute_chi(ctx, cs)?;
    let pk = &ctx.pk;
    let zeta = hash_gt_to_scalar(&prf.commitment);
    let lhs = prf.commitment
        + pairing(&affine_g1(g1_mul(&prf.sigma, &zeta)), &pk.g2)
        + pairing(&affine_g1(g1_mul(&pk.g1, &-prf.y_prime)), &pk.epsilon);
    let rhs = pairing(&affine_g1(g1_mul(&chi, &zeta)), &pk.epsilon)
        + pairing(&affine_g1(g1_mul(&prf.psi, &zeta)), &shifted_delta(pk, &ch.r));
    Ok((lhs, rhs))
}

pub fn verify_private(ctx: &VerificationContext, ch: &Challenge, cs: &ChallengeSet, prf: &AuditProof) -> bool {
    matches!(private_equation_sides(ctx, ch, cs, prf), Ok((lhs, rhs)) if lhs == rhs)
}

/// Decodes a 288-byte proof and checks it against the challenge expanded with `ctx`.
pub fn verify_private_bytes(ctx: &VerificationContext, ch: &Challenge, proof: &[u8]) -> Result<bool> {
    let prf = AuditProof::read_wire(proof)?;
    Ok(verify_private(ctx, ch, &ctx.expand(ch), &prf))
}

/// Decodes a 96-byte unblinded proof and checks it.
pub fn verify_nonprivate_bytes(ctx: &VerificationContext, ch: &Challenge, proof: &[u8]) -> Result<bool> {
    let prf = NonPrivateProof::read_wire(proof)?;
    Ok(verify_nonprivate(ctx, ch, &ctx.expand(ch), &prf))
}
