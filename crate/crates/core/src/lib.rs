//! Privacy-preserving proofs of storage for files held by untrusted
//! providers, audited by a (simulated) smart contract.
//!
//! A file is cut into chunks of `s` field elements, each read as the
//! coefficients of a polynomial. The owner tags every chunk once. On each
//! audit a public beacon selects `k` chunks and an evaluation point; the
//! provider answers with a constant-size proof (288 bytes) that the
//! contract checks with four pairings, learning nothing about the data.
//!
//! ```
//! use ark_ff::UniformRand;
//! use rand::SeedableRng;
//! use storage_audit::prelude::*;
//!
//! let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(1);
//! let (sk, pk) = keygen(4, &mut rng).unwrap();
//! let enc = encode_file(b"some bytes worth keeping", EncodingParams::new(4).unwrap(), Scalar::rand(&mut rng)).unwrap();
//! let tags = generate_tags(&sk, &pk, &enc).unwrap();
//!
//! let ch = draw_challenge(&mut SeededBeacon::from_u64(7), 0).unwrap();
//! let ctx = VerificationContext { pk: pk.clone(), name: enc.name, d: enc.d() as u64, k: 300 };
//! let cs = ctx.expand(&ch);
//! let proof = prove_private(&pk, &enc, &tags, &ch, &cs, &mut rng).unwrap();
//! assert_eq!(proof.to_wire().len(), 288);
//! assert!(verify_private(&ctx, &ch, &cs, &proof));
//! ```

pub mod algebra;
pub mod attack;
pub mod challenge;
pub mod cli;
pub mod contract;
pub mod costs;
pub mod encoding;
pub mod error;
pub mod keys;
pub mod poly;
pub mod prover;
pub mod simulate;
pub mod verifier;

pub use error::{Error, Result};

/// The types and functions most callers need.
pub mod prelude {
    pub use crate::algebra::{Scalar, WireFormat, REFERENCE_SUITE};
    pub use crate::challenge::{draw_challenge, expand_challenge, Challenge, ChallengeSet, RandomnessBeacon, SeededBeacon};
    pub use crate::contract::{Agreements, Contract, Metadata, ProofMode, Verdict};
    pub use crate::encoding::{decode_file, encode_file, EncodingParams, FileEncoding};
    pub use crate::error::{Error, Result};
    pub use crate::keys::{generate_tags, keygen, PublicKey, SecretKey, TagSet};
    pub use crate::prover::{prove_private, AuditProof};
    pub use crate::verifier::{verify_private, VerificationContext};
}
