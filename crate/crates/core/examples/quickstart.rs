//! Owner tags a file, provider checks the tags, then one private audit.
//!
//! Usage: `cargo run --example quickstart -- [path]`

use ark_ff::UniformRand;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use storage_audit::keys::verify_tags;
use storage_audit::prelude::*;

fn main() {
    let data = match std::env::args().nth(1) {
        Some(path) => std::fs::read(path).expect("readable file"),
        None => b"A short file. Anything works, binary included.".repeat(200),
    };
    let mut rng = ChaCha20Rng::seed_from_u64(2024);
    let s = 8;

    // owner
    let (sk, pk) = keygen(s, &mut rng).unwrap();
    let params = EncodingParams::new(s).unwrap();
    let enc = encode_file(&data, params, Scalar::rand(&mut rng)).unwrap();
    let tags = generate_tags(&sk, &pk, &enc).unwrap();
    println!("{} bytes -> {} chunks of {s} blocks, {} tags", data.len(), enc.d(), tags.sigmas.len());

    // provider accepts the upload only if every tag is consistent
    assert!(verify_tags(&pk, &enc, &tags).unwrap());
    assert_eq!(decode_file(&enc, params).unwrap(), data);

    // one audit
    let ch = draw_challenge(&mut SeededBeacon::from_u64(1), 0).unwrap();
    let ctx = VerificationContext { pk: pk.clone(), name: enc.name, d: enc.d() as u64, k: 300 };
    let cs = ctx.expand(&ch);
    let proof = prove_private(&pk, &enc, &tags, &ch, &cs, &mut rng).unwrap();
    let bytes = proof.to_wire();
    println!("challenged {} chunks, proof is {} bytes", cs.k(), bytes.len());
    println!("verdict: {}", if verify_private(&ctx, &ch, &cs, &proof) { "pass" } else { "fail" });

    // a provider that dropped one challenged chunk cannot answer
    let mut lossy = enc.clone();
    lossy.chunk_mut(cs.indices[0] as usize).fill(Scalar::from(0u64));
    let forged = prove_private(&pk, &lossy, &tags, &ch, &cs, &mut rng).unwrap();
    println!("after losing chunk {}: {}", cs.indices[0], if verify_private(&ctx, &ch, &cs, &forged) { "pass" } else { "fail" });
}
