//! Tag-generation throughput and proving/verification latency.
//!
//! Usage: `cargo run --release --example performance -- [s] [k] [megabytes]`

use std::time::Instant;

use ark_ff::UniformRand;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use storage_audit::prelude::*;

fn main() {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse().expect("numeric argument")).collect();
    let s = args.first().copied().unwrap_or(50);
    let k = args.get(1).copied().unwrap_or(300);
    let mb = args.get(2).copied().unwrap_or(4);

    let mut rng = ChaCha20Rng::seed_from_u64(42);
    let mut data = vec![0u8; mb << 20];
    rng.fill_bytes(&mut data);
    let (sk, pk) = keygen(s, &mut rng).unwrap();

    let t = Instant::now();
    let enc = encode_file(&data, EncodingParams::new(s).unwrap(), Scalar::rand(&mut rng)).unwrap();
    let tags = generate_tags(&sk, &pk, &enc).unwrap();
    let tag_secs = t.elapsed().as_secs_f64();
    println!("s = {s}, k = {k}, file = {mb} MiB, d = {} chunks, threads = {}", enc.d(), rayon::current_num_threads());
    println!("encode + tag: {:.2} s ({:.2} MB/s)", tag_secs, data.len() as f64 / 1e6 / tag_secs);

    let ctx = VerificationContext { pk: pk.clone(), name: enc.name, d: enc.d() as u64, k };
    let mut beacon = SeededBeacon::from_u64(1);
    let rounds = 10;
    let (mut prove_ms, mut verify_ms) = (0.0, 0.0);
    for round in 0..rounds {
        let ch = draw_challenge(&mut beacon, round).unwrap();
        let t = Instant::now();
        let cs = ctx.expand(&ch);
        let proof = prove_private(&pk, &enc, &tags, &ch, &cs, &mut rng).unwrap();
        prove_ms += t.elapsed().as_secs_f64() * 1e3;
        let bytes = proof.to_wire();
        let t = Instant::now();
        let ok = storage_audit::verifier::verify_private_bytes(&ctx, &ch, &bytes).unwrap();
        verify_ms += t.elapsed().as_secs_f64() * 1e3;
        assert!(ok);
    }
    println!("prove: {:.1} ms   verify: {:.1} ms   (mean of {rounds})", prove_ms / rounds as f64, verify_ms / rounds as f64);
}
