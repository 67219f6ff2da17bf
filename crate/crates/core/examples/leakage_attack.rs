//! Why proofs are blinded.
//!
//! A beacon that keeps repeating its seeds makes every audit hit the same
//! chunks with the same weights. With unblinded proofs each audit then
//! leaks one evaluation of a fixed polynomial, and a chain observer rebuilds
//! the file. The same observer gets nothing from blinded proofs.

use storage_audit::attack::{attack_private_transcripts, LedgerView};
use storage_audit::contract::ProofMode;
use storage_audit::encoding::{decode_file, FileEncoding};
use storage_audit::prover::combine_chunks;
use storage_audit::simulate::{Deployment, RunConfig};

fn main() {
    let (s, d) = (3usize, 4usize);
    let secret = b"Quarterly numbers: revenue up 3%, do not share!!!!".repeat(8);
    let data = secret[..d * s * 31].to_vec();

    for mode in [ProofMode::InsecureNonPrivate, ProofMode::Private] {
        let cfg = RunConfig {
            s,
            k: d,
            num: (d * s) as u64,
            seed: 77,
            mode,
            seed_reuse_period: Some(s as u64),
            ..RunConfig::default()
        };
        let dep = Deployment::prepare(&cfg, Some(data.clone())).unwrap();
        let out = dep.run_contract(&cfg, cfg.seed).unwrap();
        let view = LedgerView::from_entries(&out.ledger).unwrap();
        println!("{mode:?}: {} audits passed, {} transcript groups observed", out.passes, view.usable_transcripts().len());

        for ts in view.usable_transcripts().iter().take(2) {
            let truth = combine_chunks(&dep.enc, &ts.challenge_set(view.ctx.d, view.ctx.k)).unwrap();
            let report = attack_private_transcripts(ts, &truth);
            println!("  interpolated combination: {}/{} coefficients wrong", report.mismatched, report.total);
        }
        let chunks = view.recover_chunks().unwrap();
        let e = &dep.enc;
        let rebuilt = FileEncoding::from_chunks(e.name, e.params, e.n, e.original_length, &chunks).unwrap();
        match decode_file(&rebuilt, e.params) {
            Ok(bytes) if bytes == data => println!("  recovered: {:?}", String::from_utf8_lossy(&bytes[..51])),
            _ => println!("  recovery produced field noise, not the file"),
        }
    }
}
