//! A full agreement on the simulated contract, printed as ledger lines.
//!
//! The provider answers honestly for three audits, then loses most of the
//! file. Watch the payouts change direction.

use storage_audit::contract::{ledger_to_jsonl, replay_ledger, LedgerEntry};
use storage_audit::simulate::{Corruption, Deployment, RunConfig};

fn main() {
    let cfg = RunConfig {
        s: 4,
        k: 50,
        num: 6,
        audit_interval: 24,
        seed: 9,
        owner_deposit: 600,
        provider_deposit: 300,
        file_size: 20_000,
        corruption: Some(Corruption { fraction: 0.5, from_audit: 3 }),
        ..RunConfig::default()
    };
    let deployment = Deployment::prepare(&cfg, None).unwrap();
    let out = deployment.run_contract(&cfg, cfg.seed).unwrap();

    for entry in &out.ledger {
        match entry {
            LedgerEntry::Audited(r) => println!(
                "round {:>4}  audit {}  {:?}  {} -> {:?}",
                r.timestamp, r.audit, r.verdict, r.payout.amount, r.payout.recipient
            ),
            LedgerEntry::Settled { round, owner_refund, provider_refund } => {
                println!("round {round:>4}  settled, refunds owner {owner_refund} provider {provider_refund}")
            }
            _ => {}
        }
    }
    println!("passed {}  failed {}", out.passes, out.fails);
    println!("owner received {}, provider received {}", out.accounts.paid_to_owner, out.accounts.paid_to_provider);

    let replayed = replay_ledger(&out.ledger).unwrap();
    println!("re-verified {} audits from ledger bytes alone, all verdicts agree: {}", replayed.len(), replayed.iter().all(|r| r.recorded == r.recomputed));

    let jsonl = ledger_to_jsonl(&out.ledger);
    println!("ledger: {} lines, {} bytes; first line:\n{}", out.ledger.len(), jsonl.len(), jsonl.lines().next().unwrap_or("").chars().take(160).collect::<String>());
}
