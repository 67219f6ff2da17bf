//! A deterministic model of the auditing contract.
//!
//! The contract walks `Uninit → Ack → Freeze → Audit ⇄ Prove → Closed`.
//! Every message checks the current state and leaves the contract untouched
//! when it is rejected. Scheduled work (challenges, verifications and
//! proof deadlines) lives in an ordered event queue keyed by round, so a run
//! is a pure function of its inputs and beacon.
//!
//! Funds are integer units. Each passed audit moves `owner_deposit / num`
//! from the owner's locked funds to the provider; each failed or missed
//! audit moves `provider_deposit / num` from the provider's locked funds to
//! the owner. Whatever is still locked after the last audit is refunded.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{Scalar, WireFormat};
use crate::challenge::{draw_challenge, Challenge, RandomnessBeacon, BEACON_WORD_BYTES};
use crate::error::{Error, Result};
use crate::keys::PublicKey;
use crate::prover::{AuditProof, NonPrivateProof};
use crate::verifier::{verify_nonprivate_bytes, verify_private_bytes, VerificationContext};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    #[default]
    Uninit,
    Ack,
    Freeze,
    Audit,
    Prove,
    Closed,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Uninit => "UNINIT",
            Status::Ack => "ACK",
            Status::Freeze => "FREEZE",
            Status::Audit => "AUDIT",
            Status::Prove => "PROVE",
            Status::Closed => "CLOSED",
        };
        f.write_str(s)
    }
}

/// Which proof the contract accepts. The unblinded mode exists only to show
/// the leak; its 96-byte proofs publish `P_k(r)` on chain.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProofMode {
    #[default]
    Private,
    InsecureNonPrivate,
}

impl ProofMode {
    pub fn proof_len(self) -> usize {
        match self {
            ProofMode::Private => AuditProof::WIRE_LEN,
            ProofMode::InsecureNonPrivate => NonPrivateProof::WIRE_LEN,
        }
    }
}

/// Negotiated terms. Rounds are the unit of time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Agreements {
    /// Storage period `T`.
    pub duration: u64,
    /// Total number of audits.
    pub num: u64,
    pub k: usize,
    /// Rounds between challenges; also the provider's deadline to answer.
    pub audit_interval: u64,
    /// On-chain storage fee for the agreement record, charged to the owner on rejection.
    pub storage_fee: u64,
    #[serde(default)]
    pub mode: ProofMode,
}

impl Agreements {
    pub fn validate(&self) -> Result<()> {
        if self.num == 0 {
            return Err(Error::InvalidAgreement("at least one audit is required"));
        }
        if self.k == 0 {
            return Err(Error::InvalidAgreement("k must be positive"));
        }
        if self.audit_interval == 0 {
            return Err(Error::InvalidAgreement("audit interval must be at least one round"));
        }
        match self.num.checked_mul(self.audit_interval) {
            Some(span) if span <= self.duration => Ok(()),
            _ => Err(Error::InvalidAgreement("audits do not fit in the agreed duration")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Metadata {
    pub name: Scalar,
    pub d: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Party {
    Owner,
    Provider,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Payout {
    pub recipient: Party,
    pub amount: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// One completed audit. An empty `proof` means the provider missed the deadline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub audit: u64,
    /// Round the challenge was drawn in.
    pub round: u64,
    #[serde(with = "hex_bytes")]
    pub challenge: Vec<u8>,
    #[serde(with = "hex_bytes")]
    pub proof: Vec<u8>,
    pub verdict: Verdict,
    pub payout: Payout,
    /// Round the verdict was reached in.
    pub timestamp: u64,
}

impl AuditRecord {
    pub fn challenge(&self) -> Result<Challenge> {
        let word: [u8; BEACON_WORD_BYTES] = self
            .challenge
            .as_slice()
            .try_into()
            .map_err(|_| Error::WrongLength { expected: BEACON_WORD_BYTES, got: self.challenge.len() })?;
        Ok(Challenge::from_word(self.round, &word))
    }
}

/// One line of the persisted ledger.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum LedgerEntry {
    Negotiated {
        round: u64,
        agreements: Agreements,
        #[serde(with = "hex_bytes")]
        name: Vec<u8>,
        d: u64,
        #[serde(with = "hex_bytes")]
        public_key: Vec<u8>,
    },
    Acknowledged {
        round: u64,
    },
    Rejected {
        round: u64,
        fee_bearer: Party,
        storage_fee: u64,
    },
    Frozen {
        round: u64,
        owner: u64,
        provider: u64,
    },
    Challenged {
        round: u64,
        audit: u64,
        #[serde(with = "hex_bytes")]
        challenge: Vec<u8>,
    },
    Proved {
        round: u64,
        audit: u64,
        #[serde(with = "hex_bytes")]
        proof: Vec<u8>,
    },
    Audited(AuditRecord),
    Settled {
        round: u64,
        owner_refund: u64,
        provider_refund: u64,
    },
}

mod hex_bytes {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let s = String::deserialize(d)?;
        hex::decode(s).map_err(serde::de::Error::custom)
    }
}

pub fn ledger_to_jsonl(entries: &[LedgerEntry]) -> String {
    entries.iter().map(|e| serde_json::to_string(e).expect("ledger entries serialize") + "\n").collect()
}

pub fn ledger_from_jsonl(text: &str) -> Result<Vec<LedgerEntry>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::MalformedLedger { line: i + 1, reason: e.to_string() }))
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Accounts {
    pub initial_owner: u64,
    pub initial_provider: u64,
    pub owner_locked: u64,
    pub provider_locked: u64,
    /// Everything released to the owner, penalties and refunds alike.
    pub paid_to_owner: u64,
    pub paid_to_provider: u64,
}

impl Accounts {
    pub fn conserved(&self) -> bool {
        self.owner_locked as u128 + self.provider_locked as u128 + self.paid_to_owner as u128 + self.paid_to_provider as u128
            == self.initial_owner as u128 + self.initial_provider as u128
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Event {
    Chal,
    Verify,
    /// Proof deadline for the given audit number.
    Deadline(u64),
}

/// Checks a proof of the given mode; undecodable proofs fail.
pub fn judge(ctx: &VerificationContext, mode: ProofMode, ch: &Challenge, proof: &[u8]) -> Verdict {
    let ok = match mode {
        ProofMode::Private => verify_private_bytes(ctx, ch, proof),
        ProofMode::InsecureNonPrivate => verify_nonprivate_bytes(ctx, ch, proof),
    };
    if matches!(ok, Ok(true)) {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Contract {
    status: Status,
    agreements: Option<Agreements>,
    ctx: Option<VerificationContext>,
    cnt: u64,
    accounts: Accounts,
    clock: u64,
    queue: BTreeSet<(u64, u64, Event)>,
    seq: u64,
    current: Option<Challenge>,
    pending: Option<Vec<u8>>,
    ledger: Vec<LedgerEntry>,
    fee_charged: Option<(Party, u64)>,
}

fn wrong(expected: &'static str, actual: Status) -> Error {
    Error::WrongState { expected, actual }
}

impl Contract {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn cnt(&self) -> u64 {
        self.cnt
    }

    pub fn clock(&self) -> u64 {
        self.clock
    }

    pub fn accounts(&self) -> Accounts {
        self.accounts
    }

    pub fn agreements(&self) -> Option<&Agreements> {
        self.agreements.as_ref()
    }

    pub fn context(&self) -> Option<&VerificationContext> {
        self.ctx.as_ref()
    }

    pub fn current_challenge(&self) -> Option<&Challenge> {
        self.current.as_ref()
    }

    pub fn ledger(&self) -> &[LedgerEntry] {
        &self.ledger
    }

    pub fn audit_records(&self) -> impl Iterator<Item = &AuditRecord> {
        self.ledger.iter().filter_map(|e| match e {
            LedgerEntry::Audited(r) => Some(r),
            _ => None,
        })
    }

    /// Who paid the on-chain storage fee when the provider rejected.
    pub fn fee_charged(&self) -> Option<(Party, u64)> {
        self.fee_charged
    }

    pub fn next_event(&self) -> Option<(u64, Event)> {
        self.queue.first().map(|&(round, _, ev)| (round, ev))
    }

    fn schedule(&mut self, round: u64, event: Event) {
        self.queue.insert((round, self.seq, event));
        self.seq += 1;
    }

    fn terms(&self) -> &Agreements {
        self.agreements.as_ref().expect("agreements exist past negotiation")
    }

    pub fn negotiate(&mut self, agreements: Agreements, pk: PublicKey, metadata: Metadata) -> Result<()> {
        if self.status != Status::Uninit {
            return Err(wrong("UNINIT", self.status));
        }
        agreements.validate()?;
        if metadata.d == 0 {
            return Err(Error::InvalidAgreement("file has no chunks"));
        }
        self.ledger.push(LedgerEntry::Negotiated {
            round: self.clock,
            agreements: agreements.clone(),
            name: metadata.name.to_wire(),
            d: metadata.d,
            public_key: pk.to_bytes(),
        });
        self.ctx = Some(VerificationContext { pk, name: metadata.name, d: metadata.d, k: agreements.k });
        self.agreements = Some(agreements);
        self.status = Status::Ack;
        Ok(())
    }

    pub fn acknowledge(&mut self) -> Result<()> {
        if self.status != Status::Ack {
            return Err(wrong("ACK", self.status));
        }
        self.status = Status::Freeze;
        self.ledger.push(LedgerEntry::Acknowledged { round: self.clock });
        Ok(())
    }

    /// The provider declines. Nothing was locked, so no funds move; the
    /// storage fee for the negotiated record is charged to the owner.
    pub fn reject(&mut self) -> Result<()> {
        if self.status != Status::Ack {
            return Err(wrong("ACK", self.status));
        }
        let storage_fee = self.terms().storage_fee;
        self.status = Status::Closed;
        self.fee_charged = Some((Party::Owner, storage_fee));
        self.ledger.push(LedgerEntry::Rejected { round: self.clock, fee_bearer: Party::Owner, storage_fee });
        Ok(())
    }

    pub fn freeze_deposits(&mut self, owner_amount: u64, provider_amount: u64) -> Result<()> {
        if self.status != Status::Freeze {
            return Err(wrong("FREEZE", self.status));
        }
        if owner_amount == 0 || provider_amount == 0 {
            return Err(Error::InsufficientDeposit);
        }
        self.accounts = Accounts {
            initial_owner: owner_amount,
            initial_provider: provider_amount,
            owner_locked: owner_amount,
            provider_locked: provider_amount,
            paid_to_owner: 0,
            paid_to_provider: 0,
        };
        self.status = Status::Audit;
        self.ledger.push(LedgerEntry::Frozen { round: self.clock, owner: owner_amount, provider: provider_amount });
        let first = self.clock + self.terms().audit_interval;
        self.schedule(first, Event::Chal);
        Ok(())
    }

    /// Draws the challenge for the current round.
    pub fn fire_challenge<B: RandomnessBeacon + ?Sized>(&mut self, beacon: &mut B) -> Result<Challenge> {
        if self.status == Status::Closed {
            if let Some(a) = &self.agreements {
                if self.cnt == a.num {
                    return Err(Error::AuditsExhausted(a.num));
                }
            }
        }
        if self.status != Status::Audit {
            return Err(wrong("AUDIT", self.status));
        }
        let ch = draw_challenge(beacon, self.clock)?;
        self.ledger.push(LedgerEntry::Challenged { round: self.clock, audit: self.cnt, challenge: ch.to_word().to_vec() });
        self.current = Some(ch.clone());
        self.status = Status::Prove;
        let deadline = self.clock + self.terms().audit_interval;
        self.schedule(deadline, Event::Deadline(self.cnt));
        Ok(ch)
    }

    pub fn submit_proof(&mut self, proof: &[u8]) -> Result<()> {
        if self.status != Status::Prove || self.pending.is_some() {
            return Err(wrong("PROVE with no proof pending", self.status));
        }
        let expected = self.terms().mode.proof_len();
        if proof.len() != expected {
            return Err(Error::WrongLength { expected, got: proof.len() });
        }
        self.pending = Some(proof.to_vec());
        self.ledger.push(LedgerEntry::Proved { round: self.clock, audit: self.cnt, proof: proof.to_vec() });
        self.schedule(self.clock, Event::Verify);
        Ok(())
    }

    pub fn fire_verify(&mut self) -> Result<(Verdict, Payout)> {
        let Some(proof) = self.pending.take() else {
            return Err(Error::NoProofPending);
        };
        let ch = self.current.as_ref().expect("a pending proof implies a challenge");
        let verdict = judge(self.ctx.as_ref().expect("negotiated"), self.terms().mode, ch, &proof);
        let payout = self.conclude_audit(proof, verdict);
        Ok((verdict, payout))
    }

    /// Returns `true` if the deadline was live and the audit was failed for silence.
    pub fn fire_deadline(&mut self, audit: u64) -> bool {
        if self.status != Status::Prove || self.pending.is_some() || audit != self.cnt {
            return false;
        }
        self.conclude_audit(Vec::new(), Verdict::Fail);
        true
    }

    fn conclude_audit(&mut self, proof: Vec<u8>, verdict: Verdict) -> Payout {
        let num = self.terms().num;
        let interval = self.terms().audit_interval;
        let acc = &mut self.accounts;
        let payout = match verdict {
            Verdict::Pass => {
                let amount = (acc.initial_owner / num).min(acc.owner_locked);
                acc.owner_locked -= amount;
                acc.paid_to_provider += amount;
                Payout { recipient: Party::Provider, amount }
            }
            Verdict::Fail => {
                let amount = (acc.initial_provider / num).min(acc.provider_locked);
                acc.provider_locked -= amount;
                acc.paid_to_owner += amount;
                Payout { recipient: Party::Owner, amount }
            }
        };
        let ch = self.current.take().expect("an audit in progress has a challenge");
        self.ledger.push(LedgerEntry::Audited(AuditRecord {
            audit: self.cnt,
            round: ch.round,
            challenge: ch.to_word().to_vec(),
            proof,
            verdict,
            payout,
            timestamp: self.clock,
        }));
        self.cnt += 1;
        if self.cnt == num {
            self.settle();
        } else {
            self.status = Status::Audit;
            let next = (ch.round + interval).max(self.clock);
            self.schedule(next, Event::Chal);
        }
        payout
    }

    fn settle(&mut self) {
        let acc = &mut self.accounts;
        let (owner_refund, provider_refund) = (acc.owner_locked, acc.provider_locked);
        acc.paid_to_owner += owner_refund;
        acc.paid_to_provider += provider_refund;
        acc.owner_locked = 0;
        acc.provider_locked = 0;
        self.status = Status::Closed;
        self.queue.clear();
        self.ledger.push(LedgerEntry::Settled { round: self.clock, owner_refund, provider_refund });
    }

    /// Pops the earliest scheduled event, advances the clock to it and runs
    /// it. Events that no longer apply are consumed without effect.
    pub fn step<B: RandomnessBeacon + ?Sized>(&mut self, beacon: &mut B) -> Result<Option<(u64, Event)>> {
        let Some((round, seq, event)) = self.queue.pop_first() else {
            return Ok(None);
        };
        self.clock = self.clock.max(round);
        let applied = match event {
            Event::Chal if self.status == Status::Audit => self.fire_challenge(beacon).map(|_| ()),
            Event::Verify if self.pending.is_some() => self.fire_verify().map(|_| ()),
            Event::Deadline(audit) => {
                self.fire_deadline(audit);
                Ok(())
            }
            _ => Ok(()),
        };
        if let Err(e) = applied {
            // leave the event in place so the caller can retry once the cause is fixed
            self.queue.insert((round, seq, event));
            return Err(e);
        }
        Ok(Some((round, event)))
    }

    /// Runs the event loop to settlement. After every challenge `provider`
    /// is asked for a proof; `None` models silence, and a proof the contract
    /// refuses (wrong length) counts the same.
    pub fn run_to_close<B, P>(&mut self, beacon: &mut B, mut provider: P) -> Result<()>
    where
        B: RandomnessBeacon + ?Sized,
        P: FnMut(&Challenge) -> Option<Vec<u8>>,
    {
        while let Some((_, event)) = self.step(beacon)? {
            if event == Event::Chal && self.status == Status::Prove {
                let ch = self.current.clone().expect("challenge just fired");
                if let Some(proof) = provider(&ch) {
                    match self.submit_proof(&proof) {
                        Ok(()) | Err(Error::WrongLength { .. }) => {}
                        Err(e) => return Err(e),
                    }
                }
            }
        }
        Ok(())
    }
}

/// A recorded verdict next to the one obtained by re-checking the stored bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReplayedAudit {
    pub audit: u64,
    pub recorded: Verdict,
    pub recomputed: Verdict,
}

/// Re-verifies every audit in a ledger using only what the ledger holds.
pub fn replay_ledger(entries: &[LedgerEntry]) -> Result<Vec<ReplayedAudit>> {
    let (ctx, mode) = ledger_context(entries)?;
    entries
        .iter()
        .filter_map(|e| match e {
            LedgerEntry::Audited(r) => Some(r),
            _ => None,
        })
        .map(|r| {
            let recomputed =
                if r.proof.is_empty() { Verdict::Fail } else { judge(&ctx, mode, &r.challenge()?, &r.proof) };
            Ok(ReplayedAudit { audit: r.audit, recorded: r.verdict, recomputed })
        })
        .collect()
}

/// Rebuilds the verification context from the ledger's negotiation entry.
pub fn ledger_context(entries: &[LedgerEntry]) -> Result<(VerificationContext, ProofMode)> {
    let (agreements, name, d, public_key) = entries
        .iter()
        .find_map(|e| match e {
            LedgerEntry::Negotiated { agreements, name, d, public_key, .. } => Some((agreements, name, *d, public_key)),
            _ => None,
        })
        .ok_or(Error::MalformedLedger { line: 0, reason: "no negotiation entry".into() })?;
    let ctx = VerificationContext { pk: PublicKey::from_bytes(public_key)?, name: Scalar::read_wire(name)?, d, k: agreements.k };
    Ok((ctx, agreements.mode))
}
