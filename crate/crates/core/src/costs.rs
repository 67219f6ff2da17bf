//! Fiat cost of running audits on a public chain.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// Gas figure measured for one on-chain verification.
pub const GAS_PER_AUDIT: f64 = 589_000.0;
pub const GWEI: f64 = 1e-9;

/// Inputs to the estimator. Prices are per unit of gas in gwei and per
/// whole token in fiat.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeeParams {
    pub gas_per_audit: f64,
    pub gas_price_gwei: f64,
    pub token_price: f64,
    pub onetime_storage_gas: f64,
    pub beacon_cost_per_round: f64,
    pub audits_per_year: f64,
    pub redundancy_factor: f64,
    pub duration_years: f64,
}

impl Default for FeeParams {
    /// 589,000 gas at 5 gwei and 143 USD per ETH, audited daily for a year.
    fn default() -> Self {
        Self {
            gas_per_audit: GAS_PER_AUDIT,
            gas_price_gwei: 5.0,
            token_price: 143.0,
            onetime_storage_gas: 0.0,
            beacon_cost_per_round: 0.0,
            audits_per_year: 365.0,
            redundancy_factor: 1.0,
            duration_years: 1.0,
        }
    }
}

impl FeeParams {
    pub fn is_valid(&self) -> bool {
        [
            self.gas_per_audit,
            self.gas_price_gwei,
            self.token_price,
            self.onetime_storage_gas,
            self.beacon_cost_per_round,
            self.audits_per_year,
            self.redundancy_factor,
            self.duration_years,
        ]
        .iter()
        .all(|v| v.is_finite() && *v >= 0.0)
    }

    fn gas_to_fiat(&self, gas: f64) -> f64 {
        gas * self.gas_price_gwei * GWEI * self.token_price
    }
}

pub fn per_audit_cost(fp: &FeeParams) -> f64 {
    fp.gas_to_fiat(fp.gas_per_audit) + fp.beacon_cost_per_round
}

/// Cost of storing the public key on chain, paid once per contract.
pub fn onetime_cost(fp: &FeeParams) -> f64 {
    fp.gas_to_fiat(fp.onetime_storage_gas)
}

pub fn annual_cost(fp: &FeeParams) -> f64 {
    per_audit_cost(fp) * fp.audits_per_year * fp.redundancy_factor * fp.duration_years + onetime_cost(fp)
}

/// Plain-text summary with and without redundancy.
pub fn cost_table(fp: &FeeParams) -> String {
    let single = FeeParams { redundancy_factor: 1.0, ..*fp };
    let mut out = String::new();
    let _ = writeln!(out, "{:<34} {:>14}", "item", "cost");
    let _ = writeln!(out, "{:<34} {:>14.6}", "per audit", per_audit_cost(fp));
    let _ = writeln!(out, "{:<34} {:>14.6}", "one-time key storage", onetime_cost(fp));
    let _ = writeln!(out, "{:<34} {:>14.6}", "total, single copy", annual_cost(&single));
    let _ = writeln!(out, "{:<34} {:>14.6}", format!("total, redundancy x{}", fp.redundancy_factor), annual_cost(fp));
    out
}
