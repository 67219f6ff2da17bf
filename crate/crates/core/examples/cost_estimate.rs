//! On-chain audit cost under a few price and frequency assumptions.

use storage_audit::costs::{annual_cost, cost_table, per_audit_cost, FeeParams};

fn main() {
    let base = FeeParams::default();
    println!("quoted prices: {:.6} USD per audit\n", per_audit_cost(&base));
    print!("{}", cost_table(&FeeParams { redundancy_factor: 10.0, beacon_cost_per_round: 0.05, ..base }));

    println!("\n{:>16} {:>12} {:>14}", "audits per year", "single copy", "10 shards");
    for per_year in [12.0, 52.0, 365.0, 365.0 * 4.0, 365.0 * 24.0] {
        let fp = FeeParams { audits_per_year: per_year, ..base };
        let sharded = FeeParams { redundancy_factor: 10.0, ..fp };
        println!("{per_year:>16} {:>12.2} {:>14.2}", annual_cost(&fp), annual_cost(&sharded));
    }

    println!("\n{:>10} {:>12}", "gas gwei", "per audit");
    for gwei in [1.0, 5.0, 20.0, 100.0] {
        println!("{gwei:>10} {:>12.4}", per_audit_cost(&FeeParams { gas_price_gwei: gwei, ..base }));
    }
}
