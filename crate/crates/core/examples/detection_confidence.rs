//! How many challenged chunks buy how much assurance.
//!
//! Prints the closed form next to the exact without-replacement value, then
//! checks one row by running real audits against a partly corrupted file.

use storage_audit::simulate::{detection_probability, detection_probability_exact, Corruption, Deployment, RunConfig};

fn main() {
    let d = 10_000u64;
    println!("{:>6} {:>8} {:>10} {:>10}", "k", "corrupt", "1-(1-f)^k", "exact");
    for f in [0.001, 0.01, 0.05] {
        for k in [50u64, 100, 300, 460] {
            let bad = (f * d as f64).round() as u64;
            println!("{k:>6} {:>7.1}% {:>10.4} {:>10.4}", f * 100.0, detection_probability(f, k), detection_probability_exact(bad, d, k));
        }
    }

    let cfg = RunConfig {
        s: 2,
        k: 300,
        num: 200,
        seed: 3,
        file_size: d as usize * 2 * 31,
        corruption: Some(Corruption { fraction: 0.01, from_audit: 0 }),
        ..RunConfig::default()
    };
    let dep = Deployment::prepare(&cfg, None).unwrap();
    let out = dep.run_contract(&cfg, cfg.seed).unwrap();
    let bad = dep.corrupted_chunks.len() as u64;
    println!(
        "\nsimulated: {} of {} audits caught the corruption ({:.3}); exact prediction {:.3}",
        out.fails,
        cfg.num,
        out.fails as f64 / cfg.num as f64,
        detection_probability_exact(bad, dep.enc.d() as u64, 300)
    );
}
