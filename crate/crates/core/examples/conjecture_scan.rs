//! Checks, on a grid, that for `k ≥ 4` there is exactly one off-diagonal pair
//! above the critical activity and none below.
//!
//! `cargo run --release --example conjecture_scan`

use wr_tree::conjecture::conjecture_scan;

fn main() -> wr_tree::Result<()> {
    for (k, theta) in [(4, 0.0), (4, 0.3), (6, 0.5), (8, 0.2)] {
        let rep = conjecture_scan(k, theta, 12)?;
        println!(
            "k={k} theta={theta}: a_crit {:.10} (numeric {:.10}), supports: {}",
            rep.a_crit_formula, rep.a_crit_numeric, rep.supports_conjecture
        );
        for r in rep.rows.iter().step_by(3) {
            println!(
                "    a={:.5} crossings {} expected {} solver {} max of T at r={:.3}",
                r.a, r.crossings, r.expected_pairs, r.solver_pairs, r.argmax_r
            );
        }
    }
    Ok(())
}
