//! The 2-periodic laws of `k=6`: the window `(λ⁻, λ⁺)`, the cycle of `φ∘φ`,
//! and the hole densities on the two sublattices.
//!
//! `cargo run --example periodic_window`

use wr_tree::periodic::hole_density_gap;
use wr_tree::{periodic_window, solve_two_periodic, ModelParams};

fn main() -> wr_tree::Result<()> {
    let theta = 0.005;
    let w = periodic_window(6, theta)?;
    let (lm, lp) = (w.lambda_minus.unwrap(), w.lambda_plus.unwrap());
    println!("k=6 theta={theta}: threshold {:.6}, window ({lm:.6}, {lp:.6})", w.theta_threshold);

    for lambda in [0.5 * lm, lm * 1.01, 0.5 * (lm + lp), lp * 0.99, 2.0 * lp] {
        let p = ModelParams::new(6, theta, lambda)?;
        let rep = solve_two_periodic(&p)?;
        print!("lambda={lambda:<10.5} fixed points of phi∘phi: {}", rep.fixed_points);
        match rep.cycles().next() {
            Some(c) => {
                let (pe, po) = hole_density_gap(c, &p, 7)?;
                println!("  cycle ({:.6}, {:.6}), holes even {pe:.5} odd {po:.5}", c.z_even, c.z_odd);
            }
            None => println!("  no cycle"),
        };
    }

    for k in [5, 6, 7] {
        let w = periodic_window(k, 0.0)?;
        println!("k={k}: {}", w.violated.unwrap_or_else(|| format!("window opens below theta = {:.6}", w.theta_threshold)));
    }
    Ok(())
}
