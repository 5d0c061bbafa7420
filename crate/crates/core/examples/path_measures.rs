//! Fields built from a path through the tree: one translation-invariant law on
//! each side of the path, relaxed by the recursion inside.
//!
//! `cargo run --example path_measures`

use wr_tree::paths::{lipschitz_constant, path_boundary_pair};
use wr_tree::{distinguish_paths, solve_path_field, ModelParams, PathSpec};

fn main() -> wr_tree::Result<()> {
    let p = ModelParams::new(2, 0.2, 6.0)?;
    let pair = path_boundary_pair(&p)?;
    println!("k=2 theta=0.2 lambda=6, boundary pair ({:.6}, {:.6})", pair.x, pair.y);
    println!("contraction bound 2L = {:.6}", 2.0 * lipschitz_constant(0.2)?);

    for t in [0.0, 0.1, 1.0 / 3.0, 0.5, 0.9, 1.0] {
        let sol = solve_path_field(&PathSpec::from_t(t, 12, 2)?, &p, 1e-13)?;
        let (x, y) = sol.field.law(0);
        println!(
            "t={t:<6.4} root law ({x:.6}, {y:.6}), {} sweeps, contraction {:.4}, residual {:.1e}",
            sol.sweeps, sol.contraction, sol.residual
        );
    }
    println!("sup distance between t=0.25 and t=0.75: {:.3e}", distinguish_paths(0.25, 0.75, &p, 12)?);

    // paths that split at level m differ at the root by roughly (2L)^m
    let base = solve_path_field(&PathSpec::from_t(0.5, 12, 2)?, &p, 1e-13)?;
    for m in [2, 4, 6, 8, 10] {
        let other = solve_path_field(&PathSpec::from_t(0.5 + 0.5f64.powi(m), 12, 2)?, &p, 1e-13)?;
        let (a, b) = (base.field.get(0), other.field.get(0));
        println!("split at level {m:>2}: root field difference {:.3e}", (a.0 - b.0).abs().max((a.1 - b.1).abs()));
    }
    Ok(())
}
