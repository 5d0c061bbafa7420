//! Counts and lists the translation-invariant laws at a few parameter points.
//!
//! `cargo run --example tisgm_phase`

use wr_tree::{classify_phase, ModelParams};

fn main() -> wr_tree::Result<()> {
    let points = [
        (2, 0.0, 2.0),
        (2, 0.0, 3.0),
        (2, 0.2, 6.0),
        (3, 0.0, 1.2),
        (5, 5.0, 0.0185),
        (5, 5.0, 0.1),
        (8, 0.3, 40.0),
        (8, 0.8, 40.0),
    ];
    for (k, theta, lambda) in points {
        let p = ModelParams::new(k, theta, lambda)?;
        let r = classify_phase(&p)?;
        println!(
            "k={k} theta={theta} lambda={lambda}: count {} by {} ({:?}, residual {:.1e})",
            r.count.label(),
            r.deciding_theorem.label(),
            r.solutions.method,
            r.solutions.residual
        );
        for law in r.solutions.all_laws() {
            let kind = if law.x == law.y { "diagonal" } else { "off-diagonal" };
            println!("    x = {:<22.15} y = {:<22.15} {kind}", law.x, law.y);
        }
    }

    // J and β instead of θ
    let p = ModelParams::from_coupling(5, -1.0, 1.8, 0.02)?;
    let r = classify_phase(&p)?;
    println!("k=5 J=-1 beta=1.8 (theta={:.4}) lambda=0.02: count {}", p.theta(), r.count.label());
    Ok(())
}
