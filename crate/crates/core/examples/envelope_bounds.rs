//! Monotone upper and lower envelopes for the boundary laws, and the uniqueness
//! certificate they give.
//!
//! `cargo run --example envelope_bounds`

use wr_tree::brackets::{k2_envelope_solutions, EnvelopeIter};
use wr_tree::{uniqueness_certificate, ModelParams};

fn main() -> wr_tree::Result<()> {
    let p = ModelParams::hard_core(2, 3.0)?;
    println!("k=2 hard-core, lambda=3: first envelope iterates [z1-, z1+, z2-, z2+]");
    for (i, z) in EnvelopeIter::new(&p)?.take(8).enumerate() {
        println!("  {i:>2}: {:.6e} {:.6e} {:.6e} {:.6e}", z[0], z[1], z[2], z[3]);
    }
    let cert = uniqueness_certificate(&p, 1e-9)?;
    let b = cert.bounds;
    println!("limit after {} steps: [{:.12}, {:.12}] x [{:.12}, {:.12}]", b.iterations, b.z1_lo, b.z1_hi, b.z2_lo, b.z2_hi);
    println!("decision: {:?} ({})", cert.decision, cert.note);
    println!("envelope system solutions:");
    for s in k2_envelope_solutions(&p)? {
        println!("  {s:.12?}");
    }

    for (k, theta, lambda) in [(2, 0.2, 5.0), (2, 0.2, 6.0), (3, 0.6, 10.0), (6, 0.1, 3.0)] {
        let c = uniqueness_certificate(&ModelParams::new(k, theta, lambda)?, 1e-9)?;
        println!("k={k} theta={theta} lambda={lambda}: {:?}, gap {:.2e}", c.decision, c.relative_gap);
    }
    Ok(())
}
