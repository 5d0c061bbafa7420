//! A `(θ, λ)` sweep for `k=5`, drawn as a character map of the count.
//!
//! `cargo run --release --example phase_sweep`

use wr_tree::sweep::{run_sweep, AxisRange, Scale, SweepSpec};

fn main() -> wr_tree::Result<()> {
    let (nt, nl) = (24, 60);
    let spec = SweepSpec {
        k: 5,
        theta: AxisRange { lo: 1.1, hi: 8.0, steps: nt },
        lambda: AxisRange { lo: 5e-3, hi: 0.2, steps: nl },
        scale: Scale::Log,
    };
    let rows = run_sweep(&spec)?;
    println!("k=5, lambda from 5e-3 (left) to 0.2 (right), log scale");
    for line in rows.chunks(nl).rev() {
        let cells: String = line
            .iter()
            .map(|r| match r.count {
                "1" => '.',
                "2" => '2',
                "3" => '3',
                _ => '?',
            })
            .collect();
        println!("theta={:>5.2} |{cells}|", line[0].theta);
    }
    let inconsistent = rows.iter().filter(|r| !r.consistent).count();
    println!("{} points, {inconsistent} where the solver disagreed with the closed form", rows.len());
    Ok(())
}
