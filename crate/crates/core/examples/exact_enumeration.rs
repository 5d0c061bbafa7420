//! Exact finite-volume measures by enumeration, checked against the
//! boundary-law formula, plus the compatibility test and a marginal ordering.
//!
//! `cargo run --release --example exact_enumeration`

use wr_tree::oracle::{
    check_compatibility, configuration_count, enumerate_measure, marginal_from_boundary_law, marginal_ordering_probe,
    BoundaryFields,
};
use wr_tree::{log_ratio, solve_tisgm, FieldAssignment, ModelParams, TreeIndex};

fn main() -> wr_tree::Result<()> {
    let p = ModelParams::new(2, 0.2, 6.0)?;
    println!("k=2 depth 2 with a 3-child root: {} configurations", configuration_count(2, 2, 3)?);
    for law in solve_tisgm(&p)?.all_laws() {
        let m = enumerate_measure(&p, &BoundaryFields::constant(law, 6, &p), 2, 3)?;
        let f = marginal_from_boundary_law(law, &p, 3)?;
        println!(
            "law ({:.4}, {:.4}): enumerated {:.10?}, formula {:.10?}, ln Z = {:.6}",
            law.x, law.y, m.root_marginal(), f, m.ln_z
        );
    }

    let law = solve_tisgm(&p)?.extreme_pair().unwrap();
    let tree = TreeIndex::recursion(2, 3)?;
    let fa = FieldAssignment::propagate_from_leaves(tree, &p, log_ratio, |_| law.log_fields())?;
    println!("compatibility residual of a consistent field: {:.2e}", check_compatibility(&p, &fa, 3)?);
    let mut bad = fa.clone();
    let leaf = bad.tree().shell(3).start;
    let (hp, hm) = bad.get(leaf);
    bad.set(leaf, (hp + 0.1, hm));
    println!("after perturbing one leaf field:         {:.2e}", check_compatibility(&p, &bad, 3)?);

    for rep in marginal_ordering_probe(&p)? {
        println!("root degree {}: ordering holds = {}", rep.root_degree, rep.holds);
        for (label, v) in &rep.entries {
            println!("    P(+1) under {label:<14} {v:.8}");
        }
    }
    Ok(())
}
