//! Samples the closed-form critical curves behind the three phase pictures:
//! antiferromagnetic `k=5`, ferromagnetic `k=4` and `k=8`, and the `k=6` periodic window.
//!
//! `cargo run --example critical_curves`

use wr_tree::sweep::{critical_curves, curves_csv, CurveRegime};
use wr_tree::tisgm::critical_values;

fn main() -> wr_tree::Result<()> {
    let anti = critical_curves(5, CurveRegime::Antiferro, 8, Some((3.5, 8.0)))?;
    println!("k=5, theta_cr = {}", critical_values(5, 4.0)?.theta_cr_anti.unwrap());
    print!("{}", curves_csv(&anti));

    for k in [4, 8] {
        let cv = critical_values(k, 0.0)?;
        println!(
            "\nk={k}: theta_c = {:.6}, theta'_c = {:.6}",
            cv.theta_c.unwrap(),
            cv.theta_c_prime.unwrap()
        );
        print!("{}", curves_csv(&critical_curves(k, CurveRegime::Ferro, 6, None)?));
    }

    println!("\nk=6 periodic window");
    print!("{}", curves_csv(&critical_curves(6, CurveRegime::Periodic, 6, None)?));

    match critical_curves(5, CurveRegime::Periodic, 6, None) {
        Err(e) => println!("\nk=5 periodic: {e}"),
        Ok(_) => unreachable!("k=5 has no periodic window"),
    }
    Ok(())
}
