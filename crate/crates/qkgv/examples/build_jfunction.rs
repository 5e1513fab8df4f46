//! Assemble the q-deformed generating function for the quintic from its GV
//! table, inspect one instanton coefficient, and run the pole-location audit
//! (denominators only at roots of unity, orders within the stated bounds,
//! no pole at q = 0).
//!
//!     cargo run --example build_jfunction

use qkgv::arith::rat_i64;
use qkgv::geometry::{CY3Data, GVTable};
use qkgv::jfunction::{build_jtilde, pole_report};

fn main() {
    let geom = CY3Data::rank1(rat_i64(5));
    let gv = GVTable::rank1(vec![(1, 2875), (2, 609250), (3, 317206375)]);

    let j = build_jtilde(&geom, &gv, 3, 2).expect("build");
    println!(
        "built generating function: {} instanton classes, t-degree cutoff {}",
        j.instanton.len(),
        j.dt
    );

    let c = j.coefficient(&vec![1]).expect("degree-one class");
    println!("degree-1 coefficient, Phi^{{01}} component at t = 0:");
    println!("    {}", c.phi01.constant_term());

    for item in pole_report(&j) {
        assert!(item.pass, "pole audit failed: {:?}", item);
    }
    println!("pole audit OK (all denominators at roots of unity, orders in bound)");
}
