//! Check that the expansion of the q-deformed generating function at q = 1
//! reproduces the cohomological generating function built from Gromov-Witten
//! numbers, term by term in the local uniformizer.
//!
//!     cargo run --example fake_identity

use qkgv::arith::rat_i64;
use qkgv::geometry::{CY3Data, GVTable};
use qkgv::jfunction::verify_fake_identity;

fn main() {
    let geom = CY3Data::rank1(rat_i64(5));
    let gv = GVTable::rank1(vec![(1, 2875), (2, 609250), (3, 317206375)]);

    let checks = verify_fake_identity(&geom, &gv, 4, 3, 5).expect("fake-limit comparison");
    for c in &checks {
        assert!(c.pass, "failed: {:?}", c);
        println!("    ok: {} [{}]", c.name, c.location);
    }
    println!("q = 1 expansion matches the cohomological limit exactly");
}
