//! Compare the machine pole expansion of every kernel family against its
//! closed form, class by class: for each curve class and each of the four
//! summed kernels the coefficient at every root-of-unity pole must match the
//! hand-resummed expression exactly.
//!
//!     cargo run --example verify_lemmas

use qkgv::arith::rat_i64;
use qkgv::geometry::{CY3Data, GVTable};
use qkgv::jfunction::verify_expansion_lemmas;

fn main() {
    let geom = CY3Data::rank1(rat_i64(5));
    let gv = GVTable::rank1(vec![(1, 2875), (2, 609250), (3, 317206375)]);

    let checks = verify_expansion_lemmas(&geom, &gv, 4, 2).expect("expansion");
    let mut pass = 0usize;
    for c in &checks {
        assert!(c.pass, "failed: {:?}", c);
        pass += 1;
    }
    println!("{pass} expansion-shape checks, all exact matches");
}
