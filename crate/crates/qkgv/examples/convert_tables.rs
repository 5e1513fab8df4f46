//! Turn an integer Gopakumar-Vafa table into rational Gromov-Witten numbers
//! via the multiple-cover sum, then invert back by Moebius inversion and
//! confirm the round trip is exact.
//!
//!     cargo run --example convert_tables

use qkgv::geometry::{gv_from_gw, gw_from_gv, GVTable};

fn main() {
    // Low-degree data for the quintic threefold.
    let gv = GVTable::rank1(vec![(1, 2875), (2, 609250), (3, 317206375)]);

    let gw = gw_from_gv(&gv, 1, 3);
    println!("degree-d rational Gromov-Witten numbers:");
    for (class, value) in &gw.entries {
        println!("    d = {:?}: {}", class, value);
    }

    let back = gv_from_gw(&gw, 1, 3);
    println!("recovered integer table:");
    for (class, value) in &back.entries {
        println!("    d = {:?}: {}", class, value);
    }
    assert_eq!(back.entries, gv.entries, "round trip must be exact");
    println!("round trip OK");
}
