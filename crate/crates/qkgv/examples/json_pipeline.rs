//! Drive the library through its JSON interchange formats, the same ones the
//! `qkgv` binary reads and writes: serialize a geometry and a GV table,
//! convert to Gromov-Witten numbers on disk, and read the result back.
//!
//!     cargo run --example json_pipeline

use qkgv::arith::rat_i64;
use qkgv::formats::{read_json, write_json, GeometryFile, TableFile};
use qkgv::geometry::{gw_from_gv, CY3Data, GVTable};

fn main() {
    let dir = std::env::temp_dir().join("qkgv-json-pipeline");
    std::fs::create_dir_all(&dir).expect("temp dir");

    let geom = CY3Data::rank1(rat_i64(5));
    let gv = GVTable::rank1(vec![(1, 2875), (2, 609250)]);

    let geom_path = dir.join("geometry.json");
    let gv_path = dir.join("gv.json");
    let gw_path = dir.join("gw.json");
    write_json(&geom_path, &GeometryFile::from_geometry(&geom)).expect("write geometry");
    write_json(&gv_path, &TableFile::from_gv(&gv)).expect("write gv");

    let gv_file: TableFile = read_json(&gv_path).expect("read gv");
    let gv_back = gv_file.to_gv().expect("decode gv");
    let gw = gw_from_gv(&gv_back, 1, 2);
    write_json(&gw_path, &TableFile::from_gw(&gw)).expect("write gw");

    let text = std::fs::read_to_string(&gw_path).expect("read back");
    println!("{text}");
    println!("files written under {}", dir.display());
}
