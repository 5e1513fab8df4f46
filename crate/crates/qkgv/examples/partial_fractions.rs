//! Decompose `1/(1-q^r)^p` into partial fractions over roots of unity and
//! print the exact coefficient attached to each pole `(1 - zeta q)^j`.
//!
//!     cargo run --example partial_fractions

use qkgv::cyclotomic::Root;
use qkgv::qrat::QRat;

fn main() {
    for r in [2u32, 3, 6] {
        for p in 1..=3usize {
            let f = QRat::inv_one_minus_qr(r, p);
            let pf = f.partial_fraction().expect("proper rational function");
            println!("1/(1 - q^{r})^{p}:");
            for zeta in Root::all_of_order_dividing(r) {
                for m in (1..=p).rev() {
                    let c = pf.coeff(zeta, m);
                    if c.is_zero() {
                        continue;
                    }
                    println!("    {} / (1 - {} q)^{}", c, zeta, m);
                }
            }
        }
        println!();
    }
}
