//! Randomized invariants: algebraic laws that must hold for *every* input,
//! checked over generated data with proptest.  Complements the acceptance
//! suite, which pins specific worked values.

use num::{BigInt, BigRational};
use proptest::collection::vec;
use proptest::prelude::*;

use qkgv::arith::rat_i64;
use qkgv::cyclotomic::Cyc;
use qkgv::formats::{parse_rational, rational_string};
use qkgv::geometry::{gv_from_gw, gw_from_gv, CY3Data, GVTable};
use qkgv::jfunction::{build_jtilde, extract_qk, gv_from_qk, qk_leading_table, BasisLabel};
use qkgv::qrat::QRat;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn arb_rat() -> impl Strategy<Value = BigRational> {
    (-9999i64..=9999, 1i64..=999).prop_map(|(n, d)| rat(n, d))
}

/// A rank-1 GV table with the given number of degrees.
fn arb_gv1(dmax: u32) -> impl Strategy<Value = GVTable> {
    vec(-500i64..=500, dmax as usize).prop_map(move |vals| {
        GVTable::rank1(vals.into_iter().enumerate().map(|(i, v)| (i as u32 + 1, v)).collect())
    })
}

/// A rank-2 GV table on all classes of total degree <= dmax.
fn arb_gv2(dmax: u32) -> impl Strategy<Value = GVTable> {
    let n = ((dmax + 1) * (dmax + 2) / 2 - 1) as usize;
    vec(-500i64..=500, n).prop_map(move |vals| {
        let mut it = vals.into_iter();
        let mut entries = Vec::new();
        for a in 0..=dmax {
            for b in 0..=dmax - a {
                if a + b > 0 {
                    entries.push((vec![a, b], it.next().unwrap()));
                }
            }
        }
        GVTable::from_entries(entries)
    })
}

proptest! {
    /// The exact-rational string form ("n" or "n/d") round-trips.
    #[test]
    fn rational_string_round_trip(r in arb_rat()) {
        prop_assert_eq!(parse_rational(&rational_string(&r)).unwrap(), r);
    }

    /// The multiple-cover transform and its Moebius inversion are mutually
    /// inverse on rank-1 tables...
    #[test]
    fn cover_transform_round_trip_rank1(gv in arb_gv1(6)) {
        let gw = gw_from_gv(&gv, 1, 6);
        prop_assert_eq!(gv_from_gw(&gw, 1, 6).entries, gv.entries);
    }

    /// ...and on rank-2 tables.
    #[test]
    fn cover_transform_round_trip_rank2(gv in arb_gv2(4)) {
        let gw = gw_from_gv(&gv, 2, 4);
        prop_assert_eq!(gv_from_gw(&gw, 2, 4).entries, gv.entries);
    }

    /// Partial fractions recombine to the original rational function.
    #[test]
    fn partial_fraction_recombines(
        coeffs in vec(-20i64..=20, 1..4),
        r in 1u32..=5,
        p in 1usize..=3,
    ) {
        let mut f = QRat::inv_one_minus_qr(r, p);
        let mut num = QRat::zero();
        for (k, c) in coeffs.iter().enumerate() {
            num = num.add(&QRat::q_pow(k as i64).scale(&Cyc::from_rat(rat_i64(*c))));
        }
        f = f.mul(&num);
        let pf = f.partial_fraction().unwrap();
        prop_assert!(pf.recombine().sub(&f).is_zero());
    }

    /// The polar-part projector is idempotent and complementary: applying it
    /// twice changes nothing, and the discarded part has no poles.
    #[test]
    fn pi_plus_idempotent(
        coeffs in vec(-20i64..=20, 1..4),
        r in 1u32..=4,
        p in 1usize..=2,
    ) {
        let mut f = QRat::inv_one_minus_qr(r, p);
        let mut num = QRat::zero();
        for (k, c) in coeffs.iter().enumerate() {
            num = num.add(&QRat::q_pow(k as i64).scale(&Cyc::from_rat(rat_i64(*c))));
        }
        f = f.mul(&num);
        let plus = f.pi_plus().unwrap();
        prop_assert!(plus.pi_plus().unwrap().sub(&plus).is_zero());
        let rest = f.sub(&plus);
        prop_assert!(rest.pi_plus().unwrap().is_zero());
    }
}

proptest! {
    // The generating-function cases rebuild the whole structure per input, so
    // keep the case count small.
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Every extracted invariant is an integer, for arbitrary integer GV
    /// input on the quintic intersection form.
    #[test]
    fn extracted_invariants_are_integers(gv in arb_gv1(3)) {
        let geom = CY3Data::rank1(rat_i64(5));
        let j = build_jtilde(&geom, &gv, 3, 2).unwrap();
        for beta in [vec![1u32], vec![2], vec![3]] {
            for k in 0..=6usize {
                for m in 0..=2u32 {
                    let v = extract_qk(&j, BasisLabel::Phi01, k, &beta, &[m]).unwrap();
                    prop_assert_eq!(v.denom(), &BigInt::from(1));
                    let w = extract_qk(&j, BasisLabel::Phi1(0), k, &beta, &[m]).unwrap();
                    prop_assert_eq!(w.denom(), &BigInt::from(1));
                }
            }
        }
    }

    /// The leading invariants determine the GV table: forward build followed
    /// by the inverse transform is the identity.
    #[test]
    fn inverse_transform_recovers_gv(gv in arb_gv1(4)) {
        let geom = CY3Data::rank1(rat_i64(5));
        let j = build_jtilde(&geom, &gv, 4, 1).unwrap();
        let qk = qk_leading_table(&j).unwrap();
        prop_assert_eq!(gv_from_qk(&qk, &geom, 4).unwrap().entries, gv.entries);
    }
}
