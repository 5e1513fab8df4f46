//! Acceptance suite: one test per release criterion, each printing a single
//! pass line (run with `--nocapture` to see them; a failed assertion prints
//! the failing side).  Every identity is exact; there are no tolerances.

use std::time::{Duration, Instant};

use num::{BigInt, BigRational};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use qkgv::arith::rat_i64;
use qkgv::conifold::{conifold_gv_check, validate_presentation, verify_small_j_t, verify_small_j_t0};
use qkgv::cyclotomic::{Cyc, Root};
use qkgv::geometry::{gv_from_gw, gw_from_gv, CY3Data, GVTable};
use qkgv::jfunction::{
    build_jtilde, extract_qk, gv_from_qk, pole_report, qk_leading_table, verify_expansion_lemmas,
    verify_fake_identity, BasisLabel,
};
use qkgv::report::CheckItem;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn is_integer(r: &BigRational) -> bool {
    r.denom() == &BigInt::from(1)
}

fn assert_all_pass(checks: &[CheckItem], what: &str) {
    for c in checks {
        assert!(
            c.pass,
            "{}: check {:?} at {:?} failed: {:?}",
            what, c.name, c.location, c.witness
        );
    }
}

fn budget(t: Instant, limit: Duration, what: &str) {
    let spent = t.elapsed();
    assert!(
        spent <= limit,
        "{} took {:?}, budget {:?}",
        what,
        spent,
        limit
    );
}

fn quintic_geometry() -> CY3Data {
    CY3Data::rank1(rat_i64(5))
}

fn quintic_gv() -> GVTable {
    GVTable::rank1(vec![(1, 2875), (2, 609250), (3, 317206375)])
}

fn rank2_geometry() -> CY3Data {
    CY3Data::new(
        2,
        2,
        vec![vec![1, 0], vec![0, 1]],
        vec![
            ((0, 0, 0), rat_i64(5)),
            ((0, 0, 1), rat_i64(3)),
            ((0, 1, 1), rat_i64(2)),
            ((1, 1, 1), rat_i64(4)),
        ],
    )
    .unwrap()
}

fn random_rank1_gv(rng: &mut StdRng, dmax: u32) -> GVTable {
    GVTable::rank1(
        (1..=dmax)
            .map(|d| (d, rng.gen_range(-1000..=1000)))
            .collect(),
    )
}

fn random_rank2_gv(rng: &mut StdRng, dmax: u32) -> GVTable {
    let mut entries = Vec::new();
    for a in 0..=dmax {
        for b in 0..=dmax - a {
            if a + b == 0 {
                continue;
            }
            entries.push((vec![a, b], rng.gen_range(-1000..=1000)));
        }
    }
    GVTable::from_entries(entries)
}

/// 1. The three root-of-unity resummation identities hold exactly for every
///    r <= 8: the partial fractions of 1/(1-q^r)^p, p = 1, 2, 3, carry the
///    stated coefficient at each (1 - zeta q)^j.
#[test]
fn criterion_01_resummation_identities() {
    let t = Instant::now();
    for r in 1..=8i64 {
        for p in 1..=3usize {
            let pf = qkgv::qrat::QRat::inv_one_minus_qr(r as u32, p)
                .partial_fraction()
                .unwrap();
            assert!(pf.lpoly.is_empty(), "r={} p={} has a Laurent part", r, p);
            let expected: Vec<BigRational> = match p {
                1 => vec![rat(1, r)],
                2 => vec![rat(1, r * r), rat(r - 1, r * r)],
                _ => vec![
                    rat(1, r * r * r),
                    rat(3 * (r - 1), 2 * r * r * r),
                    rat(2 * r * r - 3 * r + 1, 2 * r * r * r),
                ],
            };
            for zeta in Root::all_of_order_dividing(r as u32) {
                for (i, want) in expected.iter().enumerate() {
                    let got = pf.coeff(zeta, p - i);
                    assert!(
                        got.sub(&Cyc::from_rat(want.clone())).is_zero(),
                        "r={} p={} zeta={:?} order {}: got {:?}",
                        r,
                        p,
                        zeta,
                        p - i,
                        got
                    );
                }
            }
        }
    }
    budget(t, Duration::from_secs(5), "resummation identities");
    println!("PASS 1: resummation identities exact for r <= 8, pole orders 1..3");
}

/// 2. The pole-expansion lemmas pass for rank-1 and rank-2 geometries with
///    randomized integer tables through class degree 4.
#[test]
fn criterion_02_expansion_lemmas_randomized() {
    let t = Instant::now();
    let mut rng = StdRng::seed_from_u64(2);
    for _ in 0..3 {
        let gv = random_rank1_gv(&mut rng, 4);
        let checks = verify_expansion_lemmas(&quintic_geometry(), &gv, 4, 2).unwrap();
        assert_all_pass(&checks, "rank-1 expansion lemmas");
    }
    for _ in 0..3 {
        let gv = random_rank2_gv(&mut rng, 4);
        let checks = verify_expansion_lemmas(&rank2_geometry(), &gv, 4, 2).unwrap();
        assert_all_pass(&checks, "rank-2 expansion lemmas");
    }
    budget(t, Duration::from_secs(60), "expansion lemmas");
    println!("PASS 2: expansion lemmas, rank 1 and 2, random tables, degree <= 4");
}

/// 3. The value at q = 1 matches the cubing-transform series through
///    (1-q)^5, class degree 4, t-degree 3.
#[test]
fn criterion_03_fake_limit_identity() {
    let t = Instant::now();
    let checks = verify_fake_identity(&quintic_geometry(), &quintic_gv(), 4, 3, 5).unwrap();
    assert_all_pass(&checks, "fake limit, quintic table");
    let mut rng = StdRng::seed_from_u64(3);
    let gv = random_rank1_gv(&mut rng, 4);
    let checks = verify_fake_identity(&quintic_geometry(), &gv, 4, 3, 5).unwrap();
    assert_all_pass(&checks, "fake limit, random table");
    budget(t, Duration::from_secs(120), "fake limit identity");
    println!("PASS 3: q -> 1 limit equals cubing-transform series through (1-q)^5");
}

/// 4. Every generating function built in the suite has pole orders <= 3 at
///    every root of unity.
#[test]
fn criterion_04_pole_orders() {
    let mut rng = StdRng::seed_from_u64(4);
    let cases: Vec<(CY3Data, GVTable)> = vec![
        (quintic_geometry(), quintic_gv()),
        (quintic_geometry(), random_rank1_gv(&mut rng, 5)),
        (rank2_geometry(), random_rank2_gv(&mut rng, 4)),
    ];
    for (geom, gv) in &cases {
        let j = build_jtilde(geom, gv, 4.min(5), 2).unwrap();
        assert_all_pass(&pole_report(&j), "pole report");
    }
    println!("PASS 4: pole orders <= 3 on every built generating function");
}

/// 5. Integrality: for 50 randomized integer tables, every extracted
///    invariant with k <= 10, t-degree <= 3, class degree <= 5 is an integer.
#[test]
fn criterion_05_integrality() {
    let mut rng = StdRng::seed_from_u64(5);
    for case in 0..50 {
        let gv = random_rank1_gv(&mut rng, 5);
        let j = build_jtilde(&quintic_geometry(), &gv, 5, 3).unwrap();
        for beta in j.instanton.keys() {
            for k in 0..=10 {
                for m in 0..=3u32 {
                    for label in [BasisLabel::Phi01, BasisLabel::Phi1(0)] {
                        let v = extract_qk(&j, label, k, beta, &[m]).unwrap();
                        assert!(
                            is_integer(&v),
                            "case {}: non-integer {} at beta {:?}, k {}, m {}",
                            case,
                            v,
                            beta,
                            k,
                            m
                        );
                    }
                }
            }
        }
    }
    println!("PASS 5: all extracted invariants integral over 50 random tables");
}

/// 6. Round trips: the multiple-cover transform and the leading-invariant
///    extraction both invert exactly through degree 5.
#[test]
fn criterion_06_round_trips() {
    let mut rng = StdRng::seed_from_u64(6);
    let geom = quintic_geometry();
    for case in 0..10 {
        let gv = random_rank1_gv(&mut rng, 5);
        let gw = gw_from_gv(&gv, 1, 5);
        let back = gv_from_gw(&gw, 1, 5);
        assert_eq!(gv.entries, back.entries, "case {}: cover transform", case);
        let j = build_jtilde(&geom, &gv, 5, 0).unwrap();
        let qk = qk_leading_table(&j).unwrap();
        let back2 = gv_from_qk(&qk, &geom, 5).unwrap();
        for (c, v) in &gv.entries {
            assert_eq!(&back2.get(c), v, "case {}: class {:?}", case, c);
        }
    }
    println!("PASS 6: cover-transform and leading-invariant round trips, degree <= 5");
}

/// 7. The cubing transform inverts the resolved-geometry series exactly:
///    the table d -> 1/d^3 for d <= 12 comes from the single invariant 1.
#[test]
fn criterion_07_conifold_cover_series() {
    let checks = conifold_gv_check(12);
    assert_all_pass(&checks, "conifold cover series");
    println!("PASS 7: {{d -> 1/d^3, d <= 12}} inverts to {{1 -> 1}} exactly");
}

/// 8. The small generating function of the resolved geometry at t = 0
///    matches its displayed expansion through Q^4, and its negative part
///    equals the a/b kernels term by term.
#[test]
fn criterion_08_small_j_at_t_zero() {
    let t = Instant::now();
    let checks = verify_small_j_t0(4).unwrap();
    assert_all_pass(&checks, "small generating function at t = 0");
    budget(t, Duration::from_secs(120), "small generating function at t = 0");
    println!("PASS 8: t = 0 closed form through Q^4 with a/b kernels");
}

/// 9. The reconstruction at divisor input t1 solves through Q^3, t-degree 2,
///    with the pinned coefficients taking their stated values and the
///    negative part matching the c/d kernels.
#[test]
fn criterion_09_small_j_with_divisor() {
    let t = Instant::now();
    let checks = verify_small_j_t(3, 2).unwrap();
    assert_all_pass(&checks, "small generating function with divisor input");
    budget(t, Duration::from_secs(600), "divisor reconstruction");
    println!("PASS 9: divisor reconstruction through Q^3, t-degree 2, c/d kernels");
}

/// 10. The rank-6 ring model: basis independence, nilpotency order 4, and
///     the deformed relation, all by brute force.
#[test]
fn criterion_10_ring_presentation() {
    let t = Instant::now();
    let checks = validate_presentation();
    assert_all_pass(&checks, "ring presentation");
    budget(t, Duration::from_secs(5), "ring presentation");
    println!("PASS 10: rank-6 ring model verified by brute force");
}

/// 11. The external degree-1..3 fixture (2875, 609250, 317206375) runs end
///     to end: build, pole check, integral extraction, and both inversions.
#[test]
fn criterion_11_quintic_fixture() {
    let geom = quintic_geometry();
    let gv = quintic_gv();
    let j = build_jtilde(&geom, &gv, 3, 2).unwrap();
    assert_all_pass(&pole_report(&j), "fixture pole report");
    for beta in j.instanton.keys() {
        for k in 0..=10 {
            for m in 0..=2u32 {
                let v = extract_qk(&j, BasisLabel::Phi01, k, beta, &[m]).unwrap();
                assert!(is_integer(&v), "non-integer {} at {:?} k={} m={}", v, beta, k, m);
            }
        }
    }
    let gw = gw_from_gv(&gv, 1, 3);
    assert_eq!(gv_from_gw(&gw, 1, 3).entries, gv.entries);
    let qk = qk_leading_table(&j).unwrap();
    let back = gv_from_qk(&qk, &geom, 3).unwrap();
    for (c, v) in &gv.entries {
        assert_eq!(&back.get(c), v, "class {:?}", c);
    }
    let checks = verify_expansion_lemmas(&geom, &gv, 3, 2).unwrap();
    assert_all_pass(&checks, "fixture expansion lemmas");
    println!("PASS 11: degree-3 fixture end to end, all checks green");
}
