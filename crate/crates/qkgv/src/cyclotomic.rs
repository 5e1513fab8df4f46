//! Exact cyclotomic numbers.
//!
//! An element of `Q(zeta_n)` is stored on the power basis `1, x, ..,
//! x^{phi(n)-1}` modulo the n-th cyclotomic polynomial.  Conductor 1 is plain
//! `Q`.  Mixing two conductors is an error unless one side is rational;
//! promotion to a larger (multiple) conductor is always explicit via
//! [`Cyc::promote`].  Per-conductor reduction tables are built once and
//! cached process-wide.

use crate::arith::{divisors, euler_phi, gcd};
use crate::{Error, Result};
use num::{BigInt, BigRational, One, Zero};
use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

/// Default bound on the cyclotomic conductor; override with the
/// `QKGV_CONDUCTOR_CAP` environment variable.
pub const DEFAULT_CONDUCTOR_CAP: u32 = 10_000;

pub fn conductor_cap() -> u32 {
    static CAP: Lazy<u32> = Lazy::new(|| {
        std::env::var("QKGV_CONDUCTOR_CAP")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(DEFAULT_CONDUCTOR_CAP)
    });
    *CAP
}

/// Coefficients of the n-th cyclotomic polynomial, constant term first.
///
/// Computed by exact division of `x^n - 1` by the product of the lower
/// cyclotomic polynomials at proper divisors of `n`.
pub fn cyclotomic_polynomial(n: u32) -> Vec<BigInt> {
    assert!(n >= 1);
    // x^n - 1
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    for d in divisors(n as u64) {
        if d == n as u64 {
            continue;
        }
        let phi_d = cyclotomic_polynomial(d as u32);
        num = int_poly_div_exact(&num, &phi_d);
    }
    num
}

/// Exact division of integer polynomials (panics on nonzero remainder).
fn int_poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    assert!(den[dd].is_one());
    if rem.len() <= dd {
        assert!(rem.iter().all(|c| c.is_zero()));
        return vec![BigInt::zero()];
    }
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dd].clone();
        if c.is_zero() {
            continue;
        }
        quot[k] = c.clone();
        for (i, d) in den.iter().enumerate() {
            let v = &c * d;
            rem[k + i] -= v;
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "non-exact division");
    quot
}

struct CycContext {
    #[allow(dead_code)]
    n: u32,
    phi: usize,
    /// x^k mod Phi_n for k = 0 .. max_pow, as dense coefficient rows of
    /// length phi.
    red: Vec<Vec<BigRational>>,
}

impl CycContext {
    fn build(n: u32) -> Result<Arc<CycContext>> {
        let cap = conductor_cap();
        if n > cap {
            return Err(Error::ConductorCap(n, cap));
        }
        let phi = euler_phi(n as u64) as usize;
        let poly = cyclotomic_polynomial(n);
        // rows for x^k, k up to max(2*phi - 2, n - 1): products of two reduced
        // elements reach 2*phi - 2, root embeddings reach n - 1.
        let max_pow = std::cmp::max(2 * phi.saturating_sub(1), n as usize - 1);
        let mut red: Vec<Vec<BigRational>> = Vec::with_capacity(max_pow + 1);
        for k in 0..=max_pow {
            if k < phi {
                let mut row = vec![BigRational::zero(); phi];
                row[k] = BigRational::one();
                red.push(row);
            } else {
                // x^k = x * x^{k-1}
                let prev = red[k - 1].clone();
                let mut row = vec![BigRational::zero(); phi];
                // shift up; the overflow coefficient multiplies
                // x^phi = -sum_{i<phi} poly[i] x^i (poly is monic).
                let top = prev[phi - 1].clone();
                for i in (1..phi).rev() {
                    row[i] = prev[i - 1].clone();
                }
                if !top.is_zero() {
                    for i in 0..phi {
                        row[i] -= &top * BigRational::from_integer(poly[i].clone());
                    }
                }
                red.push(row);
            }
        }
        Ok(Arc::new(CycContext { n, phi, red }))
    }
}

static CONTEXTS: Lazy<Mutex<HashMap<u32, Arc<CycContext>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn context(n: u32) -> Result<Arc<CycContext>> {
    let mut map = CONTEXTS.lock().unwrap();
    if let Some(ctx) = map.get(&n) {
        return Ok(ctx.clone());
    }
    let ctx = CycContext::build(n)?;
    map.insert(n, ctx.clone());
    Ok(ctx)
}

/// A labelled root of unity `e^{2 pi i j / k}` with `gcd(j, k) = 1`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Root {
    pub order: u32,
    pub index: u32,
}

impl Root {
    pub fn new(order: u32, index: u32) -> Root {
        assert!(order >= 1);
        let index = index % order;
        let g = gcd(order as u64, index as u64) as u32;
        if index == 0 {
            Root { order: 1, index: 0 }
        } else {
            Root {
                order: order / g,
                index: index / g,
            }
        }
    }

    pub fn one() -> Root {
        Root { order: 1, index: 0 }
    }

    pub fn is_one(&self) -> bool {
        self.order == 1
    }

    /// The complex-conjugate (inverse) root.
    pub fn inverse(&self) -> Root {
        if self.order == 1 {
            *self
        } else {
            Root {
                order: self.order,
                index: self.order - self.index,
            }
        }
    }

    /// All primitive roots of a given order.
    pub fn primitive_of_order(order: u32) -> Vec<Root> {
        (0..order)
            .filter(|&j| gcd(order as u64, j as u64) == 1 && (order == 1 || j != 0))
            .map(|j| Root { order, index: j })
            .collect()
    }

    /// All roots `zeta` with `zeta^r = 1`, i.e. of order dividing `r`.
    pub fn all_of_order_dividing(r: u32) -> Vec<Root> {
        let mut out = Vec::new();
        for d in divisors(r as u64) {
            out.extend(Root::primitive_of_order(d as u32));
        }
        out
    }

    /// The root as a cyclotomic number at conductor `n` (its order must
    /// divide `n`).
    pub fn as_cyc(&self, n: u32) -> Result<Cyc> {
        if n % self.order != 0 {
            return Err(Error::ConductorMismatch(self.order, n));
        }
        let e = (n / self.order) as u64 * self.index as u64 % n as u64;
        Cyc::zeta_pow(n, e as u32)
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.order == 1 {
            write!(f, "1")
        } else {
            write!(f, "zeta_{}^{}", self.order, self.index)
        }
    }
}

/// Exact cyclotomic number.
#[derive(Clone, Debug)]
pub struct Cyc {
    n: u32,
    /// Length `phi(n)`; power-basis coefficients.
    c: Vec<BigRational>,
}

impl Cyc {
    pub fn zero() -> Cyc {
        Cyc {
            n: 1,
            c: vec![BigRational::zero()],
        }
    }

    pub fn one() -> Cyc {
        Cyc {
            n: 1,
            c: vec![BigRational::one()],
        }
    }

    pub fn from_rat(r: BigRational) -> Cyc {
        Cyc { n: 1, c: vec![r] }
    }

    pub fn from_i64(k: i64) -> Cyc {
        Cyc::from_rat(BigRational::from_integer(BigInt::from(k)))
    }

    /// `zeta_n^e` reduced into the power basis.
    pub fn zeta_pow(n: u32, e: u32) -> Result<Cyc> {
        let ctx = context(n)?;
        let row = ctx.red[(e % n) as usize].clone();
        Ok(Cyc { n, c: row }.normalised())
    }

    /// Conductor together with the power-basis coefficient list, for exact
    /// serialization.
    pub fn power_basis(&self) -> (u32, &[BigRational]) {
        (self.n, &self.c)
    }

    pub fn conductor(&self) -> u32 {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.n == 1
    }

    /// The value as a rational, if it is one.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.n == 1 {
            Some(self.c[0].clone())
        } else {
            None
        }
    }

    pub fn rational_part_unchecked(&self) -> BigRational {
        self.c[0].clone()
    }

    /// Drop to conductor 1 when all higher basis coefficients vanish.
    fn normalised(mut self) -> Cyc {
        if self.n != 1 && self.c[1..].iter().all(|x| x.is_zero()) {
            self.c.truncate(1);
            self.n = 1;
        }
        self
    }

    /// Re-express at conductor `m` (requires `n | m`).
    pub fn promote(&self, m: u32) -> Result<Cyc> {
        if m == self.n {
            return Ok(self.clone());
        }
        if m % self.n != 0 {
            return Err(Error::ConductorMismatch(self.n, m));
        }
        if self.n == 1 {
            let ctx = context(m)?;
            let mut c = vec![BigRational::zero(); ctx.phi];
            c[0] = self.c[0].clone();
            return Ok(Cyc { n: m, c });
        }
        let step = m / self.n;
        let ctx = context(m)?;
        let mut c = vec![BigRational::zero(); ctx.phi];
        for (i, ci) in self.c.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            let e = (i as u64 * step as u64 % m as u64) as usize;
            for (j, rj) in ctx.red[e].iter().enumerate() {
                c[j] += ci * rj;
            }
        }
        Ok(Cyc { n: m, c })
    }

    /// Lift both operands into the smallest common cyclotomic field.
    fn align(a: &Cyc, b: &Cyc) -> (Cyc, Cyc) {
        if a.n == b.n {
            (a.clone(), b.clone())
        } else {
            let n = crate::arith::lcm(a.n as u64, b.n as u64) as u32;
            (
                a.promote(n).expect("lcm is a multiple"),
                b.promote(n).expect("lcm is a multiple"),
            )
        }
    }

    pub fn add(&self, other: &Cyc) -> Cyc {
        let (a, b) = Cyc::align(self, other);
        let c = a
            .c
            .iter()
            .zip(b.c.iter())
            .map(|(x, y)| x + y)
            .collect();
        Cyc { n: a.n, c }.normalised()
    }

    pub fn sub(&self, other: &Cyc) -> Cyc {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Cyc {
        Cyc {
            n: self.n,
            c: self.c.iter().map(|x| -x).collect(),
        }
    }

    pub fn scale(&self, r: &BigRational) -> Cyc {
        Cyc {
            n: self.n,
            c: self.c.iter().map(|x| x * r).collect(),
        }
        .normalised()
    }

    pub fn mul(&self, other: &Cyc) -> Cyc {
        // fast paths: rational factor
        if let Some(r) = self.as_rational() {
            return other.scale(&r);
        }
        if let Some(r) = other.as_rational() {
            return self.scale(&r);
        }
        let (a, b) = Cyc::align(self, other);
        let ctx = context(a.n).expect("context");
        let phi = ctx.phi;
        let mut prod = vec![BigRational::zero(); 2 * phi - 1];
        for (i, x) in a.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.c.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                prod[i + j] += x * y;
            }
        }
        let mut c = vec![BigRational::zero(); phi];
        for (k, p) in prod.into_iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            for (j, rj) in ctx.red[k].iter().enumerate() {
                c[j] += &p * rj;
            }
        }
        Cyc { n: a.n, c }.normalised()
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against
    /// the cyclotomic polynomial.
    pub fn inv(&self) -> Result<Cyc> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(Cyc::from_rat(BigRational::one() / r));
        }
        let phi_poly: Vec<BigRational> = cyclotomic_polynomial(self.n)
            .into_iter()
            .map(BigRational::from_integer)
            .collect();
        let inv = poly_mod_inverse(&self.c, &phi_poly).ok_or(Error::DivisionByZero)?;
        let ctx = context(self.n)?;
        let mut c = inv;
        c.resize(ctx.phi, BigRational::zero());
        Ok(Cyc { n: self.n, c }.normalised())
    }

    pub fn pow(&self, e: u32) -> Cyc {
        let mut acc = Cyc::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

impl PartialEq for Cyc {
    fn eq(&self, other: &Cyc) -> bool {
        self.sub(other).is_zero()
    }
}
impl Eq for Cyc {}

impl fmt::Display for Cyc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n == 1 {
            return write!(f, "{}", self.c[0]);
        }
        let mut first = true;
        for (i, ci) in self.c.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if i == 0 {
                write!(f, "{}", ci)?;
            } else {
                write!(f, "{}*z{}^{}", ci, self.n, i)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Inverse of `a` modulo `m` in `Q[x]` (both dense, constant first); `None`
/// when not coprime.
fn poly_mod_inverse(a: &[BigRational], m: &[BigRational]) -> Option<Vec<BigRational>> {
    // extended Euclid: r0 = m, r1 = a
    let trim = |v: &mut Vec<BigRational>| {
        while v.len() > 1 && v.last().unwrap().is_zero() {
            v.pop();
        }
    };
    let mut r0 = m.to_vec();
    let mut r1 = a.to_vec();
    trim(&mut r0);
    trim(&mut r1);
    let mut s0: Vec<BigRational> = vec![BigRational::zero()];
    let mut s1: Vec<BigRational> = vec![BigRational::one()];
    while !(r1.len() == 1 && r1[0].is_zero()) {
        // quotient/remainder of r0 by r1
        let (q, r) = poly_divmod(&r0, &r1);
        let s_new = poly_sub(&s0, &poly_mul(&q, &s1));
        r0 = r1;
        r1 = r;
        trim(&mut r1);
        s0 = s1;
        s1 = s_new;
        trim(&mut s1);
    }
    if r0.len() != 1 || r0[0].is_zero() {
        return None;
    }
    let c = r0[0].clone();
    Some(s0.iter().map(|x| x / &c).collect())
}

fn poly_divmod(num: &[BigRational], den: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let dd = den.len() - 1;
    let lead = den[dd].clone();
    let mut rem = num.to_vec();
    if rem.len() <= dd {
        return (vec![BigRational::zero()], rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - dd];
    for k in (0..quot.len()).rev() {
        let c = &rem[k + dd] / &lead;
        if c.is_zero() {
            continue;
        }
        quot[k] = c.clone();
        for (i, d) in den.iter().enumerate() {
            let v = &c * d;
            rem[k + i] -= v;
        }
    }
    rem.truncate(dd.max(1));
    (quot, rem)
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] -= x;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_i64;

    fn int_coeffs(v: Vec<i64>) -> Vec<BigInt> {
        v.into_iter().map(BigInt::from).collect()
    }

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(cyclotomic_polynomial(1), int_coeffs(vec![-1, 1]));
        assert_eq!(cyclotomic_polynomial(2), int_coeffs(vec![1, 1]));
        assert_eq!(cyclotomic_polynomial(3), int_coeffs(vec![1, 1, 1]));
        assert_eq!(cyclotomic_polynomial(4), int_coeffs(vec![1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(6), int_coeffs(vec![1, -1, 1]));
        assert_eq!(cyclotomic_polynomial(12), int_coeffs(vec![1, 0, -1, 0, 1]));
        // first index with a coefficient outside {-1, 0, 1}
        let c105 = cyclotomic_polynomial(105);
        assert!(c105.iter().any(|c| *c == BigInt::from(-2)));
    }

    #[test]
    fn root_reduction() {
        assert_eq!(Root::new(6, 2), Root::new(3, 1));
        assert_eq!(Root::new(4, 0), Root::one());
        assert_eq!(Root::new(4, 3).inverse(), Root::new(4, 1));
        assert_eq!(Root::new(1, 0).inverse(), Root::one());
        assert_eq!(Root::primitive_of_order(8).len(), 4);
        assert_eq!(Root::all_of_order_dividing(6).len(), 6);
    }

    #[test]
    fn zeta_arithmetic() {
        // zeta_3 satisfies 1 + z + z^2 = 0
        let z = Cyc::zeta_pow(3, 1).unwrap();
        let s = Cyc::one().add(&z).add(&z.mul(&z));
        assert!(s.is_zero());
        // zeta_4^2 = -1
        let i = Cyc::zeta_pow(4, 1).unwrap();
        assert_eq!(i.mul(&i), Cyc::from_i64(-1));
        // norm: (1 - zeta_5)(1 - zeta_5^2)(1 - zeta_5^3)(1 - zeta_5^4) = 5
        let mut prod = Cyc::one();
        for j in 1..5 {
            let zj = Cyc::zeta_pow(5, j).unwrap();
            prod = prod.mul(&Cyc::one().sub(&zj));
        }
        assert_eq!(prod, Cyc::from_i64(5));
    }

    #[test]
    fn inverse_and_promote() {
        let z = Cyc::zeta_pow(8, 3).unwrap();
        let w = z.inv().unwrap();
        assert_eq!(z.mul(&w), Cyc::one());
        // zeta_3 promoted to conductor 6 equals zeta_6^2
        let z3 = Cyc::zeta_pow(3, 1).unwrap().promote(6).unwrap();
        let z6 = Cyc::zeta_pow(6, 2).unwrap();
        assert_eq!(z3, z6);
        // a rational stays rational after a round trip through conductor 12
        let r = Cyc::from_rat(rat_i64(7) / rat_i64(3));
        let p = r.promote(12).unwrap();
        assert_eq!(p.conductor(), 12);
        assert_eq!(p, r);
    }

    #[test]
    fn mixed_conductors_lift_to_lcm() {
        let a = Cyc::zeta_pow(3, 1).unwrap();
        let b = Cyc::zeta_pow(4, 1).unwrap();
        let s = a.add(&b);
        assert_eq!(s.conductor(), 12);
        assert_eq!(s, Cyc::zeta_pow(12, 4).unwrap().add(&Cyc::zeta_pow(12, 3).unwrap()));
        // product of a primitive cube and fourth root is a primitive 12th root
        assert_eq!(a.mul(&b), Cyc::zeta_pow(12, 7).unwrap());
    }

    #[test]
    fn root_as_cyc() {
        let r = Root::new(3, 2);
        let v = r.as_cyc(6).unwrap();
        assert_eq!(v, Cyc::zeta_pow(6, 4).unwrap());
        assert!(r.as_cyc(4).is_err());
        // sum over all 6th roots is zero
        let mut s = Cyc::zero();
        for r in Root::all_of_order_dividing(6) {
            s = s.add(&r.as_cyc(6).unwrap());
        }
        assert!(s.is_zero());
    }
}
