//! Rational functions in `q` whose denominators are products of `q^e` and
//! `(1 - zeta q)^m` over labelled roots of unity.  This is the exact scalar
//! type for all q-dependence: partial fractions, pole orders and the Laurent
//! polynomial projector are computed on the factored form, so no root of
//! unity is ever approximated.

use crate::arith::lcm;
use crate::cyclotomic::{Cyc, Root};
use crate::poly::Poly;
use crate::{Error, Result};
use num::BigRational;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug)]
pub struct QRat {
    /// Numerator polynomial.
    pub num: Poly,
    /// Denominator factors `(1 - zeta q)^m`, multiplicity >= 1.
    pub den: BTreeMap<Root, usize>,
    /// Denominator power of `q`.
    pub qpow: usize,
}

/// A Laurent polynomial in `q` (the plus-part of the polarization).
pub type LPoly = BTreeMap<i64, Cyc>;

/// Exact partial fraction decomposition: a Laurent polynomial plus proper
/// fractions `c / (1 - zeta q)^m`.
#[derive(Clone, Debug)]
pub struct PartialFraction {
    pub lpoly: LPoly,
    pub parts: BTreeMap<(Root, usize), Cyc>,
}

impl PartialFraction {
    /// Coefficient of `(1 - zeta q)^{-m}`.
    pub fn coeff(&self, zeta: Root, m: usize) -> Cyc {
        self.parts
            .get(&(zeta, m))
            .cloned()
            .unwrap_or_else(Cyc::zero)
    }

    /// Largest pole order at `zeta` (0 when regular).
    pub fn pole_order(&self, zeta: Root) -> usize {
        self.parts
            .keys()
            .filter(|(z, _)| *z == zeta)
            .map(|(_, m)| *m)
            .max()
            .unwrap_or(0)
    }

    /// Reassemble the rational function (used to cross-check the
    /// decomposition).
    pub fn recombine(&self) -> QRat {
        let mut acc = QRat::zero();
        for (&k, c) in &self.lpoly {
            acc = acc.add(&QRat::q_pow(k).scale(c));
        }
        for (&(zeta, m), c) in &self.parts {
            let term = QRat {
                num: Poly::constant(c.clone()),
                den: BTreeMap::from([(zeta, m)]),
                qpow: 0,
            };
            acc = acc.add(&term);
        }
        acc
    }
}

impl QRat {
    pub fn zero() -> QRat {
        QRat {
            num: Poly::zero(),
            den: BTreeMap::new(),
            qpow: 0,
        }
    }

    pub fn one() -> QRat {
        QRat::poly(Poly::one())
    }

    pub fn poly(p: Poly) -> QRat {
        QRat {
            num: p,
            den: BTreeMap::new(),
            qpow: 0,
        }
    }

    pub fn from_rat(r: BigRational) -> QRat {
        QRat::poly(Poly::constant(Cyc::from_rat(r)))
    }

    pub fn from_i64(k: i64) -> QRat {
        QRat::poly(Poly::constant(Cyc::from_i64(k)))
    }

    /// `q^k`, negative exponents allowed.
    pub fn q_pow(k: i64) -> QRat {
        if k >= 0 {
            QRat::poly(Poly::q_pow(k as usize))
        } else {
            QRat {
                num: Poly::one(),
                den: BTreeMap::new(),
                qpow: (-k) as usize,
            }
        }
    }

    /// The polynomial `1 - q^r`.
    pub fn one_minus_qr(r: u32) -> QRat {
        let mut c = vec![Cyc::zero(); r as usize + 1];
        c[0] = Cyc::one();
        c[r as usize] = Cyc::from_i64(-1);
        QRat::poly(Poly::from_coeffs(c))
    }

    /// `1 / (1 - q^r)^pow`, with the denominator kept factored into the
    /// roots of unity of order dividing `r`.
    pub fn inv_one_minus_qr(r: u32, pow: usize) -> QRat {
        let mut den = BTreeMap::new();
        for zeta in Root::all_of_order_dividing(r) {
            den.insert(zeta, pow);
        }
        QRat {
            num: Poly::one(),
            den,
            qpow: 0,
        }
    }

    /// General constructor from numerator and denominator data.
    pub fn fraction(num: Poly, den: Vec<(Root, usize)>, qpow: usize) -> QRat {
        let mut d = BTreeMap::new();
        for (z, m) in den {
            if m > 0 {
                *d.entry(z).or_insert(0) += m;
            }
        }
        QRat { num, den: d, qpow }.reduced()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Smallest conductor containing every coefficient and every denominator
    /// root.
    pub fn conductor(&self) -> u32 {
        let mut n = poly_conductor(&self.num);
        for z in self.den.keys() {
            n = lcm(n as u64, z.order as u64) as u32;
        }
        n
    }

    pub fn pole_order_at(&self, zeta: Root) -> usize {
        self.den.get(&zeta).copied().unwrap_or(0)
    }

    /// Genuine poles (after cancelling removable factors), with multiplicity.
    pub fn pole_structure(&self) -> Vec<(Root, usize)> {
        let r = self.clone().reduced();
        r.den.iter().map(|(z, m)| (*z, *m)).collect()
    }

    /// Pole order at `zeta` after reduction.
    pub fn true_pole_order_at(&self, zeta: Root) -> usize {
        self.pole_structure()
            .into_iter()
            .find(|(z, _)| *z == zeta)
            .map(|(_, m)| m)
            .unwrap_or(0)
    }

    /// Cancel shared `q` powers and `(1 - zeta q)` factors.
    pub fn reduced(mut self) -> QRat {
        if self.num.is_zero() {
            self.den.clear();
            self.qpow = 0;
            return self;
        }
        while self.qpow > 0 && self.num.coeff(0).is_zero() {
            let mut c = self.num.c.clone();
            c.remove(0);
            self.num = Poly::from_coeffs(c);
            self.qpow -= 1;
        }
        let roots: Vec<Root> = self.den.keys().cloned().collect();
        for zeta in roots {
            loop {
                let mult = self.den.get(&zeta).copied().unwrap_or(0);
                if mult == 0 {
                    break;
                }
                let n = lcm(poly_conductor(&self.num) as u64, zeta.order as u64) as u32;
                let num_n = promote_poly(&self.num, n);
                let at = num_n.eval(&zeta.inverse().as_cyc(n).expect("order divides"));
                if !at.is_zero() {
                    break;
                }
                self.num = num_n
                    .div_one_minus_root_q(zeta, n)
                    .expect("root vanishes, division exact");
                if mult == 1 {
                    self.den.remove(&zeta);
                } else {
                    self.den.insert(zeta, mult - 1);
                }
            }
        }
        self
    }

    pub fn neg(&self) -> QRat {
        QRat {
            num: self.num.neg(),
            den: self.den.clone(),
            qpow: self.qpow,
        }
    }

    pub fn scale(&self, v: &Cyc) -> QRat {
        if v.is_zero() {
            return QRat::zero();
        }
        QRat {
            num: self.num.scale(v),
            den: self.den.clone(),
            qpow: self.qpow,
        }
    }

    pub fn scale_rat(&self, r: &BigRational) -> QRat {
        self.scale(&Cyc::from_rat(r.clone()))
    }

    pub fn add(&self, other: &QRat) -> QRat {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        // union denominator
        let mut den = self.den.clone();
        for (z, &m) in &other.den {
            let e = den.entry(*z).or_insert(0);
            *e = (*e).max(m);
        }
        let qpow = self.qpow.max(other.qpow);
        let n = {
            let mut n = lcm(self.conductor() as u64, other.conductor() as u64) as u32;
            for z in den.keys() {
                n = lcm(n as u64, z.order as u64) as u32;
            }
            n
        };
        let lift = |f: &QRat| -> Poly {
            let mut p = promote_poly(&f.num, n);
            p = p.shift(qpow - f.qpow);
            for (z, &m) in &den {
                let have = f.den.get(z).copied().unwrap_or(0);
                if m > have {
                    let factor = Poly::one_minus_root_q(*z, n).expect("conductor ok");
                    for _ in 0..m - have {
                        p = p.mul(&factor);
                    }
                }
            }
            p
        };
        let num = lift(self).add(&lift(other));
        QRat { num, den, qpow }.reduced()
    }

    pub fn sub(&self, other: &QRat) -> QRat {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &QRat) -> QRat {
        if self.is_zero() || other.is_zero() {
            return QRat::zero();
        }
        let n = lcm(self.conductor() as u64, other.conductor() as u64) as u32;
        let num = promote_poly(&self.num, n).mul(&promote_poly(&other.num, n));
        let mut den = self.den.clone();
        for (z, &m) in &other.den {
            *den.entry(*z).or_insert(0) += m;
        }
        QRat {
            num,
            den,
            qpow: self.qpow + other.qpow,
        }
        .reduced()
    }

    pub fn mul_poly(&self, p: &Poly) -> QRat {
        self.mul(&QRat::poly(p.clone()))
    }

    /// Reciprocal, available when the numerator factors as
    /// `c q^a prod (1 - zeta q)^m` with root orders up to `max_order`.
    pub fn reciprocal(&self, max_order: u32) -> Result<QRat> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut rem = self.num.clone();
        let mut qshift = 0usize;
        while rem.coeff(0).is_zero() {
            let mut c = rem.c.clone();
            c.remove(0);
            rem = Poly::from_coeffs(c);
            qshift += 1;
        }
        let mut factors: Vec<(Root, usize)> = Vec::new();
        'outer: while rem.degree().unwrap_or(0) > 0 {
            for order in 1..=max_order {
                for zeta in Root::primitive_of_order(order) {
                    let n = lcm(poly_conductor(&rem) as u64, order as u64) as u32;
                    let remn = promote_poly(&rem, n);
                    let at = remn.eval(&zeta.inverse().as_cyc(n)?);
                    if at.is_zero() {
                        rem = remn.div_one_minus_root_q(zeta, n)?;
                        factors.push((zeta, 1));
                        continue 'outer;
                    }
                }
            }
            return Err(Error::NotAUnit(format!(
                "numerator has non-cyclotomic factor: {}",
                rem
            )));
        }
        let c = rem.coeff(0);
        let cinv = c.inv()?;
        // 1/self = den / num = q^qpow prod_den / (c q^qshift prod factors)
        let mut out = QRat {
            num: Poly::constant(cinv),
            den: BTreeMap::new(),
            qpow: qshift,
        };
        for (z, m) in factors {
            *out.den.entry(z).or_insert(0) += m;
        }
        // numerator gains the old denominator
        let n = {
            let mut n = out.conductor();
            for z in self.den.keys() {
                n = lcm(n as u64, z.order as u64) as u32;
            }
            n
        };
        let mut num = promote_poly(&out.num, n).shift(self.qpow);
        for (z, &m) in &self.den {
            let f = Poly::one_minus_root_q(*z, n)?;
            for _ in 0..m {
                num = num.mul(&f);
            }
        }
        out.num = num;
        Ok(out.reduced())
    }

    /// Exact partial fraction decomposition.
    pub fn partial_fraction(&self) -> Result<PartialFraction> {
        let mut lpoly: LPoly = BTreeMap::new();
        let mut parts: BTreeMap<(Root, usize), Cyc> = BTreeMap::new();
        let mut f = self.clone().reduced();

        // principal part at q = 0
        if f.qpow > 0 {
            let e = f.qpow;
            // series of num / prod(1 - zeta q)^m through q^{e-1}
            let n = f.conductor();
            let mut den_poly = Poly::one();
            for (z, &m) in &f.den {
                let fac = Poly::one_minus_root_q(*z, n)?;
                for _ in 0..m {
                    den_poly = den_poly.mul(&fac);
                }
            }
            let inv = den_poly.series_inverse(e - 1)?;
            let ser = promote_poly(&f.num, n).mul(&inv).truncate(e - 1);
            let mut principal = QRat::zero();
            for j in 0..e {
                let c = ser.coeff(j);
                if c.is_zero() {
                    continue;
                }
                lpoly.insert(j as i64 - e as i64, c.clone());
                principal = principal.add(&QRat::q_pow(j as i64 - e as i64).scale(&c));
            }
            f = f.sub(&principal);
            debug_assert_eq!(f.qpow, 0, "principal part at 0 must cancel exactly");
            if f.qpow != 0 {
                return Err(Error::PoleAtZero);
            }
        }

        // poles at roots of unity, peeled from the top multiplicity down
        loop {
            let Some((&zeta, &m)) = f.den.iter().next() else {
                break;
            };
            let n = {
                let mut n = f.conductor();
                for z in f.den.keys() {
                    n = lcm(n as u64, z.order as u64) as u32;
                }
                n
            };
            // rest = den / (1 - zeta q)^m as a polynomial
            let mut rest = Poly::one();
            for (z, &k) in &f.den {
                if *z == zeta {
                    continue;
                }
                let fac = Poly::one_minus_root_q(*z, n)?;
                for _ in 0..k {
                    rest = rest.mul(&fac);
                }
            }
            let at = zeta.inverse().as_cyc(n)?;
            let c = promote_poly(&f.num, n)
                .eval(&at)
                .mul(&rest.eval(&at).inv()?);
            if !c.is_zero() {
                parts.insert((zeta, m), c.clone());
            }
            let term = QRat {
                num: Poly::constant(c),
                den: BTreeMap::from([(zeta, m)]),
                qpow: 0,
            };
            let next = f.sub(&term);
            debug_assert!(next.pole_order_at(zeta) < m);
            f = next;
        }

        // leftover Laurent polynomial
        debug_assert_eq!(f.qpow, 0);
        for (k, c) in f.num.c.iter().enumerate() {
            if !c.is_zero() {
                let e = lpoly.entry(k as i64).or_insert_with(Cyc::zero);
                *e = e.add(c);
            }
        }
        lpoly.retain(|_, c| !c.is_zero());
        Ok(PartialFraction { lpoly, parts })
    }

    /// The Laurent-polynomial component of the polarization: partial
    /// fractions with every proper `(1 - zeta q)^{-m}` term dropped.
    pub fn pi_plus(&self) -> Result<QRat> {
        let pf = self.partial_fraction()?;
        let mut acc = QRat::zero();
        for (&k, c) in &pf.lpoly {
            acc = acc.add(&QRat::q_pow(k).scale(c));
        }
        Ok(acc)
    }

    /// Power-series coefficients at `q = 0` through order `k` (requires no
    /// pole at 0).  Coefficients come back as cyclotomic numbers.
    pub fn series_at_zero(&self, k: usize) -> Result<Vec<Cyc>> {
        if self.qpow > 0 {
            return Err(Error::PoleAtZero);
        }
        let n = self.conductor();
        let mut den_poly = Poly::one();
        for (z, &m) in &self.den {
            let fac = Poly::one_minus_root_q(*z, n)?;
            for _ in 0..m {
                den_poly = den_poly.mul(&fac);
            }
        }
        let inv = den_poly.series_inverse(k)?;
        let ser = promote_poly(&self.num, n).mul(&inv);
        Ok((0..=k).map(|j| ser.coeff(j)).collect())
    }
}

impl PartialEq for QRat {
    fn eq(&self, other: &QRat) -> bool {
        self.sub(other).is_zero()
    }
}
impl Eq for QRat {}

impl fmt::Display for QRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.num)?;
        if self.qpow > 0 {
            write!(f, "/q^{}", self.qpow)?;
        }
        for (z, m) in &self.den {
            write!(f, "/(1-{}q)^{}", z, m)?;
        }
        Ok(())
    }
}

pub fn poly_conductor(p: &Poly) -> u32 {
    let mut n = 1u64;
    for c in &p.c {
        n = lcm(n, c.conductor() as u64);
    }
    n as u32
}

/// Promote all non-rational coefficients to conductor `n` (rationals embed on
/// demand inside the cyclotomic arithmetic).
pub fn promote_poly(p: &Poly, n: u32) -> Poly {
    Poly::from_coeffs(
        p.c.iter()
            .map(|c| {
                if c.is_rational() {
                    c.clone()
                } else {
                    c.promote(n).expect("conductor divides target")
                }
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_i64};

    #[test]
    fn basic_arithmetic() {
        // 1/(1-q) + 1/(1+q) = 2/(1-q^2)
        let a = QRat::inv_one_minus_qr(1, 1);
        let b = QRat {
            num: Poly::one(),
            den: BTreeMap::from([(Root::new(2, 1), 1)]),
            qpow: 0,
        };
        let s = a.add(&b);
        let want = QRat::inv_one_minus_qr(2, 1).scale(&Cyc::from_i64(2));
        assert_eq!(s, want);
    }

    #[test]
    fn reduction_cancels() {
        // (1 - q^2)/(1 - q) = 1 + q
        let f = QRat::one_minus_qr(2).mul(&QRat::inv_one_minus_qr(1, 1));
        assert_eq!(f, QRat::poly(Poly::from_rats(vec![rat_i64(1), rat_i64(1)])));
    }

    #[test]
    fn partial_fraction_resummation_order_one() {
        // 1/(1 - q^r) = sum_{k | r} sum_{zeta prim k-th} 1/(r (1 - zeta q))
        for r in 1..=8u32 {
            let pf = QRat::inv_one_minus_qr(r, 1).partial_fraction().unwrap();
            assert!(pf.lpoly.is_empty());
            for zeta in Root::all_of_order_dividing(r) {
                assert_eq!(
                    pf.coeff(zeta, 1),
                    Cyc::from_rat(rat(1, r as i64)),
                    "r={} zeta={}",
                    r,
                    zeta
                );
            }
        }
    }

    #[test]
    fn partial_fraction_recombines() {
        let f = QRat::inv_one_minus_qr(6, 2)
            .mul(&QRat::poly(Poly::from_rats(vec![rat_i64(3), rat_i64(0), rat_i64(-1)])))
            .add(&QRat::q_pow(-2))
            .add(&QRat::q_pow(3));
        let pf = f.partial_fraction().unwrap();
        assert_eq!(pf.recombine(), f);
    }

    #[test]
    fn pole_at_zero_principal_part() {
        // (1 + q)/q^2 -> q^{-2} + q^{-1}
        let f = QRat {
            num: Poly::from_rats(vec![rat_i64(1), rat_i64(1)]),
            den: BTreeMap::new(),
            qpow: 2,
        };
        let pf = f.partial_fraction().unwrap();
        assert_eq!(pf.lpoly.get(&-2), Some(&Cyc::one()));
        assert_eq!(pf.lpoly.get(&-1), Some(&Cyc::one()));
        assert!(pf.parts.is_empty());
    }

    #[test]
    fn pi_plus_examples() {
        // pi_plus(q^3/(1-q)) = -(q + q^2 + q^3): indeed q^3/(1-q) =
        // 1/(1-q) - 1 - q - q^2 ... check directly against the identity
        // q^3/(1-q) + (1 + q + q^2) = 1/(1-q).
        let f = QRat::q_pow(3).mul(&QRat::inv_one_minus_qr(1, 1));
        let plus = f.pi_plus().unwrap();
        let minus = f.sub(&plus);
        assert_eq!(minus, QRat::inv_one_minus_qr(1, 1));
        // pi_plus of a Laurent polynomial is itself
        let g = QRat::q_pow(-3).add(&QRat::q_pow(2));
        assert_eq!(g.pi_plus().unwrap(), g);
    }

    #[test]
    fn reciprocal_of_unit() {
        // q^2 (1 - q^3) is invertible with cyclotomic factors
        let f = QRat::one_minus_qr(3).mul(&QRat::q_pow(2));
        let inv = f.reciprocal(3).unwrap();
        assert_eq!(f.mul(&inv), QRat::one());
        // 1 + q + q^2 + q^3 = (1-q^4)/(1-q) also factors
        let g = QRat::poly(Poly::from_rats(vec![
            rat_i64(1),
            rat_i64(1),
            rat_i64(1),
            rat_i64(1),
        ]));
        let ginv = g.reciprocal(4).unwrap();
        assert_eq!(g.mul(&ginv), QRat::one());
    }

    #[test]
    fn series_at_zero_matches_geometric() {
        let f = QRat::inv_one_minus_qr(1, 2); // 1/(1-q)^2 = sum (k+1) q^k
        let c = f.series_at_zero(4).unwrap();
        for (k, v) in c.iter().enumerate() {
            assert_eq!(v.as_rational().unwrap(), rat_i64(k as i64 + 1));
        }
    }
}
