//! Formal series infrastructure: curve-class (Novikov) series truncated by
//! total degree, and multivariate polynomials in the divisor parameters
//! `t_1, .., t_n` truncated by total degree.

use crate::cyclotomic::Cyc;
use crate::laurent::Laurent;
use crate::qrat::QRat;
use num::{BigRational, One, Zero};
use std::collections::BTreeMap;

/// Minimal commutative-ring interface shared by all coefficient types.
pub trait Ring: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
}

/// Scalar action of `Q`, used by exponentials and Adams rescalings.
pub trait ScaleRat {
    fn scale_rat(&self, r: &BigRational) -> Self;
}

impl Ring for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
}

impl ScaleRat for BigRational {
    fn scale_rat(&self, r: &BigRational) -> Self {
        self * r
    }
}

impl Ring for Cyc {
    fn zero() -> Self {
        Cyc::zero()
    }
    fn one() -> Self {
        Cyc::one()
    }
    fn is_zero(&self) -> bool {
        Cyc::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        Cyc::add(self, other)
    }
    fn neg(&self) -> Self {
        Cyc::neg(self)
    }
    fn mul(&self, other: &Self) -> Self {
        Cyc::mul(self, other)
    }
}

impl ScaleRat for Cyc {
    fn scale_rat(&self, r: &BigRational) -> Self {
        self.scale(r)
    }
}

impl Ring for QRat {
    fn zero() -> Self {
        QRat::zero()
    }
    fn one() -> Self {
        QRat::one()
    }
    fn is_zero(&self) -> bool {
        QRat::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        QRat::add(self, other)
    }
    fn neg(&self) -> Self {
        QRat::neg(self)
    }
    fn mul(&self, other: &Self) -> Self {
        QRat::mul(self, other)
    }
}

impl ScaleRat for QRat {
    fn scale_rat(&self, r: &BigRational) -> Self {
        QRat::scale_rat(self, r)
    }
}

impl Ring for Laurent {
    fn zero() -> Self {
        Laurent::zero()
    }
    fn one() -> Self {
        Laurent::one()
    }
    fn is_zero(&self) -> bool {
        Laurent::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        Laurent::add(self, other)
    }
    fn neg(&self) -> Self {
        Laurent::neg(self)
    }
    fn mul(&self, other: &Self) -> Self {
        Laurent::mul(self, other)
    }
}

impl ScaleRat for Laurent {
    fn scale_rat(&self, r: &BigRational) -> Self {
        self.scale(&Cyc::from_rat(r.clone()))
    }
}

// ---------------------------------------------------------------------------
// curve classes

/// An effective curve class: non-negative integer coordinates against a
/// fixed basis of divisor duals.
pub type Class = Vec<u32>;

pub fn class_deg(beta: &Class) -> u32 {
    beta.iter().sum()
}

pub fn class_is_zero(beta: &Class) -> bool {
    beta.iter().all(|&x| x == 0)
}

/// Divisibility index: the gcd of the coordinates (0 for the zero class).
pub fn class_ind(beta: &Class) -> u32 {
    beta.iter()
        .fold(0u32, |g, &x| crate::arith::gcd(g as u64, x as u64) as u32)
}

pub fn class_scale(beta: &Class, k: u32) -> Class {
    beta.iter().map(|&x| x * k).collect()
}

/// Exact division by `k`, when every coordinate is divisible.
pub fn class_div(beta: &Class, k: u32) -> Option<Class> {
    if k == 0 {
        return None;
    }
    if beta.iter().all(|&x| x % k == 0) {
        Some(beta.iter().map(|&x| x / k).collect())
    } else {
        None
    }
}

/// All effective nonzero classes of total degree at most `cap`.
pub fn classes_up_to(rank: usize, cap: u32) -> Vec<Class> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; rank];
    fn rec(i: usize, left: u32, cur: &mut Class, out: &mut Vec<Class>) {
        if i == cur.len() {
            if !class_is_zero(cur) {
                out.push(cur.clone());
            }
            return;
        }
        for v in 0..=left {
            cur[i] = v;
            rec(i + 1, left - v, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, cap, &mut cur, &mut out);
    out.sort_by_key(|b| (class_deg(b), b.clone()));
    out
}

// ---------------------------------------------------------------------------
// t-polynomials

/// Multivariate polynomial in `t_1 .. t_n`, truncated by total degree when a
/// cap is applied.
#[derive(Clone, Debug, PartialEq)]
pub struct TPoly<R> {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<u32>, R>,
}

impl<R: Ring> TPoly<R> {
    pub fn new(nvars: usize) -> TPoly<R> {
        TPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, v: R) -> TPoly<R> {
        let mut t = TPoly::new(nvars);
        if !v.is_zero() {
            t.terms.insert(vec![0; nvars], v);
        }
        t
    }

    pub fn var(nvars: usize, i: usize) -> TPoly<R> {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut t = TPoly::new(nvars);
        t.terms.insert(e, R::one());
        t
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|v| v.is_zero())
    }

    pub fn coeff(&self, e: &[u32]) -> R {
        self.terms.get(e).cloned().unwrap_or_else(R::zero)
    }

    pub fn constant_term(&self) -> R {
        self.coeff(&vec![0; self.nvars])
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(e, _)| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    fn cleaned(mut self) -> TPoly<R> {
        self.terms.retain(|_, v| !v.is_zero());
        self
    }

    pub fn add(&self, other: &TPoly<R>) -> TPoly<R> {
        if self.nvars != other.nvars {
            let (a, b) = pad_pair(self, other);
            return a.add(&b);
        }
        let mut out = self.clone();
        for (e, v) in &other.terms {
            let entry = out.terms.entry(e.clone()).or_insert_with(R::zero);
            *entry = entry.add(v);
        }
        out.cleaned()
    }

    pub fn neg(&self) -> TPoly<R> {
        TPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &TPoly<R>) -> TPoly<R> {
        self.add(&other.neg())
    }

    pub fn scale(&self, v: &R) -> TPoly<R> {
        TPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c.mul(v)))
                .collect(),
        }
        .cleaned()
    }

    /// Product truncated to total degree `cap` (`None` for no cap).
    pub fn mul_trunc(&self, other: &TPoly<R>, cap: Option<u32>) -> TPoly<R> {
        if self.nvars != other.nvars {
            let (a, b) = pad_pair(self, other);
            return a.mul_trunc(&b, cap);
        }
        let mut out = TPoly::new(self.nvars);
        for (ea, va) in &self.terms {
            if va.is_zero() {
                continue;
            }
            let da: u32 = ea.iter().sum();
            for (eb, vb) in &other.terms {
                if vb.is_zero() {
                    continue;
                }
                let db: u32 = eb.iter().sum();
                if let Some(c) = cap {
                    if da + db > c {
                        continue;
                    }
                }
                let e: Vec<u32> = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                let entry = out.terms.entry(e).or_insert_with(R::zero);
                *entry = entry.add(&va.mul(vb));
            }
        }
        out.cleaned()
    }

    pub fn truncate_deg(&self, cap: u32) -> TPoly<R> {
        TPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() <= cap)
                .map(|(e, v)| (e.clone(), v.clone()))
                .collect(),
        }
    }

    pub fn map<S: Ring>(&self, mut f: impl FnMut(&R) -> S) -> TPoly<S> {
        TPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), f(v))).collect(),
        }
        .cleaned()
    }
}

impl<R: Ring + ScaleRat> TPoly<R> {
    /// `exp(self)` truncated to total degree `cap`; the constant term must
    /// vanish.
    pub fn t_exp(&self, cap: u32) -> TPoly<R> {
        assert!(
            self.constant_term().is_zero(),
            "t_exp needs vanishing constant term"
        );
        let x = self.truncate_deg(cap);
        let mut acc = TPoly::constant(self.nvars, R::one());
        let mut pw = TPoly::constant(self.nvars, R::one());
        let mut kfact: BigRational = One::one();
        for k in 1..=cap as u64 {
            pw = pw.mul_trunc(&x, Some(cap));
            if pw.is_zero() {
                break;
            }
            kfact = kfact * BigRational::from_integer(k.into());
            let inv: BigRational = <BigRational as One>::one() / kfact.clone();
            acc = acc.add(&pw.map(|v| v.scale_rat(&inv)));
        }
        acc
    }
}

impl<R: Ring> Ring for TPoly<R> {
    fn zero() -> Self {
        TPoly::new(0)
    }
    fn one() -> Self {
        TPoly::constant(0, R::one())
    }
    fn is_zero(&self) -> bool {
        TPoly::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        let (a, b) = pad_pair(self, other);
        TPoly::add(&a, &b)
    }
    fn neg(&self) -> Self {
        TPoly::neg(self)
    }
    fn mul(&self, other: &Self) -> Self {
        let (a, b) = pad_pair(self, other);
        TPoly::mul_trunc(&a, &b, None)
    }
}

/// Align variable counts (zero-variable polynomials act as scalars).
fn pad_pair<R: Ring>(a: &TPoly<R>, b: &TPoly<R>) -> (TPoly<R>, TPoly<R>) {
    let n = a.nvars.max(b.nvars);
    (a.padded(n), b.padded(n))
}

impl<R: Ring> TPoly<R> {
    pub fn padded(&self, n: usize) -> TPoly<R> {
        assert!(n >= self.nvars);
        if n == self.nvars {
            return self.clone();
        }
        TPoly {
            nvars: n,
            terms: self
                .terms
                .iter()
                .map(|(e, v)| {
                    let mut e2 = e.clone();
                    e2.resize(n, 0);
                    (e2, v.clone())
                })
                .collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Novikov series

/// Series over curve classes, truncated at total degree `cutoff`.
#[derive(Clone, Debug, PartialEq)]
pub struct NovikovSeries<R> {
    pub rank: usize,
    pub cutoff: u32,
    pub terms: BTreeMap<Class, R>,
}

impl<R: Ring> NovikovSeries<R> {
    pub fn new(rank: usize, cutoff: u32) -> NovikovSeries<R> {
        NovikovSeries {
            rank,
            cutoff,
            terms: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, beta: Class, v: R) {
        assert_eq!(beta.len(), self.rank);
        if class_deg(&beta) > self.cutoff || v.is_zero() {
            return;
        }
        let entry = self.terms.entry(beta).or_insert_with(R::zero);
        *entry = entry.add(&v);
        if entry.is_zero() {
            // keep the map clean
        }
    }

    pub fn coeff(&self, beta: &Class) -> R {
        self.terms.get(beta).cloned().unwrap_or_else(R::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|v| v.is_zero())
    }

    pub fn add(&self, other: &NovikovSeries<R>) -> NovikovSeries<R> {
        assert_eq!(self.rank, other.rank);
        let mut out = NovikovSeries::new(self.rank, self.cutoff.min(other.cutoff));
        for (b, v) in self.terms.iter().chain(other.terms.iter()) {
            out.insert(b.clone(), v.clone());
        }
        out
    }

    pub fn neg(&self) -> NovikovSeries<R> {
        NovikovSeries {
            rank: self.rank,
            cutoff: self.cutoff,
            terms: self.terms.iter().map(|(b, v)| (b.clone(), v.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &NovikovSeries<R>) -> NovikovSeries<R> {
        self.add(&other.neg())
    }

    /// Product with total-degree truncation at the smaller cutoff.
    pub fn nov_mul(&self, other: &NovikovSeries<R>) -> NovikovSeries<R> {
        assert_eq!(self.rank, other.rank);
        let cutoff = self.cutoff.min(other.cutoff);
        let mut out = NovikovSeries::new(self.rank, cutoff);
        for (ba, va) in &self.terms {
            if va.is_zero() {
                continue;
            }
            for (bb, vb) in &other.terms {
                if vb.is_zero() {
                    continue;
                }
                let b: Class = ba.iter().zip(bb.iter()).map(|(x, y)| x + y).collect();
                if class_deg(&b) > cutoff {
                    continue;
                }
                out.insert(b, va.mul(vb));
            }
        }
        out
    }

    pub fn map<S: Ring>(&self, mut f: impl FnMut(&Class, &R) -> S) -> NovikovSeries<S> {
        let mut out = NovikovSeries::new(self.rank, self.cutoff);
        for (b, v) in &self.terms {
            out.insert(b.clone(), f(b, v));
        }
        out
    }

    /// Adams pushforward on classes: `Q^beta -> Q^{k beta}`, dropping terms
    /// past the cutoff.  Coefficient transforms are the caller's business
    /// (compose with [`NovikovSeries::map`]).
    pub fn adams_novikov(&self, k: u32) -> NovikovSeries<R> {
        assert!(k >= 1);
        let mut out = NovikovSeries::new(self.rank, self.cutoff);
        for (b, v) in &self.terms {
            out.insert(class_scale(b, k), v.clone());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_i64};

    #[test]
    fn class_helpers() {
        assert_eq!(class_ind(&vec![4, 6]), 2);
        assert_eq!(class_ind(&vec![0, 5]), 5);
        assert_eq!(class_ind(&vec![0, 0]), 0);
        assert_eq!(class_div(&vec![4, 6], 2), Some(vec![2, 3]));
        assert_eq!(class_div(&vec![4, 6], 4), None);
        let cs = classes_up_to(2, 2);
        assert_eq!(cs.len(), 5); // (0,1),(1,0),(0,2),(1,1),(2,0)
    }

    #[test]
    fn t_exp_linear_form() {
        // exp(t1 + 2 t2) through degree 2
        let lin = TPoly::<BigRational>::var(2, 0)
            .add(&TPoly::var(2, 1).scale(&rat_i64(2)));
        let e = lin.t_exp(2);
        assert_eq!(e.coeff(&[0, 0]), rat_i64(1));
        assert_eq!(e.coeff(&[1, 0]), rat_i64(1));
        assert_eq!(e.coeff(&[0, 1]), rat_i64(2));
        assert_eq!(e.coeff(&[2, 0]), rat(1, 2));
        assert_eq!(e.coeff(&[1, 1]), rat_i64(2));
        assert_eq!(e.coeff(&[0, 2]), rat_i64(2));
        assert_eq!(e.coeff(&[1, 2]), rat_i64(0)); // truncated away
    }

    #[test]
    fn t_exp_multiplies() {
        let a = TPoly::<BigRational>::var(1, 0);
        let b = a.scale(&rat_i64(3));
        let cap = 4;
        let lhs = a.add(&b).t_exp(cap);
        let rhs = a.t_exp(cap).mul_trunc(&b.t_exp(cap), Some(cap));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn nov_mul_truncates() {
        let mut a = NovikovSeries::<BigRational>::new(1, 3);
        a.insert(vec![0], rat_i64(1));
        a.insert(vec![2], rat_i64(5));
        let mut b = NovikovSeries::<BigRational>::new(1, 3);
        b.insert(vec![1], rat_i64(1));
        b.insert(vec![2], rat_i64(7));
        let p = a.nov_mul(&b);
        assert_eq!(p.coeff(&vec![1]), rat_i64(1));
        assert_eq!(p.coeff(&vec![2]), rat_i64(7));
        assert_eq!(p.coeff(&vec![3]), rat_i64(5));
        // degree 4 term 5*7 dropped by the cutoff
        assert_eq!(p.coeff(&vec![4]), rat_i64(0));
    }

    #[test]
    fn adams_moves_classes() {
        let mut a = NovikovSeries::<BigRational>::new(2, 4);
        a.insert(vec![1, 0], rat_i64(1));
        a.insert(vec![1, 1], rat_i64(2));
        a.insert(vec![2, 1], rat_i64(3));
        let b = a.adams_novikov(2);
        assert_eq!(b.coeff(&vec![2, 0]), rat_i64(1));
        assert_eq!(b.coeff(&vec![2, 2]), rat_i64(2));
        // 2*(2,1) has degree 6 > cutoff: dropped
        assert_eq!(b.coeff(&vec![4, 2]), rat_i64(0));
    }
}
