//! Dense univariate polynomials in `q` over the cyclotomic numbers.

use crate::cyclotomic::{Cyc, Root};
use crate::{Error, Result};
use num::BigRational;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    /// Coefficients, constant term first; kept trimmed.
    pub c: Vec<Cyc>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { c: vec![] }
    }

    pub fn one() -> Poly {
        Poly { c: vec![Cyc::one()] }
    }

    pub fn constant(v: Cyc) -> Poly {
        Poly { c: vec![v] }.trimmed()
    }

    pub fn from_coeffs(c: Vec<Cyc>) -> Poly {
        Poly { c }.trimmed()
    }

    pub fn from_rats(c: Vec<BigRational>) -> Poly {
        Poly {
            c: c.into_iter().map(Cyc::from_rat).collect(),
        }
        .trimmed()
    }

    /// `q^k`.
    pub fn q_pow(k: usize) -> Poly {
        let mut c = vec![Cyc::zero(); k + 1];
        c[k] = Cyc::one();
        Poly { c }
    }

    /// `1 - zeta q` for a labelled root.
    pub fn one_minus_root_q(zeta: Root, conductor: u32) -> Result<Poly> {
        let z = zeta.as_cyc(conductor)?;
        Ok(Poly {
            c: vec![Cyc::one(), z.neg()],
        })
    }

    fn trimmed(mut self) -> Poly {
        while let Some(last) = self.c.last() {
            if last.is_zero() {
                self.c.pop();
            } else {
                break;
            }
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn coeff(&self, k: usize) -> Cyc {
        self.c.get(k).cloned().unwrap_or_else(Cyc::zero)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.c.len().max(other.c.len());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            c.push(self.coeff(i).add(&other.coeff(i)));
        }
        Poly { c }.trimmed()
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            c: self.c.iter().map(|x| x.neg()).collect(),
        }
    }

    pub fn scale(&self, v: &Cyc) -> Poly {
        Poly {
            c: self.c.iter().map(|x| x.mul(v)).collect(),
        }
        .trimmed()
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Cyc::zero(); self.c.len() + other.c.len() - 1];
        for (i, x) in self.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.c.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                c[i + j] = c[i + j].add(&x.mul(y));
            }
        }
        Poly { c }.trimmed()
    }

    /// Multiply by `q^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Cyc::zero(); k];
        c.extend(self.c.iter().cloned());
        Poly { c }
    }

    pub fn eval(&self, x: &Cyc) -> Cyc {
        let mut acc = Cyc::zero();
        for coeff in self.c.iter().rev() {
            acc = acc.mul(x).add(coeff);
        }
        acc
    }

    /// Exact division by `1 - zeta q`; fails when the root is not a zero.
    pub fn div_one_minus_root_q(&self, zeta: Root, conductor: u32) -> Result<Poly> {
        if self.is_zero() {
            return Ok(Poly::zero());
        }
        let z = zeta.as_cyc(conductor)?;
        // write p = (1 - z q) s: comparing coefficients,
        // p_k = s_k - z s_{k-1}, so s_k = p_k + z s_{k-1}; the final carry is
        // the remainder and must vanish.
        let n = self.c.len();
        let mut s = vec![Cyc::zero(); n - 1];
        let mut prev = Cyc::zero();
        for k in 0..n - 1 {
            let v = self.coeff(k).add(&prev.mul(&z));
            s[k] = v.clone();
            prev = v;
        }
        let rem = self.coeff(n - 1).add(&prev.mul(&z));
        if !rem.is_zero() {
            return Err(Error::InvalidInput(format!(
                "polynomial not divisible by 1 - {} q",
                zeta
            )));
        }
        Ok(Poly { c: s }.trimmed())
    }

    /// Truncated reciprocal: the power series `1/self` through `q^order`,
    /// requiring an invertible constant term.
    pub fn series_inverse(&self, order: usize) -> Result<Poly> {
        let c0 = self.coeff(0);
        if c0.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let c0inv = c0.inv()?;
        let mut inv = vec![Cyc::zero(); order + 1];
        inv[0] = c0inv.clone();
        for k in 1..=order {
            let mut acc = Cyc::zero();
            for j in 1..=k {
                let a = self.coeff(j);
                if a.is_zero() {
                    continue;
                }
                acc = acc.add(&a.mul(&inv[k - j]));
            }
            inv[k] = acc.neg().mul(&c0inv);
        }
        Ok(Poly { c: inv }.trimmed())
    }

    /// Truncate beyond `q^order`.
    pub fn truncate(&self, order: usize) -> Poly {
        Poly {
            c: self.c.iter().take(order + 1).cloned().collect(),
        }
        .trimmed()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
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
            match i {
                0 => write!(f, "({})", ci)?,
                1 => write!(f, "({})*q", ci)?,
                _ => write!(f, "({})*q^{}", ci, i)?,
            }
        }
        Ok(())
    }
}
