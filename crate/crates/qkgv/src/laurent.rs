//! Truncated Laurent expansions of q-rational functions around a root of
//! unity: series in `s = 1 - zeta q` with finitely many negative powers.

use crate::arith::{binomial, lcm};
use crate::cyclotomic::{Cyc, Root};
use crate::poly::Poly;
use crate::qrat::{poly_conductor, promote_poly, QRat};
use crate::{Error, Result};
use std::fmt;

/// Saturation bound standing in for "exact, untruncated".
pub const EXACT: i64 = i64::MAX / 4;

/// Series `sum_k c_k (1 - zeta q)^k`, `k` from `lo`, known through `s^hi`.
#[derive(Clone, Debug)]
pub struct Laurent {
    pub center: Root,
    pub lo: i64,
    /// Coefficient of `s^{lo + i}`.
    pub c: Vec<Cyc>,
    /// Truncation order (coefficients beyond `s^hi` are unknown); `EXACT`
    /// for genuinely polynomial data.
    pub hi: i64,
}

impl Laurent {
    pub fn zero() -> Laurent {
        Laurent {
            center: Root::one(),
            lo: 0,
            c: vec![],
            hi: EXACT,
        }
    }

    pub fn scalar(v: Cyc) -> Laurent {
        if v.is_zero() {
            return Laurent::zero();
        }
        Laurent {
            center: Root::one(),
            lo: 0,
            c: vec![v],
            hi: EXACT,
        }
    }

    pub fn one() -> Laurent {
        Laurent::scalar(Cyc::one())
    }

    /// A scalar has no intrinsic center.
    pub fn is_scalar(&self) -> bool {
        self.c.is_empty() || (self.lo == 0 && self.c.len() == 1 && self.hi >= EXACT)
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    /// `(1 - zeta q)^k` as an exact one-term series.
    pub fn s_pow(center: Root, k: i64) -> Laurent {
        Laurent {
            center,
            lo: k,
            c: vec![Cyc::one()],
            hi: EXACT,
        }
    }

    /// Reinterpret the same coefficient data as a series in `1 - zeta' q`
    /// (used when recentring a series in `1 - zeta q` via `q -> zeta^{-1} q`,
    /// which maps `(1 - zeta q)^k` to `(1 - q)^k` coefficient-for-coefficient).
    pub fn relabel_center(&self, center: Root) -> Laurent {
        let mut out = self.clone();
        out.center = center;
        out
    }

    pub fn coeff(&self, k: i64) -> Cyc {
        if k < self.lo || k > self.hi {
            return Cyc::zero();
        }
        let i = (k - self.lo) as usize;
        self.c.get(i).cloned().unwrap_or_else(Cyc::zero)
    }

    fn merged_center(&self, other: &Laurent) -> Root {
        if self.is_scalar() {
            other.center
        } else if other.is_scalar() {
            self.center
        } else {
            assert_eq!(self.center, other.center, "laurent center mismatch");
            self.center
        }
    }

    fn trimmed(mut self) -> Laurent {
        while let Some(first) = self.c.first() {
            if first.is_zero() {
                self.c.remove(0);
                self.lo += 1;
            } else {
                break;
            }
        }
        while let Some(last) = self.c.last() {
            if last.is_zero() {
                self.c.pop();
            } else {
                break;
            }
        }
        if self.c.is_empty() {
            self.lo = 0;
        }
        self
    }

    pub fn add(&self, other: &Laurent) -> Laurent {
        let center = self.merged_center(other);
        let hi = self.hi.min(other.hi);
        if self.c.is_empty() {
            let mut out = other.clone();
            out.center = center;
            out.hi = hi;
            return out.truncate(hi);
        }
        if other.c.is_empty() {
            let mut out = self.clone();
            out.center = center;
            out.hi = hi;
            return out.truncate(hi);
        }
        let lo = self.lo.min(other.lo);
        let top = (self.lo + self.c.len() as i64 - 1)
            .max(other.lo + other.c.len() as i64 - 1)
            .min(hi);
        if top < lo {
            return Laurent {
                center,
                lo: 0,
                c: vec![],
                hi,
            };
        }
        let mut c = Vec::with_capacity((top - lo + 1) as usize);
        for k in lo..=top {
            c.push(self.coeff(k).add(&other.coeff(k)));
        }
        Laurent { center, lo, c, hi }.trimmed()
    }

    pub fn neg(&self) -> Laurent {
        Laurent {
            center: self.center,
            lo: self.lo,
            c: self.c.iter().map(|x| x.neg()).collect(),
            hi: self.hi,
        }
    }

    pub fn sub(&self, other: &Laurent) -> Laurent {
        self.add(&other.neg())
    }

    pub fn scale(&self, v: &Cyc) -> Laurent {
        Laurent {
            center: self.center,
            lo: self.lo,
            c: self.c.iter().map(|x| x.mul(v)).collect(),
            hi: self.hi,
        }
        .trimmed()
    }

    pub fn mul(&self, other: &Laurent) -> Laurent {
        let center = self.merged_center(other);
        let hi = if self.hi >= EXACT && other.hi >= EXACT {
            EXACT
        } else {
            // product of something known mod s^{a.hi+1} with a series whose
            // lowest term is s^{b.lo}
            (self.hi.saturating_add(other.lo)).min(other.hi.saturating_add(self.lo))
        };
        if self.c.is_empty() || other.c.is_empty() {
            return Laurent {
                center,
                lo: 0,
                c: vec![],
                hi,
            };
        }
        let lo = self.lo + other.lo;
        let top = (self.lo + self.c.len() as i64 - 1 + other.lo + other.c.len() as i64 - 1).min(hi);
        if top < lo {
            return Laurent {
                center,
                lo: 0,
                c: vec![],
                hi,
            };
        }
        let mut c = vec![Cyc::zero(); (top - lo + 1) as usize];
        for (i, x) in self.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.c.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let k = self.lo + i as i64 + other.lo + j as i64;
                if k > top {
                    continue;
                }
                let idx = (k - lo) as usize;
                c[idx] = c[idx].add(&x.mul(y));
            }
        }
        Laurent { center, lo, c, hi }.trimmed()
    }

    pub fn truncate(&self, hi: i64) -> Laurent {
        let hi = hi.min(self.hi);
        let mut out = self.clone();
        out.hi = hi;
        let keep = (hi - self.lo + 1).max(0) as usize;
        out.c.truncate(keep);
        out.trimmed()
    }

    /// Drop all negative powers of `s` (the fake polarization projector on
    /// expansions at the center).
    pub fn drop_negative(&self) -> Laurent {
        if self.lo >= 0 {
            return self.clone();
        }
        let skip = (-self.lo) as usize;
        Laurent {
            center: self.center,
            lo: 0,
            c: self.c.iter().skip(skip).cloned().collect(),
            hi: self.hi,
        }
        .trimmed()
    }

    /// Only the negative powers of `s`.
    pub fn principal_part(&self) -> Laurent {
        if self.lo >= 0 {
            return Laurent {
                center: self.center,
                lo: 0,
                c: vec![],
                hi: self.hi,
            };
        }
        let keep = (-self.lo) as usize;
        Laurent {
            center: self.center,
            lo: self.lo,
            c: self.c.iter().take(keep).cloned().collect(),
            hi: self.hi,
        }
        .trimmed()
    }

    /// Equality on the shared known window.
    pub fn eq_up_to_truncation(&self, other: &Laurent) -> bool {
        self.sub(other).is_zero()
    }

    /// Substitute `s -> g(s)` for a series `g` with `g = O(s)`.  Requires
    /// `self.lo >= 0`.
    pub fn compose(&self, inner: &Laurent) -> Laurent {
        assert!(self.lo >= 0, "composition needs a regular outer series");
        assert!(inner.lo >= 1, "inner series must vanish at the center");
        let mut acc = Laurent::scalar(self.coeff(0));
        acc.hi = self.hi.min(inner.hi);
        let mut pw = Laurent::one();
        let top = self.lo + self.c.len() as i64 - 1;
        for k in 1..=top {
            pw = pw.mul(inner);
            let ck = self.coeff(k);
            if !ck.is_zero() {
                acc = acc.add(&pw.scale(&ck));
            }
        }
        acc.truncate(self.hi.min(inner.hi))
    }

    /// Evaluate at `s = 0` (the value at the center), failing on a pole.
    pub fn value_at_center(&self) -> Result<Cyc> {
        for k in self.lo..0 {
            if !self.coeff(k).is_zero() {
                return Err(Error::PoleOrder {
                    root_order: self.center.order,
                    order: (-self.lo) as usize,
                    bound: 0,
                });
            }
        }
        Ok(self.coeff(0))
    }
}

impl PartialEq for Laurent {
    fn eq(&self, other: &Laurent) -> bool {
        self.eq_up_to_truncation(other)
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            write!(f, "0")?;
        } else {
            let mut first = true;
            for (i, ci) in self.c.iter().enumerate() {
                if ci.is_zero() {
                    continue;
                }
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                write!(f, "({})*s^{}", ci, self.lo + i as i64)?;
            }
            if first {
                write!(f, "0")?;
            }
        }
        if self.hi < EXACT {
            write!(f, " + O(s^{})", self.hi + 1)?;
        }
        Ok(())
    }
}

impl QRat {
    /// Laurent expansion around `q = center^{-1}` in `s = 1 - center * q`,
    /// through `s^hi`.
    pub fn expand_at(&self, center: Root, hi: i64) -> Result<Laurent> {
        if self.is_zero() {
            let mut z = Laurent::zero();
            z.center = center;
            z.hi = hi;
            return Ok(z);
        }
        let m = self.pole_order_at(center) as i64;
        let mut n = self.conductor();
        n = lcm(n as u64, center.order as u64) as u32;
        for z in self.den.keys() {
            n = lcm(n as u64, z.order as u64) as u32;
        }
        let zinv = center.inverse().as_cyc(n)?;
        // substitute q = center^{-1} (1 - s) into a polynomial
        let subst = |p: &Poly| -> Poly {
            let pn = promote_poly(p, n);
            let deg = pn.degree().unwrap_or(0);
            let mut out = vec![Cyc::zero(); deg + 1];
            for (j, cj) in pn.c.iter().enumerate() {
                if cj.is_zero() {
                    continue;
                }
                // q^j = zinv^j (1 - s)^j
                let zj = zinv.pow(j as u32);
                for i in 0..=j {
                    let b = binomial(j as i64, i as u64)
                        * if i % 2 == 0 {
                            num::BigRational::from_integer(1.into())
                        } else {
                            num::BigRational::from_integer((-1).into())
                        };
                    out[i] = out[i].add(&cj.mul(&zj).scale(&b));
                }
            }
            Poly::from_coeffs(out)
        };
        // regular denominator factor: q^qpow * prod over other roots
        let mut reg = Poly::one();
        if self.qpow > 0 {
            reg = Poly::q_pow(self.qpow);
        }
        for (z, &k) in &self.den {
            if *z == center {
                continue;
            }
            let fac = Poly::one_minus_root_q(*z, n)?;
            for _ in 0..k {
                reg = reg.mul(&fac);
            }
        }
        let order = (hi + m).max(0) as usize;
        let num_s = subst(&self.num).truncate(order);
        let reg_s = subst(&reg);
        let inv = reg_s.series_inverse(order)?;
        let ser = num_s.mul(&inv).truncate(order);
        let c: Vec<Cyc> = (0..=order).map(|i| ser.coeff(i)).collect();
        Ok(Laurent {
            center,
            lo: -m,
            c,
            hi,
        }
        .trimmed())
    }

    /// Fake polarization projector: expand at the center and drop negative
    /// powers of `1 - center * q`.
    pub fn pi_plus_fake(&self, center: Root, hi: i64) -> Result<Laurent> {
        Ok(self.expand_at(center, hi)?.drop_negative())
    }
}

/// Conductor of every coefficient of a polynomial (re-exported convenience).
pub fn conductor_of(p: &Poly) -> u32 {
    poly_conductor(p)
}
