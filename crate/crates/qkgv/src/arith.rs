//! Small number-theoretic helpers: Mobius, totient, divisors, gcd/lcm.

use num::BigRational;
use num::{BigInt, One, Zero};

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// Divisors of `n` in increasing order.  `n >= 1`.
pub fn divisors(n: u64) -> Vec<u64> {
    assert!(n >= 1);
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// Prime factorization as (prime, multiplicity) pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Mobius function.  `mobius(1) = 1`, zero on non-squarefree arguments.
pub fn mobius(n: u64) -> i64 {
    assert!(n >= 1);
    let f = factorize(n);
    for &(_, e) in &f {
        if e > 1 {
            return 0;
        }
    }
    if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Euler totient.
pub fn euler_phi(n: u64) -> u64 {
    assert!(n >= 1);
    let mut out = n;
    for (p, _) in factorize(n) {
        out = out / p * (p - 1);
    }
    out
}

pub fn rat_i64(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `n!` as a rational.
pub fn factorial(n: u64) -> BigRational {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    BigRational::from_integer(acc)
}

/// Binomial coefficient `C(n, k)` as a rational; `n` may be any integer via
/// the falling-factorial convention.
pub fn binomial(n: i64, k: u64) -> BigRational {
    let mut num = BigRational::one();
    for i in 0..k {
        num *= rat_i64(n - i as i64);
    }
    num / factorial(k)
}

pub fn is_zero_rat(r: &BigRational) -> bool {
    r.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mobius_small() {
        let want = [1, -1, -1, 0, -1, 1, -1, 0, 0, 1];
        for (i, &w) in want.iter().enumerate() {
            assert_eq!(mobius(i as u64 + 1), w, "mobius({})", i + 1);
        }
        assert_eq!(mobius(30), -1);
        assert_eq!(mobius(36), 0);
    }

    #[test]
    fn divisors_and_phi() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(8), 4);
        assert_eq!(euler_phi(60), 16);
    }

    #[test]
    fn mobius_inverts_one() {
        // sum_{d | n} mu(d) = [n == 1]
        for n in 1u64..=60 {
            let s: i64 = divisors(n).iter().map(|&d| mobius(d)).sum();
            assert_eq!(s, if n == 1 { 1 } else { 0 });
        }
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), rat_i64(10));
        assert_eq!(binomial(-1, 3), rat_i64(-1));
        assert_eq!(binomial(3, 0), rat_i64(1));
    }
}
