//! Target-space data for a Calabi-Yau threefold and the genus-zero
//! Gopakumar-Vafa / Gromov-Witten tables with their cube-weighted Mobius
//! transforms.

use crate::arith::{divisors, mobius, rat_i64};
use crate::series::{class_deg, class_div, class_ind, class_is_zero, classes_up_to, Class, TPoly};
use crate::{Error, Result};
use num::{BigRational, One, Zero};
use std::collections::BTreeMap;

/// Topological data: `n1` divisor-basis elements, an `h2rank`-dimensional
/// effective cone basis, the pairing of effective generators against the
/// divisor basis, and the symmetric triple intersection numbers.
#[derive(Clone, Debug)]
pub struct CY3Data {
    pub n1: usize,
    pub h2rank: usize,
    /// `pairing[g][j]` = value of the j-th divisor on the g-th effective
    /// generator.
    pub pairing: Vec<Vec<i64>>,
    /// Triple intersections, keyed by sorted index triples.
    pub kappa: BTreeMap<(usize, usize, usize), BigRational>,
}

impl CY3Data {
    pub fn new(
        n1: usize,
        h2rank: usize,
        pairing: Vec<Vec<i64>>,
        kappa_entries: Vec<((usize, usize, usize), BigRational)>,
    ) -> Result<CY3Data> {
        if pairing.len() != h2rank || pairing.iter().any(|row| row.len() != n1) {
            return Err(Error::RankMismatch {
                expected: h2rank * n1,
                got: pairing.iter().map(|r| r.len()).sum(),
            });
        }
        let mut kappa = BTreeMap::new();
        for ((i, j, k), v) in kappa_entries {
            if i >= n1 || j >= n1 || k >= n1 {
                return Err(Error::InvalidInput(format!(
                    "triple intersection index ({},{},{}) out of range",
                    i, j, k
                )));
            }
            let mut key = [i, j, k];
            key.sort_unstable();
            kappa.insert((key[0], key[1], key[2]), v);
        }
        Ok(CY3Data {
            n1,
            h2rank,
            pairing,
            kappa,
        })
    }

    /// Rank-1 geometry with a single generator of pairing 1 and `kappa111`.
    pub fn rank1(kappa111: BigRational) -> CY3Data {
        CY3Data::new(1, 1, vec![vec![1]], vec![((0, 0, 0), kappa111)]).unwrap()
    }

    pub fn kappa(&self, i: usize, j: usize, k: usize) -> BigRational {
        let mut key = [i, j, k];
        key.sort_unstable();
        self.kappa
            .get(&(key[0], key[1], key[2]))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// `beta_j`: the j-th divisor evaluated on a class.
    pub fn beta_component(&self, beta: &Class, j: usize) -> i64 {
        beta.iter()
            .enumerate()
            .map(|(g, &c)| c as i64 * self.pairing[g][j])
            .sum()
    }

    /// The linear form `sum_j beta_j t_j`.
    pub fn beta_t(&self, beta: &Class) -> TPoly<BigRational> {
        let mut out = TPoly::new(self.n1);
        for j in 0..self.n1 {
            let bj = self.beta_component(beta, j);
            if bj != 0 {
                out = out.add(&TPoly::var(self.n1, j).scale(&rat_i64(bj)));
            }
        }
        out
    }

    /// The cubic form `F = (1/6) sum kappa_{ijk} t_i t_j t_k` and its
    /// gradient.
    pub fn f_cubic(&self) -> (TPoly<BigRational>, Vec<TPoly<BigRational>>) {
        let n = self.n1;
        let mut f = TPoly::new(n);
        let sixth = BigRational::new(1.into(), 6.into());
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let kap = self.kappa(i, j, k);
                    if kap.is_zero() {
                        continue;
                    }
                    let mut e = vec![0u32; n];
                    e[i] += 1;
                    e[j] += 1;
                    e[k] += 1;
                    let mut term = TPoly::new(n);
                    term.terms.insert(e, kap * &sixth);
                    f = f.add(&term);
                }
            }
        }
        let mut grad = Vec::with_capacity(n);
        for j in 0..n {
            grad.push(tpoly_partial(&f, j));
        }
        (f, grad)
    }
}

/// Partial derivative of a t-polynomial.
pub fn tpoly_partial(p: &TPoly<BigRational>, j: usize) -> TPoly<BigRational> {
    let mut out = TPoly::new(p.nvars);
    for (e, v) in &p.terms {
        if e[j] == 0 {
            continue;
        }
        let mut e2 = e.clone();
        e2[j] -= 1;
        out.terms
            .insert(e2, v * BigRational::from_integer((e[j] as i64).into()));
    }
    out
}

/// Divisibility index of a nonzero class: gcd of the coordinates in the
/// declared generator basis.  (This matches the lattice-theoretic index
/// whenever the generators form a basis of the classes below cutoff.)
pub fn ind(beta: &Class) -> Result<u32> {
    if class_is_zero(beta) {
        return Err(Error::InvalidInput("index of the zero class".into()));
    }
    Ok(class_ind(beta))
}

/// Genus-zero table of integer curve counts (values kept rational so the
/// inverse transform can report integrality failures instead of panicking).
#[derive(Clone, Debug, PartialEq, Default)]
pub struct GVTable {
    pub entries: BTreeMap<Class, BigRational>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct GWTable {
    pub entries: BTreeMap<Class, BigRational>,
}

impl GVTable {
    pub fn new() -> GVTable {
        GVTable::default()
    }

    pub fn from_entries(entries: Vec<(Class, i64)>) -> GVTable {
        GVTable {
            entries: entries
                .into_iter()
                .filter(|(_, v)| *v != 0)
                .map(|(b, v)| (b, rat_i64(v)))
                .collect(),
        }
    }

    /// Rank-1 convenience: degrees paired with values.
    pub fn rank1(entries: Vec<(u32, i64)>) -> GVTable {
        GVTable::from_entries(entries.into_iter().map(|(d, v)| (vec![d], v)).collect())
    }

    pub fn get(&self, beta: &Class) -> BigRational {
        self.entries.get(beta).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn insert(&mut self, beta: Class, v: BigRational) {
        if v.is_zero() {
            self.entries.remove(&beta);
        } else {
            self.entries.insert(beta, v);
        }
    }

    /// Classes with non-integer values.
    pub fn integrality_warnings(&self) -> Vec<Class> {
        self.entries
            .iter()
            .filter(|(_, v)| !v.is_integer())
            .map(|(b, _)| b.clone())
            .collect()
    }
}

impl GWTable {
    pub fn get(&self, beta: &Class) -> BigRational {
        self.entries.get(beta).cloned().unwrap_or_else(BigRational::zero)
    }
}

/// `GW_beta = sum_{k | ind(beta)} GV_{beta/k} / k^3` for every effective
/// class of degree at most `cutoff`.
pub fn gw_from_gv(gv: &GVTable, rank: usize, cutoff: u32) -> GWTable {
    let mut out = GWTable::default();
    for gamma in classes_up_to(rank, cutoff) {
        let g = class_ind(&gamma);
        let mut acc = BigRational::zero();
        for k in divisors(g as u64) {
            let sub = class_div(&gamma, k as u32).expect("divisor of the index");
            let v = gv.get(&sub);
            if v.is_zero() {
                continue;
            }
            acc += v / rat_i64((k * k * k) as i64);
        }
        if !acc.is_zero() {
            out.entries.insert(gamma, acc);
        }
    }
    out
}

/// Mobius inversion `GV_beta = sum_k mu(k)/k^3 GW_{beta/k}`.
pub fn gv_from_gw(gw: &GWTable, rank: usize, cutoff: u32) -> GVTable {
    let mut out = GVTable::default();
    for gamma in classes_up_to(rank, cutoff) {
        let g = class_ind(&gamma);
        let mut acc = BigRational::zero();
        for k in divisors(g as u64) {
            let mu = mobius(k);
            if mu == 0 {
                continue;
            }
            let sub = class_div(&gamma, k as u32).expect("divisor of the index");
            let v = gw.get(&sub);
            if v.is_zero() {
                continue;
            }
            acc += v * rat_i64(mu) / rat_i64((k * k * k) as i64);
        }
        out.insert(gamma, acc);
    }
    out
}

/// Divisor power sum `sum_{k | d} k^gamma GV_{k beta}` for primitive `beta`.
/// Negative exponents are allowed (they weight by `1/k^{|gamma|}`).
pub fn gv_power_sum(gv: &GVTable, beta: &Class, d: u32, gamma: i64) -> Result<BigRational> {
    if class_ind(beta) != 1 {
        return Err(Error::InvalidInput(format!(
            "power sum requires a primitive class, got index {}",
            class_ind(beta)
        )));
    }
    let mut acc = BigRational::zero();
    for k in divisors(d as u64) {
        let v = gv.get(&crate::series::class_scale(beta, k as u32));
        if v.is_zero() {
            continue;
        }
        let kp = BigRational::from_integer((k as i64).into());
        let w = if gamma >= 0 {
            num::pow::pow(kp, gamma as usize)
        } else {
            BigRational::one() / num::pow::pow(kp, (-gamma) as usize)
        };
        acc += v * w;
    }
    Ok(acc)
}

/// Like [`gv_power_sum`] but weighting each divisor `k` by an arbitrary
/// caller-supplied factor (used for the t-dependent closed forms, where the
/// exponential arguments scale with the divisor).
pub fn gv_weighted_sum<T, F>(
    gv: &GVTable,
    beta: &Class,
    d: u32,
    zero: T,
    mut add_scaled: F,
) -> Result<T>
where
    F: FnMut(&T, u64, &BigRational) -> T,
{
    if class_ind(beta) != 1 {
        return Err(Error::InvalidInput(
            "weighted sum requires a primitive class".into(),
        ));
    }
    let mut acc = zero;
    for k in divisors(d as u64) {
        let v = gv.get(&crate::series::class_scale(beta, k as u32));
        if v.is_zero() {
            continue;
        }
        acc = add_scaled(&acc, k, &v);
    }
    Ok(acc)
}

/// Adams scale factor on the dual basis in cohomological degree `i`:
/// `r^{3-i}` for `i` in `{2, 3}`.
pub fn adams_dual_basis(i: u32, r: u32) -> Result<u64> {
    if !(2..=3).contains(&i) {
        return Err(Error::InvalidInput(format!(
            "Adams dual-basis scaling only defined for i in {{2,3}}, got {}",
            i
        )));
    }
    Ok((r as u64).pow(3 - i))
}

/// Primitive decomposition `gamma = g * beta'` of a nonzero class.
pub fn primitive_ray(gamma: &Class) -> Result<(u32, Class)> {
    let g = ind(gamma)?;
    Ok((g, class_div(gamma, g).expect("index divides")))
}

pub fn total_degree(beta: &Class) -> u32 {
    class_deg(beta)
}
