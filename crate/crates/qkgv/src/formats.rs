//! JSON file formats: geometry descriptions, invariant tables, serialized
//! J-functions, and verification reports.
//!
//! Every numeric value is an exact rational encoded as a string (`"num"` or
//! `"num/den"`); floats never appear.  Serialization is deterministic: maps
//! are emitted in sorted key order.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use num::{BigInt, BigRational};
use serde::{Deserialize, Serialize};

use crate::cyclotomic::{Cyc, Root};
use crate::geometry::{CY3Data, GVTable, GWTable};
use crate::jfunction::{BasisLabel, JFunction, KVec};
use crate::poly::Poly;
use crate::qrat::QRat;
use crate::series::{Class, TPoly};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Exact rational strings.

/// Render a rational as `"num"` or `"num/den"`.
pub fn rational_string(r: &BigRational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse `"num"` or `"num/den"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num)
        .map_err(|_| Error::InvalidInput(format!("bad rational numerator {:?}", s)))?;
    let den = BigInt::from_str(den)
        .map_err(|_| Error::InvalidInput(format!("bad rational denominator {:?}", s)))?;
    if den == BigInt::from(0) {
        return Err(Error::InvalidInput(format!("zero denominator in {:?}", s)));
    }
    Ok(BigRational::new(num, den))
}

// ---------------------------------------------------------------------------
// Geometry files.

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TripleEntry {
    pub ijk: [usize; 3],
    pub value: String,
}

/// On-disk description of the target geometry: divisor-basis size, effective
/// cone rank, the pairing matrix, and the triple intersection numbers.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeometryFile {
    pub h2_rank: usize,
    pub n1: usize,
    /// `h2_rank x n1` integer matrix; row `g` pairs the `g`-th effective
    /// generator against each divisor-basis element.
    pub divisor_pairing: Vec<Vec<i64>>,
    pub triple_intersections: Vec<TripleEntry>,
}

impl GeometryFile {
    pub fn from_geometry(g: &CY3Data) -> GeometryFile {
        GeometryFile {
            h2_rank: g.h2rank,
            n1: g.n1,
            divisor_pairing: g.pairing.clone(),
            triple_intersections: g
                .kappa
                .iter()
                .map(|(&(i, j, k), v)| TripleEntry {
                    ijk: [i, j, k],
                    value: rational_string(v),
                })
                .collect(),
        }
    }

    pub fn to_geometry(&self) -> Result<CY3Data> {
        let kappa = self
            .triple_intersections
            .iter()
            .map(|e| {
                parse_rational(&e.value).map(|v| ((e.ijk[0], e.ijk[1], e.ijk[2]), v))
            })
            .collect::<Result<Vec<_>>>()?;
        CY3Data::new(self.n1, self.h2_rank, self.divisor_pairing.clone(), kappa)
    }
}

// ---------------------------------------------------------------------------
// Invariant tables (GV, GW, and extracted leading invariants share a shape).

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableEntry {
    pub beta: Vec<u32>,
    pub value: String,
}

/// Genus-zero invariant table keyed by curve class.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableFile {
    pub genus: u32,
    pub entries: Vec<TableEntry>,
}

impl TableFile {
    pub fn from_map(entries: &BTreeMap<Class, BigRational>) -> TableFile {
        TableFile {
            genus: 0,
            entries: entries
                .iter()
                .map(|(beta, v)| TableEntry {
                    beta: beta.clone(),
                    value: rational_string(v),
                })
                .collect(),
        }
    }

    pub fn to_map(&self) -> Result<BTreeMap<Class, BigRational>> {
        if self.genus != 0 {
            return Err(Error::InvalidInput(format!(
                "only genus-zero tables are supported, got genus {}",
                self.genus
            )));
        }
        let mut out = BTreeMap::new();
        for e in &self.entries {
            if e.beta.is_empty() {
                return Err(Error::InvalidInput("empty curve class in table".into()));
            }
            let v = parse_rational(&e.value)?;
            if out.insert(e.beta.clone(), v).is_some() {
                return Err(Error::InvalidInput(format!(
                    "duplicate class {:?} in table",
                    e.beta
                )));
            }
        }
        Ok(out)
    }

    pub fn from_gv(gv: &GVTable) -> TableFile {
        TableFile::from_map(&gv.entries)
    }

    pub fn from_gw(gw: &GWTable) -> TableFile {
        TableFile::from_map(&gw.entries)
    }

    pub fn to_gv(&self) -> Result<GVTable> {
        Ok(GVTable {
            entries: self.to_map()?,
        })
    }

    pub fn to_gw(&self) -> Result<GWTable> {
        Ok(GWTable {
            entries: self.to_map()?,
        })
    }
}

// ---------------------------------------------------------------------------
// q-rational serialization.

/// Exact cyclotomic number: conductor plus power-basis coefficients.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CycJson {
    pub conductor: u32,
    pub coeffs: Vec<String>,
}

impl CycJson {
    pub fn from_cyc(c: &Cyc) -> CycJson {
        let (n, coeffs) = c.power_basis();
        CycJson {
            conductor: n,
            coeffs: coeffs.iter().map(rational_string).collect(),
        }
    }

    pub fn to_cyc(&self) -> Result<Cyc> {
        let mut out = Cyc::zero();
        for (i, s) in self.coeffs.iter().enumerate() {
            let v = parse_rational(s)?;
            let zi = Cyc::zeta_pow(self.conductor, i as u32)?;
            out = out.add(&zi.scale(&v));
        }
        Ok(out)
    }
}

/// One denominator factor `(1 - zeta q)^mult`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DenFactorJson {
    pub order: u32,
    pub index: u32,
    pub mult: usize,
}

/// A rational function of `q`: `q^qpow * num(q) / prod (1 - zeta q)^mult`,
/// with `num` given as its coefficient list in `q`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QRatJson {
    pub qpow: usize,
    pub num: Vec<CycJson>,
    pub den: Vec<DenFactorJson>,
}

impl QRatJson {
    pub fn from_qrat(x: &QRat) -> QRatJson {
        let x = x.clone().reduced();
        let deg = x.num.degree().map(|d| d + 1).unwrap_or(0);
        QRatJson {
            qpow: x.qpow,
            num: (0..deg).map(|k| CycJson::from_cyc(&x.num.coeff(k))).collect(),
            den: x
                .den
                .iter()
                .map(|(root, &mult)| DenFactorJson {
                    order: root.order,
                    index: root.index,
                    mult,
                })
                .collect(),
        }
    }

    pub fn to_qrat(&self) -> Result<QRat> {
        let coeffs = self
            .num
            .iter()
            .map(|c| c.to_cyc())
            .collect::<Result<Vec<_>>>()?;
        let num = Poly::from_coeffs(coeffs);
        let den = self
            .den
            .iter()
            .map(|d| (Root::new(d.order, d.index), d.mult))
            .collect();
        Ok(QRat::fraction(num, den, self.qpow))
    }
}

// ---------------------------------------------------------------------------
// Serialized J-functions.

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JTermJson {
    /// Exponent vector of the `t`-monomial.
    pub t_exp: Vec<u32>,
    pub value: QRatJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JComponentJson {
    /// `"phi01"` or `"phi1_<j>"`.
    pub label: String,
    pub terms: Vec<JTermJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JClassJson {
    pub beta: Vec<u32>,
    pub components: Vec<JComponentJson>,
}

/// J-function instanton data: per class, per dual-basis component, per
/// `t`-monomial, one exact rational function of `q`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JFunctionFile {
    pub geometry: GeometryFile,
    pub d: u32,
    pub dt: u32,
    pub classes: Vec<JClassJson>,
}

fn label_string(l: BasisLabel) -> String {
    match l {
        BasisLabel::Phi01 => "phi01".into(),
        BasisLabel::Phi1(j) => format!("phi1_{}", j),
    }
}

fn parse_label(s: &str) -> Result<BasisLabel> {
    if s == "phi01" {
        return Ok(BasisLabel::Phi01);
    }
    if let Some(idx) = s.strip_prefix("phi1_") {
        let j = idx
            .parse::<usize>()
            .map_err(|_| Error::InvalidInput(format!("bad component label {:?}", s)))?;
        return Ok(BasisLabel::Phi1(j));
    }
    Err(Error::InvalidInput(format!(
        "bad component label {:?} (want phi01 or phi1_<j>)",
        s
    )))
}

/// Parse a CLI dual-basis argument: `phi01` or `phi1_<j>`.
pub fn parse_basis_label(s: &str) -> Result<BasisLabel> {
    parse_label(s)
}

fn tpoly_terms(p: &TPoly<QRat>) -> Vec<JTermJson> {
    p.terms
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(e, v)| JTermJson {
            t_exp: e.clone(),
            value: QRatJson::from_qrat(v),
        })
        .collect()
}

impl JFunctionFile {
    pub fn from_jfunction(j: &JFunction) -> JFunctionFile {
        let classes = j
            .instanton
            .iter()
            .map(|(beta, kv)| {
                let mut components = vec![JComponentJson {
                    label: label_string(BasisLabel::Phi01),
                    terms: tpoly_terms(&kv.phi01),
                }];
                for (jx, p) in kv.phi1.iter().enumerate() {
                    components.push(JComponentJson {
                        label: label_string(BasisLabel::Phi1(jx)),
                        terms: tpoly_terms(p),
                    });
                }
                JClassJson {
                    beta: beta.clone(),
                    components,
                }
            })
            .collect();
        JFunctionFile {
            geometry: GeometryFile::from_geometry(&j.geom),
            d: j.d,
            dt: j.dt,
            classes,
        }
    }

    pub fn to_jfunction(&self) -> Result<JFunction> {
        let geom = self.geometry.to_geometry()?;
        let nv = geom.n1;
        let mut instanton = BTreeMap::new();
        for cl in &self.classes {
            let mut kv: KVec<TPoly<QRat>> = KVec::zero(nv);
            for comp in &cl.components {
                let label = parse_label(&comp.label)?;
                let mut p = TPoly::<QRat>::constant(nv, QRat::zero());
                for term in &comp.terms {
                    if term.t_exp.len() != nv {
                        return Err(Error::InvalidInput(format!(
                            "t-exponent arity {} does not match n1 = {}",
                            term.t_exp.len(),
                            nv
                        )));
                    }
                    let v = term.value.to_qrat()?;
                    p.terms.insert(term.t_exp.clone(), v);
                }
                match label {
                    BasisLabel::Phi01 => kv.phi01 = p,
                    BasisLabel::Phi1(jx) => {
                        if jx >= nv {
                            return Err(Error::InvalidInput(format!(
                                "component index {} out of range",
                                jx
                            )));
                        }
                        kv.phi1[jx] = p;
                    }
                }
            }
            instanton.insert(cl.beta.clone(), kv);
        }
        let (f, gradf) = geom.f_cubic();
        Ok(JFunction {
            geom,
            d: self.d,
            dt: self.dt,
            f,
            gradf,
            instanton,
        })
    }
}

// ---------------------------------------------------------------------------
// Extracted-invariant tables.

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QKEntryJson {
    pub beta: Vec<u32>,
    /// One value per `q`-power `0..=k_max`.
    pub values: Vec<String>,
}

/// Table of extracted invariants for one dual-basis insertion.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QKTableFile {
    pub alpha: String,
    pub k_max: usize,
    pub entries: Vec<QKEntryJson>,
    /// Classes where a non-integer value appeared despite integer input.
    pub non_integer: Vec<Vec<u32>>,
}

// ---------------------------------------------------------------------------
// File I/O helpers.

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {}", path.display(), e)))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("bad JSON in {}: {}", path.display(), e)))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidInput(format!("serialization failed: {}", e)))?;
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|e| Error::InvalidInput(format!("cannot write {}: {}", path.display(), e)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_i64;
    use crate::jfunction::build_jtilde;

    #[test]
    fn rational_strings_round_trip() {
        for s in ["0", "5", "-7", "2875", "1/8", "-609250/3"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(rational_string(&r), s);
        }
        assert_eq!(parse_rational("4/2").unwrap(), rat_i64(2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn geometry_round_trip() {
        let g = CY3Data::rank1(rat_i64(5));
        let f = GeometryFile::from_geometry(&g);
        let g2 = f.to_geometry().unwrap();
        assert_eq!(g2.n1, g.n1);
        assert_eq!(g2.pairing, g.pairing);
        assert_eq!(g2.kappa, g.kappa);
    }

    #[test]
    fn table_round_trip() {
        let gv = GVTable::rank1(vec![(1, 2875), (2, 609250)]);
        let f = TableFile::from_gv(&gv);
        assert_eq!(f.genus, 0);
        let gv2 = f.to_gv().unwrap();
        assert_eq!(gv.entries, gv2.entries);
    }

    #[test]
    fn qrat_round_trip() {
        let x = QRat::inv_one_minus_qr(3, 2)
            .mul(&QRat::q_pow(2))
            .add(&QRat::from_i64(7));
        let json = QRatJson::from_qrat(&x);
        let y = json.to_qrat().unwrap();
        assert!(x.sub(&y).is_zero());
    }

    #[test]
    fn jfunction_round_trip() {
        let geom = CY3Data::rank1(rat_i64(5));
        let gv = GVTable::rank1(vec![(1, 1)]);
        let j = build_jtilde(&geom, &gv, 2, 1).unwrap();
        let file = JFunctionFile::from_jfunction(&j);
        let j2 = file.to_jfunction().unwrap();
        assert_eq!(j.instanton.len(), j2.instanton.len());
        for (beta, kv) in &j.instanton {
            let kv2 = &j2.instanton[beta];
            assert!(kv.sub(kv2).is_zero(), "class {:?} differs", beta);
        }
    }
}
