//! Néron–Severi arithmetic of elliptic K3 surfaces from fiber data.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::exact::{self, rat, IntMatrix, Rational};
use crate::fqf;
use crate::lattice::{standard_lattice, Lattice, Sign};

/// Largest `|det|` accepted by [`ns_overlattice_scan`].
pub const SCAN_DET_BUDGET: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FiberType {
    I(u32),
    IStar(u32),
    II,
    III,
    IV,
    IVStar,
    IIIStar,
    IIStar,
}

impl FiberType {
    pub fn euler(self) -> u32 {
        match self {
            FiberType::I(n) => n,
            FiberType::IStar(n) => n + 6,
            FiberType::II => 2,
            FiberType::III => 3,
            FiberType::IV => 4,
            FiberType::IVStar => 8,
            FiberType::IIIStar => 9,
            FiberType::IIStar => 10,
        }
    }

    /// Name of the root lattice spanned by the non-identity components.
    pub fn root_lattice(self) -> Option<String> {
        match self {
            FiberType::I(n) if n >= 2 => Some(format!("A{}", n - 1)),
            FiberType::I(_) | FiberType::II => None,
            FiberType::IStar(n) => Some(format!("D{}", n + 4)),
            FiberType::III => Some("A1".into()),
            FiberType::IV => Some("A2".into()),
            FiberType::IVStar => Some("E6".into()),
            FiberType::IIIStar => Some("E7".into()),
            FiberType::IIStar => Some("E8".into()),
        }
    }

    /// Number of simple (multiplicity one) components.
    pub fn simple_components(self) -> usize {
        match self {
            FiberType::I(n) => n.max(1) as usize,
            FiberType::IStar(_) => 4,
            FiberType::II | FiberType::IIStar => 1,
            FiberType::III | FiberType::IIIStar => 2,
            FiberType::IV | FiberType::IVStar => 3,
        }
    }

    /// Correction term of the height pairing for a section meeting simple
    /// component `i` (component 0 meets the zero section). For `I_n*`,
    /// component 1 is the near one and 2, 3 are the far ones.
    pub fn local_contribution(self, i: usize) -> Result<Rational> {
        if i >= self.simple_components() {
            return Err(Error::InvalidComponent { fiber: self.to_string(), index: i });
        }
        if i == 0 {
            return Ok(Rational::zero());
        }
        Ok(match self {
            FiberType::I(n) => rat((i * (n as usize - i)) as i64, n as i64),
            FiberType::IStar(_) if i == 1 => rat(1, 1),
            FiberType::IStar(n) => rat(1, 1) + rat(n as i64, 4),
            FiberType::III => rat(1, 2),
            FiberType::IV => rat(2, 3),
            FiberType::IVStar => rat(4, 3),
            FiberType::IIIStar => rat(3, 2),
            FiberType::II | FiberType::IIStar => unreachable!("single simple component"),
        })
    }
}

impl fmt::Display for FiberType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiberType::I(n) => write!(f, "I{n}"),
            FiberType::IStar(n) => write!(f, "I{n}*"),
            FiberType::II => write!(f, "II"),
            FiberType::III => write!(f, "III"),
            FiberType::IV => write!(f, "IV"),
            FiberType::IVStar => write!(f, "IV*"),
            FiberType::IIIStar => write!(f, "III*"),
            FiberType::IIStar => write!(f, "II*"),
        }
    }
}

impl FromStr for FiberType {
    type Err = Error;

    /// Accepts `I5`, `I_5`, `I1*`, `IV*`, ...
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().replace('_', "");
        Ok(match t.as_str() {
            "II" => FiberType::II,
            "III" => FiberType::III,
            "IV" => FiberType::IV,
            "IV*" => FiberType::IVStar,
            "III*" => FiberType::IIIStar,
            "II*" => FiberType::IIStar,
            _ => {
                let bad = || Error::InvalidInput(format!("unknown fiber type `{s}`"));
                let rest = t.strip_prefix('I').ok_or_else(bad)?;
                match rest.strip_suffix('*') {
                    Some(n) => FiberType::IStar(n.parse().map_err(|_| bad())?),
                    None => FiberType::I(rest.parse().map_err(|_| bad())?),
                }
            }
        })
    }
}

/// JSON record: `{"type": "IV*"}`, `{"type": "I", "n": 5}` or `{"type": "I*", "n": 1}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FiberRecord {
    #[serde(rename = "type")]
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<u32>,
}

impl TryFrom<FiberRecord> for FiberType {
    type Error = Error;
    fn try_from(r: FiberRecord) -> Result<Self> {
        match (r.kind.as_str(), r.n) {
            ("I", Some(n)) => Ok(FiberType::I(n)),
            ("I*", Some(n)) => Ok(FiberType::IStar(n)),
            ("I", None) | ("I*", None) => Err(Error::InvalidInput(format!("fiber type {} needs n", r.kind))),
            (k, None) => k.parse(),
            (k, Some(_)) => Err(Error::InvalidInput(format!("fiber type {k} takes no n"))),
        }
    }
}

impl From<FiberType> for FiberRecord {
    fn from(f: FiberType) -> Self {
        match f {
            FiberType::I(n) => FiberRecord { kind: "I".into(), n: Some(n) },
            FiberType::IStar(n) => FiberRecord { kind: "I*".into(), n: Some(n) },
            other => FiberRecord { kind: other.to_string(), n: None },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberConfiguration {
    pub fibers: Vec<FiberType>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    fibers: Vec<FiberRecord>,
}

impl FiberConfiguration {
    pub fn new(fibers: Vec<FiberType>) -> Self {
        FiberConfiguration { fibers }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: ConfigFile =
            serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("fiber configuration: {e}")))?;
        Ok(FiberConfiguration { fibers: file.fibers.into_iter().map(FiberType::try_from).collect::<Result<_>>()? })
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!(ConfigFile { fibers: self.fibers.iter().map(|&f| f.into()).collect() })
    }

    pub fn euler(&self) -> u32 {
        self.fibers.iter().map(|f| f.euler()).sum()
    }

    /// `U` plus the negative definite root lattices of the fibers.
    pub fn trivial_lattice(&self) -> Lattice {
        let mut parts = vec![standard_lattice("U", Sign::Positive).expect("catalog")];
        for f in &self.fibers {
            if let Some(name) = f.root_lattice() {
                parts.push(standard_lattice(&name, Sign::Negative).expect("catalog names"));
            }
        }
        Lattice::direct_sum(&parts)
    }
}

pub fn trivial_lattice(config: &FiberConfiguration) -> (Lattice, u32) {
    (config.trivial_lattice(), config.euler())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionData {
    /// intersection number with the zero section
    pub p_o: u32,
    /// simple component met in each fiber, in configuration order
    pub components: Vec<usize>,
}

impl SectionData {
    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("section data: {e}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Height {
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub value: Rational,
    /// false flags a nonpositive result, which no actual section can have
    pub positive: bool,
    #[serde(serialize_with = "ser_rationals")]
    pub contributions: Vec<Rational>,
}

fn ser_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(exact::format_rational))
}

/// `h(P) = 4 + 2 (P·O) - Σ contr_v(P)` on a K3 surface.
pub fn section_height(config: &FiberConfiguration, s: &SectionData) -> Result<Height> {
    if s.components.len() != config.fibers.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} component indices for {} fibers",
            s.components.len(),
            config.fibers.len()
        )));
    }
    let contributions =
        config.fibers.iter().zip(&s.components).map(|(f, &i)| f.local_contribution(i)).collect::<Result<Vec<_>>>()?;
    let total: Rational = contributions.iter().sum();
    let value = rat(4 + 2 * s.p_o as i64, 1) - total;
    Ok(Height { positive: value.is_positive(), value, contributions })
}

fn rational_determinant(m: &[Vec<Rational>]) -> Result<Rational> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::NotSquare { rows: n, cols: m.first().map_or(0, Vec::len) });
    }
    if n == 0 {
        return Ok(Rational::one());
    }
    let den = m.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled: Vec<Vec<BigInt>> =
        m.iter().map(|r| r.iter().map(|x| (x * Rational::from_integer(den.clone())).to_integer()).collect()).collect();
    let det = exact::determinant(&IntMatrix::from_big_rows(scaled)?)?;
    Ok(Rational::new(det, num_traits::pow(den, n)))
}

/// `det NS = det(Triv) · det(-H) / |tors|²`, where `H` is the (positive
/// definite) height Gram of Mordell–Weil generators; the sections enter NS
/// with the opposite sign of their heights.
pub fn shioda_tate_disc(config: &FiberConfiguration, heights: &[Vec<Rational>], torsion: u64) -> Result<Rational> {
    if torsion == 0 {
        return Err(Error::InvalidInput("torsion order must be positive".into()));
    }
    let triv = Rational::from_integer(config.trivial_lattice().determinant());
    let r = heights.len();
    let sign = if r % 2 == 0 { rat(1, 1) } else { rat(-1, 1) };
    let t = Rational::from_integer(BigInt::from(torsion));
    Ok(triv * sign * rational_determinant(heights)? / (&t * &t))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    #[serde(serialize_with = "crate::report::ser_bigint")]
    pub determinant: BigInt,
    pub nonzero_isotropic_count: u64,
    pub proper_even_overlattice_exists: bool,
}

/// Even overlattices of `L` correspond to isotropic subgroups of `A_L`; a
/// proper one exists iff some nonzero element has `q = 0`, since that element
/// spans an isotropic cyclic subgroup.
pub fn ns_overlattice_scan(l: &Lattice) -> Result<ScanReport> {
    let det = l.determinant();
    if det.abs() > BigInt::from(SCAN_DET_BUDGET) {
        return Err(Error::BudgetExceeded {
            what: "overlattice scan determinant",
            size: u128::try_from(det.abs()).unwrap_or(u128::MAX),
            limit: SCAN_DET_BUDGET as u128,
        });
    }
    let count = fqf::disc_form(l)?.form.nonzero_isotropic_count()?;
    Ok(ScanReport { determinant: det, nonzero_isotropic_count: count, proper_even_overlattice_exists: count > 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::parse_sum;
    use proptest::prelude::*;

    fn family_x() -> FiberConfiguration {
        FiberConfiguration::from_json_str(
            r#"{"fibers":[{"type":"IV*"},{"type":"IV*"},{"type":"I","n":5},{"type":"I","n":2},{"type":"I","n":1}]}"#,
        )
        .unwrap()
    }

    fn family_y() -> FiberConfiguration {
        FiberConfiguration::new(vec![FiberType::IVStar, FiberType::IVStar, FiberType::IStar(1), FiberType::I(1)])
    }

    fn section(p_o: u32, components: &[usize]) -> SectionData {
        SectionData { p_o, components: components.to_vec() }
    }

    #[test]
    fn trivial_lattices() {
        let (l, e) = trivial_lattice(&family_x());
        assert_eq!(e, 24);
        assert_eq!(l.rank(), 19);
        assert_eq!(l.determinant(), BigInt::from(90));
        assert_eq!(l.gram(), parse_sum("U,2E6-,A4-,A1-", &|_| None).unwrap().gram());
        let (l, e) = trivial_lattice(&family_y());
        assert_eq!((l.rank(), e), (19, 24));
        assert_eq!(l.determinant(), BigInt::from(36));
        let (l, e) = trivial_lattice(&FiberConfiguration::new(vec![]));
        assert_eq!((l.rank(), e), (2, 0));
    }

    #[test]
    fn contributions() {
        assert_eq!(FiberType::IVStar.local_contribution(1).unwrap(), rat(4, 3));
        assert_eq!(FiberType::I(5).local_contribution(2).unwrap(), rat(6, 5));
        assert_eq!(FiberType::IStar(1).local_contribution(2).unwrap(), rat(5, 4));
        assert_eq!(FiberType::IStar(1).local_contribution(1).unwrap(), rat(1, 1));
        for f in [FiberType::II, FiberType::IIStar, FiberType::I(1), FiberType::IVStar] {
            assert!(f.local_contribution(0).unwrap().is_zero());
        }
        assert!(matches!(FiberType::IIStar.local_contribution(1), Err(Error::InvalidComponent { .. })));
        assert!(matches!(FiberType::I(5).local_contribution(5), Err(Error::InvalidComponent { .. })));
    }

    #[test]
    fn heights() {
        let x = family_x();
        assert_eq!(section_height(&x, &section(0, &[1, 0, 2, 1, 0])).unwrap().value, rat(29, 30));
        assert_eq!(section_height(&x, &section(1, &[1, 1, 1, 1, 0])).unwrap().value, rat(61, 30));
        assert_eq!(section_height(&x, &section(0, &[1, 1, 0, 1, 0])).unwrap().value, rat(5, 6));
        let y = family_y();
        assert_eq!(section_height(&y, &section(0, &[1, 0, 2, 0])).unwrap().value, rat(17, 12));
        assert!(section_height(&x, &section(0, &[1])).is_err());
        let h = section_height(&x, &section(0, &[1, 1, 2, 1, 0])).unwrap();
        assert!(!h.positive);
    }

    #[test]
    fn discriminants() {
        let x = family_x();
        assert_eq!(shioda_tate_disc(&x, &[vec![rat(29, 30)]], 1).unwrap(), rat(-87, 1));
        assert_eq!(shioda_tate_disc(&x, &[vec![rat(61, 30)]], 1).unwrap(), rat(-183, 1));
        assert_eq!(shioda_tate_disc(&x, &[], 1).unwrap(), rat(90, 1));
        assert_eq!(shioda_tate_disc(&x, &[vec![rat(5, 6)]], 1).unwrap(), rat(-75, 1));
        assert_eq!(shioda_tate_disc(&family_y(), &[vec![rat(17, 12)]], 1).unwrap(), rat(-51, 1));
        assert_eq!(shioda_tate_disc(&x, &[vec![rat(29, 30)]], 3).unwrap(), rat(-87, 9));
    }

    #[test]
    fn scans() {
        let n0 = family_x().trivial_lattice();
        let r = ns_overlattice_scan(&n0).unwrap();
        assert_eq!((r.nonzero_isotropic_count, r.proper_even_overlattice_exists), (0, false));
        let r = ns_overlattice_scan(&parse_sum("U(3)", &|_| None).unwrap()).unwrap();
        assert_eq!((r.nonzero_isotropic_count, r.proper_even_overlattice_exists), (4, true));
        let r = ns_overlattice_scan(&parse_sum("U", &|_| None).unwrap()).unwrap();
        assert_eq!(r.nonzero_isotropic_count, 0);
        let big = parse_sum("U(101)", &|_| None).unwrap();
        assert!(matches!(ns_overlattice_scan(&big), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn fiber_json() {
        assert_eq!(FiberConfiguration::from_json_str(&family_x().to_json().to_string()).unwrap(), family_x());
        assert_eq!(FiberConfiguration::from_json_str(&family_y().to_json().to_string()).unwrap(), family_y());
        assert!(FiberConfiguration::from_json_str(r#"{"fibers":[{"type":"I"}]}"#).is_err());
        assert!(FiberConfiguration::from_json_str(r#"{"fibers":[{"type":"V"}]}"#).is_err());
        assert_eq!("I_5".parse::<FiberType>().unwrap(), FiberType::I(5));
        assert_eq!("I0*".parse::<FiberType>().unwrap(), FiberType::IStar(0));
    }

    proptest! {
        #[test]
        fn cyclic_fiber_symmetry(n in 1u32..40, i in 0usize..40) {
            prop_assume!(i < n as usize);
            let f = FiberType::I(n);
            let j = (n as usize - i) % n as usize;
            prop_assert_eq!(f.local_contribution(i).unwrap(), f.local_contribution(j).unwrap());
        }

        #[test]
        fn trivial_lattice_rank_matches_euler_data(ns in proptest::collection::vec(1u32..8, 0..6)) {
            let config = FiberConfiguration::new(ns.iter().map(|&n| FiberType::I(n)).collect());
            let expected: u32 = ns.iter().map(|n| n - 1).sum();
            prop_assert_eq!(config.trivial_lattice().rank() as u32, 2 + expected);
            prop_assert_eq!(config.euler(), ns.iter().sum::<u32>());
        }
    }
}
