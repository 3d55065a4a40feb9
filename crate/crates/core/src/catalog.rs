//! Named lattice table loaded from JSON.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::exact::IntMatrix;
use crate::lattice::{parse_sum, standard_lattice, Lattice, Sign};

pub const DEFAULT_CATALOG: &str = include_str!("../data/catalog.json");

/// Environment variable naming a catalog file to use instead of the built-in one.
pub const CATALOG_ENV: &str = "K3CUSPS_CATALOG";

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    name: String,
    gram: Vec<Vec<i64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeFile {
    #[serde(default)]
    name: Option<String>,
    gram: Vec<Vec<i64>>,
}

fn lattice_from_rows(name: &str, rows: &[Vec<i64>]) -> Result<Lattice> {
    if rows.iter().any(|r| r.len() != rows.len()) {
        return Err(Error::InvalidInput(format!("`{name}`: gram matrix is not square")));
    }
    let l = Lattice::new(IntMatrix::from_rows(rows)).map_err(|e| Error::InvalidInput(format!("`{name}`: {e}")))?;
    Ok(l.with_label(name))
}

fn json_error(origin: &str, e: serde_json::Error) -> Error {
    Error::InvalidInput(format!("{origin}: line {} column {}: {e}", e.line(), e.column()))
}

#[derive(Clone, Debug, Default)]
pub struct Catalog {
    entries: BTreeMap<String, Lattice>,
}

impl Catalog {
    pub fn builtin() -> Self {
        Self::from_json_str(DEFAULT_CATALOG, "built-in catalog").expect("shipped catalog is valid")
    }

    /// Parses `[{"name": .., "gram": [[..]]}, ..]`. Duplicate names and
    /// non-symmetric Gram matrices are rejected.
    pub fn from_json_str(s: &str, origin: &str) -> Result<Self> {
        let raw: Vec<Entry> = serde_json::from_str(s).map_err(|e| json_error(origin, e))?;
        let mut entries = BTreeMap::new();
        for Entry { name, gram } in raw {
            if entries.contains_key(&name) {
                return Err(Error::InvalidInput(format!("{origin}: duplicate lattice name `{name}`")));
            }
            let l = lattice_from_rows(&name, &gram)?;
            entries.insert(name, l);
        }
        Ok(Catalog { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&s, &path.display().to_string())
    }

    /// Explicit path, then `$K3CUSPS_CATALOG`, then the built-in table.
    pub fn resolve(path: Option<&Path>) -> Result<Self> {
        if let Some(p) = path {
            return Self::load(p);
        }
        match std::env::var_os(CATALOG_ENV) {
            Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
            _ => Ok(Self::builtin()),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn get(&self, name: &str) -> Option<&Lattice> {
        self.entries.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Lattice)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Resolves a lattice argument: a catalog name, a JSON file
    /// `{"gram": [[..]]}`, or a sum expression such as `U,2E6-,A4-,A1-`.
    /// With `default_sign`, bare root names like `A2` take that sign.
    pub fn lattice(&self, arg: &str, default_sign: Option<Sign>) -> Result<Lattice> {
        if let Some(l) = self.entries.get(arg) {
            return Ok(l.clone());
        }
        let path = Path::new(arg);
        if arg.ends_with(".json") || path.is_file() {
            let s = std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{arg}: {e}")))?;
            let f: LatticeFile = serde_json::from_str(&s).map_err(|e| json_error(arg, e))?;
            let name = f.name.unwrap_or_else(|| arg.to_string());
            return lattice_from_rows(&name, &f.gram);
        }
        let lookup = |body: &str| -> Option<Lattice> {
            if let Some(l) = self.entries.get(body) {
                return Some(l.clone());
            }
            let sign = default_sign?;
            let bare = body.len() > 1
                && matches!(body.as_bytes()[0], b'A' | b'D' | b'E')
                && body[1..].bytes().all(|b| b.is_ascii_digit());
            if bare {
                standard_lattice(body, sign).ok()
            } else {
                None
            }
        };
        parse_sum(arg, &lookup)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn builtin_entries() {
        let c = Catalog::builtin();
        assert!(c.len() >= 11);
        for name in ["A2+", "A2-", "E6+", "E6-", "E8+", "E8-", "U", "U(3)", "A4-", "A1-", "D5-", "M", "N", "N0"] {
            assert!(c.get(name).is_some(), "{name}");
        }
        assert_eq!(c.get("N0").unwrap().determinant(), BigInt::from(90));
        assert_eq!(c.get("M").unwrap().signature(), (3, 0, 1));
        assert_eq!(c.get("N").unwrap().signature(), (1, 0, 3));
        for (_, l) in c.iter() {
            assert!(l.is_even() && !l.is_degenerate());
        }
    }

    #[test]
    fn rejects_bad_files() {
        let dup = r#"[{"name":"x","gram":[[2]]},{"name":"x","gram":[[4]]}]"#;
        let e = Catalog::from_json_str(dup, "t").unwrap_err().to_string();
        assert!(e.contains("duplicate"), "{e}");
        let asym = r#"[{"name":"x","gram":[[2,1],[0,2]]}]"#;
        assert!(Catalog::from_json_str(asym, "t").unwrap_err().to_string().contains("symmetric"));
        let broken = "[\n{\"name\": \"x\",\n \"gram\": [[2]]\n";
        let e = Catalog::from_json_str(broken, "t").unwrap_err().to_string();
        assert!(e.contains("line 4"), "{e}");
    }

    #[test]
    fn lattice_arguments() {
        let c = Catalog::builtin();
        assert_eq!(c.lattice("N0", None).unwrap().rank(), 19);
        assert_eq!(c.lattice("U(3),A2+", None).unwrap().gram(), c.get("M").unwrap().gram());
        assert_eq!(c.lattice("A2", Some(Sign::Negative)).unwrap().gram(), c.get("A2-").unwrap().gram());
        assert!(c.lattice("A2", None).is_err());
        assert!(c.lattice("Q7", Some(Sign::Negative)).is_err());
    }
}
