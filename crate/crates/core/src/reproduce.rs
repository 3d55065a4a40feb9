//! The nine end-to-end checks behind `k3cusps reproduce all`.

use std::collections::BTreeSet;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use serde_json::{json, Value};

use crate::catalog::Catalog;
use crate::codes::{self, TernaryCode};
use crate::elliptic::{self, FiberConfiguration, SectionData};
use crate::error::{Error, Result};
use crate::exact::{self, rat, IntMatrix};
use crate::fqf::{self, FiniteQuadraticForm};
use crate::glue::{self, AmbientSpec, Obstruction};
use crate::lattice::{genus_equal, isometric_definite, standard_lattice, Lattice, Sign};
use crate::par::Strategy;
use crate::traces::{self, EigenvalueMultiset};

pub const FAMILY_X: &str = include_str!("../data/family_x.json");
pub const FAMILY_Y: &str = include_str!("../data/family_y.json");

/// `(family, P·O, components, expected height)`
pub const SECTIONS: [(&str, u32, &[usize], (i64, i64)); 4] = [
    ("X", 0, &[1, 0, 2, 1, 0], (29, 30)),
    ("X", 1, &[1, 1, 1, 1, 0], (61, 30)),
    ("X", 0, &[1, 1, 0, 1, 0], (5, 6)),
    ("Y", 0, &[1, 0, 2, 0], (17, 12)),
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub anchor: &'static str,
    pub passed: bool,
    pub elapsed_ms: u64,
    pub detail: Value,
}

type Check = fn(&Catalog, Strategy) -> Result<(bool, Value)>;

const CHECKS: [(&str, &str, Check); 9] = [
    (
        "code search",
        "[9,3] ternary codes with weights {6,9} glue 9A2 to an index-27 lattice with q_L = -q_M and no new roots",
        code_search,
    ),
    ("weight-3 exclusion", "gluing along a weight-3 word creates roots outside 9A2", weight_three),
    ("supersingular pipeline", "sigma = 2 is feasible iff p = 2 mod 3; sigma >= 3 fails the length bound", pipeline),
    ("duality chain", "N^v(3) is in the genus of U+A2 and A2^v(3) is isometric to A2", duality),
    ("Lefschetz suite", "an order-3 action with H1 eigenvalues w,w,w2,w2 has 9 fixed points", lefschetz),
    ("Mumford filter", "endomorphism types III-ii, IV-ii, IV-iii are excluded and rho <= 3", mumford),
    ("heights and discriminants", "heights 29/30, 61/30, 5/6, 17/12 and det NS = -87, -183", heights),
    (
        "N0 rigidity",
        "|d(N0)| = 90, A_N0 has no isotropic vectors, and N0 fails the length bound in Lambda_{p,2}",
        n0_rigidity,
    ),
    ("oracle equivalence", "enumeration, isomorphism and gluing agree with brute-force oracles", oracles),
];

pub fn criteria() -> Vec<(u32, &'static str, &'static str)> {
    CHECKS.iter().enumerate().map(|(i, (n, a, _))| (i as u32 + 1, *n, *a)).collect()
}

pub fn run_all(catalog: &Catalog, strategy: Strategy) -> Vec<Outcome> {
    (1..=CHECKS.len() as u32).map(|id| run_one(id, catalog, strategy)).collect()
}

pub fn run_one(id: u32, catalog: &Catalog, strategy: Strategy) -> Outcome {
    let (name, anchor, check) = CHECKS[(id - 1) as usize];
    let start = Instant::now();
    let (passed, detail) = match check(catalog, strategy) {
        Ok(r) => r,
        Err(e) => (false, json!({ "error": e.to_string() })),
    };
    Outcome { id, name, anchor, passed, elapsed_ms: start.elapsed().as_millis() as u64, detail }
}

fn named(catalog: &Catalog, name: &str) -> Result<Lattice> {
    catalog.get(name).cloned().ok_or_else(|| Error::UnknownName(name.into()))
}

fn code_search(catalog: &Catalog, strategy: Strategy) -> Result<(bool, Value)> {
    let q_m = fqf::disc_form(&named(catalog, "M")?)?.form.negate();
    let found = codes::search_codes(9, 3, &BTreeSet::from([6, 9]), strategy)?;
    let mut ok = !found.is_empty();
    let mut rows = Vec::new();
    for code in &found {
        let cl = codes::code_to_overlattice(code)?;
        let det = cl.lattice.determinant();
        let (roots, outside) = codes::verify_no_extra_roots(&cl.lattice, &cl.root_sublattice, strategy)?;
        let q_l = fqf::disc_form(&cl.lattice)?.form;
        let iso = q_l.is_isomorphic(&q_m)?.is_some();
        ok &= det.abs() == BigInt::from(27) && roots == 27 && outside == 0 && iso;
        rows.push(json!({
            "code": code.to_json(),
            "determinant": det.to_string(),
            "root_pairs": roots,
            "outside": outside,
            "q_L_iso_minus_q_M": iso,
        }));
    }
    Ok((ok, json!({ "classes": found.len(), "codes": rows })))
}

fn weight_three(_: &Catalog, strategy: Strategy) -> Result<(bool, Value)> {
    let code = TernaryCode::new(9, &[vec![1, 1, 1, 0, 0, 0, 0, 0, 0]])?;
    let cl = codes::code_to_overlattice(&code)?;
    let (roots, outside) = codes::verify_no_extra_roots(&cl.lattice, &cl.root_sublattice, strategy)?;
    Ok((outside >= 1, json!({ "root_pairs": roots, "outside": outside })))
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn pipeline(_: &Catalog, _: Strategy) -> Result<(bool, Value)> {
    let mut ok = true;
    let mut bad = Vec::new();
    let primes: Vec<u64> = (5..=97).filter(|&p| is_prime(p)).collect();
    for &p in &primes {
        let v = glue::theorem2_pipeline(p, 2)?;
        if v.feasible != (p % 3 == 2) {
            ok = false;
            bad.push(json!({ "p": p, "sigma": 2 }));
        }
        for sigma in 3..=5 {
            let v = glue::theorem2_pipeline(p, sigma)?;
            if v.feasible || v.obstruction != Obstruction::LengthBound {
                ok = false;
                bad.push(json!({ "p": p, "sigma": sigma }));
            }
        }
    }
    Ok((ok, json!({ "primes": primes, "disagreements": bad })))
}

fn duality(catalog: &Catalog, _: Strategy) -> Result<(bool, Value)> {
    let m = named(catalog, "M")?;
    let u_a2 = Lattice::direct_sum(&[named(catalog, "U")?, named(catalog, "A2+")?]);
    let genus = genus_equal(&m.dual_rescaled(3)?, &u_a2)?;
    let a2 = standard_lattice("A2", Sign::Positive)?;
    let iso = isometric_definite(&a2.dual_rescaled(3)?, &a2)?.is_some();
    Ok((genus && iso, json!({ "genus_equal": genus, "isometric": iso })))
}

fn lefschetz(_: &Catalog, _: Strategy) -> Result<(bool, Value)> {
    let h1 = EigenvalueMultiset::parse("w,w,w2,w2")?;
    let fixed = traces::lefschetz_number(&h1)?;
    let trivial = traces::lefschetz_number(&EigenvalueMultiset::parse("1,1,1,1")?)?;
    let h2 = traces::exterior_square(&h1)?;
    let inv = traces::invariant_dimension(&h2);
    let ok = fixed == 9 && trivial == 0 && h2 == EigenvalueMultiset::new(4, 1, 1) && inv == 4;
    Ok((ok, json!({ "fixed_points": fixed, "identity": trivial, "h2": h2.labels(), "invariant_dimension": inv })))
}

fn mumford(_: &Catalog, _: Strategy) -> Result<(bool, Value)> {
    let rows = traces::mumford_filter(2)?;
    let rho: Vec<u32> = rows.iter().map(|r| r.rho).collect();
    let excluded: Vec<&str> = rows.iter().filter(|r| !r.admissible).map(|r| r.label).collect();
    let max = traces::max_admissible_rho(&rows);
    let ok = rho == [1, 2, 3, 1, 2, 1, 4, 2] && excluded == ["III-ii", "IV-ii", "IV-iii"] && max == Some(3);
    Ok((ok, json!({ "rho": rho, "excluded": excluded, "max_rho": max })))
}

fn heights(_: &Catalog, _: Strategy) -> Result<(bool, Value)> {
    let x = FiberConfiguration::from_json_str(FAMILY_X)?;
    let y = FiberConfiguration::from_json_str(FAMILY_Y)?;
    let mut ok = x.euler() == 24 && y.euler() == 24;
    let mut values = Vec::new();
    let mut discs = Vec::new();
    for (fam, p_o, comps, (a, b)) in SECTIONS {
        let config = if fam == "X" { &x } else { &y };
        let h = elliptic::section_height(config, &SectionData { p_o, components: comps.to_vec() })?;
        ok &= h.value == rat(a, b);
        let d = elliptic::shioda_tate_disc(config, &[vec![h.value.clone()]], 1)?;
        values.push(exact::format_rational(&h.value));
        discs.push(exact::format_rational(&d));
    }
    ok &= discs[0] == "-87" && discs[1] == "-183";
    Ok((ok, json!({ "heights": values, "discriminants": discs, "euler": [x.euler(), y.euler()] })))
}

fn n0_rigidity(catalog: &Catalog, _: Strategy) -> Result<(bool, Value)> {
    let n0 = named(catalog, "N0")?;
    let scan = elliptic::ns_overlattice_scan(&n0)?;
    let mut ok = scan.determinant.abs() == BigInt::from(90)
        && scan.nonzero_isotropic_count == 0
        && !scan.proper_even_overlattice_exists;
    let mut verdicts = Vec::new();
    for p in [7, 13] {
        let v = glue::embedding_obstruction(&n0, &AmbientSpec::supersingular(p, 2)?)?;
        ok &= !v.feasible && v.obstruction == Obstruction::LengthBound;
        verdicts.push(json!({ "p": p, "obstruction": v.obstruction }));
    }
    Ok((ok, json!({ "scan": scan, "embeddings": verdicts })))
}

/// Nonzero vectors with `|v·v| <= bound` inside the box `|x_i| <= sqrt(bound · |G⁻¹_ii|)`,
/// one per `±` pair.
pub fn box_short_vectors(l: &Lattice, bound: u64) -> Result<Vec<Vec<i64>>> {
    let n = l.rank();
    let inv = exact::rational_inverse(l.gram())?;
    let radius: Vec<i64> = (0..n)
        .map(|i| {
            let r = (&inv[i][i] * rat(bound as i64, 1)).abs();
            let mut k = 0i64;
            while rat((k + 1) * (k + 1), 1) <= r {
                k += 1;
            }
            k
        })
        .collect();
    let mut out = Vec::new();
    let mut x: Vec<i64> = radius.iter().map(|r| -r).collect();
    loop {
        let first = x.iter().find(|&&c| c != 0);
        if first.is_some_and(|&c| c > 0) {
            let norm = l.pair(&x, &x);
            if norm.abs() <= BigInt::from(bound) {
                out.push(x.clone());
            }
        }
        let mut i = n;
        loop {
            if i == 0 {
                out.sort();
                return Ok(out);
            }
            i -= 1;
            if x[i] < radius[i] {
                x[i] += 1;
                break;
            }
            x[i] = -radius[i];
        }
    }
}

fn form_corpus(catalog: &Catalog) -> Result<Vec<(String, FiniteQuadraticForm)>> {
    let mut out = Vec::new();
    for name in ["A2+", "A2-", "U(3)", "M", "N", "E6+", "E6-"] {
        out.push((name.to_string(), fqf::disc_form(&named(catalog, name)?)?.form));
    }
    let a2 = fqf::disc_form(&named(catalog, "A2+")?)?.form;
    out.push(("2A2+".into(), a2.orthogonal_sum(&a2)));
    Ok(out)
}

fn random_unimodular(n: usize, rng: &mut StdRng) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    for _ in 0..3 * n {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i == j {
            continue;
        }
        let c = BigInt::from(rng.gen_range(-2i64..=2));
        for r in 0..n {
            let v = m.get(r, i) + &c * m.get(r, j);
            m.set(r, i, v);
        }
    }
    m
}

/// `k` copies of `U(3)` in a random basis, plus an isotropic subgroup grown
/// from random elements.
pub fn random_glue_instance(rng: &mut StdRng) -> Result<(Lattice, fqf::Subgroup, BigInt)> {
    let k = rng.gen_range(1..=3);
    let u3 = standard_lattice("U", Sign::Positive)?.rescale(3)?;
    let base = Lattice::direct_sum(&vec![u3; k]);
    let t = random_unimodular(2 * k, rng);
    let l = Lattice::new(t.transpose().mul(base.gram())?.mul(&t)?)?;
    let form = fqf::disc_form(&l)?.form;
    let mut gens: Vec<Vec<u64>> = Vec::new();
    for _ in 0..8 {
        let x: Vec<u64> = form.orders().iter().map(|&d| rng.gen_range(0..d)).collect();
        let fits = form.q_value(&x)?.is_zero()
            && gens.iter().map(|g| form.b_value(g, &x)).collect::<Result<Vec<_>>>()?.iter().all(Zero::is_zero);
        if fits {
            gens.push(x);
        }
    }
    let h = fqf::Subgroup::new(&form, gens)?;
    let order = h.order(&form)?;
    Ok((l, h, order))
}

fn oracles(catalog: &Catalog, strategy: Strategy) -> Result<(bool, Value)> {
    let mut ok = true;
    let mut checked = Vec::new();
    for (name, l) in catalog.iter() {
        if l.rank() > 4 || l.definiteness().is_none() {
            continue;
        }
        let fast: Vec<Vec<i64>> = l.short_vectors_with(4, strategy)?.into_iter().map(|v| v.coords).collect();
        let slow = box_short_vectors(l, 4)?;
        ok &= fast == slow;
        checked.push(json!({ "lattice": name, "vectors": slow.len() }));
    }

    let corpus = form_corpus(catalog)?;
    let n = corpus.len();
    let mut rel = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            rel[i][j] = corpus[i].1.is_isomorphic(&corpus[j].1)?.is_some();
        }
    }
    let reflexive = (0..n).all(|i| rel[i][i]);
    let symmetric = (0..n).all(|i| (0..n).all(|j| rel[i][j] == rel[j][i]));
    let transitive = (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| !(rel[i][j] && rel[j][k]) || rel[i][k])));
    ok &= reflexive && symmetric && transitive;

    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut glue_ok = 0;
    for _ in 0..50 {
        let (l, h, order) = random_glue_instance(&mut rng)?;
        let over = glue::overlattice(&l, &h)?;
        if over.lattice.determinant() * &order * &order == l.determinant() && !order.is_zero() {
            glue_ok += 1;
        }
    }
    ok &= glue_ok == 50;
    Ok((
        ok,
        json!({
            "short_vectors": checked,
            "forms": corpus.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
            "reflexive": reflexive,
            "symmetric": symmetric,
            "transitive": transitive,
            "glue_instances_ok": glue_ok,
        }),
    ))
}
