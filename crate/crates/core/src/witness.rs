//! Finite `(K, ε)`-action witnesses and the exact defect checker.
//!
//! A witness stores tables only for `{1} ∪ K ∪ K·K`: those are the only
//! elements the three conditions inspect. Defects are counted exactly and
//! reported as rationals with denominator `N`.

use crate::error::{Error, Result};
use crate::monoid::{ElementRef, FiniteMonoid, StructuredMonoid};
use crate::rational::{self, Rational};
use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};
use std::collections::HashMap;

/// Largest ground set the crate materialises by default.
pub const DEFAULT_GROUND_CAP: usize = 20_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActingElement {
    pub enc: ElementRef,
    pub label: String,
}

/// A map `M × X → X` restricted to the acting elements, on `X = 0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionWitness {
    pub n: usize,
    pub elements: Vec<ActingElement>,
    pub tables: Vec<Vec<u32>>,
    /// `[i, j, k]`: acting element `k` is the product of elements `i` and `j`.
    pub products: Vec<[usize; 3]>,
}

impl ActionWitness {
    pub fn index_of(&self, e: &ElementRef) -> Option<usize> {
        self.elements.iter().position(|a| &a.enc == e)
    }

    pub fn table(&self, e: &ElementRef) -> Option<&[u32]> {
        self.index_of(e).map(|i| self.tables[i].as_slice())
    }

    /// Structural checks: table count, totality and range.
    pub fn validate_shape(&self) -> Result<()> {
        let malformed = |message: String| Error::MalformedFile {
            line: 0,
            column: 0,
            message,
        };
        if self.tables.len() != self.elements.len() {
            return Err(malformed(format!(
                "{} tables for {} elements",
                self.tables.len(),
                self.elements.len()
            )));
        }
        for (i, t) in self.tables.iter().enumerate() {
            if t.len() != self.n {
                return Err(malformed(format!(
                    "tables[{i}] has length {}, expected N = {}",
                    t.len(),
                    self.n
                )));
            }
            if let Some(j) = t.iter().position(|&x| x as usize >= self.n) {
                return Err(malformed(format!("tables[{i}][{j}] = {} out of range", t[j])));
            }
        }
        let m = self.elements.len();
        for (p, tr) in self.products.iter().enumerate() {
            if tr.iter().any(|&x| x >= m) {
                return Err(malformed(format!("products[{p}] refers to a missing element")));
            }
        }
        let mut seen = HashMap::new();
        for (i, e) in self.elements.iter().enumerate() {
            if let Some(j) = seen.insert(&e.enc, i) {
                return Err(malformed(format!("elements[{j}] and elements[{i}] share an encoding")));
            }
        }
        Ok(())
    }
}

/// Raw defect counts over one ground set; indices refer to acting elements.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DefectCounts {
    pub identity_violations: u64,
    /// `(g, h, #{x : g·(h·x) ≠ (gh)·x})` for ordered pairs of `K`.
    pub mult: Vec<(usize, usize, u64)>,
    /// `(g, h, #{x : g·x = h·x})` for unordered pairs `g ≠ h` of `K`.
    pub sep: Vec<(usize, usize, u64)>,
}

impl DefectCounts {
    pub fn max_mult(&self, n: usize) -> Rational {
        max_fraction(self.mult.iter().map(|t| t.2), n)
    }

    pub fn max_sep(&self, n: usize) -> Rational {
        max_fraction(self.sep.iter().map(|t| t.2), n)
    }

    pub fn passes(&self, n: usize, eps: &Rational) -> bool {
        self.identity_violations == 0 && &self.max_mult(n) <= eps && &self.max_sep(n) <= eps
    }

    fn add(&mut self, other: &DefectCounts) {
        self.identity_violations += other.identity_violations;
        for (a, b) in self.mult.iter_mut().zip(&other.mult) {
            a.2 += b.2;
        }
        for (a, b) in self.sep.iter_mut().zip(&other.sep) {
            a.2 += b.2;
        }
    }
}

fn max_fraction(counts: impl Iterator<Item = u64>, n: usize) -> Rational {
    let m = counts.max().unwrap_or(0);
    if n == 0 {
        return rational::zero();
    }
    rational::ratio(m, n as u64)
}

/// Counts identity, multiplicativity and separation defects.
///
/// `k` lists acting-element indices (already deduplicated) and `product(i, j)`
/// gives the index of the product of elements `i` and `j`. The ground set is
/// split into blocks counted on `workers` threads; the sums do not depend on
/// the split.
pub fn measure_tables<P>(
    n: usize,
    tables: &[Vec<u32>],
    identity: usize,
    k: &[usize],
    product: P,
    workers: usize,
) -> DefectCounts
where
    P: Fn(usize, usize) -> usize,
{
    let mut template = DefectCounts::default();
    let mut mult_pairs = Vec::new();
    for &g in k {
        for &h in k {
            template.mult.push((g, h, 0));
            mult_pairs.push((g, h, product(g, h)));
        }
    }
    for (a, &g) in k.iter().enumerate() {
        for &h in &k[a + 1..] {
            template.sep.push((g, h, 0));
        }
    }
    let count_block = |range: std::ops::Range<usize>| {
        let mut c = template.clone();
        let id = &tables[identity];
        c.identity_violations = range.clone().filter(|&x| id[x] as usize != x).count() as u64;
        for (slot, &(g, h, gh)) in c.mult.iter_mut().zip(&mult_pairs) {
            let (tg, th, tgh) = (&tables[g], &tables[h], &tables[gh]);
            slot.2 = range
                .clone()
                .filter(|&x| tg[th[x] as usize] != tgh[x])
                .count() as u64;
        }
        for slot in c.sep.iter_mut() {
            let (tg, th) = (&tables[slot.0], &tables[slot.1]);
            slot.2 = range.clone().filter(|&x| tg[x] == th[x]).count() as u64;
        }
        c
    };
    let workers = workers.max(1);
    if workers == 1 || n < 2 {
        return count_block(0..n);
    }
    let block = n.div_ceil(workers);
    let ranges: Vec<std::ops::Range<usize>> = (0..workers)
        .map(|w| (w * block).min(n)..((w + 1) * block).min(n))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    let parts: Vec<DefectCounts> = pool.install(|| ranges.into_par_iter().map(count_block).collect());
    let mut total = template;
    for p in &parts {
        total.add(p);
    }
    total
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairDefect {
    pub g: String,
    pub h: String,
    #[serde(serialize_with = "ser_biguint")]
    pub count: BigUint,
    #[serde(with = "rational::serde_ratio")]
    pub fraction: Rational,
}

/// Exact defect measurements of a witness for a given `K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DefectReport {
    #[serde(rename = "N", serialize_with = "ser_biguint")]
    pub ground_size: BigUint,
    pub identity_violations: u64,
    #[serde(with = "rational::serde_ratio")]
    pub max_mult_defect: Rational,
    #[serde(with = "rational::serde_ratio")]
    pub max_sep_overlap: Rational,
    pub mult_defects: Vec<PairDefect>,
    pub sep_overlaps: Vec<PairDefect>,
}

fn ser_biguint<S: Serializer>(n: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    match n.to_u64() {
        Some(v) => s.serialize_u64(v),
        None => s.serialize_str(&n.to_string()),
    }
}

impl DefectReport {
    pub fn from_counts(n: usize, counts: &DefectCounts, labels: &[String]) -> Self {
        let pair = |&(g, h, c): &(usize, usize, u64)| PairDefect {
            g: labels[g].clone(),
            h: labels[h].clone(),
            count: BigUint::from(c),
            fraction: if n == 0 {
                rational::zero()
            } else {
                rational::ratio(c, n as u64)
            },
        };
        DefectReport {
            ground_size: BigUint::from(n),
            identity_violations: counts.identity_violations,
            max_mult_defect: counts.max_mult(n),
            max_sep_overlap: counts.max_sep(n),
            mult_defects: counts.mult.iter().map(pair).collect(),
            sep_overlaps: counts.sep.iter().map(pair).collect(),
        }
    }

    pub fn mult_defect(&self, g: &str, h: &str) -> Option<&Rational> {
        self.mult_defects
            .iter()
            .find(|p| p.g == g && p.h == h)
            .map(|p| &p.fraction)
    }

    /// Separation overlap of an unordered pair.
    pub fn sep_overlap(&self, g: &str, h: &str) -> Option<&Rational> {
        self.sep_overlaps
            .iter()
            .find(|p| (p.g == g && p.h == h) || (p.g == h && p.h == g))
            .map(|p| &p.fraction)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "N = {}\nidentity violations: {}\nmax multiplicative defect: {} ({:.6})\nmax separation overlap: {} ({:.6})\n",
            self.ground_size,
            self.identity_violations,
            rational::render(&self.max_mult_defect),
            rational::to_f64(&self.max_mult_defect),
            rational::render(&self.max_sep_overlap),
            rational::to_f64(&self.max_sep_overlap),
        );
        for p in &self.mult_defects {
            out += &format!("  mult  {} . {}: {}\n", p.g, p.h, rational::render(&p.fraction));
        }
        for p in &self.sep_overlaps {
            out += &format!("  sep   {} | {}: {}\n", p.g, p.h, rational::render(&p.fraction));
        }
        out
    }
}

/// `true` iff the identity holds everywhere and both maxima are at most `ε`.
pub fn passes(report: &DefectReport, eps: &Rational) -> bool {
    report.identity_violations == 0
        && &report.max_mult_defect <= eps
        && &report.max_sep_overlap <= eps
}

fn dedup(k: &[ElementRef]) -> Vec<ElementRef> {
    let mut out: Vec<ElementRef> = Vec::new();
    for e in k {
        if !out.contains(e) {
            out.push(e.clone());
        }
    }
    out
}

/// Measures `W` as a `(K, ε)`-action of `M`. Deterministic for any `workers`.
pub fn check_witness(
    m: &dyn StructuredMonoid,
    k: &[ElementRef],
    w: &ActionWitness,
    workers: usize,
) -> Result<DefectReport> {
    w.validate_shape()?;
    let index: HashMap<&ElementRef, usize> = w
        .elements
        .iter()
        .enumerate()
        .map(|(i, a)| (&a.enc, i))
        .collect();
    let lookup = |e: &ElementRef| {
        index
            .get(e)
            .copied()
            .ok_or_else(|| Error::MissingTable(m.label(e)))
    };
    let one = lookup(&m.one())?;
    let k = dedup(k);
    let k_idx: Vec<usize> = k.iter().map(lookup).collect::<Result<_>>()?;
    let mut products = HashMap::new();
    for (a, g) in k.iter().enumerate() {
        for (b, h) in k.iter().enumerate() {
            products.insert((k_idx[a], k_idx[b]), lookup(&m.multiply(g, h))?);
        }
    }
    for &[i, j, p] in &w.products {
        if let Some(&q) = products.get(&(i, j)) {
            if q != p {
                return Err(Error::MalformedFile {
                    line: 0,
                    column: 0,
                    message: format!(
                        "products entry [{i},{j},{p}] disagrees with the monoid product ({})",
                        w.elements[q].label
                    ),
                });
            }
        }
    }
    let counts = measure_tables(w.n, &w.tables, one, &k_idx, |i, j| products[&(i, j)], workers);
    let labels: Vec<String> = w.elements.iter().map(|a| a.label.clone()).collect();
    Ok(DefectReport::from_counts(w.n, &counts, &labels))
}

/// Parameters of the diagonal-power oracle witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalPlan {
    /// Largest agreement fraction `|{m : gm = hm}| / |M|` over `g ≠ h ∈ K`.
    pub agreement: Rational,
    pub power: u32,
    pub ground_size: BigUint,
}

fn dedup_indices(k: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    for &x in k {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

fn agreement_counts(m: &FiniteMonoid, k: &[usize]) -> Vec<(usize, usize, u64)> {
    let mut out = Vec::new();
    for (a, &g) in k.iter().enumerate() {
        for &h in &k[a + 1..] {
            let c = (0..m.size())
                .filter(|&x| m.multiply(g, x) == m.multiply(h, x))
                .count() as u64;
            out.push((g, h, c));
        }
    }
    out
}

/// Chooses the smallest power `n` with `p^n ≤ ε`.
pub fn diagonal_power_plan(m: &FiniteMonoid, k: &[usize], eps: &Rational) -> Result<DiagonalPlan> {
    let k = dedup_indices(k);
    if let Some(&bad) = k.iter().find(|&&x| x >= m.size()) {
        return Err(Error::UnknownElement(bad.to_string()));
    }
    let size = m.size() as u64;
    let max_agree = agreement_counts(m, &k).iter().map(|t| t.2).max().unwrap_or(0);
    let agreement = rational::ratio(max_agree, size);
    let mut power = 1u32;
    if max_agree > 0 {
        if eps <= &rational::zero() {
            return Err(Error::InvalidArgument("epsilon must be positive".into()));
        }
        while &rational::pow(&agreement, power) > eps {
            power += 1;
        }
    }
    Ok(DiagonalPlan {
        agreement,
        power,
        ground_size: BigUint::from(size).pow(power),
    })
}

/// Independent oracle: `X = M^n` with componentwise left multiplication.
///
/// The action is genuine, so multiplicative defects vanish; separation
/// overlaps are the `n`-th powers of the agreement fractions.
pub fn diagonal_power_witness(
    m: &FiniteMonoid,
    k: &[usize],
    eps: &Rational,
    ground_cap: usize,
) -> Result<ActionWitness> {
    let plan = diagonal_power_plan(m, k, eps)?;
    let n = match plan.ground_size.to_usize() {
        Some(n) if n <= ground_cap => n,
        _ => {
            return Err(Error::CapExceeded {
                what: "diagonal power ground set",
                needed: plan.ground_size.to_string(),
                cap: ground_cap,
            })
        }
    };
    let k = dedup_indices(k);
    let mut acting = vec![m.identity()];
    for &g in &k {
        if !acting.contains(&g) {
            acting.push(g);
        }
    }
    for &g in &k {
        for &h in &k {
            let gh = m.multiply(g, h);
            if !acting.contains(&gh) {
                acting.push(gh);
            }
        }
    }
    let size = m.size();
    let power = plan.power as usize;
    let tables: Vec<Vec<u32>> = acting
        .par_iter()
        .map(|&g| {
            (0..n)
                .map(|x| {
                    // digits in base |M|, most significant first
                    let mut rest = x;
                    let mut out = 0usize;
                    let mut scale = 1usize;
                    for _ in 0..power {
                        let digit = rest % size;
                        rest /= size;
                        out += m.multiply(g, digit) * scale;
                        scale *= size;
                    }
                    out as u32
                })
                .collect()
        })
        .collect();
    let pos = |e: usize| acting.iter().position(|&a| a == e).expect("closed");
    let mut products = Vec::new();
    for &g in &k {
        for &h in &k {
            products.push([pos(g), pos(h), pos(m.multiply(g, h))]);
        }
    }
    Ok(ActionWitness {
        n,
        elements: acting
            .iter()
            .map(|&i| ActingElement {
                enc: ElementRef::from_index(i),
                label: m.name(i).to_string(),
            })
            .collect(),
        tables,
        products,
    })
}

/// Report for the diagonal-power witness without materialising `M^n`.
pub fn diagonal_power_report(m: &FiniteMonoid, k: &[usize], eps: &Rational) -> Result<(DiagonalPlan, DefectReport)> {
    let plan = diagonal_power_plan(m, k, eps)?;
    let k = dedup_indices(k);
    let size = BigUint::from(m.size());
    let total = plan.ground_size.clone();
    let frac = |c: &BigUint| Rational::new(c.clone().into(), total.clone().into());
    let mult_defects: Vec<PairDefect> = k
        .iter()
        .flat_map(|&g| k.iter().map(move |&h| (g, h)))
        .map(|(g, h)| PairDefect {
            g: m.name(g).to_string(),
            h: m.name(h).to_string(),
            count: BigUint::zero(),
            fraction: rational::zero(),
        })
        .collect();
    let sep_overlaps: Vec<PairDefect> = agreement_counts(m, &k)
        .into_iter()
        .map(|(g, h, c)| {
            let count = BigUint::from(c).pow(plan.power);
            PairDefect {
                g: m.name(g).to_string(),
                h: m.name(h).to_string(),
                fraction: frac(&count),
                count,
            }
        })
        .collect();
    let max_sep = sep_overlaps
        .iter()
        .map(|p| p.fraction.clone())
        .max()
        .unwrap_or_else(rational::zero);
    debug_assert!(size >= BigUint::one());
    let report = DefectReport {
        ground_size: total,
        identity_violations: 0,
        max_mult_defect: rational::zero(),
        max_sep_overlap: max_sep,
        mult_defects,
        sep_overlaps,
    };
    Ok((plan, report))
}

#[derive(Serialize, Deserialize)]
struct WitnessFile {
    #[serde(rename = "N")]
    n: usize,
    elements: Vec<ElementEntry>,
    tables: Vec<Vec<u32>>,
    products: Vec<[usize; 3]>,
}

#[derive(Serialize, Deserialize)]
struct ElementEntry {
    enc: String,
    label: String,
}

pub fn witness_to_json(w: &ActionWitness) -> String {
    let file = WitnessFile {
        n: w.n,
        elements: w
            .elements
            .iter()
            .map(|a| ElementEntry {
                enc: B64.encode(a.enc.as_bytes()),
                label: a.label.clone(),
            })
            .collect(),
        tables: w.tables.clone(),
        products: w.products.clone(),
    };
    let mut s = serde_json::to_string(&file).expect("witness serializes");
    s.push('\n');
    s
}

pub fn witness_from_json(s: &str) -> Result<ActionWitness> {
    let file: WitnessFile = serde_json::from_str(s)?;
    let elements = file
        .elements
        .into_iter()
        .enumerate()
        .map(|(i, e)| {
            B64.decode(e.enc.as_bytes())
                .map(|bytes| ActingElement {
                    enc: ElementRef::from_bytes(bytes),
                    label: e.label,
                })
                .map_err(|err| Error::MalformedFile {
                    line: 0,
                    column: 0,
                    message: format!("elements[{i}].enc: {err}"),
                })
        })
        .collect::<Result<Vec<_>>>()?;
    let w = ActionWitness {
        n: file.n,
        elements,
        tables: file.tables,
        products: file.products,
    };
    w.validate_shape()?;
    Ok(w)
}

pub fn write_witness(path: &std::path::Path, w: &ActionWitness) -> Result<()> {
    std::fs::write(path, witness_to_json(w))?;
    Ok(())
}

pub fn read_witness(path: &std::path::Path) -> Result<ActionWitness> {
    witness_from_json(&std::fs::read_to_string(path)?)
}
