use super::{Claim, ElementRef, MonoidFacts, StabiliserQuotient, StructuredMonoid};
use crate::error::{Error, Result};
use crate::green::GreenStructure;
use crate::groups::{Amenability, FiniteGroup, GroupElem, GroupHandle, Perm, PermGroup};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::sync::Arc;

/// Default bound on the order of table monoids.
pub const DEFAULT_TABLE_CAP: usize = 100_000;
/// Default bound on `n` for full transformation monoids.
pub const DEFAULT_TRANSFORMATION_CAP: usize = 5;
/// Largest order for which associativity is checked over all triples;
/// above it Light's test over a generating set is used.
const EXHAUSTIVE_ASSOCIATIVITY_LIMIT: usize = 300;

/// A monoid given by its multiplication table on `0..size`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMonoid {
    size: usize,
    table: Vec<u32>,
    names: Vec<String>,
    identity: usize,
}

/// Validates a table and locates its identity.
pub fn make_finite_monoid(table: Vec<Vec<usize>>, names: Vec<String>) -> Result<FiniteMonoid> {
    FiniteMonoid::with_cap(table, names, DEFAULT_TABLE_CAP)
}

impl FiniteMonoid {
    pub fn with_cap(table: Vec<Vec<usize>>, names: Vec<String>, cap: usize) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::BadIndex {
                row: 0,
                col: 0,
                detail: "empty table".into(),
            });
        }
        if n > cap {
            return Err(Error::CapExceeded {
                what: "table monoid order",
                needed: n.to_string(),
                cap,
            });
        }
        if names.len() != n {
            return Err(Error::BadNames(format!("{} names for {} elements", names.len(), n)));
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::BadNames(format!("duplicate name {name:?}")));
            }
        }
        let mut flat = Vec::with_capacity(n * n);
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::BadIndex {
                    row: i,
                    col: row.len(),
                    detail: format!("row has {} entries, expected {n}", row.len()),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v >= n {
                    return Err(Error::BadIndex {
                        row: i,
                        col: j,
                        detail: format!("entry {v} not in [0, {n})"),
                    });
                }
                flat.push(v as u32);
            }
        }
        Self::from_flat(n, flat, names)
    }

    fn from_flat(size: usize, table: Vec<u32>, names: Vec<String>) -> Result<Self> {
        let at = |i: usize, j: usize| table[i * size + j] as usize;
        let identity = (0..size)
            .find(|&e| (0..size).all(|x| at(e, x) == x && at(x, e) == x))
            .ok_or(Error::NoIdentity)?;
        let m = FiniteMonoid {
            size,
            table,
            names,
            identity,
        };
        m.check_associative()?;
        Ok(m)
    }

    fn check_associative(&self) -> Result<()> {
        let n = self.size;
        let middles: Vec<usize> = if n <= EXHAUSTIVE_ASSOCIATIVITY_LIMIT {
            (0..n).collect()
        } else {
            self.right_generating_set()
        };
        // Light's test: the elements that associate as a middle factor form a
        // submagma, so checking a generating set covers everything.
        for &j in &middles {
            for i in 0..n {
                let ij = self.multiply(i, j);
                for k in 0..n {
                    if self.multiply(ij, k) != self.multiply(i, self.multiply(j, k)) {
                        return Err(Error::NotAssociative { i, j, k });
                    }
                }
            }
        }
        Ok(())
    }

    /// Greedy set `A` such that every element is a left-normed product over `A`.
    pub(crate) fn right_generating_set(&self) -> Vec<usize> {
        let n = self.size;
        let mut reached = vec![false; n];
        reached[self.identity] = true;
        let mut members = vec![self.identity];
        let mut gens: Vec<usize> = Vec::new();
        for g in 0..n {
            if reached[g] {
                continue;
            }
            gens.push(g);
            let mut stack = members.clone();
            while let Some(x) = stack.pop() {
                for &a in &gens {
                    let y = self.multiply(x, a);
                    if !reached[y] {
                        reached[y] = true;
                        members.push(y);
                        stack.push(y);
                    }
                }
            }
        }
        gens
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn multiply(&self, a: usize, b: usize) -> usize {
        self.table[a * self.size + b] as usize
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn table_rows(&self) -> Vec<Vec<usize>> {
        (0..self.size)
            .map(|i| (0..self.size).map(|j| self.multiply(i, j)).collect())
            .collect()
    }

    /// `{u : ∃v, uv = vu = 1}` in increasing order.
    pub fn units(&self) -> Vec<usize> {
        (0..self.size)
            .filter(|&u| {
                (0..self.size).any(|v| {
                    self.multiply(u, v) == self.identity && self.multiply(v, u) == self.identity
                })
            })
            .collect()
    }

    pub fn is_unit(&self, u: usize) -> bool {
        (0..self.size)
            .any(|v| self.multiply(u, v) == self.identity && self.multiply(v, u) == self.identity)
    }

    /// `∀x ∃y: xyx = x`.
    pub fn is_regular(&self) -> bool {
        (0..self.size).all(|x| self.is_regular_element(x))
    }

    pub fn is_regular_element(&self, x: usize) -> bool {
        (0..self.size).any(|y| self.multiply(self.multiply(x, y), x) == x)
    }

    pub fn idempotents(&self) -> Vec<usize> {
        (0..self.size)
            .filter(|&e| self.multiply(e, e) == e)
            .collect()
    }

    pub fn to_json(&self) -> String {
        let file = MonoidFile {
            size: self.size,
            identity: self.identity,
            names: self.names.clone(),
            table: self.table_rows(),
        };
        let mut s = serde_json::to_string(&file).expect("monoid serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: MonoidFile = serde_json::from_str(s)?;
        if file.size != file.table.len() {
            return Err(Error::MalformedFile {
                line: 0,
                column: 0,
                message: format!("size {} but {} table rows", file.size, file.table.len()),
            });
        }
        let m = make_finite_monoid(file.table, file.names)?;
        if m.identity != file.identity {
            return Err(Error::MalformedFile {
                line: 0,
                column: 0,
                message: format!(
                    "declared identity {} but the table's identity is {}",
                    file.identity, m.identity
                ),
            });
        }
        Ok(m)
    }
}

#[derive(Serialize, Deserialize)]
struct MonoidFile {
    size: usize,
    identity: usize,
    names: Vec<String>,
    table: Vec<Vec<usize>>,
}

/// The trivial monoid.
pub fn trivial() -> FiniteMonoid {
    make_finite_monoid(vec![vec![0]], vec!["1".into()]).expect("trivial monoid")
}

/// `{0, 1}` under multiplication: index 0 is the zero, index 1 the identity.
pub fn semilattice() -> FiniteMonoid {
    make_finite_monoid(vec![vec![0, 0], vec![0, 1]], vec!["0".into(), "1".into()])
        .expect("semilattice")
}

/// `Z/n` as a monoid, elements named `0..n`.
pub fn cyclic_group(n: usize) -> FiniteMonoid {
    let g = FiniteGroup::cyclic(n);
    let table = (0..n)
        .map(|i| (0..n).map(|j| g.multiply(i, j)).collect())
        .collect();
    make_finite_monoid(table, g.names().to_vec()).expect("cyclic group")
}

/// Full transformation monoid on `n` points, composing left to right:
/// `(f·g)(x) = g(f(x))`. Elements are named by their image strings.
pub fn make_transformation_monoid(n: usize) -> Result<FiniteMonoid> {
    transformation_monoid_with_cap(n, DEFAULT_TRANSFORMATION_CAP)
}

pub fn transformation_monoid_with_cap(n: usize, cap: usize) -> Result<FiniteMonoid> {
    if n == 0 {
        return Err(Error::InvalidArgument("transformation monoid needs n >= 1".into()));
    }
    if n > cap {
        return Err(Error::CapExceeded {
            what: "transformation monoid degree",
            needed: n.to_string(),
            cap,
        });
    }
    let size = n.pow(n as u32);
    let maps: Vec<Vec<usize>> = (0..size)
        .map(|mut code| {
            let mut f = vec![0; n];
            for x in (0..n).rev() {
                f[x] = code % n;
                code /= n;
            }
            f
        })
        .collect();
    let code = |f: &[usize]| f.iter().fold(0, |acc, &y| acc * n + y);
    let mut table = Vec::with_capacity(size * size);
    for f in &maps {
        for g in &maps {
            let fg: Vec<usize> = f.iter().map(|&y| g[y]).collect();
            table.push(code(&fg) as u32);
        }
    }
    let names = maps
        .iter()
        .map(|f| {
            f.iter()
                .map(|d| char::from_digit(*d as u32, 36).expect("digit"))
                .collect()
        })
        .collect();
    FiniteMonoid::from_flat(size, table, names)
}

/// Componentwise product; element `(i, j)` has index `i·|N| + j`.
pub fn direct_product(a: &FiniteMonoid, b: &FiniteMonoid) -> Result<FiniteMonoid> {
    direct_product_with_cap(a, b, DEFAULT_TABLE_CAP)
}

pub fn direct_product_with_cap(a: &FiniteMonoid, b: &FiniteMonoid, cap: usize) -> Result<FiniteMonoid> {
    let size = a.size * b.size;
    if size > cap {
        return Err(Error::CapExceeded {
            what: "direct product order",
            needed: size.to_string(),
            cap,
        });
    }
    let mut table = Vec::with_capacity(size * size);
    for i in 0..size {
        let (i1, i2) = (i / b.size, i % b.size);
        for j in 0..size {
            let (j1, j2) = (j / b.size, j % b.size);
            table.push((a.multiply(i1, j1) * b.size + b.multiply(i2, j2)) as u32);
        }
    }
    let names = (0..size)
        .map(|i| format!("({},{})", a.name(i / b.size), b.name(i % b.size)))
        .collect();
    FiniteMonoid::from_flat(size, table, names)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Cancellativity {
    pub left: bool,
    pub right: bool,
}

/// Left: no `a, x ≠ y` with `ax = ay`; right: no `a, x ≠ y` with `xa = ya`.
pub fn cancellativity_check(m: &FiniteMonoid) -> Cancellativity {
    let n = m.size;
    let injective = |f: &dyn Fn(usize) -> usize| {
        let mut seen = vec![false; n];
        (0..n).all(|x| !std::mem::replace(&mut seen[f(x)], true))
    };
    Cancellativity {
        left: (0..n).all(|a| injective(&|x| m.multiply(a, x))),
        right: (0..n).all(|a| injective(&|x| m.multiply(x, a))),
    }
}

/// A finite monoid behind the structured-monoid contract; everything the
/// contract asks for is computed.
pub struct FiniteStructured {
    monoid: FiniteMonoid,
    label: String,
    units: Vec<usize>,
    unit_pos: Vec<Option<u32>>,
    group: GroupHandle,
    green: GreenStructure,
}

impl FiniteStructured {
    pub fn new(monoid: FiniteMonoid) -> Self {
        Self::named(monoid, "finite monoid")
    }

    pub fn named(monoid: FiniteMonoid, label: &str) -> Self {
        let units = monoid.units();
        let mut unit_pos = vec![None; monoid.size()];
        for (p, &u) in units.iter().enumerate() {
            unit_pos[u] = Some(p as u32);
        }
        let table = units
            .iter()
            .map(|&a| {
                units
                    .iter()
                    .map(|&b| unit_pos[monoid.multiply(a, b)].expect("units are closed") as usize)
                    .collect()
            })
            .collect();
        let names = units.iter().map(|&u| monoid.name(u).to_string()).collect();
        let group = GroupHandle::finite(FiniteGroup::from_table(table, names).expect("unit group"));
        let green = GreenStructure::compute(&monoid);
        FiniteStructured {
            monoid,
            label: label.to_string(),
            units,
            unit_pos,
            group,
            green,
        }
    }

    pub fn monoid(&self) -> &FiniteMonoid {
        &self.monoid
    }

    pub fn green(&self) -> &GreenStructure {
        &self.green
    }

    pub fn units(&self) -> &[usize] {
        &self.units
    }

    fn idx(&self, e: &ElementRef) -> usize {
        let i = e.index().expect("table monoid element");
        assert!(i < self.monoid.size(), "element {i} out of range");
        i
    }

    /// The orbit of `s` under right translation by units, sorted.
    pub fn orbit(&self, s: usize) -> Vec<usize> {
        let mut seen = vec![false; self.monoid.size()];
        let mut orbit = Vec::new();
        for &u in &self.units {
            let t = self.monoid.multiply(s, u);
            if !seen[t] {
                seen[t] = true;
                orbit.push(t);
            }
        }
        orbit.sort_unstable();
        orbit
    }
}

struct FiniteOrbitQuotient {
    orbit: Vec<usize>,
    /// Permutation of the orbit induced by each unit (by unit position).
    perms: Vec<Perm>,
    quotient: GroupHandle,
}

impl StabiliserQuotient for FiniteOrbitQuotient {
    fn orbit_key(&self) -> ElementRef {
        ElementRef::from_index(self.orbit[0])
    }

    fn quotient(&self) -> &GroupHandle {
        &self.quotient
    }

    fn project(&self, g: &GroupElem) -> GroupElem {
        match g {
            GroupElem::Index(u) => GroupElem::Perm(self.perms[*u as usize].clone()),
            _ => panic!("unit group elements are indices"),
        }
    }

    fn translate(&self, s: &ElementRef, q: &GroupElem) -> ElementRef {
        let i = s.index().expect("table monoid element");
        let pos = self.orbit.binary_search(&i).expect("element in orbit");
        match q {
            GroupElem::Perm(p) => ElementRef::from_index(self.orbit[p.image(pos)]),
            _ => panic!("orbit quotient elements are permutations"),
        }
    }

    fn amenability(&self) -> Amenability {
        Amenability::Finite
    }
}

impl StructuredMonoid for FiniteStructured {
    fn name(&self) -> String {
        format!("{} of order {}", self.label, self.monoid.size())
    }

    fn one(&self) -> ElementRef {
        ElementRef::from_index(self.monoid.identity())
    }

    fn multiply(&self, a: &ElementRef, b: &ElementRef) -> ElementRef {
        ElementRef::from_index(self.monoid.multiply(self.idx(a), self.idx(b)))
    }

    fn is_unit(&self, a: &ElementRef) -> bool {
        self.unit_pos[self.idx(a)].is_some()
    }

    fn unit_inverse(&self, a: &ElementRef) -> Option<ElementRef> {
        let i = self.idx(a);
        self.unit_pos[i]?;
        let one = self.monoid.identity();
        self.units
            .iter()
            .find(|&&v| self.monoid.multiply(i, v) == one)
            .map(|&v| ElementRef::from_index(v))
    }

    fn unit_group(&self) -> GroupHandle {
        self.group.clone()
    }

    fn unit_to_group(&self, u: &ElementRef) -> Option<GroupElem> {
        self.unit_pos[self.idx(u)].map(GroupElem::Index)
    }

    fn units_form_j_class_of_one(&self) -> Claim {
        Claim::computed(crate::green::j_class_of_identity_is_units(&self.monoid, &self.green))
    }

    fn orbit_quotient(&self, s: &ElementRef) -> Option<Arc<dyn StabiliserQuotient>> {
        let s = self.idx(s);
        if self.unit_pos[s].is_some() {
            return None;
        }
        let orbit = self.orbit(s);
        let perms: Vec<Perm> = self
            .units
            .iter()
            .map(|&u| {
                let images = orbit
                    .iter()
                    .map(|&t| {
                        orbit
                            .binary_search(&self.monoid.multiply(t, u))
                            .expect("orbit is closed") as u32
                    })
                    .collect();
                Perm::from_images(images).expect("units permute their orbits")
            })
            .collect();
        let quotient = PermGroup::generated_by(orbit.len(), perms.clone(), usize::MAX)
            .expect("uncapped enumeration");
        Some(Arc::new(FiniteOrbitQuotient {
            orbit,
            perms,
            quotient: GroupHandle::Permutation(Arc::new(quotient)),
        }))
    }

    fn facts(&self) -> MonoidFacts {
        let c = cancellativity_check(&self.monoid);
        MonoidFacts {
            non_units_finite: Some(Claim::computed(true)),
            r_classes_finite_outside_units: Some(Claim::computed(true)),
            left_cancellative: Some(Claim::computed(c.left)),
            right_cancellative: Some(Claim::computed(c.right)),
            regular: Some(Claim::computed(self.monoid.is_regular())),
            finitely_many_l_classes_per_d: Some(Claim::computed(true)),
            schutzenberger_groups_amenable: Some(Claim::computed(true)),
            schutzenberger_groups_finite_or_abelian: Some(Claim::computed(true)),
            circle_action_locally_amenable: Some(Claim::computed(true)),
            orbit_quotients: Some(Amenability::Finite),
        }
    }

    fn label(&self, e: &ElementRef) -> String {
        match e.index() {
            Some(i) if i < self.monoid.size() => self.monoid.name(i).to_string(),
            _ => format!("{e:?}"),
        }
    }

    fn parse_element(&self, label: &str) -> Result<ElementRef> {
        self.monoid
            .index_of(label.trim())
            .map(ElementRef::from_index)
            .ok_or_else(|| Error::UnknownElement(label.to_string()))
    }

    fn sample_elements(&self) -> Vec<ElementRef> {
        (0..self.monoid.size().min(64)).map(ElementRef::from_index).collect()
    }

    fn all_elements(&self) -> Option<Vec<ElementRef>> {
        Some((0..self.monoid.size()).map(ElementRef::from_index).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_associative(m: &FiniteMonoid) -> bool {
        let n = m.size();
        (0..n).all(|i| {
            (0..n).all(|j| {
                (0..n).all(|k| m.multiply(m.multiply(i, j), k) == m.multiply(i, m.multiply(j, k)))
            })
        })
    }

    #[test]
    fn semilattice_identity_is_one() {
        let m = semilattice();
        assert_eq!(m.name(m.identity()), "1");
        assert_eq!(m.multiply(0, 1), 0);
    }

    #[test]
    fn trivial_monoid() {
        let m = make_finite_monoid(vec![vec![0]], vec!["e".into()]).unwrap();
        assert_eq!(m.size(), 1);
        assert_eq!(m.identity(), 0);
    }

    #[test]
    fn non_associative_table_reports_a_triple() {
        // identity 0; a·a = b, a·b = a, b·a = b, b·b = a
        let t = vec![vec![0, 1, 2], vec![1, 2, 1], vec![2, 2, 1]];
        let names = vec!["1".into(), "a".into(), "b".into()];
        match make_finite_monoid(t.clone(), names) {
            Err(Error::NotAssociative { i, j, k }) => {
                let at = |x: usize, y: usize| t[x][y];
                assert_ne!(at(at(i, j), k), at(i, at(j, k)));
            }
            other => panic!("expected NotAssociative, got {other:?}"),
        }
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            make_finite_monoid(vec![vec![0, 2], vec![1, 1]], vec!["a".into(), "b".into()]),
            Err(Error::BadIndex { .. })
        ));
        assert!(matches!(
            make_finite_monoid(vec![vec![0, 0], vec![0, 0]], vec!["a".into(), "b".into()]),
            Err(Error::NoIdentity)
        ));
        assert!(matches!(
            make_finite_monoid(vec![vec![0]], vec![]),
            Err(Error::BadNames(_))
        ));
        assert!(matches!(
            FiniteMonoid::with_cap(vec![vec![0, 1], vec![1, 0]], vec!["a".into(), "b".into()], 1),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn transformation_monoid_sizes() {
        assert_eq!(make_transformation_monoid(1).unwrap().size(), 1);
        assert_eq!(make_transformation_monoid(2).unwrap().size(), 4);
        let t3 = make_transformation_monoid(3).unwrap();
        assert_eq!(t3.size(), 27);
        // brute force: invertible maps are the bijections of 3 points
        let bijections = t3
            .names()
            .iter()
            .filter(|n| {
                let mut c: Vec<char> = n.chars().collect();
                c.sort();
                c == ['0', '1', '2']
            })
            .count();
        assert_eq!(bijections, 6);
        assert_eq!(t3.units().len(), 6);
        assert!(matches!(make_transformation_monoid(6), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn composition_is_left_to_right() {
        let t2 = make_transformation_monoid(2).unwrap();
        let c1 = t2.index_of("11").unwrap();
        let swap = t2.index_of("10").unwrap();
        // apply const-1 first, then swap
        assert_eq!(t2.name(t2.multiply(c1, swap)), "00");
    }

    #[test]
    fn light_test_agrees_with_brute_force_on_t4() {
        let t4 = make_transformation_monoid(4).unwrap();
        assert!(brute_associative(&t4));
        let gens = t4.right_generating_set();
        assert!(!gens.is_empty());
    }

    #[test]
    fn products_and_units() {
        let sl = semilattice();
        let p = direct_product(&sl, &sl).unwrap();
        assert_eq!(p.size(), 4);
        assert_eq!(p.units().len(), 1);
        let q = direct_product(&cyclic_group(2), &sl).unwrap();
        assert_eq!(q.size(), 4);
        assert_eq!(q.units().len(), 2);
        let t = direct_product(&trivial(), &sl).unwrap();
        assert_eq!(t.table_rows(), sl.table_rows());
        assert!(matches!(
            direct_product_with_cap(&sl, &sl, 3),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn cancellativity() {
        assert_eq!(
            cancellativity_check(&cyclic_group(3)),
            Cancellativity { left: true, right: true }
        );
        assert_eq!(
            cancellativity_check(&semilattice()),
            Cancellativity { left: false, right: false }
        );
        assert_eq!(
            cancellativity_check(&make_transformation_monoid(2).unwrap()),
            Cancellativity { left: false, right: false }
        );
    }

    #[test]
    fn json_round_trip_is_byte_exact() {
        let m = direct_product(&cyclic_group(2), &semilattice()).unwrap();
        let s = m.to_json();
        let back = FiniteMonoid::from_json(&s).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json(), s);
        assert_eq!(
            semilattice().to_json(),
            "{\"size\":2,\"identity\":1,\"names\":[\"0\",\"1\"],\"table\":[[0,0],[0,1]]}\n"
        );
    }

    #[test]
    fn json_identity_mismatch_is_malformed() {
        let s = "{\"size\":2,\"identity\":0,\"names\":[\"0\",\"1\"],\"table\":[[0,0],[0,1]]}";
        assert!(matches!(FiniteMonoid::from_json(s), Err(Error::MalformedFile { .. })));
        assert!(matches!(FiniteMonoid::from_json("{\"size\":2"), Err(Error::MalformedFile { .. })));
    }
}
