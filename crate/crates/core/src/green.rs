//! Green's relations of finite monoids.
//!
//! Partitions are computed as strongly connected components of the left,
//! right and two-sided Cayley graphs over a generating set. A second,
//! definitional computation comparing principal ideals is kept alongside as
//! a test oracle. Class ids are numbered by smallest member.

use crate::error::{Error, Result};
use crate::groups::{FiniteGroup, GroupHandle, Perm};
use crate::monoid::FiniteMonoid;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap, HashSet};

/// Class ids for each element under the five relations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partitions {
    pub r: Vec<usize>,
    pub l: Vec<usize>,
    pub h: Vec<usize>,
    pub d: Vec<usize>,
    pub j: Vec<usize>,
}

/// One D-class drawn as an egg-box: rows are R-classes, columns L-classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EggBox {
    pub d_class: usize,
    pub r_classes: Vec<usize>,
    pub l_classes: Vec<usize>,
    /// `cells[row][col]` is the H-class at that intersection, if any.
    pub cells: Vec<Vec<Option<usize>>>,
}

#[derive(Clone, Debug)]
pub struct GreenStructure {
    pub classes: Partitions,
    pub eggbox: Vec<EggBox>,
    /// H-class of the identity.
    pub unit_class_id: usize,
    h_members: Vec<Vec<usize>>,
    d_members: Vec<Vec<usize>>,
}

/// Renumbers arbitrary labels so that classes are numbered by first occurrence.
fn canonical<T: std::hash::Hash + Eq>(keys: impl IntoIterator<Item = T>) -> Vec<usize> {
    let mut ids = HashMap::new();
    keys.into_iter()
        .map(|k| {
            let next = ids.len();
            *ids.entry(k).or_insert(next)
        })
        .collect()
}

fn scc_partition(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> Vec<usize> {
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n, 0);
    for _ in 0..n {
        g.add_node(());
    }
    for (a, b) in edges {
        if a != b {
            g.add_edge((a as u32).into(), (b as u32).into(), ());
        }
    }
    let mut comp = vec![0usize; n];
    for (c, members) in tarjan_scc(&g).iter().enumerate() {
        for v in members {
            comp[v.index()] = c;
        }
    }
    canonical(comp)
}

fn union_find_join(a: &[usize], b: &[usize]) -> Vec<usize> {
    let n = a.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for part in [a, b] {
        let mut first: HashMap<usize, usize> = HashMap::new();
        for x in 0..n {
            let rep = *first.entry(part[x]).or_insert(x);
            let (rx, rr) = (find(&mut parent, x), find(&mut parent, rep));
            if rx != rr {
                parent[rx.max(rr)] = rx.min(rr);
            }
        }
    }
    canonical((0..n).map(|x| find(&mut parent, x)))
}

/// SCC-based computation of all five relations.
pub fn green_relations(m: &FiniteMonoid) -> GreenStructure {
    GreenStructure::compute(m)
}

impl GreenStructure {
    pub fn compute(m: &FiniteMonoid) -> Self {
        let n = m.size();
        let gens = m.right_generating_set();
        let right = || (0..n).flat_map(|x| gens.iter().map(move |&a| (x, m.multiply(x, a))));
        let left = || (0..n).flat_map(|x| gens.iter().map(move |&a| (x, m.multiply(a, x))));
        let r = scc_partition(n, right());
        let l = scc_partition(n, left());
        let j = scc_partition(n, right().chain(left()));
        let d = union_find_join(&r, &l);
        let h = canonical((0..n).map(|x| (r[x], l[x])));
        Self::from_partitions(m, Partitions { r, l, h, d, j })
    }

    fn from_partitions(m: &FiniteMonoid, classes: Partitions) -> Self {
        let members = |ids: &[usize]| {
            let count = ids.iter().max().map_or(0, |x| x + 1);
            let mut out = vec![Vec::new(); count];
            for (x, &c) in ids.iter().enumerate() {
                out[c].push(x);
            }
            out
        };
        let h_members = members(&classes.h);
        let d_members = members(&classes.d);
        let eggbox = d_members
            .iter()
            .enumerate()
            .map(|(d, xs)| {
                let mut rows: Vec<usize> = xs.iter().map(|&x| classes.r[x]).collect();
                rows.sort_unstable();
                rows.dedup();
                let mut cols: Vec<usize> = xs.iter().map(|&x| classes.l[x]).collect();
                cols.sort_unstable();
                cols.dedup();
                let mut cells = vec![vec![None; cols.len()]; rows.len()];
                for &x in xs {
                    let ri = rows.binary_search(&classes.r[x]).unwrap();
                    let ci = cols.binary_search(&classes.l[x]).unwrap();
                    cells[ri][ci] = Some(classes.h[x]);
                }
                EggBox {
                    d_class: d,
                    r_classes: rows,
                    l_classes: cols,
                    cells,
                }
            })
            .collect();
        let unit_class_id = classes.h[m.identity()];
        GreenStructure {
            classes,
            eggbox,
            unit_class_id,
            h_members,
            d_members,
        }
    }

    pub fn h_class(&self, id: usize) -> &[usize] {
        &self.h_members[id]
    }

    pub fn h_class_count(&self) -> usize {
        self.h_members.len()
    }

    pub fn d_class(&self, id: usize) -> &[usize] {
        &self.d_members[id]
    }

    pub fn d_class_count(&self) -> usize {
        self.d_members.len()
    }

    /// H-class ids lying in a D-class, sorted.
    pub fn h_classes_in(&self, d: usize) -> Vec<usize> {
        let mut hs: Vec<usize> = self.d_members[d].iter().map(|&x| self.classes.h[x]).collect();
        hs.sort_unstable();
        hs.dedup();
        hs
    }

    /// Every R-class of every D-class meets every L-class in one H-class.
    pub fn eggbox_property_holds(&self) -> bool {
        self.eggbox
            .iter()
            .all(|b| b.cells.iter().all(|row| row.iter().all(Option::is_some)))
    }
}

fn bitset_of(n: usize, xs: impl Iterator<Item = usize>) -> Vec<u64> {
    let mut b = vec![0u64; n.div_ceil(64)];
    for x in xs {
        b[x / 64] |= 1 << (x % 64);
    }
    b
}

/// Definitional oracle: compares `xM`, `Mx` and `MxM` as sets, and finds `D`
/// from its definition `∃z: x L z ∧ z R y`.
pub fn definitional_partitions(m: &FiniteMonoid) -> Partitions {
    let n = m.size();
    let right: Vec<Vec<u64>> = (0..n)
        .map(|x| bitset_of(n, (0..n).map(|s| m.multiply(x, s))))
        .collect();
    let left: Vec<Vec<u64>> = (0..n)
        .map(|x| bitset_of(n, (0..n).map(|s| m.multiply(s, x))))
        .collect();
    let two: Vec<Vec<u64>> = (0..n)
        .map(|x| {
            bitset_of(
                n,
                (0..n).flat_map(|s| (0..n).map(move |t| (s, t))).map(|(s, t)| m.multiply(m.multiply(s, x), t)),
            )
        })
        .collect();
    let r = canonical(right.iter());
    let l = canonical(left.iter());
    let j = canonical(two.iter());
    let h = canonical((0..n).map(|x| (&right[x], &left[x])));
    // x D y iff some z has x L z and z R y
    let d_keys: Vec<Vec<usize>> = (0..n)
        .map(|x| {
            let mut rs: Vec<usize> = (0..n).filter(|&z| l[z] == l[x]).map(|z| r[z]).collect();
            rs.sort_unstable();
            rs.dedup();
            rs
        })
        .collect();
    let d = {
        let related = |x: usize, y: usize| d_keys[x].binary_search(&r[y]).is_ok();
        let mut ids = vec![usize::MAX; n];
        let mut next = 0;
        for x in 0..n {
            if ids[x] != usize::MAX {
                continue;
            }
            for y in x..n {
                if ids[y] == usize::MAX && related(x, y) {
                    ids[y] = next;
                }
            }
            next += 1;
        }
        ids
    };
    Partitions { r, l, h, d, j }
}

/// The unit set and its group as a finite table.
pub fn group_of_units(m: &FiniteMonoid) -> (Vec<usize>, GroupHandle) {
    let units = m.units();
    let pos: HashMap<usize, usize> = units.iter().enumerate().map(|(i, &u)| (u, i)).collect();
    let table = units
        .iter()
        .map(|&a| units.iter().map(|&b| pos[&m.multiply(a, b)]).collect())
        .collect();
    let names = units.iter().map(|&u| m.name(u).to_string()).collect();
    let g = FiniteGroup::from_table(table, names).expect("units form a group");
    (units, GroupHandle::finite(g))
}

/// Whether the J-class of the identity is exactly the set of units.
pub fn j_class_of_identity_is_units(m: &FiniteMonoid, green: &GreenStructure) -> bool {
    let jc = green.classes.j[m.identity()];
    let j_members: Vec<usize> = (0..m.size()).filter(|&x| green.classes.j[x] == jc).collect();
    j_members == m.units()
}

/// Permutations of an H-class realised by right translations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchutzGroup {
    pub h_class: Vec<usize>,
    pub perms: Vec<Perm>,
    pub order: usize,
    pub abelian: bool,
}

impl SchutzGroup {
    pub fn is_group(&self) -> bool {
        let set: HashSet<&Perm> = self.perms.iter().collect();
        let id = Perm::identity(self.h_class.len());
        set.contains(&id)
            && self.perms.iter().all(|a| {
                set.contains(&a.inverse()) && self.perms.iter().all(|b| set.contains(&a.then(b)))
            })
    }

    /// Sorted multiset of element orders.
    pub fn element_orders(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.perms.iter().map(Perm::order).collect();
        v.sort_unstable();
        v
    }

    /// Order, abelianness and element-order multiset.
    pub fn invariants(&self) -> (usize, bool, Vec<u64>) {
        (self.order, self.abelian, self.element_orders())
    }
}

pub fn schutzenberger_group(m: &FiniteMonoid, green: &GreenStructure, h: usize) -> SchutzGroup {
    let members = green.h_class(h).to_vec();
    let pos: HashMap<usize, u32> = members.iter().enumerate().map(|(i, &x)| (x, i as u32)).collect();
    let mut perms: Vec<Perm> = (0..m.size())
        .filter_map(|s| {
            let images: Option<Vec<u32>> = members
                .iter()
                .map(|&x| pos.get(&m.multiply(x, s)).copied())
                .collect();
            images.and_then(Perm::from_images)
        })
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    perms.sort();
    let abelian = perms
        .iter()
        .all(|a| perms.iter().all(|b| a.then(b) == b.then(a)));
    SchutzGroup {
        h_class: members,
        order: perms.len(),
        perms,
        abelian,
    }
}

/// Induced action of the unit group on the H-classes of one D-class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircleAction {
    pub d_class: usize,
    pub domain: Vec<usize>,
    pub units: Vec<usize>,
    /// `table[u][i]`: position of the H-class reached from `domain[i]` by unit `units[u]`.
    pub table: Vec<Vec<usize>>,
}

impl CircleAction {
    pub fn act(&self, h: usize, unit: usize) -> Option<usize> {
        let i = self.domain.iter().position(|&x| x == h)?;
        let u = self.units.iter().position(|&x| x == unit)?;
        Some(self.domain[self.table[u][i]])
    }

    /// `1` acts trivially and `(x∘g)∘h = x∘(gh)`.
    pub fn is_action(&self, m: &FiniteMonoid) -> bool {
        let upos = |x: usize| self.units.iter().position(|&u| u == x);
        let Some(one) = upos(m.identity()) else {
            return false;
        };
        if self.table[one].iter().enumerate().any(|(i, &j)| i != j) {
            return false;
        }
        self.units.iter().enumerate().all(|(gi, &g)| {
            self.units.iter().enumerate().all(|(hi, &h)| {
                let Some(ghi) = upos(m.multiply(g, h)) else {
                    return false;
                };
                (0..self.domain.len())
                    .all(|x| self.table[hi][self.table[gi][x]] == self.table[ghi][x])
            })
        })
    }
}

pub fn circle_action(m: &FiniteMonoid, green: &GreenStructure, d: usize) -> Result<CircleAction> {
    let domain = green.h_classes_in(d);
    let units = m.units();
    let mut table = Vec::with_capacity(units.len());
    for &g in &units {
        let mut row = Vec::with_capacity(domain.len());
        for &h in &domain {
            let mut targets = green.h_class(h).iter().map(|&x| green.classes.h[m.multiply(x, g)]);
            let first = targets.next().expect("H-classes are nonempty");
            if targets.any(|t| t != first) {
                return Err(Error::Invariant(format!(
                    "right translation by {} does not respect H-class {h}",
                    m.name(g)
                )));
            }
            let pos = domain.binary_search(&first).map_err(|_| {
                Error::Invariant(format!("unit {} leaves D-class {d}", m.name(g)))
            })?;
            row.push(pos);
        }
        table.push(row);
    }
    Ok(CircleAction {
        d_class: d,
        domain,
        units,
        table,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DClassSummary {
    pub id: usize,
    pub size: usize,
    pub contains_identity: bool,
    pub r_classes: usize,
    pub l_classes: usize,
    pub h_classes: usize,
    pub h_class_size: usize,
    pub regular: bool,
    pub idempotents: usize,
    pub schutzenberger_order: usize,
    pub schutzenberger_abelian: bool,
    /// Cell sizes, rows = R-classes, columns = L-classes.
    pub grid: Vec<Vec<usize>>,
    pub members: Vec<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EggboxReport {
    pub size: usize,
    pub units: Vec<String>,
    pub unit_group_order: usize,
    pub j_class_of_identity_is_units: bool,
    pub regular: bool,
    pub d_classes: Vec<DClassSummary>,
}

pub fn eggbox_summary(m: &FiniteMonoid) -> EggboxReport {
    let green = GreenStructure::compute(m);
    let idempotents: HashSet<usize> = m.idempotents().into_iter().collect();
    let d_classes: Vec<DClassSummary> = green
        .eggbox
        .iter()
        .map(|b| {
            let members = green.d_class(b.d_class);
            let first_h = b.cells[0][0].expect("egg-box cells are nonempty");
            let sg = schutzenberger_group(m, &green, first_h);
            let cell_members = |c: &Option<usize>| match c {
                Some(h) => green.h_class(*h).iter().map(|&x| m.name(x).to_string()).collect(),
                None => Vec::new(),
            };
            DClassSummary {
                id: b.d_class,
                size: members.len(),
                contains_identity: members.contains(&m.identity()),
                r_classes: b.r_classes.len(),
                l_classes: b.l_classes.len(),
                h_classes: b.cells.iter().flatten().filter(|c| c.is_some()).count(),
                h_class_size: green.h_class(first_h).len(),
                regular: members.iter().all(|&x| m.is_regular_element(x)),
                idempotents: members.iter().filter(|x| idempotents.contains(x)).count(),
                schutzenberger_order: sg.order,
                schutzenberger_abelian: sg.abelian,
                grid: b
                    .cells
                    .iter()
                    .map(|row| row.iter().map(|c| c.map_or(0, |h| green.h_class(h).len())).collect())
                    .collect(),
                members: b.cells.iter().map(|row| row.iter().map(cell_members).collect()).collect(),
            }
        })
        .collect();
    let units = m.units();
    EggboxReport {
        size: m.size(),
        unit_group_order: units.len(),
        units: units.iter().map(|&u| m.name(u).to_string()).collect(),
        j_class_of_identity_is_units: j_class_of_identity_is_units(m, &green),
        regular: d_classes.iter().all(|d| d.regular),
        d_classes,
    }
}

impl EggboxReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// One aligned block per D-class; each cell shows its H-class size.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "monoid of order {}, {} D-class(es), unit group of order {}, J-class of 1 = units: {}\n",
            self.size,
            self.d_classes.len(),
            self.unit_group_order,
            self.j_class_of_identity_is_units
        );
        for d in &self.d_classes {
            out += &format!(
                "\nD{} (size {}{}): {} R x {} L, H-class size {}, {}, Schutzenberger group order {}{}\n",
                d.id,
                d.size,
                if d.contains_identity { ", units" } else { "" },
                d.r_classes,
                d.l_classes,
                d.h_class_size,
                if d.regular { "regular" } else { "not regular" },
                d.schutzenberger_order,
                if d.schutzenberger_abelian { " (abelian)" } else { "" },
            );
            let cells: Vec<Vec<String>> = d
                .members
                .iter()
                .zip(&d.grid)
                .map(|(row, sizes)| {
                    row.iter()
                        .zip(sizes)
                        .map(|(names, size)| format!("{size}: {}", names.join(" ")))
                        .collect()
                })
                .collect();
            let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
            let rule = format!(
                "+{}\n",
                (0..d.l_classes)
                    .map(|_| "-".repeat(width + 2))
                    .collect::<Vec<_>>()
                    .join("+")
                    + "+"
            );
            out += &rule;
            for row in &cells {
                out += "|";
                for c in row {
                    out += &format!(" {c:<width$} |");
                }
                out += "\n";
                out += &rule;
            }
        }
        out
    }
}

/// Per-D-class Schützenberger invariants, keyed by D-class id.
pub fn schutzenberger_invariants_by_d_class(
    m: &FiniteMonoid,
    green: &GreenStructure,
) -> BTreeMap<usize, Vec<(usize, bool, Vec<u64>)>> {
    let mut out = BTreeMap::new();
    for d in 0..green.d_class_count() {
        let inv = green
            .h_classes_in(d)
            .into_iter()
            .map(|h| schutzenberger_group(m, green, h).invariants())
            .collect();
        out.insert(d, inv);
    }
    out
}
