//! Monoids of cosets of normal subgroups, multiplied setwise.
//!
//! Given a group `G` and normal subgroups `N_1, ..., N_k`, the elements are
//! the cosets `aH` where `H` ranges over the joins of the `N_i` together with
//! the trivial subgroup. `(aH)(bK) = ab(H ∨ K)`; the units are the singletons.

use super::{Claim, ElementRef, MonoidFacts, StabiliserQuotient, StructuredMonoid};
use crate::error::{Error, Result};
use crate::groups::abelian::fmt_vector;
use crate::groups::{AbelianGroup, Amenability, FiniteGroup, GroupElem, GroupHandle, Lattice};
use std::sync::Arc;

/// A subgroup of the ambient group, by generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubgroupSpec {
    /// Generating vectors in `Z^r` (abelian ambient groups).
    Lattice(Vec<Vec<i64>>),
    /// Generating element indices (finite table groups).
    Elements(Vec<usize>),
}

struct FiniteSub {
    coset_of: Vec<u32>,
    reps: Vec<usize>,
}

enum Ambient {
    Abelian {
        group: Arc<AbelianGroup>,
        subgroups: Vec<Lattice>,
    },
    Finite {
        group: Arc<FiniteGroup>,
        subgroups: Vec<FiniteSub>,
    },
}

struct Inner {
    ambient: Ambient,
    unit_group: GroupHandle,
    /// `joins[i][j]` is the id of `H_i ∨ H_j`; id 0 is the trivial subgroup.
    joins: Vec<Vec<usize>>,
    quotients: Vec<GroupHandle>,
    names: Vec<String>,
}

#[derive(Clone)]
pub struct CosetMonoid {
    inner: Arc<Inner>,
}

/// Element representation before encoding.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Coset {
    sub: usize,
    rep: GroupElem,
}

fn join_closure<T: Clone + PartialEq>(mut subs: Vec<T>, join: impl Fn(&T, &T) -> T) -> (Vec<T>, Vec<Vec<usize>>) {
    let mut i = 0;
    while i < subs.len() {
        for j in 0..=i {
            let h = join(&subs[i], &subs[j]);
            if !subs.contains(&h) {
                subs.push(h);
            }
        }
        i += 1;
    }
    let joins = (0..subs.len())
        .map(|i| {
            (0..subs.len())
                .map(|j| {
                    let h = join(&subs[i], &subs[j]);
                    subs.iter().position(|s| *s == h).expect("closed under joins")
                })
                .collect()
        })
        .collect();
    (subs, joins)
}

fn finite_subgroup(g: &FiniteGroup, gens: &[usize]) -> Vec<usize> {
    let mut members = vec![false; g.order()];
    members[g.identity()] = true;
    let mut stack = vec![g.identity()];
    while let Some(x) = stack.pop() {
        for &s in gens {
            let y = g.multiply(x, s);
            if !members[y] {
                members[y] = true;
                stack.push(y);
            }
        }
    }
    (0..g.order()).filter(|&x| members[x]).collect()
}

fn finite_sub(g: &FiniteGroup, members: &[usize]) -> FiniteSub {
    let mut coset_of = vec![u32::MAX; g.order()];
    let mut reps = Vec::new();
    for a in 0..g.order() {
        if coset_of[a] != u32::MAX {
            continue;
        }
        // a is the smallest member of its coset
        for &h in members {
            coset_of[g.multiply(a, h)] = reps.len() as u32;
        }
        reps.push(a);
    }
    FiniteSub { coset_of, reps }
}

/// Builds the coset monoid of `g` over the given subgroups.
pub fn make_coset_monoid(g: &GroupHandle, subgroups: &[SubgroupSpec]) -> Result<CosetMonoid> {
    let inner = match g {
        GroupHandle::Abelian(a) => {
            let rank = a.ambient_rank();
            let mut subs = vec![a.relations().clone()];
            for s in subgroups {
                let SubgroupSpec::Lattice(gens) = s else {
                    return Err(Error::InvalidArgument(
                        "abelian ambient groups take lattice subgroups".into(),
                    ));
                };
                if gens.iter().any(|v| v.len() != rank) {
                    return Err(Error::InvalidArgument(format!(
                        "subgroup generators must have length {rank}"
                    )));
                }
                let l = Lattice::generated_by(rank, gens).join(a.relations());
                if !subs.contains(&l) {
                    subs.push(l);
                }
            }
            let (subs, joins) = join_closure(subs, |x, y| x.join(y));
            let quotients = subs
                .iter()
                .map(|l| GroupHandle::abelian(AbelianGroup::new(l.clone())))
                .collect();
            let names = subs.iter().map(lattice_name).collect();
            Inner {
                ambient: Ambient::Abelian {
                    group: a.clone(),
                    subgroups: subs,
                },
                unit_group: g.clone(),
                joins,
                quotients,
                names,
            }
        }
        GroupHandle::Finite(fg) => {
            let mut subs = vec![vec![fg.identity()]];
            for s in subgroups {
                let SubgroupSpec::Elements(gens) = s else {
                    return Err(Error::InvalidArgument(
                        "finite ambient groups take element-list subgroups".into(),
                    ));
                };
                if let Some(&bad) = gens.iter().find(|&&x| x >= fg.order()) {
                    return Err(Error::InvalidArgument(format!("no group element {bad}")));
                }
                let members = finite_subgroup(fg, gens);
                let normal = (0..fg.order()).all(|x| {
                    members.iter().all(|&h| {
                        let c = fg.multiply(fg.multiply(x, h), fg.inverse(x));
                        members.binary_search(&c).is_ok()
                    })
                });
                if !normal {
                    return Err(Error::InvalidArgument(format!(
                        "subgroup generated by {gens:?} is not normal"
                    )));
                }
                if !subs.contains(&members) {
                    subs.push(members);
                }
            }
            let (subs, joins) = join_closure(subs, |x, y| {
                let gens: Vec<usize> = x.iter().chain(y).copied().collect();
                finite_subgroup(fg, &gens)
            });
            let finite_subs: Vec<FiniteSub> = subs.iter().map(|m| finite_sub(fg, m)).collect();
            let quotients = finite_subs
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let table = s
                        .reps
                        .iter()
                        .map(|&a| {
                            s.reps
                                .iter()
                                .map(|&b| s.coset_of[fg.multiply(a, b)] as usize)
                                .collect()
                        })
                        .collect();
                    let names = s
                        .reps
                        .iter()
                        .map(|&a| finite_coset_name(fg, i, a))
                        .collect();
                    FiniteGroup::from_table(table, names).map(GroupHandle::finite)
                })
                .collect::<Result<Vec<_>>>()?;
            let names = (0..subs.len()).map(|i| format!("N{i}")).collect();
            Inner {
                ambient: Ambient::Finite {
                    group: fg.clone(),
                    subgroups: finite_subs,
                },
                unit_group: g.clone(),
                joins,
                quotients,
                names,
            }
        }
        _ => return Err(Error::UnsupportedGroup(g.describe())),
    };
    Ok(CosetMonoid {
        inner: Arc::new(inner),
    })
}

fn lattice_name(l: &Lattice) -> String {
    if l.rank() == 1 {
        match l.rows().first() {
            Some(r) if r[0] == 1 => "Z".into(),
            Some(r) => format!("{}Z", r[0]),
            None => "0".into(),
        }
    } else {
        format!("{l:?}")
    }
}

fn finite_coset_name(g: &FiniteGroup, sub: usize, a: usize) -> String {
    if sub == 0 {
        format!("{{{}}}", g.name(a))
    } else {
        format!("{}*N{sub}", g.name(a))
    }
}

fn parse_vector(s: &str, rank: usize) -> Option<Vec<i64>> {
    let t = s.trim();
    let v: Vec<i64> = match t.strip_prefix('(').and_then(|x| x.strip_suffix(')')) {
        Some(inner) => inner
            .split(',')
            .map(|x| x.trim().parse().ok())
            .collect::<Option<_>>()?,
        None => vec![t.parse().ok()?],
    };
    (v.len() == rank).then_some(v)
}

impl Inner {
    fn reduce(&self, sub: usize, rep: &GroupElem) -> GroupElem {
        match (&self.ambient, rep) {
            (Ambient::Abelian { subgroups, .. }, GroupElem::Vector(v)) => {
                GroupElem::Vector(subgroups[sub].reduce(v))
            }
            (Ambient::Finite { subgroups, .. }, GroupElem::Index(a)) => {
                let s = &subgroups[sub];
                GroupElem::Index(s.reps[s.coset_of[*a as usize] as usize] as u32)
            }
            _ => panic!("representative does not match the ambient group"),
        }
    }

    fn encode(&self, c: &Coset) -> ElementRef {
        let mut bytes = (c.sub as u32).to_be_bytes().to_vec();
        match &c.rep {
            GroupElem::Vector(v) => {
                for x in v {
                    bytes.extend_from_slice(&x.to_be_bytes());
                }
            }
            GroupElem::Index(i) => bytes.extend_from_slice(&i.to_be_bytes()),
            _ => unreachable!(),
        }
        ElementRef::from_bytes(bytes)
    }

    fn decode(&self, e: &ElementRef) -> Coset {
        let b = e.as_bytes();
        let sub = u32::from_be_bytes(b[..4].try_into().expect("coset encoding")) as usize;
        let rep = match &self.ambient {
            Ambient::Abelian { .. } => GroupElem::Vector(
                b[4..]
                    .chunks(8)
                    .map(|c| i64::from_be_bytes(c.try_into().expect("coset encoding")))
                    .collect(),
            ),
            Ambient::Finite { .. } => {
                GroupElem::Index(u32::from_be_bytes(b[4..8].try_into().expect("coset encoding")))
            }
        };
        Coset { sub, rep }
    }

    fn make(&self, sub: usize, rep: GroupElem) -> ElementRef {
        let rep = self.reduce(sub, &rep);
        self.encode(&Coset { sub, rep })
    }

    fn subgroup_count(&self) -> usize {
        self.joins.len()
    }
}

impl CosetMonoid {
    /// The coset `rep + H_sub`, reduced to its canonical representative.
    pub fn coset(&self, sub: usize, rep: GroupElem) -> ElementRef {
        self.inner.make(sub, rep)
    }

    /// Number of subgroups in the join closure, trivial subgroup included.
    pub fn subgroup_count(&self) -> usize {
        self.inner.subgroup_count()
    }

    pub fn subgroup_name(&self, sub: usize) -> &str {
        &self.inner.names[sub]
    }

    /// Subgroup id and canonical representative of an element.
    pub fn parts(&self, e: &ElementRef) -> (usize, GroupElem) {
        let c = self.inner.decode(e);
        (c.sub, c.rep)
    }

    /// `G / H_sub`.
    pub fn quotient(&self, sub: usize) -> &GroupHandle {
        &self.inner.quotients[sub]
    }

    fn nontrivial_quotient_status(&self) -> Vec<Amenability> {
        (1..self.subgroup_count())
            .map(|i| self.inner.quotients[i].amenability())
            .collect()
    }

    fn is_abelian(&self) -> bool {
        match &self.inner.ambient {
            Ambient::Abelian { .. } => true,
            Ambient::Finite { group, .. } => group.is_abelian(),
        }
    }
}

struct CosetOrbit {
    inner: Arc<Inner>,
    sub: usize,
}

impl StabiliserQuotient for CosetOrbit {
    fn orbit_key(&self) -> ElementRef {
        let id = self.inner.unit_group.identity();
        self.inner.make(self.sub, id)
    }

    fn quotient(&self) -> &GroupHandle {
        &self.inner.quotients[self.sub]
    }

    fn project(&self, g: &GroupElem) -> GroupElem {
        match (&self.inner.ambient, g) {
            (Ambient::Abelian { subgroups, .. }, GroupElem::Vector(v)) => {
                GroupElem::Vector(subgroups[self.sub].reduce(v))
            }
            (Ambient::Finite { subgroups, .. }, GroupElem::Index(a)) => {
                GroupElem::Index(subgroups[self.sub].coset_of[*a as usize])
            }
            _ => panic!("element does not belong to the unit group"),
        }
    }

    fn translate(&self, s: &ElementRef, q: &GroupElem) -> ElementRef {
        let c = self.inner.decode(s);
        assert_eq!(c.sub, self.sub, "element outside this orbit");
        match (&self.inner.ambient, &c.rep, q) {
            (Ambient::Abelian { .. }, GroupElem::Vector(a), GroupElem::Vector(b)) => {
                let sum: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                self.inner.make(self.sub, GroupElem::Vector(sum))
            }
            (Ambient::Finite { group, subgroups }, GroupElem::Index(a), GroupElem::Index(b)) => {
                let rb = subgroups[self.sub].reps[*b as usize];
                let p = group.multiply(*a as usize, rb);
                self.inner.make(self.sub, GroupElem::Index(p as u32))
            }
            _ => panic!("quotient element does not match the orbit"),
        }
    }
}

impl StructuredMonoid for CosetMonoid {
    fn name(&self) -> String {
        format!(
            "coset monoid of {} over [{}]",
            self.inner.unit_group.describe(),
            self.inner.names[1..].join(", ")
        )
    }

    fn one(&self) -> ElementRef {
        self.inner.make(0, self.inner.unit_group.identity())
    }

    fn multiply(&self, a: &ElementRef, b: &ElementRef) -> ElementRef {
        let x = self.inner.decode(a);
        let y = self.inner.decode(b);
        let sub = self.inner.joins[x.sub][y.sub];
        let g = &self.inner.unit_group;
        self.inner.make(sub, g.multiply(&x.rep, &y.rep))
    }

    fn is_unit(&self, a: &ElementRef) -> bool {
        self.inner.decode(a).sub == 0
    }

    fn unit_inverse(&self, a: &ElementRef) -> Option<ElementRef> {
        let c = self.inner.decode(a);
        (c.sub == 0).then(|| self.inner.make(0, self.inner.unit_group.inverse(&c.rep)))
    }

    fn unit_group(&self) -> GroupHandle {
        self.inner.unit_group.clone()
    }

    fn unit_to_group(&self, u: &ElementRef) -> Option<GroupElem> {
        let c = self.inner.decode(u);
        (c.sub == 0).then_some(c.rep)
    }

    /// A product of cosets is a singleton only if every factor is.
    fn units_form_j_class_of_one(&self) -> Claim {
        Claim::declared(true)
    }

    fn orbit_quotient(&self, s: &ElementRef) -> Option<Arc<dyn StabiliserQuotient>> {
        let c = self.inner.decode(s);
        (c.sub != 0).then(|| {
            Arc::new(CosetOrbit {
                inner: self.inner.clone(),
                sub: c.sub,
            }) as Arc<dyn StabiliserQuotient>
        })
    }

    fn facts(&self) -> MonoidFacts {
        let statuses = self.nontrivial_quotient_status();
        let all_finite = statuses.iter().all(|s| *s == Amenability::Finite);
        let has_nontrivial = !statuses.is_empty();
        let aggregate = statuses
            .iter()
            .copied()
            .max()
            .unwrap_or(Amenability::Finite);
        let abelian = self.is_abelian();
        MonoidFacts {
            // cosets of H are the R-class of any of them, and G/H is finite iff H has finite index
            non_units_finite: Some(Claim::computed(all_finite)),
            r_classes_finite_outside_units: Some(Claim::computed(all_finite)),
            // aH · 1 = aH · h for any h ∈ H
            left_cancellative: Some(Claim::computed(!has_nontrivial)),
            right_cancellative: Some(Claim::computed(!has_nontrivial)),
            // aH · {a⁻¹} · aH = aH
            regular: Some(Claim::declared(true)),
            finitely_many_l_classes_per_d: Some(Claim::declared(true)),
            schutzenberger_groups_amenable: Some(Claim::declared(
                statuses.iter().all(|s| s.is_capable()),
            )),
            schutzenberger_groups_finite_or_abelian: Some(Claim::declared(abelian || all_finite)),
            circle_action_locally_amenable: Some(Claim::declared(
                statuses.iter().all(|s| s.is_capable()),
            )),
            orbit_quotients: Some(aggregate),
        }
    }

    fn label(&self, e: &ElementRef) -> String {
        let c = self.inner.decode(e);
        match (&self.inner.ambient, &c.rep) {
            (Ambient::Abelian { .. }, GroupElem::Vector(v)) => {
                if c.sub == 0 {
                    format!("{{{}}}", fmt_vector(v))
                } else {
                    format!("{}+{}", fmt_vector(v), self.inner.names[c.sub])
                }
            }
            (Ambient::Finite { group, .. }, GroupElem::Index(a)) => {
                finite_coset_name(group, c.sub, *a as usize)
            }
            _ => unreachable!(),
        }
    }

    /// Abelian: `{3}`, `{(1,-2)}`, `1+2Z`, `Z`, `(0,1)+<(1,0)>`.
    /// Finite: `{g}` and `g*N1`, using the group's element names.
    fn parse_element(&self, label: &str) -> Result<ElementRef> {
        let bad = || Error::UnknownElement(label.to_string());
        let t = label.trim();
        let inner = &self.inner;
        match &inner.ambient {
            Ambient::Abelian { group, .. } => {
                let rank = group.ambient_rank();
                if let Some(body) = t.strip_prefix('{').and_then(|x| x.strip_suffix('}')) {
                    let v = parse_vector(body, rank).ok_or_else(bad)?;
                    return Ok(inner.make(0, GroupElem::Vector(v)));
                }
                if let Some(sub) = inner.names.iter().position(|n| n == t) {
                    return Ok(inner.make(sub, GroupElem::Vector(vec![0; rank])));
                }
                let mut depth = 0;
                for (i, ch) in t.char_indices() {
                    match ch {
                        '(' | '<' => depth += 1,
                        ')' | '>' => depth -= 1,
                        '+' if depth == 0 && i > 0 => {
                            let sub = inner
                                .names
                                .iter()
                                .position(|n| n == t[i + 1..].trim())
                                .ok_or_else(bad)?;
                            let v = parse_vector(&t[..i], rank).ok_or_else(bad)?;
                            return Ok(inner.make(sub, GroupElem::Vector(v)));
                        }
                        _ => {}
                    }
                }
                Err(bad())
            }
            Ambient::Finite { group, .. } => {
                let find = |n: &str| {
                    group
                        .names()
                        .iter()
                        .position(|x| x == n.trim())
                        .ok_or_else(bad)
                };
                if let Some(body) = t.strip_prefix('{').and_then(|x| x.strip_suffix('}')) {
                    return Ok(inner.make(0, GroupElem::Index(find(body)? as u32)));
                }
                let (a, n) = t.rsplit_once('*').ok_or_else(bad)?;
                let sub = inner.names.iter().position(|x| x == n.trim()).ok_or_else(bad)?;
                Ok(inner.make(sub, GroupElem::Index(find(a)? as u32)))
            }
        }
    }

    fn sample_elements(&self) -> Vec<ElementRef> {
        if let Some(all) = self.all_elements() {
            return all.into_iter().take(64).collect();
        }
        let Ambient::Abelian { group, .. } = &self.inner.ambient else {
            unreachable!("finite ambient groups enumerate all elements")
        };
        let rank = group.ambient_rank();
        let mut reps: Vec<Vec<i64>> = vec![Vec::new()];
        for _ in 0..rank {
            reps = reps
                .into_iter()
                .flat_map(|p| {
                    (-2..=2).map(move |x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        let mut out: Vec<ElementRef> = Vec::new();
        for sub in 0..self.subgroup_count() {
            for r in &reps {
                let e = self.inner.make(sub, GroupElem::Vector(r.clone()));
                if !out.contains(&e) {
                    out.push(e);
                }
            }
        }
        out
    }

    fn all_elements(&self) -> Option<Vec<ElementRef>> {
        let mut out = Vec::new();
        for sub in 0..self.subgroup_count() {
            let q = &self.inner.quotients[sub];
            match &self.inner.ambient {
                Ambient::Abelian { .. } => {
                    for v in q.elements()? {
                        out.push(self.inner.make(sub, v));
                    }
                }
                Ambient::Finite { subgroups, .. } => {
                    for &a in &subgroups[sub].reps {
                        out.push(self.inner.make(sub, GroupElem::Index(a as u32)));
                    }
                }
            }
        }
        Some(out)
    }
}

/// Coset monoid of `Z` over the subgroups `nZ` for the given moduli.
pub fn integer_coset_monoid(moduli: &[i64]) -> Result<CosetMonoid> {
    let subs: Vec<SubgroupSpec> = moduli
        .iter()
        .map(|&n| SubgroupSpec::Lattice(vec![vec![n]]))
        .collect();
    make_coset_monoid(&GroupHandle::integers(), &subs)
}
