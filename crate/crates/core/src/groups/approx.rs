use super::folner::{find_folner, SearchBudget};
use super::{GroupElem, GroupHandle, PermGroup};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::witness::{measure_tables, DefectCounts};
use std::collections::HashMap;

/// How a [`GroupActionWitness`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Construction {
    /// Left regular action of a finite group on itself.
    Regular,
    /// Left translation inside disjoint copies of a Følner set, with one
    /// absorbing sink point.
    FolnerWithSink { copies: usize },
    /// Left regular action of a finite quotient that separates `K`.
    QuotientRegular { quotient: usize },
}

impl Construction {
    pub fn describe(&self) -> String {
        match self {
            Construction::Regular => "regular action of a finite group".into(),
            Construction::FolnerWithSink { copies: 1 } => "Folner set plus sink".into(),
            Construction::FolnerWithSink { copies } => {
                format!("{copies} copies of a Folner set plus sink")
            }
            Construction::QuotientRegular { quotient } => {
                format!("regular action of finite quotient #{quotient}")
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub delta: Rational,
    pub construction: Construction,
    pub counts: DefectCounts,
}

/// A finite `(K, δ)`-action of a group. Tables are stored for `{1} ∪ K ∪ K·K`.
#[derive(Clone, Debug)]
pub struct GroupActionWitness {
    pub points: usize,
    pub acting: Vec<GroupElem>,
    pub tables: Vec<Vec<u32>>,
    pub k: Vec<GroupElem>,
    pub certificate: Certificate,
    index: HashMap<GroupElem, usize>,
}

impl GroupActionWitness {
    pub fn table(&self, g: &GroupElem) -> Option<&[u32]> {
        self.index.get(g).map(|&i| self.tables[i].as_slice())
    }

    pub fn act(&self, g: &GroupElem, point: usize) -> Option<usize> {
        self.table(g).map(|t| t[point] as usize)
    }

    pub fn is_valid_at(&self, delta: &Rational) -> bool {
        self.certificate.counts.passes(self.points, delta)
    }
}

fn dedup_push(list: &mut Vec<GroupElem>, index: &mut HashMap<GroupElem, usize>, e: GroupElem) {
    if !index.contains_key(&e) {
        index.insert(e.clone(), list.len());
        list.push(e);
    }
}

/// Produces a finite `(K, δ)`-action of `G`, dispatching on the presentation.
pub fn sofic_group_action(
    g: &GroupHandle,
    k: &[GroupElem],
    delta: &Rational,
    budget: &SearchBudget,
) -> Result<GroupActionWitness> {
    for x in k {
        if !g.contains(x) {
            return Err(Error::InvalidArgument(format!(
                "{x:?} is not an element of {}",
                g.describe()
            )));
        }
    }
    let mut k_dedup = Vec::new();
    let mut k_index = HashMap::new();
    for x in k {
        dedup_push(&mut k_dedup, &mut k_index, x.clone());
    }
    let mut acting = Vec::new();
    let mut index = HashMap::new();
    dedup_push(&mut acting, &mut index, g.identity());
    for x in &k_dedup {
        dedup_push(&mut acting, &mut index, x.clone());
    }
    for a in &k_dedup {
        for b in &k_dedup {
            dedup_push(&mut acting, &mut index, g.multiply(a, b));
        }
    }

    let (points, tables, construction) = if let Some(order) = g.order() {
        if order as usize > budget.enumeration_cap {
            return Err(Error::CapExceeded {
                what: "finite group enumeration",
                needed: order.to_string(),
                cap: budget.enumeration_cap,
            });
        }
        let elements = g.elements().expect("finite group enumerates");
        let tables = regular_tables(&elements, &acting, |a, x| g.multiply(a, x));
        (elements.len(), tables, Construction::Regular)
    } else if let GroupHandle::Free(free) = g {
        let (qi, q) = free
            .quotients()
            .iter()
            .enumerate()
            .find(|(_, q)| {
                let mut images = std::collections::HashSet::new();
                k_dedup.iter().all(|x| match x {
                    GroupElem::Word(w) => images.insert(free.evaluate(q, w)),
                    _ => false,
                })
            })
            .ok_or(Error::NoSeparatingQuotient)?;
        let image = PermGroup::generated_by(q.degree, q.images.clone(), budget.enumeration_cap)?;
        let elements: Vec<GroupElem> = image.elements().iter().cloned().map(GroupElem::Perm).collect();
        let psi: Vec<GroupElem> = acting
            .iter()
            .map(|a| match a {
                GroupElem::Word(w) => GroupElem::Perm(free.evaluate(q, w)),
                _ => unreachable!(),
            })
            .collect();
        let perm_group = GroupHandle::Permutation(std::sync::Arc::new(image));
        let tables = regular_tables(&elements, &psi, |a, x| perm_group.multiply(a, x));
        (
            elements.len(),
            tables,
            Construction::QuotientRegular { quotient: qi },
        )
    } else {
        let mut kk: Vec<GroupElem> = acting[1..].to_vec();
        if kk.is_empty() {
            kk.push(g.identity());
        }
        let k_idx: Vec<usize> = k_dedup.iter().map(|x| index[x]).collect();
        // The sink is shared by every point that leaves F, so on small F it
        // can push the overlap above δ. Disjoint copies of F dilute it.
        let f = find_folner(g, &kk, delta, budget)?;
        let mut copies = 1usize;
        loop {
            let tables = sink_tables(g, &acting, &f.elements, copies);
            let points = f.len() * copies + 1;
            let counts = measure_tables(
                points,
                &tables,
                0,
                &k_idx,
                |i, j| index[&g.multiply(&acting[i], &acting[j])],
                1,
            );
            if counts.passes(points, delta) || points > budget.max_set {
                break (points, tables, Construction::FolnerWithSink { copies });
            }
            copies *= 2;
        }
    };

    let k_idx: Vec<usize> = k_dedup.iter().map(|x| index[x]).collect();
    let counts = measure_tables(
        points,
        &tables,
        0,
        &k_idx,
        |i, j| index[&g.multiply(&acting[i], &acting[j])],
        1,
    );
    Ok(GroupActionWitness {
        points,
        acting,
        tables,
        k: k_dedup,
        certificate: Certificate {
            delta: delta.clone(),
            construction,
            counts,
        },
        index,
    })
}

/// Left translation inside `copies` disjoint copies of `f`, with everything
/// that leaves `f` sent to one shared sink.
fn sink_tables(g: &GroupHandle, acting: &[GroupElem], f: &[GroupElem], copies: usize) -> Vec<Vec<u32>> {
    let len = f.len();
    let sink = (len * copies) as u32;
    let pos: HashMap<&GroupElem, u32> = f.iter().enumerate().map(|(i, e)| (e, i as u32)).collect();
    acting
        .iter()
        .map(|a| {
            let one_copy: Vec<Option<u32>> = f.iter().map(|x| pos.get(&g.multiply(a, x)).copied()).collect();
            let mut t = Vec::with_capacity(len * copies + 1);
            for c in 0..copies {
                let base = (c * len) as u32;
                t.extend(one_copy.iter().map(|y| y.map_or(sink, |y| base + y)));
            }
            t.push(sink);
            t
        })
        .collect()
}

fn regular_tables<F>(elements: &[GroupElem], acting: &[GroupElem], mul: F) -> Vec<Vec<u32>>
where
    F: Fn(&GroupElem, &GroupElem) -> GroupElem,
{
    let pos: HashMap<&GroupElem, u32> = elements
        .iter()
        .enumerate()
        .map(|(i, e)| (e, i as u32))
        .collect();
    acting
        .iter()
        .map(|a| elements.iter().map(|x| pos[&mul(a, x)]).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{FiniteGroup, FreeGroup, FreeQuotient, Perm};
    use crate::rational::{ratio, zero};
    use std::sync::Arc;

    #[test]
    fn finite_group_gets_the_regular_action() {
        let g = GroupHandle::finite(FiniteGroup::cyclic(4));
        let k = g.elements().unwrap();
        let w = sofic_group_action(&g, &k, &ratio(1, 3), &SearchBudget::default()).unwrap();
        assert_eq!(w.points, 4);
        assert_eq!(w.certificate.construction, Construction::Regular);
        assert_eq!(w.certificate.counts.max_mult(w.points), zero());
        assert_eq!(w.certificate.counts.max_sep(w.points), zero());
    }

    #[test]
    fn integers_get_folner_with_sink() {
        let g = GroupHandle::integers();
        let k = vec![GroupElem::Vector(vec![1]), GroupElem::Vector(vec![-1])];
        let delta = ratio(1, 5);
        let w = sofic_group_action(&g, &k, &delta, &SearchBudget::default()).unwrap();
        assert_eq!(w.certificate.construction, Construction::FolnerWithSink { copies: 1 });
        assert!(w.certificate.counts.max_mult(w.points) <= delta);
        assert!(w.certificate.counts.max_sep(w.points) <= delta);
        assert!(w.is_valid_at(&delta));
    }

    #[test]
    fn sink_overlap_is_kept_below_delta_with_torsion() {
        // in Z × Z/2 the first box containing K is tiny, and the sink alone
        // would put the overlap of 1 and (0,1) above δ
        let g = GroupHandle::abelian(crate::groups::AbelianGroup::with_torsion(1, &[2]));
        let k = vec![GroupElem::Vector(vec![0, 0]), GroupElem::Vector(vec![0, 1])];
        let delta = ratio(1, 10);
        let w = sofic_group_action(&g, &k, &delta, &SearchBudget::default()).unwrap();
        assert!(w.points > 10);
        assert!(w.is_valid_at(&delta));
    }

    #[test]
    fn free_group_needs_a_separating_quotient() {
        let swap = Perm::from_images(vec![1, 0]).unwrap();
        let q = FreeQuotient {
            degree: 2,
            images: vec![swap.clone(), swap],
        };
        let g = GroupHandle::Free(Arc::new(FreeGroup::new(2, vec![q]).unwrap()));
        let k = vec![GroupElem::Word(vec![1]), GroupElem::Word(vec![2])];
        assert!(matches!(
            sofic_group_action(&g, &k, &ratio(1, 5), &SearchBudget::default()),
            Err(Error::NoSeparatingQuotient)
        ));
    }
}
