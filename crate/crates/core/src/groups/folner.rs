use super::{Amenability, GroupElem, GroupHandle};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashSet;

/// Limits on Følner and enumeration searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Largest side length of a box in `Z^r`.
    pub max_side: u64,
    /// Largest candidate set measured.
    pub max_set: usize,
    /// Largest finite group enumerated.
    pub enumeration_cap: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_side: 100_000,
            max_set: 2_000_000,
            enumeration_cap: 1_000_000,
        }
    }
}

/// A finite subset of a group together with the quality it was accepted at.
#[derive(Clone, Debug)]
pub struct FolnerSet {
    pub group: GroupHandle,
    pub elements: Vec<GroupElem>,
    /// Quality for the set `K` the search was run against.
    pub quality: Rational,
    pub strategy: &'static str,
}

impl FolnerSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Re-measures the quality against an arbitrary nonempty `K`.
    pub fn quality_for(&self, k: &[GroupElem]) -> Result<Rational> {
        folner_quality(&self.group, k, &self.elements)
    }
}

#[derive(Serialize)]
pub struct FolnerReport {
    pub group: String,
    #[serde(rename = "K")]
    pub k: Vec<String>,
    #[serde(rename = "F_size")]
    pub f_size: usize,
    pub quality: String,
}

impl FolnerReport {
    pub fn new(group: &GroupHandle, k: &[GroupElem], f: &FolnerSet) -> Self {
        FolnerReport {
            group: group.describe(),
            k: k.iter().map(|x| group.label(x)).collect(),
            f_size: f.len(),
            quality: rational::render(&f.quality),
        }
    }
}

/// Exact proportion of `f ∈ F` with `k·f ∈ F` for every `k ∈ K`.
pub fn folner_quality(g: &GroupHandle, k: &[GroupElem], f: &[GroupElem]) -> Result<Rational> {
    if k.is_empty() {
        return Err(Error::EmptySet("K"));
    }
    if f.is_empty() {
        return Err(Error::EmptySet("F"));
    }
    let set: HashSet<&GroupElem> = f.iter().collect();
    let good: usize = if set.len() == f.len() {
        count_good(g, k, f.par_iter(), &set)
    } else {
        let mut seen = HashSet::new();
        let distinct: Vec<&GroupElem> = f.iter().filter(|x| seen.insert(*x)).collect();
        count_good(g, k, distinct.into_par_iter(), &set)
    };
    Ok(rational::ratio(good as u64, set.len() as u64))
}

fn count_good<'a, I>(g: &GroupHandle, k: &[GroupElem], f: I, set: &HashSet<&GroupElem>) -> usize
where
    I: ParallelIterator<Item = &'a GroupElem>,
{
    f.filter(|x| k.iter().all(|kk| set.contains(&g.multiply(kk, x))))
        .count()
}

/// Searches for `F` with quality strictly greater than `1 − δ`.
pub fn find_folner(
    g: &GroupHandle,
    k: &[GroupElem],
    delta: &Rational,
    budget: &SearchBudget,
) -> Result<FolnerSet> {
    if k.is_empty() {
        return Ok(FolnerSet {
            group: g.clone(),
            elements: vec![g.identity()],
            quality: rational::one(),
            strategy: "vacuous: K is empty, F = {1}",
        });
    }
    let threshold = rational::one() - delta;
    if let Some(order) = g.order() {
        if order as usize > budget.enumeration_cap {
            return Err(Error::CapExceeded {
                what: "finite group enumeration",
                needed: order.to_string(),
                cap: budget.enumeration_cap,
            });
        }
        let elements = g.elements().expect("finite group enumerates");
        let quality = folner_quality(g, k, &elements)?;
        return accept(g, elements, quality, &threshold, "whole finite group");
    }
    match (g, g.amenability()) {
        (GroupHandle::Abelian(a), _) => {
            let project = |v: Vec<i64>| GroupElem::Vector(a.reduce(&v));
            box_search(g, k, &threshold, budget, a.ambient_rank(), project, "growing box")
        }
        (GroupHandle::Image(img), Amenability::AmenableProvider) => {
            let GroupHandle::Abelian(a) = img.source() else {
                unreachable!("amenable image groups have abelian sources")
            };
            let project = |v: Vec<i64>| img.project(&GroupElem::Vector(a.reduce(&v)));
            box_search(
                g,
                k,
                &threshold,
                budget,
                a.ambient_rank(),
                project,
                "measured pushforward of source boxes",
            )
        }
        _ => Err(Error::NotAmenableCapable(g.describe())),
    }
}

fn accept(
    g: &GroupHandle,
    elements: Vec<GroupElem>,
    quality: Rational,
    threshold: &Rational,
    strategy: &'static str,
) -> Result<FolnerSet> {
    if &quality > threshold {
        Ok(FolnerSet {
            group: g.clone(),
            elements,
            quality,
            strategy,
        })
    } else {
        Err(Error::SearchBudgetExceeded {
            what: strategy.to_string(),
            best: quality,
        })
    }
}

fn box_search<P>(
    g: &GroupHandle,
    k: &[GroupElem],
    threshold: &Rational,
    budget: &SearchBudget,
    rank: usize,
    project: P,
    strategy: &'static str,
) -> Result<FolnerSet>
where
    P: Fn(Vec<i64>) -> GroupElem,
{
    let mut best = rational::zero();
    let mut side: u64 = 1;
    while side <= budget.max_side {
        let volume = (side as u128).checked_pow(rank as u32).unwrap_or(u128::MAX);
        if volume > budget.max_set as u128 {
            break;
        }
        let mut seen = HashSet::new();
        let mut elements = Vec::new();
        for v in box_points(rank, side as i64) {
            let e = project(v);
            if seen.insert(e.clone()) {
                elements.push(e);
            }
        }
        let quality = folner_quality(g, k, &elements)?;
        if &quality > threshold {
            return Ok(FolnerSet {
                group: g.clone(),
                elements,
                quality,
                strategy,
            });
        }
        if quality > best {
            best = quality;
        }
        side += if side < 64 { 1 } else { side / 16 };
    }
    Err(Error::SearchBudgetExceeded {
        what: format!("{strategy} (max side {}, max set {})", budget.max_side, budget.max_set),
        best,
    })
}

/// Lattice points of `[0, side)^rank` in lexicographic order.
pub(crate) fn box_points(rank: usize, side: i64) -> impl Iterator<Item = Vec<i64>> {
    let total = (side as u128).pow(rank as u32);
    (0..total).map(move |mut idx| {
        let mut v = vec![0i64; rank];
        for c in (0..rank).rev() {
            v[c] = (idx % side as u128) as i64;
            idx /= side as u128;
        }
        v
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{AbelianGroup, FiniteGroup, FreeGroup};
    use crate::rational::ratio;
    use std::sync::Arc;

    fn z(v: i64) -> GroupElem {
        GroupElem::Vector(vec![v])
    }

    #[test]
    fn integer_interval_quality() {
        let g = GroupHandle::integers();
        let f: Vec<GroupElem> = (0..10).map(z).collect();
        assert_eq!(folner_quality(&g, &[z(1), z(-1)], &f).unwrap(), ratio(8, 10));
    }

    #[test]
    fn whole_finite_group_has_quality_one() {
        let g = GroupHandle::finite(FiniteGroup::cyclic(5));
        let all = g.elements().unwrap();
        for k in &all {
            assert_eq!(folner_quality(&g, &[k.clone()], &all).unwrap(), rational::one());
        }
    }

    #[test]
    fn empty_sets_are_rejected() {
        let g = GroupHandle::integers();
        assert!(matches!(folner_quality(&g, &[], &[z(0)]), Err(Error::EmptySet("K"))));
        assert!(matches!(folner_quality(&g, &[z(0)], &[]), Err(Error::EmptySet("F"))));
    }

    #[test]
    fn smallest_box_for_integers() {
        let g = GroupHandle::integers();
        let f = find_folner(&g, &[z(1), z(-1)], &ratio(1, 5), &SearchBudget::default()).unwrap();
        assert_eq!(f.elements, (0..=10).map(z).collect::<Vec<_>>());
        assert_eq!(f.quality, ratio(9, 11));
    }

    #[test]
    fn free_group_is_refused() {
        let g = GroupHandle::Free(Arc::new(FreeGroup::new(2, vec![]).unwrap()));
        let x = GroupElem::Word(vec![1]);
        assert!(matches!(
            find_folner(&g, &[x], &ratio(1, 5), &SearchBudget::default()),
            Err(Error::NotAmenableCapable(_))
        ));
    }

    #[test]
    fn budget_is_reported_with_best_quality() {
        let g = GroupHandle::abelian(AbelianGroup::free(1));
        let budget = SearchBudget {
            max_side: 5,
            ..SearchBudget::default()
        };
        match find_folner(&g, &[z(1)], &ratio(1, 100), &budget) {
            Err(Error::SearchBudgetExceeded { best, .. }) => assert_eq!(best, ratio(4, 5)),
            other => panic!("unexpected {other:?}"),
        }
    }
}
