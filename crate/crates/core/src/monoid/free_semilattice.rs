//! Direct product of a free group with the two-element semilattice.

use super::{split_labels, Claim, ElementRef, MonoidFacts, StabiliserQuotient, StructuredMonoid};
use crate::error::{Error, Result};
use crate::groups::{Amenability, FreeGroup, FreeQuotient, GroupElem, GroupHandle};
use std::sync::Arc;

/// Elements are pairs `(w, b)` with `w` a reduced word and `b ∈ {0, 1}`;
/// `(w,b)(v,c) = (wv, b ∧ c)`. The units are `F × {1}`.
#[derive(Clone)]
pub struct FreeTimesSemilattice {
    group: Arc<FreeGroup>,
    handle: GroupHandle,
}

pub fn make_free_times_semilattice(
    rank: usize,
    quotient_data: Vec<FreeQuotient>,
) -> Result<FreeTimesSemilattice> {
    if rank == 0 {
        return Err(Error::InvalidArgument("rank must be positive".into()));
    }
    let group = Arc::new(FreeGroup::new(rank, quotient_data)?);
    Ok(FreeTimesSemilattice {
        handle: GroupHandle::Free(group.clone()),
        group,
    })
}

impl FreeTimesSemilattice {
    pub fn encode(word: &[i32], bit: bool) -> ElementRef {
        let mut bytes = vec![bit as u8];
        for l in word {
            bytes.extend_from_slice(&l.to_be_bytes());
        }
        ElementRef::from_bytes(bytes)
    }

    pub fn decode(e: &ElementRef) -> (Vec<i32>, bool) {
        let b = e.as_bytes();
        let word = b[1..]
            .chunks(4)
            .map(|c| i32::from_be_bytes(c.try_into().expect("word encoding")))
            .collect();
        (word, b[0] == 1)
    }

    pub fn group(&self) -> &FreeGroup {
        &self.group
    }
}

/// The single non-unit orbit `F × {0}`, on which `F` acts freely.
struct ZeroLayer {
    handle: GroupHandle,
}

impl StabiliserQuotient for ZeroLayer {
    fn orbit_key(&self) -> ElementRef {
        FreeTimesSemilattice::encode(&[], false)
    }

    fn quotient(&self) -> &GroupHandle {
        &self.handle
    }

    fn project(&self, g: &GroupElem) -> GroupElem {
        g.clone()
    }

    fn translate(&self, s: &ElementRef, q: &GroupElem) -> ElementRef {
        let (w, _) = FreeTimesSemilattice::decode(s);
        let GroupElem::Word(v) = q else {
            panic!("free group elements are words")
        };
        let GroupHandle::Free(f) = &self.handle else {
            unreachable!()
        };
        FreeTimesSemilattice::encode(&f.multiply(&w, v), false)
    }

    fn amenability(&self) -> Amenability {
        self.handle.amenability()
    }
}

impl StructuredMonoid for FreeTimesSemilattice {
    fn name(&self) -> String {
        format!("free group of rank {} times semilattice", self.group.rank())
    }

    fn one(&self) -> ElementRef {
        Self::encode(&[], true)
    }

    fn multiply(&self, a: &ElementRef, b: &ElementRef) -> ElementRef {
        let (w, x) = Self::decode(a);
        let (v, y) = Self::decode(b);
        Self::encode(&self.group.multiply(&w, &v), x && y)
    }

    fn is_unit(&self, a: &ElementRef) -> bool {
        Self::decode(a).1
    }

    fn unit_inverse(&self, a: &ElementRef) -> Option<ElementRef> {
        let (w, b) = Self::decode(a);
        b.then(|| Self::encode(&self.group.inverse(&w), true))
    }

    fn unit_group(&self) -> GroupHandle {
        self.handle.clone()
    }

    fn unit_to_group(&self, u: &ElementRef) -> Option<GroupElem> {
        let (w, b) = Self::decode(u);
        b.then_some(GroupElem::Word(w))
    }

    /// Any product involving a `(w, 0)` factor stays in `F × {0}`.
    fn units_form_j_class_of_one(&self) -> Claim {
        Claim::declared(true)
    }

    fn orbit_quotient(&self, s: &ElementRef) -> Option<Arc<dyn StabiliserQuotient>> {
        (!self.is_unit(s)).then(|| {
            Arc::new(ZeroLayer {
                handle: self.handle.clone(),
            }) as Arc<dyn StabiliserQuotient>
        })
    }

    fn facts(&self) -> MonoidFacts {
        let f_amenable = self.handle.amenability().is_capable();
        let f_abelian = self.group.rank() <= 1;
        MonoidFacts {
            non_units_finite: Some(Claim::computed(false)),
            r_classes_finite_outside_units: Some(Claim::computed(false)),
            // (1,0)(1,1) = (1,0)(1,0)
            left_cancellative: Some(Claim::computed(false)),
            right_cancellative: Some(Claim::computed(false)),
            // (w,0)(w⁻¹,0)(w,0) = (w,0)
            regular: Some(Claim::declared(true)),
            // F × {0} is one H-class
            finitely_many_l_classes_per_d: Some(Claim::declared(true)),
            schutzenberger_groups_amenable: Some(Claim::declared(f_amenable)),
            schutzenberger_groups_finite_or_abelian: Some(Claim::declared(f_abelian)),
            circle_action_locally_amenable: Some(Claim::declared(true)),
            orbit_quotients: Some(self.handle.amenability()),
        }
    }

    fn label(&self, e: &ElementRef) -> String {
        let (w, b) = Self::decode(e);
        let word = self.group.label(&w);
        if b {
            word
        } else {
            format!("({word},0)")
        }
    }

    /// `w` or `(w,1)` for units, `(w,0)` otherwise; `w` in the free group's syntax.
    fn parse_element(&self, label: &str) -> Result<ElementRef> {
        let bad = || Error::UnknownElement(label.to_string());
        let t = label.trim();
        if let Some(inner) = t.strip_prefix('(').and_then(|x| x.strip_suffix(')')) {
            let parts = split_labels(inner);
            if parts.len() != 2 {
                return Err(bad());
            }
            let w = self.group.parse(&parts[0]).map_err(|_| bad())?;
            let b = match parts[1].as_str() {
                "0" => false,
                "1" => true,
                _ => return Err(bad()),
            };
            return Ok(Self::encode(&w, b));
        }
        Ok(Self::encode(&self.group.parse(t).map_err(|_| bad())?, true))
    }

    fn sample_elements(&self) -> Vec<ElementRef> {
        let mut words: Vec<Vec<i32>> = vec![Vec::new()];
        let letters: Vec<i32> = (1..=self.group.rank() as i32).flat_map(|l| [l, -l]).collect();
        for w in words.clone() {
            for &l in &letters {
                words.push(self.group.multiply(&w, &[l]));
            }
        }
        for w in words.clone().into_iter().skip(1) {
            for &l in &letters {
                let v = self.group.multiply(&w, &[l]);
                if !words.contains(&v) {
                    words.push(v);
                }
            }
        }
        words
            .iter()
            .flat_map(|w| [Self::encode(w, true), Self::encode(w, false)])
            .collect()
    }
}
