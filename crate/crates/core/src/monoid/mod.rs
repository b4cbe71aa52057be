//! Monoid representations: finite Cayley tables, the structured-monoid
//! oracle contract for infinite monoids, and the built-in families.

pub mod bicyclic;
pub mod coset;
pub mod finite;
pub mod free_semilattice;

pub use bicyclic::Bicyclic;
pub use coset::CosetMonoid;
pub use finite::{
    cancellativity_check, direct_product, make_finite_monoid, make_transformation_monoid,
    Cancellativity, FiniteMonoid, FiniteStructured,
};
pub use free_semilattice::FreeTimesSemilattice;

use crate::error::Result;
use crate::groups::{Amenability, GroupElem, GroupHandle};
use std::fmt;
use std::sync::Arc;

/// Canonical byte encoding of a monoid element; equal iff byte-identical.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementRef(Vec<u8>);

impl ElementRef {
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        ElementRef(bytes)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// Encoding used for elements of table monoids.
    pub fn from_index(i: usize) -> Self {
        ElementRef((i as u32).to_be_bytes().to_vec())
    }

    pub fn index(&self) -> Option<usize> {
        let b: [u8; 4] = self.0.as_slice().try_into().ok()?;
        Some(u32::from_be_bytes(b) as usize)
    }
}

impl fmt::Debug for ElementRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x")?;
        for b in &self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

/// Whether a structural fact was computed or merely declared by an instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    Computed,
    Declared,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Claim {
    pub value: bool,
    pub basis: Basis,
}

impl Claim {
    pub fn computed(value: bool) -> Self {
        Claim {
            value,
            basis: Basis::Computed,
        }
    }

    pub fn declared(value: bool) -> Self {
        Claim {
            value,
            basis: Basis::Declared,
        }
    }

    pub fn holds(claim: Option<Claim>) -> bool {
        claim.is_some_and(|c| c.value)
    }
}

/// Structural facts an instance reports for the hypothesis classifier.
/// `None` means unknown.
#[derive(Clone, Debug, Default)]
pub struct MonoidFacts {
    pub non_units_finite: Option<Claim>,
    pub r_classes_finite_outside_units: Option<Claim>,
    pub left_cancellative: Option<Claim>,
    pub right_cancellative: Option<Claim>,
    pub regular: Option<Claim>,
    pub finitely_many_l_classes_per_d: Option<Claim>,
    pub schutzenberger_groups_amenable: Option<Claim>,
    pub schutzenberger_groups_finite_or_abelian: Option<Claim>,
    pub circle_action_locally_amenable: Option<Claim>,
    /// Aggregate status of every non-unit orbit quotient.
    pub orbit_quotients: Option<Amenability>,
}

/// Quotient of the unit group by the pointwise stabiliser of one orbit of
/// its right translation action on the non-units.
pub trait StabiliserQuotient: Send + Sync {
    /// Canonical name of the orbit (equal for all members of the orbit).
    fn orbit_key(&self) -> ElementRef;

    fn quotient(&self) -> &GroupHandle;

    /// The quotient map from the unit group.
    fn project(&self, g: &GroupElem) -> GroupElem;

    /// `s * q`: right translation of an orbit element by a quotient element.
    fn translate(&self, s: &ElementRef, q: &GroupElem) -> ElementRef;

    fn amenability(&self) -> Amenability {
        self.quotient().amenability()
    }
}

/// Oracle interface for (possibly infinite) monoids.
pub trait StructuredMonoid: Send + Sync {
    fn name(&self) -> String;

    fn one(&self) -> ElementRef;

    fn multiply(&self, a: &ElementRef, b: &ElementRef) -> ElementRef;

    fn is_unit(&self, a: &ElementRef) -> bool;

    /// Defined exactly on units.
    fn unit_inverse(&self, a: &ElementRef) -> Option<ElementRef>;

    fn unit_group(&self) -> GroupHandle;

    /// The element of [`Self::unit_group`] corresponding to a unit.
    fn unit_to_group(&self, u: &ElementRef) -> Option<GroupElem>;

    /// Whether the units are exactly the J-class of the identity.
    fn units_form_j_class_of_one(&self) -> Claim;

    /// Stabiliser-quotient data for the orbit of a non-unit; `None` on units.
    fn orbit_quotient(&self, s: &ElementRef) -> Option<Arc<dyn StabiliserQuotient>>;

    fn facts(&self) -> MonoidFacts;

    fn label(&self, e: &ElementRef) -> String;

    fn parse_element(&self, label: &str) -> Result<ElementRef>;

    /// A finite spread of elements used for spot checks.
    fn sample_elements(&self) -> Vec<ElementRef>;

    /// Every element, for finite monoids.
    fn all_elements(&self) -> Option<Vec<ElementRef>> {
        None
    }
}

/// Left-to-right product of a word; the empty word is the identity.
pub fn word_product(m: &dyn StructuredMonoid, word: &[ElementRef]) -> ElementRef {
    word.iter()
        .fold(m.one(), |acc, x| m.multiply(&acc, x))
}

/// Splits a comma-separated element list, ignoring commas inside brackets.
pub fn split_labels(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' | '[' | '{' | '<' => {
                depth += 1;
                cur.push(c);
            }
            ')' | ']' | '}' | '>' => {
                depth -= 1;
                cur.push(c);
            }
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
            }
            _ => cur.push(c),
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

/// Associativity, identity and unit-inverse spot checks over products of
/// pairs drawn from `seed`. Returns the first failing description.
pub fn spot_check(m: &dyn StructuredMonoid, seed: &[ElementRef]) -> std::result::Result<(), String> {
    let one = m.one();
    if !m.is_unit(&one) {
        return Err("identity is not a unit".into());
    }
    let mut sample: Vec<ElementRef> = seed.to_vec();
    for a in seed {
        for b in seed {
            let p = m.multiply(a, b);
            if !sample.contains(&p) {
                sample.push(p);
            }
        }
    }
    for a in &sample {
        if m.multiply(&one, a) != *a || m.multiply(a, &one) != *a {
            return Err(format!("identity fails on {}", m.label(a)));
        }
        if m.is_unit(a) {
            let inv = m
                .unit_inverse(a)
                .ok_or_else(|| format!("unit {} has no inverse", m.label(a)))?;
            if m.multiply(a, &inv) != one || m.multiply(&inv, a) != one {
                return Err(format!("bad inverse for {}", m.label(a)));
            }
        } else if m.unit_inverse(a).is_some() {
            return Err(format!("non-unit {} has an inverse", m.label(a)));
        }
    }
    for a in seed {
        for b in seed {
            for c in seed {
                let l = m.multiply(&m.multiply(a, b), c);
                let r = m.multiply(a, &m.multiply(b, c));
                if l != r {
                    return Err(format!(
                        "associativity fails on ({}, {}, {})",
                        m.label(a),
                        m.label(b),
                        m.label(c)
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Checks the stabiliser-quotient contract for the orbit of `s` against
/// the given unit samples: morphism, well-definedness and kernel property.
pub fn check_orbit_quotient(
    m: &dyn StructuredMonoid,
    s: &ElementRef,
    units: &[ElementRef],
) -> std::result::Result<(), String> {
    let q = m
        .orbit_quotient(s)
        .ok_or_else(|| format!("{} has no orbit data", m.label(s)))?;
    let g = m.unit_group();
    let quotient = q.quotient();
    let image = |u: &ElementRef| {
        m.unit_to_group(u)
            .ok_or_else(|| format!("{} has no group image", m.label(u)))
    };
    if q.project(&g.identity()) != quotient.identity() {
        return Err("hom(1) is not the identity".into());
    }
    let mut orbit = vec![s.clone()];
    for u in units {
        let t = m.multiply(s, u);
        if !orbit.contains(&t) {
            orbit.push(t);
        }
    }
    for a in units {
        let ga = image(a)?;
        for b in units {
            let gb = image(b)?;
            let lhs = q.project(&g.multiply(&ga, &gb));
            let rhs = quotient.multiply(&q.project(&ga), &q.project(&gb));
            if lhs != rhs {
                return Err("hom is not a morphism".into());
            }
        }
        let qa = q.project(&ga);
        for t in &orbit {
            if m.orbit_quotient(t).map(|o| o.orbit_key()) != Some(q.orbit_key()) {
                return Err(format!("{} reports a different orbit", m.label(t)));
            }
            let moved = m.multiply(t, a);
            if q.translate(t, &qa) != moved {
                return Err(format!("translate disagrees with multiplication at {}", m.label(t)));
            }
            if qa == quotient.identity() && moved != *t {
                return Err(format!("kernel element moves {}", m.label(t)));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_splitting_respects_brackets() {
        assert_eq!(split_labels("x,(y,0)"), vec!["x", "(y,0)"]);
        assert_eq!(split_labels(" {1}, 0+2Z ,1+3Z"), vec!["{1}", "0+2Z", "1+3Z"]);
        assert!(split_labels("").is_empty());
    }

    #[test]
    fn index_encoding_round_trips() {
        let e = ElementRef::from_index(300);
        assert_eq!(e.index(), Some(300));
        assert_eq!(ElementRef::from_bytes(vec![1, 2]).index(), None);
    }
}
