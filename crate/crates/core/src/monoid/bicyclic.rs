//! The bicyclic monoid `⟨p, q | pq = 1⟩` in normal form `q^a p^b`.

use super::{Claim, ElementRef, MonoidFacts, StabiliserQuotient, StructuredMonoid};
use crate::error::{Error, Result};
use crate::groups::{Amenability, GroupElem, GroupHandle};
use std::sync::Arc;

/// Elements are pairs `(a, b)` standing for `q^a p^b`, with `p = (0,1)` and
/// `q = (1,0)`. The identity is the only unit.
#[derive(Clone, Copy, Debug, Default)]
pub struct Bicyclic;

pub fn make_bicyclic() -> Bicyclic {
    Bicyclic
}

impl Bicyclic {
    pub fn encode(a: u64, b: u64) -> ElementRef {
        let mut bytes = a.to_be_bytes().to_vec();
        bytes.extend_from_slice(&b.to_be_bytes());
        ElementRef::from_bytes(bytes)
    }

    pub fn decode(e: &ElementRef) -> (u64, u64) {
        let b = e.as_bytes();
        assert_eq!(b.len(), 16, "not a bicyclic element");
        (
            u64::from_be_bytes(b[..8].try_into().unwrap()),
            u64::from_be_bytes(b[8..].try_into().unwrap()),
        )
    }

    pub fn p() -> ElementRef {
        Self::encode(0, 1)
    }

    pub fn q() -> ElementRef {
        Self::encode(1, 0)
    }

    /// `(a,b)(c,d) = (a + c − m, b + d − m)` with `m = min(b, c)`.
    pub fn product(x: (u64, u64), y: (u64, u64)) -> (u64, u64) {
        let m = x.1.min(y.0);
        (x.0 + y.0 - m, x.1 + y.1 - m)
    }

    pub fn label_of(a: u64, b: u64) -> String {
        let power = |sym: &str, n: u64| match n {
            0 => String::new(),
            1 => sym.to_string(),
            n => format!("{sym}^{n}"),
        };
        if a == 0 && b == 0 {
            "1".into()
        } else {
            power("q", a) + &power("p", b)
        }
    }
}

/// Every non-unit orbit is a single point, acted on by the trivial group.
struct PointOrbit {
    point: ElementRef,
    quotient: GroupHandle,
}

impl StabiliserQuotient for PointOrbit {
    fn orbit_key(&self) -> ElementRef {
        self.point.clone()
    }

    fn quotient(&self) -> &GroupHandle {
        &self.quotient
    }

    fn project(&self, _g: &GroupElem) -> GroupElem {
        self.quotient.identity()
    }

    fn translate(&self, s: &ElementRef, _q: &GroupElem) -> ElementRef {
        s.clone()
    }
}

impl StructuredMonoid for Bicyclic {
    fn name(&self) -> String {
        "bicyclic monoid".into()
    }

    fn one(&self) -> ElementRef {
        Self::encode(0, 0)
    }

    fn multiply(&self, a: &ElementRef, b: &ElementRef) -> ElementRef {
        let (x, y) = Self::product(Self::decode(a), Self::decode(b));
        Self::encode(x, y)
    }

    fn is_unit(&self, a: &ElementRef) -> bool {
        Self::decode(a) == (0, 0)
    }

    fn unit_inverse(&self, a: &ElementRef) -> Option<ElementRef> {
        self.is_unit(a).then(|| a.clone())
    }

    fn unit_group(&self) -> GroupHandle {
        GroupHandle::trivial()
    }

    fn unit_to_group(&self, u: &ElementRef) -> Option<GroupElem> {
        self.is_unit(u).then_some(GroupElem::Index(0))
    }

    /// `1 = pq` with `p` a non-unit, so `p` lies in the J-class of `1`.
    fn units_form_j_class_of_one(&self) -> Claim {
        Claim::declared(false)
    }

    fn orbit_quotient(&self, s: &ElementRef) -> Option<Arc<dyn StabiliserQuotient>> {
        if self.is_unit(s) {
            return None;
        }
        Some(Arc::new(PointOrbit {
            point: s.clone(),
            quotient: GroupHandle::trivial(),
        }))
    }

    fn facts(&self) -> MonoidFacts {
        MonoidFacts {
            non_units_finite: Some(Claim::declared(false)),
            r_classes_finite_outside_units: Some(Claim::declared(false)),
            // p·1 = p·qp and 1·q = qp·q
            left_cancellative: Some(Claim::declared(false)),
            right_cancellative: Some(Claim::declared(false)),
            regular: Some(Claim::declared(true)),
            // a single D-class with infinitely many L-classes
            finitely_many_l_classes_per_d: Some(Claim::declared(false)),
            schutzenberger_groups_amenable: Some(Claim::declared(true)),
            schutzenberger_groups_finite_or_abelian: Some(Claim::declared(true)),
            circle_action_locally_amenable: Some(Claim::declared(true)),
            orbit_quotients: Some(Amenability::Finite),
        }
    }

    fn label(&self, e: &ElementRef) -> String {
        let (a, b) = Self::decode(e);
        Self::label_of(a, b)
    }

    /// Accepts `1`, words in `q` and `p` with optional `^n` exponents
    /// (any order, reduced with `pq = 1`), and pairs `(a,b)`.
    fn parse_element(&self, label: &str) -> Result<ElementRef> {
        let bad = || Error::UnknownElement(label.to_string());
        let t = label.trim();
        if let Some(inner) = t.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
            let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
            if parts.len() != 2 {
                return Err(bad());
            }
            let a = parts[0].parse().map_err(|_| bad())?;
            let b = parts[1].parse().map_err(|_| bad())?;
            return Ok(Self::encode(a, b));
        }
        if t == "1" {
            return Ok(self.one());
        }
        let chars: Vec<char> = t.chars().collect();
        if chars.is_empty() {
            return Err(bad());
        }
        let mut acc = (0u64, 0u64);
        let mut i = 0;
        while i < chars.len() {
            let gen = match chars[i] {
                'p' => (0, 1),
                'q' => (1, 0),
                _ => return Err(bad()),
            };
            i += 1;
            let mut n = 1u64;
            if i < chars.len() && chars[i] == '^' {
                let start = i + 1;
                i = start;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                n = chars[start..i]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| bad())?;
            }
            let power = (gen.0 * n, gen.1 * n);
            acc = Self::product(acc, power);
        }
        Ok(Self::encode(acc.0, acc.1))
    }

    fn sample_elements(&self) -> Vec<ElementRef> {
        (0..4)
            .flat_map(|a| (0..4).map(move |b| Self::encode(a, b)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::{spot_check, word_product};

    #[test]
    fn defining_relation() {
        let m = make_bicyclic();
        assert_eq!(word_product(&m, &[Bicyclic::p(), Bicyclic::q()]), m.one());
        let qp = word_product(&m, &[Bicyclic::q(), Bicyclic::p()]);
        assert_eq!(Bicyclic::decode(&qp), (1, 1));
        assert!(!m.is_unit(&qp));
        assert_eq!(word_product(&m, &[]), m.one());
    }

    #[test]
    fn product_formula() {
        assert_eq!(Bicyclic::product((2, 3), (1, 4)), (2, 6));
        assert_eq!(Bicyclic::product((0, 1), (1, 0)), (0, 0));
        assert_eq!(Bicyclic::product((1, 0), (0, 1)), (1, 1));
    }

    #[test]
    fn labels_round_trip() {
        let m = make_bicyclic();
        for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1), (2, 3), (10, 0)] {
            let e = Bicyclic::encode(a, b);
            assert_eq!(m.parse_element(&m.label(&e)).unwrap(), e);
        }
        assert_eq!(m.label(&Bicyclic::encode(2, 3)), "q^2p^3");
        assert_eq!(m.parse_element("pq").unwrap(), m.one());
        assert_eq!(m.parse_element("(3,1)").unwrap(), Bicyclic::encode(3, 1));
        assert!(m.parse_element("x").is_err());
    }

    #[test]
    fn structured_contract() {
        let m = make_bicyclic();
        spot_check(&m, &m.sample_elements()).unwrap();
        assert_eq!(m.units_form_j_class_of_one(), Claim::declared(false));
        assert!(m.orbit_quotient(&m.one()).is_none());
        crate::monoid::check_orbit_quotient(&m, &Bicyclic::p(), &[m.one()]).unwrap();
    }
}
