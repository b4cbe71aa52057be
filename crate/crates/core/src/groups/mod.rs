//! Groups with Følner-set search and finite approximate actions.
//!
//! A [`GroupHandle`] is one of a handful of concrete presentations: finite
//! Cayley tables, finitely generated abelian groups `Z^r / L`, free groups
//! carrying finite quotient data, finite permutation groups, and images of a
//! group in a product of stabiliser quotients.

pub mod abelian;
pub mod approx;
pub mod finite;
pub mod folner;
pub mod free;
pub mod image;
pub mod perm;
pub mod permgroup;

pub use abelian::{AbelianGroup, Lattice};
pub use approx::{sofic_group_action, GroupActionWitness};
pub use finite::FiniteGroup;
pub use folner::{find_folner, folner_quality, FolnerSet, SearchBudget};
pub use free::{FreeGroup, FreeQuotient};
pub use image::{joint_quotient_image, ImageGroup, ImageHom};
pub use perm::Perm;
pub use permgroup::PermGroup;

use std::fmt;
use std::sync::Arc;

/// A group element. Each presentation keeps its elements canonical, so
/// structural equality is group equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElem {
    Index(u32),
    Vector(Vec<i64>),
    Word(Vec<i32>),
    Perm(Perm),
    Tuple(Vec<GroupElem>),
}

impl GroupElem {
    /// Canonical, self-delimiting byte encoding.
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.encode_into(&mut out);
        out
    }

    fn encode_into(&self, out: &mut Vec<u8>) {
        match self {
            GroupElem::Index(i) => {
                out.push(1);
                out.extend_from_slice(&i.to_be_bytes());
            }
            GroupElem::Vector(v) => {
                out.push(2);
                out.extend_from_slice(&(v.len() as u32).to_be_bytes());
                for x in v {
                    out.extend_from_slice(&x.to_be_bytes());
                }
            }
            GroupElem::Word(w) => {
                out.push(3);
                out.extend_from_slice(&(w.len() as u32).to_be_bytes());
                for x in w {
                    out.extend_from_slice(&x.to_be_bytes());
                }
            }
            GroupElem::Perm(p) => {
                out.push(4);
                out.extend_from_slice(&(p.degree() as u32).to_be_bytes());
                for x in p.images() {
                    out.extend_from_slice(&x.to_be_bytes());
                }
            }
            GroupElem::Tuple(t) => {
                out.push(5);
                out.extend_from_slice(&(t.len() as u32).to_be_bytes());
                for x in t {
                    x.encode_into(out);
                }
            }
        }
    }

    pub fn component(&self, i: usize) -> &GroupElem {
        match self {
            GroupElem::Tuple(t) => &t[i],
            _ => panic!("component() on a non-tuple element"),
        }
    }
}

impl fmt::Debug for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElem::Index(i) => write!(f, "#{i}"),
            GroupElem::Vector(v) => write!(f, "{}", abelian::fmt_vector(v)),
            GroupElem::Word(w) => write!(f, "w{w:?}"),
            GroupElem::Perm(p) => write!(f, "{p:?}"),
            GroupElem::Tuple(t) => f.debug_tuple("").field(t).finish(),
        }
    }
}

/// What is known about the amenability of a group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Amenability {
    Finite,
    /// Infinite, with a constructive Følner provider.
    AmenableProvider,
    DeclaredNonAmenable,
    Unknown,
}

impl Amenability {
    pub fn is_capable(self) -> bool {
        matches!(self, Amenability::Finite | Amenability::AmenableProvider)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Amenability::Finite => "finite",
            Amenability::AmenableProvider => "amenable-provider",
            Amenability::DeclaredNonAmenable => "declared-nonamenable",
            Amenability::Unknown => "unknown",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupKind {
    FiniteTable,
    FgAbelian,
    ResiduallyFinite,
    Permutation,
    QuotientImage,
}

/// Shared handle to a group presentation.
#[derive(Clone)]
pub enum GroupHandle {
    Finite(Arc<FiniteGroup>),
    Abelian(Arc<AbelianGroup>),
    Free(Arc<FreeGroup>),
    Permutation(Arc<PermGroup>),
    Image(Arc<ImageGroup>),
}

impl fmt::Debug for GroupHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupHandle({})", self.describe())
    }
}

impl GroupHandle {
    pub fn finite(g: FiniteGroup) -> Self {
        GroupHandle::Finite(Arc::new(g))
    }

    pub fn abelian(g: AbelianGroup) -> Self {
        GroupHandle::Abelian(Arc::new(g))
    }

    pub fn integers() -> Self {
        Self::abelian(AbelianGroup::free(1))
    }

    pub fn trivial() -> Self {
        Self::finite(FiniteGroup::trivial())
    }

    pub fn kind(&self) -> GroupKind {
        match self {
            GroupHandle::Finite(_) => GroupKind::FiniteTable,
            GroupHandle::Abelian(_) => GroupKind::FgAbelian,
            GroupHandle::Free(_) => GroupKind::ResiduallyFinite,
            GroupHandle::Permutation(_) => GroupKind::Permutation,
            GroupHandle::Image(_) => GroupKind::QuotientImage,
        }
    }

    pub fn identity(&self) -> GroupElem {
        match self {
            GroupHandle::Finite(g) => GroupElem::Index(g.identity() as u32),
            GroupHandle::Abelian(g) => GroupElem::Vector(g.identity()),
            GroupHandle::Free(_) => GroupElem::Word(Vec::new()),
            GroupHandle::Permutation(g) => GroupElem::Perm(Perm::identity(g.degree())),
            GroupHandle::Image(g) => g.identity(),
        }
    }

    pub fn multiply(&self, a: &GroupElem, b: &GroupElem) -> GroupElem {
        match (self, a, b) {
            (GroupHandle::Finite(g), GroupElem::Index(x), GroupElem::Index(y)) => {
                GroupElem::Index(g.multiply(*x as usize, *y as usize) as u32)
            }
            (GroupHandle::Abelian(g), GroupElem::Vector(x), GroupElem::Vector(y)) => {
                GroupElem::Vector(g.multiply(x, y))
            }
            (GroupHandle::Free(g), GroupElem::Word(x), GroupElem::Word(y)) => {
                GroupElem::Word(g.multiply(x, y))
            }
            (GroupHandle::Permutation(_), GroupElem::Perm(x), GroupElem::Perm(y)) => {
                GroupElem::Perm(x.then(y))
            }
            (GroupHandle::Image(g), a, b) => g.multiply(a, b),
            _ => panic!("element kind does not match group {}", self.describe()),
        }
    }

    pub fn inverse(&self, a: &GroupElem) -> GroupElem {
        match (self, a) {
            (GroupHandle::Finite(g), GroupElem::Index(x)) => {
                GroupElem::Index(g.inverse(*x as usize) as u32)
            }
            (GroupHandle::Abelian(g), GroupElem::Vector(x)) => GroupElem::Vector(g.inverse(x)),
            (GroupHandle::Free(g), GroupElem::Word(x)) => GroupElem::Word(g.inverse(x)),
            (GroupHandle::Permutation(_), GroupElem::Perm(x)) => GroupElem::Perm(x.inverse()),
            (GroupHandle::Image(g), a) => g.inverse(a),
            _ => panic!("element kind does not match group {}", self.describe()),
        }
    }

    /// `None` for infinite groups.
    pub fn order(&self) -> Option<u64> {
        match self {
            GroupHandle::Finite(g) => Some(g.order() as u64),
            GroupHandle::Abelian(g) => g.order(),
            GroupHandle::Free(g) => (g.rank() == 0).then_some(1),
            GroupHandle::Permutation(g) => Some(g.order() as u64),
            GroupHandle::Image(g) => g.order(),
        }
    }

    /// All elements of a finite group, in a fixed deterministic order.
    pub fn elements(&self) -> Option<Vec<GroupElem>> {
        match self {
            GroupHandle::Finite(g) => {
                Some((0..g.order() as u32).map(GroupElem::Index).collect())
            }
            GroupHandle::Abelian(g) => {
                g.elements().map(|v| v.into_iter().map(GroupElem::Vector).collect())
            }
            GroupHandle::Free(g) => (g.rank() == 0).then(|| vec![GroupElem::Word(Vec::new())]),
            GroupHandle::Permutation(g) => {
                Some(g.elements().iter().cloned().map(GroupElem::Perm).collect())
            }
            GroupHandle::Image(g) => g.elements().map(|e| e.to_vec()),
        }
    }

    pub fn generators(&self) -> Vec<GroupElem> {
        match self {
            GroupHandle::Finite(g) => g
                .generators()
                .into_iter()
                .map(|i| GroupElem::Index(i as u32))
                .collect(),
            GroupHandle::Abelian(g) => g.generators().into_iter().map(GroupElem::Vector).collect(),
            GroupHandle::Free(g) => g.generators().into_iter().map(GroupElem::Word).collect(),
            GroupHandle::Permutation(g) => {
                g.generators().iter().cloned().map(GroupElem::Perm).collect()
            }
            GroupHandle::Image(g) => g.generators().to_vec(),
        }
    }

    pub fn amenability(&self) -> Amenability {
        match self {
            GroupHandle::Finite(_) | GroupHandle::Permutation(_) => Amenability::Finite,
            GroupHandle::Abelian(g) => {
                if g.order().is_some() {
                    Amenability::Finite
                } else {
                    Amenability::AmenableProvider
                }
            }
            GroupHandle::Free(g) => match g.rank() {
                0 => Amenability::Finite,
                1 => Amenability::Unknown,
                _ => Amenability::DeclaredNonAmenable,
            },
            GroupHandle::Image(g) => g.amenability(),
        }
    }

    /// Whether [`sofic_group_action`] can produce witnesses for this group.
    pub fn has_sofic_provider(&self) -> bool {
        match self {
            GroupHandle::Free(g) => g.rank() == 0 || !g.quotients().is_empty(),
            other => other.amenability().is_capable(),
        }
    }

    pub fn is_abelian(&self) -> Option<bool> {
        match self {
            GroupHandle::Finite(g) => Some(g.is_abelian()),
            GroupHandle::Abelian(_) => Some(true),
            GroupHandle::Free(g) => Some(g.rank() <= 1),
            GroupHandle::Permutation(g) => Some(
                g.generators()
                    .iter()
                    .all(|a| g.generators().iter().all(|b| a.then(b) == b.then(a))),
            ),
            GroupHandle::Image(g) => g.elements().map(|els| {
                els.iter()
                    .all(|a| els.iter().all(|b| g.multiply(a, b) == g.multiply(b, a)))
            }),
        }
    }

    /// Membership for elements of the matching kind (canonical form included).
    pub fn contains(&self, a: &GroupElem) -> bool {
        match (self, a) {
            (GroupHandle::Finite(g), GroupElem::Index(x)) => (*x as usize) < g.order(),
            (GroupHandle::Abelian(g), GroupElem::Vector(v)) => {
                v.len() == g.ambient_rank() && &g.reduce(v) == v
            }
            (GroupHandle::Free(g), GroupElem::Word(w)) => {
                w.iter().all(|l| *l != 0 && l.unsigned_abs() as usize <= g.rank())
                    && w.windows(2).all(|p| p[0] != -p[1])
            }
            (GroupHandle::Permutation(g), GroupElem::Perm(p)) => g.contains(p),
            (GroupHandle::Image(g), a) => g.contains(a),
            _ => false,
        }
    }

    pub fn label(&self, a: &GroupElem) -> String {
        match (self, a) {
            (GroupHandle::Finite(g), GroupElem::Index(x)) => g.name(*x as usize).to_string(),
            (GroupHandle::Free(g), GroupElem::Word(w)) => g.label(w),
            (GroupHandle::Image(g), GroupElem::Tuple(t)) => {
                let parts: Vec<String> = t
                    .iter()
                    .zip(g.components())
                    .map(|(x, c)| c.quotient().label(x))
                    .collect();
                format!("({})", parts.join(","))
            }
            (_, a) => format!("{a:?}"),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            GroupHandle::Finite(g) => format!("finite table group of order {}", g.order()),
            GroupHandle::Abelian(g) => match g.order() {
                Some(n) => format!("finite abelian Z^{}/{:?} of order {n}", g.ambient_rank(), g.relations()),
                None => format!("abelian Z^{}/{:?}", g.ambient_rank(), g.relations()),
            },
            GroupHandle::Free(g) => format!(
                "free group of rank {} with {} finite quotient(s)",
                g.rank(),
                g.quotients().len()
            ),
            GroupHandle::Permutation(g) => {
                format!("permutation group of degree {} and order {}", g.degree(), g.order())
            }
            GroupHandle::Image(g) => g.describe(),
        }
    }
}
