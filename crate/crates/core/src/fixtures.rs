//! Named example monoids shared by the command line and the tests.

use crate::error::{Error, Result};
use crate::groups::{FreeQuotient, GroupHandle, Perm};
use crate::monoid::coset::{integer_coset_monoid, make_coset_monoid, SubgroupSpec};
use crate::monoid::finite::{cyclic_group, semilattice, trivial};
use crate::monoid::free_semilattice::make_free_times_semilattice;
use crate::monoid::{
    direct_product, make_transformation_monoid, split_labels, Bicyclic, ElementRef, FiniteMonoid,
    FiniteStructured, StructuredMonoid,
};
use crate::groups::{AbelianGroup, FiniteGroup};
use std::sync::Arc;

/// A fixture's monoid, keeping the table when there is one.
pub enum FixtureMonoid {
    Finite(FiniteStructured),
    Structured(Arc<dyn StructuredMonoid>),
}

pub struct Fixture {
    pub name: &'static str,
    pub description: &'static str,
    /// How elements are written on the command line.
    pub grammar: &'static str,
    pub monoid: FixtureMonoid,
}

impl Fixture {
    pub fn structured(&self) -> &dyn StructuredMonoid {
        match &self.monoid {
            FixtureMonoid::Finite(f) => f,
            FixtureMonoid::Structured(s) => s.as_ref(),
        }
    }

    pub fn finite(&self) -> Option<&FiniteMonoid> {
        match &self.monoid {
            FixtureMonoid::Finite(f) => Some(f.monoid()),
            FixtureMonoid::Structured(_) => None,
        }
    }

    pub fn parse_elements(&self, spec: &str) -> Result<Vec<ElementRef>> {
        parse_elements(self.structured(), spec)
    }
}

/// Parses `all` (finite monoids only) or a comma-separated list of labels.
pub fn parse_elements(m: &dyn StructuredMonoid, spec: &str) -> Result<Vec<ElementRef>> {
    if spec.trim() == "all" {
        return m.all_elements().ok_or_else(|| {
            Error::InvalidArgument(format!("{} is infinite; list the elements of K", m.name()))
        });
    }
    let labels = split_labels(spec);
    if labels.is_empty() {
        return Err(Error::EmptySet("K"));
    }
    labels.iter().map(|l| m.parse_element(l)).collect()
}

struct Entry {
    name: &'static str,
    description: &'static str,
    grammar: &'static str,
    make: fn() -> Result<FixtureMonoid>,
}

fn finite(m: Result<FiniteMonoid>, label: &str) -> Result<FixtureMonoid> {
    Ok(FixtureMonoid::Finite(FiniteStructured::named(m?, label)))
}

/// `x ↦ (0 1)`, `y ↦ (0 1 2 3 4)`: onto the symmetric group on 5 points.
pub fn s5_quotient() -> FreeQuotient {
    FreeQuotient {
        degree: 5,
        images: vec![
            Perm::from_images(vec![1, 0, 2, 3, 4]).expect("transposition"),
            Perm::from_images(vec![1, 2, 3, 4, 0]).expect("5-cycle"),
        ],
    }
}

const ENTRIES: &[Entry] = &[
    Entry {
        name: "trivial",
        description: "trivial monoid",
        grammar: "1",
        make: || finite(Ok(trivial()), "trivial monoid"),
    },
    Entry {
        name: "SL",
        description: "two-element semilattice {1, 0}",
        grammar: "0 or 1",
        make: || finite(Ok(semilattice()), "semilattice"),
    },
    Entry {
        name: "Z2",
        description: "cyclic group of order 2",
        grammar: "0, 1",
        make: || finite(Ok(cyclic_group(2)), "cyclic group"),
    },
    Entry {
        name: "Z3",
        description: "cyclic group of order 3",
        grammar: "0, 1, 2",
        make: || finite(Ok(cyclic_group(3)), "cyclic group"),
    },
    Entry {
        name: "Z4",
        description: "cyclic group of order 4",
        grammar: "0, 1, 2, 3",
        make: || finite(Ok(cyclic_group(4)), "cyclic group"),
    },
    Entry {
        name: "T1",
        description: "full transformation monoid on 1 point",
        grammar: "image strings, e.g. 0",
        make: || finite(make_transformation_monoid(1), "transformation monoid"),
    },
    Entry {
        name: "T2",
        description: "full transformation monoid on 2 points",
        grammar: "image strings: 01 (identity), 10, 00, 11",
        make: || finite(make_transformation_monoid(2), "transformation monoid"),
    },
    Entry {
        name: "T3",
        description: "full transformation monoid on 3 points",
        grammar: "image strings, e.g. 012 (identity), 120, 000",
        make: || finite(make_transformation_monoid(3), "transformation monoid"),
    },
    Entry {
        name: "T4",
        description: "full transformation monoid on 4 points",
        grammar: "image strings, e.g. 0123 (identity), 0000",
        make: || finite(make_transformation_monoid(4), "transformation monoid"),
    },
    Entry {
        name: "Z2xSL",
        description: "cyclic group of order 2 times the semilattice",
        grammar: "pairs (a,b) with a in {0,1}, b in {0,1}",
        make: || finite(direct_product(&cyclic_group(2), &semilattice()), "product monoid"),
    },
    Entry {
        name: "SLxSL",
        description: "semilattice times semilattice",
        grammar: "pairs (a,b) with a, b in {0,1}",
        make: || finite(direct_product(&semilattice(), &semilattice()), "product monoid"),
    },
    Entry {
        name: "T2xSL",
        description: "T2 times the semilattice",
        grammar: "pairs (t,b), e.g. (10,1)",
        make: || {
            finite(
                make_transformation_monoid(2).and_then(|t| direct_product(&t, &semilattice())),
                "product monoid",
            )
        },
    },
    Entry {
        name: "bicyclic",
        description: "bicyclic monoid <p, q | pq = 1>",
        grammar: "1, words in p and q such as q^2p^3, or pairs (a,b) for q^a p^b",
        make: || Ok(FixtureMonoid::Structured(Arc::new(Bicyclic))),
    },
    Entry {
        name: "coset-Z-2-3",
        description: "cosets of 2Z, 3Z and their join in Z",
        grammar: "{n} for singletons, a+2Z, a+3Z, a+Z (or Z)",
        make: || Ok(FixtureMonoid::Structured(Arc::new(integer_coset_monoid(&[2, 3])?))),
    },
    Entry {
        name: "coset-Z2-axis",
        description: "cosets of the axis Z x 0 in Z^2 (infinite quotient)",
        grammar: "{(a,b)} for singletons, (0,b)+<(1,0)> for cosets",
        make: || {
            let g = GroupHandle::abelian(AbelianGroup::free(2));
            let m = make_coset_monoid(&g, &[SubgroupSpec::Lattice(vec![vec![1, 0]])])?;
            Ok(FixtureMonoid::Structured(Arc::new(m)))
        },
    },
    Entry {
        name: "coset-C4-2",
        description: "cosets of the order-2 subgroup in the cyclic group of order 4",
        grammar: "{g} for singletons, g*N1 for cosets, g in 0..3",
        make: || {
            let g = GroupHandle::finite(FiniteGroup::cyclic(4));
            let m = make_coset_monoid(&g, &[SubgroupSpec::Elements(vec![2])])?;
            Ok(FixtureMonoid::Structured(Arc::new(m)))
        },
    },
    Entry {
        name: "F2xS",
        description: "free group of rank 2 times the semilattice, with a quotient onto S5",
        grammar: "reduced words in x, y (X or x^-1 for inverses, 1 for empty) as units; (w,0) for non-units",
        make: || {
            let m = make_free_times_semilattice(2, vec![s5_quotient()])?;
            Ok(FixtureMonoid::Structured(Arc::new(m)))
        },
    },
];

pub fn fixture_names() -> Vec<&'static str> {
    ENTRIES.iter().map(|e| e.name).collect()
}

/// `(name, description, grammar)` for every fixture.
pub fn list_fixtures() -> Vec<(&'static str, &'static str, &'static str)> {
    ENTRIES
        .iter()
        .map(|e| (e.name, e.description, e.grammar))
        .collect()
}

pub fn load_fixture(name: &str) -> Result<Fixture> {
    let e = ENTRIES
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownFixture(name.to_string()))?;
    Ok(Fixture {
        name: e.name,
        description: e.description,
        grammar: e.grammar,
        monoid: (e.make)()?,
    })
}

/// Names of the fixtures backed by a multiplication table.
pub fn finite_fixture_names() -> Vec<&'static str> {
    ENTRIES
        .iter()
        .filter(|e| matches!((e.make)(), Ok(FixtureMonoid::Finite(_))))
        .map(|e| e.name)
        .collect()
}
