use proptest::prelude::*;
use sofic_core::fixtures::{finite_fixture_names, load_fixture};
use sofic_core::green::{
    definitional_partitions, green_relations, schutzenberger_group, schutzenberger_invariants_by_d_class,
};
use sofic_core::monoid::finite::make_finite_monoid;
use sofic_core::monoid::FiniteMonoid;
use std::collections::HashMap;

fn fixture(name: &str) -> FiniteMonoid {
    load_fixture(name).unwrap().finite().unwrap().clone()
}

#[test]
fn one_sided_inverses_are_two_sided() {
    for name in finite_fixture_names() {
        let m = fixture(name);
        if m.size() > 200 {
            continue;
        }
        let e = m.identity();
        for x in 0..m.size() {
            for y in 0..m.size() {
                if m.multiply(x, y) == e {
                    assert_eq!(m.multiply(y, x), e, "{name}: {} {}", m.name(x), m.name(y));
                }
            }
        }
    }
}

/// Closes a set of maps on `0..points` under composition, identity first.
fn generated_transformation_monoid(points: usize, gens: &[Vec<usize>]) -> FiniteMonoid {
    let id: Vec<usize> = (0..points).collect();
    let mut elems = vec![id];
    let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(elems[0].clone(), 0)]);
    let mut i = 0;
    while i < elems.len() {
        for g in gens {
            // x then g
            let next: Vec<usize> = elems[i].iter().map(|&p| g[p]).collect();
            if !index.contains_key(&next) {
                index.insert(next.clone(), elems.len());
                elems.push(next);
            }
        }
        i += 1;
    }
    let table: Vec<Vec<usize>> = elems
        .iter()
        .map(|a| {
            elems
                .iter()
                .map(|b| index[&b.iter().map(|&p| a[p]).collect::<Vec<_>>()])
                .collect()
        })
        .collect();
    let names = elems
        .iter()
        .map(|e| e.iter().map(|d| d.to_string()).collect())
        .collect();
    make_finite_monoid(table, names).unwrap()
}

fn transformation_generators() -> impl Strategy<Value = (usize, Vec<Vec<usize>>)> {
    (1usize..=4).prop_flat_map(|n| (Just(n), prop::collection::vec(prop::collection::vec(0..n, n), 1..=3)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scc_partitions_match_principal_ideals((n, gens) in transformation_generators()) {
        let m = generated_transformation_monoid(n, &gens);
        prop_assume!(m.size() <= 60);
        let g = green_relations(&m);
        prop_assert_eq!(&g.classes, &definitional_partitions(&m));
        prop_assert!(g.eggbox_property_holds());
    }

    #[test]
    fn schutzenberger_groups_have_the_size_of_their_h_class((n, gens) in transformation_generators()) {
        let m = generated_transformation_monoid(n, &gens);
        let g = green_relations(&m);
        for h in 0..g.h_class_count() {
            let s = schutzenberger_group(&m, &g, h);
            prop_assert_eq!(s.order, g.h_class(h).len());
            prop_assert!(s.is_group());
        }
        for (_, invariants) in schutzenberger_invariants_by_d_class(&m, &g) {
            prop_assert!(invariants.windows(2).all(|w| w[0] == w[1]));
        }
    }

    #[test]
    fn monoid_json_round_trips((n, gens) in transformation_generators()) {
        let m = generated_transformation_monoid(n, &gens);
        let j = m.to_json();
        prop_assert_eq!(FiniteMonoid::from_json(&j).unwrap().to_json(), j);
    }
}
