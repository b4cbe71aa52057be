use proptest::prelude::*;
use sofic_core::builder::{build_witness, BuildOptions};
use sofic_core::fixtures::{load_fixture, parse_elements};
use sofic_core::monoid::{ElementRef, StructuredMonoid};
use sofic_core::rational::ratio;
use sofic_core::witness::{check_witness, witness_from_json, witness_to_json, ActionWitness};

fn built(fixture: &str, eps_den: u64) -> (sofic_core::fixtures::Fixture, Vec<ElementRef>, ActionWitness) {
    let f = load_fixture(fixture).unwrap();
    let k = parse_elements(f.structured(), "all").unwrap();
    let w = build_witness(f.structured(), &k, &ratio(1, eps_den), &BuildOptions::default())
        .unwrap()
        .witness;
    (f, k, w)
}

/// Counts `x` with `g·(h·x) ≠ (gh)·x` straight from the tables.
fn mult_count(m: &dyn StructuredMonoid, w: &ActionWitness, g: &ElementRef, h: &ElementRef) -> usize {
    let tg = w.table(g).unwrap();
    let th = w.table(h).unwrap();
    let tgh = w.table(&m.multiply(g, h)).unwrap();
    (0..w.n)
        .filter(|&x| tg[th[x] as usize] != tgh[x])
        .count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn round_trip_and_worker_invariance(
        fixture in prop::sample::select(vec!["T2", "SL", "Z2xSL", "SLxSL", "Z3"]),
        eps_den in 3u64..40,
        workers in 1usize..9,
    ) {
        let (f, k, w) = built(fixture, eps_den);
        let m = f.structured();
        let j = witness_to_json(&w);
        let back = witness_from_json(&j).unwrap();
        prop_assert_eq!(&back, &w);
        prop_assert_eq!(witness_to_json(&back), j);
        prop_assert_eq!(check_witness(m, &k, &w, 1).unwrap(), check_witness(m, &k, &w, workers).unwrap());
    }

    #[test]
    fn rewired_tables_match_direct_recount(
        fixture in prop::sample::select(vec!["T2", "Z2xSL"]),
        point_seed in any::<usize>(),
        target_seed in any::<usize>(),
        which in any::<usize>(),
    ) {
        let (f, k, mut w) = built(fixture, 5);
        let m = f.structured();
        let elem = &k[which % k.len()];
        let idx = w.index_of(elem).unwrap();
        prop_assume!(*elem != m.one());
        let x = point_seed % w.n;
        w.tables[idx][x] = (target_seed % w.n) as u32;
        let report = check_witness(m, &k, &w, 2).unwrap();
        for g in &k {
            for h in &k {
                let oracle = mult_count(m, &w, g, h);
                let measured = report.mult_defect(&m.label(g), &m.label(h)).unwrap();
                prop_assert_eq!(measured, &ratio(oracle as u64, w.n as u64));
            }
        }
    }
}

#[test]
fn truncated_file_is_malformed() {
    let (_, _, w) = built("T2", 5);
    let j = witness_to_json(&w);
    let err = witness_from_json(&j[..j.len() / 2]).unwrap_err();
    assert!(err.to_string().contains("malformed"), "{err}");
}
