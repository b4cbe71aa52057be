//! End-to-end acceptance suite. Each criterion prints one PASS/FAIL line with
//! its wall time to stderr; the test fails if any criterion fails.

use sofic_core::builder::{build_witness, check_hypotheses, compute_pq_decomposition, BuildOptions};
use sofic_core::fixtures::{finite_fixture_names, load_fixture, parse_elements};
use sofic_core::green::{definitional_partitions, green_relations, schutzenberger_group};
use sofic_core::groups::{find_folner, folner_quality, AbelianGroup, GroupElem, GroupHandle, SearchBudget};
use sofic_core::monoid::{ElementRef, FiniteMonoid};
use sofic_core::rational::{one, ratio, zero};
use sofic_core::witness::{
    check_witness, diagonal_power_witness, passes, witness_from_json, witness_to_json, DEFAULT_GROUND_CAP,
};
use sofic_core::Rational;
use std::collections::{BTreeSet, HashSet};
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

type Outcome = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn run_criterion(id: usize, title: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(r) => r,
        Err(p) => Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into())),
    };
    let elapsed = start.elapsed();
    let outcome = outcome.and_then(|()| {
        if elapsed > limit {
            Err(format!("took {elapsed:?}, limit {limit:?}"))
        } else {
            Ok(())
        }
    });
    let line = match &outcome {
        Ok(()) => format!("criterion {id:>2} PASS  {title}  ({:.2}s)\n", elapsed.as_secs_f64()),
        Err(e) => format!("criterion {id:>2} FAIL  {title}  ({:.2}s): {e}\n", elapsed.as_secs_f64()),
    };
    // written to the stream directly so the lines survive output capture
    let _ = std::io::stderr().write_all(line.as_bytes());
    outcome.is_ok()
}

fn finite(name: &str) -> (sofic_core::fixtures::Fixture, FiniteMonoid) {
    let f = load_fixture(name).expect("fixture loads");
    let m = f.finite().expect("finite fixture").clone();
    (f, m)
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn build_and_check(fixture: &str, k: &str, eps: &Rational) -> Outcome {
    let f = load_fixture(fixture).map_err(|e| e.to_string())?;
    let m = f.structured();
    let k = parse_elements(m, k).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let built = build_witness(m, &k, eps, &BuildOptions::default()).map_err(|e| format!("{fixture}: {e}"))?;
    let report = check_witness(m, &k, &built.witness, 1).map_err(|e| e.to_string())?;
    ensure!(report.identity_violations == 0, "{fixture}: identity violations");
    ensure!(&report.max_mult_defect <= eps, "{fixture}: mult defect {}", report.max_mult_defect);
    ensure!(&report.max_sep_overlap <= eps, "{fixture}: overlap {}", report.max_sep_overlap);
    ensure!(start.elapsed() < secs(60), "{fixture}: slow case");
    Ok(())
}

fn criterion_1() -> Outcome {
    let cases = [
        ("T2", "all"),
        ("T3", "012,120,021,000,111,010"),
        ("SL", "all"),
        ("Z2xSL", "all"),
        ("SLxSL", "all"),
    ];
    for eps in [ratio(1, 5), ratio(1, 20)] {
        for (fixture, k) in cases {
            build_and_check(fixture, k, &eps)?;
        }
    }
    Ok(())
}

fn criterion_2() -> Outcome {
    let f = load_fixture("coset-Z-2-3").map_err(|e| e.to_string())?;
    let m = f.structured();
    let k = parse_elements(m, "{1},{-1},0+2Z,1+3Z").map_err(|e| e.to_string())?;
    let eps = ratio(1, 4);
    let built = build_witness(m, &k, &eps, &BuildOptions::default()).map_err(|e| e.to_string())?;
    let log = &built.log;
    // n -> (n mod 2, n mod 3) hits every pair in one period
    let crt: HashSet<(i64, i64)> = (0..6i64).map(|n| (n % 2, n % 3)).collect();
    ensure!(crt.len() == 6, "CRT oracle");
    ensure!(log.g_bar_order == Some(crt.len() as u64), "image order {:?}", log.g_bar_order);
    let one_minus = one() - &log.delta;
    ensure!(log.f_quality > one_minus, "F quality {}", log.f_quality);
    ensure!(log.good_fraction > &one_minus * &one_minus, "good fraction {}", log.good_fraction);
    let report = check_witness(m, &k, &built.witness, 1).map_err(|e| e.to_string())?;
    ensure!(passes(&report, &eps), "checker: {}", report.to_text());
    Ok(())
}

fn criterion_3() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for k in ["x,(y,0)", "(1,0)", "(xy,0),x,y", "(y,0)"] {
        let out = dir.path().join("w.json");
        let res = Command::new(env!("CARGO_BIN_EXE_sofic"))
            .args(["build-witness", "--fixture", "F2xS", "--K", k, "--eps", "1/4", "--out"])
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        let stderr = String::from_utf8_lossy(&res.stderr);
        ensure!(res.status.code() == Some(2), "K={k}: exit {:?}", res.status.code());
        ensure!(
            stderr.contains("HypothesesNotMet: orbit quotient declared non-amenable"),
            "K={k}: stderr {stderr}"
        );
        ensure!(!out.exists(), "K={k}: witness file written");
    }
    Ok(())
}

/// `x J 1` iff `a x b = 1` for some `a, b`.
fn j_class_of_one(m: &FiniteMonoid) -> BTreeSet<usize> {
    let e = m.identity();
    (0..m.size())
        .filter(|&x| {
            (0..m.size()).any(|a| {
                let ax = m.multiply(a, x);
                (0..m.size()).any(|b| m.multiply(ax, b) == e)
            })
        })
        .collect()
}

fn units_by_scan(m: &FiniteMonoid) -> BTreeSet<usize> {
    let e = m.identity();
    (0..m.size())
        .filter(|&x| (0..m.size()).any(|y| m.multiply(x, y) == e && m.multiply(y, x) == e))
        .collect()
}

fn criterion_4() -> Outcome {
    let b = load_fixture("bicyclic").map_err(|e| e.to_string())?;
    let r = check_hypotheses(b.structured(), None);
    ensure!(!r.units_equal_j_class.value, "bicyclic reported units = J-class");
    for name in finite_fixture_names() {
        let (f, m) = finite(name);
        let r = check_hypotheses(f.structured(), None);
        ensure!(r.units_equal_j_class.value, "{name}: reported false");
        ensure!(j_class_of_one(&m) == units_by_scan(&m), "{name}: brute force disagrees");
    }
    Ok(())
}

/// Every pair of elements in one D-class has an R×L cell, and that cell is
/// a single H-class.
fn eggbox_by_scan(m: &FiniteMonoid, p: &sofic_core::green::Partitions) -> bool {
    let n = m.size();
    for x in 0..n {
        for y in 0..n {
            if p.d[x] != p.d[y] {
                continue;
            }
            let cell: Vec<usize> = (0..n).filter(|&z| p.r[z] == p.r[x] && p.l[z] == p.l[y]).collect();
            if cell.is_empty() || cell.iter().any(|&z| p.h[z] != p.h[cell[0]]) {
                return false;
            }
        }
    }
    true
}

fn criterion_5() -> Outcome {
    let mut checked = 0;
    for name in finite_fixture_names() {
        let (_, m) = finite(name);
        if m.size() > 60 {
            continue;
        }
        let g = green_relations(&m);
        let oracle = definitional_partitions(&m);
        ensure!(g.classes == oracle, "{name}: partitions differ");
        ensure!(g.eggbox_property_holds(), "{name}: egg-box property (library)");
        ensure!(eggbox_by_scan(&m, &oracle), "{name}: egg-box property (scan)");
        checked += 1;
    }
    ensure!(checked >= 10, "only {checked} fixtures checked");
    Ok(())
}

fn element_order(perm: &sofic_core::groups::Perm) -> u64 {
    let id = sofic_core::groups::Perm::identity(perm.degree());
    let mut p = perm.clone();
    let mut k = 1;
    while p != id {
        p = p.then(perm);
        k += 1;
    }
    k
}

fn criterion_6() -> Outcome {
    for name in finite_fixture_names() {
        let (_, m) = finite(name);
        let g = green_relations(&m);
        let mut by_d: Vec<Option<(usize, Vec<u64>)>> = vec![None; g.d_class_count()];
        for h in 0..g.h_class_count() {
            let s = schutzenberger_group(&m, &g, h);
            let size = g.h_class(h).len();
            ensure!(s.order == size && s.perms.len() == size, "{name}: |S| != |H| at H{h}");
            ensure!(s.is_group(), "{name}: H{h} not a group of permutations");
            let mut orders: Vec<u64> = s.perms.iter().map(element_order).collect();
            orders.sort_unstable();
            let d = g.classes.d[g.h_class(h)[0]];
            match &by_d[d] {
                None => by_d[d] = Some((s.order, orders)),
                Some(prev) => ensure!(prev == &(s.order, orders), "{name}: D{d} H-classes disagree"),
            }
        }
        let unit_s = schutzenberger_group(&m, &g, g.unit_class_id);
        ensure!(unit_s.order == units_by_scan(&m).len(), "{name}: unit H-class order");
    }
    Ok(())
}

/// `|{f ∈ F : f + k ∈ F for all k}| / |F|` on integer vectors.
fn lattice_quality(k: &[Vec<i64>], f: &[Vec<i64>]) -> Rational {
    let set: HashSet<&Vec<i64>> = f.iter().collect();
    let good = f
        .iter()
        .filter(|x| {
            k.iter().all(|d| {
                let y: Vec<i64> = x.iter().zip(d).map(|(a, b)| a + b).collect();
                set.contains(&y)
            })
        })
        .count();
    ratio(good as u64, f.len() as u64)
}

fn as_vectors(f: &[GroupElem]) -> Vec<Vec<i64>> {
    f.iter()
        .map(|e| match e {
            GroupElem::Vector(v) => v.clone(),
            other => panic!("not a vector: {other:?}"),
        })
        .collect()
}

fn criterion_7() -> Outcome {
    let z = GroupHandle::integers();
    let pm1 = vec![GroupElem::Vector(vec![1]), GroupElem::Vector(vec![-1])];
    let f: Vec<GroupElem> = (0..10).map(|i| GroupElem::Vector(vec![i])).collect();
    let q = folner_quality(&z, &pm1, &f).map_err(|e| e.to_string())?;
    ensure!(q == ratio(8, 10), "Z interval: {q}");

    let z2 = GroupHandle::abelian(AbelianGroup::free(2));
    let axes = vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]];
    let k2: Vec<GroupElem> = axes.iter().cloned().map(GroupElem::Vector).collect();
    let square: Vec<GroupElem> = (0..10)
        .flat_map(|a| (0..10).map(move |b| GroupElem::Vector(vec![a, b])))
        .collect();
    let q = folner_quality(&z2, &k2, &square).map_err(|e| e.to_string())?;
    ensure!(q == ratio(64, 100), "Z^2 square: {q}");
    ensure!(lattice_quality(&axes, &as_vectors(&square)) == q, "oracle disagrees on square");

    let budget = SearchBudget::default();
    for delta in [ratio(1, 2), ratio(1, 5), ratio(1, 20), ratio(1, 100)] {
        for (g, k, kv) in [
            (&z, &pm1, vec![vec![1], vec![-1]]),
            (&z2, &k2, axes.clone()),
        ] {
            let found = find_folner(g, k, &delta, &budget).map_err(|e| e.to_string())?;
            let measured = lattice_quality(&kv, &as_vectors(&found.elements));
            ensure!(measured == found.quality, "reported {} vs measured {measured}", found.quality);
            ensure!(measured > one() - &delta, "quality {measured} at delta {delta}");
        }
    }
    Ok(())
}

fn criterion_8() -> Outcome {
    let (f, m) = finite("SL");
    let idx: Vec<usize> = ["0", "1"].iter().map(|s| m.index_of(s).expect("label")).collect();
    let eps = ratio(1, 10);
    let w = diagonal_power_witness(&m, &idx, &eps, DEFAULT_GROUND_CAP).map_err(|e| e.to_string())?;
    // x ↦ 0·x and x ↦ 1·x agree only at x = 0, so p = 1/2 and 2^-4 is the first power ≤ 1/10
    let p = ratio(1, 2);
    let n = (1u32..).find(|&n| sofic_core::rational::pow(&p, n) <= eps).unwrap();
    ensure!(n == 4, "oracle power {n}");
    ensure!(w.n == 2usize.pow(n), "N = {}", w.n);
    let k: Vec<ElementRef> = idx.iter().map(|&i| ElementRef::from_index(i)).collect();
    let report = check_witness(f.structured(), &k, &w, 1).map_err(|e| e.to_string())?;
    ensure!(report.max_mult_defect == zero(), "mult defect {}", report.max_mult_defect);
    ensure!(report.max_sep_overlap == ratio(1, 16), "overlap {}", report.max_sep_overlap);
    ensure!(report.sep_overlaps.iter().all(|d| d.fraction == ratio(1, 16)), "pair overlaps");
    ensure!(passes(&report, &eps), "does not pass");
    Ok(())
}

fn criterion_9() -> Outcome {
    for name in ["T2", "Z2xSL"] {
        let (_, m) = finite(name);
        let g = green_relations(&m);
        let units: Vec<usize> = units_by_scan(&m).into_iter().collect();
        let inv = |u: usize| {
            units
                .iter()
                .copied()
                .find(|&v| m.multiply(u, v) == m.identity())
                .unwrap()
        };
        let normal = |sub: &BTreeSet<usize>| {
            units
                .iter()
                .all(|&u| sub.iter().all(|&s| sub.contains(&m.multiply(m.multiply(inv(u), s), u))))
        };
        for x in (0..m.size()).filter(|x| !units.contains(x)) {
            let pq = compute_pq_decomposition(&m, x).map_err(|e| e.to_string())?;
            ensure!(pq.checks.all(), "{name}/{x}: library checks {:?}", pq.checks);
            let z: BTreeSet<usize> = pq.z_set.iter().copied().collect();
            // P: right translation keeps every element of Z in its H-class
            let p: BTreeSet<usize> = units
                .iter()
                .copied()
                .filter(|&u| z.iter().all(|&h| g.classes.h[m.multiply(h, u)] == g.classes.h[h]))
                .collect();
            // Q: right translation fixes Z pointwise
            let q: BTreeSet<usize> = units
                .iter()
                .copied()
                .filter(|&u| z.iter().all(|&h| m.multiply(h, u) == h))
                .collect();
            ensure!(p == pq.p_subgroup.iter().copied().collect(), "{name}/{x}: P differs");
            ensure!(q == pq.q_subgroup.iter().copied().collect(), "{name}/{x}: Q differs");
            ensure!(q.is_subset(&p) && normal(&p) && normal(&q), "{name}/{x}: not Q ⊴ P ⊴ G");
            // kernel of P acting on Z by right translation
            let kernel: BTreeSet<usize> = p
                .iter()
                .copied()
                .filter(|&u| z.iter().all(|&h| m.multiply(h, u) == h))
                .collect();
            ensure!(kernel == q, "{name}/{x}: kernel differs from Q");
        }
    }
    Ok(())
}

fn criterion_10() -> Outcome {
    let eps = ratio(1, 20);
    for (fixture, k) in [("T2", "all"), ("Z2xSL", "all"), ("coset-Z-2-3", "{1},{-1},0+2Z,1+3Z")] {
        let f = load_fixture(fixture).map_err(|e| e.to_string())?;
        let m = f.structured();
        let k = parse_elements(m, k).map_err(|e| e.to_string())?;
        let a = build_witness(m, &k, &eps, &BuildOptions::default()).map_err(|e| e.to_string())?;
        let opts = BuildOptions {
            workers: 4,
            ..BuildOptions::default()
        };
        let b = build_witness(m, &k, &eps, &opts).map_err(|e| e.to_string())?;
        let ja = witness_to_json(&a.witness);
        ensure!(ja == witness_to_json(&b.witness), "{fixture}: builds differ");
        ensure!(a.log.to_json() == b.log.to_json(), "{fixture}: logs differ");
        let back = witness_from_json(&ja).map_err(|e| e.to_string())?;
        ensure!(witness_to_json(&back) == ja, "{fixture}: witness round trip");
        let r1 = check_witness(m, &k, &a.witness, 1).map_err(|e| e.to_string())?;
        for w in [2, 8] {
            let rw = check_witness(m, &k, &a.witness, w).map_err(|e| e.to_string())?;
            ensure!(rw == r1 && rw.to_json() == r1.to_json(), "{fixture}: report differs at {w} workers");
        }
    }
    for name in finite_fixture_names() {
        let (_, m) = finite(name);
        let j = m.to_json();
        let back = FiniteMonoid::from_json(&j).map_err(|e| e.to_string())?;
        ensure!(back.to_json() == j, "{name}: monoid round trip");
    }
    Ok(())
}

#[test]
fn acceptance() {
    let criteria: Vec<(&str, Duration, fn() -> Outcome)> = vec![
        ("finite monoids: built witnesses pass the checker", secs(600), criterion_1),
        ("coset monoid over Z: built witness passes, image order 6", secs(120), criterion_2),
        ("free group times semilattice is refused", secs(60), criterion_3),
        ("units equal the J-class of 1", secs(120), criterion_4),
        ("Green's relations agree with the definitional oracle", secs(120), criterion_5),
        ("Schutzenberger groups", secs(120), criterion_6),
        ("Folner qualities are exact", secs(120), criterion_7),
        ("diagonal power oracle witness", secs(60), criterion_8),
        ("P/Q decomposition", secs(60), criterion_9),
        ("determinism and round trips", secs(120), criterion_10),
    ];
    let mut failed = Vec::new();
    for (i, (title, limit, f)) in criteria.into_iter().enumerate() {
        if !run_criterion(i + 1, title, limit, f) {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
