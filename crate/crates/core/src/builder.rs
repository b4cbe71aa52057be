//! Witness construction for monoids whose units are the J-class of the
//! identity and act locally amenably on the non-units, plus the hypothesis
//! classifier, the P/Q decomposition for finite monoids, and a diagnostic
//! probe for the bicyclic monoid.

use crate::error::{Error, Result};
use crate::green::{circle_action, schutzenberger_group, GreenStructure};
use crate::groups::{
    find_folner, joint_quotient_image, sofic_group_action, Amenability, GroupElem, GroupHandle,
    SearchBudget,
};
use crate::monoid::{
    Bicyclic, Claim, ElementRef, FiniteMonoid, StabiliserQuotient, StructuredMonoid,
};
use crate::rational::{self, Rational};
use crate::witness::{check_witness, ActingElement, ActionWitness, DefectReport, DEFAULT_GROUND_CAP};
use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{HashMap, HashSet};
use std::sync::Arc;

/// Picks `δ` with `(1 − δ)³ > 1 − ε`.
///
/// `δ` is half of `1 − ∛(1 − ε)`, rounded down on a decimal grid one digit
/// finer than the first grid on which it is nonzero. Rounding is done with
/// exact comparisons, and halving makes the final inequality strict.
pub fn choose_delta(eps: &Rational) -> Result<Rational> {
    if eps <= &rational::zero() || eps >= &rational::one() {
        return Err(Error::InvalidArgument(format!(
            "epsilon must lie strictly between 0 and 1, got {}",
            rational::render(eps)
        )));
    }
    let target = rational::one() - eps;
    // largest a with (1 − 2a/d)³ ≥ 1 − ε
    let best = |d: &BigInt| -> BigInt {
        let ok = |a: &BigInt| {
            let x = rational::one() - Rational::new(a * 2, d.clone());
            x >= rational::zero() && rational::pow(&x, 3) >= target
        };
        let (mut lo, mut hi) = (BigInt::zero(), d / 2 + 1);
        while &lo + 1 < hi {
            let mid: BigInt = (&lo + &hi) / 2;
            if ok(&mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let mut d = BigInt::from(10);
    while best(&d).is_zero() {
        d *= 10;
    }
    d *= 10;
    let delta = Rational::new(best(&d), d);
    let check = rational::pow(&(rational::one() - &delta), 3);
    if check <= target {
        return Err(Error::Invariant(format!(
            "delta {} fails the strict bound",
            rational::render(&delta)
        )));
    }
    Ok(delta)
}

/// Sufficient conditions for soficity that the classifier recognises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    /// Units are the J-class of 1, form a sofic group, and every orbit
    /// quotient of the non-units is amenable.
    LocallyAmenableOrbits,
    /// As above with an amenable unit group.
    AmenableUnits,
    /// As above with finitely many non-units.
    FiniteNonUnits,
    /// As above with finite R-classes outside the units.
    FiniteRClasses,
    /// Left or right cancellative with an amenable unit group.
    CancellativeAmenableUnits,
    /// Sofic units equal to the J-class of 1; each non-unit D-class has
    /// finitely many L-classes and an amenable Schützenberger group.
    FewLClassesAmenableSchutzenberger,
    /// Sofic units equal to the J-class of 1; Schützenberger groups finite or
    /// abelian, with a locally amenable action of the units on H-classes.
    FiniteOrAbelianSchutzenberger,
    /// Sofic units, amenable non-unit Schützenberger groups and finitely
    /// many L-classes per D-class.
    AmenableSchutzenbergerFewLClasses,
    /// Regular, sofic units, amenable non-unit subgroups and finitely many
    /// L-classes per D-class.
    RegularFewLClasses,
}

impl Condition {
    pub fn as_str(self) -> &'static str {
        match self {
            Condition::LocallyAmenableOrbits => "locally-amenable-orbits",
            Condition::AmenableUnits => "amenable-units",
            Condition::FiniteNonUnits => "finite-non-units",
            Condition::FiniteRClasses => "finite-r-classes",
            Condition::CancellativeAmenableUnits => "cancellative-amenable-units",
            Condition::FewLClassesAmenableSchutzenberger => "few-l-classes-amenable-schutzenberger",
            Condition::FiniteOrAbelianSchutzenberger => "finite-or-abelian-schutzenberger",
            Condition::AmenableSchutzenbergerFewLClasses => "amenable-schutzenberger-few-l-classes",
            Condition::RegularFewLClasses => "regular-few-l-classes",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClaimReport {
    pub value: bool,
    pub basis: &'static str,
}

impl From<Claim> for ClaimReport {
    fn from(c: Claim) -> Self {
        ClaimReport {
            value: c.value,
            basis: match c.basis {
                crate::monoid::Basis::Computed => "computed",
                crate::monoid::Basis::Declared => "declared",
            },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitStatus {
    pub representative: String,
    pub quotient: String,
    pub status: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct HypothesisReport {
    pub monoid: String,
    pub units_equal_j_class: ClaimReport,
    pub unit_group: String,
    pub unit_group_sofic_capable: bool,
    pub unit_group_amenability: &'static str,
    /// Status of every non-unit orbit taken together, as reported by the monoid.
    pub orbit_quotients: &'static str,
    /// Orbits met by `(K ∪ K²)` outside the units, when `K` was given.
    pub local_amenability: Vec<OrbitStatus>,
    pub matched_conditions: Vec<Condition>,
    /// Reasons the locally-amenable-orbits condition fails.
    pub failures: Vec<String>,
}

impl HypothesisReport {
    pub fn matches(&self, c: Condition) -> bool {
        self.matched_conditions.contains(&c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("monoid: {}\n", self.monoid);
        out += &format!(
            "units equal J-class of 1: {} ({})\n",
            self.units_equal_j_class.value, self.units_equal_j_class.basis
        );
        out += &format!(
            "unit group: {} [{}; sofic provider: {}]\n",
            self.unit_group,
            self.unit_group_amenability,
            if self.unit_group_sofic_capable { "yes" } else { "no" }
        );
        out += &format!("orbit quotients: {}\n", self.orbit_quotients);
        for o in &self.local_amenability {
            out += &format!("  orbit of {}: {} [{}]\n", o.representative, o.quotient, o.status);
        }
        let matched: Vec<&str> = self.matched_conditions.iter().map(|c| c.as_str()).collect();
        out += &format!(
            "matched: {}\n",
            if matched.is_empty() { "none".to_string() } else { matched.join(", ") }
        );
        for f in &self.failures {
            out += &format!("not applicable: {f}\n");
        }
        out
    }
}

fn dedup_refs(k: &[ElementRef]) -> Vec<ElementRef> {
    let mut seen = HashSet::new();
    k.iter().filter(|e| seen.insert((*e).clone())).cloned().collect()
}

/// Non-units of `K` followed by the non-unit products of `K`, each once.
fn non_unit_parts(m: &dyn StructuredMonoid, k: &[ElementRef]) -> (Vec<ElementRef>, Vec<ElementRef>) {
    let k_s: Vec<ElementRef> = k.iter().filter(|e| !m.is_unit(e)).cloned().collect();
    let mut k2_s = Vec::new();
    let mut seen = HashSet::new();
    for a in k {
        for b in k {
            let p = m.multiply(a, b);
            if !m.is_unit(&p) && seen.insert(p.clone()) {
                k2_s.push(p);
            }
        }
    }
    (k_s, k2_s)
}

/// One orbit quotient per distinct orbit met by the given non-units.
fn orbit_components(
    m: &dyn StructuredMonoid,
    elements: impl IntoIterator<Item = ElementRef>,
) -> (Vec<Arc<dyn StabiliserQuotient>>, Vec<ElementRef>, HashMap<ElementRef, usize>) {
    let mut comps: Vec<Arc<dyn StabiliserQuotient>> = Vec::new();
    let mut reps = Vec::new();
    let mut by_key: HashMap<ElementRef, usize> = HashMap::new();
    let mut of_element = HashMap::new();
    for s in elements {
        if of_element.contains_key(&s) {
            continue;
        }
        let q = m
            .orbit_quotient(&s)
            .expect("non-units carry orbit data");
        let key = q.orbit_key();
        let idx = *by_key.entry(key).or_insert_with(|| {
            comps.push(q);
            reps.push(s.clone());
            comps.len() - 1
        });
        of_element.insert(s, idx);
    }
    (comps, reps, of_element)
}

/// Classifies which sufficient conditions the monoid meets.
pub fn check_hypotheses(m: &dyn StructuredMonoid, k: Option<&[ElementRef]>) -> HypothesisReport {
    let facts = m.facts();
    let j = m.units_form_j_class_of_one();
    let g = m.unit_group();
    let sofic = g.has_sofic_provider();
    let g_amenable = g.amenability().is_capable();
    let aggregate = facts.orbit_quotients.unwrap_or(Amenability::Unknown);

    let mut local = Vec::new();
    let mut failures = Vec::new();
    if !j.value {
        failures.push("the J-class of the identity is not the group of units".to_string());
    }
    if !sofic {
        failures.push(format!("unit group ({}) has no sofic approximation provider", g.describe()));
    }
    if let Some(k) = k {
        let k = dedup_refs(k);
        let (k_s, k2_s) = non_unit_parts(m, &k);
        let (comps, reps, _) = orbit_components(m, k_s.into_iter().chain(k2_s));
        for (q, rep) in comps.iter().zip(&reps) {
            let status = q.amenability();
            let label = m.label(rep);
            if !status.is_capable() {
                failures.push(match status {
                    Amenability::DeclaredNonAmenable => format!(
                        "orbit quotient declared non-amenable at {label} ({})",
                        q.quotient().describe()
                    ),
                    _ => format!(
                        "orbit quotient of unknown amenability at {label} ({})",
                        q.quotient().describe()
                    ),
                });
            }
            local.push(OrbitStatus {
                representative: label,
                quotient: q.quotient().describe(),
                status: status.as_str(),
            });
        }
    }
    let k_orbits_ok = local.iter().all(|o| o.status == "finite" || o.status == "amenable-provider");
    if k_orbits_ok && !aggregate.is_capable() {
        failures.push(match aggregate {
            Amenability::DeclaredNonAmenable => "orbit quotient declared non-amenable".to_string(),
            _ => "amenability of the orbit quotients is unknown".to_string(),
        });
    }
    let orbits = aggregate.is_capable() && k_orbits_ok;

    let h = Claim::holds;
    let base = j.value && sofic;
    let mut matched = Vec::new();
    let mut add = |c: Condition, ok: bool| {
        if ok {
            matched.push(c);
        }
    };
    add(Condition::LocallyAmenableOrbits, base && orbits);
    add(Condition::AmenableUnits, base && g_amenable);
    add(Condition::FiniteNonUnits, base && h(facts.non_units_finite));
    add(Condition::FiniteRClasses, base && h(facts.r_classes_finite_outside_units));
    add(
        Condition::CancellativeAmenableUnits,
        g_amenable && (h(facts.left_cancellative) || h(facts.right_cancellative)),
    );
    add(
        Condition::FewLClassesAmenableSchutzenberger,
        base && h(facts.finitely_many_l_classes_per_d) && h(facts.schutzenberger_groups_amenable),
    );
    add(
        Condition::FiniteOrAbelianSchutzenberger,
        base && h(facts.schutzenberger_groups_finite_or_abelian)
            && h(facts.circle_action_locally_amenable),
    );
    add(
        Condition::AmenableSchutzenbergerFewLClasses,
        sofic && h(facts.schutzenberger_groups_amenable) && h(facts.finitely_many_l_classes_per_d),
    );
    add(
        Condition::RegularFewLClasses,
        sofic
            && h(facts.regular)
            && h(facts.schutzenberger_groups_amenable)
            && h(facts.finitely_many_l_classes_per_d),
    );
    HypothesisReport {
        monoid: m.name(),
        units_equal_j_class: j.into(),
        unit_group: g.describe(),
        unit_group_sofic_capable: sofic,
        unit_group_amenability: g.amenability().as_str(),
        orbit_quotients: aggregate.as_str(),
        local_amenability: local,
        matched_conditions: matched,
        failures,
    }
}

#[derive(Clone, Debug)]
pub struct BuildOptions {
    pub ground_cap: usize,
    pub budget: SearchBudget,
    pub workers: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            ground_cap: DEFAULT_GROUND_CAP,
            budget: SearchBudget::default(),
            workers: 1,
        }
    }
}

/// What went into a built witness.
#[derive(Clone, Debug, Serialize)]
pub struct ProvenanceLog {
    #[serde(with = "rational::serde_ratio")]
    pub delta: Rational,
    #[serde(rename = "K_in_G")]
    pub k_in_g: Vec<String>,
    #[serde(rename = "K_in_S")]
    pub k_in_s: Vec<String>,
    #[serde(rename = "K2_in_S")]
    pub k2_in_s: Vec<String>,
    #[serde(rename = "G_bar")]
    pub g_bar: String,
    #[serde(rename = "G_bar_order")]
    pub g_bar_order: Option<u64>,
    #[serde(rename = "F_size")]
    pub f_size: usize,
    #[serde(rename = "F_quality", with = "rational::serde_ratio")]
    pub f_quality: Rational,
    pub folner_strategy: String,
    #[serde(rename = "P_size")]
    pub p_size: usize,
    #[serde(rename = "P_construction")]
    pub p_construction: String,
    #[serde(rename = "P_max_mult_defect", with = "rational::serde_ratio")]
    pub p_max_mult: Rational,
    #[serde(rename = "P_max_sep_overlap", with = "rational::serde_ratio")]
    pub p_max_sep: Rational,
    #[serde(rename = "Y_size")]
    pub y_size: usize,
    #[serde(rename = "Z_size")]
    pub z_size: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "ZFP_fraction", with = "rational::serde_ratio")]
    pub zfp_fraction: Rational,
    #[serde(with = "rational::serde_ratio")]
    pub good_fraction: Rational,
    pub notes: Vec<String>,
}

impl ProvenanceLog {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("log serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let r = rational::render;
        let mut out = format!(
            "delta = {}\nK in units: [{}]\nK outside units: [{}]\nK^2 outside units: [{}]\n",
            r(&self.delta),
            self.k_in_g.join(", "),
            self.k_in_s.join(", "),
            self.k2_in_s.join(", ")
        );
        out += &format!("image group: {}\n", self.g_bar);
        out += &format!(
            "F: {} element(s), quality {} ({})\n",
            self.f_size,
            r(&self.f_quality),
            self.folner_strategy
        );
        out += &format!(
            "P: {} point(s), {} (max mult defect {}, max overlap {})\n",
            self.p_size,
            self.p_construction,
            r(&self.p_max_mult),
            r(&self.p_max_sep)
        );
        out += &format!(
            "|Y| = {}, |Z| = {}, N = {}\nbulk fraction {}, good fraction {}\n",
            self.y_size,
            self.z_size,
            self.n,
            r(&self.zfp_fraction),
            r(&self.good_fraction)
        );
        for n in &self.notes {
            out += &format!("note: {n}\n");
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct BuildOutput {
    pub witness: ActionWitness,
    pub log: ProvenanceLog,
    /// The checker's measurement of the witness.
    pub report: DefectReport,
}

fn unit_elem(m: &dyn StructuredMonoid, u: &ElementRef) -> GroupElem {
    m.unit_to_group(u).expect("units map into the unit group")
}

/// Builds a finite `(K, ε)`-action of `m` and verifies it with the checker.
pub fn build_witness(
    m: &dyn StructuredMonoid,
    k: &[ElementRef],
    eps: &Rational,
    opts: &BuildOptions,
) -> Result<BuildOutput> {
    let delta = choose_delta(eps)?;
    let hyp = check_hypotheses(m, Some(k));
    if !hyp.matches(Condition::LocallyAmenableOrbits) {
        return Err(Error::HypothesesNotMet(hyp.failures.join("; ")));
    }
    let k = dedup_refs(k);
    let one = m.one();
    let g = m.unit_group();

    // acting elements: 1, K, then new products
    let mut acting: Vec<ElementRef> = vec![one.clone()];
    let mut acting_idx: HashMap<ElementRef, usize> = HashMap::from([(one.clone(), 0)]);
    let mut push = |e: ElementRef, acting: &mut Vec<ElementRef>| {
        *acting_idx.entry(e.clone()).or_insert_with(|| {
            acting.push(e);
            acting.len() - 1
        })
    };
    let k_idx: Vec<usize> = k.iter().map(|e| push(e.clone(), &mut acting)).collect();
    let mut products = Vec::new();
    for (a, x) in k.iter().enumerate() {
        for (b, y) in k.iter().enumerate() {
            let p = push(m.multiply(x, y), &mut acting);
            products.push([k_idx[a], k_idx[b], p]);
        }
    }

    let k_g: Vec<ElementRef> = k.iter().filter(|e| m.is_unit(e)).cloned().collect();
    let (k_s, k2_s) = non_unit_parts(m, &k);
    let (comps, _, comp_of) = orbit_components(m, k_s.iter().chain(&k2_s).cloned());

    let (g_bar, hom) = joint_quotient_image(&g, &comps, opts.budget.enumeration_cap)?;
    let mut k_bar: Vec<GroupElem> = Vec::new();
    for u in &k_g {
        let e = hom.apply(&unit_elem(m, u));
        if !k_bar.contains(&e) {
            k_bar.push(e);
        }
    }
    let folner = find_folner(&g_bar, &k_bar, &delta, &opts.budget)?;
    let f_pos: HashMap<&GroupElem, usize> =
        folner.elements.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let k_g_elems: Vec<GroupElem> = k_g.iter().map(|u| unit_elem(m, u)).collect();
    let p = sofic_group_action(&g, &k_g_elems, &delta, &opts.budget)?;
    if !p.is_valid_at(&delta) {
        return Err(Error::Invariant(format!(
            "unit group action is not a ({}-)valid approximation",
            rational::render(&delta)
        )));
    }

    let star = |s: &ElementRef, f: &GroupElem| -> ElementRef {
        let c = comp_of[s];
        comps[c].translate(s, f.component(c))
    };
    let mut y: Vec<ElementRef> = Vec::new();
    let mut y_pos: HashMap<ElementRef, usize> = HashMap::new();
    let mut push_y = |e: ElementRef| {
        if !y_pos.contains_key(&e) {
            y_pos.insert(e.clone(), y.len());
            y.push(e);
        }
    };
    for s in &k_s {
        push_y(s.clone());
    }
    for s in k_s.iter().chain(&k2_s) {
        for f in &folner.elements {
            push_y(star(s, f));
        }
    }

    let f_len = folner.len();
    let p_len = p.points;
    let bulk_unit = (f_len as u128) * (p_len as u128);
    let one_minus = rational::one() - &delta;
    // smallest |Z| with |Z||F||P| / (|Y| + |Z||F||P| + 1) > 1 − δ
    let rest = BigInt::from(y.len() as u64 + 1);
    let bound = &one_minus * Rational::from_integer(rest) / (&delta * Rational::from_integer(BigInt::from(bulk_unit)));
    let z_big: BigInt = bound.floor().to_integer() + 1;
    let z_size: u128 = z_big.try_into().unwrap_or(u128::MAX);
    let needed = (y.len() as u128)
        .saturating_add(z_size.saturating_mul(bulk_unit))
        .saturating_add(1);
    let cap = opts.ground_cap.min(u32::MAX as usize);
    if needed > cap as u128 {
        return Err(Error::CapExceeded {
            what: "ground set",
            needed: if z_size == u128::MAX {
                format!("more than {}", u128::MAX)
            } else {
                needed.to_string()
            },
            cap,
        });
    }
    let z_size = z_size as usize;
    let n = needed as usize;
    let bottom = (n - 1) as u32;
    let y_len = y.len();

    let tables: Vec<Vec<u32>> = acting
        .par_iter()
        .map(|a| {
            let mut t = vec![bottom; n];
            for (i, s) in y.iter().enumerate() {
                if let Some(&j) = y_pos.get(&m.multiply(a, s)) {
                    t[i] = j as u32;
                }
            }
            let bulk = |z: usize, f: usize, q: usize| y_len + (z * f_len + f) * p_len + q;
            if m.is_unit(a) {
                let ga = unit_elem(m, a);
                let a_bar = hom.apply(&ga);
                let pt = p.table(&ga).expect("P has tables for 1, K∩G and (K∩G)²");
                let moved: Vec<Option<usize>> = folner
                    .elements
                    .iter()
                    .map(|f| f_pos.get(&g_bar.multiply(&a_bar, f)).copied())
                    .collect();
                for z in 0..z_size {
                    for (f, target) in moved.iter().enumerate() {
                        if let Some(f2) = target {
                            for q in 0..p_len {
                                t[bulk(z, f, q)] = bulk(z, *f2, pt[q] as usize) as u32;
                            }
                        }
                    }
                }
            } else {
                let images: Vec<u32> = folner
                    .elements
                    .iter()
                    .map(|f| y_pos[&star(a, f)] as u32)
                    .collect();
                for z in 0..z_size {
                    for (f, &img) in images.iter().enumerate() {
                        for q in 0..p_len {
                            t[bulk(z, f, q)] = img;
                        }
                    }
                }
            }
            t
        })
        .collect();

    let witness = ActionWitness {
        n,
        elements: acting
            .iter()
            .map(|e| ActingElement {
                enc: e.clone(),
                label: m.label(e),
            })
            .collect(),
        tables,
        products,
    };

    let good_f = folner
        .elements
        .iter()
        .filter(|f| k_bar.iter().all(|kb| f_pos.contains_key(&g_bar.multiply(kb, f))))
        .count();
    let n_big = BigInt::from(n as u64);
    let frac = |count: u128| Rational::new(BigInt::from(count), n_big.clone());
    let zfp_fraction = frac(z_size as u128 * bulk_unit);
    let good_fraction = frac(z_size as u128 * good_f as u128 * p_len as u128);
    if zfp_fraction <= one_minus || good_fraction <= &one_minus * &one_minus || folner.quality <= one_minus {
        return Err(Error::Invariant("construction accounting bounds violated".into()));
    }
    let mut notes = Vec::new();
    if matches!(g_bar, GroupHandle::Image(_)) && g_bar.order().is_none() {
        notes.push(
            "image group is infinite: its Folner set is a measured pushforward of source boxes".into(),
        );
    }
    if comps.is_empty() {
        notes.push("K has no non-units: the image group is trivial and Y is empty".into());
    }
    if k_bar.is_empty() {
        notes.push("K has no units: F is the identity of the image group".into());
    }
    let labels = |v: &[ElementRef]| v.iter().map(|e| m.label(e)).collect::<Vec<_>>();
    let log = ProvenanceLog {
        delta: delta.clone(),
        k_in_g: labels(&k_g),
        k_in_s: labels(&k_s),
        k2_in_s: labels(&k2_s),
        g_bar: g_bar.describe(),
        g_bar_order: g_bar.order(),
        f_size: f_len,
        f_quality: folner.quality.clone(),
        folner_strategy: folner.strategy.to_string(),
        p_size: p_len,
        p_construction: p.certificate.construction.describe(),
        p_max_mult: p.certificate.counts.max_mult(p_len),
        p_max_sep: p.certificate.counts.max_sep(p_len),
        y_size: y_len,
        z_size,
        n,
        zfp_fraction,
        good_fraction,
        notes,
    };
    let report = check_witness(m, &k, &witness, opts.workers)?;
    if !crate::witness::passes(&report, eps) {
        return Err(Error::Invariant(format!(
            "built witness fails the checker: max mult defect {}, max overlap {}",
            rational::render(&report.max_mult_defect),
            rational::render(&report.max_sep_overlap)
        )));
    }
    Ok(BuildOutput {
        witness,
        log,
        report,
    })
}

/// Subgroups attached to the orbit of a non-unit under right translation
/// by units, in a finite monoid.
#[derive(Clone, Debug, Serialize)]
pub struct PQDecomposition {
    pub element: String,
    pub d_class: usize,
    /// The orbit of the element under right translation by units.
    pub orbit: Vec<usize>,
    /// Union of the H-classes met by the orbit.
    pub z_set: Vec<usize>,
    pub h_classes: Vec<usize>,
    pub g_order: usize,
    /// Units fixing every H-class in `z_set` under the induced action.
    pub p_subgroup: Vec<usize>,
    /// Units fixing every element of `z_set`.
    pub q_subgroup: Vec<usize>,
    pub index_g_p: usize,
    pub order_p_q: usize,
    pub schutzenberger_order: usize,
    pub checks: PQChecks,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PQChecks {
    pub q_subset_p: bool,
    pub p_normal: bool,
    pub q_normal: bool,
    /// `P` agrees with the stabiliser read off the induced action on H-classes.
    pub p_is_circle_stabiliser: bool,
    /// `Q` agrees with the kernel of `P` acting on `z_set`.
    pub kernel_equals_q: bool,
    /// `P/Q` maps injectively into the product of Schützenberger groups.
    pub embeds_in_schutzenberger_power: bool,
    /// `|P/Q|` divides `|S|^(number of H-classes)`.
    pub order_divides: bool,
}

impl PQChecks {
    pub fn all(&self) -> bool {
        self.q_subset_p
            && self.p_normal
            && self.q_normal
            && self.p_is_circle_stabiliser
            && self.kernel_equals_q
            && self.embeds_in_schutzenberger_power
            && self.order_divides
    }
}

pub fn compute_pq_decomposition(m: &FiniteMonoid, x: usize) -> Result<PQDecomposition> {
    if x >= m.size() {
        return Err(Error::UnknownElement(x.to_string()));
    }
    let units = m.units();
    if units.contains(&x) {
        return Err(Error::NotANonUnit(m.name(x).to_string()));
    }
    let green = GreenStructure::compute(m);
    let hc = &green.classes.h;
    let mut orbit: Vec<usize> = units.iter().map(|&g| m.multiply(x, g)).collect();
    orbit.sort_unstable();
    orbit.dedup();
    let mut h_classes: Vec<usize> = orbit.iter().map(|&s| hc[s]).collect();
    h_classes.sort_unstable();
    h_classes.dedup();
    let mut z_set: Vec<usize> = h_classes
        .iter()
        .flat_map(|&h| green.h_class(h).iter().copied())
        .collect();
    z_set.sort_unstable();

    let p: Vec<usize> = units
        .iter()
        .copied()
        .filter(|&g| z_set.iter().all(|&z| hc[m.multiply(z, g)] == hc[z]))
        .collect();
    let q: Vec<usize> = units
        .iter()
        .copied()
        .filter(|&g| z_set.iter().all(|&z| m.multiply(z, g) == z))
        .collect();

    let one = m.identity();
    let inverse = |g: usize| {
        *units
            .iter()
            .find(|&&v| m.multiply(g, v) == one)
            .expect("units have inverses")
    };
    let normal = |sub: &[usize]| {
        units.iter().all(|&g| {
            let gi = inverse(g);
            sub.iter()
                .all(|&s| sub.contains(&m.multiply(m.multiply(g, s), gi)))
        })
    };

    let d = green.classes.d[x];
    let ca = circle_action(m, &green, d)?;
    let domain_pos: Vec<usize> = h_classes
        .iter()
        .map(|h| ca.domain.binary_search(h).expect("H-classes of the orbit lie in its D-class"))
        .collect();
    let circle_p: Vec<usize> = ca
        .units
        .iter()
        .enumerate()
        .filter(|(u, _)| domain_pos.iter().all(|&i| ca.table[*u][i] == i))
        .map(|(_, &g)| g)
        .collect();

    // P → ∏ Sym(H): restrict each element of P to each H-class in z_set
    let restriction = |g: usize| -> Vec<Vec<usize>> {
        h_classes
            .iter()
            .map(|&h| green.h_class(h).iter().map(|&z| m.multiply(z, g)).collect())
            .collect()
    };
    let identity_restriction = restriction(one);
    let kernel: Vec<usize> = p
        .iter()
        .copied()
        .filter(|&g| restriction(g) == identity_restriction)
        .collect();
    let images: HashSet<Vec<Vec<usize>>> = p.iter().map(|&g| restriction(g)).collect();
    let schutz = schutzenberger_group(m, &green, h_classes[0]);
    let order_p_q = if q.is_empty() { 0 } else { p.len() / q.len() };
    let power = (schutz.order as u128).checked_pow(h_classes.len() as u32);
    let checks = PQChecks {
        q_subset_p: q.iter().all(|g| p.contains(g)),
        p_normal: normal(&p),
        q_normal: normal(&q),
        p_is_circle_stabiliser: circle_p == p,
        kernel_equals_q: kernel == q,
        embeds_in_schutzenberger_power: images.len() == order_p_q
            && p.len().is_multiple_of(q.len().max(1))
            && images.iter().all(|img| {
                img.iter().zip(&h_classes).all(|(row, &h)| {
                    let members = green.h_class(h);
                    let perm: Option<Vec<u32>> = row
                        .iter()
                        .map(|z| members.iter().position(|w| w == z).map(|i| i as u32))
                        .collect();
                    perm.and_then(crate::groups::Perm::from_images)
                        .is_some_and(|pm| schutzenberger_group(m, &green, h).perms.contains(&pm))
                })
            }),
        order_divides: order_p_q > 0 && power.is_none_or(|pw| pw % order_p_q as u128 == 0),
    };
    Ok(PQDecomposition {
        element: m.name(x).to_string(),
        d_class: d,
        orbit,
        z_set,
        h_classes,
        g_order: units.len(),
        index_g_p: units.len() / p.len().max(1),
        order_p_q,
        schutzenberger_order: schutz.order,
        p_subgroup: p,
        q_subgroup: q,
        checks,
    })
}

/// Candidate approximate actions of the bicyclic monoid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ProbeFamily {
    /// `q·x = min(x+1, N−1)`, `p·x = max(x−1, 0)` on `{0, …, N−1}`.
    #[default]
    Truncation,
}

impl std::str::FromStr for ProbeFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "truncation" => Ok(ProbeFamily::Truncation),
            other => Err(Error::InvalidArgument(format!("unknown probe family {other}"))),
        }
    }
}

/// The probe's action tables on `{1} ∪ K ∪ K²`.
pub fn bicyclic_probe_witness(n: usize, k: &[ElementRef], family: ProbeFamily) -> Result<ActionWitness> {
    if n == 0 || n > u32::MAX as usize {
        return Err(Error::InvalidArgument(format!("ground size {n} out of range")));
    }
    let m = Bicyclic;
    let k = dedup_refs(k);
    let mut acting = vec![m.one()];
    for e in &k {
        if !acting.contains(e) {
            acting.push(e.clone());
        }
    }
    let mut products = Vec::new();
    for x in &k {
        for y in &k {
            let pr = m.multiply(x, y);
            if !acting.contains(&pr) {
                acting.push(pr.clone());
            }
            let pos = |e: &ElementRef| acting.iter().position(|a| a == e).unwrap();
            products.push([pos(x), pos(y), pos(&pr)]);
        }
    }
    let ProbeFamily::Truncation = family;
    let top = (n - 1) as u64;
    let tables = acting
        .iter()
        .map(|e| {
            // q^a p^b acts as p applied b times, then q applied a times
            let (a, b) = Bicyclic::decode(e);
            (0..n as u64)
                .map(|x| (x.saturating_sub(b).saturating_add(a)).min(top) as u32)
                .collect()
        })
        .collect();
    Ok(ActionWitness {
        n,
        elements: acting
            .iter()
            .map(|e| ActingElement {
                enc: e.clone(),
                label: m.label(e),
            })
            .collect(),
        tables,
        products,
    })
}

/// Measures a candidate action of the bicyclic monoid. Diagnostic only.
pub fn bicyclic_defect_probe(
    n: usize,
    k: &[ElementRef],
    family: ProbeFamily,
    workers: usize,
) -> Result<DefectReport> {
    let w = bicyclic_probe_witness(n, k, family)?;
    check_witness(&Bicyclic, k, &w, workers)
}

/// `1 − δ` raised to the third power, for reporting.
pub fn delta_margin(delta: &Rational) -> Rational {
    rational::pow(&(rational::one() - delta), 3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::finite::{cyclic_group, semilattice};
    use crate::monoid::{direct_product, make_transformation_monoid, FiniteStructured};

    fn r(s: &str) -> Rational {
        rational::parse(s).unwrap()
    }

    #[test]
    fn delta_examples() {
        assert_eq!(choose_delta(&r("61/125")).unwrap(), r("1/10"));
        assert_eq!(choose_delta(&r("271/1000")).unwrap(), r("1/20"));
        let tiny = choose_delta(&r("1/1000")).unwrap();
        assert_eq!(tiny, r("1/6250"));
        assert!(delta_margin(&tiny) > r("999/1000"));
        assert!(choose_delta(&r("0")).is_err());
        assert!(choose_delta(&r("1")).is_err());
    }

    #[test]
    fn delta_is_strict_on_a_grid() {
        for den in [3u64, 7, 20, 100, 997] {
            for num in 1..den.min(40) {
                let eps = rational::ratio(num, den);
                let d = choose_delta(&eps).unwrap();
                assert!(d > rational::zero());
                assert!(delta_margin(&d) > rational::one() - &eps);
            }
        }
    }

    #[test]
    fn finite_monoids_match_everything_finite() {
        let t2 = FiniteStructured::new(make_transformation_monoid(2).unwrap());
        let rep = check_hypotheses(&t2, None);
        assert!(rep.matches(Condition::LocallyAmenableOrbits));
        assert!(rep.matches(Condition::FiniteNonUnits));
        assert!(rep.units_equal_j_class.value);
        assert_eq!(rep.units_equal_j_class.basis, "computed");
    }

    #[test]
    fn bicyclic_matches_nothing() {
        let rep = check_hypotheses(&Bicyclic, Some(&[Bicyclic::p(), Bicyclic::q()]));
        assert!(!rep.units_equal_j_class.value);
        assert!(rep.matched_conditions.is_empty(), "{:?}", rep.matched_conditions);
        assert!(matches!(
            build_witness(&Bicyclic, &[Bicyclic::p()], &r("1/4"), &BuildOptions::default()),
            Err(Error::HypothesesNotMet(_))
        ));
    }

    #[test]
    fn t2_build() {
        let t2 = FiniteStructured::new(make_transformation_monoid(2).unwrap());
        let k = t2.all_elements().unwrap();
        let out = build_witness(&t2, &k, &r("1/5"), &BuildOptions::default()).unwrap();
        assert!(crate::witness::passes(&out.report, &r("1/5")));
        assert_eq!(out.log.g_bar_order, Some(2));
        assert_eq!(out.log.f_size, 2);
        assert_eq!(out.log.p_size, 2);
        assert_eq!(out.log.k_in_s.len(), 2);
        let id = &out.witness.tables[0];
        assert!(id.iter().enumerate().all(|(i, &x)| i == x as usize));
    }

    #[test]
    fn trivial_k() {
        let sl = FiniteStructured::new(semilattice());
        let out = build_witness(&sl, &[sl.one()], &r("1/2"), &BuildOptions::default()).unwrap();
        assert_eq!(out.log.y_size, 0);
        assert_eq!(out.report.identity_violations, 0);
    }

    #[test]
    fn cap_reports_needed_size() {
        let t2 = FiniteStructured::new(make_transformation_monoid(2).unwrap());
        let k = t2.all_elements().unwrap();
        let opts = BuildOptions {
            ground_cap: 5,
            ..BuildOptions::default()
        };
        match build_witness(&t2, &k, &r("1/5"), &opts) {
            Err(Error::CapExceeded { needed, cap, .. }) => {
                assert_eq!(cap, 5);
                assert!(needed.parse::<u64>().unwrap() > 5);
            }
            other => panic!("expected CapExceeded, got {other:?}"),
        }
    }

    #[test]
    fn pq_on_t2() {
        let t2 = make_transformation_monoid(2).unwrap();
        let x = t2.index_of("11").unwrap();
        let d = compute_pq_decomposition(&t2, x).unwrap();
        let id = t2.index_of("01").unwrap();
        assert_eq!(d.z_set.len(), 2);
        assert_eq!(d.p_subgroup, vec![id]);
        assert_eq!(d.q_subgroup, vec![id]);
        assert_eq!(d.index_g_p, 2);
        assert!(d.checks.all(), "{:?}", d.checks);
        assert!(matches!(
            compute_pq_decomposition(&t2, id),
            Err(Error::NotANonUnit(_))
        ));
    }

    #[test]
    fn pq_on_z2_times_semilattice() {
        let m = direct_product(&cyclic_group(2), &semilattice()).unwrap();
        let x = m.index_of("(0,0)").unwrap();
        let d = compute_pq_decomposition(&m, x).unwrap();
        assert_eq!(d.z_set.len(), 2);
        assert_eq!(d.h_classes.len(), 1);
        assert_eq!(d.p_subgroup.len(), 2);
        assert_eq!(d.q_subgroup, vec![m.identity()]);
        assert_eq!(d.order_p_q, 2);
        assert_eq!(d.schutzenberger_order, 2);
        assert!(d.checks.all());
    }

    #[test]
    fn probe_shapes() {
        let one_point = bicyclic_defect_probe(1, &[Bicyclic::p(), Bicyclic::q()], ProbeFamily::Truncation, 1)
            .unwrap();
        assert_eq!(one_point.sep_overlap("p", "q"), Some(&rational::one()));
        let qp = Bicyclic::encode(1, 1);
        let k = [Bicyclic::p(), Bicyclic::q(), Bicyclic.one(), qp];
        let rep = bicyclic_defect_probe(100, &k, ProbeFamily::Truncation, 1).unwrap();
        // 1 and qp differ only at the point 0
        assert_eq!(rep.sep_overlap("1", "qp"), Some(&r("99/100")));
        // p(qx) = x fails only at the top point
        assert_eq!(rep.mult_defect("p", "q"), Some(&r("1/100")));
        assert_eq!(rep.mult_defect("q", "p"), Some(&rational::zero()));
    }
}
