use proptest::prelude::*;
use sofic_core::monoid::{Bicyclic, StructuredMonoid};

/// Deletes `pq` until none is left; the survivor is `q^a p^b`.
fn rewrite(word: &str) -> (u64, u64) {
    let mut w = word.to_string();
    while let Some(i) = w.find("pq") {
        w.replace_range(i..i + 2, "");
    }
    let a = w.chars().take_while(|&c| c == 'q').count();
    assert!(w[a..].chars().all(|c| c == 'p'), "not a normal form: {w}");
    (a as u64, (w.len() - a) as u64)
}

fn normal_word(a: u64, b: u64) -> String {
    "q".repeat(a as usize) + &"p".repeat(b as usize)
}

proptest! {
    #[test]
    fn product_matches_rewriting(a in 0u64..=10, b in 0u64..=10, c in 0u64..=10, d in 0u64..=10) {
        let m = Bicyclic;
        let x = Bicyclic::encode(a, b);
        let y = Bicyclic::encode(c, d);
        let expected = rewrite(&(normal_word(a, b) + &normal_word(c, d)));
        prop_assert_eq!(Bicyclic::decode(&m.multiply(&x, &y)), expected);
    }

    #[test]
    fn words_parse_to_their_rewritten_form(word in "[pq]{0,12}") {
        let m = Bicyclic;
        let label = if word.is_empty() { "1".to_string() } else { word.clone() };
        let e = m.parse_element(&label).unwrap();
        prop_assert_eq!(Bicyclic::decode(&e), rewrite(&word));
        prop_assert_eq!(m.parse_element(&m.label(&e)).unwrap(), e);
    }

    #[test]
    fn only_the_identity_is_a_unit(a in 0u64..=10, b in 0u64..=10) {
        let m = Bicyclic;
        let x = Bicyclic::encode(a, b);
        prop_assert_eq!(m.is_unit(&x), a == 0 && b == 0);
    }
}

#[test]
fn pq_is_one_but_qp_is_not() {
    let m = Bicyclic;
    assert_eq!(m.multiply(&Bicyclic::p(), &Bicyclic::q()), m.one());
    assert_ne!(m.multiply(&Bicyclic::q(), &Bicyclic::p()), m.one());
    assert_eq!(m.label(&Bicyclic::encode(2, 3)), "q^2p^3");
}
