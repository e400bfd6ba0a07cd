mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use repairaf::model::{ConstraintProfile, Fact};
use repairaf::parser::parse_instance;
use repairaf::reductions::random_instance;
use repairaf::repairs::{
    check_equivalence, preferred_matches_repairs, repairs_by, repairs_via_argumentation, Budgets, Route,
};
use repairaf::Error;

const GAP: &str = "@a A(k). @b B(k). @c C(k). @w W(k).
dc: ! A(X), B(X), C(X).
dc: ! A(X), W(X).
lav: B(X) -> W(X).
lav: C(X) -> W(X).
";

fn unary(rel: &str) -> Fact {
    Fact::new(rel, ["k"])
}

// {a} is a repair but not admissible: it cannot counter the attack from {b, c}.
#[test]
fn preferred_misses_a_repair_with_a_three_fact_conflict() {
    let cdb = parse_instance(GAP).unwrap().instance;
    let repairs: BTreeSet<BTreeSet<Fact>> = common::repairs(&cdb);
    let expected: BTreeSet<BTreeSet<Fact>> = [
        [unary("A")].into(),
        [unary("B"), unary("C"), unary("W")].into(),
    ]
    .into();
    assert_eq!(repairs, expected);

    let pref: BTreeSet<BTreeSet<Fact>> = repairs_via_argumentation(&cdb).unwrap().iter().cloned().collect();
    assert_eq!(pref, [[unary("B"), unary("C"), unary("W")].into()].into());
    assert!(!preferred_matches_repairs(&cdb));

    let report = check_equivalence(&cdb, Budgets::default()).unwrap();
    assert!(!report.guaranteed);
    assert!(report.preferred_sound);
    assert!(report.passed());

    assert!(matches!(
        repairs_by(&cdb, Route::Both, Budgets::default()),
        Err(Error::RouteMismatch { .. })
    ));
}

#[test]
fn dropping_either_side_restores_the_correspondence() {
    for text in [
        GAP.replace("lav:", "% lav:"),
        GAP.replace("dc: ! A(X), B(X), C(X).", "dc: ! A(X), B(X)."),
    ] {
        let cdb = parse_instance(&text).unwrap().instance;
        assert!(preferred_matches_repairs(&cdb));
        let got: BTreeSet<_> = repairs_via_argumentation(&cdb).unwrap().iter().cloned().collect();
        assert_eq!(got, common::repairs(&cdb), "{text}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn inside_the_fragment_preferred_equals_repairs(seed in any::<u64>(), bits in 0u8..16, n in 1usize..8) {
        let profile = ConstraintProfile::new(bits & 1 != 0, bits & 2 != 0, bits & 4 != 0, bits & 8 != 0);
        let cdb = random_instance(seed, profile, n);
        let oracle = common::repairs(&cdb);
        let got: BTreeSet<_> = repairs_via_argumentation(&cdb).unwrap().iter().cloned().collect();
        if preferred_matches_repairs(&cdb) {
            prop_assert_eq!(got, oracle);
        } else {
            for p in &got {
                prop_assert!(oracle.iter().any(|r| p.is_subset(r)));
            }
        }
    }
}
