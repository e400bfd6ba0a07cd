mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use repairaf::framework::{build_with, preprocess, preprocess_shuffled, BuildOptions, Construction};
use repairaf::grounding::{compute_conflicts, conflict_family, enumerate_homomorphisms, satisfies, Assignment};
use repairaf::model::{
    normalize_fd_to_dc, normalize_id_to_ltgd, ConstrainedDatabase, Constraint, ConstraintProfile, Database, Fact,
    FunctionalDependency, InclusionDependency, Schema,
};
use repairaf::parser::{parse_instance, serialize_instance};
use repairaf::reductions::random_instance;
use repairaf::repairs::{all_repairs, framework_for};
use repairaf::semantics::{extensions, is_admissible, is_conflict_free, SemanticsKind};

fn profile_from(bits: u8) -> ConstraintProfile {
    ConstraintProfile::new(bits & 1 != 0, bits & 2 != 0, bits & 4 != 0, bits & 8 != 0)
}

fn instance() -> impl Strategy<Value = ConstrainedDatabase> {
    (any::<u64>(), 0u8..16, 1usize..8).prop_map(|(seed, bits, n)| random_instance(seed, profile_from(bits), n))
}

fn facts_over(relation: &'static str, arity: usize, max: usize) -> impl Strategy<Value = Vec<Fact>> {
    prop::collection::vec(prop::collection::vec(prop::sample::select(vec!["a", "b"]), arity), 0..max)
        .prop_map(move |rows| rows.into_iter().map(|r| Fact::new(relation, r)).collect())
}

fn positions(arity: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::sample::subsequence((1..=arity).collect::<Vec<_>>(), 1..=arity)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn serialized_instances_parse_back(cdb in instance()) {
        let text = serialize_instance(&cdb);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(back.instance, cdb);
    }

    #[test]
    fn parser_is_total(text in "[ -~\n]{0,80}") {
        let _ = parse_instance(&text);
    }

    #[test]
    fn parser_is_total_on_near_misses(cdb in instance(), cut in 0usize..400, junk in "[(),.:!<=\\[\\]A-Za-z0-9 \"]{0,6}") {
        let text = serialize_instance(&cdb);
        let at = text.char_indices().map(|(i, _)| i).nth(cut).unwrap_or(text.len());
        let _ = parse_instance(&format!("{}{}{}", &text[..at], junk, &text[at..]));
    }

    #[test]
    fn fd_normalization_preserves_satisfaction(
        facts in facts_over("R", 3, 6),
        det in positions(3),
        dep in positions(3),
    ) {
        let schema = Schema::new().with("R", 3);
        let db = Database::new(schema, facts.clone()).unwrap();
        let fd = FunctionalDependency { relation: "R".into(), determinant: det, dependent: dep };
        let direct = satisfies(&db, &Constraint::Fd(fd.clone()));
        let via_dcs = normalize_fd_to_dc(&fd, 3).into_iter().all(|dc| satisfies(&db, &Constraint::Dc(dc)));
        let refs: Vec<&Fact> = db.facts().iter().collect();
        prop_assert_eq!(direct, via_dcs);
        prop_assert_eq!(direct, common::fd_holds(&fd, &refs));
    }

    #[test]
    fn id_normalization_preserves_satisfaction(
        r in facts_over("R", 2, 5),
        s in facts_over("S", 3, 5),
        src in positions(2),
        perm in Just(vec![1usize, 2, 3]).prop_shuffle(),
    ) {
        let schema = Schema::new().with("R", 2).with("S", 3);
        let db = Database::new(schema.clone(), r.into_iter().chain(s)).unwrap();
        let id = InclusionDependency {
            source: "R".into(),
            source_attrs: src.clone(),
            target: "S".into(),
            target_attrs: perm[..src.len()].to_vec(),
        };
        let ltgd = normalize_id_to_ltgd(&id, &schema).unwrap();
        let refs: Vec<&Fact> = db.facts().iter().collect();
        let direct = satisfies(&db, &Constraint::Id(id.clone()));
        prop_assert_eq!(direct, satisfies(&db, &Constraint::Ltgd(ltgd.clone())));
        prop_assert_eq!(direct, common::id_holds(&id, &refs));
        prop_assert_eq!(direct, common::ltgd_holds(&ltgd, &refs));
    }

    #[test]
    fn constraint_checks_match_oracle(cdb in instance()) {
        let refs: Vec<&Fact> = cdb.facts().iter().collect();
        for c in cdb.constraints() {
            prop_assert_eq!(satisfies(cdb.database(), c), common::satisfies(c, &refs), "{:?}", c);
        }
    }

    #[test]
    fn homomorphisms_match_oracle(cdb in instance()) {
        let refs: Vec<&Fact> = cdb.facts().iter().collect();
        for c in cdb.constraints() {
            let atoms = match c {
                Constraint::Dc(dc) => dc.body.clone(),
                Constraint::Ltgd(l) => l.head.clone(),
                _ => continue,
            };
            let got: BTreeSet<Assignment> = enumerate_homomorphisms(&atoms, cdb.database(), &Assignment::new())
                .into_iter()
                .collect();
            let want: BTreeSet<Assignment> = common::homomorphisms(&atoms, &refs, &Assignment::new())
                .into_iter()
                .map(|(b, _)| b)
                .collect();
            prop_assert_eq!(got, want);
        }
    }

    #[test]
    fn conflicts_match_oracle(cdb in instance()) {
        prop_assert_eq!(conflict_family(&compute_conflicts(&cdb)), common::conflicts(&cdb));
    }

    #[test]
    fn repairs_match_oracle(cdb in instance()) {
        let got: BTreeSet<_> = all_repairs(&cdb).unwrap().iter().cloned().collect();
        prop_assert_eq!(got, common::repairs(&cdb));
    }

    #[test]
    fn preprocessing_is_confluent(cdb in instance(), seed in any::<u64>()) {
        prop_assume!(cdb.profile().has_tgds());
        let (_, af) = framework_for(&cdb).unwrap();
        let a = preprocess(&af);
        let b = preprocess_shuffled(&af, seed);
        prop_assert_eq!(&a.reduced, &b.reduced);
        prop_assert_eq!(&a.removed, &b.removed);
        prop_assert_eq!(a.rounds.iter().flatten().collect::<BTreeSet<_>>(), a.removed.iter().collect::<BTreeSet<_>>());
    }

    #[test]
    fn preprocessing_removes_no_repair_fact(cdb in instance()) {
        prop_assume!(cdb.profile().has_tgds());
        let (_, af) = framework_for(&cdb).unwrap();
        let removed = preprocess(&af).removed;
        for r in common::repairs(&cdb) {
            prop_assert!(r.is_disjoint(&removed));
        }
    }

    #[test]
    fn minimized_supports_keep_preferred(cdb in instance()) {
        prop_assume!(cdb.profile().has_tgds());
        let c = Construction::for_profile(cdb.profile(), true);
        let full = build_with(&cdb, c, BuildOptions { minimize_supports: false }).unwrap();
        let min = build_with(&cdb, c, BuildOptions { minimize_supports: true }).unwrap();
        prop_assume!(full.len() <= 16);
        let facts = |af: &repairaf::framework::Setaf| -> BTreeSet<BTreeSet<Fact>> {
            extensions(af, SemanticsKind::Preferred).unwrap().iter().map(|e| af.facts_of(&e.members)).collect()
        };
        prop_assert_eq!(facts(&full), facts(&min));
    }

    #[test]
    fn semantics_match_subset_filter(seed in any::<u64>()) {
        let af = common::random_setaf(seed, 9, 14);
        for sigma in SemanticsKind::ALL {
            let got: BTreeSet<Vec<usize>> = extensions(&af, sigma).unwrap().into_iter().map(|e| e.members).collect();
            prop_assert_eq!(got, common::extensions(&af, sigma), "{}", sigma);
        }
    }

    #[test]
    fn semantics_inclusions(seed in any::<u64>()) {
        let af = common::random_setaf(seed, 10, 16);
        let stable = extensions(&af, SemanticsKind::Stable).unwrap();
        let pref = extensions(&af, SemanticsKind::Preferred).unwrap();
        let naive = extensions(&af, SemanticsKind::Naive).unwrap();
        prop_assert!(!pref.is_empty());
        for s in &stable {
            prop_assert!(pref.iter().any(|p| p.members == s.members));
            prop_assert!(naive.iter().any(|n| n.members == s.members));
        }
        for p in &pref {
            prop_assert!(is_admissible(&af, &p.members));
            prop_assert!(naive.iter().any(|n| p.members.iter().all(|m| n.contains(*m))));
        }
        for n in &naive {
            prop_assert!(is_conflict_free(&af, &n.members));
        }
    }
}
