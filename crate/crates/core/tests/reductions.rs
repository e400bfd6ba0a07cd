mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use repairaf::model::Fact;
use repairaf::reductions::{
    parse_dimacs, parse_qdimacs, qbf_constraints, qbf_to_instance, sat_constraints, sat_to_instance, CnfFormula,
    SatMode,
};
use repairaf::repairs::{in_all_repairs, in_some_repair, rep_nonempty, Budgets, Route};
use repairaf::Error;

fn budgets() -> Budgets {
    Budgets {
        max_facts: 14,
        max_args: 512,
    }
}

fn route(facts: usize) -> Route {
    if facts <= 14 {
        Route::Both
    } else {
        Route::Argumentation
    }
}

fn dimacs(num_vars: usize, clauses: &[Vec<i32>]) -> String {
    let mut s = format!("c generated\np cnf {num_vars} {}\n", clauses.len());
    for c in clauses {
        for l in c {
            s.push_str(&format!("{l} "));
        }
        s.push_str("0\n");
    }
    s
}

fn clauses(max_vars: i32, max_clauses: usize) -> impl Strategy<Value = Vec<Vec<i32>>> {
    let lit = (1..=max_vars, any::<bool>()).prop_map(|(v, p)| if p { v } else { -v });
    prop::collection::vec(prop::collection::vec(lit, 1..=3), 1..=max_clauses)
}

fn used(clauses: &[Vec<i32>]) -> BTreeSet<u32> {
    clauses.iter().flatten().map(|l| l.unsigned_abs()).collect()
}

/// Renumbers variables to `1..=n` in order of first use.
fn compact(clauses: &[Vec<i32>]) -> (u32, Vec<Vec<i32>>) {
    let vars: Vec<u32> = used(clauses).into_iter().collect();
    let pos = |v: u32| vars.iter().position(|&x| x == v).unwrap() as i32 + 1;
    let out = clauses
        .iter()
        .map(|c| c.iter().map(|&l| if l > 0 { pos(l as u32) } else { -pos(l.unsigned_abs()) }).collect())
        .collect();
    (vars.len() as u32, out)
}

#[test]
fn worked_formula_table() {
    let phi = parse_dimacs(include_str!("../data/reductions/phi.cnf")).unwrap();
    let r = sat_to_instance(&phi, SatMode::SomeRepair).unwrap();
    let f = |v: [&str; 4]| Fact::new("F", v);
    let c = |v: [&str; 2]| Fact::new("C", v);
    let expected: BTreeSet<Fact> = [
        f(["sat", "sat", "sat", "sat"]),
        f(["x1", "1", "c1", "sat"]),
        f(["x2", "1", "c1", "sat"]),
        f(["x1", "0", "c2", "sat"]),
        f(["x2", "0", "c2", "sat"]),
        f(["x1", "0", "c3", "sat"]),
        f(["x2", "1", "c3", "sat"]),
        c(["sat", "c1"]),
        c(["c1", "c2"]),
        c(["c2", "c3"]),
        c(["c3", "sat"]),
    ]
    .into();
    assert_eq!(r.instance().facts(), &expected);
    assert_eq!(r.instance().constraints(), sat_constraints(SatMode::SomeRepair).as_slice());
    let on_disk = repairaf::parser::parse_instance(include_str!("../data/reductions/sat_example.cdb")).unwrap();
    assert_eq!(on_disk.instance, r.parsed.instance);
}

#[test]
fn worked_qbf_from_qdimacs() {
    let phi = parse_qdimacs(include_str!("../data/reductions/phi.qdimacs")).unwrap();
    let r = qbf_to_instance(&phi).unwrap();
    assert_eq!(r.instance().facts().len(), 18);
    assert_eq!(r.instance().constraints(), qbf_constraints().as_slice());
    assert!(in_all_repairs(r.instance(), &r.distinguished, Route::Argumentation, budgets()).unwrap());
}

#[test]
fn malformed_inputs_are_rejected() {
    let bad = [
        "p cnf 2 1\n1 3 0\n",
        "1 2 0\n",
        "p cnf 2 1\n1 2\n",
        "p cnf 2 1\n1 x 0\n",
        "p dnf 2 1\n1 2 0\n",
        "p cnf 1 1\n0\n",
    ];
    for text in bad {
        assert!(
            matches!(parse_dimacs(text), Err(Error::Format { .. } | Error::Precondition(_))),
            "{text:?}"
        );
    }
    assert!(parse_dimacs("p cnf 1 1\na 1 0\n1 0\n").is_err());
    assert!(parse_qdimacs("p cnf 2 1\ne 1 0\na 2 0\n1 2 0\n").is_err());
    assert!(parse_qdimacs("p cnf 2 1\na 1 0\ne 2 0\na 1 0\n1 2 0\n").is_err());
    assert!(parse_qdimacs("p cnf 3 1\na 1 0\ne 2 0\n1 2 3 0\n").is_err());
    assert!(parse_qdimacs("p cnf 2 1\na 1 0\ne 1 2 0\n1 2 0\n").is_err());
}

#[test]
fn unsatisfiable_formula_has_only_the_empty_repair_in_rep_mode() {
    let phi = CnfFormula::from_names([vec!["x"], vec!["-x"]]).unwrap();
    let r = sat_to_instance(&phi, SatMode::NonEmptyRepair).unwrap();
    assert!(!rep_nonempty(r.instance(), Route::Both, budgets()).unwrap());
    let sr = sat_to_instance(&phi, SatMode::SomeRepair).unwrap();
    assert!(!in_some_repair(sr.instance(), &sr.distinguished, Route::Both, budgets()).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sat_encoding_through_dimacs(raw in clauses(4, 4)) {
        let (n, cls) = compact(&raw);
        let phi = parse_dimacs(&dimacs(n as usize, &cls)).unwrap();
        let truth = common::satisfiable(n, &cls);
        let sr = sat_to_instance(&phi, SatMode::SomeRepair).unwrap();
        let facts = sr.instance().facts().len();
        prop_assert_eq!(in_some_repair(sr.instance(), &sr.distinguished, route(facts), budgets()).unwrap(), truth);
        let rep = sat_to_instance(&phi, SatMode::NonEmptyRepair).unwrap();
        prop_assert_eq!(rep_nonempty(rep.instance(), route(facts), budgets()).unwrap(), truth);
    }

    #[test]
    fn qbf_encoding_through_qdimacs(raw in clauses(4, 3), split in 0u32..=4) {
        let (n, cls) = compact(&raw);
        let u = split.min(n);
        let y: Vec<u32> = (1..=u).collect();
        let z: Vec<u32> = (u + 1..=n).collect();
        let mut text = format!("p cnf {n} {}\n", cls.len());
        for (q, block) in [('a', &y), ('e', &z)] {
            if !block.is_empty() {
                text.push(q);
                for v in block.iter() {
                    text.push_str(&format!(" {v}"));
                }
                text.push_str(" 0\n");
            }
        }
        for c in &cls {
            for l in c {
                text.push_str(&format!("{l} "));
            }
            text.push_str("0\n");
        }
        let phi = parse_qdimacs(&text).unwrap();
        let r = qbf_to_instance(&phi).unwrap();
        let facts = r.instance().facts().len();
        let got = in_all_repairs(r.instance(), &r.distinguished, route(facts), budgets()).unwrap();
        prop_assert_eq!(got, common::qbf_true(&y, &z, &cls));
    }
}
