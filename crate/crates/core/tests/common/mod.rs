//! Independent brute-force oracles. Nothing here calls into the library's
//! grounding, semantics or repair code; they only read its data types.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use repairaf::framework::Setaf;
use repairaf::model::{
    Atom, CmpOp, Comparison, ConstrainedDatabase, Constraint, DenialConstraint, Fact, FunctionalDependency,
    InclusionDependency, Ltgd, Term,
};
use repairaf::semantics::SemanticsKind;

pub type Binding = BTreeMap<String, String>;
pub type FactSet = BTreeSet<Fact>;

fn bind(atom: &Atom, fact: &Fact, mut b: Binding) -> Option<Binding> {
    if atom.relation != fact.relation || atom.terms.len() != fact.values.len() {
        return None;
    }
    for (t, v) in atom.terms.iter().zip(&fact.values) {
        match t {
            Term::Const(c) if c != v => return None,
            Term::Const(_) => {}
            Term::Var(x) => match b.get(x) {
                Some(w) if w != v => return None,
                Some(_) => {}
                None => {
                    b.insert(x.clone(), v.clone());
                }
            },
        }
    }
    Some(b)
}

/// Every binding of `atoms` into `facts` extending `start`, together with
/// the image, by trying each fact for each atom in turn.
pub fn homomorphisms(atoms: &[Atom], facts: &[&Fact], start: &Binding) -> Vec<(Binding, Vec<Fact>)> {
    let mut out = vec![(start.clone(), Vec::new())];
    for atom in atoms {
        let mut next = Vec::new();
        for (b, image) in &out {
            for f in facts {
                if let Some(b2) = bind(atom, f, b.clone()) {
                    let mut img = image.clone();
                    img.push((*f).clone());
                    next.push((b2, img));
                }
            }
        }
        out = next;
    }
    out
}

fn value<'a>(t: &'a Term, b: &'a Binding) -> &'a str {
    match t {
        Term::Const(c) => c,
        Term::Var(x) => &b[x],
    }
}

fn comparison_holds(c: &Comparison, b: &Binding) -> bool {
    let (l, r) = (value(&c.left, b), value(&c.right, b));
    match c.op {
        CmpOp::Eq => l == r,
        CmpOp::Neq => l != r,
    }
}

pub fn dc_violated(dc: &DenialConstraint, facts: &[&Fact]) -> bool {
    homomorphisms(&dc.body, facts, &Binding::new())
        .iter()
        .any(|(b, _)| dc.comparisons.iter().all(|c| comparison_holds(c, b)))
}

pub fn fd_holds(fd: &FunctionalDependency, facts: &[&Fact]) -> bool {
    let rows: Vec<&&Fact> = facts.iter().filter(|f| f.relation == fd.relation).collect();
    for s in &rows {
        for t in &rows {
            let agree = |ps: &[usize]| ps.iter().all(|&p| s.values[p - 1] == t.values[p - 1]);
            if agree(&fd.determinant) && !agree(&fd.dependent) {
                return false;
            }
        }
    }
    true
}

pub fn id_holds(id: &InclusionDependency, facts: &[&Fact]) -> bool {
    let project = |f: &Fact, ps: &[usize]| ps.iter().map(|&p| f.values[p - 1].clone()).collect::<Vec<_>>();
    facts.iter().filter(|s| s.relation == id.source).all(|s| {
        let want = project(s, &id.source_attrs);
        facts
            .iter()
            .any(|t| t.relation == id.target && project(t, &id.target_attrs) == want)
    })
}

pub fn ltgd_holds(l: &Ltgd, facts: &[&Fact]) -> bool {
    homomorphisms(std::slice::from_ref(&l.body), facts, &Binding::new())
        .iter()
        .all(|(b, _)| !homomorphisms(&l.head, facts, b).is_empty())
}

pub fn satisfies(c: &Constraint, facts: &[&Fact]) -> bool {
    match c {
        Constraint::Fd(fd) => fd_holds(fd, facts),
        Constraint::Id(id) => id_holds(id, facts),
        Constraint::Dc(dc) => !dc_violated(dc, facts),
        Constraint::Ltgd(l) => ltgd_holds(l, facts),
    }
}

pub fn consistent(constraints: &[Constraint], facts: &[&Fact]) -> bool {
    constraints.iter().all(|c| satisfies(c, facts))
}

fn subset<'a>(all: &'a [Fact], mask: u64) -> Vec<&'a Fact> {
    (0..all.len()).filter(|i| mask >> i & 1 == 1).map(|i| &all[i]).collect()
}

/// Maximal consistent subsets: consistent masks none of whose strict
/// supersets is consistent.
pub fn repairs(cdb: &ConstrainedDatabase) -> BTreeSet<FactSet> {
    let all: Vec<Fact> = cdb.facts().iter().cloned().collect();
    let n = all.len();
    assert!(n <= 16, "oracle is for small instances");
    let full = (1u64 << n) - 1;
    let ok: Vec<bool> = (0..=full).map(|m| consistent(cdb.constraints(), &subset(&all, m))).collect();
    let mut out = BTreeSet::new();
    for m in 0..=full {
        if !ok[m as usize] {
            continue;
        }
        let rest = full & !m;
        let mut sub = rest;
        let mut maximal = true;
        while sub != 0 {
            if ok[(m | sub) as usize] {
                maximal = false;
                break;
            }
            sub = (sub - 1) & rest;
        }
        if maximal {
            out.insert(subset(&all, m).into_iter().cloned().collect());
        }
    }
    out
}

/// Conflicts, minimal per constraint, of the FDs and DCs.
pub fn conflicts(cdb: &ConstrainedDatabase) -> BTreeSet<FactSet> {
    let all: Vec<Fact> = cdb.facts().iter().cloned().collect();
    let mut out = BTreeSet::new();
    for c in cdb.constraints() {
        let violated = |m: u64| match c {
            Constraint::Fd(fd) => !fd_holds(fd, &subset(&all, m)),
            Constraint::Dc(dc) => dc_violated(dc, &subset(&all, m)),
            _ => false,
        };
        let max_size = match c {
            Constraint::Fd(_) => 2,
            Constraint::Dc(dc) => dc.body.len(),
            _ => 0,
        };
        for m in 1..1u64 << all.len() {
            if m.count_ones() as usize > max_size || !violated(m) {
                continue;
            }
            let minimal = (0..all.len()).filter(|i| m >> i & 1 == 1).all(|i| !violated(m & !(1 << i)));
            if minimal {
                out.insert(subset(&all, m).into_iter().cloned().collect());
            }
        }
    }
    out
}

/// Attack list of a framework as (source indices, target index).
pub fn attacks(af: &Setaf) -> Vec<(Vec<usize>, usize)> {
    af.attacks().iter().map(|a| (a.sources.clone(), a.target)).collect()
}

fn within(sources: &[usize], s: u64) -> bool {
    sources.iter().all(|&b| s >> b & 1 == 1)
}

fn attacks_arg(att: &[(Vec<usize>, usize)], s: u64, a: usize) -> bool {
    att.iter().any(|(b, t)| *t == a && within(b, s))
}

fn conflict_free(att: &[(Vec<usize>, usize)], s: u64) -> bool {
    !att.iter().any(|(b, t)| s >> t & 1 == 1 && within(b, s))
}

fn admissible(att: &[(Vec<usize>, usize)], s: u64) -> bool {
    conflict_free(att, s)
        && att
            .iter()
            .filter(|(_, t)| s >> t & 1 == 1)
            .all(|(b, _)| b.iter().any(|&x| attacks_arg(att, s, x)))
}

fn stable(att: &[(Vec<usize>, usize)], n: usize, s: u64) -> bool {
    conflict_free(att, s) && (0..n).filter(|a| s >> a & 1 == 0).all(|a| attacks_arg(att, s, a))
}

fn maximal(sets: Vec<u64>) -> Vec<u64> {
    sets.iter()
        .copied()
        .filter(|&m| !sets.iter().any(|&o| o != m && o & m == m))
        .collect()
}

/// Extensions by filtering all 2^n subsets against the definitions.
pub fn extensions(af: &Setaf, sigma: SemanticsKind) -> BTreeSet<Vec<usize>> {
    let n = af.len();
    let att = attacks(af);
    let all = 0..1u64 << n;
    let sets: Vec<u64> = match sigma {
        SemanticsKind::ConflictFree => all.filter(|&s| conflict_free(&att, s)).collect(),
        SemanticsKind::Naive => maximal(all.filter(|&s| conflict_free(&att, s)).collect()),
        SemanticsKind::Admissible => all.filter(|&s| admissible(&att, s)).collect(),
        SemanticsKind::Preferred => maximal(all.filter(|&s| admissible(&att, s)).collect()),
        SemanticsKind::Stable => all.filter(|&s| stable(&att, n, s)).collect(),
    };
    sets.into_iter()
        .map(|s| (0..n).filter(|i| s >> i & 1 == 1).collect())
        .collect()
}

/// Literals as signed 1-based variable numbers.
pub type Clause = Vec<i32>;

fn clause_true(c: &Clause, assignment: u32) -> bool {
    c.iter().any(|&l| {
        let bit = assignment >> (l.unsigned_abs() - 1) & 1 == 1;
        if l > 0 {
            bit
        } else {
            !bit
        }
    })
}

pub fn satisfiable(num_vars: u32, clauses: &[Clause]) -> bool {
    (0..1u32 << num_vars).any(|a| clauses.iter().all(|c| clause_true(c, a)))
}

/// `∀ universals ∃ existentials clauses`, variables numbered from 1.
pub fn qbf_true(universals: &[u32], existentials: &[u32], clauses: &[Clause]) -> bool {
    let assign = |vars: &[u32], bits: u32| {
        vars.iter()
            .enumerate()
            .filter(|(i, _)| bits >> i & 1 == 1)
            .fold(0u32, |acc, (_, v)| acc | 1 << (v - 1))
    };
    (0..1u32 << universals.len()).all(|y| {
        (0..1u32 << existentials.len())
            .any(|z| clauses.iter().all(|c| clause_true(c, assign(universals, y) | assign(existentials, z))))
    })
}

/// A random framework over `a0..a{n-1}` with up to `max_attacks` attacks of
/// one to three sources.
pub fn random_setaf(seed: u64, max_args: usize, max_attacks: usize) -> Setaf {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_args);
    let names: Vec<String> = (0..n).map(|i| format!("a{i}")).collect();
    let k = rng.gen_range(0..=max_attacks);
    let mut atts: Vec<(Vec<&str>, &str)> = Vec::new();
    for _ in 0..k {
        let size = rng.gen_range(1..=3.min(n));
        let sources: Vec<&str> = (0..size).map(|_| names[rng.gen_range(0..n)].as_str()).collect();
        atts.push((sources, names[rng.gen_range(0..n)].as_str()));
    }
    Setaf::from_named(names.iter().map(String::as_str), atts).expect("valid framework")
}
