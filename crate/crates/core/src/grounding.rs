//! Constraint evaluation over databases: homomorphisms, satisfaction,
//! conflicts of denial constraints and supports of LTGDs/IDs.
//!
//! Variables range over the active domain. Enumeration follows the sorted
//! fact order, so every result here is deterministic.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::ops::ControlFlow;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    normalize_fd_to_dc, Atom, CmpOp, Comparison, ConstrainedDatabase, Constraint, Database,
    DenialConstraint, Fact, FunctionalDependency, InclusionDependency, Ltgd, Term,
};

pub type Assignment = BTreeMap<String, String>;

/// Facts grouped by relation, each group in sorted order.
#[derive(Debug, Clone, Default)]
pub struct FactIndex<'a> {
    by_relation: HashMap<&'a str, Vec<&'a Fact>>,
}

impl<'a> FactIndex<'a> {
    pub fn new<I: IntoIterator<Item = &'a Fact>>(facts: I) -> Self {
        let mut by_relation: HashMap<&'a str, Vec<&'a Fact>> = HashMap::new();
        for f in facts {
            by_relation.entry(f.relation.as_str()).or_default().push(f);
        }
        for group in by_relation.values_mut() {
            group.sort();
            group.dedup();
        }
        FactIndex { by_relation }
    }

    pub fn of(&self, relation: &str) -> &[&'a Fact] {
        self.by_relation.get(relation).map_or(&[], Vec::as_slice)
    }

    pub fn contains(&self, fact: &Fact) -> bool {
        self.of(&fact.relation).binary_search(&fact).is_ok()
    }
}

#[derive(Debug, Clone, Copy)]
enum CTerm<'a> {
    Var(usize),
    Const(&'a str),
}

#[derive(Debug)]
struct CAtom<'a> {
    relation: &'a str,
    terms: Vec<CTerm<'a>>,
}

/// A conjunction of atoms with variables numbered by first occurrence.
#[derive(Debug)]
struct Query<'a> {
    atoms: Vec<CAtom<'a>>,
    vars: Vec<&'a str>,
}

impl<'q> Query<'q> {
    fn new<I: IntoIterator<Item = &'q Atom>>(atoms: I) -> Self {
        let mut vars: Vec<&'q str> = Vec::new();
        let atoms = atoms
            .into_iter()
            .map(|a| CAtom {
                relation: &a.relation,
                terms: a
                    .terms
                    .iter()
                    .map(|t| match t {
                        Term::Var(v) => CTerm::Var(match vars.iter().position(|x| x == v) {
                            Some(i) => i,
                            None => {
                                vars.push(v);
                                vars.len() - 1
                            }
                        }),
                        Term::Const(c) => CTerm::Const(c),
                    })
                    .collect(),
            })
            .collect();
        Query { atoms, vars }
    }

    fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| *v == name)
    }

    fn empty_binding<'f>(&self) -> Vec<Option<&'f str>> {
        vec![None; self.vars.len()]
    }

    fn term_value<'x>(&self, t: &'x Term, binding: &[Option<&'x str>]) -> Option<&'x str> {
        match t {
            Term::Const(c) => Some(c),
            Term::Var(v) => self.var_index(v).and_then(|i| binding[i]),
        }
    }

    fn holds(&self, cmps: &[Comparison], binding: &[Option<&str>]) -> bool {
        cmps.iter().all(|c| {
            let l = self.term_value(&c.left, binding);
            let r = self.term_value(&c.right, binding);
            match c.op {
                CmpOp::Eq => l == r,
                CmpOp::Neq => l != r,
            }
        })
    }

    /// Depth-first match of atoms `i..` in order, calling `f` on each total
    /// match with the binding and the image facts (one per atom).
    fn search<'f, F>(
        &self,
        index: &FactIndex<'f>,
        i: usize,
        binding: &mut Vec<Option<&'f str>>,
        image: &mut Vec<&'f Fact>,
        f: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&[Option<&'f str>], &[&'f Fact]) -> ControlFlow<()>,
    {
        let Some(atom) = self.atoms.get(i) else {
            return f(binding, image);
        };
        let mut newly: Vec<usize> = Vec::with_capacity(atom.terms.len());
        for fact in index.of(atom.relation) {
            if fact.values.len() != atom.terms.len() {
                continue;
            }
            newly.clear();
            let mut ok = true;
            for (t, v) in atom.terms.iter().zip(&fact.values) {
                match *t {
                    CTerm::Const(c) => {
                        if c != v {
                            ok = false;
                            break;
                        }
                    }
                    CTerm::Var(x) => match binding[x] {
                        Some(b) if b != v => {
                            ok = false;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            binding[x] = Some(v);
                            newly.push(x);
                        }
                    },
                }
            }
            if ok {
                image.push(fact);
                let flow = self.search(index, i + 1, binding, image, f);
                image.pop();
                if flow.is_break() {
                    for &x in &newly {
                        binding[x] = None;
                    }
                    return flow;
                }
            }
            for &x in &newly {
                binding[x] = None;
            }
        }
        ControlFlow::Continue(())
    }

    fn for_each<'f, F>(&self, index: &FactIndex<'f>, mut binding: Vec<Option<&'f str>>, mut f: F) -> ControlFlow<()>
    where
        F: FnMut(&[Option<&'f str>], &[&'f Fact]) -> ControlFlow<()>,
    {
        let mut image = Vec::with_capacity(self.atoms.len());
        self.search(index, 0, &mut binding, &mut image, &mut f)
    }
}

/// All total assignments of the atoms' variables into `db` that extend
/// `fixed` and map every atom onto a fact, sorted lexicographically.
///
/// Variables bound in `fixed` but absent from the atoms are carried over.
pub fn enumerate_homomorphisms(atoms: &[Atom], db: &Database, fixed: &Assignment) -> Vec<Assignment> {
    let index = FactIndex::new(db.facts());
    let query = Query::new(atoms);
    let mut binding = query.empty_binding();
    for (i, v) in query.vars.iter().enumerate() {
        if let Some(val) = fixed.get(*v) {
            binding[i] = Some(val.as_str());
        }
    }
    let mut out = BTreeSet::new();
    let _ = query.for_each(&index, binding, |b, _| {
        let mut a = fixed.clone();
        for (name, val) in query.vars.iter().zip(b) {
            a.insert((*name).to_string(), val.expect("total binding").to_string());
        }
        out.insert(a);
        ControlFlow::Continue(())
    });
    out.into_iter().collect()
}

fn fd_pair_violates(fd: &FunctionalDependency, s: &Fact, t: &Fact) -> bool {
    s.relation == fd.relation
        && t.relation == fd.relation
        && fd.determinant.iter().all(|&p| s.value(p) == t.value(p))
        && fd.dependent.iter().any(|&p| s.value(p) != t.value(p))
}

/// Whether `{s, t}` violates the FD, checked directly on attribute values.
pub fn violates_fd(fd: &FunctionalDependency, s: &Fact, t: &Fact) -> bool {
    fd_pair_violates(fd, s, t)
}

fn satisfies_fd(index: &FactIndex<'_>, fd: &FunctionalDependency) -> bool {
    let mut seen: HashMap<Vec<&str>, Vec<&str>> = HashMap::new();
    for f in index.of(&fd.relation) {
        let key: Vec<&str> = fd.determinant.iter().map(|&p| f.value(p)).collect();
        let dep: Vec<&str> = fd.dependent.iter().map(|&p| f.value(p)).collect();
        match seen.get(&key) {
            Some(prev) if *prev != dep => return false,
            Some(_) => {}
            None => {
                seen.insert(key, dep);
            }
        }
    }
    true
}

fn satisfies_id(index: &FactIndex<'_>, id: &InclusionDependency) -> bool {
    let targets: HashSet<Vec<&str>> = index
        .of(&id.target)
        .iter()
        .map(|f| id.target_attrs.iter().map(|&p| f.value(p)).collect())
        .collect();
    index.of(&id.source).iter().all(|f| {
        let key: Vec<&str> = id.source_attrs.iter().map(|&p| f.value(p)).collect();
        targets.contains(&key)
    })
}

fn satisfies_dc(index: &FactIndex<'_>, dc: &DenialConstraint) -> bool {
    let q = Query::new(&dc.body);
    q.for_each(index, q.empty_binding(), |b, _| {
        if q.holds(&dc.comparisons, b) {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })
    .is_continue()
}

/// Body and head compiled together so that shared variables get the same
/// index; the body is atom 0.
struct LtgdQuery<'a> {
    body: Query<'a>,
    head: Query<'a>,
    /// For every head variable, the body variable index it shares (if any).
    shared: Vec<Option<usize>>,
}

impl<'a> LtgdQuery<'a> {
    fn new(l: &'a Ltgd) -> Self {
        let body = Query::new(std::iter::once(&l.body));
        let head = Query::new(&l.head);
        let shared = head.vars.iter().map(|v| body.var_index(v)).collect();
        LtgdQuery { body, head, shared }
    }

    fn head_binding<'f>(&self, body_binding: &[Option<&'f str>]) -> Vec<Option<&'f str>> {
        self.shared
            .iter()
            .map(|s| s.and_then(|i| body_binding[i]))
            .collect()
    }
}

fn satisfies_ltgd(index: &FactIndex<'_>, l: &Ltgd) -> bool {
    let q = LtgdQuery::new(l);
    q.body
        .for_each(index, q.body.empty_binding(), |b, _| {
            let hb = q.head_binding(b);
            let found = q.head.for_each(index, hb, |_, _| ControlFlow::Break(())).is_break();
            if found {
                ControlFlow::Continue(())
            } else {
                ControlFlow::Break(())
            }
        })
        .is_continue()
}

/// Satisfaction of one constraint by the indexed facts.
pub fn satisfies_index(index: &FactIndex<'_>, c: &Constraint) -> bool {
    match c {
        Constraint::Fd(fd) => satisfies_fd(index, fd),
        Constraint::Id(id) => satisfies_id(index, id),
        Constraint::Dc(dc) => satisfies_dc(index, dc),
        Constraint::Ltgd(l) => satisfies_ltgd(index, l),
    }
}

pub fn satisfies(db: &Database, c: &Constraint) -> bool {
    satisfies_index(&FactIndex::new(db.facts()), c)
}

/// Whether the facts satisfy every constraint.
pub fn is_consistent<'a, I: IntoIterator<Item = &'a Fact>>(facts: I, constraints: &[Constraint]) -> bool {
    let index = FactIndex::new(facts);
    constraints.iter().all(|c| satisfies_index(&index, c))
}

/// A subset-minimal set of facts violating the constraint at `witness`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Conflict {
    pub facts: BTreeSet<Fact>,
    pub witness: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConflictOptions {
    /// Also drop conflicts that strictly contain a conflict of another
    /// constraint.
    pub global_minimality: bool,
}

fn dc_images<'a>(index: &FactIndex<'a>, dc: &DenialConstraint, out: &mut BTreeSet<BTreeSet<&'a Fact>>) {
    let q = Query::new(&dc.body);
    let _ = q.for_each(index, q.empty_binding(), |b, image| {
        if q.holds(&dc.comparisons, b) {
            out.insert(image.iter().copied().collect());
        }
        ControlFlow::Continue(())
    });
}

fn minimal_sets<T: Ord + Clone>(sets: BTreeSet<BTreeSet<T>>) -> Vec<BTreeSet<T>> {
    let mut by_size: Vec<BTreeSet<T>> = sets.into_iter().collect();
    by_size.sort_by_key(BTreeSet::len);
    let mut kept: Vec<BTreeSet<T>> = Vec::new();
    for s in by_size {
        if !kept.iter().any(|k| k.is_subset(&s)) {
            kept.push(s);
        }
    }
    kept
}

/// Minimal violating fact sets for every FD and DC, FDs going through their
/// denial-constraint rewriting. Other constraint classes are skipped.
pub fn compute_conflicts(cdb: &ConstrainedDatabase) -> Vec<Conflict> {
    compute_conflicts_with(cdb, ConflictOptions::default())
}

pub fn compute_conflicts_with(cdb: &ConstrainedDatabase, opts: ConflictOptions) -> Vec<Conflict> {
    let index = FactIndex::new(cdb.facts());
    let schema = cdb.database().schema();
    let mut out: Vec<Conflict> = Vec::new();
    for (witness, c) in cdb.constraints().iter().enumerate() {
        let mut images = BTreeSet::new();
        match c {
            Constraint::Dc(dc) => dc_images(&index, dc, &mut images),
            Constraint::Fd(fd) => {
                let arity = schema.arity(&fd.relation).expect("validated relation");
                for dc in normalize_fd_to_dc(fd, arity) {
                    let mut part = BTreeSet::new();
                    dc_images(&index, &dc, &mut part);
                    images.extend(part);
                }
            }
            _ => continue,
        }
        for set in minimal_sets(images) {
            if set.len() == 1 {
                let fact = set.iter().next().expect("non-empty");
                log::warn!("constraint {witness} is violated by the single fact {fact}");
            }
            out.push(Conflict {
                facts: set.into_iter().cloned().collect(),
                witness,
            });
        }
    }
    if opts.global_minimality {
        let all: Vec<BTreeSet<Fact>> = out.iter().map(|c| c.facts.clone()).collect();
        out.retain(|c| !all.iter().any(|o| o.len() < c.facts.len() && o.is_subset(&c.facts)));
    }
    out.sort();
    out
}

/// Distinct fact sets among the conflicts, witnesses dropped.
pub fn conflict_family(conflicts: &[Conflict]) -> BTreeSet<BTreeSet<Fact>> {
    conflicts.iter().map(|c| c.facts.clone()).collect()
}

/// A set of facts witnessing the head of an LTGD (or ID) for one source fact.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SupportSet {
    pub facts: BTreeSet<Fact>,
}

/// Binding of the body atom's variables if `fact` is an instance of it.
pub fn match_atom(atom: &Atom, fact: &Fact) -> Option<Assignment> {
    if atom.relation != fact.relation || atom.terms.len() != fact.values.len() {
        return None;
    }
    let mut a = Assignment::new();
    for (t, v) in atom.terms.iter().zip(&fact.values) {
        match t {
            Term::Const(c) if c != v => return None,
            Term::Const(_) => {}
            Term::Var(x) => match a.get(x) {
                Some(b) if b != v => return None,
                Some(_) => {}
                None => {
                    a.insert(x.clone(), v.clone());
                }
            },
        }
    }
    Some(a)
}

/// Whether `fact` carries an obligation under `c` (its relation is the
/// source and, for LTGDs, it is an instance of the body atom).
pub fn is_source_fact(c: &Constraint, fact: &Fact) -> bool {
    match c {
        Constraint::Id(id) => fact.relation == id.source,
        Constraint::Ltgd(l) => match_atom(&l.body, fact).is_some(),
        _ => false,
    }
}

fn ltgd_supports_in<'a>(index: &FactIndex<'a>, l: &Ltgd, s: &'a Fact) -> BTreeSet<BTreeSet<&'a Fact>> {
    let q = LtgdQuery::new(l);
    let mut out = BTreeSet::new();
    let single = FactIndex::new([s]);
    let _ = q.body.for_each(&single, q.body.empty_binding(), |b, _| {
        let hb = q.head_binding(b);
        let _ = q.head.for_each(index, hb, |_, image| {
            out.insert(image.iter().copied().collect());
            ControlFlow::Continue(())
        });
        ControlFlow::Break(())
    });
    out
}

fn id_supports_in<'a>(index: &FactIndex<'a>, id: &InclusionDependency, s: &Fact) -> BTreeSet<BTreeSet<&'a Fact>> {
    let key: Vec<&str> = id.source_attrs.iter().map(|&p| s.value(p)).collect();
    index
        .of(&id.target)
        .iter()
        .filter(|t| id.target_attrs.iter().map(|&p| t.value(p)).eq(key.iter().copied()))
        .map(|t| BTreeSet::from([*t]))
        .collect()
}

/// Supports of `s` for the constraint at `constraint` (an ID or LTGD), one
/// per distinct head image, in sorted order.
///
/// With `minimize`, supports strictly containing another support are
/// dropped.
pub fn compute_supports(
    cdb: &ConstrainedDatabase,
    constraint: usize,
    s: &Fact,
    minimize: bool,
) -> Result<Vec<SupportSet>> {
    let c = cdb
        .constraints()
        .get(constraint)
        .ok_or_else(|| Error::Precondition(format!("no constraint with index {constraint}")))?;
    let index = FactIndex::new(cdb.facts());
    supports_in(&index, c, s, minimize)
}

pub(crate) fn supports_in<'a>(index: &FactIndex<'a>, c: &Constraint, s: &'a Fact, minimize: bool) -> Result<Vec<SupportSet>> {
    let sets: BTreeSet<BTreeSet<&Fact>> = match c {
        Constraint::Id(id) => {
            if s.relation != id.source {
                return Err(Error::Precondition(format!(
                    "{s} is not a fact of the source relation `{}`",
                    id.source
                )));
            }
            id_supports_in(index, id, s)
        }
        Constraint::Ltgd(l) => {
            if match_atom(&l.body, s).is_none() {
                return Err(Error::Precondition(format!(
                    "{s} is not an instance of the body atom {}",
                    l.body
                )));
            }
            ltgd_supports_in(index, l, s)
        }
        _ => {
            return Err(Error::Precondition(
                "supports are defined for IDs and LTGDs only".into(),
            ))
        }
    };
    let sets: Vec<BTreeSet<&Fact>> = if minimize {
        let mut m = minimal_sets(sets);
        m.sort();
        m
    } else {
        sets.into_iter().collect()
    };
    Ok(sets
        .into_iter()
        .map(|set| SupportSet {
            facts: set.into_iter().cloned().collect(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_instance;

    fn fixture(text: &str) -> crate::parser::ParsedInstance {
        parse_instance(text).unwrap()
    }

    const TWO_TABLES: &str = r#"
        @e1 E("E1","D1","Paderborn").
        @e2 E("E2","D2","Sheffield").
        @e3 E("E3","D2","Hanover").
        @d1 D("D1","Sales","Paderborn").
        @d2 D("D2","Marketing","Sheffield").
        @d3 D("D3","HR","Hanover").
        dc: ! E(X1,X2,X3), D(X2,X4,X5), X3 != X5.
        lav: D(X1,X2,X3) -> E(Y1,X1,Y2).
    "#;

    #[test]
    fn homomorphisms_of_single_atom() {
        let p = fixture(TWO_TABLES);
        let atoms = vec![Atom::new(
            "D",
            [Term::var("X1"), Term::var("X2"), Term::var("X3")],
        )];
        let hs = enumerate_homomorphisms(&atoms, p.instance.database(), &Assignment::new());
        assert_eq!(hs.len(), 3);
        assert_eq!(hs[0]["X2"], "Sales");
        let none = enumerate_homomorphisms(
            &[Atom::new("Q", [Term::var("X")])],
            p.instance.database(),
            &Assignment::new(),
        );
        assert!(none.is_empty());
    }

    #[test]
    fn fixed_bindings_restrict() {
        let p = fixture(TWO_TABLES);
        let atoms = vec![Atom::new("E", [Term::var("A"), Term::var("B"), Term::var("C")])];
        let fixed = Assignment::from([("B".to_string(), "D2".to_string())]);
        let hs = enumerate_homomorphisms(&atoms, p.instance.database(), &fixed);
        assert_eq!(hs.len(), 2);
    }

    #[test]
    fn both_constraints_violated_empty_satisfies() {
        let p = fixture(TWO_TABLES);
        let db = p.instance.database();
        for c in p.instance.constraints() {
            assert!(!satisfies(db, c));
            assert!(satisfies(&db.restrict([]), c));
        }
    }

    #[test]
    fn running_conflict_is_e3_d2() {
        let p = fixture(TWO_TABLES);
        let cs = compute_conflicts(&p.instance);
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].facts, BTreeSet::from([p.by_label("e3"), p.by_label("d2")]));
        assert_eq!(cs[0].witness, 0);
    }

    #[test]
    fn reflexive_id_supports_itself() {
        let p = fixture("@s R(a,b).\n@t R(c,d).\nid: R[1] <= R[1].");
        let s = p.by_label("s");
        let sup = compute_supports(&p.instance, 0, &s, false).unwrap();
        assert_eq!(sup, vec![SupportSet { facts: BTreeSet::from([s]) }]);
    }

    #[test]
    fn supports_reject_non_source_facts() {
        let p = fixture("@s R(a).\n@t S(a).\nid: R[1] <= S[1].");
        assert!(compute_supports(&p.instance, 0, &p.by_label("t"), false).is_err());
        let q = fixture("@s R(a,b).\nS(a).\nlav: R(X,X) -> S(X).");
        assert!(compute_supports(&q.instance, 0, &q.by_label("s"), false).is_err());
    }

    #[test]
    fn dc_with_repeated_atom_yields_singleton() {
        let p = fixture("@s R(a,a).\n@t R(a,b).\ndc: ! R(X,Y), R(Y,X).");
        let fam = conflict_family(&compute_conflicts(&p.instance));
        assert!(fam.contains(&BTreeSet::from([p.by_label("s")])));
    }
}
