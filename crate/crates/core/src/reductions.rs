//! Database instances encoding CNF satisfiability and ∀∃ quantified
//! formulas, plus a seeded generator of small random instances.
//!
//! Both encodings use one fixed set of FDs and IDs; only the facts depend on
//! the formula.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{
    ConstrainedDatabase, Constraint, ConstraintProfile, Database, Fact, FunctionalDependency,
    InclusionDependency, Schema,
};
use crate::parser::{parse_instance, ParsedInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    /// Index into the formula's variable list.
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, positive: true }
    }

    pub fn neg(var: usize) -> Self {
        Literal {
            var,
            positive: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    pub variables: Vec<String>,
    pub clauses: Vec<BTreeSet<Literal>>,
}

impl CnfFormula {
    /// Builds a formula from named literals such as `["x", "-y"]`.
    pub fn from_names<C, L>(clauses: C) -> Result<CnfFormula>
    where
        C: IntoIterator<Item = L>,
        L: IntoIterator<Item = &'static str>,
    {
        let mut variables: Vec<String> = Vec::new();
        let mut out = Vec::new();
        for clause in clauses {
            let mut lits = BTreeSet::new();
            for lit in clause {
                let (positive, name) = match lit.strip_prefix('-') {
                    Some(n) => (false, n),
                    None => (true, lit),
                };
                let var = match variables.iter().position(|v| v == name) {
                    Some(i) => i,
                    None => {
                        variables.push(name.to_string());
                        variables.len() - 1
                    }
                };
                lits.insert(Literal { var, positive });
            }
            out.push(lits);
        }
        let f = CnfFormula {
            variables,
            clauses: out,
        };
        f.validate()?;
        Ok(f)
    }

    fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for v in &self.variables {
            let ok = v.starts_with(|c: char| c.is_ascii_lowercase())
                && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok {
                return Err(Error::Precondition(format!(
                    "variable name `{v}` must be a lowercase identifier"
                )));
            }
            if RESERVED.contains(&v.as_str()) {
                return Err(Error::Precondition(format!("variable name `{v}` is reserved")));
            }
            if !seen.insert(v) {
                return Err(Error::Precondition(format!("variable `{v}` listed twice")));
            }
        }
        if self.clauses.is_empty() {
            return Err(Error::Precondition("formula needs at least one clause".into()));
        }
        for c in &self.clauses {
            if c.is_empty() {
                return Err(Error::Precondition("empty clause".into()));
            }
            if let Some(l) = c.iter().find(|l| l.var >= self.variables.len()) {
                return Err(Error::Precondition(format!("literal over unknown variable {}", l.var)));
            }
        }
        Ok(())
    }

    /// Variables that occur in some clause.
    pub fn used_variables(&self) -> BTreeSet<usize> {
        self.clauses.iter().flatten().map(|l| l.var).collect()
    }
}

/// `∀ universals ∃ existentials matrix`; the two lists index into
/// `matrix.variables` and partition it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QbfFormula {
    pub universals: Vec<usize>,
    pub existentials: Vec<usize>,
    pub matrix: CnfFormula,
}

impl QbfFormula {
    pub fn new(universals: Vec<usize>, existentials: Vec<usize>, matrix: CnfFormula) -> Result<Self> {
        matrix.validate()?;
        let mut all: Vec<usize> = universals.iter().chain(&existentials).copied().collect();
        all.sort_unstable();
        if all != (0..matrix.variables.len()).collect::<Vec<_>>() {
            return Err(Error::Precondition(
                "quantifier blocks must partition the variables".into(),
            ));
        }
        Ok(QbfFormula {
            universals,
            existentials,
            matrix,
        })
    }
}

/// Constants the encodings use themselves.
pub const RESERVED: [&str; 3] = ["sat", "exists", "d"];

/// Which question the SAT encoding answers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SatMode {
    /// Satisfiable iff the dummy fact is in some repair.
    SomeRepair,
    /// Satisfiable iff a non-empty repair exists (one extra ID).
    NonEmptyRepair,
}

impl FromStr for SatMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sr" => Ok(SatMode::SomeRepair),
            "rep" => Ok(SatMode::NonEmptyRepair),
            _ => Err(format!("unknown mode `{s}` (expected sr or rep)")),
        }
    }
}

/// An encoded instance with labelled facts and the fact whose acceptance
/// mirrors the formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub parsed: ParsedInstance,
    pub distinguished: Fact,
    pub distinguished_label: String,
}

impl Reduction {
    pub fn instance(&self) -> &ConstrainedDatabase {
        &self.parsed.instance
    }
}

fn fd(relation: &str, det: usize, dep: usize) -> Constraint {
    Constraint::Fd(FunctionalDependency {
        relation: relation.into(),
        determinant: vec![det],
        dependent: vec![dep],
    })
}

fn id(source: &str, s: usize, target: &str, t: usize) -> Constraint {
    Constraint::Id(InclusionDependency {
        source: source.into(),
        source_attrs: vec![s],
        target: target.into(),
        target_attrs: vec![t],
    })
}

/// The formula-independent constraints of the SAT encoding over
/// `F(t0,u0,t1,u1)` and `C(t2,u2)`.
pub fn sat_constraints(mode: SatMode) -> Vec<Constraint> {
    let mut c = vec![fd("F", 1, 2), id("F", 4, "C", 2), id("C", 2, "C", 1), id("C", 1, "F", 3)];
    if mode == SatMode::NonEmptyRepair {
        c.push(id("F", 4, "F", 3));
    }
    c
}

/// The formula-independent constraints of the QBF encoding over
/// `F(t0,u0,t1,te)`, `S(u1,ue)` and `C(t2,u2)`.
pub fn qbf_constraints() -> Vec<Constraint> {
    vec![
        fd("F", 1, 2),
        id("S", 1, "C", 2),
        id("C", 2, "C", 1),
        id("C", 1, "F", 3),
        id("F", 4, "S", 2),
    ]
}

struct Assembler {
    schema: Schema,
    labels: BTreeMap<String, Fact>,
}

impl Assembler {
    fn new(relations: &[(&str, usize)]) -> Self {
        let mut schema = Schema::new();
        for (r, a) in relations {
            schema.declare(r, *a).expect("fixed schema");
        }
        Assembler {
            schema,
            labels: BTreeMap::new(),
        }
    }

    fn add(&mut self, label: String, relation: &str, values: [&str; 2]) -> Fact {
        self.add_values(label, relation, &values)
    }

    fn add4(&mut self, label: String, values: [&str; 4]) -> Fact {
        self.add_values(label, "F", &values)
    }

    fn add_values(&mut self, label: String, relation: &str, values: &[&str]) -> Fact {
        let f = Fact::new(relation, values.iter().copied());
        self.labels.entry(label).or_insert_with(|| f.clone());
        f
    }

    fn finish(self, constraints: Vec<Constraint>, distinguished: Fact, label: &str) -> Result<Reduction> {
        let db = Database::new(self.schema, self.labels.values().cloned())?;
        let instance = ConstrainedDatabase::new(db, constraints)?;
        Ok(Reduction {
            parsed: ParsedInstance {
                instance,
                labels: self.labels,
            },
            distinguished,
            distinguished_label: label.to_string(),
        })
    }
}

fn literal_label(name: &str, positive: bool, clause: usize) -> String {
    format!("{}_{name}_{clause}", if positive { "p" } else { "n" })
}

/// Encodes `phi`. Facts are labelled `s_d` (the dummy), `p_<var>_<i>` /
/// `n_<var>_<i>` (literal in clause `i`), `s_c` and `s_<i>` (clause chain).
pub fn sat_to_instance(phi: &CnfFormula, mode: SatMode) -> Result<Reduction> {
    phi.validate()?;
    let used = phi.used_variables();
    if let Some(v) = (0..phi.variables.len()).find(|v| !used.contains(v)) {
        return Err(Error::Precondition(format!(
            "variable `{}` occurs in no clause",
            phi.variables[v]
        )));
    }
    let m = phi.clauses.len();
    let clause = |i: usize| format!("c{i}");
    let mut a = Assembler::new(&[("F", 4), ("C", 2)]);
    let s_d = a.add4("s_d".into(), ["sat", "sat", "sat", "sat"]);
    for (i, c) in phi.clauses.iter().enumerate() {
        let ci = clause(i + 1);
        for l in c {
            let name = &phi.variables[l.var];
            let bit = if l.positive { "1" } else { "0" };
            a.add4(literal_label(name, l.positive, i + 1), [name, bit, &ci, "sat"]);
        }
    }
    a.add("s_c".into(), "C", ["sat", &clause(1)]);
    for i in 1..m {
        a.add(format!("s_{i}"), "C", [&clause(i), &clause(i + 1)]);
    }
    a.add(format!("s_{m}"), "C", [&clause(m), "sat"]);
    a.finish(sat_constraints(mode), s_d, "s_d")
}

/// Encodes `phi`. Facts are labelled `y_d`, `s_d`, `c_d` (dummies), `s_sat`
/// (the distinguished fact), `p_<var>_<i>` / `n_<var>_<i>` (literal in
/// clause `i`, `0` for universal literals in no clause) and `s_<i>`.
pub fn qbf_to_instance(phi: &QbfFormula) -> Result<Reduction> {
    let QbfFormula {
        universals,
        existentials,
        matrix,
    } = phi;
    matrix.validate()?;
    let m = matrix.clauses.len();
    let clause = |i: usize| format!("c{i}");
    let mut a = Assembler::new(&[("F", 4), ("S", 2), ("C", 2)]);
    a.add4("y_d".into(), ["d", "d", "d", "d"]);
    a.add("s_d".into(), "S", ["d", "d"]);
    a.add("c_d".into(), "C", ["d", "d"]);
    let s_sat = a.add("s_sat".into(), "S", [&clause(1), "exists"]);
    for (block, tag) in [(universals, "d"), (existentials, "exists")] {
        for &v in block {
            let name = &matrix.variables[v];
            for positive in [true, false] {
                let bit = if positive { "1" } else { "0" };
                let mut occurs = false;
                for (i, c) in matrix.clauses.iter().enumerate() {
                    if c.contains(&Literal { var: v, positive }) {
                        occurs = true;
                        a.add4(literal_label(name, positive, i + 1), [name, bit, &clause(i + 1), tag]);
                    }
                }
                if !occurs && tag == "d" {
                    a.add4(literal_label(name, positive, 0), [name, bit, "d", "d"]);
                }
            }
        }
    }
    for i in 1..m {
        a.add(format!("s_{i}"), "C", [&clause(i), &clause(i + 1)]);
    }
    a.add(format!("s_{m}"), "C", [&clause(m), &clause(1)]);
    a.finish(qbf_constraints(), s_sat, "s_sat")
}

fn dimacs_error(line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        format: "DIMACS",
        line,
        message: message.into(),
    }
}

struct RawCnf {
    num_vars: usize,
    clauses: Vec<Vec<i64>>,
    /// Quantifier lines in order: (`'a'` or `'e'`, variables, line number).
    prefix: Vec<(char, Vec<usize>, usize)>,
}

fn read_dimacs(text: &str, allow_prefix: bool) -> Result<RawCnf> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut prefix = Vec::new();
    let mut last_line = 0;
    for (ln, line) in text.lines().enumerate() {
        let ln = ln + 1;
        last_line = ln;
        let t = line.trim();
        if t.is_empty() || t.starts_with('c') || t.starts_with('%') {
            continue;
        }
        if let Some(rest) = t.strip_prefix('p') {
            if header.is_some() {
                return Err(dimacs_error(ln, "second problem line"));
            }
            let parts: Vec<&str> = rest.split_whitespace().collect();
            match parts.as_slice() {
                ["cnf", v, c] => {
                    let v = v.parse().map_err(|_| dimacs_error(ln, "bad variable count"))?;
                    let c = c.parse().map_err(|_| dimacs_error(ln, "bad clause count"))?;
                    header = Some((v, c));
                }
                _ => return Err(dimacs_error(ln, "expected `p cnf <vars> <clauses>`")),
            }
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(dimacs_error(ln, "clause before the problem line"));
        };
        let quant = t.chars().next().filter(|c| *c == 'a' || *c == 'e');
        let body = match quant {
            Some(q) => {
                if !allow_prefix {
                    return Err(dimacs_error(ln, "quantifier line in a plain CNF file"));
                }
                if !clauses.is_empty() || !current.is_empty() {
                    return Err(dimacs_error(ln, "quantifier line after clauses"));
                }
                prefix.push((q, Vec::new(), ln));
                &t[1..]
            }
            None => t,
        };
        let mut terminated = false;
        for tok in body.split_whitespace() {
            if terminated {
                return Err(dimacs_error(ln, "tokens after the terminating 0"));
            }
            let lit: i64 = tok
                .parse()
                .map_err(|_| dimacs_error(ln, format!("expected an integer literal, found `{tok}`")))?;
            if lit.unsigned_abs() as usize > num_vars {
                return Err(dimacs_error(ln, format!("literal {lit} exceeds the declared {num_vars} variables")));
            }
            if quant.is_some() {
                if lit < 0 {
                    return Err(dimacs_error(ln, "negative variable in a quantifier line"));
                }
                if lit == 0 {
                    terminated = true;
                } else {
                    prefix.last_mut().expect("pushed above").1.push(lit as usize);
                }
            } else if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                current.push(lit);
            }
        }
        if quant.is_some() && !terminated {
            return Err(dimacs_error(ln, "quantifier line must end with 0"));
        }
    }
    let Some((num_vars, num_clauses)) = header else {
        return Err(dimacs_error(last_line.max(1), "missing problem line"));
    };
    if !current.is_empty() {
        return Err(dimacs_error(last_line, "last clause is not terminated by 0"));
    }
    if clauses.len() != num_clauses {
        return Err(dimacs_error(
            last_line.max(1),
            format!("header announces {num_clauses} clauses, found {}", clauses.len()),
        ));
    }
    Ok(RawCnf {
        num_vars,
        clauses,
        prefix,
    })
}

fn cnf_from_raw(raw: &RawCnf, vars: &[usize]) -> Result<CnfFormula> {
    let pos = |v: usize| vars.iter().position(|&x| x == v).expect("variable collected");
    let f = CnfFormula {
        variables: vars.iter().map(|v| format!("x{v}")).collect(),
        clauses: raw
            .clauses
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&l| Literal {
                        var: pos(l.unsigned_abs() as usize),
                        positive: l > 0,
                    })
                    .collect()
            })
            .collect(),
    };
    f.validate()?;
    Ok(f)
}

/// Reads DIMACS CNF. Variable `k` is named `xk`; only variables occurring in
/// some clause become formula variables.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let raw = read_dimacs(text, false)?;
    let vars: BTreeSet<usize> = raw.clauses.iter().flatten().map(|l| l.unsigned_abs() as usize).collect();
    let vars: Vec<usize> = vars.into_iter().collect();
    cnf_from_raw(&raw, &vars)
}

/// Reads QDIMACS with an `a`-block followed by an `e`-block (either may be
/// absent). Other prefixes and free variables are rejected.
pub fn parse_qdimacs(text: &str) -> Result<QbfFormula> {
    let raw = read_dimacs(text, true)?;
    let mut universals: Vec<usize> = Vec::new();
    let mut existentials: Vec<usize> = Vec::new();
    let mut seen_e = false;
    for (i, (q, vars, ln)) in raw.prefix.iter().enumerate() {
        match q {
            'a' if seen_e => return Err(dimacs_error(*ln, "only ∀∃ prefixes are supported; found ∃ before ∀")),
            'a' if i > 0 => return Err(dimacs_error(*ln, "consecutive universal blocks")),
            'a' => universals.extend(vars),
            _ if seen_e => return Err(dimacs_error(*ln, "consecutive existential blocks")),
            _ => {
                seen_e = true;
                existentials.extend(vars);
            }
        }
    }
    let mut all: BTreeSet<usize> = BTreeSet::new();
    for v in universals.iter().chain(&existentials) {
        if !all.insert(*v) {
            return Err(dimacs_error(1, format!("variable {v} is quantified twice")));
        }
    }
    if let Some(free) = raw
        .clauses
        .iter()
        .flatten()
        .map(|l| l.unsigned_abs() as usize)
        .find(|v| !all.contains(v))
    {
        return Err(dimacs_error(1, format!("variable {free} is not quantified")));
    }
    let _ = raw.num_vars;
    let order: Vec<usize> = universals.iter().chain(&existentials).copied().collect();
    let matrix = cnf_from_raw(&raw, &order)?;
    let u = universals.len();
    QbfFormula::new((0..u).collect(), (u..order.len()).collect(), matrix)
}

/// Writes DIMACS CNF with variables numbered by their index plus one.
pub fn to_dimacs(phi: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", phi.variables.len(), phi.clauses.len());
    for c in &phi.clauses {
        for l in c {
            let v = l.var as i64 + 1;
            out.push_str(&format!("{} ", if l.positive { v } else { -v }));
        }
        out.push_str("0\n");
    }
    out
}

/// Writes QDIMACS for a ∀∃ formula.
pub fn to_qdimacs(phi: &QbfFormula) -> String {
    let m = &phi.matrix;
    let mut out = format!("p cnf {} {}\n", m.variables.len(), m.clauses.len());
    for (q, block) in [('a', &phi.universals), ('e', &phi.existentials)] {
        if !block.is_empty() {
            out.push(q);
            for v in block {
                out.push_str(&format!(" {}", v + 1));
            }
            out.push_str(" 0\n");
        }
    }
    for c in &m.clauses {
        for l in c {
            let v = l.var as i64 + 1;
            out.push_str(&format!("{} ", if l.positive { v } else { -v }));
        }
        out.push_str("0\n");
    }
    out
}

const RANDOM_SCHEMA: &str = "rel R/2.\nrel S/2.\nrel T/3.\n";

const FD_POOL: [&str; 4] = [
    "fd: R: [1] -> [2].",
    "fd: S: [2] -> [1].",
    "fd: T: [1] -> [3].",
    "fd: T: [1,2] -> [3].",
];

const ID_POOL: [&str; 5] = [
    "id: R[2] <= S[1].",
    "id: S[1] <= R[1].",
    "id: T[3] <= R[1].",
    "id: R[1] <= R[2].",
    "id: S[1,2] <= T[1,2].",
];

const DC_POOL: [&str; 5] = [
    "dc: ! R(X,Y), S(Y,Z), X != Z.",
    "dc: ! R(X,Y), R(Y,X), X != Y.",
    "dc: ! T(X,Y,Z), R(Z,X).",
    "dc: ! S(X,Y), T(Y,Z,W), S(W,X), X != Z.",
    "dc: ! T(X,Y,Z), T(X,Y,W), Z != W.",
];

const LTGD_POOL: [&str; 5] = [
    "lav: R(X,Y) -> S(Y,Z).",
    "lav: S(X,Y) -> R(Y,Z), T(X,Z,W).",
    "lav: T(X,Y,Z) -> R(X,Y).",
    "lav: R(X,Y) -> S(X,Z), S(Z,Y).",
    "lav: S(X,X) -> R(X,Y).",
];

const DOMAIN: [&str; 3] = ["a", "b", "c"];

/// A reproducible random instance over `R/2, S/2, T/3` with constants
/// `a, b, c`, holding `budget` distinct facts (at most 45) and one or two
/// constraints of each class flagged in `profile`.
pub fn random_instance(seed: u64, profile: ConstraintProfile, budget: usize) -> ConstrainedDatabase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut text = String::from(RANDOM_SCHEMA);
    let pools: [(bool, &[&str]); 4] = [
        (profile.has_fd, &FD_POOL),
        (profile.has_id, &ID_POOL),
        (profile.has_dc, &DC_POOL),
        (profile.has_ltgd, &LTGD_POOL),
    ];
    for (on, pool) in pools {
        if on {
            let k = rng.gen_range(1..=2);
            for c in pool.choose_multiple(&mut rng, k) {
                text.push_str(c);
                text.push('\n');
            }
        }
    }
    let schema = parse_instance(&text).expect("generator templates parse");
    let cdb = schema.instance;
    let mentioned: BTreeSet<&str> = cdb
        .constraints()
        .iter()
        .flat_map(relations_of)
        .collect();
    let relations: Vec<(&str, usize)> = cdb
        .database()
        .schema()
        .relations()
        .filter(|(r, _)| mentioned.is_empty() || mentioned.contains(r))
        .collect();
    let capacity: usize = relations.iter().map(|(_, a)| DOMAIN.len().pow(*a as u32)).sum();
    let target = budget.max(1).min(capacity);
    let mut facts = BTreeSet::new();
    while facts.len() < target {
        let (rel, arity) = relations[rng.gen_range(0..relations.len())];
        let values: Vec<&str> = (0..arity).map(|_| DOMAIN[rng.gen_range(0..DOMAIN.len())]).collect();
        facts.insert(Fact::new(rel, values));
    }
    let db = Database::new(cdb.database().schema().clone(), facts).expect("facts match the schema");
    ConstrainedDatabase::new(db, cdb.constraints().to_vec()).expect("constraints validated by parsing")
}

fn relations_of(c: &Constraint) -> Vec<&str> {
    match c {
        Constraint::Fd(fd) => vec![&fd.relation],
        Constraint::Id(id) => vec![&id.source, &id.target],
        Constraint::Dc(dc) => dc.body.iter().map(|a| a.relation.as_str()).collect(),
        Constraint::Ltgd(l) => std::iter::once(&l.body).chain(&l.head).map(|a| a.relation.as_str()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sat_instance_shape() {
        let phi = CnfFormula::from_names([vec!["x", "y"], vec!["-x", "-y"], vec!["-x", "y"]]).unwrap();
        let r = sat_to_instance(&phi, SatMode::SomeRepair).unwrap();
        let labels: Vec<&str> = r.parsed.labels.keys().map(String::as_str).collect();
        assert_eq!(
            labels,
            ["n_x_2", "n_x_3", "n_y_2", "p_x_1", "p_y_1", "p_y_3", "s_1", "s_2", "s_3", "s_c", "s_d"]
        );
        assert_eq!(r.parsed.by_label("n_x_2"), Fact::new("F", ["x", "0", "c2", "sat"]));
        assert_eq!(r.parsed.by_label("s_3"), Fact::new("C", ["c3", "sat"]));
        assert_eq!(r.distinguished, Fact::new("F", ["sat"; 4]));
    }

    fn labelled(r: &Reduction, labels: &[&str]) -> BTreeSet<Fact> {
        labels.iter().map(|l| r.parsed.by_label(l)).collect()
    }

    #[test]
    fn sat_worked_repair() {
        let phi = CnfFormula::from_names([vec!["x", "y"], vec!["-x", "-y"], vec!["-x", "y"]]).unwrap();
        let r = sat_to_instance(&phi, SatMode::SomeRepair).unwrap();
        let reps = crate::repairs::all_repairs(r.instance()).unwrap();
        let with_dummy: Vec<_> = reps.iter().filter(|rep| rep.contains(&r.distinguished)).collect();
        let expected = labelled(&r, &["s_d", "n_x_2", "n_x_3", "p_y_1", "p_y_3", "s_c", "s_1", "s_2", "s_3"]);
        assert_eq!(with_dummy, vec![&expected]);
    }

    #[test]
    fn qbf_worked_repair() {
        let matrix = CnfFormula::from_names([
            vec!["x", "y", "z"],
            vec!["y", "-z", "-w"],
            vec!["y", "z", "w"],
        ])
        .unwrap();
        let phi = QbfFormula::new(vec![0, 1], vec![2, 3], matrix).unwrap();
        let r = qbf_to_instance(&phi).unwrap();
        assert_eq!(r.instance().facts().len(), 18);
        let reps = crate::repairs::all_repairs(r.instance()).unwrap();
        let expected = labelled(
            &r,
            &["n_x_0", "n_y_0", "y_d", "s_d", "c_d", "p_z_1", "p_z_3", "n_w_2", "s_sat", "s_1", "s_2", "s_3"],
        );
        assert!(reps.contains(&expected));
        assert!(reps.iter().all(|rep| rep.contains(&r.distinguished)));
    }

    #[test]
    fn rejects_unused_and_reserved_variables() {
        let mut phi = CnfFormula::from_names([vec!["x"]]).unwrap();
        phi.variables.push("y".into());
        assert!(sat_to_instance(&phi, SatMode::SomeRepair).is_err());
        assert!(CnfFormula::from_names([vec!["sat"]]).is_err());
        assert!(CnfFormula::from_names(Vec::<Vec<&str>>::new()).is_err());
    }

    #[test]
    fn dimacs_round_trip() {
        let phi = parse_dimacs("c demo\np cnf 3 2\n1 -3 0\n2\n3 0\n").unwrap();
        assert_eq!(phi.variables, ["x1", "x2", "x3"]);
        assert_eq!(phi.clauses.len(), 2);
        assert_eq!(parse_dimacs(&to_dimacs(&phi)).unwrap(), phi);
        assert!(parse_dimacs("p cnf 1 2\n1 0\n").is_err());
        assert!(parse_dimacs("p cnf 1 1\n2 0\n").is_err());
    }

    #[test]
    fn qdimacs_prefix_rules() {
        let q = parse_qdimacs("p cnf 3 1\na 1 0\ne 2 3 0\n1 2 -3 0\n").unwrap();
        assert_eq!(q.universals, [0]);
        assert_eq!(q.existentials, [1, 2]);
        assert_eq!(parse_qdimacs(&to_qdimacs(&q)).unwrap(), q);
        assert!(parse_qdimacs("p cnf 2 1\ne 1 0\na 2 0\n1 2 0\n").is_err());
        assert!(parse_qdimacs("p cnf 2 1\na 1 0\n1 2 0\n").is_err());
        assert!(parse_qdimacs("p cnf 2 1\na 1 0\na 2 0\n1 2 0\n").is_err());
        let only_e = parse_qdimacs("p cnf 1 1\ne 1 0\n1 0\n").unwrap();
        assert!(only_e.universals.is_empty());
    }

    #[test]
    fn random_instances_are_reproducible() {
        let p = ConstraintProfile::new(true, false, false, false);
        assert_eq!(random_instance(1, p, 6), random_instance(1, p, 6));
        assert_eq!(random_instance(1, p, 6).facts().len(), 6);
        assert_eq!(random_instance(9, p, 1).facts().len(), 1);
        let mixed = ConstraintProfile::new(true, true, true, true);
        assert_eq!(random_instance(3, mixed, 5).profile(), mixed);
    }
}
