//! Schemas, facts, databases and the four integrity-constraint classes.
//!
//! Attribute positions are 1-based everywhere in this module, matching the
//! text format. Constants are opaque strings: `"1"` and `"01"` are different
//! values and nothing is ever coerced.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("relation `{0}` is not part of the schema")]
    UnknownRelation(String),
    #[error("relation `{relation}` has arity {expected}, found {found} terms")]
    ArityMismatch {
        relation: String,
        expected: usize,
        found: usize,
    },
    #[error("relation name must be non-empty")]
    EmptyRelationName,
    #[error("relation `{0}` must have arity at least 1")]
    ZeroArity(String),
    #[error("position {position} is out of range for `{relation}`/{arity}")]
    PositionOutOfRange {
        relation: String,
        position: usize,
        arity: usize,
    },
    #[error("{0}")]
    Malformed(String),
    #[error("variable `{0}` in a comparison does not occur in any body atom")]
    UnsafeVariable(String),
}

/// Relation names with their arities.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Schema {
    relations: BTreeMap<String, usize>,
}

impl Schema {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a relation. Re-declaring with the same arity is a no-op.
    pub fn declare(&mut self, relation: &str, arity: usize) -> Result<(), ModelError> {
        if relation.is_empty() {
            return Err(ModelError::EmptyRelationName);
        }
        if arity == 0 {
            return Err(ModelError::ZeroArity(relation.to_string()));
        }
        match self.relations.get(relation) {
            Some(&known) if known != arity => Err(ModelError::ArityMismatch {
                relation: relation.to_string(),
                expected: known,
                found: arity,
            }),
            Some(_) => Ok(()),
            None => {
                self.relations.insert(relation.to_string(), arity);
                Ok(())
            }
        }
    }

    pub fn with(mut self, relation: &str, arity: usize) -> Self {
        self.declare(relation, arity).expect("valid relation declaration");
        self
    }

    pub fn arity(&self, relation: &str) -> Option<usize> {
        self.relations.get(relation).copied()
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, usize)> {
        self.relations.iter().map(|(r, a)| (r.as_str(), *a))
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    fn check_position(&self, relation: &str, position: usize) -> Result<(), ModelError> {
        let arity = self
            .arity(relation)
            .ok_or_else(|| ModelError::UnknownRelation(relation.to_string()))?;
        if position == 0 || position > arity {
            return Err(ModelError::PositionOutOfRange {
                relation: relation.to_string(),
                position,
                arity,
            });
        }
        Ok(())
    }
}

/// A ground atom. Facts are identified by content.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Fact {
    pub relation: String,
    pub values: Vec<String>,
}

impl Fact {
    pub fn new<R, I, V>(relation: R, values: I) -> Self
    where
        R: Into<String>,
        I: IntoIterator<Item = V>,
        V: Into<String>,
    {
        Fact {
            relation: relation.into(),
            values: values.into_iter().map(Into::into).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.values.len()
    }

    /// Value at a 1-based position.
    pub fn value(&self, position: usize) -> &str {
        &self.values[position - 1]
    }
}

/// Renders a constant so that the text format reads it back unchanged.
pub fn render_constant(value: &str) -> String {
    let bare_ident = value
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_lowercase())
        && value.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    let numeral = {
        let digits = value.strip_prefix('-').unwrap_or(value);
        !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit())
    };
    if bare_ident || numeral {
        value.to_string()
    } else {
        let mut out = String::with_capacity(value.len() + 2);
        out.push('"');
        for c in value.chars() {
            match c {
                '"' => out.push_str("\\\""),
                '\\' => out.push_str("\\\\"),
                '\n' => out.push_str("\\n"),
                '\t' => out.push_str("\\t"),
                _ => out.push(c),
            }
        }
        out.push('"');
        out
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.relation)?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(&render_constant(v))?;
        }
        f.write_str(")")
    }
}

/// A finite set of facts over a schema.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Database {
    schema: Schema,
    facts: BTreeSet<Fact>,
}

impl Database {
    /// Builds a database; duplicate facts collapse.
    pub fn new<I: IntoIterator<Item = Fact>>(schema: Schema, facts: I) -> Result<Self, ModelError> {
        let mut db = Database {
            schema,
            facts: BTreeSet::new(),
        };
        for fact in facts {
            db.insert(fact)?;
        }
        Ok(db)
    }

    pub fn insert(&mut self, fact: Fact) -> Result<bool, ModelError> {
        let arity = self
            .schema
            .arity(&fact.relation)
            .ok_or_else(|| ModelError::UnknownRelation(fact.relation.clone()))?;
        if arity != fact.arity() {
            return Err(ModelError::ArityMismatch {
                relation: fact.relation.clone(),
                expected: arity,
                found: fact.arity(),
            });
        }
        Ok(self.facts.insert(fact))
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn facts(&self) -> &BTreeSet<Fact> {
        &self.facts
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn contains(&self, fact: &Fact) -> bool {
        self.facts.contains(fact)
    }

    pub fn facts_of<'a>(&'a self, relation: &'a str) -> impl Iterator<Item = &'a Fact> + 'a {
        self.facts.iter().filter(move |f| f.relation == relation)
    }

    /// All constants occurring in some fact.
    pub fn active_domain(&self) -> BTreeSet<&str> {
        self.facts
            .iter()
            .flat_map(|f| f.values.iter().map(String::as_str))
            .collect()
    }

    /// The sub-database containing only `keep` (facts not in `self` are ignored).
    pub fn restrict<'a, I: IntoIterator<Item = &'a Fact>>(&self, keep: I) -> Database {
        Database {
            schema: self.schema.clone(),
            facts: keep
                .into_iter()
                .filter(|f| self.facts.contains(*f))
                .cloned()
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(value: impl Into<String>) -> Self {
        Term::Const(value.into())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(c) => f.write_str(&render_constant(c)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Atom {
    pub relation: String,
    pub terms: Vec<Term>,
}

impl Atom {
    pub fn new<R: Into<String>, I: IntoIterator<Item = Term>>(relation: R, terms: I) -> Self {
        Atom {
            relation: relation.into(),
            terms: terms.into_iter().collect(),
        }
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().filter_map(Term::as_var)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.relation)?;
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum CmpOp {
    Eq,
    Neq,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Comparison {
    pub left: Term,
    pub op: CmpOp,
    pub right: Term,
}

impl Comparison {
    pub fn neq(left: Term, right: Term) -> Self {
        Comparison {
            left,
            op: CmpOp::Neq,
            right,
        }
    }

    pub fn eq(left: Term, right: Term) -> Self {
        Comparison {
            left,
            op: CmpOp::Eq,
            right,
        }
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.op {
            CmpOp::Eq => "=",
            CmpOp::Neq => "!=",
        };
        write!(f, "{} {} {}", self.left, op, self.right)
    }
}

/// `relation: determinant -> dependent`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FunctionalDependency {
    pub relation: String,
    pub determinant: Vec<usize>,
    pub dependent: Vec<usize>,
}

/// `source[source_attrs] <= target[target_attrs]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct InclusionDependency {
    pub source: String,
    pub source_attrs: Vec<usize>,
    pub target: String,
    pub target_attrs: Vec<usize>,
}

/// `! body, comparisons`: no homomorphic image of the body may satisfy all
/// comparisons.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DenialConstraint {
    pub body: Vec<Atom>,
    pub comparisons: Vec<Comparison>,
}

/// Local-as-view TGD: a single body atom implies the head conjunction. Head
/// variables absent from the body are existential.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Ltgd {
    pub body: Atom,
    pub head: Vec<Atom>,
}

impl Ltgd {
    pub fn existential_variables(&self) -> BTreeSet<&str> {
        let body: BTreeSet<&str> = self.body.variables().collect();
        self.head
            .iter()
            .flat_map(Atom::variables)
            .filter(|v| !body.contains(v))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum Constraint {
    Fd(FunctionalDependency),
    Id(InclusionDependency),
    Dc(DenialConstraint),
    Ltgd(Ltgd),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ConstraintClass {
    Fd,
    Id,
    Dc,
    Ltgd,
}

impl Constraint {
    pub fn class(&self) -> ConstraintClass {
        match self {
            Constraint::Fd(_) => ConstraintClass::Fd,
            Constraint::Id(_) => ConstraintClass::Id,
            Constraint::Dc(_) => ConstraintClass::Dc,
            Constraint::Ltgd(_) => ConstraintClass::Ltgd,
        }
    }

    /// Relation whose facts carry an obligation (IDs and LTGDs only).
    pub fn source_relation(&self) -> Option<&str> {
        match self {
            Constraint::Id(id) => Some(&id.source),
            Constraint::Ltgd(l) => Some(&l.body.relation),
            _ => None,
        }
    }

    /// Checks the constraint against a schema.
    pub fn validate(&self, schema: &Schema) -> Result<(), ModelError> {
        match self {
            Constraint::Fd(fd) => {
                if fd.determinant.is_empty() || fd.dependent.is_empty() {
                    return Err(ModelError::Malformed(
                        "functional dependency needs non-empty determinant and dependent".into(),
                    ));
                }
                for &p in fd.determinant.iter().chain(&fd.dependent) {
                    schema.check_position(&fd.relation, p)?;
                }
                Ok(())
            }
            Constraint::Id(id) => {
                if id.source_attrs.is_empty() || id.source_attrs.len() != id.target_attrs.len() {
                    return Err(ModelError::Malformed(
                        "inclusion dependency needs equally long, non-empty attribute lists".into(),
                    ));
                }
                for &p in &id.source_attrs {
                    schema.check_position(&id.source, p)?;
                }
                for &p in &id.target_attrs {
                    schema.check_position(&id.target, p)?;
                }
                let distinct: BTreeSet<_> = id.target_attrs.iter().collect();
                if distinct.len() != id.target_attrs.len() {
                    return Err(ModelError::Malformed(
                        "inclusion dependency target attributes must be distinct".into(),
                    ));
                }
                Ok(())
            }
            Constraint::Dc(dc) => {
                if dc.body.is_empty() {
                    return Err(ModelError::Malformed("denial constraint needs a body atom".into()));
                }
                for atom in &dc.body {
                    check_atom(schema, atom)?;
                }
                let bound: BTreeSet<&str> = dc.body.iter().flat_map(Atom::variables).collect();
                for cmp in &dc.comparisons {
                    for term in [&cmp.left, &cmp.right] {
                        if let Term::Var(v) = term {
                            if !bound.contains(v.as_str()) {
                                return Err(ModelError::UnsafeVariable(v.clone()));
                            }
                        }
                    }
                }
                Ok(())
            }
            Constraint::Ltgd(l) => {
                if l.head.is_empty() {
                    return Err(ModelError::Malformed("LTGD needs at least one head atom".into()));
                }
                check_atom(schema, &l.body)?;
                for atom in &l.head {
                    check_atom(schema, atom)?;
                }
                Ok(())
            }
        }
    }
}

fn check_atom(schema: &Schema, atom: &Atom) -> Result<(), ModelError> {
    let arity = schema
        .arity(&atom.relation)
        .ok_or_else(|| ModelError::UnknownRelation(atom.relation.clone()))?;
    if arity != atom.terms.len() {
        return Err(ModelError::ArityMismatch {
            relation: atom.relation.clone(),
            expected: arity,
            found: atom.terms.len(),
        });
    }
    Ok(())
}

/// A database together with the constraints it should satisfy.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ConstrainedDatabase {
    database: Database,
    constraints: Vec<Constraint>,
}

impl ConstrainedDatabase {
    pub fn new(database: Database, constraints: Vec<Constraint>) -> Result<Self, ModelError> {
        for c in &constraints {
            c.validate(database.schema())?;
        }
        Ok(ConstrainedDatabase {
            database,
            constraints,
        })
    }

    pub fn database(&self) -> &Database {
        &self.database
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn facts(&self) -> &BTreeSet<Fact> {
        self.database.facts()
    }

    pub fn profile(&self) -> ConstraintProfile {
        classify(&self.constraints)
    }

    /// Same constraints over a subset of the facts.
    pub fn with_facts<'a, I: IntoIterator<Item = &'a Fact>>(&self, keep: I) -> ConstrainedDatabase {
        ConstrainedDatabase {
            database: self.database.restrict(keep),
            constraints: self.constraints.clone(),
        }
    }
}

/// Which constraint classes are present.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
pub struct ConstraintProfile {
    pub has_fd: bool,
    pub has_id: bool,
    pub has_dc: bool,
    pub has_ltgd: bool,
}

impl ConstraintProfile {
    pub const fn new(has_fd: bool, has_id: bool, has_dc: bool, has_ltgd: bool) -> Self {
        ConstraintProfile {
            has_fd,
            has_id,
            has_dc,
            has_ltgd,
        }
    }

    /// Only FDs and/or DCs.
    pub fn is_denial_only(&self) -> bool {
        !self.has_id && !self.has_ltgd
    }

    /// Only IDs and/or LTGDs.
    pub fn is_tgd_only(&self) -> bool {
        !self.has_fd && !self.has_dc
    }

    pub fn has_denials(&self) -> bool {
        self.has_fd || self.has_dc
    }

    pub fn has_tgds(&self) -> bool {
        self.has_id || self.has_ltgd
    }

    /// Only FDs and IDs, i.e. plain AFs suffice.
    pub fn is_plain(&self) -> bool {
        !self.has_dc && !self.has_ltgd
    }
}

impl fmt::Display for ConstraintProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = [
            (self.has_fd, "fd"),
            (self.has_id, "id"),
            (self.has_dc, "dc"),
            (self.has_ltgd, "lav"),
        ]
        .iter()
        .filter(|(on, _)| *on)
        .map(|(_, n)| *n)
        .collect();
        if names.is_empty() {
            f.write_str("none")
        } else {
            f.write_str(&names.join("+"))
        }
    }
}

impl std::str::FromStr for ConstraintProfile {
    type Err = String;

    /// Accepts the `Display` form, e.g. `fd+id`, `dc`, `lav` (or `ltgd`), `none`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = ConstraintProfile::default();
        if s == "none" {
            return Ok(p);
        }
        for part in s.split('+') {
            match part.trim() {
                "fd" => p.has_fd = true,
                "id" => p.has_id = true,
                "dc" => p.has_dc = true,
                "lav" | "ltgd" => p.has_ltgd = true,
                other => return Err(format!("unknown constraint class `{other}`")),
            }
        }
        Ok(p)
    }
}

pub fn classify(constraints: &[Constraint]) -> ConstraintProfile {
    let mut p = ConstraintProfile::default();
    for c in constraints {
        match c.class() {
            ConstraintClass::Fd => p.has_fd = true,
            ConstraintClass::Id => p.has_id = true,
            ConstraintClass::Dc => p.has_dc = true,
            ConstraintClass::Ltgd => p.has_ltgd = true,
        }
    }
    p
}

/// Rewrites an FD into denial constraints, one per dependent position.
///
/// Both atoms range over the FD's relation; the first uses `X1..Xn`, the
/// second shares `Xi` on determinant positions and uses `Yi` elsewhere.
pub fn normalize_fd_to_dc(fd: &FunctionalDependency, arity: usize) -> Vec<DenialConstraint> {
    let first: Vec<Term> = (1..=arity).map(|i| Term::var(format!("X{i}"))).collect();
    let second: Vec<Term> = (1..=arity)
        .map(|i| {
            if fd.determinant.contains(&i) {
                Term::var(format!("X{i}"))
            } else {
                Term::var(format!("Y{i}"))
            }
        })
        .collect();
    let body = vec![
        Atom::new(fd.relation.clone(), first.clone()),
        Atom::new(fd.relation.clone(), second.clone()),
    ];
    fd.dependent
        .iter()
        .map(|&j| DenialConstraint {
            body: body.clone(),
            comparisons: vec![Comparison::neq(first[j - 1].clone(), second[j - 1].clone())],
        })
        .collect()
}

/// Rewrites an ID into a single-head LTGD with fresh existential variables at
/// the target positions not covered by the ID.
pub fn normalize_id_to_ltgd(id: &InclusionDependency, schema: &Schema) -> Result<Ltgd, ModelError> {
    let source_arity = schema
        .arity(&id.source)
        .ok_or_else(|| ModelError::UnknownRelation(id.source.clone()))?;
    let target_arity = schema
        .arity(&id.target)
        .ok_or_else(|| ModelError::UnknownRelation(id.target.clone()))?;
    let body = Atom::new(
        id.source.clone(),
        (1..=source_arity).map(|i| Term::var(format!("X{i}"))),
    );
    let head_terms = (1..=target_arity).map(|j| {
        match id.target_attrs.iter().position(|&t| t == j) {
            Some(k) => Term::var(format!("X{}", id.source_attrs[k])),
            None => Term::var(format!("Y{j}")),
        }
    });
    Ok(Ltgd {
        body,
        head: vec![Atom::new(id.target.clone(), head_terms)],
    })
}
