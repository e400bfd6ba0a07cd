//! Reader and writer for the `.cdb` text format.
//!
//! ```text
//! % comment
//! rel E(emp, dept, loc).          % or: rel E/3.
//! @e1 E("E1", "D1", paderborn).
//! fd:  E: [1] -> [2].
//! id:  E[2] <= D[1].
//! dc:  ! E(X1,X2,X3), D(X2,X4,X5), X3 != X5.
//! lav: D(X1,X2,X3) -> E(Y1,X1,Y2).
//! ```
//!
//! Identifiers starting with an uppercase letter or `_` are variables.
//! Constants are lowercase identifiers, integers, or double-quoted strings.
//! Positions in `fd:`/`id:` lists are 1-based or attribute names from a
//! `rel R(a, b, ...)` declaration. The schema is inferred from first use
//! unless declared; declarations win.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{
    Atom, CmpOp, Comparison, ConstrainedDatabase, Constraint, Database,
    DenialConstraint, Fact, FunctionalDependency, InclusionDependency, Ltgd, Schema, Term,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SourceErrorKind {
    Syntax,
    UnknownRelation,
    ArityMismatch,
    UnsafeVariable,
    DuplicateLabel,
}

impl fmt::Display for SourceErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SourceErrorKind::Syntax => "syntax error",
            SourceErrorKind::UnknownRelation => "unknown relation",
            SourceErrorKind::ArityMismatch => "arity mismatch",
            SourceErrorKind::UnsafeVariable => "unsafe variable",
            SourceErrorKind::DuplicateLabel => "duplicate label",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}: {message}")]
pub struct SourceError {
    pub line: usize,
    pub column: usize,
    pub kind: SourceErrorKind,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
struct Pos {
    line: usize,
    column: usize,
}

impl Pos {
    fn error(self, kind: SourceErrorKind, message: impl Into<String>) -> SourceError {
        SourceError {
            line: self.line,
            column: self.column,
            kind,
            message: message.into(),
        }
    }

    fn syntax(self, message: impl Into<String>) -> SourceError {
        self.error(SourceErrorKind::Syntax, message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(String),
    Str(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Dot,
    Colon,
    Arrow,
    Le,
    Neq,
    Eq,
    Bang,
    At,
    Slash,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(s) => format!("integer `{s}`"),
            Tok::Str(_) => "string literal".to_string(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Neq => "`!=`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Bang => "`!`".into(),
            Tok::At => "`@`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn is_variable_name(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_uppercase() || c == '_')
}

fn tokenize(text: &str) -> Result<Vec<(Tok, Pos)>, SourceError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let mut line = 1;
    let mut column = 1;

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else if c.is_some() {
                column += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let pos = Pos { line, column };
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '%' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                bump!();
            }
            continue;
        }
        let tok = match c {
            '(' | ')' | '[' | ']' | ',' | '.' | ':' | '=' | '@' | '/' => {
                bump!();
                match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBrack,
                    ']' => Tok::RBrack,
                    ',' => Tok::Comma,
                    '.' => Tok::Dot,
                    ':' => Tok::Colon,
                    '=' => Tok::Eq,
                    '@' => Tok::At,
                    _ => Tok::Slash,
                }
            }
            '!' => {
                bump!();
                if chars.peek() == Some(&'=') {
                    bump!();
                    Tok::Neq
                } else {
                    Tok::Bang
                }
            }
            '<' => {
                bump!();
                if chars.peek() == Some(&'=') {
                    bump!();
                    Tok::Le
                } else {
                    return Err(pos.syntax("expected `<=`"));
                }
            }
            '-' => {
                bump!();
                match chars.peek() {
                    Some('>') => {
                        bump!();
                        Tok::Arrow
                    }
                    Some(d) if d.is_ascii_digit() => {
                        let mut s = String::from("-");
                        while let Some(&d) = chars.peek() {
                            if !d.is_ascii_digit() {
                                break;
                            }
                            s.push(d);
                            bump!();
                        }
                        Tok::Int(s)
                    }
                    _ => return Err(pos.syntax("expected `->` or a negative integer")),
                }
            }
            '"' => {
                bump!();
                let mut s = String::new();
                loop {
                    let here = Pos { line, column };
                    match bump!() {
                        None => return Err(pos.syntax("unterminated string literal")),
                        Some('"') => break,
                        Some('\\') => match bump!() {
                            Some('"') => s.push('"'),
                            Some('\\') => s.push('\\'),
                            Some('n') => s.push('\n'),
                            Some('t') => s.push('\t'),
                            _ => return Err(here.syntax("invalid escape sequence")),
                        },
                        Some(ch) => s.push(ch),
                    }
                }
                Tok::Str(s)
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if !d.is_ascii_digit() {
                        break;
                    }
                    s.push(d);
                    bump!();
                }
                if chars.peek().is_some_and(|c| c.is_ascii_alphabetic() || *c == '_') {
                    return Err(pos.syntax("identifiers may not start with a digit"));
                }
                Tok::Int(s)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if !(d.is_ascii_alphanumeric() || d == '_') {
                        break;
                    }
                    s.push(d);
                    bump!();
                }
                Tok::Ident(s)
            }
            other => return Err(pos.syntax(format!("unexpected character {other:?}"))),
        };
        out.push((tok, pos));
    }
    out.push((Tok::Eof, Pos { line, column }));
    Ok(out)
}

#[derive(Debug)]
enum PosRef {
    Index(usize, Pos),
    Name(String, Pos),
}

#[derive(Debug)]
struct AtomAst {
    relation: String,
    pos: Pos,
    terms: Vec<(Term, Pos)>,
}

#[derive(Debug)]
enum Stmt {
    Decl {
        relation: String,
        pos: Pos,
        arity: usize,
        attrs: Option<Vec<String>>,
    },
    Fact {
        label: Option<(String, Pos)>,
        relation: String,
        pos: Pos,
        values: Vec<String>,
    },
    Fd {
        pos: Pos,
        relation: String,
        rel_pos: Pos,
        determinant: Vec<PosRef>,
        dependent: Vec<PosRef>,
    },
    Id {
        pos: Pos,
        source: String,
        source_pos: Pos,
        source_attrs: Vec<PosRef>,
        target: String,
        target_pos: Pos,
        target_attrs: Vec<PosRef>,
    },
    Dc {
        pos: Pos,
        atoms: Vec<AtomAst>,
        comparisons: Vec<((Term, Pos), CmpOp, (Term, Pos))>,
    },
    Lav {
        pos: Pos,
        body: AtomAst,
        head: Vec<AtomAst>,
    },
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.at + offset).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> SourceError {
        self.pos()
            .syntax(format!("expected {wanted}, found {}", self.peek().describe()))
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<Pos, SourceError> {
        if *self.peek() == tok {
            Ok(self.next().1)
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn ident(&mut self, wanted: &str) -> Result<(String, Pos), SourceError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let p = self.next().1;
                Ok((s, p))
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    fn relation_name(&mut self) -> Result<(String, Pos), SourceError> {
        self.ident("a relation name")
    }

    fn statements(&mut self) -> Result<Vec<Stmt>, SourceError> {
        let mut out = Vec::new();
        while *self.peek() != Tok::Eof {
            out.push(self.statement()?);
        }
        Ok(out)
    }

    fn statement(&mut self) -> Result<Stmt, SourceError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::At => {
                self.next();
                let (label, lpos) = self.ident("a label after `@`")?;
                self.fact(Some((label, lpos)))
            }
            Tok::Ident(word) => {
                let next = self.peek_at(1).clone();
                match (word.as_str(), next) {
                    ("rel", Tok::Ident(_)) => {
                        self.next();
                        self.decl()
                    }
                    ("fd", Tok::Colon) => {
                        self.next();
                        self.next();
                        self.fd(pos)
                    }
                    ("id", Tok::Colon) => {
                        self.next();
                        self.next();
                        self.id(pos)
                    }
                    ("dc", Tok::Colon) => {
                        self.next();
                        self.next();
                        self.dc(pos)
                    }
                    ("lav", Tok::Colon) => {
                        self.next();
                        self.next();
                        self.lav(pos)
                    }
                    (_, Tok::Colon) => Err(pos.syntax(format!(
                        "unknown constraint keyword `{word}:` (expected fd, id, dc or lav)"
                    ))),
                    _ => self.fact(None),
                }
            }
            _ => Err(self.unexpected("a declaration, fact or constraint")),
        }
    }

    fn decl(&mut self) -> Result<Stmt, SourceError> {
        let (relation, pos) = self.relation_name()?;
        match self.peek() {
            Tok::Slash => {
                self.next();
                let arity = self.positive_int("an arity")?;
                self.expect(Tok::Dot, "`.`")?;
                Ok(Stmt::Decl {
                    relation,
                    pos,
                    arity: arity.0,
                    attrs: None,
                })
            }
            Tok::LParen => {
                self.next();
                let mut attrs = Vec::new();
                loop {
                    let (name, npos) = self.ident("an attribute name")?;
                    if attrs.contains(&name) {
                        return Err(npos.syntax(format!("attribute `{name}` declared twice")));
                    }
                    attrs.push(name);
                    match self.peek() {
                        Tok::Comma => {
                            self.next();
                        }
                        Tok::RParen => {
                            self.next();
                            break;
                        }
                        _ => return Err(self.unexpected("`,` or `)`")),
                    }
                }
                self.expect(Tok::Dot, "`.`")?;
                Ok(Stmt::Decl {
                    relation,
                    pos,
                    arity: attrs.len(),
                    attrs: Some(attrs),
                })
            }
            _ => Err(self.unexpected("`/` or `(` after the relation name")),
        }
    }

    fn positive_int(&mut self, wanted: &str) -> Result<(usize, Pos), SourceError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(s) => {
                self.next();
                match s.parse::<usize>() {
                    Ok(n) if n >= 1 => Ok((n, pos)),
                    _ => Err(pos.syntax(format!("{wanted} must be a positive integer"))),
                }
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    fn fact(&mut self, label: Option<(String, Pos)>) -> Result<Stmt, SourceError> {
        let (relation, pos) = self.relation_name()?;
        self.expect(Tok::LParen, "`(`")?;
        let mut values = Vec::new();
        loop {
            let vpos = self.pos();
            match self.peek().clone() {
                Tok::Ident(s) if is_variable_name(&s) => {
                    return Err(vpos.syntax(format!(
                        "`{s}` is a variable; facts hold constants (quote it: \"{s}\")"
                    )))
                }
                Tok::Ident(s) | Tok::Int(s) | Tok::Str(s) => {
                    self.next();
                    values.push(s);
                }
                _ => return Err(self.unexpected("a constant")),
            }
            match self.peek() {
                Tok::Comma => {
                    self.next();
                }
                Tok::RParen => {
                    self.next();
                    break;
                }
                _ => return Err(self.unexpected("`,` or `)`")),
            }
        }
        self.expect(Tok::Dot, "`.`")?;
        Ok(Stmt::Fact {
            label,
            relation,
            pos,
            values,
        })
    }

    fn poslist(&mut self) -> Result<Vec<PosRef>, SourceError> {
        self.expect(Tok::LBrack, "`[`")?;
        let mut out = Vec::new();
        loop {
            let pos = self.pos();
            match self.peek().clone() {
                Tok::Int(_) => {
                    let (n, p) = self.positive_int("a position")?;
                    out.push(PosRef::Index(n, p));
                }
                Tok::Ident(name) => {
                    self.next();
                    out.push(PosRef::Name(name, pos));
                }
                _ => return Err(self.unexpected("a position or attribute name")),
            }
            match self.peek() {
                Tok::Comma => {
                    self.next();
                }
                Tok::RBrack => {
                    self.next();
                    break;
                }
                _ => return Err(self.unexpected("`,` or `]`")),
            }
        }
        Ok(out)
    }

    /// `R[1,2]`, also accepting the doubled form `R[[1,2]]`.
    fn projection(&mut self) -> Result<(String, Pos, Vec<PosRef>), SourceError> {
        let (relation, pos) = self.relation_name()?;
        let attrs = if *self.peek_at(1) == Tok::LBrack {
            self.expect(Tok::LBrack, "`[`")?;
            let inner = self.poslist()?;
            self.expect(Tok::RBrack, "`]`")?;
            inner
        } else {
            self.poslist()?
        };
        Ok((relation, pos, attrs))
    }

    fn fd(&mut self, pos: Pos) -> Result<Stmt, SourceError> {
        let (relation, rel_pos) = self.relation_name()?;
        self.expect(Tok::Colon, "`:`")?;
        let determinant = self.poslist()?;
        self.expect(Tok::Arrow, "`->`")?;
        let dependent = self.poslist()?;
        self.expect(Tok::Dot, "`.`")?;
        Ok(Stmt::Fd {
            pos,
            relation,
            rel_pos,
            determinant,
            dependent,
        })
    }

    fn id(&mut self, pos: Pos) -> Result<Stmt, SourceError> {
        let (source, source_pos, source_attrs) = self.projection()?;
        self.expect(Tok::Le, "`<=`")?;
        let (target, target_pos, target_attrs) = self.projection()?;
        self.expect(Tok::Dot, "`.`")?;
        if source_attrs.len() != target_attrs.len() {
            return Err(target_pos.syntax(format!(
                "inclusion dependency projects {} source attributes onto {} target attributes",
                source_attrs.len(),
                target_attrs.len()
            )));
        }
        Ok(Stmt::Id {
            pos,
            source,
            source_pos,
            source_attrs,
            target,
            target_pos,
            target_attrs,
        })
    }

    fn term(&mut self) -> Result<(Term, Pos), SourceError> {
        let pos = self.pos();
        let term = match self.peek().clone() {
            Tok::Ident(s) if is_variable_name(&s) => Term::Var(s),
            Tok::Ident(s) | Tok::Int(s) | Tok::Str(s) => Term::Const(s),
            _ => return Err(self.unexpected("a variable or constant")),
        };
        self.next();
        Ok((term, pos))
    }

    fn atom(&mut self) -> Result<AtomAst, SourceError> {
        let (relation, pos) = self.relation_name()?;
        self.expect(Tok::LParen, "`(`")?;
        let mut terms = Vec::new();
        loop {
            terms.push(self.term()?);
            match self.peek() {
                Tok::Comma => {
                    self.next();
                }
                Tok::RParen => {
                    self.next();
                    break;
                }
                _ => return Err(self.unexpected("`,` or `)`")),
            }
        }
        Ok(AtomAst {
            relation,
            pos,
            terms,
        })
    }

    fn dc(&mut self, pos: Pos) -> Result<Stmt, SourceError> {
        self.expect(Tok::Bang, "`!`")?;
        let mut atoms = Vec::new();
        let mut comparisons = Vec::new();
        loop {
            let is_atom = matches!(self.peek(), Tok::Ident(_)) && *self.peek_at(1) == Tok::LParen;
            if is_atom {
                atoms.push(self.atom()?);
            } else {
                let left = self.term()?;
                let op = match self.peek() {
                    Tok::Neq => CmpOp::Neq,
                    Tok::Eq => CmpOp::Eq,
                    _ => return Err(self.unexpected("`!=` or `=`")),
                };
                self.next();
                let right = self.term()?;
                comparisons.push((left, op, right));
            }
            match self.peek() {
                Tok::Comma => {
                    self.next();
                }
                Tok::Dot => {
                    self.next();
                    break;
                }
                _ => return Err(self.unexpected("`,` or `.`")),
            }
        }
        if atoms.is_empty() {
            return Err(pos.syntax("denial constraint needs at least one atom"));
        }
        Ok(Stmt::Dc {
            pos,
            atoms,
            comparisons,
        })
    }

    fn lav(&mut self, pos: Pos) -> Result<Stmt, SourceError> {
        let body = self.atom()?;
        if *self.peek() == Tok::Comma {
            return Err(self
                .pos()
                .syntax("LTGD body must be a single atom"));
        }
        self.expect(Tok::Arrow, "`->`")?;
        let mut head = vec![self.atom()?];
        loop {
            match self.peek() {
                Tok::Comma => {
                    self.next();
                    head.push(self.atom()?);
                }
                Tok::Dot => {
                    self.next();
                    break;
                }
                _ => return Err(self.unexpected("`,` or `.`")),
            }
        }
        Ok(Stmt::Lav { pos, body, head })
    }
}

/// A parsed instance plus the `@label` names given to facts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedInstance {
    pub instance: ConstrainedDatabase,
    pub labels: BTreeMap<String, Fact>,
}

impl ParsedInstance {
    pub fn fact(&self, label: &str) -> Option<&Fact> {
        self.labels.get(label)
    }

    /// Looks up `label`, panicking with a readable message when absent.
    pub fn by_label(&self, label: &str) -> Fact {
        self.labels
            .get(label)
            .unwrap_or_else(|| panic!("no fact labelled `{label}`"))
            .clone()
    }

    /// Fact to label, first label in alphabetical order wins.
    pub fn names(&self) -> BTreeMap<Fact, String> {
        let mut out = BTreeMap::new();
        for (label, fact) in &self.labels {
            out.entry(fact.clone()).or_insert_with(|| label.clone());
        }
        out
    }

    /// Labels of `facts`, falling back to the canonical fact string.
    pub fn describe<'a, I: IntoIterator<Item = &'a Fact>>(&self, facts: I) -> Vec<String> {
        let names = self.names();
        facts
            .into_iter()
            .map(|f| names.get(f).cloned().unwrap_or_else(|| f.to_string()))
            .collect()
    }
}

struct Resolver {
    schema: Schema,
    attrs: HashMap<String, Vec<String>>,
}

impl Resolver {
    fn use_relation(&mut self, relation: &str, arity: usize, pos: Pos) -> Result<(), SourceError> {
        match self.schema.arity(relation) {
            Some(known) if known != arity => Err(pos.error(
                SourceErrorKind::ArityMismatch,
                format!("relation `{relation}` has arity {known}, used here with {arity}"),
            )),
            Some(_) => Ok(()),
            None => {
                self.schema
                    .declare(relation, arity)
                    .map_err(|e| pos.syntax(e.to_string()))
            }
        }
    }

    fn arity(&self, relation: &str, pos: Pos) -> Result<usize, SourceError> {
        self.schema.arity(relation).ok_or_else(|| {
            pos.error(
                SourceErrorKind::UnknownRelation,
                format!("relation `{relation}` is neither declared nor used by any fact or atom"),
            )
        })
    }

    fn positions(&self, relation: &str, rel_pos: Pos, refs: &[PosRef]) -> Result<Vec<usize>, SourceError> {
        let arity = self.arity(relation, rel_pos)?;
        refs.iter()
            .map(|r| match r {
                PosRef::Index(n, p) => {
                    if *n > arity {
                        Err(p.error(
                            SourceErrorKind::ArityMismatch,
                            format!("position {n} exceeds the arity {arity} of `{relation}`"),
                        ))
                    } else {
                        Ok(*n)
                    }
                }
                PosRef::Name(name, p) => self
                    .attrs
                    .get(relation)
                    .and_then(|names| names.iter().position(|a| a == name))
                    .map(|i| i + 1)
                    .ok_or_else(|| {
                        p.syntax(format!("`{relation}` has no declared attribute `{name}`"))
                    }),
            })
            .collect()
    }
}

fn atom_from(ast: &AtomAst) -> Atom {
    Atom::new(ast.relation.clone(), ast.terms.iter().map(|(t, _)| t.clone()))
}

/// Parses `.cdb` text. Every input either parses or yields one positioned
/// error.
pub fn parse_instance(text: &str) -> Result<ParsedInstance, SourceError> {
    let toks = tokenize(text)?;
    let stmts = Parser { toks, at: 0 }.statements()?;

    let mut r = Resolver {
        schema: Schema::new(),
        attrs: HashMap::new(),
    };
    for stmt in &stmts {
        if let Stmt::Decl {
            relation,
            pos,
            arity,
            attrs,
        } = stmt
        {
            r.use_relation(relation, *arity, *pos)?;
            if let Some(names) = attrs {
                if let Some(prev) = r.attrs.get(relation) {
                    if prev != names {
                        return Err(pos.syntax(format!(
                            "conflicting attribute names for `{relation}`"
                        )));
                    }
                }
                r.attrs.insert(relation.clone(), names.clone());
            }
        }
    }
    for stmt in &stmts {
        match stmt {
            Stmt::Fact {
                relation,
                pos,
                values,
                ..
            } => r.use_relation(relation, values.len(), *pos)?,
            Stmt::Dc { atoms, .. } => {
                for a in atoms {
                    r.use_relation(&a.relation, a.terms.len(), a.pos)?;
                }
            }
            Stmt::Lav { body, head, .. } => {
                for a in std::iter::once(body).chain(head) {
                    r.use_relation(&a.relation, a.terms.len(), a.pos)?;
                }
            }
            _ => {}
        }
    }

    let mut labels: BTreeMap<String, Fact> = BTreeMap::new();
    let mut facts = Vec::new();
    let mut constraints = Vec::new();
    for stmt in stmts {
        match stmt {
            Stmt::Decl { .. } => {}
            Stmt::Fact {
                label,
                relation,
                values,
                ..
            } => {
                let fact = Fact::new(relation, values);
                if let Some((label, lpos)) = label {
                    if labels.contains_key(&label) {
                        return Err(lpos.error(
                            SourceErrorKind::DuplicateLabel,
                            format!("label `@{label}` is used twice"),
                        ));
                    }
                    labels.insert(label, fact.clone());
                }
                facts.push(fact);
            }
            Stmt::Fd {
                pos,
                relation,
                rel_pos,
                determinant,
                dependent,
            } => {
                let determinant = r.positions(&relation, rel_pos, &determinant)?;
                let dependent = r.positions(&relation, rel_pos, &dependent)?;
                let c = Constraint::Fd(FunctionalDependency {
                    relation,
                    determinant,
                    dependent,
                });
                check(&c, &r.schema, pos)?;
                constraints.push(c);
            }
            Stmt::Id {
                pos,
                source,
                source_pos,
                source_attrs,
                target,
                target_pos,
                target_attrs,
            } => {
                let source_attrs = r.positions(&source, source_pos, &source_attrs)?;
                let target_attrs = r.positions(&target, target_pos, &target_attrs)?;
                let c = Constraint::Id(InclusionDependency {
                    source,
                    source_attrs,
                    target,
                    target_attrs,
                });
                check(&c, &r.schema, pos)?;
                constraints.push(c);
            }
            Stmt::Dc {
                pos,
                atoms,
                comparisons,
            } => {
                let bound: BTreeSet<&str> = atoms
                    .iter()
                    .flat_map(|a| a.terms.iter().filter_map(|(t, _)| t.as_var()))
                    .collect();
                for ((l, lp), _, (rt, rp)) in &comparisons {
                    for (t, p) in [(l, lp), (rt, rp)] {
                        if let Term::Var(v) = t {
                            if !bound.contains(v.as_str()) {
                                return Err(p.error(
                                    SourceErrorKind::UnsafeVariable,
                                    format!("variable `{v}` does not occur in any atom of the constraint"),
                                ));
                            }
                        }
                    }
                }
                let c = Constraint::Dc(DenialConstraint {
                    body: atoms.iter().map(atom_from).collect(),
                    comparisons: comparisons
                        .into_iter()
                        .map(|((l, _), op, (rt, _))| Comparison {
                            left: l,
                            op,
                            right: rt,
                        })
                        .collect(),
                });
                check(&c, &r.schema, pos)?;
                constraints.push(c);
            }
            Stmt::Lav { pos, body, head } => {
                let c = Constraint::Ltgd(Ltgd {
                    body: atom_from(&body),
                    head: head.iter().map(atom_from).collect(),
                });
                check(&c, &r.schema, pos)?;
                constraints.push(c);
            }
        }
    }

    let database = Database::new(r.schema, facts).map_err(|e| Pos { line: 1, column: 1 }.syntax(e.to_string()))?;
    let instance = ConstrainedDatabase::new(database, constraints)
        .map_err(|e| Pos { line: 1, column: 1 }.syntax(e.to_string()))?;
    Ok(ParsedInstance { instance, labels })
}

fn check(c: &Constraint, schema: &Schema, pos: Pos) -> Result<(), SourceError> {
    use crate::model::ModelError as M;
    c.validate(schema).map_err(|e| {
        let kind = match e {
            M::UnknownRelation(_) => SourceErrorKind::UnknownRelation,
            M::ArityMismatch { .. } | M::PositionOutOfRange { .. } => SourceErrorKind::ArityMismatch,
            M::UnsafeVariable(_) => SourceErrorKind::UnsafeVariable,
            _ => SourceErrorKind::Syntax,
        };
        pos.error(kind, e.to_string())
    })
}

/// Canonical text: declarations, then facts in sorted order, then constraints
/// in their original order.
pub fn serialize_instance(cdb: &ConstrainedDatabase) -> String {
    serialize_labeled(cdb, &BTreeMap::new())
}

/// Like [`serialize_instance`] but prefixes facts with their labels.
pub fn serialize_labeled(cdb: &ConstrainedDatabase, labels: &BTreeMap<String, Fact>) -> String {
    let mut names: BTreeMap<&Fact, &str> = BTreeMap::new();
    for (label, fact) in labels {
        names.entry(fact).or_insert(label);
    }
    let mut out = String::new();
    for (rel, arity) in cdb.database().schema().relations() {
        let _ = writeln!(out, "rel {rel}/{arity}.");
    }
    for fact in cdb.facts() {
        if let Some(label) = names.get(fact) {
            let _ = write!(out, "@{label} ");
        }
        let _ = writeln!(out, "{fact}.");
    }
    for c in cdb.constraints() {
        let _ = writeln!(out, "{}", render_constraint(c));
    }
    out
}

fn poslist(ps: &[usize]) -> String {
    let inner: Vec<String> = ps.iter().map(usize::to_string).collect();
    format!("[{}]", inner.join(","))
}

fn join_atoms(atoms: &[Atom]) -> String {
    atoms.iter().map(Atom::to_string).collect::<Vec<_>>().join(", ")
}

pub fn render_constraint(c: &Constraint) -> String {
    match c {
        Constraint::Fd(fd) => format!(
            "fd: {}: {} -> {}.",
            fd.relation,
            poslist(&fd.determinant),
            poslist(&fd.dependent)
        ),
        Constraint::Id(id) => format!(
            "id: {}{} <= {}{}.",
            id.source,
            poslist(&id.source_attrs),
            id.target,
            poslist(&id.target_attrs)
        ),
        Constraint::Dc(dc) => {
            let mut items = vec![join_atoms(&dc.body)];
            items.extend(dc.comparisons.iter().map(Comparison::to_string));
            format!("dc: ! {}.", items.join(", "))
        }
        Constraint::Ltgd(l) => format!("lav: {} -> {}.", l.body, join_atoms(&l.head)),
    }
}
