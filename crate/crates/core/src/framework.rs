//! Argumentation frameworks built from constrained databases.
//!
//! A [`Setaf`] stores its arguments sorted and its attacks as index lists,
//! so two structurally equal frameworks compare equal. Plain AFs are the
//! case where every attack has one source.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grounding::{compute_conflicts, is_source_fact, supports_in, violates_fd, FactIndex};
use crate::model::{ConstrainedDatabase, Constraint, ConstraintProfile, Fact};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Argument {
    /// The argument standing for a database fact.
    Fact(Fact),
    /// The auxiliary argument of a source fact for the constraint at the
    /// given index.
    Aux { fact: Fact, constraint: usize },
    /// An argument known only by name, e.g. read from an apx file.
    Named(String),
}

impl Argument {
    pub fn fact(&self) -> Option<&Fact> {
        match self {
            Argument::Fact(f) | Argument::Aux { fact: f, .. } => Some(f),
            Argument::Named(_) => None,
        }
    }

    pub fn is_aux(&self) -> bool {
        matches!(self, Argument::Aux { .. })
    }
}

impl fmt::Display for Argument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Argument::Fact(fact) => write!(f, "{fact}"),
            Argument::Aux { fact, constraint } => write!(f, "{fact}__c{constraint}"),
            Argument::Named(n) => f.write_str(n),
        }
    }
}

/// Why an attack is present.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Origin {
    /// Part of a minimal conflict of the constraint.
    Conflict { constraint: usize },
    /// A fact pair jointly violating a functional dependency.
    Violation { constraint: usize },
    /// A support set attacking the auxiliary argument it satisfies.
    Support { constraint: usize },
    /// Auxiliary argument attacking its own fact.
    Obligation { constraint: usize },
    /// Auxiliary argument attacking itself.
    SelfAttack { constraint: usize },
    /// Read from a file.
    Imported,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Attack {
    /// Sorted, non-empty argument indices.
    pub sources: Vec<usize>,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Setaf {
    arguments: Vec<Argument>,
    attacks: Vec<Attack>,
    origins: Vec<BTreeSet<Origin>>,
}

/// Collects arguments and attacks in any order; [`SetafBuilder::build`]
/// canonicalizes.
#[derive(Debug, Clone, Default)]
pub struct SetafBuilder {
    arguments: BTreeSet<Argument>,
    attacks: BTreeMap<(BTreeSet<Argument>, Argument), BTreeSet<Origin>>,
}

impl SetafBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn argument(&mut self, a: Argument) -> &mut Self {
        self.arguments.insert(a);
        self
    }

    pub fn attack<I: IntoIterator<Item = Argument>>(&mut self, sources: I, target: Argument, origin: Origin) -> &mut Self {
        let sources: BTreeSet<Argument> = sources.into_iter().collect();
        assert!(!sources.is_empty(), "attacks need a non-empty source set");
        self.attacks.entry((sources, target)).or_default().insert(origin);
        self
    }

    /// Fails if an attack mentions an argument that was never added.
    pub fn build(self) -> Result<Setaf> {
        let arguments: Vec<Argument> = self.arguments.into_iter().collect();
        let index = |a: &Argument| {
            arguments
                .binary_search(a)
                .map_err(|_| Error::Precondition(format!("attack mentions unknown argument {a}")))
        };
        let mut pairs: Vec<(Attack, BTreeSet<Origin>)> = Vec::with_capacity(self.attacks.len());
        for ((sources, target), origins) in self.attacks {
            let mut src = sources.iter().map(index).collect::<Result<Vec<_>>>()?;
            src.sort_unstable();
            pairs.push((
                Attack {
                    sources: src,
                    target: index(&target)?,
                },
                origins,
            ));
        }
        pairs.sort();
        let (attacks, origins) = pairs.into_iter().unzip();
        Ok(Setaf {
            arguments,
            attacks,
            origins,
        })
    }
}

impl Setaf {
    /// Framework over plain names, e.g. `from_named(["a","b"], [(vec!["a"], "b")])`.
    pub fn from_named<'s, A, T, S>(arguments: A, attacks: T) -> Result<Setaf>
    where
        A: IntoIterator<Item = &'s str>,
        T: IntoIterator<Item = (S, &'s str)>,
        S: IntoIterator<Item = &'s str>,
    {
        let mut b = SetafBuilder::new();
        for a in arguments {
            b.argument(Argument::Named(a.to_string()));
        }
        for (sources, target) in attacks {
            let sources: Vec<Argument> = sources.into_iter().map(|s| Argument::Named(s.to_string())).collect();
            if sources.is_empty() {
                return Err(Error::Precondition("attack with empty source set".into()));
            }
            b.attack(sources, Argument::Named(target.to_string()), Origin::Imported);
        }
        b.build()
    }

    pub fn arguments(&self) -> &[Argument] {
        &self.arguments
    }

    pub fn attacks(&self) -> &[Attack] {
        &self.attacks
    }

    pub fn origins(&self, attack: usize) -> &BTreeSet<Origin> {
        &self.origins[attack]
    }

    pub fn len(&self) -> usize {
        self.arguments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arguments.is_empty()
    }

    pub fn index_of(&self, a: &Argument) -> Option<usize> {
        self.arguments.binary_search(a).ok()
    }

    pub fn index_of_name(&self, name: &str) -> Option<usize> {
        self.index_of(&Argument::Named(name.to_string()))
    }

    pub fn argument(&self, i: usize) -> &Argument {
        &self.arguments[i]
    }

    /// True iff every attack has a single source.
    pub fn is_plain(&self) -> bool {
        self.attacks.iter().all(|a| a.sources.len() == 1)
    }

    pub fn is_self_attacking(&self, i: usize) -> bool {
        self.attacks.iter().any(|a| a.target == i && a.sources == [i])
    }

    /// Attack indices per target argument.
    pub fn attackers(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.arguments.len()];
        for (k, a) in self.attacks.iter().enumerate() {
            out[a.target].push(k);
        }
        out
    }

    /// Attacks as argument values, for structural comparisons.
    pub fn attack_set(&self) -> BTreeSet<(BTreeSet<Argument>, Argument)> {
        self.attacks
            .iter()
            .map(|a| {
                (
                    a.sources.iter().map(|&i| self.arguments[i].clone()).collect(),
                    self.arguments[a.target].clone(),
                )
            })
            .collect()
    }

    pub fn to_builder(&self) -> SetafBuilder {
        let mut b = SetafBuilder::new();
        for a in &self.arguments {
            b.argument(a.clone());
        }
        for (k, att) in self.attacks.iter().enumerate() {
            for &o in &self.origins[k] {
                b.attack(
                    att.sources.iter().map(|&i| self.arguments[i].clone()),
                    self.arguments[att.target].clone(),
                    o,
                );
            }
        }
        b
    }

    /// Keeps the arguments satisfying `keep` and the attacks among them.
    pub fn retain_arguments<F: Fn(&Argument) -> bool>(&self, keep: F) -> Setaf {
        let alive: Vec<bool> = self.arguments.iter().map(&keep).collect();
        self.restrict_mask(&alive)
    }

    fn restrict_mask(&self, alive: &[bool]) -> Setaf {
        let mut remap = vec![usize::MAX; self.arguments.len()];
        let mut arguments = Vec::new();
        for (i, a) in self.arguments.iter().enumerate() {
            if alive[i] {
                remap[i] = arguments.len();
                arguments.push(a.clone());
            }
        }
        let mut attacks = Vec::new();
        let mut origins = Vec::new();
        for (k, att) in self.attacks.iter().enumerate() {
            if alive[att.target] && att.sources.iter().all(|&s| alive[s]) {
                attacks.push(Attack {
                    sources: att.sources.iter().map(|&s| remap[s]).collect(),
                    target: remap[att.target],
                });
                origins.push(self.origins[k].clone());
            }
        }
        Setaf {
            arguments,
            attacks,
            origins,
        }
    }

    /// Keeps the attacks satisfying `keep`; arguments are unchanged.
    pub fn retain_attacks<F: Fn(&[usize], usize) -> bool>(&self, keep: F) -> Setaf {
        let mut out = Setaf {
            arguments: self.arguments.clone(),
            attacks: Vec::new(),
            origins: Vec::new(),
        };
        for (k, att) in self.attacks.iter().enumerate() {
            if keep(&att.sources, att.target) {
                out.attacks.push(att.clone());
                out.origins.push(self.origins[k].clone());
            }
        }
        out
    }

    /// The same framework without the self-attacks of auxiliary arguments.
    pub fn without_aux_self_attacks(&self) -> Setaf {
        self.retain_attacks(|src, t| !(src == [t] && self.arguments[t].is_aux()))
    }

    /// Facts of the given extension members, auxiliary arguments dropped.
    pub fn facts_of(&self, members: &[usize]) -> BTreeSet<Fact> {
        members
            .iter()
            .filter_map(|&i| match &self.arguments[i] {
                Argument::Fact(f) => Some(f.clone()),
                _ => None,
            })
            .collect()
    }
}

/// The six constructions from constrained databases to frameworks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    /// Conflicts of DCs (and FDs) as collective attacks.
    DcSetaf,
    /// Auxiliary arguments attacked by LTGD (and ID) supports.
    LtgdSetaf,
    /// Union of the two SETAF constructions.
    CombinedSetaf,
    /// Symmetric binary attacks between FD-violating pairs.
    FdAf,
    /// Auxiliary arguments attacked by single ID supporters.
    IdAf,
    /// Union of the FD and ID AFs.
    CombinedAf,
}

impl Construction {
    /// The narrowest construction that handles `profile`. With
    /// `force_setaf`, FD/ID inputs use the SETAF constructions instead.
    pub fn for_profile(profile: ConstraintProfile, force_setaf: bool) -> Construction {
        let ConstraintProfile {
            has_fd,
            has_id,
            has_dc,
            has_ltgd,
        } = profile;
        if !force_setaf && profile.is_plain() {
            return match (has_fd, has_id) {
                (true, false) => Construction::FdAf,
                (false, true) => Construction::IdAf,
                (true, true) => Construction::CombinedAf,
                (false, false) => Construction::DcSetaf,
            };
        }
        match (has_fd || has_dc, has_id || has_ltgd) {
            (_, false) => Construction::DcSetaf,
            (false, true) => Construction::LtgdSetaf,
            (true, true) => Construction::CombinedSetaf,
        }
    }

    pub fn accepts(self, p: ConstraintProfile) -> bool {
        match self {
            Construction::DcSetaf => !p.has_tgds(),
            Construction::LtgdSetaf => !p.has_denials(),
            Construction::CombinedSetaf => true,
            Construction::FdAf => !p.has_id && !p.has_dc && !p.has_ltgd,
            Construction::IdAf => !p.has_fd && !p.has_dc && !p.has_ltgd,
            Construction::CombinedAf => p.is_plain(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Construction::DcSetaf => "dc-setaf",
            Construction::LtgdSetaf => "ltgd-setaf",
            Construction::CombinedSetaf => "combined-setaf",
            Construction::FdAf => "fd-af",
            Construction::IdAf => "id-af",
            Construction::CombinedAf => "combined-af",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildOptions {
    /// Drop supports that strictly contain another support.
    pub minimize_supports: bool,
}

pub fn build(cdb: &ConstrainedDatabase, construction: Construction) -> Result<Setaf> {
    build_with(cdb, construction, BuildOptions::default())
}

pub fn build_with(cdb: &ConstrainedDatabase, construction: Construction, opts: BuildOptions) -> Result<Setaf> {
    let profile = cdb.profile();
    if !construction.accepts(profile) {
        return Err(Error::Precondition(format!(
            "{} cannot encode constraint profile {profile}",
            construction.name()
        )));
    }
    let mut b = SetafBuilder::new();
    for f in cdb.facts() {
        b.argument(Argument::Fact(f.clone()));
    }
    match construction {
        Construction::DcSetaf => add_conflicts(cdb, &mut b),
        Construction::LtgdSetaf | Construction::IdAf => add_supports(cdb, &mut b, opts)?,
        Construction::CombinedSetaf => {
            add_conflicts(cdb, &mut b);
            add_supports(cdb, &mut b, opts)?;
        }
        Construction::FdAf => add_fd_pairs(cdb, &mut b),
        Construction::CombinedAf => {
            add_fd_pairs(cdb, &mut b);
            add_supports(cdb, &mut b, opts)?;
        }
    }
    b.build()
}

pub fn build_dc_setaf(cdb: &ConstrainedDatabase) -> Result<Setaf> {
    build(cdb, Construction::DcSetaf)
}

pub fn build_ltgd_setaf(cdb: &ConstrainedDatabase) -> Result<Setaf> {
    build(cdb, Construction::LtgdSetaf)
}

pub fn build_combined_setaf(cdb: &ConstrainedDatabase) -> Result<Setaf> {
    build(cdb, Construction::CombinedSetaf)
}

pub fn build_fd_af(cdb: &ConstrainedDatabase) -> Result<Setaf> {
    build(cdb, Construction::FdAf)
}

pub fn build_id_af(cdb: &ConstrainedDatabase) -> Result<Setaf> {
    build(cdb, Construction::IdAf)
}

pub fn build_combined_af(cdb: &ConstrainedDatabase) -> Result<Setaf> {
    build(cdb, Construction::CombinedAf)
}

fn add_conflicts(cdb: &ConstrainedDatabase, b: &mut SetafBuilder) {
    for c in compute_conflicts(cdb) {
        let origin = Origin::Conflict {
            constraint: c.witness,
        };
        if c.facts.len() == 1 {
            let t = Argument::Fact(c.facts.into_iter().next().expect("non-empty"));
            b.attack([t.clone()], t, origin);
            continue;
        }
        for t in &c.facts {
            let sources = c.facts.iter().filter(|f| *f != t).cloned().map(Argument::Fact);
            b.attack(sources, Argument::Fact(t.clone()), origin);
        }
    }
}

fn add_fd_pairs(cdb: &ConstrainedDatabase, b: &mut SetafBuilder) {
    let facts: Vec<&Fact> = cdb.facts().iter().collect();
    for (k, c) in cdb.constraints().iter().enumerate() {
        let Constraint::Fd(fd) = c else { continue };
        for (i, s) in facts.iter().enumerate() {
            for t in &facts[i + 1..] {
                if violates_fd(fd, s, t) {
                    let origin = Origin::Violation { constraint: k };
                    let (s, t) = (Argument::Fact((*s).clone()), Argument::Fact((*t).clone()));
                    b.attack([s.clone()], t.clone(), origin);
                    b.attack([t], s, origin);
                }
            }
        }
    }
}

fn add_supports(cdb: &ConstrainedDatabase, b: &mut SetafBuilder, opts: BuildOptions) -> Result<()> {
    let index = FactIndex::new(cdb.facts());
    for (k, c) in cdb.constraints().iter().enumerate() {
        if !matches!(c, Constraint::Id(_) | Constraint::Ltgd(_)) {
            continue;
        }
        for s in cdb.facts() {
            if !is_source_fact(c, s) {
                continue;
            }
            let aux = Argument::Aux {
                fact: s.clone(),
                constraint: k,
            };
            b.argument(aux.clone());
            b.attack([aux.clone()], aux.clone(), Origin::SelfAttack { constraint: k });
            b.attack([aux.clone()], Argument::Fact(s.clone()), Origin::Obligation { constraint: k });
            for sup in supports_in(&index, c, s, opts.minimize_supports)? {
                b.attack(
                    sup.facts.into_iter().map(Argument::Fact),
                    aux.clone(),
                    Origin::Support { constraint: k },
                );
            }
        }
    }
    Ok(())
}

/// Result of the support-propagation fixed point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preprocessed {
    pub reduced: Setaf,
    pub removed: BTreeSet<Fact>,
    /// Facts removed per round; each round removes every fact whose
    /// auxiliary argument had become unattacked.
    pub rounds: Vec<BTreeSet<Fact>>,
}

impl Preprocessed {
    /// Fact arguments of the reduced framework that do not attack themselves.
    pub fn surviving_facts(&self) -> BTreeSet<Fact> {
        let r = &self.reduced;
        (0..r.len())
            .filter(|&i| !r.is_self_attacking(i))
            .filter_map(|i| match r.argument(i) {
                Argument::Fact(f) => Some(f.clone()),
                _ => None,
            })
            .collect()
    }
}

struct Worklist<'s> {
    setaf: &'s Setaf,
    attackers: Vec<Vec<usize>>,
    alive: Vec<bool>,
}

impl<'s> Worklist<'s> {
    fn new(setaf: &'s Setaf) -> Self {
        Worklist {
            setaf,
            attackers: setaf.attackers(),
            alive: vec![true; setaf.len()],
        }
    }

    /// Live auxiliary arguments whose only live attacker is themselves.
    fn eligible(&self) -> Vec<usize> {
        (0..self.setaf.len())
            .filter(|&i| self.alive[i] && self.setaf.argument(i).is_aux())
            .filter(|&i| {
                self.attackers[i].iter().all(|&k| {
                    let att = &self.setaf.attacks[k];
                    att.sources == [i] || !att.sources.iter().all(|&s| self.alive[s])
                })
            })
            .collect()
    }

    fn remove_fact(&mut self, fact: &Fact) {
        for (i, a) in self.setaf.arguments().iter().enumerate() {
            if a.fact() == Some(fact) {
                self.alive[i] = false;
            }
        }
    }

    fn finish(self, rounds: Vec<BTreeSet<Fact>>) -> Preprocessed {
        let removed = rounds.iter().flatten().cloned().collect();
        Preprocessed {
            reduced: self.setaf.restrict_mask(&self.alive),
            removed,
            rounds,
        }
    }
}

/// Repeatedly removes every fact whose auxiliary argument has no attacker
/// besides itself, together with all auxiliary arguments of that fact and
/// the incident attacks. Frameworks without auxiliary arguments are
/// returned unchanged.
pub fn preprocess(setaf: &Setaf) -> Preprocessed {
    let mut w = Worklist::new(setaf);
    let mut rounds = Vec::new();
    loop {
        let round: BTreeSet<Fact> = w
            .eligible()
            .into_iter()
            .filter_map(|i| setaf.argument(i).fact().cloned())
            .collect();
        if round.is_empty() {
            break;
        }
        for f in &round {
            w.remove_fact(f);
        }
        rounds.push(round);
    }
    w.finish(rounds)
}

/// [`preprocess`] removing one randomly chosen eligible fact at a time.
/// Any seed yields the same reduced framework and removed set.
pub fn preprocess_shuffled(setaf: &Setaf, seed: u64) -> Preprocessed {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = Worklist::new(setaf);
    let mut rounds = Vec::new();
    loop {
        let eligible = w.eligible();
        let Some(&pick) = eligible.choose(&mut rng) else {
            break;
        };
        let fact = setaf.argument(pick).fact().expect("aux argument has a fact").clone();
        w.remove_fact(&fact);
        rounds.push(BTreeSet::from([fact]));
    }
    w.finish(rounds)
}

/// Names used in exports: the fact's label if known, else the fact itself;
/// auxiliary arguments get a `__c<index>` suffix.
pub fn argument_name(a: &Argument, labels: &BTreeMap<Fact, String>) -> String {
    let base = |f: &Fact| labels.get(f).cloned().unwrap_or_else(|| f.to_string());
    match a {
        Argument::Fact(f) => base(f),
        Argument::Aux { fact, constraint } => format!("{}__c{constraint}", base(fact)),
        Argument::Named(n) => n.clone(),
    }
}

fn apx_token(name: &str) -> String {
    let bare = name.starts_with(|c: char| c.is_ascii_lowercase())
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if bare {
        name.to_string()
    } else {
        let mut s = String::from("\"");
        for c in name.chars() {
            if c == '"' || c == '\\' {
                s.push('\\');
            }
            s.push(c);
        }
        s.push('"');
        s
    }
}

impl Setaf {
    /// ASPARTIX-style text: `arg(a).`, `att(a,b).` for single-source attacks
    /// and `satt([a,b],c).` otherwise.
    pub fn to_apx(&self, labels: &BTreeMap<Fact, String>) -> String {
        let names: Vec<String> = self
            .arguments
            .iter()
            .map(|a| apx_token(&argument_name(a, labels)))
            .collect();
        let mut out = String::new();
        for n in &names {
            let _ = writeln!(out, "arg({n}).");
        }
        for att in &self.attacks {
            let t = &names[att.target];
            if let [s] = att.sources.as_slice() {
                let _ = writeln!(out, "att({},{t}).", names[*s]);
            } else {
                let src: Vec<&str> = att.sources.iter().map(|&i| names[i].as_str()).collect();
                let _ = writeln!(out, "satt([{}],{t}).", src.join(","));
            }
        }
        out
    }

    /// JSON view with argument kinds and attack provenance.
    pub fn to_json(&self, labels: &BTreeMap<Fact, String>) -> serde_json::Value {
        let names: Vec<String> = self.arguments.iter().map(|a| argument_name(a, labels)).collect();
        let arguments: Vec<serde_json::Value> = self
            .arguments
            .iter()
            .zip(&names)
            .map(|(a, n)| match a {
                Argument::Fact(f) => serde_json::json!({"name": n, "kind": "fact", "fact": f.to_string()}),
                Argument::Aux { fact, constraint } => serde_json::json!({
                    "name": n, "kind": "aux", "fact": fact.to_string(), "constraint": constraint
                }),
                Argument::Named(_) => serde_json::json!({"name": n, "kind": "named"}),
            })
            .collect();
        let attacks: Vec<serde_json::Value> = self
            .attacks
            .iter()
            .zip(&self.origins)
            .map(|(att, o)| {
                serde_json::json!({
                    "sources": att.sources.iter().map(|&i| names[i].clone()).collect::<Vec<_>>(),
                    "target": names[att.target],
                    "origins": o,
                })
            })
            .collect();
        serde_json::json!({ "arguments": arguments, "attacks": attacks })
    }
}

fn apx_error(line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        format: "apx",
        line,
        message: message.into(),
    }
}

struct ApxLine<'t> {
    rest: &'t str,
    line: usize,
}

impl<'t> ApxLine<'t> {
    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start();
    }

    fn eat(&mut self, s: &str) -> Result<()> {
        self.skip_ws();
        match self.rest.strip_prefix(s) {
            Some(r) => {
                self.rest = r;
                Ok(())
            }
            None => Err(apx_error(self.line, format!("expected `{s}`"))),
        }
    }

    fn peek(&mut self, s: &str) -> bool {
        self.skip_ws();
        self.rest.starts_with(s)
    }

    fn name(&mut self) -> Result<String> {
        self.skip_ws();
        if let Some(r) = self.rest.strip_prefix('"') {
            let mut out = String::new();
            let mut chars = r.char_indices();
            while let Some((i, c)) = chars.next() {
                match c {
                    '"' => {
                        self.rest = &r[i + 1..];
                        return Ok(out);
                    }
                    '\\' => match chars.next() {
                        Some((_, e)) => out.push(e),
                        None => break,
                    },
                    _ => out.push(c),
                }
            }
            return Err(apx_error(self.line, "unterminated quoted name"));
        }
        let end = self
            .rest
            .find(|c: char| !(c.is_alphanumeric() || c == '_'))
            .unwrap_or(self.rest.len());
        if end == 0 {
            return Err(apx_error(self.line, "expected an argument name"));
        }
        let (n, r) = self.rest.split_at(end);
        self.rest = r;
        Ok(n.to_string())
    }
}

/// Reads the format written by [`Setaf::to_apx`]. Arguments become
/// [`Argument::Named`]; `%` starts a comment.
pub fn parse_apx(text: &str) -> Result<Setaf> {
    let mut args: Vec<String> = Vec::new();
    let mut attacks: Vec<(Vec<String>, String, usize)> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let content = match raw.find('%') {
            Some(i) if !raw[..i].contains('"') => &raw[..i],
            _ => raw,
        };
        let mut p = ApxLine { rest: content, line };
        loop {
            p.skip_ws();
            if p.rest.is_empty() {
                break;
            }
            if p.peek("arg(") {
                p.eat("arg(")?;
                args.push(p.name()?);
            } else if p.peek("att(") {
                p.eat("att(")?;
                let s = p.name()?;
                p.eat(",")?;
                let t = p.name()?;
                attacks.push((vec![s], t, line));
            } else if p.peek("satt(") {
                p.eat("satt(")?;
                p.eat("[")?;
                let mut src = vec![p.name()?];
                while p.peek(",") {
                    p.eat(",")?;
                    src.push(p.name()?);
                }
                p.eat("]")?;
                p.eat(",")?;
                let t = p.name()?;
                attacks.push((src, t, line));
            } else {
                return Err(apx_error(line, "expected `arg(`, `att(` or `satt(`"));
            }
            p.eat(")")?;
            p.eat(".")?;
        }
    }
    let known: BTreeSet<&str> = args.iter().map(String::as_str).collect();
    let mut b = SetafBuilder::new();
    for a in &args {
        b.argument(Argument::Named(a.clone()));
    }
    for (src, t, line) in &attacks {
        for n in src.iter().chain(std::iter::once(t)) {
            if !known.contains(n.as_str()) {
                return Err(apx_error(*line, format!("attack mentions undeclared argument `{n}`")));
            }
        }
        b.attack(
            src.iter().map(|s| Argument::Named(s.clone())),
            Argument::Named(t.clone()),
            Origin::Imported,
        );
    }
    b.build()
}

/// Renames every argument to its export name, dropping provenance. Two
/// frameworks are structurally equal iff their renamed forms are equal.
pub fn rename_to_named(setaf: &Setaf, labels: &BTreeMap<Fact, String>) -> Setaf {
    let mut b = SetafBuilder::new();
    let name = |i: usize| Argument::Named(argument_name(&setaf.arguments[i], labels));
    for i in 0..setaf.len() {
        b.argument(name(i));
    }
    for att in &setaf.attacks {
        b.attack(att.sources.iter().map(|&i| name(i)), name(att.target), Origin::Imported);
    }
    b.build().expect("renamed attacks reference renamed arguments")
}
