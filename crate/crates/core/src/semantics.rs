//! Exact extension enumeration for SETAFs.
//!
//! A set is conflict-free iff it contains no hyperedge `B ∪ {a}` of an
//! attack `(B, a)`, so naive extensions are the maximal independent sets of
//! that hypergraph. Naive sets are enumerated by backtracking. Preferred
//! extensions are obtained from them: every admissible set lies inside some
//! naive set `M`, and the largest admissible subset of `M` is reached by
//! repeatedly discarding members the current set does not defend.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::framework::{Argument, Setaf};

pub const DEFAULT_MAX_ARGS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SemanticsKind {
    ConflictFree,
    Naive,
    Admissible,
    Preferred,
    Stable,
}

impl SemanticsKind {
    pub const ALL: [SemanticsKind; 5] = [
        SemanticsKind::ConflictFree,
        SemanticsKind::Naive,
        SemanticsKind::Admissible,
        SemanticsKind::Preferred,
        SemanticsKind::Stable,
    ];

    pub fn short(self) -> &'static str {
        match self {
            SemanticsKind::ConflictFree => "conf",
            SemanticsKind::Naive => "naive",
            SemanticsKind::Admissible => "adm",
            SemanticsKind::Preferred => "pref",
            SemanticsKind::Stable => "stab",
        }
    }
}

impl fmt::Display for SemanticsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

impl FromStr for SemanticsKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "conf" | "cf" | "conflict-free" => SemanticsKind::ConflictFree,
            "naive" => SemanticsKind::Naive,
            "adm" | "admissible" => SemanticsKind::Admissible,
            "pref" | "preferred" => SemanticsKind::Preferred,
            "stab" | "stable" => SemanticsKind::Stable,
            _ => return Err(format!("unknown semantics `{s}`")),
        })
    }
}

/// A set of argument indices, sorted, with the semantics it came from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Extension {
    pub members: Vec<usize>,
    pub semantics: SemanticsKind,
}

impl Extension {
    pub fn arguments<'s>(&self, setaf: &'s Setaf) -> Vec<&'s Argument> {
        self.members.iter().map(|&i| setaf.argument(i)).collect()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_args: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_args: DEFAULT_MAX_ARGS,
        }
    }
}

fn members_mask(n: usize, s: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &i in s {
        m[i] = true;
    }
    m
}

/// No attack `(T, s)` with `T ⊆ S` and `s ∈ S`.
pub fn is_conflict_free(setaf: &Setaf, s: &[usize]) -> bool {
    let m = members_mask(setaf.len(), s);
    cf_mask(setaf, &m)
}

fn cf_mask(setaf: &Setaf, m: &[bool]) -> bool {
    setaf
        .attacks()
        .iter()
        .all(|a| !(m[a.target] && a.sources.iter().all(|&x| m[x])))
}

fn attacked_by(setaf: &Setaf, attackers: &[Vec<usize>], m: &[bool], x: usize) -> bool {
    attackers[x]
        .iter()
        .any(|&k| setaf.attacks()[k].sources.iter().all(|&y| m[y]))
}

fn defends_mask(setaf: &Setaf, attackers: &[Vec<usize>], m: &[bool], a: usize) -> bool {
    attackers[a].iter().all(|&k| {
        setaf.attacks()[k]
            .sources
            .iter()
            .any(|&b| attacked_by(setaf, attackers, m, b))
    })
}

/// Every attack on `a` has a source member that `S` attacks.
pub fn defends(setaf: &Setaf, s: &[usize], a: usize) -> bool {
    let m = members_mask(setaf.len(), s);
    defends_mask(setaf, &setaf.attackers(), &m, a)
}

pub fn is_admissible(setaf: &Setaf, s: &[usize]) -> bool {
    let m = members_mask(setaf.len(), s);
    let att = setaf.attackers();
    cf_mask(setaf, &m) && s.iter().all(|&a| defends_mask(setaf, &att, &m, a))
}

pub fn is_stable(setaf: &Setaf, s: &[usize]) -> bool {
    let m = members_mask(setaf.len(), s);
    let att = setaf.attackers();
    cf_mask(setaf, &m) && (0..setaf.len()).all(|x| m[x] || attacked_by(setaf, &att, &m, x))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum State {
    Undecided,
    In,
    Out,
}

struct Search<'s> {
    n: usize,
    /// Hyperedges as sorted, deduplicated member lists.
    edges: Vec<Vec<usize>>,
    /// Edge indices per argument.
    incident: Vec<Vec<usize>>,
    state: Vec<State>,
    maximal: bool,
    out: &'s mut Vec<Vec<usize>>,
}

impl<'s> Search<'s> {
    fn new(setaf: &Setaf, maximal: bool, out: &'s mut Vec<Vec<usize>>) -> Self {
        let n = setaf.len();
        let mut edges: BTreeSet<Vec<usize>> = BTreeSet::new();
        for a in setaf.attacks() {
            let mut e = a.sources.clone();
            e.push(a.target);
            e.sort_unstable();
            e.dedup();
            edges.insert(e);
        }
        let edges: Vec<Vec<usize>> = edges.into_iter().collect();
        let mut incident = vec![Vec::new(); n];
        for (k, e) in edges.iter().enumerate() {
            for &x in e {
                incident[x].push(k);
            }
        }
        Search {
            n,
            edges,
            incident,
            state: vec![State::Undecided; n],
            maximal,
            out,
        }
    }

    /// Adding `i` would complete an edge.
    fn completes_edge(&self, i: usize) -> bool {
        self.incident[i]
            .iter()
            .any(|&k| self.edges[k].iter().all(|&x| x == i || self.state[x] == State::In))
    }

    /// `i` is, or can still become, excluded by an edge whose other members
    /// are all in.
    fn blockable(&self, i: usize, final_check: bool) -> bool {
        self.incident[i].iter().any(|&k| {
            self.edges[k].iter().all(|&x| {
                x == i
                    || self.state[x] == State::In
                    || (!final_check && self.state[x] == State::Undecided)
            })
        })
    }

    fn feasible(&self) -> bool {
        (0..self.n).all(|i| self.state[i] != State::Out || self.blockable(i, false))
    }

    fn run(&mut self, i: usize) {
        if i == self.n {
            if self.maximal && !(0..self.n).all(|x| self.state[x] != State::Out || self.blockable(x, true)) {
                return;
            }
            let members = (0..self.n).filter(|&x| self.state[x] == State::In).collect();
            self.out.push(members);
            return;
        }
        if !self.completes_edge(i) {
            self.state[i] = State::In;
            if !self.maximal || self.feasible() {
                self.run(i + 1);
            }
        }
        self.state[i] = State::Out;
        if !self.maximal || self.feasible() {
            self.run(i + 1);
        }
        self.state[i] = State::Undecided;
    }
}

fn independent_sets(setaf: &Setaf, maximal: bool) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    Search::new(setaf, maximal, &mut out).run(0);
    out
}

/// Largest admissible subset of a conflict-free set.
fn admissible_core(setaf: &Setaf, attackers: &[Vec<usize>], set: &[usize]) -> Vec<usize> {
    let mut m = members_mask(setaf.len(), set);
    loop {
        let drop: Vec<usize> = (0..setaf.len())
            .filter(|&a| m[a] && !defends_mask(setaf, attackers, &m, a))
            .collect();
        if drop.is_empty() {
            break;
        }
        for a in drop {
            m[a] = false;
        }
    }
    (0..setaf.len()).filter(|&a| m[a]).collect()
}

fn maximal_only(sets: BTreeSet<Vec<usize>>) -> Vec<Vec<usize>> {
    let sets: Vec<Vec<usize>> = sets.into_iter().collect();
    let is_sub = |a: &[usize], b: &[usize]| a.len() < b.len() && a.iter().all(|x| b.binary_search(x).is_ok());
    sets.iter()
        .filter(|s| !sets.iter().any(|t| is_sub(s, t)))
        .cloned()
        .collect()
}

pub fn extensions(setaf: &Setaf, sigma: SemanticsKind) -> Result<Vec<Extension>> {
    extensions_with(setaf, sigma, Limits::default())
}

/// All σ-extensions, each sorted and the list sorted lexicographically.
pub fn extensions_with(setaf: &Setaf, sigma: SemanticsKind, limits: Limits) -> Result<Vec<Extension>> {
    if setaf.len() > limits.max_args {
        return Err(Error::budget("arguments", limits.max_args, setaf.len()));
    }
    let attackers = setaf.attackers();
    let mut sets: Vec<Vec<usize>> = match sigma {
        SemanticsKind::ConflictFree => independent_sets(setaf, false),
        SemanticsKind::Naive => independent_sets(setaf, true),
        SemanticsKind::Admissible => independent_sets(setaf, false)
            .into_iter()
            .filter(|s| {
                let m = members_mask(setaf.len(), s);
                s.iter().all(|&a| defends_mask(setaf, &attackers, &m, a))
            })
            .collect(),
        SemanticsKind::Preferred => {
            let cores: BTreeSet<Vec<usize>> = independent_sets(setaf, true)
                .iter()
                .map(|m| admissible_core(setaf, &attackers, m))
                .collect();
            maximal_only(cores)
        }
        SemanticsKind::Stable => independent_sets(setaf, true)
            .into_iter()
            .filter(|s| {
                let m = members_mask(setaf.len(), s);
                (0..setaf.len()).all(|x| m[x] || attacked_by(setaf, &attackers, &m, x))
            })
            .collect(),
    };
    sets.sort();
    sets.dedup();
    Ok(sets
        .into_iter()
        .map(|members| Extension {
            members,
            semantics: sigma,
        })
        .collect())
}

/// `a` belongs to some σ-extension.
pub fn credulous(setaf: &Setaf, sigma: SemanticsKind, a: usize, limits: Limits) -> Result<bool> {
    Ok(extensions_with(setaf, sigma, limits)?.iter().any(|e| e.contains(a)))
}

/// `a` belongs to every σ-extension; true when there are none.
pub fn skeptical(setaf: &Setaf, sigma: SemanticsKind, a: usize, limits: Limits) -> Result<bool> {
    Ok(extensions_with(setaf, sigma, limits)?.iter().all(|e| e.contains(a)))
}

/// Some σ-extension has at least one argument.
pub fn exists_nonempty(setaf: &Setaf, sigma: SemanticsKind, limits: Limits) -> Result<bool> {
    Ok(extensions_with(setaf, sigma, limits)?.iter().any(|e| !e.is_empty()))
}
