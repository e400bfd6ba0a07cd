//! Subset repairs: a brute-force oracle, the argumentation route, and the
//! reasoning tasks on top of both.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::framework::{build, preprocess, Construction, Setaf};
use crate::grounding::{compute_conflicts, is_consistent};
use crate::model::{ConstrainedDatabase, ConstraintProfile, Fact};
use crate::semantics::{extensions_with, Limits, SemanticsKind, DEFAULT_MAX_ARGS};

pub const DEFAULT_MAX_FACTS: usize = 20;

/// Size bounds for the exhaustive procedures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budgets {
    /// Largest database the subset oracle will scan.
    pub max_facts: usize,
    /// Largest framework the semantics engine will enumerate.
    pub max_args: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            max_facts: DEFAULT_MAX_FACTS,
            max_args: DEFAULT_MAX_ARGS,
        }
    }
}

impl Budgets {
    pub fn limits(&self) -> Limits {
        Limits {
            max_args: self.max_args,
        }
    }
}

/// The ⊆-maximal consistent subsets, each sorted, in lexicographic order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
pub struct RepairSet {
    pub repairs: Vec<BTreeSet<Fact>>,
}

impl RepairSet {
    pub fn new<I: IntoIterator<Item = BTreeSet<Fact>>>(repairs: I) -> Self {
        let mut repairs: Vec<_> = repairs.into_iter().collect();
        repairs.sort();
        repairs.dedup();
        RepairSet { repairs }
    }

    pub fn len(&self) -> usize {
        self.repairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.repairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &BTreeSet<Fact>> {
        self.repairs.iter()
    }

    pub fn contains(&self, repair: &BTreeSet<Fact>) -> bool {
        self.repairs.contains(repair)
    }

    pub fn max_size(&self) -> usize {
        self.repairs.iter().map(BTreeSet::len).max().unwrap_or(0)
    }
}

/// Which engine answers a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Subset enumeration with consistency checks.
    Oracle,
    /// Preferred extensions of the framework chosen by constraint profile.
    Argumentation,
    /// Both, failing with [`Error::RouteMismatch`] on disagreement.
    Both,
}

impl FromStr for Route {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "oracle" => Ok(Route::Oracle),
            "argumentation" | "af" => Ok(Route::Argumentation),
            "both" => Ok(Route::Both),
            _ => Err(format!("unknown route `{s}`")),
        }
    }
}

/// All subset repairs by scanning subsets in decreasing size.
pub fn all_repairs(cdb: &ConstrainedDatabase) -> Result<RepairSet> {
    all_repairs_with(cdb, Budgets::default())
}

pub fn all_repairs_with(cdb: &ConstrainedDatabase, budgets: Budgets) -> Result<RepairSet> {
    let facts: Vec<&Fact> = cdb.facts().iter().collect();
    let n = facts.len();
    if n > budgets.max_facts || n >= 64 {
        return Err(Error::budget("facts", budgets.max_facts.min(63), n));
    }
    let constraints = cdb.constraints();
    let mut found: Vec<u64> = Vec::new();
    let mut chosen: Vec<&Fact> = Vec::with_capacity(n);
    for size in (0..=n).rev() {
        for mask in masks_of_size(n, size) {
            if found.iter().any(|&r| mask & !r == 0) {
                continue;
            }
            chosen.clear();
            chosen.extend((0..n).filter(|&i| mask >> i & 1 == 1).map(|i| facts[i]));
            if is_consistent(chosen.iter().copied(), constraints) {
                found.push(mask);
            }
        }
    }
    Ok(RepairSet::new(found.into_iter().map(|mask| {
        (0..n)
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| facts[i].clone())
            .collect()
    })))
}

/// All `n`-bit masks with `k` bits set, in increasing order.
fn masks_of_size(n: usize, k: usize) -> impl Iterator<Item = u64> {
    let limit: u64 = 1 << n;
    let first: u64 = if k == 0 { 0 } else { (1u64 << k) - 1 };
    let mut next = Some(first);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            let low = cur & cur.wrapping_neg();
            let ripple = cur + low;
            let succ = (((ripple ^ cur) >> 2) / low) | ripple;
            (succ < limit).then_some(succ)
        };
        Some(cur)
    })
}

/// The framework used for `cdb` by the argumentation route.
pub fn framework_for(cdb: &ConstrainedDatabase) -> Result<(Construction, Setaf)> {
    let c = Construction::for_profile(cdb.profile(), false);
    Ok((c, build(cdb, c)?))
}

/// Repairs as the preferred extensions of the profile's framework, with
/// auxiliary arguments removed.
pub fn repairs_via_argumentation(cdb: &ConstrainedDatabase) -> Result<RepairSet> {
    repairs_via_argumentation_with(cdb, Budgets::default())
}

pub fn repairs_via_argumentation_with(cdb: &ConstrainedDatabase, budgets: Budgets) -> Result<RepairSet> {
    let (_, setaf) = framework_for(cdb)?;
    preferred_fact_sets(&setaf, budgets)
}

fn preferred_fact_sets(setaf: &Setaf, budgets: Budgets) -> Result<RepairSet> {
    let pref = extensions_with(setaf, SemanticsKind::Preferred, budgets.limits())?;
    Ok(RepairSet::new(pref.iter().map(|e| {
        debug_assert!(e.members.iter().all(|&i| !setaf.argument(i).is_aux()));
        setaf.facts_of(&e.members)
    })))
}

/// Repairs by the chosen route; [`Route::Both`] checks agreement.
pub fn repairs_by(cdb: &ConstrainedDatabase, route: Route, budgets: Budgets) -> Result<RepairSet> {
    match route {
        Route::Oracle => all_repairs_with(cdb, budgets),
        Route::Argumentation => repairs_via_argumentation_with(cdb, budgets),
        Route::Both => {
            let a = all_repairs_with(cdb, budgets)?;
            let b = repairs_via_argumentation_with(cdb, budgets)?;
            if a != b {
                return Err(Error::RouteMismatch(format!(
                    "oracle found {} repairs, argumentation {}",
                    a.len(),
                    b.len()
                )));
            }
            Ok(a)
        }
    }
}

fn require_fact(cdb: &ConstrainedDatabase, s: &Fact) -> Result<()> {
    if cdb.facts().contains(s) {
        Ok(())
    } else {
        Err(Error::UnknownLabel(s.to_string()))
    }
}

/// Is there a non-empty repair?
pub fn rep_nonempty(cdb: &ConstrainedDatabase, route: Route, budgets: Budgets) -> Result<bool> {
    Ok(repairs_by(cdb, route, budgets)?.iter().any(|r| !r.is_empty()))
}

/// Does `s` belong to some repair?
pub fn in_some_repair(cdb: &ConstrainedDatabase, s: &Fact, route: Route, budgets: Budgets) -> Result<bool> {
    require_fact(cdb, s)?;
    Ok(repairs_by(cdb, route, budgets)?.iter().any(|r| r.contains(s)))
}

/// Does `s` belong to every repair?
pub fn in_all_repairs(cdb: &ConstrainedDatabase, s: &Fact, route: Route, budgets: Budgets) -> Result<bool> {
    require_fact(cdb, s)?;
    Ok(repairs_by(cdb, route, budgets)?.iter().all(|r| r.contains(s)))
}

/// Is there a repair with at least `k` facts? The empty set is always
/// consistent, so `k = 0` holds on every database.
pub fn exists_repair_of_size(cdb: &ConstrainedDatabase, k: usize, budgets: Budgets) -> Result<bool> {
    if k == 0 {
        return Ok(true);
    }
    if k > cdb.facts().len() {
        return Ok(false);
    }
    Ok(repairs_via_argumentation_with(cdb, budgets)?.max_size() >= k)
}

/// Whether a semantics' extension set must coincide with the repairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Required,
    /// May differ for this constraint profile.
    Informational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SemanticsRow {
    pub semantics: SemanticsKind,
    pub extensions: usize,
    pub equals_repairs: bool,
    pub expectation: Expectation,
}

impl SemanticsRow {
    pub fn ok(&self) -> bool {
        self.equals_repairs || self.expectation == Expectation::Informational
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub profile: ConstraintProfile,
    pub construction: Construction,
    pub facts: usize,
    pub arguments: usize,
    pub repairs: usize,
    pub rows: Vec<SemanticsRow>,
    /// Preferred extensions after pre-processing equal the repairs (only
    /// computed when the profile contains IDs or LTGDs).
    pub preprocessed_preferred: Option<bool>,
    /// Facts removed by pre-processing.
    pub removed: usize,
    /// For ID/LTGD-only inputs: one repair, equal to the facts surviving
    /// pre-processing, and the reduced framework has it as its unique
    /// naive, stable and preferred extension.
    pub unique_after_preprocess: Option<bool>,
    /// See [`preferred_matches_repairs`]. Outside this fragment the
    /// preferred rows are informational.
    pub guaranteed: bool,
    /// Every preferred extension is consistent and inside some repair.
    pub preferred_sound: bool,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(SemanticsRow::ok)
            && self.preferred_sound
            && (self.preprocessed_preferred != Some(false) || !self.guaranteed)
            && self.unique_after_preprocess != Some(false)
    }
}

impl fmt::Display for EquivalenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "profile {} via {}: {} facts, {} arguments, {} repairs",
            self.profile,
            self.construction.name(),
            self.facts,
            self.arguments,
            self.repairs
        )?;
        for r in &self.rows {
            let verdict = match (r.equals_repairs, r.expectation) {
                (true, _) => "equal",
                (false, Expectation::Required) => "MISMATCH",
                (false, Expectation::Informational) => "differs (not guaranteed here)",
            };
            writeln!(f, "  {:<5} {:>3} extensions  {verdict}", r.semantics.short(), r.extensions)?;
        }
        if !self.guaranteed {
            writeln!(f, "  denials and TGDs with a conflict of 3+ facts: preferred may miss repairs")?;
        }
        let verdict = if self.preferred_sound { "holds" } else { "FAILS" };
        writeln!(f, "  every preferred extension inside a repair  {verdict}")?;
        if let Some(ok) = self.preprocessed_preferred {
            let verdict = match (ok, self.guaranteed) {
                (true, _) => "equal",
                (false, true) => "MISMATCH",
                (false, false) => "differs (not guaranteed here)",
            };
            writeln!(f, "  pre-processed pref ({} facts removed)  {verdict}", self.removed)?;
        }
        if let Some(ok) = self.unique_after_preprocess {
            let verdict = if ok { "holds" } else { "FAILS" };
            writeln!(f, "  unique repair = survivors of pre-processing  {verdict}")?;
        }
        write!(f, "  {}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

fn fact_sets(setaf: &Setaf, sigma: SemanticsKind, budgets: Budgets) -> Result<(usize, RepairSet)> {
    let exts = extensions_with(setaf, sigma, budgets.limits())?;
    let n = exts.len();
    let sets = exts.iter().map(|e| setaf.facts_of(&e.members));
    Ok((n, RepairSet::new(sets)))
}

/// Whether the preferred extensions of the profile's framework are exactly
/// the repairs.
///
/// This holds when denials or TGDs are absent, and when both are present
/// but every conflict has at most two facts. Otherwise a fact outside a
/// repair `P` may be excluded only for lacking support, and a conflict `C`
/// of three or more facts containing it attacks some `t` in `P` through
/// `(C \ {t}, t)` without any counter-attack from `P`.
pub fn preferred_matches_repairs(cdb: &ConstrainedDatabase) -> bool {
    let p = cdb.profile();
    !(p.has_denials() && p.has_tgds()) || compute_conflicts(cdb).iter().all(|c| c.facts.len() <= 2)
}

/// Compares the oracle's repairs with the extensions of the profile's
/// framework under naive, preferred and stable semantics.
///
/// Denial-only profiles require all three to match. ID/LTGD-only
/// profiles require preferred to match and the repair to be unique.
/// Mixed profiles require preferred only, and only inside the fragment of
/// [`preferred_matches_repairs`]; every preferred extension must lie inside
/// a repair in all cases.
pub fn check_equivalence(cdb: &ConstrainedDatabase, budgets: Budgets) -> Result<EquivalenceReport> {
    let profile = cdb.profile();
    let repairs = all_repairs_with(cdb, budgets)?;
    let (construction, setaf) = framework_for(cdb)?;
    let denial_only = profile.is_denial_only();
    let guaranteed = preferred_matches_repairs(cdb);
    let mut rows = Vec::new();
    let mut preferred_sound = false;
    for sigma in [SemanticsKind::Naive, SemanticsKind::Preferred, SemanticsKind::Stable] {
        let (count, sets) = fact_sets(&setaf, sigma, budgets)?;
        if sigma == SemanticsKind::Preferred {
            preferred_sound = sets.iter().all(|e| {
                is_consistent(e, cdb.constraints()) && repairs.iter().any(|r| e.is_subset(r))
            });
        }
        let required = (sigma == SemanticsKind::Preferred && guaranteed) || denial_only;
        rows.push(SemanticsRow {
            semantics: sigma,
            extensions: count,
            equals_repairs: sets == repairs,
            expectation: if required {
                Expectation::Required
            } else {
                Expectation::Informational
            },
        });
    }
    let mut report = EquivalenceReport {
        profile,
        construction,
        facts: cdb.facts().len(),
        arguments: setaf.len(),
        repairs: repairs.len(),
        rows,
        preprocessed_preferred: None,
        removed: 0,
        unique_after_preprocess: None,
        guaranteed,
        preferred_sound,
    };
    if profile.has_tgds() {
        let pre = preprocess(&setaf);
        report.removed = pre.removed.len();
        report.preprocessed_preferred = Some(preferred_fact_sets(&pre.reduced, budgets)? == repairs);
        if profile.is_tgd_only() {
            let survivors = pre.surviving_facts();
            let mut ok = repairs.len() == 1 && repairs.repairs[0] == survivors;
            for sigma in [SemanticsKind::Naive, SemanticsKind::Stable, SemanticsKind::Preferred] {
                let (_, sets) = fact_sets(&pre.reduced, sigma, budgets)?;
                ok &= sets.repairs == [survivors.clone()];
            }
            report.unique_after_preprocess = Some(ok);
        }
    }
    Ok(report)
}
