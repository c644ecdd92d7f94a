//! Quasi-projective resolutions: verification, evaluation of `qpd`, the
//! constructive builders and a bounded brute-force search.
//!
//! A bounded complex `P` of graded-free modules resolves `M` quasi-
//! projectively when `H(P) ≅ ⊕_i H(Σ^i M^{a_i})`. Only the ungraded
//! isomorphism type matters for the local ring, so each copy of
//! `H_{j-i}(M)` inside `H_j(P)` may carry its own internal twist.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{is_regular_element, TriState};
use crate::complex::{ChainComplex, ExtInt, FreeComplex, PolyMatrix, PresentedComplex};
use crate::error::{QpdError, Result};
use crate::gmod::{is_isomorphic, iso_obstruction, GradedModule, IsoVerdict, Window};
use crate::linalg::{EchelonBasis, PrimeField};
use crate::poly::Polynomial;
use crate::resolution::{depth_presented, pd, resolve, ring_depth, ring_module, Bound};
use crate::ring::QuotientRing;

pub const DEFAULT_TRIALS: usize = 64;
/// Dimension-consistent multiplicity vectors tried before giving up.
pub const CANDIDATE_CAP: usize = 16;
const ENUMERATION_LIMIT: usize = 512;
const PER_INDEX_LIMIT: usize = 64;

fn mix(seed: u64, j: i64) -> u64 {
    seed ^ (j as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// The homology of the complex being resolved. This is all the definition
/// looks at.
#[derive(Clone, Debug)]
pub struct Target {
    ring: Arc<QuotientRing>,
    min_index: i64,
    modules: Vec<GradedModule>,
}

impl Target {
    pub fn new(ring: Arc<QuotientRing>, min_index: i64, modules: Vec<GradedModule>) -> Result<Self> {
        if modules.iter().any(|m| **m.ring() != *ring) {
            return Err(QpdError::arg("target modules live over different rings"));
        }
        Ok(Target {
            ring,
            min_index,
            modules,
        })
    }

    pub fn from_complex(c: &ChainComplex) -> Self {
        let h = c.homology();
        Target {
            ring: c.ring().clone(),
            min_index: h.min_index,
            modules: h.modules,
        }
    }

    /// Homology of `m`. Over non-artinian rings the window reaches at least
    /// `hi`.
    pub fn from_presented(m: &PresentedComplex, hi: Option<i64>) -> Result<Self> {
        let (lo, nat) = m.natural_window();
        let c = if m.ring().is_artinian() {
            m.expand_natural()?
        } else {
            m.expand(lo, hi.unwrap_or(nat).max(nat))?
        };
        Ok(Self::from_complex(&c))
    }

    /// Homology of `m` on a window wide enough to compare twisted copies
    /// against `H(p)`.
    pub fn for_resolution(m: &PresentedComplex, p: &FreeComplex) -> Result<Self> {
        let (plo, phi) = p.natural_window();
        let (_, mhi) = m.natural_window();
        Self::from_presented(m, Some(mhi + (phi - plo).max(0)))
    }

    pub fn ring(&self) -> &Arc<QuotientRing> {
        &self.ring
    }

    pub fn min_index(&self) -> i64 {
        self.min_index
    }

    pub fn modules(&self) -> &[GradedModule] {
        &self.modules
    }

    pub fn get(&self, n: i64) -> Option<&GradedModule> {
        let k = n - self.min_index;
        if k < 0 {
            return None;
        }
        self.modules.get(k as usize)
    }

    pub fn support(&self) -> Vec<i64> {
        (0..self.modules.len())
            .filter(|&k| !self.modules[k].is_zero())
            .map(|k| self.min_index + k as i64)
            .collect()
    }

    pub fn hsup(&self) -> ExtInt {
        self.support().last().map_or(ExtInt::NegInf, |&n| ExtInt::Fin(n))
    }

    pub fn hinf(&self) -> ExtInt {
        self.support().first().map_or(ExtInt::PosInf, |&n| ExtInt::Fin(n))
    }

    pub fn amp(&self) -> ExtInt {
        match (self.hsup(), self.hinf()) {
            (ExtInt::Fin(a), ExtInt::Fin(b)) => ExtInt::Fin(a - b),
            _ => ExtInt::NegInf,
        }
    }

    /// `(index, lowest degree, dims)` for every nonzero homology module.
    pub fn dims(&self) -> Vec<(i64, i64, Vec<usize>)> {
        self.support()
            .into_iter()
            .map(|n| {
                let m = self.get(n).unwrap();
                let lo = m.initial_degree().unwrap();
                let hi = m.top_nonzero_degree().unwrap();
                (n, lo, (lo..=hi).map(|d| m.dim(d)).collect())
            })
            .collect()
    }

    pub fn with_ring(&self, ring: Arc<QuotientRing>) -> Result<Target> {
        let modules = self
            .modules
            .iter()
            .map(|m| m.with_ring(ring.clone()))
            .collect::<Result<_>>()?;
        Ok(Target {
            ring,
            min_index: self.min_index,
            modules,
        })
    }

    pub fn shift(&self, s: i64) -> Target {
        Target {
            min_index: self.min_index + s,
            ..self.clone()
        }
    }

    pub fn direct_sum(parts: &[&Target]) -> Result<Target> {
        let Some(first) = parts.first() else {
            return Err(QpdError::arg("direct sum of no targets"));
        };
        let ring = first.ring.clone();
        let lo = parts.iter().map(|t| t.min_index).min().unwrap();
        let hi = parts
            .iter()
            .map(|t| t.min_index + t.modules.len() as i64 - 1)
            .max()
            .unwrap();
        let mut modules = Vec::new();
        for n in lo..=hi {
            let here: Vec<&GradedModule> = parts.iter().filter_map(|t| t.get(n)).collect();
            modules.push(if here.is_empty() {
                GradedModule::zero(ring.clone(), Window::new(0, -1, true))
            } else {
                GradedModule::direct_sum(&here)?
            });
        }
        Target::new(ring, lo, modules)
    }
}

/// A verified quasi-projective resolution.
#[derive(Clone, Debug)]
pub struct QpdCertificate {
    pub resolution: FreeComplex,
    pub target: Target,
    /// `ℓ = hinf P - hinf M`, the lowest index with `a_ℓ > 0`.
    pub base_index: i64,
    /// `a_i` for `i` from `ℓ` to `hsup P - hsup M`.
    pub multiplicities: BTreeMap<i64, usize>,
    /// For each index `j`, the copies `(i, twist)` making up `H_j(P)`.
    pub copies: Vec<(i64, Vec<(i64, i64)>)>,
    pub value: i64,
    pub sup: i64,
    pub hsup: i64,
    pub hinf: i64,
    pub witnesses: Vec<(i64, IsoVerdict)>,
    pub window: (i64, i64),
}

impl QpdCertificate {
    pub fn ring(&self) -> &Arc<QuotientRing> {
        self.resolution.ring()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.multiplicities.values().sum()
    }

    /// Amplitude of `H(P)`.
    pub fn amp(&self) -> i64 {
        self.hsup - self.hinf
    }

    /// Runs the check again from scratch.
    pub fn reverify(&self, trials: usize, seed: u64) -> Result<QprOutcome> {
        check_qpr_target(&self.resolution, &self.target, trials, seed)
    }

    /// `pd C_{hsup P}(P)`, which is at most the value.
    pub fn criterion_pd(&self) -> Result<Bound> {
        let p = &self.resolution;
        let h = self.hsup;
        let d = p.diff(h + 1);
        let rels = match d {
            Some(d) => (0..d.cols())
                .map(|j| (0..d.rows()).map(|i| d.get(i, j).clone()).collect())
                .collect(),
            None => Vec::new(),
        };
        let pres = crate::gmod::Presentation {
            shifts: p.term(h).to_vec(),
            relations: rels,
        };
        let c = PresentedComplex::module(p.ring().clone(), pres, 0)?;
        // the truncation P_{≥ h} resolves the cokernel
        let hmax = (p.max_index() - h + 1).max(1);
        Ok(resolve(&c, Some(hmax), true)?.pd)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "failure", rename_all = "snake_case")]
pub enum QprFailure {
    ZeroHomology,
    DimensionObstruction { reason: String },
    WitnessSearchExhausted { candidates: usize, reason: String },
    CandidateCapExhausted { cap: usize, candidates: usize },
}

impl fmt::Display for QprFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QprFailure::ZeroHomology => write!(f, "P has zero homology"),
            QprFailure::DimensionObstruction { reason } => write!(f, "dimension obstruction: {reason}"),
            QprFailure::WitnessSearchExhausted { candidates, reason } => {
                write!(f, "witness search exhausted after {candidates} candidates: {reason}")
            }
            QprFailure::CandidateCapExhausted { cap, candidates } => {
                write!(f, "candidate cap {cap} exhausted ({candidates} dimension-consistent)")
            }
        }
    }
}

pub type QprOutcome = std::result::Result<QpdCertificate, QprFailure>;

/// Hilbert function of a nonzero module from its initial degree.
struct Profile {
    init: i64,
    vals: Vec<usize>,
    /// Top of the known window for incomplete modules.
    known_hi: Option<i64>,
}

impl Profile {
    fn of(m: &GradedModule) -> Option<Profile> {
        let init = m.initial_degree()?;
        let w = m.window();
        let top = if w.complete {
            m.top_nonzero_degree().unwrap()
        } else {
            w.hi
        };
        Some(Profile {
            init,
            vals: (init..=top).map(|d| m.dim(d)).collect(),
            known_hi: (!w.complete).then_some(w.hi),
        })
    }

    fn at(&self, e: i64) -> usize {
        let k = e - self.init;
        if k < 0 {
            return 0;
        }
        self.vals.get(k as usize).copied().unwrap_or(0)
    }

    fn top(&self) -> i64 {
        self.init + self.vals.len() as i64 - 1
    }
}

struct Kind<'a> {
    i: i64,
    prof: &'a Profile,
    budget: Option<usize>,
}

struct Frame {
    c_lo: i64,
    c_hi: i64,
    p_complete: bool,
}

/// Decompositions of the Hilbert function `rem` into twisted copies.
/// Copies are placed in order of their initial degree, which is always the
/// lowest degree still uncovered.
#[allow(clippy::too_many_arguments)]
fn peel(
    fr: &Frame,
    rem: &mut [i64],
    kinds: &[Kind],
    used: &mut [usize],
    last: (i64, usize),
    copies: &mut Vec<(usize, i64)>,
    out: &mut Vec<(Vec<usize>, Vec<(usize, i64)>)>,
) {
    if out.len() >= PER_INDEX_LIMIT {
        return;
    }
    let Some(pos) = rem.iter().position(|&v| v != 0) else {
        if kinds
            .iter()
            .zip(used.iter())
            .all(|(k, &u)| k.budget.is_none_or(|b| b == u))
        {
            out.push((used.to_vec(), copies.clone()));
        }
        return;
    };
    if rem[pos] < 0 {
        return;
    }
    let d = fr.c_lo + pos as i64;
    for (k, kind) in kinds.iter().enumerate() {
        if d == last.0 && k < last.1 {
            continue;
        }
        if kind.budget.is_some_and(|b| used[k] >= b) {
            continue;
        }
        let t = d - kind.prof.init;
        if kind.prof.known_hi.is_some_and(|h| h + t < fr.c_hi) {
            continue;
        }
        if fr.p_complete && kind.prof.known_hi.is_none() && kind.prof.top() + t > fr.c_hi {
            continue;
        }
        let mut ok = true;
        for (q, v) in rem.iter_mut().enumerate() {
            *v -= kind.prof.at(fr.c_lo + q as i64 - t) as i64;
            ok &= *v >= 0;
        }
        if ok {
            used[k] += 1;
            copies.push((k, t));
            peel(fr, rem, kinds, used, (d, k), copies, out);
            copies.pop();
            used[k] -= 1;
        }
        for (q, v) in rem.iter_mut().enumerate() {
            *v += kind.prof.at(fr.c_lo + q as i64 - t) as i64;
        }
    }
}

#[derive(Clone, Debug)]
struct Candidate {
    a: BTreeMap<i64, usize>,
    copies: Vec<(i64, Vec<(i64, i64)>)>,
}

struct Solver<'a> {
    fr: Frame,
    hf: BTreeMap<i64, Vec<i64>>,
    profiles: BTreeMap<i64, Profile>,
    hinf_p: i64,
    hsup_p: i64,
    hinf_m: i64,
    i_min: i64,
    i_max: i64,
    _target: &'a Target,
}

impl Solver<'_> {
    fn run(
        &self,
        j: i64,
        known: &mut BTreeMap<i64, usize>,
        acc: &mut Vec<(i64, Vec<(i64, i64)>)>,
        out: &mut Vec<Candidate>,
    ) {
        if out.len() >= ENUMERATION_LIMIT {
            return;
        }
        if j > self.hsup_p {
            if known.get(&self.i_max).copied().unwrap_or(0) > 0 {
                out.push(Candidate {
                    a: known.clone(),
                    copies: acc.clone(),
                });
            }
            return;
        }
        let new_i = self.i_min + (j - self.hinf_p);
        let mut kinds = Vec::new();
        for (&i, &c) in known.iter() {
            if c == 0 {
                continue;
            }
            if let Some(prof) = self.profiles.get(&(j - i)) {
                kinds.push(Kind {
                    i,
                    prof,
                    budget: Some(c),
                });
            }
        }
        let fresh = new_i <= self.i_max;
        if fresh {
            kinds.push(Kind {
                i: new_i,
                prof: &self.profiles[&self.hinf_m],
                budget: None,
            });
        }
        let mut rem = self.hf[&j].clone();
        let mut used = vec![0; kinds.len()];
        let mut sols = Vec::new();
        peel(&self.fr, &mut rem, &kinds, &mut used, (i64::MIN, 0), &mut Vec::new(), &mut sols);
        for (used, copies) in sols {
            if fresh {
                known.insert(new_i, *used.last().unwrap());
            }
            acc.push((j, copies.iter().map(|&(k, t)| (kinds[k].i, t)).collect()));
            self.run(j + 1, known, acc, out);
            acc.pop();
            if fresh {
                known.remove(&new_i);
            }
        }
    }
}

/// Checks `p` against the homology of `m`.
pub fn check_qpr(p: &FreeComplex, m: &PresentedComplex, trials: usize, seed: u64) -> Result<QprOutcome> {
    let target = Target::for_resolution(m, p)?;
    check_qpr_target(p, &target, trials, seed)
}

/// Finds multiplicities and twists with matching Hilbert functions, then
/// proves each `H_j(P) ≅ ⊕ H_{j-i}(M)(-t)` by an explicit isomorphism.
pub fn check_qpr_target(p: &FreeComplex, target: &Target, trials: usize, seed: u64) -> Result<QprOutcome> {
    let ring = p.ring().clone();
    if *ring != **target.ring() {
        return Err(QpdError::arg("resolution and target live over different rings"));
    }
    let (ExtInt::Fin(hinf_m), ExtInt::Fin(hsup_m)) = (target.hinf(), target.hsup()) else {
        return Err(QpdError::arg("target has zero homology"));
    };
    if p.is_zero() {
        return Ok(Err(QprFailure::ZeroHomology));
    }
    let (c_lo, c_hi) = p.natural_window();
    let pe = p.expand(c_lo, c_hi)?;
    let hp = pe.homology();
    let (ExtInt::Fin(hinf_p), ExtInt::Fin(hsup_p)) = (hp.hinf(), hp.hsup()) else {
        return Ok(Err(QprFailure::ZeroHomology));
    };
    let (i_min, i_max) = (hinf_p - hinf_m, hsup_p - hsup_m);
    if i_min > i_max {
        return Ok(Err(QprFailure::DimensionObstruction {
            reason: format!(
                "H(P) has amplitude {} below the amplitude {} of H(M)",
                hsup_p - hinf_p,
                hsup_m - hinf_m
            ),
        }));
    }
    let p_complete = pe.window().complete;
    let mut hf = BTreeMap::new();
    for j in hinf_p..=hsup_p {
        let h = hp.get(j).unwrap();
        hf.insert(j, (c_lo..=c_hi).map(|d| h.dim(d) as i64).collect::<Vec<_>>());
    }
    let profiles: BTreeMap<i64, Profile> = target
        .support()
        .into_iter()
        .map(|s| (s, Profile::of(target.get(s).unwrap()).unwrap()))
        .collect();
    let solver = Solver {
        fr: Frame {
            c_lo,
            c_hi,
            p_complete,
        },
        hf,
        profiles,
        hinf_p,
        hsup_p,
        hinf_m,
        i_min,
        i_max,
        _target: target,
    };
    let mut cands = Vec::new();
    solver.run(hinf_p, &mut BTreeMap::new(), &mut Vec::new(), &mut cands);
    if cands.is_empty() {
        return Ok(Err(QprFailure::DimensionObstruction {
            reason: "no multiplicities and twists match the graded homology dimensions".into(),
        }));
    }
    cands.sort_by_key(|c| c.a.values().sum::<usize>());
    // graded dimensions alone leave candidates that the cheap numerical
    // invariants (action ranks, generator degrees) already exclude
    let mut obstruction = String::new();
    let mut survivors = Vec::new();
    for c in cands {
        match numerical_obstruction(&ring, &hp, target, &c)? {
            Some(r) => obstruction = r,
            None => survivors.push(c),
        }
    }
    if survivors.is_empty() {
        return Ok(Err(QprFailure::DimensionObstruction { reason: obstruction }));
    }
    let cands = survivors;
    let total = cands.len();
    let mut last_reason = String::new();
    for cand in cands.iter().take(CANDIDATE_CAP) {
        match verify_candidate(&ring, &hp, target, cand, trials, seed)? {
            Ok(witnesses) => {
                let sup = p.sup().unwrap();
                return Ok(Ok(QpdCertificate {
                    resolution: p.clone(),
                    target: target.clone(),
                    base_index: i_min,
                    multiplicities: cand.a.clone(),
                    copies: cand.copies.clone(),
                    value: sup - hsup_p,
                    sup,
                    hsup: hsup_p,
                    hinf: hinf_p,
                    witnesses,
                    window: (c_lo, c_hi),
                }));
            }
            Err(reason) => last_reason = reason,
        }
    }
    if total > CANDIDATE_CAP {
        return Ok(Err(QprFailure::CandidateCapExhausted {
            cap: CANDIDATE_CAP,
            candidates: total,
        }));
    }
    Ok(Err(QprFailure::WitnessSearchExhausted {
        candidates: total,
        reason: last_reason,
    }))
}

fn copy_sum(ring: &Arc<QuotientRing>, h: &GradedModule, target: &Target, j: i64, list: &[(i64, i64)]) -> Result<GradedModule> {
    let parts: Vec<GradedModule> = list
        .iter()
        .map(|&(i, t)| target.get(j - i).unwrap().raise(t))
        .collect();
    if parts.is_empty() {
        return Ok(GradedModule::zero(ring.clone(), h.window()));
    }
    let refs: Vec<&GradedModule> = parts.iter().collect();
    GradedModule::direct_sum(&refs)
}

fn numerical_obstruction(
    ring: &Arc<QuotientRing>,
    hp: &crate::complex::HomologyFamily,
    target: &Target,
    cand: &Candidate,
) -> Result<Option<String>> {
    for (j, list) in &cand.copies {
        let h = hp.get(*j).unwrap();
        let sum = copy_sum(ring, h, target, *j, list)?;
        if let Some(r) = iso_obstruction(h, &sum) {
            return Ok(Some(format!("H_{j}(P): {r}")));
        }
    }
    Ok(None)
}

fn verify_candidate(
    ring: &Arc<QuotientRing>,
    hp: &crate::complex::HomologyFamily,
    target: &Target,
    cand: &Candidate,
    trials: usize,
    seed: u64,
) -> Result<std::result::Result<Vec<(i64, IsoVerdict)>, String>> {
    let mut witnesses = Vec::new();
    for (j, list) in &cand.copies {
        let h = hp.get(*j).unwrap();
        let sum = copy_sum(ring, h, target, *j, list)?;
        let v = is_isomorphic(h, &sum, trials, mix(seed, *j));
        match &v {
            IsoVerdict::ProvenIsomorphic(_) => witnesses.push((*j, v)),
            IsoVerdict::ProvenNot(r) => return Ok(Err(format!("H_{j}(P): {r}"))),
            IsoVerdict::NotFoundWithinTrials { trials, .. } => {
                return Ok(Err(format!("H_{j}(P): no isomorphism in {trials} trials")))
            }
        }
    }
    Ok(Ok(witnesses))
}

/// Budgets of the bounded search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_rank: usize,
    pub window: usize,
    pub max_candidates: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_rank: 3,
            window: 4,
            max_candidates: 200_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct QpdOptions {
    pub hmax: Option<i64>,
    pub trials: usize,
    pub seed: u64,
    pub builders: bool,
    pub search: Option<SearchBudget>,
}

impl Default for QpdOptions {
    fn default() -> Self {
        QpdOptions {
            hmax: None,
            trials: DEFAULT_TRIALS,
            seed: 0,
            builders: true,
            search: Some(SearchBudget::default()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbCheck {
    #[serde(rename = "depth_R")]
    pub depth_r: i64,
    #[serde(rename = "depth_M")]
    pub depth_m: i64,
    pub hsup: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attempt {
    pub strategy: String,
    pub outcome: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetReport {
    pub hmax: Option<i64>,
    pub trials: usize,
    pub search: Option<SearchBudget>,
    pub search_stats: Option<SearchStats>,
    pub attempts: Vec<Attempt>,
}

#[derive(Clone, Debug)]
pub enum QpdVerdict {
    Certified {
        cert: Box<QpdCertificate>,
        exact: bool,
        ab_check: AbCheck,
        strategy: String,
    },
    UpperBound {
        value: i64,
        cert: Box<QpdCertificate>,
        reason: String,
        strategy: String,
    },
    NotFoundWithinBounds {
        budgets: BudgetReport,
    },
    InfiniteNotCertifiable {
        note: String,
    },
}

impl QpdVerdict {
    pub fn value(&self) -> Option<i64> {
        match self {
            QpdVerdict::Certified { cert, .. } => Some(cert.value),
            QpdVerdict::UpperBound { value, .. } => Some(*value),
            _ => None,
        }
    }

    pub fn exact_value(&self) -> Option<i64> {
        match self {
            QpdVerdict::Certified { cert, exact: true, .. } => Some(cert.value),
            _ => None,
        }
    }

    pub fn certificate(&self) -> Option<&QpdCertificate> {
        match self {
            QpdVerdict::Certified { cert, .. } | QpdVerdict::UpperBound { cert, .. } => Some(cert),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            QpdVerdict::Certified { .. } => "certified",
            QpdVerdict::UpperBound { .. } => "upper_bound",
            QpdVerdict::NotFoundWithinBounds { .. } => "not_found_within_bounds",
            QpdVerdict::InfiniteNotCertifiable { .. } => "infinite_not_certifiable",
        }
    }
}

/// Cross-checks a certificate against `qpd M + hsup M = depth R - depth M`.
/// A value below the forced one is an internal inconsistency; a value
/// above it (or undetermined depth) leaves an upper bound.
pub fn grade_certificate(
    cert: QpdCertificate,
    depth_r: Bound,
    depth_m: Bound,
    hsup_m: i64,
    strategy: &str,
) -> Result<QpdVerdict> {
    let (Bound::Finite(dr), Bound::Finite(dm)) = (depth_r, depth_m) else {
        return Ok(QpdVerdict::UpperBound {
            value: cert.value,
            cert: Box::new(cert),
            reason: "depth could not be determined, so the AB cross-check is unavailable".into(),
            strategy: strategy.into(),
        });
    };
    let forced = dr - dm - hsup_m;
    match cert.value.cmp(&forced) {
        std::cmp::Ordering::Less => Err(QpdError::Inconsistent(format!(
            "certificate value {} is below depth R - depth M - hsup M = {dr} - {dm} - {hsup_m}",
            cert.value
        ))),
        std::cmp::Ordering::Equal => Ok(QpdVerdict::Certified {
            cert: Box::new(cert),
            exact: true,
            ab_check: AbCheck {
                depth_r: dr,
                depth_m: dm,
                hsup: hsup_m,
            },
            strategy: strategy.into(),
        }),
        std::cmp::Ordering::Greater => Ok(QpdVerdict::UpperBound {
            value: cert.value,
            reason: format!("exceeds depth R - depth M - hsup M = {forced}"),
            cert: Box::new(cert),
            strategy: strategy.into(),
        }),
    }
}

fn note(attempts: &mut Vec<Attempt>, strategy: &str, outcome: impl Into<String>) {
    attempts.push(Attempt {
        strategy: strategy.into(),
        outcome: outcome.into(),
    });
}

/// Evaluates `qpd M`: finite projective dimension first, then the lift of
/// a resolution over the ambient polynomial ring, then the bounded search.
/// Every certificate is graded against the derived AB formula.
pub fn qpd_eval(m: &PresentedComplex, opts: &QpdOptions) -> Result<QpdVerdict> {
    let ring = m.ring().clone();
    let base = Target::from_presented(m, None)?;
    let ExtInt::Fin(hsup) = base.hsup() else {
        return Err(QpdError::arg("qpd of a complex with zero homology is -inf"));
    };
    let mut attempts = Vec::new();
    let mut found: Vec<(String, QpdCertificate)> = Vec::new();
    let mut stats = None;

    match pd(m, opts.hmax) {
        Ok(r) => match r.pd {
            Bound::Finite(n) => {
                match check_qpr(&r.complex, m, opts.trials, opts.seed)? {
                    Ok(c) if c.value == n - hsup => {
                        note(&mut attempts, "projective resolution", format!("pd {n}"));
                        found.push(("projective resolution".into(), c));
                    }
                    Ok(c) => {
                        return Err(QpdError::Inconsistent(format!(
                            "resolution of pd {n} certifies value {} instead of pd - hsup = {}",
                            c.value,
                            n - hsup
                        )))
                    }
                    Err(f) => {
                        return Err(QpdError::Inconsistent(format!(
                            "a projective resolution failed the quasi-projective check: {f}"
                        )))
                    }
                }
            }
            Bound::AtLeast(n) => note(&mut attempts, "projective resolution", format!("pd >= {n}")),
            Bound::MinusInfinity => return Err(QpdError::arg("complex is acyclic")),
        },
        Err(e) if e.is_budget() => note(&mut attempts, "projective resolution", e.to_string()),
        Err(e) => return Err(e),
    }

    if found.is_empty() && opts.builders && !ring.generators().is_empty() {
        match ambient_lift(m, opts) {
            Ok(Ok(c)) => {
                note(&mut attempts, "ambient lift", format!("value {}", c.value));
                found.push(("ambient lift".into(), c));
            }
            Ok(Err(f)) => note(&mut attempts, "ambient lift", f.to_string()),
            Err(e) if e.is_budget() => note(&mut attempts, "ambient lift", e.to_string()),
            Err(e) => return Err(e),
        }
    }

    let (depth_r, depth_m) = if found.is_empty() {
        (None, None)
    } else {
        (Some(ring_depth(&ring)?.depth), Some(depth_presented(m)?.depth))
    };
    let forced = match (depth_r, depth_m) {
        (Some(Bound::Finite(a)), Some(Bound::Finite(b))) => Some(a - b - hsup),
        _ => None,
    };
    let exact_found = forced.is_some_and(|f| found.iter().any(|(_, c)| c.value == f));

    if !exact_found {
        if let Some(budget) = opts.search {
            if searchable(&ring) {
                match search_certificate(m, &budget, opts.trials, opts.seed) {
                    Ok((c, s)) => {
                        match &c {
                            Some(c) => note(&mut attempts, "search", format!("value {}", c.value)),
                            None => note(&mut attempts, "search", format!("nothing within {} complexes", s.complexes)),
                        }
                        stats = Some(s);
                        if let Some(c) = c {
                            found.push(("search".into(), c));
                        }
                    }
                    Err(e) if e.is_budget() => note(&mut attempts, "search", e.to_string()),
                    Err(e) => return Err(e),
                }
            } else {
                note(&mut attempts, "search", "skipped: ring is not artinian of dimension at most 6");
            }
        }
    }

    let Some(best) = found.iter().enumerate().min_by_key(|(k, (_, c))| (c.value, *k)).map(|(k, _)| k) else {
        return Ok(QpdVerdict::NotFoundWithinBounds {
            budgets: BudgetReport {
                hmax: opts.hmax,
                trials: opts.trials,
                search: opts.search,
                search_stats: stats,
                attempts,
            },
        });
    };
    let (strategy, cert) = found.swap_remove(best);
    let depth_r = match depth_r {
        Some(d) => d,
        None => ring_depth(&ring)?.depth,
    };
    let depth_m = match depth_m {
        Some(d) => d,
        None => depth_presented(m)?.depth,
    };
    grade_certificate(cert, depth_r, depth_m, hsup, &strategy)
}

/// Resolves `M` over the ambient polynomial ring and reduces the
/// resolution back to `R`.
pub fn ambient_lift(m: &PresentedComplex, opts: &QpdOptions) -> Result<QprOutcome> {
    let lifted = m.over_ambient()?;
    let r = resolve(&lifted, opts.hmax.map(|h| h.max(lifted.ring().nvars() as i64 + 1)), true)?;
    if r.pd.finite().is_none() {
        return Err(QpdError::budget("ambient resolution length", r.top_index.max(0) as usize));
    }
    let p = r.complex.change_ring(m.ring().clone())?.minimalize();
    check_qpr(&p, m, opts.trials, opts.seed)
}

fn searchable(ring: &QuotientRing) -> bool {
    ring.is_artinian() && ring.total_dim().is_some_and(|d| d <= 6)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub complexes: usize,
    pub f2_certificates: usize,
    pub lift_attempts: usize,
    pub truncated: bool,
}

/// Bounded search wrapped as a verdict.
pub fn search(m: &PresentedComplex, budget: &SearchBudget, trials: usize, seed: u64) -> Result<QpdVerdict> {
    let base = Target::from_presented(m, None)?;
    let ExtInt::Fin(hsup) = base.hsup() else {
        return Err(QpdError::arg("search on a complex with zero homology"));
    };
    let (cert, stats) = search_certificate(m, budget, trials, seed)?;
    match cert {
        Some(c) => {
            let dr = ring_depth(m.ring())?.depth;
            let dm = depth_presented(m)?.depth;
            grade_certificate(c, dr, dm, hsup, "search")
        }
        None => Ok(QpdVerdict::NotFoundWithinBounds {
            budgets: BudgetReport {
                hmax: None,
                trials,
                search: Some(*budget),
                attempts: vec![Attempt {
                    strategy: "search".into(),
                    outcome: format!("nothing within {} complexes", stats.complexes),
                }],
                search_stats: Some(stats),
            },
        }),
    }
}

/// Enumerates minimal free complexes over `R ⊗ F_2` with total rank and
/// index span inside the budget, keeps those passing the check there, and
/// lifts them back with all sign patterns. Returns the lifted certificate
/// of least value.
pub fn search_certificate(
    m: &PresentedComplex,
    budget: &SearchBudget,
    trials: usize,
    seed: u64,
) -> Result<(Option<QpdCertificate>, SearchStats)> {
    let ring = m.ring().clone();
    if !searchable(&ring) {
        return Err(QpdError::arg("search needs an artinian ring of dimension at most 6"));
    }
    let f2 = PrimeField::new(2)?;
    let r2 = Arc::new(ring.with_field(f2)?);
    let m2 = m.change_ring(r2.clone())?;
    let t2 = Target::from_presented(&m2, None)?;
    let tp = Target::from_presented(m, None)?;
    let mut stats = SearchStats::default();
    if t2.hsup() == ExtInt::NegInf {
        return Ok((None, stats));
    }
    let complexes = enumerate_complexes(&r2, budget, &mut stats)?;
    let hits: Vec<(usize, QpdCertificate)> = complexes
        .par_iter()
        .enumerate()
        .filter_map(|(k, p)| match check_qpr_target(p, &t2, trials, seed) {
            Ok(Ok(c)) => Some((k, c)),
            _ => None,
        })
        .collect();
    stats.f2_certificates = hits.len();
    let mut hits = hits;
    hits.sort_by_key(|(k, c)| (c.value, *k));
    for (_, c) in &hits {
        for p in sign_lifts(&c.resolution, &ring)? {
            stats.lift_attempts += 1;
            if let Ok(Ok(cert)) = check_qpr_target(&p, &tp, trials, seed) {
                return Ok((Some(cert), stats));
            }
        }
    }
    Ok((None, stats))
}

fn enumerate_complexes(r2: &Arc<QuotientRing>, budget: &SearchBudget, stats: &mut SearchStats) -> Result<Vec<FreeComplex>> {
    let top = r2.top_degree().unwrap_or(0).max(1);
    // entry options per degree, zero included first
    let mut options: Vec<Vec<Polynomial>> = vec![vec![r2.poly_ring().zero()]];
    for deg in 1..=top {
        let n = r2.dim(deg);
        let mut opts = Vec::with_capacity(1 << n);
        for mask in 0u32..(1 << n) {
            let coords: Vec<u32> = (0..n).map(|b| (mask >> b) & 1).collect();
            opts.push(r2.poly_from_coords(deg, &coords));
        }
        options.push(opts);
    }
    let mut out = Vec::new();
    for len in 1..=budget.window.max(1) {
        for ranks in compositions(len, budget.max_rank) {
            let span = len as i64 * top;
            for shifts in shift_choices(&ranks, span) {
                let mut diffs = Vec::new();
                fill_diffs(r2, &shifts, &options, &mut diffs, &mut out, budget.max_candidates, stats)?;
                if stats.truncated {
                    return Ok(out);
                }
            }
        }
    }
    Ok(out)
}

/// Rank vectors of the given length with positive ends and total at most
/// `max`.
fn compositions(len: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn rec(k: usize, len: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == len {
            if cur[0] > 0 && cur[len - 1] > 0 {
                out.push(cur.clone());
            }
            return;
        }
        for r in 0..=left {
            cur.push(r);
            rec(k + 1, len, left - r, cur, out);
            cur.pop();
        }
    }
    rec(0, len, max, &mut Vec::new(), &mut out);
    out
}

/// Nondecreasing shifts per term in `[0, span]` with overall minimum 0.
fn shift_choices(ranks: &[usize], span: i64) -> Vec<Vec<Vec<i64>>> {
    fn multisets(n: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
        if n == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for a in lo..=hi {
            for mut rest in multisets(n - 1, a, hi) {
                rest.insert(0, a);
                out.push(rest);
            }
        }
        out
    }
    let per: Vec<Vec<Vec<i64>>> = ranks.iter().map(|&r| multisets(r, 0, span)).collect();
    let mut out: Vec<Vec<Vec<i64>>> = vec![Vec::new()];
    for choices in &per {
        let mut next = Vec::new();
        for prefix in &out {
            for c in choices {
                let mut p = prefix.clone();
                p.push(c.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out.retain(|s| s.iter().flatten().min() == Some(&0));
    out
}

fn fill_diffs(
    r2: &Arc<QuotientRing>,
    shifts: &[Vec<i64>],
    options: &[Vec<Polynomial>],
    diffs: &mut Vec<PolyMatrix>,
    out: &mut Vec<FreeComplex>,
    cap: usize,
    stats: &mut SearchStats,
) -> Result<()> {
    let k = diffs.len();
    if k + 1 == shifts.len() {
        if out.len() >= cap {
            stats.truncated = true;
            return Ok(());
        }
        stats.complexes += 1;
        out.push(FreeComplex::new(r2.clone(), 0, shifts.to_vec(), diffs.clone())?);
        return Ok(());
    }
    let (tgt, src) = (&shifts[k], &shifts[k + 1]);
    let slots: Vec<(usize, usize, &Vec<Polynomial>)> = (0..tgt.len())
        .flat_map(|i| (0..src.len()).map(move |j| (i, j)))
        .map(|(i, j)| {
            let deg = src[j] - tgt[i];
            let o = if deg >= 1 && (deg as usize) < options.len() {
                &options[deg as usize]
            } else {
                &options[0]
            };
            (i, j, o)
        })
        .collect();
    let mut idx = vec![0usize; slots.len()];
    loop {
        let mut d = PolyMatrix::zeros(r2, tgt.len(), src.len());
        for (s, &(i, j, o)) in slots.iter().enumerate() {
            d.set(i, j, o[idx[s]].clone());
        }
        let composes = k == 0 || diffs[k - 1].mul(r2, &d).is_zero();
        if composes {
            diffs.push(d);
            fill_diffs(r2, shifts, options, diffs, out, cap, stats)?;
            diffs.pop();
            if stats.truncated {
                return Ok(());
            }
        }
        // odometer
        let mut s = 0;
        loop {
            if s == slots.len() {
                return Ok(());
            }
            idx[s] += 1;
            if idx[s] < slots[s].2.len() {
                break;
            }
            idx[s] = 0;
            s += 1;
        }
    }
}

/// All sign patterns on the terms of an `F_2` complex, read over `ring`,
/// that still square to zero.
fn sign_lifts(p2: &FreeComplex, ring: &Arc<QuotientRing>) -> Result<Vec<FreeComplex>> {
    let q = ring.poly_ring();
    let mut positions = Vec::new();
    for (k, d) in p2.diffs().iter().enumerate() {
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                for t in 0..d.get(i, j).terms().len() {
                    positions.push((k, i, j, t));
                }
            }
        }
    }
    let n = positions.len().min(12);
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let mut diffs: Vec<PolyMatrix> = p2
            .diffs()
            .iter()
            .map(|d| PolyMatrix::zeros(ring, d.rows(), d.cols()))
            .collect();
        let mut pos = 0;
        for (k, d) in p2.diffs().iter().enumerate() {
            for i in 0..d.rows() {
                for j in 0..d.cols() {
                    let terms: Vec<_> = d
                        .get(i, j)
                        .terms()
                        .iter()
                        .map(|(mono, _)| {
                            let neg = pos < n && (mask >> pos) & 1 == 1;
                            pos += 1;
                            (mono.clone(), if neg { q.field().neg(1) } else { 1 })
                        })
                        .collect();
                    diffs[k].set(i, j, q.from_terms(terms));
                }
            }
        }
        if let Ok(c) = FreeComplex::new(ring.clone(), p2.min_index(), p2.terms().to_vec(), diffs) {
            out.push(c);
        }
    }
    Ok(out)
}

/// Outcome of a constructive builder.
#[derive(Clone, Debug)]
pub enum BuildOutcome {
    Built(Box<QpdCertificate>),
    Rejected(String),
    Inapplicable(String),
    Unverified(QprFailure),
}

impl BuildOutcome {
    pub fn certificate(&self) -> Option<&QpdCertificate> {
        match self {
            BuildOutcome::Built(c) => Some(c),
            _ => None,
        }
    }

    fn from_check(o: QprOutcome) -> BuildOutcome {
        match o {
            Ok(c) => BuildOutcome::Built(Box::new(c)),
            Err(f) => BuildOutcome::Unverified(f),
        }
    }
}

fn ring_as_module(ring: &Arc<QuotientRing>) -> Result<GradedModule> {
    GradedModule::expand(ring.clone(), &ring_module(), None)
}

fn annihilates(f: &Polynomial, m: &GradedModule) -> Result<bool> {
    let fd = m.ring().degree_of(f)?;
    for d in m.window().degrees() {
        if m.dim(d) == 0 {
            continue;
        }
        if let Some(a) = m.poly_action(f, fd, d) {
            if !a.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `M / f M`.
pub fn cokernel_of(m: &GradedModule, f: &Polynomial) -> Result<GradedModule> {
    let fd = m.ring().degree_of(f)?;
    let field = m.field();
    let lower: Vec<EchelonBasis> = m
        .window()
        .degrees()
        .map(|d| match m.poly_action(f, fd, d - fd) {
            Some(a) if d - fd >= m.lo() && a.rows() == m.dim(d) => EchelonBasis::column_span(&a),
            _ => EchelonBasis::empty(field, m.dim(d)),
        })
        .collect();
    Ok(m.subquotient_by(None, &lower).0)
}

fn check_regular(f: &Polynomial, m: &GradedModule, what: &str) -> Result<Option<String>> {
    Ok(match is_regular_element(f, m)? {
        TriState::Yes => None,
        TriState::No => Some(format!("{} is not regular on {what}", m.ring().format(f))),
        TriState::Unknown => Some(format!("regularity of {} on {what} is undecided", m.ring().format(f))),
    })
}

/// `K(x; P) ≃ P ⊗ R/(x)` resolves `K(x; M)` over `R/(x)`, whose homology
/// is `H(M)/x H(M)` when `x` is regular on `R` and on `H(M)`.
pub fn koszul_transfer(cert: &QpdCertificate, x: &Polynomial, trials: usize, seed: u64) -> Result<BuildOutcome> {
    let ring = cert.ring().clone();
    if let Some(r) = check_regular(x, &ring_as_module(&ring)?, "R")? {
        return Ok(BuildOutcome::Rejected(r));
    }
    for n in cert.target.support() {
        if let Some(r) = check_regular(x, cert.target.get(n).unwrap(), &format!("H_{n}(M)"))? {
            return Ok(BuildOutcome::Rejected(r));
        }
    }
    let quot = Arc::new(ring.quotient_by(std::slice::from_ref(x))?);
    let p = cert.resolution.change_ring(quot.clone())?.minimalize();
    let modules = cert
        .target
        .modules()
        .iter()
        .map(|m| cokernel_of(m, x)?.with_ring(quot.clone()))
        .collect::<Result<Vec<_>>>()?;
    let target = Target::new(quot, cert.target.min_index(), modules)?;
    Ok(BuildOutcome::from_check(check_qpr_target(&p, &target, trials, seed)?))
}

fn killed_by(cert: &QpdCertificate, x: &Polynomial) -> Result<Option<String>> {
    for n in cert.target.support() {
        if !annihilates(x, cert.target.get(n).unwrap())? {
            return Ok(Some(format!("{} does not annihilate H_{n}(M)", cert.ring().format(x))));
        }
    }
    Ok(None)
}

/// Smallest `n` accepted by [`power_reduction`] for a sequence of length
/// `d`.
pub fn power_threshold(cert: &QpdCertificate, d: usize) -> i64 {
    cert.amp() + (d as i64).max(2)
}

/// `P ⊗ R/(x_1^n, …, x_d^n)` for an `R/(x)`-complex `M`.
pub fn power_reduction(
    cert: &QpdCertificate,
    xs: &[Polynomial],
    n: u32,
    trials: usize,
    seed: u64,
) -> Result<BuildOutcome> {
    let ring = cert.ring().clone();
    if (n as i64) < power_threshold(cert, xs.len()) {
        return Ok(BuildOutcome::Rejected(format!(
            "n = {n} is below the threshold amp P + max(2, d) = {}",
            power_threshold(cert, xs.len())
        )));
    }
    let q = ring.poly_ring();
    let mut cur = ring.clone();
    let mut powers = Vec::new();
    for x in xs {
        if let Some(r) = check_regular(x, &ring_as_module(&cur)?, "the current quotient of R")? {
            return Ok(BuildOutcome::Rejected(r));
        }
        if let Some(r) = killed_by(cert, x)? {
            return Ok(BuildOutcome::Rejected(r));
        }
        let xn = q.pow(x, n);
        cur = Arc::new(cur.quotient_by(std::slice::from_ref(&xn))?);
        powers.push(xn);
    }
    let quot = Arc::new(ring.quotient_by(&powers)?);
    let p = cert.resolution.change_ring(quot.clone())?.minimalize();
    let target = cert.target.with_ring(quot)?;
    Ok(BuildOutcome::from_check(check_qpr_target(&p, &target, trials, seed)?))
}

/// Reduction along a regular sequence killing `M`, verifying at each step
/// that `H(K(x; P)) ≅ H(P) ⊕ H(ΣP)(-deg x)` instead of assuming the Ext
/// vanishing that implies it.
pub fn split_reduction(cert: &QpdCertificate, xs: &[Polynomial], trials: usize, seed: u64) -> Result<BuildOutcome> {
    let mut cur = cert.clone();
    for x in xs {
        let ring = cur.ring().clone();
        if let Some(r) = check_regular(x, &ring_as_module(&ring)?, "the current ring")? {
            return Ok(BuildOutcome::Rejected(r));
        }
        if let Some(r) = killed_by(&cur, x)? {
            return Ok(BuildOutcome::Rejected(r));
        }
        let e = ring.degree_of(x)?;
        let quot = Arc::new(ring.quotient_by(std::slice::from_ref(x))?);
        let p1 = cur.resolution.change_ring(quot.clone())?;
        let hp = cur.resolution.expand_natural()?.homology();
        let hp1 = p1.expand_natural()?.homology();
        let lo = hp.min_index.min(hp1.min_index);
        let hi = (hp.min_index + hp.modules.len() as i64).max(hp1.min_index + hp1.modules.len() as i64);
        for j in lo..=hi {
            let mut parts = Vec::new();
            if let Some(h) = hp.get(j) {
                parts.push(h.with_ring(quot.clone())?);
            }
            if let Some(h) = hp.get(j - 1) {
                parts.push(h.raise(e).with_ring(quot.clone())?);
            }
            let lhs = match hp1.get(j) {
                Some(h) => h.clone(),
                None => GradedModule::zero(quot.clone(), Window::new(0, -1, true)),
            };
            let refs: Vec<&GradedModule> = parts.iter().collect();
            let rhs = if refs.is_empty() {
                GradedModule::zero(quot.clone(), lhs.window())
            } else {
                GradedModule::direct_sum(&refs)?
            };
            if lhs.is_zero() && rhs.is_zero() {
                continue;
            }
            if !is_isomorphic(&lhs, &rhs, trials, mix(seed, j)).is_iso() {
                return Ok(BuildOutcome::Inapplicable(format!(
                    "H_{j}(K(x;P)) does not split as H_{j}(P) ⊕ H_{}(P)",
                    j - 1
                )));
            }
        }
        let target = cur.target.with_ring(quot)?;
        match check_qpr_target(&p1.minimalize(), &target, trials, seed)? {
            Ok(c) => cur = c,
            Err(f) => return Ok(BuildOutcome::Unverified(f)),
        }
    }
    Ok(BuildOutcome::Built(Box::new(cur)))
}

/// Copies `Σ^i H(M)(-t)` of the whole target inside `H(P)`, as
/// `(i, t) -> count`. `None` when the copies found in different indices `j`
/// do not assemble into whole shifted copies of `H(M)`.
pub fn graded_multiplicities(cert: &QpdCertificate) -> Option<BTreeMap<(i64, i64), usize>> {
    let support = cert.target.support();
    let mut per_j: BTreeMap<(i64, i64), BTreeMap<i64, usize>> = BTreeMap::new();
    for (j, list) in &cert.copies {
        for &(i, t) in list {
            *per_j.entry((i, t)).or_default().entry(*j).or_default() += 1;
        }
    }
    let mut out = BTreeMap::new();
    for (&(i, t), counts) in &per_j {
        let c = *counts.values().next()?;
        let whole = support.iter().all(|s| counts.get(&(s + i)) == Some(&c));
        if !whole || counts.len() != support.len() {
            return None;
        }
        out.insert((i, t), c);
    }
    Some(out)
}

/// `F = (⊕ Σ^j P(-s)^{b_{j,s}}) ⊕ (⊕ Σ^i Q(-t)^{a_{i,t}})` for `M ⊕ N`, where
/// `a` and `b` count the twisted copies in the two certificates.
pub fn direct_sum(a: &QpdCertificate, b: &QpdCertificate, trials: usize, seed: u64) -> Result<BuildOutcome> {
    if a.ring() != b.ring() {
        return Err(QpdError::arg("certificates over different rings"));
    }
    let (Some(ma), Some(mb)) = (graded_multiplicities(a), graded_multiplicities(b)) else {
        return Ok(BuildOutcome::Inapplicable(
            "the twisted copies do not assemble into shifted copies of the whole homology".into(),
        ));
    };
    let mut parts = Vec::new();
    for (&(j, s), &bj) in &mb {
        for _ in 0..bj {
            parts.push(a.resolution.twist(s).shift(j));
        }
    }
    for (&(i, t), &ai) in &ma {
        for _ in 0..ai {
            parts.push(b.resolution.twist(t).shift(i));
        }
    }
    let refs: Vec<&FreeComplex> = parts.iter().collect();
    let f = FreeComplex::direct_sum(&refs)?;
    let target = Target::direct_sum(&[&a.target, &b.target])?;
    Ok(BuildOutcome::from_check(check_qpr_target(&f, &target, trials, seed)?))
}

/// One side of an inequality.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "value", rename_all = "snake_case")]
pub enum Side {
    Certified(i64),
    Unverifiable(String),
}

impl Side {
    pub fn value(&self) -> Option<i64> {
        match self {
            Side::Certified(v) => Some(*v),
            Side::Unverifiable(_) => None,
        }
    }

    fn of(v: &Result<QpdVerdict>) -> Side {
        match v {
            Ok(v) => match v.exact_value() {
                Some(x) => Side::Certified(x),
                None => Side::Unverifiable(format!("qpd verdict {}", v.name())),
            },
            Err(e) => Side::Unverifiable(e.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyBoundReport {
    pub qpd: Side,
    pub homology_qpd: Vec<(i64, Side)>,
    /// `sup_s qpd H_s(M)`.
    pub homology_sup: Side,
    /// `sup_i (depth R - depth H_i(M))`.
    pub depth_sup: Side,
    pub holds: Option<bool>,
    pub strict: Option<bool>,
    pub depth_holds: Option<bool>,
}

/// `qpd M ≤ sup_s qpd H_s(M)` and `qpd M ≤ sup_i (depth R - depth H_i(M))`.
pub fn homology_bound(m: &PresentedComplex, opts: &QpdOptions) -> Result<HomologyBoundReport> {
    let ring = m.ring().clone();
    let lhs = Side::of(&qpd_eval(m, opts));
    let target = Target::from_presented(m, None)?;
    let dr = ring_depth(&ring)?.depth;
    let mut homology_qpd = Vec::new();
    let mut depth_gaps = Vec::new();
    for s in target.support() {
        let pres = crate::resolution::presentation_of(target.get(s).unwrap())?;
        let hs = PresentedComplex::module(ring.clone(), pres, 0)?;
        homology_qpd.push((s, Side::of(&qpd_eval(&hs, opts))));
        depth_gaps.push(match (dr, depth_presented(&hs)?.depth) {
            (Bound::Finite(a), Bound::Finite(b)) => Some(a - b),
            _ => None,
        });
    }
    let homology_sup = match homology_qpd.iter().map(|(_, s)| s.value()).collect::<Option<Vec<_>>>() {
        Some(v) => Side::Certified(v.into_iter().max().unwrap()),
        None => Side::Unverifiable("some homology module has no exact qpd".into()),
    };
    let depth_sup = match depth_gaps.into_iter().collect::<Option<Vec<_>>>() {
        Some(v) => Side::Certified(v.into_iter().max().unwrap()),
        None => Side::Unverifiable("some depth is undetermined".into()),
    };
    let (holds, strict) = match (lhs.value(), homology_sup.value()) {
        (Some(a), Some(b)) => (Some(a <= b), Some(a < b)),
        _ => (None, None),
    };
    let depth_holds = match (lhs.value(), depth_sup.value()) {
        (Some(a), Some(b)) => Some(a <= b),
        _ => None,
    };
    Ok(HomologyBoundReport {
        qpd: lhs,
        homology_qpd,
        homology_sup,
        depth_sup,
        holds,
        strict,
        depth_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmod::Presentation;
    use crate::resolution::residue_field;

    fn ring(vars: &[&str], gens: &[&str]) -> Arc<QuotientRing> {
        QuotientRing::standard(101, vars, gens, 6).unwrap()
    }

    fn cyclic(r: &Arc<QuotientRing>, rels: &[&str]) -> PresentedComplex {
        let pres = Presentation {
            shifts: vec![0],
            relations: rels.iter().map(|s| vec![r.parse(s).unwrap()]).collect(),
        };
        PresentedComplex::module(r.clone(), pres, 0).unwrap()
    }

    fn field_of(r: &Arc<QuotientRing>) -> PresentedComplex {
        PresentedComplex::module(r.clone(), residue_field(r), 0).unwrap()
    }

    fn remark(r: &Arc<QuotientRing>) -> FreeComplex {
        let d = PolyMatrix::parse(r, &[vec!["x", "y"]], 2).unwrap();
        FreeComplex::new(r.clone(), 0, vec![vec![0], vec![1, 1]], vec![d]).unwrap()
    }

    fn koszul_x(r: &Arc<QuotientRing>, x: &str) -> FreeComplex {
        let f = r.parse(x).unwrap();
        FreeComplex::free_module(r.clone(), vec![0], 0).koszul(&[f]).unwrap()
    }

    #[test]
    fn check_examples() {
        let r = ring(&["x", "y"], &[]);
        let k = field_of(&r);
        let p = FreeComplex::free_module(r.clone(), vec![0], 0)
            .koszul(&[r.parse("x").unwrap(), r.parse("y").unwrap()])
            .unwrap();
        let c = check_qpr(&p, &k, 64, 1).unwrap().unwrap();
        assert_eq!((c.base_index, c.value), (0, 2));
        assert_eq!(c.multiplicities[&0], 1);

        let a = ring(&["x"], &["x^2"]);
        let ka = field_of(&a);
        let c = check_qpr(&koszul_x(&a, "x"), &ka, 64, 1).unwrap().unwrap();
        assert_eq!(c.value, 0);
        assert_eq!(c.multiplicities.values().copied().collect::<Vec<_>>(), vec![1, 1]);

        let free = FreeComplex::free_module(a.clone(), vec![0], 0);
        match check_qpr(&free, &ka, 64, 1).unwrap() {
            Err(QprFailure::DimensionObstruction { .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn eval_examples() {
        let r = ring(&["x", "y"], &[]);
        let opts = QpdOptions::default();
        let rem = PresentedComplex::from_free(&remark(&r));
        let v = qpd_eval(&rem, &opts).unwrap();
        assert_eq!(v.exact_value(), Some(0), "{v:?}");
        let v = qpd_eval(&field_of(&r), &opts).unwrap();
        assert_eq!(v.exact_value(), Some(2));

        let s = ring(&["x", "y"], &["x^2", "x*y", "y^2"]);
        let v = qpd_eval(&cyclic(&s, &["x"]), &opts).unwrap();
        assert!(matches!(v, QpdVerdict::NotFoundWithinBounds { .. }), "{v:?}");
    }

    #[test]
    fn discrepancy_instance_is_certified() {
        let s = ring(&["x", "y"], &["x^2", "y^2"]);
        let c = check_qpr(&koszul_x(&s, "x"), &cyclic(&s, &["x"]), 64, 0).unwrap().unwrap();
        assert_eq!(c.value, 0);
        let v = qpd_eval(&cyclic(&s, &["x"]), &QpdOptions::default()).unwrap();
        assert_eq!(v.exact_value(), Some(0));
    }

    #[test]
    fn search_finds_the_koszul_complex() {
        let a = ring(&["x"], &["x^2"]);
        let v = search(&field_of(&a), &SearchBudget::default(), 64, 0).unwrap();
        assert_eq!(v.exact_value(), Some(0), "{v:?}");
        let v = search(&cyclic(&a, &[]), &SearchBudget::default(), 64, 0).unwrap();
        assert_eq!(v.exact_value(), Some(0));
    }

    #[test]
    fn builders() {
        let r = ring(&["x"], &[]);
        let k = field_of(&r);
        let cert = check_qpr(&koszul_x(&r, "x"), &k, 64, 0).unwrap().unwrap();
        let x = r.parse("x").unwrap();
        let out = power_reduction(&cert, std::slice::from_ref(&x), 2, 64, 0).unwrap();
        assert_eq!(out.certificate().unwrap().value, 0);
        assert!(matches!(
            power_reduction(&cert, std::slice::from_ref(&x), 1, 64, 0).unwrap(),
            BuildOutcome::Rejected(_)
        ));
        let out = split_reduction(&cert, std::slice::from_ref(&x), 64, 0).unwrap();
        assert_eq!(out.certificate().unwrap().value, 0);
        assert!(matches!(
            koszul_transfer(&cert, &x, 64, 0).unwrap(),
            BuildOutcome::Rejected(_)
        ));

        let r2 = ring(&["x", "y"], &[]);
        let free = check_qpr(
            &FreeComplex::free_module(r2.clone(), vec![0], 0),
            &cyclic(&r2, &[]),
            64,
            0,
        )
        .unwrap()
        .unwrap();
        let out = koszul_transfer(&free, &r2.parse("x").unwrap(), 64, 0).unwrap();
        assert_eq!(out.certificate().unwrap().value, 0);

        let k2 = field_of(&r2);
        let kc = qpd_eval(&k2, &QpdOptions::default()).unwrap();
        let kc = kc.certificate().unwrap();
        let rem = PresentedComplex::from_free(&remark(&r2));
        let rc = check_qpr(&remark(&r2), &rem, 64, 0).unwrap().unwrap();
        let out = direct_sum(&rc, kc, 64, 0).unwrap();
        let c = out.certificate().unwrap();
        assert!(c.value <= 2);
        let both = PresentedComplex::direct_sum(&[&rem, &k2]).unwrap();
        let v = qpd_eval(&both, &QpdOptions::default()).unwrap();
        assert_eq!(v.exact_value(), Some(1));
    }

    #[test]
    fn homology_bound_on_the_remark_complex() {
        let r = ring(&["x", "y"], &[]);
        let rem = PresentedComplex::from_free(&remark(&r));
        let rep = homology_bound(&rem, &QpdOptions::default()).unwrap();
        assert_eq!(rep.qpd, Side::Certified(0));
        assert_eq!(rep.homology_sup, Side::Certified(2));
        assert_eq!((rep.holds, rep.strict), (Some(true), Some(true)));
    }
}
