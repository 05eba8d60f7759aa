//! Structure-constant search for metabelian maximal-class groups.
//!
//! The search slice fixes the commutator chain g_{i+1} = [g_i, g_1] for
//! i >= 2 and [g_i, g_j] = 1 for i > j >= 3, and enumerates the remaining
//! relations over small windows:
//!
//! - [g_i, g_2] over a window starting at g_{i+1} (one step deeper when
//!   n >= p+2, where the degree of commutativity is known positive);
//! - g_1^p over the last generator, g_2^p over a window ending at g_n,
//!   and for i >= 3 the singleton allowed by the p-th power location law
//!   when n >= p+2, trivial otherwise.
//!
//! Any consistent assignment in this slice is automatically of maximal
//! class (the chain forces gamma_k = <g_{k+1}, ..., g_n>) and metabelian
//! (gamma_2 is generated by pairwise-commuting generators), so candidates
//! are screened by the complete overlap conditions plus cheap
//! branch-order filters, and only survivors are enumerated, profiled, and
//! emitted. Emissions are deduplicated by re-deriving the presentation on
//! a canonical uniform chain and hashing it; the lexicographically least
//! surviving constant vector represents each class.

use serde::Serialize;

use crate::group::{enumerate, ConcreteGroup};
use crate::maxclass::{
    maximal_class_profile, uniform_elements, BranchVerify, MaxClassOutcome, MaxClassSummary,
};
use crate::pc::{PcPresentation, Word};

use super::ForgeError;

use std::collections::BTreeMap;

/// Window bounds on the free structure constants.
#[derive(Debug, Clone, Serialize)]
pub struct SearchBounds {
    /// Window width for the [g_i, g_2] words.
    pub comm_window: usize,
    /// Window width for g_2^p, ending at g_n.
    pub pow2_window: usize,
    /// Allow g_1^p to range over <g_n> (otherwise forced trivial).
    pub pow1_center: bool,
    /// Subsample the candidate space above this size.
    pub max_candidates: u64,
    pub max_emissions: usize,
    /// Cap on filtered survivors that get fully enumerated.
    pub max_survivor_inspections: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            comm_window: 2,
            pow2_window: 2,
            pow1_center: true,
            max_candidates: 4_000_000,
            max_emissions: 6,
            max_survivor_inspections: 96,
        }
    }
}

/// Order-based target filter: screened cheaply before enumeration and
/// re-checked exactly on the enumerated group.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TargetFilter {
    /// Exact number of non-G_1 branches of order p.
    pub mu: Option<u32>,
    /// Order exponent of the G_1 branch (1 = order p, 2 = order p^2).
    pub bg1_order_exp: Option<u8>,
    /// Total number of order-p branches, G_1 included.
    pub order_p_branch_count: Option<u32>,
    /// exp(G) = p^k filter.
    pub exponent_exp: Option<u32>,
}

impl TargetFilter {
    /// Parse a comma-separated list: mu=K, bg1=p|p2, xbranches=K, exp=p|K.
    pub fn parse(text: &str) -> Result<TargetFilter, String> {
        let mut f = TargetFilter::default();
        for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) =
                part.split_once('=').ok_or_else(|| format!("expected key=value in '{part}'"))?;
            match key {
                "mu" => f.mu = Some(value.parse().map_err(|_| format!("bad mu '{value}'"))?),
                "bg1" => {
                    f.bg1_order_exp = Some(match value {
                        "p" => 1,
                        "p2" => 2,
                        other => other.parse().map_err(|_| format!("bad bg1 '{other}'"))?,
                    })
                }
                "xbranches" => {
                    f.order_p_branch_count =
                        Some(value.parse().map_err(|_| format!("bad xbranches '{value}'"))?)
                }
                "exp" => {
                    f.exponent_exp = Some(match value {
                        "p" => 1,
                        other => other.parse().map_err(|_| format!("bad exp '{other}'"))?,
                    })
                }
                other => return Err(format!("unknown filter key '{other}'")),
            }
        }
        Ok(f)
    }

    pub fn is_empty(&self) -> bool {
        *self == TargetFilter::default()
    }

    /// Exact evaluation against a profiled group.
    fn matches_summary(&self, s: &MaxClassSummary) -> bool {
        if let Some(mu) = self.mu {
            if s.mu != Some(mu) {
                return false;
            }
        }
        if let Some(k) = self.bg1_order_exp {
            let ok = match s.g1_direction {
                Some(d) => s.branch_order_exps.get(d as usize).copied() == Some(k),
                None => false,
            };
            if !ok {
                return false;
            }
        }
        if let Some(c) = self.order_p_branch_count {
            if s.branch_order_exps.iter().filter(|&&e| e == 1).count() as u32 != c {
                return false;
            }
        }
        if let Some(e) = self.exponent_exp {
            if s.exponent_exp != e {
                return false;
            }
        }
        true
    }

    /// Conservative screen from branch orders alone (the true G_1 is not
    /// yet identified, so mu is only known up to whether G_1 is order p).
    fn prescreen(&self, branch_order_exps: &[u8]) -> bool {
        let order_p = branch_order_exps.iter().filter(|&&e| e == 1).count() as u32;
        if let Some(c) = self.order_p_branch_count {
            if order_p != c {
                return false;
            }
        }
        if let Some(mu) = self.mu {
            if order_p != mu && order_p != mu + 1 {
                return false;
            }
        }
        if self.exponent_exp == Some(1) && branch_order_exps.iter().any(|&e| e != 1) {
            return false;
        }
        true
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MetabelianSearchSpec {
    pub p: u32,
    pub n: usize,
    pub bounds: SearchBounds,
    pub seed: u64,
    pub filter: TargetFilter,
}

/// One deduplicated search hit.
pub struct Emission {
    pub presentation: PcPresentation,
    pub canonical_id: String,
    pub summary: MaxClassSummary,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchStats {
    pub candidates_total: u64,
    pub candidates_scanned: u64,
    pub overlap_consistent: u64,
    pub prescreen_survivors: u64,
    pub inspected: u64,
    /// Survivors of the overlap prefilter that the full enumeration check
    /// rejected (the prefilter is fast but not a complete certificate).
    pub overlap_false_positives: u64,
    pub truncated: bool,
}

pub struct SearchOutcome {
    pub emissions: Vec<Emission>,
    pub stats: SearchStats,
}

struct Slot {
    is_pow: bool,
    /// Defining generator, 0-based; commutator slots pair it with g_2.
    gen: usize,
    /// Generator positions the word may use, ascending, 0-based.
    positions: Vec<usize>,
}

impl Slot {
    fn choices(&self, p: u32) -> u64 {
        (p as u64).pow(self.positions.len() as u32)
    }

    fn word(&self, p: u32, mut code: u64) -> Word {
        let mut letters = Vec::new();
        for &pos in &self.positions {
            let e = (code % p as u64) as u8;
            code /= p as u64;
            if e != 0 {
                letters.push((pos, e));
            }
        }
        Word { letters }
    }
}

fn build_slots(spec: &MetabelianSearchSpec) -> Vec<Slot> {
    let p = spec.p as usize;
    let n = spec.n;
    let b = &spec.bounds;
    let deep = n >= p + 2; // positive degree of commutativity regime
    let mut slots = Vec::new();
    // [g_i, g_2] for i = 3..n-1 (1-based); indices below are 1-based until
    // pushed.
    for i in 3..n {
        let lo = i + 1 + usize::from(deep);
        if lo > n {
            continue;
        }
        let hi = (lo + b.comm_window - 1).min(n);
        slots.push(Slot {
            is_pow: false,
            gen: i - 1,
            positions: (lo..=hi).map(|j| j - 1).collect(),
        });
    }
    if b.pow1_center {
        slots.push(Slot { is_pow: true, gen: 0, positions: vec![n - 1] });
    }
    {
        let lo = (n + 1).saturating_sub(b.pow2_window).max(3);
        slots.push(Slot { is_pow: true, gen: 1, positions: (lo..=n).map(|j| j - 1).collect() });
    }
    if deep {
        for i in 3..=n {
            let j = i + p - 1;
            if j <= n {
                slots.push(Slot { is_pow: true, gen: i - 1, positions: vec![j - 1] });
            }
        }
    }
    slots
}

fn candidate_presentation(
    spec: &MetabelianSearchSpec,
    slots: &[Slot],
    codes: &[u64],
) -> Result<PcPresentation, ForgeError> {
    let n = spec.n;
    let mut pow: Vec<(usize, Word)> = Vec::new();
    let mut comm: Vec<((usize, usize), Word)> = Vec::new();
    for i in 1..n - 1 {
        comm.push(((i, 0), Word { letters: vec![(i + 1, 1)] }));
    }
    for (slot, &code) in slots.iter().zip(codes) {
        let w = slot.word(spec.p, code);
        if w.is_trivial() {
            continue;
        }
        if slot.is_pow {
            pow.push((slot.gen, w));
        } else {
            comm.push(((slot.gen, 1), w));
        }
    }
    Ok(PcPresentation::new(spec.p, n, pow, comm)?)
}

/// Branch representative orders straight from the presentation: the
/// frame's non-G_1 branches are represented by g_1 g_2^k, the G_1-frame
/// branch by g_2. Returns None when an order fails to stabilize, which
/// can only happen on a candidate the overlap prefilter wrongly passed.
fn branch_order_exps(pres: &PcPresentation) -> Option<Vec<u8>> {
    let p = pres.prime();
    let mut out = Vec::with_capacity(p as usize + 1);
    for k in 0..p {
        let e = pres.collect(&[(1, 1), (2, k as i64)]).expect("valid word");
        out.push(try_ord_exp(pres, &e)?);
    }
    out.push(try_ord_exp(pres, &pres.generator(1))?);
    Some(out)
}

fn try_ord_exp(pres: &PcPresentation, e: &crate::pc::GroupElement) -> Option<u8> {
    let mut y = e.clone();
    for k in 0..=pres.length() as u8 {
        if y.is_identity() {
            return Some(k);
        }
        y = pres.power_int(&y, pres.prime() as i64).ok()?;
    }
    None
}

/// Canonical deduplication chain: the least uniform element of minimal
/// order, the least element of G_1 outside G_2, then iterated commutators
/// with the first.
fn canonical_chain(g: &ConcreteGroup) -> Result<Vec<u32>, ForgeError> {
    let out = maximal_class_profile(g, BranchVerify::Never)
        .map_err(|e| ForgeError::Envelope(format!("profile failed: {e}")))?;
    let profile = match out {
        MaxClassOutcome::Profile(p) => p,
        MaxClassOutcome::NotMaximalClass { .. } => {
            return Err(ForgeError::Envelope("emission is not maximal class".into()))
        }
    };
    let uniforms = uniform_elements(g, &profile);
    let s = *uniforms
        .iter()
        .min_by_key(|&&x| (g.order_exp_of(x), x))
        .expect("maximal-class group has uniform elements");
    let g1 = profile.g1.as_ref().expect("full profile");
    let g2 = profile.gi(2);
    let s1 = g1.elems.iter().copied().find(|&x| !g2.contains(x)).expect("G_1 exceeds G_2");
    let mut chain = vec![s, s1];
    for _ in 2..g.length() {
        let prev = *chain.last().unwrap();
        chain.push(g.comm(prev, s));
    }
    Ok(chain)
}

/// Mixes a candidate index with the seed; used for subsampling so that the
/// keep/skip decision is a pure function of the index, independent of how
/// the range is partitioned across workers.
fn keep_candidate(seed: u64, index: u64, rate_num: u64, rate_den: u64) -> bool {
    if rate_num >= rate_den {
        return true;
    }
    let mut z = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    (z % rate_den) < rate_num
}

fn decode_codes(mut index: u64, slots: &[Slot], p: u32, codes: &mut [u64]) {
    for (i, slot) in slots.iter().enumerate().rev() {
        let c = slot.choices(p);
        codes[i] = index % c;
        index /= c;
    }
    debug_assert_eq!(index, 0);
}

/// Run the search. Deterministic for a fixed spec: candidates are visited
/// in lexicographic code order (subsampled by an index hash when the space
/// exceeds `max_candidates`), the sweep is statically partitioned across
/// workers by leading structure constants with an ordered merge, and
/// emissions are deduplicated by canonical presentation hash in that
/// order. The outcome does not depend on the worker count.
pub fn metabelian_search(spec: &MetabelianSearchSpec) -> Result<SearchOutcome, ForgeError> {
    if spec.p > 7 || spec.n > 8 {
        return Err(ForgeError::Envelope(format!(
            "search envelope is p <= 7, n <= 8; got p={}, n={}",
            spec.p, spec.n
        )));
    }
    if spec.n < 4 {
        return Err(ForgeError::Envelope("search needs n >= 4".into()));
    }
    let slots = build_slots(spec);
    let total: u64 = slots.iter().map(|s| s.choices(spec.p)).product();
    let (rate_num, rate_den) = if total > spec.bounds.max_candidates {
        (spec.bounds.max_candidates, total)
    } else {
        (1, 1)
    };

    let mut stats = SearchStats {
        candidates_total: total,
        candidates_scanned: 0,
        overlap_consistent: 0,
        prescreen_survivors: 0,
        inspected: 0,
        overlap_false_positives: 0,
        truncated: false,
    };

    let workers = crate::beauville::default_workers().clamp(1, 32) as u64;
    let chunk = total.div_ceil(workers).max(1);
    type Partial = (Vec<(u64, PcPresentation)>, u64, u64, u64);
    let mut partials: Vec<Partial> = Vec::new();
    std::thread::scope(|scope| {
        let slots = &slots;
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    let lo = w * chunk;
                    let hi = ((w + 1) * chunk).min(total);
                    let mut local: Vec<(u64, PcPresentation)> = Vec::new();
                    let mut scanned = 0u64;
                    let mut consistent = 0u64;
                    let mut survived = 0u64;
                    let mut codes = vec![0u64; slots.len()];
                    for index in lo..hi {
                        if !keep_candidate(spec.seed, index, rate_num, rate_den) {
                            continue;
                        }
                        scanned += 1;
                        decode_codes(index, slots, spec.p, &mut codes);
                        let Ok(pres) = candidate_presentation(spec, slots, &codes) else {
                            continue;
                        };
                        if pres.overlap_conditions().is_ok() {
                            consistent += 1;
                            if let Some(exps) = branch_order_exps(&pres) {
                                if spec.filter.prescreen(&exps) {
                                    survived += 1;
                                    local.push((index, pres));
                                }
                            }
                        }
                    }
                    (local, scanned, consistent, survived)
                })
            })
            .collect();
        for h in handles {
            partials.push(h.join().expect("search worker panicked"));
        }
    });
    let mut survivors: Vec<(u64, PcPresentation)> = Vec::new();
    for (local, scanned, consistent, survived) in partials {
        stats.candidates_scanned += scanned;
        stats.overlap_consistent += consistent;
        stats.prescreen_survivors += survived;
        survivors.extend(local);
    }
    survivors.sort_by_key(|&(index, _)| index);
    let survivors: Vec<PcPresentation> = survivors.into_iter().map(|(_, p)| p).collect();

    // Enumerate survivors in order; keep the first representative of each
    // canonical class.
    let mut by_id: BTreeMap<String, Emission> = BTreeMap::new();
    let mut id_order: Vec<String> = Vec::new();
    for pres in survivors {
        if by_id.len() >= spec.bounds.max_emissions
            || stats.inspected >= spec.bounds.max_survivor_inspections as u64
        {
            stats.truncated = true;
            break;
        }
        stats.inspected += 1;
        let g = match enumerate(&pres) {
            Ok(g) => g,
            Err(crate::group::GroupError::Inconsistent(_)) => {
                stats.overlap_false_positives += 1;
                continue;
            }
            Err(e) => {
                return Err(ForgeError::Envelope(format!("survivor failed enumeration: {e}")))
            }
        };
        let out = maximal_class_profile(&g, BranchVerify::Auto)
            .map_err(|e| ForgeError::Envelope(format!("profile failed: {e}")))?;
        let profile = match out {
            MaxClassOutcome::Profile(p) => p,
            MaxClassOutcome::NotMaximalClass { n, class } => {
                return Err(ForgeError::Envelope(format!(
                    "slice invariant broken: consistent candidate of class {class} at n={n}"
                )))
            }
        };
        assert!(profile.metabelian, "slice invariant: emissions are metabelian");
        let summary = profile.summary(true);
        if !spec.filter.matches_summary(&summary) {
            continue;
        }
        let chain = canonical_chain(&g)?;
        let canonical = g
            .presentation_on_chain(&chain)
            .map_err(|e| ForgeError::Envelope(format!("canonical re-presentation failed: {e}")))?;
        let id = canonical.content_id();
        if !by_id.contains_key(&id) {
            id_order.push(id.clone());
            by_id.insert(id.clone(), Emission { presentation: pres, canonical_id: id, summary });
        }
    }
    let emissions: Vec<Emission> =
        id_order.into_iter().map(|id| by_id.remove(&id).unwrap()).collect();
    Ok(SearchOutcome { emissions, stats })
}
