//! Cross-validation harness: runs the structural lemma checks, the fast
//! classifier, and (within budget) the definitional oracle over a corpus
//! of presentations, and tabulates agreements, disagreements, and
//! adjudications of the two classifier readings.

use serde::Serialize;

use crate::beauville::{
    beauville_oracle, classify_fast, good_power_criterion, tame_wild, BeauvilleError,
    BeauvilleReport, Decision, FastReport, OracleConfig, OracleMode,
};
use crate::group::{enumerate, ConcreteGroup, Subgroup};
use crate::maxclass::{
    centralizer_of_gn2, maximal_class_profile, uniform_elements, verify_branch_uniformity,
    verify_miech_identity, verify_pth_power_location, verify_sigma_commutator_identity,
    verify_small_order_exponent, BranchVerify, MaxClassOutcome, MaxClassProfile, MiechOutcome,
    PowerLocationOutcome,
};
use crate::pc::PcPresentation;
use crate::record::{decision_name, comparisons_from_fast, Comparisons, CorpusRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

impl CheckResult {
    fn pass(name: &'static str, detail: impl Into<String>) -> Self {
        CheckResult { name, status: CheckStatus::Pass, detail: detail.into() }
    }
    fn fail(name: &'static str, detail: impl Into<String>) -> Self {
        CheckResult { name, status: CheckStatus::Fail, detail: detail.into() }
    }
    fn na(name: &'static str, detail: impl Into<String>) -> Self {
        CheckResult { name, status: CheckStatus::NotApplicable, detail: detail.into() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupVerification {
    pub group: CorpusRecord,
    pub is_maximal_class: bool,
    pub checks: Vec<CheckResult>,
    pub comparisons: Comparisons,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<crate::maxclass::MaxClassSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl GroupVerification {
    pub fn failed(&self) -> bool {
        self.error.is_some() || self.checks.iter().any(|c| c.status == CheckStatus::Fail)
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Run the oracle when |G| is at most this.
    pub oracle_order_cap: u64,
    pub workers: usize,
    /// Verify every branch element rather than one representative.
    pub branch_verify: BranchVerify,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            oracle_order_cap: crate::beauville::SOCLE_ORDER_CAP,
            workers: crate::beauville::default_workers(),
            branch_verify: BranchVerify::Auto,
        }
    }
}

/// Run every applicable verification on one presentation.
pub fn verify_group(pres: &PcPresentation, source: &str, opts: &VerifyOptions) -> GroupVerification {
    let corpus = CorpusRecord::of(pres, source);
    let mut out = GroupVerification {
        group: corpus,
        is_maximal_class: false,
        checks: Vec::new(),
        comparisons: Comparisons::default(),
        profile: None,
        error: None,
    };
    let g = match enumerate(pres) {
        Ok(g) => g,
        Err(e) => {
            out.error = Some(format!("enumeration failed: {e}"));
            return out;
        }
    };
    let profile = match maximal_class_profile(&g, opts.branch_verify) {
        Ok(MaxClassOutcome::Profile(p)) => {
            out.is_maximal_class = true;
            Some(p)
        }
        Ok(MaxClassOutcome::NotMaximalClass { .. }) => None,
        Err(e) => {
            out.error = Some(format!("profiling failed: {e}"));
            return out;
        }
    };

    let oracle_report = run_oracle(&g, opts);
    if let Some(Ok(r)) = &oracle_report {
        out.comparisons.oracle_decision = Some(decision_name(r.decision).to_string());
    }

    if let Ok((value, agemo)) = good_power_criterion(&g) {
        out.comparisons.good_power_value = Some(value);
        out.comparisons.good_power_agemo_order = Some(agemo);
    }

    if let Some(profile) = profile {
        out.profile = Some(profile.summary(true));
        structural_checks(&g, &profile, opts, &mut out.checks);
        classifier_checks(&g, &profile, &oracle_report, &mut out);
        quotient_corollary_check(&g, &profile, opts, &mut out.checks);
    }

    if let Some(Err(e)) = oracle_report {
        out.checks.push(CheckResult::na("oracle", format!("skipped: {e}")));
    }
    out
}

fn run_oracle(
    g: &ConcreteGroup,
    opts: &VerifyOptions,
) -> Option<Result<BeauvilleReport, BeauvilleError>> {
    if g.order() > opts.oracle_order_cap {
        return Some(Err(BeauvilleError::Indeterminate {
            reason: format!("order {} above harness cap {}", g.order(), opts.oracle_order_cap),
            pairs_examined: 0,
        }));
    }
    let config = OracleConfig {
        mode: OracleMode::Socle,
        budget_pairs: u64::MAX,
        workers: opts.workers,
    };
    let report = beauville_oracle(g, &config).and_then(|r| {
        if r.decision == Decision::Beauville {
            tame_wild(g, &r)
        } else {
            Ok(r)
        }
    });
    Some(report)
}

fn structural_checks(
    g: &ConcreteGroup,
    profile: &MaxClassProfile,
    _opts: &VerifyOptions,
    checks: &mut Vec<CheckResult>,
) {
    let p = g.prime() as u64;
    let n = profile.n;

    // |G_i : G_{i+1}| = p for the chain G_1 > G_2 > ... > 1, where G_1 is
    // the distinguished maximal subgroup and G_i = gamma_i for i >= 2;
    // gamma_1 = G itself sits one p-step above G_1.
    {
        let mut ok = true;
        let mut detail = String::new();
        let orders: Vec<u64> = profile.series.terms.iter().map(|t| t.order()).collect();
        if orders.first() != Some(&g.order()) || orders.last() != Some(&1) {
            ok = false;
            detail = format!("series orders {orders:?}");
        }
        if orders.len() >= 2 && orders[0] != orders[1] * p * p {
            ok = false;
            detail = format!("|G : gamma_2| != p^2 in {orders:?}");
        }
        for w in orders[1..].windows(2) {
            if w[0] != w[1] * p {
                ok = false;
                detail = format!("series orders {orders:?}");
            }
        }
        if let Some(g1) = &profile.g1 {
            if g1.order() * p != g.order() {
                ok = false;
                detail = format!("G_1 order {}", g1.order());
            }
        }
        checks.push(if ok {
            CheckResult::pass("series-index-p", format!("orders {orders:?}"))
        } else {
            CheckResult::fail("series-index-p", detail)
        });
    }

    // Branch uniformity (every element, not just representatives)
    checks.push(match verify_branch_uniformity(g) {
        Ok(()) => CheckResult::pass("branch-uniformity", "all branches have constant order"),
        Err(e) => CheckResult::fail("branch-uniformity", e),
    });

    // mu restriction under the theorem's hypotheses
    if let (Some(mu), Some(g1_abelian)) = (profile.mu, profile.g1_abelian) {
        let within = profile.metabelian || profile.g1_class_le2 == Some(true);
        if within {
            let allowed: &[u32] = if g1_abelian { &[0, 1, p as u32] } else { &[0, 1, 2, p as u32] };
            checks.push(if allowed.contains(&mu) {
                CheckResult::pass("mu-range", format!("mu = {mu}"))
            } else {
                CheckResult::fail("mu-range", format!("mu = {mu} outside {allowed:?}"))
            });
        } else {
            checks.push(CheckResult::na("mu-range", "outside theorem hypotheses"));
        }
    } else {
        checks.push(CheckResult::na("mu-range", "reduced profile"));
    }

    // Maximal subgroups of class <= 2 coincide with G_1 (order >= p^5)
    if n >= 5 && profile.g1.is_some() {
        let g1 = profile.g1.as_ref().unwrap();
        let mut bad = None;
        for m in g.maximal_subgroups() {
            if subgroup_class_le2(g, &m) && m.elems != g1.elems {
                bad = Some(m);
                break;
            }
        }
        checks.push(match bad {
            None => CheckResult::pass("class2-maximal-is-g1", "no other maximal of class <= 2"),
            Some(_) => CheckResult::fail("class2-maximal-is-g1", "found another maximal of class <= 2"),
        });
    } else {
        checks.push(CheckResult::na("class2-maximal-is-g1", "needs order >= p^5"));
    }

    // ell > 0 iff G_1 = C_G(G_{n-2})
    if let (Some(ell), Some(g1)) = (profile.ell, profile.g1.as_ref()) {
        let cent = centralizer_of_gn2(g, profile);
        let equal = cent.elems == g1.elems;
        checks.push(if (ell > 0) == equal {
            CheckResult::pass("ell-centralizer", format!("ell = {ell}, centralizer match = {equal}"))
        } else {
            CheckResult::fail("ell-centralizer", format!("ell = {ell} but centralizer match = {equal}"))
        });
    } else {
        checks.push(CheckResult::na("ell-centralizer", "reduced profile"));
    }

    // Uniform element structure: s^p central, conjugates = s Phi(G),
    // |C_G(s)| = p^2 (orbit-stabilizer over the class partition).
    if n >= 4 && profile.g1.is_some() {
        let uniforms = uniform_elements(g, profile);
        let fratt = g.frattini();
        let z = g.center();
        let mut failure = None;
        let mut remaining: std::collections::BTreeSet<u32> = uniforms.iter().copied().collect();
        while let Some(&s) = remaining.iter().next() {
            let class = g.conjugacy_class_of(s);
            if !z.contains(g.pow(s, p as i64)) {
                failure = Some(format!("s = {s}: s^p not central"));
                break;
            }
            if class.len() as u64 != fratt.order() {
                failure = Some(format!(
                    "s = {s}: class size {} != |Phi| = {} (so |C_G(s)| != p^2)",
                    class.len(),
                    fratt.order()
                ));
                break;
            }
            for &c in &class {
                if !fratt.contains(g.mult(g.inv(s), c)) {
                    failure = Some(format!("s = {s}: conjugate {c} outside s Phi(G)"));
                    break;
                }
            }
            for c in class {
                remaining.remove(&c);
            }
            if failure.is_some() {
                break;
            }
        }
        checks.push(match failure {
            None => CheckResult::pass(
                "uniform-structure",
                format!("{} uniform elements verified", uniforms.len()),
            ),
            Some(d) => CheckResult::fail("uniform-structure", d),
        });
    } else {
        checks.push(CheckResult::na("uniform-structure", "needs n >= 4"));
    }

    // p-th power location (n >= p+2), or exp(G/Z) = p below that
    match verify_pth_power_location(g, profile) {
        Ok(PowerLocationOutcome::Ok) => {
            checks.push(CheckResult::pass("pth-power-location", "exhaustive"))
        }
        Ok(PowerLocationOutcome::Violation { i, x }) => {
            checks.push(CheckResult::fail("pth-power-location", format!("i = {i}, x = {x}")))
        }
        Ok(PowerLocationOutcome::NotApplicable(_)) => {
            match verify_small_order_exponent(g) {
                Ok(true) => checks.push(CheckResult::pass("exp-g-mod-z", "exp(G/Z) = p")),
                Ok(false) => checks.push(CheckResult::fail("exp-g-mod-z", "exp(G/Z) > p")),
                Err(e) => checks.push(CheckResult::na("exp-g-mod-z", format!("{e}"))),
            }
        }
        Err(e) => checks.push(CheckResult::na("pth-power-location", format!("{e}"))),
    }

    // Miech power identity
    match verify_miech_identity(g, profile) {
        Ok(MiechOutcome::Witness(w)) => {
            checks.push(if w.holds() {
                CheckResult::pass(
                    "miech-identity",
                    format!("a = {}, b = {}, residuals all trivial", w.a, w.b),
                )
            } else {
                CheckResult::fail("miech-identity", format!("{w:?}"))
            });
        }
        Ok(MiechOutcome::NotApplicable(why)) => {
            checks.push(CheckResult::na("miech-identity", why))
        }
        Err(e) => checks.push(CheckResult::na("miech-identity", format!("{e}"))),
    }

    // sigma commutator identity (G_1 of class <= 2)
    match verify_sigma_commutator_identity(g, profile) {
        Ok(Some(true)) => checks.push(CheckResult::pass("sigma-identity", "sampled i, k, l")),
        Ok(Some(false)) => checks.push(CheckResult::fail("sigma-identity", "mismatch")),
        Ok(None) => checks.push(CheckResult::na("sigma-identity", "G_1 class > 2 or no uniform")),
        Err(e) => checks.push(CheckResult::na("sigma-identity", format!("{e}"))),
    }
}

/// Nilpotency class <= 2 for a normal subgroup.
fn subgroup_class_le2(g: &ConcreteGroup, m: &Subgroup) -> bool {
    let derived = g.commutator_subgroup(&m.gens, &m.gens);
    if derived.order() == 1 {
        return true;
    }
    g.commutator_contained(&derived.gens, &m.gens, &g.trivial_subgroup())
}

fn classifier_checks(
    g: &ConcreteGroup,
    profile: &MaxClassProfile,
    oracle_report: &Option<Result<BeauvilleReport, BeauvilleError>>,
    out: &mut GroupVerification,
) {
    let fast: FastReport = match classify_fast(g, profile) {
        Ok(f) => f,
        Err(e) => {
            out.checks.push(CheckResult::na("classifier-vs-oracle", format!("{e}")));
            return;
        }
    };
    let mut comp = comparisons_from_fast(&fast);
    comp.good_power_value = out.comparisons.good_power_value;
    comp.good_power_agemo_order = out.comparisons.good_power_agemo_order;
    comp.oracle_decision = out.comparisons.oracle_decision.clone();

    match oracle_report {
        Some(Ok(oracle)) => {
            if let Some(agreed) = fast.agreed {
                let matches = agreed == oracle.decision
                    || (agreed == Decision::NotBeauville && !oracle.decision.is_beauville());
                comp.classifier_matches_oracle = Some(matches);
                let negative_outside = agreed == Decision::NotBeauville && !fast.within_hypotheses;
                out.checks.push(if matches {
                    CheckResult::pass(
                        "classifier-vs-oracle",
                        format!("both {}", decision_name(oracle.decision)),
                    )
                } else if negative_outside {
                    CheckResult::na(
                        "classifier-vs-oracle",
                        format!(
                            "theorem-inapplicable negative vs oracle {}",
                            decision_name(oracle.decision)
                        ),
                    )
                } else {
                    CheckResult::fail(
                        "classifier-vs-oracle",
                        format!(
                            "classifier {} vs oracle {}",
                            decision_name(agreed),
                            decision_name(oracle.decision)
                        ),
                    )
                });
            } else {
                comp.forms_disagree_oracle_adjudicated =
                    Some(decision_name(oracle.decision).to_string());
                out.checks.push(CheckResult::pass(
                    "classifier-forms",
                    format!(
                        "readings disagree (x-form {:?}, mu-form {:?}); oracle adjudicates {}",
                        fast.x_form,
                        fast.mu_form,
                        decision_name(oracle.decision)
                    ),
                ));
            }
        }
        _ => {
            out.checks.push(CheckResult::na("classifier-vs-oracle", "oracle unavailable"));
        }
    }
    out.comparisons = comp;
}

fn quotient_corollary_check(
    g: &ConcreteGroup,
    profile: &MaxClassProfile,
    opts: &VerifyOptions,
    checks: &mut Vec<CheckResult>,
) {
    let p = g.prime();
    if p < 5 || profile.n < 4 {
        checks.push(CheckResult::na("quotient-tame", "needs p >= 5 and n >= 4"));
        return;
    }
    let z = g.center();
    let q = match g.quotient(&z) {
        Ok(q) => q,
        Err(e) => {
            checks.push(CheckResult::na("quotient-tame", format!("quotient failed: {e}")));
            return;
        }
    };
    let qg = q.group;
    if qg.order() <= 5u64.pow(5).min(opts.oracle_order_cap) {
        let config = OracleConfig {
            mode: OracleMode::Socle,
            budget_pairs: u64::MAX,
            workers: opts.workers,
        };
        match beauville_oracle(&qg, &config).and_then(|r| tame_wild(&qg, &r)) {
            Ok(r) if r.decision == Decision::BeauvilleTame => checks.push(CheckResult::pass(
                "quotient-tame",
                format!("G/Z of order {} oracle-confirmed tame", qg.order()),
            )),
            Ok(r) => checks.push(CheckResult::fail(
                "quotient-tame",
                format!("G/Z decided {}", decision_name(r.decision)),
            )),
            Err(e) => checks.push(CheckResult::na("quotient-tame", format!("{e}"))),
        }
    } else {
        // classifier route
        let out = match maximal_class_profile(&qg, BranchVerify::Auto) {
            Ok(MaxClassOutcome::Profile(qp)) => match classify_fast(&qg, &qp) {
                Ok(fast) => match fast.agreed {
                    Some(Decision::BeauvilleTame) => CheckResult::pass(
                        "quotient-tame",
                        format!("G/Z of order {} classifier-confirmed tame", qg.order()),
                    ),
                    other => CheckResult::fail("quotient-tame", format!("classifier said {other:?}")),
                },
                Err(e) => CheckResult::na("quotient-tame", format!("{e}")),
            },
            _ => CheckResult::fail("quotient-tame", "G/Z not maximal class"),
        };
        checks.push(out);
    }
}

/// Verify every presentation file in a directory (sorted order).
pub fn verify_corpus_dir(
    dir: &std::path::Path,
    opts: &VerifyOptions,
) -> std::io::Result<Vec<GroupVerification>> {
    let mut paths: Vec<std::path::PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "pres"))
        .collect();
    paths.sort();
    let mut out = Vec::new();
    for path in paths {
        let text = std::fs::read_to_string(&path)?;
        let source = path.display().to_string();
        match crate::pc::parse_presentation(&text) {
            Ok(pres) => out.push(verify_group(&pres, &source, opts)),
            Err(e) => out.push(GroupVerification {
                group: CorpusRecord { id: "unparsed".into(), source, p: 0, n: 0 },
                is_maximal_class: false,
                checks: vec![],
                comparisons: Comparisons::default(),
                profile: None,
                error: Some(format!("parse error: {e}")),
            }),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forge::construct_pquotient;

    #[test]
    fn pquotient_corpus_rows_all_pass() {
        for m in 2..=4 {
            let pres = construct_pquotient(5, m).unwrap().presentation;
            let v = verify_group(&pres, &format!("pquotient(5,{m})"), &VerifyOptions::default());
            assert!(!v.failed(), "m = {m}: {:?}", v.checks);
            assert!(v.is_maximal_class);
            if m >= 3 {
                assert_eq!(v.comparisons.classifier_matches_oracle, Some(true), "m={m}");
            }
        }
    }

    #[test]
    fn p3_maximal_class_both_negative() {
        let pres = construct_pquotient(3, 3).unwrap().presentation;
        let v = verify_group(&pres, "pquotient(3,3)", &VerifyOptions::default());
        assert!(!v.failed(), "{:?}", v.checks);
        assert_eq!(v.comparisons.oracle_decision.as_deref(), Some("not-beauville"));
    }

    #[test]
    fn non_maximal_class_is_tabulated_without_lemmas() {
        let pres = crate::pc::parse_presentation("p 5\nn 4\n").unwrap();
        let v = verify_group(&pres, "c5^4", &VerifyOptions::default());
        assert!(!v.is_maximal_class);
        assert!(!v.failed());
    }
}
