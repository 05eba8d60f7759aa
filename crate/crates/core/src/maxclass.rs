//! Invariants of p-groups of maximal class: the distinguished maximal
//! subgroup G_1 = C_G(G_2/G_4), the degree of commutativity, branch order
//! profiles and mu, uniform elements, and the structural identities that
//! the harness verifies on every corpus group.
//!
//! Throughout, G_i for i >= 2 means the lower central term gamma_i, while
//! G_1 is the centralizer above, itself a maximal subgroup.

use serde::{Deserialize, Serialize};

use crate::group::{ConcreteGroup, GroupError, SeriesChain, Subgroup};

/// Per-maximal-subgroup branch data. The branch B(M) is M minus the
/// Frattini subgroup; in a maximal-class group all its elements share one
/// order.
#[derive(Debug, Clone, Serialize)]
pub struct BranchProfile {
    /// Direction id of M in G/Phi(G).
    pub direction: u32,
    pub is_g1: bool,
    /// Common element order in B(M) as the exponent k of p^k.
    pub order_exp: u8,
    /// Whether every branch element was checked, not just a representative.
    pub uniformity_verified: bool,
}

/// Full record of the maximal-class invariants of a group.
#[derive(Debug)]
pub struct MaxClassProfile {
    pub p: u32,
    pub n: usize,
    /// gamma_1 = G, gamma_2, ..., trailing trivial term included.
    pub series: SeriesChain,
    /// None for the reduced profile (n <= 3) or rank != 2.
    pub g1: Option<Subgroup>,
    pub g1_direction: Option<u32>,
    /// Degree of commutativity, None for reduced profiles.
    pub ell: Option<u32>,
    pub branches: Vec<BranchProfile>,
    /// Number of maximal subgroups M != G_1 whose branch has order p.
    pub mu: Option<u32>,
    pub metabelian: bool,
    pub g1_class_le2: Option<bool>,
    pub g1_abelian: Option<bool>,
    /// exp(G) = p^{exponent_exp}.
    pub exponent_exp: u32,
}

/// Outcome of profiling: either the group is not of maximal class, or a
/// profile (reduced for n <= 3, full for n >= 4).
#[derive(Debug)]
pub enum MaxClassOutcome {
    NotMaximalClass { n: usize, class: usize },
    Profile(Box<MaxClassProfile>),
}

impl MaxClassOutcome {
    pub fn profile(&self) -> Option<&MaxClassProfile> {
        match self {
            MaxClassOutcome::Profile(p) => Some(p),
            MaxClassOutcome::NotMaximalClass { .. } => None,
        }
    }
}

/// Serializable digest for result records.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaxClassSummary {
    pub p: u32,
    pub n: usize,
    pub is_maximal_class: bool,
    pub class: usize,
    pub g1_direction: Option<u32>,
    pub ell: Option<u32>,
    pub mu: Option<u32>,
    pub metabelian: bool,
    pub g1_class_le2: Option<bool>,
    pub g1_abelian: Option<bool>,
    pub exponent_exp: u32,
    pub branch_order_exps: Vec<u8>,
}

impl MaxClassProfile {
    /// G_i with the convention above; i >= n means the trivial group.
    pub fn gi(&self, i: usize) -> &Subgroup {
        assert!(i >= 1);
        if i == 1 {
            return self.g1.as_ref().expect("G_1 requires a full profile");
        }
        let idx = (i - 1).min(self.series.terms.len() - 1);
        &self.series.terms[idx]
    }

    pub fn is_reduced(&self) -> bool {
        self.g1.is_none()
    }

    pub fn summary(&self, is_maximal_class: bool) -> MaxClassSummary {
        MaxClassSummary {
            p: self.p,
            n: self.n,
            is_maximal_class,
            class: self.series.class(),
            g1_direction: self.g1_direction,
            ell: self.ell,
            mu: self.mu,
            metabelian: self.metabelian,
            g1_class_le2: self.g1_class_le2,
            g1_abelian: self.g1_abelian,
            exponent_exp: self.exponent_exp,
            branch_order_exps: self.branches.iter().map(|b| b.order_exp).collect(),
        }
    }
}

/// When to check every element of a branch rather than trusting one
/// representative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchVerify {
    /// Exhaustive below 5^6, representative-only above.
    Auto,
    Always,
    Never,
}

/// Compute the maximal-class profile of an enumerated group.
pub fn maximal_class_profile(
    g: &ConcreteGroup,
    verify: BranchVerify,
) -> Result<MaxClassOutcome, GroupError> {
    let n = g.length();
    let series = g.lower_central_series();
    let class = series.class();
    if class + 1 != n {
        return Ok(MaxClassOutcome::NotMaximalClass { n, class });
    }
    let p = g.prime();
    let exponent_exp = g.exponent_exp();
    let metabelian = {
        let derived = &series.terms[1.min(series.terms.len() - 1)];
        pairwise_commute(g, &derived.gens)
    };

    let exhaustive = match verify {
        BranchVerify::Auto => g.order() < 5u64.pow(6),
        BranchVerify::Always => true,
        BranchVerify::Never => false,
    };

    if n < 4 || g.rank() != 2 {
        let branches = if g.rank() == 2 { branch_scan(g, None, exhaustive)? } else { vec![] };
        return Ok(MaxClassOutcome::Profile(Box::new(MaxClassProfile {
            p,
            n,
            series,
            g1: None,
            g1_direction: None,
            ell: None,
            branches,
            mu: None,
            metabelian,
            g1_class_le2: None,
            g1_abelian: None,
            exponent_exp,
        })))
    }

    // G_1 = C_G(G_2/G_4): elements whose commutators with G_2 land in G_4.
    let g2 = &series.terms[1];
    let g4 = if series.terms.len() > 3 { series.terms[3].clone() } else { g.trivial_subgroup() };
    let g1 = centralizer_modulo(g, &g2.gens, &g4);
    assert_eq!(g1.order() * p as u64, g.order(), "G_1 must be maximal");
    let g1_direction = g1
        .elems
        .iter()
        .find_map(|&x| g.direction_of(x))
        .expect("G_1 contains a non-Frattini element");

    let g1_derived = g.commutator_subgroup(&g1.gens, &g1.gens);
    let g1_abelian = g1_derived.order() == 1;
    let g1_class_le2 = g1_abelian || g.commutator_contained(&g1_derived.gens, &g1.gens, &g.trivial_subgroup());

    let ell = degree_of_commutativity(g, &series, &g1);

    let branches = branch_scan(g, Some(g1_direction), exhaustive)?;
    let mu = branches
        .iter()
        .filter(|b| !b.is_g1 && b.order_exp == 1)
        .count() as u32;

    Ok(MaxClassOutcome::Profile(Box::new(MaxClassProfile {
        p,
        n,
        series,
        g1: Some(g1),
        g1_direction: Some(g1_direction),
        ell: Some(ell),
        branches,
        mu: Some(mu),
        metabelian,
        g1_class_le2: Some(g1_class_le2),
        g1_abelian: Some(g1_abelian),
        exponent_exp,
    })))
}

fn pairwise_commute(g: &ConcreteGroup, gens: &[u32]) -> bool {
    gens.iter().enumerate().all(|(i, &a)| gens.iter().take(i).all(|&b| g.comm(a, b) == 0))
}

/// Elements x with [x, t] in N for all t in the given generators; N normal.
fn centralizer_modulo(g: &ConcreteGroup, targets: &[u32], nsub: &Subgroup) -> Subgroup {
    let mut elems = Vec::new();
    let mut bits = crate::group::Bits::new(g.order() as usize);
    for x in g.elements() {
        if targets.iter().all(|&t| nsub.contains(g.comm(x, t))) {
            elems.push(x);
            bits.set(x);
        }
    }
    let gens = small_generating_set(g, &elems);
    Subgroup { elems, bits, gens }
}

fn small_generating_set(g: &ConcreteGroup, elems: &[u32]) -> Vec<u32> {
    let mut gens: Vec<u32> = Vec::new();
    let mut have = 1u64;
    for &x in elems {
        if x == 0 {
            continue;
        }
        if have == elems.len() as u64 {
            break;
        }
        let trial: Vec<u32> = gens.iter().copied().chain([x]).collect();
        let c = g.subgroup_closure(&trial);
        if c.order() > have {
            have = c.order();
            gens.push(x);
        }
    }
    gens
}

/// Largest ell <= n-3 with [G_i, G_j] <= G_{i+j+ell} for all i, j >= 1.
pub fn degree_of_commutativity(g: &ConcreteGroup, series: &SeriesChain, g1: &Subgroup) -> u32 {
    let n = g.length();
    let term = |i: usize| -> &Subgroup {
        if i == 1 {
            g1
        } else {
            let idx = (i - 1).min(series.terms.len() - 1);
            &series.terms[idx]
        }
    };
    'outer: for ell in (0..=(n as u32).saturating_sub(3)).rev() {
        for i in 1..n {
            for j in 1..=i {
                let target = term((i + j + ell as usize).min(n));
                if !g.commutator_contained(&term(i).gens, &term(j).gens, target) {
                    continue 'outer;
                }
            }
        }
        return ell;
    }
    unreachable!("ell = 0 always holds in a maximal-class group")
}

fn branch_scan(
    g: &ConcreteGroup,
    g1_direction: Option<u32>,
    exhaustive: bool,
) -> Result<Vec<BranchProfile>, GroupError> {
    let fratt = g.frattini();
    let p = g.prime();
    let mut reps: Vec<Option<u8>> = vec![None; (p + 1) as usize];
    let mut checked: Vec<u8> = vec![0; (p + 1) as usize];
    for x in g.elements() {
        if x == 0 || fratt.contains(x) {
            continue;
        }
        let d = g.direction_of(x).expect("non-Frattini element has a direction") as usize;
        match reps[d] {
            None => {
                reps[d] = Some(g.order_exp_of(x));
            }
            Some(k) => {
                if exhaustive && g.order_exp_of(x) != k {
                    return Err(GroupError::Precondition(format!(
                        "branch {d} mixes element orders p^{k} and p^{}",
                        g.order_exp_of(x)
                    )));
                }
            }
        }
        checked[d] = 1;
    }
    Ok(reps
        .into_iter()
        .enumerate()
        .map(|(d, k)| BranchProfile {
            direction: d as u32,
            is_g1: g1_direction == Some(d as u32),
            order_exp: k.expect("every direction hosts a branch"),
            uniformity_verified: exhaustive,
        })
        .collect())
}

/// Exhaustively verify that every branch has constant element order.
pub fn verify_branch_uniformity(g: &ConcreteGroup) -> Result<(), String> {
    if g.rank() != 2 {
        return Err("branch uniformity requires a 2-generated group".into());
    }
    let fratt = g.frattini();
    let p = g.prime();
    let mut seen: Vec<Option<u8>> = vec![None; (p + 1) as usize];
    for x in g.elements() {
        if x == 0 || fratt.contains(x) {
            continue;
        }
        let d = g.direction_of(x).unwrap() as usize;
        let k = g.order_exp_of(x);
        match seen[d] {
            None => seen[d] = Some(k),
            Some(k0) if k0 != k => {
                return Err(format!("branch {d} mixes orders p^{k0} and p^{k} at element {x}"));
            }
            _ => {}
        }
    }
    Ok(())
}

/// The set of uniform elements: G minus (G_1 union C_G(G_{n-2})),
/// computed from the definition.
pub fn uniform_elements(g: &ConcreteGroup, profile: &MaxClassProfile) -> Vec<u32> {
    assert!(profile.n >= 4, "uniform elements need n >= 4");
    let g1 = profile.g1.as_ref().expect("full profile");
    let gn2 = profile.gi(profile.n - 2);
    let cent = g.centralizer_of_set(&gn2.gens);
    g.elements().filter(|&x| !g1.contains(x) && !cent.contains(x)).collect()
}

/// C_G(G_{n-2}) as a subgroup, for the ell > 0 equivalence check.
pub fn centralizer_of_gn2(g: &ConcreteGroup, profile: &MaxClassProfile) -> Subgroup {
    let gn2 = profile.gi(profile.n - 2);
    g.centralizer_of_set(&gn2.gens)
}

/// Witness data for the power identity (s s_1^i)^p = a^i b^{i^2}.
#[derive(Debug, Clone, Serialize)]
pub struct MiechWitness {
    pub s: u32,
    pub s1: u32,
    pub a: u32,
    pub b: u32,
    /// Residual x_i^-1 a^i b^{i^2} per i = 1..p-1; all 0 (identity) when
    /// the identity holds.
    pub residuals: Vec<u32>,
    pub b_central: bool,
    pub b_order_le_p: bool,
    /// Set when G_1 is abelian, in which case b must be the identity.
    pub b_trivial_forced: Option<bool>,
}

impl MiechWitness {
    pub fn holds(&self) -> bool {
        self.residuals.iter().all(|&r| r == 0)
            && self.b_central
            && self.b_order_le_p
            && self.b_trivial_forced.unwrap_or(true)
    }
}

#[derive(Debug)]
pub enum MiechOutcome {
    NotApplicable(String),
    Witness(MiechWitness),
}

/// Fit a and b from i = 1, 2 and verify (s s_1^i)^p = a^i b^{i^2} for all
/// i = 1..p-1, with b required central of order at most p.
pub fn verify_miech_identity(
    g: &ConcreteGroup,
    profile: &MaxClassProfile,
) -> Result<MiechOutcome, GroupError> {
    if profile.is_reduced() {
        return Ok(MiechOutcome::NotApplicable("reduced profile".into()));
    }
    if !profile.metabelian {
        return Ok(MiechOutcome::NotApplicable("group is not metabelian".into()));
    }
    let p = g.prime();
    if p == 2 {
        return Ok(MiechOutcome::NotApplicable("identity needs odd p".into()));
    }
    let uniforms = uniform_elements(g, profile);
    let Some(&s) = uniforms.iter().find(|&&x| g.order_exp_of(x) == 1) else {
        return Ok(MiechOutcome::NotApplicable("no uniform element of order p".into()));
    };
    let g1 = profile.g1.as_ref().unwrap();
    let g2 = profile.gi(2);
    let s1 = g1
        .elems
        .iter()
        .copied()
        .find(|&x| !g2.contains(x))
        .expect("G_1 strictly contains G_2");

    let xs: Vec<u32> = (1..p)
        .map(|i| {
            let base = g.mult(s, g.pow(s1, i as i64));
            g.pow(base, p as i64)
        })
        .collect();
    // x_1 = a b, x_2 = a^2 b^4  =>  b^2 = x_1^-2 x_2, a = x_1 b^-1
    let b2 = g.mult(g.pow(xs[0], -2), xs[1]);
    let half = ((p + 1) / 2) as i64;
    let b = g.pow(b2, half);
    let a = g.mult(xs[0], g.inv(b));

    let center = g.center();
    let b_central = center.contains(b);
    let b_order_le_p = g.order_exp_of(b) <= 1;
    let residuals: Vec<u32> = (1..p)
        .map(|i| {
            let expected = g.mult(g.pow(a, i as i64), g.pow(b, (i * i % p) as i64));
            g.mult(g.inv(xs[(i - 1) as usize]), expected)
        })
        .collect();
    let b_trivial_forced = profile.g1_abelian.filter(|&ab| ab).map(|_| b == 0);
    Ok(MiechOutcome::Witness(MiechWitness {
        s,
        s1,
        a,
        b,
        residuals,
        b_central,
        b_order_le_p,
        b_trivial_forced,
    }))
}

#[derive(Debug, PartialEq, Eq)]
pub enum PowerLocationOutcome {
    NotApplicable(String),
    Ok,
    Violation { i: usize, x: u32 },
}

/// For |G| >= p^{p+2}: x^p lies in G_{i+p-1} minus G_{i+p} for every
/// x in G_i minus G_{i+1}, i = 1..=n-p.
pub fn verify_pth_power_location(
    g: &ConcreteGroup,
    profile: &MaxClassProfile,
) -> Result<PowerLocationOutcome, GroupError> {
    let p = g.prime() as usize;
    let n = profile.n;
    if profile.is_reduced() || n < p + 2 {
        return Ok(PowerLocationOutcome::NotApplicable(format!(
            "needs |G| >= p^(p+2), have n = {n}"
        )));
    }
    for i in 1..=n - p {
        let gi = profile.gi(i);
        let gi1 = profile.gi(i + 1);
        let lower = profile.gi(i + p - 1);
        let upper = profile.gi(i + p);
        for &x in &gi.elems {
            if gi1.contains(x) {
                continue;
            }
            let xp = g.pow(x, p as i64);
            if !lower.contains(xp) || (upper.order() < lower.order() && upper.contains(xp)) {
                return Ok(PowerLocationOutcome::Violation { i, x });
            }
        }
    }
    Ok(PowerLocationOutcome::Ok)
}

/// For |G| <= p^{p+1}: exp(G/Z(G)) = p.
pub fn verify_small_order_exponent(g: &ConcreteGroup) -> Result<bool, GroupError> {
    let z = g.center();
    let q = g.quotient(&z)?;
    Ok(q.group.exponent_exp() <= 1)
}

/// Sampled check of the two-variable identity
/// [sigma_{i,k}, sigma_{i,l}] = [s_{k+1}, s_{l+1}]^{i^2}
/// where sigma_{i,k} = [s_1^i, s, ..k.., s]; requires G_1 of class <= 2.
pub fn verify_sigma_commutator_identity(
    g: &ConcreteGroup,
    profile: &MaxClassProfile,
) -> Result<Option<bool>, GroupError> {
    if profile.is_reduced() || profile.g1_class_le2 != Some(true) {
        return Ok(None);
    }
    let p = g.prime();
    let uniforms = uniform_elements(g, profile);
    let Some(&s) = uniforms.first() else {
        return Ok(None);
    };
    let g1 = profile.g1.as_ref().unwrap();
    let g2 = profile.gi(2);
    let s1 = g1.elems.iter().copied().find(|&x| !g2.contains(x)).unwrap();

    let n = profile.n;
    // s_j = [s_1, s, ..j-1..]
    let mut s_chain = vec![s1];
    for _ in 2..n {
        let prev = *s_chain.last().unwrap();
        s_chain.push(g.comm(prev, s));
    }
    let iterated = |start: u32, count: usize| -> u32 {
        let mut cur = start;
        for _ in 0..count {
            cur = g.comm(cur, s);
        }
        cur
    };
    for i in 1..p {
        let s1i = g.pow(s1, i as i64);
        for k in 1..(n - 1).min(4) {
            for l in 0..k {
                let sik = iterated(s1i, k);
                let sil = iterated(s1i, l);
                let lhs = g.comm(sik, sil);
                let rhs = g.pow(
                    g.comm(s_chain[k], s_chain[l]),
                    ((i * i) % p) as i64,
                );
                if lhs != rhs {
                    return Ok(Some(false));
                }
            }
        }
    }
    Ok(Some(true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forge::construct_pquotient;
    use crate::group::enumerate;
    use crate::pc::parse_presentation;

    fn pq(p: u32, m: u32) -> ConcreteGroup {
        enumerate(&construct_pquotient(p, m).unwrap().presentation).unwrap()
    }

    #[test]
    fn heisenberg_is_reduced_maximal_class() {
        let g = enumerate(&parse_presentation("p 5\nn 3\ncomm 2 1 : 3^1\n").unwrap()).unwrap();
        let out = maximal_class_profile(&g, BranchVerify::Auto).unwrap();
        let profile = out.profile().expect("maximal class");
        assert!(profile.is_reduced());
        assert_eq!(profile.series.class(), 2);
        assert!(profile.mu.is_none());
    }

    #[test]
    fn elementary_abelian_rank4_is_not_maximal_class() {
        let g = enumerate(&parse_presentation("p 5\nn 4\n").unwrap()).unwrap();
        let out = maximal_class_profile(&g, BranchVerify::Auto).unwrap();
        assert!(matches!(out, MaxClassOutcome::NotMaximalClass { n: 4, class: 1 }));
    }

    #[test]
    fn pquotient_profile_has_abelian_g1_and_max_ell() {
        let g = pq(5, 5);
        let out = maximal_class_profile(&g, BranchVerify::Auto).unwrap();
        let profile = out.profile().unwrap();
        assert_eq!(profile.n, 6);
        assert_eq!(profile.g1_abelian, Some(true));
        assert_eq!(profile.ell, Some(3)); // n - 3
        assert_eq!(profile.mu, Some(5));
        assert!(profile.metabelian);
        // G_1 branch order is p^2, all others p
        for b in &profile.branches {
            if b.is_g1 {
                assert_eq!(b.order_exp, 2);
            } else {
                assert_eq!(b.order_exp, 1);
            }
        }
        assert_eq!(profile.exponent_exp, 2);
    }

    #[test]
    fn pquotient_depth2_all_branches_order_p() {
        let g = pq(5, 2);
        let out = maximal_class_profile(&g, BranchVerify::Always).unwrap();
        let profile = out.profile().unwrap();
        assert!(profile.is_reduced());
        for b in &profile.branches {
            assert_eq!(b.order_exp, 1);
        }
    }

    #[test]
    fn g1_is_the_centralizer_of_gn2_when_ell_positive() {
        let g = pq(5, 4);
        let out = maximal_class_profile(&g, BranchVerify::Auto).unwrap();
        let profile = out.profile().unwrap();
        assert!(profile.ell.unwrap() > 0);
        let cent = centralizer_of_gn2(&g, profile);
        assert_eq!(cent.elems, profile.g1.as_ref().unwrap().elems);
    }

    #[test]
    fn uniform_elements_of_pquotient() {
        let g = pq(5, 4);
        let out = maximal_class_profile(&g, BranchVerify::Auto).unwrap();
        let profile = out.profile().unwrap();
        let uniforms = uniform_elements(&g, profile);
        // ell > 0 so C_G(G_{n-2}) = G_1: uniforms are everything outside G_1
        assert_eq!(uniforms.len() as u64, g.order() - g.order() / 5);
        let z = g.center();
        for &s in uniforms.iter().step_by(97) {
            // s^p central, |C_G(s)| = p^2 via orbit-stabilizer
            assert!(z.contains(g.pow(s, 5)));
            let class = g.conjugacy_class_of(s);
            assert_eq!(class.len() as u64, g.order() / 25);
            // conjugates of s = s Phi(G)
            let fratt = g.frattini();
            for &c in &class {
                assert!(fratt.contains(g.mult(g.inv(s), c)));
            }
            assert_eq!(class.len() as u64, fratt.order());
        }
    }

    #[test]
    fn branch_uniformity_on_corpus() {
        for m in 2..=5 {
            let g = pq(5, m);
            assert!(verify_branch_uniformity(&g).is_ok());
        }
    }

    #[test]
    fn miech_identity_on_pquotient_is_trivial() {
        let g = pq(5, 5);
        let out = maximal_class_profile(&g, BranchVerify::Auto).unwrap();
        let profile = out.profile().unwrap();
        match verify_miech_identity(&g, profile).unwrap() {
            MiechOutcome::Witness(w) => {
                assert!(w.holds(), "{w:?}");
                // split extension: all (s s_1^i)^p = 1, so a = b = 1
                assert_eq!(w.a, 0);
                assert_eq!(w.b, 0);
                assert_eq!(w.b_trivial_forced, Some(true));
            }
            MiechOutcome::NotApplicable(why) => panic!("unexpectedly inapplicable: {why}"),
        }
    }

    #[test]
    fn pth_power_location_applicability() {
        let g = pq(5, 5); // order 5^6 = p^{p+1}: not applicable
        let out = maximal_class_profile(&g, BranchVerify::Auto).unwrap();
        let profile = out.profile().unwrap();
        assert!(matches!(
            verify_pth_power_location(&g, profile).unwrap(),
            PowerLocationOutcome::NotApplicable(_)
        ));
        assert!(verify_small_order_exponent(&g).unwrap());
    }

    #[test]
    fn sigma_identity_on_abelian_g1() {
        let g = pq(5, 4);
        let out = maximal_class_profile(&g, BranchVerify::Auto).unwrap();
        let profile = out.profile().unwrap();
        assert_eq!(verify_sigma_commutator_identity(&g, profile).unwrap(), Some(true));
    }

    #[test]
    fn quotient_by_center_is_maximal_class() {
        let g = pq(5, 5);
        let z = g.center();
        let q = g.quotient(&z).unwrap();
        assert_eq!(q.group.order(), 5u64.pow(5));
        let out = maximal_class_profile(&q.group, BranchVerify::Auto).unwrap();
        assert!(out.profile().is_some());
    }

    #[test]
    fn pquotient_mu_is_p_and_g1_abelian_for_deep_quotients() {
        for m in [4u32, 5, 6] {
            let g = pq(5, m);
            let out = maximal_class_profile(&g, BranchVerify::Auto).unwrap();
            let profile = out.profile().unwrap();
            assert_eq!(profile.mu, Some(5), "m = {m}");
            assert_eq!(profile.g1_abelian, Some(true), "m = {m}");
        }
    }

    #[test]
    fn pquotient_minimal_subgroup_classes_regression() {
        let g = pq(5, 5);
        let part = g.minimal_subgroup_classes();
        // 624 order-5 elements inside A plus 12500 outside, 4 generators
        // per subgroup
        assert_eq!(part.subgroup_mins.len(), 3281);
        assert_eq!(part.class_count(), 37);
    }

    #[test]
    fn inverse_law_on_all_elements_at_order_5_to_5() {
        let g = pq(5, 4);
        assert_eq!(g.order(), 3125);
        let exp = g.exponent_exp();
        for x in g.elements() {
            assert_eq!(g.mult(x, g.inv(x)), 0);
            assert_eq!(g.mult(g.inv(x), x), 0);
            assert!(g.order_exp_of(x) as u32 <= exp, "element order divides exp(G)");
        }
    }
}
