//! Corpus constructors: finite quotients of the pro-p group of maximal
//! class (with the cyclotomic ring model as an independent oracle),
//! abelian reference groups, and a structure-constant search for
//! metabelian maximal-class groups.

pub mod ring;
pub mod search;

use thiserror::Error;

use crate::pc::{GroupElement, PcError, PcPresentation, Word};
use ring::{RingContext, RingElt, RingError, RingPoint};

#[derive(Debug, Error)]
pub enum ForgeError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Pc(#[from] PcError),
    #[error("{0} is not a power of a prime shared with {1}")]
    NotCommonPrimePower(u64, u64),
    #[error("{0}")]
    Envelope(String),
}

/// A finite quotient of the pro-p group of maximal class: the split
/// extension of A = Z[zeta]/p^m by the order-p automorphism zeta, of order
/// p^{m+1}, bundled with its weight-ordered pc presentation and the
/// generator images realizing the isomorphism onto the ring model.
pub struct PQuotient {
    pub p: u32,
    pub m: u32,
    pub presentation: PcPresentation,
    pub ring: RingContext,
    /// gen_points[i] is the ring-model image of pc generator g_{i+1}.
    pub gen_points: Vec<RingPoint>,
}

impl PQuotient {
    /// Image of a normal form under the bundled isomorphism.
    pub fn eval(&self, e: &GroupElement) -> RingPoint {
        let mut acc = self.ring.point_identity();
        for (i, &exp) in e.exps.iter().enumerate() {
            for _ in 0..exp {
                acc = self.ring.point_mul(&acc, &self.gen_points[i]);
            }
        }
        acc
    }
}

/// Build the order-p^{m+1} quotient. Generators come out in weight order:
/// g_1 = sigma, g_2 = 1 in A, and g_{i+1} = [g_i, g_1], so gamma_i(G) is
/// generated by g_{i+1}, ..., g_n and quotients by the series terms are
/// truncations.
pub fn construct_pquotient(p: u32, m: u32) -> Result<PQuotient, ForgeError> {
    let ring = RingContext::new(p, m)?;
    let n = (m + 1) as usize;

    // u[j] (0-based slot j-2) spans the j-2 step of the pi-filtration:
    // u_2 = 1, u_{j+1} = (zeta^{-1} - 1) u_j = [u_j, sigma] in the model.
    let mut u: Vec<RingElt> = Vec::with_capacity(n - 1);
    u.push(ring.one());
    for _ in 1..n - 1 {
        let prev = u.last().unwrap();
        let turned = ring.mul_zeta_pow(prev, p - 1);
        u.push(ring.add(&turned, &ring.neg(prev)));
    }

    // digits of x along the filtration: x = sum e_j u_j with e_j in [0, p)
    let digits_of = |x: &RingElt| -> Vec<u8> {
        let mut digits = vec![0u8; n - 1];
        let mut rest = x.clone();
        for j in 0..n - 1 {
            // find e with rest - e*u_j in p^{j+1}
            let mut found = None;
            for e in 0..p {
                let cand = ring.add(&rest, &ring.scalar_mul(&u[j], -(e as i64)));
                if ring.in_ideal(&cand, (j + 1) as u32) {
                    found = Some((e as u8, cand));
                    break;
                }
            }
            let (e, next) = found.expect("filtration digit must exist");
            digits[j] = e;
            rest = next;
        }
        assert!(ring.in_ideal(&rest, m), "expansion must terminate at zero");
        digits
    };

    let mut pow_rels: Vec<(usize, Word)> = Vec::new();
    for i in 1..n {
        // g_{i+1}^p = p * u_i, expressed in later generators
        let target = ring.scalar_mul(&u[i - 1], p as i64);
        let digits = digits_of(&target);
        let letters: Vec<(usize, u8)> = digits
            .iter()
            .enumerate()
            .filter(|&(_, &e)| e != 0)
            .map(|(j, &e)| (j + 1, e))
            .collect();
        assert!(letters.iter().all(|&(j, _)| j > i), "p-th powers sink at least p-1 steps");
        if !letters.is_empty() {
            pow_rels.push((i, Word { letters }));
        }
    }
    let mut comm_rels: Vec<((usize, usize), Word)> = Vec::new();
    for i in 1..n - 1 {
        comm_rels.push(((i, 0), Word { letters: vec![(i + 1, 1)] }));
    }
    let presentation = PcPresentation::new(p, n, pow_rels, comm_rels)?;

    let mut gen_points = Vec::with_capacity(n);
    gen_points.push(RingPoint { a: ring.zero(), sigma: 1 });
    for uj in &u {
        gen_points.push(RingPoint { a: uj.clone(), sigma: 0 });
    }
    Ok(PQuotient { p, m, presentation, ring, gen_points })
}

/// Presentation of C_{n1} x C_{n2} where n1 and n2 are powers of a common
/// prime (n2 = 1 degenerates to the cyclic group C_{n1}).
pub fn construct_abelian(n1: u64, n2: u64) -> Result<PcPresentation, ForgeError> {
    let (p, a) = prime_power(n1).ok_or(ForgeError::NotCommonPrimePower(n1, n2))?;
    let b = if n2 == 1 {
        0
    } else {
        let (q, b) = prime_power(n2).ok_or(ForgeError::NotCommonPrimePower(n1, n2))?;
        if q != p {
            return Err(ForgeError::NotCommonPrimePower(n1, n2));
        }
        b
    };
    let n = (a + b) as usize;
    let mut pow_rels = Vec::new();
    for i in 0..a as usize - 1 {
        pow_rels.push((i, Word { letters: vec![(i + 1, 1)] }));
    }
    for i in 0..(b as usize).saturating_sub(1) {
        let base = a as usize;
        pow_rels.push((base + i, Word { letters: vec![(base + i + 1, 1)] }));
    }
    Ok(PcPresentation::new(p, n, pow_rels, vec![])?)
}

fn prime_power(x: u64) -> Option<(u32, u32)> {
    if x < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= x {
        if x % p == 0 {
            break;
        }
        p += 1;
    }
    let base = if x % p == 0 { p } else { x };
    let mut rest = x;
    let mut e = 0;
    while rest > 1 {
        if rest % base != 0 {
            return None;
        }
        rest /= base;
        e += 1;
    }
    u32::try_from(base).ok().map(|b| (b, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::enumerate;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn pquotient_small_orders_and_exponents() {
        let q = construct_pquotient(5, 2).unwrap();
        let g = enumerate(&q.presentation).unwrap();
        assert_eq!(g.order(), 125);
        assert_eq!(g.exponent_exp(), 1);
        assert_eq!(g.lower_central_series().class(), 2);

        let q = construct_pquotient(5, 4).unwrap();
        let g = enumerate(&q.presentation).unwrap();
        assert_eq!(g.order(), 5u64.pow(5));
        assert_eq!(g.lower_central_series().class(), 4);
        assert_eq!(g.exponent_exp(), 1);

        let q = construct_pquotient(5, 5).unwrap();
        let g = enumerate(&q.presentation).unwrap();
        assert_eq!(g.order(), 5u64.pow(6));
        assert_eq!(g.lower_central_series().class(), 5);
        // exponent 25: the base A has exponent p^ceil(m/(p-1))
        assert_eq!(g.exponent_exp(), 2);
    }

    #[test]
    fn pquotient_series_is_truncation() {
        let q = construct_pquotient(5, 4).unwrap();
        let g = enumerate(&q.presentation).unwrap();
        let lcs = g.lower_central_series();
        let orders: Vec<u64> = lcs.terms.iter().map(|t| t.order()).collect();
        assert_eq!(orders, vec![3125, 125, 25, 5, 1]);
        // gamma_i = <g_{i+1}, ..., g_n> for i >= 2
        for (i, term) in lcs.terms.iter().enumerate().skip(1) {
            let gens: Vec<u32> = (i + 1..g.length()).map(|j| g.generator_index(j)).collect();
            let span = g.subgroup_closure(&gens);
            assert_eq!(span.elems, term.elems);
        }
    }

    #[test]
    fn pquotient_center_order_p() {
        let q = construct_pquotient(5, 5).unwrap();
        let g = enumerate(&q.presentation).unwrap();
        assert_eq!(g.center().order(), 5);
    }

    #[test]
    fn bridge_generator_times_all_elements() {
        // the generator-defined map is a homomorphism: checked exhaustively
        // for m <= 4
        for (p, m) in [(3u32, 3u32), (5, 3), (5, 4), (7, 2)] {
            let q = construct_pquotient(p, m).unwrap();
            let g = enumerate(&q.presentation).unwrap();
            for i in 0..g.length() {
                let gi = g.generator_index(i);
                let gi_pt = q.eval(&g.element(gi));
                for x in g.elements() {
                    let lhs = q.eval(&g.element(g.mult(gi, x)));
                    let rhs = q.ring.point_mul(&gi_pt, &q.eval(&g.element(x)));
                    assert_eq!(lhs, rhs, "p={p} m={m} gen={i} x={x}");
                }
            }
        }
    }

    #[test]
    fn bridge_is_bijective_small() {
        let q = construct_pquotient(5, 3).unwrap();
        let g = enumerate(&q.presentation).unwrap();
        let mut images = std::collections::HashSet::new();
        for x in g.elements() {
            let pt = q.eval(&g.element(x));
            assert!(images.insert((pt.a.coords.clone(), pt.sigma)));
        }
        assert_eq!(images.len() as u64, g.order());
    }

    #[test]
    fn bridge_sampled_pairs_match_at_depth_5() {
        let q = construct_pquotient(5, 5).unwrap();
        let g = enumerate(&q.presentation).unwrap();
        let mut rng = StdRng::seed_from_u64(99);
        for _ in 0..2_000 {
            let x = rng.random_range(0..g.order()) as u32;
            let y = rng.random_range(0..g.order()) as u32;
            let lhs = q.eval(&g.element(g.mult(x, y)));
            let rhs = q.ring.point_mul(&q.eval(&g.element(x)), &q.eval(&g.element(y)));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn pquotient_envelope() {
        // construction (not enumeration) must work across the envelope
        for p in [3u32, 5, 7] {
            for m in 1..=8u32 {
                let q = construct_pquotient(p, m).unwrap();
                assert_eq!(q.presentation.order(), (p as u64).pow(m + 1));
            }
        }
    }

    #[test]
    fn abelian_constructions() {
        let c5c5 = construct_abelian(5, 5).unwrap();
        assert_eq!(enumerate(&c5c5).unwrap().order(), 25);
        let c25c25 = construct_abelian(25, 25).unwrap();
        let g = enumerate(&c25c25).unwrap();
        assert_eq!(g.order(), 625);
        assert_eq!(g.exponent_exp(), 2);
        let c25c5 = construct_abelian(25, 5).unwrap();
        assert_eq!(enumerate(&c25c5).unwrap().order(), 125);
        assert!(construct_abelian(6, 6).is_err());
        assert!(construct_abelian(10, 5).is_err());
    }
}
