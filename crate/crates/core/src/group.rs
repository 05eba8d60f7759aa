//! Enumerated finite p-groups and subgroup machinery.
//!
//! A [`ConcreteGroup`] indexes all p^n normal forms of a consistent
//! presentation lexicographically (index 0 is the identity) and keeps
//! right-multiplication tables per generator, so products cost a handful
//! of table lookups. No full multiplication table is stored.
//!
//! Everything here is immutable after [`enumerate`]; the analyses are pure
//! functions and safe to call from multiple threads.

use serde::Serialize;
use thiserror::Error;

use crate::pc::{ActionTables, Consistency, ConsistencyViolation, GroupElement, PcError, PcPresentation};

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("presentation is inconsistent: {0}")]
    Inconsistent(ConsistencyViolation),
    #[error(transparent)]
    Pc(#[from] PcError),
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("element index {0} out of range")]
    OutOfRange(u64),
    #[error("{0}")]
    Precondition(String),
}

/// Dense bitset over element indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bits {
    words: Vec<u64>,
}

impl Bits {
    pub fn new(len: usize) -> Self {
        Bits { words: vec![0; len.div_ceil(64)] }
    }

    #[inline]
    pub fn set(&mut self, i: u32) {
        self.words[(i >> 6) as usize] |= 1u64 << (i & 63);
    }

    #[inline]
    pub fn get(&self, i: u32) -> bool {
        self.words[(i >> 6) as usize] >> (i & 63) & 1 == 1
    }

    pub fn intersects(&self, other: &Bits) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn or_with(&mut self, other: &Bits) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn count(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }
}

/// A subgroup as an explicit sorted element-index set with the generating
/// set that produced it.
#[derive(Debug, Clone)]
pub struct Subgroup {
    pub elems: Vec<u32>,
    pub bits: Bits,
    pub gens: Vec<u32>,
}

impl Subgroup {
    pub fn order(&self) -> u64 {
        self.elems.len() as u64
    }

    #[inline]
    pub fn contains(&self, x: u32) -> bool {
        self.bits.get(x)
    }
}

/// Descending chain G = N_1 >= N_2 >= ... >= 1.
#[derive(Debug, Clone)]
pub struct SeriesChain {
    pub terms: Vec<Subgroup>,
}

impl SeriesChain {
    /// Nilpotency class: number of strict steps down to the trivial group.
    pub fn class(&self) -> usize {
        self.terms.len() - 1
    }
}

/// All order-p subgroups partitioned into conjugacy classes.
///
/// Subgroups are identified by the least element index among their
/// nontrivial members; class ids are assigned in increasing order of the
/// class's least representative, so they do not depend on traversal order.
#[derive(Debug, Clone)]
pub struct ConjugacyPartition {
    /// Least nontrivial element of each order-p subgroup, sorted.
    pub subgroup_mins: Vec<u32>,
    /// Class id per subgroup (parallel to `subgroup_mins`).
    pub class_of: Vec<u32>,
    /// Canonical representative (least subgroup min) per class id.
    pub class_reps: Vec<u32>,
}

impl ConjugacyPartition {
    pub fn class_count(&self) -> usize {
        self.class_reps.len()
    }

    pub fn subgroup_index(&self, min_elem: u32) -> Option<usize> {
        self.subgroup_mins.binary_search(&min_elem).ok()
    }
}

/// Conjugacy classes of elements: class id per element, reps sorted.
#[derive(Debug, Clone)]
pub struct ElementClasses {
    pub class_of: Vec<u32>,
    pub reps: Vec<u32>,
}

/// A quotient group together with the canonical projection.
pub struct Quotient {
    pub group: ConcreteGroup,
    /// projection[x] is the index in `group` of the coset of x.
    pub projection: Vec<u32>,
}

/// Fully enumerated group: bijective indexing of normal forms plus
/// per-generator action tables, inverse and order tables, and the Frattini
/// quotient labeling.
pub struct ConcreteGroup {
    pres: PcPresentation,
    tables: ActionTables,
    p: u32,
    n: usize,
    order: u64,
    inv: Vec<u32>,
    /// ord_exp[x] = k with ord(x) = p^k.
    ord_exp: Vec<u8>,
    fratt: Subgroup,
    /// Rank r of G/Phi(G) and per-element labels in F_p^r (digits packed
    /// little-endian base p).
    rank: u32,
    fq_label: Vec<u32>,
}

/// Enumerate a consistent presentation. Consistency is re-checked; an
/// inconsistent presentation is an error, not a panic.
pub fn enumerate(pres: &PcPresentation) -> Result<ConcreteGroup, GroupError> {
    let (report, tables) = pres.check_consistency_with_tables()?;
    let tables = match report {
        Consistency::Ok { .. } => tables.expect("tables accompany a passing check"),
        Consistency::Violation(v) => return Err(GroupError::Inconsistent(v)),
    };
    let order = tables.order;
    let p = pres.prime();
    let n = pres.length();

    let mut g = ConcreteGroup {
        pres: pres.clone(),
        tables,
        p,
        n,
        order,
        inv: Vec::new(),
        ord_exp: Vec::new(),
        fratt: Subgroup { elems: vec![0], bits: Bits::new(1), gens: vec![] },
        rank: 0,
        fq_label: Vec::new(),
    };
    g.inv = g.build_inverse_table();
    g.ord_exp = g.build_order_table();
    let (fratt, rank, labels) = g.build_frattini_quotient();
    g.fratt = fratt;
    g.rank = rank;
    g.fq_label = labels;
    Ok(g)
}

impl ConcreteGroup {
    pub fn presentation(&self) -> &PcPresentation {
        &self.pres
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn length(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> + '_ {
        0..self.order as u32
    }

    pub fn element(&self, x: u32) -> GroupElement {
        GroupElement { exps: self.tables.decode(x) }
    }

    pub fn index_of(&self, e: &GroupElement) -> Result<u32, GroupError> {
        if e.exps.len() != self.n {
            return Err(GroupError::Pc(PcError::LengthMismatch { got: e.exps.len(), want: self.n }));
        }
        Ok(self.tables.encode(&e.exps))
    }

    pub fn generator_index(&self, i: usize) -> u32 {
        self.tables.encode(&self.pres.generator(i).exps)
    }

    #[inline]
    pub fn mult(&self, a: u32, b: u32) -> u32 {
        let v = self.tables.decode(b);
        self.tables.apply_element(a, &v)
    }

    /// a * b where b is given by its predecoded exponent digits; avoids
    /// the per-call decode in hot scans.
    #[inline]
    pub fn mult_digits(&self, a: u32, b_digits: &[u8]) -> u32 {
        self.tables.apply_element(a, b_digits)
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    pub fn conj(&self, x: u32, g: u32) -> u32 {
        self.mult(self.mult(self.inv(g), x), g)
    }

    pub fn comm(&self, x: u32, y: u32) -> u32 {
        self.mult(self.mult(self.inv(x), self.inv(y)), self.mult(x, y))
    }

    pub fn pow(&self, a: u32, k: i64) -> u32 {
        if k < 0 {
            return self.pow(self.inv(a), -k);
        }
        let mut result = 0u32;
        let mut base = a;
        let mut k = k as u64;
        while k > 0 {
            if k & 1 == 1 {
                result = self.mult(result, base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mult(base, base);
            }
        }
        result
    }

    /// ord(x) as p^k.
    pub fn order_of(&self, x: u32) -> u64 {
        (self.p as u64).pow(self.ord_exp[x as usize] as u32)
    }

    pub fn order_exp_of(&self, x: u32) -> u8 {
        self.ord_exp[x as usize]
    }

    /// e with exp(G) = p^e.
    pub fn exponent_exp(&self) -> u32 {
        self.ord_exp.iter().copied().max().unwrap_or(0) as u32
    }

    fn build_inverse_table(&self) -> Vec<u32> {
        let p = self.p as u8;
        let mut inv = vec![0u32; self.order as usize];
        for x in 0..self.order as u32 {
            let mut y = x;
            let mut v = 0u32;
            loop {
                let digits = self.tables.decode(y);
                let Some(i) = digits.iter().position(|&d| d != 0) else {
                    break;
                };
                let k = p - digits[i];
                for _ in 0..k {
                    y = self.tables.gen_table[i][y as usize];
                    v = self.tables.gen_table[i][v as usize];
                }
            }
            inv[x as usize] = v;
        }
        inv
    }

    fn build_order_table(&self) -> Vec<u8> {
        let mut ord = vec![0u8; self.order as usize];
        for x in 0..self.order as u32 {
            let mut y = x;
            let mut k = 0u8;
            while y != 0 {
                y = self.pow(y, self.p as i64);
                k += 1;
                assert!((k as usize) <= self.n, "order exceeds group order");
            }
            ord[x as usize] = k;
        }
        ord
    }

    // ----- subgroup machinery -----

    pub fn trivial_subgroup(&self) -> Subgroup {
        let mut bits = Bits::new(self.order as usize);
        bits.set(0);
        Subgroup { elems: vec![0], bits, gens: vec![] }
    }

    pub fn full_subgroup(&self) -> Subgroup {
        let mut bits = Bits::new(self.order as usize);
        let elems: Vec<u32> = (0..self.order as u32).collect();
        for &x in &elems {
            bits.set(x);
        }
        let gens = (0..self.n).map(|i| self.generator_index(i)).collect();
        Subgroup { elems, bits, gens }
    }

    /// Smallest subgroup containing `gens`.
    pub fn subgroup_closure(&self, gens: &[u32]) -> Subgroup {
        let mut bits = Bits::new(self.order as usize);
        bits.set(0);
        let mut elems = vec![0u32];
        let mut stack = vec![0u32];
        let gens: Vec<u32> = {
            let mut gs: Vec<u32> = gens.iter().copied().filter(|&g| g != 0).collect();
            gs.sort_unstable();
            gs.dedup();
            gs
        };
        while let Some(x) = stack.pop() {
            for &g in &gens {
                let y = self.mult(x, g);
                if !bits.get(y) {
                    bits.set(y);
                    elems.push(y);
                    stack.push(y);
                }
            }
        }
        elems.sort_unstable();
        debug_assert!(is_power_of(elems.len() as u64, self.p as u64));
        Subgroup { elems, bits, gens }
    }

    /// Smallest normal subgroup containing `gens`.
    pub fn normal_closure(&self, gens: &[u32]) -> Subgroup {
        let mut work: Vec<u32> = gens.to_vec();
        loop {
            let sub = self.subgroup_closure(&work);
            let mut grew = false;
            for &h in &sub.gens {
                for i in 0..self.n {
                    let g = self.generator_index(i);
                    let c = self.conj(h, g);
                    if !sub.contains(c) {
                        work.push(c);
                        grew = true;
                    }
                }
            }
            if !grew {
                return sub;
            }
        }
    }

    /// [A, B]: normal closure of the pairwise commutators of the two
    /// generating sets.
    pub fn commutator_subgroup(&self, a_gens: &[u32], b_gens: &[u32]) -> Subgroup {
        let mut comms = Vec::new();
        for &a in a_gens {
            for &b in b_gens {
                let c = self.comm(a, b);
                if c != 0 {
                    comms.push(c);
                }
            }
        }
        self.normal_closure(&comms)
    }

    /// Is [A, B] contained in N? Sound for normal N: [xy, z] = [x,z]^y [y,z]
    /// reduces membership to generator pairs.
    pub fn commutator_contained(&self, a_gens: &[u32], b_gens: &[u32], n: &Subgroup) -> bool {
        a_gens
            .iter()
            .all(|&a| b_gens.iter().all(|&b| n.contains(self.comm(a, b))))
    }

    /// Lower central series G = gamma_1 >= gamma_2 >= ... >= 1.
    pub fn lower_central_series(&self) -> SeriesChain {
        let whole = self.full_subgroup();
        let group_gens: Vec<u32> = (0..self.n).map(|i| self.generator_index(i)).collect();
        let mut terms = vec![whole];
        loop {
            let last = terms.last().unwrap();
            if last.order() == 1 {
                break;
            }
            let next = self.commutator_subgroup(&last.gens, &group_gens);
            assert!(next.order() < last.order(), "series must strictly descend");
            terms.push(next);
        }
        SeriesChain { terms }
    }

    pub fn derived_subgroup(&self) -> Subgroup {
        let gens: Vec<u32> = (0..self.n).map(|i| self.generator_index(i)).collect();
        self.commutator_subgroup(&gens, &gens)
    }

    pub fn center(&self) -> Subgroup {
        let gens: Vec<u32> = (0..self.n).map(|i| self.generator_index(i)).collect();
        self.centralizer_of_set(&gens)
    }

    /// Elements commuting with every element of `targets`.
    pub fn centralizer_of_set(&self, targets: &[u32]) -> Subgroup {
        let mut elems = Vec::new();
        let mut bits = Bits::new(self.order as usize);
        for x in 0..self.order as u32 {
            if targets.iter().all(|&t| self.mult(x, t) == self.mult(t, x)) {
                elems.push(x);
                bits.set(x);
            }
        }
        let gens = elems.iter().copied().filter(|&x| x != 0).collect();
        Subgroup { elems, bits, gens }
    }

    pub fn centralizer_of_subgroup(&self, h: &Subgroup) -> Subgroup {
        self.centralizer_of_set(&h.gens)
    }

    pub fn is_normal(&self, h: &Subgroup) -> bool {
        (0..self.n).all(|i| {
            let g = self.generator_index(i);
            h.gens.iter().all(|&x| h.contains(self.conj(x, g)))
        })
    }

    /// Frattini subgroup: closure of the derived subgroup and the
    /// generator p-th powers.
    pub fn frattini(&self) -> Subgroup {
        self.fratt.clone()
    }

    /// Agemo: subgroup generated by all p^k-th powers.
    pub fn agemo(&self, k: u32) -> Subgroup {
        let e = (self.p as i64).pow(k);
        let mut gens: Vec<u32> = (0..self.order as u32).map(|x| self.pow(x, e)).collect();
        gens.sort_unstable();
        gens.dedup();
        self.subgroup_closure(&gens)
    }

    fn build_frattini_quotient(&self) -> (Subgroup, u32, Vec<u32>) {
        let derived = self.derived_subgroup();
        let mut gens = derived.gens.clone();
        for i in 0..self.n {
            gens.push(self.pow(self.generator_index(i), self.p as i64));
        }
        let fratt = self.subgroup_closure(&gens);
        debug_assert!(self.is_normal(&fratt));

        // Label cosets of Phi(G) with vectors in F_p^r.
        let (coset_of, reps) = self.coset_labeling(&fratt);
        let mut label_of_coset: Vec<Option<u32>> = vec![None; reps.len()];
        label_of_coset[coset_of[0] as usize] = Some(0);
        let mut rank = 0u32;
        let mut span: Vec<u32> = vec![coset_of[0]];
        for c in 0..reps.len() as u32 {
            if label_of_coset[c as usize].is_some() {
                continue;
            }
            // new independent coset: extend labels over span * <c>
            let place = pow_u32(self.p, rank);
            rank += 1;
            let old_span = span.clone();
            for &s in &old_span {
                let mut cur = s;
                for e in 1..self.p {
                    cur = coset_of[self.mult(reps[cur as usize], reps[c as usize]) as usize];
                    let label = label_of_coset[s as usize].unwrap() + e * place;
                    debug_assert!(
                        label_of_coset[cur as usize].is_none()
                            || label_of_coset[cur as usize] == Some(label)
                    );
                    label_of_coset[cur as usize] = Some(label);
                    span.push(cur);
                }
            }
        }
        let labels: Vec<u32> = (0..self.order as usize)
            .map(|x| label_of_coset[coset_of[x] as usize].expect("all cosets labeled"))
            .collect();
        (fratt, rank, labels)
    }

    /// Coset labeling for a normal subgroup: (coset id per element, least
    /// representative per coset id). Ids increase with the least element.
    pub fn coset_labeling(&self, nsub: &Subgroup) -> (Vec<u32>, Vec<u32>) {
        let mut coset_of = vec![u32::MAX; self.order as usize];
        let mut reps = Vec::new();
        for x in 0..self.order as u32 {
            if coset_of[x as usize] != u32::MAX {
                continue;
            }
            let id = reps.len() as u32;
            reps.push(x);
            for &nelem in &nsub.elems {
                coset_of[self.mult(x, nelem) as usize] = id;
            }
        }
        (coset_of, reps)
    }

    /// Minimal number of generators d(G) = rank of G/Phi(G), reported as
    /// (d == 2, d).
    pub fn is_two_generated(&self) -> (bool, u32) {
        (self.rank == 2, self.rank)
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    /// Label of x in G/Phi(G) as packed base-p digits.
    pub fn frattini_label(&self, x: u32) -> u32 {
        self.fq_label[x as usize]
    }

    /// Direction (line in G/Phi(G) ~ C_p x C_p) of an element outside
    /// Phi(G). Directions are numbered 0..=p in lexicographic order of
    /// their normalized spanning vector: (0,1), (1,0), (1,1), ..., (1,p-1).
    pub fn direction_of(&self, x: u32) -> Option<u32> {
        if self.rank != 2 {
            return None;
        }
        let label = self.fq_label[x as usize];
        let a = label % self.p;
        let b = label / self.p;
        direction_of_vector(a, b, self.p)
    }

    /// All index-p subgroups, as preimages of the hyperplanes of G/Phi(G).
    /// For rank 2 there are exactly p + 1 and maximal_subgroups()[d] is the
    /// preimage of direction d.
    pub fn maximal_subgroups(&self) -> Vec<Subgroup> {
        let r = self.rank;
        let p = self.p;
        let mut out = Vec::new();
        for phi in functionals_up_to_scalar(p, r) {
            let mut elems = Vec::new();
            let mut bits = Bits::new(self.order as usize);
            for x in 0..self.order as u32 {
                let mut label = self.fq_label[x as usize];
                let mut dot = 0u32;
                for &coeff in &phi {
                    dot = (dot + coeff * (label % p)) % p;
                    label /= p;
                }
                if dot == 0 {
                    elems.push(x);
                    bits.set(x);
                }
            }
            let gens = pick_generators(self, &elems);
            out.push(Subgroup { elems, bits, gens });
        }
        if r == 2 {
            out.sort_by_key(|m| {
                m.elems
                    .iter()
                    .find_map(|&x| self.direction_of(x))
                    .expect("maximal subgroup contains a non-Frattini element")
            });
        }
        out
    }

    /// Quotient by a normal subgroup: derives a pc presentation for G/N
    /// from the images of the pc generators, enumerates it, and returns
    /// the canonical projection.
    pub fn quotient(&self, nsub: &Subgroup) -> Result<Quotient, GroupError> {
        if !self.is_normal(nsub) {
            return Err(GroupError::NotNormal);
        }
        let (coset_of, reps) = self.coset_labeling(nsub);
        let ncosets = reps.len();
        let cmult =
            |a: u32, b: u32| coset_of[self.mult(reps[a as usize], reps[b as usize]) as usize];

        // Keep the pc generator images that strictly extend the span of the
        // later ones, scanning from the last generator down; record the
        // span set after each kept generator.
        let mut in_span = vec![false; ncosets];
        in_span[0] = true;
        let mut kept_rev: Vec<usize> = Vec::new();
        let mut chains_rev: Vec<Vec<bool>> = Vec::new();
        for i in (0..self.n).rev() {
            let q = coset_of[self.generator_index(i) as usize];
            if in_span[q as usize] {
                continue;
            }
            let members: Vec<u32> = (0..ncosets as u32).filter(|&c| in_span[c as usize]).collect();
            for &s in &members {
                let mut cur = s;
                for _ in 1..self.p {
                    cur = cmult(cur, q);
                    in_span[cur as usize] = true;
                }
            }
            kept_rev.push(i);
            chains_rev.push(in_span.clone());
        }
        let kept: Vec<usize> = kept_rev.iter().rev().copied().collect();
        let chains: Vec<Vec<bool>> = chains_rev.into_iter().rev().collect();
        let m = kept.len();
        assert_eq!(
            (self.p as u64).pow(m as u32) * nsub.order(),
            self.order,
            "quotient span must reach all cosets"
        );

        let chain_after = |k: usize| -> Option<&Vec<bool>> { chains.get(k + 1) };
        let member = |k: usize, c: u32| -> bool {
            match chain_after(k) {
                Some(chain) => chain[c as usize],
                None => c == 0,
            }
        };
        let digits_from = |mut c: u32, start: usize| -> Result<Vec<u8>, GroupError> {
            let mut digits = vec![0u8; m];
            for t in start..m {
                let q = coset_of[self.generator_index(kept[t]) as usize];
                let q_inv = coset_of[self.inv(reps[q as usize]) as usize];
                let mut e = 0u8;
                let mut cur = c;
                while !member(t, cur) {
                    cur = cmult(q_inv, cur);
                    e += 1;
                    if e as u32 >= self.p {
                        return Err(GroupError::Precondition(
                            "quotient digit extraction failed".into(),
                        ));
                    }
                }
                digits[t] = e;
                c = cur;
            }
            if c != 0 {
                return Err(GroupError::Precondition(
                    "quotient relation does not sink past its defining generator".into(),
                ));
            }
            Ok(digits)
        };
        let word_from = |digits: &[u8], above: usize| -> crate::pc::Word {
            crate::pc::Word {
                letters: digits
                    .iter()
                    .enumerate()
                    .filter(|&(t, &e)| t > above && e != 0)
                    .map(|(t, &e)| (t, e))
                    .collect(),
            }
        };

        let mut pow_rels = Vec::new();
        let mut comm_rels = Vec::new();
        for (k, &i) in kept.iter().enumerate() {
            let gi = self.generator_index(i);
            let c = coset_of[self.pow(gi, self.p as i64) as usize];
            let digits = digits_from(c, (k + 1).min(m))?;
            let w = word_from(&digits, k);
            if !w.is_trivial() {
                pow_rels.push((k, w));
            }
            for (k2, &j) in kept.iter().enumerate().take(k) {
                let gj = self.generator_index(j);
                let c = coset_of[self.comm(gi, gj) as usize];
                let digits = digits_from(c, (k + 1).min(m))?;
                let w = word_from(&digits, k);
                if !w.is_trivial() {
                    comm_rels.push(((k, k2), w));
                }
            }
        }
        let qpres = PcPresentation::new(self.p, m, pow_rels, comm_rels)?;
        let qgroup = enumerate(&qpres)?;
        assert_eq!(qgroup.order() * nsub.order(), self.order);

        let mut proj_of_coset = vec![0u32; ncosets];
        for c in 0..ncosets as u32 {
            let digits = digits_from(c, 0)?;
            proj_of_coset[c as usize] = qgroup.index_of(&GroupElement { exps: digits })?;
        }
        let projection: Vec<u32> =
            (0..self.order as usize).map(|x| proj_of_coset[coset_of[x] as usize]).collect();
        Ok(Quotient { group: qgroup, projection })
    }

    /// Derive a pc presentation of this group on an explicit polycyclic
    /// chain: chain[k] must generate, together with chain[k+1..], a
    /// subgroup of index p in the one before.
    pub fn presentation_on_chain(&self, chain: &[u32]) -> Result<PcPresentation, GroupError> {
        let m = chain.len();
        if (self.p as u64).pow(m as u32) != self.order {
            return Err(GroupError::Precondition(format!(
                "chain of length {m} cannot present a group of order {}",
                self.order
            )));
        }
        let mut suffixes: Vec<Subgroup> = Vec::with_capacity(m + 1);
        suffixes.push(self.trivial_subgroup());
        for k in (0..m).rev() {
            let gens: Vec<u32> = chain[k..].to_vec();
            let sub = self.subgroup_closure(&gens);
            if sub.order() != (self.p as u64).pow((m - k) as u32) {
                return Err(GroupError::Precondition(format!(
                    "chain suffix at {k} spans order {} instead of p^{}",
                    sub.order(),
                    m - k
                )));
            }
            suffixes.push(sub);
        }
        suffixes.reverse(); // suffixes[k] = <chain[k..]>, suffixes[m] = 1

        let digits_from = |mut x: u32, start: usize| -> Result<Vec<u8>, GroupError> {
            let mut digits = vec![0u8; m];
            for t in start..m {
                let inv = self.inv(chain[t]);
                let mut e = 0u8;
                while !suffixes[t + 1].contains(x) {
                    x = self.mult(inv, x);
                    e += 1;
                    if e as u32 >= self.p {
                        return Err(GroupError::Precondition(
                            "chain digit extraction failed".into(),
                        ));
                    }
                }
                digits[t] = e;
            }
            if x != 0 {
                return Err(GroupError::Precondition(
                    "chain relation does not sink past its defining generator".into(),
                ));
            }
            Ok(digits)
        };
        let word_from = |digits: &[u8], above: usize| -> Result<crate::pc::Word, GroupError> {
            if digits.iter().take(above + 1).any(|&e| e != 0) {
                return Err(GroupError::Precondition(
                    "relation word escapes the weighted window".into(),
                ));
            }
            Ok(crate::pc::Word {
                letters: digits
                    .iter()
                    .enumerate()
                    .filter(|&(_, &e)| e != 0)
                    .map(|(t, &e)| (t, e))
                    .collect(),
            })
        };

        let mut pow_rels = Vec::new();
        let mut comm_rels = Vec::new();
        for k in 0..m {
            let c = self.pow(chain[k], self.p as i64);
            let w = word_from(&digits_from(c, k + 1)?, k)?;
            if !w.is_trivial() {
                pow_rels.push((k, w));
            }
            for j in 0..k {
                let c = self.comm(chain[k], chain[j]);
                let w = word_from(&digits_from(c, (k + 1).min(m))?, k)?;
                if !w.is_trivial() {
                    comm_rels.push(((k, j), w));
                }
            }
        }
        Ok(PcPresentation::new(self.p, m, pow_rels, comm_rels)?)
    }

    /// Conjugacy classes of all order-p subgroups via orbit closure under
    /// conjugation by the pc generators.
    pub fn minimal_subgroup_classes(&self) -> ConjugacyPartition {
        let mut subgroup_mins: Vec<u32> = Vec::new();
        for x in 1..self.order as u32 {
            if self.ord_exp[x as usize] != 1 {
                continue;
            }
            let m = self.cyclic_min(x);
            if m == x {
                subgroup_mins.push(x);
            }
        }
        subgroup_mins.sort_unstable();
        let idx_of = |m: u32| subgroup_mins.binary_search(&m).expect("known subgroup");

        let mut class_of = vec![u32::MAX; subgroup_mins.len()];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for start in 0..subgroup_mins.len() {
            if class_of[start] != u32::MAX {
                continue;
            }
            let cid = classes.len() as u32;
            let mut orbit = vec![start];
            class_of[start] = cid;
            let mut stack = vec![start];
            while let Some(s) = stack.pop() {
                let rep = subgroup_mins[s];
                for i in 0..self.n {
                    let g = self.generator_index(i);
                    let image = self.cyclic_min(self.conj(rep, g));
                    let t = idx_of(image);
                    if class_of[t] == u32::MAX {
                        class_of[t] = cid;
                        orbit.push(t);
                        stack.push(t);
                    }
                }
            }
            classes.push(orbit);
        }
        // renumber classes by least representative
        let least: Vec<u32> = classes
            .iter()
            .map(|orbit| orbit.iter().map(|&s| subgroup_mins[s]).min().unwrap())
            .collect();
        let mut order: Vec<u32> = (0..classes.len() as u32).collect();
        order.sort_by_key(|&c| least[c as usize]);
        let mut renumber = vec![0u32; classes.len()];
        for (new_id, &old_id) in order.iter().enumerate() {
            renumber[old_id as usize] = new_id as u32;
        }
        let class_of: Vec<u32> = class_of.into_iter().map(|c| renumber[c as usize]).collect();
        let mut class_reps = vec![0u32; classes.len()];
        for (old_id, &l) in least.iter().enumerate() {
            class_reps[renumber[old_id] as usize] = l;
        }
        ConjugacyPartition { subgroup_mins, class_of, class_reps }
    }

    /// Least element of <x> \ {1} for x of order p (canonical subgroup id).
    pub fn cyclic_min(&self, x: u32) -> u32 {
        debug_assert_eq!(self.ord_exp[x as usize], 1);
        let mut m = x;
        let mut y = x;
        for _ in 2..self.p {
            y = self.mult(y, x);
            m = m.min(y);
        }
        m
    }

    /// Conjugacy classes of all elements; reps are least-index members.
    pub fn element_classes(&self) -> ElementClasses {
        let mut class_of = vec![u32::MAX; self.order as usize];
        let mut reps = Vec::new();
        for x in 0..self.order as u32 {
            if class_of[x as usize] != u32::MAX {
                continue;
            }
            let cid = reps.len() as u32;
            reps.push(x);
            class_of[x as usize] = cid;
            let mut stack = vec![x];
            while let Some(y) = stack.pop() {
                for i in 0..self.n {
                    let g = self.generator_index(i);
                    let z = self.conj(y, g);
                    if class_of[z as usize] == u32::MAX {
                        class_of[z as usize] = cid;
                        stack.push(z);
                    }
                }
            }
        }
        ElementClasses { class_of, reps }
    }

    /// Orbit of x under conjugation by the whole group, sorted.
    pub fn conjugacy_class_of(&self, x: u32) -> Vec<u32> {
        let mut seen = Bits::new(self.order as usize);
        seen.set(x);
        let mut orbit = vec![x];
        let mut stack = vec![x];
        while let Some(y) = stack.pop() {
            for i in 0..self.n {
                let g = self.generator_index(i);
                let z = self.conj(y, g);
                if !seen.get(z) {
                    seen.set(z);
                    orbit.push(z);
                    stack.push(z);
                }
            }
        }
        orbit.sort_unstable();
        orbit
    }
}

fn is_power_of(mut x: u64, p: u64) -> bool {
    while x % p == 0 {
        x /= p;
    }
    x == 1
}

fn pow_u32(p: u32, k: u32) -> u32 {
    p.pow(k)
}

/// Direction index of a nonzero vector (a, b) in F_p^2: lines ordered
/// (0,1), (1,0), (1,1), ..., (1,p-1).
pub fn direction_of_vector(a: u32, b: u32, p: u32) -> Option<u32> {
    if a == 0 && b == 0 {
        return None;
    }
    if a == 0 {
        Some(0)
    } else {
        let ainv = mod_inverse(a, p);
        Some(1 + (b * ainv) % p)
    }
}

fn mod_inverse(a: u32, p: u32) -> u32 {
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

/// Nonzero functionals on F_p^r up to scalar: coefficient vectors
/// (low digit first) whose last nonzero coefficient is 1.
fn functionals_up_to_scalar(p: u32, r: u32) -> Vec<Vec<u32>> {
    let total = p.pow(r);
    let mut out = Vec::new();
    for code in 1..total {
        let mut digits = Vec::with_capacity(r as usize);
        let mut c = code;
        for _ in 0..r {
            digits.push(c % p);
            c /= p;
        }
        if *digits.iter().rev().find(|&&d| d != 0).unwrap() == 1 {
            out.push(digits);
        }
    }
    out
}

/// A small generating set for a subgroup given as an ascending element
/// list: greedy closure growth.
fn pick_generators(g: &ConcreteGroup, elems: &[u32]) -> Vec<u32> {
    let mut gens: Vec<u32> = Vec::new();
    let mut have: u64 = 1;
    let want = elems.len() as u64;
    for &x in elems {
        if x == 0 {
            continue;
        }
        if have == want {
            break;
        }
        let trial: Vec<u32> = gens.iter().copied().chain([x]).collect();
        let closure = g.subgroup_closure(&trial);
        if closure.order() > have {
            have = closure.order();
            gens.push(x);
        }
    }
    gens
}

/// Invariant-factor type of an abelian p-group, as descending exponents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbelianShape {
    pub p: u32,
    pub exponents: Vec<u32>,
}

impl AbelianShape {
    pub fn of(g: &ConcreteGroup) -> Result<AbelianShape, GroupError> {
        let gens: Vec<u32> = (0..g.length()).map(|i| g.generator_index(i)).collect();
        for (ai, &a) in gens.iter().enumerate() {
            for &b in gens.iter().take(ai) {
                if g.comm(a, b) != 0 {
                    return Err(GroupError::Precondition("group is not abelian".into()));
                }
            }
        }
        let p = g.prime();
        let max_exp = g.exponent_exp();
        // counts[k] = #{x : x^{p^k} = 1}
        let mut counts = vec![0u64; (max_exp + 1) as usize];
        for x in g.elements() {
            let e = g.order_exp_of(x) as usize;
            for slot in counts.iter_mut().skip(e) {
                *slot += 1;
            }
        }
        let logp = |c: u64| -> u32 {
            let mut k = 0;
            let mut v = 1u64;
            while v < c {
                v *= p as u64;
                k += 1;
            }
            assert_eq!(v, c, "omega subgroup size must be a power of p");
            k
        };
        // #(a_i >= k) = log_p counts[k] - log_p counts[k-1]
        let mut exponents: Vec<u32> = Vec::new();
        for k in 1..=max_exp {
            let rk = (logp(counts[k as usize]) - logp(counts[(k - 1) as usize])) as usize;
            while exponents.len() < rk {
                exponents.push(0);
            }
            for e in exponents.iter_mut().take(rk) {
                *e = k;
            }
        }
        exponents.sort_unstable_by(|a, b| b.cmp(a));
        Ok(AbelianShape { p, exponents })
    }

    /// True when the shape is C_{p^e} x C_{p^e} with e >= 1.
    pub fn is_square_pair(&self) -> bool {
        self.exponents.len() == 2 && self.exponents[0] == self.exponents[1] && self.exponents[0] >= 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pc::parse_presentation;

    fn c25() -> ConcreteGroup {
        enumerate(&parse_presentation("p 5\nn 2\npow 1 : 2^1\n").unwrap()).unwrap()
    }

    fn c5xc5() -> ConcreteGroup {
        enumerate(&parse_presentation("p 5\nn 2\n").unwrap()).unwrap()
    }

    fn heis5() -> ConcreteGroup {
        enumerate(&parse_presentation("p 5\nn 3\ncomm 2 1 : 3^1\n").unwrap()).unwrap()
    }

    #[test]
    fn enumerate_counts() {
        assert_eq!(c25().order(), 25);
        assert_eq!(heis5().order(), 125);
    }

    #[test]
    fn enumerate_rejects_inconsistent() {
        let bad = parse_presentation("p 5\nn 3\npow 1 : 2^1\ncomm 2 1 : 3^1\n").unwrap();
        assert!(matches!(enumerate(&bad), Err(GroupError::Inconsistent(_))));
    }

    #[test]
    fn mult_matches_presentation() {
        let g = heis5();
        let pres = g.presentation().clone();
        for a in 0..125u32 {
            for b in [0u32, 1, 5, 26, 124] {
                let ea = g.element(a);
                let eb = g.element(b);
                let prod = pres.multiply(&ea, &eb).unwrap();
                assert_eq!(g.index_of(&prod).unwrap(), g.mult(a, b));
            }
        }
    }

    #[test]
    fn inverse_and_order_tables() {
        let g = c25();
        for x in g.elements() {
            assert_eq!(g.mult(x, g.inv(x)), 0);
            let k = g.order_of(x);
            assert_eq!(g.pow(x, k as i64), 0);
            if x != 0 {
                assert_ne!(g.pow(x, (k / 5) as i64), 0);
            }
        }
    }

    #[test]
    fn closure_laws() {
        let g = heis5();
        let sub = g.subgroup_closure(&[g.generator_index(2)]);
        assert_eq!(sub.order(), 5);
        for &a in &sub.elems {
            assert!(sub.contains(g.inv(a)));
            for &b in &sub.elems {
                assert!(sub.contains(g.mult(a, b)));
            }
        }
        let trivial = g.subgroup_closure(&[0]);
        assert_eq!(trivial.order(), 1);
        let whole = g.subgroup_closure(&[g.generator_index(0), g.generator_index(1)]);
        assert_eq!(whole.order(), 125);
    }

    #[test]
    fn whole_group_from_generator_in_c25() {
        let g = c25();
        let whole = g.subgroup_closure(&[g.generator_index(0)]);
        assert_eq!(whole.order(), 25);
    }

    #[test]
    fn lower_central_series_shapes() {
        let g = c5xc5();
        let lcs = g.lower_central_series();
        assert_eq!(lcs.terms.len(), 2);
        assert_eq!(lcs.class(), 1);

        let h = heis5();
        let lcs = h.lower_central_series();
        let orders: Vec<u64> = lcs.terms.iter().map(|t| t.order()).collect();
        assert_eq!(orders, vec![125, 5, 1]);
        assert_eq!(lcs.class(), 2);
    }

    #[test]
    fn center_and_frattini() {
        assert_eq!(c5xc5().center().order(), 25);
        let h = heis5();
        assert_eq!(h.center().order(), 5);
        assert_eq!(h.frattini().order(), 5);
        let g = enumerate(&parse_presentation("p 5\nn 4\npow 1 : 3^1\npow 2 : 4^1\n").unwrap())
            .unwrap();
        assert_eq!(g.order(), 625);
        assert_eq!(g.frattini().order(), 25);
    }

    #[test]
    fn frattini_equals_derived_and_all_pth_powers() {
        let mut groups = vec![c25(), c5xc5(), heis5()];
        for m in 2..=4 {
            let pres = crate::forge::construct_pquotient(5, m).unwrap().presentation;
            groups.push(enumerate(&pres).unwrap());
        }
        for g in groups {
            let fratt = g.frattini();
            let derived = g.derived_subgroup();
            let mut gens = derived.elems.clone();
            for x in g.elements() {
                gens.push(g.pow(x, 5));
            }
            let alt = g.subgroup_closure(&gens);
            assert_eq!(fratt.elems, alt.elems);
        }
    }

    #[test]
    fn agemo_sizes() {
        let g = enumerate(&parse_presentation("p 5\nn 4\npow 1 : 3^1\npow 2 : 4^1\n").unwrap())
            .unwrap();
        assert_eq!(g.agemo(0).order(), 625);
        assert_eq!(g.agemo(1).order(), 25);
        assert_eq!(g.agemo(2).order(), 1);
    }

    #[test]
    fn maximal_subgroup_counts() {
        assert_eq!(c5xc5().maximal_subgroups().len(), 6);
        let c5cubed = enumerate(&parse_presentation("p 5\nn 3\n").unwrap()).unwrap();
        assert_eq!(c5cubed.maximal_subgroups().len(), 31);
        assert_eq!(heis5().maximal_subgroups().len(), 6);
        for m in c5xc5().maximal_subgroups() {
            assert_eq!(m.order(), 5);
        }
    }

    #[test]
    fn rank_and_directions() {
        let g = c5xc5();
        assert_eq!(g.is_two_generated(), (true, 2));
        let c5cubed = enumerate(&parse_presentation("p 5\nn 3\n").unwrap()).unwrap();
        assert_eq!(c5cubed.is_two_generated(), (false, 3));
        assert_eq!(c25().is_two_generated(), (false, 1));
        let mut seen = std::collections::HashSet::new();
        for x in 1..25u32 {
            seen.insert(g.direction_of(x).unwrap());
        }
        assert_eq!(seen.len(), 6);
        // maximal_subgroups()[d] is the preimage of direction d
        for (d, m) in g.maximal_subgroups().iter().enumerate() {
            for &x in &m.elems {
                if x != 0 {
                    assert_eq!(g.direction_of(x), Some(d as u32));
                }
            }
        }
    }

    #[test]
    fn quotient_basics() {
        let g = heis5();
        let z = g.center();
        let q = g.quotient(&z).unwrap();
        assert_eq!(q.group.order(), 25);
        for i in 0..g.length() {
            let gi = g.generator_index(i);
            for x in g.elements() {
                assert_eq!(
                    q.projection[g.mult(gi, x) as usize],
                    q.group.mult(q.projection[gi as usize], q.projection[x as usize])
                );
            }
        }
        let c = c25();
        let five = c.subgroup_closure(&[c.generator_index(1)]);
        let q3 = c.quotient(&five).unwrap();
        assert_eq!(q3.group.order(), 5);
        assert_eq!(q3.group.exponent_exp(), 1);
        // quotient by the whole group is trivial
        let whole = g.full_subgroup();
        let q4 = g.quotient(&whole).unwrap();
        assert_eq!(q4.group.order(), 1);
        assert!(q4.projection.iter().all(|&y| y == 0));
    }

    #[test]
    fn quotient_rejects_non_normal() {
        let d8 = enumerate(&parse_presentation("p 2\nn 3\npow 2 : 3^1\ncomm 2 1 : 3^1\n").unwrap())
            .unwrap();
        assert_eq!(d8.order(), 8);
        let sub = d8.subgroup_closure(&[d8.generator_index(0)]);
        assert_eq!(sub.order(), 2);
        assert!(matches!(d8.quotient(&sub), Err(GroupError::NotNormal)));
    }

    #[test]
    fn minimal_subgroup_classes_shapes() {
        let part = c5xc5().minimal_subgroup_classes();
        assert_eq!(part.subgroup_mins.len(), 6);
        assert_eq!(part.class_count(), 6);

        let h = heis5();
        let part = h.minimal_subgroup_classes();
        assert_eq!(part.subgroup_mins.len(), 31);
        let z = h.center();
        let zmin = z.elems.iter().copied().filter(|&x| x != 0).min().unwrap();
        let zidx = part.subgroup_index(zmin).unwrap();
        let zclass = part.class_of[zidx];
        let members = part.class_of.iter().filter(|&&c| c == zclass).count();
        assert_eq!(members, 1);
    }

    #[test]
    fn abelian_shape_detection() {
        assert_eq!(AbelianShape::of(&c5xc5()).unwrap().exponents, vec![1, 1]);
        assert_eq!(AbelianShape::of(&c25()).unwrap().exponents, vec![2]);
        let c25xc5 = enumerate(&parse_presentation("p 5\nn 3\npow 1 : 2^1\n").unwrap()).unwrap();
        assert_eq!(AbelianShape::of(&c25xc5).unwrap().exponents, vec![2, 1]);
        assert!(AbelianShape::of(&heis5()).is_err());
        assert!(AbelianShape::of(&c5xc5()).unwrap().is_square_pair());
        assert!(!AbelianShape::of(&c25xc5).unwrap().is_square_pair());
    }
}
