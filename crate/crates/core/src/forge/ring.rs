//! Exact arithmetic in Z[zeta_p] / p^m where p = (zeta - 1), plus the
//! semidirect-product group law that serves as an independent model for
//! the finite quotients of the pro-p group of maximal class.
//!
//! Elements are integer coordinate vectors over the basis
//! 1, pi, ..., pi^{p-2} (pi = zeta - 1). The cyclotomic relation rewrites
//! pi^{p-1} before lattice reduction; reduction modulo the ideal lattice
//! uses a Hermite normal form precomputed once per (p, m) by integer row
//! reduction. No floating point anywhere.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RingError {
    #[error("prime {0} not supported (need 3 <= p <= 7)")]
    BadPrime(u32),
    #[error("depth {0} out of supported range 1..={1}")]
    BadDepth(u32, u32),
}

pub const MAX_DEPTH: u32 = 8;

/// A residue in Z[zeta]/p^m, kept in canonical (lattice-reduced) form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingElt {
    pub coords: Vec<i64>,
}

/// An element of the split extension A . <sigma>: (a, sigma^i) with the
/// automorphism sigma acting as multiplication by zeta.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingPoint {
    pub a: RingElt,
    pub sigma: u32,
}

/// Upper-triangular integer lattice basis with positive diagonal.
#[derive(Debug, Clone)]
struct Lattice {
    rows: Vec<Vec<i128>>,
}

impl Lattice {
    /// Reduce v into the fundamental box: 0 <= v[i] < rows[i][i].
    fn reduce(&self, v: &mut [i128]) {
        for i in 0..v.len() {
            let d = self.rows[i][i];
            let q = v[i].div_euclid(d);
            if q != 0 {
                for (vj, rj) in v.iter_mut().zip(&self.rows[i]).skip(i) {
                    *vj -= q * rj;
                }
            }
        }
    }

    fn det(&self) -> i128 {
        self.rows.iter().enumerate().map(|(i, r)| r[i]).product()
    }
}

/// Shared context for one (p, m): the pi^{p-1} rewrite row and the HNF
/// lattices of p^k for k = 0..=m.
pub struct RingContext {
    pub p: u32,
    pub m: u32,
    dim: usize,
    /// coords of pi^{p-1} over the basis.
    pi_top: Vec<i128>,
    lattices: Vec<Lattice>,
}

impl RingContext {
    pub fn new(p: u32, m: u32) -> Result<RingContext, RingError> {
        if !(3..=7).contains(&p) || (p != 3 && p != 5 && p != 7) {
            return Err(RingError::BadPrime(p));
        }
        if m == 0 || m > MAX_DEPTH {
            return Err(RingError::BadDepth(m, MAX_DEPTH));
        }
        let dim = (p - 1) as usize;
        // pi^{p-1} = -(C(p,1) + C(p,2) pi + ... + C(p,p-1) pi^{p-2})
        let mut pi_top = vec![0i128; dim];
        for (j, c) in pi_top.iter_mut().enumerate() {
            *c = -(binomial(p as i128, j as i128 + 1));
        }
        let mut ctx = RingContext { p, m, dim, pi_top, lattices: Vec::new() };
        for k in 0..=m {
            let lat = ctx.ideal_lattice(k);
            let det = lat.det();
            assert_eq!(det, (p as i128).pow(k), "ideal index must be p^k");
            ctx.lattices.push(lat);
        }
        Ok(ctx)
    }

    fn ideal_lattice(&self, k: u32) -> Lattice {
        // generators: pi^{k+j} for j = 0..dim-1
        let mut rows = Vec::with_capacity(self.dim);
        let mut cur = self.pi_pow(k);
        rows.push(cur.clone());
        for _ in 1..self.dim {
            cur = self.mul_pi_raw(&cur);
            rows.push(cur.clone());
        }
        hermite_normal_form(rows, self.dim)
    }

    fn pi_pow(&self, t: u32) -> Vec<i128> {
        let mut v = vec![0i128; self.dim];
        v[0] = 1;
        for _ in 0..t {
            v = self.mul_pi_raw(&v);
        }
        v
    }

    /// Multiply by pi without lattice reduction (cyclotomic rewrite only).
    fn mul_pi_raw(&self, v: &[i128]) -> Vec<i128> {
        let mut out = vec![0i128; self.dim];
        for j in 0..self.dim - 1 {
            out[j + 1] = v[j];
        }
        let top = v[self.dim - 1];
        if top != 0 {
            for j in 0..self.dim {
                out[j] += top * self.pi_top[j];
            }
        }
        out
    }

    pub fn zero(&self) -> RingElt {
        RingElt { coords: vec![0; self.dim] }
    }

    pub fn one(&self) -> RingElt {
        let mut coords = vec![0i64; self.dim];
        coords[0] = 1;
        self.canon_i64(coords)
    }

    fn canon_i64(&self, coords: Vec<i64>) -> RingElt {
        let mut wide: Vec<i128> = coords.iter().map(|&c| c as i128).collect();
        self.lattices[self.m as usize].reduce(&mut wide);
        RingElt { coords: wide.iter().map(|&c| i64::try_from(c).expect("reduced coordinate fits i64")).collect() }
    }

    fn canon_wide(&self, mut wide: Vec<i128>) -> RingElt {
        self.lattices[self.m as usize].reduce(&mut wide);
        RingElt { coords: wide.iter().map(|&c| i64::try_from(c).expect("reduced coordinate fits i64")).collect() }
    }

    pub fn add(&self, a: &RingElt, b: &RingElt) -> RingElt {
        let wide: Vec<i128> =
            a.coords.iter().zip(&b.coords).map(|(&x, &y)| x as i128 + y as i128).collect();
        self.canon_wide(wide)
    }

    pub fn neg(&self, a: &RingElt) -> RingElt {
        let wide: Vec<i128> = a.coords.iter().map(|&x| -(x as i128)).collect();
        self.canon_wide(wide)
    }

    pub fn scalar_mul(&self, a: &RingElt, s: i64) -> RingElt {
        let wide: Vec<i128> = a.coords.iter().map(|&x| x as i128 * s as i128).collect();
        self.canon_wide(wide)
    }

    pub fn mul_pi(&self, a: &RingElt) -> RingElt {
        let wide: Vec<i128> = a.coords.iter().map(|&x| x as i128).collect();
        self.canon_wide(self.mul_pi_raw(&wide))
    }

    /// zeta^k * a = (1 + pi)^k * a.
    pub fn mul_zeta_pow(&self, a: &RingElt, k: u32) -> RingElt {
        let mut cur: Vec<i128> = a.coords.iter().map(|&x| x as i128).collect();
        for _ in 0..(k % self.p) {
            let shifted = self.mul_pi_raw(&cur);
            for (c, s) in cur.iter_mut().zip(&shifted) {
                *c += s;
            }
            self.lattices[self.m as usize].reduce(&mut cur);
        }
        self.canon_wide(cur)
    }

    /// Is a in p^k / p^m (k <= m)?
    pub fn in_ideal(&self, a: &RingElt, k: u32) -> bool {
        let mut wide: Vec<i128> = a.coords.iter().map(|&x| x as i128).collect();
        self.lattices[k as usize].reduce(&mut wide);
        wide.iter().all(|&c| c == 0)
    }

    /// All p^m canonical residues, in lexicographic coordinate order.
    pub fn enumerate(&self) -> Vec<RingElt> {
        let lat = &self.lattices[self.m as usize];
        let bounds: Vec<i64> =
            (0..self.dim).map(|i| i64::try_from(lat.rows[i][i]).unwrap()).collect();
        let mut out = Vec::new();
        let mut coords = vec![0i64; self.dim];
        loop {
            out.push(RingElt { coords: coords.clone() });
            let mut i = self.dim;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                coords[i] += 1;
                if coords[i] < bounds[i] {
                    break;
                }
                coords[i] = 0;
            }
        }
    }

    // ----- split extension group law -----

    pub fn point_identity(&self) -> RingPoint {
        RingPoint { a: self.zero(), sigma: 0 }
    }

    /// (a, sigma^i)(b, sigma^j) = (a + zeta^i b, sigma^{i+j}).
    pub fn point_mul(&self, x: &RingPoint, y: &RingPoint) -> RingPoint {
        let turned = self.mul_zeta_pow(&y.a, x.sigma);
        RingPoint { a: self.add(&x.a, &turned), sigma: (x.sigma + y.sigma) % self.p }
    }

    pub fn point_inv(&self, x: &RingPoint) -> RingPoint {
        let minus = self.neg(&x.a);
        let back = (self.p - x.sigma % self.p) % self.p;
        RingPoint { a: self.mul_zeta_pow(&minus, back), sigma: back }
    }

    pub fn point_pow(&self, x: &RingPoint, k: u32) -> RingPoint {
        let mut acc = self.point_identity();
        for _ in 0..k {
            acc = self.point_mul(&acc, x);
        }
        acc
    }
}

fn binomial(n: i128, k: i128) -> i128 {
    if k < 0 || k > n {
        return 0;
    }
    let mut r = 1i128;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Row-style Hermite normal form: returns an upper-triangular basis with
/// positive diagonal for the lattice spanned by the input rows.
fn hermite_normal_form(mut rows: Vec<Vec<i128>>, dim: usize) -> Lattice {
    let mut out: Vec<Vec<i128>> = Vec::with_capacity(dim);
    for col in 0..dim {
        // Euclidean elimination in this column over the remaining rows.
        loop {
            let mut nonzero: Vec<usize> =
                (0..rows.len()).filter(|&r| rows[r][col] != 0).collect();
            match nonzero.len() {
                0 => panic!("lattice not full rank at column {col}"),
                1 => {
                    let r = nonzero[0];
                    let mut row = rows.swap_remove(r);
                    if row[col] < 0 {
                        for c in row.iter_mut() {
                            *c = -*c;
                        }
                    }
                    out.push(row);
                    break;
                }
                _ => {
                    nonzero.sort_by_key(|&r| rows[r][col].abs());
                    let (small, big) = (nonzero[0], nonzero[1]);
                    let q = rows[big][col] / rows[small][col];
                    for c in 0..dim {
                        let s = rows[small][c];
                        rows[big][c] -= q * s;
                    }
                }
            }
        }
    }
    debug_assert!(out.iter().enumerate().all(|(i, r)| r[..i].iter().all(|&c| c == 0)));
    Lattice { rows: out }
}
