//! Factorization of univariate polynomials over Q.
//!
//! Squarefree parts are factored modulo a small prime, Hensel lifted past
//! twice the Landau-Mignotte bound and recombined by exhaustive subset
//! search (Zassenhaus), smallest subsets first.

mod hensel;
mod modp;

pub use modp::{factor_mod_prime, FpPoly, ModPError, SPLIT_SEED};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exact_arith::{Rat, UniPoly};
use hensel::{multifactor_lift, symmetric, trim, zmul, ZPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UniFactorError {
    #[error("cannot factor a constant polynomial")]
    ConstantInput,
    #[error("zero polynomial")]
    ZeroPolynomial,
}

/// `content * prod(factor^multiplicity)` with monic irreducible factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniFactorization {
    pub content: Rat,
    pub factors: Vec<(UniPoly, u32)>,
}

impl UniFactorization {
    pub fn expand(&self) -> UniPoly {
        self.factors
            .iter()
            .fold(UniPoly::constant(self.content.clone()), |acc, (p, e)| &acc * &p.pow(*e))
    }
}

pub fn is_squarefree(p: &UniPoly) -> Result<bool, UniFactorError> {
    if p.is_zero() {
        return Err(UniFactorError::ZeroPolynomial);
    }
    Ok(p.gcd(&p.derivative()).degree() == Some(0))
}

/// Yun's squarefree decomposition of a monic polynomial: `p = prod a_i^i`.
fn squarefree_decomposition(p: &UniPoly) -> Vec<(UniPoly, u32)> {
    let dp = p.derivative();
    let a0 = p.gcd(&dp);
    let mut b = p.div_rem(&a0).0;
    let mut c = dp.div_rem(&a0).0;
    let mut d = &c - &b.derivative();
    let mut out = Vec::new();
    let mut i = 1;
    while b.degree().is_some_and(|k| k > 0) {
        let a = b.gcd(&d);
        b = b.div_rem(&a).0;
        c = d.div_rem(&a).0;
        d = &c - &b.derivative();
        if a.degree().is_some_and(|k| k > 0) {
            out.push((a, i));
        }
        i += 1;
    }
    out
}

/// Primitive integer polynomial with positive leading coefficient proportional to `p`.
fn primitive_integer(p: &UniPoly) -> ZPoly {
    let lcm = p
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|c| (c * Rat::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let sign = if ints.last().unwrap().is_negative() { -1 } else { 1 };
    ints.into_iter().map(|c| c / &g * sign).collect()
}

fn to_unipoly(p: &[BigInt]) -> UniPoly {
    UniPoly::new(p.iter().map(|c| Rat::from_integer(c.clone())).collect())
}

fn to_fp(p: &[BigInt], q: u64) -> FpPoly {
    let qb = BigInt::from(q);
    FpPoly::new(
        q,
        p.iter()
            .map(|c| {
                let (_, d) = c.mod_floor(&qb).to_u64_digits();
                d.first().copied().unwrap_or(0)
            })
            .collect(),
    )
}

/// Exact division over Z; `None` when `d` does not divide `a`.
fn zdiv_exact(a: &[BigInt], d: &[BigInt]) -> Option<ZPoly> {
    let dd = d.len() - 1;
    let lc = &d[dd];
    let mut rem = a.to_vec();
    if rem.len() <= dd {
        return None;
    }
    let nd = rem.len() - 1;
    let mut quot = vec![BigInt::zero(); nd - dd + 1];
    for k in (0..=nd - dd).rev() {
        let (c, r) = rem[k + dd].div_rem(lc);
        if !r.is_zero() {
            return None;
        }
        if c.is_zero() {
            continue;
        }
        for (j, dc) in d.iter().enumerate() {
            rem[k + j] -= &c * dc;
        }
        quot[k] = c;
    }
    rem.iter().all(Zero::is_zero).then(|| trim(quot))
}

fn zprimitive(p: ZPoly) -> ZPoly {
    let g = p.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let sign: BigInt = if p.last().unwrap().sign() == Sign::Minus { (-1).into() } else { 1.into() };
    p.into_iter().map(|c| c / &g * &sign).collect()
}

/// Bound on coefficients of `lc(f) * g` for every factor `g` of `f`.
fn coefficient_bound(f: &[BigInt]) -> BigInt {
    let n = f.len() - 1;
    let norm2: BigInt = f.iter().map(|c| c * c).sum();
    let norm = norm2.sqrt() + 1u32;
    f.last().unwrap().abs() * (BigInt::one() << n) * norm
}

/// Irreducible factors of a squarefree primitive integer polynomial of
/// degree at least one, as primitive integer polynomials.
fn factor_squarefree_integer(f: &[BigInt]) -> Vec<ZPoly> {
    let n = f.len() - 1;
    if n == 1 {
        return vec![f.to_vec()];
    }
    let lc = f.last().unwrap().clone();
    let mut q = 3u64;
    let modular = loop {
        if !(&lc % q).is_zero() {
            let fp = to_fp(f, q);
            if fp.degree() == Some(n) && fp.is_squarefree() {
                break factor_mod_prime(&fp).expect("squarefree modulo the chosen prime");
            }
        }
        q = next_prime(q);
    };
    if modular.len() == 1 {
        return vec![f.to_vec()];
    }
    let bound = coefficient_bound(f) * 2u32;
    let mut steps = 0u32;
    let qb = BigInt::from(q);
    while num_traits::pow(qb.clone(), 1usize << steps) <= bound {
        steps += 1;
    }
    let modulus = num_traits::pow(qb, 1usize << steps);
    let lifted = multifactor_lift(f, &modular, q, steps);
    recombine(f.to_vec(), lifted, &modulus)
}

fn recombine(mut f: ZPoly, lifted: Vec<ZPoly>, modulus: &BigInt) -> Vec<ZPoly> {
    let mut remaining: Vec<ZPoly> = lifted;
    let mut found = Vec::new();
    let mut size = 1;
    'outer: while 2 * size <= remaining.len() {
        let lc = f.last().unwrap().clone();
        for subset in Subsets::new(remaining.len(), size) {
            let prod = subset
                .iter()
                .fold(vec![lc.clone()], |acc, &i| zmul(&acc, &remaining[i]));
            let cand = symmetric(&prod, modulus);
            if cand.len() < 2 {
                continue;
            }
            let cand = zprimitive(cand);
            if let Some(quot) = zdiv_exact(&f, &cand) {
                found.push(cand);
                f = zprimitive(quot);
                let mut keep = Vec::new();
                for (i, g) in remaining.into_iter().enumerate() {
                    if !subset.contains(&i) {
                        keep.push(g);
                    }
                }
                remaining = keep;
                continue 'outer;
            }
        }
        size += 1;
    }
    if f.len() > 1 {
        found.push(f);
    }
    found
}

fn next_prime(mut q: u64) -> u64 {
    loop {
        q += 2;
        if (3..).step_by(2).take_while(|d| d * d <= q).all(|d| !q.is_multiple_of(d)) {
            return q;
        }
    }
}

/// Lexicographic enumeration of `k`-subsets of `0..n`.
struct Subsets {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Subsets {
    fn new(n: usize, k: usize) -> Self {
        Subsets {
            n,
            idx: (0..k).collect(),
            done: k > n,
        }
    }
}

impl Iterator for Subsets {
    type Item = Vec<usize>;
    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Complete factorization over Q into a leading coefficient and monic
/// irreducible factors with multiplicities.
pub fn factor_univariate_rational(p: &UniPoly) -> Result<UniFactorization, UniFactorError> {
    if p.degree().is_none_or(|d| d == 0) {
        return Err(UniFactorError::ConstantInput);
    }
    let content = p.leading().unwrap().clone();
    let monic = p.monic();
    let mut factors = Vec::new();
    for (part, mult) in squarefree_decomposition(&monic) {
        for g in factor_squarefree_integer(&primitive_integer(&part)) {
            factors.push((to_unipoly(&g).monic(), mult));
        }
    }
    factors.sort_by(|a, b| {
        a.0.degree()
            .cmp(&b.0.degree())
            .then_with(|| a.0.coeffs().cmp(b.0.coeffs()))
    });
    Ok(UniFactorization { content, factors })
}
