//! Dense polynomials over a prime field `F_q` and their factorization by
//! distinct-degree then equal-degree (Cantor-Zassenhaus) splitting.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seed of the pseudo-random sequence used for equal-degree splitting.
pub const SPLIT_SEED: u64 = 0x5eed_f00d;

/// Polynomial over `F_q`, lowest degree first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpPoly {
    q: u64,
    coeffs: Vec<u64>,
}

fn mulmod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, q: u64) -> u64 {
    let mut acc = 1 % q;
    a %= q;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, q);
        }
        a = mulmod(a, a, q);
        e >>= 1;
    }
    acc
}

pub(crate) fn invmod(a: u64, q: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(q));
    powmod(a, q - 2, q)
}

impl FpPoly {
    pub fn new(q: u64, mut coeffs: Vec<u64>) -> Self {
        for c in coeffs.iter_mut() {
            *c %= q;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FpPoly { q, coeffs }
    }

    pub fn from_i64(q: u64, coeffs: &[i64]) -> Self {
        Self::new(
            q,
            coeffs
                .iter()
                .map(|&c| c.rem_euclid(q as i64) as u64)
                .collect(),
        )
    }

    pub fn zero(q: u64) -> Self {
        FpPoly { q, coeffs: vec![] }
    }

    pub fn one(q: u64) -> Self {
        FpPoly::new(q, vec![1])
    }

    pub fn x(q: u64) -> Self {
        FpPoly::new(q, vec![0, 1])
    }

    pub fn prime(&self) -> u64 {
        self.q
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn monic(&self) -> Self {
        match self.coeffs.last() {
            None => self.clone(),
            Some(&lc) => self.scale(invmod(lc, self.q)),
        }
    }

    pub fn scale(&self, c: u64) -> Self {
        FpPoly::new(self.q, self.coeffs.iter().map(|&a| mulmod(a, c, self.q)).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        FpPoly::new(
            self.q,
            (0..n)
                .map(|k| {
                    (self.coeffs.get(k).copied().unwrap_or(0) + o.coeffs.get(k).copied().unwrap_or(0))
                        % self.q
                })
                .collect(),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(self.q - 1))
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.q);
        }
        let mut out = vec![0u64; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + mulmod(a, b, self.q)) % self.q;
            }
        }
        FpPoly::new(self.q, out)
    }

    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let q = self.q;
        let Some(nd) = self.degree() else {
            return (Self::zero(q), Self::zero(q));
        };
        if nd < dd {
            return (Self::zero(q), self.clone());
        }
        let inv = invmod(d.coeffs[dd], q);
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let c = mulmod(rem[k + dd], inv, q);
            if c == 0 {
                continue;
            }
            quot[k] = c;
            for (j, &dc) in d.coeffs.iter().enumerate() {
                rem[k + j] = (rem[k + j] + q - mulmod(c, dc, q)) % q;
            }
        }
        rem.truncate(dd);
        (FpPoly::new(q, quot), FpPoly::new(q, rem))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s*self + t*o = g` monic.
    pub fn ext_gcd(&self, o: &Self) -> (Self, Self, Self) {
        let q = self.q;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Self::one(q), Self::zero(q));
        let (mut t0, mut t1) = (Self::zero(q), Self::one(q));
        while !r1.is_zero() {
            let (quo, r) = r0.div_rem(&r1);
            let s2 = s0.sub(&quo.mul(&s1));
            let t2 = t0.sub(&quo.mul(&t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        let inv = r0.coeffs.last().map_or(1, |&lc| invmod(lc, q));
        (r0.scale(inv), s0.scale(inv), t0.scale(inv))
    }

    pub fn derivative(&self) -> Self {
        FpPoly::new(
            self.q,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| mulmod(c, k as u64 % self.q, self.q))
                .collect(),
        )
    }

    /// `self^e mod m` for an arbitrary-size exponent.
    pub fn pow_mod(&self, e: &BigUint, m: &Self) -> Self {
        let mut acc = Self::one(self.q).rem(m);
        let base = self.rem(m);
        for i in (0..e.bits()).rev() {
            acc = acc.mul(&acc).rem(m);
            if e.bit(i) {
                acc = acc.mul(&base).rem(m);
            }
        }
        acc
    }

    pub fn is_squarefree(&self) -> bool {
        self.degree().is_some_and(|_| self.gcd(&self.derivative()).degree() == Some(0))
    }
}

/// Distinct-degree factorization of a monic squarefree polynomial:
/// pairs `(product of all irreducible factors of degree d, d)`.
fn distinct_degree(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let q = f.q;
    let qbig = BigUint::from(q);
    let mut out = Vec::new();
    let mut rest = f.clone();
    let mut h = FpPoly::x(q);
    let mut d = 0;
    while let Some(deg) = rest.degree() {
        if deg < 2 * (d + 1) {
            if deg > 0 {
                out.push((rest.clone(), deg));
            }
            break;
        }
        d += 1;
        h = h.pow_mod(&qbig, &rest);
        let g = h.sub(&FpPoly::x(q)).gcd(&rest);
        if !g.is_one() {
            rest = rest.div_rem(&g).0;
            h = h.rem(&rest);
            out.push((g, d));
        }
    }
    out
}

/// Splits a product of distinct monic irreducibles of degree `d` (odd `q`).
fn equal_degree(f: &FpPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
    let n = f.degree().unwrap();
    if n == d {
        return vec![f.clone()];
    }
    let q = f.q;
    let exp = (BigUint::from(q).pow(d as u32) - 1u32) / 2u32;
    loop {
        let a = FpPoly::new(q, (0..n).map(|_| rng.gen_range(0..q)).collect());
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let g = a.gcd(f);
        let split = if !g.is_one() {
            g
        } else {
            a.pow_mod(&exp, f).sub(&FpPoly::one(q)).gcd(f)
        };
        if split.degree().is_some_and(|k| k > 0 && k < n) {
            let other = f.div_rem(&split).0;
            let mut out = equal_degree(&split, d, rng);
            out.extend(equal_degree(&other, d, rng));
            return out;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModPError {
    #[error("polynomial is not squarefree modulo {0}")]
    NotSquarefreeModQ(u64),
    #[error("{0} is not an odd prime")]
    BadPrime(u64),
    #[error("polynomial vanishes modulo {0}")]
    ZeroModQ(u64),
}

fn is_odd_prime(q: u64) -> bool {
    q >= 3 && !q.is_multiple_of(2) && (3..).step_by(2).take_while(|d| d * d <= q).all(|d| !q.is_multiple_of(d))
}

/// Complete monic factorization over `F_q` of a squarefree polynomial,
/// sorted by degree and then coefficients.
pub fn factor_mod_prime(p: &FpPoly) -> Result<Vec<FpPoly>, ModPError> {
    let q = p.q;
    if !is_odd_prime(q) {
        return Err(ModPError::BadPrime(q));
    }
    if p.is_zero() {
        return Err(ModPError::ZeroModQ(q));
    }
    if p.degree() == Some(0) {
        return Ok(Vec::new());
    }
    if !p.is_squarefree() {
        return Err(ModPError::NotSquarefreeModQ(q));
    }
    let f = p.monic();
    let mut rng = ChaCha8Rng::seed_from_u64(SPLIT_SEED);
    let mut out = Vec::new();
    for (g, d) in distinct_degree(&f) {
        out.extend(equal_degree(&g, d, &mut rng));
    }
    out.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| a.coeffs.cmp(&b.coeffs)));
    Ok(out)
}
