//! Quadratic Hensel lifting of a modular factorization over `Z/p^k`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::modp::FpPoly;

/// Integer polynomial, lowest degree first, reduced into `[0, m)` by callers.
pub(crate) type ZPoly = Vec<BigInt>;

pub(crate) fn trim(mut p: ZPoly) -> ZPoly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

pub(crate) fn reduce(p: &[BigInt], m: &BigInt) -> ZPoly {
    trim(p.iter().map(|c| c.mod_floor(m)).collect())
}

/// Symmetric representatives in `(-m/2, m/2]`.
pub(crate) fn symmetric(p: &[BigInt], m: &BigInt) -> ZPoly {
    let half = m / 2u32;
    trim(
        p.iter()
            .map(|c| {
                let r = c.mod_floor(m);
                if r > half {
                    r - m
                } else {
                    r
                }
            })
            .collect(),
    )
}

pub(crate) fn zmul(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn zadd(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|k| {
                a.get(k).cloned().unwrap_or_default() + b.get(k).cloned().unwrap_or_default()
            })
            .collect(),
    )
}

fn zsub(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let nb: ZPoly = b.iter().map(|c| -c).collect();
    zadd(a, &nb)
}

/// Division by a monic polynomial modulo `m`.
fn zdivrem_monic(a: &[BigInt], d: &[BigInt], m: &BigInt) -> (ZPoly, ZPoly) {
    let dd = d.len() - 1;
    debug_assert!(d[dd].is_one());
    let mut rem = reduce(a, m);
    if rem.len() <= dd {
        return (Vec::new(), rem);
    }
    let nd = rem.len() - 1;
    let mut quot = vec![BigInt::zero(); nd - dd + 1];
    for k in (0..=nd - dd).rev() {
        let c = rem[k + dd].mod_floor(m);
        if c.is_zero() {
            continue;
        }
        for (j, dc) in d.iter().enumerate() {
            rem[k + j] = (&rem[k + j] - &c * dc).mod_floor(m);
        }
        quot[k] = c;
    }
    rem.truncate(dd);
    (trim(quot), reduce(&rem, m))
}

fn lift_fp(p: &FpPoly) -> ZPoly {
    p.coeffs().iter().map(|&c| BigInt::from(c)).collect()
}

/// One quadratic Hensel step: from `f = g*h`, `s*g + t*h = 1` modulo `m` to
/// the same relations modulo `m^2`. `h` is monic.
fn hensel_step(
    f: &[BigInt],
    g: &[BigInt],
    h: &[BigInt],
    s: &[BigInt],
    t: &[BigInt],
    m: &BigInt,
) -> (ZPoly, ZPoly, ZPoly, ZPoly) {
    let m2 = m * m;
    let e = reduce(&zsub(f, &zmul(g, h)), &m2);
    let (q, r) = zdivrem_monic(&zmul(s, &e), h, &m2);
    let g1 = reduce(&zadd(&zadd(g, &zmul(t, &e)), &zmul(&q, g)), &m2);
    let h1 = reduce(&zadd(h, &r), &m2);
    let b = reduce(
        &zsub(&zadd(&zmul(s, &g1), &zmul(t, &h1)), &[BigInt::one()]),
        &m2,
    );
    let (c, d) = zdivrem_monic(&zmul(s, &b), &h1, &m2);
    let s1 = reduce(&zsub(s, &d), &m2);
    let t1 = reduce(&zsub(&zsub(t, &zmul(t, &b)), &zmul(&c, &g1)), &m2);
    (g1, h1, s1, t1)
}

/// Lifts the monic modular factors of `f` (whose leading coefficient is a
/// unit mod `p`) to monic factors modulo `modulus = p^(2^j)`.
pub(crate) fn multifactor_lift(f: &[BigInt], factors: &[FpPoly], p: u64, steps: u32) -> Vec<ZPoly> {
    let pb = BigInt::from(p);
    let modulus = num_traits::pow(pb.clone(), 1usize << steps);
    lift_node(f, factors, &pb, steps, &modulus)
}

fn lift_node(f: &[BigInt], factors: &[FpPoly], p: &BigInt, steps: u32, modulus: &BigInt) -> Vec<ZPoly> {
    let lc = f.last().unwrap().mod_floor(modulus);
    if factors.len() == 1 {
        let inv = lc.modinv(modulus).expect("leading coefficient is a unit");
        return vec![reduce(&f.iter().map(|c| c * &inv).collect::<Vec<_>>(), modulus)];
    }
    let q = p.to_u64_digits().1[0];
    let half = factors.len() / 2;
    let (left, right) = factors.split_at(half);
    let lc_p = FpPoly::new(q, vec![(lc.clone() % p).to_u64_digits().1.first().copied().unwrap_or(0)]);
    let g0 = left.iter().fold(lc_p, |acc, x| acc.mul(x));
    let h0 = right.iter().fold(FpPoly::one(q), |acc, x| acc.mul(x));
    let (one, s0, t0) = g0.ext_gcd(&h0);
    debug_assert!(one.is_one());
    let (mut g, mut h, mut s, mut t) = (lift_fp(&g0), lift_fp(&h0), lift_fp(&s0), lift_fp(&t0));
    let mut m = p.clone();
    for _ in 0..steps {
        (g, h, s, t) = hensel_step(f, &g, &h, &s, &t, &m);
        m = &m * &m;
    }
    debug_assert_eq!(&m, modulus);
    let mut out = lift_node(&g, left, p, steps, modulus);
    out.extend(lift_node(&h, right, p, steps, modulus));
    out
}
