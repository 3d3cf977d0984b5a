//! Sparse bivariate polynomials in `t1, t2` with rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exact_arith::Rat;
use crate::polytope_fan::LatticePoint;

/// Finite map from exponent vectors to nonzero rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct SparseBivariate {
    terms: BTreeMap<LatticePoint, Rat>,
}

impl SparseBivariate {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::monomial(c, LatticePoint::new(0, 0))
    }

    pub fn monomial(c: Rat, m: LatticePoint) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    /// Builds a polynomial, summing duplicate exponents and dropping zeros.
    pub fn from_terms<I: IntoIterator<Item = (LatticePoint, Rat)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Convenience constructor from `(coefficient, m1, m2)` triples.
    pub fn from_i64(terms: &[(i64, i64, i64)]) -> Self {
        Self::from_terms(
            terms
                .iter()
                .map(|&(c, a, b)| (LatticePoint::new(a, b), Rat::from_integer(c.into()))),
        )
    }

    pub fn add_term(&mut self, m: LatticePoint, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in lexicographic order of `(m1, m2)`.
    pub fn terms(&self) -> impl Iterator<Item = (&LatticePoint, &Rat)> {
        self.terms.iter()
    }

    pub fn support(&self) -> Vec<LatticePoint> {
        self.terms.keys().copied().collect()
    }

    pub fn coeff(&self, m: LatticePoint) -> Rat {
        self.terms.get(&m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(LatticePoint::new(0, 0))
    }

    pub fn min_exponents(&self) -> Option<(i64, i64)> {
        let m1 = self.terms.keys().map(|m| m.m1).min()?;
        let m2 = self.terms.keys().map(|m| m.m2).min()?;
        Some((m1, m2))
    }

    pub fn total_degree(&self) -> Option<i64> {
        self.terms.keys().map(|m| m.m1 + m.m2).max()
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        SparseBivariate {
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, -c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(*a + *b, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc.mul(self))
    }

    pub fn product<'a, I: IntoIterator<Item = &'a SparseBivariate>>(factors: I) -> Self {
        factors.into_iter().fold(Self::one(), |acc, q| acc.mul(q))
    }

    /// Coefficient of the lexicographically greatest exponent.
    pub fn lex_leading(&self) -> Option<(&LatticePoint, &Rat)> {
        self.terms.iter().next_back()
    }

    /// Splits `self = content * primitive` where `primitive` has coprime
    /// integer coefficients and a positive lexicographic leading coefficient.
    pub fn primitive_integer_form(&self) -> (Rat, SparseBivariate) {
        if self.is_zero() {
            return (Rat::zero(), Self::zero());
        }
        let lcm_den = self
            .terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let gcd_num = self
            .terms
            .values()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c.numer()));
        let mut content = Rat::new(gcd_num, lcm_den);
        if self.lex_leading().unwrap().1.is_negative() {
            content = -content;
        }
        let inv = content.recip();
        (content, self.scale(&inv))
    }

    /// Divides every exponent by the monomial `t^shift`; `None` if some
    /// exponent would become negative.
    pub fn shifted(&self, shift: LatticePoint) -> Option<Self> {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let n = *m - shift;
            if n.m1 < 0 || n.m2 < 0 {
                return None;
            }
            out.terms.insert(n, c.clone());
        }
        Some(out)
    }

    /// Terms in display order: by total degree, then by decreasing `m1`.
    pub fn display_order(&self) -> Vec<(LatticePoint, Rat)> {
        let mut v: Vec<_> = self.terms.iter().map(|(m, c)| (*m, c.clone())).collect();
        v.sort_by_key(|(m, _)| (m.m1 + m.m2, -m.m1));
        v
    }
}

fn fmt_monomial(m: LatticePoint) -> String {
    let mut parts = Vec::new();
    for (name, e) in [("t1", m.m1), ("t2", m.m2)] {
        match e {
            0 => {}
            1 => parts.push(name.to_string()),
            _ => parts.push(format!("{name}^{e}")),
        }
    }
    parts.join("*")
}

impl fmt::Display for SparseBivariate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.display_order().into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mono = fmt_monomial(m);
            if mono.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{abs}*{mono}")?;
            }
        }
        Ok(())
    }
}
