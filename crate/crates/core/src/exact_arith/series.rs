use std::sync::Arc;

use num_traits::{One, Zero};

use super::{rat, ArithError, QuotElem, QuotRing, Rat, UniPoly};

/// Power series over `Q[y]/(P)` truncated modulo `x^N`.
///
/// Coefficients are stored as reduced residues; index `k` holds the
/// coefficient of `x^k`. The vector length always equals the precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncSeries {
    ring: Arc<QuotRing>,
    coeffs: Vec<UniPoly>,
}

impl TruncSeries {
    /// Builds a series from residues, reducing them and padding or truncating
    /// to `precision`.
    pub fn new(ring: &Arc<QuotRing>, coeffs: Vec<UniPoly>, precision: usize) -> Self {
        let mut coeffs: Vec<UniPoly> = coeffs.iter().map(|c| ring.reduce(c)).collect();
        coeffs.resize(precision, UniPoly::zero());
        TruncSeries {
            ring: Arc::clone(ring),
            coeffs,
        }
    }

    pub fn from_rats(ring: &Arc<QuotRing>, coeffs: &[Rat], precision: usize) -> Self {
        Self::new(
            ring,
            coeffs.iter().map(|c| UniPoly::constant(c.clone())).collect(),
            precision,
        )
    }

    pub fn constant(elem: &QuotElem, precision: usize) -> Self {
        Self::new(elem.ring(), vec![elem.residue().clone()], precision)
    }

    pub fn zero(ring: &Arc<QuotRing>, precision: usize) -> Self {
        Self::new(ring, Vec::new(), precision)
    }

    pub fn one(ring: &Arc<QuotRing>, precision: usize) -> Self {
        Self::new(ring, vec![UniPoly::one()], precision)
    }

    pub fn ring(&self) -> &Arc<QuotRing> {
        &self.ring
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn residues(&self) -> &[UniPoly] {
        &self.coeffs
    }

    /// Coefficient of `x^k`. Negative indices give zero; indices at or past
    /// the precision are unknown and give `None`.
    pub fn coeff(&self, k: i64) -> Option<QuotElem> {
        if k < 0 {
            return Some(QuotElem::from_rat(&self.ring, Rat::zero()));
        }
        self.coeffs
            .get(k as usize)
            .map(|r| QuotElem::new(&self.ring, r))
    }

    pub fn constant_term(&self) -> QuotElem {
        QuotElem::new(&self.ring, &self.coeffs[0])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(UniPoly::is_zero)
    }

    pub fn truncate(&self, precision: usize) -> Self {
        let mut out = self.clone();
        out.coeffs.resize(precision, UniPoly::zero());
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.precision().min(other.precision());
        TruncSeries {
            ring: Arc::clone(&self.ring),
            coeffs: (0..n).map(|k| &self.coeffs[k] + &other.coeffs[k]).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.precision().min(other.precision());
        TruncSeries {
            ring: Arc::clone(&self.ring),
            coeffs: (0..n).map(|k| &self.coeffs[k] - &other.coeffs[k]).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        TruncSeries {
            ring: Arc::clone(&self.ring),
            coeffs: self.coeffs.iter().map(|r| r.scale(c)).collect(),
        }
    }

    /// Product, truncated to the smaller of the two precisions.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.precision().min(other.precision());
        let mut out = vec![UniPoly::zero(); n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(n - i).enumerate() {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &self.ring.mul_residues(a, b);
                }
            }
        }
        TruncSeries {
            ring: Arc::clone(&self.ring),
            coeffs: out,
        }
    }

    /// Multiplies by `x^shift`, keeping the precision.
    pub fn shift(&self, shift: usize) -> Self {
        let n = self.precision();
        let mut coeffs = vec![UniPoly::zero(); shift.min(n)];
        coeffs.extend(self.coeffs.iter().take(n.saturating_sub(shift)).cloned());
        TruncSeries {
            ring: Arc::clone(&self.ring),
            coeffs,
        }
    }

    /// Formal derivative; known modulo `x^{N-1}`.
    pub fn derivative(&self) -> Self {
        TruncSeries {
            ring: Arc::clone(&self.ring),
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.scale(&rat(k as i64)))
                .collect(),
        }
    }

    /// Primitive with zero constant term; precision grows by one.
    pub fn integrate(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.precision() + 1);
        coeffs.push(UniPoly::zero());
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.scale(&Rat::new(1.into(), ((k + 1) as i64).into())));
        }
        TruncSeries {
            ring: Arc::clone(&self.ring),
            coeffs,
        }
    }

    /// Multiplicative inverse modulo `x^N`.
    pub fn inverse(&self) -> Result<Self, ArithError> {
        let n = self.precision();
        if n == 0 {
            return Ok(self.clone());
        }
        if self.coeffs[0].is_zero() {
            return Err(ArithError::ZeroConstantTerm);
        }
        let u0 = self
            .ring
            .inv_residue(&self.coeffs[0])
            .map_err(|_| ArithError::ZeroConstantTerm)?;
        let neg_u0 = -&u0;
        let mut out: Vec<UniPoly> = Vec::with_capacity(n);
        out.push(u0);
        for k in 1..n {
            let mut acc = UniPoly::zero();
            for j in 1..=k {
                let s = &self.coeffs[j];
                if !s.is_zero() && !out[k - j].is_zero() {
                    acc = &acc + &self.ring.mul_residues(s, &out[k - j]);
                }
            }
            out.push(self.ring.mul_residues(&neg_u0, &acc));
        }
        Ok(TruncSeries {
            ring: Arc::clone(&self.ring),
            coeffs: out,
        })
    }

    /// The primitive of `s'/s` vanishing at zero, at the same precision.
    pub fn log_primitive(&self) -> Result<Self, ArithError> {
        let n = self.precision();
        if n == 0 || self.coeffs[0].is_zero() {
            return Err(ArithError::ZeroConstantTerm);
        }
        let inv = self.truncate(n - 1).inverse()?;
        Ok(self.derivative().mul(&inv).integrate())
    }

    /// `s^k` modulo `x^N` by binary powering; negative `k` goes through the inverse.
    pub fn int_power(&self, k: i64) -> Result<Self, ArithError> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = TruncSeries::one(&self.ring, self.precision());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(k, c)| if k == 0 { c.is_one_poly() } else { c.is_zero() })
    }
}

impl UniPoly {
    fn is_one_poly(&self) -> bool {
        self.degree() == Some(0) && self.coeffs()[0].is_one()
    }
}
