use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use super::{ArithError, Rat, UniPoly};

/// The residue ring `Q[y]/(P)` for a monic modulus `P` of degree at least one.
///
/// When `P` is irreducible this is a number field and every nonzero element
/// is invertible.
#[derive(Debug, PartialEq, Eq)]
pub struct QuotRing {
    modulus: UniPoly,
}

impl QuotRing {
    pub fn new(modulus: UniPoly) -> Result<Arc<Self>, ArithError> {
        if !modulus.is_monic() || modulus.degree() == Some(0) {
            return Err(ArithError::NotMonic);
        }
        Ok(Arc::new(QuotRing { modulus }))
    }

    pub fn modulus(&self) -> &UniPoly {
        &self.modulus
    }

    /// Degree of the modulus, i.e. the dimension over Q.
    pub fn degree(&self) -> usize {
        self.modulus.degree().unwrap()
    }

    pub fn reduce(&self, p: &UniPoly) -> UniPoly {
        if p.degree().is_none_or(|d| d < self.degree()) {
            return p.clone();
        }
        p.rem(&self.modulus)
    }

    pub(crate) fn mul_residues(&self, a: &UniPoly, b: &UniPoly) -> UniPoly {
        if self.degree() == 1 {
            // residues are constants
            return UniPoly::constant(a.coeff(0) * b.coeff(0));
        }
        self.reduce(&(a * b))
    }

    pub(crate) fn inv_residue(&self, a: &UniPoly) -> Result<UniPoly, ArithError> {
        if a.is_zero() {
            return Err(ArithError::NotInvertible(self.modulus.to_string()));
        }
        if self.degree() == 1 {
            return Ok(UniPoly::constant(a.coeff(0).recip()));
        }
        let (g, s, _) = a.ext_gcd(&self.modulus);
        if g.degree() != Some(0) {
            return Err(ArithError::NotInvertible(self.modulus.to_string()));
        }
        Ok(self.reduce(&s))
    }
}

/// An element of `Q[y]/(P)`, stored as its reduced residue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotElem {
    ring: Arc<QuotRing>,
    residue: UniPoly,
}

impl QuotElem {
    pub fn new(ring: &Arc<QuotRing>, p: &UniPoly) -> Self {
        QuotElem {
            residue: ring.reduce(p),
            ring: Arc::clone(ring),
        }
    }

    pub fn from_rat(ring: &Arc<QuotRing>, c: Rat) -> Self {
        QuotElem {
            residue: UniPoly::constant(c),
            ring: Arc::clone(ring),
        }
    }

    /// The class `y_P` of the variable.
    pub fn generator(ring: &Arc<QuotRing>) -> Self {
        Self::new(ring, &UniPoly::from_i64(&[0, 1]))
    }

    pub fn ring(&self) -> &Arc<QuotRing> {
        &self.ring
    }

    pub fn residue(&self) -> &UniPoly {
        &self.residue
    }

    pub fn is_zero(&self) -> bool {
        self.residue.is_zero()
    }

    /// Component on `y_P^j` in the power basis.
    pub fn component(&self, j: usize) -> Rat {
        self.residue.coeff(j)
    }

    pub fn add(&self, other: &QuotElem) -> QuotElem {
        QuotElem {
            residue: &self.residue + &other.residue,
            ring: Arc::clone(&self.ring),
        }
    }

    pub fn sub(&self, other: &QuotElem) -> QuotElem {
        QuotElem {
            residue: &self.residue - &other.residue,
            ring: Arc::clone(&self.ring),
        }
    }

    pub fn mul(&self, other: &QuotElem) -> QuotElem {
        QuotElem {
            residue: self.ring.mul_residues(&self.residue, &other.residue),
            ring: Arc::clone(&self.ring),
        }
    }

    pub fn inverse(&self) -> Result<QuotElem, ArithError> {
        Ok(QuotElem {
            residue: self.ring.inv_residue(&self.residue)?,
            ring: Arc::clone(&self.ring),
        })
    }

    /// Trace down to Q, given the power sums `Tr^0..Tr^{l-1}` of the modulus.
    pub fn trace_with(&self, power_sums: &[Rat]) -> Rat {
        self.residue
            .coeffs()
            .iter()
            .zip(power_sums)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, s)| c * s)
            .sum()
    }
}

impl QuotElem {
    /// Trace of the multiplication-by-`self` map on the power basis.
    pub fn trace(&self) -> Rat {
        let l = self.ring.degree();
        (0..l)
            .map(|j| {
                let basis = UniPoly::monomial(Rat::one(), j);
                self.ring.mul_residues(&self.residue, &basis).coeff(j)
            })
            .sum()
    }
}

impl fmt::Display for QuotElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod ({})", self.residue, self.ring.modulus)
    }
}
