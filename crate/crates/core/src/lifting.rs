//! Chart polynomials, facet polynomials and Newton lifting of facet factors
//! to power series over their residue fields.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;
use thiserror::Error;

use crate::bivariate::SparseBivariate;
use crate::exact_arith::{power_sums, rat, ArithError, QuotElem, QuotRing, Rat, TruncSeries, UniPoly};
use crate::polytope_fan::{LatticePoint, RefinedFan};
use crate::unifactor::is_squarefree;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("chart {ray} is inconsistent with the fan: {detail}")]
    InternalGeometry { ray: usize, detail: String },
    #[error("ray index {0} is not a boundary ray")]
    BadRayIndex(usize),
    #[error("{factor} does not divide the facet polynomial of ray {ray}")]
    NotAFacetFactor { ray: usize, factor: String },
    #[error("derivative of the chart is not invertible at the root of {0}")]
    NonInvertibleDerivative(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// `f` written in the affine chart of the cone spanned by rays `i` and `i+1`:
/// the monomial `t^m` becomes `x^(<m,eta_i> + d_i) * y^(<m,eta_{i+1}> + d_{i+1})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartPoly {
    pub ray_index: usize,
    terms: BTreeMap<(usize, usize), Rat>,
}

impl ChartPoly {
    pub fn from_terms(ray_index: usize, terms: impl IntoIterator<Item = ((usize, usize), Rat)>) -> Self {
        let mut map = BTreeMap::new();
        for (k, c) in terms {
            if !c.is_zero() {
                *map.entry(k).or_insert_with(Rat::zero) += c;
            }
        }
        map.retain(|_, c: &mut Rat| !c.is_zero());
        ChartPoly { ray_index, terms: map }
    }

    /// Terms keyed by `(x exponent, y exponent)`.
    pub fn terms(&self) -> &BTreeMap<(usize, usize), Rat> {
        &self.terms
    }

    pub fn y_degree(&self) -> usize {
        self.terms.keys().map(|k| k.1).max().unwrap_or(0)
    }

    pub fn coeff(&self, a: usize, b: usize) -> Rat {
        self.terms.get(&(a, b)).cloned().unwrap_or_else(Rat::zero)
    }

    /// Partial derivative in `y`.
    pub fn derivative_y(&self) -> ChartPoly {
        ChartPoly::from_terms(
            self.ray_index,
            self.terms
                .iter()
                .filter(|((_, b), _)| *b > 0)
                .map(|(&(a, b), c)| ((a, b - 1), c * rat(b as i64))),
        )
    }

    /// `self(x, phi)` modulo `x^N` where `N` is the precision of `phi`.
    /// Each distinct power of `phi` is obtained by binary powering from the
    /// previous one.
    pub fn eval_series(&self, phi: &TruncSeries) -> TruncSeries {
        let n = phi.precision();
        let ring = phi.ring();
        let mut out = TruncSeries::zero(ring, n);
        let mut by_power: BTreeMap<usize, Vec<(usize, &Rat)>> = BTreeMap::new();
        for (&(a, b), c) in &self.terms {
            if a < n {
                by_power.entry(b).or_default().push((a, c));
            }
        }
        let mut prev_exp = 0usize;
        let mut prev_pow = TruncSeries::one(ring, n);
        for (b, terms) in by_power {
            if b > prev_exp {
                let step = phi.int_power((b - prev_exp) as i64).expect("nonnegative power");
                prev_pow = prev_pow.mul(&step);
                prev_exp = b;
            }
            for (a, c) in terms {
                out = out.add(&prev_pow.shift(a).scale(c));
            }
        }
        out
    }
}

fn boundary_check(fan: &RefinedFan, i: usize) -> Result<(), LiftError> {
    if i == 0 || i > fan.boundary_count() {
        return Err(LiftError::BadRayIndex(i));
    }
    Ok(())
}

/// Support value `d` of `f` on every ray of the fan.
pub fn support_values(f: &SparseBivariate, fan: &RefinedFan) -> Vec<i64> {
    fan.rays()
        .iter()
        .map(|&eta| -f.support().iter().map(|m| m.dot(eta)).min().unwrap_or(0))
        .collect()
}

pub fn chart_polynomial(f: &SparseBivariate, fan: &RefinedFan, i: usize) -> Result<ChartPoly, LiftError> {
    boundary_check(fan, i)?;
    let d = support_values(f, fan);
    chart_with_supports(f, fan, &d, i)
}

pub(crate) fn chart_with_supports(
    f: &SparseBivariate,
    fan: &RefinedFan,
    d: &[i64],
    i: usize,
) -> Result<ChartPoly, LiftError> {
    let (eta, next) = (fan.ray(i), fan.ray(i + 1));
    let mut terms = Vec::with_capacity(f.len());
    for (m, c) in f.terms() {
        let a = m.dot(eta) + d[i];
        let b = m.dot(next) + d[i + 1];
        if a < 0 || b < 0 {
            return Err(LiftError::InternalGeometry {
                ray: i,
                detail: format!("monomial {m} maps to negative exponent ({a},{b})"),
            });
        }
        terms.push(((a as usize, b as usize), c.clone()));
    }
    let chart = ChartPoly::from_terms(i, terms);
    if chart.coeff(0, 0).is_zero() {
        return Err(LiftError::InternalGeometry {
            ray: i,
            detail: "chart polynomial vanishes at the origin".into(),
        });
    }
    Ok(chart)
}

/// `P_i(y) = f_i(0, y)`.
pub fn facet_polynomial(c: &ChartPoly) -> UniPoly {
    let deg = c.y_degree();
    let mut coeffs = vec![Rat::zero(); deg + 1];
    for (&(a, b), v) in c.terms() {
        if a == 0 {
            coeffs[b] = v.clone();
        }
    }
    UniPoly::new(coeffs)
}

/// Outcome of the squarefreeness test on exterior facet polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisReport {
    /// `(ray index, normal, facet polynomial)` of every non-squarefree facet.
    pub offending: Vec<(usize, LatticePoint, UniPoly)>,
}

impl HypothesisReport {
    pub fn passed(&self) -> bool {
        self.offending.is_empty()
    }
}

/// Squarefreeness of the facet polynomials of all rays in the normal fan.
pub fn check_h2(charts: &[ChartPoly], fan: &RefinedFan) -> HypothesisReport {
    let offending = charts
        .iter()
        .filter(|c| fan.in_normal_fan(c.ray_index))
        .filter_map(|c| {
            let p = facet_polynomial(c);
            (!is_squarefree(&p).unwrap_or(false)).then(|| (c.ray_index, fan.ray(c.ray_index), p))
        })
        .collect();
    HypothesisReport { offending }
}

/// A facet factor `P` with its lifted series `phi_P`, the unique root of
/// `f_i(x, .)` over `Q[y]/(P)` with `phi_P(0) = y_P`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftRecord {
    pub ray_index: usize,
    pub factor: UniPoly,
    pub series: TruncSeries,
    /// Power sums `Tr^0 .. Tr^{l_P - 1}` of the roots of `factor`.
    pub power_sums: Vec<Rat>,
}

impl LiftRecord {
    pub fn ring(&self) -> &Arc<QuotRing> {
        self.series.ring()
    }

    pub fn degree(&self) -> usize {
        self.factor.degree().unwrap_or(0)
    }

    pub fn precision(&self) -> usize {
        self.series.precision()
    }
}

/// Newton iteration `phi <- phi - f_i(x,phi) / f_i_y(x,phi)` with precision
/// doubling from the exact root `y_P`.
pub fn lift_series(c: &ChartPoly, p: &UniPoly, precision: usize) -> Result<LiftRecord, LiftError> {
    if !facet_polynomial(c).rem(p).is_zero() {
        return Err(LiftError::NotAFacetFactor {
            ray: c.ray_index,
            factor: p.to_string(),
        });
    }
    let ring = QuotRing::new(p.clone())?;
    let dy = c.derivative_y();
    let y_p = QuotElem::generator(&ring);
    if dy.eval_series(&TruncSeries::constant(&y_p, 1)).constant_term().inverse().is_err() {
        return Err(LiftError::NonInvertibleDerivative(p.to_string()));
    }
    let mut phi = TruncSeries::constant(&y_p, 1);
    let mut cur = 1;
    while cur < precision {
        cur = (2 * cur).min(precision);
        phi = phi.truncate(cur);
        let value = c.eval_series(&phi);
        let slope = dy.eval_series(&phi);
        let correction = value.mul(&slope.inverse()?);
        phi = phi.sub(&correction);
    }
    let phi = phi.truncate(precision);
    let sums = power_sums(p, p.degree().unwrap())?;
    Ok(LiftRecord {
        ray_index: c.ray_index,
        factor: p.clone(),
        series: phi,
        power_sums: sums,
    })
}

/// `f_i(x, phi_P) mod x^N`; zero for a correct lift.
pub fn lift_residual(c: &ChartPoly, lr: &LiftRecord) -> TruncSeries {
    c.eval_series(&lr.series)
}
