//! Factor recovery from a kernel block: the support vector of the factor's
//! polytope from an intersection-number system, then its coefficients from
//! an affine system built on the lifted series.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::bivariate::SparseBivariate;
use crate::exact_arith::{solve_affine_system, ArithError, Rat, RatMatrix};
use crate::lifting::LiftRecord;
use crate::polytope_fan::{points_in_halfplanes, self_intersections, LatticePoint, LatticePolytope, RefinedFan};
use crate::recombine::series_powers;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReconstructError {
    #[error("support system has no integral solution: {0}")]
    NonIntegralSolution(String),
    #[error("support value e_{ray} = {value} outside [0, {bound}]")]
    NegativeSupport { ray: usize, value: String, bound: i64 },
    #[error("lift at ray {ray} has precision {precision}, need {needed}")]
    PrecisionExceeded { ray: usize, precision: usize, needed: usize },
    #[error("coefficient system for block {block:?} failed: {source}")]
    CoefficientSystem {
        block: Vec<usize>,
        #[source]
        source: ArithError,
    },
    #[error("product of factors differs from the input by {discrepancy}")]
    ProductMismatch { discrepancy: String },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// One rational factor as recovered from a kernel block. Per-ray vectors are
/// indexed by ray `0..=r+1` and vanish at both ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorCandidate {
    pub gamma: Vec<bool>,
    pub l_of_gamma: Vec<i64>,
    pub e: Vec<i64>,
    pub support_polytope: LatticePolytope,
    pub support_points: Vec<LatticePoint>,
    /// Normalized so that `q(0,0) = 1`.
    pub coefficients: SparseBivariate,
}

/// `l_i(gamma) = sum deg(P)` over the factors `P` at ray `i` selected by `gamma`.
pub fn l_of_gamma(gamma: &[bool], lifts: &[LiftRecord], fan: &RefinedFan) -> Vec<i64> {
    let mut l = vec![0; fan.rays().len()];
    for (lr, &g) in lifts.iter().zip(gamma) {
        if g {
            l[lr.ray_index] += lr.degree() as i64;
        }
    }
    l
}

/// Solves `sum_i e_i (D_i . D_j) = l_j` with `D_i^2 = -det(eta_{i-1}, eta_{i+1})`
/// and `D_i . D_{i+1} = 1`, then cuts out `N_q` inside `bound`.
pub fn factor_support(
    fan: &RefinedFan,
    l: &[i64],
    d: &[i64],
    bound: &LatticePolytope,
) -> Result<(Vec<i64>, LatticePolytope, Vec<LatticePoint>), ReconstructError> {
    let r = fan.boundary_count();
    let diag = self_intersections(fan);
    let mut m = RatMatrix::zeros(r, r);
    for (i, &s) in diag.iter().enumerate() {
        m.set(i, i, Rat::from_integer(s.into()));
        if i + 1 < r {
            m.set(i, i + 1, Rat::one());
            m.set(i + 1, i, Rat::one());
        }
    }
    let rhs: Vec<Rat> = (1..=r).map(|j| Rat::from_integer(l[j].into())).collect();
    let sol = solve_affine_system(&m, &rhs)
        .map_err(|e| ReconstructError::NonIntegralSolution(e.to_string()))?;
    let mut e = vec![0i64; r + 2];
    for (k, v) in sol.iter().enumerate() {
        let i = k + 1;
        if !v.is_integer() {
            return Err(ReconstructError::NonIntegralSolution(format!("e_{i} = {v}")));
        }
        let out_of_range = || ReconstructError::NegativeSupport {
            ray: i,
            value: v.to_string(),
            bound: d[i],
        };
        let n = i64::try_from(v.to_integer()).map_err(|_| out_of_range())?;
        if n < 0 || n > d[i] {
            return Err(out_of_range());
        }
        e[i] = n;
    }
    let constraints: Vec<(LatticePoint, i64)> = fan.rays().iter().copied().zip(e.iter().copied()).collect();
    let (lo, hi) = bound.bounding_box();
    let points = points_in_halfplanes(&constraints, lo, hi, false);
    Ok((e, LatticePolytope::hull(&points), points))
}

/// Rows of the affine system for the coefficients `c_m`, `m` in `points`:
/// `c_(0,0) = 1`, and for every selected `P` at ray `i` the vanishing of
/// `sum_m c_m x^{<m,eta_i> + e_i} phi_P^{<m,eta_{i+1}>}` modulo `x^{e_i+1}`,
/// one row per `(x` power, `y_P` component).
pub fn coefficient_system(
    gamma: &[bool],
    e: &[i64],
    points: &[LatticePoint],
    lifts: &[LiftRecord],
    fan: &RefinedFan,
) -> Result<(RatMatrix, Vec<Rat>), ReconstructError> {
    let n = points.len();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut first = vec![Rat::zero(); n];
    if let Ok(k) = points.binary_search(&LatticePoint::new(0, 0)) {
        first[k] = Rat::one();
    }
    rows.push(first);
    rhs.push(Rat::one());
    for (lr, _) in lifts.iter().zip(gamma).filter(|(_, &g)| g) {
        let i = lr.ray_index;
        let prec = e[i] as usize + 1;
        if lr.precision() < prec {
            return Err(ReconstructError::PrecisionExceeded {
                ray: i,
                precision: lr.precision(),
                needed: prec,
            });
        }
        let (eta, next) = (fan.ray(i), fan.ray(i + 1));
        let phi = lr.series.truncate(prec);
        let powers = series_powers(&phi, points.iter().map(|m| m.dot(next)))?;
        let l = lr.degree();
        let mut block = vec![vec![Rat::zero(); n]; prec * l];
        for (col, m) in points.iter().enumerate() {
            let shift = m.dot(eta) + e[i];
            debug_assert!(shift >= 0);
            let pow = &powers[&m.dot(next)];
            for t in shift.max(0) as usize..prec {
                let c = pow.residues()[t - shift as usize].coeffs();
                for (j, v) in c.iter().enumerate() {
                    block[t * l + j][col] = v.clone();
                }
            }
        }
        rhs.extend(std::iter::repeat_n(Rat::zero(), block.len()));
        rows.extend(block);
    }
    Ok((RatMatrix::from_rows(rows, n)?, rhs))
}

/// The unique solution of the coefficient system as a polynomial.
pub fn solve_factor(points: &[LatticePoint], system: &(RatMatrix, Vec<Rat>)) -> Result<SparseBivariate, ArithError> {
    let sol = solve_affine_system(&system.0, &system.1)?;
    Ok(SparseBivariate::from_terms(points.iter().copied().zip(sol)))
}

/// Runs support and coefficient recovery for one kernel block.
pub fn reconstruct_candidate(
    gamma: &[bool],
    lifts: &[LiftRecord],
    fan: &RefinedFan,
    d: &[i64],
    bound: &LatticePolytope,
) -> Result<FactorCandidate, ReconstructError> {
    let l = l_of_gamma(gamma, lifts, fan);
    let (e, support_polytope, support_points) = factor_support(fan, &l, d, bound)?;
    let system = coefficient_system(gamma, &e, &support_points, lifts, fan)?;
    let coefficients =
        solve_factor(&support_points, &system).map_err(|source| ReconstructError::CoefficientSystem {
            block: (0..gamma.len()).filter(|&k| gamma[k]).collect(),
            source,
        })?;
    Ok(FactorCandidate {
        gamma: gamma.to_vec(),
        l_of_gamma: l,
        e,
        support_polytope,
        support_points,
        coefficients,
    })
}

/// `f = constant * prod factors`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub constant: Rat,
    /// Primitive integer factors with positive lexicographically leading
    /// coefficient, in kernel block order.
    pub factors: Vec<SparseBivariate>,
    /// `f(0,0)`, the constant for `normalized`.
    pub normalized_constant: Rat,
    /// The same factors scaled to `q(0,0) = 1`.
    pub normalized: Vec<SparseBivariate>,
}

impl Factorization {
    pub fn is_irreducible(&self) -> bool {
        self.factors.len() == 1
    }

    pub fn expand(&self) -> SparseBivariate {
        SparseBivariate::product(&self.factors).scale(&self.constant)
    }
}

/// Checks `f = f(0,0) * prod q_j` exactly and produces both normal forms.
pub fn assemble_factorization(
    f: &SparseBivariate,
    candidates: &[FactorCandidate],
) -> Result<Factorization, ReconstructError> {
    let c0 = f.constant_term();
    let normalized: Vec<SparseBivariate> = candidates.iter().map(|c| c.coefficients.clone()).collect();
    let product = SparseBivariate::product(&normalized).scale(&c0);
    if &product != f {
        return Err(ReconstructError::ProductMismatch {
            discrepancy: f.sub(&product).to_string(),
        });
    }
    let mut constant = c0.clone();
    let mut factors = Vec::with_capacity(normalized.len());
    for q in &normalized {
        let (content, prim) = q.primitive_integer_form();
        constant *= content;
        factors.push(prim);
    }
    Ok(Factorization {
        constant,
        factors,
        normalized_constant: c0,
        normalized,
    })
}
