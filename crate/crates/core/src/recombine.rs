//! The recombination matrix of residue pairings and the partition of the
//! facet factors read off from its left kernel.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exact_arith::{left_kernel_basis, rat, ArithError, Rat, RatMatrix, TruncSeries, UniPoly};
use crate::lifting::LiftRecord;
use crate::polytope_fan::{lattice_points, LatticePoint, LatticePolytope, RefinedFan};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecombineError {
    #[error("coefficient x^{index} requested from a series known modulo x^{precision}")]
    PrecisionExceeded { index: i64, precision: usize },
    #[error("kernel basis row {row} is not a 0/1 vector: {entries}")]
    NonBinaryKernel { row: usize, entries: String },
    #[error("kernel basis rows do not partition the facet factors")]
    NotAPartition,
    #[error("the all-ones vector is not in the left kernel")]
    AllOnesNotInKernel,
    #[error("exterior normal {0} has a nonnegative coordinate")]
    PreconditionNotMet(LatticePoint),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// `B^k(phi) = phi^k / k` for `k != 0`, and the logarithm of `phi`
/// vanishing at zero for `k = 0`.
pub fn bk_series(lr: &LiftRecord, k: i64) -> Result<TruncSeries, ArithError> {
    bk_of(&lr.series, k)
}

fn bk_of(phi: &TruncSeries, k: i64) -> Result<TruncSeries, ArithError> {
    if k == 0 {
        phi.log_primitive()
    } else {
        Ok(phi.int_power(k)?.scale(&Rat::new(1.into(), k.into())))
    }
}

fn extract(b: &TruncSeries, index: i64, sums: &[Rat]) -> Result<Rat, RecombineError> {
    match b.coeff(index) {
        Some(c) => Ok(c.trace_with(sums)),
        None => Err(RecombineError::PrecisionExceeded {
            index,
            precision: b.precision(),
        }),
    }
}

/// `a_{Pm} = sum_j Tr^j(P) coef_{-<m,eta_i>}(B^{<m,eta_{i+1}>}(phi_P), y_P^j)`.
pub fn recombination_entry(lr: &LiftRecord, m: LatticePoint, fan: &RefinedFan) -> Result<Rat, RecombineError> {
    let i = lr.ray_index;
    let index = -m.dot(fan.ray(i));
    if index < 0 {
        return Ok(Rat::zero());
    }
    if index as usize >= lr.precision() {
        return Err(RecombineError::PrecisionExceeded {
            index,
            precision: lr.precision(),
        });
    }
    let k = m.dot(fan.ray(i + 1));
    extract(&bk_series(lr, k)?, index, &lr.power_sums)
}

/// `phi^k` for every requested `k`, built incrementally: positive powers in
/// increasing order, negative ones from the inverse by increasing `|k|`.
pub(crate) fn series_powers(
    phi: &TruncSeries,
    ks: impl IntoIterator<Item = i64>,
) -> Result<BTreeMap<i64, TruncSeries>, ArithError> {
    let ks: std::collections::BTreeSet<i64> = ks.into_iter().collect();
    let mut out = BTreeMap::new();
    if ks.contains(&0) {
        out.insert(0, TruncSeries::one(phi.ring(), phi.precision()));
    }
    let mut last: Option<(i64, TruncSeries)> = None;
    for &k in ks.range(1..) {
        let pow = match &last {
            Some((e, p)) => p.mul(&phi.int_power(k - e)?),
            None => phi.int_power(k)?,
        };
        out.insert(k, pow.clone());
        last = Some((k, pow));
    }
    if ks.range(..0).next().is_some() {
        let inv = phi.inverse()?;
        let mut last: Option<(i64, TruncSeries)> = None;
        for &k in ks.range(..0).rev() {
            let pow = match &last {
                Some((e, p)) => p.mul(&inv.int_power(-k - e)?),
                None => inv.int_power(-k)?,
            };
            out.insert(k, pow.clone());
            last = Some((-k, pow));
        }
    }
    Ok(out)
}

/// One row of the matrix, computing each needed `phi^k` once.
fn matrix_row(lr: &LiftRecord, cols: &[LatticePoint], fan: &RefinedFan) -> Result<Vec<Rat>, RecombineError> {
    let eta = fan.ray(lr.ray_index);
    let next = fan.ray(lr.ray_index + 1);
    let mut needed = std::collections::BTreeSet::new();
    for m in cols {
        let index = -m.dot(eta);
        if index >= 0 {
            if index as usize >= lr.precision() {
                return Err(RecombineError::PrecisionExceeded {
                    index,
                    precision: lr.precision(),
                });
            }
            needed.insert(m.dot(next));
        }
    }
    let phi = &lr.series;
    let mut bk = series_powers(phi, needed.iter().copied().filter(|&k| k != 0))?;
    for (k, p) in bk.iter_mut() {
        *p = p.scale(&Rat::new(1.into(), (*k).into()));
    }
    if needed.contains(&0) {
        bk.insert(0, phi.log_primitive()?);
    }
    cols.iter()
        .map(|m| {
            let index = -m.dot(eta);
            if index < 0 {
                return Ok(Rat::zero());
            }
            extract(&bk[&m.dot(next)], index, &lr.power_sums)
        })
        .collect()
}

/// Rows indexed by facet factors, columns by lattice points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecombinationMatrix {
    pub row_index: Vec<(usize, UniPoly)>,
    pub col_index: Vec<LatticePoint>,
    pub entries: RatMatrix,
}

pub fn recombination_matrix(
    lifts: &[LiftRecord],
    fan: &RefinedFan,
    cols: &[LatticePoint],
) -> Result<RecombinationMatrix, RecombineError> {
    let rows = lifts
        .iter()
        .map(|lr| matrix_row(lr, cols, fan))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RecombinationMatrix {
        row_index: lifts.iter().map(|lr| (lr.ray_index, lr.factor.clone())).collect(),
        col_index: cols.to_vec(),
        entries: RatMatrix::from_rows(rows, cols.len())?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecombinationOutcome {
    pub matrix: RecombinationMatrix,
    /// Reduced echelon basis of the left kernel, one row per rational factor.
    pub kernel_basis: RatMatrix,
    /// Row indices of the facet factors in each block, ordered like the basis.
    pub partition: Vec<Vec<usize>>,
}

impl RecombinationOutcome {
    pub fn factor_count(&self) -> usize {
        self.partition.len()
    }
}

fn partition_of(basis: &RatMatrix) -> Result<Vec<Vec<usize>>, RecombineError> {
    let n = basis.cols();
    let mut covered = vec![false; n];
    let mut blocks = Vec::with_capacity(basis.rows());
    for r in 0..basis.rows() {
        let row = basis.row(r);
        if row.iter().any(|v| !v.is_zero() && !v.is_one()) {
            return Err(RecombineError::NonBinaryKernel {
                row: r,
                entries: row.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","),
            });
        }
        let block: Vec<usize> = (0..n).filter(|&j| row[j].is_one()).collect();
        for &j in &block {
            if covered[j] {
                return Err(RecombineError::NotAPartition);
            }
            covered[j] = true;
        }
        blocks.push(block);
    }
    if covered.iter().any(|c| !c) {
        return Err(RecombineError::NotAPartition);
    }
    Ok(blocks)
}

fn outcome_from(matrix: RecombinationMatrix) -> Result<RecombinationOutcome, RecombineError> {
    let ones = vec![Rat::one(); matrix.entries.rows()];
    if matrix.entries.left_mul(&ones).iter().any(|v| !v.is_zero()) {
        return Err(RecombineError::AllOnesNotInKernel);
    }
    let kernel_basis = left_kernel_basis(&matrix.entries);
    let partition = partition_of(&kernel_basis)?;
    Ok(RecombinationOutcome {
        matrix,
        kernel_basis,
        partition,
    })
}

/// Full-precision recombination over the interior points of `2 N_f`.
pub fn recombination_partition(
    lifts: &[LiftRecord],
    fan: &RefinedFan,
    interior: &[LatticePoint],
) -> Result<RecombinationOutcome, RecombineError> {
    outcome_from(recombination_matrix(lifts, fan, interior)?)
}

/// Columns used by the reduced-precision probe: lattice points of `N_f`
/// off the coordinate axes.
pub fn probe_columns(polytope: &LatticePolytope) -> Vec<LatticePoint> {
    lattice_points(polytope, 1, false)
        .into_iter()
        .filter(|m| m.m1 >= 1 && m.m2 >= 1)
        .collect()
}

/// Recombination at precision `d_i + 1`. Returns `None` when the kernel
/// basis is not a 0/1 partition, in which case the caller has to fall back
/// to full precision.
pub fn reduced_precision_probe(
    polytope: &LatticePolytope,
    fan: &RefinedFan,
    supports: &[i64],
    lifts: &[LiftRecord],
) -> Result<Option<RecombinationOutcome>, RecombineError> {
    for i in 1..=fan.boundary_count() {
        let eta = fan.ray(i);
        if fan.in_normal_fan(i) && (eta.m1 >= 0 || eta.m2 >= 0) {
            return Err(RecombineError::PreconditionNotMet(eta));
        }
    }
    let truncated: Vec<LiftRecord> = lifts
        .iter()
        .map(|lr| {
            let mut t = lr.clone();
            t.series = lr.series.truncate(supports[lr.ray_index] as usize + 1);
            t
        })
        .collect();
    let matrix = recombination_matrix(&truncated, fan, &probe_columns(polytope))?;
    match outcome_from(matrix) {
        Ok(o) => Ok(Some(o)),
        Err(RecombineError::NonBinaryKernel { .. } | RecombineError::NotAPartition) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Entry computed through the trace of the multiplication map instead of
/// power sums; used to cross-check [`recombination_entry`].
pub fn recombination_entry_by_trace(
    lr: &LiftRecord,
    m: LatticePoint,
    fan: &RefinedFan,
) -> Result<Rat, RecombineError> {
    let index = -m.dot(fan.ray(lr.ray_index));
    if index < 0 {
        return Ok(rat(0));
    }
    let b = bk_series(lr, m.dot(fan.ray(lr.ray_index + 1)))?;
    match b.coeff(index) {
        Some(c) => Ok(c.trace()),
        None => Err(RecombineError::PrecisionExceeded {
            index,
            precision: b.precision(),
        }),
    }
}
