use std::fmt;

use num_traits::{One, Zero};

use super::{rat_size, ArithError, Rat};

/// Dense row-major rational matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rat>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            entries: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>, cols: usize) -> Result<Self, ArithError> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * cols);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(ArithError::Dimension(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            entries.extend(r);
        }
        Ok(RatMatrix {
            rows: n,
            cols,
            entries,
        })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| super::rat(v)).collect())
                .collect(),
            cols,
        )
        .expect("ragged rows")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// Row vector times matrix.
    pub fn left_mul(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.rows);
        (0..self.cols)
            .map(|j| {
                v.iter()
                    .enumerate()
                    .filter(|(_, a)| !a.is_zero())
                    .map(|(i, a)| a * self.get(i, j))
                    .sum()
            })
            .collect()
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, v) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Reduced row echelon form with its pivot columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub matrix: RatMatrix,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Exact Gauss-Jordan elimination. Zero rows are dropped from the result.
///
/// Among candidate pivots in a column the entry of smallest bit size is
/// chosen, which keeps intermediate fractions small in practice.
pub fn reduced_row_echelon(m: &RatMatrix) -> Rref {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let best = (r..rows)
            .filter(|&i| !a.get(i, c).is_zero())
            .min_by_key(|&i| rat_size(a.get(i, c)));
        let Some(p) = best else { continue };
        a.swap_rows(r, p);
        let inv = a.get(r, c).recip();
        if !inv.is_one() {
            for j in c..cols {
                let v = a.get(r, j) * &inv;
                a.set(r, j, v);
            }
        }
        let pivot_row: Vec<Rat> = a.row(r)[c..].to_vec();
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = a.get(i, c).clone();
            if factor.is_zero() {
                continue;
            }
            for (off, pv) in pivot_row.iter().enumerate() {
                if !pv.is_zero() {
                    let v = a.get(i, c + off) - &factor * pv;
                    a.set(i, c + off, v);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    a.entries.truncate(r * cols);
    a.rows = r;
    Rref { matrix: a, pivots }
}

/// Reduced echelon basis of `{v : v * m = 0}`, one basis vector per row.
pub fn left_kernel_basis(m: &RatMatrix) -> RatMatrix {
    let n = m.rows;
    let rref = reduced_row_echelon(&m.transpose());
    let mut is_pivot = vec![false; n];
    for &p in &rref.pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..n).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Rat::zero(); n];
        v[free] = Rat::one();
        for (row, &p) in rref.pivots.iter().enumerate() {
            v[p] = -rref.matrix.get(row, free).clone();
        }
        basis.push(v);
    }
    let count = basis.len();
    let b = RatMatrix::from_rows(basis, n).expect("kernel vectors have length n");
    let reduced = reduced_row_echelon(&b);
    debug_assert_eq!(reduced.rank(), count);
    reduced.matrix
}

/// Unique solution of `m * x = rhs`.
pub fn solve_affine_system(m: &RatMatrix, rhs: &[Rat]) -> Result<Vec<Rat>, ArithError> {
    if rhs.len() != m.rows {
        return Err(ArithError::Dimension(format!(
            "{} right-hand sides for {} equations",
            rhs.len(),
            m.rows
        )));
    }
    let cols = m.cols;
    let mut aug = RatMatrix::zeros(m.rows, cols + 1);
    for (i, b) in rhs.iter().enumerate() {
        for j in 0..cols {
            aug.set(i, j, m.get(i, j).clone());
        }
        aug.set(i, cols, b.clone());
    }
    let rref = reduced_row_echelon(&aug);
    if rref.pivots.last() == Some(&cols) {
        return Err(ArithError::Inconsistent);
    }
    if rref.rank() < cols {
        return Err(ArithError::Underdetermined {
            free: cols - rref.rank(),
        });
    }
    Ok((0..cols).map(|i| rref.matrix.get(i, cols).clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::rat;

    #[test]
    fn rref_examples() {
        let id = RatMatrix::identity(2);
        let r = reduced_row_echelon(&id);
        assert_eq!(r.matrix, id);
        assert_eq!(r.pivots, vec![0, 1]);

        let r = reduced_row_echelon(&RatMatrix::from_i64(&[&[2, 4], &[1, 2]]));
        assert_eq!(r.matrix, RatMatrix::from_i64(&[&[1, 2]]));
        assert_eq!(r.pivots, vec![0]);

        let r = reduced_row_echelon(&RatMatrix::zeros(2, 2));
        assert_eq!(r.matrix.rows(), 0);
        assert!(r.pivots.is_empty());
    }

    #[test]
    fn left_kernel_examples() {
        assert_eq!(left_kernel_basis(&RatMatrix::zeros(2, 0)), RatMatrix::identity(2));
        assert_eq!(
            left_kernel_basis(&RatMatrix::from_i64(&[&[1], &[1]])),
            RatMatrix::from_i64(&[&[1, -1]])
        );
        assert_eq!(
            left_kernel_basis(&RatMatrix::from_i64(&[&[0], &[0]])),
            RatMatrix::identity(2)
        );
    }

    #[test]
    fn solve_examples() {
        assert_eq!(
            solve_affine_system(&RatMatrix::from_i64(&[&[1]]), &[rat(5)]).unwrap(),
            vec![rat(5)]
        );
        assert_eq!(
            solve_affine_system(&RatMatrix::from_i64(&[&[1, 0], &[1, -1]]), &[rat(1), rat(0)])
                .unwrap(),
            vec![rat(1), rat(1)]
        );
        assert_eq!(
            solve_affine_system(&RatMatrix::from_i64(&[&[1], &[1]]), &[rat(1), rat(2)]),
            Err(ArithError::Inconsistent)
        );
        assert_eq!(
            solve_affine_system(&RatMatrix::from_i64(&[&[1, 1]]), &[rat(1)]),
            Err(ArithError::Underdetermined { free: 1 })
        );
    }
}
