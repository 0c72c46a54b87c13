//! Dense Gaussian elimination over a field, or over a product of fields
//! through dynamic evaluation.
//!
//! Pivots are taken column by column, choosing the first unit in the
//! column. When a column holds no unit but does hold a nonzero zero divisor,
//! the zero divisor is returned so the caller can split the algebra.

use crate::error::ZeroDivisor;
use crate::field::{Fp, PrimeField};
use crate::ring::{DynField, Ring};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<E> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<E>,
}

impl<E: Clone> Matrix<E> {
    pub fn filled(rows: usize, cols: usize, x: E) -> Matrix<E> {
        Matrix {
            rows,
            cols,
            data: vec![x; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<E>>) -> Matrix<E> {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Matrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn identity<R: Ring<Elem = E>>(ring: &R, n: usize) -> Matrix<E> {
        let mut m = Matrix::filled(n, n, ring.zero());
        for i in 0..n {
            m[(i, i)] = ring.one();
        }
        m
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix<E> {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self[(i, j)].clone());
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Submatrix on the given rows and columns.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix<E> {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                data.push(self[(i, j)].clone());
            }
        }
        Matrix {
            rows: rows.len(),
            cols: cols.len(),
            data,
        }
    }

    pub fn mul<R: Ring<Elem = E>>(&self, ring: &R, o: &Matrix<E>) -> Matrix<E> {
        assert_eq!(self.cols, o.rows);
        let mut c = Matrix::filled(self.rows, o.cols, ring.zero());
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if ring.is_zero(a) {
                    continue;
                }
                for j in 0..o.cols {
                    c[(i, j)] = ring.add(&c[(i, j)], &ring.mul(a, &o[(k, j)]));
                }
            }
        }
        c
    }

    pub fn mul_vec<R: Ring<Elem = E>>(&self, ring: &R, v: &[E]) -> Vec<E> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(ring.zero(), |s, (a, b)| ring.add(&s, &ring.mul(a, b)))
            })
            .collect()
    }
}

impl<E> std::ops::Index<(usize, usize)> for Matrix<E> {
    type Output = E;
    fn index(&self, (i, j): (usize, usize)) -> &E {
        &self.data[i * self.cols + j]
    }
}

impl<E> std::ops::IndexMut<(usize, usize)> for Matrix<E> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut E {
        &mut self.data[i * self.cols + j]
    }
}

/// Reduces `m` in place to reduced row echelon form and returns the pivot
/// columns.
pub fn rref<F: DynField>(field: &F, m: &mut Matrix<F::Elem>) -> Result<Vec<usize>, ZeroDivisor> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        let mut found = None;
        let mut divisor = None;
        for i in r..m.rows {
            match field.try_inv(&m[(i, c)]) {
                Ok(None) => {}
                Ok(Some(inv)) => {
                    found = Some((i, inv));
                    break;
                }
                Err(z) => {
                    divisor.get_or_insert(z);
                }
            }
        }
        let Some((i, inv)) = found else {
            if let Some(z) = divisor {
                return Err(z);
            }
            continue;
        };
        for j in 0..m.cols {
            m.data.swap(i * m.cols + j, r * m.cols + j);
        }
        for j in c..m.cols {
            m[(r, j)] = field.mul(&m[(r, j)], &inv);
        }
        for i2 in 0..m.rows {
            if i2 == r || field.is_zero(&m[(i2, c)]) {
                continue;
            }
            let factor = m[(i2, c)].clone();
            for j in c..m.cols {
                let t = field.mul(&factor, &m[(r, j)]);
                m[(i2, j)] = field.sub(&m[(i2, j)], &t);
            }
        }
        pivots.push(c);
        r += 1;
    }
    Ok(pivots)
}

pub fn rank<F: DynField>(field: &F, m: &Matrix<F::Elem>) -> Result<usize, ZeroDivisor> {
    let mut a = m.clone();
    Ok(rref(field, &mut a)?.len())
}

/// Basis of the right kernel, one vector per free column.
pub fn nullspace<F: DynField>(field: &F, m: &Matrix<F::Elem>) -> Result<Vec<Vec<F::Elem>>, ZeroDivisor> {
    let mut a = m.clone();
    let pivots = rref(field, &mut a)?;
    let mut basis = Vec::new();
    for free in (0..m.cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![field.zero(); m.cols];
        v[free] = field.one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = field.neg(&a[(r, free)]);
        }
        basis.push(v);
    }
    Ok(basis)
}

#[derive(Clone, Debug, PartialEq)]
pub enum LinearSolution<E> {
    Unique(Vec<E>),
    Inconsistent,
    Underdetermined,
}

pub fn solve_linear<F: DynField>(
    field: &F,
    a: &Matrix<F::Elem>,
    b: &[F::Elem],
) -> Result<LinearSolution<F::Elem>, ZeroDivisor> {
    assert_eq!(a.rows, b.len());
    let mut aug = Matrix::filled(a.rows, a.cols + 1, field.zero());
    for i in 0..a.rows {
        for j in 0..a.cols {
            aug[(i, j)] = a[(i, j)].clone();
        }
        aug[(i, a.cols)] = b[i].clone();
    }
    let pivots = rref(field, &mut aug)?;
    if pivots.last() == Some(&a.cols) {
        return Ok(LinearSolution::Inconsistent);
    }
    if pivots.len() < a.cols {
        return Ok(LinearSolution::Underdetermined);
    }
    Ok(LinearSolution::Unique(
        (0..a.cols).map(|r| aug[(r, a.cols)].clone()).collect(),
    ))
}

/// Inverse of a square matrix, `None` when singular.
pub fn inverse<F: DynField>(field: &F, a: &Matrix<F::Elem>) -> Result<Option<Matrix<F::Elem>>, ZeroDivisor> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut aug = Matrix::filled(n, 2 * n, field.zero());
    for i in 0..n {
        for j in 0..n {
            aug[(i, j)] = a[(i, j)].clone();
        }
        aug[(i, n + i)] = field.one();
    }
    let pivots = rref(field, &mut aug)?;
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return Ok(None);
    }
    let cols: Vec<usize> = (n..2 * n).collect();
    let rows: Vec<usize> = (0..n).collect();
    Ok(Some(aug.select(&rows, &cols)))
}

/// Matrix over `Fp` from signed integers.
pub fn fp_matrix(f: &PrimeField, rows: &[&[i64]]) -> Matrix<Fp> {
    Matrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|&x| f.from_i64(x)).collect())
            .collect(),
    )
}
