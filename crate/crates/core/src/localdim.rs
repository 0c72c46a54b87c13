//! Isolated-point test through the growth of the local dual space.
//!
//! The dual basis `β_1, …, β_s` of the local ideal at the origin is encoded
//! by strictly lower triangular matrices `M_k` with
//! `X_k·β_i = Σ_{j<i} (M_k)_{i,j} β_j`, so that `β(h) = h(M_1,…,M_n)·e_1`.
//! Each extension step integrates: it solves for the functionals `β` with
//! every `X_k·β` in the current span and `β(c_j) = 0` for each generator.

use crate::error::{Error, Result, ZeroDivisor};
use crate::field::PrimeField;
use crate::linalg::{nullspace, rank, Matrix};
use crate::ring::{DynField, MatrixRing, Ring};
use crate::slp::Slp;

#[derive(Clone, Debug, PartialEq)]
pub struct DualBasis<E> {
    pub n: usize,
    pub s: usize,
    /// `coeffs[k]` is `M_{k+1}`, an `s×s` strictly lower triangular matrix.
    pub coeffs: Vec<Matrix<E>>,
    /// Sizes after each generation, starting with 1.
    pub block_sizes: Vec<usize>,
}

impl<E: Clone> DualBasis<E> {
    /// The single functional `β_1`, evaluation at the origin.
    pub fn origin<R: Ring<Elem = E>>(ring: &R, n: usize) -> DualBasis<E> {
        DualBasis {
            n,
            s: 1,
            coeffs: vec![Matrix::filled(1, 1, ring.zero()); n],
            block_sizes: vec![1],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Extension<E> {
    Extended(DualBasis<E>),
    Stable,
    ExceededBound,
}

/// `β_i(h_r)` for every functional and output, as an `s × R` matrix.
pub fn eval_duals<R: Ring + Clone>(ring: &R, basis: &DualBasis<R::Elem>, prog: &Slp) -> Matrix<R::Elem> {
    assert_eq!(prog.n_inputs(), basis.n);
    eval_with_params(ring, basis, prog, &[])
}

fn eval_with_params<R: Ring + Clone>(ring: &R, basis: &DualBasis<R::Elem>, prog: &Slp, params: &[R::Elem]) -> Matrix<R::Elem> {
    let s = basis.s;
    let mr = MatrixRing::new(ring.clone(), s);
    let mut inputs: Vec<Vec<R::Elem>> = basis.coeffs.iter().map(|m| m.data.clone()).collect();
    inputs.extend(params.iter().map(|p| mr.scalar(p.clone())));
    let vals = prog.eval(&mr, &inputs);
    let mut out = Matrix::filled(s, vals.len(), ring.zero());
    for (r, v) in vals.iter().enumerate() {
        for i in 0..s {
            out[(i, r)] = v[i * s].clone();
        }
    }
    out
}

/// The generators of a local ideal, prepared for extension: per variable
/// `k`, the program for `δ_k(c_j(X_1,…,X_k,0,…,0))` over all `j`. Trailing
/// parameter inputs, if any, are fed the scalars in `params`.
struct Germ<E> {
    n: usize,
    m: usize,
    progs: Vec<Slp>,
    params: Vec<E>,
}

impl<E: Clone> Germ<E> {
    fn new(field: &PrimeField, n: usize, system: &Slp, params: Vec<E>) -> Germ<E> {
        assert_eq!(system.n_inputs(), n + params.len());
        let progs = (0..n)
            .map(|k| {
                system
                    .zero_inputs(field, |i| i > k && i < n)
                    .divided_difference(field, k)
            })
            .collect();
        Germ {
            n,
            m: system.n_outputs(),
            progs,
            params,
        }
    }

    fn extend<F: DynField<Elem = E> + Clone>(
        &self,
        ring: &F,
        basis: &DualBasis<E>,
        mu: usize,
    ) -> Result<Extension<E>, ZeroDivisor> {
        let (n, s) = (self.n, basis.s);
        let cols = n * s;
        let mut rows: Vec<Vec<E>> = Vec::new();
        for k in 0..n {
            for k2 in k + 1..n {
                for i in 0..s {
                    let mut row = vec![ring.zero(); cols];
                    for j in 0..s {
                        row[k * s + j] = basis.coeffs[k2][(j, i)].clone();
                        row[k2 * s + j] = ring.neg(&basis.coeffs[k][(j, i)]);
                    }
                    rows.push(row);
                }
            }
        }
        let gen: Vec<Matrix<E>> = self
            .progs
            .iter()
            .map(|p| eval_with_params(ring, basis, p, &self.params))
            .collect();
        for j in 0..self.m {
            let mut row = Vec::with_capacity(cols);
            for g in &gen {
                row.extend((0..s).map(|i| g[(i, j)].clone()));
            }
            rows.push(row);
        }
        rows.retain(|r| r.iter().any(|x| !ring.is_zero(x)));
        let kernel = if rows.is_empty() {
            identity_rows(ring, cols)
        } else {
            nullspace(ring, &Matrix::from_rows(rows))?
        };

        // Already known functionals solve the system too; keep only what is new.
        let known = |i: usize| -> Vec<E> {
            (0..n)
                .flat_map(|k| basis.coeffs[k].row(i).to_vec())
                .collect()
        };
        let mut span: Vec<Vec<E>> = (1..s).map(known).collect();
        let mut r = if span.is_empty() {
            0
        } else {
            rank(ring, &Matrix::from_rows(span.clone()))?
        };
        let mut fresh = Vec::new();
        for v in kernel {
            span.push(v.clone());
            let r2 = rank(ring, &Matrix::from_rows(span.clone()))?;
            if r2 > r {
                r = r2;
                fresh.push(v);
                if s + fresh.len() > mu {
                    return Ok(Extension::ExceededBound);
                }
            } else {
                span.pop();
            }
        }
        if fresh.is_empty() {
            return Ok(Extension::Stable);
        }
        let s2 = s + fresh.len();
        let coeffs = (0..n)
            .map(|k| {
                let mut m = Matrix::filled(s2, s2, ring.zero());
                for i in 0..s {
                    for j in 0..s {
                        m[(i, j)] = basis.coeffs[k][(i, j)].clone();
                    }
                }
                for (t, v) in fresh.iter().enumerate() {
                    for j in 0..s {
                        m[(s + t, j)] = v[k * s + j].clone();
                    }
                }
                m
            })
            .collect();
        let mut block_sizes = basis.block_sizes.clone();
        block_sizes.push(s2);
        Ok(Extension::Extended(DualBasis {
            n,
            s: s2,
            coeffs,
            block_sizes,
        }))
    }

    fn run<F: DynField<Elem = E> + Clone>(&self, ring: &F, mu: usize) -> Result<Option<DualBasis<E>>, ZeroDivisor> {
        let mut basis = DualBasis::origin(ring, self.n);
        if mu == 0 {
            return Ok(None);
        }
        loop {
            match self.extend(ring, &basis, mu)? {
                Extension::Extended(b) => basis = b,
                Extension::Stable => return Ok(Some(basis)),
                Extension::ExceededBound => return Ok(None),
            }
        }
    }
}

fn identity_rows<R: Ring>(ring: &R, n: usize) -> Vec<Vec<R::Elem>> {
    (0..n)
        .map(|i| {
            let mut v = vec![ring.zero(); n];
            v[i] = ring.one();
            v
        })
        .collect()
}

/// One integration step for a system whose root is the origin.
pub fn extend<F: DynField + Clone>(
    ring: &F,
    basis: &DualBasis<F::Elem>,
    system: &Slp,
    mu: usize,
) -> Result<Extension<F::Elem>, ZeroDivisor> {
    Germ::new(ring.base(), basis.n, system, Vec::new()).extend(ring, basis, mu)
}

/// Dual basis of the local ideal at `x` when its dimension is at most `mu`,
/// `None` when the growth exceeds `mu`.
pub fn local_dual_basis<F: DynField + Clone>(
    ring: &F,
    system: &Slp,
    x: &[F::Elem],
    mu: usize,
) -> Result<Option<DualBasis<F::Elem>>> {
    let n = system.n_inputs();
    assert_eq!(x.len(), n);
    let field = ring.base();
    if system.eval(ring, x).iter().any(|v| !ring.is_zero(v)) {
        return Err(Error::NotARoot);
    }
    // C(X + P) with the point supplied as parameters P.
    let shifted = Slp::build(field, 2 * n, |b, xs| {
        let pt: Vec<usize> = (0..n).map(|i| b.add(&xs[i], &xs[n + i])).collect();
        system.eval(b, &pt)
    });
    let germ = Germ::new(field, n, &shifted, x.to_vec());
    Ok(germ.run(ring, mu)?)
}

/// Whether `x` is an isolated root of `system`, assuming `mu` bounds its
/// multiplicity if it is.
pub fn is_isolated<F: DynField + Clone>(ring: &F, system: &Slp, x: &[F::Elem], mu: usize) -> Result<bool> {
    Ok(local_dual_basis(ring, system, x, mu)?.is_some())
}
