//! Commutative-ring contexts over a prime field.
//!
//! A context owns whatever parameters the ring needs (modulus, precision,
//! matrix size) and elements are plain values. Straight-line programs are
//! evaluated through [`Ring`]; Gaussian elimination runs over any
//! [`DynField`], where inversion may discover a zero divisor.

use std::fmt::Debug;

use crate::error::ZeroDivisor;
use crate::field::{Fp, PrimeField};

pub trait Ring {
    type Elem: Clone + Debug + PartialEq;

    fn base(&self) -> &PrimeField;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_base(&self, c: Fp) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        self.sub(&self.zero(), a)
    }

    fn scale(&self, c: Fp, a: &Self::Elem) -> Self::Elem {
        self.mul(&self.from_base(c), a)
    }
}

/// A ring treated as a field: product of fields in practice.
pub trait DynField: Ring {
    /// `Ok(None)` for zero, `Ok(Some(inverse))` for a unit, and `Err` for a
    /// nonzero zero divisor.
    fn try_inv(&self, a: &Self::Elem) -> Result<Option<Self::Elem>, ZeroDivisor>;
}

impl Ring for PrimeField {
    type Elem = Fp;

    fn base(&self) -> &PrimeField {
        self
    }
    fn zero(&self) -> Fp {
        PrimeField::zero(self)
    }
    fn one(&self) -> Fp {
        PrimeField::one(self)
    }
    fn from_base(&self, c: Fp) -> Fp {
        c
    }
    fn add(&self, a: &Fp, b: &Fp) -> Fp {
        PrimeField::add(self, *a, *b)
    }
    fn sub(&self, a: &Fp, b: &Fp) -> Fp {
        PrimeField::sub(self, *a, *b)
    }
    fn mul(&self, a: &Fp, b: &Fp) -> Fp {
        PrimeField::mul(self, *a, *b)
    }
    fn is_zero(&self, a: &Fp) -> bool {
        PrimeField::is_zero(self, *a)
    }
    fn neg(&self, a: &Fp) -> Fp {
        PrimeField::neg(self, *a)
    }
}

impl DynField for PrimeField {
    fn try_inv(&self, a: &Fp) -> Result<Option<Fp>, ZeroDivisor> {
        Ok(self.inv(*a).ok())
    }
}

/// Dual numbers `K[h]/<h^2>`, elements `(value, derivative)`.
#[derive(Clone, Debug)]
pub struct DualRing {
    pub field: PrimeField,
}

impl Ring for DualRing {
    type Elem = (Fp, Fp);

    fn base(&self) -> &PrimeField {
        &self.field
    }
    fn zero(&self) -> (Fp, Fp) {
        (self.field.zero(), self.field.zero())
    }
    fn one(&self) -> (Fp, Fp) {
        (self.field.one(), self.field.zero())
    }
    fn from_base(&self, c: Fp) -> (Fp, Fp) {
        (c, self.field.zero())
    }
    fn add(&self, a: &(Fp, Fp), b: &(Fp, Fp)) -> (Fp, Fp) {
        let f = &self.field;
        (f.add(a.0, b.0), f.add(a.1, b.1))
    }
    fn sub(&self, a: &(Fp, Fp), b: &(Fp, Fp)) -> (Fp, Fp) {
        let f = &self.field;
        (f.sub(a.0, b.0), f.sub(a.1, b.1))
    }
    fn mul(&self, a: &(Fp, Fp), b: &(Fp, Fp)) -> (Fp, Fp) {
        let f = &self.field;
        (f.mul(a.0, b.0), f.add(f.mul(a.0, b.1), f.mul(a.1, b.0)))
    }
    fn is_zero(&self, a: &(Fp, Fp)) -> bool {
        self.field.is_zero(a.0) && self.field.is_zero(a.1)
    }
}

/// Square matrices of a fixed size over a base ring, stored row-major.
///
/// Not commutative in general; it is used on commuting families only.
#[derive(Clone, Debug)]
pub struct MatrixRing<R: Ring> {
    pub inner: R,
    pub dim: usize,
}

impl<R: Ring> MatrixRing<R> {
    pub fn new(inner: R, dim: usize) -> Self {
        MatrixRing { inner, dim }
    }

    pub fn scalar(&self, c: R::Elem) -> Vec<R::Elem> {
        let mut m = vec![self.inner.zero(); self.dim * self.dim];
        for i in 0..self.dim {
            m[i * self.dim + i] = c.clone();
        }
        m
    }
}

impl<R: Ring> Ring for MatrixRing<R> {
    type Elem = Vec<R::Elem>;

    fn base(&self) -> &PrimeField {
        self.inner.base()
    }
    fn zero(&self) -> Self::Elem {
        vec![self.inner.zero(); self.dim * self.dim]
    }
    fn one(&self) -> Self::Elem {
        self.scalar(self.inner.one())
    }
    fn from_base(&self, c: Fp) -> Self::Elem {
        self.scalar(self.inner.from_base(c))
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| self.inner.add(x, y)).collect()
    }
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| self.inner.sub(x, y)).collect()
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let d = self.dim;
        let mut c = self.zero();
        for i in 0..d {
            for k in 0..d {
                let aik = &a[i * d + k];
                if self.inner.is_zero(aik) {
                    continue;
                }
                for j in 0..d {
                    let bkj = &b[k * d + j];
                    if !self.inner.is_zero(bkj) {
                        c[i * d + j] = self.inner.add(&c[i * d + j], &self.inner.mul(aik, bkj));
                    }
                }
            }
        }
        c
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.iter().all(|x| self.inner.is_zero(x))
    }
}
