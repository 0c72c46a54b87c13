//! The quotient algebra `K[Y]/<w>` for a monic `w`, used as a field by
//! dynamic evaluation.

use crate::error::ZeroDivisor;
use crate::field::{Fp, PrimeField};
use crate::ring::{DynField, Ring};
use crate::upoly::{inv_mod, UPoly};

#[derive(Clone, Debug)]
pub struct QuotientRing {
    field: PrimeField,
    modulus: UPoly,
}

impl QuotientRing {
    /// `modulus` must be monic of positive degree.
    pub fn new(field: &PrimeField, modulus: UPoly) -> QuotientRing {
        assert!(
            modulus.degree().is_some_and(|d| d > 0) && field.is_one(modulus.lc()),
            "quotient modulus must be monic of positive degree"
        );
        QuotientRing {
            field: field.clone(),
            modulus,
        }
    }

    pub fn modulus(&self) -> &UPoly {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.modulus.degree().unwrap()
    }

    pub fn reduce(&self, a: &UPoly) -> UPoly {
        a.rem(&self.field, &self.modulus)
    }

    /// The class of `Y`.
    pub fn generator(&self) -> UPoly {
        self.reduce(&UPoly::var(&self.field))
    }

    /// Inverse of a known unit, or the zero divisor it exposes.
    pub fn inv(&self, a: &UPoly) -> Result<UPoly, ZeroDivisor> {
        match inv_mod(&self.field, a, &self.modulus)? {
            Some(i) => Ok(i),
            None => Err(ZeroDivisor {
                factor: self.modulus.clone(),
            }),
        }
    }

    /// Trace of multiplication by `a`, given the power sums of the roots of
    /// the modulus (`Tr(Y^j) = p_j`).
    pub fn trace(&self, a: &UPoly, power_sums: &[Fp]) -> Fp {
        let f = &self.field;
        a.coeffs()
            .iter()
            .zip(power_sums)
            .fold(f.zero(), |s, (&c, &p)| f.add(s, f.mul(c, p)))
    }
}

impl Ring for QuotientRing {
    type Elem = UPoly;

    fn base(&self) -> &PrimeField {
        &self.field
    }
    fn zero(&self) -> UPoly {
        UPoly::zero()
    }
    fn one(&self) -> UPoly {
        UPoly::one(&self.field)
    }
    fn from_base(&self, c: Fp) -> UPoly {
        UPoly::constant(c)
    }
    fn add(&self, a: &UPoly, b: &UPoly) -> UPoly {
        a.add(&self.field, b)
    }
    fn sub(&self, a: &UPoly, b: &UPoly) -> UPoly {
        a.sub(&self.field, b)
    }
    fn mul(&self, a: &UPoly, b: &UPoly) -> UPoly {
        self.reduce(&a.mul(&self.field, b))
    }
    fn is_zero(&self, a: &UPoly) -> bool {
        a.is_zero()
    }
    fn neg(&self, a: &UPoly) -> UPoly {
        a.neg(&self.field)
    }
    fn scale(&self, c: Fp, a: &UPoly) -> UPoly {
        a.scale(&self.field, c)
    }
}

impl DynField for QuotientRing {
    fn try_inv(&self, a: &UPoly) -> Result<Option<UPoly>, ZeroDivisor> {
        inv_mod(&self.field, a, &self.modulus)
    }
}
