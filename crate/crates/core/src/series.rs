//! Truncated power series `R[[T]] mod T^prec` over any coefficient ring,
//! and Padé-style rational reconstruction over the base field.

use crate::error::{Error, Result};
use crate::field::{Fp, PrimeField};
use crate::ring::Ring;
use crate::upoly::UPoly;

/// Series ring context. Elements always hold exactly `prec` coefficients.
#[derive(Clone, Debug)]
pub struct SeriesRing<R: Ring> {
    pub coeff: R,
    pub prec: usize,
}

impl<R: Ring> SeriesRing<R> {
    pub fn new(coeff: R, prec: usize) -> Self {
        assert!(prec > 0);
        SeriesRing { coeff, prec }
    }

    /// Constant series.
    pub fn constant(&self, c: R::Elem) -> Vec<R::Elem> {
        let mut s = vec![self.coeff.zero(); self.prec];
        s[0] = c;
        s
    }

    /// The series `T`, or zero at precision one.
    pub fn t(&self) -> Vec<R::Elem> {
        let mut s = self.zero();
        if self.prec > 1 {
            s[1] = self.coeff.one();
        }
        s
    }

    /// Pads or truncates to this ring's precision.
    pub fn coerce(&self, mut s: Vec<R::Elem>) -> Vec<R::Elem> {
        s.resize(self.prec, self.coeff.zero());
        s
    }
}

impl<R: Ring> Ring for SeriesRing<R> {
    type Elem = Vec<R::Elem>;

    fn base(&self) -> &PrimeField {
        self.coeff.base()
    }
    fn zero(&self) -> Self::Elem {
        vec![self.coeff.zero(); self.prec]
    }
    fn one(&self) -> Self::Elem {
        self.constant(self.coeff.one())
    }
    fn from_base(&self, c: Fp) -> Self::Elem {
        self.constant(self.coeff.from_base(c))
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| self.coeff.add(x, y)).collect()
    }
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| self.coeff.sub(x, y)).collect()
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let n = self.prec;
        let la = a.iter().rposition(|x| !self.coeff.is_zero(x)).map_or(0, |i| i + 1);
        let lb = b.iter().rposition(|x| !self.coeff.is_zero(x)).map_or(0, |i| i + 1);
        let mut c = self.zero();
        for i in 0..la.min(n) {
            if self.coeff.is_zero(&a[i]) {
                continue;
            }
            for j in 0..lb.min(n - i) {
                if !self.coeff.is_zero(&b[j]) {
                    c[i + j] = self.coeff.add(&c[i + j], &self.coeff.mul(&a[i], &b[j]));
                }
            }
        }
        c
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.iter().all(|x| self.coeff.is_zero(x))
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|x| self.coeff.neg(x)).collect()
    }
    fn scale(&self, c: Fp, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|x| self.coeff.scale(c, x)).collect()
    }
}

/// Finds `num/den` with `den(0) = 1`, `deg num ≤ num_deg` and
/// `deg den ≤ prec − num_deg − 1`, agreeing with `f` modulo `T^prec`.
///
/// Runs the extended Euclidean algorithm on `(T^prec, f)` and stops at the
/// first remainder of degree at most `num_deg`.
pub fn pade(f: &PrimeField, s: &[Fp], prec: usize, num_deg: usize) -> Result<(UPoly, UPoly)> {
    assert!(num_deg < prec && s.len() >= prec);
    let (mut r0, mut r1) = (UPoly::monomial(f.one(), prec), UPoly::new(s[..prec].to_vec()));
    let (mut t0, mut t1) = (UPoly::zero(), UPoly::one(f));
    while r1.degree().is_some_and(|d| d > num_deg) {
        let (q, r) = r0.divrem(f, &r1);
        let t = t0.sub(f, &q.mul(f, &t1));
        (r0, r1) = (r1, r);
        (t0, t1) = (t1, t);
    }
    let c = t1.coeff(0);
    if f.is_zero(c) || t1.degree().unwrap_or(0) + num_deg >= prec {
        return Err(Error::NoSolution);
    }
    let u = f.inv(c).unwrap();
    Ok((r1.scale(f, u), t1.scale(f, u)))
}

/// Reconstruction from `2e` terms with numerator degree below `e` and
/// denominator degree at most `e`.
pub fn rational_reconstruct(f: &PrimeField, s: &[Fp], e: usize) -> Result<(UPoly, UPoly)> {
    assert!(e >= 1);
    pade(f, s, 2 * e, e - 1)
}

/// Power series expansion of `num/den` to `prec` terms; `den(0)` must be a unit.
pub fn expand_fraction(f: &PrimeField, num: &UPoly, den: &UPoly, prec: usize) -> Vec<Fp> {
    let d0 = f.inv(den.coeff(0)).expect("den(0) nonzero");
    let mut out = vec![f.zero(); prec];
    for k in 0..prec {
        let mut acc = num.coeff(k);
        for j in 1..=k.min(den.degree().unwrap_or(0)) {
            acc = f.sub(acc, f.mul(den.coeff(j), out[k - j]));
        }
        out[k] = f.mul(acc, d0);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::tests::check_axioms;
    use proptest::prelude::*;
    use proptest::test_runner::RngSeed;

    fn f() -> PrimeField {
        PrimeField::new(1009).unwrap()
    }

    fn s(f: &PrimeField, c: &[i64]) -> Vec<Fp> {
        c.iter().map(|&x| f.from_i64(x)).collect()
    }

    #[test]
    fn reconstruct_examples() {
        let f = f();
        let (n, d) = rational_reconstruct(&f, &s(&f, &[1, 1, 1, 1]), 2).unwrap();
        assert_eq!((n, d), (UPoly::from_i64s(&f, &[1]), UPoly::from_i64s(&f, &[1, -1])));
        let (n, d) = rational_reconstruct(&f, &s(&f, &[3, 0]), 1).unwrap();
        assert_eq!((n, d), (UPoly::from_i64s(&f, &[3]), UPoly::one(&f)));
        let (n, d) = rational_reconstruct(&f, &s(&f, &[0, 1, 0, 0]), 2).unwrap();
        assert_eq!((n, d), (UPoly::var(&f), UPoly::one(&f)));
        // T^2 mod T^4 has no form with numerator degree below 2 and den(0) ≠ 0.
        assert!(matches!(rational_reconstruct(&f, &s(&f, &[0, 0, 1, 0]), 2), Err(Error::NoSolution)));
    }

    #[test]
    fn series_axioms() {
        let f = f();
        let ring = SeriesRing::new(f.clone(), 4);
        let sample = vec![s(&f, &[1, 2, 3, 4]), s(&f, &[0, 5, 0, 7]), s(&f, &[9, 0, 0, 1])];
        check_axioms(&ring, &sample);
        let x = ring.mul(&s(&f, &[1, -1, 0, 0]), &s(&f, &[1, 1, 1, 1]));
        assert_eq!(x, ring.one());
    }

    fn config() -> ProptestConfig {
        ProptestConfig {
            cases: 1000,
            rng_seed: RngSeed::Fixed(0x5e5),
            failure_persistence: None,
            ..ProptestConfig::default()
        }
    }

    proptest! {
        #![proptest_config(config())]

        #[test]
        fn reconstruct_roundtrip(e in 1usize..8, num in prop::collection::vec(0u64..1009, 0..8),
                                 den in prop::collection::vec(0u64..1009, 0..8)) {
            let f = f();
            let mut num: Vec<Fp> = num.iter().map(|&x| f.from_u64(x)).collect();
            let mut den: Vec<Fp> = den.iter().map(|&x| f.from_u64(x)).collect();
            num.truncate(e);
            den.truncate(e);
            if den.is_empty() { den.push(f.one()); }
            den[0] = f.one();
            let (num, den) = (UPoly::new(num), UPoly::new(den));
            let g = crate::upoly::gcd(&f, &num, &den);
            prop_assume!(num.is_zero() || g.is_one(&f));
            let ser = expand_fraction(&f, &num, &den, 2 * e + 1);
            // With one spare term the numerator bound can be e itself.
            let (n, d) = pade(&f, &ser, 2 * e + 1, e).unwrap();
            prop_assert_eq!(&n, &num);
            prop_assert_eq!(&d, if num.is_zero() { &d } else { &den });
            let (n, d) = rational_reconstruct(&f, &ser, e).unwrap();
            prop_assert_eq!(n, num.clone());
            if !num.is_zero() { prop_assert_eq!(d, den); }
        }
    }
}
