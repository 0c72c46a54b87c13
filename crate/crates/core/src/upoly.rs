//! Dense univariate polynomials over a prime field.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result, ZeroDivisor};
use crate::field::{Fp, PrimeField};
use crate::ring::Ring;

/// Coefficients low to high, without trailing zeros. Zero is empty.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct UPoly {
    c: Vec<Fp>,
}

impl fmt::Debug for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UPoly{:?}", self.c)
    }
}

impl UPoly {
    pub fn new(mut c: Vec<Fp>) -> UPoly {
        while c.last().is_some_and(|x| x.eq(&Fp::default())) {
            c.pop();
        }
        UPoly { c }
    }

    pub fn zero() -> UPoly {
        UPoly { c: Vec::new() }
    }

    pub fn constant(a: Fp) -> UPoly {
        UPoly::new(vec![a])
    }

    pub fn one(f: &PrimeField) -> UPoly {
        UPoly::constant(f.one())
    }

    /// The monomial `a·Y^d`.
    pub fn monomial(a: Fp, d: usize) -> UPoly {
        let mut c = vec![Fp::default(); d + 1];
        c[d] = a;
        UPoly::new(c)
    }

    /// The variable `Y`.
    pub fn var(f: &PrimeField) -> UPoly {
        UPoly::monomial(f.one(), 1)
    }

    pub fn from_i64s(f: &PrimeField, c: &[i64]) -> UPoly {
        UPoly::new(c.iter().map(|&x| f.from_i64(x)).collect())
    }

    /// Canonical coefficient representatives, low to high.
    pub fn to_u64s(&self, f: &PrimeField) -> Vec<u64> {
        self.c.iter().map(|&x| f.to_u64(x)).collect()
    }

    pub fn coeffs(&self) -> &[Fp] {
        &self.c
    }

    pub fn into_coeffs(self) -> Vec<Fp> {
        self.c
    }

    /// Coefficient of `Y^i`, zero beyond the degree.
    pub fn coeff(&self, i: usize) -> Fp {
        self.c.get(i).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Number of stored coefficients (degree + 1, or 0).
    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn lc(&self) -> Fp {
        self.c.last().copied().unwrap_or_default()
    }

    pub fn is_one(&self, f: &PrimeField) -> bool {
        self.c.len() == 1 && f.is_one(self.c[0])
    }

    pub fn add(&self, f: &PrimeField, o: &UPoly) -> UPoly {
        let n = self.c.len().max(o.c.len());
        UPoly::new((0..n).map(|i| f.add(self.coeff(i), o.coeff(i))).collect())
    }

    pub fn sub(&self, f: &PrimeField, o: &UPoly) -> UPoly {
        let n = self.c.len().max(o.c.len());
        UPoly::new((0..n).map(|i| f.sub(self.coeff(i), o.coeff(i))).collect())
    }

    pub fn neg(&self, f: &PrimeField) -> UPoly {
        UPoly {
            c: self.c.iter().map(|&x| f.neg(x)).collect(),
        }
    }

    pub fn scale(&self, f: &PrimeField, a: Fp) -> UPoly {
        UPoly::new(self.c.iter().map(|&x| f.mul(x, a)).collect())
    }

    pub fn mul(&self, f: &PrimeField, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut r = vec![f.zero(); self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                r[i + j] = f.add(r[i + j], f.mul(a, b));
            }
        }
        UPoly::new(r)
    }

    /// Euclidean division; panics on a zero divisor polynomial.
    pub fn divrem(&self, f: &PrimeField, d: &UPoly) -> (UPoly, UPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let Some(ds) = self.degree() else {
            return (UPoly::zero(), UPoly::zero());
        };
        if ds < dd {
            return (UPoly::zero(), self.clone());
        }
        let inv = f.inv(d.lc()).expect("nonzero leading coefficient");
        let mut r = self.c.clone();
        let mut q = vec![f.zero(); ds - dd + 1];
        for k in (0..=ds - dd).rev() {
            let t = f.mul(r[k + dd], inv);
            q[k] = t;
            if f.is_zero(t) {
                continue;
            }
            for (j, &dj) in d.c.iter().enumerate() {
                r[k + j] = f.sub(r[k + j], f.mul(t, dj));
            }
        }
        r.truncate(dd);
        (UPoly::new(q), UPoly::new(r))
    }

    pub fn rem(&self, f: &PrimeField, d: &UPoly) -> UPoly {
        if self.c.len() < d.c.len() {
            return self.clone();
        }
        self.divrem(f, d).1
    }

    /// Exact quotient; debug-asserts a zero remainder.
    pub fn div_exact(&self, f: &PrimeField, d: &UPoly) -> UPoly {
        let (q, r) = self.divrem(f, d);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn monic(&self, f: &PrimeField) -> UPoly {
        if self.is_zero() {
            return UPoly::zero();
        }
        self.scale(f, f.inv(self.lc()).expect("nonzero"))
    }

    pub fn derivative(&self, f: &PrimeField) -> UPoly {
        UPoly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &a)| f.mul(a, f.from_u64(i as u64)))
                .collect(),
        )
    }

    pub fn eval(&self, f: &PrimeField, x: Fp) -> Fp {
        self.c
            .iter()
            .rev()
            .fold(f.zero(), |acc, &a| f.add(f.mul(acc, x), a))
    }

    /// `self(g)` by Horner's rule.
    pub fn compose(&self, f: &PrimeField, g: &UPoly) -> UPoly {
        self.c.iter().rev().fold(UPoly::zero(), |acc, &a| {
            acc.mul(f, g).add(f, &UPoly::constant(a))
        })
    }

    pub fn pow_mod(&self, f: &PrimeField, mut e: u128, m: &UPoly) -> UPoly {
        let mut base = self.rem(f, m);
        let mut r = UPoly::one(f).rem(f, m);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(f, &base).rem(f, m);
            }
            base = base.mul(f, &base).rem(f, m);
            e >>= 1;
        }
        r
    }
}

/// Monic gcd; `gcd(0, 0) = 0`.
pub fn gcd(f: &PrimeField, a: &UPoly, b: &UPoly) -> UPoly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let r = a.rem(f, &b);
        a = b;
        b = r;
    }
    a.monic(f)
}

/// Returns `(g, s, t)` with `g` monic and `s·a + t·b = g`.
pub fn xgcd(f: &PrimeField, a: &UPoly, b: &UPoly) -> (UPoly, UPoly, UPoly) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (UPoly::one(f), UPoly::zero());
    let (mut t0, mut t1) = (UPoly::zero(), UPoly::one(f));
    while !r1.is_zero() {
        let (q, r) = r0.divrem(f, &r1);
        let s = s0.sub(f, &q.mul(f, &s1));
        let t = t0.sub(f, &q.mul(f, &t1));
        (r0, r1) = (r1, r);
        (s0, s1) = (s1, s);
        (t0, t1) = (t1, t);
    }
    if r0.is_zero() {
        return (r0, s0, t0);
    }
    let u = f.inv(r0.lc()).expect("nonzero");
    (r0.scale(f, u), s0.scale(f, u), t0.scale(f, u))
}

/// Inverse of `a` modulo the monic `m`: `Ok(None)` if `a ≡ 0`, and a
/// [`ZeroDivisor`] carrying `gcd(a, m)` when that gcd is nontrivial.
pub fn inv_mod(f: &PrimeField, a: &UPoly, m: &UPoly) -> Result<Option<UPoly>, ZeroDivisor> {
    let a = a.rem(f, m);
    if a.is_zero() {
        return Ok(None);
    }
    let (g, s, _) = xgcd(f, &a, m);
    if g.is_one(f) {
        Ok(Some(s.rem(f, m)))
    } else {
        Err(ZeroDivisor { factor: g })
    }
}

/// Product of the distinct monic irreducible factors, valid when the
/// characteristic exceeds the degree.
pub fn squarefree_part(f: &PrimeField, a: &UPoly) -> UPoly {
    assert!(!a.is_zero(), "squarefree part of zero");
    let g = gcd(f, a, &a.derivative(f));
    a.div_exact(f, &g).monic(f)
}

/// Combines residues modulo coprime `wa` and `wb` into residues modulo
/// `wa·wb`.
pub fn crt_pair(
    f: &PrimeField,
    wa: &UPoly,
    ra: &[UPoly],
    wb: &UPoly,
    rb: &[UPoly],
) -> Result<(UPoly, Vec<UPoly>)> {
    assert_eq!(ra.len(), rb.len());
    let (g, s, _) = xgcd(f, wa, wb);
    if !g.is_one(f) {
        return Err(Error::NotCoprime);
    }
    // s·wa ≡ 1 mod wb, so r = ra + wa·s·(rb − ra) mod wa·wb.
    let w = wa.mul(f, wb);
    let r = ra
        .iter()
        .zip(rb)
        .map(|(x, y)| {
            let d = y.sub(f, x).mul(f, &s).rem(f, wb);
            x.add(f, &wa.mul(f, &d)).rem(f, &w)
        })
        .collect();
    Ok((w, r))
}

/// `Π (Y − r)`.
pub fn from_roots(f: &PrimeField, roots: &[Fp]) -> UPoly {
    roots.iter().fold(UPoly::one(f), |acc, &r| {
        acc.mul(f, &UPoly::new(vec![f.neg(r), f.one()]))
    })
}

/// Lagrange interpolation at distinct nodes.
pub fn interpolate(f: &PrimeField, xs: &[Fp], ys: &[Fp]) -> UPoly {
    assert_eq!(xs.len(), ys.len());
    let w = from_roots(f, xs);
    let dw = w.derivative(f);
    let mut r = UPoly::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        let (q, _) = w.divrem(f, &UPoly::new(vec![f.neg(x), f.one()]));
        let c = f.div(y, dw.eval(f, x)).expect("distinct nodes");
        r = r.add(f, &q.scale(f, c));
    }
    r
}

/// Power sums `p_0..p_k` of the roots of the monic `w`, with multiplicity.
pub fn power_sums(f: &PrimeField, w: &UPoly, k: usize) -> Vec<Fp> {
    let d = w.degree().expect("nonzero");
    // Newton's identities: p_j = −(j·a_{d−j} + Σ_{i=1}^{j−1} a_{d−i} p_{j−i}).
    let a = |i: usize| if i <= d { w.coeff(d - i) } else { f.zero() };
    let mut p = vec![f.from_u64(d as u64)];
    for j in 1..=k {
        let mut s = if j <= d {
            f.mul(f.from_u64(j as u64), a(j))
        } else {
            f.zero()
        };
        for i in 1..j.min(d + 1) {
            s = f.add(s, f.mul(a(i), p[j - i]));
        }
        p.push(f.neg(s));
    }
    p
}

/// Monic polynomial of degree `d` whose roots have power sums
/// `ps[0..d] = (p_1, …, p_d)`, over any ring of characteristic `> d`.
/// Returns the coefficients low to high, leading one included.
pub fn coeffs_from_power_sums<R: Ring>(ring: &R, ps: &[R::Elem], d: usize) -> Vec<R::Elem> {
    assert!(ps.len() >= d);
    let f = ring.base();
    // k·e_k = Σ_{i=1}^{k} (−1)^{i−1} e_{k−i} p_i.
    let mut e = vec![ring.one()];
    for k in 1..=d {
        let mut s = ring.zero();
        for i in 1..=k {
            let t = ring.mul(&e[k - i], &ps[i - 1]);
            s = if i % 2 == 1 {
                ring.add(&s, &t)
            } else {
                ring.sub(&s, &t)
            };
        }
        let inv_k = f.inv(f.from_u64(k as u64)).expect("characteristic exceeds degree");
        e.push(ring.scale(inv_k, &s));
    }
    // Coefficient of Y^{d−k} is (−1)^k e_k.
    (0..=d)
        .map(|j| {
            let k = d - j;
            if k % 2 == 0 {
                e[k].clone()
            } else {
                ring.neg(&e[k])
            }
        })
        .collect()
}

pub fn poly_from_power_sums(f: &PrimeField, ps: &[Fp], d: usize) -> UPoly {
    UPoly::new(coeffs_from_power_sums(f, ps, d))
}

/// Distinct roots in the prime field, sorted by canonical value.
pub fn roots<R: Rng + ?Sized>(f: &PrimeField, a: &UPoly, rng: &mut R) -> Vec<Fp> {
    if a.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let a = a.monic(f);
    let x = UPoly::var(f);
    let xp = x.pow_mod(f, f.prime() as u128, &a);
    let lin = gcd(f, &a, &xp.sub(f, &x));
    let mut out = Vec::new();
    split_linear(f, &lin, rng, &mut out);
    out.sort_by_key(|&r| f.to_u64(r));
    out
}

fn split_linear<R: Rng + ?Sized>(f: &PrimeField, a: &UPoly, rng: &mut R, out: &mut Vec<Fp>) {
    match a.degree() {
        None | Some(0) => {}
        Some(1) => out.push(f.neg(f.mul(a.coeff(0), f.inv(a.lc()).unwrap()))),
        Some(_) => loop {
            // Equal-degree splitting with gcd(a, (Y + r)^((p−1)/2) − 1).
            let shift = UPoly::new(vec![f.random(rng), f.one()]);
            let h = shift
                .pow_mod(f, (f.prime() as u128 - 1) / 2, a)
                .sub(f, &UPoly::one(f));
            let g = gcd(f, a, &h);
            let dg = g.degree().unwrap_or(0);
            if dg > 0 && dg < a.degree().unwrap() {
                split_linear(f, &g, rng, out);
                split_linear(f, &a.div_exact(f, &g), rng, out);
                break;
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::RngKey;
    use proptest::prelude::*;
    use proptest::test_runner::RngSeed;

    fn f() -> PrimeField {
        PrimeField::new(1009).unwrap()
    }

    fn p(f: &PrimeField, c: &[i64]) -> UPoly {
        UPoly::from_i64s(f, c)
    }

    #[test]
    fn gcd_examples() {
        let f = f();
        assert_eq!(gcd(&f, &p(&f, &[-1, 0, 1]), &p(&f, &[-1, 1])), p(&f, &[-1, 1]));
        assert!(gcd(&f, &UPoly::var(&f), &UPoly::one(&f)).is_one(&f));
        let a = from_roots(&f, &[f.from_u64(2), f.from_u64(2), f.from_u64(3)]);
        let b = from_roots(&f, &[f.from_u64(2), f.from_u64(5)]);
        assert_eq!(gcd(&f, &a, &b), p(&f, &[-2, 1]));
    }

    #[test]
    fn squarefree_examples() {
        let f = PrimeField::new(1019).unwrap(); // 1019 ≡ 3 mod 4
        assert_eq!(squarefree_part(&f, &p(&f, &[1, -2, 1])), p(&f, &[-1, 1]));
        assert_eq!(squarefree_part(&f, &p(&f, &[1, 0, 1])), p(&f, &[1, 0, 1]));
        assert_eq!(squarefree_part(&f, &p(&f, &[0, 0, 0, 1])), UPoly::var(&f));
        assert_eq!(squarefree_part(&f, &p(&f, &[0, 0, 0, 3])), UPoly::var(&f));
    }

    #[test]
    fn crt_examples() {
        let f = f();
        let (w, r) = crt_pair(&f, &p(&f, &[-1, 1]), &[p(&f, &[1])], &p(&f, &[-2, 1]), &[p(&f, &[2])]).unwrap();
        assert_eq!(w, p(&f, &[2, -3, 1]));
        assert_eq!(r, vec![UPoly::var(&f)]);
        let a = p(&f, &[5, 7, 1]);
        let (w, r) = crt_pair(&f, &a, &[p(&f, &[3, 4])], &UPoly::one(&f), &[UPoly::zero()]).unwrap();
        assert_eq!((w, r), (a, vec![p(&f, &[3, 4])]));
        // Three-way fold agrees with interpolation through the nodes.
        let nodes = [1u64, 2, 3].map(|x| f.from_u64(x));
        let vals = [10u64, 20, 50].map(|x| f.from_u64(x));
        let mut acc = (UPoly::one(&f), vec![UPoly::zero()]);
        for (&x, &y) in nodes.iter().zip(&vals) {
            acc = crt_pair(&f, &acc.0, &acc.1, &p(&f, &[-(f.to_i64(x)), 1]), &[UPoly::constant(y)]).unwrap();
        }
        assert_eq!(acc.1[0], interpolate(&f, &nodes, &vals));
        assert!(matches!(
            crt_pair(&f, &p(&f, &[-1, 1]), &[UPoly::zero()], &p(&f, &[1, -2, 1]), &[UPoly::zero()]),
            Err(Error::NotCoprime)
        ));
    }

    #[test]
    fn power_sum_examples() {
        let f = f();
        assert_eq!(poly_from_power_sums(&f, &[f.from_u64(5)], 1), p(&f, &[-5, 1]));
        assert_eq!(poly_from_power_sums(&f, &[f.from_u64(3), f.from_u64(5)], 2), p(&f, &[2, -3, 1]));
        assert_eq!(poly_from_power_sums(&f, &[f.zero(), f.zero()], 2), p(&f, &[0, 0, 1]));
    }

    #[test]
    fn roots_of_split_and_irreducible() {
        let f = f();
        let mut rng = RngKey::new(1).rng();
        let rs: Vec<Fp> = [0u64, 3, 17, 1008].iter().map(|&x| f.from_u64(x)).collect();
        let mut a = from_roots(&f, &rs);
        a = a.mul(&f, &p(&f, &[11, 0, 1])); // −11 is a non-residue mod 1009
        a = a.mul(&f, &p(&f, &[-3, 1]));
        assert_eq!(roots(&f, &a, &mut rng), rs);
    }

    #[test]
    fn inv_mod_reports_factor() {
        let f = f();
        let w = p(&f, &[-1, 0, 1]);
        let err = inv_mod(&f, &p(&f, &[-1, 1]), &w).unwrap_err();
        assert_eq!(err.factor, p(&f, &[-1, 1]));
        let inv = inv_mod(&f, &p(&f, &[2, 1]), &w).unwrap().unwrap();
        assert!(inv.mul(&f, &p(&f, &[2, 1])).rem(&f, &w).is_one(&f));
        assert_eq!(inv_mod(&f, &w, &w).unwrap(), None);
    }

    fn config() -> ProptestConfig {
        ProptestConfig {
            cases: 1000,
            rng_seed: RngSeed::Fixed(0x0f01),
            failure_persistence: None,
            ..ProptestConfig::default()
        }
    }

    fn poly(max_len: usize) -> impl Strategy<Value = Vec<u64>> {
        prop::collection::vec(0u64..1009, 0..max_len)
    }

    proptest! {
        #![proptest_config(config())]

        #[test]
        fn crt_then_reduce_is_identity(a in poly(6), b in poly(6), ra in poly(6), rb in poly(6)) {
            let f = f();
            let mk = |v: &[u64]| UPoly::new(v.iter().map(|&x| f.from_u64(x)).collect());
            let (wa, wb) = (mk(&a).monic(&f), mk(&b).monic(&f));
            prop_assume!(!wa.is_zero() && !wb.is_zero() && gcd(&f, &wa, &wb).is_one(&f));
            let (ra, rb) = (mk(&ra).rem(&f, &wa), mk(&rb).rem(&f, &wb));
            let (w, r) = crt_pair(&f, &wa, &[ra.clone()], &wb, &[rb.clone()]).unwrap();
            prop_assert_eq!(w, wa.mul(&f, &wb));
            prop_assert_eq!(r[0].rem(&f, &wa), ra);
            prop_assert_eq!(r[0].rem(&f, &wb), rb);
        }

        #[test]
        fn power_sums_roundtrip(rs in prop::collection::vec(0u64..1009, 1..=10)) {
            let f = f();
            let rs: Vec<Fp> = rs.iter().map(|&x| f.from_u64(x)).collect();
            let w = from_roots(&f, &rs);
            let d = rs.len();
            let ps: Vec<Fp> = (1..=d)
                .map(|k| rs.iter().fold(f.zero(), |s, &r| f.add(s, f.pow(r, k as u64))))
                .collect();
            prop_assert_eq!(&power_sums(&f, &w, d)[1..], &ps[..]);
            prop_assert_eq!(poly_from_power_sums(&f, &ps, d), w);
        }

        #[test]
        fn divrem_and_xgcd(a in poly(8), b in poly(8)) {
            let f = f();
            let mk = |v: &[u64]| UPoly::new(v.iter().map(|&x| f.from_u64(x)).collect());
            let (a, b) = (mk(&a), mk(&b));
            prop_assume!(!b.is_zero());
            let (q, r) = a.divrem(&f, &b);
            prop_assert_eq!(q.mul(&f, &b).add(&f, &r), a.clone());
            prop_assert!(r.degree().map_or(true, |d| d < b.degree().unwrap()));
            let (g, s, t) = xgcd(&f, &a, &b);
            prop_assert_eq!(s.mul(&f, &a).add(&f, &t.mul(&f, &b)), g.clone());
            prop_assert!(a.rem(&f, &g).is_zero() && b.rem(&f, &g).is_zero());
        }
    }
}
