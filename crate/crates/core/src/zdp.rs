//! Zero-dimensional parametrizations `(w, v_1..v_n, λ)`.
//!
//! The encoded points are `(v_1(τ)/w′(τ), …, v_n(τ)/w′(τ))` for the roots
//! `τ` of the squarefree monic `w`, and `Σ λ_i v_i ≡ Y·w′ mod w` says that
//! `λ` takes the value `τ` at the point attached to `τ`.

use crate::error::{Error, Result};
use crate::field::{Fp, PrimeField, RngKey};
use crate::quotient::QuotientRing;
use crate::ring::Ring;
use crate::slp::Slp;
use crate::upoly::{self, UPoly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroDimParam {
    pub w: UPoly,
    pub v: Vec<UPoly>,
    pub lambda: Vec<Fp>,
}

impl ZeroDimParam {
    /// Validates the invariants; any violation is reported as [`Error::Degenerate`].
    pub fn new(f: &PrimeField, w: UPoly, v: Vec<UPoly>, lambda: Vec<Fp>) -> Result<ZeroDimParam> {
        let r = ZeroDimParam { w, v, lambda };
        if r.is_valid(f) {
            Ok(r)
        } else {
            Err(Error::Degenerate)
        }
    }

    /// The empty set in `n` variables.
    pub fn empty(f: &PrimeField, lambda: Vec<Fp>) -> ZeroDimParam {
        ZeroDimParam {
            w: UPoly::one(f),
            v: vec![UPoly::zero(); lambda.len()],
            lambda,
        }
    }

    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    /// Number of points (over an algebraic closure).
    pub fn degree(&self) -> usize {
        self.w.degree().expect("w is nonzero")
    }

    pub fn is_empty(&self) -> bool {
        self.degree() == 0
    }

    pub fn is_valid(&self, f: &PrimeField) -> bool {
        let Some(d) = self.w.degree() else {
            return false;
        };
        if !f.is_one(self.w.lc()) || self.v.len() != self.lambda.len() {
            return false;
        }
        if self.v.iter().any(|v| v.degree().is_some_and(|dv| dv >= d)) {
            return false;
        }
        if d == 0 {
            return self.v.iter().all(|v| v.is_zero());
        }
        let dw = self.w.derivative(f);
        if !upoly::gcd(f, &self.w, &dw).is_one(f) {
            return false;
        }
        let lhs = self
            .v
            .iter()
            .zip(&self.lambda)
            .fold(UPoly::zero(), |s, (v, &l)| s.add(f, &v.scale(f, l)));
        let rhs = UPoly::var(f).mul(f, &dw).rem(f, &self.w);
        lhs == rhs
    }

    /// Parametrization of distinct points; `λ` must separate them.
    pub fn from_points(f: &PrimeField, points: &[Vec<Fp>], lambda: Vec<Fp>) -> Result<ZeroDimParam> {
        let n = lambda.len();
        assert!(points.iter().all(|p| p.len() == n));
        let nodes: Vec<Fp> = points.iter().map(|p| dot(f, &lambda, p)).collect();
        let mut sorted: Vec<u64> = nodes.iter().map(|&x| f.to_u64(x)).collect();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::NotSeparating);
        }
        let w = upoly::from_roots(f, &nodes);
        let dw = w.derivative(f);
        let v = (0..n)
            .map(|i| {
                let ys: Vec<Fp> = points
                    .iter()
                    .zip(&nodes)
                    .map(|(p, &t)| f.mul(p[i], dw.eval(f, t)))
                    .collect();
                upoly::interpolate(f, &nodes, &ys)
            })
            .collect();
        ZeroDimParam::new(f, w, v, lambda)
    }

    /// Coordinates `v_i / w′` as elements of `K[Y]/<w>`; requires `deg w > 0`.
    pub fn coordinates(&self, f: &PrimeField) -> Result<Vec<UPoly>> {
        let q = QuotientRing::new(f, self.w.clone());
        let inv = q.inv(&self.w.derivative(f))?;
        Ok(self.v.iter().map(|v| q.mul(v, &inv)).collect())
    }

    /// Outputs of `system` at the points, reduced modulo `w`.
    pub fn residual(&self, f: &PrimeField, system: &Slp) -> Result<Vec<UPoly>> {
        assert_eq!(system.n_inputs(), self.n());
        if self.is_empty() {
            return Ok(vec![UPoly::zero(); system.n_outputs()]);
        }
        let q = QuotientRing::new(f, self.w.clone());
        Ok(system.eval(&q, &self.coordinates(f)?))
    }

    pub fn residual_is_zero(&self, f: &PrimeField, system: &Slp) -> Result<bool> {
        Ok(self.residual(f, system)?.iter().all(|r| r.is_zero()))
    }

    /// Splits along `gcd(w, g)`: parts on `w/d` and on `d`, or `[self]`
    /// when the gcd is trivial.
    pub fn split(&self, f: &PrimeField, g: &UPoly) -> Vec<ZeroDimParam> {
        let d = upoly::gcd(f, &self.w, g);
        if d.degree().unwrap_or(0) == 0 || d.degree() == self.w.degree() {
            return vec![self.clone()];
        }
        let s = self.w.div_exact(f, &d);
        let part = |r: &UPoly, other: &UPoly| {
            let q = QuotientRing::new(f, r.clone());
            let inv = q.inv(other).expect("coprime parts of a squarefree polynomial");
            let v = self.v.iter().map(|v| q.mul(&q.reduce(v), &inv)).collect();
            let z = ZeroDimParam {
                w: r.clone(),
                v,
                lambda: self.lambda.clone(),
            };
            debug_assert!(z.is_valid(f));
            z
        };
        vec![part(&s, &d), part(&d, &s)]
    }

    /// Disjoint union of parametrizations sharing `λ`.
    pub fn crt_combine(f: &PrimeField, rs: &[ZeroDimParam]) -> Result<ZeroDimParam> {
        let first = rs.first().expect("at least one parametrization");
        if rs.iter().any(|r| r.lambda != first.lambda) {
            return Err(Error::LambdaMismatch);
        }
        let mut acc = ZeroDimParam::empty(f, first.lambda.clone());
        for r in rs.iter().filter(|r| !r.is_empty()) {
            if acc.is_empty() {
                acc = r.clone();
                continue;
            }
            // At a root of w_a, (w_a w_b)′ = w_a′ w_b, so v ≡ v_a·w_b there.
            let ra: Vec<UPoly> = acc.v.iter().map(|v| v.mul(f, &r.w).rem(f, &acc.w)).collect();
            let rb: Vec<UPoly> = r.v.iter().map(|v| v.mul(f, &acc.w).rem(f, &r.w)).collect();
            let (w, v) = upoly::crt_pair(f, &acc.w, &ra, &r.w, &rb)?;
            acc = ZeroDimParam {
                w,
                v,
                lambda: acc.lambda,
            };
        }
        if !acc.is_valid(f) {
            return Err(Error::Degenerate);
        }
        Ok(acc)
    }

    /// Re-encodes the points of `K[Y]/<w>` whose coordinates are `coords`,
    /// with a new linear form, through trace formulas.
    pub fn from_coordinates(f: &PrimeField, w: &UPoly, coords: &[UPoly], lambda: Vec<Fp>) -> Result<ZeroDimParam> {
        assert_eq!(coords.len(), lambda.len());
        let d = w.degree().expect("nonzero");
        if d == 0 {
            return Ok(ZeroDimParam::empty(f, lambda));
        }
        let q = QuotientRing::new(f, w.clone());
        let ps = upoly::power_sums(f, w, d);
        let big_l = coords
            .iter()
            .zip(&lambda)
            .fold(UPoly::zero(), |s, (x, &l)| s.add(f, &x.scale(f, l)));
        let mut pow = q.one();
        let mut lam_tr = Vec::with_capacity(d + 1);
        let mut coord_tr = vec![Vec::with_capacity(d); coords.len()];
        for k in 0..=d {
            lam_tr.push(q.trace(&pow, &ps));
            if k < d {
                for (i, x) in coords.iter().enumerate() {
                    coord_tr[i].push(q.trace(&q.mul(x, &pow), &ps));
                }
            }
            pow = q.mul(&pow, &big_l);
        }
        let (wc, vc) = param_from_traces(f, d, &lam_tr, &coord_tr);
        let new_w = UPoly::new(wc);
        if !upoly::gcd(f, &new_w, &new_w.derivative(f)).is_one(f) {
            return Err(Error::NotSeparating);
        }
        let v = vc.into_iter().map(UPoly::new).collect();
        ZeroDimParam::new(f, new_w, v, lambda)
    }

    /// Points with coordinates in the prime field, sorted.
    pub fn rational_points(&self, f: &PrimeField) -> Result<Vec<Vec<Fp>>> {
        let mut rng = RngKey::new(0x00c0_ffee).rng();
        let dw = self.w.derivative(f);
        let mut pts = Vec::new();
        for t in upoly::roots(f, &self.w, &mut rng) {
            let inv = f.inv(dw.eval(f, t))?;
            pts.push(self.v.iter().map(|v| f.mul(v.eval(f, t), inv)).collect::<Vec<_>>());
        }
        pts.sort_by_key(|p| p.iter().map(|&x| f.to_u64(x)).collect::<Vec<_>>());
        Ok(pts)
    }

    /// Number of roots of `w` outside the prime field.
    pub fn irrational_count(&self, f: &PrimeField) -> usize {
        let mut rng = RngKey::new(0x00c0_ffee).rng();
        self.degree() - upoly::roots(f, &self.w, &mut rng).len()
    }
}

pub fn dot(f: &PrimeField, a: &[Fp], b: &[Fp]) -> Fp {
    a.iter().zip(b).fold(f.zero(), |s, (&x, &y)| f.add(s, f.mul(x, y)))
}

/// Rebuilds `w` and the `v_i` from traces over any coefficient ring of
/// characteristic above `d`.
///
/// `lam_tr[k] = Tr(Λ^k)` for `k = 0..=d`, and `coord_tr[i][k] = Tr(X_i Λ^k)`
/// for `k < d`. Returns coefficient vectors low to high (`w` monic of degree
/// `d`, each `v_i` of length `d`), using
/// `v_i = Σ_j Y^j Σ_{l>j} a_l Tr(X_i Λ^{l−j−1})` for `w = Σ a_l Y^l`.
pub fn param_from_traces<R: Ring>(
    ring: &R,
    d: usize,
    lam_tr: &[R::Elem],
    coord_tr: &[Vec<R::Elem>],
) -> (Vec<R::Elem>, Vec<Vec<R::Elem>>) {
    let w = upoly::coeffs_from_power_sums(ring, &lam_tr[1..], d);
    let v = coord_tr
        .iter()
        .map(|tr| {
            (0..d)
                .map(|j| {
                    (j + 1..=d).fold(ring.zero(), |s, l| ring.add(&s, &ring.mul(&w[l], &tr[l - j - 1])))
                })
                .collect()
        })
        .collect();
    (w, v)
}

/// Runs `op` on `r`, splitting along every zero divisor it reports and
/// replaying on both parts. Returns the final parts with their results.
pub fn dynamic_eval<T>(
    f: &PrimeField,
    r: ZeroDimParam,
    mut op: impl FnMut(&ZeroDimParam) -> Result<T>,
) -> Result<Vec<(ZeroDimParam, T)>> {
    let mut work = vec![r];
    let mut done = Vec::new();
    while let Some(r) = work.pop() {
        match op(&r) {
            Ok(t) => done.push((r, t)),
            Err(Error::ZeroDivisor(z)) => {
                let parts = r.split(f, &z.factor);
                if parts.len() < 2 {
                    return Err(Error::ZeroDivisor(z));
                }
                work.extend(parts.into_iter().rev());
            }
            Err(e) => return Err(e),
        }
    }
    Ok(done)
}
