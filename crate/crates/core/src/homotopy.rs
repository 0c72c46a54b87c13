//! Symbolic homotopy continuation from `B(0, X)` to `B(1, X)`.
//!
//! The start points are lifted to power series in `T` over the product of
//! fields `K[Y]/<w_0>` by Newton iteration, re-encoded as a parametrization
//! over `K(T)` through traces and rational reconstruction, and specialized
//! at `T = 1`. A final filter keeps the isolated (or the simple) points.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::field::{Fp, PrimeField};
use crate::linalg::{inverse, rank, rref, Matrix};
use crate::localdim;
use crate::quotient::QuotientRing;
use crate::ring::Ring;
use crate::series::{pade, SeriesRing};
use crate::slp::Slp;
use crate::upoly::{self, UPoly};
use crate::zdp::{dynamic_eval, param_from_traces, ZeroDimParam};

/// `B(T, X)` with `T` as input 0, the solved start fibre `R0`, the
/// multiplicity bound `c` and the curve degree bound `e`.
#[derive(Clone, Debug)]
pub struct HomotopyInstance {
    pub b: Slp,
    pub r0: ZeroDimParam,
    pub c: usize,
    pub e: usize,
}

impl HomotopyInstance {
    pub fn new(f: &PrimeField, b: Slp, r0: ZeroDimParam, c: usize, e: usize) -> Result<HomotopyInstance> {
        let n = r0.n();
        assert_eq!(b.n_inputs(), n + 1, "homotopy takes T and the n unknowns");
        assert!(b.n_outputs() >= n, "fewer equations than unknowns");
        assert!(e >= 1);
        let inst = HomotopyInstance { b, r0, c, e };
        if !inst.r0.residual_is_zero(f, &inst.at(f, f.zero()))? {
            return Err(Error::ResidualNonzero);
        }
        Ok(inst)
    }

    pub fn n(&self) -> usize {
        self.r0.n()
    }

    pub fn m(&self) -> usize {
        self.b.n_outputs()
    }

    /// The fibre `B(t, X)` as a program in `X` alone.
    pub fn at(&self, f: &PrimeField, t: Fp) -> Slp {
        Slp::build(f, self.n(), |b, xs| {
            let mut pt = vec![b.constant(t)];
            pt.extend_from_slice(xs);
            self.b.eval(b, &pt)
        })
    }

    /// Series precision needed to reconstruct fractions of degree `e`.
    pub fn precision(&self) -> usize {
        2 * self.e + 1
    }
}

/// A piece of `R0` together with `n` equations whose Jacobian in `X` is
/// invertible at all of its points.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub equations: Vec<usize>,
    pub param: ZeroDimParam,
}

/// Coordinates of the points of a branch as series in `T` with
/// coefficients in `K[Y]/<w_branch>`: `coords[i][k]` is the `T^k` term.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftedBranch {
    pub equations: Vec<usize>,
    pub param: ZeroDimParam,
    pub prec: usize,
    pub coords: Vec<Vec<UPoly>>,
}

/// A parametrization whose coefficients are fractions in `T`, each stored
/// as `(num, den)` with `den(0) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalParam {
    pub lambda: Vec<Fp>,
    /// Coefficients of `Y^0, …, Y^d`; the last is `(1, 1)`.
    pub w: Vec<(UPoly, UPoly)>,
    /// Coefficients of `Y^0, …, Y^{d−1}` per coordinate.
    pub v: Vec<Vec<(UPoly, UPoly)>>,
}

impl RationalParam {
    pub fn degree(&self) -> usize {
        self.w.len() - 1
    }

    /// Specialization at `T = 0`, where every denominator is one.
    pub fn at_zero(&self) -> (UPoly, Vec<UPoly>) {
        let w = UPoly::new(self.w.iter().map(|(a, _)| a.coeff(0)).collect());
        let v = self
            .v
            .iter()
            .map(|vi| UPoly::new(vi.iter().map(|(a, _)| a.coeff(0)).collect()))
            .collect();
        (w, v)
    }
}

fn jacobian_matrix<E: Clone>(vals: &[E], m: usize, n: usize, rows: &[usize], inputs: usize, skip: usize) -> Matrix<E> {
    Matrix::from_rows(
        rows.iter()
            .map(|&r| (0..n).map(|i| vals[m + r * inputs + skip + i].clone()).collect())
            .collect(),
    )
}

/// Splits `R0` into branches, each with an invertible `n×n` Jacobian minor
/// of `B(0, X)`.
pub fn decompose(f: &PrimeField, inst: &HomotopyInstance) -> Result<Vec<Branch>> {
    if inst.r0.is_empty() {
        return Ok(Vec::new());
    }
    let (n, m) = (inst.n(), inst.m());
    let jac = inst.at(f, f.zero()).jacobian(f);
    let all: Vec<usize> = (0..m).collect();
    let parts = dynamic_eval(f, inst.r0.clone(), |r| {
        let q = QuotientRing::new(f, r.w.clone());
        let vals = jac.eval(&q, &r.coordinates(f)?);
        let mut jt = jacobian_matrix(&vals, m, n, &all, n, 0).transpose();
        let pivots = rref(&q, &mut jt)?;
        if pivots.len() < n {
            return Err(Error::NoInvertibleMinor);
        }
        Ok(pivots)
    })?;
    Ok(parts
        .into_iter()
        .map(|(param, equations)| Branch { equations, param })
        .collect())
}

/// Newton iteration with precision doubling, then a check that every
/// output of `B` vanishes modulo `(T^prec, w)`.
pub fn lift(f: &PrimeField, inst: &HomotopyInstance, branch: &Branch, prec: usize) -> Result<LiftedBranch> {
    let sel_jac = inst.b.select_outputs(&branch.equations).jacobian(f);
    lift_with(f, inst, branch, prec, &sel_jac)
}

fn lift_with(f: &PrimeField, inst: &HomotopyInstance, branch: &Branch, prec: usize, sel_jac: &Slp) -> Result<LiftedBranch> {
    let n = inst.n();
    let rows: Vec<usize> = (0..n).collect();
    let a = QuotientRing::new(f, branch.param.w.clone());
    let mut x: Vec<Vec<UPoly>> = branch.param.coordinates(f)?.into_iter().map(|c| vec![c]).collect();

    let point = |s: &SeriesRing<QuotientRing>, x: &[Vec<UPoly>]| {
        let mut pt = vec![s.t()];
        pt.extend(x.iter().map(|c| s.coerce(c.clone())));
        pt
    };
    let s1 = SeriesRing::new(a.clone(), 1);
    let vals = sel_jac.eval(&s1, &point(&s1, &x));
    let j0 = jacobian_matrix(&vals, n, n, &rows, n + 1, 1);
    let j0 = Matrix {
        rows: n,
        cols: n,
        data: j0.data.into_iter().map(|s| s[0].clone()).collect(),
    };
    let z0 = inverse(&a, &j0)?.ok_or(Error::NoInvertibleMinor)?;
    let mut z = Matrix {
        rows: n,
        cols: n,
        data: z0.data.into_iter().map(|e| vec![e]).collect(),
    };

    // Invariant: x is exact mod T^c and z inverts J(x) mod T^{c/2}.
    let mut c = 1;
    while c < prec {
        let p = (2 * c).min(prec);
        let s = SeriesRing::new(a.clone(), p);
        let pt = point(&s, &x);
        z.data = z.data.into_iter().map(|e| s.coerce(e)).collect();
        let vals = sel_jac.eval(&s, &pt);
        let j = jacobian_matrix(&vals, n, n, &rows, n + 1, 1);
        let mut resid = Matrix::identity(&s, n);
        let jz = j.mul(&s, &z);
        for (r, v) in resid.data.iter_mut().zip(&jz.data) {
            *r = s.sub(r, v);
        }
        let corr = z.mul(&s, &resid);
        for (zi, ci) in z.data.iter_mut().zip(&corr.data) {
            *zi = s.add(zi, ci);
        }
        let step = z.mul_vec(&s, &vals[..n]);
        x = pt[1..].iter().zip(&step).map(|(xi, d)| s.sub(xi, d)).collect();
        c = p;
    }

    let s = SeriesRing::new(a, prec);
    let out = inst.b.eval(&s, &point(&s, &x));
    if out.iter().any(|o| !s.is_zero(o)) {
        return Err(Error::ResidualNonzero);
    }
    Ok(LiftedBranch {
        equations: branch.equations.clone(),
        param: branch.param.clone(),
        prec,
        coords: x.into_iter().map(|c| s.coerce(c)).collect(),
    })
}

/// Decomposes and lifts all of `R0`, splitting wherever a zero divisor
/// appears.
pub fn lift_all(f: &PrimeField, inst: &HomotopyInstance, prec: usize) -> Result<Vec<LiftedBranch>> {
    if inst.r0.is_empty() {
        return Ok(Vec::new());
    }
    let mut sel_jacs: HashMap<Vec<usize>, Slp> = HashMap::new();
    let mut out = Vec::new();
    for br in decompose(f, inst)? {
        let parts = dynamic_eval(f, br.param, |r| {
            let branch = Branch {
                equations: br.equations.clone(),
                param: r.clone(),
            };
            let sj = sel_jacs
                .entry(br.equations.clone())
                .or_insert_with(|| inst.b.select_outputs(&br.equations).jacobian(f));
            lift_with(f, inst, &branch, prec, sj)
        })?;
        out.extend(parts.into_iter().map(|(_, l)| l));
    }
    Ok(out)
}

/// Rebuilds `w(T, Y)` and the `v_i(T, Y)` from the lifted branches and
/// reconstructs each coefficient as a fraction with numerator and
/// denominator of degree at most `e`.
pub fn reconstruct(f: &PrimeField, lambda: &[Fp], branches: &[LiftedBranch], e: usize) -> Result<RationalParam> {
    let n = lambda.len();
    let d: usize = branches.iter().map(|b| b.param.degree()).sum();
    let one = (UPoly::one(f), UPoly::one(f));
    if d == 0 {
        return Ok(RationalParam {
            lambda: lambda.to_vec(),
            w: vec![one],
            v: vec![Vec::new(); n],
        });
    }
    let prec = 2 * e + 1;
    let sf = SeriesRing::new(f.clone(), prec);
    let mut lam_tr = vec![sf.zero(); d + 1];
    let mut coord_tr = vec![vec![sf.zero(); d]; n];
    for br in branches {
        assert!(br.prec >= prec, "branch lifted to insufficient precision");
        let q = QuotientRing::new(f, br.param.w.clone());
        let ps = upoly::power_sums(f, &br.param.w, br.param.degree());
        let s = SeriesRing::new(q.clone(), prec);
        let tr = |a: &Vec<UPoly>| -> Vec<Fp> { a.iter().map(|c| q.trace(c, &ps)).collect() };
        let x: Vec<Vec<UPoly>> = br.coords.iter().map(|c| s.coerce(c.clone())).collect();
        let big_l = x
            .iter()
            .zip(lambda)
            .fold(s.zero(), |acc, (xi, &l)| s.add(&acc, &s.scale(l, xi)));
        let mut pow = s.one();
        for k in 0..=d {
            lam_tr[k] = sf.add(&lam_tr[k], &tr(&pow));
            if k < d {
                for (i, xi) in x.iter().enumerate() {
                    coord_tr[i][k] = sf.add(&coord_tr[i][k], &tr(&s.mul(xi, &pow)));
                }
                pow = s.mul(&pow, &big_l);
            }
        }
    }
    let (wc, vc) = param_from_traces(&sf, d, &lam_tr, &coord_tr);
    let frac = |s: &Vec<Fp>| pade(f, s, prec, e);
    let w = wc.iter().map(frac).collect::<Result<Vec<_>>>()?;
    let v = vc
        .iter()
        .map(|vi| vi.iter().map(frac).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(RationalParam {
        lambda: lambda.to_vec(),
        w,
        v,
    })
}

fn lcm(f: &PrimeField, a: &UPoly, b: &UPoly) -> UPoly {
    a.mul(f, &b.div_exact(f, &upoly::gcd(f, a, b)))
}

/// Exponent of `(T − 1)` in a nonzero polynomial.
fn order_at_one(f: &PrimeField, p: &UPoly, t1: &UPoly) -> usize {
    let mut k = 0;
    let mut p = p.clone();
    loop {
        let (q, r) = p.divrem(f, t1);
        if !r.is_zero() {
            return k;
        }
        p = q;
        k += 1;
    }
}

/// The finite limits at `T = 1` of the solution paths encoded by `param`.
pub fn limit_at_one(f: &PrimeField, param: &RationalParam) -> Result<ZeroDimParam> {
    let lambda = param.lambda.clone();
    let d = param.degree();
    if d == 0 {
        return Ok(ZeroDimParam::empty(f, lambda));
    }
    let den = param
        .w
        .iter()
        .chain(param.v.iter().flatten())
        .fold(UPoly::one(f), |acc, (_, b)| lcm(f, &acc, b));
    let scaled = |(a, b): &(UPoly, UPoly)| a.mul(f, &den.div_exact(f, b));
    let big_w: Vec<UPoly> = param.w.iter().map(scaled).collect();
    let big_v: Vec<Vec<UPoly>> = param.v.iter().map(|vi| vi.iter().map(scaled).collect()).collect();

    // Strip the common power of (T − 1) so that W(1, Y) is not identically zero.
    let t1 = UPoly::from_i64s(f, &[-1, 1]);
    let k = big_w
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| order_at_one(f, c, &t1))
        .min()
        .expect("leading coefficient is nonzero");
    let tk = (0..k).fold(UPoly::one(f), |acc, _| acc.mul(f, &t1));
    let at_one = |c: &UPoly| -> Result<Fp> {
        let (q, r) = c.divrem(f, &tk);
        if !r.is_zero() {
            return Err(Error::Degenerate);
        }
        Ok(q.eval(f, f.one()))
    };
    let w1 = UPoly::new(big_w.iter().map(at_one).collect::<Result<Vec<_>>>()?);
    let v1: Vec<UPoly> = big_v
        .iter()
        .map(|vi| Ok(UPoly::new(vi.iter().map(at_one).collect::<Result<Vec<_>>>()?)))
        .collect::<Result<Vec<_>>>()?;
    if w1.degree().unwrap_or(0) == 0 {
        return Ok(ZeroDimParam::empty(f, lambda));
    }

    // Paths sharing a limit give repeated roots; the v's carry matching
    // multiplicities, which the common factor g absorbs.
    let dw1 = w1.derivative(f);
    let g = upoly::gcd(f, &w1, &dw1);
    let w_red = w1.div_exact(f, &g).monic(f);
    let dg = dw1.div_exact(f, &g);
    let q = QuotientRing::new(f, w_red.clone());
    let inv = match q.inv(&q.reduce(&dg)) {
        Ok(i) => i,
        Err(_) => return Err(Error::Degenerate),
    };
    let factor = q.mul(&inv, &w_red.derivative(f));
    let mut v = Vec::with_capacity(v1.len());
    for vi in &v1 {
        let (quot, r) = vi.divrem(f, &g);
        if !r.is_zero() {
            return Err(Error::Degenerate);
        }
        v.push(q.mul(&q.reduce(&quot), &factor));
    }
    ZeroDimParam::new(f, w_red, v, lambda)
}

/// Which points of `V(B_1)` to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Filter {
    Isolated,
    Simple,
}

/// The limit points at `T = 1`, unfiltered.
pub fn endpoints(f: &PrimeField, inst: &HomotopyInstance) -> Result<ZeroDimParam> {
    let lifted = lift_all(f, inst, inst.precision())?;
    let rp = reconstruct(f, &inst.r0.lambda, &lifted, inst.e)?;
    let r1 = limit_at_one(f, &rp)?;
    if r1.degree() > inst.c.max(inst.r0.degree()) {
        return Err(Error::Degenerate);
    }
    Ok(r1)
}

/// Keeps the points of `r` that pass `filter` for `system`, splitting
/// `r` along zero divisors as needed.
pub fn filter_points(f: &PrimeField, r: &ZeroDimParam, system: &Slp, filter: Filter, mu: usize) -> Result<ZeroDimParam> {
    if r.is_empty() {
        return Ok(r.clone());
    }
    let n = r.n();
    let m = system.n_outputs();
    let jac = system.jacobian(f);
    let all: Vec<usize> = (0..m).collect();
    let parts = dynamic_eval(f, r.clone(), |r| {
        let q = QuotientRing::new(f, r.w.clone());
        let coords = r.coordinates(f)?;
        match filter {
            Filter::Isolated => localdim::is_isolated(&q, system, &coords, mu),
            Filter::Simple => {
                let vals = jac.eval(&q, &coords);
                if vals[..m].iter().any(|v| !v.is_zero()) {
                    return Err(Error::NotARoot);
                }
                Ok(rank(&q, &jacobian_matrix(&vals, m, n, &all, n, 0))? == n)
            }
        }
    })?;
    let kept: Vec<ZeroDimParam> = parts.into_iter().filter(|(_, keep)| *keep).map(|(r, _)| r).collect();
    if kept.is_empty() {
        return Ok(ZeroDimParam::empty(f, r.lambda.clone()));
    }
    ZeroDimParam::crt_combine(f, &kept)
}

fn run(f: &PrimeField, inst: &HomotopyInstance, filter: Filter) -> Result<ZeroDimParam> {
    let r1 = endpoints(f, inst)?;
    let target = inst.at(f, f.one());
    if !r1.residual_is_zero(f, &target)? {
        return Err(Error::ResidualNonzero);
    }
    filter_points(f, &r1, &target, filter, inst.c.max(1))
}

/// Isolated points of `V(B_1)` reached by bounded paths.
pub fn run_isolated(f: &PrimeField, inst: &HomotopyInstance) -> Result<ZeroDimParam> {
    run(f, inst, Filter::Isolated)
}

/// Simple points of `V(B_1)` reached by bounded paths.
pub fn run_simple(f: &PrimeField, inst: &HomotopyInstance) -> Result<ZeroDimParam> {
    run(f, inst, Filter::Simple)
}
