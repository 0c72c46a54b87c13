//! Degree bounds and the column-degree and row-degree start systems.

mod column;
mod row;

pub use column::{build_column_start, column_degree, ColumnStart};
pub use row::{build_row_start, row_degree, row_degree_diagonal, solve_dense, RowStart};

use num_bigint::BigUint;
use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{Fp, PrimeField};
use crate::homotopy::{self, Filter, HomotopyInstance};
use crate::linalg::{solve_linear, LinearSolution, Matrix};
use crate::ring::Ring;
use crate::slp::{maximal_minors, Slp, SlpBuilder};
use crate::zdp::ZeroDimParam;

/// Attempts allowed for each inner start-system solve.
const INNER_BUDGET: u32 = 6;

/// `V_p(F) ∩ V(G)`: a program with `n` inputs whose outputs are the
/// entries of `F` (row-major, `p×q`) followed by `g_1, …, g_s`.
#[derive(Clone, Debug)]
pub struct DetProblem {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub s: usize,
    pub fg: Slp,
}

impl DetProblem {
    pub fn new(n: usize, p: usize, q: usize, s: usize, fg: Slp) -> Result<DetProblem> {
        assert!(1 <= p && p <= q, "need 1 <= p <= q");
        assert_eq!(fg.n_inputs(), n);
        assert_eq!(fg.n_outputs(), p * q + s);
        let expected = q as i64 - p as i64 + s as i64 + 1;
        if n as i64 != expected {
            return Err(Error::DimensionMismatch { n, expected });
        }
        Ok(DetProblem { n, p, q, s, fg })
    }

    /// The equations `g_1, …, g_s` followed by all `p`-minors of `F` in
    /// lexicographic order of column subsets.
    pub fn system(&self, f: &PrimeField) -> Slp {
        Slp::build(f, self.n, |b, xs| {
            let vals = self.fg.eval(b, xs);
            let (ent, g) = vals.split_at(self.p * self.q);
            let mut out = g.to_vec();
            out.extend(maximal_minors(b, ent, self.p, self.q));
            out
        })
    }
}

/// Degrees driving the bounds: column degrees `δ`, row degrees `α` and the
/// degrees `γ` of the side equations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeProfile {
    pub p: usize,
    pub q: usize,
    pub s: usize,
    pub n: usize,
    pub cdeg: Vec<u32>,
    pub rdeg: Vec<u32>,
    pub gdeg: Vec<u32>,
}

impl DegreeProfile {
    /// Derives row and column degrees from a `p×q` grid of entry degrees.
    pub fn from_degrees(p: usize, q: usize, entries: &[u32], gdeg: Vec<u32>) -> Result<DegreeProfile> {
        let prof = DegreeProfile::unchecked(p, q, entries, gdeg);
        prof.validate()?;
        Ok(prof)
    }

    /// Same as [`DegreeProfile::from_degrees`] without validation.
    pub fn unchecked(p: usize, q: usize, entries: &[u32], gdeg: Vec<u32>) -> DegreeProfile {
        assert_eq!(entries.len(), p * q);
        let s = gdeg.len();
        let n = q + s + 1 - p;
        let cdeg: Vec<u32> = (0..q).map(|j| (0..p).map(|i| entries[i * q + j]).max().unwrap_or(0)).collect();
        let rdeg: Vec<u32> = (0..p).map(|i| entries[i * q..(i + 1) * q].iter().copied().max().unwrap_or(0)).collect();
        DegreeProfile {
            p,
            q,
            s,
            n,
            cdeg,
            rdeg,
            gdeg,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 || self.p > self.q {
            return Err(Error::InvalidProfile(format!("need 1 <= p <= q, got p={} q={}", self.p, self.q)));
        }
        if self.n != self.q + self.s + 1 - self.p {
            return Err(Error::DimensionMismatch {
                n: self.n,
                expected: self.q as i64 - self.p as i64 + self.s as i64 + 1,
            });
        }
        if let Some(j) = self.cdeg.iter().position(|&d| d == 0) {
            return Err(Error::InvalidProfile(format!(
                "column {} of F consists of constants; if it is nonzero the rank condition does not depend on it and it can be discarded, otherwise the system is degenerate",
                j + 1
            )));
        }
        if let Some(i) = self.rdeg.iter().position(|&d| d == 0) {
            return Err(Error::InvalidProfile(format!(
                "row {} of F consists of constants; row degrees must be at least 1",
                i + 1
            )));
        }
        if let Some(i) = self.gdeg.iter().position(|&d| d == 0) {
            return Err(Error::InvalidProfile(format!("equation {} is constant", i + 1)));
        }
        Ok(())
    }
}

/// `E_k` of the values, exactly.
pub fn elem_sym(k: usize, values: &[u64]) -> BigUint {
    let mut e = vec![BigUint::from(0u32); k + 1];
    e[0] = BigUint::from(1u32);
    for &v in values {
        for j in (1..=k).rev() {
            let t = &e[j - 1] * v;
            e[j] += t;
        }
    }
    e.swap_remove(k)
}

/// `S_k` (complete homogeneous symmetric polynomial) of the values, exactly.
pub fn complete_sym(k: usize, values: &[u64]) -> BigUint {
    let mut h = vec![BigUint::from(0u32); k + 1];
    h[0] = BigUint::from(1u32);
    for &v in values {
        for j in 1..=k {
            let t = &h[j - 1] * v;
            h[j] += t;
        }
    }
    h.swap_remove(k)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub c: BigUint,
    pub cprime: BigUint,
    pub e: BigUint,
    pub eprime: BigUint,
}

pub fn bounds(profile: &DegreeProfile) -> Bounds {
    let k = profile.n - profile.s;
    let up = |v: &[u32], add: u64| -> Vec<u64> { v.iter().map(|&d| u64::from(d) + add).collect() };
    let prod = |v: Vec<u64>| v.into_iter().fold(BigUint::from(1u32), |a, x| a * x);
    let g = prod(up(&profile.gdeg, 0));
    let g1 = prod(up(&profile.gdeg, 1));
    Bounds {
        c: &g * elem_sym(k, &up(&profile.cdeg, 0)),
        cprime: &g * complete_sym(k, &up(&profile.rdeg, 0)),
        e: &g1 * elem_sym(k, &up(&profile.cdeg, 1)),
        eprime: &g1 * complete_sym(k, &up(&profile.rdeg, 1)),
    }
}

pub(crate) fn to_usize(x: &BigUint, what: &str) -> Result<usize> {
    usize::try_from(x).map_err(|_| Error::TooLarge(format!("{what} = {x} does not fit in memory")))
}

/// `c_0 + Σ c_l X_l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineForm {
    pub c0: Fp,
    pub coeffs: Vec<Fp>,
}

impl AffineForm {
    pub fn random<R: Rng + ?Sized>(f: &PrimeField, n: usize, rng: &mut R) -> AffineForm {
        AffineForm {
            c0: f.random(rng),
            coeffs: (0..n).map(|_| f.random(rng)).collect(),
        }
    }

    pub fn constant(f: &PrimeField, c: Fp, n: usize) -> AffineForm {
        AffineForm {
            c0: c,
            coeffs: vec![f.zero(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn eval<R: Ring>(&self, ring: &R, xs: &[R::Elem]) -> R::Elem {
        self.coeffs
            .iter()
            .zip(xs)
            .fold(ring.from_base(self.c0), |acc, (&c, x)| ring.add(&acc, &ring.scale(c, x)))
    }

    /// Replaces the trailing variables by the given forms in the leading ones.
    pub fn substitute(&self, f: &PrimeField, tail: &[AffineForm]) -> AffineForm {
        let keep = self.n() - tail.len();
        let mut out = AffineForm {
            c0: self.c0,
            coeffs: self.coeffs[..keep].to_vec(),
        };
        for (a, phi) in self.coeffs[keep..].iter().zip(tail) {
            out.c0 = f.add(out.c0, f.mul(*a, phi.c0));
            for (o, &c) in out.coeffs.iter_mut().zip(&phi.coeffs) {
                *o = f.add(*o, f.mul(*a, c));
            }
        }
        out
    }
}

/// A product of affine forms; the empty product is one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearFormProduct {
    pub factors: Vec<AffineForm>,
}

impl LinearFormProduct {
    pub fn random<R: Rng + ?Sized>(f: &PrimeField, n: usize, degree: usize, rng: &mut R) -> LinearFormProduct {
        LinearFormProduct {
            factors: (0..degree).map(|_| AffineForm::random(f, n, rng)).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.factors.len()
    }

    pub fn scaled(mut self, f: &PrimeField, c: Fp) -> LinearFormProduct {
        match self.factors.first_mut() {
            Some(first) => {
                first.c0 = f.mul(first.c0, c);
                for x in &mut first.coeffs {
                    *x = f.mul(*x, c);
                }
            }
            None => {
                self.factors.push(AffineForm::constant(f, c, 0));
            }
        }
        self
    }

    pub fn eval<R: Ring>(&self, ring: &R, xs: &[R::Elem]) -> R::Elem {
        self.factors
            .iter()
            .fold(ring.one(), |acc, l| ring.mul(&acc, &l.eval(ring, xs)))
    }

    pub fn substitute(&self, f: &PrimeField, tail: &[AffineForm]) -> LinearFormProduct {
        LinearFormProduct {
            factors: self.factors.iter().map(|l| l.substitute(f, tail)).collect(),
        }
    }
}

/// Solves `forms = 0` for the last `forms.len()` variables as affine forms
/// in the first `n − forms.len()` ones.
pub fn eliminate(f: &PrimeField, forms: &[&AffineForm]) -> Result<Vec<AffineForm>> {
    let k = forms.len();
    let Some(n) = forms.first().map(|l| l.n()) else {
        return Ok(Vec::new());
    };
    let keep = n - k;
    let a = Matrix::from_rows(forms.iter().map(|l| l.coeffs[keep..].to_vec()).collect());
    // Right-hand sides: the constant and each kept variable, negated.
    let mut cols: Vec<Vec<Fp>> = vec![forms.iter().map(|l| f.neg(l.c0)).collect()];
    for j in 0..keep {
        cols.push(forms.iter().map(|l| f.neg(l.coeffs[j])).collect());
    }
    let mut sols = Vec::with_capacity(cols.len());
    for rhs in &cols {
        match solve_linear(f, &a, rhs)? {
            LinearSolution::Unique(x) => sols.push(x),
            _ => return Err(Error::RankDeficientBranch),
        }
    }
    Ok((0..k)
        .map(|i| AffineForm {
            c0: sols[0][i],
            coeffs: (0..keep).map(|j| sols[j + 1][i]).collect(),
        })
        .collect())
}

/// Common zero of `n` affine forms in `n` variables.
pub fn solve_point(f: &PrimeField, forms: &[&AffineForm]) -> Result<Vec<Fp>> {
    Ok(eliminate(f, forms)?.into_iter().map(|l| l.c0).collect())
}

/// Start entries `L` (row-major `p×q`) and start equations `a_i`.
#[derive(Clone, Debug)]
pub struct StartSystem {
    pub p: usize,
    pub q: usize,
    pub entries: Vec<LinearFormProduct>,
    pub eqs: Vec<LinearFormProduct>,
}

/// `B(T, X)`: `(1−T)a_i + T g_i`, then the `p`-minors of `(1−T)L + T F`.
pub fn blend(f: &PrimeField, start: &StartSystem, target: &DetProblem) -> Slp {
    assert_eq!((start.p, start.q, start.eqs.len()), (target.p, target.q, target.s));
    let n = target.n;
    let b = SlpBuilder::new(f, n + 1);
    let xs = b.inputs();
    let (t, x) = (xs[0], &xs[1..]);
    let one_t = b.sub(&b.one(), &t);
    let vals = target.fg.eval(&b, x);
    let (ent, g) = vals.split_at(target.p * target.q);
    let mix = |a: &LinearFormProduct, tgt: &usize| {
        let a = a.eval(&b, x);
        b.add(&b.mul(&one_t, &a), &b.mul(&t, tgt))
    };
    let mut out: Vec<usize> = start.eqs.iter().zip(g).map(|(a, gi)| mix(a, gi)).collect();
    let u: Vec<usize> = start.entries.iter().zip(ent).map(|(a, fi)| mix(a, fi)).collect();
    out.extend(maximal_minors(&b, &u, target.p, target.q));
    b.finish(out)
}

/// Program for a problem whose entries and equations are form products.
pub fn forms_problem(f: &PrimeField, n: usize, p: usize, q: usize, entries: &[LinearFormProduct], eqs: &[LinearFormProduct]) -> Result<DetProblem> {
    let fg = Slp::build(f, n, |b, xs| {
        entries.iter().chain(eqs).map(|l| l.eval(b, xs)).collect()
    });
    DetProblem::new(n, p, q, eqs.len(), fg)
}

/// Runs the homotopy from a solved start system to `target`.
pub fn run_homotopy(
    f: &PrimeField,
    start: &StartSystem,
    r0: ZeroDimParam,
    target: &DetProblem,
    c: usize,
    e: usize,
    filter: Filter,
) -> Result<ZeroDimParam> {
    let b = blend(f, start, target);
    let inst = HomotopyInstance::new(f, b, r0, c, e)?;
    match filter {
        Filter::Isolated => homotopy::run_isolated(f, &inst),
        Filter::Simple => homotopy::run_simple(f, &inst),
    }
}

/// Adds coordinates given as affine forms in the existing ones and
/// re-encodes with `lambda`.
pub(crate) fn extend_coordinates(f: &PrimeField, r: &ZeroDimParam, tail: &[AffineForm], lambda: &[Fp]) -> Result<ZeroDimParam> {
    if r.is_empty() {
        return Ok(ZeroDimParam::empty(f, lambda.to_vec()));
    }
    let q = crate::quotient::QuotientRing::new(f, r.w.clone());
    let mut coords = if r.n() == 0 { Vec::new() } else { r.coordinates(f)? };
    let extra: Vec<_> = tail.iter().map(|l| l.eval(&q, &coords)).collect();
    coords.extend(extra);
    ZeroDimParam::from_coordinates(f, &r.w, &coords, lambda.to_vec())
}

pub(crate) fn random_lambda<R: Rng + ?Sized>(f: &PrimeField, n: usize, rng: &mut R) -> Vec<Fp> {
    (0..n).map(|_| f.random_nonzero(rng)).collect()
}

/// All sequences `(r_1, …, r_k)` with `0 <= r_i < bounds[i]`.
pub(crate) fn index_tuples(bounds: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &b in bounds {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..b).map(move |r| {
                    let mut t = t.clone();
                    t.push(r);
                    t
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use proptest::test_runner::RngSeed;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn symmetric_function_examples() {
        assert_eq!(elem_sym(2, &[2, 1, 5, 7]), big(73));
        assert_eq!(complete_sym(2, &[2, 1, 5]), big(47));
        assert_eq!(elem_sym(0, &[4, 5]), big(1));
        assert_eq!(complete_sym(0, &[4, 5]), big(1));
        assert_eq!(elem_sym(3, &[1, 1]), big(0));
        assert_eq!(complete_sym(3, &[1]), big(1));
    }

    #[test]
    fn bounds_examples() {
        let prof = DegreeProfile {
            p: 3,
            q: 4,
            s: 0,
            n: 2,
            cdeg: vec![2, 1, 5, 7],
            rdeg: vec![7, 7, 7],
            gdeg: vec![],
        };
        let b = bounds(&prof);
        assert_eq!((b.c, b.cprime), (big(73), big(294)));
        // Uniform degree d: c = binom(q, p − 1) d^n.
        let prof = DegreeProfile {
            p: 2,
            q: 5,
            s: 0,
            n: 4,
            cdeg: vec![3; 5],
            rdeg: vec![3; 2],
            gdeg: vec![],
        };
        assert_eq!(bounds(&prof).c, big(5 * 81));
        let prof = DegreeProfile {
            p: 2,
            q: 4,
            s: 0,
            n: 3,
            cdeg: vec![1; 4],
            rdeg: vec![1; 2],
            gdeg: vec![],
        };
        let b = bounds(&prof);
        assert_eq!((b.c, b.e), (big(4), big(4 * 8)));
    }

    #[test]
    fn profile_checks() {
        assert!(matches!(
            DegreeProfile::from_degrees(1, 2, &[1, 0], vec![]),
            Err(Error::InvalidProfile(_))
        ));
        let p = DegreeProfile::from_degrees(2, 3, &[1, 2, 0, 2, 1, 1], vec![3]).unwrap();
        assert_eq!((p.n, p.cdeg.clone(), p.rdeg.clone()), (3, vec![2, 2, 1], vec![2, 2]));
    }

    #[test]
    fn eliminate_solves() {
        let f = PrimeField::new(101).unwrap();
        let l = |c: &[i64]| AffineForm {
            c0: f.from_i64(c[0]),
            coeffs: c[1..].iter().map(|&x| f.from_i64(x)).collect(),
        };
        // X1 + X2 − 3 = 0, X2 − X3 = 0 in three variables.
        let a = l(&[-3, 1, 1, 0]);
        let b = l(&[0, 0, 1, -1]);
        let tail = eliminate(&f, &[&a, &b]).unwrap();
        // X2 = 3 − X1, X3 = 3 − X1.
        assert_eq!(tail, vec![l(&[3, -1]), l(&[3, -1])]);
        assert_eq!(a.substitute(&f, &tail), l(&[0, 0]));
        let c = l(&[1, 0, 0, 0]);
        assert!(matches!(eliminate(&f, &[&a, &c]), Err(Error::RankDeficientBranch)));
        assert_eq!(solve_point(&f, &[&l(&[-2, 1, 0]), &l(&[-5, 1, 1])]).unwrap(), vec![f.from_u64(2), f.from_u64(3)]);
    }

    fn config() -> ProptestConfig {
        ProptestConfig {
            cases: 1000,
            rng_seed: RngSeed::Fixed(0xb0),
            failure_persistence: None,
            ..ProptestConfig::default()
        }
    }

    fn brute_elem(k: usize, v: &[u64]) -> BigUint {
        crate::slp::combinations(v.len(), k)
            .iter()
            .map(|c| c.iter().fold(big(1), |a, &i| a * v[i]))
            .sum()
    }

    fn brute_complete(k: usize, v: &[u64]) -> BigUint {
        // Multisets of size k as nondecreasing index tuples.
        index_tuples(&vec![v.len(); k])
            .into_iter()
            .filter(|t| t.windows(2).all(|w| w[0] <= w[1]))
            .map(|t| t.iter().fold(big(1), |a, &i| a * v[i]))
            .sum()
    }

    proptest! {
        #![proptest_config(config())]

        #[test]
        fn symmetric_functions_match_definitions(v in prop::collection::vec(1u64..9, 0..6), k in 0usize..5) {
            prop_assert_eq!(elem_sym(k, &v), brute_elem(k, &v));
            prop_assert_eq!(complete_sym(k, &v), brute_complete(k, &v));
        }

        #[test]
        fn uniform_column_bound(q in 1usize..6, dp in 0usize..5, d in 1u32..5) {
            let p = 1 + dp % q;
            let n = q - p + 1;
            let prof = DegreeProfile { p, q, s: 0, n, cdeg: vec![d; q], rdeg: vec![d; p], gdeg: vec![] };
            let binom = crate::slp::combinations(q, p - 1).len() as u64;
            prop_assert_eq!(bounds(&prof).c, big(binom * u64::from(d).pow(n as u32)));
        }
    }
}
