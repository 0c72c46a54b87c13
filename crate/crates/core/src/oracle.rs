//! Brute-force references for tests: exhaustive point enumeration over a
//! small field and local multiplicities from truncated monomial matrices.
//! Nothing here goes through straight-line programs.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::field::{Fp, PrimeField};
use crate::linalg::{rank, Matrix};
use crate::problem::{Expr, ProblemSpec};
use crate::ring::Ring;

/// Exponent vector to coefficient; zero coefficients are never stored.
pub type MPoly = BTreeMap<Vec<u32>, Fp>;

/// Expanded polynomials in `n` variables.
#[derive(Clone, Debug)]
pub struct MPolyRing {
    pub field: PrimeField,
    pub n: usize,
}

impl MPolyRing {
    pub fn new(field: &PrimeField, n: usize) -> MPolyRing {
        MPolyRing { field: field.clone(), n }
    }

    pub fn var(&self, i: usize) -> MPoly {
        let mut e = vec![0; self.n];
        e[i] = 1;
        MPoly::from([(e, self.field.one())])
    }

    pub fn expand(&self, e: &Expr) -> MPoly {
        let xs: Vec<MPoly> = (0..self.n).map(|i| self.var(i)).collect();
        e.eval(self, &xs)
    }

    /// `h(X + a)`.
    pub fn translate(&self, h: &MPoly, a: &[Fp]) -> MPoly {
        let xs: Vec<MPoly> = (0..self.n).map(|i| self.add(&self.var(i), &self.from_base(a[i]))).collect();
        let mut out = self.zero();
        for (e, &c) in h {
            let mut t = self.from_base(c);
            for (x, &k) in xs.iter().zip(e) {
                for _ in 0..k {
                    t = self.mul(&t, x);
                }
            }
            out = self.add(&out, &t);
        }
        out
    }

    pub fn eval_at(&self, h: &MPoly, pt: &[Fp]) -> Fp {
        let f = &self.field;
        h.iter().fold(f.zero(), |acc, (e, &c)| {
            let m = e.iter().zip(pt).fold(c, |m, (&k, &x)| f.mul(m, f.pow(x, u64::from(k))));
            f.add(acc, m)
        })
    }

    pub fn total_degree(h: &MPoly) -> Option<u32> {
        h.keys().map(|e| e.iter().sum()).max()
    }

    fn insert(&self, out: &mut MPoly, e: Vec<u32>, c: Fp) {
        let f = &self.field;
        let v = out.get(&e).map_or(c, |&o| f.add(o, c));
        if f.is_zero(v) {
            out.remove(&e);
        } else {
            out.insert(e, v);
        }
    }
}

impl Ring for MPolyRing {
    type Elem = MPoly;

    fn base(&self) -> &PrimeField {
        &self.field
    }

    fn zero(&self) -> MPoly {
        MPoly::new()
    }

    fn one(&self) -> MPoly {
        self.from_base(self.field.one())
    }

    fn from_base(&self, c: Fp) -> MPoly {
        let mut out = MPoly::new();
        self.insert(&mut out, vec![0; self.n], c);
        out
    }

    fn add(&self, a: &MPoly, b: &MPoly) -> MPoly {
        let mut out = a.clone();
        for (e, &c) in b {
            self.insert(&mut out, e.clone(), c);
        }
        out
    }

    fn sub(&self, a: &MPoly, b: &MPoly) -> MPoly {
        let mut out = a.clone();
        for (e, &c) in b {
            self.insert(&mut out, e.clone(), self.field.neg(c));
        }
        out
    }

    fn mul(&self, a: &MPoly, b: &MPoly) -> MPoly {
        let mut out = MPoly::new();
        for (ea, &ca) in a {
            for (eb, &cb) in b {
                let e = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                self.insert(&mut out, e, self.field.mul(ca, cb));
            }
        }
        out
    }

    fn is_zero(&self, a: &MPoly) -> bool {
        a.is_empty()
    }
}

/// All monomials in `n` variables of total degree at most `d`, by degree
/// and then lexicographically.
#[derive(Clone, Debug)]
pub struct MonomialBasis {
    pub n: usize,
    pub d: u32,
    pub monomials: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

impl MonomialBasis {
    pub fn new(n: usize, d: u32) -> MonomialBasis {
        let mut monomials = Vec::new();
        for deg in 0..=d {
            let mut cur = vec![0; n];
            push_exact(&mut monomials, &mut cur, 0, deg);
        }
        let index = monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        MonomialBasis { n, d, monomials, index }
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn index(&self, m: &[u32]) -> Option<usize> {
        self.index.get(m).copied()
    }
}

fn push_exact(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, i: usize, left: u32) {
    if cur.is_empty() {
        if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if i + 1 == cur.len() {
        cur[i] = left;
        out.push(cur.clone());
        cur[i] = 0;
        return;
    }
    for k in (0..=left).rev() {
        cur[i] = k;
        push_exact(out, cur, i + 1, left - k);
    }
    cur[i] = 0;
}

/// `dim K[X]/(⟨polys⟩ + m^{μ+1})` with `m` the maximal ideal at the origin.
pub fn local_multiplicity(field: &PrimeField, n: usize, polys: &[MPoly], mu: u32) -> usize {
    let basis = MonomialBasis::new(n, mu);
    let ring = MPolyRing::new(field, n);
    let mut rows = Vec::new();
    for c in polys {
        for m in &basis.monomials {
            let mono = MPoly::from([(m.clone(), field.one())]);
            let prod = ring.mul(&mono, c);
            let mut row = vec![field.zero(); basis.len()];
            for (e, &v) in &prod {
                if let Some(j) = basis.index(e) {
                    row[j] = v;
                }
            }
            if row.iter().any(|&v| !field.is_zero(v)) {
                rows.push(row);
            }
        }
    }
    if rows.is_empty() {
        return basis.len();
    }
    basis.len() - rank(field, &Matrix::from_rows(rows)).expect("prime field")
}

/// `x` is isolated with multiplicity at most `μ`, decided from the
/// truncated quotient at `x`.
pub fn isolated_within(field: &PrimeField, n: usize, polys: &[MPoly], x: &[Fp], mu: u32) -> bool {
    let ring = MPolyRing::new(field, n);
    let shifted: Vec<MPoly> = polys.iter().map(|h| ring.translate(h, x)).collect();
    local_multiplicity(field, n, &shifted, mu) <= mu as usize
}

/// All `x ∈ F_small^n` with `rank F(x) < p` and `G(x) = 0`, as canonical
/// representatives in lexicographic order. Refuses more than `budget`
/// points.
pub fn enumerate_variety(spec: &ProblemSpec, small: &PrimeField, budget: u64) -> Result<Vec<Vec<u64>>> {
    let n = spec.n();
    let size = (small.prime() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if n > 3 || size > u128::from(budget) {
        return Err(Error::TooLarge(format!(
            "enumerating {}^{} points exceeds the oracle budget of {}",
            small.prime(),
            n,
            budget
        )));
    }
    let mut out = Vec::new();
    let mut pt = vec![0u64; n];
    loop {
        let x: Vec<Fp> = pt.iter().map(|&c| small.from_u64(c)).collect();
        if spec.g.iter().all(|g| small.is_zero(g.eval(small, &x))) {
            let ents: Vec<Fp> = spec.f.iter().map(|e| e.eval(small, &x)).collect();
            let m = Matrix::from_rows(ents.chunks(spec.q).map(<[Fp]>::to_vec).collect());
            if rank(small, &m).expect("prime field") < spec.p {
                out.push(pt.clone());
            }
        }
        // Odometer, last coordinate fastest.
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            pt[k] += 1;
            if pt[k] < small.prime() {
                break;
            }
            pt[k] = 0;
        }
    }
}

/// `G` followed by the expanded `p`-minors of `F`, via cofactor expansion.
pub fn expanded_system(field: &PrimeField, spec: &ProblemSpec) -> Vec<MPoly> {
    let ring = MPolyRing::new(field, spec.n());
    let ents: Vec<MPoly> = spec.f.iter().map(|e| ring.expand(e)).collect();
    let mut out: Vec<MPoly> = spec.g.iter().map(|e| ring.expand(e)).collect();
    for cols in subsets(spec.q, spec.p) {
        let rows: Vec<Vec<MPoly>> = (0..spec.p).map(|i| cols.iter().map(|&j| ents[i * spec.q + j].clone()).collect()).collect();
        out.push(cofactor_det(&ring, &rows));
    }
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out.sort();
    out
}

fn cofactor_det(ring: &MPolyRing, a: &[Vec<MPoly>]) -> MPoly {
    let k = a.len();
    if k == 1 {
        return a[0][0].clone();
    }
    let mut out = ring.zero();
    for j in 0..k {
        let minor: Vec<Vec<MPoly>> = a[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let t = ring.mul(&a[0][j], &cofactor_det(ring, &minor));
        out = if j % 2 == 0 { ring.add(&out, &t) } else { ring.sub(&out, &t) };
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::parse_expr;
    use proptest::prelude::*;
    use proptest::test_runner::RngSeed;

    fn f() -> PrimeField {
        PrimeField::new(1_000_003).unwrap()
    }

    fn polys(f: &PrimeField, n: usize, src: &[&str]) -> Vec<MPoly> {
        let vars: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        let ring = MPolyRing::new(f, n);
        src.iter().map(|s| ring.expand(&parse_expr(s, &vars, 1, 1).unwrap())).collect()
    }

    #[test]
    fn monomial_basis_size() {
        for (n, d, size) in [(2, 3, 10), (3, 2, 10), (3, 6, 84), (1, 4, 5), (0, 3, 1)] {
            let b = MonomialBasis::new(n, d);
            assert_eq!(b.len(), size);
            assert_eq!(b.monomials[0], vec![0; n]);
            assert!(b.monomials.iter().enumerate().all(|(i, m)| b.index(m) == Some(i)));
        }
    }

    #[test]
    fn multiplicity_examples() {
        let f = f();
        assert_eq!(local_multiplicity(&f, 2, &polys(&f, 2, &["x1", "x2"]), 2), 1);
        assert_eq!(local_multiplicity(&f, 2, &polys(&f, 2, &["x1^2", "x2"]), 3), 2);
        assert_eq!(local_multiplicity(&f, 2, &polys(&f, 2, &["x1^2", "x1*x2", "x2^2"]), 3), 3);
        // A line through the origin: grows with the truncation order.
        let line = polys(&f, 2, &["x1"]);
        assert_eq!(local_multiplicity(&f, 2, &line, 4), 5);
        assert!(!isolated_within(&f, 2, &line, &[f.zero(), f.zero()], 4));
        // Units away from the origin are irrelevant after truncation.
        let sys = polys(&f, 2, &["x1*(x1 - 1)", "x2"]);
        assert_eq!(local_multiplicity(&f, 2, &sys, 3), 1);
        assert!(isolated_within(&f, 2, &sys, &[f.one(), f.zero()], 1));
    }

    #[test]
    fn enumeration_example() {
        let small = PrimeField::new(101).unwrap();
        let spec = ProblemSpec::parse("vars x y\nmatrix 1 2\nx^2 - 4 | y - x\n").unwrap();
        let pts = enumerate_variety(&spec, &small, 1 << 20).unwrap();
        assert_eq!(pts, vec![vec![2, 2], vec![99, 99]]);
        let big = PrimeField::new(1_000_003).unwrap();
        assert!(matches!(enumerate_variety(&spec, &big, 1 << 20), Err(Error::TooLarge(_))));
        let empty = ProblemSpec::parse("vars x y\nmatrix 1 1\nx\neq 1\n").unwrap();
        assert!(enumerate_variety(&empty, &small, 1 << 20).unwrap().is_empty());
    }

    #[test]
    fn expanded_minors() {
        let f = f();
        let spec = ProblemSpec::parse("vars x1 x2\nmatrix 2 3\nx1 | x2 | 1\n1 | x1 | x2\n").unwrap();
        let sys = expanded_system(&f, &spec);
        assert_eq!(sys, polys(&f, 2, &["x1^2 - x2", "x1*x2 - 1", "x2^2 - x1"]));
    }

    proptest! {
        #![proptest_config(ProptestConfig {
            cases: 1000,
            rng_seed: RngSeed::Fixed(0x0ac1e),
            failure_persistence: None,
            ..ProptestConfig::default()
        })]

        #[test]
        fn translation_preserves_values(cs in prop::collection::vec(0u64..50, 6), a in prop::collection::vec(0u64..50, 2), x in prop::collection::vec(0u64..50, 2)) {
            let f = PrimeField::new(101).unwrap();
            let ring = MPolyRing::new(&f, 2);
            let mons = [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 3]];
            let mut h = MPoly::new();
            for (m, &c) in mons.iter().zip(&cs) {
                ring.insert(&mut h, m.to_vec(), f.from_u64(c));
            }
            let a: Vec<Fp> = a.iter().map(|&v| f.from_u64(v)).collect();
            let x: Vec<Fp> = x.iter().map(|&v| f.from_u64(v)).collect();
            let xa: Vec<Fp> = x.iter().zip(&a).map(|(&u, &v)| f.add(u, v)).collect();
            prop_assert_eq!(ring.eval_at(&ring.translate(&h, &a), &x), ring.eval_at(&h, &xa));
        }

        #[test]
        fn monomial_ideals(e1 in 1u32..4, e2 in 1u32..4, mu in 1u32..7) {
            // dim K[X]/(X1^e1, X2^e2) = e1·e2, seen once mu ≥ e1 + e2 − 2.
            let f = PrimeField::new(101).unwrap();
            let gens = vec![MPoly::from([(vec![e1, 0], f.one())]), MPoly::from([(vec![0, e2], f.one())])];
            let want: usize = (0..e1).map(|a| (0..e2).filter(|b| a + b <= mu).count()).sum();
            prop_assert_eq!(local_multiplicity(&f, 2, &gens, mu), want);
        }
    }
}
