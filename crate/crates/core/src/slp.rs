//! Straight-line programs: division-free arithmetic circuits.
//!
//! An [`Slp`] holds field constants, so it belongs to the field it was built
//! over. Programs are immutable; transforms replay them into an
//! [`SlpBuilder`], which is itself a [`Ring`] whose elements are slots. Any
//! generic ring algorithm (Berkowitz, composition) therefore doubles as a
//! program generator.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use crate::field::{Fp, PrimeField};
use crate::ring::Ring;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Instr {
    Input(usize),
    Const(Fp),
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Slp {
    n_inputs: usize,
    instrs: Arc<[Instr]>,
    outputs: Vec<usize>,
}

impl Slp {
    /// Builds a program from raw parts, checking that it is acyclic.
    pub fn new(n_inputs: usize, instrs: Vec<Instr>, outputs: Vec<usize>) -> Slp {
        for (k, ins) in instrs.iter().enumerate() {
            match *ins {
                Instr::Input(i) => assert!(i < n_inputs, "input {i} out of range"),
                Instr::Const(_) => {}
                Instr::Add(a, b) | Instr::Sub(a, b) | Instr::Mul(a, b) => {
                    assert!(a < k && b < k, "operand after instruction {k}")
                }
            }
        }
        assert!(outputs.iter().all(|&o| o < instrs.len()), "output out of range");
        Slp {
            n_inputs,
            instrs: instrs.into(),
            outputs,
        }
    }

    /// Builds a program with a closure receiving the builder and input slots.
    pub fn build(
        field: &PrimeField,
        n_inputs: usize,
        body: impl FnOnce(&SlpBuilder, &[usize]) -> Vec<usize>,
    ) -> Slp {
        let b = SlpBuilder::new(field, n_inputs);
        let xs = b.inputs();
        let outs = body(&b, &xs);
        b.finish(outs)
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn instrs(&self) -> &[Instr] {
        &self.instrs
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    /// Number of arithmetic instructions.
    pub fn length(&self) -> usize {
        self.instrs
            .iter()
            .filter(|i| matches!(i, Instr::Add(..) | Instr::Sub(..) | Instr::Mul(..)))
            .count()
    }

    /// Evaluates all outputs at `point` in `ring`.
    pub fn eval<R: Ring>(&self, ring: &R, point: &[R::Elem]) -> Vec<R::Elem> {
        assert_eq!(point.len(), self.n_inputs, "wrong number of inputs");
        let n = self.instrs.len();
        let mut last_use = vec![0usize; n];
        for (k, ins) in self.instrs.iter().enumerate() {
            if let Instr::Add(a, b) | Instr::Sub(a, b) | Instr::Mul(a, b) = *ins {
                last_use[a] = k;
                last_use[b] = k;
            }
        }
        for &o in &self.outputs {
            last_use[o] = usize::MAX;
        }
        let mut vals: Vec<Option<R::Elem>> = vec![None; n];
        for (k, ins) in self.instrs.iter().enumerate() {
            let v = match *ins {
                Instr::Input(i) => point[i].clone(),
                Instr::Const(c) => ring.from_base(c),
                Instr::Add(a, b) => ring.add(vals[a].as_ref().unwrap(), vals[b].as_ref().unwrap()),
                Instr::Sub(a, b) => ring.sub(vals[a].as_ref().unwrap(), vals[b].as_ref().unwrap()),
                Instr::Mul(a, b) => ring.mul(vals[a].as_ref().unwrap(), vals[b].as_ref().unwrap()),
            };
            if let Instr::Add(a, b) | Instr::Sub(a, b) | Instr::Mul(a, b) = *ins {
                if last_use[a] == k {
                    vals[a] = None;
                }
                if last_use[b] == k {
                    vals[b] = None;
                }
            }
            if last_use[k] > k {
                vals[k] = Some(v);
            }
        }
        self.outputs
            .iter()
            .map(|&o| vals[o].clone().expect("output kept alive"))
            .collect()
    }

    /// Same instructions, different outputs.
    pub fn select_outputs(&self, idx: &[usize]) -> Slp {
        Slp {
            n_inputs: self.n_inputs,
            instrs: Arc::clone(&self.instrs),
            outputs: idx.iter().map(|&i| self.outputs[i]).collect(),
        }
    }

    /// `self ∘ inner`: the inputs of `self` are replaced by the outputs of `inner`.
    pub fn compose(&self, field: &PrimeField, inner: &Slp) -> Slp {
        assert_eq!(inner.n_outputs(), self.n_inputs);
        Slp::build(field, inner.n_inputs, |b, xs| {
            let mid = inner.eval(b, xs);
            self.eval(b, &mid)
        })
    }

    /// Concatenates the outputs of programs sharing the same inputs.
    pub fn stack(field: &PrimeField, progs: &[&Slp]) -> Slp {
        let n = progs.first().map_or(0, |p| p.n_inputs);
        assert!(progs.iter().all(|p| p.n_inputs == n));
        Slp::build(field, n, |b, xs| {
            progs.iter().flat_map(|p| p.eval(b, xs)).collect()
        })
    }

    /// Appends `∂f_j/∂X_i` for every output `f_j` and input `X_i`, ordered
    /// by output then input, using forward-mode differentiation.
    pub fn jacobian(&self, field: &PrimeField) -> Slp {
        let n = self.n_inputs;
        let b = SlpBuilder::new(field, n);
        let mut val = Vec::with_capacity(self.instrs.len());
        let mut der: Vec<Vec<Option<usize>>> = Vec::with_capacity(self.instrs.len());
        let plus = |x: Option<usize>, y: Option<usize>, sub: bool| match (x, y) {
            (None, None) => None,
            (Some(x), None) => Some(x),
            (None, Some(y)) => Some(if sub { b.neg(&y) } else { y }),
            (Some(x), Some(y)) => Some(if sub { b.sub(&x, &y) } else { b.add(&x, &y) }),
        };
        for ins in self.instrs.iter() {
            let (v, d) = match *ins {
                Instr::Input(i) => {
                    let mut d = vec![None; n];
                    d[i] = Some(b.one());
                    (b.input(i), d)
                }
                Instr::Const(c) => (b.constant(c), vec![None; n]),
                Instr::Add(x, y) | Instr::Sub(x, y) => {
                    let sub = matches!(ins, Instr::Sub(..));
                    let v = if sub { b.sub(&val[x], &val[y]) } else { b.add(&val[x], &val[y]) };
                    (v, (0..n).map(|i| plus(der[x][i], der[y][i], sub)).collect())
                }
                Instr::Mul(x, y) => {
                    let v = b.mul(&val[x], &val[y]);
                    let d = (0..n)
                        .map(|i| {
                            let l = der[x][i].map(|dx| b.mul(&dx, &val[y]));
                            let r = der[y][i].map(|dy| b.mul(&val[x], &dy));
                            plus(l, r, false)
                        })
                        .collect();
                    (v, d)
                }
            };
            val.push(v);
            der.push(d);
        }
        let mut outs: Vec<usize> = self.outputs.iter().map(|&o| val[o]).collect();
        for &o in &self.outputs {
            for i in 0..n {
                outs.push(der[o][i].unwrap_or_else(|| b.zero()));
            }
        }
        b.finish(outs)
    }

    /// Program for `δ_k(f) = (f − f|_{X_k=0}) / X_k` of every output `f`,
    /// tracking pairs `(η, ν)` with `f = η + X_k·ν` and `η` free of `X_k`.
    pub fn divided_difference(&self, field: &PrimeField, k: usize) -> Slp {
        assert!(k < self.n_inputs);
        let b = SlpBuilder::new(field, self.n_inputs);
        let xk = b.input(k);
        let mut eta: Vec<usize> = Vec::with_capacity(self.instrs.len());
        let mut nu: Vec<Option<usize>> = Vec::with_capacity(self.instrs.len());
        for ins in self.instrs.iter() {
            let (e, v) = match *ins {
                Instr::Input(i) if i == k => (b.zero(), Some(b.one())),
                Instr::Input(i) => (b.input(i), None),
                Instr::Const(c) => (b.constant(c), None),
                Instr::Add(x, y) => (
                    b.add(&eta[x], &eta[y]),
                    match (nu[x], nu[y]) {
                        (None, r) | (r, None) => r,
                        (Some(p), Some(q)) => Some(b.add(&p, &q)),
                    },
                ),
                Instr::Sub(x, y) => (
                    b.sub(&eta[x], &eta[y]),
                    match (nu[x], nu[y]) {
                        (None, None) => None,
                        (Some(p), None) => Some(p),
                        (None, Some(q)) => Some(b.neg(&q)),
                        (Some(p), Some(q)) => Some(b.sub(&p, &q)),
                    },
                ),
                Instr::Mul(x, y) => {
                    let e = b.mul(&eta[x], &eta[y]);
                    // ν = η_a ν_b + ν_a η_b + X_k ν_a ν_b
                    let v = match (nu[x], nu[y]) {
                        (None, None) => None,
                        (Some(p), None) => Some(b.mul(&p, &eta[y])),
                        (None, Some(q)) => Some(b.mul(&eta[x], &q)),
                        (Some(p), Some(q)) => {
                            let s = b.add(&b.mul(&eta[x], &q), &b.mul(&p, &eta[y]));
                            Some(b.add(&s, &b.mul(&xk, &b.mul(&p, &q))))
                        }
                    };
                    (e, v)
                }
            };
            eta.push(e);
            nu.push(v);
        }
        let outs = self
            .outputs
            .iter()
            .map(|&o| nu[o].unwrap_or_else(|| b.zero()))
            .collect();
        b.finish(outs)
    }

    /// Program with the given inputs set to zero (input count unchanged).
    pub fn zero_inputs(&self, field: &PrimeField, vanish: impl Fn(usize) -> bool) -> Slp {
        Slp::build(field, self.n_inputs, |b, xs| {
            let pt: Vec<usize> = (0..self.n_inputs)
                .map(|i| if vanish(i) { b.zero() } else { xs[i] })
                .collect();
            self.eval(b, &pt)
        })
    }

    /// Appends the maximal minors of the `p×q` matrix formed by the first
    /// `p·q` outputs (row-major), one per column subset in lexicographic
    /// order, each by the division-free Berkowitz algorithm.
    pub fn with_minors(&self, field: &PrimeField, p: usize, q: usize) -> Slp {
        assert!(p <= q && self.n_outputs() >= p * q);
        Slp::build(field, self.n_inputs, |b, xs| {
            let mut outs = self.eval(b, xs);
            let entries = outs[..p * q].to_vec();
            outs.extend(maximal_minors(b, &entries, p, q));
            outs
        })
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Maximal minors of a row-major `p×q` matrix, lexicographic in the
/// column subsets.
pub fn maximal_minors<R: Ring>(ring: &R, entries: &[R::Elem], p: usize, q: usize) -> Vec<R::Elem> {
    combinations(q, p)
        .into_iter()
        .map(|cols| {
            let sub: Vec<Vec<R::Elem>> = (0..p)
                .map(|i| cols.iter().map(|&j| entries[i * q + j].clone()).collect())
                .collect();
            berkowitz_det(ring, &sub)
        })
        .collect()
}

/// Determinant without divisions, via the characteristic polynomial
/// computed by Berkowitz's Toeplitz-product recurrence.
pub fn berkowitz_det<R: Ring>(ring: &R, a: &[Vec<R::Elem>]) -> R::Elem {
    let n = a.len();
    if n == 0 {
        return ring.one();
    }
    // c holds det(λI − A_r) from the leading coefficient down.
    let mut c = vec![ring.one()];
    for r in 0..n {
        // A_{r+1} = [[A_r, S], [R, a_rr]].
        let mut t = vec![ring.one(), ring.neg(&a[r][r])];
        let mut v: Vec<R::Elem> = (0..r).map(|i| a[i][r].clone()).collect();
        for _ in 0..r {
            let rv = (0..r).fold(ring.zero(), |s, j| ring.add(&s, &ring.mul(&a[r][j], &v[j])));
            t.push(ring.neg(&rv));
            v = (0..r)
                .map(|i| (0..r).fold(ring.zero(), |s, j| ring.add(&s, &ring.mul(&a[i][j], &v[j]))))
                .collect();
        }
        // Lower-triangular Toeplitz (r+2)×(r+1) times c.
        let next = (0..r + 2)
            .map(|i| {
                (0..=i.min(r)).fold(ring.zero(), |s, j| {
                    if i - j < t.len() {
                        ring.add(&s, &ring.mul(&t[i - j], &c[j]))
                    } else {
                        s
                    }
                })
            })
            .collect();
        c = next;
    }
    if n % 2 == 0 {
        c[n].clone()
    } else {
        ring.neg(&c[n])
    }
}

/// Incremental program construction. As a [`Ring`], each operation appends
/// an instruction and returns its slot; operations with constant zero or
/// one operands, and between two constants, are folded.
pub struct SlpBuilder {
    field: PrimeField,
    n_inputs: usize,
    instrs: RefCell<Vec<Instr>>,
    consts: RefCell<HashMap<Fp, usize>>,
    input_slots: RefCell<Vec<Option<usize>>>,
}

impl SlpBuilder {
    pub fn new(field: &PrimeField, n_inputs: usize) -> SlpBuilder {
        SlpBuilder {
            field: field.clone(),
            n_inputs,
            instrs: RefCell::new(Vec::new()),
            consts: RefCell::new(HashMap::new()),
            input_slots: RefCell::new(vec![None; n_inputs]),
        }
    }

    fn push(&self, ins: Instr) -> usize {
        let mut v = self.instrs.borrow_mut();
        v.push(ins);
        v.len() - 1
    }

    pub fn input(&self, i: usize) -> usize {
        assert!(i < self.n_inputs);
        if let Some(s) = self.input_slots.borrow()[i] {
            return s;
        }
        let s = self.push(Instr::Input(i));
        self.input_slots.borrow_mut()[i] = Some(s);
        s
    }

    pub fn inputs(&self) -> Vec<usize> {
        (0..self.n_inputs).map(|i| self.input(i)).collect()
    }

    pub fn constant(&self, c: Fp) -> usize {
        if let Some(&s) = self.consts.borrow().get(&c) {
            return s;
        }
        let s = self.push(Instr::Const(c));
        self.consts.borrow_mut().insert(c, s);
        s
    }

    fn const_value(&self, s: usize) -> Option<Fp> {
        match self.instrs.borrow()[s] {
            Instr::Const(c) => Some(c),
            _ => None,
        }
    }

    /// Finishes with the given outputs, dropping unreachable instructions.
    pub fn finish(self, outputs: Vec<usize>) -> Slp {
        let instrs = self.instrs.into_inner();
        let mut live = vec![false; instrs.len()];
        for &o in &outputs {
            live[o] = true;
        }
        for k in (0..instrs.len()).rev() {
            if !live[k] {
                continue;
            }
            if let Instr::Add(a, b) | Instr::Sub(a, b) | Instr::Mul(a, b) = instrs[k] {
                live[a] = true;
                live[b] = true;
            }
        }
        let mut remap = vec![usize::MAX; instrs.len()];
        let mut kept = Vec::new();
        for (k, ins) in instrs.into_iter().enumerate() {
            if !live[k] {
                continue;
            }
            remap[k] = kept.len();
            kept.push(match ins {
                Instr::Add(a, b) => Instr::Add(remap[a], remap[b]),
                Instr::Sub(a, b) => Instr::Sub(remap[a], remap[b]),
                Instr::Mul(a, b) => Instr::Mul(remap[a], remap[b]),
                other => other,
            });
        }
        let outputs = outputs.iter().map(|&o| remap[o]).collect();
        Slp::new(self.n_inputs, kept, outputs)
    }
}

impl Ring for SlpBuilder {
    type Elem = usize;

    fn base(&self) -> &PrimeField {
        &self.field
    }
    fn zero(&self) -> usize {
        self.constant(self.field.zero())
    }
    fn one(&self) -> usize {
        self.constant(self.field.one())
    }
    fn from_base(&self, c: Fp) -> usize {
        self.constant(c)
    }
    fn add(&self, a: &usize, b: &usize) -> usize {
        let f = &self.field;
        match (self.const_value(*a), self.const_value(*b)) {
            (Some(x), Some(y)) => self.constant(f.add(x, y)),
            (Some(x), _) if f.is_zero(x) => *b,
            (_, Some(y)) if f.is_zero(y) => *a,
            _ => self.push(Instr::Add(*a, *b)),
        }
    }
    fn sub(&self, a: &usize, b: &usize) -> usize {
        let f = &self.field;
        match (self.const_value(*a), self.const_value(*b)) {
            (Some(x), Some(y)) => self.constant(f.sub(x, y)),
            (_, Some(y)) if f.is_zero(y) => *a,
            _ => self.push(Instr::Sub(*a, *b)),
        }
    }
    fn mul(&self, a: &usize, b: &usize) -> usize {
        let f = &self.field;
        match (self.const_value(*a), self.const_value(*b)) {
            (Some(x), Some(y)) => self.constant(f.mul(x, y)),
            (Some(x), _) if f.is_zero(x) => *a,
            (_, Some(y)) if f.is_zero(y) => *b,
            (Some(x), _) if f.is_one(x) => *b,
            (_, Some(y)) if f.is_one(y) => *a,
            _ => self.push(Instr::Mul(*a, *b)),
        }
    }
    fn is_zero(&self, a: &usize) -> bool {
        self.const_value(*a).is_some_and(|c| self.field.is_zero(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::RngKey;
    use crate::quotient::QuotientRing;
    use crate::ring::DualRing;
    use crate::series::SeriesRing;
    use crate::upoly::UPoly;
    use proptest::prelude::*;
    use proptest::test_runner::RngSeed;

    fn f7() -> PrimeField {
        PrimeField::new(7).unwrap()
    }

    #[test]
    fn eval_examples() {
        let f = f7();
        let prog = Slp::build(&f, 2, |b, x| vec![b.add(&b.mul(&x[0], &x[1]), &b.one())]);
        assert_eq!(prog.eval(&f, &[f.from_u64(2), f.from_u64(3)]), vec![f.zero()]);
        assert_eq!(prog.length(), 2);

        let f = PrimeField::new(101).unwrap();
        let id = Slp::build(&f, 1, |_, x| vec![x[0]]);
        let ser = SeriesRing::new(f.clone(), 4);
        assert_eq!(id.eval(&ser, &[ser.t()]), vec![ser.t()]);

        let sq = Slp::build(&f, 1, |b, x| vec![b.mul(&x[0], &x[0])]);
        let q = QuotientRing::new(&f, UPoly::from_i64s(&f, &[-2, 0, 1]));
        assert_eq!(sq.eval(&q, &[q.generator()]), vec![UPoly::from_i64s(&f, &[2])]);
    }

    #[test]
    fn jacobian_examples() {
        let f = PrimeField::new(101).unwrap();
        let xy = Slp::build(&f, 2, |b, x| vec![b.mul(&x[0], &x[1])]);
        let j = xy.jacobian(&f);
        let pt = [f.from_u64(4), f.from_u64(9)];
        assert_eq!(j.eval(&f, &pt), vec![f.from_u64(36), f.from_u64(9), f.from_u64(4)]);

        let c = Slp::build(&f, 2, |b, _| vec![b.constant(f.from_u64(5))]);
        assert_eq!(c.jacobian(&f).eval(&f, &pt)[1..], [f.zero(), f.zero()]);

        // x1^2 + x2^3 against dual numbers at five random points.
        let g = Slp::build(&f, 2, |b, x| {
            let s = b.mul(&x[0], &x[0]);
            let c = b.mul(&b.mul(&x[1], &x[1]), &x[1]);
            vec![b.add(&s, &c)]
        });
        let jg = g.jacobian(&f);
        let dual = DualRing { field: f.clone() };
        let mut rng = RngKey::new(7).rng();
        for _ in 0..5 {
            let pt = [f.random(&mut rng), f.random(&mut rng)];
            let partials = jg.eval(&f, &pt);
            for i in 0..2 {
                let dpt: Vec<(Fp, Fp)> = (0..2)
                    .map(|k| (pt[k], if k == i { f.one() } else { f.zero() }))
                    .collect();
                assert_eq!(g.eval(&dual, &dpt)[0].1, partials[1 + i]);
            }
        }
    }

    #[test]
    fn divided_difference_examples() {
        let f = PrimeField::new(101).unwrap();
        let pt = [f.from_u64(3), f.from_u64(7)];
        let x0 = Slp::build(&f, 2, |_, x| vec![x[0]]);
        assert_eq!(x0.divided_difference(&f, 0).eval(&f, &pt), vec![f.one()]);
        assert_eq!(x0.divided_difference(&f, 1).eval(&f, &pt), vec![f.zero()]);
        let m = Slp::build(&f, 2, |b, x| vec![b.mul(&b.mul(&x[0], &x[0]), &x[1])]);
        assert_eq!(m.divided_difference(&f, 0).eval(&f, &pt), vec![f.from_u64(21)]);
    }

    #[test]
    fn minors_examples() {
        let f = PrimeField::new(101).unwrap();
        let consts = |rows: usize, cols: usize, v: &[i64]| {
            Slp::build(&f, 1, |b, _| v.iter().map(|&x| b.constant(f.from_i64(x))).collect())
                .with_minors(&f, rows, cols)
        };
        let id = consts(2, 2, &[1, 0, 0, 1]);
        assert_eq!(id.eval(&f, &[f.zero()])[4], f.one());
        let m = consts(2, 3, &[1, 2, 3, 4, 5, 6]);
        let out = m.eval(&f, &[f.zero()]);
        assert_eq!(out[6..].to_vec(), vec![f.from_i64(-3), f.from_i64(-6), f.from_i64(-3)]);
        let row = Slp::build(&f, 3, |_, x| x.to_vec()).with_minors(&f, 1, 3);
        let pt = [f.from_u64(2), f.from_u64(3), f.from_u64(4)];
        assert_eq!(row.eval(&f, &pt)[3..], pt);
    }

    #[test]
    fn compose_and_prune() {
        let f = PrimeField::new(101).unwrap();
        let outer = Slp::build(&f, 2, |b, x| vec![b.sub(&x[0], &x[1])]);
        let inner = Slp::build(&f, 1, |b, x| vec![b.mul(&x[0], &x[0]), x[0]]);
        let c = outer.compose(&f, &inner);
        assert_eq!(c.eval(&f, &[f.from_u64(5)]), vec![f.from_u64(20)]);
        let dead = Slp::build(&f, 1, |b, x| {
            let _unused = b.mul(&x[0], &x[0]);
            vec![x[0]]
        });
        assert_eq!(dead.length(), 0);
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    /// Sparse expanded polynomials, used as a differentiation oracle.
    type Poly = std::collections::BTreeMap<Vec<u32>, u64>;

    #[derive(Clone, Debug)]
    enum Expr {
        Var(usize),
        Const(u64),
        Add(Box<Expr>, Box<Expr>),
        Sub(Box<Expr>, Box<Expr>),
        Mul(Box<Expr>, Box<Expr>),
    }

    fn expr(n: usize) -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![(0..n).prop_map(Expr::Var), (0u64..101).prop_map(Expr::Const)];
        leaf.prop_recursive(3, 12, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
                (inner.clone(), inner).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            ]
        })
    }

    fn degree(e: &Expr) -> usize {
        match e {
            Expr::Var(_) => 1,
            Expr::Const(_) => 0,
            Expr::Add(a, b) | Expr::Sub(a, b) => degree(a).max(degree(b)),
            Expr::Mul(a, b) => degree(a) + degree(b),
        }
    }

    const P: u64 = 101;

    fn expand(e: &Expr, n: usize) -> Poly {
        let mut out = Poly::new();
        match e {
            Expr::Var(i) => {
                let mut m = vec![0; n];
                m[*i] = 1;
                out.insert(m, 1);
            }
            Expr::Const(c) => {
                out.insert(vec![0; n], *c);
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                out = expand(a, n);
                let neg = matches!(e, Expr::Sub(..));
                for (m, c) in expand(b, n) {
                    let c = if neg { (P - c) % P } else { c };
                    let v = out.get(&m).copied().unwrap_or(0);
                    out.insert(m, (v + c) % P);
                }
            }
            Expr::Mul(a, b) => {
                let (ea, eb) = (expand(a, n), expand(b, n));
                for (ma, ca) in &ea {
                    for (mb, cb) in &eb {
                        let m: Vec<u32> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                        let v = out.get(&m).copied().unwrap_or(0);
                        out.insert(m, (v + ca * cb) % P);
                    }
                }
            }
        }
        out.retain(|_, c| *c != 0);
        out
    }

    fn eval_poly(p: &Poly, x: &[u64]) -> u64 {
        p.iter().fold(0, |s, (m, c)| {
            let t = m.iter().zip(x).fold(*c, |t, (&k, &xi)| {
                (0..k).fold(t, |t, _| t * xi % P)
            });
            (s + t) % P
        })
    }

    fn derive(p: &Poly, i: usize) -> Poly {
        let mut out = Poly::new();
        for (m, c) in p {
            if m[i] > 0 {
                let mut m2 = m.clone();
                m2[i] -= 1;
                let v = out.get(&m2).copied().unwrap_or(0);
                out.insert(m2, (v + c * m[i] as u64) % P);
            }
        }
        out
    }

    fn to_slp(f: &PrimeField, e: &Expr, n: usize) -> Slp {
        fn go(b: &SlpBuilder, f: &PrimeField, e: &Expr, x: &[usize]) -> usize {
            match e {
                Expr::Var(i) => x[*i],
                Expr::Const(c) => b.constant(f.from_u64(*c)),
                Expr::Add(a, c) => b.add(&go(b, f, a, x), &go(b, f, c, x)),
                Expr::Sub(a, c) => b.sub(&go(b, f, a, x), &go(b, f, c, x)),
                Expr::Mul(a, c) => b.mul(&go(b, f, a, x), &go(b, f, c, x)),
            }
        }
        Slp::build(f, n, |b, x| vec![go(b, f, e, x)])
    }

    /// Leibniz expansion over the symmetric group.
    fn leibniz(f: &PrimeField, m: &[Vec<Fp>]) -> Fp {
        let n = m.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut total = f.zero();
        fn heap(k: usize, perm: &mut Vec<usize>, f: &PrimeField, m: &[Vec<Fp>], total: &mut Fp) {
            if k <= 1 {
                let mut inv = 0;
                for i in 0..perm.len() {
                    for j in i + 1..perm.len() {
                        if perm[i] > perm[j] {
                            inv += 1;
                        }
                    }
                }
                let t = (0..perm.len()).fold(f.one(), |t, i| f.mul(t, m[i][perm[i]]));
                *total = if inv % 2 == 0 { f.add(*total, t) } else { f.sub(*total, t) };
                return;
            }
            for i in 0..k {
                heap(k - 1, perm, f, m, total);
                let j = if k % 2 == 0 { i } else { 0 };
                perm.swap(j, k - 1);
            }
        }
        heap(n, &mut perm, f, m, &mut total);
        total
    }

    fn config() -> ProptestConfig {
        ProptestConfig {
            cases: 1000,
            rng_seed: RngSeed::Fixed(0x51b),
            failure_persistence: None,
            ..ProptestConfig::default()
        }
    }

    proptest! {
        #![proptest_config(config())]

        #[test]
        fn jacobian_matches_expanded_derivative(n in 1usize..=3, e in expr(3), x in prop::collection::vec(0u64..P, 3)) {
            prop_assume!(degree(&e) <= 3);
            let e = remap_vars(e, n);
            let f = PrimeField::new(P).unwrap();
            let prog = to_slp(&f, &e, n);
            let pt: Vec<Fp> = x[..n].iter().map(|&v| f.from_u64(v)).collect();
            let out = prog.jacobian(&f).eval(&f, &pt);
            let poly = expand(&e, n);
            prop_assert_eq!(f.to_u64(out[0]), eval_poly(&poly, &x[..n]));
            for i in 0..n {
                prop_assert_eq!(f.to_u64(out[1 + i]), eval_poly(&derive(&poly, i), &x[..n]));
            }
        }

        #[test]
        fn divided_difference_identity(e in expr(3), k in 0usize..3, pts in prop::collection::vec(0u64..P, 60)) {
            let f = PrimeField::new(P).unwrap();
            let prog = to_slp(&f, &e, 3);
            let dd = prog.divided_difference(&f, k);
            let restricted = prog.zero_inputs(&f, |i| i == k);
            for chunk in pts.chunks(3) {
                let pt: Vec<Fp> = chunk.iter().map(|&v| f.from_u64(v)).collect();
                let lhs = f.add(f.mul(pt[k], dd.eval(&f, &pt)[0]), restricted.eval(&f, &pt)[0]);
                prop_assert_eq!(lhs, prog.eval(&f, &pt)[0]);
            }
        }

        #[test]
        fn minors_match_leibniz(p in 1usize..=3, extra in 0usize..=2, seed in any::<u64>()) {
            let q = p + extra;
            let f = PrimeField::new(1009).unwrap();
            let mut rng = RngKey::new(seed).rng();
            let vals: Vec<Fp> = (0..p * q).map(|_| f.random(&mut rng)).collect();
            let prog = Slp::build(&f, p * q, |_, x| x.to_vec()).with_minors(&f, p, q);
            let out = prog.eval(&f, &vals);
            for (idx, cols) in combinations(q, p).iter().enumerate() {
                let sub: Vec<Vec<Fp>> = (0..p).map(|i| cols.iter().map(|&j| vals[i * q + j]).collect()).collect();
                prop_assert_eq!(out[p * q + idx], leibniz(&f, &sub));
            }
        }
    }

    fn remap_vars(e: Expr, n: usize) -> Expr {
        match e {
            Expr::Var(i) => Expr::Var(i % n),
            Expr::Const(c) => Expr::Const(c),
            Expr::Add(a, b) => Expr::Add(Box::new(remap_vars(*a, n)), Box::new(remap_vars(*b, n))),
            Expr::Sub(a, b) => Expr::Sub(Box::new(remap_vars(*a, n)), Box::new(remap_vars(*b, n))),
            Expr::Mul(a, b) => Expr::Mul(Box::new(remap_vars(*a, n)), Box::new(remap_vars(*b, n))),
        }
    }
}
