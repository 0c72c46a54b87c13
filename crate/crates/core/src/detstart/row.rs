use super::*;
use crate::error::retry;
use crate::field::RngKey;
use crate::slp::combinations;

/// `p×q` matrix with entries `N[i][i]` on the left `p×p` diagonal, zeros
/// elsewhere in that block, and a dense right block of `q − p` columns.
/// Every entry of row `i` is a product of `α_i` affine forms in `n`
/// variables.
#[derive(Clone, Debug)]
pub struct DiagonalMatrix {
    pub p: usize,
    pub q: usize,
    pub n: usize,
    pub diag: Vec<LinearFormProduct>,
    /// Row-major, `p × (q − p)`.
    pub right: Vec<LinearFormProduct>,
}

impl DiagonalMatrix {
    pub fn random<R: Rng + ?Sized>(f: &PrimeField, q: usize, n: usize, rdeg: &[u32], rng: &mut R) -> DiagonalMatrix {
        let p = rdeg.len();
        let diag = rdeg
            .iter()
            .map(|&a| LinearFormProduct::random(f, n, a as usize, rng))
            .collect();
        let mut right = Vec::with_capacity(p * (q - p));
        for &a in rdeg {
            for _ in p..q {
                right.push(LinearFormProduct::random(f, n, a as usize, rng));
            }
        }
        DiagonalMatrix { p, q, n, diag, right }
    }

    pub fn substitute(&self, f: &PrimeField, tail: &[AffineForm]) -> DiagonalMatrix {
        DiagonalMatrix {
            p: self.p,
            q: self.q,
            n: self.n - tail.len(),
            diag: self.diag.iter().map(|l| l.substitute(f, tail)).collect(),
            right: self.right.iter().map(|l| l.substitute(f, tail)).collect(),
        }
    }

    /// All `p·q` entries, row-major.
    pub fn entries(&self, f: &PrimeField) -> Vec<LinearFormProduct> {
        let zero = LinearFormProduct {
            factors: vec![AffineForm::constant(f, f.zero(), self.n)],
        };
        let w = self.q - self.p;
        let mut out = Vec::with_capacity(self.p * self.q);
        for i in 0..self.p {
            for j in 0..self.p {
                out.push(if i == j { self.diag[i].clone() } else { zero.clone() });
            }
            out.extend_from_slice(&self.right[i * w..(i + 1) * w]);
        }
        out
    }
}

/// Row-degree start system with its solutions.
#[derive(Clone, Debug)]
pub struct RowStart {
    pub system: StartSystem,
    pub r0: ZeroDimParam,
}

/// `V_p(N)` for `N` with `n = q − p + 1`, as a parametrization with the
/// given `lambda`. Points with `κ < n` vanishing diagonal factors come from
/// dense subproblems in `n − κ` variables.
pub fn row_degree_diagonal(f: &PrimeField, nmat: &DiagonalMatrix, lambda: &[Fp], key: &RngKey) -> Result<ZeroDimParam> {
    let (p, n) = (nmat.p, nmat.n);
    assert_eq!(n, nmat.q - p + 1);
    let w = nmat.q - p;
    let mut parts = Vec::new();
    let mut sub = 0u64;
    for kappa in 1..=p.min(n) {
        for rows in combinations(p, kappa) {
            let sizes: Vec<usize> = rows.iter().map(|&i| nmat.diag[i].degree()).collect();
            for r in index_tuples(&sizes) {
                let forms: Vec<&AffineForm> = rows.iter().zip(&r).map(|(&i, &k)| &nmat.diag[i].factors[k]).collect();
                let tail = eliminate(f, &forms)?;
                if kappa == n {
                    let pt: Vec<Fp> = tail.iter().map(|l| l.c0).collect();
                    parts.push(ZeroDimParam::from_points(f, &[pt], lambda.to_vec())?);
                    continue;
                }
                let m: Vec<LinearFormProduct> = rows
                    .iter()
                    .flat_map(|&i| nmat.right[i * w..(i + 1) * w].iter().map(|l| l.substitute(f, &tail)))
                    .collect();
                let rdeg: Vec<u32> = rows.iter().map(|&i| nmat.diag[i].degree() as u32).collect();
                sub += 1;
                let r = solve_dense(f, &m, &rdeg, w, n - kappa, &key.child(sub))?;
                parts.push(extend_coordinates(f, &r, &tail, lambda)?);
            }
        }
    }
    let rdeg: Vec<u64> = nmat.diag.iter().map(|l| l.degree() as u64).collect();
    let want = to_usize(&complete_sym(n, &rdeg), "start count")?;
    let r = if parts.is_empty() {
        ZeroDimParam::empty(f, lambda.to_vec())
    } else {
        ZeroDimParam::crt_combine(f, &parts)?
    };
    if r.degree() != want {
        return Err(Error::CountMismatch {
            expected: want as u64,
            found: r.degree() as u64,
        });
    }
    Ok(r)
}

/// Simple points of `V_κ(M)` for a dense `κ×q` matrix of form products in
/// `n = q − κ + 1` variables, by a homotopy from a diagonal matrix with the
/// same row degrees. Requires the generic count `S_n(α)`.
pub fn solve_dense(f: &PrimeField, m: &[LinearFormProduct], rdeg: &[u32], q: usize, n: usize, key: &RngKey) -> Result<ZeroDimParam> {
    let p = rdeg.len();
    assert_eq!(m.len(), p * q);
    assert_eq!(n, q - p + 1);
    let a: Vec<u64> = rdeg.iter().map(|&x| u64::from(x)).collect();
    let a1: Vec<u64> = a.iter().map(|x| x + 1).collect();
    let c = to_usize(&complete_sym(n, &a), "c'")?;
    let e = to_usize(&complete_sym(n, &a1), "e'")?;
    let target = forms_problem(f, n, p, q, m, &[])?;
    let (r, _) = retry(INNER_BUDGET, key, |k| {
        let mut rng = k.child(0).rng();
        let nmat = DiagonalMatrix::random(f, q, n, rdeg, &mut rng);
        let lambda = random_lambda(f, n, &mut rng);
        let r0 = row_degree_diagonal(f, &nmat, &lambda, &k.child(1))?;
        let start = StartSystem {
            p,
            q,
            entries: nmat.entries(f),
            eqs: Vec::new(),
        };
        let r = run_homotopy(f, &start, r0, &target, c, e, Filter::Simple)?;
        if r.degree() != c {
            return Err(Error::CountMismatch {
                expected: c as u64,
                found: r.degree() as u64,
            });
        }
        Ok(r)
    })?;
    Ok(r)
}

/// Start system respecting row degrees: `a_i` as in the column case and
/// `N` diagonal. For each choice of factors of the `a_i` the last `s`
/// variables are eliminated and the diagonal matrix is solved in the rest.
pub fn build_row_start(f: &PrimeField, profile: &DegreeProfile, key: &RngKey) -> Result<RowStart> {
    profile.validate()?;
    let count = to_usize(&bounds(profile).cprime, "c'")?;
    let (n, p, q, s) = (profile.n, profile.p, profile.q, profile.s);
    let mut rng = key.child(0).rng();
    let nmat = DiagonalMatrix::random(f, q, n, &profile.rdeg, &mut rng);
    let mus: Vec<LinearFormProduct> = profile
        .gdeg
        .iter()
        .map(|&d| LinearFormProduct::random(f, n, d as usize, &mut rng))
        .collect();
    let lambda = random_lambda(f, n, &mut rng);
    let gsizes: Vec<usize> = profile.gdeg.iter().map(|&d| d as usize).collect();
    let mut parts = Vec::new();
    for (t, u) in index_tuples(&gsizes).into_iter().enumerate() {
        let forms: Vec<&AffineForm> = u.iter().enumerate().map(|(i, &k)| &mus[i].factors[k]).collect();
        let tail = eliminate(f, &forms)?;
        let nu = nmat.substitute(f, &tail);
        let mut rl = key.child(2 + t as u64).rng();
        let sub_lambda = random_lambda(f, n - s, &mut rl);
        let r = row_degree_diagonal(f, &nu, &sub_lambda, &key.child(2 + t as u64))?;
        parts.push(extend_coordinates(f, &r, &tail, &lambda)?);
    }
    let r0 = ZeroDimParam::crt_combine(f, &parts)?;
    if r0.degree() != count {
        return Err(Error::CountMismatch {
            expected: count as u64,
            found: r0.degree() as u64,
        });
    }
    Ok(RowStart {
        system: StartSystem {
            p,
            q,
            entries: nmat.entries(f),
            eqs: mus,
        },
        r0,
    })
}

/// One attempt of the row-degree homotopy.
pub fn row_degree(f: &PrimeField, problem: &DetProblem, profile: &DegreeProfile, key: &RngKey, filter: Filter) -> Result<ZeroDimParam> {
    let b = bounds(profile);
    let (c, e) = (to_usize(&b.cprime, "c'")?, to_usize(&b.eprime, "e'")?);
    let start = build_row_start(f, profile, key)?;
    run_homotopy(f, &start.system, start.r0, problem, c, e, filter)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f() -> PrimeField {
        PrimeField::new(1_000_003).unwrap()
    }

    fn profile(p: usize, q: usize, rdeg: Vec<u32>, gdeg: Vec<u32>) -> DegreeProfile {
        let s = gdeg.len();
        DegreeProfile {
            p,
            q,
            s,
            n: q + s + 1 - p,
            cdeg: vec![*rdeg.iter().max().unwrap(); q],
            rdeg,
            gdeg,
        }
    }

    #[test]
    fn diagonal_count_is_complete_symmetric() {
        let f = f();
        for (q, rdeg) in [(2usize, vec![2u32]), (3, vec![1, 2]), (3, vec![2, 1, 1]), (4, vec![1, 2]), (3, vec![1])] {
            let p = rdeg.len();
            let n = q - p + 1;
            let key = RngKey::new(11);
            let nmat = DiagonalMatrix::random(&f, q, n, &rdeg, &mut key.rng());
            let lambda = random_lambda(&f, n, &mut key.child(5).rng());
            let (r, _) = retry(4, &key, |k| row_degree_diagonal(&f, &nmat, &lambda, &k)).unwrap();
            let a: Vec<u64> = rdeg.iter().map(|&x| x.into()).collect();
            assert_eq!(r.degree() as u64, u64::try_from(complete_sym(n, &a)).unwrap());
            let prob = forms_problem(&f, n, p, q, &nmat.entries(&f), &[]).unwrap();
            assert!(r.residual_is_zero(&f, &prob.system(&f)).unwrap());
        }
    }

    #[test]
    fn row_start_count() {
        let f = f();
        for prof in [profile(2, 3, vec![1, 2], vec![]), profile(2, 3, vec![2, 1], vec![2]), profile(1, 2, vec![2], vec![1])] {
            let (st, _) = retry(4, &RngKey::new(2), |k| build_row_start(&f, &prof, &k)).unwrap();
            assert_eq!(st.r0.degree() as u64, u64::try_from(&bounds(&prof).cprime).unwrap());
            let prob = forms_problem(&f, prof.n, prof.p, prof.q, &st.system.entries, &st.system.eqs).unwrap();
            assert!(st.r0.residual_is_zero(&f, &prob.system(&f)).unwrap());
        }
    }

    #[test]
    fn row_and_column_modes_agree() {
        // Row 1 has degree 1, row 2 degree 2: c' = S_2(1, 2) = 7 while the
        // column bound is E_2(2, 2, 2) = 12.
        let f = f();
        let mut rng = RngKey::new(9).rng();
        let mut ents = Vec::new();
        for deg in [1, 2] {
            for _ in 0..3 {
                ents.push(LinearFormProduct::random(&f, 2, deg, &mut rng));
            }
        }
        let problem = forms_problem(&f, 2, 2, 3, &ents, &[]).unwrap();
        let prof = DegreeProfile::from_degrees(2, 3, &[1, 1, 1, 2, 2, 2], vec![]).unwrap();
        let b = bounds(&prof);
        assert_eq!((u64::try_from(&b.c).unwrap(), u64::try_from(&b.cprime).unwrap()), (12, 7));
        let key = RngKey::new(4);
        let (rr, _) = retry(4, &key, |k| row_degree(&f, &problem, &prof, &k, Filter::Simple)).unwrap();
        let (rc, _) = retry(4, &key, |k| super::super::column_degree(&f, &problem, &prof, &k, Filter::Simple)).unwrap();
        assert_eq!(rr.degree(), 7);
        assert_eq!(rc.degree(), 7);
        let rc = ZeroDimParam::from_coordinates(&f, &rc.w, &rc.coordinates(&f).unwrap(), rr.lambda.clone()).unwrap();
        assert_eq!(rc, rr);
    }
}
