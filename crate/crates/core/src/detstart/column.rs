use std::collections::HashSet;

use super::*;
use crate::field::RngKey;
use crate::slp::combinations;

/// Start system respecting column degrees, with its solutions.
#[derive(Clone, Debug)]
pub struct ColumnStart {
    pub system: StartSystem,
    pub r0: ZeroDimParam,
}

/// Entry `(i, j)` of `L` is `j^i λ_j` (1-based), with `λ_j` a product of
/// `δ_j` random affine forms; `a_i` is a product of `γ_i` random forms.
/// The common zeros are found by choosing one factor of each `a_i` and one
/// factor in each of `n − s` columns.
pub fn build_column_start(f: &PrimeField, profile: &DegreeProfile, key: &RngKey) -> Result<ColumnStart> {
    profile.validate()?;
    let count = to_usize(&bounds(profile).c, "c")?;
    let (n, p, q) = (profile.n, profile.p, profile.q);
    let mut rng = key.child(0).rng();
    let lams: Vec<LinearFormProduct> = profile
        .cdeg
        .iter()
        .map(|&d| LinearFormProduct::random(f, n, d as usize, &mut rng))
        .collect();
    let mus: Vec<LinearFormProduct> = profile
        .gdeg
        .iter()
        .map(|&d| LinearFormProduct::random(f, n, d as usize, &mut rng))
        .collect();
    let mut entries = Vec::with_capacity(p * q);
    for i in 1..=p {
        for (j, lam) in lams.iter().enumerate() {
            let w = f.pow(f.from_u64(j as u64 + 1), i as u64);
            entries.push(lam.clone().scaled(f, w));
        }
    }

    let gsizes: Vec<usize> = profile.gdeg.iter().map(|&d| d as usize).collect();
    let mut points = Vec::with_capacity(count);
    for u in index_tuples(&gsizes) {
        let side: Vec<&AffineForm> = u.iter().enumerate().map(|(i, &k)| &mus[i].factors[k]).collect();
        for cols in combinations(q, n - profile.s) {
            let sizes: Vec<usize> = cols.iter().map(|&j| lams[j].degree()).collect();
            for v in index_tuples(&sizes) {
                let mut forms = side.clone();
                forms.extend(cols.iter().zip(&v).map(|(&j, &k)| &lams[j].factors[k]));
                points.push(solve_point(f, &forms)?);
            }
        }
    }
    let distinct: HashSet<&Vec<Fp>> = points.iter().collect();
    if points.len() != count || distinct.len() != count {
        return Err(Error::CountMismatch {
            expected: count as u64,
            found: distinct.len() as u64,
        });
    }
    let lambda = random_lambda(f, n, &mut key.child(1).rng());
    let r0 = ZeroDimParam::from_points(f, &points, lambda)?;
    Ok(ColumnStart {
        system: StartSystem {
            p,
            q,
            entries,
            eqs: mus,
        },
        r0,
    })
}

/// One attempt of the column-degree homotopy.
pub fn column_degree(f: &PrimeField, problem: &DetProblem, profile: &DegreeProfile, key: &RngKey, filter: Filter) -> Result<ZeroDimParam> {
    let b = bounds(profile);
    let (c, e) = (to_usize(&b.c, "c")?, to_usize(&b.e, "e")?);
    let start = build_column_start(f, profile, key)?;
    run_homotopy(f, &start.system, start.r0, problem, c, e, filter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::retry;

    fn f() -> PrimeField {
        PrimeField::new(1_000_003).unwrap()
    }

    fn profile(p: usize, q: usize, cdeg: Vec<u32>, gdeg: Vec<u32>) -> DegreeProfile {
        let s = gdeg.len();
        DegreeProfile {
            p,
            q,
            s,
            n: q + s + 1 - p,
            rdeg: vec![*cdeg.iter().max().unwrap(); p],
            cdeg,
            gdeg,
        }
    }

    #[test]
    fn start_count_is_c() {
        let f = f();
        for (prof, c) in [
            (profile(3, 4, vec![2, 1, 5, 7], vec![]), 73),
            (profile(2, 3, vec![1, 2, 2], vec![]), 8),
            (profile(2, 3, vec![1, 1, 2], vec![2]), 2 * 5),
            (profile(1, 1, vec![3], vec![2]), 6),
        ] {
            for seed in 0..3 {
                let st = build_column_start(&f, &prof, &RngKey::new(seed)).unwrap();
                assert_eq!(st.r0.degree(), c);
                assert_eq!(st.system.entries.len(), prof.p * prof.q);
                // The start fibre solves the start system.
                let target = forms_problem(&f, prof.n, prof.p, prof.q, &st.system.entries, &st.system.eqs).unwrap();
                assert!(st.r0.residual_is_zero(&f, &target.system(&f)).unwrap());
            }
        }
    }

    #[test]
    fn generic_linear_pencil() {
        // A random 2×3 matrix of affine forms in two variables drops rank at
        // binom(3, 1) = 3 points.
        let f = f();
        let mut rng = RngKey::new(7).rng();
        let ents: Vec<LinearFormProduct> = (0..6).map(|_| LinearFormProduct::random(&f, 2, 1, &mut rng)).collect();
        let problem = forms_problem(&f, 2, 2, 3, &ents, &[]).unwrap();
        let prof = profile(2, 3, vec![1, 1, 1], vec![]);
        let (r, _) = retry(4, &RngKey::new(1), |k| column_degree(&f, &problem, &prof, &k, Filter::Simple)).unwrap();
        assert_eq!(r.degree(), 3);
        assert!(r.residual_is_zero(&f, &problem.system(&f)).unwrap());
    }

    #[test]
    fn side_equation() {
        // det [[x, y], [1, x]] = x² − y with x + y = 2: x ∈ {1, −2}.
        let f = f();
        let fg = crate::slp::Slp::build(&f, 2, |b, xs| {
            let one = b.one();
            let two = b.from_base(f.from_u64(2));
            let g = b.sub(&b.add(&xs[0], &xs[1]), &two);
            vec![xs[0], xs[1], one, xs[0], g]
        });
        let problem = DetProblem::new(2, 2, 2, 1, fg).unwrap();
        let prof = DegreeProfile::from_degrees(2, 2, &[1, 1, 0, 1], vec![1]);
        // The second column has degrees (1, 1); the first (1, 0).
        let prof = prof.unwrap();
        let (r, _) = retry(4, &RngKey::new(3), |k| column_degree(&f, &problem, &prof, &k, Filter::Isolated)).unwrap();
        let pts = r.rational_points(&f).unwrap();
        let want: Vec<Vec<Fp>> = vec![vec![f.one(), f.one()], vec![f.from_i64(-2), f.from_u64(4)]];
        assert_eq!(pts.len(), 2);
        for w in &want {
            assert!(pts.contains(w));
        }
    }
}
