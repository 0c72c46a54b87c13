use detsolve_core::problem::ProblemSpec;
use detsolve_core::solve::{oracle_check, profile_bounds, solve, Mode, SolveOptions};
use detsolve_core::{Error, PrimeField};

fn spec(text: &str) -> ProblemSpec {
    ProblemSpec::parse(text).unwrap()
}

fn small(seed: u64) -> SolveOptions {
    SolveOptions {
        prime: 1009,
        seed,
        ..SolveOptions::default()
    }
}

#[test]
fn fat_origin_is_kept_only_as_isolated() {
    // rank [x1², x2²] < 1 only at the origin, with multiplicity 4.
    let s = spec("vars x1 x2\nmatrix 1 2\nx1^2 | x2^2\n");
    let f = PrimeField::new(1009).unwrap();
    let iso = solve(&s, &small(0)).unwrap();
    assert_eq!(iso.zdp.rational_points(&f).unwrap(), vec![vec![f.zero(), f.zero()]]);
    let simple = solve(&s, &SolveOptions { simple: true, ..small(0) }).unwrap();
    assert!(simple.zdp.is_empty());
}

#[test]
fn twisted_cubic_points() {
    // rank [[1, x, y], [x, y, z]] < 2 is the twisted cubic; one plane cuts
    // it in x³ + x² + x − 3 = 0.
    let s = spec("vars x y z\nmatrix 2 3\n1 | x | y\nx | y | z\neq x + y + z - 3\n");
    let r = solve(&s, &SolveOptions::default()).unwrap();
    assert_eq!(r.zdp.degree(), 3);
    assert!(r.checks.all_passed());
    assert!(matches!(
        ProblemSpec::parse("vars x y\nmatrix 2 3\n1 | x | y\nx | y | x\neq x\n"),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn sample_matrix_matches_enumeration() {
    let s = spec("vars x1 x2\nmatrix 2 3\nx1 | x2^2 - 1 | x1*x2 + 3\n1 | x1 + x2 | x2^2\n");
    let (_, b) = profile_bounds(&s).unwrap();
    assert_eq!(b.c, 8u32.into());
    for mode in [Mode::Column, Mode::Row] {
        let r = solve(&s, &SolveOptions { mode, ..small(3) }).unwrap();
        assert!(r.checks.all_passed());
        let o = oracle_check(&s, 1009, 1 << 22, Some(&r)).unwrap();
        assert!(o.contained);
        assert_eq!(o.solver_points.len(), o.oracle_points.len());
    }
}

#[test]
fn seeds_change_lambda_not_points() {
    let s = spec("vars x y\nmatrix 1 2\nx^2 - 1 | y^2 - 4\n");
    let f = PrimeField::new(1009).unwrap();
    let a = solve(&s, &small(1)).unwrap();
    let b = solve(&s, &small(2)).unwrap();
    assert_ne!(a.zdp.lambda, b.zdp.lambda);
    let (mut pa, mut pb) = (a.zdp.rational_points(&f).unwrap(), b.zdp.rational_points(&f).unwrap());
    pa.sort();
    pb.sort();
    assert_eq!(pa, pb);
    assert_eq!(pa.len(), 4);
}
