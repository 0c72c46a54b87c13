//! Mode selection, retries and verification around the two homotopies.

use std::fmt;

use num_bigint::BigUint;

use crate::detstart::{self, bounds, Bounds, DegreeProfile};
use crate::error::{retry, Error, Result};
use crate::field::{PrimeField, RngKey};
use crate::homotopy::{filter_points, Filter};
use crate::oracle;
use crate::problem::ProblemSpec;
use crate::zdp::ZeroDimParam;

/// Default modulus, `2^62 − 57`.
pub const DEFAULT_PRIME: u64 = (1 << 62) - 57;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Auto,
    Column,
    Row,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Auto => "auto",
            Mode::Column => "column",
            Mode::Row => "row",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Mode, String> {
        match s {
            "auto" => Ok(Mode::Auto),
            "column" => Ok(Mode::Column),
            "row" => Ok(Mode::Row),
            _ => Err(format!("unknown mode '{s}' (expected auto, column or row)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub mode: Mode,
    pub simple: bool,
    pub prime: u64,
    pub seed: u64,
    pub retry_budget: u32,
}

impl Default for SolveOptions {
    fn default() -> SolveOptions {
        SolveOptions {
            mode: Mode::Auto,
            simple: false,
            prime: DEFAULT_PRIME,
            seed: 0,
            retry_budget: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checks {
    pub residual_zero: bool,
    /// Present in simple mode: the Jacobian has rank `n` at every point.
    pub simple_rank_full: Option<bool>,
    pub count_within_bound: bool,
}

impl Checks {
    pub fn all_passed(&self) -> bool {
        self.residual_zero && self.simple_rank_full != Some(false) && self.count_within_bound
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub zdp: ZeroDimParam,
    pub mode_used: Mode,
    pub bounds: Bounds,
    pub retries: u32,
    pub checks: Checks,
    pub seed: u64,
    pub prime: u64,
}

/// Column mode unless `c′ < c`.
pub fn choose_mode(b: &Bounds) -> Mode {
    if b.cprime < b.c {
        Mode::Row
    } else {
        Mode::Column
    }
}

pub fn solve(spec: &ProblemSpec, opts: &SolveOptions) -> Result<SolveReport> {
    let field = PrimeField::new(opts.prime)?;
    spec.check_dimension()?;
    if spec.g.iter().any(|g| g.degree() == 0 && !field.is_zero(g.eval(&field, &[]))) {
        return Ok(inconsistent(spec, &field, opts));
    }
    let profile = spec.profile()?;
    let b = bounds(&profile);
    let mode = match opts.mode {
        Mode::Auto => choose_mode(&b),
        m => m,
    };
    let e = if mode == Mode::Row { &b.eprime } else { &b.e };
    if BigUint::from(opts.prime) <= e * 2u32 {
        return Err(Error::TooLarge(format!(
            "the curve degree bound {e} needs a prime above {}; got {}",
            e * 2u32,
            opts.prime
        )));
    }
    let problem = spec.compile(&field)?;
    let filter = if opts.simple { Filter::Simple } else { Filter::Isolated };
    let key = RngKey::new(opts.seed);
    let (zdp, retries) = retry(opts.retry_budget, &key, |k| match mode {
        Mode::Row => detstart::row_degree(&field, &problem, &profile, &k, filter),
        _ => detstart::column_degree(&field, &problem, &profile, &k, filter),
    })?;
    let system = problem.system(&field);
    let residual_zero = zdp.residual_is_zero(&field, &system)?;
    let simple_rank_full = if opts.simple {
        Some(filter_points(&field, &zdp, &system, Filter::Simple, 1)?.degree() == zdp.degree())
    } else {
        None
    };
    let count_within_bound = BigUint::from(zdp.degree()) <= b.c.clone().min(b.cprime.clone());
    Ok(SolveReport {
        zdp,
        mode_used: mode,
        bounds: b,
        retries,
        checks: Checks {
            residual_zero,
            simple_rank_full,
            count_within_bound,
        },
        seed: opts.seed,
        prime: opts.prime,
    })
}

/// A nonzero constant among the equations: nothing to solve.
fn inconsistent(spec: &ProblemSpec, field: &PrimeField, opts: &SolveOptions) -> SolveReport {
    let degs: Vec<u32> = spec.f.iter().map(|e| e.degree()).collect();
    let gdeg = spec.g.iter().map(|e| e.degree()).collect();
    let b = bounds(&DegreeProfile::unchecked(spec.p, spec.q, &degs, gdeg));
    let mut rng = RngKey::new(opts.seed).rng();
    let lambda = (0..spec.n()).map(|_| field.random_nonzero(&mut rng)).collect();
    SolveReport {
        zdp: ZeroDimParam::empty(field, lambda),
        mode_used: if opts.mode == Mode::Row { Mode::Row } else { Mode::Column },
        bounds: b,
        retries: 0,
        checks: Checks {
            residual_zero: true,
            simple_rank_full: opts.simple.then_some(true),
            count_within_bound: true,
        },
        seed: opts.seed,
        prime: opts.prime,
    }
}

pub fn profile_bounds(spec: &ProblemSpec) -> Result<(DegreeProfile, Bounds)> {
    let profile = spec.profile()?;
    let b = bounds(&profile);
    Ok((profile, b))
}

/// Points of the solver output that are rational over the solving prime,
/// compared with exhaustive enumeration over the same prime.
#[derive(Clone, Debug)]
pub struct OracleReport {
    pub prime: u64,
    pub oracle_points: Vec<Vec<u64>>,
    pub solver_points: Vec<Vec<u64>>,
    /// Degree of the solver output not accounted for by rational points.
    pub solver_irrational: usize,
    pub contained: bool,
}

/// Enumerates `V_p(F) ∩ V(G)` over `F_small` and, when the solver output
/// was computed over the same prime, checks containment.
pub fn oracle_check(spec: &ProblemSpec, small: u64, budget: u64, report: Option<&SolveReport>) -> Result<OracleReport> {
    let field = PrimeField::new(small)?;
    let oracle_points = oracle::enumerate_variety(spec, &field, budget)?;
    let (solver_points, solver_irrational) = match report {
        Some(r) if r.prime == small => {
            let pts = r.zdp.rational_points(&field)?;
            let pts: Vec<Vec<u64>> = pts.iter().map(|x| x.iter().map(|&c| field.to_u64(c)).collect()).collect();
            (pts, r.zdp.irrational_count(&field))
        }
        _ => (Vec::new(), 0),
    };
    let contained = solver_points.iter().all(|x| oracle_points.binary_search(x).is_ok());
    Ok(OracleReport {
        prime: small,
        oracle_points,
        solver_points,
        solver_irrational,
        contained,
    })
}
