use std::path::{Path, PathBuf};

use ncpick::entropy;
use ncpick::fock::{self, MultiAnalyticSymbol};
use ncpick::grammian::{self, OperatorTuple};
use ncpick::interpolate::cs::{self, CSProblem};
use ncpick::interpolate::np::{self, NPProblem, Variant};
use ncpick::interpolate::sarason::{self, HSpec};
use ncpick::series::Realization;
use ncpick::toeplitz::MultiToeplitzOperator;
use ncpick::{linalg, CMat, Error, GradedIndex, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::io::{self, InputFile, Num, RealizationJson, SubspaceJson, SymbolJson};
use crate::report::{
    self, Certificate, EntropyCheck, Radius, ResidualRow, ResultFile, RunReport, RESULT_FORMAT,
};

/// Dimension budget for the norm certificate and the entropy cross-check.
const CHECK_DIM: usize = 2048;
/// Random ball points used for the `‖Θ(z)‖ ≤ t` checks.
const BALL_CHECKS: usize = 8;
const BALL_CHECK_RADIUS: f64 = 0.9;
/// Limit on the innerness residual of norm-optimal solutions.
const INNER_LIMIT: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct Options {
    pub degree: Option<usize>,
    pub tolerance: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub optimal: bool,
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
    pub report: Option<RunReport>,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
            report: None,
        }
    }

    fn from_error(e: Error, report: RunReport) -> Self {
        let code = if e.is_infeasible() { 2 } else { 1 };
        let mut report = report;
        if let Error::Infeasible {
            lambda_min: Some(l),
            ..
        } = &e
        {
            report.lambda_min = Some(Num(*l));
            report.feasible.get_or_insert(false);
        }
        report.error = Some(e.to_string());
        Failure {
            code,
            message: e.to_string(),
            report: Some(report),
        }
    }
}

pub type Outcome = Result<RunReport, Failure>;

pub fn default_degree(n: usize) -> usize {
    match n {
        0..=2 => 10,
        3 => 6,
        _ => 4,
    }
}

/// Largest degree `k ≤ m` whose truncation fits the check budget.
fn check_degree(n: usize, m: usize, d: usize) -> usize {
    let mut k = 0;
    while k < m
        && GradedIndex::new(n, k + 1)
            .map(|ix| ix.len() * d <= CHECK_DIM)
            .unwrap_or(false)
    {
        k += 1;
    }
    k
}

fn read(path: &Path) -> Result<(Vec<u8>, InputFile), Failure> {
    let bytes =
        std::fs::read(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Failure::input(format!("{}: not UTF-8", path.display())))?;
    let input =
        io::parse_input(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    Ok((bytes, input))
}

fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let tmp = path.with_extension("tmp~");
    std::fs::write(&tmp, contents)
        .map_err(|e| Failure::input(format!("{}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn lib(e: Error) -> Failure {
    Failure::input(e.to_string())
}

/// A problem file turned into solver inputs.
enum Problem {
    Np(NPProblem),
    Cs {
        p: CSProblem,
        t: Option<f64>,
    },
    Sarason {
        space: HSpec,
        r: MultiAnalyticSymbol,
        t: f64,
    },
}

impl Problem {
    fn n(&self) -> usize {
        match self {
            Problem::Np(p) => p.n(),
            Problem::Cs { p, .. } => p.n(),
            Problem::Sarason { r, .. } => r.n(),
        }
    }

    fn t(&self) -> Option<f64> {
        match self {
            Problem::Np(p) => Some(p.t),
            Problem::Cs { t, .. } => *t,
            Problem::Sarason { t, .. } => Some(*t),
        }
    }
}

fn build_problem(input: &InputFile, degree: Option<usize>) -> Result<Problem, Failure> {
    match input {
        InputFile::Ball(io::BallFile { t, points, b, c }) => {
            let points: Vec<Vec<C64>> = points.iter().map(|p| io::vector_in(p)).collect();
            let c = c
                .iter()
                .enumerate()
                .map(|(j, m)| io::matrix_in(m, &format!("C[{j}]")))
                .collect::<Result<Vec<_>, _>>();
            let c = c.map_err(Failure::input)?;
            let b = match b {
                Some(b) => b
                    .iter()
                    .enumerate()
                    .map(|(j, m)| io::matrix_in(m, &format!("B[{j}]")))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(Failure::input)?,
                None => c.iter().map(|m| linalg::eye(m.nrows())).collect(),
            };
            NPProblem::ball(points, b, c, t.0)
                .map(Problem::Np)
                .map_err(lib)
        }
        InputFile::Operatorial(io::OperatorialFile { t, z, b, c }) => {
            let ops = z
                .iter()
                .enumerate()
                .map(|(i, m)| io::matrix_in(m, &format!("Z[{i}]")))
                .collect::<Result<Vec<_>, _>>()
                .map_err(Failure::input)?;
            let z = OperatorTuple::new(ops).map_err(lib)?;
            let b = io::matrix_in(b, "B").map_err(Failure::input)?;
            let c = io::matrix_in(c, "C").map_err(Failure::input)?;
            NPProblem::operatorial(z, b, c, t.0)
                .map(Problem::Np)
                .map_err(lib)
        }
        InputFile::Cs(io::CsFile {
            n,
            t,
            degree: p,
            prescribed,
        }) => {
            let q = io::symbol_in(*n, prescribed, "prescribed").map_err(Failure::input)?;
            let q = match p {
                Some(p) if *p < q.degree() => {
                    return Err(Failure::input("prescribed: word longer than \"degree\""))
                }
                Some(p) => q.with_bound(*p).map_err(lib)?,
                None => q,
            };
            Ok(Problem::Cs {
                p: CSProblem::new(q),
                t: t.map(|x| x.0),
            })
        }
        InputFile::Sarason(io::SarasonFile { n, t, r, subspace }) => {
            let r = io::symbol_in(*n, r, "R").map_err(Failure::input)?;
            let space = match subspace {
                SubspaceJson::Cutoff { cutoff } => HSpec::DegreeCutoff { degree: *cutoff },
                SubspaceJson::Kernel { points, directions } => HSpec::KernelSpan {
                    points: points.iter().map(|p| io::vector_in(p)).collect(),
                    directions: directions
                        .iter()
                        .enumerate()
                        .map(|(j, m)| io::matrix_in(m, &format!("subspace.directions[{j}]")))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(Failure::input)?,
                    degree: degree.unwrap_or_else(|| default_degree(*n)),
                },
            };
            Ok(Problem::Sarason { space, r, t: t.0 })
        }
        other => Err(Failure::input(format!(
            "variant \"{}\" is not an interpolation problem",
            other.variant()
        ))),
    }
}

fn base_report(
    command: &str,
    input: &InputFile,
    bytes: &[u8],
    opts: &Options,
    degree: usize,
) -> RunReport {
    RunReport {
        command: command.into(),
        variant: input.variant().into(),
        input_digest: io::digest(bytes),
        seed: opts.seed,
        degree,
        tolerance: Num(opts.tolerance),
        ..RunReport::default()
    }
}

struct Solution {
    interpolant: MultiAnalyticSymbol,
    realization: Realization,
    /// Bound used for norm checks: t, or d_∞ on the optimal route.
    bound: f64,
}

pub fn solve(path: &Path, opts: &Options) -> Outcome {
    let (bytes, input) = read(path)?;
    let problem = build_problem(&input, opts.degree)?;
    let m = opts.degree.unwrap_or_else(|| default_degree(problem.n()));
    let mut rep = base_report("solve", &input, &bytes, opts, m);
    rep.route = Some(if opts.optimal { "optimal" } else { "central" }.into());
    rep.t = problem.t().map(Num);
    let sol =
        run_solver(&problem, opts, m, &mut rep).map_err(|e| Failure::from_error(e, rep.clone()))?;
    fill_checks(
        &problem,
        &sol.interpolant,
        &sol.realization,
        sol.bound,
        opts,
        &mut rep,
    )
    .map_err(|e| Failure::from_error(e, rep.clone()))?;
    if let Some(out) = &opts.out {
        let file = ResultFile {
            format: RESULT_FORMAT.into(),
            report: rep.clone(),
            interpolant: SymbolJson::from_symbol(&sol.interpolant),
            realization: Some(RealizationJson::from_realization(&sol.realization)),
        };
        write_atomic(out, &report::to_json(&file))?;
    }
    Ok(rep)
}

fn run_solver(
    problem: &Problem,
    opts: &Options,
    m: usize,
    rep: &mut RunReport,
) -> ncpick::Result<Solution> {
    match problem {
        Problem::Np(p) => {
            let f = np::np_feasible(p)?;
            rep.feasible = Some(f.feasible);
            rep.strict = Some(f.strict);
            rep.lambda_min = Some(Num(f.lambda_min));
            if opts.optimal {
                let opt = np::np_optimal_ball(p)?;
                rep.d_inf = Some(Num(opt.d_inf));
                if opt.non_unique {
                    rep.flags
                        .push("top generalized eigenvalue is repeated".into());
                }
                let realization = opt.realization()?;
                let interpolant = realization.coefficients(m)?;
                return Ok(Solution {
                    interpolant,
                    realization,
                    bound: opt.d_inf,
                });
            }
            let sol = np::np_central(p)?;
            let e = np::np_central_entropy(p)?;
            rep.entropy = Some(Num(e.entropy));
            rep.delta = Some(io::matrix_out(&e.delta));
            let realization = sol.realization()?;
            let interpolant = realization.coefficients(m)?;
            Ok(Solution {
                interpolant,
                realization,
                bound: p.t,
            })
        }
        Problem::Cs { p, t } => {
            rep.d_inf = Some(Num(cs::cs_distance(p)?));
            if opts.optimal {
                let opt = cs::cs_optimal(p, m)?;
                return Ok(Solution {
                    interpolant: opt.phi,
                    realization: opt.realization,
                    bound: opt.d_inf,
                });
            }
            let t = t.ok_or_else(|| {
                Error::arg("\"t\" is required for the central route (or pass --optimal)")
            })?;
            let sol = cs::cs_central(p, t, m)?;
            rep.feasible = Some(true);
            rep.strict = Some(true);
            rep.entropy = Some(Num(sol.entropy));
            rep.delta = Some(io::matrix_out(&sol.delta));
            Ok(Solution {
                interpolant: sol.interpolant,
                realization: sol.realization,
                bound: t,
            })
        }
        Problem::Sarason { space, r, t } => {
            if opts.optimal {
                return Err(Error::arg(
                    "the optimal route is available for cs and ball problems",
                ));
            }
            let sol = sarason::sarason_central(space, r, *t, m)?;
            rep.d_inf = Some(Num(sol.norm));
            rep.feasible = Some(true);
            rep.strict = Some(true);
            rep.entropy = Some(Num(sol.entropy));
            rep.delta = Some(io::matrix_out(&sol.delta));
            Ok(Solution {
                interpolant: sol.interpolant,
                realization: sol.realization,
                bound: *t,
            })
        }
    }
}

fn ball_points(n: usize, seed: u64) -> Vec<Vec<C64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..BALL_CHECKS)
        .map(|_| {
            let v: Vec<C64> = (0..n)
                .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let nrm = v
                .iter()
                .map(|z| z.norm_sqr())
                .sum::<f64>()
                .sqrt()
                .max(1e-300);
            let r = rng.random_range(0.0..BALL_CHECK_RADIUS);
            v.into_iter().map(|z| z * (r / nrm)).collect()
        })
        .collect()
}

/// Residual table, norm certificate and entropy cross-check for an interpolant.
fn fill_checks(
    problem: &Problem,
    coeffs: &MultiAnalyticSymbol,
    realization: &Realization,
    bound: f64,
    opts: &Options,
    rep: &mut RunReport,
) -> ncpick::Result<()> {
    let tol = opts.tolerance;
    let m = coeffs.degree_bound();
    let mut rows = Vec::new();
    match problem {
        Problem::Np(p) => match &p.variant {
            Variant::Ball { points, b, c } => {
                for (j, z) in points.iter().enumerate() {
                    let v = realization.eval_point(z)?;
                    rows.push(ResidualRow::new(
                        format!("node {j}"),
                        linalg::max_abs(&(&b[j] * v - &c[j])),
                        tol * (1.0 + linalg::max_abs(&c[j])),
                    ));
                }
            }
            Variant::Operatorial { z, b, c } => {
                let v = realization.eval_tangential(z, b)?;
                rows.push(ResidualRow::new(
                    "tangential",
                    linalg::max_abs(&(v - c)),
                    tol * (1.0 + linalg::max_abs(c)),
                ));
            }
        },
        Problem::Cs { p, .. } => {
            let scale = p
                .prescribed()
                .coeffs()
                .iter()
                .map(linalg::max_abs)
                .fold(0.0, f64::max);
            rows.push(ResidualRow::new(
                "prescribed",
                cs::constraint_residual(p, coeffs),
                tol * (1.0 + scale),
            ));
        }
        Problem::Sarason { space, r, .. } => match space {
            HSpec::DegreeCutoff { degree } => {
                let q = CSProblem::new(r.with_bound(*degree)?);
                let scale = q
                    .prescribed()
                    .coeffs()
                    .iter()
                    .map(linalg::max_abs)
                    .fold(0.0, f64::max);
                rows.push(ResidualRow::new(
                    "prescribed",
                    cs::constraint_residual(&q, coeffs),
                    tol * (1.0 + scale),
                ));
            }
            HSpec::KernelSpan {
                points, directions, ..
            } => {
                for (j, (z, dir)) in points.iter().zip(directions).enumerate() {
                    let want = dir.adjoint() * r.evaluate_commutative(z)?;
                    let got = dir.adjoint() * realization.eval_point(z)?;
                    rows.push(ResidualRow::new(
                        format!("node {j}"),
                        linalg::max_abs(&(got - &want)),
                        tol * (1.0 + linalg::max_abs(&want)),
                    ));
                }
            }
        },
    }
    let series = realization.coefficients(m)?;
    let dev = (0..coeffs.coeffs().len())
        .map(|g| linalg::max_abs(&(coeffs.coeff(g) - series.coeff(g))))
        .fold(0.0, f64::max);
    let scale = coeffs
        .coeffs()
        .iter()
        .map(linalg::max_abs)
        .fold(0.0, f64::max);
    rows.push(ResidualRow::new("coefficients", dev, tol * (1.0 + scale)));
    for (k, z) in ball_points(problem.n(), opts.seed).iter().enumerate() {
        let v = linalg::op_norm(&realization.eval_point(z)?);
        rows.push(ResidualRow::new(format!("ball point {k}"), v, bound + tol));
    }
    let d = coeffs.d_in().max(coeffs.d_out());
    let k = check_degree(problem.n(), m, d);
    if opts.optimal {
        if bound > 0.0 {
            let inner = cs::inner_residual(realization, bound, k)?;
            rows.push(ResidualRow::new("inner", inner, INNER_LIMIT));
        }
    } else {
        let e = entropy::entropy_of_rational(
            realization,
            bound,
            check_degree(problem.n(), m, coeffs.d_in()),
        )?;
        rep.entropy_check = Some(EntropyCheck {
            degree: e.truncation_degree,
            value: Num(e.entropy),
            gap: Num(e.monotonicity_gap),
        });
    }
    let cert = fock::compression_norm(coeffs, k, tol)?;
    rows.push(ResidualRow::new("norm", cert.value, bound + tol));
    rep.norm_certificate = Some(Certificate {
        value: Num(cert.value),
        previous: Num(cert.previous),
        degree: cert.degree,
        gap: Num(cert.gap()),
        stable: cert.stable,
    });
    rep.residuals = rows;
    Ok(())
}

pub fn entropy(path: &Path, opts: &Options) -> Outcome {
    let (bytes, input) = read(path)?;
    let n = match &input {
        InputFile::Symbol(io::SymbolFile { n, .. })
        | InputFile::Toeplitz(io::ToeplitzFile { n, .. }) => *n,
        other => {
            return Err(Failure::input(format!(
                "entropy expects a symbol or toeplitz file, got \"{}\"",
                other.variant()
            )))
        }
    };
    let m = opts.degree.unwrap_or_else(|| default_degree(n));
    let mut rep = base_report("entropy", &input, &bytes, opts, m);
    let result = match &input {
        InputFile::Symbol(io::SymbolFile { t, symbol, .. }) => {
            rep.t = Some(*t);
            io::symbol_in(n, symbol, "symbol")
                .map_err(Error::Argument)
                .and_then(|s| entropy::entropy_of_contraction(&s, t.0, m))
        }
        InputFile::Toeplitz(io::ToeplitzFile { kernel, .. }) => {
            toeplitz_in(n, kernel, m).and_then(|t| entropy::prediction_entropy(&t))
        }
        _ => unreachable!(),
    };
    let e = result.map_err(|e| Failure::from_error(e, rep.clone()))?;
    rep.entropy = Some(Num(e.entropy));
    rep.delta = Some(io::matrix_out(&e.delta));
    rep.monotonicity_gap = Some(Num(e.monotonicity_gap));
    Ok(rep)
}

fn toeplitz_in(
    n: usize,
    kernel: &io::PairsJson,
    m: usize,
) -> ncpick::Result<MultiToeplitzOperator> {
    let k = io::symbol_in(n, kernel, "kernel").map_err(Error::Argument)?;
    if k.d_in() != k.d_out() {
        return Err(Error::arg("kernel blocks must be square"));
    }
    let trunc = fock::FockTruncation::new(n, m, k.d_in())?;
    MultiToeplitzOperator::from_coeffs(&trunc, &k)
}

pub fn factor(path: &Path, opts: &Options) -> Outcome {
    let (bytes, input) = read(path)?;
    let InputFile::Toeplitz(io::ToeplitzFile { n, kernel }) = &input else {
        return Err(Failure::input(format!(
            "factor expects a toeplitz file, got \"{}\"",
            input.variant()
        )));
    };
    let m = opts.degree.unwrap_or_else(|| default_degree(*n));
    let mut rep = base_report("factor", &input, &bytes, opts, m);
    let run = |rep: &mut RunReport| -> ncpick::Result<(MultiAnalyticSymbol, Realization)> {
        let t = toeplitz_in(*n, kernel, m)?;
        rep.lambda_min = Some(Num(t.lambda_min()?));
        let of = entropy::square_outer_factor(&t)?;
        rep.feasible = Some(true);
        rep.strict = Some(true);
        let e = entropy::prediction_entropy(&t)?;
        rep.entropy = Some(Num(e.entropy));
        rep.delta = Some(io::matrix_out(&e.delta));
        let phi0 = of.at_zero();
        let ld = entropy::ln_det(&linalg::herm(&(phi0.adjoint() * phi0)), 1.0);
        let tol = opts.tolerance;
        let scale = linalg::max_abs(t.coeffs().at_zero()).max(1.0);
        rep.residuals.push(ResidualRow::new(
            "factorization",
            of.residual(&t)?,
            tol * scale,
        ));
        rep.residuals.push(ResidualRow::new(
            "entropy",
            (ld - e.entropy).abs(),
            tol * (1.0 + e.entropy.abs()),
        ));
        Ok((of.coefficients(m)?, of.realization.clone()))
    };
    let (phi, real) = run(&mut rep).map_err(|e| Failure::from_error(e, rep.clone()))?;
    if let Some(out) = &opts.out {
        let file = ResultFile {
            format: RESULT_FORMAT.into(),
            report: rep.clone(),
            interpolant: SymbolJson::from_symbol(&phi),
            realization: Some(RealizationJson::from_realization(&real)),
        };
        write_atomic(out, &report::to_json(&file))?;
    }
    Ok(rep)
}

pub fn radius(path: &Path, opts: &Options) -> Outcome {
    let (bytes, input) = read(path)?;
    let ops = match &input {
        InputFile::Tuple(io::TupleFile { z })
        | InputFile::Operatorial(io::OperatorialFile { z, .. }) => z,
        other => {
            return Err(Failure::input(format!(
                "radius expects a tuple file, got \"{}\"",
                other.variant()
            )))
        }
    };
    let ops = ops
        .iter()
        .enumerate()
        .map(|(i, m)| io::matrix_in(m, &format!("Z[{i}]")))
        .collect::<Result<Vec<CMat>, _>>()
        .map_err(Failure::input)?;
    let z = OperatorTuple::new(ops).map_err(lib)?;
    let r = grammian::spectral_radius(&z, opts.tolerance, grammian::RADIUS_MAX_ITER);
    let mut rep = base_report("radius", &input, &bytes, opts, 0);
    rep.radius = Some(Radius {
        estimate: Num(r.estimate),
        converged: r.converged,
        iterations: r.iterations,
    });
    if !r.converged {
        rep.flags.push("power iteration did not converge".into());
    }
    Ok(rep)
}

/// Exit code for a verification that recomputed but found disagreements.
pub const VERIFY_FLAGGED: i32 = 3;

pub fn verify(result_path: &Path, problem_path: &Path, opts: &Options) -> Outcome {
    let text = std::fs::read_to_string(result_path)
        .map_err(|e| Failure::input(format!("{}: {e}", result_path.display())))?;
    let stored: ResultFile = serde_json::from_str(&text)
        .map_err(|e| Failure::input(format!("{}: malformed result: {e}", result_path.display())))?;
    if stored.format != RESULT_FORMAT {
        return Err(Failure::input(format!(
            "unknown result format \"{}\"",
            stored.format
        )));
    }
    let (bytes, input) = read(problem_path)?;
    if io::digest(&bytes) != stored.report.input_digest {
        return Err(Failure::input(
            "result was produced from a different problem file",
        ));
    }
    if stored.report.command != "solve" {
        return Err(Failure::input(format!(
            "cannot verify a \"{}\" result",
            stored.report.command
        )));
    }
    let coeffs = stored.interpolant.to_symbol().map_err(Failure::input)?;
    let realization = stored
        .realization
        .as_ref()
        .ok_or_else(|| Failure::input("result has no realization"))?
        .to_realization()
        .map_err(Failure::input)?;
    let old = &stored.report;
    let sopts = Options {
        degree: stored.report.degree.into(),
        tolerance: old.tolerance.0,
        seed: old.seed,
        out: None,
        optimal: old.route.as_deref() == Some("optimal"),
    };
    let problem = build_problem(&input, sopts.degree)?;
    let raised = opts.degree.filter(|&d| d != old.degree);
    let coeffs = match raised {
        Some(d) => realization.coefficients(d).map_err(lib)?,
        None => coeffs,
    };
    let bound = if sopts.optimal {
        old.d_inf
            .map(|x| x.0)
            .ok_or_else(|| Failure::input("optimal result without d_inf"))?
    } else {
        problem
            .t()
            .ok_or_else(|| Failure::input("problem has no t"))?
    };
    let mut rep = base_report("verify", &input, &bytes, &sopts, coeffs.degree_bound());
    rep.route = old.route.clone();
    rep.t = old.t;
    rep.d_inf = old.d_inf;
    fill_checks(&problem, &coeffs, &realization, bound, &sopts, &mut rep)
        .map_err(|e| Failure::from_error(e, rep.clone()))?;
    let tol = sopts.tolerance;
    for row in &rep.residuals {
        if !row.ok {
            rep.flags.push(format!(
                "{} residual {:e} above limit {:e}",
                row.label, row.value.0, row.limit.0
            ));
        }
    }
    if raised.is_none() {
        for (new, prev) in rep.residuals.iter().zip(&old.residuals) {
            let agree = new.label == prev.label
                && (new.value.0 - prev.value.0).abs() <= tol * (1.0 + prev.value.0.abs());
            if !agree {
                rep.flags.push(format!(
                    "stored residual \"{}\" disagrees with the recomputed value",
                    prev.label
                ));
            }
        }
        if rep.residuals.len() != old.residuals.len() {
            rep.flags
                .push("stored residual table has a different shape".into());
        }
    }
    if let (Some(new), Some(prev)) = (&rep.norm_certificate, &old.norm_certificate) {
        let ok = if new.degree == prev.degree {
            (new.value.0 - prev.value.0).abs() <= tol * (1.0 + prev.value.0)
        } else if new.degree > prev.degree {
            new.value.0 >= prev.value.0 - tol
        } else {
            new.value.0 <= prev.value.0 + tol
        };
        if !ok {
            rep.flags
                .push("norm certificate is inconsistent with the stored one".into());
        }
    }
    if let (Some(new), Some(prev)) = (&rep.entropy_check, &old.entropy_check) {
        let same = (new.value.0 == prev.value.0)
            || (new.value.0 - prev.value.0).abs() <= tol * (1.0 + prev.value.0.abs());
        if new.degree == prev.degree && !same {
            rep.flags
                .push("entropy check disagrees with the stored value".into());
        }
    }
    rep.entropy = old.entropy;
    if rep.flags.is_empty() {
        Ok(rep)
    } else {
        let msg = format!("{} verification flag(s)", rep.flags.len());
        Err(Failure {
            code: VERIFY_FLAGGED,
            message: msg,
            report: Some(rep),
        })
    }
}
