use std::time::Instant;

use capquad_core::cubature::{solve_weights, SolveError};
use capquad_core::geometry::MAX_RADIUS;
use capquad_core::mz::{self, Bracket, CellParams, CellStats, DoublingWeight, VerificationReport};
use capquad_core::point_sets::{covering_multiplicity, greedy_maximal_set, maximal_set_for, NodeSet};
use capquad_core::poly_space::PolySpace;
use capquad_core::quadrature::domain_moments;
use capquad_core::{Cap, Collar, Domain, SpherePoint};
use serde::Serialize;

use crate::args::{BallArgs, Command, Common, DomainArgs, Input, MomentsArgs, PointsArgs, SolveArgs, VerifyKind};
use crate::args::{WeightArgs, WeightKind};
use crate::error::{flag, CliError};
use crate::files::{cells_to_csv, emit, read_rule_file, to_canonical_json, GridSpec, ReportFileV1, RuleFileV1};

/// MZ brackets must satisfy `C/c` at most this.
pub const MZ_SPREAD_LIMIT: f64 = 20.0;
/// Max/min brackets must lie in `[1/L, L]`.
pub const MAXMIN_LIMIT: f64 = 20.0;
/// Weighted brackets must lie in `[1/L, L]`.
pub const WEIGHTED_LIMIT: f64 = 50.0;
pub const CHANGE_OF_VAR_LIMIT: f64 = 1e-9;
pub const PROJECTION_LIMIT: f64 = 1e-8;

pub fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Points(a) => points(a),
        Command::Solve(a) => solve(a),
        Command::Moments(a) => moments(a),
        Command::Verify { kind } => verify(kind),
    }
}

fn build_domain(a: &DomainArgs) -> Result<Domain, CliError> {
    if a.d != 1 && a.d != 2 {
        return Err(CliError::Input(format!("--d: only 1 and 2 are supported, got {}", a.d)));
    }
    let center = match &a.center {
        Some(c) if c.len() != a.d + 1 => {
            return Err(CliError::Input(format!("--center: expected {} coordinates, got {}", a.d + 1, c.len())))
        }
        Some(c) => flag("center", SpherePoint::new(c))?,
        None => SpherePoint::north_pole(a.d)?,
    };
    if !(a.alpha > 0.0 && a.alpha <= MAX_RADIUS) {
        return Err(CliError::Input(format!("--alpha: must lie in (0, π − 0.1], got {}", a.alpha)));
    }
    match a.collar_beta {
        None => Ok(flag("alpha", Cap::new(center, a.alpha))?.into()),
        Some(b) => Ok(flag("collar-beta", Collar::new(center, a.alpha, b))?.into()),
    }
}

fn points(a: PointsArgs) -> Result<(), CliError> {
    let domain = build_domain(&a.domain)?;
    if a.degree == 0 {
        return Err(CliError::Input("--degree: must be at least 1".into()));
    }
    if !(a.delta > 0.0 && a.delta.is_finite()) {
        return Err(CliError::Input(format!("--delta: must be positive, got {}", a.delta)));
    }
    // δ > 1 yields sets too sparse for positive cubature; allowed for probing.
    let nodes = if a.delta <= 1.0 {
        maximal_set_for(&domain, a.degree, a.delta, a.seed)?
    } else {
        let mut set = greedy_maximal_set(&domain, a.delta / a.degree as f64, a.seed)?;
        set.degree = a.degree;
        set.delta = a.delta;
        set
    };
    emit(a.out.as_deref(), &to_canonical_json(&RuleFileV1::from_nodes(&nodes))?)
}

fn solve(a: SolveArgs) -> Result<(), CliError> {
    let file = read_rule_file(&a.points)?;
    let nodes = file.node_set()?;
    let degree = a.degree.unwrap_or(file.degree);
    if !(a.tol >= capquad_core::cubature::MIN_TOL) {
        return Err(CliError::Input(format!("--tol: must be at least {:e}", capquad_core::cubature::MIN_TOL)));
    }
    match solve_weights(&nodes, degree, a.tol) {
        Ok(rule) => emit(a.out.as_deref(), &to_canonical_json(&RuleFileV1::from_rule(&rule))?),
        Err(SolveError::Infeasible { residual, zero_nodes }) => {
            Err(CliError::Infeasible { residual, zero_nodes: zero_nodes.len(), suggested_delta: file.delta / 2.0 })
        }
        Err(SolveError::Failed(e)) => Err(e.into()),
    }
}

#[derive(Serialize)]
struct Moment {
    label: String,
    value: f64,
}

#[derive(Serialize)]
struct MomentsOut {
    d: usize,
    alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    collar_beta: Option<f64>,
    degree: usize,
    moments: Vec<Moment>,
}

fn moments(a: MomentsArgs) -> Result<(), CliError> {
    let domain = build_domain(&a.domain)?;
    let space = flag("degree", PolySpace::new(a.domain.d, a.degree))?;
    let m = flag("degree", domain_moments(&domain, a.degree))?;
    let out = MomentsOut {
        d: a.domain.d,
        alpha: a.domain.alpha,
        collar_beta: a.domain.collar_beta,
        degree: a.degree,
        moments: space.labels().into_iter().zip(m).map(|(label, value)| Moment { label, value }).collect(),
    };
    emit(None, &to_canonical_json(&out)?)
}

struct Loaded {
    file: RuleFileV1,
    nodes: NodeSet,
}

fn load(input: &Input, need_weights: bool) -> Result<Loaded, CliError> {
    let path = match (&input.rule, &input.points) {
        (Some(r), _) => r,
        (None, Some(p)) if !need_weights => p,
        (None, Some(_)) => return Err(CliError::Input("--rule: this check needs a solved rule file".into())),
        (None, None) => return Err(CliError::Input("--rule or --points is required".into())),
    };
    let file = read_rule_file(path)?;
    let nodes = file.node_set()?;
    Ok(Loaded { file, nodes })
}

fn grid_of(l: &Loaded, degree: usize) -> GridSpec {
    GridSpec {
        d: l.file.d,
        alpha: l.file.alpha,
        collar_beta: l.file.collar_beta,
        degree,
        delta: Some(l.file.delta),
        node_count: Some(l.nodes.len()),
        node_seed: Some(l.file.generator.seed),
        ..Default::default()
    }
}

fn params(grid: &GridSpec, p: Option<f64>, beta: Option<f64>) -> CellParams {
    CellParams {
        d: grid.d,
        alpha: grid.alpha,
        collar_beta: grid.collar_beta,
        n: Some(grid.degree),
        delta: grid.delta,
        p,
        beta,
    }
}

fn cell(quantity: &str, params: CellParams, ratios: Bracket, estimate: Option<f64>) -> CellStats {
    CellStats { quantity: quantity.into(), params, ratios, estimate }
}

fn weight_of(w: &WeightArgs) -> Result<DoublingWeight, CliError> {
    match w.weight {
        WeightKind::Constant => Ok(DoublingWeight::Constant),
        WeightKind::BoundaryPower => flag("gamma", DoublingWeight::boundary_power_with(w.gamma, w.n_ref)),
    }
}

fn check_ball(b: &BallArgs) -> Result<(), CliError> {
    if !(b.beta >= 1.0) {
        return Err(CliError::Input(format!("--beta: must be at least 1, got {}", b.beta)));
    }
    if b.ball_samples == 0 {
        return Err(CliError::Input("--ball-samples: must be positive".into()));
    }
    Ok(())
}

fn check_common(c: &Common) -> Result<(), CliError> {
    if !(c.p >= 1.0 && c.p.is_finite()) {
        return Err(CliError::Input(format!("--p: must be a finite number at least 1, got {}", c.p)));
    }
    if c.trials == 0 {
        return Err(CliError::Input("--trials: must be positive".into()));
    }
    Ok(())
}

fn require(ok: bool, what: impl FnOnce() -> String) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Assertion(what()))
    }
}

fn finite_estimates(report: &VerificationReport) -> Result<(), CliError> {
    require(report.all_finite(), || format!("{} produced a non-finite value", report.inequality))
}

struct Outcome {
    report: VerificationReport,
    grid: GridSpec,
    assertion: Result<(), CliError>,
}

fn verify(kind: VerifyKind) -> Result<(), CliError> {
    let start = Instant::now();
    let (common, outcome) = match kind {
        VerifyKind::Mz { input, poly_degree, common } => {
            check_common(&common)?;
            let l = load(&input, true)?;
            let rule = l.file.rule()?;
            let n = poly_degree.unwrap_or(rule.degree);
            let b = flag("poly-degree", mz::mz_bracket_with(&rule, common.p, n, common.trials, common.seed))?;
            let mut grid = grid_of(&l, n);
            grid.p = Some(common.p);
            let mut report = VerificationReport::new("mz", common.trials, common.seed);
            report.cells.push(cell("mz", params(&grid, Some(common.p), None), b, Some(b.spread())));
            let assertion = require(b.min > 0.0 && b.spread() <= MZ_SPREAD_LIMIT, || {
                format!("mz bracket [{}, {}] has spread above {MZ_SPREAD_LIMIT}", b.min, b.max)
            });
            (common, Outcome { report, grid, assertion })
        }
        VerifyKind::Osc { input, degree, ball, common } => {
            check_common(&common)?;
            check_ball(&ball)?;
            let l = load(&input, false)?;
            let n = degree.unwrap_or(l.file.degree);
            let est =
                mz::osc_constant(&l.nodes, n, common.p, ball.beta, common.trials, ball.ball_samples, common.seed)?;
            let mut grid = grid_of(&l, n);
            grid.p = Some(common.p);
            grid.beta = Some(ball.beta);
            grid.ball_samples = Some(ball.ball_samples);
            let mut report = VerificationReport::new("osc", common.trials, common.seed);
            report.cells.push(cell(
                "osc",
                params(&grid, Some(common.p), Some(ball.beta)),
                est.ratios,
                Some(est.constant),
            ));
            let assertion = finite_estimates(&report);
            (common, Outcome { report, grid, assertion })
        }
        VerifyKind::Sieve { input, degree, common } => {
            check_common(&common)?;
            let l = load(&input, false)?;
            let n = degree.unwrap_or(l.file.degree);
            let est =
                mz::large_sieve_constant(&l.nodes.domain, &l.nodes.points, n, common.p, common.trials, common.seed)?;
            let mut grid = grid_of(&l, n);
            grid.p = Some(common.p);
            let mut report = VerificationReport::new("sieve", common.trials, common.seed);
            report.cells.push(cell("sieve", params(&grid, Some(common.p), None), est.ratios, Some(est.constant)));
            report.notes.push(format!("tau = {}", est.tau));
            let assertion = finite_estimates(&report);
            (common, Outcome { report, grid, assertion })
        }
        VerifyKind::Maxmin { input, degree, ball, common } => {
            check_common(&common)?;
            check_ball(&ball)?;
            let l = load(&input, false)?;
            let n = degree.unwrap_or(l.file.degree);
            let est = mz::maxmin_equivalence(
                &l.nodes,
                n,
                common.p,
                ball.beta,
                common.trials,
                ball.ball_samples,
                common.seed,
            )?;
            let mut grid = grid_of(&l, n);
            grid.p = Some(common.p);
            grid.beta = Some(ball.beta);
            grid.ball_samples = Some(ball.ball_samples);
            let ps = params(&grid, Some(common.p), Some(ball.beta));
            let mut report = VerificationReport::new("maxmin", common.trials, common.seed);
            report.cells.push(cell("max_sum", ps.clone(), est.max_sum, Some(est.max_sum.max)));
            report.cells.push(cell("min_sum", ps, est.min_sum, Some(est.min_sum.min)));
            let (lo, hi) = (1.0 / MAXMIN_LIMIT, MAXMIN_LIMIT);
            let assertion = require(est.ordered && est.max_sum.within(lo, hi) && est.min_sum.within(lo, hi), || {
                format!(
                    "max-sum [{}, {}] or min-sum [{}, {}] outside [{lo}, {hi}] or unordered",
                    est.max_sum.min, est.max_sum.max, est.min_sum.min, est.min_sum.max
                )
            });
            (common, Outcome { report, grid, assertion })
        }
        VerifyKind::Bernstein { alpha, degree, weight, common } => {
            check_common(&common)?;
            let w = weight_of(&weight)?;
            let est = flag("alpha", mz::bernstein_check_d1(alpha, degree, common.p, &w, common.trials, common.seed))?;
            let grid = GridSpec { d: 1, alpha, degree, p: Some(common.p), weight: Some(w), ..Default::default() };
            let mut report = VerificationReport::new("bernstein", common.trials, common.seed);
            report.cells.push(cell("bernstein", params(&grid, Some(common.p), None), est.ratios, Some(est.constant)));
            let assertion = finite_estimates(&report);
            (common, Outcome { report, grid, assertion })
        }
        VerifyKind::WeightedMz { input, degree, weight, ball, common } => {
            check_common(&common)?;
            check_ball(&ball)?;
            let w = weight_of(&weight)?;
            let l = load(&input, false)?;
            let n = degree.unwrap_or(l.file.degree);
            let est = mz::weighted_mz(
                &l.nodes.domain,
                &w,
                &l.nodes,
                n,
                common.p,
                common.trials,
                ball.ball_samples,
                common.seed,
            )?;
            let mut grid = grid_of(&l, n);
            grid.p = Some(common.p);
            grid.weight = Some(w);
            grid.ball_samples = Some(ball.ball_samples);
            let ps = params(&grid, Some(common.p), Some(1.0));
            let mut report = VerificationReport::new("weighted-mz", common.trials, common.seed);
            report.cells.push(cell("wn_ratio", ps.clone(), est.wn_ratio, None));
            report.cells.push(cell("max_sum", ps.clone(), est.max_sum, None));
            report.cells.push(cell("min_sum", ps, est.min_sum, None));
            let (lo, hi) = (1.0 / WEIGHTED_LIMIT, WEIGHTED_LIMIT);
            let assertion = require([est.wn_ratio, est.max_sum, est.min_sum].iter().all(|b| b.within(lo, hi)), || {
                format!("a weighted bracket lies outside [{lo}, {hi}]")
            });
            (common, Outcome { report, grid, assertion })
        }
        VerifyKind::Cov { input, beta, probes, common } => {
            if probes < capquad_core::point_sets::DEFAULT_PROBE_RESOLUTION {
                return Err(CliError::Input("--probes: must be at least 4".into()));
            }
            let l = load(&input, false)?;
            let m = flag("beta", covering_multiplicity(&l.nodes.domain, &l.nodes, beta, probes))?;
            let mut grid = grid_of(&l, l.file.degree);
            grid.beta = Some(beta);
            let mut report = VerificationReport::new("cov", common.trials, common.seed);
            report.cells.push(cell(
                "multiplicity",
                params(&grid, None, Some(beta)),
                Bracket::from_values(&[m as f64]),
                Some(m as f64),
            ));
            let assertion = require(m >= 1, || "some probe is not covered".into());
            (common, Outcome { report, grid, assertion })
        }
        VerifyKind::ChangeOfVar { d, alpha, degree, common } => {
            if common.trials == 0 {
                return Err(CliError::Input("--trials: must be positive".into()));
            }
            if d != 1 && d != 2 {
                return Err(CliError::Input(format!("--d: only 1 and 2 are supported, got {d}")));
            }
            let cap = flag("alpha", Cap::north(d, alpha))?;
            let cov = flag("alpha", mz::change_of_variables_check(&cap, degree, common.trials, common.seed))?;
            let proj = flag("degree", mz::dilation_projection_residual(d, degree, common.trials, common.seed))?;
            let grid = GridSpec { d, alpha, degree, ..Default::default() };
            let ps = params(&grid, None, None);
            let mut report = VerificationReport::new("change-of-var", common.trials, common.seed);
            report.cells.push(cell("change_of_variables", ps.clone(), Bracket::from_values(&[cov]), Some(cov)));
            report.cells.push(cell("dilation_projection", ps, Bracket::from_values(&[proj]), Some(proj)));
            let assertion = require(cov <= CHANGE_OF_VAR_LIMIT && proj <= PROJECTION_LIMIT, || {
                format!("change of variables {cov:e} or projection residual {proj:e} above tolerance")
            });
            (common, Outcome { report, grid, assertion })
        }
    };
    let Outcome { mut report, grid, assertion } = outcome;
    if common.record_time {
        report.runtime_seconds = Some(start.elapsed().as_secs_f64());
    }
    if let Some(path) = &common.csv {
        emit(Some(path), &cells_to_csv(&report.cells)?)?;
    }
    emit(common.report.as_deref(), &to_canonical_json(&ReportFileV1::new(report, grid))?)?;
    if common.assert {
        assertion
    } else {
        Ok(())
    }
}
