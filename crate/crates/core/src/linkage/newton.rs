//! Revolution guessing and the damped Newton iteration on `𝒢(Δ) = 0`.

use crate::integrals::{energy, DeltaCorrections, UnknownsX};
use crate::lambert::{lambert_from_energy, revolutions, LambertBranch, LambertCase};
use crate::linkage::residual::{LinkageProblem, ResidualScale, Route};
use crate::linkage::{
    build_solution, BranchFailure, LinkageOptions, LinkageOutcome, LinkageSolution, Method, SolutionMethod, MIN_GAP_S,
};
use crate::radar::Attributable;
use crate::{Error, Result, Vec4};

const MAX_HALVINGS: usize = 4;
const GROWTH_LIMIT: f64 = 10.0;
/// A step-size stop is only accepted once the scaled residual is this small.
const STALL_RESIDUAL: f64 = 1e-6;

/// A `(route, branch)` pair to start Newton from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub route: Route,
    pub branch: LambertBranch,
    pub method: SolutionMethod,
}

fn mean_motion(energy: f64, mu: f64) -> Option<f64> {
    (energy < 0.0).then(|| (-2.0 * energy).powf(1.5) / mu)
}

/// Lambert case minimising `|ℒ|` at `Δ = 0` for a given `k`.
fn best_case(problem: &LinkageProblem, x: &UnknownsX, k: u32) -> Option<LambertBranch> {
    let geoms = problem.geometries(&DeltaCorrections::zero()).ok()?;
    let [g1, g2] = &geoms;
    let e1 = energy(g1, x.xi1, x.zeta1);
    let d = (g2.r - g1.r).norm();
    LambertCase::ALL
        .into_iter()
        .filter_map(|case| {
            let branch = LambertBranch { case, k };
            let v = lambert_from_energy(e1, g1.r_norm, g2.r_norm, d, branch, problem.dt, problem.mu).ok()?;
            Some((branch, v.value.abs()))
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(b, _)| b)
}

/// Candidate `(k, case)` pairs from the `Δ = 0` orbits.
///
/// The linear reduction does not force equal energies, so the revolution
/// count can differ between the two epochs; both values are kept. The
/// quadratic reduction yields one candidate per real root.
pub fn guess_revolutions(problem: &LinkageProblem, method: Method) -> Vec<Candidate> {
    let Ok(geoms) = problem.geometries(&DeltaCorrections::zero()) else {
        return Vec::new();
    };
    let [g1, g2] = &geoms;
    let mut out = Vec::new();
    let mut push = |c: Candidate| {
        if !out.contains(&c) {
            out.push(c);
        }
    };
    match method {
        Method::Linear => {
            let Ok((x, _, _)) = problem.unknowns(&geoms, Route::Linear) else {
                return Vec::new();
            };
            for e in [energy(g1, x.xi1, x.zeta1), energy(g2, x.xi2, x.zeta2)] {
                let Some(n) = mean_motion(e, problem.mu) else { continue };
                if let Some(branch) = best_case(problem, &x, revolutions(n, problem.dt)) {
                    push(Candidate { route: Route::Linear, branch, method: SolutionMethod::Linear });
                }
            }
        }
        Method::Quadratic => {
            let Ok((_, _, roots)) = problem.unknowns(&geoms, Route::QuadraticIndex(0)) else {
                return Vec::new();
            };
            for i in 0..roots.len() {
                let Ok((x, _, _)) = problem.unknowns(&geoms, Route::QuadraticIndex(i)) else { continue };
                let Some(n) = mean_motion(energy(g1, x.xi1, x.zeta1), problem.mu) else { continue };
                let method = if i == 0 { SolutionMethod::QuadraticRoot1 } else { SolutionMethod::QuadraticRoot2 };
                if let Some(branch) = best_case(problem, &x, revolutions(n, problem.dt)) {
                    push(Candidate { route: Route::QuadraticIndex(i), branch, method });
                }
            }
        }
    }
    out
}

/// Result of one Newton run before conversion to orbital elements.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonRun {
    pub delta: DeltaCorrections,
    pub x: UnknownsX,
    pub iterations: usize,
    pub residual_norm: f64,
    pub trace: Vec<f64>,
    pub lambert_clamps: usize,
}

fn next_route(route: Route, x: &UnknownsX) -> Route {
    match route {
        Route::Linear => Route::Linear,
        _ => Route::QuadraticNearest(x.zeta2),
    }
}

/// Iterates `Δ ← Δ − J⁻¹𝒢` from `Δ = 0` on one candidate.
pub fn newton_iterate(problem: &LinkageProblem, candidate: &Candidate, opts: &LinkageOptions) -> Result<NewtonRun> {
    let scale = ResidualScale::new(problem.att1, problem.att2, problem.mu);
    let mut delta = Vec4::zeros();
    let mut route = candidate.route;
    let mut trace = Vec::new();
    let mut clamps = 0;
    for it in 0..opts.max_iterations {
        let rr = problem.reduced_residual(&DeltaCorrections::from_vec(&delta), route, candidate.branch)?;
        let norm = scale.norm(&rr.g);
        trace.push(norm);
        clamps += usize::from(rr.lambert.clamped);
        log::debug!("{} {} iter {it}: |G| = {norm:e}", candidate.method.name(), candidate.branch);
        if norm < opts.residual_tolerance {
            return Ok(NewtonRun {
                delta: DeltaCorrections::from_vec(&delta),
                x: rr.x,
                iterations: it,
                residual_norm: norm,
                trace,
                lambert_clamps: clamps,
            });
        }
        let step = rr.j.lu().solve(&(-rr.g)).filter(|s| s.iter().all(|v| v.is_finite())).ok_or(Error::JacobianSingular)?;
        let here = next_route(route, &rr.x);

        let mut lambda = 1.0;
        let mut accepted = None;
        let mut last_err = None;
        for _ in 0..=MAX_HALVINGS {
            let trial = delta + lambda * step;
            let trial_delta = DeltaCorrections::from_vec(&trial);
            match trial_delta.check_guard().and_then(|_| problem.residual_value(&trial_delta, here, candidate.branch)) {
                Ok((g, x)) if scale.norm(&g) <= GROWTH_LIMIT * norm => {
                    accepted = Some((trial, x));
                    break;
                }
                Ok((_, x)) => {
                    accepted = Some((trial, x));
                    last_err = None;
                }
                Err(e) => {
                    accepted = None;
                    last_err = Some(e);
                }
            }
            lambda *= 0.5;
        }
        let Some((trial, x)) = accepted else {
            return Err(last_err.unwrap_or(Error::JacobianSingular));
        };
        let moved = (trial - delta).amax();
        delta = trial;
        route = next_route(here, &x);
        if moved < opts.step_tolerance {
            let rr = problem.reduced_residual(&DeltaCorrections::from_vec(&delta), route, candidate.branch)?;
            let norm = scale.norm(&rr.g);
            trace.push(norm);
            if norm < STALL_RESIDUAL {
                return Ok(NewtonRun {
                    delta: DeltaCorrections::from_vec(&delta),
                    x: rr.x,
                    iterations: it + 1,
                    residual_norm: norm,
                    trace,
                    lambert_clamps: clamps,
                });
            }
            return Err(Error::NoConvergence { iterations: it + 1, residual: norm, trace });
        }
    }
    let residual = trace.last().copied().unwrap_or(f64::NAN);
    Err(Error::NoConvergence { iterations: opts.max_iterations, residual, trace })
}

/// Checks the epochs of a pair of attributables.
pub fn check_pair(att1: &Attributable, att2: &Attributable) -> Result<f64> {
    let dt = att2.t_bar.seconds_since(&att1.t_bar);
    if dt.abs() < MIN_GAP_S {
        return Err(Error::DegenerateTimes);
    }
    if dt < 0.0 {
        return Err(Error::InvalidInput("attributables must be in time order".into()));
    }
    Ok(dt)
}

fn same_solution(a: &LinkageSolution, b: &LinkageSolution) -> bool {
    (a.delta.to_vec() - b.delta.to_vec()).amax() < 1e-8 && ((a.elements[0].a - b.elements[0].a) / a.elements[0].a).abs() < 1e-8
}

/// Runs Newton on every candidate branch and collects the distinct
/// solutions, smallest angle correction first.
///
/// Failures of individual branches are reported in the outcome; only
/// malformed input is an error.
pub fn newton_solve(att1: &Attributable, att2: &Attributable, method: Method, opts: &LinkageOptions) -> Result<LinkageOutcome> {
    check_pair(att1, att2)?;
    let problem = LinkageProblem::new(att1, att2, opts.mu);
    let candidates = guess_revolutions(&problem, method);
    let mut outcome = LinkageOutcome::default();
    if candidates.is_empty() {
        let error = match problem
            .geometries(&DeltaCorrections::zero())
            .and_then(|g| problem.unknowns(&g, if method == Method::Linear { Route::Linear } else { Route::QuadraticIndex(0) }))
        {
            Err(e) => e,
            Ok(_) => Error::NoBranch,
        };
        let m = if method == Method::Linear { SolutionMethod::Linear } else { SolutionMethod::QuadraticRoot1 };
        outcome.failures.push(BranchFailure { method: m, branch: None, error });
        return Ok(outcome);
    }
    for cand in &candidates {
        let result = newton_iterate(&problem, cand, opts).and_then(|run| {
            let geoms = problem.geometries(&run.delta)?;
            build_solution(
                &geoms,
                run.x,
                run.delta,
                Some(cand.branch),
                cand.method,
                run.iterations,
                run.residual_norm,
                run.trace,
                run.lambert_clamps,
                opts.mu,
            )
        });
        match result {
            Ok(sol) => {
                if !outcome.solutions.iter().any(|s| same_solution(s, &sol)) {
                    outcome.solutions.push(sol);
                }
            }
            Err(error) => {
                log::info!("branch {} ({}) failed: {error}", cand.branch, cand.method.name());
                outcome.failures.push(BranchFailure { method: cand.method, branch: Some(cand.branch), error });
            }
        }
    }
    outcome.solutions.sort_by(|a, b| a.delta.max_abs().total_cmp(&b.delta.max_abs()));
    if let Some(first) = outcome.solutions.first_mut() {
        first.preferred = true;
    }
    Ok(outcome)
}
