use altproj::alternating::centroid_start;
use altproj::consensus::{
    first_order_attainable_set, reach_time, second_order_zero_vel_set, simulate_trajectory,
    solve_min_time_consensus_traced, HeightScale,
};
use altproj::geometry::{ProjectableSet, SecondOrderCone};
use altproj::oracle::{grid_minmax, numeric_projection, GridSpec, OracleBudget};
use altproj::{Agent, Consensus, Point};

use crate::config::{ExperimentConfig, ModeSpec};
use crate::error::CliError;
use crate::output::{num, solution_json, trace_csv, trajectory_csv, write_file, write_stdout};

pub struct Context {
    pub cfg: ExperimentConfig,
    pub mode: ModeSpec,
    pub quiet: bool,
}

impl Context {
    fn note(&self, msg: &str) {
        if !self.quiet {
            eprintln!("{msg}");
        }
    }

    // Solves and writes whatever solution and trace files the config asks
    // for. The trace is written even when the solver fails.
    fn solve(&self) -> Result<Consensus, CliError> {
        let agents = self.cfg.agents();
        let mut steps = Vec::new();
        let result =
            solve_min_time_consensus_traced(&agents, &self.cfg.consensus_config(), self.mode.into(), &mut steps);
        if let Some(path) = &self.cfg.outputs.trace {
            write_file(path, &trace_csv(&steps, agents[0].x0.len()))?;
        }
        let r = result.map_err(CliError::Solver)?;
        if let Some(path) = &self.cfg.outputs.solution {
            write_file(path, &solution_json(&r, self.mode.name()))?;
        }
        let x: Vec<String> = r.x_consensus.iter().map(|&v| num(v)).collect();
        self.note(&format!(
            "consensus x = [{}] at t = {} s ({}, {} outer iterations, {} inner cycles)",
            x.join(", "),
            num(r.t_consensus),
            self.mode.name(),
            r.solver.outer_iters,
            r.solver.inner_cycles_total
        ));
        if r.experimental {
            self.note("note: nonzero initial velocities, solved with the experimental warped sets");
        }
        Ok(r)
    }
}

pub fn solve(ctx: &Context) -> Result<(), CliError> {
    let r = ctx.solve()?;
    if ctx.cfg.outputs.solution.is_none() {
        write_stdout(&solution_json(&r, ctx.mode.name()))?;
    }
    Ok(())
}

pub fn simulate(ctx: &Context) -> Result<(), CliError> {
    let r = ctx.solve()?;
    let agents = ctx.cfg.agents();
    let dt = ctx.cfg.outputs.dt;
    let mut trajectories = agents
        .iter()
        .map(|a| simulate_trajectory(a, &r.x_consensus, 0.0, dt))
        .collect::<Result<Vec<_>, _>>()
        .map_err(CliError::Solver)?;
    let horizon = trajectories.iter().map(|t| t.arrival).fold(r.t_consensus, f64::max);
    for (i, tr) in trajectories.iter_mut().enumerate() {
        let switches: Vec<String> = tr.schedule.switch_times().iter().map(|&s| num(s)).collect();
        ctx.note(&format!(
            "agent {}: arrives at t = {} s, switches at [{}]",
            i + 1,
            num(tr.arrival),
            switches.join(", ")
        ));
        tr.hold_until(horizon, dt);
    }
    let csv = trajectory_csv(&trajectories, agents[0].x0.len());
    match &ctx.cfg.outputs.trajectory {
        Some(path) => write_file(path, &csv),
        None => write_stdout(&csv),
    }
}

struct Check {
    name: String,
    solver: f64,
    oracle: f64,
    diff: f64,
    bound: f64,
}

impl Check {
    fn ok(&self) -> bool {
        self.diff <= self.bound
    }
}

// Tolerances for agreement beyond the oracles' own resolution.
const VALUE_TOL: f64 = 1e-3;
const EXPERIMENTAL_TOL: f64 = 5e-2;
const PROJECTION_REL_TOL: f64 = 1e-4;

fn grid_for(agents: &[Agent]) -> Result<GridSpec, CliError> {
    let dim = agents[0].x0.len();
    let mut lower = vec![f64::INFINITY; dim];
    let mut upper = vec![f64::NEG_INFINITY; dim];
    for a in agents {
        // Include where the agent would come to rest under full braking.
        let stop = a.x0[0] + 0.5 * a.v0 * a.v0.abs() / a.u_max;
        for (k, &x) in a.x0.iter().enumerate() {
            let xs = if k == 0 { [x, stop] } else { [x, x] };
            for v in xs {
                lower[k] = lower[k].min(v);
                upper[k] = upper[k].max(v);
            }
        }
    }
    for (l, u) in lower.iter_mut().zip(upper.iter_mut()) {
        let pad = 0.1 * (*u - *l) + 1.0;
        *l -= pad;
        *u += pad;
    }
    let resolution = match dim {
        1 => 200_001,
        2 => 1_001,
        _ => 101,
    };
    GridSpec::new(lower, upper, resolution).map_err(|e| CliError::Invalid(vec![format!("agents: {e}")]))
}

fn convex_sets(agents: &[Agent], height: HeightScale) -> Result<Option<Vec<SecondOrderCone<f64>>>, CliError> {
    let build = match height {
        HeightScale::Time => first_order_attainable_set,
        HeightScale::TimeSquared => second_order_zero_vel_set,
        HeightScale::WarpedTime => return Ok(None),
    };
    agents.iter().map(build).collect::<Result<Vec<_>, _>>().map(Some).map_err(CliError::Solver)
}

pub fn verify(ctx: &Context) -> Result<(), CliError> {
    let r = ctx.solve()?;
    let agents = ctx.cfg.agents();
    let mut checks = Vec::new();

    let grid = grid_for(&agents)?;
    let fs: Vec<_> = agents.iter().map(|a| move |x: &[f64]| reach_time(a, x).unwrap_or(f64::INFINITY)).collect();
    let g = grid_minmax(&fs, &grid).map_err(CliError::Oracle)?;
    let tol = if r.experimental { EXPERIMENTAL_TOL } else { VALUE_TOL };
    checks.push(Check {
        name: "min-max time".into(),
        solver: r.t_consensus,
        oracle: g.value,
        diff: (r.t_consensus - g.value).abs(),
        bound: tol + g.error_bound,
    });
    for (k, (&xs, &xg)) in r.x_consensus.iter().zip(&g.x_best).enumerate() {
        let name = if agents[0].x0.len() == 1 { "consensus x".to_string() } else { format!("consensus x{}", k + 1) };
        checks.push(Check { name, solver: xs, oracle: xg, diff: (xs - xg).abs(), bound: tol + g.spacing });
    }

    match convex_sets(&agents, r.height)? {
        Some(sets) => {
            let anchors: Vec<Vec<f64>> = agents.iter().map(|a| a.x0.clone()).collect();
            let p0 = centroid_start(&anchors, ctx.cfg.solver.t_min).map_err(CliError::Solver)?;
            let member = |z: &Point| sets.iter().all(|s| s.contains(z, 0.0).unwrap_or(false));
            let outer = &r.solver.trace;
            let mut picks = vec![0, outer.len().saturating_sub(1)];
            picks.dedup();
            for n in picks.into_iter().filter(|&n| n < outer.len()) {
                let input = if n == 0 { p0.clone() } else { outer[n - 1].b.clone() };
                let q = numeric_projection(member, &input, &OracleBudget::default()).map_err(CliError::Oracle)?;
                let a = &outer[n].a;
                checks.push(Check {
                    name: format!("projection, outer step {}", n + 1),
                    solver: input.dist(a),
                    oracle: q.distance,
                    diff: a.dist(&q.point),
                    bound: PROJECTION_REL_TOL * q.distance.max(1.0),
                });
            }
        }
        None => ctx.note("projection checks skipped: the warped sets are not convex"),
    }

    if !ctx.quiet {
        let mut table =
            format!("{:<26} {:>16} {:>16} {:>14} {:>14}  status\n", "check", "solver", "oracle", "|diff|", "bound");
        for c in &checks {
            table.push_str(&format!(
                "{:<26} {:>16} {:>16} {:>14} {:>14}  {}\n",
                c.name,
                num(c.solver),
                num(c.oracle),
                num(c.diff),
                num(c.bound),
                if c.ok() { "ok" } else { "MISMATCH" }
            ));
        }
        write_stdout(&table)?;
    }
    let bad = checks.iter().filter(|c| !c.ok()).count();
    if bad > 0 {
        return Err(CliError::Mismatch(bad));
    }
    Ok(())
}
