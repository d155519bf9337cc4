use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use altproj::consensus::{HeightScale, Trajectory};
use altproj::{Consensus, Step};
use serde::Serialize;

use crate::error::CliError;

/// Rounds to 9 significant digits.
pub fn sig9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

/// CSV cell: 9 significant digits, plain notation in the everyday range.
pub fn num(x: f64) -> String {
    let r = sig9(x);
    if r == 0.0 {
        "0".to_string()
    } else if (1e-4..1e9).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

fn sig9v(v: &[f64]) -> Vec<f64> {
    v.iter().copied().map(sig9).collect()
}

#[derive(Serialize)]
struct SegmentOut {
    duration: f64,
    u: f64,
}

#[derive(Serialize)]
struct ScheduleOut {
    agent_id: usize,
    direction: Vec<f64>,
    segments: Vec<SegmentOut>,
    switch_times: Vec<f64>,
    arrival: f64,
}

#[derive(Serialize)]
struct OuterOut {
    outer_iter: usize,
    inner_cycles: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    gap: f64,
}

#[derive(Serialize)]
struct SolverOut {
    x_star: Vec<f64>,
    height_star: f64,
    distance: f64,
    inner_cycles_total: usize,
    outer_iters: usize,
    touches_plane: bool,
    outer: Vec<OuterOut>,
}

#[derive(Serialize)]
struct SolutionOut<'a> {
    mode: &'a str,
    experimental: bool,
    height_scale: &'a str,
    x_consensus: Vec<f64>,
    t_consensus: f64,
    solver: SolverOut,
    message_counts: Option<Vec<usize>>,
    schedules: Vec<ScheduleOut>,
}

fn height_name(h: HeightScale) -> &'static str {
    match h {
        HeightScale::Time => "time",
        HeightScale::TimeSquared => "time_squared",
        HeightScale::WarpedTime => "warped_time",
    }
}

fn joined(p: &altproj::Point) -> Vec<f64> {
    let mut v = sig9v(&p.x);
    v.push(sig9(p.t));
    v
}

pub fn solution_json(r: &Consensus, mode: &str) -> String {
    let s = &r.solver;
    let out = SolutionOut {
        mode,
        experimental: r.experimental,
        height_scale: height_name(r.height),
        x_consensus: sig9v(&r.x_consensus),
        t_consensus: sig9(r.t_consensus),
        solver: SolverOut {
            x_star: sig9v(&s.x_star),
            height_star: sig9(s.t_star),
            distance: sig9(s.distance),
            inner_cycles_total: s.inner_cycles_total,
            outer_iters: s.outer_iters,
            touches_plane: s.touches_plane,
            outer: s
                .trace
                .iter()
                .map(|b| OuterOut {
                    outer_iter: b.outer_iter,
                    inner_cycles: b.inner_cycles,
                    a: joined(&b.a),
                    b: joined(&b.b),
                    gap: sig9(b.gap),
                })
                .collect(),
        },
        message_counts: r.message_counts.clone(),
        schedules: r
            .schedules
            .iter()
            .enumerate()
            .map(|(i, sch)| ScheduleOut {
                agent_id: i + 1,
                direction: sig9v(&sch.direction),
                segments: sch
                    .segments
                    .iter()
                    .map(|g| SegmentOut { duration: sig9(g.duration), u: sig9(g.u) })
                    .collect(),
                switch_times: sig9v(&sch.switch_times()),
                arrival: sig9(sch.total_duration()),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&out).expect("solution serializes");
    text.push('\n');
    text
}

fn axis_header(name: &str, dim: usize) -> String {
    if dim == 1 {
        name.to_string()
    } else {
        (1..=dim).map(|k| format!("{name}{k}")).collect::<Vec<_>>().join(",")
    }
}

fn cells(v: &[f64]) -> String {
    v.iter().map(|&x| num(x)).collect::<Vec<_>>().join(",")
}

pub fn trace_csv(steps: &[Step], dim: usize) -> String {
    let mut s = format!("cycle,agent_id,{},height,increment_norm,flag,bregman_event\n", axis_header("x", dim));
    for r in steps {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.cycle,
            r.agent_id,
            cells(&r.guess.x),
            num(r.guess.t),
            num(r.increment_norm),
            r.flag.as_u8(),
            u8::from(r.bregman_event)
        );
    }
    s
}

pub fn trajectory_csv(trajectories: &[Trajectory<f64>], dim: usize) -> String {
    let mut s = format!("agent_id,t,{},{},{}\n", axis_header("x", dim), axis_header("v", dim), axis_header("u", dim));
    for (i, tr) in trajectories.iter().enumerate() {
        for p in &tr.samples {
            let _ = writeln!(s, "{},{},{},{},{}", i + 1, num(p.t), cells(&p.x), cells(&p.v), cells(&p.u));
        }
    }
    s
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    let wrap = |source| CliError::Write { path: path.to_path_buf(), source };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(wrap)?;
    }
    std::fs::write(path, text).map_err(wrap)
}

pub fn write_stdout(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|source| CliError::Write { path: "<stdout>".into(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig9(7.064495963817), 7.06449596);
        assert_eq!(num(-5.552742), "-5.552742");
        assert_eq!(num(1.0 / 3.0), "0.333333333");
        assert_eq!(num(1.23456789012e-12), "1.23456789e-12");
        assert_eq!(num(0.0), "0");
        assert_eq!(num(2.0), "2");
    }

    #[test]
    fn headers() {
        assert_eq!(trace_csv(&[], 1), "cycle,agent_id,x,height,increment_norm,flag,bregman_event\n");
        assert_eq!(trajectory_csv(&[], 2), "agent_id,t,x1,x2,v1,v2,u1,u2\n");
    }
}
