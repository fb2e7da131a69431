use std::time::Instant;

use gave::io::fmt_f64;
use gave::{
    certify, fixed_step_count, forward_euler_solve, random_solvable_ave, random_solvable_gave,
    settling_time_bound, settling_time_bound_lyyhc, EulerConfig, FlowParams, GeneratorSpec, ReferenceFlow,
};
use rayon::prelude::*;

use crate::failure::{CliResult, Failure, INPUT};
use crate::BenchArgs;

pub const HEADER: [&str; 10] = [
    "seed",
    "n",
    "gap",
    "t_max",
    "t_max_lyyhc",
    "k_star",
    "steps_used",
    "final_residual",
    "wall_time",
    "euler_error",
];

struct Row {
    seed: u64,
    t_max: f64,
    t_max_lyyhc: Option<f64>,
    k_star: u64,
    steps_used: usize,
    final_residual: f64,
    wall_time: f64,
    euler_error: f64,
}

fn run_one(args: &BenchArgs, params: &FlowParams, seed: u64) -> gave::Result<Row> {
    let spec = GeneratorSpec::new(args.n, args.gap, 1.0, seed)?;
    let (problem, x_star) = if args.identity_b {
        random_solvable_ave(&spec)?
    } else {
        random_solvable_gave(&spec)?
    };
    let cert = certify(&problem);
    let t_max = settling_time_bound(params, &cert)?.t_max;
    let t_max_lyyhc = if args.identity_b {
        Some(settling_time_bound_lyyhc(params, problem.a())?.t_max)
    } else {
        None
    };
    let config = EulerConfig {
        eta: args.eta,
        xi: args.xi,
        ..EulerConfig::default()
    };
    let k_star = fixed_step_count(&config, params, &cert)?;

    let start = Instant::now();
    let x0 = nalgebra::DVector::zeros(args.n);
    let traj = ReferenceFlow::new(&problem, params, t_max / 1e4, t_max)
        .stop_tol(args.tol)
        .solve(&x0)?;
    let plain = EulerConfig {
        max_iter: usize::try_from(k_star).unwrap_or(usize::MAX),
        tol: f64::MIN_POSITIVE,
        ..config
    };
    let euler_error = match forward_euler_solve(&problem, params, &plain, &x0) {
        Ok(log) => (log.last() - &x_star).norm(),
        Err(_) => f64::INFINITY,
    };
    let wall_time = if args.no_timing { 0.0 } else { start.elapsed().as_secs_f64() };

    Ok(Row {
        seed,
        t_max,
        t_max_lyyhc,
        k_star,
        steps_used: traj.steps,
        final_residual: traj.final_residual(),
        wall_time,
        euler_error,
    })
}

pub fn run(args: &BenchArgs) -> CliResult {
    let params = FlowParams::from_xi(1.0, 1.0, 1.0, args.xi)?;
    // Instance i uses seed + i; collecting an indexed parallel iterator keeps
    // rows in index order.
    let rows: Vec<Row> = (0..args.count as u64)
        .into_par_iter()
        .map(|i| run_one(args, &params, args.seed.wrapping_add(i)))
        .collect::<gave::Result<_>>()?;

    let file = std::fs::File::create(&args.out)
        .map_err(|e| Failure::new(INPUT, format!("cannot write {}: {e}", args.out.display())))?;
    let mut w = csv::Writer::from_writer(file);
    let csv_err = |e: csv::Error| Failure::new(INPUT, format!("cannot write {}: {e}", args.out.display()));
    w.write_record(HEADER).map_err(csv_err)?;
    for row in &rows {
        w.write_record([
            row.seed.to_string(),
            args.n.to_string(),
            fmt_f64(args.gap),
            fmt_f64(row.t_max),
            row.t_max_lyyhc.map(fmt_f64).unwrap_or_default(),
            row.k_star.to_string(),
            row.steps_used.to_string(),
            fmt_f64(row.final_residual),
            fmt_f64(row.wall_time),
            fmt_f64(row.euler_error),
        ])
        .map_err(csv_err)?;
    }
    w.flush()
        .map_err(|e| Failure::new(INPUT, format!("cannot write {}: {e}", args.out.display())))?;

    let unsolved = rows.iter().filter(|r| !(r.final_residual <= args.tol)).count();
    println!("wrote: {} ({} rows)", args.out.display(), rows.len());
    if unsolved == 0 {
        Ok(())
    } else {
        Err(Failure::numerical(format!("{unsolved} instances did not reach tol {:e}", args.tol)))
    }
}
