use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use gave::io::{self, fmt_f64};
use gave::{
    fixed_step_count, forward_euler_solve, gave_solution_to_hlcp, hlcp_to_gave, lcp_to_gave,
    random_solvable_ave, random_solvable_gave, random_spd_lcp, recover_lcp_solution, settling_time_bound,
    settling_time_bound_lyyhc, verify_lcp, Certificate, EulerConfig, FlowParams, GaveError, GaveProblem,
    GeneratorSpec, ReferenceFlow, Trajectory,
};
use nalgebra::DVector;

use crate::failure::{CliResult, Failure, INPUT, NUMERICAL, UNCERTIFIED};
use crate::{ConvertArgs, Direction, FlowArgs, GenArgs, Kind, Method, SolveArgs};

const BASELINE_STEP: f64 = 1e-2;
const BASELINE_HORIZON: f64 = 1e3;

fn vector(x: &DVector<f64>) -> String {
    let items: Vec<String> = x.iter().map(|v| fmt_f64(*v)).collect();
    format!("[{}]", items.join(", "))
}

fn print_certificate(cert: &Certificate) {
    println!("sigma_min(A): {}", fmt_f64(cert.sigma_min_a));
    println!("||A||: {}", fmt_f64(cert.norm_a));
    println!("||B||: {}", fmt_f64(cert.norm_b));
    println!("gap: {}", fmt_f64(cert.gap));
    println!("certified: {}", cert.certified);
}

/// Prints `T_max`, plus the earlier bound when `B = I`.
fn print_bounds(problem: &GaveProblem, params: &FlowParams, cert: &Certificate) -> Option<f64> {
    let t_max = settling_time_bound(params, cert).ok()?.t_max;
    println!("T_max: {}", fmt_f64(t_max));
    if problem.has_identity_b() {
        if let Ok(prior) = settling_time_bound_lyyhc(params, problem.a()) {
            println!("T_max_lyyhc: {}", fmt_f64(prior.t_max));
        }
    }
    Some(t_max)
}

/// Flow parameters and, in the `ξ` form, the value of `ξ`.
fn flow_params(flow: &FlowArgs) -> CliResult<(FlowParams, Option<f64>)> {
    match (flow.lambda1, flow.lambda2) {
        (Some(l1), Some(l2)) => Ok((FlowParams::new(flow.gamma, flow.rho1, flow.rho2, l1, l2)?, None)),
        _ => Ok((FlowParams::from_xi(flow.gamma, flow.rho1, flow.rho2, flow.xi)?, Some(flow.xi))),
    }
}

fn starting_point(n: usize, seed: Option<u64>) -> DVector<f64> {
    use rand::{Rng, SeedableRng};
    match seed {
        None => DVector::zeros(n),
        Some(seed) => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            DVector::from_iterator(n, (0..n).map(|_| rng.random_range(-1.0..=1.0)))
        }
    }
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::new(INPUT, format!("cannot write {}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> CliResult {
    io::write_text(path, text).map_err(|e| Failure::new(INPUT, format!("cannot write {}: {e}", path.display())))
}

pub fn certify(path: &Path) -> CliResult {
    let problem = io::read_problem(path)?;
    let cert = gave::certify(&problem);
    print_certificate(&cert);
    if cert.certified {
        Ok(())
    } else {
        Err(Failure::new(UNCERTIFIED, "sigma_min(A) does not exceed ||B||"))
    }
}

/// Runs the flow to its settling-time bound, down to the rounding floor.
fn solve_to_floor(problem: &GaveProblem) -> CliResult<Trajectory> {
    let params = FlowParams::default();
    let cert = gave::certify(problem);
    let t_max = settling_time_bound(&params, &cert)?.t_max;
    Ok(ReferenceFlow::new(problem, &params, t_max / 1e4, t_max)
        .stop_tol(0.0)
        .solve(&DVector::zeros(problem.dim()))?)
}

pub fn solve(args: &SolveArgs) -> CliResult {
    let problem = io::read_problem(&args.problem)?;
    let (params, xi) = flow_params(&args.flow)?;
    let cert = gave::certify(&problem);
    print_certificate(&cert);
    if !cert.certified && !args.force {
        return Err(Failure::new(UNCERTIFIED, "problem is not certified; pass --force to solve anyway"));
    }
    let t_max = print_bounds(&problem, &params, &cert);
    let x0 = starting_point(problem.dim(), args.seed);

    let x = match args.method {
        Method::Reference => {
            println!("method: reference");
            let t_end = args
                .t_end
                .or(t_max)
                .ok_or_else(|| Failure::new(INPUT, "--t-end is required when no settling-time bound exists"))?;
            let h = args.h.unwrap_or(t_end / 1e4);
            let traj = ReferenceFlow::new(&problem, &params, h, t_end).stop_tol(args.tol).solve(&x0)?;
            if let Some(path) = &args.trace {
                io::write_trajectory_csv(&traj, create(path)?)?;
                println!("trace: {}", path.display());
            }
            println!("steps: {}", traj.steps);
            println!("time: {}", fmt_f64(t_end));
            traj.last().clone()
        }
        Method::Euler => {
            println!("method: euler");
            let config = EulerConfig {
                eta: args.eta,
                xi: xi.unwrap_or(EulerConfig::default().xi),
                max_iter: args.max_iter,
                tol: args.tol,
                safeguard: args.safeguard,
            };
            if let (Some(_), true) = (xi, cert.certified) {
                println!("k_star: {}", fixed_step_count(&config, &params, &cert)?);
            }
            let log = forward_euler_solve(&problem, &params, &config, &x0)?;
            if let Some(path) = &args.trace {
                io::write_iterate_csv(&log, create(path)?)?;
                println!("trace: {}", path.display());
            }
            println!("safeguarded: {}", log.safeguarded);
            if log.safeguarded {
                println!("step_halvings: {}", log.step_halvings);
            }
            println!("steps: {}", log.steps_taken);
            println!("time: {}", fmt_f64(args.eta * log.steps_taken as f64));
            log.last().clone()
        }
        Method::Baseline => {
            println!("method: baseline");
            let h = args.h.unwrap_or(BASELINE_STEP);
            let t_end = args.t_end.unwrap_or(BASELINE_HORIZON);
            let traj = gave::baseline_flow_solve(&problem, args.rho_scale, h, t_end, &x0, args.tol)?;
            if let Some(path) = &args.trace {
                io::write_trajectory_csv(&traj, create(path)?)?;
                println!("trace: {}", path.display());
            }
            println!("steps: {}", traj.steps);
            println!("time: {}", fmt_f64(traj.end_time()));
            traj.last().clone()
        }
    };

    let residual = problem.residual(&x)?.norm();
    println!("final_residual: {}", fmt_f64(residual));
    println!("x: {}", vector(&x));
    if let Some(path) = &args.out {
        write_text(path, &io::vector_to_json(&x))?;
        println!("solution: {}", path.display());
    }
    if residual <= args.tol {
        Ok(())
    } else {
        let hint = if args.method == Method::Euler && !args.safeguard {
            "; the plain iteration stalls near O(eta^2), try --safeguard or a smaller --eta"
        } else {
            ""
        };
        Err(Failure::numerical(format!(
            "final residual {} exceeds tol {:e}{hint}",
            fmt_f64(residual),
            args.tol
        )))
    }
}

pub fn convert(args: &ConvertArgs) -> CliResult {
    match args.direction {
        Direction::Lcp2gave => {
            let lcp = io::read_lcp(&args.input)?;
            let problem = lcp_to_gave(&lcp);
            write_text(&args.out, &io::problem_to_json(&problem))?;
            println!("wrote: {}", args.out.display());
            if !args.solve {
                return Ok(());
            }
            let x = solve_certified(&problem)?;
            let z = recover_lcp_solution(&lcp, &x).map_err(|e| match e {
                GaveError::Singular(_) => Failure::new(NUMERICAL, format!("cannot recover z: {e}")),
                other => other.into(),
            })?;
            println!("z: {}", vector(&z));
            let report = verify_lcp(&lcp, &z, 1e-8)?;
            println!("min_z: {}", fmt_f64(report.min_z));
            println!("min_w: {}", fmt_f64(report.min_w));
            println!("inner_product: {}", fmt_f64(report.inner_product));
            println!("feasible: {}", report.feasible);
            println!("complementary: {}", report.complementary);
            if report.solved() {
                Ok(())
            } else {
                Err(Failure::numerical("recovered z does not solve the LCP at tol 1e-8"))
            }
        }
        Direction::Hlcp2gave => {
            let hlcp = io::read_hlcp(&args.input)?;
            let problem = hlcp_to_gave(&hlcp);
            write_text(&args.out, &io::problem_to_json(&problem))?;
            println!("wrote: {}", args.out.display());
            if !args.solve {
                return Ok(());
            }
            let x = solve_certified(&problem)?;
            let (z, w) = gave_solution_to_hlcp(&x);
            println!("z: {}", vector(&z));
            println!("w: {}", vector(&w));
            let mismatch = (hlcp.c() * &z - hlcp.d() * &w - hlcp.p()).norm();
            println!("hlcp_residual: {}", fmt_f64(mismatch));
            Ok(())
        }
    }
}

fn solve_certified(problem: &GaveProblem) -> CliResult<DVector<f64>> {
    let cert = gave::certify(problem);
    print_certificate(&cert);
    cert_required(&cert)?;
    let traj = solve_to_floor(problem)?;
    println!("final_residual: {}", fmt_f64(traj.final_residual()));
    println!("x: {}", vector(traj.last()));
    Ok(traj.last().clone())
}

fn cert_required(cert: &Certificate) -> CliResult {
    if cert.certified {
        Ok(())
    } else {
        Err(Failure::new(UNCERTIFIED, "converted problem is not certified"))
    }
}

pub fn generate(args: &GenArgs) -> CliResult {
    if args.kind == Kind::Lcp {
        if args.solution_out.is_some() {
            return Err(Failure::new(INPUT, "--solution-out applies to GAVE kinds only"));
        }
        let lcp = random_spd_lcp(args.n, args.seed)?;
        write_text(&args.out, &io::lcp_to_json(&lcp))?;
        println!("wrote: {}", args.out.display());
        return Ok(());
    }
    let spec = GeneratorSpec::new(args.n, args.gap, args.scale, args.seed)?;
    let (problem, x_star) = match args.kind {
        Kind::Ave => random_solvable_ave(&spec)?,
        _ => random_solvable_gave(&spec)?,
    };
    write_text(&args.out, &io::problem_to_json(&problem))?;
    println!("wrote: {}", args.out.display());
    println!("gap: {}", fmt_f64(gave::certify(&problem).gap));
    if let Some(path) = &args.solution_out {
        write_text(path, &io::vector_to_json(&x_star))?;
        println!("solution: {}", path.display());
    }
    Ok(())
}
