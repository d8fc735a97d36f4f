use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use nilgeo::config::load_config;
use nilgeo::error::CliError;
use nilgeo::report::{rational_string, Report};
use nilgeo::state::{format_state, parse_state};
use nilgeo::suites::{run_criterion, suite_criteria, SuiteParams, SUITES};
use nilgeo_core::catalog::{build_deformation, pair_member};
use nilgeo_core::criteria::{
    butler_nonintegrability_sample, check_hr_presentation, cih_certificate, PresentationSplit,
};
use nilgeo_core::flow::{flow_exact, flow_rk4};
use nilgeo_core::integrals::{poisson_bracket, Integral, IntegralSet};
use nilgeo_core::periodicity::{construct_closed_geodesic, is_period, random_target};
use nilgeo_core::sampling::rng_for;
use nilgeo_core::{Certificate, Manifold, TangentState, Tolerances, Which, Q};

#[derive(Parser)]
#[command(
    name = "nilgeo",
    version,
    about = "Geodesic flows on an isospectral pair of nilmanifolds"
)]
struct Cli {
    /// TOML file overriding numerical tolerances.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Exact,
    Rk4,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a verification suite and write a JSON report.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Squared radius for the length spectra, as `p/q` or an integer.
        #[arg(long, default_value = "100")]
        r2: String,
        /// Coordinate bound for the clean-intersection enumeration.
        #[arg(long, default_value_t = 3)]
        bound: i64,
    },
    /// Propagate a state record along the geodesic flow.
    Flow {
        #[arg(long, default_value = "M")]
        manifold: String,
        /// State record, or `-` to read it from stdin.
        #[arg(long)]
        state: String,
        #[arg(long)]
        t: f64,
        #[arg(long, value_enum, default_value = "exact")]
        method: Method,
    },
    /// Construct a closed geodesic near a target state.
    ClosedGeodesic {
        #[arg(long, default_value = "M")]
        manifold: String,
        /// Seed for a random target (used when --state is absent).
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        state: Option<String>,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
    },
    /// Evaluate the eight first integrals of M at a state.
    Integrals {
        #[arg(long)]
        state: String,
    },
    /// Pairwise Poisson brackets of the first integrals of M at a state.
    Poisson {
        #[arg(long)]
        state: String,
    },
    /// Presentation and sampled nonintegrability certificates.
    Criteria {
        #[arg(long, default_value = "M")]
        manifold: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Clean-intersection certificate over a bounded piece of the lattice.
    Cih {
        #[arg(long, default_value = "M")]
        manifold: String,
        #[arg(long, default_value_t = 3)]
        bound: i64,
    },
}

fn manifold(s: &str) -> Result<Manifold, CliError> {
    Ok(s.parse::<Manifold>()?)
}

fn pair(s: &str) -> Result<Which, CliError> {
    manifold(s)?
        .which()
        .ok_or_else(|| CliError::Usage(format!("`{s}` is not M or Mprime")))
}

fn read_state(arg: &str, dim_v: usize, dim_z: usize) -> Result<TangentState, CliError> {
    let text = if arg == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|source| CliError::Io {
                path: PathBuf::from("<stdin>"),
                source,
            })?;
        s
    } else {
        arg.to_string()
    };
    parse_state(&text, dim_v, dim_z).map_err(|e| CliError::Usage(format!("state: {e}")))
}

fn parse_rational(s: &str) -> Result<Q, CliError> {
    let q: Q = s
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("bad rational `{s}`")))?;
    if q <= Q::from_integer(0.into()) {
        return Err(CliError::Usage(format!("r2 must be positive, got {s}")));
    }
    Ok(q)
}

fn print_certificate(c: &Certificate) {
    println!("certificate: {}", c.name);
    for r in &c.checks {
        println!(
            "  {}: {} [{}] {}",
            r.name,
            if r.pass { "pass" } else { "fail" },
            r.evidence.label(),
            r.detail
        );
        if let Some(w) = &r.witness {
            println!("    witness: {w}");
        }
    }
    println!("pass: {}", c.pass());
}

fn verify(
    suite: &str,
    seed: u64,
    out: Option<&Path>,
    r2: &str,
    bound: i64,
    tol: Tolerances,
) -> Result<bool, CliError> {
    let ids = suite_criteria(suite).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown suite `{suite}` (expected one of {})",
            SUITES.join(", ")
        ))
    })?;
    if bound < 0 {
        return Err(CliError::Usage("bound must be non-negative".into()));
    }
    let params = SuiteParams {
        seed,
        tol,
        r2: parse_rational(r2)?,
        cih_bound: bound,
    };
    let start = Instant::now();
    let checks = ids
        .iter()
        .flat_map(|&id| run_criterion(id, &params))
        .collect();
    let report = Report {
        suite: suite.to_string(),
        seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        manifolds: vec!["M".into(), "Mprime".into()],
        checks,
        wall_time: start.elapsed().as_secs_f64(),
    };
    let json = report.to_json();
    match out {
        Some(p) => std::fs::write(p, json).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        })?,
        None => print!("{json}"),
    }
    Ok(report.pass())
}

fn flow(m: &str, state: &str, t: f64, method: Method, tol: Tolerances) -> Result<bool, CliError> {
    let man = manifold(m)?;
    let alg = man.algebra();
    let st = read_state(state, alg.dim_v(), alg.dim_z())?;
    let end = match (method, man.which()) {
        (Method::Rk4, _) => flow_rk4(&alg, &st, t, tol.rk4_steps(t)),
        (Method::Exact, Some(w)) => {
            let zn = st.fiber_z.iter().map(|x| x * x).sum::<f64>().sqrt();
            let panels = 2000 + (400.0 * (t.abs() * zn).ceil()) as usize;
            flow_exact(w, &alg, &st, t, panels).map_err(|e| {
                CliError::Degenerate(format!("{e}; use --method rk4 for this state"))
            })?
        }
        (Method::Exact, None) => {
            return Err(CliError::Usage(
                "exact propagation is available for M and Mprime; use --method rk4".into(),
            ))
        }
    };
    println!("{}", format_state(&end));
    Ok(true)
}

fn closed_geodesic(m: &str, seed: u64, state: Option<&str>, eps: f64) -> Result<bool, CliError> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(CliError::Usage("epsilon must be positive".into()));
    }
    let w = pair(m)?;
    let data = pair_member(w);
    let target = match state {
        Some(s) => read_state(s, 5, 3)?,
        None => random_target(&mut rng_for(seed, "cli.closed_geodesic"), 0.05),
    };
    let cg = construct_closed_geodesic(w, &data, &target, eps)?;
    let chk = is_period(&cg, &data)?;
    let rats = |xs: &[Q]| xs.iter().map(rational_string).collect::<Vec<_>>().join(" ");
    println!("manifold: {}", w.label());
    println!("target: {}", format_state(&target));
    println!("initial: {}", format_state(&cg.initial));
    println!("distance: {:.16e}", cg.initial.distance(&target));
    println!("c: {}", rats(&cg.c));
    println!("norm_c: {}", rational_string(&cg.norm_c));
    println!("m: {}", cg.m);
    println!("q: {}", cg.q());
    println!("tau_over_pi: {}", rational_string(&cg.tau_over_pi));
    println!("tau: {:.16e}", cg.tau());
    println!("period: {:.16e}", cg.period);
    println!("a_v: {}", rats(&cg.a.v));
    println!("a_z: {}", rats(&cg.a.z));
    println!(
        "a_in_gamma: {}",
        if chk.a_in_gamma {
            "exact_pass"
        } else {
            "exact_fail"
        }
    );
    println!(
        "rotation: {}",
        if chk.rotation_exact {
            "exact_pass"
        } else {
            "exact_fail"
        }
    );
    println!("rotation_residual: {:.16e}", chk.rotation_residual);
    println!("a_consistency: {:.16e}", chk.a_consistency);
    println!("generic: {}", cg.generic);
    Ok(chk.pass() && cg.initial.distance(&target) < eps)
}

fn integrals(state: &str) -> Result<bool, CliError> {
    let st = read_state(state, 5, 3)?;
    let set = IntegralSet { which: Which::M };
    for (f, x) in Integral::ALL.iter().zip(set.eval_all(&st)) {
        println!("{}: {:.16e}", f.label(), x);
    }
    Ok(true)
}

fn poisson(state: &str, tol: Tolerances) -> Result<bool, CliError> {
    let st = read_state(state, 5, 3)?;
    let alg = Manifold::Pair(Which::M).algebra();
    let set = IntegralSet { which: Which::M };
    let mut ok = true;
    println!("pair | bracket | tolerance | pass");
    for i in 0..8 {
        for j in i + 1..8 {
            let (f, g) = (Integral::ALL[i], Integral::ALL[j]);
            let b = poisson_bracket(
                &alg,
                |s| set.eval(f, s),
                |s| set.eval(g, s),
                &st,
                tol.fd_step,
            );
            let pass = b.abs() <= tol.bracket_tol;
            ok &= pass;
            println!(
                "{{{}, {}}} | {:.16e} | {:.1e} | {}",
                f.label(),
                g.label(),
                b,
                tol.bracket_tol,
                pass
            );
        }
    }
    Ok(ok)
}

fn criteria(m: &str, seed: u64, samples: usize) -> Result<bool, CliError> {
    let man = manifold(m)?;
    let alg = man.algebra();
    // Pair: x = span{X_i, X_j}, c = Z_k. Deformation: x = span{X_1, X_2}, c = Z_1.
    let c_index = if man.which().is_some() { 2 } else { 0 };
    let split = PresentationSplit::coordinate(&alg, 2, c_index)?;
    print_certificate(&check_hr_presentation(&alg, &split));
    if let Manifold::Deformation(t) = man {
        let d = build_deformation(t);
        println!(
            "lattice brackets in 2*lattice_z: {}",
            d.brackets_in_double_z()
        );
    }
    let b = butler_nonintegrability_sample(&alg, samples, seed)?;
    print_certificate(&b.certificate);
    println!(
        "butler_fraction: {:.16e} ({}/{})",
        b.fraction, b.satisfied, b.total
    );
    println!("regular_dim: {}", b.regular_dim);
    Ok(true)
}

fn cih(m: &str, bound: i64) -> Result<bool, CliError> {
    if bound < 0 {
        return Err(CliError::Usage("bound must be non-negative".into()));
    }
    let data = pair_member(pair(m)?);
    let r = cih_certificate(&data, bound)?;
    println!("enumerated: {}", r.enumerated);
    println!("distinct_projected: {}", r.distinct.len());
    for e in r.distinct.iter().take(10) {
        let ev: Vec<String> = e.eigenvalues.iter().map(rational_string).collect();
        println!(
            "  proj_z: {} eigenvalues: {}",
            e.proj_z
                .iter()
                .map(rational_string)
                .collect::<Vec<_>>()
                .join(" "),
            ev.join(" ")
        );
    }
    print_certificate(&r.certificate);
    Ok(r.certificate.pass())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let tol = match &cli.config {
        Some(p) => load_config(p)?,
        None => Tolerances::default(),
    };
    match cli.cmd {
        Cmd::Verify {
            suite,
            seed,
            out,
            r2,
            bound,
        } => verify(&suite, seed, out.as_deref(), &r2, bound, tol),
        Cmd::Flow {
            manifold,
            state,
            t,
            method,
        } => flow(&manifold, &state, t, method, tol),
        Cmd::ClosedGeodesic {
            manifold,
            seed,
            state,
            epsilon,
        } => closed_geodesic(&manifold, seed, state.as_deref(), epsilon),
        Cmd::Integrals { state } => integrals(&state),
        Cmd::Poisson { state } => poisson(&state, tol),
        Cmd::Criteria {
            manifold,
            seed,
            samples,
        } => criteria(&manifold, seed, samples),
        Cmd::Cih { manifold, bound } => cih(&manifold, bound),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
