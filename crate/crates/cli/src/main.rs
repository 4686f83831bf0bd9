//! Command-line front end for the structured radius solvers.

use std::path::{Path, PathBuf};

use strad_cli::{format, report};

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use strad::{
    hardness, multi_start, oracle, GammaPolicy, NormKind, PencilKind, SolverConfig,
};

use format::ProblemFile;

#[derive(Parser)]
#[command(
    name = "strad",
    about = "Real structured controllability/stabilizability/stability radii \
             via truncated-nuclear-norm rank relaxation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TraceMode {
    /// Keep traces when the batch has at most 10 trials.
    Auto,
    On,
    Off,
}

#[derive(Subcommand)]
enum Command {
    /// Run the multi-start radius solver on a problem file.
    Solve {
        /// Problem file path.
        problem: PathBuf,
        /// Number of independent trials.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Master seed; trial i uses random stream i.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Rank-deficiency tolerance on sigma_{2n}(Z*).
        #[arg(long)]
        eps: Option<f64>,
        /// Convergence threshold on |dF|.
        #[arg(long)]
        xi: Option<f64>,
        /// Cap for the second-stage regularization weight (0 disables the cap).
        #[arg(long)]
        gamma_cap: Option<f64>,
        /// Iteration cap per stage.
        #[arg(long)]
        max_iter: Option<usize>,
        /// Skip the feasibility stage (single-stage protocol).
        #[arg(long)]
        single_stage: bool,
        /// Worker threads for the trial pool (default: machine parallelism).
        #[arg(long)]
        threads: Option<usize>,
        /// Convergence-trace retention in the report.
        #[arg(long, value_enum, default_value_t = TraceMode::Auto)]
        traces: TraceMode,
        /// Report output path (default: <problem>.report).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grid-scan ground truth for small stability problems.
    Oracle {
        /// Problem file path (stability kind, p <= 3).
        problem: PathBuf,
        /// Box: one bound B (meaning [-B, B] per parameter) or
        /// comma-separated lo:hi ranges.
        #[arg(long = "box")]
        box_spec: String,
        /// Grid points per axis.
        #[arg(long, default_value_t = 41)]
        resolution: usize,
        /// Output prefix; writes <prefix>_envelope.csv and <prefix>_cloud.csv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a subset-sum reduction instance as a problem file.
    Reduce {
        /// Comma-separated integers of the subset-sum set (target -1).
        #[arg(long = "subset-sum", allow_hyphen_values = true)]
        subset_sum: String,
        /// Vandermonde node scheme for the input matrix.
        #[arg(long, value_enum, default_value_t = NodeArg::Integer)]
        nodes: NodeArg,
        /// Problem file output path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract the convergence trace of a solve report as CSV.
    Trace {
        /// Report file produced by `solve` with trace retention on.
        report: PathBuf,
        /// CSV output path (default: <report>.trace.csv).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum NodeArg {
    Integer,
    Chebyshev,
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Solve {
            problem,
            trials,
            seed,
            eps,
            xi,
            gamma_cap,
            max_iter,
            single_stage,
            threads,
            traces,
            out,
        } => cmd_solve(
            &problem,
            trials,
            seed,
            eps,
            xi,
            gamma_cap,
            max_iter,
            single_stage,
            threads,
            traces,
            out,
        ),
        Command::Oracle {
            problem,
            box_spec,
            resolution,
            out,
        } => cmd_oracle(&problem, &box_spec, resolution, &out),
        Command::Reduce {
            subset_sum,
            nodes,
            out,
        } => cmd_reduce(&subset_sum, nodes, &out),
        Command::Trace { report, out } => cmd_trace(&report, out),
    }
}

fn load_problem(path: &Path) -> anyhow::Result<ProblemFile> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    ProblemFile::parse(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

/// Defaults, overridden by the environment, the problem file, then flags.
fn build_config(
    file: &ProblemFile,
    seed: u64,
    eps: Option<f64>,
    xi: Option<f64>,
    gamma_cap: Option<f64>,
    max_iter: Option<usize>,
    single_stage: bool,
) -> SolverConfig {
    let mut config = SolverConfig::default();
    if let Ok(tol) = std::env::var("STRAD_SOLVER_TOL") {
        if let Ok(tol) = tol.parse::<f64>() {
            config.conic.tol = tol;
        }
    }
    for (name, value) in &file.options {
        match name.as_str() {
            "eps" => config.epsilon = *value,
            "xi" => config.xi = *value,
            "max-iter" => config.max_iter = *value as usize,
            "gamma-cap" => config.gamma = cap_policy(*value),
            "solver-tol" => config.conic.tol = *value,
            _ => eprintln!("warning: unknown option `{name}` ignored"),
        }
    }
    config.seed = seed;
    if let Some(v) = eps {
        config.epsilon = v;
    }
    if let Some(v) = xi {
        config.xi = v;
    }
    if let Some(v) = gamma_cap {
        config.gamma = cap_policy(v);
    }
    if let Some(v) = max_iter {
        config.max_iter = v;
    }
    config.two_stage = !single_stage;
    config
}

fn cap_policy(cap: f64) -> GammaPolicy {
    if cap > 0.0 {
        GammaPolicy::Capped { cap }
    } else {
        GammaPolicy::Uncapped
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    path: &Path,
    trials: usize,
    seed: u64,
    eps: Option<f64>,
    xi: Option<f64>,
    gamma_cap: Option<f64>,
    max_iter: Option<usize>,
    single_stage: bool,
    threads: Option<usize>,
    traces: TraceMode,
    out: Option<PathBuf>,
) -> anyhow::Result<()> {
    let file = load_problem(path)?;
    let problem = file.to_problem()?;
    let config = build_config(&file, seed, eps, xi, gamma_cap, max_iter, single_stage);

    let report = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .context("building worker pool")?
            .install(|| multi_start(&problem, &config, trials)),
        None => multi_start(&problem, &config, trials),
    }?;

    let keep_traces = match traces {
        TraceMode::Auto => trials <= 10,
        TraceMode::On => true,
        TraceMode::Off => false,
    };
    let meta = report::ReportMeta {
        problem_path: &path.display().to_string(),
        kind: problem.kind(),
        norm: problem.norm(),
        trials,
        config: &config,
        keep_traces,
    };
    let rendered = report::render(&meta, &report);
    let out_path = out.unwrap_or_else(|| path.with_extension("report"));
    std::fs::write(&out_path, rendered)
        .with_context(|| format!("writing {}", out_path.display()))?;

    print!("{}", report::render_summary(&report));
    println!("report written to {}", out_path.display());

    let failures = report
        .trials
        .iter()
        .filter(|t| matches!(t.result.status, strad::RunStatus::SolverFailure(_)))
        .count();
    anyhow::ensure!(failures == 0, "{failures} of {trials} trials hit a solver failure");
    Ok(())
}

fn parse_box(spec: &str, p: usize) -> anyhow::Result<Vec<(f64, f64)>> {
    if let Ok(bound) = spec.trim().parse::<f64>() {
        anyhow::ensure!(bound > 0.0, "box bound must be positive");
        return Ok(vec![(-bound, bound); p]);
    }
    let ranges: Vec<(f64, f64)> = spec
        .split(',')
        .map(|token| {
            let (lo, hi) = token
                .split_once(':')
                .ok_or_else(|| anyhow::anyhow!("bad box range `{token}` (want lo:hi)"))?;
            let lo: f64 = lo.trim().parse().context("bad box lower bound")?;
            let hi: f64 = hi.trim().parse().context("bad box upper bound")?;
            anyhow::ensure!(lo < hi, "empty box range `{token}`");
            Ok((lo, hi))
        })
        .collect::<anyhow::Result<_>>()?;
    anyhow::ensure!(
        ranges.len() == p,
        "box has {} ranges for {} parameters",
        ranges.len(),
        p
    );
    Ok(ranges)
}

fn format_theta_header(p: usize) -> String {
    (1..=p).map(|i| format!("theta{i}")).collect::<Vec<_>>().join(",")
}

fn cmd_oracle(path: &Path, box_spec: &str, resolution: usize, out: &Path) -> anyhow::Result<()> {
    let file = load_problem(path)?;
    anyhow::ensure!(
        file.kind == PencilKind::Stability,
        "the grid oracle applies to stability problems"
    );
    let problem = file.to_problem()?;
    let bounds = parse_box(box_spec, problem.param_count())?;
    let scan = oracle::rssr_grid_oracle(
        problem.state_family(),
        problem.map(),
        problem.norm(),
        &bounds,
        resolution,
    )?;

    let p = problem.param_count();
    let mut envelope = format!("{},abscissa,g,radius,axis_tol\n", format_theta_header(p));
    for crossing in &scan.crossings {
        let theta: Vec<String> = crossing.theta.iter().map(|t| format!("{t:.9e}")).collect();
        envelope.push_str(&format!(
            "{},{:.9e},{:.9e},{:.9e},{:.9e}\n",
            theta.join(","),
            crossing.abscissa,
            crossing.g,
            crossing.radius,
            scan.axis_tol
        ));
    }
    let envelope_path = sibling_with_suffix(out, "_envelope.csv");
    std::fs::write(&envelope_path, envelope)
        .with_context(|| format!("writing {}", envelope_path.display()))?;

    let mut cloud = format!("{},eig_re,eig_im\n", format_theta_header(p));
    for point in &scan.cloud {
        let theta: Vec<String> = point.theta.iter().map(|t| format!("{t:.9e}")).collect();
        cloud.push_str(&format!("{},{:.9e},{:.9e}\n", theta.join(","), point.re, point.im));
    }
    let cloud_path = sibling_with_suffix(out, "_cloud.csv");
    std::fs::write(&cloud_path, cloud)
        .with_context(|| format!("writing {}", cloud_path.display()))?;

    println!("axis tolerance: {:.3e}", scan.axis_tol);
    match scan.min_radius {
        Some(r) => println!(
            "{} crossings; minimum radius {:.6}",
            scan.crossings.len(),
            r
        ),
        None => println!("no instability found in box"),
    }
    println!(
        "wrote {} and {}",
        envelope_path.display(),
        cloud_path.display()
    );
    Ok(())
}

fn sibling_with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    name.push_str(suffix);
    prefix.with_file_name(name)
}

fn cmd_reduce(subset_sum: &str, nodes: NodeArg, out: &Path) -> anyhow::Result<()> {
    let values: Vec<i64> = subset_sum
        .split(',')
        .map(|token| {
            token
                .trim()
                .parse::<i64>()
                .with_context(|| format!("bad integer `{token}`"))
        })
        .collect::<anyhow::Result<_>>()?;
    let inst = hardness::SubsetSumInstance::with_unit_target(values)?;
    let scheme = match nodes {
        NodeArg::Integer => hardness::NodeScheme::Integer,
        NodeArg::Chebyshev => hardness::NodeScheme::Chebyshev,
    };
    let (fam_a, fam_b) = hardness::build_rscr_reduction(&inst, scheme)?;

    let p = inst.len();
    let file = ProblemFile {
        kind: PencilKind::Controllability,
        norm: NormKind::Frobenius,
        n: fam_a.rows(),
        m: fam_b.cols(),
        p,
        a0: fam_a.base().clone(),
        a_basis: fam_a.basis().to_vec(),
        b0: Some(fam_b.base().clone()),
        b_basis: fam_b.basis().to_vec(),
        structure: format::StructureSpec::Vector,
        options: Default::default(),
    };
    std::fs::write(out, file.serialize())
        .with_context(|| format!("writing {}", out.display()))?;
    println!(
        "wrote {} ({}x{} state family, p = {})",
        out.display(),
        file.n,
        file.n,
        p
    );

    if p <= 12 {
        let report = hardness::reduction_equivalence_check(&inst, 1000, 0)?;
        println!(
            "subset-sum feasible: {}; uncontrollable binary vectors: {}/{}",
            report.subset_sum_feasible, report.uncontrollable_binaries, report.binaries_checked
        );
        if let Some(sigma) = report.min_scaled_sigma {
            println!(
                "scaled sigma_min over {} random probes: {:.3e}",
                report.random_probes, sigma
            );
        }
        if report.holds() {
            println!("certificate: PASS");
        } else {
            anyhow::bail!(
                "certificate FAILED: counterexample {:?}",
                report.counterexample
            );
        }
    } else {
        eprintln!("warning: p = {p} > 12, certificate skipped");
    }
    Ok(())
}

fn cmd_trace(path: &Path, out: Option<PathBuf>) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let rows = report::parse_traces(&text)?;
    let csv = report::traces_to_csv(&rows);
    let out_path = out.unwrap_or_else(|| path.with_extension("trace.csv"));
    std::fs::write(&out_path, csv)
        .with_context(|| format!("writing {}", out_path.display()))?;
    println!("wrote {} ({} trace rows)", out_path.display(), rows.len());
    Ok(())
}
