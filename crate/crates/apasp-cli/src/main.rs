//! `apasp` — generate weighted graphs, run APASP algorithms over them, and
//! validate the resulting distance matrices against an exact oracle.
//!
//! Exit codes: 0 success, 1 guarantee violation, 2 usage error, 3 I/O error.
//! Every file-producing subcommand writes a `<output>.manifest.json` with
//! the subcommand, flags, seed, paths, and per-stage wall-clock timings.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use apasp_core::{
    ampmm, combine_tradeoff, exact_apsp, framework, framework_guarantee, mpmm_exact,
    near_additive_guarantee, near_additive_with, plus2w1_guarantee, plus2wi_guarantee,
    plus2wi_with, tradeoff_guarantee, validate, AdditiveForm, AdditiveRunConfig, DistanceMatrix,
    ExecMode, FrameworkConfig, Graph, MinPlusMatrix, MixedGuarantee, MsaspBackend,
    NearAdditiveConfig,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "apasp",
    version,
    about = "All-pairs approximate shortest paths: generators, algorithms, validation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a weighted graph file.
    Gen(GenArgs),
    /// Run an APASP algorithm and write its distance matrix.
    Run(RunArgs),
    /// Validate a distance matrix against a stretch guarantee.
    Validate(ValidateArgs),
    /// Compute the exact all-pairs distance matrix.
    Oracle(OracleArgs),
    /// Exercise the min-plus product kernels on random matrices.
    Mpmm(MpmmArgs),
    /// Wall-clock sweep of one algorithm across graph sizes.
    Bench(BenchArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Model {
    Gnp,
    Grid,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Algo {
    Plus2w1,
    Plus2wi,
    Frac73,
    Framework,
    NearAdditive,
    Tradeoff,
}

impl Algo {
    fn token(self) -> &'static str {
        match self {
            Algo::Plus2w1 => "plus2w1",
            Algo::Plus2wi => "plus2wi",
            Algo::Frac73 => "frac73",
            Algo::Framework => "framework",
            Algo::NearAdditive => "near-additive",
            Algo::Tradeoff => "tradeoff",
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Backend {
    Exact,
    Scaled,
}

impl From<Backend> for MsaspBackend {
    fn from(b: Backend) -> Self {
        match b {
            Backend::Exact => MsaspBackend::Exact,
            Backend::Scaled => MsaspBackend::Scaled,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    /// Generator model.
    #[arg(long, value_enum)]
    model: Model,
    /// Vertex count (gnp).
    #[arg(long)]
    n: Option<usize>,
    /// Edge probability (gnp).
    #[arg(long)]
    p: Option<f64>,
    /// Grid rows (grid).
    #[arg(long)]
    rows: Option<usize>,
    /// Grid columns (grid).
    #[arg(long)]
    cols: Option<usize>,
    /// Smallest edge weight.
    #[arg(long, default_value_t = 1)]
    wmin: u64,
    /// Largest edge weight.
    #[arg(long, default_value_t = 100)]
    wmax: u64,
    /// RNG seed; all randomness flows from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output graph file.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// Algorithm to run.
    #[arg(long, value_enum)]
    algo: Algo,
    /// Input graph file.
    #[arg(short, long)]
    input: PathBuf,
    /// Output distance-matrix file.
    #[arg(short, long)]
    output: PathBuf,
    /// Trade-off parameter for plus2wi / tradeoff.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Stretch parameter for framework.
    #[arg(long, default_value_t = 1)]
    ell: usize,
    /// Approximation slack (0 selects the exact backend where applicable).
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    /// First hierarchy exponent (algorithm-specific default when omitted).
    #[arg(long)]
    beta: Option<f64>,
    /// Second hierarchy exponent (algorithm-specific default when omitted).
    #[arg(long)]
    gamma: Option<f64>,
    /// Multi-source backend for eps > 0.
    #[arg(long, value_enum, default_value_t = Backend::Exact)]
    backend: Backend,
    /// Snapshot-parallel level sweeps (default: sequential, reproducible).
    #[arg(long)]
    parallel: bool,
    /// Seed recorded in the manifest (the algorithms are deterministic).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Graph file the matrix was computed from.
    #[arg(short, long)]
    graph: PathBuf,
    /// Distance-matrix file to check.
    #[arg(short, long)]
    matrix: PathBuf,
    /// Multiplicative stretch α of the guarantee.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Additive form: none | 2w1 | min2w1_4w2 | sum:<count>:<coeff>.
    #[arg(long, default_value = "none")]
    additive: String,
    /// Algorithm label stamped into the report.
    #[arg(long)]
    algorithm: Option<String>,
    /// Seed label stamped into the report.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON report here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Input graph file.
    #[arg(short, long)]
    input: PathBuf,
    /// Output distance-matrix file.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct MpmmArgs {
    /// Matrix dimension (two size x size operands).
    #[arg(long, default_value_t = 32)]
    size: usize,
    /// RNG seed for the operand entries.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest integer entry.
    #[arg(long, default_value_t = 100)]
    wmax: u64,
    /// Also run the scaled (1+eps) kernel and check the sandwich.
    #[arg(long)]
    eps: Option<f64>,
    /// Write the JSON report here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Algorithm to sweep.
    #[arg(long, value_enum, default_value_t = Algo::Plus2w1)]
    algo: Algo,
    /// Comma-separated list of graph sizes.
    #[arg(long, default_value = "32,64,128")]
    sizes: String,
    /// Edge probability of the generated instances.
    #[arg(long, default_value_t = 0.15)]
    p: f64,
    /// Largest edge weight of the generated instances.
    #[arg(long, default_value_t = 100)]
    wmax: u64,
    /// Repetitions per size (variance is reported across them).
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    /// RNG seed for instance generation.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the JSON table here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Run(a) => cmd_run(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Mpmm(a) => cmd_mpmm(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

/// 3 for I/O and file-format failures, 2 for everything else (usage).
fn exit_code_for(err: &anyhow::Error) -> u8 {
    use apasp_core::Error as E;
    if let Some(e) = err.downcast_ref::<E>() {
        return match e {
            E::Io(_) | E::Parse { .. } | E::InvalidInput(_) | E::DimensionMismatch(_) => 3,
            E::InvalidParameter(_) | E::WeightClass(_) => 2,
        };
    }
    if err.downcast_ref::<std::io::Error>().is_some() {
        3
    } else {
        2
    }
}

/// Wall-clock stage recorder for manifests.
struct Stages {
    last: Instant,
    timings: Vec<(String, f64)>,
}

impl Stages {
    fn start() -> Self {
        Stages {
            last: Instant::now(),
            timings: Vec::new(),
        }
    }

    fn mark(&mut self, name: &str) {
        let now = Instant::now();
        let ms = now.duration_since(self.last).as_secs_f64() * 1e3;
        self.timings.push((name.to_string(), ms));
        self.last = now;
    }

    fn to_json(&self) -> serde_json::Value {
        json!(self
            .timings
            .iter()
            .map(|(stage, ms)| json!({ "stage": stage, "ms": ms }))
            .collect::<Vec<_>>())
    }
}

fn write_manifest(
    output: &Path,
    subcommand: &str,
    flags: BTreeMap<&str, serde_json::Value>,
    seed: Option<u64>,
    input: Option<&Path>,
    stages: &Stages,
) -> anyhow::Result<()> {
    let manifest = json!({
        "subcommand": subcommand,
        "flags": flags,
        "seed": seed,
        "input": input.map(|p| p.display().to_string()),
        "output": output.display().to_string(),
        "timings_ms": stages.to_json(),
    });
    let path = manifest_path(output);
    std::fs::write(&path, format!("{:#}\n", manifest))
        .with_context(|| format!("writing manifest {}", path.display()))?;
    Ok(())
}

fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn cmd_gen(a: GenArgs) -> anyhow::Result<ExitCode> {
    let mut stages = Stages::start();
    let g = match a.model {
        Model::Gnp => {
            let (Some(n), Some(p)) = (a.n, a.p) else {
                anyhow::bail!("--model gnp requires --n and --p");
            };
            Graph::gen_random(n, p, a.wmin, a.wmax, a.seed)?
        }
        Model::Grid => {
            let (Some(rows), Some(cols)) = (a.rows, a.cols) else {
                anyhow::bail!("--model grid requires --rows and --cols");
            };
            Graph::gen_grid(rows, cols, a.wmin, a.wmax, a.seed)?
        }
    };
    stages.mark("generate");
    g.save(&a.output)?;
    stages.mark("save");
    let flags = BTreeMap::from([
        (
            "model",
            json!(match a.model {
                Model::Gnp => "gnp",
                Model::Grid => "grid",
            }),
        ),
        ("n", json!(a.n)),
        ("p", json!(a.p)),
        ("rows", json!(a.rows)),
        ("cols", json!(a.cols)),
        ("wmin", json!(a.wmin)),
        ("wmax", json!(a.wmax)),
    ]);
    write_manifest(&a.output, "gen", flags, Some(a.seed), None, &stages)?;
    println!(
        "generated {} vertices / {} edges -> {}",
        g.n(),
        g.m(),
        a.output.display()
    );
    Ok(ExitCode::SUCCESS)
}

/// Runs the selected algorithm; returns the matrix, the guarantee it ships
/// under, and the per-stage timings taken so far.
fn run_algorithm(
    a: &RunArgs,
    g: &Graph,
    stages: &mut Stages,
) -> anyhow::Result<(DistanceMatrix, MixedGuarantee)> {
    let exec = if a.parallel {
        ExecMode::Parallel
    } else {
        ExecMode::Sequential
    };
    let backend: MsaspBackend = a.backend.into();
    match a.algo {
        Algo::Plus2w1 => {
            let mut cfg = AdditiveRunConfig::new(0);
            cfg.exec = exec;
            if let Some(b) = a.beta {
                cfg.beta = b;
            }
            if let Some(c) = a.gamma {
                cfg.gamma = c;
            }
            let d = plus2wi_with(g, &cfg)?;
            stages.mark("plus2w1");
            Ok((d, plus2w1_guarantee()))
        }
        Algo::Plus2wi => {
            let mut cfg = AdditiveRunConfig::new(a.k);
            cfg.exec = exec;
            if let Some(b) = a.beta {
                cfg.beta = b;
            }
            if let Some(c) = a.gamma {
                cfg.gamma = c;
            }
            let d = plus2wi_with(g, &cfg)?;
            stages.mark("plus2wi");
            Ok((d, plus2wi_guarantee(a.k)))
        }
        Algo::Frac73 | Algo::Framework => {
            let ell = if a.algo == Algo::Frac73 { 1 } else { a.ell };
            let mut cfg = FrameworkConfig::new(ell);
            cfg.eps = a.eps;
            cfg.exec = exec;
            cfg.backend = backend;
            match (a.beta, a.gamma) {
                (Some(b), Some(c)) if ell == 1 => cfg.betas = vec![b, c],
                (Some(b), _) => cfg.betas = vec![b; ell + 1],
                _ => {}
            }
            let d = framework(g, &cfg)?;
            stages.mark(a.algo.token());
            Ok((d, framework_guarantee(ell, a.eps)))
        }
        Algo::NearAdditive => {
            let mut cfg = NearAdditiveConfig::new(a.eps);
            cfg.exec = exec;
            cfg.backend = backend;
            if let Some(b) = a.beta {
                cfg.beta = b;
            }
            if let Some(c) = a.gamma {
                cfg.gamma = c;
            }
            let d = near_additive_with(g, &cfg)?;
            stages.mark("near-additive");
            Ok((d, near_additive_guarantee(a.eps)))
        }
        Algo::Tradeoff => {
            let mut add_cfg = AdditiveRunConfig::new(a.k);
            add_cfg.exec = exec;
            let additive = plus2wi_with(g, &add_cfg)?;
            stages.mark("plus2wi");
            let mut fw_cfg = FrameworkConfig::new(3 * a.k);
            fw_cfg.exec = exec;
            let multiplicative = framework(g, &fw_cfg)?;
            stages.mark("framework");
            let d = combine_tradeoff(&additive, &multiplicative)?;
            stages.mark("combine");
            Ok((d, tradeoff_guarantee(a.k, 1.0, 1.0)))
        }
    }
}

fn cmd_run(a: RunArgs) -> anyhow::Result<ExitCode> {
    let mut stages = Stages::start();
    let g = Graph::load(&a.input)?;
    stages.mark("load");
    let (d, guarantee) = run_algorithm(&a, &g, &mut stages)?;
    d.save(&a.output)?;
    stages.mark("save");
    let flags = BTreeMap::from([
        ("algo", json!(a.algo.token())),
        ("k", json!(a.k)),
        ("ell", json!(a.ell)),
        ("eps", json!(a.eps)),
        ("beta", json!(a.beta)),
        ("gamma", json!(a.gamma)),
        (
            "backend",
            json!(match a.backend {
                Backend::Exact => "exact",
                Backend::Scaled => "scaled",
            }),
        ),
        ("parallel", json!(a.parallel)),
        ("alpha", json!(guarantee.alpha)),
        ("additive_form", json!(guarantee.additive.token())),
    ]);
    write_manifest(&a.output, "run", flags, a.seed, Some(&a.input), &stages)?;
    println!(
        "{} on n={} m={} -> {} (guarantee alpha={:.6}, additive={})",
        a.algo.token(),
        g.n(),
        g.m(),
        a.output.display(),
        guarantee.alpha,
        guarantee.additive.token()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(a: ValidateArgs) -> anyhow::Result<ExitCode> {
    let g = Graph::load(&a.graph)?;
    let d = DistanceMatrix::load(&a.matrix)?;
    if d.n() != g.n() {
        return Err(apasp_core::Error::DimensionMismatch(format!(
            "matrix order {} vs graph order {}",
            d.n(),
            g.n()
        ))
        .into());
    }
    let additive = AdditiveForm::parse(&a.additive)?;
    let guarantee = MixedGuarantee {
        alpha: a.alpha,
        additive,
        provenance: a.algorithm.iter().cloned().collect(),
    };
    let mut report = validate(&g, &d, &guarantee);
    report.seed = a.seed;
    let text = format!("{:#}\n", report.to_json());
    match &a.output {
        Some(path) => std::fs::write(path, &text)
            .with_context(|| format!("writing report {}", path.display()))?,
        None => print!("{text}"),
    }
    if report.passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "guarantee violated on {} pair(s); worst ratio {:.6}, worst excess {:.6}",
            report.violations.len(),
            report.max_mult_ratio,
            report.max_additive_excess
        );
        Ok(ExitCode::from(1))
    }
}

fn cmd_oracle(a: OracleArgs) -> anyhow::Result<ExitCode> {
    let mut stages = Stages::start();
    let g = Graph::load(&a.input)?;
    stages.mark("load");
    let (d, _) = exact_apsp(&g);
    stages.mark("oracle");
    d.save(&a.output)?;
    stages.mark("save");
    write_manifest(
        &a.output,
        "oracle",
        BTreeMap::new(),
        None,
        Some(&a.input),
        &stages,
    )?;
    println!("exact APSP on n={} -> {}", g.n(), a.output.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_mpmm(a: MpmmArgs) -> anyhow::Result<ExitCode> {
    if let Some(eps) = a.eps {
        if !eps.is_finite() || eps <= 0.0 {
            anyhow::bail!("--eps must be positive when given");
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut random_matrix = |rows: usize, cols: usize| {
        let mut m = MinPlusMatrix::filled(rows, cols, 0.0);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, rng.gen_range(0..=a.wmax) as f64);
            }
        }
        m
    };
    let lhs = random_matrix(a.size, a.size);
    let rhs = random_matrix(a.size, a.size);

    let t0 = Instant::now();
    let exact = mpmm_exact(&lhs, &rhs)?;
    let exact_ms = t0.elapsed().as_secs_f64() * 1e3;

    let mut sandwich_ok = true;
    let mut max_ratio = 1.0f64;
    let mut approx_ms = serde_json::Value::Null;
    if let Some(eps) = a.eps {
        let t1 = Instant::now();
        let approx = ampmm(&lhs, &rhs, eps)?;
        approx_ms = json!(t1.elapsed().as_secs_f64() * 1e3);
        for i in 0..a.size {
            for j in 0..a.size {
                let c = exact.get(i, j);
                let ct = approx.get(i, j);
                if ct < c - 1e-9 * c.max(1.0) || ct > (1.0 + eps) * c + 1e-9 * c.max(1.0) {
                    sandwich_ok = false;
                }
                if c > 0.0 {
                    max_ratio = max_ratio.max(ct / c);
                }
            }
        }
    }
    let report = json!({
        "size": a.size,
        "wmax": a.wmax,
        "seed": a.seed,
        "eps": a.eps,
        "exact_ms": exact_ms,
        "approx_ms": approx_ms,
        "sandwich_ok": sandwich_ok,
        "max_ratio": max_ratio,
    });
    let text = format!("{:#}\n", report);
    match &a.output {
        Some(path) => std::fs::write(path, &text)
            .with_context(|| format!("writing report {}", path.display()))?,
        None => print!("{text}"),
    }
    if sandwich_ok {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("sandwich violated: max ratio {max_ratio:.6}");
        Ok(ExitCode::from(1))
    }
}

fn cmd_bench(a: BenchArgs) -> anyhow::Result<ExitCode> {
    let sizes: Vec<usize> = a
        .sizes
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| anyhow::anyhow!("bad size {s:?} in --sizes"))
        })
        .collect::<anyhow::Result<_>>()?;
    if sizes.is_empty() || a.repeats == 0 {
        anyhow::bail!("--sizes and --repeats must be nonempty/positive");
    }
    let mut results = Vec::new();
    for (idx, &n) in sizes.iter().enumerate() {
        let g = Graph::gen_random(n, a.p, 1, a.wmax, a.seed.wrapping_add(idx as u64))?;
        let mut runs_ms = Vec::with_capacity(a.repeats);
        for _ in 0..a.repeats {
            let run_args = RunArgs {
                algo: a.algo,
                input: PathBuf::new(),
                output: PathBuf::new(),
                k: 1,
                ell: 1,
                eps: 0.0,
                beta: None,
                gamma: None,
                backend: Backend::Exact,
                parallel: false,
                seed: None,
            };
            let mut stages = Stages::start();
            let t = Instant::now();
            run_algorithm(&run_args, &g, &mut stages)?;
            runs_ms.push(t.elapsed().as_secs_f64() * 1e3);
        }
        let mean = runs_ms.iter().sum::<f64>() / runs_ms.len() as f64;
        let variance = runs_ms
            .iter()
            .map(|&x| (x - mean) * (x - mean))
            .sum::<f64>()
            / runs_ms.len() as f64;
        results.push(json!({
            "n": n,
            "m": g.m(),
            "runs_ms": runs_ms,
            "mean_ms": mean,
            "variance_ms2": variance,
        }));
    }
    let table = json!({
        "algo": a.algo.token(),
        "p": a.p,
        "wmax": a.wmax,
        "seed": a.seed,
        "repeats": a.repeats,
        "results": results,
    });
    let text = format!("{:#}\n", table);
    match &a.output {
        Some(path) => std::fs::write(path, &text)
            .with_context(|| format!("writing bench table {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}
