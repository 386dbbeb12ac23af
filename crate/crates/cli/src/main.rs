use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use relhom::format::{parse_complex, parse_points, write_barcode};
use relhom::oracle::Oracle;
use relhom::random::{random_pair, random_points};
use relhom::svg::emit_svg;
use relhom::{
    apply_lag, build_rips, compute_prh, compute_prh_lag, umatch_decompose, validate_pair, Barcode, FilteredPair,
    PrhError, PrimeField, SparseMatrix,
};

#[derive(Parser)]
#[command(name = "relhom", version, about = "Persistent relative homology barcodes with relative cycle representatives")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Vietoris–Rips complex of a point cloud paired with its lagged copy.
    Rips {
        points: PathBuf,
        #[arg(long)]
        lag: f64,
        #[command(flatten)]
        build: BuildArgs,
        #[arg(long, value_enum, default_value_t = PipelineChoice::Both)]
        pipeline: PipelineChoice,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Explicit filtered pair, one cell per line: `id dim b_F b_G face:coeff,...`.
    Prh {
        complex: PathBuf,
        #[arg(long, default_value_t = 2)]
        field: u32,
        #[arg(long, value_enum, default_value_t = PipelineChoice::General)]
        pipeline: PipelineChoice,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Factor a sparse matrix as T·M = D·S.
    Umatch {
        matrix: PathBuf,
        /// Directory receiving T.txt, M.txt and S.txt.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check both pipelines against the dense oracle.
    Verify {
        #[arg(long, conflicts_with_all = ["complex", "sweep"], requires = "lag")]
        points: Option<PathBuf>,
        #[arg(long)]
        lag: Option<f64>,
        #[arg(long, conflicts_with = "sweep")]
        complex: Option<PathBuf>,
        /// Number of random pairs, seeded from `--seed`.
        #[arg(long)]
        sweep: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        build: BuildArgs,
    },
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long, default_value_t = 2)]
    field: u32,
    #[arg(long, default_value_t = 2)]
    max_dim: usize,
    #[arg(long, default_value_t = f64::INFINITY)]
    max_radius: f64,
}

#[derive(Args)]
struct OutputArgs {
    /// Barcode file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PipelineChoice {
    General,
    Lag,
    Both,
}

enum Failure {
    /// Bad input or configuration.
    Input(String),
    /// An invariant check failed.
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Internal(_) => 3,
        }
    }
}

impl From<PrhError> for Failure {
    fn from(e: PrhError) -> Self {
        match e {
            PrhError::Internal(_) => Failure::Internal(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, Failure>;

fn input<E: std::fmt::Display>(context: &str) -> impl FnOnce(E) -> Failure + '_ {
    move |e| Failure::Input(format!("{context}: {e}"))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn field(p: u32) -> Result<PrimeField> {
    PrimeField::new(p).map_err(input("--field"))
}

fn emit(barcode: &Barcode, output: &OutputArgs) -> Result<()> {
    let text = write_barcode(barcode);
    match &output.out {
        Some(path) => fs::write(path, text).map_err(input(&path.display().to_string()))?,
        None => print!("{text}"),
    }
    if let Some(path) = &output.svg {
        emit_svg(barcode, path).map_err(input(&path.display().to_string()))?;
    }
    Ok(())
}

fn cmd_rips(points: &Path, lag: f64, build: &BuildArgs, pipeline: PipelineChoice, output: &OutputArgs) -> Result<()> {
    let pts = parse_points(&read(points)?).map_err(input(&points.display().to_string()))?;
    let rips = build_rips(&pts, build.max_dim, build.max_radius, field(build.field)?).map_err(input("rips"))?;
    let pair = apply_lag(&rips, lag).map_err(input("--lag"))?;
    eprintln!("{} points, {} cells, lag {lag}", pts.len(), rips.len());
    let barcode = match pipeline {
        PipelineChoice::General => compute_prh(&pair)?,
        PipelineChoice::Lag => compute_prh_lag(&rips, lag)?,
        PipelineChoice::Both => {
            let general = compute_prh(&pair)?;
            let fast = compute_prh_lag(&rips, lag)?;
            if !general.same_intervals(&fast) {
                eprintln!("verdict: FAIL (general and lag barcodes differ)");
                return Err(Failure::Internal("pipelines disagree".into()));
            }
            eprintln!("verdict: PASS ({} bars from both pipelines)", general.len());
            general
        }
    };
    emit(&barcode, output)
}

fn cmd_prh(complex: &Path, p: u32, pipeline: PipelineChoice, output: &OutputArgs) -> Result<()> {
    if pipeline != PipelineChoice::General {
        return Err(Failure::Input(
            "explicit complexes only support --pipeline general; the lag pipeline needs a point cloud".into(),
        ));
    }
    let mut pair = parse_complex(&read(complex)?, &field(p)?).map_err(input(&complex.display().to_string()))?;
    let extended = pair.extend_to_terminal();
    if extended > 0 {
        eprintln!(
            "terminal extension: {extended} cells enter the subcomplex at t_end = {}",
            pair.t_end()
        );
    }
    let violations = validate_pair(&pair);
    if !violations.is_empty() {
        for v in &violations {
            eprintln!("violation: {v}");
        }
        return Err(Failure::Input(format!("{} violations", violations.len())));
    }
    emit(&compute_prh(&pair)?, output)
}

fn cmd_umatch(matrix: &Path, out: Option<&Path>) -> Result<()> {
    let d = SparseMatrix::parse_text(&read(matrix)?).map_err(input(&matrix.display().to_string()))?;
    let f = umatch_decompose(&d);
    let ok = f.validate(&d).map_err(|e| Failure::Internal(e.to_string()))?;
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(input(&dir.display().to_string()))?;
            for (name, m) in [("T.txt", &f.t), ("M.txt", &f.m), ("S.txt", &f.s)] {
                let path = dir.join(name);
                fs::write(&path, m.to_text()).map_err(input(&path.display().to_string()))?;
            }
        }
        None => {
            for (name, m) in [("T", &f.t), ("M", &f.m), ("S", &f.s)] {
                print!("# {name}\n{}", m.to_text());
            }
        }
    }
    eprintln!("rank {}", f.rank());
    if ok {
        eprintln!("verdict: PASS");
        Ok(())
    } else {
        eprintln!("verdict: FAIL");
        Err(Failure::Internal("T·M ≠ D·S".into()))
    }
}

/// Check one pair against the oracle; returns the report line.
fn check_pair(label: &str, pair: &FilteredPair, lag_of: Option<(&relhom::Filtration, f64)>) -> Result<(bool, String)> {
    let general = compute_prh(pair)?;
    let oracle = Oracle::new(pair).map_err(input(label))?;
    let mut problems = Vec::new();
    let mut reference = oracle.reference_barcode();
    reference.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2)));
    if general.intervals() != reference {
        problems.push("barcode differs from oracle".to_string());
    }
    let mut barcodes = vec![general];
    if let Some((rips, lag)) = lag_of {
        let fast = compute_prh_lag(rips, lag)?;
        if !fast.same_intervals(&barcodes[0]) {
            problems.push("lag pipeline differs".into());
        }
        barcodes.push(fast);
    }
    for bc in &barcodes {
        for bar in &bc.bars {
            if let Err(e) = oracle.check_representative(bar) {
                problems.push(format!("{} bar [{}, {}) in dim {}: {e}", bc.pipeline, bar.birth, bar.death, bar.dim));
            }
        }
    }
    let mut line = format!("{label}: {} bars", barcodes[0].len());
    if problems.is_empty() {
        Ok((true, format!("PASS  {line}")))
    } else {
        let _ = write!(line, " ({})", problems.join("; "));
        Ok((false, format!("FAIL  {line}")))
    }
}

fn cmd_verify(
    points: Option<&Path>,
    lag: Option<f64>,
    complex: Option<&Path>,
    sweep: Option<u64>,
    seed: u64,
    build: &BuildArgs,
) -> Result<()> {
    let f = field(build.field)?;
    let mut results = Vec::new();
    if let Some(path) = points {
        let lag = lag.ok_or_else(|| Failure::Input("--points requires --lag".into()))?;
        let pts = parse_points(&read(path)?).map_err(input(&path.display().to_string()))?;
        let rips = build_rips(&pts, build.max_dim, build.max_radius, f).map_err(input("rips"))?;
        let pair = apply_lag(&rips, lag).map_err(input("--lag"))?;
        results.push(check_pair(&path.display().to_string(), &pair, Some((&rips, lag)))?);
    } else if let Some(path) = complex {
        let mut pair = parse_complex(&read(path)?, &f).map_err(input(&path.display().to_string()))?;
        pair.extend_to_terminal();
        results.push(check_pair(&path.display().to_string(), &pair, None)?);
    } else if let Some(n) = sweep {
        for s in seed..seed + n {
            let pair = random_pair(s, &f, 40);
            results.push(check_pair(&format!("pair seed {s}"), &pair, None)?);
            let rips = build_rips(&random_points(s, 6, 2), build.max_dim, build.max_radius, f.clone())
                .map_err(input("rips"))?;
            let lag = 0.2;
            let lagged = apply_lag(&rips, lag).map_err(input("--lag"))?;
            results.push(check_pair(&format!("rips seed {s} lag {lag}"), &lagged, Some((&rips, lag)))?);
        }
    } else {
        return Err(Failure::Input("one of --points, --complex or --sweep is required".into()));
    }
    let passed = results.iter().filter(|r| r.0).count();
    for (_, line) in &results {
        println!("{line}");
    }
    println!("{passed} of {} checks passed", results.len());
    if passed == results.len() {
        Ok(())
    } else {
        Err(Failure::Internal("verification failed".into()))
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Rips {
            points,
            lag,
            build,
            pipeline,
            output,
        } => cmd_rips(&points, lag, &build, pipeline, &output),
        Command::Prh {
            complex,
            field,
            pipeline,
            output,
        } => cmd_prh(&complex, field, pipeline, &output),
        Command::Umatch { matrix, out } => cmd_umatch(&matrix, out.as_deref()),
        Command::Verify {
            points,
            lag,
            complex,
            sweep,
            seed,
            build,
        } => cmd_verify(points.as_deref(), lag, complex.as_deref(), sweep, seed, &build),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Input(msg) | Failure::Internal(msg)) = &f;
            eprintln!("error: {msg}");
            ExitCode::from(f.code())
        }
    }
}
