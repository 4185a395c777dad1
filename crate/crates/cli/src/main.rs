use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lsiac::experiments::{
    compute_errors, emit_contour, pollution_mask, run_experiment, Case, ExperimentOptions, ProjectionRule,
    TestFunction,
};
use lsiac::io::{read_decomposition, read_field, write_decomposition, write_field};
use lsiac::mra::{decompose, reconstruct};
use lsiac::refine::{enhance, RefineMode, Strategy};
use lsiac::Error;

#[derive(Parser)]
#[command(name = "lsiac", version, about = "Line-SIAC filtering and multiresolution transfer of modal fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Once,
    Each,
}

#[derive(Subcommand)]
enum Command {
    /// L2-project a test function onto a uniform mesh of [0,1]^d.
    Project {
        #[arg(long)]
        func: String,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Refine a field by filtering and projecting onto finer meshes.
    Refine {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        levels: usize,
        #[arg(long, value_enum, default_value = "each")]
        strategy: StrategyArg,
        /// Use the precomputed stencil instead of pointwise quadrature.
        #[arg(long)]
        stencil: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Multiwavelet decomposition and reconstruction.
    Mra {
        #[command(subcommand)]
        action: MraAction,
    },
    /// Errors of a field against a test function.
    Errors {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        func: String,
        #[arg(long = "eval-n")]
        eval_n: usize,
        #[arg(long = "exclude-pollution", requires_all = ["coarse_n", "level"])]
        exclude_pollution: bool,
        #[arg(long = "coarse-n")]
        coarse_n: Option<usize>,
        #[arg(long)]
        level: Option<usize>,
        #[arg(long, default_value_t = 6)]
        nodes: usize,
    },
    /// Reproduce an error table.
    Experiment {
        #[arg(long = "case")]
        case: String,
        /// Comma-separated degrees, e.g. 0,1,2.
        #[arg(long, value_delimiter = ',', required = true)]
        degrees: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        markdown: Option<PathBuf>,
        /// Write every value with 17 significant digits.
        #[arg(long = "full-precision")]
        full_precision: bool,
        /// Refine by pointwise quadrature instead of the stencil (slow).
        #[arg(long)]
        direct: bool,
        #[arg(long, default_value_t = 6)]
        nodes: usize,
        /// Gauss points per axis for projecting the initial condition
        /// (default: the case's own rule).
        #[arg(long = "projection-points")]
        projection_points: Option<usize>,
    },
    /// Sample the pointwise error of a 2D field on a uniform grid.
    Contour {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        func: String,
        #[arg(long)]
        grid: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum MraAction {
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    Reconstruct {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn create(path: &Path) -> lsiac::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn open(path: &Path) -> lsiac::Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}

fn run(cli: Cli) -> lsiac::Result<()> {
    match cli.command {
        Command::Project {
            func,
            dim,
            n,
            degree,
            out,
        } => {
            let f = TestFunction::lookup(&func, dim)?;
            let field = f.project(n, degree)?;
            let mut w = create(&out)?;
            write_field(&mut w, &field)?;
            w.flush()?;
        }
        Command::Refine {
            input,
            levels,
            strategy,
            stencil,
            out,
        } => {
            let field = read_field(open(&input)?)?;
            let strategy = match strategy {
                StrategyArg::Once => Strategy::Once,
                StrategyArg::Each => Strategy::Each,
            };
            let mode = if stencil { RefineMode::Stencil } else { RefineMode::Direct };
            let refined = enhance(&field, levels, strategy, mode)?;
            let mut w = create(&out)?;
            write_field(&mut w, &refined)?;
            w.flush()?;
        }
        Command::Mra { action } => match action {
            MraAction::Decompose { input, out } => {
                let dec = decompose(&read_field(open(&input)?)?)?;
                let mut w = create(&out)?;
                write_decomposition(&mut w, &dec)?;
                w.flush()?;
            }
            MraAction::Reconstruct { input, out } => {
                let field = reconstruct(&read_decomposition(open(&input)?)?)?;
                let mut w = create(&out)?;
                write_field(&mut w, &field)?;
                w.flush()?;
            }
        },
        Command::Errors {
            input,
            func,
            eval_n,
            exclude_pollution,
            coarse_n,
            level,
            nodes,
        } => {
            let field = read_field(open(&input)?)?;
            let f = TestFunction::lookup(&func, field.dim())?;
            let mask = match (exclude_pollution, coarse_n, level) {
                (true, Some(n0), Some(lv)) => Some(pollution_mask(&f, n0, lv, n0 << lv, field.degree())?),
                _ => None,
            };
            let r = compute_errors(&field, &f, eval_n, mask.as_ref(), nodes)?;
            println!("L2,Linf,excluded,total");
            println!("{:.6e},{:.6e},{},{}", r.l2, r.linf, r.excluded, r.total);
        }
        Command::Experiment {
            case,
            degrees,
            out,
            markdown,
            full_precision,
            direct,
            nodes,
            projection_points,
        } => {
            let case = Case::parse(&case)?;
            let opts = ExperimentOptions {
                mode: if direct { RefineMode::Direct } else { RefineMode::Stencil },
                nodes,
                projection: projection_points.map_or(ProjectionRule::CaseDefault, ProjectionRule::Points),
            };
            let table = run_experiment(case, &degrees, &opts)?;
            let mut w = create(&out)?;
            table.write_csv(&mut w, full_precision)?;
            w.flush()?;
            if let Some(md) = markdown {
                let mut w = create(&md)?;
                table.write_markdown(&mut w)?;
                w.flush()?;
            }
        }
        Command::Contour {
            input,
            func,
            grid,
            out,
        } => {
            let field = read_field(open(&input)?)?;
            let f = TestFunction::lookup(&func, field.dim())?;
            let mut w = create(&out)?;
            emit_contour(&field, &f, grid, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonFinite(_) => 3,
        Error::UnknownFunction(_)
        | Error::UnknownCase(_)
        | Error::InvalidArgument(_)
        | Error::UnsupportedDimension(_)
        | Error::UnsupportedDegree(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
