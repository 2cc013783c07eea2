use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use neumann_cli::config::parse_degrees;
use neumann_cli::{
    read_table, run_config, summarize, write_table, CaseName, CliError, ModeName, Quad, RunConfig,
};

/// Spectral Galerkin solver for Neumann problems on mapped domains.
#[derive(Parser, Debug)]
#[command(name = "neumann", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve at a single degree and print one table row.
    Solve {
        #[command(flatten)]
        run: RunArgs,
        /// Polynomial degree n.
        #[arg(short = 'n', long)]
        degree: Option<usize>,
    },
    /// Solve over a list of degrees and write the convergence table.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Degrees, e.g. "2..24:2", "1..16" or "2,4,8".
        #[arg(long)]
        degrees: Option<String>,
        /// Also fit the table and fail (exit 2) unless it converges with
        /// condition exponent in [1.6, 2.4].
        #[arg(long)]
        check: bool,
    },
    /// Fit slopes to a convergence table.
    Summary {
        /// CSV file with columns n,N,max_error,cond.
        file: PathBuf,
        /// Only use rows with n at least this large.
        #[arg(long, default_value_t = 0)]
        from_degree: usize,
        /// Exit 2 unless the error decreases and the condition exponent is in [1.6, 2.4].
        #[arg(long)]
        check: bool,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    case: Option<CaseArg>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Quadrature order, or "auto" for n + 4.
    #[arg(long)]
    quad: Option<String>,
    /// Planar map parameter.
    #[arg(short = 'a', long)]
    a: Option<f64>,
    /// Star map smoothness exponent.
    #[arg(long)]
    e_s: Option<u32>,
    /// Output CSV path (standard output if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum CaseArg {
    PlanarQuadratic,
    Ellipsoid,
    Star,
    Custom,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    Helmholtz,
    PurePoisson,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match (&self.config, self.case) {
            (Some(path), _) => RunConfig::load(path)?,
            (None, Some(_)) => RunConfig::new(CaseName::PlanarQuadratic),
            (None, None) => return Err(CliError::validation("case", "give --case or --config")),
        };
        if let Some(case) = self.case {
            cfg.case = match case {
                CaseArg::PlanarQuadratic => CaseName::PlanarQuadratic,
                CaseArg::Ellipsoid => CaseName::Ellipsoid,
                CaseArg::Star => CaseName::Star,
                CaseArg::Custom => CaseName::Custom,
            };
        }
        if let Some(mode) = self.mode {
            cfg.mode = match mode {
                ModeArg::Helmholtz => ModeName::Helmholtz,
                ModeArg::PurePoisson => ModeName::PurePoisson,
            };
        }
        if let Some(q) = &self.quad {
            cfg.quad = q.parse::<Quad>()?;
        }
        if let Some(a) = self.a {
            cfg.a = a;
        }
        if let Some(e) = self.e_s {
            cfg.e_s = e;
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        Ok(cfg)
    }
}

fn emit(cfg: &RunConfig, rows: &[neumann_spectral::RunReport]) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => {
            let io_err = |source| CliError::Io {
                path: path.clone(),
                source,
            };
            let file = File::create(path).map_err(io_err)?;
            let mut w = BufWriter::new(file);
            write_table(rows, &mut w)?;
            w.flush().map_err(io_err)
        }
        None => write_table(rows, io::stdout().lock()),
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve { run, degree } => {
            let mut cfg = run.config()?;
            if let Some(n) = degree {
                cfg.degrees = vec![n];
            }
            if cfg.degrees.len() != 1 {
                return Err(CliError::validation(
                    "degree",
                    "solve needs exactly one degree (use --degree)",
                ));
            }
            let rows = run_config(&cfg)?;
            emit(&cfg, &rows)
        }
        Command::Sweep {
            run,
            degrees,
            check,
        } => {
            let mut cfg = run.config()?;
            if let Some(d) = degrees {
                cfg.degrees = parse_degrees(&d)?;
            }
            let rows = run_config(&cfg)?;
            emit(&cfg, &rows)?;
            if check {
                let table: Vec<_> = rows.iter().map(Into::into).collect();
                let summary = summarize(&table, 0)?;
                eprintln!("{summary}");
                summary.check()?;
            }
            Ok(())
        }
        Command::Summary {
            file,
            from_degree,
            check,
        } => {
            let input = File::open(&file).map_err(|source| CliError::Io { path: file, source })?;
            let rows = read_table(input)?;
            let summary = summarize(&rows, from_degree)?;
            println!("{summary}");
            if check {
                summary.check()?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
