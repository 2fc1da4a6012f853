use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser};

use omband::cli::{emit, run_command, verify, CliError, Command, Format, RunConfig};

/// Band structure and quench dynamics of a phase-driven optomechanical array.
///
/// Settings are resolved as built-in defaults, then the `--config` file, then
/// flags. Numbers accept multiples of pi, e.g. `0.8pi`, `pi/4`, `-pi/2`.
#[derive(Parser, Debug)]
#[command(name = "omband", version)]
struct Cli {
    /// bands | weights | gap | meanfield | thermal | quench-trace | quench-scan | verify
    command: Command,
    /// Flat `key = value` file (TOML syntax).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
    /// Also run the oracle checks and report them on stderr.
    #[arg(long)]
    verify: bool,
    /// Worker threads; 0 means one per core.
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    params: Params,
}

macro_rules! params {
    ($($field:ident => $key:literal),* $(,)?) => {
        #[derive(Args, Debug)]
        struct Params {
            $(
                #[arg(long = $key, value_name = "VALUE", allow_hyphen_values = true)]
                $field: Option<String>,
            )*
        }

        impl Params {
            fn pairs(&self) -> Vec<(&'static str, &str)> {
                let mut out = Vec::new();
                $(
                    if let Some(v) = &self.$field {
                        out.push(($key, v.as_str()));
                    }
                )*
                out
            }
        }
    };
}

params! {
    omega_m => "omega_m",
    delta => "delta",
    j_hop => "J",
    k_hop => "K",
    g => "g",
    theta => "theta",
    kappa => "kappa",
    gamma => "Gamma",
    gamma_m => "gamma_m",
    n_th => "n_th",
    omega_d => "Omega_d",
    g_vacuum => "G",
    n_k => "n_k",
    n_t => "n_t",
    n_k_coarse => "n_k_coarse",
    refine_tol => "refine_tol",
    kd => "kd",
    thetas => "thetas",
    tq_rule => "tq_rule",
    tq_factor => "tq_factor",
    t_q => "t_q",
    tol => "tol",
    max_iter => "max_iter",
    damping => "damping",
    n_steps => "n_steps",
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    cfg.apply_pairs(cli.params.pairs())?;
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if let Some(out) = &cli.out {
        cfg.out = Some(out.clone());
    }
    if let Some(n) = cli.threads {
        cfg.threads = n;
    }
    cfg.verify |= cli.verify;
    Ok(cfg.validated()?)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = resolve(cli)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::Io(io::Error::other(e.to_string())))?;
    pool.install(|| {
        let table = run_command(&cfg, cli.command)?;
        match &cfg.out {
            Some(path) => {
                let mut w = BufWriter::new(File::create(path)?);
                emit(&table, cfg.format, &mut w)?;
                w.flush()?;
            }
            None => {
                let stdout = io::stdout();
                let mut w = stdout.lock();
                emit(&table, cfg.format, &mut w)?;
                w.flush()?;
            }
        }
        if cli.command == Command::Verify {
            if table.column("passed").is_some_and(|p| p[0] != 1.0) {
                return Err(CliError::VerifyFailed("see the emitted table".into()));
            }
        } else if cfg.verify {
            let v = verify(&cfg)?;
            eprintln!("verify: {v}");
            if !v.passed() {
                return Err(CliError::VerifyFailed(v.to_string()));
            }
        }
        Ok(())
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("omband: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
