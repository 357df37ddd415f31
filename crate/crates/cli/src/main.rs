use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use opmat_cli::{
    convert, emit, parse_tolerance, run, CliError, Experiment, ExperimentConfig, Format, KernelArg,
    SigmaCase, Tolerances, OUT_DIR_ENV,
};

const TABLES_HELP: &str = "\
Tables (CSV columns; extra tables go to <experiment>-<table>.csv):
  norm-identities             identity,trial,expected,computed,abs_error,pass
  schur-submultiplicativity   trial,d,N,structure_a,structure_b,norm_a,norm_b,norm_product,slack,pass
  kernel-axioms               kernel,n,coeff0_re,coeff0_im,mean,l1_norm,tail_mass
  convolution-identity        pair,degree_eta,degree_f,max_deviation,pass
  sigma-profiles              case,n,distance
    -verdicts                 case,kernel,N,reference_norm,tolerance,verdict,at_index,floor
    -witness                  delta,norm_difference,sup_phase_gap
  toeplitz-symbol-convergence N,op_norm,symbol_sup,gap,relative_gap
  phi-bounds                  sample,family,degree,phi_norm,grid_sup,bound,slack,pass
    -estimates                quantity,value,witness
  hinf-profile                case,r,sup_norm,poisson_distance
    -verdicts                 case,op_norm,tolerance,verdict,at_r,floor
    -geometric                z_re,z_im,value_re,value_im,closed_form_re,closed_form_im,error
  multiplier-bounds           matrix,quantity,t,value,witness

Floats are printed with 12 significant digits.

Exit status: 0 success, 1 configuration or input error, 2 numerical
non-convergence, 3 a --check assertion failed.";

#[derive(Debug, Parser)]
#[command(name = "opmat", version, about = "Experiments on block matrices with operator entries", after_help = TABLES_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// Experiment to run.
    #[arg(long, value_enum)]
    experiment: Option<Experiment>,

    /// Dimension of each block.
    #[arg(long = "d", default_value_t = 2)]
    d: usize,

    /// Number of block rows and columns.
    #[arg(long = "N", default_value_t = 8)]
    n: usize,

    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Output directory; tables go to stdout when neither this nor the
    /// environment variable is set.
    #[arg(long, env = OUT_DIR_ENV)]
    out: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "csv")]
    format: Format,

    /// Exit with status 3 when any assertion of the selected experiments fails.
    #[arg(long)]
    check: bool,

    /// Override a check threshold, e.g. `--tolerance rank_one=1e-10`.
    #[arg(long = "tolerance", value_name = "KEY=VAL", value_parser = parse_tolerance)]
    tolerances: Vec<(String, f64)>,

    /// Kernel family for kernel-axioms and sigma-profiles.
    #[arg(long, value_enum)]
    kernel: Option<KernelArg>,

    /// Single case for sigma-profiles.
    #[arg(long, value_enum)]
    case: Option<SigmaCase>,

    /// Largest kernel index (kernel-axioms) or section size (toeplitz-symbol-convergence).
    #[arg(long)]
    n_max: Option<usize>,

    /// Number of random trials or samples.
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Re-serialise a matrix or scalar symbol file in canonical form.
    Convert {
        input: PathBuf,
        output: PathBuf,
        /// Store every block explicitly.
        #[arg(long)]
        densify: bool,
    },
}

fn execute(cli: Cli) -> Result<(), CliError> {
    if let Some(Command::Convert { input, output, densify }) = cli.command {
        return convert(&input, &output, densify);
    }
    let experiment = cli
        .experiment
        .ok_or_else(|| CliError::Config("--experiment is required".into()))?;
    let cfg = ExperimentConfig {
        experiment,
        d: cli.d,
        n: cli.n,
        seed: cli.seed,
        tolerances: Tolerances::with_overrides(&cli.tolerances)?,
        kernel: cli.kernel,
        case: cli.case,
        n_max: cli.n_max,
        trials: cli.trials,
    };
    let reports = run(&cfg)?;
    emit(&reports, cli.format, cli.out.as_deref())?;
    let mut failures = 0;
    for r in &reports {
        eprint!("{}", r.summary());
        failures += r.failures();
    }
    if cli.check && failures > 0 {
        return Err(CliError::CheckFailed(failures));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
