use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vmprox::commands::{cmd_compare, cmd_reference, cmd_run, cmd_verify};
use vmprox::config::{load_specs, InnerCap, InnerRuleChoice, RunSpec, SamplingChoice};

/// Variance-reduced proximal stochastic solvers with a diagonal
/// Barzilai-Borwein metric: runs, comparisons and re-certification.
#[derive(Parser)]
#[command(name = "vmprox", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solver and write its convergence trace as CSV.
    Run(RunArgs),
    /// Run several specs on a shared dataset and reference; merge traces.
    Compare(CompareArgs),
    /// Re-certify the oracle and property suite on this platform.
    Verify(VerifyArgs),
    /// Compute and store a high-accuracy reference solution.
    Reference(ReferenceArgs),
}

#[derive(Args, Clone)]
struct SpecFlags {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// LIBSVM dataset (plain or gzip). Relative paths also resolve under
    /// $VMPROX_DATA_DIR.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Solver tag: VM-mSRGBB, Prox-SVRG, Prox-SVRG-BB, mS2GD, mS2GD-BB,
    /// mSARAH, mSARAH-BB.
    #[arg(long)]
    algorithm: Option<String>,
    /// l1 weight of the regularizer R.
    #[arg(long)]
    lambda1: Option<f64>,
    /// Ridge weight folded into the smooth part.
    #[arg(long)]
    lambda2: Option<f64>,
    /// Inner-loop cap: absolute ("4096") or fraction of n ("0.07n").
    #[arg(long)]
    m: Option<InnerCap>,
    /// Mini-batch size.
    #[arg(long)]
    b: Option<usize>,
    /// Outer epochs.
    #[arg(long)]
    k: Option<usize>,
    /// Initial scalar stepsize (U_0 = eta0 I).
    #[arg(long)]
    eta0: Option<f64>,
    /// Closeness weight of the diagonal metric update.
    #[arg(long)]
    omega: Option<f64>,
    /// Sampling scheme: uniform | importance.
    #[arg(long)]
    sampling: Option<SamplingChoice>,
    /// Inner-length rule override: random | fixed.
    #[arg(long)]
    inner_rule: Option<InnerRuleChoice>,
    /// RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Gradient-mapping tolerance of the reference solve.
    #[arg(long)]
    reference_tol: Option<f64>,
    /// Feature-dimension override for the dataset.
    #[arg(long)]
    dim: Option<usize>,
    /// Output CSV path (stdout when omitted).
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Record wall-clock seconds per epoch (makes CSVs nondeterministic).
    #[arg(long)]
    timing: bool,
}

impl SpecFlags {
    /// Spec from the config file (when given) with flag overrides applied.
    fn build(self) -> Result<RunSpec, String> {
        let mut spec = match &self.config {
            Some(path) => {
                let mut specs = load_specs(path)?;
                if specs.len() != 1 {
                    return Err(format!(
                        "{} holds {} specs; run takes exactly one",
                        path.display(),
                        specs.len()
                    ));
                }
                specs.remove(0)
            }
            None => {
                let dataset = self
                    .dataset
                    .clone()
                    .ok_or("either --config or --dataset is required")?;
                let algorithm = self
                    .algorithm
                    .clone()
                    .ok_or("--algorithm is required without --config")?;
                let m = self.m.ok_or("--m is required without --config")?;
                let b = self.b.ok_or("--b is required without --config")?;
                let k = self.k.ok_or("--k is required without --config")?;
                RunSpec {
                    dataset,
                    algorithm,
                    lambda1: 0.0,
                    lambda2: 0.0,
                    m,
                    b,
                    k,
                    eta0: 0.1,
                    omega: 1.0,
                    sampling: SamplingChoice::Uniform,
                    inner_rule: None,
                    seed: 0,
                    reference_tol: 1e-13,
                    dim: None,
                    output: None,
                    timing: false,
                }
            }
        };
        if let Some(v) = self.dataset {
            spec.dataset = v;
        }
        if let Some(v) = self.algorithm {
            spec.algorithm = v;
        }
        if let Some(v) = self.lambda1 {
            spec.lambda1 = v;
        }
        if let Some(v) = self.lambda2 {
            spec.lambda2 = v;
        }
        if let Some(v) = self.m {
            spec.m = v;
        }
        if let Some(v) = self.b {
            spec.b = v;
        }
        if let Some(v) = self.k {
            spec.k = v;
        }
        if let Some(v) = self.eta0 {
            spec.eta0 = v;
        }
        if let Some(v) = self.omega {
            spec.omega = v;
        }
        if let Some(v) = self.sampling {
            spec.sampling = v;
        }
        if let Some(v) = self.inner_rule {
            spec.inner_rule = Some(v);
        }
        if let Some(v) = self.seed {
            spec.seed = v;
        }
        if let Some(v) = self.reference_tol {
            spec.reference_tol = v;
        }
        if let Some(v) = self.dim {
            spec.dim = Some(v);
        }
        if let Some(v) = self.output {
            spec.output = Some(v);
        }
        if self.timing {
            spec.timing = true;
        }
        Ok(spec)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    flags: SpecFlags,
    /// Reuse a stored reference solution instead of recomputing.
    #[arg(long)]
    reference: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// JSON spec files; each holds one spec or an array of specs.
    #[arg(required = true)]
    configs: Vec<PathBuf>,
    /// Concurrent runs.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Merged long-format CSV path.
    #[arg(long, short, default_value = "compare.csv")]
    output: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Deliberately corrupt a component to exercise the failure path
    /// (supported: prox-shift).
    #[arg(long, hide = true)]
    inject_fault: Option<String>,
}

#[derive(Args)]
struct ReferenceArgs {
    #[command(flatten)]
    flags: SpecFlags,
    /// Where to store the reference JSON.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => match args.flags.build() {
            Ok(spec) => cmd_run(&spec, args.reference.as_deref()),
            Err(msg) => Err(vmprox::CliError::Config(msg)),
        },
        Command::Compare(args) => {
            let mut specs = Vec::new();
            let mut failure = None;
            for path in &args.configs {
                match load_specs(path) {
                    Ok(batch) => specs.extend(batch),
                    Err(msg) => {
                        failure = Some(vmprox::CliError::Config(msg));
                        break;
                    }
                }
            }
            match failure {
                Some(e) => Err(e),
                None => cmd_compare(&specs, args.jobs, &args.output),
            }
        }
        Command::Verify(args) => cmd_verify(args.seed, args.inject_fault.as_deref()),
        Command::Reference(args) => match args.flags.build() {
            Ok(spec) => cmd_reference(&spec, &args.out),
            Err(msg) => Err(vmprox::CliError::Config(msg)),
        },
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vmprox: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
