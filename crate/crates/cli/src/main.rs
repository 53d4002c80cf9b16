use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use phiform_cli::commands::{self, Rendered};
use phiform_cli::verify::{self, Faults};
use phiform_cli::{CliError, CliResult, Command, OutputFormat, Representation, RunConfig, VerifyLevel};
use phiform_core::ThetaProfile;

/// Evaluate and stress-test the regularized three-boson contact form.
#[derive(Debug, Parser)]
#[command(name = "phiform", version, about)]
struct Cli {
    /// Read the run configuration from a TOML file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Print the effective configuration as TOML and exit.
    #[arg(long, global = true)]
    dump_config: bool,

    /// Write the primary output to this file instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,

    /// Worker threads for parallel sweeps.
    #[arg(long, global = true, env = "PHIFORM_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Option<Sub>,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// γ_c in closed form and by bisection on the symbol, and γ′_c.
    Thresholds,
    /// Sample the symbol S(x) on [0, x_max] as CSV.
    Symbol {
        /// Three-body coupling γ ≥ 0.
        #[arg(long, allow_negative_numbers = true)]
        gamma: Option<f64>,
        /// Right end of the sample range.
        #[arg(long)]
        xmax: Option<f64>,
        /// Number of equally spaced samples.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Evaluate the form components for one charge.
    Form {
        #[command(flatten)]
        form: FormArgs,
        /// Representation used to evaluate the form.
        #[arg(long, value_enum)]
        rep: Option<Representation>,
    },
    /// Sweep the scaled trial charges and fit the leading order.
    Collapse {
        #[command(flatten)]
        form: FormArgs,
        /// Largest dilation factor n.
        #[arg(long)]
        nmax: Option<u32>,
        /// Use n = 1, 2, 4, … up to nmax instead of every integer.
        #[arg(long)]
        geometric: bool,
    },
    /// Run the verification battery.
    Verify {
        /// `fast` runs the quick checks, `full` runs all of them.
        #[arg(long, value_enum)]
        level: Option<VerifyLevel>,
        #[arg(long, hide = true, allow_negative_numbers = true)]
        perturb_gamma_c: Option<f64>,
    },
}

#[derive(Debug, Args)]
struct FormArgs {
    /// `gaussian:<scale>` or `fbeta:<beta>`.
    #[arg(long)]
    charge: Option<String>,
    /// Three-body coupling γ ≥ 0.
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// Spectral shift λ ≥ 0.
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    /// Inverse scattering length.
    #[arg(long, allow_negative_numbers = true)]
    inv_a: Option<f64>,
    /// Cutoff of the indicator θ profile.
    #[arg(long)]
    theta_b: Option<f64>,
}

impl FormArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(c) = &self.charge {
            cfg.charge_spec = c.clone();
        }
        if let Some(g) = self.gamma {
            cfg.form_params.gamma = g;
        }
        if let Some(l) = self.lambda {
            cfg.form_params.lambda = l;
        }
        if let Some(a) = self.inv_a {
            cfg.form_params.inv_scattering_length = a;
        }
        if let Some(b) = self.theta_b {
            cfg.form_params.theta = ThetaProfile::Indicator { b };
        }
    }
}

fn build_config(cli: &Cli) -> CliResult<(RunConfig, Faults)> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::from_toml(&text)?
        }
        None => RunConfig::default(),
    };
    let mut faults = Faults::default();
    match &cli.command {
        None if cli.config.is_none() => {
            return Err(CliError::Usage("no subcommand given (try --help)".into()));
        }
        None => {}
        Some(Sub::Thresholds) => cfg.command = Command::Thresholds,
        Some(Sub::Symbol { gamma, xmax, samples }) => {
            cfg.command = Command::Symbol;
            if let Some(g) = gamma {
                cfg.form_params.gamma = *g;
            }
            if let Some(x) = xmax {
                cfg.symbol.x_max = *x;
            }
            if let Some(s) = samples {
                cfg.symbol.samples = *s;
            }
        }
        Some(Sub::Form { form, rep }) => {
            cfg.command = Command::Form;
            form.apply(&mut cfg);
            if let Some(r) = rep {
                cfg.representation = *r;
            }
        }
        Some(Sub::Collapse { form, nmax, geometric }) => {
            cfg.command = Command::Collapse;
            form.apply(&mut cfg);
            if let Some(n) = nmax {
                cfg.collapse.n_max = *n;
            }
            cfg.collapse.geometric |= geometric;
        }
        Some(Sub::Verify { level, perturb_gamma_c }) => {
            cfg.command = Command::Verify;
            if let Some(l) = level {
                cfg.verify_level = *l;
            }
            faults.gamma_c_offset = perturb_gamma_c.unwrap_or(0.0);
        }
    }
    if let Some(o) = &cli.output {
        cfg.output_path = Some(o.clone());
    }
    if let Some(f) = cli.format {
        cfg.output_format = Some(f);
    }
    cfg.validate()?;
    Ok((cfg, faults))
}

fn execute(cfg: &RunConfig, faults: &Faults) -> CliResult<(Rendered, Option<CliError>)> {
    let rendered = match cfg.command {
        Command::Thresholds => commands::thresholds()?,
        Command::Symbol => commands::symbol(cfg)?,
        Command::Form => commands::form(cfg)?,
        Command::Collapse => commands::collapse(cfg)?,
        Command::Verify => {
            let reports = verify::run(cfg.verify_level, faults);
            let summary = verify::summary(cfg.verify_level, &reports);
            let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.name).collect();
            let mut stdout = serde_json::to_string_pretty(&summary).expect("json values serialize");
            stdout.push('\n');
            let err = (!failed.is_empty()).then(|| CliError::Verification {
                failed: failed.len(),
                names: failed.join(", "),
            });
            return Ok((Rendered { stdout, stderr: None }, err));
        }
    };
    Ok((rendered, None))
}

fn emit(cfg: &RunConfig, r: &Rendered) -> CliResult<()> {
    match &cfg.output_path {
        Some(path) => std::fs::write(path, &r.stdout)?,
        None => std::io::stdout().lock().write_all(r.stdout.as_bytes())?,
    }
    if let Some(e) = &r.stderr {
        std::io::stderr().lock().write_all(e.as_bytes())?;
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let (cfg, faults) = build_config(&cli)?;
    if cli.dump_config {
        print!("{}", cfg.to_toml());
        return Ok(());
    }
    let (rendered, failure) = execute(&cfg, &faults)?;
    emit(&cfg, &rendered)?;
    failure.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
