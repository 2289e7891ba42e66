use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nvholo_cli::error::{CliError, CliResult};
use nvholo_cli::execute;
use nvholo_cli::experiments::list_experiments;
use nvholo_cli::spec::{parse_batch, ConnectionKind, ExperimentName, ExperimentSpec, Format};
use nvholo_cli::units::{gauss_to_epsilon, us_to_time};

/// Holonomies and spin dynamics of rotating NV centres.
///
/// Times are in units of 1/D (D = 2.87 GHz) unless a flag says otherwise.
#[derive(Parser)]
#[command(name = "nvholo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Output file, or - for standard output (the default)
    #[arg(long)]
    out: Option<String>,
    /// Defaults to the output extension, then to the experiment's usual format
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Add wall-clock time to the provenance block (breaks byte-identical reruns)
    #[arg(long)]
    record_timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Wilson loop of a path (default: square)
    Holonomy {
        /// Built-in name (circle, square, equator, longitude) or path file
        #[arg(long)]
        path: Option<String>,
        /// Integration steps per segment
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, value_enum)]
        connection: Option<ConnectionKind>,
        #[command(flatten)]
        output: Output,
    },
    /// Ordering difference of two loops (default: circle then square)
    Witness {
        #[arg(long)]
        path_a: Option<String>,
        #[arg(long)]
        path_b: Option<String>,
        #[arg(long)]
        steps: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Rotated |+1> population over a grid of splittings and rotation times
    SweepDegeneracy {
        /// Comma-separated splittings Δ = 1 + ε
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        deltas: Option<Vec<f64>>,
        /// Comma-separated total times
        #[arg(long, value_delimiter = ',', conflicts_with = "times_us")]
        times: Option<Vec<f64>>,
        /// Comma-separated total times in microseconds
        #[arg(long, value_delimiter = ',')]
        times_us: Option<Vec<f64>>,
        #[arg(long)]
        path: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Ensemble under on-axis Gaussian field noise
    NoiseEnsemble {
        /// Noise standard deviation in units of D
        #[arg(long, conflicts_with = "sigma_gauss")]
        sigma: Option<f64>,
        /// Noise standard deviation in gauss
        #[arg(long)]
        sigma_gauss: Option<f64>,
        /// Number of piecewise-constant noise intervals
        #[arg(long)]
        events: Option<usize>,
        #[arg(long)]
        members: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        time: TimeArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Ensemble over randomly perturbed circle paths
    PathPerturb {
        /// Largest polar-angle excursion, degrees
        #[arg(long)]
        divergence_deg: Option<f64>,
        #[arg(long)]
        members: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        time: TimeArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Gyroscope signal curve and minimum detectable rotation
    Gyro {
        /// Number of NV centres
        #[arg(long)]
        n: Option<f64>,
        /// Collection efficiency
        #[arg(long)]
        eta: Option<f64>,
        /// Readout contrast R
        #[arg(long)]
        contrast: Option<f64>,
        /// T1, seconds
        #[arg(long)]
        t1: Option<f64>,
        /// T2*, seconds
        #[arg(long)]
        t2star: Option<f64>,
        /// Measurement time, seconds
        #[arg(long)]
        tau: Option<f64>,
        /// Rotation rate, rad/s
        #[arg(long, allow_hyphen_values = true)]
        omega: Option<f64>,
        /// Evolution time, seconds
        #[arg(long)]
        t: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Run a named experiment or a spec file
    Run {
        /// Experiment name; omit when --spec is given
        #[arg(required_unless_present = "spec")]
        experiment: Option<String>,
        /// TOML spec file
        #[arg(long, conflicts_with = "experiment")]
        spec: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Parameter override, repeatable
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[command(flatten)]
        output: Output,
    },
    /// List experiments
    List,
    /// Run every document of a batch file (TOML documents separated by ---)
    Batch {
        file: PathBuf,
        /// Directory for outputs that do not name an absolute path
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long)]
        record_timing: bool,
    },
}

#[derive(Args)]
struct TimeArgs {
    /// Total rotation time
    #[arg(long, conflicts_with = "time_us")]
    time: Option<f64>,
    /// Total rotation time in microseconds
    #[arg(long)]
    time_us: Option<f64>,
    /// Splitting Δ = 1 + ε
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
}

impl TimeArgs {
    fn apply(&self, spec: &mut ExperimentSpec) {
        if let Some(t) = self.time.or(self.time_us.map(us_to_time)) {
            spec.set("total_time", t);
        }
        if let Some(d) = self.delta {
            spec.set("delta", d);
        }
    }
}

fn set_opt<T: Into<toml::Value>>(spec: &mut ExperimentSpec, key: &str, value: Option<T>) {
    if let Some(v) = value {
        spec.set(key, v);
    }
}

fn floats(xs: Vec<f64>) -> toml::Value {
    toml::Value::Array(xs.into_iter().map(toml::Value::Float).collect())
}

fn usize_value(n: usize) -> CliResult<toml::Value> {
    i64::try_from(n)
        .map(toml::Value::Integer)
        .map_err(|_| CliError::config(format!("{n} is too large")))
}

fn run_subcommand(spec: ExperimentSpec, output: &Output) -> CliResult<()> {
    let target = output
        .out
        .clone()
        .or_else(|| spec.output.clone())
        .unwrap_or_else(|| "-".into());
    execute(&spec, &target, output.format, output.record_timing)
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Holonomy {
            path,
            steps,
            connection,
            output,
        } => {
            let mut spec = ExperimentSpec::new(ExperimentName::SquareHolonomy);
            set_opt(&mut spec, "path", path);
            set_opt(&mut spec, "steps", steps.map(usize_value).transpose()?);
            set_opt(
                &mut spec,
                "connection",
                connection.map(|c| format!("{c:?}").to_lowercase()),
            );
            run_subcommand(spec, &output)
        }
        Command::Witness {
            path_a,
            path_b,
            steps,
            output,
        } => {
            let mut spec = ExperimentSpec::new(ExperimentName::Witness);
            set_opt(&mut spec, "path_a", path_a);
            set_opt(&mut spec, "path_b", path_b);
            set_opt(&mut spec, "steps", steps.map(usize_value).transpose()?);
            run_subcommand(spec, &output)
        }
        Command::SweepDegeneracy {
            deltas,
            times,
            times_us,
            path,
            output,
        } => {
            let mut spec = ExperimentSpec::new(ExperimentName::DegeneracySweep);
            set_opt(&mut spec, "deltas", deltas.map(floats));
            let times = times.or(times_us.map(|v| v.into_iter().map(us_to_time).collect()));
            set_opt(&mut spec, "times", times.map(floats));
            set_opt(&mut spec, "path", path);
            run_subcommand(spec, &output)
        }
        Command::NoiseEnsemble {
            sigma,
            sigma_gauss,
            events,
            members,
            seed,
            time,
            output,
        } => {
            let mut spec = ExperimentSpec::new(ExperimentName::NoiseEnsemble);
            spec.seed = seed;
            set_opt(
                &mut spec,
                "sigma",
                sigma.or(sigma_gauss.map(gauss_to_epsilon)),
            );
            set_opt(&mut spec, "events", events.map(usize_value).transpose()?);
            set_opt(&mut spec, "members", members.map(usize_value).transpose()?);
            time.apply(&mut spec);
            run_subcommand(spec, &output)
        }
        Command::PathPerturb {
            divergence_deg,
            members,
            seed,
            time,
            output,
        } => {
            let mut spec = ExperimentSpec::new(ExperimentName::PathPerturb);
            spec.seed = seed;
            set_opt(&mut spec, "divergence_deg", divergence_deg);
            set_opt(&mut spec, "members", members.map(usize_value).transpose()?);
            time.apply(&mut spec);
            run_subcommand(spec, &output)
        }
        Command::Gyro {
            n,
            eta,
            contrast,
            t1,
            t2star,
            tau,
            omega,
            t,
            output,
        } => {
            let mut spec = ExperimentSpec::new(ExperimentName::Gyro);
            for (key, value) in [
                ("n", n),
                ("eta", eta),
                ("contrast", contrast),
                ("t1", t1),
                ("t2star", t2star),
                ("tau", tau),
                ("omega", omega),
                ("t", t),
            ] {
                set_opt(&mut spec, key, value);
            }
            run_subcommand(spec, &output)
        }
        Command::Run {
            experiment,
            spec,
            seed,
            set,
            output,
        } => {
            let mut spec = match (experiment, spec) {
                (Some(name), _) => ExperimentSpec::new(name.parse()?),
                (None, Some(file)) => {
                    let text = std::fs::read_to_string(&file)
                        .map_err(|e| CliError::io(file.display(), e))?;
                    ExperimentSpec::parse(&text)?
                }
                (None, None) => unreachable!("clap requires one of them"),
            };
            if seed.is_some() {
                spec.seed = seed;
            }
            for assignment in &set {
                spec.set_from_str(assignment)?;
            }
            run_subcommand(spec, &output)
        }
        Command::List => {
            for entry in list_experiments() {
                println!(
                    "{}: {} [target: {}]",
                    entry.name, entry.description, entry.target
                );
            }
            Ok(())
        }
        Command::Batch {
            file,
            out_dir,
            record_timing,
        } => {
            let text =
                std::fs::read_to_string(&file).map_err(|e| CliError::io(file.display(), e))?;
            let specs = parse_batch(&text)?;
            for (i, spec) in specs.iter().enumerate() {
                let name = match &spec.output {
                    Some(o) if o == "-" => o.clone(),
                    Some(o) => out_dir.join(o).display().to_string(),
                    None => {
                        let ext = spec
                            .format
                            .unwrap_or(spec.experiment.default_format())
                            .extension();
                        out_dir
                            .join(format!("{:02}_{}.{ext}", i + 1, spec.experiment))
                            .display()
                            .to_string()
                    }
                };
                execute(spec, &name, None, record_timing)?;
                eprintln!("{}: wrote {name}", spec.experiment);
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nvholo: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
