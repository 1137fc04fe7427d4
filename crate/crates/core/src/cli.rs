//! Command-line front end. `run` parses arguments, dispatches and maps
//! errors to exit codes: 0 success, 1 usage, 2 data, 3 numerical failure.
//!
//! Every subcommand writes a manifest of `key = value` lines echoing the
//! command line and every effective parameter, including seeds.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::asymptotics::{attach_covariance, write_variance_table};
use crate::baselines::{cpf_estimate, sequential_baseline, BaselineFlavor, CpfConfig};
use crate::error::{Error, Result};
use crate::estimators::{alse_one, lse_joint, lse_one, sequential_fit_init, FitResult, Flavor, Method};
use crate::experiments::{
    apply_config, fit_real, parse_components, run_experiment, to_config_text, ExperimentConfig,
};
use crate::io::{read_signal_file, write_signal_file};
use crate::optimizer::SimplexConfig;
use crate::periodogram::{scan, GridKind, GridSpec, Init, Kernel};
use crate::signal::{add, generate_noise, synthesize_clean, ChirpComponent, NoiseSpec};

#[derive(Debug, Parser)]
#[command(name = "chirpfit", version, about = "Estimate elementary chirp signals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KernelArg {
    Ptf,
    Cpf,
    Pcpf,
    Dechirp,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FlavorArg {
    Lse,
    Alse,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize a signal and write it as t,re,im CSV.
    Synth {
        /// a_re:a_im:beta[,a_re:a_im:beta...]
        #[arg(long)]
        components: String,
        #[arg(long)]
        n: usize,
        /// Complex noise variance; 0 gives a noiseless signal.
        #[arg(long, default_value_t = 0.0)]
        sigma2: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Evaluate a kernel on its search grid.
    Scan {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "ptf")]
        kernel: KernelArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Estimate chirp components.
    Estimate {
        #[arg(long = "in")]
        input: PathBuf,
        /// lse, alse, lse-joint, seq-lse, seq-alse, dechirp, cpf or pcpf
        #[arg(long)]
        method: Method,
        #[arg(long, default_value_t = 1)]
        p: usize,
        /// Starting rates, one per component.
        #[arg(long = "init-beta", value_delimiter = ',')]
        init_beta: Vec<f64>,
        /// Noise variance for the covariance; estimated from the RSS if absent.
        #[arg(long)]
        sigma2: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Monte Carlo experiment from a preset and/or a config file.
    Mc {
        #[arg(long)]
        config: Option<PathBuf>,
        /// 4a, 4b, 4c-1, 4c-2 or 4c-3
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        replications: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print asymptotic variances of (a_re, a_im, beta).
    Avar {
        #[arg(long)]
        components: String,
        #[arg(long, value_delimiter = ',')]
        sigma2: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Sequential fit with order selection and residual diagnostics.
    FitReal {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "max-order")]
        max_order: usize,
        #[arg(long, default_value_t = 0.01)]
        tau: f64,
        #[arg(long = "lb-lags", default_value_t = 20)]
        lb_lags: usize,
        #[arg(long, value_enum, default_value = "lse")]
        flavor: FlavorArg,
        #[arg(long)]
        out: PathBuf,
    },
}

struct Manifest {
    lines: Vec<(String, String)>,
}

impl Manifest {
    fn new(argv: &[OsString]) -> Self {
        let cmd = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect::<Vec<_>>().join(" ");
        let mut m = Manifest { lines: Vec::new() };
        m.set("chirpfit_version", env!("CARGO_PKG_VERSION"));
        m.set("command", cmd);
        m.set("threads", std::env::var("CHIRPFIT_THREADS").unwrap_or_else(|_| "0".into()));
        m
    }

    fn set(&mut self, key: &str, value: impl ToString) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    fn write(&self, path: &Path) -> Result<()> {
        let mut text = String::new();
        for (k, v) in &self.lines {
            text.push_str(&format!("{k} = {v}\n"));
        }
        fs::write(path, text)?;
        Ok(())
    }
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".manifest");
    PathBuf::from(s)
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn fit_table(fit: &FitResult) -> String {
    let mut s = format!("{:>3}  {:>22}  {:>22}  {:>22}\n", "k", "a_re", "a_im", "beta");
    for (k, c) in fit.components.iter().enumerate() {
        s.push_str(&format!("{:>3}  {:>22.15e}  {:>22.15e}  {:>22.15e}\n", k + 1, c.a_re, c.a_im, c.beta));
    }
    if let Some(r) = fit.rss() {
        s.push_str(&format!("rss = {r:.6e}\n"));
    }
    for w in &fit.warnings {
        s.push_str(&format!("warning: {w}\n"));
    }
    s
}

fn estimate(
    y: &crate::signal::ComplexSignal,
    method: Method,
    p: usize,
    init_beta: &[f64],
    cfg: &SimplexConfig,
) -> Result<FitResult> {
    if !init_beta.is_empty() && init_beta.len() != p {
        return Err(usage(format!("--init-beta has {} values for p = {p}", init_beta.len())));
    }
    let single = matches!(method, Method::Lse | Method::Alse | Method::Cpf);
    if single && p != 1 {
        return Err(usage(format!("{method} estimates one component; use a sequential method for p = {p}")));
    }
    let inits: Vec<Init> = init_beta.iter().map(|&b| Init::Value(b)).collect();
    let first = inits.first().cloned().unwrap_or_default();
    match method {
        Method::Lse => lse_one(y, first, cfg),
        Method::Alse => alse_one(y, first, cfg),
        Method::Cpf => {
            let c = cpf_estimate(y, &CpfConfig::default(), first, cfg)?;
            let a = crate::estimators::profile_amplitudes(y, &[c.beta_resolved])?[0];
            let comp = ChirpComponent::from_amplitude(a, c.beta_resolved);
            let mut fit = FitResult::new(Method::Cpf);
            fit.rss_trajectory.push(y.subtract_component(&comp).energy());
            fit.components.push(comp);
            if c.alias_ambiguous {
                fit.warnings.push(format!("rate is alias-ambiguous (raw omega = {:.12})", c.omega));
            }
            if c.window_clipped {
                fit.warnings.push("CPF lag window clipped".into());
            }
            fit.optim.push(c.optim);
            Ok(fit)
        }
        Method::LseJoint => lse_joint(y, p, (!init_beta.is_empty()).then_some(init_beta), cfg),
        Method::SeqLse => sequential_fit_init(y, p, Flavor::Lse, &inits, cfg),
        Method::SeqAlse => sequential_fit_init(y, p, Flavor::Alse, &inits, cfg),
        Method::Dechirp => sequential_baseline(y, p, BaselineFlavor::Dechirp, &CpfConfig::default(), &inits, cfg),
        Method::Pcpf => sequential_baseline(y, p, BaselineFlavor::Pcpf, &CpfConfig::default(), &inits, cfg),
    }
}

fn dispatch(cli: Cli, argv: &[OsString], out: &mut dyn Write) -> Result<()> {
    let mut m = Manifest::new(argv);
    match cli.command {
        Command::Synth { components, n, sigma2, seed, out: path, manifest } => {
            let model = parse_components(&components)?;
            let clean = synthesize_clean(&model, n)?;
            let y = if sigma2 == 0.0 { clean } else { add(&clean, &generate_noise(&NoiseSpec::iid(sigma2, seed), n)?)? };
            write_signal_file(&y, &path)?;
            m.set("subcommand", "synth");
            m.set("components", crate::experiments::format_components(&model));
            m.set("n", n);
            m.set("sigma2", sigma2);
            m.set("seed", seed);
            m.set("out", path.display());
            m.write(&manifest.unwrap_or_else(|| sidecar(&path)))?;
            writeln!(out, "wrote {} samples to {}", n, path.display())?;
        }
        Command::Scan { input, kernel, out: path, manifest } => {
            let y = read_signal_file(&input)?;
            let n = y.len();
            let cpf = CpfConfig::default();
            let (grid, k) = match kernel {
                KernelArg::Ptf => (GridSpec::new(GridKind::PtfFull, n)?, Kernel::Ptf),
                KernelArg::Cpf => (GridSpec::new(GridKind::CpfHalf, n)?, Kernel::Cpf { t_center: cpf.center(n) }),
                KernelArg::Pcpf => (GridSpec::new(GridKind::CpfHalf, n)?, Kernel::Pcpf { times: cpf.product_times(n) }),
                KernelArg::Dechirp => (GridSpec::new(GridKind::Fourier, n)?, Kernel::Dechirp),
            };
            let s = scan(&y, &grid, &k)?;
            s.write_csv(fs::File::create(&path)?)?;
            m.set("subcommand", "scan");
            m.set("in", input.display());
            m.set("kernel", format!("{k:?}"));
            m.set("grid", format!("{:?} (modulus {}, {} points)", grid.kind, grid.modulus(), grid.len()));
            m.set("out", path.display());
            m.write(&manifest.unwrap_or_else(|| sidecar(&path)))?;
            if let Some(best) = s.argmax() {
                writeln!(out, "argmax = {best:.12}")?;
            }
        }
        Command::Estimate { input, method, p, init_beta, sigma2, out: path, manifest } => {
            let y = read_signal_file(&input)?;
            let cfg = SimplexConfig::default();
            let mut fit = estimate(&y, method, p, &init_beta, &cfg)?;
            if method.is_least_squares() {
                attach_covariance(&mut fit, sigma2, y.len())?;
            }
            write!(out, "{}", fit_table(&fit))?;
            m.set("subcommand", "estimate");
            m.set("in", input.display());
            m.set("method", method);
            m.set("p", p);
            m.set("init_beta", init_beta.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(","));
            m.set("sigma2", sigma2.map_or("estimated".to_string(), |s| s.to_string()));
            m.set("x_tol", cfg.x_tol);
            m.set("f_tol", cfg.f_tol);
            if let Some(path) = &path {
                fit.write_csv(fs::File::create(path)?)?;
                if fit.covariance.is_some() {
                    let mut cov = path.as_os_str().to_owned();
                    cov.push(".cov.csv");
                    fit.write_covariance_csv(fs::File::create(PathBuf::from(cov))?)?;
                }
                m.set("out", path.display());
            }
            let mpath = manifest.or_else(|| path.as_deref().map(sidecar)).unwrap_or_else(|| sidecar(&input));
            m.write(&mpath)?;
        }
        Command::Mc { config, preset, replications, out: dir } => {
            let mut cfg = match &preset {
                Some(p) => ExperimentConfig::preset(p)?,
                None => ExperimentConfig::default(),
            };
            if let Some(path) = &config {
                cfg = apply_config(cfg, &fs::read_to_string(path)?)?;
            }
            if config.is_none() && preset.is_none() {
                return Err(usage("mc needs --preset or --config"));
            }
            if let Some(r) = replications {
                cfg.replications = r;
            }
            let dir = dir.or_else(|| cfg.output_path.clone()).ok_or_else(|| usage("mc needs --out or output_path"))?;
            cfg.output_path = Some(dir.clone());
            cfg.validate()?;
            fs::create_dir_all(&dir)?;
            let table = run_experiment(&cfg)?;
            table.write_csv(fs::File::create(dir.join("mse_table.csv"))?)?;
            fs::write(dir.join("config.txt"), to_config_text(&cfg))?;
            m.set("subcommand", "mc");
            m.set("preset", preset.as_deref().unwrap_or("none"));
            for line in to_config_text(&cfg).lines() {
                if let Some((k, v)) = line.split_once(" = ") {
                    m.set(k, v);
                }
            }
            m.write(&dir.join("manifest.txt"))?;
            writeln!(out, "wrote {} rows to {}", table.rows.len(), dir.join("mse_table.csv").display())?;
        }
        Command::Avar { components, sigma2, n, manifest } => {
            if sigma2.is_empty() || n.is_empty() {
                return Err(usage("avar needs --sigma2 and --n"));
            }
            let model = parse_components(&components)?;
            write_variance_table(&model, &n, &sigma2, &mut *out)?;
            m.set("subcommand", "avar");
            m.set("components", crate::experiments::format_components(&model));
            m.set("sigma2", sigma2.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(","));
            m.set("n", n.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(","));
            m.write(&manifest.unwrap_or_else(|| PathBuf::from("avar.manifest")))?;
        }
        Command::FitReal { input, max_order, tau, lb_lags, flavor, out: dir } => {
            let y = read_signal_file(&input)?;
            let flavor = match flavor {
                FlavorArg::Lse => Flavor::Lse,
                FlavorArg::Alse => Flavor::Alse,
            };
            let r = fit_real(&y, max_order, tau, lb_lags, flavor, &SimplexConfig::default())?;
            fs::create_dir_all(&dir)?;
            r.fit.write_csv(fs::File::create(dir.join("fit.csv"))?)?;
            write_signal_file(&r.fitted, &dir.join("fitted.csv"))?;
            write_signal_file(&r.residual, &dir.join("residuals.csv"))?;
            let mut w = csv::Writer::from_writer(fs::File::create(dir.join("rss.csv"))?);
            w.write_record(["stage", "rss"])?;
            for (k, v) in r.report.rss_trajectory.iter().enumerate() {
                w.write_record([(k + 1).to_string(), format!("{v:e}")])?;
            }
            w.flush()?;
            let text = r.report.to_text();
            fs::write(dir.join("report.txt"), &text)?;
            write!(out, "{text}")?;
            m.set("subcommand", "fit-real");
            m.set("in", input.display());
            m.set("max_order", max_order);
            m.set("tau", tau);
            m.set("lb_lags", lb_lags);
            m.set("flavor", format!("{flavor:?}").to_lowercase());
            m.write(&dir.join("manifest.txt"))?;
        }
    }
    Ok(())
}

/// Maps an error to its exit code.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        3
    } else {
        2
    }
}

/// Runs the CLI with explicit output streams; returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match dispatch(cli, &argv, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}
