//! Command-line frontend.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use teichflow::boundary::{foliation_vec, quasiconvex_k};
use teichflow::flow::{convergence_report, BasePoint, FlowConfig, FlowKind, Report};
use teichflow::torus::{teich_dist, teich_dist_farey};
use teichflow::{FlowTrace, MarkedQuadDiff, Slope, TorusPoint};

use crate::acceptance::{self, Settings};
use crate::config::{self, Overrides};
use crate::csv_io::{read_trace, write_trace};
use crate::error::{exit, LabError, LabResult};
use crate::numfmt::fmt12;
use crate::parallel::run_flow_parallel;
use crate::plot::render_svg;
use crate::report::report_to_string;

#[derive(Debug, Parser)]
#[command(name = "teichflow", version, about = "Earthquake and horocycle flows on Teichmüller spaces of tori")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Args)]
struct FlowArgs {
    /// Flow configuration (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Trace CSV destination (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Convergence report JSON destination.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    overrides: OverrideArgs,
}

#[derive(Debug, Args)]
struct OverrideArgs {
    /// Farey depth of the curve family.
    #[arg(long)]
    depth: Option<u32>,
    /// First sample time.
    #[arg(long)]
    t0: Option<f64>,
    /// Ratio of the geometric schedule.
    #[arg(long)]
    ratio: Option<f64>,
    /// Number of samples.
    #[arg(long)]
    count: Option<usize>,
    /// Projective tolerance for limit detection.
    #[arg(long)]
    tol: Option<f64>,
    /// Number of trailing samples that must agree.
    #[arg(long)]
    window: Option<usize>,
    /// Earthquake direction as a slope `p/q`.
    #[arg(long, allow_hyphen_values = true)]
    direction: Option<Slope>,
    /// Worker threads for sampling (output does not depend on it).
    #[arg(long)]
    threads: Option<usize>,
}

impl OverrideArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            depth: self.depth,
            t0: self.t0,
            ratio: self.ratio,
            count: self.count,
            tol: self.tol,
            window: self.window,
            direction: self.direction,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Earthquake path: extremal-length (torus) or hyperbolic-length
    /// (punctured torus) vectors, which converge projectively to the
    /// intersection vector of the earthquake lamination.
    Earthquake(FlowArgs),
    /// Teichmüller horocycle path: normalized flat-length currents, which
    /// converge to the flow-invariant horizontal foliation.
    Horocycle(FlowArgs),
    /// Teichmüller distance between two flat tori.
    Distance {
        /// First point as `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        tau1: String,
        /// Second point as `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        tau2: String,
        /// Also report the certified Farey-search value.
        #[arg(long)]
        farey: bool,
        /// Certification gap for the Farey search.
        #[arg(long, default_value_t = 1e-12)]
        gap: f64,
    },
    /// Run a configured flow and report its projective boundary limit
    /// against the expected foliation.
    BoundaryTrace {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Report JSON destination (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the trace CSV here.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Quasiconvexity constant of every length functional along a path.
    Quasiconvex {
        /// Read the path from a trace CSV instead of running a flow.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output CSV `slope,K` (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Run the acceptance suite and write its artifacts.
    Selftest {
        /// Artifact directory.
        #[arg(long, default_value = "selftest-artifacts")]
        out: PathBuf,
        /// Tolerance on the ε-ratio limit.
        #[arg(long, default_value_t = acceptance::EPS_TOL)]
        eps_tol: f64,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Log-log SVG of per-slope distance to the final normalized value.
    Plot {
        /// Trace CSV.
        #[arg(long)]
        input: PathBuf,
        /// SVG destination.
        #[arg(long)]
        out: PathBuf,
    },
}

/// Parses `argv` (including the program name), runs the command and returns
/// the exit code.
pub fn dispatch<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::CONFIG } else { exit::OK };
        }
    };
    match run(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> LabResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| LabError::io(path, e))
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> LabResult<()> {
    match path {
        Some(p) => write_file(p, bytes),
        None => std::io::stdout().write_all(bytes).map_err(|e| LabError::io("<stdout>", e)),
    }
}

fn load_config(path: Option<&Path>, default: FlowConfig, ov: &OverrideArgs) -> LabResult<FlowConfig> {
    let mut cfg = match path {
        Some(p) => config::load(p)?,
        None => default,
    };
    ov.overrides().apply(&mut cfg);
    Ok(cfg)
}

fn expected_limit(cfg: &FlowConfig, trace: &FlowTrace) -> LabResult<Option<teichflow::ProjectiveVector>> {
    let mu = match (cfg.flow, &cfg.base) {
        (FlowKind::Earthquake, _) => cfg.direction.map(|d| d.foliation()).transpose()?,
        (FlowKind::Horocycle, BasePoint::Quad(q)) => Some(q.invariant_foliation()),
        (FlowKind::Horocycle, BasePoint::Torus(t)) => Some(MarkedQuadDiff::from_torus_point(*t).invariant_foliation()),
        _ => None,
    };
    Ok(mu.map(|m| foliation_vec(m, trace.family())).transpose()?)
}

fn run_and_report(cfg: &FlowConfig, threads: Option<usize>) -> LabResult<(FlowTrace, Report)> {
    let trace = run_flow_parallel(cfg, threads)?;
    let target = expected_limit(cfg, &trace)?;
    let rep = convergence_report(&trace, target.as_ref(), cfg.tolerances.limit_tol, cfg.tolerances.window)?;
    Ok((trace, rep))
}

fn summary(rep: &Report) -> String {
    format!(
        "limit {}, rate {}, target distance {}, K {}",
        if rep.limit.is_some() { "detected" } else { "not detected" },
        fmt12(rep.rate),
        rep.target_distance.map_or("n/a".into(), fmt12),
        rep.k_label()
    )
}

fn flow_command(args: FlowArgs, kind: FlowKind) -> LabResult<u8> {
    let default = match kind {
        FlowKind::Horocycle => config::default_horocycle(),
        _ => config::default_earthquake(),
    };
    let mut cfg = load_config(args.config.as_deref(), default, &args.overrides)?;
    cfg.flow = kind;
    let trace = run_flow_parallel(&cfg, args.overrides.threads)?;
    let mut csv = Vec::new();
    write_trace(&trace, &mut csv)?;
    emit(args.out.as_deref(), &csv)?;
    if let Some(path) = &args.report {
        let target = expected_limit(&cfg, &trace)?;
        let rep = convergence_report(&trace, target.as_ref(), cfg.tolerances.limit_tol, cfg.tolerances.window)?;
        write_file(path, report_to_string(&rep).as_bytes())?;
        eprintln!("{}", summary(&rep));
    }
    Ok(exit::OK)
}

fn parse_point(s: &str) -> LabResult<TorusPoint> {
    let bad = || LabError::Usage(format!("expected re,im with im > 0, got {s:?}"));
    let (re, im) = s.split_once(',').ok_or_else(bad)?;
    let re: f64 = re.trim().parse().map_err(|_| bad())?;
    let im: f64 = im.trim().parse().map_err(|_| bad())?;
    TorusPoint::new(re, im).map_err(|_| bad())
}

fn run(cmd: Cmd) -> LabResult<u8> {
    match cmd {
        Cmd::Earthquake(args) => flow_command(args, FlowKind::Earthquake),
        Cmd::Horocycle(args) => flow_command(args, FlowKind::Horocycle),
        Cmd::Distance { tau1, tau2, farey, gap } => {
            let (a, b) = (parse_point(&tau1)?, parse_point(&tau2)?);
            let mut out = format!("{}\n", fmt12(teich_dist(a, b)));
            if farey {
                let f = teich_dist_farey(a, b, gap)?;
                out.push_str(&format!("farey {} best {}\n", fmt12(f.distance), f.best));
            }
            emit(None, out.as_bytes())?;
            Ok(exit::OK)
        }
        Cmd::BoundaryTrace { config, out, trace, overrides } => {
            let cfg = load_config(config.as_deref(), config::default_earthquake(), &overrides)?;
            let (tr, rep) = run_and_report(&cfg, overrides.threads)?;
            if let Some(path) = &trace {
                let mut csv = Vec::new();
                write_trace(&tr, &mut csv)?;
                write_file(path, &csv)?;
            }
            emit(out.as_deref(), report_to_string(&rep).as_bytes())?;
            eprintln!("{}", summary(&rep));
            Ok(if rep.limit.is_some() { exit::OK } else { exit::INCONCLUSIVE })
        }
        Cmd::Quasiconvex { input, config, out, overrides } => {
            let (slopes, t, raw) = match input {
                Some(path) => {
                    let f = std::fs::File::open(&path).map_err(|e| LabError::io(&path, e))?;
                    let table = read_trace(f)?;
                    (table.slopes, table.t, table.raw)
                }
                None => {
                    let cfg = load_config(config.as_deref(), config::default_earthquake(), &overrides)?;
                    let tr = run_flow_parallel(&cfg, overrides.threads)?;
                    let slopes = tr.family().iter().map(|s| s.to_string()).collect();
                    let raw = tr.samples().iter().map(|s| s.raw.clone()).collect();
                    (slopes, tr.times(), raw)
                }
            };
            let mut text = String::from("slope,K\n");
            for (j, slope) in slopes.iter().enumerate() {
                let pts: Vec<(f64, f64)> = t.iter().zip(&raw).map(|(t, r)| (*t, r[j])).collect();
                text.push_str(&format!("{slope},{}\n", fmt12(quasiconvex_k(&pts)?)));
            }
            emit(out.as_deref(), text.as_bytes())?;
            Ok(exit::OK)
        }
        Cmd::Selftest { out, eps_tol, threads } => {
            let settings = Settings { eps_tol, threads };
            let outcomes = acceptance::run_all(&settings);
            for o in &outcomes {
                println!("{}", o.line());
            }
            let passed = outcomes.iter().filter(|o| o.pass()).count();
            println!("{passed}/{} criteria passed", outcomes.len());
            for (name, bytes) in acceptance::artifacts(threads)? {
                write_file(&out.join(name), &bytes)?;
            }
            Ok(if passed == outcomes.len() { exit::OK } else { exit::NUMERICAL })
        }
        Cmd::Plot { input, out } => {
            let f = std::fs::File::open(&input).map_err(|e| LabError::io(&input, e))?;
            let svg = render_svg(&read_trace(f)?)?;
            write_file(&out, svg.as_bytes())?;
            Ok(exit::OK)
        }
    }
}
