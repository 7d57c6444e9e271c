use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use zermelo_bench::{
    fit_trend, ratio_summary, report, run_instance, write_outputs, write_plots, ExperimentConfig,
    SeedPolicy, Series,
};
use zermelo_core::bounds::{
    a_posteriori, coupling_h, local_bound, search_domain, APrioriSetup, BoundReport, ValidityFlags,
};
use zermelo_core::graph::{
    build_lattice, interpolate, shortest_path, write_arcs_csv, write_vertices_csv, Digraph,
    LatticeDigraph, LatticeOptions, DEFAULT_VERTEX_CAP,
};
use zermelo_core::optimizer::{measure_curvature, optimize, OptimizerConfig};
use zermelo_core::quadrature::QuadratureSpec;
use zermelo_core::trajectory::{resample_constant_speed, Path};
use zermelo_core::wind::PRESETS;
use zermelo_core::{Error, Vec2, WindField};

#[derive(Parser)]
#[command(name = "zb", version, about = "Discretization error experiments for minimum-time navigation in wind")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Built-in wind instances.
    Instances {
        #[command(subcommand)]
        command: InstancesCmd,
    },
    Graph {
        #[command(subcommand)]
        command: GraphCmd,
    },
    Path {
        #[command(subcommand)]
        command: PathCmd,
    },
    Bounds {
        #[command(subcommand)]
        command: BoundsCmd,
    },
    Experiment {
        #[command(subcommand)]
        command: ExperimentCmd,
    },
}

#[derive(Subcommand)]
enum InstancesCmd {
    List,
}

#[derive(Subcommand)]
enum GraphCmd {
    /// Build a lattice and print its size; optionally dump vertices and arcs.
    Build {
        #[command(flatten)]
        problem: Problem,
        #[command(flatten)]
        density: Density,
        /// Directory for vertices.csv and arcs.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum PathCmd {
    /// Shortest path on a lattice.
    Discrete {
        #[command(flatten)]
        problem: Problem,
        #[command(flatten)]
        density: Density,
        /// `tau,x,y` CSV of the path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Continuous optimization from a seed path.
    Optimize {
        #[command(flatten)]
        problem: Problem,
        /// Seed as `tau,x,y` CSV; the straight line when absent.
        #[arg(long)]
        seed: Option<PathBuf>,
        #[arg(long, default_value_t = 256)]
        control_points: usize,
        #[arg(long, default_value_t = 5000)]
        max_iterations: usize,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        #[arg(long)]
        out: PathBuf,
        /// JSON certificate (time, iterations, gradient norm, heading residual).
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum BoundsCmd {
    /// All three bounds for a continuous optimum and a discrete path.
    Eval {
        #[command(flatten)]
        problem: Problem,
        /// Continuous optimum as `tau,x,y` CSV.
        #[arg(long)]
        xi_c: PathBuf,
        /// Compared path as `tau,x,y` CSV.
        #[arg(long)]
        xi: PathBuf,
        #[arg(long)]
        l: f64,
        /// Density radius, for the coupling flag.
        #[arg(long)]
        h: Option<f64>,
    },
}

#[derive(Subcommand)]
enum ExperimentCmd {
    /// Run a density sweep and write sweep.csv, timings.csv and the plots.
    Run {
        /// ExperimentConfig as JSON; defaults apply to missing fields.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the configured instance.
        #[arg(long)]
        instance: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
        /// Seed every row with the straight line instead of the discrete path.
        #[arg(long)]
        seed_straight: bool,
    },
    /// Fitted exponents and mean bound/error ratios of a sweep table.
    Fit {
        #[arg(long)]
        table: PathBuf,
        /// Restrict to one series (error, a_posteriori, local, a_priori, a_posteriori_0..2).
        #[arg(long)]
        series: Option<String>,
    },
    /// Plots for an existing sweep table.
    Report {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "sweep")]
        title: String,
    },
}

#[derive(Args)]
struct Problem {
    /// Preset name; see `zb instances list`.
    #[arg(long, default_value = "shear")]
    instance: String,
    /// Wind field JSON replacing the preset.
    #[arg(long)]
    field: Option<PathBuf>,
    #[arg(long, value_parser = parse_point, default_value = "0,0")]
    origin: Vec2,
    #[arg(long, value_parser = parse_point, default_value = "1,0")]
    destination: Vec2,
    /// Gauss-Legendre points per panel.
    #[arg(long, default_value_t = 5)]
    quadrature: usize,
}

#[derive(Args)]
struct Density {
    #[arg(long)]
    l: f64,
    /// Density radius; defaults to the coupling with `--sigma`.
    #[arg(long)]
    h: Option<f64>,
    /// Curvature for `h = σ̄ l²/L̃²`, `L̃` the end point distance.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_VERTEX_CAP)]
    vertex_cap: usize,
}

fn parse_point(s: &str) -> Result<Vec2, String> {
    let mut it = s.split(',').map(|v| v.trim().parse::<f64>());
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(x)), Some(Ok(y)), None) => Ok(Vec2::new(x, y)),
        _ => Err(format!("expected 'x,y', got '{s}'")),
    }
}

/// Exit code 2: the input was rejected; 3: the computation failed.
enum Failure {
    Validation(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_)
            | Error::SimplifiedInapplicable { .. }
            | Error::DegeneratePath(_)
            | Error::GridMismatch(..)
            | Error::WindExceedsAirspeed { .. }
            | Error::BoundExceedsAirspeed { .. } => Failure::Validation(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn read_file(path: &FsPath) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

fn read_path(path: &FsPath) -> CliResult<Path> {
    let f = File::open(path).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
    Ok(Path::read_csv(BufReader::new(f))?)
}

impl Problem {
    fn field(&self) -> CliResult<WindField> {
        Ok(match &self.field {
            Some(p) => WindField::from_json(&read_file(p)?)?,
            None => WindField::preset(&self.instance)?,
        })
    }

    fn quad(&self) -> QuadratureSpec {
        QuadratureSpec::new(self.quadrature)
    }

    fn lattice(&self, field: &WindField, d: &Density) -> CliResult<LatticeDigraph> {
        let direct = self.origin.distance(self.destination);
        let h = match (d.h, d.sigma) {
            (Some(h), _) => h,
            (None, Some(sigma)) => coupling_h(sigma, direct, d.l),
            (None, None) => return Err(Failure::Validation("give --h or --sigma".into())),
        };
        let (domain, _) = search_domain(self.origin, self.destination, field)?;
        let options = LatticeOptions { vertex_cap: d.vertex_cap };
        Ok(build_lattice(&domain, h, d.l, field, &self.quad(), self.origin, self.destination, options)?)
    }
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json values serialize"));
}

fn create(path: &FsPath) -> CliResult<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Instances { command: InstancesCmd::List } => {
            for name in PRESETS {
                let f = WindField::preset(name)?;
                println!("{name}\tmax wind {}\tfeature length {}", f.max_speed(), f.feature_length());
            }
        }
        Command::Graph { command: GraphCmd::Build { problem, density, out } } => {
            let field = problem.field()?;
            let g = problem.lattice(&field, &density)?;
            if let Some(dir) = out {
                fs::create_dir_all(&dir)?;
                write_vertices_csv(&g, create(&dir.join("vertices.csv"))?)?;
                write_arcs_csv(&g, create(&dir.join("arcs.csv"))?)?;
            }
            print_json(&json!({
                "vertices": g.vertex_count(),
                "arcs": g.arc_count(),
                "h": g.h(),
                "l": g.l(),
                "radius": g.radius(),
            }));
        }
        Command::Path { command: PathCmd::Discrete { problem, density, out } } => {
            let field = problem.field()?;
            let g = problem.lattice(&field, &density)?;
            let find = |p: Vec2| g.find_vertex(p).ok_or_else(|| Failure::Runtime("end point is not a vertex".into()));
            let dp = shortest_path(&g, find(problem.origin)?, find(problem.destination)?, field.airspeed + field.max_speed())?;
            let path = interpolate(&dp, &g)?;
            path.write_csv(create(&out)?)?;
            print_json(&json!({ "cost": dp.cost, "vertices": dp.vertices.len(), "length": path.length() }));
        }
        Command::Path {
            command: PathCmd::Optimize { problem, seed, control_points, max_iterations, tolerance, out, certificate },
        } => {
            let field = problem.field()?;
            let seed = match seed {
                Some(p) => read_path(&p)?,
                None => Path::straight(problem.origin, problem.destination)?,
            };
            let config = OptimizerConfig {
                control_points,
                max_iterations,
                gradient_tolerance: tolerance,
                quadrature: problem.quad(),
                ..OptimizerConfig::default()
            };
            let r = optimize(&seed, &field, &config)?;
            r.path.write_csv(create(&out)?)?;
            let cert = json!({
                "time": r.time,
                "seedTime": r.seed_time,
                "iterations": r.iterations,
                "status": r.status,
                "gradientNorm": r.certificate.gradient_norm,
                "headingResidual": r.certificate.residual,
            });
            if let Some(p) = certificate {
                fs::write(&p, serde_json::to_string_pretty(&cert).expect("json values serialize") + "\n")?;
            }
            print_json(&cert);
        }
        Command::Bounds { command: BoundsCmd::Eval { problem, xi_c, xi, l, h } } => {
            let field = problem.field()?;
            let quad = problem.quad();
            let base = read_path(&xi_c)?;
            let xi_c = resample_constant_speed(&base, base.vertices().len())?;
            let xi = read_path(&xi)?;
            let post = a_posteriori(&xi_c, &xi.constant_speed(), &field, &quad)?;
            let sigma = measure_curvature(&xi_c);
            let local = local_bound(&xi_c, &field, &quad, sigma, l)?;
            let setup = APrioriSetup::new(problem.origin, problem.destination, &field)?;
            let measured = xi.travel_time(&field, &quad)? - xi_c.travel_time(&field, &quad)?;
            let report = BoundReport {
                a_posteriori: post,
                local: local.clone(),
                a_priori: setup.bound(l),
                a_priori_sigma: setup.sigma,
                measured_error: measured,
                flags: ValidityFlags {
                    simplified_valid: setup.simplified_valid,
                    l_within_length: l <= local.length,
                    coupling_respected: h.is_none_or(|h| h <= coupling_h(sigma, local.length, l) * (1.0 + 1e-9)),
                },
            };
            println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
        }
        Command::Experiment { command: ExperimentCmd::Run { config, instance, out, jobs, seed_straight } } => {
            let mut cfg: ExperimentConfig = match config {
                Some(p) => serde_json::from_str(&read_file(&p)?)
                    .map_err(|e| Failure::Validation(format!("{}: {e}", p.display())))?,
                None => ExperimentConfig::default(),
            };
            if let Some(i) = instance {
                cfg.instance = i;
            }
            if let Some(j) = jobs {
                cfg.jobs = j;
            }
            if seed_straight {
                cfg.seed_policy = SeedPolicy::Straight;
            }
            let dir = out.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
            let (table, timings) = run_instance(&cfg)?;
            write_outputs(&table, &timings, &dir)?;
            let failed = table.rows.iter().filter(|r| !r.ok()).count();
            eprintln!("{} rows ({failed} failed) written to {}", table.rows.len(), dir.display());
        }
        Command::Experiment { command: ExperimentCmd::Fit { table, series } } => {
            let f = File::open(&table).map_err(|e| Failure::Validation(format!("{}: {e}", table.display())))?;
            let rows = report::read_csv(BufReader::new(f))?;
            let selected: Vec<Series> = match series {
                Some(s) => vec![Series::parse(&s).ok_or_else(|| Failure::Validation(format!("unknown series '{s}'")))?],
                None => [Series::Error, Series::APosteriori, Series::Local, Series::APriori]
                    .into_iter()
                    .chain((0..3).map(Series::Term))
                    .collect(),
            };
            let mut exponents = serde_json::Map::new();
            for s in selected {
                let p = fit_trend(&rows, s).map_err(|e| Failure::Validation(e.to_string()))?;
                exponents.insert(s.name(), json!(p));
            }
            let ratios = ratio_summary(&rows).ok();
            print_json(&json!({ "exponents": exponents, "ratios": ratios }));
        }
        Command::Experiment { command: ExperimentCmd::Report { table, out, title } } => {
            let f = File::open(&table).map_err(|e| Failure::Validation(format!("{}: {e}", table.display())))?;
            let rows = report::read_csv(BufReader::new(f))?;
            if rows.is_empty() {
                return Err(Failure::Validation("sweep table is empty".into()));
            }
            write_plots(&rows, &title, &out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
