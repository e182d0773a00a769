use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use hurwitzkit::bounds::{generalized_hurwitz_bounds_with, BoundCertificate};
use hurwitzkit::contraction::{contraction_report, DEFAULT_MARGIN};
use hurwitzkit::covering::{hurwitz_covering_for, universal_covering_for};
use hurwitzkit::density::{
    hahn_density_paper_normalization, hurwitz_density, hyperbolic_density, quasihyperbolic_density,
};
use hurwitzkit::domain::parse_point;
use hurwitzkit::geodesic::{distances, DistanceValue, Metric, Stencil};
use hurwitzkit::verify::{verify_check, verify_suite, OutputFormat, RunConfig, Status, CHECK_IDS};
use hurwitzkit::{CPoint, DomainSpec, Execution};

/// Boundary-distance pairs sampled for the global contraction constant.
const CONTRACTION_PAIRS: usize = 16;

#[derive(Parser)]
#[command(name = "hurwitzkit", version, about = "Hurwitz, hyperbolic and quasihyperbolic densities and distances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Density at one or more points.
    Density(DensityArgs),
    /// Geodesic distance between point pairs.
    Distance(DistanceArgs),
    /// Certified bounds for the generalized Hurwitz density.
    Bounds(BoundsArgs),
    /// Contraction constants for an inclusion of domains.
    Contraction(ContractionArgs),
    /// Evaluate the Hurwitz (or universal) covering at a basepoint.
    Covering(CoveringArgs),
    /// Run verification checks.
    Verify(VerifyArgs),
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON file with run settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long, value_parser = parse_stencil)]
    stencil: Option<Stencil>,
    #[arg(long)]
    max_levels: Option<usize>,
    #[arg(long)]
    paper_normalization: bool,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum, Default)]
enum DensityKind {
    Hyperbolic,
    #[default]
    Hurwitz,
    Quasihyperbolic,
}

#[derive(Args)]
struct DensityArgs {
    #[arg(long, value_parser = parse_domain)]
    domain: DomainSpec,
    /// Point as re,im; repeatable.
    #[arg(long, required = true, allow_hyphen_values = true, value_parser = parse_cpoint)]
    point: Vec<CPoint>,
    #[arg(long, value_enum, default_value_t)]
    metric: DensityKind,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct DistanceArgs {
    #[arg(long, value_parser = parse_domain)]
    domain: DomainSpec,
    /// Point pair as re,im:re,im; repeatable.
    #[arg(long, required = true, allow_hyphen_values = true, value_parser = parse_pair)]
    points: Vec<(CPoint, CPoint)>,
    #[arg(long, default_value = "hurwitz", value_parser = parse_metric)]
    metric: Metric,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct BoundsArgs {
    /// Target domain.
    #[arg(long, value_parser = parse_domain)]
    domain: DomainSpec,
    #[arg(long, value_parser = parse_domain)]
    basepoint_domain: DomainSpec,
    #[arg(long, required = true, allow_hyphen_values = true, value_parser = parse_cpoint)]
    point: Vec<CPoint>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ContractionArgs {
    /// Inner domain.
    #[arg(long, value_parser = parse_domain)]
    domain: DomainSpec,
    #[arg(long, value_parser = parse_domain)]
    outer: DomainSpec,
    /// Boundary layers sampled.
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_MARGIN)]
    margin: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CoveringArgs {
    #[arg(long, value_parser = parse_domain)]
    domain: DomainSpec,
    /// Basepoint b, the image of 0.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_cpoint)]
    point: CPoint,
    /// Disk points to evaluate at; repeatable.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_cpoint)]
    at: Vec<CPoint>,
    /// Use the universal covering instead of the Hurwitz covering.
    #[arg(long)]
    universal: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct VerifyArgs {
    /// `all` or a single check id.
    #[arg(long, default_value = "all")]
    suite: String,
    #[command(flatten)]
    common: Common,
}

fn parse_domain(s: &str) -> Result<DomainSpec, String> {
    s.parse().map_err(|e: hurwitzkit::Error| e.to_string())
}

fn parse_cpoint(s: &str) -> Result<CPoint, String> {
    parse_point(s).map_err(|e| e.to_string())
}

fn parse_pair(s: &str) -> Result<(CPoint, CPoint), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected re,im:re,im in {s:?}"))?;
    Ok((parse_cpoint(a)?, parse_cpoint(b)?))
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    s.parse().map_err(|e: hurwitzkit::Error| e.to_string())
}

fn parse_stencil(s: &str) -> Result<Stencil, String> {
    let n: u8 = s.parse().map_err(|_| format!("stencil must be 8 or 16, got {s:?}"))?;
    Stencil::try_from(n).map_err(|e| e.to_string())
}

/// Failure modes with distinct exit codes.
enum Failure {
    Usage(String),
    Numerical(hurwitzkit::Error),
}

impl From<hurwitzkit::Error> for Failure {
    fn from(e: hurwitzkit::Error) -> Self {
        Failure::Numerical(e)
    }
}

fn load_config(c: &Common) -> Result<RunConfig, Failure> {
    let mut cfg = match &c.config {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("--config {}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("--config {}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    if let Some(t) = c.tol {
        cfg.tolerance = t;
    }
    if let Some(b) = c.budget {
        cfg.budget = b;
    }
    if let Some(s) = c.stencil {
        cfg.stencil = s;
    }
    if let Some(m) = c.max_levels {
        cfg.max_levels = m;
    }
    if c.paper_normalization {
        cfg.paper_normalization = true;
    }
    match c.format {
        Some(Format::Json) => cfg.format = OutputFormat::Json,
        Some(Format::Csv) => cfg.format = OutputFormat::Csv,
        None => {}
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(cfg)
}

fn one_or_many<T: Serialize>(items: &[T]) -> Value {
    match items {
        [one] => serde_json::to_value(one).expect("serializable"),
        many => serde_json::to_value(many).expect("serializable"),
    }
}

fn render_json(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn csv_field(v: f64) -> String {
    if v.is_finite() {
        v.to_string()
    } else {
        String::new()
    }
}

fn run_density(a: &DensityArgs) -> Result<String, Failure> {
    let cfg = load_config(&a.common)?;
    let mut values = Vec::with_capacity(a.point.len());
    for &w in &a.point {
        let v = match a.metric {
            DensityKind::Hyperbolic => hyperbolic_density(&a.domain, w)?,
            DensityKind::Hurwitz => hurwitz_density(&a.domain, w)?,
            DensityKind::Quasihyperbolic => quasihyperbolic_density(&a.domain, w)?,
        };
        let paper = match (cfg.paper_normalization, a.metric, a.domain) {
            (true, DensityKind::Hurwitz, DomainSpec::PuncturedDisk) => Some(hahn_density_paper_normalization(w)?),
            _ => None,
        };
        values.push((w, v, paper));
    }
    Ok(match cfg.format {
        OutputFormat::Json => {
            let items: Vec<Value> = values
                .iter()
                .map(|(_, v, paper)| {
                    let mut o = serde_json::to_value(v).expect("serializable");
                    if let Some(p) = paper {
                        o["paper_normalization_upper"] = json!(p);
                    }
                    o
                })
                .collect();
            render_json(&one_or_many(&items))
        }
        OutputFormat::Csv => {
            let mut out = String::from("re,im,lower,upper,provenance\n");
            for (w, v, _) in &values {
                out += &format!("{},{},{},{},{}\n", w.re, w.im, csv_field(v.lower()), csv_field(v.upper()), v.provenance());
            }
            out
        }
    })
}

fn run_distance(a: &DistanceArgs) -> Result<String, Failure> {
    let cfg = load_config(&a.common)?;
    let results: Vec<DistanceValue> = distances(&a.domain, a.metric, &a.points, &cfg.distance_options(), Execution::default())
        .into_iter()
        .collect::<hurwitzkit::Result<_>>()?;
    Ok(match cfg.format {
        OutputFormat::Json => render_json(&one_or_many(&results)),
        // witness paths, one block per pair; interval results export the lower path
        OutputFormat::Csv => {
            let mut out = String::new();
            for r in &results {
                let g = match r {
                    DistanceValue::Point(g) => g,
                    DistanceValue::Interval { lower, .. } => lower,
                };
                out += &g.path_csv();
            }
            out
        }
    })
}

#[derive(Serialize)]
struct Witness {
    s_re: f64,
    s_im: f64,
    family: String,
}

#[derive(Serialize)]
struct BoundsOutput {
    lower: f64,
    upper: f64,
    converged: bool,
    witness: Option<Witness>,
}

impl From<&BoundCertificate> for BoundsOutput {
    fn from(c: &BoundCertificate) -> Self {
        BoundsOutput {
            lower: c.lower,
            upper: c.upper,
            converged: c.converged,
            witness: c.upper_witness.map(|w| Witness { s_re: w.s.re, s_im: w.s.im, family: format!("{:?}", w.family) }),
        }
    }
}

fn run_bounds(a: &BoundsArgs) -> Result<String, Failure> {
    let cfg = load_config(&a.common)?;
    let mut certs = Vec::with_capacity(a.point.len());
    for &w in &a.point {
        certs.push(generalized_hurwitz_bounds_with(
            &a.basepoint_domain,
            &a.domain,
            w,
            cfg.tolerance,
            cfg.budget,
            Execution::default(),
        )?);
    }
    let out: Vec<BoundsOutput> = certs.iter().map(BoundsOutput::from).collect();
    Ok(match cfg.format {
        OutputFormat::Json => render_json(&one_or_many(&out)),
        OutputFormat::Csv => {
            let mut s = String::from("re,im,lower,upper,converged,s_re,s_im,family\n");
            for (w, o) in a.point.iter().zip(&out) {
                let (sr, si, fam) = match &o.witness {
                    Some(x) => (x.s_re.to_string(), x.s_im.to_string(), x.family.clone()),
                    None => (String::new(), String::new(), String::new()),
                };
                s += &format!("{},{},{},{},{},{sr},{si},{fam}\n", w.re, w.im, csv_field(o.lower), csv_field(o.upper), o.converged);
            }
            s
        }
    })
}

fn run_contraction(a: &ContractionArgs) -> Result<String, Failure> {
    let cfg = load_config(&a.common)?;
    let levels = a.levels.unwrap_or(cfg.contraction_levels);
    if levels == 0 {
        return Err(Failure::Usage("--levels must be positive".into()));
    }
    let report = contraction_report(
        &a.domain,
        &a.outer,
        levels,
        CONTRACTION_PAIRS,
        a.margin,
        &cfg.distance_options(),
        Execution::default(),
    )?;
    Ok(match cfg.format {
        OutputFormat::Json => render_json(&serde_json::to_value(&report).expect("serializable")),
        OutputFormat::Csv => format!(
            "l_lower,l_upper,gl_lower,classification\n{},{},{},{:?}\n",
            csv_field(report.l_interval.lower),
            csv_field(report.l_interval.upper),
            report.gl_lower.map(csv_field).unwrap_or_default(),
            report.classification
        ),
    })
}

fn run_covering(a: &CoveringArgs) -> Result<String, Failure> {
    let cfg = load_config(&a.common)?;
    let g = if a.universal { universal_covering_for(&a.domain, a.point)? } else { hurwitz_covering_for(&a.domain, a.point)? };
    let mut values = Vec::with_capacity(a.at.len());
    for &z in &a.at {
        let (v, d) = g.eval(z)?;
        values.push((z, v, d));
    }
    Ok(match cfg.format {
        OutputFormat::Json => render_json(&json!({
            "basepoint": [a.point.re, a.point.im],
            "derivative_at_origin": g.derivative_at_origin(),
            "values": values.iter().map(|(z, v, d)| json!({
                "z": [z.re, z.im],
                "value": [v.re, v.im],
                "derivative": [d.re, d.im],
            })).collect::<Vec<_>>(),
        })),
        OutputFormat::Csv => {
            let mut s = String::from("z_re,z_im,re,im,d_re,d_im\n");
            for (z, v, d) in &values {
                s += &format!("{},{},{},{},{},{}\n", z.re, z.im, v.re, v.im, d.re, d.im);
            }
            s
        }
    })
}

fn run_verify(a: &VerifyArgs) -> Result<(String, bool), Failure> {
    let cfg = load_config(&a.common)?;
    let outcomes = if a.suite == "all" {
        verify_suite(&cfg, Execution::default())
    } else {
        match verify_check(&a.suite, &cfg, Execution::default()) {
            Some(o) => vec![o],
            None => {
                return Err(Failure::Usage(format!(
                    "--suite: unknown check {:?}; expected all or one of {}",
                    a.suite,
                    CHECK_IDS.join(", ")
                )))
            }
        }
    };
    let failed = outcomes.iter().any(|o| o.status == Status::Fail);
    let text = match cfg.format {
        OutputFormat::Json => render_json(&serde_json::to_value(&outcomes).expect("serializable")),
        OutputFormat::Csv => {
            let mut s = String::from("id,status,tolerance,detail\n");
            for o in &outcomes {
                let detail = o.detail.as_deref().unwrap_or("").replace('"', "'");
                let status = match o.status {
                    Status::Pass => "pass",
                    Status::Fail => "fail",
                    Status::Skipped => "skipped",
                };
                s += &format!("{},{status},{},\"{detail}\"\n", o.id, o.tolerance);
            }
            s
        }
    };
    Ok((text, failed))
}

fn configure_threads() {
    #[cfg(feature = "parallel")]
    if let Some(n) = std::env::var("HURWITZKIT_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // fails only if the pool was already built
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let result = match &cli.command {
        Command::Density(a) => run_density(a).map(|s| (s, false)),
        Command::Distance(a) => run_distance(a).map(|s| (s, false)),
        Command::Bounds(a) => run_bounds(a).map(|s| (s, false)),
        Command::Contraction(a) => run_contraction(a).map(|s| (s, false)),
        Command::Covering(a) => run_covering(a).map(|s| (s, false)),
        Command::Verify(a) => run_verify(a),
    };
    match result {
        Ok((text, failed)) => {
            // a closed pipe downstream is not an error worth reporting
            let _ = writeln!(std::io::stdout().lock(), "{}", text.trim_end());
            if failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(1)
        }
    }
}
