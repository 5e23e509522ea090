//! Command-line front end: every analysis the library offers, with JSON
//! output (CSV for sweeps and probes), deterministic row order, and
//! machine-readable errors on stderr.

use std::fs;
use std::io::Write;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use szego_tube::kernel::{self, KernelOptions, KernelStatus};
use szego_tube::legendre;
use szego_tube::quad;
use szego_tube::singular;
use szego_tube::{EnvelopeTable, Error, KernelQuery, Polynomial};

const TOL_ENV_VAR: &str = "SZEGO_TUBE_TOL";

#[derive(Parser)]
#[command(
    name = "szego-tube",
    about = "Singularity structure and evaluation of the Szego kernel for polynomial tube domains",
    version
)]
struct Cli {
    /// Polynomial b as comma-separated ascending coefficients,
    /// e.g. "0,0,-1,0,0.25" for x^4/4 - x^2
    #[arg(long, global = true)]
    poly: Option<String>,

    /// Quadrature / evaluation tolerance (also via SZEGO_TUBE_TOL)
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Tie tolerance for equal minimum values
    #[arg(long, global = true)]
    tie_tol: Option<f64>,

    /// Classification tolerance
    #[arg(long, global = true)]
    class_tol: Option<f64>,

    /// Evaluation budget for kernel integrals
    #[arg(long, global = true)]
    budget: Option<u64>,

    /// Config file with key=value lines (tol, tie_tol, class_tol, budget)
    #[arg(long, global = true)]
    config: Option<String>,

    /// Write output here instead of standard output
    #[arg(long, global = true)]
    output: Option<String>,

    /// Suppress the timestamp field for byte-identical reruns
    #[arg(long, global = true)]
    reproducible: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PointPair {
    #[arg(long, allow_hyphen_values = true)]
    x: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    y: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    t: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    h: f64,
    #[arg(long, allow_hyphen_values = true)]
    r: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    s: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    u: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    k: f64,
}

impl PointPair {
    fn query(&self) -> KernelQuery {
        let mut q = KernelQuery::boundary(self.x, self.r);
        q.y = self.y;
        q.t = self.t;
        q.h = self.h;
        q.s = self.s;
        q.u = self.u;
        q.k = self.k;
        q
    }
}

#[derive(Subcommand)]
enum Command {
    /// Full structure report: convexity, gap table, singular-set description
    Analyze,
    /// Gap intervals and bitangent slopes defining the convex envelope
    Envelope,
    /// Minimizer set, lambda/sigma, and b* at one eta
    Lambda {
        #[arg(long, allow_hyphen_values = true)]
        eta: f64,
    },
    /// Convergence margin and classification for a point pair
    Margin {
        #[command(flatten)]
        pair: PointPair,
    },
    /// Classification of a point pair against the singular set
    Classify {
        #[command(flatten)]
        pair: PointPair,
    },
    /// log N(eta, tau) and the Laplace integral I(eta, tau)
    Nvalue {
        #[arg(long, allow_hyphen_values = true)]
        eta: f64,
        #[arg(long)]
        tau: f64,
    },
    /// Kernel integral at a point pair with derivative orders
    Kernel {
        #[command(flatten)]
        pair: PointPair,
        /// Derivative orders i1 j1 i2 j2
        #[arg(long, num_args = 4, default_values_t = [0usize, 0, 0, 0])]
        derivs: Vec<usize>,
        /// Evaluate the absolute-value integral instead of the complex one
        #[arg(long)]
        abs: bool,
    },
    /// Delta-halving divergence probe at a boundary pair; CSV output
    Probe {
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, allow_hyphen_values = true)]
        r: f64,
        #[arg(long, default_value_t = 0.1)]
        delta0: f64,
        #[arg(long, default_value_t = 4)]
        halvings: usize,
    },
    /// Grid sweep of a quantity; CSV output with deterministic row order
    Sweep {
        /// lambda | envelope | margin | nvalue
        #[arg(long)]
        quantity: String,
        /// start:stop:count
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// tau for nvalue sweeps
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
    },
}

struct Settings {
    poly: Polynomial,
    tol: f64,
    tie_tol: f64,
    class_tol: f64,
    budget: u64,
}

enum CliError {
    Validation(String),
    Numerical(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::ParseError(_)
            | Error::InvalidDomainPolynomial(_)
            | Error::ZeroPolynomial
            | Error::NonPositiveTau(_)
            | Error::ZeroEta
            | Error::EtaNotAbove { .. } => CliError::Validation(e.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

fn parse_settings(cli: &Cli) -> Result<Settings, CliError> {
    let mut tol = std::env::var(TOL_ENV_VAR)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(1e-6);
    let mut tie_tol = 1e-10;
    let mut class_tol = 1e-8;
    let mut budget = kernel::DEFAULT_BUDGET;
    if let Some(path) = &cli.config {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {}", path, e)))?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Validation(format!("config line {} is not key=value", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |e| CliError::Validation(format!("config {}: {}", key, e));
            match key {
                "tol" => tol = value.parse().map_err(|_| bad("bad float"))?,
                "tie_tol" => tie_tol = value.parse().map_err(|_| bad("bad float"))?,
                "class_tol" => class_tol = value.parse().map_err(|_| bad("bad float"))?,
                "budget" => budget = value.parse().map_err(|_| bad("bad integer"))?,
                other => {
                    return Err(CliError::Validation(format!(
                        "unknown config key {:?}",
                        other
                    )))
                }
            }
        }
    }
    if let Some(v) = cli.tol {
        tol = v;
    }
    if let Some(v) = cli.tie_tol {
        tie_tol = v;
    }
    if let Some(v) = cli.class_tol {
        class_tol = v;
    }
    if let Some(v) = cli.budget {
        budget = v;
    }
    for (name, v) in [("tol", tol), ("tie_tol", tie_tol), ("class_tol", class_tol)] {
        if v <= 0.0 {
            return Err(CliError::Validation(format!("{} must be positive", name)));
        }
    }
    if budget == 0 {
        return Err(CliError::Validation("budget must be positive".into()));
    }
    let text = cli
        .poly
        .as_deref()
        .ok_or_else(|| CliError::Validation("--poly is required".into()))?;
    let poly = Polynomial::from_str(text).map_err(CliError::from)?;
    poly.validate_domain().map_err(CliError::from)?;
    Ok(Settings {
        poly,
        tol,
        tie_tol,
        class_tol,
        budget,
    })
}

fn fmt17(v: f64) -> String {
    format!("{:.17e}", v)
}

fn envelope_json(env: &EnvelopeTable) -> Value {
    json!({
        "gaps": env.gaps.iter().map(|g| {
            json!({
                "c": g.c,
                "sigma": g.sigma,
                "lambda": g.lambda,
                "bridge_value": g.bridge_value,
            })
        }).collect::<Vec<_>>()
    })
}

fn classification_json(c: &szego_tube::PairClassification) -> Value {
    json!({
        "margin": c.margin,
        "in_sigma": c.in_sigma,
        "on_diagonal": c.on_diagonal,
        "location": match c.location {
            singular::PairLocation::InteriorTouching => "interior-touching",
            singular::PairLocation::Boundary => "boundary",
        },
    })
}

fn kernel_status_str(s: KernelStatus) -> &'static str {
    match s {
        KernelStatus::Converged => "converged",
        KernelStatus::Diverged => "diverged",
        KernelStatus::MarginNonpositive => "margin_nonpositive",
        KernelStatus::BudgetExceeded => "budget_exceeded",
    }
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Validation(format!(
            "grid {:?} is not start:stop:count",
            spec
        )));
    }
    let start: f64 = parts[0]
        .parse()
        .map_err(|_| CliError::Validation("bad grid start".into()))?;
    let stop: f64 = parts[1]
        .parse()
        .map_err(|_| CliError::Validation("bad grid stop".into()))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| CliError::Validation("bad grid count".into()))?;
    if count < 2 || stop <= start {
        return Err(CliError::Validation("grid needs stop > start, count >= 2".into()));
    }
    Ok((0..count)
        .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
        .collect())
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let st = parse_settings(cli)?;
    let b = &st.poly;
    match &cli.command {
        Command::Analyze => {
            let env = legendre::gap_intervals(b, st.class_tol)?;
            let n = b.half_degree();
            let inflections: Vec<f64> = szego_tube::roots::real_roots(
                &b.derivative(2),
                1e-10,
            )?
            .real_locations();
            let convex = env.is_empty();
            let sigma_description = if convex {
                "Sigma = diagonal over all of R (b convex): kernel smooth off the diagonal"
                    .to_string()
            } else {
                format!(
                    "Sigma = diagonal over the minimizer range (complement of {} open gap interval(s)) \
                     plus the off-diagonal blocks Lambda_c x Lambda_c at each bitangent slope c",
                    env.gaps.len()
                )
            };
            let mut report = json!({
                "polynomial": b.to_string(),
                "degree": b.degree(),
                "n": n,
                "convex": convex,
                "inflection_points": inflections,
                "envelope": envelope_json(&env),
                "gap_count": env.gaps.len(),
                "gap_count_bound": n - 1,
                "gap_count_within_bound": env.gaps.len() <= n - 1,
                "sigma_description": sigma_description,
            });
            if !cli.reproducible {
                report["timestamp"] = json!(unix_now());
            }
            Ok(pretty(&report))
        }
        Command::Envelope => {
            let env = legendre::gap_intervals(b, st.class_tol)?;
            Ok(pretty(&envelope_json(&env)))
        }
        Command::Lambda { eta } => {
            let ms = legendre::minimizer_set(b, *eta, st.tie_tol)?;
            Ok(pretty(&json!({
                "eta": ms.eta,
                "minimizers": ms.minimizers,
                "sigma": ms.sigma,
                "lambda": ms.lambda,
                "bstar": -ms.min_value,
            })))
        }
        Command::Margin { pair } | Command::Classify { pair } => {
            let env = legendre::gap_intervals(b, st.class_tol)?;
            let q = pair.query();
            let c = singular::classify_pair(b, &env, &q, st.class_tol)?;
            Ok(pretty(&classification_json(&c)))
        }
        Command::Nvalue { eta, tau } => {
            let nv = quad::n_value(b, *eta, *tau, st.tol)?;
            if !nv.i.converged {
                return Err(CliError::Numerical(format!(
                    "I(eta = {}, tau = {}) did not converge within the panel budget",
                    eta, tau
                )));
            }
            Ok(pretty(&json!({
                "log_N": nv.log_n,
                "I": nv.i.value,
                "err": nv.i.abs_error_estimate,
                "converged": nv.i.converged,
            })))
        }
        Command::Kernel { pair, derivs, abs } => {
            let env = legendre::gap_intervals(b, st.class_tol)?;
            let q = pair.query().with_derivs(derivs[0], derivs[1], derivs[2], derivs[3]);
            let opts = KernelOptions::new(st.tol, st.budget);
            let eval = if *abs {
                kernel::abs_kernel_with(b, &env, &q, opts)?
            } else {
                kernel::kernel_with(b, &env, &q, opts)?
            };
            if eval.status == KernelStatus::BudgetExceeded {
                return Err(CliError::Numerical(
                    "kernel evaluation exceeded its budget before converging".into(),
                ));
            }
            let value = match (eval.value, *abs) {
                (Some((re, _)), true) => json!(re),
                (Some((re, im)), false) => json!([re, im]),
                (None, _) => Value::Null,
            };
            Ok(pretty(&json!({
                "status": kernel_status_str(eval.status),
                "value": value,
                "err": if eval.error_estimate.is_finite() {
                    json!(eval.error_estimate)
                } else {
                    Value::Null
                },
            })))
        }
        Command::Probe {
            x,
            r,
            delta0,
            halvings,
        } => {
            let env = legendre::gap_intervals(b, st.class_tol)?;
            let probe = kernel::divergence_probe(
                b, &env, *x, *r, *delta0, *halvings, st.tol, st.budget,
            )?;
            if !probe.complete {
                return Err(CliError::Numerical(
                    "divergence probe exhausted its budget; partial table follows on stderr"
                        .into(),
                ));
            }
            let mut out = String::from("delta,value,ratio\n");
            for (i, (d, v)) in probe.deltas.iter().zip(&probe.values).enumerate() {
                let ratio = if i == 0 {
                    String::new()
                } else {
                    fmt17(probe.growth_ratios[i - 1])
                };
                out.push_str(&format!("{},{},{}\n", fmt17(*d), fmt17(*v), ratio));
            }
            Ok(out)
        }
        Command::Sweep {
            quantity,
            grid,
            tau,
        } => {
            let nodes = parse_grid(grid)?;
            let env = legendre::gap_intervals(b, st.class_tol)?;
            let mut out = String::new();
            match quantity.as_str() {
                "lambda" => {
                    out.push_str("eta,lambda,sigma,bstar,error\n");
                    for &eta in &nodes {
                        match legendre::minimizer_set(b, eta, st.tie_tol) {
                            Ok(ms) => out.push_str(&format!(
                                "{},{},{},{},\n",
                                fmt17(eta),
                                fmt17(ms.lambda),
                                fmt17(ms.sigma),
                                fmt17(-ms.min_value)
                            )),
                            Err(e) => out.push_str(&format!("{},,,,{}\n", fmt17(eta), e)),
                        }
                    }
                }
                "envelope" => {
                    out.push_str("u,b,biconjugate,error\n");
                    for &u in &nodes {
                        let bb = legendre::biconjugate(b, &env, u);
                        out.push_str(&format!(
                            "{},{},{},\n",
                            fmt17(u),
                            fmt17(b.eval(u)),
                            fmt17(bb)
                        ));
                    }
                }
                "margin" => {
                    out.push_str("x,r,margin,in_sigma,error\n");
                    for &x in &nodes {
                        let q = KernelQuery::boundary(x, x);
                        match singular::classify_pair(b, &env, &q, st.class_tol) {
                            Ok(c) => out.push_str(&format!(
                                "{},{},{},{},\n",
                                fmt17(x),
                                fmt17(x),
                                fmt17(c.margin),
                                c.in_sigma
                            )),
                            Err(e) => {
                                out.push_str(&format!("{},{},,,{}\n", fmt17(x), fmt17(x), e))
                            }
                        }
                    }
                }
                "nvalue" => {
                    out.push_str("eta,tau,log_N,I,error\n");
                    for &eta in &nodes {
                        match quad::n_value(b, eta, *tau, st.tol) {
                            Ok(nv) => out.push_str(&format!(
                                "{},{},{},{},\n",
                                fmt17(eta),
                                fmt17(*tau),
                                fmt17(nv.log_n),
                                fmt17(nv.i.value)
                            )),
                            Err(e) => out.push_str(&format!(
                                "{},{},,,{}\n",
                                fmt17(eta),
                                fmt17(*tau),
                                e
                            )),
                        }
                    }
                }
                other => {
                    return Err(CliError::Validation(format!(
                        "unknown sweep quantity {:?} (lambda | envelope | margin | nvalue)",
                        other
                    )))
                }
            }
            Ok(out)
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            let ok = match &cli.output {
                Some(path) => fs::write(path, &text).is_ok(),
                None => {
                    print!("{}", text);
                    true
                }
            };
            if ok {
                ExitCode::SUCCESS
            } else {
                report_error("io", "cannot write output file");
                ExitCode::from(2)
            }
        }
        Err(CliError::Validation(msg)) => {
            report_error("validation", &msg);
            ExitCode::from(2)
        }
        Err(CliError::Numerical(msg)) => {
            report_error("numerical", &msg);
            ExitCode::from(3)
        }
    }
}

fn report_error(kind: &str, message: &str) {
    let obj = json!({"error": {"kind": kind, "message": message}});
    let _ = writeln!(std::io::stderr(), "{}", obj);
}
