//! Command-line front end: JSON in, JSON out.
//!
//! Exit codes: 0 success, 1 invalid input, 2 unsupported verdict,
//! 3 resource limit.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::entropy::{optimize_metric, volume_entropy, MetricGraph, OptimizeOptions};
use crate::fbz::{check_glu, fbz_verdict, make_glu, tubularize, GluData, GluJson, PrimitiveSplitting};
use crate::gog::{propagate_bound, BoundDirection, GraphOfGroups};
use crate::growth::{collapsing_demo, rate_estimates, GrowthError, Model, DEFAULT_FRONTIER_CAP};
use crate::raag::{raag_verdict, GraphJson, SimplicialGraph};
use crate::verdict::{Status, Verdict};
use crate::words::FreeAut;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_UNSUPPORTED: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "minvol", version, about = "Minimal volume entropy of free-by-cyclic groups and 2-dimensional RAAGs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Vanishing verdict for the RAAG on a graph.
    RaagVerdict { graph: PathBuf },
    /// Vanishing verdict for a free-by-cyclic group.
    FbzVerdict {
        automorphism: PathBuf,
        /// Primitive free splitting to test GLU powers against (default: rose).
        #[arg(long)]
        splitting: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        max_power: u32,
        #[arg(long, default_value_t = 1)]
        conj_ball: usize,
    },
    /// Build the automorphism described by GLU data.
    GluMake { data: PathBuf },
    /// Recover GLU data for an automorphism and a splitting.
    GluCheck { automorphism: PathBuf, splitting: PathBuf },
    /// Tubular graph of groups for GLU data.
    GluTubularize { data: PathBuf },
    /// Collapse a graph of groups until reduced.
    GogReduce { gog: PathBuf },
    /// Presentation and abelianization of a graph of groups.
    GogPresentation {
        gog: PathBuf,
        /// Comma-separated edge ids of a maximal tree (default: breadth-first).
        #[arg(long)]
        tree: Option<String>,
    },
    /// Shape verdict for a graph of groups.
    GogVerdict { gog: PathBuf },
    /// Ball counts and growth-rate estimates.
    Growth {
        model: PathBuf,
        #[arg(long)]
        radius: usize,
        /// Print the profile as CSV instead of JSON.
        #[arg(long)]
        csv: bool,
        #[arg(long, default_value_t = DEFAULT_FRONTIER_CAP)]
        frontier_cap: usize,
    },
    /// Volume entropy of a metric graph.
    Entropy {
        graph: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Minimize normalized entropy over metrics on a graph.
    Optimize {
        graph: PathBuf,
        #[arg(long, default_value_t = 4000)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        restarts: usize,
    },
    /// Discrete collapsing-metric demonstration on GLU data.
    CollapseDemo {
        data: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = vec![1.0, 0.7, 0.5])]
        s: Vec<f64>,
        #[arg(long, default_value_t = 6.0)]
        radius: f64,
        #[arg(long, default_value_t = DEFAULT_FRONTIER_CAP)]
        frontier_cap: usize,
    },
    /// Transfer an entropy lower bound along an index-n subgroup or n-monotone map.
    BoundPropagate {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        bound: f64,
        #[arg(long, value_enum, default_value_t = Direction::Index)]
        direction: Direction,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    Index,
    Monotone,
}

/// Result of running one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String, stderr: impl Into<String>) -> Self {
        Outcome { code: EXIT_OK, stdout, stderr: stderr.into() }
    }

    fn fail(code: i32, msg: impl Into<String>) -> Self {
        Outcome { code, stdout: String::new(), stderr: msg.into() }
    }
}

struct Failure(i32, String);

fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure(EXIT_INVALID, e.to_string())
}

fn growth_failure(e: GrowthError) -> Failure {
    match e {
        GrowthError::ResourceLimit { .. } => Failure(EXIT_RESOURCE, e.to_string()),
        other => invalid(other),
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

/// Round a float to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(round_sig).and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(o) => o.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Compact JSON with floats at 12 significant digits.
pub fn render(value: &impl serde::Serialize) -> String {
    let mut v = serde_json::to_value(value).expect("output types serialize");
    round_floats(&mut v);
    serde_json::to_string(&v).expect("values serialize")
}

fn verdict_outcome(verdict: &Verdict, theorem: &str) -> Outcome {
    let mut v = serde_json::to_value(verdict).expect("verdicts serialize");
    v["paper_theorem"] = Value::from(theorem);
    let summary = format!(
        "{:?}{}{}",
        verdict.status,
        verdict.lower_bound.map(|b| format!(" (ω ≥ {b:e})")).unwrap_or_default(),
        verdict.note.as_ref().map(|n| format!(": {n}")).unwrap_or_default()
    );
    let code = if verdict.status == Status::Unsupported {
        EXIT_UNSUPPORTED
    } else {
        EXIT_OK
    };
    Outcome { code, stdout: render(&v), stderr: summary }
}

/// Growth model input: exactly one of the keys.
#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum ModelJson {
    Free(usize),
    Raag(GraphJson),
    Fbz(FreeAut),
    Tubular(GluJson),
}

fn load_glu(path: &Path) -> Result<GluData, Failure> {
    let j: GluJson = read_json(path)?;
    GluData::try_from(j).map_err(invalid)
}

pub fn run(cli: Cli) -> Outcome {
    match execute(cli.command) {
        Ok(o) => o,
        Err(Failure(code, msg)) => Outcome::fail(code, format!("error: {msg}")),
    }
}

fn execute(command: Command) -> Result<Outcome, Failure> {
    Ok(match command {
        Command::RaagVerdict { graph } => {
            let g: SimplicialGraph = read_json(&graph)?;
            verdict_outcome(&raag_verdict(&g), "Theorem 1.2")
        }
        Command::FbzVerdict {
            automorphism,
            splitting,
            max_power,
            conj_ball,
        } => {
            let aut: FreeAut = read_json(&automorphism)?;
            let splitting: Option<PrimitiveSplitting> = splitting.map(|p| read_json(&p)).transpose()?;
            let v = fbz_verdict(&aut, splitting.as_ref(), max_power, conj_ball).map_err(invalid)?;
            verdict_outcome(&v, "Theorem 1.1")
        }
        Command::GluMake { data } => {
            let aut = make_glu(&load_glu(&data)?).map_err(invalid)?;
            Outcome::ok(render(&aut), "GLU automorphism built")
        }
        Command::GluCheck { automorphism, splitting } => {
            let aut: FreeAut = read_json(&automorphism)?;
            let s: PrimitiveSplitting = read_json(&splitting)?;
            match check_glu(&aut, &s) {
                Ok(d) => Outcome::ok(render(&json!({"match": true, "data": GluJson::from(&d)})), "GLU data found"),
                Err(crate::fbz::FbzError::NoMatch(reason)) => Outcome::ok(
                    render(&json!({"match": false, "reason": reason})),
                    "not GLU for this splitting",
                ),
                Err(e) => return Err(invalid(e)),
            }
        }
        Command::GluTubularize { data } => {
            let g = tubularize(&load_glu(&data)?).map_err(invalid)?;
            Outcome::ok(render(&g), "tubular splitting verified")
        }
        Command::GogReduce { gog } => {
            let g: GraphOfGroups = read_json(&gog)?;
            let r = g.reduce();
            let msg = format!("{} → {} edges", g.edges().len(), r.edges().len());
            Outcome::ok(render(&r), msg)
        }
        Command::GogPresentation { gog, tree } => {
            let g: GraphOfGroups = read_json(&gog)?;
            let tree = match tree {
                None => g.default_tree(),
                Some(ids) => ids
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|id| {
                        g.edges()
                            .iter()
                            .position(|e| e.id == id)
                            .ok_or_else(|| invalid(format!("unknown edge `{id}`")))
                    })
                    .collect::<Result<_, _>>()?,
            };
            let p = g.presentation(&tree).map_err(invalid)?;
            let relators: Vec<String> = p.relators.iter().map(|r| p.format_relator(r)).collect();
            let ab = p.abelianization();
            let msg = format!("{} generators, {} relators", p.generators.len(), relators.len());
            Outcome::ok(
                render(&json!({"generators": p.generators, "relators": relators, "abelianization": ab})),
                msg,
            )
        }
        Command::GogVerdict { gog } => {
            let g: GraphOfGroups = read_json(&gog)?;
            verdict_outcome(&g.shape_verdict(), "Theorem 1.3")
        }
        Command::Growth {
            model,
            radius,
            csv,
            frontier_cap,
        } => {
            let model = match read_json::<ModelJson>(&model)? {
                ModelJson::Free(n) if n >= 1 => Model::Free(n),
                ModelJson::Free(_) => return Err(invalid("free rank must be positive")),
                ModelJson::Raag(g) => Model::Raag(SimplicialGraph::try_from(g).map_err(invalid)?),
                ModelJson::Fbz(a) => Model::Fbz(a),
                ModelJson::Tubular(d) => Model::Tubular(GluData::try_from(d).map_err(invalid)?),
            };
            let profile = model.enumerate_ball(radius, frontier_cap).map_err(growth_failure)?;
            let msg = format!("ball of radius {radius}: {} elements", profile.counts[radius]);
            if csv {
                Outcome::ok(profile.to_csv(), msg)
            } else {
                let estimates = rate_estimates(&profile).ok();
                Outcome::ok(
                    render(&json!({
                        "profile": profile,
                        "estimates": estimates,
                        "uniform_bound": model.uniform_bound(),
                    })),
                    msg,
                )
            }
        }
        Command::Entropy { graph, tol } => {
            let g: MetricGraph = read_json(&graph)?;
            let r = volume_entropy(&g, tol).map_err(invalid)?;
            let msg = format!("h = {}, ω = {}", r.h, r.omega);
            Outcome::ok(render(&r), msg)
        }
        Command::Optimize {
            graph,
            iters,
            seed,
            restarts,
        } => {
            let g: MetricGraph = read_json(&graph)?;
            let opts = OptimizeOptions {
                iters,
                seed,
                restarts: restarts.max(1),
                ..OptimizeOptions::default()
            };
            let r = optimize_metric(&g, opts).map_err(invalid)?;
            let msg = format!("ω* = {}", r.omega_star);
            Outcome::ok(render(&r), msg)
        }
        Command::CollapseDemo {
            data,
            s,
            radius,
            frontier_cap,
        } => {
            let t = collapsing_demo(&load_glu(&data)?, &s, radius, frontier_cap).map_err(growth_failure)?;
            let msg = t
                .rows
                .iter()
                .map(|r| format!("s={} ω̂={:.6}", r.s, r.omega_hat))
                .collect::<Vec<_>>()
                .join(", ");
            Outcome::ok(render(&t), msg)
        }
        Command::BoundPropagate { n, m, bound, direction } => {
            if n == 0 || m == 0 || !(bound >= 0.0) {
                return Err(invalid("n and m must be positive and the bound non-negative"));
            }
            let dir = match direction {
                Direction::Index => BoundDirection::Index,
                Direction::Monotone => BoundDirection::Monotone,
            };
            let b = propagate_bound(n, m, bound, dir);
            Outcome::ok(render(&json!({"bound": b})), format!("ω ≥ {b:e}"))
        }
    })
}
