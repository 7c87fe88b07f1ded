use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use modattr::astg::StateSet;
use modattr::bench::{loglog_slope, scaling_run, write_csv, Regime, ScalingPlan};
use modattr::decomposition::strong_modules;
use modattr::engine::{attractor_tree, report_json, EngineConfig, DEFAULT_MAX_CONTROL, DEFAULT_MAX_EXPAND, DEFAULT_MAX_MODULE};
use modattr::fixtures;
use modattr::network::{parse_network, BooleanNetwork};
use modattr::oracle::{compare, CompareConfig, Verdict, DEFAULT_ORACLE_DIMENSION};
use modattr::Error;

/// Asynchronous attractors of Boolean networks, computed module by module.
///
/// A model argument is a path to a `.bnet` file or `builtin:<name>` for a
/// bundled fixture (see `modattr fixture --list`).
#[derive(Parser)]
#[command(name = "modattr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the attractors as JSON.
    Attractors {
        model: String,
        /// List the explicit states of every attractor.
        #[arg(long)]
        expand: bool,
        #[command(flatten)]
        engine: EngineArgs,
        /// Largest attractor that `--expand` will list.
        #[arg(long, default_value_t = DEFAULT_MAX_EXPAND)]
        max_expand: u64,
    },
    /// Print the strong modules of the interaction graph.
    Decompose {
        model: String,
        /// Emit a dot digraph instead of JSON.
        #[arg(long)]
        dot: bool,
    },
    /// Compare the modular engine with exhaustive search.
    ///
    /// Exit status: 0 pass, 1 mismatch, 2 inconclusive.
    Check {
        model: String,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long, default_value_t = DEFAULT_MAX_EXPAND)]
        max_expand: u64,
        /// Largest dimension the exhaustive search accepts.
        #[arg(long, default_value_t = DEFAULT_ORACLE_DIMENSION)]
        max_dimension: usize,
    },
    /// Time the engine on generated networks and print CSV.
    Bench {
        /// sparse, nc or chain.
        #[arg(long, default_value = "chain")]
        regime: Regime,
        /// Comma-separated dimensions.
        #[arg(long, value_delimiter = ',', default_value = "6,60,600")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Module size bound; defaults to 2 for chains and 3 otherwise.
        #[arg(long)]
        module_bound: Option<usize>,
        /// In-degree bound; defaults to 2 for chains and 3 otherwise.
        #[arg(long)]
        degree_bound: Option<usize>,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Print a bundled model.
    Fixture {
        #[arg(required_unless_present = "list")]
        name: Option<String>,
        #[arg(long)]
        list: bool,
    },
}

#[derive(Args)]
struct EngineArgs {
    /// Largest module whose state graph is built.
    #[arg(long, default_value_t = DEFAULT_MAX_MODULE)]
    max_module: usize,
    /// Largest admissible control set per vertex.
    #[arg(long, default_value_t = DEFAULT_MAX_CONTROL)]
    max_control: usize,
    /// File with one part per line, vertex names separated by commas or spaces.
    #[arg(long)]
    parts: Option<PathBuf>,
}

impl EngineArgs {
    fn config(&self) -> EngineConfig {
        EngineConfig {
            max_module: self.max_module,
            max_control: self.max_control,
        }
    }

    fn parts(&self, net: &BooleanNetwork) -> Result<Option<Vec<Vec<usize>>>, Failure> {
        let Some(path) = &self.parts else { return Ok(None) };
        let text = read(path.to_string_lossy().as_ref())?;
        parse_parts(net, &text).map(Some).map_err(Failure::Lib)
    }
}

enum Failure {
    Io { path: String, message: String },
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Lib(e) if e.is_capacity() => 3,
            Failure::Lib(Error::Decomposition { .. } | Error::Partition(_)) => 4,
            _ => 2,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Failure::Io { path, message } => json!({"error": {"kind": "io", "message": format!("{path}: {message}")}}),
            Failure::Lib(e) => json!({"error": {"kind": e.kind(), "message": e.to_string()}}),
        }
    }
}

fn read(path: &str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io {
        path: path.to_string(),
        message: e.to_string(),
    })
}

fn load_model(arg: &str) -> Result<BooleanNetwork, Failure> {
    let text = match arg.strip_prefix("builtin:") {
        Some(name) => fixtures::find(name)
            .ok_or_else(|| Failure::Io {
                path: arg.to_string(),
                message: "no such bundled model".to_string(),
            })?
            .text
            .to_string(),
        None => read(arg)?,
    };
    Ok(parse_network(&text)?)
}

/// Blank lines and `#` comments are skipped; every other line is one part.
fn parse_parts(net: &BooleanNetwork, text: &str) -> Result<Vec<Vec<usize>>, Error> {
    let mut parts = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or_default();
        let names: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        if names.is_empty() {
            continue;
        }
        let part = names
            .iter()
            .map(|n| net.find(n).ok_or_else(|| Error::Partition(format!("unknown vertex name {n:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        parts.push(part);
    }
    Ok(parts)
}

fn render(v: &Value) -> String {
    serde_json::to_string(v).expect("JSON values always serialize")
}

fn attractor_rows(sets: &[StateSet]) -> Value {
    json!(sets.iter().map(StateSet::bit_strings).collect::<Vec<_>>())
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let mut out = io::stdout().lock();
    match cli.command {
        Command::Attractors {
            model,
            expand,
            engine,
            max_expand,
        } => {
            let net = load_model(&model)?;
            let parts = engine.parts(&net)?;
            let tree = attractor_tree(&net, parts.as_deref(), &engine.config())?;
            let report = report_json(&net, &tree, expand.then_some(max_expand))?;
            let _ = writeln!(out, "{}", render(&report));
            Ok(0)
        }
        Command::Decompose { model, dot } => {
            let net = load_model(&model)?;
            let c = strong_modules(&net.interaction_graph());
            if dot {
                let _ = write!(out, "{}", c.to_dot(&net));
            } else {
                let _ = writeln!(out, "{}", render(&c.to_json(&net)));
            }
            Ok(0)
        }
        Command::Check {
            model,
            engine,
            max_expand,
            max_dimension,
        } => {
            let net = load_model(&model)?;
            let parts = engine.parts(&net)?;
            let cfg = CompareConfig {
                engine: engine.config(),
                max_dimension,
                max_expand,
            };
            match compare(&net, parts.as_deref(), &cfg)? {
                Verdict::Pass { attractors } => {
                    let _ = writeln!(out, "PASS: {attractors} attractors agree");
                    Ok(0)
                }
                Verdict::Mismatch {
                    engine_only,
                    oracle_only,
                } => {
                    let _ = writeln!(out, "MISMATCH: engine and exhaustive search disagree");
                    let diff = json!({
                        "vertices": net.names(),
                        "engine_only": attractor_rows(&engine_only),
                        "oracle_only": attractor_rows(&oracle_only),
                    });
                    let _ = writeln!(out, "{}", render(&diff));
                    Ok(1)
                }
                Verdict::Inconclusive { reason } => {
                    let _ = writeln!(out, "INCONCLUSIVE: {reason}");
                    Ok(2)
                }
            }
        }
        Command::Bench {
            regime,
            sizes,
            reps,
            seed,
            module_bound,
            degree_bound,
            csv,
        } => {
            let mut plan = ScalingPlan::new(regime, sizes);
            plan.repetitions = reps;
            plan.seed = seed;
            if let Some(c) = module_bound {
                plan.module_bound = c;
            }
            if let Some(d) = degree_bound {
                plan.degree_bound = d;
            }
            let rows = scaling_run(&plan)?;
            match &csv {
                Some(path) => {
                    let mut file = fs::File::create(path).map_err(|e| Failure::Io {
                        path: path.display().to_string(),
                        message: e.to_string(),
                    })?;
                    write_csv(&rows, &mut file).map_err(|e| Failure::Io {
                        path: path.display().to_string(),
                        message: e.to_string(),
                    })?;
                }
                None => {
                    let _ = write_csv(&rows, &mut out);
                }
            }
            let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.engine_median.as_secs_f64())).collect();
            if let Some(slope) = loglog_slope(&points) {
                eprintln!("log-log slope of engine time against n: {slope:.3}");
            }
            Ok(0)
        }
        Command::Fixture { name, list } => {
            if list {
                for f in fixtures::ALL {
                    let _ = writeln!(out, "{}", f.name);
                }
                return Ok(0);
            }
            let name = name.unwrap_or_default();
            let f = fixtures::find(&name).ok_or_else(|| Failure::Io {
                path: format!("builtin:{name}"),
                message: "no such bundled model".to_string(),
            })?;
            let _ = write!(out, "{}", f.text);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("{}", serde_json::to_string(&f.to_json()).expect("JSON values always serialize"));
            ExitCode::from(f.exit_code())
        }
    }
}
