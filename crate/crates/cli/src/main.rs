//! `qpn`: check, query and demonstrate qualitative probabilistic networks.

mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qpn_core::scenarios::{HE_OX_TEMP, HE_OX_TEMP_PROBE};
use qpn_core::{
    association_check, find_counterexample, influence_sign, influence_sign_explained, mlrp_check,
    propagate, query, reduce_vertex, reverse_edge, satisfies_qpn, shuttle_distribution,
    shuttle_qpn, table1_fixture, tp2_check, Claim, JointTable, Mode, Qpn, Sign,
};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "qpn",
    version,
    about = "Qualitative probabilistic network toolkit"
)]
struct Cli {
    #[arg(long, value_enum, global = true, default_value_t = Output::Text)]
    output: Output,
    /// Include the contributing trails in propagation output.
    #[arg(long, global = true)]
    trails: bool,
    #[arg(long, value_enum, global = true, default_value_t = ModeArg::Sound)]
    mode: ModeArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Classical,
    Sound,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Classical => Mode::Classical,
            ModeArg::Sound => Mode::Sound,
        }
    }
}

#[derive(Args)]
struct NetworkArg {
    /// Network file (JSON).
    #[arg(long)]
    network: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a distribution satisfies a network.
    Check {
        #[command(flatten)]
        net: NetworkArg,
        /// Joint distribution file (JSON).
        #[arg(long)]
        dist: PathBuf,
    },
    /// Every pairwise dependence notion between two variables.
    Dependence {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Propagate a `+` or `-` observation through the network.
    Propagate {
        #[command(flatten)]
        net: NetworkArg,
        /// Evidence as `NODE=+` or `NODE=-`.
        #[arg(long, value_parser = parse_observation)]
        observe: (String, Sign),
    },
    /// Sign of the influence of one node on another by graph reduction.
    Query {
        #[command(flatten)]
        net: NetworkArg,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Remove a node with at most one parent, rewiring its edges.
    Reduce {
        #[command(flatten)]
        net: NetworkArg,
        #[arg(long)]
        node: String,
    },
    /// Reverse an edge given as `FROM,TO`.
    Reverse {
        #[command(flatten)]
        net: NetworkArg,
        #[arg(long, value_parser = parse_edge)]
        edge: (String, String),
    },
    /// d-separation test.
    Dsep {
        #[command(flatten)]
        net: NetworkArg,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        /// Conditioning nodes, comma separated.
        #[arg(long, value_delimiter = ',')]
        given: Vec<String>,
    },
    /// Built-in worked examples.
    Demo {
        #[command(subcommand)]
        which: Demo,
    },
    /// Search for a distribution satisfying the network but not the claim.
    FindCounterexample {
        #[command(flatten)]
        net: NetworkArg,
        /// Claim as `SOURCE->TARGET:SIGN`.
        #[arg(long)]
        claim: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
}

#[derive(Subcommand)]
enum Demo {
    /// The 3×3 table whose influence is not symmetric.
    Table1,
    /// Space shuttle network and the faulty-probe distribution.
    Shuttle {
        #[arg(long, default_value_t = 0.05)]
        fault_prob: f64,
    },
}

fn parse_observation(s: &str) -> Result<(String, Sign), String> {
    let (node, sign) = s.rsplit_once('=').ok_or("expected NODE=+ or NODE=-")?;
    let sign: Sign = sign.parse().map_err(|e: qpn_core::Error| e.to_string())?;
    if node.is_empty() || !sign.is_definite() {
        return Err("expected NODE=+ or NODE=-".into());
    }
    Ok((node.to_string(), sign))
}

fn parse_edge(s: &str) -> Result<(String, String), String> {
    match s.split_once(',') {
        Some((a, b)) if !a.is_empty() && !b.is_empty() => Ok((a.to_string(), b.to_string())),
        _ => Err("expected FROM,TO".into()),
    }
}

/// A failure that maps to exit code 2.
struct InputError(String);

impl From<qpn_core::Error> for InputError {
    fn from(e: qpn_core::Error) -> Self {
        InputError(e.to_string())
    }
}

fn load<T: DeserializeOwned>(path: &Path) -> Result<T, InputError> {
    let text =
        fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        let msg = e.to_string();
        let msg = msg.split(" at line ").next().unwrap_or(&msg);
        if e.line() == 0 {
            // Whole-document invariants (acyclicity, total mass) have no
            // single source position.
            InputError(format!("{}: {msg}", path.display()))
        } else {
            InputError(format!(
                "{}:{}:{}: {msg}",
                path.display(),
                e.line(),
                e.column()
            ))
        }
    })
}

/// What a command produced: the JSON form, its text rendering and whether
/// it reports a violation or failed search.
struct Report {
    json: Value,
    text: String,
    violation: bool,
}

fn run(cli: &Cli) -> Result<Report, InputError> {
    let mode: Mode = cli.mode.into();
    let report = match &cli.command {
        Command::Check { net, dist } => {
            let qpn: Qpn = load(&net.network)?;
            let table: JointTable = load(dist)?;
            let r = satisfies_qpn(&table, &qpn)?;
            Report {
                text: render::satisfaction(&r),
                violation: !r.satisfied,
                json: to_value(&r),
            }
        }
        Command::Dependence { dist, x, y } => {
            let table: JointTable = load(dist)?;
            let json = dependence_json(&table, x, y)?;
            Report {
                text: render::dependence(&json, x, y),
                violation: false,
                json,
            }
        }
        Command::Propagate { net, observe } => {
            let qpn: Qpn = load(&net.network)?;
            let r = propagate(&qpn, &observe.0, observe.1, mode)?;
            let mut json = to_value(&r);
            if !cli.trails {
                json.as_object_mut().expect("object").remove("trail_log");
            }
            Report {
                text: render::propagation(&r, cli.trails),
                violation: false,
                json,
            }
        }
        Command::Query { net, from, to } => {
            let qpn: Qpn = load(&net.network)?;
            let r = query(&qpn, from, to, mode)?;
            Report {
                text: render::query(&r, from, to),
                violation: false,
                json: to_value(&r),
            }
        }
        Command::Reduce { net, node } => {
            let qpn: Qpn = load(&net.network)?;
            let out = reduce_vertex(&qpn, node)?;
            Report {
                text: render::network(&out),
                violation: false,
                json: to_value(&out),
            }
        }
        Command::Reverse { net, edge } => {
            let qpn: Qpn = load(&net.network)?;
            let out = reverse_edge(&qpn, &edge.0, &edge.1, mode)?;
            Report {
                text: render::network(&out),
                violation: false,
                json: to_value(&out),
            }
        }
        Command::Dsep { net, a, b, given } => {
            let qpn: Qpn = load(&net.network)?;
            let given: Vec<&str> = given.iter().map(String::as_str).collect();
            let separated = qpn.d_separated(a, b, &given)?;
            let trails = qpn.active_trails(a, b, &given)?;
            let json = json!({
                "a": a,
                "b": b,
                "given": given,
                "d_separated": separated,
                "active_trails": to_value(&trails),
            });
            Report {
                text: render::dsep(a, b, &given, separated, &trails),
                violation: false,
                json,
            }
        }
        Command::Demo {
            which: Demo::Table1,
        } => {
            let table = table1_fixture();
            let json = json!({
                "table": to_value(&table),
                "dependence": dependence_json(&table, "X", "Y")?,
            });
            Report {
                text: format!(
                    "{}\n{}",
                    render::table(&table),
                    render::dependence(&json["dependence"], "X", "Y")
                ),
                violation: false,
                json,
            }
        }
        Command::Demo {
            which: Demo::Shuttle { fault_prob },
        } => {
            let qpn = shuttle_qpn();
            let table = shuttle_distribution(*fault_prob)?;
            let prop = propagate(&qpn, HE_OX_TEMP_PROBE, Sign::Plus, mode)?;
            let check = satisfies_qpn(&table, &qpn)?;
            let forward = influence_sign_explained(&table, HE_OX_TEMP, HE_OX_TEMP_PROBE, &[])?;
            let reverse = influence_sign(&table, HE_OX_TEMP_PROBE, HE_OX_TEMP, &[])?;
            let mut prop_json = to_value(&prop);
            if !cli.trails {
                prop_json
                    .as_object_mut()
                    .expect("object")
                    .remove("trail_log");
            }
            Report {
                text: render::shuttle(&prop, &check, &forward, &reverse, *fault_prob, cli.trails),
                violation: false,
                json: json!({
                    "fault_prob": fault_prob,
                    "network": to_value(&qpn),
                    "propagation": prop_json,
                    "satisfaction": to_value(&check),
                    "forward_influence": to_value(&forward),
                    "reverse_influence": to_value(&reverse),
                }),
            }
        }
        Command::FindCounterexample {
            net,
            claim,
            seed,
            trials,
        } => {
            let qpn: Qpn = load(&net.network)?;
            let claim: Claim = claim.parse()?;
            let r = find_counterexample(&qpn, &claim, *seed, *trials)?;
            let mut json = to_value(&r);
            json["claim"] = json!(claim.to_string());
            Report {
                text: render::counterexample(&r, &claim),
                violation: !r.found,
                json,
            }
        }
    };
    Ok(report)
}

/// Influence both ways plus MLRP, TP2 and association for `x, y`.
fn dependence_json(table: &JointTable, x: &str, y: &str) -> Result<Value, InputError> {
    Ok(json!({
        "forward": to_value(&influence_sign(table, x, y, &[])?),
        "reverse": to_value(&influence_sign(table, y, x, &[])?),
        "mlrp": to_value(&mlrp_check(table, x, y)?),
        "tp2": to_value(&tp2_check(table, x, y)?),
        "association": to_value(&association_check(table, x, y)?),
    }))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            match cli.output {
                Output::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&report.json).expect("valid json")
                ),
                Output::Text => print!("{}", report.text),
            }
            if report.violation {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
