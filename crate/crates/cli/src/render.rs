//! Human-readable renderings of command results.

use std::fmt::Write;

use qpn_core::{
    Claim, CounterexampleReport, Direction, InfluenceVerdict, JointTable, PropagationResult, Qpn,
    QueryOp, QueryResult, SatisfactionReport, Trail,
};
use serde_json::Value;

pub fn satisfaction(r: &SatisfactionReport) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{}",
        if r.satisfied { "satisfied" } else { "violated" }
    )
    .unwrap();
    for m in &r.markov_violations {
        writeln!(
            out,
            "  markov  {} not independent of {} given its parents (deviation {:.3e})",
            m.variable,
            m.nondescendants.join(", "),
            m.max_deviation
        )
        .unwrap();
    }
    for e in &r.edge_violations {
        writeln!(
            out,
            "  edge    {} -> {} expects {}, found {}",
            e.edge.from,
            e.edge.to,
            e.expected,
            label(e.verdict.verdict)
        )
        .unwrap();
        if let Some(w) = &e.verdict.witness {
            writeln!(out, "          {}", witness(w)).unwrap();
        }
    }
    out
}

/// Lower-case name of a unit enum variant.
fn label(v: impl std::fmt::Debug) -> String {
    format!("{v:?}").to_lowercase()
}

fn witness(w: &qpn_core::DominanceWitness) -> String {
    let context = if w.context.is_empty() {
        String::new()
    } else {
        let parts: Vec<String> = w.context.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!(" given {}", parts.join(", "))
    };
    format!(
        "levels {} vs {}{}: {}, at {} the cdfs are {:.4} and {:.4}",
        w.higher,
        w.lower,
        context,
        label(w.order),
        w.point,
        w.higher_cdf,
        w.lower_cdf
    )
}

fn verdict_line(name: &str, v: &InfluenceVerdict) -> String {
    let mut line = format!("{name:<12} {}", label(v.verdict));
    if let Some(w) = &v.witness {
        write!(line, "  ({})", witness(w)).unwrap();
    }
    line
}

pub fn dependence(json: &Value, x: &str, y: &str) -> String {
    let verdict = |key: &str| json[key]["verdict"].as_str().unwrap_or("?").to_string();
    let holds = |key: &str| json[key]["holds"].as_bool().unwrap_or(false);
    let mut out = String::new();
    writeln!(out, "influence {x} -> {y}   {}", verdict("forward")).unwrap();
    writeln!(out, "influence {y} -> {x}   {}", verdict("reverse")).unwrap();
    writeln!(out, "mlrp                {}", holds("mlrp")).unwrap();
    let w = &json["mlrp"]["witness"];
    if w.is_object() {
        writeln!(
            out,
            "  fails at x={}, x'={}, y={}, y'={}: {:.4} < {:.4}",
            w["x_high"],
            w["x_low"],
            w["y_high"],
            w["y_low"],
            w["ratio_high"].as_f64().unwrap_or(f64::NAN),
            w["ratio_low"].as_f64().unwrap_or(f64::NAN)
        )
        .unwrap();
    }
    writeln!(out, "tp2                 {}", holds("tp2")).unwrap();
    writeln!(out, "association         {}", holds("association")).unwrap();
    out
}

fn trail(t: &Trail) -> String {
    let mut s = t.nodes[0].clone();
    for (step, next) in t.steps.iter().zip(&t.nodes[1..]) {
        match step.direction {
            Direction::WithEdge => write!(s, " -{}-> {next}", step.sign).unwrap(),
            Direction::AgainstEdge => write!(s, " <-{}- {next}", step.sign).unwrap(),
        }
    }
    s
}

pub fn propagation(r: &PropagationResult, trails: bool) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "evidence {}={} ({} mode)",
        r.evidence_node,
        r.evidence_sign,
        label(r.mode)
    )
    .unwrap();
    let width = r.node_signs.keys().map(String::len).max().unwrap_or(0);
    for (node, sign) in &r.node_signs {
        writeln!(out, "  {node:<width$}  {sign}").unwrap();
        if trails {
            for c in r.trail_log.get(node).into_iter().flatten() {
                writeln!(out, "      {}  => {}", trail(&c.trail), c.sign).unwrap();
            }
        }
    }
    out
}

pub fn query(r: &QueryResult, from: &str, to: &str) -> String {
    let mut out = String::new();
    for step in &r.transcript {
        let op = match &step.op {
            QueryOp::RemoveBarren(v) => format!("remove barren {v}"),
            QueryOp::Reduce(v) => format!("reduce {v}"),
            QueryOp::Reverse(a, b) => format!("reverse {a} -> {b}"),
        };
        let edges: Vec<String> = step
            .edges
            .iter()
            .map(|e| format!("{}->{}:{}", e.from, e.to, e.sign))
            .collect();
        writeln!(out, "{op:<28} [{}]", edges.join(", ")).unwrap();
    }
    writeln!(out, "influence of {from} on {to}: {}", r.sign).unwrap();
    out
}

pub fn network(q: &Qpn) -> String {
    let mut out = String::new();
    for v in q.variables() {
        let levels: Vec<String> = v.support.iter().map(f64::to_string).collect();
        writeln!(out, "{} {{{}}}", v.name, levels.join(", ")).unwrap();
    }
    for e in q.edges() {
        writeln!(out, "{} -> {} : {}", e.from, e.to, e.sign).unwrap();
    }
    out
}

pub fn dsep(a: &str, b: &str, given: &[&str], separated: bool, trails: &[Trail]) -> String {
    let mut out = String::new();
    let cond = if given.is_empty() {
        String::new()
    } else {
        format!(" given {}", given.join(", "))
    };
    let verb = if separated {
        "d-separated"
    } else {
        "d-connected"
    };
    writeln!(out, "{a} and {b} are {verb}{cond}").unwrap();
    for t in trails {
        writeln!(out, "  {}", trail(t)).unwrap();
    }
    out
}

pub fn table(t: &JointTable) -> String {
    let mut out = String::new();
    let names: Vec<&str> = t.names().collect();
    writeln!(out, "p({})", names.join(", ")).unwrap();
    let shape = t.shape();
    let row = *shape.last().unwrap_or(&1);
    for (r, chunk) in t.probabilities().chunks(row).enumerate() {
        let cells: Vec<String> = chunk.iter().map(|p| format!("{p:.4}")).collect();
        writeln!(out, "  row {:<3} {}", r + 1, cells.join("  ")).unwrap();
    }
    out
}

pub fn shuttle(
    prop: &PropagationResult,
    check: &SatisfactionReport,
    forward: &InfluenceVerdict,
    reverse: &InfluenceVerdict,
    fault_prob: f64,
    trails: bool,
) -> String {
    let mut out = propagation(prop, trails);
    writeln!(
        out,
        "\nfaulty probe distribution, fault probability {fault_prob}"
    )
    .unwrap();
    write!(out, "network check: {}", satisfaction(check)).unwrap();
    writeln!(out, "{}", verdict_line("temp->probe", forward)).unwrap();
    writeln!(out, "{}", verdict_line("probe->temp", reverse)).unwrap();
    out
}

pub fn counterexample(r: &CounterexampleReport, claim: &Claim) -> String {
    let mut out = String::new();
    if !r.found {
        writeln!(
            out,
            "no counterexample to {claim} in {} trials (seed {})",
            r.trials_used, r.seed
        )
        .unwrap();
        return out;
    }
    writeln!(
        out,
        "counterexample to {claim} at trial {} (seed {})",
        r.trials_used, r.seed
    )
    .unwrap();
    if let Some(t) = &r.table {
        out.push_str(&table(t));
    }
    if let Some(v) = &r.claim_verdict {
        writeln!(out, "{}", verdict_line("verdict", v)).unwrap();
    }
    out
}
