//! Qualitative inference over a QPN.
//!
//! [`propagate`] pushes a `+`/`-` observation along every active trail and
//! combines the trail signs per node. [`query`] answers a decision → target
//! question by barren-node removal, vertex reductions and edge reversals.
//! Both depend on reading an edge against its direction; in
//! [`Mode::Sound`] that is only allowed between two binary variables.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Direction, Qpn, SignedDag, SignedEdge, Trail, TrailStep};
use crate::sign::Sign;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Influences are assumed symmetric, as in the QPN literature.
    Classical,
    /// Reading an edge backwards yields `?` unless both ends are binary.
    #[default]
    Sound,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "classical" => Ok(Mode::Classical),
            "sound" => Ok(Mode::Sound),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

/// Sign an edge transmits when read against its direction.
fn reversed_sign(dag: &SignedDag, from: &str, to: &str, sign: Sign, mode: Mode) -> Sign {
    match mode {
        Mode::Classical => sign,
        Mode::Sound => {
            let binary = |n: &str| dag.variable(n).map(|v| v.is_binary()).unwrap_or(false);
            if binary(from) && binary(to) {
                sign
            } else {
                Sign::Question
            }
        }
    }
}

fn step_sign(dag: &SignedDag, step: &TrailStep, mode: Mode) -> Sign {
    match step.direction {
        Direction::WithEdge => step.sign,
        Direction::AgainstEdge => reversed_sign(dag, &step.from, &step.to, step.sign, mode),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrailContribution {
    pub trail: Trail,
    pub sign: Sign,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropagationResult {
    pub node_signs: BTreeMap<String, Sign>,
    pub evidence_node: String,
    pub evidence_sign: Sign,
    pub mode: Mode,
    pub trail_log: BTreeMap<String, Vec<TrailContribution>>,
}

/// Effect of observing a large (`+`) or small (`-`) value of `observed`.
///
/// Every other node's sign is the sum over its active trails (no other
/// evidence) of the evidence sign times the product of the step signs.
pub fn propagate(
    qpn: &Qpn,
    observed: &str,
    obs_sign: Sign,
    mode: Mode,
) -> Result<PropagationResult> {
    let source = qpn.index_of(observed)?;
    if !obs_sign.is_definite() {
        return Err(Error::BadEvidenceSign(obs_sign));
    }
    let nothing_observed = vec![false; qpn.len()];
    let mut node_signs = BTreeMap::new();
    let mut trail_log = BTreeMap::new();
    node_signs.insert(observed.to_string(), obs_sign);
    for target in (0..qpn.len()).filter(|&t| t != source) {
        let contributions: Vec<TrailContribution> = qpn
            .active_trails_idx(source, target, &nothing_observed)
            .into_iter()
            .map(|trail| {
                let sign = trail
                    .steps
                    .iter()
                    .fold(obs_sign, |acc, step| acc * step_sign(qpn.dag(), step, mode));
                TrailContribution { trail, sign }
            })
            .collect();
        let sign = contributions.iter().fold(Sign::Zero, |acc, c| acc + c.sign);
        let name = qpn.variables()[target].name.clone();
        node_signs.insert(name.clone(), sign);
        trail_log.insert(name, contributions);
    }
    Ok(PropagationResult {
        node_signs,
        evidence_node: observed.to_string(),
        evidence_sign: obs_sign,
        mode,
        trail_log,
    })
}

fn without_vertex(qpn: &Qpn, v: &str) -> (Vec<crate::dist::VariableSpec>, Vec<SignedEdge>) {
    let variables = qpn
        .variables()
        .iter()
        .filter(|x| x.name != v)
        .cloned()
        .collect();
    let edges = qpn
        .edges()
        .iter()
        .filter(|e| e.from != v && e.to != v)
        .cloned()
        .collect();
    (variables, edges)
}

fn add_or_combine(edges: &mut Vec<SignedEdge>, from: &str, to: &str, sign: Sign) {
    match edges.iter_mut().find(|e| e.from == from && e.to == to) {
        Some(e) => e.sign = e.sign + sign,
        None => edges.push(SignedEdge::new(from, to, sign)),
    }
}

/// Removes `v`, which must have at most one parent.
///
/// The parent (if any) gains an edge to each child signed by chaining the
/// two edges, summed with any existing edge. Children that become dependent
/// through their shared parent `v` are linked by a `?` edge in topological
/// order.
pub fn reduce_vertex(qpn: &Qpn, v: &str) -> Result<Qpn> {
    let parents = qpn.parents(v)?;
    if parents.len() > 1 {
        return Err(Error::TooManyParents {
            node: v.to_string(),
            count: parents.len(),
        });
    }
    let (variables, mut edges) = without_vertex(qpn, v);
    let mut children = qpn.children(v)?;
    if let Some(&p) = parents.first() {
        let into_v = qpn.edge(p, v).expect("parent edge").sign;
        for &c in &children {
            let out_of_v = qpn.edge(v, c).expect("child edge").sign;
            add_or_combine(&mut edges, p, c, into_v * out_of_v);
        }
    }
    let topo = qpn.topological_order();
    children.sort_by_key(|c| topo.iter().position(|t| t == c));
    for (k, &a) in children.iter().enumerate() {
        for &b in &children[k + 1..] {
            if qpn.edge(a, b).is_none() && qpn.edge(b, a).is_none() {
                edges.push(SignedEdge::new(a, b, Sign::Question));
            }
        }
    }
    Qpn::new(variables, edges)
}

/// Reverses `i → j`.
///
/// The reversed edge keeps its sign in classical mode; in sound mode it
/// keeps it only between binary variables and becomes `?` otherwise. `j`
/// inherits the parents of `i` and `i` inherits the other parents of `j`;
/// every newly created edge is `?`.
pub fn reverse_edge(qpn: &Qpn, i: &str, j: &str, mode: Mode) -> Result<Qpn> {
    let edge = qpn.edge(i, j).ok_or_else(|| Error::NoSuchEdge {
        from: i.to_string(),
        to: j.to_string(),
    })?;
    if qpn.has_indirect_path(qpn.index_of(i)?, qpn.index_of(j)?) {
        return Err(Error::WouldCreateCycle {
            from: i.to_string(),
            to: j.to_string(),
        });
    }
    let sign = reversed_sign(qpn.dag(), i, j, edge.sign, mode);
    let mut edges: Vec<SignedEdge> = qpn
        .edges()
        .iter()
        .map(|e| {
            if e.from == i && e.to == j {
                SignedEdge::new(j, i, sign)
            } else {
                e.clone()
            }
        })
        .collect();
    for p in qpn.parents(i)? {
        if p != j && qpn.edge(p, j).is_none() {
            edges.push(SignedEdge::new(p, j, Sign::Question));
        }
    }
    for p in qpn.parents(j)? {
        if p != i && qpn.edge(p, i).is_none() {
            edges.push(SignedEdge::new(p, i, Sign::Question));
        }
    }
    Qpn::new(qpn.variables().to_vec(), edges)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryOp {
    RemoveBarren(String),
    Reduce(String),
    Reverse(String, String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryStep {
    pub op: QueryOp,
    /// Edge list after the operation.
    pub edges: Vec<SignedEdge>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryResult {
    pub sign: Sign,
    pub transcript: Vec<QueryStep>,
}

impl QueryResult {
    /// Re-applies the transcript to `qpn` and returns the final network.
    pub fn replay(&self, qpn: &Qpn, mode: Mode) -> Result<Qpn> {
        self.transcript
            .iter()
            .try_fold(qpn.clone(), |cur, step| apply(&cur, &step.op, mode))
    }
}

fn apply(qpn: &Qpn, op: &QueryOp, mode: Mode) -> Result<Qpn> {
    match op {
        QueryOp::RemoveBarren(v) => {
            qpn.index_of(v)?;
            let (variables, edges) = without_vertex(qpn, v);
            Qpn::new(variables, edges)
        }
        QueryOp::Reduce(v) => reduce_vertex(qpn, v),
        QueryOp::Reverse(i, j) => reverse_edge(qpn, i, j, mode),
    }
}

fn edge_list(qpn: &Qpn) -> String {
    qpn.edges()
        .iter()
        .map(|e| format!("{}->{}:{}", e.from, e.to, e.sign))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Sign of the marginal influence of `decision` on `target`.
///
/// Strategy, repeated until only the two query nodes remain: delete a
/// barren node (a childless non-query node), else reduce the topologically
/// first non-query node with at most one parent, else reverse the edge from
/// `target` to its topologically first child. A final `target → decision`
/// edge is reversed to read off the answer.
pub fn query(qpn: &Qpn, decision: &str, target: &str, mode: Mode) -> Result<QueryResult> {
    if qpn.d_separated(decision, target, &[])? {
        return Ok(QueryResult {
            sign: Sign::Zero,
            transcript: Vec::new(),
        });
    }
    let is_query = |v: &str| v == decision || v == target;
    let mut cur = qpn.clone();
    let mut transcript = Vec::new();
    loop {
        let topo: Vec<String> = cur
            .topological_order()
            .iter()
            .map(|s| s.to_string())
            .collect();
        let op = if let Some(v) = topo
            .iter()
            .find(|v| !is_query(v) && cur.children(v).is_ok_and(|c| c.is_empty()))
        {
            QueryOp::RemoveBarren(v.clone())
        } else if cur.len() == 2 {
            if let Some(e) = cur.edge(decision, target) {
                return Ok(QueryResult {
                    sign: e.sign,
                    transcript,
                });
            }
            if cur.edge(target, decision).is_some() {
                QueryOp::Reverse(target.to_string(), decision.to_string())
            } else {
                return Err(Error::Stuck(edge_list(&cur)));
            }
        } else if let Some(v) = topo
            .iter()
            .find(|v| !is_query(v) && cur.parents(v).is_ok_and(|p| p.len() <= 1))
        {
            QueryOp::Reduce(v.clone())
        } else {
            let t = cur.index_of(target)?;
            let child = topo.iter().find(|c| {
                cur.edge(target, c).is_some()
                    && !cur.has_indirect_path(t, cur.index_of(c).expect("known"))
            });
            match child {
                Some(c) => QueryOp::Reverse(target.to_string(), c.clone()),
                None => return Err(Error::Stuck(edge_list(&cur))),
            }
        };
        cur = apply(&cur, &op, mode)?;
        transcript.push(QueryStep {
            op,
            edges: cur.edges().to_vec(),
        });
    }
}
