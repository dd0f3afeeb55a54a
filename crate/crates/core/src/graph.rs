//! Signed DAGs: structure, topology and d-separation.

use std::collections::{BTreeSet, VecDeque};
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::dist::{check_unique_names, VariableSpec};
use crate::error::{Error, Result};
use crate::sign::Sign;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignedEdge {
    pub from: String,
    pub to: String,
    pub sign: Sign,
}

impl SignedEdge {
    pub fn new(from: impl Into<String>, to: impl Into<String>, sign: Sign) -> Self {
        SignedEdge {
            from: from.into(),
            to: to.into(),
            sign,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    WithEdge,
    AgainstEdge,
}

/// One hop of a trail. `from`/`to` are the edge's declared endpoints, not
/// the direction of travel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrailStep {
    pub from: String,
    pub to: String,
    pub sign: Sign,
    pub direction: Direction,
}

/// A simple undirected path through the DAG.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trail {
    pub nodes: Vec<String>,
    pub steps: Vec<TrailStep>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNetwork {
    variables: Vec<VariableSpec>,
    edges: Vec<SignedEdge>,
}

impl TryFrom<RawNetwork> for SignedDag {
    type Error = Error;

    fn try_from(raw: RawNetwork) -> Result<Self> {
        SignedDag::new(raw.variables, raw.edges)
    }
}

impl From<SignedDag> for RawNetwork {
    fn from(dag: SignedDag) -> Self {
        RawNetwork {
            variables: dag.variables,
            edges: dag.edges,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawNetwork", into = "RawNetwork")]
pub struct SignedDag {
    variables: Vec<VariableSpec>,
    edges: Vec<SignedEdge>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    topo: Vec<usize>,
}

impl PartialEq for SignedDag {
    fn eq(&self, other: &Self) -> bool {
        self.variables == other.variables && self.edges == other.edges
    }
}

impl SignedDag {
    pub fn new(variables: Vec<VariableSpec>, edges: Vec<SignedEdge>) -> Result<Self> {
        for v in &variables {
            v.check()?;
        }
        check_unique_names(variables.iter().map(|v| v.name.as_str()))?;
        let n = variables.len();
        let lookup = |name: &str| {
            variables
                .iter()
                .position(|v| v.name == name)
                .ok_or_else(|| Error::UnknownVariable(name.to_string()))
        };
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        for e in &edges {
            let (f, t) = (lookup(&e.from)?, lookup(&e.to)?);
            if f == t {
                return Err(Error::SelfLoop(e.from.clone()));
            }
            if e.sign == Sign::Zero {
                return Err(Error::ZeroSignEdge {
                    from: e.from.clone(),
                    to: e.to.clone(),
                });
            }
            if !seen.insert((f, t)) {
                return Err(Error::DuplicateEdge {
                    from: e.from.clone(),
                    to: e.to.clone(),
                });
            }
            parents[t].push(f);
            children[f].push(t);
        }
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort_unstable();
        }

        // Kahn's algorithm; the smallest declared index goes first.
        let mut indegree: Vec<usize> = parents.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            topo.push(v);
            for &c in &children[v] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        if topo.len() < n {
            let stuck = (0..n).find(|&v| indegree[v] > 0).expect("cycle member");
            return Err(Error::CycleDetected(variables[stuck].name.clone()));
        }

        Ok(SignedDag {
            variables,
            edges,
            parents,
            children,
            topo,
        })
    }

    pub fn variables(&self) -> &[VariableSpec] {
        &self.variables
    }

    pub fn edges(&self) -> &[SignedEdge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn variable(&self, name: &str) -> Result<&VariableSpec> {
        Ok(&self.variables[self.index_of(name)?])
    }

    pub(crate) fn name(&self, v: usize) -> &str {
        &self.variables[v].name
    }

    pub(crate) fn parent_indices(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    /// Parents of `v`, in declaration order.
    pub fn parents(&self, v: &str) -> Result<Vec<&str>> {
        let v = self.index_of(v)?;
        Ok(self.parents[v].iter().map(|&p| self.name(p)).collect())
    }

    pub fn children(&self, v: &str) -> Result<Vec<&str>> {
        let v = self.index_of(v)?;
        Ok(self.children[v].iter().map(|&c| self.name(c)).collect())
    }

    pub fn edge(&self, from: &str, to: &str) -> Option<&SignedEdge> {
        self.edges.iter().find(|e| e.from == from && e.to == to)
    }

    /// Topological order, ties broken by declaration order.
    pub fn topological_order(&self) -> Vec<&str> {
        self.topo.iter().map(|&v| self.name(v)).collect()
    }

    pub(crate) fn descendant_mask(&self, v: usize) -> Vec<bool> {
        let mut mask = vec![false; self.len()];
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            for &c in &self.children[u] {
                if !mask[c] {
                    mask[c] = true;
                    stack.push(c);
                }
            }
        }
        mask
    }

    /// Whether a directed path `from ⇝ to` exists that avoids the direct
    /// edge `from → to`.
    pub(crate) fn has_indirect_path(&self, from: usize, to: usize) -> bool {
        let mut seen = vec![false; self.len()];
        let mut stack: Vec<usize> = self.children[from]
            .iter()
            .copied()
            .filter(|&c| c != to)
            .collect();
        while let Some(u) = stack.pop() {
            if u == to {
                return true;
            }
            if std::mem::replace(&mut seen[u], true) {
                continue;
            }
            stack.extend(self.children[u].iter().copied());
        }
        false
    }

    fn query_sets(&self, a: &str, b: &str, given: &[&str]) -> Result<(usize, usize, Vec<bool>)> {
        let ai = self.index_of(a)?;
        let bi = self.index_of(b)?;
        if ai == bi {
            return Err(Error::OverlappingSets(a.to_string()));
        }
        let mut observed = vec![false; self.len()];
        for g in given {
            let gi = self.index_of(g)?;
            if gi == ai || gi == bi {
                return Err(Error::OverlappingSets(g.to_string()));
            }
            observed[gi] = true;
        }
        Ok((ai, bi, observed))
    }

    /// True iff every trail between `a` and `b` is blocked by `given`.
    pub fn d_separated(&self, a: &str, b: &str, given: &[&str]) -> Result<bool> {
        let (ai, bi, observed) = self.query_sets(a, b, given)?;
        Ok(!self.reachable(ai, &observed)[bi])
    }

    /// Nodes d-connected to `source` given the observed mask (Bayes-ball).
    pub(crate) fn reachable(&self, source: usize, observed: &[bool]) -> Vec<bool> {
        let n = self.len();
        let mut anc_of_observed = vec![false; n];
        let mut stack: Vec<usize> = (0..n).filter(|&v| observed[v]).collect();
        while let Some(u) = stack.pop() {
            if std::mem::replace(&mut anc_of_observed[u], true) {
                continue;
            }
            stack.extend(self.parents[u].iter().copied());
        }

        // (node, arrived_from_child)
        let mut visited = vec![[false; 2]; n];
        let mut reached = vec![false; n];
        let mut queue = VecDeque::from([(source, true)]);
        while let Some((y, up)) = queue.pop_front() {
            if std::mem::replace(&mut visited[y][up as usize], true) {
                continue;
            }
            if !observed[y] {
                reached[y] = true;
            }
            if up && !observed[y] {
                queue.extend(self.parents[y].iter().map(|&p| (p, true)));
                queue.extend(self.children[y].iter().map(|&c| (c, false)));
            } else if !up {
                if !observed[y] {
                    queue.extend(self.children[y].iter().map(|&c| (c, false)));
                }
                if anc_of_observed[y] {
                    queue.extend(self.parents[y].iter().map(|&p| (p, true)));
                }
            }
        }
        reached[source] = false;
        reached
    }

    /// All simple trails between `from` and `to` that are active given
    /// `given`, sorted by node-name sequence.
    pub fn active_trails(&self, from: &str, to: &str, given: &[&str]) -> Result<Vec<Trail>> {
        let (fi, ti, observed) = self.query_sets(from, to, given)?;
        Ok(self.active_trails_idx(fi, ti, &observed))
    }

    pub(crate) fn active_trails_idx(
        &self,
        from: usize,
        to: usize,
        observed: &[bool],
    ) -> Vec<Trail> {
        let n = self.len();
        // A collider is open iff it or one of its descendants is observed.
        let collider_open: Vec<bool> = (0..n)
            .map(|v| {
                observed[v]
                    || self
                        .descendant_mask(v)
                        .iter()
                        .zip(observed)
                        .any(|(d, o)| *d && *o)
            })
            .collect();
        let neighbours: Vec<Vec<(usize, Direction)>> = (0..n)
            .map(|v| {
                let mut list: Vec<(usize, Direction)> = self.children[v]
                    .iter()
                    .map(|&c| (c, Direction::WithEdge))
                    .chain(self.parents[v].iter().map(|&p| (p, Direction::AgainstEdge)))
                    .collect();
                list.sort_by_key(|&(u, _)| u);
                list
            })
            .collect();

        let mut found = Vec::new();
        let mut path = vec![from];
        let mut dirs: Vec<Direction> = Vec::new();
        let mut on_path = vec![false; n];
        on_path[from] = true;
        self.extend_trails(
            to,
            &neighbours,
            &collider_open,
            observed,
            &mut path,
            &mut dirs,
            &mut on_path,
            &mut found,
        );

        let mut trails: Vec<Trail> = found
            .into_iter()
            .map(|(nodes, dirs)| self.build_trail(&nodes, &dirs))
            .collect();
        trails.sort_by(|a, b| a.nodes.cmp(&b.nodes));
        trails
    }

    #[allow(clippy::too_many_arguments)]
    fn extend_trails(
        &self,
        to: usize,
        neighbours: &[Vec<(usize, Direction)>],
        collider_open: &[bool],
        observed: &[bool],
        path: &mut Vec<usize>,
        dirs: &mut Vec<Direction>,
        on_path: &mut [bool],
        found: &mut Vec<(Vec<usize>, Vec<Direction>)>,
    ) {
        let cur = *path.last().expect("non-empty path");
        for &(next, dir) in &neighbours[cur] {
            if on_path[next] {
                continue;
            }
            if let Some(&prev_dir) = dirs.last() {
                // prev → cur ← next makes `cur` a collider.
                let collider = prev_dir == Direction::WithEdge && dir == Direction::AgainstEdge;
                let open = if collider {
                    collider_open[cur]
                } else {
                    !observed[cur]
                };
                if !open {
                    continue;
                }
            }
            path.push(next);
            dirs.push(dir);
            if next == to {
                found.push((path.clone(), dirs.clone()));
            } else {
                on_path[next] = true;
                self.extend_trails(
                    to,
                    neighbours,
                    collider_open,
                    observed,
                    path,
                    dirs,
                    on_path,
                    found,
                );
                on_path[next] = false;
            }
            path.pop();
            dirs.pop();
        }
    }

    fn build_trail(&self, nodes: &[usize], dirs: &[Direction]) -> Trail {
        let steps = nodes
            .windows(2)
            .zip(dirs)
            .map(|(w, &direction)| {
                let (f, t) = match direction {
                    Direction::WithEdge => (w[0], w[1]),
                    Direction::AgainstEdge => (w[1], w[0]),
                };
                let edge = self
                    .edge(self.name(f), self.name(t))
                    .expect("trail follows existing edges");
                TrailStep {
                    from: edge.from.clone(),
                    to: edge.to.clone(),
                    sign: edge.sign,
                    direction,
                }
            })
            .collect();
        Trail {
            nodes: nodes.iter().map(|&v| self.name(v).to_string()).collect(),
            steps,
        }
    }
}

/// A qualitative probabilistic network: a signed DAG whose edges assert
/// positive (`+`), negative (`-`) or unspecified (`?`) influences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Qpn {
    dag: SignedDag,
}

impl Qpn {
    pub fn new(variables: Vec<VariableSpec>, edges: Vec<SignedEdge>) -> Result<Self> {
        Ok(Qpn {
            dag: SignedDag::new(variables, edges)?,
        })
    }

    pub fn dag(&self) -> &SignedDag {
        &self.dag
    }

    pub fn into_dag(self) -> SignedDag {
        self.dag
    }
}

impl From<SignedDag> for Qpn {
    fn from(dag: SignedDag) -> Self {
        Qpn { dag }
    }
}

impl Deref for Qpn {
    type Target = SignedDag;

    fn deref(&self) -> &SignedDag {
        &self.dag
    }
}
