//! Built-in fixtures, DAG-factorised table construction and the randomized
//! counterexample search.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dependence::{influence_sign, Influence, InfluenceVerdict};
use crate::dist::{strides, JointTable, Odometer, VariableSpec};
use crate::error::{Error, Result};
use crate::graph::{Qpn, SignedDag, SignedEdge};
use crate::sampling::{simplex, trial_rng};
use crate::semantics::{satisfies_qpn, SatisfactionReport};
use crate::sign::Sign;

fn levels(name: &str, support: &[f64]) -> VariableSpec {
    VariableSpec::new(name, support.to_vec()).expect("fixture support is valid")
}

/// The 3×3 table over `X, Y ∈ {1, 2, 3}` in which `X` positively influences
/// `Y` but `Y` does not positively influence `X`.
pub fn table1_fixture() -> JointTable {
    JointTable::new(
        vec![levels("X", &[1.0, 2.0, 3.0]), levels("Y", &[1.0, 2.0, 3.0])],
        vec![0.2, 0.05, 0.075, 0.15, 0.15, 0.1, 0.075, 0.1, 0.1],
    )
    .expect("fixture is valid")
}

/// Chain `X1 -(+)-> X2 -(-)-> X3` over ternary variables.
pub fn figure1_qpn() -> Qpn {
    let v = |n| levels(n, &[1.0, 2.0, 3.0]);
    Qpn::new(
        vec![v("X1"), v("X2"), v("X3")],
        vec![
            SignedEdge::new("X1", "X2", Sign::Plus),
            SignedEdge::new("X2", "X3", Sign::Minus),
        ],
    )
    .expect("fixture is valid")
}

/// `X -(+)-> Y` with `n_levels` levels `1..=n` on both variables.
pub fn two_node_qpn(n_levels: usize) -> Qpn {
    let support: Vec<f64> = (1..=n_levels).map(|k| k as f64).collect();
    Qpn::new(
        vec![levels("X", &support), levels("Y", &support)],
        vec![SignedEdge::new("X", "Y", Sign::Plus)],
    )
    .expect("fixture is valid")
}

pub const HE_OX_TEMP: &str = "HeOxTemp";
pub const HE_OX_TEMP_PROBE: &str = "HeOxTempProbe";
pub const HIGH_OX_TEMP: &str = "HighOxTemp";
pub const OX_TANK_LEAK: &str = "OxTankLeak";
pub const OX_PRESSURE_PROBE: &str = "OxPressureProbe";
pub const HE_OX_VALVE_PROBLEM: &str = "HeOxValveProblem";

/// Temperature levels `0..=9`.
const TEMP_LEVELS: usize = 10;
/// Faulty probe readings are uniform on `FAULT_LOW..=9`.
const FAULT_LOW: usize = 5;

/// Orbital manoeuvring system network.
///
/// Temperatures take levels `0..=9`; `OxPressureProbe` reads low, normal or
/// high (`0, 1, 2`); the remaining variables are binary events.
pub fn shuttle_qpn() -> Qpn {
    let temp: Vec<f64> = (0..TEMP_LEVELS).map(|k| k as f64).collect();
    let binary = [0.0, 1.0];
    Qpn::new(
        vec![
            levels(HE_OX_TEMP, &temp),
            levels(HE_OX_TEMP_PROBE, &temp),
            levels(HIGH_OX_TEMP, &binary),
            levels(OX_TANK_LEAK, &binary),
            levels(OX_PRESSURE_PROBE, &[0.0, 1.0, 2.0]),
            levels(HE_OX_VALVE_PROBLEM, &binary),
        ],
        vec![
            SignedEdge::new(HE_OX_TEMP, HE_OX_TEMP_PROBE, Sign::Plus),
            SignedEdge::new(HE_OX_TEMP, HIGH_OX_TEMP, Sign::Plus),
            SignedEdge::new(HE_OX_TEMP, OX_TANK_LEAK, Sign::Plus),
            SignedEdge::new(HIGH_OX_TEMP, OX_TANK_LEAK, Sign::Plus),
            SignedEdge::new(OX_TANK_LEAK, OX_PRESSURE_PROBE, Sign::Minus),
            SignedEdge::new(HE_OX_VALVE_PROBLEM, OX_PRESSURE_PROBE, Sign::Minus),
        ],
    )
    .expect("fixture is valid")
}

/// Conditional probability tables for a DAG: `cpts[v][c]` is the pmf of
/// variable `v` (declaration order) under parent configuration `c`, where
/// configurations enumerate the parents in declaration order, last fastest.
pub type Cpts = Vec<Vec<Vec<f64>>>;

fn parent_configs(dag: &SignedDag, v: usize) -> usize {
    dag.parent_indices(v)
        .iter()
        .map(|&p| dag.variables()[p].len())
        .product()
}

/// Joint table `∏_v p(x_v | x_pa(v))` over the DAG's variables.
pub fn factorized_joint(dag: &SignedDag, cpts: &Cpts) -> Result<JointTable> {
    let n = dag.len();
    if cpts.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "{} cpts for {n} variables",
            cpts.len()
        )));
    }
    let shape: Vec<usize> = dag.variables().iter().map(VariableSpec::len).collect();
    for v in 0..n {
        if cpts[v].len() != parent_configs(dag, v)
            || cpts[v].iter().any(|pmf| pmf.len() != shape[v])
        {
            return Err(Error::ShapeMismatch(format!(
                "cpt of `{}` has the wrong shape",
                dag.name(v)
            )));
        }
    }
    let parent_strides: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            let sizes: Vec<usize> = dag.parent_indices(v).iter().map(|&p| shape[p]).collect();
            strides(&sizes)
        })
        .collect();
    let mut probs = Vec::with_capacity(shape.iter().product());
    let mut cells = Odometer::new(&shape);
    while let Some(idx) = cells.next_index() {
        let p: f64 = (0..n)
            .map(|v| {
                let config: usize = dag
                    .parent_indices(v)
                    .iter()
                    .zip(&parent_strides[v])
                    .map(|(&pa, s)| idx[pa] * s)
                    .sum();
                cpts[v][config][idx[v]]
            })
            .product();
        probs.push(p);
    }
    JointTable::new(dag.variables().to_vec(), probs)
}

/// Every conditional slice drawn independently and uniformly from its simplex.
pub fn random_cpts<R: Rng + ?Sized>(dag: &SignedDag, rng: &mut R) -> Cpts {
    (0..dag.len())
        .map(|v| {
            (0..parent_configs(dag, v))
                .map(|_| simplex(rng, dag.variables()[v].len()))
                .collect()
        })
        .collect()
}

pub fn random_factorized_joint<R: Rng + ?Sized>(dag: &SignedDag, rng: &mut R) -> JointTable {
    factorized_joint(dag, &random_cpts(dag, rng)).expect("random cpts match the dag")
}

/// Discretised shuttle distribution.
///
/// * `HeOxTemp` is uniform on `0..=9`.
/// * `HeOxTempProbe` equals `HeOxTemp` with probability `1 - fault_prob`;
///   otherwise it reads uniformly on `5..=9`, independent of the temperature.
/// * `P(HighOxTemp = 1 | t) = 0.1 + 0.08 t`.
/// * `P(OxTankLeak = 1 | t, h) = 0.01 + 0.02 t + 0.2 h`.
/// * `HeOxValveProblem` occurs with probability 0.05.
/// * `OxPressureProbe` (low, normal, high) given (leak, valve):
///   `(0,0) → (0.05, 0.15, 0.8)`, `(0,1) → (0.4, 0.35, 0.25)`,
///   `(1,0) → (0.5, 0.3, 0.2)`, `(1,1) → (0.7, 0.2, 0.1)`.
pub fn shuttle_distribution(fault_prob: f64) -> Result<JointTable> {
    if !(fault_prob > 0.0 && fault_prob < 1.0) {
        return Err(Error::BadProbability(fault_prob));
    }
    let qpn = shuttle_qpn();
    let fault_width = (TEMP_LEVELS - FAULT_LOW) as f64;

    let temp = vec![vec![1.0 / TEMP_LEVELS as f64; TEMP_LEVELS]];
    let probe = (0..TEMP_LEVELS)
        .map(|t| {
            (0..TEMP_LEVELS)
                .map(|r| {
                    let exact = if r == t { 1.0 - fault_prob } else { 0.0 };
                    let fault = if r >= FAULT_LOW {
                        fault_prob / fault_width
                    } else {
                        0.0
                    };
                    exact + fault
                })
                .collect()
        })
        .collect();
    let bernoulli = |p: f64| vec![1.0 - p, p];
    let high = (0..TEMP_LEVELS)
        .map(|t| bernoulli(0.1 + 0.08 * t as f64))
        .collect();
    // Parents of the leak in declaration order: (HeOxTemp, HighOxTemp).
    let leak = (0..TEMP_LEVELS)
        .flat_map(|t| (0..2).map(move |h| (t, h)))
        .map(|(t, h)| bernoulli(0.01 + 0.02 * t as f64 + 0.2 * h as f64))
        .collect();
    // Parents of the pressure probe: (OxTankLeak, HeOxValveProblem).
    let pressure = vec![
        vec![0.05, 0.15, 0.8],
        vec![0.4, 0.35, 0.25],
        vec![0.5, 0.3, 0.2],
        vec![0.7, 0.2, 0.1],
    ];
    let valve = vec![bernoulli(0.05)];
    factorized_joint(qpn.dag(), &vec![temp, probe, high, leak, pressure, valve])
}

/// Assertion that the marginal influence of `source` on `target` has sign
/// `claimed`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Claim {
    pub source: String,
    pub target: String,
    pub claimed: Sign,
}

impl Claim {
    pub fn new(
        source: impl Into<String>,
        target: impl Into<String>,
        claimed: Sign,
    ) -> Result<Self> {
        let claim = Claim {
            source: source.into(),
            target: target.into(),
            claimed,
        };
        if claim.source == claim.target || claimed == Sign::Question {
            return Err(Error::InvalidClaim(claim.to_string()));
        }
        Ok(claim)
    }

    pub fn is_contradicted_by(&self, verdict: Influence) -> bool {
        match self.claimed {
            Sign::Plus => matches!(verdict, Influence::Ambiguous | Influence::Negative),
            Sign::Minus => matches!(verdict, Influence::Ambiguous | Influence::Positive),
            Sign::Zero => verdict != Influence::Zero,
            Sign::Question => false,
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}:{}", self.source, self.target, self.claimed)
    }
}

/// Parses `<source>-><target>:<sign>`.
impl FromStr for Claim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidClaim(s.to_string());
        let (pair, sign) = s.rsplit_once(':').ok_or_else(bad)?;
        let (source, target) = pair.split_once("->").ok_or_else(bad)?;
        let (source, target) = (source.trim(), target.trim());
        if source.is_empty() || target.is_empty() {
            return Err(bad());
        }
        let sign: Sign = sign.trim().parse().map_err(|_| bad())?;
        Claim::new(source, target, sign).map_err(|_| bad())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub found: bool,
    pub table: Option<JointTable>,
    pub qpn_report: Option<SatisfactionReport>,
    pub claim_verdict: Option<InfluenceVerdict>,
    pub trials_used: u64,
    pub seed: u64,
}

impl CounterexampleReport {
    /// Re-checks a found counterexample from scratch.
    pub fn reverify(&self, qpn: &Qpn, claim: &Claim) -> Result<bool> {
        let Some(table) = &self.table else {
            return Ok(false);
        };
        let report = satisfies_qpn(table, qpn)?;
        let verdict = influence_sign(table, &claim.source, &claim.target, &[])?;
        Ok(report.satisfied && claim.is_contradicted_by(verdict.verdict))
    }
}

/// Rejection search for a table that satisfies `qpn` but contradicts
/// `claim`. Trial `t` draws from stream `(seed, t)`; the first success in
/// trial order is reported.
pub fn find_counterexample(
    qpn: &Qpn,
    claim: &Claim,
    seed: u64,
    trials: u64,
) -> Result<CounterexampleReport> {
    qpn.index_of(&claim.source)?;
    qpn.index_of(&claim.target)?;
    let hit = (0..trials).into_par_iter().find_map_first(|t| {
        let table = random_factorized_joint(qpn.dag(), &mut trial_rng(seed, t));
        let report = satisfies_qpn(&table, qpn).ok()?;
        if !report.satisfied {
            return None;
        }
        let verdict = influence_sign(&table, &claim.source, &claim.target, &[]).ok()?;
        claim
            .is_contradicted_by(verdict.verdict)
            .then_some((t, table, report, verdict))
    });
    Ok(match hit {
        Some((t, table, report, verdict)) => CounterexampleReport {
            found: true,
            table: Some(table),
            qpn_report: Some(report),
            claim_verdict: Some(verdict),
            trials_used: t + 1,
            seed,
        },
        None => CounterexampleReport {
            found: false,
            table: None,
            qpn_report: None,
            claim_verdict: None,
            trials_used: trials,
            seed,
        },
    })
}
