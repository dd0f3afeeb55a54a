//! Whether a joint table satisfies a QPN: the local Markov conditions of the
//! DAG plus the influence asserted by every signed edge.

use rayon::prelude::*;
use serde::Serialize;

use crate::dependence::{influence_sign, InfluenceVerdict};
use crate::dist::{JointTable, EPS_PROB};
use crate::error::{Error, Result};
use crate::graph::{Qpn, SignedDag, SignedEdge};
use crate::sign::Sign;

/// Tolerance on conditional-independence deviations.
pub const EPS_CI: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarkovViolation {
    pub variable: String,
    pub nondescendants: Vec<String>,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeViolation {
    pub edge: SignedEdge,
    pub expected: Sign,
    pub verdict: InfluenceVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SatisfactionReport {
    pub markov_violations: Vec<MarkovViolation>,
    pub edge_violations: Vec<EdgeViolation>,
    pub satisfied: bool,
}

/// `max |p(a, b | z) - p(a | z) p(b | z)|` over all cells with `p(z) > 0`.
pub fn ci_deviation(table: &JointTable, a: &[&str], b: &[&str], given: &[&str]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::ShapeMismatch(
            "independence sets must be non-empty".into(),
        ));
    }
    let order: Vec<&str> = given.iter().chain(a).chain(b).copied().collect();
    let marg = table.marginal_in_order(&order)?;
    let sizes: Vec<usize> = marg.variables().iter().map(|v| v.len()).collect();
    let nz: usize = sizes[..given.len()].iter().product();
    let na: usize = sizes[given.len()..given.len() + a.len()].iter().product();
    let nb: usize = sizes[given.len() + a.len()..].iter().product();
    let probs = marg.probabilities();

    let mut worst: f64 = 0.0;
    for block in probs.chunks(na * nb).take(nz) {
        let pz: f64 = block.iter().sum();
        if pz <= EPS_PROB {
            continue;
        }
        let pa: Vec<f64> = block
            .chunks(nb)
            .map(|r| r.iter().sum::<f64>() / pz)
            .collect();
        let pb: Vec<f64> = (0..nb)
            .map(|j| (0..na).map(|i| block[i * nb + j]).sum::<f64>() / pz)
            .collect();
        for i in 0..na {
            for j in 0..nb {
                worst = worst.max((block[i * nb + j] / pz - pa[i] * pb[j]).abs());
            }
        }
    }
    Ok(worst)
}

fn check_same_variables(table: &JointTable, dag: &SignedDag) -> Result<()> {
    if table.variables().len() != dag.len() {
        return Err(Error::ShapeMismatch(format!(
            "table has {} variables, network has {}",
            table.variables().len(),
            dag.len()
        )));
    }
    for v in dag.variables() {
        let t = table
            .variable(&v.name)
            .map_err(|_| Error::ShapeMismatch(format!("table has no variable `{}`", v.name)))?;
        if t.support != v.support {
            return Err(Error::ShapeMismatch(format!(
                "supports of `{}` differ between table and network",
                v.name
            )));
        }
    }
    Ok(())
}

/// Local Markov check: each variable is independent of its
/// non-descendants given its parents.
pub fn markov_check(table: &JointTable, dag: &SignedDag) -> Result<Vec<MarkovViolation>> {
    check_same_variables(table, dag)?;
    let mut violations = Vec::new();
    for v in 0..dag.len() {
        let desc = dag.descendant_mask(v);
        let parents = dag.parent_indices(v);
        let nd: Vec<&str> = (0..dag.len())
            .filter(|&u| u != v && !desc[u] && !parents.contains(&u))
            .map(|u| dag.name(u))
            .collect();
        if nd.is_empty() {
            continue;
        }
        let pa: Vec<&str> = parents.iter().map(|&p| dag.name(p)).collect();
        let dev = ci_deviation(table, &[dag.name(v)], &nd, &pa)?;
        if dev > EPS_CI {
            violations.push(MarkovViolation {
                variable: dag.name(v).to_string(),
                nondescendants: nd.iter().map(|s| s.to_string()).collect(),
                max_deviation: dev,
            });
        }
    }
    Ok(violations)
}

/// Checks the Markov conditions and every edge's influence (given the
/// child's other parents). A `?` edge constrains nothing; a `+` edge accepts
/// a Zero verdict, as does a `-` edge.
pub fn satisfies_qpn(table: &JointTable, qpn: &Qpn) -> Result<SatisfactionReport> {
    let markov_violations = markov_check(table, qpn.dag())?;
    let checks: Vec<Option<EdgeViolation>> = qpn
        .edges()
        .par_iter()
        .map(|edge| -> Result<Option<EdgeViolation>> {
            let accepts: fn(&InfluenceVerdict) -> bool = match edge.sign {
                Sign::Plus => |v| v.verdict.is_positive_or_zero(),
                Sign::Minus => |v| v.verdict.is_negative_or_zero(),
                _ => return Ok(None),
            };
            let context: Vec<&str> = qpn
                .parents(&edge.to)?
                .into_iter()
                .filter(|p| *p != edge.from)
                .collect();
            let verdict = influence_sign(table, &edge.from, &edge.to, &context)?;
            Ok((!accepts(&verdict)).then(|| EdgeViolation {
                edge: edge.clone(),
                expected: edge.sign,
                verdict,
            }))
        })
        .collect::<Result<_>>()?;
    let edge_violations: Vec<EdgeViolation> = checks.into_iter().flatten().collect();
    let satisfied = markov_violations.is_empty() && edge_violations.is_empty();
    Ok(SatisfactionReport {
        markov_violations,
        edge_violations,
        satisfied,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dependence::Influence;
    use crate::dist::VariableSpec;

    fn ternary(name: &str) -> VariableSpec {
        VariableSpec::new(name, vec![1.0, 2.0, 3.0]).unwrap()
    }

    fn table1() -> JointTable {
        JointTable::new(
            vec![ternary("X"), ternary("Y")],
            vec![0.2, 0.05, 0.075, 0.15, 0.15, 0.1, 0.075, 0.1, 0.1],
        )
        .unwrap()
    }

    fn two_node(from: &str, to: &str, sign: Sign) -> Qpn {
        Qpn::new(
            vec![ternary("X"), ternary("Y")],
            vec![SignedEdge::new(from, to, sign)],
        )
        .unwrap()
    }

    #[test]
    fn table1_satisfies_forward_edge_only() {
        let fwd = satisfies_qpn(&table1(), &two_node("X", "Y", Sign::Plus)).unwrap();
        assert!(fwd.satisfied);
        let rev = satisfies_qpn(&table1(), &two_node("Y", "X", Sign::Plus)).unwrap();
        assert!(!rev.satisfied);
        assert!(rev.markov_violations.is_empty());
        assert_eq!(rev.edge_violations.len(), 1);
        assert_eq!(rev.edge_violations[0].verdict.verdict, Influence::Ambiguous);
        assert!(
            satisfies_qpn(&table1(), &two_node("Y", "X", Sign::Question))
                .unwrap()
                .satisfied
        );
    }

    #[test]
    fn empty_edge_set_requires_independence() {
        let qpn = Qpn::new(vec![ternary("X"), ternary("Y")], vec![]).unwrap();
        let report = satisfies_qpn(&table1(), &qpn).unwrap();
        assert!(!report.satisfied);
        assert_eq!(report.markov_violations[0].variable, "X");

        let px = [0.2, 0.3, 0.5];
        let py = [0.1, 0.6, 0.3];
        let probs = px
            .iter()
            .flat_map(|a| py.iter().map(move |b| a * b))
            .collect();
        let indep = JointTable::new(vec![ternary("X"), ternary("Y")], probs).unwrap();
        assert!(satisfies_qpn(&indep, &qpn).unwrap().satisfied);
    }

    #[test]
    fn chain_with_direct_dependence_violates_markov_at_x3() {
        let vars: Vec<VariableSpec> = ["X1", "X2", "X3"]
            .iter()
            .map(|n| VariableSpec::with_levels(*n, 2).unwrap())
            .collect();
        // p(x3 = 1 | x1, x2) depends on x1.
        let mut probs = Vec::new();
        for x1 in 0..2 {
            for x2 in 0..2 {
                let p12 = 0.25;
                let q = 0.2 + 0.3 * x1 as f64 + 0.1 * x2 as f64;
                probs.push(p12 * (1.0 - q));
                probs.push(p12 * q);
            }
        }
        let table = JointTable::new(vars.clone(), probs).unwrap();
        let dag = SignedDag::new(
            vars,
            vec![
                SignedEdge::new("X1", "X2", Sign::Plus),
                SignedEdge::new("X2", "X3", Sign::Minus),
            ],
        )
        .unwrap();
        let v = markov_check(&table, &dag).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].variable, "X3");
        assert_eq!(v[0].nondescendants, vec!["X1"]);
        // p(x1 | x2) = 1/2 and q varies by 0.15 around its x1-average.
        assert!((v[0].max_deviation - 0.075).abs() < 1e-12);
    }

    #[test]
    fn mismatched_variables_are_rejected() {
        let qpn = Qpn::new(vec![ternary("X"), ternary("Z")], vec![]).unwrap();
        assert!(matches!(
            satisfies_qpn(&table1(), &qpn),
            Err(Error::ShapeMismatch(_))
        ));
    }
}
