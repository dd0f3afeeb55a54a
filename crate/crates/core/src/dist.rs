//! Exact finite joint distributions.
//!
//! A [`JointTable`] stores a dense probability array over an ordered list of
//! variables, row-major with the last variable varying fastest. Every variable
//! carries an explicit increasing list of real levels so that "larger value"
//! is meaningful when comparing cdfs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for every probability comparison.
pub const EPS_PROB: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableSpec {
    pub name: String,
    pub support: Vec<f64>,
}

impl VariableSpec {
    pub fn new(name: impl Into<String>, support: Vec<f64>) -> Result<Self> {
        let spec = VariableSpec {
            name: name.into(),
            support,
        };
        spec.check()?;
        Ok(spec)
    }

    /// Variable with levels `0, 1, ..., n - 1`.
    pub fn with_levels(name: impl Into<String>, n: usize) -> Result<Self> {
        Self::new(name, (0..n).map(|k| k as f64).collect())
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn is_binary(&self) -> bool {
        self.support.len() == 2
    }

    /// Position of `level` in the support.
    pub fn level_index(&self, level: f64) -> Result<usize> {
        self.support
            .iter()
            .position(|&s| (s - level).abs() <= EPS_PROB)
            .ok_or_else(|| Error::UnknownLevel {
                variable: self.name.clone(),
                level,
            })
    }

    pub(crate) fn check(&self) -> Result<()> {
        let invalid = |reason: &str| Error::InvalidSupport {
            name: self.name.clone(),
            reason: reason.to_string(),
        };
        if self.name.is_empty() {
            return Err(invalid("empty name"));
        }
        if self.support.len() < 2 {
            return Err(invalid("fewer than two levels"));
        }
        if self.support.iter().any(|s| !s.is_finite()) {
            return Err(invalid("non-finite level"));
        }
        if self.support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("levels are not strictly increasing"));
        }
        Ok(())
    }
}

pub(crate) fn check_unique_names<'a>(names: impl IntoIterator<Item = &'a str>) -> Result<()> {
    let mut seen = std::collections::BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(Error::DuplicateVariable(n.to_string()));
        }
    }
    Ok(())
}

/// Odometer over the multi-indices of a shape, last axis fastest.
#[derive(Debug, Clone)]
pub(crate) struct Odometer {
    shape: Vec<usize>,
    current: Vec<usize>,
    started: bool,
    done: bool,
}

impl Odometer {
    pub(crate) fn new(shape: &[usize]) -> Self {
        Odometer {
            shape: shape.to_vec(),
            current: vec![0; shape.len()],
            started: false,
            done: shape.contains(&0),
        }
    }

    /// Yields the next multi-index, or `None` when exhausted.
    pub(crate) fn next_index(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.current);
        }
        for axis in (0..self.shape.len()).rev() {
            self.current[axis] += 1;
            if self.current[axis] < self.shape[axis] {
                return Some(&self.current);
            }
            self.current[axis] = 0;
        }
        self.done = true;
        None
    }
}

pub(crate) fn strides(shape: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; shape.len()];
    for axis in (0..shape.len().saturating_sub(1)).rev() {
        strides[axis] = strides[axis + 1] * shape[axis + 1];
    }
    strides
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, try_from = "RawTable")]
pub struct JointTable {
    variables: Vec<VariableSpec>,
    probabilities: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTable {
    variables: Vec<VariableSpec>,
    probabilities: Vec<f64>,
}

impl TryFrom<RawTable> for JointTable {
    type Error = Error;

    fn try_from(raw: RawTable) -> Result<Self> {
        JointTable::new(raw.variables, raw.probabilities)
    }
}

impl JointTable {
    pub fn new(variables: Vec<VariableSpec>, probabilities: Vec<f64>) -> Result<Self> {
        Self::validate(&variables, &probabilities)?;
        Ok(JointTable {
            variables,
            probabilities,
        })
    }

    /// Checks every table invariant on raw parts.
    pub fn validate(variables: &[VariableSpec], probabilities: &[f64]) -> Result<()> {
        if variables.is_empty() {
            return Err(Error::ShapeMismatch("table has no variables".into()));
        }
        for v in variables {
            if v.support.len() < 2 {
                return Err(Error::ShapeMismatch(format!(
                    "variable `{}` has {} level(s); at least 2 are required",
                    v.name,
                    v.support.len()
                )));
            }
            v.check()?;
        }
        check_unique_names(variables.iter().map(|v| v.name.as_str()))?;
        let cells: usize = variables.iter().map(|v| v.len()).product();
        if cells != probabilities.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} probabilities for {} cells",
                probabilities.len(),
                cells
            )));
        }
        if let Some((index, &value)) = probabilities
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return Err(Error::NegativeMass { index, value });
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > EPS_PROB {
            return Err(Error::MassNotOne(total));
        }
        Ok(())
    }

    pub(crate) fn from_parts_unchecked(
        variables: Vec<VariableSpec>,
        probabilities: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(
            variables.iter().map(|v| v.len()).product::<usize>(),
            probabilities.len()
        );
        JointTable {
            variables,
            probabilities,
        }
    }

    pub fn variables(&self) -> &[VariableSpec] {
        &self.variables
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.variables.iter().map(|v| v.name.as_str())
    }

    pub fn shape(&self) -> Vec<usize> {
        self.variables.iter().map(|v| v.len()).collect()
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

    /// Probability of the cell at the given per-variable level indices.
    pub fn prob_at(&self, index: &[usize]) -> f64 {
        let strides = strides(&self.shape());
        let flat: usize = index.iter().zip(&strides).map(|(i, s)| i * s).sum();
        self.probabilities[flat]
    }

    /// Sums out every variable not in `axes`; the result keeps the order
    /// given in `axes`.
    pub(crate) fn project(&self, axes: &[usize]) -> JointTable {
        let shape = self.shape();
        let kept_shape: Vec<usize> = axes.iter().map(|&a| shape[a]).collect();
        let kept_strides = strides(&kept_shape);
        let mut out = vec![0.0; kept_shape.iter().product()];
        let mut cells = Odometer::new(&shape);
        let mut flat = 0;
        while let Some(idx) = cells.next_index() {
            let target: usize = axes
                .iter()
                .zip(&kept_strides)
                .map(|(&a, s)| idx[a] * s)
                .sum();
            out[target] += self.probabilities[flat];
            flat += 1;
        }
        let variables = axes.iter().map(|&a| self.variables[a].clone()).collect();
        JointTable::from_parts_unchecked(variables, out)
    }

    /// Marginal over `keep`, returned in the order the names are given.
    pub fn marginal_in_order(&self, keep: &[&str]) -> Result<JointTable> {
        if keep.is_empty() {
            return Err(Error::ShapeMismatch("nothing to keep".into()));
        }
        let axes = keep
            .iter()
            .map(|n| self.index_of(n))
            .collect::<Result<Vec<_>>>()?;
        check_unique_names(keep.iter().copied())?;
        Ok(self.project(&axes))
    }

    /// Marginal over `keep`; kept variables stay in table order.
    pub fn marginalize(&self, keep: &[&str]) -> Result<JointTable> {
        if keep.is_empty() {
            return Err(Error::ShapeMismatch("nothing to keep".into()));
        }
        for n in keep {
            self.index_of(n)?;
        }
        let axes: Vec<usize> = (0..self.variables.len())
            .filter(|&a| keep.contains(&self.variables[a].name.as_str()))
            .collect();
        Ok(self.project(&axes))
    }

    /// Distribution of the remaining variables given `evidence`
    /// (variable name, level value) pairs.
    pub fn condition(&self, evidence: &[(&str, f64)]) -> Result<JointTable> {
        let mut fixed = Vec::with_capacity(evidence.len());
        for &(name, level) in evidence {
            let axis = self.index_of(name)?;
            let li = self.variables[axis].level_index(level)?;
            fixed.push((axis, li));
        }
        self.condition_indices(&fixed)
    }

    pub(crate) fn condition_indices(&self, fixed: &[(usize, usize)]) -> Result<JointTable> {
        let free: Vec<usize> = (0..self.variables.len())
            .filter(|a| !fixed.iter().any(|(f, _)| f == a))
            .collect();
        if free.is_empty() {
            return Err(Error::ShapeMismatch("evidence fixes every variable".into()));
        }
        let shape = self.shape();
        let free_shape: Vec<usize> = free.iter().map(|&a| shape[a]).collect();
        let free_strides = strides(&free_shape);
        let mut out = vec![0.0; free_shape.iter().product()];
        let mut cells = Odometer::new(&shape);
        let mut flat = 0;
        while let Some(idx) = cells.next_index() {
            if fixed.iter().all(|&(a, l)| idx[a] == l) {
                let target: usize = free
                    .iter()
                    .zip(&free_strides)
                    .map(|(&a, s)| idx[a] * s)
                    .sum();
                out[target] += self.probabilities[flat];
            }
            flat += 1;
        }
        let mass: f64 = out.iter().sum();
        if mass <= EPS_PROB {
            return Err(Error::ZeroProbabilityEvidence);
        }
        out.iter_mut().for_each(|p| *p /= mass);
        let variables = free.iter().map(|&a| self.variables[a].clone()).collect();
        Ok(JointTable::from_parts_unchecked(variables, out))
    }

    /// Mass-preserving cdf of a single variable.
    pub fn cdf_of(&self, variable: &str) -> Result<Cdf> {
        cdf_of(self, variable)
    }

    pub fn total_mass(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cdf {
    support: Vec<f64>,
    cumulative: Vec<f64>,
}

impl Cdf {
    pub fn new(support: Vec<f64>, cumulative: Vec<f64>) -> Result<Self> {
        if support.len() != cumulative.len() || support.is_empty() {
            return Err(Error::ShapeMismatch(
                "support and cdf lengths differ".into(),
            ));
        }
        if cumulative.windows(2).any(|w| w[1] < w[0] - EPS_PROB) || cumulative[0] < -EPS_PROB {
            return Err(Error::ShapeMismatch("cdf is not non-decreasing".into()));
        }
        let last = *cumulative.last().expect("non-empty");
        if (last - 1.0).abs() > EPS_PROB {
            return Err(Error::MassNotOne(last));
        }
        Ok(Cdf {
            support,
            cumulative,
        })
    }

    pub fn from_pmf(support: Vec<f64>, pmf: &[f64]) -> Result<Self> {
        let cumulative = pmf
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect();
        Cdf::new(support, cumulative)
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }
}

pub fn cdf_of(table: &JointTable, variable: &str) -> Result<Cdf> {
    let axis = table.index_of(variable)?;
    let marginal = table.project(&[axis]);
    Cdf::from_pmf(
        table.variables[axis].support.clone(),
        marginal.probabilities(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DominanceOrder {
    Dominates,
    DominatedBy,
    Equal,
    Incomparable,
}

impl DominanceOrder {
    pub fn reverse(self) -> Self {
        match self {
            DominanceOrder::Dominates => DominanceOrder::DominatedBy,
            DominanceOrder::DominatedBy => DominanceOrder::Dominates,
            other => other,
        }
    }
}

/// First-order stochastic dominance of `f` over `g`: `f` dominates when its
/// cdf lies nowhere above `g`'s and strictly below it somewhere.
pub fn fsd_compare(f: &Cdf, g: &Cdf) -> Result<DominanceOrder> {
    if f.support.len() != g.support.len()
        || f.support
            .iter()
            .zip(&g.support)
            .any(|(a, b)| (a - b).abs() > EPS_PROB)
    {
        return Err(Error::SupportMismatch);
    }
    Ok(compare_cumulative(&f.cumulative, &g.cumulative))
}

pub(crate) fn compare_cumulative(f: &[f64], g: &[f64]) -> DominanceOrder {
    let below = f.iter().zip(g).any(|(a, b)| a < &(b - EPS_PROB));
    let above = f.iter().zip(g).any(|(a, b)| a > &(b + EPS_PROB));
    match (below, above) {
        (false, false) => DominanceOrder::Equal,
        (true, false) => DominanceOrder::Dominates,
        (false, true) => DominanceOrder::DominatedBy,
        (true, true) => DominanceOrder::Incomparable,
    }
}
