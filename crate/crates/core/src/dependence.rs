//! Pairwise positive-dependence checks on joint tables.
//!
//! Influence (FSD of conditional cdfs) is directional: `X` may positively
//! influence `Y` while `Y` does not positively influence `X`. The monotone
//! likelihood ratio property, TP2 and association are symmetric. For binary
//! pairs all of them coincide.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::dist::{
    compare_cumulative, DominanceOrder, JointTable, Odometer, VariableSpec, EPS_PROB,
};
use crate::error::{Error, Result};
use crate::sampling::{simplex, trial_rng};

/// Level assignment for a set of variables, keyed by name.
pub type Assignment = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Influence {
    Positive,
    Negative,
    Zero,
    Ambiguous,
}

impl Influence {
    pub fn is_positive_or_zero(self) -> bool {
        matches!(self, Influence::Positive | Influence::Zero)
    }

    pub fn is_negative_or_zero(self) -> bool {
        matches!(self, Influence::Negative | Influence::Zero)
    }
}

/// One comparison of `cdf(j | higher, context)` against
/// `cdf(j | lower, context)`, pinned to a support point of `j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceWitness {
    pub context: Assignment,
    pub higher: f64,
    pub lower: f64,
    pub order: DominanceOrder,
    pub point: f64,
    pub higher_cdf: f64,
    pub lower_cdf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfluenceVerdict {
    pub verdict: Influence,
    pub witness: Option<DominanceWitness>,
    /// Conditioning cells `(x_i, x_K)` with no probability mass.
    pub skipped_contexts: Vec<Assignment>,
}

/// Classifies how `i` influences `j` given `context`.
///
/// Pairs of levels of `i` are scanned context by context, lower level from
/// the top of the support downwards and higher level upwards from it. An
/// ambiguous verdict carries the first pair that is incomparable or that
/// contradicts the direction set by an earlier strict pair.
pub fn influence_sign(
    table: &JointTable,
    i: &str,
    j: &str,
    context: &[&str],
) -> Result<InfluenceVerdict> {
    influence_impl(table, i, j, context, false)
}

/// Like [`influence_sign`], but a Positive or Negative verdict also carries
/// its first strict dominance pair as witness.
pub fn influence_sign_explained(
    table: &JointTable,
    i: &str,
    j: &str,
    context: &[&str],
) -> Result<InfluenceVerdict> {
    influence_impl(table, i, j, context, true)
}

#[derive(Clone, Copy, PartialEq)]
enum Reference {
    Up,
    Down,
}

fn first_point(high: &[f64], low: &[f64], reference: Reference) -> usize {
    // First support point where the pair breaks (or, for a strict pair,
    // realises) the given direction.
    high.iter()
        .zip(low)
        .position(|(h, l)| match reference {
            Reference::Up => *h > l + EPS_PROB,
            Reference::Down => *h < l - EPS_PROB,
        })
        .unwrap_or(0)
}

fn influence_impl(
    table: &JointTable,
    i: &str,
    j: &str,
    context: &[&str],
    explain: bool,
) -> Result<InfluenceVerdict> {
    table.index_of(i)?;
    table.index_of(j)?;
    if i == j {
        return Err(Error::ContextOverlap(i.to_string()));
    }
    for k in context {
        table.index_of(k)?;
        if *k == i || *k == j {
            return Err(Error::ContextOverlap(k.to_string()));
        }
    }
    let mut order: Vec<&str> = context.to_vec();
    order.push(i);
    order.push(j);
    let marg = table.marginal_in_order(&order)?;
    let vars = marg.variables();
    let k = context.len();
    let (var_i, var_j) = (&vars[k], &vars[k + 1]);
    let (ni, nj) = (var_i.len(), var_j.len());
    let context_shape: Vec<usize> = vars[..k].iter().map(VariableSpec::len).collect();
    let probs = marg.probabilities();

    let assignment = |idx: &[usize]| -> Assignment {
        vars[..k]
            .iter()
            .zip(idx)
            .map(|(v, &l)| (v.name.clone(), v.support[l]))
            .collect()
    };

    let mut skipped = Vec::new();
    let mut reference: Option<Reference> = None;
    let mut offending: Option<DominanceWitness> = None;
    let mut first_strict: Option<DominanceWitness> = None;
    let (mut any_up, mut any_down) = (false, false);

    let mut contexts = Odometer::new(&context_shape);
    let mut block = 0;
    while let Some(ctx) = contexts.next_index() {
        let base = block * ni * nj;
        block += 1;
        let cdfs: Vec<Option<Vec<f64>>> = (0..ni)
            .map(|xi| {
                let row = &probs[base + xi * nj..base + (xi + 1) * nj];
                let mass: f64 = row.iter().sum();
                (mass > EPS_PROB).then(|| {
                    row.iter()
                        .scan(0.0, |acc, p| {
                            *acc += p / mass;
                            Some(*acc)
                        })
                        .collect()
                })
            })
            .collect();
        for (xi, cdf) in cdfs.iter().enumerate() {
            if cdf.is_none() {
                let mut cell = assignment(ctx);
                cell.insert(var_i.name.clone(), var_i.support[xi]);
                skipped.push(cell);
            }
        }

        for lower in (0..ni).rev() {
            let Some(low) = &cdfs[lower] else { continue };
            for (higher, high) in cdfs.iter().enumerate().skip(lower + 1) {
                let Some(high) = high else { continue };
                let ord = compare_cumulative(high, low);
                let witness = |reference: Reference| {
                    let p = first_point(high, low, reference);
                    DominanceWitness {
                        context: assignment(ctx),
                        higher: var_i.support[higher],
                        lower: var_i.support[lower],
                        order: ord,
                        point: var_j.support[p],
                        higher_cdf: high[p],
                        lower_cdf: low[p],
                    }
                };
                match ord {
                    DominanceOrder::Equal => {}
                    DominanceOrder::Dominates => {
                        any_up = true;
                        match reference {
                            Some(Reference::Down) if offending.is_none() => {
                                offending = Some(witness(Reference::Up));
                            }
                            None => {
                                reference = Some(Reference::Up);
                                first_strict = Some(witness(Reference::Down));
                            }
                            _ => {}
                        }
                    }
                    DominanceOrder::DominatedBy => {
                        any_down = true;
                        match reference {
                            Some(Reference::Up) if offending.is_none() => {
                                offending = Some(witness(Reference::Down));
                            }
                            None => {
                                reference = Some(Reference::Down);
                                first_strict = Some(witness(Reference::Up));
                            }
                            _ => {}
                        }
                    }
                    DominanceOrder::Incomparable => {
                        if offending.is_none() {
                            offending = Some(witness(match reference {
                                Some(Reference::Down) => Reference::Down,
                                _ => Reference::Up,
                            }));
                        }
                    }
                }
            }
        }
    }

    let (verdict, witness) = if offending.is_some() {
        (Influence::Ambiguous, offending)
    } else if any_up {
        (Influence::Positive, first_strict.filter(|_| explain))
    } else if any_down {
        (Influence::Negative, first_strict.filter(|_| explain))
    } else {
        (Influence::Zero, None)
    };
    debug_assert!(!(any_up && any_down) || verdict == Influence::Ambiguous);
    Ok(InfluenceVerdict {
        verdict,
        witness,
        skipped_contexts: skipped,
    })
}

/// Joint pmf of `(x, y)` as `grid[x][y]` plus the two variables.
fn bivariate(
    table: &JointTable,
    x: &str,
    y: &str,
) -> Result<(VariableSpec, VariableSpec, Vec<Vec<f64>>)> {
    if x == y {
        return Err(Error::DuplicateVariable(x.to_string()));
    }
    let marg = table.marginal_in_order(&[x, y])?;
    let (vx, vy) = (marg.variables()[0].clone(), marg.variables()[1].clone());
    let grid = marg
        .probabilities()
        .chunks(vy.len())
        .map(<[f64]>::to_vec)
        .collect();
    Ok((vx, vy, grid))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MlrpWitness {
    pub x_high: f64,
    pub x_low: f64,
    pub y_high: f64,
    pub y_low: f64,
    /// `p(x_high | y_high) / p(x_high | y_low)`
    pub ratio_high: f64,
    /// `p(x_low | y_high) / p(x_low | y_low)`
    pub ratio_low: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MlrpReport {
    pub holds: bool,
    pub witness: Option<MlrpWitness>,
}

/// Monotone likelihood ratio check on the conditional `p(x | y)`.
///
/// The ratio `p(x|y) / p(x|y')` must be non-decreasing in `x` for every
/// `y > y'`. Where a denominator vanishes the inequality is compared with
/// denominators cleared.
pub fn mlrp_check(table: &JointTable, x: &str, y: &str) -> Result<MlrpReport> {
    let (vx, vy, grid) = bivariate(table, x, y)?;
    let (nx, ny) = (vx.len(), vy.len());
    let col_mass: Vec<f64> = (0..ny).map(|b| (0..nx).map(|a| grid[a][b]).sum()).collect();
    if let Some(b) = col_mass.iter().position(|&m| m <= EPS_PROB) {
        return Err(Error::ZeroColumn {
            variable: vy.name.clone(),
            level: vy.support[b],
        });
    }
    let cond = |a: usize, b: usize| grid[a][b] / col_mass[b];

    for yl in (0..ny).rev() {
        for yh in yl + 1..ny {
            for xh in (0..nx).rev() {
                for xl in 0..xh {
                    let (num_h, den_h) = (cond(xh, yh), cond(xh, yl));
                    let (num_l, den_l) = (cond(xl, yh), cond(xl, yl));
                    let violated = if den_h > 0.0 && den_l > 0.0 {
                        num_h / den_h < num_l / den_l - EPS_PROB
                    } else {
                        num_h * den_l < num_l * den_h - EPS_PROB
                    };
                    if violated {
                        return Ok(MlrpReport {
                            holds: false,
                            witness: Some(MlrpWitness {
                                x_high: vx.support[xh],
                                x_low: vx.support[xl],
                                y_high: vy.support[yh],
                                y_low: vy.support[yl],
                                ratio_high: num_h / den_h,
                                ratio_low: num_l / den_l,
                            }),
                        });
                    }
                }
            }
        }
    }
    Ok(MlrpReport {
        holds: true,
        witness: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tp2Witness {
    pub x_low: f64,
    pub x_high: f64,
    pub y_low: f64,
    pub y_high: f64,
    /// `p(x_low, y_high) * p(x_high, y_low)`
    pub discordant: f64,
    /// `p(x_low, y_low) * p(x_high, y_high)`
    pub concordant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tp2Report {
    pub holds: bool,
    pub witness: Option<Tp2Witness>,
}

/// Total positivity of order two: `p(x,y')p(x',y) <= p(x,y)p(x',y')` for all
/// `x < x'`, `y < y'`.
pub fn tp2_check(table: &JointTable, x: &str, y: &str) -> Result<Tp2Report> {
    let (vx, vy, grid) = bivariate(table, x, y)?;
    let (nx, ny) = (vx.len(), vy.len());
    for yl in (0..ny).rev() {
        for yh in yl + 1..ny {
            for xh in (0..nx).rev() {
                for xl in 0..xh {
                    let discordant = grid[xl][yh] * grid[xh][yl];
                    let concordant = grid[xl][yl] * grid[xh][yh];
                    if discordant > concordant + EPS_PROB {
                        return Ok(Tp2Report {
                            holds: false,
                            witness: Some(Tp2Witness {
                                x_low: vx.support[xl],
                                x_high: vx.support[xh],
                                y_low: vy.support[yl],
                                y_high: vy.support[yh],
                                discordant,
                                concordant,
                            }),
                        });
                    }
                }
            }
        }
    }
    Ok(Tp2Report {
        holds: true,
        witness: None,
    })
}

/// Upper-set enumeration refuses grids with more than this many upper sets.
pub const MAX_UPPER_SETS: u128 = 1_000_000;

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssociationWitness {
    /// Cells `(x, y)` of the first upper set.
    pub u: Vec<(f64, f64)>,
    pub v: Vec<(f64, f64)>,
    pub p_intersection: f64,
    pub p_u: f64,
    pub p_v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssociationReport {
    pub holds: bool,
    pub witness: Option<AssociationWitness>,
}

/// Upper sets of an `nx × ny` grid as row thresholds: row `x` contains the
/// cells with `y >= t[x]` (`t[x] == ny` means none), and `t` is
/// non-increasing in `x`. Generated from the top row down.
fn upper_set_thresholds(nx: usize, ny: usize) -> Vec<Vec<usize>> {
    fn fill(row: usize, floor: usize, ny: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        for t in floor..=ny {
            cur[row] = t;
            if row == 0 {
                out.push(cur.clone());
            } else {
                fill(row - 1, t, ny, cur, out);
            }
        }
    }
    let mut out = Vec::new();
    let mut cur = vec![0; nx];
    fill(nx - 1, 0, ny, &mut cur, &mut out);
    out
}

/// Association of `(x, y)`: `cov(f, g) >= 0` for all non-decreasing `f, g`.
///
/// Bounded non-decreasing functions on a finite grid are non-negative
/// combinations of upper-set indicators plus constants, so it suffices to
/// check `P(U ∩ V) >= P(U) P(V)` over pairs of upper sets.
pub fn association_check(table: &JointTable, x: &str, y: &str) -> Result<AssociationReport> {
    let (vx, vy, grid) = bivariate(table, x, y)?;
    let (nx, ny) = (vx.len(), vy.len());
    let count = binomial((nx + ny) as u128, nx as u128);
    if count > MAX_UPPER_SETS {
        return Err(Error::SupportTooLarge { count });
    }
    let sets = upper_set_thresholds(nx, ny);
    debug_assert_eq!(sets.len() as u128, count);
    let mass = |t: &[usize]| -> f64 { (0..nx).map(|a| grid[a][t[a]..].iter().sum::<f64>()).sum() };
    let masses: Vec<f64> = sets.iter().map(|t| mass(t)).collect();
    let cells = |t: &[usize]| -> Vec<(f64, f64)> {
        (0..nx)
            .flat_map(|a| (t[a]..ny).map(move |b| (a, b)))
            .map(|(a, b)| (vx.support[a], vy.support[b]))
            .collect()
    };

    for (ui, u) in sets.iter().enumerate() {
        for (vi, v) in sets.iter().enumerate().skip(ui) {
            // Intersection of upper sets is the upper set of the pointwise
            // maximum threshold.
            let meet: Vec<usize> = u.iter().zip(v).map(|(a, b)| *a.max(b)).collect();
            let p_meet = mass(&meet);
            if p_meet < masses[ui] * masses[vi] - EPS_PROB {
                return Ok(AssociationReport {
                    holds: false,
                    witness: Some(AssociationWitness {
                        u: cells(u),
                        v: cells(v),
                        p_intersection: p_meet,
                        p_u: masses[ui],
                        p_v: masses[vi],
                    }),
                });
            }
        }
    }
    Ok(AssociationReport {
        holds: true,
        witness: None,
    })
}

/// A conditional table `p(x | y)`; `columns[b][a] = p(x = a | y = b)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Likelihood {
    x: VariableSpec,
    y: VariableSpec,
    columns: Vec<Vec<f64>>,
}

impl Likelihood {
    pub fn new(x: VariableSpec, y: VariableSpec, columns: Vec<Vec<f64>>) -> Result<Self> {
        x.check()?;
        y.check()?;
        if x.name == y.name {
            return Err(Error::DuplicateVariable(x.name));
        }
        if columns.len() != y.len() || columns.iter().any(|c| c.len() != x.len()) {
            return Err(Error::ShapeMismatch(format!(
                "likelihood needs {} columns of length {}",
                y.len(),
                x.len()
            )));
        }
        for col in &columns {
            if let Some((index, &value)) = col
                .iter()
                .enumerate()
                .find(|(_, p)| p.is_nan() || **p < 0.0)
            {
                return Err(Error::NegativeMass { index, value });
            }
            let total: f64 = col.iter().sum();
            if (total - 1.0).abs() > EPS_PROB {
                return Err(Error::MassNotOne(total));
            }
        }
        Ok(Likelihood { x, y, columns })
    }

    /// The conditional `p(x | y)` of a joint table.
    pub fn from_joint(table: &JointTable, x: &str, y: &str) -> Result<Self> {
        let (vx, vy, grid) = bivariate(table, x, y)?;
        let columns = (0..vy.len())
            .map(|b| {
                let col: Vec<f64> = (0..vx.len()).map(|a| grid[a][b]).collect();
                let mass: f64 = col.iter().sum();
                if mass <= EPS_PROB {
                    return Err(Error::ZeroColumn {
                        variable: vy.name.clone(),
                        level: vy.support[b],
                    });
                }
                Ok(col.into_iter().map(|p| p / mass).collect())
            })
            .collect::<Result<Vec<Vec<f64>>>>()?;
        Likelihood::new(vx, vy, columns)
    }

    pub fn x(&self) -> &VariableSpec {
        &self.x
    }

    pub fn y(&self) -> &VariableSpec {
        &self.y
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    /// Joint over `[x, y]` induced by a prior on `y`.
    pub fn joint(&self, prior: &[f64]) -> Result<JointTable> {
        if prior.len() != self.y.len() {
            return Err(Error::ShapeMismatch(format!(
                "prior has {} entries, `{}` has {} levels",
                prior.len(),
                self.y.name,
                self.y.len()
            )));
        }
        let probs = (0..self.x.len())
            .flat_map(|a| (0..self.y.len()).map(move |b| (a, b)))
            .map(|(a, b)| self.columns[b][a] * prior[b])
            .collect();
        JointTable::new(vec![self.x.clone(), self.y.clone()], probs)
    }

    pub fn is_mlrp(&self) -> bool {
        let uniform = vec![1.0 / self.y.len() as f64; self.y.len()];
        let joint = self.joint(&uniform).expect("uniform prior is valid");
        mlrp_check(&joint, &self.x.name, &self.y.name)
            .map(|r| r.holds)
            .unwrap_or(false)
    }
}

/// Forward direction of the likelihood-ratio characterisation: with an MLRP
/// likelihood every prior yields a non-negative influence both ways.
pub fn prop1_forward(likelihood: &Likelihood, priors: &[Vec<f64>]) -> Result<bool> {
    if !likelihood.is_mlrp() {
        return Err(Error::NotMlrp);
    }
    let (x, y) = (likelihood.x.name.as_str(), likelihood.y.name.as_str());
    for prior in priors {
        let joint = likelihood.joint(prior)?;
        let xy = influence_sign(&joint, x, y, &[])?.verdict;
        let yx = influence_sign(&joint, y, x, &[])?.verdict;
        if !xy.is_positive_or_zero() || !yx.is_positive_or_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Searches random priors on `y` for one under which `x` does not
/// positively influence `y`. Deterministic in `seed`; the returned prior is
/// the first success in trial order.
pub fn prop1_witness_search(
    likelihood: &Likelihood,
    seed: u64,
    trials: u64,
) -> Result<Option<Vec<f64>>> {
    if likelihood.is_mlrp() {
        return Err(Error::IsMlrp);
    }
    let (x, y) = (likelihood.x.name.as_str(), likelihood.y.name.as_str());
    let ny = likelihood.y.len();
    let found = (0..trials).into_par_iter().find_map_first(|t| {
        let prior = simplex(&mut trial_rng(seed, t), ny);
        let joint = likelihood.joint(&prior).ok()?;
        let verdict = influence_sign(&joint, x, y, &[]).ok()?.verdict;
        (verdict != Influence::Positive).then_some(prior)
    });
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: &[&[f64]]) -> JointTable {
        let x = VariableSpec::new("X", (1..=rows.len()).map(|k| k as f64).collect()).unwrap();
        let y = VariableSpec::new("Y", (1..=rows[0].len()).map(|k| k as f64).collect()).unwrap();
        JointTable::new(vec![x, y], rows.concat()).unwrap()
    }

    fn table1() -> JointTable {
        table(&[&[0.2, 0.05, 0.075], &[0.15, 0.15, 0.1], &[0.075, 0.1, 0.1]])
    }

    fn product() -> JointTable {
        let px = [0.2, 0.5, 0.3];
        let py = [0.6, 0.1, 0.3];
        let rows: Vec<Vec<f64>> = px
            .iter()
            .map(|a| py.iter().map(|b| a * b).collect())
            .collect();
        let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
        table(&refs)
    }

    #[test]
    fn table1_influence_is_asymmetric() {
        let fwd = influence_sign(&table1(), "X", "Y", &[]).unwrap();
        assert_eq!(fwd.verdict, Influence::Positive);
        assert!(fwd.witness.is_none());
        let rev = influence_sign(&table1(), "Y", "X", &[]).unwrap();
        assert_eq!(rev.verdict, Influence::Ambiguous);
        let w = rev.witness.unwrap();
        assert_eq!((w.higher, w.lower, w.point), (3.0, 2.0, 1.0));
        assert_eq!(w.order, DominanceOrder::Incomparable);
        // cdf(X | Y=3)(1) = 0.075/0.275, cdf(X | Y=2)(1) = 0.05/0.3
        assert!((w.higher_cdf - 0.075 / 0.275).abs() < 1e-12);
        assert!((w.lower_cdf - 0.05 / 0.3).abs() < 1e-12);
    }

    #[test]
    fn explained_positive_carries_strict_pair() {
        let v = influence_sign_explained(&table1(), "X", "Y", &[]).unwrap();
        let w = v.witness.unwrap();
        assert_eq!(w.order, DominanceOrder::Dominates);
        assert!(w.higher_cdf < w.lower_cdf);
    }

    #[test]
    fn independence_is_zero() {
        let v = influence_sign(&product(), "X", "Y", &[]).unwrap();
        assert_eq!(v.verdict, Influence::Zero);
        assert_eq!(
            influence_sign(&product(), "Y", "X", &[]).unwrap().verdict,
            Influence::Zero
        );
    }

    #[test]
    fn negative_influence() {
        let t = table(&[&[0.1, 0.4], &[0.4, 0.1]]);
        assert_eq!(
            influence_sign(&t, "X", "Y", &[]).unwrap().verdict,
            Influence::Negative
        );
    }

    #[test]
    fn zero_mass_rows_are_skipped() {
        let t = table(&[&[0.5, 0.0], &[0.0, 0.0], &[0.0, 0.5]]);
        let v = influence_sign(&t, "X", "Y", &[]).unwrap();
        assert_eq!(v.verdict, Influence::Positive);
        assert_eq!(v.skipped_contexts.len(), 1);
        assert_eq!(v.skipped_contexts[0]["X"], 2.0);
    }

    #[test]
    fn overlapping_context_is_rejected() {
        assert!(matches!(
            influence_sign(&table1(), "X", "Y", &["X"]),
            Err(Error::ContextOverlap(_))
        ));
        assert!(matches!(
            influence_sign(&table1(), "X", "Z", &[]),
            Err(Error::UnknownVariable(_))
        ));
    }

    #[test]
    fn table1_mlrp_witness_matches_reported_ratios() {
        let r = mlrp_check(&table1(), "X", "Y").unwrap();
        assert!(!r.holds);
        let w = r.witness.unwrap();
        assert_eq!((w.x_high, w.x_low, w.y_high, w.y_low), (3.0, 1.0, 3.0, 2.0));
        // (0.1/0.275)/(0.1/0.3) and (0.075/0.275)/(0.05/0.3)
        assert!((w.ratio_high - 1.0909).abs() < 1e-3);
        assert!((w.ratio_low - 1.6364).abs() < 1e-3);
    }

    #[test]
    fn mlrp_and_tp2_small_cases() {
        let strong = table(&[&[0.4, 0.1], &[0.1, 0.4]]);
        assert!(mlrp_check(&strong, "X", "Y").unwrap().holds);
        assert!(tp2_check(&strong, "X", "Y").unwrap().holds);
        assert!(mlrp_check(&product(), "X", "Y").unwrap().holds);
        assert!(tp2_check(&product(), "X", "Y").unwrap().holds);
        assert!(!tp2_check(&table1(), "X", "Y").unwrap().holds);
    }

    #[test]
    fn mlrp_zero_column_is_reported() {
        let t = table(&[&[0.5, 0.0], &[0.5, 0.0]]);
        assert!(matches!(
            mlrp_check(&t, "X", "Y"),
            Err(Error::ZeroColumn { level, .. }) if level == 2.0
        ));
    }

    #[test]
    fn table1_tp2_agrees_with_brute_force() {
        let t = table1();
        let p = |a: usize, b: usize| t.prob_at(&[a, b]);
        let mut brute = true;
        for a in 0..3 {
            for a2 in a + 1..3 {
                for b in 0..3 {
                    for b2 in b + 1..3 {
                        if p(a, b2) * p(a2, b) > p(a, b) * p(a2, b2) {
                            brute = false;
                        }
                    }
                }
            }
        }
        assert_eq!(tp2_check(&t, "X", "Y").unwrap().holds, brute);
        assert!(!brute);
    }

    /// Independent oracle: every subset of the grid, kept if upward closed.
    fn association_brute_force(t: &JointTable) -> bool {
        let (nx, ny) = (t.variables()[0].len(), t.variables()[1].len());
        let n = nx * ny;
        let cell = |k: usize| (k / ny, k % ny);
        let uppers: Vec<u32> = (0u32..1 << n)
            .filter(|&mask| {
                (0..n).all(|k| {
                    if mask & (1 << k) == 0 {
                        return true;
                    }
                    let (a, b) = cell(k);
                    (0..n).all(|m| {
                        let (a2, b2) = cell(m);
                        !(a2 >= a && b2 >= b) || mask & (1 << m) != 0
                    })
                })
            })
            .collect();
        assert_eq!(
            uppers.len(),
            binomial((nx + ny) as u128, nx as u128) as usize
        );
        let prob = |mask: u32| -> f64 {
            (0..n)
                .filter(|k| mask & (1 << k) != 0)
                .map(|k| t.probabilities()[k])
                .sum()
        };
        uppers.iter().all(|&u| {
            uppers
                .iter()
                .all(|&v| prob(u & v) >= prob(u) * prob(v) - EPS_PROB)
        })
    }

    #[test]
    fn association_cases() {
        assert_eq!(upper_set_thresholds(3, 3).len(), 20);
        assert!(association_check(&table1(), "X", "Y").unwrap().holds);
        assert!(association_brute_force(&table1()));
        assert!(association_check(&product(), "X", "Y").unwrap().holds);

        let anti = table(&[&[0.1, 0.4], &[0.4, 0.1]]);
        let r = association_check(&anti, "X", "Y").unwrap();
        assert!(!r.holds);
        assert!(!association_brute_force(&anti));
        let w = r.witness.unwrap();
        assert_eq!(w.u, vec![(2.0, 1.0), (2.0, 2.0)]);
        assert_eq!(w.v, vec![(1.0, 2.0), (2.0, 2.0)]);
        assert!((w.p_intersection - 0.1).abs() < 1e-12);
        assert!((w.p_u * w.p_v - 0.25).abs() < 1e-12);
    }

    #[test]
    fn association_guard() {
        let n = 12;
        let x = VariableSpec::with_levels("X", n).unwrap();
        let y = VariableSpec::with_levels("Y", n).unwrap();
        let t = JointTable::new(vec![x, y], vec![1.0 / (n * n) as f64; n * n]).unwrap();
        assert!(matches!(
            association_check(&t, "X", "Y"),
            Err(Error::SupportTooLarge { count: 2_704_156 })
        ));
    }

    fn table1_likelihood() -> Likelihood {
        Likelihood::from_joint(&table1(), "X", "Y").unwrap()
    }

    #[test]
    fn table1_likelihood_is_not_mlrp() {
        let lik = table1_likelihood();
        assert!(!lik.is_mlrp());
        assert_eq!(
            prop1_forward(&lik, &[vec![0.3, 0.3, 0.4]]),
            Err(Error::NotMlrp)
        );
    }

    #[test]
    fn identity_likelihood_forward() {
        let x = VariableSpec::with_levels("X", 3).unwrap();
        let y = VariableSpec::with_levels("Y", 3).unwrap();
        let cols = (0..3)
            .map(|b| (0..3).map(|a| if a == b { 1.0 } else { 0.0 }).collect())
            .collect();
        let lik = Likelihood::new(x, y, cols).unwrap();
        assert!(prop1_forward(&lik, &[vec![0.2, 0.5, 0.3], vec![0.7, 0.2, 0.1]]).unwrap());
    }

    #[test]
    fn witness_search_finds_reverifiable_prior() {
        let lik = table1_likelihood();
        let prior = prop1_witness_search(&lik, 42, 10_000)
            .unwrap()
            .expect("a prior exists");
        let joint = lik.joint(&prior).unwrap();
        assert_ne!(
            influence_sign(&joint, "X", "Y", &[]).unwrap().verdict,
            Influence::Positive
        );
        assert_eq!(prop1_witness_search(&lik, 42, 10_000).unwrap(), Some(prior));
        assert_eq!(prop1_witness_search(&lik, 42, 0).unwrap(), None);
    }

    #[test]
    fn witness_search_refuses_mlrp_likelihood() {
        let lik = Likelihood::from_joint(&table(&[&[0.4, 0.1], &[0.1, 0.4]]), "X", "Y").unwrap();
        assert_eq!(prop1_witness_search(&lik, 1, 10), Err(Error::IsMlrp));
    }
}
