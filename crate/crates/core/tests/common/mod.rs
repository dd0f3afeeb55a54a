#![allow(dead_code)]

use qpn_core::{simplex, JointTable, Qpn, Sign, SignedEdge, VariableSpec};
use rand::Rng;

pub fn levels(name: &str, n: usize) -> VariableSpec {
    VariableSpec::new(name, (1..=n).map(|k| k as f64).collect()).unwrap()
}

/// Random DAG on `2..=max_nodes` nodes named `V0, V1, ...` with supports of
/// size 2 or 3. Edges only go from lower to higher index.
pub fn random_qpn<R: Rng>(rng: &mut R, max_nodes: usize, edge_prob: f64) -> Qpn {
    let n = rng.random_range(2..=max_nodes);
    let vars = (0..n)
        .map(|i| levels(&format!("V{i}"), rng.random_range(2..=3)))
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(edge_prob) {
                let sign = [Sign::Plus, Sign::Minus, Sign::Question][rng.random_range(0..3)];
                edges.push(SignedEdge::new(format!("V{i}"), format!("V{j}"), sign));
            }
        }
    }
    Qpn::new(vars, edges).unwrap()
}

/// All subsets of `items`, smallest first.
pub fn subsets<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    (0u32..1 << items.len())
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(k, _)| mask & (1 << k) != 0)
                .map(|(_, x)| x.clone())
                .collect()
        })
        .collect()
}

/// Conditional pmfs of a child given each parent level whose cdfs are
/// pointwise ordered: non-increasing in the parent level for `+`,
/// non-decreasing for `-`.
pub fn monotone_slices<R: Rng>(
    rng: &mut R,
    parent_n: usize,
    child_n: usize,
    sign: Sign,
) -> Vec<Vec<f64>> {
    let cdfs: Vec<Vec<f64>> = (0..parent_n)
        .map(|_| {
            let pmf = simplex(rng, child_n);
            pmf.iter()
                .scan(0.0, |acc, p| {
                    *acc += p;
                    Some(*acc)
                })
                .collect()
        })
        .collect();
    let mut sorted = cdfs.clone();
    for k in 0..child_n {
        let mut column: Vec<f64> = cdfs.iter().map(|c| c[k]).collect();
        column.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if sign == Sign::Plus {
            column.reverse();
        }
        for (row, v) in sorted.iter_mut().zip(column) {
            row[k] = v;
        }
    }
    sorted
        .iter()
        .map(|cdf| {
            let mut prev = 0.0;
            cdf.iter()
                .enumerate()
                .map(|(k, &c)| {
                    let c = if k + 1 == child_n { 1.0 } else { c };
                    let p = (c - prev).max(0.0);
                    prev = c;
                    p
                })
                .collect()
        })
        .collect()
}

/// Positive bivariate table over `X, Y` built as the joint of `nx × ny`
/// entries `exp(theta * x * y) u_x v_y`, which is TP2 for `theta >= 0`.
pub fn tp2_table<R: Rng>(rng: &mut R, nx: usize, ny: usize) -> JointTable {
    let theta: f64 = rng.random_range(0.0..2.0);
    let u = simplex(rng, nx);
    let v = simplex(rng, ny);
    let mut probs: Vec<f64> = u
        .iter()
        .enumerate()
        .flat_map(|(x, ux)| {
            v.iter()
                .enumerate()
                .map(move |(y, vy)| (theta * x as f64 * y as f64).exp() * (ux + 1e-3) * (vy + 1e-3))
        })
        .collect();
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    JointTable::new(vec![levels("X", nx), levels("Y", ny)], probs).unwrap()
}

/// Uniformly random bivariate table over `X, Y`.
pub fn random_table<R: Rng>(rng: &mut R, nx: usize, ny: usize) -> JointTable {
    JointTable::new(
        vec![levels("X", nx), levels("Y", ny)],
        simplex(rng, nx * ny),
    )
    .unwrap()
}

/// Whether `hi` first-order dominates-or-equals `lo` within `eps`.
pub fn weakly_dominates(hi: &[f64], lo: &[f64], eps: f64) -> bool {
    let cum = |p: &[f64]| -> Vec<f64> {
        p.iter()
            .scan(0.0, |acc, x| {
                *acc += x;
                Some(*acc)
            })
            .collect()
    };
    cum(hi).iter().zip(cum(lo)).all(|(a, b)| *a <= b + eps)
}
