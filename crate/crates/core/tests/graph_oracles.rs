mod common;

use std::collections::HashMap;

use common::{random_qpn, subsets};
use qpn_core::{
    ci_deviation, markov_check, random_factorized_joint, trial_rng, JointTable, EPS_CI,
};

/// Every multi-index of `shape`, last axis fastest.
fn cells(shape: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &n in shape {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..n).map(move |k| {
                    let mut v = prefix.clone();
                    v.push(k);
                    v
                })
            })
            .collect();
    }
    out
}

/// Brute-force `max |p(a,b|z) - p(a|z)p(b|z)|` from the raw cells.
fn oracle_ci(table: &JointTable, a: usize, b: usize, z: &[usize]) -> f64 {
    let mut pabz: HashMap<(Vec<usize>, usize, usize), f64> = HashMap::new();
    let mut paz: HashMap<(Vec<usize>, usize), f64> = HashMap::new();
    let mut pbz: HashMap<(Vec<usize>, usize), f64> = HashMap::new();
    let mut pz: HashMap<Vec<usize>, f64> = HashMap::new();
    for idx in cells(&table.shape()) {
        let p = table.prob_at(&idx);
        let zk: Vec<usize> = z.iter().map(|&v| idx[v]).collect();
        *pabz.entry((zk.clone(), idx[a], idx[b])).or_default() += p;
        *paz.entry((zk.clone(), idx[a])).or_default() += p;
        *pbz.entry((zk.clone(), idx[b])).or_default() += p;
        *pz.entry(zk).or_default() += p;
    }
    let mut worst: f64 = 0.0;
    for ((zk, i, j), p) in &pabz {
        let m = pz[zk];
        if m <= 1e-9 {
            continue;
        }
        let d = p / m - paz[&(zk.clone(), *i)] / m * pbz[&(zk.clone(), *j)] / m;
        worst = worst.max(d.abs());
    }
    worst
}

#[test]
fn d_separation_matches_active_trail_enumeration() {
    for seed in 0..300 {
        let qpn = random_qpn(&mut trial_rng(11, seed), 6, 0.45);
        let names: Vec<&str> = qpn.variables().iter().map(|v| v.name.as_str()).collect();
        for (ia, a) in names.iter().enumerate() {
            for b in &names[ia + 1..] {
                let rest: Vec<&str> = names.iter().copied().filter(|n| n != a && n != b).collect();
                for given in subsets(&rest) {
                    let sep = qpn.d_separated(a, b, &given).unwrap();
                    assert_eq!(sep, qpn.d_separated(b, a, &given).unwrap());
                    let trails = qpn.active_trails(a, b, &given).unwrap();
                    assert_eq!(sep, trails.is_empty(), "seed {seed}: {a} {b} {given:?}");
                    for t in &trails {
                        assert_eq!(t.nodes.first().map(String::as_str), Some(*a));
                        assert_eq!(t.nodes.last().map(String::as_str), Some(*b));
                        let mut seen = t.nodes.clone();
                        seen.sort();
                        seen.dedup();
                        assert_eq!(seen.len(), t.nodes.len(), "trail repeats a node");
                        assert_eq!(t.steps.len() + 1, t.nodes.len());
                    }
                }
            }
        }
    }
}

#[test]
fn library_ci_deviation_matches_brute_force() {
    for seed in 0..20 {
        let qpn = random_qpn(&mut trial_rng(5, seed), 4, 0.5);
        let table = random_factorized_joint(qpn.dag(), &mut trial_rng(6, seed));
        let names: Vec<&str> = table.names().collect();
        let n = names.len();
        for a in 0..n {
            for b in a + 1..n {
                let rest: Vec<usize> = (0..n).filter(|&k| k != a && k != b).collect();
                for z in subsets(&rest) {
                    let zn: Vec<&str> = z.iter().map(|&k| names[k]).collect();
                    let lib = ci_deviation(&table, &[names[a]], &[names[b]], &zn).unwrap();
                    assert!((lib - oracle_ci(&table, a, b, &z)).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn d_separation_implies_numeric_independence() {
    let mut separated = 0;
    let mut connected = 0;
    for seed in 0..50 {
        let qpn = random_qpn(&mut trial_rng(3, seed), 5, 0.5);
        let table = random_factorized_joint(qpn.dag(), &mut trial_rng(4, seed));
        assert!(markov_check(&table, qpn.dag()).unwrap().is_empty());
        let names: Vec<&str> = table.names().collect();
        let n = names.len();
        for a in 0..n {
            for b in a + 1..n {
                let rest: Vec<usize> = (0..n).filter(|&k| k != a && k != b).collect();
                for z in subsets(&rest) {
                    let zn: Vec<&str> = z.iter().map(|&k| names[k]).collect();
                    let dev = oracle_ci(&table, a, b, &z);
                    if qpn.d_separated(names[a], names[b], &zn).unwrap() {
                        separated += 1;
                        assert!(dev <= EPS_CI, "seed {seed}: deviation {dev}");
                    } else {
                        // Random conditionals are faithful almost surely.
                        connected += 1;
                        assert!(dev > 1e-9, "seed {seed}: connected pair looks independent");
                    }
                }
            }
        }
    }
    assert!(separated > 50 && connected > 50);
}
