//! Shared generators and brute-force reference implementations. Everything
//! here works on plain vectors and recomputes every quantity from its
//! defining formula, without calling into the library's scoring code.

#![allow(dead_code, clippy::needless_range_loop)]

use fcssc_core::FuzzyDecisionSystem;
use ndarray::Array2;
use rand::Rng;

/// Random normalized system with every class nonempty.
pub fn random_fds(rng: &mut impl Rng, n: usize, m: usize, c: usize) -> FuzzyDecisionSystem {
    assert!(n >= c && c >= 1);
    let samples = Array2::from_shape_fn((n, m), |_| rng.random::<f64>());
    let labels: Vec<usize> = (0..n)
        .map(|i| if i < c { i } else { rng.random_range(0..c) })
        .collect();
    let names = (0..m).map(|a| format!("f{a}")).collect();
    FuzzyDecisionSystem::new(samples, names, &labels).unwrap()
}

pub fn rows(fds: &FuzzyDecisionSystem) -> Vec<Vec<f64>> {
    fds.samples()
        .rows()
        .into_iter()
        .map(|r| r.to_vec())
        .collect()
}

/// `(DIC, DIS, GS)` straight from the definitions.
pub fn oracle_gs(x: &[Vec<f64>], labels: &[usize], subset: &[usize]) -> (f64, f64, f64) {
    let n = x.len();
    let c = labels.iter().max().unwrap() + 1;
    let members: Vec<Vec<usize>> = (0..c)
        .map(|i| (0..n).filter(|&k| labels[k] == i).collect())
        .collect();

    let mean = |i: usize, a: usize| {
        members[i].iter().map(|&k| x[k][a]).sum::<f64>() / members[i].len() as f64
    };
    let dist = |k: usize, i: usize| {
        subset
            .iter()
            .map(|&a| (x[k][a] - mean(i, a)).powi(2))
            .sum::<f64>()
            .sqrt()
    };

    let mut u = vec![vec![0.0; c]; n];
    for k in 0..n {
        let d: Vec<f64> = (0..c).map(|i| dist(k, i)).collect();
        if let Some(z) = d.iter().position(|&v| v < 1e-12) {
            u[k][z] = 1.0;
            continue;
        }
        for i in 0..c {
            let s: f64 = (0..c).map(|j| (d[i] / d[j]).powi(2)).sum();
            u[k][i] = 1.0 / s;
        }
    }

    let dic = (0..c)
        .map(|i| members[i].iter().map(|&k| u[k][i]).sum::<f64>() / members[i].len() as f64)
        .sum::<f64>()
        / c as f64;

    let dis = if c == 1 {
        1.0
    } else {
        let h: Vec<f64> = u
            .iter()
            .map(|row| {
                -row.iter()
                    .map(|&v| if v > 0.0 { v * v.ln() } else { 0.0 })
                    .sum::<f64>()
            })
            .collect();
        let hmax = h.iter().cloned().fold(0.0, f64::max);
        let w: Vec<f64> = h
            .iter()
            .map(|&v| if hmax < 1e-12 { 0.0 } else { v / hmax })
            .collect();
        let mut sum = 0.0;
        for i in 0..c {
            for j in 0..c {
                if i < j {
                    let s: f64 = (0..n).map(|k| w[k] * u[k][i].min(u[k][j])).sum();
                    sum += c as f64 / n as f64 * s;
                }
            }
        }
        (1.0 - 2.0 / (c as f64 * (c as f64 - 1.0)) * sum).clamp(0.0, 1.0)
    };
    (dic, dis, dic * dis)
}

pub fn oracle_relation(x: &[Vec<f64>], subset: &[usize], pi: f64) -> Vec<Vec<f64>> {
    let n = x.len();
    let radius: Vec<f64> = (0..x[0].len())
        .map(|a| {
            let col: Vec<f64> = x.iter().map(|r| r[a]).collect();
            if col.iter().all(|&v| v == col[0]) {
                return 0.0;
            }
            let mu = col.iter().sum::<f64>() / n as f64;
            (col.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / n as f64).sqrt() / pi
        })
        .collect();
    let mut r = vec![vec![1.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            for &a in subset {
                let d = (x[i][a] - x[j][a]).abs();
                let v = if d <= radius[a] { 1.0 - d } else { 0.0 };
                r[i][j] = f64::min(r[i][j], v);
            }
        }
    }
    r
}

pub fn oracle_lc_from(r: &[Vec<f64>], labels: &[usize]) -> f64 {
    let n = r.len();
    (0..n)
        .map(|i| {
            let card: f64 = r[i].iter().sum();
            let same: f64 = (0..n)
                .filter(|&j| labels[j] == labels[i])
                .map(|j| r[i][j])
                .sum();
            same / card
        })
        .sum::<f64>()
        / n as f64
}

pub fn oracle_gamma(x: &[Vec<f64>], labels: &[usize], subset: &[usize], beta: f64, pi: f64) -> f64 {
    if subset.is_empty() {
        return 0.0;
    }
    let (_, _, gs) = oracle_gs(x, labels, subset);
    let lc = oracle_lc_from(&oracle_relation(x, subset, pi), labels);
    beta * gs + (1.0 - beta) * lc
}

/// Friedman statistics by direct substitution from a raw rank matrix.
pub fn oracle_friedman(ranks: &[Vec<f64>]) -> (f64, f64) {
    let n = ranks.len() as f64;
    let m = ranks[0].len() as f64;
    let mut r = vec![0.0; ranks[0].len()];
    for row in ranks {
        for (j, v) in row.iter().enumerate() {
            r[j] += v / n;
        }
    }
    let s: f64 = r.iter().map(|v| v * v).sum();
    let chi2 = 12.0 * n / (m * (m + 1.0)) * (s - m * (m + 1.0).powi(2) / 4.0);
    let f = (n - 1.0) * chi2 / (n * (m - 1.0) - chi2);
    (chi2, f)
}

/// Prints one status line per acceptance criterion and fails on a miss.
pub fn report(id: &str, title: &str, pass: bool, detail: impl std::fmt::Display) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] {id} {title}: {detail}");
    assert!(pass, "{id} {title} failed: {detail}");
}
