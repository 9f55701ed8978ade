//! Acceptance gate. Each test prints one `[PASS]`/`[FAIL]` line; run with
//! `cargo test -p fcssc-core --test acceptance -- --nocapture` to see them.

mod common;

use std::path::PathBuf;
use std::time::{Duration, Instant};

use common::*;
use fcssc_core::clustering::{
    kmeanspp_init, run_fcm, update_centroids, update_memberships, FcmConfig,
};
use fcssc_core::consistency::{
    lambda_granule, local_consistency, lower_approximation, positive_region, subset_relation,
    upper_approximation, FuzzyRelation, SimilarityStructure,
};
use fcssc_core::dataset::{impute_missing, load_csv, normalize_min_max};
use fcssc_core::evaluation::{
    cross_validate, friedman, rank_methods, FoldPlan, Knn, RankTable, SubsetStrategy,
};
use fcssc_core::selection::{evaluation_budget, fcssc, gamma, ClusteringMode, SelectorConfig};
use fcssc_core::separability::global_separability;
use fcssc_core::LabelColumn;
use ndarray::{array, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

#[test]
fn ac1_example_local_consistency() {
    let relation = FuzzyRelation::new(array![
        [1.0, 0.6, 0.8, 0.0, 0.0, 0.0],
        [0.6, 1.0, 0.9, 0.5, 0.0, 0.0],
        [0.8, 0.9, 1.0, 0.7, 0.6, 0.0],
        [0.0, 0.5, 0.7, 1.0, 0.0, 0.8],
        [0.0, 0.0, 0.6, 0.0, 1.0, 0.7],
        [0.0, 0.0, 0.0, 0.8, 0.7, 1.0],
    ])
    .unwrap();
    let classes = [vec![0, 1, 2], vec![3, 4, 5]];
    let start = Instant::now();
    let lc = local_consistency(&relation, &classes);
    let elapsed = start.elapsed();
    report(
        "AC1",
        "worked-example local consistency",
        (lc - 0.8079).abs() <= 5e-4 && elapsed < Duration::from_millis(1),
        format!("LC = {lc:.6} (target 0.8079 ± 5e-4), {elapsed:?}"),
    );
}

#[test]
fn ac2_bounds_fuzz() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let start = Instant::now();
    let mut violations = Vec::new();
    for case in 0..1000 {
        let c = rng.random_range(1..=4);
        let n = rng.random_range(c.max(2)..=50);
        let m = rng.random_range(1..=10);
        let fds = random_fds(&mut rng, n, m, c);
        let size = rng.random_range(1..=m);
        let mut subset: Vec<usize> = (0..m).collect();
        for i in 0..size {
            let j = rng.random_range(i..m);
            subset.swap(i, j);
        }
        subset.truncate(size);
        let beta = rng.random::<f64>();
        let pi = rng.random_range(0.25..4.0);
        let g = gamma(&fds, &subset, beta, pi).unwrap();
        let s = g.separability;
        for (name, v) in [
            ("DIC", s.dic),
            ("DIS", s.dis),
            ("GS", s.gs),
            ("LC", g.lc),
            ("gamma", g.gamma),
        ] {
            if !(0.0..=1.0).contains(&v) {
                violations.push(format!("case {case}: {name} = {v}"));
            }
        }
    }
    let elapsed = start.elapsed();
    report(
        "AC2",
        "DIC/DIS/GS/LC/gamma bounded in [0,1]",
        violations.is_empty() && elapsed < Duration::from_secs(30),
        format!(
            "{} violations over 1000 systems, {elapsed:?} {:?}",
            violations.len(),
            violations.first()
        ),
    );
}

#[test]
fn ac3_fcm_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let start = Instant::now();
    let mut failures = Vec::new();
    for case in 0..200 {
        let n_objects = rng.random_range(2..=30);
        let dim = rng.random_range(1..=12);
        let objects = Array2::from_shape_fn((n_objects, dim), |_| rng.random::<f64>());
        let cfg = FcmConfig {
            k: rng.random_range(1..=n_objects),
            seed: rng.random(),
            ..FcmConfig::new(1, 0)
        };

        let state = run_fcm(objects.view(), &cfg).unwrap();
        if state.history.windows(2).any(|w| w[1] > w[0] + 1e-9) {
            failures.push(format!(
                "case {case}: objective increased {:?}",
                state.history
            ));
        }
        if state.history.iter().any(|&j| !j.is_finite() || j < 0.0) {
            failures.push(format!("case {case}: invalid objective"));
        }

        // column sums after every membership update along the same path
        let mut centroids = kmeanspp_init(objects.view(), cfg.k, cfg.seed).unwrap();
        for _ in 0..state.iterations {
            let u = update_memberships(objects.view(), centroids.view(), cfg.m);
            for col in u.columns() {
                let s: f64 = col.sum();
                if (s - 1.0).abs() > 1e-9 || col.iter().any(|v| !(0.0..=1.0).contains(v)) {
                    failures.push(format!("case {case}: column sum {s}"));
                }
            }
            centroids = update_centroids(objects.view(), u.view(), cfg.m);
        }

        let again = run_fcm(objects.view(), &cfg).unwrap();
        let identical = again
            .history
            .iter()
            .map(|v| v.to_bits())
            .eq(state.history.iter().map(|v| v.to_bits()))
            && again
                .memberships
                .iter()
                .map(|v| v.to_bits())
                .eq(state.memberships.iter().map(|v| v.to_bits()))
            && again
                .centroids
                .iter()
                .map(|v| v.to_bits())
                .eq(state.centroids.iter().map(|v| v.to_bits()));
        if !identical {
            failures.push(format!("case {case}: rerun differs"));
        }
    }
    let elapsed = start.elapsed();
    report(
        "AC3",
        "FCM membership sums, monotone objective, reproducibility",
        failures.is_empty() && elapsed < Duration::from_secs(30),
        format!(
            "{} failures over 200 problems, {elapsed:?} {:?}",
            failures.len(),
            failures.first()
        ),
    );
}

#[test]
fn ac4_greedy_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let start = Instant::now();
    let mut mismatches = Vec::new();
    let mut steps_checked = 0;
    for case in 0..50 {
        let c = rng.random_range(2..=3);
        let n = rng.random_range(8..=30);
        let m = rng.random_range(2..=8);
        let fds = random_fds(&mut rng, n, m, c);
        let beta = (rng.random_range(0..=10) as f64) / 10.0;
        let cfg = SelectorConfig {
            beta,
            clustering: ClusteringMode::Off,
            ..Default::default()
        };
        let trace = fcssc(&fds, &cfg).unwrap();

        let x = rows(&fds);
        let labels = fds.labels().to_vec();
        let mut reduct: Vec<usize> = Vec::new();
        for step in &trace.steps {
            let scores: Vec<(usize, f64)> = (0..m)
                .filter(|a| !reduct.contains(a))
                .map(|a| {
                    let mut s = reduct.clone();
                    s.push(a);
                    (a, oracle_gamma(&x, &labels, &s, beta, cfg.pi))
                })
                .collect();
            let best = scores.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
            let expected = scores.iter().find(|s| s.1 >= best - 1e-12).unwrap().0;
            if expected != step.chosen_feature {
                mismatches.push(format!(
                    "case {case} step {}: chose {} expected {expected}",
                    step.step, step.chosen_feature
                ));
            }
            reduct.push(step.chosen_feature);
            steps_checked += 1;
        }
    }
    let elapsed = start.elapsed();
    report(
        "AC4",
        "greedy step equals brute-force argmax of gamma",
        mismatches.is_empty() && elapsed < Duration::from_secs(60),
        format!(
            "{} mismatches over {steps_checked} steps, {elapsed:?} {:?}",
            mismatches.len(),
            mismatches.first()
        ),
    );
}

#[test]
fn ac5_search_budget() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = Vec::new();
    let mut strict_checked = 0;
    for case in 0..60 {
        let n = rng.random_range(12..=40);
        let m = rng.random_range(4..=14);
        let fds = random_fds(&mut rng, n, m, 2);
        // default delta (= M here) and a random smaller one
        for delta in [None, Some(rng.random_range(1..=m))] {
            let on = SelectorConfig {
                clustering: ClusteringMode::On,
                delta,
                seed: case,
                ..Default::default()
            };
            let off = SelectorConfig {
                clustering: ClusteringMode::Off,
                ..on.clone()
            };
            let t_on = fcssc(&fds, &on).unwrap();
            let t_off = fcssc(&fds, &off).unwrap();
            let budget = evaluation_budget(&t_on.groups.sizes(), t_on.delta);
            if t_on.total_evaluations > budget {
                failures.push(format!(
                    "case {case}: {} > budget {budget}",
                    t_on.total_evaluations
                ));
            }
            let multi = t_on.groups.sizes().iter().any(|&l| l >= 2);
            if delta.is_none() && multi && t_on.steps.len() >= 2 {
                strict_checked += 1;
                if t_on.total_evaluations >= t_off.total_evaluations {
                    failures.push(format!(
                        "case {case}: clustered {} not below unclustered {}",
                        t_on.total_evaluations, t_off.total_evaluations
                    ));
                }
            }
        }
    }
    report(
        "AC5",
        "clustered search within budget and cheaper than unclustered",
        failures.is_empty() && strict_checked > 0,
        format!(
            "{} failures, {strict_checked} strict comparisons {:?}",
            failures.len(),
            failures.first()
        ),
    );
}

#[test]
fn ac6_friedman_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for case in 0..100 {
        let n = rng.random_range(3..=20);
        let m = rng.random_range(3..=8);
        let scores: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..m)
                    .map(|_| (rng.random_range(0..20) as f64) / 20.0)
                    .collect()
            })
            .collect();
        let table = rank_methods(&scores);
        let (chi2, f) = oracle_friedman(&table.ranks);
        match friedman(&table) {
            Ok(r) => {
                worst = worst.max((r.chi2 - chi2).abs()).max((r.f - f).abs());
                if (r.chi2 - chi2).abs() > 1e-9 || (r.f - f).abs() > 1e-9 {
                    failures.push(format!(
                        "case {case}: ({}, {}) vs ({chi2}, {f})",
                        r.chi2, r.f
                    ));
                }
            }
            Err(e) => failures.push(format!("case {case}: {e}")),
        }
    }
    let tied = RankTable {
        ranks: vec![vec![2.5; 4]; 6],
    };
    let t = friedman(&tied).unwrap();
    let tied_ok = t.chi2 == 0.0 && t.f == 0.0;
    report(
        "AC6",
        "Friedman statistics match direct substitution",
        failures.is_empty() && tied_ok,
        format!(
            "max deviation {worst:e}, all-tied chi2 = {}, F = {}",
            t.chi2, t.f
        ),
    );
}

#[test]
fn ac7_wine_end_to_end() {
    const MAX_FEATURES: usize = 7;
    let start = Instant::now();
    let raw = load_csv(
        data_dir().join("wine.csv"),
        &LabelColumn::Name("class".into()),
        true,
    )
    .unwrap();
    let fds = normalize_min_max(&impute_missing(&raw).unwrap()).unwrap();
    assert_eq!(
        (fds.n_samples(), fds.n_features(), fds.n_classes()),
        (178, 13, 3)
    );

    let plan = FoldPlan::new(fds.labels(), 10, 42, true).unwrap();
    let knn = Knn { k: 5 };
    let mut best: Option<(f64, f64, f64)> = None;
    let mut lines = Vec::new();
    for step in 0..=10 {
        let beta = step as f64 / 10.0;
        let cfg = SelectorConfig {
            beta,
            delta: Some(MAX_FEATURES),
            clustering: ClusteringMode::Off,
            seed: 42,
            ..Default::default()
        };
        let report = cross_validate(&fds, &SubsetStrategy::PerFold(cfg), &plan, &knn).unwrap();
        let max_selected = report.folds.iter().map(|f| f.selected.len()).max().unwrap();
        assert!(max_selected <= MAX_FEATURES);
        lines.push(format!(
            "beta={beta:.1} acc={:.4}±{:.4}",
            report.accuracy.mean, report.accuracy.std
        ));
        if best.is_none_or(|b| report.accuracy.mean > b.1) {
            best = Some((beta, report.accuracy.mean, report.n_selected.mean));
        }
    }
    let baseline = cross_validate(&fds, &SubsetStrategy::AllFeatures, &plan, &knn).unwrap();
    let elapsed = start.elapsed();
    let (beta, acc, n_sel) = best.unwrap();
    for l in &lines {
        println!("    {l}");
    }
    report(
        "AC7",
        "Wine 10-fold KNN accuracy with at most 7 features",
        acc >= 0.93 && n_sel <= MAX_FEATURES as f64 && elapsed < Duration::from_secs(120),
        format!(
            "best beta={beta:.1} acc={acc:.4} features={n_sel:.1} (all-features baseline {:.4}), {elapsed:?}",
            baseline.accuracy.mean
        ),
    );
}

fn random_relation(rng: &mut impl Rng, n: usize) -> FuzzyRelation {
    let mut m = Array2::eye(n);
    for i in 0..n {
        for j in i + 1..n {
            let v = if rng.random_bool(0.3) {
                0.0
            } else {
                rng.random::<f64>()
            };
            m[[i, j]] = v;
            m[[j, i]] = v;
        }
    }
    FuzzyRelation::new(m).unwrap()
}

#[test]
fn ac8_rough_set_primitives() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut failures = Vec::new();
    for case in 0..200 {
        let n = rng.random_range(2..=25);
        let c = rng.random_range(1..=n.min(4));
        let labels: Vec<usize> = (0..n)
            .map(|i| if i < c { i } else { rng.random_range(0..c) })
            .collect();
        let classes: Vec<Vec<usize>> = (0..c)
            .map(|k| (0..n).filter(|&i| labels[i] == k).collect())
            .collect();
        let relation = random_relation(&mut rng, n);
        let lambda = rng.random::<f64>();
        for class in &classes {
            let lower = lower_approximation(&relation, lambda, class);
            let upper = upper_approximation(&relation, lambda, class);
            if !lower.iter().all(|x| upper.contains(x)) || !upper.iter().all(|x| class.contains(x))
            {
                failures.push(format!(
                    "case {case}: lower {lower:?} upper {upper:?} class {class:?}"
                ));
            }
        }
        let universe: Vec<usize> = (0..n).collect();
        if positive_region(&FuzzyRelation::identity(n), lambda, &classes) != universe {
            failures.push(format!("case {case}: identity positive region"));
        }
        if c >= 2 && !positive_region(&FuzzyRelation::ones(n), lambda, &classes).is_empty() {
            failures.push(format!("case {case}: all-ones positive region nonempty"));
        }
    }
    report(
        "AC8",
        "approximation containment and positive-region extremes",
        failures.is_empty(),
        format!(
            "{} failures over 200 relations {:?}",
            failures.len(),
            failures.first()
        ),
    );
}

#[test]
fn ac9_relation_monotonicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut failures = Vec::new();
    for case in 0..200 {
        let n = rng.random_range(2..=30);
        let m = rng.random_range(2..=8);
        let fds = random_fds(&mut rng, n, m, 2.min(n));
        let structure = SimilarityStructure::new(&fds, rng.random_range(0.5..3.0)).unwrap();
        let sub: Vec<usize> = (0..m).filter(|_| rng.random_bool(0.5)).collect();
        let sub = if sub.is_empty() { vec![0] } else { sub };
        let mut sup = sub.clone();
        sup.extend((0..m).filter(|a| !sub.contains(a) && rng.random_bool(0.5)));

        let r_b = structure.subset_relation(&sub).unwrap();
        let r_bb = subset_relation(sup.iter().map(|&a| structure.relation(a))).unwrap();
        let lambda = rng.random::<f64>();
        let pointwise = r_bb
            .matrix()
            .iter()
            .zip(r_b.matrix().iter())
            .all(|(big, small)| big <= small);
        let cards = (0..n).all(|x| {
            r_bb.granule_cardinality(x) <= r_b.granule_cardinality(x)
                && lambda_granule(&r_bb, lambda, x).iter().sum::<f64>()
                    <= lambda_granule(&r_b, lambda, x).iter().sum::<f64>()
        });
        if !pointwise || !cards {
            failures.push(format!("case {case}: B={sub:?} B'={sup:?}"));
        }
    }
    report(
        "AC9",
        "superset relations are pointwise smaller",
        failures.is_empty(),
        format!(
            "{} failures over 200 pairs {:?}",
            failures.len(),
            failures.first()
        ),
    );
}

#[test]
fn toy_global_separability_against_oracle() {
    // 4 samples, 2 features, 2 classes
    let samples = array![[0.1, 0.2], [0.3, 0.1], [0.8, 0.7], [0.6, 0.9]];
    let fds =
        fcssc_core::FuzzyDecisionSystem::new(samples, vec!["a".into(), "b".into()], &[0, 0, 1, 1])
            .unwrap();
    let g = global_separability(&fds, &[0, 1]).unwrap();
    let (dic, dis, gs) = oracle_gs(&rows(&fds), fds.labels(), &[0, 1]);
    assert!((g.dic - dic).abs() < 1e-12);
    assert!((g.dis - dis).abs() < 1e-12);
    assert!((g.gs - gs).abs() < 1e-12);
}
