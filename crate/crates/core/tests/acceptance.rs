//! Acceptance suite: one test per criterion, one PASS/FAIL/SKIP line each.
//!
//! Criteria that need the public Framingham CSV look for it at
//! `$FRAMINGHAM_CSV`, `$DDSBENCH_DATA`, or `<workspace>/data/framingham.csv`
//! and print a SKIP line when it is absent; everything else runs on
//! synthetic data and always executes.

use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::Instant;

use ddsbench::cutoff::{equilibrium_sampling, intersections, sweep, ModelKind};
use ddsbench::dataset::{ingest_csv, ColumnMap, Dataset, Sex, NUM_VARIABLES};
use ddsbench::discriminant::fit_gaussian;
use ddsbench::harness::{
    logistic_variants_study, ratio_study, run, significance_study, Algorithm, ExperimentSpec,
    SexFilter, LOGISTIC_VARIANTS,
};
use ddsbench::hierarchy::{
    exhaustive_search, greedy_search, tnr_hierarchy, Metric, SearchConfig, StopReason,
};
use ddsbench::metrics::{confusion, performance};
use ddsbench::numcore::Matrix;
use ddsbench::regressors::fit_logistic;
use ddsbench::rng::{stream, Purpose};
use ddsbench::splitter::{make_split, Scenario};
use ddsbench::synth;

const SEED: u64 = 20240622;

fn data_path() -> Option<PathBuf> {
    for var in ["FRAMINGHAM_CSV", "DDSBENCH_DATA"] {
        if let Ok(p) = std::env::var(var) {
            let p = PathBuf::from(p);
            if p.exists() {
                return Some(p);
            }
        }
    }
    let workspace = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/framingham.csv");
    workspace.exists().then_some(workspace)
}

fn framingham() -> Option<&'static Dataset> {
    static CACHE: OnceLock<Option<Dataset>> = OnceLock::new();
    CACHE
        .get_or_init(|| {
            let path = data_path()?;
            Some(ingest_csv(&path, &ColumnMap::default()).expect("Framingham CSV must ingest"))
        })
        .as_ref()
}

fn skip(criterion: &str) {
    println!(
        "SKIP {criterion}: Framingham CSV not found (set FRAMINGHAM_CSV or place \
         data/framingham.csv at the workspace root)"
    );
}

fn pass(criterion: &str, detail: &str, started: Instant) {
    println!(
        "PASS {criterion}: {detail} [{:.1}s]",
        started.elapsed().as_secs_f64()
    );
}

/// Toy dataset with the study's group sizes; features are irrelevant for
/// size checks.
fn study_shape() -> Dataset {
    let n1 = 622;
    let n2 = 3520;
    let features = (0..n1 + n2).map(|i| vec![i as f64; NUM_VARIABLES]).collect();
    let labels = (0..n1 + n2).map(|i| u8::from(i < n1)).collect();
    Dataset::from_parts(features, labels, vec![None; n1 + n2], (1..=NUM_VARIABLES).collect())
}

#[test]
fn criterion_01_ingestion_counts() {
    let started = Instant::now();
    let Some(d) = framingham() else {
        return skip("criterion 1 (ingestion)");
    };
    assert_eq!((d.n(), d.n1(), d.n2()), (4142, 622, 3520), "overall counts");
    assert!(
        (d.prevalence().unwrap() - 0.1502).abs() < 5e-4,
        "overall prevalence {}",
        d.prevalence().unwrap()
    );
    let male = d.filter_by_sex(Sex::Male);
    assert_eq!((male.n1(), male.n2()), (337, 1456), "male counts");
    assert!((male.prevalence().unwrap() - 0.1880).abs() < 5e-4);
    let female = d.filter_by_sex(Sex::Female);
    assert_eq!((female.n1(), female.n2()), (285, 2064), "female counts");
    assert!((female.prevalence().unwrap() - 0.1381).abs() < 5e-4);
    pass(
        "criterion 1 (ingestion)",
        "N=4142 N1=622 N2=3520, male 337/1456, female 285/2064",
        started,
    );
}

#[test]
fn criterion_02_split_sizes() {
    let started = Instant::now();
    let d = study_shape();
    let sizes = |scenario: Scenario| {
        let mut rng = stream(SEED, Purpose::Split, 0);
        let s = make_split(&d, scenario, 0.8, &mut rng).unwrap();
        (s.n1(), s.n2(), s.n3())
    };
    assert_eq!(sizes(Scenario::EQ_PROP), (498, 498, 828));
    assert_eq!(sizes(Scenario::EQ_EQ), (498, 498, 248));
    // proportional training follows the formula value 2816, not the
    // printed 2819; the deviation is documented in every run manifest
    assert_eq!(sizes(Scenario::PROP_PROP), (498, 2816, 828));
    assert_eq!(sizes(Scenario::PROP_EQ), (498, 2816, 248));
    assert!(
        ddsbench::cli::ROUNDING_NOTE.contains("2819"),
        "manifest note must document the printed-table deviation"
    );
    pass(
        "criterion 2 (split sizes)",
        "eq-prop (498,498,828), eq-eq (498,498,248), prop n2=2816 by formula",
        started,
    );
}

#[test]
fn criterion_03_equilibrium_cutoffs() {
    let started = Instant::now();
    let Some(d) = framingham() else {
        return skip("criterion 3 (equilibrium cutoffs)");
    };
    // scenario order: prop-prop, eq-prop, prop-eq, eq-eq
    let expected = [
        (ModelKind::Logistic, [0.1556, 0.4748, 0.1525, 0.5003]),
        (ModelKind::Forest, [0.1647, 0.4877, 0.1614, 0.5070]),
    ];
    for (kind, values) in expected {
        for (scenario, reference) in Scenario::ALL.into_iter().zip(values) {
            let (sampling, _) =
                equilibrium_sampling(d, scenario, 0.8, kind, 100, SEED, false).unwrap();
            let got = sampling.equilibrium_cutoff;
            assert!(
                (got - reference).abs() < 0.03,
                "{kind:?} {}: equilibrium {got:.4} vs reference {reference:.4}",
                scenario.cli_name()
            );
        }
    }
    pass(
        "criterion 3 (equilibrium cutoffs)",
        "logistic and forest centroids within 3pp of the study values",
        started,
    );
}

#[test]
fn criterion_04_significance_counts() {
    let started = Instant::now();
    let Some(d) = framingham() else {
        return skip("criterion 4 (significance counts)");
    };
    let table = significance_study(d, Scenario::PROP_PROP, 0.8, &[0.01], 1000, SEED).unwrap();
    let counts = &table.counts[0]; // X0..X7
    for (coef, name) in [(0, "X0"), (1, "X1"), (3, "X3"), (7, "X7")] {
        assert!(counts[coef] >= 990, "{name} flagged {}/1000", counts[coef]);
    }
    for (coef, name) in [(4, "X4"), (5, "X5"), (6, "X6")] {
        assert!(counts[coef] <= 30, "{name} flagged {}/1000", counts[coef]);
    }
    pass(
        "criterion 4 (significance counts)",
        &format!(
            "alpha=1% prop-prop: X0={} X1={} X3={} X7={}, X4={} X5={} X6={}, unconverged={}",
            counts[0], counts[1], counts[3], counts[7], counts[4], counts[5], counts[6],
            table.unconverged
        ),
        started,
    );
}

#[test]
fn criterion_05_logistic_variants() {
    let started = Instant::now();
    let Some(d) = framingham() else {
        return skip("criterion 5 (logistic variants)");
    };
    // printed mean TP per scenario for (all7, X1X3X7, X1X2X3X7)
    let printed = [
        (Scenario::PROP_PROP, [81.80, 81.81, 82.59]),
        (Scenario::EQ_PROP, [82.68, 82.80, 83.06]),
        (Scenario::PROP_EQ, [81.85, 82.80, 82.67]),
        (Scenario::EQ_EQ, [82.18, 81.77, 82.73]),
    ];
    let sets: Vec<Vec<usize>> = LOGISTIC_VARIANTS.iter().map(|s| s.to_vec()).collect();
    for (scenario, reference) in printed {
        let study = logistic_variants_study(d, scenario, 0.8, &sets, 1000, SEED).unwrap();
        for (got, want) in study.mean_true_pos.iter().zip(reference) {
            assert!(
                (got - want).abs() <= 2.5,
                "{}: mean TP {got:.2} vs printed {want:.2}",
                scenario.cli_name()
            );
        }
        let max = study.mean_true_pos.iter().copied().fold(f64::MIN, f64::max);
        let min = study.mean_true_pos.iter().copied().fold(f64::MAX, f64::min);
        assert!(
            max - min <= 3.0,
            "{}: model gap {max:.2}-{min:.2} exceeds 3 counts",
            scenario.cli_name()
        );
    }
    pass(
        "criterion 5 (logistic variants)",
        "three variants within 2.5 TP of print, pairwise gap <= 3",
        started,
    );
}

/// Shared tau=0.8, 100-sim, all-algorithm run used by criteria 6, 7 and 8.
fn table5_runs() -> Option<&'static Vec<(Scenario, ddsbench::harness::ExperimentResult)>> {
    static CACHE: OnceLock<Option<Vec<(Scenario, ddsbench::harness::ExperimentResult)>>> =
        OnceLock::new();
    CACHE
        .get_or_init(|| {
            let d = framingham()?;
            Some(
                Scenario::ALL
                    .into_iter()
                    .map(|scenario| {
                        let spec = ExperimentSpec {
                            sex: SexFilter::All,
                            scenario,
                            tau: 0.8,
                            algorithms: Algorithm::ALL.to_vec(),
                            vars: None,
                            n_sims: 100,
                            master_seed: SEED,
                        };
                        (scenario, run(d, &spec).unwrap())
                    })
                    .collect(),
            )
        })
        .as_ref()
}

#[test]
fn criterion_06_table5_rates() {
    let started = Instant::now();
    let Some(runs) = table5_runs() else {
        return skip("criterion 6 (mean rates)");
    };
    // printed mean TPR/TNR percent per scenario (prop-prop, eq-prop,
    // prop-eq, eq-eq)
    let printed: [(Algorithm, [f64; 4], [f64; 4]); 6] = [
        (Algorithm::Rf, [65.41, 64.89, 65.66, 65.20], [60.12, 61.62, 60.08, 61.97]),
        (Algorithm::Logit, [65.41, 65.60, 65.99, 66.37], [65.77, 65.69, 66.25, 66.07]),
        (Algorithm::Ld, [64.57, 65.81, 64.73, 66.60], [66.81, 65.69, 67.23, 65.99]),
        (Algorithm::Qd, [74.51, 73.54, 73.87, 74.68], [56.48, 56.29, 56.39, 56.90]),
        (Algorithm::Dds1, [76.53, 76.86, 75.94, 77.12], [54.48, 54.08, 54.87, 54.62]),
        (Algorithm::Dds2, [62.55, 62.48, 62.65, 64.15], [68.32, 67.91, 68.74, 68.27]),
    ];
    for (algo, tprs, tnrs) in printed {
        for (i, (scenario, result)) in runs.iter().enumerate() {
            let mean = &result.means[&algo];
            let tpr = 100.0 * mean.mean.tpr.unwrap();
            let tnr = 100.0 * mean.mean.tnr.unwrap();
            assert!(
                (tpr - tprs[i]).abs() <= 3.0,
                "{} {}: TPR {tpr:.2} vs printed {:.2}",
                algo.name(),
                scenario.cli_name(),
                tprs[i]
            );
            assert!(
                (tnr - tnrs[i]).abs() <= 3.0,
                "{} {}: TNR {tnr:.2} vs printed {:.2}",
                algo.name(),
                scenario.cli_name(),
                tnrs[i]
            );
        }
    }
    pass(
        "criterion 6 (mean rates)",
        "LD, QD, Logit, RF, DDS1, DDS2 within 3pp of printed TPR/TNR",
        started,
    );
}

#[test]
fn criterion_07_baseline_failure_mode() {
    let started = Instant::now();
    let Some(runs) = table5_runs() else {
        return skip("criterion 7 (baseline failure mode)");
    };
    for (scenario, result) in runs {
        for algo in [Algorithm::Xgb, Algorithm::Svm] {
            let mean = &result.means[&algo];
            let tpr = mean.mean.tpr.unwrap();
            match scenario.training {
                ddsbench::splitter::Balance::Proportional => {
                    assert!(
                        tpr < 0.05,
                        "{} {}: proportional training TPR {tpr:.4}",
                        algo.name(),
                        scenario.cli_name()
                    );
                    if *scenario == Scenario::PROP_PROP {
                        let acc = mean.mean.acc.unwrap();
                        assert!(
                            (0.84..=0.86).contains(&acc),
                            "{}: Acc {acc:.4} outside [0.84, 0.86]",
                            algo.name()
                        );
                    }
                }
                ddsbench::splitter::Balance::Equal => {
                    assert!(
                        tpr >= 0.60,
                        "{} {}: equal training TPR {tpr:.4}",
                        algo.name(),
                        scenario.cli_name()
                    );
                }
            }
        }
    }
    pass(
        "criterion 7 (baseline failure mode)",
        "xgb/svm collapse under proportional training, recover with equal",
        started,
    );
}

#[test]
fn criterion_08_dds1_dominance() {
    let started = Instant::now();
    let Some(runs) = table5_runs() else {
        return skip("criterion 8 (dominance)");
    };
    for (scenario, result) in runs {
        let dds1 = result.means[&Algorithm::Dds1].mean.tpr.unwrap();
        for algo in Algorithm::ALL {
            if algo == Algorithm::Dds1 {
                continue;
            }
            let other = result.means[&algo].mean.tpr.unwrap();
            assert!(
                dds1 > other,
                "{}: dds1 TPR {dds1:.4} not above {} {other:.4}",
                scenario.cli_name(),
                algo.name()
            );
        }
    }
    pass(
        "criterion 8 (dominance)",
        "dds1 mean TPR strictly highest in all four scenarios",
        started,
    );
}

#[test]
fn criterion_09_training_ratio_stability() {
    let started = Instant::now();
    let Some(d) = framingham() else {
        return skip("criterion 9 (ratio stability)");
    };
    let taus = [0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
    for scenario in Scenario::ALL {
        let spec = ExperimentSpec {
            sex: SexFilter::All,
            scenario,
            tau: 0.8,
            algorithms: vec![Algorithm::Dds1],
            vars: None,
            n_sims: 100,
            master_seed: SEED,
        };
        let points = ratio_study(d, &spec, &taus).unwrap();
        let tprs: Vec<f64> = points.iter().map(|p| p.mean.mean.tpr.unwrap()).collect();
        let band = tprs.iter().copied().fold(f64::MIN, f64::max)
            - tprs.iter().copied().fold(f64::MAX, f64::min);
        assert!(
            band <= 0.05,
            "{}: DDS1 TPR band {band:.4} over taus {taus:?}",
            scenario.cli_name()
        );
    }
    pass(
        "criterion 9 (ratio stability)",
        "dds1 TPR within a 5-point band for tau in 0.4..=0.9, all scenarios",
        started,
    );
}

#[test]
fn criterion_10_hierarchy_greedy_and_exhaustive() {
    let started = Instant::now();
    let Some(d) = framingham() else {
        return skip("criterion 10 (hierarchy)");
    };
    let config = SearchConfig {
        sex: SexFilter::All,
        scenario: Scenario::EQ_EQ,
        tau: 0.8,
        algorithm: Algorithm::Dds1,
        metric: Metric::Tpr,
        n_sims: 1000,
        master_seed: SEED,
    };
    let trace = greedy_search(d, &config).unwrap();
    assert_eq!(trace.order, vec![1, 4, 7, 2, 5, 6], "greedy joining order");
    let printed = [0.6305, 0.6988, 0.7312, 0.7653, 0.7769, 0.7826];
    for (got, want) in trace.prefix_scores.iter().zip(printed) {
        assert!(
            (got - want).abs() <= 0.02,
            "prefix score {got:.4} vs printed {want:.4}"
        );
    }
    assert_eq!(trace.stopped_because, StopReason::NoImprovement, "stops before X3");
    assert!(!trace.final_set().contains(&3));
    assert!(trace.evaluations <= 28, "evaluations {}", trace.evaluations);

    let fast = SearchConfig {
        n_sims: 200,
        ..config
    };
    let ranked = exhaustive_search(d, &fast).unwrap();
    assert_eq!(ranked.len(), 127);
    assert_eq!(ranked[0].vars, vec![1, 2, 4, 5, 6, 7], "exhaustive top subset");
    pass(
        "criterion 10 (hierarchy)",
        &format!(
            "greedy (1,4,7,2,5,6) in {} evaluations, exhaustive top (1,2,4,5,6,7)",
            trace.evaluations
        ),
        started,
    );
}

#[test]
fn criterion_11_tnr_first_variable() {
    let started = Instant::now();
    let Some(d) = framingham() else {
        return skip("criterion 11 (TNR hierarchy)");
    };
    for scenario in Scenario::ALL {
        let config = SearchConfig {
            sex: SexFilter::All,
            scenario,
            tau: 0.8,
            algorithm: Algorithm::Dds1,
            metric: Metric::Tpr, // tnr_hierarchy overrides
            n_sims: 200,
            master_seed: SEED,
        };
        let trace = tnr_hierarchy(d, &config).unwrap();
        assert_eq!(
            trace.order.first(),
            Some(&3),
            "{}: TNR hierarchy starts with {:?}",
            scenario.cli_name(),
            trace.order.first()
        );
    }
    pass(
        "criterion 11 (TNR hierarchy)",
        "X3 is the first TNR variable in all four scenarios",
        started,
    );
}

#[test]
fn criterion_12_per_sex() {
    let started = Instant::now();
    let Some(d) = framingham() else {
        return skip("criterion 12 (per-sex)");
    };

    // greedy searches per sex on equal/equal
    let male_cfg = SearchConfig {
        sex: SexFilter::Male,
        scenario: Scenario::EQ_EQ,
        tau: 0.8,
        algorithm: Algorithm::Dds1,
        metric: Metric::Tpr,
        n_sims: 1000,
        master_seed: SEED,
    };
    let male_trace = greedy_search(d, &male_cfg).unwrap();
    assert_eq!(male_trace.final_set(), vec![1, 2, 4, 5, 6, 7], "male final set");
    let male_tpr = *male_trace.prefix_scores.last().unwrap();
    assert!(
        (0.7087..=0.7799).contains(&male_tpr),
        "male final TPR {male_tpr:.4} outside printed 73.87-74.99 +/- 3pp"
    );

    let female_cfg = SearchConfig {
        sex: SexFilter::Female,
        ..male_cfg.clone()
    };
    let female_trace = greedy_search(d, &female_cfg).unwrap();
    assert_eq!(female_trace.order.first(), Some(&1), "female first variable");
    assert_eq!(female_trace.final_set(), vec![1, 2, 4, 5, 6, 7], "female final set");
    let female_tpr = *female_trace.prefix_scores.last().unwrap();
    assert!(
        (0.7541..=0.8236).contains(&female_tpr),
        "female final TPR {female_tpr:.4} outside printed 78.41-79.36 +/- 3pp"
    );

    // mean classification performance matrices, six-variable model,
    // equal training / proportional testing
    let printed = [
        (SexFilter::All, 0.7853, 0.9343),
        (SexFilter::Male, 0.7507, 0.9036),
        (SexFilter::Female, 0.7919, 0.9488),
    ];
    for (sex, want_tpr, want_nprec) in printed {
        let spec = ExperimentSpec {
            sex,
            scenario: Scenario::EQ_PROP,
            tau: 0.8,
            algorithms: vec![Algorithm::Dds1],
            vars: Some(vec![1, 2, 4, 5, 6, 7]),
            n_sims: 1000,
            master_seed: SEED,
        };
        let result = run(d, &spec).unwrap();
        let mean = &result.means[&Algorithm::Dds1];
        let tpr = mean.mean.tpr.unwrap();
        let nprec = mean.mean.nprec.unwrap();
        assert!(
            (tpr - want_tpr).abs() <= 0.025,
            "{sex:?}: TPR {tpr:.4} vs printed {want_tpr:.4}"
        );
        assert!(
            (nprec - want_nprec).abs() <= 0.025,
            "{sex:?}: NPrec {nprec:.4} vs printed {want_nprec:.4}"
        );
    }
    pass(
        "criterion 12 (per-sex)",
        "male/female hierarchies and mean matrices within tolerance",
        started,
    );
}

#[test]
fn criterion_13_property_suite() {
    let started = Instant::now();

    // dds set laws on random batches
    {
        let d = synth::two_group_gaussian(120, 180, 1.2, 4, 41);
        let g1 = d.matrix_of(&d.group1_indices());
        let g2 = d.matrix_of(&d.group2_indices());
        let model = fit_gaussian(&g1, &g2).unwrap();
        let probe = synth::two_group_gaussian(100, 100, 0.8, 4, 42);
        let rows = probe.matrix_of(&(0..probe.n()).collect::<Vec<_>>());
        let labels = model.classify_batch(&rows);
        for i in 0..rows.rows() {
            assert_eq!(labels.dds1[i], labels.ld[i] | labels.qd[i], "union law");
            assert_eq!(labels.dds2[i], labels.ld[i] & labels.qd[i], "intersection law");
        }
        println!("  property: dds set laws exact on {} rows", rows.rows());
    }

    // affine invariance under 100 random invertible transforms
    {
        use rand::Rng as _;
        let mut rng = stream(SEED, Purpose::Split, 77);
        let d = synth::two_group_gaussian(80, 80, 1.0, 3, 43);
        let g1 = d.matrix_of(&d.group1_indices());
        let g2 = d.matrix_of(&d.group2_indices());
        let base = fit_gaussian(&g1, &g2).unwrap();
        let probe = synth::two_group_gaussian(40, 40, 0.5, 3, 44);
        let rows = probe.matrix_of(&(0..probe.n()).collect::<Vec<_>>());
        let p = NUM_VARIABLES;
        for trial in 0..100 {
            let mut a = Matrix::zeros(p, p);
            for i in 0..p {
                for j in 0..p {
                    a[(i, j)] = rng.random_range(-0.5..0.5);
                }
                a[(i, i)] += 2.0;
            }
            let b: Vec<f64> = (0..p).map(|_| rng.random_range(-1.0..1.0)).collect();
            let map_matrix = |m: &Matrix| -> Matrix {
                let mapped: Vec<Vec<f64>> = (0..m.rows())
                    .map(|i| {
                        let x = m.row(i);
                        (0..p)
                            .map(|r| b[r] + (0..p).map(|c| a[(r, c)] * x[c]).sum::<f64>())
                            .collect()
                    })
                    .collect();
                Matrix::from_rows(&mapped)
            };
            let mapped = fit_gaussian(&map_matrix(&g1), &map_matrix(&g2)).unwrap();
            let rows_mapped = map_matrix(&rows);
            for i in 0..rows.rows() {
                let d0 = base.decide(rows.row(i));
                let d1 = mapped.decide(rows_mapped.row(i));
                assert_eq!(d0.ld_class, d1.ld_class, "trial {trial} ld");
                assert_eq!(d0.qd_class, d1.qd_class, "trial {trial} qd");
            }
        }
        println!("  property: affine invariance over 100 transforms");
    }

    // confusion conservation and the accuracy identity
    {
        use rand::Rng as _;
        let mut rng = stream(SEED, Purpose::Split, 78);
        for _ in 0..200 {
            let n = rng.random_range(1..200);
            let actual: Vec<u8> = (0..n).map(|_| rng.random_range(0..2) as u8).collect();
            let predicted: Vec<u8> = (0..n).map(|_| rng.random_range(0..2) as u8).collect();
            let c = confusion(&actual, &predicted).unwrap();
            assert_eq!(c.total(), n as f64);
            let m = performance(c).unwrap();
            if let (Some(acc), Some(tpr), Some(tnr), Some(oprev)) = (m.acc, m.tpr, m.tnr, m.oprev)
            {
                assert!((acc - (oprev * tpr + (1.0 - oprev) * tnr)).abs() < 1e-12);
            }
        }
        println!("  property: confusion conservation and accuracy identity");
    }

    // cutoff monotonicity on a fitted logistic model
    {
        let d = synth::two_group_gaussian(150, 150, 1.0, 3, 45);
        let all: Vec<usize> = (0..d.n()).collect();
        let model = fit_logistic(&d.matrix_of(&all), &d.labels_of(&all)).unwrap();
        let rows: Vec<&[f64]> = all.iter().map(|&i| d.feature_row(i)).collect();
        let curves = sweep(&model, &rows, d.labels());
        for w in 0..curves.grid.len() - 1 {
            assert!(curves.tp[w + 1] <= curves.tp[w], "tp must not increase");
            assert!(curves.tn[w + 1] >= curves.tn[w], "tn must not decrease");
        }
        assert_eq!(curves.tp[0], 150.0);
        assert_eq!(curves.tn[0], 0.0);
        let est = intersections(&curves).unwrap();
        assert!((0.0..=1.0).contains(&est.equilibrium_cutoff));
        println!("  property: cutoff monotonicity and boundary counts");
    }

    // split disjointness and reproducibility across 1000 seeds
    {
        let d = synth::two_group_gaussian(60, 140, 0.5, 2, 46);
        for seed in 0..1000u64 {
            let scenario = Scenario::ALL[(seed % 4) as usize];
            let a = make_split(&d, scenario, 0.7, &mut stream(seed, Purpose::Split, 0)).unwrap();
            let b = make_split(&d, scenario, 0.7, &mut stream(seed, Purpose::Split, 0)).unwrap();
            assert_eq!(a.train_g1, b.train_g1);
            assert_eq!(a.test, b.test);
            let mut seen = std::collections::HashSet::new();
            for &i in a.train_g1.iter().chain(&a.train_g2).chain(&a.test) {
                assert!(seen.insert(i), "seed {seed}: row {i} drawn twice");
            }
        }
        println!("  property: split disjointness/reproducibility over 1000 seeds");
    }

    // greedy equals the exhaustive prefix oracle on synthetic p=4 data
    {
        use rand::Rng as _;
        let mut rng = stream(SEED, Purpose::Split, 79);
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for i in 0..320 {
            let positive = i < 110;
            let normal = |rng: &mut ddsbench::rng::Rng| -> f64 {
                let u1: f64 = rng.random_range(1e-12..1.0);
                let u2: f64 = rng.random_range(0.0..1.0);
                (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
            };
            // two informative axes with different strengths, two noise
            let s1 = if positive { 1.8 } else { 0.0 };
            let s2 = if positive { 0.9 } else { 0.0 };
            features.push(vec![
                s1 + normal(&mut rng),
                s2 + normal(&mut rng),
                normal(&mut rng),
                normal(&mut rng),
            ]);
            labels.push(u8::from(positive));
        }
        let d = Dataset::from_parts(features, labels, vec![None; 320], vec![1, 2, 3, 4]);
        let config = SearchConfig {
            sex: SexFilter::All,
            scenario: Scenario::EQ_EQ,
            tau: 0.7,
            algorithm: Algorithm::Dds1,
            metric: Metric::Tpr,
            n_sims: 30,
            master_seed: SEED,
        };
        let trace = greedy_search(&d, &config).unwrap();
        let ranked = exhaustive_search(&d, &config).unwrap();
        assert_eq!(ranked.len(), 15);
        for k in 1..=trace.order.len() {
            let mut prefix = trace.order[..k].to_vec();
            prefix.sort_unstable();
            let prev = &trace.order[..k - 1];
            let best = ranked
                .iter()
                .filter(|s| s.vars.len() == k && prev.iter().all(|v| s.vars.contains(v)))
                .max_by(|x, y| x.mean_metric.total_cmp(&y.mean_metric))
                .unwrap();
            let own = ranked.iter().find(|s| s.vars == prefix).unwrap();
            assert!(
                own.mean_metric >= best.mean_metric - 1e-12,
                "greedy prefix {prefix:?} not the best extension"
            );
        }
        assert!(trace.evaluations <= 4 * 5 / 2);
        println!("  property: greedy matches the exhaustive prefix oracle (p=4)");
    }

    // IRLS recovers known coefficients within 3 standard errors
    {
        use rand::Rng as _;
        let mut rng = stream(SEED, Purpose::Split, 80);
        let true_beta = [0.3, -1.1, 0.7];
        let n = 3000;
        let mut rows = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            let x1: f64 = rng.random_range(-2.0..2.0);
            let x2: f64 = rng.random_range(-2.0..2.0);
            let eta = true_beta[0] + true_beta[1] * x1 + true_beta[2] * x2;
            let p = 1.0 / (1.0 + (-eta).exp());
            labels.push(u8::from(rng.random_range(0.0..1.0) < p));
            rows.push(vec![x1, x2]);
        }
        let model = fit_logistic(&Matrix::from_rows(&rows), &labels).unwrap();
        assert!(model.converged);
        for j in 0..3 {
            assert!(
                (model.coefficients[j] - true_beta[j]).abs() < 3.0 * model.standard_errors[j],
                "beta[{j}]"
            );
        }
        println!("  property: IRLS recovery within 3 SE");
    }

    // boosting training loss never increases
    {
        let d = synth::two_group_gaussian(100, 150, 0.9, 3, 47);
        let all: Vec<usize> = (0..d.n()).collect();
        let model = ddsbench::baselines::fit_boost(
            &d.matrix_of(&all),
            &d.labels_of(&all),
            ddsbench::baselines::BoostConfig::default(),
        )
        .unwrap();
        for w in model.train_loss.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "boost loss rose");
        }
        println!("  property: boost training-loss monotonicity over 100 rounds");
    }

    // SVM dual feasibility at termination
    {
        let d = synth::two_group_gaussian(80, 120, 1.0, 3, 48);
        let all: Vec<usize> = (0..d.n()).collect();
        let model = ddsbench::baselines::fit_svm(
            &d.matrix_of(&all),
            &d.labels_of(&all),
            ddsbench::baselines::SvmConfig::default(),
        )
        .unwrap();
        assert!(model.dual_balance().abs() < 1e-6, "sum alpha_i y_i != 0");
        for a in model.dual_magnitudes() {
            assert!((-1e-12..=model.c_penalty + 1e-12).contains(&a), "alpha outside [0, C]");
        }
        println!("  property: SVM dual feasibility (balance and box)");
    }

    pass(
        "criterion 13 (property suite)",
        "all nine property families hold",
        started,
    );
}
