//! Train/test index splits under the four training/testing scenarios.
//!
//! Splits are drawn per group (positives and negatives separately), uniform
//! without replacement, and are a pure function of
//! `(dataset, scenario, tau, rng state)`. Sizes use rounding half away from
//! zero, written `[.]` below:
//!
//! * proportional training: n1 = [tau*N1], n2 = [tau*N2]
//! * equal training:        n1 = n2 = [tau*min(N1,N2)]
//! * proportional testing:  [(1-tau)*N1] and [(1-tau)*N2] fresh rows per group
//! * equal testing:         [(1-tau)*min(N1,N2)] fresh rows per group
//!
//! Under proportional training *and* testing the test set is simply every
//! row not drawn for training, so no re-rounding happens there.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Group balance of one side of a split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Balance {
    Proportional,
    Equal,
}

/// One of the four training/testing scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub training: Balance,
    pub testing: Balance,
}

impl Scenario {
    pub const PROP_PROP: Scenario = Scenario {
        training: Balance::Proportional,
        testing: Balance::Proportional,
    };
    pub const EQ_PROP: Scenario = Scenario {
        training: Balance::Equal,
        testing: Balance::Proportional,
    };
    pub const PROP_EQ: Scenario = Scenario {
        training: Balance::Proportional,
        testing: Balance::Equal,
    };
    pub const EQ_EQ: Scenario = Scenario {
        training: Balance::Equal,
        testing: Balance::Equal,
    };

    pub const ALL: [Scenario; 4] = [
        Scenario::PROP_PROP,
        Scenario::EQ_PROP,
        Scenario::PROP_EQ,
        Scenario::EQ_EQ,
    ];

    /// CLI spelling: `prop-prop`, `eq-prop`, `prop-eq`, `eq-eq`.
    pub fn cli_name(&self) -> &'static str {
        match (self.training, self.testing) {
            (Balance::Proportional, Balance::Proportional) => "prop-prop",
            (Balance::Equal, Balance::Proportional) => "eq-prop",
            (Balance::Proportional, Balance::Equal) => "prop-eq",
            (Balance::Equal, Balance::Equal) => "eq-eq",
        }
    }

    /// Human label matching the study tables, e.g. `Equal/Prop.`.
    pub fn label(&self) -> &'static str {
        match (self.training, self.testing) {
            (Balance::Proportional, Balance::Proportional) => "Prop./Prop.",
            (Balance::Equal, Balance::Proportional) => "Equal/Prop.",
            (Balance::Proportional, Balance::Equal) => "Prop./Equal",
            (Balance::Equal, Balance::Equal) => "Equal/Equal",
        }
    }
}

impl std::str::FromStr for Scenario {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "prop-prop" => Ok(Scenario::PROP_PROP),
            "eq-prop" => Ok(Scenario::EQ_PROP),
            "prop-eq" => Ok(Scenario::PROP_EQ),
            "eq-eq" => Ok(Scenario::EQ_EQ),
            other => Err(format!(
                "unknown scenario {other:?} (expected prop-prop, eq-prop, prop-eq or eq-eq)"
            )),
        }
    }
}

/// Disjoint train/test row-index sets for one simulation.
#[derive(Debug, Clone)]
pub struct ScenarioSplit {
    pub train_g1: Vec<usize>,
    pub train_g2: Vec<usize>,
    pub test: Vec<usize>,
    pub tau: f64,
    pub scenario: Scenario,
}

impl ScenarioSplit {
    pub fn n1(&self) -> usize {
        self.train_g1.len()
    }

    pub fn n2(&self) -> usize {
        self.train_g2.len()
    }

    pub fn n3(&self) -> usize {
        self.test.len()
    }

    /// Positive share of the training rows, n1/(n1+n2).
    pub fn training_prevalence(&self) -> Result<f64> {
        let total = self.n1() + self.n2();
        if total == 0 {
            return Err(Error::EmptyDataset);
        }
        Ok(self.n1() as f64 / total as f64)
    }

    /// All training indices, group 1 then group 2.
    pub fn train(&self) -> Vec<usize> {
        let mut all = self.train_g1.clone();
        all.extend_from_slice(&self.train_g2);
        all
    }
}

/// Round half away from zero; the study's `[.]` operator.
pub fn round_half_away(x: f64) -> usize {
    debug_assert!(x >= 0.0);
    (x + 0.5).floor() as usize
}

/// Draw `k` items uniformly without replacement from `pool`, removing them.
fn draw_without_replacement(pool: &mut Vec<usize>, k: usize, rng: &mut Rng) -> Vec<usize> {
    use rand::Rng as _;
    debug_assert!(k <= pool.len());
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let j = rng.random_range(0..pool.len());
        out.push(pool.swap_remove(j));
    }
    out
}

fn check_draw(group: u8, requested: usize, available: usize) -> Result<()> {
    if requested > available {
        return Err(Error::InfeasibleDraw {
            group,
            requested,
            available,
        });
    }
    Ok(())
}

/// Produce one train/test split for the given scenario and training ratio.
pub fn make_split(
    d: &Dataset,
    scenario: Scenario,
    tau: f64,
    rng: &mut Rng,
) -> Result<ScenarioSplit> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::BadTrainingRatio { tau });
    }
    let mut g1 = d.group1_indices();
    let mut g2 = d.group2_indices();
    let (cap1, cap2) = (g1.len(), g2.len());
    let n_min = cap1.min(cap2);

    let (want1, want2) = match scenario.training {
        Balance::Proportional => (
            round_half_away(tau * cap1 as f64),
            round_half_away(tau * cap2 as f64),
        ),
        Balance::Equal => {
            let k = round_half_away(tau * n_min as f64);
            (k, k)
        }
    };
    check_draw(1, want1, cap1)?;
    check_draw(2, want2, cap2)?;
    let train_g1 = draw_without_replacement(&mut g1, want1, rng);
    let train_g2 = draw_without_replacement(&mut g2, want2, rng);

    let test = match (scenario.training, scenario.testing) {
        // Complement of the training set, in dataset order.
        (Balance::Proportional, Balance::Proportional) => {
            let mut rest = g1;
            rest.extend_from_slice(&g2);
            rest.sort_unstable();
            rest
        }
        (_, testing) => {
            let (take1, take2) = match testing {
                Balance::Proportional => (
                    round_half_away((1.0 - tau) * cap1 as f64),
                    round_half_away((1.0 - tau) * cap2 as f64),
                ),
                Balance::Equal => {
                    let k = round_half_away((1.0 - tau) * n_min as f64);
                    (k, k)
                }
            };
            check_draw(1, take1, g1.len())?;
            check_draw(2, take2, g2.len())?;
            let mut test = draw_without_replacement(&mut g1, take1, rng);
            test.extend(draw_without_replacement(&mut g2, take2, rng));
            test
        }
    };

    Ok(ScenarioSplit {
        train_g1,
        train_g2,
        test,
        tau,
        scenario,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Dataset, NUM_VARIABLES};
    use crate::rng::{stream, Purpose};
    use std::collections::HashSet;

    /// Dataset with `n1` positive and `n2` negative rows; features are
    /// just the row index so splits are easy to inspect.
    fn toy(n1: usize, n2: usize) -> Dataset {
        let n = n1 + n2;
        let features = (0..n).map(|i| vec![i as f64; NUM_VARIABLES]).collect();
        let labels = (0..n).map(|i| u8::from(i < n1)).collect();
        let sex = vec![None; n];
        Dataset::from_parts(features, labels, sex, (1..=NUM_VARIABLES).collect())
    }

    fn framingham_shape() -> Dataset {
        toy(622, 3520)
    }

    #[test]
    fn rounding_is_half_away_from_zero() {
        assert_eq!(round_half_away(497.6), 498);
        assert_eq!(round_half_away(269.6), 270);
        assert_eq!(round_half_away(1164.8), 1165);
        assert_eq!(round_half_away(2.5), 3);
        assert_eq!(round_half_away(2.49), 2);
        assert_eq!(round_half_away(0.0), 0);
    }

    #[test]
    fn eq_prop_sizes_match_study_table() {
        let d = framingham_shape();
        let mut rng = stream(1, Purpose::Split, 0);
        let s = make_split(&d, Scenario::EQ_PROP, 0.8, &mut rng).unwrap();
        assert_eq!((s.n1(), s.n2(), s.n3()), (498, 498, 828));
    }

    #[test]
    fn eq_eq_sizes_match_study_table() {
        let d = framingham_shape();
        let mut rng = stream(1, Purpose::Split, 0);
        let s = make_split(&d, Scenario::EQ_EQ, 0.8, &mut rng).unwrap();
        assert_eq!((s.n1(), s.n2(), s.n3()), (498, 498, 248));
    }

    #[test]
    fn prop_prop_sizes_follow_formula() {
        // n2 = [0.8 * 3520] = 2816 by the formula, not the table's printed 2819
        let d = framingham_shape();
        let mut rng = stream(1, Purpose::Split, 0);
        let s = make_split(&d, Scenario::PROP_PROP, 0.8, &mut rng).unwrap();
        assert_eq!((s.n1(), s.n2(), s.n3()), (498, 2816, 828));
    }

    #[test]
    fn prop_eq_sizes() {
        let d = framingham_shape();
        let mut rng = stream(1, Purpose::Split, 0);
        let s = make_split(&d, Scenario::PROP_EQ, 0.8, &mut rng).unwrap();
        assert_eq!((s.n1(), s.n2(), s.n3()), (498, 2816, 248));
    }

    #[test]
    fn prop_prop_covers_all_rows() {
        let d = toy(30, 70);
        let mut rng = stream(3, Purpose::Split, 5);
        let s = make_split(&d, Scenario::PROP_PROP, 0.7, &mut rng).unwrap();
        let mut seen: HashSet<usize> = HashSet::new();
        seen.extend(&s.train_g1);
        seen.extend(&s.train_g2);
        seen.extend(&s.test);
        assert_eq!(seen.len(), 100);
    }

    #[test]
    fn splits_are_disjoint_and_group_respecting() {
        let d = toy(40, 60);
        for (k, scenario) in Scenario::ALL.iter().enumerate() {
            let mut rng = stream(9, Purpose::Split, k as u64);
            let s = make_split(&d, *scenario, 0.6, &mut rng).unwrap();
            let train1: HashSet<_> = s.train_g1.iter().copied().collect();
            let train2: HashSet<_> = s.train_g2.iter().copied().collect();
            let test: HashSet<_> = s.test.iter().copied().collect();
            assert!(train1.iter().all(|&i| d.label(i) == 1));
            assert!(train2.iter().all(|&i| d.label(i) == 0));
            assert!(train1.is_disjoint(&train2));
            assert!(train1.is_disjoint(&test));
            assert!(train2.is_disjoint(&test));
        }
    }

    #[test]
    fn equal_training_forces_equal_counts() {
        let d = toy(26, 333);
        let mut rng = stream(2, Purpose::Split, 0);
        let s = make_split(&d, Scenario::EQ_EQ, 0.5, &mut rng).unwrap();
        assert_eq!(s.n1(), s.n2());
        assert_eq!(s.training_prevalence().unwrap(), 0.5);
    }

    #[test]
    fn same_stream_reproduces_split() {
        let d = toy(50, 150);
        let a = make_split(&d, Scenario::EQ_PROP, 0.8, &mut stream(42, Purpose::Split, 7)).unwrap();
        let b = make_split(&d, Scenario::EQ_PROP, 0.8, &mut stream(42, Purpose::Split, 7)).unwrap();
        assert_eq!(a.train_g1, b.train_g1);
        assert_eq!(a.train_g2, b.train_g2);
        assert_eq!(a.test, b.test);
    }

    #[test]
    fn training_prevalence_values() {
        let d = framingham_shape();
        let mut rng = stream(1, Purpose::Split, 0);
        let s = make_split(&d, Scenario::PROP_PROP, 0.8, &mut rng).unwrap();
        // 498 / 3314
        assert!((s.training_prevalence().unwrap() - 0.1503).abs() < 5e-4);

        let tiny = ScenarioSplit {
            train_g1: vec![0],
            train_g2: vec![1, 2, 3],
            test: vec![],
            tau: 0.5,
            scenario: Scenario::PROP_PROP,
        };
        assert_eq!(tiny.training_prevalence().unwrap(), 0.25);
    }

    #[test]
    fn infeasible_draw_names_group() {
        // N1=5, tau=0.5: train takes [2.5]=3, leaving 2; proportional testing
        // then wants [2.5]=3 from group 1.
        let d = toy(5, 100);
        let mut rng = stream(0, Purpose::Split, 0);
        match make_split(&d, Scenario::EQ_PROP, 0.5, &mut rng) {
            Err(Error::InfeasibleDraw {
                group,
                requested,
                available,
            }) => {
                assert_eq!(group, 1);
                assert_eq!(requested, 3);
                assert_eq!(available, 2);
            }
            other => panic!("expected InfeasibleDraw, got {other:?}"),
        }
    }

    #[test]
    fn tau_bounds_are_enforced() {
        let d = toy(10, 10);
        for tau in [0.0, 1.0, -0.2, 1.7] {
            let mut rng = stream(0, Purpose::Split, 0);
            assert!(matches!(
                make_split(&d, Scenario::EQ_EQ, tau, &mut rng),
                Err(Error::BadTrainingRatio { .. })
            ));
        }
    }

    #[test]
    fn scenario_names_round_trip() {
        for s in Scenario::ALL {
            let parsed: Scenario = s.cli_name().parse().unwrap();
            assert_eq!(parsed, s);
        }
        assert!("both".parse::<Scenario>().is_err());
    }
}
