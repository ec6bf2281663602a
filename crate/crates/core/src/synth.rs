//! Synthetic two-group datasets for demos and tests when no study CSV is
//! at hand.

use rand::Rng as _;
use rand_chacha::rand_core::SeedableRng;

use crate::dataset::{Dataset, Sex, NUM_VARIABLES};
use crate::rng::Rng;

/// Standard normal draw (Box-Muller).
fn normal(rng: &mut Rng) -> f64 {
    let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Two Gaussian groups over the seven study variables: positives shifted
/// by `shift` on the first `informative` axes, unit noise elsewhere. Sex
/// tags alternate so per-sex analyses have rows to work with.
pub fn two_group_gaussian(
    n_positive: usize,
    n_negative: usize,
    shift: f64,
    informative: usize,
    seed: u64,
) -> Dataset {
    let mut rng = Rng::seed_from_u64(seed);
    let n = n_positive + n_negative;
    let mut features = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    let mut sex = Vec::with_capacity(n);
    for i in 0..n {
        let positive = i < n_positive;
        let row: Vec<f64> = (0..NUM_VARIABLES)
            .map(|j| {
                let mu = if positive && j < informative { shift } else { 0.0 };
                mu + normal(&mut rng)
            })
            .collect();
        features.push(row);
        labels.push(u8::from(positive));
        sex.push(Some(if i % 2 == 0 { Sex::Male } else { Sex::Female }));
    }
    Dataset::from_parts(features, labels, sex, (1..=NUM_VARIABLES).collect())
}

/// Render a dataset as CSV text in the default Kaggle-style schema, the
/// shape `ingest_csv` reads back.
pub fn to_csv(d: &Dataset) -> String {
    let mut out = String::from("male,age,totChol,sysBP,diaBP,BMI,heartRate,cigsPerDay,TenYearCHD\n");
    for i in 0..d.n() {
        let row = d.feature_row(i);
        let sex = match d.sex_of(i) {
            Some(Sex::Male) => "1",
            Some(Sex::Female) => "0",
            None => "",
        };
        out.push_str(&format!(
            "{sex},{},{},{},{},{},{},{},{}\n",
            row[0],
            row[1],
            row[2],
            row[3],
            row[4],
            row[5],
            row[6],
            d.label(i)
        ));
    }
    out
}
