//! Seeded Monte Carlo experiments: per-pair interaction-time scaling over
//! a grid of deck sizes, the combining-log ratio table, the spanning-vs-
//! coupon-collector experiment for random transposition sequences, and a
//! plain simulation driver for event/projection traces.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::factor::ReachableBuilder;
use crate::mixing::{scaling_fit, FitReport, ScalingSeries};
use crate::perm::{Permutation, Transposition};
use crate::process::{InteractionEvent, ProcessSpec};
use crate::seeding::replica_rng;
use crate::stopping::{combining_row, pair_time_study, CombiningRow, ReplicaPairStats};

/// Pair-time statistics for a family over a grid of deck sizes; feeds both
/// the scaling fit and the combining-log table from one set of runs.
#[derive(Debug, Clone)]
pub struct PairTimeStudy {
    pub family: String,
    pub n_list: Vec<usize>,
    pub stats: Vec<Vec<ReplicaPairStats>>,
}

pub fn run_pair_time_study(
    spec_for: impl Fn(usize) -> ProcessSpec,
    n_list: &[usize],
    replicas: usize,
    seed: u64,
) -> Result<PairTimeStudy> {
    let family = spec_for(n_list[0]).family.id().to_string();
    let stats = n_list
        .iter()
        .map(|&n| pair_time_study(&spec_for(n), replicas, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(PairTimeStudy {
        family,
        n_list: n_list.to_vec(),
        stats,
    })
}

impl PairTimeStudy {
    /// Mean per-pair interaction time per deck size, with the standard
    /// error of the mean over replicas.
    pub fn scaling_points(&self) -> Vec<(usize, f64, f64)> {
        self.n_list
            .iter()
            .zip(&self.stats)
            .map(|(&n, stats)| {
                let means: Vec<f64> = stats.iter().map(|s| s.pair_mean).collect();
                let m = means.len() as f64;
                let mean = means.iter().sum::<f64>() / m;
                let var = means.iter().map(|x| (x - mean).powi(2)).sum::<f64>()
                    / (m - 1.0).max(1.0);
                (n, mean, (var / m).sqrt())
            })
            .collect()
    }

    pub fn scaling_series(&self) -> Result<ScalingSeries> {
        ScalingSeries::new(
            format!("{} mean per-pair interaction time", self.family),
            self.scaling_points(),
        )
    }

    pub fn fit(&self) -> Result<FitReport> {
        scaling_fit(&self.scaling_series()?)
    }

    pub fn combining_rows(&self) -> Vec<CombiningRow> {
        self.n_list
            .iter()
            .zip(&self.stats)
            .map(|(&n, stats)| combining_row(n, stats))
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Spanning vs coupon collecting for random transposition sequences
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpanningRow {
    pub n: usize,
    pub seed: u64,
    /// First prefix length whose subsequence products span all of S_n.
    pub min_spanning_prefix: usize,
    /// First prefix length containing every transposition at least once.
    pub coupon_collector_steps: usize,
}

/// For each replica, draw i.i.d. uniform transpositions and record when
/// the prefix first spans S_n versus when it first contains every
/// transposition. Spanning never comes later than coupon collection.
pub fn spanning_experiment(n: usize, replicas: usize, seed: u64) -> Result<Vec<SpanningRow>> {
    let rows: Result<Vec<SpanningRow>> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(seed, 2, r as u64);
            let all = Transposition::all(n);
            let mut builder = ReachableBuilder::new(n)?;
            let mut seen = vec![false; all.len()];
            let mut seen_count = 0usize;
            let mut spanning: Option<usize> = None;
            let mut coupon: Option<usize> = None;
            let mut k = 0usize;
            while spanning.is_none() || coupon.is_none() {
                k += 1;
                let idx = rng.random_range(0..all.len());
                if !seen[idx] {
                    seen[idx] = true;
                    seen_count += 1;
                    if seen_count == all.len() && coupon.is_none() {
                        coupon = Some(k);
                    }
                }
                if builder.push(all[idx]) && spanning.is_none() {
                    spanning = Some(k);
                }
            }
            Ok(SpanningRow {
                n,
                seed: r as u64,
                min_spanning_prefix: spanning.unwrap(),
                coupon_collector_steps: coupon.unwrap(),
            })
        })
        .collect();
    rows
}

/// Summary statistics of a spanning experiment.
#[derive(Debug, Clone, Serialize)]
pub struct SpanningSummary {
    pub n: usize,
    pub replicas: usize,
    pub spanning_mean: f64,
    pub spanning_median: f64,
    pub coupon_mean: f64,
    pub coupon_median: f64,
    /// Fraction of replicas where spanning strictly preceded coupon
    /// collection.
    pub spanning_strictly_earlier: f64,
}

pub fn summarize_spanning(rows: &[SpanningRow]) -> SpanningSummary {
    let m = rows.len();
    let mean = |f: &dyn Fn(&SpanningRow) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / m as f64;
    let median = |mut v: Vec<usize>| -> f64 {
        v.sort_unstable();
        if v.len() % 2 == 1 {
            v[v.len() / 2] as f64
        } else {
            (v[v.len() / 2 - 1] + v[v.len() / 2]) as f64 / 2.0
        }
    };
    SpanningSummary {
        n: rows.first().map(|r| r.n).unwrap_or(0),
        replicas: m,
        spanning_mean: mean(&|r| r.min_spanning_prefix as f64),
        spanning_median: median(rows.iter().map(|r| r.min_spanning_prefix).collect()),
        coupon_mean: mean(&|r| r.coupon_collector_steps as f64),
        coupon_median: median(rows.iter().map(|r| r.coupon_collector_steps).collect()),
        spanning_strictly_earlier: rows
            .iter()
            .filter(|r| r.min_spanning_prefix < r.coupon_collector_steps)
            .count() as f64
            / m as f64,
    }
}

// ---------------------------------------------------------------------------
// Plain simulation traces
// ---------------------------------------------------------------------------

/// One replica's trace: all events plus the projected deck after each step.
pub struct SimTrace {
    pub replica: usize,
    pub events: Vec<InteractionEvent>,
    pub projections: Vec<(usize, Permutation)>,
}

pub fn simulate_traces(
    spec: &ProcessSpec,
    steps: usize,
    replicas: usize,
    seed: u64,
) -> Result<Vec<SimTrace>> {
    spec.validate()?;
    Ok((0..replicas)
        .into_par_iter()
        .map(|replica| {
            let mut rng = replica_rng(seed, 3, replica as u64);
            let mut state = spec.canonical_start();
            let mut events = Vec::new();
            let mut projections = Vec::with_capacity(steps);
            for t in 1..=steps {
                let (_, next, evs) = spec.sample_step(&state, &mut rng);
                events.extend(evs.into_iter().map(|e| InteractionEvent::at(t, e)));
                state = next;
                projections.push((t, spec.project(&state)));
            }
            SimTrace {
                replica,
                events,
                projections,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::Family;

    #[test]
    fn spanning_never_later_than_coupon() {
        for n in [3usize, 4] {
            let rows = spanning_experiment(n, 60, 5).unwrap();
            assert_eq!(rows.len(), 60);
            for row in &rows {
                assert!(row.min_spanning_prefix <= row.coupon_collector_steps);
                // Spanning cannot occur before n-1 transpositions have
                // appeared (fewer cannot connect all labels).
                assert!(row.min_spanning_prefix >= n - 1);
            }
            let summary = summarize_spanning(&rows);
            assert!(summary.spanning_mean <= summary.coupon_mean);
        }
    }

    #[test]
    fn spanning_is_deterministic_per_seed() {
        let a = spanning_experiment(4, 25, 11).unwrap();
        let b = spanning_experiment(4, 25, 11).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.min_spanning_prefix, y.min_spanning_prefix);
            assert_eq!(x.coupon_collector_steps, y.coupon_collector_steps);
        }
    }

    #[test]
    fn small_scaling_study_produces_sane_fit() {
        // A fast smoke run: tiny replica count, small grid; the real
        // bracket assertions live in the acceptance suite.
        let study = run_pair_time_study(
            |n| ProcessSpec::new(Family::RandomToRandom, n),
            &[8, 12, 16, 24],
            60,
            17,
        )
        .unwrap();
        let fit = study.fit().unwrap();
        assert!(
            fit.exponent > 1.3 && fit.exponent < 2.7,
            "random-to-random pair-time exponent {} wildly off",
            fit.exponent
        );
        let rows = study.combining_rows();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.ratio.is_finite() && r.ratio > 0.0));
    }

    #[test]
    fn simulation_traces_are_reproducible() {
        let spec = ProcessSpec::new(Family::Wash1d, 4);
        let a = simulate_traces(&spec, 12, 3, 99).unwrap();
        let b = simulate_traces(&spec, 12, 3, 99).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.events, y.events);
            assert_eq!(x.projections, y.projections);
        }
        // Projection of the canonical start is the identity, and each
        // projected state is a genuine permutation (constructor-enforced).
        let spec = ProcessSpec::new(Family::Wash1dLong, 4);
        let traces = simulate_traces(&spec, 6, 2, 1).unwrap();
        assert!(!traces[0].projections.is_empty());
    }
}
