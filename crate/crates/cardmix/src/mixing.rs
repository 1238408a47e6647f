//! Exact distribution evolution at small deck sizes, separation and
//! total-variation distances, the mutation-bound inequality, and
//! scaling-exponent fits for the Monte Carlo experiments.
//!
//! Two independent exact backends produce deck laws: state-space evolution
//! (over the ordered process states, or over a quotient kernel plus its
//! collection law) and full path enumeration in the mutation module. They
//! must agree exactly wherever both run; tests assert that.

use std::collections::BTreeMap;

use num::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{from_int, one, to_f64, zero, Exact};
use crate::perm::Permutation;
use crate::process::{DeckKernel, Kernel, ProcessSpec, ProcessState};
use crate::stopping::{pair_count, pair_index};

/// Exact law over decks; absent permutations have probability zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactDistribution {
    pub n: usize,
    pub support: BTreeMap<Permutation, Exact>,
}

impl ExactDistribution {
    pub fn point_mass(p: Permutation) -> Self {
        let n = p.n();
        let mut support = BTreeMap::new();
        support.insert(p, one());
        ExactDistribution { n, support }
    }

    pub fn uniform(n: usize) -> Self {
        let mass = crate::exact::inv_factorial(n);
        ExactDistribution {
            n,
            support: Permutation::all(n)
                .into_iter()
                .map(|p| (p, mass.clone()))
                .collect(),
        }
    }

    pub fn probability(&self, p: &Permutation) -> Exact {
        self.support.get(p).cloned().unwrap_or_else(zero)
    }

    pub fn total(&self) -> Exact {
        self.support.values().cloned().sum()
    }
}

/// Separation distance from uniform: `max_π (1 − n!·P(π))`.
pub fn separation_distance(d: &ExactDistribution) -> Exact {
    let fact: Exact = Exact::from_integer(crate::exact::factorial_big(d.n));
    let mut worst = zero();
    for p in Permutation::all(d.n) {
        let s = one() - fact.clone() * d.probability(&p);
        if s > worst {
            worst = s;
        }
    }
    worst
}

/// Total variation distance from uniform: `(1/2)·Σ |P(π) − 1/n!|`.
pub fn total_variation(d: &ExactDistribution) -> Exact {
    let unif = crate::exact::inv_factorial(d.n);
    let mut acc = zero();
    for p in Permutation::all(d.n) {
        acc += crate::exact::abs_diff(&d.probability(&p), &unif);
    }
    acc / from_int(2)
}

// ---------------------------------------------------------------------------
// State-space evolution backends
// ---------------------------------------------------------------------------

/// Evolve a kernel's exact state distribution for `t` steps.
pub fn evolve_kernel<K: Kernel>(kernel: &K, t: usize) -> Result<BTreeMap<K::State, Exact>>
where
    K::State: Ord,
{
    let mut dist: BTreeMap<K::State, Exact> = BTreeMap::new();
    dist.insert(kernel.start(), one());
    for _ in 0..t {
        let mut next: BTreeMap<K::State, Exact> = BTreeMap::new();
        for (s, p) in &dist {
            for (r, q) in kernel.transitions(s) {
                let (ns, _) = kernel.apply(s, &r)?;
                *next.entry(ns).or_insert_with(zero) += p.clone() * q;
            }
        }
        dist = next;
    }
    Ok(dist)
}

/// Deck law of a deck-kernel state distribution, through the collection.
pub fn deck_law<K: DeckKernel>(
    kernel: &K,
    dist: &BTreeMap<K::State, Exact>,
) -> ExactDistribution
where
    K::State: Ord,
{
    let mut support: BTreeMap<Permutation, Exact> = BTreeMap::new();
    for (s, p) in dist {
        for (c, cp) in kernel.collect_transitions(s) {
            *support
                .entry(kernel.assemble(s, &c))
                .or_insert_with(zero) += p.clone() * cp;
        }
    }
    ExactDistribution {
        n: kernel.n(),
        support,
    }
}

/// Exact deck law after `t` steps of a process, by evolution over the
/// ordered process states and projection. Guarded to small decks.
pub fn exact_distribution(spec: &ProcessSpec, t: usize) -> Result<ExactDistribution> {
    spec.validate()?;
    let mut dist: BTreeMap<ProcessState, Exact> = BTreeMap::new();
    dist.insert(spec.canonical_start(), one());
    for _ in 0..t {
        let mut next: BTreeMap<ProcessState, Exact> = BTreeMap::new();
        for (s, p) in &dist {
            for (_, ns, q) in spec.enumerate_transitions(s)? {
                *next.entry(ns).or_insert_with(zero) += p.clone() * q;
            }
        }
        dist = next;
    }
    let mut support: BTreeMap<Permutation, Exact> = BTreeMap::new();
    for (s, p) in dist {
        *support.entry(spec.project(&s)).or_insert_with(zero) += p;
    }
    Ok(ExactDistribution { n: spec.n, support })
}

// ---------------------------------------------------------------------------
// Coverage-augmented evolution: exact stopping-tail probabilities
// ---------------------------------------------------------------------------

/// Exact `P(T > t)` for the all-pairs rule at `t = 0..=t_max`, by evolving
/// the state augmented with the pair-coverage bitset.
pub fn all_pairs_tail_exact<K: DeckKernel>(kernel: &K, t_max: usize) -> Result<Vec<Exact>>
where
    K::State: Ord,
{
    let n = kernel.n();
    let k = pair_count(n);
    assert!(k <= 63, "coverage bitset limited to 63 pairs");
    let full: u64 = (1u64 << k) - 1;
    let mut dist: BTreeMap<(K::State, u64), Exact> = BTreeMap::new();
    dist.insert((kernel.start(), 0), one());
    let mut tails = Vec::with_capacity(t_max + 1);
    let uncovered_mass = |d: &BTreeMap<(K::State, u64), Exact>| -> Exact {
        d.iter()
            .filter(|((_, cover), _)| *cover != full)
            .map(|(_, p)| p.clone())
            .sum()
    };
    tails.push(uncovered_mass(&dist));
    for _ in 0..t_max {
        let mut next: BTreeMap<(K::State, u64), Exact> = BTreeMap::new();
        for ((s, cover), p) in &dist {
            for (r, q) in kernel.transitions(s) {
                let (ns, events) = kernel.apply(s, &r)?;
                let mut ncover = *cover;
                for ev in &events {
                    ncover |= 1u64 << pair_index(n, ev.pair.i, ev.pair.j);
                }
                *next.entry((ns, ncover)).or_insert_with(zero) += p.clone() * q;
            }
        }
        dist = next;
        tails.push(uncovered_mass(&dist));
    }
    Ok(tails)
}

/// Exact conditional deck law given full pair coverage by time `t`; the
/// second backend for the conditioned distribution (the first enumerates
/// paths). Also returns the conditioning mass.
pub fn conditioned_deck_law_exact<K: DeckKernel>(
    kernel: &K,
    t: usize,
) -> Result<(ExactDistribution, Exact)>
where
    K::State: Ord,
{
    let n = kernel.n();
    let k = pair_count(n);
    let full: u64 = (1u64 << k) - 1;
    let mut dist: BTreeMap<(K::State, u64), Exact> = BTreeMap::new();
    dist.insert((kernel.start(), 0), one());
    for _ in 0..t {
        let mut next: BTreeMap<(K::State, u64), Exact> = BTreeMap::new();
        for ((s, cover), p) in &dist {
            for (r, q) in kernel.transitions(s) {
                let (ns, events) = kernel.apply(s, &r)?;
                let mut ncover = *cover;
                for ev in &events {
                    ncover |= 1u64 << pair_index(n, ev.pair.i, ev.pair.j);
                }
                *next.entry((ns, ncover)).or_insert_with(zero) += p.clone() * q;
            }
        }
        dist = next;
    }
    let mut mass = zero();
    let mut support: BTreeMap<Permutation, Exact> = BTreeMap::new();
    for ((s, cover), p) in &dist {
        if *cover != full {
            continue;
        }
        mass += p.clone();
        for (c, cp) in kernel.collect_transitions(s) {
            *support.entry(kernel.assemble(s, &c)).or_insert_with(zero) += p.clone() * cp;
        }
    }
    if mass.is_zero() {
        return Err(Error::EmptyCondition);
    }
    for v in support.values_mut() {
        *v /= mass.clone();
    }
    Ok((
        ExactDistribution {
            n: kernel.n(),
            support,
        },
        mass,
    ))
}

/// One row of the mutation-bound table.
#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    pub t: usize,
    pub sep: String,
    pub tv: String,
    pub p_t_gt_t: String,
    pub sep_f64: f64,
    pub tv_f64: f64,
    pub p_f64: f64,
    pub holds: bool,
}

/// Exact check that separation distance is bounded by the all-pairs tail:
/// `sep(t) ≤ P(T > t)` at every `t` in the grid.
pub fn verify_mutation_bound<K: DeckKernel>(kernel: &K, t_max: usize) -> Result<Vec<BoundRow>>
where
    K::State: Ord,
{
    let tails = all_pairs_tail_exact(kernel, t_max)?;
    let mut rows = Vec::with_capacity(t_max + 1);
    let mut dist: BTreeMap<K::State, Exact> = BTreeMap::new();
    dist.insert(kernel.start(), one());
    for t in 0..=t_max {
        if t > 0 {
            let mut next: BTreeMap<K::State, Exact> = BTreeMap::new();
            for (s, p) in &dist {
                for (r, q) in kernel.transitions(s) {
                    let (ns, _) = kernel.apply(s, &r)?;
                    *next.entry(ns).or_insert_with(zero) += p.clone() * q;
                }
            }
            dist = next;
        }
        let law = deck_law(kernel, &dist);
        let sep = separation_distance(&law);
        let tv = total_variation(&law);
        let tail = tails[t].clone();
        rows.push(BoundRow {
            t,
            holds: sep <= tail,
            sep_f64: to_f64(&sep),
            tv_f64: to_f64(&tv),
            p_f64: to_f64(&tail),
            sep: crate::exact::display(&sep),
            tv: crate::exact::display(&tv),
            p_t_gt_t: crate::exact::display(&tail),
        });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Scaling fits
// ---------------------------------------------------------------------------

/// A statistic measured over increasing deck sizes.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingSeries {
    pub statistic: String,
    /// `(n, value, standard error)` with strictly increasing `n`.
    pub points: Vec<(usize, f64, f64)>,
}

impl ScalingSeries {
    pub fn new(statistic: impl Into<String>, points: Vec<(usize, f64, f64)>) -> Result<Self> {
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Validation("deck sizes must strictly increase".into()));
        }
        if points.iter().any(|&(_, v, _)| v <= 0.0) {
            return Err(Error::Validation("statistics must be positive".into()));
        }
        Ok(ScalingSeries {
            statistic: statistic.into(),
            points,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub statistic: String,
    pub exponent: f64,
    pub stderr: f64,
    pub r2: f64,
    /// Slope after dividing the statistic by `ln n`.
    pub corrected_exponent: f64,
}

/// Least-squares slope of `ln(statistic)` against `ln(n)`, with the
/// log-corrected variant reported alongside.
pub fn scaling_fit(series: &ScalingSeries) -> Result<FitReport> {
    let m = series.points.len();
    if m < 3 {
        return Err(Error::Validation(format!(
            "scaling fit needs at least 3 points, got {m}"
        )));
    }
    let xs: Vec<f64> = series.points.iter().map(|&(n, _, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = series.points.iter().map(|&(_, v, _)| v.ln()).collect();
    let (slope, stderr, r2) = least_squares(&xs, &ys);
    let ys_corr: Vec<f64> = series
        .points
        .iter()
        .map(|&(n, v, _)| (v / (n as f64).ln()).ln())
        .collect();
    let (corrected, _, _) = least_squares(&xs, &ys_corr);
    Ok(FitReport {
        statistic: series.statistic.clone(),
        exponent: slope,
        stderr,
        r2,
        corrected_exponent: corrected,
    })
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let m = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / m;
    let ybar = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - ybar).powi(2)).sum();
    let dof = (xs.len() as f64 - 2.0).max(1.0);
    let stderr = (ss_res / dof / sxx).sqrt();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    (slope, stderr, r2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;
    use crate::factor::TranspositionSequence;
    use crate::mutate;
    use crate::process::quotient::{QuotWash, QuotWashLong};
    use crate::process::walks::RttKernel;
    use crate::process::Family;
    use crate::stopping::StoppingRule;

    #[test]
    fn distances_on_trivial_distributions() {
        let unif = ExactDistribution::uniform(3);
        assert_eq!(separation_distance(&unif), zero());
        assert_eq!(total_variation(&unif), zero());

        let point = ExactDistribution::point_mass(Permutation::identity(3));
        assert_eq!(separation_distance(&point), one());
        assert_eq!(total_variation(&point), one() - ratio(1, 6));

        // A distribution with minimum probability (1/2)·(1/n!) has
        // separation exactly 1/2.
        let n = 3;
        let mut support = BTreeMap::new();
        let low = ratio(1, 12);
        let rest = (one() - low.clone()) / from_int(5);
        for (k, p) in Permutation::all(n).into_iter().enumerate() {
            support.insert(p, if k == 0 { low.clone() } else { rest.clone() });
        }
        let d = ExactDistribution { n, support };
        assert_eq!(d.total(), one());
        assert_eq!(separation_distance(&d), ratio(1, 2));
    }

    #[test]
    fn tv_bounded_by_separation_on_random_distributions() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        for _ in 0..1000 {
            // Random rational distribution over S_3 with denominator 360.
            let mut weights: Vec<i64> = (0..6).map(|_| rng.random_range(0..=60i64)).collect();
            let total: i64 = weights.iter().sum();
            if total == 0 {
                weights[0] = 1;
            }
            let total: i64 = weights.iter().sum();
            let support: BTreeMap<Permutation, Exact> = Permutation::all(3)
                .into_iter()
                .zip(&weights)
                .map(|(p, &w)| (p, ratio(w, total)))
                .collect();
            let d = ExactDistribution { n: 3, support };
            assert!(total_variation(&d) <= separation_distance(&d));
        }
    }

    #[test]
    fn exact_distribution_t0_is_point_mass_everywhere() {
        for family in Family::ALL {
            let spec = ProcessSpec::new(family, 3);
            let d = exact_distribution(&spec, 0).unwrap();
            assert_eq!(d.probability(&Permutation::identity(3)), one(), "{family}");
        }
    }

    #[test]
    fn ordered_and_quotient_backends_agree_for_wash1d() {
        // The two formulations of the same process have identical deck
        // laws — this is the computational proof that pile orders stay
        // uniform given positions under slot insertion.
        let spec = ProcessSpec::new(Family::Wash1d, 3);
        let q = QuotWash::line(3);
        for t in 0..=4 {
            let ordered = exact_distribution(&spec, t).unwrap();
            let quotient = deck_law(&q, &evolve_kernel(&q, t).unwrap());
            assert_eq!(ordered, quotient, "t = {t}");
            assert_eq!(ordered.total(), one());
        }
    }

    #[test]
    fn evolution_agrees_with_path_enumeration() {
        // Independent oracle pair: state evolution vs full path
        // enumeration, exact equality.
        let q = QuotWash::line(3);
        for t in 0..=4 {
            let by_states = deck_law(&q, &evolve_kernel(&q, t).unwrap());
            let (by_paths, mass) = mutate::conditioned_distribution(&q, t, None).unwrap();
            assert_eq!(mass, one());
            for (p, prob) in by_paths {
                assert_eq!(by_states.probability(&p), prob, "t = {t}");
            }
        }
    }

    #[test]
    fn long_wash_gsr_and_insertion_have_equal_state_distributions() {
        // Equivalence of the two formulations of the long-range wash, as
        // exact distributions over ordered pile states.
        use crate::process::washlong::WashLongKernel;
        for t in 0..=2 {
            let gsr = WashLongKernel::gsr(3, ratio(1, 2));
            let ins = WashLongKernel::insertion(3, ratio(1, 2));
            let a = evolve_kernel(&gsr, t).unwrap();
            let b = evolve_kernel(&ins, t).unwrap();
            assert_eq!(a, b, "t = {t}");
            let total: Exact = a.values().cloned().sum();
            assert_eq!(total, one());
        }
    }

    #[test]
    fn long_wash_quotient_matches_ordered_law() {
        use crate::process::washlong::WashLongKernel;
        let gsr = WashLongKernel::gsr(3, ratio(1, 2));
        let q = QuotWashLong::new(3, ratio(1, 2));
        for t in 0..=2 {
            let ordered = evolve_kernel(&gsr, t).unwrap();
            let mut projected: BTreeMap<Permutation, Exact> = BTreeMap::new();
            for (s, p) in &ordered {
                *projected
                    .entry(crate::process::project_piles(3, s))
                    .or_insert_with(zero) += p.clone();
            }
            let by_quotient = deck_law(&q, &evolve_kernel(&q, t).unwrap());
            assert_eq!(
                ExactDistribution {
                    n: 3,
                    support: projected
                },
                by_quotient,
                "t = {t}"
            );
        }
    }

    #[test]
    fn random_to_top_separation_decays_below_one_percent() {
        let k = RttKernel { n: 3 };
        let mut found = None;
        for t in 0..=40 {
            let law = deck_law(&k, &evolve_kernel(&k, t).unwrap());
            if separation_distance(&law) < ratio(1, 100) {
                found = Some(t);
                break;
            }
        }
        let t = found.expect("random-to-top mixes");
        assert!(t > 3, "cannot mix before every card has plausibly moved");
    }

    #[test]
    fn all_pairs_tail_is_monotone_and_starts_at_one() {
        let q = QuotWash::line(3);
        let tails = all_pairs_tail_exact(&q, 8).unwrap();
        assert_eq!(tails[0], one());
        for w in tails.windows(2) {
            assert!(w[1] <= w[0], "tail must be nonincreasing");
        }
        assert!(tails[8] < one());
    }

    #[test]
    fn conditioned_backends_agree() {
        let q = QuotWash::line(3);
        let (by_states, mass_s) = conditioned_deck_law_exact(&q, 3).unwrap();
        let (by_paths, mass_p) =
            mutate::conditioned_distribution(&q, 3, Some(StoppingRule::AllPairs)).unwrap();
        assert_eq!(mass_s, mass_p);
        for (p, prob) in by_paths {
            assert_eq!(by_states.probability(&p), prob);
        }
    }

    #[test]
    fn mutation_bound_holds_for_wash_small_grid() {
        let q = QuotWash::line(3);
        let rows = verify_mutation_bound(&q, 5).unwrap();
        assert!(rows.iter().all(|r| r.holds), "{rows:?}");
        // t = 0: separation 1 ≤ tail 1.
        assert_eq!(rows[0].sep, "1");
        assert_eq!(rows[0].p_t_gt_t, "1");
    }

    #[test]
    fn scaling_fit_synthetic_cubic() {
        let series = ScalingSeries::new(
            "cubic",
            vec![
                (8, 8.0f64.powi(3), 0.0),
                (16, 16.0f64.powi(3), 0.0),
                (32, 32.0f64.powi(3), 0.0),
                (64, 64.0f64.powi(3), 0.0),
            ],
        )
        .unwrap();
        let fit = scaling_fit(&series).unwrap();
        assert!((fit.exponent - 3.0).abs() < 1e-12);
        assert!(fit.stderr < 1e-12);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scaling_fit_synthetic_cubic_log() {
        let pts: Vec<(usize, f64, f64)> = [8usize, 16, 32, 64]
            .iter()
            .map(|&n| (n, (n as f64).powi(3) * (n as f64).ln(), 0.0))
            .collect();
        let series = ScalingSeries::new("cubic-log", pts).unwrap();
        let fit = scaling_fit(&series).unwrap();
        assert!(fit.exponent > 3.0 && fit.exponent < 3.5);
        assert!((fit.corrected_exponent - 3.0).abs() < 1e-9);
    }

    #[test]
    fn scaling_fit_needs_three_points() {
        let series = ScalingSeries::new("short", vec![(2, 1.0, 0.0), (4, 2.0, 0.0)]).unwrap();
        assert!(scaling_fit(&series).is_err());
        let _ = TranspositionSequence::all_distinct(3);
    }
}
