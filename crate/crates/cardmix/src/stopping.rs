//! Interaction tracking and the two stopping rules built on it: the
//! all-pairs time `T` (earliest time every unordered pair has interacted)
//! and the sequential time `T_n` (nested windows in which card `i` meets
//! every other card inside window `i`).
//!
//! Half-step events of the long-range wash are attributed to their
//! enclosing integer step here.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::Transposition;
use crate::process::{Family, InteractionEvent, ProcessSpec};
use crate::seeding::replica_rng;

/// Canonical index of an unordered pair in `0..C(n,2)`.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(1 <= i && i < j && j <= n);
    // Pairs ordered lexicographically: (1,2), (1,3), ..., (n-1,n).
    (i - 1) * n - i * (i - 1) / 2 + (j - i) - 1
}

pub fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Symmetric table of the last interaction time per pair, plus an optional
/// per-card window start used by the sequential rule.
#[derive(Debug, Clone)]
pub struct InteractionMatrix {
    pub n: usize,
    last: Vec<Option<usize>>,
    pub since: Option<usize>,
}

impl InteractionMatrix {
    pub fn new(n: usize) -> Self {
        InteractionMatrix {
            n,
            last: vec![None; pair_count(n)],
            since: None,
        }
    }

    pub fn last_time(&self, pair: Transposition) -> Option<usize> {
        self.last[pair_index(self.n, pair.i, pair.j)]
    }

    /// Fold one step's events in; later times overwrite earlier ones.
    pub fn track(&mut self, events: &[InteractionEvent]) {
        for ev in events {
            let slot = &mut self.last[pair_index(self.n, ev.pair.i, ev.pair.j)];
            *slot = Some(slot.map_or(ev.time, |t| t.max(ev.time)));
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StoppingRule {
    AllPairs,
    Sequential,
}

impl StoppingRule {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "all-pairs" => Ok(StoppingRule::AllPairs),
            "sequential" => Ok(StoppingRule::Sequential),
            _ => Err(Error::Validation(format!("unknown stopping rule {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StoppingReport {
    pub rule: StoppingRule,
    pub achieved: bool,
    pub time: Option<usize>,
    /// `T_0..T_n` for the sequential rule, as far as they were reached.
    pub sequential_times: Option<Vec<usize>>,
}

/// Earliest time at which every unordered pair has at least one event.
pub fn all_pairs_time(events: &[InteractionEvent], n: usize) -> StoppingReport {
    let mut tracker = AllPairsTracker::new(n);
    for ev in events {
        tracker.note(ev.time, ev.pair);
    }
    StoppingReport {
        rule: StoppingRule::AllPairs,
        achieved: tracker.done(),
        time: tracker.completion_time(),
        sequential_times: None,
    }
}

/// Nested windows: `T_0 = 0`; `T_i` is the earliest time such that card
/// `i` has an event with every other card strictly after `T_{i-1}` and at
/// or before `T_i`.
pub fn sequential_times(events: &[InteractionEvent], n: usize) -> StoppingReport {
    let mut tracker = SequentialTracker::new(n);
    for ev in events {
        tracker.note(ev.time, ev.pair);
    }
    let achieved = tracker.done();
    StoppingReport {
        rule: StoppingRule::Sequential,
        achieved,
        time: if achieved {
            tracker.times.last().copied()
        } else {
            None
        },
        sequential_times: Some(tracker.times.clone()),
    }
}

/// Streaming tracker for the all-pairs rule; feed events in time order.
#[derive(Debug, Clone)]
pub struct AllPairsTracker {
    n: usize,
    first: Vec<Option<usize>>,
    missing: usize,
    completed_at: Option<usize>,
}

impl AllPairsTracker {
    pub fn new(n: usize) -> Self {
        AllPairsTracker {
            n,
            first: vec![None; pair_count(n)],
            missing: pair_count(n),
            completed_at: if n < 2 { Some(0) } else { None },
        }
    }

    pub fn note(&mut self, time: usize, pair: Transposition) {
        let slot = &mut self.first[pair_index(self.n, pair.i, pair.j)];
        if slot.is_none() {
            *slot = Some(time);
            self.missing -= 1;
            if self.missing == 0 && self.completed_at.is_none() {
                self.completed_at = Some(time);
            }
        }
    }

    pub fn done(&self) -> bool {
        self.completed_at.is_some()
    }

    pub fn completion_time(&self) -> Option<usize> {
        self.completed_at
    }

    /// First interaction time of every pair, if all are set.
    pub fn first_times(&self) -> Option<Vec<usize>> {
        self.first.iter().copied().collect()
    }
}

/// Streaming tracker for the sequential rule; feed events in time order.
#[derive(Debug, Clone)]
pub struct SequentialTracker {
    n: usize,
    card: usize,
    window_start: usize,
    seen: Vec<bool>,
    missing: usize,
    /// `T_0..T_i` reached so far.
    pub times: Vec<usize>,
}

impl SequentialTracker {
    pub fn new(n: usize) -> Self {
        let mut tracker = SequentialTracker {
            n,
            card: 1,
            window_start: 0,
            seen: vec![false; n + 1],
            missing: n.saturating_sub(1),
            times: vec![0],
        };
        tracker.close_vacuous_windows();
        tracker
    }

    fn close_vacuous_windows(&mut self) {
        while self.card <= self.n && self.missing == 0 {
            self.times.push(self.window_start);
            self.card += 1;
        }
    }

    pub fn note(&mut self, time: usize, pair: Transposition) {
        if self.done() || time <= self.window_start {
            return;
        }
        let partner = if pair.i == self.card {
            pair.j
        } else if pair.j == self.card {
            pair.i
        } else {
            return;
        };
        if !self.seen[partner] {
            self.seen[partner] = true;
            self.missing -= 1;
            if self.missing == 0 {
                self.times.push(time);
                self.card += 1;
                self.window_start = time;
                if self.card <= self.n {
                    self.seen.iter_mut().for_each(|b| *b = false);
                    self.missing = self.n - 1;
                }
            }
        }
    }

    pub fn done(&self) -> bool {
        self.card > self.n
    }
}

/// Run one replica, streaming events into the rule's tracker, returning
/// the stopping time if achieved within `max_steps`.
pub fn simulate_stopping_time<R: Rng>(
    spec: &ProcessSpec,
    rule: StoppingRule,
    max_steps: usize,
    rng: &mut R,
) -> Option<usize> {
    let mut state = spec.canonical_start();
    match rule {
        StoppingRule::AllPairs => {
            let mut tracker = AllPairsTracker::new(spec.n);
            if tracker.done() {
                return Some(0);
            }
            for t in 1..=max_steps {
                let (_, next, events) = spec.sample_step(&state, rng);
                for ev in &events {
                    tracker.note(t, ev.pair);
                }
                if tracker.done() {
                    return Some(t);
                }
                state = next;
            }
            None
        }
        StoppingRule::Sequential => {
            let mut tracker = SequentialTracker::new(spec.n);
            if tracker.done() {
                return Some(0);
            }
            for t in 1..=max_steps {
                let (_, next, events) = spec.sample_step(&state, rng);
                for ev in &events {
                    tracker.note(t, ev.pair);
                }
                if tracker.done() {
                    return tracker.times.last().copied();
                }
                state = next;
            }
            None
        }
    }
}

/// Monte Carlo estimate of `P(T > t)` with a Wilson-score 95% interval.
#[derive(Debug, Clone, Serialize)]
pub struct TailEstimate {
    pub t: usize,
    pub estimate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub replicas: usize,
}

pub fn tail_estimate(
    spec: &ProcessSpec,
    rule: StoppingRule,
    t: usize,
    replicas: usize,
    seed: u64,
) -> Result<TailEstimate> {
    Ok(tail_curve(spec, rule, &[t], replicas, seed)?.remove(0))
}

/// Estimates for a whole grid from one set of replicas: each replica is
/// simulated once up to `max(grid)` and its stopping time reused.
pub fn tail_curve(
    spec: &ProcessSpec,
    rule: StoppingRule,
    t_grid: &[usize],
    replicas: usize,
    seed: u64,
) -> Result<Vec<TailEstimate>> {
    if replicas == 0 {
        return Err(Error::Validation("replicas must be ≥ 1".into()));
    }
    spec.validate()?;
    let horizon = t_grid.iter().copied().max().unwrap_or(0);
    let times: Vec<Option<usize>> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(seed, 0, r as u64);
            simulate_stopping_time(spec, rule, horizon, &mut rng)
        })
        .collect();
    Ok(t_grid
        .iter()
        .map(|&t| {
            let exceed = times.iter().filter(|ht| ht.map_or(true, |v| v > t)).count();
            let (estimate, ci_lo, ci_hi) = wilson(exceed, replicas);
            TailEstimate {
                t,
                estimate,
                ci_lo,
                ci_hi,
                replicas,
            }
        })
        .collect())
}

/// Wilson score interval at 95%.
pub fn wilson(successes: usize, trials: usize) -> (f64, f64, f64) {
    let z = 1.959963984540054_f64;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = (z / denom) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (p, (center - half).max(0.0), (center + half).min(1.0))
}

// ---------------------------------------------------------------------------
// Pair-time studies (first interaction time per pair, all-pairs time)
// ---------------------------------------------------------------------------

/// Per-replica summary from one run to the all-pairs time.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReplicaPairStats {
    /// Mean over the C(n,2) pairs of each pair's first interaction time.
    pub pair_mean: f64,
    /// The all-pairs time of the replica.
    pub t_all: u64,
}

/// `n`, mean pair time, median all-pairs time, and their log ratio.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CombiningRow {
    pub n: usize,
    pub pair_mean_time: f64,
    pub all_pairs_median: f64,
    /// `median(T) / (mean pair time × log C(n,2))`; the log term is
    /// replaced by 1 in the degenerate single-pair case.
    pub ratio: f64,
}

/// Run replicas of a family to the all-pairs time, collecting per-pair
/// first-interaction statistics. Uses streamlined per-family simulators
/// that only track first co-locations, validated against the generic
/// kernels in the tests.
pub fn pair_time_study(
    spec: &ProcessSpec,
    replicas: usize,
    seed: u64,
) -> Result<Vec<ReplicaPairStats>> {
    spec.validate()?;
    if spec.n < 2 {
        return Err(Error::Validation("pair statistics need n ≥ 2".into()));
    }
    (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(seed, 1, r as u64);
            run_to_all_pairs(spec, &mut rng)
        })
        .collect()
}

/// Safety cap: no family here should plausibly take this many steps to
/// cover all pairs at the sizes we run.
const STEP_CAP: u64 = 4_000_000_000;

fn run_to_all_pairs<R: Rng>(spec: &ProcessSpec, rng: &mut R) -> Result<ReplicaPairStats> {
    let n = spec.n;
    let k = pair_count(n);
    let mut first: Vec<u64> = vec![0; k];
    let mut missing = k;

    macro_rules! note {
        ($t:expr, $a:expr, $b:expr) => {{
            let (i, j) = if $a < $b { ($a, $b) } else { ($b, $a) };
            let slot = &mut first[pair_index(n, i, j)];
            if *slot == 0 {
                *slot = $t;
                missing -= 1;
            }
        }};
    }

    let mut t: u64 = 0;
    match spec.family {
        Family::Wash1d | Family::WashGrid => {
            let (neighbors, line): (Vec<Vec<usize>>, bool) = if spec.family == Family::Wash1d {
                (Vec::new(), true)
            } else {
                let kernel = crate::process::wash::WashKernel::grid(n, spec.grid_dim());
                match kernel.topo {
                    crate::process::wash::Topology::Grid { neighbors, .. } => (neighbors, false),
                    _ => unreachable!(),
                }
            };
            let sites = if line { n } else { neighbors.len() };
            let mut pos: Vec<usize> = (0..n).collect();
            let mut occupants: Vec<Vec<usize>> = (0..sites)
                .map(|q| if q < n { vec![q + 1] } else { vec![] })
                .collect();
            while missing > 0 {
                t += 1;
                if t > STEP_CAP {
                    return Err(Error::InternalContract("step cap exceeded".into()));
                }
                // Mirrors WashKernel::sample draw-for-draw.
                let card = rng.random_range(1..=n);
                let from = pos[card - 1];
                let dest = if line {
                    match rng.random_range(0..4u8) {
                        0 => (from > 0).then(|| from - 1),
                        1 => (from + 1 < sites).then_some(from + 1),
                        _ => None,
                    }
                } else if rng.random_range(0..2u8) == 0 {
                    None
                } else {
                    let nbs = &neighbors[from];
                    Some(nbs[rng.random_range(0..nbs.len())])
                };
                if let Some(d) = dest {
                    let _slot = rng.random_range(0..=occupants[d].len());
                    let at = occupants[from].iter().position(|&c| c == card).unwrap();
                    occupants[from].swap_remove(at);
                    for &o in &occupants[d] {
                        note!(t, card, o);
                    }
                    occupants[d].push(card);
                    pos[card - 1] = d;
                }
            }
        }
        Family::AdjTransposition => {
            let mut deck: Vec<usize> = (1..=n).collect();
            while missing > 0 {
                t += 1;
                if t > STEP_CAP {
                    return Err(Error::InternalContract("step cap exceeded".into()));
                }
                let p = rng.random_range(1..n);
                let swap = rng.random_range(0..2u8) == 1;
                note!(t, deck[p - 1], deck[p]);
                if swap {
                    deck.swap(p - 1, p);
                }
            }
        }
        Family::RandomToRandom => {
            let mut deck: Vec<usize> = (1..=n).collect();
            while missing > 0 {
                t += 1;
                if t > STEP_CAP {
                    return Err(Error::InternalContract("step cap exceeded".into()));
                }
                let card = rng.random_range(1..=n);
                let slot = rng.random_range(1..=n);
                let at = deck.iter().position(|&c| c == card).unwrap();
                deck.remove(at);
                deck.insert(slot - 1, card);
                if slot < n {
                    note!(t, card, deck[slot]);
                }
            }
        }
        Family::Wash1dLong => {
            let kernel = crate::process::washlong::WashLongKernel::gsr(n, spec.p_exact());
            let p = spec.p_f64();
            let mut piles = {
                use crate::process::Kernel;
                kernel.start()
            };
            while missing > 0 {
                t += 1;
                if t > STEP_CAP {
                    return Err(Error::InternalContract("step cap exceeded".into()));
                }
                use crate::process::Kernel;
                let rec = kernel.sample(&piles, p, rng);
                let (next, events) = kernel
                    .apply(&piles, &rec)
                    .map_err(|e| Error::InternalContract(format!("replaying a sampled step: {e}")))?;
                for ev in &events {
                    note!(t, ev.pair.i, ev.pair.j);
                }
                piles = next;
            }
        }
        Family::CycleTransposition => {
            let mut deck: Vec<usize> = (1..=n).collect();
            while missing > 0 {
                t += 1;
                if t > STEP_CAP {
                    return Err(Error::InternalContract("step cap exceeded".into()));
                }
                match rng.random_range(0..3u8) {
                    0 => note!(t, deck[0], deck[1]),
                    1 => deck.rotate_left(1),
                    _ => {
                        note!(t, deck[0], deck[1]);
                        deck.swap(0, 1);
                    }
                }
            }
        }
        Family::RandomToTop => {
            return Err(Error::Validation(
                "random-to-top has no interaction detector".into(),
            ));
        }
    }

    let pair_mean = first.iter().map(|&x| x as f64).sum::<f64>() / k as f64;
    let t_all = *first.iter().max().expect("k ≥ 1");
    Ok(ReplicaPairStats { pair_mean, t_all })
}

/// Mean over pairs and replicas of the first interaction time.
pub fn mean_pair_time(stats: &[ReplicaPairStats]) -> f64 {
    stats.iter().map(|s| s.pair_mean).sum::<f64>() / stats.len() as f64
}

/// Median over replicas of the all-pairs time.
pub fn median_all_pairs(stats: &[ReplicaPairStats]) -> f64 {
    let mut ts: Vec<u64> = stats.iter().map(|s| s.t_all).collect();
    ts.sort_unstable();
    let m = ts.len();
    if m % 2 == 1 {
        ts[m / 2] as f64
    } else {
        (ts[m / 2 - 1] + ts[m / 2]) as f64 / 2.0
    }
}

pub fn combining_row(n: usize, stats: &[ReplicaPairStats]) -> CombiningRow {
    let pair_mean_time = mean_pair_time(stats);
    let all_pairs_median = median_all_pairs(stats);
    let k = pair_count(n);
    let log_term = if k <= 1 { 1.0 } else { (k as f64).ln() };
    CombiningRow {
        n,
        pair_mean_time,
        all_pairs_median,
        ratio: all_pairs_median / (pair_mean_time * log_term),
    }
}

/// The combining-log comparison over a grid of deck sizes: how the median
/// all-pairs time relates to (mean pair time × log of the pair count).
pub fn combininglog_report(
    spec_for: impl Fn(usize) -> ProcessSpec,
    n_list: &[usize],
    replicas: usize,
    seed: u64,
) -> Result<Vec<CombiningRow>> {
    n_list
        .iter()
        .map(|&n| {
            let stats = pair_time_study(&spec_for(n), replicas, seed)?;
            Ok(combining_row(n, &stats))
        })
        .collect()
}
