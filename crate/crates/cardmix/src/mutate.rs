//! Injective path-mutation maps built on interaction events.
//!
//! A path here is a record sequence plus a collection record (the deferred
//! pile-order randomness of wash quotients; trivial for walks). The basic
//! operation is [`relabel_suffix`]: at an interaction event of a pair, the
//! event-time record is replaced by its certified twin and every later
//! record (and the collection) has the pair's labels exchanged. That
//! preserves the path probability exactly and composes the pair's label
//! action onto the end deck.
//!
//! On top of it sit the two mutation maps:
//!
//! * [`mutate_fast`] — requires every pair to have interacted. Scans the
//!   path backward; the first backward occurrence of each pair is its last
//!   interaction in the *current* (partially relabeled) path, and the pair
//!   is used exactly when it shortens the residual, which is maintained by
//!   right-multiplication. The subsequence-factorization lemma guarantees
//!   the residual reaches the identity.
//! * [`mutate_slow`] — requires the sequential rule. Applies the star
//!   factorization `(n a_n)…(1 a_1)` of the needed relabeling, swapping
//!   card `i` with `a_i` at their first interaction inside window `i`.
//!
//! Both maps have explicit inverses; the exhaustive round-trip tests are
//! the definition of correctness here and double as the injectivity proof.

use std::collections::{HashMap, HashSet};
use std::hash::Hash;

use num::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{zero, Exact};
use crate::factor::star_factor;
use crate::perm::{Permutation, Transposition};
use crate::process::quotient::{QuotWash, QuotWashLong};
use crate::process::walks::{AdjKernel, CycleKernel};
use crate::process::{DeckKernel, Family, Phase, ProcessSpec, StepEvent};
use crate::stopping::{AllPairsTracker, SequentialTracker, StoppingRule};

/// A full run: step records followed by the collection record.
pub struct MutPath<K: DeckKernel> {
    pub records: Vec<K::Record>,
    pub collect: K::Collect,
}

impl<K: DeckKernel> Clone for MutPath<K> {
    fn clone(&self) -> Self {
        MutPath {
            records: self.records.clone(),
            collect: self.collect.clone(),
        }
    }
}

impl<K: DeckKernel> std::fmt::Debug for MutPath<K> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MutPath")
            .field("records", &self.records)
            .field("collect", &self.collect)
            .finish()
    }
}

impl<K: DeckKernel> PartialEq for MutPath<K> {
    fn eq(&self, other: &Self) -> bool {
        self.records == other.records && self.collect == other.collect
    }
}

impl<K: DeckKernel> Eq for MutPath<K> {}

impl<K: DeckKernel> Hash for MutPath<K> {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.records.hash(state);
        self.collect.hash(state);
    }
}

/// A suffix relabeling action: the pair's roles are exchanged at all times
/// strictly after `time` (with half-step granularity via `phase`), and the
/// record at `time` is replaced by its event twin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RelabelAction {
    pub time: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase: Option<Phase>,
    pub pair: Transposition,
}

/// States along the path: `start = X_0` through `X_t`.
pub fn states_along<K: DeckKernel>(kernel: &K, path: &MutPath<K>) -> Result<Vec<K::State>> {
    let mut states = Vec::with_capacity(path.records.len() + 1);
    states.push(kernel.start());
    for r in &path.records {
        let (next, _) = kernel.apply(states.last().unwrap(), r)?;
        states.push(next);
    }
    Ok(states)
}

/// The deck produced by the path.
pub fn end_deck<K: DeckKernel>(kernel: &K, path: &MutPath<K>) -> Result<Permutation> {
    let states = states_along(kernel, path)?;
    Ok(kernel.assemble(states.last().unwrap(), &path.collect))
}

/// Exact probability: product of record probabilities and the collection
/// probability.
pub fn path_probability<K: DeckKernel>(kernel: &K, path: &MutPath<K>) -> Result<Exact> {
    let mut prob = crate::exact::one();
    let mut state = kernel.start();
    for r in &path.records {
        prob *= kernel.record_probability(&state, r)?;
        let (next, _) = kernel.apply(&state, r)?;
        state = next;
    }
    let cprob = kernel
        .collect_transitions(&state)
        .into_iter()
        .find(|(c, _)| c == &path.collect)
        .map(|(_, p)| p)
        .ok_or_else(|| Error::InfeasibleRecord("collection record".into()))?;
    Ok(prob * cprob)
}

/// Events of each step: `events[k]` belongs to time `k+1`.
pub fn path_events<K: DeckKernel>(kernel: &K, path: &MutPath<K>) -> Result<Vec<Vec<StepEvent>>> {
    let mut out = Vec::with_capacity(path.records.len());
    let mut state = kernel.start();
    for r in &path.records {
        let (next, events) = kernel.apply(&state, r)?;
        out.push(events);
        state = next;
    }
    Ok(out)
}

/// Exchange the pair's roles from the action time onward. The caller is
/// responsible for picking an actual interaction event of the pair; only
/// then are probability preservation and the end-deck contract guaranteed.
pub fn relabel_suffix<K: DeckKernel>(
    kernel: &K,
    path: &MutPath<K>,
    action: RelabelAction,
) -> Result<MutPath<K>> {
    let t = path.records.len();
    if action.time > t {
        return Err(Error::TimeOutOfRange {
            time: action.time,
            len: t,
        });
    }
    let (i, j) = (action.pair.i, action.pair.j);
    let mut records = Vec::with_capacity(t);
    records.extend_from_slice(&path.records[..action.time.saturating_sub(1)]);
    if action.time >= 1 {
        let states = states_along(kernel, path)?;
        let twin = kernel.twin(
            &states[action.time - 1],
            &path.records[action.time - 1],
            action.pair,
            action.phase,
        )?;
        records.push(twin);
    }
    for r in &path.records[action.time..] {
        records.push(kernel.relabel_record(r, i, j));
    }
    Ok(MutPath {
        records,
        collect: kernel.relabel_collect(&path.collect, i, j),
    })
}

// ---------------------------------------------------------------------------
// Rule evaluation on paths
// ---------------------------------------------------------------------------

fn rule_achieved<K: DeckKernel>(
    kernel: &K,
    path: &MutPath<K>,
    rule: StoppingRule,
) -> Result<(bool, Vec<usize>)> {
    let events = path_events(kernel, path)?;
    match rule {
        StoppingRule::AllPairs => {
            let mut tr = AllPairsTracker::new(kernel.n());
            for (k, step) in events.iter().enumerate() {
                for ev in step {
                    tr.note(k + 1, ev.pair);
                }
            }
            Ok((tr.done(), Vec::new()))
        }
        StoppingRule::Sequential => {
            let mut tr = SequentialTracker::new(kernel.n());
            for (k, step) in events.iter().enumerate() {
                for ev in step {
                    tr.note(k + 1, ev.pair);
                }
            }
            let done = tr.done();
            Ok((done, tr.times))
        }
    }
}

// ---------------------------------------------------------------------------
// The fast map (all-pairs rule) and its inverse
// ---------------------------------------------------------------------------

/// Mutate a path satisfying the all-pairs rule so that it ends at `target`,
/// preserving its probability exactly.
pub fn mutate_fast<K: DeckKernel>(
    kernel: &K,
    path: &MutPath<K>,
    target: &Permutation,
) -> Result<MutPath<K>> {
    let (ok, _) = rule_achieved(kernel, path, StoppingRule::AllPairs)?;
    if !ok {
        return Err(Error::RuleUnsatisfied("all-pairs rule"));
    }
    backward_greedy(kernel, path, target)
}

/// Inverse of [`mutate_fast`]: reconstructs the satisfying path that maps
/// to `path` under `mutate_fast(·, target)`, given the source end deck.
///
/// The reconstruction is the same backward greedy scan pointed back at the
/// source end; the two shortening tests agree because a permutation and
/// its inverse have identical cycle supports.
pub fn mutate_fast_inverse<K: DeckKernel>(
    kernel: &K,
    path: &MutPath<K>,
    source_end: &Permutation,
    _target: &Permutation,
) -> Result<MutPath<K>> {
    let restored = backward_greedy(kernel, path, source_end)
        .map_err(|e| Error::NotInImage(format!("backward scan failed: {e}")))?;
    let (ok, _) = rule_achieved(kernel, &restored, StoppingRule::AllPairs)?;
    if !ok {
        return Err(Error::NotInImage(
            "reconstruction does not satisfy the all-pairs rule".into(),
        ));
    }
    Ok(restored)
}

/// Backward scan shared by the fast map and its inverse: walk times from
/// the end; at each time, visit the current path's events in reverse of
/// the fixed simultaneous order; the first backward occurrence of a pair
/// is its last interaction; apply the pair exactly when it shortens the
/// residual, multiplying the residual on the right.
fn backward_greedy<K: DeckKernel>(
    kernel: &K,
    path: &MutPath<K>,
    target: &Permutation,
) -> Result<MutPath<K>> {
    let mut current = path.clone();
    let end = end_deck(kernel, &current)?;
    let mut residual = target.compose(&end.invert())?;
    // Pairs whose last interaction has already been passed, split into
    // the strict suffix (relabelings swap these) and the time being
    // scanned (events there are twin-invariant).
    let mut seen_suffix: HashSet<Transposition> = HashSet::new();
    let t = current.records.len();
    for time in (1..=t).rev() {
        let mut seen_now: HashSet<Transposition> = HashSet::new();
        let events_now = path_events(kernel, &current)?[time - 1].clone();
        for ev in events_now.iter().rev() {
            if seen_suffix.contains(&ev.pair) || !seen_now.insert(ev.pair) {
                continue;
            }
            if residual.same_cycle(ev.pair.i, ev.pair.j) {
                current = relabel_suffix(
                    kernel,
                    &current,
                    RelabelAction {
                        time,
                        phase: ev.phase,
                        pair: ev.pair,
                    },
                )?;
                residual = residual.compose(&ev.pair.as_permutation(kernel.n()))?;
                seen_suffix = seen_suffix
                    .into_iter()
                    .map(|p| p.swap_labels(ev.pair.i, ev.pair.j))
                    .collect();
                seen_now = seen_now
                    .into_iter()
                    .map(|p| p.swap_labels(ev.pair.i, ev.pair.j))
                    .collect();
                // Twin-invariance keeps this time's event list unchanged,
                // so the pair just relabeled stays recorded as seen.
                seen_now.insert(ev.pair);
            }
        }
        seen_suffix.extend(seen_now);
    }
    if !residual.is_identity() {
        return Err(Error::InternalContract(format!(
            "fast-map residual {residual} is not the identity; the \
             subsequence factorization guarantee was violated"
        )));
    }
    debug_assert_eq!(&end_deck(kernel, &current)?, target);
    Ok(current)
}

// ---------------------------------------------------------------------------
// The slow map (sequential rule) and its inverse
// ---------------------------------------------------------------------------

/// The star vector of the relabeling `g` needed to turn `end` into
/// `target`, arranged so that applying `(i a_i)` in increasing window
/// order composes to `g`: since later relabelings act on the left,
/// `g = (n a_n)∘…∘(1 a_1)`, i.e. the star factorization of `g⁻¹`.
fn window_swaps(end: &Permutation, target: &Permutation) -> Result<Vec<usize>> {
    let g = target.compose(&end.invert())?;
    Ok(star_factor(&g.invert()).a)
}

/// Mutate a path satisfying the sequential rule to end at `target`.
pub fn mutate_slow<K: DeckKernel>(
    kernel: &K,
    path: &MutPath<K>,
    target: &Permutation,
) -> Result<MutPath<K>> {
    let (ok, windows) = rule_achieved(kernel, path, StoppingRule::Sequential)?;
    if !ok {
        return Err(Error::RuleUnsatisfied("sequential rule"));
    }
    let end = end_deck(kernel, path)?;
    let a = window_swaps(&end, target)?;
    let mut current = path.clone();
    for i in 1..=kernel.n() {
        let ai = a[i - 1];
        if ai == i {
            continue;
        }
        let pair = Transposition::new(i, ai)?;
        // Windows come from the original trace; the event itself is sought
        // in the current path because earlier swaps changed later events.
        let (lo, hi) = (windows[i - 1], windows[i]);
        let action = find_event(kernel, &current, pair, lo + 1, hi)?.ok_or_else(|| {
            Error::InternalContract(format!(
                "window {i} holds no interaction of {pair}; the sequential \
                 rule should guarantee one"
            ))
        })?;
        current = relabel_suffix(kernel, &current, action)?;
    }
    debug_assert_eq!(&end_deck(kernel, &current)?, target);
    Ok(current)
}

/// Inverse of [`mutate_slow`]: for each window in order, swap a pair at
/// its first interaction after the previous window's end, then recompute
/// the window end on the modified path.
///
/// Undoing the window-`i` swap before the later ones conjugates the
/// later relabelings by it, so the pair sought at window `i` is
/// `{i, c(a_i)}` where `c` composes the swaps undone so far (all of which
/// fix labels ≥ i). The exhaustive round-trip test is the arbiter of this
/// bookkeeping.
pub fn mutate_slow_inverse<K: DeckKernel>(
    kernel: &K,
    path: &MutPath<K>,
    source_end: &Permutation,
    target: &Permutation,
) -> Result<MutPath<K>> {
    let n = kernel.n();
    let end = end_deck(kernel, path)?;
    if &end != target {
        return Err(Error::NotInImage(format!(
            "path ends at {end}, not at the stated target {target}"
        )));
    }
    let a = window_swaps(source_end, target)?;
    let mut current = path.clone();
    let mut window_start = 0usize;
    let mut conj = Permutation::identity(n);
    for i in 1..=n {
        let ai = a[i - 1];
        if ai != i {
            let pair = Transposition::new(i, conj.apply(ai))?;
            let action = find_event(kernel, &current, pair, window_start + 1, usize::MAX)?
                .ok_or_else(|| {
                    Error::NotInImage(format!("no interaction of {pair} after {window_start}"))
                })?;
            current = relabel_suffix(kernel, &current, action)?;
            conj = conj.compose(&Permutation::transposition(n, i, ai))?;
        }
        window_start = window_end(kernel, &current, i, window_start)?.ok_or_else(|| {
            Error::NotInImage(format!("card {i} meets no full window after {window_start}"))
        })?;
    }
    Ok(current)
}

/// First event of `pair` with `lo ≤ time ≤ hi` in the path's own
/// chronological event order.
fn find_event<K: DeckKernel>(
    kernel: &K,
    path: &MutPath<K>,
    pair: Transposition,
    lo: usize,
    hi: usize,
) -> Result<Option<RelabelAction>> {
    let events = path_events(kernel, path)?;
    for (k, step) in events.iter().enumerate() {
        let time = k + 1;
        if time < lo {
            continue;
        }
        if time > hi {
            break;
        }
        for ev in step {
            if ev.pair == pair {
                return Ok(Some(RelabelAction {
                    time,
                    phase: ev.phase,
                    pair,
                }));
            }
        }
    }
    Ok(None)
}

/// Earliest time such that card `i` has interacted with every other card
/// strictly after `start` and at or before it.
fn window_end<K: DeckKernel>(
    kernel: &K,
    path: &MutPath<K>,
    card: usize,
    start: usize,
) -> Result<Option<usize>> {
    let n = kernel.n();
    let events = path_events(kernel, path)?;
    let mut seen = vec![false; n + 1];
    let mut missing = n - 1;
    if missing == 0 {
        return Ok(Some(start));
    }
    for (k, step) in events.iter().enumerate() {
        let time = k + 1;
        if time <= start {
            continue;
        }
        for ev in step {
            let partner = if ev.pair.i == card {
                ev.pair.j
            } else if ev.pair.j == card {
                ev.pair.i
            } else {
                continue;
            };
            if !seen[partner] {
                seen[partner] = true;
                missing -= 1;
                if missing == 0 {
                    return Ok(Some(time));
                }
            }
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Exact path-space verifications
// ---------------------------------------------------------------------------

/// Depth-first enumeration of every record path of length `t` (collects
/// excluded), invoking the callback with the records and final state.
pub fn for_each_record_path<K: DeckKernel>(
    kernel: &K,
    t: usize,
    f: &mut impl FnMut(&[K::Record], &K::State) -> Result<()>,
) -> Result<()> {
    fn rec<K: DeckKernel>(
        kernel: &K,
        state: &K::State,
        depth: usize,
        records: &mut Vec<K::Record>,
        f: &mut impl FnMut(&[K::Record], &K::State) -> Result<()>,
    ) -> Result<()> {
        if depth == 0 {
            return f(records, state);
        }
        for (r, _) in kernel.transitions(state) {
            let (next, _) = kernel.apply(state, &r)?;
            records.push(r);
            rec(kernel, &next, depth - 1, records, f)?;
            records.pop();
        }
        Ok(())
    }
    rec(kernel, &kernel.start(), t, &mut Vec::new(), f)
}

/// Exact verification of the pairwise path bijection: among length-`t`
/// paths in which `i` and `j` interact, the total probability ending at
/// any deck `π` equals the total probability ending at the relabeled deck.
#[derive(Debug, Clone, Serialize)]
pub struct IjswapReport {
    pub n: usize,
    pub t: usize,
    pub pair: Transposition,
    pub interacting_mass: String,
    pub max_discrepancy: String,
    pub exact_equality: bool,
}

pub fn verify_ijswap_bijection<K: DeckKernel>(
    kernel: &K,
    t: usize,
    pair: Transposition,
) -> Result<IjswapReport> {
    let mut mass: HashMap<Permutation, Exact> = HashMap::new();
    let mut total = zero();
    for_each_record_path(kernel, t, &mut |records, final_state| {
        let path = MutPath::<K> {
            records: records.to_vec(),
            collect: kernel
                .collect_transitions(final_state)
                .into_iter()
                .next()
                .expect("collections are nonempty")
                .0,
        };
        let events = path_events(kernel, &path)?;
        let interacted = events
            .iter()
            .flatten()
            .any(|ev| ev.pair == pair);
        if !interacted {
            return Ok(());
        }
        // Record probability once; spread over every collection.
        let mut state = kernel.start();
        let mut prob = crate::exact::one();
        for r in records {
            prob *= kernel.record_probability(&state, r)?;
            state = kernel.apply(&state, r)?.0;
        }
        for (collect, cp) in kernel.collect_transitions(final_state) {
            let deck = kernel.assemble(final_state, &collect);
            let mass_here = prob.clone() * cp;
            total += mass_here.clone();
            *mass.entry(deck).or_insert_with(zero) += mass_here;
        }
        Ok(())
    })?;
    let mut max_disc = zero();
    for perm in Permutation::all(kernel.n()) {
        let lhs = mass.get(&perm).cloned().unwrap_or_else(zero);
        let swapped = perm.swap_labels(pair.i, pair.j);
        let rhs = mass.get(&swapped).cloned().unwrap_or_else(zero);
        let d = crate::exact::abs_diff(&lhs, &rhs);
        if d > max_disc {
            max_disc = d;
        }
    }
    Ok(IjswapReport {
        n: kernel.n(),
        t,
        pair,
        interacting_mass: crate::exact::display(&total),
        exact_equality: max_disc.is_zero(),
        max_discrepancy: crate::exact::display(&max_disc),
    })
}

/// Exact conditional deck distribution at time `t` given a stopping rule
/// (or unconditioned when `rule` is `None`), with the conditioning mass.
pub fn conditioned_distribution<K: DeckKernel>(
    kernel: &K,
    t: usize,
    rule: Option<StoppingRule>,
) -> Result<(Vec<(Permutation, Exact)>, Exact)> {
    let mut mass: HashMap<Permutation, Exact> = HashMap::new();
    let mut total = zero();
    for_each_record_path(kernel, t, &mut |records, final_state| {
        let path = MutPath::<K> {
            records: records.to_vec(),
            collect: kernel
                .collect_transitions(final_state)
                .into_iter()
                .next()
                .expect("collections are nonempty")
                .0,
        };
        let satisfied = match rule {
            None => true,
            Some(r) => rule_achieved(kernel, &path, r)?.0,
        };
        if !satisfied {
            return Ok(());
        }
        let mut state = kernel.start();
        let mut prob = crate::exact::one();
        for r in records {
            prob *= kernel.record_probability(&state, r)?;
            state = kernel.apply(&state, r)?.0;
        }
        for (collect, cp) in kernel.collect_transitions(final_state) {
            let deck = kernel.assemble(final_state, &collect);
            let m = prob.clone() * cp;
            total += m.clone();
            *mass.entry(deck).or_insert_with(zero) += m;
        }
        Ok(())
    })?;
    if total.is_zero() {
        return Err(Error::EmptyCondition);
    }
    let mut dist: Vec<(Permutation, Exact)> = mass
        .into_iter()
        .map(|(p, m)| (p, m / total.clone()))
        .collect();
    dist.sort_by(|a, b| a.0.cmp(&b.0));
    Ok((dist, total))
}

/// Exhaustive verification of a mutation map over the full path space:
/// every satisfying path is mutated toward every target; ends, exact
/// probabilities, round trips, and injectivity are all checked.
#[derive(Debug, Clone, Serialize)]
pub struct MutationVerifyReport {
    pub family: String,
    pub n: usize,
    pub t: usize,
    pub rule: StoppingRule,
    pub paths_total: u64,
    pub paths_satisfying: u64,
    pub mutations_checked: u64,
    pub end_mismatch: u64,
    pub prob_mismatch: u64,
    pub roundtrip_failures: u64,
    pub injectivity_violations: u64,
}

impl MutationVerifyReport {
    pub fn clean(&self) -> bool {
        self.end_mismatch == 0
            && self.prob_mismatch == 0
            && self.roundtrip_failures == 0
            && self.injectivity_violations == 0
    }
}

pub fn verify_mutation_map<K: DeckKernel>(
    kernel: &K,
    family: &str,
    t: usize,
    rule: StoppingRule,
) -> Result<MutationVerifyReport> {
    let mut report = MutationVerifyReport {
        family: family.to_string(),
        n: kernel.n(),
        t,
        rule,
        paths_total: 0,
        paths_satisfying: 0,
        mutations_checked: 0,
        end_mismatch: 0,
        prob_mismatch: 0,
        roundtrip_failures: 0,
        injectivity_violations: 0,
    };
    let targets = Permutation::all(kernel.n());
    // images[(source end, target)] -> set of mutated paths, for the
    // injectivity count.
    let mut images: HashMap<(Permutation, Permutation), HashSet<MutPath<K>>> = HashMap::new();
    let mut satisfying_record_paths: Vec<Vec<K::Record>> = Vec::new();

    for_each_record_path(kernel, t, &mut |records, _final| {
        satisfying_record_paths.push(records.to_vec());
        Ok(())
    })?;

    for records in satisfying_record_paths {
        let mut state = kernel.start();
        for r in &records {
            state = kernel.apply(&state, r)?.0;
        }
        for (collect, _) in kernel.collect_transitions(&state) {
            let path = MutPath::<K> {
                records: records.clone(),
                collect,
            };
            report.paths_total += 1;
            if !rule_achieved(kernel, &path, rule)?.0 {
                continue;
            }
            report.paths_satisfying += 1;
            let source_end = end_deck(kernel, &path)?;
            let prob = path_probability(kernel, &path)?;
            for target in &targets {
                report.mutations_checked += 1;
                let mutated = match rule {
                    StoppingRule::AllPairs => mutate_fast(kernel, &path, target)?,
                    StoppingRule::Sequential => mutate_slow(kernel, &path, target)?,
                };
                if &end_deck(kernel, &mutated)? != target {
                    report.end_mismatch += 1;
                    continue;
                }
                if path_probability(kernel, &mutated)? != prob {
                    report.prob_mismatch += 1;
                }
                let back = match rule {
                    StoppingRule::AllPairs => {
                        mutate_fast_inverse(kernel, &mutated, &source_end, target)
                    }
                    StoppingRule::Sequential => {
                        mutate_slow_inverse(kernel, &mutated, &source_end, target)
                    }
                };
                match back {
                    Ok(b) if b == path => {}
                    _ => report.roundtrip_failures += 1,
                }
                if !images
                    .entry((source_end.clone(), target.clone()))
                    .or_default()
                    .insert(mutated)
                {
                    report.injectivity_violations += 1;
                }
            }
        }
    }
    Ok(report)
}

/// Smallest path length with nonzero satisfying mass for the rule.
pub fn smallest_satisfying_t<K: DeckKernel>(
    kernel: &K,
    rule: StoppingRule,
    t_max: usize,
) -> Result<Option<usize>> {
    for t in 0..=t_max {
        let mut found = false;
        for_each_record_path(kernel, t, &mut |records, final_state| {
            if found {
                return Ok(());
            }
            let path = MutPath::<K> {
                records: records.to_vec(),
                collect: kernel
                    .collect_transitions(final_state)
                    .into_iter()
                    .next()
                    .expect("collections are nonempty")
                    .0,
            };
            if rule_achieved(kernel, &path, rule)?.0 {
                found = true;
            }
            Ok(())
        })?;
        if found {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// Family dispatch for the CLI and the verification suite. Only families
/// whose detectors emit the same pair from a record and from its twin can
/// support the scan-based maps; the others are rejected up front.
pub fn verify_for_family(
    family: Family,
    n: usize,
    t: usize,
    rule: StoppingRule,
) -> Result<MutationVerifyReport> {
    match family {
        Family::Wash1d => verify_mutation_map(&QuotWash::line(n), family.id(), t, rule),
        Family::WashGrid => verify_mutation_map(&QuotWash::grid(n, 1), family.id(), t, rule),
        Family::CycleTransposition => {
            verify_mutation_map(&CycleKernel { n }, family.id(), t, rule)
        }
        Family::AdjTransposition => verify_mutation_map(&AdjKernel { n }, family.id(), t, rule),
        Family::Wash1dLong | Family::RandomToRandom | Family::RandomToTop => {
            Err(Error::Validation(format!(
                "{} does not support path mutation: its detector does not \
                 re-emit the same pair from twin records",
                family.id()
            )))
        }
    }
}

/// Convenience constructors for the chains the mutation machinery runs on.
pub fn wash1d_chain(spec: &ProcessSpec) -> QuotWash {
    QuotWash::line(spec.n)
}

pub fn washlong_chain(spec: &ProcessSpec) -> QuotWashLong {
    QuotWashLong::new(spec.n, spec.p_exact())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{one, ratio};
    use crate::process::quotient::QuotMove;
    use crate::process::walks::CycleGen;
    use crate::process::wash::WashMove;
    use crate::process::{EventKernel, Kernel};

    fn wash3() -> QuotWash {
        QuotWash::line(3)
    }

    fn mv(card: usize, mv: WashMove) -> QuotMove {
        QuotMove { card, mv }
    }

    #[test]
    fn relabel_suffix_contracts_on_a_hand_built_path() {
        // Two steps: card 1 joins card 2 (event {1,2} at time 1), then
        // card 3 stays. Relabel {1,2} at time 1.
        let k = wash3();
        let path = MutPath::<QuotWash> {
            records: vec![mv(1, WashMove::Right), mv(3, WashMove::Stay)],
            collect: vec![vec![1, 2], vec![3]],
        };
        let end = end_deck(&k, &path).unwrap();
        assert_eq!(end.as_slice(), &[1, 2, 3]);
        let p = path_probability(&k, &path).unwrap();
        // (1/3·1/4)·(1/3·1/2)·(1/2 collection)
        assert_eq!(p, ratio(1, 12) * ratio(1, 6) * ratio(1, 2));

        let action = RelabelAction {
            time: 1,
            phase: None,
            pair: Transposition::new(1, 2).unwrap(),
        };
        let swapped = relabel_suffix(&k, &path, action).unwrap();
        // Probability preserved, end relabeled, involution.
        assert_eq!(path_probability(&k, &swapped).unwrap(), p);
        assert_eq!(end_deck(&k, &swapped).unwrap(), end.swap_labels(1, 2));
        let back = relabel_suffix(&k, &swapped, action).unwrap();
        assert_eq!(back, path);
        // Action at the path end only relabels the collection.
        let tail = RelabelAction {
            time: 2,
            phase: None,
            pair: Transposition::new(1, 2).unwrap(),
        };
        let tswapped = relabel_suffix(&k, &path, tail).unwrap();
        assert_eq!(tswapped.records, path.records);
        assert_eq!(tswapped.collect, vec![vec![2, 1], vec![3]]);
    }

    #[test]
    fn relabel_suffix_rejects_out_of_range_times() {
        let k = wash3();
        let path = MutPath::<QuotWash> {
            records: vec![mv(1, WashMove::Stay)],
            collect: vec![vec![1], vec![2], vec![3]],
        };
        let action = RelabelAction {
            time: 2,
            phase: None,
            pair: Transposition::new(1, 2).unwrap(),
        };
        assert!(matches!(
            relabel_suffix(&k, &path, action),
            Err(Error::TimeOutOfRange { .. })
        ));
    }

    #[test]
    fn relabel_preserves_probability_at_every_event_exhaustively() {
        // All 2-step wash paths: at every emitted event, the relabeled
        // path has the same probability and the relabeled end deck.
        let k = wash3();
        for_each_record_path(&k, 2, &mut |records, final_state| {
            for (collect, _) in k.collect_transitions(final_state) {
                let path = MutPath::<QuotWash> {
                    records: records.to_vec(),
                    collect,
                };
                let p = path_probability(&k, &path)?;
                let end = end_deck(&k, &path)?;
                for (step, events) in path_events(&k, &path)?.iter().enumerate() {
                    for ev in events {
                        let action = RelabelAction {
                            time: step + 1,
                            phase: ev.phase,
                            pair: ev.pair,
                        };
                        let swapped = relabel_suffix(&k, &path, action)?;
                        assert_eq!(path_probability(&k, &swapped)?, p);
                        assert_eq!(
                            end_deck(&k, &swapped)?,
                            end.swap_labels(ev.pair.i, ev.pair.j)
                        );
                        assert_eq!(relabel_suffix(&k, &swapped, action)?, path);
                    }
                }
            }
            Ok(())
        })
        .unwrap();
    }

    #[test]
    fn fast_map_identity_target_is_identity() {
        // A path already ending at the target is returned unchanged: the
        // residual starts at the identity and the greedy selects nothing.
        let k = wash3();
        // Card 1 joins 2, card 3 joins them, then card 3 hops left alone.
        let path = MutPath::<QuotWash> {
            records: vec![
                mv(1, WashMove::Right),
                mv(3, WashMove::Left),
                mv(3, WashMove::Left),
            ],
            collect: vec![vec![3], vec![2, 1]],
        };
        assert!(rule_achieved(&k, &path, StoppingRule::AllPairs).unwrap().0);
        let end = end_deck(&k, &path).unwrap();
        let same = mutate_fast(&k, &path, &end).unwrap();
        assert_eq!(same, path);
    }

    #[test]
    fn fast_map_rejects_uncovered_paths() {
        let k = wash3();
        let path = MutPath::<QuotWash> {
            records: vec![mv(1, WashMove::Stay)],
            collect: vec![vec![1], vec![2], vec![3]],
        };
        assert!(matches!(
            mutate_fast(&k, &path, &Permutation::identity(3)),
            Err(Error::RuleUnsatisfied(_))
        ));
    }

    #[test]
    fn fast_map_exhaustive_wash_small() {
        // Full exhaustive run at t = 3 (t = 4 lives in the acceptance
        // suite): ends, probabilities, round trips, injectivity.
        let k = wash3();
        let report = verify_mutation_map(&k, "wash1d", 3, StoppingRule::AllPairs).unwrap();
        assert!(report.paths_satisfying > 0, "no satisfying paths at t=3");
        assert!(report.clean(), "{report:?}");
    }

    #[test]
    fn fast_map_exhaustive_cycle_walk() {
        let k = CycleKernel { n: 3 };
        let t = smallest_satisfying_t(&k, StoppingRule::AllPairs, 8)
            .unwrap()
            .expect("cycle walk covers all pairs eventually");
        assert_eq!(t, 5);
        let report = verify_mutation_map(&k, "cycle-transposition", t, StoppingRule::AllPairs)
            .unwrap();
        assert!(report.paths_satisfying > 0);
        assert!(report.clean(), "{report:?}");
    }

    #[test]
    fn slow_map_exhaustive_wash_smallest_t() {
        let k = wash3();
        let t = smallest_satisfying_t(&k, StoppingRule::Sequential, 8)
            .unwrap()
            .expect("sequential rule reachable");
        assert_eq!(t, 4);
        let report = verify_mutation_map(&k, "wash1d", t, StoppingRule::Sequential).unwrap();
        assert!(report.paths_satisfying > 0);
        assert!(report.clean(), "{report:?}");
    }

    #[test]
    fn conditioned_distribution_cases() {
        let k = wash3();
        // Unconditioned at t=0: point mass at the identity.
        let (dist, mass) = conditioned_distribution(&k, 0, None).unwrap();
        assert_eq!(mass, one());
        assert_eq!(dist.len(), 1);
        assert_eq!(dist[0].0, Permutation::identity(3));
        assert_eq!(dist[0].1, one());
        // Conditioning on an unreachable rule errors.
        assert!(matches!(
            conditioned_distribution(&k, 1, Some(StoppingRule::AllPairs)),
            Err(Error::EmptyCondition)
        ));
    }

    #[test]
    fn ijswap_trivial_and_small_cases() {
        let k = QuotWash::line(2);
        // t=0: no interacted paths; equality holds vacuously.
        let rep = verify_ijswap_bijection(&k, 0, Transposition::new(1, 2).unwrap()).unwrap();
        assert!(rep.exact_equality);
        assert_eq!(rep.interacting_mass, "0");
        // n=2, t=2: exact equality with mass.
        let rep = verify_ijswap_bijection(&k, 2, Transposition::new(1, 2).unwrap()).unwrap();
        assert!(rep.exact_equality, "{rep:?}");
        assert_ne!(rep.interacting_mass, "0");
    }

    #[test]
    fn cycle_walk_events_survive_twinning() {
        // The twin of an event-emitting record emits the same pair — the
        // property the backward scan relies on.
        let k = CycleKernel { n: 3 };
        let deck = Permutation::from_map(vec![3, 1, 2]).unwrap();
        for (r, _) in k.transitions(&deck) {
            let (_, events) = k.apply(&deck, &r).unwrap();
            for ev in events {
                let twin = k.twin(&deck, &r, ev.pair, ev.phase).unwrap();
                let (_, tev) = k.apply(&deck, &twin).unwrap();
                assert!(tev.iter().any(|e| e.pair == ev.pair));
            }
        }
        let _ = CycleGen::Id;
    }
}
