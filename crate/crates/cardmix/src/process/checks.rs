//! Exact definitional checkers: fairness of a kernel, the two clauses of
//! the interaction symmetry, twin-certified detector soundness, and
//! jumbledness of a distribution.
//!
//! All comparisons are exact rational equalities; reports carry violation
//! witnesses instead of failing eagerly.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use super::{EventKernel, Kernel, StepEvent};
use crate::error::{Error, Result};
use crate::exact::Exact;
use crate::perm::{Label, Permutation};

/// Breadth-first enumeration of the states reachable from the start.
pub fn reachable_states<K: Kernel>(kernel: &K, cap: usize) -> Result<Vec<K::State>> {
    let mut seen = std::collections::HashSet::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    let start = kernel.start();
    seen.insert(start.clone());
    order.push(start.clone());
    queue.push_back(start);
    while let Some(s) = queue.pop_front() {
        for (r, _) in kernel.transitions(&s) {
            let (next, _) = kernel.apply(&s, &r)?;
            if seen.insert(next.clone()) {
                if order.len() >= cap {
                    return Err(Error::GuardExceeded {
                        what: "reachable state enumeration",
                        n: order.len() + 1,
                        guard: cap,
                    });
                }
                order.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    Ok(order)
}

/// One-step distribution from `s`, aggregated by next state.
pub fn step_distribution<K: Kernel>(kernel: &K, s: &K::State) -> Result<BTreeMap<K::State, Exact>>
where
    K::State: Ord,
{
    let mut dist: BTreeMap<K::State, Exact> = BTreeMap::new();
    for (r, p) in kernel.transitions(s) {
        let (next, _) = kernel.apply(s, &r)?;
        *dist.entry(next).or_insert_with(crate::exact::zero) += p;
    }
    Ok(dist)
}

#[derive(Debug, Clone)]
pub struct FairnessViolation {
    pub state: String,
    pub group_element: Permutation,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct FairnessReport {
    pub states_checked: usize,
    pub violations: Vec<FairnessViolation>,
}

impl FairnessReport {
    pub fn is_fair(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for FairnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_fair() {
            write!(f, "fair ({} states checked)", self.states_checked)
        } else {
            write!(
                f,
                "UNFAIR: {} violations over {} states; first: {} under {}: {}",
                self.violations.len(),
                self.states_checked,
                self.violations[0].state,
                self.violations[0].group_element,
                self.violations[0].detail
            )
        }
    }
}

/// Exhaustive fairness check: for every reachable state `x` and every
/// `g ∈ S_n`, the relabeled step distribution from `x` must equal the step
/// distribution from the relabeled state.
pub fn check_fair<K: Kernel>(kernel: &K, state_cap: usize) -> Result<FairnessReport>
where
    K::State: Ord,
{
    let states = reachable_states(kernel, state_cap)?;
    let group = Permutation::all(kernel.n());
    let mut report = FairnessReport {
        states_checked: states.len(),
        violations: Vec::new(),
    };
    for x in &states {
        let base = step_distribution(kernel, x)?;
        for g in &group {
            if g.is_identity() {
                continue;
            }
            let pushed: BTreeMap<K::State, Exact> = base
                .iter()
                .map(|(s, p)| (kernel.relabel_state(s, g), p.clone()))
                .collect();
            let from_relabeled = step_distribution(kernel, &kernel.relabel_state(x, g))?;
            if pushed != from_relabeled {
                report.violations.push(FairnessViolation {
                    state: format!("{x:?}"),
                    group_element: g.clone(),
                    detail: first_difference(&pushed, &from_relabeled),
                });
            }
        }
    }
    Ok(report)
}

fn first_difference<S: Ord + fmt::Debug>(
    a: &BTreeMap<S, Exact>,
    b: &BTreeMap<S, Exact>,
) -> String {
    for (s, p) in a {
        match b.get(s) {
            Some(q) if q == p => {}
            Some(q) => {
                return format!(
                    "state {s:?}: {} vs {}",
                    crate::exact::display(p),
                    crate::exact::display(q)
                )
            }
            None => return format!("state {s:?} reachable on one side only"),
        }
    }
    for (s, _) in b {
        if !a.contains_key(s) {
            return format!("state {s:?} reachable on one side only");
        }
    }
    "distributions differ".into()
}

#[derive(Debug, Clone)]
pub struct PairCheck {
    /// `y` is itself fixed by the pair's label action.
    pub first_clause: bool,
    /// `M(x,y) == M(x, y·(i j))`.
    pub second_clause: bool,
    pub m_xy: Exact,
    pub m_x_swapped: Exact,
}

/// The interaction symmetry between two explicit states: compares the
/// one-step mass into `y` with the mass into the pair-relabeled `y`.
/// The first clause implies the second and is reported distinctly.
pub fn check_interaction_pair<K: Kernel>(
    kernel: &K,
    x: &K::State,
    y: &K::State,
    i: Label,
    j: Label,
) -> Result<PairCheck>
where
    K::State: Ord,
{
    let dist = step_distribution(kernel, x)?;
    let swap = Permutation::transposition(kernel.n(), i, j);
    let y_swapped = kernel.relabel_state(y, &swap);
    let m_xy = dist.get(y).cloned().unwrap_or_else(crate::exact::zero);
    let m_x_swapped = dist
        .get(&y_swapped)
        .cloned()
        .unwrap_or_else(crate::exact::zero);
    Ok(PairCheck {
        first_clause: y_swapped == *y,
        second_clause: m_xy == m_x_swapped,
        m_xy,
        m_x_swapped,
    })
}

#[derive(Debug, Clone)]
pub struct SoundnessViolation {
    pub state: String,
    pub record: String,
    pub event: StepEvent,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct SoundnessReport {
    pub states_checked: usize,
    pub events_checked: usize,
    pub violations: Vec<SoundnessViolation>,
}

impl SoundnessReport {
    pub fn is_sound(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for SoundnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_sound() {
            write!(
                f,
                "sound ({} events over {} states)",
                self.events_checked, self.states_checked
            )
        } else {
            write!(
                f,
                "UNSOUND: {}/{} events violated; first: {}",
                self.violations.len(),
                self.events_checked,
                self.violations[0].detail
            )
        }
    }
}

/// Exhaustive detector soundness in the record-refined chain: every event
/// emitted from every reachable (state, record) must have a twin record of
/// equal probability whose outcome is the pair-relabeled outcome, and
/// twinning must be an involution.
pub fn check_event_soundness<K: EventKernel>(
    kernel: &K,
    state_cap: usize,
) -> Result<SoundnessReport>
where
    K::State: Ord,
{
    let states = reachable_states(kernel, state_cap)?;
    let mut report = SoundnessReport {
        states_checked: states.len(),
        ..Default::default()
    };
    for s in &states {
        for (r, p) in kernel.transitions(s) {
            let (next, events) = kernel.apply(s, &r)?;
            for ev in &events {
                report.events_checked += 1;
                let mut fail = |detail: String| {
                    report.violations.push(SoundnessViolation {
                        state: format!("{s:?}"),
                        record: format!("{r:?}"),
                        event: *ev,
                        detail,
                    });
                };
                let twin = match kernel.twin(s, &r, ev.pair, ev.phase) {
                    Ok(t) => t,
                    Err(e) => {
                        fail(format!("no twin: {e}"));
                        continue;
                    }
                };
                match kernel.record_probability(s, &twin) {
                    Ok(tp) if tp == p => {}
                    Ok(tp) => {
                        fail(format!(
                            "twin probability {} != {}",
                            crate::exact::display(&tp),
                            crate::exact::display(&p)
                        ));
                        continue;
                    }
                    Err(e) => {
                        fail(format!("twin infeasible: {e}"));
                        continue;
                    }
                }
                let swap = Permutation::transposition(kernel.n(), ev.pair.i, ev.pair.j);
                let (twin_next, _) = kernel.apply(s, &twin)?;
                if twin_next != kernel.relabel_state(&next, &swap) {
                    fail("twin outcome is not the pair-relabeled outcome".into());
                    continue;
                }
                match kernel.twin(s, &twin, ev.pair, ev.phase) {
                    Ok(back) if back == r => {}
                    Ok(_) => fail("twinning is not an involution".into()),
                    Err(e) => fail(format!("twin of twin failed: {e}")),
                }
            }
        }
    }
    Ok(report)
}

/// Whether a distribution over states is invariant under every permutation
/// of the label set `A` (applied through the kernel's label action).
pub fn check_jumbled<K: Kernel>(
    kernel: &K,
    dist: &[(K::State, Exact)],
    a: &[Label],
) -> bool
where
    K::State: Ord,
{
    let base: BTreeMap<&K::State, &Exact> = dist.iter().map(|(s, p)| (s, p)).collect();
    for g in permutations_fixing_complement(kernel.n(), a) {
        for (s, p) in dist {
            let moved = kernel.relabel_state(s, &g);
            match base.get(&&moved) {
                Some(q) if **q == *p => {}
                _ => return false,
            }
        }
    }
    true
}

/// All permutations of `{1..n}` that permute `a` and fix its complement.
pub fn permutations_fixing_complement(n: usize, a: &[Label]) -> Vec<Permutation> {
    let mut sorted = a.to_vec();
    sorted.sort_unstable();
    let k = sorted.len();
    let mut out = Vec::new();
    for arrangement in arrangements(&sorted) {
        let mut map: Vec<Label> = (1..=n).collect();
        for (slot, &image) in arrangement.iter().enumerate() {
            map[sorted[slot] - 1] = image;
        }
        out.push(Permutation::from_map(map).expect("bijection"));
        let _ = k;
    }
    out
}

fn arrangements(items: &[Label]) -> Vec<Vec<Label>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (k, &x) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(k);
        for mut tail in arrangements(&rest) {
            tail.insert(0, x);
            out.push(tail);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{one, ratio};
    use crate::process::quotient::QuotWash;
    use crate::process::walks::{CycleKernel, RttKernel};
    use crate::process::wash::WashKernel;

    #[test]
    fn random_to_top_is_fair() {
        let k = RttKernel { n: 3 };
        let report = check_fair(&k, 100).unwrap();
        assert!(report.is_fair(), "{report}");
    }

    #[test]
    fn wash1d_is_fair_at_n3() {
        let k = WashKernel::line(3);
        let report = check_fair(&k, 200).unwrap();
        assert!(report.is_fair(), "{report}");
    }

    /// Deliberately broken chain: always move card 1 to the top.
    struct MoveOneToTop;

    impl Kernel for MoveOneToTop {
        type State = Permutation;
        type Record = ();

        fn n(&self) -> usize {
            3
        }

        fn start(&self) -> Permutation {
            Permutation::identity(3)
        }

        fn transitions(&self, _s: &Permutation) -> Vec<((), Exact)> {
            vec![((), one())]
        }

        fn apply(&self, s: &Permutation, _r: &()) -> Result<(Permutation, Vec<StepEvent>)> {
            let mut map = s.as_slice().to_vec();
            let from = map.iter().position(|&l| l == 1).unwrap();
            map.remove(from);
            map.insert(0, 1);
            Ok((Permutation::from_map(map)?, Vec::new()))
        }

        fn relabel_state(&self, s: &Permutation, g: &Permutation) -> Permutation {
            g.compose(s).unwrap()
        }

        fn relabel_record(&self, _r: &(), _i: Label, _j: Label) {}
    }

    #[test]
    fn move_ace_to_top_is_unfair_with_witness() {
        let report = check_fair(&MoveOneToTop, 100).unwrap();
        assert!(!report.is_fair());
        assert!(!report.violations.is_empty());
    }

    #[test]
    fn wash_co_location_passes_pair_check_on_the_quotient() {
        // Any y with cards i,j sharing a site, any x with M(x,y) > 0:
        // first clause holds, hence the second.
        let k = QuotWash::line(3);
        let states = reachable_states(&k, 1000).unwrap();
        for x in &states {
            for (r, _) in k.transitions(x) {
                let (y, _) = k.apply(x, &r).unwrap();
                for i in 1..=3 {
                    for j in (i + 1)..=3 {
                        if y[i - 1] == y[j - 1] {
                            let chk = check_interaction_pair(&k, x, &y, i, j).unwrap();
                            assert!(chk.first_clause && chk.second_clause);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn cycle_walk_bare_pair_check_at_identity() {
        // x = id has cards 1,2 on top; both M(x,x) and M(x,(1 2)·x) are 1/3.
        let k = CycleKernel { n: 3 };
        let id = k.start();
        let chk = check_interaction_pair(&k, &id, &id, 1, 2).unwrap();
        assert!(!chk.first_clause);
        assert!(chk.second_clause);
        assert_eq!(chk.m_xy, ratio(1, 3));
        assert_eq!(chk.m_x_swapped, ratio(1, 3));
    }

    #[test]
    fn quotient_wash_detectors_are_sound() {
        let k = QuotWash::line(3);
        let report = check_event_soundness(&k, 1000).unwrap();
        assert!(report.is_sound(), "{report}");
        assert!(report.events_checked > 0);
    }

    #[test]
    fn jumbled_point_mass_singleton() {
        let k = QuotWash::line(3);
        let dist = vec![(k.start(), one())];
        assert!(check_jumbled(&k, &dist, &[1]));
        // Swapping separated cards 1,2 moves the canonical start elsewhere.
        assert!(!check_jumbled(&k, &dist, &[1, 2]));
    }
}
