//! Shuffling processes: Markov chains on a rich state space with an S_n
//! label action and a projection to decks, emitting interaction events.
//!
//! Seven families are provided. Pile-based ("wash") families move cards
//! between sites and stack co-located cards into ordered piles; walk
//! families act directly on a deck. Every step can report *interaction
//! events*: unordered label pairs whose realized transition has an
//! equally-probable twin under relabeling the pair. Those events are what
//! the stopping-time and path-mutation machinery consume.
//!
//! Two views of each wash family exist:
//!
//! * the *ordered* kernel (piles as ordered stacks, uniform-slot insertion
//!   or GSR merges) — used for projection, exact distribution evolution,
//!   fairness checks, and simulation output;
//! * the *position quotient* (piles as sets, with the pile orders deferred
//!   to an explicit final collection record) — used for event-symmetry
//!   checks and path mutation, where the label action must genuinely fix
//!   co-located states.
//!
//! Both views have identical deck laws; an exact cross-check test in the
//! mixing module asserts that equality.

pub mod checks;
pub mod quotient;
pub mod walks;
pub mod wash;
pub mod washlong;

use std::fmt;
use std::hash::Hash;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{ratio, Exact};
use crate::perm::{Label, Permutation, Transposition};

/// Process family identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Wash1d,
    Wash1dLong,
    WashGrid,
    AdjTransposition,
    CycleTransposition,
    RandomToRandom,
    RandomToTop,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Wash1d,
        Family::Wash1dLong,
        Family::WashGrid,
        Family::AdjTransposition,
        Family::CycleTransposition,
        Family::RandomToRandom,
        Family::RandomToTop,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Family::Wash1d => "wash1d",
            Family::Wash1dLong => "wash1d-long",
            Family::WashGrid => "wash-grid",
            Family::AdjTransposition => "adj-transposition",
            Family::CycleTransposition => "cycle-transposition",
            Family::RandomToRandom => "random-to-random",
            Family::RandomToTop => "random-to-top",
        }
    }

    pub fn parse(s: &str) -> Result<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.id() == s)
            .ok_or_else(|| Error::Validation(format!("unknown family {s:?}")))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// A fully parameterized process.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessSpec {
    pub family: Family,
    /// Deck size.
    pub n: usize,
    /// Sweep-displacement parameter for `wash1d-long`, as an exact rational
    /// in (0,1). Defaults to 1/2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<(i64, i64)>,
    /// Grid dimension for `wash-grid`. Defaults to 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
}

impl ProcessSpec {
    pub fn new(family: Family, n: usize) -> Self {
        ProcessSpec {
            family,
            n,
            p: None,
            dim: None,
        }
    }

    pub fn with_p(mut self, num: i64, den: i64) -> Self {
        self.p = Some((num, den));
        self
    }

    pub fn with_dim(mut self, dim: usize) -> Self {
        self.dim = Some(dim);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::Validation("deck size must be ≥ 1".into()));
        }
        if self.family == Family::Wash1dLong {
            let (a, b) = self.p.unwrap_or((1, 2));
            if a <= 0 || b <= 0 || a >= b {
                return Err(Error::Validation(format!(
                    "wash1d-long needs 0 < p < 1, got {a}/{b}"
                )));
            }
        }
        if self.family == Family::WashGrid && self.dim.unwrap_or(1) < 1 {
            return Err(Error::Validation("wash-grid needs dimension ≥ 1".into()));
        }
        Ok(())
    }

    pub fn p_exact(&self) -> Exact {
        let (a, b) = self.p.unwrap_or((1, 2));
        ratio(a, b)
    }

    pub fn p_f64(&self) -> f64 {
        let (a, b) = self.p.unwrap_or((1, 2));
        a as f64 / b as f64
    }

    pub fn grid_dim(&self) -> usize {
        self.dim.unwrap_or(1)
    }
}

/// Sweep phase for half-step events of the long-range wash.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    RightSweep,
    LeftSweep,
}

/// Detector tags for interaction events.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    SamePile,
    Overtake,
    AdjacentPairChosen,
    TopTwo,
    InsertedAbove,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EventKind::SamePile => "same-pile",
            EventKind::Overtake => "overtake",
            EventKind::AdjacentPairChosen => "adjacent-pair-chosen",
            EventKind::TopTwo => "top-two",
            EventKind::InsertedAbove => "inserted-above",
        };
        f.write_str(s)
    }
}

/// One interaction event within a step. Within a step, events are listed
/// chronologically (right sweep, left sweep, then full-step detectors) and
/// in lexicographic pair order among simultaneous ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StepEvent {
    pub phase: Option<Phase>,
    pub pair: Transposition,
    pub kind: EventKind,
}

/// An event stamped with its (1-based) step index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteractionEvent {
    pub time: usize,
    pub phase: Option<Phase>,
    pub pair: Transposition,
    pub kind: EventKind,
}

impl InteractionEvent {
    pub fn at(time: usize, ev: StepEvent) -> Self {
        InteractionEvent {
            time,
            phase: ev.phase,
            pair: ev.pair,
            kind: ev.kind,
        }
    }
}

/// A Markov kernel with an S_n label action, exact transition enumeration,
/// and per-step interaction events.
pub trait Kernel {
    type State: Clone + Eq + Ord + Hash + fmt::Debug;
    type Record: Clone + Eq + Hash + fmt::Debug;

    fn n(&self) -> usize;

    fn start(&self) -> Self::State;

    /// Every positive-probability record from `s`, with exact probabilities
    /// summing to one.
    fn transitions(&self, s: &Self::State) -> Vec<(Self::Record, Exact)>;

    /// Deterministic replay of one record.
    fn apply(&self, s: &Self::State, r: &Self::Record) -> Result<(Self::State, Vec<StepEvent>)>;

    /// The S_n label action on states.
    fn relabel_state(&self, s: &Self::State, g: &Permutation) -> Self::State;

    /// Swap labels `i` and `j` in every label-valued record field.
    fn relabel_record(&self, r: &Self::Record, i: Label, j: Label) -> Self::Record;

    /// Exact probability of `r` from `s`.
    fn record_probability(&self, s: &Self::State, r: &Self::Record) -> Result<Exact> {
        self.transitions(s)
            .into_iter()
            .find(|(cand, _)| cand == r)
            .map(|(_, p)| p)
            .ok_or_else(|| Error::InfeasibleRecord(format!("{r:?}")))
    }
}

/// Kernels whose emitted events are certified by a record-level twin: an
/// equal-probability record whose outcome is the pair-relabeled outcome.
/// For first-clause events (the post-state itself is fixed by the pair's
/// label action) the twin is the record itself.
pub trait EventKernel: Kernel {
    fn twin(
        &self,
        s: &Self::State,
        r: &Self::Record,
        pair: Transposition,
        phase: Option<Phase>,
    ) -> Result<Self::Record>;
}

/// Kernels usable by the path-mutation machinery: runs end by assembling a
/// deck from the final state plus a collection record that carries any
/// deferred ordering randomness (trivial for walk families).
pub trait DeckKernel: EventKernel {
    type Collect: Clone + Eq + Hash + fmt::Debug;

    fn collect_transitions(&self, s: &Self::State) -> Vec<(Self::Collect, Exact)>;

    fn assemble(&self, s: &Self::State, c: &Self::Collect) -> Permutation;

    fn relabel_collect(&self, c: &Self::Collect, i: Label, j: Label) -> Self::Collect;
}

/// All unordered pairs co-located in the given piles, lexicographic.
pub(crate) fn co_located_pairs(piles: &[Vec<Label>]) -> Vec<Transposition> {
    let mut pairs = Vec::new();
    for pile in piles {
        for a in 0..pile.len() {
            for b in (a + 1)..pile.len() {
                pairs.push(Transposition::new(pile[a], pile[b]).expect("distinct labels"));
            }
        }
    }
    pairs.sort();
    pairs
}

// ---------------------------------------------------------------------------
// Family-dispatched public surface
// ---------------------------------------------------------------------------

/// Rich state of a process: ordered piles for wash families (indexed by
/// site, each pile top-first), a deck for walk families.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ProcessState {
    Piles(Vec<Vec<Label>>),
    Deck(Permutation),
}

impl ProcessState {
    pub fn piles(&self) -> Option<&Vec<Vec<Label>>> {
        match self {
            ProcessState::Piles(p) => Some(p),
            ProcessState::Deck(_) => None,
        }
    }
}

/// Auxiliary randomness of one step, sufficient for deterministic replay.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StepRecord {
    Wash {
        card: Label,
        mv: wash::WashMove,
        /// Insertion slot (0 = top of destination pile); `None` when the
        /// card did not actually move (stay, or blocked at the boundary).
        slot: Option<usize>,
    },
    WashLong(washlong::WlRecord),
    Adj {
        /// Position pair `(pos, pos+1)`, `1 ≤ pos ≤ n-1`.
        pos: usize,
        swap: bool,
    },
    Cycle {
        gen: walks::CycleGen,
    },
    Rtr {
        card: Label,
        /// Final position of the reinserted card, 1-based.
        slot: usize,
    },
    Rtt {
        card: Label,
    },
}

impl ProcessSpec {
    /// The fixed deterministic start: wash families put card `i` alone at
    /// the `i`-th site (grid: lexicographic order); walks start at the
    /// identity deck.
    pub fn canonical_start(&self) -> ProcessState {
        match self.family {
            Family::Wash1d => ProcessState::Piles(wash::WashKernel::line(self.n).start()),
            Family::WashGrid => {
                ProcessState::Piles(wash::WashKernel::grid(self.n, self.grid_dim()).start())
            }
            Family::Wash1dLong => {
                ProcessState::Piles(washlong::WashLongKernel::gsr(self.n, self.p_exact()).start())
            }
            _ => ProcessState::Deck(Permutation::identity(self.n)),
        }
    }

    /// Draw one step. Returns the record, the next state, and the events.
    pub fn sample_step<R: Rng>(
        &self,
        state: &ProcessState,
        rng: &mut R,
    ) -> (StepRecord, ProcessState, Vec<StepEvent>) {
        match (self.family, state) {
            (Family::Wash1d, ProcessState::Piles(p)) => {
                let k = wash::WashKernel::line(self.n);
                let r = k.sample(p, rng);
                let (next, ev) = k.apply(p, &r).expect("sampled record is feasible");
                (
                    StepRecord::Wash {
                        card: r.card,
                        mv: r.mv,
                        slot: r.slot,
                    },
                    ProcessState::Piles(next),
                    ev,
                )
            }
            (Family::WashGrid, ProcessState::Piles(p)) => {
                let k = wash::WashKernel::grid(self.n, self.grid_dim());
                let r = k.sample(p, rng);
                let (next, ev) = k.apply(p, &r).expect("sampled record is feasible");
                (
                    StepRecord::Wash {
                        card: r.card,
                        mv: r.mv,
                        slot: r.slot,
                    },
                    ProcessState::Piles(next),
                    ev,
                )
            }
            (Family::Wash1dLong, ProcessState::Piles(p)) => {
                let k = washlong::WashLongKernel::gsr(self.n, self.p_exact());
                let r = k.sample(p, self.p_f64(), rng);
                let (next, ev) = k.apply(p, &r).expect("sampled record is feasible");
                (StepRecord::WashLong(r), ProcessState::Piles(next), ev)
            }
            (Family::AdjTransposition, ProcessState::Deck(d)) => {
                let k = walks::AdjKernel { n: self.n };
                let r = k.sample(rng);
                let (next, ev) = k.apply(d, &r).expect("feasible");
                (
                    StepRecord::Adj {
                        pos: r.pos,
                        swap: r.swap,
                    },
                    ProcessState::Deck(next),
                    ev,
                )
            }
            (Family::CycleTransposition, ProcessState::Deck(d)) => {
                let k = walks::CycleKernel { n: self.n };
                let r = k.sample(rng);
                let (next, ev) = k.apply(d, &r).expect("feasible");
                (StepRecord::Cycle { gen: r }, ProcessState::Deck(next), ev)
            }
            (Family::RandomToRandom, ProcessState::Deck(d)) => {
                let k = walks::RtrKernel { n: self.n };
                let r = k.sample(rng);
                let (next, ev) = k.apply(d, &r).expect("feasible");
                (
                    StepRecord::Rtr {
                        card: r.card,
                        slot: r.slot,
                    },
                    ProcessState::Deck(next),
                    ev,
                )
            }
            (Family::RandomToTop, ProcessState::Deck(d)) => {
                let k = walks::RttKernel { n: self.n };
                let r = k.sample(rng);
                let (next, ev) = k.apply(d, &r).expect("feasible");
                (StepRecord::Rtt { card: r.card }, ProcessState::Deck(next), ev)
            }
            _ => panic!("state kind does not match family {}", self.family),
        }
    }

    /// Deterministic replay of a recorded step.
    pub fn replay_step(
        &self,
        state: &ProcessState,
        record: &StepRecord,
    ) -> Result<(ProcessState, Vec<StepEvent>)> {
        match (self.family, state, record) {
            (Family::Wash1d, ProcessState::Piles(p), StepRecord::Wash { card, mv, slot }) => {
                let k = wash::WashKernel::line(self.n);
                let r = wash::WashRecord {
                    card: *card,
                    mv: *mv,
                    slot: *slot,
                };
                let (next, ev) = k.apply(p, &r)?;
                Ok((ProcessState::Piles(next), ev))
            }
            (Family::WashGrid, ProcessState::Piles(p), StepRecord::Wash { card, mv, slot }) => {
                let k = wash::WashKernel::grid(self.n, self.grid_dim());
                let r = wash::WashRecord {
                    card: *card,
                    mv: *mv,
                    slot: *slot,
                };
                let (next, ev) = k.apply(p, &r)?;
                Ok((ProcessState::Piles(next), ev))
            }
            (Family::Wash1dLong, ProcessState::Piles(p), StepRecord::WashLong(r)) => {
                let k = washlong::WashLongKernel::gsr(self.n, self.p_exact());
                let (next, ev) = k.apply(p, r)?;
                Ok((ProcessState::Piles(next), ev))
            }
            (Family::AdjTransposition, ProcessState::Deck(d), StepRecord::Adj { pos, swap }) => {
                let k = walks::AdjKernel { n: self.n };
                let (next, ev) = k.apply(
                    d,
                    &walks::AdjRecord {
                        pos: *pos,
                        swap: *swap,
                    },
                )?;
                Ok((ProcessState::Deck(next), ev))
            }
            (Family::CycleTransposition, ProcessState::Deck(d), StepRecord::Cycle { gen }) => {
                let k = walks::CycleKernel { n: self.n };
                let (next, ev) = k.apply(d, gen)?;
                Ok((ProcessState::Deck(next), ev))
            }
            (Family::RandomToRandom, ProcessState::Deck(d), StepRecord::Rtr { card, slot }) => {
                let k = walks::RtrKernel { n: self.n };
                let (next, ev) = k.apply(
                    d,
                    &walks::RtrRecord {
                        card: *card,
                        slot: *slot,
                    },
                )?;
                Ok((ProcessState::Deck(next), ev))
            }
            (Family::RandomToTop, ProcessState::Deck(d), StepRecord::Rtt { card }) => {
                let k = walks::RttKernel { n: self.n };
                let (next, ev) = k.apply(d, &walks::RttRecord { card: *card })?;
                Ok((ProcessState::Deck(next), ev))
            }
            _ => Err(Error::InfeasibleRecord(format!(
                "record {record:?} does not match family {}",
                self.family
            ))),
        }
    }

    /// Project a state to the deck it would produce if collected now: piles
    /// are stacked in site order with the pile at the first site on top.
    pub fn project(&self, state: &ProcessState) -> Permutation {
        match state {
            ProcessState::Deck(d) => d.clone(),
            ProcessState::Piles(piles) => project_piles(self.n, piles),
        }
    }

    /// Exact one-step transition enumeration. Guarded: only meaningful at
    /// small `n`; the long-range wash truncates displacements at the walls,
    /// which is exact because the walls absorb the geometric tail.
    pub fn enumerate_transitions(
        &self,
        state: &ProcessState,
    ) -> Result<Vec<(StepRecord, ProcessState, Exact)>> {
        const GUARD: usize = 6;
        if self.n > GUARD {
            return Err(Error::GuardExceeded {
                what: "transition enumeration",
                n: self.n,
                guard: GUARD,
            });
        }
        match (self.family, state) {
            (Family::Wash1d, ProcessState::Piles(p)) => {
                let k = wash::WashKernel::line(self.n);
                Ok(k.transitions(p)
                    .into_iter()
                    .map(|(r, pr)| {
                        let (next, _) = k.apply(p, &r).expect("enumerated record");
                        (
                            StepRecord::Wash {
                                card: r.card,
                                mv: r.mv,
                                slot: r.slot,
                            },
                            ProcessState::Piles(next),
                            pr,
                        )
                    })
                    .collect())
            }
            (Family::WashGrid, ProcessState::Piles(p)) => {
                let k = wash::WashKernel::grid(self.n, self.grid_dim());
                Ok(k.transitions(p)
                    .into_iter()
                    .map(|(r, pr)| {
                        let (next, _) = k.apply(p, &r).expect("enumerated record");
                        (
                            StepRecord::Wash {
                                card: r.card,
                                mv: r.mv,
                                slot: r.slot,
                            },
                            ProcessState::Piles(next),
                            pr,
                        )
                    })
                    .collect())
            }
            (Family::Wash1dLong, ProcessState::Piles(p)) => {
                let k = washlong::WashLongKernel::gsr(self.n, self.p_exact());
                Ok(k.transitions(p)
                    .into_iter()
                    .map(|(r, pr)| {
                        let (next, _) = k.apply(p, &r).expect("enumerated record");
                        (StepRecord::WashLong(r), ProcessState::Piles(next), pr)
                    })
                    .collect())
            }
            (Family::AdjTransposition, ProcessState::Deck(d)) => {
                let k = walks::AdjKernel { n: self.n };
                Ok(k.transitions(d)
                    .into_iter()
                    .map(|(r, pr)| {
                        let (next, _) = k.apply(d, &r).expect("enumerated record");
                        (
                            StepRecord::Adj {
                                pos: r.pos,
                                swap: r.swap,
                            },
                            ProcessState::Deck(next),
                            pr,
                        )
                    })
                    .collect())
            }
            (Family::CycleTransposition, ProcessState::Deck(d)) => {
                let k = walks::CycleKernel { n: self.n };
                Ok(k.transitions(d)
                    .into_iter()
                    .map(|(r, pr)| {
                        let (next, _) = k.apply(d, &r).expect("enumerated record");
                        (StepRecord::Cycle { gen: r }, ProcessState::Deck(next), pr)
                    })
                    .collect())
            }
            (Family::RandomToRandom, ProcessState::Deck(d)) => {
                let k = walks::RtrKernel { n: self.n };
                Ok(k.transitions(d)
                    .into_iter()
                    .map(|(r, pr)| {
                        let (next, _) = k.apply(d, &r).expect("enumerated record");
                        (
                            StepRecord::Rtr {
                                card: r.card,
                                slot: r.slot,
                            },
                            ProcessState::Deck(next),
                            pr,
                        )
                    })
                    .collect())
            }
            (Family::RandomToTop, ProcessState::Deck(d)) => {
                let k = walks::RttKernel { n: self.n };
                Ok(k.transitions(d)
                    .into_iter()
                    .map(|(r, pr)| {
                        let (next, _) = k.apply(d, &r).expect("enumerated record");
                        (StepRecord::Rtt { card: r.card }, ProcessState::Deck(next), pr)
                    })
                    .collect())
            }
            _ => Err(Error::InfeasibleRecord("state/family mismatch".into())),
        }
    }

    /// The S_n label action on rich states.
    pub fn relabel_state(&self, state: &ProcessState, g: &Permutation) -> ProcessState {
        match state {
            ProcessState::Deck(d) => {
                ProcessState::Deck(g.compose(d).expect("same deck size"))
            }
            ProcessState::Piles(piles) => ProcessState::Piles(relabel_piles(piles, g)),
        }
    }
}

pub(crate) fn project_piles(n: usize, piles: &[Vec<Label>]) -> Permutation {
    let mut map = Vec::with_capacity(n);
    for pile in piles {
        map.extend_from_slice(pile);
    }
    debug_assert_eq!(map.len(), n);
    Permutation::from_map(map).expect("piles partition the labels")
}

pub(crate) fn relabel_piles(piles: &[Vec<Label>], g: &Permutation) -> Vec<Vec<Label>> {
    piles
        .iter()
        .map(|pile| pile.iter().map(|&l| g.apply(l)).collect())
        .collect()
}
