//! Classical random walks on decks: lazy adjacent transpositions, the
//! walk generated by {identity, n-cycle, top swap}, random-to-random, and
//! random-to-top.
//!
//! Steps are right-multiplications by position rearrangements, so every
//! walk commutes with the label action. Interaction events are certified
//! by record-level twins: an equal-probability record whose outcome is the
//! pair-relabeled outcome (e.g. the two coin outcomes of a chosen adjacent
//! pair, or the two insertion slots straddling a card).

use rand::Rng;

use super::{DeckKernel, EventKernel, EventKind, Kernel, Phase, StepEvent};
use crate::error::{Error, Result};
use crate::exact::{ratio, Exact};
use crate::perm::{Label, Permutation, Transposition};

// ---------------------------------------------------------------------------
// Lazy adjacent transpositions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AdjRecord {
    /// Chosen position pair `(pos, pos+1)`, `1 ≤ pos ≤ n-1`.
    pub pos: usize,
    pub swap: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct AdjKernel {
    pub n: usize,
}

impl AdjKernel {
    pub fn sample<R: Rng>(&self, rng: &mut R) -> AdjRecord {
        AdjRecord {
            pos: rng.random_range(1..self.n),
            swap: rng.random_range(0..2u8) == 1,
        }
    }
}

impl Kernel for AdjKernel {
    type State = Permutation;
    type Record = AdjRecord;

    fn n(&self) -> usize {
        self.n
    }

    fn start(&self) -> Permutation {
        Permutation::identity(self.n)
    }

    fn transitions(&self, _s: &Permutation) -> Vec<(AdjRecord, Exact)> {
        let p = ratio(1, 2 * (self.n as i64 - 1));
        let mut out = Vec::new();
        for pos in 1..self.n {
            for swap in [false, true] {
                out.push((AdjRecord { pos, swap }, p.clone()));
            }
        }
        out
    }

    fn apply(&self, s: &Permutation, r: &AdjRecord) -> Result<(Permutation, Vec<StepEvent>)> {
        if r.pos == 0 || r.pos >= self.n {
            return Err(Error::InfeasibleRecord(format!("position pair {}", r.pos)));
        }
        let (a, b) = (s.apply(r.pos), s.apply(r.pos + 1));
        let events = vec![StepEvent {
            phase: None,
            pair: Transposition::new(a, b)?,
            kind: EventKind::AdjacentPairChosen,
        }];
        let next = if r.swap {
            let mut map = s.as_slice().to_vec();
            map.swap(r.pos - 1, r.pos);
            Permutation::from_map(map)?
        } else {
            s.clone()
        };
        Ok((next, events))
    }

    fn relabel_state(&self, s: &Permutation, g: &Permutation) -> Permutation {
        g.compose(s).expect("same n")
    }

    fn relabel_record(&self, r: &AdjRecord, _i: Label, _j: Label) -> AdjRecord {
        // Positions and coins carry no labels.
        *r
    }
}

impl EventKernel for AdjKernel {
    fn twin(
        &self,
        _s: &Permutation,
        r: &AdjRecord,
        _pair: Transposition,
        _phase: Option<Phase>,
    ) -> Result<AdjRecord> {
        Ok(AdjRecord {
            pos: r.pos,
            swap: !r.swap,
        })
    }
}

impl DeckKernel for AdjKernel {
    type Collect = ();

    fn collect_transitions(&self, _s: &Permutation) -> Vec<((), Exact)> {
        vec![((), crate::exact::one())]
    }

    fn assemble(&self, s: &Permutation, _c: &()) -> Permutation {
        s.clone()
    }

    fn relabel_collect(&self, _c: &(), _i: Label, _j: Label) {}
}

// ---------------------------------------------------------------------------
// Identity / n-cycle / top-swap walk
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum CycleGen {
    Id,
    Cycle,
    TopSwap,
}

#[derive(Debug, Clone, Copy)]
pub struct CycleKernel {
    pub n: usize,
}

impl CycleKernel {
    pub fn sample<R: Rng>(&self, rng: &mut R) -> CycleGen {
        match rng.random_range(0..3u8) {
            0 => CycleGen::Id,
            1 => CycleGen::Cycle,
            _ => CycleGen::TopSwap,
        }
    }

    /// The position n-cycle 1→2→…→n→1 as a deck rearrangement.
    fn cycle_perm(&self) -> Permutation {
        let mut map: Vec<usize> = (2..=self.n).collect();
        map.push(1);
        Permutation::from_map(map).expect("valid cycle")
    }
}

impl Kernel for CycleKernel {
    type State = Permutation;
    type Record = CycleGen;

    fn n(&self) -> usize {
        self.n
    }

    fn start(&self) -> Permutation {
        Permutation::identity(self.n)
    }

    fn transitions(&self, _s: &Permutation) -> Vec<(CycleGen, Exact)> {
        let third = ratio(1, 3);
        vec![
            (CycleGen::Id, third.clone()),
            (CycleGen::Cycle, third.clone()),
            (CycleGen::TopSwap, third),
        ]
    }

    fn apply(&self, s: &Permutation, r: &CycleGen) -> Result<(Permutation, Vec<StepEvent>)> {
        let events = match r {
            CycleGen::Id | CycleGen::TopSwap => vec![StepEvent {
                phase: None,
                pair: Transposition::new(s.apply(1), s.apply(2))?,
                kind: EventKind::TopTwo,
            }],
            CycleGen::Cycle => Vec::new(),
        };
        let next = match r {
            CycleGen::Id => s.clone(),
            CycleGen::Cycle => s.compose(&self.cycle_perm())?,
            CycleGen::TopSwap => s.compose(&Permutation::transposition(self.n, 1, 2))?,
        };
        Ok((next, events))
    }

    fn relabel_state(&self, s: &Permutation, g: &Permutation) -> Permutation {
        g.compose(s).expect("same n")
    }

    fn relabel_record(&self, r: &CycleGen, _i: Label, _j: Label) -> CycleGen {
        *r
    }
}

impl EventKernel for CycleKernel {
    fn twin(
        &self,
        _s: &Permutation,
        r: &CycleGen,
        _pair: Transposition,
        _phase: Option<Phase>,
    ) -> Result<CycleGen> {
        match r {
            CycleGen::Id => Ok(CycleGen::TopSwap),
            CycleGen::TopSwap => Ok(CycleGen::Id),
            CycleGen::Cycle => Err(Error::InternalContract(
                "cycle generator emits no event and has no twin".into(),
            )),
        }
    }
}

impl DeckKernel for CycleKernel {
    type Collect = ();

    fn collect_transitions(&self, _s: &Permutation) -> Vec<((), Exact)> {
        vec![((), crate::exact::one())]
    }

    fn assemble(&self, s: &Permutation, _c: &()) -> Permutation {
        s.clone()
    }

    fn relabel_collect(&self, _c: &(), _i: Label, _j: Label) {}
}

// ---------------------------------------------------------------------------
// Random-to-random
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RtrRecord {
    pub card: Label,
    /// Final position of the reinserted card, 1-based.
    pub slot: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct RtrKernel {
    pub n: usize,
}

impl RtrKernel {
    pub fn sample<R: Rng>(&self, rng: &mut R) -> RtrRecord {
        RtrRecord {
            card: rng.random_range(1..=self.n),
            slot: rng.random_range(1..=self.n),
        }
    }
}

impl Kernel for RtrKernel {
    type State = Permutation;
    type Record = RtrRecord;

    fn n(&self) -> usize {
        self.n
    }

    fn start(&self) -> Permutation {
        Permutation::identity(self.n)
    }

    fn transitions(&self, _s: &Permutation) -> Vec<(RtrRecord, Exact)> {
        let p = ratio(1, (self.n * self.n) as i64);
        let mut out = Vec::new();
        for card in 1..=self.n {
            for slot in 1..=self.n {
                out.push((RtrRecord { card, slot }, p.clone()));
            }
        }
        out
    }

    fn apply(&self, s: &Permutation, r: &RtrRecord) -> Result<(Permutation, Vec<StepEvent>)> {
        if r.card == 0 || r.card > self.n || r.slot == 0 || r.slot > self.n {
            return Err(Error::InfeasibleRecord(format!("{r:?}")));
        }
        let mut map = s.as_slice().to_vec();
        let from = map
            .iter()
            .position(|&l| l == r.card)
            .expect("card present");
        map.remove(from);
        map.insert(r.slot - 1, r.card);
        let next = Permutation::from_map(map)?;
        let events = if r.slot < self.n {
            vec![StepEvent {
                phase: None,
                pair: Transposition::new(r.card, next.apply(r.slot + 1))?,
                kind: EventKind::InsertedAbove,
            }]
        } else {
            Vec::new()
        };
        Ok((next, events))
    }

    fn relabel_state(&self, s: &Permutation, g: &Permutation) -> Permutation {
        g.compose(s).expect("same n")
    }

    fn relabel_record(&self, r: &RtrRecord, i: Label, j: Label) -> RtrRecord {
        let card = if r.card == i {
            j
        } else if r.card == j {
            i
        } else {
            r.card
        };
        RtrRecord { card, slot: r.slot }
    }
}

impl EventKernel for RtrKernel {
    fn twin(
        &self,
        s: &Permutation,
        r: &RtrRecord,
        pair: Transposition,
        _phase: Option<Phase>,
    ) -> Result<RtrRecord> {
        let other = if pair.i == r.card {
            pair.j
        } else if pair.j == r.card {
            pair.i
        } else {
            return Err(Error::InternalContract(format!(
                "event pair {pair} does not involve the moved card {}",
                r.card
            )));
        };
        let (next, _) = self.apply(s, r)?;
        if r.slot < self.n && next.apply(r.slot + 1) == other {
            // `other` directly beneath: placing one lower swaps them.
            Ok(RtrRecord {
                card: r.card,
                slot: r.slot + 1,
            })
        } else if r.slot > 1 && next.apply(r.slot - 1) == other {
            Ok(RtrRecord {
                card: r.card,
                slot: r.slot - 1,
            })
        } else {
            Err(Error::InternalContract(format!(
                "card {} is not adjacent to {} after {r:?}",
                other, r.card
            )))
        }
    }
}

impl DeckKernel for RtrKernel {
    type Collect = ();

    fn collect_transitions(&self, _s: &Permutation) -> Vec<((), Exact)> {
        vec![((), crate::exact::one())]
    }

    fn assemble(&self, s: &Permutation, _c: &()) -> Permutation {
        s.clone()
    }

    fn relabel_collect(&self, _c: &(), _i: Label, _j: Label) {}
}

// ---------------------------------------------------------------------------
// Random-to-top (fairness fixture and mixing baseline; no detector)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RttRecord {
    pub card: Label,
}

#[derive(Debug, Clone, Copy)]
pub struct RttKernel {
    pub n: usize,
}

impl RttKernel {
    pub fn sample<R: Rng>(&self, rng: &mut R) -> RttRecord {
        RttRecord {
            card: rng.random_range(1..=self.n),
        }
    }
}

impl Kernel for RttKernel {
    type State = Permutation;
    type Record = RttRecord;

    fn n(&self) -> usize {
        self.n
    }

    fn start(&self) -> Permutation {
        Permutation::identity(self.n)
    }

    fn transitions(&self, _s: &Permutation) -> Vec<(RttRecord, Exact)> {
        let p = ratio(1, self.n as i64);
        (1..=self.n)
            .map(|card| (RttRecord { card }, p.clone()))
            .collect()
    }

    fn apply(&self, s: &Permutation, r: &RttRecord) -> Result<(Permutation, Vec<StepEvent>)> {
        if r.card == 0 || r.card > self.n {
            return Err(Error::InfeasibleRecord(format!("{r:?}")));
        }
        let mut map = s.as_slice().to_vec();
        let from = map
            .iter()
            .position(|&l| l == r.card)
            .expect("card present");
        map.remove(from);
        map.insert(0, r.card);
        Ok((Permutation::from_map(map)?, Vec::new()))
    }

    fn relabel_state(&self, s: &Permutation, g: &Permutation) -> Permutation {
        g.compose(s).expect("same n")
    }

    fn relabel_record(&self, r: &RttRecord, i: Label, j: Label) -> RttRecord {
        let card = if r.card == i {
            j
        } else if r.card == j {
            i
        } else {
            r.card
        };
        RttRecord { card }
    }
}

impl EventKernel for RttKernel {
    fn twin(
        &self,
        _s: &Permutation,
        _r: &RttRecord,
        _pair: Transposition,
        _phase: Option<Phase>,
    ) -> Result<RttRecord> {
        Err(Error::InternalContract(
            "random-to-top emits no interaction events".into(),
        ))
    }
}

impl DeckKernel for RttKernel {
    type Collect = ();

    fn collect_transitions(&self, _s: &Permutation) -> Vec<((), Exact)> {
        vec![((), crate::exact::one())]
    }

    fn assemble(&self, s: &Permutation, _c: &()) -> Permutation {
        s.clone()
    }

    fn relabel_collect(&self, _c: &(), _i: Label, _j: Label) {}
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::one;

    #[test]
    fn adj_step_and_event() {
        let k = AdjKernel { n: 4 };
        let id = k.start();
        let (next, ev) = k.apply(&id, &AdjRecord { pos: 2, swap: true }).unwrap();
        assert_eq!(next.as_slice(), &[1, 3, 2, 4]);
        assert_eq!(ev[0].pair, Transposition::new(2, 3).unwrap());
        // The no-swap coin emits the same event.
        let (same, ev2) = k.apply(&id, &AdjRecord { pos: 2, swap: false }).unwrap();
        assert_eq!(same, id);
        assert_eq!(ev, ev2);
        // Twin outcomes differ by the pair's label action.
        assert_eq!(next, id.swap_labels(2, 3));
    }

    #[test]
    fn adj_lazy_transition_masses() {
        // Self-loop mass 1/2; each adjacent swap 1/(2(n-1)).
        let k = AdjKernel { n: 3 };
        let id = k.start();
        let mut stay = crate::exact::zero();
        for (r, p) in k.transitions(&id) {
            assert_eq!(p, ratio(1, 4));
            if !r.swap {
                stay += p;
            }
        }
        assert_eq!(stay, ratio(1, 2));
    }

    #[test]
    fn cycle_walk_generators() {
        let k = CycleKernel { n: 3 };
        let id = k.start();
        let (rot, ev) = k.apply(&id, &CycleGen::Cycle).unwrap();
        assert_eq!(rot.as_slice(), &[2, 3, 1]);
        assert!(ev.is_empty());
        let (swapped, ev) = k.apply(&id, &CycleGen::TopSwap).unwrap();
        assert_eq!(swapped.as_slice(), &[2, 1, 3]);
        assert_eq!(ev[0].kind, EventKind::TopTwo);
        assert_eq!(ev[0].pair, Transposition::new(1, 2).unwrap());
        // Id and TopSwap are each other's twins with (i j)-related outcomes.
        let (kept, ev_id) = k.apply(&id, &CycleGen::Id).unwrap();
        assert_eq!(ev_id, ev);
        assert_eq!(swapped, kept.swap_labels(1, 2));
        let total: Exact = k.transitions(&id).into_iter().map(|(_, p)| p).sum();
        assert_eq!(total, one());
    }

    #[test]
    fn rtr_insertion_and_event() {
        // Spec example: n=3 from id, card 1 to the bottom → deck [2,3,1],
        // no event at the bottom.
        let k = RtrKernel { n: 3 };
        let id = k.start();
        let (next, ev) = k.apply(&id, &RtrRecord { card: 1, slot: 3 }).unwrap();
        assert_eq!(next.as_slice(), &[2, 3, 1]);
        assert!(ev.is_empty());

        // Inserting above card 3 pairs with it.
        let (next, ev) = k.apply(&id, &RtrRecord { card: 1, slot: 2 }).unwrap();
        assert_eq!(next.as_slice(), &[2, 1, 3]);
        assert_eq!(ev[0].pair, Transposition::new(1, 3).unwrap());
        assert_eq!(ev[0].kind, EventKind::InsertedAbove);

        // Twin: one slot lower, outcome related by the pair swap.
        let twin = k
            .twin(&id, &RtrRecord { card: 1, slot: 2 }, ev[0].pair, None)
            .unwrap();
        assert_eq!(twin, RtrRecord { card: 1, slot: 3 });
        let (tw_next, _) = k.apply(&id, &twin).unwrap();
        assert_eq!(tw_next, next.swap_labels(1, 3));
        // ...and twinning again returns the original record.
        let back = k.twin(&id, &twin, ev[0].pair, None).unwrap();
        assert_eq!(back, RtrRecord { card: 1, slot: 2 });
    }

    #[test]
    fn rtt_moves_card_to_top() {
        let k = RttKernel { n: 3 };
        let id = k.start();
        let (next, ev) = k.apply(&id, &RttRecord { card: 3 }).unwrap();
        assert_eq!(next.as_slice(), &[3, 1, 2]);
        assert!(ev.is_empty());
        let trans = k.transitions(&id);
        assert_eq!(trans.len(), 3);
        assert!(trans.iter().all(|(_, p)| *p == ratio(1, 3)));
    }

    #[test]
    fn walk_steps_commute_with_relabeling() {
        // Fairness at the record level: relabeling the state and record
        // then replaying equals replaying then relabeling.
        let g = Permutation::from_map(vec![3, 1, 2]).unwrap();
        let deck = Permutation::from_map(vec![2, 3, 1]).unwrap();
        let k = RtrKernel { n: 3 };
        for (r, _) in k.transitions(&deck) {
            let (a, _) = k.apply(&deck, &r).unwrap();
            let relabeled_first = {
                let gs = k.relabel_state(&deck, &g);
                // relabel_record handles transpositions; build the general
                // action by applying g to the card label directly.
                let card = g.apply(r.card);
                let (b, _) = k.apply(&gs, &RtrRecord { card, slot: r.slot }).unwrap();
                b
            };
            assert_eq!(k.relabel_state(&a, &g), relabeled_first);
        }
    }
}
