//! One-card-per-step wash shuffles on a line of positions or a
//! d-dimensional grid.
//!
//! A step chooses a uniform card. On the line it moves left or right with
//! probability 1/4 each and stays with probability 1/2; a move off either
//! end leaves the card in place (the step is consumed). On the grid the
//! card stays with probability 1/2, otherwise moves to a uniformly chosen
//! existing neighbour. A card arriving at an occupied site is inserted at
//! a uniform slot of the pile there.

use rand::Rng;

use super::{co_located_pairs, EventKind, Kernel, StepEvent};
use crate::error::{Error, Result};
use crate::exact::{one, ratio, Exact};
use crate::perm::{Label, Permutation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum WashMove {
    Stay,
    Left,
    Right,
    /// Grid move to an explicit destination site (its lexicographic rank).
    To(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WashRecord {
    pub card: Label,
    pub mv: WashMove,
    pub slot: Option<usize>,
}

#[derive(Debug, Clone)]
pub enum Topology {
    Line { sites: usize },
    Grid { side: usize, dim: usize, neighbors: Vec<Vec<usize>> },
}

impl Topology {
    pub fn sites(&self) -> usize {
        match self {
            Topology::Line { sites } => *sites,
            Topology::Grid { neighbors, .. } => neighbors.len(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct WashKernel {
    pub n: usize,
    pub topo: Topology,
}

impl WashKernel {
    pub fn line(n: usize) -> Self {
        WashKernel {
            n,
            topo: Topology::Line { sites: n },
        }
    }

    pub fn grid(n: usize, dim: usize) -> Self {
        let side = n;
        let sites = side.pow(dim as u32);
        let mut neighbors = vec![Vec::new(); sites];
        for rank in 0..sites {
            let coords = unrank(rank, side, dim);
            for axis in 0..dim {
                if coords[axis] > 0 {
                    let mut c = coords.clone();
                    c[axis] -= 1;
                    neighbors[rank].push(rank_of(&c, side));
                }
                if coords[axis] + 1 < side {
                    let mut c = coords.clone();
                    c[axis] += 1;
                    neighbors[rank].push(rank_of(&c, side));
                }
            }
            neighbors[rank].sort_unstable();
        }
        WashKernel {
            n,
            topo: Topology::Grid { side, dim, neighbors },
        }
    }

    pub fn sites(&self) -> usize {
        self.topo.sites()
    }

    pub fn site_of(&self, piles: &[Vec<Label>], card: Label) -> usize {
        piles
            .iter()
            .position(|pile| pile.contains(&card))
            .expect("every label occurs in exactly one pile")
    }

    /// Destination of a move, or `None` when blocked at a boundary.
    fn dest(&self, from: usize, mv: WashMove) -> Result<Option<usize>> {
        match (&self.topo, mv) {
            (Topology::Line { .. }, WashMove::Stay) => Ok(None),
            (Topology::Line { .. }, WashMove::Left) => {
                Ok(if from == 0 { None } else { Some(from - 1) })
            }
            (Topology::Line { sites }, WashMove::Right) => {
                Ok(if from + 1 == *sites { None } else { Some(from + 1) })
            }
            (Topology::Grid { .. }, WashMove::Stay) => Ok(None),
            (Topology::Grid { neighbors, .. }, WashMove::To(d)) => {
                if neighbors[from].contains(&d) {
                    Ok(Some(d))
                } else {
                    Err(Error::InfeasibleRecord(format!(
                        "site {d} is not a neighbour of {from}"
                    )))
                }
            }
            _ => Err(Error::InfeasibleRecord(format!(
                "move {mv:?} not valid on this topology"
            ))),
        }
    }

    fn move_probability(&self, from: usize, mv: WashMove) -> Result<Exact> {
        let per_card = ratio(1, self.n as i64);
        match (&self.topo, mv) {
            (Topology::Line { .. }, WashMove::Stay) => Ok(per_card * ratio(1, 2)),
            (Topology::Line { .. }, WashMove::Left | WashMove::Right) => {
                Ok(per_card * ratio(1, 4))
            }
            (Topology::Grid { .. }, WashMove::Stay) => Ok(per_card * ratio(1, 2)),
            (Topology::Grid { neighbors, .. }, WashMove::To(_)) => {
                let deg = neighbors[from].len() as i64;
                Ok(per_card * ratio(1, 2 * deg))
            }
            _ => Err(Error::InfeasibleRecord(format!("move {mv:?}"))),
        }
    }

    pub fn sample<R: Rng>(&self, piles: &[Vec<Label>], rng: &mut R) -> WashRecord {
        let card = rng.random_range(1..=self.n);
        let from = self.site_of(piles, card);
        let mv = match &self.topo {
            Topology::Line { .. } => match rng.random_range(0..4u8) {
                0 => WashMove::Left,
                1 => WashMove::Right,
                _ => WashMove::Stay,
            },
            Topology::Grid { neighbors, .. } => {
                if rng.random_range(0..2u8) == 0 {
                    WashMove::Stay
                } else {
                    let nbs = &neighbors[from];
                    WashMove::To(nbs[rng.random_range(0..nbs.len())])
                }
            }
        };
        let slot = match self.dest(from, mv).expect("sampled move is valid") {
            Some(d) => Some(rng.random_range(0..=piles[d].len())),
            None => None,
        };
        WashRecord { card, mv, slot }
    }
}

impl Kernel for WashKernel {
    type State = Vec<Vec<Label>>;
    type Record = WashRecord;

    fn n(&self) -> usize {
        self.n
    }

    fn start(&self) -> Self::State {
        let mut piles = vec![Vec::new(); self.sites()];
        for card in 1..=self.n {
            piles[card - 1].push(card);
        }
        piles
    }

    fn transitions(&self, s: &Self::State) -> Vec<(Self::Record, Exact)> {
        let mut out = Vec::new();
        for card in 1..=self.n {
            let from = self.site_of(s, card);
            let moves: Vec<WashMove> = match &self.topo {
                Topology::Line { .. } => vec![WashMove::Stay, WashMove::Left, WashMove::Right],
                Topology::Grid { neighbors, .. } => {
                    let mut ms = vec![WashMove::Stay];
                    ms.extend(neighbors[from].iter().map(|&d| WashMove::To(d)));
                    ms
                }
            };
            for mv in moves {
                let p_move = self.move_probability(from, mv).expect("valid move");
                match self.dest(from, mv).expect("valid move") {
                    None => out.push((
                        WashRecord {
                            card,
                            mv,
                            slot: None,
                        },
                        p_move,
                    )),
                    Some(d) => {
                        let slots = s[d].len() + 1;
                        let p_slot = ratio(1, slots as i64);
                        for slot in 0..slots {
                            out.push((
                                WashRecord {
                                    card,
                                    mv,
                                    slot: Some(slot),
                                },
                                p_move.clone() * p_slot.clone(),
                            ));
                        }
                    }
                }
            }
        }
        debug_assert_eq!(
            out.iter().map(|(_, p)| p.clone()).sum::<Exact>(),
            one(),
            "wash transition probabilities must sum to 1"
        );
        out
    }

    fn apply(&self, s: &Self::State, r: &Self::Record) -> Result<(Self::State, Vec<StepEvent>)> {
        if r.card == 0 || r.card > self.n {
            return Err(Error::InfeasibleRecord(format!("card {}", r.card)));
        }
        let from = self.site_of(s, r.card);
        let next = match self.dest(from, r.mv)? {
            None => {
                if r.slot.is_some() {
                    return Err(Error::InfeasibleRecord(
                        "slot given for a non-moving step".into(),
                    ));
                }
                s.to_vec()
            }
            Some(d) => {
                let slot = r.slot.ok_or_else(|| {
                    Error::InfeasibleRecord("missing slot for an actual move".into())
                })?;
                let mut piles = s.to_vec();
                piles[from].retain(|&l| l != r.card);
                if slot > piles[d].len() {
                    return Err(Error::InfeasibleRecord(format!(
                        "slot {slot} exceeds pile size {}",
                        piles[d].len()
                    )));
                }
                piles[d].insert(slot, r.card);
                piles
            }
        };
        let events = co_located_pairs(&next)
            .into_iter()
            .map(|pair| StepEvent {
                phase: None,
                pair,
                kind: EventKind::SamePile,
            })
            .collect();
        Ok((next, events))
    }

    fn relabel_state(&self, s: &Self::State, g: &Permutation) -> Self::State {
        super::relabel_piles(s, g)
    }

    fn relabel_record(&self, r: &Self::Record, i: Label, j: Label) -> Self::Record {
        let card = if r.card == i {
            j
        } else if r.card == j {
            i
        } else {
            r.card
        };
        WashRecord { card, ..r.clone() }
    }
}

pub(crate) fn unrank(rank: usize, side: usize, dim: usize) -> Vec<usize> {
    let mut coords = vec![0; dim];
    let mut r = rank;
    for axis in (0..dim).rev() {
        coords[axis] = r % side;
        r /= side;
    }
    coords
}

pub(crate) fn rank_of(coords: &[usize], side: usize) -> usize {
    coords.iter().fold(0, |acc, &c| acc * side + c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::to_f64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn canonical_start_line_and_grid() {
        let k = WashKernel::line(3);
        assert_eq!(k.start(), vec![vec![1], vec![2], vec![3]]);

        let k = WashKernel::grid(3, 2);
        let s = k.start();
        assert_eq!(s.len(), 9);
        // Cards at the first three sites in lexicographic order:
        // (1,1), (1,2), (1,3).
        assert_eq!(s[0], vec![1]);
        assert_eq!(s[1], vec![2]);
        assert_eq!(s[2], vec![3]);
        assert!(s[3..].iter().all(|p| p.is_empty()));
    }

    #[test]
    fn spec_example_step_probability() {
        // From the canonical start at n=3: card 2 moves left onto the pile
        // holding card 1, inserted at the top. Probability (1/3)(1/4)(1/2).
        let k = WashKernel::line(3);
        let s = k.start();
        let r = WashRecord {
            card: 2,
            mv: WashMove::Left,
            slot: Some(0),
        };
        let (next, events) = k.apply(&s, &r).unwrap();
        assert_eq!(next, vec![vec![2, 1], vec![], vec![3]]);
        assert_eq!(k.record_probability(&s, &r).unwrap(), ratio(1, 24));
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].pair, crate::perm::Transposition::new(1, 2).unwrap());
        assert_eq!(events[0].kind, EventKind::SamePile);
    }

    #[test]
    fn blocked_boundary_move_consumes_the_step() {
        let k = WashKernel::line(3);
        let s = k.start();
        let r = WashRecord {
            card: 1,
            mv: WashMove::Left,
            slot: None,
        };
        let (next, events) = k.apply(&s, &r).unwrap();
        assert_eq!(next, s);
        assert!(events.is_empty());
        assert_eq!(k.record_probability(&s, &r).unwrap(), ratio(1, 12));
    }

    #[test]
    fn transitions_sum_to_one() {
        for k in [WashKernel::line(2), WashKernel::line(4), WashKernel::grid(3, 2)] {
            let s = k.start();
            let total: Exact = k.transitions(&s).into_iter().map(|(_, p)| p).sum();
            assert_eq!(total, one());
            // Also from a state with a stacked pile.
            let mut piled = s.clone();
            let card = piled[1].pop().unwrap();
            piled[0].push(card);
            let total: Exact = k.transitions(&piled).into_iter().map(|(_, p)| p).sum();
            assert_eq!(total, one());
        }
    }

    #[test]
    fn sample_matches_replay_and_conserves_labels() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for k in [WashKernel::line(5), WashKernel::grid(3, 2)] {
            let mut s = k.start();
            for _ in 0..2000 {
                let r = k.sample(&s, &mut rng);
                let (next, _) = k.apply(&s, &r).unwrap();
                let mut labels: Vec<Label> = next.iter().flatten().copied().collect();
                labels.sort_unstable();
                assert_eq!(labels, (1..=k.n).collect::<Vec<_>>());
                s = next;
            }
        }
    }

    #[test]
    fn grid_degree_probabilities() {
        // Card 1 sits at corner (1,1) of the 3×3 grid: degree 2, so each
        // neighbour move carries (1/3)·(1/4) and staying carries (1/3)·(1/2).
        let k = WashKernel::grid(3, 2);
        let s = k.start();
        let trans = k.transitions(&s);
        let mut to_12 = crate::exact::zero(); // neighbour (1,2) = rank 1, occupied by card 2
        let mut to_21 = crate::exact::zero(); // neighbour (2,1) = rank 3, empty
        for (r, p) in &trans {
            if r.card != 1 {
                continue;
            }
            match r.mv {
                WashMove::To(1) => to_12 += p.clone(),
                WashMove::To(3) => to_21 += p.clone(),
                WashMove::To(d) => panic!("unexpected destination {d}"),
                WashMove::Stay => assert_eq!(*p, ratio(1, 6)),
                _ => panic!("line moves on a grid"),
            }
        }
        assert_eq!(to_12, ratio(1, 12));
        assert_eq!(to_21, ratio(1, 12));
        assert!(to_f64(&to_12) > 0.0);
    }
}
