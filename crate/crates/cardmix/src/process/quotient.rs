//! Position quotients of the wash families.
//!
//! The quotient state records only which site each card occupies; the
//! orders within piles are deferred to an explicit *collection* record
//! drawn uniformly per pile at the end of a run. This is the state space
//! on which the interaction definition acts faithfully: a state with two
//! cards co-located really is fixed by swapping their labels, so suffix
//! relabeling preserves path probability exactly.
//!
//! The quotient and the ordered kernels have identical deck laws from the
//! canonical start (uniform-slot insertion keeps every pile's internal
//! order uniform given the position history); the mixing module checks
//! that equality exactly rather than assuming it.

use super::wash::WashMove;
use super::{DeckKernel, EventKernel, EventKind, Kernel, Phase, StepEvent};
use crate::error::{Error, Result};
use crate::exact::{inv_factorial, one, ratio, Exact};
use crate::perm::{Label, Permutation, Transposition};

/// Site occupied by each card, indexed by label-1.
pub type Positions = Vec<usize>;

/// Pile orders (top first) for each occupied site, in site order.
pub type PileOrders = Vec<Vec<Label>>;

// ---------------------------------------------------------------------------
// One-card-per-step wash quotient (line and grid)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuotMove {
    pub card: Label,
    pub mv: WashMove,
}

#[derive(Debug, Clone)]
pub struct QuotWash {
    pub n: usize,
    pub topo: super::wash::Topology,
}

impl QuotWash {
    pub fn line(n: usize) -> Self {
        QuotWash {
            n,
            topo: super::wash::Topology::Line { sites: n },
        }
    }

    pub fn grid(n: usize, dim: usize) -> Self {
        QuotWash {
            n,
            topo: super::wash::WashKernel::grid(n, dim).topo,
        }
    }

    fn dest(&self, from: usize, mv: WashMove) -> Result<Option<usize>> {
        match (&self.topo, mv) {
            (super::wash::Topology::Line { .. }, WashMove::Stay) => Ok(None),
            (super::wash::Topology::Line { .. }, WashMove::Left) => {
                Ok(if from == 0 { None } else { Some(from - 1) })
            }
            (super::wash::Topology::Line { sites }, WashMove::Right) => {
                Ok(if from + 1 == *sites { None } else { Some(from + 1) })
            }
            (super::wash::Topology::Grid { .. }, WashMove::Stay) => Ok(None),
            (super::wash::Topology::Grid { neighbors, .. }, WashMove::To(d)) => {
                if neighbors[from].contains(&d) {
                    Ok(Some(d))
                } else {
                    Err(Error::InfeasibleRecord(format!(
                        "site {d} is not a neighbour of {from}"
                    )))
                }
            }
            _ => Err(Error::InfeasibleRecord("move/topology mismatch".into())),
        }
    }
}

impl Kernel for QuotWash {
    type State = Positions;
    type Record = QuotMove;

    fn n(&self) -> usize {
        self.n
    }

    fn start(&self) -> Positions {
        (0..self.n).collect()
    }

    fn transitions(&self, s: &Positions) -> Vec<(QuotMove, Exact)> {
        let per_card = ratio(1, self.n as i64);
        let mut out = Vec::new();
        for card in 1..=self.n {
            let from = s[card - 1];
            match &self.topo {
                super::wash::Topology::Line { .. } => {
                    out.push((
                        QuotMove {
                            card,
                            mv: WashMove::Stay,
                        },
                        per_card.clone() * ratio(1, 2),
                    ));
                    for mv in [WashMove::Left, WashMove::Right] {
                        out.push((QuotMove { card, mv }, per_card.clone() * ratio(1, 4)));
                    }
                }
                super::wash::Topology::Grid { neighbors, .. } => {
                    out.push((
                        QuotMove {
                            card,
                            mv: WashMove::Stay,
                        },
                        per_card.clone() * ratio(1, 2),
                    ));
                    let deg = neighbors[from].len() as i64;
                    for &d in &neighbors[from] {
                        out.push((
                            QuotMove {
                                card,
                                mv: WashMove::To(d),
                            },
                            per_card.clone() * ratio(1, 2 * deg),
                        ));
                    }
                }
            }
        }
        out
    }

    fn apply(&self, s: &Positions, r: &QuotMove) -> Result<(Positions, Vec<StepEvent>)> {
        if r.card == 0 || r.card > self.n {
            return Err(Error::InfeasibleRecord(format!("card {}", r.card)));
        }
        let from = s[r.card - 1];
        let mut next = s.clone();
        if let Some(d) = self.dest(from, r.mv)? {
            next[r.card - 1] = d;
        }
        Ok((next.clone(), same_site_events(&next)))
    }

    fn relabel_state(&self, s: &Positions, g: &Permutation) -> Positions {
        relabel_positions(s, g)
    }

    fn relabel_record(&self, r: &QuotMove, i: Label, j: Label) -> QuotMove {
        QuotMove {
            card: swap_label(r.card, i, j),
            mv: r.mv,
        }
    }

    fn record_probability(&self, s: &Positions, r: &QuotMove) -> Result<Exact> {
        if r.card == 0 || r.card > self.n {
            return Err(Error::InfeasibleRecord(format!("card {}", r.card)));
        }
        let from = s[r.card - 1];
        let per_card = ratio(1, self.n as i64);
        match (&self.topo, r.mv) {
            (_, WashMove::Stay) => Ok(per_card * ratio(1, 2)),
            (super::wash::Topology::Line { .. }, WashMove::Left | WashMove::Right) => {
                Ok(per_card * ratio(1, 4))
            }
            (super::wash::Topology::Grid { neighbors, .. }, WashMove::To(d)) => {
                if !neighbors[from].contains(&d) {
                    return Err(Error::InfeasibleRecord(format!(
                        "site {d} is not a neighbour of {from}"
                    )));
                }
                Ok(per_card * ratio(1, 2 * neighbors[from].len() as i64))
            }
            _ => Err(Error::InfeasibleRecord("move/topology mismatch".into())),
        }
    }
}

impl EventKernel for QuotWash {
    fn twin(
        &self,
        _s: &Positions,
        r: &QuotMove,
        _pair: Transposition,
        phase: Option<Phase>,
    ) -> Result<QuotMove> {
        // Co-location is a first-clause interaction: the post-state itself
        // is fixed by the pair's label action, so the record is its own twin.
        if phase.is_some() {
            return Err(Error::InternalContract(
                "the one-card wash has no half-step events".into(),
            ));
        }
        Ok(r.clone())
    }
}

impl DeckKernel for QuotWash {
    type Collect = PileOrders;

    fn collect_transitions(&self, s: &Positions) -> Vec<(PileOrders, Exact)> {
        enumerate_collections(self.topo.sites(), s)
    }

    fn assemble(&self, s: &Positions, c: &PileOrders) -> Permutation {
        assemble_deck(self.n, s, c)
    }

    fn relabel_collect(&self, c: &PileOrders, i: Label, j: Label) -> PileOrders {
        relabel_orders(c, i, j)
    }
}

// ---------------------------------------------------------------------------
// Long-range wash quotient
// ---------------------------------------------------------------------------

/// Effective per-card displacements for the two sweeps of one step.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuotSweeps {
    pub right: Vec<usize>,
    pub left: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct QuotWashLong {
    pub n: usize,
    pub p: Exact,
}

impl QuotWashLong {
    pub fn new(n: usize, p: Exact) -> Self {
        QuotWashLong { n, p }
    }

    fn disp_prob(&self, d: usize, wall: usize) -> Result<Exact> {
        let q = one() - self.p.clone();
        if d < wall {
            let mut acc = self.p.clone();
            for _ in 0..d {
                acc *= q.clone();
            }
            Ok(acc)
        } else if d == wall {
            let mut acc = one();
            for _ in 0..wall {
                acc *= q.clone();
            }
            Ok(acc)
        } else {
            Err(Error::InfeasibleRecord(format!(
                "displacement {d} beyond wall {wall}"
            )))
        }
    }

    fn sweep_positions(&self, pos: &[usize], disp: &[usize], right: bool) -> Result<Positions> {
        let mut out = vec![0; self.n];
        for c in 0..self.n {
            let wall = if right { self.n - 1 - pos[c] } else { pos[c] };
            if disp[c] > wall {
                return Err(Error::InfeasibleRecord(format!(
                    "card {} displacement {} beyond wall {wall}",
                    c + 1,
                    disp[c]
                )));
            }
            out[c] = if right { pos[c] + disp[c] } else { pos[c] - disp[c] };
        }
        Ok(out)
    }

    fn sweep_prob(&self, pos: &[usize], disp: &[usize], right: bool) -> Result<Exact> {
        let mut prob = one();
        for c in 0..self.n {
            let wall = if right { self.n - 1 - pos[c] } else { pos[c] };
            prob *= self.disp_prob(disp[c], wall)?;
        }
        Ok(prob)
    }

    fn enumerate_disps(&self, pos: &[usize], right: bool) -> Vec<Vec<usize>> {
        let mut combos: Vec<Vec<usize>> = vec![Vec::new()];
        for c in 0..self.n {
            let wall = if right { self.n - 1 - pos[c] } else { pos[c] };
            let mut next = Vec::new();
            for combo in &combos {
                for d in 0..=wall {
                    let mut ext = combo.clone();
                    ext.push(d);
                    next.push(ext);
                }
            }
            combos = next;
        }
        combos
    }
}

impl Kernel for QuotWashLong {
    type State = Positions;
    type Record = QuotSweeps;

    fn n(&self) -> usize {
        self.n
    }

    fn start(&self) -> Positions {
        (0..self.n).collect()
    }

    fn transitions(&self, s: &Positions) -> Vec<(QuotSweeps, Exact)> {
        let mut out = Vec::new();
        for right in self.enumerate_disps(s, true) {
            let mid = self.sweep_positions(s, &right, true).expect("in range");
            let pr = self.sweep_prob(s, &right, true).expect("in range");
            for left in self.enumerate_disps(&mid, false) {
                let pl = self.sweep_prob(&mid, &left, false).expect("in range");
                out.push((
                    QuotSweeps {
                        right: right.clone(),
                        left,
                    },
                    pr.clone() * pl,
                ));
            }
        }
        out
    }

    fn apply(&self, s: &Positions, r: &QuotSweeps) -> Result<(Positions, Vec<StepEvent>)> {
        let mid = self.sweep_positions(s, &r.right, true)?;
        let fin = self.sweep_positions(&mid, &r.left, false)?;
        let mut events = Vec::new();
        push_overtake_events(&mut events, s, &mid, Phase::RightSweep);
        push_overtake_events(&mut events, &mid, &fin, Phase::LeftSweep);
        events.extend(same_site_events(&fin));
        Ok((fin, events))
    }

    fn relabel_state(&self, s: &Positions, g: &Permutation) -> Positions {
        relabel_positions(s, g)
    }

    fn relabel_record(&self, r: &QuotSweeps, i: Label, j: Label) -> QuotSweeps {
        let mut right = r.right.clone();
        let mut left = r.left.clone();
        right.swap(i - 1, j - 1);
        left.swap(i - 1, j - 1);
        QuotSweeps { right, left }
    }

    fn record_probability(&self, s: &Positions, r: &QuotSweeps) -> Result<Exact> {
        let pr = self.sweep_prob(s, &r.right, true)?;
        let mid = self.sweep_positions(s, &r.right, true)?;
        let pl = self.sweep_prob(&mid, &r.left, false)?;
        Ok(pr * pl)
    }
}

impl EventKernel for QuotWashLong {
    fn twin(
        &self,
        s: &Positions,
        r: &QuotSweeps,
        pair: Transposition,
        phase: Option<Phase>,
    ) -> Result<QuotSweeps> {
        let (i, j) = (pair.i, pair.j);
        let mid = self.sweep_positions(s, &r.right, true)?;
        match phase {
            None => Ok(r.clone()),
            Some(Phase::RightSweep) => {
                // Exchange the two cards' landing sites of the right sweep;
                // their left-sweep displacements follow them.
                let mut right = r.right.clone();
                let li = mid[j - 1] as i64 - s[i - 1] as i64;
                let lj = mid[i - 1] as i64 - s[j - 1] as i64;
                if li < 0 || lj < 0 {
                    return Err(Error::InternalContract(format!(
                        "overtake twin for {pair} has negative displacement"
                    )));
                }
                right[i - 1] = li as usize;
                right[j - 1] = lj as usize;
                let mut left = r.left.clone();
                left.swap(i - 1, j - 1);
                Ok(QuotSweeps { right, left })
            }
            Some(Phase::LeftSweep) => {
                let fin = self.sweep_positions(&mid, &r.left, false)?;
                let mut left = r.left.clone();
                let li = mid[i - 1] as i64 - fin[j - 1] as i64;
                let lj = mid[j - 1] as i64 - fin[i - 1] as i64;
                if li < 0 || lj < 0 {
                    return Err(Error::InternalContract(format!(
                        "overtake twin for {pair} has negative displacement"
                    )));
                }
                left[i - 1] = li as usize;
                left[j - 1] = lj as usize;
                Ok(QuotSweeps {
                    right: r.right.clone(),
                    left,
                })
            }
        }
    }
}

impl DeckKernel for QuotWashLong {
    type Collect = PileOrders;

    fn collect_transitions(&self, s: &Positions) -> Vec<(PileOrders, Exact)> {
        enumerate_collections(self.n, s)
    }

    fn assemble(&self, s: &Positions, c: &PileOrders) -> Permutation {
        assemble_deck(self.n, s, c)
    }

    fn relabel_collect(&self, c: &PileOrders, i: Label, j: Label) -> PileOrders {
        relabel_orders(c, i, j)
    }
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

fn swap_label(l: Label, i: Label, j: Label) -> Label {
    if l == i {
        j
    } else if l == j {
        i
    } else {
        l
    }
}

pub(crate) fn relabel_positions(s: &Positions, g: &Permutation) -> Positions {
    // Card g(l) takes over card l's site.
    let mut out = vec![0; s.len()];
    for l in 1..=s.len() {
        out[g.apply(l) - 1] = s[l - 1];
    }
    out
}

/// All co-located pairs of a position vector, as same-pile events.
pub(crate) fn same_site_events(pos: &Positions) -> Vec<StepEvent> {
    let n = pos.len();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if pos[i] == pos[j] {
                pairs.push(Transposition::new(i + 1, j + 1).expect("distinct"));
            }
        }
    }
    pairs.sort();
    pairs
        .into_iter()
        .map(|pair| StepEvent {
            phase: None,
            pair,
            kind: EventKind::SamePile,
        })
        .collect()
}

fn push_overtake_events(events: &mut Vec<StepEvent>, pre: &[usize], post: &[usize], phase: Phase) {
    let n = pre.len();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if pre[i] == pre[j] {
                continue;
            }
            let (a, b) = if pre[i] < pre[j] { (i, j) } else { (j, i) };
            if post[a] >= post[b] {
                pairs.push(Transposition::new(i + 1, j + 1).expect("distinct"));
            }
        }
    }
    pairs.sort();
    events.extend(pairs.into_iter().map(|pair| StepEvent {
        phase: Some(phase),
        pair,
        kind: EventKind::Overtake,
    }));
}

/// Piles of a position vector as sorted card lists per site.
pub(crate) fn piles_of(sites: usize, pos: &Positions) -> Vec<Vec<Label>> {
    let mut piles = vec![Vec::new(); sites];
    for (c, &q) in pos.iter().enumerate() {
        piles[q].push(c + 1);
    }
    piles
}

/// Every combination of per-pile orders with its probability `∏ 1/s!`.
fn enumerate_collections(sites: usize, pos: &Positions) -> Vec<(PileOrders, Exact)> {
    let piles = piles_of(sites, pos);
    let occupied: Vec<&Vec<Label>> = piles.iter().filter(|p| !p.is_empty()).collect();
    let mut out: Vec<(PileOrders, Exact)> = vec![(Vec::new(), one())];
    for pile in occupied {
        let orders = orderings(pile);
        let w = inv_factorial(pile.len());
        let mut next = Vec::with_capacity(out.len() * orders.len());
        for (partial, prob) in &out {
            for ord in &orders {
                let mut ext = partial.clone();
                ext.push(ord.clone());
                next.push((ext, prob.clone() * w.clone()));
            }
        }
        out = next;
    }
    out
}

fn orderings(items: &[Label]) -> Vec<Vec<Label>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (k, &x) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(k);
        for mut tail in orderings(&rest) {
            tail.insert(0, x);
            out.push(tail);
        }
    }
    out
}

fn assemble_deck(n: usize, pos: &Positions, orders: &PileOrders) -> Permutation {
    let sites = pos.iter().copied().max().unwrap_or(0) + 1;
    let piles = piles_of(sites, pos);
    let mut map = Vec::with_capacity(n);
    let mut oi = 0usize;
    for pile in piles.iter().filter(|p| !p.is_empty()) {
        let order = &orders[oi];
        debug_assert_eq!(
            {
                let mut a = order.clone();
                a.sort_unstable();
                a
            },
            *pile,
            "collection orders must match the pile contents"
        );
        map.extend_from_slice(order);
        oi += 1;
    }
    debug_assert_eq!(oi, orders.len());
    Permutation::from_map(map).expect("orders partition the labels")
}

fn relabel_orders(orders: &PileOrders, i: Label, j: Label) -> PileOrders {
    orders
        .iter()
        .map(|ord| ord.iter().map(|&l| swap_label(l, i, j)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quotient_transitions_sum_to_one() {
        for k in [QuotWash::line(3), QuotWash::grid(3, 2)] {
            let s = k.start();
            let total: Exact = k.transitions(&s).into_iter().map(|(_, p)| p).sum();
            assert_eq!(total, one());
        }
        let k = QuotWashLong::new(3, ratio(1, 2));
        let s = k.start();
        let total: Exact = k.transitions(&s).into_iter().map(|(_, p)| p).sum();
        assert_eq!(total, one());
    }

    #[test]
    fn collection_law_is_uniform_per_pile() {
        let k = QuotWash::line(3);
        // Cards 1 and 2 share site 0; card 3 alone at site 2.
        let pos = vec![0, 0, 2];
        let cols = k.collect_transitions(&pos);
        assert_eq!(cols.len(), 2);
        let total: Exact = cols.iter().map(|(_, p)| p.clone()).sum();
        assert_eq!(total, one());
        let decks: Vec<Permutation> = cols.iter().map(|(c, _)| k.assemble(&pos, c)).collect();
        assert!(decks.contains(&Permutation::from_map(vec![1, 2, 3]).unwrap()));
        assert!(decks.contains(&Permutation::from_map(vec![2, 1, 3]).unwrap()));
    }

    #[test]
    fn co_located_state_is_fixed_by_the_pair_action() {
        let k = QuotWash::line(3);
        let pos = vec![1, 1, 2];
        let g = Permutation::transposition(3, 1, 2);
        assert_eq!(k.relabel_state(&pos, &g), pos);
        let g13 = Permutation::transposition(3, 1, 3);
        assert_ne!(k.relabel_state(&pos, &g13), pos);
    }

    #[test]
    fn long_wash_overtake_twin_swaps_landings() {
        let k = QuotWashLong::new(3, ratio(1, 2));
        let s = k.start(); // positions 0,1,2
        // Card 1 jumps to the wall (disp 2), card 2 stays: 1 overtakes 2.
        let r = QuotSweeps {
            right: vec![2, 0, 0],
            left: vec![0, 0, 0],
        };
        let (fin, events) = k.apply(&s, &r).unwrap();
        assert_eq!(fin, vec![2, 1, 2]);
        let ev = events
            .iter()
            .find(|e| e.kind == EventKind::Overtake && e.pair == Transposition::new(1, 2).unwrap())
            .unwrap();
        let twin = k.twin(&s, &r, ev.pair, ev.phase).unwrap();
        // Twin: card 1 lands where 2 did (site 1, disp 1), card 2 lands
        // where 1 did (site 2, disp 1).
        assert_eq!(twin.right, vec![1, 1, 0]);
        let (tfin, _) = k.apply(&s, &twin).unwrap();
        let g = Permutation::transposition(3, 1, 2);
        assert_eq!(tfin, k.relabel_state(&fin, &g));
        // Equal probability, and twinning twice returns the original.
        assert_eq!(
            k.record_probability(&s, &r).unwrap(),
            k.record_probability(&s, &twin).unwrap()
        );
        assert_eq!(k.twin(&s, &twin, ev.pair, ev.phase).unwrap(), r);
    }

    #[test]
    fn assemble_respects_site_order() {
        let k = QuotWash::line(4);
        let pos = vec![2, 0, 2, 1];
        let orders = vec![vec![2], vec![4], vec![3, 1]];
        let deck = k.assemble(&pos, &orders);
        assert_eq!(deck.as_slice(), &[2, 4, 3, 1]);
    }
}
