//! Permutations of `{1..n}`, composition, cycle structure, and the
//! all-transpositions (Cayley) length function.
//!
//! Conventions, fixed here once and relied on by every other module:
//!
//! * A [`Permutation`] stores `map` with `map[p-1]` = label of the card at
//!   position `p`. Positions and labels are both 1-based.
//! * [`Permutation::compose`]`(a, b)` means "apply `b` first, then `a`",
//!   i.e. `(a∘b)(x) = a(b(x))`.
//! * The S_n action on card labels is *left* composition: acting by `g`
//!   sends `map[p]` to `g(map[p])`, i.e. `g.compose(&pi)`.
//!
//! The composition convention is pinned by an exhaustive S_3
//! multiplication-table test below; other modules state their side of
//! multiplication relative to it instead of re-deriving it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Card label (1-based).
pub type Label = usize;

/// A permutation of `{1..n}`, stored as the label found at each position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Permutation {
    map: Vec<Label>,
}

impl Permutation {
    /// Identity permutation on `{1..n}`.
    pub fn identity(n: usize) -> Self {
        Permutation {
            map: (1..=n).collect(),
        }
    }

    /// Build from a 1-based map; validates that it is a bijection.
    pub fn from_map(map: Vec<Label>) -> Result<Self> {
        let n = map.len();
        if n == 0 {
            return Err(Error::Validation("deck size must be at least 1".into()));
        }
        let mut seen = vec![false; n];
        for &l in &map {
            if l == 0 || l > n || seen[l - 1] {
                return Err(Error::Validation(format!(
                    "not a bijection on 1..={n}: {map:?}"
                )));
            }
            seen[l - 1] = true;
        }
        Ok(Permutation { map })
    }

    pub fn n(&self) -> usize {
        self.map.len()
    }

    /// Image of `x` under the permutation viewed as a function.
    pub fn apply(&self, x: Label) -> Label {
        self.map[x - 1]
    }

    pub fn as_slice(&self) -> &[Label] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &l)| l == i + 1)
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.n() != other.n() {
            return Err(Error::SizeMismatch(self.n(), other.n()));
        }
        let map = other.map.iter().map(|&x| self.map[x - 1]).collect();
        Ok(Permutation { map })
    }

    pub fn invert(&self) -> Permutation {
        let mut map = vec![0; self.n()];
        for (i, &l) in self.map.iter().enumerate() {
            map[l - 1] = i + 1;
        }
        Permutation { map }
    }

    /// The transposition `(i j)` as a group element of S_n.
    pub fn transposition(n: usize, i: Label, j: Label) -> Permutation {
        let mut p = Permutation::identity(n);
        p.map.swap(i - 1, j - 1);
        p
    }

    /// Label action of `(i j)`: every occurrence of label `i` becomes `j`
    /// and vice versa. Equals `transposition(n,i,j).compose(self)`.
    pub fn swap_labels(&self, i: Label, j: Label) -> Permutation {
        let map = self
            .map
            .iter()
            .map(|&l| {
                if l == i {
                    j
                } else if l == j {
                    i
                } else {
                    l
                }
            })
            .collect();
        Permutation { map }
    }

    /// Label action of `g`: `g ∘ self`.
    pub fn relabel_by(&self, g: &Permutation) -> Result<Permutation> {
        g.compose(self)
    }

    /// Canonical cycle decomposition.
    pub fn cycles(&self) -> CycleDecomposition {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 1..=n {
            if seen[start - 1] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start - 1] = true;
            let mut x = self.apply(start);
            while x != start {
                seen[x - 1] = true;
                cycle.push(x);
                x = self.apply(x);
            }
            cycles.push(cycle);
        }
        // Starting each walk at the smallest unseen label already yields
        // min-first cycles sorted by their minimum.
        CycleDecomposition { n, cycles }
    }

    /// Cayley distance from the identity over the all-transpositions
    /// generating set: `n` minus the number of cycles (fixed points count).
    pub fn cayley_length(&self) -> usize {
        self.n() - self.cycles().cycles.len()
    }

    /// Whether `i` and `j` lie in the same cycle. Equivalent to: multiplying
    /// by `(i j)` on either side decreases the Cayley length by one.
    pub fn same_cycle(&self, i: Label, j: Label) -> bool {
        let mut x = self.apply(i);
        while x != i {
            if x == j {
                return true;
            }
            x = self.apply(x);
        }
        false
    }

    /// All n! permutations of `{1..n}`, in lexicographic order of `map`.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut current: Vec<Label> = (1..=n).collect();
        loop {
            out.push(Permutation {
                map: current.clone(),
            });
            if !next_lex(&mut current) {
                break;
            }
        }
        out
    }
}

/// Advance to the next lexicographic arrangement; false once wrapped.
fn next_lex(v: &mut [Label]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, l) in self.map.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .trim_start_matches('[')
            .trim_end_matches(']')
            .trim();
        if inner.is_empty() {
            return Err(Error::Validation(format!("empty permutation: {s:?}")));
        }
        let map = inner
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Validation(format!("bad label {tok:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::from_map(map)
    }
}

/// An unordered pair of labels, normalized so `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Transposition {
    pub i: Label,
    pub j: Label,
}

impl Transposition {
    pub fn new(a: Label, b: Label) -> Result<Self> {
        if a == b || a == 0 || b == 0 {
            return Err(Error::Validation(format!(
                "transposition needs two distinct positive labels, got ({a} {b})"
            )));
        }
        Ok(Transposition {
            i: a.min(b),
            j: a.max(b),
        })
    }

    pub fn as_permutation(&self, n: usize) -> Permutation {
        Permutation::transposition(n, self.i, self.j)
    }

    /// Both labels swapped under an `(a b)` relabeling.
    pub fn swap_labels(&self, a: Label, b: Label) -> Transposition {
        let m = |x: Label| {
            if x == a {
                b
            } else if x == b {
                a
            } else {
                x
            }
        };
        Transposition::new(m(self.i), m(self.j)).expect("relabeling preserves distinctness")
    }

    /// All `C(n,2)` transpositions in lexicographic order.
    pub fn all(n: usize) -> Vec<Transposition> {
        let mut out = Vec::new();
        for i in 1..=n {
            for j in (i + 1)..=n {
                out.push(Transposition { i, j });
            }
        }
        out
    }
}

impl fmt::Display for Transposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {})", self.i, self.j)
    }
}

/// Disjoint cycles covering `{1..n}`, each rotated to start at its minimum
/// label, sorted by minimum label. Unique per permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleDecomposition {
    n: usize,
    cycles: Vec<Vec<Label>>,
}

impl CycleDecomposition {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cycles(&self) -> &[Vec<Label>] {
        &self.cycles
    }

    pub fn count(&self) -> usize {
        self.cycles.len()
    }

    /// Rebuild the permutation; inverse of [`Permutation::cycles`].
    pub fn reconstruct(&self) -> Permutation {
        let mut map: Vec<Label> = (1..=self.n).collect();
        for cycle in &self.cycles {
            for (k, &x) in cycle.iter().enumerate() {
                let image = cycle[(k + 1) % cycle.len()];
                map[x - 1] = image;
            }
        }
        Permutation { map }
    }
}

impl fmt::Display for CycleDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for cycle in &self.cycles {
            write!(f, "(")?;
            for (k, x) in cycle.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{HashMap, VecDeque};

    fn perm(map: &[Label]) -> Permutation {
        Permutation::from_map(map.to_vec()).unwrap()
    }

    /// Brute-force S_3 multiplication table, built from first principles:
    /// elements are arrays, products are computed by evaluating
    /// "apply right factor, then left factor" pointwise.
    fn s3_table() -> HashMap<(Vec<Label>, Vec<Label>), Vec<Label>> {
        let elems = Permutation::all(3);
        let mut table = HashMap::new();
        for a in &elems {
            for b in &elems {
                let prod: Vec<Label> = (1..=3).map(|x| a.apply(b.apply(x))).collect();
                table.insert((a.as_slice().to_vec(), b.as_slice().to_vec()), prod);
            }
        }
        table
    }

    #[test]
    fn compose_matches_s3_table() {
        let table = s3_table();
        let elems = Permutation::all(3);
        for a in &elems {
            for b in &elems {
                let got = a.compose(b).unwrap();
                let want = &table[&(a.as_slice().to_vec(), b.as_slice().to_vec())];
                assert_eq!(got.as_slice(), &want[..], "{a} * {b}");
            }
        }
    }

    #[test]
    fn compose_fixed_convention_examples() {
        // (1 2) ∘ (2 3): apply (2 3) first. 1→1→2, 2→3→3, 3→2→1.
        let t12 = Permutation::transposition(3, 1, 2);
        let t23 = Permutation::transposition(3, 2, 3);
        let got = t12.compose(&t23).unwrap();
        assert_eq!(got.as_slice(), &[2, 3, 1]);
        // The other order gives the other 3-cycle.
        let got = t23.compose(&t12).unwrap();
        assert_eq!(got.as_slice(), &[3, 1, 2]);
    }

    #[test]
    fn identity_and_inverse_laws() {
        for n in 1..=5 {
            let id = Permutation::identity(n);
            for p in Permutation::all(n) {
                assert_eq!(id.compose(&p).unwrap(), p);
                assert_eq!(p.compose(&id).unwrap(), p);
                assert_eq!(p.compose(&p.invert()).unwrap(), id);
                assert_eq!(p.invert().compose(&p).unwrap(), id);
            }
        }
    }

    #[test]
    fn invert_examples() {
        assert_eq!(Permutation::identity(4).invert(), Permutation::identity(4));
        let t = Permutation::transposition(4, 1, 2);
        assert_eq!(t.invert(), t);
        // (1 2 3) as a function: 1→2, 2→3, 3→1, so map = [2,3,1].
        let c = perm(&[2, 3, 1]);
        assert_eq!(c.invert(), perm(&[3, 1, 2]));
        assert_eq!(c.compose(&c.invert()).unwrap(), Permutation::identity(3));
    }

    #[test]
    fn size_mismatch_is_an_error() {
        let a = Permutation::identity(3);
        let b = Permutation::identity(4);
        assert!(matches!(a.compose(&b), Err(Error::SizeMismatch(3, 4))));
    }

    #[test]
    fn cycle_decomposition_examples() {
        let id3 = Permutation::identity(3);
        assert_eq!(id3.cycles().cycles(), &[vec![1], vec![2], vec![3]]);

        // 4-cycle (1 2 3 4): map = [2,3,4,1].
        let c4 = perm(&[2, 3, 4, 1]);
        assert_eq!(c4.cycles().cycles(), &[vec![1, 2, 3, 4]]);
        assert_eq!(c4.cayley_length(), 3);

        // (1 2)(3 4): map = [2,1,4,3].
        let dd = perm(&[2, 1, 4, 3]);
        assert_eq!(dd.cycles().cycles(), &[vec![1, 2], vec![3, 4]]);
        assert_eq!(dd.cayley_length(), 2);
        assert_eq!(Permutation::identity(4).cayley_length(), 0);
    }

    #[test]
    fn cycles_reconstruct_round_trip() {
        for n in 1..=5 {
            for p in Permutation::all(n) {
                assert_eq!(p.cycles().reconstruct(), p);
            }
        }
    }

    #[test]
    fn cycle_display_canonical_text() {
        let p = perm(&[2, 1, 3]);
        assert_eq!(p.cycles().to_string(), "(1 2)(3)");
    }

    /// BFS distance in the Cayley graph generated by all transpositions.
    fn bfs_distances(n: usize) -> HashMap<Vec<Label>, usize> {
        let id = Permutation::identity(n);
        let gens: Vec<Permutation> = Transposition::all(n)
            .iter()
            .map(|t| t.as_permutation(n))
            .collect();
        let mut dist = HashMap::new();
        dist.insert(id.as_slice().to_vec(), 0usize);
        let mut queue = VecDeque::new();
        queue.push_back(id);
        while let Some(p) = queue.pop_front() {
            let d = dist[p.as_slice()];
            for g in &gens {
                let q = g.compose(&p).unwrap();
                if !dist.contains_key(q.as_slice()) {
                    dist.insert(q.as_slice().to_vec(), d + 1);
                    queue.push_back(q);
                }
            }
        }
        dist
    }

    #[test]
    fn cayley_length_equals_bfs_distance_small() {
        // n ≤ 4 here; the n ≤ 6 run lives in the acceptance suite.
        for n in 1..=4 {
            let dist = bfs_distances(n);
            for p in Permutation::all(n) {
                assert_eq!(p.cayley_length(), dist[p.as_slice()], "{p}");
            }
        }
    }

    #[test]
    fn length_change_is_plus_minus_one_and_matches_same_cycle() {
        for n in 2..=5 {
            for p in Permutation::all(n) {
                for t in Transposition::all(n) {
                    let tp = t.as_permutation(n);
                    let left = tp.compose(&p).unwrap();
                    let right = p.compose(&tp).unwrap();
                    let l0 = p.cayley_length() as i64;
                    let dl = left.cayley_length() as i64 - l0;
                    let dr = right.cayley_length() as i64 - l0;
                    assert!(dl.abs() == 1 && dr.abs() == 1);
                    // Left and right multiplication change length by the same sign.
                    assert_eq!(dl, dr);
                    let decreases = p.same_cycle(t.i, t.j);
                    assert_eq!(decreases, dl == -1);
                }
            }
        }
    }

    #[test]
    fn same_cycle_examples() {
        // (1 2 3): all pairs share the single 3-cycle.
        let c = perm(&[2, 3, 1]);
        assert!(c.same_cycle(1, 2));
        // identity: all singletons.
        assert!(!Permutation::identity(3).same_cycle(1, 3));
        // (1 2) on n=3: multiplying by (1 3) grows the length.
        let t = perm(&[2, 1, 3]);
        assert!(!t.same_cycle(1, 3));
        let grown = Permutation::transposition(3, 1, 3).compose(&t).unwrap();
        assert_eq!(grown.cayley_length(), t.cayley_length() + 1);
    }

    #[test]
    fn parse_and_display_round_trip() {
        let p: Permutation = "[2,1,3]".parse().unwrap();
        assert_eq!(p, perm(&[2, 1, 3]));
        assert_eq!(p.to_string(), "[2,1,3]");
        assert!(" [ 3, 1 , 2 ] ".parse::<Permutation>().is_ok());
        assert!("[2,2,3]".parse::<Permutation>().is_err());
        assert!("[]".parse::<Permutation>().is_err());
    }

    #[test]
    fn swap_labels_is_left_multiplication() {
        for p in Permutation::all(4) {
            for t in Transposition::all(4) {
                let via_compose = t.as_permutation(4).compose(&p).unwrap();
                assert_eq!(p.swap_labels(t.i, t.j), via_compose);
            }
        }
    }
}
