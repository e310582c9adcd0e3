//! Discrete Fréchet distance between polygonal chains.
//!
//! The distance is the minimum, over all paired walks, of the largest
//! vertex-to-vertex distance a walk incurs. [`dfd`] evaluates it with the
//! classic `O(kl)` table recurrence
//!
//! ```text
//! F(i, 1) = max_{i' <= i} d(a_i', b_1)
//! F(1, j) = max_{j' <= j} d(a_1, b_j')
//! F(i, j) = max(d(a_i, b_j), min(F(i-1, j-1), F(i, j-1), F(i-1, j)))
//! ```
//!
//! over squared distances, and backtracks through the table to recover an
//! optimal alignment. [`dfd_oracle`] is an exhaustive reference used by the
//! test suites; it never shares code with the table evaluation.
//!
//! Vertex indices in [`PairedWalk`] and [`FrechetResult::realizing_pair`] are
//! 1-based, matching the usual `a_1, …, a_k` notation.

use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::{euclid, Chain, Point};

/// Maximum `|A| * |B|` accepted by [`dfd_oracle`].
pub const ORACLE_PAIR_LIMIT: usize = 36;

/// A contiguous, 1-based, inclusive range of vertex indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IndexRange {
    pub lo: usize,
    pub hi: usize,
}

impl IndexRange {
    pub fn new(lo: usize, hi: usize) -> Self {
        IndexRange { lo, hi }
    }

    pub fn single(i: usize) -> Self {
        IndexRange { lo: i, hi: i }
    }

    pub fn len(&self) -> usize {
        (self.hi + 1).saturating_sub(self.lo)
    }

    pub fn is_empty(&self) -> bool {
        self.hi < self.lo
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> {
        self.lo..=self.hi
    }
}

impl fmt::Display for IndexRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

/// One step of a paired walk: a block of `A` matched against a block of `B`,
/// at least one of which is a single vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Step {
    pub a: IndexRange,
    pub b: IndexRange,
}

impl Step {
    pub fn new(a: IndexRange, b: IndexRange) -> Self {
        Step { a, b }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// A simultaneous partition of both chains into the same number of
/// consecutive blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PairedWalk {
    steps: Vec<Step>,
}

impl PairedWalk {
    /// Wraps steps without validation; use [`PairedWalk::validate`] before
    /// trusting a walk from outside the crate.
    pub fn new(steps: Vec<Step>) -> Self {
        PairedWalk { steps }
    }

    /// The walk that pairs `a_m` with `b_m` for every `m` in `1..=k`.
    pub fn lockstep(k: usize) -> Self {
        PairedWalk {
            steps: (1..=k)
                .map(|m| Step::new(IndexRange::single(m), IndexRange::single(m)))
                .collect(),
        }
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Checks that the walk covers `1..=k` and `1..=l` with contiguous,
    /// strictly increasing, non-empty blocks, and that every step has a
    /// singleton on at least one side.
    pub fn validate(&self, k: usize, l: usize) -> Result<()> {
        if self.steps.is_empty() {
            return Err(Error::InvalidWalk("walk has no steps".into()));
        }
        let (mut next_a, mut next_b) = (1, 1);
        for (n, step) in self.steps.iter().enumerate() {
            let n = n + 1;
            if step.a.is_empty() || step.b.is_empty() {
                return Err(Error::InvalidWalk(format!("step {n} has an empty block")));
            }
            if step.a.lo != next_a || step.b.lo != next_b {
                return Err(Error::InvalidWalk(format!(
                    "step {n} starts at ({}, {}), expected ({next_a}, {next_b})",
                    step.a.lo, step.b.lo
                )));
            }
            if step.a.len() != 1 && step.b.len() != 1 {
                return Err(Error::InvalidWalk(format!(
                    "step {n} pairs {} with {}; one side must be a single vertex",
                    step.a, step.b
                )));
            }
            next_a = step.a.hi + 1;
            next_b = step.b.hi + 1;
        }
        if next_a != k + 1 || next_b != l + 1 {
            return Err(Error::InvalidWalk(format!(
                "walk ends at ({}, {}), chains have lengths ({k}, {l})",
                next_a - 1,
                next_b - 1
            )));
        }
        Ok(())
    }

    /// All vertex pairs `(i, j)` the walk matches, step by step.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.steps
            .iter()
            .flat_map(|s| s.a.iter().flat_map(move |i| s.b.iter().map(move |j| (i, j))))
    }
}

impl fmt::Display for PairedWalk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, step) in self.steps.iter().enumerate() {
            if n > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{step}")?;
        }
        Ok(())
    }
}

/// Distance, an optimal alignment, and a vertex pair attaining the distance.
#[derive(Debug, Clone, PartialEq)]
pub struct FrechetResult {
    pub distance: f64,
    pub alignment: PairedWalk,
    /// 1-based `(i, j)` with `d(a_i, b_j) == distance`.
    pub realizing_pair: (usize, usize),
}

fn check_dims(a: &Chain, b: &Chain) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!(
            "chain {:?} is {} but chain {:?} is {}",
            a.id(),
            a.dim(),
            b.id(),
            b.dim()
        )));
    }
    Ok(())
}

/// Cost of a given paired walk: the largest distance over all matched pairs.
pub fn walk_cost(a: &Chain, b: &Chain, walk: &PairedWalk) -> Result<f64> {
    check_dims(a, b)?;
    walk.validate(a.len(), b.len())?;
    let (av, bv) = (a.vertices(), b.vertices());
    let worst = walk
        .pairs()
        .map(|(i, j)| av[i - 1].dist_sq_unchecked(&bv[j - 1]))
        .fold(0.0, f64::max);
    Ok(worst.sqrt())
}

/// Squared coupling table, row-major with `b` along rows.
fn coupling_table(a: &[Point], b: &[Point]) -> Vec<f64> {
    let (k, l) = (a.len(), b.len());
    let mut table = vec![0.0f64; k * l];
    for i in 0..k {
        for j in 0..l {
            let d = a[i].dist_sq_unchecked(&b[j]);
            let reach = match (i, j) {
                (0, 0) => 0.0,
                (0, _) => table[j - 1],
                (_, 0) => table[(i - 1) * l],
                _ => table[(i - 1) * l + j - 1]
                    .min(table[i * l + j - 1])
                    .min(table[(i - 1) * l + j]),
            };
            table[i * l + j] = d.max(reach);
        }
    }
    table
}

/// Squared distance with a single rolling row; used where no alignment is
/// needed.
pub(crate) fn dfd_sq(a: &[Point], b: &[Point]) -> f64 {
    let l = b.len();
    let mut prev = vec![0.0f64; l];
    let mut cur = vec![0.0f64; l];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            let d = ai.dist_sq_unchecked(bj);
            let reach = match (i, j) {
                (0, 0) => 0.0,
                (0, _) => cur[j - 1],
                (_, 0) => prev[0],
                _ => prev[j - 1].min(cur[j - 1]).min(prev[j]),
            };
            cur[j] = d.max(reach);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[l - 1]
}

/// Distance only. Same value as `dfd(a, b)?.distance`.
pub fn dfd_distance(a: &Chain, b: &Chain) -> Result<f64> {
    check_dims(a, b)?;
    Ok(dfd_sq(a.vertices(), b.vertices()).sqrt())
}

/// Discrete Fréchet distance with an optimal alignment.
///
/// Backtracking prefers, among equally good predecessors, the diagonal
/// move, then advancing `b` alone, then advancing `a` alone. The resulting
/// lattice path is turned into a paired walk by cutting every corner (a move
/// along one chain immediately followed by a move along the other) into a
/// diagonal move; this only drops matched pairs, so the cost stays optimal.
pub fn dfd(a: &Chain, b: &Chain) -> Result<FrechetResult> {
    check_dims(a, b)?;
    let (av, bv) = (a.vertices(), b.vertices());
    let (k, l) = (av.len(), bv.len());
    let table = coupling_table(av, bv);
    let at = |i: usize, j: usize| table[i * l + j];

    // Backtrack from the last cell to the first (0-based cells).
    let mut path = vec![(k - 1, l - 1)];
    let (mut i, mut j) = (k - 1, l - 1);
    while (i, j) != (0, 0) {
        (i, j) = if i == 0 {
            (0, j - 1)
        } else if j == 0 {
            (i - 1, 0)
        } else {
            let mut best = (i - 1, j - 1);
            for cand in [(i, j - 1), (i - 1, j)] {
                if at(cand.0, cand.1) < at(best.0, best.1) {
                    best = cand;
                }
            }
            best
        };
        path.push((i, j));
    }
    path.reverse();

    let alignment = walk_from_path(&cut_corners(&path));

    let mut worst = -1.0;
    let mut realizing_pair = (1, 1);
    for (i, j) in alignment.pairs() {
        let d = av[i - 1].dist_sq_unchecked(&bv[j - 1]);
        if d > worst || (d == worst && (i, j) < realizing_pair) {
            worst = d;
            realizing_pair = (i, j);
        }
    }
    debug_assert_eq!(worst, at(k - 1, l - 1));

    Ok(FrechetResult {
        distance: at(k - 1, l - 1).sqrt(),
        alignment,
        realizing_pair,
    })
}

fn cut_corners(path: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::with_capacity(path.len());
    for &cell in path {
        out.push(cell);
        let n = out.len();
        if n >= 3 {
            let (p, q, r) = (out[n - 3], out[n - 2], out[n - 1]);
            let first_a = q.0 != p.0 && q.1 == p.1;
            let first_b = q.0 == p.0 && q.1 != p.1;
            let second_a = r.0 != q.0 && r.1 == q.1;
            let second_b = r.0 == q.0 && r.1 != q.1;
            if (first_a && second_b) || (first_b && second_a) {
                out.remove(n - 2);
            }
        }
    }
    out
}

/// Groups a corner-free lattice path into paired-walk steps: cells joined by
/// a single-chain move share a step, diagonal moves start a new one.
fn walk_from_path(path: &[(usize, usize)]) -> PairedWalk {
    let mut steps = Vec::new();
    let mut start = path[0];
    let mut end = path[0];
    for &cell in &path[1..] {
        let diagonal = cell.0 != end.0 && cell.1 != end.1;
        if diagonal {
            steps.push(Step::new(
                IndexRange::new(start.0 + 1, end.0 + 1),
                IndexRange::new(start.1 + 1, end.1 + 1),
            ));
            start = cell;
        }
        end = cell;
    }
    steps.push(Step::new(
        IndexRange::new(start.0 + 1, end.0 + 1),
        IndexRange::new(start.1 + 1, end.1 + 1),
    ));
    PairedWalk::new(steps)
}

/// Exhaustive reference value: the minimum over every monotone coupling
/// path from `(1, 1)` to `(k, l)` of the largest matched distance.
pub fn dfd_oracle(a: &Chain, b: &Chain) -> Result<f64> {
    check_dims(a, b)?;
    let (k, l) = (a.len(), b.len());
    if k * l > ORACLE_PAIR_LIMIT {
        return Err(Error::TooLargeForOracle {
            k,
            l,
            limit: ORACLE_PAIR_LIMIT,
        });
    }

    fn descend(a: &[Point], b: &[Point], i: usize, j: usize, so_far: f64) -> f64 {
        let here = so_far.max(euclid(&a[i], &b[j]).expect("checked dims"));
        let (last_i, last_j) = (a.len() - 1, b.len() - 1);
        if i == last_i && j == last_j {
            return here;
        }
        let mut best = f64::INFINITY;
        if i < last_i && j < last_j {
            best = best.min(descend(a, b, i + 1, j + 1, here));
        }
        if i < last_i {
            best = best.min(descend(a, b, i + 1, j, here));
        }
        if j < last_j {
            best = best.min(descend(a, b, i, j + 1, here));
        }
        best
    }

    Ok(descend(a.vertices(), b.vertices(), 0, 0, 0.0))
}

/// Every paired walk for chains of lengths `k` and `l`.
pub fn paired_walks(k: usize, l: usize) -> Vec<PairedWalk> {
    fn extend(k: usize, l: usize, na: usize, nb: usize, cur: &mut Vec<Step>, out: &mut Vec<PairedWalk>) {
        if na > k && nb > l {
            out.push(PairedWalk::new(cur.clone()));
            return;
        }
        if na > k || nb > l {
            return;
        }
        // a_na against b_nb..=hi
        for hi in nb..=l {
            cur.push(Step::new(IndexRange::single(na), IndexRange::new(nb, hi)));
            extend(k, l, na + 1, hi + 1, cur, out);
            cur.pop();
        }
        // a_na..=hi (two or more) against b_nb
        for hi in na + 1..=k {
            cur.push(Step::new(IndexRange::new(na, hi), IndexRange::single(nb)));
            extend(k, l, hi + 1, nb + 1, cur, out);
            cur.pop();
        }
    }

    let mut out = Vec::new();
    if k > 0 && l > 0 {
        extend(k, l, 1, 1, &mut Vec::new(), &mut out);
    }
    out
}

/// Closed form for two segments: `max(d(a_1, b_1), d(a_2, b_2))`.
pub fn dfd_segments(a: &Chain, b: &Chain) -> Result<f64> {
    if a.len() != 2 || b.len() != 2 {
        return Err(Error::InvalidArity(format!(
            "segment distance needs two 2-vertex chains, got {} and {} vertices",
            a.len(),
            b.len()
        )));
    }
    check_dims(a, b)?;
    let (av, bv) = (a.vertices(), b.vertices());
    Ok(euclid(&av[0], &bv[0])?.max(euclid(&av[1], &bv[1])?))
}
