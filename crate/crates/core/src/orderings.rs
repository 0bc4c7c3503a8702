//! Sweep orderings of the admissible pair set and their equivalence classes.
//!
//! Pairs are stored zero-based. The JSON form is an array of one-based
//! `[i, j]` pairs.

use std::collections::{HashMap, VecDeque};

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// Orderings up to this length are searched exhaustively by default.
pub const MAX_EXHAUSTIVE_LEN: usize = 12;
/// Depth used for longer orderings when no limit is given.
pub const DEFAULT_DEPTH: usize = 10;
/// Hard cap on visited states for any single query.
pub const DEFAULT_MAX_STATES: usize = 2_000_000;

/// Number of admissible pairs `p(2n − p − 1)/2`.
pub fn pair_count(n: usize, p: usize) -> usize {
    p * (2 * n - p - 1) / 2
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PairOrdering {
    n: usize,
    p: usize,
    pairs: Vec<(usize, usize)>,
}

impl PairOrdering {
    /// Validates that `pairs` (zero-based) is a permutation of the pair set.
    pub fn new(n: usize, p: usize, pairs: Vec<(usize, usize)>) -> Result<Self> {
        check_np(n, p)?;
        let mut seen = vec![false; n * n];
        for &(i, j) in &pairs {
            if j >= n || i >= j || i >= p {
                return Err(Error::Shape(format!(
                    "pair ({}, {}) is not admissible for n = {n}, p = {p}",
                    i + 1,
                    j + 1
                )));
            }
            if std::mem::replace(&mut seen[i * n + j], true) {
                return Err(Error::Shape(format!("pair ({}, {}) appears twice", i + 1, j + 1)));
            }
        }
        if pairs.len() != pair_count(n, p) {
            return Err(Error::Shape(format!(
                "ordering has {} pairs, expected {}",
                pairs.len(),
                pair_count(n, p)
            )));
        }
        Ok(Self { n, p, pairs })
    }

    /// Builds an ordering from one-based `[i, j]` pairs.
    pub fn from_one_based(n: usize, p: usize, pairs: &[[usize; 2]]) -> Result<Self> {
        let zero = pairs
            .iter()
            .map(|&[i, j]| {
                if i == 0 || j == 0 {
                    Err(Error::Shape("pair indices are one-based".into()))
                } else {
                    Ok((i - 1, j - 1))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, p, zero)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn one_based(&self) -> Vec<[usize; 2]> {
        self.pairs.iter().map(|&(i, j)| [i + 1, j + 1]).collect()
    }
}

impl Serialize for PairOrdering {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.one_based().serialize(s)
    }
}

fn check_np(n: usize, p: usize) -> Result<()> {
    if p == 0 || p > n {
        return Err(Error::Config(format!("need 1 ≤ p ≤ n, got p = {p}, n = {n}")));
    }
    Ok(())
}

/// Row-major ordering `(1,2), (1,3), …, (1,n), (2,3), …, (p,n)`.
pub fn cyclic_ordering(n: usize, p: usize) -> Result<PairOrdering> {
    check_np(n, p)?;
    let pairs = (0..p).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    Ok(PairOrdering { n, p, pairs })
}

/// Uniform shuffle of the cyclic ordering.
pub fn random_ordering(n: usize, p: usize, seed: u64) -> Result<PairOrdering> {
    let mut ord = cyclic_ordering(n, p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ord.pairs.shuffle(&mut rng);
    Ok(ord)
}

/// Consecutive blocks of sizes `n−1, n−2, …, n−p` each share a common index.
pub fn in_sigma0(ordering: &PairOrdering) -> bool {
    blocks_share_index(ordering.n, ordering.p, &ordering.pairs)
}

fn blocks_share_index(n: usize, p: usize, pairs: &[(usize, usize)]) -> bool {
    let mut start = 0;
    for k in 1..=p {
        let size = n - k;
        let block = &pairs[start..start + size];
        start += size;
        if let Some(&(a, b)) = block.first() {
            let shares = |c: usize| block.iter().all(|&(i, j)| i == c || j == c);
            if !shares(a) && !shares(b) {
                return false;
            }
        }
    }
    true
}

/// Position changes that generate the equivalence relation on orderings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "move", rename_all = "kebab-case")]
pub enum Move {
    /// Exchange positions `position` and `position + 1` (zero-based); the
    /// two pairs must be disjoint.
    Swap {
        position: usize,
    },
    /// First element moves to the end.
    RotateLeft,
    /// Last element moves to the front.
    RotateRight,
    Reverse,
}

pub fn apply_move(ordering: &PairOrdering, mv: Move) -> Result<PairOrdering> {
    let mut out = ordering.clone();
    apply_to(&mut out.pairs, mv)?;
    Ok(out)
}

fn apply_to<T>(seq: &mut [T], mv: Move) -> Result<()>
where
    T: Copy + DisjointCheck,
{
    match mv {
        Move::Swap { position } => {
            if position + 1 >= seq.len() {
                return Err(Error::Shape(format!("swap position {position} out of range")));
            }
            if !seq[position].disjoint(&seq[position + 1]) {
                return Err(Error::Shape(format!(
                    "pairs at {position} and {} share an index",
                    position + 1
                )));
            }
            seq.swap(position, position + 1);
        }
        Move::RotateLeft => seq.rotate_left(1.min(seq.len())),
        Move::RotateRight => seq.rotate_right(1.min(seq.len())),
        Move::Reverse => seq.reverse(),
    }
    Ok(())
}

trait DisjointCheck {
    fn disjoint(&self, other: &Self) -> bool;
}

impl DisjointCheck for (usize, usize) {
    fn disjoint(&self, other: &Self) -> bool {
        self.0 != other.0 && self.0 != other.1 && self.1 != other.0 && self.1 != other.1
    }
}

impl DisjointCheck for ((usize, usize), f64) {
    fn disjoint(&self, other: &Self) -> bool {
        self.0.disjoint(&other.0)
    }
}

/// Applies `moves` to an ordering together with its rotation angles so that
/// the rotation product is transformed consistently: rotations conjugate
/// the product, swaps commute disjoint rotations, and reversal transposes
/// the product (every angle changes sign).
pub fn replay(ordering: &PairOrdering, thetas: &[f64], moves: &[Move]) -> Result<(PairOrdering, Vec<f64>)> {
    check_angles(ordering, thetas)?;
    let mut seq: Vec<((usize, usize), f64)> = ordering.pairs.iter().copied().zip(thetas.iter().copied()).collect();
    for &mv in moves {
        apply_to(&mut seq, mv)?;
        if mv == Move::Reverse {
            for entry in &mut seq {
                entry.1 = -entry.1;
            }
        }
    }
    let (pairs, angles) = seq.into_iter().unzip();
    Ok((
        PairOrdering {
            n: ordering.n,
            p: ordering.p,
            pairs,
        },
        angles,
    ))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum Equivalence {
    /// Applying `witness` in order yields an ordering in Σ₀.
    Yes { witness: Vec<Move> },
    /// The whole equivalence class was enumerated without meeting Σ₀.
    No { states: usize },
    /// The search was truncated before a decision.
    Unknown { states: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    pub depth_limit: Option<usize>,
    pub max_states: usize,
}

impl SearchLimits {
    /// Exhaustive for short orderings, depth-limited otherwise.
    pub fn for_len(len: usize, depth_limit: Option<usize>) -> Self {
        let depth_limit = depth_limit.or((len > MAX_EXHAUSTIVE_LEN).then_some(DEFAULT_DEPTH));
        Self {
            depth_limit,
            max_states: DEFAULT_MAX_STATES,
        }
    }
}

pub fn equivalent_to_sigma0(ordering: &PairOrdering, depth_limit: Option<usize>) -> Equivalence {
    equivalent_to_sigma0_with(ordering, SearchLimits::for_len(ordering.len(), depth_limit))
}

/// Breadth-first search over the move graph, so witnesses are shortest.
pub fn equivalent_to_sigma0_with(ordering: &PairOrdering, limits: SearchLimits) -> Equivalence {
    let (n, p) = (ordering.n, ordering.p);
    if in_sigma0(ordering) {
        return Equivalence::Yes { witness: Vec::new() };
    }
    let encode = |pairs: &[(usize, usize)]| -> Vec<u16> { pairs.iter().map(|&(i, j)| (i * n + j) as u16).collect() };
    let decode =
        |code: &[u16]| -> Vec<(usize, usize)> { code.iter().map(|&c| (c as usize / n, c as usize % n)).collect() };

    let start = encode(&ordering.pairs);
    // state → (parent state, move that produced it, depth)
    let mut parents: HashMap<Vec<u16>, Option<(Vec<u16>, Move)>> = HashMap::new();
    parents.insert(start.clone(), None);
    let mut queue = VecDeque::from([(start, 0usize)]);
    let mut truncated = false;
    let len = ordering.len();

    while let Some((state, depth)) = queue.pop_front() {
        if limits.depth_limit.is_some_and(|lim| depth >= lim) {
            truncated = true;
            continue;
        }
        let pairs = decode(&state);
        let mut moves: Vec<Move> = (0..len.saturating_sub(1))
            .filter(|&l| pairs[l].disjoint(&pairs[l + 1]))
            .map(|position| Move::Swap { position })
            .collect();
        moves.extend([Move::RotateLeft, Move::RotateRight, Move::Reverse]);
        for mv in moves {
            let mut next = pairs.clone();
            apply_to(&mut next, mv).expect("generated moves are valid");
            let code = encode(&next);
            if parents.contains_key(&code) {
                continue;
            }
            if parents.len() >= limits.max_states {
                return Equivalence::Unknown { states: parents.len() };
            }
            parents.insert(code.clone(), Some((state.clone(), mv)));
            if blocks_share_index(n, p, &next) {
                let mut witness = vec![mv];
                let mut cur = state.clone();
                while let Some(Some((prev, m))) = parents.get(&cur) {
                    witness.push(*m);
                    cur = prev.clone();
                }
                witness.reverse();
                return Equivalence::Yes { witness };
            }
            queue.push_back((code, depth + 1));
        }
    }
    if truncated {
        Equivalence::Unknown { states: parents.len() }
    } else {
        Equivalence::No { states: parents.len() }
    }
}

fn check_angles(ordering: &PairOrdering, thetas: &[f64]) -> Result<()> {
    if thetas.len() != ordering.len() {
        return Err(Error::Shape(format!(
            "{} angles for an ordering of length {}",
            thetas.len(),
            ordering.len()
        )));
    }
    Ok(())
}

/// `‖G(i₁,j₁,θ₁)·G(i₂,j₂,θ₂)⋯G(i_N,j_N,θ_N) − I‖_F`.
pub fn verify_identity_decomposition(ordering: &PairOrdering, thetas: &[f64]) -> Result<f64> {
    check_angles(ordering, thetas)?;
    let n = ordering.n;
    let mut prod = DMatrix::<f64>::identity(n, n);
    for (&(i, j), &theta) in ordering.pairs.iter().zip(thetas) {
        // right-multiplication by a rotation mixes columns i and j
        let (s, c) = theta.sin_cos();
        for r in 0..n {
            let (a, b) = (prod[(r, i)], prod[(r, j)]);
            prod[(r, i)] = c * a + s * b;
            prod[(r, j)] = -s * a + c * b;
        }
    }
    Ok((prod - DMatrix::<f64>::identity(n, n)).norm())
}

/// The non-Σ₀-equivalent ordering at `n = p = 4` from the classic
/// counterexample, one-based.
pub const COUNTEREXAMPLE_N4: [[usize; 2]; 6] = [[1, 2], [1, 4], [2, 3], [2, 4], [1, 3], [3, 4]];

/// Angles making the counterexample ordering multiply to the identity.
pub const COUNTEREXAMPLE_N4_ANGLES: [f64; 6] = [
    std::f64::consts::FRAC_PI_2,
    std::f64::consts::FRAC_PI_2,
    -std::f64::consts::FRAC_PI_2,
    -std::f64::consts::FRAC_PI_2,
    -std::f64::consts::FRAC_PI_2,
    -std::f64::consts::FRAC_PI_2,
];

/// An Eulerian-circuit ordering at `n = p = 5`, one-based.
pub const EULER_CIRCUIT_N5: [[usize; 2]; 10] = [
    [1, 2],
    [2, 3],
    [3, 4],
    [4, 5],
    [3, 5],
    [1, 3],
    [1, 4],
    [2, 4],
    [2, 5],
    [1, 5],
];
