//! Arborescences, the Markov chain tree theorem, and stationary distributions
//! of positive row-stochastic matrices.
//!
//! An arborescence rooted at `j` is a directed graph on `0..n` in which every
//! node other than `j` has exactly one outgoing edge, `j` has none, and there
//! is no cycle. For a row-stochastic ergodic `Q` the stationary distribution
//! satisfies `π[j] ∝ Σ_{T rooted at j} Π_{(a,b) ∈ E(T)} Q[a,b]`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::{linf_norm, SimplexVector};

/// Largest node count accepted by the enumeration.
pub const MAX_TREE_NODES: usize = 7;
/// Largest node count for the log-domain cross-check.
pub const MAX_LOG_DOMAIN_NODES: usize = 5;
/// Required bound on `‖Qᵀπ − π‖∞`.
pub const STATIONARY_RESIDUAL_TOL: f64 = 1e-10;
/// Row-sum tolerance for [`TransitionMatrix`].
pub const ROW_SUM_TOL: f64 = 1e-12;

const POWER_ITERATION_TOL: f64 = 1e-13;
const POWER_ITERATION_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Arborescence {
    root: usize,
    /// `parents[v]` is the head of `v`'s outgoing edge; `None` only at the root.
    parents: Vec<Option<usize>>,
}

impl Arborescence {
    /// Validates a parent map; `parents[root]` must be `None`.
    pub fn new(root: usize, parents: Vec<Option<usize>>) -> Result<Self> {
        let n = parents.len();
        if root >= n {
            return Err(Error::InvalidShape(format!("root {root} not in 0..{n}")));
        }
        for (v, p) in parents.iter().enumerate() {
            match (v == root, p) {
                (true, None) => {}
                (true, Some(_)) => {
                    return Err(Error::InvalidShape("root has an outgoing edge".into()))
                }
                (false, None) => {
                    return Err(Error::InvalidShape(format!("node {v} has no outgoing edge")))
                }
                (false, Some(p)) if *p >= n => {
                    return Err(Error::InvalidShape(format!("node {v} points outside 0..{n}")))
                }
                _ => {}
            }
        }
        let tree = Arborescence { root, parents };
        if !tree.reaches_root_everywhere() {
            return Err(Error::InvalidShape("parent map contains a cycle".into()));
        }
        Ok(tree)
    }

    pub fn num_nodes(&self) -> usize {
        self.parents.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parents[v]
    }

    /// The edge set `{(v, parent(v)) : v ≠ root}`, in node order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parents
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|p| (v, p)))
    }

    /// Parent array with the root mapped to itself.
    pub fn parent_array(&self) -> Vec<usize> {
        self.parents
            .iter()
            .enumerate()
            .map(|(v, p)| p.unwrap_or(v))
            .collect()
    }

    fn reaches_root_everywhere(&self) -> bool {
        let n = self.num_nodes();
        (0..n).all(|start| {
            let mut v = start;
            for _ in 0..n {
                match self.parents[v] {
                    None => return v == self.root,
                    Some(p) => v = p,
                }
            }
            false
        })
    }
}

fn check_tree_size(n: usize) -> Result<()> {
    if (2..=MAX_TREE_NODES).contains(&n) {
        Ok(())
    } else {
        Err(Error::SizeOutOfRange {
            n,
            min: 2,
            max: MAX_TREE_NODES,
        })
    }
}

/// True when following parents from every node ends at `root` within `n` hops.
fn acyclic(parents: &[usize], root: usize) -> bool {
    let n = parents.len();
    (0..n).all(|start| {
        let mut v = start;
        let mut hops = 0;
        while v != root {
            v = parents[v];
            hops += 1;
            if hops >= n {
                return false;
            }
        }
        true
    })
}

/// All arborescences on `n` nodes rooted at `root`, lexicographic in the
/// parent array. There are exactly `n^(n-2)` of them.
pub fn enumerate_arborescences(n: usize, root: usize) -> Result<Vec<Arborescence>> {
    check_tree_size(n)?;
    if root >= n {
        return Err(Error::InvalidShape(format!("root {root} not in 0..{n}")));
    }
    let mut out = Vec::new();
    // odometer over parent choices; the root's slot is pinned to itself
    let mut parents: Vec<usize> = (0..n).map(|v| if v == root { root } else { 0 }).collect();
    loop {
        let no_self_loops = (0..n).all(|v| v == root || parents[v] != v);
        if no_self_loops && acyclic(&parents, root) {
            out.push(Arborescence {
                root,
                parents: parents
                    .iter()
                    .enumerate()
                    .map(|(v, &p)| (v != root).then_some(p))
                    .collect(),
            });
        }
        let mut v = n;
        loop {
            if v == 0 {
                return Ok(out);
            }
            v -= 1;
            if v == root {
                continue;
            }
            parents[v] += 1;
            if parents[v] < n {
                break;
            }
            parents[v] = 0;
        }
    }
}

/// Trees of a fixed size in canonical order: grouped by root, each group in
/// enumeration order. Edges are flattened for fast products.
#[derive(Debug)]
pub struct TreeIndex {
    n: usize,
    trees: Vec<Arborescence>,
    /// `edges[t*(n-1) .. (t+1)*(n-1)]` are the edges of tree `t`.
    edges: Vec<(usize, usize)>,
    root_ranges: Vec<std::ops::Range<usize>>,
}

impl TreeIndex {
    fn build(n: usize) -> Result<Self> {
        let mut trees = Vec::new();
        let mut root_ranges = Vec::with_capacity(n);
        for root in 0..n {
            let start = trees.len();
            trees.extend(enumerate_arborescences(n, root)?);
            root_ranges.push(start..trees.len());
        }
        let edges = trees.iter().flat_map(|t| t.edges()).collect();
        Ok(TreeIndex {
            n,
            trees,
            edges,
            root_ranges,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn trees(&self) -> &[Arborescence] {
        &self.trees
    }

    pub fn tree_edges(&self, t: usize) -> &[(usize, usize)] {
        let k = self.n - 1;
        &self.edges[t * k..(t + 1) * k]
    }

    /// Index range of the trees rooted at `root`.
    pub fn rooted_at(&self, root: usize) -> std::ops::Range<usize> {
        self.root_ranges[root].clone()
    }

    pub fn root_of(&self, t: usize) -> usize {
        self.trees[t].root
    }
}

/// Shared, lazily built tree index for `n` nodes (`2 ≤ n ≤ 7`).
pub fn tree_index(n: usize) -> Result<&'static TreeIndex> {
    static CACHE: [OnceLock<TreeIndex>; MAX_TREE_NODES + 1] = [const { OnceLock::new() }; MAX_TREE_NODES + 1];
    check_tree_size(n)?;
    if let Some(idx) = CACHE[n].get() {
        return Ok(idx);
    }
    let built = TreeIndex::build(n)?;
    Ok(CACHE[n].get_or_init(|| built))
}

/// Square row-stochastic matrix, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct TransitionMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl TransitionMatrix {
    /// Parses a JSON array of rows.
    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let rows: Vec<Vec<f64>> =
            serde_json::from_slice(bytes).map_err(|e| crate::game::parse_error(bytes, &e))?;
        Self::from_rows(rows)
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidMatrix("empty matrix".into()));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMatrix(format!(
                    "row {r} has {} entries, expected {n}",
                    row.len()
                )));
            }
            entries.extend(row);
        }
        Self::from_row_major(n, entries)
    }

    pub fn from_row_major(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::mismatch("matrix entries", n * n, entries.len()));
        }
        for (i, &v) in entries.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
            if v < 0.0 {
                return Err(Error::InvalidMatrix(format!(
                    "entry ({},{}) is negative",
                    i / n,
                    i % n
                )));
            }
        }
        for r in 0..n {
            let s: f64 = entries[r * n..(r + 1) * n].iter().sum();
            if (s - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidMatrix(format!("row {r} sums to {s}")));
            }
        }
        Ok(TransitionMatrix { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.n + col]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.entries[r * self.n..(r + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    /// `Qᵀπ`, the distribution after one step from `π`.
    pub fn step(&self, pi: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        for (a, &mass) in pi.iter().enumerate() {
            for (b, o) in out.iter_mut().enumerate() {
                *o += mass * self.entries[a * n + b];
            }
        }
        out
    }

    /// `‖Qᵀπ − π‖∞`.
    pub fn stationary_residual(&self, pi: &[f64]) -> f64 {
        let next = self.step(pi);
        let diff: Vec<f64> = next.iter().zip(pi).map(|(a, b)| a - b).collect();
        linf_norm(&diff)
    }

    /// Off-diagonal positivity, which makes the chain irreducible and is
    /// all the tree theorem and the solvers need. The diagonal may be zero.
    pub fn require_positive_off_diagonal(&self) -> Result<()> {
        let n = self.n;
        match (0..n * n).find(|&i| i / n != i % n && self.entries[i] <= 0.0) {
            Some(i) => Err(Error::NonPositiveEntry {
                row: i / n,
                col: i % n,
                value: self.entries[i],
            }),
            None => Ok(()),
        }
    }
}

impl TryFrom<Vec<Vec<f64>>> for TransitionMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        TransitionMatrix::from_rows(rows)
    }
}

impl From<TransitionMatrix> for Vec<Vec<f64>> {
    fn from(m: TransitionMatrix) -> Self {
        m.rows()
    }
}

/// Root weights `Σ_j` of the tree theorem.
pub fn tree_weights(q: &TransitionMatrix) -> Result<Vec<f64>> {
    let index = tree_index(q.n())?;
    Ok((0..q.n())
        .map(|root| {
            index
                .rooted_at(root)
                .map(|t| {
                    index
                        .tree_edges(t)
                        .iter()
                        .map(|&(a, b)| q.get(a, b))
                        .product::<f64>()
                })
                .sum()
        })
        .collect())
}

/// Stationary distribution via the Markov chain tree theorem.
pub fn tree_theorem_stationary(q: &TransitionMatrix) -> Result<SimplexVector> {
    check_tree_size(q.n())?;
    q.require_positive_off_diagonal()?;
    let weights = tree_weights(q)?;
    let total: f64 = weights.iter().sum();
    Ok(SimplexVector::from_raw(weights.iter().map(|w| w / total).collect()))
}

/// The tree theorem evaluated on `log Q`: `Σ_j ∝ Σ_T exp(Σ_{(a,b)∈T} ln Q[a,b])`,
/// normalized with a max shift. Kept as an independent cross-check for `n ≤ 5`.
pub fn log_domain_tree_stationary(q: &TransitionMatrix) -> Result<SimplexVector> {
    let n = q.n();
    if !(2..=MAX_LOG_DOMAIN_NODES).contains(&n) {
        return Err(Error::SizeOutOfRange {
            n,
            min: 2,
            max: MAX_LOG_DOMAIN_NODES,
        });
    }
    q.require_positive_off_diagonal()?;
    let index = tree_index(n)?;
    let exponents: Vec<f64> = (0..index.len())
        .map(|t| index.tree_edges(t).iter().map(|&(a, b)| q.get(a, b).ln()).sum())
        .collect();
    let max = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut weights = vec![0.0; n];
    for (t, e) in exponents.iter().enumerate() {
        weights[index.root_of(t)] += (e - max).exp();
    }
    let total: f64 = weights.iter().sum();
    Ok(SimplexVector::from_raw(weights.iter().map(|w| w / total).collect()))
}

/// Solves `(Qᵀ − I)π = 0` with the last equation replaced by `Σπ = 1`, by
/// Gaussian elimination with partial pivoting. Falls back to power iteration
/// when the residual exceeds [`STATIONARY_RESIDUAL_TOL`].
pub fn solve_stationary(q: &TransitionMatrix) -> Result<SimplexVector> {
    q.require_positive_off_diagonal()?;
    if let Some(pi) = eliminate(q) {
        if q.stationary_residual(&pi) <= STATIONARY_RESIDUAL_TOL {
            return Ok(SimplexVector::from_raw(pi));
        }
    }
    power_iteration(q)
}

fn normalize(mut v: Vec<f64>) -> Option<Vec<f64>> {
    for x in &mut v {
        if *x < 0.0 {
            if *x < -1e-12 {
                return None;
            }
            *x = 0.0;
        }
    }
    let total: f64 = v.iter().sum();
    if !(total.is_finite() && total > 0.0) {
        return None;
    }
    Some(v.into_iter().map(|x| x / total).collect())
}

fn eliminate(q: &TransitionMatrix) -> Option<Vec<f64>> {
    let n = q.n();
    // augmented system [A | b], A = Qᵀ − I with the last row set to ones
    let w = n + 1;
    let mut a = vec![0.0; n * w];
    for r in 0..n - 1 {
        for c in 0..n {
            a[r * w + c] = q.get(c, r) - if r == c { 1.0 } else { 0.0 };
        }
    }
    for c in 0..n {
        a[(n - 1) * w + c] = 1.0;
    }
    a[(n - 1) * w + n] = 1.0;

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * w + col].abs().total_cmp(&a[j * w + col].abs()))?;
        if a[pivot * w + col].abs() < f64::MIN_POSITIVE {
            return None;
        }
        if pivot != col {
            for c in 0..w {
                a.swap(pivot * w + c, col * w + c);
            }
        }
        let p = a[col * w + col];
        for r in col + 1..n {
            let f = a[r * w + col] / p;
            if f != 0.0 {
                for c in col..w {
                    a[r * w + c] -= f * a[col * w + c];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut s = a[r * w + n];
        for c in r + 1..n {
            s -= a[r * w + c] * x[c];
        }
        x[r] = s / a[r * w + r];
    }
    normalize(x)
}

fn power_iteration(q: &TransitionMatrix) -> Result<SimplexVector> {
    let n = q.n();
    let mut pi = vec![1.0 / n as f64; n];
    for _ in 0..POWER_ITERATION_CAP {
        // lazy chain (I + Q)/2: same fixed point, and aperiodic even when the
        // diagonal of Q is zero
        let stepped: Vec<f64> = q.step(&pi).iter().zip(&pi).map(|(a, b)| 0.5 * (a + b)).collect();
        let next = normalize(stepped).ok_or(Error::StationaryResidual {
            residual: f64::INFINITY,
        })?;
        let moved = crate::simplex::linf_distance(&next, &pi);
        pi = next;
        if moved <= POWER_ITERATION_TOL {
            break;
        }
    }
    let residual = q.stationary_residual(&pi);
    if residual <= STATIONARY_RESIDUAL_TOL {
        Ok(SimplexVector::from_raw(pi))
    } else {
        Err(Error::StationaryResidual { residual })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_positive(n: usize, rng: &mut ChaCha8Rng) -> TransitionMatrix {
        let rows = (0..n)
            .map(|_| {
                let w: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 1e-3).collect();
                let s: f64 = w.iter().sum();
                w.iter().map(|v| v / s).collect()
            })
            .collect();
        TransitionMatrix::from_rows(rows).unwrap()
    }

    /// Every parent array in `[n]^(n-1)` for the non-root nodes, filtered by
    /// the validating constructor.
    fn brute_force_count(n: usize, root: usize) -> usize {
        let others: Vec<usize> = (0..n).filter(|&v| v != root).collect();
        let total = n.pow(others.len() as u32);
        (0..total)
            .filter(|&code| {
                let mut parents = vec![None; n];
                let mut c = code;
                for &v in &others {
                    parents[v] = Some(c % n);
                    c /= n;
                }
                if others.iter().any(|&v| parents[v] == Some(v)) {
                    return false;
                }
                Arborescence::new(root, parents).is_ok()
            })
            .count()
    }

    #[test]
    fn two_nodes_single_tree() {
        let trees = enumerate_arborescences(2, 0).unwrap();
        assert_eq!(trees.len(), 1);
        assert_eq!(trees[0].edges().collect::<Vec<_>>(), vec![(1, 0)]);
    }

    #[test]
    fn cayley_counts_match_brute_force() {
        for n in 2..=5 {
            let mut all = std::collections::BTreeSet::new();
            for root in 0..n {
                let trees = enumerate_arborescences(n, root).unwrap();
                assert_eq!(trees.len(), n.pow(n as u32 - 2));
                assert_eq!(trees.len(), brute_force_count(n, root));
                all.extend(trees);
            }
            assert_eq!(all.len(), n.pow(n as u32 - 1));
        }
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let trees = enumerate_arborescences(4, 2).unwrap();
        let arrays: Vec<_> = trees.iter().map(Arborescence::parent_array).collect();
        let mut sorted = arrays.clone();
        sorted.sort();
        assert_eq!(arrays, sorted);
    }

    #[test]
    fn size_guard() {
        assert!(matches!(enumerate_arborescences(1, 0), Err(Error::SizeOutOfRange { .. })));
        assert!(matches!(enumerate_arborescences(8, 0), Err(Error::SizeOutOfRange { .. })));
        assert!(enumerate_arborescences(3, 3).is_err());
    }

    #[test]
    fn arborescence_constructor_rejects_cycles() {
        assert!(Arborescence::new(0, vec![None, Some(2), Some(1)]).is_err());
        assert!(Arborescence::new(0, vec![None, Some(1), Some(0)]).is_err());
        assert!(Arborescence::new(0, vec![Some(1), Some(0)]).is_err());
        assert!(Arborescence::new(0, vec![None, Some(0), Some(1)]).is_ok());
    }

    #[test]
    fn two_state_chain_closed_form() {
        let (a, b) = (0.2, 0.6);
        let q = TransitionMatrix::from_rows(vec![vec![1.0 - a, a], vec![b, 1.0 - b]]).unwrap();
        for pi in [tree_theorem_stationary(&q).unwrap(), solve_stationary(&q).unwrap()] {
            assert!((pi[0] - 0.75).abs() < 1e-15);
            assert!((pi[1] - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn uniform_and_doubly_stochastic_give_uniform() {
        let q = TransitionMatrix::from_rows(vec![vec![0.25; 4]; 4]).unwrap();
        for &p in tree_theorem_stationary(&q).unwrap().as_slice() {
            assert!((p - 0.25).abs() < 1e-15);
        }
        let ds = TransitionMatrix::from_rows(vec![
            vec![0.2, 0.3, 0.5],
            vec![0.5, 0.2, 0.3],
            vec![0.3, 0.5, 0.2],
        ])
        .unwrap();
        for pi in [tree_theorem_stationary(&ds).unwrap(), solve_stationary(&ds).unwrap()] {
            for &p in pi.as_slice() {
                assert!((p - 1.0 / 3.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_diagonal_is_fine() {
        let flip = TransitionMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let skewed = TransitionMatrix::from_rows(vec![
            vec![0.0, 0.9, 0.1],
            vec![0.2, 0.0, 0.8],
            vec![0.5, 0.5, 0.0],
        ])
        .unwrap();
        for q in [flip, skewed] {
            let a = tree_theorem_stationary(&q).unwrap();
            let b = solve_stationary(&q).unwrap();
            let c = power_iteration(&q).unwrap();
            assert!(crate::simplex::linf_distance(a.as_slice(), b.as_slice()) <= 1e-12);
            assert!(crate::simplex::linf_distance(a.as_slice(), c.as_slice()) <= 1e-10);
        }
    }

    #[test]
    fn non_positive_rejected() {
        let q = TransitionMatrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(tree_theorem_stationary(&q), Err(Error::NonPositiveEntry { .. })));
        assert!(matches!(solve_stationary(&q), Err(Error::NonPositiveEntry { .. })));
    }

    #[test]
    fn matrix_validation() {
        assert!(TransitionMatrix::from_rows(vec![vec![0.5, 0.6], vec![0.5, 0.5]]).is_err());
        assert!(TransitionMatrix::from_rows(vec![vec![1.5, -0.5], vec![0.5, 0.5]]).is_err());
        assert!(TransitionMatrix::from_rows(vec![vec![1.0], vec![0.5, 0.5]]).is_err());
    }

    #[test]
    fn solvers_agree_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 0..300 {
            let n = 3 + k % 4;
            let q = random_positive(n, &mut rng);
            let a = tree_theorem_stationary(&q).unwrap();
            let b = solve_stationary(&q).unwrap();
            assert!(crate::simplex::linf_distance(a.as_slice(), b.as_slice()) <= 1e-10);
            assert!(q.stationary_residual(a.as_slice()) <= 1e-10);
            assert!(q.stationary_residual(b.as_slice()) <= 1e-10);
            assert!((b.as_slice().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            if n <= MAX_LOG_DOMAIN_NODES {
                let c = log_domain_tree_stationary(&q).unwrap();
                assert!(crate::simplex::linf_distance(a.as_slice(), c.as_slice()) <= 1e-10);
            }
        }
    }

    #[test]
    fn near_permutation_stays_solvable() {
        let n = 5;
        for eps in [1e-1, 1e-3, 1e-6] {
            let rows = (0..n)
                .map(|r| {
                    (0..n)
                        .map(|c| {
                            let perm = if c == (r + 1) % n { 1.0 } else { 0.0 };
                            (1.0 - eps) * perm + eps / n as f64
                        })
                        .collect()
                })
                .collect();
            let q = TransitionMatrix::from_rows(rows).unwrap();
            let pi = solve_stationary(&q).unwrap();
            assert!(q.stationary_residual(pi.as_slice()) <= 1e-10);
        }
    }

    #[test]
    fn power_iteration_fallback_converges() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let q = random_positive(6, &mut rng);
        let pi = power_iteration(&q).unwrap();
        let exact = tree_theorem_stationary(&q).unwrap();
        assert!(crate::simplex::linf_distance(pi.as_slice(), exact.as_slice()) <= 1e-10);
    }
}
