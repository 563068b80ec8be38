//! Plumbing graphs, their intersection lattices and the search for
//! embeddings into the negative diagonal lattice `(Z^N, -I)`.

use num_integer::Roots;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{definiteness, rat, Definiteness, IntMatrix, Rational};

/// Weighted graph; vertex `i` has Euler number `weights[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlumbingGraph {
    pub weights: Vec<i64>,
    pub edges: Vec<[usize; 2]>,
}

impl PlumbingGraph {
    pub fn new(weights: Vec<i64>, edges: Vec<[usize; 2]>) -> Result<Self> {
        let n = weights.len();
        for &[a, b] in &edges {
            if a >= n || b >= n || a == b {
                return Err(Error::InvalidParameters(format!("bad edge [{a}, {b}] on {n} vertices")));
            }
        }
        Ok(PlumbingGraph { weights, edges })
    }

    /// Linear chain with the given weights.
    pub fn chain(weights: &[i64]) -> Self {
        let edges = (1..weights.len()).map(|i| [i - 1, i]).collect();
        PlumbingGraph {
            weights: weights.to_vec(),
            edges,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.contains(&v)).count()
    }

    pub fn neighbours(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&[a, b]| match (a == v, b == v) {
                (true, _) => Some(b),
                (_, true) => Some(a),
                _ => None,
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn is_tree(&self) -> bool {
        let n = self.len();
        if n == 0 {
            return true;
        }
        if self.edges.len() != n - 1 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for w in self.neighbours(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

fn check_pn(p: u64, n: u64) -> Result<(i64, i64)> {
    if p < 2 || n < 1 {
        return Err(Error::InvalidParameters(format!(
            "need p >= 2 and n >= 1, got p={p}, n={n}"
        )));
    }
    Ok((p as i64, n as i64))
}

/// Star-shaped plumbing bounded by `-E(p,n)`: a central `-2` vertex with
/// three legs, a single `-p`; a chain of `p(n+1)` vertices of weight `-2`;
/// and `p-1` vertices of weight `-2` followed by one `-(n+1)`.
///
/// Vertex 0 is the centre; legs follow in that order, each listed outward.
pub fn build_w(p: u64, n: u64) -> Result<PlumbingGraph> {
    let (pi, ni) = check_pn(p, n)?;
    let mut weights = vec![-2, -pi];
    let mut edges = vec![[0, 1]];
    let mut leg = |weights: &mut Vec<i64>, ws: Vec<i64>| {
        let mut prev = 0;
        for w in ws {
            weights.push(w);
            let v = weights.len() - 1;
            edges.push([prev, v]);
            prev = v;
        }
    };
    leg(&mut weights, vec![-2; (pi * (ni + 1)) as usize]);
    let mut third = vec![-2; (pi - 1) as usize];
    third.push(-(ni + 1));
    leg(&mut weights, third);
    PlumbingGraph::new(weights, edges)
}

/// Integer symmetric bilinear form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    pub gram: IntMatrix,
}

impl Lattice {
    pub fn new(gram: IntMatrix) -> Result<Self> {
        if !gram.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        Ok(Lattice { gram })
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    fn entry(&self, i: usize, j: usize) -> i64 {
        i64::try_from(self.gram.get(i, j)).expect("lattice entries fit in i64")
    }
}

/// Weights on the diagonal, `1` per edge.
pub fn intersection_matrix(g: &PlumbingGraph) -> Lattice {
    let n = g.len();
    let mut m = IntMatrix::zeros(n, n);
    for (i, &w) in g.weights.iter().enumerate() {
        m.set(i, i, w);
    }
    for &[a, b] in &g.edges {
        let v: crate::exact::Int = m.get(a, b) + 1;
        m.set(a, b, v.clone());
        m.set(b, a, v);
    }
    Lattice { gram: m }
}

/// `-2 + (n(p-1)+1)/(np+1) + 1/p + p(n+1)/(p(n+1)+1)`; negative exactly when
/// the star-shaped form above is negative definite.
pub fn nr_obstruction_sum(p: u64, n: u64) -> Result<Rational> {
    let (p, n) = check_pn(p, n)?;
    Ok(rat(-2, 1) + rat(n * (p - 1) + 1, n * p + 1) + rat(1, p) + rat(p * (n + 1), p * (n + 1) + 1))
}

/// One vector of `Z^N` per lattice basis element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalEmbedding {
    pub vectors: Vec<Vec<i64>>,
}

impl DiagonalEmbedding {
    /// Checks `-(v_i · v_j) = gram[i][j]` for all pairs.
    pub fn verify(&self, l: &Lattice) -> bool {
        let r = l.rank();
        self.vectors.len() == r
            && (0..r).all(|i| {
                (0..r).all(|j| {
                    let dot: i64 = self.vectors[i].iter().zip(&self.vectors[j]).map(|(a, b)| a * b).sum();
                    -dot == l.entry(i, j)
                })
            })
    }
}

/// Evidence that an exhaustive search found nothing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoEmbeddingCertificate {
    pub dimension: usize,
    /// Basis elements in the order they were placed.
    pub order: Vec<usize>,
    /// Search nodes visited; identical across runs and thread counts.
    pub nodes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum EmbeddingOutcome {
    Found { embedding: DiagonalEmbedding },
    None { certificate: NoEmbeddingCertificate },
    BudgetExhausted { nodes: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Node budget for the breadth-first split and, separately, for each
    /// subtree handed to a worker; keeps exhaustion independent of
    /// scheduling.
    pub budget: u64,
    pub parallel: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: 50_000_000,
            parallel: true,
        }
    }
}

/// Placement order: decreasing |weight|, then decreasing degree, ties
/// broken by breadth-first position from the first such vertex.
pub fn placement_order(l: &Lattice) -> Vec<usize> {
    let r = l.rank();
    if r == 0 {
        return vec![];
    }
    let key = |i: usize| {
        let w = l.entry(i, i).abs();
        let deg = (0..r).filter(|&j| j != i && l.entry(i, j) != 0).count();
        (std::cmp::Reverse(w), std::cmp::Reverse(deg))
    };
    let root = (0..r).min_by_key(|&i| (key(i), i)).expect("nonempty");
    let mut bfs = vec![usize::MAX; r];
    let mut next = 0;
    // restart from unvisited vertices so disconnected forms are handled
    for start in std::iter::once(root).chain(0..r) {
        if bfs[start] != usize::MAX {
            continue;
        }
        let mut queue = std::collections::VecDeque::from([start]);
        bfs[start] = next;
        next += 1;
        while let Some(v) = queue.pop_front() {
            for w in 0..r {
                if w != v && l.entry(v, w) != 0 && bfs[w] == usize::MAX {
                    bfs[w] = next;
                    next += 1;
                    queue.push_back(w);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by_key(|&i| (key(i), bfs[i]));
    order
}

struct Search<'a> {
    lattice: &'a Lattice,
    order: Vec<usize>,
    dim: usize,
    budget: u64,
}

/// Partial assignment: vectors for `order[..depth]`, and the number of
/// coordinates touched so far (always a prefix of `0..dim`).
#[derive(Clone)]
struct State {
    vectors: Vec<Vec<i64>>,
    used: usize,
}

enum Step {
    Found(Vec<Vec<i64>>),
    Exhausted,
    Done,
}

impl Search<'_> {
    /// All admissible vectors for the next basis element. Coordinates not
    /// yet touched are interchangeable and sign-symmetric, so on them the
    /// vector is taken positive, non-increasing and left-packed.
    fn candidates(&self, st: &State) -> Vec<(Vec<i64>, usize)> {
        let depth = st.vectors.len();
        let v = self.order[depth];
        let norm = -self.lattice.entry(v, v);
        let targets: Vec<i64> = self.order[..depth].iter().map(|&u| -self.lattice.entry(v, u)).collect();
        let mut out = Vec::new();
        let mut x = vec![0i64; self.dim];
        // suffix norms of placed vectors over used coordinates, for pruning
        let tail: Vec<Vec<i64>> = st
            .vectors
            .iter()
            .map(|w| {
                let mut t = vec![0; st.used + 1];
                for c in (0..st.used).rev() {
                    t[c] = t[c + 1] + w[c] * w[c];
                }
                t
            })
            .collect();
        let mut dots = vec![0i64; depth];
        self.fill_used(st, &tail, &targets, 0, norm, &mut x, &mut dots, &mut out);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn fill_used(
        &self,
        st: &State,
        tail: &[Vec<i64>],
        targets: &[i64],
        c: usize,
        rem: i64,
        x: &mut Vec<i64>,
        dots: &mut Vec<i64>,
        out: &mut Vec<(Vec<i64>, usize)>,
    ) {
        // Cauchy-Schwarz: the rest of the used block can move each dot
        // product by at most sqrt(rem * |w_tail|^2).
        for k in 0..st.vectors.len() {
            let gap = targets[k] - dots[k];
            if gap * gap > rem * tail[k][c] {
                return;
            }
        }
        if c == st.used {
            if dots.iter().zip(targets).all(|(d, t)| d == t) {
                self.fill_fresh(st.used, rem, i64::MAX, x, out);
            }
            return;
        }
        let bound = isqrt(rem);
        for val in (-bound..=bound).rev() {
            x[c] = val;
            for (k, w) in st.vectors.iter().enumerate() {
                dots[k] += val * w[c];
            }
            self.fill_used(st, tail, targets, c + 1, rem - val * val, x, dots, out);
            for (k, w) in st.vectors.iter().enumerate() {
                dots[k] -= val * w[c];
            }
        }
        x[c] = 0;
    }

    fn fill_fresh(&self, c: usize, rem: i64, cap: i64, x: &mut Vec<i64>, out: &mut Vec<(Vec<i64>, usize)>) {
        if rem == 0 {
            out.push((x.clone(), c));
            return;
        }
        if c == self.dim {
            return;
        }
        let top = isqrt(rem).min(cap);
        for val in (1..=top).rev() {
            x[c] = val;
            self.fill_fresh(c + 1, rem - val * val, val, x, out);
        }
        x[c] = 0;
    }

    fn dfs(&self, st: &mut State, nodes: &mut u64) -> Step {
        *nodes += 1;
        if st.vectors.len() == self.order.len() {
            return Step::Found(st.vectors.clone());
        }
        if *nodes > self.budget {
            return Step::Exhausted;
        }
        let used_before = st.used;
        for (cand, used) in self.candidates(st) {
            st.vectors.push(cand);
            st.used = used.max(used_before);
            match self.dfs(st, nodes) {
                Step::Done => {}
                other => return other,
            }
            st.vectors.pop();
            st.used = used_before;
        }
        Step::Done
    }
}

fn isqrt(n: i64) -> i64 {
    if n <= 0 {
        0
    } else {
        (n as u64).sqrt() as i64
    }
}

/// Exhaustive search for an embedding of a negative-definite lattice into
/// `(Z^N, -I)`. A found embedding is re-verified before it is returned.
pub fn embed_into_diagonal(l: &Lattice, dim: usize, opts: SearchOptions) -> Result<EmbeddingOutcome> {
    if l.rank() > 0 && definiteness(&l.gram)? != Definiteness::NegativeDefinite {
        return Err(Error::NotNegativeDefinite);
    }
    if dim < l.rank() {
        return Err(Error::InvalidParameters(format!(
            "dimension {dim} is below the lattice rank {}",
            l.rank()
        )));
    }
    let search = Search {
        lattice: l,
        order: placement_order(l),
        dim,
        budget: opts.budget,
    };

    // Expand breadth-first into a frontier of independent subtrees; the
    // frontier order is fixed, so results do not depend on scheduling.
    let mut nodes = 0u64;
    let mut frontier = vec![State {
        vectors: vec![],
        used: 0,
    }];
    while frontier.len() < 256 && frontier.first().is_some_and(|s| s.vectors.len() < search.order.len()) {
        let mut next = Vec::new();
        for st in &frontier {
            nodes += 1;
            if nodes > opts.budget {
                return Ok(EmbeddingOutcome::BudgetExhausted { nodes });
            }
            for (cand, used) in search.candidates(st) {
                let mut child = st.clone();
                child.vectors.push(cand);
                child.used = used.max(st.used);
                next.push(child);
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }

    let run = |st: &State| {
        let mut st = st.clone();
        let mut n = 0u64;
        let step = search.dfs(&mut st, &mut n);
        (step, n)
    };
    let results: Vec<(Step, u64)> = if opts.parallel {
        frontier.par_iter().map(run).collect()
    } else {
        frontier.iter().map(run).collect()
    };
    // first success in frontier order wins
    if let Some(i) = results.iter().position(|(s, _)| matches!(s, Step::Found(_))) {
        let Some((Step::Found(vectors), _)) = results.into_iter().nth(i) else {
            unreachable!()
        };
        return finish(l, &search.order, vectors);
    }
    nodes += results.iter().map(|(_, n)| n).sum::<u64>();
    if results.iter().any(|(s, _)| matches!(s, Step::Exhausted)) {
        return Ok(EmbeddingOutcome::BudgetExhausted { nodes });
    }
    Ok(EmbeddingOutcome::None {
        certificate: NoEmbeddingCertificate {
            dimension: dim,
            order: search.order,
            nodes,
        },
    })
}

fn finish(l: &Lattice, order: &[usize], placed: Vec<Vec<i64>>) -> Result<EmbeddingOutcome> {
    let mut vectors = vec![vec![]; l.rank()];
    for (k, v) in placed.into_iter().enumerate() {
        vectors[order[k]] = v;
    }
    let embedding = DiagonalEmbedding { vectors };
    if !embedding.verify(l) {
        return Err(Error::Inconsistent("embedding failed re-verification".into()));
    }
    Ok(EmbeddingOutcome::Found { embedding })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ObstructionVerdict {
    NoEmbeddingCertificate { certificate: NoEmbeddingCertificate },
    EmbeddingFound { embedding: DiagonalEmbedding },
    BudgetExhausted { nodes: u64 },
}

/// Runs the embedding search on the form of [`build_w`] in dimension
/// `rank + margin`.
pub fn donaldson_obstruction(p: u64, n: u64, margin: usize, opts: SearchOptions) -> Result<ObstructionVerdict> {
    let l = intersection_matrix(&build_w(p, n)?);
    let dim = l.rank() + margin;
    Ok(match embed_into_diagonal(&l, dim, opts)? {
        EmbeddingOutcome::Found { embedding } => ObstructionVerdict::EmbeddingFound { embedding },
        EmbeddingOutcome::None { certificate } => ObstructionVerdict::NoEmbeddingCertificate { certificate },
        EmbeddingOutcome::BudgetExhausted { nodes } => ObstructionVerdict::BudgetExhausted { nodes },
    })
}
