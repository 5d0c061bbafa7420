//! Rooted balls `V_n` of a Cayley tree, stored breadth-first.

use std::ops::Range;

use serde::Serialize;

use crate::error::{Error, Result};

/// Index of a rooted ball `V_n`.
///
/// Vertex `0` is the root. Vertices are laid out shell by shell, so
/// `W_m = shell(m)` is a contiguous range and `V_m = ball(m)` is a prefix.
/// The root has `root_degree` successors, every other non-leaf vertex has `k`.
/// Recursions use `root_degree = k`; marginals on the full Cayley tree use
/// `root_degree = k + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeIndex {
    k: usize,
    depth: usize,
    root_degree: usize,
    level_start: Vec<usize>,
}

impl TreeIndex {
    pub fn new(k: usize, depth: usize, root_degree: usize) -> Result<Self> {
        if k == 0 || root_degree == 0 {
            return Err(Error::Domain("tree needs k >= 1 and root_degree >= 1".into()));
        }
        let mut level_start = Vec::with_capacity(depth + 2);
        level_start.push(0);
        let mut width = 1usize;
        let mut total = 0usize;
        for m in 0..=depth {
            total = total
                .checked_add(width)
                .ok_or_else(|| Error::Domain(format!("tree of depth {depth} with k={k} is too large")))?;
            level_start.push(total);
            let mult = if m == 0 { root_degree } else { k };
            width = width
                .checked_mul(mult)
                .ok_or_else(|| Error::Domain(format!("tree of depth {depth} with k={k} is too large")))?;
        }
        Ok(Self { k, depth, root_degree, level_start })
    }

    /// Ball used by the recursions: every vertex, the root included, has `k` successors.
    pub fn recursion(k: usize, depth: usize) -> Result<Self> {
        Self::new(k, depth, k)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn root_degree(&self) -> usize {
        self.root_degree
    }

    pub fn len(&self) -> usize {
        self.level_start[self.depth + 1]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Vertices at distance `m` from the root.
    pub fn shell(&self, m: usize) -> Range<usize> {
        assert!(m <= self.depth, "shell {m} beyond depth {}", self.depth);
        self.level_start[m]..self.level_start[m + 1]
    }

    /// Vertices at distance at most `m` from the root.
    pub fn ball(&self, m: usize) -> Range<usize> {
        assert!(m <= self.depth, "ball {m} beyond depth {}", self.depth);
        0..self.level_start[m + 1]
    }

    pub fn level(&self, vertex: usize) -> usize {
        debug_assert!(vertex < self.len());
        self.level_start.partition_point(|&s| s <= vertex) - 1
    }

    /// Position of `vertex` inside its shell.
    pub fn position(&self, vertex: usize) -> usize {
        vertex - self.level_start[self.level(vertex)]
    }

    pub fn is_leaf(&self, vertex: usize) -> bool {
        self.level(vertex) == self.depth
    }

    /// Direct successors `S(i)`.
    pub fn children(&self, vertex: usize) -> Range<usize> {
        let m = self.level(vertex);
        if m == self.depth {
            return 0..0;
        }
        let next = self.level_start[m + 1];
        if m == 0 {
            next..next + self.root_degree
        } else {
            let pos = vertex - self.level_start[m];
            let first = next + pos * self.k;
            first..first + self.k
        }
    }

    pub fn parent(&self, vertex: usize) -> Option<usize> {
        let m = self.level(vertex);
        match m {
            0 => None,
            1 => Some(0),
            _ => {
                let pos = vertex - self.level_start[m];
                Some(self.level_start[m - 1] + pos / self.k)
            }
        }
    }

    /// Index of `vertex` among its parent's successors.
    pub fn child_rank(&self, vertex: usize) -> Option<usize> {
        let m = self.level(vertex);
        match m {
            0 => None,
            1 => Some(vertex - self.level_start[1]),
            _ => Some((vertex - self.level_start[m]) % self.k),
        }
    }

    /// Number of edges inside the ball.
    pub fn edge_count(&self) -> usize {
        self.len() - 1
    }

    /// The same tree cut at depth `n` (a prefix of the vertex ids).
    pub fn truncate(&self, n: usize) -> Result<Self> {
        if n > self.depth {
            return Err(Error::Domain(format!("cannot truncate depth {} tree at {n}", self.depth)));
        }
        Self::new(self.k, n, self.root_degree)
    }
}
