//! Rooted trees of bounded degree, truncated at a finite depth.
//!
//! Vertex `0` is the base point `o`. Every vertex above the truncation depth
//! `D` has at least one child, so each depth-`D` vertex stands for a
//! nonempty cylinder of boundary points of any infinite extension.
//!
//! Levels are stored in breadth-first order with children visited by
//! increasing id. In that order the descendants of a vertex at any deeper
//! level form a contiguous slice, which `sphere` and the cylinder code rely on.

use std::io::{BufRead, Write};
use std::ops::Range;

use crate::error::{Error, Result};

pub type Vertex = usize;

/// The base point `o`.
pub const ROOT: Vertex = 0;

/// Vertex budget used by the builders unless another limit is given.
pub const DEFAULT_VERTEX_LIMIT: usize = 1 << 22;

const NO_PARENT: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    parent: Vec<usize>,
    children: Vec<Vec<Vertex>>,
    depth: Vec<usize>,
    levels: Vec<Vec<Vertex>>,
    level_pos: Vec<usize>,
    max_depth: usize,
    q_max: usize,
}

/// An oriented edge `(ι, τ)` of the tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DirectedEdge {
    tail: Vertex,
    head: Vertex,
    away: bool,
}

impl DirectedEdge {
    /// Initial vertex `ι(e)`.
    pub fn tail(&self) -> Vertex {
        self.tail
    }

    /// Terminal vertex `τ(e)`.
    pub fn head(&self) -> Vertex {
        self.head
    }

    /// True iff the edge points away from the base point.
    pub fn points_away(&self) -> bool {
        self.away
    }

    pub fn reversed(&self) -> DirectedEdge {
        DirectedEdge {
            tail: self.head,
            head: self.tail,
            away: !self.away,
        }
    }

    /// The child endpoint; edges are indexed by it.
    pub fn child(&self) -> Vertex {
        if self.away {
            self.head
        } else {
            self.tail
        }
    }
}

impl Tree {
    /// Regular tree of degree `q + 1` truncated at depth `depth`.
    pub fn regular(q: usize, depth: usize) -> Result<Tree> {
        Self::regular_with_limit(q, depth, DEFAULT_VERTEX_LIMIT)
    }

    pub fn regular_with_limit(q: usize, depth: usize, limit: usize) -> Result<Tree> {
        if q == 0 || depth == 0 {
            return Err(Error::InvalidShape(format!(
                "regular tree needs q >= 1 and depth >= 1, got q = {q}, depth = {depth}"
            )));
        }
        let requested = regular_vertex_count(q, depth).unwrap_or(usize::MAX);
        if requested > limit {
            return Err(Error::Capacity { requested, limit });
        }
        let mut parent = Vec::with_capacity(requested);
        parent.push(NO_PARENT);
        let mut frontier: Range<usize> = 0..1;
        for level in 0..depth {
            let start = parent.len();
            for v in frontier.clone() {
                let fan = if level == 0 { q + 1 } else { q };
                parent.extend(std::iter::repeat_n(v, fan));
            }
            frontier = start..parent.len();
        }
        debug_assert_eq!(parent.len(), requested);
        Self::from_parent_vec(parent)
    }

    /// Builds a tree from `(child, parent)` pairs covering ids `1..n`.
    pub fn from_parents(pairs: &[(Vertex, Vertex)]) -> Result<Tree> {
        Self::from_parents_with_limit(pairs, DEFAULT_VERTEX_LIMIT)
    }

    pub fn from_parents_with_limit(pairs: &[(Vertex, Vertex)], limit: usize) -> Result<Tree> {
        let n = pairs.len() + 1;
        if n > limit {
            return Err(Error::Capacity {
                requested: n,
                limit,
            });
        }
        let mut parent = vec![NO_PARENT; n];
        for &(child, p) in pairs {
            if child == ROOT || child >= n {
                return Err(Error::MalformedId(child));
            }
            if parent[child] != NO_PARENT {
                return Err(Error::Duplicate(child));
            }
            if p >= child {
                return Err(Error::ForwardParent { child, parent: p });
            }
            parent[child] = p;
        }
        Self::from_parent_vec(parent)
    }

    fn from_parent_vec(parent: Vec<usize>) -> Result<Tree> {
        let n = parent.len();
        let mut children = vec![Vec::new(); n];
        let mut depth = vec![0usize; n];
        for v in 1..n {
            let p = parent[v];
            depth[v] = depth[p] + 1;
            children[p].push(v);
        }
        let max_depth = depth.iter().copied().max().unwrap_or(0);

        let mut levels: Vec<Vec<Vertex>> = vec![vec![ROOT]];
        for d in 0..max_depth {
            let next: Vec<Vertex> = levels[d]
                .iter()
                .flat_map(|&v| children[v].iter().copied())
                .collect();
            levels.push(next);
        }
        let mut level_pos = vec![0usize; n];
        for level in &levels {
            for (i, &v) in level.iter().enumerate() {
                level_pos[v] = i;
            }
        }

        let mut q_max = 0;
        for v in 0..n {
            if depth[v] < max_depth {
                if children[v].is_empty() {
                    return Err(Error::InteriorLeaf {
                        vertex: v,
                        depth: depth[v],
                        max_depth,
                    });
                }
                let degree = children[v].len() + usize::from(v != ROOT);
                q_max = q_max.max(degree - 1);
            }
        }

        Ok(Tree {
            parent,
            children,
            depth,
            levels,
            level_pos,
            max_depth,
            q_max,
        })
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn root(&self) -> Vertex {
        ROOT
    }

    /// Truncation depth `D`.
    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    /// `d(o, v)`.
    pub fn depth(&self, v: Vertex) -> usize {
        self.depth[v]
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v < self.len()
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    pub fn parent(&self, v: Vertex) -> Option<Vertex> {
        match self.parent[v] {
            NO_PARENT => None,
            p => Some(p),
        }
    }

    pub fn children(&self, v: Vertex) -> &[Vertex] {
        &self.children[v]
    }

    /// Degree in the truncated tree; exact for vertices above depth `D`.
    pub fn degree(&self, v: Vertex) -> usize {
        self.children[v].len() + usize::from(v != ROOT)
    }

    /// `q_v = deg(v) - 1`.
    pub fn branching(&self, v: Vertex) -> usize {
        self.degree(v).saturating_sub(1)
    }

    /// Largest `q_v` over vertices whose full neighbourhood is present.
    pub fn q_max(&self) -> usize {
        self.q_max
    }

    /// Vertices strictly above the truncation depth.
    pub fn is_interior(&self, v: Vertex) -> bool {
        self.depth[v] < self.max_depth
    }

    pub fn is_leaf(&self, v: Vertex) -> bool {
        self.depth[v] == self.max_depth
    }

    /// Vertices at depth `n`, in breadth-first order.
    pub fn level(&self, n: usize) -> &[Vertex] {
        &self.levels[n]
    }

    /// The depth-`D` vertices.
    pub fn leaves(&self) -> &[Vertex] {
        &self.levels[self.max_depth]
    }

    /// Index of `v` inside `level(depth(v))`.
    pub fn level_position(&self, v: Vertex) -> usize {
        self.level_pos[v]
    }

    pub fn require_leaf(&self, v: Vertex) -> Result<()> {
        self.check_vertex(v)?;
        if !self.is_leaf(v) {
            return Err(Error::WrongDepth {
                vertex: v,
                depth: self.depth[v],
                expected: self.max_depth,
            });
        }
        Ok(())
    }

    /// Ancestor of `v` at depth `d <= depth(v)`.
    pub fn ancestor_at(&self, mut v: Vertex, d: usize) -> Vertex {
        debug_assert!(d <= self.depth[v]);
        while self.depth[v] > d {
            v = self.parent[v];
        }
        v
    }

    /// True iff `a` lies on the chain `[o, v]`.
    pub fn is_ancestor_or_equal(&self, a: Vertex, v: Vertex) -> bool {
        self.depth[a] <= self.depth[v] && self.ancestor_at(v, self.depth[a]) == a
    }

    /// Deepest common vertex of `[o, x]` and `[o, v]`.
    pub fn meet(&self, x: Vertex, v: Vertex) -> Vertex {
        let d = self.depth[x].min(self.depth[v]);
        let (mut a, mut b) = (self.ancestor_at(x, d), self.ancestor_at(v, d));
        while a != b {
            a = self.parent[a];
            b = self.parent[b];
        }
        a
    }

    /// Graph distance.
    pub fn distance(&self, x: Vertex, y: Vertex) -> usize {
        let m = self.meet(x, y);
        self.depth[x] + self.depth[y] - 2 * self.depth[m]
    }

    /// The horocycle bracket `<x, ω>` for any boundary point `ω` beyond `leaf`.
    ///
    /// With `y` the branching point of the rays from `o` and `x` towards `ω`,
    /// this is `d(o, y) - d(x, y)`. Because `leaf` sits at the truncation depth
    /// (at least as deep as `x`), `y = meet(x, leaf)` and the value does not
    /// depend on which `ω` in the cylinder of `leaf` is chosen.
    pub fn horocycle_bracket(&self, x: Vertex, leaf: Vertex) -> Result<i64> {
        self.check_vertex(x)?;
        self.require_leaf(leaf)?;
        let y = self.meet(x, leaf);
        Ok(2 * self.depth[y] as i64 - self.depth[x] as i64)
    }

    /// Positions in `level(level)` of the descendants of `v` at that level.
    pub fn descendant_range(&self, v: Vertex, level: usize) -> Range<usize> {
        debug_assert!(level >= self.depth[v] && level <= self.max_depth);
        let (mut first, mut last) = (v, v);
        for _ in self.depth[v]..level {
            first = self.children[first][0];
            last = *self.children[last]
                .last()
                .expect("interior vertex has children");
        }
        self.level_pos[first]..self.level_pos[last] + 1
    }

    /// `S_k(x)`: vertices at distance `k` from `x` on the far side from `o`.
    pub fn sphere(&self, x: Vertex, k: usize) -> Result<&[Vertex]> {
        self.check_vertex(x)?;
        let level = self.depth[x] + k;
        if level > self.max_depth {
            return Err(Error::DepthOverflow {
                requested: level,
                max_depth: self.max_depth,
            });
        }
        Ok(&self.levels[level][self.descendant_range(x, level)])
    }

    /// `Some(q)` iff the root has `q + 1` children and every other interior vertex `q`.
    pub fn regular_branching(&self) -> Option<usize> {
        let q = self.children[ROOT].len().checked_sub(1)?;
        if q == 0 || self.max_depth == 0 {
            return None;
        }
        (1..self.len())
            .filter(|&v| self.is_interior(v))
            .all(|v| self.children[v].len() == q)
            .then_some(q)
    }

    pub fn require_regular(&self) -> Result<usize> {
        self.regular_branching().ok_or(Error::NonRegular)
    }

    pub fn directed_edge(&self, tail: Vertex, head: Vertex) -> Result<DirectedEdge> {
        self.check_vertex(tail)?;
        self.check_vertex(head)?;
        if self.parent(head) == Some(tail) {
            Ok(DirectedEdge {
                tail,
                head,
                away: true,
            })
        } else if self.parent(tail) == Some(head) {
            Ok(DirectedEdge {
                tail,
                head,
                away: false,
            })
        } else {
            Err(Error::NotAnEdge(tail, head))
        }
    }

    /// The edge of `Ē_o` ending in `child`.
    pub fn edge_into(&self, child: Vertex) -> Option<DirectedEdge> {
        self.parent(child).map(|tail| DirectedEdge {
            tail,
            head: child,
            away: true,
        })
    }

    /// All edges pointing away from `o`, ordered by their terminal vertex.
    pub fn edges_away(&self) -> impl Iterator<Item = DirectedEdge> + '_ {
        (1..self.len()).map(move |v| DirectedEdge {
            tail: self.parent[v],
            head: v,
            away: true,
        })
    }

    /// The chain `[o, v]`.
    pub fn path_from_root(&self, v: Vertex) -> Vec<Vertex> {
        let mut path = Vec::with_capacity(self.depth[v] + 1);
        let mut u = v;
        path.push(u);
        while let Some(p) = self.parent(u) {
            path.push(p);
            u = p;
        }
        path.reverse();
        path
    }

    /// Checks that `chain` is non-empty and each step goes from a vertex to one of its children.
    pub fn check_chain_away(&self, chain: &[Vertex]) -> Result<()> {
        let first = *chain
            .first()
            .ok_or_else(|| Error::InvalidChain("empty chain".into()))?;
        self.check_vertex(first)?;
        for pair in chain.windows(2) {
            self.check_vertex(pair[1])?;
            if self.parent(pair[1]) != Some(pair[0]) {
                return Err(Error::InvalidChain(format!(
                    "{} -> {} does not point away from the root",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(())
    }

    /// `(child, parent)` pairs in increasing child id.
    pub fn parent_pairs(&self) -> Vec<(Vertex, Vertex)> {
        (1..self.len()).map(|v| (v, self.parent[v])).collect()
    }

    /// Re-roots at a neighbour `c` of `o`.
    ///
    /// The result keeps every vertex within distance `D - 1` of `c`, so all of
    /// its leaves again sit at one depth. On the side of `c` nothing is lost; on
    /// the side of `o` the two deepest levels fall outside the new truncation.
    pub fn reroot_at_neighbor(&self, c: Vertex) -> Result<Rerooted> {
        self.check_vertex(c)?;
        if self.parent(c) != Some(ROOT) {
            return Err(Error::NotAnEdge(ROOT, c));
        }
        if self.max_depth < 2 {
            return Err(Error::InvalidShape(
                "re-rooting needs truncation depth at least 2".into(),
            ));
        }
        let new_depth_limit = self.max_depth - 1;
        let mut new_of_old = vec![None; self.len()];
        let mut old_of_new = vec![c];
        let mut parent = vec![NO_PARENT];
        let mut new_depth = vec![0usize];
        new_of_old[c] = Some(0);
        let mut head = 0;
        while head < old_of_new.len() {
            let u = old_of_new[head];
            let du = new_depth[head];
            if du < new_depth_limit {
                let neighbours = self
                    .parent(u)
                    .into_iter()
                    .chain(self.children[u].iter().copied());
                for w in neighbours {
                    if new_of_old[w].is_none() {
                        new_of_old[w] = Some(old_of_new.len());
                        old_of_new.push(w);
                        parent.push(head);
                        new_depth.push(du + 1);
                    }
                }
            }
            head += 1;
        }
        let tree = Tree::from_parent_vec(parent)?;
        Ok(Rerooted {
            tree,
            new_of_old,
            old_of_new,
        })
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "TREE {} {}", self.len(), self.max_depth)?;
        for v in 1..self.len() {
            writeln!(w, "{} {}", v, self.parent[v])?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Tree> {
        let mut lines = r.lines().enumerate();
        let (n, declared_depth) = match lines.next() {
            Some((_, line)) => {
                let line = line?;
                let tokens: Vec<&str> = line.split_ascii_whitespace().collect();
                match tokens.as_slice() {
                    ["TREE", n, d] => (
                        crate::numeric::parse_usize(n, 1)?,
                        crate::numeric::parse_usize(d, 1)?,
                    ),
                    _ => return Err(Error::parse(1, "expected `TREE <n> <D>`")),
                }
            }
            None => return Err(Error::parse(1, "empty tree file")),
        };
        if n == 0 {
            return Err(Error::parse(1, "a tree has at least one vertex"));
        }
        if n > DEFAULT_VERTEX_LIMIT {
            return Err(Error::Capacity {
                requested: n,
                limit: DEFAULT_VERTEX_LIMIT,
            });
        }
        let mut pairs = Vec::with_capacity(n - 1);
        for (idx, line) in lines {
            let line = line?;
            let lineno = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let tokens: Vec<&str> = line.split_ascii_whitespace().collect();
            let [child, parent] = tokens.as_slice() else {
                return Err(Error::parse(lineno, "expected `<child> <parent>`"));
            };
            let child = crate::numeric::parse_usize(child, lineno)?;
            let parent = crate::numeric::parse_usize(parent, lineno)?;
            if child != pairs.len() + 1 {
                return Err(Error::parse(
                    lineno,
                    format!("expected child id {}, found {child}", pairs.len() + 1),
                ));
            }
            pairs.push((child, parent));
        }
        if pairs.len() + 1 != n {
            return Err(Error::parse(
                n,
                format!("header announces {n} vertices, found {}", pairs.len() + 1),
            ));
        }
        let tree = Tree::from_parents(&pairs)?;
        if tree.max_depth != declared_depth {
            return Err(Error::parse(
                1,
                format!(
                    "header announces depth {declared_depth}, tree has depth {}",
                    tree.max_depth
                ),
            ));
        }
        Ok(tree)
    }
}

/// `1 + (q+1) (q^D - 1) / (q - 1)`, or `1 + 2D` when `q = 1`; `None` on overflow.
pub fn regular_vertex_count(q: usize, depth: usize) -> Option<usize> {
    let mut total: usize = 1;
    let mut level: usize = 1;
    for d in 0..depth {
        level = level.checked_mul(if d == 0 { q + 1 } else { q })?;
        total = total.checked_add(level)?;
    }
    Some(total)
}

/// A tree re-rooted at a neighbour of the old base point, with the id maps.
#[derive(Debug, Clone)]
pub struct Rerooted {
    pub tree: Tree,
    new_of_old: Vec<Option<Vertex>>,
    old_of_new: Vec<Vertex>,
}

impl Rerooted {
    pub fn new_id(&self, old: Vertex) -> Option<Vertex> {
        self.new_of_old.get(old).copied().flatten()
    }

    pub fn old_id(&self, new: Vertex) -> Vertex {
        self.old_of_new[new]
    }
}
