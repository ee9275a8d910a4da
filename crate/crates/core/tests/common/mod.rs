//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls the library's transform, bracket or seminorm code; the
//! tree is only used for its parent pointers, depths and level lists.

#![allow(dead_code)]

use tree_poisson::{BoundaryMeasure, Complex64, Tree, Vertex};

/// `[o, v]` by walking parent pointers.
pub fn root_path(tree: &Tree, v: Vertex) -> Vec<Vertex> {
    let mut path = vec![v];
    let mut u = v;
    while let Some(p) = tree.parent(u) {
        path.push(p);
        u = p;
    }
    path.reverse();
    path
}

/// Deepest common vertex of `[o, a]` and `[o, b]` by comparing root paths.
pub fn common_vertex(tree: &Tree, a: Vertex, b: Vertex) -> Vertex {
    let (pa, pb) = (root_path(tree, a), root_path(tree, b));
    let mut last = pa[0];
    for (x, y) in pa.iter().zip(&pb) {
        if x != y {
            break;
        }
        last = *x;
    }
    last
}

/// `d(o, y) - d(x, y)` with `y` the branching vertex towards `leaf`.
pub fn bracket(tree: &Tree, x: Vertex, leaf: Vertex) -> i32 {
    let y = common_vertex(tree, x, leaf);
    let dy = tree.depth(y) as i32;
    dy - (tree.depth(x) as i32 - dy)
}

/// Graph distance by breadth-first search over the undirected edges.
pub fn bfs_distance(tree: &Tree, a: Vertex, b: Vertex) -> usize {
    let mut dist = vec![usize::MAX; tree.len()];
    let mut queue = std::collections::VecDeque::from([a]);
    dist[a] = 0;
    while let Some(u) = queue.pop_front() {
        let next = tree
            .parent(u)
            .into_iter()
            .chain(tree.children(u).iter().copied());
        for w in next {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    dist[b]
}

/// `Σ_ℓ z^{<x,ℓ>} μ(Ω_o(ℓ))` leaf by leaf.
pub fn transform(z: Complex64, mu: &BoundaryMeasure<'_>) -> Vec<Complex64> {
    let tree = mu.tree();
    let paths: Vec<Vec<Vertex>> = (0..tree.len()).map(|v| root_path(tree, v)).collect();
    let masses: Vec<(Vertex, Complex64)> = mu.leaf_masses().collect();
    (0..tree.len())
        .map(|x| {
            let px = &paths[x];
            masses
                .iter()
                .map(|&(l, m)| {
                    let shared = px.iter().zip(&paths[l]).take_while(|(a, b)| a == b).count();
                    let dy = shared as i32 - 1;
                    let b = dy - (px.len() as i32 - 1 - dy);
                    z.powi(b) * m
                })
                .sum()
        })
        .collect()
}

/// `(z f(τ) - f(ι)) / ((z²-1) z^{d(o,ι)})` indexed by `τ`.
pub fn beta(tree: &Tree, z: Complex64, f: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); tree.len()];
    for t in 1..tree.len() {
        let i = tree.parent(t).unwrap();
        out[t] = (z * f[t] - f[i]) / ((z * z - 1.0) * z.powi(tree.depth(i) as i32));
    }
    out
}

/// Mass of the leaves below `v`, summed leaf by leaf.
pub fn cylinder_mass(mu: &BoundaryMeasure<'_>, v: Vertex) -> Complex64 {
    let tree = mu.tree();
    mu.leaf_masses()
        .filter(|&(l, _)| root_path(tree, l).contains(&v))
        .map(|(_, m)| m)
        .sum()
}

/// `max |p(u) - p(v)| / ϑ^{d(o, meet)}` over all pairs of level vertices.
pub fn seminorm(tree: &Tree, theta: f64, level: usize, values: &[Complex64]) -> f64 {
    let vs = tree.level(level);
    let mut best: f64 = 0.0;
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            let d = tree.depth(common_vertex(tree, vs[i], vs[j]));
            best = best.max((values[i] - values[j]).norm() / theta.powi(d as i32));
        }
    }
    best
}

/// Depth-`n` vertices comparable with some member.
pub fn rays_at_depth(tree: &Tree, members: &[Vertex], n: usize) -> Vec<Vertex> {
    tree.level(n)
        .iter()
        .copied()
        .filter(|&x| {
            let px = root_path(tree, x);
            members.iter().any(|&m| {
                let pm = root_path(tree, m);
                pm.contains(&x) || px.contains(&m)
            })
        })
        .collect()
}

/// A random tree with 1..=max_children children per interior vertex.
pub fn random_tree(seed: u64, depth: usize, max_children: usize) -> Tree {
    let mut s = tree_poisson::UnitSquareSampler::new(seed);
    let mut pairs = Vec::new();
    let mut frontier = vec![0usize];
    let mut next = 1usize;
    for _ in 0..depth {
        let mut new_frontier = Vec::new();
        for &p in &frontier {
            let k = 1 + s.next_index(max_children);
            for _ in 0..k {
                pairs.push((next, p));
                new_frontier.push(next);
                next += 1;
            }
        }
        frontier = new_frontier;
    }
    Tree::from_parents(&pairs).unwrap()
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
