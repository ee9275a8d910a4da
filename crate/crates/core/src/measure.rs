//! Finitely additive measures on the boundary, clopen sets and cylinder functions.
//!
//! A measure is stored through the masses of the depth-`D` cylinders. Every
//! other cylinder mass `μ(Ω_o(v))` is the sum over the leaves below `v`, so
//! additivity and the edge-flow compatibility laws hold by construction.
//! Only cylinders down to depth `D` are representable; finer clopen sets of
//! the infinite boundary are outside the model.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::{format_f64, pairwise_sum, parse_f64, parse_usize};
use crate::rng::UnitSquareSampler;
use crate::tree::{DirectedEdge, Rerooted, Tree, Vertex, ROOT};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub(crate) fn same_tree(a: &Tree, b: &Tree) -> bool {
    std::ptr::eq(a, b) || a == b
}

#[derive(Debug, Clone)]
pub struct BoundaryMeasure<'t> {
    tree: &'t Tree,
    cylinder: Vec<Complex64>,
}

impl<'t> BoundaryMeasure<'t> {
    /// Measure with the given depth-`D` cylinder masses; every leaf must appear once.
    pub fn from_leaf_masses<I>(tree: &'t Tree, masses: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vertex, Complex64)>,
    {
        let mut cylinder = vec![ZERO; tree.len()];
        let mut seen = vec![false; tree.len()];
        for (leaf, mass) in masses {
            tree.require_leaf(leaf)?;
            if std::mem::replace(&mut seen[leaf], true) {
                return Err(Error::Duplicate(leaf));
            }
            cylinder[leaf] = mass;
        }
        if let Some(&missing) = tree.leaves().iter().find(|&&l| !seen[l]) {
            return Err(Error::MissingLeaf(missing));
        }
        Ok(Self::aggregate(tree, cylinder))
    }

    /// Masses listed in the order of `tree.leaves()`.
    pub fn from_leaf_values(tree: &'t Tree, values: &[Complex64]) -> Result<Self> {
        let leaves = tree.leaves();
        if values.len() < leaves.len() {
            return Err(Error::MissingLeaf(leaves[values.len()]));
        }
        if values.len() > leaves.len() {
            return Err(Error::InvalidShape(format!(
                "{} leaf masses given for {} leaves",
                values.len(),
                leaves.len()
            )));
        }
        Self::from_leaf_masses(tree, leaves.iter().copied().zip(values.iter().copied()))
    }

    fn aggregate(tree: &'t Tree, mut cylinder: Vec<Complex64>) -> Self {
        for d in (0..tree.max_depth()).rev() {
            for &v in tree.level(d) {
                let parts: Vec<Complex64> = tree.children(v).iter().map(|&c| cylinder[c]).collect();
                cylinder[v] = pairwise_sum(&parts);
            }
        }
        BoundaryMeasure { tree, cylinder }
    }

    pub fn zero(tree: &'t Tree) -> Self {
        BoundaryMeasure {
            tree,
            cylinder: vec![ZERO; tree.len()],
        }
    }

    /// Point mass at the boundary points beyond `leaf`.
    pub fn dirac(tree: &'t Tree, leaf: Vertex) -> Result<Self> {
        tree.require_leaf(leaf)?;
        let mut cylinder = vec![ZERO; tree.len()];
        for v in tree.path_from_root(leaf) {
            cylinder[v] = Complex64::new(1.0, 0.0);
        }
        Ok(BoundaryMeasure { tree, cylinder })
    }

    /// The rotation invariant probability measure around `center` on a regular tree.
    ///
    /// Its flow through an edge pointing away from `center` is
    /// `q^{-d(center, ι(e))} / (q + 1)`, and `1` minus the flow of the reverse
    /// edge otherwise.
    pub fn rotation_invariant(tree: &'t Tree, center: Vertex) -> Result<Self> {
        let q = tree.require_regular()?;
        tree.check_vertex(center)?;
        let qf = q as f64;
        let away = |d: usize| qf.powi(-(d as i32)) / (qf + 1.0);
        let masses = tree.leaves().iter().map(|&leaf| {
            let parent = tree
                .parent(leaf)
                .expect("leaves of a regular tree have parents");
            let mass = if leaf == center {
                1.0 - away(0)
            } else {
                away(tree.distance(center, parent))
            };
            (leaf, Complex64::new(mass, 0.0))
        });
        Self::from_leaf_masses(tree, masses.collect::<Vec<_>>())
    }

    /// Leaf masses drawn from [`UnitSquareSampler`], leaves taken in increasing id.
    pub fn random(tree: &'t Tree, seed: u64) -> Self {
        let mut sampler = UnitSquareSampler::new(seed);
        let mut leaves = tree.leaves().to_vec();
        leaves.sort_unstable();
        let masses: Vec<_> = leaves
            .into_iter()
            .map(|l| (l, sampler.next_complex()))
            .collect();
        Self::from_leaf_masses(tree, masses).expect("every leaf assigned")
    }

    pub fn tree(&self) -> &'t Tree {
        self.tree
    }

    /// `μ(Ω_o(v))`.
    #[inline]
    pub fn cylinder(&self, v: Vertex) -> Complex64 {
        self.cylinder[v]
    }

    /// `μ(Ω)`.
    pub fn total(&self) -> Complex64 {
        self.cylinder[ROOT]
    }

    /// `(leaf, mass)` in the order of `tree.leaves()`.
    pub fn leaf_masses(&self) -> impl Iterator<Item = (Vertex, Complex64)> + '_ {
        self.tree
            .leaves()
            .iter()
            .map(move |&l| (l, self.cylinder[l]))
    }

    /// `⃗μ(e) = μ(∂₊e)`, the mass of the boundary points reached through `e`.
    pub fn edge_flow(&self, e: DirectedEdge) -> Complex64 {
        if e.points_away() {
            self.cylinder[e.head()]
        } else {
            self.total() - self.cylinder[e.tail()]
        }
    }

    pub fn evaluate(&self, set: &ClopenSet<'_>) -> Result<Complex64> {
        if !same_tree(self.tree, set.tree) {
            return Err(Error::TreeMismatch);
        }
        let parts: Vec<Complex64> = set.members.iter().map(|&v| self.cylinder[v]).collect();
        Ok(pairwise_sum(&parts))
    }

    /// `∫ p dμ` for a function constant on the cylinders of one level.
    pub fn pair(&self, p: &CylinderFunction<'_>) -> Result<Complex64> {
        if !same_tree(self.tree, p.tree) {
            return Err(Error::TreeMismatch);
        }
        let terms: Vec<Complex64> = self
            .tree
            .level(p.level)
            .iter()
            .zip(&p.values)
            .map(|(&v, &value)| value * self.cylinder[v])
            .collect();
        Ok(pairwise_sum(&terms))
    }

    /// `a·self + b·other`.
    pub fn linear_combination(
        &self,
        a: Complex64,
        other: &BoundaryMeasure<'_>,
        b: Complex64,
    ) -> Result<Self> {
        if !same_tree(self.tree, other.tree) {
            return Err(Error::TreeMismatch);
        }
        let masses: Vec<_> = self
            .leaf_masses()
            .map(|(l, m)| (l, a * m + b * other.cylinder[l]))
            .collect();
        Self::from_leaf_masses(self.tree, masses)
    }

    /// The same measure seen from a neighbouring base point.
    ///
    /// Leaf masses of the re-rooted tree are read off the edge flow of `self`,
    /// including flows through edges that point towards the old base point.
    pub fn reroot<'s>(&self, rerooted: &'s Rerooted) -> BoundaryMeasure<'s> {
        let tree = &rerooted.tree;
        let masses: Vec<_> = tree
            .leaves()
            .iter()
            .map(|&u| {
                let pu = tree.parent(u).expect("re-rooted trees have depth >= 1");
                let e = self
                    .tree
                    .directed_edge(rerooted.old_id(pu), rerooted.old_id(u))
                    .expect("re-rooting preserves adjacency");
                (u, self.edge_flow(e))
            })
            .collect();
        BoundaryMeasure::from_leaf_masses(tree, masses).expect("every leaf assigned")
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "MEASURE {}", self.tree.max_depth())?;
        let mut leaves = self.tree.leaves().to_vec();
        leaves.sort_unstable();
        for l in leaves {
            let m = self.cylinder[l];
            writeln!(w, "{} {} {}", l, format_f64(m.re), format_f64(m.im))?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(tree: &'t Tree, r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty measure file"))??;
        let tokens: Vec<&str> = header.split_ascii_whitespace().collect();
        let depth = match tokens.as_slice() {
            ["MEASURE", d] => parse_usize(d, 1)?,
            _ => return Err(Error::parse(1, "expected `MEASURE <D>`")),
        };
        if depth != tree.max_depth() {
            return Err(Error::parse(
                1,
                format!(
                    "measure depth {depth} does not match tree depth {}",
                    tree.max_depth()
                ),
            ));
        }
        let mut masses = Vec::new();
        for (idx, line) in lines.enumerate() {
            let line = line?;
            let lineno = idx + 2;
            if line.trim().is_empty() {
                continue;
            }
            let tokens: Vec<&str> = line.split_ascii_whitespace().collect();
            let [id, re, im] = tokens.as_slice() else {
                return Err(Error::parse(lineno, "expected `<leaf_id> <re> <im>`"));
            };
            let leaf = parse_usize(id, lineno)?;
            masses.push((
                leaf,
                Complex64::new(parse_f64(re, lineno)?, parse_f64(im, lineno)?),
            ));
        }
        Self::from_leaf_masses(tree, masses)
    }
}

/// A finite union of cylinders `Ω_o(v)`, kept as its maximal antichain.
#[derive(Debug, Clone)]
pub struct ClopenSet<'t> {
    tree: &'t Tree,
    members: Vec<Vertex>,
}

impl PartialEq for ClopenSet<'_> {
    fn eq(&self, other: &Self) -> bool {
        same_tree(self.tree, other.tree) && self.members == other.members
    }
}

impl<'t> ClopenSet<'t> {
    /// Union of the cylinders of `vertices`, brought into canonical form.
    pub fn new<I: IntoIterator<Item = Vertex>>(tree: &'t Tree, vertices: I) -> Result<Self> {
        let mut marked = vec![false; tree.len()];
        for v in vertices {
            tree.check_vertex(v)?;
            marked[v] = true;
        }
        Ok(Self::canonical(tree, marked))
    }

    pub fn empty(tree: &'t Tree) -> Self {
        ClopenSet {
            tree,
            members: Vec::new(),
        }
    }

    pub fn whole(tree: &'t Tree) -> Self {
        ClopenSet {
            tree,
            members: vec![ROOT],
        }
    }

    pub fn cylinder(tree: &'t Tree, v: Vertex) -> Result<Self> {
        Self::new(tree, [v])
    }

    // Drops members below other members, then replaces complete sibling
    // groups by their parent, deepest level first.
    fn canonical(tree: &'t Tree, marked: Vec<bool>) -> Self {
        let mut in_set = vec![false; tree.len()];
        let mut covered = vec![false; tree.len()];
        for d in 0..=tree.max_depth() {
            for &v in tree.level(d) {
                let above = tree.parent(v).is_some_and(|p| covered[p]);
                covered[v] = above || marked[v];
                in_set[v] = marked[v] && !above;
            }
        }
        for d in (0..tree.max_depth()).rev() {
            for &w in tree.level(d) {
                let kids = tree.children(w);
                if kids.iter().all(|&c| in_set[c]) {
                    for &c in kids {
                        in_set[c] = false;
                    }
                    in_set[w] = true;
                }
            }
        }
        let members = (0..tree.len()).filter(|&v| in_set[v]).collect();
        ClopenSet { tree, members }
    }

    pub fn tree(&self) -> &'t Tree {
        self.tree
    }

    /// The maximal antichain, sorted by vertex id.
    pub fn members(&self) -> &[Vertex] {
        &self.members
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_whole(&self) -> bool {
        self.members == [ROOT]
    }

    /// True iff `Ω_o(v)` is contained in the set.
    pub fn covers(&self, v: Vertex) -> bool {
        self.members
            .iter()
            .any(|&m| self.tree.is_ancestor_or_equal(m, v))
    }

    fn check_same(&self, other: &ClopenSet<'_>) -> Result<()> {
        if same_tree(self.tree, other.tree) {
            Ok(())
        } else {
            Err(Error::TreeMismatch)
        }
    }

    pub fn union(&self, other: &ClopenSet<'_>) -> Result<Self> {
        self.check_same(other)?;
        Self::new(
            self.tree,
            self.members.iter().chain(&other.members).copied(),
        )
    }

    pub fn intersection(&self, other: &ClopenSet<'_>) -> Result<Self> {
        self.check_same(other)?;
        let deeper = self
            .members
            .iter()
            .filter(|&&v| other.covers(v))
            .chain(other.members.iter().filter(|&&v| self.covers(v)))
            .copied();
        Self::new(self.tree, deeper)
    }

    pub fn complement(&self) -> Self {
        let marked = (0..self.tree.len())
            .map(|v| self.tree.is_leaf(v) && !self.covers(v))
            .collect();
        Self::canonical(self.tree, marked)
    }

    pub fn is_disjoint(&self, other: &ClopenSet<'_>) -> Result<bool> {
        Ok(self.intersection(other)?.is_empty())
    }

    /// `𝔛_n(U)`: depth-`n` vertices lying on some ray from `o` into the set.
    pub fn rays_at_depth(&self, n: usize) -> Result<Vec<Vertex>> {
        if n > self.tree.max_depth() {
            return Err(Error::DepthOverflow {
                requested: n,
                max_depth: self.tree.max_depth(),
            });
        }
        Ok(self
            .tree
            .level(n)
            .iter()
            .copied()
            .filter(|&x| {
                self.members.iter().any(|&m| {
                    self.tree.is_ancestor_or_equal(m, x) || self.tree.is_ancestor_or_equal(x, m)
                })
            })
            .collect())
    }
}

/// A boundary function constant on each cylinder `Ω_o(v)` with `d(o, v) = level`.
#[derive(Debug, Clone)]
pub struct CylinderFunction<'t> {
    tree: &'t Tree,
    level: usize,
    values: Vec<Complex64>,
}

impl<'t> CylinderFunction<'t> {
    /// Values in the order of `tree.level(level)`.
    pub fn new(tree: &'t Tree, level: usize, values: Vec<Complex64>) -> Result<Self> {
        if level > tree.max_depth() {
            return Err(Error::DepthOverflow {
                requested: level,
                max_depth: tree.max_depth(),
            });
        }
        if values.len() != tree.level(level).len() {
            return Err(Error::InvalidShape(format!(
                "level {level} has {} vertices, got {} values",
                tree.level(level).len(),
                values.len()
            )));
        }
        Ok(CylinderFunction {
            tree,
            level,
            values,
        })
    }

    pub fn from_fn(tree: &'t Tree, level: usize, f: impl Fn(Vertex) -> Complex64) -> Result<Self> {
        if level > tree.max_depth() {
            return Err(Error::DepthOverflow {
                requested: level,
                max_depth: tree.max_depth(),
            });
        }
        let values = tree.level(level).iter().map(|&v| f(v)).collect();
        Self::new(tree, level, values)
    }

    pub fn constant(tree: &'t Tree, level: usize, c: Complex64) -> Result<Self> {
        Self::from_fn(tree, level, |_| c)
    }

    /// `1_{Ω_o(v)}` written at `level >= d(o, v)`.
    pub fn indicator(tree: &'t Tree, level: usize, v: Vertex) -> Result<Self> {
        tree.check_vertex(v)?;
        if tree.depth(v) > level {
            return Err(Error::WrongDepth {
                vertex: v,
                depth: tree.depth(v),
                expected: level,
            });
        }
        Self::from_fn(tree, level, |u| {
            if tree.is_ancestor_or_equal(v, u) {
                Complex64::new(1.0, 0.0)
            } else {
                ZERO
            }
        })
    }

    /// Indicator of a clopen set whose members all sit at depth `<= level`.
    pub fn indicator_of(set: &ClopenSet<'t>, level: usize) -> Result<Self> {
        let tree = set.tree;
        if let Some(&deep) = set.members.iter().find(|&&m| tree.depth(m) > level) {
            return Err(Error::WrongDepth {
                vertex: deep,
                depth: tree.depth(deep),
                expected: level,
            });
        }
        Self::from_fn(tree, level, |u| {
            if set.covers(u) {
                Complex64::new(1.0, 0.0)
            } else {
                ZERO
            }
        })
    }

    pub fn tree(&self) -> &'t Tree {
        self.tree
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Value on the cylinder of the level-`level` ancestor of `v`; needs `d(o, v) >= level`.
    pub fn value_at(&self, v: Vertex) -> Complex64 {
        let a = self.tree.ancestor_at(v, self.level);
        self.values[self.tree.level_position(a)]
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn linear_combination(
        &self,
        a: Complex64,
        other: &CylinderFunction<'_>,
        b: Complex64,
    ) -> Result<Self> {
        if !same_tree(self.tree, other.tree) || self.level != other.level {
            return Err(Error::TreeMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&x, &y)| a * x + b * y)
            .collect();
        Self::new(self.tree, self.level, values)
    }
}

/// Distinct values of `p` with the clopen preimage of each.
pub fn level_sets<'t>(p: &CylinderFunction<'t>) -> Vec<(Complex64, ClopenSet<'t>)> {
    let mut groups: HashMap<(u64, u64), (Complex64, Vec<Vertex>)> = HashMap::new();
    let mut order = Vec::new();
    for (&v, &value) in p.tree.level(p.level).iter().zip(&p.values) {
        let key = (value.re.to_bits(), value.im.to_bits());
        groups
            .entry(key)
            .or_insert_with(|| {
                order.push(key);
                (value, Vec::new())
            })
            .1
            .push(v);
    }
    order
        .into_iter()
        .map(|key| {
            let (value, vertices) = groups.remove(&key).expect("key recorded");
            let set = ClopenSet::new(p.tree, vertices).expect("level vertices are valid");
            (value, set)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn zero_and_uniform_masses() {
        let t = Tree::regular(2, 3).unwrap();
        let zero = BoundaryMeasure::from_leaf_values(&t, &[ZERO; 12]).unwrap();
        assert!((0..t.len()).all(|v| zero.cylinder(v) == ZERO));

        let uniform = BoundaryMeasure::from_leaf_values(&t, &[c(1.0 / 12.0); 12]).unwrap();
        assert_abs_diff_eq!(uniform.total().re, 1.0, epsilon = 1e-15);
        for &v in t.level(1) {
            assert_abs_diff_eq!(uniform.cylinder(v).re, 1.0 / 3.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn missing_and_bad_leaves() {
        let t = Tree::regular(2, 2).unwrap();
        let leaves = t.leaves();
        let partial: Vec<_> = leaves[1..].iter().map(|&l| (l, c(1.0))).collect();
        assert!(matches!(
            BoundaryMeasure::from_leaf_masses(&t, partial),
            Err(Error::MissingLeaf(l)) if l == leaves[0]
        ));
        assert!(matches!(
            BoundaryMeasure::from_leaf_masses(&t, [(1, c(1.0))]),
            Err(Error::WrongDepth { .. })
        ));
        let dup: Vec<_> = leaves
            .iter()
            .map(|&l| (l, c(1.0)))
            .chain([(leaves[0], c(2.0))])
            .collect();
        assert!(matches!(
            BoundaryMeasure::from_leaf_masses(&t, dup),
            Err(Error::Duplicate(_))
        ));
    }

    #[test]
    fn dirac_support() {
        let t = Tree::regular(2, 3).unwrap();
        let leaf = t.leaves()[7];
        let mu = BoundaryMeasure::dirac(&t, leaf).unwrap();
        assert_eq!(mu.total(), c(1.0));
        for v in 0..t.len() {
            let expected = if t.is_ancestor_or_equal(v, leaf) {
                1.0
            } else {
                0.0
            };
            assert_eq!(mu.cylinder(v), c(expected));
        }
        assert!(BoundaryMeasure::dirac(&t, 1).is_err());
    }

    #[test]
    fn dirac_edge_flows() {
        let t = Tree::regular(2, 3).unwrap();
        let leaf = t.leaves()[7];
        let mu = BoundaryMeasure::dirac(&t, leaf).unwrap();
        let path = t.path_from_root(leaf);
        let on_path = t.directed_edge(path[0], path[1]).unwrap();
        assert_eq!(mu.edge_flow(on_path), c(1.0));
        assert_eq!(mu.edge_flow(on_path.reversed()), c(0.0));
        let off = t.children(ROOT).iter().find(|&&x| x != path[1]).unwrap();
        let off_path = t.directed_edge(ROOT, *off).unwrap();
        assert_eq!(mu.edge_flow(off_path), c(0.0));
        assert_eq!(mu.edge_flow(off_path.reversed()), c(1.0));
    }

    #[test]
    fn rotation_invariant_flows() {
        let t = Tree::regular(2, 4).unwrap();
        let mu = BoundaryMeasure::rotation_invariant(&t, ROOT).unwrap();
        assert_abs_diff_eq!(mu.total().re, 1.0, epsilon = 1e-14);
        let root_edge = t.edge_into(t.level(1)[0]).unwrap();
        assert_abs_diff_eq!(mu.edge_flow(root_edge).re, 1.0 / 3.0, epsilon = 1e-15);
        let depth1_edge = t.edge_into(t.level(2)[0]).unwrap();
        assert_abs_diff_eq!(mu.edge_flow(depth1_edge).re, 1.0 / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn rotation_invariant_off_center_matches_closed_form() {
        let t = Tree::regular(3, 4).unwrap();
        let q = 3.0f64;
        for center in [ROOT, 2, t.level(2)[5], t.level(4)[17]] {
            let mu = BoundaryMeasure::rotation_invariant(&t, center).unwrap();
            assert_abs_diff_eq!(mu.total().re, 1.0, epsilon = 1e-13);
            for v in 1..t.len() {
                let e = t.edge_into(v).unwrap();
                for edge in [e, e.reversed()] {
                    let (i, tau) = (edge.tail(), edge.head());
                    let away = t.distance(center, tau) == t.distance(center, i) + 1;
                    let expected = if away {
                        q.powi(-(t.distance(center, i) as i32)) / (q + 1.0)
                    } else {
                        1.0 - q.powi(-(t.distance(center, tau) as i32)) / (q + 1.0)
                    };
                    assert_abs_diff_eq!(mu.edge_flow(edge).re, expected, epsilon = 1e-13);
                }
            }
        }
        let irregular = Tree::from_parents(&[(1, 0), (2, 0), (3, 1), (4, 2), (5, 2)]).unwrap();
        assert!(matches!(
            BoundaryMeasure::rotation_invariant(&irregular, ROOT),
            Err(Error::NonRegular)
        ));
    }

    #[test]
    fn clopen_canonical_form() {
        let t = Tree::regular(2, 3).unwrap();
        let kids = t.children(1).to_vec();
        let merged = ClopenSet::new(&t, kids.iter().copied()).unwrap();
        assert_eq!(merged.members(), &[1]);
        // a member and its descendant collapse to the member
        let grandchild = t.children(kids[0])[0];
        let s = ClopenSet::new(&t, [kids[0], grandchild]).unwrap();
        assert_eq!(s.members(), &[kids[0]]);
        // all root children merge into the whole boundary
        let all = ClopenSet::new(&t, t.children(ROOT).iter().copied()).unwrap();
        assert!(all.is_whole());
        assert!(ClopenSet::new(&t, [999]).is_err());
    }

    #[test]
    fn clopen_set_algebra() {
        let t = Tree::regular(2, 3).unwrap();
        let a = ClopenSet::new(&t, [1, t.level(2)[4]]).unwrap();
        let b = ClopenSet::new(&t, [t.level(2)[0], 3]).unwrap();
        let inter = a.intersection(&b).unwrap();
        assert_eq!(inter.members(), &[t.level(2)[0], t.level(2)[4]]);
        let union = a.union(&b).unwrap();
        let comp = union.complement();
        assert!(comp.is_disjoint(&union).unwrap());
        assert!(comp.union(&union).unwrap().is_whole());
        assert!(ClopenSet::whole(&t).complement().is_empty());
    }

    #[test]
    fn evaluate_examples() {
        let t = Tree::regular(2, 3).unwrap();
        let mu = BoundaryMeasure::random(&t, 7);
        assert_eq!(mu.evaluate(&ClopenSet::whole(&t)).unwrap(), mu.total());
        assert_eq!(mu.evaluate(&ClopenSet::empty(&t)).unwrap(), ZERO);
        let v = t.level(2)[3];
        assert_eq!(
            mu.evaluate(&ClopenSet::cylinder(&t, v).unwrap()).unwrap(),
            mu.cylinder(v)
        );
    }

    #[test]
    fn pair_examples() {
        let t = Tree::regular(2, 3).unwrap();
        let mu = BoundaryMeasure::random(&t, 11);
        let one = CylinderFunction::constant(&t, 2, c(1.0)).unwrap();
        assert_abs_diff_eq!(
            (mu.pair(&one).unwrap() - mu.total()).norm(),
            0.0,
            epsilon = 1e-13
        );
        let v = t.level(1)[2];
        let ind = CylinderFunction::indicator(&t, 3, v).unwrap();
        assert_abs_diff_eq!(
            (mu.pair(&ind).unwrap() - mu.cylinder(v)).norm(),
            0.0,
            epsilon = 1e-13
        );
    }

    #[test]
    fn level_sets_reassemble_pairing() {
        let t = Tree::regular(3, 3).unwrap();
        let mu = BoundaryMeasure::random(&t, 3);
        let p = CylinderFunction::from_fn(&t, 2, |v| c((v % 3) as f64)).unwrap();
        let grouped: Complex64 = level_sets(&p)
            .iter()
            .map(|(value, set)| value * mu.evaluate(set).unwrap())
            .sum();
        assert_abs_diff_eq!(
            (grouped - mu.pair(&p).unwrap()).norm(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn rays_at_depth() {
        let t = Tree::regular(2, 3).unwrap();
        let v = t.level(2)[1];
        let u = ClopenSet::cylinder(&t, v).unwrap();
        assert_eq!(u.rays_at_depth(0).unwrap(), vec![ROOT]);
        assert_eq!(u.rays_at_depth(1).unwrap(), vec![t.parent(v).unwrap()]);
        assert_eq!(u.rays_at_depth(2).unwrap(), vec![v]);
        assert_eq!(
            u.rays_at_depth(3).unwrap(),
            t.sphere(v, 1).unwrap().to_vec()
        );
        assert!(ClopenSet::empty(&t).rays_at_depth(2).unwrap().is_empty());
    }

    #[test]
    fn measure_file_round_trip() {
        let t = Tree::regular(2, 3).unwrap();
        let mu = BoundaryMeasure::random(&t, 99)
            .linear_combination(Complex64::new(0.1, -3.0), &BoundaryMeasure::zero(&t), ZERO)
            .unwrap();
        let mut buf = Vec::new();
        mu.write_to(&mut buf).unwrap();
        let back = BoundaryMeasure::read_from(&t, buf.as_slice()).unwrap();
        for (a, b) in mu.leaf_masses().zip(back.leaf_masses()) {
            assert_eq!(a.1.re.to_bits(), b.1.re.to_bits());
            assert_eq!(a.1.im.to_bits(), b.1.im.to_bits());
        }
        let mut again = Vec::new();
        back.write_to(&mut again).unwrap();
        assert_eq!(buf, again);
        assert!(BoundaryMeasure::read_from(&t, "MEASURE 2\n".as_bytes()).is_err());
        assert!(matches!(
            BoundaryMeasure::read_from(&t, "MEASURE 3\n".as_bytes()),
            Err(Error::MissingLeaf(_))
        ));
    }
}
