//! Boundary values of eigenfunctions: the map `β_z`, its inverse
//! propagation, the chain identity and limit recovery on regular trees.

use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measure::{same_tree, BoundaryMeasure, ClopenSet};
use crate::numeric::{format_f64, pairwise_sum, SpectralParam};
use crate::poisson::{poisson_transform, VertexFunction};
use crate::tree::{DirectedEdge, Tree, Vertex, ROOT};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A complex number per edge pointing away from `o`, indexed by the edge's child.
#[derive(Debug, Clone)]
pub struct EdgeCoefficients<'t> {
    tree: &'t Tree,
    values: Vec<Complex64>,
}

impl<'t> EdgeCoefficients<'t> {
    pub fn zero(tree: &'t Tree) -> Self {
        EdgeCoefficients {
            tree,
            values: vec![ZERO; tree.len()],
        }
    }

    /// `values[c]` is the coefficient of the edge into `c`; `values[0]` is ignored.
    pub fn new(tree: &'t Tree, mut values: Vec<Complex64>) -> Result<Self> {
        if values.len() != tree.len() {
            return Err(Error::InvalidShape(format!(
                "{} coefficients for {} vertices",
                values.len(),
                tree.len()
            )));
        }
        values[ROOT] = ZERO;
        Ok(EdgeCoefficients { tree, values })
    }

    /// The edge flow `⃗μ` restricted to edges pointing away from `o`.
    pub fn from_measure(mu: &BoundaryMeasure<'t>) -> Self {
        let tree = mu.tree();
        let mut values: Vec<Complex64> = (0..tree.len()).map(|v| mu.cylinder(v)).collect();
        values[ROOT] = ZERO;
        EdgeCoefficients { tree, values }
    }

    pub fn tree(&self) -> &'t Tree {
        self.tree
    }

    /// Coefficient of the edge ending in `child`.
    #[inline]
    pub fn at_child(&self, child: Vertex) -> Complex64 {
        self.values[child]
    }

    pub fn get(&self, e: DirectedEdge) -> Option<Complex64> {
        e.points_away().then(|| self.values[e.head()])
    }

    /// Sum over the edges leaving `v` away from `o`.
    pub fn outflow(&self, v: Vertex) -> Complex64 {
        let terms: Vec<Complex64> = self
            .tree
            .children(v)
            .iter()
            .map(|&c| self.values[c])
            .collect();
        pairwise_sum(&terms)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max |a(e) - Σ_{ι(g) = τ(e)} a(g)|` over edges with interior terminal vertex.
    pub fn compat_gap(&self) -> f64 {
        (1..self.tree.len())
            .filter(|&v| self.tree.is_interior(v))
            .map(|v| (self.values[v] - self.outflow(v)).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff_measure(&self, mu: &BoundaryMeasure<'_>) -> Result<f64> {
        if !same_tree(self.tree, mu.tree()) {
            return Err(Error::TreeMismatch);
        }
        Ok((1..self.tree.len())
            .map(|v| (self.values[v] - mu.cylinder(v)).norm())
            .fold(0.0, f64::max))
    }

    /// The measure with these edge flows.
    ///
    /// Fails when the compatibility gap exceeds `rel_tol · max(1, max |a|)`.
    pub fn to_measure(&self, rel_tol: f64) -> Result<BoundaryMeasure<'t>> {
        let gap = self.compat_gap();
        if gap > rel_tol * self.max_abs().max(1.0) {
            return Err(Error::Incompatible(gap));
        }
        let masses: Vec<_> = self
            .tree
            .leaves()
            .iter()
            .map(|&l| (l, self.values[l]))
            .collect();
        BoundaryMeasure::from_leaf_masses(self.tree, masses)
    }

    /// `EDGES <n-1>` then `<tail> <head> <re> <im>` per edge, by increasing head.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "EDGES {}", self.tree.len() - 1)?;
        for e in self.tree.edges_away() {
            let a = self.values[e.head()];
            writeln!(
                w,
                "{} {} {} {}",
                e.tail(),
                e.head(),
                format_f64(a.re),
                format_f64(a.im)
            )?;
        }
        Ok(())
    }
}

/// `β_z(f)(e) = (z f(τ(e)) - f(ι(e))) / ((z² - 1) z^{d(o, ι(e))})`.
pub fn beta<'t>(z: SpectralParam, f: &VertexFunction<'t>) -> Result<EdgeCoefficients<'t>> {
    let z = z.require_invertible()?;
    let tree = f.tree();
    let pw = z.powers(tree.max_depth())?;
    let zv = z.value();
    let denom = zv * zv - 1.0;
    let mut values = vec![ZERO; tree.len()];
    for e in tree.edges_away() {
        let (i, t) = (e.tail(), e.head());
        values[t] = (zv * f.value(t) - f.value(i)) / (denom * pw.pow(tree.depth(i) as i64));
    }
    Ok(EdgeCoefficients { tree, values })
}

/// How far `f` is from lying in the image of `P_z`.
#[derive(Debug, Clone)]
pub struct EigenReport<'t> {
    pub coefficients: EdgeCoefficients<'t>,
    /// `max |⃗μ(e) - Σ_{ι(g)=τ(e)} ⃗μ(g)|` over edges with interior `τ(e)`.
    pub compat_gap: f64,
    /// `|f(o) - Σ_{ι(e)=o} ⃗μ(e)|`.
    pub root_gap: f64,
}

impl EigenReport<'_> {
    /// Both gaps within `rel_tol` times the larger of `1`, `|f(o)|` and `max |⃗μ|`.
    pub fn passes(&self, rel_tol: f64, f_root: Complex64) -> bool {
        let scale = self.coefficients.max_abs().max(f_root.norm()).max(1.0);
        self.compat_gap <= rel_tol * scale && self.root_gap <= rel_tol * scale
    }
}

pub fn check_eigen_characterization<'t>(
    z: SpectralParam,
    f: &VertexFunction<'t>,
) -> Result<EigenReport<'t>> {
    let coefficients = beta(z, f)?;
    let compat_gap = coefficients.compat_gap();
    let root_gap = (f.value(ROOT) - coefficients.outflow(ROOT)).norm();
    Ok(EigenReport {
        coefficients,
        compat_gap,
        root_gap,
    })
}

/// `max_e |β_z(P_z μ)(e) - ⃗μ(e)|` over edges pointing away from `o`.
pub fn roundtrip_measure(z: SpectralParam, mu: &BoundaryMeasure<'_>) -> Result<f64> {
    let z = z.require_invertible()?;
    let f = poisson_transform(z, mu)?;
    beta(z, &f)?.max_abs_diff_measure(mu)
}

/// Solves `z f(τ) - f(ι) = (z² - 1) z^{d(o, ι)} a(e)` outward from `f(o) = f_root`.
pub fn reconstruct_function<'t>(
    z: SpectralParam,
    coefficients: &EdgeCoefficients<'t>,
    f_root: Complex64,
) -> Result<VertexFunction<'t>> {
    let z = z.require_invertible()?;
    let tree = coefficients.tree;
    let pw = z.powers(tree.max_depth())?;
    let zv = z.value();
    let factor = zv * zv - 1.0;
    let mut f = VertexFunction::zero(tree);
    f.set(ROOT, f_root);
    for d in 0..tree.max_depth() {
        for &p in tree.level(d) {
            let fp = f.value(p);
            let scale = factor * pw.pow(d as i64);
            for &c in tree.children(p) {
                f.set(c, (fp + scale * coefficients.values[c]) / zv);
            }
        }
    }
    Ok(f)
}

fn require_chain_param(z: SpectralParam) -> Result<SpectralParam> {
    // z² ∉ {0, 1} is the same as z ∉ {-1, 0, 1}
    z.require_invertible()
}

/// Largest deviation in the chain identity
/// `f(x_k)/z^{m+k} = f(x_0)/z^{m+2k} + (z²-1)/z² Σ_{j=1}^k z^{2(j-k)} μ(x_j)`
/// over all prefixes `x_0..x_k` of `chain`, where `m = d(o, x_0)`.
pub fn chain_formula_residual(
    z: SpectralParam,
    f: &VertexFunction<'_>,
    mu: &BoundaryMeasure<'_>,
    chain: &[Vertex],
) -> Result<f64> {
    let z = require_chain_param(z)?;
    if !same_tree(f.tree(), mu.tree()) {
        return Err(Error::TreeMismatch);
    }
    let tree = mu.tree();
    tree.check_chain_away(chain)?;
    let pw = z.powers(2 * tree.max_depth())?;
    let zv = z.value();
    let c = (zv * zv - 1.0) / (zv * zv);
    let m = tree.depth(chain[0]) as i64;
    let mut worst: f64 = 0.0;
    for k in 1..chain.len() {
        let ki = k as i64;
        let lhs = f.value(chain[k]) * pw.pow(-(m + ki));
        let terms: Vec<Complex64> = (1..=k)
            .map(|j| pw.pow(2 * (j as i64 - ki)) * mu.cylinder(chain[j]))
            .collect();
        let rhs = f.value(chain[0]) * pw.pow(-(m + 2 * ki)) + c * pairwise_sum(&terms);
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

/// [`chain_formula_residual`] with `f = P_z(μ)`.
pub fn chain_formula_check(
    z: SpectralParam,
    mu: &BoundaryMeasure<'_>,
    chain: &[Vertex],
) -> Result<f64> {
    let z = require_chain_param(z)?;
    let f = poisson_transform(z, mu)?;
    chain_formula_residual(z, &f, mu, chain)
}

/// One term of a limit-recovery sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitEntry {
    /// Step `k` for a vertex, or depth `n` for a clopen set.
    pub k: usize,
    /// `Σ f(y) / z^{d(o, y)}` over the summation set.
    pub normalized_sum: Complex64,
    /// `normalized_sum · (z² - q)/(z² - 1)`.
    pub estimate: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitSequence {
    pub entries: Vec<LimitEntry>,
}

impl LimitSequence {
    pub fn estimates(&self) -> Vec<Complex64> {
        self.entries.iter().map(|e| e.estimate).collect()
    }

    pub fn last(&self) -> Option<Complex64> {
        self.entries.last().map(|e| e.estimate)
    }

    pub fn errors(&self, target: Complex64) -> Vec<f64> {
        self.entries
            .iter()
            .map(|e| (e.estimate - target).norm())
            .collect()
    }

    /// `|e_{k+1}| / |e_k|`; `None` where `e_k = 0`.
    pub fn error_ratios(&self, target: Complex64) -> Vec<Option<f64>> {
        self.errors(target)
            .windows(2)
            .map(|w| (w[0] > 0.0).then(|| w[1] / w[0]))
            .collect()
    }
}

/// The factor `(z² - q)/(z² - 1)` after checking `q < |z|²` on a regular tree.
fn recovery_constant(tree: &Tree, z: SpectralParam) -> Result<(usize, Complex64)> {
    let q = tree.require_regular()?;
    let z = z.require_invertible()?.value();
    let z2 = z * z;
    if q as f64 >= z2.norm() {
        return Err(Error::ParameterRegime(format!(
            "limit recovery needs q < |z|^2, got q = {q}, |z|^2 = {}",
            z2.norm()
        )));
    }
    Ok((q, (z2 - q as f64) / (z2 - 1.0)))
}

fn normalized_sum(
    f: &VertexFunction<'_>,
    pw: &crate::numeric::PowerTable,
    n: usize,
    set: &[Vertex],
) -> Complex64 {
    let scale = pw.pow(-(n as i64));
    let terms: Vec<Complex64> = set.iter().map(|&y| f.value(y) * scale).collect();
    pairwise_sum(&terms)
}

/// `m_k = (z² - q)/(z² - 1) · z^{-(m+k)} Σ_{y ∈ S_k(x)} f(y)` for `k = 0..=k_max`.
///
/// Needs a regular tree, `q < |z|²`, `x ≠ o` and `d(o, x) + k_max <= D`.
pub fn limit_recover_vertex(
    z: SpectralParam,
    f: &VertexFunction<'_>,
    x: Vertex,
    k_max: usize,
) -> Result<LimitSequence> {
    let tree = f.tree();
    tree.check_vertex(x)?;
    let (_, c) = recovery_constant(tree, z)?;
    if x == ROOT {
        return Err(Error::InvalidShape(
            "limit recovery at a vertex needs x different from the root".into(),
        ));
    }
    let m = tree.depth(x);
    if m + k_max > tree.max_depth() {
        return Err(Error::DepthOverflow {
            requested: m + k_max,
            max_depth: tree.max_depth(),
        });
    }
    let pw = z.powers(tree.max_depth())?;
    let entries = (0..=k_max)
        .map(|k| {
            let s = normalized_sum(f, &pw, m + k, tree.sphere(x, k).expect("depth checked"));
            LimitEntry {
                k,
                normalized_sum: s,
                estimate: c * s,
            }
        })
        .collect();
    Ok(LimitSequence { entries })
}

/// `(z² - q)/(z² - 1) · z^{-n} Σ_{x ∈ 𝔛_n(U)} f(x)` for `n = 0..=n_max`.
///
/// Only depths below every member of `U` approximate `μ(U)`; shallower
/// entries are reported as computed.
pub fn limit_recover_clopen(
    z: SpectralParam,
    f: &VertexFunction<'_>,
    set: &ClopenSet<'_>,
    n_max: usize,
) -> Result<LimitSequence> {
    let tree = f.tree();
    if !same_tree(tree, set.tree()) {
        return Err(Error::TreeMismatch);
    }
    let (_, c) = recovery_constant(tree, z)?;
    if n_max > tree.max_depth() {
        return Err(Error::DepthOverflow {
            requested: n_max,
            max_depth: tree.max_depth(),
        });
    }
    let pw = z.powers(tree.max_depth())?;
    let entries = (0..=n_max)
        .map(|n| {
            let rays = set.rays_at_depth(n).expect("depth checked");
            let s = normalized_sum(f, &pw, n, &rays);
            LimitEntry {
                k: n,
                normalized_sum: s,
                estimate: c * s,
            }
        })
        .collect();
    Ok(LimitSequence { entries })
}
