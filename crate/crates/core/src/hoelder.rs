//! Boundary metrics, Hölder norms of cylinder functions, growth envelopes
//! and the extension of measures to Hölder functions.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::boundary::check_eigen_characterization;
use crate::error::{Error, Result};
use crate::measure::{same_tree, BoundaryMeasure, CylinderFunction};
use crate::numeric::{pairwise_sum, SpectralParam};
use crate::poisson::VertexFunction;
use crate::rng::UnitSquareSampler;
use crate::tree::{Tree, Vertex};

/// The Hölder exponent base `ϑ ∈ (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theta(f64);

impl Theta {
    pub fn new(theta: f64) -> Result<Self> {
        if theta > 0.0 && theta < 1.0 {
            Ok(Theta(theta))
        } else {
            Err(Error::InvalidTheta(theta))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `d_{o,ϑ}(ω₁, ω₂) = ϑ^{d(o, meet)}` for boundary points beyond two leaves.
///
/// Equal leaves get distance `0`: the truncation cannot separate points of one cylinder.
pub fn boundary_distance(tree: &Tree, theta: Theta, a: Vertex, b: Vertex) -> Result<f64> {
    tree.require_leaf(a)?;
    tree.require_leaf(b)?;
    if a == b {
        return Ok(0.0);
    }
    let d = tree.depth(tree.meet(a, b));
    Ok(theta.0.powi(d as i32))
}

/// `|p|_{o,ϑ}`, the smallest Lipschitz constant of `p` for `d_{o,ϑ}`.
///
/// Pairs of level vertices are grouped by their meet `w`: they come from two
/// different child subtrees of `w`, and their distance is `ϑ^{d(o,w)}`.
pub fn lipschitz_seminorm(theta: Theta, p: &CylinderFunction<'_>) -> f64 {
    let tree = p.tree();
    let level = p.level();
    let values = p.values();
    (0..level)
        .flat_map(|d| tree.level(d).iter().copied())
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|w| {
            let ranges: Vec<_> = tree
                .children(w)
                .iter()
                .map(|&c| tree.descendant_range(c, level))
                .collect();
            let mut spread: f64 = 0.0;
            for (i, ri) in ranges.iter().enumerate() {
                for rj in &ranges[i + 1..] {
                    for a in &values[ri.clone()] {
                        for b in &values[rj.clone()] {
                            spread = spread.max((a - b).norm());
                        }
                    }
                }
            }
            spread * theta.0.powi(-(tree.depth(w) as i32))
        })
        .reduce(|| 0.0, f64::max)
}

/// `‖p‖_{o,ϑ} = |p|_{o,ϑ} + ‖p‖_∞`.
pub fn hoelder_norm(theta: Theta, p: &CylinderFunction<'_>) -> f64 {
    lipschitz_seminorm(theta, p) + p.sup_norm()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvelopeKind {
    /// `|μ(Ω_o(v))| ≤ C K^{d(o,v)}`.
    Measure,
    /// `|f(x)| ≤ B G^{d(o,x)}`.
    Function,
}

/// A fitted bound `scale · rate^{depth}` on the magnitudes of a level-indexed family.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthEnvelope {
    pub kind: EnvelopeKind,
    /// `C` or `B`.
    pub scale: f64,
    /// `K` or `G`.
    pub rate: f64,
    /// Largest magnitude on each level.
    pub level_max: Vec<f64>,
    /// The rate needed for levels `0..=n`.
    pub running_rate: Vec<f64>,
}

fn smallest_rate(scale: f64, n: usize, target: f64) -> f64 {
    if target <= 0.0 {
        return 0.0;
    }
    let n = n as i32;
    let mut r = (target / scale).powf(1.0 / n as f64);
    while scale * r.powi(n) < target {
        r = r.next_up();
    }
    loop {
        let below = r.next_down();
        if below > 0.0 && scale * below.powi(n) >= target {
            r = below;
        } else {
            return r;
        }
    }
}

impl GrowthEnvelope {
    /// Fits `scale · rate^n ≥ a_n` for the level maxima `a_n`.
    ///
    /// The scale is `a_0` (or `max a_n` when `a_0 = 0`), which makes the rate
    /// invariant under rescaling; the rate is the smallest double that works
    /// on every level. An all-zero family gets scale `0` and rate `1`.
    pub fn fit(kind: EnvelopeKind, level_max: Vec<f64>) -> Self {
        let top = level_max.iter().copied().fold(0.0, f64::max);
        if top == 0.0 {
            let running_rate = vec![1.0; level_max.len()];
            return GrowthEnvelope {
                kind,
                scale: 0.0,
                rate: 1.0,
                level_max,
                running_rate,
            };
        }
        let scale = if level_max[0] > 0.0 {
            level_max[0]
        } else {
            top
        };
        let mut running_rate = Vec::with_capacity(level_max.len());
        let mut rate: f64 = 0.0;
        for (n, &a) in level_max.iter().enumerate() {
            if n > 0 {
                rate = rate.max(smallest_rate(scale, n, a));
            }
            running_rate.push(rate);
        }
        if rate == 0.0 {
            rate = 1.0;
        }
        // the levels were fitted one at a time; re-check them all with the final rate
        while level_max
            .iter()
            .enumerate()
            .any(|(n, &a)| scale * rate.powi(n as i32) < a)
        {
            rate = rate.next_up();
        }
        GrowthEnvelope {
            kind,
            scale,
            rate,
            level_max,
            running_rate,
        }
    }

    /// `scale · rate^n`.
    pub fn bound(&self, n: usize) -> f64 {
        self.scale * self.rate.powi(n as i32)
    }

    /// Full scan: `|value(v)| ≤ bound(d(o, v))` at every vertex.
    pub fn holds_on(&self, tree: &Tree, magnitude: impl Fn(Vertex) -> f64) -> bool {
        (0..tree.len()).all(|v| magnitude(v) <= self.bound(tree.depth(v)))
    }

    pub fn holds_for_measure(&self, mu: &BoundaryMeasure<'_>) -> bool {
        self.holds_on(mu.tree(), |v| mu.cylinder(v).norm())
    }

    pub fn holds_for_function(&self, f: &VertexFunction<'_>) -> bool {
        self.holds_on(f.tree(), |v| f.value(v).norm())
    }
}

fn level_maxima(tree: &Tree, magnitude: impl Fn(Vertex) -> f64) -> Vec<f64> {
    (0..=tree.max_depth())
        .map(|n| {
            tree.level(n)
                .iter()
                .map(|&v| magnitude(v))
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Envelope `(C, K)` with `|μ(Ω_o(v))| ≤ C K^{d(o,v)}` on the truncation.
pub fn measure_growth_envelope(mu: &BoundaryMeasure<'_>) -> GrowthEnvelope {
    let a = level_maxima(mu.tree(), |v| mu.cylinder(v).norm());
    GrowthEnvelope::fit(EnvelopeKind::Measure, a)
}

/// Envelope `(B, G)` with `|f(x)| ≤ B G^{d(o,x)}` on the truncation.
pub fn function_growth_envelope(f: &VertexFunction<'_>) -> GrowthEnvelope {
    let b = level_maxima(f.tree(), |v| f.value(v).norm());
    GrowthEnvelope::fit(EnvelopeKind::Function, b)
}

/// `1 / (K q_max)`; the extension `μ_W` converges for `ϑ` below it.
pub fn admissible_theta_bound(envelope: &GrowthEnvelope, q_max: usize) -> f64 {
    1.0 / (envelope.rate * q_max as f64)
}

/// A choice of leaf `W(v)` beyond every vertex `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionMap {
    leaf: Vec<Vertex>,
}

impl SectionMap {
    /// Always follows the first child.
    pub fn first_descendant(tree: &Tree) -> Self {
        let leaf = (0..tree.len())
            .map(|mut v| {
                while !tree.is_leaf(v) {
                    v = tree.children(v)[0];
                }
                v
            })
            .collect();
        SectionMap { leaf }
    }

    /// Picks a uniformly random child at every step, vertices in increasing id.
    pub fn random(tree: &Tree, seed: u64) -> Self {
        let mut sampler = UnitSquareSampler::new(seed);
        let leaf = (0..tree.len())
            .map(|mut v| {
                while !tree.is_leaf(v) {
                    let kids = tree.children(v);
                    v = kids[sampler.next_index(kids.len())];
                }
                v
            })
            .collect();
        SectionMap { leaf }
    }

    pub fn from_vec(tree: &Tree, leaf: Vec<Vertex>) -> Result<Self> {
        if leaf.len() != tree.len() {
            return Err(Error::InvalidShape(format!(
                "section map has {} entries for {} vertices",
                leaf.len(),
                tree.len()
            )));
        }
        for (v, &l) in leaf.iter().enumerate() {
            tree.require_leaf(l)?;
            if !tree.is_ancestor_or_equal(v, l) {
                return Err(Error::InvalidShape(format!(
                    "W({v}) = {l} is not beyond {v}"
                )));
            }
        }
        Ok(SectionMap { leaf })
    }

    pub fn get(&self, v: Vertex) -> Vertex {
        self.leaf[v]
    }
}

/// Partial sums `μ_{W,n}(p)` and whether `ϑ` is in the convergence regime.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionSequence {
    /// Indexed by `n = 0..=n_max`.
    pub values: Vec<Complex64>,
    /// `1 / (K̂ q_max)` from the fitted measure envelope.
    pub theta_bound: f64,
    /// False when `ϑ ≥ theta_bound`; the values are still computed.
    pub in_regime: bool,
}

/// `μ_{W,n}(p) = Σ_{d(o,v)=n} μ(Ω_o(v)) p(W(v))` for `n = 0..=n_max`.
pub fn mu_w_extension(
    mu: &BoundaryMeasure<'_>,
    theta: Theta,
    w: &SectionMap,
    p: &CylinderFunction<'_>,
    n_max: usize,
) -> Result<ExtensionSequence> {
    let tree = mu.tree();
    if !same_tree(tree, p.tree()) || w.leaf.len() != tree.len() {
        return Err(Error::TreeMismatch);
    }
    if n_max > tree.max_depth() {
        return Err(Error::DepthOverflow {
            requested: n_max,
            max_depth: tree.max_depth(),
        });
    }
    let theta_bound = admissible_theta_bound(&measure_growth_envelope(mu), tree.q_max());
    let values = (0..=n_max)
        .map(|n| {
            let terms: Vec<Complex64> = tree
                .level(n)
                .iter()
                .map(|&v| mu.cylinder(v) * p.value_at(w.get(v)))
                .collect();
            pairwise_sum(&terms)
        })
        .collect();
    Ok(ExtensionSequence {
        values,
        theta_bound,
        in_regime: theta.value() < theta_bound,
    })
}

/// Envelopes on both sides of `β_z` and the bounds each side implies for the other.
#[derive(Debug, Clone)]
pub struct GrowthReport {
    pub function: GrowthEnvelope,
    pub measure: GrowthEnvelope,
    /// `(C', K')` implied by `(B, G)`.
    pub implied_measure: (f64, f64),
    /// `(B', G')` implied by `(C, K)`.
    pub implied_function: (f64, f64),
    /// `|μ(Ω_o(v))| ≤ C' K'^{d(o,v)}` at every vertex.
    pub measure_within_implied: bool,
    /// `|f(x)| ≤ B' G'^{d(o,x)}` at every vertex.
    pub function_within_implied: bool,
    pub compat_gap: f64,
    pub root_gap: f64,
}

impl GrowthReport {
    /// Every constant finite and each envelope inside the bound implied by the other.
    pub fn consistent(&self) -> bool {
        let finite = [
            self.function.scale,
            self.function.rate,
            self.measure.scale,
            self.measure.rate,
            self.implied_measure.0,
            self.implied_measure.1,
            self.implied_function.0,
            self.implied_function.1,
        ]
        .iter()
        .all(|x| x.is_finite());
        finite && self.measure_within_implied && self.function_within_implied
    }
}

/// Relative slack allowed when scanning against the implied bounds.
const IMPLIED_SLACK: f64 = 1e-9;

/// Moderate-growth diagnostics for an eigenfunction `f` and `μ = β_z(f)`.
///
/// From `z f(τ) - f(ι) = (z²-1) z^{d(o,ι)} ⃗μ(e)`:
/// `|f| ≤ B G^n` gives `|μ(Ω_o(v))| ≤ C' K'^n` with `K' = G/|z|` and
/// `C' = max(B, B (|z| G + 1) |z| / (G |z²-1|))`; conversely
/// `|μ(Ω_o(v))| ≤ C K^n` gives `|f| ≤ B' G'^n` with
/// `G' = 2 max(|z|, 1/|z|) max(1, K)` and `B' = |f(o)| + C |z²-1| / |z|²`.
pub fn mod_growth_crosscheck(
    z: SpectralParam,
    f: &VertexFunction<'_>,
    rel_tol: f64,
) -> Result<GrowthReport> {
    let report = check_eigen_characterization(z, f)?;
    let f_root = f.value(crate::tree::ROOT);
    if !report.passes(rel_tol, f_root) {
        return Err(Error::NotAnEigenfunction {
            compat: report.compat_gap,
            root: report.root_gap,
        });
    }
    let mu = report.coefficients.to_measure(rel_tol)?;
    let tree = f.tree();
    let function = function_growth_envelope(f);
    let measure = measure_growth_envelope(&mu);

    let zv = z.value();
    let za = zv.norm();
    let z2m1 = (zv * zv - 1.0).norm();

    let (b, g) = (function.scale, function.rate);
    let implied_measure = if b == 0.0 {
        (0.0, 1.0)
    } else {
        (b.max(b * (za * g + 1.0) * za / (g * z2m1)), g / za)
    };
    let (c, k) = (measure.scale, measure.rate);
    let implied_function = (
        f_root.norm() + c * z2m1 / (za * za),
        2.0 * za.max(1.0 / za) * k.max(1.0),
    );
    let within = |bound: (f64, f64), magnitude: &dyn Fn(Vertex) -> f64| {
        (0..tree.len()).all(|v| {
            let cap = bound.0 * bound.1.powi(tree.depth(v) as i32);
            magnitude(v) <= cap * (1.0 + IMPLIED_SLACK) + f64::MIN_POSITIVE
        })
    };
    let measure_within_implied = within(implied_measure, &|v| mu.cylinder(v).norm());
    let function_within_implied = within(implied_function, &|v| f.value(v).norm());
    Ok(GrowthReport {
        function,
        measure,
        implied_measure,
        implied_function,
        measure_within_implied,
        function_within_implied,
        compat_gap: report.compat_gap,
        root_gap: report.root_gap,
    })
}
