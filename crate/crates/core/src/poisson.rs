//! Poisson kernel and transform, the Laplacian and the potential `χ(z)`.

use std::io::{BufRead, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measure::{same_tree, BoundaryMeasure};
use crate::numeric::{format_f64, pairwise_sum, parse_f64, parse_usize, SpectralParam};
use crate::tree::{Tree, Vertex, ROOT};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A complex function on every vertex of a truncated tree.
#[derive(Debug, Clone)]
pub struct VertexFunction<'t> {
    tree: &'t Tree,
    values: Vec<Complex64>,
}

impl<'t> VertexFunction<'t> {
    pub fn new(tree: &'t Tree, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != tree.len() {
            return Err(Error::InvalidShape(format!(
                "{} values for {} vertices",
                values.len(),
                tree.len()
            )));
        }
        Ok(VertexFunction { tree, values })
    }

    pub fn from_fn(tree: &'t Tree, f: impl Fn(Vertex) -> Complex64) -> Self {
        VertexFunction {
            tree,
            values: (0..tree.len()).map(f).collect(),
        }
    }

    pub fn zero(tree: &'t Tree) -> Self {
        Self::from_fn(tree, |_| ZERO)
    }

    pub fn tree(&self) -> &'t Tree {
        self.tree
    }

    #[inline]
    pub fn value(&self, v: Vertex) -> Complex64 {
        self.values[v]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn set(&mut self, v: Vertex, value: Complex64) {
        self.values[v] = value;
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &VertexFunction<'_>) -> Result<f64> {
        if !same_tree(self.tree, other.tree) {
            return Err(Error::TreeMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `a·self + b·other`.
    pub fn linear_combination(
        &self,
        a: Complex64,
        other: &VertexFunction<'_>,
        b: Complex64,
    ) -> Result<Self> {
        if !same_tree(self.tree, other.tree) {
            return Err(Error::TreeMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&x, &y)| a * x + b * y)
            .collect();
        Ok(VertexFunction {
            tree: self.tree,
            values,
        })
    }

    /// `f(x) / z^{d(o, x)}` for every vertex.
    pub fn normalized(&self, z: SpectralParam) -> Result<Vec<Complex64>> {
        let pw = z.powers(self.tree.max_depth())?;
        Ok((0..self.tree.len())
            .map(|v| self.values[v] * pw.pow(-(self.tree.depth(v) as i64)))
            .collect())
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "VFUN {}", self.values.len())?;
        for (v, value) in self.values.iter().enumerate() {
            writeln!(w, "{} {} {}", v, format_f64(value.re), format_f64(value.im))?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(tree: &'t Tree, r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty function file"))??;
        let tokens: Vec<&str> = header.split_ascii_whitespace().collect();
        let n = match tokens.as_slice() {
            ["VFUN", n] => parse_usize(n, 1)?,
            _ => return Err(Error::parse(1, "expected `VFUN <n>`")),
        };
        if n != tree.len() {
            return Err(Error::parse(
                1,
                format!("function has {n} vertices, tree has {}", tree.len()),
            ));
        }
        let mut values = vec![ZERO; n];
        let mut seen = vec![false; n];
        for (idx, line) in lines.enumerate() {
            let line = line?;
            let lineno = idx + 2;
            if line.trim().is_empty() {
                continue;
            }
            let tokens: Vec<&str> = line.split_ascii_whitespace().collect();
            let [id, re, im] = tokens.as_slice() else {
                return Err(Error::parse(lineno, "expected `<vertex_id> <re> <im>`"));
            };
            let v = parse_usize(id, lineno)?;
            tree.check_vertex(v)?;
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::Duplicate(v));
            }
            values[v] = Complex64::new(parse_f64(re, lineno)?, parse_f64(im, lineno)?);
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::parse(0, format!("no value for vertex {missing}")));
        }
        Ok(VertexFunction { tree, values })
    }
}

/// A vertex function defined only where the full neighbourhood is present.
#[derive(Debug, Clone)]
pub struct PartialFunction<'t> {
    tree: &'t Tree,
    values: Vec<Option<Complex64>>,
}

impl<'t> PartialFunction<'t> {
    pub fn tree(&self) -> &'t Tree {
        self.tree
    }

    pub fn get(&self, v: Vertex) -> Option<Complex64> {
        self.values[v]
    }

    /// `(vertex, value)` over the domain.
    pub fn defined(&self) -> impl Iterator<Item = (Vertex, Complex64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(v, x)| x.map(|x| (v, x)))
    }

    pub fn max_abs(&self) -> f64 {
        self.defined().map(|(_, x)| x.norm()).fold(0.0, f64::max)
    }
}

fn interior_map<'t>(tree: &'t Tree, f: impl Fn(Vertex) -> Complex64 + Sync) -> PartialFunction<'t> {
    let values = (0..tree.len())
        .into_par_iter()
        .map(|v| tree.is_interior(v).then(|| f(v)))
        .collect();
    PartialFunction { tree, values }
}

fn chi_at(tree: &Tree, z: Complex64, v: Vertex) -> Complex64 {
    let q = tree.branching(v) as f64;
    (z + q / z) / (q + 1.0)
}

/// `χ(z)(x) = (z + q_x/z) / (q_x + 1)` at interior vertices.
///
/// Depth-`D` vertices are left undefined: their true degree is not part of
/// the truncation.
pub fn potential(tree: &Tree, z: SpectralParam) -> PartialFunction<'_> {
    let z = z.value();
    interior_map(tree, |v| chi_at(tree, z, v))
}

fn neighbour_mean(f: &VertexFunction<'_>, v: Vertex) -> Complex64 {
    let tree = f.tree;
    let terms: Vec<Complex64> = tree
        .parent(v)
        .into_iter()
        .chain(tree.children(v).iter().copied())
        .map(|u| f.values[u])
        .collect();
    pairwise_sum(&terms) / terms.len() as f64
}

/// `(Δf)(x)`, the mean over the neighbours of `x`, at interior vertices.
pub fn laplacian<'t>(f: &VertexFunction<'t>) -> PartialFunction<'t> {
    interior_map(f.tree, |v| neighbour_mean(f, v))
}

/// `p_z(x, ω) = z^{<x, ω>}` for `ω` beyond `leaf`.
pub fn poisson_kernel(tree: &Tree, z: SpectralParam, x: Vertex, leaf: Vertex) -> Result<Complex64> {
    let b = tree.horocycle_bracket(x, leaf)?;
    let pw = z.powers(tree.max_depth())?;
    Ok(pw.pow(b))
}

/// `P_z(μ)(x) = Σ_ℓ z^{<x, ℓ>} μ(Ω_o(ℓ))`.
///
/// Leaves are grouped by the vertex `a_j` where their ray leaves `[o, x]`.
/// Those beyond `a_j` but not beyond `a_{j+1}` share the bracket
/// `2j - d(o, x)` and carry the mass `μ(a_j) - μ(a_{j+1})`; the leaves beyond
/// `x` carry `μ(x)`. Each vertex is evaluated independently, so the result
/// does not depend on the number of worker threads.
pub fn poisson_transform<'t>(
    z: SpectralParam,
    mu: &BoundaryMeasure<'t>,
) -> Result<VertexFunction<'t>> {
    let tree = mu.tree();
    let pw = z.powers(tree.max_depth())?;
    let values = (0..tree.len())
        .into_par_iter()
        .map(|x| {
            let n = tree.depth(x);
            let path = tree.path_from_root(x);
            let terms: Vec<Complex64> = (0..=n)
                .map(|j| {
                    let shell = if j < n {
                        mu.cylinder(path[j]) - mu.cylinder(path[j + 1])
                    } else {
                        mu.cylinder(x)
                    };
                    pw.pow(2 * j as i64 - n as i64) * shell
                })
                .collect();
            pairwise_sum(&terms)
        })
        .collect();
    Ok(VertexFunction { tree, values })
}

/// Pointwise `(Δ - χ(z)) f` with a local scale for relative comparisons.
#[derive(Debug, Clone)]
pub struct EigenResidual<'t> {
    pub raw: PartialFunction<'t>,
    /// `max |f|` over `x` and its neighbours.
    pub local_scale: Vec<Option<f64>>,
}

impl EigenResidual<'_> {
    pub fn max_raw(&self) -> f64 {
        self.raw.max_abs()
    }

    /// `max_x |residual(x)| / local_scale(x)`; a zero scale leaves the raw value.
    pub fn max_relative(&self) -> f64 {
        self.raw
            .defined()
            .map(|(v, r)| {
                let s = self.local_scale[v].unwrap_or(0.0);
                if s > 0.0 {
                    r.norm() / s
                } else {
                    r.norm()
                }
            })
            .fold(0.0, f64::max)
    }
}

pub fn eigen_residual<'t>(f: &VertexFunction<'t>, z: SpectralParam) -> EigenResidual<'t> {
    let tree = f.tree;
    let zv = z.value();
    let raw = interior_map(tree, |v| {
        neighbour_mean(f, v) - chi_at(tree, zv, v) * f.values[v]
    });
    let local_scale = (0..tree.len())
        .map(|v| {
            tree.is_interior(v).then(|| {
                tree.parent(v)
                    .into_iter()
                    .chain(tree.children(v).iter().copied())
                    .chain([v])
                    .map(|u| f.values[u].norm())
                    .fold(0.0, f64::max)
            })
        })
        .collect();
    EigenResidual { raw, local_scale }
}

/// `f(o)`; convenience for the root condition.
pub fn root_value(f: &VertexFunction<'_>) -> Complex64 {
    f.values[ROOT]
}
