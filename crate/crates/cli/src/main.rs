//! `tree-poisson`: generate trees and measures, run transforms and write experiment tables.

mod output;

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use tree_poisson::boundary::{
    check_eigen_characterization, limit_recover_clopen, limit_recover_vertex, LimitSequence,
};
use tree_poisson::hoelder::{
    admissible_theta_bound, function_growth_envelope, measure_growth_envelope,
};
use tree_poisson::poisson::eigen_residual;
use tree_poisson::{
    format_f64, poisson_transform, BoundaryMeasure, ClopenSet, Complex64, ErrorClass,
    GrowthEnvelope, SpectralParam, Theta, Tree, Vertex, VertexFunction, ROOT,
};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_DOMAIN: u8 = 3;
const EXIT_NUMERIC: u8 = 4;

#[derive(Parser)]
#[command(
    name = "tree-poisson",
    version,
    about = "Poisson transforms on finite trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a tree file.
    GenTree {
        #[command(flatten)]
        source: TreeSource,
        #[command(flatten)]
        out: Output,
    },
    /// Write a measure file.
    GenMeasure {
        #[command(flatten)]
        source: TreeSource,
        #[command(flatten)]
        kind: MeasureKind,
        #[command(flatten)]
        out: Output,
    },
    /// Write the vertex function `P_z(μ)`.
    Transform {
        #[command(flatten)]
        source: TreeSource,
        #[arg(long, value_name = "FILE")]
        measure: PathBuf,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: Complex64,
        #[command(flatten)]
        out: Output,
    },
    /// Write the edge coefficients `β_z(f)` and the eigenfunction report.
    Invert {
        #[command(flatten)]
        source: TreeSource,
        #[arg(long, value_name = "FILE")]
        vfun: PathBuf,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: Complex64,
        /// Relative tolerance for the eigenfunction verdict.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Check both round trips and the eigenvalue equation; exits 1 above the tolerance.
    Verify {
        #[command(flatten)]
        source: TreeSource,
        #[arg(long, value_name = "FILE")]
        measure: PathBuf,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: Complex64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// CSV of limit-recovery estimates on a regular tree.
    LimitTable {
        #[command(flatten)]
        source: TreeSource,
        /// Measure to transform and to compare against.
        #[arg(long, value_name = "FILE")]
        measure: PathBuf,
        /// Use this vertex function instead of `P_z(μ)`.
        #[arg(long, value_name = "FILE")]
        vfun: Option<PathBuf>,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: Complex64,
        #[command(flatten)]
        target: LimitTarget,
        /// Last `k` (vertex) or `n` (clopen set); defaults to the deepest possible.
        #[arg(long)]
        kmax: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// CSV of level maxima and running growth rates.
    Envelope {
        #[command(flatten)]
        source: TreeSource,
        #[command(flatten)]
        input: EnvelopeInput,
        /// Add the admissible bound for ϑ and whether this ϑ lies below it.
        #[arg(long, conflicts_with = "vfun")]
        theta: Option<f64>,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct TreeSource {
    /// Regular tree with branching Q and truncation depth D.
    #[arg(long, num_args = 2, value_names = ["Q", "D"])]
    regular: Option<Vec<usize>>,
    /// `<child> <parent>` pairs, one per line.
    #[arg(long, value_name = "FILE")]
    parents: Option<PathBuf>,
    /// A tree file.
    #[arg(long, value_name = "FILE")]
    tree: Option<PathBuf>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct MeasureKind {
    /// Unit mass on the cylinder of a leaf.
    #[arg(long, value_name = "LEAF")]
    dirac: Option<Vertex>,
    /// Uniform measure seen from CENTER (default: the root).
    #[arg(long, value_name = "CENTER", num_args = 0..=1, default_missing_value = "0")]
    rotation_invariant: Option<Vertex>,
    /// Leaf masses uniform on the complex unit square.
    #[arg(long, value_name = "SEED")]
    random: Option<u64>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct LimitTarget {
    #[arg(long, value_name = "X")]
    vertex: Option<Vertex>,
    /// Comma-separated vertices whose cylinders form the set.
    #[arg(long, value_name = "V,..", value_delimiter = ',')]
    clopen: Option<Vec<Vertex>>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct EnvelopeInput {
    #[arg(long, value_name = "FILE")]
    measure: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    vfun: Option<PathBuf>,
}

#[derive(Args)]
struct Output {
    /// Destination file; standard output when omitted.
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `re,im`, got `{s}`"))?;
    let part = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| format!("`{t}` is not a finite decimal"))
    };
    Ok(Complex64::new(part(re)?, part(im)?))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(file))
}

impl TreeSource {
    fn load(&self) -> Result<Tree> {
        if let Some(qd) = &self.regular {
            return Ok(Tree::regular(qd[0], qd[1])?);
        }
        if let Some(path) = &self.parents {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            return Ok(Tree::from_parents(&parse_parent_pairs(&text)?)?);
        }
        let path = self.tree.as_ref().expect("clap enforces one tree source");
        Tree::read_from(open(path)?).with_context(|| format!("in {}", path.display()))
    }
}

fn parse_parent_pairs(text: &str) -> Result<Vec<(Vertex, Vertex)>> {
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parsed: Option<Vec<Vertex>> = fields.iter().map(|f| f.parse().ok()).collect();
        match parsed.as_deref() {
            Some(&[child, parent]) => pairs.push((child, parent)),
            _ => {
                return Err(tree_poisson::Error::Parse {
                    line: i + 1,
                    message: format!("expected `<child> <parent>`, got `{line}`"),
                }
                .into())
            }
        }
    }
    Ok(pairs)
}

fn load_measure<'t>(tree: &'t Tree, path: &Path) -> Result<BoundaryMeasure<'t>> {
    BoundaryMeasure::read_from(tree, open(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_vfun<'t>(tree: &'t Tree, path: &Path) -> Result<VertexFunction<'t>> {
    VertexFunction::read_from(tree, open(path)?).with_context(|| format!("in {}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let class = err
        .chain()
        .find_map(|e| e.downcast_ref::<tree_poisson::Error>())
        .map(tree_poisson::Error::class);
    match class {
        Some(ErrorClass::Numeric) => EXIT_NUMERIC,
        _ => EXIT_DOMAIN,
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::GenTree { source, out } => {
            let tree = source.load()?;
            output::write(&out.output, |w| Ok(tree.write_to(w)?))?;
        }
        Command::GenMeasure { source, kind, out } => {
            let tree = source.load()?;
            let mu = if let Some(leaf) = kind.dirac {
                BoundaryMeasure::dirac(&tree, leaf)?
            } else if let Some(center) = kind.rotation_invariant {
                BoundaryMeasure::rotation_invariant(&tree, center)?
            } else {
                BoundaryMeasure::random(&tree, kind.random.expect("clap enforces one kind"))
            };
            output::write(&out.output, |w| Ok(mu.write_to(w)?))?;
        }
        Command::Transform {
            source,
            measure,
            z,
            out,
        } => {
            let tree = source.load()?;
            let mu = load_measure(&tree, &measure)?;
            let f = poisson_transform(SpectralParam::new(z)?, &mu)?;
            output::write(&out.output, |w| Ok(f.write_to(w)?))?;
        }
        Command::Invert {
            source,
            vfun,
            z,
            tol,
            out,
        } => {
            let tree = source.load()?;
            let f = load_vfun(&tree, &vfun)?;
            let report = check_eigen_characterization(SpectralParam::new(z)?, &f)?;
            let verdict = report.passes(tol, f.value(ROOT));
            output::write(&out.output, |w| {
                report.coefficients.write_to(&mut *w)?;
                writeln!(w, "COMPAT {}", format_f64(report.compat_gap))?;
                writeln!(w, "ROOT {}", format_f64(report.root_gap))?;
                writeln!(w, "EIGENFUNCTION {}", if verdict { "yes" } else { "no" })?;
                Ok(())
            })?;
        }
        Command::Verify {
            source,
            measure,
            z,
            tol,
            out,
        } => return verify(&source.load()?, &measure, z, tol, &out.output),
        Command::LimitTable {
            source,
            measure,
            vfun,
            z,
            target,
            kmax,
            out,
        } => {
            let tree = source.load()?;
            let mu = load_measure(&tree, &measure)?;
            let z = SpectralParam::new(z)?;
            let f = match &vfun {
                Some(path) => load_vfun(&tree, path)?,
                None => poisson_transform(z, &mu)?,
            };
            let (seq, expected) = if let Some(x) = target.vertex {
                tree.check_vertex(x)?;
                let k_max = kmax.unwrap_or(tree.max_depth().saturating_sub(tree.depth(x)));
                (limit_recover_vertex(z, &f, x, k_max)?, mu.cylinder(x))
            } else {
                let members = target.clopen.expect("clap enforces one target");
                let set = ClopenSet::new(&tree, members)?;
                let n_max = kmax.unwrap_or(tree.max_depth());
                (
                    limit_recover_clopen(z, &f, &set, n_max)?,
                    mu.evaluate(&set)?,
                )
            };
            output::write(&out.output, |w| write_limit_csv(w, &seq, expected))?;
        }
        Command::Envelope {
            source,
            input,
            theta,
            out,
        } => {
            let tree = source.load()?;
            let theta = theta.map(Theta::new).transpose()?;
            let (header, env) = if let Some(path) = &input.measure {
                let mu = load_measure(&tree, path)?;
                ("n,a_n,running_k_hat", measure_growth_envelope(&mu))
            } else {
                let f = load_vfun(&tree, input.vfun.as_ref().expect("clap enforces one input"))?;
                ("n,b_n,running_g_hat", function_growth_envelope(&f))
            };
            output::write(&out.output, |w| {
                write_envelope_csv(w, header, &env, theta, tree.q_max())
            })?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(
    tree: &Tree,
    measure: &Path,
    z: Complex64,
    tol: f64,
    out: &Option<PathBuf>,
) -> Result<ExitCode> {
    let mu = load_measure(tree, measure)?;
    let z = SpectralParam::new(z)?;
    let f = poisson_transform(z, &mu)?;
    let eigen = eigen_residual(&f, z).max_relative();
    let coeffs = tree_poisson::boundary::beta(z, &f)?;
    let measure_scale = (1..tree.len())
        .map(|v| mu.cylinder(v).norm())
        .fold(0.0, f64::max);
    let measure_err = coeffs.max_abs_diff_measure(&mu)? / nonzero(measure_scale);
    let g = tree_poisson::boundary::reconstruct_function(z, &coeffs, f.value(ROOT))?;
    let function_err = f.max_abs_diff(&g)? / nonzero(f.sup_norm());
    let pass = [measure_err, function_err, eigen].iter().all(|&e| e <= tol);
    output::write(out, |w| {
        writeln!(w, "roundtrip_measure_rel {}", format_f64(measure_err))?;
        writeln!(w, "roundtrip_function_rel {}", format_f64(function_err))?;
        writeln!(w, "eigen_residual_rel {}", format_f64(eigen))?;
        writeln!(w, "tolerance {}", format_f64(tol))?;
        writeln!(w, "status {}", if pass { "PASS" } else { "FAIL" })?;
        Ok(())
    })?;
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    })
}

fn nonzero(scale: f64) -> f64 {
    if scale > 0.0 {
        scale
    } else {
        1.0
    }
}

fn write_limit_csv(w: &mut dyn Write, seq: &LimitSequence, expected: Complex64) -> Result<()> {
    writeln!(w, "k,estimate_re,estimate_im,abs_error,error_ratio")?;
    let errors = seq.errors(expected);
    // row k carries e_k / e_{k-1}
    let ratios: Vec<Option<f64>> = std::iter::once(None)
        .chain(seq.error_ratios(expected))
        .collect();
    for ((entry, err), ratio) in seq.entries.iter().zip(&errors).zip(&ratios) {
        let ratio = ratio.map(format_f64).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{}",
            entry.k,
            format_f64(entry.estimate.re),
            format_f64(entry.estimate.im),
            format_f64(*err),
            ratio
        )?;
    }
    Ok(())
}

fn write_envelope_csv(
    w: &mut dyn Write,
    header: &str,
    env: &GrowthEnvelope,
    theta: Option<Theta>,
    q_max: usize,
) -> Result<()> {
    match theta {
        Some(_) => writeln!(w, "{header},theta_bound,in_regime")?,
        None => writeln!(w, "{header}")?,
    }
    for (n, (a, rate)) in env.level_max.iter().zip(&env.running_rate).enumerate() {
        write!(w, "{n},{},{}", format_f64(*a), format_f64(*rate))?;
        if let Some(th) = theta {
            let running = GrowthEnvelope {
                rate: if *rate > 0.0 { *rate } else { 1.0 },
                ..env.clone()
            };
            let bound = admissible_theta_bound(&running, q_max);
            write!(w, ",{},{}", format_f64(bound), u8::from(th.value() < bound))?;
        }
        writeln!(w)?;
    }
    Ok(())
}
