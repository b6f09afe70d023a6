//! Command line front end for double hyperbolic volume computations.
//!
//! Subcommands load polytopes from the JSON wire format, compute complex
//! volumes, run the numeric invariant suite, evaluate Möbius-invariant
//! boundary volumes, check the flat-signature quadric embeddings, and fit
//! small-ε expansions of one-sheet regions. Output is JSON (default) or
//! CSV with complex values flattened to re/im column pairs.
//!
//! Exit codes: 0 success, 1 usage or I/O errors, 2 numerical
//! non-convergence (including failed invariant or residual checks).

use std::f64::consts::PI;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dhvol_core::boundary::{self, MobiusMap};
use dhvol_core::desitter;
use dhvol_core::minkowski::random_lorentz;
use dhvol_core::polytope::{HalfSpace, Polytope, PolytopeKind};
use dhvol_core::renorm;
use dhvol_core::schlafli::{self, DeformationPath};
use dhvol_core::volume::{self, ComplexVolume, EpsilonLadder, QuadratureConfig, VolumeMethod};
use dhvol_core::{Complex, Error};

#[derive(Parser)]
#[command(
    name = "dhvol",
    version,
    about = "Complex-valued volumes of polytopes in the double hyperbolic space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the complex volume of a polytope
    Volume(VolumeArgs),
    /// Run the numeric invariant suite and print a pass/fail table
    Suite(SuiteArgs),
    /// Möbius-invariant volume of a region of the ideal boundary sphere
    Boundary(BoundaryArgs),
    /// Residual checks for the flat-signature quadric embeddings
    Embed(EmbedArgs),
    /// Fit the small-ε expansion of a one-sheet region
    Renorm(RenormArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct LadderOpts {
    /// Largest ε of the regularization ladder
    #[arg(long)]
    eps0: Option<f64>,
    /// Ratio between consecutive rungs, in (0, 1)
    #[arg(long)]
    ratio: Option<f64>,
    /// Number of rungs
    #[arg(long)]
    count: Option<usize>,
}

impl LadderOpts {
    fn ladder(&self) -> Result<EpsilonLadder, Error> {
        let mut l = EpsilonLadder::default();
        if let Some(v) = self.eps0 {
            l.eps0 = v;
        }
        if let Some(v) = self.ratio {
            l.ratio = v;
        }
        if let Some(v) = self.count {
            l.count = v;
        }
        l.validate()?;
        Ok(l)
    }
}

#[derive(Args)]
struct QuadOpts {
    /// Absolute quadrature tolerance
    #[arg(long)]
    tol: Option<f64>,
}

impl QuadOpts {
    fn config(&self) -> Result<QuadratureConfig, Error> {
        let mut cfg = QuadratureConfig::default();
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return Err(Error::Domain("tolerance must be positive".into()));
            }
            cfg.abs_tol = t;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct VolumeArgs {
    /// Polytope JSON file
    #[arg(
        long = "in",
        value_name = "PATH",
        conflicts_with = "total",
        required_unless_present = "total"
    )]
    input: Option<PathBuf>,
    /// Compute the total volume of the whole space instead of a file
    #[arg(long, requires = "dim")]
    total: bool,
    /// Dimension for --total
    #[arg(long)]
    dim: Option<usize>,
    /// Force ε-regularized quadrature even where a closed form exists
    #[arg(long)]
    quadrature: bool,
    #[command(flatten)]
    ladder: LadderOpts,
    #[command(flatten)]
    quad: QuadOpts,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct SuiteArgs {
    /// Seed for the randomized families
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run a single named check (parity, bound, additivity, isometry,
    /// models, sdf, mobius, embed)
    #[arg(long, value_name = "NAME")]
    only: Option<String>,
    /// Dimension for the dimension-parameterized checks (2 or 3)
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Args)]
struct BoundaryArgs {
    /// Parent polytope JSON file (odd dimension, two-sheet kind)
    #[arg(long = "in", value_name = "PATH")]
    input: PathBuf,
    #[command(flatten)]
    quad: QuadOpts,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct EmbedArgs {
    /// Number of spacelike directions (p >= 1)
    #[arg(long)]
    p: usize,
    /// Number of timelike directions (q >= 1)
    #[arg(long)]
    q: usize,
    /// Number of random sample points
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Seed for the sample points
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct RenormArgs {
    /// One-sheet polytope JSON file
    #[arg(long = "in", value_name = "PATH")]
    input: PathBuf,
    /// Boundary dimension of the expansion (default: polytope dim - 1)
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    ladder: LadderOpts,
    #[command(flatten)]
    quad: QuadOpts,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn main() -> ExitCode {
    dhvol_core::init_threads();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap exits 2 on usage errors by default; 2 is reserved for
            // numerical non-convergence here
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Volume(a) => run_volume(a),
        Command::Suite(a) => run_suite(a),
        Command::Boundary(a) => run_boundary(a),
        Command::Embed(a) => run_embed(a),
        Command::Renorm(a) => run_renorm(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::NonConverged { .. }) | Some(Error::IllConditioned(_)) => 2,
        _ => 1,
    }
}

fn load_polytope(path: &PathBuf) -> anyhow::Result<Polytope> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Polytope::from_json(&text)?)
}

// ---------------------------------------------------------------------------
// volume
// ---------------------------------------------------------------------------

fn run_volume(a: VolumeArgs) -> anyhow::Result<u8> {
    let v = if a.total {
        let n = a.dim.expect("clap enforces --dim with --total");
        ComplexVolume {
            value: volume::total_volume(n),
            samples: Vec::new(),
            fit_residual: 0.0,
            method: VolumeMethod::ClosedForm,
        }
    } else {
        let p = load_polytope(a.input.as_ref().expect("clap enforces --in without --total"))?;
        if a.quadrature {
            volume::volume(&p, &a.quad.config()?, &a.ladder.ladder()?)?
        } else {
            volume::volume_auto(&p)?
        }
    };
    match a.format {
        Format::Json => println!("{}", v.to_json()),
        Format::Csv => {
            let method = match v.method {
                VolumeMethod::ClosedForm => "closed_form",
                VolumeMethod::Quadrature => "quadrature",
            };
            println!("value_re,value_im,residual,method");
            println!("{},{},{},{}", v.value.re, v.value.im, v.fit_residual, method);
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// boundary / embed / renorm
// ---------------------------------------------------------------------------

fn run_boundary(a: BoundaryArgs) -> anyhow::Result<u8> {
    let p = load_polytope(&a.input)?;
    let g = p.restrict_to_boundary()?;
    let v = boundary::v_infty(&g, &a.quad.config()?)?;
    match a.format {
        Format::Json => println!(
            "{}",
            serde_json::json!({
                "value": v.value,
                "imag_residue": v.imag_residue,
                "parent_volume": [v.parent_volume.re, v.parent_volume.im],
            })
        ),
        Format::Csv => {
            println!("value,imag_residue,parent_re,parent_im");
            println!(
                "{},{},{},{}",
                v.value, v.imag_residue, v.parent_volume.re, v.parent_volume.im
            );
        }
    }
    Ok(0)
}

fn run_embed(a: EmbedArgs) -> anyhow::Result<u8> {
    if a.samples == 0 {
        bail!("--samples must be at least 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let signs = desitter::ambient_signs(a.p, a.q);
    let mut max_quadric = 0.0f64;
    let mut max_pullback = 0.0f64;
    for _ in 0..a.samples {
        let x = random_flat_point(&mut rng, a.p + a.q);
        let y = desitter::embed_minkowski(&x, a.p, a.q)?;
        let quad: f64 = y.iter().zip(&signs).map(|(v, s)| s * v * v).sum();
        max_quadric = max_quadric.max((quad - 1.0).abs());
        max_pullback = max_pullback.max(desitter::pullback_metric_check(&x, a.p, a.q)?);
    }
    let pass = max_quadric < desitter::QUADRIC_TOL && max_pullback < 1e-8;
    match a.format {
        Format::Json => println!(
            "{}",
            serde_json::json!({
                "p": a.p,
                "q": a.q,
                "samples": a.samples,
                "max_quadric_residual": max_quadric,
                "max_pullback_residual": max_pullback,
                "pass": pass,
            })
        ),
        Format::Csv => {
            println!("p,q,samples,max_quadric_residual,max_pullback_residual,pass");
            println!("{},{},{},{},{},{}", a.p, a.q, a.samples, max_quadric, max_pullback, pass);
        }
    }
    Ok(if pass { 0 } else { 2 })
}

/// Random point of the flat signature space, kept away from the
/// embedding's boundary plane x_last = 0.
fn random_flat_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
    let last = x[n - 1];
    x[n - 1] = last.signum() * (0.3 + last.abs());
    x
}

fn run_renorm(a: RenormArgs) -> anyhow::Result<u8> {
    let p = load_polytope(&a.input)?;
    let n = match a.n {
        Some(n) => n,
        None => {
            if p.dim == 0 {
                bail!("the expansion needs a polytope of dimension >= 1");
            }
            p.dim - 1
        }
    };
    let fit = renorm::fit_asymptotics(&p, n, &a.ladder.ladder()?, &a.quad.config()?)?;
    match a.format {
        Format::Json => println!("{}", fit.to_json()),
        Format::Csv => {
            let lg = fit.log_coeff.unwrap_or(Complex::new(0.0, 0.0));
            println!("n,constant_re,constant_im,log_re,log_im,residual,condition");
            println!(
                "{},{},{},{},{},{},{}",
                fit.n, fit.constant.re, fit.constant.im, lg.re, lg.im, fit.residual,
                fit.condition_number
            );
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// suite
// ---------------------------------------------------------------------------

struct CheckOutcome {
    name: &'static str,
    pass: bool,
    detail: String,
}

const CHECK_NAMES: [&str; 8] =
    ["parity", "bound", "additivity", "isometry", "models", "sdf", "mobius", "embed"];

fn run_suite(a: SuiteArgs) -> anyhow::Result<u8> {
    if let Some(name) = &a.only {
        if !CHECK_NAMES.contains(&name.as_str()) {
            bail!("unknown check name: {name} (expected one of {})", CHECK_NAMES.join(", "));
        }
    }
    let dims: Vec<usize> = match a.dim {
        None => vec![2],
        Some(n @ (2 | 3)) => vec![n],
        Some(n) => bail!("suite checks run in dimension 2 or 3, got {n}"),
    };
    let mut outcomes = Vec::new();
    for (k, name) in CHECK_NAMES.iter().enumerate() {
        if a.only.as_deref().is_some_and(|o| o != *name) {
            continue;
        }
        // independent per-check streams keep --only output identical to
        // the corresponding full-table line
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed.wrapping_add(1 + k as u64));
        let run: Result<(bool, String), Error> = match *name {
            "parity" => check_parity_suite(&mut rng, &dims),
            "bound" => check_bound_suite(&mut rng, &dims),
            "additivity" => check_additivity_suite(&mut rng, &dims),
            "isometry" => check_isometry_suite(&mut rng, &dims),
            "models" => check_models_suite(),
            "sdf" => check_sdf_suite(&dims),
            "mobius" => check_mobius_suite(),
            "embed" => check_embed_suite(&mut rng),
            _ => unreachable!(),
        };
        let (pass, detail) = match run {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        outcomes.push(CheckOutcome { name, pass, detail });
    }
    for c in &outcomes {
        println!("{:<11} {:<5} {}", c.name, if c.pass { "pass" } else { "FAIL" }, c.detail);
    }
    let failures = outcomes.iter().filter(|c| !c.pass).count();
    if failures == 0 {
        println!("suite: all {} checks passed", outcomes.len());
        Ok(0)
    } else {
        println!("suite: {failures} of {} checks failed", outcomes.len());
        Ok(2)
    }
}

/// Compact random polygon around the chart center: walls at random
/// distances, with jittered but still spanning directions.
fn random_polygon(rng: &mut ChaCha8Rng) -> Polytope {
    let m = rng.gen_range(3..=5);
    let spin = rng.gen_range(0.0..2.0 * PI);
    let normals: Vec<Vec<f64>> = (0..m)
        .map(|k| {
            let a: f64 = spin + 2.0 * PI * k as f64 / m as f64 + rng.gen_range(-0.2..0.2);
            let d: f64 = rng.gen_range(0.2..0.8);
            vec![-d.sinh(), d.cosh() * a.cos(), d.cosh() * a.sin()]
        })
        .collect();
    Polytope::from_normals(2, &normals, PolytopeKind::Type1)
        .expect("walls around the center intersect")
}

/// Compact random tetrahedron-like 3-polytope: jittered tetrahedral face
/// directions at random distances.
fn random_tetrahedron(rng: &mut ChaCha8Rng) -> Polytope {
    let s = 1.0 / 3.0f64.sqrt();
    let dirs = [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]];
    let normals: Vec<Vec<f64>> = dirs
        .iter()
        .map(|w| {
            let d: f64 = rng.gen_range(0.3..0.7);
            let (a, b): (f64, f64) = (rng.gen_range(-0.25..0.25), rng.gen_range(-0.25..0.25));
            let r01 = [w[0] * a.cos() - w[1] * a.sin(), w[0] * a.sin() + w[1] * a.cos(), w[2]];
            let r12 =
                [r01[0], r01[1] * b.cos() - r01[2] * b.sin(), r01[1] * b.sin() + r01[2] * b.cos()];
            vec![-d.sinh(), d.cosh() * r12[0], d.cosh() * r12[1], d.cosh() * r12[2]]
        })
        .collect();
    Polytope::from_normals(3, &normals, PolytopeKind::Type1)
        .expect("walls around the center intersect")
}

fn random_compact(rng: &mut ChaCha8Rng, dim: usize) -> Polytope {
    match dim {
        2 => random_polygon(rng),
        _ => random_tetrahedron(rng),
    }
}

/// Short ladder and loose tolerance for the quadrature-backed suite
/// entries; the acceptance thresholds here are far above these budgets.
fn suite_quad_cfg() -> QuadratureConfig {
    QuadratureConfig { abs_tol: 5e-4, ..QuadratureConfig::default() }
}

fn suite_ladder() -> EpsilonLadder {
    EpsilonLadder { eps0: 0.15, ratio: 0.5, count: 6 }
}

fn check_parity_suite(rng: &mut ChaCha8Rng, dims: &[usize]) -> Result<(bool, String), Error> {
    let mut samples = 0usize;
    for &dim in dims {
        for _ in 0..3 {
            let p = random_compact(rng, dim);
            for eps in EpsilonLadder::default().values() {
                if !volume::check_parity(&p, eps)? {
                    return Ok((false, format!("parity broke at eps {eps:.3e} in dim {dim}")));
                }
                samples += 1;
            }
        }
    }
    Ok((true, format!("{samples} regularized samples stay on the parity axis")))
}

fn check_bound_suite(rng: &mut ChaCha8Rng, dims: &[usize]) -> Result<(bool, String), Error> {
    let mut checked = 0usize;
    for &dim in dims {
        let count = if dim == 2 { 3 } else { 1 };
        for _ in 0..count {
            let p = random_compact(rng, dim);
            let v = if dim == 2 {
                volume::volume_auto(&p)?
            } else {
                volume::volume(&p, &suite_quad_cfg(), &suite_ladder())?
            };
            if !volume::check_bound(&p, &v) {
                return Ok((false, format!("|V| {:.3e} exceeded the bound", v.value.norm())));
            }
            checked += 1;
        }
        // the whole space has no walls and saturates nothing
        let whole = Polytope::whole(dim, PolytopeKind::Type1);
        let v = volume::ComplexVolume {
            value: volume::total_volume(dim),
            samples: Vec::new(),
            fit_residual: 0.0,
            method: VolumeMethod::ClosedForm,
        };
        if !volume::check_bound(&whole, &v) {
            return Ok((false, "the whole space broke the factorial bound".into()));
        }
        checked += 1;
    }
    Ok((true, format!("{checked} volumes within the factorial bound")))
}

fn check_additivity_suite(rng: &mut ChaCha8Rng, dims: &[usize]) -> Result<(bool, String), Error> {
    let mut max_defect = 0.0f64;
    for &dim in dims {
        let count = if dim == 2 { 3 } else { 1 };
        let tol = if dim == 2 { 1e-9 } else { 2e-2 };
        for _ in 0..count {
            let p = random_compact(rng, dim);
            let a: f64 = rng.gen_range(0.0..2.0 * PI);
            let d: f64 = rng.gen_range(-0.2..0.2);
            let mut coords = vec![-f64::sinh(d), f64::cosh(d) * a.cos(), f64::cosh(d) * a.sin()];
            if dim == 3 {
                coords.push(0.0);
            }
            let h = HalfSpace::new(coords)?;
            let (left, right) = p.split(&h)?;
            let (v, vl, vr) = if dim == 2 {
                (
                    volume::volume_auto(&p)?.value,
                    volume::volume_auto(&left)?.value,
                    volume::volume_auto(&right)?.value,
                )
            } else {
                let (cfg, ladder) = (suite_quad_cfg(), suite_ladder());
                (
                    volume::volume(&p, &cfg, &ladder)?.value,
                    volume::volume(&left, &cfg, &ladder)?.value,
                    volume::volume(&right, &cfg, &ladder)?.value,
                )
            };
            let defect = (v - vl - vr).norm();
            max_defect = max_defect.max(defect);
            if defect > tol {
                return Ok((false, format!("split defect {defect:.3e} above {tol:.1e}")));
            }
        }
    }
    Ok((true, format!("max split defect {max_defect:.3e}")))
}

fn check_isometry_suite(rng: &mut ChaCha8Rng, dims: &[usize]) -> Result<(bool, String), Error> {
    let mut max_drift = 0.0f64;
    for &dim in dims {
        let count = if dim == 2 { 3 } else { 1 };
        let tol = if dim == 2 { 1e-10 } else { 2e-2 };
        for k in 0..count {
            let p = random_compact(rng, dim);
            let g = random_lorentz(rng.gen::<u64>() ^ k as u64, dim);
            let moved = p.transformed(&g)?;
            let (v, vm) = if dim == 2 {
                (volume::volume_auto(&p)?.value, volume::volume_auto(&moved)?.value)
            } else {
                let (cfg, ladder) = (suite_quad_cfg(), suite_ladder());
                (
                    volume::volume(&p, &cfg, &ladder)?.value,
                    volume::volume(&moved, &cfg, &ladder)?.value,
                )
            };
            let drift = (v - vm).norm();
            max_drift = max_drift.max(drift);
            if drift > tol {
                return Ok((false, format!("volume moved by {drift:.3e} under an isometry")));
            }
        }
    }
    Ok((true, format!("max isometry drift {max_drift:.3e}")))
}

/// The chart and sphere functionals are different regularizations of the
/// same volume; their extrapolated constants must agree.
fn check_models_suite() -> Result<(bool, String), Error> {
    let d = 0.5f64;
    let walls: Vec<Vec<f64>> = [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0]
        .iter()
        .map(|a| vec![-d.sinh(), d.cosh() * a.cos(), d.cosh() * a.sin()])
        .collect();
    let p = Polytope::from_normals(2, &walls, PolytopeKind::Type1)?;
    let cfg = QuadratureConfig { abs_tol: 1e-6, ..QuadratureConfig::default() };
    let ladder = EpsilonLadder { eps0: 0.08, ratio: 0.6, count: 6 };
    let mut chart = Vec::new();
    let mut sphere = Vec::new();
    for eps in ladder.values() {
        chart.push((eps, volume::mu_u_eps(&p, eps, &cfg)?));
        sphere.push((eps, volume::mu_h_eps(&p, eps, 1.0, false, &cfg)?));
    }
    let (cu, _) = volume::extrapolate_samples(2, &chart)?;
    let (ch, _) = volume::extrapolate_samples(2, &sphere)?;
    let gap = (cu - ch).norm();
    Ok((gap < 5e-3, format!("chart and sphere constants differ by {gap:.3e}")))
}

fn check_sdf_suite(dims: &[usize]) -> Result<(bool, String), Error> {
    let mut details = Vec::new();
    for &dim in dims {
        let (path, tol) = if dim == 2 {
            let d = 0.25f64;
            let normals = vec![
                vec![-d.sinh(), d.cosh() * 0.3f64.cos(), d.cosh() * 0.3f64.sin()],
                triangle_wall_2d(d, 2.0 * PI / 3.0),
                triangle_wall_2d(d, 4.0 * PI / 3.0),
            ];
            let p = Polytope::from_normals(2, &normals, PolytopeKind::Type1)?;
            let path = DeformationPath::new(
                p,
                0,
                Box::new(move |t: f64| triangle_wall_2d(d, 0.3 + t + 0.13 * t * t)),
                1e-3,
            )?;
            (path, 1e-5)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let p = random_tetrahedron(&mut rng);
            let fixed: Vec<f64> = p.halfspaces()[0].coords().to_vec();
            // push wall 0 outward along its own direction
            let path = DeformationPath::new(
                p,
                0,
                Box::new(move |t: f64| push_wall(&fixed, t)),
                1e-3,
            )?;
            (path, 1e-2)
        };
        let report = schlafli::sdf_check(&path, &QuadratureConfig::default())?;
        details.push(format!("dim {dim} rel_err {:.3e}", report.rel_err));
        if report.rel_err > tol {
            return Ok((false, details.join(", ")));
        }
    }
    Ok((true, details.join(", ")))
}

fn triangle_wall_2d(d: f64, a: f64) -> Vec<f64> {
    vec![-d.sinh(), d.cosh() * a.cos(), d.cosh() * a.sin()]
}

/// Move a wall (-sinh d, cosh d · ω) to distance d + t along the same ω.
fn push_wall(coords: &[f64], t: f64) -> Vec<f64> {
    let d0 = (-coords[0]).asinh();
    let scale = (d0 + t).cosh() / d0.cosh();
    let mut out = vec![-(d0 + t).sinh()];
    out.extend(coords[1..].iter().map(|w| w * scale));
    out
}

fn check_mobius_suite() -> Result<(bool, String), Error> {
    let parent = Polytope::from_normals(
        3,
        &[vec![0.0, 0.0, 0.0, 1.0]],
        PolytopeKind::Type1,
    )?;
    let g = parent.restrict_to_boundary()?;
    // the inversion keeps the image disk near the origin at a comparable
    // radius, where the parent quadrature converges quickly
    let map = MobiusMap::inversion(vec![2.0, 0.3], 1.5)?
        .then(MobiusMap::translation(vec![-0.1, 0.2]))
        .then(MobiusMap::similarity(1.3)?);
    let gap = boundary::mobius_check(&g, &map, &suite_quad_cfg())?;
    Ok((gap < 5e-3, format!("boundary volume moved by {gap:.3e} under a Möbius map")))
}

fn check_embed_suite(rng: &mut ChaCha8Rng) -> Result<(bool, String), Error> {
    let mut max_quadric = 0.0f64;
    let mut max_pullback = 0.0f64;
    for (p, q) in [(1usize, 1usize), (2, 1), (2, 2)] {
        let signs = desitter::ambient_signs(p, q);
        for _ in 0..10 {
            let x = random_flat_point(rng, p + q);
            let y = desitter::embed_minkowski(&x, p, q)?;
            let quad: f64 = y.iter().zip(&signs).map(|(v, s)| s * v * v).sum();
            max_quadric = max_quadric.max((quad - 1.0).abs());
            max_pullback = max_pullback.max(desitter::pullback_metric_check(&x, p, q)?);
        }
    }
    let pass = max_quadric < desitter::QUADRIC_TOL && max_pullback < 1e-8;
    Ok((pass, format!("quadric residual {max_quadric:.3e}, pullback residual {max_pullback:.3e}")))
}
