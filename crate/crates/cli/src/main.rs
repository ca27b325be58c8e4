use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use curved_hessian::convergence::{self, ConvergenceError, ConvergenceRecord, EigenProblem, ForwardProblem, RefinementStrategy};
use curved_hessian::curvature;
use curved_hessian::io::{self as mesh_io, FieldExport, FieldFormat};
use curved_hessian::refine::BoundaryRule;
use curved_hessian::solve::{self, Constraints, SolveError};
use curved_hessian::surface::SmoothSurface;
use curved_hessian::{EnergyKind, EnergyOperator, GeometryCache, SparseMatrix, TriMesh};

#[derive(Parser, Debug)]
#[command(name = "curved-hessian", version, about = "Curved Hessian energy on triangle meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write L, M, D, K, B and Q as Matrix Market files.
    Assemble {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Minimize the energy subject to fixed vertex values.
    Interpolate {
        #[command(flatten)]
        common: Common,
        /// CSV of `vertex,value` rows.
        #[arg(long)]
        constraints: PathBuf,
        /// Output stem; `.csv` and `.ply` are appended.
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve `(Q + αB) u = αB f` for a noisy field `f`.
    Smooth {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        alpha: f64,
        /// CSV of `vertex,value` rows covering every vertex.
        #[arg(long, conflicts_with = "coordinate")]
        values: Option<PathBuf>,
        /// Smooth a vertex coordinate instead of a file field.
        #[arg(long, value_enum, default_value_t = Axis::Z)]
        coordinate: Axis,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fair the surface by repeatedly smoothing its vertex positions.
    Flow {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Smallest eigenvalues of `Q x = μ B x`.
    Eigs {
        #[command(flatten)]
        common: Common,
        #[arg(short, long, default_value_t = 6)]
        k: usize,
        /// CSV of `index,value` rows.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Output stem for the eigenvectors as field columns.
        #[arg(long)]
        vectors: Option<PathBuf>,
    },
    /// Refinement study with a fitted log-log slope.
    Converge(ConvergeArgs),
    /// Angle defects per vertex.
    Curvature {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long)]
    mesh: PathBuf,
    #[arg(long, value_enum, default_value_t = Energy::CurvedHessian)]
    energy: Energy,
}

#[derive(Args, Debug)]
struct ConvergeArgs {
    #[arg(long, value_enum)]
    problem: Problem,
    /// `sphere:<r>`, `ellipsoid:<a>,<b>,<c>` or `monge:<polynomial>`.
    #[arg(long)]
    surface: Option<String>,
    /// Field for the forward problem, a polynomial in x and y.
    #[arg(long, default_value = "x^2")]
    field: String,
    #[arg(long, default_value_t = 4)]
    levels: usize,
    #[arg(long, value_enum, default_value_t = Strategy::Loop)]
    strategy: Strategy,
    /// Relative slide of new vertices for the jittered strategy.
    #[arg(long, default_value_t = 0.3)]
    jitter: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Energy::CurvedHessian)]
    energy: Energy,
    /// Coarse mesh for the interpolation problem.
    #[arg(long)]
    mesh: Option<PathBuf>,
    /// Constraints for the interpolation problem, on coarse vertices.
    #[arg(long)]
    constraints: Option<PathBuf>,
    /// CSV of `level,h,num_vertices,error` rows.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Energy {
    CurvedHessian,
    SquaredLaplacian,
}

impl From<Energy> for EnergyKind {
    fn from(e: Energy) -> Self {
        match e {
            Energy::CurvedHessian => EnergyKind::CurvedHessian,
            Energy::SquaredLaplacian => EnergyKind::SquaredLaplacian,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Axis {
    X,
    Y,
    Z,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Problem {
    Forward,
    Eigenvalue,
    Bvp,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Strategy {
    /// Loop subdivision with the boundary kept on its coarse polygon.
    Loop,
    /// Loop subdivision with cubic spline boundary rules.
    LoopSmooth,
    Midpoint,
    Jittered,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 1 for input and assembly errors, 2 for constraint errors, 3 when a solver fails.
fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        let solve = match cause.downcast_ref::<ConvergenceError>() {
            Some(ConvergenceError::Solve(s)) => Some(s),
            _ => cause.downcast_ref::<SolveError>(),
        };
        if let Some(s) = solve {
            return match s {
                SolveError::InsufficientConstraints(_) | SolveError::InvalidConstraint(_) => 2,
                SolveError::NoConvergence(_) | SolveError::SolveFailure(_) => 3,
                _ => 1,
            };
        }
    }
    1
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Assemble { common, out_dir } => assemble(&common, &out_dir),
        Command::Interpolate { common, constraints, out } => interpolate(&common, &constraints, &out),
        Command::Smooth { common, alpha, values, coordinate, out } => smooth(&common, alpha, values.as_deref(), coordinate, &out),
        Command::Flow { common, alpha, steps, out } => flow(&common, alpha, steps, &out),
        Command::Eigs { common, k, out, vectors } => eigs(&common, k, out.as_deref(), vectors.as_deref()),
        Command::Converge(args) => converge(&args),
        Command::Curvature { mesh, out } => curvature_cmd(&mesh, out.as_deref()),
    }
}

fn load(path: &Path) -> Result<TriMesh> {
    mesh_io::read_mesh(path).with_context(|| format!("reading {}", path.display()))
}

fn with_ext(stem: &Path, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn save_both(export: &FieldExport, stem: &Path) -> Result<()> {
    for (ext, format) in [("csv", FieldFormat::Csv), ("ply", FieldFormat::Ply)] {
        let path = with_ext(stem, ext);
        mesh_io::save_field(export, &path, format).with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn assemble(common: &Common, out_dir: &Path) -> Result<()> {
    let mesh = load(&common.mesh)?;
    let geom = GeometryCache::new(&mesh);
    let crof = EnergyOperator::crof(&mesh, &geom, true).crof.expect("CROF operator carries its parts");
    let op = EnergyOperator::with_geometry(&mesh, &geom, common.energy.into());
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let matrices: [(&str, &SparseMatrix); 6] =
        [("L", &crof.l), ("M", &crof.m), ("D", &crof.d), ("K", &crof.k), ("B", &op.b), ("Q", &op.q)];
    println!("energy: {}", op.kind.name());
    println!("vertices {} edges {} faces {}", mesh.num_vertices(), mesh.num_edges(), mesh.num_faces());
    for (name, m) in matrices {
        let path = out_dir.join(format!("{name}.mtx"));
        mesh_io::save_matrix(m, &path).with_context(|| format!("writing {}", path.display()))?;
        let symmetry = if m.nrows() == m.ncols() { format!("{:.3e}", m.asymmetry()) } else { "n/a".into() };
        println!("{name}: {}x{} nnz {} symmetry residual {symmetry}", m.nrows(), m.ncols(), m.nnz());
    }
    Ok(())
}

fn interpolate(common: &Common, constraints: &Path, out: &Path) -> Result<()> {
    let mesh = load(&common.mesh)?;
    let entries = mesh_io::load_constraints(constraints).with_context(|| format!("reading {}", constraints.display()))?;
    let constraints = Constraints::new(entries, mesh.num_vertices())?;
    let op = EnergyOperator::build(&mesh, common.energy.into());
    let u = solve::min_with_fixed(&op, &constraints)?;
    let residual = constraints.entries().iter().map(|&(v, x)| (u[v] - x).abs()).fold(0.0, f64::max);
    println!("energy: {}", op.kind.name());
    println!("constraints {} max constraint residual {residual:.3e}", constraints.len());
    println!("energy value {:.16e}", op.energy(&u)?);
    save_both(&FieldExport::new(&mesh).with_column("value", u)?, out)
}

fn smooth(common: &Common, alpha: f64, values: Option<&Path>, coordinate: Axis, out: &Path) -> Result<()> {
    let mesh = load(&common.mesh)?;
    let n = mesh.num_vertices();
    let f = match values {
        Some(path) => {
            let rows = mesh_io::load_constraints(path).with_context(|| format!("reading {}", path.display()))?;
            let mut f = vec![f64::NAN; n];
            for (v, x) in rows {
                if v >= n {
                    bail!("vertex {v} out of range for {n} vertices");
                }
                f[v] = x;
            }
            if let Some(missing) = f.iter().position(|x| x.is_nan()) {
                bail!("no value given for vertex {missing}");
            }
            f
        }
        None => mesh.coordinate(coordinate as usize),
    };
    let op = EnergyOperator::build(&mesh, common.energy.into());
    let u = solve::smooth(&op, &f, alpha)?;
    let diff = u.iter().zip(&f).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("energy: {}", op.kind.name());
    println!("energy before {:.16e} after {:.16e}", op.energy(&f)?, op.energy(&u)?);
    println!("max diff {diff:.3e}");
    save_both(&FieldExport::new(&mesh).with_column("input", f)?.with_column("smoothed", u)?, out)
}

fn flow(common: &Common, alpha: f64, steps: usize, out: &Path) -> Result<()> {
    let mesh = load(&common.mesh)?;
    let result = solve::fairing_flow(&mesh, common.energy.into(), alpha, steps)?;
    for (step, d) in result.defects.iter().enumerate() {
        println!("step {step} total curvature {:.12e} max |kappa| {:.6e}", d.total(), d.max_abs());
    }
    let kappa = result.defects.last().expect("flow records its input").kappa.clone();
    save_both(&FieldExport::new(&result.mesh).with_column("kappa", kappa)?, out)
}

fn eigs(common: &Common, k: usize, out: Option<&Path>, vectors: Option<&Path>) -> Result<()> {
    let mesh = load(&common.mesh)?;
    let op = EnergyOperator::build(&mesh, common.energy.into());
    let result = solve::smallest_eigs(&op, k)?;
    println!("energy: {}", op.kind.name());
    println!("scale {:.6e} kernel dimension {}", result.scale, result.kernel_dimension());
    for (i, v) in result.values.iter().enumerate() {
        println!("{i} {v:.12e}");
    }
    if let Some(path) = out {
        let mut s = String::from("index,value\n");
        for (i, v) in result.values.iter().enumerate() {
            s.push_str(&format!("{i},{v:.16e}\n"));
        }
        fs::write(path, s).with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
    }
    if let Some(stem) = vectors {
        let mut export = FieldExport::new(&mesh);
        for (i, x) in result.vectors.into_iter().enumerate() {
            export = export.with_column(&format!("eig{i}"), x)?;
        }
        save_both(&export, stem)?;
    }
    Ok(())
}

fn converge(args: &ConvergeArgs) -> Result<()> {
    let kind: EnergyKind = args.energy.into();
    let strategy = match args.strategy {
        Strategy::Loop => RefinementStrategy::Loop(BoundaryRule::Fixed),
        Strategy::LoopSmooth => RefinementStrategy::Loop(BoundaryRule::SmoothCurve),
        Strategy::Midpoint => RefinementStrategy::Midpoint,
        Strategy::Jittered => RefinementStrategy::Jittered { amount: args.jitter, seed: args.seed },
    };
    let surface: Option<SmoothSurface> = args.surface.as_deref().map(str::parse).transpose()?;
    if args.levels < 2 {
        bail!("at least two levels are needed to fit a slope");
    }
    let record: ConvergenceRecord = match args.problem {
        Problem::Forward => {
            let Some(SmoothSurface::Monge(patch)) = surface else {
                bail!("the forward problem needs --surface monge:<polynomial>");
            };
            let problem = ForwardProblem::new(&patch.z.to_string(), &args.field)?;
            let (record, reference) = convergence::forward_energy_error(&problem, args.levels, strategy, kind)?;
            println!("reference energy {:.16e} (degree 7: {:.16e})", reference.deg4, reference.deg7);
            record
        }
        Problem::Eigenvalue => {
            let mut problem = EigenProblem::unit_sphere();
            match surface {
                None => {}
                Some(SmoothSurface::Sphere { center, radius }) => {
                    problem.exact /= radius.powi(4);
                    problem.surface = SmoothSurface::Sphere { center, radius };
                }
                Some(_) => bail!("the eigenvalue problem has a known solution only on spheres"),
            }
            convergence::eigenvalue_error(&problem, 0, args.levels - 1, strategy, kind)?
        }
        Problem::Bvp => {
            let (Some(mesh), Some(constraints)) = (&args.mesh, &args.constraints) else {
                bail!("the bvp problem needs --mesh and --constraints");
            };
            let coarse = load(mesh)?;
            let entries = mesh_io::load_constraints(constraints).with_context(|| format!("reading {}", constraints.display()))?;
            let constraints = Constraints::new(entries, coarse.num_vertices())?;
            convergence::bvp_self_convergence(&coarse, &constraints, args.levels, strategy, surface.as_ref(), kind)?
        }
    };
    println!("{} [{}, {}]", record.problem, record.strategy, kind.name());
    for l in &record.levels {
        println!("level {} vertices {} h {:.6e} error {:.6e}", l.level, l.num_vertices, l.h, l.error);
    }
    println!("slope {:.4}", record.slope);
    if let Some(path) = &args.out {
        record.save_csv(path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn curvature_cmd(mesh: &Path, out: Option<&Path>) -> Result<()> {
    let mesh = load(mesh)?;
    let d = curvature::angle_defects(&mesh, &GeometryCache::new(&mesh));
    let chi = mesh.euler_characteristic();
    println!("total curvature {:.15e} (2 pi chi = {:.15e}, chi = {chi})", d.total(), 2.0 * std::f64::consts::PI * chi as f64);
    println!("max |kappa| {:.6e}", d.max_abs());
    if let Some(stem) = out {
        save_both(&FieldExport::new(&mesh).with_column("kappa", d.kappa)?, stem)?;
    }
    Ok(())
}
