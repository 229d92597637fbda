//! `fsidg` command-line driver.
//!
//! Exit codes: 0 success, 1 configuration or input error, 2 numerical
//! failure, 3 a `check` property failed.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use nalgebra::DMatrix;

use fsidg::assembly::check_coercivity;
use fsidg::config::SimulationConfig;
use fsidg::experiment::{convergence_study, mesh_levels, newmark_params, simulate, Discretization, ExperimentError, RunOutputs};
use fsidg::geometry::{write_msh, EdgeKind, Mesh, Subdomain};
use fsidg::sparse::CsrMatrix;
use fsidg::timestepper::{connected_components, stability_limit};

#[derive(Parser, Debug)]
#[command(name = "fsidg", version, about = "Interior penalty DG solver for acoustic-elastic wave interaction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Configuration file (key = value lines); built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for assembly and level fan-out.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Output directory; overrides OUTPUT_DIR and output.dir.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Number of mesh levels in a convergence study (reference excluded).
    #[arg(long, global = true)]
    levels: Option<usize>,
    /// Write a VTK snapshot every N steps (0 disables).
    #[arg(long, global = true)]
    snapshot_stride: Option<usize>,
    /// Perturb A asymmetrically before checking it.
    #[arg(long, global = true, hide = true)]
    tamper_asymmetric: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Build or import the mesh and write it with a manifest.
    Mesh,
    /// Integrate one configuration to the final time.
    Run,
    /// Convergence study against a finer reference level.
    Converge,
    /// Matrix property checks.
    Check,
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Numerical(String),
    CheckFailed,
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::CheckFailed => 3,
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| io_err(path, e))
}

struct Context {
    cfg: SimulationConfig,
    output: PathBuf,
    tamper: bool,
}

impl Context {
    fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let mut cfg = match &cli.config {
            Some(path) => SimulationConfig::load(path).map_err(|e| CliError::Input(e.to_string()))?,
            None => SimulationConfig::default(),
        };
        if let Some(levels) = cli.levels {
            cfg.levels = levels;
        }
        if let Some(stride) = cli.snapshot_stride {
            cfg.snapshot_stride = stride;
        }
        let output = cli
            .output
            .clone()
            .or_else(|| std::env::var_os("OUTPUT_DIR").map(PathBuf::from))
            .unwrap_or_else(|| cfg.output_dir.clone());
        std::fs::create_dir_all(&output).map_err(|e| io_err(&output, e))?;
        Ok(Context { cfg, output, tamper: cli.tamper_asymmetric })
    }

    fn mesh(&self) -> Result<Arc<Mesh>, CliError> {
        Ok(mesh_levels(&self.cfg, 0)?.remove(0))
    }
}

fn cmd_mesh(ctx: &Context) -> Result<(), CliError> {
    let mesh = ctx.mesh()?;
    let msh = ctx.output.join("mesh.msh");
    std::fs::write(&msh, write_msh(&mesh)).map_err(|e| io_err(&msh, e))?;
    let mut edges = serde_json::Map::new();
    for kind in EdgeKind::ALL.into_iter().chain([EdgeKind::FreeElastic]) {
        edges.insert(kind.name().into(), mesh.count_edges(kind).into());
    }
    let manifest = serde_json::json!({
        "vertices": mesh.vertices.len(),
        "elements": {
            "elastic": mesh.count_elements(Subdomain::Elastic),
            "fluid": mesh.count_elements(Subdomain::Fluid),
        },
        "mesh_size": mesh.mesh_size,
        "refine": ctx.cfg.refine,
        "edges": edges,
    });
    let path = ctx.output.join("mesh.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest is plain data");
    std::fs::write(&path, text + "\n").map_err(|e| io_err(&path, e))?;
    println!(
        "mesh: {} elements ({} elastic, {} fluid), h = {:.4e}",
        mesh.num_elements(),
        mesh.count_elements(Subdomain::Elastic),
        mesh.count_elements(Subdomain::Fluid),
        mesh.mesh_size
    );
    println!("wrote {} and {}", msh.display(), path.display());
    Ok(())
}

fn cmd_run(ctx: &Context) -> Result<(), CliError> {
    let disc = Discretization::new(&ctx.cfg, ctx.mesh()?)?;
    let snapshots = ctx.output.join("snapshots");
    let out = RunOutputs { snapshot_dir: (ctx.cfg.snapshot_stride > 0).then_some(snapshots.as_path()) };
    let params = newmark_params(&ctx.cfg, disc.mesh.mesh_size);
    println!(
        "run: {} DOFs, h = {:.4e}, l = {:.4e}, {} steps",
        disc.dofs.size,
        disc.mesh.mesh_size,
        params.step,
        params.num_steps()
    );
    let result = simulate(&ctx.cfg, &disc, out)?;
    let path = ctx.output.join("energy.csv");
    let mut w = create(&path)?;
    fsidg::timestepper::EnergyRecorder::write_records(&result.energy, &mut w).map_err(|e| io_err(&path, e))?;
    w.flush().map_err(|e| io_err(&path, e))?;
    let last = result.energy.last().expect("the initial state is always recorded");
    println!("E(T) = {:.16e}", last.e);
    println!("F(T) = {:.16e}", last.f);
    println!("wrote {}", path.display());
    if !result.snapshots.is_empty() {
        println!("wrote {} snapshots to {}", result.snapshots.len(), snapshots.display());
    }
    Ok(())
}

fn cmd_converge(ctx: &Context) -> Result<(), CliError> {
    let report = convergence_study(&ctx.cfg, ctx.cfg.levels)?;
    print!("{}", report.table());
    let path = ctx.output.join("convergence.csv");
    std::fs::write(&path, report.to_csv()).map_err(|e| io_err(&path, e))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Smallest and largest eigenvalue of a symmetric matrix, block by block.
fn block_extremes(m: &CsrMatrix, rows: &[Vec<usize>]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for block in rows {
        let d = DMatrix::from_fn(block.len(), block.len(), |i, j| m.get(block[i], block[j]));
        let e = d.symmetric_eigen().eigenvalues;
        lo = lo.min(e.min());
        hi = hi.max(e.max());
    }
    (lo, hi)
}

fn write_mtx(path: &Path, m: &CsrMatrix) -> Result<(), CliError> {
    let mut w = create(path)?;
    m.write_matrix_market(&mut w).and_then(|_| w.flush()).map_err(|e| io_err(path, e))
}

fn cmd_check(ctx: &Context) -> Result<(), CliError> {
    let disc = Discretization::new(&ctx.cfg, ctx.mesh()?)?;
    let (m, n, mut a) = (&disc.matrices.mass, &disc.matrices.damping, disc.matrices.stiffness.clone());
    if ctx.tamper {
        let mut t = a.triplets();
        let bump = 1e-6 * a.max_abs();
        t.push((0, a.ncols - 1, bump));
        a = CsrMatrix::from_triplets(a.nrows, a.ncols, t);
    }
    println!("check: {} elements, {} DOFs, alpha = {}, beta = {}", disc.mesh.num_elements(), disc.dofs.size, ctx.cfg.penalty.alpha, ctx.cfg.penalty.beta);
    let mut all = true;

    let asym = a.asymmetry();
    let sym_ok = asym <= 1e-12 * a.max_abs();
    all &= sym_ok;
    println!("{} symmetry: max|A - A^T| = {asym:.3e} (limit {:.3e})", verdict(sym_ok), 1e-12 * a.max_abs());

    match check_coercivity(&a) {
        Ok(r) => {
            all &= r.accepted;
            println!(
                "{} coercivity: lambda_min(A) = {:.6e}, ||A|| = {:.6e} ({})",
                verdict(r.accepted),
                r.lambda_min,
                r.norm,
                if r.dense { "dense eigensolve" } else { "shifted power iteration" }
            );
        }
        Err(e) => {
            all = false;
            println!("FAIL coercivity: {e}");
        }
    }

    let sym = n.linear_combination(1.0, &n.transpose(), 1.0);
    let boundary: std::collections::BTreeSet<usize> = disc
        .mesh
        .edges_of_kind(EdgeKind::Artificial)
        .flat_map(|(_, e)| disc.dofs.range(e.elements[0]))
        .collect();
    let support: std::collections::BTreeSet<usize> =
        sym.triplets().into_iter().filter(|t| t.2 != 0.0).flat_map(|(r, c, _)| [r, c]).collect();
    let support_ok = support.is_subset(&boundary);
    let rows: Vec<usize> = support.into_iter().collect();
    let (lo, hi) = if rows.is_empty() { (0.0, 0.0) } else { block_extremes(&sym, &[rows]) };
    let psd_ok = lo >= -1e-12 * hi.abs().max(1e-300);
    all &= support_ok && psd_ok;
    println!(
        "{} dissipation: lambda_min(N + N^T) = {lo:.3e}, lambda_max = {hi:.3e}, support on artificial-boundary DOFs: {}",
        verdict(support_ok && psd_ok),
        if support_ok { "yes" } else { "no" }
    );

    let (mlo, mhi) = block_extremes(m, &connected_components(m));
    let m_ok = mlo > 0.0 && m.asymmetry() == 0.0;
    all &= m_ok;
    println!("{} mass: lambda_min(M) = {mlo:.3e}, cond(M) = {:.3e}", verdict(m_ok), mhi / mlo);

    let l = newmark_params(&ctx.cfg, disc.mesh.mesh_size).step;
    match stability_limit(m, &disc.matrices.stiffness, 1e-8, 20_000) {
        Ok(est) => println!(
            "info explicit step: l = {l:.4e}, limit 2/sqrt(lambda_max(M^-1 A)) = {:.4e}{}",
            est.step_limit,
            if l > est.step_limit { " (step exceeds the limit; the explicit scheme will blow up)" } else { "" }
        ),
        Err(e) => println!("info explicit step: estimate failed: {e}"),
    }

    write_mtx(&ctx.output.join("A.mtx"), &a)?;
    write_mtx(&ctx.output.join("M.mtx"), m)?;
    write_mtx(&ctx.output.join("N.mtx"), n)?;
    println!("wrote A.mtx, M.mtx, N.mtx to {}", ctx.output.display());
    if all {
        Ok(())
    } else {
        Err(CliError::CheckFailed)
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.max(1))
        .build_global()
        .map_err(|e| CliError::Input(format!("thread pool: {e}")))?;
    let ctx = Context::from_cli(cli)?;
    match cli.command {
        Command::Mesh => cmd_mesh(&ctx),
        Command::Run => cmd_run(&ctx),
        Command::Converge => cmd_converge(&ctx),
        Command::Check => cmd_check(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Usage errors are configuration errors; help and version are not errors.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Input(m) => eprintln!("error: {m}"),
                CliError::Numerical(m) => eprintln!("numerical failure: {m}"),
                CliError::CheckFailed => eprintln!("check failed"),
            }
            ExitCode::from(e.code())
        }
    }
}
