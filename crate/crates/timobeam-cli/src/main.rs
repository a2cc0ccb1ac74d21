use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use timobeam::{
    assemble_and_solve, compute_errors, estimate_rate, BoundaryCondition, ConvergenceRecord,
    ErrorField, ExactSolution, Mesh, RateEstimate, Thickness,
};

#[derive(Parser)]
#[command(
    name = "timobeam",
    version,
    about = "DPG solver for the scaled Timoshenko beam bending model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a convergence study over a grid of thicknesses and degrees.
    Study(StudyArgs),
    /// Solve a single configuration and print its errors.
    Solve(SolveArgs),
}

#[derive(Args)]
struct StudyArgs {
    /// Boundary condition: cc, cs, cf or ss.
    #[arg(long, default_value = "cf")]
    bc: String,
    /// Comma-separated thickness values in [0, 1]; "0" is allowed.
    #[arg(long, default_value = "1,1e-3,1e-6,0")]
    t: String,
    /// Comma-separated polynomial degrees, each one of 0, 1, 2.
    #[arg(long, default_value = "0,1,2")]
    p: String,
    /// Number of elements on the coarsest mesh.
    #[arg(long, default_value_t = 8)]
    n0: usize,
    /// Number of uniform refinement levels (the coarsest mesh counts as one).
    #[arg(long, default_value_t = 5)]
    levels: usize,
    /// Load: "sin" for f(x) = sin(pi x), "zero" for f = 0.
    #[arg(long, default_value = "sin")]
    load: String,
    /// Output CSV path.
    #[arg(long, default_value = "study.csv")]
    out: PathBuf,
    /// Also write a gnuplot script next to the CSV.
    #[arg(long)]
    gnuplot: bool,
}

#[derive(Args)]
struct SolveArgs {
    /// Boundary condition: cc, cs, cf or ss.
    #[arg(long, default_value = "cf")]
    bc: String,
    /// Thickness value in [0, 1].
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Polynomial degree, one of 0, 1, 2.
    #[arg(long, default_value_t = 1)]
    p: usize,
    /// Number of elements.
    #[arg(long, default_value_t = 16)]
    n: usize,
    /// Load: "sin" for f(x) = sin(pi x), "zero" for f = 0.
    #[arg(long, default_value = "sin")]
    load: String,
}

#[derive(Clone, Copy)]
enum Load {
    Sin,
    Zero,
}

impl Load {
    fn parse(s: &str) -> Result<Load, String> {
        match s {
            "sin" => Ok(Load::Sin),
            "zero" => Ok(Load::Zero),
            other => Err(format!(
                "unknown load \"{other}\" (expected \"sin\" or \"zero\")"
            )),
        }
    }

    fn eval(self, x: f64) -> f64 {
        match self {
            Load::Sin => (PI * x).sin(),
            Load::Zero => 0.0,
        }
    }

    fn exact(self, bc: BoundaryCondition, t: Thickness) -> Result<ExactSolution, String> {
        match self {
            Load::Sin => ExactSolution::sin_load(bc, t).map_err(|e| e.to_string()),
            Load::Zero => Ok(ExactSolution::zero_load(bc, t)),
        }
    }
}

fn parse_thicknesses(s: &str) -> Result<Vec<Thickness>, String> {
    s.split(',')
        .map(|tok| {
            let v: f64 = tok
                .trim()
                .parse()
                .map_err(|_| format!("thickness \"{tok}\" is not a number"))?;
            Thickness::new(v).map_err(|e| e.to_string())
        })
        .collect()
}

fn parse_degrees(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|tok| {
            let p: usize = tok
                .trim()
                .parse()
                .map_err(|_| format!("degree \"{tok}\" is not a nonnegative integer"))?;
            if p > 2 {
                return Err(format!("degree {p} is not supported (expected 0, 1 or 2)"));
            }
            Ok(p)
        })
        .collect()
}

fn csv_row(rec: &ConvergenceRecord) -> String {
    format!(
        "{},{},{},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}",
        rec.level,
        rec.n,
        rec.dofs,
        rec.h,
        rec.err_u,
        rec.err_m,
        rec.proj_u,
        rec.proj_m,
        rec.trace_u,
        rec.trace_m,
        rec.residual
    )
}

fn rate_label(recs: &[ConvergenceRecord], field: ErrorField) -> String {
    match estimate_rate(recs, field) {
        Ok(RateEstimate::Slope(s)) => format!("{s:.3}"),
        Ok(RateEstimate::Exact) => "exact".to_string(),
        Err(_) => "n/a".to_string(),
    }
}

const CSV_HEADER: &str = "level,n,dofs,h,err_u,err_M,proj_u,proj_M,trace_u,trace_M,residual";

fn run_study(args: &StudyArgs) -> Result<ExitCode, String> {
    let bc: BoundaryCondition = args.bc.parse().map_err(|e| format!("{e}"))?;
    let thicknesses = parse_thicknesses(&args.t)?;
    let degrees = parse_degrees(&args.p)?;
    let load = Load::parse(&args.load)?;
    if args.n0 == 0 {
        return Err("--n0 must be at least 1".to_string());
    }
    if args.levels == 0 {
        return Err("--levels must be at least 1".to_string());
    }

    let mut csv = String::new();
    csv.push_str(CSV_HEADER);
    csv.push('\n');
    let mut summary = String::new();
    let mut attempted = 0usize;
    let mut solved = 0usize;

    for &t in &thicknesses {
        for &p in &degrees {
            let exact = load.exact(bc, t)?;
            let mut recs = Vec::new();
            let mut mesh = Mesh::uniform(args.n0).map_err(|e| e.to_string())?;
            for level in 0..args.levels {
                attempted += 1;
                match assemble_and_solve(&mesh, bc, t, p, |x| load.eval(x)) {
                    Ok(sol) => {
                        solved += 1;
                        let rec = compute_errors(&sol, &exact, &mesh, level);
                        csv.push_str(&csv_row(&rec));
                        csv.push('\n');
                        recs.push(rec);
                    }
                    Err(e) => {
                        eprintln!(
                            "warning: t={} p={} n={} failed: {e}; level skipped",
                            t,
                            p,
                            mesh.num_elements()
                        );
                    }
                }
                if level + 1 < args.levels {
                    mesh = mesh.refine_uniform();
                }
            }
            let _ = write!(summary, "bc={} t={} p={}:", bc, t, p);
            for field in ErrorField::ALL {
                let _ = write!(summary, " {}={}", field.name(), rate_label(&recs, field));
            }
            summary.push('\n');
        }
    }

    if solved == 0 {
        eprintln!("error: solver failed at all {attempted} levels");
        return Ok(ExitCode::from(2));
    }

    std::fs::write(&args.out, csv)
        .map_err(|e| format!("cannot write {}: {e}", args.out.display()))?;
    if args.gnuplot {
        let script = gnuplot_script(args, &thicknesses, &degrees);
        let path = gnuplot_path(&args.out);
        std::fs::write(&path, script)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        println!("wrote {} and {}", args.out.display(), path.display());
    } else {
        println!("wrote {}", args.out.display());
    }
    println!("estimated rates (least-squares slope of log error vs log h):");
    print!("{summary}");
    Ok(ExitCode::SUCCESS)
}

fn gnuplot_path(out: &std::path::Path) -> PathBuf {
    let mut p = out.to_path_buf();
    p.set_extension("gp");
    p
}

/// Log-log error plot per (t, p) block; rows of one configuration are
/// consecutive in the CSV, so gnuplot's `every` picks them by index.
fn gnuplot_script(args: &StudyArgs, thicknesses: &[Thickness], degrees: &[usize]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set logscale xy");
    let _ = writeln!(s, "set xlabel 'h'");
    let _ = writeln!(s, "set ylabel 'L2 error'");
    let _ = writeln!(s, "set key outside");
    let levels = args.levels;
    let mut plots = Vec::new();
    let mut block = 0usize;
    for t in thicknesses {
        for p in degrees {
            let first = 1 + block * levels;
            let last = first + levels - 1;
            plots.push(format!(
                "'{}' every ::{first}::{last} using 4:5 with linespoints title 't={t} p={p} err_u'",
                args.out.display()
            ));
            plots.push(format!(
                "'{}' every ::{first}::{last} using 4:6 with linespoints title 't={t} p={p} err_M'",
                args.out.display()
            ));
            block += 1;
        }
    }
    let _ = writeln!(s, "plot \\\n  {}", plots.join(", \\\n  "));
    s
}

fn run_solve(args: &SolveArgs) -> Result<ExitCode, String> {
    let bc: BoundaryCondition = args.bc.parse().map_err(|e| format!("{e}"))?;
    let t = Thickness::new(args.t).map_err(|e| e.to_string())?;
    if args.p > 2 {
        return Err(format!(
            "degree {} is not supported (expected 0, 1 or 2)",
            args.p
        ));
    }
    let load = Load::parse(&args.load)?;
    let mesh = Mesh::uniform(args.n).map_err(|e| e.to_string())?;
    let exact = load.exact(bc, t)?;
    match assemble_and_solve(&mesh, bc, t, args.p, |x| load.eval(x)) {
        Ok(sol) => {
            let rec = compute_errors(&sol, &exact, &mesh, 0);
            println!(
                "bc={} t={} p={} n={} dofs={}",
                bc, t, args.p, args.n, rec.dofs
            );
            println!("err_u    = {:.11e}", rec.err_u);
            println!("err_M    = {:.11e}", rec.err_m);
            println!("proj_u   = {:.11e}", rec.proj_u);
            println!("proj_M   = {:.11e}", rec.proj_m);
            println!("trace_u  = {:.11e}", rec.trace_u);
            println!("trace_M  = {:.11e}", rec.trace_m);
            println!("residual = {:.11e}", rec.residual);
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => {
            eprintln!("error: solver failed: {e}");
            Ok(ExitCode::from(2))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let run = match &cli.command {
        Command::Study(args) => run_study(args),
        Command::Solve(args) => run_solve(args),
    };
    match run {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
