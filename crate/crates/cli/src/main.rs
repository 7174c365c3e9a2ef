//! Command-line surface: solve, verify, and sweep commands with CSV or
//! JSON reports. Exit status 0 means every asserted inequality held
//! within its slack; 1 means a violated invariant (reported as JSON);
//! 2 means a configuration or I/O error.

mod domain_file;
mod output;
mod sweep;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use shellspec_core::{
    af_check, eigen_beta_derivative, g_inverse_width, match_shell, maximize_torsion,
    minimize_eigen, solve_radial_eigen, solve_radial_torsion, triangulate_seeded, trivial_bounds,
    verify_eigen_chain, verify_torsion_chain, ShellSpec,
};

use domain_file::load_domain;
use output::{emit, fail, OutputOpts};

#[derive(Parser)]
#[command(name = "shellspec", version, about = "Robin-Neumann p-Laplacian shell-bound toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOut {
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    /// Report format
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
}

#[derive(Args, Clone)]
struct ShellArgs {
    /// Space dimension
    #[arg(long, default_value_t = 2)]
    n: u32,
    /// Inner radius of the shell
    #[arg(long, default_value_t = 1.0)]
    r1: f64,
    /// Outer radius of the shell
    #[arg(long, default_value_t = 2.0)]
    r2: f64,
}

#[derive(Args, Clone)]
struct MeshArgs {
    /// Domain file: JSON {"outer": [[x,y],...], "hole": [[x,y],...]}
    #[arg(long)]
    domain: std::path::PathBuf,
    /// Target mesh size
    #[arg(long, default_value_t = 0.05)]
    h: f64,
    /// Seed for the deterministic mesh jitter
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Quermassintegrals and Aleksandrov-Fenchel margins of the hole
    Quermass {
        #[command(flatten)]
        mesh: MeshArgs,
        #[command(flatten)]
        out: CommonOut,
    },
    /// Radial Robin-Neumann eigenvalue on a shell
    RadialEigen {
        #[command(flatten)]
        shell: ShellArgs,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        out: CommonOut,
    },
    /// Radial p-torsional rigidity on a shell
    RadialTorsion {
        #[command(flatten)]
        shell: ShellArgs,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[command(flatten)]
        out: CommonOut,
    },
    /// Discrete eigenvalue on a meshed perforated domain
    MeshEigen {
        #[command(flatten)]
        mesh: MeshArgs,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Lower exponent q of the λ_q quotient (defaults to p)
        #[arg(long)]
        q: Option<f64>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[command(flatten)]
        out: CommonOut,
    },
    /// Discrete torsional rigidity on a meshed perforated domain
    MeshTorsion {
        #[command(flatten)]
        mesh: MeshArgs,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[command(flatten)]
        out: CommonOut,
    },
    /// Full eigenvalue pipeline: shell match, radial solve, mesh solve,
    /// web chain, verdict on λ(β,Σ) ≤ λ(β,A)
    VerifyEigen {
        #[command(flatten)]
        mesh: MeshArgs,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Number of levels in the proof-chain sweep
        #[arg(long, default_value_t = 64)]
        levels: usize,
        #[command(flatten)]
        out: CommonOut,
    },
    /// Full torsion pipeline: verdict on T(β,Σ) ≥ T(β,A)
    VerifyTorsion {
        #[command(flatten)]
        mesh: MeshArgs,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 64)]
        levels: usize,
        #[command(flatten)]
        out: CommonOut,
    },
    /// λ or T over a β grid with monotonicity and concavity flags
    SweepBeta {
        #[command(flatten)]
        shell: ShellArgs,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Grid spec: min,max,count[,log]
        #[arg(long, value_name = "MIN,MAX,COUNT[,log]")]
        beta_grid: String,
        /// Quantity to sweep
        #[arg(long, value_parser = ["eigen", "torsion"], default_value = "eigen")]
        kind: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        out: CommonOut,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok(pass) => {
            if pass {
                0
            } else {
                1
            }
        }
        Err(msg) => {
            eprintln!("{}", json!({ "error": msg }));
            2
        }
    };
    std::process::exit(code);
}

fn run(command: Command) -> Result<bool, String> {
    match command {
        Command::Quermass { mesh, out } => cmd_quermass(mesh, out),
        Command::RadialEigen { shell, p, beta, tol, out } => {
            cmd_radial_eigen(shell, p, beta, tol, out)
        }
        Command::RadialTorsion { shell, p, beta, out } => cmd_radial_torsion(shell, p, beta, out),
        Command::MeshEigen { mesh, p, beta, q, tol, out } => {
            cmd_mesh_eigen(mesh, p, beta, q, tol, out)
        }
        Command::MeshTorsion { mesh, p, beta, tol, out } => cmd_mesh_torsion(mesh, p, beta, tol, out),
        Command::VerifyEigen { mesh, p, beta, tol, levels, out } => {
            cmd_verify(mesh, p, beta, tol, levels, out, true)
        }
        Command::VerifyTorsion { mesh, p, beta, tol, levels, out } => {
            cmd_verify(mesh, p, beta, tol, levels, out, false)
        }
        Command::SweepBeta { shell, p, beta_grid, kind, tol, out } => {
            sweep::cmd_sweep(shell, p, &beta_grid, &kind, tol, out)
        }
    }
}

fn shell_of(args: &ShellArgs) -> Result<ShellSpec, String> {
    ShellSpec::new(args.n, args.r1, args.r2).map_err(|e| e.to_string())
}

fn cmd_quermass(mesh_args: MeshArgs, out: CommonOut) -> Result<bool, String> {
    let domain = load_domain(&mesh_args.domain)?;
    let qv = domain.hole().quermassintegrals().map_err(|e| e.to_string())?;
    let report = af_check(&qv);
    let pass = report.all_nonnegative(1e-10);
    let doc = json!({
        "command": "quermass",
        "n": qv.dim(),
        "w": qv.w(),
        "volume": qv.volume(),
        "perimeter": qv.perimeter(),
        "matched_ball_radius": report.matched_ball_radius,
        "af_margins": report.margins.iter()
            .map(|m| json!({"i": m.i, "j": m.j, "margin": m.margin}))
            .collect::<Vec<_>>(),
        "pass": pass,
    });
    emit(&doc, &OutputOpts::from(&out))?;
    Ok(pass)
}

fn cmd_radial_eigen(
    shell_args: ShellArgs,
    p: f64,
    beta: f64,
    tol: f64,
    out: CommonOut,
) -> Result<bool, String> {
    let shell = shell_of(&shell_args)?;
    let res = solve_radial_eigen(&shell, p, beta, tol).map_err(|e| e.to_string())?;
    let constant_bound = beta * shell.inner_surface() / shell.volume();
    let dn = shellspec_core::radial_dirichlet_neumann(&shell, p, tol).map_err(|e| e.to_string())?;
    // §2.1 trivial bounds must hold exactly as computed values
    let pass = res.lambda <= constant_bound && res.lambda <= dn * (1.0 + 1e-9);
    let doc = json!({
        "command": "radial-eigen",
        "n": shell.n, "r1": shell.r1, "r2": shell.r2,
        "p": p, "beta": beta,
        "lambda": res.lambda,
        "residual": res.residual,
        "dlambda_dbeta": eigen_beta_derivative(&res.profile),
        "constant_test_bound": constant_bound,
        "dirichlet_neumann_limit": dn,
        "g_inverse_width": g_inverse_width(&res.profile),
        "width": shell.width(),
        "pass": pass,
    });
    emit(&doc, &OutputOpts::from(&out))?;
    if !pass {
        fail("radial eigenvalue exceeded a trivial upper bound", &doc);
    }
    Ok(pass)
}

fn cmd_radial_torsion(
    shell_args: ShellArgs,
    p: f64,
    beta: f64,
    out: CommonOut,
) -> Result<bool, String> {
    let shell = shell_of(&shell_args)?;
    let res = solve_radial_torsion(&shell, p, beta).map_err(|e| e.to_string())?;
    let doc = json!({
        "command": "radial-torsion",
        "n": shell.n, "r1": shell.r1, "r2": shell.r2,
        "p": p, "beta": beta,
        "t": res.t,
        "g_inverse_width": g_inverse_width(&res.profile),
        "width": shell.width(),
        "pass": true,
    });
    emit(&doc, &OutputOpts::from(&out))?;
    Ok(true)
}

fn cmd_mesh_eigen(
    mesh_args: MeshArgs,
    p: f64,
    beta: f64,
    q: Option<f64>,
    tol: f64,
    out: CommonOut,
) -> Result<bool, String> {
    let domain = load_domain(&mesh_args.domain)?;
    let mesh = triangulate_seeded(&domain, mesh_args.h, mesh_args.seed).map_err(|e| e.to_string())?;
    let q_exp = q.unwrap_or(p);
    let res = minimize_eigen(&mesh, p, beta, q_exp, tol).map_err(|e| e.to_string())?;
    let (constant_bound, dn) = trivial_bounds(&mesh, p, beta, tol).map_err(|e| e.to_string())?;
    let pass = q_exp != p || (res.lambda <= constant_bound && res.lambda <= dn);
    let quality = mesh.quality().map_err(|e| e.to_string())?;
    let doc = json!({
        "command": "mesh-eigen",
        "p": p, "beta": beta, "q": q_exp, "h": mesh_args.h, "seed": mesh_args.seed,
        "lambda": res.lambda,
        "residual": res.residual,
        "iterations": res.iterations,
        "constant_test_bound": constant_bound,
        "dirichlet_neumann_limit": dn,
        "vertices": mesh.vertices.len(),
        "triangles": mesh.triangles.len(),
        "min_angle_deg": quality.min_angle_deg,
        "pass": pass,
    });
    emit(&doc, &OutputOpts::from(&out))?;
    if !pass {
        fail("mesh eigenvalue exceeded a trivial upper bound", &doc);
    }
    Ok(pass)
}

fn cmd_mesh_torsion(
    mesh_args: MeshArgs,
    p: f64,
    beta: f64,
    tol: f64,
    out: CommonOut,
) -> Result<bool, String> {
    let domain = load_domain(&mesh_args.domain)?;
    let mesh = triangulate_seeded(&domain, mesh_args.h, mesh_args.seed).map_err(|e| e.to_string())?;
    let res = maximize_torsion(&mesh, p, beta, tol).map_err(|e| e.to_string())?;
    let doc = json!({
        "command": "mesh-torsion",
        "p": p, "beta": beta, "h": mesh_args.h, "seed": mesh_args.seed,
        "t": res.t,
        "iterations": res.iterations,
        "vertices": mesh.vertices.len(),
        "triangles": mesh.triangles.len(),
        "pass": true,
    });
    emit(&doc, &OutputOpts::from(&out))?;
    Ok(true)
}

fn cmd_verify(
    mesh_args: MeshArgs,
    p: f64,
    beta: f64,
    tol: f64,
    levels: usize,
    out: CommonOut,
    eigen: bool,
) -> Result<bool, String> {
    let domain = load_domain(&mesh_args.domain)?;
    let mesh = triangulate_seeded(&domain, mesh_args.h, mesh_args.seed).map_err(|e| e.to_string())?;
    let qv = domain.hole().quermassintegrals().map_err(|e| e.to_string())?;
    let shell = match_shell(&qv, domain.area(), 2).map_err(|e| e.to_string())?;

    let (shell_value, mesh_value, chain) = if eigen {
        let radial = solve_radial_eigen(&shell, p, beta, tol.min(1e-10)).map_err(|e| e.to_string())?;
        let disc = minimize_eigen(&mesh, p, beta, p, tol).map_err(|e| e.to_string())?;
        let chain = verify_eigen_chain(&domain, &radial.profile, radial.lambda, &mesh, levels)
            .map_err(|e| e.to_string())?;
        (radial.lambda, disc.lambda, chain)
    } else {
        let radial = solve_radial_torsion(&shell, p, beta).map_err(|e| e.to_string())?;
        let disc = maximize_torsion(&mesh, p, beta, tol).map_err(|e| e.to_string())?;
        let chain = verify_torsion_chain(&domain, &radial.profile, radial.t, &mesh, levels)
            .map_err(|e| e.to_string())?;
        (radial.t, disc.t, chain)
    };

    // theorem verdict: the discrete value must sit on the certified
    // side of the shell value, with the chain slack as tolerance
    let slack = chain
        .checks
        .iter()
        .find(|c| c.name == "final_quotient")
        .map(|c| c.slack)
        .unwrap_or(0.0);
    let margin = if eigen { shell_value - mesh_value } else { mesh_value - shell_value };
    let theorem_pass = margin >= -slack;
    let pass = theorem_pass && chain.pass;

    let doc = json!({
        "command": if eigen { "verify-eigen" } else { "verify-torsion" },
        "p": p, "beta": beta, "h": mesh_args.h, "seed": mesh_args.seed,
        "levels": levels,
        "shell": { "r1": shell.r1, "r2": shell.r2 },
        "shell_value": shell_value,
        "mesh_value": mesh_value,
        "theorem_margin": margin,
        "theorem_slack": slack,
        "theorem_pass": theorem_pass,
        "chain": chain,
        "pass": pass,
    });
    emit(&doc, &OutputOpts::from(&out))?;
    if !pass {
        fail("shell-bound verification failed", &doc);
    }
    Ok(pass)
}
