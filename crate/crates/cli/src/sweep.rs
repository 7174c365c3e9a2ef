//! β-sweep orchestration: independent radial solves over a β grid,
//! run on a worker pool capped by SHELLSPEC_THREADS, with rows ordered
//! deterministically by β and monotonicity/concavity flags attached.

use serde_json::json;
use shellspec_core::gfmt::g17;
use shellspec_core::{
    eigen_beta_derivative, radial_dirichlet_neumann, solve_radial_eigen, solve_radial_torsion,
    ShellSpec,
};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::output::{rows_to_csv, write_report, OutputOpts};
use crate::{shell_of, CommonOut, ShellArgs};

pub struct GridSpec {
    pub betas: Vec<f64>,
}

pub fn parse_grid(spec: &str) -> Result<GridSpec, String> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 3 && parts.len() != 4 {
        return Err(format!("--beta-grid expects min,max,count[,log], got '{spec}'"));
    }
    let min: f64 = parts[0].trim().parse().map_err(|_| format!("bad grid min '{}'", parts[0]))?;
    let max: f64 = parts[1].trim().parse().map_err(|_| format!("bad grid max '{}'", parts[1]))?;
    let count: usize =
        parts[2].trim().parse().map_err(|_| format!("bad grid count '{}'", parts[2]))?;
    let log = match parts.get(3).map(|s| s.trim()) {
        None | Some("lin") => false,
        Some("log") => true,
        Some(other) => return Err(format!("bad grid scale '{other}' (expected 'log' or 'lin')")),
    };
    if !(min > 0.0 && max > min) || count < 2 {
        return Err(format!("need 0 < min < max and count >= 2, got '{spec}'"));
    }
    if log {
        let (a, b) = (min.ln(), max.ln());
        Ok(GridSpec {
            betas: (0..count)
                .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
                .collect(),
        })
    } else {
        Ok(GridSpec {
            betas: (0..count)
                .map(|i| min + (max - min) * i as f64 / (count - 1) as f64)
                .collect(),
        })
    }
}

pub struct SweepRow {
    pub beta: f64,
    pub value: f64,
    pub derivative_estimate: f64,
    pub bound_check: bool,
    pub timing_ms: f64,
}

fn worker_count(jobs: usize) -> usize {
    let cap = std::env::var("SHELLSPEC_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v >= 1)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |v| v.get()));
    cap.min(jobs).max(1)
}

fn run_grid<F>(betas: &[f64], solve: F) -> Result<Vec<SweepRow>, String>
where
    F: Fn(f64) -> Result<SweepRow, String> + Sync,
{
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<SweepRow, String>>>> =
        betas.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..worker_count(betas.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= betas.len() {
                    break;
                }
                let row = solve(betas[i]);
                *slots[i].lock().unwrap() = Some(row);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("worker covered every index"))
        .collect()
}

pub fn cmd_sweep(
    shell_args: ShellArgs,
    p: f64,
    grid: &str,
    kind: &str,
    tol: f64,
    out: CommonOut,
) -> Result<bool, String> {
    let shell = shell_of(&shell_args)?;
    let betas = parse_grid(grid)?.betas;
    let eigen = kind == "eigen";
    // the β-independent Dirichlet-Neumann limit, shared by all rows
    let dn = if eigen {
        radial_dirichlet_neumann(&shell, p, tol).map_err(|e| e.to_string())?
    } else {
        f64::NAN
    };

    let rows = run_grid(&betas, |beta| solve_row(&shell, p, beta, tol, eigen, dn))?;

    // λ(β) is nondecreasing and concave in β; T(β) is nonincreasing.
    // Flag tolerance scales with the values involved.
    let scale = rows.iter().map(|r| r.value.abs()).fold(0.0_f64, f64::max).max(1e-300);
    let flag_tol = 1e-8 * scale;
    let mut monotone = true;
    let mut concave = true;
    for i in 1..rows.len() {
        let dv = rows[i].value - rows[i - 1].value;
        if eigen && dv < -flag_tol {
            monotone = false;
        }
        if !eigen && dv > flag_tol {
            monotone = false;
        }
    }
    if eigen {
        for i in 1..rows.len() - 1 {
            let (b0, b1, b2) = (rows[i - 1].beta, rows[i].beta, rows[i + 1].beta);
            let (v0, v1, v2) = (rows[i - 1].value, rows[i].value, rows[i + 1].value);
            // second divided difference with respect to β
            let dd = 2.0 * (v2 * (b1 - b0) - v1 * (b2 - b0) + v0 * (b2 - b1))
                / ((b2 - b1) * (b1 - b0) * (b2 - b0));
            if dd > 1e-8 * scale {
                concave = false;
            }
        }
    }
    let bounds_ok = rows.iter().all(|r| r.bound_check);
    let pass = monotone && bounds_ok && (!eigen || concave);

    let opts = OutputOpts {
        out: out.out.clone(),
        format: out.format.clone().unwrap_or_else(|| "csv".to_string()),
    };
    let header =
        ["beta", "value", "derivative_estimate", "bound_check", "timing_ms", "monotone", "concave"];
    if opts.format == "csv" {
        let csv_rows: Vec<Vec<String>> = rows
            .iter()
            .map(|r| {
                vec![
                    g17(r.beta),
                    g17(r.value),
                    g17(r.derivative_estimate),
                    r.bound_check.to_string(),
                    g17(r.timing_ms),
                    monotone.to_string(),
                    concave.to_string(),
                ]
            })
            .collect();
        write_report(&rows_to_csv(&header, &csv_rows), &opts.out)?;
    } else {
        let doc = json!({
            "command": "sweep-beta",
            "kind": kind,
            "p": p,
            "n": shell.n, "r1": shell.r1, "r2": shell.r2,
            "rows": rows.iter().map(|r| json!({
                "beta": r.beta,
                "value": r.value,
                "derivative_estimate": r.derivative_estimate,
                "bound_check": r.bound_check,
                "timing_ms": r.timing_ms,
            })).collect::<Vec<_>>(),
            "monotone": monotone,
            "concave": concave,
            "pass": pass,
        });
        crate::output::emit(&doc, &opts)?;
    }
    if !pass {
        crate::output::fail(
            "beta sweep violated monotonicity, concavity, or a trivial bound",
            &json!({ "monotone": monotone, "concave": concave, "bounds_ok": bounds_ok }),
        );
    }
    Ok(pass)
}

fn solve_row(
    shell: &ShellSpec,
    p: f64,
    beta: f64,
    tol: f64,
    eigen: bool,
    dn: f64,
) -> Result<SweepRow, String> {
    let start = std::time::Instant::now();
    if eigen {
        let res = solve_radial_eigen(shell, p, beta, tol).map_err(|e| e.to_string())?;
        let trivial = beta * shell.inner_surface() / shell.volume();
        Ok(SweepRow {
            beta,
            value: res.lambda,
            derivative_estimate: eigen_beta_derivative(&res.profile),
            bound_check: res.lambda <= trivial && res.lambda <= dn * (1.0 + 1e-9),
            timing_ms: start.elapsed().as_secs_f64() * 1e3,
        })
    } else {
        let res = solve_radial_torsion(shell, p, beta).map_err(|e| e.to_string())?;
        // dT/dβ by a small relative central difference
        let db = beta * 1e-4;
        let hi = solve_radial_torsion(shell, p, beta + db).map_err(|e| e.to_string())?;
        let lo = solve_radial_torsion(shell, p, beta - db).map_err(|e| e.to_string())?;
        Ok(SweepRow {
            beta,
            value: res.t,
            derivative_estimate: (hi.t - lo.t) / (2.0 * db),
            bound_check: res.t > 0.0,
            timing_ms: start.elapsed().as_secs_f64() * 1e3,
        })
    }
}
