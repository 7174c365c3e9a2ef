//! End-to-end acceptance suite. Each numbered criterion prints exactly
//! one pass/fail line; the test fails if any criterion fails.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use shellspec_core::{
    eigen_beta_derivative, solve_radial_eigen, ShellSpec,
};
use std::path::{Path, PathBuf};
use std::process::Command;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run_cli(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_shellspec"))
        .args(args)
        .output()
        .expect("spawn shellspec");
    let code = out.status.code().unwrap_or(-1);
    let stdout = String::from_utf8_lossy(&out.stdout);
    let doc = serde_json::from_str(stdout.trim()).unwrap_or(Value::Null);
    (code, doc)
}

fn run_cli_raw(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_shellspec"))
        .args(args)
        .output()
        .expect("spawn shellspec");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

/// Regular-polygon shell-identity domain written as a JSON fixture.
fn write_shell_identity(h: f64) -> PathBuf {
    let sides = ((2.0 * std::f64::consts::PI) / h).ceil().max(16.0) as usize;
    let ring = |r: f64, k: usize| -> Vec<[f64; 2]> {
        (0..k)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
                [r * a.cos(), r * a.sin()]
            })
            .collect()
    };
    let doc = serde_json::json!({ "outer": ring(2.0, 4 * sides), "hole": ring(1.0, sides) });
    let path = std::env::temp_dir().join(format!("shellspec_identity_{}.json", (h * 1e4) as u64));
    std::fs::write(&path, doc.to_string()).unwrap();
    path
}

struct Scorecard {
    failures: Vec<String>,
}

impl Scorecard {
    fn record(&mut self, criterion: usize, label: &str, pass: bool, detail: String) {
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("criterion {criterion} [{label}]: {verdict} ({detail})");
        if !pass {
            self.failures.push(format!("criterion {criterion}: {detail}"));
        }
    }
}

// -- criterion 2 helper: dense 1-D FD Rayleigh oracle -----------------

fn fd_eigenvalue(n: u32, beta: f64) -> f64 {
    let m = 10_000usize;
    let h = 1.0 / (m - 1) as f64;
    let k_pow = n as i32;
    let mut ad = vec![0.0; m];
    let mut ao = vec![0.0; m - 1];
    let mut bd = vec![0.0; m];
    let mut bo = vec![0.0; m - 1];
    for e in 0..m - 1 {
        let (ra, rb) = (1.0 + e as f64 * h, 1.0 + (e + 1) as f64 * h);
        let w = (rb.powi(k_pow) - ra.powi(k_pow)) / k_pow as f64;
        let k = w / (h * h);
        ad[e] += k;
        ad[e + 1] += k;
        ao[e] -= k;
        let wm = (0.5 * (ra + rb)).powi(k_pow - 1) * h;
        bd[e] += wm / 3.0;
        bd[e + 1] += wm / 3.0;
        bo[e] += wm / 6.0;
    }
    ad[0] += beta;
    let matvec = |d: &[f64], o: &[f64], x: &[f64]| -> Vec<f64> {
        (0..m)
            .map(|i| {
                let mut y = d[i] * x[i];
                if i > 0 {
                    y += o[i - 1] * x[i - 1];
                }
                if i + 1 < m {
                    y += o[i] * x[i + 1];
                }
                y
            })
            .collect()
    };
    let thomas = |d: &[f64], o: &[f64], b: &[f64]| -> Vec<f64> {
        let mut c = vec![0.0; m];
        let mut x = vec![0.0; m];
        c[0] = o[0] / d[0];
        x[0] = b[0] / d[0];
        for i in 1..m {
            let den = d[i] - o[i - 1] * c[i - 1];
            if i + 1 < m {
                c[i] = o[i] / den;
            }
            x[i] = (b[i] - o[i - 1] * x[i - 1]) / den;
        }
        for i in (0..m - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        x
    };
    let mut u = vec![1.0; m];
    let mut lambda = f64::NAN;
    for _ in 0..500 {
        let x = thomas(&ad, &ao, &matvec(&bd, &bo, &u));
        let ax = matvec(&ad, &ao, &x);
        let bx = matvec(&bd, &bo, &x);
        let num: f64 = x.iter().zip(&ax).map(|(p, q)| p * q).sum();
        let den: f64 = x.iter().zip(&bx).map(|(p, q)| p * q).sum();
        let next = num / den;
        let nrm = den.sqrt();
        u = x.iter().map(|v| v / nrm).collect();
        if lambda.is_finite() && (next - lambda).abs() <= 1e-13 * next {
            return next;
        }
        lambda = next;
    }
    lambda
}

// -- criterion 8 helper: random convex hulls --------------------------

fn convex_hull(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let build = |iter: Box<dyn Iterator<Item = (f64, f64)> + '_>| {
        let mut chain: Vec<(f64, f64)> = Vec::new();
        for p in iter {
            while chain.len() >= 2 && cross(chain[chain.len() - 2], chain[chain.len() - 1], p) <= 0.0
            {
                chain.pop();
            }
            chain.push(p);
        }
        chain.pop();
        chain
    };
    let mut hull = build(Box::new(pts.iter().copied()));
    hull.extend(build(Box::new(pts.iter().rev().copied())));
    hull
}

#[test]
fn acceptance() {
    let mut score = Scorecard { failures: Vec::new() };
    let fixtures = [
        fixture("square_in_square.json"),
        fixture("triangle_in_hexagon.json"),
        fixture("offcenter_square_in_rectangle.json"),
    ];

    // 1. closed-form torsion oracle
    {
        let exact = 2.0 * std::f64::consts::PI * (4.0 * 2.0_f64.ln() + 3.0 / 16.0);
        let (code, doc) = run_cli(&[
            "radial-torsion", "--n", "2", "--p", "2", "--beta", "1", "--r1", "1", "--r2", "2",
        ]);
        let t = doc["t"].as_f64().unwrap_or(f64::NAN);
        let rel = (t - exact).abs() / exact;
        score.record(
            1,
            "closed-form torsion",
            code == 0 && rel <= 1e-8,
            format!("T={t:.12} exact={exact:.12} rel={rel:.2e}"),
        );
    }

    // 2. shooting vs FD Rayleigh oracle
    {
        let mut worst: f64 = 0.0;
        let mut ok = true;
        for n in [2u32, 3] {
            let shell = ShellSpec::new(n, 1.0, 2.0).unwrap();
            for beta in [0.5, 1.0, 5.0] {
                let lam = solve_radial_eigen(&shell, 2.0, beta, 1e-10).unwrap().lambda;
                let oracle = fd_eigenvalue(n, beta);
                let rel = (lam - oracle).abs() / oracle;
                worst = worst.max(rel);
                ok &= rel <= 1e-6;
            }
        }
        score.record(2, "radial eigen vs FD oracle", ok, format!("worst rel {worst:.2e}"));
    }

    // 3. Theorem 1.1 on the fixtures + shell-identity convergence order
    {
        let mut ok = true;
        let mut worst_ratio = f64::INFINITY;
        for fx in &fixtures {
            for p in ["1.5", "2", "3"] {
                for beta in ["0.5", "2"] {
                    let (code, doc) = run_cli(&[
                        "verify-eigen", "--domain", fx.to_str().unwrap(), "--p", p, "--beta",
                        beta, "--h", "0.05",
                    ]);
                    let margin = doc["theorem_margin"].as_f64().unwrap_or(f64::NAN);
                    let slack = doc["theorem_slack"].as_f64().unwrap_or(f64::NAN);
                    let pass = code == 0
                        && doc["pass"].as_bool() == Some(true)
                        && margin > slack;
                    if !pass {
                        eprintln!("  verify-eigen failed: {fx:?} p={p} beta={beta} margin={margin} slack={slack}");
                    }
                    ok &= pass;
                }
            }
        }
        let mut gaps = Vec::new();
        for h in ["0.1", "0.05"] {
            let id = write_shell_identity(h.parse().unwrap());
            let (_, doc) = run_cli(&[
                "verify-eigen", "--domain", id.to_str().unwrap(), "--p", "2", "--beta", "1",
                "--h", h,
            ]);
            let gap = (doc["mesh_value"].as_f64().unwrap_or(f64::NAN)
                - doc["shell_value"].as_f64().unwrap_or(f64::NAN))
            .abs();
            gaps.push(gap);
        }
        let ratio = gaps[0] / gaps[1];
        worst_ratio = worst_ratio.min(ratio);
        ok &= ratio >= 3.5;
        score.record(
            3,
            "verify-eigen fixtures + identity order",
            ok,
            format!("18 fixture runs, identity gap shrink x{worst_ratio:.2} on h halving"),
        );
    }

    // 4. Theorem 1.2 on the fixtures + identity from below
    {
        let mut ok = true;
        for fx in &fixtures {
            for p in ["1.5", "2", "3"] {
                for beta in ["0.5", "2"] {
                    let (code, doc) = run_cli(&[
                        "verify-torsion", "--domain", fx.to_str().unwrap(), "--p", p, "--beta",
                        beta, "--h", "0.05",
                    ]);
                    let pass = code == 0 && doc["pass"].as_bool() == Some(true);
                    if !pass {
                        eprintln!("  verify-torsion failed: {fx:?} p={p} beta={beta}");
                    }
                    ok &= pass;
                }
            }
        }
        // identity: discrete torsion approaches the closed-form shell
        // value from below as h shrinks
        let mut gaps = Vec::new();
        let mut from_below = true;
        for h in ["0.1", "0.05"] {
            let id = write_shell_identity(h.parse().unwrap());
            let (_, doc) = run_cli(&[
                "verify-torsion", "--domain", id.to_str().unwrap(), "--p", "2", "--beta", "1",
                "--h", h,
            ]);
            let mesh_t = doc["mesh_value"].as_f64().unwrap_or(f64::NAN);
            let shell_t = doc["shell_value"].as_f64().unwrap_or(f64::NAN);
            from_below &= mesh_t <= shell_t * (1.0 + 1e-9);
            gaps.push((shell_t - mesh_t).abs());
        }
        ok &= from_below && gaps[1] < gaps[0];
        score.record(
            4,
            "verify-torsion fixtures + identity from below",
            ok,
            format!("identity gaps {:.2e} -> {:.2e}", gaps[0], gaps[1]),
        );
    }

    // 5. proof-chain margins, level by level
    {
        let (code, doc) = run_cli(&[
            "verify-eigen", "--domain", fixtures[0].to_str().unwrap(), "--p", "2", "--beta",
            "1", "--h", "0.05",
        ]);
        let chain = &doc["chain"];
        let levels_ok = chain["perimeter_margin"]
            .as_array()
            .map(|v| v.iter().all(|m| m.as_f64().unwrap_or(-1.0) >= 0.0))
            .unwrap_or(false)
            && chain["area_margin"]
                .as_array()
                .map(|v| v.iter().all(|m| m.as_f64().unwrap_or(-1.0) >= 0.0))
                .unwrap_or(false);
        let checks_ok = chain["checks"]
            .as_array()
            .map(|v| v.iter().all(|c| c["pass"].as_bool() == Some(true)))
            .unwrap_or(false);
        score.record(
            5,
            "web chain levels",
            code == 0 && levels_ok && checks_ok,
            format!(
                "{} levels, checks {}",
                chain["t_grid"].as_array().map_or(0, |v| v.len()),
                if checks_ok { "all pass" } else { "violations" }
            ),
        );
    }

    // 6. Prop. 2.2 behaviour in beta
    {
        let (code, csv) = run_cli_raw(&[
            "sweep-beta", "--n", "2", "--r1", "1", "--r2", "2", "--p", "2", "--beta-grid",
            "0.01,100,20,log",
        ]);
        let mut lines = csv.lines();
        let header: Vec<&str> = lines.next().unwrap_or("").split(',').collect();
        let mono_idx = header.iter().position(|&c| c == "monotone");
        let conc_idx = header.iter().position(|&c| c == "concave");
        let flags_ok = lines.clone().all(|row| {
            let cells: Vec<&str> = row.split(',').collect();
            mono_idx.map_or(false, |i| cells.get(i) == Some(&"true"))
                && conc_idx.map_or(false, |i| cells.get(i) == Some(&"true"))
        }) && lines.count() == 20;

        let shell = ShellSpec::new(2, 1.0, 2.0).unwrap();
        let mid = solve_radial_eigen(&shell, 2.0, 1.0, 1e-10).unwrap();
        let db = 1e-4;
        let hi = solve_radial_eigen(&shell, 2.0, 1.0 + db, 1e-10).unwrap().lambda;
        let lo = solve_radial_eigen(&shell, 2.0, 1.0 - db, 1e-10).unwrap().lambda;
        let fd = (hi - lo) / (2.0 * db);
        let formula = eigen_beta_derivative(&mid.profile);
        let der_ok = (formula - fd).abs() <= 1e-5 * fd.abs();

        let (_, big) = run_cli(&[
            "radial-eigen", "--n", "2", "--r1", "1", "--r2", "2", "--p", "2", "--beta", "10000",
        ]);
        let lam = big["lambda"].as_f64().unwrap_or(f64::NAN);
        let dn = big["dirichlet_neumann_limit"].as_f64().unwrap_or(f64::NAN);
        let sat = lam / dn;
        let sat_ok = (0.99..=1.0 + 1e-9).contains(&sat);

        score.record(
            6,
            "beta monotonicity/concavity/derivative/saturation",
            code == 0 && flags_ok && der_ok && sat_ok,
            format!("dλ/dβ rel err {:.1e}, λ(1e4)/Λ = {sat:.6}", (formula - fd).abs() / fd.abs()),
        );
    }

    // 7. trivial upper bounds hold as computed values
    {
        let mut ok = true;
        let mut detail = String::new();
        for (p, beta) in [("1.5", "0.5"), ("2", "1"), ("3", "50")] {
            let (code, doc) = run_cli(&[
                "radial-eigen", "--n", "2", "--r1", "1", "--r2", "2", "--p", p, "--beta", beta,
            ]);
            let lam = doc["lambda"].as_f64().unwrap_or(f64::NAN);
            let c = doc["constant_test_bound"].as_f64().unwrap_or(f64::NAN);
            let dn = doc["dirichlet_neumann_limit"].as_f64().unwrap_or(f64::NAN);
            ok &= code == 0 && lam <= c && lam <= dn * (1.0 + 1e-9);
            detail = format!("λ={lam:.6} ≤ min({c:.6}, {dn:.6})");
        }
        let (code, doc) = run_cli(&[
            "mesh-eigen", "--domain", fixtures[0].to_str().unwrap(), "--p", "2", "--beta", "1",
            "--h", "0.05",
        ]);
        let lam = doc["lambda"].as_f64().unwrap_or(f64::NAN);
        let c = doc["constant_test_bound"].as_f64().unwrap_or(f64::NAN);
        let dn = doc["dirichlet_neumann_limit"].as_f64().unwrap_or(f64::NAN);
        ok &= code == 0 && lam <= c && lam <= dn;
        score.record(7, "trivial bounds", ok, detail);
    }

    // 8. geometry property suite: 500 random convex hulls
    {
        let mut rng = ChaCha8Rng::seed_from_u64(0xacce9 + 8);
        let mut tested = 0;
        let mut ok = true;
        while tested < 500 {
            let count = rng.gen_range(8..=40);
            let scale = 10f64.powf(rng.gen_range(-1.0..2.0));
            let pts: Vec<(f64, f64)> = (0..count)
                .map(|_| (rng.gen_range(-1.0..1.0) * scale, rng.gen_range(-1.0..1.0) * scale))
                .collect();
            let hull = convex_hull(pts);
            if hull.len() < 3 {
                continue;
            }
            let Ok(poly) = shellspec_core::ConvexPolygon::new(
                hull.iter().map(|&(x, y)| shellspec_core::Point2::new(x, y)).collect(),
            ) else {
                continue;
            };
            tested += 1;
            let qv = poly.quermassintegrals().unwrap();
            ok &= shellspec_core::af_check(&qv).all_nonnegative(1e-10);
            let (a, p) = (poly.area(), poly.perimeter());
            ok &= p * p >= 4.0 * std::f64::consts::PI * a * (1.0 - 1e-12);
            let rho = 0.5 * qv.matched_ball_radius();
            let vol = qv.steiner_volume(rho).unwrap();
            ok &= (vol - (a + p * rho + std::f64::consts::PI * rho * rho)).abs()
                <= 1e-12 * vol.max(1.0);
        }
        // disk equality cases
        let ball = shellspec_core::ball_quermass(2, 1.5);
        let disk_eq = ball.af_margins().iter().all(|&(_, m)| m.abs() <= 1e-12)
            && (ball.perimeter().powi(2) - 4.0 * std::f64::consts::PI * ball.volume()).abs()
                <= 1e-12 * ball.perimeter().powi(2);
        ok &= disk_eq;
        score.record(8, "geometry property suite", ok, "500 hulls + disk equalities".into());
    }

    // 9. profile monotonicity invariants (Prop. 2.3)
    {
        let mut ok = true;
        for n in [2u32, 3] {
            let shell = ShellSpec::new(n, 1.0, 2.0).unwrap();
            for (p, beta) in [(1.5, 0.5), (2.0, 1.0), (3.0, 2.0)] {
                let prof = solve_radial_eigen(&shell, p, beta, 1e-10).unwrap().profile;
                let vmx = prof.v_max();
                for i in 0..prof.psi.len() - 1 {
                    // strict increase wherever the increment is resolvable
                    // in double precision; never a decrease
                    if vmx - prof.psi[i] > 1e-9 * vmx {
                        ok &= prof.psi[i + 1] > prof.psi[i];
                    } else {
                        ok &= prof.psi[i + 1] >= prof.psi[i];
                    }
                    let wa = prof.r[i].powi(n as i32 - 1) * prof.q[i];
                    let wb = prof.r[i + 1].powi(n as i32 - 1) * prof.q[i + 1];
                    ok &= wb < wa;
                }
            }
        }
        score.record(9, "psi' > 0 and weighted flux decreasing", ok, "6 profiles checked".into());
    }

    assert!(score.failures.is_empty(), "failed criteria:\n{}", score.failures.join("\n"));
}
