//! Web test function w(x) = G(d(x, D)) built from a radial profile on
//! the matched shell, and level-by-level verification of the inequality
//! chain that certifies λ(β,Σ) ≤ λ(β,A) and T(β,Σ) ≥ T(β,A):
//! for each level t the live perimeter of the level set is compared with
//! the Steiner parallel-body perimeter and the shell perimeter, the
//! sublevel measure μ(t) with its shell counterpart η(t), and the three
//! integral estimates (gradient, boundary, L^p) plus the final quotient
//! are checked with explicit slack.
//!
//! Note on levels below v_m: the continuous argument extends μ and η by
//! their natural values on (0, v_m), where both vanish and the
//! inequalities are trivial; the report grid therefore starts at v_m.

use crate::fem::{assemble_quotient, torsion_quotient, FemContext, ScalarField};
use crate::geometry::QuermassVector;
use crate::mesh::{DomainSpec, Mesh};
use crate::radial::{RadialError, RadialProfile};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WebError {
    #[error("profile shell ({pr1:.6}, {pr2:.6}) does not match the domain's matched shell ({dr1:.6}, {dr2:.6})")]
    ShellMismatch { pr1: f64, pr2: f64, dr1: f64, dr2: f64 },
    #[error("need at least 16 levels, got {0}")]
    TooFewLevels(usize),
    #[error("only the planar chain is implemented, got dimension {0}")]
    NotPlanar(u32),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeomError),
    #[error(transparent)]
    Mesh(#[from] crate::mesh::MeshError),
    #[error(transparent)]
    Radial(#[from] RadialError),
    #[error(transparent)]
    Fem(#[from] crate::fem::FemError),
}

/// Proportionality constant of the a priori slack C·h·scale used by the
/// chain checks; calibrated on the shell identity case (ball-shaped
/// hole), where the only error source is the polygonal mesh itself.
/// The worst check there needs C ≈ 0.009 at h = 0.05 across
/// p ∈ {1.5, 2, 3}; 0.05 keeps a 5x headroom while staying well below
/// the true theorem margins on non-ball holes.
pub const SLACK_COEFF: f64 = 0.05;

/// Slack coefficient for the per-level geometric comparisons. The P1
/// level-curve length estimator has a larger O(h) constant than the
/// assembled integrals (the discrete level lines cut across triangles
/// near the hole's corners), so the level checks carry their own
/// coefficient, measured on the square-hole fixture across h.
pub const LEVEL_SLACK_COEFF: f64 = 0.4;

/// One inequality check: `margin = rhs + slack - lhs` for ≤ checks,
/// `lhs + slack - rhs` for ≥ checks; negative margin means violation.
#[derive(Debug, Clone, Serialize)]
pub struct ChainCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub margin: f64,
    pub pass: bool,
}

/// Per-level record of every quantity in the proof chain, plus the
/// integral estimates and the final quotient comparison.
#[derive(Debug, Clone, Serialize)]
pub struct WebChainReport {
    /// "eigen" or "torsion"
    pub kind: String,
    pub p: f64,
    pub beta: f64,
    pub h: f64,
    pub t_grid: Vec<f64>,
    /// level speed g(t) = G'(G^{-1}(t))
    pub g: Vec<f64>,
    pub live_perimeter: Vec<f64>,
    pub steiner_perimeter: Vec<f64>,
    pub shell_perimeter: Vec<f64>,
    pub mu: Vec<f64>,
    pub eta: Vec<f64>,
    /// min over each level of the two perimeter margins
    pub perimeter_margin: Vec<f64>,
    pub area_margin: Vec<f64>,
    pub gradient_lhs: f64,
    pub gradient_rhs: f64,
    pub boundary_lhs: f64,
    pub boundary_rhs: f64,
    pub lp_lhs: f64,
    pub lp_rhs: f64,
    pub final_quotient: f64,
    /// λ(β,A) for the eigen chain, T(β,A) for the torsion chain
    pub shell_lambda: f64,
    pub checks: Vec<ChainCheck>,
    pub slack_coeff: f64,
    pub pass: bool,
}

fn check_shell(domain: &DomainSpec, profile: &RadialProfile) -> Result<QuermassVector, WebError> {
    let quermass = domain.hole().quermassintegrals()?;
    let matched = crate::geometry::match_shell(&quermass, domain.area(), 2)?;
    let tol = 1e-9 * (1.0 + matched.r2);
    if profile.shell.n != 2 {
        return Err(WebError::NotPlanar(profile.shell.n));
    }
    if (matched.r1 - profile.shell.r1).abs() > tol || (matched.r2 - profile.shell.r2).abs() > tol {
        return Err(WebError::ShellMismatch {
            pr1: profile.shell.r1,
            pr2: profile.shell.r2,
            dr1: matched.r1,
            dr2: matched.r2,
        });
    }
    Ok(quermass)
}

/// w(vertex) = ψ(R1 + d(vertex, D)), clipped to the profile plateau v_M
/// for vertices farther than R2 - R1 from the hole.
pub fn build_web_field(
    domain: &DomainSpec,
    profile: &RadialProfile,
    mesh: &Mesh,
) -> Result<ScalarField, WebError> {
    check_shell(domain, profile)?;
    let r1 = profile.shell.r1;
    let width = profile.shell.width();
    let values = mesh
        .vertices
        .iter()
        .map(|&v| {
            let d = domain.hole().distance_to(v);
            if d >= width {
                profile.v_max()
            } else {
                // radius r1 + d is inside [r1, r2); interpolate the profile
                profile.value_at_radius(r1 + d)
            }
        })
        .collect();
    Ok(ScalarField { values })
}

/// Length of the level curve {W = t} strictly inside the mesh, for the
/// P1 interpolant W: a straight segment per triangle.
fn level_curve_length(ctx_mesh: &Mesh, u: &[f64], t: f64) -> f64 {
    let mut total = 0.0;
    for &tri in &ctx_mesh.triangles {
        let v = [u[tri[0]], u[tri[1]], u[tri[2]]];
        let p = [
            ctx_mesh.vertices[tri[0]],
            ctx_mesh.vertices[tri[1]],
            ctx_mesh.vertices[tri[2]],
        ];
        let mut pts: Vec<(f64, f64)> = Vec::with_capacity(2);
        for i in 0..3 {
            let j = (i + 1) % 3;
            let (vi, vj) = (v[i] - t, v[j] - t);
            if vi == 0.0 && vj == 0.0 {
                // edge lies exactly on the level: count half (shared with
                // the neighbouring triangle)
                total += 0.5 * p[i].dist(p[j]);
            } else if (vi < 0.0 && vj > 0.0) || (vi > 0.0 && vj < 0.0) {
                let s = vi / (vi - vj);
                pts.push((p[i].x + s * (p[j].x - p[i].x), p[i].y + s * (p[j].y - p[i].y)));
            } else if vi == 0.0 {
                pts.push((p[i].x, p[i].y));
            }
        }
        pts.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-15 && (a.1 - b.1).abs() < 1e-15);
        if pts.len() == 2 {
            let dx = pts[0].0 - pts[1].0;
            let dy = pts[0].1 - pts[1].1;
            total += (dx * dx + dy * dy).sqrt();
        }
    }
    total
}

/// |{W < t}| for the P1 interpolant, exact per triangle.
fn sublevel_area(ctx_mesh: &Mesh, u: &[f64], t: f64) -> f64 {
    let mut total = 0.0;
    for &tri in &ctx_mesh.triangles {
        let mut v = [u[tri[0]], u[tri[1]], u[tri[2]]];
        let p = [
            ctx_mesh.vertices[tri[0]],
            ctx_mesh.vertices[tri[1]],
            ctx_mesh.vertices[tri[2]],
        ];
        let area = 0.5 * p[1].sub(p[0]).cross(p[2].sub(p[0]));
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let [a, b, c] = v;
        total += if t <= a {
            0.0
        } else if t >= c {
            area
        } else if t <= b {
            // only the lowest vertex is below
            let sb = (t - a) / (b - a);
            let sc = (t - a) / (c - a);
            area * sb * sc
        } else {
            // only the highest vertex is above
            let sa = (c - t) / (c - a);
            let sb = (c - t) / (c - b);
            area * (1.0 - sa * sb)
        };
    }
    total
}

struct LevelData {
    t_grid: Vec<f64>,
    g: Vec<f64>,
    live: Vec<f64>,
    steiner: Vec<f64>,
    shell: Vec<f64>,
    mu: Vec<f64>,
    eta: Vec<f64>,
    perimeter_margin: Vec<f64>,
    area_margin: Vec<f64>,
    level_checks_pass: bool,
}

fn level_sweep(
    _domain: &DomainSpec,
    profile: &RadialProfile,
    mesh: &Mesh,
    field: &ScalarField,
    quermass: &QuermassVector,
    t_count: usize,
) -> Result<LevelData, WebError> {
    let r1 = profile.shell.r1;
    let h = mesh.target_h;
    let (vm, vmx) = (profile.v_min(), profile.v_max());
    let area_a = profile.shell.volume();
    let mut data = LevelData {
        t_grid: Vec::with_capacity(t_count),
        g: Vec::with_capacity(t_count),
        live: Vec::with_capacity(t_count),
        steiner: Vec::with_capacity(t_count),
        shell: Vec::with_capacity(t_count),
        mu: Vec::with_capacity(t_count),
        eta: Vec::with_capacity(t_count),
        perimeter_margin: Vec::with_capacity(t_count),
        area_margin: Vec::with_capacity(t_count),
        level_checks_pass: true,
    };
    for j in 0..t_count {
        // uniform midpoint grid on [v_m, v_M): never touches v_M where
        // the level speed vanishes
        let t = vm + (j as f64 + 0.5) / t_count as f64 * (vmx - vm);
        let rho = profile.radius_at(t)? - r1;
        let g = profile.speed_at(t)?;
        let live = level_curve_length(mesh, &field.values, t);
        let steiner = quermass.parallel_perimeter(rho)?;
        let shell = std::f64::consts::TAU * (r1 + rho);
        let mu = sublevel_area(mesh, &field.values, t);
        let eta = std::f64::consts::PI * ((r1 + rho) * (r1 + rho) - r1 * r1);
        let slack_per = LEVEL_SLACK_COEFF * h * shell;
        // Steiner vs shell is a closed-form identity in the plane
        let m1 = steiner + slack_per - live;
        let m2 = shell + 1e-10 * shell.max(1.0) - steiner;
        let slack_area = LEVEL_SLACK_COEFF * h * area_a.max(eta);
        let m3 = eta + slack_area - mu;
        if m1 < 0.0 || m2 < 0.0 || m3 < 0.0 {
            data.level_checks_pass = false;
        }
        data.t_grid.push(t);
        data.g.push(g);
        data.live.push(live);
        data.steiner.push(steiner);
        data.shell.push(shell);
        data.mu.push(mu);
        data.eta.push(eta);
        data.perimeter_margin.push(m1.min(m2));
        data.area_margin.push(m3);
    }
    Ok(data)
}

fn le_check(name: &str, lhs: f64, rhs: f64, slack: f64) -> ChainCheck {
    let margin = rhs + slack - lhs;
    ChainCheck { name: name.to_string(), lhs, rhs, slack, margin, pass: margin >= 0.0 }
}

fn ge_check(name: &str, lhs: f64, rhs: f64, slack: f64) -> ChainCheck {
    let margin = lhs + slack - rhs;
    ChainCheck { name: name.to_string(), lhs, rhs, slack, margin, pass: margin >= 0.0 }
}

fn assemble_report(
    kind: &str,
    profile: &RadialProfile,
    mesh: &Mesh,
    data: LevelData,
    integrals: [f64; 6],
    final_quotient: f64,
    shell_value: f64,
    quotient_check: ChainCheck,
) -> WebChainReport {
    let h = mesh.target_h;
    let [glhs, grhs, blhs, brhs, lplhs, lprhs] = integrals;
    let checks = vec![
        le_check("gradient", glhs, grhs, SLACK_COEFF * h * grhs),
        le_check("boundary", blhs, brhs, SLACK_COEFF * h * brhs),
        ge_check("lp", lplhs, lprhs, SLACK_COEFF * h * lprhs),
        quotient_check,
    ];
    let pass = data.level_checks_pass && checks.iter().all(|c| c.pass);
    WebChainReport {
        kind: kind.to_string(),
        p: profile.p,
        beta: profile.beta,
        h,
        t_grid: data.t_grid,
        g: data.g,
        live_perimeter: data.live,
        steiner_perimeter: data.steiner,
        shell_perimeter: data.shell,
        mu: data.mu,
        eta: data.eta,
        perimeter_margin: data.perimeter_margin,
        area_margin: data.area_margin,
        gradient_lhs: glhs,
        gradient_rhs: grhs,
        boundary_lhs: blhs,
        boundary_rhs: brhs,
        lp_lhs: lplhs,
        lp_rhs: lprhs,
        final_quotient,
        shell_lambda: shell_value,
        checks,
        slack_coeff: SLACK_COEFF,
        pass,
    }
}

/// Verify the eigenvalue chain: the Rayleigh quotient of the web field
/// does not exceed λ(β,A) beyond the reported slack, together with
/// every intermediate estimate. `shell_lambda` must be the eigenvalue
/// whose eigenfunction is `profile`.
pub fn verify_eigen_chain(
    domain: &DomainSpec,
    profile: &RadialProfile,
    shell_lambda: f64,
    mesh: &Mesh,
    t_count: usize,
) -> Result<WebChainReport, WebError> {
    if t_count < 16 {
        return Err(WebError::TooFewLevels(t_count));
    }
    let quermass = check_shell(domain, profile)?;
    let field = build_web_field(domain, profile, mesh)?;
    let data = level_sweep(domain, profile, mesh, &field, &quermass, t_count)?;

    let (p, beta) = (profile.p, profile.beta);
    let ctx = FemContext::new(mesh);
    let glhs = ctx.gradient_term(p, &field.values);
    let grhs = profile.gradient_integral(p);
    let blhs = ctx.boundary_term(p, beta, &field.values);
    let brhs = beta * profile.v_min().abs().powf(p) * profile.shell.inner_surface();
    let lplhs = ctx.lq_term(p, &field.values);
    let lprhs = profile.lp_integral(p);
    let final_quotient = assemble_quotient(mesh, p, beta, &field, p)?;
    let qcheck = le_check(
        "final_quotient",
        final_quotient,
        shell_lambda,
        SLACK_COEFF * mesh.target_h * shell_lambda,
    );
    Ok(assemble_report(
        "eigen",
        profile,
        mesh,
        data,
        [glhs, grhs, blhs, brhs, lplhs, lprhs],
        final_quotient,
        shell_lambda,
        qcheck,
    ))
}

/// Verify the torsion chain: the torsion quotient of the web field
/// built from the stress profile is at least T(β,A) up to slack, hence
/// T(β,Σ) ≥ T(β,A) up to slack.
pub fn verify_torsion_chain(
    domain: &DomainSpec,
    profile: &RadialProfile,
    shell_torsion: f64,
    mesh: &Mesh,
    t_count: usize,
) -> Result<WebChainReport, WebError> {
    if t_count < 16 {
        return Err(WebError::TooFewLevels(t_count));
    }
    let quermass = check_shell(domain, profile)?;
    let field = build_web_field(domain, profile, mesh)?;
    let data = level_sweep(domain, profile, mesh, &field, &quermass, t_count)?;

    let (p, beta) = (profile.p, profile.beta);
    let ctx = FemContext::new(mesh);
    let glhs = ctx.gradient_term(p, &field.values);
    let grhs = profile.gradient_integral(p);
    let blhs = ctx.boundary_term(p, beta, &field.values);
    let brhs = beta * profile.v_min().abs().powf(p) * profile.shell.inner_surface();
    // torsion numerator: the L^1 mass must dominate the shell mass
    let lplhs = ctx.lq_term(1.0, &field.values);
    let lprhs = profile.lp_integral(1.0);
    let final_quotient = torsion_quotient(mesh, p, beta, &field)?;
    let qcheck = ge_check(
        "final_quotient",
        final_quotient,
        shell_torsion,
        SLACK_COEFF * mesh.target_h * shell_torsion,
    );
    Ok(assemble_report(
        "torsion",
        profile,
        mesh,
        data,
        [glhs, grhs, blhs, brhs, lplhs, lprhs],
        final_quotient,
        shell_torsion,
        qcheck,
    ))
}

/// ∫_{v_m}^{v_M} dτ/g(τ), evaluated with per-segment closed forms
/// (flux linear in radius inside each segment, which closes the
/// integral through the vanishing of g at the top). Equals R2 - R1
/// when g is consistent with the radius parametrization.
pub fn g_inverse_width(profile: &RadialProfile) -> f64 {
    // the per-segment model has leading error quadratic in the segment
    // width; one Richardson step against the double-width sum removes it
    let fine = g_inverse_sum(profile, 1);
    let coarse = g_inverse_sum(profile, 2);
    (4.0 * fine - coarse) / 3.0
}

fn g_inverse_sum(profile: &RadialProfile, stride: usize) -> f64 {
    // Per segment, model the flux q as linear in r. Substituting
    // τ = ψ(r), dτ = g dr with g = q^{1/(p-1)} gives the closed form
    //   ∫ dτ/g = Δψ · μ (q_b - q_a) / (q_b^μ - q_a^μ),  μ = p/(p-1),
    // which is exact for linear q (including the terminal segment,
    // where q_b = 0 and it reduces to μ Δψ / g_a) and O(h³) otherwise.
    let m = profile.psi.len();
    let mu = profile.p / (profile.p - 1.0);
    // below this, the stored ψ increment is dominated by rounding noise
    // (ψ flattens to machine precision near the plateau) and dividing by
    // it is ill-conditioned; integrate those slivers in r instead, where
    // the substitution is exact by the grid parametrization
    let noise_floor = 4e-9 * profile.v_max().abs();
    let mut total = 0.0;
    let mut i = 0;
    while i < m - 1 {
        let j = (i + stride).min(m - 1);
        let dpsi = profile.psi[j] - profile.psi[i];
        if dpsi <= noise_floor {
            total += profile.r[j] - profile.r[i];
            i = j;
            continue;
        }
        let (qa, qb) = (profile.q[i].max(0.0), profile.q[j].max(0.0));
        if (qb - qa).abs() <= 1e-12 * qa.max(qb) {
            let g = 0.5 * (profile.speed(i) + profile.speed(j));
            total += dpsi / g;
        } else {
            total += dpsi * mu * (qb - qa) / (qb.powf(mu) - qa.powf(mu));
        }
        i = j;
    }
    total
}

/// Area of the plateau {W = v_M} of the web field (triangles whose
/// three vertices all sit at the clipped maximum).
pub fn plateau_area(mesh: &Mesh, field: &ScalarField, v_max: f64) -> f64 {
    let tol = 1e-12 * v_max.abs().max(1.0);
    mesh.triangles
        .iter()
        .filter(|t| t.iter().all(|&i| (field.values[i] - v_max).abs() <= tol))
        .map(|&t| {
            let p = [mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]];
            0.5 * p[1].sub(p[0]).cross(p[2].sub(p[0]))
        })
        .sum()
}
