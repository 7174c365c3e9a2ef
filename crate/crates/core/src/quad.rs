//! Quadrature rules shared by the solvers.

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton
/// iteration on the Legendre polynomial.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Tricomi initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Legendre polynomial P_n and its derivative at x.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss-Legendre rule on [0, 1].
pub fn gauss_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    (
        x.iter().map(|&t| 0.5 * (t + 1.0)).collect(),
        w.iter().map(|&t| 0.5 * t).collect(),
    )
}

/// Quadrature on the reference triangle {(x,y): x,y >= 0, x+y <= 1},
/// exact for polynomials of degree <= 8. Collapsed 5x5 Gauss product
/// rule (the Duffy map raises the degree by one in the first variable,
/// and 5-point Gauss handles degree 9).
pub fn triangle_rule_deg8() -> Vec<(f64, f64, f64)> {
    let (xu, wu) = gauss_unit(5);
    let mut rule = Vec::with_capacity(25);
    for (&u, &a) in xu.iter().zip(&wu) {
        for (&v, &b) in xu.iter().zip(&wu) {
            rule.push((u, v * (1.0 - u), a * b * (1.0 - u)));
        }
    }
    rule
}

/// Adaptive Simpson quadrature to the requested absolute tolerance.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    simpson_step(f, a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 50)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}

/// Composite Simpson over tabulated values on a uniform grid with an
/// even number of intervals.
pub fn simpson_tabulated(values: &[f64], step: f64) -> f64 {
    let m = values.len() - 1;
    assert!(m >= 2 && m % 2 == 0, "need an even number of intervals");
    let mut s = values[0] + values[m];
    for (i, v) in values.iter().enumerate().take(m).skip(1) {
        s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    s * step / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_integrates_polynomials() {
        let (x, w) = gauss_unit(16);
        // exact for degree up to 31 on [0,1]: ∫ x^k = 1/(k+1)
        for k in 0..=31 {
            let s: f64 = x.iter().zip(&w).map(|(&xi, &wi)| wi * xi.powi(k)).sum();
            assert!((s - 1.0 / (k as f64 + 1.0)).abs() < 1e-14, "k={k} s={s}");
        }
    }

    #[test]
    fn triangle_rule_exact_deg8() {
        let rule = triangle_rule_deg8();
        // ∫_T x^a y^b = a! b! / (a+b+2)!
        let fact = |k: i32| (1..=k as u64).product::<u64>() as f64;
        for a in 0..=8 {
            for b in 0..=(8 - a) {
                let s: f64 = rule.iter().map(|&(x, y, w)| w * x.powi(a) * y.powi(b)).sum();
                let exact = fact(a) * fact(b) / fact(a + b + 2);
                assert!((s - exact).abs() < 1e-14 * exact.max(1.0), "a={a} b={b}");
            }
        }
    }

    #[test]
    fn adaptive_simpson_log() {
        let v = adaptive_simpson(&|x: f64| x.ln(), 1.0, 2.0, 1e-12);
        assert!((v - (2.0 * 2.0_f64.ln() - 1.0)).abs() < 1e-11);
    }

    #[test]
    fn simpson_tabulated_quartic() {
        let m = 64;
        let h = 1.0 / m as f64;
        let vals: Vec<f64> = (0..=m).map(|i| (i as f64 * h).powi(3)).collect();
        assert!((simpson_tabulated(&vals, h) - 0.25).abs() < 1e-15);
    }
}
