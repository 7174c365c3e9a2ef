//! Convex-body computations: quermassintegrals, Steiner polynomials,
//! parallel bodies, distance functions, Aleksandrov-Fenchel checks and
//! shell matching.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("repeated vertex at index {0}")]
    RepeatedVertex(usize),
    #[error("polygon not strictly convex at vertex {0} (cross product {1:e})")]
    NotConvex(usize, f64),
    #[error("polygon is not counterclockwise (signed area {0})")]
    NotCcw(f64),
    #[error("polygon is self-intersecting (edges {0} and {1})")]
    SelfIntersecting(usize, usize),
    #[error("invalid body parameter: {0}")]
    InvalidParameter(String),
    #[error("negative parallel distance {0}")]
    NegativeDistance(f64),
    #[error("invalid shell: need 0 < r1 < r2, got r1={r1}, r2={r2}")]
    BadShell { r1: f64, r2: f64 },
    #[error("invalid shell dimension {0}, need n >= 2")]
    BadDimension(u32),
    #[error("quermassintegral vector invalid: {0}")]
    BadQuermass(String),
}

/// Point in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }

    pub fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }

    pub fn scale(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point2) -> f64 {
        self.sub(o).norm()
    }
}

/// Distance from `p` to the closed segment [a,b].
pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b.sub(a);
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = (p.sub(a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a.add(ab.scale(t)))
}

fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    b.sub(a).cross(c.sub(a))
}

/// Proper or improper intersection of closed segments [a,b] and [c,d].
pub fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |p: Point2, q: Point2, r: Point2| {
        orient(p, q, r) == 0.0
            && r.x >= p.x.min(q.x)
            && r.x <= p.x.max(q.x)
            && r.y >= p.y.min(q.y)
            && r.y <= p.y.max(q.y)
    };
    on(c, d, a) || on(c, d, b) || on(a, b, c) || on(a, b, d)
}

const VERTEX_TOL: f64 = 1e-12;

/// Strictly convex polygon, CCW vertex loop.
///
/// Near-degenerate inputs (collinear triples, repeated vertices within
/// 1e-12 of the coordinate scale) are rejected at construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

impl ConvexPolygon {
    pub fn new(vertices: Vec<Point2>) -> Result<Self, GeomError> {
        if vertices.len() < 3 {
            return Err(GeomError::TooFewVertices(vertices.len()));
        }
        let scale = coord_scale(&vertices);
        let m = vertices.len();
        for i in 0..m {
            let j = (i + 1) % m;
            if vertices[i].dist(vertices[j]) <= VERTEX_TOL * scale {
                return Err(GeomError::RepeatedVertex(j));
            }
        }
        for i in 0..m {
            let a = vertices[i];
            let b = vertices[(i + 1) % m];
            let c = vertices[(i + 2) % m];
            let cr = b.sub(a).cross(c.sub(b));
            if cr <= VERTEX_TOL * scale * scale {
                if cr < 0.0 {
                    return Err(GeomError::NotCcw(cr));
                }
                return Err(GeomError::NotConvex((i + 1) % m, cr));
            }
        }
        Ok(ConvexPolygon { vertices })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        polygon_signed_area(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        polygon_perimeter(&self.vertices)
    }

    pub fn centroid(&self) -> Point2 {
        polygon_centroid(&self.vertices)
    }

    /// True if `p` lies in the closed polygon.
    pub fn contains(&self, p: Point2) -> bool {
        let m = self.vertices.len();
        let scale = coord_scale(&self.vertices).max(p.norm());
        for i in 0..m {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % m];
            if b.sub(a).cross(p.sub(a)) < -VERTEX_TOL * scale * scale {
                return false;
            }
        }
        true
    }

    /// Euclidean distance from `p` to the closed convex body; 0 inside.
    pub fn distance_to(&self, p: Point2) -> f64 {
        if self.contains(p) {
            return 0.0;
        }
        let m = self.vertices.len();
        let mut d = f64::INFINITY;
        for i in 0..m {
            d = d.min(point_segment_distance(
                p,
                self.vertices[i],
                self.vertices[(i + 1) % m],
            ));
        }
        d
    }

    pub fn quermassintegrals(&self) -> Result<QuermassVector, GeomError> {
        QuermassVector::new(2, vec![self.area(), self.perimeter() / 2.0, std::f64::consts::PI])
    }
}

/// Simple (not necessarily convex) positively oriented polygon; carrier
/// of the outer boundary of a perforated domain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimplePolygon {
    vertices: Vec<Point2>,
}

impl SimplePolygon {
    pub fn new(vertices: Vec<Point2>) -> Result<Self, GeomError> {
        if vertices.len() < 3 {
            return Err(GeomError::TooFewVertices(vertices.len()));
        }
        let scale = coord_scale(&vertices);
        let m = vertices.len();
        for i in 0..m {
            let j = (i + 1) % m;
            if vertices[i].dist(vertices[j]) <= VERTEX_TOL * scale {
                return Err(GeomError::RepeatedVertex(j));
            }
        }
        let area = polygon_signed_area(&vertices);
        if area <= 0.0 {
            return Err(GeomError::NotCcw(area));
        }
        // non-adjacent edge pairs must not cross
        for i in 0..m {
            for j in i + 1..m {
                if j == i + 1 || (i == 0 && j == m - 1) {
                    continue;
                }
                let (a, b) = (vertices[i], vertices[(i + 1) % m]);
                let (c, d) = (vertices[j], vertices[(j + 1) % m]);
                if segments_intersect(a, b, c, d) {
                    return Err(GeomError::SelfIntersecting(i, j));
                }
            }
        }
        Ok(SimplePolygon { vertices })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        polygon_signed_area(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        polygon_perimeter(&self.vertices)
    }

    pub fn is_convex(&self) -> bool {
        let m = self.vertices.len();
        let scale = coord_scale(&self.vertices);
        (0..m).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % m];
            let c = self.vertices[(i + 2) % m];
            b.sub(a).cross(c.sub(b)) > VERTEX_TOL * scale * scale
        })
    }

    /// Even-odd crossing test; points on the boundary count as inside
    /// up to the usual ray ambiguity, which callers avoid by clearance.
    pub fn contains(&self, p: Point2) -> bool {
        let m = self.vertices.len();
        let mut inside = false;
        for i in 0..m {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % m];
            if (a.y > p.y) != (b.y > p.y) {
                let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x_cross {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn distance_to_boundary(&self, p: Point2) -> f64 {
        let m = self.vertices.len();
        let mut d = f64::INFINITY;
        for i in 0..m {
            d = d.min(point_segment_distance(
                p,
                self.vertices[i],
                self.vertices[(i + 1) % m],
            ));
        }
        d
    }
}

fn coord_scale(vertices: &[Point2]) -> f64 {
    vertices
        .iter()
        .map(|v| v.x.abs().max(v.y.abs()))
        .fold(0.0_f64, f64::max)
        .max(1.0)
}

pub fn polygon_signed_area(vertices: &[Point2]) -> f64 {
    let m = vertices.len();
    let mut s = 0.0;
    for i in 0..m {
        s += vertices[i].cross(vertices[(i + 1) % m]);
    }
    s / 2.0
}

pub fn polygon_perimeter(vertices: &[Point2]) -> f64 {
    let m = vertices.len();
    (0..m).map(|i| vertices[i].dist(vertices[(i + 1) % m])).sum()
}

pub fn polygon_centroid(vertices: &[Point2]) -> Point2 {
    let m = vertices.len();
    let mut cx = 0.0;
    let mut cy = 0.0;
    let mut a = 0.0;
    for i in 0..m {
        let p = vertices[i];
        let q = vertices[(i + 1) % m];
        let w = p.cross(q);
        a += w;
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    Point2::new(cx / (3.0 * a), cy / (3.0 * a))
}

/// Regular k-gon inscribed in the circle of given radius, first vertex
/// at angle `phase`.
pub fn regular_polygon(center: Point2, radius: f64, sides: usize, phase: f64) -> ConvexPolygon {
    let vertices = (0..sides)
        .map(|i| {
            let a = phase + 2.0 * std::f64::consts::PI * i as f64 / sides as f64;
            Point2::new(center.x + radius * a.cos(), center.y + radius * a.sin())
        })
        .collect();
    ConvexPolygon::new(vertices).expect("regular polygon is strictly convex")
}

/// 3-D convex bodies with closed-form quermassintegrals.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum ConvexBody3D {
    Ball { radius: f64 },
    Cuboid { a: f64, b: f64, c: f64 },
}

impl ConvexBody3D {
    pub fn ball(radius: f64) -> Result<Self, GeomError> {
        if radius > 0.0 {
            Ok(ConvexBody3D::Ball { radius })
        } else {
            Err(GeomError::InvalidParameter(format!("ball radius {radius}")))
        }
    }

    pub fn cuboid(a: f64, b: f64, c: f64) -> Result<Self, GeomError> {
        if a > 0.0 && b > 0.0 && c > 0.0 {
            Ok(ConvexBody3D::Cuboid { a, b, c })
        } else {
            Err(GeomError::InvalidParameter(format!("cuboid sides {a}, {b}, {c}")))
        }
    }

    pub fn quermassintegrals(&self) -> Result<QuermassVector, GeomError> {
        use std::f64::consts::PI;
        let w = match *self {
            ConvexBody3D::Ball { radius: r } => {
                let w3 = 4.0 * PI / 3.0;
                vec![w3 * r * r * r, w3 * r * r, w3 * r, w3]
            }
            ConvexBody3D::Cuboid { a, b, c } => vec![
                a * b * c,
                2.0 * (a * b + b * c + c * a) / 3.0,
                PI * (a + b + c) / 3.0,
                4.0 * PI / 3.0,
            ],
        };
        QuermassVector::new(3, w)
    }
}

/// Any body that carries a quermassintegral vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum ConvexBody {
    Polygon(ConvexPolygon),
    Body3D(ConvexBody3D),
}

impl ConvexBody {
    pub fn quermassintegrals(&self) -> Result<QuermassVector, GeomError> {
        match self {
            ConvexBody::Polygon(p) => p.quermassintegrals(),
            ConvexBody::Body3D(b) => b.quermassintegrals(),
        }
    }
}

/// Gamma function at half-integer argument: `gamma_half(k)` = Γ(k/2).
/// Exact (up to rounding) at integer and half-integer arguments.
fn gamma_half(twice_arg: u32) -> f64 {
    assert!(twice_arg >= 1);
    match twice_arg {
        1 => std::f64::consts::PI.sqrt(),
        2 => 1.0,
        k => (k as f64 / 2.0 - 1.0) * gamma_half(k - 2),
    }
}

/// Volume of the unit ball in dimension n: ω_n = π^{n/2} / Γ(n/2 + 1).
pub fn unit_ball_volume(n: u32) -> f64 {
    std::f64::consts::PI.powf(n as f64 / 2.0) / gamma_half(n + 2)
}

/// Surface area of the sphere of radius r in dimension n: n ω_n r^{n-1}.
pub fn ball_surface(n: u32, r: f64) -> f64 {
    n as f64 * unit_ball_volume(n) * r.powi(n as i32 - 1)
}

fn binomial(n: u32, k: u32) -> f64 {
    let mut v = 1.0;
    for i in 0..k {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

const AF_TOL: f64 = 1e-10;

/// Quermassintegrals W_0 .. W_n of a convex body in dimension n.
///
/// Validated at construction: W_0 > 0, W_n = ω_n, and the
/// Aleksandrov-Fenchel monotonicity of (W_j/ω_n)^{1/(n-j)} within
/// 1e-10 relative tolerance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuermassVector {
    n: u32,
    w: Vec<f64>,
}

impl QuermassVector {
    pub fn new(n: u32, w: Vec<f64>) -> Result<Self, GeomError> {
        if w.len() != n as usize + 1 {
            return Err(GeomError::BadQuermass(format!(
                "need {} entries for dimension {n}, got {}",
                n + 1,
                w.len()
            )));
        }
        if !(w[0] > 0.0) {
            return Err(GeomError::BadQuermass(format!("W_0 = {} must be positive", w[0])));
        }
        let omega = unit_ball_volume(n);
        if (w[n as usize] - omega).abs() > AF_TOL * omega {
            return Err(GeomError::BadQuermass(format!(
                "W_n = {} must equal omega_n = {omega}",
                w[n as usize]
            )));
        }
        let qv = QuermassVector { n, w };
        for ((i, j), margin) in qv.af_margins() {
            let scale = qv.normalized(j).max(qv.normalized(i)).max(1e-300);
            if margin < -AF_TOL * scale {
                return Err(GeomError::BadQuermass(format!(
                    "Aleksandrov-Fenchel violated for (i,j)=({i},{j}): margin {margin:e}"
                )));
            }
        }
        Ok(qv)
    }

    pub fn dim(&self) -> u32 {
        self.n
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn volume(&self) -> f64 {
        self.w[0]
    }

    pub fn perimeter(&self) -> f64 {
        self.n as f64 * self.w[1]
    }

    /// (W_i/ω_n)^{1/(n-i)} for i < n.
    fn normalized(&self, i: u32) -> f64 {
        let omega = unit_ball_volume(self.n);
        (self.w[i as usize] / omega).powf(1.0 / (self.n - i) as f64)
    }

    /// Pairwise AF margins (W_j/ω_n)^{1/(n-j)} - (W_i/ω_n)^{1/(n-i)}, i < j <= n-1.
    pub fn af_margins(&self) -> Vec<((u32, u32), f64)> {
        let mut out = Vec::new();
        for i in 0..self.n - 1 {
            for j in i + 1..self.n {
                out.push(((i, j), self.normalized(j) - self.normalized(i)));
            }
        }
        out
    }

    /// Steiner polynomial: |K + ρ B_1| = Σ binom(n,i) W_i ρ^i.
    pub fn steiner_volume(&self, rho: f64) -> Result<f64, GeomError> {
        if rho < 0.0 {
            return Err(GeomError::NegativeDistance(rho));
        }
        let mut v = 0.0;
        for i in 0..=self.n {
            v += binomial(self.n, i) * self.w[i as usize] * rho.powi(i as i32);
        }
        Ok(v)
    }

    /// Perimeter of the parallel body: P(K + ρ B_1) = n Σ binom(n-1,i) W_{i+1} ρ^i.
    pub fn parallel_perimeter(&self, rho: f64) -> Result<f64, GeomError> {
        if rho < 0.0 {
            return Err(GeomError::NegativeDistance(rho));
        }
        let mut v = 0.0;
        for i in 0..self.n {
            v += binomial(self.n - 1, i) * self.w[i as usize + 1] * rho.powi(i as i32);
        }
        Ok(self.n as f64 * v)
    }

    /// Radius of the ball K* with W_{n-1}(K*) = W_{n-1}(K).
    pub fn matched_ball_radius(&self) -> f64 {
        self.w[self.n as usize - 1] / unit_ball_volume(self.n)
    }
}

/// Quermassintegrals of the ball of radius r in dimension n: W_i = ω_n r^{n-i}.
pub fn ball_quermass(n: u32, r: f64) -> QuermassVector {
    let omega = unit_ball_volume(n);
    let w = (0..=n).map(|i| omega * r.powi((n - i) as i32)).collect();
    QuermassVector::new(n, w).expect("ball quermassintegrals are valid")
}

/// Spherical shell A_{R1,R2} = B_{R2} \ closure(B_{R1}) in dimension n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellSpec {
    pub n: u32,
    pub r1: f64,
    pub r2: f64,
}

impl ShellSpec {
    pub fn new(n: u32, r1: f64, r2: f64) -> Result<Self, GeomError> {
        if n < 2 {
            return Err(GeomError::BadDimension(n));
        }
        if !(0.0 < r1 && r1 < r2) {
            return Err(GeomError::BadShell { r1, r2 });
        }
        Ok(ShellSpec { n, r1, r2 })
    }

    /// |A| = ω_n (R2^n - R1^n).
    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.n) * (self.r2.powi(self.n as i32) - self.r1.powi(self.n as i32))
    }

    /// P(B_{R1}) = n ω_n R1^{n-1}.
    pub fn inner_surface(&self) -> f64 {
        ball_surface(self.n, self.r1)
    }

    pub fn outer_surface(&self) -> f64 {
        ball_surface(self.n, self.r2)
    }

    pub fn width(&self) -> f64 {
        self.r2 - self.r1
    }

    pub fn scaled(&self, s: f64) -> ShellSpec {
        ShellSpec { n: self.n, r1: self.r1 * s, r2: self.r2 * s }
    }
}

/// Shell matched to a hole D and a target volume: R1 solves
/// W_{n-1}(B_{R1}) = W_{n-1}(D), R2 solves ω_n (R2^n - R1^n) = |Σ|.
pub fn match_shell(d: &QuermassVector, volume_sigma: f64, n: u32) -> Result<ShellSpec, GeomError> {
    if d.dim() != n {
        return Err(GeomError::InvalidParameter(format!(
            "body dimension {} does not match requested dimension {n}",
            d.dim()
        )));
    }
    if !(volume_sigma > 0.0) {
        return Err(GeomError::InvalidParameter(format!("volume {volume_sigma} must be positive")));
    }
    let r1 = d.matched_ball_radius();
    let omega = unit_ball_volume(n);
    let r2 = (r1.powi(n as i32) + volume_sigma / omega).powf(1.0 / n as f64);
    ShellSpec::new(n, r1, r2)
}

/// Perimeter-constrained matching, the variant the source problem leaves
/// open: R1 solves P(B_{R1}) = P(D) instead of the W_{n-1} constraint.
/// Exposed for experiments only; no bound is claimed for it.
pub fn match_shell_by_perimeter(
    d: &QuermassVector,
    volume_sigma: f64,
    n: u32,
) -> Result<ShellSpec, GeomError> {
    if d.dim() != n {
        return Err(GeomError::InvalidParameter(format!(
            "body dimension {} does not match requested dimension {n}",
            d.dim()
        )));
    }
    if !(volume_sigma > 0.0) {
        return Err(GeomError::InvalidParameter(format!("volume {volume_sigma} must be positive")));
    }
    let omega = unit_ball_volume(n);
    // n ω_n R1^{n-1} = P(D)
    let r1 = (d.perimeter() / (n as f64 * omega)).powf(1.0 / (n as f64 - 1.0));
    let r2 = (r1.powi(n as i32) + volume_sigma / omega).powf(1.0 / n as f64);
    ShellSpec::new(n, r1, r2)
}

/// One pairwise Aleksandrov-Fenchel margin.
#[derive(Debug, Clone, Serialize)]
pub struct AfMargin {
    pub i: u32,
    pub j: u32,
    pub margin: f64,
}

/// W_i(K) vs W_i(K*) for the matched ball K*.
#[derive(Debug, Clone, Serialize)]
pub struct BallComparison {
    pub i: u32,
    pub w_body: f64,
    pub w_ball: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AfReport {
    pub margins: Vec<AfMargin>,
    pub matched_ball_radius: f64,
    pub ball_comparisons: Vec<BallComparison>,
}

impl AfReport {
    pub fn all_nonnegative(&self, tol: f64) -> bool {
        self.margins.iter().all(|m| m.margin >= -tol)
            && self
                .ball_comparisons
                .iter()
                .all(|c| c.w_body <= c.w_ball + tol * c.w_ball.abs().max(1.0))
    }
}

/// Report every pairwise AF margin of a body and the W_i(K) <= W_i(K*)
/// comparison against the matched ball.
pub fn af_check(qv: &QuermassVector) -> AfReport {
    let r = qv.matched_ball_radius();
    let ball = ball_quermass(qv.dim(), r);
    let margins = qv
        .af_margins()
        .into_iter()
        .map(|((i, j), margin)| AfMargin { i, j, margin })
        .collect();
    let ball_comparisons = (0..qv.dim())
        .map(|i| BallComparison {
            i,
            w_body: qv.w()[i as usize],
            w_ball: ball.w()[i as usize],
        })
        .collect();
    AfReport { margins, matched_ball_radius: r, ball_comparisons }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    pub fn unit_square() -> ConvexPolygon {
        ConvexPolygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ])
        .unwrap()
    }

    #[test]
    fn rejects_degenerate_polygons() {
        assert!(matches!(
            ConvexPolygon::new(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)]),
            Err(GeomError::TooFewVertices(2))
        ));
        // collinear triple
        let r = ConvexPolygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.5, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        ]);
        assert!(matches!(r, Err(GeomError::NotConvex(_, _))));
        // clockwise
        let r = ConvexPolygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(1.0, 0.0),
        ]);
        assert!(matches!(r, Err(GeomError::NotCcw(_))));
        // repeated vertex
        let r = ConvexPolygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        ]);
        assert!(matches!(r, Err(GeomError::RepeatedVertex(_))));
    }

    #[test]
    fn unit_square_quermass() {
        let q = unit_square().quermassintegrals().unwrap();
        assert!((q.w()[0] - 1.0).abs() < 1e-15);
        assert!((q.w()[1] - 2.0).abs() < 1e-15);
        assert!((q.w()[2] - PI).abs() < 1e-15);
        assert!((q.volume() - 1.0).abs() < 1e-15);
        assert!((q.perimeter() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn disk_quermass_equality_case() {
        let q = ball_quermass(2, 2.0);
        assert!((q.w()[0] - 4.0 * PI).abs() < 1e-12);
        assert!((q.w()[1] - 2.0 * PI).abs() < 1e-12);
        assert!((q.w()[2] - PI).abs() < 1e-12);
        for ((_, _), m) in q.af_margins() {
            assert!(m.abs() < 1e-12);
        }
    }

    #[test]
    fn ball3d_quermass() {
        let q = ConvexBody3D::ball(1.5).unwrap().quermassintegrals().unwrap();
        let w3 = 4.0 * PI / 3.0;
        assert!((q.w()[0] - w3 * 3.375).abs() < 1e-12);
        assert!((q.w()[1] - w3 * 2.25).abs() < 1e-12);
        assert!((q.w()[2] - w3 * 1.5).abs() < 1e-12);
        assert!((q.w()[3] - w3).abs() < 1e-12);
    }

    #[test]
    fn cuboid_quermass_and_af() {
        let q = ConvexBody3D::cuboid(1.0, 1.0, 1.0).unwrap().quermassintegrals().unwrap();
        assert!((q.w()[2] - PI).abs() < 1e-12);
        let rep = af_check(&q);
        assert!(rep.all_nonnegative(1e-10));
        // matched ball for the unit cube: W_2(B_R) = (4π/3) R = π => R = 3/4
        assert!((rep.matched_ball_radius - 0.75).abs() < 1e-12);
    }

    #[test]
    fn steiner_volume_values() {
        let q = unit_square().quermassintegrals().unwrap();
        assert!((q.steiner_volume(1.0).unwrap() - (5.0 + PI)).abs() < 1e-12);
        assert!((q.steiner_volume(0.0).unwrap() - 1.0).abs() < 1e-15);
        let b = ball_quermass(2, 1.0);
        assert!((b.steiner_volume(1.0).unwrap() - 4.0 * PI).abs() < 1e-12);
        assert!(matches!(q.steiner_volume(-0.1), Err(GeomError::NegativeDistance(_))));
    }

    #[test]
    fn parallel_perimeter_values() {
        let q = unit_square().quermassintegrals().unwrap();
        assert!((q.parallel_perimeter(1.0).unwrap() - (4.0 + 2.0 * PI)).abs() < 1e-12);
        assert!((q.parallel_perimeter(0.0).unwrap() - 4.0).abs() < 1e-15);
        // rounded-corner oracle: P + 2πρ for any convex polygon in the plane
        assert!((q.parallel_perimeter(0.5).unwrap() - (4.0 + PI)).abs() < 1e-12);
        assert!(matches!(q.parallel_perimeter(-1.0), Err(GeomError::NegativeDistance(_))));
    }

    #[test]
    fn match_shell_square() {
        let q = unit_square().quermassintegrals().unwrap();
        let shell = match_shell(&q, 3.0 * PI, 2).unwrap();
        assert!((shell.r1 - 2.0 / PI).abs() < 1e-12);
        assert!((shell.r2 - (4.0 / (PI * PI) + 3.0).sqrt()).abs() < 1e-12);
        // round trip: the matched ball reproduces W_1(D) and the volume
        let b = ball_quermass(2, shell.r1);
        assert!((b.w()[1] - q.w()[1]).abs() < 1e-12 * q.w()[1]);
        assert!((shell.volume() - 3.0 * PI).abs() < 1e-12 * shell.volume());
    }

    #[test]
    fn match_shell_ball_fixed_point() {
        let q = ball_quermass(2, 1.0);
        let shell = match_shell(&q, PI * 3.0, 2).unwrap();
        assert!((shell.r1 - 1.0).abs() < 1e-12);
        assert!((shell.r2 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn match_shell_cube_3d() {
        let q = ConvexBody3D::cuboid(1.0, 1.0, 1.0).unwrap().quermassintegrals().unwrap();
        let shell = match_shell(&q, 10.0, 3).unwrap();
        assert!((shell.r1 - 0.75).abs() < 1e-12);
        let r2 = (0.75_f64.powi(3) + 30.0 / (4.0 * PI)).powf(1.0 / 3.0);
        assert!((shell.r2 - r2).abs() < 1e-12);
        // substitute back
        let b = ball_quermass(3, shell.r1);
        assert!((b.w()[2] - q.w()[2]).abs() < 1e-12 * q.w()[2]);
        assert!((shell.volume() - 10.0).abs() < 1e-12 * 10.0);
    }

    #[test]
    fn distance_to_square() {
        let sq = unit_square();
        assert!((sq.distance_to(Point2::new(2.0, 0.5)) - 1.0).abs() < 1e-15);
        assert!((sq.distance_to(Point2::new(2.0, 2.0)) - 2.0_f64.sqrt()).abs() < 1e-15);
        assert_eq!(sq.distance_to(Point2::new(0.5, 0.5)), 0.0);
        assert_eq!(sq.distance_to(Point2::new(1.0, 1.0)), 0.0);
    }

    #[test]
    fn af_check_square_isoperimetric() {
        let q = unit_square().quermassintegrals().unwrap();
        let rep = af_check(&q);
        assert!(rep.all_nonnegative(1e-10));
        // P^2 - 4πA = 16 - 4π > 0
        let p = q.perimeter();
        let a = q.volume();
        assert!((p * p - 4.0 * PI * a - (16.0 - 4.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn omega_n_values() {
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-15);
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-15);
        assert!((unit_ball_volume(5) - 8.0 * PI * PI / 15.0).abs() < 1e-14);
    }

    #[test]
    fn shell_validation() {
        assert!(ShellSpec::new(2, 1.0, 2.0).is_ok());
        assert!(matches!(ShellSpec::new(2, 2.0, 1.0), Err(GeomError::BadShell { .. })));
        assert!(matches!(ShellSpec::new(1, 1.0, 2.0), Err(GeomError::BadDimension(1))));
    }
}
