//! Triangulation of 2-D perforated polygonal domains Σ = Ω \ D̄ with
//! tagged inner/outer boundary edges.

use crate::geometry::{ConvexPolygon, GeomError, Point2, SimplePolygon};
use crate::gfmt::g17;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error("hole is not strictly inside the outer boundary (clearance {0})")]
    HoleNotInside(f64),
    #[error("target edge length {h} exceeds the hole-to-boundary clearance {clearance}")]
    ClearanceViolation { h: f64, clearance: f64 },
    #[error("invalid target edge length {0}")]
    BadStep(f64),
    #[error("mesh invariant violated: {0}")]
    Invariant(String),
    #[error("mesh is empty")]
    Empty,
}

/// Perforated domain: outer boundary Ω (simple, positively oriented)
/// minus a convex hole D strictly inside it.
#[derive(Debug, Clone)]
pub struct DomainSpec {
    outer: SimplePolygon,
    hole: ConvexPolygon,
}

impl DomainSpec {
    pub fn new(outer: SimplePolygon, hole: ConvexPolygon) -> Result<Self, MeshError> {
        let clearance = hole_clearance(&outer, &hole);
        if clearance <= 0.0 || hole.vertices().iter().any(|&v| !outer.contains(v)) {
            return Err(MeshError::HoleNotInside(clearance));
        }
        Ok(DomainSpec { outer, hole })
    }

    pub fn outer(&self) -> &SimplePolygon {
        &self.outer
    }

    pub fn hole(&self) -> &ConvexPolygon {
        &self.hole
    }

    /// Exact area of Σ = Ω \ D̄.
    pub fn area(&self) -> f64 {
        self.outer.area() - self.hole.area()
    }

    /// Minimum distance between the hole boundary and the outer boundary.
    pub fn clearance(&self) -> f64 {
        hole_clearance(&self.outer, &self.hole)
    }
}

fn hole_clearance(outer: &SimplePolygon, hole: &ConvexPolygon) -> f64 {
    let mut d = f64::INFINITY;
    for &v in hole.vertices() {
        d = d.min(outer.distance_to_boundary(v));
    }
    for &v in outer.vertices() {
        d = d.min(hole.distance_to(v));
    }
    d
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundaryTag {
    Outer,
    Inner,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundaryEdge {
    pub a: usize,
    pub b: usize,
    pub tag: BoundaryTag,
}

/// Conforming triangulation with two tagged boundary loops.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<Point2>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub target_h: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MeshQuality {
    pub min_angle_deg: f64,
    pub max_aspect: f64,
    pub h_max: f64,
}

impl Mesh {
    pub fn area(&self) -> f64 {
        self.triangles.iter().map(|t| self.tri_area(*t)).sum()
    }

    pub fn tri_area(&self, [a, b, c]: [usize; 3]) -> f64 {
        let (pa, pb, pc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        0.5 * pb.sub(pa).cross(pc.sub(pa))
    }

    pub fn inner_edges(&self) -> impl Iterator<Item = &BoundaryEdge> {
        self.boundary_edges.iter().filter(|e| e.tag == BoundaryTag::Inner)
    }

    pub fn outer_edges(&self) -> impl Iterator<Item = &BoundaryEdge> {
        self.boundary_edges.iter().filter(|e| e.tag == BoundaryTag::Outer)
    }

    /// Length of the tagged boundary loop.
    pub fn boundary_length(&self, tag: BoundaryTag) -> f64 {
        self.boundary_edges
            .iter()
            .filter(|e| e.tag == tag)
            .map(|e| self.vertices[e.a].dist(self.vertices[e.b]))
            .sum()
    }

    /// Vertex indices on the tagged boundary.
    pub fn boundary_vertices(&self, tag: BoundaryTag) -> Vec<usize> {
        let mut seen = vec![false; self.vertices.len()];
        for e in &self.boundary_edges {
            if e.tag == tag {
                seen[e.a] = true;
                seen[e.b] = true;
            }
        }
        (0..self.vertices.len()).filter(|&i| seen[i]).collect()
    }

    pub fn quality(&self) -> Result<MeshQuality, MeshError> {
        if self.triangles.is_empty() {
            return Err(MeshError::Empty);
        }
        let mut min_angle = f64::INFINITY;
        let mut max_aspect = 0.0_f64;
        let mut h_max = 0.0_f64;
        for &t in &self.triangles {
            let p = [self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]];
            let mut edges = [0.0; 3];
            for i in 0..3 {
                edges[i] = p[(i + 1) % 3].dist(p[(i + 2) % 3]);
            }
            let (a, b, c) = (edges[0], edges[1], edges[2]);
            let area = self.tri_area(t);
            h_max = h_max.max(a.max(b).max(c));
            // circumradius / (2 inradius), 1 for equilateral
            let s = 0.5 * (a + b + c);
            let inradius = area / s;
            let circum = a * b * c / (4.0 * area);
            max_aspect = max_aspect.max(circum / (2.0 * inradius));
            for i in 0..3 {
                let u = p[(i + 1) % 3].sub(p[i]);
                let v = p[(i + 2) % 3].sub(p[i]);
                let ang = (u.dot(v) / (u.norm() * v.norm())).clamp(-1.0, 1.0).acos();
                min_angle = min_angle.min(ang.to_degrees());
            }
        }
        Ok(MeshQuality { min_angle_deg: min_angle, max_aspect, h_max })
    }

    /// Text export: header "nv nt nbe", then vertices, triangles and
    /// tagged boundary edges, one record per line, full double precision.
    pub fn export_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{} {} {}\n",
            self.vertices.len(),
            self.triangles.len(),
            self.boundary_edges.len()
        ));
        for v in &self.vertices {
            out.push_str(&format!("{} {}\n", g17(v.x), g17(v.y)));
        }
        for t in &self.triangles {
            out.push_str(&format!("{} {} {}\n", t[0], t[1], t[2]));
        }
        for e in &self.boundary_edges {
            let tag = match e.tag {
                BoundaryTag::Outer => "outer",
                BoundaryTag::Inner => "inner",
            };
            out.push_str(&format!("{} {} {}\n", e.a, e.b, tag));
        }
        out
    }

    fn validate(&self, h: f64) -> Result<(), MeshError> {
        use std::collections::HashMap;
        if self.triangles.is_empty() {
            return Err(MeshError::Empty);
        }
        for (k, &t) in self.triangles.iter().enumerate() {
            if self.tri_area(t) < 1e-14 * h * h {
                return Err(MeshError::Invariant(format!(
                    "triangle {k} has non-positive or degenerate area"
                )));
            }
        }
        // conformity: every edge shared by <= 2 triangles, boundary edges by 1
        let mut count: HashMap<(usize, usize), u32> = HashMap::new();
        for &t in &self.triangles {
            for i in 0..3 {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        if let Some((e, &c)) = count.iter().find(|&(_, &c)| c > 2) {
            return Err(MeshError::Invariant(format!("edge {e:?} shared by {c} triangles")));
        }
        for e in &self.boundary_edges {
            let key = (e.a.min(e.b), e.a.max(e.b));
            if count.get(&key) != Some(&1) {
                return Err(MeshError::Invariant(format!(
                    "boundary edge {key:?} not shared by exactly one triangle"
                )));
            }
        }
        // two closed loops
        for tag in [BoundaryTag::Inner, BoundaryTag::Outer] {
            check_single_loop(self, tag)?;
        }
        Ok(())
    }
}

fn check_single_loop(mesh: &Mesh, tag: BoundaryTag) -> Result<(), MeshError> {
    use std::collections::HashMap;
    let edges: Vec<&BoundaryEdge> =
        mesh.boundary_edges.iter().filter(|e| e.tag == tag).collect();
    if edges.is_empty() {
        return Err(MeshError::Invariant(format!("no {tag:?} boundary edges")));
    }
    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for e in &edges {
        adj.entry(e.a).or_default().push(e.b);
        adj.entry(e.b).or_default().push(e.a);
    }
    if adj.values().any(|v| v.len() != 2) {
        return Err(MeshError::Invariant(format!("{tag:?} boundary is not a union of loops")));
    }
    // connectivity: walk from any vertex and count
    let start = edges[0].a;
    let mut visited = std::collections::HashSet::new();
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        if visited.insert(v) {
            for &w in &adj[&v] {
                stack.push(w);
            }
        }
    }
    if visited.len() != adj.len() {
        return Err(MeshError::Invariant(format!("{tag:?} boundary has more than one loop")));
    }
    Ok(())
}

/// Delaunay triangulation of the working vertex set (robust predicates
/// via the delaunator crate).
fn delaunay_triangles(pts: &[Point2]) -> Vec<[usize; 3]> {
    let input: Vec<delaunator::Point> =
        pts.iter().map(|p| delaunator::Point { x: p.x, y: p.y }).collect();
    let result = delaunator::triangulate(&input);
    result
        .triangles
        .chunks_exact(3)
        .map(|c| [c[0], c[1], c[2]])
        .collect()
}

fn ceil_div(len: f64, h: f64) -> usize {
    (len / h).ceil().max(1.0) as usize
}

fn sample_loop(vertices: &[Point2], h: f64, out: &mut Vec<Point2>) {
    let m = vertices.len();
    for i in 0..m {
        let a = vertices[i];
        let b = vertices[(i + 1) % m];
        let k = ceil_div(a.dist(b), h);
        for j in 0..k {
            let t = j as f64 / k as f64;
            out.push(a.add(b.sub(a).scale(t)));
        }
    }
}

/// Deterministic tiny jitter for interior lattice points, breaking the
/// cocircular ties of a perfect hexagonal lattice. Boundary samples are
/// never jittered.
fn jitter(seed: u64, idx: u64) -> (f64, f64) {
    let mut s = seed ^ idx.wrapping_mul(0x9e3779b97f4a7c15);
    let mut next = || {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    (next(), next())
}

/// Triangulate Σ = Ω \ D̄ at target edge length h: boundary samples
/// spaced <= h along both loops plus an interior hexagonal lattice,
/// Bowyer-Watson over the union, triangles classified by centroid.
pub fn triangulate(domain: &DomainSpec, h: f64) -> Result<Mesh, MeshError> {
    triangulate_seeded(domain, h, 0)
}

pub fn triangulate_seeded(domain: &DomainSpec, h: f64, seed: u64) -> Result<Mesh, MeshError> {
    if !(h > 0.0) {
        return Err(MeshError::BadStep(h));
    }
    let clearance = domain.clearance();
    if h >= clearance {
        return Err(MeshError::ClearanceViolation { h, clearance });
    }
    let mut pts = Vec::new();
    sample_loop(domain.outer.vertices(), h, &mut pts);
    sample_loop(domain.hole.vertices(), h, &mut pts);

    // hexagonal interior lattice, kept clear of both boundaries
    let outer_v = domain.outer.vertices();
    let (mut lo, mut hi) = (Point2::new(f64::INFINITY, f64::INFINITY), Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for p in outer_v {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    let dy = h * 3.0_f64.sqrt() / 2.0;
    let rows = ((hi.y - lo.y) / dy).ceil() as i64;
    let cols = ((hi.x - lo.x) / h).ceil() as i64;
    // strictly more than half the boundary sample spacing: keeps the
    // diametral circle of every boundary segment empty, so the segment
    // is a Gabriel (hence Delaunay) edge and survives into the mesh
    let keep_out = 0.6 * h;
    let mut idx = 0u64;
    for row in 0..=rows {
        let y = lo.y + row as f64 * dy;
        let offset = if row % 2 == 0 { 0.0 } else { 0.5 * h };
        for col in 0..=cols {
            let x = lo.x + offset + col as f64 * h;
            let (jx, jy) = jitter(seed.wrapping_add(0x5eed), idx);
            idx += 1;
            let p = Point2::new(x + 1e-3 * h * jx, y + 1e-3 * h * jy);
            if !domain.outer.contains(p) {
                continue;
            }
            if domain.hole.distance_to(p) < keep_out {
                continue;
            }
            if domain.outer.distance_to_boundary(p) < keep_out {
                continue;
            }
            pts.push(p);
        }
    }

    let vertices = pts;
    let tris = delaunay_triangles(&vertices);

    // keep triangles whose centroid lies in Σ
    let mut triangles = Vec::new();
    for &t in &tris {
        let c = Point2::new(
            (vertices[t[0]].x + vertices[t[1]].x + vertices[t[2]].x) / 3.0,
            (vertices[t[0]].y + vertices[t[1]].y + vertices[t[2]].y) / 3.0,
        );
        if !domain.outer.contains(c) || domain.hole.contains(c) {
            continue;
        }
        let area = 0.5 * vertices[t[1]].sub(vertices[t[0]]).cross(vertices[t[2]].sub(vertices[t[0]]));
        // slivers spanned by nearly collinear boundary samples carry no
        // area; dropping them leaves their long edge on the loop, so
        // boundary tagging still closes
        if area.abs() <= 1e-9 * h * h {
            continue;
        }
        // store CCW
        if area >= 0.0 {
            triangles.push(t);
        } else {
            triangles.push([t[0], t[2], t[1]]);
        }
    }

    // drop unused vertices (lattice points culled with their triangles)
    let mut remap = vec![usize::MAX; vertices.len()];
    let mut used = Vec::new();
    for t in &mut triangles {
        for v in t.iter_mut() {
            if remap[*v] == usize::MAX {
                remap[*v] = used.len();
                used.push(vertices[*v]);
            }
            *v = remap[*v];
        }
    }
    let vertices = used;

    // boundary edges: used by exactly one triangle, tagged by location
    use std::collections::HashMap;
    let mut count: HashMap<(usize, usize), (usize, usize, u32)> = HashMap::new();
    for &t in &triangles {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            let e = count.entry((a.min(b), a.max(b))).or_insert((a, b, 0));
            e.2 += 1;
        }
    }
    let scale = (hi.x - lo.x).max(hi.y - lo.y).max(1.0);
    let on_tol = 1e-9 * scale;
    let mut boundary_edges = Vec::new();
    for (_, (a, b, c)) in count {
        if c != 1 {
            continue;
        }
        let mid = vertices[a].add(vertices[b]).scale(0.5);
        let da = domain.hole.distance_to(vertices[a]).max(domain.hole.distance_to(vertices[b]));
        let dmid_in = domain.hole.distance_to(mid);
        let do_ = domain
            .outer
            .distance_to_boundary(vertices[a])
            .max(domain.outer.distance_to_boundary(vertices[b]));
        let dmid_out = domain.outer.distance_to_boundary(mid);
        let tag = if da <= on_tol && dmid_in <= on_tol {
            BoundaryTag::Inner
        } else if do_ <= on_tol && dmid_out <= on_tol {
            BoundaryTag::Outer
        } else {
            return Err(MeshError::Invariant(format!(
                "boundary edge ({a},{b}) lies on neither loop: ({},{})-({},{}), hole dists ({da:.3e},{dmid_in:.3e}), outer dists ({do_:.3e},{dmid_out:.3e})",
                vertices[a].x, vertices[a].y, vertices[b].x, vertices[b].y
            )));
        };
        boundary_edges.push(BoundaryEdge { a, b, tag });
    }
    boundary_edges.sort_by_key(|e| (e.a, e.b));

    let mesh = Mesh { vertices, triangles, boundary_edges, target_h: h };
    mesh.validate(h)?;
    Ok(mesh)
}

/// Check the Delaunay property: no mesh vertex strictly inside any
/// triangle circumcircle, within 1e-12 of the circumradius.
pub fn delaunay_violations(mesh: &Mesh) -> usize {
    let mut bad = 0;
    for &t in &mesh.triangles {
        let (a, b, c) = (mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
        // circumcenter
        let d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
        if d == 0.0 {
            continue;
        }
        let ux = ((a.dot(a)) * (b.y - c.y) + (b.dot(b)) * (c.y - a.y) + (c.dot(c)) * (a.y - b.y)) / d;
        let uy = ((a.dot(a)) * (c.x - b.x) + (b.dot(b)) * (a.x - c.x) + (c.dot(c)) * (b.x - a.x)) / d;
        let center = Point2::new(ux, uy);
        let radius = center.dist(a);
        for (i, &p) in mesh.vertices.iter().enumerate() {
            if t.contains(&i) {
                continue;
            }
            if center.dist(p) < radius * (1.0 - 1e-12) {
                bad += 1;
                break;
            }
        }
    }
    bad
}
