//! Domain file loading: JSON {"outer": [[x,y],...], "hole": [[x,y],...]}.
//! Orientation is normalized to CCW with a warning, since hand-authored
//! fixtures commonly get it wrong.

use serde::Deserialize;
use shellspec_core::{ConvexPolygon, DomainSpec, Point2, SimplePolygon};
use std::path::Path;

#[derive(Deserialize)]
struct DomainDoc {
    outer: Vec<[f64; 2]>,
    hole: Vec<[f64; 2]>,
}

fn to_points(raw: &[[f64; 2]]) -> Vec<Point2> {
    raw.iter().map(|&[x, y]| Point2::new(x, y)).collect()
}

fn signed_area(pts: &[Point2]) -> f64 {
    let m = pts.len();
    (0..m)
        .map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % m]);
            a.x * b.y - b.x * a.y
        })
        .sum::<f64>()
        * 0.5
}

fn ensure_ccw(mut pts: Vec<Point2>, label: &str) -> Vec<Point2> {
    if signed_area(&pts) < 0.0 {
        eprintln!("warning: {label} polygon is clockwise; re-orienting to CCW");
        pts.reverse();
    }
    pts
}

pub fn load_domain(path: &Path) -> Result<DomainSpec, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let doc: DomainDoc = serde_json::from_str(&text)
        .map_err(|e| format!("cannot parse {}: {e}", path.display()))?;
    let outer = ensure_ccw(to_points(&doc.outer), "outer");
    let hole = ensure_ccw(to_points(&doc.hole), "hole");
    let outer = SimplePolygon::new(outer).map_err(|e| format!("outer polygon: {e}"))?;
    let hole = ConvexPolygon::new(hole).map_err(|e| format!("hole polygon: {e}"))?;
    DomainSpec::new(outer, hole).map_err(|e| e.to_string())
}
