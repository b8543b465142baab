//! Convex hull, polygon area and hull features.
//!
//! Orientation follows the usual Cartesian convention on the raw pixel
//! coordinates: a counter-clockwise polygon has a positive signed area
//! (`x` grows to the right, `y` grows with the row index).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::imaging::{BinaryImage, Plane, WHITE};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("cannot build a hull from an empty point set")]
    EmptyPointSet,
}

/// Pixel coordinate. Serializes as an `[x, y]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i32; 2]", into = "[i32; 2]")]
pub struct Point {
    pub x: i32,
    pub y: i32,
}

impl Point {
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }
}

impl From<[i32; 2]> for Point {
    fn from([x, y]: [i32; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Point> for [i32; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// z-component of `(a - o) × (b - o)`; positive when `b` lies to the
/// left of the ray `o → a`.
pub fn cross(o: Point, a: Point, b: Point) -> i64 {
    let (ax, ay) = (a.x as i64 - o.x as i64, a.y as i64 - o.y as i64);
    let (bx, by) = (b.x as i64 - o.x as i64, b.y as i64 - o.y as i64);
    ax * by - ay * bx
}

fn dist_sq(a: Point, b: Point) -> i64 {
    let (dx, dy) = (a.x as i64 - b.x as i64, a.y as i64 - b.y as i64);
    dx * dx + dy * dy
}

/// Convex hull in march order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hull {
    pub vertices: Vec<Point>,
    pub source_count: usize,
}

impl Hull {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Boundary-inclusive containment test.
    pub fn contains(&self, p: Point) -> bool {
        point_in_convex_polygon(&self.vertices, p)
    }

    /// Every consecutive vertex triple turns left (strictly convex, CCW).
    pub fn is_convex(&self) -> bool {
        let v = &self.vertices;
        if v.len() < 3 {
            return true;
        }
        (0..v.len()).all(|i| cross(v[i], v[(i + 1) % v.len()], v[(i + 2) % v.len()]) > 0)
    }

    /// JSON array of `[x, y]` pairs in march order.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.vertices).expect("points always serialize")
    }
}

/// Counters collected during a march.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MarchStats {
    /// Orientation tests performed.
    pub comparisons: u64,
}

/// Coordinates of every white pixel, row-major.
pub fn extract_points(edges: &BinaryImage) -> Vec<Point> {
    let w = edges.width();
    edges
        .values()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v == WHITE)
        .map(|(i, _)| Point::new((i % w) as i32, (i / w) as i32))
        .collect()
}

/// Gift-wrapping convex hull.
///
/// Starts from the point with the greatest `x` (greatest `y` among ties)
/// and repeatedly takes the point with the smallest counter-clockwise turn,
/// preferring the farthest one among collinear candidates, until the march
/// returns to the start.
pub fn jarvis_hull(points: &[Point]) -> Result<Hull, GeometryError> {
    jarvis_hull_with_stats(points).map(|(hull, _)| hull)
}

pub fn jarvis_hull_with_stats(points: &[Point]) -> Result<(Hull, MarchStats), GeometryError> {
    let start = *points
        .iter()
        .max_by_key(|p| (p.x, p.y))
        .ok_or(GeometryError::EmptyPointSet)?;
    let mut stats = MarchStats::default();
    let mut vertices = vec![start];
    let mut current = start;

    loop {
        let mut candidate = current;
        for &p in points {
            if p == current {
                continue;
            }
            if candidate == current {
                candidate = p;
                continue;
            }
            stats.comparisons += 1;
            let turn = cross(current, candidate, p);
            if turn < 0 || (turn == 0 && dist_sq(current, p) > dist_sq(current, candidate)) {
                candidate = p;
            }
        }
        if candidate == start || candidate == current {
            break;
        }
        vertices.push(candidate);
        current = candidate;
        // A valid march never revisits more distinct points than exist.
        debug_assert!(vertices.len() <= points.len());
    }

    Ok((
        Hull {
            vertices,
            source_count: points.len(),
        },
        stats,
    ))
}

/// Twice the signed area of a polygon (positive when counter-clockwise).
pub fn twice_signed_area(polygon: &[Point]) -> i64 {
    if polygon.len() < 3 {
        return 0;
    }
    polygon
        .iter()
        .zip(polygon.iter().cycle().skip(1))
        .map(|(a, b)| a.x as i64 * b.y as i64 - b.x as i64 * a.y as i64)
        .sum()
}

/// Shoelace polygon area, independent of orientation.
pub fn shoelace_area(polygon: &[Point]) -> f64 {
    twice_signed_area(polygon).abs() as f64 / 2.0
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    cross(a, b, p) == 0
        && p.x >= a.x.min(b.x)
        && p.x <= a.x.max(b.x)
        && p.y >= a.y.min(b.y)
        && p.y <= a.y.max(b.y)
}

/// Boundary-inclusive point-in-polygon test for a convex polygon in
/// either orientation. One- and two-vertex polygons degrade to a point and
/// a segment.
pub fn point_in_convex_polygon(polygon: &[Point], p: Point) -> bool {
    match polygon.len() {
        0 => false,
        1 => polygon[0] == p,
        2 => on_segment(polygon[0], polygon[1], p),
        n => {
            let (mut pos, mut neg) = (false, false);
            for i in 0..n {
                let c = cross(polygon[i], polygon[(i + 1) % n], p);
                pos |= c > 0;
                neg |= c < 0;
                if pos && neg {
                    return false;
                }
            }
            true
        }
    }
}

/// Inclusive lattice span `[left, right]` of a convex polygon on row `y`.
fn row_span(polygon: &[Point], y: i64) -> Option<(i64, i64)> {
    let n = polygon.len();
    let mut span: Option<(i64, i64)> = None;
    let mut widen = |lo: i64, hi: i64| {
        span = Some(match span {
            Some((l, r)) => (l.min(lo), r.max(hi)),
            None => (lo, hi),
        });
    };
    for i in 0..n {
        let a = polygon[i];
        let b = polygon[(i + 1) % n];
        let (ay, by) = (a.y as i64, b.y as i64);
        if y < ay.min(by) || y > ay.max(by) {
            continue;
        }
        let (ax, bx) = (a.x as i64, b.x as i64);
        if ay == by {
            widen(ax.min(bx), ax.max(bx));
            continue;
        }
        // x = ax + (y - ay)(bx - ax)/(by - ay), as an exact fraction
        let mut num = ax * (by - ay) + (y - ay) * (bx - ax);
        let mut den = by - ay;
        if den < 0 {
            num = -num;
            den = -den;
        }
        let floor = num.div_euclid(den);
        let ceil = -(-num).div_euclid(den);
        widen(ceil, floor);
    }
    span
}

/// Number of white mask pixels inside or on the hull, by scanline fill.
pub fn white_area_in_hull(hull: &Hull, mask: &BinaryImage) -> u64 {
    let v = &hull.vertices;
    if v.is_empty() || mask.width() == 0 || mask.height() == 0 {
        return 0;
    }
    let (w, h) = (mask.width() as i64, mask.height() as i64);
    let y_min = v.iter().map(|p| p.y as i64).min().unwrap().max(0);
    let y_max = v.iter().map(|p| p.y as i64).max().unwrap().min(h - 1);
    let mut count = 0;
    for y in y_min..=y_max {
        let Some((left, right)) = row_span(v, y) else {
            continue;
        };
        let (left, right) = (left.max(0), right.min(w - 1));
        if left > right {
            continue;
        }
        let row = &mask.values()[(y * w) as usize..((y + 1) * w) as usize];
        count += row[left as usize..=right as usize]
            .iter()
            .filter(|&&v| v == WHITE)
            .count() as u64;
    }
    count
}

/// Lattice points inside or on the hull (the white area of an all-white mask).
pub fn lattice_points_in_hull(hull: &Hull) -> u64 {
    let v = &hull.vertices;
    if v.is_empty() {
        return 0;
    }
    let y_min = v.iter().map(|p| p.y as i64).min().unwrap();
    let y_max = v.iter().map(|p| p.y as i64).max().unwrap();
    (y_min..=y_max)
        .filter_map(|y| row_span(v, y))
        .map(|(l, r)| (r - l + 1).max(0) as u64)
        .sum()
}

/// Distance between the lexicographically smallest and largest vertices.
pub fn hull_extent(hull: &Hull) -> f64 {
    let (Some(&lo), Some(&hi)) = (hull.vertices.iter().min(), hull.vertices.iter().max()) else {
        return 0.0;
    };
    (dist_sq(lo, hi) as f64).sqrt()
}

/// Area features of a hull over a foreground mask.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HullFeatures {
    pub total_area: f64,
    pub white_area: u64,
    pub ratio: f64,
    pub extent: f64,
}

impl HullFeatures {
    pub fn from_parts(total_area: f64, white_area: u64, extent: f64) -> Self {
        let ratio = if total_area > 0.0 {
            white_area as f64 / total_area
        } else {
            0.0
        };
        Self {
            total_area,
            white_area,
            ratio,
            extent,
        }
    }
}

pub fn hull_features(hull: &Hull, mask: &BinaryImage) -> HullFeatures {
    HullFeatures::from_parts(
        shoelace_area(&hull.vertices),
        white_area_in_hull(hull, mask),
        hull_extent(hull),
    )
}
