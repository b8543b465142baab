//! Brute-force oracles shared by the integration suites. None of these call
//! into the library routines they check.

#![allow(dead_code)]

use gesture_rps::imaging::{Histogram, Plane};
use gesture_rps::Point;
use rand::Rng;

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn xy(p: Point) -> (i64, i64) {
    (p.x as i64, p.y as i64)
}

fn on_closed_segment(a: (i64, i64), b: (i64, i64), q: (i64, i64)) -> bool {
    cross(a, b, q) == 0
        && q.0 >= a.0.min(b.0)
        && q.0 <= a.0.max(b.0)
        && q.1 >= a.1.min(b.1)
        && q.1 <= a.1.max(b.1)
}

/// Extreme points of a set by checking every ordered pair as a candidate
/// hull edge: `a → b` is an edge when every point lies strictly left of it
/// or on the closed segment.
pub fn brute_force_hull_vertices(points: &[Point]) -> Vec<Point> {
    let mut distinct: Vec<(i64, i64)> = points.iter().map(|&p| xy(p)).collect();
    distinct.sort();
    distinct.dedup();
    if distinct.len() == 1 {
        return vec![Point::new(distinct[0].0 as i32, distinct[0].1 as i32)];
    }
    let mut extreme = vec![false; distinct.len()];
    for i in 0..distinct.len() {
        for j in 0..distinct.len() {
            if i == j {
                continue;
            }
            let (a, b) = (distinct[i], distinct[j]);
            let is_edge = distinct
                .iter()
                .all(|&q| cross(a, b, q) > 0 || on_closed_segment(a, b, q));
            if is_edge {
                extreme[i] = true;
                extreme[j] = true;
            }
        }
    }
    distinct
        .iter()
        .zip(extreme)
        .filter(|(_, e)| *e)
        .map(|(&(x, y), _)| Point::new(x as i32, y as i32))
        .collect()
}

/// Boundary-inclusive containment in a convex polygon given in either
/// orientation, with point and segment degenerations.
pub fn brute_force_contains(polygon: &[Point], p: Point) -> bool {
    let q = xy(p);
    match polygon.len() {
        0 => false,
        1 => xy(polygon[0]) == q,
        2 => on_closed_segment(xy(polygon[0]), xy(polygon[1]), q),
        n => {
            let signs: Vec<i64> = (0..n)
                .map(|i| cross(xy(polygon[i]), xy(polygon[(i + 1) % n]), q).signum())
                .collect();
            signs.iter().all(|&s| s >= 0) || signs.iter().all(|&s| s <= 0)
        }
    }
}

/// Area by fan triangulation from the first vertex.
pub fn fan_area(polygon: &[Point]) -> f64 {
    if polygon.len() < 3 {
        return 0.0;
    }
    let o = xy(polygon[0]);
    let twice: i64 = (1..polygon.len() - 1)
        .map(|i| cross(o, xy(polygon[i]), xy(polygon[i + 1])))
        .sum();
    twice.abs() as f64 / 2.0
}

/// Normalized histogram `p_q = n_q / n`.
pub fn probabilities(counts: &[u64; 256]) -> Vec<f64> {
    let n: u64 = counts.iter().sum();
    counts.iter().map(|&c| c as f64 / n as f64).collect()
}

/// Between-class variance at level `k` straight from the normalized
/// histogram definitions. Returns `(variance, w0, w1, mu0, mu1, mu_t)`.
pub fn otsu_terms(
    counts: &[u64; 256],
    p: &[f64],
    k: usize,
) -> Option<(f64, f64, f64, f64, f64, f64)> {
    let lower_n: u64 = counts[..k].iter().sum();
    let n: u64 = counts.iter().sum();
    if lower_n == 0 || lower_n == n {
        return None;
    }
    let w0: f64 = p[..k].iter().sum();
    let w1: f64 = p[k..].iter().sum();
    let mu0: f64 = (0..k).map(|q| q as f64 * p[q]).sum::<f64>() / w0;
    let mu1: f64 = (k..256).map(|q| q as f64 * p[q]).sum::<f64>() / w1;
    let mu_t: f64 = (0..256).map(|q| q as f64 * p[q]).sum();
    let var = w0 * (mu0 - mu_t).powi(2) + w1 * (mu1 - mu_t).powi(2);
    Some((var, w0, w1, mu0, mu1, mu_t))
}

/// Exhaustive argmax over every level, smallest level on ties.
pub fn otsu_oracle(hist: &Histogram) -> Option<u8> {
    let p = probabilities(hist.counts());
    let mut best: Option<(usize, f64)> = None;
    for k in 1..256 {
        if let Some((var, ..)) = otsu_terms(hist.counts(), &p, k) {
            if best.is_none_or(|(_, b)| var > b) {
                best = Some((k, var));
            }
        }
    }
    best.map(|(k, _)| k as u8)
}

pub fn random_histogram(rng: &mut impl Rng) -> Histogram {
    let mut counts = [0u64; 256];
    match rng.random_range(0..4) {
        // dense
        0 => counts
            .iter_mut()
            .for_each(|c| *c = rng.random_range(0..1000)),
        // sparse
        1 => {
            for _ in 0..rng.random_range(2..12) {
                counts[rng.random_range(0..256)] += rng.random_range(1..5000);
            }
        }
        // two spikes
        2 => {
            counts[rng.random_range(0..128)] += rng.random_range(1..500);
            counts[rng.random_range(128..256)] += rng.random_range(1..500);
        }
        // bimodal blobs
        _ => {
            let (m1, m2) = (rng.random_range(20..110), rng.random_range(140..235));
            for q in 0..256i64 {
                let d1 = (q - m1).abs();
                let d2 = (q - m2).abs();
                counts[q as usize] = (200 - 10 * d1).max(0) as u64
                    + (150 - 8 * d2).max(0) as u64
                    + rng.random_range(0..3);
            }
        }
    }
    if counts.iter().all(|&c| c == 0) {
        counts[0] = 1;
        counts[255] = 1;
    }
    Histogram::from_counts(counts)
}

const SOBEL_X: [[i32; 3]; 3] = [[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]];
const SOBEL_Y: [[i32; 3]; 3] = [[-1, -2, -1], [0, 0, 0], [1, 2, 1]];

/// Direct 3×3 correlation with the Sobel masks; returns the clamped
/// magnitude at an interior pixel.
pub fn sobel_magnitude_oracle(img: &impl Plane, x: usize, y: usize) -> u8 {
    let (mut gx, mut gy) = (0i32, 0i32);
    for (row, dy) in (0..3).zip(-1i64..=1) {
        for (col, dx) in (0..3).zip(-1i64..=1) {
            let v = img.value((x as i64 + dx) as usize, (y as i64 + dy) as usize) as i32;
            gx += SOBEL_X[row][col] * v;
            gy += SOBEL_Y[row][col] * v;
        }
    }
    let mag = ((gx * gx + gy * gy) as f64).sqrt().floor();
    mag.min(255.0) as u8
}

pub fn random_points(rng: &mut impl Rng, span: i32) -> Vec<Point> {
    let n = rng.random_range(1..=50);
    match rng.random_range(0..5) {
        // collinear along a random lattice direction
        0 => {
            let (dx, dy) = (rng.random_range(-3..=3), rng.random_range(-3..=3));
            let (ox, oy) = (rng.random_range(0..span), rng.random_range(0..span));
            (0..n)
                .map(|_| {
                    let t = rng.random_range(-5..=5);
                    Point::new(ox + t * dx, oy + t * dy)
                })
                .collect()
        }
        // heavy duplication from a small pool
        1 => {
            let pool: Vec<Point> = (0..rng.random_range(1..6))
                .map(|_| Point::new(rng.random_range(0..span), rng.random_range(0..span)))
                .collect();
            (0..n)
                .map(|_| pool[rng.random_range(0..pool.len())])
                .collect()
        }
        // points on an axis-aligned rectangle boundary (many collinear edges)
        2 => {
            let (w, h) = (rng.random_range(1..span), rng.random_range(1..span));
            (0..n)
                .map(|_| match rng.random_range(0..4) {
                    0 => Point::new(rng.random_range(0..=w), 0),
                    1 => Point::new(rng.random_range(0..=w), h),
                    2 => Point::new(0, rng.random_range(0..=h)),
                    _ => Point::new(w, rng.random_range(0..=h)),
                })
                .collect()
        }
        // small grid, dense collisions
        3 => (0..n)
            .map(|_| Point::new(rng.random_range(0..6), rng.random_range(0..6)))
            .collect(),
        _ => (0..n)
            .map(|_| Point::new(rng.random_range(0..span), rng.random_range(0..span)))
            .collect(),
    }
}
