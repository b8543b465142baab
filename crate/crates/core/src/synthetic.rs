//! Rasterized stand-ins for the three hand gestures.
//!
//! A filled disk plays the fist, a larger disk the open hand, and a disk
//! with two thin diverging strips the scissors. All shapes are white on a
//! black 320×240 frame.

use crate::imaging::{BinaryImage, Frame};

pub const WIDTH: usize = 320;
pub const HEIGHT: usize = 240;
pub const ROCK_RADIUS: f64 = 30.0;
pub const PAPER_SCALE: f64 = 1.6;

const WHITE: [u8; 4] = [255, 255, 255, 255];
const BLACK: [u8; 4] = [0, 0, 0, 255];

fn center() -> (f64, f64) {
    (WIDTH as f64 / 2.0, HEIGHT as f64 / 2.0)
}

fn in_disk(x: f64, y: f64, cx: f64, cy: f64, r: f64) -> bool {
    (x - cx).powi(2) + (y - cy).powi(2) <= r * r
}

/// Distance from `p` to the segment `a-b`.
fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len_sq = dx * dx + dy * dy;
    let t = (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len_sq).clamp(0.0, 1.0);
    let (qx, qy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - qx).powi(2) + (p.1 - qy).powi(2)).sqrt()
}

/// Filled disk centered in the frame.
pub fn disk_mask(radius: f64) -> BinaryImage {
    let (cx, cy) = center();
    BinaryImage::from_fn(WIDTH, HEIGHT, |x, y| {
        in_disk(x as f64, y as f64, cx, cy, radius)
    })
}

/// Disk in the lower half with two 2-pixel-wide strips fanning upward
/// at ±25° from vertical.
pub fn v_shape_mask() -> BinaryImage {
    let (cx, cy) = (WIDTH as f64 / 2.0, 170.0);
    let r = ROCK_RADIUS;
    let length = 130.0;
    let spread = 25f64.to_radians();
    let tips = [-1.0, 1.0].map(|side| {
        (
            cx + side * length * spread.sin(),
            cy - length * spread.cos(),
        )
    });
    BinaryImage::from_fn(WIDTH, HEIGHT, |x, y| {
        let p = (x as f64, y as f64);
        in_disk(p.0, p.1, cx, cy, r)
            || tips
                .iter()
                .any(|&tip| segment_distance(p, (cx, cy), tip) < 1.0)
    })
}

/// Paints a mask white on black as an opaque frame.
pub fn mask_to_frame(mask: &BinaryImage) -> Frame {
    let mut frame = Frame::filled(WIDTH, HEIGHT, BLACK);
    for y in 0..HEIGHT {
        for x in 0..WIDTH {
            if mask.is_white(x, y) {
                frame.set_pixel(x, y, WHITE);
            }
        }
    }
    frame
}

pub fn disk_frame(radius: f64) -> Frame {
    mask_to_frame(&disk_mask(radius))
}

pub fn rock_frame() -> Frame {
    disk_frame(ROCK_RADIUS)
}

pub fn paper_frame() -> Frame {
    disk_frame(ROCK_RADIUS * PAPER_SCALE)
}

pub fn scissors_frame() -> Frame {
    mask_to_frame(&v_shape_mask())
}

pub fn background_frame() -> Frame {
    Frame::filled(WIDTH, HEIGHT, BLACK)
}
