//! Deterministic synthetic digit images at MNIST geometry.
//!
//! Real MNIST files are not bundled; this fixture draws stroke-based
//! digit glyphs with seeded per-image jitter (translation, scale,
//! rotation, stroke width, intensity) so the PCA/GAN pipeline has a
//! reproducible dataset of the right shape. Full IDX ingestion of the
//! real dataset is supported separately by [`super::mnist`].

use rand::Rng;

use crate::rng::{child, SimRng};

/// Images are 28×28 like MNIST.
pub const IMAGE_SIDE: usize = 28;

/// Pixels per image.
pub const IMAGE_PIXELS: usize = IMAGE_SIDE * IMAGE_SIDE;

/// Default fixture size per digit.
pub const FIXTURE_IMAGES_PER_DIGIT: usize = 500;

type Point = [f64; 2];

/// Open polylines making up a digit glyph, in 28×28 coordinates
/// (x right, y down).
fn glyph(digit: u8) -> Vec<Vec<Point>> {
    let ellipse = |cx: f64, cy: f64, rx: f64, ry: f64| -> Vec<Point> {
        let steps = 48;
        (0..=steps)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / steps as f64;
                [cx + rx * t.cos(), cy + ry * t.sin()]
            })
            .collect()
    };
    match digit {
        0 => vec![ellipse(14.0, 14.5, 5.0, 7.5)],
        1 => vec![
            vec![[15.0, 5.5], [15.0, 22.0]],
            vec![[12.0, 8.5], [15.0, 5.5]],
            vec![[12.0, 22.0], [18.0, 22.0]],
        ],
        2 => vec![
            vec![
                [9.5, 9.0],
                [10.5, 7.0],
                [13.0, 6.0],
                [16.0, 6.5],
                [17.5, 9.0],
                [16.5, 12.0],
                [13.0, 15.0],
                [10.0, 18.0],
                [9.0, 21.0],
            ],
            vec![[9.0, 21.0], [18.5, 21.0]],
        ],
        3 => vec![
            vec![
                [10.0, 7.0],
                [14.0, 6.0],
                [17.0, 8.0],
                [16.0, 11.0],
                [13.0, 12.5],
            ],
            vec![
                [13.0, 12.5],
                [17.0, 14.5],
                [17.5, 18.0],
                [14.0, 21.5],
                [10.0, 20.5],
            ],
        ],
        4 => vec![
            vec![[16.5, 6.0], [9.0, 16.5]],
            vec![[9.0, 16.5], [20.0, 16.5]],
            vec![[16.5, 6.0], [16.5, 22.0]],
        ],
        5 => vec![
            vec![[17.5, 6.0], [10.5, 6.0], [10.0, 12.5]],
            vec![
                [10.0, 12.5],
                [14.5, 11.5],
                [17.5, 14.0],
                [17.0, 18.5],
                [13.5, 21.5],
                [9.5, 20.0],
            ],
        ],
        6 => vec![
            vec![[16.5, 5.5], [12.5, 9.0], [10.5, 14.0]],
            ellipse(14.0, 16.5, 4.0, 5.0),
        ],
        7 => vec![
            vec![[9.5, 6.5], [18.5, 6.5]],
            vec![[18.5, 6.5], [12.5, 22.0]],
        ],
        8 => vec![ellipse(14.0, 10.0, 3.8, 4.2), ellipse(14.0, 18.2, 4.6, 4.2)],
        9 => vec![
            ellipse(13.5, 10.5, 4.2, 4.6),
            vec![[17.7, 10.5], [15.5, 22.0]],
        ],
        other => panic!("digit {other} out of range"),
    }
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len_sq = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len_sq > 0.0 {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len_sq).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let closest = [a[0] + t * ab[0], a[1] + t * ab[1]];
    ((p[0] - closest[0]).powi(2) + (p[1] - closest[1]).powi(2)).sqrt()
}

fn render(strokes: &[Vec<Point>], thickness: f64, intensity: f64) -> Vec<f64> {
    let mut image = vec![0.0; IMAGE_PIXELS];
    for (idx, px) in image.iter_mut().enumerate() {
        let p = [(idx % IMAGE_SIDE) as f64, (idx / IMAGE_SIDE) as f64];
        let mut dist = f64::INFINITY;
        for polyline in strokes {
            for pair in polyline.windows(2) {
                dist = dist.min(point_segment_distance(p, pair[0], pair[1]));
                if dist == 0.0 {
                    break;
                }
            }
        }
        // Solid core with a soft 1.2-pixel falloff.
        let v = if dist <= thickness {
            1.0
        } else {
            (1.0 - (dist - thickness) / 1.2).max(0.0)
        };
        *px = (v * intensity).clamp(0.0, 1.0);
    }
    image
}

fn jittered_strokes(digit: u8, rng: &mut SimRng) -> Vec<Vec<Point>> {
    let centre = (IMAGE_SIDE as f64 - 1.0) / 2.0;
    let dx = rng.random_range(-1.5..1.5);
    let dy = rng.random_range(-1.5..1.5);
    let scale = rng.random_range(0.85..1.15);
    let angle = rng.random_range(-0.12..0.12f64);
    let (sin, cos) = angle.sin_cos();
    glyph(digit)
        .into_iter()
        .map(|polyline| {
            polyline
                .into_iter()
                .map(|[x, y]| {
                    let (u, v) = (x - centre, y - centre);
                    let (ru, rv) = (u * cos - v * sin, u * sin + v * cos);
                    [centre + scale * ru + dx, centre + scale * rv + dy]
                })
                .collect()
        })
        .collect()
}

/// Renders `count` deterministic variations of a digit. Image `i` depends
/// only on `(digit, i, seed)`, so subsets are stable.
pub fn digit_images(digit: u8, count: usize, seed: u64) -> Vec<Vec<f64>> {
    assert!(digit <= 9, "digit out of range");
    (0..count)
        .map(|i| {
            let mut rng = child(seed, (digit as u64) << 32 | i as u64);
            let strokes = jittered_strokes(digit, &mut rng);
            let thickness = rng.random_range(1.1..1.9);
            let intensity = rng.random_range(0.85..1.0);
            render(&strokes, thickness, intensity)
        })
        .collect()
}
