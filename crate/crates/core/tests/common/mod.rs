#![allow(dead_code)]

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tfdw::{Field, Grid2D};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sum of `count` Gaussian packets with random centres, widths and weights,
/// kept well inside `radius`.
pub fn packets(grid: Grid2D, rng: &mut ChaCha8Rng, count: usize, radius: f64, width: (f64, f64)) -> Field {
    let params: Vec<(f64, f64, f64, f64)> = (0..count)
        .map(|_| {
            (
                rng.random_range(-radius..radius),
                rng.random_range(-radius..radius),
                rng.random_range(width.0..width.1),
                rng.random_range(-1.0..1.0),
            )
        })
        .collect();
    Field::from_fn(grid, |x, y| {
        params
            .iter()
            .map(|&(cx, cy, s, w)| {
                let r2 = (x - cx).powi(2) + (y - cy).powi(2);
                w * (-r2 / (2.0 * s * s)).exp()
            })
            .sum()
    })
    .unwrap()
}

pub fn max_abs_diff(a: &Field, b: &Field) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Max of |a − b| over nodes with both coordinates inside `[-half, half]`.
pub fn max_abs_diff_inside(a: &Field, b: &Field, half: f64) -> f64 {
    let g = a.grid();
    let n = g.n();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let (x, y) = g.node(i, j);
            if x.abs() <= half && y.abs() <= half {
                worst = worst.max((a.get(i, j) - b.get(i, j)).abs());
            }
        }
    }
    worst
}
