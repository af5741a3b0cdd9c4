use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::grid::{sample, GridSpec, VectorField};
use crate::grushin::{GrushinFunction, GrushinGrid};
use crate::rotations::derive_seed;

use super::config::Family;

type Member = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// `e^{-1/(1-|x|^2)}` on `|x| < 1`, zero outside.
pub fn remark_bump(x: &[f64]) -> f64 {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    if r2 < 1.0 {
        (-1.0 / (1.0 - r2)).exp()
    } else {
        0.0
    }
}

fn sq_dist(x: &[f64], c: &[f64]) -> f64 {
    x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Member `index` of `family` on `R^dim` in the cube `[-L, L]^dim`.
///
/// * `gaussian`: `e^{-pi |x - c_n|^2 / w_n^2}`, `c_n = n/4 e_1`, `w_n = 1 + n/2`;
/// * `ball_indicator`: indicator of `|x - c_n| <= 1 + n/4`;
/// * `remark_bump`: the compact bump for `n = 0`, zero otherwise;
/// * `random_bumps`: Gaussians `e^{-|x - c|^2 / w^2}` with seeded centers in
///   `[-L/2, L/2]^dim` and widths in `[0.5, 1.5]`.
pub fn family_member(family: Family, dim: usize, half_width: f64, seed: u64, index: usize) -> Member {
    let shift = |s: f64| {
        let mut c = vec![0.0; dim];
        c[0] = s;
        c
    };
    match family {
        Family::Gaussian => {
            let c = shift(0.25 * index as f64);
            let w = 1.0 + 0.5 * index as f64;
            Box::new(move |x| (-PI * sq_dist(x, &c) / (w * w)).exp())
        }
        Family::BallIndicator => {
            let c = shift(0.25 * index as f64);
            let rho = 1.0 + 0.25 * index as f64;
            Box::new(move |x| if sq_dist(x, &c) <= rho * rho { 1.0 } else { 0.0 })
        }
        Family::RemarkBump => {
            if index == 0 {
                Box::new(remark_bump)
            } else {
                Box::new(|_| 0.0)
            }
        }
        Family::RandomBumps => {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, index as u64));
            let c: Vec<f64> = (0..dim).map(|_| rng.gen_range(-0.5 * half_width..=0.5 * half_width)).collect();
            let w: f64 = rng.gen_range(0.5..=1.5);
            Box::new(move |x| (-sq_dist(x, &c) / (w * w)).exp())
        }
    }
}

/// The first `n` members sampled on `spec`.
pub fn build_family(family: Family, spec: &GridSpec, n: usize, seed: u64) -> Result<VectorField> {
    let members = (0..n)
        .map(|i| sample(spec, family_member(family, spec.dim(), spec.half_width(), seed, i)))
        .collect::<Result<Vec<_>>>()?;
    VectorField::new(members)
}

/// The first `n` members on `R^{d+1}`, sampled at `(x, u)`.
pub fn build_grushin_family(family: Family, grid: &GrushinGrid, n: usize, seed: u64) -> Result<Vec<GrushinFunction>> {
    let dim = grid.dim() + 1;
    let half = grid.half_widths().0.min(grid.half_widths().1);
    (0..n)
        .map(|i| {
            let m = family_member(family, dim, half, seed, i);
            GrushinFunction::sample(grid, |x, u| {
                let mut p = x.to_vec();
                p.push(u);
                m(&p)
            })
        })
        .collect()
}
