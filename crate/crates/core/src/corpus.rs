//! Deterministic test-function corpus.
//!
//! Members, all reproducible from (grid, seed):
//!
//! * `constant`: 1 everywhere.
//! * `sawtooth`: the first coordinate, `f(x) = x_1`; the box kernel
//!   fixes it exactly away from the wrap seam.
//! * `log_profile`: torus-periodic logarithm `ln(2 |sin(pi (x_1 - x_s)/L)|)`
//!   with the singularity `x_s` placed a quarter cell from the index-0
//!   center, so menu balls centered there probe the singular behavior.
//! * `mollified_indicator`: indicator of the central ball of radius `L/4`
//!   smoothed by a narrow Gaussian multiplier.
//! * `random_fourier`: 32 random modes with power-law (`k^{-3/2}`)
//!   amplitude decay, seeded.
//! * `single_mode`: `cos(2 pi x_1 / L)`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::spectral;

pub const MEMBER_NAMES: [&str; 6] = [
    "constant",
    "sawtooth",
    "log_profile",
    "mollified_indicator",
    "random_fourier",
    "single_mode",
];

/// Coordinate of the log-profile singularity: a quarter cell from the
/// index-0 grid point. The off-center fraction keeps neighboring samples
/// at distinct distances, so level-set measures step one cell at a time.
pub fn log_singularity(grid: &Grid) -> f64 {
    -0.5 * grid.side_length() + 0.25 * grid.spacing()
}

pub fn constant(grid: &Arc<Grid>) -> Result<GridFunction> {
    GridFunction::constant(grid.clone(), 1.0)
}

pub fn sawtooth(grid: &Arc<Grid>) -> Result<GridFunction> {
    GridFunction::from_fn(grid.clone(), |x| x[0])
}

pub fn log_profile(grid: &Arc<Grid>) -> Result<GridFunction> {
    let l = grid.side_length();
    let shift = log_singularity(grid);
    GridFunction::from_fn(grid.clone(), |x| {
        let u = std::f64::consts::PI * (x[0] - shift) / l;
        (2.0 * u.sin().abs()).ln()
    })
}

pub fn mollified_indicator(grid: &Arc<Grid>) -> Result<GridFunction> {
    let r = grid.side_length() / 4.0;
    let raw = GridFunction::from_fn(grid.clone(), |x| {
        let d2 = x[0] * x[0] + x[1] * x[1];
        if d2 < r * r {
            1.0
        } else {
            0.0
        }
    })?;
    let sigma = 4.0 * grid.spacing();
    Ok(spectral::apply_multiplier(&raw, |xi| {
        (-0.5 * sigma * sigma * xi * xi).exp()
    }))
}

pub fn random_fourier(grid: &Arc<Grid>, seed: u64) -> Result<GridFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = grid.side_length();
    let two_pi = 2.0 * std::f64::consts::PI;
    let modes = 32usize;
    let decay = 1.5f64;
    struct Mode {
        k: [f64; 2],
        amp: f64,
        phase: f64,
    }
    let mut spec = Vec::with_capacity(modes);
    for j in 1..=modes {
        let k1 = j as f64;
        let k2 = if grid.dim() == 2 {
            rng.random_range(-4..=4i32) as f64
        } else {
            0.0
        };
        let amp: f64 = rng.random_range(0.5..1.5) * k1.powf(-decay);
        let phase: f64 = rng.random_range(0.0..two_pi);
        spec.push(Mode { k: [k1, k2], amp, phase });
    }
    GridFunction::from_fn(grid.clone(), move |x| {
        spec.iter()
            .map(|m| m.amp * (two_pi * (m.k[0] * x[0] + m.k[1] * x[1]) / l + m.phase).cos())
            .sum()
    })
}

pub fn single_mode(grid: &Arc<Grid>) -> Result<GridFunction> {
    let omega = 2.0 * std::f64::consts::PI / grid.side_length();
    GridFunction::from_fn(grid.clone(), move |x| (omega * x[0]).cos())
}

pub fn member(grid: &Arc<Grid>, name: &str, seed: u64) -> Result<GridFunction> {
    match name {
        "constant" => constant(grid),
        "sawtooth" => sawtooth(grid),
        "log_profile" => log_profile(grid),
        "mollified_indicator" => mollified_indicator(grid),
        "random_fourier" => random_fourier(grid, seed),
        "single_mode" => single_mode(grid),
        other => Err(Error::Config(format!("unknown corpus member: {other}"))),
    }
}

/// The full named corpus in declaration order.
pub fn generate_corpus(grid: &Arc<Grid>, seed: u64) -> Result<Vec<(String, GridFunction)>> {
    MEMBER_NAMES
        .iter()
        .map(|&n| Ok((n.to_string(), member(grid, n, seed)?)))
        .collect()
}

/// The standard weight `|x|^{1/2}` clamped at half a cell, keeping the
/// sampled weight strictly positive at the origin.
pub fn sqrt_abs_weight(grid: &Arc<Grid>) -> Result<GridFunction> {
    abs_power_weight(grid, 0.5)
}

pub fn abs_power_weight(grid: &Arc<Grid>, exponent: f64) -> Result<GridFunction> {
    let floor = 0.5 * grid.spacing();
    GridFunction::from_fn(grid.clone(), move |x| {
        let d = (x[0] * x[0] + x[1] * x[1]).sqrt().max(floor);
        d.powf(exponent)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_given_seed() {
        let g = Grid::new(1, 2.0, 256).unwrap();
        let a = generate_corpus(&g, 7).unwrap();
        let b = generate_corpus(&g, 7).unwrap();
        for ((na, fa), (nb, fb)) in a.iter().zip(&b) {
            assert_eq!(na, nb);
            assert_eq!(fa.values(), fb.values());
        }
        let c = random_fourier(&g, 8).unwrap();
        assert_ne!(a[4].1.values(), c.values());
    }

    #[test]
    fn sawtooth_mean_is_zero() {
        let g = Grid::new(1, 2.0, 1024).unwrap();
        let f = sawtooth(&g).unwrap();
        assert!(f.integral().abs() / g.total_measure() <= g.spacing());
    }

    #[test]
    fn log_profile_finite_and_peaked_near_origin_cell() {
        let g = Grid::new(1, 2.0, 4096).unwrap();
        let f = log_profile(&g).unwrap();
        assert!(f.values().iter().all(|v| v.is_finite()));
        // the most negative value sits at index 0 or 1, flanking the
        // half-cell singularity
        let (imin, _) = f
            .values()
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |(ai, av), (i, &v)| {
                if v < av {
                    (i, v)
                } else {
                    (ai, av)
                }
            });
        assert!(imin <= 1, "minimum at {imin}");
        // regression: peak magnitude on N = 4096 is ln(2 sin(pi h / 4L))
        let expected = (2.0 * (std::f64::consts::PI * 0.25 * g.spacing() / 2.0).sin()).ln();
        assert!((f.values()[imin] - expected).abs() < 1e-9);
        // and the maximum sits at ln 2, reached where the sine peaks
        let max = f.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!((max - 2.0f64.ln()).abs() < 1e-6, "max {max}");
    }

    #[test]
    fn all_members_finite_2d() {
        let g = Grid::new(2, 2.0, 32).unwrap();
        for (name, f) in generate_corpus(&g, 3).unwrap() {
            assert!(
                f.values().iter().all(|v| v.is_finite()),
                "{name} has non-finite values"
            );
        }
    }
}
