//! Modular integrals and Luxembourg norms on the grid.
//!
//! The modular of `f` at scale `lambda` is the discrete integral
//! `sum_x phi(x, |f(x)|/lambda) h^n`. The Luxembourg norm is the `lambda`
//! at which the modular equals 1; since `phi(x, .)` is only assumed
//! monotone, the solver is a bisection on a geometrically grown bracket.
//! `f == 0` maps to norm 0 by convention.

use std::collections::HashMap;
use std::sync::Arc;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::grid::{Ball, Grid, GridFunction};
use crate::growth::{GrowthFamily, GrowthFunction};

/// Outcome of a Luxembourg norm solve.
#[derive(Debug, Clone, Copy)]
pub struct NormResult {
    /// The norm value `lambda*`.
    pub value: f64,
    /// Modular evaluated at `lambda*` (close to 1 for nonzero input).
    pub modular_at_value: f64,
    pub iterations: u32,
    pub bracket: (f64, f64),
}

/// Discrete modular `int phi(x, |f(x)|/lambda) dmu`.
pub fn modular(phi: &GrowthFunction, f: &GridFunction, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "modular needs lambda > 0, got {lambda}"
        )));
    }
    let grid = f.grid();
    let inv = 1.0 / lambda;
    let sum: f64 = f
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| phi.eval(grid, i, v.abs() * inv))
        .sum();
    Ok(sum * grid.cell_measure())
}

/// Modular restricted to an index subset (used for indicator norms).
fn modular_on_indices(
    phi: &GrowthFunction,
    grid: &Grid,
    indices: &[usize],
    value: f64,
    lambda: f64,
) -> f64 {
    let t = value / lambda;
    indices.iter().map(|&i| phi.eval(grid, i, t)).sum::<f64>() * grid.cell_measure()
}

const MAX_BRACKET_STEPS: u32 = 60;

/// Bisection solve of `modular(lambda) = 1` for a nonincreasing modular
/// given by the closure. Returns the norm plus solve diagnostics.
fn solve_unit_modular(
    mut modular_at: impl FnMut(f64) -> f64,
    tol: f64,
) -> Result<NormResult> {
    let mut lo = 1.0_f64; // invariant target: modular(lo) >= 1
    let mut hi = 1.0_f64; // invariant target: modular(hi) <= 1
    let mut iterations = 0;

    let m1 = modular_at(1.0);
    if m1 > 1.0 {
        // grow hi until the modular drops below 1
        let mut steps = 0;
        loop {
            hi *= 2.0;
            iterations += 1;
            steps += 1;
            if modular_at(hi) <= 1.0 {
                break;
            }
            if steps > MAX_BRACKET_STEPS {
                return Err(Error::BracketFailure { lo, hi });
            }
        }
        lo = hi / 2.0;
    } else {
        // shrink lo until the modular rises above 1
        let mut steps = 0;
        loop {
            lo *= 0.5;
            iterations += 1;
            steps += 1;
            if modular_at(lo) >= 1.0 {
                break;
            }
            if steps > MAX_BRACKET_STEPS {
                return Err(Error::BracketFailure { lo, hi });
            }
        }
        hi = lo * 2.0;
    }

    let bracket = (lo, hi);
    let mut mid = 0.5 * (lo + hi);
    let mut m_mid = modular_at(mid);
    // iterate until the modular is within tol of 1 AND the bracket pins
    // lambda itself to half of tol, so two solves stay within 2 tol
    for _ in 0..200 {
        iterations += 1;
        if (m_mid - 1.0).abs() <= tol && hi - lo <= 0.5 * tol * mid {
            break;
        }
        if m_mid > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        mid = 0.5 * (lo + hi);
        m_mid = modular_at(mid);
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    if (m_mid - 1.0).abs() > tol {
        return Err(Error::numerical(
            "luxembourg_norm",
            format!("bisection stalled at modular {m_mid} (tol {tol})"),
        ));
    }
    Ok(NormResult {
        value: mid,
        modular_at_value: m_mid,
        iterations,
        bracket,
    })
}

/// Luxembourg norm of `f`: the `lambda` with unit modular. For `f == 0`
/// returns 0 by convention (the constraint set has no failure point).
pub fn luxembourg_norm(phi: &GrowthFunction, f: &GridFunction, tol: f64) -> Result<NormResult> {
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(Error::InvalidParameter(format!(
            "tol must lie in (0, 1e-3], got {tol}"
        )));
    }
    if f.values().iter().all(|&v| v == 0.0) {
        return Ok(NormResult {
            value: 0.0,
            modular_at_value: 0.0,
            iterations: 0,
            bracket: (0.0, 0.0),
        });
    }
    solve_unit_modular(|lambda| modular(phi, f, lambda).unwrap_or(f64::NAN), tol)
}

/// Concurrent-read cache of indicator norms keyed by growth function
/// identity and ball geometry.
#[derive(Debug, Default)]
pub struct NormCache {
    map: Mutex<HashMap<(u64, usize, u64), f64>>,
}

impl NormCache {
    pub fn new() -> Self {
        NormCache::default()
    }

    fn get(&self, key: (u64, usize, u64)) -> Option<f64> {
        self.map.lock().unwrap().get(&key).copied()
    }

    fn insert(&self, key: (u64, usize, u64), value: f64) {
        self.map.lock().unwrap().insert(key, value);
    }

    pub fn len(&self) -> usize {
        self.map.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

const INDICATOR_TOL: f64 = 1e-6;

/// `||chi_B||` for a ball: closed form for the power and weighted power
/// families, bisection otherwise; results cached per (phi, ball).
pub fn indicator_norm(
    phi: &GrowthFunction,
    grid: &Arc<Grid>,
    ball: &Ball,
    cache: &NormCache,
) -> Result<f64> {
    let key = (phi.id_hash(), ball.center_index, ball.radius.to_bits());
    if let Some(v) = cache.get(key) {
        return Ok(v);
    }
    let value = match phi.family() {
        GrowthFamily::Power { p } => {
            let measure = grid.ball_point_count(ball.radius) as f64 * grid.cell_measure();
            measure.powf(1.0 / p)
        }
        GrowthFamily::WeightedPower { weight, p } => {
            let pts = grid.ball_points(ball);
            let wmass: f64 =
                pts.iter().map(|&i| weight.values()[i]).sum::<f64>() * grid.cell_measure();
            wmass.powf(1.0 / p)
        }
        _ => {
            let pts = grid.ball_points(ball);
            if pts.is_empty() {
                return Err(Error::InvalidBall("empty discrete ball".into()));
            }
            solve_unit_modular(
                |lambda| modular_on_indices(phi, grid, &pts, 1.0, lambda),
                INDICATOR_TOL,
            )?
            .value
        }
    };
    cache.insert(key, value);
    Ok(value)
}
