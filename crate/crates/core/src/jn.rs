//! Level-set distribution curves of the kernel oscillation and their
//! exponential / polynomial decay fits, realizing the John-Nirenberg-type
//! inequalities as measurable decay statements.
//!
//! The exponent of the exponential bound is normalized by
//! `mu(B) / (||chi_B|| ||f||_A)`; fitted constants are reported per ball
//! and aggregated by median downstream, with no claim of a universal
//! constant.

use crate::error::{Error, Result};
use crate::grid::{ball_measure, Ball, GridFunction};
use crate::growth::GrowthFunction;
use crate::luxembourg::{indicator_norm, NormCache};
use crate::semigroup::KernelOp;

/// Level-set measures of `|f - A_{t_B} f|` (plain or weighted) on a ball.
#[derive(Debug, Clone)]
pub struct DistributionCurve {
    pub ball: Ball,
    pub lambdas: Vec<f64>,
    pub measures: Vec<f64>,
    /// Exponent normalization `mu(B) / (||chi_B|| ||f||)`.
    pub normalization: f64,
    /// Total mass of the ball in the measure used (`mu(B)` plain,
    /// `phi(B, t0)` weighted).
    pub total_mass: f64,
    /// Mass of four grid cells in the measure used; the quantization
    /// floor below which level sets are fit-unusable.
    pub cell_floor: f64,
    pub weighted: bool,
}

fn check_lambda_grid(lambda_grid: &[f64]) -> Result<()> {
    if lambda_grid.is_empty() {
        return Err(Error::InvalidParameter("empty lambda grid".into()));
    }
    if lambda_grid.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::InvalidParameter("lambda grid must be positive".into()));
    }
    if lambda_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("lambda grid must increase".into()));
    }
    Ok(())
}

/// Plain level-set curve: `mu({x in B : |f - A_{t_B} f| > lambda})`.
pub fn jn_distribution(
    f: &GridFunction,
    phi: &GrowthFunction,
    op: &KernelOp,
    ball: &Ball,
    lambda_grid: &[f64],
    kernel_seminorm: f64,
    cache: &NormCache,
) -> Result<DistributionCurve> {
    check_lambda_grid(lambda_grid)?;
    if !(kernel_seminorm > 0.0) {
        return Err(Error::InvalidParameter(
            "distribution curve needs a strictly positive seminorm".into(),
        ));
    }
    let grid = f.grid();
    let t = op.time_for_radius(ball.radius);
    let smoothed = op.apply(f, t)?;
    let pts = grid.ball_points(ball);
    let hn = grid.cell_measure();
    let osc: Vec<f64> = pts
        .iter()
        .map(|&i| (f.values()[i] - smoothed.values()[i]).abs())
        .collect();
    let measures: Vec<f64> = lambda_grid
        .iter()
        .map(|&lam| osc.iter().filter(|&&v| v > lam).count() as f64 * hn)
        .collect();
    let mu = ball_measure(grid, ball)?;
    let norm = indicator_norm(phi, grid, ball, cache)?;
    Ok(DistributionCurve {
        ball: ball.clone(),
        lambdas: lambda_grid.to_vec(),
        measures,
        normalization: mu / (norm * kernel_seminorm),
        total_mass: mu,
        cell_floor: 4.0 * hn,
        weighted: false,
    })
}

/// Weighted level-set curve at the time slot `t0 = ||chi_B||^{-1}`:
/// `phi({x in B : |f - A_{t_B} f| / phi(x, t0) > lambda}, t0)`.
pub fn jn_weighted_distribution(
    f: &GridFunction,
    phi: &GrowthFunction,
    op: &KernelOp,
    ball: &Ball,
    lambda_grid: &[f64],
    kernel_seminorm: f64,
    cache: &NormCache,
) -> Result<DistributionCurve> {
    check_lambda_grid(lambda_grid)?;
    if !(kernel_seminorm > 0.0) {
        return Err(Error::InvalidParameter(
            "distribution curve needs a strictly positive seminorm".into(),
        ));
    }
    let grid = f.grid();
    let t = op.time_for_radius(ball.radius);
    let smoothed = op.apply(f, t)?;
    let pts = grid.ball_points(ball);
    let hn = grid.cell_measure();
    let norm = indicator_norm(phi, grid, ball, cache)?;
    let t0 = 1.0 / norm;
    let mut quotient = Vec::with_capacity(pts.len());
    let mut weights = Vec::with_capacity(pts.len());
    for &i in &pts {
        let w = phi.eval(grid, i, t0);
        if !(w > 0.0) {
            return Err(Error::numerical(
                "jn_weighted_distribution",
                format!("phi(x, {t0:e}) vanishes at grid point {i}"),
            ));
        }
        quotient.push((f.values()[i] - smoothed.values()[i]).abs() / w);
        weights.push(w);
    }
    let measures: Vec<f64> = lambda_grid
        .iter()
        .map(|&lam| {
            quotient
                .iter()
                .zip(&weights)
                .filter(|(&q, _)| q > lam)
                .map(|(_, &w)| w)
                .sum::<f64>()
                * hn
        })
        .collect();
    let phi_mass: f64 = weights.iter().sum::<f64>() * hn;
    Ok(DistributionCurve {
        ball: ball.clone(),
        lambdas: lambda_grid.to_vec(),
        measures,
        normalization: 1.0 / (norm * kernel_seminorm),
        total_mass: phi_mass,
        cell_floor: 4.0 * phi_mass / pts.len() as f64,
        weighted: true,
    })
}

/// Fitted exponential decay `c1 * total_mass * exp(-c2 * normalization * lambda)`.
#[derive(Debug, Clone, Copy)]
pub struct DecayFit {
    pub c1: f64,
    pub c2: f64,
    pub r_squared: f64,
    /// `(lambda_min, lambda_max)` of the fit range.
    pub lambda_range: (f64, f64),
    pub points_used: usize,
}

/// Usable fit points: flat head (`> 0.9 total`) and quantization tail
/// (`< cell_floor`) excluded, plateaus deduplicated to their first point.
pub fn usable_points(curve: &DistributionCurve) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut last_measure = f64::NAN;
    for (&lam, &mu) in curve.lambdas.iter().zip(&curve.measures) {
        if mu < curve.cell_floor || mu > 0.9 * curve.total_mass {
            continue;
        }
        if mu == last_measure {
            continue;
        }
        last_measure = mu;
        out.push((lam, mu));
    }
    out
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    (slope, intercept, r2)
}

/// Least squares of `ln mu_lambda` against `lambda` on the usable range.
pub fn fit_exponential(curve: &DistributionCurve) -> Result<DecayFit> {
    let pts = usable_points(curve);
    if pts.len() < 5 {
        return Err(Error::numerical(
            "fit_exponential",
            format!("only {} usable points after deduplication", pts.len()),
        ));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let (slope, intercept, r2) = linear_fit(&xs, &ys);
    if slope >= 0.0 {
        return Err(Error::numerical(
            "fit_exponential",
            format!("non-decaying curve (slope {slope})"),
        ));
    }
    Ok(DecayFit {
        c1: intercept.exp() / curve.total_mass,
        c2: -slope / curve.normalization,
        r_squared: r2,
        lambda_range: (xs[0], *xs.last().unwrap()),
        points_used: pts.len(),
    })
}

/// Fitted polynomial tail `prefactor * (normalization * lambda)^{slope}`.
#[derive(Debug, Clone, Copy)]
pub struct PolyTailFit {
    pub prefactor: f64,
    pub slope: f64,
    pub r_squared: f64,
    /// True when the decay is steeper than the polynomial target by a
    /// whole power, as exponential curves are.
    pub exponential_dominated: bool,
    pub points_used: usize,
}

/// Log-log fit of the tail half of the usable range; the slope is
/// compared against `-p1_prime`.
pub fn fit_polynomial_tail(curve: &DistributionCurve, p1_prime: f64) -> Result<PolyTailFit> {
    if !(p1_prime > 0.0) {
        return Err(Error::InvalidParameter("p1' must be positive".into()));
    }
    let pts = usable_points(curve);
    if pts.len() < 5 {
        return Err(Error::numerical(
            "fit_polynomial_tail",
            format!("only {} usable points after deduplication", pts.len()),
        ));
    }
    // tail half in lambda index
    let tail = &pts[pts.len() / 2..];
    if tail.len() < 3 {
        return Err(Error::numerical("fit_polynomial_tail", "tail too short"));
    }
    let xs: Vec<f64> = tail.iter().map(|p| (p.0 * curve.normalization).ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|p| p.1.ln()).collect();
    let (slope, intercept, r2) = linear_fit(&xs, &ys);
    Ok(PolyTailFit {
        prefactor: intercept.exp(),
        slope,
        r_squared: r2,
        exponential_dominated: slope <= -(p1_prime + 1.0),
        points_used: tail.len(),
    })
}

/// Average of `exp(lambda_coef * normalization * |f - A_{t_B} f|)` over
/// the ball. Errors out when the exponent overflows the double range
/// ("not admissible at this lambda").
pub fn exp_integrability(
    f: &GridFunction,
    phi: &GrowthFunction,
    op: &KernelOp,
    ball: &Ball,
    lambda_coef: f64,
    kernel_seminorm: f64,
    cache: &NormCache,
) -> Result<f64> {
    if !(lambda_coef > 0.0) {
        return Err(Error::InvalidParameter("lambda_coef must be positive".into()));
    }
    if !(kernel_seminorm > 0.0) {
        return Err(Error::InvalidParameter(
            "exp integrability needs a strictly positive seminorm".into(),
        ));
    }
    let grid = f.grid();
    let t = op.time_for_radius(ball.radius);
    let smoothed = op.apply(f, t)?;
    let pts = grid.ball_points(ball);
    let mu = ball_measure(grid, ball)?;
    let norm = indicator_norm(phi, grid, ball, cache)?;
    let scale = lambda_coef * mu / (norm * kernel_seminorm);
    let mut sum = 0.0;
    for &i in &pts {
        let e = scale * (f.values()[i] - smoothed.values()[i]).abs();
        if e > 700.0 {
            return Err(Error::numerical(
                "exp_integrability",
                format!("exponent {e:.1} overflows; not admissible at lambda_coef {lambda_coef}"),
            ));
        }
        sum += e.exp();
    }
    Ok(sum * grid.cell_measure() / mu)
}
