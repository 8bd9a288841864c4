//! BMO-type seminorm estimators over finite ball menus, plus the
//! structural comparisons (drift bounds, canonical-family conditions,
//! admissibility integral) that make the space equivalences testable.
//!
//! Menu suprema are lower bounds of the true suprema; every reported
//! value is a "menu-restricted" estimate and every separation witness is
//! an explicit menu element.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{ball_measure, mean_on_ball, Ball, BallMenu, Grid, GridFunction};
use crate::growth::GrowthFunction;
use crate::luxembourg::{indicator_norm, NormCache};
use crate::semigroup::KernelOp;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeminormKind {
    Classical,
    Kernel,
    KernelMax,
    KernelP,
    TildeP,
}

impl SeminormKind {
    pub fn name(&self) -> &'static str {
        match self {
            SeminormKind::Classical => "classical",
            SeminormKind::Kernel => "kernel",
            SeminormKind::KernelMax => "kernel_max",
            SeminormKind::KernelP => "kernel_p",
            SeminormKind::TildeP => "tilde_p",
        }
    }
}

/// A seminorm estimate with per-element contributions and the arg-max
/// element, so equivalence ratios are auditable.
#[derive(Debug, Clone)]
pub struct SeminormReport {
    pub kind: SeminormKind,
    pub value: f64,
    /// One entry per menu ball (ball-based kinds) or per `(x, t)` sample
    /// (the max variant).
    pub contributions: Vec<f64>,
    pub argmax: usize,
    /// `(x index, t)` labels for the max variant; empty otherwise.
    pub samples: Vec<(usize, f64)>,
    pub growth_id: u64,
    pub kernel: Option<&'static str>,
    pub p_tilde: Option<f64>,
}

impl SeminormReport {
    fn from_contributions(
        kind: SeminormKind,
        contributions: Vec<f64>,
        samples: Vec<(usize, f64)>,
        growth_id: u64,
        kernel: Option<&'static str>,
        p_tilde: Option<f64>,
    ) -> SeminormReport {
        let (argmax, value) = contributions
            .iter()
            .enumerate()
            .fold((0usize, f64::NEG_INFINITY), |(ai, av), (i, &v)| {
                if v > av {
                    (i, v)
                } else {
                    (ai, av)
                }
            });
        SeminormReport {
            kind,
            value,
            contributions,
            argmax,
            samples,
            growth_id,
            kernel,
            p_tilde,
        }
    }
}

/// Exponent slot `n p1/p - alpha` with `alpha = n`, filled from the
/// declared Muckenhoupt exponent `p1` and lower type `p`.
pub fn exponent_slot(phi: &GrowthFunction, dim: usize) -> f64 {
    dim as f64 * (phi.ap_exponent() / phi.lower_type() - 1.0)
}

/// Classical Musielak-Orlicz BMO seminorm over the menu:
/// `sup_B (1 / ||chi_B||) int_B |f - f_B|`.
pub fn bmo_phi(
    f: &GridFunction,
    phi: &GrowthFunction,
    menu: &BallMenu,
    cache: &NormCache,
) -> Result<SeminormReport> {
    if menu.is_empty() {
        return Err(Error::InvalidParameter("empty menu".into()));
    }
    let grid = f.grid();
    let hn = grid.cell_measure();
    let contributions: Vec<f64> = menu
        .balls()
        .par_iter()
        .map(|ball| {
            let mean = mean_on_ball(f, ball)?;
            let pts = grid.ball_points(ball);
            let osc: f64 = pts.iter().map(|&i| (f.values()[i] - mean).abs()).sum();
            let norm = indicator_norm(phi, grid, ball, cache)?;
            Ok(osc * hn / norm)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SeminormReport::from_contributions(
        SeminormKind::Classical,
        contributions,
        Vec::new(),
        phi.id_hash(),
        None,
        None,
    ))
}

/// Shared evaluator for the kernel seminorms: applies `A_{t_B}` once per
/// distinct menu radius and hands `|f - A_{t_B} f|` on each ball to the
/// per-ball reducer.
fn over_menu_with_kernel<T: Send>(
    f: &GridFunction,
    op: &KernelOp,
    menu: &BallMenu,
    per_ball: impl Fn(&Ball, &GridFunction) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    let mut radius_diffs: Vec<(f64, GridFunction)> = Vec::new();
    for &r in menu.radii() {
        let t = op.time_for_radius(r);
        let smoothed = op.apply(f, t)?;
        let diff = f.zip(&smoothed, |a, b| a - b)?;
        radius_diffs.push((r, diff));
    }
    let diff_for = |r: f64| -> &GridFunction {
        radius_diffs
            .iter()
            .find(|(rr, _)| *rr == r)
            .map(|(_, d)| d)
            .expect("menu radius present")
    };
    menu.balls()
        .par_iter()
        .map(|ball| per_ball(ball, diff_for(ball.radius)))
        .collect()
}

/// Kernel seminorm `sup_B (1 / ||chi_B||) int_B |f - A_{t_B} f|` with
/// `t_B = r_B^m`; identical to [`bmo_phi_a_p`] at `p = 1` by construction.
pub fn bmo_phi_a(
    f: &GridFunction,
    phi: &GrowthFunction,
    op: &KernelOp,
    menu: &BallMenu,
    cache: &NormCache,
) -> Result<SeminormReport> {
    let mut report = bmo_phi_a_p(f, phi, op, menu, 1.0, cache)?;
    report.kind = SeminormKind::Kernel;
    report.p_tilde = None;
    Ok(report)
}

/// `p`-mean kernel seminorm:
/// `sup_B (mu(B)/||chi_B||) [mean_B |f - A_{t_B} f|^p]^{1/p}`.
pub fn bmo_phi_a_p(
    f: &GridFunction,
    phi: &GrowthFunction,
    op: &KernelOp,
    menu: &BallMenu,
    p_tilde: f64,
    cache: &NormCache,
) -> Result<SeminormReport> {
    if !(p_tilde >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "p_tilde must be >= 1, got {p_tilde}"
        )));
    }
    if menu.is_empty() {
        return Err(Error::InvalidParameter("empty menu".into()));
    }
    let grid = f.grid();
    let hn = grid.cell_measure();
    let contributions = over_menu_with_kernel(f, op, menu, |ball, diff| {
        let pts = grid.ball_points(ball);
        let norm = indicator_norm(phi, grid, ball, cache)?;
        if p_tilde == 1.0 {
            let s: f64 = pts.iter().map(|&i| diff.values()[i].abs()).sum();
            Ok(s * hn / norm)
        } else {
            let s: f64 = pts
                .iter()
                .map(|&i| diff.values()[i].abs().powf(p_tilde))
                .sum();
            let mu = pts.len() as f64 * hn;
            Ok(mu / norm * (s * hn / mu).powf(1.0 / p_tilde))
        }
    })?;
    Ok(SeminormReport::from_contributions(
        SeminormKind::KernelP,
        contributions,
        Vec::new(),
        phi.id_hash(),
        Some(op.kind_name()),
        Some(p_tilde),
    ))
}

/// Max-variant seminorm over sampled `(x, t)`:
/// `sup (mu(B(x,t^{1/m})) / ||chi_{B(x,t^{1/m})}||) A_t(|f - A_t f|)(x)`.
/// Requires a nonnegative kernel.
pub fn bmo_phi_a_max(
    f: &GridFunction,
    phi: &GrowthFunction,
    op: &KernelOp,
    t_samples: &[f64],
    x_stride: usize,
    cache: &NormCache,
) -> Result<SeminormReport> {
    if t_samples.is_empty() || x_stride == 0 {
        return Err(Error::InvalidParameter("empty samples or zero stride".into()));
    }
    let grid = f.grid();
    let xs: Vec<usize> = sublattice(grid, x_stride);
    let mut contributions = Vec::with_capacity(t_samples.len() * xs.len());
    let mut samples = Vec::with_capacity(contributions.capacity());
    for &t in t_samples {
        let scale = op.scale(t);
        let smoothed = op.apply(f, t)?;
        let inner = f.zip(&smoothed, |a, b| (a - b).abs())?;
        let outer = op.apply(&inner, t)?;
        let mu = grid.raw_ball_measure(scale);
        for &xi in &xs {
            let ball = Ball::new(grid, xi, scale)?;
            let norm = indicator_norm(phi, grid, &ball, cache)?;
            contributions.push(mu / norm * outer.values()[xi].abs());
            samples.push((xi, t));
        }
    }
    Ok(SeminormReport::from_contributions(
        SeminormKind::KernelMax,
        contributions,
        samples,
        phi.id_hash(),
        Some(op.kind_name()),
        None,
    ))
}

/// Weighted `p`-variant with the time slot `t0 = ||chi_B||^{-1}`:
/// `sup_B (1/||chi_B||) { int_B |(f - A_{t_B}f) / phi(., t0)|^p phi(., t0) }^{1/p}`.
pub fn bmo_tilde_p(
    f: &GridFunction,
    phi: &GrowthFunction,
    op: &KernelOp,
    menu: &BallMenu,
    p_tilde: f64,
    cache: &NormCache,
) -> Result<SeminormReport> {
    if !(p_tilde >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "p_tilde must be >= 1, got {p_tilde}"
        )));
    }
    if menu.is_empty() {
        return Err(Error::InvalidParameter("empty menu".into()));
    }
    let grid = f.grid();
    let hn = grid.cell_measure();
    let contributions = over_menu_with_kernel(f, op, menu, |ball, diff| {
        let pts = grid.ball_points(ball);
        let norm = indicator_norm(phi, grid, ball, cache)?;
        let t0 = 1.0 / norm;
        let mut s = 0.0;
        for &i in &pts {
            let w = phi.eval(grid, i, t0);
            if !(w > 0.0) {
                return Err(Error::numerical(
                    "bmo_tilde_p",
                    format!("phi(x, {t0:e}) vanishes at grid point {i}"),
                ));
            }
            s += (diff.values()[i].abs() / w).powf(p_tilde) * w;
        }
        Ok((s * hn).powf(1.0 / p_tilde) / norm)
    })?;
    Ok(SeminormReport::from_contributions(
        SeminormKind::TildeP,
        contributions,
        Vec::new(),
        phi.id_hash(),
        Some(op.kind_name()),
        Some(p_tilde),
    ))
}

fn sublattice(grid: &Grid, stride: usize) -> Vec<usize> {
    let n = grid.points_per_side();
    let line: Vec<usize> = (0..n).step_by(stride.max(1)).collect();
    match grid.dim() {
        1 => line,
        _ => {
            let mut out = Vec::with_capacity(line.len() * line.len());
            for &i in &line {
                for &j in &line {
                    out.push(i * n + j);
                }
            }
            out
        }
    }
}

/// Constants of the canonical-family conditions, with `f^B := A_{t_B} f`.
#[derive(Debug, Clone)]
pub struct WBReport {
    /// Oscillation condition constant; equals the kernel seminorm by
    /// construction.
    pub c1: f64,
    /// Nested-pair drift constant against
    /// `(||chi_{B(x,r1)}|| / mu) (r2/r1)^{n p1/p - alpha}`.
    pub c2: f64,
    /// Self-consistency constant `|f^B - A_{t_B} f^B| mu / ||chi||`.
    pub c3: f64,
    pub c1_argmax_ball: usize,
    pub c2_argmax_pair: usize,
    pub c3_argmax_ball: usize,
}

/// Evaluate the three canonical-family conditions over the menu, nested
/// pairs from the menu, and an `x` sublattice of the given stride.
pub fn verify_wb_conditions(
    f: &GridFunction,
    phi: &GrowthFunction,
    op: &KernelOp,
    menu: &BallMenu,
    x_stride: usize,
    cache: &NormCache,
) -> Result<WBReport> {
    let grid = f.grid();
    let kernel_report = bmo_phi_a(f, phi, op, menu, cache)?;
    let xs = sublattice(grid, x_stride);
    let slot = exponent_slot(phi, grid.dim());

    // smoothed copies per distinct radius
    let mut by_radius: Vec<(f64, GridFunction)> = Vec::new();
    for &r in menu.radii() {
        let t = op.time_for_radius(r);
        by_radius.push((r, op.apply(f, t)?));
    }
    let smoothed_for = |r: f64| -> &GridFunction {
        &by_radius.iter().find(|(rr, _)| *rr == r).expect("radius present").1
    };

    // prefactor ||chi_{B(x,r)}|| / mu(B(x,r)) per sample point
    let prefactor = |xi: usize, r: f64| -> Result<f64> {
        let ball = Ball::new(grid, xi, r)?;
        let norm = indicator_norm(phi, grid, &ball, cache)?;
        Ok(norm / ball_measure(grid, &ball)?)
    };

    let pairs = menu.nested_pairs();
    let mut c2 = 0.0;
    let mut c2_argmax = 0;
    for (pi, (inner, outer)) in pairs.iter().enumerate() {
        let u1 = smoothed_for(inner.radius);
        let u2 = smoothed_for(outer.radius);
        let growth = (outer.radius / inner.radius).powf(slot);
        for &xi in &xs {
            let bound = prefactor(xi, inner.radius)? * growth;
            let ratio = (u2.values()[xi] - u1.values()[xi]).abs() / bound;
            if ratio > c2 {
                c2 = ratio;
                c2_argmax = pi;
            }
        }
    }

    let mut c3 = 0.0;
    let mut c3_argmax = 0;
    for (bi, ball) in menu.balls().iter().enumerate() {
        let t = op.time_for_radius(ball.radius);
        let fb = smoothed_for(ball.radius);
        let fbb = op.apply(fb, t)?;
        for &xi in &xs {
            let bound = prefactor(xi, ball.radius)?;
            let ratio = (fb.values()[xi] - fbb.values()[xi]).abs() / bound;
            if ratio > c3 {
                c3 = ratio;
                c3_argmax = bi;
            }
        }
    }

    Ok(WBReport {
        c1: kernel_report.value,
        c2,
        c3,
        c1_argmax_ball: kernel_report.argmax,
        c2_argmax_pair: c2_argmax,
        c3_argmax_ball: c3_argmax,
    })
}

/// Kernel drift ratios: for each `K` in the ladder, the maximum over the
/// `x` sublattice of
/// `|A_t f - A_{Kt} f| / [K^{(n p1/p - alpha)/m} (||chi_{B(x,t^{1/m})}||/mu) ||f||_A]`.
pub fn drift_bound_check(
    f: &GridFunction,
    phi: &GrowthFunction,
    op: &KernelOp,
    x_stride: usize,
    t: f64,
    k_ladder: &[f64],
    kernel_seminorm: f64,
    cache: &NormCache,
) -> Result<Vec<(f64, f64)>> {
    if !(kernel_seminorm > 0.0) {
        return Err(Error::InvalidParameter(
            "drift check needs a strictly positive kernel seminorm".into(),
        ));
    }
    if k_ladder.iter().any(|&k| !(k > 1.0)) {
        return Err(Error::InvalidParameter("K ladder must lie in (1, inf)".into()));
    }
    let grid = f.grid();
    let xs = sublattice(grid, x_stride);
    let scale = op.scale(t);
    let slot = exponent_slot(phi, grid.dim());
    let m = op.scaling_exponent();
    let base = op.apply(f, t)?;
    let mut out = Vec::new();
    for &k in k_ladder {
        let far = op.apply(f, k * t)?;
        let growth = k.powf(slot / m);
        let mut worst: f64 = 0.0;
        for &xi in &xs {
            let ball = Ball::new(grid, xi, scale)?;
            let norm = indicator_norm(phi, grid, &ball, cache)?;
            let mu = ball_measure(grid, &ball)?;
            let denom = growth * (norm / mu) * kernel_seminorm;
            let ratio = (base.values()[xi] - far.values()[xi]).abs() / denom;
            worst = worst.max(ratio);
        }
        out.push((k, worst));
    }
    Ok(out)
}

/// Classical mean-drift ratios: `|f_B - f_{KB}|` against
/// `K^{n p1/p - alpha} (||chi_B|| / mu(B)) ||f||_{classical}` for
/// concentric dilations that stay within the radius cap.
pub fn mean_drift_check(
    f: &GridFunction,
    phi: &GrowthFunction,
    base_balls: &[Ball],
    k_ladder: &[f64],
    classical_seminorm: f64,
    cache: &NormCache,
) -> Result<Vec<(f64, f64)>> {
    if !(classical_seminorm > 0.0) {
        return Err(Error::InvalidParameter(
            "mean drift check needs a strictly positive seminorm".into(),
        ));
    }
    let grid = f.grid();
    let slot = exponent_slot(phi, grid.dim());
    let cap = crate::grid::MAX_RADIUS_FRACTION * grid.side_length();
    let mut out = Vec::new();
    for &k in k_ladder {
        let mut worst: f64 = 0.0;
        let mut any = false;
        for ball in base_balls {
            let big_r = k * ball.radius;
            if big_r > cap {
                continue;
            }
            any = true;
            let big = Ball::new(grid, ball.center_index, big_r)?;
            let drift = (mean_on_ball(f, ball)? - mean_on_ball(f, &big)?).abs();
            let norm = indicator_norm(phi, grid, ball, cache)?;
            let mu = ball_measure(grid, ball)?;
            let bound = k.powf(slot) * (norm / mu) * classical_seminorm;
            worst = worst.max(drift / bound);
        }
        if any {
            out.push((k, worst));
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidParameter(
            "no (ball, K) pair stays within the radius cap".into(),
        ));
    }
    Ok(out)
}

/// Discrete value of the growth-condition integral
/// `int |f(x)| / [(1 + d(x0,x))^{e} mu(B(x0, 1 + d(x0,x)))] dmu` with
/// `e = n (p1/p - 1) + beta` from the declared exponents. Finite for
/// every grid function on the compact torus; kept for fidelity with the
/// admissibility class.
pub fn admissibility_check(
    f: &GridFunction,
    phi: &GrowthFunction,
    x0_index: usize,
    beta: f64,
) -> Result<f64> {
    if beta < 0.0 {
        return Err(Error::InvalidParameter("beta must be >= 0".into()));
    }
    let grid = f.grid();
    if x0_index >= grid.len() {
        return Err(Error::InvalidParameter("x0 outside grid".into()));
    }
    let e = exponent_slot(phi, grid.dim()) + beta;
    let x0 = grid.coords(x0_index);
    let hn = grid.cell_measure();
    let sum: f64 = f
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let d = grid.periodic_dist2(grid.coords(i), x0).sqrt();
            let mu = grid.raw_ball_measure(1.0 + d);
            v.abs() / ((1.0 + d).powf(e) * mu)
        })
        .sum();
    Ok(sum * hn)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::standard_radii;
    use std::sync::Arc;
    use crate::semigroup::Backend;

    fn grid1d(n: usize) -> Arc<Grid> {
        Grid::new(1, 2.0, n).unwrap()
    }

    fn log_profile(grid: &Arc<Grid>) -> GridFunction {
        crate::corpus::log_profile(grid).unwrap()
    }

    #[test]
    fn constants_have_zero_seminorm() {
        let g = grid1d(512);
        let f = GridFunction::constant(g.clone(), 1.0).unwrap();
        let phi = GrowthFunction::power(1.0).unwrap();
        let menu = BallMenu::new(&g, 64, &standard_radii(&g)).unwrap();
        let cache = NormCache::new();
        let classical = bmo_phi(&f, &phi, &menu, &cache).unwrap();
        assert_eq!(classical.value, 0.0);
        let op = KernelOp::poisson();
        let kernel = bmo_phi_a(&f, &phi, &op, &menu, &cache).unwrap();
        assert!(kernel.value <= 1e-12, "{}", kernel.value);
        let maxv = bmo_phi_a_max(&f, &phi, &op, &[0.05, 0.1], 64, &cache).unwrap();
        assert!(maxv.value <= 1e-12);
    }

    #[test]
    fn classical_seminorm_of_indicator_jump() {
        // f = indicator of the right half torus; balls straddling the jump
        // carry oscillation ~ 1/2 under phi(x,t) = t
        let g = grid1d(1024);
        let f = GridFunction::from_fn(g.clone(), |x| if x[0] >= 0.0 { 1.0 } else { 0.0 }).unwrap();
        let phi = GrowthFunction::power(1.0).unwrap();
        let menu = BallMenu::new(&g, 32, &standard_radii(&g)).unwrap();
        let cache = NormCache::new();
        let rep = bmo_phi(&f, &phi, &menu, &cache).unwrap();
        // oracle: ball centered on the jump sees mean 1/2 and
        // oscillation integral mu(B)/2, so the contribution is 1/2
        assert!((rep.value - 0.5).abs() < 0.02, "value {}", rep.value);
    }

    #[test]
    fn sawtooth_box_counterexample() {
        let g = grid1d(1024);
        let saw = GridFunction::from_fn(g.clone(), |x| x[0]).unwrap();
        let phi = GrowthFunction::power(1.0).unwrap();
        let cache = NormCache::new();
        let op = KernelOp::box_kernel(1.0).unwrap();

        // menu away from the seam: centers in the middle half, radii small
        // enough that ball + kernel window stay clear of the wrap
        let mut balls = Vec::new();
        let n = g.points_per_side();
        for c in (3 * n / 8..5 * n / 8).step_by(n / 32) {
            for r in [0.03125, 0.0625] {
                balls.push(Ball::new(&g, c, r).unwrap());
            }
        }
        let menu_mid = BallMenu::from_balls(balls).unwrap();
        let rep = bmo_phi_a(&saw, &phi, &op, &menu_mid, &cache).unwrap();
        assert!(rep.value <= 1e-8, "box kernel fixes the sawtooth: {}", rep.value);

        // classical seminorm with a seam ball is order L
        let menu_seam = BallMenu::new(&g, 128, &standard_radii(&g)).unwrap();
        let classical = bmo_phi(&saw, &phi, &menu_seam, &cache).unwrap();
        assert!(classical.value >= 0.1 * g.side_length(), "{}", classical.value);
    }

    #[test]
    fn p_one_coincidence_is_exact() {
        let g = grid1d(512);
        let f = log_profile(&g);
        let phi = GrowthFunction::power(1.0).unwrap();
        let menu = BallMenu::new(&g, 64, &standard_radii(&g)).unwrap();
        let cache = NormCache::new();
        let op = KernelOp::poisson();
        let a = bmo_phi_a(&f, &phi, &op, &menu, &cache).unwrap();
        let a1 = bmo_phi_a_p(&f, &phi, &op, &menu, 1.0, &cache).unwrap();
        assert_eq!(a.value, a1.value);
        assert_eq!(a.contributions, a1.contributions);
    }

    #[test]
    fn holder_ordering_of_p_variants() {
        let g = grid1d(512);
        let f = log_profile(&g);
        let phi = GrowthFunction::power(1.0).unwrap();
        let menu = BallMenu::new(&g, 64, &standard_radii(&g)).unwrap();
        let cache = NormCache::new();
        let op = KernelOp::poisson();
        let p1 = bmo_phi_a_p(&f, &phi, &op, &menu, 1.0, &cache).unwrap();
        let p2 = bmo_phi_a_p(&f, &phi, &op, &menu, 2.0, &cache).unwrap();
        for (a, b) in p1.contributions.iter().zip(&p2.contributions) {
            assert!(a <= &(b * (1.0 + 1e-12)), "per-ball Holder ordering {a} vs {b}");
        }
        assert!(p2.value >= p1.value);
    }

    #[test]
    fn tilde_matches_kernel_p_for_plain_growth() {
        let g = grid1d(512);
        let f = log_profile(&g);
        let phi = GrowthFunction::power(1.0).unwrap();
        let menu = BallMenu::new(&g, 128, &standard_radii(&g)).unwrap();
        let cache = NormCache::new();
        let op = KernelOp::poisson();
        for p in [1.0, 2.0] {
            let tp = bmo_tilde_p(&f, &phi, &op, &menu, p, &cache).unwrap();
            let ap = bmo_phi_a_p(&f, &phi, &op, &menu, p, &cache).unwrap();
            for (a, b) in tp.contributions.iter().zip(&ap.contributions) {
                assert!(
                    (a - b).abs() <= 1e-12 * b.abs().max(1.0),
                    "tilde {a} vs kernel_p {b}"
                );
            }
        }
    }

    #[test]
    fn seminorm_axioms() {
        let g = grid1d(256);
        let f = log_profile(&g);
        let h = GridFunction::from_fn(g.clone(), |x| (3.0 * x[0]).sin()).unwrap();
        let phi = GrowthFunction::power(1.0).unwrap();
        let menu = BallMenu::new(&g, 32, &standard_radii(&g)).unwrap();
        let cache = NormCache::new();
        let op = KernelOp::poisson();

        let vf = bmo_phi_a(&f, &phi, &op, &menu, &cache).unwrap().value;
        let vh = bmo_phi_a(&h, &phi, &op, &menu, &cache).unwrap().value;
        let scaled = f.map(|v| -3.0 * v);
        let vs = bmo_phi_a(&scaled, &phi, &op, &menu, &cache).unwrap().value;
        assert!((vs - 3.0 * vf).abs() <= 1e-9 * vf.max(1.0), "homogeneity");

        let sum = f.zip(&h, |a, b| a + b).unwrap();
        let vsum = bmo_phi_a(&sum, &phi, &op, &menu, &cache).unwrap().value;
        assert!(vsum <= vf + vh + 1e-9, "triangle: {vsum} vs {vf} + {vh}");
    }

    #[test]
    fn containment_forward_direction() {
        // mass-one kernels: kernel seminorm bounded by a multiple of the
        // classical seminorm across small test corpus
        let g = grid1d(512);
        let phi = GrowthFunction::power(1.0).unwrap();
        let menu = BallMenu::new(&g, 64, &standard_radii(&g)).unwrap();
        let cache = NormCache::new();
        let corpus = vec![
            log_profile(&g),
            GridFunction::from_fn(g.clone(), |x| (2.0 * x[0]).sin()).unwrap(),
            GridFunction::from_fn(g.clone(), |x| if x[0].abs() < 0.4 { 1.0 } else { 0.0 }).unwrap(),
        ];
        for op in [KernelOp::poisson(), KernelOp::heat()] {
            for f in &corpus {
                let a = bmo_phi_a(f, &phi, &op, &menu, &cache).unwrap().value;
                let c = bmo_phi(f, &phi, &menu, &cache).unwrap().value;
                assert!(a <= 6.0 * c, "{}: kernel {a} vs classical {c}", op.kind_name());
            }
        }
    }

    #[test]
    fn max_variant_comparable_to_kernel_seminorm() {
        let g = grid1d(512);
        let f = log_profile(&g);
        let phi = GrowthFunction::power(1.0).unwrap();
        let menu = BallMenu::new(&g, 64, &standard_radii(&g)).unwrap();
        let cache = NormCache::new();
        let op = KernelOp::poisson();
        let a = bmo_phi_a(&f, &phi, &op, &menu, &cache).unwrap().value;
        let ts: Vec<f64> = menu.radii().iter().map(|&r| op.time_for_radius(r)).collect();
        let mx = bmo_phi_a_max(&f, &phi, &op, &ts, 32, &cache).unwrap().value;
        let ratio = mx / a;
        assert!(
            (0.1..10.0).contains(&ratio),
            "max/kernel ratio {ratio} out of window"
        );
    }

    #[test]
    fn wb_conditions_canonical_family() {
        let g = grid1d(512);
        let f = log_profile(&g);
        let phi = GrowthFunction::power(1.0).unwrap();
        let menu = BallMenu::new(&g, 64, &standard_radii(&g)).unwrap();
        let cache = NormCache::new();
        let op = KernelOp::poisson();
        let wb = verify_wb_conditions(&f, &phi, &op, &menu, 16, &cache).unwrap();
        let a = bmo_phi_a(&f, &phi, &op, &menu, &cache).unwrap().value;
        assert_eq!(wb.c1, a);
        assert!(wb.c2.is_finite() && wb.c2 > 0.0);
        assert!(wb.c3.is_finite() && wb.c3 > 0.0);

        let constant = GridFunction::constant(g.clone(), 2.0).unwrap();
        let wb0 = verify_wb_conditions(&constant, &phi, &op, &menu, 16, &cache).unwrap();
        assert!(wb0.c1 <= 1e-12 && wb0.c2 <= 1e-9 && wb0.c3 <= 1e-9);
    }

    #[test]
    fn drift_ratios_bounded_and_guard() {
        let g = grid1d(512);
        let f = log_profile(&g);
        let phi = GrowthFunction::power(1.0).unwrap();
        let menu = BallMenu::new(&g, 64, &standard_radii(&g)).unwrap();
        let cache = NormCache::new();
        let op = KernelOp::poisson();
        let a = bmo_phi_a(&f, &phi, &op, &menu, &cache).unwrap().value;
        let ratios =
            drift_bound_check(&f, &phi, &op, 32, 0.05, &[2.0, 4.0, 8.0, 16.0], a, &cache).unwrap();
        for (k, r) in &ratios {
            assert!(r.is_finite() && *r >= 0.0, "K={k} ratio {r}");
            assert!(*r < 50.0, "K={k} ratio {r} blew up");
        }
        assert!(drift_bound_check(&f, &phi, &op, 32, 0.05, &[2.0], 0.0, &cache).is_err());

        let base: Vec<Ball> = (0..8)
            .map(|i| Ball::new(&g, i * 64, 0.02).unwrap())
            .collect();
        let c = bmo_phi(&f, &phi, &menu, &cache).unwrap().value;
        let mean_ratios = mean_drift_check(&f, &phi, &base, &[2.0, 4.0, 8.0], c, &cache).unwrap();
        for (_, r) in &mean_ratios {
            assert!(r.is_finite() && *r < 50.0);
        }
    }

    #[test]
    fn admissibility_finite_and_linear() {
        let g = grid1d(256);
        let phi = GrowthFunction::power(1.0).unwrap();
        let one = GridFunction::constant(g.clone(), 1.0).unwrap();
        let v1 = admissibility_check(&one, &phi, 0, 0.5).unwrap();
        assert!(v1.is_finite() && v1 > 0.0);
        let f = log_profile(&g);
        assert!(admissibility_check(&f, &phi, 0, 0.5).unwrap().is_finite());
        let double = one.map(|v| 2.0 * v);
        let v2 = admissibility_check(&double, &phi, 0, 0.5).unwrap();
        assert!((v2 - 2.0 * v1).abs() <= 1e-12 * v1);
    }

    #[test]
    fn backend_choice_does_not_move_seminorms() {
        let g = grid1d(512);
        let f = log_profile(&g);
        let phi = GrowthFunction::power(1.0).unwrap();
        let menu = BallMenu::new(&g, 128, &standard_radii(&g)).unwrap();
        let cache = NormCache::new();
        let spectral = bmo_phi_a(&f, &phi, &KernelOp::poisson(), &menu, &cache).unwrap();
        let direct = bmo_phi_a(
            &f,
            &phi,
            &KernelOp::poisson().with_backend(Backend::Direct),
            &menu,
            &cache,
        )
        .unwrap();
        let rel = (spectral.value - direct.value).abs() / spectral.value;
        assert!(rel < 1e-2, "backend drift {rel}");
    }
}
