//! Littlewood-Paley square function and Carleson tent norms for the
//! Poisson and heat semigroups, plus the corpus-level equivalence table.
//!
//! The derivative field `t d/dt P_t (I - P_t) f` is realized spectrally
//! with the symbol differentiated analytically in `t`, never by finite
//! differences; tent integrals use trapezoid weights in `ln t`.

use crate::bmo;
use crate::error::{Error, Result};
use crate::grid::{ball_measure, BallMenu, Grid, GridFunction};
use crate::growth::GrowthFunction;
use crate::luxembourg::{indicator_norm, NormCache};
use crate::semigroup::{KernelKind, KernelOp};
use crate::spectral;

/// `t d/dt [sigma_t (1 - sigma_t)]` for the Poisson (`sigma = e^{-t xi}`)
/// or heat (`sigma = e^{-t xi^2}`) symbol.
fn derivative_symbol(kind: KernelKind, t: f64, xi: f64) -> f64 {
    match kind {
        KernelKind::Poisson => t * (-xi * (-t * xi).exp() + 2.0 * xi * (-2.0 * t * xi).exp()),
        KernelKind::Heat => {
            let x2 = xi * xi;
            t * (-x2 * (-t * x2).exp() + 2.0 * x2 * (-2.0 * t * x2).exp())
        }
        _ => unreachable!("derivative field requires poisson or heat"),
    }
}

/// The field `t d/dt P_t (I - P_t) f` at one time, exact on the
/// frequency lattice.
pub fn lp_derivative_field(f: &GridFunction, op: &KernelOp, t: f64) -> Result<GridFunction> {
    if !matches!(op.kind(), KernelKind::Poisson | KernelKind::Heat) {
        return Err(Error::InvalidParameter(
            "derivative field is defined for the poisson and heat kernels".into(),
        ));
    }
    let grid = f.grid();
    let scale = op.scale(t);
    if !(t > 0.0) || scale > grid.side_length() / 8.0 {
        return Err(Error::InvalidParameter(format!(
            "field time out of range: t = {t} (scale {scale})"
        )));
    }
    let kind = op.kind();
    Ok(spectral::apply_multiplier(f, |xi| derivative_symbol(kind, t, xi)))
}

/// Trapezoid weights in `ln t` for an increasing time grid.
fn log_trapezoid_weights(t_grid: &[f64]) -> Result<Vec<f64>> {
    if t_grid.len() < 2 {
        return Err(Error::InvalidParameter("time grid needs at least 2 points".into()));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) || t_grid[0] <= 0.0 {
        return Err(Error::InvalidParameter("time grid must be positive increasing".into()));
    }
    let u: Vec<f64> = t_grid.iter().map(|t| t.ln()).collect();
    let k = u.len();
    let mut w = vec![0.0; k];
    w[0] = 0.5 * (u[1] - u[0]);
    w[k - 1] = 0.5 * (u[k - 1] - u[k - 2]);
    for i in 1..k - 1 {
        w[i] = 0.5 * (u[i + 1] - u[i - 1]);
    }
    Ok(w)
}

/// Default 48-point geometric time grid spanning `[4h, L/8]` in kernel
/// scale.
pub fn default_t_grid(grid: &Grid) -> Vec<f64> {
    let lo = 4.0 * grid.spacing();
    let hi = grid.side_length() / 8.0;
    geometric_grid(lo, hi, 48)
}

pub fn geometric_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let k = points.max(2);
    (0..k)
        .map(|i| lo * (hi / lo).powf(i as f64 / (k - 1) as f64))
        .collect()
}

/// Pointwise square function `( sum_i |field(x, t_i)|^2 w_i )^{1/2}` with
/// log-trapezoid weights, aggregating all scales of the time grid.
pub fn g_function(f: &GridFunction, op: &KernelOp, t_grid: &[f64]) -> Result<GridFunction> {
    let weights = log_trapezoid_weights(t_grid)?;
    let grid = f.grid();
    let mut acc = vec![0.0f64; grid.len()];
    for (&t, &w) in t_grid.iter().zip(&weights) {
        let field = lp_derivative_field(f, op, t)?;
        for (a, &v) in acc.iter_mut().zip(field.values()) {
            *a += v * v * w;
        }
    }
    GridFunction::new(grid.clone(), acc.into_iter().map(f64::sqrt).collect())
}

/// Carleson norm estimate: per-ball tent masses of
/// `|t d/dt P_t(I - P_t) f|^2 dx dt / t` and the defining supremum
/// `sup_B |B|^{1/2} / ||chi_B|| (tent integral)^{1/2}`.
#[derive(Debug, Clone)]
pub struct CarlesonReport {
    pub value: f64,
    pub contributions: Vec<f64>,
    pub tent_integrals: Vec<f64>,
    pub argmax_ball: usize,
}

pub fn phi_carleson_norm(
    f: &GridFunction,
    phi: &GrowthFunction,
    op: &KernelOp,
    menu: &BallMenu,
    t_grid: &[f64],
    cache: &NormCache,
) -> Result<CarlesonReport> {
    if menu.is_empty() {
        return Err(Error::InvalidParameter("empty menu".into()));
    }
    let grid = f.grid();
    let hn = grid.cell_measure();
    // one field per time, shared across balls
    let fields: Vec<GridFunction> = t_grid
        .iter()
        .map(|&t| lp_derivative_field(f, op, t))
        .collect::<Result<Vec<_>>>()?;

    let mut contributions = Vec::with_capacity(menu.len());
    let mut tents = Vec::with_capacity(menu.len());
    for ball in menu.balls() {
        let sub: Vec<usize> = (0..t_grid.len()).filter(|&i| t_grid[i] < ball.radius).collect();
        let tent = if sub.len() >= 2 {
            let sub_t: Vec<f64> = sub.iter().map(|&i| t_grid[i]).collect();
            let w = log_trapezoid_weights(&sub_t)?;
            let pts = grid.ball_points(ball);
            let mut total = 0.0;
            for (k, &fi) in sub.iter().enumerate() {
                let field = &fields[fi];
                let slice: f64 = pts.iter().map(|&i| field.values()[i].powi(2)).sum();
                total += slice * hn * w[k];
            }
            total
        } else {
            0.0
        };
        let mu = ball_measure(grid, ball)?;
        let norm = indicator_norm(phi, grid, ball, cache)?;
        tents.push(tent);
        contributions.push(mu.sqrt() / norm * tent.sqrt());
    }
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
    Ok(CarlesonReport {
        value,
        contributions,
        tent_integrals: tents,
        argmax_ball: argmax,
    })
}

/// One corpus member's seminorm panel.
#[derive(Debug, Clone)]
pub struct EquivRow {
    pub name: String,
    pub classical: f64,
    pub kernel_poisson: f64,
    pub kernel_heat: f64,
    pub kernel_max_poisson: f64,
    pub kernel_p2_poisson: f64,
    pub tilde_p2_poisson: f64,
    pub wb_c1: f64,
    pub wb_c2: f64,
    pub wb_c3: f64,
    pub carleson: f64,
}

/// Min/max of a ratio column across the corpus.
#[derive(Debug, Clone)]
pub struct RatioWindow {
    pub numerator: &'static str,
    pub denominator: &'static str,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub rows: Vec<EquivRow>,
    pub windows: Vec<RatioWindow>,
}

/// Full seminorm panel per corpus member plus cross-corpus ratio windows.
/// Members must have strictly positive classical seminorm (constants are
/// rejected upstream).
pub fn equivalence_report(
    corpus: &[(String, GridFunction)],
    phi: &GrowthFunction,
    menu: &BallMenu,
    t_grid: &[f64],
    x_stride: usize,
    cache: &NormCache,
) -> Result<EquivalenceReport> {
    if corpus.len() < 5 {
        return Err(Error::InvalidParameter(format!(
            "equivalence corpus needs >= 5 members, got {}",
            corpus.len()
        )));
    }
    let poisson = KernelOp::poisson();
    let heat = KernelOp::heat();
    let mut rows = Vec::new();
    for (name, f) in corpus {
        let classical = bmo::bmo_phi(f, phi, menu, cache)?;
        if classical.value <= 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "corpus member {name} has zero classical seminorm"
            )));
        }
        let kernel_poisson = bmo::bmo_phi_a(f, phi, &poisson, menu, cache)?;
        let kernel_heat = bmo::bmo_phi_a(f, phi, &heat, menu, cache)?;
        let ts: Vec<f64> = menu
            .radii()
            .iter()
            .map(|&r| poisson.time_for_radius(r))
            .collect();
        let kernel_max = bmo::bmo_phi_a_max(f, phi, &poisson, &ts, x_stride, cache)?;
        let kernel_p2 = bmo::bmo_phi_a_p(f, phi, &poisson, menu, 2.0, cache)?;
        let tilde_p2 = bmo::bmo_tilde_p(f, phi, &poisson, menu, 2.0, cache)?;
        let wb = bmo::verify_wb_conditions(f, phi, &poisson, menu, x_stride, cache)?;
        let carleson = phi_carleson_norm(f, phi, &poisson, menu, t_grid, cache)?;
        rows.push(EquivRow {
            name: name.clone(),
            classical: classical.value,
            kernel_poisson: kernel_poisson.value,
            kernel_heat: kernel_heat.value,
            kernel_max_poisson: kernel_max.value,
            kernel_p2_poisson: kernel_p2.value,
            tilde_p2_poisson: tilde_p2.value,
            wb_c1: wb.c1,
            wb_c2: wb.c2,
            wb_c3: wb.c3,
            carleson: carleson.value,
        });
    }

    let window = |num: &'static str,
                  den: &'static str,
                  get_num: fn(&EquivRow) -> f64,
                  get_den: fn(&EquivRow) -> f64,
                  rows: &[EquivRow]|
     -> RatioWindow {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for r in rows {
            let ratio = get_num(r) / get_den(r);
            min = min.min(ratio);
            max = max.max(ratio);
        }
        RatioWindow { numerator: num, denominator: den, min, max }
    };
    let windows = vec![
        window("kernel_poisson", "classical", |r| r.kernel_poisson, |r| r.classical, &rows),
        window("kernel_heat", "classical", |r| r.kernel_heat, |r| r.classical, &rows),
        window("kernel_max_poisson", "kernel_poisson", |r| r.kernel_max_poisson, |r| r.kernel_poisson, &rows),
        window("kernel_p2_poisson", "kernel_poisson", |r| r.kernel_p2_poisson, |r| r.kernel_poisson, &rows),
        window("tilde_p2_poisson", "kernel_poisson", |r| r.tilde_p2_poisson, |r| r.kernel_poisson, &rows),
        window("wb_c2", "kernel_poisson", |r| r.wb_c2, |r| r.kernel_poisson, &rows),
        window("wb_c3", "kernel_poisson", |r| r.wb_c3, |r| r.kernel_poisson, &rows),
        window("carleson", "kernel_poisson", |r| r.carleson, |r| r.kernel_poisson, &rows),
        window("classical", "carleson", |r| r.classical, |r| r.carleson, &rows),
    ];
    Ok(EquivalenceReport { rows, windows })
}
