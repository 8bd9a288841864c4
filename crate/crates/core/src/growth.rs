//! Growth-function families and numerical diagnostics: uniform type
//! exponents, Muckenhoupt and reverse Holder constants, and the
//! nested-ball norm-to-measure comparison used by the level-set machinery.
//!
//! Four families are provided, all evaluable at every grid point and
//! `t >= 0`:
//!
//! * `power`:          `phi(x,t) = t^p`, `p` in (0,1]
//! * `weighted_power`: `phi(x,t) = w(x) t^p` with a sampled weight `w > 0`
//! * `log_type`:       `phi(x,t) = t^s / ([ln(e+d(x,x0))]^beta + [ln(e+t)]^gamma)`
//! * `ky_log`:         `phi(x,t) = t / (ln(e+d(x,x0)) + ln(e+t))`
//!
//! Every function carries declared type exponents (`lower`, `upper`) and a
//! declared Muckenhoupt exponent `p1`; the declared values fill the
//! exponent slots of drift bounds and nested-ball conditions, while the
//! probes below produce sampled estimates, never true suprema.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{ball_measure, Ball, BallMenu, Grid, GridFunction};
use crate::luxembourg::{indicator_norm, NormCache};

#[derive(Debug, Clone)]
pub enum GrowthFamily {
    Power {
        p: f64,
    },
    WeightedPower {
        weight: GridFunction,
        p: f64,
    },
    LogType {
        s: f64,
        beta: f64,
        gamma: f64,
        anchor: [f64; 2],
    },
    KyLog {
        anchor: [f64; 2],
    },
}

/// Evaluable growth function with declared family parameters and declared
/// type/Muckenhoupt exponents.
#[derive(Debug, Clone)]
pub struct GrowthFunction {
    family: GrowthFamily,
    lower_type: f64,
    upper_type: f64,
    /// Declared Muckenhoupt exponent `p1` (`phi` in `A_{p1}`).
    ap_exponent: f64,
    id_hash: u64,
}

fn fnv1a(bytes: &[u8], seed: u64) -> u64 {
    let mut h = seed ^ 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

impl GrowthFunction {
    pub fn power(p: f64) -> Result<GrowthFunction> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "power family needs p in (0,1], got {p}"
            )));
        }
        let id_hash = fnv1a(&p.to_le_bytes(), 1);
        Ok(GrowthFunction {
            family: GrowthFamily::Power { p },
            lower_type: p,
            upper_type: p,
            ap_exponent: 1.0,
            id_hash,
        })
    }

    /// `phi(x,t) = w(x) t^p`. The sampled weight must be strictly positive;
    /// `ap_exponent` declares the `A_{p1}` class of the weight.
    pub fn weighted_power(weight: GridFunction, p: f64, ap_exponent: f64) -> Result<GrowthFunction> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "weighted_power family needs p in (0,1], got {p}"
            )));
        }
        if weight.values().iter().any(|&w| !(w > 0.0)) {
            return Err(Error::InvalidParameter(
                "weighted_power weight must be strictly positive".into(),
            ));
        }
        if !(ap_exponent >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "ap_exponent must be >= 1, got {ap_exponent}"
            )));
        }
        let mut h = fnv1a(&p.to_le_bytes(), 2);
        for v in weight.values() {
            h = fnv1a(&v.to_le_bytes(), h);
        }
        Ok(GrowthFunction {
            family: GrowthFamily::WeightedPower { weight, p },
            lower_type: p,
            upper_type: p,
            ap_exponent,
            id_hash: h,
        })
    }

    pub fn log_type(s: f64, beta: f64, gamma: f64, anchor: [f64; 2]) -> Result<GrowthFunction> {
        if !(s > 0.0 && s <= 1.0) || beta < 0.0 || gamma < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "log_type needs s in (0,1], beta,gamma >= 0; got s={s} beta={beta} gamma={gamma}"
            )));
        }
        let mut h = fnv1a(&s.to_le_bytes(), 3);
        h = fnv1a(&beta.to_le_bytes(), h);
        h = fnv1a(&gamma.to_le_bytes(), h);
        h = fnv1a(&anchor[0].to_le_bytes(), h);
        h = fnv1a(&anchor[1].to_le_bytes(), h);
        Ok(GrowthFunction {
            family: GrowthFamily::LogType { s, beta, gamma, anchor },
            // i(phi) = s is not attained; declare a hair below.
            lower_type: (s - 0.05).max(0.5 * s),
            upper_type: s,
            ap_exponent: 1.0,
            id_hash: h,
        })
    }

    pub fn ky_log(anchor: [f64; 2]) -> Result<GrowthFunction> {
        let mut h = fnv1a(&anchor[0].to_le_bytes(), 4);
        h = fnv1a(&anchor[1].to_le_bytes(), h);
        Ok(GrowthFunction {
            family: GrowthFamily::KyLog { anchor },
            lower_type: 0.95,
            upper_type: 1.0,
            ap_exponent: 1.0,
            id_hash: h,
        })
    }

    pub fn family(&self) -> &GrowthFamily {
        &self.family
    }

    pub fn lower_type(&self) -> f64 {
        self.lower_type
    }

    pub fn upper_type(&self) -> f64 {
        self.upper_type
    }

    pub fn ap_exponent(&self) -> f64 {
        self.ap_exponent
    }

    /// Override the declared exponents (they fill exponent slots in drift
    /// and nested-ball bounds; see the bmo module).
    pub fn with_declared(mut self, lower_type: f64, upper_type: f64, ap_exponent: f64) -> Self {
        self.lower_type = lower_type;
        self.upper_type = upper_type;
        self.ap_exponent = ap_exponent;
        self
    }

    /// Stable identity hash used as a cache key component.
    pub fn id_hash(&self) -> u64 {
        self.id_hash
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            GrowthFamily::Power { .. } => "power",
            GrowthFamily::WeightedPower { .. } => "weighted_power",
            GrowthFamily::LogType { .. } => "log_type",
            GrowthFamily::KyLog { .. } => "ky_log",
        }
    }

    /// Evaluate at grid point `idx` and `t >= 0`.
    pub fn eval(&self, grid: &Grid, idx: usize, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        match &self.family {
            GrowthFamily::Power { p } => t.powf(*p),
            GrowthFamily::WeightedPower { weight, p } => weight.values()[idx] * t.powf(*p),
            GrowthFamily::LogType { s, beta, gamma, anchor } => {
                // fully degenerate corner beta = gamma = 0 collapses the
                // denominator to 1 (plain t^s) rather than 1 + 1
                let denom = if *beta == 0.0 && *gamma == 0.0 {
                    1.0
                } else {
                    let d = grid.periodic_dist2(grid.coords(idx), *anchor).sqrt();
                    ln_e_plus(d).powf(*beta) + ln_e_plus(t).powf(*gamma)
                };
                t.powf(*s) / denom
            }
            GrowthFamily::KyLog { anchor } => {
                let d = grid.periodic_dist2(grid.coords(idx), *anchor).sqrt();
                t / (ln_e_plus(d) + ln_e_plus(t))
            }
        }
    }

    /// Evaluate at explicit coordinates (weighted family snaps to the
    /// nearest grid point).
    pub fn eval_coords(&self, grid: &Grid, x: [f64; 2], t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::InvalidParameter(format!("t must be >= 0, got {t}")));
        }
        Ok(self.eval(grid, grid.nearest_index(x), t))
    }

    /// `phi(E, t) = sum over points of phi(x,t) h^n` for an index set.
    pub fn measure_of(&self, grid: &Grid, indices: &[usize], t: f64) -> f64 {
        indices.iter().map(|&i| self.eval(grid, i, t)).sum::<f64>() * grid.cell_measure()
    }
}

fn ln_e_plus(v: f64) -> f64 {
    (std::f64::consts::E + v).ln()
}

/// Result of a weight-condition sweep over a menu and a `t` ladder.
#[derive(Debug, Clone)]
pub struct WeightReport {
    /// Exponent tested (`p` for Muckenhoupt, `q` for reverse Holder;
    /// `f64::INFINITY` for the essential-sup form).
    pub exponent: f64,
    pub constant: f64,
    pub argmax_ball: usize,
    pub argmax_t: f64,
}

/// Default geometric `t` ladder `2^-20 .. 2^20`, 41 points.
pub fn default_t_samples() -> Vec<f64> {
    (-20..=20).map(|k| (k as f64).exp2()).collect()
}

/// Uniform Muckenhoupt constant estimate over `menu x t_samples`.
///
/// For `p > 1` the defining product is
/// `mean_B phi * [mean_B phi^{-1/(p-1)}]^{p-1}`; for `p = 1` the essential
/// infimum is the discrete minimum over ball points.
pub fn ap_constant(
    phi: &GrowthFunction,
    grid: &Arc<Grid>,
    menu: &BallMenu,
    p: f64,
    t_samples: &[f64],
) -> Result<WeightReport> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("A_p needs p >= 1, got {p}")));
    }
    if menu.is_empty() || t_samples.is_empty() {
        return Err(Error::InvalidParameter("empty menu or t ladder".into()));
    }
    if t_samples.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::InvalidParameter("t samples must be positive".into()));
    }
    let per_ball: Vec<(f64, usize, f64)> = menu
        .balls()
        .par_iter()
        .enumerate()
        .map(|(bi, ball)| {
            let pts = grid.ball_points(ball);
            let inv_count = 1.0 / pts.len() as f64;
            let mut best = (f64::NEG_INFINITY, bi, t_samples[0]);
            for &t in t_samples {
                let vals: Vec<f64> = pts.iter().map(|&i| phi.eval(grid, i, t)).collect();
                if vals.iter().any(|&v| v == 0.0) {
                    return Err(Error::numerical(
                        "ap_constant",
                        format!("phi vanishes on ball {bi} at t={t}"),
                    ));
                }
                let mean: f64 = vals.iter().sum::<f64>() * inv_count;
                let value = if p == 1.0 {
                    let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
                    mean / min
                } else if p == 2.0 {
                    // reciprocal branch kept free of powf so that scaling
                    // by powers of two is exact
                    let mean_inv: f64 = vals.iter().map(|&v| 1.0 / v).sum::<f64>() * inv_count;
                    mean * mean_inv
                } else {
                    let e = -1.0 / (p - 1.0);
                    let mean_pow: f64 = vals.iter().map(|&v| v.powf(e)).sum::<f64>() * inv_count;
                    mean * mean_pow.powf(p - 1.0)
                };
                if value > best.0 {
                    best = (value, bi, t);
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>>>()?;
    let best = per_ball
        .into_iter()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .unwrap();
    Ok(WeightReport {
        exponent: p,
        constant: best.0,
        argmax_ball: best.1,
        argmax_t: best.2,
    })
}

/// Uniform reverse Holder constant estimate over `menu x t_samples`.
/// `q = f64::INFINITY` uses the essential-sup form.
pub fn rh_constant(
    phi: &GrowthFunction,
    grid: &Arc<Grid>,
    menu: &BallMenu,
    q: f64,
    t_samples: &[f64],
) -> Result<WeightReport> {
    if !(q > 1.0) {
        return Err(Error::InvalidParameter(format!("RH_q needs q > 1, got {q}")));
    }
    if menu.is_empty() || t_samples.is_empty() {
        return Err(Error::InvalidParameter("empty menu or t ladder".into()));
    }
    let per_ball: Vec<(f64, usize, f64)> = menu
        .balls()
        .par_iter()
        .enumerate()
        .map(|(bi, ball)| {
            let pts = grid.ball_points(ball);
            let inv_count = 1.0 / pts.len() as f64;
            let mut best = (f64::NEG_INFINITY, bi, t_samples[0]);
            for &t in t_samples {
                let vals: Vec<f64> = pts.iter().map(|&i| phi.eval(grid, i, t)).collect();
                let mean: f64 = vals.iter().sum::<f64>() * inv_count;
                if mean == 0.0 {
                    continue;
                }
                let value = if q.is_infinite() {
                    let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    max / mean
                } else {
                    let mean_q: f64 = vals.iter().map(|&v| v.powf(q)).sum::<f64>() * inv_count;
                    mean_q.powf(1.0 / q) / mean
                };
                if value > best.0 {
                    best = (value, bi, t);
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>>>()?;
    let best = per_ball
        .into_iter()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .unwrap();
    Ok(WeightReport {
        exponent: q,
        constant: best.0,
        argmax_ball: best.1,
        argmax_t: best.2,
    })
}

/// Witness sample breaking a candidate type exponent.
#[derive(Debug, Clone, Copy)]
pub struct TypeWitness {
    pub x_index: usize,
    pub s: f64,
    pub t: f64,
    pub candidate: f64,
}

#[derive(Debug, Clone)]
pub struct TypeProbe {
    pub lower_estimate: f64,
    pub upper_estimate: f64,
    pub lower_witness: Option<TypeWitness>,
    pub upper_witness: Option<TypeWitness>,
}

const TYPE_CONSTANTS: [f64; 4] = [1.0, 1.2, 1.5, 1.9];

/// Sampled estimates of the uniform lower and upper type exponents.
///
/// Lower: the largest `p` on a fine grid such that
/// `phi(x, s t) <= C s^p phi(x, t)` holds over all samples with `s < 1`
/// for some `C` in a fixed candidate ladder. Upper: the smallest such `p`
/// with `s > 1`. Estimates only; the true indices may not be attained.
pub fn type_exponent_probe(
    phi: &GrowthFunction,
    grid: &Grid,
    x_samples: &[usize],
    t_samples: &[f64],
    s_lower: &[f64],
    s_upper: &[f64],
) -> Result<TypeProbe> {
    if x_samples.is_empty() || t_samples.is_empty() || s_lower.is_empty() || s_upper.is_empty() {
        return Err(Error::InvalidParameter("empty sample set".into()));
    }
    if s_lower.iter().any(|&s| !(s > 0.0 && s < 1.0)) {
        return Err(Error::InvalidParameter("lower s samples must lie in (0,1)".into()));
    }
    if s_upper.iter().any(|&s| !(s > 1.0)) {
        return Err(Error::InvalidParameter("upper s samples must lie in (1,inf)".into()));
    }

    let holds = |p: f64, s_set: &[f64]| -> Option<TypeWitness> {
        // returns a violating witness for the best constant, or None if
        // some constant works
        let mut worst: Option<TypeWitness> = None;
        'outer: for &c in TYPE_CONSTANTS.iter() {
            for &xi in x_samples {
                for &t in t_samples {
                    let base = phi.eval(grid, xi, t);
                    for &s in s_set {
                        let lhs = phi.eval(grid, xi, s * t);
                        let rhs = c * s.powf(p) * base;
                        if lhs > rhs * (1.0 + 1e-12) {
                            worst = Some(TypeWitness { x_index: xi, s, t, candidate: p });
                            continue 'outer;
                        }
                    }
                }
            }
            return None; // this constant works for all samples
        }
        worst
    };

    let ps: Vec<f64> = (1..=80).map(|k| k as f64 * 0.025).collect();
    let mut lower_estimate = 0.0;
    let mut lower_witness = None;
    for &p in &ps {
        match holds(p, s_lower) {
            None => lower_estimate = p,
            Some(w) => {
                lower_witness = Some(w);
                break;
            }
        }
    }
    let mut upper_estimate = f64::INFINITY;
    let mut upper_witness = None;
    for &p in &ps {
        match holds(p, s_upper) {
            None => {
                upper_estimate = p;
                break;
            }
            Some(w) => upper_witness = Some(w),
        }
    }
    Ok(TypeProbe {
        lower_estimate,
        upper_estimate,
        lower_witness,
        upper_witness,
    })
}

/// Nested-ball norm-to-measure comparison: the maximum over pairs
/// `B1 subset B2` of `(||chi_B1|| / mu(B1)) / (||chi_B2|| / mu(B2))`.
pub fn check_afnj(
    phi: &GrowthFunction,
    grid: &Arc<Grid>,
    pairs: &[(Ball, Ball)],
    cache: &NormCache,
) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::InvalidParameter("no nested pairs".into()));
    }
    let mut worst = f64::NEG_INFINITY;
    for (inner, outer) in pairs {
        if !outer.contains(grid, inner) {
            return Err(Error::InvalidParameter(format!(
                "pair not nested: inner r={} center={} outer r={} center={}",
                inner.radius, inner.center_index, outer.radius, outer.center_index
            )));
        }
        let n1 = indicator_norm(phi, grid, inner, cache)?;
        let n2 = indicator_norm(phi, grid, outer, cache)?;
        let m1 = ball_measure(grid, inner)?;
        let m2 = ball_measure(grid, outer)?;
        let ratio = (n1 / m1) / (n2 / m2);
        if ratio > worst {
            worst = ratio;
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid1d() -> Arc<Grid> {
        Grid::new(1, 2.0, 256).unwrap()
    }

    #[test]
    fn eval_examples() {
        let g = grid1d();
        let phi = GrowthFunction::power(0.5).unwrap();
        assert_relative_eq!(phi.eval(&g, 0, 4.0), 2.0);

        let ky = GrowthFunction::ky_log([0.0, 0.0]).unwrap();
        assert_eq!(ky.eval(&g, g.nearest_index([0.0, 0.0]), 0.0), 0.0);

        // degenerate log_type with beta = gamma = 0 collapses to t^s
        let lt = GrowthFunction::log_type(1.0, 0.0, 0.0, [0.0, 0.0]).unwrap();
        assert_relative_eq!(lt.eval(&g, 17, 5.0), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn eval_rejects_negative_t() {
        let g = grid1d();
        let phi = GrowthFunction::power(0.5).unwrap();
        assert!(phi.eval_coords(&g, [0.0, 0.0], -1.0).is_err());
    }

    #[test]
    fn ap_constant_trivial_for_constant_weight() {
        let g = grid1d();
        let phi = GrowthFunction::power(1.0).unwrap();
        let menu = BallMenu::new(&g, 64, &[0.25, 0.125]).unwrap();
        let ts = vec![0.5, 1.0, 2.0];
        let rep = ap_constant(&phi, &g, &menu, 2.0, &ts).unwrap();
        assert!((rep.constant - 1.0).abs() < 1e-12, "got {}", rep.constant);
        let rep1 = ap_constant(&phi, &g, &menu, 1.0, &ts).unwrap();
        assert!((rep1.constant - 1.0).abs() < 1e-12);
        assert!(ap_constant(&phi, &g, &menu, 0.5, &ts).is_err());
    }

    #[test]
    fn rh_constant_trivial_and_bounds() {
        let g = grid1d();
        let phi = GrowthFunction::power(1.0).unwrap();
        let menu = BallMenu::new(&g, 64, &[0.25]).unwrap();
        let ts = vec![1.0];
        let r2 = rh_constant(&phi, &g, &menu, 2.0, &ts).unwrap();
        assert!((r2.constant - 1.0).abs() < 1e-12);
        let rinf = rh_constant(&phi, &g, &menu, f64::INFINITY, &ts).unwrap();
        assert!((rinf.constant - 1.0).abs() < 1e-12);
        assert!(rh_constant(&phi, &g, &menu, 1.0, &ts).is_err());
    }

    #[test]
    fn weighted_sweep_regression_values() {
        // direct quadrature sweep over the full menu, frozen
        let g = Grid::new(1, 2.0, 4096).unwrap();
        let radii: Vec<f64> = (0..6).map(|k| 0.25 / (1u64 << k) as f64).collect();
        let menu = BallMenu::new(&g, 64, &radii).unwrap();
        let w = crate::corpus::sqrt_abs_weight(&g).unwrap();
        let phi = GrowthFunction::weighted_power(w, 1.0, 2.0).unwrap();
        let ts = default_t_samples();
        let ap = ap_constant(&phi, &g, &menu, 2.0, &ts).unwrap();
        assert_relative_eq!(ap.constant, 1.4708109326803338, epsilon = 1e-9);
        let rh = rh_constant(&phi, &g, &menu, 2.0, &ts).unwrap();
        assert_relative_eq!(rh.constant, 1.0871023514214189, epsilon = 1e-9);
    }

    #[test]
    fn afnj_examples() {
        let g = Grid::new(1, 2.0, 2048).unwrap();
        let cache = crate::luxembourg::NormCache::new();
        let menu = BallMenu::new(&g, 64, &crate::grid::standard_radii(&g)).unwrap();
        let pairs = menu.nested_pairs();

        // power family: ratio stays at or below 1 up to discrete slack
        for p in [1.0, 0.5, 0.75] {
            let phi = GrowthFunction::power(p).unwrap();
            let c = check_afnj(&phi, &g, &pairs, &cache).unwrap();
            let r_min = menu.radii().last().unwrap();
            assert!(c <= 1.0 + 10.0 * g.spacing() / r_min, "p={p}: {c}");
        }

        // identical balls give ratio exactly 1
        let b = Ball::new(&g, 5, 0.1).unwrap();
        let phi = GrowthFunction::power(0.5).unwrap();
        let c = check_afnj(&phi, &g, &[(b.clone(), b)], &cache).unwrap();
        assert_relative_eq!(c, 1.0, epsilon = 1e-12);

        // non-nested pair rejected
        let b1 = Ball::new(&g, 0, 0.1).unwrap();
        let b2 = Ball::new(&g, 1024, 0.1).unwrap();
        assert!(check_afnj(&phi, &g, &[(b1, b2)], &cache).is_err());

        // weighted family on N=4096: frozen direct-sweep value
        let g4 = Grid::new(1, 2.0, 4096).unwrap();
        let cache4 = crate::luxembourg::NormCache::new();
        let menu4 = BallMenu::new(&g4, 64, &crate::grid::standard_radii(&g4)).unwrap();
        let w = crate::corpus::sqrt_abs_weight(&g4).unwrap();
        let phi_w = GrowthFunction::weighted_power(w, 0.5, 2.0).unwrap();
        let c = check_afnj(&phi_w, &g4, &menu4.nested_pairs(), &cache4).unwrap();
        assert_relative_eq!(c, 0.5600924546709222, epsilon = 1e-6);
    }

    #[test]
    fn rh_at_least_one() {
        let g = grid1d();
        let w = GridFunction::from_fn(g.clone(), |x| x[0].abs().max(0.01).sqrt()).unwrap();
        let phi = GrowthFunction::weighted_power(w, 1.0, 2.0).unwrap();
        let menu = BallMenu::new(&g, 32, &[0.25, 0.0625]).unwrap();
        let rep = rh_constant(&phi, &g, &menu, 2.0, &default_t_samples()).unwrap();
        assert!(rep.constant >= 1.0 - 1e-12);
    }

    #[test]
    fn type_probe_power_and_linear() {
        let g = grid1d();
        let xs: Vec<usize> = (0..g.len()).step_by(37).collect();
        let ts: Vec<f64> = vec![0.01, 0.1, 1.0, 10.0, 1000.0];
        let sl: Vec<f64> = vec![0.9, 0.5, 0.1, 0.01, 1e-4, 1e-6];
        let su: Vec<f64> = vec![1.2, 2.0, 10.0, 100.0, 1e4, 1e6];

        let sqrt = GrowthFunction::power(0.5).unwrap();
        let probe = type_exponent_probe(&sqrt, &g, &xs, &ts, &sl, &su).unwrap();
        assert!((probe.lower_estimate - 0.5).abs() <= 0.05, "{}", probe.lower_estimate);
        assert!((probe.upper_estimate - 0.5).abs() <= 0.05, "{}", probe.upper_estimate);

        let lin = GrowthFunction::power(1.0).unwrap();
        let probe = type_exponent_probe(&lin, &g, &xs, &ts, &sl, &su).unwrap();
        assert!((probe.upper_estimate - 1.0).abs() <= 0.05);
    }

    #[test]
    fn type_probe_ky_log_lower_below_one() {
        let g = grid1d();
        let ky = GrowthFunction::ky_log([0.0, 0.0]).unwrap();
        let xs: Vec<usize> = (0..g.len()).step_by(17).collect();
        let ts: Vec<f64> = default_t_samples();
        let sl: Vec<f64> = vec![0.5, 0.1, 1e-3, 1e-6];
        let su: Vec<f64> = vec![2.0, 10.0, 1e3];
        let probe = type_exponent_probe(&ky, &g, &xs, &ts, &sl, &su).unwrap();
        assert!(
            probe.lower_estimate < 1.0,
            "i(phi)=1 is not attained; estimate {}",
            probe.lower_estimate
        );
        assert!(probe.lower_estimate >= 0.8, "estimate {}", probe.lower_estimate);
        assert!(probe.lower_witness.is_some());
    }
}
