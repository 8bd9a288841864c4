//! Config-driven experiment pipeline: builds the domain objects, executes
//! the selected task, and emits CSV/JSON reports plus plot-ready data
//! files. Partial outputs are removed when a task fails.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde_json::json;

use crate::bmo;
use crate::carleson;
use crate::config::ExperimentConfig;
use crate::corpus;
use crate::error::{Error, Result};
use crate::grid::{Ball, BallMenu, Grid, GridFunction};
use crate::growth::{self, GrowthFunction};
use crate::jn;
use crate::luxembourg::{self, NormCache};
use crate::report::{cell, ReportSink};
use crate::semigroup::{self, KernelOp};

pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub summary: serde_json::Value,
}

struct Context {
    config: ExperimentConfig,
    grid: Arc<Grid>,
    phi: GrowthFunction,
    kernel: KernelOp,
    menu: BallMenu,
    cache: NormCache,
    x_stride: usize,
    norm_tol: f64,
}

impl Context {
    fn build(config: &ExperimentConfig) -> Result<Context> {
        let grid = config.build_grid()?;
        let phi = config.build_growth(&grid)?;
        let kernel = config.build_kernel()?;
        let menu = config.build_menu(&grid)?;
        let x_stride = config
            .task
            .x_stride
            .unwrap_or((grid.points_per_side() / 32).max(1));
        let norm_tol = config.task.norm_tol.unwrap_or(1e-4);
        Ok(Context {
            config: config.clone(),
            grid,
            phi,
            kernel,
            menu,
            cache: NormCache::new(),
            x_stride,
            norm_tol,
        })
    }

    fn corpus(&self) -> Result<Vec<(String, GridFunction)>> {
        self.config
            .corpus_members()
            .iter()
            .map(|n| Ok((n.clone(), corpus::member(&self.grid, n, self.config.corpus.seed)?)))
            .collect()
    }

    /// Resolve a single-function selector: corpus member name or
    /// `file:<path>` (CSV by `.csv` extension, binary otherwise).
    fn function(&self, selector: &str) -> Result<GridFunction> {
        if let Some(path) = selector.strip_prefix("file:") {
            let p = Path::new(path);
            let f = if p.extension().map(|e| e == "csv").unwrap_or(false) {
                GridFunction::read_csv(std::fs::File::open(p)?)?
            } else {
                GridFunction::read_binary(std::fs::File::open(p)?)?
            };
            if **f.grid() != *self.grid {
                return Err(Error::Config(format!(
                    "function file {path} is sampled on a different grid"
                )));
            }
            return Ok(f);
        }
        corpus::member(&self.grid, selector, self.config.corpus.seed)
            .map_err(|_| Error::Config(format!("unknown function selector {selector}")))
    }

    fn t_grid(&self) -> Vec<f64> {
        let points = self.config.task.t_points.unwrap_or(48);
        let lo = 4.0 * self.grid.spacing();
        let hi = self.grid.side_length() / 8.0;
        carleson::geometric_grid(lo, hi, points)
    }
}

/// Execute the configured task. On error every file written so far is
/// removed before the error is returned.
pub fn run(config: &ExperimentConfig) -> Result<RunOutput> {
    let ctx = Context::build(config)?;
    let mut sink = ReportSink::new(
        Path::new(&config.output.directory),
        &config.hash(),
        &config.output.formats,
    )?;
    let result = dispatch(&ctx, &mut sink);
    match result {
        Ok(summary) => Ok(RunOutput {
            files: sink.files().to_vec(),
            summary,
        }),
        Err(e) => {
            sink.cleanup();
            Err(e)
        }
    }
}

fn dispatch(ctx: &Context, sink: &mut ReportSink) -> Result<serde_json::Value> {
    match ctx.config.task.kind.as_str() {
        "norm" => task_norm(ctx, sink),
        "norms" => task_norms(ctx, sink),
        "weights" => task_weights(ctx, sink),
        "bmo" => task_bmo(ctx, sink),
        "jn" => task_jn(ctx, sink),
        "carleson" => task_carleson(ctx, sink),
        "equiv" => task_equiv(ctx, sink),
        "kernel-check" => task_kernel_check(ctx, sink),
        other => Err(Error::Config(format!("unknown task {other}"))),
    }
}

fn task_norm(ctx: &Context, sink: &mut ReportSink) -> Result<serde_json::Value> {
    let selector = ctx.config.task.function.as_deref().unwrap_or("log_profile");
    let f = ctx.function(selector)?;
    let r = luxembourg::luxembourg_norm(&ctx.phi, &f, ctx.norm_tol)?;
    sink.csv(
        "norm",
        &["function", "norm", "modular_at_norm", "iterations"],
        &[vec![
            selector.to_string(),
            cell(r.value),
            cell(r.modular_at_value),
            r.iterations.to_string(),
        ]],
    )?;
    let summary = json!({
        "function": selector,
        "norm": r.value,
        "modular_at_norm": r.modular_at_value,
        "iterations": r.iterations,
    });
    sink.json("norm_summary", &summary)?;
    Ok(summary)
}

/// Seminorm panel across the corpus; constants produce rows of zeros.
/// Luxembourg norms ride along in their own table.
fn task_norms(ctx: &Context, sink: &mut ReportSink) -> Result<serde_json::Value> {
    let mut lux_rows = Vec::new();
    let mut panel_rows = Vec::new();
    let mut summary = serde_json::Map::new();
    let ts: Vec<f64> = ctx
        .menu
        .radii()
        .iter()
        .map(|&r| ctx.kernel.time_for_radius(r))
        .collect();
    for (name, f) in ctx.corpus()? {
        let r = luxembourg::luxembourg_norm(&ctx.phi, &f, ctx.norm_tol)?;
        lux_rows.push(vec![
            name.clone(),
            cell(r.value),
            cell(r.modular_at_value),
            r.iterations.to_string(),
        ]);
        let classical = bmo::bmo_phi(&f, &ctx.phi, &ctx.menu, &ctx.cache)?.value;
        let kernel = bmo::bmo_phi_a(&f, &ctx.phi, &ctx.kernel, &ctx.menu, &ctx.cache)?.value;
        let maxv = bmo::bmo_phi_a_max(&f, &ctx.phi, &ctx.kernel, &ts, ctx.x_stride, &ctx.cache)?
            .value;
        let p2 = bmo::bmo_phi_a_p(&f, &ctx.phi, &ctx.kernel, &ctx.menu, 2.0, &ctx.cache)?.value;
        let t2 = bmo::bmo_tilde_p(&f, &ctx.phi, &ctx.kernel, &ctx.menu, 2.0, &ctx.cache)?.value;
        panel_rows.push(vec![
            name.clone(),
            cell(classical),
            cell(kernel),
            cell(maxv),
            cell(p2),
            cell(t2),
        ]);
        summary.insert(
            name,
            json!({
                "luxembourg_norm": r.value,
                "classical": classical,
                "kernel": kernel,
                "kernel_max": maxv,
                "kernel_p2": p2,
                "tilde_p2": t2,
            }),
        );
    }
    sink.csv(
        "norms_summary",
        &["function", "classical", "kernel", "kernel_max", "kernel_p2", "tilde_p2"],
        &panel_rows,
    )?;
    sink.csv(
        "luxembourg_norms",
        &["function", "norm", "modular_at_norm", "iterations"],
        &lux_rows,
    )?;
    let summary = serde_json::Value::Object(summary);
    sink.json("norms_summary", &summary)?;
    Ok(summary)
}

fn task_weights(ctx: &Context, sink: &mut ReportSink) -> Result<serde_json::Value> {
    let t_samples = growth::default_t_samples();
    let ap_ladder = ctx
        .config
        .task
        .ap_exponents
        .clone()
        .unwrap_or_else(|| vec![1.0, 1.25, 1.5, 2.0, 3.0, 4.0]);
    let rh_ladder = ctx
        .config
        .task
        .rh_exponents
        .clone()
        .unwrap_or_else(|| vec![1.25, 1.5, 2.0, 4.0, f64::INFINITY]);
    let mut rows = Vec::new();
    let mut ap_curve = Vec::new();
    for &p in &ap_ladder {
        let rep = growth::ap_constant(&ctx.phi, &ctx.grid, &ctx.menu, p, &t_samples)?;
        rows.push(vec![
            "ap".to_string(),
            cell(p),
            cell(rep.constant),
            rep.argmax_ball.to_string(),
            cell(rep.argmax_t),
        ]);
        ap_curve.push((p, rep.constant));
    }
    let mut rh_curve = Vec::new();
    for &q in &rh_ladder {
        let rep = growth::rh_constant(&ctx.phi, &ctx.grid, &ctx.menu, q, &t_samples)?;
        rows.push(vec![
            "rh".to_string(),
            cell(q),
            cell(rep.constant),
            rep.argmax_ball.to_string(),
            cell(rep.argmax_t),
        ]);
        if q.is_finite() {
            rh_curve.push((q, rep.constant));
        }
    }
    sink.csv(
        "weights",
        &["condition", "exponent", "constant", "argmax_ball", "argmax_t"],
        &rows,
    )?;
    // constant-vs-exponent curves; the blow-up knee locates the critical
    // indices, which are never claimed as attained
    sink.data2("ap_curve", &ap_curve)?;
    sink.data2("rh_curve", &rh_curve)?;

    let afnj = growth::check_afnj(&ctx.phi, &ctx.grid, &ctx.menu.nested_pairs(), &ctx.cache)?;
    let xs: Vec<usize> = (0..ctx.grid.len()).step_by(ctx.x_stride.max(1)).collect();
    let probe = growth::type_exponent_probe(
        &ctx.phi,
        &ctx.grid,
        &xs,
        &t_samples,
        &[0.9, 0.5, 0.1, 0.01, 1e-4],
        &[1.1, 2.0, 10.0, 100.0, 1e4],
    )?;
    sink.csv(
        "growth_diagnostics",
        &["afnj_constant", "lower_type_estimate", "upper_type_estimate"],
        &[vec![cell(afnj), cell(probe.lower_estimate), cell(probe.upper_estimate)]],
    )?;
    let summary = json!({
        "ap": ap_curve.iter().map(|(p, c)| json!({"p": p, "constant": c})).collect::<Vec<_>>(),
        "afnj_constant": afnj,
        "lower_type_estimate": probe.lower_estimate,
        "upper_type_estimate": probe.upper_estimate,
    });
    sink.json("weights_summary", &summary)?;
    Ok(summary)
}

fn task_kernel_check(ctx: &Context, sink: &mut ReportSink) -> Result<serde_json::Value> {
    let f = corpus::single_mode(&ctx.grid)?;
    let mut rows = Vec::new();
    let mut worst_composition: f64 = 0.0;
    for &r in ctx.menu.radii() {
        let t = ctx.kernel.time_for_radius(r);
        for s in [t, 2.0 * t] {
            if ctx.kernel.scale(t + s) > ctx.grid.side_length() / 4.0 {
                continue;
            }
            let check = semigroup::semigroup_check(&ctx.kernel, &f, t, s)?;
            worst_composition = worst_composition.max(check.composition_error);
            rows.push(vec![
                ctx.kernel.kind_name().to_string(),
                cell(check.t),
                cell(check.s),
                cell(check.composition_error),
                cell(check.mass_error),
            ]);
        }
    }
    sink.csv(
        "kernel_check",
        &["kind", "t", "s", "composition_error", "mass_error"],
        &rows,
    )?;

    let mut lb_rows = Vec::new();
    for &r in ctx.menu.radii() {
        let t = ctx.kernel.time_for_radius(r);
        let c = semigroup::lower_bound_check(&ctx.kernel, &ctx.grid, t)?;
        lb_rows.push(vec![ctx.kernel.kind_name().to_string(), cell(t), cell(c)]);
    }
    sink.csv("kernel_lower_bound", &["kind", "t", "constant"], &lb_rows)?;

    let m_required = ctx.kernel.decay_order(ctx.grid.dim());
    let decay = semigroup::decay_admissibility(&ctx.kernel, ctx.grid.dim(), m_required.min(60.0));
    let summary = json!({
        "kind": ctx.kernel.kind_name(),
        "worst_composition_error": worst_composition,
        "decay_pass": decay.pass,
        "decay_boundary": if decay.boundary.is_finite() { json!(decay.boundary) } else { json!("unbounded") },
    });
    sink.json("kernel_check_summary", &summary)?;
    Ok(summary)
}

/// Detailed per-ball report for one function: one CSV row per (seminorm
/// kind, ball) and a summary row per kind.
fn task_bmo(ctx: &Context, sink: &mut ReportSink) -> Result<serde_json::Value> {
    let selector = ctx.config.task.function.as_deref().unwrap_or("log_profile");
    let f = ctx.function(selector)?;
    let p_tildes = ctx.config.task.p_tildes.clone().unwrap_or_else(|| vec![1.0, 2.0]);

    let mut reports = vec![
        bmo::bmo_phi(&f, &ctx.phi, &ctx.menu, &ctx.cache)?,
        bmo::bmo_phi_a(&f, &ctx.phi, &ctx.kernel, &ctx.menu, &ctx.cache)?,
    ];
    for &p in &p_tildes {
        reports.push(bmo::bmo_phi_a_p(&f, &ctx.phi, &ctx.kernel, &ctx.menu, p, &ctx.cache)?);
        reports.push(bmo::bmo_tilde_p(&f, &ctx.phi, &ctx.kernel, &ctx.menu, p, &ctx.cache)?);
    }
    let ts: Vec<f64> = ctx
        .menu
        .radii()
        .iter()
        .map(|&r| ctx.kernel.time_for_radius(r))
        .collect();
    let maxv = bmo::bmo_phi_a_max(&f, &ctx.phi, &ctx.kernel, &ts, ctx.x_stride, &ctx.cache)?;

    let mut ball_rows = Vec::new();
    for rep in &reports {
        let p_label = rep.p_tilde.map(cell).unwrap_or_default();
        for (bi, ball) in ctx.menu.balls().iter().enumerate() {
            let c = ball.center(&ctx.grid);
            ball_rows.push(vec![
                rep.kind.name().to_string(),
                p_label.clone(),
                bi.to_string(),
                cell(c[0]),
                cell(c[1]),
                cell(ball.radius),
                cell(rep.contributions[bi]),
            ]);
        }
    }
    sink.csv(
        "bmo_balls",
        &["seminorm", "p_tilde", "ball", "center_x", "center_y", "radius", "contribution"],
        &ball_rows,
    )?;

    let mut summary_rows = Vec::new();
    let mut summary = serde_json::Map::new();
    summary.insert("function".into(), json!(selector));
    for rep in reports.iter().chain(std::iter::once(&maxv)) {
        let p_label = rep.p_tilde.map(cell).unwrap_or_default();
        summary_rows.push(vec![
            rep.kind.name().to_string(),
            p_label,
            cell(rep.value),
            rep.argmax.to_string(),
        ]);
        let key = match rep.p_tilde {
            Some(p) => format!("{}_{p}", rep.kind.name()),
            None => rep.kind.name().to_string(),
        };
        summary.insert(key, json!(rep.value));
    }
    sink.csv(
        "bmo_summary",
        &["seminorm", "p_tilde", "value", "argmax"],
        &summary_rows,
    )?;
    let summary = serde_json::Value::Object(summary);
    sink.json("bmo_summary", &summary)?;
    Ok(summary)
}

fn task_jn(ctx: &Context, sink: &mut ReportSink) -> Result<serde_json::Value> {
    let selector = ctx.config.task.function.as_deref().unwrap_or("log_profile");
    let f = ctx.function(selector)?;
    let seminorm = bmo::bmo_phi_a(&f, &ctx.phi, &ctx.kernel, &ctx.menu, &ctx.cache)?;
    if seminorm.value <= 1e-12 {
        return Err(Error::numerical(
            "jn",
            format!("function {selector} has zero kernel seminorm"),
        ));
    }
    let lambda_points = ctx.config.task.lambda_points.unwrap_or(40);
    let mut fit_rows = Vec::new();
    let mut c2_values = Vec::new();
    for (bi, ball) in ctx.menu.balls().iter().enumerate() {
        let norm = luxembourg::indicator_norm(&ctx.phi, &ctx.grid, ball, &ctx.cache)?;
        let mu = crate::grid::ball_measure(&ctx.grid, ball)?;
        let s_bar = norm * seminorm.value / mu;
        let lambda_grid = carleson::geometric_grid(0.1 * s_bar, 20.0 * s_bar, lambda_points);
        let curve = jn::jn_distribution(
            &f,
            &ctx.phi,
            &ctx.kernel,
            ball,
            &lambda_grid,
            seminorm.value,
            &ctx.cache,
        )?;
        let pairs: Vec<(f64, f64)> = curve
            .lambdas
            .iter()
            .zip(&curve.measures)
            .map(|(&l, &m)| (l, m))
            .collect();
        let curve_rows: Vec<Vec<String>> =
            pairs.iter().map(|&(l, m)| vec![cell(l), cell(m)]).collect();
        sink.csv(&format!("jn_curve_{bi:03}"), &["lambda", "measure"], &curve_rows)?;
        sink.data2(&format!("jn_curve_{bi:03}"), &pairs)?;
        match jn::fit_exponential(&curve) {
            Ok(fit) => {
                // downward sweep for an admissible exponential-moment
                // coefficient, starting from the proof choice c2/2
                let mut lam = fit.c2 / 2.0;
                let mut attained = None;
                for _ in 0..12 {
                    match jn::exp_integrability(
                        &f,
                        &ctx.phi,
                        &ctx.kernel,
                        ball,
                        lam,
                        seminorm.value,
                        &ctx.cache,
                    ) {
                        Ok(v) if v < 1e6 => {
                            attained = Some((lam, v));
                            break;
                        }
                        _ => lam *= 0.5,
                    }
                }
                c2_values.push(fit.c2);
                let (lam_adm, c_att) = attained.unwrap_or((f64::NAN, f64::NAN));
                fit_rows.push(vec![
                    bi.to_string(),
                    cell(ball.radius),
                    cell(fit.c1),
                    cell(fit.c2),
                    cell(fit.r_squared),
                    cell(lam_adm),
                    cell(c_att),
                ]);
            }
            Err(_) => {
                fit_rows.push(vec![
                    bi.to_string(),
                    cell(ball.radius),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                ]);
            }
        }
    }
    sink.csv(
        "jn_summary",
        &["ball", "radius", "c1", "c2", "r_squared", "lambda_admissible", "attained_c"],
        &fit_rows,
    )?;

    // weighted variant on the largest menu ball, with a polynomial tail
    // fit when the declared Muckenhoupt exponent exceeds 1
    let ball0 = &ctx.menu.balls()[0];
    let norm0 = luxembourg::indicator_norm(&ctx.phi, &ctx.grid, ball0, &ctx.cache)?;
    let s_bar0 = norm0 * seminorm.value;
    let lambda_grid = carleson::geometric_grid(0.01 * s_bar0, 100.0 * s_bar0, lambda_points);
    let wcurve = jn::jn_weighted_distribution(
        &f,
        &ctx.phi,
        &ctx.kernel,
        ball0,
        &lambda_grid,
        seminorm.value,
        &ctx.cache,
    )?;
    let wpairs: Vec<(f64, f64)> = wcurve
        .lambdas
        .iter()
        .zip(&wcurve.measures)
        .map(|(&l, &m)| (l, m))
        .collect();
    sink.data2("jn_weighted_curve", &wpairs)?;
    let p1 = ctx.phi.ap_exponent();
    let poly = if p1 > 1.0 {
        let p1_prime = p1 / (p1 - 1.0);
        jn::fit_polynomial_tail(&wcurve, p1_prime).ok()
    } else {
        None
    };

    c2_values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median_c2 = if c2_values.is_empty() {
        f64::NAN
    } else {
        c2_values[c2_values.len() / 2]
    };
    let summary = json!({
        "function": selector,
        "kernel_seminorm": seminorm.value,
        "median_c2": median_c2,
        "balls_fitted": c2_values.len(),
        "weighted_tail": poly.map(|p| json!({
            "slope": p.slope,
            "r_squared": p.r_squared,
            "exponential_dominated": p.exponential_dominated,
        })),
    });
    sink.json("jn_summary", &summary)?;
    Ok(summary)
}

fn task_carleson(ctx: &Context, sink: &mut ReportSink) -> Result<serde_json::Value> {
    let t_grid = ctx.t_grid();
    let poisson = KernelOp::poisson();
    let mut rows = Vec::new();
    let mut summary = serde_json::Map::new();
    for (name, f) in ctx.corpus()? {
        if name == "constant" {
            continue;
        }
        let rep = carleson::phi_carleson_norm(&f, &ctx.phi, &poisson, &ctx.menu, &t_grid, &ctx.cache)?;
        let fine_grid = carleson::geometric_grid(t_grid[0], *t_grid.last().unwrap(), 2 * t_grid.len());
        let fine = carleson::phi_carleson_norm(&f, &ctx.phi, &poisson, &ctx.menu, &fine_grid, &ctx.cache)?;
        let drift = (rep.value - fine.value).abs() / fine.value.max(1e-300);
        let gfun = carleson::g_function(&f, &poisson, &t_grid)?;
        let g_ratio = gfun.l2_norm() / f.l2_norm().max(1e-300);
        let kernel_val = bmo::bmo_phi_a(&f, &ctx.phi, &poisson, &ctx.menu, &ctx.cache)?.value;

        // plot-ready (t, value) profile of the derivative field
        let profile: Vec<(f64, f64)> = t_grid
            .iter()
            .map(|&t| {
                carleson::lp_derivative_field(&f, &poisson, t).map(|fld| (t, fld.l2_norm()))
            })
            .collect::<Result<Vec<_>>>()?;
        sink.data2(&format!("field_l2_{name}"), &profile)?;
        rows.push(vec![
            name.clone(),
            cell(rep.value),
            cell(drift),
            cell(g_ratio),
            cell(kernel_val),
            rep.argmax_ball.to_string(),
        ]);
        summary.insert(
            name,
            json!({
                "carleson": rep.value,
                "quadrature_drift": drift,
                "g_l2_ratio": g_ratio,
                "kernel_seminorm": kernel_val,
            }),
        );
    }
    sink.csv(
        "carleson",
        &["function", "carleson_norm", "quadrature_drift", "g_l2_ratio", "kernel_seminorm", "argmax_ball"],
        &rows,
    )?;
    let summary = serde_json::Value::Object(summary);
    sink.json("carleson_summary", &summary)?;
    Ok(summary)
}

fn task_equiv(ctx: &Context, sink: &mut ReportSink) -> Result<serde_json::Value> {
    let t_grid = ctx.t_grid();
    let corpus: Vec<(String, GridFunction)> = ctx
        .corpus()?
        .into_iter()
        .filter(|(n, _)| n != "constant")
        .collect();
    let report = carleson::equivalence_report(
        &corpus,
        &ctx.phi,
        &ctx.menu,
        &t_grid,
        ctx.x_stride,
        &ctx.cache,
    )?;
    let mut rows = Vec::new();
    for r in &report.rows {
        rows.push(vec![
            r.name.clone(),
            cell(r.classical),
            cell(r.kernel_poisson),
            cell(r.kernel_heat),
            cell(r.kernel_max_poisson),
            cell(r.kernel_p2_poisson),
            cell(r.tilde_p2_poisson),
            cell(r.wb_c1),
            cell(r.wb_c2),
            cell(r.wb_c3),
            cell(r.carleson),
        ]);
    }
    sink.csv(
        "equiv_seminorms",
        &[
            "function",
            "classical",
            "kernel_poisson",
            "kernel_heat",
            "kernel_max_poisson",
            "kernel_p2_poisson",
            "tilde_p2_poisson",
            "wb_c1",
            "wb_c2",
            "wb_c3",
            "carleson",
        ],
        &rows,
    )?;
    let ratio_rows: Vec<Vec<String>> = report
        .windows
        .iter()
        .map(|w| {
            vec![
                w.numerator.to_string(),
                w.denominator.to_string(),
                cell(w.min),
                cell(w.max),
            ]
        })
        .collect();
    sink.csv(
        "equiv_ratios",
        &["numerator", "denominator", "min", "max"],
        &ratio_rows,
    )?;
    let summary = json!({
        "members": report.rows.iter().map(|r| &r.name).collect::<Vec<_>>(),
        "windows": report.windows.iter().map(|w| json!({
            "ratio": format!("{}/{}", w.numerator, w.denominator),
            "min": w.min,
            "max": w.max,
        })).collect::<Vec<_>>(),
    });
    sink.json("equiv_summary", &summary)?;
    Ok(summary)
}

/// Exit code for an error per the CLI contract: 2 for configuration
/// problems, 3 for numerical failures.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::InvalidParameter(_)
        | Error::InvalidGrid(_)
        | Error::InvalidBall(_)
        | Error::Io(_)
        | Error::Csv(_) => 2,
        Error::Numerical { .. } | Error::BracketFailure { .. } | Error::GridMismatch(_) => 3,
    }
}

/// Drift-check helper used by the CLI and acceptance tests: kernel drift
/// ratios for the configured growth/kernel at the smallest menu scale.
pub fn drift_ratios(
    grid: &Arc<Grid>,
    f: &GridFunction,
    phi: &GrowthFunction,
    op: &KernelOp,
    menu: &BallMenu,
    k_ladder: &[f64],
    cache: &NormCache,
) -> Result<Vec<(f64, f64)>> {
    let seminorm = bmo::bmo_phi_a(f, phi, op, menu, cache)?.value;
    let r_small = *menu
        .radii()
        .last()
        .ok_or_else(|| Error::InvalidParameter("empty menu".into()))?;
    let t = op.time_for_radius(r_small);
    bmo::drift_bound_check(f, phi, op, (grid.points_per_side() / 32).max(1), t, k_ladder, seminorm, cache)
}

/// Mean-drift helper with base balls on the smallest menu radius.
pub fn mean_drift_ratios(
    grid: &Arc<Grid>,
    f: &GridFunction,
    phi: &GrowthFunction,
    menu: &BallMenu,
    k_ladder: &[f64],
    cache: &NormCache,
) -> Result<Vec<(f64, f64)>> {
    let classical = bmo::bmo_phi(f, phi, menu, cache)?.value;
    let r_small = *menu
        .radii()
        .last()
        .ok_or_else(|| Error::InvalidParameter("empty menu".into()))?;
    let stride = (grid.points_per_side() / 8).max(1);
    let base: Vec<Ball> = (0..grid.points_per_side())
        .step_by(stride)
        .map(|c| Ball::new(grid, c, r_small))
        .collect::<Result<Vec<_>>>()?;
    bmo::mean_drift_check(f, phi, &base, k_ladder, classical, cache)
}
