use std::fs;
use std::path::Path;
use std::sync::Arc;

use lclab::bm_verify::{bm_batch, bm_check, concavity_exponent_scan, exponent_rows, parse_exponent, random_triples, BMOptions, Verdict};
use lclab::bodies::ConvexBody;
use lclab::calculus::{
    asplund, asplund_self_identity, dilate, entropy, epi_convergence_check, first_variation, inf_convolution, legendre,
    main_inequality_chain, moreau, EntropyMethod, GridFunction, GridHeader, GridKind,
};
use lclab::catalog::Catalog;
use lclab::densities::{Family, LogConcaveDensity};
use lclab::level_sets::{ball_containment_check, grad_sq_window_integral, gradient_window, markov_set, mass_bound_check};
use lclab::perimeter::{
    cauchy_projection_avg, coarea_integral, default_sweep, generalized_coarea_check, max_perimeter_scan, moment_measure,
    mu_perimeter, projection_l1_avg, psi_g_log_concavity, radial_identities, surface_measure_pair, truncated_surface_pair,
    CoareaMethod, PerimeterMethod,
};
use lclab::sampler::{estimate_functional_perimeter, SamplerConfig};
use lclab::special::unit_ball_volume;
use lclab::MCEstimate;
use serde_json::json;

use crate::args::{CalcOp, CoareaKind, Command, Common, LevelCheck};
use crate::error::{CliError, CliResult};
use crate::report::{pretty, Bound, Report, Row};
use crate::suite::run_suite;

pub struct Ctx {
    pub catalog: Catalog,
}

impl Ctx {
    pub fn measure(&self, c: &Common) -> CliResult<LogConcaveDensity> {
        Ok(self.catalog.measure(&c.measure, c.n)?)
    }

    pub fn body(&self, spec: &str, n: usize) -> CliResult<ConvexBody<f64>> {
        Ok(self.catalog.body(spec, n)?)
    }
}

pub fn three_se(e: &MCEstimate) -> f64 {
    3.0 * e.std_error
}

/// `S(K)/(n vol K)` for a norm-exponential measure.
pub fn identity_value(mu: &LogConcaveDensity) -> Option<f64> {
    match mu.family() {
        Family::NormExponential { body, .. } => Some(body.surface_exact().ok()? / (mu.dim() as f64 * body.volume_exact().ok()?)),
        _ => None,
    }
}

fn is_radial(mu: &LogConcaveDensity) -> bool {
    matches!(mu.family(), Family::Gaussian { .. } | Family::Radial { .. })
}

pub fn run(ctx: &Ctx, cmd: &Command) -> CliResult<Report> {
    match cmd {
        Command::Perimeter { common } => perimeter(ctx, common),
        Command::Coarea { common, method, half_width, resolution } => coarea(ctx, common, *method, *half_width, *resolution),
        Command::MomentMeasure { common, keep } => moment(ctx, common, *keep),
        Command::Projections { common, rotations } => projections(ctx, common, *rotations),
        Command::Radial { common, p_max, steps } => radial(ctx, common, *p_max, *steps),
        Command::Levelset { common, check, trials } => levelset(ctx, common, *check, *trials),
        Command::Calculus { common, op, input, input2, half_width, resolution, point } => {
            calculus(ctx, common, *op, input.as_deref(), input2.as_deref(), *half_width, *resolution, point)
        }
        Command::BmCheck { common, bodies, triples, scan } => bm(ctx, common, bodies, *triples, *scan),
        Command::MaxPerimeter { common } => max_perimeter(ctx, common),
        Command::Suite { common } => run_suite(ctx, common),
        Command::Replay { .. } => Err(CliError::usage("replay cannot be nested")),
    }
}

fn perimeter(ctx: &Ctx, c: &Common) -> CliResult<Report> {
    let mu = ctx.measure(c)?;
    let cfg = SamplerConfig::auto(&mu, c.seed);
    let n = c.n;
    let nf = n as f64;
    let mut r = Report::default();
    if let Some(spec) = &c.body {
        let body = ctx.body(spec, n)?;
        let method = if matches!(body, ConvexBody::Oracle(_)) { PerimeterMethod::Epsilon } else { PerimeterMethod::Boundary };
        let p = mu_perimeter(&mu, &body, method, c.samples, &cfg)?;
        let cap = coarea_integral(&mu, CoareaMethod::Exact, c.seed).ok().map(|x| x.value);
        r.rows.push(Row::new(n, "boundary_measure", &p.estimate, cap.map(|x| x.value)));
        if let Some(cap) = cap {
            let holds = p.estimate.value <= cap.value + three_se(&p.estimate) + three_se(&cap);
            r.bounds.push(Bound::new(
                "boundary measure at most the co-area integral",
                holds,
                format!("{:.6} vs cap {:.6}", p.estimate.value, cap.value),
            ));
        }
        r.result = json!({ "measure": mu.name(), "body": body.variant_name(), "perimeter": p, "coarea_cap": cap });
        return Ok(r);
    }
    let rep = estimate_functional_perimeter(&mu, c.samples, &cfg)?;
    let e = rep.estimate;
    r.rows.push(Row::new(n, "functional_perimeter", &e, Some(12.0 * nf)));
    if mu.is_isotropic() {
        r.bounds.push(Bound::new("linear upper bound 12n", e.value <= 12.0 * nf, format!("{:.6} vs {}", e.value, 12.0 * nf)));
    }
    let exact = identity_value(&mu);
    if let Some(x) = exact {
        r.rows.push(Row::new(n, "functional_perimeter_identity", &e, Some(x)));
        r.bounds.push(Bound::new(
            "perimeter equals S(K)/(n vol K)",
            (e.value - x).abs() <= three_se(&e) + 1e-12 * x,
            format!("{:.6} vs {x:.6}, SE {:.2e}", e.value, e.std_error),
        ));
    }
    if is_radial(&mu) && mu.is_isotropic() {
        let b = (nf + 1.0).sqrt();
        r.rows.push(Row::new(n, "functional_perimeter_radial", &e, Some(b)));
        r.bounds.push(Bound::new("radial bound sqrt(n+1)", e.value <= b + three_se(&e) + 1e-12 * b, format!("{:.6} vs {b:.6}", e.value)));
    }
    let mut truncated = None;
    if let (Some(t), Some(x)) = (c.t, exact) {
        let pair = truncated_surface_pair(&mu, t, c.seed)?;
        let tr = LogConcaveDensity::truncate_norm_ball(Arc::new(mu.clone()), t)?;
        let et = estimate_functional_perimeter(&tr, c.samples, &SamplerConfig::auto(&tr, c.seed))?.estimate;
        r.rows.push(Row::new(n, "truncated_functional_perimeter", &et, Some(x)));
        r.bounds.push(Bound::new(
            "truncated perimeter is independent of t",
            (et.value - x).abs() <= three_se(&et) + 1e-12 * x,
            format!("t = {t}: {:.6} vs {x:.6}", et.value),
        ));
        truncated = Some(json!({ "t": t, "estimate": et, "surface_pair": pair, "pair_total": pair.total() }));
    }
    r.result = json!({ "measure": mu.name(), "perimeter": rep, "identity_value": exact, "truncated": truncated });
    Ok(r)
}

fn coarea(ctx: &Ctx, c: &Common, method: CoareaKind, half_width: f64, resolution: usize) -> CliResult<Report> {
    let mu = ctx.measure(c)?;
    let n = c.n;
    let mut r = Report::default();
    if let Some(spec) = &c.body {
        let body = ctx.body(spec, n)?;
        let g = generalized_coarea_check(&mu, Some(&body), half_width, resolution, c.seed)?;
        let rhs = g.gradient_integral + g.boundary_integral.value;
        r.rows.push(Row::exact(n, "truncated_coarea", g.coarea, Some(rhs)));
        r.bounds.push(Bound::new(
            "truncated co-area identity",
            g.holds,
            format!("{:.6} vs {rhs:.6} within {:.2e}", g.coarea, g.tolerance),
        ));
        r.result = json!({ "measure": mu.name(), "body": body.variant_name(), "check": g });
        return Ok(r);
    }
    let m = match method {
        CoareaKind::Exact => CoareaMethod::Exact,
        CoareaKind::Grid => CoareaMethod::Grid { half_width, resolution },
    };
    let res = coarea_integral(&mu, m, c.seed)?;
    r.rows.push(Row::new(n, "coarea", &res.value, None));
    let mut perimeter = None;
    if mu.essentially_continuous() {
        let p = estimate_functional_perimeter(&mu, c.samples, &SamplerConfig::auto(&mu, c.seed))?.estimate;
        r.rows.push(Row::new(n, "functional_perimeter", &p, Some(res.value.value)));
        // first-order grid error is about twice the gap to the halved step
        let tol = 3.0 * p.std_error.hypot(res.value.std_error) + 2.0 * res.refinement_gap.unwrap_or(0.0) + 1e-10 * res.value.value.abs();
        r.bounds.push(Bound::new(
            "co-area integral equals the functional perimeter",
            (p.value - res.value.value).abs() <= tol,
            format!("{:.6} vs {:.6}", res.value.value, p.value),
        ));
        perimeter = Some(p);
    }
    r.result = json!({ "measure": mu.name(), "coarea": res, "functional_perimeter": perimeter });
    Ok(r)
}

fn moment(ctx: &Ctx, c: &Common, keep: usize) -> CliResult<Report> {
    let mu = ctx.measure(c)?;
    let cfg = SamplerConfig::auto(&mu, c.seed);
    let n = c.n;
    let mm = moment_measure(&mu, c.samples, &cfg, keep)?;
    let pair = surface_measure_pair(&mu, c.samples, &cfg)?;
    let mut r = Report::default();
    r.rows.push(Row::new(n, "first_moment", &mm.first_moment, None));
    for (i, b) in mm.barycenter.iter().enumerate() {
        r.rows.push(Row::new(n, format!("barycenter_{i}"), b, Some(0.0)));
    }
    r.rows.push(Row::exact(n, "boundary_part", pair.boundary_part, None));
    r.bounds.push(Bound::new(
        "surface-measure parts are nonnegative",
        pair.moment_part.value >= 0.0 && pair.boundary_part >= 0.0,
        format!("moment {:.6}, boundary {:.6}", pair.moment_part.value, pair.boundary_part),
    ));
    if mu.essentially_continuous() {
        r.bounds.push(Bound::new("no boundary part for positive densities", pair.boundary_part == 0.0, format!("{}", pair.boundary_part)));
    }
    let z: Vec<f64> = mm.barycenter.iter().map(|b| if b.std_error > 0.0 { b.value / b.std_error } else { 0.0 }).collect();
    r.result = json!({ "measure": mu.name(), "moment_measure": mm, "barycenter_z": z, "surface_pair": pair, "total": pair.total() });
    Ok(r)
}

fn projections(ctx: &Ctx, c: &Common, rotations: usize) -> CliResult<Report> {
    let n = c.n;
    let mut r = Report::default();
    if let Some(spec) = &c.body {
        let body = ctx.body(spec, n)?;
        let rep = cauchy_projection_avg(&body, rotations, c.seed)?;
        let exact_mean = rep.exact_surface.map(|s| s * unit_ball_volume(n - 1) / (n as f64 * unit_ball_volume(n)));
        r.rows.push(Row::new(n, "mean_projection", &rep.mean_projection, exact_mean));
        if let Some(x) = exact_mean {
            r.bounds.push(Bound::new(
                "mean projection matches the surface area",
                rep.mean_projection.within(x, 3.0),
                format!("{:.6} vs {x:.6}", rep.mean_projection.value),
            ));
        }
        r.result = json!({ "body": body.variant_name(), "cauchy": rep, "exact_mean_projection": exact_mean });
        return Ok(r);
    }
    let mu = ctx.measure(c)?;
    let rep = projection_l1_avg(&mu, rotations, c.seed)?;
    r.rows.push(Row::new(n, "projection_l1_avg", &rep.estimate, rep.coarea_relation));
    r.rows.push(Row::exact(n, "projection_l1_avg_per_sqrt_n", rep.per_sqrt_n, Some(4.0)));
    r.bounds.push(Bound::new("projection average at most 4 sqrt(n)", rep.per_sqrt_n <= 4.0, format!("{:.6}", rep.per_sqrt_n)));
    r.result = json!({ "measure": mu.name(), "projections": rep });
    Ok(r)
}

fn radial(ctx: &Ctx, c: &Common, p_max: f64, steps: usize) -> CliResult<Report> {
    let mu = ctx.measure(c)?;
    let n = c.n;
    let ids = radial_identities(&mu)?;
    let lc = match mu.family() {
        Family::Gaussian { variance } => {
            let v = *variance;
            psi_g_log_concavity(move |r| 0.5 * r * r / v, p_max, steps, 1e-8)?
        }
        Family::Radial { profile, .. } => psi_g_log_concavity(|r| profile.g(r), p_max, steps, 1e-8)?,
        _ => return Err(lclab::LcError::UnsupportedVariant(format!("{} is not radial", mu.name())).into()),
    };
    let mut r = Report::default();
    r.rows.push(Row::exact(n, "radial_perimeter", ids.perimeter, Some(ids.bound)));
    r.rows.push(Row::exact(n, "psi_g_max_second_difference", lc.max_second_difference, Some(lc.slack)));
    r.bounds.push(Bound::new("radial bound sqrt(n+1)", ids.holds, format!("{:.6} vs {:.6}", ids.perimeter, ids.bound)));
    r.bounds.push(Bound::new("radial moment function is log-concave", lc.holds, format!("max second difference {:.2e}", lc.max_second_difference)));
    r.result = json!({ "measure": mu.name(), "identities": ids, "log_concavity": lc });
    Ok(r)
}

fn levelset(ctx: &Ctx, c: &Common, check: LevelCheck, trials: usize) -> CliResult<Report> {
    let mu = Arc::new(ctx.measure(c)?);
    let cfg = SamplerConfig::auto(&mu, c.seed);
    let n = c.n;
    let nf = n as f64;
    let t = c.t.unwrap_or(3.0 * nf);
    let mut r = Report::default();
    match check {
        LevelCheck::Mass => {
            let m = mass_bound_check(mu.clone(), t, c.samples, &cfg)?;
            let bound = if m.headline_applies { m.paper_bound.max(m.intermediate_bound) } else { m.intermediate_bound };
            r.rows.push(Row::new(n, "level_set_mass", &m.mass, Some(bound)));
            r.bounds.push(Bound::new("level-set mass lower bound", m.holds, format!("t = {t}: {:.6} vs {bound:.6}", m.mass.value)));
            r.result = json!({ "measure": mu.name(), "mass": m });
        }
        LevelCheck::Ball => {
            let b = ball_containment_check(mu.clone(), t, trials, c.seed)?;
            r.rows.push(Row::exact(n, "min_boundary_radius", b.min_boundary_radius, Some(1.0 / 3.0)));
            if !b.outside_hypothesis {
                r.bounds.push(Bound::new("level set contains B/3", b.holds, format!("max potential gap {:.4} vs t = {t}", b.max_potential_gap)));
            }
            r.result = json!({ "measure": mu.name(), "ball": b });
        }
        LevelCheck::Window => {
            let w = gradient_window(mu.clone(), c.samples, &cfg)?;
            let sq = grad_sq_window_integral(mu.clone(), c.samples, &cfg)?;
            r.rows.push(Row::new(n, "window_mass", &w.mass, Some(w.mass_bound)));
            r.rows.push(Row::exact(n, "window_max_gradient", w.max_gradient, Some(w.gradient_bound)));
            r.rows.push(Row::new(n, "window_grad_sq", &sq.estimate, Some(sq.bound)));
            if !w.outside_hypothesis {
                r.bounds.push(Bound::new("window mass lower bound", w.mass_ok, format!("{:.6} vs {:.6}", w.mass.value, w.mass_bound)));
                r.bounds.push(Bound::new("window gradient at most 9n^2", w.gradient_ok, format!("{:.4} vs {}", w.max_gradient, w.gradient_bound)));
                r.bounds.push(Bound::new("window squared gradient bound", sq.holds, format!("{:.4} vs {:.4}", sq.estimate.value, sq.bound)));
            }
            r.result = json!({ "measure": mu.name(), "window": w, "grad_sq": sq });
        }
        LevelCheck::Markov => {
            let m = markov_set(mu.clone(), c.t, c.samples, &cfg, trials)?;
            r.rows.push(Row::new(n, "markov_mass", &m.mass, Some(0.5)));
            if c.t.is_none() {
                r.bounds.push(Bound::new("Markov set has mass at least 1/2", m.mass_ok, format!("{:.6}", m.mass.value)));
            }
            r.result = json!({ "measure": mu.name(), "markov": m, "convex_witnessed": m.convexity.is_convex_witnessed() });
        }
    }
    Ok(r)
}

fn load_grid(path: &Path) -> CliResult<GridFunction<f64>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let header: GridHeader = serde_json::from_str(&text)?;
    let bin = path.with_extension("bin");
    let bytes = fs::read(&bin).map_err(|e| CliError::io(&bin, e))?;
    Ok(GridFunction::from_le_bytes(&header, &bytes)?)
}

fn grid_files(g: &GridFunction<f64>) -> CliResult<Vec<(String, Vec<u8>)>> {
    Ok(vec![("grid.json".into(), pretty(&serde_json::to_value(g.header())?)?), ("grid.bin".into(), g.to_le_bytes())])
}

fn require_input(p: Option<&Path>, flag: &str) -> CliResult<GridFunction<f64>> {
    load_grid(p.ok_or_else(|| CliError::usage(format!("this operation needs {flag}")))?)
}

#[allow(clippy::too_many_arguments)]
fn calculus(
    ctx: &Ctx,
    c: &Common,
    op: CalcOp,
    input: Option<&Path>,
    input2: Option<&Path>,
    half_width: f64,
    resolution: usize,
    point: &[f64],
) -> CliResult<Report> {
    let n = c.n;
    let mut r = Report::default();
    let transformed = |g: GridFunction<f64>, r: &mut Report| -> CliResult<()> {
        r.result = json!({ "op": op, "header": g.header(), "finite_nodes": g.values().iter().filter(|v| v.is_finite()).count() });
        r.files = grid_files(&g)?;
        Ok(())
    };
    match op {
        CalcOp::Export => {
            let mu = ctx.measure(c)?;
            let g = GridFunction::from_fn(n, half_width, resolution, GridKind::Potential, |x| mu.psi(x))?;
            transformed(g, &mut r)?;
        }
        CalcOp::Legendre => transformed(legendre(&require_input(input, "--input")?)?, &mut r)?,
        CalcOp::InfConv => transformed(inf_convolution(&require_input(input, "--input")?, &require_input(input2, "--input2")?)?, &mut r)?,
        CalcOp::Asplund => transformed(asplund(&require_input(input, "--input")?, &require_input(input2, "--input2")?)?, &mut r)?,
        CalcOp::Dilate => {
            let t = c.t.ok_or_else(|| CliError::usage("dilate needs --t"))?;
            transformed(dilate(&require_input(input, "--input")?, t)?, &mut r)?;
        }
        CalcOp::SelfIdentity => {
            let mu = ctx.measure(c)?;
            let t = c.t.unwrap_or(1.0);
            let rep = asplund_self_identity(|x: &[f64]| mu.psi(x), n, half_width, resolution, t)?;
            r.rows.push(Row::exact(n, "asplund_self_identity_deviation", rep.max_deviation, Some(5.0 * rep.step)));
            r.bounds.push(Bound::new(
                "Asplund self-identity within 5 grid steps",
                rep.max_deviation < 5.0 * rep.step,
                format!("{:.3e} vs h = {:.3e}", rep.max_deviation, rep.step),
            ));
            r.result = json!({ "measure": mu.name(), "t": t, "report": rep });
        }
        CalcOp::Variation => {
            if n != 1 {
                return Err(CliError::usage("variation needs --n 1"));
            }
            let mu = ctx.measure(c)?;
            let psi = |x: f64| mu.psi(&[x]);
            let ts: Vec<f64> = lclab::calculus::variation::default_ts();
            let v = first_variation(psi, psi, &ts)?;
            let w = half_width.max(60.0);
            let h = entropy(&mu, &EntropyMethod::Quadrature { half_widths: vec![w], resolution: 400_001 })?;
            let target = 1.0 + h.value;
            r.rows.push(Row::exact(n, "first_variation", v.value, Some(target)));
            r.bounds.push(Bound::new(
                "first variation equals 1 + entropy",
                (v.value - target).abs() < 1e-3,
                format!("{:.6} vs {target:.6}", v.value),
            ));
            r.result = json!({ "measure": mu.name(), "variation": v, "entropy": h });
        }
        CalcOp::Moreau => {
            let mu = ctx.measure(c)?;
            if point.len() != n {
                return Err(CliError::usage(format!("--point needs {n} comma-separated coordinates")));
            }
            let p = moreau(|y: &[f64]| mu.psi(y), c.lambda, point)?;
            r.result = json!({ "measure": mu.name(), "lambda": c.lambda, "point": point, "psi": mu.psi(point), "envelope": p });
        }
        CalcOp::Epi => {
            let mu = ctx.measure(c)?;
            let lambdas: Vec<f64> = (1..=40).map(|k| 0.5f64.powi(k)).collect();
            let mut pts = vec![vec![0.0; n]];
            for i in 0..n {
                let mut e = vec![0.0; n];
                e[i] = 0.5;
                pts.push(e);
            }
            let rep = epi_convergence_check(|y: &[f64]| mu.psi(y), &lambdas, &pts, 1e-6)?;
            r.bounds.push(Bound::new("Moreau envelopes epi-converge", rep.clean(), rep.violations.join("; ")));
            r.result = json!({ "measure": mu.name(), "epi": rep });
        }
        CalcOp::MainChain => {
            let mu = ctx.measure(c)?;
            let rep = main_inequality_chain(&mu, c.samples, &SamplerConfig::auto(&mu, c.seed))?;
            r.rows.push(Row::new(n, "main_chain_slack", &rep.slack, Some(0.0)));
            if rep.precondition_holds {
                r.bounds.push(Bound::new("entropy-perimeter inequality", rep.holds, format!("slack {:.6}", rep.slack.value)));
            }
            r.result = json!({ "measure": mu.name(), "chain": rep });
        }
    }
    Ok(r)
}

fn bm(ctx: &Ctx, c: &Common, bodies: &[String], triples: usize, scan: bool) -> CliResult<Report> {
    let mu = ctx.measure(c)?;
    let n = c.n;
    let exponent = parse_exponent(&c.exponent, n)?;
    let opts = BMOptions::new(&mu, c.samples, c.seed);
    let results = if bodies.len() == 2 {
        let k = ctx.body(&bodies[0], n)?;
        let l = ctx.body(&bodies[1], n)?;
        vec![bm_check(&mu, &k, &l, c.lambda, exponent, &opts)?]
    } else {
        bm_batch(&mu, &random_triples(n, triples, c.seed)?, exponent, &opts)?
    };
    let mut r = Report::default();
    for (i, res) in results.iter().enumerate() {
        r.rows.push(Row::new(n, format!("margin_{i}"), &MCEstimate { std_error: res.error, ..MCEstimate::exact(res.margin) }, Some(0.0)));
    }
    let count = |v: Verdict| results.iter().filter(|x| x.verdict == v).count();
    let violated = count(Verdict::Violated);
    r.bounds.push(Bound::new(
        format!("dimensional Brunn-Minkowski at c = {exponent:.6}"),
        violated == 0,
        format!("{} holds, {} inconclusive, {violated} violated", count(Verdict::Holds), count(Verdict::Inconclusive)),
    ));
    let scan_report = if scan && bodies.len() != 2 {
        let mut grid: Vec<f64> = (1..=20).map(|k| 0.05 * k as f64).collect();
        grid.extend(exponent_rows(n)?.into_iter().map(|(_, c)| c));
        Some(concavity_exponent_scan(&mu, &random_triples(n, triples, c.seed)?, &grid, &opts)?)
    } else {
        None
    };
    r.result = json!({
        "measure": mu.name(),
        "exponent": exponent,
        "exponent_rows": exponent_rows(n)?.into_iter().map(|(k, v)| json!({ "name": k, "value": v })).collect::<Vec<_>>(),
        "results": results,
        "scan": scan_report,
    });
    Ok(r)
}

fn max_perimeter(ctx: &Ctx, c: &Common) -> CliResult<Report> {
    let mu = ctx.measure(c)?;
    let n = c.n;
    let sweep = default_sweep(n, c.seed)?;
    let scan = max_perimeter_scan(&mu, &sweep, c.samples, &SamplerConfig::auto(&mu, c.seed))?;
    let mut r = Report::default();
    for row in &scan.rows {
        r.rows.push(Row::new(n, &row.label, &row.estimate, Some(scan.coarea_cap.value)));
    }
    r.bounds.push(Bound::new(
        "every boundary measure at most the co-area integral",
        scan.all_below_cap,
        format!("sup {:.6} ({}) vs cap {:.6}", scan.sup.value, scan.rows[scan.argmax].label, scan.coarea_cap.value),
    ));
    r.result = json!({ "measure": mu.name(), "scan": scan });
    Ok(r)
}
