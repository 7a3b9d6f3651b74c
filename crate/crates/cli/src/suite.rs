//! Condensed acceptance battery at a single dimension.

use std::sync::Arc;

use lclab::bm_verify::{bm_batch, default_exponent, random_triples, BMOptions, Verdict};
use lclab::bodies::ConvexityVerdict;
use lclab::calculus::{asplund_self_identity, first_variation};
use lclab::catalog::{measure, MEASURE_KEYS};
use lclab::densities::{gradient_moment, LogConcaveDensity};
use lclab::level_sets::{gradient_window, markov_set, mass_bound_check};
use lclab::perimeter::{default_sweep, max_perimeter_scan, projection_l1_avg, sobolev_lower_check};
use lclab::sampler::{estimate_functional_perimeter, SamplerConfig};
use lclab::special::{ln_gamma, unit_ball_volume};
use serde::Serialize;
use serde_json::json;

use crate::args::Common;
use crate::commands::{identity_value, three_se, Ctx};
use crate::error::CliResult;
use crate::report::{Bound, Report, Row};

#[derive(Debug, Serialize)]
struct Item {
    name: &'static str,
    holds: bool,
    /// The stated bound is known not to hold; reported but not asserted.
    known_unattainable: bool,
    detail: String,
}

pub fn run_suite(_ctx: &Ctx, c: &Common) -> CliResult<Report> {
    let n = c.n.max(2);
    let nf = n as f64;
    let count = c.samples;
    let seed = c.seed;
    let cfg = |k: u64| SamplerConfig::exact(seed.wrapping_mul(1000).wrapping_add(k));
    let mut items = Vec::new();
    let mut rows = Vec::new();
    let mut item = |name, holds, known_unattainable, detail: String| items.push(Item { name, holds, known_unattainable, detail });

    let cube = measure("cube-exp", n)?;
    let exact = identity_value(&cube).expect("norm-exponential");
    let e = estimate_functional_perimeter(&cube, count, &cfg(1))?.estimate;
    rows.push(Row::new(n, "cube_exp_perimeter", &e, Some(exact)));
    item("perimeter identity", (e.value - exact).abs() <= three_se(&e) + 1e-12 * exact, false, format!("{:.6} vs {exact:.6}", e.value));

    let b = (nf + 1.0).sqrt();
    let mut radial_ok = true;
    for key in ["gaussian", "radial-exp", "radial-p4"] {
        let e = estimate_functional_perimeter(&measure(key, n)?, count, &cfg(2))?.estimate;
        rows.push(Row::new(n, format!("{key}_perimeter"), &e, Some(b)));
        radial_ok &= e.value <= b + three_se(&e) + 1e-12 * b;
    }
    item("radial bound sqrt(n+1)", radial_ok, false, format!("bound {b:.6}"));

    let mut worst = 0.0f64;
    let mut lower_ok = true;
    for key in MEASURE_KEYS {
        let mu = measure(key, n)?;
        let e = estimate_functional_perimeter(&mu, count, &cfg(3))?.estimate;
        worst = worst.max(e.value / nf);
        if mu.essentially_continuous() {
            let s = sobolev_lower_check(&mu, count, &cfg(4))?;
            lower_ok &= s.lhs.value >= nf * unit_ball_volume(n).powf(1.0 / nf) - three_se(&s.lhs);
        }
    }
    item("linear upper bound 12n", worst <= 12.0, false, format!("max estimate/n = {worst:.4}"));
    item("lower bound n omega_n^(1/n)", lower_ok, true, format!("headline {:.4}", nf * unit_ball_volume(n).powf(1.0 / nf)));

    let closed = |p: f64| {
        let cc = (0.5 * (ln_gamma(3.0 / p) - ln_gamma(1.0 / p))).exp();
        (2.0 * p.ln() + 2.0 * cc.ln() + ln_gamma((2.0 * (p - 1.0) + 1.0) / p) - ln_gamma(1.0 / p)).exp()
    };
    let mut fp_ok = true;
    let seq: Vec<f64> = [1.0, 2.0, 4.0, 8.0, 16.0].iter().map(|&p| closed(p)).collect();
    for p in [1.0, 2.0, 4.0, 8.0, 16.0] {
        let g = gradient_moment(&LogConcaveDensity::product_pexp(1, p)?, 1.0, count, &cfg(5))?;
        fp_ok &= g.within(closed(p), 3.0);
    }
    let increasing = seq.windows(2).all(|w| w[1] > w[0]);
    item("f_p gradient moments increase in p", fp_ok && increasing, true, format!("{seq:.4?}"));

    let g = Arc::new(measure("gaussian", n)?);
    let m = mass_bound_check(g.clone(), 3.0 * nf, count, &cfg(6))?;
    item("level-set mass at t = 3n", m.holds, false, format!("{:.6}", m.mass.value));
    let w = gradient_window(g.clone(), count, &cfg(7))?;
    item("window gradient at most 9n^2", w.gradient_ok, false, format!("{:.4} vs {}", w.max_gradient, w.gradient_bound));

    let si = asplund_self_identity(|x: &[f64]| 0.5 * x[0] * x[0], 1, 8.0, 801, 1.0)?;
    let psi = |x: f64| 0.5 * x * x + 0.5 * (2.0 * std::f64::consts::PI).ln();
    let v = first_variation(psi, psi, &lclab::calculus::variation::default_ts())?;
    let target = 1.0 - 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln();
    item(
        "calculus identities",
        si.max_deviation < 5.0 * si.step && (v.value - target).abs() < 1e-3,
        false,
        format!("self-identity dev/h {:.3}, variation error {:.1e}", si.max_deviation / si.step, (v.value - target).abs()),
    );

    let scan = max_perimeter_scan(&cube, &default_sweep(n, seed)?, (count / 5).max(1000), &cfg(8))?;
    item("boundary measures below co-area cap", scan.all_below_cap, false, format!("sup/n = {:.4}", scan.ratio_to_n));

    let mut proj = 0.0f64;
    for key in ["gaussian", "cube-exp"] {
        proj = proj.max(projection_l1_avg(&measure(key, n)?, 2000, seed)?.per_sqrt_n);
    }
    item("projection average at most 4 sqrt(n)", proj <= 4.0, false, format!("{proj:.4}"));

    let c_n = default_exponent(n)?;
    let res = bm_batch(&g, &random_triples(n, 20, seed)?, c_n, &BMOptions::new(&g, (count / 10).max(1000), seed))?;
    let violated = res.iter().filter(|r| r.verdict == Verdict::Violated).count();
    item("dimensional Brunn-Minkowski", violated == 0, false, format!("{violated} violated of {} at c = {c_n:.5}", res.len()));

    let hyp = Arc::new(LogConcaveDensity::product_hyperbolic(2, 1.0)?);
    let mk = markov_set(hyp, Some(1.0), 50_000, &cfg(9), 10_000)?;
    let witness = matches!(mk.convexity, ConvexityVerdict::NonConvexWitness { .. });
    item("non-convex gradient sublevel set", witness, false, format!("witness found: {witness}"));

    let mut r = Report::default();
    for it in items.iter().filter(|it| !it.known_unattainable) {
        r.bounds.push(Bound::new(it.name, it.holds, it.detail.clone()));
    }
    r.rows = rows;
    r.result = json!({ "n": n, "items": items });
    Ok(r)
}
