use std::path::Path;

use super::report::{AnalysisReport, Output, Status, Table};
use super::{Command, Range, Run, Shape};
use crate::clw::{self, CLW_DEFAULT_A};
use crate::conformal::{ScalingState, CONE_THRESHOLD, SHRINKER_THRESHOLD};
use crate::cp2proof::{self, Axis, GridSpec, ProofParameters, PAPER_WITNESS};
use crate::error::{Error, Result};
use crate::numerics::Interval;
use crate::page::{self, PageClass, PageConfig};
use crate::polytope::{self, DelzantPolygon};
use crate::radial::{self, ConeSpec, LogGrid, RadialTest, RadialVerdict};
use crate::toric::extremal_affine_coefficients;

/// Published bound on the normalized `sup Δs²` for the Page metric.
const PAGE_RATIO_BOUND: f64 = 2.65;
/// Published bound on `12K/κ` for the Chen-LeBrun-Weber metric.
const CLW_RATIO_BOUND: f64 = 2.17;
/// Linear-solve residual below which an extremal solve counts as exact.
const IBP_RESIDUAL_TOL: f64 = 1e-9;
const QUAD_TOL: f64 = 1e-12;

pub(super) fn dispatch(command: &Command) -> Run {
    match command {
        Command::Page { .. } => finish("page", |r| page(r)),
        Command::Clw { a, k_bound, .. } => finish("clw", |r| clw(r, *a, *k_bound)),
        Command::ConeThreshold { n, lambda, .. } => {
            finish("cone-threshold", |r| cone_threshold(r, *n, *lambda))
        }
        Command::Product { n1, n2, .. } => finish("product", |r| product(r, *n1, *n2)),
        Command::Ke { n, h11, .. } => finish("ke", |r| ke(r, *n, *h11)),
        Command::Cp2Check { alpha, beta, eps, search, beta_range, step, .. } => match search {
            Some(range) => finish("cp2-check", |r| cp2_search(r, *range, *beta_range, *eps, *step)),
            None => finish("cp2-check", |r| cp2_point(r, *alpha, *beta, *eps)),
        },
        Command::PolytopeIntegrals { shape, a, facets, .. } => {
            finish("polytope-integrals", |r| polytope_integrals(r, *shape, *a, facets.as_deref()))
        }
    }
}

/// Runs a pipeline, keeping whatever it recorded before a failure.
fn finish(name: &str, body: impl FnOnce(&mut AnalysisReport) -> Result<Option<Table>>) -> Run {
    let mut report = AnalysisReport::new(name);
    match body(&mut report) {
        Ok(table) => Run { report, table, error: None },
        Err(e) => {
            report.verdict("pipeline completed", Status::Failed, None);
            Run { report, table: None, error: Some(e.to_string()) }
        }
    }
}

fn page(r: &mut AnalysisReport) -> Result<Option<Table>> {
    let cfg = PageConfig::default();
    r.input("root_tol", cfg.root_tol)
        .input("samples", cfg.samples)
        .input("quad_tol", cfg.quad_tol)
        .input("fd_step", cfg.fd_step)
        .input("identity_points", cfg.identity_points);
    let an = page::page_full_analysis(&cfg)?;

    r.paper_value("a_star", "critical class a* = 0.31408", an.a_star, 0.31408, 5e-6);
    r.paper_value("inv_a_star", "1/a* = 3.1839", 1.0 / an.a_star, 3.1839, 5e-4);
    r.output("quartic_residual", Output::computed(an.quartic_residual));

    r.output("c1", Output::computed(an.c1)).output("c2", Output::computed(an.c2));
    let s = an.solver.scal;
    r.output("solver_a1", Output::computed(s.a1))
        .output("solver_a2", Output::computed(s.a2))
        .output("solver_b", Output::computed(s.b))
        .output("solver_residual", Output::computed(an.solver.residual));
    let solve_dev = (s.a1 - an.c1).abs().max((s.a2 - an.c1).abs()).max((s.b - an.c2).abs());
    r.check_on(
        "extremal solve reproduces the closed-form scalar curvature",
        solve_dev < 1e-6,
        Some(1e-6 - solve_dev),
        &["c1", "c2", "solver_a1", "solver_a2", "solver_b"],
    );
    r.check_on(
        "integration-by-parts residual below 1e-9",
        an.solver.residual.max(an.solver.max_closure()) < IBP_RESIDUAL_TOL,
        Some(IBP_RESIDUAL_TOL - an.solver.residual.max(an.solver.max_closure())),
        &["solver_residual"],
    );

    r.paper_value("kappa_closed_form", "κ = 182.219 (closed form)", an.kappa, 182.219, 1e-2);
    r.paper_value("kappa_identity", "κ = 182.219 (s³ + 6sΔs − 12|∇s|²)", an.kappa_identity, 182.219, 1e-2);
    r.paper_value("kappa_volume", "κ = 182.219 (4Λ from the volume)", an.kappa_from_volume, 182.219, 1e-2);
    r.output("kappa_identity_spread", Output::computed(an.kappa_identity_spread))
        .output("kappa_t_derivative", Output::computed(an.kappa_t_derivative));
    let kappas = [an.kappa, an.kappa_identity, an.kappa_from_volume];
    let spread = kappas.iter().cloned().fold(f64::MIN, f64::max) - kappas.iter().cloned().fold(f64::MAX, f64::min);
    r.check_on(
        "three routes to κ agree within 1e-2",
        spread < 1e-2,
        Some(1e-2 - spread),
        &["kappa_closed_form", "kappa_identity", "kappa_volume"],
    );

    r.paper_value("volume", "volume (4π)²∫ s⁻⁴ = 0.072699", an.volume, 0.072699, 1e-5);
    r.paper_value("lambda", "Einstein constant Λ = 45.554", an.lambda_einstein, 45.554, 5e-3);

    r.output("k_sup", Output::computed(an.k_sup))
        .output("k_argmax", Output::computed(an.k_argmax))
        .output("k_sensitivity", Output::computed(an.k_sensitivity))
        .output("delta_s2_identity_deviation", Output::computed(an.delta_s2_identity_deviation))
        .output("ratio", Output::computed(an.ratio()));
    r.check_on(
        "Δs² closed form matches κ/3 + 6|∇s|² − s³/3",
        an.delta_s2_identity_deviation < 1e-4,
        Some(1e-4 - an.delta_s2_identity_deviation),
        &["delta_s2_identity_deviation"],
    );
    r.check_on(
        "normalized sup Δs² < 2.65",
        an.ratio() < PAGE_RATIO_BOUND,
        Some(PAGE_RATIO_BOUND - an.ratio()),
        &["ratio"],
    );
    r.check_on(
        "cone unstable: normalized sup Δs² < 15/4",
        an.normalized.cone_unstable,
        Some(CONE_THRESHOLD - an.ratio()),
        &["ratio"],
    );
    r.check_on(
        "shrinker integrand 6 − Δs² positive",
        an.normalized.shrinker_unstable,
        Some(SHRINKER_THRESHOLD - an.ratio()),
        &["ratio"],
    );
    let gap = radial::gap_lemma_test(radial::gap_from_ratio(an.ratio()))?;
    radial_verdict(r, "radial witness for the 9/4 gap on the five-dimensional cone", &gap, &["ratio"]);

    let class = PageClass::new(an.a_star)?;
    let mut table = Table::new(&["t", "delta_s2", "normalized_delta_s2"]);
    for i in 0..=200 {
        let t = an.a_star + (1.0 - an.a_star) * f64::from(i) / 200.0;
        let v = class.delta_s2(t)?.value;
        table.push(&[t, v, 12.0 * v / an.kappa]);
    }
    Ok(Some(table))
}

fn clw(r: &mut AnalysisReport, a: f64, k_bound: f64) -> Result<Option<Table>> {
    r.input("a", a).input("clw_k_bound", k_bound);
    let an = clw::clw_full_analysis(a, k_bound, QUAD_TOL)?;
    let published = a == CLW_DEFAULT_A;

    let i = an.integrals.closed_form;
    for (k, v) in [("A", i.a), ("B", i.b), ("C", i.c), ("D", i.d), ("E0", i.e0), ("E1", i.e1)] {
        r.output(k, Output::computed(v));
    }
    r.output("integral_deviation", Output::computed(an.integrals.max_relative_deviation));
    r.check_on(
        "closed-form pentagon integrals match exact triangulation",
        an.integrals.max_relative_deviation < 1e-12,
        Some(1e-12 - an.integrals.max_relative_deviation),
        &["integral_deviation"],
    );

    let s = an.scal;
    if published {
        r.paper_value("a1", "a1 = −0.423", s.a1, -0.423, 1e-3);
        r.paper_value("a2", "a2 = −0.423", s.a2, -0.423, 1e-3);
        r.paper_value("b", "b = 2.790", s.b, 2.790, 1e-3);
    } else {
        r.output("a1", Output::computed(s.a1))
            .output("a2", Output::computed(s.a2))
            .output("b", Output::computed(s.b));
    }
    r.check_on("reflection symmetry a1 = a2", (s.a1 - s.a2).abs() < 1e-10, Some(1e-10 - (s.a1 - s.a2).abs()), &["a1", "a2"]);
    let closure = an.closure.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    r.output("solve_residual", Output::computed(an.solve_residual))
        .output("closure", Output::computed(closure))
        .output("min_vertex_scal", Output::computed(an.min_vertex_scal));
    r.check_on(
        "integration-by-parts residual below 1e-9",
        an.solve_residual.max(closure) < IBP_RESIDUAL_TOL,
        Some(IBP_RESIDUAL_TOL - an.solve_residual.max(closure)),
        &["solve_residual", "closure"],
    );
    r.check_on("scalar curvature positive on the pentagon", an.min_vertex_scal > 0.0, Some(an.min_vertex_scal), &["min_vertex_scal"]);

    let e = an.einstein;
    r.output("volume", Output::computed(e.volume))
        .output("scal_l2", Output::computed(e.scal_l2))
        .output("lambda_sensitivity", Output::computed(an.lambda_sensitivity));
    if published {
        r.paper_value("lambda", "Einstein constant Λ = 1.886", e.lambda, 1.886, 1e-2);
        r.paper_value("kappa", "κ = 7.54", e.kappa, 7.54, 4e-2);
    } else {
        r.output("lambda", Output::computed(e.lambda)).output("kappa", Output::computed(e.kappa));
    }
    let scaled = ScalingState::normalizing(e.kappa)?.scaled_einstein_constant();
    r.output("normalized_einstein_constant", Output::computed(scaled));
    r.check_on("normalization gives Einstein constant 3", (scaled - 3.0).abs() < 1e-12, None, &["kappa"]);

    r.output("k_bound", Output::external(k_bound))
        .output("ratio", Output::computed(an.ratio()));
    r.verdict_on(
        "12K/κ < 2.17 (external extremal-metric bound)",
        if an.ratio() < CLW_RATIO_BOUND { Status::Verified } else { Status::Failed },
        Some(CLW_RATIO_BOUND - an.ratio()),
        &["k_bound", "ratio"],
    );
    r.verdict_on(
        "cone unstable: normalized sup Δs² < 15/4",
        if an.normalized.cone_unstable { Status::Verified } else { Status::Undecided },
        Some(CONE_THRESHOLD - an.ratio()),
        &["k_bound", "ratio"],
    );

    let mut table = Table::new(&["a", "lambda", "kappa"]);
    for (a, lambda) in clw::lambda_sweep(Interval::new(1.9, 2.0)?, 11, QUAD_TOL)? {
        table.push(&[a, lambda, 4.0 * lambda]);
    }
    Ok(Some(table))
}

fn radial_verdict(r: &mut AnalysisReport, claim: &str, test: &RadialTest, deps: &[&str]) {
    match (test.verdict, test.form_value) {
        (RadialVerdict::Unstable, Some(q)) => {
            r.verdict_on(claim, Status::Verified, Some(-q), deps);
        }
        _ => {
            r.verdict_on(claim, Status::Undecided, None, deps);
        }
    }
}

fn radial_outputs(r: &mut AnalysisReport, test: &RadialTest) -> Result<Option<Table>> {
    let spec = test.spec;
    r.output("hardy_constant", Output::computed(radial::hardy_constant(spec.n())?))
        .output("hardy_threshold", Output::computed(radial::hardy_threshold(spec.n())))
        .output("lambda", Output::computed(spec.lambda()))
        .output("excess", Output::computed(spec.excess()));
    match (&test.witness, test.form_value) {
        (Some(w), Some(q)) => {
            r.output("form_value", Output::computed(q))
                .output("witness_decades", Output::computed(w.decades()))
                .output("witness_nodes", Output::computed(w.len() as f64));
            let mut table = Table::new(&["log_r", "r", "f", "g"]);
            for ((&s, &g), (rad, f)) in w.log_r().iter().zip(w.values()).zip(w.points()) {
                table.push(&[s, rad, f, g]);
            }
            Ok(Some(table))
        }
        _ if spec.excess() <= radial::DEFAULT_MARGIN => {
            let grid = LogGrid::default().nodes()?;
            let cert = radial::discrete_min_eigenvalue(spec, &grid)?;
            r.output("discrete_min_eigenvalue", Output::computed(cert.min_eigenvalue));
            r.verdict_on(
                "discrete radial form non-negative on the default grid",
                if cert.nonnegative { Status::Verified } else { Status::Undecided },
                Some(cert.min_eigenvalue / cert.scale),
                &["discrete_min_eigenvalue"],
            );
            Ok(None)
        }
        _ => Ok(None),
    }
}

fn cone_threshold(r: &mut AnalysisReport, n: u32, lambda: Option<f64>) -> Result<Option<Table>> {
    let spec = match lambda {
        Some(l) => ConeSpec::new(n, l)?,
        None => ConeSpec::einstein_link(n)?,
    };
    r.input("n", n).input("lambda", spec.lambda());
    let test = RadialTest::from_spec(spec);
    let table = radial_outputs(r, &test)?;
    radial_verdict(r, "radial variation with negative second variation", &test, &["excess"]);
    Ok(table)
}

fn product(r: &mut AnalysisReport, n1: u32, n2: u32) -> Result<Option<Table>> {
    r.input("n1", n1).input("n2", n2);
    let p = radial::product_cone_test(n1, n2)?;
    let n = n1 + n2 + 1;
    r.output("n", Output::computed(f64::from(n)))
        .output("prefactor", Output::computed(crate::numerics::to_f64(&p.prefactor)));
    r.check("curvature term reduces to 2(n − 2)(1/n1 + 1/n2) f²/r²", p.reduction_holds, None);
    let table = radial_outputs(r, &p.test)?;
    radial_verdict(r, "cone over the product is unstable", &p.test, &["excess"]);
    let expected = n < radial::PRODUCT_DIMENSION_BOUND;
    r.check("verdict agrees with the rule n < 10", (p.test.verdict == RadialVerdict::Unstable) == expected, None);
    Ok(table)
}

fn ke(r: &mut AnalysisReport, n: u32, h11: u32) -> Result<Option<Table>> {
    r.input("n", n).input("h11", h11);
    let test = radial::ke_cone_test(n, h11)?;
    let table = radial_outputs(r, &test)?;
    let claim = if h11 > 1 {
        "cone over the Kähler-Einstein manifold is unstable"
    } else {
        "h11 = 1: no eigen-tensor assumed, not decided"
    };
    radial_verdict(r, claim, &test, &["excess"]);
    Ok(table)
}

fn cp2_point(r: &mut AnalysisReport, alpha: f64, beta: f64, eps: f64) -> Result<Option<Table>> {
    r.input("alpha", alpha).input("beta", beta).input("eps", eps);
    let p = ProofParameters::new(alpha, beta, eps)?;
    let c = cp2proof::cp2_coefficients(p);
    let exact = cp2proof::cp2_coefficients_exact(
        &crate::numerics::exact(alpha),
        &crate::numerics::exact(beta),
        &crate::numerics::exact(eps),
    )?;
    for (k, v) in ["c_a", "c_b", "c_c", "c_trc"].iter().zip(c) {
        r.output(k, Output::computed(v));
    }
    let min = cp2proof::min_coefficient(p);
    r.output("min_coefficient", Output::computed(min));
    let (ka, kb, kc) = cp2proof::kato_hardy_constants(5)?;
    r.output("kato_hardy_a", Output::computed(ka))
        .output("kato_hardy_b", Output::computed(kb))
        .output("kato_hardy_c", Output::computed(kc));
    let deps = ["c_a", "c_b", "c_c", "c_trc"];
    r.check_on("all four coefficients non-negative", cp2proof::cp2_feasible(p), Some(min), &deps);
    r.check_on(
        "exact rational re-check agrees",
        cp2proof::cp2_feasible_exact(p) == cp2proof::cp2_feasible(p),
        None,
        &deps,
    );
    let mut table = Table::new(&["coefficient", "value", "exact"]);
    for ((name, v), e) in ["c_a", "c_b", "c_c", "c_trc"].iter().zip(c).zip(&exact) {
        table.rows.push(vec![name.to_string(), super::report::round_sig(v).to_string(), e.to_string()]);
    }
    Ok(Some(table))
}

fn cp2_search(r: &mut AnalysisReport, alpha: Range, beta: Range, eps: f64, step: f64) -> Result<Option<Table>> {
    r.input("alpha_lo", alpha.lo)
        .input("alpha_hi", alpha.hi)
        .input("beta_lo", beta.lo)
        .input("beta_hi", beta.hi)
        .input("eps", eps)
        .input("step", step);
    let grid = GridSpec {
        alpha: Axis::with_step(alpha.lo, alpha.hi, step)?,
        beta: Axis::with_step(beta.lo, beta.hi, step)?,
        epsilon: Axis::single(eps),
    };
    let region = cp2proof::cp2_feasible_region(grid)?;
    r.output("scanned", Output::computed(region.scanned as f64))
        .output("feasible_count", Output::computed(region.feasible.len() as f64));
    if let Some(h) = region.hull {
        for (name, (lo, hi)) in ["alpha", "beta", "eps"].iter().zip(h) {
            r.output(&format!("{name}_min"), Output::computed(lo))
                .output(&format!("{name}_max"), Output::computed(hi));
        }
    }
    if let Some((p, m)) = region.max_margin {
        r.output("best_alpha", Output::computed(p.alpha()))
            .output("best_beta", Output::computed(p.beta()))
            .output("best_margin", Output::computed(m));
    }
    r.check_on("feasible region nonempty", !region.feasible.is_empty(), None, &["feasible_count"]);
    r.check_on("every feasible grid point passes the exact re-check", region.exact_recheck, None, &["feasible_count"]);
    let (wa, wb, we) = PAPER_WITNESS;
    let on_axis = |x: f64, axis: &Axis| axis.points().any(|p| (p - x).abs() < 1e-9);
    if on_axis(wa, &grid.alpha) && on_axis(wb, &grid.beta) && on_axis(we, &grid.epsilon) {
        r.check("scan contains the witness (21/5, 4, 1)", region.contains(wa, wb, we, 1e-9), None);
    } else {
        r.verdict("witness (21/5, 4, 1) not on the scanned grid", Status::Undecided, None);
    }
    let mut table = Table::new(&["alpha", "beta", "eps", "min_coefficient"]);
    for p in &region.feasible {
        table.push(&[p.alpha(), p.beta(), p.epsilon(), cp2proof::min_coefficient(*p)]);
    }
    Ok(Some(table))
}

fn load_polygon(shape: Shape, a: Option<f64>, facets: Option<&Path>) -> Result<(DelzantPolygon, Option<f64>)> {
    Ok(match shape {
        Shape::Square => (polytope::unit_square(), None),
        Shape::Page => {
            let a = match a {
                Some(a) => a,
                None => page::page_critical_a(1e-13)?,
            };
            (polytope::page_trapezium(a)?, Some(a))
        }
        Shape::Clw => {
            let a = a.unwrap_or(CLW_DEFAULT_A);
            (polytope::clw_pentagon(a)?, Some(a))
        }
        Shape::Custom => {
            let path = facets.ok_or_else(|| Error::DomainError("--shape custom needs --facets".into()))?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::DomainError(format!("cannot read {}: {e}", path.display())))?;
            (DelzantPolygon::from_facets(polytope::parse_facets(&text)?)?, None)
        }
    })
}

fn polytope_integrals(r: &mut AnalysisReport, shape: Shape, a: Option<f64>, facets: Option<&Path>) -> Result<Option<Table>> {
    let name = match shape {
        Shape::Page => "page",
        Shape::Clw => "clw",
        Shape::Square => "square",
        Shape::Custom => "custom",
    };
    r.input("shape", name);
    let (polygon, a) = load_polygon(shape, a, facets)?;
    if let Some(a) = a {
        r.input("a", a);
    }
    if let Some(path) = facets {
        r.input("facets", path.display().to_string());
    }
    let sol = extremal_affine_coefficients(&polygon)?;
    let m = sol.moments;
    for (k, v) in [
        ("area", m.area),
        ("int_x1", m.x1),
        ("int_x2", m.x2),
        ("int_x1x1", m.x1x1),
        ("int_x1x2", m.x1x2),
        ("int_x2x2", m.x2x2),
        ("boundary_1", m.e0),
        ("boundary_x1", m.e1),
        ("boundary_x2", m.e2),
        ("scal_a1", sol.scal.a1),
        ("scal_a2", sol.scal.a2),
        ("scal_b", sol.scal.b),
        ("solve_residual", sol.residual),
        ("closure", sol.max_closure()),
    ] {
        r.output(k, Output::computed(v));
    }
    r.check("polygon is Delzant", polygon.is_delzant(), None);
    let worst = sol.residual.max(sol.max_closure());
    r.check_on(
        "integration-by-parts residual below 1e-9",
        worst < IBP_RESIDUAL_TOL,
        Some(IBP_RESIDUAL_TOL - worst),
        &["solve_residual", "closure"],
    );
    match (shape, a) {
        (Shape::Clw, Some(a)) => {
            let dev = clw::clw_integrals(a)?.max_relative_deviation;
            r.output("closed_form_deviation", Output::computed(dev));
            r.check_on("closed-form pentagon integrals agree", dev < 1e-12, Some(1e-12 - dev), &["closed_form_deviation"]);
        }
        (Shape::Page, Some(a)) => {
            let (c1, c2) = page::page_scal_coeffs(a)?;
            let dev = (sol.scal.a1 - c1).abs().max((sol.scal.a2 - c1).abs()).max((sol.scal.b - c2).abs());
            r.output("closed_form_deviation", Output::computed(dev));
            r.check_on("solve matches the closed-form (c1, c2)", dev < 1e-6, Some(1e-6 - dev), &["closed_form_deviation"]);
        }
        _ => {}
    }
    let mut table = Table::new(&["x1", "x2"]);
    for v in polygon.vertices() {
        table.push(v);
    }
    Ok(Some(table))
}
