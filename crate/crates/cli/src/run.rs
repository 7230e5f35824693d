//! Subcommand execution. Every command validates its inputs, computes, and
//! returns its artifacts; nothing touches the filesystem here.

use crate::output::{Artifacts, Cell, Table};
use crate::spec::*;
use invsq::classical::{
    chain_partition, feynman_kac, free_energy_density, free_energy_extrapolated, image_kernel, scaling_check_w,
    McOptions,
};
use invsq::propagator::{
    callan_symanzik_residual, check_asymptotic_law, check_exact_law, check_scaling_relation, coupling_at,
    propagator_quadrature, propagator_with, scaling_collapse,
};
use invsq::rgflow::{contour_constant_ratio, fixed_point_info, flow, limit_cycle, limit_cycle_phase};
use invsq::scattering::{constant_phase_curve, phase_expansion, phase_sweep, reflection_at};
use invsq::spectrum::{
    binding_constant, binding_series, bound_state, critical_coupling, fit_critical, fit_critical_plain, log_grid,
    mean_position,
};
use invsq::{ChainGrid, ChainSpec, Error, PathEnsembleSpec, PathPotential, Result};
use serde_json::json;
use std::f64::consts::PI;

pub fn run(spec: &RunSpec) -> Result<Artifacts> {
    match spec {
        RunSpec::FixedPoints(s) => fixed_points(s),
        RunSpec::Flow(s) => flow_cmd(s),
        RunSpec::Contours(s) => contours(s),
        RunSpec::BoundState(s) => bound_states(s),
        RunSpec::Exponent(s) => exponent(s),
        RunSpec::Propagator(s) => propagator(s),
        RunSpec::ScalingCheck(s) => scaling_check(s),
        RunSpec::Collapse(s) => collapse(s),
        RunSpec::PhaseShift(s) => phase_shift(s),
        RunSpec::PhaseCurve(s) => phase_curve(s),
        RunSpec::FeynmanKac(s) => feynman_kac_cmd(s),
        RunSpec::Chain(s) => chain(s),
        RunSpec::LimitCycle(s) => limit_cycle_cmd(s),
        RunSpec::RegenGolden(s) => crate::golden::regen(s),
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive, got {v}")))
    }
}

fn range(name: &str, lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    positive(&format!("{name}_min"), lo)?;
    positive(&format!("{name}_max"), hi)?;
    if !(hi > lo) || n < 2 {
        return Err(Error::domain(format!("{name} range needs {name}_max > {name}_min and at least two points")));
    }
    Ok(log_grid(lo, hi, n))
}

fn fixed_points(s: &FixedPointsSpec) -> Result<Artifacts> {
    let p = s.params.model()?;
    let [plus, minus] = fixed_point_info(&p)?;
    Ok(Artifacts::summary(json!({
        "alpha": p.alpha,
        "omega": p.omega,
        "nu_plus": p.nu_plus,
        "nu_minus": p.nu_minus,
        "g_plus": plus.g_star,
        "g_minus": minus.g_star,
        "y_plus": plus.y,
        "y_minus": minus.y,
        "stability_plus": plus.stability,
        "stability_minus": minus.stability,
        "binding_constant": binding_constant(&p)?,
    })))
}

fn flow_cmd(s: &FlowSpec) -> Result<Artifacts> {
    let p = s.params.model()?;
    positive("b0", s.b0)?;
    positive("b1", s.b1)?;
    if s.n_points < 2 {
        return Err(Error::domain("flow needs at least two points"));
    }
    let mut t = Table::new("flow.csv", &["b[1]", "gamma[1]", "g[1]", "u[1]", "exited_branch"]);
    let mut last = None;
    for i in 0..s.n_points {
        let lb = s.b0.ln() + (s.b1.ln() - s.b0.ln()) * i as f64 / (s.n_points - 1) as f64;
        let st = flow(&p, s.gamma0, s.b0, lb.exp())?;
        t.push(vec![st.b.into(), st.gamma.into(), st.g.into(), st.u.into(), st.exited_branch.into()]);
        last = Some(st);
    }
    let st = last.expect("at least two points");
    Ok(Artifacts {
        summary: json!({"b1": st.b, "gamma": st.gamma, "g": st.g, "u": st.u, "exited_branch": st.exited_branch}),
        tables: vec![t],
    })
}

pub fn contour_table(s: &ContoursSpec) -> Result<(Table, serde_json::Value)> {
    let p = s.params.model()?;
    let xis = range("xi", s.xi_min, s.xi_max, s.n_xi)?;
    let mut t = Table::new("contours.csv", &["ratio[1]", "xi[1]", "g[1]"]);
    let mut counts = Vec::new();
    for &r in &s.ratios {
        let c = contour_constant_ratio(&p, r, &xis)?;
        for pt in &c.points {
            t.push(vec![r.into(), pt.xi.into(), pt.g.into()]);
        }
        counts.push(json!({"ratio": r, "points": c.points.len(), "omitted": c.omitted}));
    }
    Ok((t, json!({ "contours": counts })))
}

fn contours(s: &ContoursSpec) -> Result<Artifacts> {
    let (t, summary) = contour_table(s)?;
    Ok(Artifacts { summary, tables: vec![t] })
}

fn bound_states(s: &BoundStateSpec) -> Result<Artifacts> {
    let p = s.params.model()?;
    let reg = s.regulator.model()?;
    let gs = if s.g_values.is_empty() { vec![reg.g] } else { s.g_values.clone() };
    let mut t = Table::new(
        "bound_state.csv",
        &["alpha[1]", "scheme", "b[1]", "g[1]", "E[x0^-2]", "xi[1]", "mean_x[x0]"],
    );
    let mut bound = 0;
    for &g in &gs {
        let r = reg.with_g(g);
        r.validate()?;
        let Some(st) = bound_state(&p, &r)? else { continue };
        bound += 1;
        let mx = mean_position(&p, &reg, g)?;
        t.push(vec![
            p.alpha.into(),
            s.regulator.kind.label().into(),
            reg.b.into(),
            g.into(),
            st.energy.into(),
            st.xi.into(),
            mx.into(),
        ]);
    }
    Ok(Artifacts { summary: json!({"couplings": gs.len(), "bound": bound}), tables: vec![t] })
}

/// Binding energies over g_* + dg and the plain and corrected exponent fits.
pub fn exponent_fit(s: &ExponentSpec) -> Result<(Table, invsq::CriticalFit, invsq::CriticalFit)> {
    let p = s.params.model()?;
    let reg = s.shape.at(1.0)?;
    let dgs = range("dg", s.dg_min, s.dg_max, s.n_dg)?;
    let g_star = critical_coupling(&p, &reg)?;
    let xi2 = binding_series(&p, &reg, g_star, &dgs)?;
    let w = reg.b * p.x0;
    let mut t = Table::new("exponent.csv", &["dg[1]", "g[1]", "E[x0^-2]", "xi2[1]"]);
    for (d, x) in dgs.iter().zip(&xi2) {
        t.push(vec![(*d).into(), (g_star + d).into(), (-x / (w * w)).into(), (*x).into()]);
    }
    Ok((t, fit_critical_plain(g_star, &dgs, &xi2)?, fit_critical(g_star, &dgs, &xi2)?))
}

fn exponent(s: &ExponentSpec) -> Result<Artifacts> {
    let p = s.params.model()?;
    let (t, plain, corrected) = exponent_fit(s)?;
    Ok(Artifacts {
        summary: json!({
            "scheme": s.shape.kind.label(),
            "g_star": corrected.g_star,
            "expected_exponent": 1.0 / p.omega,
            "binding_constant": binding_constant(&p)?,
            "plain": plain,
            "corrected": corrected,
        }),
        tables: vec![t],
    })
}

fn propagator(s: &PropagatorSpec) -> Result<Artifacts> {
    let p = s.params.model()?;
    let g = coupling_at(&p, s.sign.into(), s.u)?;
    let mut t = Table::new(
        "propagator.csv",
        &["alpha[1]", "sign", "b[1]", "u[1]", "x[x0]", "y[x0]", "t[x0^2]", "G[x0^-1]", "quad_error[1]"],
    );
    for &tt in &s.t {
        let r = propagator_with(&p, s.normalization.into(), s.b, g, s.x, s.y, tt)?;
        t.push(vec![
            p.alpha.into(),
            s.sign.label().into(),
            s.b.into(),
            s.u.into(),
            s.x.into(),
            s.y.into(),
            tt.into(),
            r.value.into(),
            r.quad_error.into(),
        ]);
    }
    Ok(Artifacts { summary: json!({"g": g, "samples": s.t.len()}), tables: vec![t] })
}

fn scaling_check(s: &ScalingCheckSpec) -> Result<Artifacts> {
    let p = s.params.model()?;
    let sign = s.sign.into();
    let norm = s.normalization.into();
    let summary = match s.method {
        ScalingMethod::Exact => {
            let g = coupling_at(&p, sign, s.u)?;
            json!({"method": "exact", "g": g, "check": check_exact_law(&p, s.b, g, s.x, s.y, s.t, s.lambda)?})
        }
        ScalingMethod::Asymptotic => json!({
            "method": "asymptotic",
            "check": check_asymptotic_law(&p, norm, sign, s.b, s.u, s.x, s.y, s.t, s.lambda)?,
        }),
        ScalingMethod::Relation => json!({
            "method": "relation",
            "check": check_scaling_relation(&p, norm, sign, s.b, s.u, s.x, s.y, s.t, s.lambda)?,
        }),
        ScalingMethod::CallanSymanzik => json!({
            "method": "callan-symanzik",
            "residual": callan_symanzik_residual(&p, norm, sign, s.b, s.u, s.x, s.y, s.t, s.h)?,
        }),
        ScalingMethod::MonteCarlo => {
            let opts = McOptions {
                n_steps: s.n_steps,
                n_samples: s.n_samples,
                seed: s.seed,
                refine_tol: 0.0,
                max_depth: 12,
            };
            let lp = s.lambda_prime.unwrap_or(s.lambda);
            json!({
                "method": "monte-carlo",
                "check": scaling_check_w(&p, s.b, sign, s.x, s.y, s.t, s.lambda, lp, &opts)?,
            })
        }
    };
    Ok(Artifacts::summary(summary))
}

pub fn collapse_tables(s: &CollapseSpec) -> Result<(Table, Table, serde_json::Value)> {
    let p = s.params.model()?;
    let bs = range("b", s.b_min, s.b_max, s.n_b)?;
    let us = if s.u_values.is_empty() { vec![s.u0 / 2.0, s.u0 / 4.0] } else { s.u_values.clone() };
    let tab = scaling_collapse(&p, &bs, &us, s.u0, s.x, s.t)?;
    let mut phi = Table::new("collapse.csv", &["z[1]", "Phi[1]"]);
    for (z, f) in tab.z.iter().zip(&tab.phi) {
        phi.push(vec![(*z).into(), (*f).into()]);
    }
    let mut rows = Table::new("collapse_rows.csv", &["u[1]", "z[1]", "Phi[1]"]);
    for r in &tab.rows {
        for (z, f) in r.z.iter().zip(&r.phi) {
            rows.push(vec![r.u.into(), (*z).into(), (*f).into()]);
        }
    }
    let summary = json!({"u0": tab.u0, "spread": tab.spread, "fit": tab.fit, "nu_plus": p.nu_plus, "nu_minus": p.nu_minus});
    Ok((phi, rows, summary))
}

fn collapse(s: &CollapseSpec) -> Result<Artifacts> {
    let (phi, rows, summary) = collapse_tables(s)?;
    Ok(Artifacts { summary, tables: vec![phi, rows] })
}

fn phase_shift(s: &PhaseShiftSpec) -> Result<Artifacts> {
    let p = s.params.model()?;
    let mus = range("mu", s.mu_min, s.mu_max, s.n_mu)?;
    let sweep = phase_sweep(&p, s.g, &mus)?;
    let mut t = Table::new("phase_shift.csv", &["mu[1]", "g[1]", "re_r[1]", "im_r[1]", "delta[1]"]);
    for ps in &sweep {
        let r = reflection_at(&p, s.g, ps.mu)?;
        t.push(vec![ps.mu.into(), s.g.into(), r.re.into(), r.im.into(), ps.delta.into()]);
    }
    let (c0, a1) = phase_expansion(&p, s.g)?;
    Ok(Artifacts { summary: json!({"g": s.g, "c0": c0, "a1": a1, "unit_of_delta": "rad"}), tables: vec![t] })
}

fn phase_curve(s: &PhaseCurveSpec) -> Result<Artifacts> {
    let p = s.params.model()?;
    let c = constant_phase_curve(&p, s.mu0, s.g0, s.mu1, s.n_out)?;
    let mut t = Table::new("phase_curve.csv", &["mu[1]", "g[1]"]);
    for &(mu, g) in &c.points {
        t.push(vec![mu.into(), g.into()]);
    }
    Ok(Artifacts { summary: json!({"points": c.points.len(), "exited_branch": c.exited_branch}), tables: vec![t] })
}

fn feynman_kac_cmd(s: &FeynmanKacSpec) -> Result<Artifacts> {
    let p = s.params.model()?;
    let reg = invsq::Regulator::square_well(s.b, s.g)?;
    let spec = PathEnsembleSpec {
        potential: s.potential.into(),
        refine_tol: s.refine_tol,
        max_depth: s.max_depth,
        ..PathEnsembleSpec::new(s.y, s.x, s.t, s.n_steps, s.n_samples, s.seed)
    };
    let r = feynman_kac(&p, &reg, &spec)?;
    // Reference value where a closed route exists.
    let reference = match spec.potential {
        PathPotential::BarrierOnly => Some(image_kernel(s.x, s.y, s.t)),
        PathPotential::Free => None,
        PathPotential::Model => propagator_quadrature(&p, s.b, s.g, s.x, s.y, s.t).ok().map(|q| q.value),
    };
    let mut t = Table::new(
        "feynman_kac.csv",
        &["x[x0]", "y[x0]", "t[x0^2]", "N", "n_samples", "W[x0^-1]", "stderr[x0^-1]"],
    );
    t.push(vec![
        s.x.into(),
        s.y.into(),
        s.t.into(),
        s.n_steps.into(),
        s.n_samples.into(),
        r.value.into(),
        r.std_error.into(),
    ]);
    Ok(Artifacts {
        summary: json!({
            "W": r.value,
            "stderr": r.std_error,
            "absorbed_fraction": r.absorbed_fraction,
            "reference": reference,
            "z": reference.map(|v| (r.value - v) / r.std_error),
        }),
        tables: vec![t],
    })
}

fn chain(s: &ChainRunSpec) -> Result<Artifacts> {
    let p = s.params.model()?;
    let reg = s.regulator.model()?;
    let grid = ChainGrid::aligned(reg.b * p.x0, s.h, s.x_max)?;
    let gs = if s.g_values.is_empty() { vec![reg.g] } else { s.g_values.clone() };
    let mut t = Table::new(
        "chain.csv",
        &["g[1]", "epsilon[x0^2]", "n_grid", "f[x0^-2]", "E0_ref[x0^-2]", "order[1]"],
    );
    let mut rows = Vec::new();
    for &g in &gs {
        let r = reg.with_g(g);
        r.validate()?;
        let (f, e0, order) = if s.extrapolate {
            let x = free_energy_extrapolated(&p, &r, s.epsilon, &grid, s.boundary.into())?;
            (x.f_xy, x.e0, Some(x.order))
        } else {
            let x = free_energy_density(&p, &r, s.epsilon, &grid, s.boundary.into())?;
            (x.f_xy, x.e0, None)
        };
        let blank = || Cell::S(String::new());
        t.push(vec![
            g.into(),
            s.epsilon.into(),
            grid.n_grid.into(),
            f.into(),
            e0.map_or_else(blank, Cell::F),
            order.map_or_else(blank, Cell::F),
        ]);
        rows.push(json!({"g": g, "f": f, "E0": e0, "order": order}));
    }
    let mut tables = vec![t];
    let mut summary = json!({"grid": grid, "boundary": format!("{:?}", s.boundary).to_lowercase(), "results": rows});
    if let Some(n) = s.n_sites {
        let spec = ChainSpec { n_sites: n, epsilon: s.epsilon, x: s.x, y: s.y, grid };
        let z = chain_partition(&p, &reg, &spec)?;
        let mut zt = Table::new(
            "chain_partition.csv",
            &["N", "epsilon[x0^2]", "x[x0]", "y[x0]", "time[x0^2]", "Z[x0^-1]", "truncation_error[x0^-1]"],
        );
        zt.push(vec![
            n.into(),
            s.epsilon.into(),
            s.x.into(),
            s.y.into(),
            z.time.into(),
            z.z.into(),
            z.truncation_error.into(),
        ]);
        tables.push(zt);
        summary["partition"] = json!(z);
    }
    Ok(Artifacts { summary, tables })
}

fn limit_cycle_cmd(s: &LimitCycleSpec) -> Result<Artifacts> {
    let p = s.params.model()?;
    let bs = range("b", s.b_min, s.b_max, s.n_b)?;
    let phi = limit_cycle_phase(&p)?;
    let mut t = Table::new("limit_cycle.csv", &["log_b[1]", "eps[1]", "g_root_index", "g[1]"]);
    let mut roots = 0;
    for &eps in &s.eps {
        positive("eps", eps)?;
        for &b in &bs {
            let st = limit_cycle(&p, b, eps)?;
            for (k, g) in st.g_branches.iter().enumerate() {
                t.push(vec![b.ln().into(), eps.into(), k.into(), (*g).into()]);
                roots += 1;
            }
        }
    }
    Ok(Artifacts {
        summary: json!({"abs_omega": p.omega, "phi": phi, "log_b_period": PI / p.omega, "roots": roots}),
        tables: vec![t],
    })
}
