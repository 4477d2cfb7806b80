//! One function per subcommand. Each returns its files plus a JSON summary;
//! nothing touches the disk here.

use dspin::catalog::{build_curve, CurveId};
use dspin::conventions::{convention_report, ConventionReport, SignRelation, REPORT_GRID};
use dspin::curve::CurveOnSurface;
use dspin::fermi::{expansion_residuals, fermi_christoffel_q_ss, fit_order};
use dspin::hamiltonian::{beta_from_sample, potentials_from_sample, snap_zero};
use dspin::interferometer::{conductance_sweep, sweep_amplitude, sweep_grid};
use dspin::topology::{ChartClosure, FluxOptions};
use dspin::transport::{direction_independence_check, precession_residual, Direction, InitialState};
use dspin::{
    adiabatic_propagator, evolve_spin_texture, gauss_bonnet_and_flux, ode_propagator_oracle, path_ordered_propagator, Curve,
    DerivativeMode, Error, FieldCoupling, FieldOptions, InterferometerSpec, Orientation, Region, Vector3,
};
use serde_json::{json, Value};

use crate::config::{
    ClosureSpec, Config, ConfigError, CouplingSpec, DerivativeSpec, DirectionSpec, FrameAxisSpec, InitialSpec, OrientationSpec,
    RunKind,
};
use crate::output::{to_json, Cell, Outputs, Table};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Engine(#[from] Error),
}

pub struct RunOutput {
    pub files: Outputs,
    pub summary: Value,
    pub warnings: Vec<String>,
    /// Tolerance checks that did not hold; files are still written.
    pub failures: Vec<String>,
}

impl RunOutput {
    fn new(summary: Value) -> Self {
        Self { files: Outputs::default(), summary, warnings: Vec::new(), failures: Vec::new() }
    }
}

pub fn run(kind: RunKind, cfg: &Config) -> Result<RunOutput, RunError> {
    match kind {
        RunKind::Describe => describe(cfg),
        RunKind::Frames => frames(cfg),
        RunKind::FermiCheck => fermi_check(cfg),
        RunKind::Texture => texture(cfg),
        RunKind::Wilson => wilson(cfg),
        RunKind::Flux => flux(cfg),
        RunKind::Conductance => conductance(cfg),
        RunKind::ConventionReport => conventions(),
    }
}

fn host_options(cfg: &Config, id: CurveId) -> Result<Curve, RunError> {
    let mut p = cfg.curve.params();
    if matches!(id, CurveId::VivianiOnCylinder | CurveId::VivianiOnSphere) && cfg.curve.curve_id()? != id {
        p.range = None;
    }
    let base = build_curve::<f64>(id, &p).map_err(|e| match e {
        Error::InvalidInput(m) => RunError::Config(ConfigError::new("curve", m)),
        other => RunError::Engine(other),
    })?;
    let orientation = match cfg.surface.orientation {
        OrientationSpec::Outward => Orientation::Outward,
        OrientationSpec::Inward => Orientation::Inward,
    };
    let mode = match cfg.surface.derivatives {
        DerivativeSpec::Analytic => DerivativeMode::Analytic,
        DerivativeSpec::FiniteDifference => DerivativeMode::FiniteDifference,
    };
    if orientation == Orientation::Outward && mode == DerivativeMode::Analytic {
        return Ok(base);
    }
    let surface = base.surface.clone().with_orientation(orientation).with_derivative_mode(mode);
    Ok(CurveOnSurface::new(surface, base.path.clone(), base.t0, base.t1, base.closed)?)
}

fn configured_curve(cfg: &Config) -> Result<(CurveId, Curve), RunError> {
    let id = cfg.curve.curve_id()?;
    Ok((id, host_options(cfg, id)?))
}

fn field_options(cfg: &Config) -> FieldOptions<f64> {
    let coupling = match cfg.field.coupling {
        CouplingSpec::Connection => FieldCoupling::Connection,
        CouplingSpec::Zeeman => FieldCoupling::Zeeman,
    };
    FieldOptions::with_extra(Vector3::from_array(cfg.field.extra), coupling)
}

fn vec_cells(v: Vector3) -> [Cell; 3] {
    [v.x.into(), v.y.into(), v.z.into()]
}

fn curve_summary(id: CurveId, c: &Curve) -> Value {
    json!({ "id": id.as_str(), "label": id.label(), "length": c.length(), "closed": c.closed, "t0": c.t0, "t1": c.t1 })
}

fn describe(cfg: &Config) -> Result<RunOutput, RunError> {
    let (id, c) = configured_curve(cfg)?;
    let mut t = Table::new(&["s", "phi", "kappa_g", "kappa_n", "tau_g", "beta_norm", "v_g", "v_sg", "adiabaticity"]);
    let mut max_adiabaticity = 0.0f64;
    for d in c.darboux_samples(cfg.grid.samples)? {
        let b = beta_from_sample(&d);
        let p = potentials_from_sample(&d);
        let a = c.adiabaticity(d.s)?;
        max_adiabaticity = max_adiabaticity.max(a);
        let z = snap_zero::<f64>;
        t.push(vec![
            d.s.into(),
            d.param.into(),
            z(d.kappa_g).into(),
            z(d.kappa_n).into(),
            z(d.tau_g).into(),
            z(b.magnitude).into(),
            z(p.v_g).into(),
            z(p.v_sg).into(),
            z(a).into(),
        ]);
    }
    let mut out = RunOutput::new(json!({ "curve": curve_summary(id, &c), "rows": t.rows(), "max_adiabaticity": max_adiabaticity }));
    out.files.add("describe.csv", t.render());
    Ok(out)
}

fn frames(cfg: &Config) -> Result<RunOutput, RunError> {
    let (id, c) = configured_curve(cfg)?;
    let mut t = Table::new(&[
        "s", "phi", "x", "y", "z", "tx", "ty", "tz", "Nx", "Ny", "Nz", "Bx", "By", "Bz", "kappa", "tau", "theta", "K", "M",
    ]);
    let mut frenet_gaps = 0usize;
    let mut worst_defect = 0.0f64;
    for d in c.darboux_samples(cfg.grid.samples)? {
        let frenet = match c.frenet_at_param_with_s(d.param, d.s) {
            Ok(f) => Some(f),
            Err(Error::VanishingCurvature { .. }) => {
                frenet_gaps += 1;
                None
            }
            Err(e) => return Err(e.into()),
        };
        worst_defect = worst_defect.max(d.frame.orthonormality_defect());
        let mut row = vec![d.s.into(), d.param.into()];
        row.extend(vec_cells(d.position));
        row.extend(vec_cells(d.frame.t));
        row.extend(vec_cells(d.frame.n));
        row.extend(vec_cells(d.frame.b));
        row.push(d.kappa_squared().sqrt().into());
        row.push(frenet.map(|f| f.tau).into());
        row.push(d.theta.into());
        row.push(d.gaussian.into());
        row.push(d.mean.into());
        t.push(row);
    }
    let mut warnings = Vec::new();
    if frenet_gaps > 0 {
        warnings.push(format!("Frenet frame undefined at {frenet_gaps} samples (vanishing curvature); tau and theta left empty"));
    }
    let branch = match c.torsion_branch_residuals(64) {
        Ok(r) => json!({ "minus": r.minus, "plus": r.plus, "samples": r.samples }),
        Err(e) => {
            warnings.push(format!("torsion branch check skipped: {e}"));
            Value::Null
        }
    };
    let mut out = RunOutput::new(json!({
        "curve": curve_summary(id, &c),
        "rows": t.rows(),
        "max_orthonormality_defect": worst_defect,
        "torsion_branch_residuals": branch,
    }));
    out.warnings = warnings;
    out.files.add("frames.csv", t.render());
    Ok(out)
}

fn fermi_check(cfg: &Config) -> Result<RunOutput, RunError> {
    let (id, c) = configured_curve(cfg)?;
    let l = c.length();
    // Keep finite-difference stencils inside open curves.
    let margin = 0.02 * l;
    let mut t = Table::new(&["s", "q", "gss_numeric", "gss_series", "residual"]);
    let mut points = Vec::new();
    let mut out_warnings = Vec::new();
    for &frac in &cfg.fermi.points {
        let mut s = frac * l;
        if !c.closed {
            s = s.clamp(margin, l - margin);
        }
        let res = expansion_residuals(&c, s, &cfg.fermi.q_grid)?;
        for p in &res {
            t.push(vec![p.s.into(), p.q.into(), p.gss_numeric.into(), p.gss_series.into(), p.residual.into()]);
        }
        let max_residual = res.iter().map(|p| p.residual).fold(0.0, f64::max);
        let (slope, intercept, note) = match fit_order(&res) {
            Ok((a, b)) => (Some(a), Some(b), Value::Null),
            Err(Error::FitFailed { reason }) => (None, None, Value::String(reason)),
            Err(e) => return Err(e.into()),
        };
        let kappa_g = c.darboux_sample(s)?.kappa_g;
        let gamma = fermi_christoffel_q_ss(&c, s, cfg.fermi.christoffel_step)?;
        if (gamma - kappa_g).abs() > 1e-5 {
            out_warnings.push(format!("Γ^q_ss differs from κ_g by {:e} at s = {s}", (gamma - kappa_g).abs()));
        }
        points.push(json!({
            "s": s,
            "slope": slope,
            "intercept": intercept,
            "fit_note": note,
            "max_residual": max_residual,
            "christoffel_q_ss": gamma,
            "kappa_g": kappa_g,
            "christoffel_error": (gamma - kappa_g).abs(),
        }));
    }
    let summary = json!({ "curve": curve_summary(id, &c), "q_grid": cfg.fermi.q_grid, "points": points });
    let mut out = RunOutput::new(summary.clone());
    out.warnings = out_warnings;
    out.files.add("fermi.csv", t.render());
    out.files.add("fermi_summary.json", to_json(&summary));
    Ok(out)
}

fn texture(cfg: &Config) -> Result<RunOutput, RunError> {
    let (id, c) = configured_curve(cfg)?;
    let opts = field_options(cfg);
    let initial = match cfg.initial {
        InitialSpec::Bloch(m) => InitialState::Bloch(Vector3::from_array(m).normalize()),
        InitialSpec::FrameAxis(a) => InitialState::FrameAxis(match a {
            FrameAxisSpec::T => 0,
            FrameAxisSpec::N => 1,
            FrameAxisSpec::B => 2,
        }),
    };
    let direction = match cfg.direction {
        DirectionSpec::Forward => Direction::Forward,
        DirectionSpec::Reverse => Direction::Reverse,
    };
    let tex = evolve_spin_texture(&c, initial, cfg.grid.samples, cfg.grid.substeps, direction, &opts)?;
    let mut t = Table::new(&[
        "s", "phi", "x", "y", "z", "tx", "ty", "tz", "Nx", "Ny", "Nz", "Bx", "By", "Bz", "mx", "my", "mz", "mDs", "mDN", "mDq",
    ]);
    let mut worst_norm = 0.0f64;
    for r in &tex.records {
        let mut row = vec![r.s.into(), r.phi.into()];
        for v in [r.position, r.frame.t, r.frame.n, r.frame.b, r.m_lab, r.m_darboux] {
            row.extend(vec_cells(v));
        }
        worst_norm = worst_norm.max((r.m_lab.norm() - 1.0).abs());
        t.push(row);
    }
    let mut failures = Vec::new();
    let mut warnings = Vec::new();
    let (r1, r2) = match precession_residual(&tex) {
        Ok(p) => {
            if p.r1 > cfg.tolerances.precession {
                failures.push(format!("precession residual r1 = {:e} exceeds {:e}", p.r1, cfg.tolerances.precession));
            }
            (Some(p.r1), Some(p.r2))
        }
        Err(Error::GridTooCoarse { reason }) => {
            failures.push(format!("precession residuals unavailable: grid too coarse ({reason})"));
            (None, None)
        }
        Err(e) => return Err(e.into()),
    };
    let independence = if c.closed {
        let m0 = tex.records[0].m_lab;
        let rep = direction_independence_check(&c, m0, cfg.grid.samples, cfg.grid.substeps, &opts)?;
        json!({ "max_deviation": rep.max_deviation, "closure_ccw": rep.closure_ccw, "closure_cw": rep.closure_cw })
    } else {
        Value::Null
    };
    if worst_norm > 1e-9 {
        warnings.push(format!("Bloch norm drifted by {worst_norm:e}"));
    }
    let mut out = RunOutput::new(json!({
        "curve": curve_summary(id, &c),
        "rows": t.rows(),
        "direction": match direction { Direction::Forward => "forward", Direction::Reverse => "reverse" },
        "precession": {
            "r1": r1,
            "r1_law": "dm_lab/ds = m_lab x b_lab",
            "r2": r2,
            "r2_law": "dm_D/ds = 2 beta x m_D",
        },
        "max_bloch_norm_defect": worst_norm,
        "direction_independence": independence,
    }));
    out.failures = failures;
    out.warnings = warnings;
    out.files.add("texture.csv", t.render());
    Ok(out)
}

fn wilson(cfg: &Config) -> Result<RunOutput, RunError> {
    let (id, c) = configured_curve(cfg)?;
    let opts = field_options(cfg);
    let l = c.length();
    let mut warnings = Vec::new();
    if !c.closed {
        warnings.push("curve is open; traces are of the end-to-end propagator".to_string());
    }
    let (u_ad, ad) = adiabatic_propagator(&c, 0.0, l, cfg.grid.quad_n)?;
    let oracle = ode_propagator_oracle(&c, 0.0, l, cfg.tolerances.ode, &opts)?;
    let mut t = Table::new(&["curve", "n", "Re_tr", "Im_tr", "Phi_adiabatic"]);
    let mut errors = Vec::new();
    let mut worst_unitarity = 0.0f64;
    for &n in &cfg.grid.wilson_segments {
        let u = path_ordered_propagator(&c, 0.0, l, n, &opts)?;
        let tr = u.trace();
        worst_unitarity = worst_unitarity.max(u.unitarity_defect());
        errors.push((n, u.distance(&oracle)));
        t.push(vec![Cell::S(id.as_str().into()), Cell::I(n as i64), tr.re.into(), tr.im.into(), ad.phi_total.into()]);
    }
    let orders: Vec<Value> = errors
        .windows(2)
        .map(|w| {
            let (n1, e1) = w[0];
            let (n2, e2) = w[1];
            let order = (e1 / e2).ln() / (n2 as f64 / n1 as f64).ln();
            json!({ "from": n1, "to": n2, "order": if order.is_finite() { Some(order) } else { None } })
        })
        .collect();
    let (n_max, d_max) = *errors.iter().max_by_key(|e| e.0).expect("validated non-empty");
    let mut failures = Vec::new();
    if d_max > cfg.tolerances.oracle_agreement {
        failures.push(format!("product (n = {n_max}) and ODE oracle differ by {d_max:e}"));
    }
    let tr_o = oracle.trace();
    let tr_ad = u_ad.trace();
    let mut out = RunOutput::new(json!({
        "curve": curve_summary(id, &c),
        "oracle": { "tolerance": cfg.tolerances.ode, "re_tr": tr_o.re, "im_tr": tr_o.im },
        "product_vs_oracle": errors.iter().map(|(n, d)| json!({ "n": n, "distance": d })).collect::<Vec<_>>(),
        "observed_order": orders,
        "max_unitarity_defect": worst_unitarity,
        "adiabatic": {
            "phi_total": ad.phi_total,
            "phi_n": ad.phi_n,
            "phi_q": ad.phi_q,
            "phi_s": ad.phi_s,
            "h_darboux": ad.h.to_array(),
            "re_tr": tr_ad.re,
            "two_cos_half_phi": 2.0 * (ad.phi_total / 2.0).cos(),
        },
    }));
    out.warnings = warnings;
    out.failures = failures;
    out.files.add("wilson.csv", t.render());
    Ok(out)
}

fn flux(cfg: &Config) -> Result<RunOutput, RunError> {
    let (id, c) = configured_curve(cfg)?;
    let spec = &cfg.flux;
    let seed = spec
        .seed
        .ok_or_else(|| ConfigError::new("flux.seed", "required for flux runs: a chart point inside the chosen region"))?;
    let region = Region::from_curve(&c, spec.vertices, ChartClosure::from(spec.closure), (seed[0], seed[1]))
        .map_err(|e| match e {
            Error::InvalidInput(m) => RunError::Config(ConfigError::new("flux", m)),
            other => other.into(),
        })?;
    let rep = gauss_bonnet_and_flux(&c, &region, spec.euler_chi, FluxOptions { quad_n: cfg.grid.quad_n, grid: spec.grid })
        .map_err(|e| match e {
            Error::InvalidInput(m) => RunError::Config(ConfigError::new("flux.seed", m)),
            other => other.into(),
        })?;
    let closure = match spec.closure {
        ClosureSpec::Straight => "straight",
        ClosureSpec::ViaUMin => "via_u_min",
        ClosureSpec::ViaUMax => "via_u_max",
    };
    let report = json!({
        "curve": curve_summary(id, &c),
        "region": {
            "seed": seed,
            "closure": closure,
            "euler_chi": spec.euler_chi,
            "vertices": spec.vertices,
            "grid": spec.grid,
            "cells_inside": rep.cells_inside,
            "cells_boundary": rep.cells_boundary,
        },
        "phi_N": rep.phi_n,
        "corner_turning": rep.corner_turning,
        "orientation": rep.orientation,
        "area_integral_K": rep.area_integral_k,
        "euler_chi": rep.euler_chi,
        "gb_residual": rep.gb_residual,
        "flux_over_Phi0": rep.flux_over_phi0,
        "flux_si_over_Phi0": rep.flux_si_over_phi0,
        "flux_gauss_bonnet_over_Phi0": rep.flux_gauss_bonnet,
        "unit_identity_difference": (rep.flux_si_over_phi0 - rep.flux_over_phi0).abs(),
    });
    let mut out = RunOutput::new(report.clone());
    if rep.gb_residual.abs() > cfg.tolerances.gauss_bonnet {
        out.failures.push(format!("Gauss–Bonnet residual {:e} exceeds {:e}", rep.gb_residual, cfg.tolerances.gauss_bonnet));
    }
    out.files.add("flux.json", crate::output::to_json(&report));
    Ok(out)
}

fn conductance(cfg: &Config) -> Result<RunOutput, RunError> {
    let cd = &cfg.conductance;
    let spec = InterferometerSpec {
        phi_in: cd.phi_in,
        n_steps: cd.arm_steps,
        include_dynamical_phase: cd.dynamical_phase,
        k: cd.k,
        field: field_options(cfg),
    };
    let cyl = host_options(cfg, CurveId::VivianiOnCylinder)?;
    let sph = host_options(cfg, CurveId::VivianiOnSphere)?;
    // Both hosts share the parameter period, so one detector grid serves both.
    let grid = sweep_grid(&cyl, cd.phi_in, cd.points);
    let g_cyl = conductance_sweep(&cyl, &spec, &grid)?;
    let g_sph = conductance_sweep(&sph, &spec, &grid)?;
    let mut t = Table::new(&["phi_out", "G_cylinder", "G_sphere"]);
    let mut max_diff = 0.0f64;
    let mut out_of_range = 0usize;
    for ((p, a), b) in grid.iter().zip(&g_cyl).zip(&g_sph) {
        t.push(vec![(*p).into(), a.conductance.into(), b.conductance.into()]);
        max_diff = max_diff.max((a.conductance - b.conductance).abs());
        for g in [a.conductance, b.conductance] {
            if !(-1e-12..=2.0 + 1e-12).contains(&g) {
                out_of_range += 1;
            }
        }
    }
    let mean = |s: &[dspin::Transmission<f64>]| s.iter().map(|x| x.conductance).sum::<f64>() / s.len() as f64;
    let mut out = RunOutput::new(json!({
        "phi_in": cd.phi_in,
        "points": cd.points,
        "arm_steps": cd.arm_steps,
        "dynamical_phase": cd.dynamical_phase,
        "cylinder": { "mean": mean(&g_cyl), "amplitude": sweep_amplitude(&g_cyl) },
        "sphere": { "mean": mean(&g_sph), "amplitude": sweep_amplitude(&g_sph) },
        "max_pointwise_difference": max_diff,
    }));
    if out_of_range > 0 {
        out.failures.push(format!("{out_of_range} conductance values outside [0, 2]"));
    }
    if cfg.field.extra == [0.0; 3] && cfg.field.coupling == CouplingSpec::Connection && !cd.dynamical_phase {
        out.warnings.push(
            "with no extra field and no dynamical phase, G = 1 + Re tr(U_loop)/2 does not depend on phi_out".to_string(),
        );
    }
    out.files.add("conductance.csv", t.render());
    Ok(out)
}

pub fn flags_json(rep: &ConventionReport) -> Value {
    Value::Array(
        rep.flags
            .iter()
            .map(|f| {
                json!({
                    "curve": f.curve.as_str(),
                    "quantity": f.quantity.as_str(),
                    "checks": f.failed.iter().map(|c| json!({ "description": c.description, "max_difference": c.max_difference })).collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

fn report_json(rep: &ConventionReport) -> Value {
    let rows: Vec<Value> = rep
        .rows
        .iter()
        .map(|r| {
            json!({
                "curve": r.curve.as_str(),
                "label": r.curve.label(),
                "referenced": r.referenced,
                "comparisons": r.comparisons.iter().map(|c| json!({
                    "quantity": c.quantity.as_str(),
                    "magnitude_error": c.magnitude_error,
                    "sign": c.sign.map(SignRelation::as_str),
                })).collect::<Vec<_>>(),
                "sign_deltas": r.sign_deltas.iter().map(|q| q.as_str()).collect::<Vec<_>>(),
                "checks": r.checks.iter().map(|c| json!({
                    "quantity": c.quantity.as_str(),
                    "description": c.description,
                    "max_difference": c.max_difference,
                    "passed": c.passed,
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "tolerance": rep.tolerance,
        "grid": rep.grid,
        "tau_g_branch": {
            "selected": rep.selected_branch(),
            "minus_residual": rep.branch_minus_residual,
            "plus_residual": rep.branch_plus_residual,
        },
        "flags": flags_json(rep),
        "rows": rows,
    })
}

fn report_text(rep: &ConventionReport) -> String {
    let mut s = String::new();
    s.push_str(&format!("Convention report (grid {}, tolerance {:e})\n", rep.grid, rep.tolerance));
    s.push_str(&format!(
        "tau_g branch: {} (residuals: minus {:.3e}, plus {:.3e})\n\n",
        rep.selected_branch().unwrap_or("undetermined"),
        rep.branch_minus_residual,
        rep.branch_plus_residual
    ));
    for r in &rep.rows {
        s.push_str(&format!("{} ({})\n", r.curve.label(), r.curve.as_str()));
        if !r.referenced {
            s.push_str("  no closed-form reference\n\n");
            continue;
        }
        for c in &r.comparisons {
            let sign = c.sign.map_or(String::new(), |x| format!("  sign {}", x.as_str()));
            s.push_str(&format!("  {:<8} max error {:.3e}{}\n", c.quantity.as_str(), c.magnitude_error, sign));
        }
        let deltas: Vec<&str> = r.sign_deltas.iter().map(|q| q.as_str()).collect();
        s.push_str(&format!("  sign deltas: {}\n", if deltas.is_empty() { "none".into() } else { deltas.join(", ") }));
        for c in r.checks.iter().filter(|c| !c.passed) {
            s.push_str(&format!("  FLAG {}: {} (max difference {:.3e})\n", c.quantity.as_str(), c.description, c.max_difference));
        }
        s.push('\n');
    }
    s.push_str(&format!("{} flag(s)\n", rep.flags.len()));
    s
}

fn conventions() -> Result<RunOutput, RunError> {
    let rep = convention_report(REPORT_GRID)?;
    let body = report_json(&rep);
    let mut out = RunOutput::new(json!({ "flags": rep.flags.len(), "tau_g_branch": rep.selected_branch() }));
    out.files.add("convention_report.json", to_json(&body));
    out.files.add("convention_report.txt", report_text(&rep));
    Ok(out)
}
