//! Convention report: numeric Darboux invariants against the reference closed
//! forms, per-component sign deltas, and internal-consistency checks of the
//! closed forms themselves.
//!
//! Failed checks are grouped by `(curve, quantity)`; each group is one flag.

use crate::catalog::{default_curve, CurveId, CurveParams};
use crate::error::Result;
use crate::hamiltonian::potentials_from_sample;
use crate::reference::{closed_form_reference, ClosedFormReference};

pub const REPORT_TOLERANCE: f64 = 1e-6;
pub const REPORT_GRID: usize = 256;
const SIGN_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantity {
    KappaG,
    KappaN,
    TauG,
    VSg,
    VG,
}

impl Quantity {
    pub const ALL: [Quantity; 5] = [Quantity::KappaG, Quantity::KappaN, Quantity::TauG, Quantity::VSg, Quantity::VG];

    pub fn as_str(self) -> &'static str {
        match self {
            Quantity::KappaG => "kappa_g",
            Quantity::KappaN => "kappa_n",
            Quantity::TauG => "tau_g",
            Quantity::VSg => "v_sg",
            Quantity::VG => "v_g",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignRelation {
    Agree,
    Opposite,
    Mixed,
    /// One side vanishes on the whole grid.
    Zero,
}

impl SignRelation {
    pub fn as_str(self) -> &'static str {
        match self {
            SignRelation::Agree => "agree",
            SignRelation::Opposite => "opposite",
            SignRelation::Mixed => "mixed",
            SignRelation::Zero => "zero",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub quantity: Quantity,
    /// Max over the grid of `||numeric| - |reference||` (plain difference for `κ_n` and potentials).
    pub magnitude_error: f64,
    /// `None` for quantities whose sign is fixed by the surface.
    pub sign: Option<SignRelation>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub curve: CurveId,
    pub quantity: Quantity,
    pub description: &'static str,
    pub max_difference: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub curve: CurveId,
    /// Whether a reference closed form exists for the curve.
    pub referenced: bool,
    pub comparisons: Vec<Comparison>,
    /// Quantities whose sign is opposite or mixed relative to the reference.
    pub sign_deltas: Vec<Quantity>,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Flag {
    pub curve: CurveId,
    pub quantity: Quantity,
    pub failed: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConventionReport {
    pub tolerance: f64,
    pub grid: usize,
    pub rows: Vec<CurveRow>,
    pub flags: Vec<Flag>,
    /// Largest residuals of `τ_g = -(τ - θ')` and `τ_g = +(τ - θ')` over the catalog.
    pub branch_minus_residual: f64,
    pub branch_plus_residual: f64,
}

impl ConventionReport {
    /// `"minus"` or `"plus"` when exactly one branch holds on every catalog curve.
    pub fn selected_branch(&self) -> Option<&'static str> {
        match (self.branch_minus_residual < REPORT_TOLERANCE, self.branch_plus_residual < REPORT_TOLERANCE) {
            (true, false) => Some("minus"),
            (false, true) => Some("plus"),
            _ => None,
        }
    }
}

#[derive(Default)]
struct Acc {
    max: f64,
}

impl Acc {
    fn push(&mut self, x: f64) {
        self.max = self.max.max(x.abs());
    }
}

#[derive(Default)]
struct SignAcc {
    agree: usize,
    opposite: usize,
}

impl SignAcc {
    fn push(&mut self, num: f64, reference: f64) {
        if num.abs() > SIGN_FLOOR && reference.abs() > SIGN_FLOOR {
            if num.signum() == reference.signum() {
                self.agree += 1;
            } else {
                self.opposite += 1;
            }
        }
    }

    fn relation(&self) -> SignRelation {
        match (self.agree, self.opposite) {
            (0, 0) => SignRelation::Zero,
            (_, 0) => SignRelation::Agree,
            (0, _) => SignRelation::Opposite,
            _ => SignRelation::Mixed,
        }
    }
}

fn row_for(id: CurveId, grid: usize) -> Result<CurveRow> {
    let curve = default_curve::<f64>(id)?;
    let params = CurveParams::<f64>::default();
    if !CurveId::REFERENCED.contains(&id) {
        return Ok(CurveRow { curve: id, referenced: false, comparisons: Vec::new(), sign_deltas: Vec::new(), checks: Vec::new() });
    }
    let mut err: [Acc; 5] = Default::default();
    let mut sign_kg = SignAcc::default();
    let mut sign_tg = SignAcc::default();
    let mut beta_consistency: [Acc; 3] = Default::default();
    let mut vsg_consistency = Acc::default();
    for i in 0..grid {
        let phi = curve.t0 + (curve.t1 - curve.t0) * (i as f64 + 0.5) / grid as f64;
        let d = curve.darboux_at_param(phi)?;
        let pot = potentials_from_sample(&d);
        let r: ClosedFormReference<f64> = closed_form_reference(id, phi, &params)?;
        let [tg_ref, kg_ref, minus_kn_ref] = r.beta_printed;
        err[0].push(d.kappa_g.abs() - kg_ref.abs());
        err[1].push(d.kappa_n + minus_kn_ref);
        err[2].push(d.tau_g.abs() - tg_ref.abs());
        err[3].push(pot.v_sg - r.v_sg_printed);
        err[4].push(pot.v_g - r.v_g_printed);
        sign_kg.push(d.kappa_g, kg_ref);
        sign_tg.push(d.tau_g, tg_ref);
        let from_omega = r.beta_from_omega();
        for k in 0..3 {
            beta_consistency[k].push(r.beta_printed[k] - from_omega[k]);
        }
        vsg_consistency.push(r.v_sg_printed - r.v_sg_from_omega());
    }
    let comparisons: Vec<Comparison> = Quantity::ALL
        .iter()
        .zip(&err)
        .map(|(&q, e)| Comparison {
            quantity: q,
            magnitude_error: e.max,
            sign: match q {
                Quantity::KappaG => Some(sign_kg.relation()),
                Quantity::TauG => Some(sign_tg.relation()),
                _ => None,
            },
        })
        .collect();
    let sign_deltas = comparisons
        .iter()
        .filter(|c| matches!(c.sign, Some(SignRelation::Opposite | SignRelation::Mixed)))
        .map(|c| c.quantity)
        .collect();
    let check = |quantity, description, max_difference: f64| Check {
        curve: id,
        quantity,
        description,
        max_difference,
        passed: max_difference < REPORT_TOLERANCE,
    };
    let mut checks = vec![
        check(Quantity::KappaG, "numeric |kappa_g| vs reference beta second component", err[0].max),
        check(Quantity::KappaN, "numeric kappa_n vs reference beta third component", err[1].max),
        check(Quantity::TauG, "numeric |tau_g| vs reference beta first component", err[2].max),
        check(Quantity::VSg, "numeric V_sg vs reference V_sg", err[3].max),
        check(Quantity::VG, "numeric V_g vs reference V_g", err[4].max),
        check(Quantity::TauG, "reference beta first component vs its gauge-term sigma_s coefficient", beta_consistency[0].max),
        check(Quantity::KappaG, "reference beta second component vs its gauge-term sigma_N coefficient", beta_consistency[1].max),
        check(Quantity::KappaN, "reference beta third component vs its gauge-term sigma_q coefficient", beta_consistency[2].max),
        check(Quantity::VSg, "reference V_sg vs -(kappa_g^2 + 2K)/4 with the gauge-term kappa_g", vsg_consistency.max),
    ];
    checks.sort_by_key(|c| c.quantity);
    Ok(CurveRow { curve: id, referenced: true, comparisons, sign_deltas, checks })
}

/// Builds the report over the whole catalog with default parameters on a `grid`-point
/// parameter grid (cell midpoints, so closed-curve seams are avoided).
pub fn convention_report(grid: usize) -> Result<ConventionReport> {
    let rows: Vec<CurveRow> = CurveId::ALL.iter().map(|&id| row_for(id, grid)).collect::<Result<_>>()?;
    let mut flags: Vec<Flag> = Vec::new();
    for row in &rows {
        for q in Quantity::ALL {
            let failed: Vec<Check> = row.checks.iter().filter(|c| c.quantity == q && !c.passed).cloned().collect();
            if !failed.is_empty() {
                flags.push(Flag { curve: row.curve, quantity: q, failed });
            }
        }
    }
    let (mut minus, mut plus) = (0.0f64, 0.0f64);
    for id in CurveId::REFERENCED {
        let r = default_curve::<f64>(id)?.torsion_branch_residuals(64)?;
        minus = minus.max(r.minus);
        plus = plus.max(r.plus);
    }
    Ok(ConventionReport {
        tolerance: REPORT_TOLERANCE,
        grid,
        rows,
        flags,
        branch_minus_residual: minus,
        branch_plus_residual: plus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exactly_two_flags_on_catalog() {
        let rep = convention_report(REPORT_GRID).unwrap();
        let keys: Vec<(CurveId, Quantity)> = rep.flags.iter().map(|f| (f.curve, f.quantity)).collect();
        assert_eq!(keys, vec![(CurveId::HelixExp, Quantity::KappaG), (CurveId::VivianiOnSphere, Quantity::VSg)]);
        assert_eq!(rep.selected_branch(), Some("minus"));
    }

    #[test]
    fn c1_row_is_clean() {
        let rep = convention_report(64).unwrap();
        let c1 = &rep.rows[0];
        assert_eq!(c1.curve, CurveId::HelixConst);
        assert!(c1.sign_deltas.is_empty());
        assert!(c1.comparisons.iter().all(|c| c.magnitude_error < 1e-6));
    }

    #[test]
    fn kappa_g_sign_deltas() {
        let rep = convention_report(64).unwrap();
        let deltas = |id| rep.rows.iter().find(|r| r.curve == id).unwrap().sign_deltas.clone();
        assert_eq!(deltas(CurveId::HelixExp), vec![Quantity::KappaG]);
        assert!(deltas(CurveId::HelixLog).is_empty());
        assert_eq!(deltas(CurveId::VivianiOnCylinder), vec![Quantity::KappaG]);
    }
}
