//! Error tables: projection, filtered once and filtered at every level, over
//! three meshes, all measured on the finest one.

use std::io::Write;

use crate::error::{Error, Result};
use crate::field::ModalField;
use crate::projection::{default_quadrature_points, refine_by_projection};
use crate::refine::{enhance, RefineMode, Strategy};
use crate::MAX_DEGREE;

use super::errors::{compute_errors, pollution_mask, ErrorReport, PollutionMask, DEFAULT_ERROR_NODES};
use super::functions::TestFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    Ic1,
    Ic2,
    Ic3,
    Ic4,
    Ic3d,
}

pub const CASES: [Case; 5] = [Case::Ic1, Case::Ic2, Case::Ic3, Case::Ic4, Case::Ic3d];

impl Case {
    pub fn parse(s: &str) -> Result<Self> {
        CASES
            .into_iter()
            .find(|c| c.id().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownCase(s.to_string()))
    }

    pub fn id(self) -> &'static str {
        match self {
            Case::Ic1 => "IC1-2D",
            Case::Ic2 => "IC2-2D",
            Case::Ic3 => "IC3-2D",
            Case::Ic4 => "IC4-2D",
            Case::Ic3d => "IC-3D",
        }
    }

    pub fn function(self) -> TestFunction {
        let (name, dim) = match self {
            Case::Ic1 => ("ic1", 2),
            Case::Ic2 => ("ic2", 2),
            Case::Ic3 => ("ic3", 2),
            Case::Ic4 => ("ic4", 2),
            Case::Ic3d => ("sin-sum", 3),
        };
        TestFunction::lookup(name, dim).expect("registered case function")
    }

    pub fn base_n(self) -> usize {
        match self {
            Case::Ic1 => 35,
            Case::Ic2 => 160,
            Case::Ic3 | Case::Ic4 => 70,
            Case::Ic3d => 15,
        }
    }

    /// Projection rule that reproduces the published projection errors.
    pub fn projection_rule(self) -> ProjectionRule {
        ProjectionRule::Minimal
    }

    /// Whether errors exclude polluted elements.
    pub fn masked(self) -> bool {
        matches!(self, Case::Ic3 | Case::Ic4)
    }
}

/// Gauss points per axis used to project the initial condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionRule {
    /// The case's own rule, see [`Case::projection_rule`].
    CaseDefault,
    /// `p + 1` points.
    Minimal,
    /// `max(p + 2, 10)` points.
    Accurate,
    Points(usize),
}

impl ProjectionRule {
    pub fn points(self, case: Case, degree: usize) -> usize {
        match self {
            ProjectionRule::CaseDefault => case.projection_rule().points(case, degree),
            ProjectionRule::Minimal => degree + 1,
            ProjectionRule::Accurate => default_quadrature_points(degree),
            ProjectionRule::Points(q) => q,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ExperimentOptions {
    pub mode: RefineMode,
    pub nodes: usize,
    pub projection: ProjectionRule,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        Self {
            mode: RefineMode::Stencil,
            nodes: DEFAULT_ERROR_NODES,
            projection: ProjectionRule::CaseDefault,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub degree: usize,
    pub n: usize,
    pub projection: ErrorReport,
    pub once: ErrorReport,
    pub each: ErrorReport,
}

#[derive(Debug, Clone)]
pub struct ExperimentTable {
    pub case: Case,
    pub eval_n: usize,
    pub rows: Vec<TableRow>,
}

/// Pollution level of each column on each row: projection never filters,
/// "once" filters on the first refinement only.
const LEVELS: [[usize; 3]; 3] = [[0, 0, 0], [0, 1, 1], [0, 1, 2]];

/// Three rows for one degree.
pub fn run_degree(case: Case, degree: usize, opts: &ExperimentOptions) -> Result<Vec<TableRow>> {
    if degree > MAX_DEGREE {
        return Err(Error::UnsupportedDegree(degree));
    }
    let f = case.function();
    let n0 = case.base_n();
    let eval_n = 4 * n0;
    let masks: Vec<Option<PollutionMask>> = (0..3)
        .map(|level| {
            if case.masked() {
                pollution_mask(&f, n0, level, n0 << level, degree).map(Some)
            } else {
                Ok(None)
            }
        })
        .collect::<Result<_>>()?;
    let err = |field: &ModalField, level: usize| compute_errors(field, &f, eval_n, masks[level].as_ref(), opts.nodes);

    let f0 = f.project_with(n0, degree, opts.projection.points(case, degree))?;
    let p1 = refine_by_projection(&f0);
    let p2 = refine_by_projection(&p1);
    let once1 = enhance(&f0, 1, Strategy::Once, opts.mode)?;
    let once2 = enhance(&f0, 2, Strategy::Once, opts.mode)?;
    let each1 = enhance(&f0, 1, Strategy::Each, opts.mode)?;
    let each2 = enhance(&f0, 2, Strategy::Each, opts.mode)?;
    let fields = [[&f0, &f0, &f0], [&p1, &once1, &each1], [&p2, &once2, &each2]];

    let mut rows = Vec::with_capacity(3);
    for (r, cols) in fields.iter().enumerate() {
        let lv = LEVELS[r];
        rows.push(TableRow {
            degree,
            n: n0 << r,
            projection: err(cols[0], lv[0])?,
            once: err(cols[1], lv[1])?,
            each: err(cols[2], lv[2])?,
        });
    }
    Ok(rows)
}

pub fn run_experiment(case: Case, degrees: &[usize], opts: &ExperimentOptions) -> Result<ExperimentTable> {
    let mut rows = Vec::new();
    for &p in degrees {
        log::info!("{}: degree {p}", case.id());
        rows.extend(run_degree(case, p, opts)?);
    }
    Ok(ExperimentTable {
        case,
        eval_n: 4 * case.base_n(),
        rows,
    })
}

/// Scientific notation with three significant digits and a two-digit exponent, e.g. `4.01e-02`.
pub fn format_sci(v: f64) -> String {
    let s = format!("{v:.2e}");
    match s.split_once('e') {
        Some((mant, exp)) => {
            let e: i32 = exp.parse().unwrap_or(0);
            let sign = if e < 0 { '-' } else { '+' };
            format!("{mant}e{sign}{:02}", e.abs())
        }
        None => s,
    }
}

impl ExperimentTable {
    pub fn write_csv<W: Write>(&self, out: &mut W, full_precision: bool) -> Result<()> {
        let fmt = |v: f64| if full_precision { format!("{v:.16e}") } else { format_sci(v) };
        writeln!(
            out,
            "case,degree,N,proj_L2,proj_Linf,once_L2,once_Linf,each_L2,each_Linf,proj_excluded,once_excluded,each_excluded"
        )?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                self.case.id(),
                r.degree,
                r.n,
                fmt(r.projection.l2),
                fmt(r.projection.linf),
                fmt(r.once.l2),
                fmt(r.once.linf),
                fmt(r.each.l2),
                fmt(r.each.linf),
                r.projection.excluded,
                r.once.excluded,
                r.each.excluded
            )?;
        }
        Ok(())
    }

    pub fn write_markdown<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "Case {} (errors on N = {})", self.case.id(), self.eval_n)?;
        writeln!(out)?;
        writeln!(
            out,
            "| p | N    | Projection L2 | Projection Linf | Once L2  | Once Linf | Each L2  | Each Linf |"
        )?;
        writeln!(
            out,
            "|---|------|---------------|-----------------|----------|-----------|----------|-----------|"
        )?;
        for r in &self.rows {
            writeln!(
                out,
                "| {} | {:<4} | {:<13} | {:<15} | {:<8} | {:<9} | {:<8} | {:<9} |",
                r.degree,
                r.n,
                format_sci(r.projection.l2),
                format_sci(r.projection.linf),
                format_sci(r.once.l2),
                format_sci(r.once.linf),
                format_sci(r.each.l2),
                format_sci(r.each.linf)
            )?;
        }
        Ok(())
    }
}
