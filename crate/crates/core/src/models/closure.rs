use std::fmt::Write as _;

use serde::Serialize;

use super::{ClosureExpectation, ConstraintId, ConstraintSet, ModelSpec};
use crate::algebra::{PolyExpr, Var};
use crate::error::{Error, Result};

/// One cell of a closure table: `{row, col} = Σ_k combination[k]·C_k + explicit`.
#[derive(Clone, Debug, PartialEq)]
pub struct TableEntry {
    pub combination: [PolyExpr; 5],
    pub explicit: PolyExpr,
    /// Powers of the slow parameter λ factored out of `explicit`; they count
    /// towards the order of the explicit term.
    pub slow_order: u32,
}

impl Default for TableEntry {
    fn default() -> Self {
        Self::zero()
    }
}

impl TableEntry {
    pub fn zero() -> Self {
        Self {
            combination: Default::default(),
            explicit: PolyExpr::zero(),
            slow_order: 0,
        }
    }

    fn new(terms: &[(PolyExpr, ConstraintId)], explicit: PolyExpr) -> Self {
        let mut e = Self::zero();
        for (coef, id) in terms {
            e.combination[id.index()] += coef;
        }
        e.explicit = explicit;
        e
    }

    fn negated(&self) -> Self {
        Self {
            combination: self.combination.clone().map(|c| -c),
            explicit: -&self.explicit,
            slow_order: self.slow_order,
        }
    }

    fn with_explicit(mut self, explicit: PolyExpr, slow_order: u32) -> Self {
        self.explicit = explicit;
        self.slow_order = slow_order;
        self
    }

    /// Evaluates the combination against a constraint set.
    pub fn combine(&self, cs: &ConstraintSet) -> PolyExpr {
        let mut out = PolyExpr::zero();
        for (id, c) in cs.iter() {
            let coef = &self.combination[id.index()];
            if !coef.is_zero() {
                out += &(coef * c);
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TableSource {
    /// Tables exactly as printed, misprints included.
    Published,
    /// Tables with every cell rederived from the bracket engine.
    Corrected,
}

/// A 5×5 table of closure relations, rows and columns ordered `C, C_t, C_pt, C_q, C_p`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosureTable {
    pub entries: [[TableEntry; 5]; 5],
    pub source: TableSource,
}

fn v(x: Var) -> PolyExpr {
    PolyExpr::var(x)
}

fn k(c: f64) -> PolyExpr {
    PolyExpr::constant(c)
}

fn half_i_hbar() -> PolyExpr {
    PolyExpr::i_hbar().scale(0.5)
}

impl ClosureTable {
    fn empty(source: TableSource) -> Self {
        Self {
            entries: Default::default(),
            source,
        }
    }

    fn set(&mut self, row: ConstraintId, col: ConstraintId, e: TableEntry) {
        self.entries[row.index()][col.index()] = e;
    }

    fn set_pair(&mut self, row: ConstraintId, col: ConstraintId, e: TableEntry) {
        self.entries[col.index()][row.index()] = e.negated();
        self.entries[row.index()][col.index()] = e;
    }

    pub fn get(&self, row: ConstraintId, col: ConstraintId) -> &TableEntry {
        &self.entries[row.index()][col.index()]
    }

    /// The table for `model`. Published tables exist only for the free and
    /// quadratic-potential models.
    pub fn for_model(model: &ModelSpec, source: TableSource) -> Result<Self> {
        match (model, source) {
            (ModelSpec::FreeMassive { .. } | ModelSpec::Massless, TableSource::Published) => {
                Ok(free_published())
            }
            (ModelSpec::QuadraticPotential { .. }, TableSource::Published) => {
                Ok(quadratic_published())
            }
            (_, TableSource::Published) => Err(Error::InvalidParameter(format!(
                "no published closure table for model {}",
                model.name()
            ))),
            (ModelSpec::FreeMassive { .. } | ModelSpec::Massless, TableSource::Corrected) => {
                Ok(free_corrected())
            }
            (ModelSpec::QuadraticPotential { .. }, TableSource::Corrected) => {
                Ok(quadratic_corrected())
            }
            (ModelSpec::LinearTimePotential { lambda, m }, TableSource::Corrected) => {
                Ok(linear_time(*m, *lambda))
            }
            (ModelSpec::SlowPolynomialPotential { lambda, vtilde, .. }, TableSource::Corrected) => {
                Ok(slow_polynomial(model, *lambda, vtilde))
            }
        }
    }

    /// Cells in which two tables disagree.
    pub fn differences(&self, other: &ClosureTable) -> Vec<(ConstraintId, ConstraintId)> {
        let mut out = Vec::new();
        for row in ConstraintId::ALL {
            for col in ConstraintId::ALL {
                let (a, b) = (self.get(row, col), other.get(row, col));
                if a.combination != b.combination || a.explicit != b.explicit {
                    out.push((row, col));
                }
            }
        }
        out
    }
}

fn free_published() -> ClosureTable {
    use ConstraintId::*;
    use Var::{Pt, P};
    let mut t = ClosureTable::empty(TableSource::Published);
    let z = PolyExpr::zero;
    t.set(C, Ct, TableEntry::new(&[(k(-2.0), Cpt)], z()));
    t.set(C, Cq, TableEntry::new(&[(k(-2.0), Cp)], z()));
    t.set(Ct, C, TableEntry::new(&[(k(2.0), Cpt)], z()));
    t.set(
        Ct,
        Cpt,
        TableEntry::new(&[(4.0 * v(Pt), Cpt), (-2.0 * v(P), Cp)], z()),
    );
    t.set(
        Ct,
        Cq,
        TableEntry::new(&[(2.0 * v(P), Ct), (2.0 * v(Pt), Cq)], z()),
    );
    t.set(Ct, Cp, TableEntry::new(&[(2.0 * v(Pt), Cp)], z()));
    t.set(
        Cpt,
        Ct,
        TableEntry::new(&[(2.0 * v(P), Cp), (-4.0 * v(Pt), Cpt)], z()),
    );
    t.set(Cpt, Cq, TableEntry::new(&[(2.0 * v(P), Cpt)], z()));
    t.set(Cq, C, TableEntry::new(&[(2.0 * v(P), Cp)], z()));
    t.set(
        Cq,
        Ct,
        TableEntry::new(&[(-2.0 * v(P), Ct), (-2.0 * v(Pt), Cq)], z()),
    );
    t.set(Cq, Cpt, TableEntry::new(&[(-2.0 * v(P), Cpt)], z()));
    t.set(
        Cq,
        Cp,
        TableEntry::new(&[(2.0 * v(Pt), Cpt), (-4.0 * v(P), Cp)], z()),
    );
    t.set(Cp, Ct, TableEntry::new(&[(-2.0 * v(Pt), Cp)], z()));
    t.set(
        Cp,
        Cq,
        TableEntry::new(&[(4.0 * v(P), Cp), (-2.0 * v(Pt), Cpt)], z()),
    );
    t
}

fn free_corrected() -> ClosureTable {
    use ConstraintId::*;
    use Var::{Pt, P};
    let mut t = ClosureTable::empty(TableSource::Corrected);
    let z = PolyExpr::zero;
    t.set_pair(C, Ct, TableEntry::new(&[(k(-2.0), Cpt)], z()));
    t.set_pair(C, Cq, TableEntry::new(&[(k(2.0), Cp)], z()));
    t.set_pair(
        Ct,
        Cpt,
        TableEntry::new(&[(4.0 * v(Pt), Cpt), (-2.0 * v(P), Cp)], z()),
    );
    t.set_pair(
        Ct,
        Cq,
        TableEntry::new(&[(2.0 * v(P), Ct), (2.0 * v(Pt), Cq)], z()),
    );
    t.set_pair(Ct, Cp, TableEntry::new(&[(2.0 * v(Pt), Cp)], z()));
    t.set_pair(Cpt, Cq, TableEntry::new(&[(2.0 * v(P), Cpt)], z()));
    t.set_pair(
        Cq,
        Cp,
        TableEntry::new(&[(2.0 * v(Pt), Cpt), (-4.0 * v(P), Cp)], z()),
    );
    t
}

fn quadratic_published() -> ClosureTable {
    use ConstraintId::*;
    use Var::*;
    let mut t = ClosureTable::empty(TableSource::Published);
    let z = PolyExpr::zero;
    let qp_plus = v(Dqp) + half_i_hbar();
    let qp_minus = v(Dqp) - half_i_hbar();
    let hbar2 = PolyExpr::hbar() * PolyExpr::hbar();

    t.set(C, Ct, TableEntry::new(&[(k(-2.0), Cpt)], z()));
    t.set(C, Cq, TableEntry::new(&[(k(2.0), Cp)], z()));
    t.set(C, Cp, TableEntry::new(&[(k(-2.0), Cq)], z()));

    t.set(Ct, C, TableEntry::new(&[(k(2.0), Cpt)], z()));
    t.set(
        Ct,
        Cpt,
        TableEntry::new(
            &[(4.0 * v(Pt), Cpt), (-2.0 * v(P), Cp), (-2.0 * v(Q), Cq)],
            4.0 * v(Dptp) * v(Dtq) - 4.0 * v(Dptq) * v(Dtp),
        ),
    );
    t.set(
        Ct,
        Cq,
        TableEntry::new(
            &[(2.0 * v(Pt), Cq), (2.0 * v(P), Ct)],
            4.0 * v(Dtq) * &qp_plus + 4.0 * v(Dq2) * v(Dtp),
        ),
    );
    t.set(
        Ct,
        Cp,
        TableEntry::new(
            &[(2.0 * v(Pt), Cp), (2.0 * v(Q), Ct)],
            4.0 * v(Dtq) * v(Dp2) - 4.0 * v(Dtp) * &qp_minus,
        ),
    );

    t.set(
        Cpt,
        Ct,
        TableEntry::new(
            &[(-4.0 * v(Pt), Cpt), (2.0 * v(P), Cp), (2.0 * v(Q), Cq)],
            -4.0 * v(Dptp) * v(Dtq) + 4.0 * v(Dptq) * v(Dtp),
        ),
    );
    t.set(
        Cpt,
        Cq,
        TableEntry::new(
            &[(2.0 * v(P), Cpt)],
            -4.0 * v(Dq2) * v(Dptp) - v(Dptq) * &qp_minus,
        ),
    );
    t.set(
        Cpt,
        Cp,
        TableEntry::new(
            &[(-2.0 * v(Q), Cpt)],
            4.0 * v(Dp2) * v(Dptq) + 4.0 * v(Dptp) * &qp_minus,
        ),
    );

    t.set(Cq, C, TableEntry::new(&[(k(-2.0), Cp)], z()));
    t.set(
        Cq,
        Ct,
        TableEntry::new(
            &[(-2.0 * v(Pt), Cq), (-2.0 * v(P), Ct)],
            -4.0 * v(Dtq) * &qp_plus - 4.0 * v(Dtp) * v(Dq2),
        ),
    );
    t.set(
        Cq,
        Cpt,
        TableEntry::new(
            &[(-2.0 * v(P), Cpt)],
            4.0 * v(Dq2) * v(Dptp) + 4.0 * v(Dptq) * &qp_minus,
        ),
    );
    t.set(
        Cq,
        Cp,
        TableEntry::new(
            &[(2.0 * v(Pt), Cpt), (-4.0 * v(P), Cp), (-4.0 * v(Q), Cq)],
            4.0 * (v(Dq2) * v(Dp2) - hbar2.scale(0.25)) - 4.0 * v(Dqp) * v(Dqp),
        ),
    );

    t.set(Cp, C, TableEntry::new(&[(k(2.0), Cq)], z()));
    t.set(
        Cp,
        Ct,
        TableEntry::new(
            &[(-2.0 * v(Pt), Cp), (2.0 * v(Q), Ct)],
            -4.0 * v(Dtq) * v(Dp2) + 4.0 * v(Dtp) * &qp_minus,
        ),
    );
    t.set(
        Cp,
        Cpt,
        TableEntry::new(
            &[(2.0 * v(Q), Cpt)],
            -4.0 * v(Dp2) * v(Dptq) + 4.0 * v(Dptp) * &qp_minus,
        ),
    );
    t.set(
        Cp,
        Cq,
        TableEntry::new(
            &[(4.0 * v(P), Cp), (4.0 * v(Q), Cq), (-2.0 * v(Pt), Cpt)],
            -4.0 * (v(Dq2) * v(Dp2) - hbar2.scale(0.25)) - 4.0 * v(Dqp) * v(Dqp),
        ),
    );
    t
}

fn quadratic_corrected() -> ClosureTable {
    use ConstraintId::*;
    use Var::*;
    let mut t = ClosureTable::empty(TableSource::Corrected);
    let z = PolyExpr::zero;
    let qp_plus = v(Dqp) + half_i_hbar();
    let qp_minus = v(Dqp) - half_i_hbar();
    let hbar2 = PolyExpr::hbar() * PolyExpr::hbar();

    t.set_pair(C, Ct, TableEntry::new(&[(k(-2.0), Cpt)], z()));
    t.set_pair(C, Cq, TableEntry::new(&[(k(2.0), Cp)], z()));
    t.set_pair(C, Cp, TableEntry::new(&[(k(-2.0), Cq)], z()));
    t.set_pair(
        Ct,
        Cpt,
        TableEntry::new(
            &[(4.0 * v(Pt), Cpt), (-2.0 * v(P), Cp), (-2.0 * v(Q), Cq)],
            4.0 * v(Dptp) * v(Dtq) - 4.0 * v(Dptq) * v(Dtp),
        ),
    );
    t.set_pair(
        Ct,
        Cq,
        TableEntry::new(
            &[(2.0 * v(Pt), Cq), (2.0 * v(P), Ct)],
            4.0 * v(Dtq) * &qp_plus - 4.0 * v(Dq2) * v(Dtp),
        ),
    );
    t.set_pair(
        Ct,
        Cp,
        TableEntry::new(
            &[(2.0 * v(Pt), Cp), (-2.0 * v(Q), Ct)],
            4.0 * v(Dtq) * v(Dp2) - 4.0 * v(Dtp) * &qp_minus,
        ),
    );
    t.set_pair(
        Cpt,
        Cq,
        TableEntry::new(
            &[(2.0 * v(P), Cpt)],
            -4.0 * v(Dq2) * v(Dptp) + 4.0 * v(Dptq) * &qp_plus,
        ),
    );
    t.set_pair(
        Cpt,
        Cp,
        TableEntry::new(
            &[(-2.0 * v(Q), Cpt)],
            4.0 * v(Dp2) * v(Dptq) - 4.0 * v(Dptp) * &qp_minus,
        ),
    );
    t.set_pair(
        Cq,
        Cp,
        TableEntry::new(
            &[(2.0 * v(Pt), Cpt), (-4.0 * v(P), Cp), (-4.0 * v(Q), Cq)],
            4.0 * v(Dq2) * v(Dp2) - 4.0 * v(Dqp) * v(Dqp) - hbar2,
        ),
    );
    t
}

fn linear_time(m: f64, lambda: f64) -> ClosureTable {
    use ConstraintId::*;
    let mut t = free_corrected();
    let model = ModelSpec::LinearTimePotential { m, lambda };
    let cs = super::build_constraints(&model, &Default::default()).expect("validated by caller");
    let lam = |c: f64, id: ConstraintId| cs.get(id).scale(lambda * c);
    let add = |t: &mut ClosureTable, row, col, explicit: PolyExpr| {
        let e = t.get(row, col).clone().with_explicit(explicit, 1);
        t.set_pair(row, col, e);
    };
    add(&mut t, Ct, Cpt, lam(2.0, Ct));
    add(&mut t, Cpt, Cq, lam(-1.0, Cq));
    add(&mut t, Cpt, Cp, lam(-1.0, Cp));
    add(&mut t, Cq, Cp, lam(1.0, Ct));
    t
}

fn slow_polynomial(model: &ModelSpec, lambda: f64, vtilde: &[f64]) -> ClosureTable {
    use ConstraintId::*;
    let mut t = free_corrected();
    let cs = super::build_constraints(model, &Default::default()).expect("validated by caller");
    // λṼ'(t) as a polynomial in t
    let mut dv = PolyExpr::zero();
    let mut power = PolyExpr::one();
    for (j, c) in vtilde.iter().enumerate() {
        dv += &power.scale(lambda * c * (j as f64 + 1.0));
        power = power * v(Var::T);
    }
    for col in [Ct, Cpt, Cq, Cp] {
        let explicit = &dv * cs.get(col).partial(Var::Pt);
        let e = t.get(C, col).clone().with_explicit(explicit, 1);
        t.set_pair(C, col, e);
    }
    t
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureVerdict {
    Exact,
    OrderHbar,
}

/// Outcome for one bracket `{row, col}`.
#[derive(Clone, Debug)]
pub struct CellReport {
    pub row: ConstraintId,
    pub col: ConstraintId,
    pub bracket: PolyExpr,
    /// `bracket − combination`.
    pub residual: PolyExpr,
    pub expected_explicit: PolyExpr,
    /// Largest coefficient of `residual − expected_explicit`.
    pub mismatch: f64,
    pub matches: bool,
    /// Lowest order among the explicit terms, slow order included.
    pub explicit_grade: Option<u32>,
}

#[derive(Clone, Debug)]
pub struct ClosureReport {
    pub model: ModelSpec,
    pub source: TableSource,
    pub expectation: ClosureExpectation,
    pub cells: Vec<CellReport>,
    pub verdict: Option<ClosureVerdict>,
}

const MATCH_TOL: f64 = 1e-12;

fn max_abs(p: &PolyExpr) -> f64 {
    p.terms().map(|(_, c)| c.norm()).fold(0.0, f64::max)
}

impl ClosureReport {
    /// Checks every cell of `table` against brackets computed from `cs`.
    pub fn compute(cs: &ConstraintSet, table: &ClosureTable) -> Self {
        let mut cells = Vec::with_capacity(25);
        for row in ConstraintId::ALL {
            for col in ConstraintId::ALL {
                let entry = table.get(row, col);
                let bracket = cs.get(row).bracket(cs.get(col));
                let residual = &bracket - entry.combine(cs);
                let scale = max_abs(&bracket).max(1.0);
                let mismatch = max_abs(&(&residual - &entry.explicit));
                let explicit_grade = entry
                    .explicit
                    .min_hbar_grade()
                    .map(|g| g + entry.slow_order);
                cells.push(CellReport {
                    row,
                    col,
                    bracket,
                    residual,
                    expected_explicit: entry.explicit.clone(),
                    mismatch,
                    matches: mismatch <= MATCH_TOL * scale,
                    explicit_grade,
                });
            }
        }
        let all_match = cells.iter().all(|c| c.matches);
        let verdict = if all_match
            && cells
                .iter()
                .all(|c| c.residual.terms().all(|(_, z)| z.norm() <= MATCH_TOL))
        {
            Some(ClosureVerdict::Exact)
        } else if all_match
            && cells
                .iter()
                .all(|c| c.explicit_grade.is_none_or(|g| g >= 2))
        {
            Some(ClosureVerdict::OrderHbar)
        } else {
            None
        };
        Self {
            model: cs.model.clone(),
            source: table.source,
            expectation: cs.closure_expectation,
            cells,
            verdict,
        }
    }

    pub fn cell(&self, row: ConstraintId, col: ConstraintId) -> &CellReport {
        &self.cells[row.index() * 5 + col.index()]
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &CellReport> {
        self.cells.iter().filter(|c| !c.matches)
    }

    /// Verdict agrees with what the model is expected to satisfy.
    pub fn meets_expectation(&self) -> bool {
        matches!(
            (self.verdict, self.expectation),
            (Some(ClosureVerdict::Exact), ClosureExpectation::Exact)
                | (
                    Some(ClosureVerdict::OrderHbar),
                    ClosureExpectation::OrderHbar
                )
        )
    }

    /// Text table of residuals laid out like the closure tables, with mismatching
    /// cells marked `!`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let verdict = match self.verdict {
            Some(ClosureVerdict::Exact) => "exact",
            Some(ClosureVerdict::OrderHbar) => "order_hbar",
            None => "malformed",
        };
        let _ = writeln!(
            out,
            "model: {}  table: {:?}  verdict: {}",
            self.model.name(),
            self.source,
            verdict
        );
        let labels: Vec<&str> = ConstraintId::ALL.iter().map(|c| c.label()).collect();
        let mut rows = vec![std::iter::once("{row,col}".to_string())
            .chain(labels.iter().map(|s| s.to_string()))
            .collect::<Vec<_>>()];
        for row in ConstraintId::ALL {
            let mut line = vec![row.label().to_string()];
            for col in ConstraintId::ALL {
                let c = self.cell(row, col);
                let mut s = compact(&c.residual);
                if !c.matches {
                    s.push_str(" !");
                }
                line.push(s);
            }
            rows.push(line);
        }
        let widths: Vec<usize> = (0..6)
            .map(|j| rows.iter().map(|r| r[j].chars().count()).max().unwrap_or(0))
            .collect();
        for r in rows {
            let cells: Vec<String> = r
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:<w$}"))
                .collect();
            let _ = writeln!(out, "| {} |", cells.join(" | "));
        }
        out
    }
}

/// Checks `cs` against the corrected table for its model and fails with
/// [`Error::MalformedTable`] if any cell disagrees.
pub fn closure_report(cs: &ConstraintSet) -> Result<ClosureReport> {
    let table = ClosureTable::for_model(&cs.model, TableSource::Corrected)?;
    let report = ClosureReport::compute(cs, &table);
    if report.verdict.is_none() {
        let cells: Vec<String> = report
            .mismatches()
            .map(|c| format!("({}, {})", c.row.label(), c.col.label()))
            .collect();
        return Err(Error::MalformedTable(format!(
            "residual mismatch in {}",
            cells.join(", ")
        )));
    }
    Ok(report)
}

fn format_coef(c: num_complex::Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        format!("{}i", c.im)
    } else {
        format!("({}{:+}i)", c.re, c.im)
    }
}

/// Short human-readable rendering used in text tables.
fn compact(p: &PolyExpr) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (m, c) in p.terms() {
        let mut s = format_coef(*c);
        for (x, e) in m.factors() {
            s.push('*');
            s.push_str(x.name());
            if e > 1 {
                let _ = write!(s, "^{e}");
            }
        }
        if m.hbar() > 0 {
            s.push_str("*hbar");
            if m.hbar() > 1 {
                let _ = write!(s, "^{}", m.hbar());
            }
        }
        parts.push(s);
    }
    parts.join(" + ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::build_constraints;

    fn report(model: ModelSpec, source: TableSource) -> ClosureReport {
        let cs = build_constraints(&model, &Default::default()).unwrap();
        ClosureReport::compute(&cs, &ClosureTable::for_model(&model, source).unwrap())
    }

    #[test]
    fn corrected_tables_give_expected_verdicts() {
        let cases = [
            (ModelSpec::FreeMassive { m: 1.3 }, ClosureVerdict::Exact),
            (ModelSpec::Massless, ClosureVerdict::Exact),
            (
                ModelSpec::QuadraticPotential { m: 0.7 },
                ClosureVerdict::OrderHbar,
            ),
            (
                ModelSpec::LinearTimePotential {
                    m: 1.0,
                    lambda: 0.05,
                },
                ClosureVerdict::OrderHbar,
            ),
            (
                ModelSpec::SlowPolynomialPotential {
                    m: 1.0,
                    lambda: 0.02,
                    v0: 0.1,
                    vtilde: vec![1.0, -0.5, 0.25],
                },
                ClosureVerdict::OrderHbar,
            ),
        ];
        for (model, expected) in cases {
            let r = report(model.clone(), TableSource::Corrected);
            assert_eq!(
                r.verdict,
                Some(expected),
                "{}\n{}",
                model.name(),
                r.to_text()
            );
            assert!(r.meets_expectation());
        }
    }

    #[test]
    fn published_misprints_are_localized() {
        let free =
            ClosureTable::for_model(&ModelSpec::FreeMassive { m: 1.0 }, TableSource::Published)
                .unwrap();
        let fixed =
            ClosureTable::for_model(&ModelSpec::FreeMassive { m: 1.0 }, TableSource::Corrected)
                .unwrap();
        use ConstraintId::*;
        assert_eq!(free.differences(&fixed), vec![(C, Cq), (Cq, C)]);

        let quad = ClosureTable::for_model(
            &ModelSpec::QuadraticPotential { m: 1.0 },
            TableSource::Published,
        )
        .unwrap();
        let fixed = ClosureTable::for_model(
            &ModelSpec::QuadraticPotential { m: 1.0 },
            TableSource::Corrected,
        )
        .unwrap();
        assert_eq!(
            quad.differences(&fixed),
            vec![
                (Ct, Cq),
                (Ct, Cp),
                (Cpt, Cq),
                (Cpt, Cp),
                (Cq, Ct),
                (Cq, Cpt),
                (Cp, Cq)
            ]
        );
        let r = report(
            ModelSpec::QuadraticPotential { m: 1.0 },
            TableSource::Published,
        );
        let bad: Vec<_> = r.mismatches().map(|c| (c.row, c.col)).collect();
        assert_eq!(bad, quad.differences(&fixed));
    }

    #[test]
    fn closure_report_errors_on_nothing_for_valid_models() {
        let cs = build_constraints(
            &ModelSpec::QuadraticPotential { m: 2.0 },
            &Default::default(),
        )
        .unwrap();
        let r = closure_report(&cs).unwrap();
        assert!(r.to_text().contains("order_hbar"));
    }

    #[test]
    fn corrected_tables_are_antisymmetric() {
        for model in [
            ModelSpec::FreeMassive { m: 1.0 },
            ModelSpec::QuadraticPotential { m: 1.0 },
        ] {
            let t = ClosureTable::for_model(&model, TableSource::Corrected).unwrap();
            for a in ConstraintId::ALL {
                for b in ConstraintId::ALL {
                    assert_eq!(t.get(a, b).negated(), *t.get(b, a));
                }
            }
        }
    }
}
