//! Trace-level conditions C1-C5.

use alloc::format;
use alloc::vec::Vec;

use super::engine::{self, GapMatrix, Outcome};
use crate::error::{Error, Result};
use crate::premetric::Premetric;
use crate::report::{CertificateReport, ConditionId, SearchBudget};
use crate::solvers::trace::IterationTrace;

fn report(
    id: ConditionId,
    o: Outcome,
    budget: &SearchBudget,
    note: alloc::string::String,
) -> CertificateReport {
    CertificateReport::new(id, o.verdict, note)
        .with_witnesses(o.witnesses)
        .with_budget(budget)
}

pub(crate) fn check_trace(t: &IterationTrace, p: &Premetric, budget: &SearchBudget) -> Result<()> {
    budget.validate()?;
    if t.space().id() != p.space().id() {
        return Err(Error::SpaceMismatch {
            expected: p.space().id().0,
            got: t.space().id().0,
        });
    }
    if t.space().dimension() != p.space().dimension() {
        return Err(Error::DimensionMismatch {
            expected: p.space().dimension(),
            got: t.space().dimension(),
        });
    }
    if t.len() < budget.required_len() {
        return Err(Error::Input(format!(
            "trace has {} points, the budget needs {}",
            t.len(),
            budget.required_len()
        )));
    }
    Ok(())
}

/// `p(x_i, y_i)` over the common prefix of the two traces.
pub(crate) fn pair_gaps(x: &IterationTrace, y: &IterationTrace, p: &Premetric) -> Vec<f64> {
    let n = x.len().min(y.len());
    (0..n)
        .map(|i| p.eval_raw(x.coords(i), y.coords(i)))
        .collect()
}

fn band_note(what: &str, budget: &SearchBudget) -> alloc::string::String {
    format!(
        "{}; i <= {}, nu <= {}, {} delta candidates down to {:e}, slack {:e}; \
         pass = a witness for every probed eps, fail = some eps defeats every delta",
        what,
        budget.index_horizon,
        budget.nu_horizon,
        budget.delta_candidates.len(),
        budget.smallest_delta(),
        budget.slack
    )
}

/// C1, C2 and C3 for the pair of sequences `(x_n, y_n)`.
pub fn check_asf1(
    trace_x: &IterationTrace,
    trace_y: &IterationTrace,
    p: &Premetric,
    budget: &SearchBudget,
) -> Result<Vec<CertificateReport>> {
    check_trace(trace_x, p, budget)?;
    check_trace(trace_y, p, budget)?;
    let g = pair_gaps(trace_x, trace_y, p);
    let seqs = [g];
    Ok(alloc::vec![
        report(
            ConditionId::C1,
            engine::c1(&seqs[0], budget),
            budget,
            band_note(
                "limsup estimated as the max of p(x_n, y_n) over the last quarter of the trace",
                budget
            ),
        ),
        report(
            ConditionId::C2,
            engine::c2(&seqs, budget.index_horizon, budget),
            budget,
            band_note(
                "band eps < p(x_i, y_i) < eps + delta must reach <= eps",
                budget
            ),
        ),
        report(
            ConditionId::C3,
            engine::c3(&seqs, budget.index_horizon, budget),
            budget,
            band_note(
                "every nonzero p(x_i, y_i) must strictly decrease under some shift",
                budget
            ),
        ),
    ])
}

/// Gap matrix over the first `required_len` points of a trace.
pub(crate) fn trace_matrix(t: &IterationTrace, p: &Premetric, budget: &SearchBudget) -> GapMatrix {
    let n = budget.required_len().min(t.len());
    let pts: Vec<&[f64]> = (0..n).map(|i| t.coords(i)).collect();
    GapMatrix::from_points(&pts, p)
}

/// C4: a uniform `(delta, nu)` for all pairs `(i, j)` in each band.
pub fn check_asf2(
    trace: &IterationTrace,
    p: &Premetric,
    budget: &SearchBudget,
) -> Result<CertificateReport> {
    check_trace(trace, p, budget)?;
    let m = trace_matrix(trace, p, budget);
    Ok(report(
        ConditionId::C4,
        engine::c4(&m, budget),
        budget,
        band_note(
            "one nu for every pair with eps < p(x_i, x_j) < eps + delta",
            budget,
        ),
    ))
}

/// C5: every nonzero `p(x_i, x_j)` strictly decreases under some shift.
pub fn check_c5(
    trace: &IterationTrace,
    p: &Premetric,
    budget: &SearchBudget,
) -> Result<CertificateReport> {
    check_trace(trace, p, budget)?;
    let m = trace_matrix(trace, p, budget);
    Ok(report(
        ConditionId::C5,
        engine::c5(&m, budget),
        budget,
        band_note(
            "every nonzero p(x_i, x_j) must strictly decrease under some shift",
            budget,
        ),
    ))
}
