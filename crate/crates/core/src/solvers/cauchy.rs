//! Three routes from asymptotic conditions to the Cauchy property.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::Serialize;

use crate::certificates::{check_asf1, check_asf2, check_c5};
use crate::error::{Error, Result};
use crate::gauge::{check_regularity, Grid};
use crate::math::tail_start;
use crate::premetric::{verify_premetric_axioms, Claims, Premetric, PremetricKind, Triple};
use crate::report::{
    overall, CertificateReport, ConditionId, Regularity, SearchBudget, Verdict, Witness,
};
use crate::solvers::diagnostics::cauchy_diagnostic;
use crate::solvers::trace::IterationTrace;

/// Points of the trace used to build axiom-check triples.
const TRIPLE_POINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// `p = q` with `q` a tau-distance.
    TauDistance,
    /// `p = G(q)`, `q` a tau-distance, `G` nondecreasing, right continuous,
    /// positive on `(0, inf)`, plus C5.
    Composed,
    /// `p` a tau-distance satisfying both mixed triangle inequalities with a
    /// companion `r` that satisfies the triangle inequality and
    /// `r(x_n, x_{n+1}) -> 0`.
    MixedTriangle,
}

/// Declares the route and its ingredients.
#[derive(Debug, Clone)]
pub enum RouteSpec {
    TauDistance {
        p: Premetric,
    },
    /// `p` must be of the composed kind `G(q)`.
    Composed {
        p: Premetric,
    },
    MixedTriangle {
        p: Premetric,
        r: Premetric,
    },
}

impl RouteSpec {
    pub fn route(&self) -> Route {
        match self {
            RouteSpec::TauDistance { .. } => Route::TauDistance,
            RouteSpec::Composed { .. } => Route::Composed,
            RouteSpec::MixedTriangle { .. } => Route::MixedTriangle,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CauchyCertificate {
    pub route: Route,
    pub verdict: Verdict,
    pub hypotheses: Vec<CertificateReport>,
    pub diagnostic: CertificateReport,
}

/// Ordered triples over [`TRIPLE_POINTS`] evenly spaced trace points.
fn trace_triples(trace: &IterationTrace) -> Vec<Triple> {
    let k = TRIPLE_POINTS.min(trace.len());
    let idx: Vec<usize> = (0..k)
        .map(|i| i * (trace.len() - 1) / (k - 1).max(1))
        .collect();
    let mut out = Vec::with_capacity(k * k * k);
    for &a in &idx {
        for &b in &idx {
            for &c in &idx {
                out.push([
                    trace.coords(a).to_vec(),
                    trace.coords(b).to_vec(),
                    trace.coords(c).to_vec(),
                ]);
            }
        }
    }
    out
}

/// C4 on `x` and C1-C3 on `(x_n, x_{n+1})`, common to every route.
fn asf_hypotheses(
    trace: &IterationTrace,
    p: &Premetric,
    budget: &SearchBudget,
) -> Result<Vec<CertificateReport>> {
    let shifted = trace.shifted(1);
    let mut out = check_asf1(trace, &shifted, p, budget)?;
    out.push(check_asf2(trace, p, budget)?);
    Ok(out)
}

fn triangle_only(p: &Premetric) -> Premetric {
    p.clone().with_claims(Claims {
        triangle: true,
        ..Claims::default()
    })
}

fn gap_decay(trace: &IterationTrace, r: &Premetric, tol: f64) -> CertificateReport {
    let g: Vec<f64> = (0..trace.len() - 1)
        .map(|n| r.eval_raw(trace.coords(n), trace.coords(n + 1)))
        .collect();
    let tail = g[tail_start(g.len())..].iter().copied().fold(0.0, f64::max);
    let verdict = if tail < tol {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    CertificateReport::new(
        ConditionId::GapDecay,
        verdict,
        format!(
            "max of r(x_n, x_(n+1)) over the last quarter, against {:e}",
            tol
        ),
    )
    .with_witness(Witness::new().values(&[tail]))
}

/// Runs the hypothesis checks of the declared route, then the tail
/// diagnostic `sup_{m>n} p(x_n, x_m) < tol` (under `q` for the composed
/// route, where the conclusion is reached through `q`).
pub fn certify_cauchy(
    trace: &IterationTrace,
    spec: &RouteSpec,
    budget: &SearchBudget,
    tol: f64,
) -> Result<CauchyCertificate> {
    let eta = budget.slack;
    let triples = trace_triples(trace);
    let (hypotheses, diag_p) = match spec {
        RouteSpec::TauDistance { p } => {
            if !(p.claims().tau_distance || p.claims().triangle) {
                return Err(Error::Config(format!(
                    "route (i) needs a tau-distance, `{}` declares neither tau_distance nor triangle",
                    p.describe()
                )));
            }
            let mut h = asf_hypotheses(trace, p, budget)?;
            h.extend(
                verify_premetric_axioms(&triangle_only(p), &triples, eta)?
                    .into_iter()
                    .filter(|r| {
                        r.condition_id != ConditionId::Axiom(crate::report::Axiom::Nonnegative)
                    }),
            );
            (h, p.clone())
        }
        RouteSpec::Composed { p } => {
            let PremetricKind::Composed { g, q } = p.kind() else {
                return Err(Error::Config(format!(
                    "route (ii) needs p = G(q), got `{}`",
                    p.describe()
                )));
            };
            let q: &Premetric = q;
            let mut h = asf_hypotheses(trace, p, budget)?;
            h.push(check_c5(trace, p, budget)?);
            let grid = Grid::standard(g.t_max());
            for r in [
                Regularity::Nondecreasing,
                Regularity::RightContinuous,
                Regularity::PositiveOnPositive,
            ] {
                h.push(check_regularity(g, r, &grid, eta));
            }
            h.extend(
                verify_premetric_axioms(&triangle_only(q), &triples, eta)?
                    .into_iter()
                    .filter(|r| {
                        r.condition_id == ConditionId::Axiom(crate::report::Axiom::Triangle)
                    }),
            );
            let mut c4q = check_asf2(trace, q, budget)?;
            c4q.resolution_note = format!("under q: {}", c4q.resolution_note);
            h.push(c4q);
            (h, q.clone())
        }
        RouteSpec::MixedTriangle { p, r } => {
            if r.space().dimension() != p.space().dimension() {
                return Err(Error::DimensionMismatch {
                    expected: p.space().dimension(),
                    got: r.space().dimension(),
                });
            }
            let mut h = asf_hypotheses(trace, p, budget)?;
            let mixed = p.clone().with_claims(Claims {
                triangle: true,
                ..Claims::default()
            });
            let mixed = mixed.with_companion(r.clone());
            h.extend(
                verify_premetric_axioms(&mixed, &triples, eta)?
                    .into_iter()
                    .filter(|r| {
                        r.condition_id != ConditionId::Axiom(crate::report::Axiom::Nonnegative)
                    }),
            );
            h.push(gap_decay(trace, r, tol));
            (h, p.clone())
        }
    };
    let diagnostic = cauchy_diagnostic(trace, &diag_p, tol)?;
    let verdict = overall(&hypotheses).and(diagnostic.verdict);
    Ok(CauchyCertificate {
        route: spec.route(),
        verdict,
        hypotheses,
        diagnostic,
    })
}

impl CauchyCertificate {
    /// One line per hypothesis plus the diagnostic.
    pub fn summary(&self) -> String {
        let mut s = format!("route {:?}: {:?}\n", self.route, self.verdict);
        for h in self
            .hypotheses
            .iter()
            .chain(core::iter::once(&self.diagnostic))
        {
            s.push_str(&format!("  {} {:?}\n", h.condition_id, h.verdict));
        }
        s
    }
}
