//! Separated index triples `sigma < k <= rho` refuting the Cauchy property.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::Serialize;

use crate::premetric::Premetric;
use crate::report::{CertificateReport, ConditionId, Verdict, Witness};
use crate::solvers::trace::IterationTrace;

/// Occurrences kept per witness.
pub const MAX_OCCURRENCES: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Occurrence {
    pub sigma: usize,
    pub rho: usize,
    pub k: usize,
    /// `p(x_sigma, x_rho)`.
    pub gap_rho: f64,
    /// `p(x_sigma, x_k) > eps`.
    pub gap_k: f64,
    /// `p(x_sigma, x_{k-2}) <= eps`.
    pub straddle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonCauchyWitness {
    pub eps: f64,
    /// First index from which consecutive gaps stay below `min(gap_tol, eps)`.
    pub settled_from: usize,
    pub occurrences: Vec<Occurrence>,
    pub parity_note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum NonCauchyOutcome {
    /// Consecutive gaps never settle below the threshold.
    NotApplicable {
        reason: String,
    },
    /// No pair separated by more than `2 eps` past the settling index.
    None,
    Found(NonCauchyWitness),
}

impl NonCauchyOutcome {
    /// Found witnesses refute the Cauchy property (fail); none found is a
    /// pass; not-applicable is inconclusive.
    pub fn report(&self) -> CertificateReport {
        match self {
            NonCauchyOutcome::NotApplicable { reason } => CertificateReport::new(
                ConditionId::NonCauchy,
                Verdict::Inconclusive,
                format!("not applicable: {}", reason),
            ),
            NonCauchyOutcome::None => CertificateReport::new(
                ConditionId::NonCauchy,
                Verdict::Pass,
                "no separated pair past the settling index",
            ),
            NonCauchyOutcome::Found(w) => {
                let ws = w
                    .occurrences
                    .iter()
                    .take(8)
                    .map(|o| {
                        Witness::new()
                            .eps(w.eps)
                            .indices(&[o.sigma, o.k, o.rho])
                            .values(&[o.gap_k, o.straddle])
                    })
                    .collect();
                CertificateReport::new(
                    ConditionId::NonCauchy,
                    Verdict::Fail,
                    format!(
                        "{} occurrences of (sigma, k, rho) from index {}; {}",
                        w.occurrences.len(),
                        w.settled_from,
                        w.parity_note
                    ),
                )
                .with_witnesses(ws)
            }
        }
    }
}

/// Scans for `sigma < rho` with `p(x_sigma, x_rho) > 2 eps` past the index
/// where consecutive gaps settle below `min(gap_tol, eps)`, fixes the parity
/// so that `rho` (hence `k`) has the parity opposite to `sigma` by moving to
/// `rho + 1` when needed, and takes `k` minimal of that parity with
/// `p(x_sigma, x_k) > eps`.
pub fn extract_noncauchy_witness(
    trace: &IterationTrace,
    p: &Premetric,
    eps: f64,
    gap_tol: f64,
) -> NonCauchyOutcome {
    let len = trace.len();
    if len < 4 {
        return NonCauchyOutcome::NotApplicable {
            reason: "trace shorter than 4 points".into(),
        };
    }
    let threshold = gap_tol.min(eps);
    let gaps: Vec<f64> = (0..len - 1)
        .map(|n| p.eval_raw(trace.coords(n), trace.coords(n + 1)))
        .collect();
    let settled = match gaps.iter().rposition(|g| !(*g < threshold)) {
        None => 0,
        Some(i) => i + 1,
    };
    if settled + 3 > len {
        return NonCauchyOutcome::NotApplicable {
            reason: format!("consecutive gaps do not settle below {:e}", threshold),
        };
    }
    let gap = |a: usize, b: usize| p.eval_raw(trace.coords(a), trace.coords(b));
    let mut occurrences = Vec::new();
    let mut moved = 0;
    // sigma - 1 must also lie in the settled range
    for sigma in settled + 1..len {
        if occurrences.len() == MAX_OCCURRENCES {
            break;
        }
        let Some(rho0) = (sigma + 1..len).find(|&r| gap(sigma, r) > 2.0 * eps) else {
            continue;
        };
        let rho = if (rho0 - sigma) % 2 == 0 {
            if rho0 + 1 >= len || !(gap(sigma, rho0 + 1) > eps) {
                continue;
            }
            moved += 1;
            rho0 + 1
        } else {
            rho0
        };
        let k = (sigma + 1..=rho)
            .step_by(2)
            .find(|&k| gap(sigma, k) > eps)
            .expect("rho itself qualifies");
        occurrences.push(Occurrence {
            sigma,
            rho,
            k,
            gap_rho: gap(sigma, rho),
            gap_k: gap(sigma, k),
            straddle: gap(sigma, k - 2),
        });
    }
    if occurrences.is_empty() {
        return NonCauchyOutcome::None;
    }
    NonCauchyOutcome::Found(NonCauchyWitness {
        eps,
        settled_from: settled,
        parity_note: format!(
            "k and rho have parity opposite to sigma; rho moved to rho + 1 in {} of {} occurrences",
            moved,
            occurrences.len()
        ),
        occurrences,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Space;

    fn d() -> Premetric {
        Premetric::metric(Space::real_line())
    }

    fn harmonic(n: usize) -> IterationTrace {
        let mut v = alloc::vec![0.0];
        for k in 1..=n {
            v.push(v[k - 1] + 1.0 / k as f64);
        }
        IterationTrace::from_values(&v, &d()).unwrap()
    }

    #[test]
    fn geometric_has_none() {
        let v: Vec<f64> = (0..80).map(|n| libm::ldexp(1.0, -n)).collect();
        let tr = IterationTrace::from_values(&v, &d()).unwrap();
        assert_eq!(
            extract_noncauchy_witness(&tr, &d(), 0.1, 1e-3),
            NonCauchyOutcome::None
        );
    }

    #[test]
    fn periodic_is_not_applicable() {
        let v: Vec<f64> = (0..50).map(|n| (n % 2) as f64).collect();
        let tr = IterationTrace::from_values(&v, &d()).unwrap();
        assert!(matches!(
            extract_noncauchy_witness(&tr, &d(), 0.4, 2.0),
            NonCauchyOutcome::NotApplicable { .. }
        ));
    }

    #[test]
    fn harmonic_sums_separate() {
        let tr = harmonic(2000);
        let NonCauchyOutcome::Found(w) = extract_noncauchy_witness(&tr, &d(), 0.5, 1.0) else {
            panic!("expected witnesses");
        };
        assert!(!w.occurrences.is_empty());
        for o in &w.occurrences {
            // direct scan oracle on the partial sums
            let s = |i: usize| tr.point(i).value();
            assert!(o.sigma < o.k && o.k <= o.rho);
            assert!((s(o.k) - s(o.sigma)).abs() > 0.5);
            assert!((s(o.k - 2) - s(o.sigma)).abs() <= 0.5);
            assert_eq!((o.k - o.sigma) % 2, 1);
            assert_eq!((o.rho - o.k) % 2, 0);
        }
    }
}
