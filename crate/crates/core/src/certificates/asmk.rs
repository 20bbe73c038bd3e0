//! Meir-Keeler type conditions C6-C9 through a gauge `F` and a family `psi_n`.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::asf::{check_trace, pair_gaps};
use crate::error::{Error, Result};
use crate::gauge::{
    check_family_c6, check_family_c7_grid, require_profile, Gauge, GaugeFamily, Grid,
};
use crate::premetric::Premetric;
use crate::report::{CertificateReport, ConditionId, Regularity, SearchBudget, Verdict, Witness};
use crate::solvers::trace::IterationTrace;

/// Sample points per `[eps, eps + delta]` interval in the C7 search.
pub const C7_SAMPLES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AsmkVariant {
    /// Diagonal pairs `(x_{n+i}, y_{n+i})`: reports C6, C7, C8.
    Asmk1,
    /// All pairs `(x_{n+i}, y_{n+j})`: reports C6, C7, C9.
    Asmk2,
}

const F_PROFILE: [Regularity; 3] = [
    Regularity::RightContinuous,
    Regularity::Nondecreasing,
    Regularity::PositiveOnPositive,
];

/// C6, C7 on the family and C8 or C9 on the traces.
///
/// Refuses with a precondition error when `F` lacks (or numerically fails)
/// right continuity, monotonicity or positivity, or when `F(0) = 0` and the
/// family does not fix zero. The resolution note of the last report carries
/// `F(0)`.
pub fn check_asmk(
    trace_x: &IterationTrace,
    trace_y: &IterationTrace,
    p: &Premetric,
    f: &Gauge,
    family: &GaugeFamily,
    budget: &SearchBudget,
    variant: AsmkVariant,
) -> Result<Vec<CertificateReport>> {
    check_trace(trace_x, p, budget)?;
    check_trace(trace_y, p, budget)?;
    let eta = budget.slack;
    require_profile(f, &F_PROFILE, &Grid::standard(f.t_max()), eta)?;
    let f0 = f.eval(0.0)?;
    if f0 == 0.0 {
        let psi0 = family.values(0.0, 1)?.first().copied().unwrap_or(0.0);
        if !family.zero_fixed() || psi0 > eta {
            return Err(Error::Precondition(format!(
                "F(0) = 0 requires a family with psi_n(0) = 0 (psi_1(0) = {})",
                psi0
            )));
        }
    }
    let horizon = budget.nu_horizon.min(family.len());
    let c6 = check_family_c6(family, &budget.eps_grid, horizon, eta)?.with_budget(budget);
    let c7 = check_family_c7_grid(
        family,
        &budget.eps_grid,
        &budget.delta_candidates,
        C7_SAMPLES,
        horizon,
        eta,
    )?
    .with_budget(budget);
    let third = match variant {
        AsmkVariant::Asmk1 => c8(trace_x, trace_y, p, f, family, budget, horizon)?,
        AsmkVariant::Asmk2 => c9(trace_x, trace_y, p, f, family, budget, horizon)?,
    };
    let third = CertificateReport {
        resolution_note: format!("{}; F(0) = {}", third.resolution_note, f0),
        ..third
    };
    Ok(alloc::vec![c6, c7, third])
}

fn c8(
    x: &IterationTrace,
    y: &IterationTrace,
    p: &Premetric,
    f: &Gauge,
    family: &GaugeFamily,
    budget: &SearchBudget,
    horizon: usize,
) -> Result<CertificateReport> {
    let g = pair_gaps(x, y, p);
    let note = format!(
        "F(p(x_(n+i), y_(n+i))) <= psi_n(F(p(x_i, y_i))) + {:e} for 1 <= n <= {}, i <= {}",
        budget.slack, horizon, budget.index_horizon
    );
    for i in 0..=budget.index_horizon {
        let rhs = family.values(f.eval(g[i])?, horizon)?;
        for n in 1..=horizon {
            let lhs = f.eval(g[n + i])?;
            if lhs > rhs[n - 1] + budget.slack {
                return Ok(CertificateReport::new(ConditionId::C8, Verdict::Fail, note)
                    .with_witness(
                        Witness::new()
                            .indices(&[n, i, i])
                            .values(&[lhs, rhs[n - 1]]),
                    )
                    .with_budget(budget));
            }
        }
    }
    Ok(CertificateReport::new(ConditionId::C8, Verdict::Pass, note).with_budget(budget))
}

fn c9(
    x: &IterationTrace,
    y: &IterationTrace,
    p: &Premetric,
    f: &Gauge,
    family: &GaugeFamily,
    budget: &SearchBudget,
    horizon: usize,
) -> Result<CertificateReport> {
    let note = format!(
        "F(p(x_(n+i), y_(n+j))) <= psi_n(F(p(x_i, y_j))) + {:e} for 1 <= n <= {}, i, j <= {}",
        budget.slack, horizon, budget.index_horizon
    );
    let len = budget.required_len();
    // F(p(x_a, y_b)) for a, b < len
    let mut fp = alloc::vec![0.0; len * len];
    for a in 0..len {
        for b in 0..len {
            fp[a * len + b] = f.eval(p.eval_raw(x.coords(a), y.coords(b)))?;
        }
    }
    for i in 0..=budget.index_horizon {
        for j in 0..=budget.index_horizon {
            let rhs = family.values(fp[i * len + j], horizon)?;
            for n in 1..=horizon {
                let lhs = fp[(n + i) * len + n + j];
                if lhs > rhs[n - 1] + budget.slack {
                    return Ok(CertificateReport::new(ConditionId::C9, Verdict::Fail, note)
                        .with_witness(
                            Witness::new()
                                .indices(&[n, i, j])
                                .values(&[lhs, rhs[n - 1]]),
                        )
                        .with_budget(budget));
                }
            }
        }
    }
    Ok(CertificateReport::new(ConditionId::C9, Verdict::Pass, note).with_budget(budget))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::SelfMap;
    use crate::solvers::trace::picard_trace;
    use crate::space::Space;

    fn setup(
        x0: f64,
        y0: f64,
        f: fn(f64) -> f64,
    ) -> (IterationTrace, IterationTrace, Premetric, SearchBudget) {
        let b = SearchBudget {
            index_horizon: 48,
            nu_horizon: 24,
            ..SearchBudget::default()
        };
        let p = Premetric::metric(Space::real_line());
        let t = SelfMap::scalar("t", f);
        let n = b.required_len() - 1;
        let x = picard_trace(&t, &p.space().scalar(x0).unwrap(), n, &p).unwrap();
        let y = picard_trace(&t, &p.space().scalar(y0).unwrap(), n, &p).unwrap();
        (x, y, p, b)
    }

    #[test]
    fn halving_matches_half_family() {
        let (x, y, p, b) = setup(1.0, 3.0, |x| x / 2.0);
        let fam = GaugeFamily::iterated(Gauge::half()).with_zero_fixed(true);
        for variant in [AsmkVariant::Asmk1, AsmkVariant::Asmk2] {
            let r = check_asmk(&x, &y, &p, &Gauge::identity(), &fam, &b, variant).unwrap();
            assert!(r.iter().all(|r| r.passed()), "{:?}", r);
        }
    }

    #[test]
    fn quarter_family_is_too_strong() {
        let (x, y, p, b) = setup(1.0, 3.0, |x| x / 2.0);
        let fam = GaugeFamily::iterated(Gauge::linear(0.25)).with_zero_fixed(true);
        let r = check_asmk(&x, &y, &p, &Gauge::identity(), &fam, &b, AsmkVariant::Asmk1).unwrap();
        assert!(r[0].passed() && r[1].passed());
        assert_eq!(r[2].verdict, Verdict::Fail);
        let w = &r[2].witnesses[0];
        assert_eq!(w.indices[0], 1);
        // oracle: lhs = g/2, rhs = g/4
        assert!((w.values[0] - 2.0 * w.values[1]).abs() < 1e-12);
    }

    #[test]
    fn zero_traces_pass() {
        let (x, y, p, b) = setup(0.0, 0.0, |x| x / 2.0);
        let fam = GaugeFamily::iterated(Gauge::half()).with_zero_fixed(true);
        for variant in [AsmkVariant::Asmk1, AsmkVariant::Asmk2] {
            let r = check_asmk(&x, &y, &p, &Gauge::identity(), &fam, &b, variant).unwrap();
            assert!(r[2].passed());
            assert!(r[2].resolution_note.contains("F(0) = 0"));
        }
    }

    #[test]
    fn refuses_irregular_f_or_unfixed_family() {
        let (x, y, p, b) = setup(1.0, 3.0, |x| x / 2.0);
        let fam = GaugeFamily::iterated(Gauge::half()).with_zero_fixed(true);
        let r = check_asmk(&x, &y, &p, &Gauge::step01(), &fam, &b, AsmkVariant::Asmk1);
        assert!(matches!(r, Err(Error::Precondition(m)) if m.contains("positive_on_positive")));
        let loose = GaugeFamily::iterated(Gauge::half()).with_zero_fixed(false);
        let r = check_asmk(
            &x,
            &y,
            &p,
            &Gauge::identity(),
            &loose,
            &b,
            AsmkVariant::Asmk1,
        );
        assert!(matches!(r, Err(Error::Precondition(_))));
    }
}
