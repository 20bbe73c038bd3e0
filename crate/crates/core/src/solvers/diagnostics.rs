//! Tail diagnostics: `sup_{m>n} p(x_n, x_m)` and the even-step collapse of
//! cyclic orbits.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::tail_start;
use crate::premetric::Premetric;
use crate::report::{CertificateReport, ConditionId, Verdict, Witness};
use crate::solvers::trace::IterationTrace;
use crate::space::{CyclicSetting, Norm};

/// Allowed upward wobble of `s(n)` along the ladder.
pub const DIAGNOSTIC_SLACK: f64 = 1e-9;

/// `n = 0, 1, 2, 4, 8, ... < last`.
fn ladder(last: usize) -> Vec<usize> {
    let mut out = alloc::vec![0];
    let mut n = 1;
    while n < last {
        out.push(n);
        n *= 2;
    }
    out
}

/// [`cauchy_diagnostic_with`] at [`DIAGNOSTIC_SLACK`].
pub fn cauchy_diagnostic(
    trace: &IterationTrace,
    p: &Premetric,
    tol: f64,
) -> Result<CertificateReport> {
    cauchy_diagnostic_with(trace, p, tol, DIAGNOSTIC_SLACK)
}

/// `s(n) = max_{n < m <= N} p(x_n, x_m)` on a doubling ladder of `n`.
///
/// Passes when `s` is nonincreasing within `eta` along the ladder and its
/// last value is below `tol`. The witness lists the ladder and `s`.
pub fn cauchy_diagnostic_with(
    trace: &IterationTrace,
    p: &Premetric,
    tol: f64,
    eta: f64,
) -> Result<CertificateReport> {
    if trace.len() < 4 {
        return Err(Error::Input(
            "the Cauchy diagnostic needs at least 4 points".into(),
        ));
    }
    let last = trace.len() - 1;
    let ns = ladder(last);
    let s: Vec<f64> = ns
        .iter()
        .map(|&n| {
            (n + 1..=last)
                .map(|m| p.eval_raw(trace.coords(n), trace.coords(m)))
                .fold(0.0, f64::max)
        })
        .collect();
    let tail = *s.last().unwrap();
    let monotone = s.windows(2).all(|w| w[1] <= w[0] + eta);
    let verdict = if monotone && tail < tol {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let note = format!(
        "sup over m in (n, {}] on the ladder n = 0, 1, 2, 4, ...; tail s({}) = {:e} against tol {:e}; ladder {}",
        last,
        ns.last().unwrap(),
        tail,
        tol,
        if monotone { "nonincreasing" } else { "not monotone" }
    );
    Ok(CertificateReport::new(ConditionId::Cauchy, verdict, note)
        .with_witness(Witness::new().indices(&ns).values(&s)))
}

/// Checks that `d(x_n, x_{n+1}) -> d(A, B)` and `d(x_{2n}, x_{2n+2}) -> 0`
/// along a full cyclic orbit; both tails are maxima over the last quarter.
///
/// The underlying geometric fact needs a uniformly convex space, so only
/// Euclidean norms (or the real line) are accepted.
pub fn even_collapse_diagnostic(
    orbit: &IterationTrace,
    setting: &CyclicSetting,
    tol: f64,
) -> Result<CertificateReport> {
    let space = setting.space();
    if !(space.dimension() == 1 || matches!(space.norm(), Norm::Euclidean)) {
        return Err(Error::Precondition(
            "even-step collapse is only diagnosed in Euclidean spaces".into(),
        ));
    }
    if orbit.len() < 4 {
        return Err(Error::Input("the orbit needs at least 4 points".into()));
    }
    let gap = setting.gap();
    let steps: Vec<f64> = (0..orbit.len() - 1)
        .map(|n| (space.dist(orbit.coords(n), orbit.coords(n + 1)) - gap).abs())
        .collect();
    let evens: Vec<f64> = (0..(orbit.len() - 1) / 2)
        .map(|n| space.dist(orbit.coords(2 * n), orbit.coords(2 * n + 2)))
        .collect();
    let tail = |v: &[f64]| v[tail_start(v.len())..].iter().copied().fold(0.0, f64::max);
    let (t1, t2) = (tail(&steps), tail(&evens));
    let verdict = if t1 <= tol && t2 <= tol {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(CertificateReport::new(
        ConditionId::EvenCollapse,
        verdict,
        format!(
            "tails over the last quarter: |d(x_n, x_(n+1)) - {}| = {:e}, d(x_2n, x_(2n+2)) = {:e}, tol {:e}",
            gap, t1, t2, tol
        ),
    )
    .with_witness(Witness::new().values(&[t1, t2])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::SelfMap;
    use crate::solvers::trace::{cyclic_even_trace, picard_trace};
    use crate::space::{Region, Space};

    fn line() -> Premetric {
        Premetric::metric(Space::real_line())
    }

    #[test]
    fn geometric_trace_passes() {
        let vals: Vec<f64> = (0..=64).map(|n| libm::ldexp(1.0, -n)).collect();
        let tr = IterationTrace::from_values(&vals, &line()).unwrap();
        let r = cauchy_diagnostic(&tr, &line(), 1e-6).unwrap();
        assert!(r.passed());
        let w = &r.witnesses[0];
        // oracle: s(n) = 2^{-n} - 2^{-64}
        for (n, s) in w.indices.iter().zip(&w.values) {
            assert_eq!(*s, libm::ldexp(1.0, -(*n as i32)) - libm::ldexp(1.0, -64));
        }
    }

    #[test]
    fn harmonic_sums_fail() {
        let mut vals = alloc::vec![0.0];
        for k in 1..=1000 {
            vals.push(vals[k - 1] + 1.0 / k as f64);
        }
        let tr = IterationTrace::from_values(&vals, &line()).unwrap();
        let r = cauchy_diagnostic(&tr, &line(), 1e-6).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        // oracle: s(512) = H_1000 - H_512 ~ ln(1000/512)
        let tail = *r.witnesses[0].values.last().unwrap();
        assert!((tail - libm::log(1000.0 / 512.0)).abs() < 1e-3);
    }

    #[test]
    fn constant_trace_passes() {
        let tr = IterationTrace::from_values(&[2.0; 10], &line()).unwrap();
        assert!(cauchy_diagnostic(&tr, &line(), 1e-12).unwrap().passed());
        let short = IterationTrace::from_values(&[2.0; 3], &line()).unwrap();
        assert!(cauchy_diagnostic(&short, &line(), 1e-12).is_err());
    }

    fn cyclic(lo: f64, hi: f64) -> CyclicSetting {
        CyclicSetting::new(
            Space::real_line(),
            Region::Interval { lo, hi },
            Region::Interval { lo: -hi, hi: -lo },
        )
        .unwrap()
    }

    #[test]
    fn even_collapse_examples() {
        let s = cyclic(1.0, f64::INFINITY);
        let t = SelfMap::scalar("cyc", |x: f64| -x.signum() * (x.abs() + 1.0) / 2.0);
        let p = Premetric::shifted_cyclic(s.clone());
        let pt = |v| Space::real_line().scalar(v).unwrap();
        let run = cyclic_even_trace(&t, &s, &pt(3.0), 40, &p).unwrap();
        assert!(even_collapse_diagnostic(&run.orbit, &s, 1e-9)
            .unwrap()
            .passed());
        let run = cyclic_even_trace(&t, &s, &pt(1.0), 4, &p).unwrap();
        let r = even_collapse_diagnostic(&run.orbit, &s, 1e-15).unwrap();
        assert_eq!(r.witnesses[0].values, [0.0, 0.0]);

        let iso = SelfMap::scalar("-x", |x: f64| -x);
        let s2 = cyclic(1.0, 2.0);
        let orbit = picard_trace(&iso, &pt(1.5), 20, &line()).unwrap();
        let r = even_collapse_diagnostic(&orbit, &s2, 1e-6).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.witnesses[0].values[0], 1.0);
    }
}
