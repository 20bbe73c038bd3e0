//! The `(F, psi)`-contraction inequality `F(p(Tx, Sy)) <= psi(F(M(x, y)))`.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::{require_profile, Gauge, Grid};
use crate::map::SelfMap;
use crate::premetric::Premetric;
use crate::report::{CertificateReport, ConditionId, Regularity, Verdict, Witness};
use crate::solvers::trace::IterationTrace;
use crate::space::Point;

/// Which regularity the gauges must carry.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContractionProfile {
    /// `F` right continuous, nondecreasing, positive on `(0, inf)`; `psi`
    /// nondecreasing, upper semicontinuous, below the identity, `psi(0) = 0`.
    #[default]
    Standard,
    /// `F` continuous, nondecreasing, `F(0) = 0`, positive on `(0, inf)`;
    /// `psi` nondecreasing, right upper semicontinuous, below the identity.
    Zhang,
}

impl ContractionProfile {
    pub fn f_requirements(self) -> &'static [Regularity] {
        match self {
            ContractionProfile::Standard => &[
                Regularity::RightContinuous,
                Regularity::Nondecreasing,
                Regularity::PositiveOnPositive,
            ],
            ContractionProfile::Zhang => &[
                Regularity::Continuous,
                Regularity::Nondecreasing,
                Regularity::ZeroAtZero,
                Regularity::PositiveOnPositive,
            ],
        }
    }

    pub fn psi_requirements(self) -> &'static [Regularity] {
        match self {
            ContractionProfile::Standard => &[
                Regularity::Nondecreasing,
                Regularity::UpperSemicontinuous,
                Regularity::StrictlyBelowIdentity,
                Regularity::ZeroAtZero,
            ],
            ContractionProfile::Zhang => &[
                Regularity::Nondecreasing,
                Regularity::RightUpperSemicontinuous,
                Regularity::StrictlyBelowIdentity,
            ],
        }
    }
}

fn m_raw(t: &SelfMap, s: &SelfMap, p: &Premetric, x: &[f64], y: &[f64]) -> f64 {
    let tx = t.apply_raw(x);
    let sy = s.apply_raw(y);
    let cands = [
        p.eval_raw(x, y),
        p.eval_raw(&tx, x),
        p.eval_raw(&sy, y),
        0.5 * (p.eval_raw(&tx, y) + p.eval_raw(&sy, x)),
    ];
    cands.into_iter().fold(0.0, f64::max)
}

/// `max{p(x,y), p(Tx,x), p(Sy,y), (p(Tx,y) + p(Sy,x)) / 2}`.
pub fn compute_m(t: &SelfMap, s: &SelfMap, p: &Premetric, x: &Point, y: &Point) -> f64 {
    m_raw(t, s, p, x.coords(), y.coords())
}

fn require_gauges(f: &Gauge, psi: &Gauge, profile: ContractionProfile, eta: f64) -> Result<()> {
    require_profile(f, profile.f_requirements(), &Grid::standard(f.t_max()), eta)?;
    require_profile(
        psi,
        profile.psi_requirements(),
        &Grid::standard(psi.t_max()),
        eta,
    )
}

/// Checks the inequality on every sampled pair with slack `eta`.
///
/// Refuses when `p` is not declared symmetric or when the gauges lack (or
/// numerically fail) the regularity `profile` asks for.
#[allow(clippy::too_many_arguments)]
pub fn check_f_psi_contraction(
    t: &SelfMap,
    s: &SelfMap,
    p: &Premetric,
    f: &Gauge,
    psi: &Gauge,
    sample: &[(Point, Point)],
    eta: f64,
    profile: ContractionProfile,
) -> Result<CertificateReport> {
    if !p.claims().symmetric {
        return Err(Error::Precondition(
            "the (F, psi)-contraction needs a symmetric premetric".into(),
        ));
    }
    require_gauges(f, psi, profile, eta)?;
    let note = format!(
        "{} sampled pairs, slack {:e}, {:?} gauge profile",
        sample.len(),
        eta,
        profile
    );
    let mut worst: Option<(usize, f64, f64, f64)> = None;
    for (k, (x, y)) in sample.iter().enumerate() {
        p.space().contains(x)?;
        p.space().contains(y)?;
        let tx = t.apply_raw(x.coords());
        let sy = s.apply_raw(y.coords());
        let lhs = f.eval(p.eval_raw(&tx, &sy))?;
        let rhs = psi.eval(f.eval(m_raw(t, s, p, x.coords(), y.coords()))?)?;
        let excess = lhs - rhs;
        if excess > eta && worst.is_none_or(|w| excess > w.3) {
            worst = Some((k, lhs, rhs, excess));
        }
    }
    Ok(match worst {
        None => CertificateReport::new(ConditionId::Fpsi, Verdict::Pass, note),
        Some((k, lhs, rhs, _)) => {
            let (x, y) = &sample[k];
            let mut v: Vec<f64> = x.coords().to_vec();
            v.extend_from_slice(y.coords());
            v.push(lhs);
            v.push(rhs);
            CertificateReport::new(ConditionId::Fpsi, Verdict::Fail, note).with_witness(
                Witness::new()
                    .indices(&[k])
                    .values(&v)
                    .note("values are x, y, lhs, rhs (largest violation)"),
            )
        }
    })
}

/// `F(p(x_{n+1}, x_n)) <= psi(F(p(x_n, x_{n-1}))) + eta` for every `n >= 1`
/// along a trace.
pub fn verify_ineqfp(
    trace: &IterationTrace,
    p: &Premetric,
    f: &Gauge,
    psi: &Gauge,
    eta: f64,
) -> Result<CertificateReport> {
    let note = format!("{} steps, slack {:e}", trace.len().saturating_sub(2), eta);
    for n in 1..trace.len().saturating_sub(1) {
        let lhs = f.eval(p.eval_raw(trace.coords(n + 1), trace.coords(n)))?;
        let rhs = psi.eval(f.eval(p.eval_raw(trace.coords(n), trace.coords(n - 1)))?)?;
        if lhs > rhs + eta {
            return Ok(
                CertificateReport::new(ConditionId::StepContraction, Verdict::Fail, note)
                    .with_witness(Witness::new().indices(&[n]).values(&[lhs, rhs])),
            );
        }
    }
    Ok(CertificateReport::new(
        ConditionId::StepContraction,
        Verdict::Pass,
        note,
    ))
}

/// The single-step bounds at pre-image points: for each `alpha`, with
/// `x = S alpha`, `F(p(x, Tx)) <= psi(F(p(S alpha, alpha)))` when
/// `p(x, Tx) > eta`; with `y = T alpha`, `F(p(Sy, y)) <= psi(F(p(alpha, T alpha)))`
/// when `p(y, Sy) > eta`.
pub fn verify_point_steps(
    t: &SelfMap,
    s: &SelfMap,
    p: &Premetric,
    f: &Gauge,
    psi: &Gauge,
    alphas: &[Point],
    eta: f64,
) -> Result<CertificateReport> {
    let note = format!("{} sampled pre-images, slack {:e}", alphas.len(), eta);
    for (k, alpha) in alphas.iter().enumerate() {
        p.space().contains(alpha)?;
        let a = alpha.coords();
        let x = s.apply_raw(a);
        let tx = t.apply_raw(&x);
        let y = t.apply_raw(a);
        let sy = s.apply_raw(&y);
        let checks = [
            (p.eval_raw(&x, &tx), p.eval_raw(&x, a), "x = S alpha"),
            (p.eval_raw(&sy, &y), p.eval_raw(a, &y), "y = T alpha"),
        ];
        for (step, prev, which) in checks {
            if step <= eta {
                continue;
            }
            let lhs = f.eval(step)?;
            let rhs = psi.eval(f.eval(prev)?)?;
            if lhs > rhs + eta {
                let mut v = a.to_vec();
                v.push(lhs);
                v.push(rhs);
                return Ok(CertificateReport::new(ConditionId::PointStep, Verdict::Fail, note)
                    .with_witness(Witness::new().indices(&[k]).values(&v).note(which)));
            }
        }
    }
    Ok(CertificateReport::new(ConditionId::PointStep, Verdict::Pass, note))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Space;
    use rand::Rng;

    fn maps() -> (SelfMap, SelfMap, Premetric) {
        (
            SelfMap::scalar("x/4", |x| x / 4.0),
            SelfMap::scalar("x/5", |x| x / 5.0),
            Premetric::metric(Space::real_line()),
        )
    }

    fn pt(v: f64) -> Point {
        Space::real_line().scalar(v).unwrap()
    }

    #[test]
    fn m_examples() {
        let (t, s, p) = maps();
        assert!((compute_m(&t, &s, &p, &pt(1.0), &pt(1.0)) - 0.8).abs() < 1e-15);
        assert_eq!(compute_m(&t, &s, &p, &pt(0.0), &pt(0.0)), 0.0);
        assert_eq!(compute_m(&t, &s, &p, &pt(1.0), &pt(0.0)), 1.0);
    }

    fn sample(n: usize) -> Vec<(Point, Point)> {
        let mut rng = crate::rng(3);
        (0..n)
            .map(|_| {
                (
                    pt(rng.random_range(-10.0..=10.0)),
                    pt(rng.random_range(-10.0..=10.0)),
                )
            })
            .collect()
    }

    #[test]
    fn seven_twelfths_passes() {
        let (t, s, p) = maps();
        // grid oracle: |x/4 - y/5| <= (7/12) M(x, y) on a lattice
        for a in -40..=40 {
            for b in -40..=40 {
                let (x, y) = (a as f64 / 4.0, b as f64 / 4.0);
                let m = compute_m(&t, &s, &p, &pt(x), &pt(y));
                assert!((x / 4.0 - y / 5.0).abs() <= 7.0 / 12.0 * m + 1e-12);
            }
        }
        let r = check_f_psi_contraction(
            &t,
            &s,
            &p,
            &Gauge::identity(),
            &Gauge::linear(7.0 / 12.0),
            &sample(1000),
            1e-12,
            ContractionProfile::Standard,
        )
        .unwrap();
        assert!(r.passed());
    }

    #[test]
    fn one_tenth_fails_with_witness() {
        let (t, s, p) = maps();
        let mut pairs = sample(10);
        pairs.push((pt(1.0), pt(0.0)));
        let r = check_f_psi_contraction(
            &t,
            &s,
            &p,
            &Gauge::identity(),
            &Gauge::linear(0.1),
            &pairs,
            1e-12,
            ContractionProfile::Standard,
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        let v = &r.witnesses[0].values;
        assert!(v[2] > v[3]);
    }

    #[test]
    fn one_point_space_is_vacuous() {
        let p = Premetric::metric(Space::real_line());
        let id = SelfMap::identity(1);
        let pairs = alloc::vec![(pt(2.0), pt(2.0)); 5];
        let r = check_f_psi_contraction(
            &id,
            &id,
            &p,
            &Gauge::identity(),
            &Gauge::half(),
            &pairs,
            1e-12,
            ContractionProfile::Standard,
        )
        .unwrap();
        assert!(r.passed());
    }

    #[test]
    fn refuses_bad_gauges() {
        let (t, s, p) = maps();
        let r = check_f_psi_contraction(
            &t,
            &s,
            &p,
            &Gauge::identity(),
            &Gauge::identity(),
            &sample(3),
            1e-12,
            ContractionProfile::Standard,
        );
        assert!(matches!(r, Err(Error::Precondition(m)) if m.contains("strictly_below_identity")));
    }

    #[test]
    fn zhang_profile_accepts_identity_f() {
        let (t, s, p) = maps();
        let r = check_f_psi_contraction(
            &t,
            &s,
            &p,
            &Gauge::identity(),
            &Gauge::linear(7.0 / 12.0),
            &sample(50),
            1e-12,
            ContractionProfile::Zhang,
        )
        .unwrap();
        assert!(r.passed());
    }

    #[test]
    fn point_steps_hold_for_the_pair() {
        let (t, s, p) = maps();
        let alphas: Vec<Point> = (-20..=20).map(|k| pt(k as f64 / 2.0)).collect();
        let psi = Gauge::linear(7.0 / 12.0);
        let r = verify_point_steps(&t, &s, &p, &Gauge::identity(), &psi, &alphas, 1e-12).unwrap();
        assert!(r.passed());
        // psi = t/8 is below the ratio 3/16 of the first bound
        let r = verify_point_steps(&t, &s, &p, &Gauge::identity(), &Gauge::linear(0.125), &alphas, 1e-12)
            .unwrap();
        assert!(r.failed());
        let w = &r.witnesses[0];
        assert!((w.values[1] / w.values[2] - 1.5).abs() < 1e-12);
    }
}
