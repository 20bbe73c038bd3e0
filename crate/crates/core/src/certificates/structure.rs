//! Cyclic structure and the p-controls-d hypothesis.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::map::SelfMap;
use crate::math::tail_start;
use crate::premetric::Premetric;
use crate::report::{CertificateReport, ConditionId, Verdict, Witness};
use crate::solvers::trace::IterationTrace;
use crate::space::{CyclicSetting, Space};

/// `T(A) ⊂ B` and `T(B) ⊂ A` on `count` sampled members of each set (plus
/// their anchors).
pub fn check_cyclic<R: Rng + ?Sized>(
    t: &SelfMap,
    setting: &CyclicSetting,
    count: usize,
    rng: &mut R,
) -> Result<CertificateReport> {
    let a = setting.sample_a(count, rng)?;
    let b = setting.sample_b(count, rng)?;
    let note = format!("{} points of A and {} points of B", a.len(), b.len());
    let escape = |x: &[f64], from_a: bool| {
        let y = t.apply_raw(x);
        let ok = y.iter().all(|c| c.is_finite())
            && if from_a {
                setting.in_b(&y)
            } else {
                setting.in_a(&y)
            };
        (!ok).then_some(y)
    };
    for (pts, from_a) in [(&a, true), (&b, false)] {
        for x in pts {
            if let Some(y) = escape(x, from_a) {
                let mut v = x.clone();
                v.extend_from_slice(&y);
                let msg = if from_a {
                    "x in A but T(x) not in B"
                } else {
                    "x in B but T(x) not in A"
                };
                return Ok(
                    CertificateReport::new(ConditionId::Cyc, Verdict::Fail, note)
                        .with_witness(Witness::new().values(&v).note(msg)),
                );
            }
        }
    }
    Ok(CertificateReport::new(
        ConditionId::Cyc,
        Verdict::Pass,
        note,
    ))
}

fn tail_max(v: &[f64]) -> f64 {
    v[tail_start(v.len())..].iter().copied().fold(0.0, f64::max)
}

/// Refutation check on supplied evidence: for each trace pair whose tail
/// p-gap is below `eta`, the tail d-gap must be below `tol`.
///
/// Tails are maxima over the last quarter of the common prefix. No pair with
/// a small tail p-gap means no evidence either way (inconclusive).
pub fn check_p_controls_d(
    p: &Premetric,
    space: &Space,
    trace_pairs: &[(IterationTrace, IterationTrace)],
    eta: f64,
    tol: f64,
) -> Result<CertificateReport> {
    let note = format!(
        "{} trace pairs, p-tail threshold {:e}, d-tail tolerance {:e}",
        trace_pairs.len(),
        eta,
        tol
    );
    let mut used = 0;
    for (k, (x, y)) in trace_pairs.iter().enumerate() {
        if x.space().dimension() != space.dimension() || y.space().dimension() != space.dimension()
        {
            return Err(Error::DimensionMismatch {
                expected: space.dimension(),
                got: x.space().dimension(),
            });
        }
        let n = x.len().min(y.len());
        let pg: Vec<f64> = (0..n)
            .map(|i| p.eval_raw(x.coords(i), y.coords(i)))
            .collect();
        let dg: Vec<f64> = (0..n)
            .map(|i| space.dist(x.coords(i), y.coords(i)))
            .collect();
        let (pt, dt) = (tail_max(&pg), tail_max(&dg));
        if pt < eta {
            used += 1;
            if dt >= tol {
                return Ok(
                    CertificateReport::new(ConditionId::Pcd, Verdict::Fail, note).with_witness(
                        Witness::new()
                            .indices(&[k])
                            .values(&[pt, dt])
                            .note("tail p-gap vanishes, tail d-gap does not"),
                    ),
                );
            }
        }
    }
    if used == 0 {
        return Ok(CertificateReport::new(
            ConditionId::Pcd,
            Verdict::Inconclusive,
            format!("{}; no pair has a vanishing p-tail", note),
        ));
    }
    Ok(CertificateReport::new(
        ConditionId::Pcd,
        Verdict::Pass,
        format!("{}; {} pairs used", note, used),
    )
    .with_witness(Witness::new().indices(&[used])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::Gauge;
    use crate::solvers::trace::picard_trace;
    use crate::space::Region;

    fn setting() -> CyclicSetting {
        CyclicSetting::new(
            Space::real_line(),
            Region::Interval {
                lo: 1.0,
                hi: f64::INFINITY,
            },
            Region::Interval {
                lo: f64::NEG_INFINITY,
                hi: -1.0,
            },
        )
        .unwrap()
    }

    #[test]
    fn cyclic_examples() {
        // interval oracle: x >= 1 gives (x + 1) / 2 >= 1
        for k in 0..100 {
            let x = 1.0 + k as f64 * 0.37;
            assert!((x + 1.0) / 2.0 >= 1.0);
        }
        let cyc = SelfMap::scalar("cyc", |x: f64| -x.signum() * (x.abs() + 1.0) / 2.0);
        let mut rng = crate::rng(0);
        assert!(check_cyclic(&cyc, &setting(), 200, &mut rng)
            .unwrap()
            .passed());
        let half = SelfMap::scalar("half", |x| x / 2.0);
        let r = check_cyclic(&half, &setting(), 200, &mut rng).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.witnesses[0].values, [1.0, 0.5]);
        let whole = CyclicSetting::new(Space::real_line(), Region::Whole, Region::Whole).unwrap();
        let any = SelfMap::scalar("sq", |x| x * x - 3.0);
        assert!(check_cyclic(&any, &whole, 50, &mut rng).unwrap().passed());
    }

    fn pair(f: fn(f64) -> f64, a: f64, b: f64, p: &Premetric) -> (IterationTrace, IterationTrace) {
        let t = SelfMap::scalar("t", f);
        let s = p.space();
        (
            picard_trace(&t, &s.scalar(a).unwrap(), 200, p).unwrap(),
            picard_trace(&t, &s.scalar(b).unwrap(), 200, p).unwrap(),
        )
    }

    #[test]
    fn p_controls_d_examples() {
        let line = Space::real_line();
        let d = Premetric::metric(line.clone());
        let ev = [pair(|x| x / 2.0, 1.0, 5.0, &d)];
        assert!(check_p_controls_d(&d, &line, &ev, 1e-6, 1e-6)
            .unwrap()
            .passed());

        let g = Premetric::composed(Gauge::meir_keeler(), d.clone());
        // algebra oracle: G(t) < eta implies t < eta / (1 - eta)
        let eta: f64 = 1e-6;
        let t = eta / (1.0 - eta);
        assert!(t / (1.0 + t) <= eta * (1.0 + 1e-12));
        let ev = [pair(|x| x / 2.0, 1.0, 5.0, &g)];
        assert!(check_p_controls_d(&g, &line, &ev, eta, 2.0 * eta)
            .unwrap()
            .passed());

        let zero = Premetric::custom(line.clone(), "0").unwrap();
        let ev = [pair(|x| x + 1.0, 0.0, 1.0, &zero)];
        let r = check_p_controls_d(&zero, &line, &ev, 1e-6, 1e-6).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.witnesses[0].values, [0.0, 1.0]);

        let ev = [pair(|x| x + 1.0, 0.0, 1.0, &d)];
        assert_eq!(
            check_p_controls_d(&d, &line, &ev, 1e-6, 1e-6)
                .unwrap()
                .verdict,
            Verdict::Inconclusive
        );
    }
}
