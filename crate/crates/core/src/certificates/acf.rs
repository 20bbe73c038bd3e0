//! Mapping-level conditions D1-D4 and the uniform contraction rate check.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use super::engine::{self, tail_limsup, GapMatrix, Outcome};
use crate::error::{Error, Result};
use crate::map::SelfMap;
use crate::math::at_most;
use crate::premetric::Premetric;
use crate::report::{CertificateReport, ConditionId, SearchBudget, Verdict, Witness};
use crate::solvers::trace::DEFAULT_ESCAPE_BOUND;
use crate::space::{Region, Space, DEFAULT_SAMPLE_WINDOW};

/// Orbits checked for D4 (each needs a full gap matrix).
pub const D4_ORBITS: usize = 8;

/// Default margin below 1 a contraction factor must keep.
pub const BANACH_MARGIN: f64 = 1e-2;

fn orbit(t: &SelfMap, space: &Space, x: &[f64], len: usize) -> Option<Vec<Vec<f64>>> {
    let mut out = Vec::with_capacity(len);
    out.push(x.to_vec());
    for _ in 1..len {
        let next = t.apply_raw(out.last().unwrap());
        if next.iter().any(|c| !c.is_finite()) || space.magnitude(&next) > DEFAULT_ESCAPE_BOUND {
            return None;
        }
        out.push(next);
    }
    Some(out)
}

fn draw<R: Rng + ?Sized>(space: &Space, region: &Region, rng: &mut R) -> Result<Vec<f64>> {
    region
        .sample(space, rng, DEFAULT_SAMPLE_WINDOW)
        .ok_or_else(|| Error::Config("region sampler produced no member".into()))
}

/// A point of `region` within distance `< delta` of `x`, if one is found.
fn perturb<R: Rng + ?Sized>(
    space: &Space,
    region: &Region,
    x: &[f64],
    delta: f64,
    rng: &mut R,
) -> Option<Vec<f64>> {
    for _ in 0..8 {
        let u: Vec<f64> = (0..x.len()).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let step: Vec<f64> = x.iter().zip(&u).map(|(a, b)| a + b).collect();
        let unit = space.dist(x, &step);
        if !(unit > 0.0) {
            continue;
        }
        let s = rng.random_range(0.05..0.95) * delta / unit;
        for sign in [1.0, -1.0] {
            let y: Vec<f64> = x.iter().zip(&u).map(|(a, b)| a + sign * s * b).collect();
            let d = space.dist(x, &y);
            if d > 0.0 && d < delta && region.contains(space, &y) {
                return Some(y);
            }
        }
    }
    None
}

struct Sampled {
    pairs: Vec<(Vec<f64>, Vec<f64>)>,
    orbits_x: Vec<Vec<Vec<f64>>>,
    gaps: Vec<Vec<f64>>,
    escaped: usize,
}

fn sample_pairs<R: Rng + ?Sized>(
    t: &SelfMap,
    space: &Space,
    region: &Region,
    count: usize,
    len: usize,
    rng: &mut R,
) -> Result<Sampled> {
    let mut firsts = region.anchors(space.dimension());
    firsts.retain(|a| region.contains(space, a));
    firsts.truncate(count);
    let mut s = Sampled {
        pairs: Vec::new(),
        orbits_x: Vec::new(),
        gaps: Vec::new(),
        escaped: 0,
    };
    for k in 0..count {
        let x = match firsts.get(k) {
            Some(a) => a.clone(),
            None => draw(space, region, rng)?,
        };
        let y = draw(space, region, rng)?;
        match (orbit(t, space, &x, len), orbit(t, space, &y, len)) {
            (Some(ox), Some(oy)) => {
                s.gaps
                    .push(ox.iter().zip(&oy).map(|(a, b)| space.dist(a, b)).collect());
                s.orbits_x.push(ox);
                s.pairs.push((x, y));
            }
            _ => s.escaped += 1,
        }
    }
    Ok(s)
}

fn degrade(o: &mut Outcome, escaped: usize) -> String {
    if escaped == 0 {
        return String::new();
    }
    if o.verdict == Verdict::Pass {
        o.verdict = Verdict::Inconclusive;
    }
    format!(
        "; {} sampled orbit(s) escaped the working region (norm > {:e}) and were dropped",
        escaped, DEFAULT_ESCAPE_BOUND
    )
}

fn report(
    id: ConditionId,
    mut o: Outcome,
    escaped: usize,
    budget: &SearchBudget,
    note: String,
) -> CertificateReport {
    let extra = degrade(&mut o, escaped);
    CertificateReport::new(id, o.verdict, format!("{}{}", note, extra))
        .with_witnesses(o.witnesses)
        .with_budget(budget)
}

/// D1 on a delta ladder: for each rung, the sup over sampled pairs with
/// `d(x, y) < delta` of the tail limsup of `d(T^n x, T^n y)`.
fn d1<R: Rng + ?Sized>(
    t: &SelfMap,
    space: &Space,
    region: &Region,
    bases: &[Vec<f64>],
    budget: &SearchBudget,
    len: usize,
    rng: &mut R,
) -> (Outcome, usize, Vec<f64>) {
    let mut escaped = 0;
    let base_orbits: Vec<Option<Vec<Vec<f64>>>> =
        bases.iter().map(|x| orbit(t, space, x, len)).collect();
    let mut ladder = Vec::with_capacity(budget.delta_candidates.len());
    for &delta in &budget.delta_candidates {
        let mut sup: f64 = 0.0;
        for (x, ox) in bases.iter().zip(&base_orbits) {
            let Some(ox) = ox else {
                escaped += 1;
                continue;
            };
            let Some(y) = perturb(space, region, x, delta, rng) else {
                continue;
            };
            match orbit(t, space, &y, len) {
                Some(oy) => {
                    let g: Vec<f64> = ox.iter().zip(&oy).map(|(a, b)| space.dist(a, b)).collect();
                    sup = sup.max(tail_limsup(&g));
                }
                None => escaped += 1,
            }
        }
        ladder.push(sup);
    }
    let mut out = Outcome {
        verdict: Verdict::Pass,
        witnesses: Vec::new(),
    };
    for &eps in &budget.eps_grid {
        match budget
            .delta_candidates
            .iter()
            .zip(&ladder)
            .find(|(_, s)| at_most(**s, eps, budget.slack))
        {
            Some((delta, s)) => out
                .witnesses
                .push(Witness::new().eps(eps).delta(*delta).values(&[*s])),
            None => {
                out.verdict = Verdict::Fail;
                out.witnesses.push(
                    Witness::new()
                        .eps(eps)
                        .delta(budget.smallest_delta())
                        .values(&[*ladder.last().unwrap()])
                        .note("sup of tail limsup stays above eps along the whole ladder"),
                );
            }
        }
    }
    (out, escaped, ladder)
}

/// D1-D4 for `T` on sampled points of `region`.
///
/// Orbits have `budget.required_len()` points. D2 and D3 start from every
/// sampled pair `(x, y)` and look `nu <= nu_horizon` steps ahead; D4 runs on the first
/// [`D4_ORBITS`] sampled orbits, each with its own `(delta, nu)`.
pub fn check_acf_mapping<R: Rng + ?Sized>(
    t: &SelfMap,
    space: &Space,
    region: &Region,
    budget: &SearchBudget,
    rng: &mut R,
) -> Result<Vec<CertificateReport>> {
    budget.validate()?;
    region.validate(space)?;
    if t.dim() != space.dimension() {
        return Err(Error::DimensionMismatch {
            expected: space.dimension(),
            got: t.dim(),
        });
    }
    let len = budget.required_len();
    let s = sample_pairs(t, space, region, budget.pair_samples, len, rng)?;
    let bases: Vec<Vec<f64>> = s.pairs.iter().map(|p| p.0.clone()).collect();
    let (o1, esc1, ladder) = d1(t, space, region, &bases, budget, len, rng);
    let monotone = ladder.windows(2).all(|w| w[1] <= w[0] + budget.slack);
    let n = s.pairs.len();
    let common = format!(
        "{} sampled pairs, orbits of {} points, i <= {}, nu <= {}, slack {:e}",
        n, len, budget.index_horizon, budget.nu_horizon, budget.slack
    );
    let r1 =
        report(
            ConditionId::D1,
            o1,
            s.escaped + esc1,
            budget,
            format!(
            "{}; delta ladder of {} rungs, limsup over the last quarter of each orbit, ladder {}",
            common,
            ladder.len(),
            if monotone { "nonincreasing" } else { "not monotone" }
        ),
        );
    let r2 = report(
        ConditionId::D2,
        engine::c2(&s.gaps, 0, budget),
        s.escaped,
        budget,
        format!(
            "{}; band eps < d(x, y) < eps + delta must reach <= eps",
            common
        ),
    );
    let r3 = report(
        ConditionId::D3,
        engine::c3(&s.gaps, 0, budget),
        s.escaped,
        budget,
        format!(
            "{}; every x != y must strictly approach under some T^nu",
            common
        ),
    );
    let metric = Premetric::metric(space.clone());
    let mut o4 = Outcome {
        verdict: Verdict::Pass,
        witnesses: Vec::new(),
    };
    let used = s.orbits_x.len().min(D4_ORBITS);
    for (k, ox) in s.orbits_x.iter().take(D4_ORBITS).enumerate() {
        let pts: Vec<&[f64]> = ox.iter().map(|v| v.as_slice()).collect();
        let r = engine::c4(&GapMatrix::from_points(&pts, &metric), budget);
        o4.verdict = o4.verdict.and(r.verdict);
        for w in r.witnesses {
            let note = match w.note.clone() {
                Some(m) => format!("orbit {}: {}", k, m),
                None => format!("orbit {}", k),
            };
            if r.verdict != Verdict::Pass || k == 0 {
                o4.witnesses.push(w.note(note));
            }
        }
    }
    let r4 = report(
        ConditionId::D4,
        o4,
        s.escaped,
        budget,
        format!("{}; uniform (delta, nu) checked on {} orbits", common, used),
    );
    Ok(alloc::vec![r1, r2, r3, r4])
}

/// Fails when the sup of `d(Tx, Ty) / d(x, y)` over sampled pairs and their
/// orbit pairs reaches `1 - margin`, i.e. no uniform contraction factor is
/// visible.
pub fn check_banach_rate<R: Rng + ?Sized>(
    t: &SelfMap,
    space: &Space,
    region: &Region,
    budget: &SearchBudget,
    margin: f64,
    rng: &mut R,
) -> Result<CertificateReport> {
    budget.validate()?;
    let len = budget.index_horizon + 1;
    let s = sample_pairs(t, space, region, budget.pair_samples, len + 1, rng)?;
    let mut worst: Option<(f64, Vec<f64>)> = None;
    for (ox, g) in s.orbits_x.iter().zip(&s.gaps) {
        for i in 0..len {
            let d = g[i];
            // cancellation makes tiny differences meaningless
            if d <= 1e-6 * (1.0 + space.magnitude(&ox[i])) {
                continue;
            }
            let ratio = g[i + 1] / d;
            if worst.as_ref().is_none_or(|w| ratio > w.0) {
                worst = Some((ratio, ox[i].clone()));
            }
        }
    }
    let note = format!(
        "sup of d(Tx, Ty) / d(x, y) over {} sampled pairs and orbit pairs i <= {}; pass needs < 1 - {}",
        s.pairs.len(),
        budget.index_horizon,
        margin
    );
    let Some((ratio, x)) = worst else {
        return Ok(
            CertificateReport::new(ConditionId::BanachRate, Verdict::Inconclusive, note)
                .with_budget(budget),
        );
    };
    let w = Witness::new().values(&[ratio]);
    let verdict = if ratio < 1.0 - margin {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let w = if verdict == Verdict::Fail {
        let mut v = alloc::vec![ratio];
        v.extend_from_slice(&x);
        Witness::new()
            .values(&v)
            .note("ratio and the point x attaining it")
    } else {
        w.note("estimated contraction factor")
    };
    Ok(
        CertificateReport::new(ConditionId::BanachRate, verdict, note)
            .with_witness(w)
            .with_budget(budget),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Verdict::*;

    fn run(f: fn(f64) -> f64, lo: f64, hi: f64) -> Vec<CertificateReport> {
        let t = SelfMap::scalar("t", f);
        let mut rng = crate::rng(7);
        check_acf_mapping(
            &t,
            &Space::real_line(),
            &Region::Interval { lo, hi },
            &SearchBudget::default(),
            &mut rng,
        )
        .unwrap()
    }

    #[test]
    fn halving_is_acf() {
        // oracle: d(T^n x, T^n y) = 2^{-n} d(x, y)
        for n in 0..40 {
            let (x, y) = (7.25f64, -3.5f64);
            assert_eq!(
                libm::ldexp(x, -n) - libm::ldexp(y, -n),
                libm::ldexp(x - y, -n)
            );
        }
        let r = run(|x| x / 2.0, -10.0, 10.0);
        assert!(r.iter().all(|r| r.passed()), "{:#?}", r);
    }

    #[test]
    fn translation_fails_d3() {
        let r = run(|x| x + 1.0, -10.0, 10.0);
        assert_eq!(r[2].verdict, Fail);
        assert!(!r[2].witnesses.is_empty());
        assert_eq!(r[0].verdict, Pass);
    }

    #[test]
    fn meir_keeler_is_acf_but_not_banach() {
        // oracle: T^n x = x / (1 + n x) and the gap strictly shrinks
        let g = |x: f64, n: f64| x / (1.0 + n * x);
        for (x, y) in [(0.5, 3.0), (9.0, 0.1)] {
            assert!((g(x, 1.0) - g(y, 1.0)).abs() < (x - y).abs());
        }
        let r = run(|x| x / (1.0 + x), 0.0, 10.0);
        assert!(r.iter().all(|r| r.passed()), "{:#?}", r);
        let t = SelfMap::scalar("mk", |x| x / (1.0 + x));
        let b = SearchBudget::default();
        let region = Region::Interval { lo: 0.0, hi: 10.0 };
        let mk = check_banach_rate(
            &t,
            &Space::real_line(),
            &region,
            &b,
            BANACH_MARGIN,
            &mut crate::rng(1),
        )
        .unwrap();
        assert_eq!(mk.verdict, Fail);
        let half = SelfMap::scalar("half", |x| x / 2.0);
        let h = check_banach_rate(
            &half,
            &Space::real_line(),
            &region,
            &b,
            BANACH_MARGIN,
            &mut crate::rng(1),
        )
        .unwrap();
        assert_eq!(h.verdict, Pass);
        assert!((h.witnesses[0].values[0] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn escaping_orbits_are_inconclusive() {
        let r = run(|x| 3.0 * x, 1.0, 2.0);
        assert!(r.iter().all(|r| r.verdict == Inconclusive), "{:#?}", r);
    }
}
