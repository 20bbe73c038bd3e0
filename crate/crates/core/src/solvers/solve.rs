//! Fixed point, best proximity point and common fixed point extraction.

use alloc::format;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::map::SelfMap;
use crate::premetric::Premetric;
use crate::solvers::trace::{AlternatingSchedule, DEFAULT_ESCAPE_BOUND};
use crate::space::{CyclicSetting, Point, Space};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    /// Candidate `z`.
    pub point: Point,
    pub residual: f64,
    pub iterations: usize,
    /// `true` only when the stopping rule fired and `residual <= tol`.
    pub converged: bool,
}

fn escaped(space: &Space, x: &[f64]) -> bool {
    x.iter().any(|c| !c.is_finite()) || space.magnitude(x) > DEFAULT_ESCAPE_BOUND
}

fn result(
    space: &Space,
    x: alloc::vec::Vec<f64>,
    residual: f64,
    iterations: usize,
    converged: bool,
) -> Result<SolveResult> {
    Ok(SolveResult {
        point: Point::new(space.id(), x)?,
        residual,
        iterations,
        converged,
    })
}

/// Picard iteration until `p(x_n, T x_n) <= tol`; returns `z = x_n` with
/// residual `p(z, Tz)`.
pub fn solve_fixed_point(
    t: &SelfMap,
    x0: &Point,
    tol: f64,
    max_steps: usize,
    p: &Premetric,
) -> Result<SolveResult> {
    let space = p.space();
    space.contains(x0)?;
    let mut x = x0.coords().to_vec();
    let mut n = 0;
    loop {
        let tx = t.apply_raw(&x);
        let r = p.eval_raw(&x, &tx);
        if escaped(space, &tx) {
            return result(space, x, r, n, false);
        }
        if r <= tol {
            return result(space, x, r, n, true);
        }
        if n == max_steps {
            return result(space, x, r, n, false);
        }
        x = tx;
        n += 1;
    }
}

/// Iterates `T^2` from `x0 ∈ A` until `d(x_{2n}, x_{2n+2}) <= tol`; returns
/// the last even point with residual `|d(z, Tz) - d(A, B)|`.
pub fn solve_best_proximity(
    t: &SelfMap,
    setting: &CyclicSetting,
    x0: &Point,
    tol: f64,
    max_pairs: usize,
) -> Result<SolveResult> {
    let space = setting.space();
    space.contains(x0)?;
    if !setting.in_a(x0.coords()) {
        return Err(Error::Input(format!(
            "starting point {:?} is not in A",
            x0.coords()
        )));
    }
    let residual = |z: &[f64]| (space.dist(z, &t.apply_raw(z)) - setting.gap()).abs();
    let mut z = x0.coords().to_vec();
    for n in 0..max_pairs {
        let next = t.apply_raw(&t.apply_raw(&z));
        if escaped(space, &next) {
            let r = residual(&z);
            return result(space, z, r, n, false);
        }
        let step = space.dist(&z, &next);
        z = next;
        if step <= tol {
            let r = residual(&z);
            return result(space, z, r, n + 1, r <= tol);
        }
    }
    let r = residual(&z);
    result(space, z, r, max_pairs, false)
}

/// Alternating iteration `x_0 = S(seed)`, `x_{n+1} = Gamma_n x_n` until
/// `max(p(x_n, T x_n), p(x_n, S x_n)) <= tol`.
pub fn solve_common_fixed_point(
    schedule: &AlternatingSchedule,
    seed: &Point,
    tol: f64,
    max_steps: usize,
    p: &Premetric,
) -> Result<SolveResult> {
    let space = p.space();
    space.contains(seed)?;
    let residual = |x: &[f64]| {
        f64::max(
            p.eval_raw(x, &schedule.t.apply_raw(x)),
            p.eval_raw(x, &schedule.s.apply_raw(x)),
        )
    };
    let mut x = schedule.s.apply_raw(seed.coords());
    if escaped(space, &x) {
        return Err(Error::Evaluation("S(seed) is not finite".into()));
    }
    let mut n = 0;
    loop {
        let r = residual(&x);
        if r <= tol {
            return result(space, x, r, n, true);
        }
        if n == max_steps {
            return result(space, x, r, n, false);
        }
        let next = schedule.rule(n).apply_raw(&x);
        if escaped(space, &next) {
            return result(space, x, r, n, false);
        }
        x = next;
        n += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Region;

    fn d() -> Premetric {
        Premetric::metric(Space::real_line())
    }

    fn pt(v: f64) -> Point {
        Space::real_line().scalar(v).unwrap()
    }

    #[test]
    fn fixed_point_examples() {
        let half = SelfMap::scalar("x/2", |x| x / 2.0);
        let r = solve_fixed_point(&half, &pt(1.0), 1e-9, 100, &d()).unwrap();
        assert!(r.converged && r.iterations <= 40 && r.point.value().abs() < 1e-8);
        assert!(r.residual <= 1e-9);

        // x_n = 1/(1+n) and d(x_n, T x_n) = 1/((1+n)(2+n)) <= 1e-3 first at n = 31
        let mk = SelfMap::scalar("mk", |x| x / (1.0 + x));
        let r = solve_fixed_point(&mk, &pt(1.0), 1e-3, 10_000, &d()).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 31);
        assert!((r.point.value() - 1.0 / 32.0).abs() < 1e-12);

        let shift = SelfMap::scalar("x+1", |x| x + 1.0);
        let r = solve_fixed_point(&shift, &pt(0.0), 1e-9, 500, &d()).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 500);
    }

    fn cyclic() -> (SelfMap, CyclicSetting) {
        (
            SelfMap::scalar("cyc", |x: f64| -x.signum() * (x.abs() + 1.0) / 2.0),
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
            .unwrap(),
        )
    }

    #[test]
    fn best_proximity_examples() {
        let (t, s) = cyclic();
        let r = solve_best_proximity(&t, &s, &pt(3.0), 1e-8, 1000).unwrap();
        assert!(r.converged);
        assert!((r.point.value() - 1.0).abs() < 1e-6 && r.residual < 1e-6);
        let r = solve_best_proximity(&t, &s, &pt(1.0), 1e-8, 1000).unwrap();
        assert_eq!((r.point.value(), r.iterations, r.converged), (1.0, 1, true));
        assert!(matches!(
            solve_best_proximity(&t, &s, &pt(0.5), 1e-8, 10),
            Err(Error::Input(_))
        ));

        let iso = SelfMap::scalar("-x", |x: f64| -x);
        let s2 = CyclicSetting::new(
            Space::real_line(),
            Region::Interval { lo: 1.0, hi: 2.0 },
            Region::Interval { lo: -2.0, hi: -1.0 },
        )
        .unwrap();
        let r = solve_best_proximity(&iso, &s2, &pt(1.5), 1e-8, 10).unwrap();
        assert_eq!(r.point.value(), 1.5);
        assert_eq!(r.residual, 1.0);
        assert!(!r.converged);
        assert!(
            solve_best_proximity(&iso, &s2, &pt(1.0), 1e-8, 10)
                .unwrap()
                .converged
        );
    }

    #[test]
    fn common_fixed_point_examples() {
        let sched = AlternatingSchedule::new(
            SelfMap::scalar("x/4", |x| x / 4.0),
            SelfMap::scalar("x/5", |x| x / 5.0),
        );
        let r = solve_common_fixed_point(&sched, &pt(1.0), 1e-9, 100, &d()).unwrap();
        assert!(r.converged && r.iterations <= 40 && r.residual <= 1e-9);
        let r = solve_common_fixed_point(&sched, &pt(0.0), 1e-9, 100, &d()).unwrap();
        assert_eq!((r.iterations, r.residual), (0, 0.0));

        let osc = AlternatingSchedule::new(
            SelfMap::scalar("x+1", |x| x + 1.0),
            SelfMap::scalar("x-1", |x| x - 1.0),
        );
        let r = solve_common_fixed_point(&osc, &pt(0.0), 1e-9, 100, &d()).unwrap();
        assert!(!r.converged);
    }
}
