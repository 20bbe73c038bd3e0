//! Iteration traces: Picard orbits, alternating `T/S` runs and the even
//! subsequence of cyclic orbits.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::map::SelfMap;
use crate::premetric::Premetric;
use crate::space::{CyclicSetting, Point, Space};

/// Orbits whose norm exceeds this are reported as escaped.
pub const DEFAULT_ESCAPE_BOUND: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceStatus {
    Completed,
    Escaped,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    Picard { map: String },
    CyclicEven { map: String },
    Alternating { t: String, s: String },
    Explicit,
}

/// An indexed sequence `x_0..x_N` with cached consecutive gaps
/// `p(x_n, x_{n+1})` under its premetric.
#[derive(Debug, Clone)]
pub struct IterationTrace {
    points: Vec<Point>,
    generator: Generator,
    gaps: Vec<f64>,
    status: TraceStatus,
    premetric: Premetric,
}

impl IterationTrace {
    /// Wraps an explicit sequence (all points must belong to `p`'s space).
    pub fn from_points(points: Vec<Point>, p: &Premetric) -> Result<Self> {
        Self::build(points, p, Generator::Explicit, TraceStatus::Completed)
    }

    /// A sequence on the real line given by its values.
    pub fn from_values(values: &[f64], p: &Premetric) -> Result<Self> {
        let pts = values
            .iter()
            .map(|v| p.space().scalar(*v))
            .collect::<Result<Vec<_>>>()?;
        Self::from_points(pts, p)
    }

    fn build(
        points: Vec<Point>,
        p: &Premetric,
        generator: Generator,
        status: TraceStatus,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Input("a trace needs at least one point".into()));
        }
        for x in &points {
            p.space().contains(x)?;
        }
        let gaps = points
            .windows(2)
            .map(|w| p.eval_raw(w[0].coords(), w[1].coords()))
            .collect();
        Ok(IterationTrace {
            points,
            generator,
            gaps,
            status,
            premetric: p.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, n: usize) -> &Point {
        &self.points[n]
    }

    pub fn coords(&self, n: usize) -> &[f64] {
        self.points[n].coords()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value()).collect()
    }

    /// Cached `p(x_n, x_{n+1})`, one fewer than the number of points.
    pub fn consecutive_gaps(&self) -> &[f64] {
        &self.gaps
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn status(&self) -> TraceStatus {
        self.status
    }

    pub fn premetric(&self) -> &Premetric {
        &self.premetric
    }

    pub fn space(&self) -> &Space {
        self.premetric.space()
    }

    /// `p(x_i, x_j)` under the trace's premetric.
    pub fn gap(&self, i: usize, j: usize) -> f64 {
        self.premetric.eval_raw(self.coords(i), self.coords(j))
    }

    /// `y_n = x_{n+k}`.
    pub fn shifted(&self, k: usize) -> IterationTrace {
        let k = k.min(self.points.len().saturating_sub(1));
        IterationTrace {
            points: self.points[k..].to_vec(),
            generator: self.generator.clone(),
            gaps: self.gaps[k.min(self.gaps.len())..].to_vec(),
            status: self.status,
            premetric: self.premetric.clone(),
        }
    }

    /// First `len` points.
    pub fn truncated(&self, len: usize) -> IterationTrace {
        let len = len.clamp(1, self.points.len());
        IterationTrace {
            points: self.points[..len].to_vec(),
            generator: self.generator.clone(),
            gaps: self.gaps[..len - 1].to_vec(),
            status: self.status,
            premetric: self.premetric.clone(),
        }
    }

    /// The same points measured with another premetric on the same space.
    pub fn with_premetric(&self, p: &Premetric) -> Result<IterationTrace> {
        Self::build(self.points.clone(), p, self.generator.clone(), self.status)
    }
}

fn escaped(space: &Space, x: &[f64], bound: f64) -> bool {
    x.iter().any(|c| !c.is_finite()) || space.magnitude(x) > bound
}

/// `x_n = T^n x_0` for `n = 0..=steps`.
pub fn picard_trace(
    t: &SelfMap,
    x0: &Point,
    steps: usize,
    p: &Premetric,
) -> Result<IterationTrace> {
    picard_trace_bounded(t, x0, steps, p, DEFAULT_ESCAPE_BOUND)
}

/// As [`picard_trace`]; the orbit is truncated with status `escaped` once its
/// norm exceeds `bound`.
pub fn picard_trace_bounded(
    t: &SelfMap,
    x0: &Point,
    steps: usize,
    p: &Premetric,
    bound: f64,
) -> Result<IterationTrace> {
    let space = p.space();
    space.contains(x0)?;
    check_map_dim(t, space)?;
    let mut points = Vec::with_capacity(steps + 1);
    points.push(x0.clone());
    let mut status = TraceStatus::Completed;
    let mut cur = x0.coords().to_vec();
    for _ in 0..steps {
        let next = t.apply_raw(&cur);
        if escaped(space, &next, bound) {
            status = TraceStatus::Escaped;
            break;
        }
        points.push(Point::new(space.id(), next.clone())?);
        cur = next;
    }
    IterationTrace::build(
        points,
        p,
        Generator::Picard {
            map: String::from(t.name()),
        },
        status,
    )
}

fn check_map_dim(t: &SelfMap, space: &Space) -> Result<()> {
    if t.dim() != space.dimension() {
        return Err(Error::DimensionMismatch {
            expected: space.dimension(),
            got: t.dim(),
        });
    }
    Ok(())
}

/// `Gamma_n = T` for even `n`, `S` for odd `n`.
#[derive(Debug, Clone)]
pub struct AlternatingSchedule {
    pub t: SelfMap,
    pub s: SelfMap,
}

impl AlternatingSchedule {
    pub fn new(t: SelfMap, s: SelfMap) -> Self {
        AlternatingSchedule { t, s }
    }

    pub fn rule(&self, n: usize) -> &SelfMap {
        if n % 2 == 0 {
            &self.t
        } else {
            &self.s
        }
    }
}

/// `x_0 = S(seed)`, `x_{n+1} = Gamma_n x_n`.
///
/// The companion sequence `y` with `y_0 = seed` and `y_{n+1} = Gamma_{n+1} y_n`
/// satisfies `y_{n+1} = x_n`; it is not stored (use [`IterationTrace::shifted`]).
pub fn alternating_trace(
    schedule: &AlternatingSchedule,
    seed: &Point,
    steps: usize,
    p: &Premetric,
) -> Result<IterationTrace> {
    alternating_trace_bounded(schedule, seed, steps, p, DEFAULT_ESCAPE_BOUND)
}

pub fn alternating_trace_bounded(
    schedule: &AlternatingSchedule,
    seed: &Point,
    steps: usize,
    p: &Premetric,
    bound: f64,
) -> Result<IterationTrace> {
    let space = p.space();
    space.contains(seed)?;
    check_map_dim(&schedule.t, space)?;
    check_map_dim(&schedule.s, space)?;
    let generator = Generator::Alternating {
        t: String::from(schedule.t.name()),
        s: String::from(schedule.s.name()),
    };
    let x0 = schedule.s.apply_raw(seed.coords());
    if escaped(space, &x0, bound) {
        return Err(Error::Evaluation(format!(
            "S(seed) = {:?} is outside the working region",
            x0
        )));
    }
    let mut points = Vec::with_capacity(steps + 1);
    points.push(Point::new(space.id(), x0.clone())?);
    let mut status = TraceStatus::Completed;
    let mut cur = x0;
    for n in 0..steps {
        let next = schedule.rule(n).apply_raw(&cur);
        if escaped(space, &next, bound) {
            status = TraceStatus::Escaped;
            break;
        }
        points.push(Point::new(space.id(), next.clone())?);
        cur = next;
    }
    IterationTrace::build(points, p, generator, status)
}

/// Even subsequence `T^{2n} x_0` of a cyclic orbit, with the full orbit kept
/// for diagnostics.
#[derive(Debug, Clone)]
pub struct CyclicRun {
    pub even: IterationTrace,
    pub orbit: IterationTrace,
}

/// `points[n] = T^{2n} x0` for `n = 0..=pairs`; requires `x0 ∈ A`.
pub fn cyclic_even_trace(
    t: &SelfMap,
    setting: &CyclicSetting,
    x0: &Point,
    pairs: usize,
    p: &Premetric,
) -> Result<CyclicRun> {
    let space = setting.space();
    space.contains(x0)?;
    if !setting.in_a(x0.coords()) {
        return Err(Error::Input(format!(
            "starting point {:?} is not in A",
            x0.coords()
        )));
    }
    let mut orbit = picard_trace(t, x0, 2 * pairs, &Premetric::metric(space.clone()))?;
    orbit.generator = Generator::Picard {
        map: String::from(t.name()),
    };
    let even_points: Vec<Point> = orbit.points.iter().step_by(2).cloned().collect();
    let status = orbit.status;
    let even = IterationTrace::build(
        even_points,
        p,
        Generator::CyclicEven {
            map: String::from(t.name()),
        },
        status,
    )?;
    Ok(CyclicRun { even, orbit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Region;

    fn line() -> Premetric {
        Premetric::metric(Space::real_line())
    }

    fn pt(v: f64) -> Point {
        Space::real_line().scalar(v).unwrap()
    }

    #[test]
    fn picard_examples() {
        let half = SelfMap::scalar("x/2", |x| x / 2.0);
        let tr = picard_trace(&half, &pt(1.0), 3, &line()).unwrap();
        assert_eq!(tr.values(), [1.0, 0.5, 0.25, 0.125]);
        assert_eq!(tr.consecutive_gaps(), [0.5, 0.25, 0.125]);

        let mk = SelfMap::scalar("x/(1+x)", |x| x / (1.0 + x));
        let tr = picard_trace(&mk, &pt(1.0), 4, &line()).unwrap();
        for (n, v) in tr.values().iter().enumerate() {
            assert!((v - 1.0 / (1.0 + n as f64)).abs() < 1e-15);
        }

        let shift = SelfMap::scalar("x+1", |x| x + 1.0);
        let tr = picard_trace(&shift, &pt(0.0), 3, &line()).unwrap();
        assert_eq!(tr.values(), [0.0, 1.0, 2.0, 3.0]);
        assert_eq!(tr.status(), TraceStatus::Completed);
    }

    #[test]
    fn escape_truncates() {
        let dbl = SelfMap::scalar("2x", |x| 2.0 * x);
        let tr = picard_trace_bounded(&dbl, &pt(1.0), 100, &line(), 1e3).unwrap();
        assert_eq!(tr.status(), TraceStatus::Escaped);
        assert_eq!(tr.len(), 10);
    }

    #[test]
    fn alternating_examples() {
        let sched = AlternatingSchedule::new(
            SelfMap::scalar("x/4", |x| x / 4.0),
            SelfMap::scalar("x/5", |x| x / 5.0),
        );
        let tr = alternating_trace(&sched, &pt(1.0), 3, &line()).unwrap();
        let expect = [0.2, 0.05, 0.01, 0.0025];
        for (v, e) in tr.values().iter().zip(expect) {
            assert!((v - e).abs() < 1e-15);
        }
        let zero = alternating_trace(&sched, &pt(0.0), 5, &line()).unwrap();
        assert!(zero.values().iter().all(|v| *v == 0.0));

        let ident = AlternatingSchedule::new(SelfMap::identity(1), SelfMap::identity(1));
        let c = alternating_trace(&ident, &pt(3.5), 4, &line()).unwrap();
        assert!(c.values().iter().all(|v| *v == 3.5));
    }

    #[test]
    fn alternating_parity_rule() {
        let sched = AlternatingSchedule::new(
            SelfMap::scalar("x/4", |x| x / 4.0 + 1.0),
            SelfMap::scalar("x/5", |x| x / 5.0 - 1.0),
        );
        let tr = alternating_trace(&sched, &pt(2.0), 20, &line()).unwrap();
        for n in 0..20 {
            let expect = sched.rule(n).apply_raw(tr.coords(n));
            assert_eq!(tr.coords(n + 1), &expect[..]);
        }
    }

    #[test]
    fn cyclic_even_examples() {
        let setting = CyclicSetting::new(
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
        .unwrap();
        let t = SelfMap::scalar("cyc", |x: f64| -x.signum() * (x.abs() + 1.0) / 2.0);
        let p = Premetric::shifted_cyclic(setting.clone());
        let run = cyclic_even_trace(&t, &setting, &pt(3.0), 10, &p).unwrap();
        // T^2 x = (x + 3) / 4, so T^{2n} x = 1 + (x - 1) / 4^n
        for (n, v) in run.even.values().iter().enumerate() {
            assert!((v - (1.0 + 2.0 / libm::pow(4.0, n as f64))).abs() < 1e-14);
        }
        assert_eq!(run.orbit.len(), 21);
        let fixed = cyclic_even_trace(&t, &setting, &pt(1.0), 5, &p).unwrap();
        assert!(fixed.even.values().iter().all(|v| *v == 1.0));
        assert!(matches!(
            cyclic_even_trace(&t, &setting, &pt(0.5), 5, &p),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn shift_recovers_companion() {
        let half = SelfMap::scalar("x/2", |x| x / 2.0);
        let tr = picard_trace(&half, &pt(1.0), 5, &line()).unwrap();
        let y = tr.shifted(1);
        assert_eq!(y.len(), 5);
        assert_eq!(y.coords(0), tr.coords(1));
        assert_eq!(y.consecutive_gaps(), &tr.consecutive_gaps()[1..]);
    }
}
