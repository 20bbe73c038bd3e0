//! Concrete finite-dimensional spaces, points, and the subsets used by
//! cyclic settings.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Bindings, Expr, Scope};
use crate::math;

/// Half-width of the window used to sample unbounded sets.
pub const DEFAULT_SAMPLE_WINDOW: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SpaceId(pub u32);

/// An element of a concrete space. Coordinates are non-empty and finite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Point {
    coords: Vec<f64>,
    space_id: SpaceId,
}

impl Point {
    pub fn new(space_id: SpaceId, coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidPoint("no coordinates".into()));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint(format!(
                "coordinate {} is not finite ({})",
                i, coords[i]
            )));
        }
        Ok(Point { coords, space_id })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn space_id(&self) -> SpaceId {
        self.space_id
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// First coordinate; convenient on the real line.
    pub fn value(&self) -> f64 {
        self.coords[0]
    }
}

/// Distance selector of a space.
#[derive(Debug, Clone, PartialEq)]
pub enum Norm {
    Euclidean,
    /// p-norm with exponent >= 1.
    P(f64),
    /// Evaluable distance in `x[i]`, `y[i]`.
    Custom(Expr),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Space {
    id: SpaceId,
    dimension: usize,
    norm: Norm,
}

impl Space {
    pub fn new(id: SpaceId, dimension: usize, norm: Norm) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Config("space dimension must be positive".into()));
        }
        match &norm {
            Norm::P(p) if !(p.is_finite() && *p >= 1.0) => {
                return Err(Error::Config(format!("p-norm exponent {} must be >= 1", p)));
            }
            Norm::Custom(e) => e.check_scope(Scope::Pair { dim: dimension })?,
            _ => {}
        }
        Ok(Space {
            id,
            dimension,
            norm,
        })
    }

    /// The real line with `|x - y|`.
    pub fn real_line() -> Self {
        Space {
            id: SpaceId(0),
            dimension: 1,
            norm: Norm::Euclidean,
        }
    }

    pub fn euclidean(dimension: usize) -> Self {
        Space {
            id: SpaceId(0),
            dimension: dimension.max(1),
            norm: Norm::Euclidean,
        }
    }

    pub fn id(&self) -> SpaceId {
        self.id
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn norm(&self) -> &Norm {
        &self.norm
    }

    /// Whether the distance comes from a norm (balls and boxes have closed-form gaps).
    pub fn is_normed(&self) -> bool {
        !matches!(self.norm, Norm::Custom(_))
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self.norm, Norm::Euclidean) || (self.dimension == 1 && self.is_normed())
    }

    pub fn point(&self, coords: Vec<f64>) -> Result<Point> {
        if coords.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: coords.len(),
            });
        }
        Point::new(self.id, coords)
    }

    pub fn scalar(&self, v: f64) -> Result<Point> {
        self.point(vec![v])
    }

    pub fn contains(&self, x: &Point) -> Result<()> {
        if x.space_id != self.id {
            return Err(Error::SpaceMismatch {
                expected: self.id.0,
                got: x.space_id.0,
            });
        }
        if x.dim() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: x.dim(),
            });
        }
        Ok(())
    }

    /// `d(x, y)` after membership checks.
    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.contains(x)?;
        self.contains(y)?;
        let d = self.dist(x.coords(), y.coords());
        if !(d >= 0.0) {
            return Err(Error::Evaluation(format!("distance evaluated to {}", d)));
        }
        Ok(d)
    }

    /// Raw distance on coordinate slices; callers guarantee dimensions.
    pub fn dist(&self, x: &[f64], y: &[f64]) -> f64 {
        match &self.norm {
            Norm::Euclidean => {
                if x.len() == 1 {
                    (x[0] - y[0]).abs()
                } else {
                    math::sqrt(x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum())
                }
            }
            Norm::P(p) => {
                if *p == 1.0 {
                    x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum()
                } else {
                    let s: f64 = x
                        .iter()
                        .zip(y)
                        .map(|(a, b)| math::powf((a - b).abs(), *p))
                        .sum();
                    math::powf(s, 1.0 / p)
                }
            }
            Norm::Custom(e) => e.eval(&Bindings::pair(x, y)),
        }
    }

    /// Norm of a coordinate vector (distance to the origin).
    pub fn magnitude(&self, x: &[f64]) -> f64 {
        let zero = vec![0.0; x.len()];
        self.dist(x, &zero)
    }
}

/// `d(x, y)` for two points of `space`.
pub fn eval_distance(space: &Space, x: &Point, y: &Point) -> Result<f64> {
    space.distance(x, y)
}

/// A subset of a space with a membership test and a sampler.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Whole,
    /// Closed interval on the real line; bounds may be infinite.
    Interval {
        lo: f64,
        hi: f64,
    },
    /// Closed ball in the space's distance.
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    /// `{ x : normal . x >= offset }`.
    HalfSpace {
        normal: Vec<f64>,
        offset: f64,
    },
    /// Axis-aligned closed box.
    Cuboid {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    /// Member iff `predicate(x) <= 0`; sampled by rejection inside `lo..hi`.
    Custom {
        predicate: Expr,
        lo: Vec<f64>,
        hi: Vec<f64>,
        convex: bool,
    },
}

impl Region {
    pub fn contains(&self, space: &Space, x: &[f64]) -> bool {
        match self {
            Region::Whole => true,
            Region::Interval { lo, hi } => x[0] >= *lo && x[0] <= *hi,
            Region::Ball { center, radius } => space.dist(x, center) <= *radius,
            Region::HalfSpace { normal, offset } => dot(normal, x) >= *offset,
            Region::Cuboid { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (l, h))| *v >= *l && *v <= *h),
            Region::Custom { predicate, .. } => predicate.eval(&Bindings::point(x)) <= 0.0,
        }
    }

    pub fn is_convex(&self) -> bool {
        match self {
            Region::Custom { convex, .. } => *convex,
            _ => true,
        }
    }

    pub fn validate(&self, space: &Space) -> Result<()> {
        let dim = space.dimension();
        let check_len = |v: &[f64], what: &str| {
            if v.len() == dim {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "{} has {} coordinates, space has dimension {}",
                    what,
                    v.len(),
                    dim
                )))
            }
        };
        match self {
            Region::Whole => Ok(()),
            Region::Interval { lo, hi } => {
                if dim != 1 {
                    return Err(Error::Config(
                        "interval sets need a one-dimensional space".into(),
                    ));
                }
                if lo.is_nan() || hi.is_nan() || lo > hi {
                    return Err(Error::Config(format!("empty interval [{}, {}]", lo, hi)));
                }
                Ok(())
            }
            Region::Ball { center, radius } => {
                check_len(center, "ball center")?;
                if !(*radius >= 0.0) {
                    return Err(Error::Config("ball radius must be nonnegative".into()));
                }
                Ok(())
            }
            Region::HalfSpace { normal, .. } => {
                check_len(normal, "half-space normal")?;
                if normal.iter().all(|v| *v == 0.0) {
                    return Err(Error::Config("half-space normal must be nonzero".into()));
                }
                Ok(())
            }
            Region::Cuboid { lo, hi } => {
                check_len(lo, "box lower corner")?;
                check_len(hi, "box upper corner")?;
                if lo.iter().zip(hi).any(|(l, h)| l > h) {
                    return Err(Error::Config("box has lo > hi".into()));
                }
                Ok(())
            }
            Region::Custom {
                predicate, lo, hi, ..
            } => {
                predicate.check_scope(Scope::Point { dim })?;
                check_len(lo, "sampling box lower corner")?;
                check_len(hi, "sampling box upper corner")
            }
        }
    }

    /// Deterministic points always included in samples (finite boundary points).
    pub fn anchors(&self, dim: usize) -> Vec<Vec<f64>> {
        match self {
            Region::Interval { lo, hi } => [*lo, *hi]
                .iter()
                .filter(|v| v.is_finite())
                .map(|v| vec![*v])
                .collect(),
            Region::Ball { center, .. } => vec![center.clone()],
            Region::Cuboid { lo, hi } => vec![lo.clone(), hi.clone()],
            Region::Whole => vec![vec![0.0; dim]],
            _ => Vec::new(),
        }
    }

    /// Draws one member; `None` when rejection sampling gives up.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        space: &Space,
        rng: &mut R,
        window: f64,
    ) -> Option<Vec<f64>> {
        let dim = space.dimension();
        let uniform = |rng: &mut R, lo: f64, hi: f64| {
            if hi > lo {
                rng.random_range(lo..=hi)
            } else {
                lo
            }
        };
        match self {
            Region::Whole => Some((0..dim).map(|_| uniform(rng, -window, window)).collect()),
            Region::Interval { lo, hi } => {
                let (a, b) = match (lo.is_finite(), hi.is_finite()) {
                    (true, true) => (*lo, *hi),
                    (true, false) => (*lo, lo + window),
                    (false, true) => (hi - window, *hi),
                    (false, false) => (-window, window),
                };
                Some(vec![uniform(rng, a, b)])
            }
            Region::Cuboid { lo, hi } => Some(
                lo.iter()
                    .zip(hi)
                    .map(|(l, h)| uniform(rng, l.max(-window), h.min(window).max(l.max(-window))))
                    .collect(),
            ),
            Region::Ball { center, radius } => {
                for _ in 0..1000 {
                    let p: Vec<f64> = center
                        .iter()
                        .map(|c| uniform(rng, c - radius, c + radius))
                        .collect();
                    if space.dist(&p, center) <= *radius {
                        return Some(p);
                    }
                }
                None
            }
            Region::HalfSpace { normal, offset } => {
                let mut p: Vec<f64> = (0..dim).map(|_| uniform(rng, -window, window)).collect();
                let s = dot(normal, &p);
                if s < *offset {
                    let nn = dot(normal, normal);
                    let k = 2.0 * (offset - s) / nn;
                    p.iter_mut().zip(normal).for_each(|(v, n)| *v += k * n);
                }
                Some(p)
            }
            Region::Custom {
                predicate, lo, hi, ..
            } => {
                for _ in 0..10_000 {
                    let p: Vec<f64> = lo
                        .iter()
                        .zip(hi)
                        .map(|(l, h)| uniform(rng, *l, *h))
                        .collect();
                    if predicate.eval(&Bindings::point(&p)) <= 0.0 {
                        return Some(p);
                    }
                }
                None
            }
        }
    }

    /// One-dimensional view as a closed interval, when the set is one.
    fn as_interval(&self, space: &Space) -> Option<(f64, f64)> {
        if space.dimension() != 1 || !space.is_normed() {
            return None;
        }
        match self {
            Region::Whole => Some((f64::NEG_INFINITY, f64::INFINITY)),
            Region::Interval { lo, hi } => Some((*lo, *hi)),
            Region::Ball { center, radius } => Some((center[0] - radius, center[0] + radius)),
            Region::Cuboid { lo, hi } => Some((lo[0], hi[0])),
            Region::HalfSpace { normal, offset } => {
                let t = offset / normal[0];
                if normal[0] > 0.0 {
                    Some((t, f64::INFINITY))
                } else {
                    Some((f64::NEG_INFINITY, t))
                }
            }
            Region::Custom { .. } => None,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GapProvenance {
    Exact,
    Estimated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapEstimate {
    pub value: f64,
    pub provenance: GapProvenance,
}

/// Closed-form `d(A, B)` for built-in set pairs.
pub fn exact_gap(space: &Space, a: &Region, b: &Region) -> Option<f64> {
    if matches!(a, Region::Whole) || matches!(b, Region::Whole) {
        return Some(0.0);
    }
    if let (Some((l1, h1)), Some((l2, h2))) = (a.as_interval(space), b.as_interval(space)) {
        return Some((l2 - h1).max(l1 - h2).max(0.0));
    }
    if !space.is_normed() {
        return None;
    }
    match (a, b) {
        (
            Region::Ball {
                center: c1,
                radius: r1,
            },
            Region::Ball {
                center: c2,
                radius: r2,
            },
        ) => Some((space.dist(c1, c2) - r1 - r2).max(0.0)),
        (Region::Cuboid { lo: l1, hi: h1 }, Region::Cuboid { lo: l2, hi: h2 }) => {
            let g: Vec<f64> = (0..l1.len())
                .map(|i| (l2[i] - h1[i]).max(l1[i] - h2[i]).max(0.0))
                .collect();
            Some(space.magnitude(&g))
        }
        (Region::Ball { center, radius }, Region::HalfSpace { normal, offset })
        | (Region::HalfSpace { normal, offset }, Region::Ball { center, radius })
            if matches!(space.norm(), Norm::Euclidean) =>
        {
            let to_plane = (offset - dot(normal, center)) / math::sqrt(dot(normal, normal));
            Some((to_plane.max(0.0) - radius).max(0.0))
        }
        _ => None,
    }
}

/// `d(A, B)`: exact for built-in pairs, otherwise the minimum over `budget`
/// sampled cross pairs (an upper bound on the true infimum).
pub fn estimate_set_gap<R: Rng + ?Sized>(
    space: &Space,
    a: &Region,
    b: &Region,
    budget: usize,
    window: f64,
    rng: &mut R,
) -> Result<GapEstimate> {
    if let Some(value) = exact_gap(space, a, b) {
        return Ok(GapEstimate {
            value,
            provenance: GapProvenance::Exact,
        });
    }
    let mut best = f64::INFINITY;
    let anchors_a = a.anchors(space.dimension());
    let anchors_b = b.anchors(space.dimension());
    for pa in &anchors_a {
        for pb in &anchors_b {
            best = best.min(space.dist(pa, pb));
        }
    }
    for _ in 0..budget.max(1) {
        let pa = a
            .sample(space, rng, window)
            .ok_or_else(|| Error::Config("sampler for set A produced no member".into()))?;
        let pb = b
            .sample(space, rng, window)
            .ok_or_else(|| Error::Config("sampler for set B produced no member".into()))?;
        best = best.min(space.dist(&pa, &pb));
    }
    Ok(GapEstimate {
        value: best,
        provenance: GapProvenance::Estimated,
    })
}

/// Two sets `A`, `B` of a space with their gap `d(A, B)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicSetting {
    space: Space,
    a: Region,
    b: Region,
    gap: f64,
    provenance: GapProvenance,
    window: f64,
}

impl CyclicSetting {
    /// Built-in sets with a closed-form gap.
    pub fn new(space: Space, a: Region, b: Region) -> Result<Self> {
        a.validate(&space)?;
        b.validate(&space)?;
        let gap = exact_gap(&space, &a, &b).ok_or_else(|| {
            Error::Config("no closed-form gap for these sets; use an estimated setting".into())
        })?;
        Ok(CyclicSetting {
            space,
            a,
            b,
            gap,
            provenance: GapProvenance::Exact,
            window: DEFAULT_SAMPLE_WINDOW,
        })
    }

    /// Any sets; the gap is exact when available and sampled otherwise.
    pub fn estimated<R: Rng + ?Sized>(
        space: Space,
        a: Region,
        b: Region,
        budget: usize,
        rng: &mut R,
    ) -> Result<Self> {
        a.validate(&space)?;
        b.validate(&space)?;
        let est = estimate_set_gap(&space, &a, &b, budget, DEFAULT_SAMPLE_WINDOW, rng)?;
        Ok(CyclicSetting {
            space,
            a,
            b,
            gap: est.value,
            provenance: est.provenance,
            window: DEFAULT_SAMPLE_WINDOW,
        })
    }

    pub fn with_window(mut self, window: f64) -> Self {
        self.window = window;
        self
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn set_a(&self) -> &Region {
        &self.a
    }

    pub fn set_b(&self) -> &Region {
        &self.b
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }

    pub fn provenance(&self) -> GapProvenance {
        self.provenance
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    pub fn in_a(&self, x: &[f64]) -> bool {
        self.a.contains(&self.space, x)
    }

    pub fn in_b(&self, x: &[f64]) -> bool {
        self.b.contains(&self.space, x)
    }

    /// Anchors plus `count` random members of A.
    pub fn sample_a<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Result<Vec<Vec<f64>>> {
        sample_region(&self.space, &self.a, count, self.window, rng, "A")
    }

    pub fn sample_b<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Result<Vec<Vec<f64>>> {
        sample_region(&self.space, &self.b, count, self.window, rng, "B")
    }

    /// First sampled cross pair with `d(a, b) < gap - slack`, if any.
    pub fn gap_violation<R: Rng + ?Sized>(
        &self,
        count: usize,
        slack: f64,
        rng: &mut R,
    ) -> Result<Option<(Vec<f64>, Vec<f64>, f64)>> {
        let sa = self.sample_a(count, rng)?;
        let sb = self.sample_b(count, rng)?;
        for pa in &sa {
            for pb in &sb {
                let d = self.space.dist(pa, pb);
                if d < self.gap - slack {
                    return Ok(Some((pa.clone(), pb.clone(), d)));
                }
            }
        }
        Ok(None)
    }
}

fn sample_region<R: Rng + ?Sized>(
    space: &Space,
    region: &Region,
    count: usize,
    window: f64,
    rng: &mut R,
    name: &str,
) -> Result<Vec<Vec<f64>>> {
    let mut out = region.anchors(space.dimension());
    out.retain(|p| region.contains(space, p));
    for _ in 0..count {
        let p = region
            .sample(space, rng, window)
            .ok_or_else(|| Error::Config(format!("sampler for set {} produced no member", name)))?;
        out.push(p);
    }
    Ok(out)
}
