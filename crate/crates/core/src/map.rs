//! Evaluable self-maps `T : X -> X`.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::expr::{Bindings, Expr, Scope};
use crate::space::{Point, Space};

#[derive(Clone)]
enum MapFn {
    Exprs(Vec<Expr>),
    Native(Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>),
}

#[derive(Clone)]
pub struct SelfMap {
    name: String,
    dim: usize,
    func: MapFn,
}

impl fmt::Debug for SelfMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SelfMap")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .finish()
    }
}

impl SelfMap {
    /// One expression per output coordinate, in `x[i]`.
    pub fn from_exprs(dim: usize, sources: &[&str]) -> Result<Self> {
        if sources.len() != dim {
            return Err(Error::Config(format!(
                "map has {} coordinate expressions, space has dimension {}",
                sources.len(),
                dim
            )));
        }
        let exprs = sources
            .iter()
            .map(|s| Expr::parse_in(s, Scope::Point { dim }))
            .collect::<Result<Vec<_>>>()?;
        let name = exprs
            .iter()
            .map(|e| e.source())
            .collect::<Vec<_>>()
            .join(", ");
        Ok(SelfMap {
            name: format!("x -> ({})", name),
            dim,
            func: MapFn::Exprs(exprs),
        })
    }

    pub fn native(
        name: impl Into<String>,
        dim: usize,
        f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        SelfMap {
            name: name.into(),
            dim,
            func: MapFn::Native(Arc::new(f)),
        }
    }

    /// A map of the real line.
    pub fn scalar(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        SelfMap::native(name, 1, move |x| alloc::vec![f(x[0])])
    }

    pub fn identity(dim: usize) -> Self {
        SelfMap::native("identity", dim, |x| x.to_vec())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn apply_raw(&self, x: &[f64]) -> Vec<f64> {
        match &self.func {
            MapFn::Exprs(es) => {
                let b = Bindings::point(x);
                es.iter().map(|e| e.eval(&b)).collect()
            }
            MapFn::Native(f) => f(x),
        }
    }

    /// `T x`, rejecting non-finite images.
    pub fn apply(&self, space: &Space, x: &Point) -> Result<Point> {
        space.contains(x)?;
        let y = self.apply_raw(x.coords());
        space.point(y).map_err(|e| {
            Error::Evaluation(format!("map `{}` at {:?}: {}", self.name, x.coords(), e))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expression_map() {
        let m = SelfMap::from_exprs(2, &["x[0] + 1/(x[1]+1)", "x[1] + 1"]).unwrap();
        assert_eq!(m.apply_raw(&[0.0, 0.0]), alloc::vec![1.0, 1.0]);
        assert_eq!(m.apply_raw(&[1.0, 1.0]), alloc::vec![1.5, 2.0]);
        assert!(SelfMap::from_exprs(2, &["x[0]"]).is_err());
        assert!(SelfMap::from_exprs(1, &["x[1]"]).is_err());
    }

    #[test]
    fn non_finite_image_is_error() {
        let s = Space::real_line();
        let m = SelfMap::scalar("recip", |x| 1.0 / x);
        assert!(m.apply(&s, &s.scalar(0.0).unwrap()).is_err());
        assert_eq!(m.apply(&s, &s.scalar(4.0).unwrap()).unwrap().value(), 0.25);
    }
}
