use super::Complex;
use crate::error::{Error, Result};
use std::sync::Mutex;

type Builder = dyn Fn(i64, i64) -> Result<Complex> + Send + Sync;

/// A complex known on demand through a builder for any window `[lo, hi]`.
///
/// The builder must be deterministic and agree with itself on overlaps;
/// [`extend`](LazyComplex::extend) checks this. Read access never extends.
pub struct LazyComplex {
    builder: Box<Builder>,
    cache: Mutex<Option<(i64, i64, Complex)>>,
}

impl LazyComplex {
    pub fn new(builder: impl Fn(i64, i64) -> Result<Complex> + Send + Sync + 'static) -> Self {
        LazyComplex { builder: Box::new(builder), cache: Mutex::new(None) }
    }

    /// Make `[lo, hi]` available. Idempotent; previously computed degrees never change.
    pub fn extend(&self, lo: i64, hi: i64) -> Result<()> {
        let mut guard = self.cache.lock().unwrap();
        let (a, b) = match &*guard {
            Some((a, b, _)) if *a <= lo && *b >= hi => return Ok(()),
            Some((a, b, _)) => ((*a).min(lo), (*b).max(hi)),
            None => (lo, hi),
        };
        let c = (self.builder)(a, b)?.padded(a, b);
        if let Some((oa, ob, old)) = &*guard {
            if c.restrict(*oa, *ob).padded(*oa, *ob) != *old {
                return Err(Error::ValidationError("lazy complex builder changed already computed degrees".into()));
            }
        }
        *guard = Some((a, b, c));
        Ok(())
    }

    /// The brutal truncation to `[lo, hi]`, which must already be computed.
    pub fn window(&self, lo: i64, hi: i64) -> Result<Complex> {
        let guard = self.cache.lock().unwrap();
        match &*guard {
            Some((a, b, c)) if *a <= lo && *b >= hi => Ok(c.restrict(lo, hi).padded(lo, hi)),
            Some((a, b, _)) => Err(Error::WindowTooSmall(format!("[{lo}, {hi}] requested, [{a}, {b}] computed"))),
            None => Err(Error::WindowTooSmall(format!("[{lo}, {hi}] requested, nothing computed"))),
        }
    }

    pub fn extend_and_window(&self, lo: i64, hi: i64) -> Result<Complex> {
        self.extend(lo, hi)?;
        self.window(lo, hi)
    }

    pub fn computed(&self) -> Option<(i64, i64)> {
        self.cache.lock().unwrap().as_ref().map(|(a, b, _)| (*a, *b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;
    use crate::module::Module;

    #[test]
    fn windows_fail_loudly_and_extend_consistently() {
        let alg = Algebra::truncated_poly(2, 2);
        let a2 = alg.clone();
        let lazy = LazyComplex::new(move |lo, hi| {
            Ok(Complex::from_fn(&a2, lo, hi, |_| Module::regular(&a2), |_| a2.left(1).clone()))
        });
        assert!(matches!(lazy.window(0, 1), Err(Error::WindowTooSmall(_))));
        lazy.extend(-3, 3).unwrap();
        let small = lazy.window(-3, 3).unwrap();
        lazy.extend(-6, 6).unwrap();
        assert_eq!(lazy.window(-3, 3).unwrap(), small);
        assert_eq!(lazy.computed(), Some((-6, 6)));
    }
}
