use std::fmt;
use std::sync::Arc;

type Eval = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A real function of the radius `s >= 0`, with its support interval and an
/// optional bound on `|eval|`.
#[derive(Clone)]
pub struct RadialProfile {
    name: String,
    eval: Eval,
    support: (f64, f64),
    sup_bound: Option<f64>,
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProfile")
            .field("name", &self.name)
            .field("support", &self.support)
            .field("sup_bound", &self.sup_bound)
            .finish()
    }
}

impl RadialProfile {
    /// Wraps `eval`; values outside `[a, b]` are forced to zero.
    pub fn new<F>(name: impl Into<String>, support: (f64, f64), sup_bound: Option<f64>, eval: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        assert!(
            support.0 >= 0.0 && support.0 <= support.1,
            "support must satisfy 0 <= a <= b"
        );
        Self { name: name.into(), eval: Arc::new(eval), support, sup_bound }
    }

    /// The identity multiplier.
    pub fn constant(c: f64) -> Self {
        Self::new(format!("const({c})"), (0.0, f64::INFINITY), Some(c.abs()), move |_| c)
    }

    /// `c` on `[r, rho r)` and zero elsewhere.
    pub fn sharp_annulus(c: f64, r: f64, rho: f64) -> Self {
        assert!(r > 0.0 && rho > 1.0, "annulus needs r > 0 and rho > 1");
        let hi = rho * r;
        Self::new(format!("annulus({c},{r},{rho})"), (r, hi), Some(c.abs()), move |s| {
            if s >= r && s < hi {
                c
            } else {
                0.0
            }
        })
    }

    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        if s < self.support.0 || s > self.support.1 {
            0.0
        } else {
            (self.eval)(s)
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn sup_bound(&self) -> Option<f64> {
        self.sup_bound
    }

    pub fn with_sup_bound(mut self, bound: f64) -> Self {
        self.sup_bound = Some(bound);
        self
    }

    /// Whether the support is a bounded annulus `[a, b]` with `0 < a`.
    pub fn is_annular(&self) -> bool {
        self.support.0 > 0.0 && self.support.1.is_finite()
    }

    /// The profile `s -> eval(r s)`.
    pub fn dilate(&self, r: f64) -> Self {
        assert!(r > 0.0, "dilation factor must be positive");
        let inner = self.clone();
        Self::new(
            format!("{}(r={r})", self.name),
            (self.support.0 / r, self.support.1 / r),
            self.sup_bound,
            move |s| inner.eval(r * s),
        )
    }

    /// Pointwise product with a second profile.
    pub fn product(&self, other: &RadialProfile, name: impl Into<String>) -> Self {
        let (a, b) = (self.clone(), other.clone());
        let support = (self.support.0.max(other.support.0), self.support.1.min(other.support.1));
        let support = if support.0 <= support.1 { support } else { (support.0, support.0) };
        let bound = match (self.sup_bound, other.sup_bound) {
            (Some(x), Some(y)) => Some(x * y),
            _ => None,
        };
        Self::new(name, support, bound, move |s| a.eval(s) * b.eval(s))
    }
}
