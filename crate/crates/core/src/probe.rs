//! Tent-function probes: the finite stand-in for testing vague convergence
//! against compactly supported continuous functions.

use crate::error::{Error, Result};
use crate::measure::{DensitySegment, Measure, Window};
use crate::scalar::{Cplx, Scalar};

/// Unit-mass tent centered at 0 with support `[-w, w]`: peak value `1/w`.
pub fn tent<F: Scalar>(x: F, w: F) -> F {
    let a = F::one() - x.abs() / w;
    if a > F::zero() {
        a / w
    } else {
        F::zero()
    }
}

/// Primitive of the unit tent: integral of `tent(., w)` over `(-inf, x]`.
pub fn tent_cdf<F: Scalar>(x: F, w: F) -> F {
    if x <= -w {
        F::zero()
    } else if x <= F::zero() {
        let u = x + w;
        u * u / (F::lit(2.0) * w * w)
    } else if x < w {
        let v = x;
        F::lit(0.5) + (v / w - v * v / (F::lit(2.0) * w * w))
    } else {
        F::one()
    }
}

/// Integral of a tent centered at `c` with width `w` over `[a, b]`.
pub fn tent_mass<F: Scalar>(c: F, w: F, a: F, b: F) -> F {
    tent_cdf(b - c, w) - tent_cdf(a - c, w)
}

/// A finite family of tent probes: one tent of width `tent_width` per center.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSeminorm<F> {
    pub tent_width: F,
    pub centers: Vec<F>,
}

impl<F: Scalar> ProbeSeminorm<F> {
    pub fn new(tent_width: F, centers: Vec<F>) -> Result<Self> {
        if tent_width <= F::zero() {
            return Err(Error::BadParam(format!(
                "tent width {tent_width} must be > 0"
            )));
        }
        if centers.is_empty() {
            return Err(Error::BadParam("probe needs at least one center".into()));
        }
        Ok(Self {
            tent_width,
            centers,
        })
    }

    /// Centers on a regular grid over `window` with spacing `step`.
    pub fn grid(window: &Window<F>, tent_width: F, step: F) -> Result<Self> {
        if step <= F::zero() {
            return Err(Error::BadParam(format!("probe step {step} must be > 0")));
        }
        let mut centers = Vec::new();
        let mut c = window.lo;
        while c < window.hi {
            centers.push(c);
            c = c + step;
        }
        Self::new(tent_width, centers)
    }

    /// Default probe over a window: tent width 0.25, center step 0.05.
    pub fn default_over(window: &Window<F>) -> Self {
        Self::grid(window, F::lit(0.25), F::lit(0.05)).expect("valid default probe")
    }

    /// Furthest reach of any probe from the origin.
    pub fn reach(&self) -> F {
        self.centers
            .iter()
            .fold(F::zero(), |m, c| m.max(c.abs()))
            + self.tent_width
    }

    /// `(mu * tent)(c)` for every center `c`.
    pub fn eval(&self, mu: &Measure<F>) -> Vec<Cplx<F>> {
        self.centers
            .iter()
            .map(|&c| smoothed_value(mu, c, self.tent_width))
            .collect()
    }

    /// `max_c |(mu * tent)(c)|`.
    pub fn sup(&self, mu: &Measure<F>) -> F {
        self.eval(mu)
            .iter()
            .fold(F::zero(), |m, v| m.max(v.norm()))
    }

    /// `max_c |((mu - nu) * tent)(c)|`.
    pub fn distance(&self, mu: &Measure<F>, nu: &Measure<F>) -> F {
        self.eval(mu)
            .iter()
            .zip(self.eval(nu))
            .fold(F::zero(), |m, (a, b)| m.max((a - b).norm()))
    }
}

/// `(mu * tent)(c)` for a tent of width `w`: sum of `weight * tent(c - pos)`
/// over atoms in reach plus the exact cell-by-cell tent integral against the
/// density part.
pub fn smoothed_value<F: Scalar>(mu: &Measure<F>, c: F, w: F) -> Cplx<F> {
    let mut acc = Cplx::new(F::zero(), F::zero());
    for a in mu.atoms_in(c - w, c + w) {
        acc = acc + a.weight * Cplx::new(tent(c - a.position, w), F::zero());
    }
    for s in mu.density() {
        acc = acc + segment_tent_integral(s, c, w);
    }
    acc
}

fn segment_tent_integral<F: Scalar>(s: &DensitySegment<F>, c: F, w: F) -> Cplx<F> {
    let lo = (c - w).max(s.origin);
    let hi = (c + w).min(s.end());
    if hi <= lo {
        return Cplx::new(F::zero(), F::zero());
    }
    let i0 = (((lo - s.origin) / s.step).floor().as_f64().max(0.0)) as usize;
    let mut acc = Cplx::new(F::zero(), F::zero());
    for i in i0..s.samples.len() {
        let a = s.origin + s.step * F::from_usize(i).unwrap();
        if a >= hi {
            break;
        }
        let b = (a + s.step).min(hi);
        let a = a.max(lo);
        let m = tent_mass(c, w, a, b);
        if m != F::zero() {
            acc = acc + s.samples[i] * Cplx::new(m, F::zero());
        }
    }
    acc
}
