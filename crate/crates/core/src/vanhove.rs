//! Parametrized van Hove families of averaging intervals.

use crate::error::{Error, Result};
use crate::measure::Window;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyKind {
    /// L_n = n * base
    Linear,
    /// L_n = base * ratio^n
    Geometric { ratio: f64 },
}

/// Nested family of averaging intervals A_n with vanishing boundary ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VanHoveFamily {
    pub kind: FamilyKind,
    pub base: f64,
    pub centered: bool,
}

impl VanHoveFamily {
    pub fn linear(base: f64) -> Self {
        Self {
            kind: FamilyKind::Linear,
            base,
            centered: true,
        }
    }

    pub fn geometric(base: f64, ratio: f64) -> Self {
        Self {
            kind: FamilyKind::Geometric { ratio },
            base,
            centered: true,
        }
    }

    pub fn uncentered(mut self) -> Self {
        self.centered = false;
        self
    }

    /// Half-length L_n of the n-th interval (n >= 1).
    pub fn length(&self, n: u32) -> Result<f64> {
        if n == 0 {
            return Err(Error::BadParam("family index n must be >= 1".into()));
        }
        if self.base <= 0.0 {
            return Err(Error::BadParam(format!("family base {} must be > 0", self.base)));
        }
        let l = match self.kind {
            FamilyKind::Linear => self.base * n as f64,
            FamilyKind::Geometric { ratio } => {
                if ratio <= 1.0 {
                    return Err(Error::BadParam(format!("geometric ratio {ratio} must be > 1")));
                }
                self.base * ratio.powi(n as i32)
            }
        };
        if !l.is_finite() {
            return Err(Error::NonFinite(format!("L_{n} overflows")));
        }
        Ok(l)
    }

    /// A_n as a window: `[-L_n, L_n)` when centered, `[0, L_n)` otherwise.
    pub fn interval<F: Scalar>(&self, n: u32) -> Result<Window<F>> {
        let l = self.length(n)?;
        if self.centered {
            Window::new(F::lit(-l), F::lit(l))
        } else {
            Window::new(F::zero(), F::lit(l))
        }
    }

    /// |d^K A_n| / |A_n| for K = [-k, k], in closed form for intervals.
    ///
    /// Each interval endpoint contributes a band of width 2k, so the ratio is
    /// `2k * boundaries / |A_n|` with two boundaries per interval.
    pub fn boundary_ratio(&self, n: u32, k: f64) -> Result<f64> {
        if k < 0.0 {
            return Err(Error::BadParam(format!("boundary width k = {k} must be >= 0")));
        }
        let l = self.length(n)?;
        let volume = if self.centered { 2.0 * l } else { l };
        Ok(2.0 * k * 2.0 / volume)
    }

    /// Parse the CLI/config encoding: "linear:100", "geo:10:2.0", optional
    /// ":uncentered" suffix.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut parts: Vec<&str> = spec.split(':').collect();
        let uncentered = parts.last() == Some(&"uncentered");
        if uncentered {
            parts.pop();
        }
        let bad = || Error::Parse(format!("bad family spec '{spec}'"));
        let fam = match parts.as_slice() {
            ["linear", base] => {
                VanHoveFamily::linear(base.parse::<f64>().map_err(|_| bad())?)
            }
            ["geo", base, ratio] => VanHoveFamily::geometric(
                base.parse::<f64>().map_err(|_| bad())?,
                ratio.parse::<f64>().map_err(|_| bad())?,
            ),
            _ => return Err(bad()),
        };
        // validate parameters eagerly
        fam.length(1)?;
        Ok(if uncentered { fam.uncentered() } else { fam })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_interval() {
        let f = VanHoveFamily::linear(100.0);
        let w: Window<f64> = f.interval(3).unwrap();
        assert_eq!((w.lo, w.hi), (-300.0, 300.0));
        let w1: Window<f64> = f.interval(1).unwrap();
        assert_eq!((w1.lo, w1.hi), (-100.0, 100.0));
    }

    #[test]
    fn geometric_interval() {
        let f = VanHoveFamily::geometric(10.0, 2.0);
        let w: Window<f64> = f.interval(4).unwrap();
        assert_eq!((w.lo, w.hi), (-160.0, 160.0));
    }

    #[test]
    fn boundary_ratio_closed_form() {
        let f = VanHoveFamily::linear(1.0);
        // centered [-L, L), k=1 -> 4 / (2L) = 2/L
        let r = f.boundary_ratio(5, 1.0).unwrap();
        assert!((r - 2.0 / 5.0).abs() < 1e-15);
        assert_eq!(f.boundary_ratio(3, 0.0).unwrap(), 0.0);
        // halves when n doubles
        let a = f.boundary_ratio(4, 1.0).unwrap();
        let b = f.boundary_ratio(8, 1.0).unwrap();
        assert!((a - 2.0 * b).abs() < 1e-15);
    }

    #[test]
    fn boundary_ratio_monotone_and_scaling() {
        for fam in [
            VanHoveFamily::linear(7.0),
            VanHoveFamily::geometric(3.0, 1.5),
        ] {
            let mut prev = f64::INFINITY;
            for n in 1..20 {
                let r = fam.boundary_ratio(n, 0.5).unwrap();
                assert!(r < prev);
                prev = r;
            }
        }
        // linear family: n * ratio is constant in n
        let fam = VanHoveFamily::linear(11.0);
        let c1 = 1.0 * fam.boundary_ratio(1, 2.0).unwrap();
        for n in 2..50 {
            let c = n as f64 * fam.boundary_ratio(n, 2.0).unwrap();
            assert!((c - c1).abs() < 1e-15 * c1.abs().max(1.0));
        }
    }

    #[test]
    fn parse_specs() {
        assert_eq!(
            VanHoveFamily::parse("linear:100").unwrap(),
            VanHoveFamily::linear(100.0)
        );
        assert_eq!(
            VanHoveFamily::parse("geo:10:2.0").unwrap(),
            VanHoveFamily::geometric(10.0, 2.0)
        );
        let f = VanHoveFamily::parse("linear:5:uncentered").unwrap();
        assert!(!f.centered);
        assert!(VanHoveFamily::parse("bogus").is_err());
        assert!(VanHoveFamily::parse("geo:10:0.5").is_err());
    }

    #[test]
    fn overflow_is_an_error() {
        let f = VanHoveFamily::geometric(10.0, 10.0);
        assert!(f.length(400).is_err());
    }
}
