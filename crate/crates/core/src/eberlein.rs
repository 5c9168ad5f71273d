//! Finite-volume (twisted) Eberlein convolution approximants and the
//! convergence-controlled limit procedure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{Measure, Window};
use crate::probe::ProbeSeminorm;
use crate::scalar::{Cplx, Scalar};
use crate::vanhove::VanHoveFamily;

/// Which factor gets restricted to the averaging interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormRestriction {
    Both,
    LeftOnly,
    RightOnly,
}

/// Stage-by-stage record of the convergence loop.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// (n, |A_n|, probe distance to the previous stage; None at n = 1)
    pub stages: Vec<(u32, f64, Option<f64>)>,
    pub converged: bool,
    pub final_n: u32,
    /// human-readable descriptor of the probe seminorm used
    pub metric: String,
}

impl ConvergenceReport {
    pub fn last_distance(&self) -> Option<f64> {
        self.stages.last().and_then(|s| s.2)
    }
}

fn check_out_reachable<F: Scalar>(a: &Window<F>, out: &Window<F>) -> Result<()> {
    let reach_lo = a.lo - a.hi;
    let reach_hi = a.hi - a.lo;
    if out.lo < reach_lo || out.hi > reach_hi {
        return Err(Error::WindowUnreachable {
            requested: format!("[{}, {})", out.lo, out.hi),
            reachable: format!("[{reach_lo}, {reach_hi})"),
        });
    }
    Ok(())
}

/// One finite-volume stage of the twisted Eberlein convolution:
/// `(1/|A|) (mu|_A) * ~(nu|_A)`, restricted to `out`.
pub fn finite_twisted<F: Scalar>(
    mu: &Measure<F>,
    nu: &Measure<F>,
    a: &Window<F>,
    out: &Window<F>,
) -> Result<Measure<F>> {
    check_out_reachable(a, out)?;
    let left = mu.restrict(a);
    let right = nu.restrict(a).reflect_tilde();
    let conv = left.convolve_finite(&right, out)?;
    Ok(conv.scale(Cplx::new(F::one() / a.len(), F::zero())))
}

/// One finite-volume stage of the plain Eberlein convolution:
/// `(1/|A|) (mu|_A) * (nu|_{-A})`, restricted to `out`.
///
/// Implemented through the twisted path: `mu (*) nu = <mu, ~nu>`.
pub fn finite_eberlein<F: Scalar>(
    mu: &Measure<F>,
    nu: &Measure<F>,
    a: &Window<F>,
    out: &Window<F>,
) -> Result<Measure<F>> {
    finite_twisted(mu, &nu.reflect_tilde(), a, out)
}

/// Alternate limit forms: restrict both factors, only the left, or only the
/// right one (the unrestricted factor is taken over its full stored support).
pub fn finite_twisted_alt<F: Scalar>(
    mu: &Measure<F>,
    nu: &Measure<F>,
    a: &Window<F>,
    out: &Window<F>,
    form: FormRestriction,
) -> Result<Measure<F>> {
    match form {
        FormRestriction::Both => finite_twisted(mu, nu, a, out),
        FormRestriction::LeftOnly => {
            check_out_reachable(a, out)?;
            let conv = mu
                .restrict(a)
                .convolve_finite(&nu.reflect_tilde(), out)?;
            Ok(conv.scale(Cplx::new(F::one() / a.len(), F::zero())))
        }
        FormRestriction::RightOnly => {
            check_out_reachable(a, out)?;
            let conv = mu
                .convolve_finite(&nu.restrict(a).reflect_tilde(), out)?;
            Ok(conv.scale(Cplx::new(F::one() / a.len(), F::zero())))
        }
    }
}

/// Probe seminorm of the boundary term `(1/|A|) (mu - mu|_A) * ~(nu|_A)`.
///
/// The vanishing of this term as A grows is what makes the three limit forms
/// agree; the returned value is dominated by
/// `||tent * |nu|||_inf * |mu|(d^K A) / |A|`.
pub fn boundary_defect<F: Scalar>(
    mu: &Measure<F>,
    nu: &Measure<F>,
    a: &Window<F>,
    probe: &ProbeSeminorm<F>,
) -> Result<F> {
    let reach = probe.reach();
    if let Some(s) = mu.support() {
        if !mu.is_zero() && (s.lo > a.lo - reach || s.hi < a.hi + reach) {
            return Err(Error::SupportShortfall(format!(
                "mu stored on [{}, {}) but the boundary term needs [{}, {})",
                s.lo,
                s.hi,
                a.lo - reach,
                a.hi + reach
            )));
        }
    }
    let one = Cplx::new(F::one(), F::zero());
    let outer = mu.add_scaled(&mu.restrict(a), one, -one);
    let right = nu.restrict(a).reflect_tilde();
    let out = Window::new(
        probe.centers.first().copied().unwrap() - probe.tent_width,
        probe.centers.last().copied().unwrap() + probe.tent_width,
    )?;
    let conv = outer.convolve_finite(&right, &out)?;
    Ok(probe.sup(&conv.scale(Cplx::new(F::one() / a.len(), F::zero()))))
}

/// Convergence-controlled twisted Eberlein convolution along a van Hove
/// family. Consecutive stages are compared in the probe seminorm; the loop
/// stops when the distance drops below `tol` or `n_max` is reached.
pub fn twisted_eberlein<F: Scalar>(
    mu: &Measure<F>,
    nu: &Measure<F>,
    family: &VanHoveFamily,
    out: &Window<F>,
    probe: &ProbeSeminorm<F>,
    tol: F,
    n_max: u32,
) -> Result<(Measure<F>, ConvergenceReport)> {
    if tol <= F::zero() {
        return Err(Error::BadParam(format!("tol {tol} must be > 0")));
    }
    if n_max < 2 {
        return Err(Error::BadParam("n_max must be >= 2".into()));
    }
    let largest: Window<F> = family.interval(n_max)?;
    let radius = out.lo.abs().max(out.hi.abs());
    let need = largest.expand(radius);
    for m in [mu, nu] {
        if m.is_zero() {
            continue;
        }
        let s = m.support().unwrap();
        if s.lo > need.lo || s.hi < need.hi {
            return Err(Error::SupportShortfall(format!(
                "measure stored on [{}, {}) but the stage ladder needs [{}, {})",
                s.lo, s.hi, need.lo, need.hi
            )));
        }
    }

    let mut stages: Vec<(u32, f64, Option<f64>)> = Vec::new();
    let mut prev: Option<Measure<F>> = None;
    let mut current = Measure::zero();
    let mut converged = false;
    let mut final_n = n_max;
    for n in 1..=n_max {
        let a: Window<F> = family.interval(n)?;
        current = finite_twisted(mu, nu, &a, out)?;
        let dist = prev.as_ref().map(|p| probe.distance(&current, p));
        stages.push((n, a.len().as_f64(), dist.map(|d| d.as_f64())));
        if let Some(d) = dist {
            if d < tol {
                converged = true;
                final_n = n;
                break;
            }
        }
        prev = Some(current.clone());
    }
    let report = ConvergenceReport {
        stages,
        converged,
        final_n,
        metric: format!(
            "max over {} tent probes (width {})",
            probe.centers.len(),
            probe.tent_width
        ),
    };
    Ok((current, report))
}

/// Recombine the four autocorrelations of `mu+nu`, `mu-nu`, `mu+i nu`,
/// `mu-i nu` into `<mu, nu>` via the polarisation identity:
/// `(1/4) [pp - mm + i pi - i mi]`.
pub fn polarisation_combine<F: Scalar>(
    pp: &Measure<F>,
    mm: &Measure<F>,
    pi: &Measure<F>,
    mi: &Measure<F>,
) -> Measure<F> {
    let quarter = F::lit(0.25);
    let re = Cplx::new(quarter, F::zero());
    let im = Cplx::new(F::zero(), quarter);
    pp.add_scaled(mm, re, -re)
        .add_scaled(&pi.add_scaled(mi, im, -im), Cplx::new(F::one(), F::zero()), Cplx::new(F::one(), F::zero()))
}
