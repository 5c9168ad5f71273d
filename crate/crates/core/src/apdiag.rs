//! Almost-periodicity diagnostics: Besicovitch seminorms, sliding-window
//! K-norm distances, smoothed sup-seminorms and epsilon-almost-period scans.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{DensitySegment, Measure, Window};
use crate::probe::smoothed_value;
use crate::scalar::{Cplx, Scalar};
use crate::vanhove::VanHoveFamily;

/// Besicovitch stage ladder: per-stage averaged L^p values plus the tail-max
/// limsup proxy.
#[derive(Debug, Clone)]
pub struct SeminormReport<F> {
    /// (n, ((1/|A_n|) int_{A_n} |f|^p)^{1/p})
    pub stages: Vec<(u32, F)>,
    /// max over the last ceil(n_max/4) stages
    pub value: F,
}

/// Stage values of the volume-averaged L^p norm of the density part of `f`.
///
/// The measure must be purely absolutely continuous (smooth atoms first, see
/// [`smooth`]); values outside the stored support count as zero.
pub fn besicovitch_seminorm<F: Scalar>(
    f: &Measure<F>,
    p: F,
    family: &VanHoveFamily,
    n_max: u32,
) -> Result<SeminormReport<F>> {
    if p < F::one() {
        return Err(Error::BadParam(format!("p = {p} must be >= 1")));
    }
    if !f.atoms().is_empty() {
        return Err(Error::BadParam(
            "Besicovitch seminorm needs a density signal; smooth the atoms first".into(),
        ));
    }
    let mut stages = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max.max(1) {
        let a: Window<F> = family.interval(n)?;
        let mut integral = F::zero();
        for s in f.density() {
            let lo = a.lo.max(s.origin);
            let hi = a.hi.min(s.end());
            if hi <= lo {
                continue;
            }
            let i0 = (((lo - s.origin) / s.step).floor().as_f64().max(0.0)) as usize;
            for i in i0..s.samples.len() {
                let ca = s.origin + s.step * F::from_usize(i).unwrap();
                if ca >= hi {
                    break;
                }
                let cb = (ca + s.step).min(hi);
                let w = cb - ca.max(lo);
                integral = integral + s.samples[i].norm().powf(p) * w;
            }
        }
        stages.push((n, (integral / a.len()).powf(F::one() / p)));
    }
    let tail = (n_max as usize).div_ceil(4).max(1);
    let value = stages
        .iter()
        .rev()
        .take(tail)
        .fold(F::zero(), |m, (_, v)| m.max(*v));
    Ok(SeminormReport { stages, value })
}

/// Sample `(mu * tent)` as a piecewise-constant density over the stored
/// support expanded by the tent reach.
pub fn smooth<F: Scalar>(mu: &Measure<F>, tent_width: F, sample_step: F) -> Result<Measure<F>> {
    if sample_step <= F::zero() || tent_width <= F::zero() {
        return Err(Error::BadParam("tent width and step must be > 0".into()));
    }
    let Some(sup) = mu.support() else {
        return Ok(Measure::zero());
    };
    let lo = sup.lo - tent_width;
    let hi = sup.hi + tent_width;
    let n = ((hi - lo) / sample_step).ceil().as_f64() as usize;
    let samples = (0..n.max(1))
        .map(|i| {
            let mid = lo + sample_step * (F::from_usize(i).unwrap() + F::lit(0.5));
            smoothed_value(mu, mid, tent_width)
        })
        .collect();
    Ok(Measure::from_density(DensitySegment::new(lo, sample_step, samples)?))
}

/// Besicovitch p-seminorm of `(mu - nu) * tent`.
pub fn smoothed_besicovitch_distance<F: Scalar>(
    mu: &Measure<F>,
    nu: &Measure<F>,
    tent_width: F,
    p: F,
    family: &VanHoveFamily,
    n_max: u32,
) -> Result<F> {
    let one = Cplx::new(F::one(), F::zero());
    let diff = mu.add_scaled(nu, one, -one);
    let g = smooth(&diff, tent_width, tent_width / F::lit(5.0))?;
    Ok(besicovitch_seminorm(&g, p, family, n_max)?.value)
}

/// `sup_t |mu - nu|([t, t + k_len))` over the search window, evaluated at the
/// event points where atoms or density cells enter/leave the window.
pub fn k_norm_distance<F: Scalar>(
    mu: &Measure<F>,
    nu: &Measure<F>,
    k_len: F,
    search: &Window<F>,
) -> Result<F> {
    if k_len <= F::zero() {
        return Err(Error::BadParam(format!("k_len {k_len} must be > 0")));
    }
    let one = Cplx::new(F::one(), F::zero());
    let diff = mu.add_scaled(nu, one, -one);
    Ok(diff.sup_window_mass(k_len, Some(*search)))
}

/// Which translation-difference norm an almost-period scan uses.
#[derive(Debug, Clone, PartialEq)]
pub enum NormKind<F> {
    /// Besicovitch p-seminorm of the tent-smoothed difference
    Besicovitch { p: F, tent_width: F },
    /// sliding-window total-variation sup norm
    KNorm { k_len: F },
    /// sup over probe centers of the tent-smoothed difference
    SmoothedSup { tent_width: F },
}

impl<F: Scalar> NormKind<F> {
    pub fn describe(&self) -> String {
        match self {
            NormKind::Besicovitch { p, tent_width } => {
                format!("besicovitch(p={p}, tent={tent_width})")
            }
            NormKind::KNorm { k_len } => format!("kNorm(len={k_len})"),
            NormKind::SmoothedSup { tent_width } => format!("smoothedSup(tent={tent_width})"),
        }
    }

    /// Parse the CLI encoding: "b1", "b2", "k:LEN", "sup:W".
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad norm spec '{spec}'"));
        match spec {
            "b1" => Ok(NormKind::Besicovitch {
                p: F::one(),
                tent_width: F::lit(0.25),
            }),
            "b2" => Ok(NormKind::Besicovitch {
                p: F::lit(2.0),
                tent_width: F::lit(0.25),
            }),
            _ => {
                if let Some(rest) = spec.strip_prefix("k:") {
                    let l: f64 = rest.parse().map_err(|_| bad())?;
                    Ok(NormKind::KNorm { k_len: F::lit(l) })
                } else if let Some(rest) = spec.strip_prefix("sup:") {
                    let w: f64 = rest.parse().map_err(|_| bad())?;
                    Ok(NormKind::SmoothedSup { tent_width: F::lit(w) })
                } else {
                    Err(bad())
                }
            }
        }
    }
}

/// Result of an epsilon-almost-period scan.
#[derive(Debug, Clone, Serialize)]
pub struct AlmostPeriodScan {
    pub epsilon: f64,
    pub norm: String,
    /// (t, norm value, is a period)
    pub samples: Vec<(f64, f64, bool)>,
    /// translations with norm value < epsilon, sorted
    pub periods: Vec<f64>,
    /// largest gap between consecutive periods, counting the scan range
    /// endpoints; the finite-window proxy for relative denseness
    pub max_gap: f64,
    pub scan_lo: f64,
    pub scan_hi: f64,
    pub t_step: f64,
}

/// Evaluate the chosen translation-difference norm on a grid of translations
/// and report the epsilon-almost periods found.
///
/// The comparison window is the stored support shrunk by the largest scanned
/// |t| (plus the norm's reach), so both `mu` and its translate are fully
/// stored wherever they are compared.
pub fn almost_period_scan<F: Scalar>(
    mu: &Measure<F>,
    eps: F,
    norm: &NormKind<F>,
    t_range: &Window<F>,
    t_step: F,
    family: &VanHoveFamily,
) -> Result<AlmostPeriodScan> {
    if eps <= F::zero() || t_step <= F::zero() {
        return Err(Error::BadParam("eps and t_step must be > 0".into()));
    }
    let sup = mu
        .support()
        .ok_or_else(|| Error::BadParam("cannot scan the zero measure".into()))?;
    let t_reach = t_range.lo.abs().max(t_range.hi.abs());
    let margin = match norm {
        NormKind::Besicovitch { tent_width, .. } => t_reach + *tent_width,
        NormKind::KNorm { k_len } => t_reach + *k_len,
        NormKind::SmoothedSup { tent_width } => t_reach + *tent_width,
    };
    let eval = Window::new(sup.lo + margin, sup.hi - margin).map_err(|_| {
        Error::SupportShortfall(format!(
            "support [{}, {}) too small for scan reach {margin}",
            sup.lo, sup.hi
        ))
    })?;

    let value_at = |t: F| -> Result<F> {
        let shifted = mu.translate(t);
        match norm {
            NormKind::KNorm { k_len } => k_norm_distance(mu, &shifted, *k_len, &eval),
            NormKind::SmoothedSup { tent_width } => {
                let one = Cplx::new(F::one(), F::zero());
                let diff = mu.add_scaled(&shifted, one, -one);
                let step = *tent_width / F::lit(5.0);
                let mut best = F::zero();
                let mut c = eval.lo;
                while c < eval.hi {
                    best = best.max(smoothed_value(&diff, c, *tent_width).norm());
                    c = c + step;
                }
                Ok(best)
            }
            NormKind::Besicovitch { p, tent_width } => {
                // cap the stage ladder inside the comparison window
                let mut n_cap = 0u32;
                while family
                    .interval::<F>(n_cap + 1)
                    .map(|a| a.lo >= eval.lo && a.hi <= eval.hi)
                    .unwrap_or(false)
                {
                    n_cap += 1;
                }
                if n_cap == 0 {
                    return Err(Error::SupportShortfall(
                        "no family stage fits the comparison window".into(),
                    ));
                }
                smoothed_besicovitch_distance(mu, &shifted, *tent_width, *p, family, n_cap)
            }
        }
    };

    let mut ts: Vec<F> = Vec::new();
    let mut t = t_range.lo;
    while t <= t_range.hi + t_step * F::lit(1e-9) {
        ts.push(t);
        t = t + t_step;
    }
    // t = 0 is always a period; make sure the grid does not skip it
    if t_range.lo <= F::zero()
        && t_range.hi >= F::zero()
        && !ts.iter().any(|x| x.abs() < t_step * F::lit(1e-9))
    {
        ts.push(F::zero());
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    }

    let mut samples = Vec::with_capacity(ts.len());
    let mut periods = Vec::new();
    for &t in &ts {
        let v = if t == F::zero() { F::zero() } else { value_at(t)? };
        let is_period = v < eps;
        if is_period {
            periods.push(t.as_f64());
        }
        samples.push((t.as_f64(), v.as_f64(), is_period));
    }
    let lo = t_range.lo.as_f64();
    let hi = t_range.hi.as_f64();
    let max_gap = if periods.is_empty() {
        hi - lo
    } else {
        let mut gap: f64 = periods[0] - lo;
        for w in periods.windows(2) {
            gap = gap.max(w[1] - w[0]);
        }
        gap.max(hi - periods.last().unwrap())
    };
    Ok(AlmostPeriodScan {
        epsilon: eps.as_f64(),
        norm: norm.describe(),
        samples,
        periods,
        max_gap,
        scan_lo: lo,
        scan_hi: hi,
        t_step: t_step.as_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Atom;
    use num_complex::Complex;

    type M = Measure<f64>;
    type C = Complex<f64>;

    fn c(x: f64) -> C {
        C::new(x, 0.0)
    }

    fn integer_comb(lo: i64, hi: i64) -> M {
        M::from_atoms((lo..hi).map(|m| Atom::new(m as f64, c(1.0))).collect())
    }

    #[test]
    fn constant_density_seminorm() {
        let seg = DensitySegment::new(-500.0, 0.5, vec![c(2.5); 2000]).unwrap();
        let m = M::from_density(seg);
        let fam = VanHoveFamily::linear(10.0);
        let rep = besicovitch_seminorm(&m, 1.0, &fam, 20).unwrap();
        for (_, v) in &rep.stages {
            assert!((v - 2.5).abs() < 1e-12);
        }
        assert!((rep.value - 2.5).abs() < 1e-12);
    }

    #[test]
    fn sine_squared_mean() {
        let step = 0.01;
        let n = (400.0 / step) as usize;
        let samples: Vec<C> = (0..n)
            .map(|i| {
                let x = -200.0 + (i as f64 + 0.5) * step;
                c((2.0 * std::f64::consts::PI * x).sin())
            })
            .collect();
        let m = M::from_density(DensitySegment::new(-200.0, step, samples).unwrap());
        let fam = VanHoveFamily::linear(10.0);
        let rep = besicovitch_seminorm(&m, 2.0, &fam, 20).unwrap();
        assert!((rep.value - 1.0 / 2.0f64.sqrt()).abs() < 0.01, "{}", rep.value);
    }

    #[test]
    fn compact_support_decays() {
        let m = M::from_density(DensitySegment::new(0.0, 0.1, vec![c(1.0); 10]).unwrap());
        let fam = VanHoveFamily::linear(5.0);
        let rep = besicovitch_seminorm(&m, 1.0, &fam, 40).unwrap();
        // (1/|A_n|) * mass 1 -> value ~ 1/|A_40-ish|
        assert!(rep.value <= 1.0 / (2.0 * 5.0 * 30.0) + 1e-12);
    }

    #[test]
    fn seminorm_rejects_atoms() {
        let m = M::dirac(0.0, c(1.0));
        let fam = VanHoveFamily::linear(5.0);
        assert!(besicovitch_seminorm(&m, 1.0, &fam, 4).is_err());
    }

    #[test]
    fn k_norm_basics() {
        let z = integer_comb(-50, 50);
        let w = Window::new(-20.0, 20.0).unwrap();
        assert_eq!(k_norm_distance(&z, &z, 1.0, &w).unwrap(), 0.0);
        let shifted = z.translate(0.5);
        let d = k_norm_distance(&z, &shifted, 1.0, &w).unwrap();
        assert!((d - 2.0).abs() < 1e-12, "{d}");
    }

    #[test]
    fn k_norm_symmetry_and_triangle() {
        let a = M::from_atoms(vec![Atom::new(0.25, c(1.0)), Atom::new(3.5, C::new(0.0, 2.0))]);
        let b = M::from_atoms(vec![Atom::new(1.0, c(-1.0))]);
        let cm = M::from_atoms(vec![Atom::new(2.0, C::new(0.5, 0.5))]);
        let w = Window::new(-5.0, 5.0).unwrap();
        let dab = k_norm_distance(&a, &b, 1.0, &w).unwrap();
        let dba = k_norm_distance(&b, &a, 1.0, &w).unwrap();
        assert!((dab - dba).abs() < 1e-12);
        let dac = k_norm_distance(&a, &cm, 1.0, &w).unwrap();
        let dcb = k_norm_distance(&cm, &b, 1.0, &w).unwrap();
        assert!(dab <= dac + dcb + 1e-12);
    }

    #[test]
    fn lattice_scan_finds_integer_periods() {
        let z = integer_comb(-100, 100);
        let fam = VanHoveFamily::linear(10.0);
        let scan = almost_period_scan(
            &z,
            0.1,
            &NormKind::KNorm { k_len: 1.0 },
            &Window::new(-10.0, 10.0).unwrap(),
            0.5,
            &fam,
        )
        .unwrap();
        for j in -10..=10 {
            assert!(
                scan.periods.iter().any(|p| (p - j as f64).abs() < 1e-9),
                "missing period {j}"
            );
        }
        assert!((scan.max_gap - 1.0).abs() < 1e-9, "{}", scan.max_gap);
    }

    #[test]
    fn smoothed_distance_zero_for_exact_period() {
        let z = integer_comb(-200, 200);
        let fam = VanHoveFamily::linear(10.0);
        let d = smoothed_besicovitch_distance(&z, &z.translate(1.0), 0.25, 1.0, &fam, 8).unwrap();
        // only boundary cells differ
        assert!(d < 0.02, "{d}");
    }

    #[test]
    fn incommensurate_combs_are_far() {
        let alpha = std::f64::consts::SQRT_2;
        let z = integer_comb(-400, 400);
        let az = M::from_atoms(
            (-300..300)
                .map(|n| Atom::new(alpha * n as f64, c(1.0)))
                .collect(),
        );
        let fam = VanHoveFamily::linear(20.0);
        let d = smoothed_besicovitch_distance(&z, &az, 0.25, 1.0, &fam, 16).unwrap();
        assert!(d >= 0.5, "{d}");
    }
}
