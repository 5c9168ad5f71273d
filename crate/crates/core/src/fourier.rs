//! Fourier-Bohr coefficients, the character factorization identity, the
//! consistent phase property, and point-part diffraction amplitudes.

use crate::error::{Error, Result};
use crate::measure::{DensitySegment, Measure, Window};
use crate::scalar::{Cplx, Scalar};
use crate::vanhove::VanHoveFamily;

/// The character x -> e^{2 pi i k x}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Character<F> {
    pub frequency: F,
}

impl<F: Scalar> Character<F> {
    pub fn new(frequency: F) -> Result<Self> {
        if !frequency.is_finite() {
            return Err(Error::NonFinite("character frequency".into()));
        }
        Ok(Self { frequency })
    }

    pub fn eval(&self, x: F) -> Cplx<F> {
        let phase = F::lit(2.0) * F::PI() * self.frequency * x;
        Cplx::new(phase.cos(), phase.sin())
    }
}

/// Finite linear combination of characters with pairwise distinct frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial<F> {
    terms: Vec<(F, Cplx<F>)>,
}

impl<F: Scalar> TrigPolynomial<F> {
    pub fn new(terms: Vec<(F, Cplx<F>)>) -> Result<Self> {
        for (i, (ki, _)) in terms.iter().enumerate() {
            if !ki.is_finite() {
                return Err(Error::NonFinite("trig polynomial frequency".into()));
            }
            for (kj, _) in &terms[..i] {
                if (*ki - *kj).abs() <= F::lit(1e-12) {
                    return Err(Error::BadParam(format!(
                        "trig polynomial frequencies {ki} and {kj} coincide"
                    )));
                }
            }
        }
        Ok(Self { terms })
    }

    pub fn constant(c: Cplx<F>) -> Self {
        Self {
            terms: vec![(F::zero(), c)],
        }
    }

    pub fn terms(&self) -> &[(F, Cplx<F>)] {
        &self.terms
    }

    pub fn eval(&self, x: F) -> Cplx<F> {
        self.terms.iter().fold(Cplx::new(F::zero(), F::zero()), |acc, (k, c)| {
            acc + c * Character { frequency: *k }.eval(x)
        })
    }
}

/// Integral of e^{-2 pi i k s} over the cell [a, b), exact and stable:
/// (b-a) e^{-2 pi i k m} sinc(pi k (b-a)) with m the cell midpoint.
fn cell_character_integral<F: Scalar>(k: F, a: F, b: F) -> Cplx<F> {
    let len = b - a;
    let mid = (a + b) * F::lit(0.5);
    let phase = F::lit(-2.0) * F::PI() * k * mid;
    let x = F::PI() * k * len;
    let sinc = if x.abs() < F::lit(1e-8) {
        F::one() - x * x / F::lit(6.0)
    } else {
        x.sin() / x
    };
    Cplx::new(phase.cos(), phase.sin()) * Cplx::new(len * sinc, F::zero())
}

fn segment_character_sum<F: Scalar>(s: &DensitySegment<F>, k: F, a_win: &Window<F>, t: F) -> Cplx<F> {
    let lo = a_win.lo.max(s.origin);
    let hi = a_win.hi.min(s.end());
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
        acc = acc + s.samples[i] * cell_character_integral(k, a - t, b - t);
    }
    acc
}

/// Finite-volume Fourier-Bohr coefficient
/// `(1/|A|) int_A conj(chi_k(s)) d mu(s)`, with closed-form cell integrals
/// for the density part.
pub fn fb_coefficient<F: Scalar>(mu: &Measure<F>, k: F, a: &Window<F>) -> Cplx<F> {
    fb_coefficient_shifted(mu, k, a, F::zero())
}

/// Same averaged pairing against `conj(chi_k(s - t))`; used by the character
/// lemma residual which needs an independent left-hand-side evaluation.
pub fn fb_coefficient_shifted<F: Scalar>(mu: &Measure<F>, k: F, a: &Window<F>, t: F) -> Cplx<F> {
    let mut acc = Cplx::new(F::zero(), F::zero());
    for at in mu.atoms_in(a.lo, a.hi) {
        let phase = F::lit(-2.0) * F::PI() * k * (at.position - t);
        acc = acc + at.weight * Cplx::new(phase.cos(), phase.sin());
    }
    for s in mu.density() {
        acc = acc + segment_character_sum(s, k, a, t);
    }
    acc / Cplx::new(a.len(), F::zero())
}

/// Convergence-controlled Fourier-Bohr coefficient along a van Hove family.
/// On non-convergence the last stage value is still returned with
/// `converged = false`.
pub fn fb_limit<F: Scalar>(
    mu: &Measure<F>,
    k: F,
    family: &VanHoveFamily,
    tol: F,
    n_max: u32,
) -> Result<(Cplx<F>, crate::eberlein::ConvergenceReport)> {
    if tol <= F::zero() {
        return Err(Error::BadParam(format!("tol {tol} must be > 0")));
    }
    if n_max < 2 {
        return Err(Error::BadParam("n_max must be >= 2".into()));
    }
    let mut stages = Vec::new();
    let mut prev: Option<Cplx<F>> = None;
    let mut value = Cplx::new(F::zero(), F::zero());
    let mut converged = false;
    let mut final_n = n_max;
    for n in 1..=n_max {
        let a: Window<F> = family.interval(n)?;
        value = fb_coefficient(mu, k, &a);
        let dist = prev.map(|p| (value - p).norm());
        stages.push((n, a.len().as_f64(), dist.map(|d| d.as_f64())));
        if let Some(d) = dist {
            if d < tol {
                converged = true;
                final_n = n;
                break;
            }
        }
        prev = Some(value);
    }
    Ok((
        value,
        crate::eberlein::ConvergenceReport {
            stages,
            converged,
            final_n,
            metric: format!("|a_n - a_(n-1)| at frequency {k}"),
        },
    ))
}

/// Max over `t_grid` of
/// `|(1/|A|) int_A conj(chi(s - t)) d mu(s) - chi(t) a_chi(mu)|`.
///
/// The identity is exact at every finite volume, so the residual only sees
/// floating-point rounding.
pub fn character_lemma_residual<F: Scalar>(
    mu: &Measure<F>,
    k: F,
    a: &Window<F>,
    t_grid: &[F],
) -> F {
    let coeff = fb_coefficient(mu, k, a);
    let chi = Character { frequency: k };
    t_grid.iter().fold(F::zero(), |best, &t| {
        let lhs = fb_coefficient_shifted(mu, k, a, t);
        best.max((lhs - chi.eval(t) * coeff).norm())
    })
}

/// Per-frequency defect of the consistent phase property
/// `a_chi(<mu, nu>) = a_chi(mu) conj(a_chi(nu))`.
pub fn cpp_check<F: Scalar>(
    mu: &Measure<F>,
    nu: &Measure<F>,
    gamma: &Measure<F>,
    freqs: &[F],
    family: &VanHoveFamily,
    tol: F,
    n_max: u32,
) -> Result<Vec<(F, F)>> {
    // gamma must be stored over the averaging ladder used for its own
    // Fourier-Bohr coefficients
    let a_last: Window<F> = family.interval(n_max)?;
    if let Some(s) = gamma.support() {
        let slack = F::one().max(a_last.len() * F::lit(0.01));
        if s.lo > a_last.lo + slack || s.hi < a_last.hi - slack {
            return Err(Error::SupportShortfall(format!(
                "gamma stored on [{}, {}) does not cover the averaging ladder [{}, {})",
                s.lo, s.hi, a_last.lo, a_last.hi
            )));
        }
    }
    let mut out = Vec::with_capacity(freqs.len());
    for &k in freqs {
        let (ag, _) = fb_limit(gamma, k, family, tol, n_max)?;
        let (am, _) = fb_limit(mu, k, family, tol, n_max)?;
        let (an, _) = fb_limit(nu, k, family, tol, n_max)?;
        out.push((k, (ag - am * an.conj()).norm()));
    }
    Ok(out)
}

/// One extracted diffraction line.
#[derive(Debug, Clone, Copy)]
pub struct DiffractionLine<F> {
    pub frequency: F,
    /// point-part amplitude (Fourier-Bohr coefficient of gamma)
    pub amplitude: Cplx<F>,
    /// last inter-stage distance of the averaging loop
    pub defect: F,
    pub converged: bool,
}

/// Fourier-Bohr amplitudes of `gamma` on a caller-supplied candidate set;
/// entries below `tol` in magnitude are dropped.
pub fn diffract_point_part<F: Scalar>(
    gamma: &Measure<F>,
    candidates: &[F],
    family: &VanHoveFamily,
    tol: F,
    n_max: u32,
) -> Result<Vec<DiffractionLine<F>>> {
    let mut lines = Vec::new();
    for &k in candidates {
        let (amp, rep) = fb_limit(gamma, k, family, tol, n_max)?;
        if amp.norm() >= tol {
            lines.push(DiffractionLine {
                frequency: k,
                amplitude: amp,
                defect: rep.last_distance().map(F::lit).unwrap_or(F::zero()),
                converged: rep.converged,
            });
        }
    }
    Ok(lines)
}

/// Parse the frequency-set mini-language:
/// `"int:-5..5"`, `"alpha:1.4142135:-5..5"` (multiples of 1/alpha),
/// `"union(a, b, ...)"`. Duplicates within 1e-12 are removed.
pub fn parse_freq_set<F: Scalar>(spec: &str) -> Result<Vec<F>> {
    let mut out: Vec<F> = Vec::new();
    collect_freqs(spec.trim(), &mut out)?;
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup_by(|a, b| (*a - *b).abs() <= F::lit(1e-12));
    Ok(out)
}

fn collect_freqs<F: Scalar>(spec: &str, out: &mut Vec<F>) -> Result<()> {
    let bad = || Error::Parse(format!("bad frequency set '{spec}'"));
    let spec = spec.trim();
    if let Some(inner) = spec.strip_prefix("union(").and_then(|s| s.strip_suffix(')')) {
        let mut depth = 0usize;
        let mut start = 0usize;
        for (i, ch) in inner.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth = depth.saturating_sub(1),
                ',' if depth == 0 => {
                    collect_freqs(&inner[start..i], out)?;
                    start = i + 1;
                }
                _ => {}
            }
        }
        collect_freqs(&inner[start..], out)?;
        return Ok(());
    }
    let parse_range = |s: &str| -> Result<(i64, i64)> {
        let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
        Ok((
            lo.parse::<i64>().map_err(|_| bad())?,
            hi.parse::<i64>().map_err(|_| bad())?,
        ))
    };
    if let Some(rest) = spec.strip_prefix("int:") {
        let (lo, hi) = parse_range(rest)?;
        for n in lo..=hi {
            out.push(F::lit(n as f64));
        }
        return Ok(());
    }
    if let Some(rest) = spec.strip_prefix("alpha:") {
        let (alpha, range) = rest.split_once(':').ok_or_else(bad)?;
        let alpha: f64 = alpha.parse().map_err(|_| bad())?;
        if alpha == 0.0 {
            return Err(Error::BadParam("alpha must be nonzero".into()));
        }
        let (lo, hi) = parse_range(range)?;
        for n in lo..=hi {
            out.push(F::lit(n as f64 / alpha));
        }
        return Ok(());
    }
    // bare number
    let v: f64 = spec.parse().map_err(|_| bad())?;
    out.push(F::lit(v));
    Ok(())
}
