//! Constructors for the measures the engine is exercised on: lattices,
//! incommensurate superpositions, site-keyed Bernoulli combs, the Fibonacci
//! chain, the shrinking-bump density and trigonometric densities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::TrigPolynomial;
use crate::measure::{Atom, DensitySegment, Measure, Window};
use crate::probe::tent_mass;
use crate::scalar::{Cplx, Scalar};

/// splitmix64 mixing step.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Deterministic uniform draw in [0, 1) keyed by (seed, site). Independent of
/// evaluation order, so generation commutes with restriction.
pub fn site_uniform(seed: u64, site: i64) -> f64 {
    let z = splitmix64(seed ^ splitmix64(site as u64));
    (z >> 11) as f64 / (1u64 << 53) as f64
}

/// Integer indices m with `spacing * m` inside the window.
fn lattice_sites<F: Scalar>(spacing: F, window: &Window<F>) -> std::ops::RangeInclusive<i64> {
    let lo = (window.lo / spacing).as_f64().floor() as i64 - 1;
    let hi = (window.hi / spacing).as_f64().ceil() as i64 + 1;
    lo..=hi
}

/// Dirac comb on `spacing * Z` with a common weight, restricted to `window`.
pub fn lattice<F: Scalar>(spacing: F, weight: Cplx<F>, window: &Window<F>) -> Result<Measure<F>> {
    if spacing <= F::zero() {
        return Err(Error::BadParam(format!("spacing {spacing} must be > 0")));
    }
    let atoms = lattice_sites(spacing, window)
        .map(|m| Atom::new(spacing * F::lit(m as f64), weight))
        .filter(|a| window.contains(a.position))
        .collect();
    Ok(Measure::from_atoms(atoms))
}

/// Reject alpha values that are within 1e-9 of a rational with denominator
/// <= 100; atom coalescing must keep the two lattices distinct.
pub fn check_irrational_intent(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::BadParam(format!("alpha {alpha} must be positive")));
    }
    for q in 1..=100u32 {
        let scaled = alpha * q as f64;
        if (scaled - scaled.round()).abs() / q as f64 <= 1e-9 {
            return Err(Error::BadParam(format!(
                "alpha {alpha} is too close to {}/{q}",
                scaled.round()
            )));
        }
    }
    Ok(())
}

/// delta_Z + delta_(alpha Z) on the window.
pub fn incommensurate<F: Scalar>(alpha: F, window: &Window<F>) -> Result<Measure<F>> {
    check_irrational_intent(alpha.as_f64())?;
    let one = Cplx::new(F::one(), F::zero());
    let z = lattice(F::one(), one, window)?;
    let az = lattice(alpha, one, window)?;
    Ok(z.add_scaled(&az, one, one))
}

/// Bernoulli comb: an atom at every integer site of the window with weight
/// `v1` (probability p) or `v0` (probability 1-p), drawn by the site-keyed
/// generator. Zero weights are dropped.
pub fn bernoulli_comb<F: Scalar>(
    p: F,
    v1: F,
    v0: F,
    seed: u64,
    window: &Window<F>,
) -> Result<Measure<F>> {
    if !(p > F::zero() && p < F::one()) {
        return Err(Error::BadParam(format!("p = {p} must lie in (0, 1)")));
    }
    let cap = F::lit((1u64 << 40) as f64);
    if window.lo.abs() > cap || window.hi.abs() > cap {
        return Err(Error::BadParam("window endpoints exceed +-2^40".into()));
    }
    let pf = p.as_f64();
    let atoms = lattice_sites(F::one(), window)
        .filter(|m| window.contains(F::lit(*m as f64)))
        .map(|m| {
            let w = if site_uniform(seed, m) < pf { v1 } else { v0 };
            Atom::new(F::lit(m as f64), Cplx::new(w, F::zero()))
        })
        .collect();
    Ok(Measure::from_atoms(atoms))
}

/// Golden ratio (long-tile length of the Fibonacci chain).
pub fn golden_ratio<F: Scalar>() -> F {
    (F::one() + F::lit(5.0).sqrt()) / F::lit(2.0)
}

/// Left endpoints of a- and b-tiles of the geometric Fibonacci chain grown
/// from an a-tile at the origin (a -> ab, b -> a; lengths tau and 1).
///
/// The patch grows rightward from 0, so the window must satisfy `lo >= 0`.
pub fn fibonacci_points<F: Scalar>(window: &Window<F>) -> Result<(Measure<F>, Measure<F>)> {
    if window.lo < F::zero() {
        return Err(Error::BadParam(
            "fibonacci patch grows from 0; window.lo must be >= 0".into(),
        ));
    }
    let tau = golden_ratio::<F>().as_f64();
    let cap = 64usize;
    let mut word: Vec<bool> = vec![true]; // true = a
    let mut len = tau;
    let mut its = 0usize;
    while len < window.hi.as_f64() {
        if its >= cap {
            return Err(Error::IterationCap(cap));
        }
        let mut next = Vec::with_capacity(word.len() * 2);
        for &t in &word {
            if t {
                next.push(true);
                next.push(false);
            } else {
                next.push(true);
            }
        }
        word = next;
        len = word.iter().map(|&t| if t { tau } else { 1.0 }).sum();
        its += 1;
    }
    let one = Cplx::new(F::one(), F::zero());
    let mut a_atoms = Vec::new();
    let mut b_atoms = Vec::new();
    let mut x = 0.0f64;
    for &t in &word {
        let pos = F::lit(x);
        if window.contains(pos) {
            if t {
                a_atoms.push(Atom::new(pos, one));
            } else {
                b_atoms.push(Atom::new(pos, one));
            }
        }
        x += if t { tau } else { 1.0 };
        if x >= window.hi.as_f64() + tau {
            break;
        }
    }
    Ok((Measure::from_atoms(a_atoms), Measure::from_atoms(b_atoms)))
}

/// Density `f = sum_n delta_n * f_|n|` with `f_m` the unit-mass triangular
/// bump supported on `[-1/max(m,1), 1/max(m,1)]`; each bump is sampled on its
/// own grid of 20 cells (step 1/(10 max(m,1))), overlapping bumps merge onto
/// the finer grid.
pub fn shrinking_bump_density<F: Scalar>(window: &Window<F>) -> Result<Measure<F>> {
    let mut segments = Vec::new();
    let n_lo = window.lo.as_f64().floor() as i64 - 1;
    let n_hi = window.hi.as_f64().ceil() as i64 + 1;
    for n in n_lo..=n_hi {
        let m = (n.unsigned_abs().max(1)) as f64;
        let half = F::lit(1.0 / m);
        let center = F::lit(n as f64);
        if center + half <= window.lo || center - half >= window.hi {
            continue;
        }
        let cells = 20usize;
        let step = half * F::lit(2.0) / F::lit(cells as f64);
        let origin = center - half;
        let samples = (0..cells)
            .map(|i| {
                let a = origin + step * F::lit(i as f64);
                let b = a + step;
                // cell value = exact triangle mass over the cell / step
                Cplx::new(tent_mass(center, half, a, b) / step, F::zero())
            })
            .collect();
        let seg = DensitySegment::new(origin, step, samples)?;
        segments.extend(seg_clip(seg, window));
    }
    Ok(Measure::from_parts(Vec::new(), segments))
}

fn seg_clip<F: Scalar>(seg: DensitySegment<F>, window: &Window<F>) -> Vec<DensitySegment<F>> {
    // restrict via a throwaway measure to reuse the exact cell-splitting path
    Measure::from_density(seg).restrict(window).density().to_vec()
}

/// Trigonometric polynomial sampled as a piecewise-constant density at cell
/// midpoints.
pub fn trig_density<F: Scalar>(
    poly: &TrigPolynomial<F>,
    window: &Window<F>,
    step: F,
) -> Result<Measure<F>> {
    if step <= F::zero() {
        return Err(Error::BadParam(format!("step {step} must be > 0")));
    }
    let n = (window.len() / step).ceil().as_f64() as usize;
    let samples = (0..n.max(1))
        .map(|i| {
            let mid = window.lo + step * (F::lit(i as f64) + F::lit(0.5));
            poly.eval(mid)
        })
        .collect();
    let seg = DensitySegment::new(window.lo, step, samples)?;
    Ok(Measure::from_density(seg).restrict(window))
}

/// Serializable generator configuration; round-trips through JSON for the
/// CLI `gen` subcommand.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorKind {
    Lattice {
        spacing: f64,
        weight_re: f64,
        #[serde(default)]
        weight_im: f64,
    },
    Incommensurate {
        alpha: f64,
    },
    Bernoulli {
        p: f64,
        v1: f64,
        v0: f64,
        seed: u64,
    },
    Fibonacci {
        /// "a", "b" or "both"
        tile: String,
    },
    ShrinkingBump,
    TrigDensity {
        step: f64,
        /// (frequency, re, im) per term
        terms: Vec<(f64, f64, f64)>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub kind: GeneratorKind,
    pub window: (f64, f64),
}

impl GeneratorSpec {
    pub fn generate<F: Scalar>(&self) -> Result<Measure<F>> {
        let window = Window::new(F::lit(self.window.0), F::lit(self.window.1))?;
        match &self.kind {
            GeneratorKind::Lattice {
                spacing,
                weight_re,
                weight_im,
            } => lattice(
                F::lit(*spacing),
                Cplx::new(F::lit(*weight_re), F::lit(*weight_im)),
                &window,
            ),
            GeneratorKind::Incommensurate { alpha } => incommensurate(F::lit(*alpha), &window),
            GeneratorKind::Bernoulli { p, v1, v0, seed } => {
                bernoulli_comb(F::lit(*p), F::lit(*v1), F::lit(*v0), *seed, &window)
            }
            GeneratorKind::Fibonacci { tile } => {
                let (a, b) = fibonacci_points::<F>(&window)?;
                let one = Cplx::new(F::one(), F::zero());
                match tile.as_str() {
                    "a" => Ok(a),
                    "b" => Ok(b),
                    "both" => Ok(a.add_scaled(&b, one, one)),
                    other => Err(Error::BadParam(format!(
                        "fibonacci tile must be a|b|both, got '{other}'"
                    ))),
                }
            }
            GeneratorKind::ShrinkingBump => shrinking_bump_density(&window),
            GeneratorKind::TrigDensity { step, terms } => {
                let poly = TrigPolynomial::new(
                    terms
                        .iter()
                        .map(|(k, re, im)| (F::lit(*k), Cplx::new(F::lit(*re), F::lit(*im))))
                        .collect(),
                )?;
                trig_density(&poly, &window, F::lit(*step))
            }
        }
    }
}
