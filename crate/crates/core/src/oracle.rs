//! Naive reference implementations used to validate the engine. Deliberately
//! unoptimized and sharing no code with the engine's merge/binning paths.

use crate::error::{Error, Result};
use crate::measure::{Atom, Measure, Window};
use crate::scalar::{Cplx, Scalar};

const ATOM_CAP: usize = 10_000;

/// Literal double loop over all atom pairs (plus midpoint Riemann sums for
/// density parts): `(1/|A|) sum over s in A, r in A of w(s) conj(v(r))` at
/// position `s - r`, kept when inside `out`.
pub fn brute_twisted<F: Scalar>(
    mu: &Measure<F>,
    nu: &Measure<F>,
    a: &Window<F>,
    out: &Window<F>,
) -> Result<Measure<F>> {
    if mu.atoms().len() > ATOM_CAP || nu.atoms().len() > ATOM_CAP {
        return Err(Error::OracleCap(
            mu.atoms().len().max(nu.atoms().len()),
            ATOM_CAP,
        ));
    }
    // flatten each side to point masses: atoms as-is, density cells as
    // midpoint point masses at the stored step
    let flatten = |m: &Measure<F>| -> Vec<(F, Cplx<F>)> {
        let mut pts: Vec<(F, Cplx<F>)> = Vec::new();
        for at in m.atoms() {
            pts.push((at.position, at.weight));
        }
        for s in m.density() {
            for i in 0..s.samples.len() {
                let lo = s.origin + s.step * F::from_usize(i).unwrap();
                let mid = lo + s.step / F::lit(2.0);
                pts.push((mid, s.samples[i] * Cplx::new(s.step, F::zero())));
            }
        }
        pts
    };
    let left = flatten(mu);
    let right = flatten(nu);
    let inv_vol = F::one() / a.len();

    let mut contributions: Vec<(F, Cplx<F>)> = Vec::new();
    for &(s, w) in &left {
        if !(a.lo <= s && s < a.hi) {
            continue;
        }
        for &(r, v) in &right {
            if !(a.lo <= r && r < a.hi) {
                continue;
            }
            let pos = s - r;
            if out.lo <= pos && pos < out.hi {
                contributions.push((pos, w * v.conj() * Cplx::new(inv_vol, F::zero())));
            }
        }
    }

    // naive merge: sort, then sweep with a local tolerance
    contributions.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut atoms: Vec<Atom<F>> = Vec::new();
    for (pos, w) in contributions {
        let tol = F::lit(1e-9) * F::one().max(pos.abs());
        match atoms.last_mut() {
            Some(last) if pos - last.position <= tol => {
                last.weight = last.weight + w;
            }
            _ => atoms.push(Atom::new(pos, w)),
        }
    }
    atoms.retain(|at| at.weight != Cplx::new(F::zero(), F::zero()));
    Ok(Measure::from_atoms(atoms))
}

/// Direct Fourier-Bohr sum in stored order, midpoint Riemann sums for the
/// density part, no compensated summation.
pub fn brute_fb<F: Scalar>(mu: &Measure<F>, k: F, a: &Window<F>) -> Cplx<F> {
    let two_pi = F::lit(2.0) * F::PI();
    let mut acc = Cplx::new(F::zero(), F::zero());
    for at in mu.atoms() {
        if a.lo <= at.position && at.position < a.hi {
            let ph = -two_pi * k * at.position;
            acc = acc + at.weight * Cplx::new(ph.cos(), ph.sin());
        }
    }
    for s in mu.density() {
        for i in 0..s.samples.len() {
            let lo = s.origin + s.step * F::from_usize(i).unwrap();
            let hi = lo + s.step;
            let lo_c = lo.max(a.lo);
            let hi_c = hi.min(a.hi);
            if hi_c <= lo_c {
                continue;
            }
            let mid = (lo_c + hi_c) / F::lit(2.0);
            let ph = -two_pi * k * mid;
            acc = acc
                + s.samples[i]
                    * Cplx::new(ph.cos(), ph.sin())
                    * Cplx::new(hi_c - lo_c, F::zero());
        }
    }
    acc / Cplx::new(a.len(), F::zero())
}
