//! Translation-bounded measures on the real line.
//!
//! A [`Measure`] is a sorted list of weighted Dirac atoms plus an optional
//! absolutely continuous part stored as piecewise-constant density segments.
//! All operations are pure; every constructor goes through [`Measure::from_parts`]
//! which sorts, coalesces nearby atoms and merges overlapping density segments.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{coalesce_tol, Cplx, Scalar};

/// Half-open interval `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window<F> {
    pub lo: F,
    pub hi: F,
}

impl<F: Scalar> Window<F> {
    pub fn new(lo: F, hi: F) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::NonFinite(format!("window [{lo}, {hi})")));
        }
        if lo >= hi {
            return Err(Error::InvalidWindow {
                lo: lo.as_f64(),
                hi: hi.as_f64(),
            });
        }
        Ok(Self { lo, hi })
    }

    pub fn len(&self) -> F {
        self.hi - self.lo
    }

    pub fn contains(&self, x: F) -> bool {
        self.lo <= x && x < self.hi
    }

    /// Reflection through the origin; `[lo, hi)` maps to `[-hi, -lo)`.
    pub fn neg(&self) -> Self {
        Self {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    pub fn shift(&self, t: F) -> Self {
        Self {
            lo: self.lo + t,
            hi: self.hi + t,
        }
    }

    pub fn expand(&self, r: F) -> Self {
        Self {
            lo: self.lo - r,
            hi: self.hi + r,
        }
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo < hi {
            Some(Self { lo, hi })
        } else {
            None
        }
    }
}

/// A weighted Dirac atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom<F> {
    pub position: F,
    pub weight: Cplx<F>,
}

impl<F: Scalar> Atom<F> {
    pub fn new(position: F, weight: Cplx<F>) -> Self {
        Self { position, weight }
    }
}

/// Uniform-step piecewise-constant density over `[origin, origin + step*n)`.
///
/// `samples[i]` is the density *value* on cell `[origin + i*step, origin + (i+1)*step)`;
/// the cell mass is `samples[i] * step`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensitySegment<F> {
    pub origin: F,
    pub step: F,
    pub samples: Vec<Cplx<F>>,
}

impl<F: Scalar> DensitySegment<F> {
    pub fn new(origin: F, step: F, samples: Vec<Cplx<F>>) -> Result<Self> {
        if !(origin.is_finite() && step.is_finite()) || step <= F::zero() {
            return Err(Error::BadParam(format!(
                "density segment origin {origin}, step {step}"
            )));
        }
        if samples.iter().any(|s| !(s.re.is_finite() && s.im.is_finite())) {
            return Err(Error::NonFinite("density sample".into()));
        }
        Ok(Self {
            origin,
            step,
            samples,
        })
    }

    pub fn end(&self) -> F {
        self.origin + self.step * F::from_usize(self.samples.len()).unwrap()
    }

    pub fn total_mass(&self) -> Cplx<F> {
        self.samples.iter().fold(Cplx::new(F::zero(), F::zero()), |a, s| a + s)
            * Cplx::new(self.step, F::zero())
    }

    fn cell_lo(&self, i: usize) -> F {
        self.origin + self.step * F::from_usize(i).unwrap()
    }

    /// Integral of the density over `[a, b)` (complex mass).
    pub fn mass_between(&self, a: F, b: F) -> Cplx<F> {
        self.fold_between(a, b, Cplx::new(F::zero(), F::zero()), |acc, v, w| {
            acc + v * Cplx::new(w, F::zero())
        })
    }

    /// Integral of |density| over `[a, b)`.
    pub fn abs_mass_between(&self, a: F, b: F) -> F {
        self.fold_between(a, b, F::zero(), |acc, v, w| acc + v.norm() * w)
    }

    fn fold_between<T>(&self, a: F, b: F, init: T, f: impl Fn(T, Cplx<F>, F) -> T) -> T {
        let a = a.max(self.origin);
        let b = b.min(self.end());
        if b <= a {
            return init;
        }
        let i0 = ((a - self.origin) / self.step).floor().as_f64().max(0.0) as usize;
        let mut acc = init;
        for i in i0..self.samples.len() {
            let lo = self.cell_lo(i);
            if lo >= b {
                break;
            }
            let hi = lo + self.step;
            let w = b.min(hi) - a.max(lo);
            if w > F::zero() {
                acc = f(acc, self.samples[i], w);
            }
        }
        acc
    }

    fn scaled(&self, c: Cplx<F>) -> Self {
        Self {
            origin: self.origin,
            step: self.step,
            samples: self.samples.iter().map(|s| s * c).collect(),
        }
    }

    fn translated(&self, t: F) -> Self {
        Self {
            origin: self.origin + t,
            step: self.step,
            samples: self.samples.clone(),
        }
    }

    /// Reflect through the origin; conjugate when `conj` is set.
    fn reflected(&self, conj: bool) -> Self {
        let samples = self
            .samples
            .iter()
            .rev()
            .map(|s| if conj { s.conj() } else { *s })
            .collect();
        Self {
            origin: -self.end(),
            step: self.step,
            samples,
        }
    }

    /// Clip to a window. Partial head/tail cells become their own one-cell
    /// segments so the step stays uniform within each piece.
    fn clipped(&self, win: &Window<F>) -> Vec<Self> {
        let a = win.lo.max(self.origin);
        let b = win.hi.min(self.end());
        // boundary positions carry absolute rounding error proportional to
        // their magnitude; slivers below that scale are fp artifacts, and
        // keeping them would poison the merge grid with a near-zero step
        let eps = self.step * F::lit(1e-12) + a.abs().max(b.abs()) * F::lit(1e-13);
        if b - a <= eps {
            return Vec::new();
        }
        let n = self.samples.len();
        let i0 = (((a - self.origin) / self.step).floor().as_f64().max(0.0) as usize).min(n - 1);
        let i1 = {
            let raw = ((b - self.origin) / self.step).ceil().as_f64() as usize;
            raw.clamp(i0 + 1, n)
        };
        let mut pieces: Vec<Self> = Vec::new();
        let mut uniform: Vec<Cplx<F>> = Vec::new();
        let mut uniform_origin = F::zero();
        for i in i0..i1 {
            let lo = self.cell_lo(i).max(a);
            let hi = (self.cell_lo(i) + self.step).min(b);
            let w = hi - lo;
            if w <= eps {
                continue;
            }
            if (w - self.step).abs() <= eps {
                if uniform.is_empty() {
                    uniform_origin = self.cell_lo(i);
                }
                uniform.push(self.samples[i]);
            } else {
                if !uniform.is_empty() {
                    pieces.push(Self {
                        origin: uniform_origin,
                        step: self.step,
                        samples: std::mem::take(&mut uniform),
                    });
                }
                pieces.push(Self {
                    origin: lo,
                    step: w,
                    samples: vec![self.samples[i]],
                });
            }
        }
        if !uniform.is_empty() {
            pieces.push(Self {
                origin: uniform_origin,
                step: self.step,
                samples: uniform,
            });
        }
        pieces
    }

    /// Cell masses resampled to step `h` on the grid anchored at `self.origin`.
    fn masses_at_step(&self, h: F) -> Vec<Cplx<F>> {
        if (h - self.step).abs() <= self.step * F::lit(1e-12) {
            return self
                .samples
                .iter()
                .map(|s| s * Cplx::new(self.step, F::zero()))
                .collect();
        }
        let span = self.end() - self.origin;
        let n = (span / h).ceil().as_f64() as usize;
        let mut masses = vec![Cplx::new(F::zero(), F::zero()); n.max(1)];
        distribute_masses(self, self.origin, h, &mut masses);
        masses
    }
}

/// Spread the mass of every cell of `seg` onto a uniform grid starting at
/// `start` with step `h`, proportionally to cell overlap. Conserves mass.
fn distribute_masses<F: Scalar>(
    seg: &DensitySegment<F>,
    start: F,
    h: F,
    masses: &mut [Cplx<F>],
) {
    let n = masses.len();
    for (i, v) in seg.samples.iter().enumerate() {
        let a = seg.cell_lo(i);
        let b = a + seg.step;
        let j0 = (((a - start) / h).floor().as_f64().max(0.0) as usize).min(n.saturating_sub(1));
        for j in j0..n {
            let g_lo = start + h * F::from_usize(j).unwrap();
            if g_lo >= b {
                break;
            }
            let overlap = b.min(g_lo + h) - a.max(g_lo);
            if overlap > F::zero() {
                masses[j] = masses[j] + v * Cplx::new(overlap, F::zero());
            }
        }
    }
}

/// A translation-bounded measure: sorted atoms plus density segments.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure<F> {
    atoms: Vec<Atom<F>>,
    density: Vec<DensitySegment<F>>,
    k_bound: F,
}

impl<F: Scalar> Default for Measure<F> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<F: Scalar> Measure<F> {
    pub fn zero() -> Self {
        Self {
            atoms: Vec::new(),
            density: Vec::new(),
            k_bound: F::zero(),
        }
    }

    pub fn dirac(position: F, weight: Cplx<F>) -> Self {
        Self::from_atoms(vec![Atom::new(position, weight)])
    }

    pub fn from_atoms(atoms: Vec<Atom<F>>) -> Self {
        Self::from_parts(atoms, Vec::new())
    }

    pub fn from_density(segment: DensitySegment<F>) -> Self {
        Self::from_parts(Vec::new(), vec![segment])
    }

    /// Canonical constructor: sorts and coalesces atoms, merges overlapping
    /// density segments, recomputes the unit-interval norm estimate.
    pub fn from_parts(atoms: Vec<Atom<F>>, segments: Vec<DensitySegment<F>>) -> Self {
        let atoms = coalesce(atoms);
        let density = normalize_segments(segments);
        let mut m = Self {
            atoms,
            density,
            k_bound: F::zero(),
        };
        m.k_bound = m.sup_window_mass(F::one(), None);
        m
    }

    pub fn atoms(&self) -> &[Atom<F>] {
        &self.atoms
    }

    pub fn density(&self) -> &[DensitySegment<F>] {
        &self.density
    }

    /// Estimate of sup_t |mu|(t + [0,1)) over the stored support.
    pub fn k_bound(&self) -> F {
        self.k_bound
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty() && self.density.is_empty()
    }

    pub fn total_mass(&self) -> Cplx<F> {
        let a = self
            .atoms
            .iter()
            .fold(Cplx::new(F::zero(), F::zero()), |acc, at| acc + at.weight);
        self.density.iter().fold(a, |acc, s| acc + s.total_mass())
    }

    /// Smallest window containing all atoms and density cells, or `None` for
    /// the zero measure.
    pub fn support(&self) -> Option<Window<F>> {
        let mut lo = F::infinity();
        let mut hi = F::neg_infinity();
        if let Some(a) = self.atoms.first() {
            lo = lo.min(a.position);
        }
        if let Some(a) = self.atoms.last() {
            hi = hi.max(a.position);
        }
        for s in &self.density {
            lo = lo.min(s.origin);
            hi = hi.max(s.end());
        }
        if lo > hi {
            None
        } else {
            // atoms sit at points; pad the atom side so the window is nonempty
            Some(Window {
                lo,
                hi: if hi > lo { hi } else { hi + F::lit(1e-12) },
            })
        }
    }

    /// Atoms with position in `[lo, hi)` as a subslice.
    pub fn atoms_in(&self, lo: F, hi: F) -> &[Atom<F>] {
        let i0 = self.atoms.partition_point(|a| a.position < lo);
        let i1 = self.atoms.partition_point(|a| a.position < hi);
        &self.atoms[i0..i1]
    }

    /// Total variation |mu|([a, b)).
    pub fn total_variation(&self, a: F, b: F) -> F {
        let atoms: F = self.atoms_in(a, b).iter().map(|x| x.weight.norm()).sum();
        self.density
            .iter()
            .fold(atoms, |acc, s| acc + s.abs_mass_between(a, b))
    }

    /// sup over t (restricted to `search` if given) of |mu|([t, t+k_len)),
    /// evaluated at the event points where atoms or cells enter/leave the
    /// sliding window. Uses prefix sums so the sweep is O(events log events).
    pub fn sup_window_mass(&self, k_len: F, search: Option<Window<F>>) -> F {
        // prefix sums of |weight| over sorted atoms
        let mut atom_prefix: Vec<F> = Vec::with_capacity(self.atoms.len() + 1);
        atom_prefix.push(F::zero());
        for a in &self.atoms {
            let last = *atom_prefix.last().unwrap();
            atom_prefix.push(last + a.weight.norm());
        }
        // per-segment prefix sums of |value| * step
        let seg_prefix: Vec<Vec<F>> = self
            .density
            .iter()
            .map(|s| {
                let mut p = Vec::with_capacity(s.samples.len() + 1);
                p.push(F::zero());
                for v in &s.samples {
                    let last = *p.last().unwrap();
                    p.push(last + v.norm() * s.step);
                }
                p
            })
            .collect();
        // running totals over the (sorted, disjoint) segments so the
        // cumulative lookup below is a binary search, not a linear scan
        let mut seg_total: Vec<F> = Vec::with_capacity(self.density.len() + 1);
        seg_total.push(F::zero());
        for p in &seg_prefix {
            let last = *seg_total.last().unwrap();
            seg_total.push(last + *p.last().unwrap());
        }
        // |mu|((-inf, x)) for the density part, piecewise linear in x
        let density_cum = |x: F| -> F {
            let i = self.density.partition_point(|s| s.end() <= x);
            let mut acc = seg_total[i];
            if let Some(s) = self.density.get(i) {
                if x > s.origin {
                    let rel = (x - s.origin) / s.step;
                    let j = (rel.floor().as_f64() as usize).min(s.samples.len() - 1);
                    let frac = rel - F::from_usize(j).unwrap();
                    acc = acc + seg_prefix[i][j] + s.samples[j].norm() * s.step * frac;
                }
            }
            acc
        };
        let atom_cum = |x: F| -> F {
            let i = self.atoms.partition_point(|a| a.position < x);
            atom_prefix[i]
        };
        let tv = |t: F| -> F {
            atom_cum(t + k_len) - atom_cum(t) + density_cum(t + k_len) - density_cum(t)
        };

        let mut candidates: Vec<F> = Vec::new();
        let eps = k_len * F::lit(1e-9);
        {
            let mut push = |t: F| {
                if let Some(w) = &search {
                    if t < w.lo || t > w.hi {
                        return;
                    }
                }
                candidates.push(t);
            };
            for a in &self.atoms {
                push(a.position);
                push(a.position - k_len + eps);
            }
            for s in &self.density {
                for i in 0..=s.samples.len() {
                    let x = s.cell_lo(i);
                    push(x);
                    push(x - k_len);
                }
            }
            if let Some(w) = &search {
                push(w.lo);
                push(w.hi);
            }
        }
        let mut best = F::zero();
        for t in candidates {
            let v = tv(t);
            if v > best {
                best = v;
            }
        }
        best
    }

    /// Restriction to a half-open window; density cells crossing the boundary
    /// are split exactly.
    pub fn restrict(&self, window: &Window<F>) -> Self {
        let atoms = self
            .atoms_in(window.lo, window.hi)
            .iter()
            .copied()
            .collect();
        let segments = self
            .density
            .iter()
            .flat_map(|s| s.clipped(window))
            .collect();
        Self::from_parts(atoms, segments)
    }

    /// ~mu: positions negated, weights conjugated.
    pub fn reflect_tilde(&self) -> Self {
        self.reflected(true)
    }

    /// mu-dagger: positions negated, weights untouched.
    pub fn reflect_dagger(&self) -> Self {
        self.reflected(false)
    }

    fn reflected(&self, conj: bool) -> Self {
        let atoms = self
            .atoms
            .iter()
            .map(|a| {
                Atom::new(
                    -a.position,
                    if conj { a.weight.conj() } else { a.weight },
                )
            })
            .collect();
        let segments = self.density.iter().map(|s| s.reflected(conj)).collect();
        Self::from_parts(atoms, segments)
    }

    pub fn translate(&self, t: F) -> Self {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom::new(a.position + t, a.weight))
            .collect();
        let segments = self.density.iter().map(|s| s.translated(t)).collect();
        Self::from_parts(atoms, segments)
    }

    pub fn scale(&self, c: Cplx<F>) -> Self {
        if c == Cplx::new(F::zero(), F::zero()) {
            return Self::zero();
        }
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom::new(a.position, a.weight * c))
            .collect();
        let segments = self.density.iter().map(|s| s.scaled(c)).collect();
        Self::from_parts(atoms, segments)
    }

    /// a*mu + b*nu with atoms merged and overlapping densities resampled onto
    /// a common grid.
    pub fn add_scaled(&self, other: &Self, a: Cplx<F>, b: Cplx<F>) -> Self {
        let zero = Cplx::new(F::zero(), F::zero());
        let mut atoms = Vec::new();
        let mut segments = Vec::new();
        if a != zero {
            atoms.extend(self.atoms.iter().map(|x| Atom::new(x.position, x.weight * a)));
            segments.extend(self.density.iter().map(|s| s.scaled(a)));
        }
        if b != zero {
            atoms.extend(other.atoms.iter().map(|x| Atom::new(x.position, x.weight * b)));
            segments.extend(other.density.iter().map(|s| s.scaled(b)));
        }
        Self::from_parts(atoms, segments)
    }

    /// Convolution of two bounded-support measures, restricted to `out`.
    ///
    /// Atom pairs are enumerated exactly (sorted second factor pruned against
    /// the output window); atom-density products shift scaled density copies;
    /// density-density products use a mass-conserving discrete convolution at
    /// the finer step.
    pub fn convolve_finite(&self, other: &Self, out: &Window<F>) -> Result<Self> {
        Window::new(out.lo, out.hi)?;
        let mut atoms: Vec<Atom<F>> = Vec::new();
        let mut segments: Vec<DensitySegment<F>> = Vec::new();

        // point x point
        for a in &self.atoms {
            let lo = out.lo - a.position;
            let hi = out.hi - a.position;
            for b in other.atoms_in(lo, hi) {
                atoms.push(Atom::new(a.position + b.position, a.weight * b.weight));
            }
        }

        // point x density, both orders
        let shifted_out = |p: F| Window {
            lo: out.lo,
            hi: out.hi,
        }
        .shift(-p);
        for a in &self.atoms {
            for s in &other.density {
                let view = shifted_out(a.position);
                for piece in s.clipped(&view) {
                    segments.push(piece.scaled(a.weight).translated(a.position));
                }
            }
        }
        for b in &other.atoms {
            for s in &self.density {
                let view = shifted_out(b.position);
                for piece in s.clipped(&view) {
                    segments.push(piece.scaled(b.weight).translated(b.position));
                }
            }
        }

        // density x density
        for s1 in &self.density {
            for s2 in &other.density {
                let lo = s1.origin + s2.origin;
                let hi = s1.end() + s2.end();
                if hi <= out.lo || lo >= out.hi {
                    continue;
                }
                let h = s1.step.min(s2.step);
                let m1 = s1.masses_at_step(h);
                let m2 = s2.masses_at_step(h);
                let n = m1.len() + m2.len();
                let mut mass = vec![Cplx::new(F::zero(), F::zero()); n];
                let half = Cplx::new(F::lit(0.5), F::zero());
                // only output cells near `out` matter: clamp j per i
                let k_lo = ((out.lo - lo) / h).floor().as_f64() - 2.0;
                let k_hi = ((out.hi - lo) / h).ceil().as_f64() + 2.0;
                for (i, u) in m1.iter().enumerate() {
                    if u.norm_sqr() == F::zero() {
                        continue;
                    }
                    let j0 = ((k_lo - i as f64).max(0.0) as usize).min(m2.len());
                    let j1 = (((k_hi - i as f64).max(0.0)) as usize).min(m2.len());
                    for (j, v) in m2.iter().enumerate().take(j1).skip(j0) {
                        let m = u * v * half;
                        mass[i + j] = mass[i + j] + m;
                        mass[i + j + 1] = mass[i + j + 1] + m;
                    }
                }
                let values = mass
                    .into_iter()
                    .map(|m| m / Cplx::new(h, F::zero()))
                    .collect();
                let seg = DensitySegment {
                    origin: lo,
                    step: h,
                    samples: values,
                };
                segments.extend(seg.clipped(out));
            }
        }

        // final restriction of the atomic part (density already clipped)
        atoms.retain(|a| out.contains(a.position));
        Ok(Self::from_parts(atoms, segments))
    }
}

/// Sort and merge atoms whose positions agree within the coalescing tolerance.
/// Runs are merged at the |weight|-weighted mean position; exact-zero results
/// are dropped.
fn coalesce<F: Scalar>(mut atoms: Vec<Atom<F>>) -> Vec<Atom<F>> {
    for a in &atoms {
        assert!(
            a.position.is_finite() && a.weight.re.is_finite() && a.weight.im.is_finite(),
            "non-finite atom"
        );
    }
    atoms.sort_by(|a, b| a.position.partial_cmp(&b.position).unwrap());
    let zero = Cplx::new(F::zero(), F::zero());
    let mut out: Vec<Atom<F>> = Vec::with_capacity(atoms.len());
    let mut i = 0;
    while i < atoms.len() {
        let mut j = i + 1;
        while j < atoms.len()
            && atoms[j].position - atoms[j - 1].position <= coalesce_tol(atoms[j].position)
        {
            j += 1;
        }
        if j == i + 1 {
            if atoms[i].weight != zero {
                out.push(atoms[i]);
            }
        } else {
            let run = &atoms[i..j];
            let weight = run.iter().fold(zero, |acc, a| acc + a.weight);
            let norm_total: F = run.iter().map(|a| a.weight.norm()).sum();
            let position = if norm_total > F::zero() {
                run.iter().map(|a| a.position * a.weight.norm()).sum::<F>() / norm_total
            } else {
                run.iter().map(|a| a.position).sum::<F>()
                    / F::from_usize(run.len()).unwrap()
            };
            if weight != zero {
                out.push(Atom::new(position, weight));
            }
        }
        i = j;
    }
    out
}

/// Sort segments, trim zero padding, merge overlapping clusters onto the
/// finest step present in the cluster (mass-conserving).
fn normalize_segments<F: Scalar>(segments: Vec<DensitySegment<F>>) -> Vec<DensitySegment<F>> {
    let zero = Cplx::new(F::zero(), F::zero());
    let mut segs: Vec<DensitySegment<F>> = segments
        .into_iter()
        .filter_map(|mut s| {
            // trim leading/trailing zero cells
            let first = s.samples.iter().position(|v| *v != zero)?;
            let last = s.samples.iter().rposition(|v| *v != zero).unwrap();
            s.origin = s.cell_lo(first);
            s.samples = s.samples[first..=last].to_vec();
            Some(s)
        })
        .collect();
    segs.sort_by(|a, b| a.origin.partial_cmp(&b.origin).unwrap());
    let mut out: Vec<DensitySegment<F>> = Vec::new();
    let mut i = 0;
    while i < segs.len() {
        let mut end = segs[i].end();
        let mut j = i + 1;
        let tol = segs[i].step * F::lit(1e-9);
        while j < segs.len() && segs[j].origin < end - tol {
            end = end.max(segs[j].end());
            j += 1;
        }
        if j == i + 1 {
            out.push(segs[i].clone());
        } else {
            let cluster = &segs[i..j];
            let mut h = cluster
                .iter()
                .map(|s| s.step)
                .fold(F::infinity(), |a, b| a.min(b));
            let start = cluster[0].origin;
            // guard against pathological steps blowing up the merge grid
            let cap = 1e7;
            if ((end - start) / h).as_f64() > cap {
                h = (end - start) / F::lit(cap);
            }
            let n = ((end - start) / h).ceil().as_f64() as usize;
            let mut masses = vec![zero; n.max(1)];
            for s in cluster {
                distribute_masses(s, start, h, &mut masses);
            }
            let samples = masses
                .into_iter()
                .map(|m| m / Cplx::new(h, F::zero()))
                .collect();
            out.push(DensitySegment {
                origin: start,
                step: h,
                samples,
            });
        }
        i = j;
    }
    out
}

// ---------------------------------------------------------------------------
// Serialization (f64 wire format)
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct DensityJson {
    origin: f64,
    step: f64,
    samples: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct MeasureJson {
    atoms: Vec<[f64; 3]>,
    density: Option<DensityJson>,
}

impl<F: Scalar> Measure<F> {
    /// JSON value following the wire schema
    /// `{ "atoms": [[pos, re, im], ...], "density": {origin, step, samples} | null }`.
    /// Multiple internal segments are resampled onto one uniform grid.
    pub fn to_json_value(&self) -> serde_json::Value {
        let atoms = self
            .atoms
            .iter()
            .map(|a| {
                [
                    a.position.as_f64(),
                    a.weight.re.as_f64(),
                    a.weight.im.as_f64(),
                ]
            })
            .collect();
        let density = if self.density.is_empty() {
            None
        } else {
            let single = if self.density.len() == 1 {
                self.density[0].clone()
            } else {
                let start = self.density[0].origin;
                let end = self
                    .density
                    .iter()
                    .map(|s| s.end())
                    .fold(F::neg_infinity(), |a, b| a.max(b));
                let h = self
                    .density
                    .iter()
                    .map(|s| s.step)
                    .fold(F::infinity(), |a, b| a.min(b));
                let n = ((end - start) / h).ceil().as_f64() as usize;
                let mut masses = vec![Complex::new(F::zero(), F::zero()); n.max(1)];
                for s in &self.density {
                    distribute_masses(s, start, h, &mut masses);
                }
                DensitySegment {
                    origin: start,
                    step: h,
                    samples: masses
                        .into_iter()
                        .map(|m| m / Complex::new(h, F::zero()))
                        .collect(),
                }
            };
            Some(DensityJson {
                origin: single.origin.as_f64(),
                step: single.step.as_f64(),
                samples: single
                    .samples
                    .iter()
                    .map(|s| [s.re.as_f64(), s.im.as_f64()])
                    .collect(),
            })
        };
        serde_json::to_value(MeasureJson { atoms, density }).unwrap()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).unwrap()
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self> {
        let mj: MeasureJson = serde_json::from_value(v.clone())?;
        let atoms = mj
            .atoms
            .iter()
            .map(|a| Atom::new(F::lit(a[0]), Complex::new(F::lit(a[1]), F::lit(a[2]))))
            .collect();
        let mut segments = Vec::new();
        if let Some(d) = mj.density {
            segments.push(DensitySegment::new(
                F::lit(d.origin),
                F::lit(d.step),
                d.samples
                    .iter()
                    .map(|s| Complex::new(F::lit(s[0]), F::lit(s[1])))
                    .collect(),
            )?);
        }
        Ok(Self::from_parts(atoms, segments))
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(s)?;
        Self::from_json_value(&v)
    }

    /// CSV rendering of the atomic part: `position,re,im`, 17 significant digits.
    pub fn atoms_csv(&self) -> String {
        let mut out = String::from("position,re,im\n");
        for a in &self.atoms {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e}\n",
                a.position, a.weight.re, a.weight.im
            ));
        }
        out
    }
}
