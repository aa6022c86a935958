//! Spectral approximation: eigenphases of unitary truncations, density of
//! states, the Thouless formula, spectrum arc approximants, the Kotani
//! zero-set measure, and a singular-part estimator for circle measures.
//!
//! Finite truncations use modulus-one cut coefficients so every window is
//! unitary and its spectrum lives on the circle; pooling eigenphases over
//! orbit starts approximates the density of states, whose logarithmic
//! potential together with the mean of `log rho` reproduces the Lyapunov
//! exponent (Thouless formula) — checked here by comparing against the
//! direct cocycle estimate.

mod eigen;

pub use eigen::{truncation_spectrum, EigenphaseList, RESIDUAL_TOL};

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use core::f64::consts::TAU;

use crate::cocycle::{lyapunov_exponent, lyapunov_scan, mix_seed, Convention, LyapunovEstimate};
use crate::dynamics::{realize, SamplingFunction, System};
use crate::verblunsky::{assemble_extended, Boundary};
use crate::{C64, Error, Result};

/// Finite union of closed circular arcs, kept normalized: arcs sorted,
/// pairwise disjoint and non-abutting, starts in `[0, 2 pi)`, lengths in
/// `[0, 2 pi]`. Zero-length arcs represent isolated points. The full
/// circle is `(0, 2 pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcSet {
    arcs: Vec<(f64, f64)>,
}

impl ArcSet {
    pub fn empty() -> Self {
        ArcSet { arcs: Vec::new() }
    }

    pub fn full_circle() -> Self {
        ArcSet {
            arcs: alloc::vec![(0.0, TAU)],
        }
    }

    /// Normalize a raw list of `(start, end)` arcs (`end >= start`;
    /// lengths `>= 2 pi` mean the full circle).
    pub fn new(raw: &[(f64, f64)]) -> Self {
        let mut arcs: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for &(a, b) in raw {
            if !(a.is_finite() && b.is_finite()) || b < a {
                continue;
            }
            if b - a >= TAU {
                return Self::full_circle();
            }
            let start = a.rem_euclid(TAU);
            arcs.push((start, start + (b - a)));
        }
        if arcs.is_empty() {
            return Self::empty();
        }
        arcs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        // Merge overlapping or abutting arcs.
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(arcs.len());
        for (a, b) in arcs {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        // Wrap-around: a tail beyond 2 pi swallows arcs at the beginning.
        if merged.len() > 1 {
            let tail = merged.last().unwrap().1 - TAU;
            if tail >= merged[0].0 {
                let mut covered = 0usize;
                let mut reach = tail;
                for &(a, b) in merged.iter() {
                    if covered + 1 == merged.len() {
                        break;
                    }
                    if a <= reach {
                        reach = reach.max(b);
                        covered += 1;
                    } else {
                        break;
                    }
                }
                let last = merged.len() - 1;
                merged[last].1 = merged[last].0 + (reach + TAU - merged[last].0).min(TAU);
                merged.drain(..covered);
            }
        }
        if merged.len() == 1 && merged[0].1 - merged[0].0 >= TAU {
            return Self::full_circle();
        }
        let total: f64 = merged.iter().map(|&(a, b)| b - a).sum();
        if total >= TAU {
            return Self::full_circle();
        }
        ArcSet { arcs: merged }
    }

    /// Each phase inflated to a closed arc of half-width `eps`.
    pub fn from_inflated_points(phases: &[f64], eps: f64) -> Self {
        let raw: Vec<(f64, f64)> = phases.iter().map(|&t| (t - eps, t + eps)).collect();
        Self::new(&raw)
    }

    /// Normalized arcs `(start, end)`; `end` may exceed `2 pi` for the
    /// single arc that wraps.
    pub fn arcs(&self) -> &[(f64, f64)] {
        &self.arcs
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.arcs.iter().map(|&(a, b)| b - a).sum::<f64>().min(TAU)
    }

    pub fn contains(&self, theta: f64) -> bool {
        let t = theta.rem_euclid(TAU);
        self.arcs
            .iter()
            .any(|&(a, b)| (t >= a && t <= b) || (t + TAU >= a && t + TAU <= b))
    }

    /// Midpoints of the complementary gaps (used for exact Hausdorff
    /// distances between arc sets). Empty for the empty set and the full
    /// circle.
    pub fn gap_midpoints(&self) -> Vec<f64> {
        if self.arcs.is_empty() || self.measure() >= TAU {
            return Vec::new();
        }
        let mut mids = Vec::with_capacity(self.arcs.len());
        for i in 0..self.arcs.len() {
            let end = self.arcs[i].1;
            let next_start = if i + 1 < self.arcs.len() {
                self.arcs[i + 1].0
            } else {
                self.arcs[0].0 + TAU
            };
            if next_start > end {
                mids.push((0.5 * (end + next_start)).rem_euclid(TAU));
            }
        }
        mids
    }

    /// Endpoints of all arcs (for Hausdorff candidate enumeration).
    pub fn endpoints(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.arcs.len());
        for &(a, b) in &self.arcs {
            out.push(a.rem_euclid(TAU));
            out.push(b.rem_euclid(TAU));
        }
        out
    }

    /// Angular (geodesic) distance from `theta` to the set; `0` inside.
    pub fn angular_distance(&self, theta: f64) -> f64 {
        if self.contains(theta) {
            return 0.0;
        }
        let t = theta.rem_euclid(TAU);
        let mut best = f64::INFINITY;
        for &(a, b) in &self.arcs {
            for e in [a, b] {
                let d = (t - e.rem_euclid(TAU)).abs();
                best = best.min(d.min(TAU - d));
            }
        }
        best
    }
}

/// Total length of the arc set (Lebesgue measure on the circle).
pub fn leb_measure(arcs: &ArcSet) -> f64 {
    arcs.measure()
}

/// Density-of-states histogram over `[0, 2 pi)` with unit total mass.
#[derive(Debug, Clone)]
pub struct DosHistogram {
    masses: Vec<f64>,
    samples: usize,
}

impl DosHistogram {
    pub fn from_phases(phases: &[f64], bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(Error::InvalidParameter("bins must be positive"));
        }
        if phases.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut masses = alloc::vec![0.0f64; bins];
        let w = TAU / bins as f64;
        for &t in phases {
            let i = ((t.rem_euclid(TAU) / w) as usize).min(bins - 1);
            masses[i] += 1.0;
        }
        let total = phases.len() as f64;
        for m in masses.iter_mut() {
            *m /= total;
        }
        Ok(DosHistogram {
            masses,
            samples: phases.len(),
        })
    }

    /// Uniform density (the free case closed form).
    pub fn uniform(bins: usize) -> Self {
        DosHistogram {
            masses: alloc::vec![1.0 / bins as f64; bins],
            samples: 0,
        }
    }

    pub fn bins(&self) -> usize {
        self.masses.len()
    }

    pub fn bin_width(&self) -> f64 {
        TAU / self.masses.len() as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.bin_width()
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn sample_count(&self) -> usize {
        self.samples
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }
}

/// Pooled eigenphase histogram plus the geometric-mean estimate of `rho`.
#[derive(Debug, Clone)]
pub struct DosEstimate {
    pub histogram: DosHistogram,
    /// `exp` of the Birkhoff average of `log rho_n` over the sampled
    /// coefficients.
    pub rho_inf: f64,
}

/// Pool eigenphases of `orbit_samples` decoupled windows of size
/// `window_n` (boundary value `1` at both cuts) into a DOS histogram.
pub fn dos_estimate(
    system: &System,
    f: &SamplingFunction,
    window_n: usize,
    orbit_samples: u32,
    bins: usize,
    seed: u64,
) -> Result<DosEstimate> {
    if window_n < 2 {
        return Err(Error::InvalidParameter("window_n must be at least 2"));
    }
    if orbit_samples == 0 {
        return Err(Error::InvalidParameter("orbit_samples must be positive"));
    }
    let mut pooled = Vec::with_capacity(window_n * orbit_samples as usize);
    let mut log_rho_sum = 0.0f64;
    let mut log_rho_count = 0usize;
    for k in 0..orbit_samples {
        let seq = realize(system, f, (0, window_n as i64 - 2), mix_seed(seed, k as u64))?
            .sequence((0, window_n as i64 - 2))?;
        for (_, v) in seq.values() {
            log_rho_sum += (1.0 - v.norm_sqr()).sqrt().ln();
            log_rho_count += 1;
        }
        let w = assemble_extended(
            &seq,
            (0, window_n as i64 - 1),
            Boundary::both(C64::new(1.0, 0.0)),
        )?;
        let spec = truncation_spectrum(&w)?;
        pooled.extend_from_slice(spec.phases());
    }
    Ok(DosEstimate {
        histogram: DosHistogram::from_phases(&pooled, bins)?,
        rho_inf: (log_rho_sum / log_rho_count as f64).exp(),
    })
}

/// Right-hand side of the Thouless formula by midpoint quadrature:
/// `-log rho_inf + sum_bins mass * log |z - e^(i theta_bin)|`.
pub fn thouless_rhs(dos: &DosHistogram, rho_inf: f64, z: C64) -> Result<f64> {
    if !(rho_inf > 0.0 && rho_inf <= 1.0) {
        return Err(Error::InvalidParameter("rho_inf must be in (0, 1]"));
    }
    let h = dos.bin_width();
    if (z.norm() - 1.0).abs() < h {
        return Err(Error::SingularityGuard);
    }
    let mut acc = -rho_inf.ln();
    for (i, &m) in dos.masses().iter().enumerate() {
        if m == 0.0 {
            continue;
        }
        let y = C64::from_polar(1.0, dos.center(i));
        acc += m * (z - y).norm().ln();
    }
    Ok(acc)
}

/// Direct-vs-Thouless comparison at one spectral parameter.
#[derive(Debug, Clone, Copy)]
pub struct ThoulessReport {
    pub gamma: LyapunovEstimate,
    pub rhs: f64,
    pub residual: f64,
}

/// Compare the cocycle estimate of `gamma_A(z)` against the logarithmic
/// potential of the pooled DOS. `n_dos` is the total number of pooled
/// eigenphases (split into 8 windows), `n_cocycle` the transfer steps.
pub fn thouless_residual(
    system: &System,
    f: &SamplingFunction,
    z: C64,
    n_dos: usize,
    n_cocycle: u64,
    bins: usize,
    seed: u64,
) -> Result<ThoulessReport> {
    let window_n = (n_dos / 8).clamp(64, 8192);
    let samples = (n_dos as u32).div_ceil(window_n as u32).max(1);
    let dos = dos_estimate(system, f, window_n, samples, bins, seed)?;
    let rhs = thouless_rhs(&dos.histogram, dos.rho_inf, z)?;
    let gamma = lyapunov_exponent(
        system,
        f,
        z,
        n_cocycle,
        2,
        Convention::A,
        mix_seed(seed, 0x7406),
    )?;
    Ok(ThoulessReport {
        gamma,
        rhs,
        residual: (gamma.gamma - rhs).abs(),
    })
}

/// Union of eigenphases over orbit samples, each inflated to an arc of
/// half-width `eps` (an outer approximation of the spectrum).
pub fn spectrum_arcs(
    system: &System,
    f: &SamplingFunction,
    window_n: usize,
    orbit_samples: u32,
    eps: f64,
    seed: u64,
) -> Result<ArcSet> {
    if eps < 0.0 || !eps.is_finite() {
        return Err(Error::InvalidParameter("inflation eps must be >= 0"));
    }
    let mut pooled = Vec::new();
    for k in 0..orbit_samples {
        let seq = realize(system, f, (0, window_n as i64 - 2), mix_seed(seed, k as u64))?
            .sequence((0, window_n as i64 - 2))?;
        let w = assemble_extended(
            &seq,
            (0, window_n as i64 - 1),
            Boundary::both(C64::new(1.0, 0.0)),
        )?;
        pooled.extend_from_slice(truncation_spectrum(&w)?.phases());
    }
    Ok(ArcSet::from_inflated_points(&pooled, eps))
}

/// Kotani zero-set measurement over a circle region.
#[derive(Debug, Clone)]
pub struct KotaniReport {
    /// Estimated `Leb({z in region : gamma(z) < tau})`.
    pub zero_measure: f64,
    pub tau: f64,
    /// `(theta, gamma_hat)` for every evaluated grid cell midpoint.
    pub cells: Vec<(f64, f64)>,
}

/// Measure of the sublevel set `{gamma_hat < tau}` inside `region`,
/// sampled on a uniform `grid_points` midpoint grid over the whole
/// circle; one orbit realization of `steps` factors is shared by all
/// grid cells.
pub fn kotani_zero_measure(
    system: &System,
    f: &SamplingFunction,
    region: &ArcSet,
    grid_points: usize,
    steps: u64,
    tau: f64,
    seed: u64,
) -> Result<KotaniReport> {
    if grid_points == 0 {
        return Err(Error::InvalidParameter("grid_points must be positive"));
    }
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter("tau must be positive"));
    }
    let orbit = realize(system, f, (0, steps as i64), seed)?;
    let cell = TAU / grid_points as f64;
    let mut cells = Vec::new();
    let mut below = 0usize;
    for i in 0..grid_points {
        let theta = (i as f64 + 0.5) * cell;
        if !region.contains(theta) {
            continue;
        }
        let gamma = lyapunov_scan(
            |n| orbit.alpha(n),
            C64::from_polar(1.0, theta),
            steps,
            Convention::M,
        )?;
        if gamma < tau {
            below += 1;
        }
        cells.push((theta, gamma));
    }
    if cells.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(KotaniReport {
        zero_measure: below as f64 * cell,
        tau,
        cells,
    })
}

/// A finite Borel measure on the circle: atoms plus a piecewise-constant
/// density on uniform bins (either part may be absent).
#[derive(Debug, Clone)]
pub struct CircleMeasure {
    atoms: Vec<(f64, f64)>,
    density_bins: Vec<f64>,
}

impl CircleMeasure {
    pub fn new(atoms: &[(f64, f64)], density_bins: &[f64]) -> Result<Self> {
        for &(t, m) in atoms {
            if !t.is_finite() || !m.is_finite() || m < 0.0 {
                return Err(Error::InvalidParameter("invalid atom"));
            }
        }
        if density_bins.iter().any(|&d| !d.is_finite() || d < 0.0) {
            return Err(Error::InvalidParameter("invalid density bin"));
        }
        Ok(CircleMeasure {
            atoms: atoms
                .iter()
                .map(|&(t, m)| (t.rem_euclid(TAU), m))
                .collect(),
            density_bins: density_bins.to_vec(),
        })
    }

    pub fn total_mass(&self) -> f64 {
        let atom_mass: f64 = self.atoms.iter().map(|&(_, m)| m).sum();
        let bin_w = if self.density_bins.is_empty() {
            0.0
        } else {
            TAU / self.density_bins.len() as f64
        };
        atom_mass + self.density_bins.iter().sum::<f64>() * bin_w
    }

    fn density_at(&self, theta: f64) -> f64 {
        if self.density_bins.is_empty() {
            return 0.0;
        }
        let w = TAU / self.density_bins.len() as f64;
        let i = ((theta.rem_euclid(TAU) / w) as usize).min(self.density_bins.len() - 1);
        self.density_bins[i]
    }
}

/// Per-stage values and the final estimate of the singular part.
#[derive(Debug, Clone)]
pub struct SingularEstimate {
    /// `(eps, sup over arc unions of total length < eps of mu(B and J))`.
    pub stages: Vec<(f64, f64)>,
    /// The smallest-`eps` stage value (the decreasing limit's best bound).
    pub estimate: f64,
}

/// Estimate of the singular mass of `mu` inside `region`: for each `eps`
/// in the decreasing sequence, the supremum over finite unions `J` of
/// arcs with endpoints on a uniform `grid_s`-point grid and total length
/// below `eps` of `mu(region and J)`. Atoms are captured by their
/// covering grid cells; the remaining budget is filled at the largest
/// density, so the stage values decrease to the atomic mass inside
/// `region` as `eps` shrinks.
pub fn singular_part_estimate(
    mu: &CircleMeasure,
    region: &ArcSet,
    grid_s: usize,
    eps_seq: &[f64],
) -> Result<SingularEstimate> {
    if grid_s < 8 {
        return Err(Error::InvalidParameter("grid_s must be at least 8"));
    }
    if eps_seq.is_empty() || eps_seq.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter(
            "eps_seq must be strictly decreasing",
        ));
    }
    let cell = TAU / grid_s as f64;
    let atoms_inside: Vec<(f64, f64)> = mu
        .atoms
        .iter()
        .copied()
        .filter(|&(t, m)| m > 0.0 && region.contains(t))
        .collect();
    if !atoms_inside.is_empty() && *eps_seq.last().unwrap() < cell {
        // The finite endpoint grid cannot produce an arc narrower than a
        // cell, so a budget below one cell cannot isolate any atom.
        return Err(Error::GridTooCoarse);
    }
    let max_density = if mu.density_bins.is_empty() {
        0.0
    } else {
        let w = TAU / mu.density_bins.len() as f64;
        mu.density_bins
            .iter()
            .enumerate()
            .filter(|&(i, _)| {
                // A density bin matters if any part of it meets the region.
                let mid = (i as f64 + 0.5) * w;
                region.contains(mid) || region.contains(i as f64 * w) || region.contains((i as f64 + 1.0) * w)
            })
            .map(|(_, &d)| d)
            .fold(0.0, f64::max)
    };
    let mut sorted_atoms = atoms_inside;
    sorted_atoms.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    let mut stages = Vec::with_capacity(eps_seq.len());
    for &eps in eps_seq {
        let mut budget = eps;
        let mut sup = 0.0f64;
        for &(theta, mass) in &sorted_atoms {
            if budget >= cell {
                budget -= cell;
                sup += mass + mu.density_at(theta) * cell;
            }
        }
        sup += budget * max_density;
        stages.push((eps, sup));
    }
    let estimate = stages.last().unwrap().1;
    Ok(SingularEstimate { stages, estimate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{BernoulliShift, TorusRotation};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn arcset_trivial_measures() {
        assert_eq!(ArcSet::empty().measure(), 0.0);
        let two = ArcSet::new(&[(0.2, 1.2), (3.0, 3.5)]);
        assert!((two.measure() - 1.5).abs() < 1e-15);
        assert!((ArcSet::full_circle().measure() - TAU).abs() < 1e-15);
    }

    #[test]
    fn arcset_merges_overlaps_and_wraps() {
        let merged = ArcSet::new(&[(0.0, 1.0), (0.5, 2.0)]);
        assert_eq!(merged.arcs().len(), 1);
        assert!((merged.measure() - 2.0).abs() < 1e-14);
        // Arc crossing 2 pi merges with one at the start.
        let wrap = ArcSet::new(&[(TAU - 0.5, TAU + 0.3), (0.1, 1.0)]);
        assert_eq!(wrap.arcs().len(), 1);
        assert!((wrap.measure() - 1.5).abs() < 1e-12, "{}", wrap.measure());
        assert!(wrap.contains(0.05));
        assert!(wrap.contains(TAU - 0.2));
        assert!(!wrap.contains(2.0));
    }

    #[test]
    fn arcset_points_have_zero_measure() {
        let pts = ArcSet::from_inflated_points(&[0.3, 1.7, 4.0], 0.0);
        assert_eq!(pts.measure(), 0.0);
        assert!(pts.contains(1.7));
        assert!(!pts.contains(1.71));
    }

    proptest! {
        /// Rotating every arc by the same offset preserves the measure.
        #[test]
        fn arcset_measure_rotation_invariant(
            arcs in proptest::collection::vec((0.0..TAU, 0.0..1.2f64), 0..8),
            offset in 0.0..TAU,
        ) {
            let raw: Vec<(f64, f64)> = arcs.iter().map(|&(a, l)| (a, a + l)).collect();
            let rotated: Vec<(f64, f64)> =
                arcs.iter().map(|&(a, l)| (a + offset, a + offset + l)).collect();
            let m0 = ArcSet::new(&raw).measure();
            let m1 = ArcSet::new(&rotated).measure();
            prop_assert!((m0 - m1).abs() < 1e-9, "{m0} vs {m1}");
        }

        /// Membership of an inflated point set: the generating points are
        /// inside, far points outside.
        #[test]
        fn arcset_inflation_contains_generators(
            phases in proptest::collection::vec(0.0..TAU, 1..12),
            eps in 1e-6..0.3f64,
        ) {
            let set = ArcSet::from_inflated_points(&phases, eps);
            for &p in &phases {
                prop_assert!(set.contains(p));
            }
            prop_assert!(set.measure() <= (2.0 * eps * phases.len() as f64).min(TAU) + 1e-12);
        }
    }

    #[test]
    fn dos_free_case_uniform_and_rho_one() {
        let sys = System::Rotation(TorusRotation::golden());
        let f = SamplingFunction::constant(c(0.0, 0.0)).unwrap();
        let est = dos_estimate(&sys, &f, 256, 8, 32, 5).unwrap();
        assert_eq!(est.rho_inf, 1.0);
        assert!((est.histogram.total_mass() - 1.0).abs() < 1e-12);
        // Free eigenphases are exact lattices, so every bin carries the
        // same mass.
        for (i, &m) in est.histogram.masses().iter().enumerate() {
            assert!((m - 1.0 / 32.0).abs() < 1e-12, "bin {i}: {m}");
        }
    }

    #[test]
    fn dos_constant_rho_exact() {
        let sys = System::Rotation(TorusRotation::golden());
        let a = 0.5f64;
        let f = SamplingFunction::constant(c(a, 0.0)).unwrap();
        let est = dos_estimate(&sys, &f, 128, 4, 64, 5).unwrap();
        assert!((est.rho_inf - (1.0 - a * a).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn dos_real_coefficients_symmetric_histogram() {
        // Real coefficients give conjugation-symmetric matrices, so the
        // histogram should be symmetric under theta -> 2 pi - theta up to
        // sampling noise.
        let sys = System::Bernoulli(BernoulliShift::new(2).unwrap());
        let f =
            SamplingFunction::symbol_map(&[(b'a', c(0.3, 0.0)), (b'b', c(-0.3, 0.0))]).unwrap();
        let est = dos_estimate(&sys, &f, 500, 8, 64, 12).unwrap();
        let m = est.histogram.masses();
        let tv: f64 = (0..m.len())
            .map(|i| (m[i] - m[m.len() - 1 - i]).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv < 0.25, "mirror total-variation {tv}");
    }

    #[test]
    fn thouless_rhs_uniform_oracle() {
        // Logarithmic potential of the uniform measure is log max(|z|, 1).
        let dos = DosHistogram::uniform(4096);
        let v = thouless_rhs(&dos, 1.0, c(2.0, 0.0)).unwrap();
        assert!((v - (2.0f64).ln()).abs() < 1e-3, "{v}");
        let inside = thouless_rhs(&dos, 1.0, c(0.5, 0.0)).unwrap();
        assert!(inside.abs() < 1e-3, "{inside}");
        let shifted = thouless_rhs(&dos, 0.8, c(2.0, 0.0)).unwrap();
        assert!((shifted - ((2.0f64).ln() - (0.8f64).ln())).abs() < 1e-3);
    }

    #[test]
    fn thouless_rhs_singularity_guard() {
        let dos = DosHistogram::uniform(128);
        assert!(matches!(
            thouless_rhs(&dos, 1.0, C64::from_polar(1.001, 0.3)),
            Err(Error::SingularityGuard)
        ));
    }

    #[test]
    fn thouless_residual_free_case() {
        let sys = System::Rotation(TorusRotation::golden());
        let f = SamplingFunction::constant(c(0.0, 0.0)).unwrap();
        let rep = thouless_residual(&sys, &f, c(2.0, 0.0), 1024, 2000, 4096, 3).unwrap();
        assert!(rep.residual <= 1e-3, "residual {}", rep.residual);
    }

    #[test]
    fn thouless_residual_constant_coefficient() {
        let sys = System::Rotation(TorusRotation::golden());
        let f = SamplingFunction::constant(c(0.5, 0.0)).unwrap();
        let rep = thouless_residual(&sys, &f, c(2.0, 0.0), 4000, 200_000, 4096, 3).unwrap();
        assert!(rep.residual <= 5e-3, "residual {}", rep.residual);
        // Against the closed form as well.
        let exact = crate::cocycle::constant_gamma_a(0.5, c(2.0, 0.0));
        assert!((rep.gamma.gamma - exact).abs() < 1e-3);
    }

    #[test]
    fn spectrum_arcs_free_case_covers_circle() {
        let sys = System::Rotation(TorusRotation::golden());
        let f = SamplingFunction::constant(c(0.0, 0.0)).unwrap();
        let n = 64;
        let arcs =
            spectrum_arcs(&sys, &f, n, 2, core::f64::consts::PI / n as f64, 7).unwrap();
        assert!((arcs.measure() - TAU).abs() < 1e-12, "{}", arcs.measure());
    }

    #[test]
    fn spectrum_arcs_zero_inflation_zero_measure() {
        let sys = System::Rotation(TorusRotation::golden());
        let f = SamplingFunction::constant(c(0.3, 0.0)).unwrap();
        let arcs = spectrum_arcs(&sys, &f, 32, 1, 0.0, 7).unwrap();
        assert_eq!(arcs.measure(), 0.0);
    }

    #[test]
    fn kotani_free_case_full_circle() {
        let sys = System::Rotation(TorusRotation::golden());
        let f = SamplingFunction::constant(c(0.0, 0.0)).unwrap();
        let rep =
            kotani_zero_measure(&sys, &f, &ArcSet::full_circle(), 64, 2000, 1e-2, 3).unwrap();
        assert!((rep.zero_measure - TAU).abs() < 1e-12);
    }

    #[test]
    fn kotani_constant_gap_measure_zero() {
        // On the spectral gap of alpha = 0.5 the exponent is positive, so
        // the sublevel measure vanishes at tau = 1e-2 (grid midpoints stay
        // clear of the vanishing edge slivers).
        let sys = System::Rotation(TorusRotation::golden());
        let f = SamplingFunction::constant(c(0.5, 0.0)).unwrap();
        let third = core::f64::consts::PI / 3.0;
        let gap = ArcSet::new(&[(-third + TAU, -third + TAU + 2.0 * third)]);
        assert!((gap.measure() - 2.0 * third).abs() < 1e-12);
        let rep = kotani_zero_measure(&sys, &f, &gap, 256, 50_000, 1e-2, 5).unwrap();
        assert_eq!(rep.zero_measure, 0.0, "cells: {:?}", rep.cells.len());
    }

    #[test]
    fn kotani_sublevel_matches_discriminant_arc() {
        // Constant 0.5: cells with small exponent are exactly the
        // complement of the gap, up to 2 boundary cells per edge.
        let sys = System::Rotation(TorusRotation::golden());
        let a = 0.5;
        let f = SamplingFunction::constant(c(a, 0.0)).unwrap();
        let grid = 128usize;
        let rep = kotani_zero_measure(
            &sys,
            &f,
            &ArcSet::full_circle(),
            grid,
            50_000,
            1e-2,
            5,
        )
        .unwrap();
        let cell = TAU / grid as f64;
        let mut mismatches = 0usize;
        for &(theta, gamma) in &rep.cells {
            let inside_band = (theta / 2.0).sin().abs() >= a;
            let below = gamma < rep.tau;
            // Distance to the two gap edges at theta = +/- pi/3.
            let third = core::f64::consts::PI / 3.0;
            let d = [third, TAU - third]
                .iter()
                .map(|&e| {
                    let d = (theta - e).abs();
                    d.min(TAU - d)
                })
                .fold(f64::INFINITY, f64::min);
            if below != inside_band && d > 2.0 * cell {
                mismatches += 1;
            }
        }
        assert_eq!(mismatches, 0, "sublevel set strays from the band");
    }

    #[test]
    fn singular_part_pure_ac_vanishes() {
        let mu = CircleMeasure::new(&[], &alloc::vec![1.0 / TAU; 64]).unwrap();
        let est = singular_part_estimate(
            &mu,
            &ArcSet::full_circle(),
            1 << 20,
            &[1e-2, 1e-4, 1e-6, 1e-8],
        )
        .unwrap();
        assert!(est.estimate <= 1e-6, "estimate {}", est.estimate);
        // Stage values decrease.
        for w in est.stages.windows(2) {
            assert!(w[1].1 <= w[0].1 + 1e-15);
        }
    }

    #[test]
    fn singular_part_recovers_atom() {
        let mu = CircleMeasure::new(&[(1.0, 0.3)], &[]).unwrap();
        let est = singular_part_estimate(
            &mu,
            &ArcSet::full_circle(),
            1 << 22,
            &[1e-2, 1e-3, 1e-4, 1e-5],
        )
        .unwrap();
        assert!((est.estimate - 0.3).abs() <= 1e-6, "estimate {}", est.estimate);
    }

    #[test]
    fn singular_part_atom_outside_region() {
        // Atom outside the region, uniform part inside: the estimate
        // decays with eps.
        let region = ArcSet::new(&[(2.0, 3.0)]);
        let mu = CircleMeasure::new(&[(0.5, 0.3)], &alloc::vec![0.5 / TAU; 32]).unwrap();
        let est =
            singular_part_estimate(&mu, &region, 1 << 22, &[1e-2, 1e-4, 1e-6, 1e-8]).unwrap();
        assert!(est.estimate <= 1e-6, "estimate {}", est.estimate);
    }

    #[test]
    fn singular_part_grid_too_coarse() {
        let mu = CircleMeasure::new(&[(1.0, 0.3)], &[]).unwrap();
        let res = singular_part_estimate(&mu, &ArcSet::full_circle(), 64, &[1e-2, 1e-9]);
        assert!(matches!(res, Err(Error::GridTooCoarse)));
    }
}
