//! Schur and Caratheodory functions, orthonormal polynomial recurrences,
//! and the `m^+` function.
//!
//! The Schur function of a coefficient sequence is evaluated by the
//! backward recursion `g_n = (alpha_n + z g_{n+1}) / (1 + conj(alpha_n) z
//! g_{n+1})`, truncated at `g_depth = alpha_depth` (exact for eventually
//! constant tails; the truncation error decays like `|z|^depth` either
//! way). The Caratheodory function is `G = (1 + z g) / (1 - z g)`, with
//! positive real part on the disk.
//!
//! The second-kind polynomials `psi_n` are the orthonormal polynomials of
//! the sign-flipped coefficients (the `lambda = -1` Aleksandrov rotation),
//! and `u_n = psi_n + G phi_n`, `u_n^* = -psi_n^* + G phi_n^*` is the
//! decaying solution of the transfer recursion:
//! `(u_n, u_n^*) = A-product * (1 + G, G - 1)`. The ratio
//! `m^+ = u_1 / u_0` satisfies the averaged identity
//! `E log|m^+| = log|z| - gamma_A(z)`, which `verify_m_gamma` checks
//! numerically.

#[allow(unused_imports)]
use num_traits::Float;

use crate::cocycle::{lyapunov_exponent, mix_seed, Convention};
use crate::dynamics::{realize, SamplingFunction, System};
use crate::verblunsky::{rho_unchecked, VerblunskySequence};
use crate::{C64, Error, Result};

fn check_in_disk(z: C64) -> Result<()> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::NonFinite);
    }
    if z.norm() >= 1.0 {
        return Err(Error::OutsideUnitDisk { modulus: z.norm() });
    }
    Ok(())
}

fn schur_from(alpha_at: &impl Fn(i64) -> C64, z: C64, depth: usize) -> Result<C64> {
    check_in_disk(z)?;
    if depth == 0 {
        return Err(Error::InvalidParameter("depth must be at least 1"));
    }
    let mut g = alpha_at(depth as i64);
    if g.norm() >= 1.0 {
        return Err(Error::SchurNonContraction {
            level: depth,
            modulus: g.norm(),
        });
    }
    for n in (0..depth as i64).rev() {
        let a = alpha_at(n);
        let zg = z * g;
        g = (a + zg) / (C64::new(1.0, 0.0) + a.conj() * zg);
        let m = g.norm();
        if !(m < 1.0) {
            return Err(Error::SchurNonContraction {
                level: n as usize,
                modulus: m,
            });
        }
    }
    Ok(g)
}

/// Schur function `g(z)` of the one-sided sequence, truncated at `depth`
/// by closing the tail with `g_depth = alpha_depth`.
pub fn schur_function(seq: &VerblunskySequence, z: C64, depth: usize) -> Result<C64> {
    let alpha_at = |n: i64| seq.get(n).map(|a| a.value()).unwrap_or(C64::new(0.0, 0.0));
    // Require coverage explicitly rather than silently zero-padding.
    seq.get(depth as i64)?;
    schur_from(&alpha_at, z, depth)
}

/// Caratheodory transform `G = (1 + z g) / (1 - z g)`.
pub fn caratheodory(g: C64, z: C64) -> Result<C64> {
    let zg = z * g;
    let den = C64::new(1.0, 0.0) - zg;
    if den.norm() < 1e-14 {
        return Err(Error::SmallDenominator {
            context: "Caratheodory transform",
        });
    }
    Ok((C64::new(1.0, 0.0) + zg) / den)
}

/// Orthonormal OPUC data at degree `n`: first kind (`phi`), second kind
/// (`psi`, built from sign-flipped coefficients), and their reversed
/// (`*`) polynomials, all evaluated at a fixed `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpucState {
    pub degree: usize,
    pub phi: C64,
    pub phi_star: C64,
    pub psi: C64,
    pub psi_star: C64,
}

/// One step of `rho phi_{n+1} = z phi_n - conj(alpha) phi_n^*` together
/// with its reversed companion.
#[inline]
fn szego_step(alpha: C64, z: C64, p: C64, p_star: C64) -> (C64, C64) {
    let inv_rho = 1.0 / rho_unchecked(alpha);
    (
        (z * p - alpha.conj() * p_star) * inv_rho,
        (p_star - alpha * z * p) * inv_rho,
    )
}

/// Evaluate the first-kind system at degree `n` with coefficients rotated
/// by a fixed unimodular `lambda` (`lambda = 1` is the plain system,
/// `lambda = -1` produces the second-kind values).
pub fn opuc_with_rotation(
    seq: &VerblunskySequence,
    z: C64,
    n: usize,
    lambda: C64,
) -> Result<(C64, C64)> {
    let mut p = C64::new(1.0, 0.0);
    let mut p_star = p;
    for k in 0..n as i64 {
        let alpha = lambda * seq.get(k)?.value();
        (p, p_star) = szego_step(alpha, z, p, p_star);
    }
    Ok((p, p_star))
}

/// First- and second-kind orthonormal polynomial values at degree `n`.
pub fn opuc_recurrence(seq: &VerblunskySequence, z: C64, n: usize) -> Result<OpucState> {
    let mut state = OpucState {
        degree: n,
        phi: C64::new(1.0, 0.0),
        phi_star: C64::new(1.0, 0.0),
        psi: C64::new(1.0, 0.0),
        psi_star: C64::new(1.0, 0.0),
    };
    for k in 0..n as i64 {
        let alpha = seq.get(k)?.value();
        (state.phi, state.phi_star) = szego_step(alpha, z, state.phi, state.phi_star);
        (state.psi, state.psi_star) = szego_step(-alpha, z, state.psi, state.psi_star);
    }
    Ok(state)
}

fn m_plus_from(alpha_at: &impl Fn(i64) -> C64, z: C64, depth: usize) -> Result<C64> {
    if z.norm_sqr() == 0.0 {
        return Err(Error::ZeroSpectralParameter);
    }
    let g = schur_from(alpha_at, z, depth)?;
    let big_g = caratheodory(g, z)?;
    let a0 = alpha_at(0);
    let inv_rho = 1.0 / rho_unchecked(a0);
    let phi1 = (z - a0.conj()) * inv_rho;
    let psi1 = (z + a0.conj()) * inv_rho;
    let u0 = C64::new(1.0, 0.0) + big_g;
    if u0.norm() < 1e-14 {
        return Err(Error::SmallDenominator { context: "m_plus u0" });
    }
    Ok((psi1 + big_g * phi1) / u0)
}

/// `m^+ = u_1 / u_0` with `u_0 = 1 + G`, `u_1 = psi_1 + G phi_1`.
pub fn m_plus(seq: &VerblunskySequence, z: C64, depth: usize) -> Result<C64> {
    check_in_disk(z)?;
    seq.get(depth as i64)?;
    let alpha_at = |n: i64| seq.get(n).map(|a| a.value()).unwrap_or(C64::new(0.0, 0.0));
    m_plus_from(&alpha_at, z, depth)
}

/// The decaying transfer pair `(u_n, u_n^*)` built from the polynomial
/// systems and the Caratheodory value at `z` (tail depth as in
/// [`schur_function`]).
pub fn u_vector(seq: &VerblunskySequence, z: C64, n: usize, depth: usize) -> Result<(C64, C64)> {
    check_in_disk(z)?;
    let g = schur_function(seq, z, depth)?;
    let big_g = caratheodory(g, z)?;
    let state = opuc_recurrence(seq, z, n)?;
    Ok((
        state.psi + big_g * state.phi,
        -state.psi_star + big_g * state.phi_star,
    ))
}

/// Residual of the averaged identity
/// `avg_omega log|m^+_omega(z)| = log|z| - gamma_A(z)`:
/// the left side is a Birkhoff average over `birkhoff_samples` successive
/// orbit starts, the right side uses a cocycle estimate over
/// `gamma_steps` factors.
pub fn verify_m_gamma(
    system: &System,
    f: &SamplingFunction,
    z: C64,
    depth: usize,
    birkhoff_samples: u32,
    gamma_steps: u64,
    seed: u64,
) -> Result<f64> {
    check_in_disk(z)?;
    if z.norm_sqr() == 0.0 {
        return Err(Error::ZeroSpectralParameter);
    }
    if birkhoff_samples == 0 {
        return Err(Error::InvalidParameter("birkhoff_samples must be positive"));
    }
    let span_hi = birkhoff_samples as i64 + depth as i64 + 1;
    let orbit = realize(system, f, (0, span_hi), seed)?;
    let mut acc = 0.0f64;
    for j in 0..birkhoff_samples as i64 {
        let alpha_at = |n: i64| orbit.alpha(n + j);
        let m = m_plus_from(&alpha_at, z, depth)?;
        acc += m.norm().ln();
    }
    let lhs = acc / birkhoff_samples as f64;
    if !lhs.is_finite() {
        return Err(Error::NonFiniteAccumulation);
    }
    let gamma = lyapunov_exponent(
        system,
        f,
        z,
        gamma_steps,
        2,
        Convention::A,
        mix_seed(seed, 0x6d67),
    )?;
    Ok((lhs - (z.norm().ln() - gamma.gamma)).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::{constant_gamma_a, cocycle_product};
    use crate::dynamics::TorusRotation;
    use alloc::vec::Vec;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pseudo_seq(len: usize, seed: u64, scale: f64) -> VerblunskySequence {
        let mut s = seed.wrapping_mul(0x2545f4914f6cdd1d) | 1;
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let vals: Vec<C64> = (0..len).map(|_| c(next() * scale, next() * scale)).collect();
        VerblunskySequence::from_values(0, &vals).unwrap()
    }

    #[test]
    fn schur_free_case_vanishes() {
        let seq = VerblunskySequence::constant(c(0.0, 0.0), 0, 300).unwrap();
        for z in [c(0.0, 0.0), c(0.5, 0.3), c(-0.9, 0.0)] {
            let g = schur_function(&seq, z, 200).unwrap();
            assert_eq!(g, c(0.0, 0.0));
        }
    }

    #[test]
    fn schur_constant_matches_quadratic_root() {
        // Fixed point of the recursion: conj(a) z g^2 + (1 - z) g - a = 0.
        let a = 0.5f64;
        let z = c(0.3, 0.0);
        let seq = VerblunskySequence::constant(c(a, 0.0), 0, 300).unwrap();
        let g = schur_function(&seq, z, 200).unwrap();
        let qa = a * 0.3;
        let qb = 0.7;
        let qc = -a;
        let disc = (qb * qb - 4.0 * qa * qc).sqrt();
        let root = (-qb + disc) / (2.0 * qa);
        assert!(root.abs() < 1.0);
        assert!((g - c(root, 0.0)).norm() < 1e-10, "g = {g:?} vs {root}");
        // It really is a fixed point of the step.
        let step = (c(a, 0.0) + z * g) / (c(1.0, 0.0) + c(a, 0.0) * z * g);
        assert!((step - g).norm() < 1e-12);
    }

    #[test]
    fn schur_values_stay_in_disk() {
        let mut s = 0xabcdu64;
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for trial in 0..100 {
            let seq = pseudo_seq(80, trial + 1, 1.3);
            let z = loop {
                let z = c(next() * 1.8, next() * 1.8);
                if z.norm() < 0.95 {
                    break z;
                }
            };
            let g = schur_function(&seq, z, 60).unwrap();
            assert!(g.norm() < 1.0, "trial {trial}: |g| = {}", g.norm());
        }
    }

    #[test]
    fn schur_rejects_outside_disk() {
        let seq = pseudo_seq(40, 2, 1.0);
        assert!(matches!(
            schur_function(&seq, c(1.0, 0.2), 20),
            Err(Error::OutsideUnitDisk { .. })
        ));
    }

    #[test]
    fn schur_depth_doubling_stability() {
        let seq = pseudo_seq(600, 5, 1.2);
        for &absz in &[0.5f64, 0.9] {
            let z = C64::from_polar(absz, 1.1);
            for &depth in &[20usize, 40, 80] {
                let g1 = schur_function(&seq, z, depth).unwrap();
                let g2 = schur_function(&seq, z, 2 * depth).unwrap();
                let bound = 10.0 * absz.powi(depth as i32);
                assert!(
                    (g1 - g2).norm() <= bound,
                    "depth {depth}, |z| {absz}: diff {} > {bound}",
                    (g1 - g2).norm()
                );
            }
        }
    }

    #[test]
    fn caratheodory_normalizations() {
        assert_eq!(caratheodory(c(0.0, 0.0), c(0.5, 0.2)).unwrap(), c(1.0, 0.0));
        assert_eq!(caratheodory(c(0.7, -0.3), c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn caratheodory_positive_real_part() {
        let mut s = 0x1234u64;
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for _ in 0..100 {
            let g = loop {
                let g = c(next() * 2.0, next() * 2.0);
                if g.norm() < 1.0 {
                    break g;
                }
            };
            let z = loop {
                let z = c(next() * 2.0, next() * 2.0);
                if z.norm() < 1.0 {
                    break z;
                }
            };
            let big_g = caratheodory(g, z).unwrap();
            assert!(big_g.re > 0.0, "Re G = {}", big_g.re);
        }
    }

    #[test]
    fn opuc_degree_zero_is_all_ones() {
        let seq = pseudo_seq(10, 3, 1.0);
        let s = opuc_recurrence(&seq, c(0.4, 0.1), 0).unwrap();
        assert_eq!(s.phi, c(1.0, 0.0));
        assert_eq!(s.phi_star, c(1.0, 0.0));
        assert_eq!(s.psi, c(1.0, 0.0));
        assert_eq!(s.psi_star, c(1.0, 0.0));
    }

    #[test]
    fn opuc_free_case_is_power() {
        let seq = VerblunskySequence::constant(c(0.0, 0.0), 0, 40).unwrap();
        let z = c(0.7, -0.4);
        let s = opuc_recurrence(&seq, z, 12).unwrap();
        let z12 = z.powu(12);
        assert!((s.phi - z12).norm() < 1e-13);
        assert!((s.psi - z12).norm() < 1e-13);
        assert!((s.phi_star - c(1.0, 0.0)).norm() < 1e-13);
        assert!((s.psi_star - c(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn opuc_matches_transfer_product() {
        let seq = pseudo_seq(40, 17, 1.2);
        let z = c(0.6, 0.35);
        let n = 30;
        let s = opuc_recurrence(&seq, z, n).unwrap();
        let t = cocycle_product(&seq, z, n as i64, Convention::A).unwrap();
        let v = t.reconstructed().apply((c(1.0, 0.0), c(1.0, 0.0)));
        let scale = s.phi.norm().max(s.phi_star.norm());
        assert!((v.0 - s.phi).norm() <= 1e-10 * scale, "phi mismatch");
        assert!((v.1 - s.phi_star).norm() <= 1e-10 * scale, "phi* mismatch");
    }

    #[test]
    fn aleksandrov_rotation_consistency() {
        let seq = pseudo_seq(30, 23, 1.1);
        let z = c(0.35, 0.55);
        let n = 14;
        let s = opuc_recurrence(&seq, z, n).unwrap();
        let (p1, p1s) = opuc_with_rotation(&seq, z, n, c(1.0, 0.0)).unwrap();
        assert_eq!(p1, s.phi);
        assert_eq!(p1s, s.phi_star);
        let (pm, pms) = opuc_with_rotation(&seq, z, n, c(-1.0, 0.0)).unwrap();
        assert_eq!(pm, s.psi);
        assert_eq!(pms, s.psi_star);
    }

    #[test]
    fn m_plus_free_case_is_z() {
        let seq = VerblunskySequence::constant(c(0.0, 0.0), 0, 500).unwrap();
        for z in [c(0.3, 0.0), c(-0.2, 0.6), c(0.0, 0.5)] {
            let m = m_plus(&seq, z, 400).unwrap();
            assert!((m - z).norm() < 1e-12, "m+ = {m:?} at z = {z:?}");
        }
    }

    #[test]
    fn m_plus_constant_depth_stable_and_matches_gamma() {
        let a = 0.5;
        let z = c(0.3, 0.0);
        let seq = VerblunskySequence::constant(c(a, 0.0), 0, 900).unwrap();
        let m400 = m_plus(&seq, z, 400).unwrap();
        let m800 = m_plus(&seq, z, 800).unwrap();
        assert!((m400 - m800).norm() < 1e-10, "depth instability");
        // log |m+| = log |z| - gamma_A(z) for the one-point system.
        let expect = z.norm().ln() - constant_gamma_a(a, z);
        assert!(
            (m400.norm().ln() - expect).abs() < 2e-3,
            "log|m+| = {} vs {expect}",
            m400.norm().ln()
        );
    }

    #[test]
    fn u_vector_free_case() {
        let seq = VerblunskySequence::constant(c(0.0, 0.0), 0, 500).unwrap();
        let z = c(0.4, 0.2);
        for n in [0usize, 1, 5] {
            let (u, us) = u_vector(&seq, z, n, 400).unwrap();
            let expect = z.powu(n as u32) * 2.0;
            assert!((u - expect).norm() < 1e-12, "u_{n}");
            assert!(us.norm() < 1e-12, "u*_{n}");
        }
    }

    /// The pair (u_n, u_n^*) is the transfer image of (u_0, u_0^*) =
    /// (1 + G, G - 1). (The second-kind pair propagates as
    /// (psi_n, -psi_n^*), which fixes the sign convention in u^*.)
    #[test]
    fn u_vector_propagates_under_transfer() {
        let seq = pseudo_seq(80, 31, 1.0);
        let z = c(0.45, 0.3);
        let depth = 60;
        let (u0, u0s) = u_vector(&seq, z, 0, depth).unwrap();
        for n in [5usize, 12, 20] {
            let (un, uns) = u_vector(&seq, z, n, depth).unwrap();
            let t = cocycle_product(&seq, z, n as i64, Convention::A).unwrap();
            let v = t.reconstructed().apply((u0, u0s));
            // u_n decays while the product grows; roundoff lives at the
            // scale of the product applied to the initial vector.
            let scale = t.reconstructed().op_norm() * (u0.norm() + u0s.norm());
            assert!(
                (v.0 - un).norm() <= 1e-9 * scale,
                "u_{n} mismatch: {:?} vs {:?}",
                v.0,
                un
            );
            assert!((v.1 - uns).norm() <= 1e-9 * scale, "u*_{n} mismatch");
        }
    }

    #[test]
    fn verify_m_gamma_free_case() {
        let sys = System::Rotation(TorusRotation::golden());
        let f = SamplingFunction::constant(c(0.0, 0.0)).unwrap();
        let r = verify_m_gamma(&sys, &f, c(0.5, 0.0), 50, 10, 1000, 7).unwrap();
        assert!(r < 1e-10, "residual {r}");
    }

    #[test]
    fn verify_m_gamma_constant_coefficient() {
        let sys = System::Rotation(TorusRotation::golden());
        let f = SamplingFunction::constant(c(0.5, 0.0)).unwrap();
        let r = verify_m_gamma(&sys, &f, c(0.4, 0.0), 400, 100, 200_000, 7).unwrap();
        assert!(r <= 5e-3, "residual {r}");
    }

    #[test]
    fn verify_m_gamma_rotation_system() {
        let sys = System::Rotation(TorusRotation::golden());
        let f = SamplingFunction::rotation_formula(0.5).unwrap();
        let r = verify_m_gamma(&sys, &f, c(0.5, 0.0), 200, 100_000, 1_000_000, 3).unwrap();
        assert!(r <= 5e-2, "residual {r}");
    }
}
