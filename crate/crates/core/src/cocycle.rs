//! Szego transfer matrices, overflow-safe cocycle products, and Lyapunov
//! exponents.
//!
//! Two normalizations are first-class. The `A` matrices
//! `(1/rho) [[z, -conj(alpha)], [-alpha z, 1]]` have determinant `z` and
//! propagate the orthonormal polynomial pair `(phi_n, phi_n^*)`; dividing
//! by the principal `sqrt(z)` gives the determinant-one `M` matrices (the
//! SU(1,1)-valued cocycle on the unit circle). The two exponents satisfy
//! `gamma_A(z) = gamma_M(z) + log|z| / 2`, so they agree on `|z| = 1`; the
//! free-case oracle (`gamma_A = log max(|z|, 1)`) pins `A` as the
//! convention entering the Thouless formula and the `m^+` identity off the
//! circle.
//!
//! Products over `10^6` steps overflow double precision, so the running
//! product keeps a unit-scale matrix plus a scalar natural-log magnitude.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::dynamics::{realize, SamplingFunction, System};
use crate::mat2::Mat2;
use crate::verblunsky::{rho_unchecked, Coefficient, VerblunskySequence};
use crate::{C64, Error, Result};

/// Which transfer-matrix normalization a product uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// Determinant-`z` matrices (no square root).
    A,
    /// Determinant-one matrices (`A / sqrt(z)`, principal branch).
    M,
}

fn check_z(z: C64) -> Result<()> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::NonFinite);
    }
    if z.norm_sqr() == 0.0 {
        return Err(Error::ZeroSpectralParameter);
    }
    Ok(())
}

/// `(1/rho) [[z, -conj(alpha)], [-alpha z, 1]]`; determinant `z` exactly.
pub fn a_matrix(alpha: Coefficient, z: C64) -> Result<Mat2> {
    check_z(z)?;
    let a = alpha.value();
    let inv_rho = 1.0 / alpha.rho();
    Ok(Mat2::new(z, -a.conj(), -a * z, C64::new(1.0, 0.0)).scale(inv_rho))
}

/// Determinant-one normalization `a_matrix / sqrt(z)`, principal branch.
pub fn m_matrix(alpha: Coefficient, z: C64) -> Result<Mat2> {
    m_matrix_with_branch(alpha, z, false)
}

/// Same with the opposite square-root branch (`sqrt(z) -> -sqrt(z)`);
/// flips the global sign of the matrix and nothing else.
pub fn m_matrix_with_branch(alpha: Coefficient, z: C64, flip_branch: bool) -> Result<Mat2> {
    let a = a_matrix(alpha, z)?;
    let mut root = z.sqrt();
    if flip_branch {
        root = -root;
    }
    let inv = C64::new(1.0, 0.0) / root;
    Ok(Mat2::new(a.a * inv, a.b * inv, a.c * inv, a.d * inv))
}

/// Running 2x2 product in log-scaled form: `reconstructed = e^(log_scale)
/// * matrix` with the stored matrix kept at max-entry modulus in
/// `[1/2, 2]`.
#[derive(Debug, Clone, Copy)]
pub struct CocycleProduct {
    matrix: Mat2,
    log_scale: f64,
    log_det: f64,
}

impl CocycleProduct {
    pub fn identity() -> Self {
        CocycleProduct {
            matrix: Mat2::identity(),
            log_scale: 0.0,
            log_det: 0.0,
        }
    }

    /// Left-multiply by the next transfer matrix and rescale if the
    /// max-entry modulus left `[1/2, 2]`.
    pub fn absorb_left(&mut self, step: &Mat2) {
        self.matrix = step.mul(&self.matrix);
        self.log_det += step.det().norm().ln();
        let m = self.matrix.max_abs();
        if !(0.5..=2.0).contains(&m) && m > 0.0 {
            self.matrix = self.matrix.scale(1.0 / m);
            self.log_scale += m.ln();
        }
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.matrix
    }

    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    /// `log || product ||` (operator norm), computed without overflow.
    pub fn log_norm(&self) -> f64 {
        self.log_scale + self.matrix.op_norm().ln()
    }

    /// `log |det(product)|`, accumulated factor by factor. (Computing the
    /// determinant of the stored matrix would cancel catastrophically for
    /// long products: it is `e^(-2 log_scale)` against O(1) entries.)
    pub fn log_abs_det(&self) -> f64 {
        self.log_det
    }

    /// Materialized product; overflows for long products, test use only.
    pub fn reconstructed(&self) -> Mat2 {
        self.matrix.scale(self.log_scale.exp())
    }
}

/// Ordered cocycle product over `seq`:
/// `n > 0` multiplies the transfer matrices at indices `n-1, ..., 1, 0`
/// (leftmost factor at `n-1`); `n = 0` is the identity; `n < 0` is the
/// inverse-factor product at indices `n, ..., -1`.
pub fn cocycle_product(
    seq: &VerblunskySequence,
    z: C64,
    n: i64,
    convention: Convention,
) -> Result<CocycleProduct> {
    check_z(z)?;
    let step = |idx: i64| -> Result<Mat2> {
        let alpha = seq.get(idx)?;
        match convention {
            Convention::A => a_matrix(alpha, z),
            Convention::M => m_matrix(alpha, z),
        }
    };
    let mut acc = CocycleProduct::identity();
    if n > 0 {
        for idx in 0..n {
            acc.absorb_left(&step(idx)?);
        }
    } else {
        for idx in (n..0).rev() {
            acc.absorb_left(&step(idx)?.inverse());
        }
    }
    Ok(acc)
}

/// Estimated Lyapunov exponent with the spread across orbit samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovEstimate {
    pub gamma: f64,
    /// Standard error over the orbit samples (zero when only one).
    pub stderr: f64,
}

/// `(1/steps) log || product over alpha(0 .. steps) ||` for one realized
/// coefficient stream.
pub fn lyapunov_scan(
    alpha_at: impl Fn(i64) -> C64,
    z: C64,
    steps: u64,
    convention: Convention,
) -> Result<f64> {
    check_z(z)?;
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be positive"));
    }
    let sqrt_z = z.sqrt();
    let inv_sqrt_z = C64::new(1.0, 0.0) / sqrt_z;
    let mut acc = CocycleProduct::identity();
    for n in 0..steps as i64 {
        let a = alpha_at(n);
        let inv_rho = 1.0 / rho_unchecked(a);
        let step = match convention {
            Convention::A => Mat2::new(z, -a.conj(), -a * z, C64::new(1.0, 0.0)).scale(inv_rho),
            Convention::M => {
                Mat2::new(sqrt_z, -a.conj() * inv_sqrt_z, -a * sqrt_z, inv_sqrt_z).scale(inv_rho)
            }
        };
        acc.absorb_left(&step);
    }
    let gamma = acc.log_norm() / steps as f64;
    if !gamma.is_finite() {
        return Err(Error::NonFiniteAccumulation);
    }
    Ok(gamma)
}

/// Lyapunov exponent estimate: Birkhoff growth rate over `steps`
/// transfer-matrix factors, averaged over `orbit_samples` independent
/// orbit starts of the system.
pub fn lyapunov_exponent(
    system: &System,
    f: &SamplingFunction,
    z: C64,
    steps: u64,
    orbit_samples: u32,
    convention: Convention,
    seed: u64,
) -> Result<LyapunovEstimate> {
    if orbit_samples == 0 {
        return Err(Error::InvalidParameter("orbit_samples must be positive"));
    }
    let mut gammas = Vec::with_capacity(orbit_samples as usize);
    for k in 0..orbit_samples {
        let orbit = realize(system, f, (0, steps as i64), mix_seed(seed, k as u64))?;
        gammas.push(lyapunov_scan(|n| orbit.alpha(n), z, steps, convention)?);
    }
    Ok(summarize(&gammas))
}

fn summarize(gammas: &[f64]) -> LyapunovEstimate {
    let k = gammas.len() as f64;
    let mean = gammas.iter().sum::<f64>() / k;
    let stderr = if gammas.len() > 1 {
        let var = gammas.iter().map(|g| (g - mean) * (g - mean)).sum::<f64>() / (k - 1.0);
        (var / k).sqrt()
    } else {
        0.0
    };
    LyapunovEstimate {
        gamma: mean,
        stderr,
    }
}

/// Deterministic per-sample seed derivation (splitmix64 round).
pub fn mix_seed(seed: u64, k: u64) -> u64 {
    let mut x = seed ^ k.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Batch of Lyapunov estimates over a grid of spectral parameters.
/// Per-point failures are recorded, not fatal.
pub fn lyapunov_grid(
    system: &System,
    f: &SamplingFunction,
    z_grid: &[C64],
    steps: u64,
    orbit_samples: u32,
    convention: Convention,
    seed: u64,
) -> Vec<(C64, Result<LyapunovEstimate>)> {
    z_grid
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            (
                z,
                lyapunov_exponent(
                    system,
                    f,
                    z,
                    steps,
                    orbit_samples,
                    convention,
                    mix_seed(seed, 0x67_69d ^ i as u64),
                ),
            )
        })
        .collect()
}

/// Closed-form circle exponent for a constant real coefficient `a`:
/// with `t = |cos(theta/2)| / rho`, the exponent is `0` when `t <= 1` and
/// `log(t + sqrt(t^2 - 1))` otherwise (eigenvalue modulus of the
/// determinant-one transfer matrix, whose trace is `2 cos(theta/2) / rho`).
pub fn constant_gamma_on_circle(a: f64, theta: f64) -> f64 {
    let rho = (1.0 - a * a).sqrt();
    let t = (theta / 2.0).cos().abs() / rho;
    if t <= 1.0 {
        0.0
    } else {
        (t + (t * t - 1.0).sqrt()).ln()
    }
}

/// Closed-form `A`-convention exponent for a constant real coefficient at
/// any `z != 0`: `log` of the larger eigenvalue modulus of
/// `[[z, -a], [-a z, 1]] / rho`.
pub fn constant_gamma_a(a: f64, z: C64) -> f64 {
    let rho = (1.0 - a * a).sqrt();
    let tr = (z + 1.0) / rho;
    let disc = (tr * tr - z * 4.0).sqrt();
    let l1 = (tr + disc) * 0.5;
    let l2 = (tr - disc) * 0.5;
    l1.norm().max(l2.norm()).ln()
}
