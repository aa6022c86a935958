//! Banded complex matrices: storage, products, unitarity defects, and a
//! pivoted LU solver for shifted systems (inverse iteration).

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::C64;

/// Row-major banded matrix with `kl` sub- and `ku` super-diagonals.
/// Entries outside the band are exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<C64>,
}

impl Band {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Band {
            n,
            kl,
            ku,
            data: vec![C64::new(0.0, 0.0); n * (kl + ku + 1)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kl(&self) -> usize {
        self.kl
    }

    pub fn ku(&self) -> usize {
        self.ku
    }

    #[inline]
    fn slot(&self, r: usize, c: usize) -> Option<usize> {
        let width = self.kl + self.ku + 1;
        if r >= self.n || c >= self.n {
            return None;
        }
        let lo = r.saturating_sub(self.kl);
        if c < lo || c > r + self.ku {
            return None;
        }
        Some(r * width + (c + self.kl - r))
    }

    #[inline]
    pub fn entry(&self, r: usize, c: usize) -> C64 {
        match self.slot(r, c) {
            Some(i) => self.data[i],
            None => C64::new(0.0, 0.0),
        }
    }

    /// Panics if `(r, c)` lies outside the band.
    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        let i = self.slot(r, c).expect("entry outside band");
        self.data[i] = v;
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![C64::new(0.0, 0.0); self.n];
        for r in 0..self.n {
            let lo = r.saturating_sub(self.kl);
            let hi = (r + self.ku).min(self.n - 1);
            let mut acc = C64::new(0.0, 0.0);
            for c in lo..=hi {
                acc += self.entry(r, c) * x[c];
            }
            y[r] = acc;
        }
        y
    }

    /// `A^* x` without materializing the adjoint.
    pub fn adjoint_mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![C64::new(0.0, 0.0); self.n];
        for r in 0..self.n {
            let lo = r.saturating_sub(self.kl);
            let hi = (r + self.ku).min(self.n - 1);
            for c in lo..=hi {
                y[c] += self.entry(r, c).conj() * x[r];
            }
        }
        y
    }

    /// Banded product; result bandwidths add.
    pub fn mul(&self, rhs: &Band) -> Band {
        assert_eq!(self.n, rhs.n);
        let mut out = Band::zeros(self.n, self.kl + rhs.kl, self.ku + rhs.ku);
        for r in 0..self.n {
            let clo = r.saturating_sub(out.kl);
            let chi = (r + out.ku).min(self.n - 1);
            for c in clo..=chi {
                let klo = r.saturating_sub(self.kl).max(c.saturating_sub(rhs.ku));
                let khi = (r + self.ku).min(c + rhs.kl).min(self.n - 1);
                let mut acc = C64::new(0.0, 0.0);
                for k in klo..=khi {
                    acc += self.entry(r, k) * rhs.entry(k, c);
                }
                let i = out.slot(r, c).expect("product slot");
                out.data[i] = acc;
            }
        }
        out
    }

    /// Max-norm of `A^* A - I`. Entries outside the band of the product are
    /// identically zero, so scanning `|i - j| <= kl + ku` is exhaustive.
    pub fn unitarity_defect(&self) -> f64 {
        let bw = self.kl + self.ku;
        let mut worst = 0.0f64;
        for i in 0..self.n {
            let jlo = i.saturating_sub(bw);
            let jhi = (i + bw).min(self.n - 1);
            for j in jlo..=jhi {
                // (A^* A)[i, j] = sum_k conj(A[k, i]) A[k, j]
                let klo = i.saturating_sub(self.ku).max(j.saturating_sub(self.ku));
                let khi = (i + self.kl).min(j + self.kl).min(self.n - 1);
                let mut acc = C64::new(0.0, 0.0);
                for k in klo..=khi {
                    acc += self.entry(k, i).conj() * self.entry(k, j);
                }
                if i == j {
                    acc -= 1.0;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, rhs: &Band) -> f64 {
        assert_eq!(self.n, rhs.n);
        let bw = self.kl.max(rhs.kl);
        let bu = self.ku.max(rhs.ku);
        let mut worst = 0.0f64;
        for r in 0..self.n {
            let lo = r.saturating_sub(bw);
            let hi = (r + bu).min(self.n - 1);
            for c in lo..=hi {
                worst = worst.max((self.entry(r, c) - rhs.entry(r, c)).norm());
            }
        }
        worst
    }

    /// Trace of `A^m` via repeated banded products (test oracle; cheap for
    /// small `m`).
    pub fn trace_power(&self, m: usize) -> C64 {
        assert!(m >= 1);
        let mut p = self.clone();
        for _ in 1..m {
            p = p.mul(self);
        }
        (0..self.n).map(|i| p.entry(i, i)).sum()
    }

    /// Dense copy for small-window cross-checks.
    pub fn to_dense(&self) -> Vec<Vec<C64>> {
        let mut out = vec![vec![C64::new(0.0, 0.0); self.n]; self.n];
        for (r, row) in out.iter_mut().enumerate() {
            let lo = r.saturating_sub(self.kl);
            let hi = (r + self.ku).min(self.n - 1);
            for c in lo..=hi {
                row[c] = self.entry(r, c);
            }
        }
        out
    }

    /// LU factorization of `A - shift I` with partial pivoting, in LAPACK
    /// band layout (upper bandwidth grows to `kl + ku` from row swaps).
    pub fn shifted_lu(&self, shift: C64) -> BandLu {
        let n = self.n;
        let kl = self.kl;
        let kue = self.kl + self.ku; // fill-extended upper bandwidth
        let ldab = 2 * kl + self.ku + 1;
        let mut ab = vec![C64::new(0.0, 0.0); n * ldab];
        let idx = |r: usize, c: usize| -> usize { c * ldab + (r + kue - c) };
        let mut scale = shift.norm();
        for c in 0..n {
            let rlo = c.saturating_sub(self.ku);
            let rhi = (c + kl).min(n - 1);
            for r in rlo..=rhi {
                let mut v = self.entry(r, c);
                if r == c {
                    v -= shift;
                }
                scale = scale.max(v.norm());
                ab[idx(r, c)] = v;
            }
        }
        // Exactly singular pivots (inverse iteration at an exact
        // eigenvalue) are replaced by a scaled floor small enough to blow
        // up the solve but large enough not to overflow the norm.
        let pivot_floor = (scale * 1e-30).max(f64::MIN_POSITIVE.sqrt());
        let mut piv = vec![0usize; n];
        for j in 0..n {
            let rhi = (j + kl).min(n - 1);
            let mut best = j;
            let mut best_abs = ab[idx(j, j)].norm();
            for r in (j + 1)..=rhi {
                let a = ab[idx(r, j)].norm();
                if a > best_abs {
                    best_abs = a;
                    best = r;
                }
            }
            piv[j] = best;
            let chi = (j + kue).min(n - 1);
            if best != j {
                for c in j..=chi {
                    ab.swap(idx(j, c), idx(best, c));
                }
            }
            let mut pivot = ab[idx(j, j)];
            if pivot.norm() < pivot_floor {
                pivot = C64::new(pivot_floor, 0.0);
                ab[idx(j, j)] = pivot;
            }
            for r in (j + 1)..=rhi {
                let m = ab[idx(r, j)] / pivot;
                ab[idx(r, j)] = m;
                for c in (j + 1)..=chi {
                    let u = ab[idx(j, c)];
                    if u.norm_sqr() != 0.0 {
                        ab[idx(r, c)] -= m * u;
                    }
                }
            }
        }
        BandLu {
            n,
            kl,
            kue,
            ldab,
            ab,
            piv,
        }
    }
}

/// Pivoted LU factors of a (shifted) banded matrix.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    kue: usize,
    ldab: usize,
    ab: Vec<C64>,
    piv: Vec<usize>,
}

impl BandLu {
    #[inline]
    fn at(&self, r: usize, c: usize) -> C64 {
        self.ab[c * self.ldab + (r + self.kue - c)]
    }

    /// Solve `(A - shift I) x = b` in place.
    pub fn solve(&self, b: &mut [C64]) {
        assert_eq!(b.len(), self.n);
        for j in 0..self.n {
            let p = self.piv[j];
            if p != j {
                b.swap(j, p);
            }
            let rhi = (j + self.kl).min(self.n - 1);
            let bj = b[j];
            for r in (j + 1)..=rhi {
                let m = self.at(r, j);
                b[r] -= m * bj;
            }
        }
        for j in (0..self.n).rev() {
            let chi = (j + self.kue).min(self.n - 1);
            let mut acc = b[j];
            for c in (j + 1)..=chi {
                acc -= self.at(j, c) * b[c];
            }
            b[j] = acc / self.at(j, j);
        }
    }
}

/// Euclidean norm.
pub fn vec_norm(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalize(x: &mut [C64]) {
    let nrm = vec_norm(x);
    if nrm > 0.0 {
        for v in x.iter_mut() {
            *v /= nrm;
        }
    }
}

/// Residual `||A v - z v||_2` of the approximate eigenpair obtained by two
/// steps of inverse iteration at the shift `z`. Deterministic start vector.
pub fn inverse_iteration_residual(a: &Band, z: C64) -> f64 {
    let n = a.n();
    let lu = a.shifted_lu(z);
    // Deterministic pseudo-random start (splitmix64 stream).
    let mut state = 0x9e3779b97f4a7c15u64 ^ (n as u64);
    let mut next = move || {
        state = state.wrapping_add(0x9e3779b97f4a7c15);
        let mut x = state;
        x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
        x ^= x >> 31;
        (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut v: Vec<C64> = (0..n).map(|_| C64::new(next(), next())).collect();
    normalize(&mut v);
    for _ in 0..2 {
        lu.solve(&mut v);
        normalize(&mut v);
    }
    let av = a.mul_vec(&v);
    let mut worst = 0.0f64;
    let mut acc = 0.0f64;
    for i in 0..n {
        let r = av[i] - z * v[i];
        acc += r.norm_sqr();
        worst = worst.max(r.norm());
    }
    let _ = worst;
    acc.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_band(n: usize, kl: usize, ku: usize, seed: u64) -> Band {
        let mut b = Band::zeros(n, kl, ku);
        let mut s = seed;
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for r in 0..n {
            let lo = r.saturating_sub(kl);
            let hi = (r + ku).min(n - 1);
            for col in lo..=hi {
                b.set(r, col, c(next(), next()));
            }
        }
        b
    }

    fn dense_mul_vec(a: &[Vec<C64>], x: &[C64]) -> Vec<C64> {
        a.iter()
            .map(|row| row.iter().zip(x).map(|(m, v)| m * v).sum())
            .collect()
    }

    #[test]
    fn band_product_matches_dense() {
        let a = random_band(12, 2, 1, 7);
        let b = random_band(12, 1, 2, 99);
        let p = a.mul(&b);
        let (da, db, dp) = (a.to_dense(), b.to_dense(), p.to_dense());
        for i in 0..12 {
            for j in 0..12 {
                let mut acc = c(0.0, 0.0);
                for k in 0..12 {
                    acc += da[i][k] * db[k][j];
                }
                assert!((acc - dp[i][j]).norm() < 1e-14, "mismatch at ({i},{j})");
            }
        }
    }

    #[test]
    fn adjoint_mul_vec_matches_dense() {
        let a = random_band(15, 2, 2, 3);
        let x: Vec<C64> = (0..15).map(|i| c(i as f64 * 0.1 - 0.7, 0.3)).collect();
        let y = a.adjoint_mul_vec(&x);
        let d = a.to_dense();
        for j in 0..15 {
            let mut acc = c(0.0, 0.0);
            for i in 0..15 {
                acc += d[i][j].conj() * x[i];
            }
            assert!((acc - y[j]).norm() < 1e-13);
        }
    }

    #[test]
    fn lu_solves_shifted_system() {
        let a = random_band(40, 2, 2, 12345);
        let z = c(0.3, -0.2);
        let lu = a.shifted_lu(z);
        let x_true: Vec<C64> = (0..40).map(|i| c((i as f64).sin(), (i as f64).cos())).collect();
        // b = (A - zI) x
        let mut b = a.mul_vec(&x_true);
        for i in 0..40 {
            b[i] -= z * x_true[i];
        }
        lu.solve(&mut b);
        for i in 0..40 {
            assert!(
                (b[i] - x_true[i]).norm() < 1e-9,
                "solve mismatch at {i}: {:?} vs {:?}",
                b[i],
                x_true[i]
            );
        }
    }

    #[test]
    fn identity_has_zero_defect() {
        let mut a = Band::zeros(30, 2, 2, );
        for i in 0..30 {
            a.set(i, i, c(1.0, 0.0));
        }
        assert!(a.unitarity_defect() < 1e-15);
    }
}
