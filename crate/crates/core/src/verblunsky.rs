//! Verblunsky coefficient sequences and CMV matrix assembly.
//!
//! A coefficient sequence `{alpha_n}` in the open unit disk determines the
//! extended CMV matrix via the factorization `E = L M`, where `L` carries
//! the 2x2 unitary blocks
//!
//! ```text
//!   Theta_j = [ conj(alpha_j)   rho_j      ]
//!             [ rho_j          -alpha_j    ],   rho_j = sqrt(1 - |alpha_j|^2),
//! ```
//!
//! on coordinate pairs `(j, j+1)` for even `j`, and `M` carries them for
//! odd `j`. A finite window `[n0, n1]` decouples from the rest exactly when
//! the two cut coefficients `alpha_{n0-1}` and `alpha_{n1}` have modulus
//! one (their `rho` vanishes), in which case the window block is unitary.
//! The standard (half-line) CMV matrix is the window `[0, N-1]` with the
//! left cut fixed at `alpha_{-1} = -1`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::band::Band;
use crate::mat2::Mat2;
use crate::{C64, Error, Result};

/// A single Verblunsky coefficient: finite, strictly inside the unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficient(C64);

impl Coefficient {
    pub fn new(value: C64) -> Result<Self> {
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::NonFinite);
        }
        let m = value.norm();
        if m >= 1.0 {
            return Err(Error::CoefficientOutsideDisk { modulus: m });
        }
        Ok(Coefficient(value))
    }

    pub fn value(&self) -> C64 {
        self.0
    }

    /// `rho = (1 - |alpha|^2)^(1/2)`, in `(0, 1]`.
    pub fn rho(&self) -> f64 {
        rho_unchecked(self.0)
    }
}

/// `rho(alpha) = (1 - |alpha|^2)^(1/2)` with domain validation.
pub fn rho(alpha: C64) -> Result<f64> {
    Coefficient::new(alpha).map(|a| a.rho())
}

#[inline]
pub(crate) fn rho_unchecked(alpha: C64) -> f64 {
    // Clamp guards modulus-one boundary values where roundoff could leave
    // 1 - |alpha|^2 at -1e-16.
    (1.0 - alpha.norm_sqr()).max(0.0).sqrt()
}

/// The 2x2 unitary block `[[conj(alpha), rho], [rho, -alpha]]`.
pub fn theta_block(alpha: Coefficient) -> Mat2 {
    let a = alpha.value();
    let r = alpha.rho();
    Mat2::new(a.conj(), C64::new(r, 0.0), C64::new(r, 0.0), -a)
}

/// Coefficients indexed over an integer window `[start, start + len - 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct VerblunskySequence {
    start: i64,
    coeffs: Vec<Coefficient>,
}

impl VerblunskySequence {
    pub fn new(start: i64, coeffs: Vec<Coefficient>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(VerblunskySequence { start, coeffs })
    }

    pub fn from_values(start: i64, values: &[C64]) -> Result<Self> {
        let coeffs = values
            .iter()
            .map(|&v| Coefficient::new(v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(start, coeffs)
    }

    pub fn constant(value: C64, start: i64, end: i64) -> Result<Self> {
        let a = Coefficient::new(value)?;
        let len = (end - start + 1).max(0) as usize;
        if len == 0 {
            return Err(Error::EmptySet);
        }
        Self::new(start, alloc::vec![a; len])
    }

    /// Inclusive index window `(n0, n1)`.
    pub fn window(&self) -> (i64, i64) {
        (self.start, self.start + self.coeffs.len() as i64 - 1)
    }

    pub fn get(&self, n: i64) -> Result<Coefficient> {
        let (lo, hi) = self.window();
        if n < lo || n > hi {
            return Err(Error::OutOfSupport { index: n });
        }
        Ok(self.coeffs[(n - lo) as usize])
    }

    pub fn values(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, c)| (self.start + i as i64, c.value()))
    }

    /// Reindexed copy: `shifted(k).get(n) == self.get(n + k)`.
    pub fn shifted(&self, k: i64) -> VerblunskySequence {
        VerblunskySequence {
            start: self.start - k,
            coeffs: self.coeffs.clone(),
        }
    }

    /// Sup-norm distance on the common window (full window assumed equal).
    pub fn sup_distance(&self, other: &VerblunskySequence) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a.value() - b.value()).norm())
            .fold(0.0, f64::max)
    }

    /// CSV with mandatory header `index,re_alpha,im_alpha`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,re_alpha,im_alpha\n");
        for (n, v) in self.values() {
            out.push_str(&format!("{},{:.17e},{:.17e}\n", n, v.re, v.im));
        }
        out
    }

    /// Parse the CSV format produced by [`Self::to_csv`]. Indices must be
    /// contiguous and ascending.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == "index,re_alpha,im_alpha" => {}
            Some((_, h)) => {
                return Err(Error::Csv {
                    line: 1,
                    message: format!("expected header 'index,re_alpha,im_alpha', got '{h}'"),
                })
            }
            None => {
                return Err(Error::Csv {
                    line: 1,
                    message: "empty input".to_string(),
                })
            }
        }
        let mut start = None;
        let mut expect = 0i64;
        let mut coeffs = Vec::new();
        for (i, line) in lines {
            let lineno = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let parse = |s: Option<&str>, what: &str| -> Result<f64> {
                s.ok_or(Error::Csv {
                    line: lineno,
                    message: format!("missing {what}"),
                })?
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Csv {
                    line: lineno,
                    message: format!("unparseable {what}"),
                })
            };
            let idx = fields
                .next()
                .ok_or(Error::Csv {
                    line: lineno,
                    message: "missing index".to_string(),
                })?
                .trim()
                .parse::<i64>()
                .map_err(|_| Error::Csv {
                    line: lineno,
                    message: "unparseable index".to_string(),
                })?;
            let re = parse(fields.next(), "re_alpha")?;
            let im = parse(fields.next(), "im_alpha")?;
            if start.is_none() {
                start = Some(idx);
                expect = idx;
            }
            if idx != expect {
                return Err(Error::Csv {
                    line: lineno,
                    message: format!("non-contiguous index {idx}, expected {expect}"),
                });
            }
            expect += 1;
            coeffs.push(Coefficient::new(C64::new(re, im)).map_err(|e| Error::Csv {
                line: lineno,
                message: e.to_string(),
            })?);
        }
        Self::new(start.ok_or(Error::EmptySet)?, coeffs)
    }
}

/// Optional modulus-one decoupling coefficients for the two window cuts.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Boundary {
    pub left: Option<C64>,
    pub right: Option<C64>,
}

impl Boundary {
    /// Decouple both cuts with the same value (default choice is `1`).
    pub fn both(value: C64) -> Self {
        Boundary {
            left: Some(value),
            right: Some(value),
        }
    }

    fn validated(side: Option<C64>) -> Result<Option<C64>> {
        match side {
            None => Ok(None),
            Some(b) => {
                let m = b.norm();
                if !m.is_finite() || (m - 1.0).abs() > 1e-9 {
                    return Err(Error::BoundaryNotUnimodular { modulus: m });
                }
                // Renormalize so rho vanishes exactly.
                Ok(Some(b / m))
            }
        }
    }
}

/// Finite window of a (standard or extended) CMV matrix: pentadiagonal
/// entries plus the bond coefficients that generated them.
#[derive(Debug, Clone)]
pub struct BandedUnitaryWindow {
    start: i64,
    /// Bond coefficients `alpha_{start-1}, ..., alpha_{start+n-1}` (cuts
    /// possibly replaced by modulus-one boundary values).
    bonds: Vec<C64>,
    boundary: Boundary,
    band: Band,
}

impl BandedUnitaryWindow {
    pub fn size(&self) -> usize {
        self.band.n()
    }

    /// Global index of the first row/column.
    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Entry by global indices.
    pub fn entry_global(&self, r: i64, c: i64) -> C64 {
        let n = self.band.n() as i64;
        if r < self.start || c < self.start || r >= self.start + n || c >= self.start + n {
            return C64::new(0.0, 0.0);
        }
        self.band.entry((r - self.start) as usize, (c - self.start) as usize)
    }

    /// Entry by local indices (`0..n`).
    pub fn entry(&self, r: usize, c: usize) -> C64 {
        self.band.entry(r, c)
    }

    pub fn band(&self) -> &Band {
        &self.band
    }

    /// Bond coefficient on the cut `(start - 1 + k, start + k)`, `k = 0..=n`.
    pub fn bond(&self, k: usize) -> C64 {
        self.bonds[k]
    }

    /// True when both cuts carry modulus-one values, i.e. the window is an
    /// exactly decoupled (unitary) block.
    pub fn is_decoupled(&self) -> bool {
        self.boundary.left.is_some() && self.boundary.right.is_some()
    }

    /// Max-norm of `E^* E - I`.
    pub fn unitarity_defect(&self) -> f64 {
        self.band.unitarity_defect()
    }

    /// The two block-diagonal factors `(L, M)` with `E = L M`, materialized
    /// as banded matrices (independent construction used for cross-checks).
    pub fn factors(&self) -> (Band, Band) {
        let n = self.band.n();
        let mut l = Band::zeros(n, 1, 1);
        let mut m = Band::zeros(n, 1, 1);
        for (k, &alpha) in self.bonds.iter().enumerate() {
            let j = self.start - 1 + k as i64; // global bond index
            let target = if j.rem_euclid(2) == 0 { &mut l } else { &mut m };
            let r = rho_unchecked(alpha);
            let lo = k as i64 - 1; // local row of the bond's first coordinate
            if lo >= 0 && (lo as usize) < n && lo as usize + 1 < n {
                let i = lo as usize;
                target.set(i, i, alpha.conj());
                target.set(i, i + 1, C64::new(r, 0.0));
                target.set(i + 1, i, C64::new(r, 0.0));
                target.set(i + 1, i + 1, -alpha);
            } else if lo == -1 {
                // Left cut: only the second coordinate survives.
                target.set(0, 0, -alpha);
            } else if lo as usize == n - 1 {
                // Right cut: only the first coordinate survives.
                target.set(n - 1, n - 1, alpha.conj());
            }
        }
        // Rows not covered by any bond of a factor keep an identity entry.
        for i in 0..n {
            if l.entry(i, i) == C64::new(0.0, 0.0)
                && (i == 0 || l.entry(i, i - 1) == C64::new(0.0, 0.0))
                && (i + 1 == n || l.entry(i, i + 1) == C64::new(0.0, 0.0))
            {
                l.set(i, i, C64::new(1.0, 0.0));
            }
            if m.entry(i, i) == C64::new(0.0, 0.0)
                && (i == 0 || m.entry(i, i - 1) == C64::new(0.0, 0.0))
                && (i + 1 == n || m.entry(i, i + 1) == C64::new(0.0, 0.0))
            {
                m.set(i, i, C64::new(1.0, 0.0));
            }
        }
        (l, m)
    }
}

/// Assemble the window `[n0, n1]` of the extended CMV matrix of `seq`.
///
/// Boundary values (modulus one) replace the cut coefficients
/// `alpha_{n0-1}` / `alpha_{n1}`; where no boundary is supplied the actual
/// sequence values are used, so the result is the exact submatrix of the
/// infinite matrix (and `seq` must cover the padded range).
pub fn assemble_extended(
    seq: &VerblunskySequence,
    window: (i64, i64),
    boundary: Boundary,
) -> Result<BandedUnitaryWindow> {
    let (n0, n1) = window;
    if n1 < n0 {
        return Err(Error::InvalidParameter("empty window"));
    }
    let left = Boundary::validated(boundary.left)?;
    let right = Boundary::validated(boundary.right)?;
    let n = (n1 - n0 + 1) as usize;
    let mut bonds = Vec::with_capacity(n + 1);
    for j in (n0 - 1)..=n1 {
        if j == n0 - 1 {
            if let Some(b) = left {
                bonds.push(b);
                continue;
            }
        }
        if j == n1 {
            if let Some(b) = right {
                bonds.push(b);
                continue;
            }
        }
        let c = seq.get(j).map_err(|_| Error::WindowOutsideSupport)?;
        bonds.push(c.value());
    }
    let band = entries_from_bonds(n0, &bonds);
    Ok(BandedUnitaryWindow {
        start: n0,
        bonds,
        boundary: Boundary { left, right },
        band,
    })
}

/// Assemble the size-`N` standard CMV matrix from a one-sided sequence
/// (`alpha_0, ..., alpha_{N-2}` are used). The left cut is fixed at
/// `alpha_{-1} = -1`, which reproduces the half-line matrix exactly; a
/// modulus-one `boundary` on the right makes the window unitary.
pub fn assemble_standard(
    seq: &VerblunskySequence,
    size: usize,
    boundary: Option<C64>,
) -> Result<BandedUnitaryWindow> {
    if size == 0 {
        return Err(Error::InvalidParameter("empty window"));
    }
    let (lo, _) = seq.window();
    if lo > 0 {
        return Err(Error::WindowOutsideSupport);
    }
    assemble_extended(
        seq,
        (0, size as i64 - 1),
        Boundary {
            left: Some(C64::new(-1.0, 0.0)),
            right: boundary,
        },
    )
}

/// Pentadiagonal entries of the window from its bond coefficients, using
/// the closed-form row patterns (even rows `[conj(a_r) rho_{r-1},
/// -conj(a_r) a_{r-1}, rho_r conj(a_{r+1}), rho_r rho_{r+1}]`, odd rows
/// `[rho_{r-1} rho_{r-2}, -rho_{r-1} a_{r-2}, -a_{r-1} conj(a_r),
/// -a_{r-1} rho_r]`).
fn entries_from_bonds(start: i64, bonds: &[C64]) -> Band {
    let n = bonds.len() - 1;
    let mut band = Band::zeros(n, 2, 2);
    // bond k (local) carries alpha_{start - 1 + k}; alpha(g) for global g:
    let alpha = |g: i64| -> C64 { bonds[(g - (start - 1)) as usize] };
    let rho = |g: i64| -> f64 { rho_unchecked(alpha(g)) };
    for i in 0..n {
        let r = start + i as i64; // global row
        let even = r.rem_euclid(2) == 0;
        // Guard the column before evaluating: edge rows would otherwise
        // reference bonds beyond the window for entries that are cut off.
        let inside = |cg: i64| cg >= start && cg < start + n as i64;
        let mut put = |cg: i64, v: C64| band.set(i, (cg - start) as usize, v);
        if even {
            if inside(r - 1) {
                put(r - 1, alpha(r).conj() * rho(r - 1));
            }
            put(r, -alpha(r).conj() * alpha(r - 1));
            if inside(r + 1) {
                put(r + 1, alpha(r + 1).conj() * rho(r));
            }
            if inside(r + 2) {
                put(r + 2, C64::new(rho(r) * rho(r + 1), 0.0));
            }
        } else {
            if inside(r - 2) {
                put(r - 2, C64::new(rho(r - 1) * rho(r - 2), 0.0));
            }
            if inside(r - 1) {
                put(r - 1, -alpha(r - 2) * rho(r - 1));
            }
            put(r, -alpha(r - 1) * alpha(r).conj());
            if inside(r + 1) {
                put(r + 1, -alpha(r - 1) * rho(r));
            }
        }
    }
    band
}
