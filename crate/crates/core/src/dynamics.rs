//! Base dynamical systems and ergodic sampling of Verblunsky coefficients.
//!
//! Three concrete base systems are provided: primitive substitution
//! subshifts (Fibonacci being the canonical aperiodic example satisfying
//! the Boshernitzan condition), irrational rotations of the torus, and the
//! uniform Bernoulli full shift. A [`SamplingFunction`] `f` with declared
//! bound `sup |f| <= r < 1` turns an orbit into a coefficient sequence
//! `alpha_n = f(T^n omega)`; the bound keeps the Lyapunov-exponent
//! integrability condition automatic.
//!
//! Ergodic averages are approximated by Birkhoff averages along single
//! long orbits (both provided deterministic systems are uniquely ergodic),
//! and empirical cylinder frequencies stand in for the invariant measure
//! in the Boshernitzan index.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::verblunsky::VerblunskySequence;
use crate::{C64, Error, Result};

/// Golden-ratio fractional part, the default irrational rotation angle.
pub const GOLDEN_ANGLE: f64 = 0.618_033_988_749_894_9;

/// `k`-fold application of the substitution `a -> ab`, `b -> a` to `"a"`.
pub fn fibonacci_word(k: usize) -> Vec<u8> {
    let mut word = alloc::vec![b'a'];
    for _ in 0..k {
        let mut next = Vec::with_capacity(word.len() * 2);
        for &s in &word {
            match s {
                b'a' => next.extend_from_slice(b"ab"),
                _ => next.push(b'a'),
            }
        }
        word = next;
    }
    word
}

/// True iff no period `p <= p_max` matches the whole word
/// (`word[i] == word[i + p]` for all valid `i`).
///
/// Callers must supply `word.len() >= 2 * p_max` so that every tested
/// period is witnessed by at least one full repetition.
pub fn aperiodicity_check(word: &[u8], p_max: usize) -> bool {
    assert!(
        word.len() >= 2 * p_max,
        "word of length {} too short to certify periods up to {}",
        word.len(),
        p_max
    );
    'periods: for p in 1..=p_max {
        for i in 0..word.len() - p {
            if word[i] != word[i + p] {
                continue 'periods;
            }
        }
        return false;
    }
    true
}

/// Primitive substitution subshift over a byte alphabet.
#[derive(Debug, Clone)]
pub struct SubstitutionSubshift {
    alphabet: Vec<u8>,
    rules: BTreeMap<u8, Vec<u8>>,
    seed_symbol: u8,
}

impl SubstitutionSubshift {
    /// Validates primitivity (some power of the incidence matrix is
    /// entrywise positive), growth, and aperiodicity of the generated
    /// language up to period 64 (a finite certificate, not a proof).
    pub fn new(rules: &[(u8, &str)], seed_symbol: u8) -> Result<Self> {
        if rules.is_empty() {
            return Err(Error::InvalidParameter("empty substitution"));
        }
        let mut map = BTreeMap::new();
        let mut alphabet: Vec<u8> = rules.iter().map(|&(s, _)| s).collect();
        alphabet.sort_unstable();
        alphabet.dedup();
        if alphabet.len() != rules.len() {
            return Err(Error::InvalidParameter("duplicate substitution rule"));
        }
        for &(s, w) in rules {
            if w.is_empty() {
                return Err(Error::InvalidParameter("empty substitution image"));
            }
            if w.bytes().any(|b| !alphabet.contains(&b)) {
                return Err(Error::InvalidParameter("image symbol outside alphabet"));
            }
            map.insert(s, w.as_bytes().to_vec());
        }
        if !alphabet.contains(&seed_symbol) {
            return Err(Error::InvalidParameter("seed symbol outside alphabet"));
        }
        let shift = SubstitutionSubshift {
            alphabet,
            rules: map,
            seed_symbol,
        };
        if !shift.is_primitive() {
            return Err(Error::InvalidParameter("substitution not primitive"));
        }
        let probe = shift.generate(300);
        if probe.len() < 300 {
            return Err(Error::InvalidParameter("substitution does not grow"));
        }
        if !aperiodicity_check(&probe, 64) {
            return Err(Error::InvalidParameter("substitution language is periodic"));
        }
        Ok(shift)
    }

    /// The Fibonacci substitution `a -> ab`, `b -> a`.
    pub fn fibonacci() -> Self {
        Self::new(&[(b'a', "ab"), (b'b', "a")], b'a').expect("fibonacci substitution is valid")
    }

    pub fn alphabet(&self) -> &[u8] {
        &self.alphabet
    }

    fn is_primitive(&self) -> bool {
        let k = self.alphabet.len();
        let index = |s: u8| self.alphabet.iter().position(|&a| a == s).unwrap();
        // incidence[i][j] = occurrences of symbol i in the image of symbol j
        let mut m = alloc::vec![alloc::vec![0u64; k]; k];
        for (&s, image) in &self.rules {
            let j = index(s);
            for &b in image {
                m[index(b)][j] += 1;
            }
        }
        // Wielandt bound: primitive iff M^(k^2 - 2k + 2) is positive.
        let target = (k * k + 2).saturating_sub(2 * k).max(1);
        let mut p = m.clone();
        for _ in 1..target {
            let mut q = alloc::vec![alloc::vec![0u64; k]; k];
            for i in 0..k {
                for l in 0..k {
                    if p[i][l] == 0 {
                        continue;
                    }
                    for j in 0..k {
                        q[i][j] = q[i][j].saturating_add(p[i][l].saturating_mul(m[l][j]));
                    }
                }
            }
            p = q;
        }
        p.iter().all(|row| row.iter().all(|&v| v > 0))
    }

    /// Word of length at least `min_len` generated from the seed symbol,
    /// truncated to exactly `min_len`.
    pub fn generate(&self, min_len: usize) -> Vec<u8> {
        let mut word = alloc::vec![self.seed_symbol];
        for _ in 0..96 {
            if word.len() >= min_len {
                break;
            }
            let mut next = Vec::with_capacity(word.len() * 2);
            for &s in &word {
                next.extend_from_slice(&self.rules[&s]);
            }
            if next == word {
                break; // substitution fixed point shorter than requested
            }
            word = next;
        }
        word.truncate(min_len);
        word
    }
}

/// Rotation `x -> x + theta mod 1` on the torus.
#[derive(Debug, Clone, Copy)]
pub struct TorusRotation {
    angle: f64,
    /// Irrationality is asserted by the caller, not proven; the golden
    /// constructor sets it.
    pub claimed_irrational: bool,
}

impl TorusRotation {
    pub fn new(angle: f64, claimed_irrational: bool) -> Result<Self> {
        if !angle.is_finite() || !(0.0..1.0).contains(&angle) {
            return Err(Error::InvalidParameter("rotation angle outside [0,1)"));
        }
        Ok(TorusRotation {
            angle,
            claimed_irrational,
        })
    }

    /// Golden-ratio rotation, the default minimal uniquely ergodic base.
    pub fn golden() -> Self {
        TorusRotation {
            angle: GOLDEN_ANGLE,
            claimed_irrational: true,
        }
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }
}

/// Uniform Bernoulli full shift over `letters` symbols (`a`, `b`, ...).
#[derive(Debug, Clone, Copy)]
pub struct BernoulliShift {
    pub letters: usize,
}

impl BernoulliShift {
    pub fn new(letters: usize) -> Result<Self> {
        if !(2..=26).contains(&letters) {
            return Err(Error::InvalidParameter("letters must be in 2..=26"));
        }
        Ok(BernoulliShift { letters })
    }
}

/// A base transformation `(Omega, T)`.
#[derive(Debug, Clone)]
pub enum System {
    Rotation(TorusRotation),
    Subshift(SubstitutionSubshift),
    Bernoulli(BernoulliShift),
}

/// Sampling function `f : Omega -> D` with a declared bound `r < 1`.
#[derive(Debug, Clone)]
pub enum SamplingFunction {
    /// `f = c` everywhere.
    Constant(C64),
    /// Determined by the symbols at positions `-radius ..= radius`.
    LocallyConstant {
        radius: usize,
        table: BTreeMap<Vec<u8>, C64>,
    },
    /// `f(x) = modulus * e^(2 pi i x)` on the torus.
    RotationFormula { modulus: f64 },
}

impl SamplingFunction {
    pub fn constant(value: C64) -> Result<Self> {
        check_disk(value)?;
        Ok(SamplingFunction::Constant(value))
    }

    pub fn locally_constant(radius: usize, table: BTreeMap<Vec<u8>, C64>) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::InvalidParameter("empty sampling table"));
        }
        for (word, &v) in &table {
            if word.len() != 2 * radius + 1 {
                return Err(Error::InvalidParameter(
                    "table keys must have length 2 * radius + 1",
                ));
            }
            check_disk(v)?;
        }
        Ok(SamplingFunction::LocallyConstant { radius, table })
    }

    /// Radius-zero table built from `(symbol, value)` pairs.
    pub fn symbol_map(pairs: &[(u8, C64)]) -> Result<Self> {
        let table = pairs
            .iter()
            .map(|&(s, v)| (alloc::vec![s], v))
            .collect::<BTreeMap<_, _>>();
        Self::locally_constant(0, table)
    }

    pub fn rotation_formula(modulus: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&modulus) {
            return Err(Error::CoefficientOutsideDisk { modulus });
        }
        Ok(SamplingFunction::RotationFormula { modulus })
    }

    /// Declared bound `r` with `sup |f| <= r < 1`.
    pub fn bound(&self) -> f64 {
        match self {
            SamplingFunction::Constant(c) => c.norm(),
            SamplingFunction::LocallyConstant { table, .. } => {
                table.values().map(|v| v.norm()).fold(0.0, f64::max)
            }
            SamplingFunction::RotationFormula { modulus } => *modulus,
        }
    }

    fn radius(&self) -> usize {
        match self {
            SamplingFunction::LocallyConstant { radius, .. } => *radius,
            _ => 0,
        }
    }
}

fn check_disk(value: C64) -> Result<()> {
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::NonFinite);
    }
    let m = value.norm();
    if m >= 1.0 {
        return Err(Error::CoefficientOutsideDisk { modulus: m });
    }
    Ok(())
}

enum OrbitKind {
    Angle { x0: f64, theta: f64 },
    /// `symbols[(origin + n) as usize]` is the symbol at time `n`.
    Word { symbols: Vec<u8>, origin: i64 },
}

impl core::fmt::Debug for OrbitKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            OrbitKind::Angle { x0, theta } => {
                write!(f, "Angle {{ x0: {x0}, theta: {theta} }}")
            }
            OrbitKind::Word { symbols, origin } => {
                write!(f, "Word {{ len: {}, origin: {origin} }}", symbols.len())
            }
        }
    }
}

/// A realized orbit `omega, T omega, T^2 omega, ...` paired with a sampling
/// function, yielding coefficients `alpha(n) = f(T^n omega)` for every `n`
/// in the realized span. Construction validates the sampling function
/// against the system and the span, so `alpha` itself cannot fail.
#[derive(Debug)]
pub struct Orbit {
    kind: OrbitKind,
    f: SamplingFunction,
    span: (i64, i64),
}

impl Orbit {
    /// Indices `n` for which `alpha(n)` is defined.
    pub fn span(&self) -> (i64, i64) {
        self.span
    }

    #[inline]
    pub fn alpha(&self, n: i64) -> C64 {
        debug_assert!(
            n >= self.span.0 && n <= self.span.1,
            "orbit index {n} out of span"
        );
        match (&self.kind, &self.f) {
            (OrbitKind::Angle { .. }, SamplingFunction::Constant(c)) => *c,
            (OrbitKind::Angle { x0, theta }, SamplingFunction::RotationFormula { modulus }) => {
                let x = (x0 + n as f64 * theta).fract();
                let arg = 2.0 * core::f64::consts::PI * x;
                C64::from_polar(*modulus, arg)
            }
            (OrbitKind::Word { .. }, SamplingFunction::Constant(c)) => *c,
            (
                OrbitKind::Word { symbols, origin },
                SamplingFunction::LocallyConstant { radius, table },
            ) => {
                let center = (origin + n) as usize;
                let window = &symbols[center - radius..=center + radius];
                table[window]
            }
            _ => unreachable!("validated at construction"),
        }
    }

    /// The orbit advanced by `k` steps (the point `T^k omega`), sharing the
    /// realized trajectory; the usable span shrinks accordingly.
    pub fn advanced(&self, k: i64) -> Orbit {
        let kind = match &self.kind {
            OrbitKind::Angle { x0, theta } => OrbitKind::Angle {
                x0: (x0 + k as f64 * theta).rem_euclid(1.0),
                theta: *theta,
            },
            OrbitKind::Word { symbols, origin } => OrbitKind::Word {
                symbols: symbols.clone(),
                origin: origin + k,
            },
        };
        Orbit {
            kind,
            f: self.f.clone(),
            span: (self.span.0 - k, self.span.1 - k),
        }
    }

    /// `alpha_n = f(T^n omega)` over `window`, as a sequence.
    pub fn sequence(&self, window: (i64, i64)) -> Result<VerblunskySequence> {
        if window.0 > window.1 {
            return Err(Error::InvalidParameter("empty window"));
        }
        if window.0 < self.span.0 || window.1 > self.span.1 {
            return Err(Error::WindowOutsideSupport);
        }
        let mut values = Vec::with_capacity((window.1 - window.0 + 1) as usize);
        for n in window.0..=window.1 {
            let a = self.alpha(n);
            let m = a.norm();
            if m >= 1.0 {
                return Err(Error::SamplingOutsideDisk { index: n, modulus: m });
            }
            values.push(a);
        }
        VerblunskySequence::from_values(window.0, &values)
    }
}

/// Realize an orbit of `system` under `f` over (at least) `span`. The
/// initial point is drawn deterministically from `seed`; for symbolic
/// systems the underlying word is generated with enough margin for the
/// sampling radius.
pub fn realize(system: &System, f: &SamplingFunction, span: (i64, i64), seed: u64) -> Result<Orbit> {
    if span.0 > span.1 {
        return Err(Error::InvalidParameter("empty span"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = f.radius() as i64;
    let len = (span.1 - span.0 + 1) as usize;
    let kind = match (system, f) {
        (System::Rotation(rot), SamplingFunction::Constant(_))
        | (System::Rotation(rot), SamplingFunction::RotationFormula { .. }) => OrbitKind::Angle {
            x0: rng.gen::<f64>(),
            theta: rot.angle(),
        },
        (System::Subshift(sub), SamplingFunction::Constant(_))
        | (System::Subshift(sub), SamplingFunction::LocallyConstant { .. }) => {
            // Slack gives distinct seeds genuinely different orbit points.
            let slack = rng.gen_range(0..1024i64);
            let total = len as i64 + 2 * radius + slack + 1;
            let symbols = sub.generate(total as usize);
            if (symbols.len() as i64) < total {
                return Err(Error::InvalidParameter("substitution word too short"));
            }
            OrbitKind::Word {
                symbols,
                origin: radius + slack - span.0,
            }
        }
        (System::Bernoulli(bern), SamplingFunction::Constant(_))
        | (System::Bernoulli(bern), SamplingFunction::LocallyConstant { .. }) => {
            let total = len + 2 * radius as usize + 1;
            let symbols: Vec<u8> = (0..total)
                .map(|_| b'a' + rng.gen_range(0..bern.letters) as u8)
                .collect();
            OrbitKind::Word {
                symbols,
                origin: radius - span.0,
            }
        }
        _ => return Err(Error::SamplingIncompatible),
    };
    let orbit = Orbit {
        kind,
        f: f.clone(),
        span,
    };
    // One validation pass so alpha() is infallible afterwards.
    if let (
        OrbitKind::Word { symbols, origin },
        SamplingFunction::LocallyConstant { radius, table },
    ) = (&orbit.kind, &orbit.f)
    {
        for n in span.0..=span.1 {
            let center = (origin + n) as usize;
            let window = &symbols[center - radius..=center + radius];
            if !table.contains_key(window) {
                return Err(Error::SamplingIncompatible);
            }
        }
    }
    Ok(orbit)
}

/// `alpha_n = f(T^n omega)` over `window` for a fresh orbit of `system`.
pub fn orbit_sample(
    system: &System,
    f: &SamplingFunction,
    window: (i64, i64),
    seed: u64,
) -> Result<VerblunskySequence> {
    realize(system, f, window, seed)?.sequence(window)
}

/// Empirical frequencies of all length-`n` factors of `word`.
pub fn word_factor_frequencies(word: &[u8], n: usize) -> Result<BTreeMap<Vec<u8>, f64>> {
    if n == 0 || n > word.len() {
        return Err(Error::InvalidParameter("factor length outside word"));
    }
    let total = word.len() - n + 1;
    let mut counts: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
    for i in 0..total {
        *counts.entry(word[i..i + n].to_vec()).or_insert(0) += 1;
    }
    Ok(counts
        .into_iter()
        .map(|(w, c)| (w, c as f64 / total as f64))
        .collect())
}

/// Frequencies of length-`n` factors in a length-`sample_len` word
/// generated by the subshift.
pub fn cylinder_frequencies(
    subshift: &SubstitutionSubshift,
    n: usize,
    sample_len: usize,
) -> Result<BTreeMap<Vec<u8>, f64>> {
    if n > sample_len {
        return Err(Error::InvalidParameter("factor length exceeds sample"));
    }
    let word = subshift.generate(sample_len);
    word_factor_frequencies(&word, n)
}

/// `n * min_w freq(w)` over observed length-`n` factors; a subshift
/// satisfies the Boshernitzan condition when the limsup over `n` of this
/// index (with the true invariant measure) is positive.
pub fn boshernitzan_index(
    subshift: &SubstitutionSubshift,
    n: usize,
    sample_len: usize,
) -> Result<f64> {
    let freqs = cylinder_frequencies(subshift, n, sample_len)?;
    let min = freqs.values().copied().fold(f64::INFINITY, f64::min);
    if !min.is_finite() {
        return Err(Error::EmptySet);
    }
    Ok(n as f64 * min)
}

/// Same index computed from an explicit word (full-shift comparisons).
pub fn boshernitzan_index_of_word(word: &[u8], n: usize) -> Result<f64> {
    let freqs = word_factor_frequencies(word, n)?;
    let min = freqs.values().copied().fold(f64::INFINITY, f64::min);
    Ok(n as f64 * min)
}

/// Render a word as a UTF-8 symbol string (plain-text export format).
pub fn word_to_string(word: &[u8]) -> String {
    word.iter().map(|&b| b as char).collect()
}
