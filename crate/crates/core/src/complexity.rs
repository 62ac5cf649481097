//! Lempel-Ziv (1976) complexity and the scaled Kolmogorov estimate.
//!
//! `N_w` is the phrase count of the exhaustive-history parsing. `C_LZ`
//! averages it over both reading directions and scales by `log2(n)`, with the
//! constant strings `0^n` and `1^n` pinned to `log2(n)`. `K~` maps `C_LZ`
//! linearly onto `[0, log2 M]` using the minimum and maximum of `C_LZ` over a
//! reference universe of strings, see [`ComplexityScale`].

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map_engine::RngStream;
use crate::symbolizer::SymbolString;

/// Default size of the random reference corpus.
pub const DEFAULT_CORPUS_SIZE: u64 = 1_000_000;
/// Default seed of the random reference corpus.
pub const DEFAULT_CORPUS_SEED: u64 = 0x5EED_C0DE_2B1A_5000;
/// Largest `n` for which [`MaxMethod::Exhaustive`] is accepted.
pub const MAX_EXHAUSTIVE_LEN: usize = 28;

const CORPUS_SHARD: u64 = 1 << 16;

/// Number of phrases in the LZ76 exhaustive-history parsing of `s`.
///
/// Each phrase is the shortest prefix of the unparsed remainder that does not
/// occur in the history ending one symbol before the phrase ends. A trailing
/// fragment that is still reproducible counts as one phrase.
pub fn lz76_phrase_count(s: &SymbolString) -> usize {
    let n = s.len();
    // bit p of `ones` is symbol p
    let ones = s.reversed().bits();
    let zeros = !ones & low_mask(n);
    let by_symbol = [zeros, ones];
    let sym = |p: usize| ((ones >> p) & 1) as usize;

    let mut phrases = 0;
    let mut i = 0;
    while i < n {
        // candidate start positions j < i whose copy still matches s[i..i+l]
        let mut cand = by_symbol[sym(i)] & low_mask(i);
        let mut l = 1;
        loop {
            if cand == 0 {
                i += l;
                break;
            }
            if i + l == n {
                i = n;
                break;
            }
            cand &= by_symbol[sym(i + l)] >> l;
            l += 1;
        }
        phrases += 1;
    }
    phrases
}

#[inline]
fn low_mask(k: usize) -> u64 {
    if k >= 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

/// Bidirectional LZ complexity.
pub fn c_lz(s: &SymbolString) -> Result<f64> {
    let n = s.len();
    if n < 2 {
        return Err(Error::Domain(format!("C_LZ needs length >= 2, got {n}")));
    }
    let log_n = (n as f64).log2();
    if s.is_constant() {
        return Ok(log_n);
    }
    let fwd = lz76_phrase_count(s);
    let rev = lz76_phrase_count(&s.reversed());
    Ok(log_n * (fwd + rev) as f64 / 2.0)
}

/// How the maximum of `C_LZ` was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxMethod {
    /// Every string of length `n`.
    Exhaustive,
    /// Uniform random strings from a fixed seed.
    RandomCorpus { size: u64, seed: u64 },
    /// The strings actually observed in one sample.
    ObservedSample { size: u64 },
}

impl MaxMethod {
    pub fn default_corpus() -> Self {
        MaxMethod::RandomCorpus {
            size: DEFAULT_CORPUS_SIZE,
            seed: DEFAULT_CORPUS_SEED,
        }
    }
}

/// Normalization constants for `K~` at one string length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityScale {
    pub n: usize,
    /// `log2` of the number of possible outputs, `2^n`.
    pub log2_m: f64,
    pub min_c: f64,
    pub max_c: f64,
    pub max_c_method: MaxMethod,
}

impl ComplexityScale {
    pub fn new(n: usize, max_c: f64, method: MaxMethod) -> Result<Self> {
        if !(2..=64).contains(&n) {
            return Err(Error::Config(format!("complexity scale needs n in [2, 64], got {n}")));
        }
        let min_c = (n as f64).log2();
        if !(max_c > min_c) {
            return Err(Error::Config(format!("max_c {max_c} must exceed min_c {min_c}")));
        }
        Ok(ComplexityScale {
            n,
            log2_m: n as f64,
            min_c,
            max_c,
            max_c_method: method,
        })
    }

    /// Maximum over all `2^n` strings.
    pub fn exhaustive(n: usize) -> Result<Self> {
        if !(2..=MAX_EXHAUSTIVE_LEN).contains(&n) {
            return Err(Error::Config(format!(
                "exhaustive normalization needs n in [2, {MAX_EXHAUSTIVE_LEN}], got {n}"
            )));
        }
        let max_c = (0..1u64 << n)
            .into_par_iter()
            .map(|bits| c_lz(&SymbolString::new(bits, n).expect("bits fit")).expect("n >= 2"))
            .reduce(|| f64::NEG_INFINITY, f64::max);
        Self::new(n, max_c, MaxMethod::Exhaustive)
    }

    /// Maximum over `size` uniform random strings drawn from `seed`.
    pub fn random_corpus(n: usize, size: u64, seed: u64) -> Result<Self> {
        if size == 0 {
            return Err(Error::Config("random corpus must not be empty".into()));
        }
        if !(2..=64).contains(&n) {
            return Err(Error::Config(format!("complexity scale needs n in [2, 64], got {n}")));
        }
        let shards = size.div_ceil(CORPUS_SHARD);
        let max_c = (0..shards)
            .into_par_iter()
            .map(|shard| {
                let mut rng = RngStream::new(seed, shard);
                let count = CORPUS_SHARD.min(size - shard * CORPUS_SHARD);
                (0..count)
                    .map(|_| {
                        let bits = rng.next_u64() & low_mask(n);
                        c_lz(&SymbolString::new(bits, n).expect("masked")).expect("n >= 2")
                    })
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .reduce(|| f64::NEG_INFINITY, f64::max);
        Self::new(n, max_c, MaxMethod::RandomCorpus { size, seed })
    }

    /// Maximum over the given strings, which must all have length `n`.
    pub fn observed<'a, I>(n: usize, patterns: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a SymbolString>,
    {
        let mut size = 0u64;
        let mut max_c = f64::NEG_INFINITY;
        for p in patterns {
            if p.len() != n {
                return Err(Error::Config(format!("pattern {p} does not have length {n}")));
            }
            max_c = max_c.max(c_lz(p)?);
            size += 1;
        }
        Self::new(n, max_c, MaxMethod::ObservedSample { size })
    }

    /// Builds (or reuses) the scale for a data-independent method.
    ///
    /// Exhaustive and corpus scales are memoized per process.
    pub fn cached(n: usize, method: MaxMethod) -> Result<Self> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, MaxMethod), ComplexityScale>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(scale) = cache.lock().expect("scale cache poisoned").get(&(n, method)) {
            return Ok(*scale);
        }
        let scale = match method {
            MaxMethod::Exhaustive => Self::exhaustive(n)?,
            MaxMethod::RandomCorpus { size, seed } => Self::random_corpus(n, size, seed)?,
            MaxMethod::ObservedSample { .. } => {
                return Err(Error::Config(
                    "observed-sample scales depend on the data and are not cached".into(),
                ))
            }
        };
        cache.lock().expect("scale cache poisoned").insert((n, method), scale);
        Ok(scale)
    }
}

/// Scaled complexity `log2(M) * (C_LZ - min) / (max - min)`, clipped to
/// `[0, log2 M]`.
pub fn k_tilde(s: &SymbolString, scale: &ComplexityScale) -> Result<f64> {
    if s.len() != scale.n {
        return Err(Error::Config(format!(
            "string length {} does not match scale n = {}",
            s.len(),
            scale.n
        )));
    }
    Ok(k_tilde_from_c(c_lz(s)?, scale))
}

pub(crate) fn k_tilde_from_c(c: f64, scale: &ComplexityScale) -> f64 {
    let k = scale.log2_m * (c - scale.min_c) / (scale.max_c - scale.min_c);
    if k > scale.log2_m {
        log::warn!(
            "C_LZ {c} exceeds scale max {}; clipping K~ to {}",
            scale.max_c,
            scale.log2_m
        );
        return scale.log2_m;
    }
    k.max(0.0)
}

/// A map-derived integer, described by the parameters that generate it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapDescriptor {
    pub mu: f64,
    /// Base-10 exponent of the initial condition.
    pub x0_log10: f64,
    pub eps: f64,
}

impl MapDescriptor {
    /// Canonical short text form, e.g. `2.5,1e-19728,0`.
    pub fn canonical_text(&self) -> String {
        format!("{},1e{},{}", self.mu, self.x0_log10, self.eps)
    }
}

/// Integers whose complexity the induction module needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegerDescriptor {
    /// An algorithmically typical integer.
    Typical(u128),
    /// `m^m`, described by `m` alone.
    PowerTower(u64),
    /// An integer produced by iterating the map.
    MapDerived(MapDescriptor),
}

/// Complexity estimate in bits, up to an additive constant.
///
/// `Typical(n)` is `log2 n` and `PowerTower(m)` is `log2 m`. `MapDerived` is
/// a heuristic: `log2` of the bit length (8 bits per character) of the
/// canonical text of the generating parameters.
pub fn integer_complexity_estimate(descriptor: &IntegerDescriptor) -> Result<f64> {
    match *descriptor {
        IntegerDescriptor::Typical(n) => {
            if n < 1 {
                return Err(Error::Domain("integer complexity needs n >= 1".into()));
            }
            Ok((n as f64).log2())
        }
        IntegerDescriptor::PowerTower(m) => {
            if m < 1 {
                return Err(Error::Domain("power tower needs m >= 1".into()));
            }
            Ok((m as f64).log2())
        }
        IntegerDescriptor::MapDerived(d) => {
            let chars = d.canonical_text().chars().count();
            Ok(((8 * chars) as f64).log2())
        }
    }
}
