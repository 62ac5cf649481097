//! Threshold digitization of real trajectories into packed binary strings.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map_engine::{RealTrajectory, RngStream, SymmetricNoise, MAX_LEN};

/// Values at or above this become `1`.
pub const THRESHOLD: f64 = 0.5;

/// A binary string of 1 to 64 symbols packed into one word.
///
/// Symbol `k` (0-based, left to right) lives at bit `len - 1 - k`, so the
/// packed word read as an unsigned integer equals the string read as a
/// binary numeral and the first symbol is the most significant. Bits at and
/// above `len` are always zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SymbolString {
    // Field order matters for the derived Ord: shorter strings first, then by value.
    len: u8,
    bits: u64,
}

impl SymbolString {
    pub fn new(bits: u64, len: usize) -> Result<Self> {
        if len == 0 || len > MAX_LEN {
            return Err(Error::Domain(format!(
                "symbol string length {len} outside [1, {MAX_LEN}]"
            )));
        }
        if bits & !mask(len) != 0 {
            return Err(Error::Domain(format!("bits {bits:#x} set beyond length {len}")));
        }
        Ok(SymbolString { len: len as u8, bits })
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::new(0, len)
    }

    pub fn ones(len: usize) -> Result<Self> {
        Self::new(mask(len), len)
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(symbols: I) -> Result<Self> {
        let mut bits = 0u64;
        let mut len = 0usize;
        for b in symbols {
            if len == MAX_LEN {
                return Err(Error::Domain(format!("symbol string longer than {MAX_LEN}")));
            }
            bits = (bits << 1) | b as u64;
            len += 1;
        }
        Self::new(bits, len)
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Symbol at position `k`, counting from the left.
    #[inline]
    pub fn get(&self, k: usize) -> bool {
        debug_assert!(k < self.len());
        (self.bits >> (self.len() - 1 - k)) & 1 == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(move |k| self.get(k))
    }

    /// Symbols as `0`/`1` bytes, left to right.
    pub fn to_symbols(&self) -> Vec<u8> {
        self.iter().map(|b| b as u8).collect()
    }

    pub fn reversed(&self) -> Self {
        let shift = 64 - self.len();
        SymbolString {
            len: self.len,
            bits: self.bits.reverse_bits() >> shift,
        }
    }

    pub fn complement(&self) -> Self {
        SymbolString {
            len: self.len,
            bits: !self.bits & mask(self.len()),
        }
    }

    /// `0^n` or `1^n`.
    pub fn is_constant(&self) -> bool {
        self.bits == 0 || self.bits == mask(self.len())
    }

    pub fn prefix(&self, len: usize) -> Result<Self> {
        if len == 0 || len > self.len() {
            return Err(Error::Domain(format!(
                "prefix length {len} outside [1, {}]",
                self.len()
            )));
        }
        Ok(SymbolString {
            len: len as u8,
            bits: self.bits >> (self.len() - len),
        })
    }
}

#[inline]
fn mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

impl fmt::Display for SymbolString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.iter().map(|b| if b { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for SymbolString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymbolString({self})")
    }
}

impl FromStr for SymbolString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let symbols = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("invalid symbol {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bits(symbols)
    }
}

impl TryFrom<String> for SymbolString {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SymbolString> for String {
    fn from(s: SymbolString) -> String {
        s.to_string()
    }
}

/// Thresholds each value at 0.5, inclusive on the upper side.
pub fn digitize(traj: &RealTrajectory) -> SymbolString {
    digitize_values(traj.values()).expect("trajectory length is validated on construction")
}

/// [`digitize`] over any slice, including measurement-perturbed values that
/// may lie outside `[0, 1]`.
pub fn digitize_values(values: &[f64]) -> Result<SymbolString> {
    if values.is_empty() || values.len() > MAX_LEN {
        return Err(Error::Domain(format!("cannot digitize {} values", values.len())));
    }
    let bits = values.iter().fold(0u64, |acc, &v| (acc << 1) | (v >= THRESHOLD) as u64);
    Ok(SymbolString {
        len: values.len() as u8,
        bits,
    })
}

/// Adds i.i.d. `U[-delta, delta]` noise to every recorded value. Results are
/// not clamped.
pub fn perturb_measurements(traj: &RealTrajectory, delta: f64, rng: &mut RngStream) -> Vec<f64> {
    let mut out = traj.values().to_vec();
    perturb_in_place(&mut out, delta, rng);
    out
}

pub(crate) fn perturb_in_place(values: &mut [f64], delta: f64, rng: &mut RngStream) {
    let noise = SymmetricNoise::new(delta);
    if delta > 0.0 {
        for v in values.iter_mut() {
            *v += noise.draw(rng);
        }
    }
}
