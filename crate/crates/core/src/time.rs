//! Epochs on a uniform Modified Julian Date scale.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, SECONDS_PER_DAY};

/// An instant on a uniform MJD scale (no leap seconds).
///
/// The day number and the fraction of day are kept apart so that differences
/// of nearby epochs are resolved to ~1e-11 s, well below the spacing of radar
/// observations.
#[derive(Debug, Clone, Copy)]
pub struct Epoch {
    day: i64,
    frac: f64,
}

impl Epoch {
    pub fn from_mjd(mjd: f64) -> Self {
        assert!(mjd.is_finite(), "non-finite MJD");
        let day = mjd.floor();
        Self::from_parts(day as i64, mjd - day)
    }

    /// Builds an epoch from an integer day and a fraction of day, normalising
    /// the fraction into `[0, 1)`.
    pub fn from_parts(day: i64, frac: f64) -> Self {
        assert!(frac.is_finite(), "non-finite day fraction");
        let carry = frac.floor();
        let mut day = day + carry as i64;
        let mut frac = frac - carry;
        if frac >= 1.0 {
            frac -= 1.0;
            day += 1;
        }
        Epoch { day, frac }
    }

    pub fn mjd(&self) -> f64 {
        self.day as f64 + self.frac
    }

    pub fn day(&self) -> i64 {
        self.day
    }

    pub fn day_fraction(&self) -> f64 {
        self.frac
    }

    pub fn add_seconds(&self, seconds: f64) -> Self {
        Self::from_parts(self.day, self.frac + seconds / SECONDS_PER_DAY)
    }

    /// `self − other` in seconds.
    pub fn seconds_since(&self, other: &Epoch) -> f64 {
        ((self.day - other.day) as f64 + (self.frac - other.frac)) * SECONDS_PER_DAY
    }

    /// Arithmetic mean of a non-empty set of epochs.
    pub fn mean(epochs: &[Epoch]) -> Option<Epoch> {
        let first = *epochs.first()?;
        let offset: f64 = epochs.iter().map(|e| e.seconds_since(&first)).sum::<f64>();
        Some(first.add_seconds(offset / epochs.len() as f64))
    }
}

impl PartialEq for Epoch {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Epoch {}

impl PartialOrd for Epoch {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Epoch {
    fn cmp(&self, other: &Self) -> Ordering {
        self.day
            .cmp(&other.day)
            .then_with(|| self.frac.total_cmp(&other.frac))
    }
}

/// Lossless decimal form: the integer day followed by the shortest
/// round-tripping digits of the day fraction.
impl fmt::Display for Epoch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let frac = format!("{}", self.frac);
        let digits = frac.strip_prefix("0.").unwrap_or("0");
        write!(f, "{}.{}", self.day, digits)
    }
}

impl FromStr for Epoch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || Error::InvalidInput(format!("bad MJD '{s}'"));
        if s.contains(['e', 'E']) || s.starts_with('-') {
            let mjd: f64 = s.parse().map_err(|_| bad())?;
            if !mjd.is_finite() {
                return Err(bad());
            }
            return Ok(Epoch::from_mjd(mjd));
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, "0"));
        let day: i64 = int.parse().map_err(|_| bad())?;
        let frac: f64 = if frac.is_empty() {
            0.0
        } else {
            format!("0.{frac}").parse().map_err(|_| bad())?
        };
        Ok(Epoch::from_parts(day, frac))
    }
}

impl Serialize for Epoch {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Epoch {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Number(f64),
        }
        match Repr::deserialize(d)? {
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Number(x) if x.is_finite() => Ok(Epoch::from_mjd(x)),
            Repr::Number(_) => Err(serde::de::Error::custom("non-finite MJD")),
        }
    }
}
