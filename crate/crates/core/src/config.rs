//! Run configuration shared by the command-line subcommands. A JSON file
//! supplies defaults; command-line flags override it field by field.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::estimators::{Estimator, WindowPolicy};
use crate::models::CorrelationModel;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    /// Scale grid in the textual form accepted by [`parse_scales`].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scales: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<CorrelationModel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimator: Option<Vec<Estimator>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_range: Option<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicate: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mask: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_policy: Option<WindowPolicy>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correction_hurst: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trend: Option<Vec<f64>>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),*) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field; } )*
    };
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| domain(format!("config: {e}")))
    }

    /// Fields set in `top` replace those in `self`.
    pub fn merged(mut self, top: RunConfig) -> Self {
        overlay!(self, top; order, scales, model, estimator, fit_range, ensemble, seed,
            replicate, n, mask, gap_fraction, block_length, window_policy, correction_hurst, trend);
        self
    }

    /// One `key: value` comment per set field, for output headers.
    pub fn header_lines(&self) -> Vec<String> {
        let value = serde_json::to_value(self).unwrap_or_default();
        let Some(obj) = value.as_object() else {
            return Vec::new();
        };
        obj.iter().map(|(k, v)| format!("{k}: {v}")).collect()
    }
}

/// Reads a config file; `None` yields the empty config.
pub fn load(path: Option<&Path>) -> std::result::Result<RunConfig, String> {
    let Some(path) = path else {
        return Ok(RunConfig::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    RunConfig::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Parses a scale grid:
///
/// - `8,16,32`: explicit list;
/// - `4..64`: every integer in the inclusive range;
/// - `log:4:342:30`: about 30 log-spaced integers;
/// - `pow2:4:4096`: powers of two.
pub fn parse_scales(text: &str) -> Result<Vec<usize>> {
    let text = text.trim();
    let bad = || domain(format!("invalid scale specification '{text}'"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let mut scales: Vec<usize> = if let Some(rest) = text.strip_prefix("log:") {
        let parts: Vec<&str> = rest.split(':').collect();
        let [lo, hi, count] = parts.as_slice() else {
            return Err(bad());
        };
        let (lo, hi, count) = (num(lo)?, num(hi)?, num(count)?);
        if lo == 0 || hi < lo || count < 2 {
            return Err(bad());
        }
        let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
        (0..count)
            .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp().round() as usize)
            .collect()
    } else if let Some(rest) = text.strip_prefix("pow2:") {
        let (lo, hi) = rest.split_once(':').ok_or_else(bad)?;
        let (lo, hi) = (num(lo)?, num(hi)?);
        if lo == 0 {
            return Err(bad());
        }
        std::iter::successors(Some(lo.next_power_of_two()), |s| s.checked_mul(2))
            .take_while(|&s| s <= hi)
            .collect()
    } else if let Some((lo, hi)) = text.split_once("..") {
        let (lo, hi) = (num(lo)?, num(hi)?);
        (lo..=hi).collect()
    } else {
        text.split(',').map(num).collect::<Result<_>>()?
    };
    scales.sort_unstable();
    scales.dedup();
    if scales.is_empty() {
        return Err(bad());
    }
    Ok(scales)
}

/// Parses `lo:hi` (or `lo,hi`).
pub fn parse_range(text: &str) -> Result<(usize, usize)> {
    let bad = || domain(format!("invalid range '{text}', expected lo:hi"));
    let (a, b) = text
        .split_once(':')
        .or_else(|| text.split_once(','))
        .ok_or_else(bad)?;
    let lo = a.trim().parse().map_err(|_| bad())?;
    let hi = b.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}
