use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CtnError, Result};

/// Window size `k` and number of sweeps for heuristic cooling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HeuristicParams {
    pub k: usize,
    pub depth: usize,
}

impl HeuristicParams {
    pub fn new(k: usize, depth: usize) -> Result<Self> {
        if !(2..=3).contains(&k) {
            return Err(CtnError::InvalidArgument(format!("heuristic window k must be 2 or 3, got {k}")));
        }
        if depth == 0 {
            return Err(CtnError::InvalidArgument("heuristic depth must be at least 1".into()));
        }
        Ok(HeuristicParams { k, depth })
    }
}

impl Default for HeuristicParams {
    fn default() -> Self {
        HeuristicParams { k: 2, depth: 2 }
    }
}

/// Which coolers run after a non-Clifford rotation.
///
/// Text form: `none`, `exact`, `heuristic:k=2,d=2` or
/// `exact+heuristic:k=3,d=1`. Omitted parameters default to `k=2,d=2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct CoolingPolicy {
    pub exact: bool,
    pub heuristic: Option<HeuristicParams>,
}

impl CoolingPolicy {
    pub const NONE: CoolingPolicy = CoolingPolicy { exact: false, heuristic: None };
    pub const EXACT: CoolingPolicy = CoolingPolicy { exact: true, heuristic: None };

    pub fn heuristic(k: usize, depth: usize) -> Result<Self> {
        Ok(CoolingPolicy { exact: false, heuristic: Some(HeuristicParams::new(k, depth)?) })
    }

    pub fn exact_then_heuristic(k: usize, depth: usize) -> Result<Self> {
        Ok(CoolingPolicy { exact: true, heuristic: Some(HeuristicParams::new(k, depth)?) })
    }

    pub fn is_none(&self) -> bool {
        !self.exact && self.heuristic.is_none()
    }
}

fn parse_params(text: &str, offset: usize) -> Result<HeuristicParams> {
    let mut params = HeuristicParams::default();
    if text.is_empty() {
        return Ok(params);
    }
    let mut pos = offset;
    for item in text.split(',') {
        let (key, value) = item.split_once('=').ok_or_else(|| CtnError::Parse { pos, msg: format!("expected key=value, found '{item}'") })?;
        let value: usize = value.trim().parse().map_err(|_| CtnError::Parse { pos: pos + key.len() + 1, msg: format!("'{value}' is not an integer") })?;
        match key.trim() {
            "k" => params.k = value,
            "d" | "depth" => params.depth = value,
            other => return Err(CtnError::Parse { pos, msg: format!("unknown heuristic parameter '{other}'") }),
        }
        pos += item.len() + 1;
    }
    HeuristicParams::new(params.k, params.depth)
}

impl FromStr for CoolingPolicy {
    type Err = CtnError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "none" {
            return Ok(CoolingPolicy::NONE);
        }
        let (exact, rest, offset) = match s.strip_prefix("exact") {
            Some("") => return Ok(CoolingPolicy::EXACT),
            Some(r) => match r.strip_prefix('+') {
                Some(r) => (true, r, 6),
                None => return Err(CtnError::Parse { pos: 5, msg: "expected '+' after 'exact'".into() }),
            },
            None => (false, s, 0),
        };
        let params = match rest.strip_prefix("heuristic") {
            Some("") => HeuristicParams::default(),
            Some(r) => match r.strip_prefix(':') {
                Some(p) => parse_params(p, offset + 10)?,
                None => return Err(CtnError::Parse { pos: offset + 9, msg: "expected ':' after 'heuristic'".into() }),
            },
            None => {
                return Err(CtnError::Parse { pos: offset, msg: format!("unknown cooling policy '{s}'") });
            }
        };
        Ok(CoolingPolicy { exact, heuristic: Some(params) })
    }
}

impl fmt::Display for CoolingPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.exact, self.heuristic) {
            (false, None) => write!(f, "none"),
            (true, None) => write!(f, "exact"),
            (false, Some(h)) => write!(f, "heuristic:k={},d={}", h.k, h.depth),
            (true, Some(h)) => write!(f, "exact+heuristic:k={},d={}", h.k, h.depth),
        }
    }
}

impl From<CoolingPolicy> for String {
    fn from(p: CoolingPolicy) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for CoolingPolicy {
    type Error = CtnError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}
