//! Job description read from the input JSON.

use newton_dual::duality::PotentialSpec;
use newton_dual::C64;
use serde::Deserialize;
use serde_json::Value;

/// A real number or a `[re, im]` pair.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Real(f64),
    Pair([f64; 2]),
}

impl Num {
    pub fn c64(self) -> C64 {
        match self {
            Num::Real(x) => C64::new(x, 0.0),
            Num::Pair([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum HeunFunction {
    Regular,
    B,
    H,
    K1,
    K2,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeunJob {
    pub alpha: Num,
    #[serde(default = "zero")]
    pub beta: Num,
    #[serde(default = "zero")]
    pub gamma: Num,
    #[serde(default = "zero")]
    pub delta: Num,
    pub function: HeunFunction,
    pub z: Option<Num>,
    #[serde(default = "default_terms")]
    pub n_terms: usize,
}

fn zero() -> Num {
    Num::Real(0.0)
}

fn default_terms() -> usize {
    8
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitJob {
    pub energy: f64,
    pub angular_momentum: f64,
    pub r_start: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
}

fn default_steps() -> usize {
    2000
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Job {
    pub potential: Option<PotentialSpec>,
    #[serde(default)]
    pub l: f64,
    #[serde(default)]
    pub n_r: usize,
    pub energy: Option<f64>,
    pub pivot: Option<usize>,
    /// map parameter the exp/log source does not fix
    pub free: Option<f64>,
    pub window: Option<[f64; 2]>,
    pub max_states: Option<usize>,
    pub scan_points: Option<usize>,
    pub k: Option<Vec<f64>>,
    pub tolerance: Option<f64>,
    pub orbit: Option<OrbitJob>,
    pub heun: Option<HeunJob>,
}

impl Job {
    /// Parses a job, accepting a bare potential document as well.
    pub fn parse(text: &str) -> Result<Self, String> {
        if text.trim().is_empty() {
            return Ok(Job::default());
        }
        let v: Value = serde_json::from_str(text).map_err(|e| format!("input is not JSON: {e}"))?;
        let is_bare = v.get("kind").is_some() && v.get("potential").is_none();
        if is_bare {
            let p: PotentialSpec = serde_json::from_value(v).map_err(|e| format!("bad potential: {e}"))?;
            return Ok(Job { potential: Some(p), ..Job::default() });
        }
        serde_json::from_value(v).map_err(|e| format!("bad job: {e}"))
    }

    pub fn potential(&self) -> Result<&PotentialSpec, String> {
        self.potential.as_ref().ok_or_else(|| "input needs a \"potential\"".to_string())
    }
}
