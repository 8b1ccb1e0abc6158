use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    EquidistShift,
    PartialIntervals,
    ShiftSubsets,
    PartialIntervalShifts,
    Variance,
    Model,
    GaussSum,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::EquidistShift => "equidist-shift",
            Experiment::PartialIntervals => "partial-intervals",
            Experiment::ShiftSubsets => "shift-subsets",
            Experiment::PartialIntervalShifts => "partial-interval-shifts",
            Experiment::Variance => "variance",
            Experiment::Model => "model",
            Experiment::GaussSum => "gauss-sum",
        }
    }
}

/// Parameters shared by every experiment. `kind` names the trace function
/// (`kummer`, `kloosterman`, `hyperelliptic`) or, for `model` and `gauss-sum`,
/// the group (`GL`, `SL`, `Sp`, `SO_odd`, `SO_plus`, `mu`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Characteristic of the domain field F_q.
    #[arg(long, default_value_t = 10007)]
    pub p: u64,
    /// Degree of F_q over F_p.
    #[arg(long, default_value_t = 1)]
    pub e: u32,
    /// Residue characteristic.
    #[arg(long, default_value_t = 3)]
    pub ell: u64,
    /// Order of the roots of unity in the coefficient ring (default: character order, or p).
    #[arg(long)]
    pub d: Option<u64>,
    /// Exponent k selecting the prime above ell.
    #[arg(long, default_value_t = 1)]
    pub conjugate: u64,
    #[arg(long, default_value = "kummer")]
    pub kind: String,
    /// Order of the multiplicative character.
    #[arg(long, default_value_t = 2)]
    pub order: u64,
    /// Kloosterman rank, matrix size, or d for mu_d.
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    /// Residue degree of the group field for `model` and `gauss-sum`.
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    /// Polynomial `c0;c1;...` or rational function `num/den`.
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<String>,
    #[arg(long)]
    pub normalized: bool,
    /// `shifted_subset`, `intervals`, `all_intervals` or `boxes`.
    #[arg(long)]
    pub family: Option<String>,
    /// Elements separated by `;` (coordinates by `,`); for
    /// `partial-interval-shifts`, integer sets `E_2/.../E_e`.
    #[arg(long, allow_hyphen_values = true)]
    pub set: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub shifts: Option<String>,
    /// Interval lengths `k1;k2;...` or box sides `a,b;c,d;...`.
    #[arg(long)]
    pub sizes: Option<String>,
    /// Walk length L.
    #[arg(long, default_value_t = 1)]
    pub steps: u32,
    /// Monte Carlo trials for `model`.
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long = "bound-constant", default_value_t = 5.0)]
    pub bound_constant: f64,
    #[arg(long)]
    #[serde(skip)]
    pub workers: Option<usize>,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            p: 10007,
            e: 1,
            ell: 3,
            d: None,
            conjugate: 1,
            kind: "kummer".into(),
            order: 2,
            n: 2,
            m: 1,
            f: None,
            normalized: false,
            family: None,
            set: None,
            shifts: None,
            sizes: None,
            steps: 1,
            trials: None,
            delta: 0.5,
            epsilon: 0.1,
            seed: 42,
            bound_constant: 5.0,
            workers: None,
            out: None,
        }
    }
}

impl ExperimentConfig {
    /// Checks that do not need any field arithmetic.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.e < 1 {
            return bad("e must be >= 1".into());
        }
        if self.steps < 1 {
            return bad("steps must be >= 1".into());
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return bad(format!("epsilon must lie in (0, 1/2), got {}", self.epsilon));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        if !(self.bound_constant > 0.0) {
            return bad("bound constant must be positive".into());
        }
        if self.workers == Some(0) {
            return bad("workers must be >= 1".into());
        }
        Ok(())
    }

    /// The echoed form: the experiment name followed by every field.
    pub fn echo(&self, experiment: Experiment) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("config serializes");
        v["experiment"] = experiment.name().into();
        v
    }

    /// Inverse of [`ExperimentConfig::echo`].
    pub fn from_echo(value: &serde_json::Value) -> Result<(Experiment, Self)> {
        let mut v = value.clone();
        let obj = v.as_object_mut().ok_or_else(|| Error::Parse("config must be a JSON object".into()))?;
        let name = obj.remove("experiment").ok_or_else(|| Error::Parse("config has no experiment".into()))?;
        let experiment: Experiment = serde_json::from_value(name)?;
        let cfg: ExperimentConfig = serde_json::from_value(v)?;
        Ok((experiment, cfg))
    }
}
