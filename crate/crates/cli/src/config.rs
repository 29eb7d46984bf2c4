//! Run configuration shared by `subtract`, `bench` and `cdnet`.
//!
//! A config file is flat `key=value` text; command-line flags override it.
//!
//! ```text
//! operator = rlbsp    # rlbsp | lbsp | siltp | lbp
//! tau = 0.14          # RLBSP relative threshold
//! samples = 50        # samples per pixel (N)
//! min_matches = 2     # matches needed for background (#min)
//! rc = 15             # intensity L1 radius
//! rt = 5              # descriptor Hamming radius
//! phi = 16            # update subsampling factor
//! seed = 1            # model PRNG seed
//! ```

use std::path::Path;

use rlbsp::keyvalue::{self, parse_value};
use rlbsp::texture::{Operator, OperatorKind, RlbspParams};
use rlbsp::ModelParams;

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub operator: OperatorKind,
    pub tau: f64,
    pub model: ModelParams,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            operator: OperatorKind::Rlbsp,
            tau: RlbspParams::DEFAULT_TAU,
            model: ModelParams::default(),
            seed: 1,
        }
    }
}

/// Flag values that override the config file when present.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub operator: Option<OperatorKind>,
    pub tau: Option<f64>,
    pub samples: Option<usize>,
    pub min_matches: Option<usize>,
    pub rc: Option<u32>,
    pub rt: Option<u32>,
    pub phi: Option<u32>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn from_key_values(text: &str) -> CliResult<Self> {
        let mut cfg = RunConfig::default();
        for (k, v) in keyvalue::parse(text)? {
            let k = k.as_str();
            match k {
                "operator" => cfg.operator = v.parse()?,
                "tau" => cfg.tau = parse_value(k, &v)?,
                "samples" => cfg.model.samples = parse_value(k, &v)?,
                "min_matches" => cfg.model.min_matches = parse_value(k, &v)?,
                "rc" => cfg.model.color_radius = parse_value(k, &v)?,
                "rt" => cfg.model.texture_radius = parse_value(k, &v)?,
                "phi" => cfg.model.subsampling = parse_value(k, &v)?,
                "seed" => cfg.seed = parse_value(k, &v)?,
                other => return Err(CliError::Usage(format!("unknown config key {other:?}"))),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: Option<&Path>, overrides: &Overrides) -> CliResult<Self> {
        let mut cfg = match path {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::Io(format!("cannot read config {}: {e}", path.display()))
                })?;
                Self::from_key_values(&text)?
            }
            None => RunConfig::default(),
        };
        cfg.apply(overrides);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.operator {
            self.operator = v;
        }
        if let Some(v) = o.tau {
            self.tau = v;
        }
        if let Some(v) = o.samples {
            self.model.samples = v;
        }
        if let Some(v) = o.min_matches {
            self.model.min_matches = v;
        }
        if let Some(v) = o.rc {
            self.model.color_radius = v;
        }
        if let Some(v) = o.rt {
            self.model.texture_radius = v;
        }
        if let Some(v) = o.phi {
            self.model.subsampling = v;
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        self.model.validate()?;
        self.texture_operator().map(|_| ())
    }

    /// The configured operator; `tau` applies to RLBSP, baselines use their
    /// own defaults.
    pub fn texture_operator(&self) -> CliResult<Operator> {
        Ok(match self.operator {
            OperatorKind::Rlbsp => Operator::Rlbsp(RlbspParams::with_tau(self.tau)?),
            other => other.with_defaults(),
        })
    }

    pub fn to_key_values(&self) -> String {
        format!(
            "operator={}\ntau={}\nsamples={}\nmin_matches={}\nrc={}\nrt={}\nphi={}\nseed={}\n",
            self.operator,
            self.tau,
            self.model.samples,
            self.model.min_matches,
            self.model.color_radius,
            self.model.texture_radius,
            self.model.subsampling,
            self.seed
        )
    }
}
