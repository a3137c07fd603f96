//! Scenario files and the built-in preset catalog.
//!
//! A scenario is a TOML document naming a model and its functional forms.
//! Parse and validation failures are reported as [`Error::Config`] with the
//! dotted path of the offending key.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::coate_loury::{CoateLoury, CostModel, MarketParams, SignalModel};
use crate::continuous::{BaseUtility, ContinuousMarket, MarketSpec, Production, WageStructure};
use crate::error::{Error, Result};
use crate::numerics::{Density, Tolerances};
use crate::rc_sgd::SgdConfig;
use crate::two_group::TwoGroupMarket;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    CoateLoury,
    TwoGroup,
    Continuous,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::CoateLoury => "coate-loury",
            ModelKind::TwoGroup => "two-group",
            ModelKind::Continuous => "continuous",
        }
    }
}

fn default_lambda() -> f64 {
    0.5
}

/// Binary-skill market. `lambda_maj` is only read by the two-group model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoateLourySpec {
    pub wage: f64,
    pub reward_pos: f64,
    pub penalty_neg: f64,
    #[serde(default = "default_lambda")]
    pub lambda_maj: f64,
    /// Signal density of skilled workers.
    pub skilled: Density,
    /// Signal density of unskilled workers.
    pub unskilled: Density,
    /// Distribution `G` of the cost of becoming skilled.
    pub cost: Density,
}

/// Parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepAxis {
    /// Slope of the linear base utility.
    A,
    /// Cost scale of both groups.
    C,
    /// Flat wage.
    W,
    /// Production exponent.
    Alpha,
    /// Majority share, costs unchanged.
    Lambda,
    CMaj,
    CMin,
    /// Majority share with `c_maj = scale_maj / lambda` and
    /// `c_min = scale_min / (1 - lambda)`, reading the configured scales as
    /// totals.
    LambdaScaled,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 8] = [
        SweepAxis::A,
        SweepAxis::C,
        SweepAxis::W,
        SweepAxis::Alpha,
        SweepAxis::Lambda,
        SweepAxis::CMaj,
        SweepAxis::CMin,
        SweepAxis::LambdaScaled,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::A => "a",
            SweepAxis::C => "c",
            SweepAxis::W => "w",
            SweepAxis::Alpha => "alpha",
            SweepAxis::Lambda => "lambda",
            SweepAxis::CMaj => "c-maj",
            SweepAxis::CMin => "c-min",
            SweepAxis::LambdaScaled => "lambda-scaled",
        }
    }

    pub fn parse(name: &str) -> Result<SweepAxis> {
        SweepAxis::ALL.into_iter().find(|a| a.name() == name).ok_or_else(|| {
            let known: Vec<_> = SweepAxis::ALL.iter().map(SweepAxis::name).collect();
            Error::config("sweep.axis", format!("unknown axis `{name}`, expected one of {}", known.join(", ")))
        })
    }

    /// The market obtained by setting this parameter of `base` to `value`.
    pub fn apply(&self, base: &MarketSpec, value: f64) -> Result<MarketSpec> {
        let mut spec = *base;
        let unsupported = |what: &str| {
            Err(Error::config(
                "sweep.axis",
                format!("axis `{}` needs {what}", self.name()),
            ))
        };
        match self {
            SweepAxis::A => match &mut spec.utility.base {
                BaseUtility::Linear { slope, .. } => *slope = value,
                _ => return unsupported("a linear base utility"),
            },
            SweepAxis::C => {
                spec.cost.scale = value;
                spec.cost.scale_maj = None;
                spec.cost.scale_min = None;
            }
            SweepAxis::W => match &mut spec.wage {
                WageStructure::Flat { wage } => *wage = value,
                WageStructure::Nash => return unsupported("a flat wage"),
            },
            SweepAxis::Alpha => spec.utility.production = Production::Power { alpha: value },
            SweepAxis::Lambda => spec.lambda_maj = value,
            SweepAxis::CMaj => spec.cost.scale_maj = Some(value),
            SweepAxis::CMin => spec.cost.scale_min = Some(value),
            SweepAxis::LambdaScaled => {
                use crate::policy::Group;
                let (total_maj, total_min) = (base.cost.scale_for(Group::Maj), base.cost.scale_for(Group::Min));
                spec.lambda_maj = value;
                spec.cost.scale_maj = Some(total_maj / value);
                spec.cost.scale_min = Some(total_min / (1.0 - value));
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

fn default_stable_tol() -> f64 {
    1e-3
}

fn default_max_iters() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    #[serde(default)]
    pub values: Vec<f64>,
    /// Retraining stops once successive pairs are this close.
    #[serde(default = "default_stable_tol")]
    pub stable_tol: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            axis: SweepAxis::A,
            values: Vec::new(),
            stable_tol: default_stable_tol(),
            max_iters: default_max_iters(),
        }
    }
}

/// Grid resolution and accuracy targets. `grid_n` defaults per model.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_n: Option<usize>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub id: String,
    pub model: ModelKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coate_loury: Option<CoateLourySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub continuous: Option<MarketSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sgd: Option<SgdConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub numerics: NumericsConfig,
}

/// Built-in scenarios as `(id, TOML source)`.
pub const PRESETS: [(&str, &str); 12] = [
    ("fairness-linear", include_str!("../presets/fairness-linear.toml")),
    ("linear-flat", include_str!("../presets/linear-flat.toml")),
    ("linear-flat-c", include_str!("../presets/linear-flat-c.toml")),
    ("nonlinear-nash", include_str!("../presets/nonlinear-nash.toml")),
    ("nonlinear-nash-gap20", include_str!("../presets/nonlinear-nash-gap20.toml")),
    ("nonlinear-nash-lambda", include_str!("../presets/nonlinear-nash-lambda.toml")),
    ("nonlinear-nash-lambda-concave", include_str!("../presets/nonlinear-nash-lambda-concave.toml")),
    ("sgd-a2w1c5", include_str!("../presets/sgd-a2w1c5.toml")),
    ("sgd-a4w1c4", include_str!("../presets/sgd-a4w1c4.toml")),
    ("thm31-demo", include_str!("../presets/thm31-demo.toml")),
    ("thm32-demo", include_str!("../presets/thm32-demo.toml")),
    ("thm34-demo", include_str!("../presets/thm34-demo.toml")),
];

fn located(e: &Error, prefix: &str) -> Error {
    Error::config(prefix, e.to_string())
}

impl ScenarioConfig {
    /// Parses and validates a scenario document.
    pub fn parse(source: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(source).map_err(|e| Error::config("(document)", e.to_string().trim_end()))?;
        let config: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let key = if path == "." { "(document)".to_string() } else { path };
            Error::config(key, e.inner().message().to_string())
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn preset(id: &str) -> Result<Self> {
        let (_, source) = PRESETS
            .iter()
            .find(|(name, _)| *name == id)
            .ok_or_else(|| Error::config("preset", format!("no preset named `{id}`")))?;
        Self::parse(source)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario configs serialize to TOML")
    }

    /// Hex SHA-256 of a git-style blob header followed by the canonical
    /// (sorted-key, compact) JSON form of the config.
    pub fn hash(&self) -> String {
        let value = serde_json::to_value(self).expect("scenario configs serialize to JSON");
        let body = value.to_string();
        let mut hasher = Sha256::new();
        hasher.update(format!("blob {}\0", body.len()).as_bytes());
        hasher.update(body.as_bytes());
        hex::encode(hasher.finalize())
    }

    pub fn grid_n(&self) -> usize {
        self.numerics.grid_n.unwrap_or(match self.model {
            ModelKind::CoateLoury | ModelKind::TwoGroup => crate::coate_loury::DEFAULT_GRID,
            ModelKind::Continuous => crate::continuous::SweepSettings::default().grid_n,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.id.trim().is_empty() {
            return Err(Error::config("id", "must not be empty"));
        }
        self.numerics.tolerances.validate()?;
        if let Some(n) = self.numerics.grid_n {
            if n < 64 {
                return Err(Error::config("numerics.grid_n", format!("must be at least 64, got {n}")));
            }
        }
        match self.model {
            ModelKind::CoateLoury => {
                self.coate_loury_market()?;
            }
            ModelKind::TwoGroup => {
                self.two_group_market()?;
            }
            ModelKind::Continuous => {
                self.market_spec()?.validate()?;
            }
        }
        if let Some(sgd) = &self.sgd {
            sgd.validate()?;
        }
        if let Some(sweep) = &self.sweep {
            if self.model != ModelKind::Continuous {
                return Err(Error::config("sweep", "sweeps need the continuous model"));
            }
            if let Some(i) = sweep.values.iter().position(|v| !v.is_finite()) {
                return Err(Error::config(format!("sweep.values[{i}]"), "must be finite"));
            }
            if !(sweep.stable_tol.is_finite() && sweep.stable_tol > 0.0) {
                return Err(Error::config("sweep.stable_tol", "must be positive"));
            }
        }
        Ok(())
    }

    fn coate_loury_spec(&self) -> Result<&CoateLourySpec> {
        self.coate_loury.as_ref().ok_or_else(|| {
            Error::config("coate_loury", format!("missing section, required by model `{}`", self.model.name()))
        })
    }

    pub fn coate_loury_market(&self) -> Result<CoateLoury> {
        let spec = self.coate_loury_spec()?;
        for (key, d) in [("skilled", spec.skilled), ("unskilled", spec.unskilled), ("cost", spec.cost)] {
            d.validate().map_err(|e| located(&e, &format!("coate_loury.{key}")))?;
        }
        let signal =
            SignalModel::new(spec.skilled, spec.unskilled).map_err(|e| located(&e, "coate_loury.skilled"))?;
        let cost = CostModel::new(spec.cost).map_err(|e| located(&e, "coate_loury.cost"))?;
        let params = MarketParams::new(spec.wage, spec.reward_pos, spec.penalty_neg).map_err(|e| {
            let key = if !(spec.wage.is_finite() && spec.wage >= 0.0) {
                "coate_loury.wage"
            } else if !(spec.reward_pos.is_finite() && spec.reward_pos > 0.0) {
                "coate_loury.reward_pos"
            } else {
                "coate_loury.penalty_neg"
            };
            located(&e, key)
        })?;
        Ok(CoateLoury::new(signal, cost, params).with_tolerances(self.numerics.tolerances))
    }

    pub fn two_group_market(&self) -> Result<TwoGroupMarket> {
        let market = self.coate_loury_market()?;
        let lambda = self.coate_loury_spec()?.lambda_maj;
        TwoGroupMarket::new(market, lambda).map_err(|e| located(&e, "coate_loury.lambda_maj"))
    }

    pub fn market_spec(&self) -> Result<MarketSpec> {
        self.continuous.ok_or_else(|| {
            Error::config("continuous", format!("missing section, required by model `{}`", self.model.name()))
        })
    }

    pub fn continuous_market(&self) -> Result<ContinuousMarket> {
        ContinuousMarket::with_tolerances(self.market_spec()?, self.numerics.tolerances)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key_of(source: &str) -> String {
        match ScenarioConfig::parse(source) {
            Err(Error::Config { key, .. }) => key,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn every_preset_parses_under_its_own_id() {
        for (id, _) in PRESETS {
            assert_eq!(ScenarioConfig::preset(id).unwrap().id, id);
        }
    }

    #[test]
    fn errors_name_the_key() {
        let base = ScenarioConfig::preset("thm31-demo").unwrap().to_toml();
        assert_eq!(key_of(&base.replace("wage = 5.0", "wage = -5.0")), "coate_loury.wage");
        assert_eq!(key_of(&base.replace("wage = 5.0", "wag = 5.0")), "coate_loury.wag");
        assert_eq!(key_of(&base.replace("model = \"coate-loury\"", "model = \"nope\"")), "model");
        assert_eq!(key_of(&base.replace("model = \"coate-loury\"", "model = \"continuous\"")), "continuous");
        assert_eq!(key_of("id = \"x\"\nmodel = "), "(document)");
        let sgd = ScenarioConfig::preset("sgd-a2w1c5").unwrap().to_toml();
        assert_eq!(key_of(&sgd.replace("slope = 2.0", "slope = \"two\"")), "continuous.utility.base");
    }

    #[test]
    fn hash_tracks_content() {
        let a = ScenarioConfig::preset("linear-flat").unwrap();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed += 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn lambda_scaled_axis_divides_totals() {
        let cfg = ScenarioConfig::preset("nonlinear-nash-lambda").unwrap();
        let spec = SweepAxis::LambdaScaled.apply(&cfg.market_spec().unwrap(), 0.5).unwrap();
        assert_eq!(spec.lambda_maj, 0.5);
        assert_eq!(spec.cost.scale_maj, Some(40.0));
        assert_eq!(spec.cost.scale_min, Some(50.0));
    }

    #[test]
    fn axis_needs_matching_form() {
        let cfg = ScenarioConfig::preset("nonlinear-nash").unwrap();
        match SweepAxis::W.apply(&cfg.market_spec().unwrap(), 1.0) {
            Err(Error::Config { key, .. }) => assert_eq!(key, "sweep.axis"),
            other => panic!("{other:?}"),
        }
    }
}
