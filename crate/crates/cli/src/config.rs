//! Scenario configuration files (TOML).
//!
//! Top-level keys select the scenario, number mode, seed and output
//! directory; each scenario reads its own section. Unknown keys anywhere
//! are rejected.

use std::path::PathBuf;

use exptest::history::PathPattern;
use exptest::number::parse_rational;
use exptest::opinion_spec::{NumText, OpinionSpec};
use exptest::{Alphabet, Exact};
use num_text::{in_closed_unit, in_open_unit, positive};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Merge,
    Example1,
    Bdtest,
    Partition,
    Manipulate,
    Game,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Merge => "merge",
            ScenarioKind::Example1 => "example1",
            ScenarioKind::Bdtest => "bdtest",
            ScenarioKind::Partition => "partition",
            ScenarioKind::Manipulate => "manipulate",
            ScenarioKind::Game => "game",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Rational,
    Float,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveMethod {
    #[default]
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColumnRule {
    /// Lift Nature's optimal mixture only.
    Pure,
    /// Also lift Nature's Hedge response to the current expert mixture.
    #[default]
    Hedge,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GameSolver {
    #[default]
    Simplex,
    MultiplicativeWeights,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioKind>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub merge: Option<MergeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub example1: Option<Example1Config>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bdtest: Option<BdtestConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manipulate: Option<ManipulateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game: Option<GameConfig>,
}

fn default_lookahead() -> usize {
    4
}

fn default_threshold() -> NumText {
    NumText::new("0.1").expect("valid literal")
}

fn default_paths() -> usize {
    1000
}

fn default_reference() -> String {
    "(0)".into()
}

fn default_max_depth() -> usize {
    64
}

fn default_alphabet() -> usize {
    2
}

fn default_max_iters() -> usize {
    300
}

fn default_do_tol() -> f64 {
    1e-6
}

fn default_sharpness() -> f64 {
    exptest::manipulation::HEDGE_SHARPNESS
}

fn default_game_tol() -> f64 {
    1e-9
}

fn default_game_iters() -> usize {
    200_000
}

/// Merging curve of `p`'s forecasts toward `q`'s along `q`-distributed paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MergeConfig {
    pub t_max: usize,
    #[serde(default = "default_lookahead")]
    pub lookahead: usize,
    #[serde(default = "default_threshold")]
    pub threshold: NumText,
    #[serde(default)]
    pub method: CurveMethod,
    #[serde(default = "default_paths")]
    pub paths: usize,
    pub p: OpinionSpec,
    pub q: OpinionSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Example1Config {
    pub n: usize,
    pub k: usize,
    /// Eventually periodic reference path, e.g. `"(0)"` or `"1(01)"`.
    #[serde(default = "default_reference")]
    pub reference: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BdtestConfig {
    pub reference: String,
    pub epsilon: NumText,
    #[serde(default = "default_max_depth")]
    pub max_depth: usize,
    /// Strategy weights over the corpus; uniform when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<NumText>>,
    pub corpus: Vec<OpinionSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionConfig {
    pub epsilon: NumText,
    #[serde(default = "default_max_depth")]
    pub max_depth: usize,
    pub opinion: OpinionSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManipulateConfig {
    pub depth: usize,
    pub epsilon: NumText,
    pub delta: NumText,
    #[serde(default = "default_alphabet")]
    pub alphabet: usize,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_do_tol")]
    pub tol: f64,
    #[serde(default)]
    pub column_rule: ColumnRule,
    #[serde(default = "default_sharpness")]
    pub hedge_sharpness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameConfig {
    /// Whitespace-separated matrix file, relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payoffs: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub solver: GameSolver,
    #[serde(default = "default_game_tol")]
    pub tol: f64,
    #[serde(default = "default_game_iters")]
    pub max_iters: usize,
}

/// Parses and fully validates a configuration.
pub fn parse_config(text: &str) -> CliResult<ScenarioConfig> {
    let config = parse_config_unvalidated(text)?;
    config.validate()?;
    Ok(config)
}

/// Syntax and schema checks only; callers that apply overrides (such as
/// command-line flags) must call [`ScenarioConfig::validate`] afterwards.
pub fn parse_config_unvalidated(text: &str) -> CliResult<ScenarioConfig> {
    toml::from_str(text).map_err(|e| {
        let message = e.message().to_string();
        let field = match e.span() {
            Some(span) => locate(text, span.start),
            None => "config".into(),
        };
        CliError::config(field, message)
    })
}

/// Names a parse error by its line, since toml errors carry only a span.
fn locate(text: &str, offset: usize) -> String {
    let line = text[..offset.min(text.len())].matches('\n').count() + 1;
    format!("line {line}")
}

pub fn serialize_config(config: &ScenarioConfig) -> String {
    toml::to_string(config).expect("config serializes")
}

impl ScenarioConfig {
    fn sections(&self) -> Vec<ScenarioKind> {
        let mut present = Vec::new();
        if self.merge.is_some() {
            present.push(ScenarioKind::Merge);
        }
        if self.example1.is_some() {
            present.push(ScenarioKind::Example1);
        }
        if self.bdtest.is_some() {
            present.push(ScenarioKind::Bdtest);
        }
        if self.partition.is_some() {
            present.push(ScenarioKind::Partition);
        }
        if self.manipulate.is_some() {
            present.push(ScenarioKind::Manipulate);
        }
        if self.game.is_some() {
            present.push(ScenarioKind::Game);
        }
        present
    }

    /// The scenario this config describes: the `scenario` key if set,
    /// otherwise its only section.
    pub fn kind(&self) -> CliResult<ScenarioKind> {
        let sections = self.sections();
        match (self.scenario, sections.as_slice()) {
            (Some(kind), [only]) if *only == kind => Ok(kind),
            (Some(kind), _) => {
                Err(CliError::config("scenario", format!("expected exactly one [{}] section", kind.name())))
            }
            (None, [only]) => Ok(*only),
            (None, _) => Err(CliError::config("scenario", "config must contain exactly one scenario section")),
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        let kind = self.kind()?;
        match kind {
            ScenarioKind::Merge => self.merge.as_ref().unwrap().validate(self.seed),
            ScenarioKind::Example1 => self.example1.as_ref().unwrap().validate(),
            ScenarioKind::Bdtest => self.bdtest.as_ref().unwrap().validate(),
            ScenarioKind::Partition => self.partition.as_ref().unwrap().validate(),
            ScenarioKind::Manipulate => self.manipulate.as_ref().unwrap().validate(),
            ScenarioKind::Game => self.game.as_ref().unwrap().validate(),
        }
    }
}

fn check_opinion(field: &str, spec: &OpinionSpec) -> CliResult<()> {
    spec.build::<Exact>().map(|_| ()).map_err(|e| CliError::config(field, e.to_string()))
}

fn check_pattern(field: &str, text: &str, alphabet: Alphabet) -> CliResult<PathPattern> {
    PathPattern::parse(text, alphabet).map_err(|e| CliError::config(field, e.to_string()))
}

impl MergeConfig {
    fn validate(&self, seed: Option<u64>) -> CliResult<()> {
        if self.lookahead < 1 {
            return Err(CliError::config("merge.lookahead", "must be at least 1"));
        }
        in_closed_unit("merge.threshold", &self.threshold)?;
        check_opinion("merge.p", &self.p)?;
        check_opinion("merge.q", &self.q)?;
        if self.method == CurveMethod::MonteCarlo {
            if seed.is_none() {
                return Err(CliError::config("seed", "monte-carlo requires a seed (config `seed` or --seed)"));
            }
            if self.paths < 1 {
                return Err(CliError::config("merge.paths", "must be at least 1"));
            }
        }
        Ok(())
    }
}

impl Example1Config {
    fn validate(&self) -> CliResult<()> {
        if self.n < 1 {
            return Err(CliError::config("example1.n", "must be at least 1"));
        }
        if self.k < 1 {
            return Err(CliError::config("example1.k", "must be at least 1"));
        }
        check_pattern("example1.reference", &self.reference, Alphabet::BINARY)?;
        Ok(())
    }
}

impl BdtestConfig {
    fn validate(&self) -> CliResult<()> {
        in_closed_unit("bdtest.epsilon", &self.epsilon)?;
        positive("bdtest.epsilon", &self.epsilon)?;
        if self.max_depth < 1 {
            return Err(CliError::config("bdtest.max_depth", "must be at least 1"));
        }
        if self.corpus.is_empty() {
            return Err(CliError::config("bdtest.corpus", "must list at least one opinion"));
        }
        let mut alphabet = None;
        for (i, spec) in self.corpus.iter().enumerate() {
            let field = format!("bdtest.corpus[{i}]");
            let op = spec.build::<Exact>().map_err(|e| CliError::config(&field, e.to_string()))?;
            if *alphabet.get_or_insert(op.alphabet()) != op.alphabet() {
                return Err(CliError::config(field, "all corpus opinions must share one alphabet"));
            }
        }
        check_pattern("bdtest.reference", &self.reference, alphabet.unwrap())?;
        if let Some(weights) = &self.weights {
            if weights.len() != self.corpus.len() {
                return Err(CliError::config("bdtest.weights", "needs one weight per corpus opinion"));
            }
            for (i, w) in weights.iter().enumerate() {
                positive(&format!("bdtest.weights[{i}]"), w)?;
            }
        }
        Ok(())
    }
}

impl PartitionConfig {
    fn validate(&self) -> CliResult<()> {
        positive("partition.epsilon", &self.epsilon)?;
        in_closed_unit("partition.epsilon", &self.epsilon)?;
        if self.max_depth < 1 {
            return Err(CliError::config("partition.max_depth", "must be at least 1"));
        }
        check_opinion("partition.opinion", &self.opinion)
    }
}

impl ManipulateConfig {
    fn validate(&self) -> CliResult<()> {
        if self.depth < 1 {
            return Err(CliError::config("manipulate.depth", "must be at least 1"));
        }
        in_open_unit("manipulate.epsilon", &self.epsilon)?;
        positive("manipulate.delta", &self.delta)?;
        let eps = parse_rational(self.epsilon.as_str()).expect("checked");
        let delta = parse_rational(self.delta.as_str()).expect("checked");
        if delta > Exact::from_integer(1.into()) - eps {
            return Err(CliError::config("manipulate.delta", "must lie in (0, 1 - epsilon]"));
        }
        Alphabet::new(self.alphabet).map_err(|e| CliError::config("manipulate.alphabet", e.to_string()))?;
        if self.max_iters < 1 {
            return Err(CliError::config("manipulate.max_iters", "must be at least 1"));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::config("manipulate.tol", "must be positive"));
        }
        if !(self.hedge_sharpness > 0.0 && self.hedge_sharpness.is_finite()) {
            return Err(CliError::config("manipulate.hedge_sharpness", "must be positive"));
        }
        Ok(())
    }
}

impl GameConfig {
    fn validate(&self) -> CliResult<()> {
        match (&self.matrix_file, &self.payoffs) {
            (Some(_), None) => {}
            (None, Some(rows)) => {
                exptest::game::MatrixGame::new(rows.clone())
                    .map_err(|e| CliError::config("game.payoffs", e.to_string()))?;
            }
            _ => return Err(CliError::config("game", "set exactly one of matrix_file and payoffs")),
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::config("game.tol", "must be positive"));
        }
        if self.max_iters < 1 {
            return Err(CliError::config("game.max_iters", "must be at least 1"));
        }
        Ok(())
    }
}

mod num_text {
    use exptest::number::parse_rational;
    use exptest::opinion_spec::NumText;
    use num_traits::{One, Signed, Zero};

    use crate::error::{CliError, CliResult};

    fn value(field: &str, x: &NumText) -> CliResult<exptest::Exact> {
        parse_rational(x.as_str()).map_err(|e| CliError::config(field, e.to_string()))
    }

    pub fn positive(field: &str, x: &NumText) -> CliResult<()> {
        if value(field, x)?.is_positive() {
            Ok(())
        } else {
            Err(CliError::config(field, format!("must be positive, got {x}")))
        }
    }

    pub fn in_closed_unit(field: &str, x: &NumText) -> CliResult<()> {
        let v = value(field, x)?;
        if v.is_negative() || v > exptest::Exact::one() {
            Err(CliError::config(field, format!("must lie in [0, 1], got {x}")))
        } else {
            Ok(())
        }
    }

    pub fn in_open_unit(field: &str, x: &NumText) -> CliResult<()> {
        let v = value(field, x)?;
        if v <= exptest::Exact::zero() || v >= exptest::Exact::one() {
            Err(CliError::config(field, format!("must lie in (0, 1), got {x}")))
        } else {
            Ok(())
        }
    }
}
