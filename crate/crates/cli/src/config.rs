//! TOML run configuration. Every number that is not a count is a rational
//! string such as `"3/4"` or `"-2"`.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use hpwin_core::adversary::BobConfig;
use hpwin_core::game::ProductBall;
use hpwin_core::lemmas::Suite;
use hpwin_core::parse_rational;
use hpwin_core::strategy::Mode;
use num_rational::BigRational;
use serde::Deserialize;

pub type Q = BigRational;

pub const OUT_DIR_ENV: &str = "HPWIN_OUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CommandName {
    Play,
    Verify,
    Systole,
    Scan,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<CommandName>,
    pub mode: Option<Mode>,
    pub beta: Option<String>,
    pub gamma: Option<String>,
    pub rounds: Option<usize>,
    pub seed: Option<u64>,
    pub initial_ball: Option<BallConfig>,
    pub demo: Option<DemoConfig>,
    pub bob: Option<BobConfig>,
    pub budget: Option<BudgetConfig>,
    pub output: Option<OutputConfig>,
    pub verify: Option<VerifyConfig>,
    pub systole: Option<SystoleConfig>,
    pub scan: Option<ScanConfig>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallConfig {
    pub lambda: String,
    pub center: [String; 3],
    pub radius: String,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemoConfig {
    #[serde(rename = "R")]
    pub r: Option<String>,
    pub epsilon: Option<String>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetConfig {
    pub q_max: Option<u64>,
    pub precision_cap: Option<u32>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    pub transcript: Option<PathBuf>,
    pub audit: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub suite: Option<Suite>,
    pub trials: Option<u64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystoleConfig {
    pub lambda: Option<String>,
    pub point: Option<[String; 3]>,
    pub t_max: Option<String>,
    pub steps: Option<u32>,
    /// Working precision of the interval arithmetic.
    pub bits: Option<u32>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub lambda: Option<String>,
    pub z: Option<String>,
    pub x: Option<[String; 2]>,
    pub y: Option<[String; 2]>,
    pub nx: Option<u32>,
    pub ny: Option<u32>,
    pub q_max: Option<u64>,
    pub epsilon: Option<String>,
    pub cell_budget: Option<u64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    /// Output directory: the flag, then the environment, then the config.
    pub fn out_dir(&self, flag: Option<&Path>) -> PathBuf {
        if let Some(p) = flag {
            return p.to_path_buf();
        }
        if let Some(p) = std::env::var_os(OUT_DIR_ENV).filter(|s| !s.is_empty()) {
            return PathBuf::from(p);
        }
        self.output
            .as_ref()
            .and_then(|o| o.dir.clone())
            .unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn output(&self) -> OutputConfig {
        self.output.clone().unwrap_or_default()
    }

    pub fn initial_ball(&self) -> Result<Option<ProductBall>> {
        let Some(b) = &self.initial_ball else {
            return Ok(None);
        };
        let ball = ProductBall::new(
            rational("initial_ball.lambda", &b.lambda)?,
            rational_triple("initial_ball.center", &b.center)?,
            rational("initial_ball.radius", &b.radius)?,
        )?;
        Ok(Some(ball))
    }
}

pub fn rational(field: &str, s: &str) -> Result<Q> {
    parse_rational(s).with_context(|| format!("field {field}"))
}

pub fn rational_triple(field: &str, s: &[String; 3]) -> Result<[Q; 3]> {
    Ok([rational(field, &s[0])?, rational(field, &s[1])?, rational(field, &s[2])?])
}

pub fn opt_rational(field: &str, s: Option<&String>) -> Result<Option<Q>> {
    s.map(|s| rational(field, s)).transpose()
}

pub fn parse_triple(field: &str, s: &str) -> Result<[String; 3]> {
    let parts: Vec<String> = s.split(',').map(|p| p.trim().to_string()).collect();
    match <[String; 3]>::try_from(parts) {
        Ok(t) => Ok(t),
        Err(v) => bail!("{field} needs three comma-separated rationals, got {}", v.len()),
    }
}

pub fn parse_pair(field: &str, s: &str) -> Result<[String; 2]> {
    let parts: Vec<String> = s.split(',').map(|p| p.trim().to_string()).collect();
    match <[String; 2]>::try_from(parts) {
        Ok(t) => Ok(t),
        Err(v) => bail!("{field} needs two comma-separated rationals, got {}", v.len()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_config_parses() {
        let cfg = RunConfig::parse(
            r#"
command = "play"
mode = "demo"
beta = "1/2"
gamma = "1"
rounds = 12
seed = 3

[initial_ball]
lambda = "3/4"
center = ["1/20", "1/30", "1/2"]
radius = "1/10"

[demo]
R = "16"
epsilon = "1/1048576"

[bob]
kind = "greedy_cusp"
shrink = "1/2"
target = [0, 0, 1]

[budget]
q_max = 1000
precision_cap = 2048

[output]
dir = "out"
"#,
        )
        .unwrap();
        assert_eq!(cfg.command, Some(CommandName::Play));
        assert_eq!(cfg.mode, Some(Mode::Demo));
        let ball = cfg.initial_ball().unwrap().unwrap();
        assert_eq!(ball.radius, hpwin_core::arith::ratio(1, 10));
        assert_eq!(cfg.demo.unwrap().r.as_deref(), Some("16"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::parse("rounds = 3\ncolour = 1\n").is_err());
        assert!(RunConfig::parse("[budget]\nq_mx = 3\n").is_err());
        assert!(RunConfig::parse("[bob]\nkind = \"random\"\nshrink = \"1/2\"\nspeed = 1\n").is_err());
    }

    #[test]
    fn bad_rationals_name_the_field() {
        let cfg = RunConfig::parse(
            "[initial_ball]\nlambda = \"0.75\"\ncenter = [\"0\",\"0\",\"0\"]\nradius = \"1/10\"\n",
        )
        .unwrap();
        let err = format!("{:#}", cfg.initial_ball().unwrap_err());
        assert!(err.contains("initial_ball.lambda"), "{err}");
    }

    #[test]
    fn triples_split_on_commas() {
        assert_eq!(parse_triple("p", "1/2, 0,3").unwrap(), ["1/2", "0", "3"].map(String::from));
        assert!(parse_triple("p", "1,2").is_err());
        assert!(parse_pair("x", "0,1").is_ok());
    }
}
