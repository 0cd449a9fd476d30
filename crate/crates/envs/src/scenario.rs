//! Plain-text key-value scenario files, one `key = value` pair per line,
//! `#` comments allowed. Unknown keys are rejected.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("line {line}: expected `key = value`")]
    Malformed { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: bad value for `{key}`: {value}")]
    BadValue {
        line: usize,
        key: String,
        value: String,
    },
    #[error("missing required key `env`")]
    MissingEnv,
    #[error("unknown environment id `{0}`")]
    UnknownEnv(String),
}

/// Which simulator a scenario names.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvKind {
    CaptureTarget { macro_actions: bool },
    BoxPushing { macro_actions: bool },
    Warehouse,
}

impl EnvKind {
    pub fn parse(id: &str) -> Result<Self, ScenarioError> {
        match id {
            "capture_target" => Ok(EnvKind::CaptureTarget { macro_actions: true }),
            "capture_target_primitive" => Ok(EnvKind::CaptureTarget { macro_actions: false }),
            "box_pushing" => Ok(EnvKind::BoxPushing { macro_actions: true }),
            "box_pushing_primitive" => Ok(EnvKind::BoxPushing { macro_actions: false }),
            "warehouse" => Ok(EnvKind::Warehouse),
            other => Err(ScenarioError::UnknownEnv(other.to_string())),
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            EnvKind::CaptureTarget { macro_actions: true } => "capture_target",
            EnvKind::CaptureTarget { macro_actions: false } => "capture_target_primitive",
            EnvKind::BoxPushing { macro_actions: true } => "box_pushing",
            EnvKind::BoxPushing { macro_actions: false } => "box_pushing_primitive",
            EnvKind::Warehouse => "warehouse",
        }
    }
}

/// Parsed scenario: environment selection plus its geometry/schedule knobs.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvScenario {
    pub env: EnvKind,
    pub grid: Option<usize>,
    pub horizon: Option<u64>,
    pub speed: Option<f64>,
    pub seed: Option<u64>,
}

impl EnvScenario {
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let mut env = None;
        let mut grid = None;
        let mut horizon = None;
        let mut speed = None;
        let mut seed = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or(ScenarioError::Malformed { line })?;
            let key = key.trim();
            let value = value.trim();
            let bad = || ScenarioError::BadValue {
                line,
                key: key.to_string(),
                value: value.to_string(),
            };
            match key {
                "env" => env = Some(EnvKind::parse(value)?),
                "grid" => grid = Some(value.parse().map_err(|_| bad())?),
                "horizon" => horizon = Some(value.parse().map_err(|_| bad())?),
                "speed" => speed = Some(value.parse().map_err(|_| bad())?),
                "seed" => seed = Some(value.parse().map_err(|_| bad())?),
                other => {
                    return Err(ScenarioError::UnknownKey {
                        line,
                        key: other.to_string(),
                    })
                }
            }
        }
        Ok(EnvScenario {
            env: env.ok_or(ScenarioError::MissingEnv)?,
            grid,
            horizon,
            speed,
            seed,
        })
    }
}
