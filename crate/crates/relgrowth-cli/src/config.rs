//! Run configuration: defaults, config-file parsing, flag merging.
//!
//! Settings come from three layers, weakest first: built-in defaults, a
//! `key = value` config file, command-line flags. Flags always win.

use std::path::PathBuf;

#[derive(Clone, Debug)]
pub struct RunConfig {
    /// Automaton file; mutually exclusive inputs resolved in `source`.
    pub input: Option<PathBuf>,
    /// Built-in group: "f2" or "f3".
    pub group: Option<String>,
    /// Generator images for built-in groups: "a:1,0;b:0,1".
    pub hom: Option<String>,
    pub n_max: usize,
    pub grid: usize,
    pub max_order: usize,
    pub window: Option<(usize, usize)>,
    /// Weight target for counting (defaults to zero weight).
    pub target: Option<Vec<i64>>,
    pub out_dir: PathBuf,
    pub seed: u64,
    /// Extra random torus samples during scans (0 = grid only).
    pub samples: usize,
    pub word_budget: u64,
    pub table_budget: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: None,
            group: None,
            hom: None,
            n_max: 60,
            grid: 16,
            max_order: 20,
            window: None,
            target: None,
            out_dir: PathBuf::from("out"),
            seed: 1,
            samples: 0,
            word_budget: 10_000_000,
            table_budget: 20_000_000,
        }
    }
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn parse_window(s: &str) -> Result<(usize, usize), ConfigError> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| ConfigError(format!("window '{s}' must be 'start:end'")))?;
    let a = a
        .trim()
        .parse()
        .map_err(|_| ConfigError(format!("bad window start '{a}'")))?;
    let b = b
        .trim()
        .parse()
        .map_err(|_| ConfigError(format!("bad window end '{b}'")))?;
    if a >= b {
        return Err(ConfigError(format!("window '{s}' is empty")));
    }
    Ok((a, b))
}

pub fn parse_target(s: &str) -> Result<Vec<i64>, ConfigError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| ConfigError(format!("bad target coordinate '{t}'")))
        })
        .collect()
}

impl RunConfig {
    /// Apply one `key = value` assignment (config-file line or test).
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        match key {
            "input" => self.input = Some(PathBuf::from(value)),
            "group" => self.group = Some(value.to_string()),
            "hom" => self.hom = Some(value.to_string()),
            "n_max" => {
                self.n_max = value
                    .parse()
                    .map_err(|_| ConfigError(format!("bad n_max '{value}'")))?
            }
            "grid" => {
                self.grid = value
                    .parse()
                    .map_err(|_| ConfigError(format!("bad grid '{value}'")))?
            }
            "max_order" => {
                self.max_order = value
                    .parse()
                    .map_err(|_| ConfigError(format!("bad max_order '{value}'")))?
            }
            "window" => self.window = Some(parse_window(value)?),
            "target" => self.target = Some(parse_target(value)?),
            "out_dir" => self.out_dir = PathBuf::from(value),
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| ConfigError(format!("bad seed '{value}'")))?
            }
            "samples" => {
                self.samples = value
                    .parse()
                    .map_err(|_| ConfigError(format!("bad samples '{value}'")))?
            }
            "word_budget" => {
                self.word_budget = value
                    .parse()
                    .map_err(|_| ConfigError(format!("bad word_budget '{value}'")))?
            }
            "table_budget" => {
                self.table_budget = value
                    .parse()
                    .map_err(|_| ConfigError(format!("bad table_budget '{value}'")))?
            }
            _ => return Err(ConfigError(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    /// Load `key = value` lines; '#' starts a comment.
    pub fn apply_file(&mut self, text: &str) -> Result<(), ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: expected key = value", idx + 1)))?;
            self.set(key.trim(), value)
                .map_err(|e| ConfigError(format!("line {}: {e}", idx + 1)))?;
        }
        Ok(())
    }

    /// Invariants every run requires.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_max < 4 {
            return Err(ConfigError(format!(
                "n_max must be at least 4, got {}",
                self.n_max
            )));
        }
        if self.grid < 8 {
            return Err(ConfigError(format!(
                "grid must be at least 8, got {}",
                self.grid
            )));
        }
        if self.word_budget == 0 || self.table_budget == 0 {
            return Err(ConfigError("budgets must be positive".into()));
        }
        if self.max_order == 0 {
            return Err(ConfigError("max_order must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags_precedence() {
        let mut config = RunConfig::default();
        config
            .apply_file("n_max = 100\ngrid = 32  # comment\n\n# full-line comment\nseed = 7\n")
            .unwrap();
        assert_eq!(config.n_max, 100);
        assert_eq!(config.grid, 32);
        assert_eq!(config.seed, 7);
        // A later flag-style set overrides.
        config.set("n_max", "50").unwrap();
        assert_eq!(config.n_max, 50);
    }

    #[test]
    fn invariants_rejected() {
        let mut config = RunConfig::default();
        config.set("n_max", "2").unwrap();
        assert!(config.validate().is_err());
        let mut config = RunConfig::default();
        config.set("grid", "4").unwrap();
        assert!(config.validate().is_err());
    }

    #[test]
    fn window_and_target_parsing() {
        assert_eq!(parse_window("40:160").unwrap(), (40, 160));
        assert!(parse_window("40").is_err());
        assert!(parse_window("50:50").is_err());
        assert_eq!(parse_target("1,-2").unwrap(), vec![1, -2]);
        assert!(parse_target("1,x").is_err());
    }
}
