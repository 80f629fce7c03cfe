//! Input resolution: an automaton file or a built-in free group, plus the
//! edge weighting every computation needs.

use std::fs;

use relgrowth_core::automaton::{parse_automaton, Automaton};
use relgrowth_core::oracle::{build_free_group_automaton, FreeGroupSpec};
use relgrowth_core::weights::EdgeWeighting;

use crate::config::{ConfigError, RunConfig};

pub struct ResolvedInput {
    pub automaton: Automaton,
    pub weighting: EdgeWeighting,
    pub label: String,
}

/// Parse "a:1,0;b:0,1" into per-generator images, by positive generator
/// name.
fn parse_hom_flag(hom: &str, rank: usize) -> Result<Vec<Vec<i64>>, ConfigError> {
    let mut images: Vec<Option<Vec<i64>>> = vec![None; rank];
    for part in hom.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (name, coords) = part
            .split_once(':')
            .ok_or_else(|| ConfigError(format!("hom part '{part}' must be 'name:ints'")))?;
        let name = name.trim();
        if name.len() != 1 {
            return Err(ConfigError(format!(
                "hom generator '{name}' must be a single letter for built-in groups"
            )));
        }
        let letter = name.chars().next().unwrap();
        if !letter.is_ascii_lowercase() {
            return Err(ConfigError(format!(
                "hom generator '{name}' must be lowercase (positive generator)"
            )));
        }
        let index = (letter as u8 - b'a') as usize;
        if index >= rank {
            return Err(ConfigError(format!(
                "hom generator '{name}' out of range for rank {rank}"
            )));
        }
        let image: Result<Vec<i64>, _> = coords
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<i64>()
                    .map_err(|_| ConfigError(format!("bad hom coordinate '{c}'")))
            })
            .collect();
        images[index] = Some(image?);
    }
    let dim = images
        .iter()
        .flatten()
        .map(|v| v.len())
        .next()
        .ok_or_else(|| ConfigError("hom flag names no generators".into()))?;
    let mut resolved = Vec::with_capacity(rank);
    for (i, img) in images.into_iter().enumerate() {
        match img {
            Some(v) if v.len() == dim => resolved.push(v),
            Some(v) => {
                return Err(ConfigError(format!(
                    "hom image for generator {} has {} coordinates, expected {dim}",
                    (b'a' + i as u8) as char,
                    v.len()
                )))
            }
            // Generators without an explicit image map to zero.
            None => resolved.push(vec![0; dim]),
        }
    }
    Ok(resolved)
}

pub fn resolve_group(config: &RunConfig) -> Result<FreeGroupSpec, ConfigError> {
    let group = config
        .group
        .as_deref()
        .ok_or_else(|| ConfigError("no --group given".into()))?;
    let rank = match group {
        "f2" => 2,
        "f3" => 3,
        other => {
            return Err(ConfigError(format!(
                "unknown group '{other}' (built-ins: f2, f3)"
            )))
        }
    };
    let spec = match &config.hom {
        Some(hom) => FreeGroupSpec::new(rank, parse_hom_flag(hom, rank)?)
            .map_err(|e| ConfigError(e.to_string()))?,
        None => FreeGroupSpec::abelianization(rank).map_err(|e| ConfigError(e.to_string()))?,
    };
    Ok(spec)
}

pub fn resolve(config: &RunConfig) -> Result<ResolvedInput, ConfigError> {
    if let Some(path) = &config.input {
        let text = fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        let parsed = parse_automaton(&text).map_err(|e| ConfigError(e.to_string()))?;
        let hom = parsed.homomorphism.ok_or_else(|| {
            ConfigError("homomorphism incomplete: input file has no hom lines".into())
        })?;
        let weighting =
            EdgeWeighting::new(&parsed.automaton, &hom).map_err(|e| ConfigError(e.to_string()))?;
        return Ok(ResolvedInput {
            automaton: parsed.automaton,
            weighting,
            label: path.display().to_string(),
        });
    }
    if config.group.is_some() {
        let spec = resolve_group(config)?;
        let (automaton, hom) = build_free_group_automaton(&spec);
        let weighting =
            EdgeWeighting::new(&automaton, &hom).map_err(|e| ConfigError(e.to_string()))?;
        let label = format!("builtin:{}", config.group.as_deref().unwrap());
        return Ok(ResolvedInput {
            automaton,
            weighting,
            label,
        });
    }
    Err(ConfigError(
        "no input: pass --input <file> or --group f2|f3".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_group_with_custom_hom() {
        let mut config = RunConfig::default();
        config.set("group", "f2").unwrap();
        config.set("hom", "a:1;b:0").unwrap();
        let resolved = resolve(&config).unwrap();
        assert_eq!(resolved.weighting.dim(), 1);
        assert_eq!(resolved.automaton.vertex_count(), 5);
        assert!(resolved.label.starts_with("builtin:"));
    }

    #[test]
    fn hom_flag_errors() {
        assert!(parse_hom_flag("a=1", 2).is_err());
        assert!(parse_hom_flag("c:1", 2).is_err());
        assert!(parse_hom_flag("a:1,0;b:1", 2).is_err());
        let ok = parse_hom_flag("a:1,0;b:0,1", 2).unwrap();
        assert_eq!(ok, vec![vec![1, 0], vec![0, 1]]);
        // Unnamed generators default to zero images.
        let partial = parse_hom_flag("a:2", 2).unwrap();
        assert_eq!(partial, vec![vec![2], vec![0]]);
    }

    #[test]
    fn missing_input_is_an_error() {
        let config = RunConfig::default();
        assert!(resolve(&config).is_err());
    }
}
