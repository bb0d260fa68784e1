//! Flat `key = value` configuration files.

use std::path::Path;

use crate::error::{Error, Result};
use crate::sim::SimConfig;

/// Applies `key = value` lines to `config`. `#` starts a comment.
pub fn apply_config_text(config: &mut SimConfig, text: &str) -> Result<()> {
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        apply_override(config, line)?;
    }
    Ok(())
}

/// Applies one `key=value` assignment.
pub fn apply_override(config: &mut SimConfig, assignment: &str) -> Result<()> {
    let Some((key, value)) = assignment.split_once('=') else {
        return Err(Error::Parse {
            key: assignment.trim().to_string(),
            value: String::new(),
        });
    };
    let key = key.trim();
    if !SimConfig::is_key(key) {
        return Err(Error::UnknownKey(key.to_string()));
    }
    config.set(key, value.trim())
}

/// Built-in defaults, then the file, then `overrides`; the result is
/// validated.
pub fn load_config(path: Option<&Path>, overrides: &[String]) -> Result<SimConfig> {
    let mut config = SimConfig::default();
    if let Some(p) = path {
        let text = std::fs::read_to_string(p)?;
        apply_config_text(&mut config, &text)?;
    }
    for o in overrides {
        apply_override(&mut config, o)?;
    }
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_without_file() {
        assert_eq!(load_config(None, &[]).unwrap(), SimConfig::default());
    }

    #[test]
    fn override_beats_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.cfg");
        std::fs::write(&p, "# comment\neps = 0.2   # trailing\n\nn_agents=50\n").unwrap();
        let c = load_config(Some(&p), &["eps=0.3".into()]).unwrap();
        assert_eq!(c.params.eps, 0.3);
        assert_eq!(c.n_agents, 50);
    }

    #[test]
    fn errors_name_the_key() {
        let e = load_config(None, &["eps=1.5".into()]).unwrap_err();
        assert!(matches!(&e, Error::Range { key, .. } if key == "eps"), "{e}");
        let e = load_config(None, &["bogus=1".into()]).unwrap_err();
        assert!(e.to_string().contains("bogus"));
        let e = load_config(None, &["n_agents=many".into()]).unwrap_err();
        assert!(matches!(&e, Error::Parse { key, .. } if key == "n_agents"));
        assert!(load_config(None, &["eps".into()]).is_err());
        assert!(matches!(load_config(Some(Path::new("/nonexistent/cfg")), &[]), Err(Error::Io(_))));
    }
}
