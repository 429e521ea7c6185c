//! `key = value` config files. Flags override file entries, which override
//! built-in defaults.

use std::collections::BTreeMap;
use std::path::Path;

use crate::CliError;

#[derive(Debug, Default, Clone, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, (String, usize)>,
}

impl ConfigFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "{origin}:{}: expected key = value",
                    n + 1
                )));
            };
            let key = k.trim().to_string();
            if entries
                .insert(key.clone(), (v.trim().to_string(), n + 1))
                .is_some()
            {
                return Err(CliError::Usage(format!(
                    "{origin}:{}: duplicate key '{key}'",
                    n + 1
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("--config {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Rejects keys outside `allowed`.
    pub fn check_keys(&self, command: &str, allowed: &[&str]) -> Result<(), CliError> {
        match self
            .entries
            .iter()
            .find(|(k, _)| !allowed.contains(&k.as_str()))
        {
            Some((k, (_, line))) => Err(CliError::Usage(format!(
                "config line {line}: unknown key '{k}' for {command} (expected one of: {})",
                allowed.join(", ")
            ))),
            None => Ok(()),
        }
    }

    /// Flag value if given, else the parsed file entry, else `None`.
    pub fn resolve<T>(
        &self,
        flag: Option<T>,
        key: &str,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.entries.get(key) {
            Some((v, line)) => parse(v).map(Some).map_err(|e| {
                CliError::Usage(format!(
                    "config line {line}: invalid value for '{key}': {e}"
                ))
            }),
            None => Ok(None),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blank_lines() {
        let cfg =
            ConfigFile::parse("# sweep\n\nsigma = 0.1mm  # width\nengine=grid\n", "t").unwrap();
        assert_eq!(
            cfg.resolve(None, "engine", |s| Ok::<_, String>(s.to_string()))
                .unwrap(),
            Some("grid".into())
        );
        assert_eq!(
            cfg.resolve(Some("flag".to_string()), "engine", |s| Ok(s.to_string()))
                .unwrap(),
            Some("flag".into())
        );
        assert_eq!(
            cfg.resolve(None, "pixel", |s| Ok(s.to_string())).unwrap(),
            None
        );
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        let cfg = ConfigFile::parse("sigma = 1mm\nwidth = 3\n", "t").unwrap();
        let err = cfg.check_keys("sweep", &["sigma"]).unwrap_err();
        assert!(err.to_string().contains("'width'"));
        assert!(ConfigFile::parse("sigma 1mm\n", "t").is_err());
        assert!(ConfigFile::parse("a = 1\na = 2\n", "t").is_err());
    }
}
