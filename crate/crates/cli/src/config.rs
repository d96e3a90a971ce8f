//! TOML scenario documents.
//!
//! Every [`Scenario`] field is a top-level key; omitted keys take their
//! defaults and unknown keys are rejected.

use std::fmt;

use stbc_ccm::{Error, Scenario};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: Option<String>,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        if let Some(key) = &self.key {
            write!(f, "`{key}`: ")?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for ConfigError {}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// 1-based line where `key` is assigned, if it is.
fn line_of_key(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| key_on_line(l) == Some(key)).map(|i| i + 1)
}

fn key_on_line(line: &str) -> Option<&str> {
    let (lhs, _) = line.split_once('=')?;
    let k = lhs.trim().trim_matches('"');
    (!k.is_empty() && !k.starts_with('#')).then_some(k)
}

fn backticked(msg: &str) -> Option<String> {
    let start = msg.find('`')? + 1;
    let len = msg[start..].find('`')?;
    Some(msg[start..start + len].to_string())
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, ConfigError> {
    let scn: Scenario = toml::from_str(text).map_err(|e| {
        let message = e.message().trim().to_string();
        let line = e.span().map(|s| line_of_offset(text, s.start));
        let key = if message.starts_with("unknown field") {
            backticked(&message)
        } else {
            line.and_then(|l| text.lines().nth(l - 1)).and_then(key_on_line).map(str::to_string)
        };
        ConfigError { key, line, message }
    })?;
    match scn.validate() {
        Ok(_) => Ok(scn),
        Err(Error::Scenario { field, reason }) => Err(ConfigError {
            line: line_of_key(text, &field),
            key: Some(field),
            message: reason,
        }),
        Err(e) => Err(ConfigError {
            key: None,
            line: None,
            message: e.to_string(),
        }),
    }
}

/// Serialises a scenario as a complete document (every key present).
pub fn serialize_scenario(scn: &Scenario) -> Result<String, ConfigError> {
    toml::to_string(scn).map_err(|e| ConfigError {
        key: None,
        line: None,
        message: e.to_string(),
    })
}
